//! Black-box checkers for the additivity axioms.
//!
//! Every checker first sweeps a small integer lattice deterministically (for
//! arity up to [`CheckConfig::lattice_max_arity`]) and then draws seeded random
//! instances. Random trials are split into fixed-size blocks, each with its own
//! sub-seed, so the verdict does not depend on how many workers run them.
//!
//! No instance is ever evaluated unless every point it touches lies in the
//! configured domain; the closure conditions of the axioms are enforced by
//! rejection and asserted again right before evaluation.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregator::Aggregator;
use crate::error::{Error, Result};
use crate::oracle;
use crate::setfn::{full_set, indicator, random_permutation, Subset};
use crate::vecops::{
    add, comonotonic_unchecked, cut_above, cut_below, join_scalar, med_clamp, meet_scalar,
    neg_side, pos_part, scale, DomainSpec,
};

const BLOCK: u64 = 256;
const REJECTION_FACTOR: u64 = 100;

/// The axioms a function can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axiom {
    #[serde(rename = "comonotonic")]
    Comonotonic,
    #[serde(rename = "hmin")]
    HorizontalMin,
    #[serde(rename = "hmax")]
    HorizontalMax,
    #[serde(rename = "hmedian")]
    HorizontalMedian,
    #[serde(rename = "pos-comonotonic")]
    PositiveComonotonic,
    #[serde(rename = "neg-comonotonic")]
    NegativeComonotonic,
    #[serde(rename = "pos-hmin")]
    PositiveHorizontalMin,
    #[serde(rename = "neg-hmax")]
    NegativeHorizontalMax,
    #[serde(rename = "splitting")]
    Splitting,
    #[serde(rename = "diagonal")]
    Diagonal,
    /// `f(cx) = c f(x)` for every real `c`.
    #[serde(rename = "homogeneity")]
    Homogeneity,
    /// `f(cx) = c f(x)` for `c > 0`.
    #[serde(rename = "pos-homogeneity")]
    PositiveHomogeneity,
    #[serde(rename = "oddness-pos")]
    OddnessPositive,
}

impl Axiom {
    pub const ALL: [Axiom; 13] = [
        Axiom::Comonotonic,
        Axiom::HorizontalMin,
        Axiom::HorizontalMax,
        Axiom::HorizontalMedian,
        Axiom::PositiveComonotonic,
        Axiom::NegativeComonotonic,
        Axiom::PositiveHorizontalMin,
        Axiom::NegativeHorizontalMax,
        Axiom::Splitting,
        Axiom::Diagonal,
        Axiom::Homogeneity,
        Axiom::PositiveHomogeneity,
        Axiom::OddnessPositive,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axiom::Comonotonic => "comonotonic",
            Axiom::HorizontalMin => "hmin",
            Axiom::HorizontalMax => "hmax",
            Axiom::HorizontalMedian => "hmedian",
            Axiom::PositiveComonotonic => "pos-comonotonic",
            Axiom::NegativeComonotonic => "neg-comonotonic",
            Axiom::PositiveHorizontalMin => "pos-hmin",
            Axiom::NegativeHorizontalMax => "neg-hmax",
            Axiom::Splitting => "splitting",
            Axiom::Diagonal => "diagonal",
            Axiom::Homogeneity => "homogeneity",
            Axiom::PositiveHomogeneity => "pos-homogeneity",
            Axiom::OddnessPositive => "oddness-pos",
        }
    }

    /// Axioms only defined on intervals centered at 0.
    pub fn requires_centered(&self) -> bool {
        matches!(
            self,
            Axiom::HorizontalMedian
                | Axiom::PositiveComonotonic
                | Axiom::NegativeComonotonic
                | Axiom::PositiveHorizontalMin
                | Axiom::NegativeHorizontalMax
                | Axiom::OddnessPositive
        )
    }

    pub(crate) fn law(&self) -> Option<Law> {
        Some(match self {
            Axiom::Comonotonic => Law::Additive(Half::Whole),
            Axiom::PositiveComonotonic => Law::Additive(Half::Positive),
            Axiom::NegativeComonotonic => Law::Additive(Half::Negative),
            Axiom::HorizontalMin => Law::MinCut(Half::Whole),
            Axiom::PositiveHorizontalMin => Law::MinCut(Half::Positive),
            Axiom::HorizontalMax => Law::MaxCut(Half::Whole),
            Axiom::NegativeHorizontalMax => Law::MaxCut(Half::Negative),
            Axiom::HorizontalMedian => Law::MedianCut,
            Axiom::Splitting => Law::Splitting,
            Axiom::Homogeneity => Law::Homogeneity {
                positive_only: false,
            },
            Axiom::PositiveHomogeneity => Law::Homogeneity {
                positive_only: true,
            },
            Axiom::OddnessPositive => Law::OddPositive,
            Axiom::Diagonal => return None,
        })
    }
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Value(format!("unknown axiom `{s}`")))
    }
}

/// Violation means `gap > abs + rel * max(|lhs|, |rhs|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn violated(&self, lhs: f64, rhs: f64) -> bool {
        let gap = (lhs - rhs).abs();
        let bound = self.abs + self.rel * lhs.abs().max(rhs.abs());
        gap.is_nan() || gap > bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub domain: DomainSpec,
    /// Random trials (the lattice sweep comes on top).
    pub trials: u64,
    pub tolerance: Tolerance,
    pub seed: u64,
    /// Worker threads for the random phase; results do not depend on it.
    pub jobs: usize,
    /// Values for the deterministic sweep, enumerated in this order.
    pub lattice: Vec<f64>,
    /// The sweep runs only for arity up to this.
    pub lattice_max_arity: usize,
    /// Unbounded domains are sampled within `[-scale, scale]`.
    pub scale: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            domain: DomainSpec::FullLine,
            trials: 10_000,
            tolerance: Tolerance::default(),
            seed: 0,
            jobs: 1,
            lattice: vec![0.0, 1.0, -1.0, 2.0, -2.0],
            lattice_max_arity: 4,
            scale: 10.0,
        }
    }
}

impl CheckConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Value("trials must be at least 1".into()));
        }
        if !(self.tolerance.abs >= 0.0 && self.tolerance.rel >= 0.0) {
            return Err(Error::Value("tolerances must be nonnegative".into()));
        }
        if self.scale.is_nan() || self.scale <= 0.0 {
            return Err(Error::Value("sampling scale must be positive".into()));
        }
        Ok(())
    }
}

/// The arguments of one axiom instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Inputs {
    Pair {
        x: Vec<f64>,
        x_prime: Vec<f64>,
    },
    Cut {
        x: Vec<f64>,
        c: f64,
    },
    Point {
        x: Vec<f64>,
    },
    Scaled {
        x: Vec<f64>,
        c: f64,
    },
    Section {
        subset: Subset,
        t: f64,
        t_prime: f64,
    },
    Odd {
        subset: Subset,
        t: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    Lattice,
    Random,
}

/// A violated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub inputs: Inputs,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub source: WitnessSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionScope {
    /// `δ^A` additive on `I₊`.
    Positive,
    /// `δ^A` additive on `I₋`.
    Negative,
    /// `δ^A` additive on all of `I`.
    FullLine,
    /// `δ^A(-t) = -δ^A(t)`.
    Odd,
}

/// One section property inside a diagonal verdict.
///
/// Informational entries are reported but do not affect the overall verdict:
/// full-line additivity of `δ^A` for `A ≠ [n]` is not implied by any axiom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionVerdict {
    pub subset: Subset,
    pub scope: SectionScope,
    pub informational: bool,
    pub passed: bool,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub axiom: Axiom,
    pub passed: bool,
    pub trials: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sections: Vec<SectionVerdict>,
}

impl Verdict {
    /// The section entry for `(subset, scope)`, if the verdict has one.
    pub fn section(&self, subset: Subset, scope: SectionScope) -> Option<&SectionVerdict> {
        self.sections
            .iter()
            .find(|s| s.subset == subset && s.scope == scope)
    }
}

/// Which side of the origin a sampled quantity lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Half {
    Whole,
    Positive,
    Negative,
}

impl Half {
    pub(crate) fn bounds(&self, domain: &DomainSpec) -> (f64, f64) {
        match self {
            Half::Whole => domain.bounds(),
            Half::Positive => domain.positive_half(),
            Half::Negative => domain.negative_half(),
        }
    }

    fn contains(&self, domain: &DomainSpec, v: f64) -> bool {
        let (lo, hi) = self.bounds(domain);
        lo <= v && v <= hi
    }

    fn contains_all(&self, domain: &DomainSpec, x: &[f64]) -> bool {
        x.iter().all(|&v| self.contains(domain, v))
    }
}

/// A single functional equation with its admissible instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Law {
    Additive(Half),
    MinCut(Half),
    MaxCut(Half),
    MedianCut,
    Splitting,
    Homogeneity { positive_only: bool },
    OddPositive,
    SectionAdditive { subset: Subset, half: Half },
    SectionOdd { subset: Subset },
}

fn section_point(n: usize, subset: Subset, t: f64) -> Vec<f64> {
    indicator(n, subset).into_iter().map(|v| v * t).collect()
}

impl Law {
    /// Every point the instance evaluates `f` at.
    fn points(&self, n: usize, inputs: &Inputs) -> Vec<Vec<f64>> {
        match (self, inputs) {
            (Law::Additive(_), Inputs::Pair { x, x_prime }) => {
                vec![add(x, x_prime), x.clone(), x_prime.clone()]
            }
            (Law::MinCut(_), Inputs::Cut { x, c }) => {
                vec![x.clone(), meet_scalar(x, *c), cut_above(x, *c)]
            }
            (Law::MaxCut(_), Inputs::Cut { x, c }) => {
                vec![x.clone(), join_scalar(x, *c), cut_below(x, *c)]
            }
            (Law::MedianCut, Inputs::Cut { x, c }) => vec![
                x.clone(),
                med_clamp(x, *c).unwrap_or_else(|_| vec![f64::NAN; n]),
                cut_above(x, *c),
                cut_below(x, -*c),
            ],
            (Law::Splitting, Inputs::Point { x }) => vec![x.clone(), pos_part(x), neg_side(x)],
            (Law::Homogeneity { .. }, Inputs::Scaled { x, c }) => vec![scale(x, *c), x.clone()],
            (Law::OddPositive, Inputs::Point { x }) => {
                vec![scale(x, -1.0), x.clone(), vec![0.0; n]]
            }
            (Law::SectionAdditive { subset, .. }, Inputs::Section { t, t_prime, .. }) => vec![
                section_point(n, *subset, t + t_prime),
                section_point(n, *subset, *t),
                section_point(n, *subset, *t_prime),
            ],
            (Law::SectionOdd { subset }, Inputs::Odd { t, .. }) => {
                vec![section_point(n, *subset, -t), section_point(n, *subset, *t)]
            }
            _ => unreachable!("inputs {inputs:?} do not fit {self:?}"),
        }
    }

    /// Both sides of the equation at this instance.
    fn sides<F: Aggregator + ?Sized>(&self, f: &F, inputs: &Inputs) -> (f64, f64) {
        let n = f.arity();
        let v: Vec<f64> = self.points(n, inputs).iter().map(|p| f.value(p)).collect();
        match (self, inputs) {
            (Law::Homogeneity { .. }, Inputs::Scaled { c, .. }) => (v[0], c * v[1]),
            (Law::OddPositive, _) => (v[0] - v[2], -(v[1] - v[2])),
            (Law::SectionOdd { .. }, _) => (v[0], -v[1]),
            _ => (v[0], v[1..].iter().sum()),
        }
    }

    /// Membership conditions of the instance, including the closure ones.
    fn admissible(&self, domain: &DomainSpec, n: usize, inputs: &Inputs) -> bool {
        let specific = match (self, inputs) {
            (Law::Additive(h), Inputs::Pair { x, x_prime }) => {
                h.contains_all(domain, x)
                    && h.contains_all(domain, x_prime)
                    && h.contains_all(domain, &add(x, x_prime))
                    && comonotonic_unchecked(x, x_prime)
            }
            (Law::MinCut(h) | Law::MaxCut(h), Inputs::Cut { x, c }) => {
                h.contains_all(domain, x) && h.contains(domain, *c)
            }
            (Law::MedianCut, Inputs::Cut { c, .. }) => Half::Positive.contains(domain, *c),
            (Law::Splitting, Inputs::Point { .. }) => true,
            (Law::Homogeneity { positive_only }, Inputs::Scaled { c, .. }) => {
                c.is_finite() && (!positive_only || *c > 0.0)
            }
            (Law::OddPositive, Inputs::Point { x }) => Half::Positive.contains_all(domain, x),
            (
                Law::SectionAdditive { half, subset },
                Inputs::Section {
                    t,
                    t_prime,
                    subset: s,
                },
            ) => {
                s == subset
                    && half.contains(domain, *t)
                    && half.contains(domain, *t_prime)
                    && half.contains(domain, t + t_prime)
            }
            (Law::SectionOdd { subset }, Inputs::Odd { subset: s, .. }) => s == subset,
            _ => false,
        };
        specific
            && self
                .points(n, inputs)
                .iter()
                .all(|p| p.iter().all(|v| v.is_finite()) && domain.contains_all(p))
    }

    /// Draws a candidate instance; the caller rejects inadmissible ones.
    fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
        domain: &DomainSpec,
        range: f64,
    ) -> Inputs {
        let vector = |rng: &mut R, h: Half| -> Vec<f64> {
            (0..n).map(|_| draw(rng, h.bounds(domain), range)).collect()
        };
        match *self {
            Law::Additive(h) => {
                let sigma = random_permutation(n, rng);
                let mut sorted_pair = || {
                    let mut v = vector(rng, h);
                    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let mut out = vec![0.0; n];
                    for (k, &i) in sigma.iter().enumerate() {
                        out[i] = v[k];
                    }
                    out
                };
                let x = sorted_pair();
                let x_prime = sorted_pair();
                Inputs::Pair { x, x_prime }
            }
            Law::MinCut(h) | Law::MaxCut(h) => Inputs::Cut {
                x: vector(rng, h),
                c: draw(rng, h.bounds(domain), range),
            },
            Law::MedianCut => Inputs::Cut {
                x: vector(rng, Half::Whole),
                c: draw(rng, domain.positive_half(), range),
            },
            Law::Splitting => Inputs::Point {
                x: vector(rng, Half::Whole),
            },
            Law::Homogeneity { positive_only } => {
                let bounds = if positive_only {
                    (0.0, 3.0)
                } else {
                    (-3.0, 3.0)
                };
                let mut c = draw(rng, bounds, 3.0);
                if positive_only && c == 0.0 {
                    c = 1.0;
                }
                Inputs::Scaled {
                    x: vector(rng, Half::Whole),
                    c,
                }
            }
            Law::OddPositive => Inputs::Point {
                x: vector(rng, Half::Positive),
            },
            Law::SectionAdditive { subset, half } => Inputs::Section {
                subset,
                t: draw(rng, half.bounds(domain), range),
                t_prime: draw(rng, half.bounds(domain), range),
            },
            Law::SectionOdd { subset } => Inputs::Odd {
                subset,
                t: draw(rng, domain.bounds(), range),
            },
        }
    }
}

/// A value in `[lo, hi]` clipped to `[-range, range]`, with extra mass on 0
/// and on integers so that ties and sign boundaries get hit.
fn draw<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64), range: f64) -> f64 {
    let lo = lo.max(-range);
    let hi = hi.min(range);
    let r: f64 = rng.gen();
    if r < 0.05 || lo >= hi {
        return 0.0f64.clamp(lo, hi);
    }
    if r < 0.25 {
        let (a, b) = (lo.ceil() as i64, hi.floor() as i64);
        if a <= b {
            return rng.gen_range(a..=b) as f64;
        }
    }
    rng.gen_range(lo..=hi)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed of block `block` of stream `stream`.
pub fn block_seed(seed: u64, stream: u64, block: u64) -> u64 {
    splitmix(splitmix(seed ^ splitmix(stream)) ^ block)
}

/// Outcome of checking one law.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LawOutcome {
    pub trials: u64,
    pub witness: Option<Witness>,
}

/// Evaluates one admissible instance; `None` when it holds.
pub(crate) fn probe<F: Aggregator + ?Sized>(
    f: &F,
    law: Law,
    domain: &DomainSpec,
    tolerance: &Tolerance,
    inputs: Inputs,
    source: WitnessSource,
) -> Option<Witness> {
    assert!(
        law.admissible(domain, f.arity(), &inputs),
        "inadmissible instance {inputs:?} for {law:?} on {domain}"
    );
    let (lhs, rhs) = law.sides(f, &inputs);
    tolerance.violated(lhs, rhs).then(|| Witness {
        inputs,
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        source,
    })
}

pub(crate) fn admissible(law: Law, domain: &DomainSpec, n: usize, inputs: &Inputs) -> bool {
    law.admissible(domain, n, inputs)
}

struct BlockOutcome {
    evaluated: u64,
    witness: Option<Witness>,
}

fn run_random<F: Aggregator + ?Sized>(
    f: &F,
    law: Law,
    cfg: &CheckConfig,
    stream: u64,
    trials: u64,
) -> Result<LawOutcome> {
    let n = f.arity();
    let blocks = trials.div_ceil(BLOCK) as usize;
    let first_failure = AtomicUsize::new(usize::MAX);
    let run_block = |b: usize| -> Result<Option<BlockOutcome>> {
        if b > first_failure.load(Ordering::Relaxed) {
            return Ok(None);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(block_seed(cfg.seed, stream, b as u64));
        let want = BLOCK.min(trials - b as u64 * BLOCK);
        let mut evaluated = 0;
        let mut rejections = 0;
        while evaluated < want {
            let inputs = law.sample(&mut rng, n, &cfg.domain, cfg.scale);
            if !law.admissible(&cfg.domain, n, &inputs) {
                rejections += 1;
                if rejections > REJECTION_FACTOR * want {
                    return Err(Error::SamplerExhausted {
                        rejections,
                        accepted: evaluated,
                    });
                }
                continue;
            }
            evaluated += 1;
            let found = probe(
                f,
                law,
                &cfg.domain,
                &cfg.tolerance,
                inputs,
                WitnessSource::Random,
            );
            if found.is_some() {
                first_failure.fetch_min(b, Ordering::Relaxed);
                return Ok(Some(BlockOutcome {
                    evaluated,
                    witness: found,
                }));
            }
        }
        Ok(Some(BlockOutcome {
            evaluated,
            witness: None,
        }))
    };

    let outcomes: Vec<Result<Option<BlockOutcome>>> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Value(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..blocks).into_par_iter().map(run_block).collect())
    } else {
        let mut out = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let o = run_block(b);
            let stop = matches!(
                &o,
                Ok(Some(BlockOutcome {
                    witness: Some(_),
                    ..
                })) | Err(_)
            );
            out.push(o);
            if stop {
                break;
            }
        }
        out
    };

    let mut total = 0;
    for outcome in outcomes {
        match outcome? {
            Some(block) => {
                total += block.evaluated;
                if block.witness.is_some() {
                    return Ok(LawOutcome {
                        trials: total,
                        witness: block.witness,
                    });
                }
            }
            None => break,
        }
    }
    Ok(LawOutcome {
        trials: total,
        witness: None,
    })
}

fn run_law<F: Aggregator + ?Sized>(
    f: &F,
    law: Law,
    cfg: &CheckConfig,
    stream: u64,
    trials: u64,
) -> Result<LawOutcome> {
    let mut swept = 0;
    if f.arity() <= cfg.lattice_max_arity {
        let sweep = oracle::sweep_law(f, law, &cfg.lattice, &cfg.domain, &cfg.tolerance);
        if sweep.witness.is_some() {
            return Ok(sweep);
        }
        swept = sweep.trials;
    }
    let mut random = run_random(f, law, cfg, stream, trials)?;
    random.trials += swept;
    Ok(random)
}

/// The section laws a diagonal check runs, with their informational flag.
pub(crate) fn diagonal_laws(n: usize, domain: &DomainSpec) -> Vec<(Law, SectionScope, bool)> {
    let full = full_set(n);
    let centered = domain.is_centered();
    let mut laws = Vec::new();
    for subset in 0..=full {
        laws.push((
            Law::SectionAdditive {
                subset,
                half: Half::Positive,
            },
            SectionScope::Positive,
            false,
        ));
        laws.push((
            Law::SectionAdditive {
                subset,
                half: Half::Negative,
            },
            SectionScope::Negative,
            false,
        ));
        laws.push((
            Law::SectionAdditive {
                subset,
                half: Half::Whole,
            },
            SectionScope::FullLine,
            !(centered && subset == full),
        ));
    }
    if centered {
        laws.push((Law::SectionOdd { subset: full }, SectionScope::Odd, false));
    }
    laws
}

pub(crate) fn assemble_diagonal(
    cfg_seed: u64,
    entries: Vec<(Law, SectionScope, bool, LawOutcome)>,
) -> Verdict {
    let mut sections = Vec::with_capacity(entries.len());
    let mut witness = None;
    let mut trials = 0;
    for (law, scope, informational, outcome) in entries {
        let subset = match law {
            Law::SectionAdditive { subset, .. } | Law::SectionOdd { subset } => subset,
            _ => unreachable!(),
        };
        trials += outcome.trials;
        if !informational && witness.is_none() {
            witness = outcome.witness.clone();
        }
        sections.push(SectionVerdict {
            subset,
            scope,
            informational,
            passed: outcome.witness.is_none(),
            trials: outcome.trials,
            witness: outcome.witness,
        });
    }
    Verdict {
        axiom: Axiom::Diagonal,
        passed: witness.is_none(),
        trials,
        seed: cfg_seed,
        witness,
        sections,
    }
}

/// Checks `f` against `axiom` under `cfg`.
pub fn check<F: Aggregator + ?Sized>(f: &F, axiom: Axiom, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    if f.arity() == 0 {
        return Err(Error::Dimension("cannot check a 0-place function".into()));
    }
    if axiom.requires_centered() && !cfg.domain.is_centered() {
        return Err(Error::DomainKind {
            axiom: axiom.name().into(),
            domain: cfg.domain.to_string(),
        });
    }
    match axiom.law() {
        Some(law) => {
            let outcome = run_law(f, law, cfg, 0, cfg.trials)?;
            Ok(Verdict {
                axiom,
                passed: outcome.witness.is_none(),
                trials: outcome.trials,
                seed: cfg.seed,
                witness: outcome.witness,
                sections: Vec::new(),
            })
        }
        None => {
            let laws = diagonal_laws(f.arity(), &cfg.domain);
            let per_law = cfg.trials.div_ceil(laws.len() as u64).max(1);
            let mut entries = Vec::with_capacity(laws.len());
            for (k, (law, scope, informational)) in laws.into_iter().enumerate() {
                let outcome = run_law(f, law, cfg, k as u64 + 1, per_law)?;
                entries.push((law, scope, informational, outcome));
            }
            Ok(assemble_diagonal(cfg.seed, entries))
        }
    }
}

/// Both sides of `axiom` at one instance, e.g. to reproduce a witness by hand.
///
/// For [`Axiom::Diagonal`] pass [`Inputs::Section`] (additivity of `δ^A`) or
/// [`Inputs::Odd`]. No domain check is made here.
pub fn sides<F: Aggregator + ?Sized>(f: &F, axiom: Axiom, inputs: &Inputs) -> Result<(f64, f64)> {
    let law = match (axiom.law(), inputs) {
        (Some(law), _) => law,
        (None, Inputs::Section { subset, .. }) => Law::SectionAdditive {
            subset: *subset,
            half: Half::Whole,
        },
        (None, Inputs::Odd { subset, .. }) => Law::SectionOdd { subset: *subset },
        (None, other) => {
            return Err(Error::Value(format!(
                "diagonal instances are sections, got {other:?}"
            )))
        }
    };
    let n = f.arity();
    let fits = match (law, inputs) {
        (Law::Additive(_), Inputs::Pair { x, x_prime }) => x.len() == n && x_prime.len() == n,
        (Law::MinCut(_) | Law::MaxCut(_) | Law::MedianCut, Inputs::Cut { x, .. }) => x.len() == n,
        (Law::Splitting | Law::OddPositive, Inputs::Point { x }) => x.len() == n,
        (Law::Homogeneity { .. }, Inputs::Scaled { x, .. }) => x.len() == n,
        (Law::SectionAdditive { .. } | Law::SectionOdd { .. }, _) => true,
        _ => false,
    };
    if !fits {
        return Err(Error::Dimension(format!(
            "inputs {inputs:?} do not fit axiom {axiom} for arity {n}"
        )));
    }
    if let Inputs::Cut { c, .. } = inputs {
        if law == Law::MedianCut && *c < 0.0 {
            return Err(Error::NegativeCut(*c));
        }
    }
    Ok(law.sides(f, inputs))
}

pub fn check_comonotonic_additivity<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::Comonotonic, cfg)
}

pub fn check_horizontal_min_additivity<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::HorizontalMin, cfg)
}

pub fn check_horizontal_max_additivity<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::HorizontalMax, cfg)
}

pub fn check_horizontal_median_additivity<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::HorizontalMedian, cfg)
}

pub fn check_positive_comonotonic<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::PositiveComonotonic, cfg)
}

pub fn check_negative_comonotonic<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::NegativeComonotonic, cfg)
}

pub fn check_positive_horizontal_min<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::PositiveHorizontalMin, cfg)
}

pub fn check_negative_horizontal_max<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::NegativeHorizontalMax, cfg)
}

pub fn check_splitting<F: Aggregator + ?Sized>(f: &F, cfg: &CheckConfig) -> Result<Verdict> {
    check(f, Axiom::Splitting, cfg)
}

pub fn check_diagonal_sections<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::Diagonal, cfg)
}

pub fn check_homogeneity<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
    positive_only: bool,
) -> Result<Verdict> {
    let axiom = if positive_only {
        Axiom::PositiveHomogeneity
    } else {
        Axiom::Homogeneity
    };
    check(f, axiom, cfg)
}

pub fn check_oddness_positive_orthant<F: Aggregator + ?Sized>(
    f: &F,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    check(f, Axiom::OddnessPositive, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregator::{Builtin, FnAggregator};
    use crate::lovasz::{LovaszExtension, MedianAdditiveExtension, SymmetricLovaszExtension};
    use crate::setfn::SetFunction;

    fn sf(v: &[f64]) -> SetFunction {
        SetFunction::new(v.len().trailing_zeros() as usize, v.to_vec()).unwrap()
    }

    fn cfg(trials: u64) -> CheckConfig {
        CheckConfig {
            trials,
            seed: 17,
            ..CheckConfig::default()
        }
    }

    const PHI_A: [f64; 4] = [0.0, 0.3, 0.6, 1.0];
    const PHI_B: [f64; 4] = [0.0, 0.5, 0.5, 1.0];

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn comonotonic_examples() {
        let f = LovaszExtension::new(sf(&PHI_A));
        assert!(check_comonotonic_additivity(&f, &cfg(2000)).unwrap().passed);
        let (l, r) = sides(
            &f,
            Axiom::Comonotonic,
            &Inputs::Pair {
                x: vec![-1.0, 2.0],
                x_prime: vec![1.0, 2.0],
            },
        )
        .unwrap();
        assert!(close(l, 2.4) && close(r, 2.4));

        let v = check_comonotonic_additivity(&Builtin::Product2, &cfg(100)).unwrap();
        assert!(!v.passed);
        let w = v.witness.unwrap();
        assert_eq!(
            w.inputs,
            Inputs::Pair {
                x: vec![1.0, 1.0],
                x_prime: vec![1.0, 1.0]
            }
        );
        assert_eq!((w.lhs, w.rhs, w.gap), (4.0, 2.0, 2.0));
        assert_eq!(w.source, WitnessSource::Lattice);

        let m = MedianAdditiveExtension::new(sf(&PHI_A), sf(&PHI_B)).unwrap();
        let (l, r) = sides(
            &m,
            Axiom::Comonotonic,
            &Inputs::Pair {
                x: vec![-1.0, 2.0],
                x_prime: vec![1.0, 2.0],
            },
        )
        .unwrap();
        assert!(close(l, 2.4) && close(r, 2.3));
        assert!(!check_comonotonic_additivity(&m, &cfg(1000)).unwrap().passed);
    }

    #[test]
    fn horizontal_examples() {
        let min = LovaszExtension::new(sf(&[0.0, 0.0, 0.0, 1.0]));
        let (l, r) = sides(
            &min,
            Axiom::HorizontalMin,
            &Inputs::Cut {
                x: vec![-3.0, 5.0],
                c: 2.0,
            },
        )
        .unwrap();
        assert_eq!((l, r), (-3.0, -3.0));
        assert!(
            check_horizontal_min_additivity(&min, &cfg(2000))
                .unwrap()
                .passed
        );
        assert!(
            check_horizontal_max_additivity(&min, &cfg(2000))
                .unwrap()
                .passed
        );

        // c below every component reduces to f(x) = f(c1) + f(x - c1)
        let f = LovaszExtension::new(sf(&PHI_A));
        let (l, r) = sides(
            &f,
            Axiom::HorizontalMin,
            &Inputs::Cut {
                x: vec![1.5, 4.0],
                c: -2.0,
            },
        )
        .unwrap();
        assert!((l - r).abs() < 1e-12);

        for axiom in [Axiom::HorizontalMin, Axiom::HorizontalMax] {
            let v = check(&Builtin::Product2, axiom, &cfg(100)).unwrap();
            assert!(!v.passed);
            assert!(matches!(v.witness.unwrap().inputs, Inputs::Cut { .. }));
        }
    }

    #[test]
    fn median_examples() {
        let c = cfg(2000);
        let s = SymmetricLovaszExtension::new(sf(&PHI_A));
        assert!(check_horizontal_median_additivity(&s, &c).unwrap().passed);
        let m = MedianAdditiveExtension::new(sf(&PHI_A), sf(&PHI_B)).unwrap();
        assert!(check_horizontal_median_additivity(&m, &c).unwrap().passed);
        let f = LovaszExtension::new(sf(&PHI_A));
        assert!(check_horizontal_median_additivity(&f, &c).unwrap().passed);
        for axiom in [
            Axiom::PositiveComonotonic,
            Axiom::NegativeComonotonic,
            Axiom::PositiveHorizontalMin,
            Axiom::NegativeHorizontalMax,
        ] {
            assert!(check(&m, axiom, &c).unwrap().passed, "{axiom}");
        }
        assert!(
            !check_positive_comonotonic(&Builtin::Product2, &c)
                .unwrap()
                .passed
        );
        let err = check_horizontal_median_additivity(
            &m,
            &CheckConfig {
                domain: DomainSpec::Nonneg,
                ..cfg(10)
            },
        );
        assert!(matches!(err, Err(Error::DomainKind { .. })));
    }

    #[test]
    fn splitting_examples() {
        let c = cfg(2000);
        assert!(
            check_splitting(&SymmetricLovaszExtension::new(sf(&PHI_A)), &c)
                .unwrap()
                .passed
        );
        let min = LovaszExtension::new(sf(&[0.0, 0.0, 0.0, 1.0]));
        let (l, r) = sides(
            &min,
            Axiom::Splitting,
            &Inputs::Point { x: vec![-3.0, 5.0] },
        )
        .unwrap();
        assert_eq!((l, r), (-3.0, -3.0));
        assert!(check_splitting(&min, &c).unwrap().passed);
        let (l, r) = sides(
            &Builtin::Product2,
            Axiom::Splitting,
            &Inputs::Point { x: vec![-1.0, 1.0] },
        )
        .unwrap();
        assert_eq!((l, r), (-1.0, 0.0));
        assert!(!check_splitting(&Builtin::Product2, &c).unwrap().passed);
    }

    #[test]
    fn diagonal_examples() {
        let v = check_diagonal_sections(&Builtin::Min2, &cfg(2000)).unwrap();
        assert!(v.passed);
        assert!(v.section(0b11, SectionScope::FullLine).unwrap().passed);
        assert!(v.section(0b11, SectionScope::Odd).unwrap().passed);
        let first = v.section(0b01, SectionScope::FullLine).unwrap();
        assert!(first.informational && !first.passed);
        let (l, r) = sides(
            &Builtin::Min2,
            Axiom::Diagonal,
            &Inputs::Section {
                subset: 0b01,
                t: 4.0,
                t_prime: -4.0,
            },
        )
        .unwrap();
        assert_eq!((l, r, (l - r).abs()), (0.0, -4.0, 4.0));

        let f = LovaszExtension::new(sf(&PHI_A));
        let v = check_diagonal_sections(&f, &cfg(2000)).unwrap();
        assert!(v.passed);
        for a in 0..4 {
            assert!(v.section(a, SectionScope::Positive).unwrap().passed);
        }
        let zero = FnAggregator::new(3, |_: &[f64]| 0.0);
        let v = check_diagonal_sections(&zero, &cfg(500)).unwrap();
        assert!(v.passed && v.sections.iter().all(|s| s.passed));
        assert!(
            !check_diagonal_sections(&Builtin::Product2, &cfg(500))
                .unwrap()
                .passed
        );
    }

    #[test]
    fn homogeneity_examples() {
        let c = cfg(2000);
        let f = LovaszExtension::new(sf(&PHI_A));
        assert!(check_homogeneity(&f, &c, true).unwrap().passed);
        let s = SymmetricLovaszExtension::new(sf(&PHI_A));
        assert!(check_homogeneity(&s, &c, false).unwrap().passed);
        assert!(!check_homogeneity(&f, &c, false).unwrap().passed);
        let (l, r) = sides(
            &f,
            Axiom::Homogeneity,
            &Inputs::Scaled {
                x: vec![3.0, 0.0],
                c: -1.0,
            },
        )
        .unwrap();
        assert!((l + 1.2).abs() < 1e-12 && (r + 0.9).abs() < 1e-12);
    }

    #[test]
    fn oddness_examples() {
        let c = cfg(2000);
        let f = LovaszExtension::new(sf(&PHI_A));
        let (l, r) = sides(
            &f,
            Axiom::OddnessPositive,
            &Inputs::Point { x: vec![3.0, 0.0] },
        )
        .unwrap();
        assert!((l + 1.2).abs() < 1e-12 && (r + 0.9).abs() < 1e-12);
        assert!(!check_oddness_positive_orthant(&f, &c).unwrap().passed);
        let g = LovaszExtension::new(sf(&PHI_B));
        assert!(check_oddness_positive_orthant(&g, &c).unwrap().passed);
        let min = LovaszExtension::new(sf(&[0.0, 0.0, 0.0, 1.0]));
        let (l, r) = sides(
            &min,
            Axiom::OddnessPositive,
            &Inputs::Point { x: vec![1.0, 2.0] },
        )
        .unwrap();
        assert_eq!((l, r), (-2.0, -1.0));
        assert!(!check_oddness_positive_orthant(&min, &c).unwrap().passed);
    }

    #[test]
    fn closure_is_respected_on_bounded_domains() {
        let f = LovaszExtension::new(sf(&PHI_A));
        for domain in [
            DomainSpec::Centered(1.0),
            DomainSpec::Box { lo: -0.5, hi: 2.0 },
            DomainSpec::Nonneg,
            DomainSpec::Nonpos,
        ] {
            let c = CheckConfig {
                domain,
                ..cfg(1000)
            };
            for axiom in [
                Axiom::Comonotonic,
                Axiom::HorizontalMin,
                Axiom::HorizontalMax,
                Axiom::Splitting,
                Axiom::PositiveHomogeneity,
                Axiom::Diagonal,
            ] {
                let v = check(&f, axiom, &c).unwrap();
                assert!(v.passed, "{axiom} on {domain}");
            }
        }
    }

    #[test]
    fn sampler_exhaustion() {
        // x ≥ 0 with -x inside [-1e-300, 10] forces x ≈ 0 in all six coordinates
        let phi = crate::setfn::random_set_function(6, 3, crate::setfn::SetFunctionKind::General)
            .unwrap();
        let f = LovaszExtension::new(phi);
        let c = CheckConfig {
            domain: DomainSpec::Box {
                lo: -1e-300,
                hi: 10.0,
            },
            ..cfg(10)
        };
        let r = run_random(&f, Law::OddPositive, &c, 0, 10);
        assert!(
            matches!(r, Err(Error::SamplerExhausted { accepted: 0, .. })),
            "{r:?}"
        );
    }

    #[test]
    fn parallel_runs_match_sequential() {
        let s = SymmetricLovaszExtension::new(sf(&PHI_A));
        let mut c = CheckConfig {
            lattice_max_arity: 0,
            ..cfg(5000)
        };
        let seq = check(&s, Axiom::Comonotonic, &c).unwrap();
        c.jobs = 4;
        let par = check(&s, Axiom::Comonotonic, &c).unwrap();
        assert_eq!(seq, par);
        assert!(!seq.passed);
        assert_eq!(seq.witness.as_ref().unwrap().source, WitnessSource::Random);
    }

    #[test]
    fn config_validation() {
        let f = Builtin::Min2;
        assert!(check(
            &f,
            Axiom::Comonotonic,
            &CheckConfig {
                trials: 0,
                ..cfg(1)
            }
        )
        .is_err());
        let neg = CheckConfig {
            tolerance: Tolerance {
                abs: -1.0,
                rel: 0.0,
            },
            ..cfg(1)
        };
        assert!(check(&f, Axiom::Comonotonic, &neg).is_err());
        assert_eq!("hmin".parse::<Axiom>().unwrap(), Axiom::HorizontalMin);
        assert!("hmode".parse::<Axiom>().is_err());
        for a in Axiom::ALL {
            assert_eq!(a.name().parse::<Axiom>().unwrap(), a);
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                format!("\"{}\"", a.name())
            );
        }
    }

    #[test]
    fn tolerance_semantics() {
        let t = Tolerance::default();
        assert!(!t.violated(1e12, 1e12 + 1.0));
        assert!(t.violated(1.0, 1.0 + 1e-6));
        assert!(t.violated(f64::NAN, 0.0));
    }
}
