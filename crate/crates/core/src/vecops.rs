//! Componentwise operators on real vectors, comonotonicity, sorting chains and
//! the interval domains the checkers sample from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setfn::Subset;

/// `x ∧ c`, componentwise.
pub fn meet_scalar(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|&v| v.min(c)).collect()
}

/// `x ∨ c`, componentwise.
pub fn join_scalar(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|&v| v.max(c)).collect()
}

/// The part of `x` above level `c`: `x - x ∧ c`. Nonnegative.
pub fn cut_above(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|&v| v - v.min(c)).collect()
}

/// The part of `x` below level `c`: `x - x ∨ c`. Nonpositive.
pub fn cut_below(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|&v| v - v.max(c)).collect()
}

/// `med(-c, x, c)`, componentwise clamp to `[-c, c]`.
pub fn med_clamp(x: &[f64], c: f64) -> Result<Vec<f64>> {
    if c < 0.0 || c.is_nan() {
        return Err(Error::NegativeCut(c));
    }
    Ok(x.iter().map(|&v| v.clamp(-c, c)).collect())
}

/// `x⁺ = x ∨ 0`.
pub fn pos_part(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// `x⁻ = (-x)⁺`.
pub fn neg_part(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| (-v).max(0.0)).collect()
}

/// `-x⁻`, i.e. `x ∧ 0`.
pub fn neg_side(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.min(0.0)).collect()
}

pub fn scale(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|&v| c * v).collect()
}

pub fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// True iff no pair of coordinates is ordered strictly oppositely in `x` and `y`.
///
/// This is the same as asking for one permutation that sorts both vectors
/// nondecreasingly: sort by `x` and break ties by `y`.
pub fn are_comonotonic(x: &[f64], y: &[f64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "comonotonicity needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(comonotonic_unchecked(x, y))
}

pub(crate) fn comonotonic_unchecked(x: &[f64], y: &[f64]) -> bool {
    let n = x.len();
    (0..n).all(|i| (i + 1..n).all(|j| (x[i] - x[j]) * (y[i] - y[j]) >= 0.0))
}

/// A nondecreasing ordering of a vector with its chains of upper and lower sets.
///
/// Indices are 0-based. With `sigma = [s0, s1, ..., s(n-1)]`:
/// `upper_sets[k] = {sk, ..., s(n-1)}` for `k = 0..=n` (so `upper_sets[n]` is
/// empty) and `lower_sets[k] = {s0, ..., s(k-1)}` (so `lower_sets[0]` is empty).
/// `split_p` counts the strictly negative components: the first `split_p`
/// entries of the ordering are `< 0`, the rest are `>= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortChain {
    pub sigma: Vec<usize>,
    pub upper_sets: Vec<Subset>,
    pub lower_sets: Vec<Subset>,
    pub split_p: usize,
}

impl SortChain {
    /// Stable sort: ties keep ascending original index.
    pub fn new(x: &[f64]) -> SortChain {
        let mut sigma: Vec<usize> = (0..x.len()).collect();
        sigma.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(std::cmp::Ordering::Equal));
        Self::build(x, sigma)
    }

    /// Uses a caller-chosen ordering; fails unless it sorts `x` nondecreasingly.
    pub fn from_permutation(x: &[f64], sigma: Vec<usize>) -> Result<SortChain> {
        let n = x.len();
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || std::mem::replace(&mut seen[s], true) {
                return Err(Error::Value(format!(
                    "{sigma:?} is not a permutation of 0..{n}"
                )));
            }
        }
        if sigma.len() != n {
            return Err(Error::Dimension(format!(
                "permutation has {} entries for a vector of length {n}",
                sigma.len()
            )));
        }
        if sigma.windows(2).any(|w| x[w[0]] > x[w[1]]) {
            return Err(Error::Value(format!("{sigma:?} does not sort {x:?}")));
        }
        Ok(Self::build(x, sigma))
    }

    fn build(x: &[f64], sigma: Vec<usize>) -> SortChain {
        let n = sigma.len();
        let mut upper_sets = vec![0; n + 1];
        for k in (0..n).rev() {
            upper_sets[k] = upper_sets[k + 1] | (1 << sigma[k]);
        }
        let mut lower_sets = vec![0; n + 1];
        for k in 1..=n {
            lower_sets[k] = lower_sets[k - 1] | (1 << sigma[k - 1]);
        }
        let split_p = sigma.iter().take_while(|&&i| x[i] < 0.0).count();
        SortChain {
            sigma,
            upper_sets,
            lower_sets,
            split_p,
        }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// `x` read along the ordering.
    pub fn sorted(&self, x: &[f64]) -> Vec<f64> {
        self.sigma.iter().map(|&i| x[i]).collect()
    }
}

/// Convenience wrapper for [`SortChain::new`].
pub fn sort_chain(x: &[f64]) -> SortChain {
    SortChain::new(x)
}

/// A real interval containing 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub enum DomainSpec {
    FullLine,
    Nonneg,
    Nonpos,
    /// `[-a, a]`, `a > 0`.
    Centered(f64),
    /// `[lo, hi]` with `lo <= 0 <= hi`, `lo < hi`.
    Box {
        lo: f64,
        hi: f64,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DomainRepr {
    Tagged(TaggedDomain),
    Bounds { lo: f64, hi: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TaggedDomain {
    FullLine,
    Nonneg,
    Nonpos,
    Centered { a: f64 },
    Box { lo: f64, hi: f64 },
}

impl TryFrom<DomainRepr> for DomainSpec {
    type Error = Error;

    fn try_from(repr: DomainRepr) -> Result<Self> {
        match repr {
            DomainRepr::Tagged(TaggedDomain::FullLine) => Ok(DomainSpec::FullLine),
            DomainRepr::Tagged(TaggedDomain::Nonneg) => Ok(DomainSpec::Nonneg),
            DomainRepr::Tagged(TaggedDomain::Nonpos) => Ok(DomainSpec::Nonpos),
            DomainRepr::Tagged(TaggedDomain::Centered { a }) => DomainSpec::centered(a),
            DomainRepr::Tagged(TaggedDomain::Box { lo, hi }) | DomainRepr::Bounds { lo, hi } => {
                DomainSpec::new_box(lo, hi)
            }
        }
    }
}

impl From<DomainSpec> for DomainRepr {
    fn from(d: DomainSpec) -> Self {
        DomainRepr::Tagged(match d {
            DomainSpec::FullLine => TaggedDomain::FullLine,
            DomainSpec::Nonneg => TaggedDomain::Nonneg,
            DomainSpec::Nonpos => TaggedDomain::Nonpos,
            DomainSpec::Centered(a) => TaggedDomain::Centered { a },
            DomainSpec::Box { lo, hi } => TaggedDomain::Box { lo, hi },
        })
    }
}

impl DomainSpec {
    pub fn centered(a: f64) -> Result<Self> {
        if a > 0.0 {
            Ok(DomainSpec::Centered(a))
        } else {
            Err(Error::Value(format!(
                "centered domain needs a > 0, got {a}"
            )))
        }
    }

    pub fn new_box(lo: f64, hi: f64) -> Result<Self> {
        if lo <= 0.0 && 0.0 <= hi && lo < hi {
            Ok(DomainSpec::Box { lo, hi })
        } else {
            Err(Error::Value(format!(
                "box domain needs lo <= 0 <= hi and lo < hi, got [{lo}, {hi}]"
            )))
        }
    }

    /// Closed bounds of the interval (infinite where unbounded).
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            DomainSpec::FullLine => (f64::NEG_INFINITY, f64::INFINITY),
            DomainSpec::Nonneg => (0.0, f64::INFINITY),
            DomainSpec::Nonpos => (f64::NEG_INFINITY, 0.0),
            DomainSpec::Centered(a) => (-a, a),
            DomainSpec::Box { lo, hi } => (lo, hi),
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let (lo, hi) = self.bounds();
        lo <= v && v <= hi
    }

    pub fn contains_all(&self, x: &[f64]) -> bool {
        x.iter().all(|&v| self.contains(v))
    }

    /// Centered at 0 in the sense the median-type axioms need.
    pub fn is_centered(&self) -> bool {
        matches!(self, DomainSpec::FullLine | DomainSpec::Centered(_))
            || matches!(*self, DomainSpec::Box { lo, hi } if lo == -hi)
    }

    /// `I₊ = I ∩ [0, ∞)`.
    pub fn positive_half(&self) -> (f64, f64) {
        let (_, hi) = self.bounds();
        (0.0, hi)
    }

    /// `I₋ = I ∩ (-∞, 0]`.
    pub fn negative_half(&self) -> (f64, f64) {
        let (lo, _) = self.bounds();
        (lo, 0.0)
    }
}

impl std::fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainSpec::FullLine => write!(f, "full_line"),
            DomainSpec::Nonneg => write!(f, "nonneg"),
            DomainSpec::Nonpos => write!(f, "nonpos"),
            DomainSpec::Centered(a) => write!(f, "centered:{a}"),
            DomainSpec::Box { lo, hi } => write!(f, "box:{lo},{hi}"),
        }
    }
}

impl std::str::FromStr for DomainSpec {
    type Err = Error;

    /// Accepts `full`, `full_line`, `nonneg`, `nonpos`, `centered:A`,
    /// `box:LO,HI`, or the JSON object form.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |what: &str| Error::Value(format!("cannot parse domain `{s}`: {what}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
        match s {
            "full" | "full_line" | "full-line" | "real" => return Ok(DomainSpec::FullLine),
            "nonneg" => return Ok(DomainSpec::Nonneg),
            "nonpos" => return Ok(DomainSpec::Nonpos),
            _ => {}
        }
        if let Some(a) = s.strip_prefix("centered:") {
            return DomainSpec::centered(num(a)?);
        }
        if let Some(rest) = s.strip_prefix("box:") {
            let (lo, hi) = rest
                .split_once(',')
                .ok_or_else(|| bad("expected box:LO,HI"))?;
            return DomainSpec::new_box(num(lo)?, num(hi)?);
        }
        Err(bad("unknown kind"))
    }
}

/// Membership of every component of `x` in `d`.
pub fn in_domain(x: &[f64], d: &DomainSpec) -> bool {
    d.contains_all(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_comonotonic(x: &[f64], y: &[f64]) -> bool {
        fn permutations(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in permutations(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let sorted = |v: &[f64], s: &[usize]| s.windows(2).all(|w| v[w[0]] <= v[w[1]]);
        permutations(x.len())
            .iter()
            .any(|s| sorted(x, s) && sorted(y, s))
    }

    #[test]
    fn scalar_operators() {
        let x = [-3.0, 5.0];
        assert_eq!(meet_scalar(&x, 2.0), vec![-3.0, 2.0]);
        assert_eq!(join_scalar(&x, -2.0), vec![-2.0, 5.0]);
        assert_eq!(meet_scalar(&x, 10.0), x.to_vec());
        assert_eq!(cut_above(&x, 2.0), vec![0.0, 3.0]);
        assert_eq!(cut_below(&x, -2.0), vec![-1.0, 0.0]);
        assert_eq!(med_clamp(&x, 2.0).unwrap(), vec![-2.0, 2.0]);
        assert_eq!(med_clamp(&x, 0.0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(med_clamp(&x, -1.0), Err(Error::NegativeCut(-1.0)));
        assert_eq!(pos_part(&x), vec![0.0, 5.0]);
        assert_eq!(neg_part(&x), vec![3.0, 0.0]);
        let recomposed = add(
            &add(&med_clamp(&x, 2.0).unwrap(), &cut_above(&x, 2.0)),
            &cut_below(&x, -2.0),
        );
        assert_eq!(recomposed, x.to_vec());
    }

    #[test]
    fn comonotonic_examples() {
        assert!(are_comonotonic(&[1.0, 2.0], &[3.0, 7.0]).unwrap());
        assert!(!are_comonotonic(&[1.0, 2.0], &[3.0, 1.0]).unwrap());
        assert!(are_comonotonic(&[4.0, 4.0, 4.0], &[3.0, -1.0, 9.0]).unwrap());
        assert!(matches!(
            are_comonotonic(&[1.0], &[1.0, 2.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn comonotonic_lattice_agrees_with_permutation_search() {
        for n in 1..=3usize {
            let total = 3usize.pow(n as u32);
            let point = |mut k: usize| -> Vec<f64> {
                (0..n)
                    .map(|_| {
                        let v = (k % 3) as f64 - 1.0;
                        k /= 3;
                        v
                    })
                    .collect()
            };
            for a in 0..total {
                for b in 0..total {
                    let (x, y) = (point(a), point(b));
                    assert_eq!(
                        are_comonotonic(&x, &y).unwrap(),
                        brute_force_comonotonic(&x, &y),
                        "{x:?} {y:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn sort_chain_examples() {
        let c = sort_chain(&[5.0, 3.0]);
        assert_eq!(c.sigma, vec![1, 0]);
        assert_eq!(c.upper_sets, vec![0b11, 0b01, 0]);
        assert_eq!(c.lower_sets, vec![0, 0b10, 0b11]);
        assert_eq!(c.split_p, 0);
        let c = sort_chain(&[-3.0, 5.0]);
        assert_eq!(c.sigma, vec![0, 1]);
        assert_eq!(c.split_p, 1);
        assert_eq!(sort_chain(&[2.0, 2.0, 1.0]).sigma, vec![2, 0, 1]);
        assert_eq!(sort_chain(&[-1.0, -2.0]).split_p, 2);
        assert_eq!(sort_chain(&[0.0, -0.5]).split_p, 1);
    }

    #[test]
    fn forced_permutations() {
        let x = [2.0, 2.0, 1.0];
        assert!(SortChain::from_permutation(&x, vec![2, 1, 0]).is_ok());
        assert!(SortChain::from_permutation(&x, vec![0, 1, 2]).is_err());
        assert!(SortChain::from_permutation(&x, vec![2, 2, 0]).is_err());
        assert!(SortChain::from_permutation(&x, vec![2, 1]).is_err());
    }

    #[test]
    fn domains() {
        assert!(in_domain(&[-1.0, 2.0], &DomainSpec::centered(3.0).unwrap()));
        assert!(!in_domain(&[-1.0, 2.0], &DomainSpec::Nonneg));
        for d in [
            DomainSpec::FullLine,
            DomainSpec::Nonneg,
            DomainSpec::Nonpos,
            DomainSpec::Centered(0.5),
            DomainSpec::Box { lo: 0.0, hi: 1.0 },
        ] {
            assert!(d.contains(0.0));
            let s = d.to_string();
            assert_eq!(s.parse::<DomainSpec>().unwrap(), d);
        }
        assert!(DomainSpec::centered(0.0).is_err());
        assert!(DomainSpec::new_box(1.0, 2.0).is_err());
        let d: DomainSpec = serde_json::from_str(r#"{"kind":"centered","a":3}"#).unwrap();
        assert_eq!(d, DomainSpec::Centered(3.0));
        let d: DomainSpec = serde_json::from_str(r#"{"lo":-1,"hi":2}"#).unwrap();
        assert_eq!(d, DomainSpec::Box { lo: -1.0, hi: 2.0 });
        assert!(serde_json::from_str::<DomainSpec>(r#"{"lo":1,"hi":2}"#).is_err());
    }

    fn vec_strategy() -> impl Strategy<Value = (Vec<f64>, f64)> {
        (1usize..=6).prop_flat_map(|n| {
            (
                proptest::collection::vec(-100.0f64..100.0, n),
                -100.0f64..100.0,
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn decompositions_are_exact_on_dyadics(
            x in proptest::collection::vec(-800i32..=800, 1..=6),
            c in -800i32..=800,
        ) {
            // multiples of 1/8 keep every sum and difference exact
            let x: Vec<f64> = x.into_iter().map(|v| f64::from(v) / 8.0).collect();
            let c = f64::from(c) / 8.0;
            prop_assert_eq!(add(&meet_scalar(&x, c), &cut_above(&x, c)), x.clone());
            prop_assert_eq!(add(&join_scalar(&x, c), &cut_below(&x, c)), x.clone());
            let back: Vec<f64> = pos_part(&x).iter().zip(&neg_part(&x)).map(|(p, m)| p - m).collect();
            prop_assert_eq!(back, x.clone());
            let c = c.abs();
            let parts = add(&add(&med_clamp(&x, c).unwrap(), &cut_above(&x, c)), &cut_below(&x, -c));
            prop_assert_eq!(parts, x.clone());
        }

        #[test]
        fn decompositions_hold_to_rounding((x, c) in vec_strategy()) {
            let ulp = |v: f64| 2.0 * f64::EPSILON * v.abs().max(c.abs());
            let c2 = c.abs();
            let sums = [
                add(&meet_scalar(&x, c), &cut_above(&x, c)),
                add(&join_scalar(&x, c), &cut_below(&x, c)),
                add(&add(&med_clamp(&x, c2).unwrap(), &cut_above(&x, c2)), &cut_below(&x, -c2)),
            ];
            for sum in sums {
                for (s, v) in sum.iter().zip(&x) {
                    prop_assert!((s - v).abs() <= ulp(*v), "{} vs {}", s, v);
                }
            }
            let back: Vec<f64> = pos_part(&x).iter().zip(&neg_part(&x)).map(|(p, m)| p - m).collect();
            prop_assert_eq!(back, x.clone());
        }

        #[test]
        fn cut_parts_are_comonotonic((x, c) in vec_strategy()) {
            prop_assert!(are_comonotonic(&meet_scalar(&x, c), &cut_above(&x, c)).unwrap());
            prop_assert!(are_comonotonic(&join_scalar(&x, c), &cut_below(&x, c)).unwrap());
            prop_assert!(cut_above(&x, c).iter().all(|&v| v >= 0.0));
            prop_assert!(cut_below(&x, c).iter().all(|&v| v <= 0.0));
        }

        #[test]
        fn pairwise_criterion_matches_search(
            pair in (1usize..=6).prop_flat_map(|n| (
                proptest::collection::vec(-3i32..=3, n),
                proptest::collection::vec(-3i32..=3, n),
            ))
        ) {
            let x: Vec<f64> = pair.0.iter().map(|&v| v as f64).collect();
            let y: Vec<f64> = pair.1.iter().map(|&v| v as f64).collect();
            prop_assert_eq!(are_comonotonic(&x, &y).unwrap(), brute_force_comonotonic(&x, &y));
        }

        #[test]
        fn chain_invariants((x, _c) in vec_strategy()) {
            let ch = sort_chain(&x);
            let n = x.len();
            prop_assert!(ch.sigma.windows(2).all(|w| x[w[0]] <= x[w[1]]));
            for k in 0..n {
                prop_assert_eq!(ch.upper_sets[k], ch.upper_sets[k + 1] | (1 << ch.sigma[k]));
                prop_assert_eq!(ch.lower_sets[k + 1], ch.lower_sets[k] | (1 << ch.sigma[k]));
            }
            let p = ch.split_p;
            prop_assert!(p == 0 || x[ch.sigma[p - 1]] < 0.0);
            prop_assert!(p == n || x[ch.sigma[p]] >= 0.0);
        }
    }
}
