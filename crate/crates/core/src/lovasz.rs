//! Evaluators for Lovász extensions, symmetric Lovász extensions and the
//! two-sided (horizontally median-additive) class, plus diagonal sections and
//! the representation built from arbitrary one-place sections.
//!
//! All evaluators walk a [`SortChain`] of the input. Tied components add zero
//! increments, so the value does not depend on how ties are broken.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::aggregator::Aggregator;
use crate::error::{Error, Result};
use crate::setfn::{full_set, indicator, is_capacity, SetFunction, Subset};
use crate::vecops::{neg_part, pos_part, DomainSpec, SortChain};

fn check_dim(n: usize, x: &[f64]) -> Result<()> {
    if x.len() != n {
        return Err(Error::Dimension(format!(
            "expected a vector of length {n}, got {}",
            x.len()
        )));
    }
    Ok(())
}

fn check_chain(n: usize, chain: &SortChain) -> Result<()> {
    if chain.len() != n {
        return Err(Error::Dimension(format!(
            "sort chain has length {}, expected {n}",
            chain.len()
        )));
    }
    Ok(())
}

/// Telescoping sum over the upper chain, starting from 0.
///
/// `sum_k (x_{σ(k)} - x_{σ(k-1)}) * slope(upper_sets[k])` with `x_{σ(-1)} = 0`.
fn upper_chain_sum(x: &[f64], chain: &SortChain, slope: impl Fn(Subset) -> f64) -> f64 {
    let mut prev = 0.0;
    let mut acc = 0.0;
    for (k, &i) in chain.sigma.iter().enumerate() {
        acc += (x[i] - prev) * slope(chain.upper_sets[k]);
        prev = x[i];
    }
    acc
}

/// Positive-side terms of the split representation: the part of the chain
/// from the first nonnegative component upward.
fn positive_side(x: &[f64], chain: &SortChain, slope: impl Fn(Subset) -> f64) -> f64 {
    let n = chain.len();
    let p = chain.split_p;
    if p == n {
        return 0.0;
    }
    let mut acc = x[chain.sigma[p]] * slope(chain.upper_sets[p]);
    for k in p + 1..n {
        acc += (x[chain.sigma[k]] - x[chain.sigma[k - 1]]) * slope(chain.upper_sets[k]);
    }
    acc
}

/// Negative-side terms: from the last strictly negative component downward,
/// with coefficients on the lower chain.
fn negative_side(x: &[f64], chain: &SortChain, slope: impl Fn(Subset) -> f64) -> f64 {
    let p = chain.split_p;
    if p == 0 {
        return 0.0;
    }
    let mut acc = x[chain.sigma[p - 1]] * slope(chain.lower_sets[p]);
    for k in 0..p - 1 {
        acc += (x[chain.sigma[k]] - x[chain.sigma[k + 1]]) * slope(chain.lower_sets[k + 1]);
    }
    acc
}

/// The Lovász extension `f_φ` of a pseudo-Boolean function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LovaszExtension {
    phi: SetFunction,
}

impl LovaszExtension {
    pub fn new(phi: SetFunction) -> Self {
        Self { phi }
    }

    pub fn phi(&self) -> &SetFunction {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    /// `f(0) + x_{σ(1)} φ₀([n]) + Σ_{i≥2} (x_{σ(i)} - x_{σ(i-1)}) φ₀(A↑σ(i))`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n(), x)?;
        Ok(self.eval_with_chain(x, &SortChain::new(x)))
    }

    /// Same as [`eval`](Self::eval) with a caller-supplied ordering of `x`.
    pub fn eval_chain(&self, x: &[f64], chain: &SortChain) -> Result<f64> {
        check_dim(self.n(), x)?;
        check_chain(self.n(), chain)?;
        Ok(self.eval_with_chain(x, chain))
    }

    fn eval_with_chain(&self, x: &[f64], chain: &SortChain) -> f64 {
        let base = self.phi.empty_value();
        base + upper_chain_sum(x, chain, |a| self.phi.value(a) - base)
    }

    /// Evaluates through the lower chain:
    /// `f(0) + x_{σ(n)} δ(1) + Σ_{i<n} (x_{σ(i+1)} - x_{σ(i)}) δ^{A↓σ(i)}(-1)`.
    ///
    /// The negative-unit sections are not stored; they come from
    /// `δ^{A↓σ(i)}(-1) = δ^{A↑σ(i+1)}(1) - δ(1)`.
    pub fn eval_dual(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n(), x)?;
        Ok(self.eval_dual_with_chain(x, &SortChain::new(x)))
    }

    pub fn eval_dual_chain(&self, x: &[f64], chain: &SortChain) -> Result<f64> {
        check_dim(self.n(), x)?;
        check_chain(self.n(), chain)?;
        Ok(self.eval_dual_with_chain(x, chain))
    }

    fn eval_dual_with_chain(&self, x: &[f64], chain: &SortChain) -> f64 {
        let n = self.n();
        let base = self.phi.empty_value();
        let top = self.phi.full_value() - base;
        let neg_unit = |k: usize| (self.phi.value(chain.upper_sets[k + 1]) - base) - top;
        let mut acc = x[chain.sigma[n - 1]] * top;
        for k in 0..n - 1 {
            acc += (x[chain.sigma[k + 1]] - x[chain.sigma[k]]) * neg_unit(k);
        }
        base + acc
    }

    /// Choquet integral test: `φ` is a capacity.
    pub fn is_choquet(&self) -> bool {
        is_capacity(&self.phi)
    }
}

impl Aggregator for LovaszExtension {
    fn arity(&self) -> usize {
        self.n()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval_with_chain(x, &SortChain::new(x))
    }
}

/// The symmetric Lovász extension `f̌_φ(x) = f(0) + f(x⁺) - f(x⁻)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricLovaszExtension {
    phi: SetFunction,
}

impl SymmetricLovaszExtension {
    pub fn new(phi: SetFunction) -> Self {
        Self { phi }
    }

    pub fn phi(&self) -> &SetFunction {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    /// The plain Lovász extension of the same `φ`.
    pub fn lovasz(&self) -> LovaszExtension {
        LovaszExtension::new(self.phi.clone())
    }

    /// Evaluates through the plain extension at `x⁺` and `x⁻`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n(), x)?;
        let f = self.lovasz();
        Ok(self.phi.empty_value() + f.value(&pos_part(x)) - f.value(&neg_part(x)))
    }

    /// Evaluates the split-index telescoping form directly on `x`: upper-chain
    /// terms for the nonnegative components, lower-chain terms for the
    /// negative ones.
    pub fn eval_telescoping(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n(), x)?;
        Ok(self.telescoping_with_chain(x, &SortChain::new(x)))
    }

    pub fn eval_telescoping_chain(&self, x: &[f64], chain: &SortChain) -> Result<f64> {
        check_dim(self.n(), x)?;
        check_chain(self.n(), chain)?;
        Ok(self.telescoping_with_chain(x, chain))
    }

    fn telescoping_with_chain(&self, x: &[f64], chain: &SortChain) -> f64 {
        let base = self.phi.empty_value();
        let slope = |a: Subset| self.phi.value(a) - base;
        base + positive_side(x, chain, slope) + negative_side(x, chain, slope)
    }

    /// Symmetric Choquet integral test: `φ` is a capacity.
    pub fn is_symmetric_choquet(&self) -> bool {
        is_capacity(&self.phi)
    }
}

impl Aggregator for SymmetricLovaszExtension {
    fn arity(&self) -> usize {
        self.n()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.telescoping_with_chain(x, &SortChain::new(x))
    }
}

/// Two-sided extension: slopes `phi_pos` on the nonnegative side of the chain,
/// `phi_neg` on the negative side. Both vanish at the empty set.
///
/// With `phi_pos == phi_neg` this is the symmetric Lovász extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MedianRepr", into = "MedianRepr")]
pub struct MedianAdditiveExtension {
    phi_pos: SetFunction,
    phi_neg: SetFunction,
}

#[derive(Serialize, Deserialize)]
struct MedianRepr {
    phi: SetFunction,
    phi_neg: SetFunction,
}

impl TryFrom<MedianRepr> for MedianAdditiveExtension {
    type Error = Error;

    fn try_from(r: MedianRepr) -> Result<Self> {
        MedianAdditiveExtension::new(r.phi, r.phi_neg)
    }
}

impl From<MedianAdditiveExtension> for MedianRepr {
    fn from(m: MedianAdditiveExtension) -> Self {
        MedianRepr {
            phi: m.phi_pos,
            phi_neg: m.phi_neg,
        }
    }
}

impl MedianAdditiveExtension {
    pub fn new(phi_pos: SetFunction, phi_neg: SetFunction) -> Result<Self> {
        if phi_pos.n() != phi_neg.n() {
            return Err(Error::Dimension(format!(
                "phi_pos has n = {}, phi_neg has n = {}",
                phi_pos.n(),
                phi_neg.n()
            )));
        }
        if phi_pos.empty_value() != 0.0 || phi_neg.empty_value() != 0.0 {
            return Err(Error::Value(
                "phi_pos and phi_neg must vanish at the empty set".into(),
            ));
        }
        Ok(Self { phi_pos, phi_neg })
    }

    pub fn phi_pos(&self) -> &SetFunction {
        &self.phi_pos
    }

    pub fn phi_neg(&self) -> &SetFunction {
        &self.phi_neg
    }

    pub fn n(&self) -> usize {
        self.phi_pos.n()
    }

    /// Split-index form with linear sections `t φ_pos(A)` (t ≥ 0) and
    /// `t φ_neg(A)` (t ≤ 0).
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n(), x)?;
        Ok(self.eval_with_chain(x, &SortChain::new(x)))
    }

    pub fn eval_chain(&self, x: &[f64], chain: &SortChain) -> Result<f64> {
        check_dim(self.n(), x)?;
        check_chain(self.n(), chain)?;
        Ok(self.eval_with_chain(x, chain))
    }

    fn eval_with_chain(&self, x: &[f64], chain: &SortChain) -> f64 {
        positive_side(x, chain, |a| self.phi_pos.value(a))
            + negative_side(x, chain, |a| self.phi_neg.value(a))
    }

    /// `f_{φ_pos}(x⁺) - f_{φ_neg}(x⁻)`.
    pub fn eval_split(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n(), x)?;
        let pos = LovaszExtension::new(self.phi_pos.clone());
        let neg = LovaszExtension::new(self.phi_neg.clone());
        Ok(pos.value(&pos_part(x)) - neg.value(&neg_part(x)))
    }
}

impl Aggregator for MedianAdditiveExtension {
    fn arity(&self) -> usize {
        self.n()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval_with_chain(x, &SortChain::new(x))
    }
}

/// Any of the three extension kinds, in their JSON form
/// `{"type": "lovasz"|"symmetric"|"median", "phi": ..., "phi_neg": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Extension {
    Lovasz(LovaszExtension),
    Symmetric(SymmetricLovaszExtension),
    Median(MedianAdditiveExtension),
}

impl Extension {
    pub fn n(&self) -> usize {
        match self {
            Extension::Lovasz(e) => e.n(),
            Extension::Symmetric(e) => e.n(),
            Extension::Median(e) => e.n(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Extension::Lovasz(_) => "lovasz",
            Extension::Symmetric(_) => "symmetric",
            Extension::Median(_) => "median",
        }
    }

    /// The primary evaluator of the kind.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Extension::Lovasz(e) => e.eval(x),
            Extension::Symmetric(e) => e.eval(x),
            Extension::Median(e) => e.eval(x),
        }
    }

    /// The underlying pseudo-Boolean function (`phi_pos` for the median kind).
    pub fn phi(&self) -> &SetFunction {
        match self {
            Extension::Lovasz(e) => e.phi(),
            Extension::Symmetric(e) => e.phi(),
            Extension::Median(e) => e.phi_pos(),
        }
    }
}

impl Aggregator for Extension {
    fn arity(&self) -> usize {
        self.n()
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Extension::Lovasz(e) => e.value(x),
            Extension::Symmetric(e) => e.value(x),
            Extension::Median(e) => e.value(x),
        }
    }
}

/// `δ_f^A(t) = f(t · 1_A)`.
pub fn diagonal_section<F: Aggregator + ?Sized>(f: &F, set: Subset, t: f64) -> Result<f64> {
    let n = f.arity();
    if n < Subset::BITS as usize && set > full_set(n) {
        return Err(Error::Dimension(format!(
            "subset {set:#b} is not contained in [{n}]"
        )));
    }
    let point: Vec<f64> = indicator(n, set).into_iter().map(|v| v * t).collect();
    Ok(f.value(&point))
}

/// A one-place section; must map 0 to 0 and be free of side effects.
pub type Section = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One section on `I₊` and one on `I₋` per subset of `[n]`.
///
/// The full diagonal is read from the sections of `[n]`: the positive one for
/// `t ≥ 0`, the negative one for `t < 0`.
#[derive(Clone)]
pub struct SectionFamily {
    n: usize,
    domain: DomainSpec,
    positive: Vec<Section>,
    negative: Vec<Section>,
}

impl std::fmt::Debug for SectionFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SectionFamily")
            .field("n", &self.n)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Which chain representation [`reconstruct_from_sections`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionForm {
    /// `δ(x_{σ(1)}) + Σ_{i≥2} δ^{A↑σ(i)}(x_{σ(i)} - x_{σ(i-1)})`.
    UpperChain,
    /// `δ(x_{σ(n)}) + Σ_{i<n} δ^{A↓σ(i)}(x_{σ(i)} - x_{σ(i+1)})`.
    LowerChain,
    /// Positive sections on the upper chain above the sign split, negative
    /// sections on the lower chain below it.
    Split,
}

impl SectionFamily {
    /// Checks sizes and that every section vanishes at 0.
    pub fn new(
        n: usize,
        domain: DomainSpec,
        positive: Vec<Section>,
        negative: Vec<Section>,
    ) -> Result<Self> {
        let size = 1usize << n;
        if n == 0 || positive.len() != size || negative.len() != size {
            return Err(Error::Dimension(format!(
                "a section family on [{n}] needs {size} positive and {size} negative sections"
            )));
        }
        for (k, s) in positive.iter().chain(&negative).enumerate() {
            let at_zero = s(0.0);
            if at_zero != 0.0 {
                return Err(Error::Value(format!(
                    "section #{k} maps 0 to {at_zero}, expected 0"
                )));
            }
        }
        Ok(Self {
            n,
            domain,
            positive,
            negative,
        })
    }

    /// The sections `t ↦ f(t 1_A) - f(0)` of a black-box function.
    pub fn of_function(f: Arc<dyn Aggregator>, domain: DomainSpec) -> Result<Self> {
        let n = f.arity();
        let base = f.value(&vec![0.0; n]);
        let make = |set: Subset| -> Section {
            let f = Arc::clone(&f);
            Arc::new(move |t: f64| {
                let point: Vec<f64> = indicator(n, set).into_iter().map(|v| v * t).collect();
                f.value(&point) - base
            })
        };
        let all: Vec<Section> = (0..1u32 << n).map(make).collect();
        Self::new(n, domain, all.clone(), all)
    }

    /// Linear sections `t φ_pos(A)` on `I₊` and `t φ_neg(A)` on `I₋`.
    pub fn linear(phi_pos: &SetFunction, phi_neg: &SetFunction) -> Result<Self> {
        if phi_pos.n() != phi_neg.n() {
            return Err(Error::Dimension("phi_pos and phi_neg differ in n".into()));
        }
        let slopes = |sf: &SetFunction| -> Vec<Section> {
            let base = sf.empty_value();
            sf.values()
                .iter()
                .map(|&v| {
                    let slope = v - base;
                    Arc::new(move |t: f64| t * slope) as Section
                })
                .collect()
        };
        Self::new(
            phi_pos.n(),
            DomainSpec::FullLine,
            slopes(phi_pos),
            slopes(phi_neg),
        )
    }

    /// Sections of the Lovász extension of `φ` (shifted to vanish at 0):
    /// `t φ₀(A)` for `t ≥ 0` and `t (φ₀([n]) - φ₀(Aᶜ))` for `t ≤ 0`.
    pub fn lovasz(phi: &SetFunction) -> Result<Self> {
        let n = phi.n();
        let full = full_set(n);
        let base = phi.empty_value();
        let top = phi.full_value() - base;
        let positive = (0..=full)
            .map(|a| {
                let slope = phi.value(a) - base;
                Arc::new(move |t: f64| t * slope) as Section
            })
            .collect();
        let negative = (0..=full)
            .map(|a| {
                let slope = top - (phi.value(full & !a) - base);
                Arc::new(move |t: f64| t * slope) as Section
            })
            .collect();
        Self::new(n, DomainSpec::FullLine, positive, negative)
    }

    /// All sections identically zero.
    pub fn zero(n: usize) -> Result<Self> {
        let zero: Section = Arc::new(|_| 0.0);
        let all = vec![zero; 1 << n];
        Self::new(n, DomainSpec::FullLine, all.clone(), all)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    /// `δ^A(t)` for `t ∈ I₊`.
    pub fn positive(&self, set: Subset, t: f64) -> Result<f64> {
        if t < 0.0 || !self.domain.contains(t) {
            return Err(Error::Domain(format!(
                "positive section of {set:#b} queried at {t}, outside I₊ of {}",
                self.domain
            )));
        }
        Ok((self.positive[set as usize])(t))
    }

    /// `δ^A(t)` for `t ∈ I₋`.
    pub fn negative(&self, set: Subset, t: f64) -> Result<f64> {
        if t > 0.0 || !self.domain.contains(t) {
            return Err(Error::Domain(format!(
                "negative section of {set:#b} queried at {t}, outside I₋ of {}",
                self.domain
            )));
        }
        Ok((self.negative[set as usize])(t))
    }

    /// The full diagonal `δ(t)`.
    pub fn diagonal(&self, t: f64) -> Result<f64> {
        let full = full_set(self.n);
        if t >= 0.0 {
            self.positive(full, t)
        } else {
            self.negative(full, t)
        }
    }
}

/// Evaluates a chain representation from user-supplied sections.
///
/// No additivity is assumed: this is the right-hand side of the
/// representation theorems, to be compared against the function the sections
/// came from.
pub fn reconstruct_from_sections(
    family: &SectionFamily,
    x: &[f64],
    form: SectionForm,
) -> Result<f64> {
    let n = family.n();
    check_dim(n, x)?;
    let chain = SortChain::new(x);
    let s = &chain.sigma;
    match form {
        SectionForm::UpperChain => {
            let mut acc = family.diagonal(x[s[0]])?;
            for k in 1..n {
                acc += family.positive(chain.upper_sets[k], x[s[k]] - x[s[k - 1]])?;
            }
            Ok(acc)
        }
        SectionForm::LowerChain => {
            let mut acc = family.diagonal(x[s[n - 1]])?;
            for k in 0..n - 1 {
                acc += family.negative(chain.lower_sets[k + 1], x[s[k]] - x[s[k + 1]])?;
            }
            Ok(acc)
        }
        SectionForm::Split => {
            let p = chain.split_p;
            let mut acc = 0.0;
            if p < n {
                acc += family.positive(chain.upper_sets[p], x[s[p]])?;
                for k in p + 1..n {
                    acc += family.positive(chain.upper_sets[k], x[s[k]] - x[s[k - 1]])?;
                }
            }
            if p > 0 {
                acc += family.negative(chain.lower_sets[p], x[s[p - 1]])?;
                for k in 0..p - 1 {
                    acc += family.negative(chain.lower_sets[k + 1], x[s[k]] - x[s[k + 1]])?;
                }
            }
            Ok(acc)
        }
    }
}
