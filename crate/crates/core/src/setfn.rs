//! Pseudo-Boolean set functions on the subsets of `[n]`.
//!
//! Subsets are bitmasks: element `i` (1-based) is bit `i - 1`, so the value of
//! `A` lives at index `sum_{i in A} 2^(i-1)`. Index 0 is the empty set.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of criteria a [`SetFunction`] may have.
pub const MAX_ARITY: usize = 16;

/// Bitmask of a subset of `[n]`.
pub type Subset = u32;

/// Bitmask of the full set `[n]`.
pub fn full_set(n: usize) -> Subset {
    debug_assert!(n <= 31);
    ((1u64 << n) - 1) as Subset
}

/// Iterates over the members of `set` as 0-based indices, ascending.
pub fn members(set: Subset) -> impl Iterator<Item = usize> {
    (0..Subset::BITS as usize).filter(move |i| set & (1 << i) != 0)
}

/// The indicator vector `1_A` of length `n`.
pub fn indicator(n: usize, set: Subset) -> Vec<f64> {
    (0..n)
        .map(|i| if set & (1 << i) != 0 { 1.0 } else { 0.0 })
        .collect()
}

fn check_arity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ARITY {
        return Err(Error::Dimension(format!(
            "n must be in 1..={MAX_ARITY}, got {n}"
        )));
    }
    Ok(())
}

/// Values of `phi: 2^[n] -> R`, dense and bitmask-indexed.
///
/// `phi(empty)` is stored as given; nothing forces it to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetFunctionRepr", into = "SetFunctionRepr")]
pub struct SetFunction {
    n: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SetFunctionRepr {
    Object { n: usize, values: Vec<f64> },
    Bare(Vec<f64>),
}

impl TryFrom<SetFunctionRepr> for SetFunction {
    type Error = Error;

    fn try_from(repr: SetFunctionRepr) -> Result<Self> {
        match repr {
            SetFunctionRepr::Object { n, values } => SetFunction::new(n, values),
            SetFunctionRepr::Bare(values) => {
                let len = values.len();
                if !len.is_power_of_two() || len < 2 {
                    return Err(Error::Dimension(format!(
                        "bare value array must have length 2^n with n >= 1, got {len}"
                    )));
                }
                SetFunction::new(len.trailing_zeros() as usize, values)
            }
        }
    }
}

impl From<SetFunction> for SetFunctionRepr {
    fn from(sf: SetFunction) -> Self {
        SetFunctionRepr::Object {
            n: sf.n,
            values: sf.values,
        }
    }
}

impl SetFunction {
    /// Builds a set function from its `2^n` values in bitmask order.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_arity(n)?;
        if values.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "expected {} values for n = {n}, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Value(format!(
                "value at index {k} is not finite ({})",
                values[k]
            )));
        }
        Ok(Self { n, values })
    }

    /// Builds a set function by evaluating `f` on every subset.
    pub fn from_fn(n: usize, f: impl Fn(Subset) -> f64) -> Result<Self> {
        check_arity(n)?;
        Self::new(n, (0..1u32 << n).map(f).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, set: Subset) -> f64 {
        self.values[set as usize]
    }

    pub fn empty_value(&self) -> f64 {
        self.values[0]
    }

    pub fn full_value(&self) -> f64 {
        self.values[full_set(self.n) as usize]
    }

    /// The dual `phi*(A) = phi([n]) - phi(A^c) + phi(empty)`.
    ///
    /// For `phi(empty) = 0` this is the usual conjugate capacity; the Lovász
    /// extension of the dual is `x -> -f(-x)` up to the constant `2 phi(empty)`.
    pub fn dual(&self) -> SetFunction {
        let full = full_set(self.n);
        let top = self.full_value();
        let bottom = self.empty_value();
        let values = (0..=full)
            .map(|a| top - self.value(full & !a) + bottom)
            .collect();
        SetFunction { n: self.n, values }
    }

    /// True when `phi(A) = phi*(A)` for every `A` within `tol`.
    pub fn is_self_dual(&self, tol: f64) -> bool {
        self.dual()
            .values
            .iter()
            .zip(&self.values)
            .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// True iff `phi(empty) = 0` and `phi` is nondecreasing under inclusion.
///
/// Only covering pairs `A ⊂ A ∪ {i}` are compared; transitivity covers the rest.
pub fn is_capacity(sf: &SetFunction) -> bool {
    if sf.empty_value() != 0.0 {
        return false;
    }
    let full = full_set(sf.n);
    (0..=full).all(|a| members(full & !a).all(|i| sf.value(a) <= sf.value(a | (1 << i))))
}

/// Möbius coefficients `m` of a set function: `phi(B) = sum_{A ⊆ B} m(A)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobiusRepresentation {
    n: usize,
    coefficients: Vec<f64>,
}

impl MobiusRepresentation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    #[inline]
    pub fn coefficient(&self, set: Subset) -> f64 {
        self.coefficients[set as usize]
    }

    /// Zeta transform: sums the coefficients back into set-function values.
    pub fn zeta(&self) -> SetFunction {
        let mut values = self.coefficients.clone();
        for bit in 0..self.n {
            let b = 1usize << bit;
            for mask in 0..values.len() {
                if mask & b != 0 {
                    values[mask] += values[mask ^ b];
                }
            }
        }
        SetFunction { n: self.n, values }
    }
}

/// Inverts the subset-sum relation one coordinate at a time.
pub fn mobius_transform(sf: &SetFunction) -> MobiusRepresentation {
    let mut coefficients = sf.values.clone();
    for bit in 0..sf.n {
        let b = 1usize << bit;
        for mask in 0..coefficients.len() {
            if mask & b != 0 {
                coefficients[mask] -= coefficients[mask ^ b];
            }
        }
    }
    MobiusRepresentation {
        n: sf.n,
        coefficients,
    }
}

/// What [`random_set_function`] generates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetFunctionKind {
    /// Uniform values in `[-1, 1]`, with `phi(empty) = 0`.
    General,
    /// A capacity.
    Capacity,
    /// A capacity with `phi([n]) = 1`.
    CapacityNormalized,
}

impl std::str::FromStr for SetFunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Self::General),
            "capacity" => Ok(Self::Capacity),
            "capacity_normalized" | "capacity-normalized" => Ok(Self::CapacityNormalized),
            other => Err(Error::Value(format!("unknown set function kind `{other}`"))),
        }
    }
}

/// Deterministic generator keyed by `(n, seed, kind)`.
///
/// Capacities are built by walking a uniformly drawn linear extension of the
/// subset lattice and adding a nonnegative increment at every step, so any
/// subset is visited after all of its subsets.
pub fn random_set_function(n: usize, seed: u64, kind: SetFunctionKind) -> Result<SetFunction> {
    check_arity(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1usize << n;
    let values = match kind {
        SetFunctionKind::General => {
            let mut v: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            v[0] = 0.0;
            v
        }
        SetFunctionKind::Capacity | SetFunctionKind::CapacityNormalized => {
            let mut v = vec![0.0; size];
            let mut pending: Vec<u32> = (0..size).map(|m| m.count_ones()).collect();
            let mut available = vec![0usize];
            let mut level = 0.0;
            while !available.is_empty() {
                let pick = rng.gen_range(0..available.len());
                let set = available.swap_remove(pick);
                if set != 0 {
                    level += rng.gen_range(0.0..1.0);
                }
                v[set] = level;
                for bit in 0..n {
                    let sup = set | (1 << bit);
                    if sup != set {
                        pending[sup] -= 1;
                        if pending[sup] == 0 {
                            available.push(sup);
                        }
                    }
                }
            }
            if kind == SetFunctionKind::CapacityNormalized {
                let top = v[size - 1];
                if top > 0.0 {
                    v.iter_mut().for_each(|x| *x /= top);
                } else {
                    v.iter_mut().skip(1).for_each(|x| *x = 1.0);
                }
                v[size - 1] = 1.0;
            }
            v
        }
    };
    SetFunction::new(n, values)
}

/// A random permutation of `0..n`, used by samplers.
pub(crate) fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_is_capacity(sf: &SetFunction) -> bool {
        let full = full_set(sf.n());
        sf.empty_value() == 0.0
            && (0..=full).all(|a| {
                (0..=full)
                    .filter(|b| a & b == a)
                    .all(|b| sf.value(a) <= sf.value(b))
            })
    }

    #[test]
    fn construction() {
        let min = SetFunction::new(2, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(min.full_value(), 1.0);
        let id = SetFunction::new(1, vec![0.0, 1.0]).unwrap();
        assert_eq!(id.value(1), 1.0);
        assert!(matches!(
            SetFunction::new(2, vec![0.0; 3]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            SetFunction::new(0, vec![0.0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            SetFunction::new(17, vec![]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            SetFunction::new(1, vec![0.0, f64::NAN]),
            Err(Error::Value(_))
        ));
    }

    #[test]
    fn capacity_examples() {
        assert!(is_capacity(
            &SetFunction::new(2, vec![0.0, 0.0, 0.0, 1.0]).unwrap()
        ));
        assert!(is_capacity(
            &SetFunction::new(2, vec![0.0, 0.3, 0.6, 1.0]).unwrap()
        ));
        assert!(!is_capacity(
            &SetFunction::new(2, vec![0.1, 0.3, 0.6, 1.0]).unwrap()
        ));
        assert!(!is_capacity(
            &SetFunction::new(2, vec![0.0, 0.5, -0.2, 1.0]).unwrap()
        ));
    }

    #[test]
    fn mobius_examples() {
        let sf = SetFunction::new(2, vec![0.0, 0.3, 0.6, 1.0]).unwrap();
        let m = mobius_transform(&sf);
        for (got, want) in m.coefficients().iter().zip([0.0, 0.3, 0.6, 0.1]) {
            assert!((got - want).abs() < 1e-12);
        }
        let min = SetFunction::new(2, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(mobius_transform(&min).coefficients(), &[0.0, 0.0, 0.0, 1.0]);
        let single = SetFunction::new(1, vec![0.0, 2.5]).unwrap();
        assert_eq!(mobius_transform(&single).coefficients(), &[0.0, 2.5]);
    }

    #[test]
    fn generator_is_deterministic() {
        let a = random_set_function(2, 42, SetFunctionKind::Capacity).unwrap();
        let b = random_set_function(2, 42, SetFunctionKind::Capacity).unwrap();
        assert_eq!(a, b);
        assert!(is_capacity(&a));
        let c = random_set_function(3, 7, SetFunctionKind::CapacityNormalized).unwrap();
        assert_eq!(c.full_value(), 1.0);
        assert!(is_capacity(&c));
        assert!(random_set_function(0, 1, SetFunctionKind::General).is_err());
    }

    #[test]
    fn generated_capacities_pass() {
        for n in 1..=6 {
            for seed in 0..1000 {
                let sf = random_set_function(n, seed, SetFunctionKind::Capacity).unwrap();
                assert!(is_capacity(&sf), "n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn covering_pairs_match_all_pairs() {
        for n in 1..=6 {
            for seed in 0..200 {
                let kind = match seed % 3 {
                    0 => SetFunctionKind::General,
                    1 => SetFunctionKind::Capacity,
                    _ => SetFunctionKind::CapacityNormalized,
                };
                let mut sf = random_set_function(n, seed, kind).unwrap();
                if seed % 7 == 0 {
                    // flip one value to break monotonicity occasionally
                    let k = (seed as usize * 31) % (1 << n);
                    sf.values[k] -= 0.5;
                }
                assert_eq!(is_capacity(&sf), brute_force_is_capacity(&sf));
            }
        }
    }

    #[test]
    fn dual_of_self_dual() {
        let sf = SetFunction::new(2, vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        assert!(sf.is_self_dual(0.0));
        let sf = SetFunction::new(2, vec![0.0, 0.3, 0.6, 1.0]).unwrap();
        assert!(!sf.is_self_dual(1e-12));
        let dd = sf.dual().dual();
        assert!(dd
            .values()
            .iter()
            .zip(sf.values())
            .all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn json_forms() {
        let sf: SetFunction = serde_json::from_str(r#"{"n":2,"values":[0,0.3,0.6,1]}"#).unwrap();
        let bare: SetFunction = serde_json::from_str("[0,0.3,0.6,1]").unwrap();
        assert_eq!(sf, bare);
        assert_eq!(
            serde_json::to_string(&sf).unwrap(),
            r#"{"n":2,"values":[0.0,0.3,0.6,1.0]}"#
        );
        assert!(serde_json::from_str::<SetFunction>(r#"{"n":2,"values":[0,1,2]}"#).is_err());
    }

    proptest! {
        #[test]
        fn zeta_inverts_mobius(n in 1usize..=8, seed in any::<u64>()) {
            let sf = random_set_function(n, seed, SetFunctionKind::General).unwrap();
            let back = mobius_transform(&sf).zeta();
            for (a, b) in back.values().iter().zip(sf.values()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
