//! Independent reference computations used to cross-check the fast paths.
//!
//! Nothing here shares code with the extension evaluators: the affine oracle
//! solves a dense vertex system, the Möbius oracle sums minima over subsets and
//! the sweep enumerates a grid exhaustively.

use serde::Serialize;

use crate::aggregator::Aggregator;
use crate::axioms::{
    admissible, assemble_diagonal, diagonal_laws, probe, Axiom, Inputs, Law, LawOutcome, Tolerance,
    Verdict, WitnessSource,
};
use crate::error::{Error, Result};
use crate::setfn::{full_set, members, mobius_transform, SetFunction, Subset};
use crate::vecops::DomainSpec;

/// Largest arity the dense affine oracle accepts.
pub const AFFINE_MAX_ARITY: usize = 10;

/// Largest number of instances [`brute_force_axiom_sweep`] will enumerate.
pub const SWEEP_BUDGET: u128 = 10_000_000;

/// The affine function `y ↦ a·y + b` matching `φ` on the simplex containing `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineRegion {
    /// Ascending order of the point the region was built for.
    pub sigma: Vec<usize>,
    /// `a_0, …, a_{n-1}, b`.
    pub coefficients: Vec<f64>,
    /// Vertex sets `{σ_k, …, σ_{n-1}}` for `k = 0..=n`.
    pub vertices: Vec<Subset>,
}

impl AffineRegion {
    pub fn eval(&self, y: &[f64]) -> f64 {
        let n = self.sigma.len();
        self.coefficients[..n]
            .iter()
            .zip(y)
            .map(|(a, v)| a * v)
            .sum::<f64>()
            + self.coefficients[n]
    }
}

fn check_arity(phi: &SetFunction, x: &[f64]) -> Result<()> {
    if x.len() != phi.n() {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, set function has {}",
            x.len(),
            phi.n()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Value("point has non-finite coordinates".into()));
    }
    Ok(())
}

/// Solves `m z = rhs` by Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let size = rhs.len();
    for col in 0..size {
        let pivot = (col..size)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-12 {
            return Err(Error::SingularSystem((0..size).collect()));
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..size {
            let factor = m[row][col] / m[col][col];
            if factor != 0.0 {
                let (upper, lower) = m.split_at_mut(row);
                for (target, &source) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *target -= factor * source;
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    let mut z = vec![0.0; size];
    for row in (0..size).rev() {
        let tail: f64 = (row + 1..size).map(|k| m[row][k] * z[k]).sum();
        z[row] = (rhs[row] - tail) / m[row][row];
    }
    Ok(z)
}

/// The affine region of the simplex containing `x`.
pub fn affine_region(phi: &SetFunction, x: &[f64]) -> Result<AffineRegion> {
    check_arity(phi, x)?;
    let n = phi.n();
    if n > AFFINE_MAX_ARITY {
        return Err(Error::Dimension(format!(
            "affine oracle supports n <= {AFFINE_MAX_ARITY}, got {n}"
        )));
    }
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let vertices: Vec<Subset> = (0..=n)
        .map(|k| sigma[k..].iter().fold(0, |s, &i| s | (1 << i)))
        .collect();
    let rows: Vec<Vec<f64>> = vertices
        .iter()
        .map(|&set| {
            let mut row: Vec<f64> = (0..n).map(|i| f64::from((set >> i) & 1)).collect();
            row.push(1.0);
            row
        })
        .collect();
    let rhs = vertices.iter().map(|&s| phi.value(s)).collect();
    let coefficients = solve(rows, rhs)?;
    Ok(AffineRegion {
        sigma,
        coefficients,
        vertices,
    })
}

/// Lovász extension value at `x` by affine interpolation of vertex values.
pub fn eval_affine_interpolation(phi: &SetFunction, x: &[f64]) -> Result<f64> {
    Ok(affine_region(phi, x)?.eval(x))
}

/// Lovász extension value at `x` as `φ(∅) + Σ_{A≠∅} m(A) min_{i∈A} x_i`.
pub fn eval_via_mobius(phi: &SetFunction, x: &[f64]) -> Result<f64> {
    check_arity(phi, x)?;
    let m = mobius_transform(phi);
    let mut acc = phi.empty_value();
    for set in 1..=full_set(phi.n()) {
        let c = m.coefficient(set);
        if c != 0.0 {
            let low = members(set).map(|i| x[i]).fold(f64::INFINITY, f64::min);
            acc += c * low;
        }
    }
    Ok(acc)
}

fn grid_vector(grid: &[f64], n: usize, mut index: usize) -> Vec<f64> {
    let g = grid.len();
    let mut x = vec![0.0; n];
    for slot in x.iter_mut().rev() {
        *slot = grid[index % g];
        index /= g;
    }
    x
}

/// Grid instances of `law`, lexicographic in grid order.
///
/// Comonotonic pairs come in two phases: all doublings `(x, x)` first, then
/// every other pair.
fn lattice_instances<'a>(
    law: Law,
    n: usize,
    grid: &'a [f64],
) -> Box<dyn Iterator<Item = Inputs> + 'a> {
    let g = grid.len();
    let count = g.pow(n as u32);
    let vector = move |k| grid_vector(grid, n, k);
    match law {
        Law::Additive(_) => {
            let doubled = (0..count).map(move |k| Inputs::Pair {
                x: vector(k),
                x_prime: vector(k),
            });
            let rest = (0..count).flat_map(move |a| {
                (0..count)
                    .filter(move |&b| b != a)
                    .map(move |b| Inputs::Pair {
                        x: vector(a),
                        x_prime: vector(b),
                    })
            });
            Box::new(doubled.chain(rest))
        }
        Law::MinCut(_) | Law::MaxCut(_) | Law::MedianCut => Box::new(
            (0..count)
                .flat_map(move |k| grid.iter().map(move |&c| Inputs::Cut { x: vector(k), c })),
        ),
        Law::Homogeneity { .. } => Box::new((0..count).flat_map(move |k| {
            grid.iter()
                .map(move |&c| Inputs::Scaled { x: vector(k), c })
        })),
        Law::Splitting | Law::OddPositive => {
            Box::new((0..count).map(move |k| Inputs::Point { x: vector(k) }))
        }
        Law::SectionAdditive { subset, .. } => Box::new(grid.iter().flat_map(move |&t| {
            grid.iter()
                .map(move |&t_prime| Inputs::Section { subset, t, t_prime })
        })),
        Law::SectionOdd { subset } => {
            Box::new(grid.iter().map(move |&t| Inputs::Odd { subset, t }))
        }
    }
}

/// Sweeps the grid for `law`, stopping at the first violation.
pub(crate) fn sweep_law<F: Aggregator + ?Sized>(
    f: &F,
    law: Law,
    grid: &[f64],
    domain: &DomainSpec,
    tolerance: &Tolerance,
) -> LawOutcome {
    let n = f.arity();
    let mut trials = 0;
    if grid.is_empty() {
        return LawOutcome {
            trials,
            witness: None,
        };
    }
    for inputs in lattice_instances(law, n, grid) {
        if !admissible(law, domain, n, &inputs) {
            continue;
        }
        trials += 1;
        if let Some(w) = probe(f, law, domain, tolerance, inputs, WitnessSource::Lattice) {
            return LawOutcome {
                trials,
                witness: Some(w),
            };
        }
    }
    LawOutcome {
        trials,
        witness: None,
    }
}

fn sweep_size(law: Law, n: usize, g: u128) -> u128 {
    let vectors = g.saturating_pow(n as u32);
    match law {
        Law::Additive(_) => vectors.saturating_mul(vectors),
        Law::MinCut(_) | Law::MaxCut(_) | Law::MedianCut | Law::Homogeneity { .. } => {
            vectors.saturating_mul(g)
        }
        Law::Splitting | Law::OddPositive => vectors,
        Law::SectionAdditive { .. } => g * g,
        Law::SectionOdd { .. } => g,
    }
}

/// Exhaustively checks `axiom` on every grid instance over the real line.
///
/// Fails with [`Error::BudgetExceeded`] when more than [`SWEEP_BUDGET`]
/// instances would be enumerated.
pub fn brute_force_axiom_sweep<F: Aggregator + ?Sized>(
    f: &F,
    n: usize,
    grid: &[f64],
    axiom: Axiom,
) -> Result<Verdict> {
    if f.arity() != n {
        return Err(Error::Dimension(format!(
            "function has arity {}, sweep asked for {n}",
            f.arity()
        )));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::Value("grid has non-finite values".into()));
    }
    let domain = DomainSpec::FullLine;
    let tolerance = Tolerance::default();
    let g = grid.len() as u128;
    let laws: Vec<Law> = match axiom.law() {
        Some(law) => vec![law],
        None => diagonal_laws(n, &domain).into_iter().map(|l| l.0).collect(),
    };
    let needed = laws
        .iter()
        .fold(0u128, |acc, &l| acc.saturating_add(sweep_size(l, n, g)));
    if needed > SWEEP_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: SWEEP_BUDGET,
        });
    }
    match axiom.law() {
        Some(law) => {
            let out = sweep_law(f, law, grid, &domain, &tolerance);
            Ok(Verdict {
                axiom,
                passed: out.witness.is_none(),
                trials: out.trials,
                seed: 0,
                witness: out.witness,
                sections: Vec::new(),
            })
        }
        None => {
            let entries = diagonal_laws(n, &domain)
                .into_iter()
                .map(|(law, scope, info)| {
                    (
                        law,
                        scope,
                        info,
                        sweep_law(f, law, grid, &domain, &tolerance),
                    )
                })
                .collect();
            Ok(assemble_diagonal(0, entries))
        }
    }
}
