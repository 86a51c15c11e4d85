//! Black-box `n`-place functions, as seen by the axiom checkers.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real function of `arity()` real arguments.
///
/// Checkers may call `value` from several threads at once, so implementations
/// must be free of side effects.
pub trait Aggregator: Send + Sync {
    fn arity(&self) -> usize;

    /// Evaluates at `x`; callers guarantee `x.len() == self.arity()`.
    fn value(&self, x: &[f64]) -> f64;
}

impl<T: Aggregator + ?Sized> Aggregator for &T {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

impl<T: Aggregator + ?Sized> Aggregator for Box<T> {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

impl<T: Aggregator + ?Sized> Aggregator for Arc<T> {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

/// Wraps a closure as an [`Aggregator`].
pub struct FnAggregator<F> {
    arity: usize,
    f: F,
}

impl<F> FnAggregator<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<F> Aggregator for FnAggregator<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn arity(&self) -> usize {
        self.arity
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Demo functions shipped with the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `x1 ∧ x2`
    Min2,
    /// `x1 ∨ x2`
    Max2,
    /// `x1 · x2`
    Product2,
    /// `|x1|`
    Abs1,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::Min2,
        Builtin::Max2,
        Builtin::Product2,
        Builtin::Abs1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Min2 => "min2",
            Builtin::Max2 => "max2",
            Builtin::Product2 => "product2",
            Builtin::Abs1 => "abs1",
        }
    }
}

impl std::str::FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.strip_prefix("builtin:").unwrap_or(s);
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Value(format!("unknown builtin `{s}`")))
    }
}

impl Aggregator for Builtin {
    fn arity(&self) -> usize {
        match self {
            Builtin::Abs1 => 1,
            _ => 2,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Builtin::Min2 => x[0].min(x[1]),
            Builtin::Max2 => x[0].max(x[1]),
            Builtin::Product2 => x[0] * x[1],
            Builtin::Abs1 => x[0].abs(),
        }
    }
}
