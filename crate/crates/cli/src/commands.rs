use choqlab::axioms::check;
use choqlab::oracle::{eval_affine_interpolation, eval_via_mobius, AFFINE_MAX_ARITY};
use choqlab::vecops::{
    add, cut_above, cut_below, join_scalar, med_clamp, meet_scalar, neg_part, pos_part,
};
use choqlab::{
    random_set_function, Aggregator, Axiom, CheckConfig, DomainSpec, Extension, LovaszExtension,
    SetFunction, SetFunctionKind, Tolerance,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::input::{load_extension, load_vector, load_vectors, InputLog, Target};
use crate::{CheckArgs, CliError, CompareArgs, DecomposeArgs, EvalArgs, GenArgs, Mode};

/// Results, process exit code and the seed the command used, if any.
pub struct Outcome {
    pub results: Value,
    pub exit: i32,
    pub seed: Option<u64>,
    pub summary: String,
}

fn spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo.is_finite() || hi.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

/// `f_φ(x⁺) - f_ψ(x⁻)` with `f` computed by `oracle`.
fn split_oracle(
    phi_pos: &SetFunction,
    phi_neg: &SetFunction,
    x: &[f64],
    oracle: fn(&SetFunction, &[f64]) -> choqlab::Result<f64>,
) -> choqlab::Result<f64> {
    Ok(oracle(phi_pos, &pos_part(x))? - oracle(phi_neg, &neg_part(x))?)
}

/// Primary value, all requested values by name, and names not applicable.
type Representations = (f64, Map<String, Value>, Vec<&'static str>);

fn representations(
    ext: &Extension,
    x: &[f64],
    args: &EvalArgs,
) -> Result<Representations, CliError> {
    let mut reps = Map::new();
    let mut skipped = Vec::new();
    let n = ext.n();
    let primary = ext.eval(x)?;
    reps.insert(ext.kind().into(), json!(primary));
    match ext {
        Extension::Lovasz(l) => {
            if args.dual {
                reps.insert("dual".into(), json!(l.eval_dual(x)?));
            }
            if args.symmetric_telescoping {
                skipped.push("telescoping");
            }
            if args.oracles {
                reps.insert("mobius".into(), json!(eval_via_mobius(l.phi(), x)?));
                if n <= AFFINE_MAX_ARITY {
                    reps.insert(
                        "affine".into(),
                        json!(eval_affine_interpolation(l.phi(), x)?),
                    );
                } else {
                    skipped.push("affine");
                }
            }
        }
        Extension::Symmetric(s) => {
            let phi = s.phi();
            let base = phi.empty_value();
            if args.dual {
                let l = s.lovasz();
                let v = base + l.eval_dual(&pos_part(x))? - l.eval_dual(&neg_part(x))?;
                reps.insert("dual".into(), json!(v));
            }
            if args.symmetric_telescoping {
                reps.insert("telescoping".into(), json!(s.eval_telescoping(x)?));
            }
            if args.oracles {
                let v = base + split_oracle(phi, phi, x, eval_via_mobius)?;
                reps.insert("mobius".into(), json!(v));
                if n <= AFFINE_MAX_ARITY {
                    let v = base + split_oracle(phi, phi, x, eval_affine_interpolation)?;
                    reps.insert("affine".into(), json!(v));
                } else {
                    skipped.push("affine");
                }
            }
        }
        Extension::Median(m) => {
            if args.dual {
                reps.insert("split".into(), json!(m.eval_split(x)?));
            }
            if args.symmetric_telescoping {
                skipped.push("telescoping");
            }
            if args.oracles {
                let (p, q) = (m.phi_pos(), m.phi_neg());
                reps.insert(
                    "mobius".into(),
                    json!(split_oracle(p, q, x, eval_via_mobius)?),
                );
                if n <= AFFINE_MAX_ARITY {
                    let v = split_oracle(p, q, x, eval_affine_interpolation)?;
                    reps.insert("affine".into(), json!(v));
                } else {
                    skipped.push("affine");
                }
            }
        }
    }
    Ok((primary, reps, skipped))
}

pub fn eval(args: &EvalArgs, log: &mut InputLog) -> Result<Outcome, CliError> {
    let ext = load_extension(&args.extension, log)?;
    let points = load_vectors(&args.vectors, log)?;
    let side_by_side = args.dual || args.symmetric_telescoping || args.oracles;
    let mut rows = Vec::with_capacity(points.len());
    let mut worst: f64 = 0.0;
    let mut skipped_any = Vec::new();
    for x in &points {
        let (value, reps, skipped) = representations(&ext, x, args)?;
        skipped_any = skipped;
        let mut row = Map::new();
        row.insert("x".into(), json!(x));
        row.insert("value".into(), json!(value));
        if side_by_side {
            let d = spread(reps.values().filter_map(Value::as_f64));
            worst = worst.max(d);
            row.insert("representations".into(), Value::Object(reps));
            row.insert("max_discrepancy".into(), json!(d));
        }
        rows.push(Value::Object(row));
    }
    let mut results = Map::new();
    results.insert("extension".into(), json!(ext.kind()));
    results.insert("n".into(), json!(ext.n()));
    results.insert("points".into(), Value::Array(rows));
    if side_by_side {
        results.insert("max_discrepancy".into(), json!(worst));
        if !skipped_any.is_empty() {
            results.insert("not_applicable".into(), json!(skipped_any));
        }
    }
    let summary = if side_by_side {
        format!(
            "evaluated {} point(s) of a {} extension; max discrepancy {worst:e}",
            points.len(),
            ext.kind()
        )
    } else {
        format!(
            "evaluated {} point(s) of a {} extension",
            points.len(),
            ext.kind()
        )
    };
    Ok(Outcome {
        results: Value::Object(results),
        exit: 0,
        seed: None,
        summary,
    })
}

pub fn check_cmd(args: &CheckArgs, log: &mut InputLog) -> Result<Outcome, CliError> {
    let target = Target::load(&args.target, log)?;
    let mut axiom: Axiom = args.axiom.parse()?;
    if args.positive_only {
        match axiom {
            Axiom::Homogeneity => axiom = Axiom::PositiveHomogeneity,
            Axiom::PositiveHomogeneity => {}
            other => {
                return Err(CliError::usage(format!(
                    "--positive-only applies to homogeneity, not {other}"
                )))
            }
        }
    }
    let domain: DomainSpec = args.domain.parse()?;
    let defaults = CheckConfig::default();
    let cfg = CheckConfig {
        domain,
        trials: args.trials,
        tolerance: Tolerance {
            abs: args.abs_tol,
            rel: args.rel_tol,
        },
        seed: args.seed,
        jobs: args.jobs.max(1),
        lattice: args.lattice.clone().unwrap_or(defaults.lattice),
        ..defaults
    };
    let verdict = check(&target, axiom, &cfg)?;
    let summary = format!(
        "{axiom} on {}: {} after {} trials",
        target.describe(),
        if verdict.passed { "passed" } else { "FAILED" },
        verdict.trials
    );
    Ok(Outcome {
        exit: if verdict.passed { 0 } else { 1 },
        results: json!({
            "target": target.describe(),
            "domain": cfg.domain.to_string(),
            "verdict": verdict,
        }),
        seed: Some(cfg.seed),
        summary,
    })
}

pub fn decompose(args: &DecomposeArgs, log: &mut InputLog) -> Result<Outcome, CliError> {
    let x = load_vector(&args.x, log)?;
    let c = args.cut;
    let domain: DomainSpec = args.domain.parse()?;
    if !domain.contains_all(&x) {
        return Err(CliError::domain(format!("x = {x:?} is not in {domain}")));
    }
    if !c.is_finite() || !domain.contains(c) {
        return Err(CliError::cut(format!("cut level {c} is not in {domain}")));
    }
    let (names, parts): (Vec<&str>, Vec<Vec<f64>>) = match args.mode {
        Mode::Min => (
            vec!["meet", "above"],
            vec![meet_scalar(&x, c), cut_above(&x, c)],
        ),
        Mode::Max => (
            vec!["join", "below"],
            vec![join_scalar(&x, c), cut_below(&x, c)],
        ),
        Mode::Median => {
            let med = med_clamp(&x, c)?;
            (
                vec!["median", "above", "below"],
                vec![med, cut_above(&x, c), cut_below(&x, -c)],
            )
        }
    };
    let recomposed = parts
        .iter()
        .skip(1)
        .fold(parts[0].clone(), |acc, p| add(&acc, p));
    let residual: Vec<f64> = x.iter().zip(&recomposed).map(|(a, b)| a - b).collect();
    let exact = residual.iter().all(|&r| r == 0.0);
    let named: Map<String, Value> = names
        .iter()
        .zip(&parts)
        .map(|(n, p)| (n.to_string(), json!(p)))
        .collect();
    let summary = format!(
        "{} decomposition of {x:?} at {c}: {}",
        args.mode.name(),
        if exact { "exact" } else { "RESIDUAL NONZERO" }
    );
    Ok(Outcome {
        results: json!({
            "x": x,
            "cut": c,
            "mode": args.mode.name(),
            "parts": parts,
            "named_parts": named,
            "recomposed": recomposed,
            "residual": residual,
            "exact": exact,
        }),
        exit: if exact { 0 } else { 1 },
        seed: None,
        summary,
    })
}

pub fn gen(args: &GenArgs, log: &mut InputLog) -> Result<Outcome, CliError> {
    let kind: SetFunctionKind = args.kind.parse()?;
    log.record(
        "gen",
        format!("{} {} {}", args.n, args.seed, args.kind).as_bytes(),
    );
    let sf = random_set_function(args.n, args.seed, kind)?;
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&sf).expect("set function serializes");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::parse(format!("cannot write `{path}`: {e}")))?;
    }
    Ok(Outcome {
        results: json!({
            "kind": kind,
            "set_function": sf,
            "out": args.out,
        }),
        exit: 0,
        seed: Some(args.seed),
        summary: format!("generated a {} set function with n = {}", args.kind, args.n),
    })
}

/// Grid points `{-2..2}^n` for small `n`, then seeded uniform draws.
fn comparison_points(n: usize, samples: u64, seed: u64) -> Vec<Vec<f64>> {
    let mut points = Vec::new();
    if n <= 4 {
        let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
        for k in 0..grid.len().pow(n as u32) {
            let mut idx = k;
            let mut x = vec![0.0; n];
            for slot in x.iter_mut().rev() {
                *slot = grid[idx % grid.len()];
                idx /= grid.len();
            }
            points.push(x);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        points.push(
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        f64::from(rng.gen_range(-5i32..=5))
                    } else {
                        rng.gen_range(-10.0..=10.0)
                    }
                })
                .collect(),
        );
    }
    points
}

pub fn compare(args: &CompareArgs, log: &mut InputLog) -> Result<Outcome, CliError> {
    let a = load_extension(&args.a, log)?;
    let b = load_extension(&args.b, log)?;
    if a.n() != b.n() {
        return Err(CliError::dimension(format!(
            "extensions have n = {} and n = {}",
            a.n(),
            b.n()
        )));
    }
    let n = a.n();
    let points = comparison_points(n, args.samples, args.seed);
    let mut max_gap = 0.0;
    let mut at = vec![0.0; n];
    let (mut va, mut vb) = (a.value(&at), b.value(&at));
    for x in &points {
        let (p, q) = (a.value(x), b.value(x));
        let gap = (p - q).abs();
        if gap > max_gap {
            (max_gap, va, vb) = (gap, p, q);
            at.clone_from(x);
        }
    }

    // oddness on the positive orthant decides whether a Lovász extension
    // coincides with the symmetric extension of the same function
    let (label, subject) = match (&a, &b) {
        (Extension::Lovasz(l), _) => ("a", l.clone()),
        (_, Extension::Lovasz(l)) => ("b", l.clone()),
        _ => ("a", LovaszExtension::new(a.phi().clone())),
    };
    let cfg = CheckConfig {
        seed: args.seed,
        trials: args.samples.max(1),
        ..CheckConfig::default()
    };
    let oddness = check(&subject, Axiom::OddnessPositive, &cfg)?;
    let same_phi = a.phi() == b.phi();
    let lovasz_vs_symmetric = matches!(
        (&a, &b),
        (Extension::Lovasz(_), Extension::Symmetric(_))
            | (Extension::Symmetric(_), Extension::Lovasz(_))
    );
    let tolerance = 1e-9;
    let agree = max_gap <= tolerance;
    let consistent = (lovasz_vs_symmetric && same_phi).then_some(agree == oddness.passed);
    let summary = format!(
        "max |a - b| = {max_gap:e} over {} points; oddness of {label}: {}",
        points.len(),
        if oddness.passed { "passed" } else { "failed" }
    );
    Ok(Outcome {
        results: json!({
            "a": a.kind(),
            "b": b.kind(),
            "n": n,
            "points": points.len(),
            "max_gap": max_gap,
            "argmax": at,
            "a_value": va,
            "b_value": vb,
            "agree": agree,
            "tolerance": tolerance,
            "same_phi": same_phi,
            "oddness": { "of": label, "verdict": oddness },
            "consistent": consistent,
        }),
        exit: 0,
        seed: Some(args.seed),
        summary,
    })
}
