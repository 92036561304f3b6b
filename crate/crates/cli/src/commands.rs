use ineq_forge_core::functionals::{lambda_constant, LambdaConstant};
use ineq_forge_core::spectral_verifier::{
    default_probe_grid, default_schedule, falsification_report, refinement_report, remainder_probe, run_step,
    ProbeStatus, StepOutcome,
};
use ineq_forge_core::{Coordinate, Discretization, RadialDomain, RhsAdjustment, Verdict, WeightChainSpec};

use crate::cli::*;
use crate::parallel::ordered_map;
use crate::report::*;
use crate::{Failure, Status};

/// Report text, the exit status it implies, and a one-line summary for stderr.
pub struct Output {
    pub body: String,
    pub status: Status,
    pub summary: String,
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn chain(family: &FamilyArgs, n: usize) -> Result<WeightChainSpec, Failure> {
    let tag = family.tag().map_err(Failure::Usage)?;
    WeightChainSpec::new(tag, n.max(1)).map_err(usage)
}

fn disc(c: CoordinateName, ell: u32) -> Discretization {
    Discretization {
        coordinate: match c {
            CoordinateName::Log => Coordinate::LogRadius,
            CoordinateName::Linear => Coordinate::Linear,
        },
        ell,
    }
}

pub fn weights(a: &WeightsArgs) -> Result<Output, Failure> {
    let spec = chain(&a.family, a.n)?;
    let mut columns = vec!["t".to_string()];
    columns.extend((0..=a.n).map(|k| format!("W_{k}")));
    columns.push("partial_sum".into());
    let mut rows = Vec::with_capacity(a.t_grid.0.len());
    for &t in &a.t_grid.0 {
        let s = spec.weight_sequence(t).map_err(usage)?;
        let mut row = vec![t];
        row.extend_from_slice(&s.w[..=a.n]);
        row.push(s.partial_sum);
        rows.push(row);
    }
    let body = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => table_csv(&columns, &rows),
        Format::Json => json(&WeightsJson {
            family: spec.family().name().into(),
            params: spec.family(),
            n: a.n,
            columns,
            rows,
            timestamp: timestamp(),
        }),
    };
    Ok(Output {
        body,
        status: Status::Ok,
        summary: format!("{} rows", a.t_grid.0.len()),
    })
}

pub fn constants(a: &ConstantsArgs) -> Result<Output, Failure> {
    let c = match lambda_constant(a.alpha, a.d).map_err(usage)? {
        LambdaConstant::Value(v) => ConstantsJson { lambda: Some(v), inequality_fails: None },
        LambdaConstant::InequalityFails => ConstantsJson { lambda: None, inequality_fails: Some(true) },
    };
    let body = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => format!("{}\n", json_line(&c)),
        Format::Csv => format!("lambda\n{}\n", c.lambda.map_or("NaN".into(), csv_num)),
    };
    let summary = match c.lambda {
        Some(v) => format!("lambda = {v}"),
        None => "the inequality fails at alpha = -(d-2)/2".into(),
    };
    Ok(Output { body, status: Status::Ok, summary })
}

fn adjustment(eps: f64, quadratic: f64, constant: f64) -> RhsAdjustment {
    RhsAdjustment { inflation: eps, quadratic, constant }
}

fn emit_verification(command: &str, r: &ineq_forge_core::VerificationReport, fmt: Option<Format>) -> String {
    let j = VerificationJson::new(command, r);
    match fmt.unwrap_or(Format::Json) {
        Format::Json => json(&j),
        Format::Csv => j.csv(),
    }
}

pub fn verify(a: &VerifyArgs, threads: usize) -> Result<Output, Failure> {
    let spec = chain(&a.family, a.n)?;
    if a.nodes.len() < 3 {
        return Err(Failure::Usage(format!("--nodes needs at least 3 refinements, got {}", a.nodes.len())));
    }
    let domain = RadialDomain::new(a.rin, a.rout).map_err(usage)?;
    let adj = adjustment(a.adjust.eps, a.adjust.quadratic, a.adjust.constant);
    let d = disc(a.coordinate, a.ell);
    let outcomes = ordered_map(&a.nodes, threads, |&nodes| run_step(&spec, a.n, domain, nodes, adj, d))
        .into_iter()
        .collect::<Result<Vec<StepOutcome>, _>>()
        .map_err(usage)?;
    let r = refinement_report(spec.family(), a.n, adj, outcomes);
    let status = match r.verdict {
        Verdict::Verified => Status::Ok,
        Verdict::Falsified => Status::Unexpected,
        Verdict::Inconclusive => Status::Inconclusive,
    };
    Ok(Output {
        body: emit_verification("verify", &r, a.out.format),
        status,
        summary: format!("{:?}: lambda_min = {:e} (tolerance {:e}, {} nodes)", r.verdict, r.lambda_min, r.tolerance, r.grid_size),
    })
}

pub fn falsify(a: &FalsifyArgs, threads: usize) -> Result<Output, Failure> {
    let spec = chain(&a.family, a.n)?;
    let adj = adjustment(a.eps, a.quadratic, a.constant);
    if adj.inflation < 0.0 || adj.quadratic < 0.0 || adj.constant < 0.0 {
        return Err(Failure::Usage("--eps, --quadratic and --constant must be nonnegative".into()));
    }
    let d = disc(a.coordinate, 0);
    let schedule = default_schedule(&spec);
    // Run the schedule in batches; cut after the first re-validated witness so
    // the result does not depend on the batch size.
    let mut outcomes: Vec<StepOutcome> = Vec::new();
    for batch in schedule.chunks(threads.max(1)) {
        let res = ordered_map(batch, threads, |&dom| run_step(&spec, a.n, dom, a.nodes, adj, d));
        for o in res {
            outcomes.push(o.map_err(usage)?);
        }
        if let Some(i) = outcomes.iter().position(|o| o.witness.as_ref().is_some_and(|w| w.is_valid())) {
            outcomes.truncate(i + 1);
            break;
        }
    }
    let r = falsification_report(spec.family(), a.n, adj, outcomes);
    let status = match r.verdict {
        Verdict::Falsified => Status::Ok,
        _ => Status::Inconclusive,
    };
    Ok(Output {
        body: emit_verification("falsify", &r, a.out.format),
        status,
        summary: format!(
            "{:?}: lambda_min = {:e} at log r in [{}, {}]",
            r.verdict, r.lambda_min, r.domain.log_in, r.domain.log_out
        ),
    })
}

/// 25 geometric points strictly inside the validity interval.
fn interior_grid(spec: &WeightChainSpec) -> Vec<f64> {
    let (lo, hi) = spec.validity();
    let top = if hi.is_finite() { 0.99 * hi } else { 1e3 * lo.max(1.0) };
    let bottom = if lo > 0.0 { lo * 1.01 } else { 1e-6 * top };
    (0..25).map(|i| bottom * (top / bottom).powf(i as f64 / 24.0)).collect()
}

pub const IDENTITY_TOLERANCE: f64 = 1e-8;

pub fn identity(a: &IdentityArgs) -> Result<Output, Failure> {
    let spec = chain(&a.family, a.n)?;
    let grid = a.t_grid.as_ref().map_or_else(|| interior_grid(&spec), |g| g.0.clone());
    let compat = spec.family().is_hardy_poincare();
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=a.n).map(|k| format!("residual_{k}")));
    if compat {
        columns.extend(["compat_a".to_string(), "compat_b".to_string()]);
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut worst = 0.0f64;
    for &t in &grid {
        let mut row = vec![t];
        for k in 1..=a.n {
            let r = spec.recursion_residual(t, k).map_err(usage)?;
            worst = worst.max(r);
            row.push(r);
        }
        if compat {
            let (ca, cb) = spec.compatibility_residuals(t).map_err(usage)?;
            worst = worst.max(ca).max(cb);
            row.extend([ca, cb]);
        }
        rows.push(row);
    }
    let pass = worst < IDENTITY_TOLERANCE;
    let body = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => table_csv(&columns, &rows),
        Format::Json => json(&IdentityJson {
            family: spec.family().name().into(),
            params: spec.family(),
            n: a.n,
            columns,
            rows,
            max_residual: worst,
            tolerance: IDENTITY_TOLERANCE,
            pass,
            timestamp: timestamp(),
        }),
    };
    Ok(Output {
        body,
        status: if pass { Status::Ok } else { Status::Unexpected },
        summary: format!("max residual {worst:e} over {} points", grid.len()),
    })
}

pub fn probe(a: &ProbeArgs) -> Result<Output, Failure> {
    let spec = chain(&a.family, a.level.max(1))?;
    let level = a.level;
    let grid = a.t_grid.as_ref().map_or_else(|| default_probe_grid(&spec, level), |g| g.0.clone());
    let lower = |t: f64| if level == 0 { 0.0 } else { spec.weight_sum(t, level - 1) };
    let z0 = spec.family().z0();
    let p = match a.candidate {
        Candidate::PartialSum => remainder_probe(&spec, |t| spec.weight_sum(t, level), level, &grid),
        Candidate::Seed => remainder_probe(&spec, |t| z0 + spec.seed_weight(t, level).unwrap_or(f64::NAN), level, &grid),
        Candidate::Inflated => {
            remainder_probe(&spec, |t| lower(t) + a.factor * spec.level_weight(t, level), level, &grid)
        }
    }
    .map_err(usage)?;
    let status = match (p.status, p.exceeds_optimal) {
        (ProbeStatus::Inconclusive, _) => Status::Inconclusive,
        (_, true) => Status::Unexpected,
        _ => Status::Ok,
    };
    let j = ProbeJson {
        family: spec.family().name().into(),
        params: spec.family(),
        level,
        candidate: match a.candidate {
            Candidate::PartialSum => "partial-sum",
            Candidate::Seed => "seed",
            Candidate::Inflated => "inflated",
        }
        .into(),
        factor: (a.candidate == Candidate::Inflated).then_some(a.factor),
        samples: p.samples.clone(),
        limit: p.limit,
        uncertainty: p.uncertainty,
        threshold: p.threshold,
        exceeds_optimal: p.exceeds_optimal,
        status: p.status,
        timestamp: timestamp(),
    };
    let body = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => json(&j),
        Format::Csv => {
            let rows: Vec<Vec<f64>> = j.samples.iter().map(|&(t, r)| vec![t, r]).collect();
            table_csv(&["t".into(), "ratio".into()], &rows)
        }
    };
    Ok(Output {
        body,
        status,
        summary: format!(
            "{:?}: limit {:?} +- {:?}, threshold {}, exceeds optimal: {}",
            p.status, p.limit, p.uncertainty, p.threshold, p.exceeds_optimal
        ),
    })
}
