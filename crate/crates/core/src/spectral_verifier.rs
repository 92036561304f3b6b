//! Numerical verification and falsification of the improved inequalities.
//!
//! With the ground-state substitution u = e^{G}w every family reduces to a
//! one-dimensional form c∫(w_s² + P(s)w²)ds in s = log r, where P already
//! contains the truncated weight sum. The form is discretized with P1
//! elements and the comparison weight of level N as mass density, so a
//! negative smallest eigenvalue is a genuine counterexample that can be
//! re-checked by quadrature of the original functionals.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::functionals::{evaluate, seeded_rhs, square_form, RhsAdjustment};
use crate::math::{abs, exp, ln, sq};
use crate::radial_calculus::{Gauge, LogWeight, RadialProfile};
use crate::tridiagonal::{assemble_form, Coordinate, TridiagonalSystem};
use crate::weight_chains::{FamilyTag, WeightChainSpec};

/// Relative size of the negative margin a verdict needs: tol = 1e−6 times
/// the Gershgorin radius of the potential block.
pub const TOLERANCE_FACTOR: f64 = 1e-6;

/// Relative margin for a witness re-evaluated by quadrature.
pub const WITNESS_TOLERANCE: f64 = 1e-6;

/// Annulus r_in < |x| < r_out, stored as log-radii so that very deep inner
/// radii (log r_in = −10⁵) stay representable.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadialDomain {
    pub log_in: f64,
    pub log_out: f64,
}

impl RadialDomain {
    pub fn new(r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in > 0.0) || !(r_out > r_in) || !r_out.is_finite() {
            return Err(Error::Parameter(format!("domain needs 0 < r_in < r_out < inf, got [{r_in}, {r_out}]")));
        }
        Self::from_log(ln(r_in), ln(r_out))
    }

    pub fn from_log(log_in: f64, log_out: f64) -> Result<Self> {
        if !(log_in < log_out) || !log_in.is_finite() || !log_out.is_finite() {
            return Err(Error::Parameter(format!(
                "domain needs finite log r_in < log r_out, got [{log_in}, {log_out}]"
            )));
        }
        Ok(RadialDomain { log_in, log_out })
    }

    pub fn r_in(&self) -> f64 {
        exp(self.log_in)
    }

    pub fn r_out(&self) -> f64 {
        exp(self.log_out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Verified,
    Falsified,
    Inconclusive,
}

/// Discretization choices shared by every assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Discretization {
    pub coordinate: Coordinate,
    /// Angular index ℓ; adds ℓ(ℓ+d−2)/r² to the potential.
    pub ell: u32,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization {
            coordinate: Coordinate::LogRadius,
            ell: 0,
        }
    }
}

/// One assembled and solved system.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduleStep {
    pub domain: RadialDomain,
    pub nodes: usize,
    pub lambda_min: f64,
    pub tolerance: f64,
}

impl ScheduleStep {
    pub fn is_negative(&self) -> bool {
        self.lambda_min < -self.tolerance
    }
}

/// Eigenvector of a negative step as a grid function of log r. The values
/// are the reduced amplitude w = e^{−G}u, which stays finite where u itself
/// would over- or underflow.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub log_radius: Vec<f64>,
    pub values: Vec<f64>,
    pub gauge: Gauge,
    pub ell: u32,
    /// Functional minus adjusted right-hand side, by adaptive quadrature.
    pub quadratic_form: f64,
    /// The same quantity as square form minus the part of the right-hand
    /// side the seed does not absorb; free of the cancellation between the
    /// Dirichlet and potential terms. None when the family has no square form.
    pub square_route: Option<f64>,
    /// Size of the terms entering the deciding route.
    pub scale: f64,
}

impl Witness {
    pub fn profile(&self) -> Result<RadialProfile> {
        RadialProfile::from_log_grid(self.log_radius.clone(), self.values.clone(), self.gauge, self.ell)
    }

    /// Negative beyond the relative margin on the deciding route, and
    /// negative on the direct definition.
    pub fn is_valid(&self) -> bool {
        let q = self.square_route.unwrap_or(self.quadratic_form);
        self.quadratic_form < 0.0 && q < -WITNESS_TOLERANCE * self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub family: FamilyTag,
    pub n: usize,
    pub adjustment: RhsAdjustment,
    /// Domain of the deciding step (the finest refinement, the first
    /// falsifying schedule step, or the deepest one reached).
    pub domain: RadialDomain,
    pub grid_size: usize,
    pub lambda_min: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub steps: Vec<ScheduleStep>,
    pub witness: Option<Witness>,
}

/// Damping factor of the weighted term in the reduced potential.
fn damping(family: FamilyTag, s: f64) -> f64 {
    match family {
        FamilyTag::HpPlane { .. } | FamilyTag::HpLowDim { .. } => sq(1.0 / (1.0 + exp(-2.0 * s))),
        FamilyTag::HpExterior { .. } => sq(1.0 / (1.0 + exp(2.0 * s))),
        _ => 1.0,
    }
}

/// Gauge G of the ground-state substitution u = e^{G}w.
pub fn reduction_gauge(family: FamilyTag) -> Gauge {
    let d = family.dimension() as f64;
    let k = 0.5 * (d - 2.0);
    match family {
        FamilyTag::HardyInterior { .. } | FamilyTag::HardyExterior { .. } => LogWeight::power(-k),
        FamilyTag::GaussianHighDim { .. } | FamilyTag::GaussianPlane { .. } => LogWeight::new(0.0, -k, 0.25, 0.0),
        FamilyTag::HpPlane { alpha, .. } | FamilyTag::HpLowDim { alpha, .. } => LogWeight::new(0.0, -k, 0.0, -0.5 * alpha),
        FamilyTag::HpExterior { alpha, .. } => LogWeight::new(0.0, alpha - k, 0.0, -0.5 * alpha),
    }
}

/// Reduced potential P(s) and mass density at s.
fn reduced(spec: &WeightChainSpec, n: usize, adj: RhsAdjustment, ell: u32, s: f64) -> (f64, f64) {
    let family = spec.family();
    let d = family.dimension() as f64;
    let l = ell as f64;
    let ang = l * (l + d - 2.0);
    let base = if family.z0() == 1.0 { family.hardy_constant() } else { 0.0 };
    let pre = family.prefactor();
    let rho = damping(family, s);
    let Ok(t) = family.chain_variable_log(s) else {
        return (f64::NAN, f64::NAN);
    };
    let level = spec.level_weight(t, n);
    let mut p = ang + base - pre * rho * (spec.weight_sum(t, n) + adj.inflation * level);
    if adj.quadratic != 0.0 {
        p -= adj.quadratic * exp(4.0 * s);
    }
    if adj.constant != 0.0 {
        p -= adj.constant * exp(2.0 * s);
    }
    (p, pre * rho * level)
}

/// Mesh nodes in log r: uniform in log(a ∓ log r) for the Hardy chains
/// (whose weights live on iterated logarithms), uniform in log r otherwise.
pub fn log_mesh(family: FamilyTag, domain: RadialDomain, nodes: usize) -> Vec<f64> {
    let (a, b) = (domain.log_in, domain.log_out);
    let m = (nodes - 1) as f64;
    let mut out: Vec<f64> = match family {
        FamilyTag::HardyInterior { a: p, .. } => {
            let (y0, y1) = (ln(p - a), ln(p - b));
            (0..nodes).map(|i| p - exp(y0 + (y1 - y0) * i as f64 / m)).collect()
        }
        FamilyTag::HardyExterior { a: p, .. } => {
            let (y0, y1) = (ln(p + a), ln(p + b));
            (0..nodes).map(|i| exp(y0 + (y1 - y0) * i as f64 / m) - p).collect()
        }
        _ => (0..nodes).map(|i| a + (b - a) * i as f64 / m).collect(),
    };
    out[0] = a;
    out[nodes - 1] = b;
    out
}

fn check_domain(spec: &WeightChainSpec, domain: RadialDomain) -> Result<()> {
    let (lo, hi) = spec.radial_domain_log();
    if domain.log_in < lo - 1e-12 || domain.log_out > hi + 1e-12 {
        return Err(Error::Domain(format!(
            "{}: domain log r in [{}, {}] leaves the validity region [{}, {}]",
            spec.family().name(),
            domain.log_in,
            domain.log_out,
            lo,
            hi
        )));
    }
    Ok(())
}

/// Discretize Q_N[u] = functional − adjusted weighted rhs at truncation N
/// on `nodes` mesh points (Dirichlet at both radii).
pub fn assemble(
    spec: &WeightChainSpec,
    n: usize,
    domain: RadialDomain,
    nodes: usize,
    adj: RhsAdjustment,
    disc: Discretization,
) -> Result<TridiagonalSystem> {
    check_domain(spec, domain)?;
    if nodes < 3 {
        return Err(Error::Parameter(format!("need at least 3 mesh nodes, got {nodes}")));
    }
    if n > 63 {
        return Err(Error::Parameter(format!("truncation order must be <= 63, got {n}")));
    }
    let family = spec.family();
    let f = |s: f64| reduced(spec, n, adj, disc.ell, s);
    match disc.coordinate {
        Coordinate::LogRadius => {
            let mesh = log_mesh(family, domain, nodes);
            assemble_form(&mesh, Coordinate::LogRadius, |_| 1.0, |s| f(s).0, |s| f(s).1)
        }
        Coordinate::Linear => {
            let (r0, r1) = (domain.r_in(), domain.r_out());
            if !(r0 > 0.0) || !r1.is_finite() {
                return Err(Error::Domain("linear coordinate needs radii representable in double precision".into()));
            }
            let mesh: Vec<f64> = (0..nodes).map(|i| r0 + (r1 - r0) * i as f64 / (nodes - 1) as f64).collect();
            // ds = dr/r: ∫ w_s² ds = ∫ r w_r² dr, ∫ P w² ds = ∫ (P/r) w² dr.
            assemble_form(&mesh, Coordinate::Linear, |r| r, |r| f(ln(r)).0 / r, |r| f(ln(r)).1 / r)
        }
    }
}

fn step_tolerance(t: &TridiagonalSystem) -> f64 {
    let r = if t.potential_radius > 0.0 {
        t.potential_radius
    } else {
        t.gershgorin_radius()
    };
    TOLERANCE_FACTOR * r
}

/// Outcome of one assembled system, with a re-evaluated witness when the
/// smallest eigenvalue is negative beyond tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub step: ScheduleStep,
    pub witness: Option<Witness>,
}

/// Assemble, solve and (when negative) re-validate one schedule step.
pub fn run_step(
    spec: &WeightChainSpec,
    n: usize,
    domain: RadialDomain,
    nodes: usize,
    adj: RhsAdjustment,
    disc: Discretization,
) -> Result<StepOutcome> {
    let t = assemble(spec, n, domain, nodes, adj, disc)?;
    let lambda = t.lambda_min();
    let step = ScheduleStep {
        domain,
        nodes,
        lambda_min: lambda,
        tolerance: step_tolerance(&t),
    };
    let witness = if step.is_negative() {
        Some(witness(spec, n, adj, disc, &t, lambda)?)
    } else {
        None
    };
    Ok(StepOutcome { step, witness })
}

fn witness(
    spec: &WeightChainSpec,
    n: usize,
    adj: RhsAdjustment,
    disc: Discretization,
    t: &TridiagonalSystem,
    lambda: f64,
) -> Result<Witness> {
    let x = t.eigenvector(lambda);
    let mut values = t.nodal_values(&x);
    let log_radius: Vec<f64> = match t.coordinate {
        Coordinate::LogRadius => t.nodes.clone(),
        Coordinate::Linear => t.nodes.iter().map(|r| ln(*r)).collect(),
    };
    let peak = values.iter().fold(0.0f64, |m, v| m.max(abs(*v)));
    if peak > 0.0 {
        values.iter_mut().for_each(|v| *v /= peak);
    }
    let mut w = Witness {
        log_radius,
        values,
        gauge: reduction_gauge(spec.family()),
        ell: disc.ell,
        quadratic_form: 0.0,
        square_route: None,
        scale: 0.0,
    };
    let u = w.profile()?;
    let v = evaluate(&u, spec, n, adj)?;
    w.quadratic_form = v.total - v.rhs;
    w.scale = abs(v.dirichlet) + v.potentials.iter().map(|p| abs(p.1)).sum::<f64>() + abs(v.rhs);
    match square_form(&u, spec, n) {
        Ok(sq) => {
            let rest = v.rhs - seeded_rhs(&u, spec, n)?;
            w.square_route = Some(sq - rest);
            w.scale = abs(sq) + abs(rest);
        }
        Err(Error::Parameter(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(w)
}

/// Check Q_N ≥ 0 on a fixed domain over a refinement schedule (node counts).
/// Verified when every refinement has λ_min ≥ −tol, falsified when every
/// refinement is negative and the finest witness re-validates, inconclusive
/// otherwise.
pub fn verify_inequality(
    spec: &WeightChainSpec,
    n: usize,
    domain: RadialDomain,
    schedule: &[usize],
    adj: RhsAdjustment,
    disc: Discretization,
) -> Result<VerificationReport> {
    if schedule.len() < 3 {
        return Err(Error::Parameter(format!(
            "refinement schedule needs at least 3 entries, got {}",
            schedule.len()
        )));
    }
    let mut outcomes = Vec::with_capacity(schedule.len());
    for &nodes in schedule {
        outcomes.push(run_step(spec, n, domain, nodes, adj, disc)?);
    }
    Ok(refinement_report(spec.family(), n, adj, outcomes))
}

/// Merge refinement outcomes (in schedule order) into a report.
pub fn refinement_report(family: FamilyTag, n: usize, adj: RhsAdjustment, outcomes: Vec<StepOutcome>) -> VerificationReport {
    let negative = outcomes.iter().filter(|o| o.step.is_negative()).count();
    let mut outcomes = outcomes;
    let last = outcomes.pop().expect("non-empty schedule");
    let mut steps: Vec<ScheduleStep> = outcomes.into_iter().map(|o| o.step).collect();
    let total = steps.len() + 1;
    let verdict = if negative == 0 {
        Verdict::Verified
    } else if negative == total && last.witness.as_ref().is_some_and(|w| w.is_valid()) {
        Verdict::Falsified
    } else {
        Verdict::Inconclusive
    };
    let witness = if verdict == Verdict::Falsified { last.witness } else { None };
    let fin = last.step.clone();
    steps.push(last.step);
    VerificationReport {
        family,
        n,
        adjustment: adj,
        domain: fin.domain,
        grid_size: fin.nodes,
        lambda_min: fin.lambda_min,
        tolerance: fin.tolerance,
        verdict,
        steps,
        witness,
    }
}

/// Domain schedule toward the singular limit of the family: inner radius
/// down to log r = −10⁵ for the interior Hardy chain, outer radius up to 10³
/// otherwise (the exterior chains mirror this).
pub fn default_schedule(spec: &WeightChainSpec) -> Vec<RadialDomain> {
    let (lo, hi) = spec.radial_domain_log();
    let family = spec.family();
    let mk = |a: f64, b: f64| RadialDomain { log_in: a, log_out: b };
    match family {
        FamilyTag::HardyInterior { .. } => [-10.0, -100.0, -1e3, -1e4, -1e5].iter().map(|&a| mk(a, hi)).collect(),
        FamilyTag::HardyExterior { .. } => [10.0, 100.0, 1e3, 1e4, 1e5].iter().map(|&b| mk(lo, b)).collect(),
        FamilyTag::GaussianHighDim { .. } => [3.0, 10.0, 30.0, 100.0, 300.0, 1000.0]
            .iter()
            .map(|&r: &f64| mk(ln(1e-3), ln(r)))
            .collect(),
        FamilyTag::GaussianPlane { .. } | FamilyTag::HpPlane { .. } | FamilyTag::HpLowDim { .. } => {
            let start = if lo.is_finite() { lo.max(ln(0.5)) + 0.05 } else { ln(0.5) };
            [10.0, 30.0, 100.0, 300.0, 1000.0].iter().map(|&r: &f64| mk(start, ln(r))).collect()
        }
        FamilyTag::HpExterior { .. } => [10.0, 30.0, 100.0, 300.0, 1000.0]
            .iter()
            .map(|&r: &f64| mk(-ln(r), hi))
            .collect(),
    }
}

/// Walk a domain schedule at a fixed node count; the first step with a
/// re-validated negative witness falsifies.
pub fn falsify_inflation(
    spec: &WeightChainSpec,
    n: usize,
    adj: RhsAdjustment,
    schedule: &[RadialDomain],
    nodes: usize,
    disc: Discretization,
) -> Result<VerificationReport> {
    if schedule.is_empty() {
        return Err(Error::Parameter("falsification schedule is empty".into()));
    }
    if adj.inflation < 0.0 || adj.quadratic < 0.0 || adj.constant < 0.0 {
        return Err(Error::Parameter("inflation and extra terms must be nonnegative".into()));
    }
    let mut outcomes = Vec::with_capacity(schedule.len());
    for &domain in schedule {
        let o = run_step(spec, n, domain, nodes, adj, disc)?;
        let done = o.witness.as_ref().is_some_and(|w| w.is_valid());
        outcomes.push(o);
        if done {
            break;
        }
    }
    Ok(falsification_report(spec.family(), n, adj, outcomes))
}

/// Merge schedule outcomes (in schedule order): the first re-validated
/// negative step wins; otherwise inconclusive at the deepest step.
pub fn falsification_report(family: FamilyTag, n: usize, adj: RhsAdjustment, outcomes: Vec<StepOutcome>) -> VerificationReport {
    let hit = outcomes.iter().position(|o| o.witness.as_ref().is_some_and(|w| w.is_valid()));
    let mut outcomes = outcomes;
    let (verdict, decisive) = match hit {
        Some(i) => {
            outcomes.truncate(i + 1);
            (Verdict::Falsified, i)
        }
        None => (Verdict::Inconclusive, outcomes.len() - 1),
    };
    let witness = if verdict == Verdict::Falsified {
        outcomes[decisive].witness.take()
    } else {
        None
    };
    let steps: Vec<ScheduleStep> = outcomes.into_iter().map(|o| o.step).collect();
    let fin = steps[decisive].clone();
    VerificationReport {
        family,
        n,
        adjustment: adj,
        domain: fin.domain,
        grid_size: fin.nodes,
        lambda_min: fin.lambda_min,
        tolerance: fin.tolerance,
        verdict,
        steps,
        witness,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProbeStatus {
    Converged,
    Inconclusive,
}

/// Ratio (W − Σ_{j<N} W_j)/C_N of a candidate weight to the level-N
/// comparison weight, sampled toward t → 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RemainderProbe {
    pub family: FamilyTag,
    pub level: usize,
    /// (t, ratio) exactly as sampled.
    pub samples: Vec<(f64, f64)>,
    pub limit: Option<f64>,
    pub uncertainty: Option<f64>,
    /// Largest limit compatible with optimality at this level.
    pub threshold: f64,
    pub exceeds_optimal: bool,
    pub status: ProbeStatus,
}

/// Geometric t-grid of 25 points from ½min(1, t_hi) toward 1e−13. The grid
/// stops earlier (but spans at least 3 decades) where the level weight drops
/// below 1e−7 of the lower-order sum, since the ratio is no longer resolved in
/// double precision there.
pub fn default_probe_grid(spec: &WeightChainSpec, level: usize) -> Vec<f64> {
    let (_, hi) = spec.validity();
    let top = 0.5 * hi.min(1.0);
    let (a, mut b) = (ln(top), ln(1e-13));
    if level > 0 {
        let steps = 400;
        for i in 1..=steps {
            let s = a + (b - a) * i as f64 / steps as f64;
            let t = exp(s);
            let lower = spec.weight_sum(t, level - 1);
            if spec.level_weight(t, level) < 1e-7 * lower.max(1e-300) {
                b = (a + (b - a) * (i - 1) as f64 / steps as f64).min(a - ln(1e3) - 0.1);
                break;
            }
        }
    }
    (0..25).map(|i| exp(a + (b - a) * i as f64 / 24.0)).collect()
}

/// Probe the remainder ratio of `candidate` at `level` on `t_grid` and
/// extrapolate with Aitken's Δ² on the last three samples.
pub fn remainder_probe<W: Fn(f64) -> f64>(
    spec: &WeightChainSpec,
    candidate: W,
    level: usize,
    t_grid: &[f64],
) -> Result<RemainderProbe> {
    if t_grid.len() < 5 {
        return Err(Error::Precondition(format!("probe needs at least 5 samples, got {}", t_grid.len())));
    }
    let (tmin, tmax) = t_grid.iter().fold((f64::INFINITY, 0.0f64), |(a, b), t| (a.min(*t), b.max(*t)));
    if !(tmax / tmin >= 1e3) {
        return Err(Error::Precondition(format!(
            "probe samples must span 3 decades of t, got [{tmin:e}, {tmax:e}]"
        )));
    }
    if level > 63 {
        return Err(Error::Parameter(format!("level must be <= 63, got {level}")));
    }
    let family = spec.family();
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !spec.contains(t) {
            return Err(Error::Domain(format!("{}: probe point t={t} outside the validity interval", family.name())));
        }
        let lower = if level == 0 { 0.0 } else { spec.weight_sum(t, level - 1) };
        samples.push((t, (candidate(t) - lower) / spec.level_weight(t, level)));
    }
    let threshold = if level == 0 && family.z0() == 0.0 { 0.0 } else { 1.0 };
    let k = samples.len();
    let (x0, x1, x2) = (samples[k - 3].1, samples[k - 2].1, samples[k - 1].1);
    let (d1, d2) = (x1 - x0, x2 - x1);
    let mut status = ProbeStatus::Converged;
    let (limit, uncertainty) = if !(x0.is_finite() && x1.is_finite() && x2.is_finite()) {
        status = ProbeStatus::Inconclusive;
        (None, None)
    } else if abs(d1).max(abs(d2)) <= 1e-8 * abs(x2).max(1.0) {
        // Differences at rounding level: the sequence has settled.
        (Some(x2), Some(abs(d1).max(abs(d2))))
    } else {
        let q = d2 / d1;
        if abs(q) >= 1.0 {
            status = ProbeStatus::Inconclusive;
            (None, None)
        } else {
            let l = x2 - d2 * d2 / (d2 - d1);
            (Some(l), Some(abs(l - x2)))
        }
    };
    let exceeds = match (limit, uncertainty) {
        (Some(l), Some(u)) => l > threshold + u + 1e-12 * abs(threshold).max(1.0),
        _ => false,
    };
    Ok(RemainderProbe {
        family,
        level,
        samples,
        limit,
        uncertainty,
        threshold,
        exceeds_optimal: exceeds,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_endpoints_and_order() {
        let f = FamilyTag::HardyInterior { d: 3, a: 1.0 };
        let dom = RadialDomain::new(1e-6, 1.0).unwrap();
        let m = log_mesh(f, dom, 50);
        assert_eq!(m[0], dom.log_in);
        assert_eq!(m[49], dom.log_out);
        assert!(m.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn zero_inflation_is_identity() {
        let spec = WeightChainSpec::new(FamilyTag::GaussianHighDim { d: 3 }, 4).unwrap();
        let dom = RadialDomain::new(0.1, 25.0).unwrap();
        let a = assemble(&spec, 2, dom, 300, RhsAdjustment::default(), Discretization::default()).unwrap();
        let b = assemble(&spec, 2, dom, 300, RhsAdjustment::inflation(0.0), Discretization::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn domain_outside_validity() {
        let spec = WeightChainSpec::new(FamilyTag::HardyInterior { d: 3, a: 1.0 }, 3).unwrap();
        let dom = RadialDomain::new(1e-3, 2.0).unwrap();
        let r = assemble(&spec, 1, dom, 100, RhsAdjustment::default(), Discretization::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn probe_of_partial_sum_is_one() {
        let spec = WeightChainSpec::new(FamilyTag::GaussianHighDim { d: 3 }, 4).unwrap();
        for k in 0..=3 {
            let grid = default_probe_grid(&spec, k);
            let p = remainder_probe(&spec, |t| spec.weight_sum(t, k), k, &grid).unwrap();
            assert!(abs(p.limit.unwrap() - 1.0) < 1e-3, "k={k}: {:?}", p.limit);
            assert!(!p.exceeds_optimal);
        }
        let z = remainder_probe(&spec, |_| 0.0, 0, &default_probe_grid(&spec, 0)).unwrap();
        assert_eq!(z.limit, Some(0.0));
    }

    #[test]
    fn probe_needs_enough_samples() {
        let spec = WeightChainSpec::new(FamilyTag::GaussianHighDim { d: 3 }, 4).unwrap();
        let r = remainder_probe(&spec, |_| 0.0, 1, &[0.1, 0.05, 0.01]);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let r = remainder_probe(&spec, |_| 0.0, 1, &[0.1, 0.09, 0.08, 0.07, 0.06]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
