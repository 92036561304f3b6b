//! The quadratic functionals H, G, I, J, their weighted right-hand sides and
//! expansion-of-the-square forms, the constant Λ_{α,d} and the Mouhot ratio.
//!
//! Integrals run in s = log r through [`RadialProfile::integrate_quadratic`].
//! With u = e^G w, a Dirichlet term is σ∫(u_s² + L u²) r^{d−2} ρ ds and a
//! potential term ∫V u² ρ dx is σ∫(V r²) u² r^{d−2} ρ ds, where L = ℓ(ℓ+d−2).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, exp, ln, sq};
use crate::quadrature::Tolerance;
use crate::radial_calculus::{integrate_line, LogWeight, MeasureSpec, RadialProfile};
use crate::special::{hp_exterior_radius, sphere_area};
use crate::weight_chains::{FamilyTag, WeightChainSpec};

const TOL: Tolerance = Tolerance {
    abs: 0.0,
    rel: 1e-12,
    max_subintervals: 4000,
};

/// A functional split into its Dirichlet part and named potential terms.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FunctionalValue {
    pub dirichlet: f64,
    pub potentials: Vec<(String, f64)>,
    pub total: f64,
    /// Weighted right-hand side at the requested truncation (0 if not evaluated).
    pub rhs: f64,
    /// Expansion-of-the-square cross-check, when the functional has one.
    pub square_form: Option<f64>,
    /// Sum of quadrature error estimates.
    pub abs_error: f64,
}

impl FunctionalValue {
    fn new(dirichlet: f64, potentials: Vec<(String, f64)>, abs_error: f64) -> Self {
        let total = dirichlet + potentials.iter().map(|p| p.1).sum::<f64>();
        FunctionalValue {
            dirichlet,
            potentials,
            total,
            rhs: 0.0,
            square_form: None,
            abs_error,
        }
    }

    pub fn potential(&self, name: &str) -> Option<f64> {
        self.potentials.iter().find(|p| p.0 == name).map(|p| p.1)
    }

    /// 1e−8 (|dirichlet| + Σ|potential|).
    pub fn tolerance(&self) -> f64 {
        1e-8 * (abs(self.dirichlet) + self.potentials.iter().map(|p| abs(p.1)).sum::<f64>())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.total >= -self.tolerance()
    }

    /// total − rhs.
    pub fn remainder(&self) -> f64 {
        self.total - self.rhs
    }
}

/// Accumulates quadratures of one profile against σ r^{d−2} × extra weight.
struct Terms<'a> {
    u: &'a RadialProfile,
    base: LogWeight,
    err: f64,
}

impl<'a> Terms<'a> {
    fn new(u: &'a RadialProfile, d: u32) -> Self {
        Terms {
            u,
            base: LogWeight::new(ln(sphere_area(d)), d as f64 - 2.0, 0.0, 0.0),
            err: 0.0,
        }
    }

    fn ang(&self, d: u32) -> f64 {
        let l = self.u.ell as f64;
        l * (l + d as f64 - 2.0)
    }

    /// ∫|∇u|² against the weight e^{extra}.
    fn dirichlet(&mut self, d: u32, extra: LogWeight) -> Result<f64> {
        let ang = self.ang(d);
        self.quad(extra, |_, w, du| sq(du) + ang * sq(w))
    }

    /// ∫ u² (V r²) with V r² = f(s) e^{extra}.
    fn potential<F: Fn(f64) -> f64>(&mut self, extra: LogWeight, f: F) -> Result<f64> {
        self.quad(extra, |s, w, _| if w == 0.0 { 0.0 } else { f(s) * w * w })
    }

    /// ∫ |∇u + (φ/r) u e_r|² against e^{extra}, i.e. (u_s + φ u)² + L u² in s.
    fn square<F: Fn(f64) -> f64>(&mut self, d: u32, extra: LogWeight, phi: F) -> Result<f64> {
        let ang = self.ang(d);
        self.quad(extra, |s, w, du| sq(du + phi(s) * w) + ang * sq(w))
    }

    fn quad<Q: Fn(f64, f64, f64) -> f64>(&mut self, extra: LogWeight, q: Q) -> Result<f64> {
        let r = self.u.integrate_quadratic(self.base.plus(extra), q, TOL)?;
        self.err += r.abs_error_estimate;
        Ok(r.value)
    }
}

fn require_dimension(d: u32, min: u32, what: &str) -> Result<()> {
    if d < min {
        return Err(Error::Parameter(format!("{what} needs d >= {min}, got d={d}")));
    }
    Ok(())
}

fn gaussian_weight(d: u32) -> LogWeight {
    MeasureSpec::gaussian(d).point_weight()
}

/// H[u] = ∫|∇u|² − ¼(d−2)² ∫u²/|x|².
pub fn hardy_functional(u: &RadialProfile, d: u32) -> Result<FunctionalValue> {
    require_dimension(d, 3, "Hardy functional")?;
    let k2 = 0.25 * sq(d as f64 - 2.0);
    let mut t = Terms::new(u, d);
    let dir = t.dirichlet(d, LogWeight::ZERO)?;
    let pot = t.potential(LogWeight::ZERO, |_| 1.0)?;
    Ok(FunctionalValue::new(dir, alloc::vec![("hardy".into(), -k2 * pot)], t.err))
}

/// G[u] = ∫|∇u|²dμ + (d/2)∫u²dμ − ¼∫|x|²u²dμ, with the square form
/// (2π)^{−d/2}∫|∇(u e^{−|x|²/4})|² attached.
pub fn gaussian_functional(u: &RadialProfile, d: u32) -> Result<FunctionalValue> {
    require_dimension(d, 1, "gaussian functional")?;
    let g = gaussian_weight(d);
    let mut t = Terms::new(u, d);
    let dir = t.dirichlet(d, g)?;
    let mass = t.potential(g.plus(LogWeight::power(2.0)), |_| 1.0)?;
    let moment = t.potential(g.plus(LogWeight::power(4.0)), |_| 1.0)?;
    let square = t.square(d, g, |s| -0.5 * exp(2.0 * s))?;
    let mut v = FunctionalValue::new(
        dir,
        alloc::vec![("mass".into(), 0.5 * d as f64 * mass), ("moment".into(), -0.25 * moment)],
        t.err,
    );
    v.square_form = Some(square);
    Ok(v)
}

/// I[u] = ∫|∇u|²dμ_α + α(2−α)∫|x|²(1+|x|²)^{−2}u²dμ_α − αd∫u²dμ_{α−1}.
pub fn hp_functional(u: &RadialProfile, d: u32, alpha: f64) -> Result<FunctionalValue> {
    require_dimension(d, 2, "Hardy-Poincare functional")?;
    if !(alpha < 0.0) {
        return Err(Error::Parameter(format!("Hardy-Poincare functional needs alpha < 0, got {alpha}")));
    }
    let mut t = Terms::new(u, d);
    let dir = t.dirichlet(d, LogWeight::new(0.0, 0.0, 0.0, alpha))?;
    let curv = t.potential(LogWeight::new(0.0, 4.0, 0.0, alpha - 2.0), |_| 1.0)?;
    let mass = t.potential(LogWeight::new(0.0, 2.0, 0.0, alpha - 1.0), |_| 1.0)?;
    Ok(FunctionalValue::new(
        dir,
        alloc::vec![
            ("curvature".into(), alpha * (2.0 - alpha) * curv),
            ("mass".into(), -alpha * d as f64 * mass),
        ],
        t.err,
    ))
}

/// J[u] = ∫|∇u|²|x|^{−2α}dμ_α + α(d−4)∫u²|x|^{−2(α+1)}dμ_{α−1}
/// + α(2−α)∫u²|x|^{−2(α+1)}dμ_{α−2}, for u supported in B_{1/R}.
pub fn hp_exterior_functional(u: &RadialProfile, d: u32, alpha: f64) -> Result<FunctionalValue> {
    require_dimension(d, 5, "exterior Hardy-Poincare functional")?;
    if !(alpha < 0.0) {
        return Err(Error::Parameter(format!("exterior functional needs alpha < 0, got {alpha}")));
    }
    let limit = -ln(hp_exterior_radius(d)?);
    if u.support_log.1 > limit + 1e-12 {
        return Err(Error::Domain(format!(
            "exterior functional: support must lie in |x| <= 1/R = {}, got outer radius {}",
            exp(limit),
            exp(u.support_log.1)
        )));
    }
    let mut t = Terms::new(u, d);
    let dir = t.dirichlet(d, LogWeight::new(0.0, -2.0 * alpha, 0.0, alpha))?;
    let a = t.potential(LogWeight::new(0.0, -2.0 * alpha, 0.0, alpha - 1.0), |_| 1.0)?;
    let b = t.potential(LogWeight::new(0.0, -2.0 * alpha, 0.0, alpha - 2.0), |_| 1.0)?;
    Ok(FunctionalValue::new(
        dir,
        alloc::vec![
            ("mass".into(), alpha * (d as f64 - 4.0) * a),
            ("curvature".into(), alpha * (2.0 - alpha) * b),
        ],
        t.err,
    ))
}

/// Left-hand functional of a family: H for Hardy, G for gaussian, I for
/// Hardy–Poincaré, J for the exterior Hardy–Poincaré chain.
pub fn family_functional(u: &RadialProfile, family: FamilyTag) -> Result<FunctionalValue> {
    let d = family.dimension();
    match family {
        FamilyTag::HardyInterior { .. } | FamilyTag::HardyExterior { .. } => hardy_functional(u, d),
        FamilyTag::GaussianHighDim { .. } | FamilyTag::GaussianPlane { .. } => gaussian_functional(u, d),
        FamilyTag::HpPlane { alpha, .. } | FamilyTag::HpLowDim { alpha, .. } => hp_functional(u, d, alpha),
        FamilyTag::HpExterior { alpha, .. } => hp_exterior_functional(u, d, alpha),
    }
}

/// Modifications of the right-hand side used to probe optimality.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RhsAdjustment {
    /// ε: adds ε times the level-N comparison weight (W_N scaled by 1+ε).
    pub inflation: f64,
    /// ℓ₋₂: adds ℓ₋₂∫|x|²u²dμ (gaussian families only).
    pub quadratic: f64,
    /// ℓ₋₁: adds ℓ₋₁∫u²dμ (gaussian families only).
    pub constant: f64,
}

impl RhsAdjustment {
    pub fn inflation(eps: f64) -> Self {
        RhsAdjustment {
            inflation: eps,
            ..Default::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.inflation == 0.0 && self.quadratic == 0.0 && self.constant == 0.0
    }
}

/// Weight of the right-hand side relative to σ r^{d−2} ds, without Σ W.
fn rhs_weight(family: FamilyTag) -> LogWeight {
    let d = family.dimension();
    match family {
        FamilyTag::HardyInterior { .. } | FamilyTag::HardyExterior { .. } => LogWeight::ZERO,
        FamilyTag::GaussianHighDim { .. } | FamilyTag::GaussianPlane { .. } => gaussian_weight(d),
        FamilyTag::HpPlane { alpha, .. } | FamilyTag::HpLowDim { alpha, .. } => LogWeight::new(0.0, 4.0, 0.0, alpha - 2.0),
        FamilyTag::HpExterior { alpha, .. } => LogWeight::new(0.0, -2.0 * alpha, 0.0, alpha - 2.0),
    }
}

fn check_support(u: &RadialProfile, spec: &WeightChainSpec) -> Result<()> {
    let (lo, hi) = spec.radial_domain_log();
    let (a, b) = u.support_log;
    if a < lo - 1e-9 || b > hi + 1e-9 {
        return Err(Error::Domain(format!(
            "{}: profile support [{:e}, {:e}] leaves the region [{:e}, {:e}] where the weights are valid",
            spec.family().name(),
            exp(a),
            exp(b),
            exp(lo),
            exp(hi)
        )));
    }
    Ok(())
}

/// Weighted right-hand side prefactor·∫(Σ_{k≤N} W_k) u² (family weight) at truncation N.
pub fn weighted_rhs(u: &RadialProfile, spec: &WeightChainSpec, n: usize) -> Result<f64> {
    adjusted_rhs(u, spec, n, RhsAdjustment::default())
}

/// [`weighted_rhs`] plus the optimality-probing adjustments.
pub fn adjusted_rhs(u: &RadialProfile, spec: &WeightChainSpec, n: usize, adj: RhsAdjustment) -> Result<f64> {
    check_support(u, spec)?;
    let family = spec.family();
    let d = family.dimension();
    let pre = family.prefactor();
    let mut t = Terms::new(u, d);
    let eps = adj.inflation;
    let mut total = t.potential(rhs_weight(family), |s| {
        let Ok(tv) = family.chain_variable_log(s) else {
            return 0.0;
        };
        let mut w = spec.weight_sum(tv, n);
        if eps != 0.0 {
            w += eps * spec.level_weight(tv, n);
        }
        pre * w
    })?;
    if adj.quadratic != 0.0 || adj.constant != 0.0 {
        if !family.is_gaussian() {
            return Err(Error::Parameter(format!(
                "order |x|^2 and constant terms apply to gaussian families, not {}",
                family.name()
            )));
        }
        let g = gaussian_weight(d);
        if adj.quadratic != 0.0 {
            total += adj.quadratic * t.potential(g.plus(LogWeight::power(4.0)), |_| 1.0)?;
        }
        if adj.constant != 0.0 {
            total += adj.constant * t.potential(g.plus(LogWeight::power(2.0)), |_| 1.0)?;
        }
    }
    Ok(total)
}

/// Left-hand functional with the (adjusted) right-hand side filled in.
pub fn evaluate(u: &RadialProfile, spec: &WeightChainSpec, n: usize, adj: RhsAdjustment) -> Result<FunctionalValue> {
    let mut v = family_functional(u, spec.family())?;
    v.rhs = adjusted_rhs(u, spec, n, adj)?;
    Ok(v)
}

/// Expansion of the square with the depth-k extremal seed:
/// Hardy ∫|∇u + (k_d + g) u x/|x|²|², gaussian ∫|∇u + (h/|x|² − ½) u x|²dμ,
/// Hardy–Poincaré ∫|∇u + (h+α)/(1+|x|²) u x|²dμ_α. It equals the functional
/// minus Σ_{1≤j≤k} of the weighted terms.
pub fn square_form(u: &RadialProfile, spec: &WeightChainSpec, k: usize) -> Result<f64> {
    check_support(u, spec)?;
    let family = spec.family();
    let d = family.dimension();
    let mut t = Terms::new(u, d);
    let seed = |s: f64| spec.seed_shift(s, k).unwrap_or(0.0);
    match family {
        FamilyTag::HardyInterior { .. } | FamilyTag::HardyExterior { .. } => {
            let kd = 0.5 * (d as f64 - 2.0);
            t.square(d, LogWeight::ZERO, |s| kd + seed(s))
        }
        FamilyTag::GaussianHighDim { .. } | FamilyTag::GaussianPlane { .. } => {
            t.square(d, gaussian_weight(d), |s| seed(s) - 0.5 * exp(2.0 * s))
        }
        FamilyTag::HpPlane { alpha, .. } | FamilyTag::HpLowDim { alpha, .. } => {
            t.square(d, LogWeight::new(0.0, 0.0, 0.0, alpha), |s| {
                let q = 1.0 / (1.0 + exp(-2.0 * s));
                (seed(s) + alpha) * q
            })
        }
        FamilyTag::HpExterior { .. } => Err(Error::Parameter(
            "the exterior chain is checked through Kelvin duality, not a square form".into(),
        )),
    }
}

/// Prefactor·∫Σ_{1≤j≤k} W_j u² (family weight): the part of the right-hand side
/// produced by the depth-k seed.
pub fn seeded_rhs(u: &RadialProfile, spec: &WeightChainSpec, k: usize) -> Result<f64> {
    let full = weighted_rhs(u, spec, k)?;
    let z0 = spec.family().z0();
    if z0 == 0.0 {
        return Ok(full);
    }
    Ok(full - weighted_rhs(u, spec, 0)?)
}

/// Value of Λ_{α,d}, or the tag for α = −(d−2)/2 where the inequality fails.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LambdaConstant {
    Value(f64),
    InequalityFails,
}

/// Optimal constant Λ_{α,d} of the Hardy–Poincaré inequality:
/// −2α on (−∞, −d], −2(d+2α) on (−d, −(d+2)/2], ¼(d−2+2α)² on (−(d+2)/2, 0).
/// At the two regime boundaries the formulas agree; the left one is used.
pub fn lambda_constant(alpha: f64, d: u32) -> Result<LambdaConstant> {
    if d < 2 {
        return Err(Error::Parameter(format!("lambda needs d >= 2, got d={d}")));
    }
    if !(alpha < 0.0) || !alpha.is_finite() {
        return Err(Error::Parameter(format!("lambda needs finite alpha < 0, got {alpha}")));
    }
    let df = d as f64;
    if alpha == -(df - 2.0) / 2.0 {
        return Ok(LambdaConstant::InequalityFails);
    }
    let v = if alpha <= -df {
        -2.0 * alpha
    } else if alpha <= -(df + 2.0) / 2.0 {
        -2.0 * (df + 2.0 * alpha)
    } else {
        0.25 * sq(df - 2.0 + 2.0 * alpha)
    };
    Ok(LambdaConstant::Value(v))
}

/// ∫|x|²u²dμ / ∫|∇u|²dμ for the gaussian measure. Profiles with ℓ = 0 must
/// have zero mean (relative 1e−10), otherwise this is a precondition error.
pub fn mouhot_ratio(u: &RadialProfile, d: u32) -> Result<f64> {
    require_dimension(d, 1, "Mouhot ratio")?;
    if u.ell == 0 {
        let (mean, norm) = gaussian_mean(u, d)?;
        if abs(mean) > 1e-10 * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::Precondition(format!(
                "Mouhot ratio needs a mean-zero profile for l = 0 (mean {mean:e}); use mouhot_ratio_centered"
            )));
        }
    }
    let g = gaussian_weight(d);
    let mut t = Terms::new(u, d);
    let num = t.potential(g.plus(LogWeight::power(4.0)), |_| 1.0)?;
    let den = t.dirichlet(d, g)?;
    if !(den > 0.0) {
        return Err(Error::Precondition("Mouhot ratio needs a non-constant profile".into()));
    }
    Ok(num / den)
}

/// (∫u dμ, (∫u²dμ)^{1/2}) for the radial part.
fn gaussian_mean(u: &RadialProfile, d: u32) -> Result<(f64, f64)> {
    let lw = MeasureSpec::gaussian(d).line_weight();
    let mut mean = 0.0;
    let mut norm2 = 0.0;
    for pair in u.breakpoints().windows(2) {
        mean += integrate_line(
            |s| {
                let (w, _) = u.reduced(s);
                if w == 0.0 {
                    0.0
                } else {
                    w * exp(u.gauge.eval(s) + lw.eval(s))
                }
            },
            pair[0],
            pair[1],
            Tolerance::new(1e-300, 1e-13),
        )?
        .value;
        norm2 += integrate_line(
            |s| {
                let (w, _) = u.reduced(s);
                if w == 0.0 {
                    0.0
                } else {
                    w * w * exp(2.0 * u.gauge.eval(s) + lw.eval(s))
                }
            },
            pair[0],
            pair[1],
            Tolerance::new(1e-300, 1e-13),
        )?
        .value;
    }
    Ok((mean, libm::sqrt(norm2)))
}

/// Mouhot ratio of u − ū (the mean-zero normalization for ℓ = 0 profiles).
pub fn mouhot_ratio_centered(u: &RadialProfile, d: u32) -> Result<f64> {
    if u.ell != 0 {
        return mouhot_ratio(u, d);
    }
    let (mean, _) = gaussian_mean(u, d)?;
    let lw = MeasureSpec::gaussian(d).line_weight();
    let g = gaussian_weight(d);
    let mut t = Terms::new(u, d);
    let den = t.dirichlet(d, g)?;
    if !(den > 0.0) {
        return Err(Error::Precondition("Mouhot ratio needs a non-constant profile".into()));
    }
    // ∫ r²(u − ū)² dμ = ∫ r²u² − 2ū∫ r²u + ū² ∫ r².
    let r2u2 = t.potential(g.plus(LogWeight::power(4.0)), |_| 1.0)?;
    let mut r2u = 0.0;
    for pair in u.breakpoints().windows(2) {
        r2u += integrate_line(
            |s| {
                let (w, _) = u.reduced(s);
                if w == 0.0 {
                    0.0
                } else {
                    w * exp(u.gauge.eval(s) + lw.eval(s) + 2.0 * s)
                }
            },
            pair[0],
            pair[1],
            Tolerance::new(1e-300, 1e-13),
        )?
        .value;
    }
    let r2 = d as f64;
    Ok((r2u2 - 2.0 * mean * r2u + mean * mean * r2) / den)
}
