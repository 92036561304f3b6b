//! Iterated-map weight sequences X_k, Y_k, Z_k, W_k for every inequality family.
//!
//! All families share one recursion:
//!
//! ```text
//! X_0 = t,  X_{k+1} = X(X_k)
//! Y_0 = 1,  Y_{k+1} = δ(X_k)²
//! Z_0 ∈ {0, 1},  Z_{k+1} = γ(X_k)
//! W_0 = Z_0,  W_k = (Y_1 ⋯ Y_{k-1}) Z_k
//! ```
//!
//! and differ only in the maps X, δ, γ and in the chain variable t(r).
//! The Hardy family fits this with δ(t) = t and γ(t) = t²/4, which gives
//! W_k = ¼ X_0² ⋯ X_{k-1}².

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, exp, ln, log1p, pow, sq, sqrt};
use crate::quadrature::gauss_legendre10;
use crate::special::{
    fixed_point_tstar, hardy_domain_radius, hp_kappa, nu_derivative, nu_in_root, nu_in_root_derivative,
    root_power, root_variable, zeta,
};
use crate::tabulate::HermiteTable;

/// Upper end of the open interval 1/2 < β ≤ 1 − e^{-2}.
pub fn beta_max() -> f64 {
    1.0 - exp(-2.0)
}

/// Inequality family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum FamilyTag {
    /// Hardy inequality on a ball, singular at the origin.
    HardyInterior { d: u32, a: f64 },
    /// Kelvin image of [`FamilyTag::HardyInterior`]: exterior of a ball, singular at infinity.
    HardyExterior { d: u32, a: f64 },
    /// Gaussian Poincaré inequality, d ≥ 3.
    GaussianHighDim { d: u32 },
    /// Gaussian Poincaré inequality in the plane, supports outside e^{1/t*}.
    GaussianPlane { a: f64 },
    /// Hardy–Poincaré inequality in the plane.
    HpPlane { alpha: f64, beta: f64, t_star: f64 },
    /// Hardy–Poincaré inequality on R^3 or R^4.
    HpLowDim { d: u32, alpha: f64 },
    /// Hardy–Poincaré inequality for d ≥ 5 on the ball B_{1/R} (Kelvin image of an exterior domain).
    HpExterior { d: u32, alpha: f64 },
}

impl FamilyTag {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: alloc::string::String| Err(Error::Parameter(m));
        match *self {
            FamilyTag::HardyInterior { d, a } | FamilyTag::HardyExterior { d, a } => {
                if d < 3 {
                    return bad(format!("{}: requires d >= 3, got d={d}", self.name()));
                }
                if !(a >= 1.0) || !a.is_finite() {
                    return bad(format!("{}: requires a >= 1, got a={a}", self.name()));
                }
            }
            FamilyTag::GaussianHighDim { d } => {
                if d < 3 {
                    return bad(format!("gaussian: requires d >= 3, got d={d}"));
                }
            }
            FamilyTag::GaussianPlane { a } => {
                if !(a > 1.0) || !a.is_finite() {
                    return bad(format!("gaussian-plane: requires a > 1, got a={a}"));
                }
            }
            FamilyTag::HpPlane { alpha, beta, t_star } => {
                if !(alpha < 0.0) {
                    return bad(format!("hp-plane: requires alpha < 0, got alpha={alpha}"));
                }
                if !(beta > 0.5 && beta <= beta_max()) {
                    return bad(format!(
                        "hp-plane: requires beta in (1/2, 1-1/e^2] = (0.5, {}], got beta={beta}",
                        beta_max()
                    ));
                }
                if !(t_star > 1.0) || !t_star.is_finite() {
                    return bad(format!("hp-plane: requires t* > 1, got t*={t_star}"));
                }
            }
            FamilyTag::HpLowDim { d, alpha } => {
                if d != 3 && d != 4 {
                    return bad(format!("hp: requires d in {{3, 4}}, got d={d}"));
                }
                if !(alpha < 0.0) {
                    return bad(format!("hp: requires alpha < 0, got alpha={alpha}"));
                }
            }
            FamilyTag::HpExterior { d, alpha } => {
                if d < 5 {
                    return bad(format!("hp-exterior: requires d >= 5, got d={d}"));
                }
                if !(alpha < 0.0) {
                    return bad(format!("hp-exterior: requires alpha < 0, got alpha={alpha}"));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::HardyInterior { .. } => "hardy",
            FamilyTag::HardyExterior { .. } => "hardy-exterior",
            FamilyTag::GaussianHighDim { .. } => "gaussian",
            FamilyTag::GaussianPlane { .. } => "gaussian-plane",
            FamilyTag::HpPlane { .. } => "hp-plane",
            FamilyTag::HpLowDim { .. } => "hp",
            FamilyTag::HpExterior { .. } => "hp-exterior",
        }
    }

    pub fn dimension(&self) -> u32 {
        match *self {
            FamilyTag::HardyInterior { d, .. }
            | FamilyTag::HardyExterior { d, .. }
            | FamilyTag::GaussianHighDim { d }
            | FamilyTag::HpLowDim { d, .. }
            | FamilyTag::HpExterior { d, .. } => d,
            FamilyTag::GaussianPlane { .. } | FamilyTag::HpPlane { .. } => 2,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            FamilyTag::HpPlane { alpha, .. }
            | FamilyTag::HpLowDim { alpha, .. }
            | FamilyTag::HpExterior { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn is_hardy(&self) -> bool {
        matches!(self, FamilyTag::HardyInterior { .. } | FamilyTag::HardyExterior { .. })
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, FamilyTag::GaussianHighDim { .. } | FamilyTag::GaussianPlane { .. })
    }

    pub fn is_hardy_poincare(&self) -> bool {
        self.alpha().is_some()
    }

    /// (d−2)²/4, the Hardy constant of the dimension.
    pub fn hardy_constant(&self) -> f64 {
        let d = self.dimension() as f64;
        0.25 * sq(d - 2.0)
    }

    /// Constant in front of Σ W_k on the right-hand side.
    pub fn prefactor(&self) -> f64 {
        match *self {
            FamilyTag::HardyInterior { .. } | FamilyTag::HardyExterior { .. } => 1.0,
            FamilyTag::GaussianPlane { .. } => 0.25,
            FamilyTag::HpPlane { beta, .. } => beta,
            _ => self.hardy_constant(),
        }
    }

    /// Z_0, i.e. whether the expansion starts with a W_0 = 1 term.
    pub fn z0(&self) -> f64 {
        match self {
            FamilyTag::GaussianHighDim { .. } | FamilyTag::HpLowDim { .. } | FamilyTag::HpExterior { .. } => 1.0,
            _ => 0.0,
        }
    }

    /// Chain variable written in the log-radius s = log r.
    pub fn chain_variable_log(&self, s: f64) -> Result<f64> {
        let t = match *self {
            FamilyTag::HardyInterior { a, .. } => {
                if !(s < a) {
                    return Err(Error::Domain(format!("hardy: requires log r < a = {a}, got log r = {s}")));
                }
                1.0 / (a - s)
            }
            FamilyTag::HardyExterior { a, .. } => {
                if !(s > -a) {
                    return Err(Error::Domain(format!(
                        "hardy-exterior: requires log r > -a = {}, got log r = {s}",
                        -a
                    )));
                }
                1.0 / (a + s)
            }
            FamilyTag::GaussianHighDim { d } => {
                let e = (d - 2) as f64 * s;
                if e > 0.0 {
                    let q = exp(-e);
                    q / (1.0 + q)
                } else {
                    1.0 / (1.0 + exp(e))
                }
            }
            FamilyTag::GaussianPlane { .. } | FamilyTag::HpPlane { .. } => {
                if !(s > 0.0) {
                    return Err(Error::Domain(format!(
                        "{}: t = 1/log r requires r > 1, got r = e^{s}",
                        self.name()
                    )));
                }
                1.0 / s
            }
            FamilyTag::HpLowDim { d, .. } => exp((2.0 - d as f64) * s),
            FamilyTag::HpExterior { d, .. } => exp((d as f64 - 2.0) * s),
        };
        if !s.is_finite() {
            return Err(Error::Domain(format!("{}: non-finite log-radius", self.name())));
        }
        Ok(t)
    }

    /// The chain variable t(r) of the family.
    pub fn chain_variable(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("{}: radius must be positive and finite, got {r}", self.name())));
        }
        match *self {
            FamilyTag::GaussianHighDim { d } => Ok(1.0 / (1.0 + pow(r, (d - 2) as f64))),
            FamilyTag::HpLowDim { d, .. } => Ok(pow(r, 2.0 - d as f64)),
            FamilyTag::HpExterior { d, .. } => Ok(pow(r, d as f64 - 2.0)),
            _ => self.chain_variable_log(ln(r)),
        }
    }
}

/// Resolution of the tabulated maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tabulation {
    /// Largest chain variable covered (only used by HpLowDim with d = 3).
    pub t_max: f64,
    /// Node spacing in the smooth tabulation variable.
    pub step: f64,
}

impl Default for Tabulation {
    fn default() -> Self {
        Tabulation { t_max: 1e6, step: 0.01 }
    }
}

#[derive(Debug, Clone)]
enum Maps {
    /// X(t) = 1/(a − log t), δ(t) = t.
    Log { a: f64, quarter: bool },
    /// X(t) = log(1−t)/(log(1−t) − 1), δ(t) = −t/log(1−t).
    Gaussian,
    /// d = 4: X(t) = 2(√(1+t) − 1).
    HpFour,
    /// d = 3 or d ≥ 5: X tabulated in v = t^{1/(d−2)}.
    HpTable { d: u32, table: HermiteTable },
    HpPlane(PlaneTables),
}

#[derive(Debug, Clone)]
struct PlaneTables {
    beta: f64,
    c0: f64,
    /// K(y) = ∫_1^{e^y} dσ/(σ(1+e^{2/σ})).
    k: HermiteTable,
    /// I(y) = ∫_1^{e^y} σ^{2β−2} e^{−2βK(σ)} dσ.
    i: HermiteTable,
    y_lo: f64,
}

impl PlaneTables {
    fn build(beta: f64, t_star: f64, step: f64) -> PlaneTables {
        // Below t = 0.02 the factor e^{-2/t} < 1e-43, so K is constant there.
        let y_lo = ln(0.02);
        let y_hi = ln(t_star) + step;
        let kp = |y: f64| {
            let e = exp(-2.0 * exp(-y));
            e / (1.0 + e)
        };
        let kpp = |y: f64| {
            let e = exp(-2.0 * exp(-y));
            2.0 * exp(-y) * e / sq(1.0 + e)
        };
        let n_left = libm::ceil(-y_lo / step) as usize;
        let n_right = libm::ceil(y_hi / step) as usize;
        let mut ys = Vec::with_capacity(n_left + n_right + 1);
        for j in (1..=n_left).rev() {
            ys.push(y_lo * j as f64 / n_left as f64);
        }
        ys.push(0.0);
        for j in 1..=n_right {
            ys.push(y_hi * j as f64 / n_right as f64);
        }
        let n = ys.len();
        let zero = n_left;
        let mut kv = vec![0.0; n];
        let mut iv = vec![0.0; n];
        let kval = |k0: f64, y0: f64, y: f64| k0 + gauss_legendre10(kp, y0, y);
        // March outward from y = 0 in both directions.
        for j in zero + 1..n {
            kv[j] = kval(kv[j - 1], ys[j - 1], ys[j]);
        }
        for j in (0..zero).rev() {
            kv[j] = kval(kv[j + 1], ys[j + 1], ys[j]);
        }
        let ip = |y: f64, k: f64| exp((2.0 * beta - 1.0) * y - 2.0 * beta * k);
        for j in zero + 1..n {
            let (y0, k0) = (ys[j - 1], kv[j - 1]);
            iv[j] = iv[j - 1] + gauss_legendre10(|y| ip(y, kval(k0, y0, y)), y0, ys[j]);
        }
        for j in (0..zero).rev() {
            let (y0, k0) = (ys[j + 1], kv[j + 1]);
            iv[j] = iv[j + 1] + gauss_legendre10(|y| ip(y, kval(k0, y0, y)), y0, ys[j]);
        }
        let k1: Vec<f64> = ys.iter().map(|&y| kp(y)).collect();
        let k2: Vec<f64> = ys.iter().map(|&y| kpp(y)).collect();
        let i1: Vec<f64> = ys.iter().zip(&kv).map(|(&y, &k)| ip(y, k)).collect();
        let i2: Vec<f64> = ys
            .iter()
            .zip(&i1)
            .map(|(&y, &d)| d * ((2.0 * beta - 1.0) - 2.0 * beta * kp(y)))
            .collect();
        let k = HermiteTable::new(ys.clone(), kv, k1, k2);
        let i = HermiteTable::new(ys, iv, i1, i2);
        let mut tables = PlaneTables {
            beta,
            c0: 0.0,
            k,
            i,
            y_lo,
        };
        // X(t*) = t* with C_1 = 0 fixes C_0 in closed form.
        tables.c0 = 1.0 / t_star + tables.integral(t_star);
        tables
    }

    fn k_of(&self, t: f64) -> f64 {
        let y = ln(t);
        if y <= self.y_lo {
            self.k.first_value()
        } else {
            self.k.eval(y)
        }
    }

    fn integral(&self, t: f64) -> f64 {
        let y = ln(t);
        if y >= self.y_lo {
            return self.i.eval(y);
        }
        let b = self.beta;
        let t_lo = exp(self.y_lo);
        let c = exp(-2.0 * b * self.k.first_value());
        let p = 2.0 * b - 1.0;
        let tail = if abs(p) < 1e-12 {
            c * (ln(t_lo) - ln(t))
        } else {
            c * (pow(t_lo, p) - pow(t, p)) / p
        };
        self.i.first_value() - tail
    }

    fn x(&self, t: f64) -> f64 {
        1.0 / (self.c0 - self.integral(t))
    }

    fn x_prime(&self, t: f64) -> f64 {
        let x = self.x(t);
        x * x * pow(t, 2.0 * self.beta - 2.0) * exp(-2.0 * self.beta * self.k_of(t))
    }

    fn delta(&self, t: f64) -> f64 {
        let e = exp(-2.0 / t);
        let ex = exp(-2.0 / self.x(t));
        (1.0 + e) * pow(t, 2.0 * self.beta) * exp(-2.0 * self.beta * self.k_of(t)) / (1.0 + ex)
    }

    fn delta_log_derivative(&self, t: f64) -> f64 {
        let b = self.beta;
        let e = exp(-2.0 / t);
        let x = self.x(t);
        let ex = exp(-2.0 / x);
        let de = 2.0 * e / (t * t);
        let dk = e / (t * (1.0 + e));
        let dex = 2.0 * ex / (x * x) * self.x_prime(t);
        de / (1.0 + e) + 2.0 * b / t - 2.0 * b * dk - dex / (1.0 + ex)
    }
}

fn build_hp_table(d: u32, t_max: f64, step: f64) -> HermiteTable {
    let kappa = hp_kappa(d);
    let n = root_power(d) as f64;
    let v_max = root_variable(d, t_max) * (1.0 + 1e-12);
    // Uniform spacing up to v = 4, geometric beyond.
    let mut vs = Vec::new();
    let mut v = 0.0;
    while v < v_max {
        vs.push(v);
        v = if v < 4.0 { v + step } else { v * (1.0 + 2.0 * step) };
    }
    vs.push(v_max);
    let integrand = |v: f64| exp(-kappa * nu_in_root(d, v)) * n * pow(v, n - 1.0);
    let mut f = vec![0.0; vs.len()];
    for j in 1..vs.len() {
        f[j] = f[j - 1] + gauss_legendre10(integrand, vs[j - 1], vs[j]);
    }
    let d1: Vec<f64> = vs.iter().map(|&v| integrand(v)).collect();
    let d2: Vec<f64> = vs
        .iter()
        .map(|&v| {
            let e = exp(-kappa * nu_in_root(d, v));
            let poly = n * (n - 1.0) * pow(v, n - 2.0);
            e * (poly - kappa * nu_in_root_derivative(d, v) * n * pow(v, n - 1.0))
        })
        .collect();
    HermiteTable::new(vs, f, d1, d2)
}

/// One level of the extremal seed recursion h(y) = p(y) + δ(y) h_next(next(y)).
#[derive(Debug, Clone, Copy)]
struct SeedStep {
    p: f64,
    dp: f64,
    delta: f64,
    ddelta: f64,
    next: f64,
    dnext: f64,
}

/// Samples of the chain at one value of the chain variable.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightSequenceSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub partial_sum: f64,
    /// Sum of the further terms W_{N+1}, W_{N+2}, … obtained by continuing the
    /// iteration; an estimate, not a bound.
    pub tail_estimate: f64,
    pub tail_converged: bool,
    /// Some W_k fell below 1e-300 and was reported as exactly 0.
    pub underflow: bool,
}

const UNDERFLOW_LOG: f64 = -690.775_527_898_213_7; // ln(1e-300)
const TAIL_TERMS: usize = 20_000;

/// A family together with its truncation order, validity interval and maps.
#[derive(Debug, Clone)]
pub struct WeightChainSpec {
    family: FamilyTag,
    n_terms: usize,
    t_lo: f64,
    t_hi: f64,
    hi_closed: bool,
    maps: Maps,
}

impl WeightChainSpec {
    pub fn new(family: FamilyTag, n_terms: usize) -> Result<Self> {
        Self::with_tabulation(family, n_terms, Tabulation::default())
    }

    /// Hardy chain with a = log δ + 1/δ for a domain of radius `delta`.
    pub fn hardy_for_radius(d: u32, delta: f64, n_terms: usize, exterior: bool) -> Result<Self> {
        let a = crate::special::hardy_parameter(delta)?;
        let family = if exterior {
            FamilyTag::HardyExterior { d, a }
        } else {
            FamilyTag::HardyInterior { d, a }
        };
        family.validate()?;
        let mut spec = Self::new(family, n_terms)?;
        spec.t_hi = delta;
        Ok(spec)
    }

    pub fn with_tabulation(family: FamilyTag, n_terms: usize, tab: Tabulation) -> Result<Self> {
        family.validate()?;
        if !(tab.step > 0.0 && tab.step <= 0.1) || !(tab.t_max > 0.0) {
            return Err(Error::Parameter(format!(
                "tabulation needs 0 < step <= 0.1 and t_max > 0, got {tab:?}"
            )));
        }
        let (t_hi, hi_closed, maps) = match family {
            FamilyTag::HardyInterior { a, .. } | FamilyTag::HardyExterior { a, .. } => {
                (hardy_domain_radius(a)?, true, Maps::Log { a, quarter: true })
            }
            FamilyTag::GaussianHighDim { .. } => (1.0, false, Maps::Gaussian),
            FamilyTag::GaussianPlane { a } => (fixed_point_tstar(a)?, true, Maps::Log { a, quarter: false }),
            FamilyTag::HpPlane { beta, t_star, .. } => {
                (t_star, true, Maps::HpPlane(PlaneTables::build(beta, t_star, tab.step * 0.5)))
            }
            FamilyTag::HpLowDim { d: 4, .. } => (f64::INFINITY, false, Maps::HpFour),
            FamilyTag::HpLowDim { d, .. } => (tab.t_max, true, Maps::HpTable { d, table: build_hp_table(d, tab.t_max, tab.step) }),
            FamilyTag::HpExterior { d, .. } => {
                let z = zeta(d)?;
                (z, true, Maps::HpTable { d, table: build_hp_table(d, z, tab.step) })
            }
        };
        Ok(WeightChainSpec {
            family,
            n_terms,
            t_lo: 0.0,
            t_hi,
            hi_closed,
            maps,
        })
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// Same chain with another truncation order (tables are shared by clone).
    pub fn with_terms(&self, n_terms: usize) -> Self {
        let mut s = self.clone();
        s.n_terms = n_terms;
        s
    }

    /// Validity interval (t_lo, t_hi] (open at t_hi for the gaussian family).
    pub fn validity(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.t_lo && (t < self.t_hi || (self.hi_closed && t <= self.t_hi * (1.0 + 1e-13)))
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            let close = if self.hi_closed { ']' } else { ')' };
            Err(Error::Domain(format!(
                "{}: chain variable t={t} outside validity interval ({}, {}{close}",
                self.family.name(),
                self.t_lo,
                self.t_hi
            )))
        }
    }

    pub fn chain_variable(&self, r: f64) -> Result<f64> {
        self.family.chain_variable(r)
    }

    /// Radial interval on which the chain variable lies in the validity interval.
    pub fn radial_domain(&self) -> (f64, f64) {
        let (a, b) = self.radial_domain_log();
        (exp(a), exp(b))
    }

    pub fn x_map(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.x_raw(t))
    }

    pub fn delta_map(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.delta_raw(t))
    }

    pub fn gamma_map(&self, t: f64) -> Result<f64> {
        if let FamilyTag::HpExterior { .. } = self.family {
            if t > self.t_hi * (1.0 + 1e-13) {
                return Err(Error::Domain(format!(
                    "hp-exterior: gamma is negative beyond t = zeta = {}, got t={t}",
                    self.t_hi
                )));
            }
        }
        self.check(t)?;
        Ok(self.gamma_raw(t))
    }

    /// X'(t).
    pub fn x_derivative(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.x_prime_raw(t))
    }

    fn x_raw(&self, t: f64) -> f64 {
        match &self.maps {
            Maps::Log { a, .. } => 1.0 / (a - ln(t)),
            Maps::Gaussian => {
                let l = log1p(-t);
                l / (l - 1.0)
            }
            Maps::HpFour => 2.0 * t / (sqrt(1.0 + t) + 1.0),
            Maps::HpTable { d, table } => table.eval(root_variable(*d, t)),
            Maps::HpPlane(p) => p.x(t),
        }
    }

    fn x_prime_raw(&self, t: f64) -> f64 {
        match &self.maps {
            Maps::Log { a, .. } => 1.0 / (t * sq(a - ln(t))),
            Maps::Gaussian => 1.0 / ((1.0 - t) * sq(log1p(-t) - 1.0)),
            Maps::HpFour => 1.0 / sqrt(1.0 + t),
            Maps::HpTable { d, .. } => exp(-hp_kappa(*d) * nu_in_root(*d, root_variable(*d, t))),
            Maps::HpPlane(p) => p.x_prime(t),
        }
    }

    fn hp_m(&self) -> f64 {
        2.0 / (self.family.dimension() as f64 - 2.0)
    }

    fn delta_raw(&self, t: f64) -> f64 {
        match &self.maps {
            Maps::Log { .. } => t,
            Maps::Gaussian => -t / log1p(-t),
            Maps::HpFour | Maps::HpTable { .. } => {
                let m = self.hp_m();
                let x = self.x_raw(t);
                (t / x) * (1.0 + pow(t, m)) / (1.0 + pow(x, m)) * self.x_prime_raw(t)
            }
            Maps::HpPlane(p) => p.delta(t),
        }
    }

    fn delta_prime_raw(&self, t: f64) -> f64 {
        match &self.maps {
            Maps::Log { .. } => 1.0,
            Maps::Gaussian => {
                let l = log1p(-t);
                -1.0 / l - t / ((1.0 - t) * l * l)
            }
            Maps::HpFour | Maps::HpTable { .. } => {
                let d = self.family.dimension();
                let m = self.hp_m();
                let x = self.x_raw(t);
                let xp = self.x_prime_raw(t);
                let tm = pow(t, m);
                let xm = pow(x, m);
                let log_d = 1.0 / t - xp / x + m * tm / (t * (1.0 + tm)) - m * xm * xp / (x * (1.0 + xm))
                    - hp_kappa(d) * nu_derivative(d, t);
                self.delta_raw(t) * log_d
            }
            Maps::HpPlane(p) => p.delta(t) * p.delta_log_derivative(t),
        }
    }

    fn gamma_raw(&self, t: f64) -> f64 {
        match self.family {
            FamilyTag::HardyInterior { .. } | FamilyTag::HardyExterior { .. } => 0.25 * t * t,
            FamilyTag::GaussianHighDim { .. } | FamilyTag::GaussianPlane { .. } => t * t,
            FamilyTag::HpPlane { beta, .. } => {
                let e = exp(-2.0 / t);
                (1.0 + e) * t * t - 2.0 * e * t - beta * t * t
            }
            FamilyTag::HpLowDim { d: 3, .. } => {
                let r = sqrt(t);
                0.25 * r * (10.0 * t * t - r + 2.0)
            }
            FamilyTag::HpLowDim { .. } | FamilyTag::HpExterior { .. } => {
                let m = self.hp_m();
                pow(t, 1.0 + m) * (m - 0.25 * pow(t, 1.0 - m))
            }
        }
    }

    /// Writes W_0..W_n at t into `out` (length n+1); returns the underflow flag.
    /// No validity check.
    pub(crate) fn weights_into(&self, t: f64, out: &mut [f64]) -> bool {
        let n = out.len() - 1;
        out[0] = self.family.z0();
        let mut x = t;
        let mut log_prod = 0.0;
        let mut underflow = false;
        for k in 1..=n {
            let z = self.gamma_raw(x);
            let w = if z <= 0.0 {
                0.0
            } else if log_prod + ln(z) < UNDERFLOW_LOG {
                underflow = true;
                0.0
            } else {
                exp(log_prod) * z
            };
            out[k] = w;
            if k < n {
                let dl = self.delta_raw(x);
                log_prod += 2.0 * ln(dl);
                x = self.x_raw(x);
            }
        }
        underflow
    }

    /// Σ_{k≤n} W_k(t) without allocation (n ≤ 63).
    pub fn weight_sum(&self, t: f64, n: usize) -> f64 {
        let mut buf = [0.0; 64];
        let n = n.min(63);
        self.weights_into(t, &mut buf[..=n]);
        buf[..=n].iter().sum()
    }

    /// W_n(t) alone.
    pub fn weight_term(&self, t: f64, n: usize) -> f64 {
        let mut buf = [0.0; 64];
        let n = n.min(63);
        self.weights_into(t, &mut buf[..=n]);
        buf[n]
    }

    /// Σ_{k≤N} W_k at radius r.
    pub fn weight_sum_at_radius(&self, r: f64) -> Result<f64> {
        let t = self.chain_variable(r)?;
        self.check(t)?;
        Ok(self.weight_sum(t, self.n_terms))
    }

    /// Full sample X_k, Y_k, Z_k, W_k for k = 0..N plus a tail estimate.
    pub fn weight_sequence(&self, t: f64) -> Result<WeightSequenceSample> {
        self.check(t)?;
        let n = self.n_terms;
        let mut xs = Vec::with_capacity(n + 1);
        let mut ys = Vec::with_capacity(n + 1);
        let mut zs = Vec::with_capacity(n + 1);
        let mut ws = Vec::with_capacity(n + 1);
        xs.push(t);
        ys.push(1.0);
        zs.push(self.family.z0());
        ws.push(self.family.z0());
        let mut x = t;
        let mut log_prod = 0.0; // ln(Y_1 ⋯ Y_{k-1})
        let mut underflow = false;
        let term = |x: f64, log_prod: f64, underflow: &mut bool| {
            let z = self.gamma_raw(x);
            let w = if z <= 0.0 {
                0.0
            } else if log_prod + ln(z) < UNDERFLOW_LOG {
                *underflow = true;
                0.0
            } else {
                exp(log_prod) * z
            };
            (z, w)
        };
        for _ in 1..=n {
            let (z, w) = term(x, log_prod, &mut underflow);
            let y = sq(self.delta_raw(x));
            zs.push(z);
            ws.push(w);
            ys.push(y);
            log_prod += ln(y);
            x = self.x_raw(x);
            xs.push(x);
        }
        let partial_sum: f64 = ws.iter().sum();
        // Continue the same recursion for the tail.
        let mut tail = 0.0;
        let mut converged = false;
        let mut lp = log_prod;
        let mut xk = x;
        let mut dummy = false;
        for _ in 0..TAIL_TERMS {
            let (_, w) = term(xk, lp, &mut dummy);
            tail += w;
            if w <= 1e-17 * (partial_sum + tail).max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
            lp += 2.0 * ln(self.delta_raw(xk));
            xk = self.x_raw(xk);
        }
        Ok(WeightSequenceSample {
            t,
            x: xs,
            y: ys,
            z: zs,
            w: ws,
            partial_sum,
            tail_estimate: tail,
            tail_converged: converged,
            underflow,
        })
    }

    /// Σ_{k≤N} W_k(1/r): the Kelvin-reflected weight.
    pub fn kelvin_reflect(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("kelvin reflection needs r > 0, got {r}")));
        }
        self.weight_sum_at_radius(1.0 / r)
    }

    /// Variable in which the seed recursion is written (log r for Hardy, t otherwise).
    fn seed_variable(&self, t: f64) -> f64 {
        match self.maps {
            Maps::Log { a, quarter: true } => a - 1.0 / t,
            _ => t,
        }
    }

    fn seed_step(&self, y: f64) -> SeedStep {
        match &self.maps {
            Maps::Log { a, quarter: true } => {
                let x = 1.0 / (a - y);
                SeedStep {
                    p: 0.5 * x,
                    dp: 0.5 * x * x,
                    delta: x,
                    ddelta: x * x,
                    next: ln(x),
                    dnext: x,
                }
            }
            Maps::Log { quarter: false, .. } => SeedStep {
                p: -0.5 * y,
                dp: -0.5,
                delta: y,
                ddelta: 1.0,
                next: self.x_raw(y),
                dnext: self.x_prime_raw(y),
            },
            Maps::Gaussian => SeedStep {
                p: 0.5 * y,
                dp: 0.5,
                delta: self.delta_raw(y),
                ddelta: self.delta_prime_raw(y),
                next: self.x_raw(y),
                dnext: self.x_prime_raw(y),
            },
            Maps::HpPlane(p) => SeedStep {
                p: -p.beta * y,
                dp: -p.beta,
                delta: self.delta_raw(y),
                ddelta: self.delta_prime_raw(y),
                next: self.x_raw(y),
                dnext: self.x_prime_raw(y),
            },
            Maps::HpFour | Maps::HpTable { .. } => {
                let (p, dp) = if self.family.dimension() == 3 {
                    (0.25 * sqrt(y), 0.125 / sqrt(y))
                } else {
                    (0.25 * y, 0.25)
                };
                SeedStep {
                    p,
                    dp,
                    delta: self.delta_raw(y),
                    ddelta: self.delta_prime_raw(y),
                    next: self.x_raw(y),
                    dnext: self.x_prime_raw(y),
                }
            }
        }
    }

    /// The first-order expression F(y, h, h') whose value the seed recursion expands.
    fn form(&self, y: f64, h: f64, dh: f64) -> f64 {
        match &self.maps {
            Maps::Log { quarter: true, .. } => dh - h * h,
            Maps::Log { quarter: false, .. } => -y * y * dh - h * h,
            Maps::Gaussian => -y * (1.0 - y) * dh + h - h * h,
            Maps::HpPlane(_) => {
                let e = exp(-2.0 / y);
                -(1.0 + e) * y * y * dh + 2.0 * e * h - h * h
            }
            Maps::HpFour | Maps::HpTable { .. } => {
                let m = self.hp_m();
                let tm = pow(y, m);
                -(1.0 + tm) * y * dh + (1.0 + (1.0 + m) * tm) * h - h * h
            }
        }
    }

    /// Constant c in F(t, h^{(k)}) = c Σ_{j=1}^k W_j(t).
    fn form_scale(&self) -> f64 {
        match self.family {
            FamilyTag::HardyInterior { .. } | FamilyTag::HardyExterior { .. } => 1.0,
            FamilyTag::HpPlane { beta, .. } => beta,
            _ => 0.25,
        }
    }

    /// Depth-k extremal seed h^{(k)} = p + δ·h^{(k−1)}∘X with h^{(0)} = 0,
    /// returned with its derivative, in the seed variable y.
    fn truncated_seed(&self, y: f64, k: usize) -> (f64, f64) {
        let mut steps: Vec<SeedStep> = Vec::with_capacity(k);
        let mut yy = y;
        for _ in 0..k {
            let s = self.seed_step(yy);
            yy = s.next;
            steps.push(s);
        }
        let (mut h, mut dh) = (0.0, 0.0);
        for s in steps.iter().rev() {
            let h_new = s.p + s.delta * h;
            let dh_new = s.dp + s.ddelta * h + s.delta * s.dnext * dh;
            h = h_new;
            dh = dh_new;
        }
        (h, dh)
    }

    /// Depth-k extremal seed at log-radius s, in the normalization of the
    /// square forms: g(s) = h(log r) for Hardy (−h(−log r) for the exterior
    /// chain) and (d−2)·h(t) or h(t) for the gaussian and Hardy–Poincaré chains.
    pub fn seed_shift(&self, s: f64, k: usize) -> Result<f64> {
        let t = self.family.chain_variable_log(s)?;
        self.check(t)?;
        Ok(match self.family {
            FamilyTag::HardyInterior { .. } => self.truncated_seed(s, k).0,
            FamilyTag::HardyExterior { .. } => -self.truncated_seed(-s, k).0,
            FamilyTag::GaussianHighDim { d } | FamilyTag::HpLowDim { d, .. } | FamilyTag::HpExterior { d, .. } => {
                (d - 2) as f64 * self.truncated_seed(t, k).0
            }
            _ => self.truncated_seed(t, k).0,
        })
    }

    /// Log-radius interval on which the chain variable stays valid.
    pub fn radial_domain_log(&self) -> (f64, f64) {
        let d = self.family.dimension() as f64;
        let inf = f64::INFINITY;
        match self.family {
            FamilyTag::HardyInterior { a, .. } => (-inf, a - 1.0 / self.t_hi),
            FamilyTag::HardyExterior { a, .. } => (1.0 / self.t_hi - a, inf),
            FamilyTag::GaussianHighDim { .. } => (-inf, inf),
            FamilyTag::GaussianPlane { .. } | FamilyTag::HpPlane { .. } => (1.0 / self.t_hi, inf),
            FamilyTag::HpLowDim { .. } => (ln(self.t_hi) / (2.0 - d), inf),
            FamilyTag::HpExterior { .. } => (-inf, ln(self.t_hi) / (d - 2.0)),
        }
    }

    /// Level-n comparison weight, in units of the prefactor: W_n for n ≥ 1 and
    /// for n = 0 either W_0 = 1 or, when W_0 = 0, the base constant
    /// ((d−2)²/4 for Hardy, 1 for the plane families).
    pub fn level_weight(&self, t: f64, n: usize) -> f64 {
        if n >= 1 {
            return self.weight_term(t, n);
        }
        if self.family.is_hardy() {
            self.family.hardy_constant()
        } else {
            1.0
        }
    }

    /// F(t, h^{(k)}, h^{(k)}') / c, which equals Σ_{j=1}^k W_j(t) when the maps
    /// are mutually consistent.
    pub fn seed_weight(&self, t: f64, k: usize) -> Result<f64> {
        self.check(t)?;
        let y = self.seed_variable(t);
        let (h, dh) = self.truncated_seed(y, k);
        Ok(self.form(y, h, dh) / self.form_scale())
    }

    /// Relative residual of the recursion identity F(t, h^{(k)}) = c Σ_{j=1}^k W_j(t).
    pub fn recursion_residual(&self, t: f64, k: usize) -> Result<f64> {
        if k > self.n_terms {
            return Err(Error::Parameter(format!(
                "recursion order k={k} exceeds truncation N={}",
                self.n_terms
            )));
        }
        self.check(t)?;
        let y = self.seed_variable(t);
        let (h, dh) = self.truncated_seed(y, k);
        let lhs = self.form(y, h, dh);
        let mut buf = [0.0; 64];
        self.weights_into(t, &mut buf[..=k.min(63)]);
        let rhs = self.form_scale() * buf[1..=k.min(63)].iter().sum::<f64>();
        Ok(abs(lhs - rhs) / 1f64.max(abs(lhs)).max(abs(rhs)))
    }

    /// (|A − δ²|, |B − δ²|) for the compatibility conditions of the
    /// Hardy–Poincaré chains, relative to max(1, δ²).
    pub fn compatibility_residuals(&self, t: f64) -> Result<(f64, f64)> {
        if !self.family.is_hardy_poincare() {
            return Err(Error::Parameter(format!(
                "compatibility conditions are defined for Hardy-Poincare families, not {}",
                self.family.name()
            )));
        }
        self.check(t)?;
        let s = self.seed_step(t);
        let x = s.next;
        let xp = s.dnext;
        let dl = s.delta;
        let dlp = s.ddelta;
        let (a, b) = match &self.maps {
            Maps::HpPlane(_) => {
                let e = exp(-2.0 / t);
                let ex = exp(-2.0 / x);
                let a = (1.0 + e) * t * t * dl * xp / ((1.0 + ex) * x * x);
                let b = (-(1.0 + e) * t * t * dlp + 2.0 * (e - s.p) * dl) / (2.0 * ex);
                (a, b)
            }
            _ => {
                let m = self.hp_m();
                let tm = pow(t, m);
                let xm = pow(x, m);
                let a = (t / x) * (1.0 + tm) / (1.0 + xm) * dl * xp;
                let b = (-(1.0 + tm) * t * dlp + (1.0 + (1.0 + m) * tm - 2.0 * s.p) * dl)
                    / (1.0 + (1.0 + m) * xm);
                (a, b)
            }
        };
        let d2 = dl * dl;
        let scale = 1f64.max(d2);
        Ok((abs(a - d2) / scale, abs(b - d2) / scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: FamilyTag, n: usize) -> WeightChainSpec {
        WeightChainSpec::new(f, n).unwrap()
    }

    #[test]
    fn chain_variable_examples() {
        let h = FamilyTag::HardyInterior { d: 3, a: 1.0 };
        assert_eq!(h.chain_variable(1.0).unwrap(), 1.0);
        assert_eq!(FamilyTag::GaussianHighDim { d: 3 }.chain_variable(1.0).unwrap(), 0.5);
        let hp = FamilyTag::HpLowDim { d: 4, alpha: -1.0 };
        assert!(abs(hp.chain_variable(10.0).unwrap() - 0.01) < 1e-16);
        assert!(matches!(
            FamilyTag::GaussianPlane { a: 2.0 }.chain_variable(0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gaussian_maps_at_one_minus_inverse_e() {
        let s = spec(FamilyTag::GaussianHighDim { d: 3 }, 2);
        let t = 1.0 - exp(-1.0);
        assert!(abs(s.x_map(t).unwrap() - 0.5) < 1e-15);
        assert!(abs(s.delta_map(t).unwrap() - t) < 1e-15);
        assert!(abs(s.delta_map(1e-12).unwrap() - 1.0) < 1e-11);
    }

    #[test]
    fn plane_fixed_point_is_preserved() {
        let s = spec(FamilyTag::GaussianPlane { a: 2.0 }, 2);
        let (_, t_star) = s.validity();
        assert!(abs(s.x_map(t_star).unwrap() - t_star) < 1e-12);
    }

    #[test]
    fn gamma_examples() {
        let s4 = spec(FamilyTag::HpLowDim { d: 4, alpha: -1.0 }, 1);
        for &t in &[0.1, 1.0, 3.0] {
            assert!(abs(s4.gamma_map(t).unwrap() - 0.75 * t * t) < 1e-14 * t * t);
        }
        let s3 = spec(FamilyTag::HpLowDim { d: 3, alpha: -1.0 }, 1);
        assert!(abs(s3.gamma_map(1.0).unwrap() - 2.75) < 1e-15);
        let s5 = spec(FamilyTag::HpExterior { d: 5, alpha: -1.0 }, 1);
        let z = zeta(5).unwrap();
        assert!(abs(s5.gamma_map(z).unwrap()) < 1e-12);
        assert!(matches!(s5.gamma_map(z * 1.01), Err(Error::Domain(_))));
    }

    #[test]
    fn hardy_hand_iteration() {
        let s = spec(FamilyTag::HardyInterior { d: 3, a: 1.0 }, 2);
        let t = s.chain_variable((-1.0f64).exp()).unwrap();
        assert!(abs(t - 0.5) < 1e-15);
        let w = s.weight_sequence(t).unwrap();
        let x2 = 1.0 / (1.0 - ln(0.5));
        assert_eq!(w.w[0], 0.0);
        assert!(abs(w.w[1] - 0.25 * 0.25) < 1e-16);
        assert!(abs(w.w[2] - w.w[1] * x2 * x2) < 1e-16);
    }

    #[test]
    fn level_zero_conventions() {
        let g = spec(FamilyTag::GaussianHighDim { d: 3 }, 0).weight_sequence(0.3).unwrap();
        assert_eq!(g.w, vec![1.0]);
        assert_eq!(g.partial_sum, 1.0);
        let p = spec(FamilyTag::GaussianPlane { a: 2.0 }, 0).weight_sequence(0.3).unwrap();
        assert_eq!(p.w, vec![0.0]);
    }

    #[test]
    fn hp_four_closed_form_matches_integral_definition() {
        // X(t) = ∫_0^t exp(-ν_4) with ν_4 = ½ log(1+s).
        let s = spec(FamilyTag::HpLowDim { d: 4, alpha: -1.0 }, 1);
        for &t in &[1e-6, 0.3, 2.0, 50.0] {
            let q = crate::quadrature::adaptive(
                |x: f64| 1.0 / sqrt(1.0 + x),
                0.0,
                t,
                crate::quadrature::Tolerance::new(1e-15, 1e-14),
            )
            .unwrap();
            assert!(abs(s.x_map(t).unwrap() - q.value) < 1e-13 * q.value.max(1.0));
        }
    }

    #[test]
    fn hp_delta_tends_to_one() {
        let s = spec(FamilyTag::HpLowDim { d: 3, alpha: -1.0 }, 1);
        assert!(abs(s.delta_map(1e-6).unwrap() - 1.0) < 1e-3);
    }

    #[test]
    fn recursion_order_above_truncation_is_rejected() {
        let s = spec(FamilyTag::GaussianHighDim { d: 3 }, 1);
        assert!(matches!(s.recursion_residual(0.3, 2), Err(Error::Parameter(_))));
    }

    #[test]
    fn family_invariants_are_enforced() {
        assert!(FamilyTag::HardyInterior { d: 2, a: 1.0 }.validate().is_err());
        assert!(FamilyTag::HardyInterior { d: 3, a: 0.9 }.validate().is_err());
        assert!(FamilyTag::GaussianPlane { a: 1.0 }.validate().is_err());
        assert!(FamilyTag::HpPlane { alpha: -1.0, beta: 0.5, t_star: 2.0 }.validate().is_err());
        assert!(FamilyTag::HpPlane { alpha: -1.0, beta: 0.9, t_star: 2.0 }.validate().is_err());
        assert!(FamilyTag::HpPlane { alpha: -1.0, beta: 0.8, t_star: 2.0 }.validate().is_ok());
        assert!(FamilyTag::HpExterior { d: 4, alpha: -1.0 }.validate().is_err());
        assert!(FamilyTag::HpLowDim { d: 5, alpha: -1.0 }.validate().is_err());
    }

    #[test]
    fn underflow_is_flagged() {
        let s = spec(FamilyTag::HardyInterior { d: 3, a: 1.0 }, 3);
        let w = s.weight_sequence(1e-160).unwrap();
        assert!(w.underflow);
        assert_eq!(w.w[1], 0.0);
    }
    fn all_families() -> Vec<FamilyTag> {
        vec![
            FamilyTag::HardyInterior { d: 3, a: 1.0 },
            FamilyTag::HardyExterior { d: 4, a: 1.5 },
            FamilyTag::GaussianHighDim { d: 3 },
            FamilyTag::GaussianHighDim { d: 6 },
            FamilyTag::GaussianPlane { a: 2.0 },
            FamilyTag::HpPlane { alpha: -1.0, beta: 0.7, t_star: 2.0 },
            FamilyTag::HpLowDim { d: 3, alpha: -1.0 },
            FamilyTag::HpLowDim { d: 4, alpha: -0.5 },
            FamilyTag::HpExterior { d: 5, alpha: -1.0 },
            FamilyTag::HpExterior { d: 8, alpha: -2.0 },
        ]
    }

    fn sample_points(s: &WeightChainSpec) -> Vec<f64> {
        let (lo, hi) = s.validity();
        let hi = if hi.is_finite() { hi } else { 50.0 };
        (1..40).map(|j| lo + (hi - lo) * (j as f64 / 40.0).powi(2)).collect()
    }

    #[test]
    fn recursion_identity_holds_for_every_family() {
        for f in all_families() {
            let s = spec(f, 5);
            for t in sample_points(&s) {
                for k in 0..=5 {
                    let r = s.recursion_residual(t, k).unwrap();
                    assert!(r < 1e-12, "{f:?} t={t} k={k}: {r}");
                }
            }
        }
    }

    #[test]
    fn seed_derivative_matches_central_differences() {
        // Independent of the analytic derivative propagation.
        for f in all_families() {
            let s = spec(f, 3);
            for t in sample_points(&s).into_iter().step_by(5) {
                let y = s.seed_variable(t);
                let e = 1e-5 * y.abs().max(1e-3);
                let (_, dh) = s.truncated_seed(y, 3);
                let fd = (s.truncated_seed(y + e, 3).0 - s.truncated_seed(y - e, 3).0) / (2.0 * e);
                assert!(abs(dh - fd) < 1e-6 * dh.abs().max(1.0), "{f:?} t={t}: {dh} vs {fd}");
            }
        }
    }

    #[test]
    fn compatibility_conditions_hold() {
        for f in all_families().into_iter().filter(|f| f.is_hardy_poincare()) {
            let s = spec(f, 1);
            for t in sample_points(&s) {
                let (a, b) = s.compatibility_residuals(t).unwrap();
                assert!(a < 1e-12 && b < 1e-12, "{f:?} t={t}: {a} {b}");
            }
        }
        assert!(spec(FamilyTag::GaussianHighDim { d: 3 }, 1).compatibility_residuals(0.5).is_err());
    }

    #[test]
    fn tabulated_maps_match_direct_quadrature() {
        use crate::quadrature::{adaptive, Tolerance};
        for (f, kappa) in [
            (FamilyTag::HpLowDim { d: 3, alpha: -1.0 }, 0.5),
            (FamilyTag::HpExterior { d: 5, alpha: -1.0 }, 1.0),
        ] {
            let s = spec(f, 1);
            let d = f.dimension();
            for &t in &[1e-4, 0.2, 1.0, 3.0, 15.0] {
                if !s.contains(t) {
                    continue;
                }
                let q = adaptive(
                    |x: f64| exp(-kappa * crate::special::nu(d, x).unwrap()),
                    0.0,
                    t,
                    Tolerance::new(1e-15, 1e-13),
                )
                .unwrap();
                let x = s.x_map(t).unwrap();
                assert!(abs(x - q.value) < 1e-11 * q.value.max(1.0), "{f:?} t={t}: {x} vs {}", q.value);
            }
        }
    }

    #[test]
    fn plane_hp_map_fixes_tstar_and_has_consistent_derivative() {
        let s = spec(FamilyTag::HpPlane { alpha: -1.0, beta: 0.7, t_star: 2.0 }, 1);
        assert!(abs(s.x_map(2.0).unwrap() - 2.0) < 1e-12);
        for &t in &[0.01, 0.3, 1.0, 1.9] {
            let e = 1e-6 * t;
            let fd = (s.x_raw(t + e) - s.x_raw(t - e)) / (2.0 * e);
            let xp = s.x_derivative(t).unwrap();
            assert!(abs(fd - xp) < 1e-6 * xp, "t={t}: {fd} vs {xp}");
            let x = s.x_map(t).unwrap();
            assert!(x > 0.0 && x <= 2.0);
        }
    }

    #[test]
    fn tail_estimate_is_reported() {
        let s = spec(FamilyTag::GaussianPlane { a: 2.0 }, 2);
        let w = s.weight_sequence(0.5).unwrap();
        assert!(w.tail_converged);
        assert!(w.tail_estimate > 0.0 && w.tail_estimate < w.partial_sum);
        let longer = s.with_terms(40).weight_sequence(0.5).unwrap();
        assert!(abs(longer.partial_sum - (w.partial_sum + w.tail_estimate)) < 0.05 * w.tail_estimate);
    }

    #[test]
    fn kelvin_reflection_swaps_interior_and_exterior() {
        let int = spec(FamilyTag::HardyInterior { d: 3, a: 1.0 }, 3);
        let ext = spec(FamilyTag::HardyExterior { d: 3, a: 1.0 }, 3);
        for &r in &[1.0, 0.5, 1e-3] {
            let a = int.weight_sum_at_radius(r).unwrap();
            assert!(abs(ext.kelvin_reflect(r).unwrap() - a) < 1e-15);
            assert!(abs(ext.weight_sum_at_radius(1.0 / r).unwrap() - a) < 1e-15);
        }
    }
}
