//! Radial measures, trial profiles and quadrature in the log-radius s = log r.
//!
//! Every integral is computed in s. Densities and gauges are kept as
//! log-weights c + p·s + q·r² + c'·log(1+r²), so exponentials such as e^{r²/4}
//! and e^{-r²/2} are combined symbolically before anything is exponentiated.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, exp, ln, log1p, pow, PI};
use crate::quadrature::{adaptive, QuadratureResult, Tolerance};
use crate::special::sphere_area;

/// log(1 + e^{2s}) without overflow.
pub(crate) fn log1p_exp2(s: f64) -> f64 {
    if s > 0.0 {
        2.0 * s + log1p(exp(-2.0 * s))
    } else {
        log1p(exp(2.0 * s))
    }
}

/// r²/(1+r²) at r = e^s.
fn logistic2(s: f64) -> f64 {
    if s > 0.0 {
        1.0 / (1.0 + exp(-2.0 * s))
    } else {
        let e = exp(2.0 * s);
        e / (1.0 + e)
    }
}

/// Exponent c + p·log r + q·r² + c'·log(1+r²), written in s = log r.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogWeight {
    pub constant: f64,
    pub power: f64,
    pub gaussian: f64,
    pub powerlaw: f64,
}

/// Gauge factor of a profile: u = e^{G} w.
pub type Gauge = LogWeight;

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight {
        constant: 0.0,
        power: 0.0,
        gaussian: 0.0,
        powerlaw: 0.0,
    };

    pub fn power(p: f64) -> Self {
        LogWeight { power: p, ..Self::ZERO }
    }

    pub fn new(constant: f64, power: f64, gaussian: f64, powerlaw: f64) -> Self {
        LogWeight {
            constant,
            power,
            gaussian,
            powerlaw,
        }
    }

    pub fn plus(self, o: LogWeight) -> LogWeight {
        LogWeight {
            constant: self.constant + o.constant,
            power: self.power + o.power,
            gaussian: self.gaussian + o.gaussian,
            powerlaw: self.powerlaw + o.powerlaw,
        }
    }

    pub fn scale(self, k: f64) -> LogWeight {
        LogWeight {
            constant: k * self.constant,
            power: k * self.power,
            gaussian: k * self.gaussian,
            powerlaw: k * self.powerlaw,
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let mut v = self.constant + self.power * s;
        // Zero coefficients are skipped so that e^{2s} = inf never meets 0.
        if self.gaussian != 0.0 {
            v += self.gaussian * exp(2.0 * s);
        }
        if self.powerlaw != 0.0 {
            v += self.powerlaw * log1p_exp2(s);
        }
        v
    }

    /// d/ds of [`LogWeight::eval`].
    pub fn slope(&self, s: f64) -> f64 {
        let mut v = self.power;
        if self.gaussian != 0.0 {
            v += 2.0 * self.gaussian * exp(2.0 * s);
        }
        if self.powerlaw != 0.0 {
            v += 2.0 * self.powerlaw * logistic2(s);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum MeasureKind {
    Lebesgue,
    /// (2π)^{-d/2} e^{-|x|²/2}.
    Gaussian,
    /// (1+|x|²)^α.
    PowerLaw { alpha: f64 },
    /// |x|^{-2α}(1+|x|²)^α.
    PowerLawKelvin { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    pub d: u32,
}

impl MeasureSpec {
    pub fn new(kind: MeasureKind, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        Ok(MeasureSpec { kind, d })
    }

    pub fn lebesgue(d: u32) -> Self {
        MeasureSpec {
            kind: MeasureKind::Lebesgue,
            d,
        }
    }

    pub fn gaussian(d: u32) -> Self {
        MeasureSpec {
            kind: MeasureKind::Gaussian,
            d,
        }
    }

    pub fn power_law(d: u32, alpha: f64) -> Self {
        MeasureSpec {
            kind: MeasureKind::PowerLaw { alpha },
            d,
        }
    }

    /// Log of the density of the measure with respect to dx.
    pub fn point_weight(&self) -> LogWeight {
        let d = self.d as f64;
        match self.kind {
            MeasureKind::Lebesgue => LogWeight::ZERO,
            MeasureKind::Gaussian => LogWeight::new(-0.5 * d * ln(2.0 * PI), 0.0, -0.5, 0.0),
            MeasureKind::PowerLaw { alpha } => LogWeight::new(0.0, 0.0, 0.0, alpha),
            MeasureKind::PowerLawKelvin { alpha } => LogWeight::new(0.0, -2.0 * alpha, 0.0, alpha),
        }
    }

    /// Log of ρ(r)·r, the density in s including σ_{d−1} r^{d−1} dr = σ_{d−1} r^d ds.
    pub fn line_weight(&self) -> LogWeight {
        LogWeight::new(ln(sphere_area(self.d)), self.d as f64, 0.0, 0.0).plus(self.point_weight())
    }

    /// Radial density ρ(r) = σ_{d−1} r^{d−1} h(r).
    pub fn density(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        let s = ln(r);
        exp(self.line_weight().eval(s) - s)
    }

    /// Upper bound for ∫_R^∞ ρ(r) dr, when the measure has a finite tail.
    pub fn tail_bound(&self, r: f64) -> Option<f64> {
        let d = self.d as f64;
        match self.kind {
            MeasureKind::Gaussian => {
                // r^{d-1}e^{-r²/2} is log-concave past √(d−1): ∫_R^∞ ≤ ρ(R)/(R − (d−1)/R).
                let gap = r - (d - 1.0) / r;
                (gap > 0.0).then(|| self.density(r) / gap)
            }
            MeasureKind::PowerLaw { alpha } | MeasureKind::PowerLawKelvin { alpha } => {
                let extra = if let MeasureKind::PowerLawKelvin { .. } = self.kind { -2.0 * alpha } else { 0.0 };
                // (1+r²)^α ≤ r^{2α} for α < 0.
                let p = d + 2.0 * alpha + extra;
                (alpha < 0.0 && p < 0.0 && r > 0.0).then(|| sphere_area(self.d) * pow(r, p) / (-p))
            }
            MeasureKind::Lebesgue => None,
        }
    }

    /// ∫_a^b f(r) ρ(r) dr. `b` may be infinite and `a` may be 0.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureResult> {
        if !(a >= 0.0) || !(b > a) {
            return Err(Error::Parameter(format!("integration interval [{a}, {b}] is degenerate")));
        }
        let w = self.line_weight();
        let s0 = if a == 0.0 { f64::NEG_INFINITY } else { ln(a) };
        let s1 = ln(b);
        integrate_line(|s| f(exp(s)) * exp(w.eval(s)), s0, s1, tol)
    }
}

/// Upper bound for the tail of |h| beyond `x` in direction `dir` (±1), from the
/// decay of windowed maxima over 8 windows of width 1/4. None if the sampled
/// envelope is not decaying.
fn tail_envelope<H: FnMut(f64) -> f64>(h: &mut H, x: f64, dir: f64) -> Option<f64> {
    let mut m = [0.0f64; 9];
    for (j, mj) in m.iter_mut().enumerate() {
        for i in 0..=4 {
            let y = x + dir * 0.25 * (j as f64 + 0.25 * i as f64);
            let v = abs(h(y));
            if !v.is_finite() {
                return None;
            }
            *mj = mj.max(v);
        }
    }
    if m[0] == 0.0 && m.iter().all(|&v| v == 0.0) {
        return Some(0.0);
    }
    let mut kappa = f64::INFINITY;
    for j in 0..8 {
        if m[j + 1] == 0.0 {
            continue;
        }
        if m[j] == 0.0 || m[j + 1] >= m[j] {
            return None;
        }
        kappa = kappa.min(4.0 * ln(m[j] / m[j + 1]));
    }
    if !kappa.is_finite() {
        return Some(0.25 * m[0]);
    }
    Some(0.25 * m[0] + m[0] / kappa)
}

const MAX_TAIL_STEPS: usize = 2000;

/// ∫_{s0}^{s1} h(s) ds where either end may be infinite. Infinite ends are cut
/// where the decay bound of the envelope falls below the tolerance; that bound
/// is added to the error estimate. The bound assumes the envelope keeps decaying
/// at least at its sampled rate, which holds for polynomially bounded profiles
/// against gaussian and power-law densities.
pub fn integrate_line<H: FnMut(f64) -> f64>(mut h: H, s0: f64, s1: f64, tol: Tolerance) -> Result<QuadratureResult> {
    if !(s1 > s0) {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            subintervals: 0,
        });
    }
    let (mut a, mut b) = (s0, s1);
    if a.is_infinite() && b.is_infinite() {
        a = -1.0;
        b = 1.0;
    } else if a.is_infinite() {
        a = b - 1.0;
    } else if b.is_infinite() {
        b = a + 1.0;
    }
    let mut res = adaptive(&mut h, a, b, tol)?;
    let target = |v: f64| tol.abs.max(tol.rel * abs(v));
    for (end_infinite, dir) in [(s1.is_infinite(), 1.0), (s0.is_infinite(), -1.0)] {
        if !end_infinite {
            continue;
        }
        let mut x = if dir > 0.0 { b } else { a };
        let mut steps = 0;
        loop {
            if let Some(t) = tail_envelope(&mut h, x, dir) {
                if t <= 0.1 * target(res.value) {
                    res.abs_error_estimate += t;
                    break;
                }
            }
            steps += 1;
            if steps > MAX_TAIL_STEPS {
                return Err(Error::Integrability(format!(
                    "integrand does not decay toward s = {}",
                    if dir > 0.0 { "+inf" } else { "-inf" }
                )));
            }
            let piece = if dir > 0.0 {
                adaptive(&mut h, x, x + 1.0, tol)?
            } else {
                adaptive(&mut h, x - 1.0, x, tol)?
            };
            res.value += piece.value;
            res.abs_error_estimate += piece.abs_error_estimate;
            res.subintervals += piece.subintervals;
            x += dir;
        }
    }
    Ok(res)
}

/// Coordinate in which [`graded_mesh`] distributes nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshMode {
    Linear,
    Log,
}

/// Mesh on [a, b] with `n` nodes. Log mode is uniform in log r; linear mode is
/// geometrically graded toward each flagged end (spacing ratio 1e4 overall).
pub fn graded_mesh(a: f64, b: f64, singular: (bool, bool), n: usize, mode: MeshMode) -> Result<Vec<f64>> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Parameter(format!("mesh interval [{a}, {b}] is degenerate")));
    }
    if n < 2 {
        return Err(Error::Parameter(format!("mesh needs at least 2 nodes, got {n}")));
    }
    let mut x: Vec<f64> = match mode {
        MeshMode::Log => {
            if !(a > 0.0) {
                return Err(Error::Parameter(format!("log mesh needs a > 0, got {a}")));
            }
            let (la, lb) = (ln(a), ln(b));
            (0..n).map(|i| exp(la + (lb - la) * i as f64 / (n - 1) as f64)).collect()
        }
        MeshMode::Linear => {
            let m = n - 1;
            let xi: Vec<f64> = (0..n).map(|i| i as f64 / m as f64).collect();
            let graded = |xi: f64, ratio: f64| {
                // Geometric spacing h_i ∝ ρ^i normalised to [0, 1].
                let rho = pow(ratio, 1.0 / (m.max(2) - 1) as f64);
                (pow(rho, xi * m as f64) - 1.0) / (pow(rho, m as f64) - 1.0)
            };
            let map = |t: f64| match singular {
                (true, false) => graded(t, 1e4),
                (false, true) => 1.0 - graded(1.0 - t, 1e4),
                (true, true) => {
                    if t <= 0.5 {
                        0.5 * graded(2.0 * t, 1e2)
                    } else {
                        1.0 - 0.5 * graded(2.0 - 2.0 * t, 1e2)
                    }
                }
                (false, false) => t,
            };
            xi.iter().map(|&t| a + (b - a) * map(t)).collect()
        }
    };
    x[0] = a;
    x[n - 1] = b;
    Ok(x)
}

/// Shape w of a profile u = e^{G} w, evaluated in s = log r.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Shape {
    Zero,
    Constant,
    /// (4x(1−x))^n P(x) with x = (r − r0)/(r1 − r0), zero outside [r0, r1].
    Bump { r0: f64, r1: f64, power: u32, coeffs: Vec<f64> },
    /// Same, with x = (s − s0)/(s1 − s0).
    LogBump { s0: f64, s1: f64, power: u32, coeffs: Vec<f64> },
    /// Σ c_j r^j.
    Polynomial { coeffs: Vec<f64> },
    /// Continuous, piecewise linear in s, zero outside the nodes.
    PiecewiseLinear { s: Vec<f64>, w: Vec<f64> },
    /// w(−s).
    Reflected(Box<Shape>),
}

/// P(x), P'(x) for coefficients c_0 + c_1 x + ….
fn poly(coeffs: &[f64], x: f64) -> (f64, f64) {
    if coeffs.is_empty() {
        return (1.0, 0.0);
    }
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn bump(x: f64, power: u32, coeffs: &[f64]) -> (f64, f64) {
    if !(x > 0.0 && x < 1.0) {
        return (0.0, 0.0);
    }
    let b = 4.0 * x * (1.0 - x);
    let db = 4.0 * (1.0 - 2.0 * x);
    let n = power as i32;
    let bn1 = libm::pow(b, (n - 1) as f64);
    let (p, dp) = poly(coeffs, x);
    (bn1 * b * p, n as f64 * bn1 * db * p + bn1 * b * dp)
}

impl Shape {
    /// (w, dw/ds).
    pub fn eval(&self, s: f64) -> (f64, f64) {
        match self {
            Shape::Zero => (0.0, 0.0),
            Shape::Constant => (1.0, 0.0),
            Shape::Bump { r0, r1, power, coeffs } => {
                let r = exp(s);
                let h = r1 - r0;
                let (w, dw) = bump((r - r0) / h, *power, coeffs);
                (w, dw * r / h)
            }
            Shape::LogBump { s0, s1, power, coeffs } => {
                let h = s1 - s0;
                let (w, dw) = bump((s - s0) / h, *power, coeffs);
                (w, dw / h)
            }
            Shape::Polynomial { coeffs } => {
                let r = exp(s);
                let (p, dp) = poly(coeffs, r);
                (p, dp * r)
            }
            Shape::PiecewiseLinear { s: xs, w } => {
                let n = xs.len();
                if n < 2 || !(s >= xs[0] && s <= xs[n - 1]) {
                    return (0.0, 0.0);
                }
                let i = xs.partition_point(|&v| v <= s).clamp(1, n - 1) - 1;
                let h = xs[i + 1] - xs[i];
                let slope = (w[i + 1] - w[i]) / h;
                (w[i] + slope * (s - xs[i]), slope)
            }
            Shape::Reflected(inner) => {
                let (w, dw) = inner.eval(-s);
                (w, -dw)
            }
        }
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Shape::PiecewiseLinear { s, .. } => out.extend_from_slice(s),
            Shape::Bump { r0, r1, .. } => {
                if *r0 > 0.0 {
                    out.push(ln(*r0));
                }
                out.push(ln(*r1));
            }
            Shape::LogBump { s0, s1, .. } => {
                out.push(*s0);
                out.push(*s1);
            }
            Shape::Reflected(inner) => {
                let start = out.len();
                inner.breakpoints(out);
                for v in &mut out[start..] {
                    *v = -*v;
                }
            }
            _ => {}
        }
    }
}

/// Radial trial function u(r) = e^{G(r)} w(r), support [r0, r1] and angular
/// index ℓ (so that u(r) Y_ℓ is the full function).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadialProfile {
    pub shape: Shape,
    pub gauge: Gauge,
    /// Support in s = log r; either end may be infinite.
    pub support_log: (f64, f64),
    pub ell: u32,
}

impl RadialProfile {
    pub fn new(shape: Shape, gauge: Gauge, support_log: (f64, f64), ell: u32) -> Result<Self> {
        if !(support_log.1 > support_log.0) || support_log.0.is_nan() {
            return Err(Error::Parameter(format!("profile support {support_log:?} is empty")));
        }
        Ok(RadialProfile {
            shape,
            gauge,
            support_log,
            ell,
        })
    }

    pub fn zero() -> Self {
        RadialProfile {
            shape: Shape::Zero,
            gauge: Gauge::ZERO,
            support_log: (-1.0, 1.0),
            ell: 0,
        }
    }

    /// C¹ bump (4x(1−x))² on [r0, r1].
    pub fn bump(r0: f64, r1: f64) -> Result<Self> {
        Self::bump_with(r0, r1, 2, Vec::new())
    }

    /// (4x(1−x))^power · P(x) on [r0, r1], x = (r−r0)/(r1−r0).
    pub fn bump_with(r0: f64, r1: f64, power: u32, coeffs: Vec<f64>) -> Result<Self> {
        if !(r0 >= 0.0 && r1 > r0 && r1.is_finite()) || power < 2 {
            return Err(Error::Parameter(format!(
                "bump needs 0 <= r0 < r1 < inf and power >= 2, got r0={r0} r1={r1} power={power}"
            )));
        }
        let s0 = if r0 == 0.0 { f64::NEG_INFINITY } else { ln(r0) };
        Self::new(Shape::Bump { r0, r1, power, coeffs }, Gauge::ZERO, (s0, ln(r1)), 0)
    }

    /// Bump in log r on [s0, s1].
    pub fn log_bump(s0: f64, s1: f64, power: u32, coeffs: Vec<f64>) -> Result<Self> {
        if !(s1 > s0 && s0.is_finite() && s1.is_finite()) || power < 2 {
            return Err(Error::Parameter(format!(
                "log bump needs finite s0 < s1 and power >= 2, got s0={s0} s1={s1} power={power}"
            )));
        }
        Self::new(Shape::LogBump { s0, s1, power, coeffs }, Gauge::ZERO, (s0, s1), 0)
    }

    /// u(r) = e^{−(1−ε) r²/4}, ε ∈ (0, 1).
    pub fn gaussian_trial(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Parameter(format!("gaussian trial needs eps in (0, 1), got {eps}")));
        }
        Self::new(
            Shape::Constant,
            LogWeight::new(0.0, 0.0, -0.25 * (1.0 - eps), 0.0),
            (f64::NEG_INFINITY, f64::INFINITY),
            0,
        )
    }

    /// u(r) = r^{−(d−2)/2} b(log r) with b a log-bump on [log ε, 0]: a
    /// near-extremal Hardy profile on the unit ball.
    pub fn hardy_trial(d: u32, eps: f64) -> Result<Self> {
        if d < 3 || !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Parameter(format!("hardy trial needs d >= 3 and eps in (0, 1), got d={d} eps={eps}")));
        }
        let s0 = ln(eps);
        let mut p = Self::log_bump(s0, 0.0, 2, Vec::new())?;
        p.gauge = LogWeight::power(-0.5 * (d as f64 - 2.0));
        Ok(p)
    }

    /// u(r) = r e^{−b r²} with ℓ = 1 (u(x) = x₁ e^{−b|x|²} for b = 0).
    pub fn coordinate(b: f64) -> Result<Self> {
        if !(b >= 0.0) {
            return Err(Error::Parameter(format!("coordinate trial needs b >= 0, got {b}")));
        }
        Self::new(
            Shape::Constant,
            LogWeight::new(0.0, 1.0, -b, 0.0),
            (f64::NEG_INFINITY, f64::INFINITY),
            1,
        )
    }

    /// u(r) = r^{ell} (Σ c_j r^j) e^{−b r²}.
    pub fn poly_gauss(coeffs: Vec<f64>, b: f64, ell: u32) -> Result<Self> {
        if !(b >= 0.0) {
            return Err(Error::Parameter(format!("polynomial-gaussian needs b >= 0, got {b}")));
        }
        Self::new(
            Shape::Polynomial { coeffs },
            LogWeight::new(0.0, ell as f64, -b, 0.0),
            (f64::NEG_INFINITY, f64::INFINITY),
            ell,
        )
    }

    /// Piecewise-linear w on log-radius nodes, with gauge.
    pub fn from_log_grid(s: Vec<f64>, w: Vec<f64>, gauge: Gauge, ell: u32) -> Result<Self> {
        if s.len() != w.len() || s.len() < 2 || !s.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::Parameter("grid profile needs >= 2 increasing nodes with matching values".into()));
        }
        let support = (s[0], s[s.len() - 1]);
        Self::new(Shape::PiecewiseLinear { s, w }, gauge, support, ell)
    }

    pub fn support(&self) -> (f64, f64) {
        (exp(self.support_log.0), exp(self.support_log.1))
    }

    /// (w, w_s + G_s w): the shape and the gauge-free part of u_s = e^G(...).
    pub fn reduced(&self, s: f64) -> (f64, f64) {
        if s < self.support_log.0 || s > self.support_log.1 {
            return (0.0, 0.0);
        }
        let (w, ws) = self.shape.eval(s);
        (w, ws + self.gauge.slope(s) * w)
    }

    pub fn value(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return self.value(f64::MIN_POSITIVE);
        }
        let s = ln(r);
        let (w, _) = self.reduced(s);
        if w == 0.0 {
            return 0.0;
        }
        exp(self.gauge.eval(s)) * w
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let s = ln(r);
        let (_, du) = self.reduced(s);
        if du == 0.0 {
            return 0.0;
        }
        exp(self.gauge.eval(s)) * du / r
    }

    /// Points in s where the integrand may lose smoothness.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = Vec::new();
        self.shape.breakpoints(&mut v);
        v.retain(|&x| x > self.support_log.0 && x < self.support_log.1);
        v.insert(0, self.support_log.0);
        v.push(self.support_log.1);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Kelvin transform v(x) = |x|^{2−d} u(x/|x|²). Only for gauges without an
    /// r² term (their reflection would need an r^{−2} term).
    pub fn kelvin(&self, d: u32) -> Result<RadialProfile> {
        let g = self.gauge;
        if g.gaussian != 0.0 {
            return Err(Error::Parameter("Kelvin transform of a gauge with an r^2 term is not supported".into()));
        }
        // u(−s) = exp(c − p s + c' (log(1+e^{2s}) − 2s)) w(−s).
        let gauge = LogWeight::new(g.constant, 2.0 - d as f64 - g.power - 2.0 * g.powerlaw, 0.0, g.powerlaw);
        Self::new(
            Shape::Reflected(Box::new(self.shape.clone())),
            gauge,
            (-self.support_log.1, -self.support_log.0),
            self.ell,
        )
    }

    /// ∫ e^{2G(s) + extra(s)} q(s, w, w_s + G_s w) ds over the support.
    pub fn integrate_quadratic<Q: Fn(f64, f64, f64) -> f64>(
        &self,
        extra: LogWeight,
        q: Q,
        tol: Tolerance,
    ) -> Result<QuadratureResult> {
        if self.shape == Shape::Zero {
            return Ok(QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                subintervals: 0,
            });
        }
        let lw = self.gauge.scale(2.0).plus(extra);
        let h = |s: f64| {
            let (w, du) = self.reduced(s);
            let v = q(s, w, du);
            if v == 0.0 {
                0.0
            } else {
                v * exp(lw.eval(s))
            }
        };
        let cuts = self.breakpoints();
        let mut out = QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            subintervals: 0,
        };
        for pair in cuts.windows(2) {
            let r = integrate_line(h, pair[0], pair[1], tol)?;
            out.value += r.value;
            out.abs_error_estimate += r.abs_error_estimate;
            out.subintervals += r.subintervals;
        }
        Ok(out)
    }
}

/// Named trial profiles: "bump" [r0, r1], "gaussian" [ε], "hardy" [d, ε],
/// "coordinate" [b].
pub fn trial_profile(name: &str, params: &[f64]) -> Result<RadialProfile> {
    let need = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::Parameter(format!("trial '{name}' takes {n} parameters, got {}", params.len())))
        }
    };
    match name {
        "bump" => {
            need(2)?;
            RadialProfile::bump(params[0], params[1])
        }
        "gaussian" => {
            need(1)?;
            RadialProfile::gaussian_trial(params[0])
        }
        "hardy" => {
            need(2)?;
            if params[0] < 3.0 || libm::trunc(params[0]) != params[0] {
                return Err(Error::Parameter(format!("hardy trial needs an integer d >= 3, got {}", params[0])));
            }
            RadialProfile::hardy_trial(params[0] as u32, params[1])
        }
        "coordinate" => {
            need(1)?;
            RadialProfile::coordinate(params[0])
        }
        other => Err(Error::Parameter(format!(
            "unknown trial profile '{other}' (known: bump, gaussian, hardy, coordinate)"
        ))),
    }
}

/// Human-readable description of a profile, for reports.
pub fn describe(p: &RadialProfile) -> String {
    let (a, b) = p.support();
    let kind = match &p.shape {
        Shape::Zero => "zero",
        Shape::Constant => "constant",
        Shape::Bump { .. } => "bump",
        Shape::LogBump { .. } => "log-bump",
        Shape::Polynomial { .. } => "polynomial",
        Shape::PiecewiseLinear { .. } => "piecewise-linear",
        Shape::Reflected(_) => "reflected",
    };
    format!("{kind} on [{a:e}, {b:e}], l={}", p.ell)
}
