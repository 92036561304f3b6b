//! Special functions used by the weight chains.

use alloc::format;

use crate::error::{Error, Result};
use crate::math::{abs, atan, atan2, ln, log1p, pow, sqrt, PI};

/// Surface area of the unit sphere in R^d, 2π^{d/2}/Γ(d/2).
pub fn sphere_area(d: u32) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    let (mut area, mut k) = if d % 2 == 1 { (2.0, 1u32) } else { (2.0 * PI, 2u32) };
    while k < d {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// Exponent κ in X'(t) = exp(-κ ν_d(t)) for the Hardy–Poincaré chain.
pub(crate) fn hp_kappa(d: u32) -> f64 {
    if d == 3 {
        0.5
    } else {
        1.0
    }
}

/// ∫_0^v w^n/(1+w²) dw.
fn rational_moment(n: u32, v: f64) -> f64 {
    if v < 0.5 {
        let v2 = v * v;
        let mut term = pow(v, n as f64 + 1.0);
        let mut sum = 0.0;
        let mut j = 0u32;
        loop {
            let c = term / (n + 2 * j + 1) as f64;
            sum += if j % 2 == 0 { c } else { -c };
            if abs(c) <= 1e-18 * abs(sum) || j > 200 {
                return sum;
            }
            term *= v2;
            j += 1;
        }
    }
    match n {
        0 => atan(v),
        1 => 0.5 * log1p(v * v),
        _ => pow(v, (n - 1) as f64) / (n - 1) as f64 - rational_moment(n - 2, v),
    }
}

/// ν_d written in the root variable v (s = v² for d = 3, s = v^{d−2} otherwise).
pub(crate) fn nu_in_root(d: u32, v: f64) -> f64 {
    match d {
        3 => {
            let s = v * v;
            let r = sqrt(2.0 * s);
            (atan2(r, 1.0 - s) + 0.5 * log1p(2.0 * r / (1.0 - r + s))) / core::f64::consts::SQRT_2
        }
        _ => 0.5 * (d - 2) as f64 * rational_moment(d - 3, v),
    }
}

/// d/dv of [`nu_in_root`].
pub(crate) fn nu_in_root_derivative(d: u32, v: f64) -> f64 {
    match d {
        3 => 2.0 / (1.0 + v * v * v * v),
        _ => 0.5 * (d - 2) as f64 * pow(v, (d - 3) as f64) / (1.0 + v * v),
    }
}

/// Power p with s = v^p: 2 for d = 3, d − 2 otherwise.
pub(crate) fn root_power(d: u32) -> u32 {
    if d == 3 {
        2
    } else {
        d - 2
    }
}

/// Root variable v = s^{1/p} in which ν_d is smooth at 0.
pub(crate) fn root_variable(d: u32, s: f64) -> f64 {
    match d {
        3 | 4 => sqrt(s),
        _ => pow(s, 1.0 / (d - 2) as f64),
    }
}

/// ν_3(s) = ∫_0^s dσ/(√σ(1+σ²)) and ν_d(s) = ½∫_0^s dσ/(1+σ^{2/(d-2)}) for d ≥ 4.
///
/// Both are evaluated in closed form (for d ≥ 5 through the substitution
/// σ = w^{d-2}, which turns the integrand into a rational function).
pub fn nu(d: u32, s: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::Parameter(format!("nu needs d >= 3, got d={d}")));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("nu needs s >= 0, got s={s}")));
    }
    Ok(match d {
        3 => nu_in_root(3, sqrt(s)),
        4 => 0.5 * log1p(s),
        _ => nu_in_root(d, root_variable(d, s)),
    })
}

/// ν_d'(s).
pub(crate) fn nu_derivative(d: u32, s: f64) -> f64 {
    if d == 3 {
        1.0 / (sqrt(s) * (1.0 + s * s))
    } else {
        0.5 / (1.0 + pow(s, 2.0 / (d - 2) as f64))
    }
}

/// Largest root of t (a − log t) = 1, i.e. the largest fixed point of
/// t ↦ 1/(a − log t). Requires a ≥ 1 (a = 1 gives the double root 1).
pub fn fixed_point_tstar(a: f64) -> Result<f64> {
    if !(a >= 1.0) || !a.is_finite() {
        return Err(Error::Parameter(format!("fixed point needs a >= 1, got a={a}")));
    }
    Ok(libm::exp(log_root(a, false)))
}

/// Smallest root of t (a − log t) = 1; this is the domain radius δ_Ω whose
/// Hardy parameter log δ_Ω + 1/δ_Ω equals a.
pub fn hardy_domain_radius(a: f64) -> Result<f64> {
    if !(a >= 1.0) || !a.is_finite() {
        return Err(Error::Parameter(format!("Hardy parameter needs a >= 1, got a={a}")));
    }
    Ok(libm::exp(log_root(a, true)))
}

/// Root u ≤ 0 (or u ≥ 0) of u + e^{-u} = a, written as
/// (u + expm1(-u)) = a − 1 so the double root at a = 1 stays accurate.
fn log_root(a: f64, negative: bool) -> f64 {
    let c = a - 1.0;
    if c == 0.0 {
        return 0.0;
    }
    let g = |u: f64| (u + libm::expm1(-u)) - c;
    if negative {
        // g decreases on (-∞, 0]; g(-(c+1)) > 0 since e^{c+1} > 2c + 1.
        bisect(g, -(c + 1.0), 0.0, true)
    } else {
        // g increases on [0, ∞); g(c + 1) > 0.
        bisect(g, 0.0, c + 1.0, false)
    }
}

/// Hardy parameter a = log δ + 1/δ for a domain of radius δ.
pub fn hardy_parameter(delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Parameter(format!("domain radius must be positive, got {delta}")));
    }
    Ok(ln(delta) + 1.0 / delta)
}

fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, decreasing: bool) -> f64 {
    // Sign convention: we want the point where g changes sign between lo and hi.
    let positive_below = decreasing;
    if g(hi) == 0.0 {
        return hi;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == positive_below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if abs(g(lo)) <= abs(g(hi)) {
        lo
    } else {
        hi
    }
}

/// ζ = (8/(d−2))^{(d−2)/(d−4)}, the zero of γ_d for d ≥ 5.
pub fn zeta(d: u32) -> Result<f64> {
    if d < 5 {
        return Err(Error::Parameter(format!("zeta is defined for d >= 5, got d={d}")));
    }
    let df = d as f64;
    Ok(pow(8.0 / (df - 2.0), (df - 2.0) / (df - 4.0)))
}

/// Exterior radius R = ζ^{-1/(d-2)} = ((d−2)/8)^{1/(d−4)}: the chain weights are
/// nonnegative for |x| ≥ R.
pub fn hp_exterior_radius(d: u32) -> Result<f64> {
    let z = zeta(d)?;
    Ok(pow(z, -1.0 / (d - 2) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, Tolerance};

    #[test]
    fn sphere_areas() {
        assert!(abs(sphere_area(1) - 2.0) < 1e-15);
        assert!(abs(sphere_area(2) - 2.0 * PI) < 1e-15);
        assert!(abs(sphere_area(3) - 4.0 * PI) < 1e-14);
        assert!(abs(sphere_area(4) - 2.0 * PI * PI) < 1e-13);
        assert!(abs(sphere_area(5) - 8.0 * PI * PI / 3.0) < 1e-13);
    }

    #[test]
    fn nu3_reference_value() {
        let v = nu(3, 1.0).unwrap();
        let closed = (PI / 2.0 + 0.5 * ln((2.0 + 2f64.sqrt()) / (2.0 - 2f64.sqrt()))) / 2f64.sqrt();
        assert!(abs(v - closed) < 1e-14);
        assert!(abs(v - 1.7340) < 1e-4);
        assert_eq!(nu(5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn nu3_small_argument() {
        let s = 1e-8;
        let q = adaptive(
            |w: f64| 2.0 / (1.0 + w * w * w * w),
            0.0,
            sqrt(s),
            Tolerance::new(1e-18, 1e-14),
        )
        .unwrap();
        let v = nu(3, s).unwrap();
        assert!(abs(v - q.value) < 1e-15);
        assert!(abs(v - 2.0 * sqrt(s)) < 1e-11);
    }

    #[test]
    fn nu_high_dimension_against_quadrature() {
        for d in 4..=9u32 {
            let m = 2.0 / (d - 2) as f64;
            for &s in &[1e-6, 0.3, 1.0, 7.5, 40.0] {
                let q = adaptive(|x: f64| 0.5 / (1.0 + pow(x, m)), 0.0, s, Tolerance::new(1e-15, 1e-14))
                    .unwrap();
                let v = nu(d, s).unwrap();
                assert!(abs(v - q.value) < 1e-12, "d={d} s={s}: {v} vs {}", q.value);
            }
        }
    }

    #[test]
    fn nu_rejects_bad_input() {
        assert!(matches!(nu(3, -1.0), Err(Error::Domain(_))));
        assert!(matches!(nu(2, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn tstar_examples() {
        assert_eq!(fixed_point_tstar(1.0).unwrap(), 1.0);
        let t = fixed_point_tstar(2.0).unwrap();
        assert!(abs(t - 6.305_395_279_271_691) < 1e-12);
        assert!(matches!(fixed_point_tstar(0.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn domain_radius_round_trip() {
        for &delta in &[1.0, 0.5, 0.1, 1e-3] {
            let a = hardy_parameter(delta).unwrap();
            let back = hardy_domain_radius(a).unwrap();
            assert!(abs(back - delta) < 1e-12 * delta.max(1e-300) + 1e-15, "{delta} -> {back}");
        }
    }

    #[test]
    fn zeta_and_radius_for_d5() {
        let z = zeta(5).unwrap();
        assert!(abs(z - pow(8.0 / 3.0, 3.0)) < 1e-12);
        assert!(abs(hp_exterior_radius(5).unwrap() - 0.375) < 1e-14);
    }
}
