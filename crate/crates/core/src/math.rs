//! Thin aliases over `libm` so numeric code reads like ordinary float code.

pub(crate) use libm::{atan, atan2, exp, log as ln, log1p, pow, sqrt};

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn sq(x: f64) -> f64 {
    x * x
}

pub(crate) const PI: f64 = core::f64::consts::PI;
