//! Adaptive Gauss–Kronrod (7/15) quadrature and fixed Gauss–Legendre rules.

use alloc::collections::BinaryHeap;
use alloc::format;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math::{abs, pow};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub subintervals: usize,
}

// Kronrod abscissae; odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel on `[a, b]`: (Kronrod value, error estimate).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * abs(fc - mean);
    for j in 0..7 {
        resasc += WGK[j] * (abs(fv1[j] - mean) + abs(fv2[j] - mean));
    }
    let resasc = resasc * abs(h);
    let value = resk * h;
    let mut err = abs((resk - resg) * h);
    if resasc != 0.0 && err != 0.0 {
        let scale = pow(200.0 * err / resasc, 1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Tolerances for [`adaptive`]. The estimate must drop below
/// `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subintervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_subintervals: 4000,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-14, 1e-12)
    }
}

/// Globally adaptive bisection of the panel with the largest error.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            subintervals: 0,
        });
    }
    let (v0, e0) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v0,
        err: e0,
    });
    let mut total = v0;
    let mut err = e0;
    loop {
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Integrability(format!(
                "non-finite integrand values on [{a}, {b}]"
            )));
        }
        let target = tol.abs.max(tol.rel * abs(total));
        if err <= target {
            break;
        }
        if heap.len() >= tol.max_subintervals {
            if err > 1e-3 * abs(total).max(tol.abs) {
                return Err(Error::Integrability(format!(
                    "no convergence on [{a}, {b}] after {} subintervals (estimate {err:e})",
                    heap.len()
                )));
            }
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in double precision.
            heap.push(worst);
            break;
        }
        let (vl, el) = gk15(&mut f, worst.a, mid);
        let (vr, er) = gk15(&mut f, mid, worst.b);
        total += vl + vr - worst.value;
        err += el + er - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: vl,
            err: el,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: vr,
            err: er,
        });
    }
    // Resum to shed the drift of the running totals.
    let mut value = 0.0;
    let mut est = 0.0;
    for p in heap.iter() {
        value += p.value;
        est += p.err;
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: est,
        subintervals: heap.len(),
    })
}

/// Adaptive quadrature over consecutive pieces `[cuts[i], cuts[i+1]]`.
pub fn adaptive_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    cuts: &[f64],
    tol: Tolerance,
) -> Result<QuadratureResult> {
    let mut out = QuadratureResult {
        value: 0.0,
        abs_error_estimate: 0.0,
        subintervals: 0,
    };
    for w in cuts.windows(2) {
        let r = adaptive(&mut f, w[0], w[1], tol)?;
        out.value += r.value;
        out.abs_error_estimate += r.abs_error_estimate;
        out.subintervals += r.subintervals;
    }
    Ok(out)
}

/// Five-point Gauss–Legendre nodes on [-1, 1].
pub const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
pub const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Ten-point Gauss–Legendre nodes (positive half) and weights.
const GL10_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL10_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Ten-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre10<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..5 {
        let dx = h * GL10_X[i];
        s += GL10_W[i] * (f(c - dx) + f(c + dx));
    }
    s * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{exp, sqrt};

    #[test]
    fn polynomials_up_to_degree_nine_are_exact() {
        for deg in 0..=9 {
            let (v, _) = gk15(&mut |x: f64| pow(x, deg as f64), 0.0, 2.0);
            let exact = pow(2.0, deg as f64 + 1.0) / (deg as f64 + 1.0);
            assert!(abs(v - exact) <= 1e-13 * exact, "degree {deg}: {v} vs {exact}");
            let g = gauss_legendre10(|x| pow(x, deg as f64), 0.0, 2.0);
            assert!(abs(g - exact) <= 1e-13 * exact);
        }
    }

    #[test]
    fn adaptive_handles_a_peaked_integrand() {
        let r = adaptive(|x| exp(-1e4 * (x - 0.3) * (x - 0.3)), 0.0, 1.0, Tolerance::default())
            .unwrap();
        let exact = sqrt(core::f64::consts::PI / 1e4);
        assert!(abs(r.value - exact) < 1e-13);
        assert!(r.subintervals > 1);
    }

    #[test]
    fn inverse_square_root_singularity_converges() {
        let r = adaptive(|x| 1.0 / sqrt(x), 0.0, 1.0, Tolerance::new(1e-10, 1e-10)).unwrap();
        assert!(abs(r.value - 2.0) < 1e-8);
    }

    #[test]
    fn divergent_integrand_is_reported() {
        let r = adaptive(|x| 1.0 / (x * x), 0.0, 1.0, Tolerance::default());
        assert!(matches!(r, Err(Error::Integrability(_))));
    }

    #[test]
    fn tighter_tolerance_does_not_raise_the_estimate() {
        let f = |x: f64| 1.0 / (1.0 + 25.0 * x * x);
        let loose = adaptive(f, -1.0, 1.0, Tolerance::new(1e-6, 1e-6)).unwrap();
        let tight = adaptive(f, -1.0, 1.0, Tolerance::new(1e-13, 1e-13)).unwrap();
        assert!(tight.abs_error_estimate <= loose.abs_error_estimate);
    }
}
