//! Symmetric tridiagonal eigenproblems from P1 finite elements.
//!
//! A form ∫ A w'² + V w² dξ with lumped mass ∫ m w² dξ is folded into
//! T = M^{−1/2}(K + V)M^{−1/2}; the smallest eigenvalue comes from Sturm
//! bisection and the eigenvector from shifted inverse iteration.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, exp, sqrt};
use crate::quadrature::{GL5_NODES, GL5_WEIGHTS};

/// Variable the finite elements are linear in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Coordinate {
    /// ξ = r.
    Linear,
    /// ξ = log r.
    #[default]
    LogRadius,
}

impl Coordinate {
    pub fn radius(self, xi: f64) -> f64 {
        match self {
            Coordinate::Linear => xi,
            Coordinate::LogRadius => exp(xi),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
    /// All mesh nodes in the coordinate variable, boundary nodes included;
    /// the unknowns sit at the interior ones.
    pub nodes: Vec<f64>,
    pub coordinate: Coordinate,
    /// Lumped mass of each interior node (already folded into the matrix).
    pub mass: Vec<f64>,
    /// Gershgorin radius of the zero-order block V in the mass metric.
    pub potential_radius: f64,
}

impl TridiagonalSystem {
    /// Plain matrix with unit mass.
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::Assembly(format!(
                "tridiagonal system needs n >= 1 diagonal and n-1 off-diagonal entries, got {} and {}",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        if diagonal.iter().chain(off_diagonal.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Assembly("non-finite matrix entry".into()));
        }
        let n = diagonal.len();
        Ok(TridiagonalSystem {
            diagonal,
            off_diagonal,
            nodes: Vec::new(),
            coordinate: Coordinate::Linear,
            mass: vec![1.0; n],
            potential_radius: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    /// Interval [lo, hi] containing every eigenvalue.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += abs(self.off_diagonal[i - 1]);
            }
            if i + 1 < n {
                r += abs(self.off_diagonal[i]);
            }
            lo = lo.min(self.diagonal[i] - r);
            hi = hi.max(self.diagonal[i] + r);
        }
        (lo, hi)
    }

    /// max(|lo|, |hi|) of the Gershgorin interval.
    pub fn gershgorin_radius(&self) -> f64 {
        let (lo, hi) = self.gershgorin_bounds();
        abs(lo).max(abs(hi))
    }

    /// Number of eigenvalues strictly below λ.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let tiny = f64::MIN_POSITIVE / f64::EPSILON;
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let e2 = if i == 0 { 0.0 } else { self.off_diagonal[i - 1] * self.off_diagonal[i - 1] };
            q = self.diagonal[i] - lambda - e2 / q;
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// k-th smallest eigenvalue (k = 0 is the smallest) by bisection to
    /// full double precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin_bounds();
        let pad = 1e-14 * (abs(lo).max(abs(hi))).max(f64::MIN_POSITIVE);
        lo -= pad;
        hi += pad;
        for _ in 0..2200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalue(0)
    }

    /// Bisection accuracy guaranteed by [`TridiagonalSystem::eigenvalue`].
    pub fn accuracy(&self) -> f64 {
        1e-12 * self.gershgorin_radius()
    }

    /// y = T x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diagonal[i] * x[i];
            if i > 0 {
                v += self.off_diagonal[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off_diagonal[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// xᵀTx / xᵀx.
    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let y = self.apply(x);
        let num: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().map(|a| a * a).sum();
        num / den
    }

    /// Unit eigenvector for an eigenvalue λ from the bottom of the spectrum,
    /// by inverse iteration with a shift just below λ (T − σ stays positive
    /// definite, so the elimination needs no pivoting).
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let shift = lambda - (1e-9 * abs(lambda)).max(1e-13 * self.gershgorin_radius()).max(f64::MIN_POSITIVE);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * (i % 7) as f64).collect();
        normalize(&mut x);
        let mut dd = vec![0.0; n];
        for _ in 0..6 {
            // Thomas elimination of (T − σ) y = x.
            dd[0] = self.diagonal[0] - shift;
            let mut y = x.clone();
            for i in 1..n {
                let m = self.off_diagonal[i - 1] / dd[i - 1];
                dd[i] = self.diagonal[i] - shift - m * self.off_diagonal[i - 1];
                y[i] -= m * y[i - 1];
            }
            y[n - 1] /= dd[n - 1];
            for i in (0..n - 1).rev() {
                y[i] = (y[i] - self.off_diagonal[i] * y[i + 1]) / dd[i];
            }
            if y.iter().any(|v| !v.is_finite()) {
                break;
            }
            normalize(&mut y);
            x = y;
        }
        // Fix the sign so the largest component is positive.
        let big = x.iter().copied().fold(0.0f64, |m, v| if abs(v) > abs(m) { v } else { m });
        if big < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }

    /// Eigenvector of T mapped back to nodal values w_i = x_i / √m_i, with
    /// zeros at the two Dirichlet nodes.
    pub fn nodal_values(&self, x: &[f64]) -> Vec<f64> {
        let mut w = Vec::with_capacity(x.len() + 2);
        w.push(0.0);
        w.extend(x.iter().zip(&self.mass).map(|(v, m)| v / sqrt(*m)));
        w.push(0.0);
        w
    }
}

fn normalize(x: &mut [f64]) {
    let n = sqrt(x.iter().map(|v| v * v).sum::<f64>());
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Assemble ∫ A w'² + V w² dξ over the mesh with Dirichlet ends, lumped
/// mass ∫ m φ_i dξ, and 5-point Gauss quadrature on every element.
pub fn assemble_form<A, V, M>(
    nodes: &[f64],
    coordinate: Coordinate,
    stiffness: A,
    potential: V,
    mass: M,
) -> Result<TridiagonalSystem>
where
    A: Fn(f64) -> f64,
    V: Fn(f64) -> f64,
    M: Fn(f64) -> f64,
{
    let n_nodes = nodes.len();
    if n_nodes < 3 {
        return Err(Error::Assembly(format!("need at least 3 nodes, got {n_nodes}")));
    }
    if !nodes.windows(2).all(|w| w[0] < w[1]) || nodes.iter().any(|v| !v.is_finite()) {
        return Err(Error::Assembly("mesh nodes must be finite and strictly increasing".into()));
    }
    let mut kd = vec![0.0; n_nodes];
    let mut ko = vec![0.0; n_nodes - 1];
    let mut vd = vec![0.0; n_nodes];
    let mut vo = vec![0.0; n_nodes - 1];
    let mut md = vec![0.0; n_nodes];
    for e in 0..n_nodes - 1 {
        let (x0, x1) = (nodes[e], nodes[e + 1]);
        let h = x1 - x0;
        let mid = 0.5 * (x0 + x1);
        for (g, wg) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
            let x = mid + 0.5 * h * g;
            let wq = 0.5 * h * wg;
            let p1 = 0.5 * (1.0 + g);
            let p0 = 1.0 - p1;
            let a = stiffness(x) * wq / (h * h);
            kd[e] += a;
            kd[e + 1] += a;
            ko[e] -= a;
            let v = potential(x) * wq;
            vd[e] += v * p0 * p0;
            vd[e + 1] += v * p1 * p1;
            vo[e] += v * p0 * p1;
            let m = mass(x) * wq;
            md[e] += m * p0;
            md[e + 1] += m * p1;
        }
    }
    let inner = 1..n_nodes - 1;
    let m: Vec<f64> = md[inner.clone()].to_vec();
    if let Some((i, v)) = m.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Assembly(format!(
            "non-positive lumped mass {v:e} at node {} (x = {})",
            i + 1,
            nodes[i + 1]
        )));
    }
    let n = m.len();
    let scale: Vec<f64> = m.iter().map(|v| 1.0 / sqrt(*v)).collect();
    let mut diagonal = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut prad = 0.0f64;
    for i in 0..n {
        let k = i + 1;
        diagonal.push((kd[k] + vd[k]) * scale[i] * scale[i]);
        let mut r = abs(vd[k]) * scale[i] * scale[i];
        if i + 1 < n {
            off.push((ko[k] + vo[k]) * scale[i] * scale[i + 1]);
            r += abs(vo[k]) * scale[i] * scale[i + 1];
        }
        if i > 0 {
            r += abs(vo[k - 1]) * scale[i - 1] * scale[i];
        }
        prad = prad.max(r);
    }
    let mut t = TridiagonalSystem::new(diagonal, off)?;
    t.nodes = nodes.to_vec();
    t.coordinate = coordinate;
    t.mass = m;
    t.potential_radius = prad;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;
    use libm::cos;

    #[test]
    fn toy_three_by_three() {
        let t = TridiagonalSystem::new(vec![2.0; 3], vec![-1.0; 2]).unwrap();
        let l = t.lambda_min();
        assert!(abs(l - (2.0 - 2f64.sqrt())) < 1e-14);
        for k in 0..3 {
            let exact = 2.0 - 2.0 * cos((k + 1) as f64 * PI / 4.0);
            assert!(abs(t.eigenvalue(k) - exact) < 1e-14);
        }
        assert_eq!(t.sturm_count(l - 2.0 * t.accuracy()), 0);
    }

    #[test]
    fn identity_like() {
        let t = TridiagonalSystem::new(vec![1.0; 5], vec![0.0; 4]).unwrap();
        assert!(abs(t.lambda_min() - 1.0) < 1e-15);
    }

    #[test]
    fn eigenvector_of_toy() {
        let t = TridiagonalSystem::new(vec![2.0; 3], vec![-1.0; 2]).unwrap();
        let v = t.eigenvector(t.lambda_min());
        let s = 0.5;
        let exact = [s, core::f64::consts::FRAC_1_SQRT_2, s];
        for (a, b) in v.iter().zip(exact.iter()) {
            assert!(abs(a - b) < 1e-10);
        }
        assert!(abs(t.rayleigh_quotient(&v) - t.lambda_min()) < 1e-12);
    }

    #[test]
    fn dirichlet_laplacian() {
        let nodes: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let t = assemble_form(&nodes, Coordinate::Linear, |_| 1.0, |_| 0.0, |_| 1.0).unwrap();
        let l = t.lambda_min();
        assert!(abs(l / (PI * PI) - 1.0) < 5e-3);
        assert_eq!(t.potential_radius, 0.0);
    }

    #[test]
    fn rejects_bad_mass() {
        let nodes = [0.0, 0.5, 1.0];
        assert!(matches!(
            assemble_form(&nodes, Coordinate::Linear, |_| 1.0, |_| 0.0, |_| 0.0),
            Err(Error::Assembly(_))
        ));
        assert!(TridiagonalSystem::new(vec![1.0, 2.0], vec![]).is_err());
    }
}
