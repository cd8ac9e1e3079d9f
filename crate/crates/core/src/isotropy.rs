//! Isotropic position and the isotropic constant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::polytope::{moments, MomentData, PolytopeV};

/// Result of mapping a body to isotropic position by `x ↦ S(x - μ)`.
#[derive(Debug, Clone, Serialize)]
pub struct IsotropicReport {
    pub transform_linear: Matrix,
    /// Applied after the linear part: `x ↦ S x + shift`, so `shift = -S μ`.
    pub transform_shift: Vec<f64>,
    pub body: PolytopeV,
    pub centroid_residual: f64,
    pub covariance_residual: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

/// Centroid tolerance for a body to count as isotropic.
pub const CENTROID_TOL: f64 = 1e-8;
/// Covariance tolerance for a body to count as isotropic.
pub const COVARIANCE_TOL: f64 = 1e-7;

/// `L^{2d} = det A / vol²` from precomputed moments.
pub fn l_pow_2d_from_moments(m: &MomentData) -> f64 {
    linalg::det(&m.covariance) / (m.volume * m.volume)
}

/// `L^{2d}` of a polytope.
pub fn isotropic_constant_pow_2d(p: &PolytopeV) -> Result<f64> {
    let m = moments(p)?;
    let v = l_pow_2d_from_moments(&m);
    if !(v > 0.0) {
        return Err(Error::NotPositiveDefinite(v));
    }
    Ok(v)
}

/// The isotropic constant `L = (det A / vol²)^{1/(2d)}`.
pub fn isotropic_constant(p: &PolytopeV) -> Result<f64> {
    Ok(isotropic_constant_pow_2d(p)?.powf(1.0 / (2.0 * p.dim as f64)))
}

/// Residuals `(‖μ‖∞, ‖A - I‖∞)` measuring distance from isotropic position.
pub fn isotropy_residuals(m: &MomentData) -> (f64, f64) {
    let d = m.centroid.len();
    (
        linalg::norm_inf(&m.centroid),
        m.covariance.sub(&Matrix::identity(d)).max_abs(),
    )
}

/// Errors with [`Error::NotIsotropic`] unless the moments are isotropic.
pub fn require_isotropic(m: &MomentData) -> Result<()> {
    let (c, a) = isotropy_residuals(m);
    if c > CENTROID_TOL || a > COVARIANCE_TOL {
        return Err(Error::NotIsotropic {
            centroid: c,
            covariance: a,
        });
    }
    Ok(())
}

/// Maps the body to isotropic position with the symmetric whitening map.
pub fn isotropic_position(p: &PolytopeV) -> Result<IsotropicReport> {
    let m = moments(p)?;
    let s = linalg::inv_sqrt(&m.covariance)?;
    let shift = linalg::scale(&s.mul_vec(&m.centroid), -1.0);
    let body = p.map_affine(&s, &shift);
    let image = moments(&body)?;
    let (centroid_residual, covariance_residual) = isotropy_residuals(&image);
    let l = l_pow_2d_from_moments(&image).powf(1.0 / (2.0 * p.dim as f64));
    Ok(IsotropicReport {
        transform_linear: s,
        transform_shift: shift,
        body,
        centroid_residual,
        covariance_residual,
        l,
    })
}

/// The regular simplex in isotropic position: `|v_i|² = d(d+2)`, `v_i·v_j = -(d+2)`.
///
/// Built from the centred standard basis of `R^{d+1}` expressed in the
/// Helmert basis of the hyperplane orthogonal to the all-ones vector.
pub fn regular_simplex_isotropic(d: usize) -> PolytopeV {
    assert!((1..=16).contains(&d), "dimension out of range");
    let scale = (((d + 1) * (d + 2)) as f64).sqrt();
    // Helmert row k (1-based): (1,…,1,-k,0,…)/sqrt(k(k+1)) with k ones
    let vertices: Vec<Vec<f64>> = (0..=d)
        .map(|i| {
            (1..=d)
                .map(|k| {
                    let norm = ((k * (k + 1)) as f64).sqrt();
                    let entry = if i < k {
                        1.0
                    } else if i == k {
                        -(k as f64)
                    } else {
                        0.0
                    };
                    // centring leaves Helmert coordinates unchanged
                    scale * entry / norm
                })
                .collect()
        })
        .collect();
    let c = vec![0.0; d];
    let facets = (0..=d)
        .map(|skip| {
            let mut f: Vec<usize> = (0..=d).filter(|&i| i != skip).collect();
            if d >= 2 {
                let pts: Vec<Vec<f64>> = f.iter().map(|&i| vertices[i].clone()).collect();
                let edges: Vec<Vec<f64>> = pts[1..].iter().map(|p| linalg::sub(p, &pts[0])).collect();
                let n = linalg::generalized_cross(&edges, d);
                if linalg::dot(&n, &linalg::sub(&c, &pts[0])) > 0.0 {
                    f.swap(0, 1);
                }
            }
            f
        })
        .collect();
    PolytopeV::new(d, vertices, facets)
}

/// Exact value predicted for the normalized random-simplex volume moment:
/// `M_2(K; d+1) = L^{2d} (d+1) / d!`.
pub fn m2_identity_lhs(p: &PolytopeV) -> Result<f64> {
    let d = p.dim;
    Ok(isotropic_constant_pow_2d(p)? * (d + 1) as f64 / linalg::factorial(d))
}
