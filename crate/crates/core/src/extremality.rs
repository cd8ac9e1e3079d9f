//! First-order extremality conditions and facet hinging.
//!
//! Hinging rotates the supporting halfspace of one facet about the affine
//! hull of the facet's other `d-1` vertices (a ridge). Positive angles tilt
//! the hyperplane away from the body on the apex side, so volume is added.
//! To first order this deposits mass on the facet with density proportional
//! to the distance from the hinge axis, i.e. to the apex's barycentric
//! coordinate, and for an isotropic body
//!
//! ```text
//! d/dt L^{2d} = (E_D |X|² - d - 2) · (d/dt vol) / vol³
//! ```
//!
//! where `E_D |X|²` has the closed form
//! `2/((d+1)(d+2)) · Σ_{i≤j} (1 + δ_ik + δ_jk) ⟨v_i, v_j⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull;
use crate::isotropy::{self, require_isotropic};
use crate::linalg;
use crate::polytope::{self, moments, to_halfspaces_with_map, Halfspace, MomentData, PolytopeH, PolytopeV};

/// Which facet hinges, about which ridge, and by how much.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HingeSpec {
    pub facet_index: usize,
    /// Position within the facet tuple of the vertex off the hinge axis.
    pub apex_index: usize,
    /// Rotation angle in radians.
    pub angle: f64,
}

impl HingeSpec {
    pub fn new(facet_index: usize, apex_index: usize, angle: f64) -> Self {
        Self {
            facet_index,
            apex_index,
            angle,
        }
    }

    fn check(&self, p: &PolytopeV) -> Result<()> {
        if p.dim < 2 {
            return Err(Error::InvalidInput("hinging needs dimension at least 2".into()));
        }
        if self.facet_index >= p.facets.len() {
            return Err(Error::InvalidInput(format!("facet {} out of range", self.facet_index)));
        }
        if self.apex_index >= p.dim {
            return Err(Error::InvalidInput(format!("apex {} out of range", self.apex_index)));
        }
        if !(self.angle.abs() < std::f64::consts::FRAC_PI_4) {
            return Err(Error::InvalidInput(format!("hinge angle {} too large", self.angle)));
        }
        Ok(())
    }
}

/// First-order residuals of one facet, one entry per choice of apex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FocResidual {
    pub facet_index: usize,
    /// `Σ_{i≤j}(1+δ_ik+δ_jk)⟨v_i,v_j⟩ - (d+1)(d+2)²/2`
    pub per_vertex: Vec<f64>,
    /// `per_vertex` divided by `(d+1)(d+2)²/2`.
    pub relative: Vec<f64>,
}

impl FocResidual {
    pub fn max_abs(&self) -> f64 {
        linalg::norm_inf(&self.per_vertex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HingeReport {
    pub dvol_dt: f64,
    pub facet_second_moment: f64,
    #[serde(rename = "dL2d_dt")]
    pub dl2d_dt: f64,
}

/// `Σ_{1≤i≤j≤d} (1 + δ_ik + δ_jk) ⟨v_i, v_j⟩` over the facet vertices.
pub fn weighted_gram_sum(vertices: &[Vec<f64>], k: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..vertices.len() {
        for j in i..vertices.len() {
            let w = 1.0 + f64::from(u8::from(i == k)) + f64::from(u8::from(j == k));
            s += w * linalg::dot(&vertices[i], &vertices[j]);
        }
    }
    s
}

/// Value `(d+1)(d+2)²/2` the weighted Gram sum takes at a critical body.
pub fn foc_target(d: usize) -> f64 {
    let d = d as f64;
    (d + 1.0) * (d + 2.0) * (d + 2.0) / 2.0
}

/// Per-facet first-order residuals of an isotropic body.
pub fn foc_residuals(p_iso: &PolytopeV) -> Result<Vec<FocResidual>> {
    require_isotropic(&moments(p_iso)?)?;
    Ok(foc_residuals_unchecked(p_iso))
}

pub(crate) fn foc_residuals_unchecked(p: &PolytopeV) -> Vec<FocResidual> {
    let target = foc_target(p.dim);
    (0..p.facets.len())
        .map(|fi| {
            let vs = p.facet_vertices(fi);
            let per_vertex: Vec<f64> = (0..p.dim).map(|k| weighted_gram_sum(&vs, k) - target).collect();
            let relative = per_vertex.iter().map(|r| r / target).collect();
            FocResidual {
                facet_index: fi,
                per_vertex,
                relative,
            }
        })
        .collect()
}

/// `E‖X‖²` for `X` on the facet simplex with density proportional to the
/// barycentric coordinate of vertex `k`.
pub fn facet_second_moment(facet_vertices: &[Vec<f64>], k: usize) -> f64 {
    let d = facet_vertices.len() as f64;
    2.0 / ((d + 1.0) * (d + 2.0)) * weighted_gram_sum(facet_vertices, k)
}

/// Halfspace description of the hinged body `K_t`.
pub fn hinged_halfspaces(p: &PolytopeV, spec: &HingeSpec) -> Result<PolytopeH> {
    spec.check(p)?;
    let (mut h, map) = to_halfspaces_with_map(p)?;
    let slot = map[spec.facet_index];
    let plane = h.halfspaces[slot].clone();
    let facet = p.facet_vertices(spec.facet_index);
    let apex = facet[spec.apex_index].clone();
    let ridge: Vec<Vec<f64>> = facet
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != spec.apex_index)
        .map(|(_, v)| v.clone())
        .collect();
    let centre = linalg::mean(&ridge);

    // unit direction in the facet plane, orthogonal to the ridge, toward the apex
    let mut basis: Vec<Vec<f64>> = vec![plane.normal.clone()];
    for z in &ridge[1..] {
        let mut e = linalg::sub(z, &ridge[0]);
        for b in &basis {
            let c = linalg::dot(&e, b);
            e = linalg::axpy(&e, -c, b);
        }
        basis.push(linalg::normalized(&e));
    }
    let mut u = linalg::sub(&apex, &centre);
    for b in &basis {
        let c = linalg::dot(&u, b);
        u = linalg::axpy(&u, -c, b);
    }
    let u = linalg::normalized(&u);

    let (s, c) = spec.angle.sin_cos();
    let normal: Vec<f64> = plane.normal.iter().zip(&u).map(|(n, ui)| n * c - ui * s).collect();
    let offset = linalg::dot(&normal, &centre);
    h.halfspaces[slot] = Halfspace::new(normal, offset);
    Ok(h)
}

/// The hinged body `K_t`, rebuilt from its halfspace description.
pub fn hinge_polytope(p: &PolytopeV, spec: &HingeSpec) -> Result<PolytopeV> {
    let h = hinged_halfspaces(p, spec)?;
    hull::polytope_from_halfspaces(&h).map_err(|e| match e {
        Error::UnboundedOrEmpty(_) => Error::UnboundedResult,
        Error::DegenerateInput(msg) => Error::DegenerateResult(msg),
        other => other,
    })
}

/// Exact `d/dt vol(K_t)` at `t = 0`: `∫_F ρ = vol_{d-1}(F) · ρ_apex / d`.
pub fn dvol_dt(p: &PolytopeV, spec: &HingeSpec) -> Result<f64> {
    spec.check(p)?;
    let facet = p.facet_vertices(spec.facet_index);
    let apex = &facet[spec.apex_index];
    let ridge: Vec<Vec<f64>> = facet
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != spec.apex_index)
        .map(|(_, v)| v.clone())
        .collect();
    let rho_apex = linalg::distance_to_affine_hull(apex, &ridge);
    let area = linalg::simplex_volume_k(&facet);
    Ok(area * rho_apex / p.dim as f64)
}

/// Closed-form derivative of `L^{2d}` under hinging, for an isotropic body.
pub fn hinge_derivative(p_iso: &PolytopeV, spec: &HingeSpec) -> Result<HingeReport> {
    let m = moments(p_iso)?;
    require_isotropic(&m)?;
    hinge_derivative_with_volume(p_iso, spec, m.volume)
}

pub(crate) fn hinge_derivative_with_volume(p: &PolytopeV, spec: &HingeSpec, volume: f64) -> Result<HingeReport> {
    let dv = dvol_dt(p, spec)?;
    let facet = p.facet_vertices(spec.facet_index);
    let second = facet_second_moment(&facet, spec.apex_index);
    let d = p.dim as f64;
    let dl2d_dt = (second - d - 2.0) * dv / volume.powi(3);
    Ok(HingeReport {
        dvol_dt: dv,
        facet_second_moment: second,
        dl2d_dt,
    })
}

/// Moments of `K_t`, integrated directly from its halfspace description so
/// that features of size `O(t²)` are resolved without a face lattice.
fn hinged_moments(p: &PolytopeV, spec: &HingeSpec, t: f64) -> Result<MomentData> {
    let h = hinged_halfspaces(p, &HingeSpec { angle: t, ..*spec })?;
    polytope::halfspace_moments(&h).map_err(|e| match e {
        Error::UnboundedOrEmpty(_) => Error::UnboundedResult,
        other => other,
    })
}

/// Central difference of `t ↦ L^{2d}(K_t)` at `t = 0` with step `h`.
pub fn finite_difference_dl2d(p: &PolytopeV, spec: &HingeSpec, h: f64) -> Result<f64> {
    let plus = isotropy::l_pow_2d_from_moments(&hinged_moments(p, spec, h)?);
    let minus = isotropy::l_pow_2d_from_moments(&hinged_moments(p, spec, -h)?);
    Ok((plus - minus) / (2.0 * h))
}

/// Richardson extrapolation of the central difference from steps `h` and `h/2`.
pub fn richardson_dl2d(p: &PolytopeV, spec: &HingeSpec, h: f64) -> Result<f64> {
    let coarse = finite_difference_dl2d(p, spec, h)?;
    let fine = finite_difference_dl2d(p, spec, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Central difference of `t ↦ vol(K_t)` at `t = 0` with step `h`.
pub fn finite_difference_dvol(p: &PolytopeV, spec: &HingeSpec, h: f64) -> Result<f64> {
    let plus = hinged_moments(p, spec, h)?.volume;
    let minus = hinged_moments(p, spec, -h)?.volume;
    Ok((plus - minus) / (2.0 * h))
}
