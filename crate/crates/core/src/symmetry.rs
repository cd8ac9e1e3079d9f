//! Reflection symmetry, facet congruence, shaking and the double-cone test.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull;
use crate::isotropy::isotropic_constant;
use crate::linalg::{self, Matrix};
use crate::polytope::{moments, to_halfspaces, Halfspace, PolytopeH, PolytopeV};

/// Reflection defect below which a body counts as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReflectionCheck {
    /// The two facets sharing the ridge.
    pub ridge: [usize; 2],
    pub ridge_vertices: Vec<usize>,
    /// Unit normal of the hyperplane spanned by the ridge and the origin.
    pub hyperplane_normal: Vec<f64>,
    /// `max_v min_w |R v - w|` over vertices.
    pub defect: f64,
    pub symmetric: bool,
}

fn reflect(x: &[f64], unit_normal: &[f64]) -> Vec<f64> {
    linalg::axpy(x, -2.0 * linalg::dot(x, unit_normal), unit_normal)
}

/// Hausdorff-type defect of the vertex set under reflection in `{x : n·x = 0}`.
pub fn reflection_defect(vertices: &[Vec<f64>], unit_normal: &[f64]) -> f64 {
    vertices
        .iter()
        .map(|v| {
            let r = reflect(v, unit_normal);
            vertices
                .iter()
                .map(|w| linalg::dist(&r, w))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Reflection across the hyperplane through the origin and a ridge.
///
/// Meaningful for bodies in isotropic position, where every hyperplane of
/// symmetry passes through the centroid.
pub fn reflection_check(p: &PolytopeV, ridge_vertices: &[usize]) -> Result<ReflectionCheck> {
    let d = p.dim;
    if d < 2 || ridge_vertices.len() != d - 1 {
        return Err(Error::NotARidge(ridge_vertices.to_vec()));
    }
    let mut key = ridge_vertices.to_vec();
    key.sort_unstable();
    let facets = p.ridges().remove(&key).unwrap_or_default();
    if facets.len() != 2 {
        return Err(Error::NotARidge(key));
    }
    let vs: Vec<Vec<f64>> = key.iter().map(|&i| p.vertices[i].clone()).collect();
    let n = linalg::generalized_cross(&vs, d);
    let size: f64 = vs.iter().map(|v| linalg::norm(v)).product();
    if linalg::norm(&n) <= 1e-10 * size.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateHyperplane);
    }
    let n = linalg::normalized(&n);
    let defect = reflection_defect(&p.vertices, &n);
    Ok(ReflectionCheck {
        ridge: [facets[0], facets[1]],
        ridge_vertices: key,
        hyperplane_normal: n,
        defect,
        symmetric: defect <= SYMMETRY_TOL,
    })
}

/// [`reflection_check`] for every ridge whose hyperplane is well defined.
pub fn all_reflection_checks(p: &PolytopeV) -> Vec<ReflectionCheck> {
    p.ridges().keys().filter_map(|r| reflection_check(p, r).ok()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Congruence {
    CongruentAll,
    NotCongruent,
}

/// Facet congruence, a necessary condition for isohedrality only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsohedralityCheck {
    pub verdict: Congruence,
    /// A pair of non-congruent facets when the verdict is negative.
    pub witness: Option<[usize; 2]>,
    /// Largest deviation between sorted edge-length lists and facet 0.
    pub max_deviation: f64,
}

fn sorted_edge_lengths(vs: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            out.push(linalg::dist(&vs[i], &vs[j]));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Compares each facet's sorted edge lengths with facet 0's; a simplex is
/// determined up to isometry by its edge lengths.
pub fn isohedrality_check(p: &PolytopeV) -> IsohedralityCheck {
    let tol = 1e-7 * p.scale();
    let base = sorted_edge_lengths(&p.facet_vertices(0));
    let mut witness = None;
    let mut max_deviation = 0.0f64;
    for f in 1..p.facets.len() {
        let other = sorted_edge_lengths(&p.facet_vertices(f));
        let dev = base.iter().zip(&other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        max_deviation = max_deviation.max(dev);
        if dev > tol && witness.is_none() {
            witness = Some([0, f]);
        }
    }
    IsohedralityCheck {
        verdict: if witness.is_none() {
            Congruence::CongruentAll
        } else {
            Congruence::NotCongruent
        },
        witness,
        max_deviation,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShakeResult {
    /// Coordinate that carries the shaking direction in the rotated frame.
    pub direction_axis: usize,
    pub body: PolytopeV,
    #[serde(rename = "L_before")]
    pub l_before: f64,
    #[serde(rename = "L_after")]
    pub l_after: f64,
}

/// Householder frame `Q` with `Q e_d = u`; `Q` is symmetric, so `y = Q x`
/// expresses `x` in the frame and `x = Q y` maps back.
pub fn shaking_frame(direction: &[f64]) -> Result<Matrix> {
    let n = linalg::norm(direction);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidInput("shaking direction must be nonzero".into()));
    }
    Ok(linalg::frame_with_last_axis(direction))
}

/// Halfspaces in the rotated frame, split by the sign of the last normal component.
struct Split {
    upper: Vec<Halfspace>,
    lower: Vec<Halfspace>,
    vertical: Vec<Halfspace>,
}

fn split_halfspaces(h: &PolytopeH, q: &Matrix) -> Split {
    let d = h.dim;
    let mut s = Split {
        upper: Vec::new(),
        lower: Vec::new(),
        vertical: Vec::new(),
    };
    for g in &h.halfspaces {
        let a = q.mul_vec(&g.normal);
        let rotated = Halfspace::new(a, g.offset);
        let ay = rotated.normal[d - 1];
        if ay.abs() <= 1e-12 {
            s.vertical.push(rotated);
        } else if ay > 0.0 {
            s.upper.push(rotated);
        } else {
            s.lower.push(rotated);
        }
    }
    s
}

/// The shaken body's halfspaces in the rotated frame.
fn shaken_halfspaces(split: &Split, d: usize) -> PolytopeH {
    let mut out = split.vertical.clone();
    let mut floor = vec![0.0; d];
    floor[d - 1] = -1.0;
    out.push(Halfspace::new(floor, 0.0));
    for u in &split.upper {
        for l in &split.lower {
            // y ≤ (b_u - a_u'x)/a_uy - (b_l - a_l'x)/a_ly
            let (au, al) = (u.normal[d - 1], l.normal[d - 1]);
            let mut n: Vec<f64> = (0..d - 1).map(|k| u.normal[k] / au - l.normal[k] / al).collect();
            n.push(1.0);
            out.push(Halfspace::new(n, u.offset / au - l.offset / al));
        }
    }
    PolytopeH {
        dim: d,
        halfspaces: out,
    }
}

/// Shaking (Schüttelung) towards the hyperplane orthogonal to `direction`:
/// every chord parallel to `direction` is translated so that it starts on
/// that hyperplane, giving `{(x, y) : 0 ≤ y ≤ -g(x) - f(x)}` in the frame.
pub fn shake(p: &PolytopeV, direction: &[f64]) -> Result<ShakeResult> {
    if direction.len() != p.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            found: direction.len(),
        });
    }
    let d = p.dim;
    let q = shaking_frame(direction)?;
    let h = to_halfspaces(p)?;
    let split = split_halfspaces(&h, &q);
    let shaken = shaken_halfspaces(&split, d);
    let rotated = hull::polytope_from_halfspaces(&shaken).map_err(|e| Error::DegenerateResult(e.to_string()))?;
    let body = rotated.map_affine(&q, &vec![0.0; d]);
    Ok(ShakeResult {
        direction_axis: d - 1,
        l_before: isotropic_constant(p)?,
        l_after: isotropic_constant(&body)?,
        body,
    })
}

/// Lower envelope `f(x)` of the body along `direction` at frame coordinates `x`.
pub fn lower_envelope_in_frame(h_frame: &PolytopeH, x: &[f64]) -> Result<f64> {
    Ok(crate::polytope::envelopes(h_frame, x)?.0)
}

/// The body's halfspaces expressed in the shaking frame of `direction`.
pub fn halfspaces_in_frame(p: &PolytopeV, direction: &[f64]) -> Result<(Matrix, PolytopeH)> {
    let q = shaking_frame(direction)?;
    let h = to_halfspaces(p)?;
    let halfspaces = h
        .halfspaces
        .iter()
        .map(|g| Halfspace::new(q.mul_vec(&g.normal), g.offset))
        .collect();
    Ok((q, PolytopeH { dim: p.dim, halfspaces }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DoubleCone {
    IsSimplex,
    NotSimplex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleConeCheck {
    pub verdict: DoubleCone,
    /// Upper envelope at the vertices of the projected simplex.
    pub heights: Vec<f64>,
    pub nonzero_heights: usize,
    pub symmetry_defect: f64,
}

/// For a body symmetric about `{x : n·x = 0}` whose projection onto that
/// hyperplane is a simplex, counts the vertices of the projection where the
/// upper envelope is nonzero; the body is a simplex iff exactly one is.
pub fn double_cone_check(p: &PolytopeV, hyperplane_normal: &[f64]) -> Result<DoubleConeCheck> {
    let d = p.dim;
    if d < 3 {
        return Err(Error::InvalidInput(
            "double-cone check needs dimension at least 3".into(),
        ));
    }
    if hyperplane_normal.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: hyperplane_normal.len(),
        });
    }
    let q = shaking_frame(hyperplane_normal)?;
    let n = linalg::normalized(hyperplane_normal);
    let scale = p.scale();
    let defect = reflection_defect(&p.vertices, &n);
    if defect > 1e-7 * scale {
        return Err(Error::NotSymmetricAboutHyperplane(defect));
    }
    // merge vertices over the same projected point, keeping the top height
    let mut shadow: Vec<(Vec<f64>, f64)> = Vec::new();
    for v in &p.vertices {
        let y = q.mul_vec(v);
        let (x, h) = (y[..d - 1].to_vec(), y[d - 1]);
        match shadow.iter_mut().find(|(s, _)| linalg::dist(s, &x) <= 1e-9 * scale) {
            Some(entry) => entry.1 = entry.1.max(h),
            None => shadow.push((x, h)),
        }
    }
    let pts: Vec<Vec<f64>> = shadow.iter().map(|(x, _)| x.clone()).collect();
    let projection = hull::facet_enumeration(&pts)?;
    if projection.vertices.len() != d {
        return Err(Error::ProjectionNotSimplex(projection.vertices.len()));
    }
    let heights: Vec<f64> = projection
        .vertices
        .iter()
        .map(|v| shadow.iter().find(|(s, _)| s == v).map_or(0.0, |s| s.1))
        .collect();
    let nonzero_heights = heights.iter().filter(|h| h.abs() > 1e-8 * scale).count();
    Ok(DoubleConeCheck {
        verdict: if nonzero_heights == 1 {
            DoubleCone::IsSimplex
        } else {
            DoubleCone::NotSimplex
        },
        heights,
        nonzero_heights,
        symmetry_defect: defect,
    })
}

/// Relative volume change `|vol(after) - vol(before)| / vol(before)`.
pub fn volume_drift(before: &PolytopeV, after: &PolytopeV) -> Result<f64> {
    let a = moments(before)?.volume;
    let b = moments(after)?.volume;
    Ok((a - b).abs() / a)
}
