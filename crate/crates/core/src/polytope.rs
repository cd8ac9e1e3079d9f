//! Polytope representations, validation, fan triangulation and exact moments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Vertex description of a full-dimensional polytope with simplicial facets.
///
/// Each facet is a list of `dim` vertex indices. The ordering encodes the
/// orientation: with `e_i = v_i - v_0`, the vector `n` defined by
/// `n·w = det[e_1; …; e_{d-1}; w]` points out of the body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeV {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Vec<usize>>,
}

/// Closed halfspace `normal·x ≤ offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Signed slack `normal·x - offset` (positive means violated).
    pub fn excess(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.normal, x) - self.offset
    }

    pub fn normalized(&self) -> Self {
        let n = linalg::norm(&self.normal);
        Self {
            normal: linalg::scale(&self.normal, 1.0 / n),
            offset: self.offset / n,
        }
    }
}

/// Halfspace description; interpreted as the intersection of all halfspaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeH {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
}

/// A `d`-simplex given by `d+1` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    pub vertices: Vec<Vec<f64>>,
}

/// Exact moments of the uniform distribution on a body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentData {
    pub volume: f64,
    pub centroid: Vec<f64>,
    /// `E[X Xᵀ]`
    pub raw_second: Matrix,
    /// `E[(X-μ)(X-μ)ᵀ]`
    pub covariance: Matrix,
}

/// One failed invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    BadDimension { dim: usize },
    VertexDimension { vertex: usize, len: usize },
    NonFinite { vertex: usize },
    NotFullDimensional { rank: usize },
    FacetArity { facet: usize, len: usize },
    IndexOutOfRange { facet: usize, index: usize },
    RepeatedIndex { facet: usize },
    AffinelyDependent { facet: usize },
    NotSupporting { facet: usize, vertex: usize, excess: f64 },
    InwardOrientation { facet: usize },
    OpenRidge { ridge: Vec<usize>, facets: Vec<usize> },
    NoFacets,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidPolytope(format!("{v:?}"))),
        }
    }
}

/// On-disk JSON layout; `facets` may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Vec<usize>>>,
}

impl PolytopeV {
    pub fn new(dim: usize, vertices: Vec<Vec<f64>>, facets: Vec<Vec<usize>>) -> Self {
        Self { dim, vertices, facets }
    }

    /// Parses the JSON polytope format, computing the hull when facets are absent.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolytopeFile = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if let Some(v) = file.vertices.iter().find(|v| v.len() != file.dim) {
            return Err(Error::InvalidInput(format!(
                "vertex of length {} in a dim {} file",
                v.len(),
                file.dim
            )));
        }
        match file.facets {
            Some(facets) => Ok(Self::new(file.dim, file.vertices, facets)),
            None => crate::hull::facet_enumeration(&file.vertices),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    /// Diameter of the vertex set; the length scale for tolerances.
    pub fn scale(&self) -> f64 {
        linalg::diameter(&self.vertices)
    }

    pub fn vertex_average(&self) -> Vec<f64> {
        linalg::mean(&self.vertices)
    }

    pub fn facet_vertices(&self, facet: usize) -> Vec<Vec<f64>> {
        self.facets[facet].iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// Orientation vector of a facet tuple (not normalized), see the type docs.
    pub fn facet_orientation_vector(&self, facet: usize) -> Vec<f64> {
        let pts = self.facet_vertices(facet);
        if self.dim == 1 {
            return vec![1.0];
        }
        let edges: Vec<Vec<f64>> = pts[1..].iter().map(|p| linalg::sub(p, &pts[0])).collect();
        linalg::generalized_cross(&edges, self.dim)
    }

    /// Outward unit normal and offset of a facet's supporting hyperplane,
    /// oriented geometrically (away from the vertex average).
    pub fn facet_plane(&self, facet: usize) -> Halfspace {
        let pts = self.facet_vertices(facet);
        let c = self.vertex_average();
        let mut n = linalg::normalized(&self.facet_orientation_vector(facet));
        if linalg::dot(&n, &linalg::sub(&c, &pts[0])) > 0.0 {
            n = linalg::scale(&n, -1.0);
        }
        let offset = linalg::dot(&n, &pts[0]);
        Halfspace::new(n, offset)
    }

    /// Map of every ridge (sorted `d-1` vertex indices) to the facets containing it.
    pub fn ridges(&self) -> BTreeMap<Vec<usize>, Vec<usize>> {
        let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        if self.dim < 2 {
            return map;
        }
        for (fi, f) in self.facets.iter().enumerate() {
            for skip in 0..f.len() {
                let mut r: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                r.sort_unstable();
                map.entry(r).or_default().push(fi);
            }
        }
        map
    }

    /// Image under `x ↦ linear·x + shift`; facet orientation is kept outward.
    pub fn map_affine(&self, linear: &Matrix, shift: &[f64]) -> PolytopeV {
        let vertices = self
            .vertices
            .iter()
            .map(|v| linalg::add(&linear.mul_vec(v), shift))
            .collect();
        let mut facets = self.facets.clone();
        if self.dim >= 2 && linalg::det(linear) < 0.0 {
            for f in &mut facets {
                f.swap(0, 1);
            }
        }
        PolytopeV::new(self.dim, vertices, facets)
    }

    pub fn translate(&self, t: &[f64]) -> PolytopeV {
        self.map_affine(&Matrix::identity(self.dim), t)
    }
}

/// Checks every structural invariant of a [`PolytopeV`].
pub fn validate(p: &PolytopeV) -> ValidationReport {
    let mut violations = Vec::new();
    let d = p.dim;
    if d == 0 {
        violations.push(Violation::BadDimension { dim: d });
        return ValidationReport { violations };
    }
    for (i, v) in p.vertices.iter().enumerate() {
        if v.len() != d {
            violations.push(Violation::VertexDimension {
                vertex: i,
                len: v.len(),
            });
        } else if v.iter().any(|x| !x.is_finite()) {
            violations.push(Violation::NonFinite { vertex: i });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    if p.vertices.len() < d + 1 {
        violations.push(Violation::NotFullDimensional {
            rank: p.vertices.len().saturating_sub(1),
        });
        return ValidationReport { violations };
    }
    let edges: Vec<Vec<f64>> = p.vertices[1..].iter().map(|v| linalg::sub(v, &p.vertices[0])).collect();
    let r = linalg::rank(&edges, 1e-10);
    if r < d {
        violations.push(Violation::NotFullDimensional { rank: r });
        return ValidationReport { violations };
    }
    if p.facets.is_empty() {
        violations.push(Violation::NoFacets);
        return ValidationReport { violations };
    }
    let mut structural_ok = true;
    for (fi, f) in p.facets.iter().enumerate() {
        if f.len() != d {
            violations.push(Violation::FacetArity {
                facet: fi,
                len: f.len(),
            });
            structural_ok = false;
            continue;
        }
        if let Some(&bad) = f.iter().find(|&&i| i >= p.vertices.len()) {
            violations.push(Violation::IndexOutOfRange { facet: fi, index: bad });
            structural_ok = false;
            continue;
        }
        let mut s = f.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != f.len() {
            violations.push(Violation::RepeatedIndex { facet: fi });
            structural_ok = false;
        }
    }
    if !structural_ok {
        return ValidationReport { violations };
    }

    let scale = p.scale();
    let tol = 1e-9 * scale;
    let c = p.vertex_average();
    for fi in 0..p.facets.len() {
        let pts = p.facet_vertices(fi);
        let orient = p.facet_orientation_vector(fi);
        let n_len = linalg::norm(&orient);
        // degeneracy is judged against the facet's own edge lengths, not the body's
        let edge_product: f64 = pts[1..]
            .iter()
            .map(|q| linalg::norm(&linalg::sub(q, &pts[0])))
            .product();
        if d >= 2 && !(n_len > 1e-12 * edge_product) {
            violations.push(Violation::AffinelyDependent { facet: fi });
            continue;
        }
        let plane = p.facet_plane(fi);
        // a needle facet fixes its plane only up to noise * diam / thickness
        let tol_f = if d >= 2 {
            let mut diam: f64 = 0.0;
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    diam = diam.max(linalg::norm(&linalg::sub(&pts[a], &pts[b])));
                }
            }
            tol + 1e-12 * scale * diam.powi(d as i32 - 1) / n_len
        } else {
            tol
        };
        for (vi, v) in p.vertices.iter().enumerate() {
            let e = plane.excess(v);
            if e > tol_f {
                violations.push(Violation::NotSupporting {
                    facet: fi,
                    vertex: vi,
                    excess: e,
                });
                break;
            }
        }
        if d >= 2 && linalg::dot(&orient, &linalg::sub(&c, &pts[0])) > 0.0 {
            violations.push(Violation::InwardOrientation { facet: fi });
        }
    }
    for (ridge, facets) in p.ridges() {
        if facets.len() != 2 {
            violations.push(Violation::OpenRidge { ridge, facets });
        }
    }
    ValidationReport { violations }
}

/// Fan decomposition from the vertex average over every facet.
pub fn triangulate(p: &PolytopeV) -> Result<Vec<Simplex>> {
    validate(p).into_result()?;
    let apex = p.vertex_average();
    let simplices = p
        .facets
        .iter()
        .map(|f| {
            let mut vs = Vec::with_capacity(p.dim + 1);
            vs.push(apex.clone());
            vs.extend(f.iter().map(|&i| p.vertices[i].clone()));
            Simplex { vertices: vs }
        })
        .collect::<Vec<_>>();
    // outward facets put the interior apex on the side giving sign (-1)^(d+1)
    let expected = if p.dim % 2 == 1 { 1.0 } else { -1.0 };
    for (i, s) in simplices.iter().enumerate() {
        let det = s.signed_volume_factor();
        let bad = if p.dim >= 2 { det * expected <= 0.0 } else { det == 0.0 };
        if bad {
            return Err(Error::InvalidPolytope(format!("fan apex not interior to facet {i}")));
        }
    }
    Ok(simplices)
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    fn edge_matrix(&self) -> Matrix {
        let v0 = &self.vertices[0];
        let edges: Vec<Vec<f64>> = self.vertices[1..].iter().map(|v| linalg::sub(v, v0)).collect();
        Matrix::from_rows(&edges)
    }

    /// Determinant of the edge matrix `[v_1-v_0; …; v_d-v_0]`.
    pub fn signed_volume_factor(&self) -> f64 {
        linalg::det(&self.edge_matrix())
    }

    pub fn volume(&self) -> f64 {
        self.signed_volume_factor().abs() / linalg::factorial(self.dim())
    }
}

/// Exact moments of the uniform distribution on a simplex.
///
/// With `s = Σ v_i`: volume `|det(v_i - v_0)|/d!`, centroid `s/(d+1)` and
/// `E[XXᵀ] = (Σ v_i v_iᵀ + s sᵀ) / ((d+1)(d+2))`.
pub fn simplex_moments(s: &Simplex) -> Result<MomentData> {
    let d = s.dim();
    let det = s.signed_volume_factor();
    let scale = linalg::diameter(&s.vertices);
    if !(det.abs() > 1e-12 * scale.powi(d as i32)) {
        return Err(Error::DegenerateSimplex(det.abs()));
    }
    let volume = det.abs() / linalg::factorial(d);
    // second moments about v_0 keep cancellation small for far-off simplices
    let origin = &s.vertices[0];
    let rel: Vec<Vec<f64>> = s.vertices.iter().map(|v| linalg::sub(v, origin)).collect();
    let (centroid_rel, second_rel) = local_moments(&rel, d);
    let centroid = linalg::add(&centroid_rel, origin);
    let covariance = second_rel.sub(&Matrix::outer(&centroid_rel, &centroid_rel));
    let raw_second = covariance.add(&Matrix::outer(&centroid, &centroid));
    Ok(MomentData {
        volume,
        centroid,
        raw_second,
        covariance,
    })
}

fn local_moments(vs: &[Vec<f64>], d: usize) -> (Vec<f64>, Matrix) {
    let mut sum = vec![0.0; d];
    let mut acc = Matrix::zeros(d, d);
    for v in vs {
        sum = linalg::add(&sum, v);
        acc = acc.add(&Matrix::outer(v, v));
    }
    let k = (d + 1) as f64;
    let second = acc.add(&Matrix::outer(&sum, &sum)).scaled(1.0 / (k * (k + 1.0)));
    (linalg::scale(&sum, 1.0 / k), second)
}

/// Exact moments of the uniform distribution on a polytope.
pub fn moments(p: &PolytopeV) -> Result<MomentData> {
    let simplices = triangulate(p)?;
    let d = p.dim;
    let apex = p.vertex_average();
    let mut vols = Vec::with_capacity(simplices.len());
    let mut first: Vec<Vec<f64>> = vec![Vec::with_capacity(simplices.len()); d];
    let mut second: Vec<Vec<f64>> = vec![Vec::with_capacity(simplices.len()); d * d];
    for s in &simplices {
        let vol = s.volume();
        let rel: Vec<Vec<f64>> = s.vertices.iter().map(|v| linalg::sub(v, &apex)).collect();
        let (c, m) = local_moments(&rel, d);
        vols.push(vol);
        for i in 0..d {
            first[i].push(vol * c[i]);
            for j in 0..d {
                second[i * d + j].push(vol * m[(i, j)]);
            }
        }
    }
    let volume = linalg::pairwise_sum(&vols);
    let centroid_rel: Vec<f64> = first.iter().map(|xs| linalg::pairwise_sum(xs) / volume).collect();
    let mut second_rel = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            second_rel[(i, j)] = linalg::pairwise_sum(&second[i * d + j]) / volume;
        }
    }
    let mut covariance = second_rel.sub(&Matrix::outer(&centroid_rel, &centroid_rel));
    for i in 0..d {
        for j in (i + 1)..d {
            let s = 0.5 * (covariance[(i, j)] + covariance[(j, i)]);
            covariance[(i, j)] = s;
            covariance[(j, i)] = s;
        }
    }
    let centroid = linalg::add(&centroid_rel, &apex);
    let raw_second = covariance.add(&Matrix::outer(&centroid, &centroid));
    Ok(MomentData {
        volume,
        centroid,
        raw_second,
        covariance,
    })
}

/// Moments of a bounded halfspace intersection, integrated facet by facet
/// through the recursion `∫_P f = (Σ_i b_i ∫_{F_i} f) / (k + q)` for `f`
/// homogeneous of degree `q` in `R^k`. No face lattice is built: empty and
/// redundant facets contribute zero, so arbitrarily small facets are handled
/// continuously. Cost grows like `m^(d-1)` in the number of halfspaces;
/// accuracy is best with the origin inside the body. Each level of nearly
/// coplanar facet planes divides roundoff by their angle, so a cluster of
/// four planes within 1e-4 rad of each other can lose all but a few digits.
pub fn halfspace_moments(h: &PolytopeH) -> Result<MomentData> {
    let d = h.dim;
    let mut cons = Vec::with_capacity(h.halfspaces.len());
    for g in &h.halfspaces {
        if g.normal.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: g.normal.len(),
            });
        }
        if linalg::norm(&g.normal) == 0.0 {
            if g.offset < 0.0 {
                return Err(Error::UnboundedOrEmpty("infeasible trivial constraint".into()));
            }
            continue;
        }
        let g = g.normalized();
        cons.push((g.normal, g.offset));
    }
    let (volume, first, second) = integrate_halfspaces(&cons, d);
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::UnboundedOrEmpty(format!("integrated volume {volume}")));
    }
    let centroid: Vec<f64> = first.iter().map(|x| x / volume).collect();
    let mut raw_second = second.scaled(1.0 / volume);
    for i in 0..d {
        for j in (i + 1)..d {
            let s = 0.5 * (raw_second[(i, j)] + raw_second[(j, i)]);
            raw_second[(i, j)] = s;
            raw_second[(j, i)] = s;
        }
    }
    let covariance = raw_second.sub(&Matrix::outer(&centroid, &centroid));
    Ok(MomentData {
        volume,
        centroid,
        raw_second,
        covariance,
    })
}

/// `(∫1, ∫x, ∫xxᵀ)` over `{x ∈ R^k : a·x ≤ b}` for unit normals `a`.
fn integrate_halfspaces(cons: &[(Vec<f64>, f64)], k: usize) -> (f64, Vec<f64>, Matrix) {
    if k == 1 {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (a, b) in cons {
            if a[0] > 0.0 {
                hi = hi.min(b / a[0]);
            } else {
                lo = lo.max(b / a[0]);
            }
        }
        let mut m = Matrix::zeros(1, 1);
        if !(hi > lo) {
            return (0.0, vec![0.0], m);
        }
        m[(0, 0)] = (hi.powi(3) - lo.powi(3)) / 3.0;
        return (hi - lo, vec![(hi * hi - lo * lo) / 2.0], m);
    }
    let mut vol = 0.0;
    let mut first = vec![0.0; k];
    let mut second = Matrix::zeros(k, k);
    'facets: for (i, (a, b)) in cons.iter().enumerate() {
        let q = linalg::frame_with_last_axis(a);
        let basis: Vec<Vec<f64>> = (0..k - 1).map(|c| q.col(c)).collect();
        let foot = linalg::scale(a, *b);
        let mut sub = Vec::with_capacity(cons.len() - 1);
        for (j, (aj, bj)) in cons.iter().enumerate() {
            if j == i {
                continue;
            }
            let c: Vec<f64> = basis.iter().map(|u| linalg::dot(u, aj)).collect();
            let e = bj - linalg::dot(aj, &foot);
            let len = linalg::norm(&c);
            if len <= 1e-9 {
                // parallel: the facet is empty, flat (opposite constraint through
                // it), a duplicate of an earlier one, or not cut by `j`
                let tol = 1e-11 * (1.0 + b.abs());
                if e < -tol || (e <= tol && (linalg::dot(a, aj) < 0.0 || j < i)) {
                    continue 'facets;
                }
                continue;
            }
            sub.push((linalg::scale(&c, 1.0 / len), e / len));
        }
        let (v, f, s) = integrate_halfspaces(&sub, k - 1);
        if v == 0.0 {
            continue;
        }
        let uf: Vec<f64> = (0..k).map(|r| (0..k - 1).map(|c| basis[c][r] * f[c]).sum()).collect();
        vol += b * v;
        for r in 0..k {
            first[r] += b * (foot[r] * v + uf[r]);
        }
        for r in 0..k {
            for c in 0..k {
                let mut usu = 0.0;
                for x in 0..k - 1 {
                    for y in 0..k - 1 {
                        usu += basis[x][r] * s[(x, y)] * basis[y][c];
                    }
                }
                second[(r, c)] += b * (foot[r] * foot[c] * v + foot[r] * uf[c] + uf[r] * foot[c] + usu);
            }
        }
    }
    let kf = k as f64;
    (
        vol / kf,
        first.iter().map(|x| x / (kf + 1.0)).collect(),
        second.scaled(1.0 / (kf + 2.0)),
    )
}

/// Irredundant halfspace description, one halfspace per geometric facet plane.
pub fn to_halfspaces(p: &PolytopeV) -> Result<PolytopeH> {
    Ok(to_halfspaces_with_map(p)?.0)
}

/// As [`to_halfspaces`], also returning the halfspace index of every facet.
pub fn to_halfspaces_with_map(p: &PolytopeV) -> Result<(PolytopeH, Vec<usize>)> {
    validate(p).into_result()?;
    let scale = p.scale();
    let mut halfspaces: Vec<Halfspace> = Vec::new();
    let mut map = Vec::with_capacity(p.facets.len());
    for fi in 0..p.facets.len() {
        let h = p.facet_plane(fi);
        let found = halfspaces.iter().position(|g| {
            linalg::norm_inf(&linalg::sub(&g.normal, &h.normal)) <= 1e-8 && (g.offset - h.offset).abs() <= 1e-8 * scale
        });
        match found {
            Some(k) => map.push(k),
            None => {
                map.push(halfspaces.len());
                halfspaces.push(h);
            }
        }
    }
    Ok((PolytopeH { dim: p.dim, halfspaces }, map))
}

/// Lower envelope `f` and upper envelope `-g` of the body over `x ∈ R^{d-1}`,
/// with the last coordinate as the vertical axis.
pub fn envelopes(h: &PolytopeH, x: &[f64]) -> Result<(f64, f64)> {
    let d = h.dim;
    if x.len() + 1 != d {
        return Err(Error::DimensionMismatch {
            expected: d - 1,
            found: x.len(),
        });
    }
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for hs in &h.halfspaces {
        let a_y = hs.normal[d - 1];
        let a_norm = linalg::norm(&hs.normal);
        let rest = linalg::dot(&hs.normal[..d - 1], x);
        if a_y.abs() <= 1e-12 * a_norm {
            if rest > hs.offset + 1e-9 * a_norm.max(1.0) {
                return Err(Error::OutsideProjection);
            }
            continue;
        }
        let bound = (hs.offset - rest) / a_y;
        if a_y > 0.0 {
            upper = upper.min(bound);
        } else {
            lower = lower.max(bound);
        }
    }
    if !lower.is_finite() || !upper.is_finite() {
        return Err(Error::UnboundedOrEmpty("chord is unbounded".into()));
    }
    if lower > upper + 1e-9 {
        return Err(Error::OutsideProjection);
    }
    Ok((lower, upper))
}

/// Membership with `1e-9` slack per (normalized) constraint.
pub fn contains(h: &PolytopeH, x: &[f64]) -> bool {
    h.halfspaces
        .iter()
        .all(|hs| hs.excess(x) <= 1e-9 * linalg::norm(&hs.normal).max(1.0))
}
