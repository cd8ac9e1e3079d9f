//! Conversions between vertex and halfspace descriptions by brute-force
//! subset enumeration. Intended for desk-scale inputs (tens of points or
//! halfspaces, dimension at most 8).

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::polytope::{Halfspace, PolytopeH, PolytopeV};

/// Relative rank tolerance for sets of unit constraint normals.
const FACE_RANK_TOL: f64 = 1e-10;

/// A supporting hyperplane found during facet enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetCandidate {
    /// Indices of all input points lying on the hyperplane.
    pub vertices: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Calls `f` on every increasing `k`-subset of `0..n`, in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    'outer: loop {
        f(&idx);
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in (i + 1)..k {
                    idx[j] = idx[j - 1] + 1;
                }
                continue 'outer;
            }
        }
        return;
    }
}

/// Convex hull of a point set as a [`PolytopeV`] with simplicial facets.
///
/// Geometric facets carrying more than `d` points are triangulated by pulling
/// from their lowest-index vertex, recursively through lower-dimensional
/// faces, so adjacent faces induce the same triangulation on shared faces.
/// Points that are not extreme are dropped; the remaining vertices keep
/// their relative input order.
pub fn facet_enumeration(points: &[Vec<f64>]) -> Result<PolytopeV> {
    let d = points.first().map_or(0, Vec::len);
    if d == 0 {
        return Err(Error::DegenerateInput("no points".into()));
    }
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::DegenerateInput("points of mixed dimension".into()));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateInput("non-finite coordinate".into()));
    }
    check_affine_rank(points, d)?;
    let (facets, normals) = simplicial_boundary(points)?;

    let mut used: Vec<usize> = facets.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let mut remap = vec![usize::MAX; points.len()];
    for (new, &old) in used.iter().enumerate() {
        remap[old] = new;
    }
    let vertices: Vec<Vec<f64>> = used.iter().map(|&i| points[i].clone()).collect();
    let mut oriented: Vec<Vec<usize>> = Vec::with_capacity(facets.len());
    for (f, n) in facets.iter().zip(&normals) {
        let mut f: Vec<usize> = f.iter().map(|&i| remap[i]).collect();
        if d >= 2 {
            let pts: Vec<Vec<f64>> = f.iter().map(|&i| vertices[i].clone()).collect();
            let edges: Vec<Vec<f64>> = pts[1..].iter().map(|p| linalg::sub(p, &pts[0])).collect();
            if linalg::dot(&linalg::generalized_cross(&edges, d), n) < 0.0 {
                f.swap(0, 1);
            }
        }
        oriented.push(f);
    }
    if d == 2 {
        oriented = chain_edges(oriented);
    }
    Ok(PolytopeV::new(d, vertices, oriented))
}

fn check_affine_rank(points: &[Vec<f64>], d: usize) -> Result<()> {
    if points.len() < d + 1 {
        return Err(Error::DegenerateInput(format!(
            "{} points cannot span R^{d}",
            points.len()
        )));
    }
    let edges: Vec<Vec<f64>> = points[1..].iter().map(|p| linalg::sub(p, &points[0])).collect();
    let r = linalg::rank(&edges, 1e-10);
    if r < d {
        return Err(Error::DegenerateInput(format!("affine rank {r} < {d}")));
    }
    Ok(())
}

/// Orders polygon edges into a single cycle.
fn chain_edges(edges: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let n = edges.len();
    let start = (0..n).min_by_key(|&i| edges[i][0]).unwrap();
    let mut out = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut cur = start;
    for _ in 0..n {
        used[cur] = true;
        out.push(edges[cur].clone());
        let head = edges[cur][1];
        match (0..n).find(|&j| !used[j] && edges[j][0] == head) {
            Some(j) => cur = j,
            None => break,
        }
    }
    if out.len() != n {
        // not a single cycle; keep the enumeration order
        return edges;
    }
    out
}

/// Supporting hyperplanes of the hull, one per geometric facet.
pub fn supporting_hyperplanes(points: &[Vec<f64>]) -> Vec<FacetCandidate> {
    let d = points[0].len();
    let n = points.len();
    let scale = linalg::diameter(points).max(f64::MIN_POSITIVE);
    // tighter than the validation tolerance so that tilted sub-triangles of
    // merged faces still validate
    let tol = 1e-11 * scale;
    let mut faces: Vec<FacetCandidate> = Vec::new();
    let mut masks: Vec<Vec<bool>> = Vec::new();
    for_each_combination(n, d, |combo| {
        if masks.iter().any(|m| combo.iter().all(|&i| m[i])) {
            return;
        }
        let p0 = &points[combo[0]];
        let edges: Vec<Vec<f64>> = combo[1..].iter().map(|&i| linalg::sub(&points[i], p0)).collect();
        let raw = linalg::generalized_cross(&edges, d);
        let len = linalg::norm(&raw);
        if !(len > 1e-10 * scale.powi(d as i32 - 1)) {
            return;
        }
        let mut normal = linalg::scale(&raw, 1.0 / len);
        let mut offset = linalg::dot(&normal, p0);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in points {
            let e = linalg::dot(&normal, p) - offset;
            lo = lo.min(e);
            hi = hi.max(e);
        }
        if hi > tol {
            if lo < -tol {
                return;
            }
            normal = linalg::scale(&normal, -1.0);
            offset = -offset;
        }
        let on: Vec<usize> = (0..n)
            .filter(|&i| (linalg::dot(&normal, &points[i]) - offset).abs() <= tol)
            .collect();
        let mut mask = vec![false; n];
        for &i in &on {
            mask[i] = true;
        }
        masks.push(mask);
        faces.push(FacetCandidate {
            vertices: on,
            normal,
            offset,
        });
    });
    // a thin face found early can lie inside a tolerance-coplanar face found later
    let keep: Vec<bool> = (0..faces.len())
        .map(|i| {
            !(0..faces.len()).any(|j| {
                j != i
                    && faces[j].vertices.len() > faces[i].vertices.len()
                    && faces[i].vertices.iter().all(|&v| masks[j][v])
            })
        })
        .collect();
    faces
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(f, _)| f)
        .collect()
}

/// Simplicial boundary of the hull of a full-rank point set: unoriented
/// facets in input indices, with each facet's outward unit normal.
fn simplicial_boundary(points: &[Vec<f64>]) -> Result<(Vec<Vec<usize>>, Vec<Vec<f64>>)> {
    let d = points[0].len();
    if d == 1 {
        let key = |i: &usize| points[*i][0];
        let lo = (0..points.len()).min_by(|a, b| key(a).total_cmp(&key(b))).unwrap();
        let hi = (0..points.len())
            .rev()
            .max_by(|a, b| key(a).total_cmp(&key(b)))
            .unwrap();
        if lo == hi {
            return Err(Error::DegenerateInput("all points coincide".into()));
        }
        return Ok((vec![vec![lo], vec![hi]], vec![vec![-1.0], vec![1.0]]));
    }
    let scale = linalg::diameter(points);
    let mut facets = Vec::new();
    let mut normals = Vec::new();
    for face in supporting_hyperplanes(points) {
        if face.vertices.len() == d {
            facets.push(face.vertices.clone());
            normals.push(face.normal.clone());
            continue;
        }
        // project the face into its own (d-1)-dimensional coordinates
        let frame = frame_for(&face.normal);
        let origin = &points[face.vertices[0]];
        let projected: Vec<Vec<f64>> = face
            .vertices
            .iter()
            .map(|&i| {
                let rel = linalg::sub(&points[i], origin);
                (0..d - 1).map(|k| linalg::dot(&rel, &frame[k])).collect()
            })
            .collect();
        let (sub_facets, _) = simplicial_boundary(&projected)?;
        let mut sub_vertices: Vec<usize> = sub_facets.iter().flatten().copied().collect();
        sub_vertices.sort_unstable();
        let apex = sub_vertices[0];
        for sf in &sub_facets {
            if sf.contains(&apex) {
                continue;
            }
            let mut local = vec![apex];
            local.extend_from_slice(sf);
            let pts: Vec<Vec<f64>> = local.iter().map(|&i| projected[i].clone()).collect();
            let edges: Vec<Vec<f64>> = pts[1..].iter().map(|p| linalg::sub(p, &pts[0])).collect();
            let vol = linalg::det(&Matrix::from_rows(&edges)).abs();
            if vol <= 1e-10 * scale.powi(d as i32 - 1) {
                continue;
            }
            facets.push(local.iter().map(|&i| face.vertices[i]).collect());
            normals.push(face.normal.clone());
        }
    }
    if facets.is_empty() {
        return Err(Error::DegenerateInput("no supporting hyperplanes found".into()));
    }
    Ok((facets, normals))
}

/// Orthonormal basis of the complement of a unit normal, as `d-1` vectors.
fn frame_for(normal: &[f64]) -> Vec<Vec<f64>> {
    let q = linalg::frame_with_last_axis(normal);
    (0..normal.len() - 1).map(|k| q.col(k)).collect()
}

/// All vertices of a bounded halfspace intersection.
///
/// Every `d`-subset of constraints with a nonsingular normal matrix is solved;
/// feasible intersection points are kept and deduplicated. The output is
/// sorted lexicographically.
pub fn vertex_enumeration(h: &PolytopeH) -> Result<Vec<Vec<f64>>> {
    Ok(vertices_with_incidence(h)?.0)
}

/// Vertices with, per vertex, the set of (nonzero) halfspaces through it:
/// the union of the defining constraint sets of all solutions merged into it.
/// Indices refer to `h.halfspaces` with zero-normal entries skipped.
fn vertices_with_incidence(h: &PolytopeH) -> Result<(Vec<Vec<f64>>, Vec<Vec<bool>>, Vec<Halfspace>)> {
    let d = h.dim;
    let mut hs: Vec<Halfspace> = Vec::with_capacity(h.halfspaces.len());
    for g in &h.halfspaces {
        if g.normal.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: g.normal.len(),
            });
        }
        let n = linalg::norm(&g.normal);
        if n == 0.0 {
            if g.offset < 0.0 {
                return Err(Error::UnboundedOrEmpty("infeasible trivial constraint".into()));
            }
            continue;
        }
        hs.push(g.normalized());
    }
    if let Some(dir) = recession_direction(&hs, d) {
        return Err(Error::UnboundedOrEmpty(format!("recession direction {dir:?}")));
    }
    let s = hs.iter().fold(0.0f64, |m, g| m.max(g.offset.abs()));
    let s = if s > 0.0 { s } else { 1.0 };
    let feas_tol = 1e-11 * s;
    let mut candidates: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    let mut a = vec![0.0; d * d];
    let mut x = vec![0.0; d];
    for_each_combination(hs.len(), d, |combo| {
        for (r, &i) in combo.iter().enumerate() {
            a[r * d..(r + 1) * d].copy_from_slice(&hs[i].normal);
            x[r] = hs[i].offset;
        }
        if linalg::solve_in_place(&mut a, &mut x).is_err() || !hs.iter().all(|g| g.excess(&x) <= feas_tol) {
            return;
        }
        // A nearly singular subset can pass the solve and land inside a higher face.
        let active: Vec<Vec<f64>> = hs
            .iter()
            .filter(|g| g.excess(&x).abs() <= feas_tol)
            .map(|g| g.normal.clone())
            .collect();
        if linalg::rank(&active, FACE_RANK_TOL) == d {
            candidates.push((x.clone(), combo.to_vec()));
        }
    });
    candidates.sort_by(|(a, _), (b, _)| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let dedup_tol = 1e-8 * s;
    let mut unique: Vec<Vec<f64>> = Vec::new();
    let mut incidence: Vec<Vec<bool>> = Vec::new();
    for (c, combo) in candidates {
        let k = match unique.iter().position(|u| linalg::dist(u, &c) <= dedup_tol) {
            Some(k) => k,
            None => {
                unique.push(c);
                incidence.push(vec![false; hs.len()]);
                unique.len() - 1
            }
        };
        for i in combo {
            incidence[k][i] = true;
        }
    }
    if unique.is_empty() {
        return Err(Error::UnboundedOrEmpty("no feasible vertices".into()));
    }
    Ok((unique, incidence, hs))
}

/// Bounded halfspace intersection as a [`PolytopeV`] with simplicial facets.
///
/// Faces come from vertex-constraint incidences and face dimensions from the
/// rank of the active normals, so facets far smaller than the body are kept
/// intact. Faces are triangulated by pulling from their lowest-index vertex.
/// Vertices are in [`vertex_enumeration`] order.
pub fn polytope_from_halfspaces(h: &PolytopeH) -> Result<PolytopeV> {
    let (vertices, incidence, hs) = vertices_with_incidence(h)?;
    let d = h.dim;
    let faces = FaceLattice {
        d,
        hs: &hs,
        incidence: &incidence,
    };
    let all: Vec<usize> = (0..vertices.len()).collect();
    let mut memo = std::collections::HashMap::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut facets = Vec::new();
    for j in 0..hs.len() {
        let face: Vec<usize> = all.iter().copied().filter(|&v| incidence[v][j]).collect();
        if seen.contains(&face) || faces.dim(&face) != Some(d - 1) {
            continue;
        }
        for mut f in faces.simplices(&face, d - 1, &mut memo) {
            if d >= 2 {
                let edges: Vec<Vec<f64>> = f[1..]
                    .iter()
                    .map(|&i| linalg::sub(&vertices[i], &vertices[f[0]]))
                    .collect();
                if linalg::dot(&linalg::generalized_cross(&edges, d), &hs[j].normal) < 0.0 {
                    f.swap(0, 1);
                }
            }
            facets.push(f);
        }
        seen.push(face);
    }
    if facets.len() < d + 1 {
        return Err(Error::DegenerateInput(
            "halfspaces do not bound a full-dimensional body".into(),
        ));
    }
    if d == 2 {
        facets = chain_edges(facets);
    }
    Ok(PolytopeV::new(d, vertices, facets))
}

struct FaceLattice<'a> {
    d: usize,
    hs: &'a [Halfspace],
    incidence: &'a [Vec<bool>],
}

impl FaceLattice<'_> {
    /// Dimension of the affine hull of a face; `None` if empty.
    fn dim(&self, face: &[usize]) -> Option<usize> {
        if face.is_empty() {
            return None;
        }
        let common: Vec<Vec<f64>> = (0..self.hs.len())
            .filter(|&j| face.iter().all(|&v| self.incidence[v][j]))
            .map(|j| self.hs[j].normal.clone())
            .collect();
        Some(self.d - linalg::rank(&common, FACE_RANK_TOL))
    }

    /// Pulling triangulation of a `k`-face given by its sorted vertex list.
    fn simplices(
        &self,
        face: &[usize],
        k: usize,
        memo: &mut std::collections::HashMap<Vec<usize>, Vec<Vec<usize>>>,
    ) -> Vec<Vec<usize>> {
        if face.len() == k + 1 {
            return vec![face.to_vec()];
        }
        if let Some(s) = memo.get(face) {
            return s.clone();
        }
        let apex = face[0];
        let mut subfaces: Vec<Vec<usize>> = Vec::new();
        for j in 0..self.hs.len() {
            let g: Vec<usize> = face.iter().copied().filter(|&v| self.incidence[v][j]).collect();
            if g.len() < k || g.len() == face.len() || g.contains(&apex) || subfaces.contains(&g) {
                continue;
            }
            if self.dim(&g) == Some(k - 1) {
                subfaces.push(g);
            }
        }
        let mut out = Vec::new();
        for g in &subfaces {
            for sigma in self.simplices(g, k - 1, memo) {
                let mut s = vec![apex];
                s.extend(sigma);
                out.push(s);
            }
        }
        memo.insert(face.to_vec(), out.clone());
        out
    }
}

/// A nonzero `u` with `a_i·u ≤ 0` for every (unit) normal, if one exists.
///
/// Lines in the recession cone are caught by the rank test; otherwise a
/// nonzero pointed cone has an extreme ray cut out by `d-1` independent
/// constraints, so testing those candidate rays is exhaustive.
fn recession_direction(hs: &[Halfspace], d: usize) -> Option<Vec<f64>> {
    let normals: Vec<Vec<f64>> = hs.iter().map(|g| g.normal.clone()).collect();
    if linalg::rank(&normals, 1e-10) < d {
        return Some(vec![f64::NAN; d]);
    }
    let eps = 1e-10;
    let ray_ok = |u: &[f64]| normals.iter().all(|a| linalg::dot(a, u) <= eps);
    if d == 1 {
        return [vec![1.0], vec![-1.0]].into_iter().find(|u| ray_ok(u));
    }
    let mut found = None;
    for_each_combination(normals.len(), d - 1, |combo| {
        if found.is_some() {
            return;
        }
        let rows: Vec<Vec<f64>> = combo.iter().map(|&i| normals[i].clone()).collect();
        let u = linalg::generalized_cross(&rows, d);
        let len = linalg::norm(&u);
        if len < 1e-9 {
            return;
        }
        let u = linalg::scale(&u, 1.0 / len);
        let neg = linalg::scale(&u, -1.0);
        if ray_ok(&u) {
            found = Some(u);
        } else if ray_ok(&neg) {
            found = Some(neg);
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{moments, to_halfspaces, validate};

    fn cube_points(d: usize) -> Vec<Vec<f64>> {
        (0..1usize << d)
            .map(|m| (0..d).map(|k| if m >> k & 1 == 1 { 1.0 } else { -1.0 }).collect())
            .collect()
    }

    fn cube_h(d: usize) -> PolytopeH {
        let mut hs = Vec::new();
        for k in 0..d {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            hs.push(Halfspace::new(e.clone(), 1.0));
            hs.push(Halfspace::new(linalg::scale(&e, -1.0), 1.0));
        }
        PolytopeH { dim: d, halfspaces: hs }
    }

    #[test]
    fn combinations_are_complete() {
        let mut count = 0;
        for_each_combination(6, 3, |c| {
            assert!(c.windows(2).all(|w| w[0] < w[1]));
            count += 1;
        });
        assert_eq!(count, 20);
        let mut empty = 0;
        for_each_combination(3, 0, |_| empty += 1);
        assert_eq!(empty, 1);
        for_each_combination(2, 3, |_| panic!("k > n"));
    }

    #[test]
    fn simplex_hull() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let p = facet_enumeration(&pts).unwrap();
        assert_eq!(p.facets.len(), 4);
        assert!(validate(&p).is_valid());
    }

    #[test]
    fn cube_with_center() {
        for d in 2..=4 {
            let mut pts = cube_points(d);
            pts.push(vec![0.0; d]);
            let p = facet_enumeration(&pts).unwrap();
            assert_eq!(p.vertices.len(), 1 << d);
            assert!(validate(&p).is_valid(), "{:?}", validate(&p));
            let per_face = match d {
                2 => 1,
                3 => 2,
                _ => 6,
            };
            assert_eq!(p.facets.len(), 2 * d * per_face);
            let m = moments(&p).unwrap();
            assert!((m.volume - 2f64.powi(d as i32)).abs() < 1e-10);
        }
    }

    #[test]
    fn hexagon_edges_form_a_cycle() {
        let pts: Vec<Vec<f64>> = (0..6)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 3.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let p = facet_enumeration(&pts).unwrap();
        assert_eq!(p.facets.len(), 6);
        for w in 0..6 {
            assert_eq!(p.facets[w][1], p.facets[(w + 1) % 6][0]);
        }
        assert!(validate(&p).is_valid());
    }

    #[test]
    fn degenerate_input_rejected() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ];
        assert!(matches!(facet_enumeration(&pts), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn cube_vertices_from_constraints() {
        for d in 1..=4 {
            let v = vertex_enumeration(&cube_h(d)).unwrap();
            assert_eq!(v.len(), 1 << d);
        }
        let mut h = cube_h(3);
        h.halfspaces.push(Halfspace::new(vec![1.0, 1.0, 1.0], 3.0));
        assert_eq!(vertex_enumeration(&h).unwrap().len(), 8);
        // a redundant plane strictly outside
        h.halfspaces.push(Halfspace::new(vec![1.0, 0.0, 0.0], 5.0));
        assert_eq!(vertex_enumeration(&h).unwrap().len(), 8);
    }

    #[test]
    fn simplex_vertices_from_constraints() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let h = to_halfspaces(&facet_enumeration(&pts).unwrap()).unwrap();
        assert_eq!(vertex_enumeration(&h).unwrap().len(), 3);
    }

    #[test]
    fn unbounded_systems_rejected() {
        let quadrant = PolytopeH {
            dim: 2,
            halfspaces: vec![
                Halfspace::new(vec![-1.0, 0.0], 0.0),
                Halfspace::new(vec![0.0, -1.0], 0.0),
            ],
        };
        assert!(matches!(vertex_enumeration(&quadrant), Err(Error::UnboundedOrEmpty(_))));
        // full-rank normals with a one-sided gap
        let wedge = PolytopeH {
            dim: 2,
            halfspaces: vec![
                Halfspace::new(vec![-1.0, 0.0], 0.0),
                Halfspace::new(vec![0.0, -1.0], 0.0),
                Halfspace::new(vec![-1.0, 1.0], 1.0),
            ],
        };
        assert!(matches!(vertex_enumeration(&wedge), Err(Error::UnboundedOrEmpty(_))));
        let empty = PolytopeH {
            dim: 1,
            halfspaces: vec![Halfspace::new(vec![1.0], -1.0), Halfspace::new(vec![-1.0], -1.0)],
        };
        assert!(matches!(vertex_enumeration(&empty), Err(Error::UnboundedOrEmpty(_))));
    }

    #[test]
    fn halfspace_builder_matches_point_hull() {
        for d in 1..=4 {
            let p = polytope_from_halfspaces(&cube_h(d)).unwrap();
            assert_eq!(p.vertices.len(), 1 << d);
            assert!(validate(&p).is_valid(), "{:?}", validate(&p));
            assert!((moments(&p).unwrap().volume - 2f64.powi(d as i32)).abs() < 1e-10);
        }
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.5, 0.5, 0.5],
        ];
        let v = facet_enumeration(&pts).unwrap();
        let h = polytope_from_halfspaces(&to_halfspaces(&v).unwrap()).unwrap();
        assert!(validate(&h).is_valid());
        assert!((moments(&h).unwrap().volume - moments(&v).unwrap().volume).abs() < 1e-12);
    }

    #[test]
    fn singular_subsets_through_an_edge_give_no_vertex() {
        // five of the facets through one edge of this body pass the solve
        let p = crate::fixtures::random_simplicial(5, 10, 723).unwrap();
        let vs = vertex_enumeration(&to_halfspaces(&p).unwrap()).unwrap();
        assert_eq!(vs.len(), 10);
        for v in &vs {
            assert!(p.vertices.iter().any(|w| linalg::dist(v, w) < 1e-9));
        }
    }

    #[test]
    fn halfspace_builder_keeps_tiny_facets() {
        // clip one cube corner by 1e-6: three new vertices and a tiny triangle
        let mut h = cube_h(3);
        h.halfspaces.push(Halfspace::new(vec![1.0, 1.0, 1.0], 3.0 - 1e-6));
        let p = polytope_from_halfspaces(&h).unwrap();
        assert_eq!(p.vertices.len(), 10);
        assert!(validate(&p).is_valid(), "{:?}", validate(&p));
        let cut = 1e-18 / 6.0;
        assert!((moments(&p).unwrap().volume - (8.0 - cut)).abs() < 1e-12);
    }
}
