//! Generators for standard test bodies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::hull;
use crate::linalg;
use crate::polytope::PolytopeV;

pub use crate::isotropy::regular_simplex_isotropic;

/// The cube `[-1,1]^d`, each square facet split into `(d-1)!` simplices
/// by the staircase (Kuhn) triangulation.
pub fn cube(d: usize) -> PolytopeV {
    assert!((1..=16).contains(&d), "dimension out of range");
    let index = |p: &[f64]| (0..d).map(|k| usize::from(p[k] > 0.0) << k).sum::<usize>();
    let vertices: Vec<Vec<f64>> = (0..1usize << d)
        .map(|m| (0..d).map(|k| if m >> k & 1 == 1 { 1.0 } else { -1.0 }).collect())
        .collect();
    let mut facets = Vec::new();
    for axis in 0..d {
        for side in [-1.0, 1.0] {
            let free: Vec<usize> = (0..d).filter(|&k| k != axis).collect();
            for perm in permutations(&free) {
                let mut p = vec![-1.0; d];
                p[axis] = side;
                let mut f = vec![index(&p)];
                for &k in &perm {
                    p[k] = 1.0;
                    f.push(index(&p));
                }
                if d >= 2 {
                    let pts: Vec<Vec<f64>> = f.iter().map(|&i| vertices[i].clone()).collect();
                    let edges: Vec<Vec<f64>> = pts[1..].iter().map(|q| linalg::sub(q, &pts[0])).collect();
                    let n = linalg::generalized_cross(&edges, d);
                    if n[axis] * side < 0.0 {
                        f.swap(0, 1);
                    }
                }
                facets.push(f);
            }
        }
    }
    PolytopeV::new(d, vertices, facets)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Hull of `n` seeded uniform points on the unit sphere (simplicial almost surely).
pub fn random_simplicial(d: usize, n: usize, seed: u64) -> Result<PolytopeV> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            linalg::normalized(&g)
        })
        .collect();
    hull::facet_enumeration(&pts)
}

/// Hull of `n` seeded sphere points and their mirror images in `x_d = 0`,
/// a body symmetric about that hyperplane (simplicial almost surely).
pub fn random_mirror_symmetric(d: usize, n: usize, seed: u64) -> Result<PolytopeV> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut v = linalg::normalized(&g);
        pts.push(v.clone());
        v[d - 1] = -v[d - 1];
        pts.push(v);
    }
    hull::facet_enumeration(&pts)
}

/// Smallest distance from a facet plane to a vertex off that facet, relative
/// to the diameter. Small values mean nearly coplanar neighbouring facets.
pub fn facet_margin(p: &PolytopeV) -> f64 {
    let scale = p.scale();
    let mut margin = f64::INFINITY;
    for (fi, f) in p.facets.iter().enumerate() {
        let plane = p.facet_plane(fi);
        for (vi, v) in p.vertices.iter().enumerate() {
            if !f.contains(&vi) {
                margin = margin.min(-plane.excess(v) / scale);
            }
        }
    }
    margin
}

/// Like [`random_simplicial`], redrawing until [`facet_margin`] is at least
/// `margin`. Draw `k` uses seed `seed + k·2^32`.
pub fn random_simplicial_with_margin(d: usize, n: usize, seed: u64, margin: f64) -> Result<PolytopeV> {
    for k in 0..1000u64 {
        let p = random_simplicial(d, n, seed.wrapping_add(k << 32))?;
        if facet_margin(&p) >= margin {
            return Ok(p);
        }
    }
    Err(crate::Error::InvalidInput(format!(
        "no body with margin {margin} in 1000 draws"
    )))
}
