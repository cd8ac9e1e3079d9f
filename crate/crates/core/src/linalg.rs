//! Small dense linear algebra for dimensions up to 16.
//!
//! Vectors are plain `Vec<f64>` / `&[f64]`; matrices are row-major [`Matrix`]
//! values. Everything here is a pure function of its inputs.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from equally sized rows; panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols<R: AsRef<[f64]>>(cols: &[R]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn outer(a: &[f64], b: &[f64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                m[(i, j)] = x * y;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        self.add(&other.scaled(-1.0))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Maximum entrywise asymmetry `|m_ij - m_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err(serde::de::Error::custom("ragged matrix rows"));
            }
        }
        Ok(Matrix::from_rows(&rows))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    scale(a, 1.0 / n)
}

/// Arithmetic mean of a non-empty point list.
pub fn mean(points: &[Vec<f64>]) -> Vec<f64> {
    let d = points[0].len();
    let mut m = vec![0.0; d];
    for p in points {
        for (mi, pi) in m.iter_mut().zip(p) {
            *mi += pi;
        }
    }
    scale(&m, 1.0 / points.len() as f64)
}

/// Largest pairwise distance.
pub fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(dist(p, q));
        }
    }
    best
}

/// Pairwise (cascade) summation of a slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &Matrix) -> f64 {
    assert!(m.is_square(), "det of non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut sign = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
            .unwrap();
        if a[(p, k)] == 0.0 {
            return 0.0;
        }
        if p != k {
            swap_rows(&mut a, p, k);
            sign = -sign;
        }
        let pivot = a[(k, k)];
        for i in (k + 1)..n {
            let f = a[(i, k)] / pivot;
            if f != 0.0 {
                for j in k..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).product::<f64>() * sign
}

fn swap_rows(a: &mut Matrix, i: usize, j: usize) {
    for c in 0..a.cols() {
        let t = a[(i, c)];
        a[(i, c)] = a[(j, c)];
        a[(j, c)] = t;
    }
}

/// Solves `m x = b` with partial pivoting.
pub fn solve(m: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    assert!(m.is_square(), "solve with non-square matrix");
    let n = m.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut a = m.data.clone();
    let mut x = b.to_vec();
    solve_in_place(&mut a, &mut x)?;
    Ok(x)
}

/// [`solve`] on a row-major `n × n` buffer, overwriting `a` and leaving the
/// solution in `x`.
pub fn solve_in_place(a: &mut [f64], x: &mut [f64]) -> Result<()> {
    let n = x.len();
    assert_eq!(a.len(), n * n, "solve_in_place with mismatched buffers");
    let threshold = 1e-12 * a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap();
        let pivot = a[p * n + k].abs();
        if pivot <= threshold || pivot == 0.0 {
            return Err(Error::SingularMatrix { pivot, threshold });
        }
        if p != k {
            for c in 0..n {
                a.swap(p * n + c, k * n + c);
            }
            x.swap(p, k);
        }
        let pivot = a[k * n + k];
        for i in (k + 1)..n {
            let f = a[i * n + k] / pivot;
            if f != 0.0 {
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| a[k * n + j] * x[j]).sum();
        x[k] = (x[k] - s) / a[k * n + k];
    }
    Ok(())
}

/// Numerical rank of a set of row vectors, relative to the largest entry.
pub fn rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a = Matrix::from_rows(rows);
    let (r, c) = (a.rows(), a.cols());
    let tol = rel_tol * a.max_abs().max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for col in 0..c {
        if rank == r {
            break;
        }
        let p = (rank..r)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .unwrap();
        if a[(p, col)].abs() <= tol {
            continue;
        }
        swap_rows(&mut a, p, rank);
        for i in (rank + 1)..r {
            let f = a[(i, col)] / a[(rank, col)];
            for j in col..c {
                a[(i, j)] -= f * a[(rank, j)];
            }
        }
        rank += 1;
    }
    rank
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Matrix,
}

/// Symmetric eigensolver by cyclic Jacobi rotations.
pub fn sym_eig(m: &Matrix) -> Result<SymEig> {
    assert!(m.is_square(), "sym_eig of non-square matrix");
    let n = m.rows();
    let asym = m.asymmetry();
    if asym > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let mut a = m.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    let mut v = Matrix::identity(n);
    let scale = a.max_abs();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_c)] = v[(r, old_c)];
        }
    }
    Ok(SymEig { values, vectors })
}

/// Symmetric inverse square root `S` with `S M S = I`.
pub fn inv_sqrt(m: &Matrix) -> Result<Matrix> {
    let eig = sym_eig(m)?;
    let max = eig.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let min = eig.values[0];
    if !(min > 1e-12 * max) {
        return Err(Error::NotPositiveDefinite(if max > 0.0 { min / max } else { min }));
    }
    let q = &eig.vectors;
    let inv: Vec<f64> = eig.values.iter().map(|l| 1.0 / l.sqrt()).collect();
    Ok(q.matmul(&Matrix::diagonal(&inv)).matmul(&q.transpose()))
}

/// The vector `n` with `n·w = det[e_1; …; e_{d-1}; w]` for `d-1` vectors in `R^d`.
///
/// It is orthogonal to every `e_i`, with length equal to the `(d-1)`-volume of
/// the parallelotope they span.
pub fn generalized_cross(edges: &[Vec<f64>], d: usize) -> Vec<f64> {
    assert_eq!(edges.len() + 1, d, "need d-1 vectors");
    if d == 1 {
        return vec![1.0];
    }
    let mut rows: Vec<Vec<f64>> = edges.to_vec();
    rows.push(vec![0.0; d]);
    (0..d)
        .map(|i| {
            let last = rows.len() - 1;
            rows[last] = vec![0.0; d];
            rows[last][i] = 1.0;
            det(&Matrix::from_rows(&rows))
        })
        .collect()
}

/// Orthogonal (Householder) matrix `Q` whose last column is the unit vector `u`.
///
/// The first `d-1` columns form an orthonormal basis of `u`'s complement.
pub fn frame_with_last_axis(u: &[f64]) -> Matrix {
    let d = u.len();
    let u = normalized(u);
    let mut w = u.clone();
    w[d - 1] -= 1.0;
    let wn = dot(&w, &w);
    if wn < 1e-30 {
        return Matrix::identity(d);
    }
    // H = I - 2 w w^T / |w|^2 maps e_d to u
    let mut h = Matrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            h[(i, j)] -= 2.0 * w[i] * w[j] / wn;
        }
    }
    h
}

/// Gram matrix `E E^T` of a set of vectors.
pub fn gram(vectors: &[Vec<f64>]) -> Matrix {
    let k = vectors.len();
    let mut g = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = dot(&vectors[i], &vectors[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// `k`-dimensional volume of the simplex spanned by `k+1` points in any ambient dimension.
pub fn simplex_volume_k(points: &[Vec<f64>]) -> f64 {
    let k = points.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let edges: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    let g = det(&gram(&edges)).max(0.0);
    g.sqrt() / factorial(k)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Distance from `p` to the affine hull of `flat` (non-empty).
pub fn distance_to_affine_hull(p: &[f64], flat: &[Vec<f64>]) -> f64 {
    let origin = &flat[0];
    let mut r = sub(p, origin);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for q in &flat[1..] {
        let mut e = sub(q, origin);
        for b in &basis {
            let c = dot(&e, b);
            e = axpy(&e, -c, b);
        }
        let n = norm(&e);
        if n > 1e-14 * (1.0 + norm(q)) {
            basis.push(scale(&e, 1.0 / n));
        }
    }
    for b in &basis {
        let c = dot(&r, b);
        r = axpy(&r, -c, b);
    }
    norm(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        Matrix::from_rows(&rows)
    }

    fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        // Gram-Schmidt on a random matrix
        let m = random_matrix(rng, n);
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for j in 0..n {
            let mut c = m.col(j);
            for b in &cols {
                let p = dot(&c, b);
                c = axpy(&c, -p, b);
            }
            cols.push(normalized(&c));
        }
        Matrix::from_cols(&cols)
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&Matrix::identity(3)), 1.0);
        assert!((det(&Matrix::diagonal(&[1.0 / 3.0, 1.0 / 3.0])) - 1.0 / 9.0).abs() < 1e-15);
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![1.0, 2.0, 3.0]]);
        assert_eq!(det(&m), 0.0);
        let swap = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(det(&swap), -1.0);
    }

    #[test]
    fn det_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let n = rng.random_range(1..=8);
            let a = random_matrix(&mut rng, n);
            let b = random_matrix(&mut rng, n);
            let lhs = det(&a.matmul(&b));
            let rhs = det(&a) * det(&b);
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1e-12), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn solve_examples() {
        let b = vec![0.3, -1.0, 2.0];
        assert_eq!(solve(&Matrix::identity(3), &b).unwrap(), b);
        let x = solve(&Matrix::identity(2).scaled(2.0), &[1.0, 1.0]).unwrap();
        assert_eq!(x, vec![0.5, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let n = rng.random_range(1..=8);
            let m = random_matrix(&mut rng, n).add(&Matrix::identity(n).scaled(3.0));
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = solve(&m, &b).unwrap();
            let r = sub(&m.mul_vec(&x), &b);
            assert!(norm_inf(&r) <= 1e-9 * (1.0 + norm_inf(&b)));
        }
    }

    #[test]
    fn solve_rejects_singular() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(solve(&m, &[1.0, 1.0]), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn sym_eig_examples() {
        let e = sym_eig(&Matrix::identity(4)).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let e = sym_eig(&Matrix::diagonal(&[4.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 4.0]);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!(matches!(
            sym_eig(&Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]])),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn sym_eig_recovers_conjugated_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=10 {
            let q = random_rotation(&mut rng, n);
            let mut spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let m = q.matmul(&Matrix::diagonal(&spectrum)).matmul(&q.transpose());
            let e = sym_eig(&m).unwrap();
            spectrum.sort_by(f64::total_cmp);
            for (a, b) in e.values.iter().zip(&spectrum) {
                assert!((a - b).abs() < 1e-9);
            }
            let qq = e.vectors.matmul(&e.vectors.transpose());
            assert!(qq.sub(&Matrix::identity(n)).max_abs() <= 1e-9);
            let rec = e
                .vectors
                .matmul(&Matrix::diagonal(&e.values))
                .matmul(&e.vectors.transpose());
            assert!(rec.sub(&m).max_abs() <= 1e-9 * m.max_abs());
        }
    }

    #[test]
    fn inv_sqrt_examples() {
        assert!(
            inv_sqrt(&Matrix::identity(3))
                .unwrap()
                .sub(&Matrix::identity(3))
                .max_abs()
                < 1e-15
        );
        let s = inv_sqrt(&Matrix::identity(3).scaled(4.0)).unwrap();
        assert!(s.sub(&Matrix::identity(3).scaled(0.5)).max_abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=8 {
            let a = random_matrix(&mut rng, n);
            let spd = a.matmul(&a.transpose()).add(&Matrix::identity(n).scaled(0.1));
            let s = inv_sqrt(&spd).unwrap();
            let r = s.matmul(&spd).matmul(&s);
            assert!(r.sub(&Matrix::identity(n)).max_abs() <= 1e-8);
        }
        let indefinite = Matrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(inv_sqrt(&indefinite), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn generalized_cross_is_orthogonal() {
        let e = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        assert_eq!(generalized_cross(&e, 3), vec![0.0, 0.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=6 {
            let edges: Vec<Vec<f64>> = (0..d - 1)
                .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let n = generalized_cross(&edges, d);
            for e in &edges {
                assert!(dot(&n, e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frame_has_requested_last_axis() {
        let u = normalized(&[0.3, -0.2, 0.9]);
        let q = frame_with_last_axis(&u);
        assert!(q.matmul(&q.transpose()).sub(&Matrix::identity(3)).max_abs() < 1e-14);
        for (a, b) in q.col(2).iter().zip(&u) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_detects_dependence() {
        let rows = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0]];
        assert_eq!(rank(&rows, 1e-12), 2);
    }
}
