//! Dense and tridiagonal symmetric eigensolvers in double precision.
//!
//! `tridiag_eigen` is the implicit-shift QL iteration (EISPACK `tql2`),
//! `symmetric_eigen` reduces dense input with Householder reflections first
//! (`tred2`), and `generalized_eigen` solves `H c = E S c` through the
//! Cholesky factor of `S`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch(format!(
                "tridiagonal matrix needs N >= 1 diagonal and N-1 off-diagonal entries (got {} and {})",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.offdiag[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> SymDense {
        SymDense::from_fn(self.dim(), |i, j| self.get(i, j))
    }

    /// `y = T x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Symmetric matrix stored in full, row-major; symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymDense {
    n: usize,
    data: Vec<f64>,
}

impl SymDense {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds from the lower triangle of `f` and mirrors it.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn add(&self, other: &SymDense) -> Result<SymDense> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.n, other.n)));
        }
        Ok(SymDense {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scaled(&self, c: f64) -> SymDense {
        SymDense {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Eigenvalues ascending; `vectors` holds eigenvector `k` in column `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Row-major `n x n`, column `k` pairs with `values[k]`.
    vectors: Vec<f64>,
    n: usize,
}

impl EigenPairs {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }

    /// Component `i` of eigenvector `k`.
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.n + k]
    }

    fn sorted(values: Vec<f64>, vectors: Vec<f64>, n: usize) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut v = vec![0.0; n * n];
        for (new_k, &old_k) in order.iter().enumerate() {
            for i in 0..n {
                v[i * n + new_k] = vectors[i * n + old_k];
            }
        }
        Self {
            values: order.iter().map(|&k| values[k]).collect(),
            vectors: v,
            n,
        }
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// `z` enters as the accumulated transformation (identity for a bare
/// tridiagonal problem) and leaves holding the eigenvectors in its columns.
fn tql2(d: &mut [f64], e_in: &[f64], z: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        return;
    }
    // e[i] couples rows i and i+1, with a trailing zero
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(e_in);

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            loop {
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[k * n + i + 1];
                        let zk = z[k * n + i];
                        z[k * n + i + 1] = s * zk + c * zk1;
                        z[k * n + i] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Householder reduction of a dense symmetric matrix to tridiagonal form.
///
/// On return `d`/`e` hold the tridiagonal matrix (`e[i]` couples `i-1` and
/// `i`, `e[0] = 0`) and `v` the orthogonal transformation.
fn tred2(v: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d: Vec<f64> = (0..n).map(|j| v[(n - 1) * n + j]).collect();
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    (d, e)
}

pub fn tridiag_eigen(t: &SymTridiag) -> EigenPairs {
    let n = t.dim();
    let mut d = t.diag.clone();
    let mut z = SymDense::identity(n).data;
    tql2(&mut d, &t.offdiag, &mut z);
    EigenPairs::sorted(d, z, n)
}

pub fn symmetric_eigen(a: &SymDense) -> EigenPairs {
    let n = a.dim();
    let mut v = a.data.clone();
    let (mut d, e) = tred2(&mut v, n);
    tql2(&mut d, &e[1..], &mut v);
    EigenPairs::sorted(d, v, n)
}

/// Lower-triangular Cholesky factor, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    n: usize,
    data: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `L Lᵀ` as a dense symmetric matrix.
    pub fn reconstruct(&self) -> SymDense {
        SymDense::from_fn(self.n, |i, j| (0..=j).map(|k| self.get(i, k) * self.get(j, k)).sum())
    }

    /// Solves `L y = b`.
    fn solve_lower(&self, b: &mut [f64]) {
        for i in 0..self.n {
            let mut s = b[i];
            for (k, bk) in b[..i].iter().enumerate() {
                s -= self.get(i, k) * bk;
            }
            b[i] = s / self.get(i, i);
        }
    }

    /// Solves `Lᵀ x = b`.
    fn solve_upper(&self, b: &mut [f64]) {
        for i in (0..self.n).rev() {
            let mut s = b[i];
            for (k, bk) in b.iter().enumerate().skip(i + 1) {
                s -= self.get(k, i) * bk;
            }
            b[i] = s / self.get(i, i);
        }
    }
}

pub fn cholesky(s: &SymDense) -> Result<CholeskyFactor> {
    let n = s.dim();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut pivot = s.get(j, j);
        for k in 0..j {
            pivot -= l[j * n + k] * l[j * n + k];
        }
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let ljj = pivot.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = v / ljj;
        }
    }
    Ok(CholeskyFactor { n, data: l })
}

/// Solves `H c = E S c`; eigenvectors are returned `S`-orthonormal.
pub fn generalized_eigen(h: &SymDense, s: &SymTridiag) -> Result<EigenPairs> {
    let n = h.dim();
    if s.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian is {n}x{n} but overlap is {0}x{0}",
            s.dim()
        )));
    }
    let l = cholesky(&s.to_dense())?;

    // C = L⁻¹ H L⁻ᵀ, built column by column: first W = L⁻¹ H, then C = L⁻¹ Wᵀ
    let mut w = vec![0.0; n * n];
    for j in 0..n {
        let mut col: Vec<f64> = (0..n).map(|i| h.get(i, j)).collect();
        l.solve_lower(&mut col);
        for i in 0..n {
            w[i * n + j] = col[i];
        }
    }
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        // row i of W is column i of Wᵀ = H L⁻ᵀ
        let mut col: Vec<f64> = w[i * n..(i + 1) * n].to_vec();
        l.solve_lower(&mut col);
        for (j, v) in col.into_iter().enumerate() {
            c[j * n + i] = v;
        }
    }
    let sym = SymDense::from_fn(n, |i, j| 0.5 * (c[i * n + j] + c[j * n + i]));

    let std = symmetric_eigen(&sym);
    let mut vectors = vec![0.0; n * n];
    for k in 0..n {
        let mut y = std.vector(k);
        l.solve_upper(&mut y);
        for i in 0..n {
            vectors[i * n + k] = y[i];
        }
    }
    Ok(EigenPairs {
        values: std.values,
        vectors,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn overlap(n: usize, ell: f64) -> SymTridiag {
        SymTridiag::new(
            (0..n).map(|i| 2.0 * (i as f64 + ell + 1.0)).collect(),
            (0..n - 1)
                .map(|i| -((i as f64 + 1.0) * (i as f64 + 2.0 * ell + 2.0)).sqrt())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn tridiag_two_by_two() {
        let t = SymTridiag::new(vec![2.0, 2.0], vec![-1.0]).unwrap();
        let e = tridiag_eigen(&t);
        assert_relative_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn tridiag_one_by_one() {
        let t = SymTridiag::new(vec![4.5], vec![]).unwrap();
        let e = tridiag_eigen(&t);
        assert_eq!(e.values, vec![4.5]);
        assert_eq!(e.vector(0), vec![1.0]);
    }

    #[test]
    fn tridiag_rejects_bad_shapes() {
        assert!(SymTridiag::new(vec![], vec![]).is_err());
        assert!(SymTridiag::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiag::new(vec![1.0, f64::NAN], vec![0.0]).is_err());
    }

    fn check_pairs(a: &SymDense, e: &EigenPairs, tol: f64) {
        let norm = a.frobenius_norm();
        for k in 0..e.dim() {
            let v = e.vector(k);
            let av = a.apply(&v);
            let res: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - e.values[k] * y).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res <= tol * norm, "residual {res} for pair {k}");
            for j in 0..=k {
                let u = e.vector(j);
                let dot: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn tridiag_residuals_on_overlap() {
        for ell in [0.0, 2.0] {
            let t = overlap(60, ell);
            check_pairs(&t.to_dense(), &tridiag_eigen(&t), 1e-10);
        }
    }

    #[test]
    fn dense_matches_tridiagonal_solver() {
        let t = overlap(12, 1.0);
        let a = tridiag_eigen(&t);
        let b = symmetric_eigen(&t.to_dense());
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_relative_eq!(x, y, max_relative = 1e-12);
        }
    }

    #[test]
    fn dense_residuals_on_random_like_matrix() {
        let n = 25;
        let a = SymDense::from_fn(n, |i, j| {
            ((i * 7 + j * 13) % 11) as f64 - 5.0 + if i == j { 3.0 } else { 0.0 }
        });
        check_pairs(&a, &symmetric_eigen(&a), 1e-12);
    }

    #[test]
    fn dense_degenerate_and_trivial() {
        let e = symmetric_eigen(&SymDense::identity(4));
        assert_eq!(e.values, vec![1.0; 4]);
        let e = symmetric_eigen(&SymDense::from_fn(1, |_, _| -2.0));
        assert_eq!(e.values, vec![-2.0]);
    }

    #[test]
    fn cholesky_examples() {
        let l = cholesky(&SymDense::identity(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        let m = SymDense::from_fn(2, |i, j| [[4.0, 2.0], [2.0, 5.0]][i][j]);
        let l = cholesky(&m).unwrap();
        assert_eq!(
            (l.get(0, 0), l.get(1, 0), l.get(1, 1), l.get(0, 1)),
            (2.0, 1.0, 2.0, 0.0)
        );
    }

    #[test]
    fn cholesky_reconstructs_overlap() {
        for n in [1, 7, 50] {
            let s = overlap(n, 0.0).to_dense();
            let l = cholesky(&s).unwrap();
            let back = l.reconstruct();
            let diff = SymDense::from_fn(n, |i, j| back.get(i, j) - s.get(i, j));
            assert!(diff.frobenius_norm() <= 1e-12 * s.frobenius_norm());
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = SymDense::from_fn(2, |i, j| [[1.0, 2.0], [2.0, 1.0]][i][j]);
        assert!(matches!(cholesky(&m), Err(Error::NotPositiveDefinite { index: 1, .. })));
    }

    #[test]
    fn generalized_scalar() {
        let h = SymDense::from_fn(1, |_, _| 2.0);
        let s = SymTridiag::new(vec![2.0], vec![]).unwrap();
        assert_relative_eq!(generalized_eigen(&h, &s).unwrap().values[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn generalized_with_identity_is_standard() {
        let n = 6;
        let h = SymDense::from_fn(n, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let s = SymTridiag::new(vec![1.0; n], vec![0.0; n - 1]).unwrap();
        let g = generalized_eigen(&h, &s).unwrap();
        let std = symmetric_eigen(&h);
        for (a, b) in g.values.iter().zip(&std.values) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn generalized_hydrogen_one_by_one() {
        // (μ²/4)(1 + 4Z/μ) against overlap 2, Z = -1, μ = 2
        let (z, mu) = (-1.0, 2.0);
        let h = SymDense::from_fn(1, |_, _| mu * mu / 4.0 * (1.0 + 4.0 * z / mu));
        let s = SymTridiag::new(vec![2.0], vec![]).unwrap();
        assert_relative_eq!(generalized_eigen(&h, &s).unwrap().values[0], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn generalized_residuals_and_s_orthonormality() {
        let n = 30;
        let s = overlap(n, 0.0);
        let h = SymDense::from_fn(n, |i, j| {
            if i == j {
                i as f64 - 3.0
            } else if i.abs_diff(j) == 1 {
                0.7
            } else {
                0.01 / (1.0 + (i + j) as f64)
            }
        });
        let g = generalized_eigen(&h, &s).unwrap();
        let sd = s.to_dense();
        let (hn, sn) = (h.frobenius_norm(), sd.frobenius_norm());
        for k in 0..n {
            let c = g.vector(k);
            let hc = h.apply(&c);
            let sc = s.apply(&c);
            let res: f64 = hc
                .iter()
                .zip(&sc)
                .map(|(a, b)| (a - g.values[k] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-9 * (hn + g.values[k].abs() * sn));
            for j in 0..n {
                let dot: f64 = g.vector(j).iter().zip(&sc).map(|(a, b)| a * b).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((dot - want).abs() <= 1e-9, "S-orthogonality {j},{k}: {dot}");
            }
        }
    }

    #[test]
    fn generalized_dimension_mismatch() {
        let h = SymDense::identity(3);
        let s = overlap(2, 0.0);
        assert!(matches!(generalized_eigen(&h, &s), Err(Error::DimensionMismatch(_))));
    }
}
