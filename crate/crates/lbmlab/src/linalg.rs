//! Small dense linear algebra: just enough for q x q moment matrices
//! (q <= 19) and the per-wavevector evolution matrices of the dispersion
//! analysis. Row-major storage throughout.

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("QR eigensolver failed to converge after {0} sweeps")]
    NonConvergence(usize),
    #[error("eigenpair residual {residual:.3e} exceeds {limit:.3e} for eigenvalue {value}")]
    BadResidual { value: C64, residual: f64, limit: f64 },
    #[error("matrix is singular (pivot {0})")]
    Singular(usize),
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

// ---------------------------------------------------------------- real matrix

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
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
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Least-squares solution of A x = b (m >= n) by Householder QR.
pub fn lstsq(a: &Mat, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let (m, n) = (a.rows, a.cols);
    if b.len() != m || m < n {
        return Err(LinalgError::Shape(format!("lstsq {m}x{n}, rhs {}", b.len())));
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    for k in 0..n {
        // Householder vector for column k, rows k..m.
        let mut norm = 0.0;
        for i in k..m {
            norm = f64::hypot(norm, r[(i, k)]);
        }
        if norm == 0.0 {
            return Err(LinalgError::Singular(k));
        }
        let alpha = if r[(k, k)] >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; m - k];
        v[0] = r[(k, k)] - alpha;
        for i in k + 1..m {
            v[i - k] = r[(i, k)];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        r[(k, k)] = alpha;
        for i in k + 1..m {
            r[(i, k)] = 0.0;
        }
        for j in k + 1..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i - k] * r[(i, j)];
            }
            let f = 2.0 * dot / vtv;
            for i in k..m {
                r[(i, j)] -= f * v[i - k];
            }
        }
        let mut dot = 0.0;
        for i in k..m {
            dot += v[i - k] * y[i];
        }
        let f = 2.0 * dot / vtv;
        for i in k..m {
            y[i] -= f * v[i - k];
        }
    }
    // Back-substitute R x = y[..n].
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in i + 1..n {
            acc -= r[(i, j)] * x[j];
        }
        if r[(i, i)] == 0.0 {
            return Err(LinalgError::Singular(i));
        }
        x[i] = acc / r[(i, i)];
    }
    Ok(x)
}

// ------------------------------------------------------------- complex matrix

/// Dense complex matrix, row-major.
#[derive(Debug, Clone)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(a: &Mat) -> Self {
        assert_eq!(a.rows, a.cols);
        CMat { n: a.rows, data: a.data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(x.len(), n);
        let mut y = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn conj(&self) -> CMat {
        CMat { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Determinant via LU.
    pub fn det(&self) -> C64 {
        match CLu::factor(self) {
            Ok(lu) => lu.det(),
            Err(_) => C64::new(0.0, 0.0),
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

// -------------------------------------------------------------- LU (complex)

/// LU factorization with partial pivoting, P A = L U.
pub struct CLu {
    n: usize,
    lu: Vec<C64>,
    piv: Vec<usize>,
    swaps: usize,
}

impl CLu {
    pub fn factor(a: &CMat) -> Result<CLu, LinalgError> {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm_sqr();
            for i in k + 1..n {
                let mag = lu[i * n + k].norm_sqr();
                if mag > best {
                    best = mag;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(LinalgError::Singular(k));
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                for j in k + 1..n {
                    let sub = m * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        Ok(CLu { n, lu, piv, swaps })
    }

    /// Like `factor`, but replaces zero pivots with a tiny perturbation so the
    /// factorization of a (near-)singular shifted matrix can still drive
    /// inverse iteration.
    pub fn factor_perturbed(a: &CMat, eps: f64) -> CLu {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm_sqr();
            for i in k + 1..n {
                let mag = lu[i * n + k].norm_sqr();
                if mag > best {
                    best = mag;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                swaps += 1;
            }
            if lu[k * n + k].norm_sqr() < eps * eps {
                lu[k * n + k] = C64::new(eps, 0.0);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                for j in k + 1..n {
                    let sub = m * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        CLu { n, lu, piv, swaps }
    }

    pub fn det(&self) -> C64 {
        let mut d = if self.swaps % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) };
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// Solve A* x = b using the factors of A (A* = U* L* P).
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut y = b.to_vec();
        // U* z = b (forward substitution, U* is lower triangular).
        for i in 0..n {
            for j in 0..i {
                let sub = self.lu[j * n + i].conj() * y[j];
                y[i] -= sub;
            }
            y[i] /= self.lu[i * n + i].conj();
        }
        // L* w = z (back substitution, unit diagonal).
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.lu[j * n + i].conj() * y[j];
                y[i] -= sub;
            }
        }
        // x = P^T w: row k of PA is row piv[k] of A, so scatter back.
        let mut x = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            x[self.piv[k]] = y[k];
        }
        x
    }

    pub fn inverse(&self) -> CMat {
        let n = self.n;
        let mut inv = CMat::zeros(n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
            e[j] = C64::new(0.0, 0.0);
        }
        inv
    }
}

// ------------------------------------------------------------- eigen (Schur)

/// Eigendecomposition of a dense complex matrix.
pub struct Eigen {
    pub values: Vec<C64>,
    /// Right eigenvectors, one per column, unit norm.
    pub vectors: CMat,
}

fn givens(a: C64, b: C64) -> (f64, C64, C64) {
    if b.norm_sqr() == 0.0 {
        return (1.0, C64::new(0.0, 0.0), a);
    }
    if a.norm_sqr() == 0.0 {
        return (0.0, b.conj() / b.norm(), C64::new(b.norm(), 0.0));
    }
    let na = a.norm();
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let alpha = a / na;
    let c = na / norm;
    let s = alpha * b.conj() / norm;
    (c, s, alpha * norm)
}

/// Reduce to upper Hessenberg by Householder similarity; returns (H, Q) with
/// A = Q H Q*.
fn hessenberg(a: &CMat) -> (CMat, CMat) {
    let n = a.n;
    let mut h = a.clone();
    let mut q = CMat::identity(n);
    for k in 0..n.saturating_sub(2) {
        // Householder vector from column k, rows k+1..n.
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = v[0];
        let tail: f64 = v[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 && alpha.im == 0.0 {
            continue;
        }
        let norm = (alpha.norm_sqr() + tail).sqrt();
        let beta = if alpha.re >= 0.0 { -norm } else { norm };
        let tau = C64::new((beta - alpha.re) / beta, -alpha.im / beta);
        let scale = alpha - C64::new(beta, 0.0);
        v[0] = C64::new(1.0, 0.0);
        for z in v[1..].iter_mut() {
            *z /= scale;
        }
        // H <- P* H with P* = I - conj(tau) v v*, rows k+1..n.
        let tbar = tau.conj();
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in k + 1..n {
                dot += v[i - k - 1].conj() * h[(i, j)];
            }
            let f = tbar * dot;
            for i in k + 1..n {
                let sub = f * v[i - k - 1];
                h[(i, j)] -= sub;
            }
        }
        // H <- H P with P = I - tau v v*, cols k+1..n.
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in k + 1..n {
                dot += h[(i, j)] * v[j - k - 1];
            }
            let f = dot * tau;
            for j in k + 1..n {
                let sub = f * v[j - k - 1].conj();
                h[(i, j)] -= sub;
            }
        }
        // Q <- Q P.
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in k + 1..n {
                dot += q[(i, j)] * v[j - k - 1];
            }
            let f = dot * tau;
            for j in k + 1..n {
                let sub = f * v[j - k - 1].conj();
                q[(i, j)] -= sub;
            }
        }
        // Entries below the subdiagonal are exactly zero by construction.
        h[(k + 1, k)] = C64::new(beta, 0.0);
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Eigenvalues of the trailing 2x2 block; returns the one closest to d.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm_sqr() <= (l2 - d).norm_sqr() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition A = Q T Q* via Hessenberg reduction followed
/// by implicitly shifted QR with deflation. Sweep budget is 100 n.
pub fn schur(a: &CMat) -> Result<(CMat, CMat), LinalgError> {
    let n = a.n;
    let (mut h, mut q) = hessenberg(a);
    if n <= 1 {
        return Ok((h, q));
    }
    let ulp = f64::EPSILON;
    let budget = 100 * n;
    let mut sweeps = 0usize;
    let mut hi = n - 1;
    let mut stagnation = 0usize;
    loop {
        // Deflate converged subdiagonals.
        while hi > 0 {
            let small = ulp * (h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm()).max(f64::MIN_POSITIVE);
            if h[(hi, hi - 1)].norm() <= small {
                h[(hi, hi - 1)] = C64::new(0.0, 0.0);
                hi -= 1;
                stagnation = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            break;
        }
        // Active block [lo..=hi].
        let mut lo = hi;
        while lo > 0 {
            let small = ulp * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm()).max(f64::MIN_POSITIVE);
            if h[(lo, lo - 1)].norm() <= small {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        sweeps += 1;
        stagnation += 1;
        if sweeps > budget {
            return Err(LinalgError::NonConvergence(sweeps));
        }
        let mu = if stagnation % 12 == 0 {
            // Exceptional shift to break symmetric stalls.
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        // Implicit single-shift sweep, chasing the bulge from lo to hi.
        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for i in lo..hi {
            let (c, s, _) = givens(x, y);
            let sbar = s.conj();
            // Left rotation on rows i, i+1.
            let jmin = i.saturating_sub(1).max(lo);
            for j in jmin..n {
                let t1 = h[(i, j)];
                let t2 = h[(i + 1, j)];
                h[(i, j)] = c * t1 + s * t2;
                h[(i + 1, j)] = -sbar * t1 + c * t2;
            }
            // Right rotation on cols i, i+1.
            let imax = (i + 2).min(hi);
            for r in 0..=imax {
                let t1 = h[(r, i)];
                let t2 = h[(r, i + 1)];
                h[(r, i)] = c * t1 + sbar * t2;
                h[(r, i + 1)] = -s * t1 + c * t2;
            }
            for r in 0..n {
                let t1 = q[(r, i)];
                let t2 = q[(r, i + 1)];
                q[(r, i)] = c * t1 + sbar * t2;
                q[(r, i + 1)] = -s * t1 + c * t2;
            }
            if i + 2 <= hi {
                x = h[(i + 1, i)];
                y = h[(i + 2, i)];
            }
        }
    }
    Ok((h, q))
}

/// All eigenvalues of a dense complex matrix.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>, LinalgError> {
    let (t, _) = schur(a)?;
    Ok((0..a.n).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues and unit-norm right eigenvectors.
///
/// Vectors come from back-substitution on the Schur factor; for (nearly)
/// repeated eigenvalues the vectors span the eigenspace but are not unique.
pub fn eig(a: &CMat) -> Result<Eigen, LinalgError> {
    let n = a.n;
    let (t, q) = schur(a)?;
    let tnorm = t.norm().max(f64::MIN_POSITIVE);
    let mut vectors = CMat::zeros(n);
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let lambda = t[(j, j)];
        values.push(lambda);
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[j] = C64::new(1.0, 0.0);
        for i in (0..j).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for k in i + 1..=j {
                acc += t[(i, k)] * y[k];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < f64::EPSILON * tnorm {
                den = C64::new(f64::EPSILON * tnorm, 0.0);
            }
            y[i] = -acc / den;
        }
        let v = q.mul_vec(&y);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            vectors[(i, j)] = v[i] / norm;
        }
    }
    Ok(Eigen { values, vectors })
}

/// One Newton-like cleanup of an approximate eigenpair: inverse iteration on
/// the shifted matrix refreshes the right and left vectors, and a two-sided
/// Rayleigh quotient refreshes the value. Returns (value, right vector).
pub fn refine_eigenpair(a: &CMat, z0: C64, v0: &[C64]) -> (C64, Vec<C64>) {
    let n = a.n;
    let mut z = z0;
    let mut v = v0.to_vec();
    for _ in 0..2 {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= z;
        }
        let eps = f64::EPSILON * a.norm().max(1.0);
        let lu = CLu::factor_perturbed(&shifted, eps);
        let mut w = lu.solve(&v);
        let wn = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !wn.is_finite() || wn == 0.0 {
            return (z, v);
        }
        for x in w.iter_mut() {
            *x /= wn;
        }
        let mut u = lu.solve_adjoint(&w);
        let un = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !un.is_finite() || un == 0.0 {
            return (z, w);
        }
        for x in u.iter_mut() {
            *x /= un;
        }
        let aw = a.mul_vec(&w);
        let num: C64 = u.iter().zip(&aw).map(|(ui, wi)| ui.conj() * wi).sum();
        let den: C64 = u.iter().zip(&w).map(|(ui, wi)| ui.conj() * wi).sum();
        if den.norm() < 1e-300 {
            return (z, w);
        }
        let z_new = num / den;
        v = w;
        if (z_new - z).norm() <= f64::EPSILON * z.norm() {
            z = z_new;
            break;
        }
        z = z_new;
    }
    (z, v)
}

/// Max over eigenpairs of ||A v - z v|| relative to ||A||.
pub fn eigen_residual(a: &CMat, e: &Eigen) -> f64 {
    let n = a.n;
    let anorm = a.norm().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for j in 0..n {
        let v: Vec<C64> = (0..n).map(|i| e.vectors[(i, j)]).collect();
        let av = a.mul_vec(&v);
        let mut r = 0.0;
        for i in 0..n {
            r += (av[i] - e.values[j] * v[i]).norm_sqr();
        }
        worst = worst.max(r.sqrt() / anorm);
    }
    worst
}
