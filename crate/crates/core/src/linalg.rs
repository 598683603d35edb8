//! Dense complex linear algebra: matrix storage, LU solves, a general complex
//! eigensolver (Hessenberg reduction + shifted QR + Schur-vector back
//! substitution), and a cyclic Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
/// Underflow guard for triangular solves with (near-)defective matrices.
const SMLNUM: f64 = f64::MIN_POSITIVE / f64::EPSILON;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v += w;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v -= w;
        }
        out
    }

    /// `self * other`, cache-friendly ikj ordering.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        self.mul_into(other, &mut out);
        out
    }

    /// `out = self * other` without allocating.
    pub fn mul_into(&self, other: &Self, out: &mut Self) {
        assert_eq!(self.cols, other.rows);
        assert_eq!((out.rows, out.cols), (self.rows, other.cols));
        out.data.fill(C64::new(0.0, 0.0));
        let n = other.cols;
        for i in 0..self.rows {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
    }

    /// `out += s * (a * b)`.
    pub fn mul_acc(a: &Self, b: &Self, s: C64, out: &mut Self) {
        assert_eq!(a.cols, b.rows);
        let n = b.cols;
        for i in 0..a.rows {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for k in 0..a.cols {
                let f = a.data[i * a.cols + k] * s;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                let brow = &b.data[k * n..(k + 1) * n];
                for (o, v) in orow.iter_mut().zip(brow) {
                    *o += f * v;
                }
            }
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry deviation from the adjoint.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// (A + A†)/2 and (A − A†)/2.
    pub fn hermitian_split(&self) -> (Self, Self) {
        let adj = self.adjoint();
        let half = C64::new(0.5, 0.0);
        (self.add(&adj).scale(half), self.sub(&adj).scale(half))
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |i, j| {
            self[(i / p, j / q)] * other[(i % p, j % q)]
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Solve `a x = b` by LU with partial pivoting.
pub fn lu_solve(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(Error::Dimension(format!(
            "lu_solve needs square a and matching b: {}x{}, b {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let mut lu = a.clone();
    let mut x: Vec<C64> = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
        if pmax < SMLNUM {
            return Err(Error::Singular);
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            perm.swap(k, piv);
            x.swap(k, piv);
        }
        let inv = C64::new(1.0, 0.0) / lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] * inv;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let s = lu[(k, j)];
                lu[(i, j)] -= f * s;
            }
            x[i] = x[i] - f * x[k];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= lu[(i, j)] * x[j];
        }
        x[i] = s / lu[(i, i)];
    }
    Ok(x)
}

/// Schur decomposition a = q t q† with t upper triangular.
pub struct Schur {
    pub t: CMat,
    pub q: CMat,
}

/// Eigen decomposition of a general complex matrix.
pub struct Eigen {
    pub values: Vec<C64>,
    /// Unit-norm eigenvectors, one per column, same order as `values`.
    pub vectors: CMat,
}

fn givens(a: C64, b: C64) -> (f64, C64, C64) {
    // returns (c, s, r) with [c, s; -conj(s), c]·[a; b] = [r; 0], c real
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0), a);
    }
    if na == 0.0 {
        return (0.0, C64::new(1.0, 0.0), b);
    }
    let scale = na.max(nb);
    let r = scale * ((na / scale).powi(2) + (nb / scale).powi(2)).sqrt();
    let alpha = a / na;
    (na / r, alpha * b.conj() / r, alpha * r)
}

/// Householder reduction to upper Hessenberg form; returns (h, q) with
/// a = q h q†.
fn hessenberg(a: &CMat) -> (CMat, CMat) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMat::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        // build reflector for column k, rows k+1..n
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < SMLNUM {
            continue;
        }
        let alpha = if v[0].norm() > 0.0 {
            -(v[0] / v[0].norm()) * norm
        } else {
            C64::new(-norm, 0.0)
        };
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 < SMLNUM {
            continue;
        }
        let m = v.len();
        // H <- P H with P = I - 2 v v†/|v|²  acting on rows k+1..n
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..m {
                s += v[i].conj() * h[(k + 1 + i, j)];
            }
            s *= 2.0 / vnorm2;
            for i in 0..m {
                let d = v[i] * s;
                h[(k + 1 + i, j)] -= d;
            }
        }
        // H <- H P on columns k+1..n
        for i in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..m {
                s += h[(i, k + 1 + j)] * v[j];
            }
            s *= 2.0 / vnorm2;
            for j in 0..m {
                let d = s * v[j].conj();
                h[(i, k + 1 + j)] -= d;
            }
        }
        // Q <- Q P
        for i in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..m {
                s += q[(i, k + 1 + j)] * v[j];
            }
            s *= 2.0 / vnorm2;
            for j in 0..m {
                let d = s * v[j].conj();
                q[(i, k + 1 + j)] -= d;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
        h[(k + 1, k)] = alpha;
    }
    (h, q)
}

/// Wilkinson shift: eigenvalue of the trailing 2x2 block closest to the
/// bottom-right entry.
fn wilkinson_shift(h: &CMat, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Schur decomposition via shifted QR on the Hessenberg form.
///
/// `max_sweeps` caps the total number of QR iterations; `NonConvergence` is
/// returned past the cap.
pub fn schur(a: &CMat, max_sweeps: usize) -> Result<Schur> {
    if !a.is_square() {
        return Err(Error::Dimension("schur needs a square matrix".into()));
    }
    let n = a.rows();
    let (mut h, mut q) = hessenberg(a);
    if n < 2 {
        return Ok(Schur { t: h, q });
    }
    let mut hi = n - 1;
    let mut iters_here = 0usize;
    let mut total = 0usize;
    loop {
        // deflate converged subdiagonals
        while hi > 0 {
            let s = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[(hi, hi - 1)].norm() <= EPS * s {
                h[(hi, hi - 1)] = C64::new(0.0, 0.0);
                hi -= 1;
                iters_here = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            break;
        }
        // find the start of the active block
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[(lo, lo - 1)].norm() <= EPS * s {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        total += 1;
        iters_here += 1;
        if total > max_sweeps {
            return Err(Error::NonConvergence {
                what: "QR iteration".into(),
                detail: format!("{total} sweeps on dimension {n}"),
            });
        }
        let shift = if iters_here % 12 == 0 {
            // exceptional shift to break symmetric stalls
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(&h, hi)
        };
        // explicit shifted QR step on [lo..=hi]
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s, r) = givens(h[(k, k)], h[(k + 1, k)]);
            h[(k, k)] = r;
            h[(k + 1, k)] = C64::new(0.0, 0.0);
            for j in k + 1..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + c * y;
            }
            rots.push((c, s));
        }
        for (k, (c, s)) in (lo..hi).zip(rots) {
            let top = (k + 2).min(hi + 1);
            for i in 0..top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = c * x + s.conj() * y;
                h[(i, k + 1)] = -s * x + c * y;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = c * x + s.conj() * y;
                q[(i, k + 1)] = -s * x + c * y;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(Schur { t: h, q })
}

/// All eigenpairs of a general complex square matrix.
///
/// Triangular eigenvectors are obtained by back substitution on the Schur
/// factor and rotated back with the accumulated unitary.
pub fn eigen(a: &CMat) -> Result<Eigen> {
    let n = a.rows();
    let cap = 100 * n.max(1);
    let Schur { t, q } = schur(a, cap)?;
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = t.max_abs().max(SMLNUM);
    let mut vt = CMat::zeros(n, n);
    for j in 0..n {
        let lambda = values[j];
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[j] = C64::new(1.0, 0.0);
        for i in (0..j).rev() {
            let mut s = C64::new(0.0, 0.0);
            for k in i + 1..=j {
                s += t[(i, k)] * y[k];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < EPS * scale {
                den = C64::new(EPS * scale, 0.0);
            }
            y[i] = -s / den;
        }
        let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (i, v) in y.iter().enumerate() {
            vt[(i, j)] = v / norm;
        }
    }
    let vectors = q.mul(&vt);
    Ok(Eigen { values, vectors })
}

/// Eigen decomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// Returns real eigenvalues and a unitary whose columns are the
/// eigenvectors, so a = u diag(w) u†.
pub fn eigen_hermitian(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    if !a.is_square() {
        return Err(Error::Dimension("eigen_hermitian needs a square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut u = CMat::identity(n);
    let off = |m: &CMat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let scale = m.max_abs().max(SMLNUM);
    for _sweep in 0..60 {
        if off(&m) <= 1e-14 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for qi in p + 1..n {
                let apq = m[(p, qi)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(qi, qi)].re;
                // phase so the off-diagonal becomes real, then a real rotation
                let phase = apq / apq.norm();
                let g = apq.norm();
                let theta = 0.5 * (2.0 * g).atan2(aqq - app);
                let (c, s) = (theta.cos(), theta.sin());
                // column rotation: [p q] <- [p q]·[[c, s e^{iφ}], [-s e^{-iφ}, c]]-style
                let sp = s * phase;
                for i in 0..n {
                    let x = m[(i, p)];
                    let y = m[(i, qi)];
                    m[(i, p)] = c * x - sp.conj() * y;
                    m[(i, qi)] = sp * x + c * y;
                }
                for j in 0..n {
                    let x = m[(p, j)];
                    let y = m[(qi, j)];
                    m[(p, j)] = c * x - sp * y;
                    m[(qi, j)] = sp.conj() * x + c * y;
                }
                for i in 0..n {
                    let x = u[(i, p)];
                    let y = u[(i, qi)];
                    u[(i, p)] = c * x - sp.conj() * y;
                    u[(i, qi)] = sp * x + c * y;
                }
            }
        }
    }
    let w: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    Ok((w, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn residual(a: &CMat, lambda: C64, v: &[C64]) -> f64 {
        let av = a.matvec(v);
        av.iter()
            .zip(v)
            .map(|(x, y)| (x - lambda * y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn lu_solves_random_system() {
        let a = CMat::from_fn(6, 6, |i, j| c((i * j % 5) as f64 + 1.0, (i as f64 - j as f64) * 0.3));
        let x_true: Vec<C64> = (0..6).map(|i| c(i as f64 * 0.7 - 1.0, 0.2 * i as f64)).collect();
        let b = a.matvec(&x_true);
        let x = lu_solve(&a, &b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).norm() < 1e-11);
        }
    }

    #[test]
    fn eigen_diagonal_matrix() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = c(1.0, 2.0);
        a[(1, 1)] = c(3.0, 0.0);
        let e = eigen(&a).unwrap();
        let mut vals = e.values.clone();
        vals.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((vals[0] - c(1.0, 2.0)).norm() < 1e-14);
        assert!((vals[1] - c(3.0, 0.0)).norm() < 1e-14);
        for j in 0..2 {
            let v: Vec<C64> = (0..2).map(|i| e.vectors[(i, j)]).collect();
            let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((n2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_residuals_on_random_matrices() {
        // deterministic pseudo-random fill
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for n in [3usize, 8, 17, 36] {
            let a = CMat::from_fn(n, n, |_, _| c(rnd() * 4.0, rnd() * 4.0));
            let e = eigen(&a).unwrap();
            let scale = a.max_abs();
            for j in 0..n {
                let v: Vec<C64> = (0..n).map(|i| e.vectors[(i, j)]).collect();
                assert!(
                    residual(&a, e.values[j], &v) <= 1e-9 * scale,
                    "n={n} j={j} residual too large"
                );
            }
            // eigenvalue sum equals trace
            let s: C64 = e.values.iter().sum();
            assert!((s - a.trace()).norm() < 1e-9 * scale * n as f64);
        }
    }

    #[test]
    fn eigen_handles_defective_jordan_block() {
        // [[2, 1], [0, 2]] is defective; residuals must still be small
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = c(2.0, 0.0);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 1)] = c(2.0, 0.0);
        let e = eigen(&a).unwrap();
        for j in 0..2 {
            let v: Vec<C64> = (0..2).map(|i| e.vectors[(i, j)]).collect();
            assert!(residual(&a, e.values[j], &v) < 1e-7);
        }
    }

    #[test]
    fn hermitian_jacobi_diagonalizes() {
        let n = 9;
        let mut state = 123u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = CMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = c(rnd(), if i == j { 0.0 } else { rnd() });
                a[(i, j)] = v;
                a[(j, i)] = v.conj();
            }
        }
        let (w, u) = eigen_hermitian(&a).unwrap();
        // a u = u diag(w)
        for j in 0..n {
            let v: Vec<C64> = (0..n).map(|i| u[(i, j)]).collect();
            assert!(residual(&a, c(w[j], 0.0), &v) < 1e-10);
        }
        // unitarity
        let utu = u.adjoint().mul(&u);
        let id = CMat::identity(n);
        assert!(utu.sub(&id).max_abs() < 1e-12);
    }

    #[test]
    fn kron_matches_definition() {
        let a = CMat::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 1.0));
        let b = CMat::from_fn(2, 2, |i, j| c(0.0, (1 + i + j) as f64));
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert!((k[(3, 2)] - a[(1, 1)] * b[(1, 0)]).norm() < 1e-15);
    }
}
