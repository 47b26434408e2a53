//! Dense complex linear algebra used throughout the crate.
//!
//! nalgebra supplies SVD, Householder Hessenberg reduction, Hermitian
//! eigendecomposition and LU. The complex Schur form is computed here
//! because nalgebra's iteration stalls on defective matrices (Jordan blocks).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Builds a matrix from real row-major entries.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| cr(x)))
}

pub fn diag(entries: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(entries))
}

/// Singular value decomposition M = U diag(s) V*, with s descending. Columns
/// of U belonging to zero singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

const JACOBI_SWEEPS: usize = 80;

/// One-sided Jacobi SVD. nalgebra's bidiagonal complex SVD loses accuracy in
/// the singular vectors on some inputs; Jacobi keeps them accurate to
/// rounding.
pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = identity(cols);
    // Columns below this squared norm are zero for every purpose here, and
    // rotating them would work with subnormal numbers.
    let floor = (1e-3 * f64::EPSILON * m.norm()).powi(2).max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if alpha <= floor || beta <= floor || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)] * phase.conj();
                        mat[(i, p)] = xp * c - xq * s;
                        mat[(i, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = zeros(rows, cols);
    let mut vs = zeros(cols, cols);
    for (dst, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(dst, &a.column(j).unscale(norms[j]));
        }
        vs.set_column(dst, &v.column(j));
    }
    Svd {
        u,
        s: order.iter().map(|&j| norms[j]).collect(),
        v: vs,
    }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    // Fewer columns means fewer Jacobi pairs.
    if m.nrows() < m.ncols() {
        return svd(&m.adjoint()).s;
    }
    svd(m).s
}

/// Spectral (operator 2-) norm.
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a * b - b * a))
}

pub fn normality_defect(a: &CMatrix) -> f64 {
    op_norm(&(a.adjoint() * a - a * a.adjoint()))
}

/// ‖U*U − I‖; zero for an empty frame.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if u.ncols() == 0 {
        return 0.0;
    }
    op_norm(&(u.adjoint() * u - identity(u.ncols())))
}

pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()).scale(0.5)
}

/// Multiplies the column by a unimodular scalar so that its largest entry is
/// real and positive. Fixes the phase freedom of eigenvectors.
pub fn normalize_phase(col: &mut CVector) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in col.iter().enumerate() {
        // Ties are broken toward the first index, up to rounding.
        if z.norm() > best_abs * (1.0 + 1e-9) {
            best = i;
            best_abs = z.norm();
        }
    }
    if best_abs > 0.0 {
        let ph = col[best].conj() / best_abs;
        col.iter_mut().for_each(|z| *z *= ph);
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending,
/// eigenvector phases normalized.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut vecs = zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: CVector = eig.eigenvectors.column(src).into_owned();
        normalize_phase(&mut col);
        vecs.set_column(dst, &col);
        vals.push(eig.eigenvalues[src]);
    }
    (vals, vecs)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(h: &CMatrix) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    hermitian_part(h)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Complex Schur form A = Q T Q* with Q unitary and T upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
}

/// Plane rotation G = [[c, s], [−s̄, c]] with G·[x, y]ᵀ = [r, 0]ᵀ.
#[derive(Clone, Copy, Debug)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn zeroing(x: Complex64, y: Complex64) -> Self {
        let ax = x.norm();
        let ay = y.norm();
        if ay == 0.0 {
            return Givens { c: 1.0, s: ZERO };
        }
        if ax == 0.0 {
            return Givens {
                c: 0.0,
                s: y.conj() / ay,
            };
        }
        let r = ax.hypot(ay);
        Givens {
            c: ax / r,
            s: (x / ax) * y.conj() / r,
        }
    }

    /// Rows i, i+1 ← G · rows, on columns `cols`.
    fn rows(&self, m: &mut CMatrix, i: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = m[(i, j)];
            let b = m[(i + 1, j)];
            m[(i, j)] = a * self.c + self.s * b;
            m[(i + 1, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns i, i+1 ← columns · G*, on rows `rows`.
    fn cols(&self, m: &mut CMatrix, i: usize, rows: std::ops::Range<usize>) {
        for r in rows {
            let a = m[(r, i)];
            let b = m[(r, i + 1)];
            m[(r, i)] = a * self.c + b * self.s.conj();
            m[(r, i + 1)] = -a * self.s + b * self.c;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * cc).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Computes the complex Schur form by Hessenberg reduction and single-shift
/// QR sweeps with Wilkinson shifts and periodic exceptional shifts.
pub fn schur(a: &CMatrix) -> Schur {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "schur needs a square matrix");
    if n == 0 {
        return Schur {
            q: zeros(0, 0),
            t: zeros(0, 0),
        };
    }
    let (mut q, mut h) = a.clone().hessenberg().unpack();
    for i in 2..n {
        for j in 0..i - 1 {
            h[(i, j)] = ZERO;
        }
    }
    let eps = f64::EPSILON;
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= eps * diag || sub <= eps * eps * scale {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 200 * n.max(10) {
            // Not observed in practice; leave the partially reduced form.
            break;
        }
        let mu = if iter % 11 == 0 {
            h[(hi, hi)] + cr(0.75 * h[(hi, hi - 1)].re.abs() + 0.5 * h[(hi, hi - 1)].norm())
        } else if iter % 11 == 5 && l + 1 < hi {
            h[(l, l)] + cr(h[(l + 1, l)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        let mut x = h[(l, l)] - mu;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            if k > l {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let g = Givens::zeroing(x, y);
            let start = if k > l { k - 1 } else { l };
            g.rows(&mut h, k, start..n);
            g.cols(&mut h, k, 0..(k + 3).min(hi + 1));
            g.cols(&mut q, k, 0..n);
            if k > l {
                h[(k + 1, k - 1)] = ZERO;
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Schur { q, t: h }
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Swaps the diagonal entries k and k+1, keeping A = Q T Q*.
    fn swap(&mut self, k: usize) {
        let n = self.t.nrows();
        let a = self.t[(k, k)];
        let b = self.t[(k + 1, k + 1)];
        if a == b {
            return;
        }
        // [t12, b − a] is the eigenvector of the 2×2 block for b.
        let g = Givens::zeroing(self.t[(k, k + 1)], b - a);
        g.rows(&mut self.t, k, k..n);
        g.cols(&mut self.t, k, 0..k + 2);
        g.cols(&mut self.q, k, 0..n);
        self.t[(k + 1, k)] = ZERO;
        self.t[(k, k)] = b;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Moves selected eigenvalues to the leading block, preserving the
    /// relative order within both groups. Returns the size of that block.
    pub fn reorder(&mut self, select: impl Fn(Complex64) -> bool) -> usize {
        let n = self.t.nrows();
        let flags: Vec<bool> = self.eigenvalues().into_iter().map(&select).collect();
        let mut flags = flags;
        let mut target = 0;
        for i in 0..n {
            if flags[i] {
                let mut k = i;
                while k > target {
                    self.swap(k - 1);
                    flags.swap(k - 1, k);
                    k -= 1;
                }
                target += 1;
            }
        }
        target
    }
}

pub fn eigenvalues(a: &CMatrix) -> Vec<Complex64> {
    schur(a).eigenvalues()
}

pub fn spectral_radius(a: &CMatrix) -> f64 {
    eigenvalues(a).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis of the column space, keeping singular directions with
/// σ > `abs_tol`.
pub fn range_basis(m: &CMatrix, abs_tol: f64) -> CMatrix {
    let (r, cols) = m.shape();
    if r == 0 || cols == 0 {
        return zeros(r, 0);
    }
    let d = svd(m);
    let keep = d.s.iter().take_while(|&&x| x > abs_tol).count();
    d.u.columns(0, keep).into_owned()
}

/// Orthonormal basis of the null space, directions with σ ≤ `abs_tol`.
pub fn null_basis(m: &CMatrix, abs_tol: f64) -> CMatrix {
    let (r, cols) = m.shape();
    if cols == 0 {
        return zeros(0, 0);
    }
    if r == 0 {
        return identity(cols);
    }
    let d = svd(m);
    let rank = d.s.iter().take_while(|&&x| x > abs_tol).count();
    d.v.columns(rank, cols - rank).into_owned()
}

/// Horizontal concatenation of matrices with equal row counts.
pub fn hcat(parts: &[&CMatrix], rows: usize) -> CMatrix {
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        out.view_mut((0, at), (rows, p.ncols())).copy_from(*p);
        at += p.ncols();
    }
    out
}

/// Vertical concatenation of matrices with equal column counts.
pub fn vcat(parts: &[&CMatrix], cols: usize) -> CMatrix {
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        out.view_mut((at, 0), (p.nrows(), cols)).copy_from(*p);
        at += p.nrows();
    }
    out
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
