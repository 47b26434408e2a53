//! Dense univariate complex polynomials, coefficients in ascending order.

use num_complex::Complex64;

use crate::linalg::{schur, singular_values, zeros, CMatrix};

pub fn eval(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

pub fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn max_abs(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Drops leading coefficients with modulus at most `abs_tol`.
pub fn trim(c: &[Complex64], abs_tol: f64) -> Vec<Complex64> {
    let mut v = c.to_vec();
    while v.last().is_some_and(|z| z.norm() <= abs_tol) {
        v.pop();
    }
    v
}

/// Roots of a polynomial whose leading coefficient is nonzero, from the
/// eigenvalues of the companion matrix. Near-coincident roots are merged
/// and re-located on the matching derivative, so multiple roots come out
/// accurate instead of split by O(ε^{1/m}).
pub fn roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut comp = zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let raw = schur(&comp).eigenvalues();
    let raw: Vec<Complex64> = raw.into_iter().map(|z| polish(c, z, 0)).collect();
    cluster_and_polish(c, raw)
}

/// Newton iterations on the `order`-th derivative; a step is kept only when
/// it lowers the residual.
fn polish(c: &[Complex64], z0: Complex64, order: usize) -> Complex64 {
    let mut f = c.to_vec();
    for _ in 0..order {
        f = derivative(&f);
    }
    let df = derivative(&f);
    if df.is_empty() {
        return z0;
    }
    let mut z = z0;
    let mut r = eval(&f, z).norm();
    for _ in 0..8 {
        let d = eval(&df, z);
        if d.norm() == 0.0 || r == 0.0 {
            break;
        }
        let step = z - eval(&f, z) / d;
        let rs = eval(&f, step).norm();
        if !(rs < r) {
            break;
        }
        z = step;
        r = rs;
    }
    z
}

fn cluster_and_polish(c: &[Complex64], raw: Vec<Complex64>) -> Vec<Complex64> {
    let n = raw.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn find(g: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while g[r] != r {
            r = g[r];
        }
        g[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let gap = 1e-5 * raw[i].norm().max(raw[j].norm()).max(1.0);
            if (raw[i] - raw[j]).norm() <= gap {
                let (a, b) = (find(&mut group, i), find(&mut group, j));
                group[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for i in 0..n {
        let root = find(&mut group, i);
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let members: Vec<Complex64> = (0..n)
            .filter(|&j| find(&mut group, j) == root)
            .map(|j| raw[j])
            .collect();
        let m = members.len();
        if m == 1 {
            out.push(members[0]);
        } else {
            let centroid = members.iter().sum::<Complex64>() / m as f64;
            let z = polish(c, centroid, m - 1);
            out.extend(std::iter::repeat_n(z, m));
        }
    }
    out
}

/// Sylvester matrix of f (degree n) and g (degree m), size (n+m)×(n+m).
fn sylvester(f: &[Complex64], g: &[Complex64]) -> CMatrix {
    let n = f.len() - 1;
    let m = g.len() - 1;
    let size = n + m;
    let mut s = zeros(size, size);
    for row in 0..m {
        for (k, &a) in f.iter().rev().enumerate() {
            s[(row, row + k)] = a;
        }
    }
    for row in 0..n {
        for (k, &a) in g.iter().rev().enumerate() {
            s[(m + row, row + k)] = a;
        }
    }
    s
}

/// Degree of the approximate gcd from the numerical rank of the Sylvester
/// matrix, singular values counted above `rel_tol·σ_max`. Inputs must be
/// trimmed; an empty slice stands for the zero polynomial.
pub fn gcd_degree(f: &[Complex64], g: &[Complex64], rel_tol: f64) -> usize {
    match (f.len(), g.len()) {
        (0, 0) => 0,
        (0, lg) => lg - 1,
        (lf, 0) => lf - 1,
        (1, _) | (_, 1) => 0,
        (lf, lg) => {
            let nf = max_abs(f);
            let ng = max_abs(g);
            let fs: Vec<_> = f.iter().map(|z| z / nf).collect();
            let gs: Vec<_> = g.iter().map(|z| z / ng).collect();
            let sv = singular_values(&sylvester(&fs, &gs));
            let top = sv.iter().copied().fold(0.0, f64::max);
            let rank = sv.iter().filter(|&&s| s > rel_tol * top).count();
            lf - 1 + lg - 1 - rank
        }
    }
}
