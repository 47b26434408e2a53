//! Seeded generators for test fixtures.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bipoly::{eval_unchecked, BiPoly};
use crate::geometry::Point2;
use crate::linalg::{diag, op_norm, CMatrix};
use crate::opcore::{numerical_radius_default, CommutingPair};

pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of R's diagonal moved into Q.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = complex_gaussian(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= ph;
            }
        }
    }
    q
}

pub fn unit_circle<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
}

/// Uniform point of the disc of radius `r`.
pub fn disc_point<R: Rng + ?Sized>(r: f64, rng: &mut R) -> Complex64 {
    Complex64::from_polar(r * rng.random::<f64>().sqrt(), rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
}

/// Rescales m to operator norm `target`.
pub fn with_norm(m: &CMatrix, target: f64) -> CMatrix {
    let n = op_norm(m);
    if n == 0.0 {
        m.clone()
    } else {
        m.scale(target / n)
    }
}

/// Rescales m to numerical radius `target`.
pub fn with_numerical_radius(m: &CMatrix, target: f64) -> CMatrix {
    let w = numerical_radius_default(m);
    if w == 0.0 {
        m.clone()
    } else {
        m.scale(target / w)
    }
}

/// The point (λ + λ̄e^{iψ}, e^{iψ}) of bΓ on the zero set of λ + λ̄z₂ − z₁.
pub fn line_boundary_point(lambda: Complex64, psi: f64) -> Point2 {
    let p = Complex64::from_polar(1.0, psi);
    Point2::new(lambda + lambda.conj() * p, p)
}

/// Commuting contractions (T₁, T₂) of size d with norms in [0.3, 0.99].
/// Alternates between normal pairs in a shared Haar basis and pairs
/// T₂ = q(T₁) for a random cubic q.
pub fn commuting_contractions<R: Rng + ?Sized>(d: usize, rng: &mut R) -> (CMatrix, CMatrix) {
    let n1 = rng.random_range(0.3..0.99);
    let n2 = rng.random_range(0.3..0.99);
    if rng.random_bool(0.5) {
        let u = haar_unitary(d, rng);
        let e1: Vec<Complex64> = (0..d).map(|_| disc_point(1.0, rng)).collect();
        let e2: Vec<Complex64> = (0..d).map(|_| disc_point(1.0, rng)).collect();
        let t1 = &u * diag(&e1) * u.adjoint();
        let t2 = &u * diag(&e2) * u.adjoint();
        (with_norm(&t1, n1), with_norm(&t2, n2))
    } else {
        let t1 = complex_gaussian(d, d, rng);
        let terms: Vec<(usize, usize, Complex64)> = (0..4)
            .map(|i| (i, 0, complex_gaussian(1, 1, rng)[(0, 0)]))
            .collect();
        let q = BiPoly::from_terms(&terms);
        let t2 = eval_unchecked(&q, &t1, &CMatrix::zeros(d, d));
        (with_norm(&t1, n1), with_norm(&t2, n2))
    }
}

/// π(T₁, T₂) for random commuting contractions; always a Γ-contraction.
pub fn gamma_contraction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CommutingPair {
    let (t1, t2) = commuting_contractions(d, rng);
    CommutingPair::with_tolerance(&t1 + &t2, &t1 * &t2, 1e-8)
        .expect("commuting by construction")
        .with_role(crate::opcore::PairRole::GammaContraction)
}
