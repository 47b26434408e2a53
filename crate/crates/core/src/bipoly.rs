//! Bivariate polynomials in (z₁, z₂): evaluation on points and commuting
//! pairs, determinantal pencils, and the sampling classifier for
//! distinguished and Γ-distinguished zero sets.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::geometry::{classify_point, symmetrize, Point2, PointClass, PointTag};
use crate::linalg::{identity, null_basis, op_norm, zeros, CMatrix};
use crate::opcore::CommutingPair;
use crate::poly1;

/// Coefficients below this fraction of the largest one count as zero.
pub const ZERO_THRESHOLD: f64 = 1e-10;

const CZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// p(z₁, z₂) = Σ a_ij z₁^i z₂^j on an (n+1)×(m+1) grid, row index = power
/// of z₁.
///
/// JSON: `{"deg": [n, m], "coeffs": [[[re, im], ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyWire", into = "PolyWire")]
pub struct BiPoly {
    deg: (usize, usize),
    coeffs: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    deg: [usize; 2],
    coeffs: Vec<Vec<Complex64>>,
}

impl TryFrom<PolyWire> for BiPoly {
    type Error = Error;

    fn try_from(w: PolyWire) -> Result<Self> {
        let p = BiPoly::new(w.coeffs)?;
        if p.deg != (w.deg[0], w.deg[1]) {
            return Err(Error::InvalidPolynomial(format!(
                "declared bidegree {:?} does not match the {}x{} grid",
                w.deg,
                p.deg.0 + 1,
                p.deg.1 + 1
            )));
        }
        Ok(p)
    }
}

impl From<BiPoly> for PolyWire {
    fn from(p: BiPoly) -> Self {
        PolyWire {
            deg: [p.deg.0, p.deg.1],
            coeffs: p.coeffs,
        }
    }
}

impl BiPoly {
    /// Validates a rectangular coefficient grid whose bidegree is attained.
    pub fn new(coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        let rows = coeffs.len();
        let cols = coeffs.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidPolynomial("empty coefficient grid".into()));
        }
        if coeffs.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidPolynomial("ragged coefficient grid".into()));
        }
        if coeffs.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }
        let p = BiPoly {
            deg: (rows - 1, cols - 1),
            coeffs,
        };
        let thr = ZERO_THRESHOLD * p.max_abs();
        if !p.is_zero() {
            let top_row = p.coeffs[rows - 1].iter().any(|z| z.norm() > thr);
            let top_col = p.coeffs.iter().any(|r| r[cols - 1].norm() > thr);
            if !top_row && !top_col {
                return Err(Error::InvalidPolynomial(
                    "declared bidegree is not attained".into(),
                ));
            }
        }
        Ok(p)
    }

    /// Builds a polynomial from (i, j, a_ij) terms; repeated terms add up.
    pub fn from_terms(terms: &[(usize, usize, Complex64)]) -> Self {
        let n = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let m = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut coeffs = vec![vec![CZERO; m + 1]; n + 1];
        for &(i, j, a) in terms {
            coeffs[i][j] += a;
        }
        BiPoly { deg: (n, m), coeffs }.trimmed()
    }

    /// Same as [`from_terms`](Self::from_terms) with real coefficients.
    pub fn from_real_terms(terms: &[(usize, usize, f64)]) -> Self {
        let t: Vec<_> = terms
            .iter()
            .map(|&(i, j, a)| (i, j, Complex64::new(a, 0.0)))
            .collect();
        Self::from_terms(&t)
    }

    pub fn zero() -> Self {
        BiPoly {
            deg: (0, 0),
            coeffs: vec![vec![CZERO]],
        }
    }

    pub fn constant(a: Complex64) -> Self {
        BiPoly {
            deg: (0, 0),
            coeffs: vec![vec![a]],
        }
    }

    pub fn z1() -> Self {
        Self::from_real_terms(&[(1, 0, 1.0)])
    }

    pub fn z2() -> Self {
        Self::from_real_terms(&[(0, 1, 1.0)])
    }

    /// λ + μ z₂ − z₁, the linear pencil factor.
    pub fn line(lambda: Complex64, mu: Complex64) -> Self {
        Self::from_terms(&[(0, 0, lambda), (0, 1, mu), (1, 0, Complex64::new(-1.0, 0.0))])
    }

    pub fn degree(&self) -> (usize, usize) {
        self.deg
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        self.coeffs
            .get(i)
            .and_then(|r| r.get(j))
            .copied()
            .unwrap_or(CZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Σ |a_ij|.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().flatten().map(|z| z.norm()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|z| *z == CZERO)
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, a)| **a != CZERO)
                .map(move |(j, &a)| (i, j, a))
        })
    }

    /// Largest i + j over nonzero terms.
    pub fn total_degree(&self) -> usize {
        self.terms().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }

    /// Zeroes coefficients below the relative threshold and shrinks the grid
    /// to the attained bidegree.
    pub fn trimmed(&self) -> Self {
        let thr = ZERO_THRESHOLD * self.max_abs();
        let mut coeffs = self.coeffs.clone();
        for z in coeffs.iter_mut().flatten() {
            if z.norm() <= thr {
                *z = CZERO;
            }
        }
        let n = (0..coeffs.len())
            .rev()
            .find(|&i| coeffs[i].iter().any(|z| *z != CZERO))
            .unwrap_or(0);
        let m = (0..coeffs[0].len())
            .rev()
            .find(|&j| coeffs.iter().any(|r| r[j] != CZERO))
            .unwrap_or(0);
        coeffs.truncate(n + 1);
        for r in coeffs.iter_mut() {
            r.truncate(m + 1);
        }
        BiPoly { deg: (n, m), coeffs }
    }

    /// Rescales so the largest coefficient is 1 (in modulus and phase).
    pub fn normalized(&self) -> Self {
        let (mut best, mut arg) = (CZERO, 0.0);
        for (_, _, a) in self.terms() {
            if a.norm() > arg * (1.0 + 1e-9) {
                best = a;
                arg = a.norm();
            }
        }
        if arg == 0.0 {
            return self.clone();
        }
        self.scale(best.inv())
    }

    pub fn scale(&self, k: Complex64) -> Self {
        BiPoly {
            deg: self.deg,
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(|a| a * k).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &BiPoly) -> Self {
        let mut t: Vec<_> = self.terms().collect();
        t.extend(other.terms());
        Self::from_terms(&t)
    }

    pub fn sub(&self, other: &BiPoly) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &BiPoly) -> Self {
        let (n1, m1) = self.deg;
        let (n2, m2) = other.deg;
        let mut coeffs = vec![vec![CZERO; m1 + m2 + 1]; n1 + n2 + 1];
        for (i, j, a) in self.terms() {
            for (k, l, b) in other.terms() {
                coeffs[i + k][j + l] += a * b;
            }
        }
        BiPoly {
            deg: (n1 + n2, m1 + m2),
            coeffs,
        }
        .trimmed_exact()
    }

    pub fn product(factors: &[BiPoly]) -> Self {
        factors
            .iter()
            .fold(Self::constant(Complex64::new(1.0, 0.0)), |acc, f| acc.mul(f))
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::product(&vec![self.clone(); k as usize])
    }

    /// Shrinks exact-zero trailing rows and columns only.
    fn trimmed_exact(self) -> Self {
        let n = (0..self.coeffs.len())
            .rev()
            .find(|&i| self.coeffs[i].iter().any(|z| *z != CZERO))
            .unwrap_or(0);
        let m = (0..self.coeffs[0].len())
            .rev()
            .find(|&j| self.coeffs.iter().any(|r| r[j] != CZERO))
            .unwrap_or(0);
        let coeffs = self.coeffs[..=n].iter().map(|r| r[..=m].to_vec()).collect();
        BiPoly { deg: (n, m), coeffs }
    }

    pub fn d_z1(&self) -> Self {
        let t: Vec<_> = self
            .terms()
            .filter(|t| t.0 > 0)
            .map(|(i, j, a)| (i - 1, j, a * i as f64))
            .collect();
        Self::from_terms_exact(&t)
    }

    pub fn d_z2(&self) -> Self {
        let t: Vec<_> = self
            .terms()
            .filter(|t| t.1 > 0)
            .map(|(i, j, a)| (i, j - 1, a * j as f64))
            .collect();
        Self::from_terms_exact(&t)
    }

    fn from_terms_exact(terms: &[(usize, usize, Complex64)]) -> Self {
        let n = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let m = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut coeffs = vec![vec![CZERO; m + 1]; n + 1];
        for &(i, j, a) in terms {
            coeffs[i][j] += a;
        }
        BiPoly { deg: (n, m), coeffs }.trimmed_exact()
    }

    /// p ∘ π, a polynomial in the fiber variables, by exact expansion of
    /// (z₁ + z₂)^i (z₁z₂)^j.
    pub fn compose_pi(&self) -> Self {
        let mut t = Vec::new();
        for (i, j, a) in self.terms() {
            for k in 0..=i {
                t.push((k + j, i - k + j, a * binomial(i, k)));
            }
        }
        Self::from_terms_exact(&t)
    }

    /// Coefficients (ascending in w) of w ↦ p(π(u, w)).
    pub fn fiber_slice(&self, u: Complex64) -> Vec<Complex64> {
        let (n, m) = self.deg;
        let top = n + m;
        let upow: Vec<Complex64> = std::iter::successors(Some(Complex64::new(1.0, 0.0)), |z| Some(z * u))
            .take(top + 1)
            .collect();
        let mut out = vec![CZERO; top + 1];
        for (i, j, a) in self.terms() {
            for k in 0..=i {
                out[k + j] += a * binomial(i, k) * upow[i - k + j];
            }
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, a) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a.im == 0.0 {
                write!(f, "{}", a.re)?;
            } else {
                write!(f, "({a})")?;
            }
            match i {
                0 => {}
                1 => write!(f, "*z1")?,
                _ => write!(f, "*z1^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "*z2")?,
                _ => write!(f, "*z2^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Horner evaluation at (s, p) = (z₁, z₂).
pub fn eval_scalar(p: &BiPoly, pt: Point2) -> Complex64 {
    p.coeffs
        .iter()
        .rev()
        .fold(CZERO, |acc, row| acc * pt.s + poly1::eval(row, pt.p))
}

/// Σ a_ij S^i P^j. The pair type guarantees commutation, so this cannot
/// fail; [`eval_commuting`] is the checked entry point for raw matrices.
pub fn eval_pair(p: &BiPoly, pair: &CommutingPair) -> CMatrix {
    eval_unchecked(p, pair.s(), pair.p())
}

/// [`eval_pair`] on raw matrices, rejecting pairs with
/// ‖SP − PS‖ > ctol·(1 + ‖S‖‖P‖).
pub fn eval_commuting(p: &BiPoly, s: &CMatrix, pm: &CMatrix, ctol: f64) -> Result<CMatrix> {
    let pair = CommutingPair::with_tolerance(s.clone(), pm.clone(), ctol)?;
    Ok(eval_pair(p, &pair))
}

/// Polynomial calculus without a commutation check. Horner in S over
/// precomputed powers of P.
pub(crate) fn eval_unchecked(p: &BiPoly, s: &CMatrix, pm: &CMatrix) -> CMatrix {
    let d = s.nrows();
    let (n, m) = p.deg;
    let mut ppow = Vec::with_capacity(m + 1);
    ppow.push(identity(d));
    for j in 1..=m {
        let next = &ppow[j - 1] * pm;
        ppow.push(next);
    }
    let row_value = |i: usize| {
        let mut acc = zeros(d, d);
        for (j, a) in p.coeffs[i].iter().enumerate() {
            if *a != CZERO {
                acc += &ppow[j] * *a;
            }
        }
        acc
    };
    let mut out = row_value(n);
    for i in (0..n).rev() {
        out = s * out + row_value(i);
    }
    out
}

/// Σ |a_ij| ‖S‖^i ‖P‖^j, an a-priori bound on ‖p(S, P)‖.
pub fn pair_scale(p: &BiPoly, pair: &CommutingPair) -> f64 {
    let ns = op_norm(pair.s());
    let np = op_norm(pair.p());
    p.terms()
        .map(|(i, j, a)| a.norm() * ns.powi(i as i32) * np.powi(j as i32))
        .sum::<f64>()
        .max(f64::MIN_POSITIVE)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PencilOrder {
    /// det(A* + z₂A − z₁I)
    AdjFirst,
    /// det(A + z₂A* − z₁I)
    AFirst,
}

/// Interpolates det(M₀ + z₂M₁ − z₁I) on a (k+1)×(k+1) grid of roots of
/// unity. The Vandermonde systems on these nodes are discrete Fourier
/// transforms, solved here in closed form.
pub fn det_pencil(a: &CMatrix, order: PencilOrder) -> BiPoly {
    let k = a.nrows();
    let (m0, m1) = match order {
        PencilOrder::AFirst => (a.clone(), a.adjoint()),
        PencilOrder::AdjFirst => (a.adjoint(), a.clone()),
    };
    let nodes: Vec<Complex64> = (0..=k)
        .map(|t| Complex64::from_polar(1.0, 2.0 * PI * t as f64 / (k + 1) as f64))
        .collect();
    let eye = identity(k);
    let values: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|&x| {
            nodes
                .iter()
                .map(|&y| (&m0 + &m1 * y - &eye * x).determinant())
                .collect()
        })
        .collect();
    let size = (k + 1) as f64;
    let mut coeffs = vec![vec![CZERO; k + 1]; k + 1];
    for (i, row) in coeffs.iter_mut().enumerate() {
        for (j, cij) in row.iter_mut().enumerate() {
            let mut acc = CZERO;
            for (ta, va) in values.iter().enumerate() {
                for (tb, v) in va.iter().enumerate() {
                    acc += v * nodes[(ta * i) % (k + 1)].conj() * nodes[(tb * j) % (k + 1)].conj();
                }
            }
            *cij = acc / (size * size);
        }
    }
    BiPoly {
        deg: (k, k),
        coeffs,
    }
    .trimmed()
}

/// Tests ᾱ·conj(a_ij) = a_(n−i)(m−j) for a unimodular α on the declared
/// bidegree. α comes from the largest coefficient; deviations are relative
/// to the largest coefficient modulus.
pub fn inner_toral_symmetry_check(p: &BiPoly, tol: f64) -> Certificate {
    let mut cert = Certificate::new();
    let (n, m) = p.deg;
    let scale = p.max_abs();
    if scale == 0.0 {
        cert.fail("zero polynomial");
        return cert;
    }
    let (bi, bj) = p
        .terms()
        .fold(((0, 0), 0.0), |(best, b), (i, j, a)| {
            if a.norm() > b * (1.0 + 1e-12) {
                ((i, j), a.norm())
            } else {
                (best, b)
            }
        })
        .0;
    let alpha_bar = p.coeff(n - bi, m - bj) / p.coeff(bi, bj).conj();
    cert.check("alpha_modulus_defect", (alpha_bar.norm() - 1.0).abs(), tol);
    let unit = if alpha_bar.norm() > 0.0 {
        alpha_bar / alpha_bar.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            let dev = (unit * p.coeff(i, j).conj() - p.coeff(n - i, m - j)).norm() / scale;
            worst = worst.max(dev);
        }
    }
    cert.check("worst_deviation", worst, tol);
    cert.witness("alpha", unit.conj());
    cert
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            samples: 512,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolyTag {
    GammaDistinguished,
    Distinguished,
    NeitherEvidence,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub point: Point2,
    pub class: PointClass,
    /// Distance of the offending fiber modulus from the admissible band.
    pub severity: f64,
}

/// Sampled evidence about Z(p); not a proof.
///
/// `gamma_distinguished`: an interior zero was found and no zero in
/// ∂Γ∖bΓ. `distinguished`: no zero outside G₂ ∪ bΓ ∪ π(𝔼²). `tag` reports
/// the strongest property supported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyVerdict {
    pub tag: PolyTag,
    pub gamma_distinguished: bool,
    pub distinguished: bool,
    pub samples_checked: usize,
    pub degenerate_slices: usize,
    pub boundary_violations: usize,
    pub exterior_violations: usize,
    pub worst_violation: Option<Violation>,
    pub worst_exterior_violation: Option<Violation>,
    pub interior_witness: Option<Point2>,
}

#[derive(Default)]
struct Scan {
    degenerate: bool,
    boundary: Vec<Violation>,
    exterior: Vec<Violation>,
    witness: Option<(f64, Point2)>,
}

fn worst(vs: impl Iterator<Item = Violation>) -> Option<Violation> {
    vs.fold(None, |best: Option<Violation>, v| match best {
        Some(b) if b.severity >= v.severity => Some(b),
        _ => Some(v),
    })
}

/// Solves the fiber slice at u and sorts its zeros into violations and
/// interior witnesses.
fn scan_slice(p: &BiPoly, u: Complex64, tol: f64) -> Scan {
    let slice = p.fiber_slice(u);
    let scale = p.l1_norm() * u.norm().max(1.0).powi((p.deg.0 + p.deg.1) as i32);
    let coeffs = poly1::trim(&slice, ZERO_THRESHOLD * scale);
    let mut scan = Scan::default();
    if coeffs.is_empty() {
        scan.degenerate = true;
        return scan;
    }
    for w in poly1::roots(&coeffs) {
        let point = symmetrize(u, w);
        let class = classify_point(point, tol);
        let (m1, m2) = (class.fiber.0.norm(), class.fiber.1.norm());
        match class.tag {
            PointTag::OtherBoundary => scan.boundary.push(Violation {
                point,
                class,
                severity: 1.0 - m1,
            }),
            PointTag::ExteriorGamma => scan.exterior.push(Violation {
                point,
                class,
                severity: m2 - 1.0,
            }),
            PointTag::ExteriorOther => scan.exterior.push(Violation {
                point,
                class,
                severity: (1.0 - m1).min(m2 - 1.0),
            }),
            PointTag::InteriorG2 => {
                let depth = 1.0 - m2;
                if scan.witness.is_none_or(|(d, _)| depth > d) {
                    scan.witness = Some((depth, point));
                }
            }
            PointTag::DistinguishedBoundary | PointTag::ExteriorSymmetrizedE2 => {}
        }
    }
    scan
}

/// Classifies Z(p) by scanning fiber slices: u on a uniform grid of the unit
/// circle (this covers ∂Γ = π(𝕋 × 𝔻̄) by symmetry of π), then seeded random u
/// in the open disc, which supply interior witnesses and mixed exterior
/// zeros.
pub fn classify_poly(p: &BiPoly, cfg: &SamplerConfig) -> Result<PolyVerdict> {
    if cfg.samples < 16 {
        return Err(Error::InvalidInput("classify_poly needs at least 16 samples".into()));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let total = cfg.samples;
    if p.is_zero() {
        return Err(Error::DegenerateSlices {
            degenerate: total,
            total,
        });
    }
    let circle: Vec<Scan> = (0..total)
        .into_par_iter()
        .map(|t| {
            let u = Complex64::from_polar(1.0, 2.0 * PI * t as f64 / total as f64);
            scan_slice(p, u, cfg.tol)
        })
        .collect();
    let degenerate = circle.iter().filter(|s| s.degenerate).count();
    if degenerate == total {
        return Err(Error::DegenerateSlices {
            degenerate,
            total,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut inner: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    inner.extend((0..total).map(|_| {
        let r = rng.random::<f64>().sqrt() * (1.0 - 1e-3);
        Complex64::from_polar(r, rng.random_range(-PI..PI))
    }));
    let disc: Vec<Scan> = inner.par_iter().map(|&u| scan_slice(p, u, cfg.tol)).collect();

    let scans = || circle.iter().chain(disc.iter());
    let boundary: Vec<Violation> = scans().flat_map(|s| s.boundary.iter().copied()).collect();
    let exterior: Vec<Violation> = scans().flat_map(|s| s.exterior.iter().copied()).collect();
    let witness = scans()
        .filter_map(|s| s.witness)
        .fold(None, |best: Option<(f64, Point2)>, w| match best {
            Some(b) if b.0 >= w.0 => Some(b),
            _ => Some(w),
        })
        .map(|w| w.1);

    let gamma_distinguished = witness.is_some() && boundary.is_empty();
    let distinguished = boundary.is_empty() && exterior.is_empty();
    let tag = if degenerate * 10 > total {
        PolyTag::Inconclusive
    } else if gamma_distinguished {
        PolyTag::GammaDistinguished
    } else if distinguished {
        PolyTag::Distinguished
    } else if !boundary.is_empty() {
        PolyTag::NeitherEvidence
    } else {
        // Exterior zeros only and no interior zero seen: the variety may
        // only graze G₂.
        PolyTag::Inconclusive
    };
    Ok(PolyVerdict {
        tag,
        gamma_distinguished,
        distinguished,
        samples_checked: total + inner.len(),
        degenerate_slices: degenerate,
        boundary_violations: boundary.len(),
        exterior_violations: exterior.len(),
        worst_violation: worst(boundary.into_iter()),
        worst_exterior_violation: worst(exterior.into_iter()),
        interior_witness: witness,
    })
}

const SLICE_NODES: [f64; 7] = [0.3137, -0.5821, 0.7413, -0.1279, 0.4621, -0.8817, 0.2093];
const SLICE_PHASES: [f64; 7] = [0.41, 1.37, -2.03, 2.71, -0.77, 0.19, -1.61];
const GCD_RANK_TOL: f64 = 1e-8;

/// Degree in the first variable of gcd(p, ∂₁p, ∂₂p), read off univariate
/// slices. `rows` selects the variable: true for z₁.
fn slice_gcd_degree(p: &BiPoly, along_z1: bool) -> Result<usize> {
    let (n, m) = p.deg;
    let d = if along_z1 { n } else { m };
    if d == 0 {
        return Ok(0);
    }
    let (p1, p2) = (p.d_z1(), p.d_z2());
    let mix = Complex64::new(0.618_033_988_7, 0.414_213_562_4);
    let slice = |q: &BiPoly, t: Complex64| -> Vec<Complex64> {
        let (qn, qm) = q.deg;
        if along_z1 {
            (0..=qn).map(|i| poly1::eval(&q.coeffs[i], t)).collect()
        } else {
            (0..=qm)
                .map(|j| {
                    let col: Vec<Complex64> = (0..=qn).map(|i| q.coeffs[i][j]).collect();
                    poly1::eval(&col, t)
                })
                .collect()
        }
    };
    let mut degrees = Vec::with_capacity(SLICE_NODES.len());
    for (&r, &ph) in SLICE_NODES.iter().zip(SLICE_PHASES.iter()) {
        let t = Complex64::from_polar(1.0 + r, ph);
        let f = slice(p, t);
        let g1 = slice(&p1, t);
        let g2 = slice(&p2, t);
        let len = g1.len().max(g2.len());
        let g: Vec<Complex64> = (0..len)
            .map(|k| g1.get(k).copied().unwrap_or(CZERO) + mix * g2.get(k).copied().unwrap_or(CZERO))
            .collect();
        let sc = poly1::max_abs(&f).max(poly1::max_abs(&g));
        let f = poly1::trim(&f, ZERO_THRESHOLD * sc);
        let g = poly1::trim(&g, ZERO_THRESHOLD * sc);
        degrees.push(poly1::gcd_degree(&f, &g, GCD_RANK_TOL));
    }
    let mut counts = std::collections::BTreeMap::new();
    for &dg in &degrees {
        *counts.entry(dg).or_insert(0usize) += 1;
    }
    let (&mode, &hits) = counts
        .iter()
        .max_by_key(|(dg, c)| (**c, std::cmp::Reverse(**dg)))
        .expect("seven slices");
    if degrees.len() - hits >= 3 {
        return Err(Error::NumericalGcdUnstable(format!(
            "slice gcd degrees {degrees:?} have no stable mode"
        )));
    }
    Ok(mode)
}

/// Column-major index of (i, j) in an (n+1)×(m+1) grid.
fn grid_index(i: usize, j: usize, m: usize) -> usize {
    i * (m + 1) + j
}

/// Writes the convolution matrix of `f`, acting on coefficient grids of
/// bidegree `unk`, into `out` at the given offsets and with the given sign.
fn conv_block(
    out: &mut CMatrix,
    f: &BiPoly,
    unk: (usize, usize),
    res_m: usize,
    col0: usize,
    row0: usize,
    sign: f64,
) {
    for (i, j, a) in f.terms() {
        for k in 0..=unk.0 {
            for l in 0..=unk.1 {
                let row = row0 + grid_index(i + k, j + l, res_m);
                let col = col0 + grid_index(k, l, unk.1);
                out[(row, col)] += a * sign;
            }
        }
    }
}

/// Square-free part p / gcd(p, ∂₁p, ∂₂p), scaled so its largest coefficient
/// is 1.
///
/// The gcd bidegree comes from univariate slices. The cofactor u then
/// spans the one-dimensional solution space of p·w₁ = ∂₁p·u and
/// p·w₂ = ∂₂p·u, with w₁ and w₂ of the matching bidegrees.
pub fn square_free(p: &BiPoly) -> Result<BiPoly> {
    let p = p.trimmed();
    if p.is_zero() {
        return Err(Error::InvalidPolynomial("square_free of the zero polynomial".into()));
    }
    let (n, m) = p.deg;
    if n + m == 0 {
        return Ok(p.normalized());
    }
    let a = slice_gcd_degree(&p, true)?;
    let b = slice_gcd_degree(&p, false)?;
    if a == 0 && b == 0 {
        return Ok(p.normalized());
    }
    let u_deg = (n - a, m - b);
    let p1 = p.d_z1();
    let p2 = p.d_z2();
    // Cofactor bidegrees. A derivative that vanishes identically gets a zero
    // cofactor of bidegree (0, 0).
    let w_deg = |q: &BiPoly| (q.deg.0.saturating_sub(a), q.deg.1.saturating_sub(b));
    let w1_deg = w_deg(&p1);
    let w2_deg = w_deg(&p2);
    let count = |d: (usize, usize)| (d.0 + 1) * (d.1 + 1);
    let (nu, nw1, nw2) = (count(u_deg), count(w1_deg), count(w2_deg));
    let res_n = n + u_deg.0.max(w1_deg.0).max(w2_deg.0);
    let res_m = m + u_deg.1.max(w1_deg.1).max(w2_deg.1);
    let block_rows = (res_n + 1) * (res_m + 1);
    let mut sys = zeros(2 * block_rows, nu + nw1 + nw2);
    conv_block(&mut sys, &p, w1_deg, res_m, nu, 0, 1.0);
    conv_block(&mut sys, &p1, u_deg, res_m, 0, 0, -1.0);
    conv_block(&mut sys, &p, w2_deg, res_m, nu + nw1, block_rows, 1.0);
    conv_block(&mut sys, &p2, u_deg, res_m, 0, block_rows, -1.0);
    let norm = op_norm(&sys);
    let kernel = null_basis(&sys, GCD_RANK_TOL * norm);
    if kernel.ncols() != 1 {
        return Err(Error::NumericalGcdUnstable(format!(
            "cofactor system has a {}-dimensional solution space",
            kernel.ncols()
        )));
    }
    let mut coeffs = vec![vec![CZERO; u_deg.1 + 1]; u_deg.0 + 1];
    for (i, row) in coeffs.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = kernel[(grid_index(i, j, u_deg.1), 0)];
        }
    }
    Ok(BiPoly { deg: u_deg, coeffs }.trimmed().normalized().trimmed())
}
