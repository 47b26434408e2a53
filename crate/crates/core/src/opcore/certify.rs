use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::geometry::{classify_point, Point2, PointTag};
use crate::json;
use crate::linalg::{normality_defect, op_norm, schur, unitarity_defect, CMatrix};
use crate::opcore::defect::fundamental_operator;
use crate::opcore::pair::{CommutingPair, PairRole};
use crate::opcore::radius::{spectral_radius, DEFAULT_GRID, DEFAULT_REFINE};
use crate::subspace::SubspaceBasis;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub tol: f64,
    pub rank_tol: f64,
    pub grid: usize,
    pub refine_iters: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            tol: 1e-9,
            rank_tol: 1e-8,
            grid: DEFAULT_GRID,
            refine_iters: DEFAULT_REFINE,
        }
    }
}

/// Checks ‖S‖ ≤ 2, ‖P‖ ≤ 1, solvability of the fundamental equation and
/// ω(A) ≤ 1, each up to `cfg.tol`.
pub fn certify_gamma_contraction(pair: &CommutingPair, cfg: &CertifyConfig) -> Certificate {
    let mut cert = Certificate::new();
    let ns = op_norm(pair.s());
    let np = op_norm(pair.p());
    cert.check("commutator", pair.commutator_norm(), cfg.tol * (1.0 + ns * np));
    cert.check("norm_S", ns, 2.0 + cfg.tol);
    cert.check("norm_P", np, 1.0 + cfg.tol);
    match fundamental_operator(pair, cfg.rank_tol) {
        Ok(sol) => {
            let omega = if cfg.grid == DEFAULT_GRID && cfg.refine_iters == DEFAULT_REFINE {
                sol.omega
            } else {
                crate::opcore::numerical_radius(&sol.a, cfg.grid, cfg.refine_iters)
            };
            cert.check("fundamental_residual", sol.residual, cfg.tol);
            cert.check("omega_A", omega, 1.0 + cfg.tol);
            cert.note(format!(
                "defect rank {}, rank tolerance {:e}, omega grid {} + {} refinements",
                sol.frame.dim(),
                cfg.rank_tol,
                cfg.grid,
                cfg.refine_iters
            ));
        }
        Err(Error::RankDeficientInconsistent { entry, tol }) => {
            cert.check("defect_consistency", entry, tol);
        }
        Err(e) => cert.fail(e.to_string()),
    }
    cert
}

/// A common orthonormal eigenbasis of a commuting normal pair and the joint
/// eigenvalues, column by column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointSpectrum {
    #[serde(with = "json::matrix")]
    pub basis: CMatrix,
    pub points: Vec<Point2>,
    /// Largest off-diagonal entry of U*SU and U*PU.
    pub residual: f64,
}

const JOINT_RETRIES: usize = 5;
const JOINT_RESIDUAL: f64 = 1e-8;

/// Diagonalizes S + μP for random μ. For a commuting normal pair its Schur
/// vectors diagonalize S and P unless μ makes distinct joint eigenvalues
/// collide, which is detected and retried.
pub fn joint_eigen(pair: &CommutingPair, seed: u64) -> Result<JointSpectrum> {
    let (s, p) = (pair.s(), pair.p());
    let n = pair.dim();
    if n == 0 {
        return Err(Error::EmptySpectrum);
    }
    let scale = pair.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..JOINT_RETRIES {
        let mu = Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(-3.1..3.1));
        let sch = schur(&(s + p * mu));
        let q = sch.q;
        let ds = q.adjoint() * s * &q;
        let dp = q.adjoint() * p * &q;
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(ds[(i, j)].norm()).max(dp[(i, j)].norm());
                }
            }
        }
        if off <= JOINT_RESIDUAL * scale {
            let points = (0..n).map(|i| Point2::new(ds[(i, i)], dp[(i, i)])).collect();
            return Ok(JointSpectrum {
                basis: q,
                points,
                residual: off,
            });
        }
    }
    Err(Error::JointDiagonalizationFailed {
        attempts: JOINT_RETRIES,
    })
}

/// Normality, commutation and joint spectrum in bΓ. A non-normal pair fails
/// without attempting diagonalization.
pub fn certify_gamma_unitary(pair: &CommutingPair, tol: f64) -> Result<Certificate> {
    let mut cert = Certificate::new();
    let scale = pair.scale();
    let sq = scale * scale;
    let ok_s = cert.check("normality_S", normality_defect(pair.s()), tol * sq);
    let ok_p = cert.check("normality_P", normality_defect(pair.p()), tol * sq);
    cert.check("commutator", pair.commutator_norm(), tol * (1.0 + sq));
    if !(ok_s && ok_p) {
        cert.note("joint diagonalization skipped for non-normal input");
        return Ok(cert);
    }
    let spec = joint_eigen(pair, 0x5eed)?;
    cert.check("joint_diagonalization_residual", spec.residual, JOINT_RESIDUAL * scale);
    let mut outside = 0usize;
    for (i, pt) in spec.points.iter().enumerate() {
        let class = classify_point(*pt, tol);
        if class.tag != PointTag::DistinguishedBoundary {
            outside += 1;
            if outside <= 4 {
                cert.witness(format!("point{i}.s"), pt.s);
                cert.witness(format!("point{i}.p"), pt.p);
                cert.note(format!("joint eigenvalue #{i} classified {:?}", class.tag));
            }
        }
    }
    cert.check("points_off_distinguished_boundary", outside as f64, 0.0);
    Ok(cert)
}

/// r(P) < 1 − tol, which is purity in finite dimension.
pub fn is_pure(p: &CMatrix, tol: f64) -> bool {
    spectral_radius(p) < 1.0 - tol
}

/// Eigenvalues with ||λ| − 1| ≤ UNIT_BAND count as unimodular.
const UNIT_BAND: f64 = 1e-8;

/// Orthogonal splitting of a Γ-contraction into a part with P pure and a
/// part with P unitary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureUnitarySplit {
    pub pure: CommutingPair,
    pub unitary: CommutingPair,
    pub pure_frame: SubspaceBasis,
    pub unitary_frame: SubspaceBasis,
    /// ‖S − (S₁ ⊕ S₂)‖ + ‖P − (P₁ ⊕ P₂)‖ in the original coordinates.
    pub reconstruction_error: f64,
}

/// Splits σ(P) into its disc and circle parts by an ordered Schur form and
/// checks that both S and P are block diagonal in that frame. Assumes (S, P)
/// is a Γ-contraction; for other pairs the coupling check usually fails.
pub fn split_pure_unitary(pair: &CommutingPair, tol: f64) -> Result<PureUnitarySplit> {
    let (s, p) = (pair.s(), pair.p());
    let n = pair.dim();
    let mut sch = schur(p);
    for z in sch.eigenvalues() {
        let m = z.norm();
        if m >= 1.0 - tol && m < 1.0 - UNIT_BAND {
            return Err(Error::SpectralGapTooSmall { modulus: m });
        }
    }
    let k = sch.reorder(|z| z.norm() < 1.0 - UNIT_BAND);
    let q = &sch.q;
    let q1 = q.columns(0, k).into_owned();
    let q2 = q.columns(k, n - k).into_owned();
    let scale = pair.scale();
    for (name, m) in [("S", s), ("P", p)] {
        for (label, a, b) in [("12", &q1, &q2), ("21", &q2, &q1)] {
            let block = a.adjoint() * m * b;
            let norm = op_norm(&block);
            if norm > tol.max(1e-12) * scale {
                return Err(Error::OffDiagonalCoupling {
                    block: format!("{name}{label}"),
                    norm,
                });
            }
        }
    }
    let part = |f: &CMatrix, role: PairRole| -> Result<CommutingPair> {
        Ok(CommutingPair::with_tolerance(f.adjoint() * s * f, f.adjoint() * p * f, f64::INFINITY)?.with_role(role))
    };
    let pure = part(&q1, PairRole::GammaContraction)?;
    let unitary = part(&q2, PairRole::GammaUnitary)?;
    let rebuild = |a: &CMatrix, b: &CMatrix| &q1 * a * q1.adjoint() + &q2 * b * q2.adjoint();
    let reconstruction_error = op_norm(&(rebuild(pure.s(), unitary.s()) - s))
        + op_norm(&(rebuild(pure.p(), unitary.p()) - p));
    Ok(PureUnitarySplit {
        pure,
        unitary,
        pure_frame: SubspaceBasis::trusted(q1, "pure part"),
        unitary_frame: SubspaceBasis::trusted(q2, "unitary part"),
        reconstruction_error,
    })
}

/// (U*SU, U*PU) for U unitary within 1e−10.
pub fn unitary_conjugate(pair: &CommutingPair, u: &CMatrix) -> Result<CommutingPair> {
    if !u.is_square() || u.nrows() != pair.dim() {
        return Err(Error::DimensionMismatch(format!(
            "unitary is {}x{}, pair acts on dimension {}",
            u.nrows(),
            u.ncols(),
            pair.dim()
        )));
    }
    let defect = unitarity_defect(u);
    if defect > 1e-10 {
        return Err(Error::NotUnitary { defect });
    }
    let us = u.adjoint() * pair.s() * u;
    let up = u.adjoint() * pair.p() * u;
    Ok(CommutingPair::with_tolerance(us, up, f64::INFINITY)?.with_role(pair.role()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Verdict;
    use crate::linalg::{block_diag, c, cr, diag, from_real_rows, identity, zeros};
    use crate::opcore::numerical_radius;

    fn shift(d: usize) -> CMatrix {
        let mut w = zeros(d, d);
        for i in 1..d {
            w[(i, i - 1)] = cr(1.0);
        }
        w
    }

    #[test]
    fn contraction_examples() {
        let cfg = CertifyConfig::default();
        let a = from_real_rows(3, 3, &[0., 2., 0., 0., 0., 0., 0., 0., 1.]);
        let pair = CommutingPair::new(a, zeros(3, 3)).unwrap();
        assert!(certify_gamma_contraction(&pair, &cfg).passed());

        let big = CommutingPair::new(identity(2).scale(3.0), zeros(2, 2)).unwrap();
        let cert = certify_gamma_contraction(&big, &cfg);
        assert_eq!(cert.verdict, Verdict::Fail);
        assert!(!cert.get("norm_S").unwrap().passed);

        let r = 0.5;
        let w = shift(5);
        let pair = CommutingPair::new(w.scale(2.0 * r), (&w * &w).scale(r * r)).unwrap();
        let cert = certify_gamma_contraction(&pair, &cfg);
        assert!(cert.passed(), "{cert:?}");
        // Oracle from the fundamental solve itself, with a much finer grid.
        let sol = fundamental_operator(&pair, 1e-8).unwrap();
        assert!(numerical_radius(&sol.a, 4096, 60) <= 1.0 + 1e-9);
    }

    #[test]
    fn unitary_examples() {
        let u1 = diag(&[Complex64::from_polar(1.0, 0.4), Complex64::from_polar(1.0, -2.0), cr(1.0)]);
        let u2 = diag(&[Complex64::from_polar(1.0, 1.1), Complex64::from_polar(1.0, 0.3), cr(-1.0)]);
        let pair = CommutingPair::new(&u1 + &u2, &u1 * &u2).unwrap();
        assert!(certify_gamma_unitary(&pair, 1e-9).unwrap().passed());

        let pair = CommutingPair::new(identity(2).scale(2.0), identity(2)).unwrap();
        assert!(certify_gamma_unitary(&pair, 1e-9).unwrap().passed());

        let pair = CommutingPair::new(zeros(2, 2), identity(2).scale(0.5)).unwrap();
        let cert = certify_gamma_unitary(&pair, 1e-9).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);

        let pair = CommutingPair::new(shift(3), zeros(3, 3)).unwrap();
        assert_eq!(certify_gamma_unitary(&pair, 1e-9).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn repeated_joint_eigenvalues() {
        let pair = CommutingPair::new(identity(4).scale(2.0), identity(4)).unwrap();
        let spec = joint_eigen(&pair, 1).unwrap();
        assert!(spec.points.iter().all(|p| (p.s - cr(2.0)).norm() < 1e-14));
    }

    #[test]
    fn purity_examples() {
        assert!(is_pure(&identity(3).scale(0.25), 1e-9));
        assert!(!is_pure(&diag(&[c(0.0, 1.0), cr(1.0)]), 1e-9));
        assert!(is_pure(&shift(4), 1e-9));
    }

    #[test]
    fn split_examples() {
        let phi: f64 = 1.3;
        let e = Complex64::from_polar(1.0, phi);
        let s = diag(&[cr(0.5), Complex64::from_polar(2.0 * (phi / 2.0).cos(), phi / 2.0)]);
        let p = diag(&[cr(0.5), e]);
        let pair = CommutingPair::new(s, p).unwrap();
        let split = split_pure_unitary(&pair, 1e-6).unwrap();
        assert_eq!((split.pure.dim(), split.unitary.dim()), (1, 1));
        assert!(split.reconstruction_error < 1e-9);
        assert!((split.unitary.p()[(0, 0)] - e).norm() < 1e-12);

        let pair = CommutingPair::new(identity(2).scale(2.0), identity(2)).unwrap();
        let split = split_pure_unitary(&pair, 1e-6).unwrap();
        assert_eq!((split.pure.dim(), split.unitary.dim()), (0, 2));

        let pair = CommutingPair::new(identity(2).scale(1.0), identity(2).scale(0.25)).unwrap();
        let split = split_pure_unitary(&pair, 1e-6).unwrap();
        assert_eq!((split.pure.dim(), split.unitary.dim()), (2, 0));

        let pair = CommutingPair::new(zeros(1, 1), identity(1).scale(1.0 - 1e-7)).unwrap();
        assert!(matches!(
            split_pure_unitary(&pair, 1e-6),
            Err(Error::SpectralGapTooSmall { .. })
        ));
    }

    #[test]
    fn split_of_conjugated_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = crate::random::haar_unitary(4, &mut rng);
        let pure = CommutingPair::new(identity(2).scale(1.0), identity(2).scale(0.25)).unwrap();
        let e = Complex64::from_polar(1.0, 0.7);
        let uni = diag(&[e + cr(1.0), e - cr(1.0)]);
        let unip = diag(&[e, -e]);
        let s = block_diag(pure.s(), &uni);
        let p = block_diag(pure.p(), &unip);
        let pair = CommutingPair::new(&u * s * u.adjoint(), &u * p * u.adjoint()).unwrap();
        let split = split_pure_unitary(&pair, 1e-6).unwrap();
        assert_eq!((split.pure.dim(), split.unitary.dim()), (2, 2));
        assert!(split.reconstruction_error < 1e-9);
        assert!(certify_gamma_unitary(&split.unitary, 1e-9).unwrap().passed());
    }

    #[test]
    fn conjugation() {
        let pair = CommutingPair::new(identity(2).scale(0.3), identity(2).scale(0.1)).unwrap();
        assert_eq!(unitary_conjugate(&pair, &identity(2)).unwrap(), pair);
        assert!(matches!(
            unitary_conjugate(&pair, &identity(2).scale(1.1)),
            Err(Error::NotUnitary { .. })
        ));
    }
}
