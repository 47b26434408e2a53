//! Orthogonal decomposition of Γ-unitaries along a factorization of an
//! annihilator, and its band-truncated analogue on Toeplitz models.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipoly::{classify_poly, eval_pair, eval_unchecked, pair_scale, BiPoly, SamplerConfig};
use crate::certificate::Certificate;
use crate::dilation::{verify_annihilation_banded, ToeplitzModel};
use crate::error::{Error, Result};
use crate::geometry::{classify_point, fiber, Point2, PointTag};
use crate::linalg::{diag, hcat, identity, null_basis, op_norm, range_basis, singular_values, vcat, zeros, CMatrix};
use crate::opcore::{certify_gamma_unitary, joint_eigen, CommutingPair, PairRole};
use crate::random::haar_unitary;
use crate::subspace::SubspaceBasis;

/// Parts closer to orthogonal than this are accepted.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Bound on ‖I − Σ FⱼFⱼ*‖ and on each part's annihilation residual.
pub const COMPLETENESS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompConfig {
    pub tol: f64,
    /// Relative to the largest singular value of the matrix whose range or
    /// kernel is taken.
    pub rank_tol: f64,
    pub sampler: SamplerConfig,
}

impl Default for DecompConfig {
    fn default() -> Self {
        DecompConfig {
            tol: 1e-9,
            rank_tol: 1e-8,
            sampler: SamplerConfig::default(),
        }
    }
}

/// Normal commuting pair with the given joint spectrum (each point repeated
/// by its multiplicity) in a Haar-random basis.
pub fn random_gamma_unitary(spectrum: &[(Point2, usize)], seed: u64) -> Result<CommutingPair> {
    for (index, (pt, _)) in spectrum.iter().enumerate() {
        if classify_point(*pt, 1e-9).tag != PointTag::DistinguishedBoundary {
            return Err(Error::PointNotOnDistinguishedBoundary { index });
        }
    }
    let (mut s, mut p) = (Vec::new(), Vec::new());
    for &(pt, mult) in spectrum {
        s.extend(std::iter::repeat_n(pt.s, mult));
        p.extend(std::iter::repeat_n(pt.p, mult));
    }
    if s.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_unitary(s.len(), &mut rng);
    let conj = |d: &[Complex64]| &u * diag(d) * u.adjoint();
    Ok(CommutingPair::new(conj(&s), conj(&p))?.with_role(PairRole::GammaUnitary))
}

/// Commuting unitaries (U₁, U₂) with π(U₁, U₂) = (S, P), one fiber per joint
/// eigenvalue.
pub fn commuting_unitaries(pair: &CommutingPair) -> Result<(CMatrix, CMatrix)> {
    let spec = joint_eigen(pair, 0x5eed)?;
    let (z1, z2): (Vec<Complex64>, Vec<Complex64>) = spec.points.iter().map(|&pt| fiber(pt)).unzip();
    let q = &spec.basis;
    Ok((q * diag(&z1) * q.adjoint(), q * diag(&z2) * q.adjoint()))
}

/// ‖p(U)* − β U₁^{−n} U₂^{−m} p(U)‖ for unitaries U, where (n, m) is the
/// bidegree of p and β is read off the leading coefficient pair.
pub fn reflexivity_defect(p: &BiPoly, u1: &CMatrix, u2: &CMatrix) -> f64 {
    let (n, m) = p.degree();
    // β = conj(a_{n−i, m−j}) / a_ij at the largest coefficient.
    let (mut best, mut beta) = (0.0, Complex64::new(1.0, 0.0));
    for i in 0..=n {
        for j in 0..=m {
            let a = p.coeff(i, j);
            if a.norm() > best {
                best = a.norm();
                beta = p.coeff(n - i, m - j).conj() / a;
            }
        }
    }
    let pu = eval_unchecked(p, u1, u2);
    let shift = u1.adjoint().pow(n as u32) * u2.adjoint().pow(m as u32);
    op_norm(&(pu.adjoint() - shift * &pu * beta))
}

fn precondition(msg: impl Into<String>) -> Error {
    Error::AnnihilationPreconditionFailed(msg.into())
}

fn require_gamma_unitary(pair: &CommutingPair, tol: f64) -> Result<()> {
    let cert = certify_gamma_unitary(pair, tol)?;
    if cert.passed() {
        Ok(())
    } else {
        Err(precondition("pair is not a certified Γ-unitary"))
    }
}

fn relative_residual(q: &BiPoly, pair: &CommutingPair) -> f64 {
    op_norm(&eval_pair(q, pair)) / pair_scale(q, pair).max(1.0)
}

/// ‖q₁(Σ)*q₂(Σ)‖ for a Γ-unitary annihilated by q₁q₂. Unless
/// `assume_distinguished`, both factors are first classified by sampling.
pub fn check_range_orthogonality(
    pair: &CommutingPair,
    q1: &BiPoly,
    q2: &BiPoly,
    assume_distinguished: bool,
    cfg: &DecompConfig,
) -> Result<Certificate> {
    require_gamma_unitary(pair, cfg.tol)?;
    let residual = relative_residual(&q1.mul(q2), pair);
    if residual > COMPLETENESS_TOL {
        return Err(precondition(format!("q1·q2 leaves residual {residual:.3e}")));
    }
    let mut cert = Certificate::new();
    if assume_distinguished {
        cert.note("factors asserted distinguished by the caller");
    } else {
        for (name, q) in [("q1", q1), ("q2", q2)] {
            let v = classify_poly(q, &cfg.sampler)?;
            if !v.distinguished {
                return Err(precondition(format!("{name} = {q} is not distinguished ({:?})", v.tag)));
            }
        }
        cert.note("both factors classified distinguished by boundary sampling");
    }
    let a = eval_pair(q1, pair);
    let b = eval_pair(q2, pair);
    let scale = (pair_scale(q1, pair) * pair_scale(q2, pair)).max(1.0);
    cert.check("annihilation_residual", residual, COMPLETENESS_TOL);
    cert.check("range_inner_product", op_norm(&(a.adjoint() * b)), ORTHOGONALITY_TOL * scale);
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionPart {
    /// Position of the annihilating factor in the input list.
    pub factor: usize,
    pub subspace: SubspaceBasis,
    pub pair: CommutingPair,
    pub annihilator: BiPoly,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub parts: Vec<DecompositionPart>,
    /// ‖I − Σ FⱼFⱼ*‖ on the decomposed space.
    pub completeness_defect: f64,
    /// Largest ‖Fᵢ*Fⱼ‖ over distinct parts.
    pub orthogonality_defect: f64,
    /// ‖S − Σ FⱼSⱼFⱼ*‖ + ‖P − Σ FⱼPⱼFⱼ*‖; only meaningful when parts reduce.
    pub reconstruction_error: f64,
    /// Set when the parts were only verified on a probed band of a
    /// truncated model.
    pub band_truncated: bool,
}

impl DecompositionResult {
    fn orthogonality(parts: &[DecompositionPart]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let g = parts[i].subspace.frame.adjoint() * &parts[j].subspace.frame;
                worst = worst.max(op_norm(&g));
            }
        }
        worst
    }
}

/// Values below this multiple of the a-priori size of q(Σ) are rounding
/// noise, so a factor vanishing on the whole space has an empty range.
const NOISE_FLOOR: f64 = 1e-12;

fn range(m: &CMatrix, rank_tol: f64, floor: f64) -> CMatrix {
    let top = singular_values(m).first().copied().unwrap_or(0.0);
    range_basis(m, (rank_tol * top).max(floor))
}

fn joint_kernel(a: &CMatrix, b: &CMatrix, rank_tol: f64, floor: f64) -> CMatrix {
    let stacked = vcat(&[a, b], a.ncols());
    let top = singular_values(&stacked).first().copied().unwrap_or(0.0);
    null_basis(&stacked, (rank_tol * top).max(floor))
}

fn restrict(pair: &CommutingPair, frame: &CMatrix) -> CommutingPair {
    let c = |m: &CMatrix| frame.adjoint() * m * frame;
    CommutingPair::with_tolerance(c(pair.s()), c(pair.p()), f64::INFINITY).expect("square compressions")
}

/// Splits a Γ-unitary annihilated by q₁⋯q_N into orthogonal reducing
/// subspaces 𝒦ⱼ, each annihilated by qⱼ. Step: 𝒦₂ = ran q₁(Σ), and 𝒦₁ =
/// ran q₂⋯q_N(Σ) ⊕ (ker q₁(Σ) ∩ ker q₂⋯q_N(Σ)); then recurse on 𝒦₂.
pub fn decompose_gamma_unitary(pair: &CommutingPair, factors: &[BiPoly], cfg: &DecompConfig) -> Result<DecompositionResult> {
    if factors.is_empty() {
        return Err(Error::InvalidInput("at least one factor is required".into()));
    }
    require_gamma_unitary(pair, cfg.tol)?;
    let total = relative_residual(&BiPoly::product(factors), pair);
    if total > COMPLETENESS_TOL {
        return Err(precondition(format!("product of factors leaves residual {total:.3e}")));
    }
    let d = pair.dim();
    let mut frames: Vec<(usize, CMatrix)> = Vec::new();
    let mut current = identity(d);
    for (j, q) in factors.iter().enumerate() {
        if current.ncols() == 0 {
            break;
        }
        if j + 1 == factors.len() {
            frames.push((j, current.clone()));
            break;
        }
        let local = restrict(pair, &current);
        let rest = BiPoly::product(&factors[j + 1..]);
        let q1 = eval_pair(q, &local);
        let q2 = eval_pair(&rest, &local);
        let f1 = NOISE_FLOOR * pair_scale(q, &local);
        let f2 = NOISE_FLOOR * pair_scale(&rest, &local);
        let l1 = range(&q2, cfg.rank_tol, f2);
        let lprime = joint_kernel(&q1, &q2, cfg.rank_tol, f1.max(f2));
        let k2 = range(&q1, cfg.rank_tol, f1);
        let k1 = hcat(&[&l1, &lprime], current.ncols());
        frames.push((j, &current * k1));
        current = &current * k2;
    }

    let parts: Vec<DecompositionPart> = frames
        .into_par_iter()
        .filter(|(_, f)| f.ncols() > 0)
        .map(|(j, frame)| {
            let local = restrict(pair, &frame);
            let residual = relative_residual(&factors[j], &local);
            DecompositionPart {
                factor: j,
                subspace: SubspaceBasis::trusted(frame, format!("K{}", j + 1)),
                pair: local.with_role(PairRole::GammaUnitary),
                annihilator: factors[j].clone(),
                residual,
            }
        })
        .collect();
    for (i, part) in parts.iter().enumerate() {
        if part.residual > COMPLETENESS_TOL {
            return Err(Error::ResidualTooLarge {
                part: i,
                residual: part.residual,
            });
        }
        if !certify_gamma_unitary(&part.pair, cfg.tol)?.passed() {
            return Err(Error::IncompleteDecomposition(format!("part {i} is not a Γ-unitary")));
        }
    }
    let orthogonality_defect = DecompositionResult::orthogonality(&parts);
    if orthogonality_defect > ORTHOGONALITY_TOL {
        return Err(Error::IncompleteDecomposition(format!("parts overlap: {orthogonality_defect:.3e}")));
    }
    let mut cover = identity(d);
    let (mut s, mut p) = (zeros(d, d), zeros(d, d));
    for part in &parts {
        let f = &part.subspace.frame;
        cover -= f * f.adjoint();
        s += f * part.pair.s() * f.adjoint();
        p += f * part.pair.p() * f.adjoint();
    }
    let completeness_defect = op_norm(&cover);
    if completeness_defect > COMPLETENESS_TOL {
        return Err(Error::IncompleteDecomposition(format!(
            "parts miss part of the space: {completeness_defect:.3e}"
        )));
    }
    Ok(DecompositionResult {
        parts,
        completeness_defect,
        orthogonality_defect,
        reconstruction_error: op_norm(&(pair.s() - s)) + op_norm(&(pair.p() - p)),
        band_truncated: false,
    })
}

/// ℋⱼ = ran rⱼ(Σ) on the probed band, rⱼ = q/qⱼ, for the truncated model.
/// Orthogonality and qⱼ-annihilation are checked on that band only. The
/// completeness defect is the part of the probed band outside ⊕ℋⱼ and is
/// reported, not enforced.
pub fn decompose_pure_isometry_banded(
    tm: &ToeplitzModel,
    factors: &[BiPoly],
    probe_degree: usize,
    cfg: &DecompConfig,
) -> Result<DecompositionResult> {
    if factors.is_empty() {
        return Err(Error::InvalidInput("at least one factor is required".into()));
    }
    let q = BiPoly::product(factors);
    let cert = verify_annihilation_banded(tm, &q, probe_degree)?;
    if !cert.passed() {
        return Err(precondition(format!(
            "product of factors leaves {:.3e} on the probed band",
            cert.worst("probed_image")
        )));
    }
    let model = tm.pair();
    let size = model.dim();
    let width = (probe_degree + 1) * tm.block_size();
    let probe = identity(size).columns(0, width).into_owned();

    let parts: Vec<DecompositionPart> = (0..factors.len())
        .into_par_iter()
        .map(|j| {
            let others: Vec<BiPoly> = factors
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, f)| f.clone())
                .collect();
            let r = BiPoly::product(&others);
            let floor = NOISE_FLOOR * pair_scale(&r, &model);
            let frame = range(&(eval_pair(&r, &model) * &probe), cfg.rank_tol, floor);
            let image = eval_pair(&factors[j], &model) * &frame;
            let residual = op_norm(&image) / pair_scale(&factors[j], &model).max(1.0);
            DecompositionPart {
                factor: j,
                pair: restrict(&model, &frame).with_role(PairRole::PureGammaIsometryModel),
                subspace: SubspaceBasis::trusted(frame, format!("H{}", j + 1)),
                annihilator: factors[j].clone(),
                residual,
            }
        })
        .filter(|p| p.subspace.dim() > 0)
        .collect();
    for (i, part) in parts.iter().enumerate() {
        if part.residual > COMPLETENESS_TOL {
            return Err(Error::ResidualTooLarge {
                part: i,
                residual: part.residual,
            });
        }
    }
    let orthogonality_defect = DecompositionResult::orthogonality(&parts);
    if orthogonality_defect > ORTHOGONALITY_TOL {
        return Err(Error::IncompleteDecomposition(format!("parts overlap: {orthogonality_defect:.3e}")));
    }
    let mut span = zeros(size, size);
    for part in &parts {
        span += part.subspace.projector();
    }
    let completeness_defect = op_norm(&(&probe - span * &probe));
    Ok(DecompositionResult {
        parts,
        completeness_defect,
        orthogonality_defect,
        reconstruction_error: f64::NAN,
        band_truncated: true,
    })
}
