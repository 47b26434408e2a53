//! The minimal Γ-isometric dilation through its truncations (T_n, V_n), the
//! Toeplitz models (T_φ, T_z), and annihilators of the (D, E) model.
//!
//! Defect blocks are written in the coordinates of the defect frame F, so
//! D_P appears as the k × d matrix F*D_P.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipoly::{classify_poly, det_pencil, eval_pair, eval_unchecked, pair_scale, square_free, BiPoly, PencilOrder, SamplerConfig};
use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{eigenvalues, identity, max_abs, normality_defect, op_norm, zeros, CMatrix, CVector};
use crate::opcore::{certify_gamma_contraction, defect, fundamental_operator, CertifyConfig, CommutingPair, PairRole};
use crate::PolyTag;

/// Eigenvalues closer than this are merged by [`normal_annihilator`].
pub const CLUSTER_GAP: f64 = 1e-7;
/// Tolerance for the closed form Y_n of the fundamental operator of (T_n, V_n).
pub const CLOSED_FORM_TOL: f64 = 1e-8;
/// Tolerance for D_{V_n} = diag(O_n, I).
pub const DEFECT_FORM_TOL: f64 = 1e-10;

/// Index ranges of the ℋ block followed by the defect blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMap {
    pub base_dim: usize,
    pub defect_dim: usize,
    /// `(offset, len)` per block; block 0 is ℋ.
    pub blocks: Vec<(usize, usize)>,
}

impl BlockMap {
    pub fn new(base_dim: usize, defect_dim: usize, n: usize) -> Self {
        let mut blocks = vec![(0, base_dim)];
        blocks.extend((0..n).map(|j| (base_dim + j * defect_dim, defect_dim)));
        BlockMap {
            base_dim,
            defect_dim,
            blocks,
        }
    }

    pub fn total(&self) -> usize {
        self.blocks.last().map_or(0, |&(o, l)| o + l)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedDilation {
    #[serde(rename = "T", with = "json::matrix")]
    pub t: CMatrix,
    #[serde(rename = "V", with = "json::matrix")]
    pub v: CMatrix,
    pub n: usize,
    pub base: CommutingPair,
    #[serde(rename = "A", with = "json::matrix")]
    pub a: CMatrix,
    pub frame_blocks: BlockMap,
    /// Distance between the computed fundamental operator of (T_n, V_n) and
    /// A placed in the last block.
    pub closed_form_deviation: f64,
    /// Distance between D_{V_n} and diag(O_n, I).
    pub defect_form_deviation: f64,
}

impl TruncatedDilation {
    pub fn pair(&self) -> CommutingPair {
        CommutingPair::with_tolerance(self.t.clone(), self.v.clone(), f64::INFINITY)
            .expect("validated at construction")
    }
}

fn set_block(m: &mut CMatrix, r: usize, c: usize, b: &CMatrix) {
    m.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
}

/// (Â_n, Î_n) on 𝒟^{⊕n}: A on the diagonal and A* below it, and the block
/// shift.
pub fn build_hat_pair(a: &CMatrix, n: usize) -> Result<CommutingPair> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidInput("truncation depth must be at least 1".into()));
    }
    let k = a.nrows();
    let mut ah = zeros(n * k, n * k);
    let mut ih = zeros(n * k, n * k);
    let adj = a.adjoint();
    let id = identity(k);
    for j in 0..n {
        set_block(&mut ah, j * k, j * k, a);
        if j + 1 < n {
            set_block(&mut ah, (j + 1) * k, j * k, &adj);
            set_block(&mut ih, (j + 1) * k, j * k, &id);
        }
    }
    CommutingPair::with_tolerance(ah, ih, f64::INFINITY)
}

/// A in the last of n blocks of size k, zero elsewhere; `offset` leading
/// zero rows and columns.
pub fn corner_form(a: &CMatrix, offset: usize, n: usize) -> CMatrix {
    let k = a.nrows();
    let mut m = zeros(offset + n * k, offset + n * k);
    if n > 0 {
        set_block(&mut m, offset + (n - 1) * k, offset + (n - 1) * k, a);
    }
    m
}

/// T_n and V_n from S, P, F*D_P and A.
fn assemble(s: &CMatrix, p: &CMatrix, dm: &CMatrix, a: &CMatrix, n: usize) -> (CMatrix, CMatrix) {
    let d = s.nrows();
    let k = a.nrows();
    let size = d + n * k;
    let mut t = zeros(size, size);
    let mut v = zeros(size, size);
    set_block(&mut t, 0, 0, s);
    set_block(&mut v, 0, 0, p);
    if k > 0 {
        set_block(&mut t, d, 0, &(a.adjoint() * dm));
        set_block(&mut v, d, 0, dm);
        let adj = a.adjoint();
        let id = identity(k);
        for j in 0..n {
            set_block(&mut t, d + j * k, d + j * k, a);
            if j + 1 < n {
                set_block(&mut t, d + (j + 1) * k, d + j * k, &adj);
                set_block(&mut v, d + (j + 1) * k, d + j * k, &id);
            }
        }
    }
    (t, v)
}

/// Builds (T_n, V_n) for a certified Γ-contraction and checks the closed
/// forms of its fundamental operator and of D_{V_n}.
pub fn build_truncated_dilation(pair: &CommutingPair, n: usize, cfg: &CertifyConfig) -> Result<TruncatedDilation> {
    if n == 0 {
        return Err(Error::InvalidInput("truncation depth must be at least 1".into()));
    }
    let cert = certify_gamma_contraction(pair, cfg);
    if !cert.passed() {
        let failed: Vec<&str> = cert.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(Error::NotGammaContraction(if failed.is_empty() {
            cert.notes.join("; ")
        } else {
            format!("failed checks: {}", failed.join(", "))
        }));
    }
    let sol = fundamental_operator(pair, cfg.rank_tol)?;
    let dd = defect(pair.p(), cfg.rank_tol)?;
    let dm = sol.frame.frame.adjoint() * &dd.d;
    let (d, k) = (pair.dim(), sol.a.nrows());
    let (t, v) = assemble(pair.s(), pair.p(), &dm, &sol.a, n);
    let big = CommutingPair::with_tolerance(t.clone(), v.clone(), cfg.tol.max(1e-9))?;

    let dv = defect(&v, cfg.rank_tol)?;
    let mut dv_form = zeros(d + n * k, d + n * k);
    if k > 0 {
        set_block(&mut dv_form, d + (n - 1) * k, d + (n - 1) * k, &identity(k));
    }
    let defect_form_deviation = max_abs(&(&dv.d - dv_form));
    if defect_form_deviation > DEFECT_FORM_TOL {
        return Err(Error::ClosedFormMismatch {
            what: "D_Vn".into(),
            deviation: defect_form_deviation,
        });
    }
    let y = fundamental_operator(&big, cfg.rank_tol)?;
    let closed_form_deviation = op_norm(&(y.lifted() - corner_form(&sol.a, d, n)));
    if closed_form_deviation > CLOSED_FORM_TOL * pair.scale() {
        return Err(Error::ClosedFormMismatch {
            what: "Y_n".into(),
            deviation: closed_form_deviation,
        });
    }
    Ok(TruncatedDilation {
        t,
        v,
        n,
        base: pair.clone(),
        a: sol.a,
        frame_blocks: BlockMap::new(d, k, n),
        closed_form_deviation,
        defect_form_deviation,
    })
}

/// Compares p(S, P) with the ℋ-corner of p(T_n, V_n).
pub fn verify_dilation_identity(td: &TruncatedDilation, p: &BiPoly) -> Certificate {
    let d = td.base.dim();
    let big = eval_unchecked(p, &td.t, &td.v);
    let corner = big.view((0, 0), (d, d)).into_owned();
    let small = eval_pair(p, &td.base);
    let scale = pair_scale(p, &td.base).max(1.0);
    let mut cert = Certificate::new();
    cert.check("compression_deviation", op_norm(&(corner - small)), 1e-9 * scale);
    cert.note(format!("truncation depth {}, total degree {}", td.n, p.total_degree()));
    cert
}

/// Truncated block-Toeplitz pair with symbol φ(z) = C₀ + C₁z on N + 1 blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzModel {
    #[serde(rename = "C0", with = "json::matrix")]
    pub c0: CMatrix,
    #[serde(rename = "C1", with = "json::matrix")]
    pub c1: CMatrix,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(with = "json::matrix")]
    pub t_phi: CMatrix,
    #[serde(with = "json::matrix")]
    pub t_z: CMatrix,
}

impl ToeplitzModel {
    pub fn block_size(&self) -> usize {
        self.c0.nrows()
    }

    pub fn pair(&self) -> CommutingPair {
        CommutingPair::with_tolerance(self.t_phi.clone(), self.t_z.clone(), f64::INFINITY)
            .expect("square blocks of equal size")
            .with_role(PairRole::PureGammaIsometryModel)
    }
}

pub fn build_toeplitz_model(c0: &CMatrix, c1: &CMatrix, n: usize) -> Result<ToeplitzModel> {
    if !c0.is_square() || c0.shape() != c1.shape() {
        return Err(Error::DimensionMismatch(format!(
            "symbol coefficients {:?} and {:?}",
            c0.shape(),
            c1.shape()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("model needs N ≥ 1".into()));
    }
    let k = c0.nrows();
    let size = (n + 1) * k;
    let mut t_phi = zeros(size, size);
    let mut t_z = zeros(size, size);
    let id = identity(k);
    for j in 0..=n {
        set_block(&mut t_phi, j * k, j * k, c0);
        if j < n {
            set_block(&mut t_phi, (j + 1) * k, j * k, c1);
            set_block(&mut t_z, (j + 1) * k, j * k, &id);
        }
    }
    Ok(ToeplitzModel {
        c0: c0.clone(),
        c1: c1.clone(),
        n,
        t_phi,
        t_z,
    })
}

/// The (D, E) model (T_{A + A*z}, T_z).
pub fn de_model(a: &CMatrix, n: usize) -> Result<ToeplitzModel> {
    build_toeplitz_model(a, &a.adjoint(), n)
}

/// p(T_φ, T_z) applied to every basis vector of polynomial degree ≤ probe.
pub fn verify_annihilation_banded(tm: &ToeplitzModel, p: &BiPoly, probe_degree: usize) -> Result<Certificate> {
    if probe_degree + p.total_degree() > tm.n {
        return Err(Error::BandUnsafe {
            probe_degree,
            poly_degree: p.total_degree(),
            truncation: tm.n,
        });
    }
    let k = tm.block_size();
    let image = eval_unchecked(p, &tm.t_phi, &tm.t_z);
    let worst = (0..(probe_degree + 1) * k)
        .into_par_iter()
        .map(|j| image.column(j).norm())
        .reduce(|| 0.0, f64::max);
    let scale = pair_scale(p, &tm.pair()).max(1.0);
    let mut cert = Certificate::new();
    cert.check("probed_image", worst, 1e-9 * scale);
    cert.note(format!(
        "{} probe vectors, degree ≤ {probe_degree}, N = {}",
        (probe_degree + 1) * k,
        tm.n
    ));
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub vector: usize,
    pub t_diff: f64,
    pub v_diff: f64,
}

/// ‖T_{n'}x − T_n x‖ and ‖V_{n'}x − V_n x‖ for n' = max(n_list). Vectors
/// live on ℋ ⊕ 𝒟^{⊕n'}.
pub fn convergence_probe(
    pair: &CommutingPair,
    n_list: &[usize],
    vectors: &[CVector],
    rank_tol: f64,
) -> Result<Vec<ProbeRow>> {
    let top = *n_list
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidInput("empty truncation list".into()))?;
    if n_list.contains(&0) {
        return Err(Error::InvalidInput("truncation depth must be at least 1".into()));
    }
    let sol = fundamental_operator(pair, rank_tol)?;
    let dd = defect(pair.p(), rank_tol)?;
    let dm = sol.frame.frame.adjoint() * &dd.d;
    let (d, k) = (pair.dim(), sol.a.nrows());
    let size = d + top * k;
    if let Some(x) = vectors.iter().find(|x| x.len() != size) {
        return Err(Error::DimensionMismatch(format!("probe vector of length {}, expected {size}", x.len())));
    }
    let (t_top, v_top) = assemble(pair.s(), pair.p(), &dm, &sol.a, top);
    let mut rows = Vec::new();
    for &n in n_list {
        let m = d + n * k;
        let (tn, vn) = assemble(pair.s(), pair.p(), &dm, &sol.a, n);
        for (i, x) in vectors.iter().enumerate() {
            let head = x.rows(0, m).into_owned();
            let mut tx = CVector::zeros(size);
            let mut vx = CVector::zeros(size);
            tx.rows_mut(0, m).copy_from(&(&tn * &head));
            vx.rows_mut(0, m).copy_from(&(&vn * &head));
            rows.push(ProbeRow {
                n,
                vector: i,
                t_diff: (&t_top * x - tx).norm(),
                v_diff: (&v_top * x - vx).norm(),
            });
        }
    }
    Ok(rows)
}

/// ∏ (λ + λ̄z₂ − z₁) over the distinct eigenvalues λ of a normal A with
/// r(A) < 1 − tol.
pub fn normal_annihilator(a: &CMatrix, tol: f64) -> Result<BiPoly> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let defect = normality_defect(a);
    if defect > tol {
        return Err(Error::NotNormal { defect });
    }
    let eigs = eigenvalues(a);
    let radius = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if radius >= 1.0 - tol {
        return Err(Error::SpectrumTouchesCircle { radius });
    }
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for z in eigs {
        match clusters.iter_mut().find(|c| c.iter().any(|w| (w - z).norm() <= CLUSTER_GAP)) {
            Some(c) => c.push(z),
            None => clusters.push(vec![z]),
        }
    }
    let factors: Vec<BiPoly> = clusters
        .iter()
        .map(|c| {
            let lam = c.iter().sum::<Complex64>() / c.len() as f64;
            BiPoly::line(lam, lam.conj())
        })
        .collect();
    Ok(BiPoly::product(&factors))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DilationConfig {
    pub certify: CertifyConfig,
    pub sampler: SamplerConfig,
}

/// Relative residual accepted for an annihilator of (S, P).
const ANNIHILATOR_TOL: f64 = 1e-7;

/// The minimal dilation is Γ-distinguished iff r(A) < 1. A spectral radius
/// at or above 1 − tol fails with the offending eigenvalue; otherwise the
/// verdict passes once an annihilator of (S, P), supplied or det(A + z₂A* −
/// z₁I), is confirmed Γ-distinguished, and is Inconclusive if not.
pub fn classify_minimal_dilation(pair: &CommutingPair, cfg: &DilationConfig, annihilator: Option<&BiPoly>) -> Certificate {
    let mut cert = Certificate::new();
    let tol = cfg.certify.tol;
    let base = certify_gamma_contraction(pair, &cfg.certify);
    cert.absorb("gamma_contraction", &base);
    if !base.passed() {
        cert.fail("input is not a certified Γ-contraction");
        return cert;
    }
    let sol = match fundamental_operator(pair, cfg.certify.rank_tol) {
        Ok(sol) => sol,
        Err(e) => {
            cert.fail(e.to_string());
            return cert;
        }
    };
    let eigs = eigenvalues(&sol.a);
    let top = eigs.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm()));
    let radius = top.map_or(0.0, |z| z.norm());
    if let Some(z) = top {
        cert.witness("eigenvalue_max_modulus", z);
    }
    cert.note(format!("r(A) = {radius:.12}, defect rank {}", sol.a.nrows()));
    if !cert.check("spectral_radius_A", radius, 1.0 - tol) {
        cert.note("σ(A) meets the unit circle, so the minimal dilation is not Γ-distinguished");
        return cert;
    }

    let derived;
    let q = match annihilator {
        Some(q) => q,
        None => {
            derived = det_pencil(&sol.a, PencilOrder::AFirst);
            &derived
        }
    };
    cert.note(format!("annihilator candidate: {q}"));
    let residual = op_norm(&eval_pair(q, pair)) / pair_scale(q, pair);
    let annihilates = q.total_degree() > 0 && cert.soft_check("annihilator_residual", residual, ANNIHILATOR_TOL);
    if annihilates {
        let reduced = square_free(q).unwrap_or_else(|_| q.clone());
        match classify_poly(&reduced, &cfg.sampler) {
            Ok(v) if v.tag == PolyTag::GammaDistinguished => {
                cert.note(format!("{} boundary samples, no zero in ∂Γ∖bΓ", v.samples_checked));
            }
            Ok(v) => cert.inconclusive(format!("annihilator classified {:?}", v.tag)),
            Err(e) => cert.inconclusive(format!("annihilator classification failed: {e}")),
        }
    } else if q.total_degree() == 0 {
        cert.inconclusive("no nonconstant annihilator available");
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr, diag, from_real_rows};
    use crate::random::{complex_gaussian, gamma_contraction};
    use crate::Verdict;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_family(d: usize, r: f64) -> CommutingPair {
        CommutingPair::new(identity(d).scale(2.0 * r), identity(d).scale(r * r)).unwrap()
    }

    #[test]
    fn hat_pair_scalar() {
        let a = c(0.3, 0.4);
        let pair = build_hat_pair(&diag(&[a]), 2).unwrap();
        let want_a = CMatrix::from_row_slice(2, 2, &[a, cr(0.0), a.conj(), a]);
        let want_i = from_real_rows(2, 2, &[0., 0., 1., 0.]);
        assert_eq!(pair.s(), &want_a);
        assert_eq!(pair.p(), &want_i);
        let one = build_hat_pair(&diag(&[a]), 1).unwrap();
        assert_eq!(one.p(), &zeros(1, 1));
        assert_eq!(pair.commutator_norm(), 0.0);
    }

    #[test]
    fn hat_pair_fundamental_is_corner() {
        let a = identity(2).scale(0.8);
        let pair = build_hat_pair(&a, 3).unwrap();
        let sol = fundamental_operator(&pair, 1e-8).unwrap();
        assert!(op_norm(&(sol.lifted() - corner_form(&a, 0, 3))) < 1e-10);
    }

    #[test]
    fn truncated_dilation_scalar_example() {
        let r: f64 = 0.5;
        let pair = CommutingPair::new(identity(1).scale(2.0 * r), identity(1).scale(r * r)).unwrap();
        let td = build_truncated_dilation(&pair, 2, &CertifyConfig::default()).unwrap();
        let want = from_real_rows(3, 3, &[0.25, 0., 0., (1.0 - r.powi(4)).sqrt(), 0., 0., 0., 1., 0.]);
        // The frame vector may carry a sign; compare moduli.
        assert!((td.v.map(|z| z.norm()) - want.map(|z| z.norm())).amax() < 1e-14);
        assert_eq!(td.frame_blocks.total(), 3);
    }

    #[test]
    fn truncated_dilation_unitary_p() {
        let pair = CommutingPair::new(identity(2).scale(2.0), identity(2)).unwrap();
        let td = build_truncated_dilation(&pair, 1, &CertifyConfig::default()).unwrap();
        assert_eq!(td.t.shape(), (2, 2));
        assert_eq!(td.v, identity(2));
    }

    #[test]
    fn truncated_dilation_random_is_gamma_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..8 {
            let pair = gamma_contraction(1 + seed % 3, &mut rng);
            let td = build_truncated_dilation(&pair, 1 + seed % 4, &CertifyConfig::default()).unwrap();
            assert!(certify_gamma_contraction(&td.pair(), &CertifyConfig::default()).passed());
            let z1z2 = BiPoly::z1().mul(&BiPoly::z2());
            assert!(verify_dilation_identity(&td, &z1z2.pow(2)).passed());
        }
    }

    #[test]
    fn dilation_identity_brute_force() {
        // Oracle: explicit matrix powers of T and V.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pair = gamma_contraction(2, &mut rng);
        let td = build_truncated_dilation(&pair, 3, &CertifyConfig::default()).unwrap();
        let big = td.t.pow(2) * &td.v;
        let small = pair.s().pow(2) * pair.p();
        assert!(op_norm(&(big.view((0, 0), (2, 2)).into_owned() - small)) < 1e-12);
    }

    #[test]
    fn toeplitz_structure() {
        let a = diag(&[cr(0.7)]);
        let tm = build_toeplitz_model(&a, &a, 2).unwrap();
        let want = from_real_rows(3, 3, &[0.7, 0., 0., 0.7, 0.7, 0., 0., 0.7, 0.7]);
        assert_eq!(tm.t_phi, want);
        assert_eq!(tm.t_z, from_real_rows(3, 3, &[0., 0., 0., 1., 0., 0., 0., 1., 0.]));
        let flat = build_toeplitz_model(&a, &zeros(1, 1), 2).unwrap();
        assert_eq!(flat.t_phi, identity(3).scale(0.7));
    }

    #[test]
    fn nilpotent_pencil_annihilates_model() {
        let fs = CMatrix::from_row_slice(2, 2, &[cr(0.), cr(0.), cr(1.), cr(0.)]);
        let tm = build_toeplitz_model(&fs.adjoint(), &fs, 6).unwrap();
        let p = det_pencil(&fs, PencilOrder::AdjFirst);
        assert!(verify_annihilation_banded(&tm, &p, 4).unwrap().passed());
        assert!(verify_annihilation_banded(&tm, &p, 0).unwrap().passed());
        assert!(matches!(
            verify_annihilation_banded(&tm, &p, 5),
            Err(Error::BandUnsafe { .. })
        ));
        // A non-annihilator is caught.
        assert!(!verify_annihilation_banded(&tm, &BiPoly::z1(), 1).unwrap().passed());
    }

    #[test]
    fn scalar_family_line_annihilates_de_model() {
        let a: f64 = 0.8;
        let tm = de_model(&identity(2).scale(a), 4).unwrap();
        let f = BiPoly::from_real_terms(&[(1, 0, 1.0), (0, 1, -a), (0, 0, -a)]);
        assert!(verify_annihilation_banded(&tm, &f, 3).unwrap().passed());
    }

    #[test]
    fn normal_annihilator_examples() {
        let a = identity(3).scale(0.4);
        let f = normal_annihilator(&a, 1e-9).unwrap();
        assert_eq!(f.degree(), (1, 1));
        assert!((f.coeff(0, 0) - cr(0.4)).norm() < 1e-12 && (f.coeff(0, 1) - cr(0.4)).norm() < 1e-12);
        assert_eq!(normal_annihilator(&zeros(2, 2), 1e-9).unwrap(), BiPoly::z1().scale(cr(-1.0)));

        let a = diag(&[cr(0.3), c(0.0, 0.5)]);
        let f = normal_annihilator(&a, 1e-9).unwrap();
        assert_eq!(f.degree(), (2, 2));
        assert!(verify_annihilation_banded(&de_model(&a, 8).unwrap(), &f, 4).unwrap().passed());

        let jordan = from_real_rows(2, 2, &[0., 1., 0., 0.]);
        assert!(matches!(normal_annihilator(&jordan, 1e-9), Err(Error::NotNormal { .. })));
        assert!(matches!(
            normal_annihilator(&identity(1), 1e-9),
            Err(Error::SpectrumTouchesCircle { .. })
        ));
    }

    #[test]
    fn probe_reaches_zero_past_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pair = scalar_family(2, 0.5);
        let top = 6;
        let size = 2 + top * 2;
        let mut x = CVector::zeros(size);
        let g = complex_gaussian(6, 1, &mut rng);
        x.rows_mut(0, 6).copy_from(&g.column(0));
        let noise = CVector::from_iterator(size, complex_gaussian(size, 1, &mut rng).iter().copied());
        let rows = convergence_probe(&pair, &[1, 2, 3, 4, 5, 6], &[x, CVector::zeros(size), noise], 1e-8).unwrap();
        for r in &rows {
            if r.vector == 0 && r.n >= 3 {
                assert!(r.t_diff < 1e-14 && r.v_diff < 1e-14, "{r:?}");
            }
            if r.vector == 1 {
                assert_eq!((r.t_diff, r.v_diff), (0.0, 0.0));
            }
        }
        let tail: Vec<f64> = rows.iter().filter(|r| r.vector == 2).map(|r| r.t_diff).collect();
        assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }

    #[test]
    fn minimal_dilation_verdicts() {
        let cfg = DilationConfig::default();
        assert_eq!(classify_minimal_dilation(&scalar_family(3, 0.5), &cfg, None).verdict, Verdict::Pass);

        let a = from_real_rows(3, 3, &[0., 2., 0., 0., 0., 0., 0., 0., 1.]);
        let cert = classify_minimal_dilation(&CommutingPair::new(a, zeros(3, 3)).unwrap(), &cfg, None);
        assert_eq!(cert.verdict, Verdict::Fail);
        let w = cert.witnesses.iter().find(|w| w.name == "eigenvalue_max_modulus").unwrap();
        assert!((w.value - cr(1.0)).norm() < 1e-9);
    }
}
