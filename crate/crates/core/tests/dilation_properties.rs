use bidisc_core::bipoly::{classify_poly, det_pencil, eval_pair, pair_scale};
use bidisc_core::dilation::{
    build_hat_pair, build_toeplitz_model, build_truncated_dilation, convergence_probe, corner_form, de_model,
    normal_annihilator, verify_annihilation_banded, verify_dilation_identity,
};
use bidisc_core::linalg::{diag, op_norm, spectral_radius, CVector};
use bidisc_core::opcore::{
    certify_gamma_contraction, fundamental_operator, fundamental_operator_adjoint, CertifyConfig,
};
use bidisc_core::random::{complex_gaussian, disc_point, gamma_contraction, haar_unitary, with_numerical_radius};
use bidisc_core::{BiPoly, PencilOrder, PolyTag, SamplerConfig};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

proptest! {
    #![proptest_config(cases(40))]

    #[test]
    fn hat_pairs_are_gamma_contractions(seed in any::<u64>(), k in 1usize..4, n in 1usize..7, w in 0.05f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = with_numerical_radius(&complex_gaussian(k, k, &mut rng), w);
        let hat = build_hat_pair(&a, n).unwrap();
        prop_assert!(certify_gamma_contraction(&hat, &CertifyConfig::default()).passed());
        let x = fundamental_operator(&hat, 1e-8).unwrap();
        prop_assert!(op_norm(&(x.lifted() - corner_form(&a, 0, n))) < 1e-8);
    }

    #[test]
    fn truncations_dilate_every_monomial(seed in any::<u64>(), d in 1usize..4, n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = gamma_contraction(d, &mut rng);
        let td = build_truncated_dilation(&pair, n, &CertifyConfig::default()).unwrap();
        prop_assert!(certify_gamma_contraction(&td.pair(), &CertifyConfig::default()).passed());
        prop_assert_eq!(td.frame_blocks.total(), td.t.nrows());
        for i in 0..=n + 1 {
            for j in 0..=n + 1 - i {
                let mono = BiPoly::from_real_terms(&[(i, j, 1.0)]);
                prop_assert!(verify_dilation_identity(&td, &mono).passed());
            }
        }
    }

    #[test]
    fn pencil_of_adjoint_operator_annihilates_model(seed in any::<u64>(), k in 1usize..4, r in 0.05f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = complex_gaussian(k, k, &mut rng);
        let fs = g.scale(r / spectral_radius(&g).max(1e-12));
        let p = det_pencil(&fs, PencilOrder::AdjFirst);
        let tm = build_toeplitz_model(&fs.adjoint(), &fs, p.total_degree() + 3).unwrap();
        prop_assert!(verify_annihilation_banded(&tm, &p, 3).unwrap().passed());
    }

    #[test]
    fn normal_annihilator_kills_de_model(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = haar_unitary(k, &mut rng);
        let eigs: Vec<Complex64> = (0..k).map(|_| disc_point(0.95, &mut rng)).collect();
        let a = &u * diag(&eigs) * u.adjoint();
        let f = normal_annihilator(&a, 1e-9).unwrap();
        let tm = de_model(&a, f.total_degree() + 2).unwrap();
        prop_assert!(verify_annihilation_banded(&tm, &f, 2).unwrap().passed());
    }
}

#[test]
fn certified_annihilator_forces_spectrum_inside_disc() {
    // Whenever the band check certifies a Γ-distinguished annihilator of the
    // (D, E) model, r(A) < 1.
    let mut rng = ChaCha8Rng::seed_from_u64(76);
    let cfg = SamplerConfig::default();
    let mut certified = 0;
    for _ in 0..30 {
        let k = rng.random_range(1..=2);
        let a = with_numerical_radius(&complex_gaussian(k, k, &mut rng), rng.random_range(0.3..1.0));
        let p = det_pencil(&a, PencilOrder::AFirst);
        let tm = de_model(&a, p.total_degree() + 2).unwrap();
        let annihilates = verify_annihilation_banded(&tm, &p, 2).unwrap().passed();
        let distinguished = classify_poly(&p, &cfg).map(|v| v.tag == PolyTag::GammaDistinguished).unwrap_or(false);
        if annihilates && distinguished {
            certified += 1;
            assert!(spectral_radius(&a) < 1.0);
        }
    }
    assert!(certified > 0);
}

#[test]
fn pure_contractions_have_distinguished_adjoint_pencils() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let mut tried = 0;
    while tried < 20 {
        let pair = gamma_contraction(rng.random_range(1..=3), &mut rng);
        let fs = fundamental_operator_adjoint(&pair, 1e-8).unwrap();
        if spectral_radius(&fs.a) > 0.9 {
            continue;
        }
        tried += 1;
        let p = det_pencil(&fs.a, PencilOrder::AdjFirst);
        let v = classify_poly(&p, &SamplerConfig::default()).unwrap();
        assert_eq!(v.tag, PolyTag::GammaDistinguished, "{p}");
        let tm = build_toeplitz_model(&fs.a.adjoint(), &fs.a, p.total_degree() + 2).unwrap();
        assert!(verify_annihilation_banded(&tm, &p, 2).unwrap().passed());
        // (S, P) is a compression of the model to a co-invariant subspace.
        let rel = op_norm(&eval_pair(&p, &pair)) / pair_scale(&p, &pair).max(1.0);
        assert!(rel < 1e-9, "{rel}");
    }
}

#[test]
fn convergence_probe_tails_shrink() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pair = gamma_contraction(2, &mut rng);
    let k = fundamental_operator(&pair, 1e-8).unwrap().a.nrows();
    let top = 7;
    let size = 2 + top * k;
    let x = CVector::from_iterator(size, complex_gaussian(size, 1, &mut rng).iter().copied());
    let rows = convergence_probe(&pair, &(1..=top).collect::<Vec<_>>(), &[x], 1e-8).unwrap();
    let t: Vec<f64> = rows.iter().map(|r| r.t_diff).collect();
    let v: Vec<f64> = rows.iter().map(|r| r.v_diff).collect();
    assert!(t.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    assert_eq!(*t.last().unwrap(), 0.0);
}
