use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use super::*;
use crate::poly::sample::random_stable_3var;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn p3() -> MultiAffine3Poly {
    let t = -1.0 / 3.0;
    MultiAffine3Poly::from_real([1.0, t, t, 0.0, t, 0.0, 0.0, 0.0])
}

fn two(coeffs: [f64; 4]) -> MultiAffine2Poly {
    MultiAffine2Poly { coeffs: coeffs.map(c) }
}

#[test]
fn split_examples() {
    let t = -1.0 / 3.0;
    let (a, b) = split_ab(&p3());
    assert_eq!(a, two([1.0, t, t, 0.0]));
    assert_eq!(b, two([t, 0.0, 0.0, 0.0]));

    let (a, b) = split_ab(&MultiAffine3Poly::from_real([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]));
    assert_eq!(a, two([0.0; 4]));
    assert_eq!(b, two([1.0, 0.0, 0.0, 0.0]));

    let (a, b) = split_ab(&MultiAffine3Poly::from_real([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
    assert_eq!(a, two([1.0, 0.0, 0.0, 0.0]));
    assert_eq!(b, two([0.0, 0.0, 0.0, 1.0]));
}

#[test]
fn trig_examples() {
    assert_eq!(
        t_from_ab(&two([1.0, 0.0, 0.0, 0.0]), &two([0.0; 4])),
        TrigPoly11::constant(1.0)
    );

    let (a, b) = split_ab(&p3());
    let t = t_from_ab(&a, &b);
    let close = |z: Complex64, v: f64| (z - c(v)).norm() < 1e-15;
    assert!(close(t.get(0, 0), 10.0 / 9.0));
    assert!(close(t.get(1, 0), -1.0 / 3.0) && close(t.get(0, 1), -1.0 / 3.0));
    assert!(close(t.get(1, -1), 1.0 / 9.0) && close(t.get(1, 1), 0.0));
    for k in 0..100 {
        let z1 = Complex64::from_polar(1.0, 0.731 * k as f64);
        let z2 = Complex64::from_polar(1.0, 1.913 * k as f64);
        let direct = a.eval(z1, z2).norm_sqr() - b.eval(z1, z2).norm_sqr();
        assert!((t.eval_torus(z1, z2) - direct).abs() < 1e-14);
    }

    let t = t_from_ab(&two([0.0, 0.0, 0.0, 1.0]), &two([1.0, 0.0, 0.0, 0.0]));
    assert!(t.coeffs.iter().flatten().all(|z| z.norm() == 0.0));
}

#[test]
fn constant_inner_matrix_is_unitary() {
    let fr = fejer_riesz_2x2(&TrigPoly11::constant(1.0), &FejerRieszOptions::default()).unwrap();
    let (a, b) = split_ab(&MultiAffine3Poly::constant(c(1.0)));
    let v = build_v(&a, &b, &fr.e);
    for k in 0..20 {
        let z1 = Complex64::from_polar(1.0, 0.3 * k as f64);
        let z2 = Complex64::from_polar(1.0, 0.7 * k as f64);
        let m = v.eval(z1, z2).unwrap();
        assert!(m.gram().sub(&CMatrix::identity(3)).unwrap().max_abs() < 1e-15);
    }
    assert!(identity_defect(&a, &b, &fr.e) < 1e-15);
}

#[test]
fn boundary_inner_matrix() {
    let (a, b) = split_ab(&p3());
    let fr = fejer_riesz_2x2(&t_from_ab(&a, &b), &FejerRieszOptions::default()).unwrap();
    let v = build_v(&a, &b, &fr.e);
    assert!(v.unitarity_defect(100, 5) <= 1e-8);
    assert!(identity_defect(&a, &b, &fr.e) <= 1e-10);
    // a + b~ = 1 - (z1 + z2)/3 - z1 z2/3 vanishes at (1, 1).
    assert!(matches!(v.eval(c(1.0), c(1.0)), Err(Error::Pole(_))));
}

#[test]
fn constant_decomposition_is_diagonal() {
    let p = MultiAffine3Poly::constant(c(1.0));
    let rep = kummert_certificate(&p, &KummertOptions::default()).unwrap();
    let cert = &rep.certificate;
    for g in [&cert.g1, &cert.g2] {
        for j in 0..4 {
            for k in 0..4 {
                if j != k {
                    assert!(g[(j, k)].norm() < 1e-9);
                }
            }
        }
    }
    assert!(verify_kummert(&p, cert, 200, 1).unwrap() <= 1e-9);
}

#[test]
fn closed_form_constant_certificate() {
    // 1 - |z1 z2 z3|^2 with |E|^2 = (1 + |z2|^2)/2.
    let h = FRAC_1_SQRT_2;
    let e = EFactor {
        a0: [[c(h), c(0.0)], [c(0.0), c(h)]],
        a1: [[c(0.0); 2]; 2],
    };
    let g1 = HermitianMatrix::from_real_diag(&[0.0, 0.0, 0.375, 0.625]);
    let g2 = HermitianMatrix::from_real_diag(&[0.5, 0.0, 0.125, 0.375]);
    let cert = KummertCertificate {
        h1: gram_factor(&g1).unwrap(),
        h2: gram_factor(&g2).unwrap(),
        e,
        g1,
        g2,
    };
    let p = MultiAffine3Poly::constant(c(1.0));
    assert!(verify_kummert(&p, &cert, 200, 3).unwrap() <= 1e-12);

    let mut bad = cert.clone();
    bad.g1 = HermitianMatrix::from_real_diag(&[0.0; 4]);
    assert!(verify_kummert(&p, &bad, 200, 3).unwrap() > 1e-2);
}

#[test]
fn decomposition_scales_quadratically() {
    let one = kummert_certificate(&MultiAffine3Poly::constant(c(1.0)), &KummertOptions::default()).unwrap();
    let half = kummert_certificate(&MultiAffine3Poly::constant(c(0.5)), &KummertOptions::default()).unwrap();
    for (g, g_half) in [
        (&one.certificate.g1, &half.certificate.g1),
        (&one.certificate.g2, &half.certificate.g2),
    ] {
        let gap = g.as_matrix().scale(c(0.25)).sub(g_half.as_matrix()).unwrap();
        assert!(gap.max_abs() < 1e-8);
    }
}

#[test]
fn boundary_pipeline() {
    let p = p3();
    let rep = kummert_certificate(&p, &KummertOptions::default()).unwrap();
    assert!(verify_kummert(&p, &rep.certificate, 200, 2).unwrap() <= 1e-6);
    assert!(rep.fejer_riesz_residual <= 1e-9);
}

#[test]
fn corrupted_certificate_is_detected() {
    let p = p3();
    let mut cert = kummert_certificate(&p, &KummertOptions::default()).unwrap().certificate;
    cert.g1 = HermitianMatrix::from_real_diag(&[0.0; 4]);
    assert!(verify_kummert(&p, &cert, 200, 2).unwrap() > 1e-2);
}

#[test]
fn unstable_input_is_rejected() {
    let p = MultiAffine3Poly::from_real([1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert!(matches!(
        kummert_certificate(&p, &KummertOptions::default()),
        Err(Error::Unstable { .. })
    ));
}

#[test]
fn random_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..15 {
        let p = random_stable_3var(&mut rng);
        let rep = kummert_certificate(&p, &KummertOptions::default()).unwrap();
        assert!(verify_kummert(&p, &rep.certificate, 200, 11).unwrap() <= 1e-6);
        assert!(rep.ranks.e <= 2 && rep.ranks.g1 <= 4 && rep.ranks.g2 <= 4);
        assert!(rep.unitarity_defect <= 1e-8, "{}", rep.unitarity_defect);
        assert!(rep.identity_defect <= 1e-10);
        assert!(rep.fejer_riesz_residual <= 1e-9);
        assert_eq!(rep.regularization, 0.0);
    }
}

#[test]
fn certificate_json_round_trip() {
    let rep = kummert_certificate(&p3(), &KummertOptions::default()).unwrap();
    let text = serde_json::to_string(&rep.certificate).unwrap();
    for key in ["\"E\"", "\"A0\"", "\"A1\"", "\"G1\"", "\"G2\"", "\"H1\"", "\"H2\""] {
        assert!(text.contains(key), "{key}");
    }
    let back: KummertCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rep.certificate);
}

#[test]
fn product_matches_evaluation() {
    let p = two([1.0, -0.5, 0.25, 0.1]);
    let q = MultiAffine2Poly {
        coeffs: [c(0.3), Complex64::new(0.0, 1.0), c(-0.2), Complex64::new(0.5, 0.5)],
    };
    let pq = product(&p, &q);
    let z1 = Complex64::from_polar(0.7, 1.0);
    let z2 = Complex64::from_polar(1.3, TAU / 5.0);
    let mut acc = c(0.0);
    for (i, row) in pq.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            acc += v * z1.powu(i as u32) * z2.powu(j as u32);
        }
    }
    assert!((acc - p.eval(z1, z2) * q.eval(z1, z2)).norm() < 1e-14);
}

#[test]
fn methods_agree_on_constant() {
    let p = MultiAffine3Poly::constant(c(1.0));
    for method in [FeasibilityMethod::Dykstra, FeasibilityMethod::CentralPath] {
        let mut opts = KummertOptions::default();
        opts.feasibility.method = method;
        let rep = kummert_certificate(&p, &opts).unwrap();
        assert_eq!(rep.feasibility_method, method);
        assert!(verify_kummert(&p, &rep.certificate, 200, 4).unwrap() <= 1e-9);
    }
}

#[test]
fn central_path_alone_handles_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let mut opts = KummertOptions::default();
    opts.feasibility.method = FeasibilityMethod::CentralPath;
    for _ in 0..30 {
        let p = random_stable_3var(&mut rng);
        let rep = kummert_certificate(&p, &opts).unwrap();
        assert!(verify_kummert(&p, &rep.certificate, 100, 8).unwrap() <= 1e-6);
    }
}
