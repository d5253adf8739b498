use bnf_core::poly::ModeId;
use bnf_core::spectra::*;
use std::collections::BTreeMap;

// Mathieu characteristic values b_n(q), a_n(q): -y'' + 2q cos(2x) y = lambda y.
// Computed independently with scipy.special.mathieu_b / mathieu_a.
const MATHIEU_B_Q005: [f64; 5] = [0.9496894489640348, 3.999791668927171, 9.000154300936357, 16.00008333104028, 25.000052083420023];
const MATHIEU_A_Q005: [f64; 5] = [-0.0012496583996517972, 1.0496855429005403, 4.001041321901564, 9.000158206995614, 16.000083336465536];
const MATHIEU_B_Q04: [f64; 5] = [0.5809806071721151, 3.9866759110901655, 9.009019045398858, 16.005323955833884, 25.0033336278494];
const MATHIEU_A_Q04: [f64; 5] = [-0.0786492877974889, 1.3789867369616522, 4.065302999819779, 9.011012776786407, 16.005346154346345];

fn cos2(amp: f64) -> CosinePotential {
    CosinePotential::from_coeffs(0.0, &[0.0, amp])
}

#[test]
fn dirichlet_matches_mathieu() {
    for (q, want) in [(0.05, MATHIEU_B_Q005), (0.4, MATHIEU_B_Q04)] {
        let (l, _) = sturm_liouville(&cos2(2.0 * q), Boundary::Dirichlet, 5, 20).unwrap();
        for (a, b) in l.iter().zip(want) {
            assert!((a - b).abs() < 1e-10, "q={q}: {a} vs {b}");
        }
    }
}

#[test]
fn neumann_matches_mathieu() {
    for (q, want) in [(0.05, MATHIEU_A_Q005), (0.4, MATHIEU_A_Q04)] {
        let (l, _) = sturm_liouville(&cos2(2.0 * q), Boundary::Neumann, 5, 20).unwrap();
        for (a, b) in l.iter().zip(want) {
            assert!((a - b).abs() < 1e-10, "q={q}: {a} vs {b}");
        }
    }
}

#[test]
fn first_eigenvalue_regression_under_refinement() {
    let v = cos2(0.1);
    let (a, _) = sturm_liouville(&v, Boundary::Dirichlet, 1, 8).unwrap();
    let (b, _) = sturm_liouville(&v, Boundary::Dirichlet, 1, 16).unwrap();
    assert!((a[0] - b[0]).abs() < 1e-8);
    assert!((a[0] - 0.9496894489640348).abs() < 1e-12);
}

#[test]
fn spectral_shift_identity() {
    let v = CosinePotential::from_coeffs(0.0, &[0.3, -0.1, 0.05, 0.02]);
    for bc in [Boundary::Dirichlet, Boundary::Neumann] {
        let (l0, _) = sturm_liouville(&v, bc, 10, 40).unwrap();
        for c in [-0.7, 0.25, 3.0] {
            let (l1, _) = sturm_liouville(&v.shifted(c), bc, 10, 40).unwrap();
            for (a, b) in l0.iter().zip(&l1) {
                assert!((b - a - c).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn dirichlet_strictly_increasing_and_orthonormal() {
    let p = PotentialParams { r_amp: 1.0, sigma: 0.5, ..Default::default() };
    for seed in 0..5 {
        let s = sample_potential(PotentialFamily::NlsCosine, &p, seed).unwrap();
        let (l, b) = sturm_liouville(&s.cosine_part(), Boundary::Dirichlet, 12, 48).unwrap();
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        assert!(b.orthonormality_defect() < 1e-10);
    }
}

#[test]
fn localization_constants_stable_under_refinement() {
    let v = CosinePotential::from_coeffs(0.0, &[0.4, 0.2, 0.1, 0.05]);
    for n in [2, 3] {
        let (_, b1) = sturm_liouville(&v, Boundary::Dirichlet, 8, 32).unwrap();
        let (_, b2) = sturm_liouville(&v, Boundary::Dirichlet, 8, 64).unwrap();
        let c1 = check_localization(&b1, n).c_n;
        let c2 = check_localization(&b2, n).c_n;
        assert!(c1.is_finite() && c2.is_finite());
        assert!((c1 - c2).abs() <= 0.05 * c1, "n={n}: {c1} vs {c2}");
    }
}

#[test]
fn expansion_constant_stable_in_jmax() {
    let v = CosinePotential::from_coeffs(0.0, &[0.2]);
    let (l16, _) = sturm_liouville(&v, Boundary::Dirichlet, 16, 64).unwrap();
    let (l24, _) = sturm_liouville(&v, Boundary::Dirichlet, 24, 96).unwrap();
    let a = expansion_fit(&l16, &v).unwrap();
    let b = expansion_fit(&l24, &v).unwrap();
    assert!((a.coeffs[0] - b.coeffs[0]).abs() < 1e-4);
}

#[test]
fn expansion_constant_is_the_mean_value() {
    // the shift identity pins the constant to the mean, not to 2pi times it
    let v = CosinePotential::from_coeffs(0.3, &[0.2, 0.1]);
    let (l, _) = sturm_liouville(&v, Boundary::Dirichlet, 24, 96).unwrap();
    let f = expansion_fit(&l, &v).unwrap();
    assert!(f.closer_to_mean);
    assert!((f.coeffs[0] - 0.3).abs() < 1e-4);
}

#[test]
fn nlw_frequencies_approach_j() {
    let v = CosinePotential::from_coeffs(0.0, &[0.3, 0.1]);
    let (l, _) = sturm_liouville(&v, Boundary::Dirichlet, 20, 80).unwrap();
    let lam: BTreeMap<ModeId, f64> = l.iter().enumerate().map(|(i, x)| (ModeId::scalar(i as i32 + 1), *x)).collect();
    let t = nlw_frequencies(ModelTag::NlwDirichlet, &lam, 0.5).unwrap();
    let gaps: Vec<f64> = (1..=20).map(|j| (t.get(&ModeId::scalar(j)).unwrap() - j as f64).abs()).collect();
    for w in gaps.windows(2).skip(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
    assert!(gaps[19] < 0.02);
}

#[test]
fn derivative_examples_and_stencil_order() {
    let z = CosinePotential::zero();
    // cos(kx) moves the Dirichlet eigenvalue j at first order only when k = 2j
    let cases = [(1, 2, -0.5), (2, 4, -0.5), (2, 1, 0.0), (3, 1, 0.0), (3, 2, 0.0)];
    for (j, k, want) in cases {
        let r = eigenvalue_derivative_check(&z, Boundary::Dirichlet, j, k, 1e-4).unwrap();
        assert!((r.derivative - want).abs() < 1e-3, "j={j} k={k}: {}", r.derivative);
        assert_eq!(r.leading, want);
    }
    // Neumann: opposite sign
    let r = eigenvalue_derivative_check(&z, Boundary::Neumann, 1, 2, 1e-4).unwrap();
    assert!((r.derivative - 0.5).abs() < 1e-3);
    // second-order stencil: the error against a Richardson reference drops ~4x per halving
    let v = CosinePotential::from_coeffs(0.0, &[0.3, 0.6]);
    let d = |h: f64| eigenvalue_derivative_check(&v, Boundary::Dirichlet, 1, 2, h).unwrap().derivative;
    let (d1, d2, d3) = (d(0.2), d(0.1), d(0.05));
    let reference = d3 + (d3 - d2) / 3.0;
    let ratio = (d1 - reference).abs() / (d2 - reference).abs();
    assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
}
