use bnf_core::poly::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn monomial_strategy(max_mode: i32, max_deg: u32) -> impl Strategy<Value = Monomial> {
    prop::collection::vec((-max_mode..=max_mode, 0..=2u32, 0..=2u32), 1..=3).prop_filter_map("degree bound", move |v| {
        let m = Monomial::from_factors(v.into_iter().map(|(j, k, l)| (ModeId::scalar(j), k, l)));
        (m.degree() >= 1 && m.degree() <= max_deg).then_some(m)
    })
}

fn poly_strategy(max_mode: i32, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((monomial_strategy(max_mode, max_deg), -1.0..1.0f64, -1.0..1.0f64), 1..=max_terms)
        .prop_map(|ts| Polynomial::from_terms(1, ts.into_iter().map(|(m, a, b)| (m, Complex64::new(a, b)))).unwrap())
}

fn real_poly_strategy() -> impl Strategy<Value = Polynomial> {
    poly_strategy(4, 4, 5).prop_map(|p| p.realified())
}

fn homogeneous_strategy(deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec((1..=4i32, any::<bool>()), deg as usize), -1.0..1.0f64), 1..=3).prop_map(move |ts| {
        let mut p = Polynomial::zero(1);
        for (vars, c) in ts {
            let m = Monomial::from_factors(vars.into_iter().map(|(j, x)| (ModeId::scalar(j), u32::from(x), u32::from(!x))));
            p.add_term(m, Complex64::new(c, 0.0)).unwrap();
        }
        p
    })
}

fn close(a: &Polynomial, b: &Polynomial, tol: f64) -> bool {
    a.sub(b).unwrap().max_coeff() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_bilinear(f in poly_strategy(4, 4, 5), g in poly_strategy(4, 4, 5), h in poly_strategy(4, 4, 5), a in -2.0..2.0f64) {
        let a = Complex64::new(a, 0.5);
        let lhs = f.scale(&a).add(&g).unwrap().poisson_bracket(&h).unwrap();
        let rhs = f.poisson_bracket(&h).unwrap().scale(&a).add(&g.poisson_bracket(&h).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn bracket_antisymmetric(f in poly_strategy(4, 4, 5), g in poly_strategy(4, 4, 5)) {
        let a = f.poisson_bracket(&g).unwrap();
        let b = g.poisson_bracket(&f).unwrap();
        prop_assert!(a.add(&b).unwrap().max_coeff() <= 1e-14);
    }

    #[test]
    fn jacobi(f in poly_strategy(3, 3, 4), g in poly_strategy(3, 3, 4), h in poly_strategy(3, 3, 4)) {
        let t1 = f.poisson_bracket(&g.poisson_bracket(&h).unwrap()).unwrap();
        let t2 = g.poisson_bracket(&h.poisson_bracket(&f).unwrap()).unwrap();
        let t3 = h.poisson_bracket(&f.poisson_bracket(&g).unwrap()).unwrap();
        prop_assert!(t1.add(&t2).unwrap().add(&t3).unwrap().max_coeff() <= 1e-12);
    }

    #[test]
    fn leibniz(f in poly_strategy(3, 3, 4), g in poly_strategy(3, 3, 4), h in poly_strategy(3, 3, 4)) {
        let lhs = f.poisson_bracket(&g.multiply(&h).unwrap()).unwrap();
        let rhs = f.poisson_bracket(&g).unwrap().multiply(&h).unwrap()
            .add(&g.multiply(&f.poisson_bracket(&h).unwrap()).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn diagonal_action(m in monomial_strategy(5, 5), ws in prop::collection::vec(0.1..10.0f64, 11)) {
        // {sum w_j xi_j eta_j, xi^k eta^l} = i w.(k-l) xi^k eta^l
        let omega = |j: i32| ws[(j + 5) as usize];
        let mut h0 = Polynomial::zero(1);
        for j in -5..=5 {
            h0.add_term(Monomial::action(ModeId::scalar(j)), Complex64::new(omega(j), 0.0)).unwrap();
        }
        let f = Polynomial::monomial(1, m.clone(), Complex64::new(1.0, 0.0)).unwrap();
        let b = h0.poisson_bracket(&f).unwrap();
        let div: f64 = m.k_minus_l().iter().map(|(j, d)| omega(j.first()) * *d as f64).sum();
        let expected = Complex64::new(0.0, div);
        prop_assert!((b.coefficient(&m) - expected).norm() <= 1e-12 * (1.0 + div.abs()));
        prop_assert!(b.len() <= 1);
    }

    #[test]
    fn momentum_conserved(f in poly_strategy(4, 4, 6), g in poly_strategy(4, 4, 6)) {
        let f0 = f.momentum_filter();
        let g0 = g.momentum_filter();
        let b = f0.poisson_bracket(&g0).unwrap();
        prop_assert!(b.terms().all(|(m, _)| m.has_zero_momentum()));
    }

    #[test]
    fn reality_preserved(f in real_poly_strategy(), g in real_poly_strategy()) {
        prop_assert!(f.reality_defect() <= 1e-15);
        let b = f.poisson_bracket(&g).unwrap();
        prop_assert!(b.reality_defect() <= 1e-13);
    }

    #[test]
    fn modulus_idempotent(f in poly_strategy(4, 4, 6)) {
        prop_assert_eq!(f.modulus().modulus(), f.modulus());
    }

    #[test]
    fn bracket_norm_bound(f in homogeneous_strategy(3), g in homogeneous_strategy(4), s in 1.0..4.0f64, r in 0.1..2.0f64, frac in 0.01..0.99f64) {
        let d = frac * r;
        let b = f.poisson_bracket(&g).unwrap();
        let w = WeightScheme::Shifted;
        let lhs = majorant_norm(&b, s, r - d, w).unwrap();
        let rhs = majorant_norm(&f, s, r, w).unwrap() * majorant_norm(&g, s, r, w).unwrap() / d;
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn bracket_norm_bound_mixed(f in poly_strategy(4, 4, 4), g in poly_strategy(4, 4, 4), s in 1.0..4.0f64, r in 0.1..2.0f64, frac in 0.01..0.99f64) {
        let d = frac * r;
        let b = f.poisson_bracket(&g).unwrap();
        let w = WeightScheme::Shifted;
        let lhs = majorant_norm(&b, s, r - d, w).unwrap();
        let rhs = majorant_norm(&f, s, r, w).unwrap() * majorant_norm(&g, s, r, w).unwrap() / d;
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn majorant_dominates_samples(f in homogeneous_strategy(3), s in 1.0..3.0f64, seed in any::<u64>()) {
        let w = WeightScheme::Shifted;
        let sampled = sampled_tame_ratio(&f, s, 200, seed, w).unwrap();
        prop_assert!(sampled <= nu(&f, s, w) * (1.0 + 1e-12));
    }

    #[test]
    fn majorant_homogeneity(f in poly_strategy(4, 4, 5), s in 1.0..3.0f64, r in 0.01..2.0f64) {
        let f = f.filter(|m, _| m.degree() >= 2);
        let w = WeightScheme::Shifted;
        let a = majorant_norm(&f, s, r, w).unwrap();
        let b = majorant_norm(&f, s, 2.0 * r, w).unwrap();
        prop_assert!(b >= 2.0 * a * (1.0 - 1e-14));
    }

    #[test]
    fn hex_roundtrip(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(!x.is_nan());
        prop_assert_eq!(parse_hex(&format_hex(x)).unwrap().to_bits(), bits);
    }

    #[test]
    fn text_roundtrip(f in poly_strategy(5, 5, 8), hex in any::<bool>()) {
        prop_assert_eq!(Polynomial::from_text(&f.to_text(hex)).unwrap(), f);
    }
}

#[test]
fn sampled_ratio_degree_three_single_mode() {
    // xi_1^3: ratio is 3 |z_xi| |w_xi| / ((|z|_s |w|_1 + |w|_s |z|_1)/2) in one mode;
    // all weights cancel, supremum reached as the eta components vanish.
    let f = single_term(1, Monomial::from_factors([(ModeId::scalar(1), 3, 0)]), 1.0);
    let w = WeightScheme::Shifted;
    let s = 2.0;
    let w1 = weight(&ModeId::scalar(1), 1.0);
    let ws = weight(&ModeId::scalar(1), s);
    // sup over t, u of 3 / ((sqrt(ws(1+t^2)) sqrt(w1(1+u^2)) + sqrt(ws(1+u^2)) sqrt(w1(1+t^2)))/(2 sqrt(ws)))
    let oracle = 3.0 * ws.sqrt() / (ws.sqrt() * w1.sqrt());
    let sampled = sampled_tame_ratio(&f, s, 20000, 11, w).unwrap();
    assert!(sampled <= oracle * (1.0 + 1e-12));
    assert!(sampled >= oracle * (1.0 - 1e-3), "sampled {sampled} oracle {oracle}");
    assert!(nu(&f, s, w) >= sampled);
}
