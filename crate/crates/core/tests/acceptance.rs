//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the report always reaches stdout.

use bnf_core::birkhoff::*;
use bnf_core::dynamics::*;
use bnf_core::poly::*;
use bnf_core::resonance::*;
use bnf_core::spectra::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn m(j: i32) -> ModeId {
    ModeId::scalar(j)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(start: Instant, budget: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    check(took <= budget, format!("{detail}; {:.1}s of {}s", took.as_secs_f64(), budget.as_secs()))
}

fn random_poly(rng: &mut ChaCha8Rng, modes: i32, max_deg: u32, terms: usize, dyadic: bool) -> Polynomial {
    let mut p = Polynomial::zero(1);
    for _ in 0..terms {
        let deg = rng.gen_range(1..=max_deg);
        let vars: Vec<(ModeId, u32, u32)> = (0..deg)
            .map(|_| {
                let x = rng.gen_bool(0.5);
                (m(rng.gen_range(1..=modes)), u32::from(x), u32::from(!x))
            })
            .collect();
        let mut draw = || if dyadic { rng.gen_range(-16i32..=16) as f64 / 8.0 } else { rng.gen_range(-1.0..1.0) };
        let c = Complex64::new(draw(), draw());
        p.add_term(Monomial::from_factors(vars), c).unwrap();
    }
    p
}

fn two_mode_demo() -> (FrequencyTable, Polynomial) {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/two_mode_demo.poly");
    let p = Polynomial::from_text(&std::fs::read_to_string(path).unwrap()).unwrap();
    (FrequencyTable::from_values(&[1.0, 2f64.sqrt()]).unwrap(), p)
}

/// Scaled copy of a state with random phases and magnitudes.
fn random_state(index: Arc<ModeIndex>, norm: f64, s: f64, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = (0..index.len()).map(|_| Complex64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..std::f64::consts::TAU))).collect();
    let st = State::new(index, xi);
    let k = norm / st.norm_s(s, WeightScheme::Shifted);
    st.with_xi(st.xi.iter().map(|z| z * k).collect())
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    let mut non_members = 0;
    for _ in 0..200 {
        let modes = rng.gen_range(1..=8);
        let omega: Vec<f64> = (0..modes).map(|_| rng.gen_range(0.5..3.0)).collect();
        let t = FrequencyTable::from_values(&omega).unwrap();
        let n = rng.gen_range(1..=8);
        // the solver accepts at most quadratic dependence on tail modes
        let (f, _) = random_poly(&mut rng, modes, 6, 12, false).tail_split(n);
        let gamma = rng.gen_range(0.01..0.5);
        let (chi, z) = solve_homological(&f, &t, gamma, 1.0, n).map_err(|e| e.to_string())?;
        let res = homological_residual(&f, &chi, &z, &t).map_err(|e| e.to_string())?;
        worst = worst.max(res / f.l1_norm());
        non_members += z.terms().filter(|(mono, _)| !normal_form_membership(mono, &t, gamma, 1.0, n).unwrap()).count();
    }
    let ok = worst <= 1e-12 && non_members == 0;
    within(t0, Duration::from_secs(10), format!("max relative residual {worst:.2e} (tol 1e-12), {non_members} non-member Z terms")).and_then(|d| check(ok, d))
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    let mut exact_nonzero = 0;
    for _ in 0..100 {
        let f = random_poly(&mut rng, 4, 4, 5, true);
        let g = random_poly(&mut rng, 4, 4, 5, true);
        let h = random_poly(&mut rng, 4, 4, 5, true);
        let br = |a: &Polynomial, b: &Polynomial| a.poisson_bracket(b).unwrap();
        let scale = f.l1_norm() * g.l1_norm() * h.l1_norm().max(1.0);
        let anti = br(&f, &g).add(&br(&g, &f)).unwrap();
        let jac = br(&f, &br(&g, &h)).add(&br(&g, &br(&h, &f))).unwrap().add(&br(&h, &br(&f, &g))).unwrap();
        let gh = g.multiply(&h).unwrap();
        let leib = br(&f, &gh).sub(&br(&f, &g).multiply(&h).unwrap()).unwrap().sub(&g.multiply(&br(&f, &h)).unwrap()).unwrap();
        for e in [&anti, &jac, &leib] {
            worst = worst.max(e.max_coeff() / scale);
        }

        let (fe, ge, he) = (f.to_exact().unwrap(), g.to_exact().unwrap(), h.to_exact().unwrap());
        let bre = |a: &Polynomial<GaussianRational>, b: &Polynomial<GaussianRational>| a.poisson_bracket(b).unwrap();
        let anti = bre(&fe, &ge).add(&bre(&ge, &fe)).unwrap();
        let jac = bre(&fe, &bre(&ge, &he)).add(&bre(&ge, &bre(&he, &fe))).unwrap().add(&bre(&he, &bre(&fe, &ge))).unwrap();
        let leib = bre(&fe, &ge.multiply(&he).unwrap())
            .sub(&bre(&fe, &ge).multiply(&he).unwrap())
            .unwrap()
            .sub(&ge.multiply(&bre(&fe, &he)).unwrap())
            .unwrap();
        exact_nonzero += [anti, jac, leib].iter().filter(|e| !e.is_zero()).count();
    }
    let ok = worst <= 1e-12 && exact_nonzero == 0;
    within(t0, Duration::from_secs(30), format!("float defect {worst:.2e} (tol 1e-12), exact nonzero identities {exact_nonzero}")).and_then(|d| check(ok, d))
}

fn criterion_3() -> Outcome {
    let (t, p) = two_mode_demo();
    let mut params = NormalFormParams::new(3, 0.1, 1.0, TailCutoff::Fixed(2), 1.0).map_err(|e| e.to_string())?;
    params.radius = 0.05;
    let nf = normalize(&t, &p, &params).map_err(|e| e.to_string())?;
    let cap = params.degree_cap();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let mut quad = || {
            let mut q = Polynomial::zero(1);
            for a in 1..=2 {
                for b in 1..=2 {
                    for x in [0u32, 1] {
                        for y in [0u32, 1] {
                            let mono = Monomial::from_factors([(m(a), x, 1 - x), (m(b), y, 1 - y)]);
                            q.add_term(mono, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
                        }
                    }
                }
            }
            q
        };
        let (f, g) = (quad(), quad());
        let pb = |x: &Polynomial| pullback(x, &nf.generators, cap).unwrap();
        let lhs = pb(&f).poisson_bracket(&pb(&g)).unwrap();
        let rhs = pb(&f.poisson_bracket(&g).unwrap());
        worst = worst.max(lhs.sub(&rhs).unwrap().degree_range(0, cap - 1).max_coeff());
    }
    let idx = Arc::new(ModeIndex::new(vec![m(1), m(2)]));
    let tr = Transport::new(&nf.generators, idx.clone()).map_err(|e| e.to_string())?;
    let opts = TransportOptions::default();
    let mut roundtrip: f64 = 0.0;
    for seed in 0..5 {
        let st = random_state(idx.clone(), 0.05, 1.0, seed);
        let back = tr.apply(&tr.apply(&st, Direction::Forward, &opts).unwrap(), Direction::Inverse, &opts).unwrap();
        roundtrip = roundtrip.max(st.xi.iter().zip(&back.xi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    }
    check(worst <= 1e-10 && roundtrip <= 1e-9, format!("bracket defect through degree {} = {worst:.2e} (tol 1e-10), roundtrip {roundtrip:.2e} (tol 1e-9)", cap - 1))
}

fn criterion_4() -> Outcome {
    let t0 = Instant::now();
    let mut configs = 0;
    let mut mismatches = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + seed);
        let base: Vec<f64> = (1..=6).map(|j| j as f64 + rng.gen_range(-0.05..0.05)).collect();
        for jmax in 1..=6u32 {
            let t = FrequencyTable::from_values(&base[..jmax as usize]).unwrap();
            for r in 0..=3 {
                for (n_cut, gamma) in [(jmax, 0.2), (2.min(jmax), 0.05)] {
                    let q = DivisorQuery::new(r, n_cut, gamma, 1.0, jmax).map_err(|e| e.to_string())?;
                    let a = enumerate_near_resonances(&t, &q).map_err(|e| e.to_string())?;
                    let b = enumerate_exhaustive(&t, &q).map_err(|e| e.to_string())?;
                    configs += 1;
                    if !a.complete || a.hits != b.hits {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    within(t0, Duration::from_secs(60), format!("{configs} configurations, {mismatches} mismatches")).and_then(|d| check(mismatches == 0, d))
}

fn criterion_5() -> Outcome {
    let (l, _) = sturm_liouville(&CosinePotential::zero(), Boundary::Dirichlet, 20, 80).map_err(|e| e.to_string())?;
    let free = l.iter().enumerate().map(|(i, x)| (x - ((i + 1) * (i + 1)) as f64).abs()).fold(0.0, f64::max);
    let v = CosinePotential::from_coeffs(0.0, &[0.3, -0.1, 0.05, 0.02]);
    let mut shift: f64 = 0.0;
    for bc in [Boundary::Dirichlet, Boundary::Neumann] {
        let (l0, _) = sturm_liouville(&v, bc, 10, 40).unwrap();
        for c in [-0.7, 0.25, 3.0] {
            let (l1, _) = sturm_liouville(&v.shifted(c), bc, 10, 40).unwrap();
            shift = shift.max(l0.iter().zip(&l1).map(|(a, b)| (b - a - c).abs()).fold(0.0, f64::max));
        }
    }
    let w = CosinePotential::from_coeffs(0.0, &[0.4, 0.2, 0.1, 0.05]);
    let (_, b1) = sturm_liouville(&w, Boundary::Dirichlet, 8, 32).unwrap();
    let (_, b2) = sturm_liouville(&w, Boundary::Dirichlet, 8, 64).unwrap();
    let mut loc = Vec::new();
    let mut stable = true;
    for n in [2, 3] {
        let (c1, c2) = (check_localization(&b1, n).c_n, check_localization(&b2, n).c_n);
        stable &= c1.is_finite() && c2.is_finite() && (c1 - c2).abs() <= 0.05 * c1;
        loc.push(format!("C{n} {c1:.4} -> {c2:.4}"));
    }
    check(
        free <= 1e-10 && shift <= 1e-10 && stable,
        format!("|lambda_j - j^2| {free:.1e}, shift defect {shift:.1e} (tol 1e-10), {}", loc.join(", ")),
    )
}

/// Dirichlet NLS on five modes with a cubic sin(x) term and a quartic term.
fn nls_demo() -> (FrequencyTable, Polynomial) {
    let v = CosinePotential::from_coeffs(0.0, &[0.3, -0.1, 0.05]);
    let (t, b) = model_spectrum(ModelTag::Nls1dDirichlet, &v, None, 5, 0.0).unwrap();
    let nl = Nonlinearity::Schroedinger(vec![
        NlsTerm { psi: 2, psi_bar: 1, coeff: 0.5, profile: Profile::Sin(1) },
        NlsTerm { psi: 2, psi_bar: 2, coeff: 1.0, profile: Profile::Const },
    ]);
    let h = build_model_hamiltonian(&t, &b, &nl).unwrap();
    (t, h.degree_range(3, 4))
}

fn criterion_6() -> Outcome {
    let (t, p) = nls_demo();
    let params = NormalFormParams::new(2, 0.01, 1.0, TailCutoff::Fixed(5), 1.0).map_err(|e| e.to_string())?;
    let nf = normalize(&t, &p, &params).map_err(|e| e.to_string())?;
    let idx = Arc::new(ModeIndex::new(t.modes().cloned().collect()));
    let tr = Transport::new(&nf.generators, idx.clone()).map_err(|e| e.to_string())?;
    let opts = TransportOptions::default();
    let radii = [0.1, 0.05, 0.025];
    let mut disp = Vec::new();
    for &r in &radii {
        let z = random_state(idx.clone(), r, 1.0, 6);
        let tz = tr.apply(&z, Direction::Forward, &opts).map_err(|e| e.to_string())?;
        disp.push(z.with_xi(z.xi.iter().zip(&tz.xi).map(|(a, b)| a - b).collect()).norm_s(1.0, WeightScheme::Shifted));
    }
    let slope = loglog_slope(&radii, &disp);
    check((slope - 2.0).abs() <= 0.2, format!("slope {slope:.3} (want 2.0 +- 0.2), displacements {disp:?}"))
}

/// `sum_{j, k >= 1, j + k <= J} (xi_j xi_k eta_{j+k} + c.c.)`
fn convolution_cubic(jmax: i32) -> Polynomial {
    let one = Complex64::new(1.0, 0.0);
    let mut f = Polynomial::zero(1);
    for j in 1..jmax {
        for k in 1..=(jmax - j) {
            let mono = Monomial::from_factors([(m(j), 1, 0), (m(k), 1, 0), (m(j + k), 0, 1)]);
            f.add_term(mono.conjugate(), one).unwrap();
            f.add_term(mono, one).unwrap();
        }
    }
    f
}

fn criterion_7() -> Outcome {
    let f = convolution_cubic(64);
    let ns = [4.0, 8.0, 16.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for s in [3.0, 4.0] {
        let probe = TailProbe { s, radius: 1.0, ..Default::default() };
        let sups: Vec<f64> = ns.iter().map(|&n| tail_field_sup(&f, n as u32, &probe).unwrap()).collect();
        let slope = loglog_slope(&ns, &sups);
        ok &= (slope + (s - 1.0)).abs() <= 0.3;
        parts.push(format!("s={s}: slope {slope:.3} (want {} +- 0.3)", -(s - 1.0)));
    }
    check(ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let t0 = Instant::now();
    let params = PotentialParams { r_amp: 0.5, sigma: 0.2, ..Default::default() };
    let (gamma, alpha, r) = (0.02, 1.0, 2);
    // first sampled potential whose nine-mode spectrum passes (r-NR)
    let mut found = None;
    for seed in 0..50u64 {
        let sample = sample_potential(PotentialFamily::NlsCosine, &params, seed).map_err(|e| e.to_string())?;
        let t = frequencies_for_sample(&sample, 9).map_err(|e| e.to_string())?;
        let q = DivisorQuery::new(r, 9, gamma, alpha, 9).map_err(|e| e.to_string())?;
        let e = enumerate_near_resonances(&t, &q).map_err(|e| e.to_string())?;
        if e.complete && e.hits.is_empty() {
            found = Some((seed, sample));
            break;
        }
    }
    let (pseed, sample) = found.ok_or("no sampled potential passes (r-NR)")?;
    let (t, b) = model_spectrum(ModelTag::Nls1dDirichlet, &sample.cosine_part(), None, 9, 0.0).map_err(|e| e.to_string())?;
    let nl = Nonlinearity::Schroedinger(vec![NlsTerm { psi: 2, psi_bar: 2, coeff: 1.0, profile: Profile::Const }]);
    let h = build_model_hamiltonian(&t, &b, &nl).map_err(|e| e.to_string())?;
    let eps = vec![0.2, 0.1, 0.05];
    let mut cfg = DriftConfig::new("nls1d_dirichlet", eps.clone(), vec![1, 2], 2.0, 1.0);
    cfg.integrator.dt = 0.01;
    let rows = drift_experiment(&h, &cfg).map_err(|e| e.to_string())?;
    // worst case over seeds at each amplitude
    let d: Vec<f64> = eps.iter().map(|e| rows.iter().filter(|r| r.eps == *e).map(|r| r.max_weighted_action_drift).fold(0.0, f64::max)).collect();
    let slope = loglog_slope(&eps, &d);
    let escapes = rows.iter().filter(|r| r.escaped).count();
    let detail = format!("potential seed {pseed}, slope {slope:.3} (want >= 2.5), D {d:?}, escapes {escapes}");
    within(t0, Duration::from_secs(600), detail).and_then(|d| check(slope >= 2.5 && escapes == 0, d))
}

fn criterion_9() -> Outcome {
    // periodic wave equation: exchange inside a nearly degenerate tail pair
    let sample = sample_potential(PotentialFamily::NlwPeriodic, &PotentialParams::default(), 0).map_err(|e| e.to_string())?;
    let jmax = 6u32;
    let (t, b) = model_spectrum(ModelTag::NlwPeriodic, &sample.cosine_part(), None, jmax, sample.mass).map_err(|e| e.to_string())?;
    let (cutoff, _) = calibrate_pair_cutoff(&t, 0.005, 1.0, jmax, PairRelation::Opposite);
    let gap = |j: i32| (t.get(&m(j)).unwrap() - t.get(&m(-j)).unwrap()).abs();
    let j = (1..=jmax as i32).filter(|j| *j as f64 > cutoff).min_by(|a, b| gap(*a).total_cmp(&gap(*b))).ok_or("no pair beyond the cutoff")?;
    let h = build_model_hamiltonian(&t, &b, &Nonlinearity::Wave(vec![PowerTerm { power: 4, coeff: 1.0, profile: Profile::Const }])).map_err(|e| e.to_string())?;
    let idx = Arc::new(ModeIndex::new(t.modes().cloned().collect()));
    let profile = InitialProfile::Explicit(t.modes().map(|k| (k.clone(), if k.first().abs() == j { 1.0 } else { 0.1 * (1.0 + k.norm()).powi(-2) })).collect());
    let eps = 0.1;
    let mut z0 = initial_state(idx.clone(), &profile, eps, 1.0, WeightScheme::Shifted, 9).map_err(|e| e.to_string())?;
    // relative phase that switches the exchange term fully on
    let (pj, pm) = (idx.position(&m(j)).unwrap(), idx.position(&m(-j)).unwrap());
    z0.xi[pm] = Complex64::from_polar(z0.xi[pm].norm(), z0.xi[pj].arg() + FRAC_PI_4);
    let field = HamiltonianField::new(&h, idx).map_err(|e| e.to_string())?;
    let mut cfg = DriftConfig::new("nlw_periodic", vec![eps], vec![9], 2.0, 1.0);
    cfg.integrator.dt = 0.01;
    let row = drift_run(&field, None, &z0, eps, 9, &cfg).map_err(|e| e.to_string())?;
    let (di, dj) = (row.action_drift[&m(j)], row.pair_drift[&j]);
    let ratio = di / dj;
    let part_a = format!("NLW pair j={j} (cutoff {cutoff:.2}): I drift {di:.2e}, J drift {dj:.2e}, ratio {ratio:.1} (want >= 10)");

    // lattice NLS with x-independent quartic term
    let lparams = PotentialParams { d: 2, r_amp: 1.0, m_decay: 2.0, ..Default::default() };
    let lsample = sample_potential(PotentialFamily::ConvolutionD, &lparams, 2024).map_err(|e| e.to_string())?;
    let lt = convolution_frequencies(2, &lsample, 2).map_err(|e| e.to_string())?;
    let lh = build_model_hamiltonian(&lt, &ModelBasis::Fourier { d: 2 }, &Nonlinearity::Lattice { kappa: 1.0 }).map_err(|e| e.to_string())?;
    let nparams = NormalFormParams::new(2, 1e-6, 1.0, TailCutoff::Fixed(2), 1.0).map_err(|e| e.to_string())?;
    let nf = normalize(&lt, &lh.degree_range(3, 4), &nparams).map_err(|e| e.to_string())?;
    let non_action = nf.z.terms().filter(|(mono, _)| !mono.is_action_only()).count();
    let part_b = format!("lattice NLS: {} Z terms, {non_action} depend on angles", nf.z.len());
    check(ratio >= 10.0 && non_action == 0 && !nf.z.is_zero(), format!("{part_a}; {part_b}"))
}

fn criterion_10() -> Outcome {
    let t0 = Instant::now();
    let params = PotentialParams { d: 2, r_amp: 1.0, m_decay: 2.0, ..Default::default() };
    let cfg = MeasureConfig {
        family: PotentialFamily::ConvolutionD,
        rule: ClassifyRule::for_family(PotentialFamily::ConvolutionD, &params),
        params,
        template: QueryTemplate { r: 3, n_cut: 2, alpha: 1.0, jmax: 4, node_cap: 500_000_000 },
        samples: 100,
        seed: 2024,
        gamma_grid: vec![1e-4, 1e-5, 1e-6, 1e-7],
    };
    let rep = measure_estimate(&cfg).map_err(|e| e.to_string())?;
    let fr: Vec<f64> = rep.rows.iter().map(|r| r.violation_fraction).collect();
    let monotone = fr.windows(2).all(|w| w[1] <= w[0]);
    let last = rep.rows.last().ok_or("empty report")?;
    let detail = format!(
        "fractions {fr:?}, smallest gamma: {} violating samples carry {} NONE hits, the rest only PAIR/SHELL ({}/{}), incomplete {}",
        last.violations, last.hits_none, last.hits_pair, last.hits_shell, rep.incomplete
    );
    // a sample violates exactly when it has a NONE hit, so every hit outside
    // the violating samples is exempt
    let exempt = (last.hits_none == 0) == (last.violations == 0);
    let ok = monotone && last.violation_fraction <= 0.05 && exempt && rep.incomplete == 0;
    within(t0, Duration::from_secs(300), detail).and_then(|d| check(ok, d))
}

fn criterion_11() -> Outcome {
    let n = nstar(1, 1.0, 0.01);
    let s = sstar(2, 1.0);
    let r = rstar_radius(1.0, 1, 10, 1.0, 1.0);
    let want = 1.0 / (240.0 * std::f64::consts::E);
    check(n == 10 && s == 10.0 && r == want, format!("nstar {n}, sstar {s}, rstar {r:.6e} vs 1/(240e) {want:.6e}"))
}

fn main() {
    // `cargo test -- --list` and friends pass flags; there are no named tests
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("homological identity", criterion_1),
        ("bracket algebra", criterion_2),
        ("canonicity and transport roundtrip", criterion_3),
        ("pruned = exhaustive enumeration", criterion_4),
        ("spectral exactness", criterion_5),
        ("transform displacement scaling", criterion_6),
        ("tail remainder scaling", criterion_7),
        ("action drift scaling", criterion_8),
        ("pair and lattice patterns", criterion_9),
        ("Monte Carlo measure trend", criterion_10),
        ("parameter formulas", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
