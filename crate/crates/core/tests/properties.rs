use koopman_dh::edmd::residual_sq;
use koopman_dh::exact::{ri, rat};
use koopman_dh::lift::closing::closing_holds_over;
use koopman_dh::modular::{is_prime, primitive_roots};
use koopman_dh::spectral::to_complex;
use koopman_dh::*;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::sample::select;

fn primes(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|&n| is_prime(&BigUint::from(n))).collect()
}

fn big(n: u32) -> BigUint {
    BigUint::from(n)
}

fn params(p: u32) -> DhParams {
    DhParams::with_smallest_root(p).unwrap()
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

// modular dynamics

#[test]
fn orbit_is_a_permutation_for_small_primes() {
    for p in primes(5, 199) {
        let pr = params(p);
        let traj = simulate(pr.m(), &pr, &BigUint::one(), (p - 1) as usize).unwrap();
        let mut seen = vec![false; p as usize];
        for v in &traj.values()[..(p - 1) as usize] {
            let i: usize = v.try_into().unwrap();
            assert!(!seen[i], "p={p} repeats {i}");
            seen[i] = true;
        }
        assert!(seen[1..].iter().all(|&b| b));
        assert_eq!(traj.values()[(p - 1) as usize], BigUint::one());
    }
}

#[test]
fn smallest_root_is_a_non_residue() {
    for p in primes(5, 199) {
        let m = find_primitive_root(&big(p)).unwrap();
        assert_eq!(euler_criterion(&m, &big(p)).unwrap(), Residuosity::NonResidue);
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn periodicity(p in select(primes(5, 199)), k in 0usize..1000) {
        let pr = params(p);
        let traj = simulate(pr.m(), &pr, &BigUint::one(), k).unwrap();
        prop_assert_eq!(&traj.values()[k], &traj.values()[k % (p as usize - 1)]);
    }

    #[test]
    fn discrete_log_round_trip(p in select(primes(5, 199)), e_seed in 0u32..10_000) {
        let pr = params(p);
        let e = big(e_seed % (p - 1) + 1);
        let c = mod_pow(pr.m(), &e, pr.p()).unwrap();
        prop_assert_eq!(discrete_log_bruteforce(&c, &pr).unwrap(), e);
    }

    #[test]
    fn mod_pow_matches_repeated_multiplication(b in 0u32..500, e in 0u32..200, p in 2u32..500) {
        let mut acc = 1u64 % p as u64;
        for _ in 0..e {
            acc = acc * b as u64 % p as u64;
        }
        prop_assert_eq!(mod_pow(&big(b), &big(e), &big(p)).unwrap(), BigUint::from(acc));
    }

    #[test]
    fn intersection_returns_the_shared_secret(
        p in select(primes(5, 31)), e_seed in 0u32..1000, d_seed in 0u32..1000
    ) {
        let pr = params(p);
        let (e, d) = (big(e_seed % (p - 1) + 1), big(d_seed % (p - 1) + 1));
        let t = dh_exchange(&pr, &e, &d).unwrap();
        let hit = shared_secret_intersection(&t.c_e, &t.c_d, &pr).unwrap();
        prop_assert_eq!(&hit.secret, &t.c_ed);
        prop_assert_eq!(mod_pow(pr.m(), &(&hit.e * &hit.d), pr.p()).unwrap(), t.c_ed);
    }
}

// koopman lift

#[test]
fn canonical_alpha_closes_exactly() {
    for p in primes(5, 199) {
        let pr = params(p);
        let traj = pr.base_trajectory().unwrap();
        let alpha = canonical_alpha(pr.p(), pr.half_period().unwrap()).unwrap();
        assert!(verify_closing(&traj, &alpha), "p={p}");
    }
}

#[test]
fn below_minimal_order_no_integer_closing() {
    for p in primes(5, 61) {
        let pr = params(p);
        let traj = pr.base_trajectory().unwrap();
        let half = pr.half_period().unwrap();
        for q in 0..half {
            match solve_alpha_exact(&hankel_system(&traj, q).unwrap()).unwrap() {
                Solution::Unsolvable { .. } => {}
                Solution::Solved { x, .. } => assert!(!verify_closing(&traj, &x), "p={p} q={q}"),
            }
        }
        if half >= 1 {
            // the mod-p-only candidate at q̃−1
            let mut alpha = vec![BigRational::zero(); half];
            alpha[0] = ri(-1);
            assert!(!verify_closing(&traj, &alpha));
            let n = pr.period().unwrap();
            let p_big = BigInt::from(p);
            for k in 0..n {
                let lhs = BigInt::from(traj.state(k + half));
                let rhs = -BigInt::from(traj.state(k));
                assert_eq!(((lhs - rhs) % &p_big), BigInt::zero());
            }
        }
    }
}

#[test]
fn companion_powers_reproduce_trajectory() {
    for p in primes(5, 61) {
        let pr = params(p);
        let traj = pr.base_trajectory().unwrap();
        let half = pr.half_period().unwrap();
        let sys = CompanionSystem::new(canonical_alpha(pr.p(), half).unwrap()).unwrap();
        let mut z: Vec<BigRational> = lift_shift(&traj, half, 0).iter().map(rat).collect();
        for k in 0..=2 * (p as usize - 1) {
            assert_eq!(z[0], rat(&traj.state(k)), "p={p} k={k}");
            z = sys.step(&z).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn ciphertext_lift_matches_shift_lift(p in select(primes(5, 199)), e_seed in 0u32..10_000, q_seed in 0usize..400) {
        let pr = params(p);
        let e = e_seed % (p - 1) + 1;
        let q = q_seed % (p as usize - 1);
        let traj = pr.base_trajectory().unwrap();
        let c = mod_pow(pr.m(), &big(e), pr.p()).unwrap();
        prop_assert_eq!(lift_ciphertext(&c, &pr, q).unwrap(), lift_shift(&traj, q, e as usize));
    }

    #[test]
    fn complex_dictionary_shift_property(p in select(primes(5, 199)), x_seed in 0u32..10_000, q in 1usize..20) {
        let pr = params(p);
        let x = big(x_seed % (p - 1) + 1);
        let mx = pr.m() * &x % pr.p();
        let hx = lift_complex(&x, &pr, q).unwrap();
        let hmx = lift_complex(&mx, &pr, q).unwrap();
        for j in 0..q {
            prop_assert_eq!(&hmx[j], &hx[j + 1]);
        }
    }

    #[test]
    fn closing_over_two_periods_any_root(p in select(primes(5, 97)), r_seed in 0usize..1000) {
        let roots = primitive_roots(&big(p)).unwrap();
        let m = roots[r_seed % roots.len()].clone();
        let pr = DhParams::new(big(p), m).unwrap();
        let traj = pr.base_trajectory().unwrap();
        let alpha = canonical_alpha(pr.p(), pr.half_period().unwrap()).unwrap();
        prop_assert!(closing_holds_over(&traj, &alpha, 2 * (p as usize - 1)));
    }
}

// spectral recovery

fn lifted(pr: &DhParams, e: usize) -> Vec<Complex64> {
    let traj = pr.base_trajectory().unwrap();
    to_complex(&lift_shift(&traj, pr.half_period().unwrap(), e))
}

#[test]
fn eigenpair_residuals_vanish() {
    for p in primes(5, 199) {
        let pr = params(p);
        let dec = eigen_canonical(pr.p(), pr.half_period().unwrap()).unwrap();
        assert!(dec.verify_eigenpairs_exact().unwrap(), "p={p}");
        assert!(dec.max_eigenpair_residual() <= 1e-9, "p={p}");
    }
}

#[test]
fn parity_for_three_mod_four() {
    for p in primes(5, 199) {
        let pr = params(p);
        let dec = eigen_canonical(pr.p(), pr.half_period().unwrap()).unwrap();
        let z0 = lifted(&pr, 0);
        for e in 1..p as usize {
            let got = parity(&lifted(&pr, e), &z0, &dec).unwrap();
            let want = if p % 4 == 1 {
                Parity::Unavailable
            } else if e % 2 == 0 {
                Parity::Even
            } else {
                Parity::Odd
            };
            assert_eq!(got, want, "p={p} e={e}");
        }
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn recovery_matches_oracle(p in select(primes(5, 199)), e_seed in 0u32..10_000) {
        let pr = params(p);
        let e = e_seed % (p - 1) + 1;
        let dec = eigen_canonical(pr.p(), pr.half_period().unwrap()).unwrap();
        let est = recover_exponent(&lifted(&pr, e as usize), &lifted(&pr, 0), &dec, pr.p()).unwrap();
        let c = mod_pow(pr.m(), &big(e), pr.p()).unwrap();
        prop_assert_eq!(&est.e, &discrete_log_bruteforce(&c, &pr).unwrap());
        prop_assert_eq!(est.e, big(e));
    }

    #[test]
    fn transformed_magnitudes_are_conserved(p in select(primes(5, 199)), e_seed in 0u32..10_000) {
        let pr = params(p);
        let e = (e_seed % (p - 1) + 1) as usize;
        let dec = eigen_canonical(pr.p(), pr.half_period().unwrap()).unwrap();
        let t0 = transform(&lifted(&pr, 0), &dec).unwrap();
        let te = transform(&lifted(&pr, e), &dec).unwrap();
        let scale = t0.entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (a, b) in te.entries.iter().zip(&t0.entries) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn recovery_is_scale_invariant(
        p in select(primes(5, 101)), e_seed in 0u32..10_000,
        re in -50.0f64..50.0, im in -50.0f64..50.0
    ) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let c = Complex64::new(re, im);
        let pr = params(p);
        let e = (e_seed % (p - 1) + 1) as usize;
        let dec = eigen_canonical(pr.p(), pr.half_period().unwrap()).unwrap();
        let (ze, z0) = (lifted(&pr, e), lifted(&pr, 0));
        let plain = recover_exponent(&ze, &z0, &dec, pr.p()).unwrap();
        let scaled: (Vec<_>, Vec<_>) = (ze.iter().map(|z| z * c).collect(), z0.iter().map(|z| z * c).collect());
        let got = recover_exponent(&scaled.0, &scaled.1, &dec, pr.p()).unwrap();
        prop_assert_eq!(got.e, plain.e);
    }
}

// edmd

#[test]
fn rank_law() {
    for p in primes(5, 61) {
        let pr = params(p);
        let traj = pr.base_trajectory().unwrap();
        let half = pr.half_period().unwrap();
        let n_max = p as usize - 1;
        let values: Vec<BigInt> = (0..3 * n_max + 2).map(|k| BigInt::from(traj.state(k))).collect();
        for q in half..=p as usize - 2 {
            for n in [half + 1, n_max, n_max + 3] {
                let ds = koopman_dh::edmd::dataset_from_sequence(&values, q, n).unwrap();
                assert_eq!(ds.rank_z, half + 1, "p={p} q={q} n={n}");
            }
        }
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn exact_fit_at_minimal_order(p in select(primes(5, 61)), extra in 0usize..10) {
        let pr = params(p);
        let half = pr.half_period().unwrap();
        let traj = simulate(pr.m(), &pr, &BigUint::one(), 3 * p as usize).unwrap();
        let ds = build_dataset(&traj, half, half + 1 + extra).unwrap();
        let fit = edmd_fit(&ds).unwrap();
        prop_assert_eq!(&fit.a_hat, &CompanionSystem::new(canonical_alpha(pr.p(), half).unwrap()).unwrap().matrix());
        prop_assert!(fit.residual_sq.is_zero());
    }

    #[test]
    fn underparameterized_residual_positive(p in select(primes(5, 61)), q_seed in 0usize..100) {
        let pr = params(p);
        let half = pr.half_period().unwrap();
        let q = q_seed % half;
        let traj = simulate(pr.m(), &pr, &BigUint::one(), 3 * p as usize).unwrap();
        let fit = edmd_fit(&build_dataset(&traj, q, p as usize - 1).unwrap()).unwrap();
        prop_assert!(fit.residual_sq > BigRational::zero());
    }

    #[test]
    fn least_squares_optimal_under_perturbation(
        p in select(primes(5, 23)), q_seed in 0usize..100, i_seed in 0usize..100, j_seed in 0usize..100, up in any::<bool>()
    ) {
        let pr = params(p);
        let q = q_seed % (p as usize - 1);
        let traj = simulate(pr.m(), &pr, &BigUint::one(), 3 * p as usize).unwrap();
        let ds = build_dataset(&traj, q, p as usize - 1).unwrap();
        let fit = edmd_fit(&ds).unwrap();
        let (i, j) = (i_seed % (q + 1), j_seed % (q + 1));
        let mut a = fit.a_hat.clone();
        let delta = BigRational::new(BigInt::from(if up { 1 } else { -1 }), BigInt::from(1000));
        a[(i, j)] = &a[(i, j)] + delta;
        prop_assert!(residual_sq(&ds, &a).unwrap() >= fit.residual_sq);
    }
}

// linear complexity

proptest! {
    #![proptest_config(cfg(128))]

    #[test]
    fn bm_agrees_with_bruteforce_over_q(v in prop::collection::vec(-4i64..5, 1..16)) {
        let seq = SequenceSample::from_integers(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(), FieldKind::Rational).unwrap();
        let bm = berlekamp_massey(&seq).unwrap();
        prop_assume!(bm.length <= 12);
        let bf = bruteforce_min_lfsr(&seq, 12).unwrap().unwrap();
        prop_assert_eq!(bm.length, bf.length);
        let regen = lfsr_generate(&bm.connection, &seq.terms()[..bm.length], v.len(), seq.field()).unwrap();
        prop_assert_eq!(regen.as_slice(), seq.terms());
    }

    #[test]
    fn bm_agrees_with_bruteforce_over_gf(
        v in prop::collection::vec(0i64..50, 1..16), p in select(vec![2u32, 3, 5, 7, 11])
    ) {
        let field = FieldKind::prime(p).unwrap();
        let seq = SequenceSample::from_integers(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(), field).unwrap();
        let bm = berlekamp_massey(&seq).unwrap();
        let bf = bruteforce_min_lfsr(&seq, 16).unwrap().unwrap();
        prop_assert_eq!(bm.length, bf.length);
        let regen = lfsr_generate(&bm.connection, &seq.terms()[..bm.length], v.len(), seq.field()).unwrap();
        prop_assert_eq!(regen.as_slice(), seq.terms());
    }

    #[test]
    fn planted_recurrence_is_found(
        taps in prop::collection::vec(-3i64..4, 1..6), seed_vals in prop::collection::vec(-5i64..6, 6)
    ) {
        let l = taps.len();
        let conn: Vec<BigRational> = taps.iter().map(|&t| ri(t)).collect();
        let seed: Vec<BigRational> = seed_vals[..l].iter().map(|&t| ri(t)).collect();
        let s = lfsr_generate(&conn, &seed, 4 * l + 2, &FieldKind::Rational).unwrap();
        let seq = SequenceSample::new(&s, FieldKind::Rational).unwrap();
        let bm = berlekamp_massey(&seq).unwrap();
        prop_assert!(bm.length <= l);
        prop_assert_eq!(bm.length, bruteforce_min_lfsr(&seq, 12).unwrap().unwrap().length);
    }
}

#[test]
fn rational_complexity_attains_koopman_dimension() {
    for p in primes(5, 61) {
        let r = compare_koopman_vs_lfsr(&params(p)).unwrap();
        assert_eq!(r.lfsr_length, (p as usize - 1) / 2 + 1, "p={p}");
        assert!(r.equal);
    }
}
