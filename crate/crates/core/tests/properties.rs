use proptest::prelude::*;

use qlinear::binom::choose2;
use qlinear::codegree::exact_codegree;
use qlinear::experiment::trace_csv;
use qlinear::hypergraph::{LinearHypergraph, SearchBudget, Vertex};
use qlinear::oracle::{
    absolute_bound_check, bruteforce_available, bruteforce_codegree, build_packing_instance,
    expected_delta_bruteforce, expected_delta_formula, identities, packing_equivalence,
    proposition_bounds, IdentityKind,
};
use qlinear::process::{run, run_to_maximal, ProcessConfig, ProcessState, RejectionCap};
use qlinear::rng;
use qlinear::{StopRule, TrajectoryParams};

/// The state after `frac` of the way through a maximal run.
fn partial(n: usize, q: usize, seed: u64, frac: f64) -> LinearHypergraph {
    let full = run_to_maximal(n, q, seed).unwrap();
    let k = ((full.edge_count() as f64) * frac).floor() as usize;
    let edges: Vec<Vec<Vertex>> = full.edges().take(k).map(<[Vertex]>::to_vec).collect();
    LinearHypergraph::from_edges(n, q, &edges).unwrap()
}

fn small_state() -> impl Strategy<Value = LinearHypergraph> {
    (3usize..=10, 2usize..=5, any::<u64>(), 0.0..1.0f64)
        .prop_filter("q <= n", |(n, q, _, _)| q <= n)
        .prop_map(|(n, q, seed, frac)| partial(n, q, seed, frac))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn availability_three_ways(h in small_state()) {
        let brute = bruteforce_available(&h);
        let flat = h.available_sets(&mut SearchBudget::unlimited()).unwrap();
        let mut listed: Vec<Vec<Vertex>> = flat.chunks_exact(h.q()).map(<[Vertex]>::to_vec).collect();
        listed.sort();
        prop_assert_eq!(&listed, &brute);
        for e in &brute {
            prop_assert!(h.pairs_free(e));
            prop_assert!(h.is_available(e).unwrap());
        }
        prop_assert_eq!(h.count_available(&mut SearchBudget::unlimited()).unwrap(), brute.len() as u128);
    }

    #[test]
    fn coverage_counts_edges(h in small_state()) {
        prop_assert_eq!(h.coverage().covered_count() as u64, h.edge_count() as u64 * choose2(h.q() as u64));
        prop_assert!(h.validate().is_ok());
    }

    #[test]
    fn maximal_iff_nothing_available(h in small_state()) {
        let count = h.count_available(&mut SearchBudget::unlimited()).unwrap();
        prop_assert_eq!(h.is_maximal(&mut SearchBudget::unlimited()).unwrap(), count == 0);
    }

    #[test]
    fn exact_codegree_matches_enumeration(h in small_state(), pick in any::<u64>()) {
        let mut r = rng::stream(pick, 0);
        let mut set = Vec::new();
        for j in 0..h.q() {
            rng::sample_subset(&mut r, h.n() as u32, j, &mut set);
            let exact = exact_codegree(&h, &set, &mut SearchBudget::unlimited()).unwrap();
            prop_assert_eq!(exact, u128::from(bruteforce_codegree(&h, &set)));
        }
    }

    #[test]
    fn expected_change_formula(n in 5usize..=8, q in 3usize..=4, seed in any::<u64>(), frac in 0.0..1.0f64, pick in any::<u64>()) {
        let h = partial(n, q, seed, frac);
        prop_assume!(!h.is_maximal(&mut SearchBudget::unlimited()).unwrap());
        let mut r = rng::stream(pick, 0);
        let mut set = Vec::new();
        let j = rng::below(&mut r, q as u64) as usize;
        rng::sample_subset(&mut r, n as u32, j, &mut set);
        prop_assert_eq!(expected_delta_formula(&h, &set).unwrap(), expected_delta_bruteforce(&h, &set).unwrap());
        // the chosen edge always removes itself
        let minus_one = num_rational::BigRational::from_integer((-1).into());
        prop_assert!(expected_delta_bruteforce(&h, &[]).unwrap() <= minus_one);
    }

    #[test]
    fn one_step_change_is_bounded(n in 5usize..=10, q in 3usize..=5, seed in any::<u64>(), frac in 0.0..1.0f64, pick in any::<u64>()) {
        prop_assume!(q <= n);
        let h = partial(n, q, seed, frac);
        let avail = bruteforce_available(&h);
        prop_assume!(!avail.is_empty());
        let mut r = rng::stream(pick, 0);
        let e = &avail[rng::below(&mut r, avail.len() as u64) as usize];
        let mut set = Vec::new();
        let j = rng::below(&mut r, q as u64) as usize;
        rng::sample_subset(&mut r, n as u32, j, &mut set);
        prop_assert!(absolute_bound_check(&h, &set, e).unwrap().holds);
    }

    #[test]
    fn identities_hold(k in 2u64..=64, l in 2u64..=64) {
        prop_assert_eq!(identities(IdentityKind::A, k, l).unwrap(), 1.into());
        prop_assert_eq!(identities(IdentityKind::B, k, l).unwrap(), 1.into());
        prop_assert_eq!(identities(IdentityKind::C, k, l).unwrap(), 0.into());
    }

    #[test]
    fn maximal_runs_meet_bounds(n in 2usize..=14, q in 2usize..=7, seed in any::<u64>()) {
        prop_assume!(q <= n);
        let h = run_to_maximal(n, q, seed).unwrap();
        prop_assert!(h.is_maximal(&mut SearchBudget::unlimited()).unwrap());
        let r = proposition_bounds(n as u64, q as u64, h.edge_count() as u64, true).unwrap();
        prop_assert!(r.all_hold(), "{:?}", r);
    }

    #[test]
    fn packing_matches_linear_process(n in 3usize..=8, q in 2usize..=4, seed in any::<u64>()) {
        prop_assume!(q <= n);
        let instance = build_packing_instance(n, q).unwrap();
        let h = run_to_maximal(n, q, seed).unwrap();
        let seq: Vec<Vec<Vertex>> = h.edges().map(<[Vertex]>::to_vec).collect();
        prop_assert!(packing_equivalence(&instance, &seq).unwrap().holds);
    }

    #[test]
    fn epsilon_over_y_is_common(n in 16u64..100_000, q in 3u64..=6, rel in 0.0..=1.0f64) {
        prop_assume!(q <= n);
        let p = TrajectoryParams::new(n, q).unwrap();
        let pt = p.eval_curves((p.t_max() * rel).min(p.t_max())).unwrap();
        let want = p.ln_relative_envelope(pt.ln_p);
        for j in 0..q as usize {
            let got = pt.ln_eps[j] - pt.ln_y[j];
            prop_assert!(((got - want).exp() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn m0_inequality(n in 16u64..2_000, q in 3u64..=6) {
        prop_assume!(q <= n);
        let p = TrajectoryParams::new(n, q).unwrap();
        let rate = (q * (q - 1)) as f64;
        let cap = (n * (n - 1)) as f64 * (1.0 - (n as f64).powf(-p.beta));
        prop_assert!(rate * p.m0 as f64 <= cap * (1.0 + 1e-12));
        prop_assert!(cap < rate * (p.m0 + 1) as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn derivative_matches_finite_difference(n in 16u64..50_000, q in 3u64..=5, rel in 0.0..0.9f64) {
        prop_assume!(q <= n);
        let p = TrajectoryParams::new(n, q).unwrap();
        let t = p.t_max() * rel;
        let delta = 1e-8 / (q * (q - 1)) as f64;
        prop_assume!(t + delta <= p.t_max());
        let a = p.eval_curves(t).unwrap();
        let b = p.eval_curves(t + delta).unwrap();
        for j in 0..q as usize {
            let fd = (b.y(j) - a.y(j)) / delta;
            let exact = a.dy[j].value();
            prop_assert!(((fd - exact) / exact).abs() < 1e-6, "j={} fd={} exact={}", j, fd, exact);
            prop_assert!(a.dy[j].negative);
            prop_assert!(!a.deps[j].negative);
        }
    }
}

#[test]
fn available_count_never_grows() {
    for (n, q, seed) in [(20, 3, 1), (15, 4, 2), (12, 5, 3)] {
        let mut state = ProcessState::new(n, q, seed, RejectionCap::Adaptive).unwrap();
        let mut last = u128::MAX;
        loop {
            let k = state
                .hypergraph()
                .count_available(&mut SearchBudget::unlimited())
                .unwrap();
            assert!(k <= last);
            last = k;
            if state.advance().is_none() {
                break;
            }
        }
        assert_eq!(last, 0);
    }
}

#[test]
fn same_seed_same_trace() {
    let mut config = ProcessConfig::new(40, 4, 9, StopRule::M0);
    config.checkpoint_stride = Some(3);
    let a = trace_csv(&run(&config).unwrap().1);
    let b = trace_csv(&run(&config).unwrap().1);
    assert_eq!(a, b);
    config.seed = 10;
    assert_ne!(a, trace_csv(&run(&config).unwrap().1));
}

#[test]
fn estimates_sit_within_three_standard_errors() {
    let h = partial(60, 3, 4, 0.4);
    let exact = h.count_available(&mut SearchBudget::unlimited()).unwrap() as f64;
    let state = ProcessState::from_hypergraph(h, 0, RejectionCap::Adaptive).unwrap();
    let mut inside = 0;
    for seed in 0..100 {
        let mut r = rng::stream(seed, rng::DIAGNOSTIC_STREAM);
        let est = state.estimate_available(20_000, &mut r).unwrap();
        inside += u32::from((est.value - exact).abs() <= 3.0 * est.std_error);
    }
    // about 99.7 expected
    assert!(inside >= 95, "{inside}/100");
}
