use proptest::prelude::*;

use blindq::estimators::{lindley_walk, regen_mean_sojourn, tail_split, AnalysisParams};
use blindq::instance::pow2;
use blindq::policies::beta_from_uniform;
use blindq::simulator::{brute_force_min_flow, simulate_with, SimOptions, BRUTE_FORCE_MAX_JOBS};
use blindq::verify::coupling_deviation;
use blindq::{simulate, DistributionSpec, Instance, PolicyKind, RandomStream};

const TOL: f64 = 1e-9;

fn instance(max_jobs: usize) -> impl Strategy<Value = Instance> {
    prop::collection::vec((0.001f64..3.0, 0.01f64..5.0), 1..=max_jobs).prop_map(|pairs| {
        let mut t = 0.0;
        let pairs: Vec<(f64, f64)> = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (gap, size))| {
                if i > 0 {
                    t += gap;
                }
                (t, size)
            })
            .collect();
        Instance::from_pairs(pairs).unwrap()
    })
}

fn scale_of(inst: &Instance) -> f64 {
    inst.jobs().last().unwrap().release + inst.total_work()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn srpt_minimizes_total_flow(inst in instance(25), seed in any::<u64>()) {
        let srpt = simulate(&inst, PolicyKind::Srpt, seed).unwrap().total_flow();
        for policy in PolicyKind::BLIND {
            let flow = simulate(&inst, policy, seed).unwrap().total_flow();
            prop_assert!(srpt <= flow + TOL * inst.len() as f64 * scale_of(&inst), "{policy}: {srpt} > {flow}");
        }
    }

    #[test]
    fn srpt_matches_exhaustive_search(inst in instance(BRUTE_FORCE_MAX_JOBS)) {
        let srpt = simulate(&inst, PolicyKind::Srpt, 0).unwrap().total_flow();
        let best = brute_force_min_flow(&inst).unwrap();
        prop_assert!((srpt - best).abs() <= TOL * scale_of(&inst) * inst.len() as f64);
    }

    #[test]
    fn every_policy_keeps_the_server_busy_exactly_when_work_exists(inst in instance(30), seed in any::<u64>()) {
        let expected = inst.busy_periods();
        for policy in PolicyKind::ALL {
            let r = simulate(&inst, policy, seed).unwrap();
            let got = r.busy_intervals();
            prop_assert_eq!(got.len(), expected.len());
            for ((s, e), c) in got.iter().zip(&expected) {
                prop_assert!((s - c.start).abs() <= TOL && (e - c.end).abs() <= TOL * scale_of(&inst));
            }
        }
    }

    #[test]
    fn sojourns_positive_and_cycles_dominated(inst in instance(30), seed in any::<u64>()) {
        for policy in PolicyKind::ALL {
            let r = simulate(&inst, policy, seed).unwrap();
            for j in &r.jobs {
                prop_assert!(j.sojourn > 0.0);
                prop_assert!(j.completion >= j.release + j.size - TOL * scale_of(&inst));
            }
            for c in &r.cycles {
                let bound = c.record.n as f64 * c.record.p;
                prop_assert!(c.sojourn_sum <= bound * (1.0 + TOL), "{policy}: {} > {bound}", c.sojourn_sum);
            }
        }
    }

    #[test]
    fn extended_rmlf_is_rescaled_rmlf(inst in instance(30), seed in any::<u64>()) {
        prop_assert!(coupling_deviation(&inst, seed).unwrap() <= TOL);
    }

    #[test]
    fn coupling_with_tiny_jobs(inst in instance(20), shrink in 1i32..60, seed in any::<u64>()) {
        let tiny = inst.scale(pow2(-shrink)).unwrap();
        prop_assert!(coupling_deviation(&tiny, seed).unwrap() <= TOL);
    }

    #[test]
    fn multilevel_queues_stay_in_release_order(inst in instance(40), seed in any::<u64>()) {
        let opts = SimOptions { check_invariants: true, record_events: false };
        for policy in [PolicyKind::Mlf, PolicyKind::Rmlf, PolicyKind::Ermlf] {
            let mut sched = policy.scheduler(seed);
            prop_assert!(simulate_with(&inst, sched.as_mut(), seed, opts).is_ok(), "{policy}");
        }
    }

    #[test]
    fn simulation_is_deterministic(inst in instance(30), seed in any::<u64>()) {
        for policy in PolicyKind::ALL {
            let a = serde_json::to_string(&simulate(&inst, policy, seed).unwrap()).unwrap();
            let b = serde_json::to_string(&simulate(&inst, policy, seed).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn lindley_walk_matches_simulated_workload(inst in instance(40)) {
        let walk = lindley_walk(&inst);
        let r = simulate(&inst, PolicyKind::Fifo, 0).unwrap();
        for (w, j) in walk.workload.iter().zip(&r.jobs) {
            prop_assert!(*w >= 0.0);
            prop_assert!((w - j.workload_at_arrival).abs() <= TOL * scale_of(&inst));
        }
    }

    #[test]
    fn busy_periods_scale_with_the_instance(inst in instance(30), e in -10i32..10) {
        let factor = pow2(e);
        let a = inst.busy_periods();
        let b = inst.scale(factor).unwrap().busy_periods();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.n, y.n);
            prop_assert!((x.p * factor - y.p).abs() <= TOL * y.p.max(1.0));
            match (x.idle, y.idle) {
                (Some(i), Some(j)) => prop_assert!((i * factor - j).abs() <= TOL * j.max(1.0)),
                (None, None) => {}
                _ => prop_assert!(false, "idle mismatch"),
            }
        }
    }

    #[test]
    fn busy_periods_conserve_work(inst in instance(40)) {
        for c in inst.busy_periods() {
            let work: f64 = inst.jobs()[c.first_job - 1..c.last_job].iter().map(|j| j.size).sum();
            prop_assert!((work - c.p).abs() <= TOL * work.max(1.0));
            prop_assert_eq!(c.n, c.last_job - c.first_job + 1);
        }
    }

    #[test]
    fn tail_split_partitions_the_mean(inst in instance(40), zeta in 14.1f64..30.0, rho in 0.3f64..0.95) {
        // a late job guarantees a second busy period
        let late = scale_of(&inst) + 1.0;
        let pairs = inst.jobs().iter().map(|j| (j.release, j.size)).chain([(late, 1.0)]);
        let inst = Instance::from_pairs(pairs).unwrap();
        let r = simulate(&inst, PolicyKind::Ermlf, 1).unwrap();
        let params = AnalysisParams::new(f64::INFINITY, 1.5, zeta).unwrap();
        let split = tail_split(&r, &params, rho).unwrap();
        let mean = regen_mean_sojourn(&r).unwrap().point;
        prop_assert!((split.total() - mean).abs() <= 1e-12 * mean);
    }

    #[test]
    fn beta_factor_in_unit_octave(j in 1usize..100_000, u in 0.0f64..1.0) {
        let f = beta_from_uniform(j, u);
        prop_assert!((1.0..=2.0).contains(&f.factor));
    }

    #[test]
    fn streams_replay(seed in any::<u64>(), sub in 0u64..4) {
        let spec = DistributionSpec::exponential_with_mean(1.0);
        let mut a = RandomStream::new(seed, sub);
        let mut b = RandomStream::new(seed, sub);
        for _ in 0..16 {
            prop_assert_eq!(spec.sample(&mut a).unwrap(), spec.sample(&mut b).unwrap());
        }
    }
}
