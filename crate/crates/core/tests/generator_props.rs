mod common;

use common::enumerate_binary_optimum;
use pnf_core::bnb::{solve_quiet, SolveStatus, SolverLimits};
use pnf_core::generator::{generate, GenSpec, Preset};
use pnf_core::model::FEASIBILITY_TOL;
use pnf_core::mps::write_mps;
use pnf_core::sos1::detect_sos1;

fn spec(seed: u64, n_sets: usize, cmax: usize, tightness: f64) -> GenSpec {
    GenSpec {
        seed,
        n_sets,
        classes_min: 2,
        classes_max: cmax,
        n_resources: 1 + (seed % 3) as usize,
        tightness,
        cost_noise: 4.0,
        link_probability: 0.3,
    }
}

#[test]
fn planted_solution_is_feasible_and_sets_are_found() {
    for seed in 0..60 {
        for s in [spec(seed, 1 + (seed % 12) as usize, 2 + (seed % 4) as usize, 0.2 + 0.01 * seed as f64), GenSpec::preset(Preset::B, seed)] {
            let (m, man) = generate(&s).unwrap();
            assert!(m.is_feasible(&man.planted_values, FEASIBILITY_TOL), "seed {seed}");
            assert_eq!(detect_sos1(&m).len(), s.n_sets, "seed {seed}");
            assert_eq!(man.planted_objective, m.objective_value(&man.planted_values).unwrap());
        }
    }
}

#[test]
fn same_seed_gives_identical_mps() {
    for seed in 0..20 {
        let s = GenSpec::preset(Preset::B, seed);
        assert_eq!(write_mps(&generate(&s).unwrap().0), write_mps(&generate(&s).unwrap().0));
    }
    let a = write_mps(&generate(&GenSpec::preset(Preset::B, 1)).unwrap().0);
    let b = write_mps(&generate(&GenSpec::preset(Preset::B, 2)).unwrap().0);
    assert_ne!(a, b);
}

#[test]
fn small_instances_match_enumeration() {
    let mut specs: Vec<GenSpec> = (0..30).map(|s| GenSpec::preset(Preset::A, s)).collect();
    specs.extend((0..10).map(|s| spec(s, 6, 2, 0.4)));
    for s in specs {
        let (m, man) = generate(&s).unwrap();
        assert!(m.num_binaries() <= 12);
        let oracle = enumerate_binary_optimum(&m).expect("planted point is feasible");
        assert!(oracle <= man.planted_objective + 1e-9);
        let r = solve_quiet(&m, &SolverLimits::nodes(100_000), 0).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective().unwrap() - oracle).abs() <= 1e-6, "{}", man.instance);
    }
}

#[test]
fn desk_scale_instances_solve_to_optimality() {
    for n_sets in 1..=8 {
        for seed in 0..4 {
            let s = spec(seed, n_sets, 3, 0.7);
            let (m, _) = generate(&s).unwrap();
            let r = solve_quiet(&m, &SolverLimits::nodes(20_000), 0).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal, "{}", s.instance_name());
        }
    }
}
