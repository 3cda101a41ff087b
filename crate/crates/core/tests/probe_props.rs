use pnf_core::bnb::SolverLimits;
use pnf_core::generator::{generate, GenSpec, Preset};
use pnf_core::model::FEASIBILITY_TOL;
use pnf_core::probe::{probe, ProbingData};
use pnf_core::sos1::detect_sos1;

fn run(seed: u64, nodes: u64) -> ProbingData {
    let (m, _) = generate(&GenSpec::preset(Preset::B, seed)).unwrap();
    let sets = detect_sos1(&m);
    let mut d = probe(&m, &sets, &SolverLimits::nodes(nodes), 0).unwrap();
    d.wall_time = 0.0;
    d
}

#[test]
fn class_matrix_is_rectangular() {
    for seed in 0..10 {
        let (m, _) = generate(&GenSpec::preset(Preset::B, seed)).unwrap();
        let sets = detect_sos1(&m);
        let d = probe(&m, &sets, &SolverLimits::nodes(40), 0).unwrap();
        assert_eq!(d.constraints.len(), sets.len());
        let n = d.observations();
        assert!(n >= 1 && n as u64 <= d.nodes);
        assert_eq!(d.node_indices[0], 0);
        assert!(d.node_indices.windows(2).all(|w| w[0] < w[1]));
        for (cv, set) in d.constraints.iter().zip(&sets) {
            assert_eq!(cv.classes.len(), n);
            assert_eq!(cv.name, set.name);
            assert!(cv.classes.iter().all(|&k| (k as usize) < set.num_classes()));
        }
        assert_eq!(d.root_lp.as_ref().unwrap().len(), m.num_vars());
    }
}

#[test]
fn incumbent_classes_follow_the_incumbent() {
    for seed in 0..10 {
        let (m, _) = generate(&GenSpec::preset(Preset::B, seed)).unwrap();
        let sets = detect_sos1(&m);
        let d = probe(&m, &sets, &SolverLimits::nodes(60), 0).unwrap();
        let Some(inc) = &d.incumbent else { continue };
        assert!(m.is_feasible(&inc.values, FEASIBILITY_TOL));
        let classes = d.incumbent_classes.as_ref().unwrap();
        for (set, &k) in sets.iter().zip(classes) {
            // Exactly one member is active, and it is the recorded class.
            assert_eq!(set.active_class(&inc.values), Some(k as usize));
        }
        assert!(d.incumbent_node.unwrap() < d.nodes);
    }
}

#[test]
fn shorter_probe_is_a_prefix() {
    for seed in 0..6 {
        let short = run(seed, 15);
        let long = run(seed, 60);
        let n = short.observations();
        assert_eq!(short.node_indices[..], long.node_indices[..n]);
        for (a, b) in short.constraints.iter().zip(&long.constraints) {
            assert_eq!(a.classes[..], b.classes[..n]);
        }
        assert_eq!(short.root_lp, long.root_lp);
    }
}

#[test]
fn probing_is_deterministic() {
    for seed in 0..6 {
        let a = run(seed, 50);
        let b = run(seed, 50);
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let back: ProbingData = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
    }
}
