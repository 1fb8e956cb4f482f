mod common;

use common::fixtures;
use sqzlift_core::algebra::SectionChoice;
use sqzlift_core::obstruction::{classify_lifts, section_invariant};
use sqzlift_core::oracle::brute_force_lifts;
use sqzlift_core::resolve::{free_resolution, Strategy};

#[test]
fn solver_agrees_with_oracle() {
    for inst in fixtures() {
        let t = std::time::Instant::now();
        let rep = classify_lifts(&inst.datum, &inst.input, 4, 64).unwrap();
        let Some(m) = inst.module() else { continue };
        let found = brute_force_lifts(&inst.datum, m, 16).unwrap();
        println!(
            "{}: obstructed={} classes={} ext1={:?} oracle iso={} pairs={} nonzero_tor={:?} {:?}",
            inst.name,
            rep.obstructed,
            rep.class_count(),
            rep.ext1.as_ref().map(|g| g.to_string()),
            found.iso_classes(),
            found.pair_count(),
            found.nonzero_tor,
            t.elapsed()
        );
        if found.exists() {
            assert!(!rep.obstructed, "{}", inst.name);
        }
        match found.nonzero_tor {
            None => {
                assert_eq!(!rep.obstructed, found.exists(), "{}", inst.name);
                assert_eq!(rep.class_count(), found.pair_count(), "{}", inst.name);
            }
            Some(i) => assert!(rep.tor.nonzero.contains(&(i as i64)), "{}", inst.name),
        }
    }
}

#[test]
fn obstruction_class_ignores_the_section() {
    for inst in fixtures() {
        let res = free_resolution(&inst.input, 4, Strategy::Greedy).unwrap();
        for seed in [1, 7, 42] {
            assert!(section_invariant(&inst.datum, &res, SectionChoice::Seeded(seed)).unwrap(), "{} seed {seed}", inst.name);
        }
    }
}
