mod common;

use std::sync::Arc;

use common::fixtures;
use sqzlift_core::algebra::FiniteAlgebra;
use sqzlift_core::exactlin::ints;
use sqzlift_core::modcx::{ChainComplex, FinModule, ModuleMap, TensorProduct};
use sqzlift_core::oracle::{oracle_ext, OracleError};
use sqzlift_core::resolve::{compare_lift, ext_group, hyper_ext, resolve_module, syzygy, tor_modules, Strategy};

/// `(M, J ⊗_S M)` for every module fixture.
fn corpus_pairs() -> Vec<(String, FinModule, FinModule)> {
    fixtures()
        .into_iter()
        .filter_map(|inst| {
            let m = inst.module()?.clone();
            let t = TensorProduct::new(inst.datum.j(), &m).unwrap().module().clone();
            Some((inst.name, m, t))
        })
        .collect()
}

fn small_cases() -> Vec<(String, FinModule, FinModule, usize)> {
    let z4 = Arc::new(FiniteAlgebra::zmod(4));
    let z9 = Arc::new(FiniteAlgebra::zmod(9));
    let z8 = Arc::new(FiniteAlgebra::zmod(8));
    let dual = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
    let k4 = FinModule::cyclic_quotient(z4.clone(), &[ints(&[2])]);
    let k9 = FinModule::cyclic_quotient(z9.clone(), &[ints(&[3])]);
    let z8_2 = FinModule::cyclic_quotient(z8.clone(), &[ints(&[2])]);
    let z8_4 = FinModule::cyclic_quotient(z8.clone(), &[ints(&[4])]);
    let kd = FinModule::cyclic_quotient(dual.clone(), &[ints(&[0, 1])]);
    let sd = FinModule::free(dual.clone(), 1);
    let mut out = Vec::new();
    for i in 0..=2 {
        out.push((format!("Z/4: Z/2, Z/2, {i}"), k4.clone(), k4.clone(), i));
        out.push((format!("dual: k, k, {i}"), kd.clone(), kd.clone(), i));
    }
    out.push(("Z/9: Z/3, Z/3, 1".into(), k9.clone(), k9, 1));
    out.push(("Z/8: Z/2, Z/4, 1".into(), z8_4.clone(), z8_2.clone(), 1));
    out.push(("Z/8: Z/4, Z/2, 2".into(), z8_2, z8_4, 2));
    out.push(("dual: k, S, 1".into(), kd.clone(), sd.clone(), 1));
    out.push(("dual: S, k, 1".into(), sd, kd, 1));
    out
}

#[test]
fn ext_matches_cochain_enumeration() {
    let mut compared = 0;
    let mut cases = small_cases();
    for (name, m, t) in corpus_pairs() {
        for i in 0..=2 {
            cases.push((format!("{name}: M, J⊗M, {i}"), m.clone(), t.clone(), i));
        }
    }
    for (name, m, n, i) in cases {
        let expected = match oracle_ext(m.algebra(), &m, &n, i) {
            Ok(g) => g,
            Err(OracleError::BudgetExceeded { .. }) => continue,
            Err(e) => panic!("{name}: {e}"),
        };
        assert_eq!(ext_group(&m, &n, i).unwrap().group(), &expected, "{name}");
        compared += 1;
    }
    println!("{compared} comparisons");
    assert!(compared >= 10, "only {compared} comparisons");
}

#[test]
fn listed_ext_and_tor_values() {
    let z4 = Arc::new(FiniteAlgebra::zmod(4));
    let k = FinModule::cyclic_quotient(z4.clone(), &[ints(&[2])]);
    assert_eq!(ext_group(&k, &k, 1).unwrap().group().to_string(), "Z/2");
    assert_eq!(ext_group(&k, &k, 2).unwrap().group().to_string(), "Z/2");
    let j = sqzlift_core::algebra::Bimodule::quotient_of_regular(z4.clone(), &[ints(&[2])]);
    assert_eq!(tor_modules(&j, &k, 1).unwrap().to_string(), "Z/2");
    let regular = sqzlift_core::algebra::Bimodule::regular(z4.clone());
    assert!(tor_modules(&regular, &k, 1).unwrap().is_trivial());
    let res = resolve_module(&k, 4, Strategy::Greedy).unwrap();
    assert!(res.ranks().iter().all(|&r| r == 1));
}

#[test]
fn resolution_choice_does_not_change_ext() {
    for (name, m, t) in corpus_pairs() {
        let y = ChainComplex::concentrated(t.clone(), 0);
        let greedy = resolve_module(&m, 4, Strategy::Greedy).unwrap();
        let reversed = resolve_module(&m, 4, Strategy::Reversed).unwrap();
        let g = compare_lift(&ModuleMap::identity(m.clone()), &greedy, &reversed).unwrap();
        for i in 0..=2 {
            let eg = hyper_ext(&greedy, &y, i).unwrap();
            let er = hyper_ext(&reversed, &y, i).unwrap();
            assert_eq!(eg.group(), er.group(), "{name} degree {i}");
            // Pulling back along the comparison map is a bijection on classes.
            let Some(classes) = er.classes(64) else { continue };
            let mut images = std::collections::BTreeSet::new();
            for c in &classes {
                let f = er.representative(c);
                let pulled = er.hom().precompose(i, &f, &g, eg.hom());
                images.insert(eg.class_of(&pulled).expect("pullback of a cocycle is a cocycle"));
            }
            assert_eq!(images.len(), classes.len(), "{name} degree {i}");
        }
    }
}

#[test]
fn dimension_shifting() {
    for (name, m, t) in corpus_pairs() {
        let res = resolve_module(&m, 5, Strategy::Greedy).unwrap();
        let omega = syzygy(&res, 1);
        for i in 1..=2 {
            let lhs = ext_group(&m, &t, i + 1).unwrap();
            let rhs = ext_group(&omega, &t, i).unwrap();
            assert_eq!(lhs.group(), rhs.group(), "{name} degree {i}");
        }
    }
}

#[test]
fn hyper_ext_of_a_module_is_ext() {
    for (name, m, t) in corpus_pairs() {
        let res = resolve_module(&m, 3, Strategy::Greedy).unwrap();
        for i in 0..=2 {
            let h = hyper_ext(&res, &ChainComplex::concentrated(t.clone(), 0), i as i64).unwrap();
            assert_eq!(h.group(), ext_group(&m, &t, i).unwrap().group(), "{name} degree {i}");
        }
    }
}
