use std::sync::Arc;

use fibrum_core::cohom::{linkage_via_cohomology, reduced_criterion_hypothesis};
use fibrum_core::grp::{parse_group, small_catalog, AHom, Group, GroupRef};
use fibrum_core::idem::{linked, mgg_pairs, CentralPair};
use fibrum_core::ring::RingSpec;
use fibrum_core::simp::*;

fn grp(name: &str) -> GroupRef {
    Arc::new(parse_group(name).unwrap())
}

fn trivial_quadruple(n: u32, p: u64) -> Quadruple {
    let c1 = grp("C1");
    let t = c1.trivial_subgroup();
    Quadruple::new(&c1, n, &t, &AHom::trivial(&t, n), GammaModule::trivial(&Group::trivial(), p), None).unwrap()
}

fn center_pair(g: &GroupRef, n: u32) -> CentralPair {
    CentralPair { k: g.center(), kappa: AHom { n, vals: vec![0, n / 2] } }
}

fn center_quadruple(name: &str, n: u32, p: u64) -> Quadruple {
    let g = grp(name);
    let pair = center_pair(&g, n);
    let m = mgg_pairs(&g, n);
    let gamma = fibrum_core::idem::gamma_group(&m, m.index_of(&pair.k, &pair.kappa).unwrap()).unwrap();
    Quadruple::new(&g, n, &pair.k, &pair.kappa, GammaModule::trivial(&gamma.table, p), Some(&small_catalog(7))).unwrap()
}

#[test]
fn c4_example_three_way() {
    let c4 = grp("C4");
    let cat = small_catalog(3);
    let k = c4.subgroup(&[0, 2]).unwrap();
    let at2 = reduced_pairs_bruteforce(&c4, 2, &cat).unwrap();
    assert!(at2.catalog_complete);
    assert_eq!(at2.is_reduced(&k, &AHom { n: 2, vals: vec![0, 1] }), Some(true));
    let kappa4 = AHom { n: 4, vals: vec![0, 2] };
    let at4 = reduced_pairs_bruteforce(&c4, 4, &cat).unwrap();
    let e = at4.entries.iter().find(|e| e.pair.k == k && e.pair.kappa == kappa4).unwrap();
    assert!(!e.reduced);
    let w = e.witness.as_ref().unwrap();
    let l = w.left();
    assert_eq!((l.p.order(), l.k.clone(), l.kappa.clone()), (4, k.clone(), kappa4.clone()));
    assert!(w.space.h.order() < 4);
    assert_eq!(w.u.iter().map(|z| w.space.dec(z).1).collect::<std::collections::BTreeSet<_>>().len(), w.space.h.order());
    assert!(!reduced_criterion_hypothesis(&c4, &k, &kappa4, 4).unwrap());
}

#[test]
fn bruteforce_agrees_with_hypothesis_criterion() {
    let cat = small_catalog(7);
    for g in small_catalog(8).groups {
        let n = g.order() as u32;
        let r = reduced_pairs_bruteforce(&g, n, &cat).unwrap();
        assert!(r.catalog_complete);
        for e in &r.entries {
            let h = reduced_criterion_hypothesis(&g, &e.pair.k, &e.pair.kappa, n).unwrap();
            assert_eq!(e.reduced, h, "{} K of order {}", g.name(), e.pair.k.order());
        }
    }
}

#[test]
fn reducedness_necessary_and_sufficient_conditions() {
    let cat = small_catalog(7);
    for g in small_catalog(8).groups {
        for n in [2u32, 4] {
            let r = reduced_pairs_bruteforce(&g, n, &cat).unwrap();
            for e in &r.entries {
                assert!(!e.reduced || e.necessary);
                assert!(!e.sufficient || e.reduced);
            }
        }
    }
}

#[test]
fn reducedness_is_linkage_invariant() {
    let cat = small_catalog(7);
    for name in ["C4", "C2xC2", "S3", "D8", "Q8"] {
        let g = grp(name);
        let m = mgg_pairs(&g, 4);
        let r = reduced_pairs_bruteforce(&g, 4, &cat).unwrap();
        for i in 0..m.pairs.len() {
            for j in 0..m.pairs.len() {
                if linked(&m, i, &m, j).unwrap() {
                    assert_eq!(r.entries[i].reduced, r.entries[j].reduced, "{name}");
                }
            }
        }
    }
}

#[test]
fn essential_dimension_matches_blocks() {
    let cat = small_catalog(5);
    for name in ["C1", "C2", "C3", "C4", "C2xC2", "S3"] {
        let g = grp(name);
        for n in [2u32, 4] {
            let e = essential_basis(&g, n, RingSpec::Q, &cat).unwrap();
            assert_eq!(e.dim, e.blocks.iter().map(|b| b.dim()).sum::<usize>());
            assert_eq!(e.intersection_dim, e.intersection_expected);
        }
    }
}

#[test]
fn trivial_functor_counts_conjugacy_classes() {
    for (name, n, p) in [("C2", 2u32, 3u64), ("C3", 3, 7), ("C4", 4, 5), ("S3", 6, 7)] {
        let q = trivial_quadruple(n, p);
        let g = grp(name);
        assert_eq!(simple_evaluation(&q, &g).unwrap(), g.conjugacy_classes().len(), "{name}");
    }
}

#[test]
fn evaluation_at_home_group_is_class_size_times_dim() {
    let cat = small_catalog(5);
    for name in ["C2", "C3", "C4", "C2xC2", "S3"] {
        let g = grp(name);
        let n = g.order() as u32;
        let m = mgg_pairs(&g, n);
        let r = reduced_pairs_bruteforce(&g, n, &cat).unwrap();
        for (i, e) in r.entries.iter().enumerate().filter(|(_, e)| e.reduced) {
            let gamma = fibrum_core::idem::gamma_group(&m, i).unwrap();
            let p = default_prime(gamma.table.exponent() as u64, gamma.order() as u64, g.order() as u64, n);
            for v in gamma_irreducibles(&gamma.table, p, &[]).unwrap() {
                let d = v.dim;
                let q = Quadruple::new(&g, n, &e.pair.k, &e.pair.kappa, v, Some(&cat)).unwrap();
                let size = q.class_size().unwrap();
                assert_eq!(simple_evaluation(&q, &g).unwrap(), size * d, "{name}");
                for h in small_catalog(g.order() - 1).groups {
                    assert_eq!(simple_evaluation(&q, &h).unwrap(), 0, "{name} at {}", h.name());
                }
            }
        }
    }
}

#[test]
fn characters_of_abelian_gamma_are_distinct_and_simple() {
    let c4 = grp("C4");
    let irr = gamma_irreducibles(&c4, 5, &[]).unwrap();
    assert_eq!(irr.len(), 4);
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(modules_isomorphic(&irr[i], &irr[j]), i == j);
        }
    }
    assert!(gamma_irreducibles(&c4, 2, &[]).is_err());
}

#[test]
fn two_dimensional_module_of_s3() {
    let s3 = grp("S3");
    // Permutation action on {x ∈ F_7³ : Σx = 0} via the natural embedding.
    let perms: Vec<[usize; 3]> = (0..6).map(|g| {
        let mut p = [0usize; 3];
        for (i, slot) in p.iter_mut().enumerate() {
            *slot = perm_image(&s3, g, i);
        }
        p
    }).collect();
    // Basis e0 − e2, e1 − e2.
    let mats = perms
        .iter()
        .map(|p| {
            let col = |i: usize| {
                let mut v = [0i64; 3];
                v[p[i]] += 1;
                v[p[2]] -= 1;
                [v[0].rem_euclid(7) as u64, v[1].rem_euclid(7) as u64]
            };
            let (a, b) = (col(0), col(1));
            vec![vec![a[0], b[0]], vec![a[1], b[1]]]
        })
        .collect();
    let m = GammaModule { p: 7, dim: 2, mats, simplicity: Simplicity::Assumed };
    let irr = gamma_irreducibles(&s3, 7, std::slice::from_ref(&m)).unwrap();
    assert_eq!(irr.len(), 2);
    assert_eq!(irr[1].simplicity, Simplicity::Checked);
    let mut bad = m;
    bad.mats[1] = vec![vec![1, 0], vec![0, 1]];
    assert!(gamma_irreducibles(&s3, 7, &[bad]).is_err());
}

/// Action of `g ∈ S3` on the three points, read off from the conjugation
/// action on the three subgroups of order 2.
fn perm_image(s3: &Group, g: usize, i: usize) -> usize {
    let invs: Vec<usize> = (1..6).filter(|&x| s3.elem_order(x) == 2).collect();
    let y = s3.conj(g, invs[i]);
    invs.iter().position(|&x| x == y).unwrap()
}

#[test]
fn quaternion_and_dihedral_quadruples_are_linked() {
    let q = center_quadruple("Q8", 4, 5);
    let d = center_quadruple("D8", 4, 5);
    assert!(linkage_via_cohomology(&q.g, q.pair(), &d.g, d.pair(), 4).unwrap().linked);
    assert!(quadruple_linkage(&q, &d).unwrap());
    assert!(quadruple_linkage(&q, &q).unwrap());
    let t = trivial_quadruple(4, 5);
    assert!(!quadruple_linkage(&q, &t).unwrap());
}

#[test]
fn linked_quadruples_have_equal_evaluations() {
    let q = center_quadruple("Q8", 4, 5);
    let d = center_quadruple("D8", 4, 5);
    for h in small_catalog(8).groups {
        let a = simple_evaluation(&q, &h).unwrap();
        let b = simple_evaluation(&d, &h).unwrap();
        assert_eq!(a, b, "at {}", h.name());
        if h.order() < 8 {
            assert_eq!(a, 0);
        }
    }
}

#[test]
fn nonvanishing_filter_is_implied_by_evaluation() {
    let cat = small_catalog(5);
    for (name, n) in [("C1", 2u32), ("C2", 2), ("C2", 4), ("C3", 3), ("C4", 4)] {
        let g = grp(name);
        let m = mgg_pairs(&g, n);
        let r = reduced_pairs_bruteforce(&g, n, &cat).unwrap();
        for (i, e) in r.entries.iter().enumerate().filter(|(_, e)| e.reduced) {
            let gamma = fibrum_core::idem::gamma_group(&m, i).unwrap();
            let p = default_prime(gamma.table.exponent() as u64, gamma.order() as u64, 12, n);
            let v = GammaModule::trivial(&gamma.table, p);
            let q = Quadruple::new(&g, n, &e.pair.k, &e.pair.kappa, v, Some(&cat)).unwrap();
            assert!(nonvanishing_filter(&g, &e.pair, &g, n).unwrap().is_some());
            for h in small_catalog(6).groups.iter().filter(|h| h.order() * g.order() <= EVALUATION_BOUND) {
                let dim = simple_evaluation(&q, h).unwrap();
                let f = nonvanishing_filter(&g, &e.pair, h, n).unwrap();
                if dim > 0 {
                    assert!(f.is_some(), "{name} N={n} at {}", h.name());
                }
                if h.order() < g.order() {
                    assert!(f.is_none());
                    assert_eq!(dim, 0);
                }
            }
        }
    }
}
