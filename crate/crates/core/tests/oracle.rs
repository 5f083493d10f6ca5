use std::sync::Arc;

use fibrum_core::fib::{standard_basis, CanonicalPair, FiberedElement, Space};
use fibrum_core::grp::{parse_group, GroupRef};
use fibrum_core::oracle::*;
use fibrum_core::ring::RingSpec;
use proptest::prelude::*;

const SMALL: [&str; 7] = ["C1", "C2", "C3", "C4", "C2xC2", "C6", "S3"];

fn pick(i: usize) -> GroupRef {
    Arc::new(parse_group(SMALL[i % SMALL.len()]).unwrap())
}

fn basis(g: &GroupRef, h: &GroupRef, n: u32) -> Vec<CanonicalPair> {
    standard_basis(&Space::new(g.clone(), h.clone(), n)).unwrap()
}

/// `A` acts freely: every orbit of the generator has exactly `N` points.
fn a_is_free(x: &ExplicitFiberedBiset) -> bool {
    let n = x.space.n as usize;
    (0..x.points).all(|p| {
        let mut q = p;
        for k in 1..=n {
            q = x.a_act[q] as usize;
            if q == p {
                return k == n;
            }
        }
        false
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]
    #[test]
    fn realize_and_classify_are_inverse(gs in proptest::array::uniform2(0usize..7), pk in 0usize..10_000, n in 1u32..7) {
        let [g, h] = gs.map(pick);
        let b = basis(&g, &h, n);
        let p = &b[pk % b.len()];
        let x = realize(p).unwrap();
        prop_assert_eq!(x.points, g.order() * h.order() * n as usize / p.u.order());
        prop_assert!(a_is_free(&x));
        let back = classify_explicit(&x).unwrap().rehome(&p.space).unwrap();
        prop_assert_eq!(back, FiberedElement::from_canonical(p, RingSpec::Z));
    }

    #[test]
    fn stabilizing_pairs_are_equivariant(gs in proptest::array::uniform2(0usize..7), pk in 0usize..10_000, n in 1u32..5, pt in 0usize..10_000) {
        let [g, h] = gs.map(pick);
        let b = basis(&g, &h, n);
        let x = realize(&b[pk % b.len()]).unwrap();
        let pt = pt % x.points;
        let base = stabilizing_pair(&x, pt).unwrap();
        for a in 0..g.order() {
            for c in 0..h.order() {
                let y = x.h_act[c][x.g_act[a][pt] as usize] as usize;
                let s = stabilizing_pair(&x, y).unwrap();
                let conj = base.conjugate(a, c);
                prop_assert_eq!((s.u, s.phi), (conj.u, conj.phi));
            }
        }
    }

    #[test]
    fn tensor_products_are_free_and_additive(gs in proptest::array::uniform3(0usize..7), picks in proptest::array::uniform3(0usize..10_000), n in 1u32..5) {
        let [g, h, k] = gs.map(pick);
        let bx = basis(&g, &h, n);
        let by = basis(&h, &k, n);
        let x1 = realize(&bx[picks[0] % bx.len()]).unwrap();
        let x2 = realize(&bx[picks[1] % bx.len()]).unwrap();
        let y = realize(&by[picks[2] % by.len()]).unwrap();
        let t1 = tensor_explicit(&x1, &y).unwrap();
        prop_assert_eq!(t1.points % n as usize, 0);
        prop_assert!(a_is_free(&t1));
        t1.validate().unwrap();
        let t2 = tensor_explicit(&x2, &y).unwrap();
        let tu = tensor_explicit(&x1.disjoint_union(&x2).unwrap(), &y).unwrap();
        prop_assert_eq!(tu.points, t1.points + t2.points);
        let out = Space::new(g.clone(), k.clone(), n);
        let sum = classify_explicit(&t1).unwrap().rehome(&out).unwrap().add(&classify_explicit(&t2).unwrap().rehome(&out).unwrap()).unwrap();
        prop_assert_eq!(classify_explicit(&tu).unwrap().rehome(&out).unwrap(), sum);
    }
}
