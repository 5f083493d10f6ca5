use std::collections::BTreeSet;
use std::sync::Arc;

use fibrum_core::cohom::*;
use fibrum_core::fib::{standard_basis, FiberedElement, Space};
use fibrum_core::grp::{parse_group, small_catalog, AHom, Group, GroupHom, GroupRef, Subgroup};
use fibrum_core::idem::{linked, mgg_pairs, CentralPair};
use fibrum_core::ring::RingSpec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grp(name: &str) -> GroupRef {
    Arc::new(parse_group(name).unwrap())
}

/// All normalized cochains over Z/d, by enumeration.
fn normalized_cochains(q: &Group, d: u64) -> Vec<Vec<u64>> {
    let n = q.order();
    let m = (n - 1) * (n - 1);
    let total = d.pow(m as u32);
    (0..total)
        .map(|mut i| {
            let mut v = vec![0u64; n * n];
            for x in 1..n {
                for y in 1..n {
                    v[x * n + y] = i % d;
                    i /= d;
                }
            }
            v
        })
        .collect()
}

fn is_cocycle(q: &Group, d: u64, a: &[u64]) -> bool {
    let n = q.order();
    (0..n).all(|x| {
        (0..n).all(|y| (0..n).all(|z| (a[x * n + y] + a[q.mul(x, y) * n + z]) % d == (a[y * n + z] + a[x * n + q.mul(y, z)]) % d))
    })
}

fn coboundaries(q: &Group, d: u64) -> BTreeSet<Vec<u64>> {
    let n = q.order();
    let total = d.pow((n - 1) as u32);
    (0..total)
        .map(|mut i| {
            let mut f = vec![0u64; n];
            for x in f.iter_mut().skip(1) {
                *x = i % d;
                i /= d;
            }
            let mut v = vec![0u64; n * n];
            for x in 0..n {
                for y in 0..n {
                    v[x * n + y] = (f[x] + f[y] + d - f[q.mul(x, y)]) % d;
                }
            }
            v
        })
        .collect()
}

fn to_table(q: &GroupRef, d: u64, v: &[u64]) -> CocycleTable {
    let n = q.order();
    CocycleTable::from_fn(q, &FinAb::cyclic(d), |x, y| vec![v[x * n + y]])
}

#[test]
fn h2_matches_enumeration() {
    for (name, d) in [("C2", 2u64), ("C2", 4), ("C3", 3), ("C4", 2), ("C2xC2", 2), ("C2xC2", 4), ("C3", 2)] {
        let q = grp(name);
        let z: Vec<Vec<u64>> = normalized_cochains(&q, d).into_iter().filter(|a| is_cocycle(&q, d, a)).collect();
        let b = coboundaries(&q, d);
        let h = h2_group(&q, &FinAb::cyclic(d)).unwrap();
        assert_eq!(h.h2.order() as usize * b.len(), z.len(), "H²({name}, Z/{d})");
        // Normal forms separate exactly the cosets of B².
        let mut seen: std::collections::BTreeMap<Vec<u64>, Vec<u64>> = Default::default();
        for a in &z {
            let nf = h.project(&to_table(&q, d, a)).unwrap();
            match seen.get(&nf) {
                None => {
                    seen.insert(nf, a.clone());
                }
                Some(rep) => {
                    let diff: Vec<u64> = a.iter().zip(rep).map(|(x, y)| (x + d - y) % d).collect();
                    assert!(b.contains(&diff), "same normal form, different classes");
                }
            }
        }
        assert_eq!(seen.len() as u64, h.h2.order());
    }
}

#[test]
fn h2_known_values() {
    let h = h2_group(&grp("C1"), &FinAb::cyclic(7)).unwrap();
    assert_eq!(h.h2.order(), 1);
    let h = h2_group(&grp("C2"), &FinAb::cyclic(2)).unwrap();
    assert_eq!(h.h2.order(), 2);
    let h = h2_group(&grp("C2xC2"), &FinAb::cyclic(2)).unwrap();
    assert_eq!(h.h2.invariant_factors(), vec![2, 2, 2]);
    assert!(h2_group(&grp("C17"), &FinAb::cyclic(2)).is_err());
}

/// `B ×_α Q` with elements `b + |B|·q`.
fn extension(a: &CocycleTable) -> Group {
    let b = &a.b;
    let bn = b.order() as usize;
    let qn = a.q.order();
    let n = bn * qn;
    let mut rows = vec![vec![0usize; n]; n];
    for x in 0..n {
        for y in 0..n {
            let (q1, b1) = (x / bn, b.element(x % bn));
            let (q2, b2) = (y / bn, b.element(y % bn));
            let v = b.add(&b.add(&b1, &b2), a.at(q1, q2));
            rows[x][y] = a.q.mul(q1, q2) * bn + b.index_of(&v);
        }
    }
    Group::from_table("ext", &rows, None).unwrap()
}

#[test]
fn symmetric_classes_are_those_with_b_meeting_derived_trivially() {
    for (name, d) in [("C2", 2u64), ("C4", 2), ("C2xC2", 2), ("C2xC2", 4), ("S3", 2), ("S3", 3), ("D8", 2), ("Q8", 2)] {
        let q = grp(name);
        let b = FinAb::cyclic(d);
        let h = h2_group(&q, &b).unwrap();
        let qab = q.quotient(&q.derived()).unwrap();
        let qabg: GroupRef = Arc::new(qab.group.clone());
        let image: BTreeSet<Vec<u64>> = {
            let gens: Vec<Vec<u64>> =
                symmetric_generators(&qabg, &b).unwrap().iter().map(|g| h.project(&g.inflate(&q, &qab.proj)).unwrap()).collect();
            let mut set = BTreeSet::from([h.h2.zero()]);
            loop {
                let before = set.len();
                let cur: Vec<_> = set.iter().cloned().collect();
                for x in &cur {
                    for g in &gens {
                        set.insert(h.h2.add(x, g));
                    }
                }
                if set.len() == before {
                    break;
                }
            }
            set
        };
        for v in h.h2.elements() {
            let x = extension(&h.representative(&v));
            let bsub = Subgroup::from_mask(fibrum_core::bits::BitSet::from_iter(x.order(), 0..d as usize));
            let meets = !x.intersect(&bsub, &x.derived()).is_trivial();
            assert_eq!(image.contains(&v), !meets, "{name}, Z/{d}, class {v:?}");
        }
    }
}

#[test]
fn psi_is_a_homomorphism_and_vanishes_on_extension_classes() {
    for name in ["C4", "C2xC2", "D8", "Q8", "C4xC2", "C2xC2xC2", "S3", "C6"] {
        let g = grp(name);
        let n = g.order() as u32;
        let z = g.center();
        let gd = g.derived();
        for k in g.subgroups().into_iter().filter(|k| k.is_subset(&z) && !k.is_trivial()) {
            let ak = AbelianSub::new(&g, &k).unwrap();
            let kt = g.intersect(&k, &gd);
            let akt = AbelianSub::new(&g, &kt).unwrap();
            let sc = fibrum_core::grp::section_with_cocycle(&g, &k).unwrap();
            let q: GroupRef = Arc::new(sc.quotient.group.clone());
            let alpha = CocycleTable::from_fn(&q, &ak.ab, |x, y| ak.coord(sc.alpha(x, y)));
            let hk = h2_group(&q, &ak.ab).unwrap();
            let hkt = h2_group(&q, &akt.ab).unwrap();
            let hn = h2_group(&q, &FinAb::cyclic(n as u64)).unwrap();
            let psi_a = psi(&hk, &hn, &alpha).unwrap();
            let mu_of = |mu: &[u64]| psi_a.iter().find(|(m, _)| m.as_slice() == mu).unwrap().1.clone();
            // Ψ([α]) is a homomorphism on K*.
            for (m1, c1) in &psi_a {
                for (m2, c2) in &psi_a {
                    let s: Vec<u64> = m1.iter().zip(m2).map(|(a, b)| (a + b) % n as u64).collect();
                    assert_eq!(mu_of(&s), hn.h2.add(c1, c2));
                }
            }
            // ε₄∘Ψ₁([α]) = 1: characters trivial on K̃ kill [α].
            for (mu, c) in &psi_a {
                let trivial_on_kt = kt.iter().all(|x| apply_character(mu, &ak.coord(x), n) == 0);
                if trivial_on_kt {
                    assert!(hn.h2.is_zero(c), "{name}: μ trivial on K̃ but [μ∘α] ≠ 0");
                }
            }
            // ε₃∘Ψ₂ = Ψ₁∘ε₂ on generators of H²(Q, K̃).
            let eps = |v: &[u64]| ak.coord(akt.elem(&g, v));
            for j in 0..hkt.h2.rank() {
                let beta = hkt.representative(&hkt.h2.unit(j));
                let lhs = psi(&hk, &hn, &beta.map_coeffs(&ak.ab, eps)).unwrap();
                for (mu, c) in lhs {
                    let t = beta.map_coeffs(&hn.b, |v| vec![apply_character(&mu, &eps(v), n)]);
                    assert_eq!(hn.project(&t).unwrap(), c);
                }
            }
            assert!(psi(&hk, &hn, &CocycleTable::zero(&q, &ak.ab)).unwrap().iter().all(|(_, c)| hn.h2.is_zero(c)));
        }
    }
}

#[test]
fn class_ops_are_functorial() {
    let q = grp("D8");
    let b2 = FinAb::cyclic(2);
    let b4 = FinAb::cyclic(4);
    let h2 = h2_group(&q, &b2).unwrap();
    let h4 = h2_group(&q, &b4).unwrap();
    let auts = fibrum_core::grp::isomorphisms(&q, &q);
    let double = |v: &[u64]| vec![2 * v[0]];
    for v in h2.h2.elements() {
        let c = h2.class(&h2.representative(&v)).unwrap();
        let up = class_op(&c, &ClassOp::Coefficients(&double), &h4).unwrap();
        for a in &auts {
            let moved = class_op(&c, &ClassOp::Pullback(a), &h2).unwrap();
            let both = class_op(&moved, &ClassOp::Coefficients(&double), &h4).unwrap();
            let other = class_op(&up, &ClassOp::Pullback(a), &h4).unwrap();
            assert_eq!(both.nf, other.nf);
        }
    }
    let inner: Vec<GroupHom> = (0..q.order()).map(|x| GroupHom { img: (0..q.order()).map(|y| q.conj(x, y)).collect() }).collect();
    for v in h2.h2.elements() {
        let c = h2.class(&h2.representative(&v)).unwrap();
        for a in &inner {
            assert_eq!(class_op(&c, &ClassOp::Pullback(a), &h2).unwrap().nf, c.nf, "inner automorphisms act trivially");
        }
    }
}

fn random_cocycle(h: &H2Group, rng: &mut ChaCha8Rng) -> CocycleTable {
    let mut a = CocycleTable::zero(&h.q, &h.b);
    for z in h.z2_generators() {
        a = a.add(&z.scale(rng.gen_range(0..8)));
    }
    let f: Vec<Vec<u64>> = (0..h.q.order()).map(|_| h.b.orders.iter().map(|&o| rng.gen_range(0..o)).collect()).collect();
    a.add(&CocycleTable::coboundary(&h.q, &h.b, &f))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn projection_is_additive_and_agrees_with_linear_solve(seed in 0u64..1_000_000, gi in 0usize..6, bi in 0usize..3) {
        let q = grp(["C2", "C4", "C2xC2", "S3", "D8", "Q8"][gi]);
        let b = [FinAb::cyclic(2), FinAb::cyclic(4), FinAb::new(&[2, 3])][bi].clone();
        let h = h2_group(&q, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_cocycle(&h, &mut rng);
        let y = random_cocycle(&h, &mut rng);
        prop_assert!(x.satisfies_identity());
        let (px, py) = (h.project(&x).unwrap(), h.project(&y).unwrap());
        prop_assert_eq!(h.project(&x.add(&y)).unwrap(), h.h2.add(&px, &py));
        prop_assert_eq!(px == py, h.same_class(&x, &y).unwrap());
        prop_assert_eq!(q.order() as u64 % h.h2.exponent(), 0);
    }
}

#[test]
fn alpha_n_commutator_identity_in_extensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, korder) in [("C4", 2usize), ("Q8", 2), ("D8", 2)] {
        let g = grp(name);
        let k = g.subgroups().into_iter().find(|s| s.order() == korder && s.is_subset(&g.center())).unwrap();
        let sc = fibrum_core::grp::section_with_cocycle(&g, &k).unwrap();
        let ak = AbelianSub::new(&g, &k).unwrap();
        let q: GroupRef = Arc::new(sc.quotient.group.clone());
        let alpha = CocycleTable::from_fn(&q, &ak.ab, |x, y| ak.coord(sc.alpha(x, y)));
        for _ in 0..200 {
            let n = rng.gen_range(1..=3);
            let s: Vec<usize> = (0..2 * n).map(|_| rng.gen_range(0..q.order())).collect();
            let mut lhs = 0;
            let mut c = 0;
            for i in 0..n {
                lhs = g.mul(lhs, g.commutator(sc.section[s[2 * i]], sc.section[s[2 * i + 1]]));
                c = q.mul(c, q.commutator(s[2 * i], s[2 * i + 1]));
            }
            let an = alpha_n(&alpha, n, &s).unwrap();
            assert_eq!(lhs, g.mul(ak.elem(&g, &an), sc.section[c]), "{name}, {s:?}");
        }
    }
}

#[test]
fn alpha_n_algebraic_properties() {
    for name in ["C2", "C3", "C4", "C2xC2", "S3"] {
        let q = grp(name);
        let b = FinAb::cyclic(6);
        let h = h2_group(&q, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(name.len() as u64);
        let x = random_cocycle(&h, &mut rng);
        let y = random_cocycle(&h, &mut rng);
        let qn = q.order();
        let tuples: Vec<Vec<usize>> = (0..qn.pow(4)).map(|mut i| (0..4).map(|_| { let v = i % qn; i /= qn; v }).collect()).collect();
        let mu: Vec<Vec<u64>> = (0..qn).map(|_| vec![rng.gen_range(0..6)]).collect();
        let cob = CocycleTable::coboundary(&q, &b, &mu);
        for t in &tuples {
            for n in 1..=2 {
                let s = &t[..2 * n];
                let sum = alpha_n(&x.add(&y), n, s).unwrap();
                assert_eq!(sum, b.add(&alpha_n(&x, n, s).unwrap(), &alpha_n(&y, n, s).unwrap()));
                let mut c = 0;
                for i in 0..n {
                    c = q.mul(c, q.commutator(s[2 * i], s[2 * i + 1]));
                }
                assert_eq!(alpha_n(&cob, n, s).unwrap(), b.neg(&mu[c]));
                if q.is_abelian() {
                    for g in symmetric_generators(&q, &b).unwrap() {
                        let a = g.add(&CocycleTable::from_fn(&q, &b, |_, _| vec![5]));
                        assert_eq!(alpha_n(&a, n, s).unwrap(), b.neg(a.at(0, 0)));
                    }
                }
            }
        }
        // Compatibility with precomposition by a homomorphism Q×Q → Q.
        let qq: GroupRef = Arc::new(Group::direct_product(&[&q, &q]));
        let f = GroupHom { img: (0..qq.order()).map(|z| z / qn).collect() };
        let pulled = x.pullback(&qq, &f);
        for t in tuples.iter().take(40) {
            let lifted: Vec<usize> = t.iter().map(|&v| v * qn + (v + 1) % qn).collect();
            assert_eq!(alpha_n(&pulled, 2, &lifted).unwrap(), alpha_n(&x, 2, t).unwrap());
        }
    }
    let q = grp("C2");
    assert!(alpha_n(&CocycleTable::zero(&q, &FinAb::cyclic(2)), 0, &[]).is_err());
}


#[test]
fn linkage_criterion_matches_bruteforce() {
    let cat = small_catalog(8);
    for n in [2u32, 4, 8] {
        let data: Vec<(GroupRef, fibrum_core::idem::Mgg)> = cat.groups.iter().map(|g| (g.clone(), mgg_pairs(g, n))).collect();
        for (g, mg) in &data {
            for (h, mh) in &data {
                if g.order() < h.order() {
                    continue;
                }
                for i in 0..mg.len() {
                    for j in 0..mh.len() {
                        let (a, b) = (&mg.pairs[i], &mh.pairs[j]);
                        // Necessary condition shared by both sides: |G:K| = |H:L|.
                        let brute = if g.order() / a.k.order() == h.order() / b.k.order() { linked(mg, i, mh, j).unwrap() } else { false };
                        let coh = linkage_via_cohomology(g, a, h, b, n).unwrap();
                        assert_eq!(coh.linked, brute, "{} vs {} at N={n}: {i} / {j}", g.name(), h.name());
                        assert_eq!(coh.eta.is_some(), coh.linked);
                    }
                }
            }
        }
    }
}

#[test]
fn linkage_examples() {
    for name in ["C1", "C2", "C4", "C2xC2", "S3"] {
        for other in ["C1", "C2", "C4", "C2xC2", "S3"] {
            let (g, h) = (grp(name), grp(other));
            let a = CentralPair { k: g.trivial_subgroup(), kappa: AHom::trivial(&g.trivial_subgroup(), 3) };
            let b = CentralPair { k: h.trivial_subgroup(), kappa: AHom::trivial(&h.trivial_subgroup(), 3) };
            let r = linkage_via_cohomology(&g, &a, &h, &b, 3).unwrap();
            assert_eq!(r.linked, fibrum_core::grp::isomorphic(&g, &h).is_some());
        }
    }
    let (q8, d8) = (grp("Q8"), grp("D8"));
    for (n, expect) in [(4u32, true), (2, false)] {
        let zq = q8.center();
        let zd = d8.center();
        let a = CentralPair { k: zq.clone(), kappa: AHom { n, vals: vec![0, n / 2] } };
        let b = CentralPair { k: zd.clone(), kappa: AHom { n, vals: vec![0, n / 2] } };
        assert_eq!(linkage_via_cohomology(&q8, &a, &d8, &b, n).unwrap().linked, expect, "N = {n}");
    }
}

fn central_faithful_triples(g: &GroupRef, n: u32) -> Vec<(Subgroup, AHom)> {
    let z = g.center();
    let mut out = Vec::new();
    for k in g.subgroups().into_iter().filter(|k| k.is_subset(&z)) {
        if !k.iter().any(|x| g.elem_order(x) == k.order()) {
            continue;
        }
        for kappa in fibrum_core::grp::homs_to_cyclic(g, &k, n) {
            if kappa.is_faithful() {
                out.push((k.clone(), kappa));
            }
        }
    }
    out
}

#[test]
fn squeeze_postconditions_and_idempotents() {
    let z = RingSpec::Z;
    for g in small_catalog(8).groups {
        for n in [g.order() as u32, 2 * g.order() as u32] {
            let mg = mgg_pairs(&g, n);
            for (k, kappa) in central_faithful_triples(&g, n) {
                let (sq, ins, del) = ins_del(&g, &k, &kappa, n).unwrap();
                assert_eq!(sq.g_tilde.order() * k.order(), g.order() * sq.k_tilde.order());
                let e = FiberedElement::from_pair(&mg.e_pair(mg.index_of(&k, &kappa).unwrap()), z);
                let id = FiberedElement::from_pair(&ins, z).mul(&FiberedElement::from_pair(&del, z)).unwrap();
                assert_eq!(id.rehome(&e.space).unwrap(), e, "Ins·Del on {} K={}", g.name(), k.order());
                let mt = mgg_pairs(&sq.g_tilde, n);
                let et = FiberedElement::from_pair(&mt.e_pair(mt.index_of(&sq.kt_in_gt, &sq.kappa_tilde()).unwrap()), z);
                let dd = FiberedElement::from_pair(&del, z).mul(&FiberedElement::from_pair(&ins, z)).unwrap();
                assert_eq!(dd.rehome(&et.space).unwrap(), et, "Del·Ins on {}", g.name());
                if sq.k_tilde == k {
                    assert_eq!(sq.g_tilde.order(), g.order());
                    assert!(ins.is_covering());
                }
            }
        }
    }
}

#[test]
fn squeeze_quaternion() {
    let q8 = grp("Q8");
    let z = q8.center();
    let kappa = AHom { n: 8, vals: vec![0, 4] };
    let sq = squeeze(&q8, &z, &kappa, 8).unwrap();
    assert_eq!(sq.k_tilde, z);
    let is_d8 = fibrum_core::grp::isomorphic(&sq.g_tilde, &grp("D8")).is_some();
    let is_q8 = fibrum_core::grp::isomorphic(&sq.g_tilde, &q8).is_some();
    assert!(is_d8 || is_q8);
    assert!(sq.kt_in_gt.is_subset(&sq.g_tilde.derived()));
    assert!(!sq.log.is_empty());
}

#[test]
fn reduce_decomposition_examples() {
    // E_(C2,κ) over C4 at N = 4 factors through a smaller group.
    let c4 = grp("C4");
    let m = mgg_pairs(&c4, 4);
    let k = c4.subgroup(&[0, 2]).unwrap();
    let kappa = AHom { n: 4, vals: vec![0, 2] };
    let p = m.e_pair(m.index_of(&k, &kappa).unwrap());
    let r = reduce_decomposition(&p).unwrap();
    assert!(r.y.space.g.order() < 4 && r.y.space.h.order() < 4);
    // Reduced input: the middle factor has the same size.
    let q8 = grp("Q8");
    let m = mgg_pairs(&q8, 8);
    let z = q8.center();
    let kappa = AHom { n: 8, vals: vec![0, 4] };
    let p = m.e_pair(m.index_of(&z, &kappa).unwrap());
    let r = reduce_decomposition(&p).unwrap();
    assert_eq!(r.y.space.g.order(), 8);
    assert!(reduce_decomposition(&mgg_pairs(&q8, 4).e_pair(0)).is_err());
}

#[test]
fn full_decomposition_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (d8, c42) = (grp("D8"), grp("C4xC2"));
    let space = Space::new(d8.clone(), c42.clone(), 8);
    let basis = standard_basis(&space).unwrap();
    for _ in 0..6 {
        let p = &basis[rng.gen_range(0..basis.len())].0;
        let f = full_decomposition(p).unwrap();
        let mid = &f.middle;
        let (l, r) = (mid.left(), mid.right());
        for (grp_, t) in [(&mid.space.g, &l), (&mid.space.h, &r)] {
            assert!(reduced_criterion_hypothesis(grp_, &t.k, &t.kappa, 8).unwrap());
        }
    }
}

#[test]
fn reduced_criterion_examples() {
    let q8 = grp("Q8");
    assert!(reduced_criterion_hypothesis(&q8, &q8.center(), &AHom { n: 8, vals: vec![0, 4] }, 8).unwrap());
    let c4 = grp("C4");
    let k = c4.subgroup(&[0, 2]).unwrap();
    assert!(!reduced_criterion_hypothesis(&c4, &k, &AHom { n: 4, vals: vec![0, 2] }, 4).unwrap());
    for g in small_catalog(8).groups {
        let t = g.trivial_subgroup();
        let n = g.order() as u32;
        assert!(reduced_criterion_hypothesis(&g, &t, &AHom::trivial(&t, n), n).unwrap());
    }
    assert!(reduced_criterion_hypothesis(&c4, &k, &AHom { n: 2, vals: vec![0, 1] }, 2).is_err());
}
