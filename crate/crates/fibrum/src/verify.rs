//! The twelve acceptance suites. Each suite returns a report with the number
//! of cases checked and the failures found; nothing is skipped silently.

use std::sync::Arc;
use std::time::Instant;

use fibrum_core::cohom::{alpha_n, full_decomposition, ins_del, linkage_via_cohomology, reduced_criterion_hypothesis, squeeze, symmetric_generators, AbelianSub, CocycleTable, FinAb, h2_group};
use fibrum_core::fib::{decompose_standard, product_of, standard_basis, FiberedElement, Space};
use fibrum_core::grp::{gcd, homs_to_cyclic, lcm, isomorphic, parse_group, section_with_cocycle, small_catalog, AHom, Group, GroupRef, Subgroup};
use fibrum_core::idem::{check_ef_relations, covering_algebra_report, covering_basis, gamma_bimodule, gamma_group, linkage_classes, linked, mgg_pairs, rank_of, ses_report, CentralPair, Mgg};
use fibrum_core::lin::burnside_kernel_check;
use fibrum_core::oracle::{classify_explicit, realize, tensor_explicit};
use fibrum_core::ring::RingSpec;
use fibrum_core::simp::{reduced_pairs_bruteforce, simple_evaluation, quadruple_linkage, GammaModule, Quadruple};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::formats::PairJson;

pub struct Criterion {
    pub id: u8,
    pub slug: &'static str,
    pub title: &'static str,
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, slug: "mackey", title: "Mackey products agree with the explicit tensor oracle" },
    Criterion { id: 2, slug: "idempotents", title: "e/f relations, sum of f, and f-deletion" },
    Criterion { id: 3, slug: "covering", title: "Covering algebra dimension and matrix blocks" },
    Criterion { id: 4, slug: "ses", title: "Gamma short exact sequence orders" },
    Criterion { id: 5, slug: "c4", title: "C4 reducedness at N=2 and N=4" },
    Criterion { id: 6, slug: "romero", title: "Q8/D8 linkage at N=4 and N=2" },
    Criterion { id: 7, slug: "squeeze", title: "Squeezing postconditions and Ins/Del idempotents" },
    Criterion { id: 8, slug: "decomposition", title: "Five- and seven-factor decompositions" },
    Criterion { id: 9, slug: "alpha", title: "alpha_n identities" },
    Criterion { id: 10, slug: "simple", title: "Evaluations of S_(1,1,1,k) and vanishing below G" },
    Criterion { id: 11, slug: "quadruples", title: "Linked Q8/D8 quadruples evaluate equally" },
    Criterion { id: 12, slug: "burnside-kernel", title: "Burnside kernel element for C_p x C_p" },
];

pub fn criterion_by_slug(s: &str) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.slug == s || c.id.to_string() == s)
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Restricts group grids to this order.
    pub max_order: Option<usize>,
    /// Replaces the moduli of the Mackey grid.
    pub moduli: Option<Vec<u32>>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_order: None, moduli: None, seed: 2024 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub slug: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub millis: u128,
}

/// Failures kept per report.
const MAX_FAILURES: usize = 20;

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
    notes: Vec<String>,
    failed: usize,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(msg());
            }
        }
    }

    fn fail(&mut self, msg: String) {
        self.check(false, || msg);
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(f);
            }
        }
        self.notes.extend(other.notes);
    }

    fn merge_all(parts: impl IntoIterator<Item = Tally>) -> Tally {
        let mut t = Tally::default();
        for p in parts {
            t.merge(p);
        }
        t
    }
}

fn grp(name: &str) -> GroupRef {
    Arc::new(parse_group(name).expect("built-in group name"))
}

fn grid(names: &[&str], max: Option<usize>) -> Vec<GroupRef> {
    names.iter().map(|n| grp(n)).filter(|g| max.is_none_or(|m| g.order() <= m)).collect()
}

pub fn run(c: &Criterion, opts: &VerifyOptions) -> CriterionReport {
    let start = Instant::now();
    let t = match c.id {
        1 => mackey(opts),
        2 => idempotents(opts),
        3 => covering(opts),
        4 => ses(opts),
        5 => c4_example(),
        6 => romero(),
        7 => squeezing(opts),
        8 => decompositions(opts),
        9 => alpha(opts),
        10 => simple(),
        11 => quadruples(),
        12 => burnside_kernel(),
        _ => unreachable!("criterion ids are 1..=12"),
    };
    CriterionReport {
        id: c.id,
        slug: c.slug,
        title: c.title,
        passed: t.failed == 0 && t.cases > 0,
        cases: t.cases,
        failures: t.failures,
        notes: t.notes,
        millis: start.elapsed().as_millis(),
    }
}

/// Runs the selected criteria in parallel; reports come back in id order.
pub fn run_many(ids: &[&'static Criterion], opts: &VerifyOptions) -> Vec<CriterionReport> {
    let mut out: Vec<CriterionReport> = ids.par_iter().map(|c| run(c, opts)).collect();
    out.sort_by_key(|r| r.id);
    out
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionReport> {
    let all: Vec<&'static Criterion> = CRITERIA.iter().collect();
    run_many(&all, opts)
}

fn mackey(opts: &VerifyOptions) -> Tally {
    let groups = grid(&["C1", "C2", "C3", "C4", "C2xC2", "S3"], opts.max_order);
    let moduli = opts.moduli.clone().unwrap_or_else(|| vec![2, 3, 4, 6]);
    let mut parts = Vec::new();
    for &n in &moduli {
        // Basis and explicit realization for every ordered pair of groups.
        let cells: Vec<(usize, usize)> = (0..groups.len()).flat_map(|a| (0..groups.len()).map(move |b| (a, b))).collect();
        let realized: Vec<_> = cells
            .par_iter()
            .map(|&(a, b)| {
                let space = Space::new(groups[a].clone(), groups[b].clone(), n);
                let basis = standard_basis(&space)?;
                let ex = basis.iter().map(|p| realize(p)).collect::<fibrum_core::Result<Vec<_>>>()?;
                Ok((space, basis, ex))
            })
            .collect::<Vec<fibrum_core::Result<_>>>();
        let at = |a: usize, b: usize| &realized[a * groups.len() + b];
        let triples: Vec<(usize, usize, usize)> = cells.iter().flat_map(|&(a, b)| (0..groups.len()).map(move |c| (a, b, c))).collect();
        let t = triples
            .par_iter()
            .map(|&(a, b, c)| {
                let mut t = Tally::default();
                let (Ok(x), Ok(y), Ok(out)) = (at(a, b), at(b, c), at(a, c)) else {
                    t.fail(format!("basis construction failed for N={n}"));
                    return t;
                };
                let z = RingSpec::Z;
                for (xi, xp) in x.1.iter().enumerate() {
                    let xe = FiberedElement::from_canonical(xp, z);
                    for (yi, yp) in y.1.iter().enumerate() {
                        let m = xe.mul_into(&out.0, &FiberedElement::from_canonical(yp, z));
                        let o = tensor_explicit(&x.2[xi], &y.2[yi]).and_then(|e| classify_explicit(&e)).and_then(|e| e.rehome(&out.0));
                        let ok = matches!((&m, &o), (Ok(m), Ok(o)) if m == o);
                        t.check(ok, || format!("{}x{}x{} N={n}: basis {xi} times {yi}", groups[a].name(), groups[b].name(), groups[c].name()));
                    }
                }
                t
            })
            .collect::<Vec<_>>();
        parts.extend(t);
    }
    Tally::merge_all(parts)
}

fn idem_grid(opts: &VerifyOptions) -> Vec<(GroupRef, u32)> {
    let groups = grid(&["C4", "C2xC2", "S3", "D8", "Q8"], opts.max_order);
    groups.into_iter().flat_map(|g| [2u32, 4].map(|n| (g.clone(), n))).collect()
}

fn seed_for(opts: &VerifyOptions, g: &Group, n: u32) -> u64 {
    opts.seed ^ (g.order() as u64) << 16 ^ (n as u64) << 32 ^ g.name().bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64))
}

fn idempotents(opts: &VerifyOptions) -> Tally {
    let parts = idem_grid(opts)
        .par_iter()
        .map(|(g, n)| {
            let mut t = Tally::default();
            let z = RingSpec::Z;
            let m = mgg_pairs(g, *n);
            let tag = format!("{} N={n}", g.name());
            match check_ef_relations(&m, z) {
                Ok(()) => t.check(true, String::new),
                Err(e) => t.fail(format!("{tag}: {e}")),
            }
            let fs: Vec<FiberedElement> = match (0..m.len()).map(|i| m.f_element(i, z)).collect() {
                Ok(v) => v,
                Err(e) => {
                    t.fail(format!("{tag}: {e}"));
                    return t;
                }
            };
            let sum = fs.iter().skip(1).try_fold(fs[0].clone(), |a, f| a.add(f));
            t.check(sum.as_ref().is_ok_and(|s| *s == m.one(z)), || format!("{tag}: f idempotents do not sum to 1"));
            let cov = match covering_basis(&m) {
                Ok(c) => c,
                Err(e) => {
                    t.fail(format!("{tag}: {e}"));
                    return t;
                }
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed_for(opts, g, *n));
            let picks: Vec<usize> = if cov.len() <= 50 { (0..cov.len()).collect() } else { sample(&mut rng, cov.len(), 50).into_vec() };
            if cov.len() < 50 {
                t.notes.push(format!("{tag}: only {} covering basis elements, all checked", cov.len()));
            }
            for k in picks {
                let x = &cov[k];
                let r: fibrum_core::Result<bool> = (|| {
                    let i = m.l0_index(x).ok_or_else(|| fibrum_core::Error::Internal("l0 missing".into()))?;
                    let j = m.r0_index(x).ok_or_else(|| fibrum_core::Error::Internal("r0 missing".into()))?;
                    let xe = FiberedElement::from_canonical(x, z);
                    let a = m.mul(&xe, &fs[j])?;
                    let fx = m.mul(&fs[i], &xe)?;
                    let b = m.mul(&fx, &fs[j])?;
                    Ok(a == b && b == fx)
                })();
                t.check(matches!(r, Ok(true)), || format!("{tag}: f-deletion fails for covering element {k}: {r:?}"));
            }
            t
        })
        .collect::<Vec<_>>();
    Tally::merge_all(parts)
}

fn covering(opts: &VerifyOptions) -> Tally {
    let parts = idem_grid(opts)
        .par_iter()
        .map(|(g, n)| {
            let mut t = Tally::default();
            let tag = format!("{} N={n}", g.name());
            let m = mgg_pairs(g, *n);
            let r: fibrum_core::Result<(usize, usize, usize, bool)> = (|| {
                let dim = covering_basis(&m)?.len();
                let l = linkage_classes(&m)?;
                let mut expected = 0;
                for c in &l.classes {
                    expected += c.len() * c.len() * gamma_group(&m, c[0])?.order();
                }
                let rep = covering_algebra_report(&m, RingSpec::Z)?;
                Ok((dim, expected, rep.block_sum, rep.blocks.iter().all(|b| b.full_check)))
            })();
            match r {
                Ok((dim, expected, block_sum, full)) => {
                    t.check(dim == expected && dim == block_sum, || format!("{tag}: dim E^c = {dim}, classes give {expected}, report gives {block_sum}"));
                    if !full {
                        t.notes.push(format!("{tag}: off-diagonal matrix units checked against generators of Gamma"));
                    }
                }
                Err(e) => t.fail(format!("{tag}: {e}")),
            }
            if (g.name() == "D8" || g.name() == "Q8") && *n == 4 {
                t.merge(corner_structure(&m, &tag));
            }
            t
        })
        .collect::<Vec<_>>();
    Tally::merge_all(parts)
}

/// `f_i·E^c·f_i ≅ kΓ_i` for every pair: the corner has rank `|Γ_i|` and
/// the images `f_i·γ·f_i` multiply by the table of `Γ_i`.
fn corner_structure(m: &Mgg, tag: &str) -> Tally {
    let mut t = Tally::default();
    let z = RingSpec::Z;
    let r: fibrum_core::Result<()> = (|| {
        let cov = covering_basis(m)?;
        for i in 0..m.len() {
            let f = m.f_element(i, z)?;
            let gamma = gamma_group(m, i)?;
            let corner: Vec<FiberedElement> = cov.iter().map(|b| m.mul(&m.mul(&f, &FiberedElement::from_canonical(b, z))?, &f)).collect::<fibrum_core::Result<_>>()?;
            let rank = rank_of(&corner);
            t.check(rank == gamma.order(), || format!("{tag} pair {i}: corner has rank {rank}, |Gamma| = {}", gamma.order()));
            let img: Vec<FiberedElement> = gamma.elements.iter().map(|c| m.mul(&m.mul(&f, &FiberedElement::from_canonical(c, z))?, &f)).collect::<fibrum_core::Result<_>>()?;
            t.check(img[0] == f, || format!("{tag} pair {i}: the unit of Gamma does not map to f"));
            for a in 0..img.len() {
                for b in 0..img.len() {
                    let ok = m.mul(&img[a], &img[b])? == img[gamma.table.mul(a, b)];
                    t.check(ok, || format!("{tag} pair {i}: structure constant ({a}, {b}) differs from Gamma"));
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = r {
        t.fail(format!("{tag}: {e}"));
    }
    t
}

fn ses(opts: &VerifyOptions) -> Tally {
    let parts = idem_grid(opts)
        .par_iter()
        .map(|(g, n)| {
            let mut t = Tally::default();
            let m = mgg_pairs(g, *n);
            let mut corrected = true;
            for (i, p) in m.pairs.iter().enumerate().filter(|(_, p)| p.kappa.is_faithful()) {
                let tag = format!("{} N={n} |K|={}", g.name(), p.k.order());
                match ses_report(&m, i) {
                    Ok(r) => {
                        t.check(r.kernel_is_iota_image, || format!("{tag}: ker pi differs from im iota"));
                        t.check(r.order_identity, || {
                            format!("{tag}: |Gamma| = {} but |(G/K)*|*|im pi| = {}*{} (|im iota| = {})", r.gamma_order, r.dual_order, r.image.len(), r.iota_image_order)
                        });
                        corrected &= r.gamma_order == r.iota_image_order * r.image.len();
                        if g.name() == "Q8" && *n == 4 && p.k == g.center() {
                            t.check(r.dual_order == 4, || format!("{tag}: |(C2xC2)*| = {}", r.dual_order));
                            t.check(r.gamma_order == r.dual_order * r.image.len(), || {
                                format!("{tag}: orders do not reconcile: |Gamma| = {}, |(G/K)*| = {}, |im pi| = {}", r.gamma_order, r.dual_order, r.image.len())
                            });
                        }
                    }
                    Err(e) => t.fail(format!("{tag}: {e}")),
                }
            }
            t.notes.push(format!("{} N={n}: |Gamma| = |im iota|*|im pi| {}", g.name(), if corrected { "holds" } else { "FAILS" }));
            t
        })
        .collect::<Vec<_>>();
    Tally::merge_all(parts)
}

fn c4_example() -> Tally {
    let mut t = Tally::default();
    let c4 = grp("C4");
    let cat = small_catalog(3);
    let k = c4.subgroup(&[0, 2]).expect("subgroup");
    let r: fibrum_core::Result<()> = (|| {
        let at2 = reduced_pairs_bruteforce(&c4, 2, &cat)?;
        t.check(at2.catalog_complete, || "catalog below order 4 is not complete".into());
        t.check(at2.is_reduced(&k, &AHom { n: 2, vals: vec![0, 1] }) == Some(true), || "(C2, kappa) is not reduced at N=2".into());
        let kappa = AHom { n: 4, vals: vec![0, 2] };
        let at4 = reduced_pairs_bruteforce(&c4, 4, &cat)?;
        let e = at4.entries.iter().find(|e| e.pair.k == k && e.pair.kappa == kappa);
        let brute = e.map(|e| e.reduced);
        t.check(brute == Some(false), || "(C2, kappa) is reduced at N=4".into());
        match e.and_then(|e| e.witness.as_ref()) {
            Some(w) => {
                let l = w.left();
                t.check(l.p.order() == 4 && l.k == k && l.kappa == kappa && w.space.h.order() < 4, || "witness has the wrong left triple".into());
                t.notes.push(format!("witness: {}", serde_json::to_string(&PairJson::from_pair(w)).unwrap_or_default()));
            }
            None => t.fail("no witness emitted at N=4".into()),
        }
        let hyp = reduced_criterion_hypothesis(&c4, &k, &kappa, 4)?;
        t.check(Some(hyp) == brute, || format!("hypothesis criterion says reduced = {hyp}"));
        Ok(())
    })();
    if let Err(e) = r {
        t.fail(e.to_string());
    }
    t
}

fn center_index(m: &Mgg) -> Option<usize> {
    (0..m.len()).find(|&i| m.pairs[i].k == m.g.center() && m.pairs[i].kappa.is_faithful())
}

fn romero() -> Tally {
    let mut t = Tally::default();
    let (q8, d8) = (grp("Q8"), grp("D8"));
    for (n, expect) in [(4u32, true), (2, false)] {
        let r: fibrum_core::Result<()> = (|| {
            let (mq, md) = (mgg_pairs(&q8, n), mgg_pairs(&d8, n));
            let (iq, id) = (center_index(&mq).expect("faithful central pair"), center_index(&md).expect("faithful central pair"));
            let brute = linked(&mq, iq, &md, id)?;
            let coh = linkage_via_cohomology(&q8, &mq.pairs[iq], &d8, &md.pairs[id], n)?;
            t.check(brute == expect, || format!("N={n}: search reports linked = {brute}"));
            t.check(coh.linked == expect, || format!("N={n}: cohomological criterion reports linked = {}", coh.linked));
            if expect {
                let b = gamma_bimodule(&mq, iq, &md, id)?;
                match b.elements.first() {
                    Some(w) => {
                        let phi_order = w.u.iter().map(|z| w.phi.at(&w.u, z)).map(|v| n / gcd(n as u64, v as u64) as u32).max().unwrap_or(1);
                        t.check(phi_order == 4, || format!("witness character has order {phi_order}"));
                        t.notes.push(format!("witness: {}", serde_json::to_string(&PairJson::from_pair(w)).unwrap_or_default()));
                    }
                    None => t.fail("no witness pair emitted".into()),
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.fail(format!("N={n}: {e}"));
        }
    }
    t
}

fn central_faithful(g: &GroupRef, n: u32) -> Vec<(Subgroup, AHom)> {
    let z = g.center();
    let mut out = Vec::new();
    for k in g.subgroups().into_iter().filter(|k| k.is_subset(&z)) {
        if !k.iter().any(|x| g.elem_order(x) == k.order()) {
            continue;
        }
        out.extend(homs_to_cyclic(g, &k, n).into_iter().filter(|c| c.is_faithful()).map(|c| (k.clone(), c)));
    }
    out
}

fn squeezing(opts: &VerifyOptions) -> Tally {
    let max = opts.max_order.unwrap_or(8).min(8);
    let cases: Vec<(GroupRef, u32)> = small_catalog(max).groups.into_iter().flat_map(|g| [g.order() as u32, 2 * g.order() as u32].map(|n| (g.clone(), n))).collect();
    let parts = cases
        .par_iter()
        .map(|(g, n)| {
            let mut t = Tally::default();
            let n = *n;
            let z = RingSpec::Z;
            let mg = mgg_pairs(g, n);
            for (k, kappa) in central_faithful(g, n) {
                let tag = format!("{} N={n} |K|={}", g.name(), k.order());
                let r: fibrum_core::Result<()> = (|| {
                    let sq = squeeze(g, &k, &kappa, n)?;
                    let (_, ins, del) = ins_del(g, &k, &kappa, n)?;
                    let gt = &sq.g_tilde;
                    let (l, r) = (ins.left(), ins.right());
                    let kt = &sq.kt_in_gt;
                    let center_derived = gt.intersect(&gt.center(), &gt.derived());
                    let quotient_ok = gt.quotient(kt).map(|q| isomorphic(&q.group, &sq.quotient).is_some()).unwrap_or(false);
                    let post = [
                        ("p1(M) = G", l.p.order() == g.order()),
                        ("k1(M) = K", l.k == k),
                        ("mu1 = kappa", l.kappa == kappa),
                        ("p2(M) = G~", r.p.order() == gt.order()),
                        ("k2(M) = K~", r.k == *kt),
                        ("mu2 = kappa|K~", r.kappa == sq.kappa_tilde()),
                        ("K~ <= Z(G~) and G~'", kt.is_subset(&center_derived) && kt.order() == sq.k_tilde.order() && quotient_ok),
                    ];
                    for (what, ok) in post {
                        t.check(ok, || format!("{tag}: {what} fails"));
                    }
                    let e = FiberedElement::from_pair(&mg.e_pair(mg.index_of(&k, &kappa).expect("pair in M_G^G")), z);
                    let id = FiberedElement::from_pair(&ins, z).mul(&FiberedElement::from_pair(&del, z))?;
                    t.check(id.rehome(&e.space)? == e, || format!("{tag}: Ins*Del is not e_(K,kappa)"));
                    let mt = mgg_pairs(gt, n);
                    let j = mt.index_of(kt, &sq.kappa_tilde()).ok_or_else(|| fibrum_core::Error::Internal("(K~, kappa~) not G~-stable".into()))?;
                    let et = FiberedElement::from_pair(&mt.e_pair(j), z);
                    let dd = FiberedElement::from_pair(&del, z).mul(&FiberedElement::from_pair(&ins, z))?;
                    t.check(dd.rehome(&et.space)? == et, || format!("{tag}: Del*Ins is not e_(K~, kappa~)"));
                    Ok(())
                })();
                if let Err(e) = r {
                    t.fail(format!("{tag}: {e}"));
                }
            }
            t
        })
        .collect::<Vec<_>>();
    Tally::merge_all(parts)
}

fn decompositions(opts: &VerifyOptions) -> Tally {
    let max = opts.max_order.unwrap_or(8).min(8);
    let groups = small_catalog(max).groups;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let admissible: Vec<(GroupRef, GroupRef)> = groups.iter().flat_map(|g| groups.iter().map(move |h| (g.clone(), h.clone()))).collect();
    let draws: Vec<(usize, u64)> = (0..100).map(|_| (rng.gen_range(0..admissible.len()), rng.gen())).collect();
    let parts = draws
        .par_iter()
        .map(|&(a, s)| {
            let mut t = Tally::default();
            let (g, h) = &admissible[a];
            // Hypothesis mode: both orders divide N.
            let n = lcm(g.order() as u64, h.order() as u64) as u32;
            let tag = format!("{}x{} N={n}", g.name(), h.name());
            let r: fibrum_core::Result<()> = (|| {
                let space = Space::new(g.clone(), h.clone(), n);
                let basis = standard_basis(&space)?;
                let p = &basis[(s % basis.len() as u64) as usize].0;
                let z = RingSpec::Z;
                let want = FiberedElement::from_pair(p, z);
                let five = decompose_standard(p)?;
                t.check(product_of(&five.factors(), z)?.rehome(&space)? == want, || format!("{tag}: five factors do not reassemble"));
                let seven = full_decomposition(p)?;
                t.check(product_of(&seven.factors(), z)?.rehome(&space)? == want, || format!("{tag}: seven factors do not reassemble"));
                let mid = &seven.middle;
                let (l, r) = (mid.left(), mid.right());
                let ok = reduced_criterion_hypothesis(&mid.space.g, &l.k, &l.kappa, n)? && reduced_criterion_hypothesis(&mid.space.h, &r.k, &r.kappa, n)?;
                t.check(ok, || format!("{tag}: middle factor is not reduced on both sides"));
                Ok(())
            })();
            if let Err(e) = r {
                t.fail(format!("{tag}: {e}"));
            }
            t
        })
        .collect::<Vec<_>>();
    Tally::merge_all(parts)
}

fn alpha(opts: &VerifyOptions) -> Tally {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // (a): commutator products in explicit central extensions.
    for name in ["C4", "Q8", "D8"] {
        let g = grp(name);
        let Some(k) = g.subgroups().into_iter().find(|s| s.order() == 2 && s.is_subset(&g.center())) else {
            t.fail(format!("{name}: no central subgroup of order 2"));
            continue;
        };
        let r: fibrum_core::Result<()> = (|| {
            let sc = section_with_cocycle(&g, &k)?;
            let ak = AbelianSub::new(&g, &k)?;
            let q: GroupRef = Arc::new(sc.quotient.group.clone());
            let a = CocycleTable::from_fn(&q, &ak.ab, |x, y| ak.coord(sc.alpha(x, y)));
            for _ in 0..200 {
                let n = rng.gen_range(1..=3);
                let s: Vec<usize> = (0..2 * n).map(|_| rng.gen_range(0..q.order())).collect();
                let (mut lhs, mut c) = (0, 0);
                for i in 0..n {
                    lhs = g.mul(lhs, g.commutator(sc.section[s[2 * i]], sc.section[s[2 * i + 1]]));
                    c = q.mul(c, q.commutator(s[2 * i], s[2 * i + 1]));
                }
                let an = alpha_n(&a, n, &s)?;
                t.check(lhs == g.mul(ak.elem(&g, &an), sc.section[c]), || format!("(a) {name}/Z2 at {s:?}"));
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.fail(format!("(a) {name}: {e}"));
        }
    }
    // (b), (e), (f): exhaustively over 4-tuples of small groups.
    for name in ["C2", "C3", "C4", "C2xC2", "S3"] {
        let q = grp(name);
        let b = FinAb::cyclic(6);
        let r: fibrum_core::Result<()> = (|| {
            let h = h2_group(&q, &b)?;
            let gens = h.z2_generators();
            let pick = |rng: &mut ChaCha8Rng| {
                gens.iter().fold(CocycleTable::zero(&q, &b), |acc, z| acc.add(&z.scale(rng.gen_range(0..6))))
            };
            let (x, y) = (pick(&mut rng), pick(&mut rng));
            let qn = q.order();
            let mu: Vec<Vec<u64>> = (0..qn).map(|_| vec![rng.gen_range(0..6)]).collect();
            let cob = CocycleTable::coboundary(&q, &b, &mu);
            let sym = if q.is_abelian() { symmetric_generators(&q, &b)? } else { Vec::new() };
            for i in 0..qn.pow(4) {
                let tuple: Vec<usize> = (0..4).map(|d| (i / qn.pow(d)) % qn).collect();
                for n in 1..=2 {
                    let s = &tuple[..2 * n];
                    let lhs = alpha_n(&x.add(&y), n, s)?;
                    t.check(lhs == b.add(&alpha_n(&x, n, s)?, &alpha_n(&y, n, s)?), || format!("(b) {name} at {s:?}"));
                    let c = (0..n).fold(0, |c, i| q.mul(c, q.commutator(s[2 * i], s[2 * i + 1])));
                    t.check(alpha_n(&cob, n, s)? == b.neg(&mu[c]), || format!("(f) {name} at {s:?}"));
                    for gen in &sym {
                        let a = gen.add(&CocycleTable::from_fn(&q, &b, |_, _| vec![5]));
                        t.check(alpha_n(&a, n, s)? == b.neg(a.at(0, 0)), || format!("(e) {name} at {s:?}"));
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.fail(format!("(b,e,f) {name}: {e}"));
        }
    }
    t
}

fn trivial_quadruple(n: u32, p: u64) -> fibrum_core::Result<Quadruple> {
    let c1 = grp("C1");
    let one = c1.trivial_subgroup();
    Quadruple::new(&c1, n, &one, &AHom::trivial(&one, n), GammaModule::trivial(&Group::trivial(), p), None)
}

fn simple() -> Tally {
    let mut t = Tally::default();
    for (name, p) in [("C2", 3u64), ("C3", 7), ("C4", 5), ("S3", 7)] {
        let g = grp(name);
        let n = g.order() as u32;
        let r: fibrum_core::Result<()> = (|| {
            let q = trivial_quadruple(n, p)?;
            let d = simple_evaluation(&q, &g)?;
            let classes = g.conjugacy_classes().len();
            t.check(d == classes, || format!("dim S(1,1,1,F_{p})({name}) = {d}, expected {classes}"));
            // Quadruples over G itself vanish at every smaller group.
            let cat = small_catalog(g.order() - 1);
            let rep = reduced_pairs_bruteforce(&g, n, &cat)?;
            let m = mgg_pairs(&g, n);
            for (i, e) in rep.entries.iter().enumerate().filter(|(_, e)| e.reduced) {
                let gamma = gamma_group(&m, i)?;
                let q = Quadruple::new(&g, n, &e.pair.k, &e.pair.kappa, GammaModule::trivial(&gamma.table, p), Some(&cat))?;
                for h in &cat.groups {
                    let d = simple_evaluation(&q, h)?;
                    t.check(d == 0, || format!("{name} |K|={} at {}: dim {d}", e.pair.k.order(), h.name()));
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.fail(format!("{name}: {e}"));
        }
    }
    t
}

fn center_quadruple(name: &str, n: u32, p: u64) -> fibrum_core::Result<Quadruple> {
    let g = grp(name);
    let pair = CentralPair { k: g.center(), kappa: AHom { n, vals: vec![0, n / 2] } };
    let m = mgg_pairs(&g, n);
    let i = m.index_of(&pair.k, &pair.kappa).ok_or_else(|| fibrum_core::Error::Internal("center pair missing".into()))?;
    let gamma = gamma_group(&m, i)?;
    Quadruple::new(&g, n, &pair.k, &pair.kappa, GammaModule::trivial(&gamma.table, p), Some(&small_catalog(7)))
}

fn quadruples() -> Tally {
    let mut t = Tally::default();
    let r: fibrum_core::Result<()> = (|| {
        let q = center_quadruple("Q8", 4, 5)?;
        let d = center_quadruple("D8", 4, 5)?;
        t.check(quadruple_linkage(&q, &d)?, || "Q8 and D8 quadruples are not linked".into());
        let tests = small_catalog(8).groups;
        let dims: Vec<fibrum_core::Result<(usize, usize)>> = tests.par_iter().map(|h| Ok((simple_evaluation(&q, h)?, simple_evaluation(&d, h)?))).collect();
        for (h, r) in tests.iter().zip(dims) {
            let (a, b) = r?;
            t.check(a == b, || format!("at {}: Q8 gives {a}, D8 gives {b}", h.name()));
            if h.order() == 8 && a > 0 {
                t.notes.push(format!("{}: dim {a}", h.name()));
            }
        }
        Ok(())
    })();
    if let Err(e) = r {
        t.fail(e.to_string());
    }
    t
}

fn burnside_kernel() -> Tally {
    let mut t = Tally::default();
    for p in [2u64, 3] {
        match burnside_kernel_check(p) {
            Ok(k) => {
                t.check(k.nonzero(), || format!("p={p}: element is zero"));
                t.check(k.annihilated(), || format!("p={p}: images {:?}", k.images));
                t.check(k.formula_agrees, || format!("p={p}: Mackey pairings differ from |P\\G/Q|"));
            }
            Err(e) => t.fail(format!("p={p}: {e}")),
        }
    }
    t
}
