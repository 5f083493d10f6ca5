//! The essential algebra `Ē_G`, reduced pairs by exhaustive search, simple
//! `kΓ`-modules at desk scale, quadruples `(G,K,κ,V)` and evaluations of the
//! simple functors `S_{(G,K,κ,V)}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_internal, internal, pre, Error, Result};
use crate::fib::{basis_with_filter, goursat_subgroups, CanonicalPair, FiberPair, FiberedElement, GoursatFilter, Space};
use crate::grp::{gcd, homs_to_cyclic, isomorphic, lcm, AHom, Catalog, Group, GroupRef, Subgroup};
use crate::idem::{covering_basis, gamma_bimodule, gamma_group, linkage_classes, mgg_pairs, pairs_with_ends, CentralPair, GammaGroup, Mgg};
use crate::linalg::{is_prime, mat_mul, nullspace_fp, pow_mod, primitive_root, rank_fp, Mat};
use crate::ring::RingSpec;

/// Default bound on `|G|·|H|` for [`simple_evaluation`].
pub const EVALUATION_BOUND: usize = 64;
/// Spin-simplicity is checked only for `p ≤ SPIN_MAX_P` and `dim ≤ SPIN_MAX_DIM`.
pub const SPIN_MAX_P: u64 = 7;
pub const SPIN_MAX_DIM: usize = 4;

/// Reducedness of one `(K,κ) ∈ M_G^G`.
#[derive(Clone, Debug)]
pub struct ReducedEntry {
    pub pair: CentralPair,
    pub reduced: bool,
    /// A pair `(U,φ)` over `G×H`, `|H| < |G|`, with `l(U,φ) = (G,K,κ)` and
    /// `p₂(U) = H`.
    pub witness: Option<FiberPair>,
    /// `κ` faithful and `K ≤ Z(G)`.
    pub necessary: bool,
    /// `κ` faithful and `K ≤ G'`.
    pub sufficient: bool,
}

impl ReducedEntry {
    /// Neither condition decides the pair.
    pub fn is_gap(&self) -> bool {
        self.necessary && !self.sufficient
    }
}

#[derive(Clone, Debug)]
pub struct ReducedReport {
    pub g: GroupRef,
    pub n: u32,
    pub entries: Vec<ReducedEntry>,
    /// The catalog covers every isomorphism class of order `< |G|`.
    pub catalog_complete: bool,
}

impl ReducedReport {
    pub fn is_reduced(&self, k: &Subgroup, kappa: &AHom) -> Option<bool> {
        self.entries.iter().find(|e| e.pair.k == *k && e.pair.kappa == *kappa).map(|e| e.reduced)
    }
}

fn catalog_covers(catalog: &Catalog, order: usize) -> bool {
    let max = catalog.groups.iter().map(|g| g.order()).max().unwrap_or(0);
    (catalog.complete || order <= 16) && max + 1 >= order && (1..order).all(|m| catalog.groups.iter().any(|g| g.order() == m))
}

/// First `(U,φ)` over `G×H` with `l(U,φ) = (G,K,κ)` and `p₂(U) = H`.
pub fn linking_witness(g: &GroupRef, pair: &CentralPair, h: &GroupRef, n: u32) -> Result<Option<FiberPair>> {
    if g.order() * h.order() > 1024 {
        return Err(Error::Resource(format!("|G×H| = {} is too large for the witness search", g.order() * h.order())));
    }
    let space = Space::new(g.clone(), h.clone(), n);
    let f = GoursatFilter { p1: Some(g.whole()), k1: Some(pair.k.clone()), p2: Some(h.whole()), k2: None, reps_only: false };
    for u in goursat_subgroups(&space, &f)? {
        for phi in homs_to_cyclic(&space.gh, &u, n) {
            let p = FiberPair { space: space.clone(), u: u.clone(), phi };
            if p.left().kappa == pair.kappa {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

/// Reducedness of every `(K,κ) ∈ M_G^G`: `(K,κ)` is not reduced iff it is
/// linked to a triple over a group of smaller order.
pub fn reduced_pairs_bruteforce(g: &GroupRef, n: u32, catalog: &Catalog) -> Result<ReducedReport> {
    let m = mgg_pairs(g, n);
    let z = g.center();
    let d = g.derived();
    let mut entries = Vec::new();
    for pair in &m.pairs {
        let mut witness = None;
        let idx = g.order() / pair.k.order();
        for h in catalog.groups.iter().filter(|h| h.order() < g.order() && h.order() >= idx) {
            if let Some(w) = linking_witness(g, pair, h, n)? {
                witness = Some(w);
                break;
            }
        }
        let faithful = pair.kappa.is_faithful();
        entries.push(ReducedEntry {
            pair: pair.clone(),
            reduced: witness.is_none(),
            witness,
            necessary: faithful && pair.k.is_subset(&z),
            sufficient: faithful && pair.k.is_subset(&d),
        });
    }
    for e in &entries {
        ensure_internal!(!e.reduced || e.necessary, "a reduced pair violates the necessary condition");
        ensure_internal!(!e.sufficient || e.reduced, "a pair meeting the sufficient condition has a witness");
    }
    Ok(ReducedReport { g: g.clone(), n, entries, catalog_complete: catalog_covers(catalog, g.order()) })
}

/// One block of `Ē_G`, indexed by a reduced linkage class.
#[derive(Clone, Debug)]
pub struct EssentialBlock {
    /// Indices into `M_G^G`.
    pub members: Vec<usize>,
    pub gamma_order: usize,
}

impl EssentialBlock {
    pub fn dim(&self) -> usize {
        self.members.len() * self.members.len() * self.gamma_order
    }
}

#[derive(Clone, Debug)]
pub struct EssentialReport {
    pub g: GroupRef,
    pub n: u32,
    pub ring: RingSpec,
    pub reduced: ReducedReport,
    pub basis: Vec<CanonicalPair>,
    /// Whether each basis element lies in the spanning set of `I_G`.
    pub in_ideal: Vec<bool>,
    pub blocks: Vec<EssentialBlock>,
    /// Number of basis elements outside `I_G`.
    pub dim: usize,
    /// Covering basis elements inside `I_G`, and `Σ |class|²·|Γ|` over the
    /// non-reduced classes.
    pub intersection_dim: usize,
    pub intersection_expected: usize,
}

/// `I_G`-basis flags, the blocks of `Ē_G` and the checks `E^c + I_G = E_G`
/// and `E^c ∩ I_G = ⊕_{non-reduced} f_class E^c`.
pub fn essential_basis(g: &GroupRef, n: u32, ring: RingSpec, catalog: &Catalog) -> Result<EssentialReport> {
    let m = mgg_pairs(g, n);
    let reduced = reduced_pairs_bruteforce(g, n, catalog)?;
    let red: Vec<bool> = m.pairs.iter().map(|p| reduced.is_reduced(&p.k, &p.kappa).expect("listed")).collect();
    let basis = crate::fib::standard_basis(&m.space)?;
    let mut in_ideal = Vec::with_capacity(basis.len());
    let mut intersection_dim = 0;
    for b in &basis {
        let flag = if b.is_covering() {
            let i = m.l0_index(b).ok_or_else(|| internal!("l₀ of a covering pair is not in M_G^G"))?;
            let j = m.r0_index(b).ok_or_else(|| internal!("r₀ of a covering pair is not in M_G^G"))?;
            ensure_internal!(red[i] == red[j], "l₀ and r₀ of a covering pair differ in reducedness");
            if !red[i] {
                intersection_dim += 1;
            }
            !red[i]
        } else {
            true
        };
        in_ideal.push(flag);
    }
    let link = linkage_classes(&m)?;
    let mut blocks = Vec::new();
    let mut intersection_expected = 0;
    for (c, members) in link.classes.iter().enumerate() {
        let rep = members[0];
        ensure_internal!(members.iter().all(|&i| red[i] == red[rep]), "reducedness is not constant on a linkage class");
        let gamma_order = gamma_group(&m, rep)?.order();
        let block = EssentialBlock { members: members.clone(), gamma_order };
        if red[rep] {
            blocks.push(block);
        } else {
            intersection_expected += block.dim();
            let f = link.f_class(&m, c, ring)?;
            for (t, _) in f.terms() {
                let i = m.l0_index(&t).ok_or_else(|| internal!("f_class has a term outside E^c"))?;
                ensure_internal!(!red[i], "f of a non-reduced class has a reduced term");
            }
        }
    }
    let dim = in_ideal.iter().filter(|&&f| !f).count();
    let block_sum: usize = blocks.iter().map(|b| b.dim()).sum();
    ensure_internal!(dim == block_sum, "dim Ē_G = {dim} but the reduced blocks give {block_sum}");
    ensure_internal!(intersection_dim == intersection_expected, "E^c ∩ I_G has dimension {intersection_dim}, expected {intersection_expected}");
    ensure_internal!(covering_basis(&m)?.len() >= dim, "E^c is too small");
    Ok(EssentialReport { g: g.clone(), n, ring, reduced, basis, in_ideal, blocks, dim, intersection_dim, intersection_expected })
}

/// How simplicity of a module was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Simplicity {
    /// One-dimensional.
    Trivial,
    /// Every nonzero vector spins to the whole space.
    Checked,
    /// Beyond the spin bounds; taken on trust.
    Assumed,
}

/// A `kΓ`-module over F_p, one matrix per element of `Γ`.
#[derive(Clone, Debug)]
pub struct GammaModule {
    pub p: u64,
    pub dim: usize,
    pub mats: Vec<Mat>,
    pub simplicity: Simplicity,
}

fn identity_mat(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
}

impl GammaModule {
    pub fn trivial(gamma: &Group, p: u64) -> GammaModule {
        GammaModule { p, dim: 1, mats: vec![vec![vec![1]]; gamma.order()], simplicity: Simplicity::Trivial }
    }

    /// One-dimensional module `γ ↦ ζ^{c(γ)}` for `c: Γ → Z/(p−1)`.
    pub fn character(gamma: &Group, p: u64, c: &AHom) -> Result<GammaModule> {
        let w = primitive_root(p).ok_or_else(|| pre!("{p} is not prime"))?;
        if c.n as u64 != p - 1 || !c.is_hom(gamma, &gamma.whole()) {
            return Err(pre!("not a homomorphism Γ → Z/{}", p - 1));
        }
        let mats = c.vals.iter().map(|&v| vec![vec![pow_mod(w, v as u64, p)]]).collect();
        Ok(GammaModule { p, dim: 1, mats, simplicity: Simplicity::Trivial })
    }

    /// Module relations, then the spin test where it is affordable.
    pub fn validate(mut self, gamma: &Group) -> Result<GammaModule> {
        let p = self.p;
        if !is_prime(p) {
            return Err(pre!("{p} is not prime"));
        }
        if self.mats.len() != gamma.order() {
            return Err(pre!("module has {} matrices for |Γ| = {}", self.mats.len(), gamma.order()));
        }
        let d = self.dim;
        if d == 0 || self.mats.iter().any(|m| m.len() != d || m.iter().any(|r| r.len() != d || r.iter().any(|&x| x >= p))) {
            return Err(pre!("module matrices must be {d}×{d} over F_{p}"));
        }
        if self.mats[0] != identity_mat(d) {
            return Err(pre!("the identity of Γ does not act as the identity"));
        }
        for a in 0..gamma.order() {
            for b in 0..gamma.order() {
                if mat_mul(&self.mats[a], &self.mats[b], p) != self.mats[gamma.mul(a, b)] {
                    return Err(pre!("module relation fails for ({a}, {b})"));
                }
            }
        }
        self.simplicity = if d == 1 {
            Simplicity::Trivial
        } else if p <= SPIN_MAX_P && d <= SPIN_MAX_DIM {
            if !self.spins() {
                return Err(pre!("module is not simple"));
            }
            Simplicity::Checked
        } else {
            Simplicity::Assumed
        };
        Ok(self)
    }

    fn spins(&self) -> bool {
        let (p, d) = (self.p, self.dim);
        let total = p.pow(d as u32);
        (1..total).all(|mut i| {
            let v: Vec<u64> = (0..d)
                .map(|_| {
                    let x = i % p;
                    i /= p;
                    x
                })
                .collect();
            let rows: Mat = self.mats.iter().map(|m| (0..d).map(|r| (0..d).map(|c| m[r][c] * v[c]).sum::<u64>() % p).collect()).collect();
            rank_fp(&rows, p) == d
        })
    }

    /// The matrix of `Σ c_γ γ`.
    pub fn act(&self, coeffs: &[(usize, u64)]) -> Mat {
        let mut out = vec![vec![0u64; self.dim]; self.dim];
        for &(g, c) in coeffs {
            for (r, row) in out.iter_mut().enumerate() {
                for (x, &y) in row.iter_mut().zip(&self.mats[g][r]) {
                    *x = (*x + c * y) % self.p;
                }
            }
        }
        out
    }

    /// `a ↦ self(f(a))` for a homomorphism `f` given as an image table.
    pub fn pullback(&self, f: &[usize]) -> GammaModule {
        GammaModule { p: self.p, dim: self.dim, mats: f.iter().map(|&x| self.mats[x].clone()).collect(), simplicity: self.simplicity }
    }
}

/// Whether two simple modules of the same group are isomorphic, by solving
/// for a nonzero intertwiner.
pub fn modules_isomorphic(a: &GammaModule, b: &GammaModule) -> bool {
    if a.p != b.p || a.dim != b.dim || a.mats.len() != b.mats.len() {
        return false;
    }
    let (p, d) = (a.p, a.dim);
    // Unknown X (d×d, row-major): A_g X − X B_g = 0.
    let mut rows: Mat = Vec::new();
    for (ag, bg) in a.mats.iter().zip(&b.mats) {
        for i in 0..d {
            for j in 0..d {
                let mut row = vec![0u64; d * d];
                for k in 0..d {
                    row[k * d + j] = (row[k * d + j] + ag[i][k]) % p;
                    row[i * d + k] = (row[i * d + k] + p - bg[k][j]) % p;
                }
                rows.push(row);
            }
        }
    }
    !nullspace_fp(&rows, d * d, p).is_empty()
}

/// Simple `kΓ`-modules: all characters when `Γ` is abelian with exponent
/// dividing `p−1`, otherwise the trivial module plus the validated extras.
pub fn gamma_irreducibles(gamma: &Group, p: u64, extra: &[GammaModule]) -> Result<Vec<GammaModule>> {
    if !is_prime(p) {
        return Err(pre!("{p} is not prime"));
    }
    if (gamma.order() as u64).is_multiple_of(p) {
        return Err(pre!("p = {p} divides |Γ| = {}", gamma.order()));
    }
    if gamma.is_abelian() && (p - 1).is_multiple_of(gamma.exponent()) {
        let out: Vec<GammaModule> =
            homs_to_cyclic(gamma, &gamma.whole(), (p - 1) as u32).iter().map(|c| GammaModule::character(gamma, p, c)).collect::<Result<_>>()?;
        ensure_internal!(out.len() == gamma.order(), "character count differs from |Γ|");
        return Ok(out);
    }
    let mut out = vec![GammaModule::trivial(gamma, p)];
    for m in extra {
        let m = m.clone().validate(gamma)?;
        if !out.iter().any(|x| modules_isomorphic(x, &m)) {
            out.push(m);
        }
    }
    Ok(out)
}

/// How reducedness of a quadruple's pair was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReducedBy {
    /// Exhaustive search over a catalog, with its completeness flag.
    Search { complete: bool },
    /// The criterion valid when `|G|` divides `N`.
    Hypothesis,
}

/// `(G, K, κ, V)` with `(K,κ)` reduced and `V` a simple `kΓ_{(G,K,κ)}`-module.
#[derive(Clone, Debug)]
pub struct Quadruple {
    pub g: GroupRef,
    pub n: u32,
    pub mgg: Mgg,
    pub index: usize,
    pub gamma: GammaGroup,
    pub module: GammaModule,
    pub reduced_by: ReducedBy,
}

impl Quadruple {
    /// Checks `(K,κ) ∈ M_G^G`, reducedness (by catalog search when given,
    /// otherwise by the hypothesis-mode criterion) and the module.
    pub fn new(g: &GroupRef, n: u32, k: &Subgroup, kappa: &AHom, module: GammaModule, catalog: Option<&Catalog>) -> Result<Quadruple> {
        let mgg = mgg_pairs(g, n);
        let index = mgg.index_of(k, kappa).ok_or_else(|| pre!("(K, κ) is not a G-stable pair over {}", g.name()))?;
        let reduced_by = match catalog {
            Some(c) => {
                let pair = &mgg.pairs[index];
                let mut reduced = true;
                for h in c.groups.iter().filter(|h| h.order() < g.order() && h.order() >= g.order() / k.order()) {
                    if linking_witness(g, pair, h, n)?.is_some() {
                        reduced = false;
                        break;
                    }
                }
                if !reduced {
                    return Err(pre!("(K, κ) is not reduced"));
                }
                ReducedBy::Search { complete: catalog_covers(c, g.order()) }
            }
            None => {
                if !crate::cohom::reduced_criterion_hypothesis(g, k, kappa, n)? {
                    return Err(pre!("(K, κ) is not reduced"));
                }
                ReducedBy::Hypothesis
            }
        };
        let gamma = gamma_group(&mgg, index)?;
        let module = module.validate(&gamma.table)?;
        Ok(Quadruple { g: g.clone(), n, mgg, index, gamma, module, reduced_by })
    }

    pub fn pair(&self) -> &CentralPair {
        &self.mgg.pairs[self.index]
    }

    /// Size of the linkage class of `(K,κ)` in `M_G^G`.
    pub fn class_size(&self) -> Result<usize> {
        let l = linkage_classes(&self.mgg)?;
        Ok(l.classes[l.class_of[self.index]].len())
    }
}

fn extends(t_k: &Subgroup, t_kappa: &AHom, pair: &CentralPair) -> bool {
    pair.k.is_subset(t_k) && t_kappa.restrict(t_k, &pair.k) == pair.kappa
}

/// `dim_k S_{(G,K,κ,V)}(H)`: the rank of the pairing
/// `(y, x⊗v) ↦ f·(y·x)·v` with `x ∈ B(H,G)·e_{(K,κ)}`, `y ∈ e_{(K,κ)}·B(G,H)`,
/// where `b ∈ E_G` acts on `V` through the `Γ`-part of `b·f_{(K,κ)}`.
pub fn simple_evaluation(q: &Quadruple, h: &GroupRef) -> Result<usize> {
    simple_evaluation_bounded(q, h, EVALUATION_BOUND)
}

pub fn simple_evaluation_bounded(q: &Quadruple, h: &GroupRef, bound: usize) -> Result<usize> {
    let g = &q.g;
    if g.order() * h.order() > bound {
        return Err(Error::Resource(format!("|G|·|H| = {} exceeds the evaluation bound {bound}", g.order() * h.order())));
    }
    let p = q.module.p;
    let ring = RingSpec::fp(p)?;
    let pair = q.pair().clone();
    let n = q.n;
    let hg = Space::new(h.clone(), g.clone(), n);
    let gh = Space::new(g.clone(), h.clone(), n);
    let xs = basis_with_filter(&hg, &GoursatFilter { p2: Some(g.whole()), reps_only: true, ..Default::default() }, |x| {
        let r = x.right();
        extends(&r.k, &r.kappa, &pair)
    })?;
    let ys = basis_with_filter(&gh, &GoursatFilter { p1: Some(g.whole()), reps_only: true, ..Default::default() }, |y| {
        let l = y.left();
        extends(&l.k, &l.kappa, &pair)
    })?;
    let f = q.mgg.f_element(q.index, ring)?;
    let gamma_idx: BTreeMap<&CanonicalPair, usize> = q.gamma.elements.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let d = q.module.dim;
    let mut mat: Mat = vec![vec![0u64; xs.len() * d]; ys.len() * d];
    let xe: Vec<FiberedElement> = xs.iter().map(|x| FiberedElement::from_canonical(x, ring)).collect();
    for (yi, y) in ys.iter().enumerate() {
        let ye = FiberedElement::from_canonical(y, ring);
        for (xi, x) in xe.iter().enumerate() {
            let b = ye.mul_into(&q.mgg.space, x)?;
            if b.is_zero() {
                continue;
            }
            let bf = b.mul_into(&q.mgg.space, &f)?;
            let mut coeffs = Vec::new();
            for (t, c) in bf.terms() {
                if let Some(&gi) = gamma_idx.get(&t) {
                    coeffs.push((gi, c.residue(p).ok_or_else(|| internal!("coefficient outside F_{p}"))?));
                }
            }
            if coeffs.is_empty() {
                continue;
            }
            let a = q.module.act(&coeffs);
            for t in 0..d {
                for s in 0..d {
                    mat[yi * d + t][xi * d + s] = a[t][s];
                }
            }
        }
    }
    Ok(rank_fp(&mat, p))
}

/// The module `W` over `Γ_{(H,L,λ)}` that corresponds to `V` over
/// `Γ_{(G,K,κ)}` under the bimodule of pairs linking the two triples.
pub fn transport_module(q: &Quadruple, h: &GroupRef, target: &CentralPair) -> Result<Option<GammaModule>> {
    let mh = mgg_pairs(h, q.n);
    let j = mh.index_of(&target.k, &target.kappa).ok_or_else(|| pre!("(L, λ) is not an H-stable pair"))?;
    let b = gamma_bimodule(&q.mgg, q.index, &mh, j)?;
    // transport: Γ_H → Γ_G; V ≅ k[Γ_GH] ⊗ W means W ≅ V∘transport.
    Ok(b.transport.map(|t| q.module.pullback(&t.img)))
}

/// Linkage of quadruples: linked triples and `V ≅ k[Γ_GH] ⊗_{kΓ_H} W`.
pub fn quadruple_linkage(a: &Quadruple, b: &Quadruple) -> Result<bool> {
    if a.n != b.n || a.module.p != b.module.p {
        return Err(pre!("quadruples use different moduli or primes"));
    }
    let bm = gamma_bimodule(&a.mgg, a.index, &b.mgg, b.index)?;
    let Some(t) = bm.transport else { return Ok(false) };
    // W over Γ_H becomes a Γ_G-module through the inverse transport.
    let w = b.module.pullback(&t.inverse().img);
    Ok(modules_isomorphic(&a.module, &w))
}

/// A section `I = H₂/H₁` of `H` with a triple `(I, L, λ)` linked to
/// `(G, K, κ)`.
#[derive(Clone, Debug)]
pub struct NonvanishingWitness {
    pub h2: Subgroup,
    pub h1: Subgroup,
    pub section: GroupRef,
    pub pair: CentralPair,
}

fn abelian_iso(a: &Group, sa: &Subgroup, b: &Group, sb: &Subgroup) -> bool {
    sa.order() == sb.order() && isomorphic(&a.subgroup_table(sa), &b.subgroup_table(sb)).is_some()
}

/// Necessary condition for `S_{(G,K,κ,V)}(H) ≠ 0`: some section `I` of `H`
/// with `|I| ≥ |G|` carries `(L,λ)`, `λ` faithful, with `(G,K,κ) ~ (I,L,λ)`,
/// `G/K ≅ I/L` and `K∩G' ≅ L∩I'`.
pub fn nonvanishing_filter(g: &GroupRef, pair: &CentralPair, h: &GroupRef, n: u32) -> Result<Option<NonvanishingWitness>> {
    if h.order() < g.order() {
        return Ok(None);
    }
    let gk = g.quotient(&pair.k)?.group;
    let kd = g.intersect(&pair.k, &g.derived());
    for h2 in h.subgroups() {
        if h2.order() < g.order() {
            continue;
        }
        let t = h2.clone();
        let h2t = h.subgroup_table(&t);
        for h1 in h2t.normal_subgroups() {
            if h2.order() / h1.order() < g.order() {
                continue;
            }
            let section: GroupRef = Arc::new(h2t.quotient(&h1)?.group);
            if !(section.order() * pair.k.order()).is_multiple_of(g.order()) {
                continue;
            }
            let l_order = section.order() * pair.k.order() / g.order();
            let mi = mgg_pairs(&section, n);
            for cand in &mi.pairs {
                if cand.k.order() != l_order || !cand.kappa.is_faithful() {
                    continue;
                }
                let il = section.quotient(&cand.k)?.group;
                if isomorphic(&gk, &il).is_none() {
                    continue;
                }
                let ld = section.intersect(&cand.k, &section.derived());
                if !abelian_iso(g, &kd, &section, &ld) {
                    continue;
                }
                let space = Space::new(g.clone(), section.clone(), n);
                if !pairs_with_ends(&space, pair, cand)?.is_empty() {
                    let h1_amb = Subgroup::from_mask(crate::bits::BitSet::from_iter(h.order(), h1.iter().map(|i| t.elems()[i])));
                    return Ok(Some(NonvanishingWitness { h2: t.clone(), h1: h1_amb, section: section.clone(), pair: cand.clone() }));
                }
            }
        }
    }
    Ok(None)
}

/// Least prime `p ≡ 1 mod lcm(exp Γ, N)` that does not divide `|Γ|·|G|`.
pub fn default_prime(gamma_exp: u64, gamma_order: u64, g_order: u64, n: u32) -> u64 {
    let m = lcm(gamma_exp.max(1), n as u64);
    let mut k = 1;
    loop {
        let p = k * m + 1;
        if is_prime(p) && gcd(p, gamma_order * g_order) == 1 {
            return p;
        }
        k += 1;
    }
}

/// Human-readable provenance line for a reducedness result.
pub fn provenance(r: ReducedBy) -> String {
    match r {
        ReducedBy::Search { complete: true } => "search over a complete catalog".into(),
        ReducedBy::Search { complete: false } => "search over an incomplete catalog".into(),
        ReducedBy::Hypothesis => "criterion with |G| dividing N".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::{parse_group, small_catalog};

    fn grp(name: &str) -> GroupRef {
        Arc::new(parse_group(name).unwrap())
    }

    #[test]
    fn c4_example() {
        let c4 = grp("C4");
        let cat = small_catalog(3);
        let k = c4.subgroup(&[0, 2]).unwrap();
        let r2 = reduced_pairs_bruteforce(&c4, 2, &cat).unwrap();
        assert_eq!(r2.is_reduced(&k, &AHom { n: 2, vals: vec![0, 1] }), Some(true));
        let r4 = reduced_pairs_bruteforce(&c4, 4, &cat).unwrap();
        assert_eq!(r4.is_reduced(&k, &AHom { n: 4, vals: vec![0, 2] }), Some(false));
        assert!(r4.catalog_complete);
    }

    #[test]
    fn trivial_quadruple_home_group() {
        let c1 = grp("C1");
        let t = c1.trivial_subgroup();
        let q = Quadruple::new(&c1, 2, &t, &AHom::trivial(&t, 2), GammaModule::trivial(&Group::trivial(), 3), None).unwrap();
        assert_eq!(simple_evaluation(&q, &c1).unwrap(), 1);
        assert_eq!(simple_evaluation(&q, &grp("C2")).unwrap(), 2);
    }
}
