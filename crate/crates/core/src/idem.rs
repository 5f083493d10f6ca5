//! Idempotents `e_{(K,κ)}` and `f_{(K,κ)}` in `E_G`, linkage classes, the
//! covering algebra `E_G^c`, the groups `Γ_{(G,K,κ)}` with their bimodules,
//! and the short exact sequence `(G/K)* → Γ → Out°(G/K)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::bits::{BitSet, UnionFind};
use crate::error::{ensure_internal, internal, pre, Result};
use crate::fib::{basis_with_filter, canonicalize, same_group, CanonicalPair, FiberPair, FiberedElement, GoursatFilter, Space, SpaceRef};
use crate::grp::{automorphism_group, homs_to_cyclic, AHom, Group, GroupHom, GroupRef, Subgroup};
use crate::linalg::{rank_fp, rank_q};
use crate::ring::{Coeff, RingSpec};

/// `(K, κ)` with `K ⊴ G` and `κ` a `G`-stable character of `K`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CentralPair {
    pub k: Subgroup,
    pub kappa: AHom,
}

impl CentralPair {
    /// `self ≤ other`: `K ≤ L` and `λ|_K = κ`.
    pub fn le(&self, other: &CentralPair) -> bool {
        self.k.is_subset(&other.k) && other.kappa.restrict(&other.k, &self.k) == self.kappa
    }
}

/// `M_G^G` with its poset structure and Möbius function.
#[derive(Clone, Debug)]
pub struct Mgg {
    pub g: GroupRef,
    pub n: u32,
    pub space: SpaceRef,
    /// Sorted by `(|K|, K, κ)`.
    pub pairs: Vec<CentralPair>,
    index: BTreeMap<(Subgroup, AHom), usize>,
    /// `leq[i][j]` iff `pairs[i] ≤ pairs[j]`.
    pub leq: Vec<Vec<bool>>,
    pub normals: Vec<Subgroup>,
    /// Möbius function of the normal-subgroup lattice, `mobius[a][b]` for
    /// `normals[a] ≤ normals[b]`.
    pub mobius: Vec<Vec<i64>>,
}

pub fn is_g_stable(g: &Group, k: &Subgroup, kappa: &AHom) -> bool {
    (0..g.order()).all(|x| k.iter().zip(&kappa.vals).all(|(y, &v)| kappa.at(k, g.conj(x, y)) == v))
}

pub fn mgg_pairs(g: &GroupRef, n: u32) -> Mgg {
    let space = Space::new(g.clone(), g.clone(), n);
    let mut normals = g.normal_subgroups();
    normals.sort_by(|a, b| (a.order(), a).cmp(&(b.order(), b)));
    let mut pairs = Vec::new();
    for k in &normals {
        for kappa in homs_to_cyclic(g, k, n) {
            if is_g_stable(g, k, &kappa) {
                pairs.push(CentralPair { k: k.clone(), kappa });
            }
        }
    }
    let index = pairs.iter().enumerate().map(|(i, p)| ((p.k.clone(), p.kappa.clone()), i)).collect();
    let leq = pairs.iter().map(|a| pairs.iter().map(|b| a.le(b)).collect()).collect();
    let m = normals.len();
    let mut mobius = vec![vec![0i64; m]; m];
    for a in 0..m {
        mobius[a][a] = 1;
        for b in a + 1..m {
            if !normals[a].is_subset(&normals[b]) {
                continue;
            }
            // Σ_{a ≤ c ≤ b} μ(a,c) = 0; normals are sorted by order, so c < b in index.
            let s: i64 = (a..b).filter(|&c| normals[a].is_subset(&normals[c]) && normals[c].is_subset(&normals[b])).map(|c| mobius[a][c]).sum();
            mobius[a][b] = -s;
        }
    }
    Mgg { g: g.clone(), n, space, pairs, index, leq, normals, mobius }
}

impl Mgg {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn index_of(&self, k: &Subgroup, kappa: &AHom) -> Option<usize> {
        self.index.get(&(k.clone(), kappa.clone())).copied()
    }

    fn normal_index(&self, k: &Subgroup) -> usize {
        self.normals.iter().position(|x| x == k).expect("normal subgroup")
    }

    pub fn mobius_of(&self, k: &Subgroup, l: &Subgroup) -> i64 {
        self.mobius[self.normal_index(k)][self.normal_index(l)]
    }

    /// The pair `(Δ_K(G), φ_κ)` with `φ_κ(g₁,g₂) = κ(g₁g₂⁻¹)`.
    pub fn e_pair(&self, i: usize) -> FiberPair {
        let g = &self.g;
        let p = &self.pairs[i];
        let mut vals = BTreeMap::new();
        for g2 in 0..g.order() {
            for k in p.k.iter() {
                let g1 = g.mul(k, g2);
                vals.insert(self.space.enc(g1, g2), p.kappa.at(&p.k, k));
            }
        }
        let u = Subgroup::from_mask(BitSet::from_iter(self.space.gh.order(), vals.keys().copied()));
        FiberPair { space: self.space.clone(), u, phi: AHom { n: self.n, vals: vals.into_values().collect() } }
    }

    pub fn e_element(&self, i: usize, ring: RingSpec) -> FiberedElement {
        FiberedElement::from_pair(&self.e_pair(i), ring)
    }

    pub fn f_element(&self, i: usize, ring: RingSpec) -> Result<FiberedElement> {
        let mut out = FiberedElement::zero(&self.space, ring);
        for j in 0..self.len() {
            if self.leq[i][j] {
                let mu = self.mobius_of(&self.pairs[i].k, &self.pairs[j].k);
                if mu != 0 {
                    let c = canonicalize(&self.e_pair(j));
                    out.add_canonical(&c, &ring.from_i64(mu))?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, a: &FiberedElement, b: &FiberedElement) -> Result<FiberedElement> {
        a.mul_into(&self.space, b)
    }

    pub fn one(&self, ring: RingSpec) -> FiberedElement {
        self.e_element(0, ring)
    }

    /// `(K, κ)` index of `l₀` of a covering pair.
    pub fn l0_index(&self, p: &FiberPair) -> Option<usize> {
        let l = p.left();
        self.index_of(&l.k, &l.kappa)
    }

    pub fn r0_index(&self, p: &FiberPair) -> Option<usize> {
        let r = p.right();
        self.index_of(&r.k, &r.kappa)
    }
}

/// Canonical pairs over `(G, H)` with both projections surjective.
pub fn covering_pairs(space: &SpaceRef) -> Result<Vec<CanonicalPair>> {
    let f = GoursatFilter { p1: Some(space.g.whole()), p2: Some(space.h.whole()), ..Default::default() };
    basis_with_filter(space, &f, |_| true)
}

pub fn covering_basis(m: &Mgg) -> Result<Vec<CanonicalPair>> {
    covering_pairs(&m.space)
}

/// Canonical pairs over `(G, H)` with `l = (G, K, κ)` and `r = (H, L, λ)`.
pub fn pairs_with_ends(space: &SpaceRef, left: &CentralPair, right: &CentralPair) -> Result<Vec<CanonicalPair>> {
    let f = GoursatFilter {
        p1: Some(space.g.whole()),
        k1: Some(left.k.clone()),
        p2: Some(space.h.whole()),
        k2: Some(right.k.clone()),
        reps_only: false,
    };
    if left.k.order() * space.h.order() != right.k.order() * space.g.order() {
        return Ok(Vec::new());
    }
    basis_with_filter(space, &f, |p| p.left().kappa == left.kappa && p.right().kappa == right.kappa)
}

#[derive(Clone, Debug)]
pub struct Linkage {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

/// Linkage classes of `M_G^G`, from `l₀` and `r₀` of covering pairs.
pub fn linkage_classes(m: &Mgg) -> Result<Linkage> {
    let mut uf = UnionFind::new(m.len());
    for c in covering_basis(m)? {
        let (a, b) = (m.l0_index(&c), m.r0_index(&c));
        let (a, b) = (a.ok_or_else(|| internal!("l₀ of a covering pair is not G-fixed"))?, b.ok_or_else(|| internal!("r₀ of a covering pair is not G-fixed"))?);
        uf.union(a, b);
    }
    let (labels, count) = uf.labels();
    let mut classes = vec![Vec::new(); count];
    for (i, &l) in labels.iter().enumerate() {
        classes[l].push(i);
    }
    Ok(Linkage { classes, class_of: labels })
}

impl Linkage {
    pub fn e_class(&self, m: &Mgg, class: usize, ring: RingSpec) -> Result<FiberedElement> {
        let mut out = FiberedElement::zero(&m.space, ring);
        for &i in &self.classes[class] {
            out = out.add(&m.e_element(i, ring))?;
        }
        Ok(out)
    }

    pub fn f_class(&self, m: &Mgg, class: usize, ring: RingSpec) -> Result<FiberedElement> {
        let mut out = FiberedElement::zero(&m.space, ring);
        for &i in &self.classes[class] {
            out = out.add(&m.f_element(i, ring)?)?;
        }
        Ok(out)
    }

    /// Order on classes: `{K,κ} ≤ {L,λ}` if some members compare.
    pub fn class_le(&self, m: &Mgg, a: usize, b: usize) -> bool {
        self.classes[a].iter().any(|&i| self.classes[b].iter().any(|&j| m.leq[i][j]))
    }
}

/// Checks the e/f product relations for every pair of elements of `M_G^G`.
pub fn check_ef_relations(m: &Mgg, ring: RingSpec) -> Result<()> {
    let es: Vec<FiberedElement> = (0..m.len()).map(|i| m.e_element(i, ring)).collect();
    let fs: Vec<FiberedElement> = (0..m.len()).map(|i| m.f_element(i, ring)).collect::<Result<_>>()?;
    let zero = FiberedElement::zero(&m.space, ring);
    let mut total = zero.clone();
    for i in 0..m.len() {
        total = total.add(&fs[i])?;
        for j in 0..m.len() {
            let ef = m.mul(&es[i], &fs[j])?;
            let fe = m.mul(&fs[j], &es[i])?;
            let want = if m.leq[i][j] { &fs[j] } else { &zero };
            ensure_internal!(&ef == want && &fe == want, "e·f relation fails for pairs {i}, {j}");
            let ff = m.mul(&fs[i], &fs[j])?;
            let want = if i == j { &fs[i] } else { &zero };
            ensure_internal!(&ff == want, "f·f relation fails for pairs {i}, {j}");
            let ee = m.mul(&es[i], &es[j])?;
            let (a, b) = (&m.pairs[i], &m.pairs[j]);
            let meet = m.g.intersect(&a.k, &b.k);
            let want = if a.kappa.restrict(&a.k, &meet) == b.kappa.restrict(&b.k, &meet) {
                let kk = m.g.join(&a.k, &b.k);
                let vals: Vec<u32> = kk
                    .iter()
                    .map(|x| {
                        let ka = a.k.iter().find(|&y| b.k.contains(m.g.mul(m.g.inv(y), x))).expect("KL = K·L");
                        (a.kappa.at(&a.k, ka) + b.kappa.at(&b.k, m.g.mul(m.g.inv(ka), x))) % m.n
                    })
                    .collect();
                let idx = m.index_of(&kk, &AHom { n: m.n, vals }).ok_or_else(|| internal!("product pair is not G-fixed"))?;
                es[idx].clone()
            } else {
                zero.clone()
            };
            ensure_internal!(ee == want, "e·e relation fails for pairs {i}, {j}");
        }
    }
    ensure_internal!(total == m.one(ring), "the f idempotents do not sum to 1");
    Ok(())
}

/// `Γ_{(G,K,κ)}`: standard basis elements with `l = r = (G,K,κ)`.
#[derive(Clone, Debug)]
pub struct GammaGroup {
    pub base: CentralPair,
    /// Element 0 is `e_{(K,κ)}`.
    pub elements: Vec<CanonicalPair>,
    pub table: Group,
}

fn single_term(x: &FiberedElement) -> Option<CanonicalPair> {
    let mut it = x.terms();
    let (p, c) = it.next()?;
    if it.next().is_some() || !c.is_one() {
        return None;
    }
    Some(p)
}

fn pair_product(space: &SpaceRef, a: &CanonicalPair, b: &CanonicalPair) -> Result<Option<CanonicalPair>> {
    let x = FiberedElement::from_canonical(a, RingSpec::Z).mul_into(space, &FiberedElement::from_canonical(b, RingSpec::Z))?;
    if x.is_zero() {
        return Ok(None);
    }
    single_term(&x).map(Some).ok_or_else(|| internal!("product of covering pairs is not a single basis element"))
}

pub fn gamma_group(m: &Mgg, i: usize) -> Result<GammaGroup> {
    let base = m.pairs.get(i).ok_or_else(|| pre!("no pair with index {i}"))?.clone();
    let mut elements = pairs_with_ends(&m.space, &base, &base)?;
    let e = canonicalize(&m.e_pair(i));
    let pos = elements.iter().position(|x| *x == e).ok_or_else(|| internal!("e_(K,κ) is missing from Γ"))?;
    let e = elements.remove(pos);
    elements.insert(0, e);
    let idx: BTreeMap<&CanonicalPair, usize> = elements.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let n = elements.len();
    let mut rows = vec![vec![0usize; n]; n];
    for a in 0..n {
        for b in 0..n {
            let c = pair_product(&m.space, &elements[a], &elements[b])?.ok_or_else(|| internal!("Γ is not closed: zero product"))?;
            rows[a][b] = *idx.get(&c).ok_or_else(|| internal!("Γ is not closed under products"))?;
        }
    }
    let table = Group::from_table("Gamma", &rows, None).map_err(|e| internal!("Γ fails the group axioms: {}", e.message()))?;
    for (a, x) in elements.iter().enumerate() {
        let mut op = canonicalize(&x.opposite());
        op.0.space = m.space.clone();
        let j = *idx.get(&op).ok_or_else(|| internal!("opposite leaves Γ"))?;
        ensure_internal!(j == table.inv(a), "opposite is not the inverse in Γ");
    }
    Ok(GammaGroup { base, elements, table })
}

impl GammaGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, c: &CanonicalPair) -> Option<usize> {
        self.elements.iter().position(|x| x == c)
    }
}

/// `Γ_{(G,K,κ)}`-`Γ_{(H,L,λ)}`-biset of pairs with the given ends.
#[derive(Clone, Debug)]
pub struct GammaBimodule {
    pub space: SpaceRef,
    pub elements: Vec<CanonicalPair>,
    /// `left[γ][b]` is the index of `γ·b`.
    pub left: Vec<Vec<usize>>,
    /// `right[b][δ]` is the index of `b·δ`.
    pub right: Vec<Vec<usize>>,
    /// `y ↦ u·y·u^op` for the first element `u`, as a map `Γ_H → Γ_G`.
    pub transport: Option<GroupHom>,
}

pub fn gamma_bimodule(mg: &Mgg, i: usize, mh: &Mgg, j: usize) -> Result<GammaBimodule> {
    if mg.n != mh.n {
        return Err(pre!("moduli differ"));
    }
    let space = Space::new(mg.g.clone(), mh.g.clone(), mg.n);
    let elements = pairs_with_ends(&space, &mg.pairs[i], &mh.pairs[j])?;
    if elements.is_empty() {
        return Ok(GammaBimodule { space, elements, left: Vec::new(), right: Vec::new(), transport: None });
    }
    let gg = gamma_group(mg, i)?;
    let gh = gamma_group(mh, j)?;
    let idx: BTreeMap<&CanonicalPair, usize> = elements.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let find = |c: Option<CanonicalPair>| -> Result<usize> {
        let mut c = c.ok_or_else(|| internal!("zero product in a Γ-bimodule"))?;
        c.0.space = space.clone();
        idx.get(&c).copied().ok_or_else(|| internal!("product leaves the Γ-bimodule"))
    };
    let left = gg
        .elements
        .iter()
        .map(|g| elements.iter().map(|b| find(pair_product(&space, g, b)?)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let right = elements
        .iter()
        .map(|b| gh.elements.iter().map(|h| find(pair_product(&space, b, h)?)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let m = elements.len();
    ensure_internal!(gg.order() == m && gh.order() == m, "Γ-bimodule size differs from |Γ|");
    for b in 0..m {
        let col: BTreeSet<usize> = (0..m).map(|g| left[g][b]).collect();
        let row: BTreeSet<usize> = right[b].iter().copied().collect();
        ensure_internal!(col.len() == m && row.len() == m, "Γ does not act freely and transitively");
    }
    let u = &elements[0];
    let uop = {
        let mut o = canonicalize(&u.opposite());
        o.0.space = space.flipped();
        o
    };
    let hspace = Space::new(mh.g.clone(), mg.g.clone(), mg.n);
    let mut img = Vec::with_capacity(m);
    for y in &gh.elements {
        let uy = pair_product(&space, u, y)?.ok_or_else(|| internal!("u·y vanished"))?;
        let mut uop = uop.clone();
        uop.0.space = hspace.clone();
        let z = pair_product(&mg.space, &uy, &uop)?.ok_or_else(|| internal!("u·y·u^op vanished"))?;
        let mut z = z;
        z.0.space = mg.space.clone();
        img.push(gg.index_of(&z).ok_or_else(|| internal!("transport leaves Γ"))?);
    }
    let transport = GroupHom { img };
    ensure_internal!(transport.is_hom(&gh.table, &gg.table) && transport.is_bijective(m), "transport is not an isomorphism");
    Ok(GammaBimodule { space, elements, left, right, transport: Some(transport) })
}

/// Rank of a family of elements over their coefficient ring (Q for Z and Q).
pub fn rank_of(elems: &[FiberedElement]) -> usize {
    let mut keys: BTreeMap<(&Subgroup, &AHom), usize> = BTreeMap::new();
    for e in elems {
        for (u, phi, _) in e.raw_terms() {
            let l = keys.len();
            keys.entry((u, phi)).or_insert(l);
        }
    }
    let cols = keys.len();
    if cols == 0 {
        return 0;
    }
    match elems[0].ring {
        RingSpec::Fp(p) => {
            let rows: Vec<Vec<u64>> = elems
                .iter()
                .map(|e| {
                    let mut r = vec![0u64; cols];
                    for (u, phi, c) in e.raw_terms() {
                        r[keys[&(u, phi)]] = c.residue(p).unwrap_or(0);
                    }
                    r
                })
                .collect();
            rank_fp(&rows, p)
        }
        _ => {
            let zero = BigRational::from_integer(0.into());
            let rows: Vec<Vec<BigRational>> = elems
                .iter()
                .map(|e| {
                    let mut r = vec![zero.clone(); cols];
                    for (u, phi, c) in e.raw_terms() {
                        r[keys[&(u, phi)]] = match c {
                            Coeff::Z(z) => BigRational::from_integer(z.clone()),
                            Coeff::Q(q) => q.clone(),
                            Coeff::Fp(v, _) => BigRational::from_integer((*v).into()),
                        };
                    }
                    r
                })
                .collect();
            rank_q(&rows)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Block {
    pub members: Vec<usize>,
    pub gamma_order: usize,
    /// Whether all structure constants of `Mat_n(kΓ)` were compared, or only
    /// those with the second factor a generator of `Γ`.
    pub full_check: bool,
}

#[derive(Clone, Debug)]
pub struct CoveringReport {
    pub dim: usize,
    pub blocks: Vec<Block>,
    pub block_sum: usize,
}

/// Products checked per block before falling back to generator products.
pub const FULL_CHECK_BOUND: usize = 4096;

/// Verifies `E_G^c ≅ ⊕ Mat_{|class|}(kΓ)` through the maps of the proof:
/// matrix units `ρ(E_ij(γ)) = x_i^op·γ·x_j·f_j`, their multiplication rule,
/// `ρ(1·E_ii) = f_i`, and linear independence spanning `E_G^c`.
pub fn covering_algebra_report(m: &Mgg, ring: RingSpec) -> Result<CoveringReport> {
    let basis = covering_basis(m)?;
    let link = linkage_classes(m)?;
    let mut blocks = Vec::new();
    let mut all_images = Vec::new();
    let mut block_sum = 0;
    for members in &link.classes {
        let base = members[0];
        let gamma = gamma_group(m, base)?;
        let n = members.len();
        let g_ord = gamma.order();
        block_sum += n * n * g_ord;
        // x_i with l₀ = base and r₀ = member i: first element of the bimodule.
        let xs: Vec<FiberedElement> = members
            .iter()
            .map(|&i| {
                let b = pairs_with_ends(&m.space, &m.pairs[base], &m.pairs[i])?;
                let x = b.first().ok_or_else(|| internal!("linked pairs have an empty bimodule"))?;
                Ok(FiberedElement::from_canonical(x, ring))
            })
            .collect::<Result<_>>()?;
        let xops: Vec<FiberedElement> = xs.iter().map(|x| x.opposite().rehome(&m.space)).collect::<Result<_>>()?;
        let fs: Vec<FiberedElement> = members.iter().map(|&i| m.f_element(i, ring)).collect::<Result<_>>()?;
        let gam: Vec<FiberedElement> = gamma.elements.iter().map(|c| FiberedElement::from_canonical(c, ring)).collect();
        let mut rho = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for (c, g) in gam.iter().enumerate() {
                    let s = m.mul(&m.mul(&xops[i], g)?, &xs[j])?;
                    let r = m.mul(&s, &fs[j])?;
                    let l = m.mul(&fs[i], &s)?;
                    ensure_internal!(l == r, "f_i·b = b·f_j fails for a bimodule element");
                    rho.insert((i, j, c), r);
                }
            }
        }
        for i in 0..n {
            ensure_internal!(rho[&(i, i, 0)] == fs[i], "ρ does not send E_ii to f_i");
        }
        let gens = gamma.table.generators_of(&gamma.table.whole());
        let full = n.pow(4) * g_ord * g_ord <= FULL_CHECK_BOUND;
        let second: Vec<usize> = if full { (0..g_ord).collect() } else { gens };
        let zero = FiberedElement::zero(&m.space, ring);
        for i in 0..n {
            for j in 0..n {
                for a in 0..g_ord {
                    for l in 0..n {
                        for mm in 0..n {
                            if !full && j != l && (i + j + l + mm) % 2 == 1 {
                                continue;
                            }
                            for &b in &second {
                                let prod = m.mul(&rho[&(i, j, a)], &rho[&(l, mm, b)])?;
                                let want = if j == l { &rho[&(i, mm, gamma.table.mul(a, b))] } else { &zero };
                                ensure_internal!(&prod == want, "matrix-unit multiplication rule fails");
                            }
                        }
                    }
                }
            }
        }
        all_images.extend(rho.into_values());
        blocks.push(Block { members: members.clone(), gamma_order: g_ord, full_check: full });
    }
    ensure_internal!(block_sum == basis.len(), "dim E_G^c = {} but Σ n²|Γ| = {block_sum}", basis.len());
    let rank = rank_of(&all_images);
    ensure_internal!(rank == basis.len(), "matrix-unit images span rank {rank}, expected {}", basis.len());
    Ok(CoveringReport { dim: basis.len(), blocks, block_sum })
}

#[derive(Clone, Debug)]
pub struct SesReport {
    pub gamma_order: usize,
    /// `|(G/K)*| = |Hom(G/K, Z/N)|`.
    pub dual_order: usize,
    pub out_order: usize,
    /// Classes of `Out(G/K)` in the image of `π`, as indices into the Out
    /// quotient of the automorphism group.
    pub image: Vec<usize>,
    /// `|ι((G/K)*)|`.
    pub iota_image_order: usize,
    pub iota_injective: bool,
    /// `ker ι` equals `{g ↦ κ([g⁻¹,z]) : zK ∈ Z(G/K)}`, the characters
    /// absorbed by conjugating `Δ_K(G)` with `(z,1)`.
    pub iota_kernel_is_commutator_twists: bool,
    pub kernel_is_iota_image: bool,
    /// `|Γ| = |(G/K)*|·|im π|`.
    pub order_identity: bool,
    /// Whether a complement to `ι((G/K)*)` exists; `None` if not searched.
    pub split: Option<bool>,
    pub notes: Vec<String>,
}

/// Bound on `|Γ|` for the complement search.
pub const SPLIT_SEARCH_BOUND: usize = 96;

pub fn ses_report(m: &Mgg, i: usize) -> Result<SesReport> {
    let g = &m.g;
    let base = &m.pairs[i];
    if !base.kappa.is_faithful() {
        return Err(pre!("κ must be faithful"));
    }
    let gamma = gamma_group(m, i)?;
    let quo = g.quotient(&base.k)?;
    let q = &quo.group;
    let aut = automorphism_group(q, usize::MAX)?;
    let mut pi = Vec::with_capacity(gamma.order());
    for x in &gamma.elements {
        let mut eta = vec![usize::MAX; q.order()];
        for u in x.u.iter() {
            let (g1, g2) = m.space.dec(u);
            let (c1, c2) = (quo.proj[g1] as usize, quo.proj[g2] as usize);
            if eta[c2] != usize::MAX && eta[c2] != c1 {
                return Err(internal!("Γ element is not of the form U_η"));
            }
            eta[c2] = c1;
        }
        let eta = GroupHom { img: eta };
        pi.push(aut.out_class(&eta).ok_or_else(|| internal!("η is not an automorphism of G/K"))?);
    }
    let outg = &aut.out.group;
    for a in 0..gamma.order() {
        for b in 0..gamma.order() {
            ensure_internal!(pi[gamma.table.mul(a, b)] == outg.mul(pi[a], pi[b]), "π is not a homomorphism");
        }
    }
    let kernel: BTreeSet<usize> = (0..gamma.order()).filter(|&a| pi[a] == 0).collect();
    let thetas = homs_to_cyclic(q, &q.whole(), m.n);
    let mut iota = Vec::with_capacity(thetas.len());
    for th in &thetas {
        let mut vals = BTreeMap::new();
        for g2 in 0..g.order() {
            for k in base.k.iter() {
                let g1 = g.mul(g2, k);
                let v = (base.kappa.at(&base.k, k) + th.vals[quo.proj[g2] as usize]) % m.n;
                vals.insert(m.space.enc(g1, g2), v);
            }
        }
        let u = Subgroup::from_mask(BitSet::from_iter(m.space.gh.order(), vals.keys().copied()));
        let p = FiberPair { space: m.space.clone(), u, phi: AHom { n: m.n, vals: vals.into_values().collect() } };
        iota.push(gamma.index_of(&canonicalize(&p)).ok_or_else(|| internal!("ι(θ) is not in Γ"))?);
    }
    for (a, ta) in thetas.iter().enumerate() {
        for (b, tb) in thetas.iter().enumerate() {
            let sum: Vec<u32> = ta.vals.iter().zip(&tb.vals).map(|(x, y)| (x + y) % m.n).collect();
            let c = thetas.iter().position(|t| t.vals == sum).expect("Hom(G/K, Z/N) is a group");
            ensure_internal!(iota[c] == gamma.table.mul(iota[a], iota[b]), "ι is not a homomorphism");
        }
    }
    let image: BTreeSet<usize> = iota.iter().copied().collect();
    let ker_iota: BTreeSet<Vec<u32>> = thetas.iter().zip(&iota).filter(|(_, &x)| x == 0).map(|(t, _)| t.vals.clone()).collect();
    let zq = q.center();
    let twists: BTreeSet<Vec<u32>> = zq
        .iter()
        .map(|zc| {
            let z = quo.reps[zc] as usize;
            (0..q.order())
                .map(|c| {
                    let x = quo.reps[c] as usize;
                    base.kappa.at(&base.k, g.commutator(g.inv(x), z))
                })
                .collect()
        })
        .collect();
    let pi_image: BTreeSet<usize> = pi.iter().copied().collect();
    ensure_internal!(gamma.order() == image.len() * pi_image.len(), "|Γ| ≠ |im ι|·|im π|");
    let mut notes = Vec::new();
    if image.len() != thetas.len() {
        notes.push(format!(
            "ι is not injective: |(G/K)*| = {} but |im ι| = {}; Z(G/K) is larger than Z(G)/K",
            thetas.len(),
            image.len()
        ));
    }
    let split = if gamma.order() <= SPLIT_SEARCH_BOUND {
        let t = &gamma.table;
        let want = pi_image.len();
        let found = t.subgroups().into_iter().any(|c| c.order() == want && c.iter().all(|x| x == 0 || !kernel.contains(&x)));
        Some(found)
    } else {
        notes.push(format!("complement search skipped: |Γ| = {} exceeds {SPLIT_SEARCH_BOUND}", gamma.order()));
        None
    };
    Ok(SesReport {
        gamma_order: gamma.order(),
        dual_order: thetas.len(),
        out_order: outg.order(),
        image: pi_image.iter().copied().collect(),
        iota_image_order: image.len(),
        iota_injective: image.len() == thetas.len(),
        iota_kernel_is_commutator_twists: ker_iota == twists,
        kernel_is_iota_image: kernel == image,
        order_identity: gamma.order() == thetas.len() * pi_image.len(),
        split,
        notes,
    })
}

/// Whether two triples over possibly different groups are linked.
pub fn linked(mg: &Mgg, i: usize, mh: &Mgg, j: usize) -> Result<bool> {
    if mg.n != mh.n {
        return Err(pre!("moduli differ"));
    }
    if same_group(&mg.g, &mh.g) && mg.pairs[i] == mh.pairs[j] {
        return Ok(true);
    }
    let space = Space::new(mg.g.clone(), mh.g.clone(), mg.n);
    Ok(!pairs_with_ends(&space, &mg.pairs[i], &mh.pairs[j])?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::sync::Arc;

    fn grp(name: &str) -> GroupRef {
        Arc::new(crate::grp::parse_group(name).unwrap())
    }

    #[test]
    fn mgg_counts() {
        assert_eq!(mgg_pairs(&grp("C1"), 3).len(), 1);
        assert_eq!(mgg_pairs(&grp("C4"), 2).len(), 5);
        let s3 = mgg_pairs(&grp("S3"), 2);
        // 1, A3 (trivial only), S3 (two characters).
        assert_eq!(s3.len(), 4);
    }

    #[test]
    fn idempotent_relations() {
        for (g, n) in [("C2", 2u32), ("S3", 2), ("C4", 4), ("C2xC2", 2)] {
            let m = mgg_pairs(&grp(g), n);
            check_ef_relations(&m, RingSpec::Z).unwrap();
            assert_eq!(m.e_pair(0).canonicalize(), crate::fib::identity_pair(&m.g, n).canonicalize());
            for i in 0..m.len() {
                let e = m.e_element(i, RingSpec::Z);
                assert_eq!(e.opposite().rehome(&m.space).unwrap(), e);
            }
        }
    }

    #[test]
    fn gamma_small() {
        let m = mgg_pairs(&grp("C2"), 2);
        let g = gamma_group(&m, 0).unwrap();
        assert_eq!(g.order(), 2);
        let l = linkage_classes(&m).unwrap();
        for c in &l.classes {
            let sizes: BTreeSet<usize> = c.iter().map(|&i| m.pairs[i].k.order()).collect();
            assert_eq!(sizes.len(), 1);
        }
    }

    #[test]
    fn covering_report_small() {
        for (g, n) in [("C1", 2u32), ("C2", 2), ("S3", 2), ("C4", 2)] {
            let m = mgg_pairs(&grp(g), n);
            let r = covering_algebra_report(&m, RingSpec::Z).unwrap();
            assert_eq!(r.dim, r.block_sum);
        }
    }

    #[test]
    fn ses_small() {
        let m = mgg_pairs(&grp("C2"), 2);
        let r = ses_report(&m, 0).unwrap();
        assert_eq!((r.gamma_order, r.dual_order, r.image.len()), (2, 2, 1));
        assert!(r.kernel_is_iota_image);
        let q8 = grp("Q8");
        let m = mgg_pairs(&q8, 4);
        let z = q8.center();
        let i = (0..m.len()).find(|&i| m.pairs[i].k == z && m.pairs[i].kappa.is_faithful()).unwrap();
        let r = ses_report(&m, i).unwrap();
        assert_eq!(r.dual_order, 4);
        assert!(r.kernel_is_iota_image);
        assert!(r.iota_kernel_is_commutator_twists);
        assert_eq!(r.gamma_order, r.iota_image_order * r.image.len());
    }

    #[test]
    fn romero_bimodule() {
        let (q8, d8) = (grp("Q8"), grp("D8"));
        for (n, nonempty) in [(4u32, true), (2, false)] {
            let (mq, md) = (mgg_pairs(&q8, n), mgg_pairs(&d8, n));
            let zq = q8.center();
            let zd = d8.center();
            let iq = (0..mq.len()).find(|&i| mq.pairs[i].k == zq && mq.pairs[i].kappa.is_faithful()).unwrap();
            let id = (0..md.len()).find(|&i| md.pairs[i].k == zd && md.pairs[i].kappa.is_faithful()).unwrap();
            let b = gamma_bimodule(&mq, iq, &md, id).unwrap();
            assert_eq!(!b.elements.is_empty(), nonempty, "N = {n}");
        }
    }
}
