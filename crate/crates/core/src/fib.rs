//! A-fibered bisets as formal objects: pairs `(U, φ)` with `U ≤ G×H` and
//! `φ: U → Z/N`, canonical forms under `G×H`-conjugation, the standard basis
//! of `B^A(G,H)`, star and Mackey products, opposites, elementary bisets and
//! the five-factor decomposition.
//!
//! Sign conventions: `φ₁(k) = φ(k,1)` and `φ₂(h) = −φ(1,h)`, so that `φ`
//! restricted to `k₁×k₂` is `φ₁×φ₂⁻¹`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitSet;
use crate::error::{ensure_internal, internal, pre, Error, Result};
use crate::grp::{homs_to_cyclic, isomorphisms, AHom, Group, GroupHom, GroupRef, Quotient, Subgroup};
use crate::ring::{Coeff, RingSpec};

/// The ambient data `(G, H, N)` of a pair, with the product table `G×H`.
#[derive(Debug)]
pub struct Space {
    pub g: GroupRef,
    pub h: GroupRef,
    pub n: u32,
    pub gh: Group,
}

pub type SpaceRef = Arc<Space>;

pub fn same_group(a: &GroupRef, b: &GroupRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Space {
    pub fn new(g: GroupRef, h: GroupRef, n: u32) -> SpaceRef {
        assert!(n >= 1, "modulus must be positive");
        let gh = Group::direct_product(&[&g, &h]);
        Arc::new(Space { g, h, n, gh })
    }

    pub fn same(&self, other: &Space) -> bool {
        self.n == other.n && same_group(&self.g, &other.g) && same_group(&self.h, &other.h)
    }

    #[inline]
    pub fn enc(&self, a: usize, b: usize) -> usize {
        a * self.h.order() + b
    }

    #[inline]
    pub fn dec(&self, x: usize) -> (usize, usize) {
        (x / self.h.order(), x % self.h.order())
    }

    /// The space `(H, G, N)`.
    pub fn flipped(&self) -> SpaceRef {
        Space::new(self.h.clone(), self.g.clone(), self.n)
    }
}

/// A pair `(U, φ)` over a space.
#[derive(Clone, Debug)]
pub struct FiberPair {
    pub space: SpaceRef,
    pub u: Subgroup,
    pub phi: AHom,
}

/// A pair known to be in canonical form.
#[derive(Clone, Debug)]
pub struct CanonicalPair(pub FiberPair);

impl core::ops::Deref for CanonicalPair {
    type Target = FiberPair;
    fn deref(&self) -> &FiberPair {
        &self.0
    }
}

impl PartialEq for CanonicalPair {
    fn eq(&self, other: &Self) -> bool {
        self.0.u == other.0.u && self.0.phi == other.0.phi
    }
}
impl Eq for CanonicalPair {}
impl PartialOrd for CanonicalPair {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for CanonicalPair {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (&self.0.u, &self.0.phi).cmp(&(&other.0.u, &other.0.phi))
    }
}

/// `(P, K, κ)`: a subgroup, a normal subgroup of it, and a character of `K`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triple {
    pub p: Subgroup,
    pub k: Subgroup,
    pub kappa: AHom,
}

impl Triple {
    pub fn l0(&self) -> (Subgroup, AHom) {
        (self.k.clone(), self.kappa.clone())
    }
}

pub fn make_pair(space: &SpaceRef, u_elems: &[usize], phi_vals: &[u32]) -> Result<FiberPair> {
    let u = space.gh.subgroup(u_elems).map_err(|e| pre!("not a subgroup of G×H: {}", e.message()))?;
    // Values are given parallel to the input order; reorder to sorted order.
    if phi_vals.len() != u_elems.len() {
        return Err(pre!("phi has {} values for {} elements", phi_vals.len(), u_elems.len()));
    }
    let mut vals = vec![0u32; u.order()];
    for (&x, &v) in u_elems.iter().zip(phi_vals) {
        if v >= space.n {
            return Err(pre!("phi value {v} not reduced modulo {}", space.n));
        }
        vals[u.position(x).expect("member")] = v;
    }
    let phi = AHom { n: space.n, vals };
    if !phi.is_hom(&space.gh, &u) {
        return Err(pre!("phi is not a homomorphism U → Z/{}", space.n));
    }
    Ok(FiberPair { space: space.clone(), u, phi })
}

impl FiberPair {
    pub fn phi_at(&self, x: usize) -> u32 {
        self.phi.at(&self.u, x)
    }

    pub fn left(&self) -> Triple {
        let s = &self.space;
        let gn = s.g.order();
        let mut p = BitSet::new(gn);
        let mut k = BitSet::new(gn);
        let mut kv = Vec::new();
        for (i, x) in self.u.iter().enumerate() {
            let (a, b) = s.dec(x);
            p.insert(a);
            if b == 0 {
                k.insert(a);
                kv.push((a, self.phi.vals[i]));
            }
        }
        kv.sort_unstable();
        Triple {
            p: Subgroup::from_mask(p),
            k: Subgroup::from_mask(k),
            kappa: AHom { n: s.n, vals: kv.into_iter().map(|(_, v)| v).collect() },
        }
    }

    pub fn right(&self) -> Triple {
        let s = &self.space;
        let hn = s.h.order();
        let n = s.n;
        let mut p = BitSet::new(hn);
        let mut k = BitSet::new(hn);
        let mut kv = Vec::new();
        for (i, x) in self.u.iter().enumerate() {
            let (a, b) = s.dec(x);
            p.insert(b);
            if a == 0 {
                k.insert(b);
                kv.push((b, (n - self.phi.vals[i]) % n));
            }
        }
        kv.sort_unstable();
        Triple {
            p: Subgroup::from_mask(p),
            k: Subgroup::from_mask(k),
            kappa: AHom { n, vals: kv.into_iter().map(|(_, v)| v).collect() },
        }
    }

    pub fn is_covering(&self) -> bool {
        let (l, r) = (self.left(), self.right());
        l.p.order() == self.space.g.order() && r.p.order() == self.space.h.order()
    }

    /// `^{(x,y)}(U,φ)`.
    pub fn conjugate(&self, x: usize, y: usize) -> FiberPair {
        let s = &self.space;
        let c = s.enc(x, y);
        let mut pairs: Vec<(usize, u32)> = self.u.iter().zip(&self.phi.vals).map(|(e, &v)| (s.gh.conj(c, e), v)).collect();
        pairs.sort_unstable();
        let u = Subgroup::from_mask(BitSet::from_iter(s.gh.order(), pairs.iter().map(|p| p.0)));
        FiberPair { space: s.clone(), u, phi: AHom { n: s.n, vals: pairs.into_iter().map(|p| p.1).collect() } }
    }

    pub fn canonicalize(&self) -> CanonicalPair {
        canonicalize(self)
    }

    pub fn opposite(&self) -> FiberPair {
        let s = &self.space;
        let t = s.flipped();
        let n = s.n;
        let mut pairs: Vec<(usize, u32)> = self
            .u
            .iter()
            .zip(&self.phi.vals)
            .map(|(x, &v)| {
                let (a, b) = s.dec(x);
                (t.enc(b, a), (n - v) % n)
            })
            .collect();
        pairs.sort_unstable();
        let u = Subgroup::from_mask(BitSet::from_iter(t.gh.order(), pairs.iter().map(|p| p.0)));
        FiberPair { space: t, u, phi: AHom { n, vals: pairs.into_iter().map(|p| p.1).collect() } }
    }
}

/// Lexicographically least conjugate: first by sorted element list, then by
/// the value vector.
pub fn canonicalize(p: &FiberPair) -> CanonicalPair {
    let s = &p.space;
    let gh = &s.gh;
    let m = p.u.order();
    let mut best_u: Vec<usize> = p.u.elems().to_vec();
    let mut best_v: Vec<u32> = p.phi.vals.clone();
    let mut buf: Vec<(usize, u32)> = Vec::with_capacity(m);
    for c in 1..gh.order() {
        buf.clear();
        let ci = gh.inv(c);
        buf.extend(p.u.iter().zip(&p.phi.vals).map(|(e, &v)| (gh.mul(gh.mul(c, e), ci), v)));
        buf.sort_unstable();
        let ord = buf.iter().map(|x| x.0).cmp(best_u.iter().copied()).then_with(|| buf.iter().map(|x| x.1).cmp(best_v.iter().copied()));
        if ord == core::cmp::Ordering::Less {
            best_u.clear();
            best_v.clear();
            best_u.extend(buf.iter().map(|x| x.0));
            best_v.extend(buf.iter().map(|x| x.1));
        }
    }
    let u = Subgroup::from_mask(BitSet::from_iter(gh.order(), best_u));
    CanonicalPair(FiberPair { space: s.clone(), u, phi: AHom { n: s.n, vals: best_v } })
}

/// `(U*V, φ*ψ)` when the characters agree on the overlap, else `None`.
pub fn star_product(p: &FiberPair, q: &FiberPair) -> Result<Option<FiberPair>> {
    let (sp, sq) = (&p.space, &q.space);
    if !same_group(&sp.h, &sq.g) || sp.n != sq.n {
        return Err(pre!("star product needs a shared middle group and modulus"));
    }
    let out = Space::new(sp.g.clone(), sq.h.clone(), sp.n);
    Ok(star_into(&out, p, q))
}

fn star_into(out: &SpaceRef, p: &FiberPair, q: &FiberPair) -> Option<FiberPair> {
    let (sp, sq) = (&p.space, &q.space);
    let n = sp.n;
    let hn = sp.h.order();
    let mut fibers: Vec<Vec<(usize, u32)>> = vec![Vec::new(); hn];
    for (y, &v) in q.u.iter().zip(&q.phi.vals) {
        let (h, k) = sq.dec(y);
        fibers[h].push((k, v));
    }
    let total = out.gh.order();
    let mut vals = vec![u32::MAX; total];
    for (x, &a) in p.u.iter().zip(&p.phi.vals) {
        let (g, h) = sp.dec(x);
        for &(k, b) in &fibers[h] {
            let z = out.enc(g, k);
            let v = (a + b) % n;
            if vals[z] == u32::MAX {
                vals[z] = v;
            } else if vals[z] != v {
                return None;
            }
        }
    }
    let elems: Vec<usize> = (0..total).filter(|&z| vals[z] != u32::MAX).collect();
    let phi = AHom { n, vals: elems.iter().map(|&z| vals[z]).collect() };
    let u = Subgroup::from_mask(BitSet::from_iter(total, elems));
    Some(FiberPair { space: out.clone(), u, phi })
}

/// Double-coset representatives `A\G/B` (minimal index in each double coset).
pub fn double_coset_reps(g: &Group, a: &Subgroup, b: &Subgroup) -> Vec<usize> {
    let mut seen = BitSet::new(g.order());
    let mut reps = Vec::new();
    for t in 0..g.order() {
        if seen.contains(t) {
            continue;
        }
        reps.push(t);
        for x in a.iter() {
            let xt = g.mul(x, t);
            for y in b.iter() {
                seen.insert(g.mul(xt, y));
            }
        }
    }
    reps
}

/// The Mackey formula on two pairs: canonical classes of the surviving terms.
pub fn mackey_pairs(out: &SpaceRef, p: &FiberPair, q: &FiberPair) -> Vec<CanonicalPair> {
    let hgrp = &p.space.h;
    let r = p.right();
    let l = q.left();
    let n = p.space.n;
    let mut terms = Vec::new();
    for t in double_coset_reps(hgrp, &r.p, &l.p) {
        let ti = hgrp.inv(t);
        // H_t = k₂(U) ∩ t k₁(V) t⁻¹ and the character test on it.
        let ok = r.k.iter().zip(&r.kappa.vals).all(|(h, &v2)| {
            let h1 = hgrp.conj(ti, h);
            match l.k.position(h1) {
                Some(i) => l.kappa.vals[i] == v2,
                None => true,
            }
        });
        if !ok {
            continue;
        }
        let qt = if t == 0 { q.clone() } else { q.conjugate(t, 0) };
        let star = star_into(out, p, &qt).expect("Mackey condition guarantees compatibility");
        debug_assert_eq!(star.phi.n, n);
        terms.push(canonicalize(&star));
    }
    terms
}

/// Formal sum of canonical pairs with coefficients in a ring.
#[derive(Clone, Debug)]
pub struct FiberedElement {
    pub space: SpaceRef,
    pub ring: RingSpec,
    terms: BTreeMap<(Subgroup, AHom), Coeff>,
}

impl PartialEq for FiberedElement {
    fn eq(&self, other: &Self) -> bool {
        self.space.same(&other.space) && self.ring == other.ring && self.terms == other.terms
    }
}

impl FiberedElement {
    pub fn zero(space: &SpaceRef, ring: RingSpec) -> Self {
        FiberedElement { space: space.clone(), ring, terms: BTreeMap::new() }
    }

    pub fn from_pair(p: &FiberPair, ring: RingSpec) -> Self {
        let c = canonicalize(p);
        Self::from_canonical(&c, ring)
    }

    pub fn from_canonical(c: &CanonicalPair, ring: RingSpec) -> Self {
        let mut e = Self::zero(&c.space, ring);
        e.terms.insert((c.u.clone(), c.phi.clone()), ring.one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (CanonicalPair, &Coeff)> + '_ {
        self.terms.iter().map(move |((u, phi), c)| {
            (CanonicalPair(FiberPair { space: self.space.clone(), u: u.clone(), phi: phi.clone() }), c)
        })
    }

    pub fn raw_terms(&self) -> impl Iterator<Item = (&Subgroup, &AHom, &Coeff)> + '_ {
        self.terms.iter().map(|((u, phi), c)| (u, phi, c))
    }

    pub fn coeff(&self, c: &CanonicalPair) -> Coeff {
        self.terms.get(&(c.u.clone(), c.phi.clone())).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Adds `c·[pair]`; the pair must already be canonical.
    pub fn add_canonical(&mut self, p: &CanonicalPair, c: &Coeff) -> Result<()> {
        if !self.space.same(&p.space) {
            return Err(pre!("pair does not live in this element's space"));
        }
        self.add_key((p.u.clone(), p.phi.clone()), c)
    }

    fn add_key(&mut self, key: (Subgroup, AHom), c: &Coeff) -> Result<()> {
        if c.ring() != self.ring {
            return Err(pre!("ring mismatch: {} vs {}", c.ring().tag(), self.ring.tag()));
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                let s = v.add(c)?;
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.space.same(&other.space) {
            return Err(pre!("elements live over different (G,H,N)"));
        }
        if self.ring != other.ring {
            return Err(pre!("ring mismatch: {} vs {}", self.ring.tag(), other.ring.tag()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_key(k.clone(), c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&self.ring.from_i64(-1))?)
    }

    pub fn scale(&self, c: &Coeff) -> Result<Self> {
        let mut out = Self::zero(&self.space, self.ring);
        for (k, v) in &self.terms {
            out.add_key(k.clone(), &v.mul(c)?)?;
        }
        Ok(out)
    }

    /// Mackey product `self ·_H other`, bilinear over the ring.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !same_group(&self.space.h, &other.space.g) || self.space.n != other.space.n {
            return Err(pre!("Mackey product needs matching middle group and modulus"));
        }
        if self.ring != other.ring {
            return Err(pre!("ring mismatch: {} vs {}", self.ring.tag(), other.ring.tag()));
        }
        let out = Space::new(self.space.g.clone(), other.space.h.clone(), self.space.n);
        self.mul_into(&out, other)
    }

    /// Mackey product into a caller-provided output space (avoids rebuilding
    /// the product table in tight loops).
    pub fn mul_into(&self, out: &SpaceRef, other: &Self) -> Result<Self> {
        let mut res = Self::zero(out, self.ring);
        for ((u1, f1), c1) in &self.terms {
            let p = FiberPair { space: self.space.clone(), u: u1.clone(), phi: f1.clone() };
            for ((u2, f2), c2) in &other.terms {
                let q = FiberPair { space: other.space.clone(), u: u2.clone(), phi: f2.clone() };
                let c = c1.mul(c2)?;
                for t in mackey_pairs(out, &p, &q) {
                    res.add_key((t.0.u, t.0.phi), &c)?;
                }
            }
        }
        Ok(res)
    }

    pub fn opposite(&self) -> Self {
        let t = self.space.flipped();
        let mut out = Self::zero(&t, self.ring);
        for ((u, phi), c) in &self.terms {
            let p = FiberPair { space: self.space.clone(), u: u.clone(), phi: phi.clone() };
            let mut o = canonicalize(&p.opposite());
            o.0.space = t.clone();
            out.add_key((o.0.u, o.0.phi), c).expect("same ring");
        }
        out
    }

    /// Applies the homomorphism `Z/N → Z/N'` sending 1 to `image_of_one`.
    pub fn change_of_fiber(&self, new_n: u32, image_of_one: u32) -> Result<Self> {
        let n = self.space.n as u64;
        if !(image_of_one as u64 * n).is_multiple_of(new_n as u64) {
            return Err(pre!("1 ↦ {image_of_one} does not define a homomorphism Z/{n} → Z/{new_n}"));
        }
        let t = Space::new(self.space.g.clone(), self.space.h.clone(), new_n);
        let mut out = Self::zero(&t, self.ring);
        for ((u, phi), c) in &self.terms {
            let vals = phi.vals.iter().map(|&v| ((v as u64 * image_of_one as u64) % new_n as u64) as u32).collect();
            let p = FiberPair { space: t.clone(), u: u.clone(), phi: AHom { n: new_n, vals } };
            let cp = canonicalize(&p);
            out.add_key((cp.0.u, cp.0.phi), c)?;
        }
        Ok(out)
    }

    /// Moves the element to an equal space object (same groups and modulus).
    pub fn rehome(&self, space: &SpaceRef) -> Result<Self> {
        if !self.space.same(space) {
            return Err(pre!("cannot move element to a different space"));
        }
        Ok(FiberedElement { space: space.clone(), ring: self.ring, terms: self.terms.clone() })
    }

    /// Keeps only terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&FiberPair) -> bool) -> Self {
        let mut out = Self::zero(&self.space, self.ring);
        for ((u, phi), c) in &self.terms {
            let p = FiberPair { space: self.space.clone(), u: u.clone(), phi: phi.clone() };
            if keep(&p) {
                out.terms.insert((u.clone(), phi.clone()), c.clone());
            }
        }
        out
    }
}

/// A subgroup `P ≤ G` with a normal subgroup `K ⊴ P` and the quotient data.
#[derive(Clone, Debug)]
pub struct Section {
    pub p: Subgroup,
    pub k: Subgroup,
    /// `P` as a group; element `i` is `p.elems()[i]`.
    pub p_table: Group,
    pub quotient: Quotient,
}

impl Section {
    pub fn new(g: &Group, p: &Subgroup, k: &Subgroup) -> Result<Section> {
        let p_table = g.subgroup_table(p);
        let kpos: Vec<usize> = k.iter().map(|x| p.position(x).ok_or_else(|| pre!("K is not inside P"))).collect::<Result<_>>()?;
        let k_in_p = p_table.subgroup(&kpos)?;
        let quotient = p_table.quotient(&k_in_p)?;
        Ok(Section { p: p.clone(), k: k.clone(), p_table, quotient })
    }

    /// Coset index of an element of `P` (given as an element of `G`).
    pub fn proj(&self, x: usize) -> usize {
        self.quotient.proj[self.p.position(x).expect("element of P")] as usize
    }

    pub fn order(&self) -> usize {
        self.quotient.group.order()
    }
}

/// The subgroup `{(p,q) : pK = θ(qL)}` of `G×H` for an isomorphism
/// `θ: Q/L → P/K`.
pub fn goursat_subgroup(space: &Space, left: &Section, right: &Section, theta: &GroupHom) -> Subgroup {
    let mut mask = BitSet::new(space.gh.order());
    for (i, a) in left.p.iter().enumerate() {
        let ca = left.quotient.proj[i] as usize;
        for (j, b) in right.p.iter().enumerate() {
            if theta.img[right.quotient.proj[j] as usize] == ca {
                mask.insert(space.enc(a, b));
            }
        }
    }
    Subgroup::from_mask(mask)
}

/// Constraints for Goursat enumeration of subgroups of `G×H`.
#[derive(Clone, Debug, Default)]
pub struct GoursatFilter {
    pub p1: Option<Subgroup>,
    pub k1: Option<Subgroup>,
    pub p2: Option<Subgroup>,
    pub k2: Option<Subgroup>,
    /// Restrict unconstrained projections to conjugacy-class representatives.
    pub reps_only: bool,
}

fn section_candidates(g: &Group, p: &Option<Subgroup>, k: &Option<Subgroup>, reps_only: bool) -> Result<Vec<Section>> {
    let ps: Vec<Subgroup> = match p {
        Some(p) => vec![p.clone()],
        None => {
            let subs = g.subgroups();
            if reps_only {
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for s in subs {
                    if seen.contains(&s) {
                        continue;
                    }
                    for x in 0..g.order() {
                        seen.insert(g.conjugate_subgroup(x, &s));
                    }
                    out.push(s);
                }
                out
            } else {
                subs
            }
        }
    };
    let mut out = Vec::new();
    for p in ps {
        let pt = g.subgroup_table(&p);
        let ks: Vec<Subgroup> = match k {
            Some(k) => vec![k.clone()],
            None => pt
                .normal_subgroups()
                .into_iter()
                .map(|kk| Subgroup::from_mask(BitSet::from_iter(g.order(), kk.iter().map(|i| p.elems()[i]))))
                .collect(),
        };
        for k in ks {
            if !k.is_subset(&p) {
                continue;
            }
            match Section::new(g, &p, &k) {
                Ok(s) => out.push(s),
                Err(Error::Precondition(_)) if k != p => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// All subgroups of `G×H` meeting the filter, via Goursat's lemma.
pub fn goursat_subgroups(space: &Space, f: &GoursatFilter) -> Result<Vec<Subgroup>> {
    let lefts = section_candidates(&space.g, &f.p1, &f.k1, f.reps_only)?;
    let rights = section_candidates(&space.h, &f.p2, &f.k2, f.reps_only)?;
    let mut out = BTreeSet::new();
    for l in &lefts {
        for r in &rights {
            if l.order() != r.order() {
                continue;
            }
            for theta in isomorphisms(&r.quotient.group, &l.quotient.group) {
                out.insert(goursat_subgroup(space, l, r, &theta));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Default bound on `|G×H|` for basis enumeration.
pub const BASIS_ORDER_BOUND: usize = 256;

/// One canonical representative per `G×H`-orbit of pairs `(U, φ)`, sorted.
pub fn standard_basis(space: &SpaceRef) -> Result<Vec<CanonicalPair>> {
    basis_with_filter(space, &GoursatFilter { reps_only: true, ..Default::default() }, |_| true)
}

/// Canonical pairs whose subgroup meets the Goursat filter and whose pair
/// passes `keep`.
pub fn basis_with_filter(space: &SpaceRef, f: &GoursatFilter, mut keep: impl FnMut(&FiberPair) -> bool) -> Result<Vec<CanonicalPair>> {
    if space.gh.order() > BASIS_ORDER_BOUND {
        return Err(Error::Resource(format!("|G×H| = {} exceeds basis bound {BASIS_ORDER_BOUND}", space.gh.order())));
    }
    let mut out = BTreeSet::new();
    for u in goursat_subgroups(space, f)? {
        for phi in homs_to_cyclic(&space.gh, &u, space.n) {
            let p = FiberPair { space: space.clone(), u: u.clone(), phi };
            if keep(&p) {
                out.insert(canonicalize(&p));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// `{(g,g) : g ∈ S}` inside `G×G`, or `{(f(x), x)}` for a map.
pub fn diagonal(space: &SpaceRef, pairs: impl IntoIterator<Item = (usize, usize)>) -> Subgroup {
    Subgroup::from_mask(BitSet::from_iter(space.gh.order(), pairs.into_iter().map(|(a, b)| space.enc(a, b))))
}

pub fn identity_pair(g: &GroupRef, n: u32) -> FiberPair {
    let space = Space::new(g.clone(), g.clone(), n);
    let u = diagonal(&space, (0..g.order()).map(|x| (x, x)));
    let phi = AHom::trivial(&u, n);
    FiberPair { space, u, phi }
}

pub fn identity_element(g: &GroupRef, n: u32, ring: RingSpec) -> FiberedElement {
    FiberedElement::from_pair(&identity_pair(g, n), ring)
}

/// Elementary bisets.
#[derive(Clone, Debug)]
pub enum Elementary {
    /// `Ind_H^G` over `(G, H)` for a subgroup `H`.
    Ind(Subgroup),
    /// `Res^G_H` over `(H, G)`.
    Res(Subgroup),
    /// `Inf_{G/N}^G` over `(G, G/N)`.
    Inf(Subgroup),
    /// `Def^G_{G/N}` over `(G/N, G)`.
    Def(Subgroup),
    /// `Iso(f)` over `(H, G)` for an isomorphism `f: G → H`.
    Iso(GroupRef, GroupHom),
}

/// Builds an elementary pair; also returns the new group (subgroup or
/// quotient table) where one is created.
pub fn elementary(g: &GroupRef, n: u32, kind: &Elementary) -> Result<(FiberPair, Option<GroupRef>)> {
    match kind {
        Elementary::Ind(h) | Elementary::Res(h) => {
            let ht: GroupRef = Arc::new(g.subgroup_table(h));
            let is_ind = matches!(kind, Elementary::Ind(_));
            let space = if is_ind { Space::new(g.clone(), ht.clone(), n) } else { Space::new(ht.clone(), g.clone(), n) };
            let u = diagonal(&space, h.iter().enumerate().map(|(i, x)| if is_ind { (x, i) } else { (i, x) }));
            let phi = AHom::trivial(&u, n);
            Ok((FiberPair { space, u, phi }, Some(ht)))
        }
        Elementary::Inf(nn) | Elementary::Def(nn) => {
            let q = g.quotient(nn)?;
            let qt: GroupRef = Arc::new(q.group.clone());
            let is_inf = matches!(kind, Elementary::Inf(_));
            let space = if is_inf { Space::new(g.clone(), qt.clone(), n) } else { Space::new(qt.clone(), g.clone(), n) };
            let u = diagonal(
                &space,
                (0..g.order()).map(|x| {
                    let c = q.proj[x] as usize;
                    if is_inf {
                        (x, c)
                    } else {
                        (c, x)
                    }
                }),
            );
            let phi = AHom::trivial(&u, n);
            Ok((FiberPair { space, u, phi }, Some(qt)))
        }
        Elementary::Iso(h, f) => {
            if !f.is_hom(g, h) || !f.is_bijective(h.order()) {
                return Err(pre!("iso data is not an isomorphism"));
            }
            let space = Space::new(h.clone(), g.clone(), n);
            let u = diagonal(&space, (0..g.order()).map(|x| (f.img[x], x)));
            let phi = AHom::trivial(&u, n);
            Ok((FiberPair { space, u, phi }, None))
        }
    }
}

/// Structural invariants of a pair: the left/right triples, the kernels of
/// the characters, `K̃ = K̂P′ ∩ K`, and the isomorphisms η and ζ.
#[derive(Clone, Debug)]
pub struct PairStructure {
    pub left: Triple,
    pub right: Triple,
    pub k_hat: Subgroup,
    pub k_tilde: Subgroup,
    pub l_hat: Subgroup,
    pub l_tilde: Subgroup,
    /// `η: Q/L → P/K` on coset indices of the two sections.
    pub eta: GroupHom,
    pub left_section: Section,
    pub right_section: Section,
    /// `ζ: L̃/L̂ → K̃/K̂` on coset indices.
    pub zeta: GroupHom,
    pub zeta_left: Section,
    pub zeta_right: Section,
}

pub fn pair_invariants(p: &FiberPair) -> Result<PairStructure> {
    let s = &p.space;
    let (g, h) = (&s.g, &s.h);
    let left = p.left();
    let right = p.right();
    let k_hat = left.kappa.kernel(&left.k, g.order());
    let l_hat = right.kappa.kernel(&right.k, h.order());
    let tilde = |grp: &Group, pp: &Subgroup, k: &Subgroup, kh: &Subgroup| -> Subgroup {
        let d = grp.derived_of(pp);
        let j = grp.join(kh, &d);
        grp.intersect(&j, k)
    };
    let k_tilde = tilde(g, &left.p, &left.k, &k_hat);
    let l_tilde = tilde(h, &right.p, &right.k, &l_hat);
    let ls = Section::new(g, &left.p, &left.k)?;
    let rs = Section::new(h, &right.p, &right.k)?;
    let mut eta = vec![usize::MAX; rs.order()];
    for x in p.u.iter() {
        let (a, b) = s.dec(x);
        let (cb, ca) = (rs.proj(b), ls.proj(a));
        if eta[cb] == usize::MAX {
            eta[cb] = ca;
        } else if eta[cb] != ca {
            return Err(internal!("η is not well defined"));
        }
    }
    let eta = GroupHom { img: eta };
    ensure_internal!(
        eta.is_hom(&rs.quotient.group, &ls.quotient.group) && eta.is_bijective(ls.order()),
        "η is not an isomorphism"
    );
    let zl = Section::new(g, &k_tilde, &k_hat)?;
    let zr = Section::new(h, &l_tilde, &l_hat)?;
    let mut zeta = vec![usize::MAX; zr.order()];
    for lt in l_tilde.iter() {
        let v = right.kappa.at(&right.k, lt);
        let kt = k_tilde
            .iter()
            .find(|&k| left.kappa.at(&left.k, k) == v)
            .ok_or_else(|| internal!("ζ has no preimage for a value of λ"))?;
        let (cl, ck) = (zr.proj(lt), zl.proj(kt));
        if zeta[cl] == usize::MAX {
            zeta[cl] = ck;
        } else if zeta[cl] != ck {
            return Err(internal!("ζ is not well defined"));
        }
    }
    let zeta = GroupHom { img: zeta };
    ensure_internal!(
        zeta.is_hom(&zr.quotient.group, &zl.quotient.group) && zeta.is_bijective(zl.order()),
        "ζ is not an isomorphism"
    );
    Ok(PairStructure { left, right, k_hat, k_tilde, l_hat, l_tilde, eta, left_section: ls, right_section: rs, zeta, zeta_left: zl, zeta_right: zr })
}

/// The five factors `Ind_P^G, Inf_{P/K̂}^P, X, Def^Q_{Q/L̂}, Res^H_Q`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub ind: FiberPair,
    pub inf: FiberPair,
    pub middle: FiberPair,
    pub def: FiberPair,
    pub res: FiberPair,
}

impl Decomposition {
    pub fn factors(&self) -> [&FiberPair; 5] {
        [&self.ind, &self.inf, &self.middle, &self.def, &self.res]
    }
}

/// Multiplies pairs left to right with Mackey products.
pub fn product_of(factors: &[&FiberPair], ring: RingSpec) -> Result<FiberedElement> {
    let mut acc = FiberedElement::from_pair(factors[0], ring);
    for f in &factors[1..] {
        acc = acc.mul(&FiberedElement::from_pair(f, ring))?;
    }
    Ok(acc)
}

pub fn decompose_standard(p: &FiberPair) -> Result<Decomposition> {
    let s = &p.space;
    let n = s.n;
    let left = p.left();
    let right = p.right();
    let k_hat = left.kappa.kernel(&left.k, s.g.order());
    let l_hat = right.kappa.kernel(&right.k, s.h.order());
    let (ind, pt) = elementary(&s.g, n, &Elementary::Ind(left.p.clone()))?;
    let pt = pt.expect("subgroup table");
    let (res, qt) = elementary(&s.h, n, &Elementary::Res(right.p.clone()))?;
    let qt = qt.expect("subgroup table");
    let khat_in_p = pt.subgroup(&k_hat.iter().map(|x| left.p.position(x).expect("K̂ ≤ P")).collect::<Vec<_>>())?;
    let lhat_in_q = qt.subgroup(&l_hat.iter().map(|x| right.p.position(x).expect("L̂ ≤ Q")).collect::<Vec<_>>())?;
    let (inf, pbar) = elementary(&pt, n, &Elementary::Inf(khat_in_p.clone()))?;
    let pbar = pbar.expect("quotient");
    let (def, qbar) = elementary(&qt, n, &Elementary::Def(lhat_in_q.clone()))?;
    let qbar = qbar.expect("quotient");
    let pq = pt.quotient(&khat_in_p)?;
    let qq = qt.quotient(&lhat_in_q)?;
    let mid_space = Space::new(pbar, qbar, n);
    let mut vals: BTreeMap<usize, u32> = BTreeMap::new();
    for (x, &v) in p.u.iter().zip(&p.phi.vals) {
        let (a, b) = s.dec(x);
        let ca = pq.proj[left.p.position(a).expect("a ∈ P")] as usize;
        let cb = qq.proj[right.p.position(b).expect("b ∈ Q")] as usize;
        let z = mid_space.enc(ca, cb);
        if let Some(&old) = vals.get(&z) {
            ensure_internal!(old == v, "φ does not descend to U/(K̂×L̂)");
        }
        vals.insert(z, v);
    }
    let u = Subgroup::from_mask(BitSet::from_iter(mid_space.gh.order(), vals.keys().copied()));
    let phi = AHom { n, vals: vals.values().copied().collect() };
    let middle = FiberPair { space: mid_space, u, phi };
    let (ml, mr) = (middle.left(), middle.right());
    ensure_internal!(
        ml.p.order() == middle.space.g.order() && mr.p.order() == middle.space.h.order(),
        "middle factor is not covering"
    );
    ensure_internal!(ml.kappa.is_faithful() && mr.kappa.is_faithful(), "middle factor characters are not faithful");
    Ok(Decomposition { ind, inf, middle, def, res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::small_catalog;
    use std::vec::Vec as StdVec;

    fn grp(name: &str) -> GroupRef {
        Arc::new(crate::grp::parse_group(name).unwrap())
    }

    /// Orbit count of pairs over the full subgroup lattice of G×H.
    fn basis_count_bruteforce(space: &SpaceRef) -> usize {
        let mut seen = BTreeSet::new();
        let mut orbits = 0;
        for u in space.gh.subgroups() {
            for phi in homs_to_cyclic(&space.gh, &u, space.n) {
                let p = FiberPair { space: space.clone(), u: u.clone(), phi };
                if seen.contains(&(p.u.clone(), p.phi.clone())) {
                    continue;
                }
                orbits += 1;
                for x in 0..space.g.order() {
                    for y in 0..space.h.order() {
                        let c = p.conjugate(x, y);
                        seen.insert((c.u, c.phi));
                    }
                }
            }
        }
        orbits
    }

    #[test]
    fn basis_sizes() {
        let c1 = grp("C1");
        let c2 = grp("C2");
        assert_eq!(standard_basis(&Space::new(c1.clone(), c1.clone(), 5)).unwrap().len(), 1);
        assert_eq!(standard_basis(&Space::new(c2.clone(), c1.clone(), 2)).unwrap().len(), 3);
        for (a, b, n) in [("C2", "C2", 2), ("S3", "C2", 2), ("C4", "C2xC2", 4), ("S3", "S3", 3), ("C2xC2", "C2xC2", 2)] {
            let s = Space::new(grp(a), grp(b), n);
            assert_eq!(standard_basis(&s).unwrap().len(), basis_count_bruteforce(&s), "{a} {b} {n}");
        }
    }

    #[test]
    fn canonical_is_invariant() {
        let s3 = grp("S3");
        let s = Space::new(s3.clone(), s3.clone(), 2);
        for b in standard_basis(&s).unwrap() {
            assert_eq!(canonicalize(&b), b);
            for x in 0..6 {
                for y in 0..6 {
                    assert_eq!(canonicalize(&b.conjugate(x, y)), b);
                }
            }
        }
    }

    #[test]
    fn identity_is_neutral() {
        for g in ["C2", "S3", "C2xC2"] {
            let g = grp(g);
            let c2 = grp("C2");
            let s = Space::new(g.clone(), c2.clone(), 2);
            let id = identity_element(&g, 2, RingSpec::Z);
            for b in standard_basis(&s).unwrap() {
                let x = FiberedElement::from_canonical(&b, RingSpec::Z);
                assert_eq!(id.mul(&x).unwrap(), x);
                let idh = identity_element(&c2, 2, RingSpec::Z);
                assert_eq!(x.mul(&idh).unwrap(), x);
            }
        }
    }

    #[test]
    fn star_clash_gives_none() {
        let c4 = grp("C4");
        let s = Space::new(c4.clone(), c4.clone(), 4);
        // U = 1 × C4 with φ(1,h) = h, V = C4 × 1 with ψ(h,1) = h: φ₂ = −id, ψ₁ = id clash on C4.
        let u: StdVec<usize> = (0..4).map(|h| s.enc(0, h)).collect();
        let p = make_pair(&s, &u, &[0, 1, 2, 3]).unwrap();
        let v: StdVec<usize> = (0..4).map(|h| s.enc(h, 0)).collect();
        let q = make_pair(&s, &v, &[0, 1, 2, 3]).unwrap();
        assert!(star_product(&p, &q).unwrap().is_none());
        let q2 = make_pair(&s, &v, &[0, 3, 2, 1]).unwrap();
        assert!(star_product(&p, &q2).unwrap().is_some());
    }

    #[test]
    fn make_pair_rejects_nonsubgroups() {
        let c2 = grp("C2");
        let s = Space::new(c2.clone(), c2.clone(), 2);
        assert!(make_pair(&s, &[0, 1, 2], &[0, 0, 0]).is_err());
        assert!(make_pair(&s, &[0, 3], &[0, 1]).is_ok());
        assert!(make_pair(&s, &[0, 3], &[0, 2]).is_err());
    }

    #[test]
    fn opposite_involution_and_antimultiplicative() {
        let s3 = grp("S3");
        let c2 = grp("C2");
        let s = Space::new(s3.clone(), c2.clone(), 2);
        let t = Space::new(c2.clone(), s3.clone(), 2);
        let a = standard_basis(&s).unwrap();
        let b = standard_basis(&t).unwrap();
        for x in &a {
            let e = FiberedElement::from_canonical(x, RingSpec::Z);
            assert_eq!(e.opposite().opposite(), e);
        }
        for x in a.iter().step_by(3) {
            for y in b.iter().step_by(3) {
                let ex = FiberedElement::from_canonical(x, RingSpec::Z);
                let ey = FiberedElement::from_canonical(y, RingSpec::Z);
                let lhs = ex.mul(&ey).unwrap().opposite();
                let rhs = ey.opposite().mul(&ex.opposite()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn associativity_small() {
        let gs = ["C2", "C3", "C2xC2"];
        for n in [2u32, 4] {
            for a in gs {
                for b in gs {
                    for c in ["C1", "C2"] {
                        let (ga, gb, gc, gd) = (grp(a), grp(b), grp(c), grp("C2"));
                        let xs = standard_basis(&Space::new(ga.clone(), gb.clone(), n)).unwrap();
                        let ys = standard_basis(&Space::new(gb.clone(), gc.clone(), n)).unwrap();
                        let zs = standard_basis(&Space::new(gc.clone(), gd.clone(), n)).unwrap();
                        for x in xs.iter().step_by(2) {
                            for y in ys.iter().step_by(2) {
                                for z in &zs {
                                    let (x, y, z) = (
                                        FiberedElement::from_canonical(x, RingSpec::Z),
                                        FiberedElement::from_canonical(y, RingSpec::Z),
                                        FiberedElement::from_canonical(z, RingSpec::Z),
                                    );
                                    let l = x.mul(&y).unwrap().mul(&z).unwrap();
                                    let r = x.mul(&y.mul(&z).unwrap()).unwrap();
                                    assert_eq!(l, r);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn projection_monotonicity() {
        let g = grp("S3");
        let s = Space::new(g.clone(), g.clone(), 2);
        let basis = standard_basis(&s).unwrap();
        for p in &basis {
            for q in &basis {
                if let Some(st) = star_product(p, q).unwrap() {
                    let (lp, ls) = (p.left(), st.left());
                    assert!(ls.k.is_subset(&ls.p) && ls.p.is_subset(&lp.p) && lp.k.is_subset(&ls.k));
                }
            }
        }
    }

    #[test]
    fn invariants_of_pairs() {
        for g in small_catalog(8).groups {
            for n in [2u32, 4] {
                let s = Space::new(g.clone(), grp("C2xC2"), n);
                for b in standard_basis(&s).unwrap() {
                    let st = pair_invariants(&b).unwrap();
                    assert_eq!(st.left_section.order(), st.right_section.order());
                    assert_eq!(st.zeta_left.order(), st.zeta_right.order());
                }
            }
        }
    }

    #[test]
    fn five_factor_roundtrip() {
        for (a, b, n) in [("S3", "C2", 2u32), ("C4", "C2xC2", 4), ("C2xC2", "S3", 6), ("D8", "C2", 4)] {
            let s = Space::new(grp(a), grp(b), n);
            for p in standard_basis(&s).unwrap() {
                let d = decompose_standard(&p).unwrap();
                let prod = product_of(&d.factors(), RingSpec::Z).unwrap();
                assert_eq!(prod, FiberedElement::from_canonical(&p, RingSpec::Z), "{a} {b} {n}");
            }
        }
    }

    #[test]
    fn elementary_identities() {
        let s3 = grp("S3");
        let h = s3.closure(&[1]);
        let (ind, _) = elementary(&s3, 2, &Elementary::Ind(s3.whole())).unwrap();
        assert_eq!(canonicalize(&ind), canonicalize(&identity_pair(&s3, 2)));
        let a3 = s3.derived();
        let (inf, _) = elementary(&s3, 2, &Elementary::Inf(a3.clone())).unwrap();
        let (def, _) = elementary(&s3, 2, &Elementary::Def(a3)).unwrap();
        let dd = FiberedElement::from_pair(&def, RingSpec::Z).mul(&FiberedElement::from_pair(&inf, RingSpec::Z)).unwrap();
        assert_eq!(dd.len(), 1);
        let qid = identity_element(&def.space.g, 2, RingSpec::Z);
        assert_eq!(dd, qid.rehome(&dd.space).unwrap());
        // Res∘Ind over H\G/H: two double cosets for a transposition subgroup of S3.
        let (ind, _) = elementary(&s3, 2, &Elementary::Ind(h.clone())).unwrap();
        let (res, _) = elementary(&s3, 2, &Elementary::Res(h.clone())).unwrap();
        let ri = FiberedElement::from_pair(&res, RingSpec::Z).mul(&FiberedElement::from_pair(&ind, RingSpec::Z)).unwrap();
        let total: i64 = ri.terms().map(|(_, c)| c.to_i64().unwrap()).sum();
        assert_eq!(total as usize, double_coset_reps(&s3, &h, &h).len());
    }

    #[test]
    fn change_of_fiber_cases() {
        let c2 = grp("C2");
        let s = Space::new(c2.clone(), c2.clone(), 2);
        let basis = standard_basis(&s).unwrap();
        let mut images = BTreeSet::new();
        for b in &basis {
            let e = FiberedElement::from_canonical(b, RingSpec::Z);
            assert_eq!(e.change_of_fiber(2, 1).unwrap(), e);
            let z = e.change_of_fiber(1, 0).unwrap();
            assert!(z.terms().all(|(p, _)| p.phi.vals.iter().all(|&v| v == 0)));
            let inj = e.change_of_fiber(4, 2).unwrap();
            let (t, _) = inj.terms().next().unwrap();
            images.insert((t.u.clone(), t.phi.clone()));
        }
        assert_eq!(images.len(), basis.len());
        assert!(FiberedElement::from_canonical(&basis[0], RingSpec::Z).change_of_fiber(4, 1).is_err());
    }
}
