//! Second cohomology of finite groups with trivial coefficients, the
//! cohomological linkage criterion, the functions `α_n`, squeezing with the
//! insertion and deletion bisets, and the seven-factor decomposition.
//!
//! Operations that depend on the torsion hypothesis on `A` run in
//! hypothesis mode: `A = Z/N` with `|G|` dividing `N`. They refuse other
//! inputs with a precondition error.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitSet;
use crate::error::{ensure_internal, internal, pre, Error, Result};
use crate::fib::{decompose_standard, same_group, FiberPair, FiberedElement, Space};
use crate::grp::{
    abelian_basis, automorphism_group, gcd, homs_to_cyclic, invariant_factors_from_primary, isomorphic, lcm, prime_factors,
    section_with_cocycle, AHom, Group, GroupHom, GroupRef, Subgroup, DEFAULT_ORDER_BOUND,
};
use crate::idem::{is_g_stable, CentralPair};
use crate::linalg::{div_mod, kernel_mod, mat_vec, snf_mod, solve_mod, Mat, Track};
use crate::ring::RingSpec;

/// Largest `|Q|` for which `H²(Q, B)` is computed.
pub const H2_ORDER_BOUND: usize = 16;

/// A finite abelian group `Z/o₁ × … × Z/o_r`; elements are residue vectors.
/// The cyclic orders are a chosen decomposition, not necessarily the
/// invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinAb {
    pub orders: Vec<u64>,
}

impl FinAb {
    pub fn new(orders: &[u64]) -> FinAb {
        FinAb { orders: orders.iter().copied().filter(|&o| o > 1).collect() }
    }

    pub fn cyclic(n: u64) -> FinAb {
        FinAb::new(&[n])
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |a, &o| lcm(a, o))
    }

    /// Invariant factors `d₁ | d₂ | …`.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let mut primary = Vec::new();
        for &o in &self.orders {
            for p in prime_factors(o) {
                let mut q = 1;
                let mut r = o;
                while r % p == 0 {
                    r /= p;
                    q *= p;
                }
                primary.push(q);
            }
        }
        invariant_factors_from_primary(&primary)
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        v.iter().zip(&self.orders).map(|(&x, &o)| x % o).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.orders).map(|((&x, &y), &o)| (x + y) % o).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.orders).map(|(&x, &o)| (o - x % o) % o).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &[u64], k: u64) -> Vec<u64> {
        a.iter().zip(&self.orders).map(|(&x, &o)| (x as u128 * k as u128 % o as u128) as u64).collect()
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().zip(&self.orders).all(|(&x, &o)| x % o == 0)
    }

    /// Mixed-radix index, first coordinate fastest; the zero vector is 0.
    pub fn index_of(&self, a: &[u64]) -> usize {
        let mut idx = 0u64;
        for (&x, &o) in a.iter().zip(&self.orders).rev() {
            idx = idx * o + x % o;
        }
        idx as usize
    }

    pub fn element(&self, mut i: usize) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&o| {
                let x = i as u64 % o;
                i /= o as usize;
                x
            })
            .collect()
    }

    pub fn elements(&self) -> Vec<Vec<u64>> {
        (0..self.order() as usize).map(|i| self.element(i)).collect()
    }

    pub fn unit(&self, j: usize) -> Vec<u64> {
        let mut v = self.zero();
        v[j] = 1;
        v
    }
}

/// The subgroup generated by `gens` together with a witness for every
/// element, built by breadth-first search. Witnesses combine with `add`.
fn span_with<W: Clone>(ab: &FinAb, gens: &[(Vec<u64>, W)], zero: W, add: impl Fn(&W, &W) -> W) -> BTreeMap<Vec<u64>, W> {
    let mut out = BTreeMap::new();
    out.insert(ab.zero(), zero.clone());
    let mut queue = vec![(ab.zero(), zero)];
    let mut i = 0;
    while i < queue.len() {
        let (v, w) = queue[i].clone();
        for (g, gw) in gens {
            let s = ab.add(&v, g);
            if !out.contains_key(&s) {
                let sw = add(&w, gw);
                out.insert(s.clone(), sw.clone());
                queue.push((s, sw));
            }
        }
        i += 1;
    }
    out
}

/// An abelian subgroup of a group with coordinates for its elements.
#[derive(Clone, Debug)]
pub struct AbelianSub {
    pub sub: Subgroup,
    pub ab: FinAb,
    /// Basis elements as indices of the ambient group.
    pub gens: Vec<usize>,
    coords: Vec<Vec<u64>>,
}

impl AbelianSub {
    pub fn new(g: &Group, s: &Subgroup) -> Result<AbelianSub> {
        let t = g.subgroup_table(s);
        let basis = abelian_basis(&t)?;
        let gens = basis.gens.iter().map(|&i| s.elems()[i]).collect();
        Ok(AbelianSub { sub: s.clone(), ab: FinAb { orders: basis.orders }, gens, coords: basis.coords })
    }

    pub fn coord(&self, x: usize) -> Vec<u64> {
        self.coords[self.sub.position(x).expect("element of the subgroup")].clone()
    }

    pub fn elem(&self, g: &Group, v: &[u64]) -> usize {
        self.gens.iter().zip(v).fold(0, |acc, (&x, &c)| g.mul(acc, g.pow(x, c)))
    }
}

/// A function `Q×Q → B`, stored row-major. Cocycles satisfy
/// `α(x,y) + α(xy,z) = α(y,z) + α(x,yz)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleTable {
    pub q: GroupRef,
    pub b: FinAb,
    pub vals: Vec<Vec<u64>>,
}

impl CocycleTable {
    /// Validated constructor.
    pub fn new(q: &GroupRef, b: &FinAb, vals: Vec<Vec<u64>>) -> Result<CocycleTable> {
        let n = q.order();
        if vals.len() != n * n || vals.iter().any(|v| v.len() != b.rank()) {
            return Err(pre!("cocycle table has the wrong shape"));
        }
        let t = CocycleTable { q: q.clone(), b: b.clone(), vals: vals.iter().map(|v| b.reduce(v)).collect() };
        if !t.satisfies_identity() {
            return Err(pre!("table does not satisfy the 2-cocycle identity"));
        }
        Ok(t)
    }

    pub fn from_fn(q: &GroupRef, b: &FinAb, f: impl Fn(usize, usize) -> Vec<u64>) -> CocycleTable {
        let n = q.order();
        let mut vals = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                vals.push(b.reduce(&f(x, y)));
            }
        }
        CocycleTable { q: q.clone(), b: b.clone(), vals }
    }

    pub fn zero(q: &GroupRef, b: &FinAb) -> CocycleTable {
        CocycleTable { q: q.clone(), b: b.clone(), vals: vec![b.zero(); q.order() * q.order()] }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> &[u64] {
        &self.vals[x * self.q.order() + y]
    }

    pub fn satisfies_identity(&self) -> bool {
        let (q, b) = (&self.q, &self.b);
        let n = q.order();
        (0..n).all(|x| {
            (0..n).all(|y| {
                (0..n).all(|z| {
                    b.add(self.at(x, y), self.at(q.mul(x, y), z)) == b.add(self.at(y, z), self.at(x, q.mul(y, z)))
                })
            })
        })
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.q.order();
        (0..n).all(|x| (0..n).all(|y| self.at(x, y) == self.at(y, x)))
    }

    fn zip(&self, other: &CocycleTable, f: impl Fn(&[u64], &[u64]) -> Vec<u64>) -> CocycleTable {
        assert!(same_group(&self.q, &other.q) && self.b == other.b, "cocycles over different data");
        CocycleTable { q: self.q.clone(), b: self.b.clone(), vals: self.vals.iter().zip(&other.vals).map(|(a, c)| f(a, c)).collect() }
    }

    pub fn add(&self, other: &CocycleTable) -> CocycleTable {
        self.zip(other, |a, c| self.b.add(a, c))
    }

    pub fn sub(&self, other: &CocycleTable) -> CocycleTable {
        self.zip(other, |a, c| self.b.sub(a, c))
    }

    pub fn scale(&self, k: u64) -> CocycleTable {
        CocycleTable { q: self.q.clone(), b: self.b.clone(), vals: self.vals.iter().map(|v| self.b.scale(v, k)).collect() }
    }

    /// `δf(x,y) = f(x) + f(y) − f(xy)`.
    pub fn coboundary(q: &GroupRef, b: &FinAb, f: &[Vec<u64>]) -> CocycleTable {
        CocycleTable::from_fn(q, b, |x, y| b.sub(&b.add(&f[x], &f[y]), &f[q.mul(x, y)]))
    }

    /// Subtracts the constant coboundary `α(1,1)`, giving `α(1,·) = α(·,1) = 0`.
    pub fn normalized(&self) -> CocycleTable {
        let c = self.at(0, 0).to_vec();
        CocycleTable { q: self.q.clone(), b: self.b.clone(), vals: self.vals.iter().map(|v| self.b.sub(v, &c)).collect() }
    }

    /// `f ∘ α` for a homomorphism `f: B → C`.
    pub fn map_coeffs(&self, c: &FinAb, f: impl Fn(&[u64]) -> Vec<u64>) -> CocycleTable {
        CocycleTable { q: self.q.clone(), b: c.clone(), vals: self.vals.iter().map(|v| c.reduce(&f(v))).collect() }
    }

    /// `α ∘ (f×f)` for a homomorphism `f: Q₂ → Q`.
    pub fn pullback(&self, q2: &GroupRef, f: &GroupHom) -> CocycleTable {
        CocycleTable::from_fn(q2, &self.b, |x, y| self.at(f.img[x], f.img[y]).to_vec())
    }

    /// `α ∘ (ν×ν)` for the projection `ν: Q → Q̄` given by `proj`, where
    /// `self` lives over `Q̄`.
    pub fn inflate(&self, q: &GroupRef, proj: &[u32]) -> CocycleTable {
        CocycleTable::from_fn(q, &self.b, |x, y| self.at(proj[x] as usize, proj[y] as usize).to_vec())
    }

    /// The component `c` of the normalized table as a vector over the
    /// non-identity pairs.
    fn component(&self, c: usize) -> Vec<u64> {
        let n = self.q.order();
        let a = self.normalized();
        let mut out = Vec::with_capacity((n - 1) * (n - 1));
        for x in 1..n {
            for y in 1..n {
                out.push(a.at(x, y)[c]);
            }
        }
        out
    }
}

#[inline]
fn pair_index(n: usize, x: usize, y: usize) -> usize {
    (x - 1) * (n - 1) + (y - 1)
}

/// `δ: C¹ → C²` on normalized cochains over Z/d.
fn delta1_matrix(q: &Group, d: u64) -> Mat {
    let n = q.order();
    let mut m = vec![vec![0u64; n - 1]; (n - 1) * (n - 1)];
    for x in 1..n {
        for y in 1..n {
            let r = &mut m[pair_index(n, x, y)];
            r[x - 1] = (r[x - 1] + 1) % d;
            r[y - 1] = (r[y - 1] + 1) % d;
            let xy = q.mul(x, y);
            if xy != 0 {
                r[xy - 1] = (r[xy - 1] + d - 1) % d;
            }
        }
    }
    m
}

/// The cocycle identity on normalized cochains over Z/d, optionally with
/// symmetry rows `α(x,y) = α(y,x)`.
fn cocycle_rows(q: &Group, d: u64, symmetric: bool) -> Mat {
    let n = q.order();
    let m = (n - 1) * (n - 1);
    let mut rows = Vec::new();
    let bump = |r: &mut Vec<u64>, a: usize, b: usize, s: u64| {
        if a != 0 && b != 0 {
            let i = pair_index(n, a, b);
            r[i] = (r[i] + s) % d;
        }
    };
    for x in 1..n {
        for y in 1..n {
            for z in 1..n {
                let mut r = vec![0u64; m];
                bump(&mut r, y, z, 1);
                bump(&mut r, q.mul(x, y), z, d - 1);
                bump(&mut r, x, q.mul(y, z), 1);
                bump(&mut r, x, y, d - 1);
                if r.iter().any(|&v| v != 0) {
                    rows.push(r);
                }
            }
        }
    }
    if symmetric {
        for x in 1..n {
            for y in x + 1..n {
                let mut r = vec![0u64; m];
                bump(&mut r, x, y, 1);
                bump(&mut r, y, x, d - 1);
                rows.push(r);
            }
        }
    }
    rows
}

fn kernel_or_all(rows: &Mat, m: usize, d: u64) -> Vec<Vec<u64>> {
    if rows.is_empty() {
        (0..m).map(|i| (0..m).map(|j| (i == j) as u64).collect()).collect()
    } else {
        kernel_mod(rows, m, d)
    }
}

/// `H²(Q, Z/d)` in coordinates: `C²/B²` is diagonalized by `P₁`, and the
/// image of `Z²` in it by `P₂`.
#[derive(Clone, Debug)]
struct CyclicH2 {
    d: u64,
    n: usize,
    d1: Mat,
    p1: Mat,
    e: Vec<u64>,
    p2: Mat,
    s2: Vec<u64>,
    /// `(row of P₂, order)` for each nontrivial coordinate.
    coords: Vec<(usize, u64)>,
    reps: Vec<Vec<u64>>,
    z2: Vec<Vec<u64>>,
}

impl CyclicH2 {
    fn new(q: &Group, d: u64) -> CyclicH2 {
        let n = q.order();
        let m = (n - 1) * (n - 1);
        let empty = CyclicH2 { d, n, d1: Vec::new(), p1: Vec::new(), e: Vec::new(), p2: Vec::new(), s2: Vec::new(), coords: Vec::new(), reps: Vec::new(), z2: Vec::new() };
        if m == 0 {
            return empty;
        }
        let d1 = delta1_matrix(q, d);
        let z2 = kernel_or_all(&cocycle_rows(q, d, false), m, d);
        let snf1 = snf_mod(&d1, d, Track { left: true, right: false });
        let p1 = snf1.left.expect("tracked");
        let e: Vec<u64> = (0..m).map(|i| gcd(snf1.diag.get(i).copied().unwrap_or(0), d)).collect();
        let mut h = CyclicH2 { d1, p1, e, z2, ..empty };
        if h.z2.is_empty() {
            return h;
        }
        let gm: Vec<Vec<u64>> = {
            let cols: Vec<Vec<u64>> = h.z2.iter().map(|z| h.embed(z)).collect();
            (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
        };
        let snf2 = snf_mod(&gm, d, Track { left: true, right: true });
        let q2 = snf2.right.expect("tracked");
        h.p2 = snf2.left.expect("tracked");
        h.s2 = snf2.diag.clone();
        for (j, &s) in snf2.diag.iter().enumerate() {
            let o = d / gcd(s, d);
            if o > 1 {
                h.coords.push((j, o));
                let mut rep = vec![0u64; m];
                for (l, z) in h.z2.iter().enumerate() {
                    let c = q2[l][j];
                    for (r, &zv) in rep.iter_mut().zip(z) {
                        *r = ((*r as u128 + c as u128 * zv as u128) % d as u128) as u64;
                    }
                }
                h.reps.push(rep);
            }
        }
        h
    }

    /// `C² → C²/B² ↪ (Z/d)^m`.
    fn embed(&self, x: &[u64]) -> Vec<u64> {
        let d = self.d;
        let y = mat_vec(&self.p1, x, d);
        y.iter().zip(&self.e).map(|(&yi, &ei)| (yi % ei) * (d / ei) % d).collect()
    }

    fn project(&self, x: &[u64]) -> Option<Vec<u64>> {
        if self.coords.is_empty() {
            return Some(Vec::new());
        }
        let z = mat_vec(&self.p2, &self.embed(x), self.d);
        self.coords.iter().map(|&(j, o)| div_mod(self.s2[j], z[j], self.d).map(|c| c % o)).collect()
    }

    /// `f` with `δf = x` on normalized cochains.
    fn solve_coboundary(&self, x: &[u64]) -> Option<Vec<u64>> {
        if self.n <= 1 {
            return Some(Vec::new());
        }
        solve_mod(&self.d1, x, self.d)
    }
}

/// `H²(Q, B)` as a finite abelian group with a projection from cocycles.
#[derive(Clone, Debug)]
pub struct H2Group {
    pub q: GroupRef,
    pub b: FinAb,
    pub h2: FinAb,
    comps: Vec<CyclicH2>,
    /// `(component of B, coordinate within it)` for each coordinate of `h2`.
    slots: Vec<(usize, usize)>,
}

/// A cohomology class with a representative and its normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H2Class {
    pub rep: CocycleTable,
    pub nf: Vec<u64>,
}

pub fn h2_group(q: &GroupRef, b: &FinAb) -> Result<H2Group> {
    if q.order() > H2_ORDER_BOUND {
        return Err(Error::Resource(format!("H² of a group of order {} exceeds bound {H2_ORDER_BOUND}", q.order())));
    }
    let comps: Vec<CyclicH2> = b.orders.iter().map(|&d| CyclicH2::new(q, d)).collect();
    let mut orders = Vec::new();
    let mut slots = Vec::new();
    for (c, h) in comps.iter().enumerate() {
        for (i, &(_, o)) in h.coords.iter().enumerate() {
            orders.push(o);
            slots.push((c, i));
        }
    }
    let h2 = FinAb { orders };
    ensure_internal!((q.order() as u64).is_multiple_of(h2.exponent()), "exponent of H² does not divide |Q|");
    Ok(H2Group { q: q.clone(), b: b.clone(), h2, comps, slots })
}

impl H2Group {
    fn check(&self, a: &CocycleTable) -> Result<()> {
        if !same_group(&self.q, &a.q) || self.b != a.b {
            return Err(pre!("cocycle does not live over this H²"));
        }
        if !a.satisfies_identity() {
            return Err(pre!("table is not a 2-cocycle"));
        }
        Ok(())
    }

    /// Normal-form vector of `[α]`.
    pub fn project(&self, a: &CocycleTable) -> Result<Vec<u64>> {
        self.check(a)?;
        let mut per: Vec<Vec<u64>> = Vec::with_capacity(self.comps.len());
        for (c, h) in self.comps.iter().enumerate() {
            per.push(h.project(&a.component(c)).ok_or_else(|| internal!("cocycle outside the image of Z²"))?);
        }
        Ok(self.slots.iter().map(|&(c, i)| per[c][i]).collect())
    }

    pub fn class(&self, a: &CocycleTable) -> Result<H2Class> {
        Ok(H2Class { rep: a.clone(), nf: self.project(a)? })
    }

    fn from_components(&self, comps: Vec<Vec<u64>>) -> CocycleTable {
        let n = self.q.order();
        CocycleTable::from_fn(&self.q, &self.b, |x, y| {
            if x == 0 || y == 0 {
                self.b.zero()
            } else {
                comps.iter().map(|v| v[pair_index(n, x, y)]).collect()
            }
        })
    }

    /// A normalized cocycle in the class with normal form `v`.
    pub fn representative(&self, v: &[u64]) -> CocycleTable {
        let n = self.q.order();
        let m = (n - 1) * (n - 1);
        let mut comps: Vec<Vec<u64>> = self.comps.iter().map(|_| vec![0u64; m]).collect();
        for (k, &(c, i)) in self.slots.iter().enumerate() {
            let h = &self.comps[c];
            for (r, &x) in comps[c].iter_mut().zip(&h.reps[i]) {
                *r = ((*r as u128 + v[k] as u128 * x as u128) % h.d as u128) as u64;
            }
        }
        self.from_components(comps)
    }

    /// Generators of the normalized cocycles.
    pub fn z2_generators(&self) -> Vec<CocycleTable> {
        let n = self.q.order();
        let m = (n - 1) * (n - 1);
        let mut out = Vec::new();
        for (c, h) in self.comps.iter().enumerate() {
            for z in &h.z2 {
                let mut comps: Vec<Vec<u64>> = self.comps.iter().map(|_| vec![0u64; m]).collect();
                comps[c] = z.clone();
                out.push(self.from_components(comps));
            }
        }
        out
    }

    /// `δ` of the point functions `1_x`, `x ≠ 1`.
    pub fn b2_generators(&self) -> Vec<CocycleTable> {
        let n = self.q.order();
        let mut out = Vec::new();
        for c in 0..self.b.rank() {
            for x in 1..n {
                let f: Vec<Vec<u64>> = (0..n)
                    .map(|y| {
                        let mut v = self.b.zero();
                        if y == x {
                            v[c] = 1;
                        }
                        v
                    })
                    .collect();
                out.push(CocycleTable::coboundary(&self.q, &self.b, &f));
            }
        }
        out
    }

    /// `f: Q → B` with `α = δf`, if `α` is a coboundary. Decided by a linear
    /// solve, independently of the normal form.
    pub fn coboundary_witness(&self, a: &CocycleTable) -> Result<Option<Vec<Vec<u64>>>> {
        self.check(a)?;
        let n = self.q.order();
        let c0 = a.at(0, 0).to_vec();
        let mut f: Vec<Vec<u64>> = vec![c0; n];
        for (c, h) in self.comps.iter().enumerate() {
            let Some(sol) = h.solve_coboundary(&a.component(c)) else { return Ok(None) };
            for x in 1..n {
                f[x][c] = (f[x][c] + sol[x - 1]) % h.d;
            }
        }
        let check = CocycleTable::coboundary(&self.q, &self.b, &f);
        ensure_internal!(check == *a, "coboundary solve returned a wrong witness");
        Ok(Some(f))
    }

    pub fn same_class(&self, a: &CocycleTable, b: &CocycleTable) -> Result<bool> {
        Ok(self.coboundary_witness(&a.sub(b))?.is_some())
    }
}

/// `B* = Hom(B, Z/N)` as images of the basis vectors of `B`, sorted.
pub fn dual_group(b: &FinAb, n: u32) -> Vec<Vec<u64>> {
    let n = n as u64;
    let steps: Vec<(u64, u64)> = b.orders.iter().map(|&o| (gcd(o, n), n / gcd(o, n))).collect();
    let total: u64 = steps.iter().map(|s| s.0).product();
    let mut out: Vec<Vec<u64>> = (0..total)
        .map(|mut i| {
            steps
                .iter()
                .map(|&(c, step)| {
                    let k = i % c;
                    i /= c;
                    k * step
                })
                .collect()
        })
        .collect();
    out.sort();
    out
}

pub fn apply_character(mu: &[u64], v: &[u64], n: u32) -> u64 {
    mu.iter().zip(v).map(|(&a, &b)| a * b).sum::<u64>() % n as u64
}

/// `Ψ([α]) = (μ ↦ [μ∘α])`, listed over `dual_group(B, N)`.
pub fn psi(hb: &H2Group, hn: &H2Group, a: &CocycleTable) -> Result<Vec<(Vec<u64>, Vec<u64>)>> {
    let n = hn.b.orders.first().copied().unwrap_or(1);
    if hn.b.rank() > 1 || !same_group(&hb.q, &hn.q) {
        return Err(pre!("Ψ needs H²(Q, Z/N) over the same Q"));
    }
    hb.check(a)?;
    let target = &hn.b;
    dual_group(&hb.b, n as u32)
        .into_iter()
        .map(|mu| {
            let t = a.map_coeffs(target, |v| target.reduce(&[apply_character(&mu, v, n as u32)]));
            hn.project(&t).map(|c| (mu, c))
        })
        .collect()
}

/// Maps between cohomology groups used in the commutative diagram of the
/// squeezing construction.
pub enum ClassOp<'a> {
    /// Change of coefficients along a homomorphism of coefficient groups.
    Coefficients(&'a dyn Fn(&[u64]) -> Vec<u64>),
    /// Inflation along `Q → Q̄`, given as coset indices.
    Inflate(&'a [u32]),
    /// `α ↦ α∘(f×f)` for `f: Q_target → Q_source`; with `f = η⁻¹` this is
    /// the action of an isomorphism `η`.
    Pullback(&'a GroupHom),
}

pub fn class_op(c: &H2Class, op: &ClassOp, target: &H2Group) -> Result<H2Class> {
    let rep = match op {
        ClassOp::Coefficients(f) => c.rep.map_coeffs(&target.b, f),
        ClassOp::Inflate(proj) => c.rep.inflate(&target.q, proj),
        ClassOp::Pullback(f) => c.rep.pullback(&target.q, f),
    };
    target.class(&rep)
}

/// Generators of the symmetric normalized cocycles over an abelian `Q`.
pub fn symmetric_generators(q: &GroupRef, b: &FinAb) -> Result<Vec<CocycleTable>> {
    if q.order() > H2_ORDER_BOUND {
        return Err(Error::Resource(format!("cocycles of a group of order {} exceed bound {H2_ORDER_BOUND}", q.order())));
    }
    let n = q.order();
    let m = (n - 1) * (n - 1);
    let mut out = Vec::new();
    for (c, &d) in b.orders.iter().enumerate() {
        if m == 0 {
            break;
        }
        for z in kernel_or_all(&cocycle_rows(q, d, true), m, d) {
            out.push(CocycleTable::from_fn(q, b, |x, y| {
                let mut v = b.zero();
                if x != 0 && y != 0 {
                    v[c] = z[pair_index(n, x, y)];
                }
                v
            }));
        }
    }
    Ok(out)
}

/// `α_n(s₁,…,s_{2n})`, written additively.
pub fn alpha_n(a: &CocycleTable, n: usize, s: &[usize]) -> Result<Vec<u64>> {
    let q = &a.q;
    let b = &a.b;
    if n == 0 || s.len() != 2 * n {
        return Err(pre!("α_n needs n ≥ 1 and 2n arguments"));
    }
    if s.iter().any(|&x| x >= q.order()) {
        return Err(pre!("argument out of range"));
    }
    let alpha1 = |s1: usize, s2: usize| -> Vec<u64> {
        let inv = q.mul(q.inv(s1), q.inv(s2));
        let mut v = b.sub(a.at(s1, s2), a.at(s2, s1));
        v = b.sub(&v, a.at(q.mul(s2, s1), inv));
        v = b.add(&v, a.at(q.mul(s1, s2), inv));
        b.sub(&v, a.at(0, 0))
    };
    let mut acc = alpha1(s[0], s[1]);
    let mut c = q.commutator(s[0], s[1]);
    for i in 1..n {
        let (x, y) = (s[2 * i], s[2 * i + 1]);
        let cxy = q.commutator(x, y);
        acc = b.add(&acc, &alpha1(x, y));
        acc = b.add(&acc, a.at(c, cxy));
        c = q.mul(c, cxy);
    }
    Ok(acc)
}

/// `(Ḡ, K̄, κ̄)` with `Ḡ = G/ker κ`; `proj` maps `G` onto `Ḡ`.
#[derive(Clone, Debug)]
pub struct FaithfulTriple {
    pub g: GroupRef,
    pub k: Subgroup,
    pub kappa: AHom,
    pub proj: Vec<u32>,
}

fn check_central_pair(g: &Group, k: &Subgroup, kappa: &AHom) -> Result<()> {
    if !g.is_normal(k) || !kappa.is_hom(g, k) || !is_g_stable(g, k, kappa) {
        return Err(pre!("(K,κ) is not a G-stable pair with K normal in G"));
    }
    Ok(())
}

pub fn faithful_reduction(g: &GroupRef, k: &Subgroup, kappa: &AHom) -> Result<FaithfulTriple> {
    check_central_pair(g, k, kappa)?;
    let ker = kappa.kernel(k, g.order());
    let q = g.quotient(&ker)?;
    let qn = q.group.order();
    let kb = Subgroup::from_mask(BitSet::from_iter(qn, k.iter().map(|x| q.proj[x] as usize)));
    let mut vals = vec![0u32; kb.order()];
    for x in k.iter() {
        vals[kb.position(q.proj[x] as usize).expect("image")] = kappa.at(k, x);
    }
    Ok(FaithfulTriple { g: Arc::new(q.group), k: kb, kappa: AHom { n: kappa.n, vals }, proj: q.proj })
}

/// Result of the cohomological linkage test. `eta` maps coset indices of
/// `H̄/L̄` to those of `Ḡ/K̄` (quotients by the character kernels first).
#[derive(Clone, Debug)]
pub struct CohomLinkage {
    pub linked: bool,
    pub eta: Option<GroupHom>,
    pub left_quotient: GroupRef,
    pub right_quotient: GroupRef,
    /// Number of isomorphisms tried (one per outer class).
    pub tried: usize,
}

/// `κ∘α` over `G/K` for a faithful triple, with the quotient group.
fn twisted_class_table(t: &FaithfulTriple, n: u32) -> Result<(GroupRef, CocycleTable)> {
    let sc = section_with_cocycle(&t.g, &t.k)?;
    let q: GroupRef = Arc::new(sc.quotient.group.clone());
    let b = FinAb::cyclic(n as u64);
    let table = CocycleTable::from_fn(&q, &b, |x, y| b.reduce(&[t.kappa.at(&t.k, sc.alpha(x, y)) as u64]));
    ensure_internal!(table.satisfies_identity(), "κ∘α is not a cocycle");
    Ok((q, table))
}

pub fn linkage_via_cohomology(g: &GroupRef, a: &CentralPair, h: &GroupRef, b: &CentralPair, n: u32) -> Result<CohomLinkage> {
    if a.kappa.n != n || b.kappa.n != n {
        return Err(pre!("characters do not take values in Z/{n}"));
    }
    let tg = faithful_reduction(g, &a.k, &a.kappa)?;
    let th = faithful_reduction(h, &b.k, &b.kappa)?;
    let (qg, ag) = twisted_class_table(&tg, n)?;
    let (qh, bh) = twisted_class_table(&th, n)?;
    let none = |tried| CohomLinkage { linked: false, eta: None, left_quotient: qg.clone(), right_quotient: qh.clone(), tried };
    let Some(eta0) = isomorphic(&qh, &qg) else { return Ok(none(0)) };
    let hg = h2_group(&qg, &FinAb::cyclic(n as u64))?;
    let target = hg.project(&ag)?;
    let auts = automorphism_group(&qg, DEFAULT_ORDER_BOUND.max(qg.order()))?;
    let mut tried = 0;
    for &r in &auts.out.reps {
        let eta = auts.auts[r as usize].compose(&eta0);
        tried += 1;
        let moved = bh.pullback(&qg, &eta.inverse());
        if hg.project(&moved)? == target {
            return Ok(CohomLinkage { linked: true, eta: Some(eta), left_quotient: qg, right_quotient: qh, tried });
        }
    }
    Ok(none(tried))
}

fn require_hypothesis(order: usize, n: u32) -> Result<()> {
    if !(n as usize).is_multiple_of(order) {
        return Err(pre!("hypothesis mode needs |G| = {order} to divide N = {n}"));
    }
    Ok(())
}

/// The squeezing construction for `(G, K, κ)`: a central extension `G̃` of
/// `G/K` by `K̃ = K ∩ G′` and the insertion pair `(M, μ)` over `(G, G̃)`.
/// `G̃` has elements `(k̃, s)` indexed `s·|K̃| + index(k̃)`.
#[derive(Clone, Debug)]
pub struct Squeeze {
    pub g: GroupRef,
    pub k: Subgroup,
    pub kappa: AHom,
    pub k_tilde: Subgroup,
    pub quotient: GroupRef,
    /// Projection `G → G/K` on indices.
    pub proj: Vec<u32>,
    pub k_coords: AbelianSub,
    pub kt_coords: AbelianSub,
    pub alpha: CocycleTable,
    pub beta: CocycleTable,
    /// Symmetric cocycle over `(G/K)^{ab}` with values in `K`.
    pub gamma: CocycleTable,
    /// `f` with `α = inf(γ) + ε(β) + δf`.
    pub shift: Vec<Vec<u64>>,
    pub g_tilde: GroupRef,
    pub kt_in_gt: Subgroup,
    pub ins: FiberPair,
    /// Choices made, for reproducibility.
    pub log: Vec<String>,
}

impl Squeeze {
    pub fn del(&self) -> FiberPair {
        self.ins.opposite()
    }

    /// `κ|_{K̃}` transported to `K̃ ≤ G̃`.
    pub fn kappa_tilde(&self) -> AHom {
        let vals = self
            .kt_in_gt
            .iter()
            .map(|i| self.kappa.at(&self.k, self.kt_coords.elem(&self.g, &self.kt_coords.ab.element(i))))
            .collect();
        AHom { n: self.kappa.n, vals }
    }
}

pub fn squeeze(g: &GroupRef, k: &Subgroup, kappa: &AHom, n: u32) -> Result<Squeeze> {
    require_hypothesis(g.order(), n)?;
    if kappa.n != n || !kappa.is_hom(g, k) {
        return Err(pre!("κ is not a homomorphism K → Z/{n}"));
    }
    if !k.iter().all(|z| (0..g.order()).all(|x| g.mul(z, x) == g.mul(x, z))) {
        return Err(pre!("K is not central in G"));
    }
    if !kappa.is_faithful() {
        return Err(pre!("κ is not faithful"));
    }
    let k_tilde = g.intersect(k, &g.derived());
    let sc = section_with_cocycle(g, k)?;
    let qg: GroupRef = Arc::new(sc.quotient.group.clone());
    let ak = AbelianSub::new(g, k)?;
    let akt = AbelianSub::new(g, &k_tilde)?;
    let alpha = CocycleTable::from_fn(&qg, &ak.ab, |x, y| ak.coord(sc.alpha(x, y)));
    ensure_internal!(alpha.satisfies_identity(), "extension cocycle fails the cocycle identity");
    let hk = h2_group(&qg, &ak.ab)?;
    let hkt = h2_group(&qg, &akt.ab)?;
    let eps = |v: &[u64]| ak.coord(akt.elem(g, v));

    // Image of ε₂ with cocycle witnesses over K̃.
    let mut eps_gens = Vec::new();
    for j in 0..hkt.h2.rank() {
        let bj = hkt.representative(&hkt.h2.unit(j));
        eps_gens.push((hk.project(&bj.map_coeffs(&ak.ab, eps))?, bj));
    }
    let eps_span = span_with(&hk.h2, &eps_gens, CocycleTable::zero(&qg, &akt.ab), |a, b| a.add(b));

    // Image of ι₁ with symmetric witnesses over (G/K)^{ab}.
    let qab_q = qg.quotient(&qg.derived())?;
    let qab: GroupRef = Arc::new(qab_q.group.clone());
    let mut iota_gens = Vec::new();
    for gm in symmetric_generators(&qab, &ak.ab)? {
        iota_gens.push((hk.project(&gm.inflate(&qg, &qab_q.proj))?, gm));
    }
    let iota_span = span_with(&hk.h2, &iota_gens, CocycleTable::zero(&qab, &ak.ab), |a, b| a.add(b));

    let t = hk.project(&alpha)?;
    let (beta_nf, beta, gamma) = eps_span
        .iter()
        .find_map(|(bv, bw)| iota_span.get(&hk.h2.sub(&t, bv)).map(|gw| (bv.clone(), bw.normalized(), gw.normalized())))
        .ok_or_else(|| internal!("[α] is not in ι₁(Ext) + ε₂(H²(G/K, K̃))"))?;
    let combined = gamma.inflate(&qg, &qab_q.proj).add(&beta.map_coeffs(&ak.ab, eps));
    let shift = hk
        .coboundary_witness(&alpha.sub(&combined))?
        .ok_or_else(|| internal!("α − inf(γ) − ε(β) is not a coboundary"))?;

    // G̃ = K̃ ×_β G/K.
    let ktn = akt.ab.order() as usize;
    let qn = qg.order();
    let gtn = qn * ktn;
    let mut rows = vec![vec![0usize; gtn]; gtn];
    for (x, row) in rows.iter_mut().enumerate() {
        let (s1, v1) = (x / ktn, akt.ab.element(x % ktn));
        for (y, cell) in row.iter_mut().enumerate() {
            let (s2, v2) = (y / ktn, akt.ab.element(y % ktn));
            let v = akt.ab.add(&akt.ab.add(beta.at(s1, s2), &v1), &v2);
            *cell = qg.mul(s1, s2) * ktn + akt.ab.index_of(&v);
        }
    }
    let labels = (0..gtn).map(|x| format!("({},{})", x % ktn, qg.label(x / ktn))).collect();
    let gt: GroupRef = Arc::new(Group::from_table(&format!("{}~", g.name()), &rows, Some(labels))?);
    let kt_in_gt = Subgroup::from_mask(BitSet::from_iter(gtn, 0..ktn));
    ensure_internal!(
        kt_in_gt.iter().all(|z| (0..gtn).all(|x| gt.mul(z, x) == gt.mul(x, z))),
        "K̃ is not central in G̃"
    );
    ensure_internal!(kt_in_gt.is_subset(&gt.derived()), "K̃ is not contained in G̃′");

    let space = Space::new(g.clone(), gt.clone(), n);
    let m_elems: Vec<usize> = (0..g.order()).flat_map(|x| {
        let s = sc.quotient.proj[x] as usize;
        let sp = space.clone();
        (0..ktn).map(move |i| sp.enc(x, s * ktn + i))
    }).collect();
    let m = Subgroup::from_mask(BitSet::from_iter(space.gh.order(), m_elems));
    ensure_internal!(space.gh.closure(m.elems()).order() == m.order(), "M is not a subgroup");
    let cands = homs_to_cyclic(&space.gh, &m, n);
    let (mu_index, mu) = cands
        .iter()
        .enumerate()
        .find(|(_, mu)| k.iter().all(|x| mu.at(&m, space.enc(x, 0)) == kappa.at(k, x)))
        .map(|(i, mu)| (i, mu.clone()))
        .ok_or_else(|| internal!("κ×1 does not extend to M"))?;
    let ins = FiberPair { space: space.clone(), u: m, phi: mu };

    let sq = Squeeze {
        g: g.clone(),
        k: k.clone(),
        kappa: kappa.clone(),
        k_tilde,
        quotient: qg,
        proj: sc.quotient.proj.clone(),
        k_coords: ak,
        kt_coords: akt,
        alpha,
        beta,
        gamma,
        shift,
        g_tilde: gt.clone(),
        kt_in_gt,
        ins,
        log: vec![
            String::from("section: minimal coset representatives"),
            format!("[ε(β)] normal form {beta_nf:?}, least in the ε-image with [α] − [ε(β)] ∈ im ι"),
            format!("μ: candidate {mu_index} of {} extending κ×1", cands.len()),
        ],
    };
    let (l, r) = (sq.ins.left(), sq.ins.right());
    ensure_internal!(l.p.order() == g.order() && l.k == *k && l.kappa == *kappa, "left data of (M,μ) is not (G,K,κ)");
    ensure_internal!(r.p.order() == gtn && r.k == sq.kt_in_gt, "right data of (M,μ) is not (G̃,K̃)");
    ensure_internal!(r.kappa == sq.kappa_tilde(), "μ₂ differs from κ restricted to K̃");
    let diag_trivial = sq.kt_in_gt.iter().all(|i| {
        let x = sq.kt_coords.elem(g, &sq.kt_coords.ab.element(i));
        sq.ins.phi_at(space.enc(x, i)) == 0
    });
    ensure_internal!(diag_trivial, "μ is not trivial on Δ(K̃)");
    Ok(sq)
}

/// `Ins` over `(G, G̃)` and `Del = Ins^op` over `(G̃, G)`.
pub fn ins_del(g: &GroupRef, k: &Subgroup, kappa: &AHom, n: u32) -> Result<(Squeeze, FiberPair, FiberPair)> {
    let sq = squeeze(g, k, kappa, n)?;
    let (ins, del) = (sq.ins.clone(), sq.del());
    Ok((sq, ins, del))
}

/// `X ≅ Ins ⊗ Y ⊗ Del` for a covering pair with faithful characters.
#[derive(Clone, Debug)]
pub struct ReducedDecomposition {
    pub left: Squeeze,
    pub right: Squeeze,
    pub ins: FiberPair,
    pub y: FiberPair,
    pub del: FiberPair,
}

fn single_term(e: &FiberedElement, what: &str) -> Result<FiberPair> {
    let terms: Vec<_> = e.terms().collect();
    ensure_internal!(terms.len() == 1 && terms[0].1.is_one(), "{what} is not a single transitive biset");
    Ok(terms[0].0 .0.clone())
}

pub fn reduce_decomposition(p: &FiberPair) -> Result<ReducedDecomposition> {
    let s = &p.space;
    require_hypothesis(s.g.order(), s.n)?;
    require_hypothesis(s.h.order(), s.n)?;
    let (l, r) = (p.left(), p.right());
    if l.p.order() != s.g.order() || r.p.order() != s.h.order() {
        return Err(pre!("pair is not covering"));
    }
    if !l.kappa.is_faithful() || !r.kappa.is_faithful() {
        return Err(pre!("φ₁ and φ₂ must be faithful"));
    }
    let left = squeeze(&s.g, &l.k, &l.kappa, s.n)?;
    let right = squeeze(&s.h, &r.k, &r.kappa, s.n)?;
    let z = RingSpec::Z;
    let del_g = FiberedElement::from_pair(&left.del(), z);
    let ins_h = FiberedElement::from_pair(&right.ins, z);
    let y = single_term(&del_g.mul(&FiberedElement::from_pair(p, z))?.mul(&ins_h)?, "Y")?;
    let (yl, yr) = (y.left(), y.right());
    ensure_internal!(yl.p.order() == left.g_tilde.order() && yr.p.order() == right.g_tilde.order(), "Y is not covering");
    ensure_internal!(yl.k == left.kt_in_gt && yl.kappa == left.kappa_tilde(), "k₁(Ỹ) or φ̃₁ is wrong");
    ensure_internal!(yr.k == right.kt_in_gt && yr.kappa == right.kappa_tilde(), "k₂(Ỹ) or φ̃₂ is wrong");
    let ins = left.ins.clone();
    let del = right.del();
    let back = FiberedElement::from_pair(&ins, z).mul(&FiberedElement::from_pair(&y, z))?.mul(&FiberedElement::from_pair(&del, z))?;
    ensure_internal!(back.rehome(s)? == FiberedElement::from_pair(p, z), "Ins ⊗ Y ⊗ Del does not reproduce the pair");
    Ok(ReducedDecomposition { left, right, ins, y, del })
}

/// `Ind ∘ Inf ∘ Ins ∘ X ∘ Del ∘ Def ∘ Res`.
#[derive(Clone, Debug)]
pub struct FullDecomposition {
    pub ind: FiberPair,
    pub inf: FiberPair,
    pub ins: FiberPair,
    pub middle: FiberPair,
    pub del: FiberPair,
    pub def: FiberPair,
    pub res: FiberPair,
}

impl FullDecomposition {
    pub fn factors(&self) -> [&FiberPair; 7] {
        [&self.ind, &self.inf, &self.ins, &self.middle, &self.del, &self.def, &self.res]
    }
}

pub fn full_decomposition(p: &FiberPair) -> Result<FullDecomposition> {
    let s = &p.space;
    require_hypothesis(s.g.order(), s.n)?;
    require_hypothesis(s.h.order(), s.n)?;
    let d = decompose_standard(p)?;
    let r = reduce_decomposition(&d.middle)?;
    let full = FullDecomposition { ind: d.ind, inf: d.inf, ins: r.ins, middle: r.y, del: r.del, def: d.def, res: d.res };
    let prod = crate::fib::product_of(&full.factors(), RingSpec::Z)?;
    ensure_internal!(prod.rehome(s)? == FiberedElement::from_pair(p, RingSpec::Z), "seven factors do not reproduce the pair");
    Ok(full)
}

/// `K` cyclic, `K ≤ Z(G) ∩ G′` and `κ` faithful.
pub fn reduced_criterion_hypothesis(g: &Group, k: &Subgroup, kappa: &AHom, n: u32) -> Result<bool> {
    require_hypothesis(g.order(), n)?;
    check_central_pair(g, k, kappa)?;
    let cyclic = k.iter().any(|x| g.elem_order(x) == k.order());
    let zg = g.intersect(&g.center(), &g.derived());
    Ok(cyclic && k.is_subset(&zg) && kappa.is_faithful())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(name: &str) -> GroupRef {
        Arc::new(crate::grp::parse_group(name).unwrap())
    }

    #[test]
    fn h2_orders() {
        for (q, d, order) in [("C1", 5u64, 1u64), ("C2", 2, 2), ("C2xC2", 2, 8), ("C3", 2, 1), ("C4", 2, 2), ("S3", 2, 2), ("Q8", 2, 4), ("D8", 2, 8)] {
            let h = h2_group(&grp(q), &FinAb::cyclic(d)).unwrap();
            assert_eq!(h.h2.order(), order, "H²({q}, Z/{d})");
        }
    }

    #[test]
    fn representatives_project_back() {
        let h = h2_group(&grp("C2xC2"), &FinAb::new(&[2, 4])).unwrap();
        for v in h.h2.elements() {
            let r = h.representative(&v);
            assert!(r.satisfies_identity());
            assert_eq!(h.project(&r).unwrap(), v);
        }
    }

    #[test]
    fn alpha_n_symmetric_constant() {
        let q = grp("C2xC2");
        let b = FinAb::cyclic(4);
        let h = h2_group(&q, &b).unwrap();
        for g in symmetric_generators(&q, &b).unwrap() {
            let a = g.add(&CocycleTable::from_fn(&q, &b, |_, _| vec![3]));
            assert!(a.satisfies_identity());
            let _ = h.project(&a).unwrap();
            for s in [[1usize, 2, 3, 1], [2, 2, 3, 0]] {
                assert_eq!(alpha_n(&a, 2, &s).unwrap(), b.neg(a.at(0, 0)));
            }
        }
    }

    #[test]
    fn squeeze_c4() {
        let g = grp("C4");
        let k = g.subgroup(&[0, 2]).unwrap();
        let kappa = AHom { n: 4, vals: vec![0, 2] };
        let sq = squeeze(&g, &k, &kappa, 4).unwrap();
        assert!(sq.k_tilde.is_trivial());
        assert_eq!(sq.g_tilde.order(), 2);
        assert!(reduced_criterion_hypothesis(&g, &k, &kappa, 4).map(|r| !r).unwrap());
        assert!(squeeze(&g, &k, &kappa, 2).is_err());
    }
}
