//! Explicit fibered bisets: finite sets with permutation actions of `Z/N`,
//! `G` and `H`, realized from pairs, tensored literally and classified back
//! into canonical pairs. Independent of the product formulas in `fib`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{BitSet, UnionFind};
use crate::error::{internal, pre, Error, Result};
use crate::fib::{canonicalize, same_group, FiberPair, FiberedElement, Space, SpaceRef};
use crate::grp::{AHom, Subgroup};
use crate::ring::RingSpec;

/// Maximum number of points of an explicit biset.
pub const POINT_BOUND: usize = 200_000;
/// Maximum size of `X × Y` before the orbit quotient in a tensor product.
pub const PAIR_BOUND: usize = 40_000_000;

/// A left `A×G×H`-set, `A = Z/N`. `h_act` is the left action of the `H`
/// factor; the right action is `x·h = h⁻¹x`.
#[derive(Clone, Debug)]
pub struct ExplicitFiberedBiset {
    pub space: SpaceRef,
    pub points: usize,
    /// Action of `1 ∈ Z/N`.
    pub a_act: Vec<u32>,
    pub g_act: Vec<Vec<u32>>,
    pub h_act: Vec<Vec<u32>>,
}

impl ExplicitFiberedBiset {
    pub fn empty(space: &SpaceRef) -> Self {
        ExplicitFiberedBiset {
            space: space.clone(),
            points: 0,
            a_act: Vec::new(),
            g_act: vec![Vec::new(); space.g.order()],
            h_act: vec![Vec::new(); space.h.order()],
        }
    }

    /// Checks that the three actions are actions, commute pairwise, and that
    /// `A` acts freely.
    pub fn validate(&self) -> Result<()> {
        let s = &self.space;
        let n = self.points;
        let perm = |p: &Vec<u32>| p.len() == n && BitSet::from_iter(n.max(1), p.iter().map(|&x| x as usize)).len() == n;
        if !perm(&self.a_act) || !self.g_act.iter().all(perm) || !self.h_act.iter().all(perm) {
            return Err(internal!("actions are not permutations"));
        }
        for (grp, act) in [(&s.g, &self.g_act), (&s.h, &self.h_act)] {
            for a in 0..grp.order() {
                for b in 0..grp.order() {
                    let ab = grp.mul(a, b);
                    if (0..n).any(|x| act[ab][x] != act[a][act[b][x] as usize]) {
                        return Err(internal!("not a group action"));
                    }
                }
            }
            if (0..n).any(|x| act[0][x] as usize != x) {
                return Err(internal!("identity acts nontrivially"));
            }
        }
        for x in 0..n {
            let mut y = x;
            for k in 1..=s.n {
                y = self.a_act[y] as usize;
                if y == x && k < s.n {
                    return Err(internal!("A-action is not free"));
                }
            }
            if y != x {
                return Err(internal!("generator of A does not have order dividing N"));
            }
            let ax = self.a_act[x] as usize;
            for g in 0..s.g.order() {
                let gx = self.g_act[g][x] as usize;
                if self.a_act[gx] != self.g_act[g][ax] {
                    return Err(internal!("A and G actions do not commute"));
                }
                for h in 0..s.h.order() {
                    if self.h_act[h][gx] != self.g_act[g][self.h_act[h][x] as usize] {
                        return Err(internal!("G and H actions do not commute"));
                    }
                }
            }
            for h in 0..s.h.order() {
                if self.a_act[self.h_act[h][x] as usize] != self.h_act[h][ax] {
                    return Err(internal!("A and H actions do not commute"));
                }
            }
        }
        Ok(())
    }

    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        if !self.space.same(&other.space) {
            return Err(pre!("disjoint union of bisets over different groups"));
        }
        let off = self.points as u32;
        let cat = |a: &Vec<u32>, b: &Vec<u32>| a.iter().copied().chain(b.iter().map(|&x| x + off)).collect::<Vec<u32>>();
        Ok(ExplicitFiberedBiset {
            space: self.space.clone(),
            points: self.points + other.points,
            a_act: cat(&self.a_act, &other.a_act),
            g_act: self.g_act.iter().zip(&other.g_act).map(|(a, b)| cat(a, b)).collect(),
            h_act: self.h_act.iter().zip(&other.h_act).map(|(a, b)| cat(a, b)).collect(),
        })
    }
}

/// `(A×G×H)/U_φ` with `U_φ = {(φ(u)⁻¹, u)}`. Points are `(a, t)` for `t` in a
/// left transversal of `U`, indexed `a·|T| + index(t)`.
pub fn realize(p: &FiberPair) -> Result<ExplicitFiberedBiset> {
    let s = &p.space;
    let gh = &s.gh;
    let n = s.n as usize;
    let cosets = gh.order() / p.u.order();
    let points = n * cosets;
    if points > POINT_BOUND {
        return Err(Error::Resource(format!("realization has {points} points, bound {POINT_BOUND}")));
    }
    // coset[x] = transversal index of xU; rep_off[x] = u with x = t·u.
    let mut coset = vec![u32::MAX; gh.order()];
    let mut uval = vec![0u32; gh.order()];
    let mut reps = Vec::with_capacity(cosets);
    for x in 0..gh.order() {
        if coset[x] != u32::MAX {
            continue;
        }
        let ti = reps.len() as u32;
        reps.push(x);
        for (u, &v) in p.u.iter().zip(&p.phi.vals) {
            let y = gh.mul(x, u);
            coset[y] = ti;
            uval[y] = v;
        }
    }
    // (b, c)·(a, t) = (a + b + φ(u), t') where c·t = t'·u.
    let act = |c: usize| -> Vec<u32> {
        let mut out = vec![0u32; points];
        for (ti, &t) in reps.iter().enumerate() {
            let y = gh.mul(c, t);
            let (tj, v) = (coset[y] as usize, uval[y] as usize);
            for a in 0..n {
                out[a * cosets + ti] = (((a + v) % n) * cosets + tj) as u32;
            }
        }
        out
    };
    let a_act = (0..points).map(|x| ((x + cosets) % points) as u32).collect();
    let g_act = (0..s.g.order()).map(|g| act(s.enc(g, 0))).collect();
    let h_act = (0..s.h.order()).map(|h| act(s.enc(0, h))).collect();
    Ok(ExplicitFiberedBiset { space: s.clone(), points, a_act, g_act, h_act })
}

/// `X ⊗_{AH} Y`: the free `A`-orbits of `(X × Y)/(A×H)` where
/// `(a,h)·(x,y) = (a⁻¹·h·x, a·h·y)`.
pub fn tensor_explicit(x: &ExplicitFiberedBiset, y: &ExplicitFiberedBiset) -> Result<ExplicitFiberedBiset> {
    let (sx, sy) = (&x.space, &y.space);
    if !same_group(&sx.h, &sy.g) || sx.n != sy.n {
        return Err(pre!("tensor product needs a shared middle group and modulus"));
    }
    let out_space = Space::new(sx.g.clone(), sy.h.clone(), sx.n);
    let (nx, ny) = (x.points, y.points);
    if nx * ny > PAIR_BOUND {
        return Err(Error::Resource(format!("|X×Y| = {} exceeds bound {PAIR_BOUND}", nx * ny)));
    }
    if nx == 0 || ny == 0 {
        return Ok(ExplicitFiberedBiset::empty(&out_space));
    }
    let n = sx.n as usize;
    // a⁻¹ on X.
    let mut a_inv_x = vec![0u32; nx];
    for i in 0..nx {
        a_inv_x[x.a_act[i] as usize] = i as u32;
    }
    let hgens = sx.h.generators_of(&sx.h.whole());
    let mut uf = UnionFind::new(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let id = i * ny + j;
            let (ai, aj) = (a_inv_x[i] as usize, y.a_act[j] as usize);
            uf.union(id, ai * ny + aj);
            for &h in &hgens {
                let (hi, hj) = (x.h_act[h][i] as usize, y.g_act[h][j] as usize);
                uf.union(id, hi * ny + hj);
            }
        }
    }
    let (labels, classes) = uf.labels();
    let rep_of = {
        let mut r = vec![usize::MAX; classes];
        for (id, &l) in labels.iter().enumerate() {
            if r[l] == usize::MAX {
                r[l] = id;
            }
        }
        r
    };
    let cls = |i: usize, j: usize| labels[i * ny + j];
    // A acts on classes by [x,y] ↦ [a·x, y].
    let a_cls: Vec<usize> = (0..classes)
        .map(|c| {
            let id = rep_of[c];
            cls(x.a_act[id / ny] as usize, id % ny)
        })
        .collect();
    let mut keep = vec![false; classes];
    let mut seen = vec![false; classes];
    for c in 0..classes {
        if seen[c] {
            continue;
        }
        let mut orbit = vec![c];
        let mut d = a_cls[c];
        while d != c {
            orbit.push(d);
            d = a_cls[d];
        }
        let free = orbit.len() == n;
        for &d in &orbit {
            seen[d] = true;
            keep[d] = free;
        }
    }
    let mut new_id = vec![u32::MAX; classes];
    let mut kept = Vec::new();
    for c in 0..classes {
        if keep[c] {
            new_id[c] = kept.len() as u32;
            kept.push(c);
        }
    }
    let points = kept.len();
    if points > POINT_BOUND {
        return Err(Error::Resource(format!("tensor product has {points} points, bound {POINT_BOUND}")));
    }
    let map = |f: &dyn Fn(usize, usize) -> usize| -> Vec<u32> {
        kept.iter()
            .map(|&c| {
                let id = rep_of[c];
                new_id[f(id / ny, id % ny)]
            })
            .collect()
    };
    let a_act = map(&|i, j| cls(x.a_act[i] as usize, j));
    let g_act = (0..sx.g.order()).map(|g| map(&|i, j| cls(x.g_act[g][i] as usize, j))).collect();
    let h_act = (0..sy.h.order()).map(|k| map(&|i, j| cls(i, y.h_act[k][j] as usize))).collect();
    Ok(ExplicitFiberedBiset { space: out_space, points, a_act, g_act, h_act })
}

/// Stabilizing pair `(S_x, φ_x)` of a point.
pub fn stabilizing_pair(x: &ExplicitFiberedBiset, pt: usize) -> Result<FiberPair> {
    let s = &x.space;
    let n = s.n as usize;
    // Offsets of the A-orbit of pt.
    let mut offset = alloc::collections::BTreeMap::new();
    let mut y = pt;
    for k in 0..n {
        if offset.insert(y, k as u32).is_some() {
            return Err(internal!("A-action is not free at point {pt}"));
        }
        y = x.a_act[y] as usize;
    }
    if y != pt {
        return Err(internal!("A-orbit of point {pt} does not close after N steps"));
    }
    let mut mask = BitSet::new(s.gh.order());
    let mut vals = Vec::new();
    for g in 0..s.g.order() {
        let gx = x.g_act[g][pt] as usize;
        for h in 0..s.h.order() {
            let z = x.h_act[h][gx] as usize;
            if let Some(&k) = offset.get(&z) {
                mask.insert(s.enc(g, h));
                vals.push(k);
            }
        }
    }
    let u = Subgroup::from_mask(mask);
    let phi = AHom { n: s.n, vals };
    if !phi.is_hom(&s.gh, &u) {
        return Err(internal!("stabilizing character is not a homomorphism"));
    }
    Ok(FiberPair { space: s.clone(), u, phi })
}

/// Sum over `G×H`-orbits of `A`-orbits of the canonical stabilizing pairs.
pub fn classify_explicit(x: &ExplicitFiberedBiset) -> Result<FiberedElement> {
    let s = &x.space;
    let mut out = FiberedElement::zero(s, RingSpec::Z);
    let mut uf = UnionFind::new(x.points);
    let ggens = s.g.generators_of(&s.g.whole());
    let hgens = s.h.generators_of(&s.h.whole());
    for p in 0..x.points {
        uf.union(p, x.a_act[p] as usize);
        for &g in &ggens {
            uf.union(p, x.g_act[g][p] as usize);
        }
        for &h in &hgens {
            uf.union(p, x.h_act[h][p] as usize);
        }
    }
    let (labels, count) = uf.labels();
    let mut done = vec![false; count];
    let one = RingSpec::Z.one();
    for p in 0..x.points {
        if done[labels[p]] {
            continue;
        }
        done[labels[p]] = true;
        let pair = stabilizing_pair(x, p)?;
        out.add_canonical(&canonicalize(&pair), &one)?;
    }
    Ok(out)
}
