//! Finite groups as Cayley tables: constructors, subgroups, quotients,
//! homomorphisms into Z/N, automorphisms, isomorphism testing and a small
//! catalog.
//!
//! Every group has its identity at index 0. Coset representatives, section
//! values and Out transversals are always the minimal element index.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{BitSet, UnionFind};
use crate::error::{pre, Error, Result};

/// Default order bound for subgroup lattices and automorphism groups.
pub const DEFAULT_ORDER_BOUND: usize = 48;

#[derive(Clone, Debug)]
pub struct Group {
    name: String,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    labels: Vec<String>,
}

pub type GroupRef = Arc<Group>;

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul
    }
}
impl Eq for Group {}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Group {
    /// Builds a group from a trusted multiplication rule. Used by the named
    /// constructors; `validate` is run in debug builds.
    fn from_fn(name: &str, order: usize, labels: Vec<String>, f: impl Fn(usize, usize) -> usize) -> Group {
        let mut mul = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                mul[a * order + b] = f(a, b) as u32;
            }
        }
        let g = Group::assemble(name.to_string(), order, mul, labels);
        debug_assert!(g.validate().is_ok(), "constructor produced an invalid table for {name}");
        g
    }

    fn assemble(name: String, order: usize, mul: Vec<u32>, labels: Vec<String>) -> Group {
        let mut inv = vec![0u32; order];
        for a in 0..order {
            for b in 0..order {
                if mul[a * order + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
        }
        Group { name, order, mul, inv, labels }
    }

    /// Builds and fully validates a group from table rows.
    pub fn from_table(name: &str, rows: &[Vec<usize>], labels: Option<Vec<String>>) -> Result<Group> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Format("empty multiplication table".into()));
        }
        let mut mul = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Format(format!("row {i} has length {} instead of {n}", r.len())));
            }
            for &x in r {
                if x >= n {
                    return Err(Error::Format(format!("entry {x} out of range in row {i}")));
                }
                mul.push(x as u32);
            }
        }
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(l) => return Err(Error::Format(format!("{} labels for {n} elements", l.len()))),
            None => (0..n).map(|i| format!("g{i}")).collect(),
        };
        for i in 0..n {
            if mul[i] as usize != i || mul[i * n] as usize != i {
                return Err(Error::Format("index 0 is not the identity".into()));
            }
        }
        let g = Group::assemble(name.to_string(), n, mul, labels);
        g.validate()?;
        Ok(g)
    }

    /// Checks the Latin-square property, identity, inverses and associativity.
    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        for a in 0..n {
            let mut row = BitSet::new(n);
            let mut col = BitSet::new(n);
            for b in 0..n {
                row.insert(self.mul(a, b));
                col.insert(self.mul(b, a));
            }
            if row.len() != n || col.len() != n {
                return Err(Error::Format(format!("table is not a Latin square at {a}")));
            }
            if self.mul(a, 0) != a || self.mul(0, a) != a {
                return Err(Error::Format("index 0 is not a two-sided identity".into()));
            }
            let i = self.inv(a);
            if self.mul(a, i) != 0 || self.mul(i, a) != 0 {
                return Err(Error::Format(format!("element {a} has no two-sided inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::Format(format!("associativity fails on ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn with_name(mut self, name: &str) -> Group {
        self.name = name.to_string();
        self
    }
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }
    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }
    /// `g x g⁻¹`.
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }
    /// `[a,b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }
    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|a| (0..self.order).map(|b| self.mul(a, b)).collect()).collect()
    }
    pub fn pow(&self, x: usize, k: u64) -> usize {
        let mut r = 0;
        for _ in 0..k {
            r = self.mul(r, x);
        }
        r
    }
    pub fn elem_order(&self, x: usize) -> usize {
        let mut y = x;
        let mut k = 1;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }
    pub fn exponent(&self) -> u64 {
        (0..self.order).fold(1, |e, x| lcm(e, self.elem_order(x) as u64))
    }
    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    // ---- named constructors ----

    pub fn trivial() -> Group {
        Group::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Group {
        let labels = (0..n).map(|i| if i == 0 { "1".to_string() } else { format!("a^{i}") }).collect();
        Group::from_fn(&format!("C{n}"), n, labels, |a, b| (a + b) % n)
    }

    /// Dihedral group of the given order `2n`: elements `r^i s^j` at index `2i+j`.
    pub fn dihedral(order: usize) -> Result<Group> {
        if order < 2 || !order.is_multiple_of(2) {
            return Err(pre!("dihedral group needs an even order, got {order}"));
        }
        let n = order / 2;
        let labels = (0..order).map(|k| word_label(k / 2, k % 2, "r", "s")).collect();
        Ok(Group::from_fn(&format!("D{order}"), order, labels, |a, b| {
            let (i, j) = (a / 2, a % 2);
            let (k, l) = (b / 2, b % 2);
            let r = if j == 0 { (i + k) % n } else { (i + n - k) % n };
            2 * r + (j + l) % 2
        }))
    }

    /// Dicyclic group of order `4n`: `a^{2n} = 1`, `x² = a^n`, `x a x⁻¹ = a⁻¹`.
    /// Index of `a^i x^j` is `2i + j`.
    pub fn dicyclic(order: usize) -> Result<Group> {
        if order < 8 || !order.is_multiple_of(4) {
            return Err(pre!("dicyclic group needs order divisible by 4 and at least 8, got {order}"));
        }
        let n = order / 4;
        let m = 2 * n;
        let name = if n.is_power_of_two() { format!("Q{order}") } else { format!("Dic{order}") };
        let labels = (0..order).map(|k| word_label(k / 2, k % 2, "a", "x")).collect();
        Ok(Group::from_fn(&name, order, labels, |a, b| {
            let (i, j) = (a / 2, a % 2);
            let (k, l) = (b / 2, b % 2);
            match (j, l) {
                (0, _) => 2 * ((i + k) % m) + l,
                (1, 0) => 2 * ((i + m - k) % m) + 1,
                _ => 2 * ((i + m - k + n) % m),
            }
        }))
    }

    pub fn quaternion(order: usize) -> Result<Group> {
        if order != 8 && order != 16 {
            return Err(pre!("quaternion group of order {order} not supported (8 or 16)"));
        }
        Group::dicyclic(order)
    }

    /// Finite abelian group `C_{d1} × … × C_{dk}`.
    pub fn abelian(factors: &[usize]) -> Result<Group> {
        if factors.contains(&0) {
            return Err(pre!("invariant factors must be positive"));
        }
        let parts: Vec<Group> = factors.iter().map(|&d| Group::cyclic(d)).collect();
        let refs: Vec<&Group> = parts.iter().collect();
        Ok(Group::direct_product(&refs))
    }

    /// Symmetric group on `n ≤ 5` points; permutations in lexicographic order,
    /// product `(p q)(x) = p(q(x))`.
    pub fn symmetric(n: usize) -> Result<Group> {
        if n == 0 || n > 5 {
            return Err(pre!("symmetric group S{n} not supported (1 ≤ n ≤ 5)"));
        }
        let perms = permutations(n);
        Ok(Group::perm_group(&format!("S{n}"), perms))
    }

    pub fn alternating(n: usize) -> Result<Group> {
        if n == 0 || n > 5 {
            return Err(pre!("alternating group A{n} not supported (1 ≤ n ≤ 5)"));
        }
        let perms = permutations(n).into_iter().filter(|p| perm_sign(p) == 1).collect();
        Ok(Group::perm_group(&format!("A{n}"), perms))
    }

    fn perm_group(name: &str, perms: Vec<Vec<usize>>) -> Group {
        let index: BTreeMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let labels = perms.iter().map(|p| cycle_label(p)).collect();
        Group::from_fn(name, perms.len(), labels, |a, b| {
            let (p, q) = (&perms[a], &perms[b]);
            let c: Vec<usize> = (0..p.len()).map(|x| p[q[x]]).collect();
            index[&c]
        })
    }

    /// Direct product with mixed-radix indexing (first factor most significant),
    /// so `G×H` has element `(i,j)` at `i·|H| + j`.
    pub fn direct_product(factors: &[&Group]) -> Group {
        if factors.is_empty() {
            return Group::trivial();
        }
        let mut acc = factors[0].clone();
        for h in &factors[1..] {
            acc = Group::product2(&acc, h);
        }
        acc
    }

    fn product2(g: &Group, h: &Group) -> Group {
        let (m, n) = (g.order, h.order);
        let name = format!("{}x{}", g.name, h.name);
        let labels = (0..m * n).map(|k| format!("({},{})", g.labels[k / n], h.labels[k % n])).collect();
        Group::from_fn(&name, m * n, labels, |a, b| g.mul(a / n, b / n) * n + h.mul(a % n, b % n))
    }

    // ---- subgroups ----

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Subgroup {
        let mut mask = BitSet::new(self.order);
        mask.insert(0);
        let mut elems = vec![0usize];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &s in gens {
                let y = self.mul(x, s);
                if mask.insert(y) {
                    elems.push(y);
                }
            }
            i += 1;
        }
        Subgroup::from_mask(mask)
    }

    pub fn join(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let gens: Vec<usize> = self.generators_of(a).into_iter().chain(self.generators_of(b)).collect();
        self.closure(&gens)
    }

    /// A small generating set of a subgroup (greedy, deterministic).
    pub fn generators_of(&self, s: &Subgroup) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut cur = self.closure(&[]);
        while cur.order() < s.order() {
            let mut best: Option<(usize, Subgroup)> = None;
            for x in s.iter() {
                if cur.contains(x) {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(x);
                let c = self.closure(&g2);
                if best.as_ref().is_none_or(|(_, b)| c.order() > b.order()) {
                    best = Some((x, c));
                }
            }
            let (x, c) = best.expect("subgroup strictly larger than current closure");
            gens.push(x);
            cur = c;
        }
        gens
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_mask(BitSet::from_iter(self.order, 0..self.order))
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_mask(BitSet::from_iter(self.order, [0]))
    }

    /// Validates an element list as a subgroup.
    pub fn subgroup(&self, elems: &[usize]) -> Result<Subgroup> {
        if elems.iter().any(|&x| x >= self.order) {
            return Err(pre!("subgroup element out of range"));
        }
        let s = Subgroup::from_mask(BitSet::from_iter(self.order, elems.iter().copied()));
        if s.order() != elems.len() {
            return Err(pre!("subgroup element list has duplicates"));
        }
        if !s.contains(0) {
            return Err(pre!("subgroup does not contain the identity"));
        }
        for a in s.iter() {
            for b in s.iter() {
                if !s.contains(self.mul(a, b)) {
                    return Err(pre!("element set is not closed under multiplication"));
                }
            }
        }
        Ok(s)
    }

    pub fn conjugate_subgroup(&self, g: usize, s: &Subgroup) -> Subgroup {
        Subgroup::from_mask(BitSet::from_iter(self.order, s.iter().map(|x| self.conj(g, x))))
    }

    pub fn is_normal(&self, s: &Subgroup) -> bool {
        (0..self.order).all(|g| s.iter().all(|x| s.contains(self.conj(g, x))))
    }

    pub fn normalizer(&self, s: &Subgroup) -> Subgroup {
        let elems: Vec<usize> = (0..self.order).filter(|&g| s.iter().all(|x| s.contains(self.conj(g, x)))).collect();
        Subgroup::from_mask(BitSet::from_iter(self.order, elems))
    }

    pub fn intersect(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        Subgroup::from_mask(a.mask.intersection(&b.mask))
    }

    /// All subgroups by cyclic extension, sorted by (order, elements).
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let mut cyclic_gens: Vec<usize> = Vec::new();
        let mut seen_cyclic = BTreeSet::new();
        for x in 0..self.order {
            let c = self.closure(&[x]);
            if seen_cyclic.insert(c.mask.clone()) {
                cyclic_gens.push(x);
            }
        }
        let mut found: BTreeMap<BitSet, Vec<usize>> = BTreeMap::new();
        let triv = self.trivial_subgroup();
        found.insert(triv.mask.clone(), Vec::new());
        let mut queue = vec![(triv, Vec::<usize>::new())];
        while let Some((s, gens)) = queue.pop() {
            for &c in &cyclic_gens {
                if s.contains(c) {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(c);
                let t = self.closure(&g2);
                if !found.contains_key(&t.mask) {
                    found.insert(t.mask.clone(), g2.clone());
                    queue.push((t, g2));
                }
            }
        }
        let mut out: Vec<Subgroup> = found.into_keys().map(Subgroup::from_mask).collect();
        out.sort_by(|a, b| (a.order(), &a.elems).cmp(&(b.order(), &b.elems)));
        out
    }

    pub fn subgroup_lattice(&self, bound: usize) -> Result<SubgroupLattice> {
        if self.order > bound {
            return Err(Error::Resource(format!("subgroup lattice of order {} exceeds bound {bound}", self.order)));
        }
        let subgroups = self.subgroups();
        let index: BTreeMap<BitSet, usize> = subgroups.iter().enumerate().map(|(i, s)| (s.mask.clone(), i)).collect();
        let mut uf = UnionFind::new(subgroups.len());
        let mut normal = vec![true; subgroups.len()];
        for (i, s) in subgroups.iter().enumerate() {
            for g in 0..self.order {
                let c = self.conjugate_subgroup(g, s);
                let j = index[&c.mask];
                if j != i {
                    normal[i] = false;
                    uf.union(i, j);
                }
            }
        }
        let (class_of, nclasses) = uf.labels();
        let mut classes = vec![Vec::new(); nclasses];
        for (i, &c) in class_of.iter().enumerate() {
            classes[c].push(i);
        }
        Ok(SubgroupLattice { subgroups, normal, class_of, classes })
    }

    pub fn normal_subgroups(&self) -> Vec<Subgroup> {
        self.subgroups().into_iter().filter(|s| self.is_normal(s)).collect()
    }

    pub fn center(&self) -> Subgroup {
        let elems: Vec<usize> = (0..self.order).filter(|&z| (0..self.order).all(|g| self.mul(z, g) == self.mul(g, z))).collect();
        Subgroup::from_mask(BitSet::from_iter(self.order, elems))
    }

    /// Derived subgroup of a subgroup `s`.
    pub fn derived_of(&self, s: &Subgroup) -> Subgroup {
        let mut comms = BTreeSet::new();
        for a in s.iter() {
            for b in s.iter() {
                comms.insert(self.commutator(a, b));
            }
        }
        let gens: Vec<usize> = comms.into_iter().collect();
        self.closure(&gens)
    }

    pub fn derived(&self) -> Subgroup {
        self.derived_of(&self.whole())
    }

    /// Conjugacy classes of elements ordered by their minimal element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = BitSet::new(self.order);
        let mut out = Vec::new();
        for x in 0..self.order {
            if seen.contains(x) {
                continue;
            }
            let cls = BitSet::from_iter(self.order, (0..self.order).map(|g| self.conj(g, x)));
            for y in cls.iter() {
                seen.insert(y);
            }
            out.push(cls.iter().collect());
        }
        out
    }

    /// The subgroup `s` as a group in its own right; element `k` of the
    /// result is `s.elems()[k]`.
    pub fn subgroup_table(&self, s: &Subgroup) -> Group {
        let labels = s.iter().map(|x| self.labels[x].clone()).collect();
        let elems = s.elems().to_vec();
        Group::from_fn(&format!("sub({})", self.name), s.order(), labels, |a, b| {
            s.position(self.mul(elems[a], elems[b])).expect("closed")
        })
    }

    pub fn quotient(&self, n: &Subgroup) -> Result<Quotient> {
        if !self.is_normal(n) {
            return Err(pre!("subgroup is not normal in {}", self.name));
        }
        let mut proj = vec![u32::MAX; self.order];
        let mut reps = Vec::new();
        for x in 0..self.order {
            if proj[x] != u32::MAX {
                continue;
            }
            let idx = reps.len() as u32;
            reps.push(x as u32);
            for k in n.iter() {
                proj[self.mul(x, k)] = idx;
            }
        }
        let q = reps.len();
        let labels = reps.iter().map(|&r| format!("{}N", self.labels[r as usize])).collect();
        let group = Group::from_fn(&format!("{}/{}", self.name, n.order()), q, labels, |a, b| {
            proj[self.mul(reps[a] as usize, reps[b] as usize)] as usize
        });
        Ok(Quotient { group, proj, reps })
    }

    pub fn characteristic_data(&self) -> Result<CharacteristicData> {
        let center = self.center();
        let derived = self.derived();
        let abelianization = self.quotient(&derived)?;
        Ok(CharacteristicData { center, derived, abelianization })
    }

    /// Elements that commute with all of `s`.
    pub fn centralizer(&self, s: &Subgroup) -> Subgroup {
        let elems: Vec<usize> = (0..self.order).filter(|&g| s.iter().all(|x| self.mul(g, x) == self.mul(x, g))).collect();
        Subgroup::from_mask(BitSet::from_iter(self.order, elems))
    }
}

fn word_label(i: usize, j: usize, a: &str, b: &str) -> String {
    match (i, j) {
        (0, 0) => "1".into(),
        (0, _) => b.into(),
        (1, 0) => a.into(),
        (1, _) => format!("{a}{b}"),
        (_, 0) => format!("{a}^{i}"),
        _ => format!("{a}^{i}{b}"),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn perm_sign(p: &[usize]) -> i32 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

fn cycle_label(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for s in 0..p.len() {
        if seen[s] || p[s] == s {
            continue;
        }
        out.push('(');
        let mut x = s;
        let mut first = true;
        while !seen[x] {
            seen[x] = true;
            if !first {
                out.push(' ');
            }
            out.push_str(&(x + 1).to_string());
            first = false;
            x = p[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

/// A subgroup stored as its sorted element list plus a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgroup {
    elems: Vec<usize>,
    mask: BitSet,
}

impl Subgroup {
    pub fn from_mask(mask: BitSet) -> Subgroup {
        Subgroup { elems: mask.iter().collect(), mask }
    }
    pub fn order(&self) -> usize {
        self.elems.len()
    }
    pub fn elems(&self) -> &[usize] {
        &self.elems
    }
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.elems.iter().copied()
    }
    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.mask.contains(x)
    }
    pub fn position(&self, x: usize) -> Option<usize> {
        self.elems.binary_search(&x).ok()
    }
    pub fn is_subset(&self, other: &Subgroup) -> bool {
        self.mask.is_subset(&other.mask)
    }
    pub fn mask(&self) -> &BitSet {
        &self.mask
    }
    pub fn is_trivial(&self) -> bool {
        self.elems.len() == 1
    }
}

#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    pub subgroups: Vec<Subgroup>,
    pub normal: Vec<bool>,
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: Group,
    /// Coset index of each element of the parent.
    pub proj: Vec<u32>,
    /// Minimal representative of each coset.
    pub reps: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct CharacteristicData {
    pub center: Subgroup,
    pub derived: Subgroup,
    pub abelianization: Quotient,
}

/// Homomorphism `dom → cod` as an image table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupHom {
    pub img: Vec<usize>,
}

impl GroupHom {
    pub fn identity(n: usize) -> GroupHom {
        GroupHom { img: (0..n).collect() }
    }
    pub fn is_hom(&self, dom: &Group, cod: &Group) -> bool {
        self.img.len() == dom.order()
            && (0..dom.order()).all(|a| (0..dom.order()).all(|b| self.img[dom.mul(a, b)] == cod.mul(self.img[a], self.img[b])))
    }
    pub fn is_bijective(&self, cod_order: usize) -> bool {
        self.img.len() == cod_order && BitSet::from_iter(cod_order, self.img.iter().copied()).len() == cod_order
    }
    pub fn inverse(&self) -> GroupHom {
        let mut inv = vec![0; self.img.len()];
        for (a, &b) in self.img.iter().enumerate() {
            inv[b] = a;
        }
        GroupHom { img: inv }
    }
    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupHom) -> GroupHom {
        GroupHom { img: other.img.iter().map(|&x| self.img[x]).collect() }
    }
}

/// A homomorphism from a subgroup into Z/N, stored as residues parallel to
/// the subgroup's sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AHom {
    pub n: u32,
    pub vals: Vec<u32>,
}

impl AHom {
    pub fn trivial(dom: &Subgroup, n: u32) -> AHom {
        AHom { n, vals: vec![0; dom.order()] }
    }
    pub fn at(&self, dom: &Subgroup, x: usize) -> u32 {
        self.vals[dom.position(x).expect("element in domain")]
    }
    pub fn is_hom(&self, g: &Group, dom: &Subgroup) -> bool {
        self.vals.len() == dom.order()
            && self.vals.iter().all(|&v| v < self.n)
            && dom.iter().all(|a| {
                dom.iter().all(|b| self.at(dom, g.mul(a, b)) == (self.at(dom, a) + self.at(dom, b)) % self.n)
            })
    }
    pub fn is_faithful(&self) -> bool {
        self.vals.iter().skip(1).all(|&v| v != 0)
    }
    pub fn restrict(&self, dom: &Subgroup, sub: &Subgroup) -> AHom {
        AHom { n: self.n, vals: sub.iter().map(|x| self.at(dom, x)).collect() }
    }
    /// Kernel as a subgroup of the ambient group.
    pub fn kernel(&self, dom: &Subgroup, ambient_order: usize) -> Subgroup {
        Subgroup::from_mask(BitSet::from_iter(ambient_order, dom.iter().zip(&self.vals).filter(|(_, &v)| v == 0).map(|(x, _)| x)))
    }
}

/// Basis of a finite abelian group by cyclic factors of prime-power order.
#[derive(Clone, Debug)]
pub struct AbelianBasis {
    pub gens: Vec<usize>,
    pub orders: Vec<u64>,
    /// Coordinates of every element with respect to `gens`.
    pub coords: Vec<Vec<u64>>,
}

impl AbelianBasis {
    /// Invariant factors `d1 | d2 | …` (trivial factors omitted).
    pub fn invariant_factors(&self) -> Vec<u64> {
        invariant_factors_from_primary(&self.orders)
    }
}

pub fn invariant_factors_from_primary(orders: &[u64]) -> Vec<u64> {
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &o in orders {
        if o > 1 {
            by_prime.entry(prime_factors(o)[0]).or_default().push(o);
        }
    }
    let len = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for v in by_prime.values_mut() {
        v.sort_unstable_by(|a, b| b.cmp(a));
        for (i, &o) in v.iter().enumerate() {
            out[len - 1 - i] *= o;
        }
    }
    out
}

pub fn abelian_basis(g: &Group) -> Result<AbelianBasis> {
    if !g.is_abelian() {
        return Err(pre!("abelian basis requested for non-abelian group {}", g.name()));
    }
    let n = g.order();
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    for p in prime_factors(n as u64) {
        let part: Vec<usize> = (0..n).filter(|&x| is_power_of(g.elem_order(x) as u64, p)).collect();
        let mut span = g.closure(&[]);
        let mut pgens: Vec<usize> = Vec::new();
        while span.order() < part.len() {
            // Element of maximal order modulo the current span.
            let mut best = (0usize, 0u64);
            for &x in &part {
                let mut y = x;
                let mut k = 1u64;
                while !span.contains(y) {
                    y = g.mul(y, x);
                    k += 1;
                }
                if k > best.1 {
                    best = (x, k);
                }
            }
            let (x, m) = best;
            let lifted = span
                .iter()
                .map(|s| g.mul(x, s))
                .find(|&y| g.elem_order(y) as u64 == m)
                .ok_or_else(|| Error::Internal("abelian basis lift failed".into()))?;
            pgens.push(lifted);
            gens.push(lifted);
            orders.push(m);
            span = g.closure(&pgens);
        }
    }
    let mut coords = vec![Vec::new(); n];
    let total: u64 = orders.iter().product();
    if total as usize != n {
        return Err(Error::Internal("abelian basis does not span".into()));
    }
    let mut c = vec![0u64; gens.len()];
    loop {
        let mut x = 0;
        for (i, &ci) in c.iter().enumerate() {
            x = g.mul(x, g.pow(gens[i], ci));
        }
        coords[x] = c.clone();
        let mut i = 0;
        loop {
            if i == c.len() {
                return Ok(AbelianBasis { gens, orders, coords });
            }
            c[i] += 1;
            if c[i] < orders[i] {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

fn is_power_of(mut x: u64, p: u64) -> bool {
    while x.is_multiple_of(p) {
        x /= p;
    }
    x == 1
}

/// All homomorphisms from the subgroup `s` of `g` into Z/N, sorted by values.
pub fn homs_to_cyclic(g: &Group, s: &Subgroup, n: u32) -> Vec<AHom> {
    assert!(n >= 1);
    let t = g.subgroup_table(s);
    let d = t.derived();
    let q = t.quotient(&d).expect("derived subgroup is normal");
    let basis = abelian_basis(&q.group).expect("abelianization is abelian");
    let n64 = n as u64;
    let choices: Vec<(u64, u64)> = basis.orders.iter().map(|&o| {
        let c = gcd(o, n64);
        (c, n64 / c)
    }).collect();
    let mut out = Vec::new();
    let mut pick = vec![0u64; choices.len()];
    loop {
        let imgs: Vec<u64> = pick.iter().zip(&choices).map(|(&j, &(_, step))| j * step).collect();
        let vals = (0..t.order())
            .map(|u| {
                let co = &basis.coords[q.proj[u] as usize];
                (co.iter().zip(&imgs).map(|(a, b)| a * b).sum::<u64>() % n64) as u32
            })
            .collect();
        out.push(AHom { n, vals });
        let mut i = 0;
        loop {
            if i == pick.len() {
                out.sort();
                return out;
            }
            pick[i] += 1;
            if pick[i] < choices[i].0 {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Expected count `∏ gcd(d_i, N)` over the invariant factors of `s/s'`.
pub fn hom_count_formula(g: &Group, s: &Subgroup, n: u32) -> u64 {
    let t = g.subgroup_table(s);
    let q = t.quotient(&t.derived()).expect("normal");
    let basis = abelian_basis(&q.group).expect("abelian");
    basis.invariant_factors().iter().map(|&d| gcd(d, n as u64)).product()
}

/// Every homomorphism `g → h` that is bijective, via images of a fixed
/// generating set of `g`. Sorted by image table.
pub fn isomorphisms(g: &Group, h: &Group) -> Vec<GroupHom> {
    if g.order() != h.order() || order_profile(g) != order_profile(h) {
        return Vec::new();
    }
    let gens = g.generators_of(&g.whole());
    let cands: Vec<Vec<usize>> = gens.iter().map(|&s| (0..h.order()).filter(|&t| h.elem_order(t) == g.elem_order(s)).collect()).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; gens.len()];
    if cands.iter().any(|c| c.is_empty()) {
        return out;
    }
    loop {
        let imgs: Vec<usize> = pick.iter().zip(&cands).map(|(&i, c)| c[i]).collect();
        if let Some(img) = extend_on_generators(g, h, &gens, &imgs) {
            let hom = GroupHom { img };
            if hom.is_bijective(h.order()) {
                out.push(hom);
            }
        }
        let mut i = 0;
        loop {
            if i == pick.len() {
                out.sort();
                return out;
            }
            pick[i] += 1;
            if pick[i] < cands[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Extends generator images to a homomorphism if one exists.
pub fn extend_on_generators(g: &Group, h: &Group, gens: &[usize], imgs: &[usize]) -> Option<Vec<usize>> {
    let mut img = vec![usize::MAX; g.order()];
    img[0] = 0;
    let mut queue = vec![0usize];
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        for (k, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            let v = h.mul(img[x], imgs[k]);
            if img[y] == usize::MAX {
                img[y] = v;
                queue.push(y);
            } else if img[y] != v {
                return None;
            }
        }
        i += 1;
    }
    if img.contains(&usize::MAX) {
        return None;
    }
    Some(img)
}

fn order_profile(g: &Group) -> Vec<usize> {
    let mut v: Vec<usize> = (0..g.order()).map(|x| g.elem_order(x)).collect();
    v.sort_unstable();
    v
}

/// Returns an explicit isomorphism or `None` when the groups are not
/// isomorphic.
pub fn isomorphic(g: &Group, h: &Group) -> Option<GroupHom> {
    if g.order() != h.order()
        || order_profile(g) != order_profile(h)
        || g.center().order() != h.center().order()
        || g.derived().order() != h.derived().order()
    {
        return None;
    }
    let gens = g.generators_of(&g.whole());
    let cands: Vec<Vec<usize>> = gens.iter().map(|&s| (0..h.order()).filter(|&t| h.elem_order(t) == g.elem_order(s)).collect()).collect();
    fn rec(g: &Group, h: &Group, gens: &[usize], cands: &[Vec<usize>], chosen: &mut Vec<usize>) -> Option<Vec<usize>> {
        if chosen.len() == gens.len() {
            let img = extend_on_generators(g, h, gens, chosen)?;
            return if BitSet::from_iter(h.order(), img.iter().copied()).len() == h.order() { Some(img) } else { None };
        }
        for &c in &cands[chosen.len()] {
            chosen.push(c);
            if let Some(r) = rec(g, h, gens, cands, chosen) {
                return Some(r);
            }
            chosen.pop();
        }
        None
    }
    rec(g, h, &gens, &cands, &mut Vec::new()).map(|img| GroupHom { img })
}

/// The automorphism group with its inner subgroup and an Out transversal.
#[derive(Clone, Debug)]
pub struct AutomorphismGroup {
    /// Automorphisms sorted by image table; index 0 is the identity.
    pub auts: Vec<GroupHom>,
    pub table: Group,
    pub inn: Subgroup,
    pub out: Quotient,
}

impl AutomorphismGroup {
    pub fn index_of(&self, a: &GroupHom) -> Option<usize> {
        self.auts.binary_search(a).ok()
    }
    /// Class of an automorphism in Out, as an index into `out.reps`.
    pub fn out_class(&self, a: &GroupHom) -> Option<usize> {
        self.index_of(a).map(|i| self.out.proj[i] as usize)
    }
}

pub fn automorphism_group(g: &Group, bound: usize) -> Result<AutomorphismGroup> {
    if g.order() > bound {
        return Err(Error::Resource(format!("automorphism group of order-{} group exceeds bound {bound}", g.order())));
    }
    let auts = isomorphisms(g, g);
    let idx: BTreeMap<&GroupHom, usize> = auts.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let m = auts.len();
    let mut mul = vec![vec![0usize; m]; m];
    for a in 0..m {
        for b in 0..m {
            mul[a][b] = idx[&auts[a].compose(&auts[b])];
        }
    }
    let labels = (0..m).map(|i| format!("aut{i}")).collect();
    let table = Group::from_table(&format!("Aut({})", g.name()), &mul, Some(labels))?;
    let inn_elems: BTreeSet<usize> = (0..g.order())
        .map(|x| idx[&GroupHom { img: (0..g.order()).map(|y| g.conj(x, y)).collect() }])
        .collect();
    let inn = Subgroup::from_mask(BitSet::from_iter(m, inn_elems));
    let out = table.quotient(&inn)?;
    Ok(AutomorphismGroup { auts, table, inn, out })
}

/// Hand-encoded list of groups, one per isomorphism class.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub groups: Vec<GroupRef>,
    /// True when every isomorphism class up to the requested order is present.
    pub complete: bool,
}

/// All groups of order ≤ `max_order`; complete for `max_order ≤ 15`.
/// Order 16 adds only C16, Q16, D16, C4×C4, C8×C2, C4×C2×C2, C2^4 and
/// D8×C2 and is flagged incomplete, as is anything larger.
pub fn small_catalog(max_order: usize) -> Catalog {
    let mut out: Vec<Group> = Vec::new();
    let ab = |f: &[usize]| Group::abelian(f).expect("valid");
    let named = |g: Group, n: &str| g.with_name(n);
    for n in 1..=max_order.min(16) {
        match n {
            1 => out.push(Group::trivial()),
            4 => {
                out.push(Group::cyclic(4));
                out.push(named(ab(&[2, 2]), "C2xC2"));
            }
            6 => {
                out.push(Group::cyclic(6));
                out.push(Group::symmetric(3).expect("S3"));
            }
            8 => {
                out.push(Group::cyclic(8));
                out.push(named(ab(&[4, 2]), "C4xC2"));
                out.push(named(ab(&[2, 2, 2]), "C2xC2xC2"));
                out.push(Group::dihedral(8).expect("D8"));
                out.push(Group::quaternion(8).expect("Q8"));
            }
            9 => {
                out.push(Group::cyclic(9));
                out.push(named(ab(&[3, 3]), "C3xC3"));
            }
            10 | 14 => {
                out.push(Group::cyclic(n));
                out.push(Group::dihedral(n).expect("dihedral"));
            }
            12 => {
                out.push(Group::cyclic(12));
                out.push(named(ab(&[6, 2]), "C6xC2"));
                out.push(Group::dihedral(12).expect("D12"));
                out.push(Group::alternating(4).expect("A4"));
                out.push(Group::dicyclic(12).expect("Dic12"));
            }
            16 => {
                out.push(Group::cyclic(16));
                out.push(named(ab(&[4, 4]), "C4xC4"));
                out.push(named(ab(&[8, 2]), "C8xC2"));
                out.push(named(ab(&[4, 2, 2]), "C4xC2xC2"));
                out.push(named(ab(&[2, 2, 2, 2]), "C2xC2xC2xC2"));
                out.push(Group::dihedral(16).expect("D16"));
                out.push(Group::quaternion(16).expect("Q16"));
                let d8 = Group::dihedral(8).expect("D8");
                out.push(Group::direct_product(&[&d8, &Group::cyclic(2)]));
            }
            _ => out.push(Group::cyclic(n)),
        }
    }
    Catalog { groups: out.into_iter().map(Arc::new).collect(), complete: max_order <= 15 }
}

/// Parses names such as `C4`, `C2xC2`, `S3`, `D8`, `Q8`, `A4`, `Dic12`, or
/// constructor terms such as `direct_product(cyclic(2),dihedral(8))`.
pub fn parse_group(name: &str) -> Result<Group> {
    if name.contains('(') {
        let (g, rest) = parse_term(name.trim())?;
        if !rest.trim().is_empty() {
            return Err(pre!("trailing input '{rest}' in group term"));
        }
        return Ok(g);
    }
    let parts: Vec<&str> = name.split(['x', '*']).map(|s| s.trim()).collect();
    let mut groups = Vec::new();
    for p in &parts {
        let num = |prefix: &str| -> Result<usize> {
            p[prefix.len()..].parse::<usize>().map_err(|_| pre!("cannot parse group factor '{p}'"))
        };
        let g = if let Some(_rest) = p.strip_prefix("Dic") {
            Group::dicyclic(num("Dic")?)?
        } else if p.starts_with('C') {
            Group::cyclic(num("C")?)
        } else if p.starts_with('D') {
            Group::dihedral(num("D")?)?
        } else if p.starts_with('Q') {
            Group::quaternion(num("Q")?)?
        } else if p.starts_with('S') {
            Group::symmetric(num("S")?)?
        } else if p.starts_with('A') {
            Group::alternating(num("A")?)?
        } else {
            return Err(pre!("unknown group factor '{p}'"));
        };
        if g.order() == 0 {
            return Err(pre!("empty group '{p}'"));
        }
        groups.push(g);
    }
    let refs: Vec<&Group> = groups.iter().collect();
    let g = Group::direct_product(&refs);
    Ok(g.with_name(name))
}

/// Parses one constructor term and returns the unparsed remainder.
fn parse_term(s: &str) -> Result<(Group, &str)> {
    let open = s.find('(').ok_or_else(|| pre!("expected '(' in group term '{s}'"))?;
    let head = s[..open].trim();
    let mut rest = &s[open + 1..];
    let mut nums = Vec::new();
    let mut groups = Vec::new();
    loop {
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix(')') {
            rest = r;
            break;
        }
        if rest.starts_with(|c: char| c.is_ascii_digit()) {
            let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            nums.push(rest[..end].parse::<usize>().map_err(|_| pre!("bad number in group term"))?);
            rest = &rest[end..];
        } else if !rest.is_empty() {
            let (g, r) = parse_term(rest)?;
            groups.push(g);
            rest = r;
        } else {
            return Err(pre!("unbalanced parentheses in group term"));
        }
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r;
        } else if !rest.starts_with(')') {
            return Err(pre!("expected ',' or ')' in group term"));
        }
    }
    let one = |kind: &str| -> Result<usize> {
        match (nums.as_slice(), groups.is_empty()) {
            ([n], true) => Ok(*n),
            _ => Err(pre!("{kind} takes one integer argument")),
        }
    };
    let g = match head {
        "cyclic" => {
            let n = one(head)?;
            if n == 0 {
                return Err(pre!("cyclic(0) is not a group"));
            }
            Group::cyclic(n).with_name(&format!("C{n}"))
        }
        "dihedral" => {
            let n = one(head)?;
            Group::dihedral(n)?.with_name(&format!("D{n}"))
        }
        "quaternion" => {
            let n = one(head)?;
            Group::quaternion(n)?.with_name(&format!("Q{n}"))
        }
        "symmetric" => {
            let n = one(head)?;
            Group::symmetric(n)?.with_name(&format!("S{n}"))
        }
        "alternating" => {
            let n = one(head)?;
            Group::alternating(n)?.with_name(&format!("A{n}"))
        }
        "abelian" if groups.is_empty() && !nums.is_empty() => {
            let name = nums.iter().map(|n| format!("C{n}")).collect::<Vec<_>>().join("x");
            Group::abelian(&nums)?.with_name(&name)
        }
        "direct_product" if nums.is_empty() && !groups.is_empty() => {
            let name = groups.iter().map(|g| g.name()).collect::<Vec<_>>().join("x");
            let refs: Vec<&Group> = groups.iter().collect();
            Group::direct_product(&refs).with_name(&name)
        }
        _ => return Err(pre!("unknown group constructor '{head}'")),
    };
    Ok((g, rest))
}

/// A central extension `1 → K → G → Q → 1` read off a group: section by
/// minimal coset representatives and the factor set `α(x,y) ∈ K`.
#[derive(Clone, Debug)]
pub struct SectionCocycle {
    pub quotient: Quotient,
    pub section: Vec<usize>,
    /// `α(x,y) = σ(x)σ(y)σ(xy)⁻¹`, as elements of `G`, row-major over `Q×Q`.
    pub alpha: Vec<usize>,
}

impl SectionCocycle {
    pub fn alpha(&self, x: usize, y: usize) -> usize {
        self.alpha[x * self.quotient.group.order() + y]
    }
}

pub fn section_with_cocycle(g: &Group, k: &Subgroup) -> Result<SectionCocycle> {
    if !k.iter().all(|z| (0..g.order()).all(|x| g.mul(z, x) == g.mul(x, z))) {
        return Err(pre!("subgroup is not central in {}", g.name()));
    }
    let quotient = g.quotient(k)?;
    let q = quotient.group.order();
    let section: Vec<usize> = quotient.reps.iter().map(|&r| r as usize).collect();
    let mut alpha = vec![0; q * q];
    for x in 0..q {
        for y in 0..q {
            let xy = quotient.group.mul(x, y);
            alpha[x * q + y] = g.mul(g.mul(section[x], section[y]), g.inv(section[xy]));
        }
    }
    Ok(SectionCocycle { quotient, section, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_orders(g: &Group, o: usize) -> usize {
        (0..g.order()).filter(|&x| g.elem_order(x) == o).count()
    }

    #[test]
    fn constructors_validate() {
        for g in small_catalog(16).groups {
            g.validate().unwrap();
        }
        Group::symmetric(4).unwrap().validate().unwrap();
        Group::alternating(5).unwrap().validate().unwrap();
        assert_eq!(Group::symmetric(5).unwrap().order(), 120);
    }

    #[test]
    fn quaternion_orders() {
        let q = Group::quaternion(8).unwrap();
        assert_eq!(count_orders(&q, 2), 1);
        assert_eq!(count_orders(&q, 4), 6);
    }

    #[test]
    fn klein_four() {
        let v = Group::direct_product(&[&Group::cyclic(2), &Group::cyclic(2)]);
        assert_eq!(count_orders(&v, 2), 3);
    }

    #[test]
    fn quotients() {
        let c4 = Group::cyclic(4);
        let q = c4.quotient(&c4.closure(&[2])).unwrap();
        assert_eq!(q.group.order(), 2);
        let q8 = Group::quaternion(8).unwrap();
        let q = q8.quotient(&q8.center()).unwrap();
        assert!((0..4).all(|x| q.group.mul(x, x) == 0));
        let s3 = Group::symmetric(3).unwrap();
        let a3 = s3.derived();
        assert_eq!(s3.quotient(&a3).unwrap().group.order(), 2);
        let h = s3.closure(&[1]);
        assert!(matches!(s3.quotient(&h), Err(Error::Precondition(_))));
    }

    /// Power-set closure oracle for tiny groups.
    fn subgroups_by_powerset(g: &Group) -> usize {
        let n = g.order();
        (0u32..1 << n)
            .filter(|m| {
                m & 1 == 1
                    && (0..n).all(|a| (0..n).all(|b| m >> a & 1 == 0 || m >> b & 1 == 0 || m >> g.mul(a, b) & 1 == 1))
            })
            .count()
    }

    #[test]
    fn lattices() {
        let v = Group::abelian(&[2, 2]).unwrap();
        let l = v.subgroup_lattice(48).unwrap();
        assert_eq!(l.subgroups.len(), 5);
        assert!(l.normal.iter().all(|&b| b));
        assert_eq!(subgroups_by_powerset(&v), 5);
        let s3 = Group::symmetric(3).unwrap();
        let l = s3.subgroup_lattice(48).unwrap();
        assert_eq!(l.subgroups.len(), 6);
        assert_eq!(l.classes.len(), 4);
        assert_eq!(subgroups_by_powerset(&s3), 6);
        assert_eq!(Group::trivial().subgroups().len(), 1);
        for g in small_catalog(8).groups {
            assert_eq!(g.subgroups().len(), subgroups_by_powerset(&g), "{}", g.name());
        }
        let big = Group::symmetric(5).unwrap();
        assert!(matches!(big.subgroup_lattice(48), Err(Error::Resource(_))));
    }

    #[test]
    fn characteristic() {
        let q8 = Group::quaternion(8).unwrap();
        let d = q8.characteristic_data().unwrap();
        assert_eq!(d.center.order(), 2);
        assert_eq!(d.derived.order(), 2);
        assert!(isomorphic(&d.abelianization.group, &Group::abelian(&[2, 2]).unwrap()).is_some());
        let s3 = Group::symmetric(3).unwrap();
        let d = s3.characteristic_data().unwrap();
        assert_eq!(d.center.order(), 1);
        assert_eq!(d.derived.order(), 3);
        let a = Group::abelian(&[4, 2]).unwrap();
        assert_eq!(a.center().order(), 8);
        assert_eq!(a.derived().order(), 1);
    }

    fn homs_exhaustive(g: &Group, s: &Subgroup, n: u32) -> usize {
        let k = s.order();
        let mut count = 0;
        let mut vals = vec![0u32; k];
        loop {
            if vals[0] == 0 && (AHom { n, vals: vals.clone() }).is_hom(g, s) {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == k {
                    return count;
                }
                vals[i] += 1;
                if vals[i] < n {
                    break;
                }
                vals[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn homs() {
        let c4 = Group::cyclic(4);
        assert_eq!(homs_to_cyclic(&c4, &c4.whole(), 2).len(), 2);
        assert_eq!(homs_exhaustive(&c4, &c4.whole(), 2), 2);
        let q8 = Group::quaternion(8).unwrap();
        let hs = homs_to_cyclic(&q8, &q8.whole(), 4);
        assert_eq!(hs.len(), 4);
        assert!(hs.iter().all(|h| h.is_hom(&q8, &q8.whole())));
        for g in small_catalog(8).groups {
            for s in g.subgroups() {
                for n in [1u32, 2, 3, 4, 6] {
                    let hs = homs_to_cyclic(&g, &s, n);
                    assert_eq!(hs.len() as u64, hom_count_formula(&g, &s, n));
                    assert!(hs.iter().all(|h| h.is_hom(&g, &s)));
                    let set: BTreeSet<_> = hs.iter().collect();
                    assert_eq!(set.len(), hs.len());
                    if s.order() <= 4 {
                        assert_eq!(hs.len(), homs_exhaustive(&g, &s, n));
                    }
                }
            }
        }
    }

    #[test]
    fn automorphisms() {
        assert_eq!(automorphism_group(&Group::cyclic(4), 48).unwrap().auts.len(), 2);
        assert_eq!(automorphism_group(&Group::abelian(&[2, 2]).unwrap(), 48).unwrap().auts.len(), 6);
        assert_eq!(automorphism_group(&Group::trivial(), 48).unwrap().auts.len(), 1);
        for g in small_catalog(12).groups {
            let a = automorphism_group(&g, 48).unwrap();
            assert_eq!(a.inn.order() * g.center().order(), g.order(), "{}", g.name());
            assert!(a.auts.iter().all(|h| h.is_hom(&g, &g) && h.is_bijective(g.order())));
            assert_eq!(a.auts[0], GroupHom::identity(g.order()));
        }
    }

    #[test]
    fn isomorphism_tests() {
        let q8 = Group::quaternion(8).unwrap();
        let d8 = Group::dihedral(8).unwrap();
        assert!(isomorphic(&q8, &d8).is_none());
        let c6 = Group::cyclic(6);
        let c2c3 = Group::abelian(&[2, 3]).unwrap();
        let f = isomorphic(&c6, &c2c3).unwrap();
        assert!(f.is_hom(&c6, &c2c3) && f.is_bijective(6));
        let cat = small_catalog(15);
        assert!(cat.complete);
        for (i, g) in cat.groups.iter().enumerate() {
            assert!(isomorphic(g, g).is_some());
            for h in &cat.groups[i + 1..] {
                assert!(isomorphic(g, h).is_none(), "{} vs {}", g.name(), h.name());
            }
        }
        assert!(!small_catalog(16).complete);
    }

    #[test]
    fn catalog_counts() {
        assert_eq!(small_catalog(4).groups.len(), 5);
        assert_eq!(small_catalog(8).groups.iter().filter(|g| g.order() == 8).count(), 5);
        assert_eq!(small_catalog(1).groups.len(), 1);
        assert_eq!(small_catalog(15).groups.len(), 28);
    }

    #[test]
    fn parse_names() {
        assert_eq!(parse_group("C2xC2").unwrap().order(), 4);
        assert_eq!(parse_group("Dic12").unwrap().order(), 12);
        assert!(parse_group("Z5").is_err());
    }

    #[test]
    fn sections() {
        let c4 = Group::cyclic(4);
        let sc = section_with_cocycle(&c4, &c4.closure(&[2])).unwrap();
        assert_eq!(sc.alpha(1, 1), 2);
        let s3 = Group::symmetric(3).unwrap();
        assert!(section_with_cocycle(&s3, &s3.closure(&[1])).is_err());
    }

    #[test]
    fn table_validation() {
        let bad = vec![vec![0, 1], vec![1, 1]];
        assert!(matches!(Group::from_table("bad", &bad, None), Err(Error::Format(_))));
        let c3 = Group::cyclic(3);
        let g = Group::from_table("c3", &c3.rows(), None).unwrap();
        assert_eq!(g, c3);
    }
}
