//! Linearization to class functions over F_p, the induced action of fibered
//! bisets on characters, the three-condition simplicity probe at the trivial
//! group, and the Burnside kernel element for `C_p×C_p`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{ensure_internal, internal, pre, Result};
use crate::fib::{standard_basis, FiberPair, FiberedElement, Space};
use crate::grp::{lcm, parse_group, AHom, Group, GroupRef, Subgroup};
use crate::linalg::{inv_mod, is_prime, least_prime_one_mod, pow_mod, primitive_root, rank_fp, rank_q, Mat};
use crate::ring::RingSpec;

/// F_p together with a fixed embedding `ζ: Z/N → F_p^×`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharField {
    pub p: u64,
    pub n: u32,
    /// Image of `1 ∈ Z/N`, of multiplicative order `N`.
    pub zeta: u64,
}

impl CharField {
    /// Requires `p` prime and `N | p − 1`; `ζ = ω^{(p−1)/N}` for the least
    /// primitive root `ω`.
    pub fn new(p: u64, n: u32) -> Result<CharField> {
        if n == 0 {
            return Err(pre!("N must be positive"));
        }
        if !is_prime(p) || !(p - 1).is_multiple_of(n as u64) {
            return Err(pre!("no element of order {n} in F_{p}^×"));
        }
        let w = primitive_root(p).ok_or_else(|| internal!("no primitive root mod {p}"))?;
        Ok(CharField { p, n, zeta: pow_mod(w, (p - 1) / n as u64, p) })
    }

    /// The least prime `p ≡ 1 mod lcm(exp, N)`.
    pub fn least(exp: u64, n: u32) -> CharField {
        let p = least_prime_one_mod(lcm(exp.max(1), n.max(1) as u64));
        CharField::new(p, n).expect("p ≡ 1 mod N")
    }

    /// The least prime suitable for every group in `groups`.
    pub fn for_groups(groups: &[GroupRef], n: u32) -> CharField {
        let e = groups.iter().fold(1u64, |e, g| lcm(e, g.exponent()));
        CharField::least(e, n)
    }

    pub fn root(&self, v: u32) -> u64 {
        pow_mod(self.zeta, v as u64 % self.n as u64, self.p)
    }

    /// `p ∤ |G|` and `exp(G) | p − 1`.
    pub fn check_group(&self, g: &Group) -> Result<()> {
        if (g.order() as u64).is_multiple_of(self.p) || !(self.p - 1).is_multiple_of(g.exponent()) {
            return Err(pre!("F_{} does not split {} (need exp | p−1)", self.p, g.name()));
        }
        Ok(())
    }

    fn inv(&self, x: u64) -> Result<u64> {
        inv_mod(x % self.p, self.p).ok_or_else(|| pre!("{x} is not invertible mod {}", self.p))
    }
}

/// An F_p-valued class function, one value per conjugacy class in the order
/// of [`Group::conjugacy_classes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    pub g: GroupRef,
    pub field: CharField,
    pub values: Vec<u64>,
}

impl ClassFunction {
    pub fn zero(g: &GroupRef, field: CharField) -> ClassFunction {
        ClassFunction { g: g.clone(), field, values: vec![0; g.conjugacy_classes().len()] }
    }

    /// Indicator function of the `c`-th class.
    pub fn delta(g: &GroupRef, field: CharField, c: usize) -> ClassFunction {
        let mut f = ClassFunction::zero(g, field);
        f.values[c] = 1;
        f
    }

    /// From values on all elements; fails if they are not constant on classes.
    pub fn from_elements(g: &GroupRef, field: CharField, vals: &[u64]) -> Result<ClassFunction> {
        let classes = g.conjugacy_classes();
        let mut values = Vec::with_capacity(classes.len());
        for c in &classes {
            let v = vals[c[0]];
            if c.iter().any(|&x| vals[x] != v) {
                return Err(internal!("function is not constant on a class of {}", g.name()));
            }
            values.push(v);
        }
        Ok(ClassFunction { g: g.clone(), field, values })
    }

    /// Values on all elements.
    pub fn on_elements(&self) -> Vec<u64> {
        let mut out = vec![0; self.g.order()];
        for (c, cl) in self.g.conjugacy_classes().iter().enumerate() {
            for &x in cl {
                out[x] = self.values[c];
            }
        }
        out
    }

    pub fn degree(&self) -> u64 {
        self.values[0]
    }

    pub fn add(&self, other: &ClassFunction) -> ClassFunction {
        let p = self.field.p;
        ClassFunction { g: self.g.clone(), field: self.field, values: self.values.iter().zip(&other.values).map(|(a, b)| (a + b) % p).collect() }
    }

    /// `⟨f, g⟩ = |G|⁻¹ Σ f(x) g(x⁻¹)`.
    pub fn inner(&self, other: &ClassFunction) -> Result<u64> {
        let p = self.field.p;
        let a = self.on_elements();
        let b = other.on_elements();
        let s = (0..self.g.order()).fold(0u64, |s, x| (s + a[x] * b[self.g.inv(x)]) % p);
        Ok(s * self.field.inv(self.g.order() as u64)? % p)
    }
}

/// Values of `Ind_U^X(ζ∘φ)` on all elements of `X`.
pub fn induced_values(x: &Group, u: &Subgroup, phi: &AHom, field: &CharField) -> Result<Vec<u64>> {
    if phi.n != field.n {
        return Err(pre!("character takes values in Z/{}, field embeds Z/{}", phi.n, field.n));
    }
    let p = field.p;
    let inv_u = field.inv(u.order() as u64)?;
    let mut out = vec![0u64; x.order()];
    for (z, slot) in out.iter_mut().enumerate() {
        let mut s = 0u64;
        for t in 0..x.order() {
            let c = x.conj(x.inv(t), z);
            if u.contains(c) {
                s = (s + field.root(phi.at(u, c))) % p;
            }
        }
        *slot = s * inv_u % p;
    }
    Ok(out)
}

fn element_character(x: &FiberedElement, field: &CharField) -> Result<Vec<u64>> {
    let p = field.p;
    let mut out = vec![0u64; x.space.gh.order()];
    for (t, c) in x.terms() {
        let c = c.residue(p).ok_or_else(|| pre!("coefficient has no residue mod {p}"))?;
        for (o, v) in out.iter_mut().zip(induced_values(&x.space.gh, &t.u, &t.phi, field)?) {
            *o = (*o + c * v) % p;
        }
    }
    Ok(out)
}

/// `lin_G`: `[U,φ]_G ↦ Ind_U^G(φ)` on `B^A(G) = B^A(G×{1})`.
pub fn linearize(x: &FiberedElement, field: &CharField) -> Result<ClassFunction> {
    if x.space.h.order() != 1 {
        return Err(pre!("linearize expects an element of B^A(G) = B^A(G, 1)"));
    }
    if x.space.n != field.n {
        return Err(pre!("element uses N = {}, field embeds Z/{}", x.space.n, field.n));
    }
    field.check_group(&x.space.g)?;
    let vals = element_character(x, field)?;
    ClassFunction::from_elements(&x.space.g, *field, &vals)
}

/// `[G×H/(U,φ)] ⊗_{kH} −` on class functions:
/// `g ↦ |H|⁻¹ Σ_h χ(g,h)·f(h)`, where `χ = Ind_U^{G×H}(φ)`.
pub fn action_on_characters(pair: &FiberPair, f: &ClassFunction) -> Result<ClassFunction> {
    action_of_element(&FiberedElement::from_pair(pair, RingSpec::Z), f)
}

/// Linear extension of [`action_on_characters`].
pub fn action_of_element(x: &FiberedElement, f: &ClassFunction) -> Result<ClassFunction> {
    let s = &x.space;
    let field = f.field;
    if s.n != field.n {
        return Err(pre!("element uses N = {}, field embeds Z/{}", s.n, field.n));
    }
    if !crate::fib::same_group(&s.h, &f.g) {
        return Err(pre!("class function lives on {}, biset acts from {}", f.g.name(), s.h.name()));
    }
    field.check_group(&s.g)?;
    field.check_group(&s.h)?;
    let p = field.p;
    let chi = element_character(x, &field)?;
    let fv = f.on_elements();
    let inv_h = field.inv(s.h.order() as u64)?;
    let vals: Vec<u64> = (0..s.g.order())
        .map(|g| (0..s.h.order()).fold(0u64, |acc, h| (acc + chi[s.enc(g, h)] * fv[h]) % p) * inv_h % p)
        .collect();
    ClassFunction::from_elements(&s.g, field, &vals)
}

/// Rank of `lin_G` on the standard basis of `B^A(G)`.
pub fn linearization_rank(g: &GroupRef, field: &CharField) -> Result<usize> {
    let space = Space::new(g.clone(), trivial(), field.n);
    let rows: Mat = standard_basis(&space)?
        .iter()
        .map(|b| linearize(&FiberedElement::from_canonical(b, RingSpec::Z), field).map(|f| f.values))
        .collect::<Result<_>>()?;
    Ok(rank_fp(&rows, field.p))
}

fn trivial() -> GroupRef {
    Arc::new(Group::trivial())
}

/// The functor under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeFunctor {
    /// `G ↦ k ⊗ R(G)`, realized as class functions over F_p.
    CharacterRing,
    /// The fibered Burnside functor `B^A_k`, over Q.
    Burnside,
}

impl ProbeFunctor {
    pub fn tag(self) -> &'static str {
        match self {
            ProbeFunctor::CharacterRing => "character-ring",
            ProbeFunctor::Burnside => "burnside",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeGroup {
    pub group: String,
    /// `dim F(G)`.
    pub dim: usize,
    /// Rank of `x ↦ F(x)(1)` over `x ∈ B^A(G, 1)`.
    pub rank_ii: usize,
    /// Rank of the pairing of `F(G)` with the maps `F(y)`, `y ∈ B^A(1, G)`.
    pub rank_iii: usize,
}

impl ProbeGroup {
    pub fn cond_ii(&self) -> bool {
        self.rank_ii == self.dim
    }
    pub fn cond_iii(&self) -> bool {
        self.rank_iii == self.dim
    }
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub functor: ProbeFunctor,
    pub n: u32,
    /// The prime used for the character ring.
    pub p: Option<u64>,
    /// `F({1})` is one-dimensional, hence simple over `E_{{1}} = k`.
    pub cond_i: bool,
    pub groups: Vec<ProbeGroup>,
}

impl ProbeReport {
    pub fn passes(&self) -> bool {
        self.cond_i && self.groups.iter().all(|g| g.cond_ii() && g.cond_iii())
    }

    /// Groups where condition (iii) fails.
    pub fn kernel_witnesses(&self) -> Vec<&str> {
        self.groups.iter().filter(|g| !g.cond_iii()).map(|g| g.group.as_str()).collect()
    }
}

/// Checks the three conditions of the simplicity criterion with `H = {1}` on
/// each group in `groups`. A finite probe, not a proof. For the character
/// ring, `Z/N` stands in for `C^×` and must contain the `exp(G)`-th roots of
/// unity.
pub fn simplicity_probe(groups: &[GroupRef], functor: ProbeFunctor, n: u32) -> Result<ProbeReport> {
    let one = trivial();
    match functor {
        ProbeFunctor::CharacterRing => {
            let field = CharField::for_groups(groups, n);
            let mut out = Vec::new();
            for g in groups {
                field.check_group(g)?;
                if !(n as u64).is_multiple_of(g.exponent()) {
                    return Err(pre!("Z/{n} lacks roots of unity of order exp({}) = {}", g.name(), g.exponent()));
                }
                let classes = g.conjugacy_classes().len();
                let rank_ii = linearization_rank(g, &field)?;
                let space = Space::new(one.clone(), g.clone(), n);
                let ys = standard_basis(&space)?;
                let mut rows: Mat = Vec::with_capacity(ys.len());
                for y in &ys {
                    let ye = FiberedElement::from_canonical(y, RingSpec::Z);
                    let row = (0..classes)
                        .map(|c| action_of_element(&ye, &ClassFunction::delta(g, field, c)).map(|v| v.values[0]))
                        .collect::<Result<Vec<u64>>>()?;
                    rows.push(row);
                }
                out.push(ProbeGroup { group: g.name().into(), dim: classes, rank_ii, rank_iii: rank_fp(&rows, field.p) });
            }
            Ok(ProbeReport { functor, n, p: Some(field.p), cond_i: true, groups: out })
        }
        ProbeFunctor::Burnside => {
            let ring = RingSpec::Z;
            let unit_space = Space::new(one.clone(), one.clone(), n);
            let unit = standard_basis(&unit_space)?;
            ensure_internal!(unit.len() == 1, "B^A(1) is not one-dimensional");
            let unit = FiberedElement::from_canonical(&unit[0], ring);
            let mut out = Vec::new();
            for g in groups {
                let gs = Space::new(g.clone(), one.clone(), n);
                let xs = standard_basis(&gs)?;
                let ys = standard_basis(&Space::new(one.clone(), g.clone(), n))?;
                let mut ii: Vec<Vec<BigRational>> = Vec::new();
                for x in &xs {
                    let img = FiberedElement::from_canonical(x, ring).mul_into(&gs, &unit)?;
                    ii.push(xs.iter().map(|b| rational(img.coeff(b).to_i64())).collect::<Result<_>>()?);
                }
                let mut iii: Vec<Vec<BigRational>> = Vec::new();
                for y in &ys {
                    let ye = FiberedElement::from_canonical(y, ring);
                    let mut row = Vec::with_capacity(xs.len());
                    for x in &xs {
                        let v = ye.mul_into(&unit_space, &FiberedElement::from_canonical(x, ring))?;
                        row.push(rational(v.terms().map(|(_, c)| c.to_i64()).next().unwrap_or(Some(0)))?);
                    }
                    iii.push(row);
                }
                out.push(ProbeGroup { group: g.name().into(), dim: xs.len(), rank_ii: rank_q(&ii), rank_iii: rank_q(&iii) });
            }
            Ok(ProbeReport { functor, n, p: None, cond_i: true, groups: out })
        }
    }
}

fn rational(v: Option<i64>) -> Result<BigRational> {
    v.map(|v| BigRational::from_integer(BigInt::from(v))).ok_or_else(|| internal!("non-integral structure constant"))
}

/// The element `p[G/G] − Σ_{i=1}^{p+1} [G/H_i] + [G/1]` of `B(C_p×C_p)`
/// and its images under every map to `B({1})`.
#[derive(Clone, Debug)]
pub struct KernelCheck {
    pub p: u64,
    pub group: GroupRef,
    pub element: FiberedElement,
    /// `(|Q|, y·x)` for each `[Q] ∈ B({1}, G)`, by Mackey products.
    pub images: Vec<(usize, i64)>,
    /// `|P\G/Q| = |G|/|PQ|` pairings agree with the Mackey products on basis
    /// elements.
    pub formula_agrees: bool,
}

impl KernelCheck {
    pub fn nonzero(&self) -> bool {
        !self.element.is_zero()
    }
    pub fn annihilated(&self) -> bool {
        self.images.iter().all(|&(_, v)| v == 0)
    }
}

fn subgroup_of_pair(space: &Space, u: &Subgroup, left: bool) -> Vec<usize> {
    u.iter().map(|z| if left { space.dec(z).0 } else { space.dec(z).1 }).collect()
}

/// Builds the kernel element for `G = C_p×C_p`, `p ∈ {2, 3}`, with trivial
/// fiber, and evaluates every `[Q] ∈ B({1}, G)` on it.
pub fn burnside_kernel_check(p: u64) -> Result<KernelCheck> {
    if p != 2 && p != 3 {
        return Err(pre!("p must be 2 or 3"));
    }
    let g: GroupRef = Arc::new(parse_group(&format!("C{p}xC{p}"))?);
    let one = trivial();
    let gs = Space::new(g.clone(), one.clone(), 1);
    let ys_space = Space::new(one.clone(), g.clone(), 1);
    let unit_space = Space::new(one.clone(), one, 1);
    let ring = RingSpec::Z;
    let xs = standard_basis(&gs)?;
    let mut element = FiberedElement::zero(&gs, ring);
    let mut count_p = 0;
    for x in &xs {
        let c = match x.u.order() as u64 {
            o if o == p * p => p as i64,
            o if o == p => {
                count_p += 1;
                -1
            }
            _ => 1,
        };
        element = element.add(&FiberedElement::from_canonical(x, ring).scale(&ring.from_i64(c))?)?;
    }
    ensure_internal!(count_p as u64 == p + 1, "C_p×C_p has {count_p} subgroups of order p");
    let pairing = |y: &FiberedElement, x: &FiberedElement| -> Result<i64> {
        let v = y.mul_into(&unit_space, x)?;
        let c = v.terms().map(|(_, c)| c.to_i64()).next().unwrap_or(Some(0));
        c.ok_or_else(|| internal!("non-integral pairing"))
    };
    let mut images = Vec::new();
    let mut formula_agrees = true;
    for y in standard_basis(&ys_space)? {
        let ye = FiberedElement::from_canonical(&y, ring);
        images.push((y.u.order(), pairing(&ye, &element)?));
        let q = subgroup_of_pair(&ys_space, &y.u, false);
        for x in &xs {
            let pp = subgroup_of_pair(&gs, &x.u, true);
            let mut prod: Vec<usize> = pp.iter().flat_map(|&a| q.iter().map(move |&b| (a, b))).map(|(a, b)| g.mul(a, b)).collect();
            prod.sort_unstable();
            prod.dedup();
            let expected = (g.order() / prod.len()) as i64;
            if pairing(&ye, &FiberedElement::from_canonical(x, ring))? != expected {
                formula_agrees = false;
            }
        }
    }
    Ok(KernelCheck { p, group: g, element, images, formula_agrees })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(name: &str) -> GroupRef {
        Arc::new(parse_group(name).unwrap())
    }

    #[test]
    fn regular_and_trivial_characters() {
        let s3 = grp("S3");
        let f = CharField::least(s3.exponent(), 6);
        assert_eq!(f.p, 7);
        let space = Space::new(s3.clone(), trivial(), 6);
        for b in standard_basis(&space).unwrap() {
            let chi = linearize(&FiberedElement::from_canonical(&b, RingSpec::Z), &f).unwrap();
            if b.u.order() == 1 {
                assert_eq!(chi.values, vec![6, 0, 0]);
            }
            if b.u.order() == 6 && b.phi.vals.iter().all(|&v| v == 0) {
                assert_eq!(chi.values, vec![1, 1, 1]);
            }
        }
        assert_eq!(linearization_rank(&s3, &f).unwrap(), 3);
    }

    #[test]
    fn kernel_element_p2() {
        let k = burnside_kernel_check(2).unwrap();
        assert!(k.nonzero() && k.annihilated() && k.formula_agrees);
    }
}
