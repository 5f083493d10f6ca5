//! Versioned JSON documents for groups, pairs, elements, catalogs and
//! modules. Every document is `{"schema", "kind", "data"}`; indices are
//! 0-based with the identity at 0.

use std::sync::Arc;

use fibrum_core::fib::{make_pair, FiberPair, FiberedElement, Space, SpaceRef};
use fibrum_core::grp::{parse_group, AHom, Catalog, Group, GroupRef, Subgroup};
use fibrum_core::idem::CentralPair;
use fibrum_core::ring::RingSpec;
use fibrum_core::simp::{GammaModule, Simplicity};
use fibrum_core::Error as CoreError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "fibrum/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub schema: String,
    pub kind: String,
    /// The run configuration that produced the document.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
    pub data: Value,
}

impl Document {
    pub fn new<T: Serialize>(kind: &str, data: &T) -> CliResult<Document> {
        Ok(Document { schema: SCHEMA.into(), kind: kind.into(), config: None, data: serde_json::to_value(data)? })
    }

    /// Parses a document and checks its schema and kind.
    pub fn parse(text: &str, kind: &str) -> CliResult<Document> {
        let doc: Document = serde_json::from_str(text)?;
        if doc.schema != SCHEMA {
            return Err(CliError::Schema { expected: SCHEMA.into(), found: doc.schema });
        }
        if doc.kind != kind {
            return Err(CliError::Schema { expected: format!("kind {kind}"), found: format!("kind {}", doc.kind) });
        }
        Ok(doc)
    }

    pub fn payload<T: DeserializeOwned>(&self) -> CliResult<T> {
        Ok(serde_json::from_value(self.data.clone())?)
    }
}

pub fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn read_payload<T: DeserializeOwned>(path: &str, kind: &str) -> CliResult<T> {
    Document::parse(&read_file(path)?, kind)?.payload()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub name: String,
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
    pub labels: Vec<String>,
}

impl GroupJson {
    pub fn from_group(g: &Group) -> GroupJson {
        GroupJson { name: g.name().into(), order: g.order(), mul: g.rows(), labels: g.labels().to_vec() }
    }

    pub fn to_group(&self) -> CliResult<Group> {
        if self.mul.len() != self.order {
            return Err(CoreError::Format(format!("order {} but {} table rows", self.order, self.mul.len())).into());
        }
        Ok(Group::from_table(&self.name, &self.mul, Some(self.labels.clone()))?)
    }
}

/// A group by constructor name, or an explicit table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRefJson {
    Name(String),
    Table(GroupJson),
}

impl GroupRefJson {
    /// A name when the named constructor reproduces the table exactly.
    pub fn from_group(g: &Group) -> GroupRefJson {
        match parse_group(g.name()) {
            Ok(h) if h == *g => GroupRefJson::Name(g.name().into()),
            _ => GroupRefJson::Table(GroupJson::from_group(g)),
        }
    }

    pub fn resolve(&self) -> CliResult<GroupRef> {
        Ok(Arc::new(match self {
            GroupRefJson::Name(n) => parse_group(n)?,
            GroupRefJson::Table(t) => t.to_group()?,
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub g: GroupRefJson,
    pub h: GroupRefJson,
    #[serde(rename = "N")]
    pub n: u32,
    /// Elements `(g, h)` of `U`, sorted.
    pub u: Vec<[usize; 2]>,
    /// `φ` on the elements of `u`, in the same order.
    pub phi: Vec<u32>,
}

impl PairJson {
    pub fn from_pair(p: &FiberPair) -> PairJson {
        let s = &p.space;
        PairJson {
            g: GroupRefJson::from_group(&s.g),
            h: GroupRefJson::from_group(&s.h),
            n: s.n,
            u: p.u.iter().map(|z| s.dec(z).into()).collect(),
            phi: p.u.iter().map(|z| p.phi.at(&p.u, z)).collect(),
        }
    }

    pub fn to_pair(&self) -> CliResult<FiberPair> {
        let space = Space::new(self.g.resolve()?, self.h.resolve()?, self.n);
        self.to_pair_in(&space)
    }

    pub fn to_pair_in(&self, space: &SpaceRef) -> CliResult<FiberPair> {
        let (go, ho) = (space.g.order(), space.h.order());
        if let Some([a, b]) = self.u.iter().find(|[a, b]| *a >= go || *b >= ho) {
            return Err(CoreError::Format(format!("element ({a}, {b}) outside G×H")).into());
        }
        let elems: Vec<usize> = self.u.iter().map(|&[a, b]| space.enc(a, b)).collect();
        Ok(make_pair(space, &elems, &self.phi)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub pair: PairJson,
    /// Exact decimal string, `a` or `a/b`.
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub g: GroupRefJson,
    pub h: GroupRefJson,
    #[serde(rename = "N")]
    pub n: u32,
    pub ring: String,
    pub terms: Vec<TermJson>,
}

impl ElementJson {
    pub fn from_element(x: &FiberedElement) -> ElementJson {
        let s = &x.space;
        ElementJson {
            g: GroupRefJson::from_group(&s.g),
            h: GroupRefJson::from_group(&s.h),
            n: s.n,
            ring: x.ring.tag(),
            terms: x.terms().map(|(p, c)| TermJson { pair: PairJson::from_pair(&p), coeff: c.to_string() }).collect(),
        }
    }

    pub fn to_element(&self) -> CliResult<FiberedElement> {
        let space = Space::new(self.g.resolve()?, self.h.resolve()?, self.n);
        self.to_element_in(&space)
    }

    /// Reads the element into an existing space; the group references must
    /// describe the same tables.
    pub fn to_element_in(&self, space: &SpaceRef) -> CliResult<FiberedElement> {
        let (g, h) = (self.g.resolve()?, self.h.resolve()?);
        if *g != *space.g || *h != *space.h || self.n != space.n {
            return Err(CoreError::Precondition(format!("element lives over ({}, {}, N={}), expected ({}, {}, N={})", g.name(), h.name(), self.n, space.g.name(), space.h.name(), space.n)).into());
        }
        let ring = RingSpec::parse(&self.ring)?;
        let mut x = FiberedElement::zero(space, ring);
        for t in &self.terms {
            let p = t.pair.to_pair_in(space)?;
            let c = ring.parse_coeff(&t.coeff)?;
            x = x.add(&FiberedElement::from_pair(&p, ring).scale(&c)?)?;
        }
        Ok(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralPairJson {
    /// Sorted elements of `K`.
    pub k: Vec<usize>,
    /// `κ` on the elements of `k`, in the same order.
    pub kappa: Vec<u32>,
}

impl CentralPairJson {
    pub fn from_pair(p: &CentralPair) -> CentralPairJson {
        CentralPairJson { k: p.k.elems().to_vec(), kappa: p.kappa.vals.clone() }
    }

    pub fn resolve(&self, g: &Group, n: u32) -> CliResult<CentralPair> {
        let k: Subgroup = g.subgroup(&self.k)?;
        if k.elems() != self.k.as_slice() {
            return Err(CoreError::Format("K must be listed in increasing order".into()).into());
        }
        let kappa = AHom { n, vals: self.kappa.clone() };
        if kappa.vals.len() != k.order() || kappa.vals.iter().any(|&v| v >= n) || !kappa.is_hom(g, &k) {
            return Err(CoreError::Precondition(format!("κ is not a homomorphism K → Z/{n}")).into());
        }
        Ok(CentralPair { k, kappa })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub p: u64,
    pub dim: usize,
    /// One `dim×dim` matrix per element of `Γ`, in the order of `Γ`'s basis.
    pub mats: Vec<Vec<Vec<u64>>>,
}

impl ModuleJson {
    pub fn from_module(m: &GammaModule) -> ModuleJson {
        ModuleJson { p: m.p, dim: m.dim, mats: m.mats.clone() }
    }

    /// Unvalidated; [`GammaModule::validate`] runs when a quadruple is built.
    pub fn to_module(&self) -> GammaModule {
        GammaModule { p: self.p, dim: self.dim, mats: self.mats.clone(), simplicity: Simplicity::Assumed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogJson {
    pub complete: bool,
    pub groups: Vec<GroupJson>,
}

impl CatalogJson {
    pub fn from_catalog(c: &Catalog) -> CatalogJson {
        CatalogJson { complete: c.complete, groups: c.groups.iter().map(|g| GroupJson::from_group(g)).collect() }
    }

    pub fn to_catalog(&self) -> CliResult<Catalog> {
        let groups = self.groups.iter().map(|g| g.to_group().map(Arc::new)).collect::<CliResult<_>>()?;
        Ok(Catalog { groups, complete: self.complete })
    }
}

pub fn subgroup_json(s: &Subgroup) -> Vec<usize> {
    s.elems().to_vec()
}
