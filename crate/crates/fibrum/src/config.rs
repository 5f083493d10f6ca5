//! Run configuration shared by all subcommands. It is echoed in every
//! output document so that a run can be reproduced.

use fibrum_core::grp::{small_catalog, Catalog};
use fibrum_core::ring::RingSpec;
use serde::Serialize;

use crate::error::{usage, CliResult};
use crate::formats::{read_payload, CatalogJson};

/// Environment variable naming a catalog document that replaces the built-in
/// small-group catalog.
pub const CATALOG_ENV: &str = "FIBRUM_CATALOG";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: u32,
    pub ring: String,
    pub p: Option<u64>,
    /// Largest group order accepted from the command line.
    pub max_order: usize,
    /// Largest group order for simple-functor evaluation.
    pub eval_bound: usize,
    pub catalog: Option<String>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { n: 2, ring: "Z".into(), p: None, max_order: 48, eval_bound: fibrum_core::simp::EVALUATION_BOUND, catalog: None, seed: 2024 }
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.n == 0 {
            return Err(usage("N must be at least 1"));
        }
        if self.max_order == 0 || self.eval_bound == 0 {
            return Err(usage("bounds must be positive"));
        }
        self.ring_spec()?;
        Ok(())
    }

    pub fn ring_spec(&self) -> CliResult<RingSpec> {
        Ok(RingSpec::parse(&self.ring)?)
    }

    /// The catalog restricted to orders `≤ max`: the override document if
    /// one is configured, otherwise the built-in catalog.
    pub fn catalog(&self, max: usize) -> CliResult<Catalog> {
        match &self.catalog {
            Some(path) => {
                let c = read_payload::<CatalogJson>(path, "catalog")?.to_catalog()?;
                let complete = c.complete && c.groups.iter().map(|g| g.order()).max().unwrap_or(0) >= max;
                Ok(Catalog { groups: c.groups.into_iter().filter(|g| g.order() <= max).collect(), complete })
            }
            None => Ok(small_catalog(max)),
        }
    }
}
