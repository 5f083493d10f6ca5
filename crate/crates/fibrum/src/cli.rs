//! Argument parsing and the subcommands. Every command produces one
//! [`Document`]; `main` prints it as JSON or as aligned text.

use std::path::Path;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use fibrum_core::cohom::{full_decomposition, linkage_via_cohomology, reduced_criterion_hypothesis, squeeze};
use fibrum_core::fib::{decompose_standard, product_of, standard_basis, FiberPair, FiberedElement, Space};
use fibrum_core::grp::{parse_group, GroupRef};
use fibrum_core::idem::{covering_algebra_report, gamma_group, linkage_classes, linked, mgg_pairs, ses_report, CentralPair, Mgg};
use fibrum_core::lin::{linearize, CharField};
use fibrum_core::simp::{default_prime, provenance, reduced_pairs_bruteforce, simple_evaluation_bounded, GammaModule, Quadruple};
use fibrum_core::Error as CoreError;
use serde_json::{json, Value};

use crate::config::{RunConfig, CATALOG_ENV};
use crate::error::{usage, CliResult, EXIT_CRITERIA};
use crate::formats::{read_payload, subgroup_json, CentralPairJson, Document, ElementJson, GroupJson, ModuleJson, PairJson};
use crate::verify::{criterion_by_slug, run_many, Criterion, VerifyOptions, CRITERIA};

#[derive(Parser, Debug)]
#[command(name = "fibrum", version, about = "Exact computation with A-fibered bisets over finite groups, with A = Z/N")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Modulus N of the fiber group A = Z/N [default: 2; verify: its own grid]
    #[arg(long = "n", short = 'n', global = true)]
    pub n: Option<u32>,
    /// Coefficient ring: Z, Q or Fp (e.g. F5)
    #[arg(long, global = true, default_value = "Z")]
    pub ring: String,
    /// Prime for F_p computations with characters
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Largest group order accepted; for verify, restricts the group grids
    #[arg(long, global = true)]
    pub max_order: Option<usize>,
    /// Largest test group order for simple-functor evaluation
    #[arg(long, global = true, default_value_t = fibrum_core::simp::EVALUATION_BOUND)]
    pub eval_bound: usize,
    /// Catalog document replacing the built-in small-group catalog
    #[arg(long, global = true, env = CATALOG_ENV)]
    pub catalog: Option<String>,
    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = 2024)]
    pub seed: u64,
    /// Print aligned text instead of JSON
    #[arg(long, global = true)]
    pub text: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a group from a name, a constructor term or a group document
    Group { spec: String },
    /// List the standard basis of B^A(G,H)
    Basis {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Multiply x in B^A(G,H) by y in B^A(H,K)
    Product {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: String,
        x: String,
        y: String,
    },
    /// The pairs of M_G^G, linkage classes and the covering algebra
    Idem {
        #[arg(long)]
        group: String,
        /// Include the expansions of e and f
        #[arg(long)]
        expansions: bool,
    },
    /// Linked pairs between M_G^G and M_H^H
    Linkage {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// The group Gamma of a pair of M_G^G and its exact sequence
    Gamma {
        #[arg(long)]
        group: String,
        /// Index into M_G^G as listed by `idem`
        #[arg(long)]
        pair: usize,
    },
    /// Decide reducedness of every pair of M_G^G by search
    Reduced {
        #[arg(long)]
        group: String,
    },
    /// Squeeze a faithful central pair
    Squeeze {
        #[arg(long)]
        group: String,
        #[arg(long)]
        pair: usize,
    },
    /// Decompose a pair document into elementary factors
    Decompose {
        pair: String,
        /// Seven-factor form with a reduced middle factor
        #[arg(long)]
        full: bool,
    },
    /// Evaluate a simple functor S_(G,K,kappa,V) at test groups
    SimpleEval {
        #[arg(long)]
        group: String,
        #[arg(long)]
        pair: usize,
        /// Module document for V; the trivial module if absent
        #[arg(long)]
        module: Option<String>,
        /// Test groups; all catalog groups up to |G| if absent
        #[arg(long = "at")]
        at: Vec<String>,
        /// Decide reducedness with the criterion for |G| dividing N
        #[arg(long)]
        hypothesis: bool,
    },
    /// Linearize an element of B^A(G,1) to a class function over F_p
    Linearize { element: String },
    /// Run acceptance suites by slug or number; all if none given
    Verify { suites: Vec<String> },
}

pub struct Outcome {
    pub doc: Document,
    pub exit: i32,
}

impl GlobalArgs {
    pub fn config(&self) -> RunConfig {
        let d = RunConfig::default();
        RunConfig {
            n: self.n.unwrap_or(d.n),
            ring: self.ring.clone(),
            p: self.p,
            max_order: self.max_order.unwrap_or(d.max_order),
            eval_bound: self.eval_bound,
            catalog: self.catalog.clone(),
            seed: self.seed,
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let cfg = cli.global.config();
    cfg.validate()?;
    let mut exit = 0;
    let (kind, data) = match &cli.command {
        Command::Group { spec } => ("group-report", group_cmd(&cfg, spec)?),
        Command::Basis { g, h } => ("basis", basis_cmd(&cfg, g, h)?),
        Command::Product { g, h, k, x, y } => ("element", product_cmd(&cfg, g, h, k, x, y)?),
        Command::Idem { group, expansions } => ("idempotents", idem_cmd(&cfg, group, *expansions)?),
        Command::Linkage { g, h } => ("linkage", linkage_cmd(&cfg, g, h)?),
        Command::Gamma { group, pair } => ("gamma", gamma_cmd(&cfg, group, *pair)?),
        Command::Reduced { group } => ("reduced", reduced_cmd(&cfg, group)?),
        Command::Squeeze { group, pair } => ("squeeze", squeeze_cmd(&cfg, group, *pair)?),
        Command::Decompose { pair, full } => ("decomposition", decompose_cmd(pair, *full)?),
        Command::SimpleEval { group, pair, module, at, hypothesis } => ("evaluation", simple_eval_cmd(&cfg, group, *pair, module.as_deref(), at, *hypothesis)?),
        Command::Linearize { element } => ("class-function", linearize_cmd(&cfg, element)?),
        Command::Verify { suites } => {
            let (v, ok) = verify_cmd(&cli.global, suites)?;
            if !ok {
                exit = EXIT_CRITERIA;
            }
            ("verify", v)
        }
    };
    let mut doc = Document::new(kind, &data)?;
    doc.config = Some(serde_json::to_value(&cfg)?);
    Ok(Outcome { doc, exit })
}

/// A group from a name, a constructor term, or a path to a group document.
pub fn resolve_group(cfg: &RunConfig, spec: &str) -> CliResult<GroupRef> {
    let g = if spec.ends_with(".json") || Path::new(spec).is_file() {
        read_payload::<GroupJson>(spec, "group")?.to_group()?
    } else {
        parse_group(spec)?
    };
    if g.order() > cfg.max_order {
        return Err(CoreError::Precondition(format!("|{}| = {} exceeds the order bound {}", g.name(), g.order(), cfg.max_order)).into());
    }
    Ok(Arc::new(g))
}

fn central_pair_json(m: &Mgg, i: usize) -> Value {
    let p = &m.pairs[i];
    json!({ "index": i, "order": p.k.order(), "pair": CentralPairJson::from_pair(p) })
}

fn pair_at(m: &Mgg, i: usize) -> CliResult<&CentralPair> {
    m.pairs.get(i).ok_or_else(|| usage(format!("pair index {i} out of range; M_G^G has {} pairs", m.len())))
}

fn group_cmd(cfg: &RunConfig, spec: &str) -> CliResult<Value> {
    let g = resolve_group(cfg, spec)?;
    let subgroups = g.subgroups();
    Ok(json!({
        "group": GroupJson::from_group(&g),
        "exponent": g.exponent(),
        "abelian": g.is_abelian(),
        "center": subgroup_json(&g.center()),
        "derived": subgroup_json(&g.derived()),
        "classes": g.conjugacy_classes(),
        "subgroups": subgroups.len(),
        "normal_subgroups": g.normal_subgroups().len(),
    }))
}

fn basis_cmd(cfg: &RunConfig, g: &str, h: &str) -> CliResult<Value> {
    let space = Space::new(resolve_group(cfg, g)?, resolve_group(cfg, h)?, cfg.n);
    let basis = standard_basis(&space)?;
    let pairs: Vec<PairJson> = basis.iter().map(|p| PairJson::from_pair(p)).collect();
    Ok(json!({ "count": pairs.len(), "pairs": pairs }))
}

fn product_cmd(cfg: &RunConfig, g: &str, h: &str, k: &str, x: &str, y: &str) -> CliResult<Value> {
    let (g, h, k) = (resolve_group(cfg, g)?, resolve_group(cfg, h)?, resolve_group(cfg, k)?);
    let (sx, sy, out) = (Space::new(g.clone(), h.clone(), cfg.n), Space::new(h, k.clone(), cfg.n), Space::new(g, k, cfg.n));
    let xe = read_payload::<ElementJson>(x, "element")?.to_element_in(&sx)?;
    let ye = read_payload::<ElementJson>(y, "element")?.to_element_in(&sy)?;
    Ok(serde_json::to_value(ElementJson::from_element(&xe.mul_into(&out, &ye)?))?)
}

fn idem_cmd(cfg: &RunConfig, group: &str, expansions: bool) -> CliResult<Value> {
    let g = resolve_group(cfg, group)?;
    let ring = cfg.ring_spec()?;
    let m = mgg_pairs(&g, cfg.n);
    let link = linkage_classes(&m)?;
    let cov = covering_algebra_report(&m, ring)?;
    let mut pairs = Vec::new();
    for i in 0..m.len() {
        let mut v = central_pair_json(&m, i);
        v["class"] = json!(link.class_of[i]);
        if expansions {
            v["e"] = serde_json::to_value(ElementJson::from_element(&m.e_element(i, ring)))?;
            v["f"] = serde_json::to_value(ElementJson::from_element(&m.f_element(i, ring)?))?;
        }
        pairs.push(v);
    }
    let blocks: Vec<Value> = cov.blocks.iter().map(|b| json!({ "members": b.members, "gamma_order": b.gamma_order, "dim": b.members.len() * b.members.len() * b.gamma_order })).collect();
    Ok(json!({
        "group": g.name(),
        "pairs": pairs,
        "linkage_classes": link.classes,
        "covering": { "dim": cov.dim, "block_sum": cov.block_sum, "blocks": blocks },
    }))
}

fn linkage_cmd(cfg: &RunConfig, g: &str, h: &str) -> CliResult<Value> {
    let (g, h) = (resolve_group(cfg, g)?, resolve_group(cfg, h)?);
    let (mg, mh) = (mgg_pairs(&g, cfg.n), mgg_pairs(&h, cfg.n));
    let mut out = Vec::new();
    for i in 0..mg.len() {
        for j in 0..mh.len() {
            if !linked(&mg, i, &mh, j)? {
                continue;
            }
            // The cohomological criterion has its own preconditions.
            let coh = linkage_via_cohomology(&g, &mg.pairs[i], &h, &mh.pairs[j], cfg.n).ok().map(|c| c.linked);
            out.push(json!({ "left": central_pair_json(&mg, i), "right": central_pair_json(&mh, j), "cohomology": coh }));
        }
    }
    Ok(json!({ "g": g.name(), "h": h.name(), "linked": out }))
}

fn gamma_cmd(cfg: &RunConfig, group: &str, i: usize) -> CliResult<Value> {
    let g = resolve_group(cfg, group)?;
    let m = mgg_pairs(&g, cfg.n);
    pair_at(&m, i)?;
    let gamma = gamma_group(&m, i)?;
    let ses = ses_report(&m, i)?;
    let elements: Vec<PairJson> = gamma.elements.iter().map(|p| PairJson::from_pair(p)).collect();
    Ok(json!({
        "pair": central_pair_json(&m, i),
        "order": gamma.order(),
        "table": GroupJson::from_group(&gamma.table),
        "elements": elements,
        "ses": {
            "gamma_order": ses.gamma_order,
            "dual_order": ses.dual_order,
            "out_order": ses.out_order,
            "image_order": ses.image.len(),
            "iota_image_order": ses.iota_image_order,
            "iota_injective": ses.iota_injective,
            "iota_kernel_is_commutator_twists": ses.iota_kernel_is_commutator_twists,
            "kernel_is_iota_image": ses.kernel_is_iota_image,
            "order_identity": ses.order_identity,
            "split": ses.split,
            "notes": ses.notes,
        },
    }))
}

fn reduced_cmd(cfg: &RunConfig, group: &str) -> CliResult<Value> {
    let g = resolve_group(cfg, group)?;
    let cat = cfg.catalog(g.order().saturating_sub(1))?;
    let rep = reduced_pairs_bruteforce(&g, cfg.n, &cat)?;
    let hyp_ok = (cfg.n as usize).is_multiple_of(g.order());
    let mut entries = Vec::new();
    for e in &rep.entries {
        let hyp = if hyp_ok && e.necessary { reduced_criterion_hypothesis(&g, &e.pair.k, &e.pair.kappa, cfg.n).ok() } else { None };
        entries.push(json!({
            "pair": CentralPairJson::from_pair(&e.pair),
            "order": e.pair.k.order(),
            "reduced": e.reduced,
            "witness": e.witness.as_ref().map(PairJson::from_pair),
            "necessary": e.necessary,
            "sufficient": e.sufficient,
            "gap": e.is_gap(),
            "hypothesis": hyp,
        }));
    }
    Ok(json!({
        "group": g.name(),
        "catalog_complete": rep.catalog_complete,
        "provenance": provenance(fibrum_core::simp::ReducedBy::Search { complete: rep.catalog_complete }),
        "entries": entries,
    }))
}

fn squeeze_cmd(cfg: &RunConfig, group: &str, i: usize) -> CliResult<Value> {
    let g = resolve_group(cfg, group)?;
    let m = mgg_pairs(&g, cfg.n);
    let p = pair_at(&m, i)?.clone();
    let sq = squeeze(&g, &p.k, &p.kappa, cfg.n)?;
    Ok(json!({
        "pair": central_pair_json(&m, i),
        "quotient": GroupJson::from_group(&sq.quotient),
        "k_tilde": subgroup_json(&sq.k_tilde),
        "g_tilde": GroupJson::from_group(&sq.g_tilde),
        "k_tilde_in_g_tilde": subgroup_json(&sq.kt_in_gt),
        "kappa_tilde": sq.kappa_tilde().vals,
        "ins": PairJson::from_pair(&sq.ins),
        "del": PairJson::from_pair(&sq.del()),
        "log": sq.log,
    }))
}

fn decompose_cmd(path: &str, full: bool) -> CliResult<Value> {
    let p = read_payload::<PairJson>(path, "pair")?.to_pair()?;
    let ring = fibrum_core::ring::RingSpec::Z;
    let named: Vec<(&str, FiberPair)> = if full {
        let d = full_decomposition(&p)?;
        vec![("ind", d.ind), ("inf", d.inf), ("ins", d.ins), ("middle", d.middle), ("del", d.del), ("def", d.def), ("res", d.res)]
    } else {
        let d = decompose_standard(&p)?;
        vec![("ind", d.ind), ("inf", d.inf), ("middle", d.middle), ("def", d.def), ("res", d.res)]
    };
    let refs: Vec<&FiberPair> = named.iter().map(|(_, f)| f).collect();
    let prod = product_of(&refs, ring)?.rehome(&p.space)?;
    if prod != FiberedElement::from_pair(&p, ring) {
        return Err(CoreError::Internal("factors do not reassemble the pair".into()).into());
    }
    let factors: Vec<Value> = named.iter().map(|(n, f)| json!({ "name": n, "pair": PairJson::from_pair(f) })).collect();
    Ok(json!({ "factors": factors, "reassembles": true }))
}

fn simple_eval_cmd(cfg: &RunConfig, group: &str, i: usize, module: Option<&str>, at: &[String], hypothesis: bool) -> CliResult<Value> {
    let g = resolve_group(cfg, group)?;
    let m = mgg_pairs(&g, cfg.n);
    let pair = pair_at(&m, i)?.clone();
    let gamma = gamma_group(&m, i)?;
    let module = match module {
        Some(path) => read_payload::<ModuleJson>(path, "module")?.to_module(),
        None => {
            let p = cfg.p.unwrap_or_else(|| default_prime(gamma.table.exponent(), gamma.order() as u64, g.order() as u64, cfg.n));
            GammaModule::trivial(&gamma.table, p)
        }
    };
    let cat = cfg.catalog(g.order().saturating_sub(1))?;
    let q = Quadruple::new(&g, cfg.n, &pair.k, &pair.kappa, module, if hypothesis { None } else { Some(&cat) })?;
    let tests: Vec<GroupRef> = if at.is_empty() { cfg.catalog(g.order())?.groups } else { at.iter().map(|s| resolve_group(cfg, s)).collect::<CliResult<_>>()? };
    let mut evals = Vec::new();
    for h in &tests {
        evals.push(json!({ "group": h.name(), "order": h.order(), "dim": simple_evaluation_bounded(&q, h, cfg.eval_bound)? }));
    }
    Ok(json!({
        "quadruple": {
            "group": g.name(),
            "pair": central_pair_json(&m, i),
            "gamma_order": gamma.order(),
            "module": ModuleJson::from_module(&q.module),
            "reduced_by": provenance(q.reduced_by),
        },
        "evaluations": evals,
    }))
}

fn linearize_cmd(cfg: &RunConfig, path: &str) -> CliResult<Value> {
    let x = read_payload::<ElementJson>(path, "element")?.to_element()?;
    let g = x.space.g.clone();
    let field = match cfg.p {
        Some(p) => CharField::new(p, x.space.n)?,
        None => CharField::least(g.exponent(), x.space.n),
    };
    let chi = linearize(&x, &field)?;
    Ok(json!({
        "group": g.name(),
        "p": field.p,
        "zeta": field.zeta,
        "classes": g.conjugacy_classes(),
        "values": chi.values,
        "degree": chi.degree(),
    }))
}

fn verify_cmd(global: &GlobalArgs, suites: &[String]) -> CliResult<(Value, bool)> {
    let chosen: Vec<&'static Criterion> = if suites.is_empty() {
        CRITERIA.iter().collect()
    } else {
        suites.iter().map(|s| criterion_by_slug(s).ok_or_else(|| usage(format!("unknown suite '{s}'; known: {}", CRITERIA.iter().map(|c| c.slug).collect::<Vec<_>>().join(", "))))).collect::<CliResult<_>>()?
    };
    let opts = VerifyOptions { max_order: global.max_order, moduli: global.n.map(|n| vec![n]), seed: global.seed };
    let reports = run_many(&chosen, &opts);
    let ok = reports.iter().all(|r| r.passed);
    Ok((json!({ "passed": ok, "criteria": reports }), ok))
}

/// Renders a document as aligned text: scalar fields as `key: value`,
/// arrays of objects as tables, anything else as compact JSON.
pub fn render_text(doc: &Document) -> String {
    let mut out = format!("{} ({})\n", doc.kind, doc.schema);
    if let Some(Value::Object(c)) = &doc.config {
        let parts: Vec<String> = c.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect();
        out.push_str(&format!("config: {}\n", parts.join(" ")));
    }
    render_value(&doc.data, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn render_value(v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            for (k, v) in map {
                match v {
                    Value::Array(items) if !items.is_empty() && items.iter().all(Value::is_object) => {
                        out.push_str(&format!("{k}:\n"));
                        render_table(items, out);
                    }
                    _ => out.push_str(&format!("{k:width$}  {}\n", scalar(v))),
                }
            }
        }
        Value::Array(items) if items.iter().all(Value::is_object) => render_table(items, out),
        other => {
            out.push_str(&scalar(other));
            out.push('\n');
        }
    }
}

fn render_table(items: &[Value], out: &mut String) {
    let mut cols: Vec<String> = Vec::new();
    for it in items {
        for k in it.as_object().into_iter().flat_map(|m| m.keys()) {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let rows: Vec<Vec<String>> = items.iter().map(|it| cols.iter().map(|c| it.get(c).map_or_else(|| "-".into(), scalar)).collect()).collect();
    let widths: Vec<usize> = cols.iter().enumerate().map(|(i, c)| rows.iter().map(|r| r[i].chars().count()).chain([c.chars().count()]).max().unwrap_or(0)).collect();
    let line = |cells: &[String]| cells.iter().zip(&widths).map(|(c, w)| format!("{c:w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string();
    out.push_str(&format!("  {}\n", line(&cols)));
    for r in &rows {
        out.push_str(&format!("  {}\n", line(r)));
    }
}
