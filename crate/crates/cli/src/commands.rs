use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use kwise_core::constructions::{
    balanced_linked_cubes_size, janzer_size, linked_cubes_size, pair_of_cubes_size, reference_bounds,
    series_k_minus_one_size, series_of_cubes_size,
};
use kwise_core::disjointness::{
    audit_lemma_size_premises, build_bipartite, build_graph, f_xy, min_bipartization, stability_stats,
    BipartizationMethod,
};
use kwise_core::generator::{coverage, is_generator};
use kwise_core::kwise::min_empty_intersection;
use kwise_core::ratio::format_rational;
use kwise_core::search::{audit_claim_counts, search_min, SearchConfig};
use kwise_core::{
    addable_witness, is_k_wise_intersecting, linked_cubes, maximal_closure, pair_of_cubes,
    series_of_cubes, KwiseMode, Mask, Partition, Rational, SetFamily,
};
use serde_json::{json, Value};

use crate::ledger::{sha256_hex, timestamp_now, LedgerRecord, Sink, INLINE_MAX_N, SCHEMA_VERSION};
use crate::report::build_report;
use crate::{
    AuditArgs, BipartizeMode, Cli, Command, ConstructArgs, ConstructKind, CoverageArgs, DisjointnessArgs, Elements,
    FamilyArgs, SearchArgs, StatsArgs,
};

type Params = BTreeMap<String, Value>;

fn rat(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn load_family(n: usize, spec: &str) -> Result<SetFamily> {
    let hex = match spec.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading family file {path}"))?,
        None => spec.to_string(),
    };
    Ok(SetFamily::from_hex(n, hex.trim())?)
}

/// Input families are keyed by content, inline when small.
fn family_param(f: &SetFamily) -> Value {
    let hex = f.to_hex();
    if f.n() <= INLINE_MAX_N {
        Value::String(hex)
    } else {
        Value::String(format!("sha256:{}", sha256_hex(hex.as_bytes())))
    }
}

fn default_s(n: usize, s: &Option<Elements>) -> Vec<usize> {
    s.as_ref().map_or_else(|| (1..=n / 2).collect(), |e| e.0.clone())
}

fn optional<T: Into<Value>>(r: kwise_core::Result<T>) -> Value {
    r.map(Into::into).unwrap_or(Value::Null)
}

pub(crate) fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let sink = Sink { out: cli.out.clone() };
    let mut params = Params::new();
    let (name, result) = match &cli.command {
        Command::Check(a) => ("check", check(a, &mut params)?),
        Command::Closure(a) => ("closure", closure(a, &sink, &mut params)?),
        Command::Construct(a) => ("construct", construct(a, &sink, &mut params)?),
        Command::GenCoverage(a) => ("gen-coverage", gen_coverage(a, &mut params)?),
        Command::Disjointness(a) => ("disjointness", disjointness(a, cli.seed, &sink, &mut params)?),
        Command::Stats(a) => ("stats", stats(a, &mut params)?),
        Command::SearchMin(a) => ("search-min", search(a, cli.no_timestamp, &mut params)?),
        Command::Audit(a) => ("audit", audit(a, &mut params)?),
        Command::Report(a) => {
            params.insert("ledger".into(), json!(a.ledger.display().to_string()));
            params.insert("tables_dir".into(), json!(a.tables_dir.display().to_string()));
            let summary = build_report(&a.ledger, &a.tables_dir)?;
            ("report", serde_json::to_value(summary)?)
        }
    };
    let record = LedgerRecord {
        schema_version: SCHEMA_VERSION,
        command: name.to_string(),
        params,
        result,
        seed: cli.seed,
        timestamp: (!cli.no_timestamp).then(timestamp_now),
    };
    sink.append(&record, stdout)
}

fn family_params(a: &FamilyArgs, f: &SetFamily, p: &mut Params) {
    p.insert("n".into(), json!(a.n));
    p.insert("k".into(), json!(a.k));
    p.insert("mode".into(), json!(a.mode.as_str()));
    p.insert("family".into(), family_param(f));
}

fn verdicts(f: &SetFamily, k: usize, mode: KwiseMode) -> Result<Value> {
    let kwise = is_k_wise_intersecting(f, k, mode)?;
    let witness = if kwise { addable_witness(f, k, mode)? } else { None };
    let witness_mask = witness.map(|m| Mask::new(m, f.n())).transpose()?;
    let revalidated = match witness {
        Some(m) => {
            let mut grown = f.clone();
            grown.insert(m);
            Some(is_k_wise_intersecting(&grown, k, mode)?)
        }
        None => None,
    };
    Ok(json!({
        "size": f.len(),
        "kwise": kwise,
        "maximal": kwise && witness.is_none(),
        "addable_witness": witness_mask.map(|m| m.to_string()),
        "witness_revalidated": revalidated,
        "min_empty_intersection": min_empty_intersection(f, f.len().max(k)),
    }))
}

fn check(a: &FamilyArgs, p: &mut Params) -> Result<Value> {
    let f = load_family(a.n, &a.family)?;
    family_params(a, &f, p);
    verdicts(&f, a.k, a.mode)
}

fn closure(a: &FamilyArgs, sink: &Sink, p: &mut Params) -> Result<Value> {
    let f = load_family(a.n, &a.family)?;
    family_params(a, &f, p);
    let closed = maximal_closure(&f, a.k, a.mode)?;
    Ok(json!({
        "size_before": f.len(),
        "size_after": closed.len(),
        "family": sink.family_value(&closed)?,
    }))
}

fn construct(a: &ConstructArgs, sink: &Sink, p: &mut Params) -> Result<Value> {
    let n = a.n;
    p.insert("kind".into(), json!(a.kind.name()));
    p.insert("n".into(), json!(n));
    let (family, mut result) = match a.kind {
        ConstructKind::LinkedCubes | ConstructKind::PairOfCubes => {
            let elems = default_s(n, &a.s);
            let s = Mask::from_elements(n, &elems)?;
            p.insert("s".into(), json!(s.to_string()));
            let (f, formula) = if a.kind == ConstructKind::LinkedCubes {
                (linked_cubes(n, s)?, linked_cubes_size(n, s.len())?)
            } else {
                (pair_of_cubes(n, s)?, pair_of_cubes_size(n, s.len())?)
            };
            let balanced = s.len() == n / 2 || s.len() == n.div_ceil(2);
            let r = json!({"construction": a.kind.name(), "n": n, "s": s.to_string(), "balanced": balanced,
                "size": f.len(), "formula": formula as u64});
            (f, r)
        }
        ConstructKind::SeriesOfCubes => {
            let part = match (&a.partition, a.k) {
                (Some(text), _) => Partition::parse(n, text)?,
                (None, Some(k)) => Partition::balanced(n, k)?,
                (None, None) => bail!("series-of-cubes needs --k or --partition"),
            };
            p.insert("partition".into(), json!(part.to_string()));
            let f = series_of_cubes(&part)?;
            let formula = if part.is_balanced() {
                optional(series_of_cubes_size(n, part.blocks().len()).map(|v| v as u64))
            } else {
                Value::Null
            };
            let r = json!({"construction": a.kind.name(), "n": n, "partition": part.to_string(),
                "balanced": part.is_balanced(), "size": f.len(), "formula": formula});
            (f, r)
        }
        ConstructKind::Bounds => {
            let Some(k) = a.k else { bail!("bounds needs --k") };
            p.insert("k".into(), json!(k));
            p.insert("c".into(), rat(&a.c));
            p.insert("d".into(), rat(&a.d));
            let refs = reference_bounds(n, k, a.c, a.d);
            return Ok(json!({
                "construction": "bounds",
                "n": n,
                "k": k,
                "linked_cubes_size": if k == 3 { optional(balanced_linked_cubes_size(n).map(|v| v as u64)) } else { Value::Null },
                "series_k_minus_one_size": optional(series_k_minus_one_size(n, k).map(|v| v as u64)),
                "janzer_size": optional(janzer_size(n, k).map(|v| v as u64)),
                "lower_reference": refs.as_ref().map(|r| rat(&r.0)).unwrap_or(Value::Null),
                "upper_reference": refs.as_ref().map(|r| rat(&r.1)).unwrap_or(Value::Null),
            }));
        }
    };
    result["family"] = sink.family_value(&family)?;
    if let Some(k) = a.check_k {
        p.insert("check_k".into(), json!(k));
        p.insert("mode".into(), json!(a.mode.as_str()));
        let v = verdicts(&family, k, a.mode)?;
        for key in ["kwise", "maximal", "addable_witness", "witness_revalidated"] {
            result[key] = v[key].clone();
        }
        result["check_k"] = json!(k);
    }
    Ok(result)
}

fn gen_coverage(a: &CoverageArgs, p: &mut Params) -> Result<Value> {
    let f = load_family(a.n, &a.family)?;
    p.insert("n".into(), json!(a.n));
    p.insert("k".into(), json!(a.k));
    p.insert("family".into(), family_param(&f));
    let cov = coverage(&f, a.k)?;
    let total = f.universe_size();
    let mut r = json!({"count": cov.count, "total": total, "uncovered": total - cov.count});
    if let Some(eps) = a.eps {
        p.insert("eps".into(), rat(&eps));
        r["generator"] = json!(is_generator(&f, a.k, eps)?);
    }
    Ok(r)
}

fn disjointness(a: &DisjointnessArgs, seed: u64, sink: &Sink, p: &mut Params) -> Result<Value> {
    let f = load_family(a.n, &a.family)?;
    p.insert("n".into(), json!(a.n));
    p.insert("family".into(), family_param(&f));
    let g = match &a.family2 {
        Some(spec) => {
            let f2 = load_family(a.n, spec)?;
            p.insert("family2".into(), family_param(&f2));
            build_bipartite(&f, &f2)?
        }
        None => build_graph(&f),
    };
    let mut r = json!({
        "vertices": g.left().len() + g.right().len(),
        "edges": g.edge_count(),
        "bipartite_build": g.is_bipartite_build(),
    });
    if let Some(path) = &a.edges {
        fs::write(path, g.edge_list_text()).with_context(|| format!("writing {}", path.display()))?;
        r["edges_file"] = json!(path.display().to_string());
    }
    if let Some(mode) = a.bipartize {
        let method = match mode {
            BipartizeMode::Exact => BipartizationMethod::Exact,
            BipartizeMode::Heuristic => {
                p.insert("max_moves".into(), json!(a.max_moves));
                BipartizationMethod::Heuristic { max_moves: a.max_moves, seed }
            }
        };
        p.insert("bipartize".into(), json!(format!("{mode:?}").to_lowercase()));
        let b = min_bipartization(&g, method)?;
        let (x, y) = b.classes(&g);
        r["bipartization"] = json!({
            "deleted_edges": b.deleted_edges,
            "cut_edges": b.cut_edges,
            "x": sink.family_value(&SetFamily::from_masks(a.n, x)?)?,
            "y": sink.family_value(&SetFamily::from_masks(a.n, y)?)?,
        });
    }
    Ok(r)
}

fn stats(a: &StatsArgs, p: &mut Params) -> Result<Value> {
    let x = load_family(a.n, &a.x)?;
    let y = load_family(a.n, &a.y)?;
    p.insert("n".into(), json!(a.n));
    p.insert("x".into(), family_param(&x));
    p.insert("y".into(), family_param(&y));
    p.insert("ell".into(), json!(a.ell));
    p.insert("elem".into(), json!(a.elem));
    p.insert("threshold".into(), rat(&a.threshold));
    let part = a.partition.as_deref().map(|t| Partition::parse(a.n, t)).transpose()?;
    if let Some(part) = &part {
        p.insert("partition".into(), json!(part.to_string()));
    }
    let s = stability_stats(&x, &y, a.ell, a.elem, part.as_ref(), a.threshold)?;
    let mut r = json!({
        "alpha": rat(&s.alpha),
        "beta": rat(&s.beta),
        "x": rat(&s.x),
        "y": rat(&s.y),
        "f_xy": rat(&f_xy(s.x, s.y)),
        "e_total": s.e_total,
        "e_n": s.e_n,
        "theta": rat(&s.theta),
        "phi": rat(&s.phi),
        "a": s.a.to_string(),
        "b": s.b.to_string(),
        "threshold_x": s.threshold_x.to_string(),
        "threshold_y": s.threshold_y.to_string(),
        "x_ratios": s.x_ratios.iter().map(rat).collect::<Vec<_>>(),
        "y_ratios": s.y_ratios.iter().map(rat).collect::<Vec<_>>(),
    });
    if let Some(slack) = a.slack {
        p.insert("slack".into(), rat(&slack));
        let audit = audit_lemma_size_premises(&x, &y, a.ell, a.elem, slack)?;
        r["premises"] = audit
            .premises
            .iter()
            .map(|q| {
                json!({"name": q.name, "ratio": rat(&q.ratio), "target": rat(&q.target),
                    "deviation": rat(&q.deviation), "within": q.within})
            })
            .collect();
        r["premises_within"] = json!(audit.all_within);
    }
    Ok(r)
}

fn search(a: &SearchArgs, no_timestamp: bool, p: &mut Params) -> Result<Value> {
    if !(a.budget.is_finite() && a.budget > 0.0) {
        bail!("budget must be a positive number of seconds");
    }
    p.insert("n".into(), json!(a.n));
    p.insert("k".into(), json!(a.k));
    p.insert("mode".into(), json!(a.mode.as_str()));
    p.insert("budget".into(), json!(a.budget));
    p.insert("symmetry".into(), json!(!a.no_symmetry));
    p.insert("all".into(), json!(a.all));
    let mut cfg = SearchConfig::new(a.n, a.k, a.mode);
    cfg.budget = Duration::from_secs_f64(a.budget);
    cfg.symmetry = !a.no_symmetry;
    cfg.enumerate_all = a.all;
    let r = search_min(&cfg)?;
    let mut out = json!({
        "n": r.n,
        "k": r.k,
        "mode": r.mode.as_str(),
        "f": r.f_value,
        "lower_bound": r.lower_bound,
        "optimal": r.optimal,
        "witnesses": r.witnesses.iter().map(SetFamily::to_hex).collect::<Vec<_>>(),
        "matched_linked_cubes": r.matched_linked_cubes,
        "all_linked_cubes": r.matched_linked_cubes.iter().all(|&b| b),
        "nodes": r.nodes_explored,
    });
    if !no_timestamp {
        out["seconds"] = json!(r.elapsed.as_secs_f64());
    }
    Ok(out)
}

fn audit(a: &AuditArgs, p: &mut Params) -> Result<Value> {
    let s = Mask::from_elements(a.n, &a.s.0)?;
    let f = match &a.family {
        Some(spec) => load_family(a.n, spec)?,
        None => linked_cubes(a.n, s)?,
    };
    p.insert("n".into(), json!(a.n));
    p.insert("s".into(), json!(s.to_string()));
    p.insert("eps".into(), rat(&a.eps));
    p.insert("family".into(), family_param(&f));
    let r = audit_claim_counts(&f, s, a.eps)?;
    Ok(json!({
        "n": r.n,
        "ell": r.ell,
        "family_size": r.family_size,
        "sym_diff": r.sym_diff,
        "g1": r.partition.g1.len(),
        "g2": r.partition.g2.len(),
        "g3": r.partition.g3.len(),
        "has_empty": r.partition.has_empty,
        "exact_cover": r.partition.exact_cover,
        "uncovered": r.uncovered,
        "injection_bound": rat(&r.injection_bound),
        "cube_bound": r.cube_bound as i64,
        "chain_lhs": r.chain_lhs as i64,
        "chain_closed_form": r.chain_closed_form as i64,
        "undecomposed": r.undecomposed,
        "images_g1_g2": r.images_g1_g2,
        "images_g3": r.images_g3,
        "hypotheses_met": r.hypotheses_met(),
        "unmet": r.unmet,
        "injection_holds": r.injection_holds,
        "cube_holds": r.cube_holds,
        "cube_equality": r.cube_equality,
        "chain_holds": r.chain_holds,
    }))
}
