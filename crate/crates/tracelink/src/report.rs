//! Output files. Data files carry no timestamps, so identical inputs give
//! identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use tracelink_core::embedding::write_vectors;
use tracelink_core::evaluation::EvalReport;
use tracelink_core::fmt::g17;
use tracelink_core::pipeline::Outcome;
use tracelink_core::rerank::final_links;
use tracelink_core::similarity::ta_ta_matrix;
use tracelink_core::stats::StatResult;
use tracelink_core::{Error as CoreError, RewardConfig};

use crate::error::Result;
use crate::experiment::{Ablation, Backend, GridResult, Prepared, RunSpec};
use crate::io::{create_dir, write_text};
use crate::ENGINE_VERSION;

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "null".to_string(), g17)
}

/// Report JSON with a fixed key order and 17-significant-digit floats.
pub fn report_json(dataset: &str, backend: &str, cfg: &RewardConfig, report: &EvalReport) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"dataset\": {},", quote(dataset));
    let _ = writeln!(s, "  \"backend\": {},", quote(backend));
    let _ = writeln!(s, "  \"k1\": {},", g17(cfg.k1));
    let _ = writeln!(s, "  \"k2\": {},", g17(cfg.k2));
    let _ = writeln!(s, "  \"rewarding\": {},", cfg.rewarding_enabled);
    let _ = writeln!(s, "  \"map\": {},", g17(report.map));
    let _ = writeln!(s, "  \"precision\": {},", g17(report.precision));
    let _ = writeln!(s, "  \"recall\": {},", g17(report.recall));
    let _ = writeln!(s, "  \"f1\": {},", g17(report.f1));
    let _ = writeln!(s, "  \"f2\": {},", g17(report.f2));
    let curve: Vec<String> = report.pr_curve.iter().map(|&p| g17(p)).collect();
    let _ = writeln!(s, "  \"pr_curve\": [{}],", curve.join(", "));
    s.push_str("  \"per_sa\": {");
    for (i, (id, m)) in report.per_sa.iter().enumerate() {
        s.push_str(if i == 0 { "\n" } else { ",\n" });
        let _ = write!(
            s,
            "    {}: {{\"ap\": {}, \"precision\": {}, \"recall\": {}}}",
            quote(id),
            opt(m.ap),
            g17(m.precision_at_k),
            opt(m.recall_at_k)
        );
    }
    s.push_str(if report.per_sa.is_empty() { "}\n}\n" } else { "\n  }\n}\n" });
    s
}

/// `source_id<TAB>target_id<TAB>score<TAB>rank`, rank starting at 1.
pub fn links_tsv(outcome: &Outcome, cfg: &RewardConfig) -> String {
    let mut s = String::new();
    for (sa, list) in &outcome.lists {
        for (i, e) in final_links(list, cfg).iter().enumerate() {
            let _ = writeln!(s, "{sa}\t{}\t{}\t{}", e.id, g17(e.score), i + 1);
        }
    }
    s
}

pub fn grid_csv(grid: &GridResult) -> String {
    let mut s = String::from("k1,k2,map\n");
    for c in &grid.cells {
        let _ = writeln!(s, "{},{},{}", g17(c.k1), g17(c.k2), g17(c.map));
    }
    s
}

pub fn best_json(grid: &GridResult) -> String {
    format!(
        "{{\n  \"k1\": {},\n  \"k2\": {},\n  \"map\": {},\n  \"step\": {},\n  \"cells\": {}\n}}\n",
        g17(grid.best.k1),
        g17(grid.best.k2),
        g17(grid.best.map),
        g17(grid.step),
        grid.cells.len()
    )
}

/// Comparison of the two precision-at-recall curves. A Wilcoxon test with
/// too few non-zero differences is written as `"degenerate": true` with a
/// null p-value.
pub fn stats_json(map_with: f64, map_without: f64, stats: &StatResult) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"map_with\": {},", g17(map_with));
    let _ = writeln!(s, "  \"map_without\": {},", g17(map_without));
    let _ = writeln!(s, "  \"n\": {},", stats.n);
    match &stats.wilcoxon {
        Ok(w) => {
            let _ = writeln!(s, "  \"degenerate\": false,");
            let _ = writeln!(s, "  \"nonzero_pairs\": {},", w.n);
            let _ = writeln!(s, "  \"w_plus\": {},", g17(w.w_plus));
            let _ = writeln!(s, "  \"w_minus\": {},", g17(w.w_minus));
            let _ = writeln!(s, "  \"exact\": {},", w.exact);
            let _ = writeln!(s, "  \"p_value\": {},", g17(w.p_value));
        }
        Err(e) => {
            let found = match e {
                CoreError::TooFewPairs { found, .. } => *found,
                _ => 0,
            };
            let _ = writeln!(s, "  \"degenerate\": true,");
            let _ = writeln!(s, "  \"degenerate_reason\": {},", quote(&e.to_string()));
            let _ = writeln!(s, "  \"nonzero_pairs\": {found},");
            let _ = writeln!(s, "  \"p_value\": null,");
        }
    }
    let _ = writeln!(s, "  \"cliffs_delta\": {},", g17(stats.cliffs.delta));
    let _ = writeln!(s, "  \"magnitude\": {}", quote(stats.cliffs.magnitude.as_str()));
    s.push_str("}\n");
    s
}

fn backend_json(backend: &Backend) -> Value {
    match backend {
        Backend::Tfidf => json!({ "name": "tfidf" }),
        Backend::Lsi { rank } => json!({ "name": "lsi", "rank": rank }),
        Backend::WordVec { table } => json!({ "name": "wordvec", "table": table.display().to_string() }),
        Backend::Vectors { sources, targets } => json!({
            "name": "vectors",
            "sources": sources.display().to_string(),
            "targets": targets.display().to_string(),
        }),
    }
}

/// The run configuration and engine version.
pub fn manifest_json(spec: &RunSpec, command: &str, extra: Value) -> String {
    let p = &spec.paths;
    let r = &spec.reward;
    let mut v = json!({
        "engine": ENGINE_VERSION,
        "command": command,
        "dataset": spec.dataset,
        "paths": {
            "sources": p.sources.display().to_string(),
            "targets": p.targets.display().to_string(),
            "answers": p.answers.display().to_string(),
        },
        "backend": backend_json(&spec.backend),
        "stem": spec.stem,
        "reward": {
            "k1": r.k1,
            "k2": r.k2,
            "rewarding": r.rewarding_enabled,
            "top_k": r.top_k.to_string(),
            "log_base": r.log_base.to_string(),
        },
        "dump": spec.dump,
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    let mut s = serde_json::to_string_pretty(&v).expect("json value serialization cannot fail");
    s.push('\n');
    s
}

pub fn write_trace_outputs(dir: &Path, spec: &RunSpec, prepared: &Prepared, outcome: &Outcome) -> Result<()> {
    create_dir(dir)?;
    let cfg = &spec.reward;
    write_text(&dir.join("links.tsv"), &links_tsv(outcome, cfg))?;
    write_text(
        &dir.join("report.json"),
        &report_json(&spec.dataset, spec.backend.name(), cfg, &outcome.report),
    )?;
    write_text(&dir.join("rewards.csv"), &outcome.trace.to_csv())?;
    let lsi = prepared.lsi().map(|i| {
        json!({
            "requested_rank": i.requested_rank,
            "numerical_rank": i.numerical_rank,
            "effective_rank": i.effective_rank,
        })
    });
    write_text(&dir.join("manifest.json"), &manifest_json(spec, "trace", json!({ "lsi": lsi })))?;
    if spec.dump {
        write_dumps(dir, prepared, cfg)?;
    }
    Ok(())
}

fn write_dumps(dir: &Path, prepared: &Prepared, cfg: &RewardConfig) -> Result<()> {
    let emb = &prepared.embedding;
    write_text(&dir.join("sa_ta.csv"), &prepared.ranking.sa_ta.to_csv())?;
    write_text(&dir.join("ta_ta.csv"), &ta_ta_matrix(&emb.targets).to_csv())?;
    let mut counts = String::from("ta_id,count\n");
    for (id, c) in prepared.ranking.count_table(cfg).iter() {
        let _ = writeln!(counts, "{id},{c}");
    }
    write_text(&dir.join("counts.csv"), &counts)?;
    write_text(&dir.join("sources.vec"), &write_vectors(&emb.sources))?;
    write_text(&dir.join("targets.vec"), &write_vectors(&emb.targets))?;
    Ok(())
}

pub fn write_grid_outputs(dir: &Path, spec: &RunSpec, grid: &GridResult) -> Result<()> {
    create_dir(dir)?;
    write_text(&dir.join("grid.csv"), &grid_csv(grid))?;
    write_text(&dir.join("best.json"), &best_json(grid))?;
    write_text(
        &dir.join("manifest.json"),
        &manifest_json(spec, "grid", json!({ "step": grid.step })),
    )
}

pub fn write_ablation_outputs(dir: &Path, spec: &RunSpec, ab: &Ablation) -> Result<()> {
    create_dir(dir)?;
    let with_cfg = RewardConfig {
        rewarding_enabled: true,
        ..spec.reward
    };
    let name = spec.backend.name();
    write_text(
        &dir.join("with.json"),
        &report_json(&spec.dataset, name, &with_cfg, &ab.with.report),
    )?;
    write_text(
        &dir.join("without.json"),
        &report_json(&spec.dataset, name, &spec.reward.disabled(), &ab.without.report),
    )?;
    write_text(
        &dir.join("stats.json"),
        &stats_json(ab.with.report.map, ab.without.report.map, &ab.stats),
    )?;
    write_text(&dir.join("manifest.json"), &manifest_json(spec, "ablate", json!({})))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use tracelink_core::evaluation::SourceMetrics;

    fn report() -> EvalReport {
        let mut per_sa = BTreeMap::new();
        per_sa.insert(
            "UC1".to_string(),
            SourceMetrics {
                ap: Some(0.5),
                precision_at_k: 0.25,
                recall_at_k: Some(1.0),
            },
        );
        per_sa.insert(
            "UC2".to_string(),
            SourceMetrics {
                ap: None,
                precision_at_k: 0.0,
                recall_at_k: None,
            },
        );
        EvalReport {
            per_sa,
            map: 0.5,
            precision: 0.1,
            recall: 1.0,
            f1: 2.0 / 11.0,
            f2: 0.1,
            pr_curve: [0.5; 10],
        }
    }

    #[test]
    fn report_key_order_and_validity() {
        let text = report_json("demo", "tfidf", &RewardConfig::default(), &report());
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["per_sa"]["UC2"]["ap"], Value::Null);
        assert_eq!(v["precision"].as_f64(), Some(0.1));
        assert!(text.contains("\"precision\": 0.10000000000000001"));
        let keys = [
            "dataset", "backend", "k1", "k2", "rewarding", "map", "precision", "recall", "f1", "f2",
            "pr_curve", "per_sa",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(&format!("\"{k}\":")).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_per_sa_is_valid_json() {
        let mut r = report();
        r.per_sa.clear();
        let text = report_json("d", "lsi", &RewardConfig::default(), &r);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert!(v["per_sa"].as_object().unwrap().is_empty());
    }

    #[test]
    fn dataset_names_are_escaped() {
        let text = report_json("a \"b\"\n", "tfidf", &RewardConfig::default(), &report());
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["dataset"], "a \"b\"\n");
    }
}
