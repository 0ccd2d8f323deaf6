use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

use super::experiment::{ExperimentKind, SweepConfig, SweepResult, Table};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// `v<crate version>`, or `EOS_GIT_DESCRIBE` when set at build time.
pub fn artifact_version() -> String {
    option_env!("EOS_GIT_DESCRIBE").map_or_else(|| format!("v{}", env!("CARGO_PKG_VERSION")), str::to_string)
}

/// SHA-256 of the config with output-only fields cleared, so the hash only
/// changes when the results could.
pub fn config_hash(cfg: &SweepConfig) -> Result<String> {
    let mut canonical = cfg.clone();
    canonical.out_path = PathBuf::new();
    canonical.parallelism = 1;
    canonical.emit_plot_script = false;
    let digest = Sha256::digest(serde_json::to_vec(&canonical)?);
    Ok(hex::encode(digest))
}

/// `<out>` with `suffix` appended to the file name.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    out.with_file_name(name)
}

pub(crate) fn write_all(cfg: &SweepConfig, table: Table) -> Result<SweepResult> {
    let csv_path = cfg.out_path.clone();
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;

    let all_passed = table.checks.iter().all(|c| c.pass);
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "artifact_version": artifact_version(),
        "experiment": cfg.experiment,
        "config_hash": config_hash(cfg)?,
        "seed": cfg.seed,
        "config": cfg,
        "csv": csv_path.file_name().map(|n| n.to_string_lossy().into_owned()),
        "rows": table.rows.len(),
        "failed_points": table.failures.len(),
        "checks": table.checks,
        "all_passed": all_passed,
    });
    let summary_path = sibling(&csv_path, ".summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)? + "\n")?;

    let plot_path = if cfg.emit_plot_script {
        let path = sibling(&csv_path, ".plot.py");
        std::fs::write(&path, plot_script(cfg.experiment, &csv_path))?;
        Some(path)
    } else {
        None
    };

    if !table.failures.is_empty() {
        let manifest = sibling(&csv_path, ".failures.json");
        std::fs::write(&manifest, serde_json::to_string_pretty(&table.failures)? + "\n")?;
        return Err(Error::SweepFailed { failed: table.failures.len(), manifest });
    }

    Ok(SweepResult {
        experiment: cfg.experiment,
        columns: table.columns,
        rows: table.rows,
        checks: table.checks,
        failures: table.failures,
        csv_path,
        summary_path,
        plot_path,
    })
}

/// A standalone matplotlib script that plots the sweep CSV next to it.
pub fn plot_script(kind: ExperimentKind, csv_path: &Path) -> String {
    let (x, y, group, logx, logy, ylabel) = match kind {
        ExperimentKind::SingleNeuronGapScaling => ("eta", "gap", "loss", true, true, "2/eta - y_inf^2"),
        ExperimentKind::SingleNeuronBounceCount => {
            ("eta", "bounce_iters", "loss", true, true, "iterations with eta*y^2 in [2, 3]")
        }
        ExperimentKind::MeanModelPhase => ("eta_over_threshold", "b_inf", "seed", false, false, "limiting bias"),
        ExperimentKind::ReluPhase => ("eta", "b_final", "seed", true, false, "final bias"),
        ExperimentKind::ReluVsMeanModel => {
            ("eta", "max_b_deviation", "seed", true, true, "max |b_network - b_mean_model|")
        }
    };
    let csv_name = csv_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let py_bool = |b: bool| if b { "True" } else { "False" };
    format!(
        r#"#!/usr/bin/env python3
# Plots {csv_name} ({kind}). Needs matplotlib.
import csv
import os
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
series = defaultdict(list)
with open(os.path.join(here, "{csv_name}"), newline="") as fh:
    for row in csv.DictReader(fh):
        try:
            series[row["{group}"]].append((float(row["{x}"]), float(row["{y}"])))
        except ValueError:
            pass

fig, ax = plt.subplots(figsize=(6, 4))
for name, pts in sorted(series.items()):
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", ms=3, label=name)
if {logx}:
    ax.set_xscale("log")
if {logy}:
    ax.set_yscale("log")
ax.set_xlabel("{x}")
ax.set_ylabel("{ylabel}")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(os.path.join(here, "{csv_name}.png"), dpi=150)
"#,
        logx = py_bool(logx),
        logy = py_bool(logy),
    )
}
