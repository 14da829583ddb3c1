//! CSV, JSON and gnuplot data files for grid reports.
//!
//! Output files (all written atomically):
//! - `grid_runs.csv`: one row per run with set scores, word-wise R^2 and
//!   normalized robustness (`rob_*`, empty when not measured).
//! - `grid_cells.csv`: one row per (mu, sigma) cell with replicate means and
//!   sample standard deviations.
//! - `robustness.csv`: one row per metric, averaged over all runs.
//! - `grid.json`: the whole report, plus a caller-supplied manifest.
//! - `skew_vs_mu.dat`, `stereotype_vs_sigma.dat`: two-column blocks, one per
//!   fixed sigma (resp. mu), separated by two blank lines.
//! - `wordwise_<metric>.dat`: planted `2p - 1` against the word score for the
//!   first run.
//! - `robustness.dat`: metric index against normalized robustness.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::embedding_io::write_atomically;
use crate::error::{Error, Result};
use crate::synth::grid::{GridReport, Metric};

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::io("flushing csv", e.into_error()))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomically(path, |w| w.write_all(bytes))
}

pub fn runs_csv(report: &GridReport) -> Result<Vec<u8>> {
    let mut header: Vec<String> = ["mu", "sigma", "replicate", "seed"].map(String::from).to_vec();
    header.extend(Metric::ALL.iter().map(|m| m.name().to_owned()));
    header.extend(["r2_weat", "r2_mac", "r2_direct_bias", "r2_same"].map(String::from));
    header.extend(Metric::ALL.iter().map(|m| format!("rob_{}", m.name())));
    let rows: Vec<Vec<String>> = report
        .runs
        .iter()
        .map(|r| {
            let mut row = vec![
                r.mu.to_string(),
                r.sigma.to_string(),
                r.replicate.to_string(),
                r.seed.to_string(),
            ];
            row.extend(r.scores.iter().map(|s| num(*s)));
            row.extend(
                [r.r_squared.weat, r.r_squared.mac, r.r_squared.direct_bias, r.r_squared.same].map(|x| x.to_string()),
            );
            row.extend(Metric::ALL.iter().map(|&m| num(r.robustness.as_ref().and_then(|rob| rob.get(m)))));
            row
        })
        .collect();
    csv_bytes(&header, &rows)
}

pub fn cells_csv(report: &GridReport) -> Result<Vec<u8>> {
    let mut header: Vec<String> = ["mu", "sigma", "runs"].map(String::from).to_vec();
    header.extend(Metric::ALL.iter().map(|m| format!("mean_{}", m.name())));
    header.extend(Metric::ALL.iter().map(|m| format!("std_{}", m.name())));
    header.extend(["mean_r2_weat", "mean_r2_mac", "mean_r2_direct_bias", "mean_r2_same"].map(String::from));
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            let mut row = vec![c.mu.to_string(), c.sigma.to_string(), c.runs.to_string()];
            row.extend(c.mean.iter().map(|v| num(*v)));
            row.extend(c.std.iter().map(|v| num(*v)));
            row.extend(c.mean_r_squared.iter().map(|v| v.to_string()));
            row
        })
        .collect();
    csv_bytes(&header, &rows)
}

pub fn robustness_csv(report: &GridReport) -> Result<Vec<u8>> {
    let summary = report.robustness_summary();
    let header = ["metric", "interval_width", "normalized_mean_abs_diff", "weat_ratio"].map(String::from);
    let weat = summary[Metric::Weat as usize];
    let rows: Vec<Vec<String>> = Metric::ALL
        .iter()
        .map(|&m| {
            let v = summary[m as usize];
            let ratio = match (weat, v) {
                (Some(w), Some(x)) if x > 0.0 => Some(w / x),
                _ => None,
            };
            vec![m.name().to_owned(), m.interval_width().to_string(), num(v), num(ratio)]
        })
        .collect();
    csv_bytes(&header, &rows)
}

/// Canonical JSON (sorted keys) of the report with `manifest` embedded.
pub fn report_json(report: &GridReport, manifest: &Value) -> Result<String> {
    let mut value = serde_json::to_value(report)?;
    if let Value::Object(map) = &mut value {
        map.insert("manifest".into(), manifest.clone());
        let rob: serde_json::Map<String, Value> = Metric::ALL
            .iter()
            .zip(report.robustness_summary())
            .map(|(m, v)| (m.name().to_owned(), serde_json::to_value(v).unwrap_or(Value::Null)))
            .collect();
        map.insert("robustness_summary".into(), Value::Object(rob));
    }
    Ok(serde_json::to_string_pretty(&value)?)
}

fn series_blocks<F>(outer: &[f64], inner: &[f64], label: &str, value: F) -> String
where
    F: Fn(f64, f64) -> Option<(f64, f64)>,
{
    let mut out = String::new();
    for (i, &o) in outer.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# {label}={o}");
        for &x in inner {
            if let Some((a, b)) = value(o, x) {
                let _ = writeln!(out, "{a} {b}");
            }
        }
    }
    out
}

/// Writes every report file into `dir` and returns the paths written.
pub fn write_grid_outputs(report: &GridReport, dir: &Path, manifest: &Value) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        write_bytes(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    put("grid_runs.csv", &runs_csv(report)?)?;
    put("grid_cells.csv", &cells_csv(report)?)?;
    put("robustness.csv", &robustness_csv(report)?)?;
    put("grid.json", format!("{}\n", report_json(report, manifest)?).as_bytes())?;

    let skew = series_blocks(&report.sigma_grid, &report.mu_grid, "sigma", |sigma, mu| {
        Some((mu, report.cell(mu, sigma)?.mean[Metric::Skew as usize]?))
    });
    put("skew_vs_mu.dat", skew.as_bytes())?;
    let stereo = series_blocks(&report.mu_grid, &report.sigma_grid, "mu", |mu, sigma| {
        Some((sigma, report.cell(mu, sigma)?.mean[Metric::Stereotype as usize]?))
    });
    put("stereotype_vs_sigma.dat", stereo.as_bytes())?;

    if let Some(words) = &report.first_run_words {
        for (name, scores) in [
            ("weat_association", &words.weat_association),
            ("mac", &words.mac),
            ("direct_bias", &words.direct_bias),
            ("same", &words.same),
        ] {
            let mut out = format!("# planted_2p_minus_1 {name}\n");
            for (t, s) in words.truth.iter().zip(scores) {
                let _ = writeln!(out, "{t} {s}");
            }
            put(&format!("wordwise_{name}.dat"), out.as_bytes())?;
        }
    }

    let mut rob = String::from("# metric_index normalized_mean_abs_diff (0=weat 1=mac 2=direct_bias 3=same 4=skew 5=stereotype)\n");
    for (i, v) in report.robustness_summary().iter().enumerate() {
        if let Some(v) = v {
            let _ = writeln!(rob, "{i} {v}");
        }
    }
    put("robustness.dat", rob.as_bytes())?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::grid::{grid_run, GridOptions};
    use crate::synth::SynthConfig;

    #[test]
    fn outputs_are_deterministic() {
        let base = SynthConfig { n_words: 20, noise: 0.05, ..SynthConfig::default() };
        let opts = GridOptions { replicates: 2, robustness_iterations: 3 };
        let report = grid_run(&[0.4, 0.6], &[0.1, 0.2], &base, opts).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let files = write_grid_outputs(&report, a.path(), &Value::Null).unwrap();
        write_grid_outputs(&grid_run(&[0.4, 0.6], &[0.1, 0.2], &base, opts).unwrap(), b.path(), &Value::Null).unwrap();
        for f in &files {
            let name = f.file_name().unwrap();
            assert_eq!(std::fs::read(f).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name:?}");
        }
        let runs = std::fs::read_to_string(a.path().join("grid_runs.csv")).unwrap();
        assert_eq!(runs.lines().count(), 1 + 8);
        let cells = std::fs::read_to_string(a.path().join("grid_cells.csv")).unwrap();
        assert_eq!(cells.lines().count(), 1 + 4);
        let skew = std::fs::read_to_string(a.path().join("skew_vs_mu.dat")).unwrap();
        assert!(skew.starts_with("# sigma=0.1\n0.4 "));
    }
}
