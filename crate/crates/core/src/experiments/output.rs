//! Sweep outputs: per-trial CSV, JSON summary and an SVG success-rate plot.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentSpec, SweepPoint, SweepResult, TrialRecord};
use crate::error::{HosError, Result};

/// Column order of the per-trial CSV.
pub const CSV_COLUMNS: [&str; 12] = [
    "experiment",
    "q",
    "N",
    "K",
    "trial",
    "seed_signal",
    "seed_operator",
    "seed_solver",
    "objective",
    "error",
    "success",
    "ms",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub package_version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub base_seed: u64,
    pub derivation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialFailure {
    #[serde(rename = "K")]
    pub k: usize,
    pub trial: usize,
    pub cause: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub spec: ExperimentSpec,
    pub table: Vec<SweepPoint>,
    pub environment: Environment,
    pub seeds: SeedInfo,
    pub failures: Vec<TrialFailure>,
}

impl Summary {
    pub fn new(spec: &ExperimentSpec, result: &SweepResult) -> Self {
        Self {
            spec: spec.clone(),
            table: result.table.clone(),
            environment: Environment::current(),
            seeds: SeedInfo {
                base_seed: spec.base_seed,
                derivation: "derive_seed(base_seed, [experiment label (random=1, spectra-rows=2, samples=3), K, \
                             trial, role (signal=0, operator=1, solver=2)]); solver start i uses \
                             derive_seed(solver seed, [i])"
                    .to_string(),
            },
            failures: result
                .records
                .iter()
                .filter_map(|r| {
                    r.failure.as_ref().map(|cause| TrialFailure { k: r.k, trial: r.trial, cause: cause.clone() })
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svg: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HosError + '_ {
    move |source| HosError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path, e: csv::Error) -> HosError {
    HosError::Format { path: path.to_path_buf(), message: e.to_string() }
}

/// Writes the trial records as CSV with a fixed header, even when empty.
pub fn write_records_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    writer.write_record(CSV_COLUMNS).map_err(|e| csv_err(path, e))?;
    for record in records {
        writer.serialize(record).map_err(|e| csv_err(path, e))?;
    }
    writer.flush().map_err(io_err(path))
}

/// Writes `<stem>.csv`, `<stem>.json` and `<stem>.svg` into `dir`, where the
/// stem is `<experiment>-q<q>`.
pub fn emit_outputs(spec: &ExperimentSpec, result: &SweepResult, dir: &Path) -> Result<OutputPaths> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let stem = format!("{}-q{}", spec.experiment, spec.q);
    let paths = OutputPaths {
        csv: dir.join(format!("{stem}.csv")),
        json: dir.join(format!("{stem}.json")),
        svg: dir.join(format!("{stem}.svg")),
    };
    write_records_csv(&paths.csv, &result.records)?;
    let summary = Summary::new(spec, result);
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| HosError::Format { path: paths.json.clone(), message: e.to_string() })?;
    fs::write(&paths.json, json).map_err(io_err(&paths.json))?;
    let title = format!("{} measurements, q = {}, N = {}", spec.experiment, spec.q, spec.n);
    fs::write(&paths.svg, render_svg(&result.table, spec.n, &title)).map_err(io_err(&paths.svg))?;
    Ok(paths)
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| HosError::Format { path: path.to_path_buf(), message: e.to_string() })
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Success rate against K as a line plot, with a red vertical line at K = N.
pub fn render_svg(table: &[SweepPoint], n: usize, title: &str) -> String {
    let mut lo = table.iter().map(|p| p.k).min().unwrap_or(n).min(n) as f64;
    let mut hi = table.iter().map(|p| p.k).max().unwrap_or(n).max(n) as f64;
    if hi - lo < 2.0 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.04 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |k: f64| LEFT + (k - lo) / (hi - lo) * plot_w;
    let sy = |rate: f64| TOP + (1.0 - rate) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ =
        writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#);
    for i in 0..=5 {
        let rate = i as f64 / 5.0;
        let y = sy(rate);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{rate:.1}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for p in table {
        let x = sx(p.k as f64);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + plot_h + 18.0, p.k);
    }
    let _ =
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">K</text>"#, LEFT + plot_w / 2.0, HEIGHT - 12.0);
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">success rate</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let nx = sx(n as f64);
    let _ = writeln!(
        svg,
        r#"<line class="n-marker" x1="{nx:.2}" y1="{TOP}" x2="{nx:.2}" y2="{:.2}" stroke="red" stroke-width="1.5"/>"#,
        TOP + plot_h
    );
    if !table.is_empty() {
        let points: Vec<String> = table.iter().map(|p| format!("{:.2},{:.2}", sx(p.k as f64), sy(p.rate))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        for p in table {
            let _ = writeln!(
                svg,
                r#"<circle class="rate" cx="{:.2}" cy="{:.2}" r="3.5" fill="steelblue"><title>K = {}: {}/{}</title></circle>"#,
                sx(p.k as f64),
                sy(p.rate),
                p.k,
                p.successes,
                p.trials
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
