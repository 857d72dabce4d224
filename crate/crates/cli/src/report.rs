//! Chart rendering from stored evaluation outputs.
//!
//! Reads the directory layout written by [`crate::experiment::write_outputs`]
//! and renders SVG charts: per-config motivation and novelty histograms,
//! per-episode trajectory heatmaps, and cross-level bar charts of the
//! gate statistics. Levels with partial results contribute traces but no
//! fitness rows.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use wayfarer_core::agent::TraceLog;
use wayfarer_core::eval::{novelty_series, region_counts, FitnessReport, REGION_COUNT};
use wayfarer_core::wfcgen::GRID_DIM;

use crate::config::RunConfig;
use crate::experiment::battery_configs;
use crate::svg;

/// One stored episode trace.
#[derive(Debug)]
pub struct StoredTrace {
    pub level_id: String,
    pub config: String,
    pub spawn_index: usize,
    pub trace: TraceLog,
}

/// Everything found under an evaluation output directory.
#[derive(Debug)]
pub struct ReportData {
    pub fitness: Vec<FitnessReport>,
    /// Level ids whose fitness was withheld by episode failures.
    pub partial: Vec<String>,
    pub traces: Vec<StoredTrace>,
}

fn sorted_dir(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    entries.sort();
    Ok(entries)
}

/// Loads fitness reports and traces from an evaluation output directory.
pub fn load_outputs(dir: &Path) -> anyhow::Result<ReportData> {
    let mut data = ReportData {
        fitness: Vec::new(),
        partial: Vec::new(),
        traces: Vec::new(),
    };

    let fitness_dir = dir.join("fitness");
    if fitness_dir.is_dir() {
        for path in sorted_dir(&fitness_dir)? {
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            if let Some(level) = name.strip_suffix(".partial.json") {
                data.partial.push(level.to_string());
            } else if name.ends_with(".json") {
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let report = FitnessReport::from_json(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                data.fitness.push(report);
            }
        }
    }

    let traces_dir = dir.join("traces");
    if traces_dir.is_dir() {
        for level_dir in sorted_dir(&traces_dir)? {
            if !level_dir.is_dir() {
                continue;
            }
            let level_id = level_dir
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_string();
            for path in sorted_dir(&level_dir)? {
                let Some(stem) = path.file_stem().and_then(|n| n.to_str()) else {
                    continue;
                };
                if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
                    continue;
                }
                let Some((config, spawn)) = stem.rsplit_once("_s") else {
                    continue;
                };
                let spawn_index: usize = spawn
                    .parse()
                    .with_context(|| format!("bad trace name {}", path.display()))?;
                let file =
                    fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                let trace = TraceLog::read_jsonl(BufReader::new(file))
                    .with_context(|| format!("parsing {}", path.display()))?;
                data.traces.push(StoredTrace {
                    level_id: level_id.clone(),
                    config: config.to_string(),
                    spawn_index,
                    trace,
                });
            }
        }
    }

    if data.fitness.is_empty() && data.traces.is_empty() {
        bail!("no evaluation outputs under {}", dir.display());
    }
    Ok(data)
}

/// Renders every chart into `out`. Returns the files written.
pub fn write_report(
    data: &ReportData,
    out: &Path,
    config: &RunConfig,
) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut written = Vec::new();
    let mut emit = |name: String, content: String| -> anyhow::Result<()> {
        let path = out.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };

    let novelty = config.eval_params().novelty;
    for token in battery_configs() {
        let of_config: Vec<&StoredTrace> =
            data.traces.iter().filter(|t| t.config == token).collect();
        if of_config.is_empty() {
            continue;
        }

        let motivations: Vec<f64> = of_config
            .iter()
            .flat_map(|t| t.trace.decisions())
            .filter_map(|d| d.motivation)
            .collect();
        if !motivations.is_empty() {
            emit(
                format!("motivation_{token}.svg"),
                svg::histogram(
                    &format!("decision motivation: {token}"),
                    &motivations,
                    20,
                    0.0,
                    1.0,
                ),
            )?;
        }

        let novelty_samples: Vec<f64> = of_config
            .iter()
            .flat_map(|t| novelty_series(&t.trace, &novelty))
            .collect();
        emit(
            format!("novelty_{token}.svg"),
            svg::histogram(
                &format!("tick novelty: {token}"),
                &novelty_samples,
                20,
                0.0,
                1.0,
            ),
        )?;
    }

    for stored in &data.traces {
        let counts: [u64; REGION_COUNT] = region_counts(&stored.trace);
        emit(
            format!(
                "heatmap_{}_{}_s{}.svg",
                stored.level_id, stored.config, stored.spawn_index
            ),
            svg::grid_heatmap(
                &format!(
                    "regions visited: {} / {} / spawn {}",
                    stored.level_id, stored.config, stored.spawn_index
                ),
                GRID_DIM,
                &counts,
            ),
        )?;
    }

    if !data.fitness.is_empty() {
        let labels: Vec<String> = battery_configs();
        let mean_of = |field: fn(&wayfarer_core::eval::ConfigRow) -> f64| -> Vec<f64> {
            labels
                .iter()
                .map(|token| {
                    let values: Vec<f64> = data
                        .fitness
                        .iter()
                        .filter_map(|r| r.row(token))
                        .map(field)
                        .collect();
                    if values.is_empty() {
                        0.0
                    } else {
                        values.iter().sum::<f64>() / values.len() as f64
                    }
                })
                .collect()
        };
        emit(
            "bars_coverage.svg".to_string(),
            svg::bar_chart("mean coverage by config", &labels, &mean_of(|r| r.coverage)),
        )?;
        emit(
            "bars_entropy.svg".to_string(),
            svg::bar_chart("mean entropy by config", &labels, &mean_of(|r| r.entropy)),
        )?;
        emit(
            "bars_inspection.svg".to_string(),
            svg::bar_chart(
                "mean inspection by config",
                &labels,
                &mean_of(|r| r.inspection),
            ),
        )?;
    }

    Ok(written)
}
