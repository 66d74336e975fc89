//! Partial-measurement study: training quality across measured-qubit counts
//! and second-space dimensions.

use qsl::tasks::{partial_measurement_study, PartialStudyConfig};

use super::CmdResult;
use crate::config::ExperimentConfig;
use crate::output::{fmt, OutputWriter};
use crate::svg::{self, Series};

pub fn run(config: &ExperimentConfig, writer: &mut OutputWriter) -> CmdResult<()> {
    let section = &config.partial_study;
    let study = PartialStudyConfig {
        n_images: section.n_images,
        n_points: section.n_points,
        cluster_spread: section.cluster_spread,
        embedding_layers: config.embedding.n_layers.min(2),
        train: config.train.to_train_config(config.seed),
        seed: config.seed,
    };
    let rows = partial_measurement_study(
        &section.dims,
        &section.m_choices,
        section.n_instances,
        &study,
    )?;

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.dim.to_string(),
                r.m.to_string(),
                fmt(r.mean_min_loss),
                fmt(r.variance),
            ]
        })
        .collect();
    writer.csv("study.csv", &["dim", "m", "mean_min_loss", "variance"], &csv_rows)?;

    let series: Vec<Series> = section
        .dims
        .iter()
        .enumerate()
        .map(|(i, dim)| {
            let mut points = Vec::new();
            let mut errors = Vec::new();
            for r in rows.iter().filter(|r| r.dim == *dim) {
                points.push((r.m as f64, r.mean_min_loss));
                errors.push(r.variance.sqrt());
            }
            Series {
                name: match dim {
                    1 => "dim 1",
                    2 => "dim 2",
                    3 => "dim 3",
                    4 => "dim 4",
                    _ => "dim",
                },
                points,
                error: Some(errors),
                color: svg::SERIES_COLORS[i % svg::SERIES_COLORS.len()],
            }
        })
        .collect();
    let body = svg::line_chart(
        "minimum training loss against measured qubits",
        "measured qubits",
        "mean minimum loss",
        &series,
    );
    writer.svg("study.svg", &body)?;
    writer.json("result.json", &rows)?;
    Ok(())
}
