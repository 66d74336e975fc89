//! Batch-size study: spread of stochastic batch-loss estimates at the
//! trained optimum, across batch sizes.

use qsl::seed;
use qsl::train::{loss_indexed, stochastic_batch};

use super::{build_data, train_experiment, CmdResult};
use crate::config::ExperimentConfig;
use crate::output::{fmt, OutputWriter};
use crate::svg::{self, Series};

pub fn run(config: &ExperimentConfig, writer: &mut OutputWriter) -> CmdResult<()> {
    let data = build_data(config)?;
    let (model, result) = train_experiment(config, &data)?;

    let mut rows = Vec::new();
    let mut mean_points = Vec::new();
    let mut std_points = Vec::new();
    for (bi, &batch_size) in config.batch_study.batch_sizes.iter().enumerate() {
        let mut rng = seed::rng_indexed(config.seed, "batch-study", bi as u64);
        let draws = config.batch_study.n_draws;
        let mut values = Vec::with_capacity(draws);
        for _ in 0..draws {
            let batch = stochastic_batch(&data.dataset, batch_size, &mut rng)?;
            values.push(loss_indexed(&model, config.measure, &data.dataset, &batch)?);
        }
        let mean = values.iter().sum::<f64>() / draws as f64;
        let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
            / (draws - 1) as f64)
            .sqrt();
        rows.push(vec![batch_size.to_string(), fmt(mean), fmt(std)]);
        let log_batch = (batch_size as f64).log10();
        mean_points.push((log_batch, mean));
        std_points.push((log_batch, std));
    }
    writer.csv("batch_study.csv", &["batch_size", "mean_loss", "std_loss"], &rows)?;

    let body = svg::line_chart(
        "batch-loss estimates at the trained optimum",
        "log10 batch size",
        "loss",
        &[
            Series {
                name: "mean batch loss",
                points: mean_points,
                error: None,
                color: svg::SERIES_COLORS[1],
            },
            Series {
                name: "standard deviation",
                points: std_points,
                error: None,
                color: svg::SERIES_COLORS[0],
            },
        ],
    );
    writer.svg("batch_study.svg", &body)?;

    writer.json(
        "result.json",
        &serde_json::json!({
            "experiment": config.experiment,
            "full_loss_at_optimum": result.final_full_loss,
            "batch_sizes": config.batch_study.batch_sizes,
            "n_draws": config.batch_study.n_draws,
        }),
    )?;
    Ok(())
}
