//! Training and evaluation of the configured experiment family.

use qsl::analysis::goodness_estimate_cross;
use qsl::similarity::similarity;
use qsl::train::full_loss;

use super::{build_data, load_model, train_experiment, CmdResult, RunError, SavedModel};
use crate::config::ExperimentConfig;
use crate::output::{fmt, OutputWriter};
use crate::svg::{self, Series};

pub fn run_train(config: &ExperimentConfig, writer: &mut OutputWriter) -> CmdResult<()> {
    let data = build_data(config)?;
    let (model, result) = train_experiment(config, &data)?;

    let saved = SavedModel {
        model,
        measure: config.measure,
        initial_full_loss: result.initial_full_loss,
        final_full_loss: result.final_full_loss,
    };
    writer.json("weights.json", &saved)?;

    let rows: Vec<Vec<String>> = result
        .loss_history
        .iter()
        .map(|(i, v)| vec![i.to_string(), fmt(*v)])
        .collect();
    writer.csv("loss_history.csv", &["eval_index", "batch_loss"], &rows)?;

    let body = svg::line_chart(
        "stochastic batch loss over objective evaluations",
        "evaluation",
        "batch loss",
        &[Series {
            name: "batch loss",
            points: result.loss_history.iter().map(|(i, v)| (*i as f64, *v)).collect(),
            error: None,
            color: svg::SERIES_COLORS[1],
        }],
    );
    writer.svg("loss_history.svg", &body)?;

    writer.json(
        "summary.json",
        &serde_json::json!({
            "experiment": config.experiment,
            "initial_full_loss": result.initial_full_loss,
            "final_full_loss": result.final_full_loss,
            "best_batch_loss": result.best_batch_loss,
            "evaluations": result.evals,
        }),
    )?;
    Ok(())
}

/// Evaluate persisted weights on the configured dataset: full loss plus a
/// class-signed goodness report, printed to stdout and written next to the
/// other outputs.
pub fn run_eval(
    config: &ExperimentConfig,
    weights_path: &std::path::Path,
    writer: &mut OutputWriter,
    quiet: bool,
) -> CmdResult<()> {
    let data = build_data(config)?;
    let saved = load_model(weights_path)?;
    let loss = full_loss(&saved.model, saved.measure, &data.dataset)?;

    let to_sign = |labels: &[usize]| -> Vec<i8> {
        labels.iter().map(|l| if *l == 0 { 1i8 } else { -1 }).collect()
    };
    let queries: Vec<(qsl::embedding::FeatureVector, i8)> = data
        .x_points
        .points
        .iter()
        .cloned()
        .zip(to_sign(&data.x_points.labels))
        .collect();
    let refs: Vec<(qsl::embedding::FeatureVector, i8)> = data
        .xt_points
        .points
        .iter()
        .cloned()
        .zip(to_sign(&data.xt_points.labels))
        .collect();
    let goodness = goodness_estimate_cross(
        |q, r| similarity(&saved.model, saved.measure, q, r).unwrap_or(0.0),
        &queries,
        &refs,
        0.1,
    )
    .map_err(|e| RunError(format!("goodness evaluation failed: {e}")))?;

    let report = serde_json::json!({
        "experiment": config.experiment,
        "full_loss": loss,
        "goodness": goodness,
    });
    if !quiet {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    }
    writer.json("eval.json", &report)?;
    Ok(())
}
