//! Interpolated-image transition scan against the trained image model.

use qsl::tasks::transition_scan;

use super::{build_data, load_model, train_experiment, CmdResult, RunError};
use crate::config::ExperimentConfig;
use crate::output::{fmt, OutputWriter};
use crate::svg::{self, Series};

pub fn run(config: &ExperimentConfig, writer: &mut OutputWriter) -> CmdResult<()> {
    if config.experiment != "image" {
        return Err(RunError("the transition scan needs the image experiment".to_string()));
    }
    let data = build_data(config)?;
    let (model, measure) = match &config.transition.weights_path {
        Some(path) => {
            let saved = load_model(std::path::Path::new(path))?;
            (saved.model, saved.measure)
        }
        None => {
            let (model, _) = train_experiment(config, &data)?;
            (model, config.measure)
        }
    };

    let red: Vec<_> = data.xt_points.of_class(0).into_iter().cloned().collect();
    let blue: Vec<_> = data.xt_points.of_class(1).into_iter().cloned().collect();
    let curve = transition_scan(
        &model,
        measure,
        &red,
        &blue,
        &config.transition.deltas,
        config.transition.n_repeats,
        config.transition.eps,
        data.xt_points.angle_scale,
        config.seed,
    )?;

    let rows: Vec<Vec<String>> = curve
        .deltas
        .iter()
        .zip(curve.mean_distance.iter().zip(&curve.variance))
        .map(|(d, (m, v))| vec![fmt(*d), fmt(*m), fmt(*v)])
        .collect();
    writer.csv("transition.csv", &["delta", "mean_distance", "variance"], &rows)?;

    let body = svg::line_chart(
        "distribution distance along the image interpolation",
        "delta",
        "wasserstein distance",
        &[Series {
            name: "mean over repeats",
            points: curve.deltas.iter().copied().zip(curve.mean_distance.iter().copied()).collect(),
            error: Some(curve.variance.iter().map(|v| v.sqrt()).collect()),
            color: svg::SERIES_COLORS[0],
        }],
    );
    writer.svg("transition.svg", &body)?;
    writer.json("summary.json", &curve)?;
    Ok(())
}
