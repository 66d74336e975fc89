//! Generative feature-space optimization: cost landscape over the second
//! space plus the descent trajectory for a support image.

use qsl::dataset::{LEFT, RIGHT};
use qsl::embedding::FeatureVector;
use qsl::seed;
use qsl::similarity::similarity;
use qsl::tasks::generate;

use super::{build_data, load_model, train_experiment, CmdResult, RunError};
use crate::config::ExperimentConfig;
use crate::output::{fmt, OutputWriter};
use crate::svg::{self, Heatmap};

const PI: f64 = std::f64::consts::PI;

pub fn run(config: &ExperimentConfig, writer: &mut OutputWriter) -> CmdResult<()> {
    if config.experiment != "image" {
        return Err(RunError("generation needs the image experiment".to_string()));
    }
    let data = build_data(config)?;
    let (model, measure) = match &config.generate.weights_path {
        Some(path) => {
            let saved = load_model(std::path::Path::new(path))?;
            (saved.model, saved.measure)
        }
        None => {
            let (model, _) = train_experiment(config, &data)?;
            (model, config.measure)
        }
    };

    // a fresh support image of the requested class
    let support_class = if config.generate.support == "left" { LEFT } else { RIGHT };
    let fresh = qsl::dataset::gen_half_images(2, &mut seed::rng(config.seed, "generate-support"))?;
    let support = fresh.of_class(support_class)[0].clone();

    let start = FeatureVector::new(config.generate.start.iter().map(|v| v * PI).collect())
        .map_err(|e| RunError(e.to_string()))?;
    let outcome = generate(
        &model,
        measure,
        &support,
        &start,
        config.generate.steps,
        config.generate.learning_rate,
    )?;

    // cost landscape over the raw unit square of the second space
    let res = config.generate.resolution;
    let mut rows = Vec::with_capacity(res * res);
    let mut cells = Vec::with_capacity(res);
    for iy in 0..res {
        let y = iy as f64 / (res - 1) as f64;
        let mut row = Vec::with_capacity(res);
        for ix in 0..res {
            let x = ix as f64 / (res - 1) as f64;
            let xt = FeatureVector::new(vec![x * PI, y * PI]).expect("finite");
            let cost = 1.0 - similarity(&model, measure, &support, &xt)?;
            rows.push(vec![fmt(x), fmt(y), fmt(cost)]);
            row.push(cost);
        }
        cells.push(row);
    }
    writer.csv("landscape.csv", &["x", "y", "cost"], &rows)?;

    let traj_rows: Vec<Vec<String>> = outcome
        .trajectory
        .iter()
        .map(|(p, obj)| {
            let v = p.values();
            vec![fmt(v[0] / PI), fmt(v[1] / PI), fmt(*obj)]
        })
        .collect();
    writer.csv("trajectory.csv", &["x", "y", "objective"], &traj_rows)?;

    let traj_points: Vec<(f64, f64)> = outcome
        .trajectory
        .iter()
        .map(|(p, _)| {
            let v = p.values();
            (v[0] / PI, v[1] / PI)
        })
        .collect();
    let body = svg::heatmap(&Heatmap {
        title: "generation cost landscape with descent path",
        x_label: "x",
        y_label: "y",
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        values: &cells,
        v_range: (0.0, 1.0),
        trajectory: Some(&traj_points),
        markers: &[],
    });
    writer.svg("generate.svg", &body)?;

    writer.json(
        "result.json",
        &serde_json::json!({
            "support_class": config.generate.support,
            "steps_taken": outcome.trajectory.len() - 1,
            "final_objective": outcome.final_objective,
            "final_point_unit_square": outcome
                .final_point
                .values()
                .iter()
                .map(|v| v / PI)
                .collect::<Vec<_>>(),
        }),
    )?;
    Ok(())
}
