//! Fidelity classification: decision grid over the plane plus held-out
//! accuracy, one-shot from the plain angle encoding or with trained weights.

use std::collections::BTreeMap;

use qsl::dataset::{gen_clusters, gen_moons, LabeledPoints};
use qsl::embedding::{EmbeddingSpec, FeatureVector, WeightVector};
use qsl::seed;
use qsl::similarity::SimilarityModel;
use qsl::tasks::{classify_fidelity, decision_grid};
use qsl::train::train;

use super::{moons_to_unit, CmdResult, RunError};
use crate::config::ExperimentConfig;
use crate::output::{fmt, OutputWriter};
use crate::svg::{self, Heatmap};

const PI: f64 = std::f64::consts::PI;

pub fn run(config: &ExperimentConfig, writer: &mut OutputWriter) -> CmdResult<()> {
    let kind = config.classify.kind.as_str();
    let trained_mode = config.classify.trained.unwrap_or(kind == "moons");

    // training and held-out points in the unit square
    let (train_pts, held_pts) = match kind {
        "blobs" => {
            let tr = gen_clusters(
                config.dataset.n_xt,
                &config.dataset.centers,
                config.dataset.spread,
                &mut seed::rng(config.seed, "classify-train"),
            )?;
            let held = gen_clusters(
                config.dataset.n_held_out.max(config.dataset.centers.len()),
                &config.dataset.centers,
                config.dataset.spread,
                &mut seed::rng(config.seed, "classify-held"),
            )?;
            (tr, held)
        }
        "moons" => {
            let unitize = |pts: LabeledPoints| {
                LabeledPoints::new(pts.points.iter().map(moons_to_unit).collect(), pts.labels)
                    .expect("same lengths")
            };
            let tr = unitize(gen_moons(
                config.dataset.n_x,
                config.dataset.moon_noise,
                &mut seed::rng(config.seed, "classify-train"),
            )?);
            let held = unitize(gen_moons(
                config.dataset.n_held_out.max(4),
                config.dataset.moon_noise,
                &mut seed::rng(config.seed, "classify-held"),
            )?);
            (tr, held)
        }
        other => return Err(RunError(format!("classify kind {other:?} not supported"))),
    };
    let train_angles = train_pts.to_angles()?;
    let held_angles = held_pts.to_angles()?;

    let spec = EmbeddingSpec::new(config.embedding.n_qubits, config.embedding.n_layers, 2)?;
    let template =
        SimilarityModel::shared(spec, spec, WeightVector::zeros(spec.weight_count()))?;

    let model = if trained_mode {
        let assoc: BTreeMap<usize, usize> =
            train_angles.class_ids().into_iter().map(|c| (c, c)).collect();
        let dataset = qsl::dataset::build_pairs(&train_angles, &train_angles, &assoc)?;
        let result = train(
            &template,
            config.measure,
            &dataset,
            &config.train.to_train_config(config.seed),
        )?;
        template.with_weights(result.theta.clone(), result.eta.clone())?
    } else {
        template
    };

    // one exemplar per class in one-shot mode, the full class otherwise
    let mut exemplars: BTreeMap<usize, Vec<FeatureVector>> = BTreeMap::new();
    for class in train_angles.class_ids() {
        let members: Vec<FeatureVector> =
            train_angles.of_class(class).into_iter().cloned().collect();
        let chosen = if trained_mode { members } else { vec![members[0].clone()] };
        exemplars.insert(class, chosen);
    }

    let grid = decision_grid(
        &model,
        config.measure,
        &exemplars,
        ((0.0, PI), (0.0, PI)),
        config.classify.resolution,
    )?;

    let mut rows = Vec::with_capacity(grid.cells.len());
    let mut cells = Vec::with_capacity(grid.ys.len());
    for (iy, y) in grid.ys.iter().enumerate() {
        let mut row = Vec::with_capacity(grid.xs.len());
        for (ix, x) in grid.xs.iter().enumerate() {
            let cell = &grid.cells[iy * grid.xs.len() + ix];
            let score0 = cell.scores.values().next().copied().unwrap_or(0.0);
            rows.push(vec![
                fmt(x / PI),
                fmt(y / PI),
                cell.class.to_string(),
                fmt(score0),
            ]);
            // shade by the probability of the first class
            row.push(score0);
        }
        cells.push(row);
    }
    writer.csv("grid.csv", &["x", "y", "class", "score_class0"], &rows)?;

    let markers: Vec<(f64, f64, &str)> = train_pts
        .points
        .iter()
        .zip(&train_pts.labels)
        .map(|(p, l)| {
            let v = p.values();
            (v[0], v[1], svg::SERIES_COLORS[*l % svg::SERIES_COLORS.len()])
        })
        .collect();
    let body = svg::heatmap(&Heatmap {
        title: "decision grid (shade: probability of class 0)",
        x_label: "x",
        y_label: "y",
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        values: &cells,
        v_range: (0.0, 1.0),
        trajectory: None,
        markers: &markers,
    });
    writer.svg("grid.svg", &body)?;

    let mut correct = 0usize;
    for (p, l) in held_angles.points.iter().zip(&held_angles.labels) {
        if classify_fidelity(&model, config.measure, &exemplars, p)?.class == *l {
            correct += 1;
        }
    }
    writer.json(
        "summary.json",
        &serde_json::json!({
            "kind": kind,
            "trained": trained_mode,
            "held_out_total": held_angles.len(),
            "held_out_correct": correct,
            "held_out_accuracy": correct as f64 / held_angles.len() as f64,
        }),
    )?;
    Ok(())
}
