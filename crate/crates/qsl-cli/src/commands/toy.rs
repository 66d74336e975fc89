//! Analytic study of the fixed pair circuit: similarity heatmaps, density of
//! states, the retrieval loss curve at the configured anchors, and the
//! improvement map between the one- and two-qubit measures.

use qsl::analysis::{density_of_states, retrieval_loss, retrieval_optimum};
use qsl::similarity::{toy_s1_closed, toy_s2_closed};

use super::CmdResult;
use crate::config::ExperimentConfig;
use crate::output::{fmt, OutputWriter};
use crate::svg::{self, Heatmap, Series};

const TAU: f64 = std::f64::consts::TAU;

pub fn run(config: &ExperimentConfig, writer: &mut OutputWriter) -> CmdResult<()> {
    let toy = &config.toy;

    // similarity heatmaps over [0, 2pi]^2, origin included
    for (name, title, s_fn) in [
        ("s2", "two-qubit projection similarity", toy_s2_closed as fn(f64, f64) -> f64),
        ("s1", "one-qubit projection similarity", toy_s1_closed as fn(f64, f64) -> f64),
    ] {
        let n = toy.heatmap_n;
        let axis: Vec<f64> = (0..n).map(|i| TAU * i as f64 / (n - 1) as f64).collect();
        let mut rows = Vec::with_capacity(n * n);
        let mut cells = Vec::with_capacity(n);
        for &xt in &axis {
            let mut row = Vec::with_capacity(n);
            for &x in &axis {
                let v = s_fn(x, xt);
                rows.push(vec![fmt(x), fmt(xt), fmt(v)]);
                row.push(v);
            }
            cells.push(row);
        }
        writer.csv(&format!("{name}.csv"), &["x", "xt", "similarity"], &rows)?;
        let body = svg::heatmap(&Heatmap {
            title,
            x_label: "x",
            y_label: "xt",
            x_range: (0.0, TAU),
            y_range: (0.0, TAU),
            values: &cells,
            v_range: (0.0, 1.0),
            trajectory: None,
            markers: &[],
        });
        writer.svg(&format!("{name}.svg"), &body)?;
    }

    // density of states for both measures
    let h2 = density_of_states(toy_s2_closed, toy.dos_grid_n, toy.dos_bins)?;
    let h1 = density_of_states(toy_s1_closed, toy.dos_grid_n, toy.dos_bins)?;
    let mut rows = Vec::new();
    for i in 0..h2.densities.len() {
        rows.push(vec![
            fmt(h2.bin_edges[i]),
            fmt(h2.bin_edges[i + 1]),
            fmt(h2.densities[i]),
            fmt(h1.densities[i]),
        ]);
    }
    writer.csv("dos.csv", &["bin_low", "bin_high", "density_m2", "density_m1"], &rows)?;
    let centers: Vec<f64> =
        h2.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let body = svg::line_chart(
        "density of states of the pair similarities",
        "similarity",
        "density",
        &[
            Series {
                name: "m = 2",
                points: centers.iter().copied().zip(h2.densities.iter().copied()).collect(),
                error: None,
                color: svg::SERIES_COLORS[0],
            },
            Series {
                name: "m = 1",
                points: centers.iter().copied().zip(h1.densities.iter().copied()).collect(),
                error: None,
                color: svg::SERIES_COLORS[1],
            },
        ],
    );
    writer.svg("dos.svg", &body)?;

    // retrieval loss curves at the configured anchors
    let n = toy.retrieval_grid_n;
    let xts: Vec<f64> = (0..n).map(|i| TAU * (i + 1) as f64 / n as f64).collect();
    let mut rows = Vec::with_capacity(n);
    let mut curve1 = Vec::with_capacity(n);
    let mut curve2 = Vec::with_capacity(n);
    for &xt in &xts {
        let l1 = retrieval_loss(toy_s1_closed, xt, toy.x_s, toy.x_d);
        let l2 = retrieval_loss(toy_s2_closed, xt, toy.x_s, toy.x_d);
        rows.push(vec![fmt(xt), fmt(l1), fmt(l2)]);
        curve1.push((xt, l1));
        curve2.push((xt, l2));
    }
    writer.csv("retrieval.csv", &["xt", "loss_m1", "loss_m2"], &rows)?;
    let (opt1, l1) = retrieval_optimum(toy_s1_closed, toy.x_s, toy.x_d, n)?;
    let (opt2, l2) = retrieval_optimum(toy_s2_closed, toy.x_s, toy.x_d, n)?;
    let body = svg::line_chart(
        "retrieval loss against the candidate point",
        "xt",
        "loss",
        &[
            Series { name: "m = 1", points: curve1, error: None, color: svg::SERIES_COLORS[0] },
            Series { name: "m = 2", points: curve2, error: None, color: svg::SERIES_COLORS[1] },
        ],
    );
    writer.svg("retrieval.svg", &body)?;

    // improvement map: per-measure optimal losses compared across anchors
    let g = toy.lambda_grid_n;
    let mut rows = Vec::with_capacity(g * g);
    let mut cells = Vec::with_capacity(g);
    for j in 0..g {
        let xd = TAU * (j + 1) as f64 / g as f64;
        let mut row = Vec::with_capacity(g);
        for i in 0..g {
            let xs = TAU * (i + 1) as f64 / g as f64;
            let lam = qsl::analysis::lambda_improvement(xs, xd, n)?;
            rows.push(vec![fmt(xs), fmt(xd), fmt(lam)]);
            row.push(lam);
        }
        cells.push(row);
    }
    writer.csv("lambda.csv", &["x_s", "x_d", "lambda"], &rows)?;
    let extreme = cells
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let body = svg::heatmap(&Heatmap {
        title: "optimal-retrieval improvement of the one-qubit measure",
        x_label: "x_s",
        y_label: "x_d",
        x_range: (0.0, TAU),
        y_range: (0.0, TAU),
        values: &cells,
        v_range: (-extreme, extreme),
        trajectory: None,
        markers: &[],
    });
    writer.svg("lambda.svg", &body)?;

    writer.json(
        "summary.json",
        &serde_json::json!({
            "retrieval": {
                "x_s": toy.x_s,
                "x_d": toy.x_d,
                "optimum_m1": { "xt": opt1, "loss": l1 },
                "optimum_m2": { "xt": opt2, "loss": l2 },
            },
            "dos": { "mode_bin_m2": h2.mode_bin(), "mirror_tv_m1": h1.mirror_total_variation() },
        }),
    )?;
    Ok(())
}
