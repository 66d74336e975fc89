//! Graph completion from a partially observed adjacency matrix.

use qsl::dataset::gen_graph_problem;
use qsl::seed;
use qsl::tasks::{graph_complete, GraphCompleteConfig};

use super::CmdResult;
use crate::config::ExperimentConfig;
use crate::output::{fmt, OutputWriter};
use crate::svg::{self, ScatterGroup};

pub fn run(config: &ExperimentConfig, writer: &mut OutputWriter) -> CmdResult<()> {
    let g = &config.graph;
    let problem = gen_graph_problem(
        g.n_nodes,
        g.clusters,
        g.dim,
        (g.spread_low, g.spread_high),
        g.observed_fraction,
        &mut seed::rng(config.seed, "graph"),
    )?;
    let completion = graph_complete(
        &problem,
        &GraphCompleteConfig {
            n_qubits: config.embedding.n_qubits,
            n_layers: config.embedding.n_layers,
            measure: config.measure,
            train: config.train.to_train_config(config.seed),
            threshold: g.threshold,
        },
    )?;

    let n = problem.adjacency.n();
    let mut observed_rows = Vec::new();
    let mut predicted_rows = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if problem.observed.get(i, j) {
                observed_rows.push(vec![
                    i.to_string(),
                    j.to_string(),
                    u8::from(problem.adjacency.get(i, j)).to_string(),
                ]);
            } else {
                predicted_rows.push(vec![
                    i.to_string(),
                    j.to_string(),
                    u8::from(completion.predicted_adjacency.get(i, j)).to_string(),
                    u8::from(problem.adjacency.get(i, j)).to_string(),
                ]);
            }
        }
    }
    writer.csv("edges_observed.csv", &["node_i", "node_j", "edge"], &observed_rows)?;
    writer.csv(
        "edges_predicted.csv",
        &["node_i", "node_j", "predicted", "ground_truth"],
        &predicted_rows,
    )?;

    // node scatter with predicted edges; attributes live in the unit square
    let coords: Vec<(f64, f64)> = problem
        .attributes
        .points
        .iter()
        .map(|p| {
            let v = p.values();
            (v[0], *v.get(1).unwrap_or(&0.5))
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if completion.predicted_adjacency.get(i, j) {
                let color = if problem.observed.get(i, j) { "#bbbbbb" } else { "#c0392b" };
                edges.push((coords[i], coords[j], color));
            }
        }
    }
    let groups: Vec<ScatterGroup> = (0..g.clusters)
        .map(|c| ScatterGroup {
            name: match c {
                0 => "cluster 0",
                1 => "cluster 1",
                2 => "cluster 2",
                _ => "cluster",
            },
            points: problem
                .attributes
                .labels
                .iter()
                .enumerate()
                .filter(|(_, l)| **l == c)
                .map(|(i, _)| coords[i])
                .collect(),
            color: svg::SERIES_COLORS[c % svg::SERIES_COLORS.len()],
        })
        .collect();
    let body = svg::scatter(
        "completed graph (gray: observed edges, red: predicted edges)",
        "attribute 0",
        "attribute 1",
        &groups,
        &edges,
    );
    writer.svg("graph.svg", &body)?;

    let rows: Vec<Vec<String>> = completion
        .train_result
        .as_ref()
        .map(|r| {
            r.loss_history
                .iter()
                .map(|(i, v)| vec![i.to_string(), fmt(*v)])
                .collect()
        })
        .unwrap_or_default();
    writer.csv("loss_history.csv", &["eval_index", "batch_loss"], &rows)?;

    writer.json(
        "result.json",
        &serde_json::json!({
            "nodes": n,
            "observed_entries": observed_rows.len(),
            "unobserved_entries": predicted_rows.len(),
            "threshold": completion.threshold,
            "accuracy_unobserved": completion.accuracy_unobserved,
        }),
    )?;
    Ok(())
}
