//! Derivative-free minimizers.
//!
//! [`cobyla_minimize`] is an unconstrained linear-approximation trust-region
//! method in the style of Powell's COBYLA: it maintains a nondegenerate
//! simplex of n+1 points, interpolates a linear model of the objective,
//! takes steepest-descent steps of the model within the current trust radius,
//! repairs simplex geometry when it degrades, and shrinks the radius from
//! `rho_begin` to `rho_end`. [`nelder_mead_minimize`] is the classic simplex
//! method behind the same interface, kept as a cross-check.
//!
//! Both record every objective evaluation, track the best point seen, and are
//! fully deterministic.

use crate::error::{Error, Result};

/// Optimizer selector used by training configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Cobyla,
    NelderMead,
}

/// Common stopping parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimOptions {
    /// Initial trust-region radius / simplex edge.
    pub rho_begin: f64,
    /// Final radius; the run stops once a shrink is requested at this scale.
    pub rho_end: f64,
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
    /// Consecutive failed trust steps required before the radius shrinks.
    /// 1 is the classic deterministic rule; noisy objectives want 2-3 so a
    /// single unlucky batch cannot collapse the radius.
    pub shrink_patience: usize,
    /// Re-evaluate the incumbent vertex every iteration. Pointless for
    /// deterministic objectives, but for noisy ones it removes the selection
    /// bias of keeping a lucky low draw as the comparison baseline.
    pub refresh_incumbent: bool,
}

impl OptimOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_begin > self.rho_end && self.rho_end > 0.0) {
            return Err(Error::arg(format!(
                "trust radii must satisfy rho_begin > rho_end > 0, got {} and {}",
                self.rho_begin, self.rho_end
            )));
        }
        if self.max_evals == 0 {
            return Err(Error::arg("max_evals must be positive"));
        }
        if self.shrink_patience == 0 {
            return Err(Error::arg("shrink_patience must be at least 1"));
        }
        Ok(())
    }
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions {
            rho_begin: 0.5,
            rho_end: 1e-6,
            max_evals: 10_000,
            shrink_patience: 1,
            refresh_incumbent: false,
        }
    }
}

/// Outcome of a minimization run.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimResult {
    /// Best point seen over all evaluations.
    pub best_point: Vec<f64>,
    /// Objective value at the best point.
    pub best_value: f64,
    /// Incumbent (best simplex vertex) at termination; coincides with
    /// `best_point` on deterministic objectives but can be the more reliable
    /// point under evaluation noise.
    pub final_point: Vec<f64>,
    /// Number of objective evaluations performed.
    pub evals: usize,
    /// Every evaluation as `(eval_index, value)` in call order.
    pub history: Vec<(usize, f64)>,
}

struct Tracker<F> {
    f: F,
    evals: usize,
    history: Vec<(usize, f64)>,
    best_point: Vec<f64>,
    best_value: f64,
    max_evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    fn new(f: F, max_evals: usize) -> Self {
        Tracker {
            f,
            evals: 0,
            history: Vec::new(),
            best_point: Vec::new(),
            best_value: f64::INFINITY,
            max_evals,
        }
    }

    fn budget_left(&self) -> bool {
        self.evals < self.max_evals
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let value = (self.f)(x);
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective { value, eval_index: self.evals });
        }
        self.history.push((self.evals, value));
        self.evals += 1;
        if value < self.best_value {
            self.best_value = value;
            self.best_point = x.to_vec();
        }
        Ok(value)
    }

    fn finish(self, final_point: Vec<f64>) -> OptimResult {
        OptimResult {
            best_point: self.best_point,
            best_value: self.best_value,
            final_point,
            evals: self.evals,
            history: self.history,
        }
    }
}

/// Invert a small dense matrix by Gauss-Jordan elimination with partial
/// pivoting. Returns `None` when the matrix is numerically singular at the
/// given pivot threshold.
fn invert(n: usize, a: &[f64], pivot_tol: f64) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = m[col * n + col].abs();
        for row in (col + 1)..n {
            let v = m[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val < pivot_tol {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                m.swap(col * n + k, pivot_row * n + k);
                inv.swap(col * n + k, pivot_row * n + k);
            }
        }
        let p = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for row in 0..n {
            if row != col {
                let factor = m[row * n + col];
                if factor != 0.0 {
                    for k in 0..n {
                        m[row * n + k] -= factor * m[col * n + k];
                        inv[row * n + k] -= factor * inv[col * n + k];
                    }
                }
            }
        }
    }
    Some(inv)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Unconstrained COBYLA-style minimization: linear interpolation models on a
/// maintained simplex, trust-region steps, geometry repair, radius shrinking.
pub fn cobyla_minimize(
    f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &OptimOptions,
) -> Result<OptimResult> {
    opts.validate()?;
    let n = x0.len();
    if n == 0 {
        return Err(Error::EmptyInput("optimization variable"));
    }
    let mut tr = Tracker::new(f, opts.max_evals);

    // vertices[0] is kept as the incumbent best vertex
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    vertices.push(x0.to_vec());
    values.push(tr.eval(x0)?);
    for i in 0..n {
        if !tr.budget_left() {
            let incumbent = tr.best_point.clone();
            return Ok(tr.finish(incumbent));
        }
        let mut v = x0.to_vec();
        v[i] += opts.rho_begin;
        values.push(tr.eval(&v)?);
        vertices.push(v);
    }

    let mut rho = opts.rho_begin;
    let mut failed_steps = 0usize;
    // geometry thresholds relative to rho, in the spirit of Powell's
    // acceptability test
    const EDGE_FACTOR: f64 = 2.1;
    const HEIGHT_FACTOR: f64 = 0.25;
    const GOOD_RATIO: f64 = 0.1;
    const GROW_RATIO: f64 = 0.5;

    while tr.budget_left() {
        // move the best vertex to the front
        let best = (0..=n)
            .min_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"))
            .expect("nonempty simplex");
        vertices.swap(0, best);
        values.swap(0, best);

        if opts.refresh_incumbent {
            values[0] = tr.eval(&vertices[0])?;
            if !tr.budget_left() {
                break;
            }
        }

        // edge matrix: column j-1 holds vertices[j] - vertices[0]
        let mut edges = vec![0.0; n * n];
        for j in 1..=n {
            for k in 0..n {
                edges[k * n + (j - 1)] = vertices[j][k] - vertices[0][k];
            }
        }
        let inv = invert(n, &edges, 1e-14 * (1.0 + rho));

        // simplex geometry: edge lengths within EDGE_FACTOR * rho and each
        // vertex at height >= HEIGHT_FACTOR * rho over the opposite face
        // (heights are reciprocals of the dual-basis row norms).
        let mut worst_long: Option<(usize, f64)> = None;
        for j in 1..=n {
            let len = norm(
                &(0..n).map(|k| vertices[j][k] - vertices[0][k]).collect::<Vec<_>>(),
            );
            if len > EDGE_FACTOR * rho {
                if worst_long.map_or(true, |(_, l)| len > l) {
                    worst_long = Some((j, len));
                }
            }
        }
        let mut worst_flat: Option<(usize, f64)> = None;
        let mut gradient: Option<Vec<f64>> = None;
        if let Some(inv) = &inv {
            for j in 1..=n {
                let row = &inv[(j - 1) * n..j * n];
                let h = 1.0 / norm(row).max(1e-300);
                if h < HEIGHT_FACTOR * rho && worst_flat.map_or(true, |(_, hh)| h < hh) {
                    worst_flat = Some((j, h));
                }
            }
            // linear model gradient g solves edges^T g = df
            let mut g = vec![0.0; n];
            for (k, gk) in g.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 1..=n {
                    acc += inv[(j - 1) * n + k] * (values[j] - values[0]);
                }
                *gk = acc;
            }
            gradient = Some(g);
        }

        let needs_repair = inv.is_none() || worst_long.is_some() || worst_flat.is_some();
        if needs_repair {
            // replace the most offending vertex by a point at distance rho/2
            // from the best vertex along a direction that restores geometry
            let j = worst_long
                .map(|(j, _)| j)
                .or_else(|| worst_flat.map(|(j, _)| j))
                .unwrap_or(1);
            let dir = repair_direction(n, j, &vertices, inv.as_deref(), gradient.as_deref());
            let mut candidate = vertices[0].clone();
            for k in 0..n {
                candidate[k] += 0.5 * rho * dir[k];
            }
            if !tr.budget_left() {
                break;
            }
            let value = tr.eval(&candidate)?;
            vertices[j] = candidate;
            values[j] = value;
            continue;
        }

        let g = gradient.expect("acceptable simplex has a model");
        let gnorm = norm(&g);
        if gnorm < 1e-14 {
            // flat model: shrink or stop
            if rho <= opts.rho_end {
                break;
            }
            rho = (0.5 * rho).max(opts.rho_end);
            continue;
        }

        // trust-region step on the linear model
        let mut candidate = vertices[0].clone();
        for k in 0..n {
            candidate[k] -= rho * g[k] / gnorm;
        }
        if !tr.budget_left() {
            break;
        }
        let value = tr.eval(&candidate)?;
        let predicted = rho * gnorm;
        let ratio = (values[0] - value) / predicted;

        // vertex displaced by the new point: the one with the largest
        // coefficient when the step is expressed in the edge basis
        let inv = inv.expect("checked above");
        let mut sigma = vec![0.0; n];
        let step: Vec<f64> =
            (0..n).map(|k| candidate[k] - vertices[0][k]).collect();
        for (j, s) in sigma.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..n {
                acc += inv[j * n + k] * step[k];
            }
            *s = acc;
        }
        let jmax = sigma
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).expect("finite"))
            .map(|(j, _)| j + 1)
            .unwrap_or(1);

        if ratio >= GOOD_RATIO || value < values[jmax] {
            vertices[jmax] = candidate;
            values[jmax] = value;
        }
        if ratio >= GROW_RATIO {
            // the model is trustworthy at this scale; allow the radius to
            // recover, never beyond its initial value
            failed_steps = 0;
            rho = (2.0 * rho).min(opts.rho_begin);
        } else if ratio < GOOD_RATIO {
            failed_steps += 1;
            if failed_steps >= opts.shrink_patience {
                failed_steps = 0;
                if rho <= opts.rho_end {
                    break;
                }
                rho = (0.5 * rho).max(opts.rho_end);
            }
        } else {
            failed_steps = 0;
        }
    }

    let incumbent_idx = (0..=n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"))
        .expect("nonempty simplex");
    let incumbent = vertices[incumbent_idx].clone();
    Ok(tr.finish(incumbent))
}

/// Direction used to repair simplex geometry: the dual-basis row for the
/// offending vertex (orthogonal to the other edges) when available, oriented
/// downhill on the model, otherwise the unit axis of largest spread.
fn repair_direction(
    n: usize,
    j: usize,
    vertices: &[Vec<f64>],
    inv: Option<&[f64]>,
    gradient: Option<&[f64]>,
) -> Vec<f64> {
    if let Some(inv) = inv {
        let row = &inv[(j - 1) * n..j * n];
        let len = norm(row);
        if len > 1e-300 {
            let mut dir: Vec<f64> = row.iter().map(|v| v / len).collect();
            if let Some(g) = gradient {
                let slope: f64 = dir.iter().zip(g).map(|(d, g)| d * g).sum();
                if slope > 0.0 {
                    for d in &mut dir {
                        *d = -*d;
                    }
                }
            }
            return dir;
        }
    }
    // degenerate simplex: fall back to the axis along which the offending
    // edge is longest
    let mut axis = 0;
    let mut spread = -1.0;
    for k in 0..n {
        let v = (vertices[j][k] - vertices[0][k]).abs();
        if v > spread {
            spread = v;
            axis = k;
        }
    }
    let mut dir = vec![0.0; n];
    dir[axis] = 1.0;
    dir
}

/// Classic Nelder-Mead simplex minimization with standard coefficients,
/// stopping when the simplex diameter falls below `rho_end` or the budget is
/// exhausted.
pub fn nelder_mead_minimize(
    f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &OptimOptions,
) -> Result<OptimResult> {
    opts.validate()?;
    let n = x0.len();
    if n == 0 {
        return Err(Error::EmptyInput("optimization variable"));
    }
    let (alpha, gamma, rho_c, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut tr = Tracker::new(f, opts.max_evals);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    values.push(tr.eval(x0)?);
    for i in 0..n {
        if !tr.budget_left() {
            let incumbent = tr.best_point.clone();
            return Ok(tr.finish(incumbent));
        }
        let mut v = x0.to_vec();
        v[i] += opts.rho_begin;
        values.push(tr.eval(&v)?);
        simplex.push(v);
    }

    while tr.budget_left() {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"));
        let reorder_simplex: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let reorder_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reorder_simplex;
        values = reorder_values;

        let diameter = simplex[1..]
            .iter()
            .map(|v| norm(&(0..n).map(|k| v[k] - simplex[0][k]).collect::<Vec<_>>()))
            .fold(0.0f64, f64::max);
        if diameter < opts.rho_end {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();
        let reflect: Vec<f64> =
            (0..n).map(|k| centroid[k] + alpha * (centroid[k] - simplex[n][k])).collect();
        if !tr.budget_left() {
            break;
        }
        let fr = tr.eval(&reflect)?;

        if fr < values[0] {
            let expand: Vec<f64> =
                (0..n).map(|k| centroid[k] + gamma * (reflect[k] - centroid[k])).collect();
            if !tr.budget_left() {
                simplex[n] = reflect;
                values[n] = fr;
                continue;
            }
            let fe = tr.eval(&expand)?;
            if fe < fr {
                simplex[n] = expand;
                values[n] = fe;
            } else {
                simplex[n] = reflect;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflect;
            values[n] = fr;
        } else {
            let contract: Vec<f64> = if fr < values[n] {
                (0..n).map(|k| centroid[k] + rho_c * (reflect[k] - centroid[k])).collect()
            } else {
                (0..n).map(|k| centroid[k] + rho_c * (simplex[n][k] - centroid[k])).collect()
            };
            if !tr.budget_left() {
                break;
            }
            let fc = tr.eval(&contract)?;
            if fc < values[n].min(fr) {
                simplex[n] = contract;
                values[n] = fc;
            } else {
                // shrink toward the best vertex
                for j in 1..=n {
                    for k in 0..n {
                        simplex[j][k] = simplex[0][k] + sigma * (simplex[j][k] - simplex[0][k]);
                    }
                    if !tr.budget_left() {
                        let incumbent = nm_incumbent(&simplex, &values);
                        return Ok(tr.finish(incumbent));
                    }
                    values[j] = tr.eval(&simplex[j])?;
                }
            }
        }
    }

    let incumbent = nm_incumbent(&simplex, &values);
    Ok(tr.finish(incumbent))
}

fn nm_incumbent(simplex: &[Vec<f64>], values: &[f64]) -> Vec<f64> {
    let idx = (0..values.len())
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"))
        .expect("nonempty simplex");
    simplex[idx].clone()
}

/// Dispatch on the configured optimizer kind.
pub fn minimize(
    kind: OptimizerKind,
    f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &OptimOptions,
) -> Result<OptimResult> {
    match kind {
        OptimizerKind::Cobyla => cobyla_minimize(f, x0, opts),
        OptimizerKind::NelderMead => nelder_mead_minimize(f, x0, opts),
    }
}
