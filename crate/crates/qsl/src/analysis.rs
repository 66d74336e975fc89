//! Analytic-study tooling: density of states over the similarity landscape,
//! the retrieval loss and its grid optimum, the partial-vs-full improvement
//! map, one-dimensional Wasserstein distance, the empirical goodness
//! estimator, and the landmark map with a linear-separator check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::{toy_s1_closed, toy_s2_closed};

/// Normalized histogram: `sum(density * bin_width) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn integral(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(d, w)| d * (w[1] - w[0]))
            .sum()
    }

    /// Index of the highest-density bin (first on ties).
    pub fn mode_bin(&self) -> usize {
        let mut best = 0;
        for (i, d) in self.densities.iter().enumerate() {
            if *d > self.densities[best] {
                best = i;
            }
        }
        best
    }

    /// Total-variation distance to the mirror image of the histogram;
    /// zero for a distribution symmetric about the domain midpoint.
    pub fn mirror_total_variation(&self) -> f64 {
        let width = self.bin_edges[1] - self.bin_edges[0];
        0.5 * self
            .densities
            .iter()
            .zip(self.densities.iter().rev())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * width
    }
}

/// Histogram of similarity values over a uniform `grid_n x grid_n` grid of
/// `(x, xt)` in `(0, 2pi]^2`, with `n_bins` bins over [0, 1], normalized to
/// unit integral.
pub fn density_of_states(
    s_fn: impl Fn(f64, f64) -> f64,
    grid_n: usize,
    n_bins: usize,
) -> Result<Histogram> {
    if grid_n < 10 {
        return Err(Error::arg("density of states needs a grid of at least 10 per axis"));
    }
    if n_bins == 0 {
        return Err(Error::arg("histogram needs at least one bin"));
    }
    let tau = 2.0 * core::f64::consts::PI;
    let mut counts = vec![0usize; n_bins];
    for i in 0..grid_n {
        let x = tau * (i + 1) as f64 / grid_n as f64;
        for j in 0..grid_n {
            let xt = tau * (j + 1) as f64 / grid_n as f64;
            let s = s_fn(x, xt).clamp(0.0, 1.0);
            let bin = ((s * n_bins as f64) as usize).min(n_bins - 1);
            counts[bin] += 1;
        }
    }
    let total = (grid_n * grid_n) as f64;
    let width = 1.0 / n_bins as f64;
    let densities = counts.iter().map(|c| *c as f64 / total / width).collect();
    let bin_edges = (0..=n_bins).map(|i| i as f64 * width).collect();
    Ok(Histogram { bin_edges, densities })
}

/// Retrieval loss `1/2 * sqrt((1 - S(x_s, xt))^2 + S(x_d, xt)^2)`: how well
/// `xt` is simultaneously similar to `x_s` and dissimilar to `x_d`.
pub fn retrieval_loss(s_fn: impl Fn(f64, f64) -> f64, xt: f64, xs: f64, xd: f64) -> f64 {
    let sim = s_fn(xs, xt);
    let dis = s_fn(xd, xt);
    0.5 * ((1.0 - sim).powi(2) + dis.powi(2)).sqrt()
}

/// Minimize the retrieval loss over a dense grid of `grid_n` points in
/// `(0, 2pi]`; ties break toward the smallest `xt`.
pub fn retrieval_optimum(
    s_fn: impl Fn(f64, f64) -> f64,
    xs: f64,
    xd: f64,
    grid_n: usize,
) -> Result<(f64, f64)> {
    if grid_n == 0 {
        return Err(Error::arg("retrieval grid must be nonempty"));
    }
    let tau = 2.0 * core::f64::consts::PI;
    let mut best = (tau / grid_n as f64, f64::INFINITY);
    for i in 0..grid_n {
        let xt = tau * (i + 1) as f64 / grid_n as f64;
        let l = retrieval_loss(&s_fn, xt, xs, xd);
        if l < best.1 {
            best = (xt, l);
        }
    }
    Ok(best)
}

/// Optimal-retrieval loss gap between the one-qubit and two-qubit projection
/// measures of the pair circuit, each evaluated at its own grid optimum.
/// Negative values mean the partial (m = 1) measurement separates better.
pub fn lambda_improvement(xs: f64, xd: f64, grid_n: usize) -> Result<f64> {
    let (_, l1) = retrieval_optimum(toy_s1_closed, xs, xd, grid_n)?;
    let (_, l2) = retrieval_optimum(toy_s2_closed, xs, xd, grid_n)?;
    Ok(l1 - l2)
}

/// First Wasserstein distance between two empirical one-dimensional samples,
/// via the integral of the CDF difference over the merged support.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("wasserstein samples"));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));

    let mut merged: Vec<f64> = sa.iter().chain(sb.iter()).copied().collect();
    merged.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));

    let (mut ia, mut ib) = (0usize, 0usize);
    let mut distance = 0.0;
    for w in merged.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        while ia < sa.len() && sa[ia] <= lo {
            ia += 1;
        }
        while ib < sb.len() && sb[ib] <= lo {
            ib += 1;
        }
        let fa = ia as f64 / sa.len() as f64;
        let fb = ib as f64 / sb.len() as f64;
        distance += (fa - fb).abs() * (hi - lo);
    }
    Ok(distance)
}

/// Empirical goodness of a similarity function at margin `gamma` with the
/// reference indicator fixed to the whole set (tau = 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub gamma: f64,
    /// Fraction of points whose class-signed mean similarity falls below
    /// `gamma`.
    pub epsilon_hat: f64,
    pub tau: f64,
    pub margin_violations: usize,
}

fn check_labels(labels: impl Iterator<Item = i8> + Clone) -> Result<()> {
    if labels.clone().any(|l| l != 1 && l != -1) {
        return Err(Error::arg("labels must be +1 or -1"));
    }
    let has_plus = labels.clone().any(|l| l == 1);
    let has_minus = labels.clone().any(|l| l == -1);
    if !has_plus || !has_minus {
        return Err(Error::arg("goodness estimation needs both classes present"));
    }
    Ok(())
}

/// Goodness over one labeled set: for each point x,
/// `m(x) = mean over x' != x of y(x) y(x') S(x, x')`; `epsilon_hat` is the
/// fraction of points with `m(x) < gamma`.
pub fn goodness_estimate<T>(
    s_fn: impl Fn(&T, &T) -> f64,
    points: &[(T, i8)],
    gamma: f64,
) -> Result<GoodnessReport> {
    if points.len() < 2 {
        return Err(Error::arg("goodness estimation needs at least two points"));
    }
    check_labels(points.iter().map(|(_, l)| *l))?;
    let mut violations = 0usize;
    for (i, (x, y)) in points.iter().enumerate() {
        let mut acc = 0.0;
        for (j, (xp, yp)) in points.iter().enumerate() {
            if i != j {
                acc += f64::from(*y) * f64::from(*yp) * s_fn(x, xp);
            }
        }
        let m = acc / (points.len() - 1) as f64;
        if m < gamma {
            violations += 1;
        }
    }
    Ok(GoodnessReport {
        gamma,
        epsilon_hat: violations as f64 / points.len() as f64,
        tau: 1.0,
        margin_violations: violations,
    })
}

/// Goodness of a cross-space similarity: queries are judged against a
/// separate labeled reference set (no self-pairing applies).
pub fn goodness_estimate_cross<Q, R>(
    s_fn: impl Fn(&Q, &R) -> f64,
    queries: &[(Q, i8)],
    references: &[(R, i8)],
    gamma: f64,
) -> Result<GoodnessReport> {
    if queries.is_empty() {
        return Err(Error::EmptyInput("goodness queries"));
    }
    check_labels(references.iter().map(|(_, l)| *l))?;
    if queries.iter().any(|(_, l)| *l != 1 && *l != -1) {
        return Err(Error::arg("labels must be +1 or -1"));
    }
    let mut violations = 0usize;
    for (q, y) in queries {
        let mut acc = 0.0;
        for (r, yr) in references {
            acc += f64::from(*y) * f64::from(*yr) * s_fn(q, r);
        }
        let m = acc / references.len() as f64;
        if m < gamma {
            violations += 1;
        }
    }
    Ok(GoodnessReport {
        gamma,
        epsilon_hat: violations as f64 / queries.len() as f64,
        tau: 1.0,
        margin_violations: violations,
    })
}

/// Number of landmarks sufficient for the mapped-space separator:
/// `ceil((2/tau) * (log(2/delta) + 8 log(2/delta) / gamma^2))`.
pub fn landmark_count(gamma: f64, delta: f64, tau: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::arg(format!("gamma {gamma} outside (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::arg(format!("delta {delta} outside (0, 1)")));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::arg(format!("tau {tau} outside (0, 1]")));
    }
    let q = (2.0 / delta).ln();
    Ok(((2.0 / tau) * (q + 8.0 * q / (gamma * gamma))).ceil() as usize)
}

/// Map a point to the vector of its similarities to the landmarks.
pub fn landmark_map<Q, L>(
    s_fn: impl Fn(&Q, &L) -> f64,
    landmarks: &[L],
    x: &Q,
) -> Vec<f64> {
    landmarks.iter().map(|l| s_fn(x, l)).collect()
}

/// Training error and achieved normalized margin of a linear separator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatorReport {
    pub error_rate: f64,
    /// `min_i y_i (w . x_i + b) / |w|_1`; can be negative when the data is
    /// not linearly separated.
    pub margin: f64,
}

/// Fit a linear separator on mapped points by deterministic full-batch
/// logistic descent with a small ridge penalty, then report the training
/// error and the L1-normalized margin.
pub fn linear_separator_check(mapped: &[Vec<f64>], labels: &[i8]) -> Result<SeparatorReport> {
    if mapped.len() != labels.len() {
        return Err(Error::dim(format!("{} points vs {} labels", mapped.len(), labels.len())));
    }
    if mapped.is_empty() {
        return Err(Error::EmptyInput("separator points"));
    }
    check_labels(labels.iter().copied())?;
    let dim = mapped[0].len();
    if dim == 0 || mapped.iter().any(|p| p.len() != dim) {
        return Err(Error::dim("mapped points have inconsistent dimensions".to_string()));
    }
    if mapped.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::arg("all mapped points are identical; separator is degenerate"));
    }

    const ITERS: usize = 3000;
    const LEARNING_RATE: f64 = 0.5;
    const RIDGE: f64 = 1e-4;

    let n = mapped.len() as f64;
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    for _ in 0..ITERS {
        let mut gw = vec![0.0; dim];
        let mut gb = 0.0;
        for (p, y) in mapped.iter().zip(labels) {
            let y = f64::from(*y);
            let f: f64 = w.iter().zip(p).map(|(wi, xi)| wi * xi).sum::<f64>() + b;
            // d/df ln(1 + exp(-y f)) = -y / (1 + exp(y f))
            let coeff = -y / (1.0 + (y * f).exp());
            for (g, xi) in gw.iter_mut().zip(p) {
                *g += coeff * xi / n;
            }
            gb += coeff / n;
        }
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= LEARNING_RATE * (g + RIDGE * *wi);
        }
        b -= LEARNING_RATE * gb;
    }

    let mut errors = 0usize;
    let mut min_signed = f64::INFINITY;
    let l1: f64 = w.iter().map(|v| v.abs()).sum();
    for (p, y) in mapped.iter().zip(labels) {
        let f: f64 = w.iter().zip(p).map(|(wi, xi)| wi * xi).sum::<f64>() + b;
        let y = f64::from(*y);
        if y * f <= 0.0 {
            errors += 1;
        }
        min_signed = min_signed.min(y * f);
    }
    let margin = if l1 > 0.0 { min_signed / l1 } else { 0.0 };
    Ok(SeparatorReport { error_rate: errors as f64 / n, margin })
}
