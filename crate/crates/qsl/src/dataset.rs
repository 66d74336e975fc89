//! Seeded generators for the synthetic datasets used across the experiments:
//! half-blanked 2x2 images, planar Gaussian clusters, interleaved moons,
//! interpolated transition images, and attributed graphs with a partially
//! observed adjacency matrix.
//!
//! Generators return raw data coordinates unless noted; scaling into gate
//! angles happens exactly once through [`LabeledPoints::to_angles`] and is
//! recorded in the `angle_scale` field.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::embedding::FeatureVector;
use crate::error::{Error, Result};
use crate::train::{LabeledPair, PairDataset};

/// Class id of images with only the left pixel column active.
pub const LEFT: usize = 0;
/// Class id of images with only the right pixel column active.
pub const RIGHT: usize = 1;

/// Points with class labels and the angle scaling applied to them so far.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoints {
    pub points: Vec<FeatureVector>,
    pub labels: Vec<usize>,
    /// Multiplier already applied to the coordinates (1.0 = raw data).
    pub angle_scale: f64,
}

impl LabeledPoints {
    pub fn new(points: Vec<FeatureVector>, labels: Vec<usize>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::dim(format!(
                "{} points vs {} labels",
                points.len(),
                labels.len()
            )));
        }
        Ok(LabeledPoints { points, labels, angle_scale: 1.0 })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Scale raw coordinates by pi so values in [0, 1] span one rotation
    /// half-period. Errors if a scaling was already applied, which keeps the
    /// "applied exactly once" bookkeeping honest.
    pub fn to_angles(&self) -> Result<LabeledPoints> {
        self.scaled(core::f64::consts::PI)
    }

    /// Scale raw coordinates by an arbitrary factor, recording it.
    pub fn scaled(&self, factor: f64) -> Result<LabeledPoints> {
        if self.angle_scale != 1.0 {
            return Err(Error::arg(format!(
                "points already carry scale {}; refusing to scale twice",
                self.angle_scale
            )));
        }
        Ok(LabeledPoints {
            points: self.points.iter().map(|p| p.scaled(factor)).collect(),
            labels: self.labels.clone(),
            angle_scale: factor,
        })
    }

    /// Points of one class, in dataset order.
    pub fn of_class(&self, label: usize) -> Vec<&FeatureVector> {
        self.points
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| **l == label)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn class_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.labels.clone();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// 2x2 images flattened row-major to (r0c0, r0c1, r1c0, r1c1): half the set
/// keeps only the left column ("left", label 0), half only the right column
/// ("right", label 1). Active pixels are uniform in [0, 1]; the returned
/// features are already scaled by pi.
pub fn gen_half_images(n: usize, rng: &mut impl Rng) -> Result<LabeledPoints> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::arg(format!("image count must be even and positive, got {n}")));
    }
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let a: f64 = rng.gen();
        let b: f64 = rng.gen();
        let values = if i < n / 2 {
            vec![a, 0.0, b, 0.0] // left column active
        } else {
            vec![0.0, a, 0.0, b] // right column active
        };
        points.push(FeatureVector::new(values)?);
        labels.push(if i < n / 2 { LEFT } else { RIGHT });
    }
    LabeledPoints::new(points, labels)?.to_angles()
}

/// Isotropic Gaussian blobs at the given centers. `n` must divide evenly by
/// the cluster count; labels are the cluster indices. Raw coordinates.
pub fn gen_clusters(
    n: usize,
    centers: &[Vec<f64>],
    spread: f64,
    rng: &mut impl Rng,
) -> Result<LabeledPoints> {
    let k = centers.len();
    if k == 0 {
        return Err(Error::EmptyInput("cluster centers"));
    }
    if n == 0 || n % k != 0 {
        return Err(Error::arg(format!("{n} points cannot split evenly over {k} clusters")));
    }
    if spread < 0.0 {
        return Err(Error::arg("spread must be non-negative"));
    }
    let dim = centers[0].len();
    if centers.iter().any(|c| c.len() != dim) {
        return Err(Error::dim("cluster centers have mixed dimensions".to_string()));
    }
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..n / k {
            let coords: Vec<f64> = center
                .iter()
                .map(|&m| {
                    let z: f64 = StandardNormal.sample(rng);
                    m + spread * z
                })
                .collect();
            points.push(FeatureVector::new(coords)?);
            labels.push(c);
        }
    }
    LabeledPoints::new(points, labels)
}

/// Two interleaved half-circles: the upper unit half-circle at the origin
/// (label 0) and the lower one centered at (1, 0.5) (label 1), with isotropic
/// Gaussian noise. Raw coordinates.
pub fn gen_moons(n: usize, noise: f64, rng: &mut impl Rng) -> Result<LabeledPoints> {
    if n < 4 {
        return Err(Error::arg("moons need at least 4 points"));
    }
    if noise < 0.0 {
        return Err(Error::arg("noise must be non-negative"));
    }
    let n_out = n / 2;
    let n_in = n - n_out;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let arc = |count: usize, j: usize| core::f64::consts::PI * j as f64 / (count - 1) as f64;
    for j in 0..n_out {
        let t = arc(n_out, j);
        let mut p = [t.cos(), t.sin()];
        for v in &mut p {
            let z: f64 = StandardNormal.sample(rng);
            *v += noise * z;
        }
        points.push(FeatureVector::new(p.to_vec())?);
        labels.push(0);
    }
    for j in 0..n_in {
        let t = arc(n_in, j);
        let mut p = [1.0 - t.cos(), 1.0 - t.sin() - 0.5];
        for v in &mut p {
            let z: f64 = StandardNormal.sample(rng);
            *v += noise * z;
        }
        points.push(FeatureVector::new(p.to_vec())?);
        labels.push(1);
    }
    LabeledPoints::new(points, labels)
}

/// Interpolated 2x2 images `[[X, 1-X], [X, 1-X]]` with X drawn from a normal
/// of mean `delta` and standard deviation `eps`, truncated to [0, 1] by
/// rejection. Raw pixel values in [0, 1]; the caller applies angle scaling.
pub fn gen_delta_images(
    delta: f64,
    n: usize,
    eps: f64,
    rng: &mut impl Rng,
) -> Result<Vec<FeatureVector>> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::arg(format!("delta {delta} outside [0, 1]")));
    }
    if eps < 0.0 {
        return Err(Error::arg("eps must be non-negative"));
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let x = if eps == 0.0 {
            delta
        } else {
            loop {
                let z: f64 = StandardNormal.sample(rng);
                let v = delta + eps * z;
                if (0.0..=1.0).contains(&v) {
                    break v;
                }
            }
        };
        out.push(FeatureVector::new(vec![x, 1.0 - x, x, 1.0 - x])?);
    }
    Ok(out)
}

/// Full cross product of the two labeled sets; a pair is similar exactly when
/// the association maps the first point's class to the second point's class.
pub fn build_pairs(
    x_points: &LabeledPoints,
    xt_points: &LabeledPoints,
    association: &BTreeMap<usize, usize>,
) -> Result<PairDataset> {
    if x_points.is_empty() || xt_points.is_empty() {
        return Err(Error::EmptyInput("pair construction inputs"));
    }
    let mut pairs = Vec::with_capacity(x_points.len() * xt_points.len());
    for (x, xl) in x_points.points.iter().zip(&x_points.labels) {
        let target = association
            .get(xl)
            .copied()
            .ok_or(Error::MissingAssociation(*xl))?;
        for (xt, xtl) in xt_points.points.iter().zip(&xt_points.labels) {
            pairs.push(LabeledPair { x: x.clone(), xt: xt.clone(), similar: target == *xtl });
        }
    }
    PairDataset::new(pairs)
}

/// Symmetric boolean matrix with a zero diagonal, used for adjacency and
/// observation masks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMask {
    n: usize,
    data: Vec<bool>,
}

impl SymmetricMask {
    pub fn new(n: usize) -> Self {
        SymmetricMask { n, data: vec![false; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.n + j]
    }

    /// Set both `(i, j)` and `(j, i)`; the diagonal stays false.
    pub fn set_pair(&mut self, i: usize, j: usize, value: bool) {
        if i == j {
            return;
        }
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn count_upper(&self) -> usize {
        let mut c = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) {
                    c += 1;
                }
            }
        }
        c
    }

    pub fn is_symmetric_zero_diagonal(&self) -> bool {
        for i in 0..self.n {
            if self.get(i, i) {
                return false;
            }
            for j in 0..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }
}

/// A graph-completion instance: node attributes (cluster labels hidden from
/// the solver), the full adjacency ground truth, and the observation mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphProblem {
    pub attributes: LabeledPoints,
    pub adjacency: SymmetricMask,
    pub observed: SymmetricMask,
}

/// Distance between consecutive cluster centers before normalization, in
/// units of the largest spread; keeps clusters separated for any spread in
/// the configured range.
const CLUSTER_CENTER_STEP: f64 = 6.0;

/// Attributed graph with cluster-structured attributes: nodes of the same
/// cluster are connected, clusters are drawn as Gaussians with per-cluster
/// spread uniform in `spread_range`, attributes are min-max normalized into
/// the unit cube, and each off-diagonal entry is observed independently with
/// probability `observed_fraction`.
pub fn gen_graph_problem(
    n_nodes: usize,
    k: usize,
    dim: usize,
    spread_range: (f64, f64),
    observed_fraction: f64,
    rng: &mut impl Rng,
) -> Result<GraphProblem> {
    if n_nodes < 2 || k == 0 || dim == 0 {
        return Err(Error::arg("graph needs >= 2 nodes, >= 1 cluster, >= 1 attribute dim"));
    }
    if !(0.0 < observed_fraction && observed_fraction <= 1.0) {
        return Err(Error::arg(format!(
            "observed_fraction {observed_fraction} outside (0, 1]"
        )));
    }
    if !(spread_range.0 > 0.0 && spread_range.1 >= spread_range.0) {
        return Err(Error::arg("spread_range must satisfy 0 < low <= high"));
    }

    let step = CLUSTER_CENTER_STEP * spread_range.1;
    let spreads: Vec<f64> = (0..k).map(|_| rng.gen_range(spread_range.0..=spread_range.1)).collect();
    let mut points = Vec::with_capacity(n_nodes);
    let mut labels = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let c = i % k;
        let coords: Vec<f64> = (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                c as f64 * step + spreads[c] * z
            })
            .collect();
        points.push(coords);
        labels.push(c);
    }

    // min-max normalize into the unit cube
    for d in 0..dim {
        let lo = points.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[d]).fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(1e-12);
        for p in &mut points {
            p[d] = (p[d] - lo) / span;
        }
    }

    let mut adjacency = SymmetricMask::new(n_nodes);
    let mut observed = SymmetricMask::new(n_nodes);
    for i in 0..n_nodes {
        for j in (i + 1)..n_nodes {
            adjacency.set_pair(i, j, labels[i] == labels[j]);
            observed.set_pair(i, j, rng.gen::<f64>() < observed_fraction);
        }
    }

    let attributes = LabeledPoints::new(
        points.into_iter().map(FeatureVector::from).collect(),
        labels,
    )?;
    Ok(GraphProblem { attributes, adjacency, observed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_images_blank_the_expected_column() {
        let data = gen_half_images(20, &mut seed::rng(1, "img")).unwrap();
        assert_eq!(data.angle_scale, core::f64::consts::PI);
        for (p, l) in data.points.iter().zip(&data.labels) {
            let v = p.values();
            if *l == LEFT {
                assert_eq!((v[1], v[3]), (0.0, 0.0), "left image has right column zero");
                assert!(v[0] > 0.0 && v[2] > 0.0);
            } else {
                assert_eq!((v[0], v[2]), (0.0, 0.0), "right image has left column zero");
            }
        }
        assert!(gen_half_images(7, &mut seed::rng(1, "img")).is_err());
    }

    #[test]
    fn half_images_are_seed_deterministic() {
        let a = gen_half_images(10, &mut seed::rng(2, "img")).unwrap();
        let b = gen_half_images(10, &mut seed::rng(2, "img")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn half_image_active_pixels_are_uniform() {
        let data = gen_half_images(10_000, &mut seed::rng(3, "img")).unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        for p in &data.points {
            for v in p.values() {
                if *v != 0.0 {
                    sum += v / core::f64::consts::PI; // undo angle scaling
                    count += 1;
                }
            }
        }
        let mean = sum / count as f64;
        assert!((mean - 0.5).abs() < 0.02, "active-pixel mean {mean}");
    }

    #[test]
    fn zero_spread_clusters_sit_on_their_centers() {
        let centers = vec![vec![0.2, 0.3], vec![0.8, 0.7]];
        let data = gen_clusters(6, &centers, 0.0, &mut seed::rng(4, "blob")).unwrap();
        for (p, l) in data.points.iter().zip(&data.labels) {
            assert_eq!(p.values(), centers[*l].as_slice());
        }
        assert!(gen_clusters(5, &centers, 0.1, &mut seed::rng(4, "blob")).is_err());
    }

    #[test]
    fn separated_blobs_relabel_by_nearest_centroid() {
        // centers 8 sigma apart: misassignment probability ~ Phi(-4) = 3e-5,
        // so 10^4 points stay above 99.9% accuracy with wide margin
        let centers = vec![vec![0.0, 0.0], vec![8.0, 0.0]];
        let data = gen_clusters(10_000, &centers, 1.0, &mut seed::rng(5, "blob")).unwrap();
        let mut correct = 0usize;
        for (p, l) in data.points.iter().zip(&data.labels) {
            let d0: f64 = p
                .values()
                .iter()
                .zip(&centers[0])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let d1: f64 = p
                .values()
                .iter()
                .zip(&centers[1])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let guess = if d0 <= d1 { 0 } else { 1 };
            if guess == *l {
                correct += 1;
            }
        }
        assert!(correct as f64 / data.len() as f64 >= 0.999);
    }

    #[test]
    fn noiseless_moons_lie_on_unit_half_circles() {
        let data = gen_moons(40, 0.0, &mut seed::rng(6, "moons")).unwrap();
        for (p, l) in data.points.iter().zip(&data.labels) {
            let v = p.values();
            let r = if *l == 0 {
                (v[0] * v[0] + v[1] * v[1]).sqrt()
            } else {
                ((v[0] - 1.0).powi(2) + (v[1] - 0.5).powi(2)).sqrt()
            };
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_images_interpolate_between_types() {
        let imgs = gen_delta_images(0.0, 3, 0.0, &mut seed::rng(7, "delta")).unwrap();
        for img in &imgs {
            assert_eq!(img.values(), &[0.0, 1.0, 0.0, 1.0]);
        }
        let imgs = gen_delta_images(1.0, 3, 0.0, &mut seed::rng(7, "delta")).unwrap();
        for img in &imgs {
            assert_eq!(img.values(), &[1.0, 0.0, 1.0, 0.0]);
        }
        assert!(gen_delta_images(1.5, 3, 0.1, &mut seed::rng(7, "delta")).is_err());
    }

    #[test]
    fn delta_image_rows_sum_to_one() {
        let imgs = gen_delta_images(0.3, 50, 0.1, &mut seed::rng(8, "delta")).unwrap();
        for img in imgs {
            let v = img.values();
            assert_abs_diff_eq!(v[0] + v[1], 1.0, epsilon = 0.0);
            assert_abs_diff_eq!(v[2] + v[3], 1.0, epsilon = 0.0);
            assert!((0.0..=1.0).contains(&v[0]));
        }
    }

    #[test]
    fn delta_sampling_mean_is_centered() {
        let imgs = gen_delta_images(0.5, 10_000, 0.1, &mut seed::rng(9, "delta")).unwrap();
        let mean: f64 = imgs.iter().map(|i| i.values()[0]).sum::<f64>() / imgs.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "truncated-normal mean {mean}");
    }

    #[test]
    fn pair_construction_counts_and_flip() {
        let x = gen_half_images(20, &mut seed::rng(10, "img")).unwrap();
        let centers = vec![vec![0.2, 0.2], vec![0.8, 0.8]];
        let xt = gen_clusters(20, &centers, 0.05, &mut seed::rng(10, "blob"))
            .unwrap()
            .to_angles()
            .unwrap();
        let assoc: BTreeMap<usize, usize> = [(LEFT, 0), (RIGHT, 1)].into();
        let pairs = build_pairs(&x, &xt, &assoc).unwrap();
        assert_eq!(pairs.len(), 400);
        assert_eq!(pairs.similar_indices().len(), 200);
        assert_eq!(pairs.dissimilar_indices().len(), 200);

        let flipped: BTreeMap<usize, usize> = [(LEFT, 1), (RIGHT, 0)].into();
        let pairs_flipped = build_pairs(&x, &xt, &flipped).unwrap();
        for (a, b) in pairs.pairs().iter().zip(pairs_flipped.pairs()) {
            assert_eq!(a.similar, !b.similar);
        }

        let missing: BTreeMap<usize, usize> = [(LEFT, 0)].into();
        assert!(matches!(
            build_pairs(&x, &xt, &missing),
            Err(Error::MissingAssociation(RIGHT))
        ));
    }

    #[test]
    fn scaling_applies_exactly_once() {
        let centers = vec![vec![0.5, 0.5]];
        let raw = gen_clusters(4, &centers, 0.1, &mut seed::rng(11, "blob")).unwrap();
        assert_eq!(raw.angle_scale, 1.0);
        let scaled = raw.to_angles().unwrap();
        assert_eq!(scaled.angle_scale, core::f64::consts::PI);
        assert!(scaled.to_angles().is_err());
    }

    #[test]
    fn graph_masks_are_symmetric_with_zero_diagonal() {
        for s in 0..5 {
            let g = gen_graph_problem(20, 2, 2, (0.5, 1.5), 0.3, &mut seed::rng(s, "graph"))
                .unwrap();
            assert!(g.adjacency.is_symmetric_zero_diagonal());
            assert!(g.observed.is_symmetric_zero_diagonal());
            for v in g.attributes.points.iter().flat_map(|p| p.values()) {
                assert!((0.0..=1.0).contains(v), "attribute {v} outside unit cube");
            }
        }
    }

    #[test]
    fn fully_observed_graph_has_complete_mask() {
        let g = gen_graph_problem(10, 2, 2, (0.5, 1.5), 1.0, &mut seed::rng(12, "graph")).unwrap();
        assert_eq!(g.observed.count_upper(), 45);
    }

    #[test]
    fn single_cluster_graph_is_complete() {
        let g = gen_graph_problem(8, 1, 2, (0.5, 1.5), 0.5, &mut seed::rng(13, "graph")).unwrap();
        assert_eq!(g.adjacency.count_upper(), 28);
    }

    #[test]
    fn observed_count_is_binomial() {
        // 30 nodes -> 435 unordered pairs at p = 0.1: mean 43.5, sigma 6.26
        let mut total = 0usize;
        let runs = 20;
        for s in 0..runs {
            let g = gen_graph_problem(30, 2, 2, (0.5, 1.5), 0.1, &mut seed::rng(s, "graph-count"))
                .unwrap();
            let c = g.observed.count_upper();
            assert!(
                (43.5 - c as f64).abs() < 3.0 * 6.26,
                "observed count {c} outside 3 sigma"
            );
            total += c;
        }
        let mean = total as f64 / runs as f64;
        assert!((mean - 43.5).abs() < 5.0, "mean observed count {mean}");
    }

    #[test]
    fn generators_are_pure_in_seed() {
        let a = gen_graph_problem(12, 2, 2, (0.5, 1.5), 0.2, &mut seed::rng(21, "g")).unwrap();
        let b = gen_graph_problem(12, 2, 2, (0.5, 1.5), 0.2, &mut seed::rng(21, "g")).unwrap();
        assert_eq!(a, b);
        let m1 = gen_moons(16, 0.1, &mut seed::rng(22, "m")).unwrap();
        let m2 = gen_moons(16, 0.1, &mut seed::rng(22, "m")).unwrap();
        assert_eq!(m1, m2);
    }
}
