//! Reference estimation by agglomerating the particles of a converged run.

use crate::geometry::DomainSpec;
use crate::particles::Ensemble;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterParams {
    pub weight_floor: f64,
    pub merge_radius: f64,
}

impl ClusterParams {
    pub const DEFAULT_WEIGHT_FLOOR: f64 = 1e-4;
}

struct Cluster {
    weight: f64,
    pos: Vec<f64>,
    label: usize,
}

/// Drops particles lighter than `weight_floor`, then repeatedly merges the
/// closest pair of same-label clusters closer than `merge_radius` into their
/// weighted mean (taken in the chart of the heavier one). Atoms come back
/// renormalized and sorted by descending weight.
pub fn estimate_reference_by_clustering(
    domain: &DomainSpec,
    ensemble: &Ensemble,
    params: ClusterParams,
) -> Result<Ensemble> {
    if !(0.0..1.0).contains(&params.weight_floor) {
        return Err(Error::InvalidArgument(format!("weight_floor {} is outside [0, 1)", params.weight_floor)));
    }
    if !(params.merge_radius > 0.0) {
        return Err(Error::InvalidArgument(format!("merge_radius {} must be positive", params.merge_radius)));
    }
    let w = ensemble.weights();
    let mut clusters: Vec<Cluster> = (0..ensemble.len())
        .filter(|&i| w[i] >= params.weight_floor)
        .map(|i| Cluster { weight: w[i], pos: ensemble.positions[i].clone(), label: ensemble.labels[i] })
        .collect();
    if clusters.is_empty() {
        return Err(Error::AllBelowFloor { floor: params.weight_floor });
    }
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                if clusters[i].label != clusters[j].label {
                    continue;
                }
                let d = domain.distance(&clusters[i].pos, &clusters[j].pos)?;
                if d < params.merge_radius && best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let other = clusters.remove(j);
        let keep = &mut clusters[i];
        let (heavy, light) = if keep.weight >= other.weight {
            (keep.pos.clone(), &other.pos)
        } else {
            (other.pos.clone(), &keep.pos)
        };
        let light_weight = keep.weight.min(other.weight);
        let total = keep.weight + other.weight;
        let offset = domain.chart_offset(&heavy, light);
        let mean: Vec<f64> = heavy.iter().zip(&offset).map(|(h, o)| h + light_weight / total * o).collect();
        keep.pos = domain.project(&mean)?;
        keep.weight = total;
    }
    clusters.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    let weights: Vec<f64> = clusters.iter().map(|c| c.weight).collect();
    let labels = clusters.iter().map(|c| c.label).collect();
    Ensemble::from_weights(&weights, clusters.into_iter().map(|c| c.pos).collect())?.with_labels(labels)
}

const MIN_GAP_RATIO: f64 = 2.0;

/// Heuristic merge radius: among particles carrying at least 1% of the
/// largest weight, sort the positive same-label pairwise distances and locate
/// the largest ratio between consecutive ones. A ratio of at least 2 splits
/// within-cluster from between-cluster distances and the radius is a quarter
/// of the distance just above it; otherwise the particles are taken to be
/// distinct atoms already and the radius is a quarter of the smallest
/// distance. `+∞` when no positive distance exists.
pub fn default_merge_radius(domain: &DomainSpec, ensemble: &Ensemble) -> Result<f64> {
    let w = ensemble.weights();
    let top = w.iter().copied().fold(0.0, f64::max);
    let heavy: Vec<usize> = (0..ensemble.len()).filter(|&i| w[i] >= 0.01 * top).collect();
    let mut dists = Vec::new();
    for (a, &i) in heavy.iter().enumerate() {
        for &j in &heavy[a + 1..] {
            if ensemble.labels[i] == ensemble.labels[j] {
                dists.push(domain.distance(&ensemble.positions[i], &ensemble.positions[j])?);
            }
        }
    }
    dists.sort_by(f64::total_cmp);
    let positive: Vec<f64> = dists.into_iter().filter(|d| *d > 0.0).collect();
    let Some(&smallest) = positive.first() else {
        return Ok(f64::INFINITY);
    };
    let mut gap = (MIN_GAP_RATIO, smallest);
    for pair in positive.windows(2) {
        let ratio = pair[1] / pair[0];
        if ratio >= gap.0 {
            gap = (ratio, pair[1]);
        }
    }
    Ok(gap.1 / 4.0)
}
