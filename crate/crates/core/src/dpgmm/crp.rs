//! Collapsed Gibbs sampling over Chinese-restaurant-process cluster
//! assignments with a normal-inverse-Wishart base measure.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::niw::{self, ClusterStats, NiwParams};
use crate::error::{Error, Result};
use crate::prob::log_sum_exp;

/// Mutable partition state of the collapsed Gibbs sampler.
#[derive(Debug, Clone)]
pub struct GibbsState {
    assignments: Vec<usize>,
    clusters: Vec<Option<ClusterStats>>,
    free_slots: Vec<usize>,
    dim: usize,
}

impl GibbsState {
    /// Start with every point in a single cluster.
    pub fn init(data: &[DVector<f64>]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::invalid("GibbsState needs at least one point"));
        }
        let dim = data[0].len();
        let mut stats = ClusterStats::empty(dim);
        for x in data {
            if x.len() != dim {
                return Err(Error::invalid("dimension mismatch in sample set"));
            }
            stats.add(x);
        }
        Ok(GibbsState {
            assignments: vec![0; data.len()],
            clusters: vec![Some(stats)],
            free_slots: vec![],
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Assignment vector relabeled by order of first occurrence, so that
    /// identical partitions compare equal.
    pub fn canonical_assignments(&self) -> Vec<usize> {
        canonicalize(&self.assignments)
    }

    pub fn occupied(&self) -> impl Iterator<Item = (usize, &ClusterStats)> {
        self.clusters
            .iter()
            .enumerate()
            .filter_map(|(k, c)| c.as_ref().filter(|c| c.n > 0).map(|c| (k, c)))
    }

    pub fn n_clusters(&self) -> usize {
        self.occupied().count()
    }

    fn detach(&mut self, idx: usize, x: &DVector<f64>) {
        let k = self.assignments[idx];
        let stats = self.clusters[k].as_mut().expect("assigned cluster exists");
        stats.remove(x);
        if stats.n == 0 {
            self.clusters[k] = None;
            self.free_slots.push(k);
        }
    }

    fn attach(&mut self, idx: usize, k: usize, x: &DVector<f64>) {
        self.clusters[k].as_mut().expect("target cluster exists").add(x);
        self.assignments[idx] = k;
    }

    fn new_cluster_slot(&mut self) -> usize {
        if let Some(k) = self.free_slots.pop() {
            self.clusters[k] = Some(ClusterStats::empty(self.dim));
            k
        } else {
            self.clusters.push(Some(ClusterStats::empty(self.dim)));
            self.clusters.len() - 1
        }
    }

    /// Recompute all sufficient statistics from scratch (oracle for tests).
    pub fn recompute_stats(&self, data: &[DVector<f64>]) -> Vec<Option<ClusterStats>> {
        let mut fresh: Vec<Option<ClusterStats>> = vec![None; self.clusters.len()];
        for (i, x) in data.iter().enumerate() {
            let k = self.assignments[i];
            fresh[k]
                .get_or_insert_with(|| ClusterStats::empty(self.dim))
                .add(x);
        }
        fresh
    }

    pub fn clusters(&self) -> &[Option<ClusterStats>] {
        &self.clusters
    }

    /// Rebuild sufficient statistics in place after the underlying data
    /// values changed (keeps assignments). Used by the hierarchical sampler
    /// when latents are refreshed.
    pub fn rebuild_stats(&mut self, data: &[DVector<f64>]) {
        for c in self.clusters.iter_mut().flatten() {
            *c = ClusterStats::empty(self.dim);
        }
        for (i, x) in data.iter().enumerate() {
            let k = self.assignments[i];
            self.clusters[k]
                .as_mut()
                .expect("assigned cluster exists")
                .add(x);
        }
    }
}

pub fn canonicalize(assignments: &[usize]) -> Vec<usize> {
    let mut map: Vec<Option<usize>> = vec![];
    let mut out = Vec::with_capacity(assignments.len());
    for &a in assignments {
        if map.len() <= a {
            map.resize(a + 1, None);
        }
        let next = map.iter().flatten().count();
        let label = *map[a].get_or_insert(next);
        out.push(label);
    }
    out
}

/// One collapsed Gibbs reassignment of the point at `idx`.
///
/// The point joins an existing cluster with probability ∝ n₋ₖ times the NIW
/// posterior predictive, or opens a new cluster with probability ∝ α times
/// the prior predictive.
pub fn crp_step(
    state: &mut GibbsState,
    idx: usize,
    data: &[DVector<f64>],
    prior: &NiwParams,
    alpha: f64,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    if idx >= data.len() {
        return Err(Error::invalid(format!("sample index {idx} out of range")));
    }
    let x = &data[idx];
    state.detach(idx, x);

    let mut slots: Vec<usize> = Vec::with_capacity(state.n_clusters() + 1);
    let mut log_w: Vec<f64> = Vec::with_capacity(state.n_clusters() + 1);
    for (k, stats) in state.occupied() {
        slots.push(k);
        log_w.push((stats.n as f64).ln() + niw::log_predictive(prior, stats, x)?);
    }
    let empty = ClusterStats::empty(state.dim);
    log_w.push(alpha.ln() + niw::log_predictive(prior, &empty, x)?);

    let norm = log_sum_exp(&log_w)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut choice = log_w.len() - 1;
    for (i, lw) in log_w.iter().enumerate() {
        acc += (lw - norm).exp();
        if u < acc {
            choice = i;
            break;
        }
    }

    let target = if choice == log_w.len() - 1 {
        state.new_cluster_slot()
    } else {
        slots[choice]
    };
    state.attach(idx, target, x);
    Ok(())
}

/// One full sweep: visit every point once in a freshly shuffled order.
pub fn sweep(
    state: &mut GibbsState,
    data: &[DVector<f64>],
    prior: &NiwParams,
    alpha: f64,
    order: &mut Vec<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    // Fisher-Yates; rand's shuffle would also do but this keeps the draw
    // count explicit for reproducibility accounting.
    let n = order.len();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    for &idx in order.iter() {
        crp_step(state, idx, data, prior, alpha, rng)?;
    }
    Ok(())
}
