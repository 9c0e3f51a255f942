//! Site-percolation cluster statistics on a [`ClusterGraph`].

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::graph::{ClusterGraph, Decomposer};

/// Largest graph [`exact_cluster_distribution`] will enumerate.
pub const MAX_EXACT_VERTICES: usize = 25;

/// Sampled cluster-size distribution.
///
/// `counts[s]` is the number of (site, trial) events where the site sat in a
/// cluster of size `s`. `counts_sq[s]` is the sum over trials of the squared
/// per-trial count, kept so the standard error accounts for sites of one
/// cluster being counted together.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSizeHistogram {
    pub p: f64,
    pub trials: u64,
    /// Sites observed per trial (all vertices, or one for a focused run).
    pub sites: u64,
    pub counts: Vec<u64>,
    pub counts_sq: Vec<u64>,
}

impl ClusterSizeHistogram {
    fn empty(p: f64, trials: u64, sites: u64) -> Self {
        Self { p, trials, sites, counts: Vec::new(), counts_sq: Vec::new() }
    }

    pub fn count(&self, s: usize) -> u64 {
        self.counts.get(s).copied().unwrap_or(0)
    }

    pub fn total_events(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn max_size(&self) -> usize {
        self.counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    /// `n̂_s = counts[s] / (sites · trials)`.
    pub fn n_hat(&self, s: usize) -> f64 {
        self.count(s) as f64 / (self.sites * self.trials) as f64
    }

    /// Standard error of `n̂_s` from the per-trial spread.
    pub fn std_error(&self, s: usize) -> f64 {
        let t = self.trials as f64;
        if self.trials < 2 {
            return f64::INFINITY;
        }
        let sites = self.sites as f64;
        let mean = self.count(s) as f64 / sites / t;
        let mean_sq = self.counts_sq.get(s).copied().unwrap_or(0) as f64 / (sites * sites) / t;
        let var = (mean_sq - mean * mean).max(0.0) * t / (t - 1.0);
        (var / t).sqrt()
    }

    fn add_trial(&mut self, per_trial: &[(usize, u64)]) {
        for &(s, c) in per_trial {
            if self.counts.len() <= s {
                self.counts.resize(s + 1, 0);
                self.counts_sq.resize(s + 1, 0);
            }
            self.counts[s] += c;
            self.counts_sq[s] += c * c;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
            self.counts_sq.resize(other.counts.len(), 0);
        }
        for (s, (&c, &q)) in other.counts.iter().zip(&other.counts_sq).enumerate() {
            self.counts[s] += c;
            self.counts_sq[s] += q;
        }
        self
    }

    /// CSV with columns `s,count,n_hat,eq3_bound`, one row per size with a
    /// nonzero count. `z` is the degree bound used for the tail bound.
    pub fn to_csv(&self, z: usize) -> String {
        let mut out = String::from("s,count,n_hat,eq3_bound\n");
        for s in 1..self.counts.len() {
            if self.counts[s] == 0 {
                continue;
            }
            let bound = bounds::cluster_tail_bound(s, self.p, z).unwrap_or(f64::NAN);
            let _ = writeln!(out, "{},{},{},{}", s, self.counts[s], self.n_hat(s), bound);
        }
        out
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn occupy(rng: &mut impl Rng, n: usize, p: f64, out: &mut Vec<usize>) {
    out.clear();
    if p <= 0.0 {
        return;
    }
    for v in 0..n {
        if p >= 1.0 || rng.gen::<f64>() < p {
            out.push(v);
        }
    }
}

/// Occupies each vertex independently with probability `p`, `trials` times,
/// and tallies the size of the cluster each occupied vertex belongs to.
/// Trial `t` draws from its own stream, so results do not depend on the
/// number of worker threads.
pub fn sample_cluster_histogram(graph: &ClusterGraph, p: f64, trials: u64, seed: u64) -> Result<ClusterSizeHistogram> {
    check_probability(p)?;
    let n = graph.vertex_count();
    let empty = ClusterSizeHistogram::empty(p, trials, n as u64);
    let hist = (0..trials)
        .into_par_iter()
        .fold(
            || (Decomposer::new(graph), Vec::new(), Vec::new(), empty.clone()),
            |(mut dec, mut occ, mut sizes, mut acc), t| {
                let mut rng = crate::rng::substream(seed, t);
                occupy(&mut rng, n, p, &mut occ);
                sizes.clear();
                dec.cluster_sizes_into(&occ, &mut sizes);
                sizes.sort_unstable();
                let mut per_trial: Vec<(usize, u64)> = Vec::new();
                for &s in &sizes {
                    match per_trial.last_mut() {
                        Some((last, c)) if *last == s => *c += s as u64,
                        _ => per_trial.push((s, s as u64)),
                    }
                }
                acc.add_trial(&per_trial);
                (dec, occ, sizes, acc)
            },
        )
        .map(|(_, _, _, acc)| acc)
        .reduce(|| empty.clone(), ClusterSizeHistogram::merge);
    Ok(hist)
}

/// Like [`sample_cluster_histogram`] but only records the cluster containing
/// `vertex`, giving an estimate of `n_s(vertex)`.
pub fn sample_vertex_histogram(
    graph: &ClusterGraph,
    vertex: usize,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<ClusterSizeHistogram> {
    check_probability(p)?;
    let n = graph.vertex_count();
    if vertex >= n {
        return Err(Error::IndexOutOfRange { index: vertex, len: n });
    }
    let empty = ClusterSizeHistogram::empty(p, trials, 1);
    let hist = (0..trials)
        .into_par_iter()
        .fold(
            || (Decomposer::new(graph), Vec::new(), Vec::new(), empty.clone()),
            |(mut dec, mut occ, mut sizes, mut acc), t| {
                let mut rng = crate::rng::substream(seed, t);
                occupy(&mut rng, n, p, &mut occ);
                if let Ok(i) = occ.binary_search(&vertex) {
                    sizes.clear();
                    dec.member_sizes_into(&occ, &mut sizes);
                    acc.add_trial(&[(sizes[i], 1)]);
                }
                (dec, occ, sizes, acc)
            },
        )
        .map(|(_, _, _, acc)| acc)
        .reduce(|| empty.clone(), ClusterSizeHistogram::merge);
    Ok(hist)
}

/// Exact `n_s(vertex)` for `s = 0..=V` by summing over all occupation
/// patterns of the other vertices. Entry 0 is always zero; the vertex is
/// empty with probability `1 − p`.
pub fn exact_cluster_distribution(graph: &ClusterGraph, vertex: usize, p: f64) -> Result<Vec<f64>> {
    check_probability(p)?;
    let n = graph.vertex_count();
    if n > MAX_EXACT_VERTICES {
        return Err(Error::BudgetExceeded(format!("{n} vertices exceed the exact limit {MAX_EXACT_VERTICES}")));
    }
    if vertex >= n {
        return Err(Error::IndexOutOfRange { index: vertex, len: n });
    }
    let nbr: Vec<u32> = (0..n).map(|v| graph.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect();
    let p_pow: Vec<f64> = (0..=n).map(|i| p.powi(i as i32)).collect();
    let q_pow: Vec<f64> = (0..=n).map(|i| (1.0 - p).powi(i as i32)).collect();
    let others: Vec<usize> = (0..n).filter(|&v| v != vertex).collect();
    let mut dist = vec![0.0; n + 1];
    for m in 0u32..(1u32 << others.len()) {
        let mut occupied = 1u32 << vertex;
        for (i, &v) in others.iter().enumerate() {
            if m >> i & 1 == 1 {
                occupied |= 1 << v;
            }
        }
        let mut comp = 1u32 << vertex;
        loop {
            let mut grown = comp;
            let mut bits = comp;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                grown |= nbr[v];
                bits &= bits - 1;
            }
            grown &= occupied;
            if grown == comp {
                break;
            }
            comp = grown;
        }
        let k = occupied.count_ones() as usize;
        dist[comp.count_ones() as usize] += p_pow[k] * q_pow[n - k];
    }
    Ok(dist)
}

/// Perimeter `s(z−2)+2` of any size-`s` cluster on the `z`-regular tree.
pub fn bethe_perimeter(s: usize, z: usize) -> Result<usize> {
    if s == 0 || z < 2 {
        return Err(Error::invalid("bethe_perimeter needs s ≥ 1 and z ≥ 2"));
    }
    Ok(s * (z - 2) + 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::close;

    mod approx_eq {
        pub fn close(a: f64, b: f64, tol: f64) -> bool {
            (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
        }
    }

    fn path3() -> ClusterGraph {
        ClusterGraph::from_edges(3, &[(0, 1), (1, 2)], 2).unwrap()
    }

    #[test]
    fn exact_small_graphs() {
        let p = 0.3;
        let single = ClusterGraph::from_edges(1, &[], 0).unwrap();
        assert!(close(exact_cluster_distribution(&single, 0, p).unwrap()[1], p, 1e-15));

        let d = exact_cluster_distribution(&path3(), 1, p).unwrap();
        assert!(close(d[1], p * (1.0 - p).powi(2), 1e-14));
        assert!(close(d[2], 2.0 * p * p * (1.0 - p), 1e-14));
        assert!(close(d[3], p.powi(3), 1e-14));

        let star = ClusterGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)], 3).unwrap();
        assert!(close(exact_cluster_distribution(&star, 0, p).unwrap()[1], p * (1.0 - p).powi(3), 1e-14));

        let big = ClusterGraph::from_edges(26, &[], 0).unwrap();
        assert!(matches!(exact_cluster_distribution(&big, 0, p), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn exact_distribution_sums_to_one() {
        let g = ClusterGraph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (6, 7)], 3).unwrap();
        for p in [0.0, 0.2, 0.7, 1.0] {
            for v in 0..8 {
                let d = exact_cluster_distribution(&g, v, p).unwrap();
                let total: f64 = d.iter().sum::<f64>() + (1.0 - p);
                assert!(close(total, 1.0, 1e-12));
            }
        }
    }

    #[test]
    fn sampling_limits() {
        let g = path3();
        let h0 = sample_cluster_histogram(&g, 0.0, 50, 1).unwrap();
        assert_eq!(h0.total_events(), 0);
        let h1 = sample_cluster_histogram(&g, 1.0, 50, 1).unwrap();
        assert_eq!(h1.count(3), 150);
        assert_eq!(h1.total_events(), 150);
        assert!(sample_cluster_histogram(&g, 1.5, 1, 1).is_err());
    }

    #[test]
    fn path_center_singleton_rate() {
        let p = 0.4;
        let trials = 40_000;
        let h = sample_vertex_histogram(&path3(), 1, p, trials, 3).unwrap();
        let exact = p * (1.0 - p).powi(2);
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((h.n_hat(1) - exact).abs() < 3.0 * sigma);
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = ClusterGraph::from_edges(6, &[(0, 1), (1, 2), (3, 4)], 2).unwrap();
        let a = sample_cluster_histogram(&g, 0.5, 1000, 9).unwrap();
        let b = sample_cluster_histogram(&g, 0.5, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.total_events() <= 6 * 1000);
    }

    #[test]
    fn bethe_perimeter_examples() {
        assert_eq!(bethe_perimeter(1, 3).unwrap(), 3);
        assert_eq!(bethe_perimeter(2, 4).unwrap(), 6);
        assert_eq!(bethe_perimeter(5, 12).unwrap(), 52);
        assert!(bethe_perimeter(0, 3).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = path3();
        let h = sample_cluster_histogram(&g, 0.3, 100, 2).unwrap();
        let csv = h.to_csv(2);
        assert!(csv.starts_with("s,count,n_hat,eq3_bound\n"));
        assert!(csv.lines().count() >= 2);
    }
}
