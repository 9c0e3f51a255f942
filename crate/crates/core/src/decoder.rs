//! Cluster decoders for erasure and depolarizing noise, a brute-force
//! minimum-weight oracle, and adjudication modulo stabilizers.
//!
//! Syndromes are laid out as `(g_z·v ; g_x·u)`: the first `r_z` bits are the
//! Z-type checks, flipped by the X part of an error, then the `r_x` X-type
//! checks, flipped by its Z part.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::code::CssCode;
use crate::distance::binomial;
use crate::error::{Error, Result};
use crate::gf2::BinaryVector;
use crate::graph::{ClusterGraph, Decomposer};
use crate::pauli::{Pauli, PauliVector};

/// One draw from a noise channel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub error: PauliVector,
    /// Erased qubits, sorted (erasure channel only).
    pub erasure_mask: Option<Vec<usize>>,
    /// Flipped syndrome bits (measurement-error mode).
    pub syndrome_flips: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeStatus {
    SuccessDegenerate,
    LogicalFailure,
    DetectedUncorrectable,
    ClusterBudgetExceeded,
}

/// Result of one decode. Until [`DecodeOutcome::adjudicate_against`] is
/// called with the true error, `status` only says whether a correction was
/// produced (`SuccessDegenerate`) or the budget ran out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub correction: PauliVector,
    pub status: DecodeStatus,
    pub clusters_processed: usize,
    pub largest_cluster: usize,
    /// Error patterns examined by exhaustive searches.
    pub work_units: u64,
}

impl DecodeOutcome {
    fn trivial(n: usize) -> Self {
        Self {
            correction: PauliVector::identity(n),
            status: DecodeStatus::SuccessDegenerate,
            clusters_processed: 0,
            largest_cluster: 0,
            work_units: 0,
        }
    }

    /// Sets `status` from the residual `error · correction`. Budget
    /// exhaustion is left as is.
    pub fn adjudicate_against(&mut self, code: &CssCode, error: &PauliVector) -> Result<DecodeStatus> {
        if self.status != DecodeStatus::ClusterBudgetExceeded {
            self.status = adjudicate(code, &error.mul(&self.correction)?)?;
        }
        Ok(self.status)
    }
}

/// Limits for the depolarizing cluster decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterBudget {
    /// Largest correction weight searched within one cluster.
    pub max_cluster_size: usize,
    /// Total error patterns examined per decode.
    pub max_work: u64,
}

/// Default `max_work`.
pub const DEFAULT_MAX_WORK: u64 = 100_000_000;

impl Default for ClusterBudget {
    fn default() -> Self {
        Self { max_cluster_size: 4, max_work: DEFAULT_MAX_WORK }
    }
}

impl ClusterBudget {
    /// `max(d−1, ⌈2 ln n / |ln α_z(p)|⌉)`, capped at `n`. At or above the
    /// percolation threshold the cap applies.
    pub fn recommended(d: usize, n: usize, p: f64, z: usize) -> Self {
        let floor = d.saturating_sub(1).max(1);
        let supercritical = bounds::threshold_for_degree(z).map_or(true, |p0| p >= p0);
        let typical = match bounds::ln_alpha_z(p, z) {
            _ if supercritical => n,
            Ok(ln_a) if ln_a < 0.0 => {
                let s = (2.0 * (n.max(2) as f64).ln() / ln_a.abs()).ceil();
                if s.is_finite() {
                    s as usize
                } else {
                    0
                }
            }
            Ok(_) => n,
            Err(_) => floor,
        };
        Self { max_cluster_size: floor.max(typical).min(n.max(1)), max_work: DEFAULT_MAX_WORK }
    }
}

/// `(g_z·v ; g_x·u)`.
pub fn syndrome(code: &CssCode, e: &PauliVector) -> Result<BinaryVector> {
    if e.n() != code.n() {
        return Err(Error::DimensionMismatch { expected: code.n(), found: e.n() });
    }
    let sz = code.g_z().mul_vec(e.x_part())?;
    let sx = code.g_x().mul_vec(e.z_part())?;
    let r_z = code.g_z().rows();
    let mut support = sz.support().to_vec();
    support.extend(sx.support().iter().map(|&i| i + r_z));
    Ok(BinaryVector::from_sorted_unchecked(r_z + code.g_x().rows(), support))
}

/// Classifies a residual `error · correction`.
pub fn adjudicate(code: &CssCode, residual: &PauliVector) -> Result<DecodeStatus> {
    if !syndrome(code, residual)?.is_zero() {
        return Ok(DecodeStatus::DetectedUncorrectable);
    }
    let x_ok = code.x_stabilizers().contains(residual.x_part());
    let z_ok = code.z_stabilizers().contains(residual.z_part());
    Ok(if x_ok && z_ok { DecodeStatus::SuccessDegenerate } else { DecodeStatus::LogicalFailure })
}

fn check_syndrome_len(code: &CssCode, synd: &BinaryVector) -> Result<()> {
    if synd.len() != code.num_checks() {
        return Err(Error::DimensionMismatch { expected: code.num_checks(), found: synd.len() });
    }
    Ok(())
}

/// Qubits of syndrome check `c`.
fn check_row(code: &CssCode, c: usize) -> &[usize] {
    let r_z = code.g_z().rows();
    if c < r_z {
        code.g_z().row(c)
    } else {
        code.g_x().row(c - r_z)
    }
}

/// Checks touching `cluster` (sorted qubits), as `(z_rows, x_rows)`.
fn touching_checks(code: &CssCode, cluster: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let collect = |cols: &[Vec<usize>]| {
        let mut rows: Vec<usize> = cluster.iter().flat_map(|&q| cols[q].iter().copied()).collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    };
    (collect(code.gz_columns()), collect(code.gx_columns()))
}

/// Restriction of the syndrome to the given check rows of one sector.
fn local_syndrome(synd: &BinaryVector, rows: &[usize], offset: usize) -> BinaryVector {
    let support = rows.iter().enumerate().filter(|&(_, &r)| synd.get(r + offset)).map(|(i, _)| i).collect();
    BinaryVector::from_sorted_unchecked(rows.len(), support)
}

/// Solves both sectors of the local system on `cluster`; returns global
/// `(z_support, x_support)` or `None` if either sector is inconsistent.
fn solve_local(code: &CssCode, synd: &BinaryVector, cluster: &[usize]) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let (z_rows, x_rows) = touching_checks(code, cluster);
    let r_z = code.g_z().rows();
    let v = code.g_z().submatrix(&z_rows, cluster).solve_consistent(&local_syndrome(synd, &z_rows, 0))?;
    let u = code.g_x().submatrix(&x_rows, cluster).solve_consistent(&local_syndrome(synd, &x_rows, r_z))?;
    Ok(match (u, v) {
        (Some(u), Some(v)) => Some((
            u.support().iter().map(|&i| cluster[i]).collect(),
            v.support().iter().map(|&i| cluster[i]).collect(),
        )),
        _ => None,
    })
}

enum SearchResult {
    Found(Vec<(usize, Pauli)>),
    NotFound,
    WorkExceeded,
}

/// Exhaustive minimum-weight search over Pauli patterns on a qubit list.
/// Patterns are visited by weight, then qubit order, then `X < Y < Z`.
struct PatternSearch {
    qubits: Vec<usize>,
    words: usize,
    /// `signatures[(i * 3 + p) * words ..]`: checks flipped by Pauli `p` on `qubits[i]`.
    signatures: Vec<u64>,
    target: Vec<u64>,
}

const PAULIS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

impl PatternSearch {
    /// `checks` lists syndrome indices (sorted) that the search must match.
    fn new(code: &CssCode, synd: &BinaryVector, qubits: Vec<usize>, checks: &[usize]) -> Self {
        let words = checks.len().div_ceil(64).max(1);
        let r_z = code.g_z().rows();
        let local = |c: usize| checks.binary_search(&c).ok();
        let mut signatures = vec![0u64; qubits.len() * 3 * words];
        for (i, &q) in qubits.iter().enumerate() {
            let mut set = |p: usize, c: usize| {
                if let Some(b) = local(c) {
                    signatures[(i * 3 + p) * words + b / 64] ^= 1 << (b % 64);
                }
            };
            for &r in &code.gz_columns()[q] {
                set(0, r);
                set(1, r);
            }
            for &r in &code.gx_columns()[q] {
                set(1, r + r_z);
                set(2, r + r_z);
            }
        }
        let mut target = vec![0u64; words];
        for (b, &c) in checks.iter().enumerate() {
            if synd.get(c) {
                target[b / 64] |= 1 << (b % 64);
            }
        }
        Self { qubits, words, signatures, target }
    }

    fn run(&self, max_weight: usize, work: &mut u64, max_work: u64) -> SearchResult {
        let mut acc = vec![0u64; (max_weight + 1) * self.words];
        let mut chosen = Vec::with_capacity(max_weight);
        for w in 0..=max_weight.min(self.qubits.len()) {
            match self.dfs(0, 0, w, &mut acc, &mut chosen, work, max_work) {
                Some(true) => {
                    return SearchResult::Found(chosen.iter().map(|&(i, p)| (self.qubits[i], PAULIS[p])).collect())
                }
                Some(false) => {}
                None => return SearchResult::WorkExceeded,
            }
        }
        SearchResult::NotFound
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        start: usize,
        depth: usize,
        w: usize,
        acc: &mut [u64],
        chosen: &mut Vec<(usize, usize)>,
        work: &mut u64,
        max_work: u64,
    ) -> Option<bool> {
        let k = self.words;
        if depth == w {
            *work += 1;
            if *work > max_work {
                return None;
            }
            return Some(acc[depth * k..(depth + 1) * k] == self.target[..]);
        }
        let m = self.qubits.len();
        for i in start..=(m - (w - depth)) {
            for p in 0..3 {
                let sig = &self.signatures[(i * 3 + p) * k..(i * 3 + p + 1) * k];
                let (lo, hi) = acc.split_at_mut((depth + 1) * k);
                for ((d, &a), &s) in hi[..k].iter_mut().zip(&lo[depth * k..]).zip(sig) {
                    *d = a ^ s;
                }
                chosen.push((i, p));
                match self.dfs(i + 1, depth + 1, w, acc, chosen, work, max_work) {
                    Some(false) => {
                        chosen.pop();
                    }
                    other => return other,
                }
            }
        }
        Some(false)
    }
}

/// Erasure decoding: each cluster of the erased set is corrected by solving
/// its local linear system, X and Z parts separately.
pub fn decode_erasure(
    code: &CssCode,
    graph: &ClusterGraph,
    erasure_mask: &[usize],
    synd: &BinaryVector,
) -> Result<DecodeOutcome> {
    check_syndrome_len(code, synd)?;
    let n = code.n();
    if synd.is_zero() && erasure_mask.is_empty() {
        return Ok(DecodeOutcome::trivial(n));
    }
    let decomposition = Decomposer::new(graph).decompose(erasure_mask)?;
    let clusters = decomposition.clusters();
    let mut z_support = Vec::new();
    let mut x_support = Vec::new();
    for cluster in &clusters {
        let (u, v) = solve_local(code, synd, cluster)?
            .ok_or_else(|| Error::InconsistentSyndrome(format!("erased cluster at qubit {} has no solution", cluster[0])))?;
        z_support.extend(u);
        x_support.extend(v);
    }
    let correction = PauliVector::new(BinaryVector::new(n, z_support)?, BinaryVector::new(n, x_support)?)?;
    if syndrome(code, &correction)? != *synd {
        return Err(Error::InconsistentSyndrome("syndrome bits outside the erasure".into()));
    }
    Ok(DecodeOutcome {
        correction,
        status: DecodeStatus::SuccessDegenerate,
        clusters_processed: clusters.len(),
        largest_cluster: decomposition.cluster_sizes.iter().copied().max().unwrap_or(0),
        work_units: 0,
    })
}

/// Shortest path from `from` to the nearest vertex of another cluster, or
/// `None` if no other cluster is reachable. `label[v]` is the cluster id of
/// region vertices and `usize::MAX` elsewhere.
fn path_to_nearest(graph: &ClusterGraph, from: &[usize], own: usize, label: &[usize]) -> Option<Vec<usize>> {
    let nv = graph.vertex_count();
    let mut dist = vec![usize::MAX; nv];
    let mut parent = vec![usize::MAX; nv];
    let mut queue = VecDeque::new();
    for &s in from {
        dist[s] = 0;
        queue.push_back(s);
    }
    // (distance, cluster id, vertex)
    let mut best: Option<(usize, usize, usize)> = None;
    while let Some(v) = queue.pop_front() {
        if best.is_some_and(|(d, _, _)| dist[v] >= d) {
            break;
        }
        for &u in graph.neighbors(v) {
            if dist[u] != usize::MAX {
                continue;
            }
            dist[u] = dist[v] + 1;
            parent[u] = v;
            if label[u] != usize::MAX && label[u] != own {
                let cand = (dist[u], label[u], u);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            } else {
                queue.push_back(u);
            }
        }
    }
    let (_, _, mut v) = best?;
    let mut path = Vec::new();
    while dist[v] > 0 {
        path.push(v);
        v = parent[v];
    }
    Some(path)
}

/// Cluster-growth decoder for depolarizing noise.
///
/// Putative clusters start as the connected components of the union of the
/// supports of unsatisfied checks. A cluster whose local linear system has no
/// solution is joined to the nearest other cluster through a shortest path,
/// or grown by one layer of neighbours when it is alone. Once every local
/// system is solvable, each cluster is corrected by the first minimum-weight
/// Pauli pattern matching every check that touches it.
pub fn decode_depolarizing(
    code: &CssCode,
    graph: &ClusterGraph,
    synd: &BinaryVector,
    budget: &ClusterBudget,
) -> Result<DecodeOutcome> {
    check_syndrome_len(code, synd)?;
    let n = code.n();
    if graph.vertex_count() != n {
        return Err(Error::DimensionMismatch { expected: n, found: graph.vertex_count() });
    }
    if synd.is_zero() {
        return Ok(DecodeOutcome::trivial(n));
    }
    let mut in_region = vec![false; n];
    for &c in synd.support() {
        for &q in check_row(code, c) {
            in_region[q] = true;
        }
    }
    let mut decomposer = Decomposer::new(graph);
    let mut label = vec![usize::MAX; n];
    let clusters = loop {
        let region: Vec<usize> = (0..n).filter(|&q| in_region[q]).collect();
        let clusters = decomposer.decompose(&region)?.clusters();
        let mut failing = None;
        for (id, cluster) in clusters.iter().enumerate() {
            if solve_local(code, synd, cluster)?.is_none() {
                failing = Some(id);
                break;
            }
        }
        let Some(f) = failing else { break clusters };
        label.fill(usize::MAX);
        for (id, cluster) in clusters.iter().enumerate() {
            for &q in cluster {
                label[q] = id;
            }
        }
        let added = match path_to_nearest(graph, &clusters[f], f, &label) {
            Some(path) => path,
            None => clusters[f].iter().flat_map(|&q| graph.neighbors(q).iter().copied()).filter(|&q| !in_region[q]).collect(),
        };
        let mut grew = false;
        for q in added {
            grew |= !in_region[q];
            in_region[q] = true;
        }
        if !grew {
            return Err(Error::InconsistentSyndrome(format!(
                "cluster at qubit {} cannot be corrected within its component",
                clusters[f][0]
            )));
        }
    };

    let mut outcome = DecodeOutcome::trivial(n);
    let mut ops = Vec::new();
    let r_z = code.g_z().rows();
    for cluster in clusters {
        outcome.clusters_processed += 1;
        outcome.largest_cluster = outcome.largest_cluster.max(cluster.len());
        let (z_rows, x_rows) = touching_checks(code, &cluster);
        let checks: Vec<usize> = z_rows.into_iter().chain(x_rows.into_iter().map(|r| r + r_z)).collect();
        let search = PatternSearch::new(code, synd, cluster, &checks);
        match search.run(budget.max_cluster_size, &mut outcome.work_units, budget.max_work) {
            SearchResult::Found(found) => ops.extend(found),
            SearchResult::NotFound | SearchResult::WorkExceeded => {
                outcome.status = DecodeStatus::ClusterBudgetExceeded;
                return Ok(outcome);
            }
        }
    }
    outcome.correction = PauliVector::from_paulis(n, &ops)?;
    Ok(outcome)
}

/// Default pattern budget for [`decode_oracle_min_weight`].
pub const DEFAULT_ORACLE_BUDGET: f64 = 1e9;

/// Exhaustive minimum-weight decoding over all Pauli errors of weight at
/// most `w_max`. Returns the first match in weight, qubit and `X < Y < Z`
/// order.
pub fn decode_oracle_min_weight(code: &CssCode, synd: &BinaryVector, w_max: usize) -> Result<DecodeOutcome> {
    check_syndrome_len(code, synd)?;
    let n = code.n();
    let patterns: f64 = (0..=w_max.min(n)).map(|w| binomial(n, w) * 3f64.powi(w as i32)).sum();
    if patterns > DEFAULT_ORACLE_BUDGET {
        return Err(Error::BudgetExceeded(format!("{patterns:.3e} patterns exceed the oracle budget")));
    }
    let checks: Vec<usize> = (0..code.num_checks()).collect();
    let search = PatternSearch::new(code, synd, (0..n).collect(), &checks);
    let mut outcome = DecodeOutcome::trivial(n);
    match search.run(w_max, &mut outcome.work_units, u64::MAX) {
        SearchResult::Found(ops) => {
            outcome.correction = PauliVector::from_paulis(n, &ops)?;
            outcome.clusters_processed = 1;
            outcome.largest_cluster = n;
            Ok(outcome)
        }
        _ => Err(Error::NoSolution(format!("no error of weight ≤ {w_max} matches the syndrome"))),
    }
}
