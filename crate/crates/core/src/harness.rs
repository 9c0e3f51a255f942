//! Channel sampling, repeated decoding trials and threshold sweeps.
//!
//! Trial `t` at sweep point `i` draws from its own ChaCha stream, and
//! per-worker tallies are integers merged by addition, so a sweep result is
//! a pure function of its configuration.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::decoder::{self, ClusterBudget, DecodeStatus, ErrorSample};
use crate::error::{Error, Result};
use crate::gf2::BinaryVector;
use crate::graph::{build_connectivity_graph, ClusterGraph};
use crate::pauli::{Pauli, PauliVector};
use crate::rng::{point_stream, substream};

const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Each qubit is left alone with probability `1 − p`, otherwise hit by a
/// uniform choice of X, Y or Z.
pub fn sample_depolarizing(n: usize, p: f64, rng: &mut impl Rng) -> Result<PauliVector> {
    check_probability(p)?;
    let mut ops = Vec::new();
    for q in 0..n {
        if p >= 1.0 || rng.gen::<f64>() < p {
            ops.push((q, NON_IDENTITY[rng.gen_range(0..3)]));
        }
    }
    PauliVector::from_paulis(n, &ops)
}

/// Each qubit is erased with probability `p`; erased qubits carry a uniform
/// Pauli from `{I, X, Y, Z}`.
pub fn sample_erasure(n: usize, p: f64, rng: &mut impl Rng) -> Result<ErrorSample> {
    check_probability(p)?;
    let mut mask = Vec::new();
    let mut ops = Vec::new();
    for q in 0..n {
        if p >= 1.0 || rng.gen::<f64>() < p {
            mask.push(q);
            ops.push((q, ALL[rng.gen_range(0..4)]));
        }
    }
    Ok(ErrorSample { error: PauliVector::from_paulis(n, &ops)?, erasure_mask: Some(mask), syndrome_flips: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Erasure,
    Depolarizing,
}

impl std::str::FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erasure" => Ok(Channel::Erasure),
            "depolarizing" => Ok(Channel::Depolarizing),
            other => Err(Error::invalid(format!("unknown channel {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub channel: Channel,
    pub p_values: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub budget: ClusterBudget,
    /// Count budget exhaustion as failure in `failure_rate`.
    #[serde(default = "default_true")]
    pub count_budget_failures: bool,
}

fn default_true() -> bool {
    true
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.trials >= 1 << 40 {
            return Err(Error::invalid("trials must be below 2^40"));
        }
        if self.p_values.is_empty() {
            return Err(Error::invalid("no p values given"));
        }
        self.p_values.iter().try_for_each(|&p| check_probability(p))
    }
}

/// Code parameters echoed into results.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSummary {
    pub n: usize,
    pub k: usize,
    pub j: usize,
    pub ell: usize,
    pub z: usize,
}

impl CodeSummary {
    pub fn of(code: &CssCode) -> Self {
        Self { n: code.n(), k: code.k(), j: code.j(), ell: code.ell(), z: code.z_bound() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    pub trials: u64,
    /// Logical failures plus detected-but-uncorrected residuals.
    pub failures: u64,
    pub budget_exceeded: u64,
    pub failure_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub code: CodeSummary,
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
}

/// 95% two-sided normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let phat = k as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (phat + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    failures: u64,
    budget: u64,
}

impl Tally {
    fn merge(self, o: Self) -> Self {
        Self { failures: self.failures + o.failures, budget: self.budget + o.budget }
    }
}

/// Samples, decodes and adjudicates one trial.
pub fn run_trial(
    code: &CssCode,
    graph: &ClusterGraph,
    channel: Channel,
    p: f64,
    budget: &ClusterBudget,
    rng: &mut impl Rng,
) -> Result<DecodeStatus> {
    let (error, outcome) = match channel {
        Channel::Erasure => {
            let sample = sample_erasure(code.n(), p, rng)?;
            let synd = decoder::syndrome(code, &sample.error)?;
            let mask = sample.erasure_mask.unwrap_or_default();
            (sample.error, decoder::decode_erasure(code, graph, &mask, &synd)?)
        }
        Channel::Depolarizing => {
            let error = sample_depolarizing(code.n(), p, rng)?;
            let synd = decoder::syndrome(code, &error)?;
            let outcome = decoder::decode_depolarizing(code, graph, &synd, budget)?;
            (error, outcome)
        }
    };
    let mut outcome = outcome;
    outcome.adjudicate_against(code, &error)
}

pub fn run_sweep(code: &CssCode, config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let graph = build_connectivity_graph(code);
    let mut points = Vec::with_capacity(config.p_values.len());
    for (i, &p) in config.p_values.iter().enumerate() {
        let tally = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = substream(config.seed, point_stream(i, t));
                let status = run_trial(code, &graph, config.channel, p, &config.budget, &mut rng)?;
                Ok::<_, Error>(match status {
                    DecodeStatus::SuccessDegenerate => Tally::default(),
                    DecodeStatus::ClusterBudgetExceeded => Tally { failures: 0, budget: 1 },
                    DecodeStatus::LogicalFailure | DecodeStatus::DetectedUncorrectable => {
                        Tally { failures: 1, budget: 0 }
                    }
                })
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
        let bad = tally.failures + if config.count_budget_failures { tally.budget } else { 0 };
        let (ci_low, ci_high) = wilson_interval(bad, config.trials);
        points.push(SweepPoint {
            p,
            trials: config.trials,
            failures: tally.failures,
            budget_exceeded: tally.budget,
            failure_rate: bad as f64 / config.trials as f64,
            ci_low,
            ci_high,
        });
    }
    Ok(SweepResult { code: CodeSummary::of(code), config: config.clone(), points })
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "p,trials,failures,budget_exceeded,failure_rate,ci_low,ci_high";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for pt in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                pt.p, pt.trials, pt.failures, pt.budget_exceeded, pt.failure_rate, pt.ci_low, pt.ci_high
            ));
        }
        out
    }

    /// Config and code echo for the CSV sidecar.
    pub fn sidecar_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Where failure curves of a code family cross.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdEstimate {
    /// Larger codes do better at `low` and no better at `high`.
    Interval { low: f64, high: f64 },
    /// Larger codes do better on the whole grid.
    AtLeast(f64),
    /// Larger codes never do better on the grid.
    AtMost(f64),
}

impl ThresholdEstimate {
    pub fn contains(&self, p: f64) -> bool {
        match *self {
            ThresholdEstimate::Interval { low, high } => low <= p && p <= high,
            ThresholdEstimate::AtLeast(b) => p >= b,
            ThresholdEstimate::AtMost(b) => p <= b,
        }
    }
}

/// Compares the smallest and largest member of a family on a shared `p`
/// grid and returns the first grid interval where the larger code stops
/// doing strictly better.
pub fn threshold_estimate(results: &[SweepResult]) -> Result<ThresholdEstimate> {
    if results.len() < 2 {
        return Err(Error::invalid("threshold estimate needs at least two family members"));
    }
    let grid: Vec<f64> = results[0].points.iter().map(|pt| pt.p).collect();
    if grid.is_empty() {
        return Err(Error::invalid("empty p grid"));
    }
    for r in results {
        if r.points.iter().map(|pt| pt.p).ne(grid.iter().copied()) {
            return Err(Error::invalid("family members must share the p grid"));
        }
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("p grid must be strictly increasing"));
    }
    let small = results.iter().min_by_key(|r| r.code.n).expect("non-empty");
    let large = results.iter().max_by_key(|r| r.code.n).expect("non-empty");
    if small.code.n == large.code.n {
        return Err(Error::invalid("family members must differ in size"));
    }
    let better: Vec<bool> =
        small.points.iter().zip(&large.points).map(|(s, l)| l.failure_rate < s.failure_rate).collect();
    match better.iter().position(|&b| !b) {
        None => Ok(ThresholdEstimate::AtLeast(*grid.last().expect("non-empty"))),
        Some(0) => Ok(ThresholdEstimate::AtMost(grid[0])),
        Some(i) => Ok(ThresholdEstimate::Interval { low: grid[i - 1], high: grid[i] }),
    }
}

/// Syndrome of a sampled error, for callers that drive the decoder directly.
pub fn sample_syndrome(code: &CssCode, sample: &ErrorSample) -> Result<BinaryVector> {
    let mut s = decoder::syndrome(code, &sample.error)?;
    if let Some(flips) = &sample.syndrome_flips {
        s = s.add(&BinaryVector::new(s.len(), flips.clone())?)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{circulant, hypergraph_product};

    fn toric3() -> CssCode {
        let h = circulant(3, &[0, 1]).unwrap();
        hypergraph_product(&h, &h).unwrap()
    }

    #[test]
    fn depolarizing_sampling() {
        let mut rng = substream(1, 0);
        assert!(sample_depolarizing(50, 0.0, &mut rng).unwrap().is_identity());
        assert_eq!(sample_depolarizing(50, 1.0, &mut rng).unwrap().weight(), 50);
        let draws = 100_000u64;
        let hits: usize = (0..draws).map(|_| sample_depolarizing(1, 0.1, &mut rng).unwrap().weight()).sum();
        let sigma = (draws as f64 * 0.1 * 0.9).sqrt();
        assert!((hits as f64 - draws as f64 * 0.1).abs() < 3.0 * sigma);
        assert!(sample_depolarizing(3, 1.5, &mut rng).is_err());
    }

    #[test]
    fn erasure_sampling() {
        let mut rng = substream(2, 0);
        assert_eq!(sample_erasure(30, 0.0, &mut rng).unwrap().erasure_mask.unwrap().len(), 0);
        assert_eq!(sample_erasure(30, 1.0, &mut rng).unwrap().erasure_mask.unwrap().len(), 30);
        for _ in 0..200 {
            let s = sample_erasure(30, 0.3, &mut rng).unwrap();
            let mask = s.erasure_mask.unwrap();
            assert!(s.error.support().iter().all(|q| mask.binary_search(q).is_ok()));
        }
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.2775).abs() < 1e-3);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        let (lo, hi) = wilson_interval(10, 10);
        assert!(hi == 1.0 && lo < 1.0);
    }

    #[test]
    fn wilson_coverage() {
        // 2000 synthetic Bernoulli(0.1) streams of 200 draws each.
        let mut rng = substream(3, 0);
        let mut covered = 0;
        for _ in 0..2000 {
            let k = (0..200).filter(|_| rng.gen::<f64>() < 0.1).count() as u64;
            let (lo, hi) = wilson_interval(k, 200);
            covered += (lo <= 0.1 && 0.1 <= hi) as u32;
        }
        assert!((1840..=1960).contains(&covered), "{covered}");
    }

    fn config(channel: Channel, p_values: Vec<f64>, trials: u64) -> SweepConfig {
        SweepConfig {
            channel,
            p_values,
            trials,
            seed: 7,
            budget: ClusterBudget { max_cluster_size: 6, max_work: 1_000_000 },
            count_budget_failures: true,
        }
    }

    #[test]
    fn sweep_basics() {
        let code = toric3();
        let r = run_sweep(&code, &config(Channel::Erasure, vec![0.0], 1)).unwrap();
        assert_eq!(r.points[0].failure_rate, 0.0);
        let cfg = config(Channel::Depolarizing, vec![0.02, 0.1], 300);
        let a = run_sweep(&code, &cfg).unwrap();
        let b = run_sweep(&code, &cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        for pt in &a.points {
            assert!(pt.failures + pt.budget_exceeded <= pt.trials);
            assert!(pt.ci_low <= pt.failure_rate && pt.failure_rate <= pt.ci_high);
        }
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = one.install(|| run_sweep(&code, &cfg)).unwrap();
        assert_eq!(a.to_csv(), c.to_csv());
        assert!(run_sweep(&code, &config(Channel::Erasure, vec![0.1], 0)).is_err());
        assert!(run_sweep(&code, &config(Channel::Erasure, vec![1.1], 5)).is_err());
    }

    #[test]
    fn sidecar_round_trips() {
        let code = toric3();
        let r = run_sweep(&code, &config(Channel::Erasure, vec![0.05, 0.1], 50)).unwrap();
        let back: SweepResult = serde_json::from_str(&r.sidecar_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_csv().starts_with("p,trials,failures,budget_exceeded,failure_rate,ci_low,ci_high\n"));
    }

    fn synthetic(n: usize, grid: &[f64]) -> SweepResult {
        SweepResult {
            code: CodeSummary { n, k: 1, j: 2, ell: 2, z: 2 },
            config: config(Channel::Erasure, grid.to_vec(), 1),
            points: grid
                .iter()
                .map(|&p| {
                    let f = (p / 0.05).powi(n as i32).min(1.0);
                    SweepPoint { p, trials: 1, failures: 0, budget_exceeded: 0, failure_rate: f, ci_low: f, ci_high: f }
                })
                .collect(),
        }
    }

    #[test]
    fn threshold_examples() {
        let grid = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07];
        let est = threshold_estimate(&[synthetic(2, &grid), synthetic(4, &grid), synthetic(8, &grid)]).unwrap();
        assert_eq!(est, ThresholdEstimate::Interval { low: 0.04, high: 0.05 });
        assert!(est.contains(0.05));
        assert!(threshold_estimate(&[synthetic(2, &grid)]).is_err());
        let low = [0.01, 0.02];
        assert_eq!(threshold_estimate(&[synthetic(2, &low), synthetic(4, &low)]).unwrap(), ThresholdEstimate::AtLeast(0.02));
        let high = [0.06, 0.07];
        assert_eq!(threshold_estimate(&[synthetic(2, &high), synthetic(4, &high)]).unwrap(), ThresholdEstimate::AtMost(0.06));
        assert!(threshold_estimate(&[synthetic(2, &grid), synthetic(4, &low)]).is_err());
    }
}
