//! Closed-form fault-tolerance bounds for `(j, ℓ)`-limited LDPC codes.
//!
//! Everything is a pure function of the weight limits. Products of many
//! small factors (tails over large clusters) are evaluated in log space.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree bound `z = (ℓ−1)·j` of the qubit graph.
pub fn degree_bound(j: usize, ell: usize) -> usize {
    ell.saturating_sub(1) * j
}

/// `p0 = 1/(z−1)` for a degree bound `z ≥ 2`.
pub fn threshold_for_degree(z: usize) -> Result<f64> {
    if z < 2 {
        return Err(Error::invalid(format!("degree bound z = {z} must be at least 2")));
    }
    Ok(1.0 / (z as f64 - 1.0))
}

/// Site-percolation threshold `p0 = 1/((ℓ−1)j − 1)` below which cluster
/// sizes have an exponential tail on any graph of degree at most `z`.
pub fn percolation_threshold(j: usize, ell: usize) -> Result<f64> {
    threshold_for_degree(degree_bound(j, ell))
}

/// `ln α_z(p)`; `-inf` at `p = 0`.
pub fn ln_alpha_z(p: f64, z: usize) -> Result<f64> {
    if z < 3 {
        return Err(Error::invalid("alpha_z needs z ≥ 3"));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid(format!("alpha_z needs 0 ≤ p < 1, got {p}")));
    }
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let p0 = threshold_for_degree(z)?;
    let m = (z - 2) as f64;
    Ok(p.ln() + m * (-p).ln_1p() - p0.ln() - m * (-p0).ln_1p())
}

/// Tail base `α_z(p) = p(1−p)^{z−2} / (p0(1−p0)^{z−2})`.
pub fn alpha_z(p: f64, z: usize) -> Result<f64> {
    Ok(ln_alpha_z(p, z)?.exp())
}

/// Upper bound on `n_s(x)` for `p ≤ p0`, using `n_s(p0) ≤ 1`:
/// `((1−p)/(1−p0))² · α_z(p)^s`.
pub fn cluster_tail_bound(s: usize, p: f64, z: usize) -> Result<f64> {
    let p0 = threshold_for_degree(z)?;
    let ln_a = ln_alpha_z(p, z)?;
    let ln_pref = 2.0 * ((-p).ln_1p() - (-p0).ln_1p());
    if s == 0 {
        return Ok(ln_pref.exp());
    }
    Ok((ln_pref + s as f64 * ln_a).exp())
}

/// `c = p0²(1−p0)^{2(z−2)}`, the right-hand side of `4p1(1−p1) = c`.
pub fn depolarizing_constant(z: usize) -> Result<f64> {
    if z < 3 {
        return Err(Error::invalid("depolarizing bound needs z ≥ 3"));
    }
    let p0 = threshold_for_degree(z)?;
    Ok((2.0 * p0.ln() + 2.0 * (z - 2) as f64 * (-p0).ln_1p()).exp())
}

/// Depolarizing bound `p1`: the root below 1/2 of `4p(1−p) = c`, evaluated
/// as `c / (2(1 + √(1−c)))` to avoid cancellation.
pub fn depolarizing_bound(z: usize) -> Result<f64> {
    let c = depolarizing_constant(z)?;
    Ok(c / (2.0 * (1.0 + (1.0 - c).sqrt())))
}

/// `[e(z−1)]⁻²`, the value `4p1(1−p1)` is claimed to stay below.
pub fn depolarizing_guard(z: usize) -> f64 {
    let x = E * (z as f64 - 1.0);
    1.0 / (x * x)
}

/// Chain-counting estimate `[2(z−1)]⁻²`.
pub fn heuristic_depolarizing_bound(z: usize) -> f64 {
    let x = 2.0 * (z as f64 - 1.0);
    1.0 / (x * x)
}

/// Rate limit `1 − 2/[z−1−(z−3)((z−2)/(z−1))^{ℓ−1}]` for code families with
/// power-law distance.
pub fn rate_bound(ell: usize, z: usize) -> Result<f64> {
    if z < 4 {
        return Err(Error::invalid("rate bound needs z ≥ 4"));
    }
    let zf = z as f64;
    let ratio = (zf - 2.0) / (zf - 1.0);
    let bracket = zf - 1.0 - (zf - 3.0) * ratio.powi(ell as i32 - 1);
    if bracket <= 0.0 {
        return Err(Error::invalid(format!("degenerate rate bracket {bracket}")));
    }
    Ok(1.0 - 2.0 / bracket)
}

/// Space-time degree bound `z' = j(ℓ+1)`.
pub fn spacetime_degree(j: usize, ell: usize) -> usize {
    j * (ell + 1)
}

/// Measurement-error threshold estimate `[2e(z'−1)]⁻²` with `z' = j(ℓ+1)`.
pub fn spacetime_bound(j: usize, ell: usize) -> f64 {
    let x = 2.0 * E * (spacetime_degree(j, ell) as f64 - 1.0);
    1.0 / (x * x)
}

/// Base of the violating-set tail per unit of cluster size squared:
/// `4(1−p)/p · α_z²`. The tail decays in `s` iff this is below one.
pub fn violating_set_base(p: f64, z: usize) -> Result<f64> {
    Ok(((4.0 * (1.0 - p) / p).ln() + 2.0 * ln_alpha_z(p, z)?).exp())
}

fn ln_violating_set_tail(s: f64, p: f64, z: usize) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("violating-set tail needs 0 < p < 1, got {p}")));
    }
    let p0 = threshold_for_degree(z)?;
    let ln_a = ln_alpha_z(p, z)?;
    let ln_pref = 2.0 * ((-p).ln_1p() - (-p0).ln_1p());
    Ok(0.5 * s * (4.0 * (1.0 - p) / p).ln() + ln_pref + s * ln_a)
}

/// Bound on the probability that a violating size-`s` set contains a given
/// site: `[4(1−p)/p]^{s/2} · ((1−p)/(1−p0))² · α_z^s`.
pub fn violating_set_tail(s: usize, p: f64, z: usize) -> Result<f64> {
    Ok(ln_violating_set_tail(s as f64, p, z)?.exp())
}

/// Solves `f(x) = 0` on `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must
/// have opposite signs (or one of them be zero).
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoSolution(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol || mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Natural binary entropy.
pub fn entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.ln() - (1.0 - x) * (-x).ln_1p()
}

/// Typical relative distance of the random `(h, v)`-regular ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GvSolution {
    pub h: usize,
    pub v: usize,
    /// Power used in the `(1±y)^k` terms; the row weight `v` by default.
    pub exponent: usize,
    pub rate_c: f64,
    pub delta_c: f64,
    pub y_root: f64,
    /// `|(1+y)^{k−1}+(1−y)^{k−1} − (1−δ)[(1+y)^k+(1−y)^k]|` at the root.
    pub y_residual: f64,
}

impl GvSolution {
    /// `d/√n = δ_c·v/√(h²+v²)` for the hypergraph product of the ensemble.
    pub fn distance_per_sqrt_n(&self) -> f64 {
        let (h, v) = (self.h as f64, self.v as f64);
        self.delta_c * v / (h * h + v * v).sqrt()
    }
}

fn y_equation(y: f64, delta: f64, k: usize) -> f64 {
    let k = k as i32;
    (1.0 + y).powi(k - 1) + (1.0 - y).powi(k - 1) - (1.0 - delta) * ((1.0 + y).powi(k) + (1.0 - y).powi(k))
}

/// Positive root `y` of the auxiliary equation for a given `δ`.
pub fn gv_auxiliary_root(delta: f64, k: usize) -> Result<f64> {
    let f = |y: f64| y_equation(y, delta, k);
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoSolution(format!("no bracketing root for delta = {delta}")));
        }
    }
    bisect(f, 0.0, hi, 0.0)
}

/// Left-hand side `H(δ) + (1−R)p_v(R, δ)` of the distance inequality.
pub fn gv_lhs(delta: f64, h: usize, v: usize, k: usize) -> Result<f64> {
    let rate = 1.0 - h as f64 / v as f64;
    let y = gv_auxiliary_root(delta, k)?;
    let ki = k as i32;
    let hd = entropy(delta);
    let p_v = (0.5 * (1.0 + y).powi(ki) + 0.5 * (1.0 - y).powi(ki)).ln() - delta * v as f64 * y.ln() - v as f64 * hd;
    Ok(hd + (1.0 - rate) * p_v)
}

/// [`gv_distance_with_exponent`] with exponent `v`.
pub fn gv_distance(h: usize, v: usize) -> Result<GvSolution> {
    gv_distance_with_exponent(h, v, v)
}

/// Largest `δ ∈ (0, 1/2)` with `H(δ) + (1−R)p_v(R, δ) ≤ 0`. A grid scan
/// from `1/2` downward brackets the last sign change, then bisection
/// refines it to `1e−10`.
pub fn gv_distance_with_exponent(h: usize, v: usize, exponent: usize) -> Result<GvSolution> {
    if !(2 <= h && h < v) {
        return Err(Error::invalid(format!("need 2 ≤ h < v, got h = {h}, v = {v}")));
    }
    if exponent < 2 {
        return Err(Error::invalid("exponent must be at least 2"));
    }
    let f = |d: f64| gv_lhs(d, h, v, exponent);
    const STEPS: usize = 1000;
    let step = 0.5 / STEPS as f64;
    let mut upper: Option<f64> = None;
    let mut delta_c = None;
    for i in (1..STEPS).rev() {
        let d = i as f64 * step;
        if f(d)? <= 0.0 {
            delta_c = Some(match upper {
                None => d,
                Some(u) => bisect(|x| f(x).unwrap_or(f64::NAN), d, u, 1e-10)?,
            });
            break;
        }
        upper = Some(d);
    }
    let delta_c = delta_c.ok_or_else(|| Error::NoSolution("inequality never satisfied on (0, 1/2)".into()))?;
    let y_root = gv_auxiliary_root(delta_c, exponent)?;
    Ok(GvSolution {
        h,
        v,
        exponent,
        rate_c: 1.0 - h as f64 / v as f64,
        delta_c,
        y_root,
        y_residual: y_equation(y_root, delta_c, exponent).abs(),
    })
}

/// Quantities for the blocklength estimate of the hypergraph product built
/// from a random `(h, v)` seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlocklengthModel {
    pub h: usize,
    pub v: usize,
    /// `v(v+h−1)`.
    pub z: usize,
    /// Syndrome measurements per cycle, `2v(v+h−1)`.
    pub measurements: usize,
    pub p: f64,
    /// `δ_c·v/√(h²+v²)`.
    pub distance_per_sqrt_n: f64,
}

impl BlocklengthModel {
    pub fn new(h: usize, v: usize, p: f64) -> Result<Self> {
        let gv = gv_distance(h, v)?;
        let z = v * (v + h - 1);
        Ok(Self { h, v, z, measurements: 2 * z, p, distance_per_sqrt_n: gv.distance_per_sqrt_n() })
    }

    pub fn distance(&self, n: f64) -> f64 {
        self.distance_per_sqrt_n * n.sqrt()
    }

    /// `ln(M · tail(d(n)) · d(n)/n)`.
    pub fn ln_failure_per_cycle(&self, n: f64) -> Result<f64> {
        let d = self.distance(n);
        Ok((self.measurements as f64).ln() + ln_violating_set_tail(d, self.p, self.z)? + d.ln() - n.ln())
    }

    fn satisfied(&self, n: u64, ln_target: f64) -> Result<bool> {
        let nf = n as f64;
        Ok(self.distance(nf) >= 1.0 && self.ln_failure_per_cycle(nf)? <= ln_target)
    }
}

/// Default single-qubit error rate for [`min_blocklength`]: the rigorous
/// `p1(z)` scaled down by `e²`, the factor separating it from the
/// chain-counting estimate `[2(z−1)]⁻²`. At `p1` itself the tail does not
/// decay fast enough for any practical blocklength.
pub fn default_blocklength_p(h: usize, v: usize) -> Result<f64> {
    Ok(depolarizing_bound(v * (v + h - 1))? / (E * E))
}

/// Upper limit of the blocklength search.
pub const MAX_BLOCKLENGTH: u64 = 1_000_000_000;

/// Smallest `n` with `d(n) ≥ 1` and `M · tail(d(n), p, z) · d(n)/n ≤ pf_per_cycle`.
pub fn min_blocklength(h: usize, v: usize, p: f64, pf_per_cycle: f64) -> Result<u64> {
    let model = BlocklengthModel::new(h, v, p)?;
    let p1 = depolarizing_bound(model.z)?;
    if !(p > 0.0 && p < p1) {
        return Err(Error::invalid(format!("p = {p} must lie in (0, p1 = {p1})")));
    }
    if pf_per_cycle.is_nan() || pf_per_cycle <= 0.0 {
        return Err(Error::invalid("target failure probability must be positive"));
    }
    let ln_target = pf_per_cycle.ln();
    let mut lo = (1.0 / (model.distance_per_sqrt_n * model.distance_per_sqrt_n)).floor() as u64;
    while model.distance(lo as f64) >= 1.0 && lo > 0 {
        lo -= 1;
    }
    // `lo` fails the distance constraint; grow `hi` until the condition holds.
    let mut hi = lo.max(1);
    while !model.satisfied(hi, ln_target)? {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi > MAX_BLOCKLENGTH {
            if model.satisfied(MAX_BLOCKLENGTH, ln_target)? {
                hi = MAX_BLOCKLENGTH;
                break;
            }
            return Err(Error::NoSolution(format!("no n ≤ {MAX_BLOCKLENGTH} meets the target")));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if model.satisfied(mid, ln_target)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// All closed-form bounds for a pair of weight limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub j: usize,
    pub ell: usize,
    pub z: usize,
    pub p0: f64,
    pub p1: f64,
    pub p1_heuristic: f64,
    /// `4p1(1−p1)`.
    pub depolarizing_constant: f64,
    /// `[e(z−1)]⁻²`.
    pub depolarizing_guard: f64,
    pub guard_satisfied: bool,
    pub z_prime: usize,
    pub p_ft: f64,
    pub rate_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gv: Option<GvSolution>,
}

impl BoundsReport {
    pub fn new(j: usize, ell: usize) -> Result<Self> {
        let z = degree_bound(j, ell);
        if z < 3 {
            return Err(Error::invalid(format!("z = (ℓ−1)j = {z} must be at least 3")));
        }
        let p1 = depolarizing_bound(z)?;
        let c = depolarizing_constant(z)?;
        let guard = depolarizing_guard(z);
        Ok(Self {
            j,
            ell,
            z,
            p0: percolation_threshold(j, ell)?,
            p1,
            p1_heuristic: heuristic_depolarizing_bound(z),
            depolarizing_constant: c,
            depolarizing_guard: guard,
            guard_satisfied: c < guard,
            z_prime: spacetime_degree(j, ell),
            p_ft: spacetime_bound(j, ell),
            rate_bound: rate_bound(ell, z).ok(),
            gv: None,
        })
    }

    pub fn with_gv(mut self, h: usize, v: usize, exponent: Option<usize>) -> Result<Self> {
        self.gv = Some(gv_distance_with_exponent(h, v, exponent.unwrap_or(v))?);
        Ok(self)
    }
}
