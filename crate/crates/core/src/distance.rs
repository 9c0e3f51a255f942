//! Distance estimation for CSS codes.
//!
//! A logical operator of X type lies in `ker(g_z)` but not in the row space
//! of `g_x`; Z type is the mirror image. The code distance is the smaller of
//! the two minimum weights.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{words_for, BinaryMatrix, BinaryVector, BitMatrix, Echelon, RowSpace};

/// Default cap on candidate supports examined by [`distance_exhaustive`].
pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 5_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// X-type operators, checked by `g_z`.
    X,
    /// Z-type operators, checked by `g_x`.
    Z,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::X, Sector::Z];

    /// `(checks, stabilizers)` for this sector.
    fn matrices(self, code: &CssCode) -> (&BinaryMatrix, &RowSpace) {
        match self {
            Sector::X => (code.g_z(), code.x_stabilizers()),
            Sector::Z => (code.g_x(), code.z_stabilizers()),
        }
    }
}

/// A logical operator of one sector, as the support of its X or Z part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Logical {
    pub sector: Sector,
    pub support: BinaryVector,
}

impl Logical {
    pub fn weight(&self) -> usize {
        self.support.weight()
    }

    pub fn to_pauli(&self) -> crate::pauli::PauliVector {
        match self.sector {
            Sector::X => crate::pauli::PauliVector::x_type(self.support.clone()),
            Sector::Z => crate::pauli::PauliVector::z_type(self.support.clone()),
        }
    }
}

/// How [`distance_exhaustive`] walks candidate supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Enumeration {
    /// Only supports that are connected through shared check rows. A
    /// minimum-weight logical is always connected this way: if its support
    /// split into pieces touching disjoint rows, each piece would have zero
    /// syndrome on its own and one of them would be a lighter logical.
    #[default]
    Connected,
    /// Every support of weight at most `w_max`.
    AllSupports,
}

/// Which distance routine a caller should use for a given instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceStrategy {
    Exhaustive,
    Randomized,
}

impl DistanceStrategy {
    pub fn choose(n: usize, w_max: usize) -> Self {
        if n <= 64 || w_max <= 4 {
            DistanceStrategy::Exhaustive
        } else {
            DistanceStrategy::Randomized
        }
    }
}

/// Smallest logical weight seen by `iterations` rounds of randomized
/// information-set search. Each round uses its own random stream, so the
/// result is deterministic in `seed` and non-increasing in `iterations`.
pub fn distance_upper_bound(code: &CssCode, iterations: u64, seed: u64) -> Result<usize> {
    Ok(find_low_weight_logical(code, iterations, seed)?.map_or(code.n(), |l| l.weight()))
}

/// The lightest logical operator met by the randomized search, if any.
pub fn find_low_weight_logical(code: &CssCode, iterations: u64, seed: u64) -> Result<Option<Logical>> {
    if code.k() == 0 {
        return Err(Error::invalid("code encodes no logical qubits"));
    }
    let searches: Vec<SectorSearch> = Sector::BOTH.iter().map(|&s| SectorSearch::new(code, s)).collect();
    let best = (0..iterations)
        .into_par_iter()
        .filter_map(|it| {
            let mut rng = crate::rng::substream(seed, it);
            searches
                .iter()
                .filter_map(|s| s.round(&mut rng))
                .min_by_key(|l| (l.weight(), l.sector == Sector::Z))
                .map(|l| (l.weight(), it, l))
        })
        .min_by_key(|(w, it, _)| (*w, *it))
        .map(|(_, _, l)| l);
    Ok(best)
}

struct SectorSearch<'a> {
    sector: Sector,
    n: usize,
    kernel: Vec<BinaryVector>,
    stabilizers: &'a RowSpace,
}

impl<'a> SectorSearch<'a> {
    fn new(code: &'a CssCode, sector: Sector) -> Self {
        let (checks, stabilizers) = sector.matrices(code);
        Self { sector, n: code.n(), kernel: checks.kernel_basis(), stabilizers }
    }

    /// One information-set round: permute columns, reduce the kernel basis
    /// and inspect single rows and pairs of rows of the echelon form.
    fn round(&self, rng: &mut impl rand::Rng) -> Option<Logical> {
        let n = self.n;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut position = vec![0usize; n];
        for (p, &q) in order.iter().enumerate() {
            position[q] = p;
        }
        let mut m = BitMatrix::zeros(self.kernel.len(), n);
        for (r, v) in self.kernel.iter().enumerate() {
            for &q in v.support() {
                m.set(r, position[q]);
            }
        }
        let ech = Echelon::reduce(m, n);
        let rows = ech.pivots.len();
        let mat = &ech.matrix;
        let mut best: Option<Logical> = None;
        let mut best_w = usize::MAX;
        let mut scratch = vec![0u64; words_for(n).max(1)];
        let consider = |words: &[u64], best: &mut Option<Logical>, best_w: &mut usize| {
            let w: usize = words.iter().map(|x| x.count_ones() as usize).sum();
            if w == 0 || w >= *best_w {
                return;
            }
            let support: Vec<usize> = {
                let permuted = BinaryVector::from_words(n, words);
                let mut s: Vec<usize> = permuted.support().iter().map(|&p| order[p]).collect();
                s.sort_unstable();
                s
            };
            let v = BinaryVector::from_sorted_unchecked(n, support);
            if !self.stabilizers.contains(&v) {
                *best_w = w;
                *best = Some(Logical { sector: self.sector, support: v });
            }
        };
        for i in 0..rows {
            consider(mat.row(i), &mut best, &mut best_w);
        }
        for i in 0..rows {
            for j in (i + 1)..rows {
                let (a, b) = (mat.row(i), mat.row(j));
                let w: usize = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as usize).sum();
                if w >= best_w {
                    continue;
                }
                for (s, (x, y)) in scratch.iter_mut().zip(a.iter().zip(b)) {
                    *s = x ^ y;
                }
                consider(&scratch, &mut best, &mut best_w);
            }
        }
        best
    }
}

/// Exact minimum logical weight up to `w_max`, or `None` if every logical
/// has weight greater than `w_max`. Uses [`Enumeration::Connected`] and
/// [`DEFAULT_EXHAUSTIVE_BUDGET`].
pub fn distance_exhaustive(code: &CssCode, w_max: usize) -> Result<Option<usize>> {
    Ok(min_weight_logical_exhaustive(code, w_max, Enumeration::Connected, DEFAULT_EXHAUSTIVE_BUDGET)?
        .map(|l| l.weight()))
}

/// The first minimum-weight logical found by exhaustive enumeration over both
/// sectors (X sector first), with an explicit enumeration mode and budget on
/// the number of candidate supports.
pub fn min_weight_logical_exhaustive(
    code: &CssCode,
    w_max: usize,
    mode: Enumeration,
    budget: u64,
) -> Result<Option<Logical>> {
    if w_max == 0 {
        return Ok(None);
    }
    let w_max = w_max.min(code.n());
    if mode == Enumeration::AllSupports {
        let total: f64 = (1..=w_max).map(|w| binomial(code.n(), w)).sum();
        if total > budget as f64 {
            return Err(Error::BudgetExceeded(format!(
                "{total:.3e} supports of weight ≤ {w_max} exceed budget {budget}"
            )));
        }
    }
    let mut best: Option<Logical> = None;
    let mut used = 0u64;
    for sector in Sector::BOTH {
        let limit = best.as_ref().map_or(w_max, |l| l.weight() - 1);
        if limit == 0 {
            break;
        }
        let (checks, stabilizers) = sector.matrices(code);
        let mut walker = SupportWalker::new(checks, stabilizers, limit, budget - used.min(budget));
        match mode {
            Enumeration::Connected => walker.connected()?,
            Enumeration::AllSupports => walker.all_supports()?,
        }
        used += walker.examined;
        if let Some(s) = walker.best {
            best = Some(Logical { sector, support: BinaryVector::from_sorted_unchecked(code.n(), s) });
        }
    }
    Ok(best)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Depth-first walk over candidate supports with incremental syndrome
/// tracking. `best` holds the lightest non-stabilizer kernel element found so
/// far; the walk never descends past its weight.
struct SupportWalker<'a> {
    n: usize,
    qubit_checks: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
    stabilizers: &'a RowSpace,
    limit: usize,
    budget: u64,
    examined: u64,
    parity: Vec<bool>,
    odd: usize,
    current: Vec<usize>,
    best: Option<Vec<usize>>,
}

impl<'a> SupportWalker<'a> {
    fn new(checks: &BinaryMatrix, stabilizers: &'a RowSpace, limit: usize, budget: u64) -> Self {
        let n = checks.cols();
        let qubit_checks = checks.column_supports();
        let mut neighbors = vec![Vec::new(); n];
        for row in checks.row_supports() {
            for &a in row {
                neighbors[a].extend(row.iter().copied().filter(|&b| b != a));
            }
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
            nb.dedup();
        }
        Self {
            n,
            qubit_checks,
            neighbors,
            stabilizers,
            limit,
            budget,
            examined: 0,
            parity: vec![false; checks.rows()],
            odd: 0,
            current: Vec::new(),
            best: None,
        }
    }

    fn toggle(&mut self, q: usize) {
        for &c in &self.qubit_checks[q] {
            self.parity[c] = !self.parity[c];
            if self.parity[c] {
                self.odd += 1;
            } else {
                self.odd -= 1;
            }
        }
    }

    fn bound(&self) -> usize {
        self.best.as_ref().map_or(self.limit, |b| b.len() - 1)
    }

    /// Counts the current support and records it if it is a logical.
    fn visit(&mut self) -> Result<()> {
        self.examined += 1;
        if self.examined > self.budget {
            return Err(Error::BudgetExceeded(format!("more than {} candidate supports", self.budget)));
        }
        if self.odd == 0 {
            let mut s = self.current.clone();
            s.sort_unstable();
            let v = BinaryVector::from_sorted_unchecked(self.n, s);
            if !self.stabilizers.contains(&v) {
                let support = v.support().to_vec();
                self.best = Some(support);
            }
        }
        Ok(())
    }

    fn all_supports(&mut self) -> Result<()> {
        self.combinations(0)
    }

    fn combinations(&mut self, start: usize) -> Result<()> {
        if self.current.len() >= self.bound() {
            return Ok(());
        }
        for q in start..self.n {
            self.current.push(q);
            self.toggle(q);
            self.visit()?;
            self.combinations(q + 1)?;
            self.toggle(q);
            self.current.pop();
            if self.current.len() >= self.bound() {
                break;
            }
        }
        Ok(())
    }

    /// Enumerates each connected support exactly once, rooted at its smallest
    /// qubit, by growing through an extension set of exclusive neighbours.
    fn connected(&mut self) -> Result<()> {
        let mut closed = vec![0u32; self.n];
        for root in 0..self.n {
            if self.bound() == 0 {
                break;
            }
            self.current.push(root);
            self.toggle(root);
            closed[root] += 1;
            for &u in &self.neighbors[root] {
                closed[u] += 1;
            }
            self.visit()?;
            let ext: Vec<usize> = self.neighbors[root].iter().copied().filter(|&u| u > root).collect();
            self.extend(root, ext, &mut closed)?;
            for &u in &self.neighbors[root] {
                closed[u] -= 1;
            }
            closed[root] -= 1;
            self.toggle(root);
            self.current.pop();
        }
        Ok(())
    }

    fn extend(&mut self, root: usize, mut ext: Vec<usize>, closed: &mut [u32]) -> Result<()> {
        while let Some(w) = ext.pop() {
            if self.current.len() >= self.bound() {
                return Ok(());
            }
            let mut next_ext = ext.clone();
            for &u in &self.neighbors[w] {
                if u > root && closed[u] == 0 {
                    next_ext.push(u);
                }
            }
            self.current.push(w);
            self.toggle(w);
            closed[w] += 1;
            for &u in &self.neighbors[w] {
                closed[u] += 1;
            }
            self.visit()?;
            self.extend(root, next_ext, closed)?;
            for &u in &self.neighbors[w] {
                closed[u] -= 1;
            }
            closed[w] -= 1;
            self.toggle(w);
            self.current.pop();
        }
        Ok(())
    }
}
