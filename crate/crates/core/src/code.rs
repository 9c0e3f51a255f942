//! Classical seed matrices and CSS codes, including the hypergraph product.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, RowSpace};

/// Attempts allowed to the configuration model before giving up.
pub const MAX_MATCHING_ATTEMPTS: usize = 1000;

/// Provenance stored alongside a code in its JSON file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeMeta {
    pub construction: String,
    /// Row supports of the seed matrices, in construction order.
    #[serde(default)]
    pub seed_rows: Vec<Vec<Vec<usize>>>,
}

/// A CSS code given by X-type checks `g_x` and Z-type checks `g_z`.
///
/// `j` and `ell` are the maximum column and row weights of the stacked
/// matrix `[g_x; g_z]`.
#[derive(Clone, Debug)]
pub struct CssCode {
    n: usize,
    g_x: BinaryMatrix,
    g_z: BinaryMatrix,
    k: usize,
    j: usize,
    ell: usize,
    meta: CodeMeta,
    x_stabilizers: OnceLock<RowSpace>,
    z_stabilizers: OnceLock<RowSpace>,
    gx_columns: OnceLock<Vec<Vec<usize>>>,
    gz_columns: OnceLock<Vec<Vec<usize>>>,
}

impl PartialEq for CssCode {
    fn eq(&self, other: &Self) -> bool {
        self.g_x == other.g_x && self.g_z == other.g_z && self.meta == other.meta
    }
}

impl CssCode {
    /// Verifies `g_x g_zᵀ = 0` and computes `k` from ranks.
    pub fn new(g_x: BinaryMatrix, g_z: BinaryMatrix, meta: CodeMeta) -> Result<Self> {
        if g_x.cols() != g_z.cols() {
            return Err(Error::DimensionMismatch { expected: g_x.cols(), found: g_z.cols() });
        }
        let n = g_x.cols();
        let product = g_x.mul_transpose(&g_z)?;
        if let Some((x_row, row)) = product.row_supports().iter().enumerate().find(|(_, r)| !r.is_empty()) {
            return Err(Error::NonCommuting { x_row, z_row: row[0] });
        }
        let x_space = RowSpace::new(&g_x);
        let z_space = RowSpace::new(&g_z);
        let k = n - x_space.rank() - z_space.rank();
        let stacked_cols: Vec<usize> =
            g_x.column_weights().iter().zip(g_z.column_weights()).map(|(a, b)| a + b).collect();
        let j = stacked_cols.into_iter().max().unwrap_or(0);
        let ell = g_x.max_row_weight().max(g_z.max_row_weight());
        Ok(Self {
            n,
            g_x,
            g_z,
            k,
            j,
            ell,
            meta,
            x_stabilizers: OnceLock::from(x_space),
            z_stabilizers: OnceLock::from(z_space),
            gx_columns: OnceLock::new(),
            gz_columns: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn g_x(&self) -> &BinaryMatrix {
        &self.g_x
    }

    pub fn g_z(&self) -> &BinaryMatrix {
        &self.g_z
    }

    /// Maximum column weight of `[g_x; g_z]`.
    pub fn j(&self) -> usize {
        self.j
    }

    /// Maximum row weight of `[g_x; g_z]`.
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Maximum column weight of `g_x` or `g_z` taken separately. This is the
    /// column limit of a single check type, which is what the closed-form
    /// hypergraph-product limits `j ≤ max(h, v)` refer to.
    pub fn sector_column_weight(&self) -> usize {
        self.g_x.max_column_weight().max(self.g_z.max_column_weight())
    }

    /// Degree bound `(ℓ−1)·j` of the connectivity graph.
    pub fn z_bound(&self) -> usize {
        self.ell.saturating_sub(1) * self.j
    }

    pub fn meta(&self) -> &CodeMeta {
        &self.meta
    }

    pub fn rank_x(&self) -> usize {
        self.x_stabilizers().rank()
    }

    pub fn rank_z(&self) -> usize {
        self.z_stabilizers().rank()
    }

    /// Row space of `g_x` (X-type stabilizers).
    pub fn x_stabilizers(&self) -> &RowSpace {
        self.x_stabilizers.get_or_init(|| RowSpace::new(&self.g_x))
    }

    /// Row space of `g_z` (Z-type stabilizers).
    pub fn z_stabilizers(&self) -> &RowSpace {
        self.z_stabilizers.get_or_init(|| RowSpace::new(&self.g_z))
    }

    /// Rows of `g_x` containing each qubit.
    pub fn gx_columns(&self) -> &[Vec<usize>] {
        self.gx_columns.get_or_init(|| self.g_x.column_supports())
    }

    /// Rows of `g_z` containing each qubit.
    pub fn gz_columns(&self) -> &[Vec<usize>] {
        self.gz_columns.get_or_init(|| self.g_z.column_supports())
    }

    /// Number of X-type plus Z-type checks.
    pub fn num_checks(&self) -> usize {
        self.g_x.rows() + self.g_z.rows()
    }

    /// Check rows with `g_x` first, then `g_z`.
    pub fn stacked_checks(&self) -> impl Iterator<Item = &[usize]> {
        self.g_x.row_supports().iter().chain(self.g_z.row_supports()).map(Vec::as_slice)
    }

    pub fn parameters_string(&self, d: Option<usize>) -> String {
        match d {
            Some(d) => format!("[[{},{},{}]]", self.n, self.k, d),
            None => format!("[[{},{},?]]", self.n, self.k),
        }
    }
}

/// A classical code given by its parity-check matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCode {
    pub h: BinaryMatrix,
    pub n_c: usize,
    pub k_c: usize,
    /// Maximum column weight.
    pub h_col_weight: usize,
    /// Maximum row weight.
    pub h_row_weight: usize,
}

impl ClassicalCode {
    pub fn new(h: BinaryMatrix) -> Self {
        let n_c = h.cols();
        let k_c = n_c - h.rank();
        Self { n_c, k_c, h_col_weight: h.max_column_weight(), h_row_weight: h.max_row_weight(), h }
    }
}

/// Square circulant whose row `r` is the first row shifted right by `r`.
pub fn circulant(size: usize, first_row_support: &[usize]) -> Result<BinaryMatrix> {
    if let Some(&bad) = first_row_support.iter().find(|&&i| i >= size) {
        return Err(Error::IndexOutOfRange { index: bad, len: size });
    }
    let mut base = first_row_support.to_vec();
    base.sort_unstable();
    if base.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("repeated index in circulant support"));
    }
    let rows = (0..size)
        .map(|r| {
            let mut row: Vec<usize> = base.iter().map(|&i| (i + r) % size).collect();
            row.sort_unstable();
            row
        })
        .collect();
    Ok(BinaryMatrix::from_rows_unchecked(size, rows))
}

/// Random `(h, v)`-regular parity-check matrix with `n_c·h/v` rows, drawn from
/// the configuration model. Matchings that put two sockets of one column in
/// the same row are rejected and redrawn.
pub fn random_regular_ldpc(n_c: usize, h: usize, v: usize, seed: u64) -> Result<BinaryMatrix> {
    if v == 0 || h == 0 || !(n_c * h).is_multiple_of(v) {
        return Err(Error::invalid(format!("n_c·h = {} is not divisible by v = {v}", n_c * h)));
    }
    if v > n_c {
        return Err(Error::invalid("row weight exceeds length"));
    }
    let rows = n_c * h / v;
    let mut rng = crate::rng::substream(seed, 0);
    let mut sockets: Vec<usize> = (0..n_c).flat_map(|c| std::iter::repeat_n(c, h)).collect();
    'attempt: for _ in 0..MAX_MATCHING_ATTEMPTS {
        sockets.shuffle(&mut rng);
        let mut out = Vec::with_capacity(rows);
        for chunk in sockets.chunks(v) {
            let mut row = chunk.to_vec();
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                continue 'attempt;
            }
            out.push(row);
        }
        return Ok(BinaryMatrix::from_rows_unchecked(n_c, out));
    }
    Err(Error::NoSolution(format!(
        "configuration model found no simple matching in {MAX_MATCHING_ATTEMPTS} attempts"
    )))
}

/// Hypergraph product of `h1` (r1×n1) and `h2` (r2×n2):
///
/// ```text
/// g_x = ( I(r2) ⊗ h1 | h2 ⊗ I(r1) )
/// g_z = ( h2ᵀ ⊗ I(n1) | I(n2) ⊗ h1ᵀ )
/// ```
///
/// giving `n = r2·n1 + n2·r1` qubits.
pub fn hypergraph_product(h1: &BinaryMatrix, h2: &BinaryMatrix) -> Result<CssCode> {
    hypergraph_product_with_meta(h1, h2, "hypergraph_product".to_string())
}

pub fn hypergraph_product_with_meta(
    h1: &BinaryMatrix,
    h2: &BinaryMatrix,
    construction: String,
) -> Result<CssCode> {
    let (r1, n1) = (h1.rows(), h1.cols());
    let (r2, n2) = (h2.rows(), h2.cols());
    let g_x = BinaryMatrix::identity(r2).kronecker(h1).hstack(&h2.kronecker(&BinaryMatrix::identity(r1)))?;
    let g_z = h2
        .transpose()
        .kronecker(&BinaryMatrix::identity(n1))
        .hstack(&BinaryMatrix::identity(n2).kronecker(&h1.transpose()))?;
    debug_assert_eq!(g_x.cols(), r2 * n1 + n2 * r1);
    let meta = CodeMeta {
        construction,
        seed_rows: vec![h1.row_supports().to_vec(), h2.row_supports().to_vec()],
    };
    CssCode::new(g_x, g_z, meta)
}

/// Dimension of the hypergraph product from seed ranks alone:
/// `k = (n1−ρ1)(r2−ρ2) + (r1−ρ1)(n2−ρ2)`.
pub fn hypergraph_product_dimension(h1: &BinaryMatrix, h2: &BinaryMatrix) -> usize {
    let (rho1, rho2) = (h1.rank(), h2.rank());
    (h1.cols() - rho1) * (h2.rows() - rho2) + (h1.rows() - rho1) * (h2.cols() - rho2)
}

/// Closed-form `[[n_c² + (n_c−k_c)², k_c², d_c]]` for the product with
/// `h1 = h2ᵀ`. Exact only for full-rank seeds; the rank-based `k` of the
/// constructed code is authoritative.
pub fn predicted_parameters(code: &ClassicalCode, d_c: usize) -> (usize, usize, usize) {
    let r = code.n_c - code.k_c;
    (code.n_c * code.n_c + r * r, code.k_c * code.k_c, d_c)
}
