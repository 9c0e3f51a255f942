//! File formats: alist and dense text for binary matrices, JSON for CSS
//! codes, and seed specifications for the `construct` front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::code::{circulant, random_regular_ldpc, CodeMeta, CssCode};
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

/// Largest row or column count accepted by the parsers.
pub const MAX_DIMENSION: usize = 1 << 20;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn check_dimension(line: usize, what: &str, value: usize) -> Result<()> {
    if value > MAX_DIMENSION {
        return Err(parse_err(line, format!("{what} = {value} exceeds {MAX_DIMENSION}")));
    }
    Ok(())
}

/// Non-empty lines with their 1-based line numbers.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(line, format!("bad integer {t:?}"))))
        .collect()
}

/// Reads an alist file: `n m`, the maximum column and row weights, the
/// column weights, the row weights, then 1-based row indices per column and
/// column indices per row. Zero entries are padding and are skipped.
pub fn read_alist(text: &str) -> Result<BinaryMatrix> {
    let mut lines = numbered_lines(text);
    let mut next = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (no, l) = lines.next().ok_or_else(|| parse_err(0, format!("missing {what}")))?;
        Ok((no, parse_numbers(no, l)?))
    };
    let (no, dims) = next("dimensions")?;
    let [n, m] = dims[..] else { return Err(parse_err(no, "expected `n m`")) };
    check_dimension(no, "n", n)?;
    check_dimension(no, "m", m)?;
    let (no, maxes) = next("maximum weights")?;
    let [max_col, max_row] = maxes[..] else { return Err(parse_err(no, "expected two maximum weights")) };
    let (no, col_weights) = next("column weights")?;
    if col_weights.len() != n {
        return Err(parse_err(no, format!("expected {n} column weights, got {}", col_weights.len())));
    }
    if col_weights.iter().any(|&w| w > max_col) {
        return Err(parse_err(no, "column weight above the declared maximum"));
    }
    let (no, row_weights) = next("row weights")?;
    if row_weights.len() != m {
        return Err(parse_err(no, format!("expected {m} row weights, got {}", row_weights.len())));
    }
    if row_weights.iter().any(|&w| w > max_row) {
        return Err(parse_err(no, "row weight above the declared maximum"));
    }
    let mut read_lists = |count: usize, weights: &[usize], bound: usize, kind: &str| -> Result<Vec<Vec<usize>>> {
        let mut lists = Vec::new();
        for &w in weights.iter().take(count) {
            let (no, entries) = next(kind)?;
            let list: Vec<usize> = entries.into_iter().filter(|&e| e != 0).collect();
            if list.len() != w {
                return Err(parse_err(no, format!("{kind} has {} entries, weight says {w}", list.len())));
            }
            if let Some(&bad) = list.iter().find(|&&e| e > bound) {
                return Err(parse_err(no, format!("index {bad} exceeds {bound}")));
            }
            let mut sorted: Vec<usize> = list.iter().map(|e| e - 1).collect();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(parse_err(no, format!("repeated index in {kind}")));
            }
            lists.push(sorted);
        }
        Ok(lists)
    };
    let columns = read_lists(n, &col_weights, m, "column list")?;
    let rows = read_lists(m, &row_weights, n, "row list")?;
    let matrix = BinaryMatrix::new(n, rows)?;
    if matrix.column_supports() != columns {
        return Err(parse_err(0, "column and row lists describe different matrices"));
    }
    Ok(matrix)
}

/// Writes `m` in alist format with zero padding to the maximum weights.
pub fn write_alist(m: &BinaryMatrix) -> String {
    let cols = m.column_supports();
    let col_w: Vec<usize> = cols.iter().map(Vec::len).collect();
    let row_w = m.row_weights();
    let max_c = col_w.iter().copied().max().unwrap_or(0);
    let max_r = row_w.iter().copied().max().unwrap_or(0);
    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.cols(), m.rows());
    let _ = writeln!(out, "{max_c} {max_r}");
    let _ = writeln!(out, "{}", join(&mut col_w.iter().copied()));
    let _ = writeln!(out, "{}", join(&mut row_w.iter().copied()));
    let padded = |list: &[usize], width: usize| {
        // An all-padding line keeps one zero so the line is not blank.
        let mut it = list.iter().map(|&i| i + 1).chain(std::iter::repeat_n(0, width.max(1) - list.len()));
        join(&mut it)
    };
    for c in &cols {
        let _ = writeln!(out, "{}", padded(c, max_c));
    }
    for r in m.row_supports() {
        let _ = writeln!(out, "{}", padded(r, max_r));
    }
    out
}

/// One row per line of `0`/`1` characters. Blank lines and lines starting
/// with `#` are skipped; spaces inside a row are ignored.
pub fn read_dense(text: &str) -> Result<BinaryMatrix> {
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut cols = None;
    for (no, line) in numbered_lines(text) {
        if line.starts_with('#') {
            continue;
        }
        let mut support = Vec::new();
        let mut width = 0;
        for ch in line.chars().filter(|c| !c.is_whitespace()) {
            match ch {
                '0' => {}
                '1' => support.push(width),
                other => return Err(parse_err(no, format!("unexpected character {other:?}"))),
            }
            width += 1;
        }
        check_dimension(no, "row length", width)?;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => return Err(parse_err(no, format!("row has {width} entries, expected {c}"))),
            _ => {}
        }
        rows.push(support);
        check_dimension(no, "row count", rows.len())?;
    }
    let cols = cols.ok_or_else(|| parse_err(0, "no rows"))?;
    BinaryMatrix::new(cols, rows)
}

pub fn write_dense(m: &BinaryMatrix) -> String {
    let mut out = String::new();
    for row in m.to_dense() {
        out.extend(row.iter().map(|&b| if b == 1 { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

/// On-disk form of a CSS code. Field order is fixed, so serialising a parsed
/// canonical file reproduces it byte for byte.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub n: usize,
    pub gx: Vec<Vec<usize>>,
    pub gz: Vec<Vec<usize>>,
    #[serde(default)]
    pub meta: CodeMeta,
}

impl CodeFile {
    pub fn from_code(code: &CssCode) -> Self {
        Self {
            n: code.n(),
            gx: code.g_x().row_supports().to_vec(),
            gz: code.g_z().row_supports().to_vec(),
            meta: code.meta().clone(),
        }
    }

    pub fn into_code(self) -> Result<CssCode> {
        check_dimension(0, "n", self.n)?;
        check_dimension(0, "gx rows", self.gx.len())?;
        check_dimension(0, "gz rows", self.gz.len())?;
        CssCode::new(BinaryMatrix::new(self.n, self.gx)?, BinaryMatrix::new(self.n, self.gz)?, self.meta)
    }
}

/// Canonical single-line JSON followed by a newline.
pub fn code_to_json(code: &CssCode) -> Result<String> {
    let mut s = serde_json::to_string(&CodeFile::from_code(code))?;
    s.push('\n');
    Ok(s)
}

pub fn code_from_json(text: &str) -> Result<CssCode> {
    serde_json::from_str::<CodeFile>(text)?.into_code()
}

pub fn read_code_file(path: &Path) -> Result<CssCode> {
    code_from_json(&std::fs::read_to_string(path)?)
}

/// Where a classical seed matrix comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedSpec {
    /// `circulant:L:i1,i2,…`
    Circulant { size: usize, support: Vec<usize> },
    /// `random:n:h:v:seed`, an `(h, v)`-regular matrix with `n` columns.
    Random { n: usize, h: usize, v: usize, seed: u64 },
    /// `alist:PATH`, or any other string taken as a path.
    Alist(PathBuf),
    /// `dense:PATH`
    Dense(PathBuf),
}

fn spec_number<T: FromStr>(field: &str, what: &str) -> Result<T> {
    field.trim().parse().map_err(|_| parse_err(1, format!("bad {what} {field:?}")))
}

impl FromStr for SeedSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("circulant:") {
            let (size, support) =
                rest.split_once(':').ok_or_else(|| parse_err(1, "expected circulant:L:i1,i2,…"))?;
            let size: usize = spec_number(size, "circulant size")?;
            if size == 0 {
                return Err(parse_err(1, "circulant size must be positive"));
            }
            check_dimension(1, "circulant size", size)?;
            let support = support
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| spec_number(t, "circulant index"))
                .collect::<Result<Vec<usize>>>()?;
            if support.is_empty() {
                return Err(parse_err(1, "circulant support is empty"));
            }
            if let Some(&bad) = support.iter().find(|&&i| i >= size) {
                return Err(parse_err(1, format!("circulant index {bad} ≥ size {size}")));
            }
            return Ok(SeedSpec::Circulant { size, support });
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let fields: Vec<&str> = rest.split(':').collect();
            let [n, h, v, seed] = fields[..] else {
                return Err(parse_err(1, "expected random:n:h:v:seed"));
            };
            let n: usize = spec_number(n, "length")?;
            let h: usize = spec_number(h, "column weight")?;
            let v: usize = spec_number(v, "row weight")?;
            let seed: u64 = spec_number(seed, "seed")?;
            check_dimension(1, "n", n)?;
            if h == 0 || v == 0 || h > 64 || v > n {
                return Err(parse_err(1, format!("invalid weights h = {h}, v = {v} for n = {n}")));
            }
            if !(n * h).is_multiple_of(v) {
                return Err(parse_err(1, format!("n·h = {} is not divisible by v = {v}", n * h)));
            }
            return Ok(SeedSpec::Random { n, h, v, seed });
        }
        if let Some(path) = s.strip_prefix("dense:") {
            return Ok(SeedSpec::Dense(PathBuf::from(path)));
        }
        let path = s.strip_prefix("alist:").unwrap_or(s);
        if path.is_empty() {
            return Err(parse_err(1, "empty seed specification"));
        }
        Ok(SeedSpec::Alist(PathBuf::from(path)))
    }
}

impl std::fmt::Display for SeedSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeedSpec::Circulant { size, support } => {
                let s: Vec<String> = support.iter().map(usize::to_string).collect();
                write!(f, "circulant:{size}:{}", s.join(","))
            }
            SeedSpec::Random { n, h, v, seed } => write!(f, "random:{n}:{h}:{v}:{seed}"),
            SeedSpec::Alist(p) => write!(f, "alist:{}", p.display()),
            SeedSpec::Dense(p) => write!(f, "dense:{}", p.display()),
        }
    }
}

impl SeedSpec {
    /// Builds the matrix, reading files for path specs.
    pub fn to_matrix(&self) -> Result<BinaryMatrix> {
        match self {
            SeedSpec::Circulant { size, support } => circulant(*size, support),
            SeedSpec::Random { n, h, v, seed } => random_regular_ldpc(*n, *h, *v, *seed),
            SeedSpec::Alist(p) => read_alist(&std::fs::read_to_string(p)?),
            SeedSpec::Dense(p) => read_dense(&std::fs::read_to_string(p)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::hypergraph_product_with_meta;
    use proptest::prelude::*;

    const SMALL_ALIST: &str = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";

    #[test]
    fn alist_example() {
        let m = read_alist(SMALL_ALIST).unwrap();
        assert_eq!(m.to_dense(), vec![vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(write_alist(&m), SMALL_ALIST);
        // Padding is optional.
        let unpadded = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n";
        assert_eq!(read_alist(unpadded).unwrap(), m);
    }

    #[test]
    fn alist_errors() {
        assert!(read_alist("").is_err());
        assert!(read_alist("3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n").is_err());
        // Column lists disagree with row lists.
        assert!(read_alist("3 2\n2 2\n1 2 1\n2 2\n2 0\n1 2\n1 0\n1 2\n2 3\n").is_err());
        assert!(read_alist("3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 4\n2 3\n").is_err());
        assert!(matches!(read_alist("3 x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(read_alist("99999999999 1\n").is_err());
    }

    #[test]
    fn dense_example() {
        let m = read_dense("# comment\n110\n\n011\n").unwrap();
        assert_eq!(m.to_dense(), vec![vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(write_dense(&m), "110\n011\n");
        assert!(read_dense("110\n01\n").is_err());
        assert!(read_dense("102\n").is_err());
        assert!(read_dense("\n# only\n").is_err());
    }

    #[test]
    fn code_json_round_trip() {
        let h = circulant(3, &[0, 1]).unwrap();
        let code = hypergraph_product_with_meta(&h, &h, "circulant:3:0,1".into()).unwrap();
        let json = code_to_json(&code).unwrap();
        assert!(json.starts_with("{\"n\":18,\"gx\":[["));
        let back = code_from_json(&json).unwrap();
        assert_eq!(back, code);
        assert_eq!(code_to_json(&back).unwrap(), json);
        assert!(code_from_json("{\"n\":2,\"gx\":[[0,1]],\"gz\":[[0]]}").is_err());
        assert!(code_from_json("{\"n\":2,\"gx\":[],\"gz\":[],\"extra\":1}").is_err());
        assert!(code_from_json("{\"n\":2,\"gx\":[[2]],\"gz\":[]}").is_err());
    }

    #[test]
    fn seed_specs() {
        assert_eq!(
            "circulant:15:0,1,3,7".parse::<SeedSpec>().unwrap(),
            SeedSpec::Circulant { size: 15, support: vec![0, 1, 3, 7] }
        );
        assert_eq!("random:20:3:4:9".parse::<SeedSpec>().unwrap(), SeedSpec::Random { n: 20, h: 3, v: 4, seed: 9 });
        assert_eq!("h.alist".parse::<SeedSpec>().unwrap(), SeedSpec::Alist("h.alist".into()));
        for bad in ["circulant:15", "circulant:0:0", "circulant:5:7", "circulant:5:", "random:10:3:4:1", "random:1:2", ""] {
            assert!(bad.parse::<SeedSpec>().is_err(), "{bad}");
        }
        let spec: SeedSpec = "circulant:3:0,1".parse().unwrap();
        assert_eq!(spec.to_string().parse::<SeedSpec>().unwrap(), spec);
        assert_eq!(spec.to_matrix().unwrap().rank(), 2);
        let m = "random:20:3:4:9".parse::<SeedSpec>().unwrap().to_matrix().unwrap();
        assert_eq!((m.rows(), m.cols()), (15, 20));
    }

    fn sparse_matrix() -> impl Strategy<Value = BinaryMatrix> {
        (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::btree_set(0..c, 0..=c), r)
                .prop_map(move |rows| BinaryMatrix::new(c, rows.into_iter().map(|s| s.into_iter().collect()).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn alist_round_trips(m in sparse_matrix()) {
            let text = write_alist(&m);
            prop_assert_eq!(read_alist(&text).unwrap(), m.clone());
            prop_assert_eq!(write_alist(&read_alist(&text).unwrap()), text);
        }

        #[test]
        fn dense_round_trips(m in sparse_matrix()) {
            prop_assert_eq!(read_dense(&write_dense(&m)).unwrap(), m);
        }

        #[test]
        fn parsers_never_panic(s in "\\PC{0,80}") {
            let _ = read_alist(&s);
            let _ = read_dense(&s);
            let _ = code_from_json(&s);
            let _ = s.parse::<SeedSpec>();
        }
    }
}
