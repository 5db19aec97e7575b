//! Array arrangements of evaluation codes in which every column collects the
//! symbols sharing one evaluation point, and verification of
//! generalized sector-disk (column plus cell) erasure tolerance.
//!
//! Zero-fill cells hold a known 0, so they are never counted as erasures:
//! a column erasure erases only the coded cells of that column.

use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Elem, Matrix};
use crate::designs::Design;
use crate::erasure::recoverable;
use crate::lrc::{EvaluationLayout, LayoutFile, LinearCode, LrcError, LrcParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GsdError {
    #[error("evaluation sets are not regular: {0}")]
    NotRegular(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("exhaustive sweep of {patterns} patterns exceeds {limit}; use sampled mode")]
    TooManyPatterns { patterns: u128, limit: u128 },
    #[error(transparent)]
    Lrc(#[from] LrcError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `t × (m + ⌈h/t⌉)`: data columns then parity columns.
    Basic,
    /// `(t + h/ρ) × ρ`: every column carries `h/ρ` global parities.
    Rearranged,
    /// `t × ρ` with `h = r - v`: the columns of the points dropped by
    /// truncating the last block carry one global parity each.
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayLayout {
    pub construction: Construction,
    pub rows: usize,
    pub cols: usize,
    /// Row-major; `None` marks a zero-fill cell.
    pub cells: Vec<Option<usize>>,
    /// Evaluation point shared by the data symbols of each column (`None` for parity-only columns).
    pub column_points: Vec<Option<Elem>>,
    pub layout: EvaluationLayout,
    pub code: LinearCode,
}

/// Coordinates of each evaluation point, in set order, keyed by ascending point.
fn occurrences(layout: &EvaluationLayout) -> Vec<(Elem, Vec<usize>)> {
    let mut occ: Vec<(Elem, Vec<usize>)> = layout.points().into_iter().map(|x| (x, Vec::new())).collect();
    for (i, a) in layout.sets().iter().enumerate() {
        for (t, x) in a.iter().enumerate() {
            let k = occ.binary_search_by_key(x, |e| e.0).expect("point listed");
            occ[k].1.push(layout.coordinate(i, t));
        }
    }
    occ
}

/// Replication number `t`, allowing `deficient` points to appear once less.
fn regularity(occ: &[(Elem, Vec<usize>)], deficient: &[Elem]) -> Result<usize, GsdError> {
    let t = occ.iter().map(|o| o.1.len()).max().unwrap_or(0);
    for (x, cs) in occ {
        let want = if deficient.contains(x) { t - 1 } else { t };
        if cs.len() != want {
            return Err(GsdError::NotRegular(format!("point {x} lies in {} sets, expected {want}", cs.len())));
        }
    }
    Ok(t)
}

/// Points of the full last block lost by truncation, when `v < r`.
fn truncated_points(layout: &EvaluationLayout, full_last: &[Elem]) -> Vec<Elem> {
    let last = layout.sets().last().expect("at least one set");
    full_last.iter().copied().filter(|x| !last.contains(x)).collect()
}

impl ArrayLayout {
    fn assemble(
        construction: Construction,
        rows: usize,
        columns: Vec<(Option<Elem>, Vec<usize>)>,
        layout: &EvaluationLayout,
    ) -> Result<Self, GsdError> {
        let cols = columns.len();
        let mut cells = vec![None; rows * cols];
        for (c, (_, coords)) in columns.iter().enumerate() {
            if coords.len() > rows {
                return Err(GsdError::InvalidParameter(format!("column {c} holds {} symbols > {rows} rows", coords.len())));
            }
            for (r, &x) in coords.iter().enumerate() {
                cells[r * cols + c] = Some(x);
            }
        }
        let mut seen = vec![false; layout.n()];
        for &x in cells.iter().flatten() {
            if std::mem::replace(&mut seen[x], true) {
                return Err(GsdError::InvalidParameter(format!("coordinate {x} placed twice")));
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(GsdError::InvalidParameter("some coordinates are not placed".into()));
        }
        let code = LinearCode::from_layout(layout)?;
        Ok(Self {
            construction,
            rows,
            cols,
            cells,
            column_points: columns.iter().map(|c| c.0).collect(),
            layout: layout.clone(),
            code,
        })
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<usize> {
        self.cells[row * self.cols + col]
    }

    /// Coded (non-zero-fill) coordinates of a column, top to bottom.
    pub fn column_coords(&self, col: usize) -> Vec<usize> {
        (0..self.rows).filter_map(|r| self.cell(r, col)).collect()
    }

    /// Columns labeled by an evaluation point.
    pub fn data_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.column_points[c].is_some()).collect()
    }

    pub fn zero_fill(&self) -> Vec<(usize, usize)> {
        (0..self.rows * self.cols)
            .filter(|&i| self.cells[i].is_none())
            .map(|i| (i / self.cols, i % self.cols))
            .collect()
    }

    /// Array entries of a codeword (zero-fill cells read 0).
    pub fn arrange(&self, codeword: &[Elem]) -> Vec<Vec<Elem>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.cell(r, c).map_or(0, |x| codeword[x])).collect())
            .collect()
    }

    /// Column-major flattening of all cells, zero-fill included.
    pub fn flatten(&self, codeword: &[Elem]) -> Vec<Elem> {
        (0..self.cols)
            .flat_map(|c| (0..self.rows).map(move |r| (r, c)))
            .map(|(r, c)| self.cell(r, c).map_or(0, |x| codeword[x]))
            .collect()
    }

    /// Parity-check matrix indexed by the column-major flattening: zero-fill
    /// cells get a unit check forcing them to zero.
    pub fn flat_parity_check(&self) -> Matrix {
        let h = &self.code.parity_check;
        let f = h.field();
        let total = self.rows * self.cols;
        let zero: Vec<usize> = (0..total).filter(|&i| self.flat_cell(i).is_none()).collect();
        let mut m = Matrix::zeros(f, h.rows() + zero.len(), total);
        for i in 0..total {
            if let Some(x) = self.flat_cell(i) {
                for r in 0..h.rows() {
                    m.set(r, i, h.get(r, x));
                }
            }
        }
        for (k, &i) in zero.iter().enumerate() {
            m.set(h.rows() + k, i, 1);
        }
        m
    }

    fn flat_cell(&self, i: usize) -> Option<usize> {
        self.cell(i % self.rows, i / self.rows)
    }

    pub fn to_file(&self) -> ArrayFile {
        ArrayFile {
            construction: self.construction,
            rows: self.rows,
            cols: self.cols,
            cell_map: (0..self.rows).map(|r| (0..self.cols).map(|c| self.cell(r, c)).collect()).collect(),
            zero_fill: self.zero_fill(),
            column_points: self.column_points.clone(),
            layout: self.layout.to_file(),
        }
    }
}

/// JSON description of an [`ArrayLayout`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayFile {
    pub construction: Construction,
    pub rows: usize,
    pub cols: usize,
    pub cell_map: Vec<Vec<Option<usize>>>,
    pub zero_fill: Vec<(usize, usize)>,
    pub column_points: Vec<Option<Elem>>,
    pub layout: LayoutFile,
}

impl ArrayFile {
    pub fn to_array(&self) -> Result<ArrayLayout, GsdError> {
        let layout = EvaluationLayout::from_file(&self.layout)?;
        let columns = (0..self.cols)
            .map(|c| (self.column_points[c], (0..self.rows).filter_map(|r| self.cell_map[r][c]).collect()))
            .collect();
        let arr = ArrayLayout::assemble(self.construction, self.rows, columns, &layout)?;
        // Restore exact positions (zero-fill need not be at the bottom).
        let mut arr = arr;
        arr.cells = self.cell_map.iter().flatten().copied().collect();
        Ok(arr)
    }
}

/// Construction with data columns first: column `τ` holds the symbols
/// evaluated at `τ` in set order; the `h` global parities fill the last
/// `⌈h/t⌉` columns column by column.
///
/// `full_last_block` is the untruncated last set when `v < r` (its dropped
/// points may then appear `t-1` times).
pub fn array_basic(layout: &EvaluationLayout, full_last_block: Option<&[Elem]>) -> Result<ArrayLayout, GsdError> {
    let deficient = full_last_block.map(|b| truncated_points(layout, b)).unwrap_or_default();
    let occ = occurrences(layout);
    let t = regularity(&occ, &deficient)?;
    let h = layout.params().h;
    let mut columns: Vec<(Option<Elem>, Vec<usize>)> = occ.into_iter().map(|(x, cs)| (Some(x), cs)).collect();
    let globals: Vec<usize> = (0..h).map(|j| layout.global_coordinate(j)).collect();
    for chunk in globals.chunks(t.max(1)) {
        columns.push((None, chunk.to_vec()));
    }
    ArrayLayout::assemble(Construction::Basic, t, columns, layout)
}

/// Construction where each of the `ρ` point columns also carries `h/ρ`
/// consecutive global parities (requires `ρ | h`).
pub fn array_rearranged(layout: &EvaluationLayout) -> Result<ArrayLayout, GsdError> {
    let occ = occurrences(layout);
    let t = regularity(&occ, &[])?;
    let rho = occ.len();
    let h = layout.params().h;
    if rho == 0 || !h.is_multiple_of(rho) {
        return Err(GsdError::InvalidParameter(format!("{rho} columns do not divide h = {h}")));
    }
    let per = h / rho;
    let columns = occ
        .into_iter()
        .enumerate()
        .map(|(a, (x, mut cs))| {
            cs.extend((a * per..(a + 1) * per).map(|j| layout.global_coordinate(j)));
            (Some(x), cs)
        })
        .collect();
    ArrayLayout::assemble(Construction::Rearranged, t + per, columns, layout)
}

/// Construction for `h = r - v`: the `r - v` points of the full last block
/// missing from the truncated one come first, each holding its `t-1` data
/// symbols and one global parity; the remaining points follow in ascending
/// order.
pub fn array_truncated(layout: &EvaluationLayout, full_last_block: &[Elem]) -> Result<ArrayLayout, GsdError> {
    let p = layout.params();
    if p.h == 0 || p.h != p.r - p.v {
        return Err(GsdError::InvalidParameter(format!("need h = r - v >= 1, got h = {}, r - v = {}", p.h, p.r - p.v)));
    }
    let last = layout.sets().last().expect("at least one set");
    if full_last_block.len() != p.r + p.delta - 1 || !last.iter().all(|x| full_last_block.contains(x)) {
        return Err(GsdError::InvalidParameter("full last block must extend the truncated last set".into()));
    }
    let dropped = truncated_points(layout, full_last_block);
    let occ = occurrences(layout);
    let t = regularity(&occ, &dropped)?;
    let mut columns = Vec::with_capacity(occ.len());
    for (j, &x) in dropped.iter().enumerate() {
        let mut cs = occ.iter().find(|o| o.0 == x).map(|o| o.1.clone()).unwrap_or_default();
        cs.push(layout.global_coordinate(j));
        columns.push((Some(x), cs));
    }
    for (x, cs) in occ {
        if !dropped.contains(&x) {
            columns.push((Some(x), cs));
        }
    }
    ArrayLayout::assemble(Construction::Truncated, t, columns, layout)
}

/// Builds the truncated arrangement straight from a design whose blocks are
/// all used (`ℓ + 1` = number of blocks).
pub fn truncated_from_design(
    field: &crate::algebra::FiniteField,
    params: LrcParams,
    design: &Design,
    s: Option<Vec<Elem>>,
) -> Result<ArrayLayout, GsdError> {
    let layout = EvaluationLayout::from_design(field, params, design, s)?;
    let embed: Vec<Elem> = field.elements().filter(|x| !layout.global_points().contains(x)).collect();
    let full: Vec<Elem> = design.blocks[params.ell].iter().map(|&p| embed[p]).collect();
    array_truncated(&layout, &full)
}

/// Which columns may be erased in a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnScope {
    /// Only columns labeled by an evaluation point.
    Data,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepMode {
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] patterns, sampled beyond.
    Auto { seed: u64 },
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;
pub const DEFAULT_SAMPLES: usize = 10_000;
const MAX_WITNESSES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsdReport {
    pub construction: Construction,
    pub rows: usize,
    pub cols: usize,
    pub y: usize,
    pub gamma: usize,
    pub scope: ColumnScope,
    /// The sweep actually run (`Exhaustive` or `Sampled`).
    pub mode: SweepMode,
    pub patterns: usize,
    pub recovered: usize,
    pub failed: usize,
    /// First failing patterns as `(row, col)` cells.
    pub witnesses: Vec<Vec<(usize, usize)>>,
    pub distance: Option<usize>,
    /// `y·rows + γ > d - 1`, when a distance is supplied.
    pub beyond_distance: Option<bool>,
    pub zero_fill_cells: usize,
}

impl GsdReport {
    pub fn all_recovered(&self) -> bool {
        self.failed == 0
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u128).fold(1u128, |acc, i| acc.saturating_mul(n as u128 - i) / (i + 1))
}

/// A pattern: erased columns plus extra cells, as coordinates and cells.
struct Pattern {
    coords: Vec<usize>,
    cells: Vec<(usize, usize)>,
}

fn pattern_of(arr: &ArrayLayout, cols: &[usize], extra: &[(usize, usize)]) -> Pattern {
    let mut cells: Vec<(usize, usize)> = cols
        .iter()
        .flat_map(|&c| (0..arr.rows).filter(move |&r| arr.cell(r, c).is_some()).map(move |r| (r, c)))
        .collect();
    cells.extend_from_slice(extra);
    let coords = cells.iter().map(|&(r, c)| arr.cell(r, c).expect("coded cell")).collect();
    Pattern { coords, cells }
}

/// Sweeps erasures of `y` columns (from `scope`) plus `gamma` further coded
/// cells and tests each with the parity-check rank criterion.
pub fn gsd_check(
    arr: &ArrayLayout,
    y: usize,
    gamma: usize,
    scope: ColumnScope,
    mode: SweepMode,
    distance: Option<usize>,
    workers: usize,
) -> Result<GsdReport, GsdError> {
    let eligible = match scope {
        ColumnScope::Data => arr.data_columns(),
        ColumnScope::All => (0..arr.cols).collect(),
    };
    if y > eligible.len() {
        return Err(GsdError::InvalidParameter(format!("y = {y} exceeds {} eligible columns", eligible.len())));
    }
    let coded: Vec<(usize, usize)> =
        (0..arr.cols).flat_map(|c| (0..arr.rows).map(move |r| (r, c))).filter(|&(r, c)| arr.cell(r, c).is_some()).collect();
    let estimate = binomial(eligible.len(), y).saturating_mul(binomial(coded.len(), gamma));
    let mode = match mode {
        SweepMode::Auto { seed } if estimate > EXHAUSTIVE_LIMIT => SweepMode::Sampled { count: DEFAULT_SAMPLES, seed },
        SweepMode::Auto { .. } => SweepMode::Exhaustive,
        SweepMode::Exhaustive if estimate > EXHAUSTIVE_LIMIT => {
            return Err(GsdError::TooManyPatterns { patterns: estimate, limit: EXHAUSTIVE_LIMIT })
        }
        m => m,
    };
    let h = &arr.code.parity_check;
    let remaining = |cols: &[usize]| -> Vec<(usize, usize)> {
        coded.iter().copied().filter(|(_, c)| !cols.contains(c)).collect()
    };
    // Each unit of work yields (patterns, failures, witnesses).
    type Outcome = (usize, usize, Vec<Vec<(usize, usize)>>);
    let judge = |p: Pattern, out: &mut Outcome| {
        out.0 += 1;
        if !recoverable(h, &p.coords) {
            out.1 += 1;
            if out.2.len() < MAX_WITNESSES {
                out.2.push(p.cells);
            }
        }
    };
    let outcomes: Vec<Outcome> = match mode {
        SweepMode::Exhaustive => {
            let col_sets: Vec<Vec<usize>> = eligible.iter().copied().combinations(y).collect();
            crate::sweep::map_indexed(col_sets.len(), workers, |i| {
                let cols = &col_sets[i];
                let rest = remaining(cols);
                let mut out = (0, 0, Vec::new());
                for extra in rest.iter().copied().combinations(gamma) {
                    judge(pattern_of(arr, cols, &extra), &mut out);
                }
                out
            })
        }
        SweepMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut drawn: Vec<(Vec<usize>, Vec<(usize, usize)>)> = Vec::with_capacity(count);
            for _ in 0..count {
                let mut cols: Vec<usize> = sample(&mut rng, eligible.len(), y).into_iter().map(|i| eligible[i]).collect();
                cols.sort_unstable();
                let rest = remaining(&cols);
                if gamma > rest.len() {
                    return Err(GsdError::InvalidParameter(format!("gamma = {gamma} exceeds the remaining cells")));
                }
                let mut extra: Vec<(usize, usize)> = sample(&mut rng, rest.len(), gamma).into_iter().map(|i| rest[i]).collect();
                extra.sort_unstable();
                drawn.push((cols, extra));
            }
            const CHUNK: usize = 256;
            let chunks = drawn.len().div_ceil(CHUNK);
            crate::sweep::map_indexed(chunks, workers, |i| {
                let mut out = (0, 0, Vec::new());
                for (cols, extra) in &drawn[i * CHUNK..((i + 1) * CHUNK).min(drawn.len())] {
                    judge(pattern_of(arr, cols, extra), &mut out);
                }
                out
            })
        }
        SweepMode::Auto { .. } => unreachable!("resolved above"),
    };
    let mut patterns = 0;
    let mut failed = 0;
    let mut witnesses = Vec::new();
    for (p, f, w) in outcomes {
        patterns += p;
        failed += f;
        witnesses.extend(w);
    }
    witnesses.truncate(MAX_WITNESSES);
    Ok(GsdReport {
        construction: arr.construction,
        rows: arr.rows,
        cols: arr.cols,
        y,
        gamma,
        scope,
        mode,
        patterns,
        recovered: patterns - failed,
        failed,
        witnesses,
        distance,
        beyond_distance: distance.map(|d| y * arr.rows + gamma + 1 > d),
        zero_fill_cells: arr.zero_fill().len(),
    })
}

/// A recoverability claim `(y columns, gamma cells)` of one item.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub item: String,
    pub y: usize,
    pub gamma: usize,
}

/// The `(y, γ)` pairs promised for an arrangement with `h <= δ²`; items whose
/// `γ` would be negative are omitted. Columns are data columns for
/// [`Construction::Basic`] and any columns otherwise.
pub fn claims(arr: &ArrayLayout) -> Vec<Claim> {
    let p = arr.layout.params();
    let (h, delta) = (p.h as i64, p.delta as i64);
    if h > delta * delta {
        return Vec::new();
    }
    let tri = delta * (delta + 1) / 2;
    // Parity cells swept along with one erased column.
    let per_col = match arr.construction {
        Construction::Basic => 0,
        Construction::Rearranged => (arr.rows - arr.layout.sets().iter().map(Vec::len).sum::<usize>() / arr.cols) as i64,
        Construction::Truncated => 1,
    };
    let mut out = Vec::new();
    let mut push = |item: &str, y: i64, gamma: i64| {
        if gamma >= 0 {
            out.push(Claim { item: item.into(), y: y as usize, gamma: gamma as usize });
        }
    };
    for y in 1..=2 {
        push("I", y, h - y * (per_col + 1) - 1);
    }
    let mut y = 1;
    while y * (y - 1) / 2 <= delta {
        push("II", y, h - 2 - y * (y - 1) / 2 - y * per_col);
        y += 1;
    }
    for y in 1..(tri - 1) {
        push("III", y, (tri - y * (per_col + 1) - 1).min(h + delta - 1 - y * (per_col + 1)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Ag { q1: u64, beta: u32 },
    Pg { q1: u64, beta: u32 },
    Sg { q1: u64, beta: u32 },
    RegularPacking { prime_powers: Vec<u64>, e: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemClaim {
    pub item: String,
    pub y: u64,
    pub gamma: i64,
    /// The item's own hypothesis (on `y`).
    pub hypothesis: bool,
    /// `y·b + γ > d - 1` with `d = h + δ` (the item's second inequality).
    pub beyond_distance: bool,
    pub claimed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsdParams {
    pub family: Family,
    pub r: i64,
    pub delta: u64,
    pub v: u64,
    pub h: i64,
    pub rows: u64,
    pub cols: u64,
    pub blocks: u64,
    pub n: u64,
    pub k: i64,
    /// `h + δ`, the Singleton-type bound and the distance the item conditions use.
    pub d: i64,
    /// The distance as printed in the parameter statement, `h + δ - 1`.
    pub d_printed: i64,
    pub q_min: u64,
    pub preconditions: Vec<(String, bool)>,
    pub items: Vec<ItemClaim>,
    /// For regular packings the items print `p/e^{u-1}` where the array has `p/e^u` rows.
    pub items_printed_b: Option<Vec<ItemClaim>>,
}

fn items_for(b: i64, h: i64, delta: i64) -> Vec<ItemClaim> {
    let tri = delta * (delta + 1) / 2;
    let mut out = Vec::new();
    let mut push = |item: &str, y: i64, gamma: i64, hyp: bool, beyond: bool| {
        out.push(ItemClaim {
            item: item.into(),
            y: y as u64,
            gamma,
            hypothesis: hyp,
            beyond_distance: beyond,
            claimed: hyp && beyond && gamma >= 0,
        })
    };
    for y in 1..=2 {
        push("I", y, h - 2 * y - 1, true, y * (b - 2) > delta);
    }
    let mut y = 1;
    while y * (y - 1) / 2 <= delta {
        let c = y * (y - 1) / 2;
        push("II", y, h - 2 - c - y, true, y * b - 1 - c - y > delta);
        y += 1;
    }
    for y in 1..(tri - 1).max(1) {
        let gamma = (tri - 2 * y - 1).min(h + delta - 1 - 2 * y);
        push("III", y, gamma, true, y * b + gamma > h + delta - 1);
    }
    out
}

/// Closed-form parameters of the truncated-arrangement GSD codes from each
/// design family, with every item's conditions evaluated.
pub fn gsd_params(family: Family, delta: u64, v: u64) -> Result<GsdParams, GsdError> {
    let bad = |s: String| GsdError::InvalidParameter(s);
    let pow = |q: u64, e: u32| q.checked_pow(e).ok_or_else(|| bad("parameters overflow".into()));
    let (block_size, rows, cols, blocks, printed_b) = match &family {
        Family::Ag { q1, beta } => {
            let (q1, beta) = (*q1, *beta);
            let qb = pow(q1, beta)?;
            let rows = (qb - 1) / (q1 - 1);
            (q1, rows, qb, pow(q1, beta - 1)? * rows, None)
        }
        Family::Pg { q1, beta } => {
            let (q1, beta) = (*q1, *beta);
            let rows = (pow(q1, beta)? - 1) / (q1 - 1);
            let cols = (pow(q1, beta + 1)? - 1) / (q1 - 1);
            (q1 + 1, rows, cols, rows * cols / (q1 + 1), None)
        }
        Family::Sg { q1, beta } => {
            let (q1, beta) = (*q1, *beta);
            let qb = pow(q1, beta)?;
            let rows = (qb * (qb - 1) / 2) / (q1 * (q1 - 1) / 2);
            let cols = qb + 1;
            (q1 + 1, rows, cols, rows * cols / (q1 + 1), None)
        }
        Family::RegularPacking { prime_powers, e } => {
            let e = *e;
            if prime_powers.is_empty() || e < 2 || prime_powers.iter().any(|&q| (q - 1) % e != 0) {
                return Err(bad("e must divide every p_i^{m_i} - 1".into()));
            }
            let u = prime_powers.len() as u32;
            let p: u64 = prime_powers.iter().map(|&q| q - 1).product();
            let n2: u64 = prime_powers.iter().product();
            let rows = p / pow(e, u)?;
            (e, rows, e * n2, n2 * rows, Some((p / pow(e, u - 1)?) as i64))
        }
    };
    let (delta_i, v_i) = (delta as i64, v as i64);
    let r = block_size as i64 - delta_i + 1;
    let h = r - v_i;
    let d = h + delta_i;
    let preconditions = vec![
        ("delta >= 2".to_string(), delta >= 2),
        ("1 <= v <= r - 1".to_string(), v >= 1 && v_i < r),
        ("h <= delta^2".to_string(), h <= delta_i * delta_i),
    ];
    let ok = preconditions.iter().all(|p| p.1);
    let gate = |mut items: Vec<ItemClaim>| {
        for it in &mut items {
            it.claimed &= ok;
        }
        items
    };
    Ok(GsdParams {
        family,
        r,
        delta,
        v,
        h,
        rows,
        cols,
        blocks,
        n: rows * cols,
        k: (blocks as i64 - 1) * r + v_i,
        d,
        d_printed: d - 1,
        q_min: cols + h.max(0) as u64,
        preconditions,
        items: gate(items_for(rows as i64, h, delta_i)),
        items_printed_b: printed_b.map(|b| gate(items_for(b, h, delta_i))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteField;
    use crate::designs::{pg_steiner, Design};

    fn z7_design() -> Design {
        Design::new(7, 2, 3, (0..7).map(|i| [3, 6, 5].iter().map(|x| (x + i) % 7).collect()).collect())
    }

    fn example2(h: usize) -> ArrayLayout {
        let f = FiniteField::prime(11).unwrap();
        let p = LrcParams::new(2, 2, 6, 2, h).unwrap();
        let s: Vec<Elem> = (11 - h as u32..11).rev().collect();
        let l = EvaluationLayout::from_design(&f, p, &z7_design(), Some(s)).unwrap();
        array_basic(&l, None).unwrap()
    }

    #[test]
    fn basic_shapes() {
        let a = example2(3);
        assert_eq!((a.rows, a.cols), (3, 8));
        assert_eq!(a.zero_fill().len(), 0);
        assert_eq!(a.column_coords(0).len(), 3);
        let a = example2(0);
        assert_eq!((a.rows, a.cols), (3, 7));
        let a = example2(4);
        assert_eq!((a.rows, a.cols), (3, 9));
        assert_eq!(a.zero_fill(), vec![(1, 8), (2, 8)]);
    }

    #[test]
    fn two_data_columns_recoverable() {
        let a = example2(3);
        let rep = gsd_check(&a, 2, 0, ColumnScope::Data, SweepMode::Exhaustive, Some(5), 1).unwrap();
        assert_eq!((rep.patterns, rep.failed), (21, 0));
        assert_eq!(rep.beyond_distance, Some(true));
        let rep = gsd_check(&a, 0, 4, ColumnScope::All, SweepMode::Auto { seed: 1 }, Some(5), 1).unwrap();
        assert_eq!(rep.mode, SweepMode::Exhaustive);
        assert_eq!((rep.patterns, rep.failed), (10_626, 0));
    }

    #[test]
    fn rearranged_shapes() {
        let f = FiniteField::prime(17).unwrap();
        let p = LrcParams::new(2, 2, 6, 2, 7).unwrap();
        let l = EvaluationLayout::from_design(&f, p, &z7_design(), None).unwrap();
        let a = array_rearranged(&l).unwrap();
        assert_eq!((a.rows, a.cols), (4, 7));
        assert!(a.zero_fill().is_empty());
        let p = LrcParams::new(2, 2, 6, 2, 3).unwrap();
        let l = EvaluationLayout::from_design(&f, p, &z7_design(), None).unwrap();
        assert!(matches!(array_rearranged(&l), Err(GsdError::InvalidParameter(_))));
        let p = LrcParams::new(2, 2, 6, 2, 0).unwrap();
        let l = EvaluationLayout::from_design(&f, p, &z7_design(), None).unwrap();
        let r = array_rearranged(&l).unwrap();
        let b = array_basic(&l, None).unwrap();
        assert_eq!(r.cells, b.cells);
    }

    #[test]
    fn truncated_fano() {
        let f = FiniteField::prime(11).unwrap();
        let fano = pg_steiner(2, 2).unwrap();
        let p = LrcParams::new(2, 2, 6, 1, 1).unwrap();
        let a = truncated_from_design(&f, p, &fano, None).unwrap();
        assert_eq!((a.rows, a.cols), (3, 7));
        assert_eq!(a.cells.iter().flatten().count(), 21);
        assert_eq!(a.layout.n(), 21);
        let parity: Vec<usize> = (0..7).flat_map(|c| a.column_coords(c)).filter(|&x| x >= 20).collect();
        assert_eq!(parity, vec![20]);
        assert_eq!(a.cell(2, 0), Some(20));
        let p = LrcParams::new(2, 2, 6, 2, 0).unwrap();
        assert!(truncated_from_design(&f, p, &fano, None).is_err());
    }

    #[test]
    fn flat_parity_check_matches_cells() {
        let a = example2(4);
        let hf = a.flat_parity_check();
        let g = a.code.generator();
        for r in 0..g.rows() {
            let flat = a.flatten(g.row(r));
            assert!(hf.mul_vec(&flat).unwrap().iter().all(|&x| x == 0));
        }
        // Recoverability verdicts agree between the two indexings.
        for cols in (0..9usize).combinations(2) {
            let pat = pattern_of(&a, &cols, &[]);
            let flat: Vec<usize> = cols.iter().flat_map(|&c| (0..3).map(move |r| c * 3 + r)).collect();
            assert_eq!(recoverable(&a.code.parity_check, &pat.coords), recoverable(&hf, &flat));
        }
    }

    #[test]
    fn pg_parameters() {
        let p = gsd_params(Family::Pg { q1: 8, beta: 2 }, 3, 1).unwrap();
        assert_eq!((p.n, p.k, p.r, p.h, p.rows, p.cols, p.q_min), (657, 505, 7, 6, 9, 73, 79));
        assert_eq!((p.d, p.d_printed), (9, 8));
        let claimed: Vec<(u64, i64)> = p.items.iter().filter(|i| i.claimed).map(|i| (i.y, i.gamma)).unique().collect();
        assert!(claimed.contains(&(2, 1)) && claimed.contains(&(1, 3)));
        assert!(claimed.iter().all(|&(y, g)| y <= 2 && g >= 1));
    }

    #[test]
    fn ag_parameters_match_array() {
        let p = gsd_params(Family::Ag { q1: 3, beta: 2 }, 2, 1).unwrap();
        assert_eq!((p.r, p.h, p.rows, p.cols, p.n, p.k), (2, 1, 4, 9, 36, 23));
        let f = FiniteField::prime(11).unwrap();
        let d = crate::designs::ag_steiner(3, 2).unwrap();
        let a = truncated_from_design(&f, LrcParams::new(2, 2, 11, 1, 1).unwrap(), &d, None).unwrap();
        assert_eq!((a.rows as u64, a.cols as u64, a.layout.n() as u64, a.layout.k() as i64), (p.rows, p.cols, p.n, p.k));
        let bad = gsd_params(Family::Pg { q1: 8, beta: 2 }, 2, 1).unwrap();
        assert!(!bad.preconditions[2].1);
        assert!(bad.items.iter().all(|i| !i.claimed));
    }

    #[test]
    fn regular_packing_parameters() {
        let p = gsd_params(Family::RegularPacking { prime_powers: vec![7], e: 3 }, 2, 1).unwrap();
        assert_eq!((p.rows, p.cols, p.n, p.r, p.h), (2, 21, 42, 2, 1));
        assert_eq!(p.items_printed_b.as_ref().map(Vec::len), Some(p.items.len()));
    }

    #[test]
    fn sampled_sweeps_are_deterministic() {
        let a = example2(3);
        let mode = SweepMode::Sampled { count: 300, seed: 9 };
        let one = gsd_check(&a, 1, 3, ColumnScope::All, mode, Some(5), 1).unwrap();
        let four = gsd_check(&a, 1, 3, ColumnScope::All, mode, Some(5), 4).unwrap();
        assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&four).unwrap());
        assert_eq!(one.patterns, 300);
    }

    #[test]
    fn array_file_round_trip() {
        let a = example2(4);
        let back = a.to_file().to_array().unwrap();
        assert_eq!(back.cells, a.cells);
        assert_eq!(back.column_points, a.column_points);
    }
}
