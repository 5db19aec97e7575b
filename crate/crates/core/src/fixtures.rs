//! Bundled regression fixtures: the two printed parity-check matrices
//! (stored verbatim, checksummed) and the worked examples rebuilt from
//! their parameters.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteField, Matrix};
use crate::bounds::singleton_bound;
use crate::designs::{pg_steiner, Design, DesignError};
use crate::erasure::{min_distance, recoverable, ErasureError};
use crate::gsd::{array_basic, gsd_check, gsd_params, truncated_from_design, ArrayLayout, ColumnScope, Family, GsdError, SweepMode};
use crate::lrc::{verify_locality, EvaluationLayout, LinearCode, LrcError, LrcParams, RepairSet};

pub const EXAMPLE1_H: &str = include_str!("../fixtures/example1_h.txt");
pub const EXAMPLE1_SHA256: &str = "91ed5774ec1140597857a8ddf2317a371983f976f75837b7f85da20614aeabe7";
pub const EXAMPLE2_H: &str = include_str!("../fixtures/example2_h.txt");
pub const EXAMPLE2_SHA256: &str = "3de46a1f681470f809331fb31b91781855fc85f5ec674dd910bb848abf187b1e";

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("checksum mismatch for {name}: {actual}")]
    Checksum { name: &'static str, actual: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Lrc(#[from] LrcError),
    #[error(transparent)]
    Erasure(#[from] ErasureError),
    #[error(transparent)]
    Gsd(#[from] GsdError),
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn load(name: &'static str, text: &str, sum: &str) -> Result<Matrix, FixtureError> {
    let actual = sha256_hex(text);
    if actual != sum {
        return Err(FixtureError::Checksum { name, actual });
    }
    Ok(Matrix::from_text(text)?)
}

/// The printed 10×24 parity-check matrix of the first example, over `F_11`.
pub fn example1_h() -> Result<Matrix, FixtureError> {
    load("example1_h.txt", EXAMPLE1_H, EXAMPLE1_SHA256)
}

/// The printed parity-check matrix of the 3×8 array example, columns in
/// column-major cell order.
pub fn example2_h() -> Result<Matrix, FixtureError> {
    load("example2_h.txt", EXAMPLE2_H, EXAMPLE2_SHA256)
}

/// The cyclic `(2,3,7)`-Steiner system with blocks `{3,6,5} + i`.
pub fn cyclic_fano() -> Design {
    Design::new(7, 2, 3, (0..7).map(|i| [3, 6, 5].iter().map(|x| (x + i) % 7).collect()).collect())
}

/// `r=2, δ=2, ℓ=6, v=2, h=3` over `F_11` with globals at 8, 9, 10.
pub fn example1_layout() -> Result<EvaluationLayout, FixtureError> {
    let f = FiniteField::prime(11)?;
    let p = LrcParams::new(2, 2, 6, 2, 3)?;
    Ok(EvaluationLayout::from_design(&f, p, &cyclic_fano(), None)?)
}

/// Our coordinate of each printed column of the first example. The printed
/// matrix enumerates blocks and globals in descending order and lists the
/// two information-carrying symbols of every block before the third ones.
pub fn example1_permutation() -> Vec<usize> {
    let mut perm = vec![0; 24];
    for j in 0..7 {
        let i = 6 - j;
        perm[2 * j] = 3 * i + 2;
        perm[2 * j + 1] = 3 * i;
        perm[14 + j] = 3 * i + 1;
    }
    for g in 0..3 {
        perm[21 + g] = 23 - g;
    }
    perm
}

/// Repair sets of the printed first-example matrix, in its own coordinates.
pub fn example1_printed_repair_sets() -> Vec<RepairSet> {
    (0..7).map(|j| RepairSet { coords: vec![2 * j, 2 * j + 1, 14 + j], delta: 2 }).collect()
}

/// The 3×8 array of the second example.
pub fn example2_array() -> Result<ArrayLayout, FixtureError> {
    Ok(array_basic(&example1_layout()?, None)?)
}

/// Our `(row, col)` cell of each printed column of the second example: rows
/// and data columns appear reversed.
pub fn example2_cells() -> Vec<(usize, usize)> {
    (0..24)
        .map(|i| {
            let (c, row) = (i / 3, i % 3);
            (2 - row, if c < 7 { 6 - c } else { 7 })
        })
        .collect()
}

/// The 9×73 array over `F_79` from the projective plane of order 8, with
/// `r=7, δ=3, v=1, h=6`.
pub fn example3_array() -> Result<ArrayLayout, FixtureError> {
    let f = FiniteField::prime(79)?;
    let plane = pg_steiner(8, 2)?;
    let p = LrcParams::new(7, 3, 72, 1, 6)?;
    Ok(truncated_from_design(&f, p, &plane, None)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub measured: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub fixture: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, expected: T, measured: T) {
        let pass = expected == measured;
        self.0.push(Check { name: name.into(), expected: format!("{expected:?}"), measured: format!("{measured:?}"), pass });
    }

    fn finish(self, fixture: &str) -> FixtureReport {
        let pass = self.0.iter().all(|c| c.pass);
        FixtureReport { fixture: fixture.into(), checks: self.0, pass }
    }
}

/// Whether every row of `g` (in our coordinates) is annihilated by `h`
/// whose columns are `perm`-mapped to ours.
fn annihilates(h: &Matrix, perm: &[usize], g: &Matrix) -> bool {
    (0..g.rows()).all(|r| {
        let word: Vec<Elem> = perm.iter().map(|&c| g.get(r, c)).collect();
        h.mul_vec(&word).is_ok_and(|s| s.iter().all(|&x| x == 0))
    })
}

pub fn run_example1() -> Result<FixtureReport, FixtureError> {
    let mut c = Checks::default();
    let h = example1_h()?;
    c.eq("printed H shape", (10, 24), (h.rows(), h.cols()));
    c.eq("printed H distance", Some(5), min_distance(&h, 6)?.exact());
    let printed = LinearCode::from_parity_check(h.clone(), example1_printed_repair_sets());
    let loc = verify_locality(&printed)?;
    c.eq("printed H locality", true, loc.ok);
    c.eq(
        "printed H punctured distances",
        vec![Some(2); 7],
        loc.sets.iter().map(|s| s.punctured_distance.exact()).collect::<Vec<_>>(),
    );
    c.eq("singleton bound (24,14,2,2)", 5, singleton_bound(24, 14, 2, 2).unwrap_or(-1));
    let layout = example1_layout()?;
    let code = LinearCode::from_layout(&layout)?;
    c.eq("constructed [n,k]", (24, 14), (code.n, code.k));
    c.eq("constructed distance", Some(5), min_distance(&code.parity_check, 6)?.exact());
    c.eq("constructed locality", true, verify_locality(&code)?.ok);
    c.eq("printed H annihilates constructed code", true, annihilates(&h, &example1_permutation(), &code.generator()));
    Ok(c.finish("example1"))
}

pub fn run_example2() -> Result<FixtureReport, FixtureError> {
    let mut c = Checks::default();
    let h = example2_h()?;
    c.eq("printed H shape", (10, 24), (h.rows(), h.cols()));
    c.eq("printed H distance", Some(5), min_distance(&h, 6)?.exact());
    let mut failures = 0;
    for a in 0..7 {
        for b in a + 1..7 {
            let cols: Vec<usize> = (3 * a..3 * a + 3).chain(3 * b..3 * b + 3).collect();
            failures += usize::from(!recoverable(&h, &cols));
        }
    }
    c.eq("printed H: unrecoverable two-column erasures", 0, failures);
    c.eq("s*b + gamma > d - 1 for (2,0)", true, 2 * 3 > 5 - 1);
    let arr = example2_array()?;
    c.eq("array shape", (3, 8), (arr.rows, arr.cols));
    let perm: Vec<usize> = example2_cells().iter().map(|&(r, col)| arr.cell(r, col).unwrap_or(usize::MAX)).collect();
    c.eq("printed H annihilates constructed array code", true, annihilates(&h, &perm, &arr.code.generator()));
    let rep = gsd_check(&arr, 2, 0, ColumnScope::Data, SweepMode::Exhaustive, Some(5), 1)?;
    c.eq("constructed array: two data columns", (21, 0), (rep.patterns, rep.failed));
    Ok(c.finish("example2"))
}

/// The large example: parameters, locality on every repair set and three
/// sampled sweeps of `samples` patterns each.
pub fn run_example3(samples: usize, seed: u64, workers: usize) -> Result<FixtureReport, FixtureError> {
    let mut c = Checks::default();
    let params = gsd_params(Family::Pg { q1: 8, beta: 2 }, 3, 1)?;
    c.eq("closed-form [n,k,d]", (657, 505, 9), (params.n, params.k, params.d));
    c.eq("singleton bound", 9, singleton_bound(657, 505, 7, 3).unwrap_or(-1));
    let arr = example3_array()?;
    c.eq("array shape", (9, 73), (arr.rows, arr.cols));
    c.eq("[n,k]", (657, 505), (arr.code.n, arr.code.k));
    let loc = verify_locality(&arr.code)?;
    c.eq("repair sets with locality", (73, 73), (loc.sets.len(), loc.sets.iter().filter(|s| s.ok).count()));
    c.eq("repair sets jointly carry k", true, loc.ok);
    for (name, y, gamma) in [("8 cells", 0, 8), ("2 columns + 1 cell", 2, 1), ("1 column + 3 cells", 1, 3)] {
        let mode = SweepMode::Sampled { count: samples, seed };
        let rep = gsd_check(&arr, y, gamma, ColumnScope::All, mode, Some(9), workers)?;
        c.eq(&format!("unrecoverable sampled patterns: {name}"), (samples, 0), (rep.patterns, rep.failed));
    }
    Ok(c.finish("example3"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_match() {
        assert_eq!(sha256_hex(EXAMPLE1_H), EXAMPLE1_SHA256);
        assert_eq!(sha256_hex(EXAMPLE2_H), EXAMPLE2_SHA256);
        assert!(matches!(load("x", "11 1 1\n1\n", EXAMPLE1_SHA256), Err(FixtureError::Checksum { .. })));
    }

    #[test]
    fn permutations_are_bijections() {
        let mut p = example1_permutation();
        p.sort_unstable();
        assert_eq!(p, (0..24).collect::<Vec<_>>());
        let mut cells = example2_cells();
        cells.sort_unstable();
        cells.dedup();
        assert_eq!(cells.len(), 24);
    }

    #[test]
    fn example1_and_example2_pass() {
        for rep in [run_example1().unwrap(), run_example2().unwrap()] {
            for c in &rep.checks {
                assert!(c.pass, "{}: {} (expected {}, measured {})", rep.fixture, c.name, c.expected, c.measured);
            }
        }
    }

    #[test]
    fn wrong_permutation_is_detected() {
        let h = example1_h().unwrap();
        let code = LinearCode::from_layout(&example1_layout().unwrap()).unwrap();
        let mut perm = example1_permutation();
        perm.swap(0, 1);
        assert!(!annihilates(&h, &perm, &code.generator()));
    }

    #[test]
    fn example3_passes() {
        let rep = run_example3(500, 7, 2).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
}
