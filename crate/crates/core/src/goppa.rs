//! Goppa-style locally repairable codes: codes cut out by residue
//! congruences modulo a local polynomial `G1` on each evaluation set and a
//! global polynomial `G2` on the whole sequence.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteField, Matrix, Poly};
use crate::erasure::{min_distance, Distance, ErasureError};
use crate::lrc::{verify_locality, LinearCode, LocalityReport, LrcError, RepairSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GoppaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("G1*G2 has a repeated root")]
    NotSeparable,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lrc(#[from] LrcError),
    #[error(transparent)]
    Erasure(#[from] ErasureError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoppaParams {
    pub field: FiniteField,
    pub r: usize,
    pub delta: usize,
    /// Degree `δ - 1`.
    pub g1: Poly,
    /// Degree `h`.
    pub g2: Poly,
    /// `S_1..S_ℓ`, each of size `r + δ - 1`, in coordinate order.
    pub sets: Vec<Vec<Elem>>,
    /// `S_{ℓ+1}` (size at most `h`): the trailing coordinates, without locality.
    pub tail: Vec<Elem>,
}

impl GoppaParams {
    pub fn new(
        field: &FiniteField,
        r: usize,
        delta: usize,
        g1: Poly,
        g2: Poly,
        sets: Vec<Vec<Elem>>,
        tail: Vec<Elem>,
    ) -> Result<Self, GoppaError> {
        let p = Self { field: field.clone(), r, delta, g1, g2, sets, tail };
        p.validate()?;
        Ok(p)
    }

    pub fn h(&self) -> usize {
        self.g2.degree().unwrap_or(0)
    }

    pub fn ell(&self) -> usize {
        self.sets.len()
    }

    pub fn n(&self) -> usize {
        self.gamma().len()
    }

    /// `n - ℓ(δ-1) - h`, the dimension lower bound.
    pub fn k_bound(&self) -> i64 {
        self.n() as i64 - (self.ell() * (self.delta - 1)) as i64 - self.h() as i64
    }

    /// The evaluation sequence: the sets in order, then the tail.
    pub fn gamma(&self) -> Vec<Elem> {
        self.sets.iter().flatten().chain(&self.tail).copied().collect()
    }

    pub fn validate(&self) -> Result<(), GoppaError> {
        let bad = |s: String| Err(GoppaError::InvalidParameter(s));
        let f = &self.field;
        if self.r == 0 || self.delta < 2 {
            return bad("need r >= 1 and delta >= 2".into());
        }
        if self.g1.degree() != Some(self.delta - 1) {
            return bad(format!("G1 must have degree delta - 1 = {}", self.delta - 1));
        }
        if self.g2.is_zero() {
            return bad("G2 must be nonzero".into());
        }
        let all_in = |xs: &[Elem]| xs.iter().all(|&x| f.contains(x));
        if !all_in(self.g1.coeffs()) || !all_in(self.g2.coeffs()) {
            return bad("polynomial coefficients must be field elements".into());
        }
        let distinct = |xs: &[Elem]| xs.iter().all_unique();
        for (i, s) in self.sets.iter().enumerate() {
            if s.len() != self.r + self.delta - 1 || !all_in(s) || !distinct(s) {
                return bad(format!("S_{} must hold r + delta - 1 distinct field elements", i + 1));
            }
        }
        if self.tail.len() > self.h() || !all_in(&self.tail) || !distinct(&self.tail) {
            return bad(format!("S_(l+1) must hold at most h = {} distinct field elements", self.h()));
        }
        if let Some(x) = self.gamma().into_iter().find(|&x| f.mul(self.g1.eval(f, x), self.g2.eval(f, x)) == 0) {
            return bad(format!("G1*G2 vanishes at evaluation point {x}"));
        }
        Ok(())
    }

    fn repair_sets(&self) -> Vec<RepairSet> {
        let w = self.r + self.delta - 1;
        (0..self.ell()).map(|i| RepairSet { coords: (i * w..(i + 1) * w).collect(), delta: self.delta }).collect()
    }
}

fn power_rows(f: &FiniteField, g: &Poly, pts: &[Elem], rows: usize) -> Result<Vec<Vec<Elem>>, GoppaError> {
    let inv: Vec<Elem> = pts.iter().map(|&x| f.inv(g.eval(f, x))).collect::<Result<_, _>>()?;
    Ok((0..rows as u64)
        .map(|t| pts.iter().zip(&inv).map(|(&x, &w)| f.mul(w, f.pow(x, t))).collect())
        .collect())
}

/// Block parity-check matrix: `δ-1` rows `G1(γ)⁻¹γ^t` per set, then `h`
/// rows `G2(γ)⁻¹γ^t` across all coordinates.
pub fn goppa_pcheck(params: &GoppaParams) -> Result<Matrix, GoppaError> {
    params.validate()?;
    let f = &params.field;
    let n = params.n();
    let w = params.r + params.delta - 1;
    let mut rows = Vec::new();
    for (i, s) in params.sets.iter().enumerate() {
        for local in power_rows(f, &params.g1, s, params.delta - 1)? {
            let mut row = vec![0; n];
            row[i * w..(i + 1) * w].copy_from_slice(&local);
            rows.push(row);
        }
    }
    rows.extend(power_rows(f, &params.g2, &params.gamma(), params.h())?);
    Ok(Matrix::from_rows_with_cols(f, rows, n)?)
}

pub fn goppa_code(params: &GoppaParams) -> Result<LinearCode, GoppaError> {
    Ok(LinearCode::from_parity_check(goppa_pcheck(params)?, params.repair_sets()))
}

/// Whether `v` satisfies both residue congruences, checked as
/// `Σ v_j Π_{γ ≠ γ_j}(x - γ) ≡ 0` modulo `G1` (per set) and `G2`.
pub fn residue_check(params: &GoppaParams, v: &[Elem]) -> Result<bool, GoppaError> {
    let f = &params.field;
    let gamma = params.gamma();
    if v.len() != gamma.len() {
        return Err(GoppaError::InvalidParameter(format!("word has length {}, expected {}", v.len(), gamma.len())));
    }
    let congruent = |pts: &[Elem], vals: &[Elem], g: &Poly| -> Result<bool, GoppaError> {
        let distinct: Vec<Elem> = pts.iter().copied().unique().collect();
        let mut acc = Poly::zero();
        for (&x, &c) in pts.iter().zip(vals) {
            let others: Vec<Elem> = distinct.iter().copied().filter(|&y| y != x).collect();
            acc = acc.add(&Poly::from_roots(f, &others).scale(c, f), f);
        }
        Ok(acc.rem(g, f)?.is_zero())
    };
    let w = params.r + params.delta - 1;
    for (i, s) in params.sets.iter().enumerate() {
        if !congruent(s, &v[i * w..(i + 1) * w], &params.g1)? {
            return Ok(false);
        }
    }
    congruent(&gamma, v, &params.g2)
}

/// An extension `F_{p^{m1}}` of the base field together with the embedding.
#[derive(Clone, Debug)]
pub struct Extension {
    pub big: FiniteField,
    /// Image of every base-field element, indexed by its encoding.
    pub embed: Vec<Elem>,
}

impl Extension {
    /// The degree-`m1` extension of `small` (`m | m1`).
    pub fn new(small: &FiniteField, m1: u32) -> Result<Self, GoppaError> {
        let (p, m) = (small.characteristic(), small.degree());
        if !m1.is_multiple_of(m) {
            return Err(GoppaError::InvalidParameter(format!("degree {m1} is not a multiple of {m}")));
        }
        let big = FiniteField::new(p, m1)?;
        if m == 1 {
            return Ok(Self { embed: small.elements().collect(), big });
        }
        // A root of the small modulus generates the copy of the small field.
        let modulus = Poly::from_coeffs(small.modulus().to_vec());
        let rho = big
            .elements()
            .find(|&x| modulus.eval(&big, x) == 0)
            .ok_or_else(|| GoppaError::InvalidParameter("small modulus has no root in the extension".into()))?;
        let powers: Vec<Elem> = (0..m as u64).map(|i| big.pow(rho, i)).collect();
        let embed = small
            .elements()
            .map(|a| {
                small.to_digits(a).iter().zip(&powers).fold(0, |acc, (&c, &pw)| big.add(acc, big.mul(c, pw)))
            })
            .collect();
        Ok(Self { big, embed })
    }

    pub fn poly(&self, g: &Poly) -> Poly {
        Poly::from_coeffs(g.coeffs().iter().map(|&c| self.embed[c as usize]).collect())
    }

    pub fn matrix(&self, m: &Matrix) -> Matrix {
        let rows = m.to_rows().into_iter().map(|r| r.into_iter().map(|x| self.embed[x as usize]).collect()).collect();
        Matrix::from_rows_with_cols(&self.big, rows, m.cols()).expect("embedded entries lie in the extension")
    }
}

/// Cauchy form of the parity check over the splitting field of `G1·G2`.
#[derive(Clone, Debug)]
pub struct SplittingCheck {
    pub extension: Extension,
    pub m1: u32,
    pub roots_g1: Vec<Elem>,
    pub roots_g2: Vec<Elem>,
    pub matrix: Matrix,
}

/// Finds the smallest extension in which `G1·G2` splits (it must be
/// separable) and builds the Cauchy parity-check matrix there.
pub fn splitting_pcheck(params: &GoppaParams) -> Result<SplittingCheck, GoppaError> {
    params.validate()?;
    let f = &params.field;
    let g = params.g1.mul(&params.g2, f);
    if g.gcd(&g.derivative(f), f).degree() != Some(0) {
        return Err(GoppaError::NotSeparable);
    }
    let deg = g.degree().unwrap_or(0);
    let (p, m) = (f.characteristic() as u64, f.degree());
    let mut m1 = m;
    let (extension, roots_g1, roots_g2) = loop {
        if p.checked_pow(m1).is_none_or(|q| q > crate::algebra::MAX_ORDER) {
            return Err(GoppaError::InvalidParameter(format!("splitting field exceeds the supported size at degree {m1}")));
        }
        let ext = Extension::new(f, m1)?;
        let (e1, e2) = (ext.poly(&params.g1), ext.poly(&params.g2));
        let roots = |q: &Poly| ext.big.elements().filter(|&x| q.eval(&ext.big, x) == 0).collect::<Vec<_>>();
        let (r1, r2) = (roots(&e1), roots(&e2));
        if r1.len() + r2.len() == deg {
            break (ext, r1, r2);
        }
        m1 += m;
    };
    let big = &extension.big;
    let gamma: Vec<Elem> = params.gamma().iter().map(|&x| extension.embed[x as usize]).collect();
    let cauchy = |b: Elem, pts: &[Elem]| -> Vec<Elem> { pts.iter().map(|&x| big.inv_nonzero(big.sub(b, x))).collect() };
    let n = gamma.len();
    let w = params.r + params.delta - 1;
    let mut rows = Vec::new();
    for i in 0..params.ell() {
        for &b in &roots_g1 {
            let mut row = vec![0; n];
            row[i * w..(i + 1) * w].copy_from_slice(&cauchy(b, &gamma[i * w..(i + 1) * w]));
            rows.push(row);
        }
    }
    for &b in &roots_g2 {
        rows.push(cauchy(b, &gamma));
    }
    let matrix = Matrix::from_rows_with_cols(big, rows, n)?;
    Ok(SplittingCheck { extension, m1, roots_g1, roots_g2, matrix })
}

/// Row-space relation between the block matrix (embedded) and its Cauchy form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSpaceReport {
    pub m1: u32,
    pub rank_p: usize,
    pub rank_cauchy: usize,
    pub rank_stacked: usize,
    /// Row space of `P` lies in that of `P*`, i.e. the code over `F_{q^m}` embeds in the one over `F_{q^{m1}}`.
    pub contained: bool,
    /// The two row spaces coincide, so the small code is exactly the subfield subcode.
    pub equal: bool,
}

pub fn compare_row_spaces(params: &GoppaParams) -> Result<RowSpaceReport, GoppaError> {
    let p = goppa_pcheck(params)?;
    let sp = splitting_pcheck(params)?;
    let pe = sp.extension.matrix(&p);
    let rank_p = pe.rank();
    let rank_cauchy = sp.matrix.rank();
    let rank_stacked = pe.vstack(&sp.matrix)?.rank();
    Ok(RowSpaceReport {
        m1: sp.m1,
        rank_p,
        rank_cauchy,
        rank_stacked,
        contained: rank_stacked == rank_cauchy,
        equal: rank_stacked == rank_cauchy && rank_stacked == rank_p,
    })
}

/// Intersection condition on a `(t+1)`-subset of the local sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetViolation {
    pub subset: Vec<usize>,
    pub set: usize,
    pub overlap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoppaReport {
    pub n: usize,
    pub k: usize,
    pub k_bound: i64,
    pub r: usize,
    pub delta: usize,
    pub h: usize,
    pub ell: usize,
    pub t: usize,
    pub separable: bool,
    pub m1: Option<u32>,
    pub subsets_checked: usize,
    pub violations: Vec<SubsetViolation>,
    pub tail_disjoint: bool,
    pub hypotheses_hold: bool,
    /// `min{(t+1)δ, h+δ}`.
    pub distance_bound: usize,
    pub distance: Distance,
    pub bound_holds: Option<bool>,
    pub locality: LocalityReport,
    /// Hypotheses plus `h+δ ≤ (t+1)δ` and a nonempty tail.
    pub optimality_applies: bool,
    /// `d = h + δ` and `k = n - ℓ(δ-1) - h`, when the optimality statement applies.
    pub optimal: Option<bool>,
    pub ok: bool,
}

/// Checks the intersection hypotheses on every `(t+1)`-subset, measures the
/// exact distance, and compares with `min{(t+1)δ, h+δ}`.
pub fn goppa_distance_check(params: &GoppaParams, t: usize) -> Result<GoppaReport, GoppaError> {
    params.validate()?;
    let ell = params.ell();
    if t + 1 > ell {
        return Err(GoppaError::InvalidParameter(format!("t + 1 = {} exceeds l = {ell}", t + 1)));
    }
    let (delta, h) = (params.delta, params.h());
    let mut violations = Vec::new();
    let mut subsets_checked = 0;
    for d in (0..ell).combinations(t + 1) {
        subsets_checked += 1;
        for &i in &d {
            let overlap = params.sets[i]
                .iter()
                .filter(|x| d.iter().any(|&j| j != i && params.sets[j].contains(x)))
                .count();
            if overlap > delta - 1 {
                violations.push(SubsetViolation { subset: d.clone(), set: i, overlap });
            }
        }
    }
    let tail_disjoint = params.sets.iter().all(|s| s.iter().all(|x| !params.tail.contains(x)));
    let m1 = match splitting_pcheck(params) {
        Ok(sp) => Some(sp.m1),
        Err(GoppaError::NotSeparable) => None,
        Err(e) => return Err(e),
    };
    let separable = m1.is_some();
    let hypotheses_hold = separable && violations.is_empty() && tail_disjoint;
    let code = goppa_code(params)?;
    let distance = min_distance(&code.parity_check, code.n - code.k + 1)?;
    let distance_bound = ((t + 1) * delta).min(h + delta);
    let bound_holds = hypotheses_hold.then(|| distance.at_least(distance_bound));
    let locality = verify_locality(&code)?;
    let optimality_applies = hypotheses_hold && h + delta <= (t + 1) * delta && !params.tail.is_empty();
    let optimal = optimality_applies
        .then(|| distance.exact() == Some(h + delta) && code.k as i64 == params.k_bound());
    let ok = locality.ok && code.k as i64 >= params.k_bound() && bound_holds != Some(false) && optimal != Some(false);
    Ok(GoppaReport {
        n: code.n,
        k: code.k,
        k_bound: params.k_bound(),
        r: params.r,
        delta,
        h,
        ell,
        t,
        separable,
        m1,
        subsets_checked,
        violations,
        tail_disjoint,
        hypotheses_hold,
        distance_bound,
        distance,
        bound_holds,
        locality,
        optimality_applies,
        optimal,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f16() -> FiniteField {
        FiniteField::new(2, 4).unwrap()
    }

    /// Over `F_16`: `G1 = x - 1`, `G2 = (x - 2)(x - 3)`, disjoint sets.
    fn split_instance(tail: Vec<Elem>) -> GoppaParams {
        let f = f16();
        let g1 = Poly::linear(&f, 1);
        let g2 = Poly::from_roots(&f, &[2, 3]);
        GoppaParams::new(&f, 2, 2, g1, g2, vec![vec![4, 5, 6], vec![7, 8, 9]], tail).unwrap()
    }

    #[test]
    fn pcheck_shape_and_rank() {
        let p = split_instance(vec![]);
        let m = goppa_pcheck(&p).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 6));
        let code = goppa_code(&p).unwrap();
        assert_eq!(code.k as i64, p.k_bound());
        assert_eq!(code.k, 2);
    }

    #[test]
    fn no_global_polynomial_gives_direct_sum() {
        let f = f16();
        let p = GoppaParams::new(&f, 2, 2, Poly::linear(&f, 1), Poly::one(), vec![vec![4, 5, 6], vec![7, 8, 9]], vec![])
            .unwrap();
        let code = goppa_code(&p).unwrap();
        assert_eq!(code.k, 4);
        assert!(verify_locality(&code).unwrap().ok);
    }

    #[test]
    fn rejects_roots_on_evaluation_points() {
        let f = f16();
        let r = GoppaParams::new(&f, 2, 2, Poly::linear(&f, 4), Poly::one(), vec![vec![4, 5, 6]], vec![]);
        assert!(matches!(r, Err(GoppaError::InvalidParameter(_))));
    }

    #[test]
    fn codewords_satisfy_congruences() {
        let p = split_instance(vec![10, 11]);
        let code = goppa_code(&p).unwrap();
        let g = code.generator();
        let f = &p.field;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let coeffs: Vec<Elem> = (0..g.rows()).map(|_| rng.gen_range(0..16)).collect();
            let v: Vec<Elem> = (0..g.cols())
                .map(|c| (0..g.rows()).fold(0, |acc, r| f.add(acc, f.mul(coeffs[r], g.get(r, c)))))
                .collect();
            assert!(residue_check(&p, &v).unwrap());
            let mut w = v.clone();
            w[0] = f.add(w[0], 1);
            assert!(!residue_check(&p, &w).unwrap());
        }
    }

    #[test]
    fn split_cauchy_form_has_same_row_space() {
        let p = split_instance(vec![10, 11]);
        let rep = compare_row_spaces(&p).unwrap();
        assert_eq!(rep.m1, 4);
        assert!(rep.equal);
    }

    #[test]
    fn irreducible_g2_needs_extension() {
        let f = f16();
        // x^2 + x + a is irreducible over F_16 exactly when a has trace 1.
        let a = f.elements().find(|&a| {
            let tr = (0..4).fold(0, |acc, i| f.add(acc, f.pow(a, 1 << i)));
            tr == 1
        });
        let g2 = Poly::from_coeffs(vec![a.unwrap(), 1, 1]);
        let p = GoppaParams::new(&f, 2, 2, Poly::linear(&f, 1), g2, vec![vec![4, 5, 6], vec![7, 8, 9]], vec![]).unwrap();
        let sp = splitting_pcheck(&p).unwrap();
        assert_eq!(sp.m1, 8);
        assert_eq!(sp.roots_g2.len(), 2);
        assert!(compare_row_spaces(&p).unwrap().equal);
    }

    #[test]
    fn repeated_root_is_rejected() {
        let f = f16();
        let p = GoppaParams::new(&f, 2, 2, Poly::linear(&f, 1), Poly::from_roots(&f, &[1, 2]), vec![vec![4, 5, 6]], vec![])
            .unwrap();
        assert_eq!(splitting_pcheck(&p).unwrap_err(), GoppaError::NotSeparable);
    }

    #[test]
    fn embedding_is_a_field_homomorphism() {
        let small = f16();
        let ext = Extension::new(&small, 8).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                let (ea, eb) = (ext.embed[a as usize], ext.embed[b as usize]);
                assert_eq!(ext.embed[small.mul(a, b) as usize], ext.big.mul(ea, eb));
                assert_eq!(ext.embed[small.add(a, b) as usize], ext.big.add(ea, eb));
            }
        }
    }

    #[test]
    fn distance_checks() {
        let rep = goppa_distance_check(&split_instance(vec![]), 1).unwrap();
        assert!(rep.hypotheses_hold && rep.ok);
        assert_eq!(rep.distance_bound, 4);
        assert!(rep.distance.at_least(4));
        assert!(!rep.optimality_applies);
    }

    #[test]
    fn nonempty_tail_can_fall_short_of_h_plus_delta() {
        // Two points of S_1 and one tail point are dependent here, although
        // every hypothesis of the optimality statement holds.
        let p = split_instance(vec![10, 11]);
        let rep = goppa_distance_check(&p, 1).unwrap();
        assert!(rep.optimality_applies && rep.locality.ok);
        assert_eq!((rep.k as i64, rep.k_bound), (4, 4));
        assert_eq!(rep.distance, Distance::Exact(3));
        assert_eq!((rep.bound_holds, rep.optimal, rep.ok), (Some(false), Some(false), false));
        let h = goppa_pcheck(&p).unwrap();
        assert!(!crate::erasure::recoverable(&h, &[1, 2, 7]));
    }
}
