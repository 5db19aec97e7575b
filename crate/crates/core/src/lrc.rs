//! Evaluation codes with information locality: layouts of evaluation sets,
//! the two-step polynomial encoder, and generator/parity-check synthesis.
//!
//! Coordinates are block-major: the symbols of `A_1` (in layout order), then
//! `A_2`, ..., then `A_{ℓ+1}`, then the `h` global parities in the order of
//! `S`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteField, Matrix, Poly};
use crate::designs::Design;
use crate::erasure::{min_distance, Distance, ErasureError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LrcError {
    #[error("field of order {q} cannot host {points} points plus {h} global evaluation points")]
    FieldTooSmall { q: u32, points: usize, h: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Erasure(#[from] Box<ErasureError>),
}

impl From<ErasureError> for LrcError {
    fn from(e: ErasureError) -> Self {
        LrcError::Erasure(Box::new(e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrcParams {
    pub r: usize,
    pub delta: usize,
    pub ell: usize,
    pub v: usize,
    pub h: usize,
}

impl LrcParams {
    pub fn new(r: usize, delta: usize, ell: usize, v: usize, h: usize) -> Result<Self, LrcError> {
        let p = Self { r, delta, ell, v, h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), LrcError> {
        if self.r == 0 || self.delta < 2 || self.ell == 0 || self.v == 0 || self.v > self.r {
            return Err(LrcError::InvalidParameter(format!(
                "need r >= 1, delta >= 2, ell >= 1, 0 < v <= r; got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.r * self.ell + self.v
    }

    pub fn n(&self) -> usize {
        self.k() + (self.ell + 1) * (self.delta - 1) + self.h
    }

    /// Size of the `i`-th evaluation set (0-based).
    pub fn set_len(&self, i: usize) -> usize {
        if i < self.ell {
            self.r + self.delta - 1
        } else {
            self.v + self.delta - 1
        }
    }

    /// Information symbols carried by the `i`-th evaluation set.
    pub fn set_dim(&self, i: usize) -> usize {
        if i < self.ell {
            self.r
        } else {
            self.v
        }
    }

    /// Singleton-type bound `n - k + 1 - (⌈k/r⌉ - 1)(δ - 1)`, which equals `h + δ` here.
    pub fn singleton(&self) -> usize {
        crate::bounds::singleton_bound(self.n(), self.k(), self.r, self.delta)
            .expect("valid parameters give a nonnegative bound") as usize
    }
}

/// Location of a code coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    /// Position `t` of evaluation set `set`.
    Local { set: usize, pos: usize },
    /// The `j`-th global parity.
    Global(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationLayout {
    field: FiniteField,
    params: LrcParams,
    s: Vec<Elem>,
    sets: Vec<Vec<Elem>>,
    offsets: Vec<usize>,
    max_intersection: usize,
}

impl EvaluationLayout {
    /// Builds a layout from explicit ordered evaluation sets and global points.
    pub fn from_sets(
        field: &FiniteField,
        params: LrcParams,
        sets: Vec<Vec<Elem>>,
        s: Vec<Elem>,
    ) -> Result<Self, LrcError> {
        params.validate()?;
        if sets.len() != params.ell + 1 {
            return Err(LrcError::InvalidParameter(format!(
                "expected {} evaluation sets, got {}",
                params.ell + 1,
                sets.len()
            )));
        }
        if s.len() != params.h {
            return Err(LrcError::InvalidParameter(format!("expected {} global points, got {}", params.h, s.len())));
        }
        let in_field = |x: &Elem| field.contains(*x);
        let distinct = |xs: &[Elem]| (1..xs.len()).all(|i| !xs[..i].contains(&xs[i]));
        if !s.iter().all(in_field) || !distinct(&s) {
            return Err(LrcError::InvalidParameter("global points must be distinct field elements".into()));
        }
        for (i, a) in sets.iter().enumerate() {
            if a.len() != params.set_len(i) {
                return Err(LrcError::InvalidParameter(format!(
                    "set {i} has {} points, expected {}",
                    a.len(),
                    params.set_len(i)
                )));
            }
            if !a.iter().all(in_field) || !distinct(a) {
                return Err(LrcError::InvalidParameter(format!("set {i} must hold distinct field elements")));
            }
            if let Some(x) = a.iter().find(|x| s.contains(x)) {
                return Err(LrcError::InvalidParameter(format!("set {i} meets the global points at {x}")));
            }
        }
        let mut offsets = Vec::with_capacity(sets.len());
        let mut acc = 0;
        for a in &sets {
            offsets.push(acc);
            acc += a.len();
        }
        let mut max_intersection = 0;
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let c = sets[i].iter().filter(|x| sets[j].contains(x)).count();
                max_intersection = max_intersection.max(c);
            }
        }
        Ok(Self { field: field.clone(), params, s, sets, offsets, max_intersection })
    }

    /// Embeds the first `ℓ+1` blocks of `design` into `field`.
    ///
    /// Point label `i` maps to the `i`-th element (0-based) of `F_q ∖ S` in
    /// canonical order; `S` defaults to the last `h` elements of the field.
    /// The last block is truncated to its first `v+δ-1` points.
    pub fn from_design(
        field: &FiniteField,
        params: LrcParams,
        design: &Design,
        s: Option<Vec<Elem>>,
    ) -> Result<Self, LrcError> {
        params.validate()?;
        let q = field.order();
        if (q as usize) < design.n_points + params.h {
            return Err(LrcError::FieldTooSmall { q, points: design.n_points, h: params.h });
        }
        let s = s.unwrap_or_else(|| (q - params.h as u32..q).collect());
        if s.len() != params.h {
            return Err(LrcError::InvalidParameter(format!("expected {} global points, got {}", params.h, s.len())));
        }
        let embed: Vec<Elem> = field.elements().filter(|x| !s.contains(x)).collect();
        if embed.len() < design.n_points {
            return Err(LrcError::FieldTooSmall { q, points: design.n_points, h: params.h });
        }
        if design.blocks.len() < params.ell + 1 {
            return Err(LrcError::InvalidParameter(format!(
                "design has {} blocks, need {}",
                design.blocks.len(),
                params.ell + 1
            )));
        }
        let full = params.r + params.delta - 1;
        let mut sets = Vec::with_capacity(params.ell + 1);
        for (i, block) in design.blocks.iter().take(params.ell + 1).enumerate() {
            if block.len() != full {
                return Err(LrcError::InvalidParameter(format!(
                    "block {i} has size {}, expected r+delta-1 = {full}",
                    block.len()
                )));
            }
            sets.push(block.iter().take(params.set_len(i)).map(|&p| embed[p]).collect());
        }
        Self::from_sets(field, params, sets, s)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn params(&self) -> &LrcParams {
        &self.params
    }

    pub fn sets(&self) -> &[Vec<Elem>] {
        &self.sets
    }

    pub fn global_points(&self) -> &[Elem] {
        &self.s
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn k(&self) -> usize {
        self.params.k()
    }

    /// `max_{i≠j} |A_i ∩ A_j|`.
    pub fn max_intersection(&self) -> usize {
        self.max_intersection
    }

    pub fn coordinate(&self, set: usize, pos: usize) -> usize {
        self.offsets[set] + pos
    }

    pub fn global_coordinate(&self, j: usize) -> usize {
        self.n() - self.params.h + j
    }

    pub fn coord(&self, c: usize) -> Coord {
        let first_global = self.n() - self.params.h;
        if c >= first_global {
            return Coord::Global(c - first_global);
        }
        let set = self.offsets.partition_point(|&o| o <= c) - 1;
        Coord::Local { set, pos: c - self.offsets[set] }
    }

    /// Evaluation point of a coordinate.
    pub fn point(&self, c: usize) -> Elem {
        match self.coord(c) {
            Coord::Local { set, pos } => self.sets[set][pos],
            Coord::Global(j) => self.s[j],
        }
    }

    pub fn set_coordinates(&self, set: usize) -> Vec<usize> {
        (0..self.sets[set].len()).map(|t| self.offsets[set] + t).collect()
    }

    /// Distinct evaluation points used by the evaluation sets, ascending.
    pub fn points(&self) -> Vec<Elem> {
        let mut pts: Vec<Elem> = self.sets.iter().flatten().copied().collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }

    /// `g_i(x) = Π_{θ∈A_i}(x - θ)`.
    pub fn set_poly(&self, i: usize) -> Poly {
        Poly::from_roots(&self.field, &self.sets[i])
    }

    /// `Π_{j≠i} g_j(x)` evaluated at `x` (which must avoid every `A_j`, `j ≠ i`).
    pub(crate) fn cofactor_at(&self, i: usize, x: Elem) -> Elem {
        let f = &self.field;
        let mut acc = 1;
        for (j, a) in self.sets.iter().enumerate() {
            if j != i {
                for &t in a {
                    acc = f.mul(acc, f.sub(x, t));
                }
            }
        }
        acc
    }

    /// `Π_{θ∈pts}(x - θ)` evaluated at `x`.
    pub(crate) fn vanishing_at(&self, pts: &[Elem], x: Elem) -> Elem {
        pts.iter().fold(1, |acc, &t| self.field.mul(acc, self.field.sub(x, t)))
    }

    pub fn repair_sets(&self) -> Vec<RepairSet> {
        (0..self.sets.len())
            .map(|i| RepairSet { coords: self.set_coordinates(i), delta: self.params.delta })
            .collect()
    }

    pub fn to_file(&self) -> LayoutFile {
        LayoutFile {
            p: self.field.characteristic(),
            m: self.field.degree(),
            modulus: self.field.modulus().to_vec(),
            params: self.params,
            s: self.s.clone(),
            sets: self.sets.clone(),
        }
    }

    pub fn from_file(file: &LayoutFile) -> Result<Self, LrcError> {
        let field = FiniteField::with_modulus(file.p, file.modulus.clone())?;
        if field.degree() != file.m {
            return Err(LrcError::InvalidParameter("modulus degree disagrees with m".into()));
        }
        Self::from_sets(&field, file.params, file.sets.clone(), file.s.clone())
    }
}

/// JSON form of an [`EvaluationLayout`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub p: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
    pub params: LrcParams,
    pub s: Vec<Elem>,
    pub sets: Vec<Vec<Elem>>,
}

/// Per-set data polynomials `f_j` of an information vector (step 1 of the encoder).
pub fn local_polys(layout: &EvaluationLayout, info: &[Elem]) -> Result<Vec<Poly>, LrcError> {
    let f = layout.field();
    let p = layout.params();
    if info.len() != p.k() {
        return Err(LrcError::InvalidParameter(format!("expected {} information symbols, got {}", p.k(), info.len())));
    }
    if let Some(&bad) = info.iter().find(|&&x| !f.contains(x)) {
        return Err(AlgebraError::InvalidElement(bad).into());
    }
    let mut polys = Vec::with_capacity(p.ell + 1);
    let mut start = 0;
    for (j, a) in layout.sets().iter().enumerate() {
        let dim = p.set_dim(j);
        let pts: Vec<(Elem, Elem)> = a.iter().copied().zip(info[start..start + dim].iter().copied()).collect();
        polys.push(Poly::interpolate(f, &pts)?);
        start += dim;
    }
    Ok(polys)
}

/// `f_I = Σ_i f_i Π_{j≠i} g_j`, accumulated as `R_i = R_{i-1} g_i + f_i Π_{j<i} g_j`.
pub fn global_poly(layout: &EvaluationLayout, polys: &[Poly]) -> Poly {
    let f = layout.field();
    let mut acc = Poly::zero();
    let mut prefix = Poly::one();
    for (i, fi) in polys.iter().enumerate() {
        let gi = layout.set_poly(i);
        acc = acc.mul(&gi, f).add(&fi.mul(&prefix, f), f);
        prefix = prefix.mul(&gi, f);
    }
    acc
}

/// Two-step encoder: interpolate each `f_j` on the first `|A_j|-δ+1` points
/// of `A_j`, evaluate on all of `A_j`, then evaluate `f_I` on `S`.
pub fn encode(layout: &EvaluationLayout, info: &[Elem]) -> Result<Vec<Elem>, LrcError> {
    let f = layout.field();
    let polys = local_polys(layout, info)?;
    let mut c = Vec::with_capacity(layout.n());
    for (a, fj) in layout.sets().iter().zip(&polys) {
        c.extend(a.iter().map(|&x| fj.eval(f, x)));
    }
    if layout.params().h > 0 {
        let fi = global_poly(layout, &polys);
        c.extend(layout.global_points().iter().map(|&s| fi.eval(f, s)));
    }
    Ok(c)
}

/// Lagrange basis value `L_u(x)` on `nodes`.
fn lagrange(f: &FiniteField, nodes: &[Elem], u: usize, x: Elem) -> Elem {
    let mut num = 1;
    let mut den = 1;
    for (w, &xw) in nodes.iter().enumerate() {
        if w != u {
            num = f.mul(num, f.sub(x, xw));
            den = f.mul(den, f.sub(nodes[u], xw));
        }
    }
    f.mul(num, f.inv_nonzero(den))
}

/// Rows are the encodings of the unit information vectors.
///
/// Each row is evaluated pointwise: for the unit vector at position `u` of
/// set `j`, `f_j` is the Lagrange basis polynomial `L_u` and the global
/// symbols are `L_u(s) Π_{i≠j} g_i(s)`; this agrees with [`encode`].
pub fn generator_matrix(layout: &EvaluationLayout) -> Matrix {
    let f = layout.field();
    let p = layout.params();
    let n = layout.n();
    let mut g = Matrix::zeros(f, p.k(), n);
    let mut row = 0;
    for (j, a) in layout.sets().iter().enumerate() {
        let nodes = &a[..p.set_dim(j)];
        let cof: Vec<Elem> = layout.global_points().iter().map(|&s| layout.cofactor_at(j, s)).collect();
        for u in 0..nodes.len() {
            for (t, &x) in a.iter().enumerate() {
                g.set(row, layout.coordinate(j, t), lagrange(f, nodes, u, x));
            }
            for (gi, &s) in layout.global_points().iter().enumerate() {
                g.set(row, layout.global_coordinate(gi), f.mul(lagrange(f, nodes, u, s), cof[gi]));
            }
            row += 1;
        }
    }
    g
}

/// A basis of the dual code, i.e. the nullspace of the generator matrix.
pub fn parity_check_matrix(layout: &EvaluationLayout) -> Result<Matrix, LrcError> {
    let g = generator_matrix(layout);
    let h = g.nullspace();
    if h.rows() != layout.n() - layout.k() {
        return Err(LrcError::InternalInvariantViolation(format!(
            "generator has rank {} instead of {}",
            layout.n() - h.rows(),
            layout.k()
        )));
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairSet {
    pub coords: Vec<usize>,
    pub delta: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    pub field: FiniteField,
    pub n: usize,
    pub k: usize,
    pub generator: Option<Matrix>,
    pub parity_check: Matrix,
    pub repair_sets: Vec<RepairSet>,
}

impl LinearCode {
    pub fn from_generator(g: Matrix, repair_sets: Vec<RepairSet>) -> Result<Self, LrcError> {
        let h = g.nullspace();
        let k = g.cols() - h.rows();
        if k != g.rows() {
            return Err(LrcError::InvalidParameter(format!("generator rows are dependent (rank {k} < {})", g.rows())));
        }
        Ok(Self { field: g.field().clone(), n: g.cols(), k, generator: Some(g), parity_check: h, repair_sets })
    }

    /// The parity-check matrix may have dependent rows; `k` is `n - rank(H)`.
    pub fn from_parity_check(h: Matrix, repair_sets: Vec<RepairSet>) -> Self {
        let k = h.cols() - h.rank();
        Self { field: h.field().clone(), n: h.cols(), k, generator: None, parity_check: h, repair_sets }
    }

    /// The code of Construction-1 type described by `layout`.
    pub fn from_layout(layout: &EvaluationLayout) -> Result<Self, LrcError> {
        let g = generator_matrix(layout);
        let code = Self::from_generator(g, layout.repair_sets())?;
        if code.k != layout.k() {
            return Err(LrcError::InternalInvariantViolation("dimension differs from r*ell+v".into()));
        }
        Ok(code)
    }

    /// A generator matrix (computed from `H` when not stored).
    pub fn generator(&self) -> Matrix {
        self.generator.clone().unwrap_or_else(|| self.parity_check.nullspace())
    }

    pub fn is_codeword(&self, c: &[Elem]) -> bool {
        self.parity_check.mul_vec(c).is_ok_and(|s| s.iter().all(|&x| x == 0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetLocality {
    pub index: usize,
    pub size: usize,
    pub punctured_dimension: usize,
    pub punctured_distance: Distance,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub sets: Vec<SetLocality>,
    /// Rank of the generator restricted to the union of the repair sets.
    pub union_rank: usize,
    pub k: usize,
    pub ok: bool,
}

/// Checks that each declared repair set punctures to a code of distance at
/// least its `delta`, and that the repair sets jointly carry rank `k`.
pub fn verify_locality(code: &LinearCode) -> Result<LocalityReport, LrcError> {
    let g = code.generator();
    let mut sets = Vec::with_capacity(code.repair_sets.len());
    let mut union: Vec<usize> = Vec::new();
    for (index, rs) in code.repair_sets.iter().enumerate() {
        let punct = g.select_columns(&rs.coords);
        let dim = punct.rank();
        let h = punct.nullspace();
        // Dual of the punctured code: parity checks of the code `rowspace(punct)`.
        let dual = Matrix::from_rows_with_cols(&code.field, h.to_rows(), rs.coords.len())?;
        let dist = min_distance(&dual, rs.delta)?;
        let ok = dim > 0 && dist.at_least(rs.delta);
        sets.push(SetLocality { index, size: rs.coords.len(), punctured_dimension: dim, punctured_distance: dist, ok });
        union.extend(&rs.coords);
    }
    union.sort_unstable();
    union.dedup();
    let union_rank = g.select_columns(&union).rank();
    let ok = sets.iter().all(|s| s.ok) && union_rank == code.k;
    Ok(LocalityReport { sets, union_rank, k: code.k, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{ag_steiner, Design};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn example1_layout() -> EvaluationLayout {
        let f = FiniteField::prime(11).unwrap();
        let blocks: Vec<Vec<usize>> = (0..7).map(|i| [3, 6, 5].iter().map(|x| (x + i) % 7).collect()).collect();
        let d = Design::new(7, 2, 3, blocks);
        let p = LrcParams::new(2, 2, 6, 2, 3).unwrap();
        EvaluationLayout::from_design(&f, p, &d, Some(vec![8, 9, 10])).unwrap()
    }

    fn random_info(rng: &mut ChaCha8Rng, q: u32, k: usize) -> Vec<Elem> {
        (0..k).map(|_| rng.gen_range(0..q)).collect()
    }

    #[test]
    fn params_bookkeeping() {
        let p = LrcParams::new(2, 2, 6, 2, 3).unwrap();
        assert_eq!((p.k(), p.n()), (14, 24));
        assert_eq!(p.n(), p.ell * (p.r + p.delta - 1) + p.v + p.delta - 1 + p.h);
        assert_eq!(p.singleton(), 5);
        assert!(LrcParams::new(2, 2, 1, 3, 0).is_err());
        assert!(LrcParams::new(2, 1, 1, 1, 0).is_err());
    }

    #[test]
    fn example1_layout_shape() {
        let l = example1_layout();
        assert_eq!(l.sets().len(), 7);
        assert_eq!(l.sets()[0], vec![3, 6, 5]);
        assert_eq!(l.max_intersection(), 1);
        assert_eq!(l.n(), 24);
        assert_eq!(l.coord(5), Coord::Local { set: 1, pos: 2 });
        assert_eq!(l.coord(22), Coord::Global(1));
        assert_eq!(l.point(22), 9);
    }

    #[test]
    fn field_too_small() {
        let f = FiniteField::prime(11).unwrap();
        let d = ag_steiner(3, 2).unwrap();
        let p = LrcParams::new(2, 2, 10, 2, 3).unwrap();
        assert!(matches!(EvaluationLayout::from_design(&f, p, &d, None), Err(LrcError::FieldTooSmall { .. })));
    }

    #[test]
    fn zero_and_constant_info() {
        let l = example1_layout();
        assert_eq!(encode(&l, &[0; 14]).unwrap(), vec![0; 24]);
        let f = FiniteField::prime(11).unwrap();
        let p = LrcParams::new(2, 2, 1, 2, 0).unwrap();
        let l = EvaluationLayout::from_sets(&f, p, vec![vec![0, 1, 2], vec![3, 4, 5]], vec![]).unwrap();
        assert_eq!(encode(&l, &[7, 7, 0, 0]).unwrap(), vec![7, 7, 7, 0, 0, 0]);
        assert_eq!(l.n(), 6);
    }

    #[test]
    fn generator_rows_match_encoder() {
        let l = example1_layout();
        let g = generator_matrix(&l);
        for i in 0..l.k() {
            let mut e = vec![0; l.k()];
            e[i] = 1;
            assert_eq!(g.row(i), encode(&l, &e).unwrap().as_slice());
        }
        let h = parity_check_matrix(&l).unwrap();
        assert_eq!((g.rank(), h.rank()), (14, 10));
        assert!(g.mul(&h.transpose()).unwrap().is_zero());
    }

    #[test]
    fn encoder_linear_and_consistent() {
        let l = example1_layout();
        let f = l.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u = random_info(&mut rng, 11, 14);
            let w = random_info(&mut rng, 11, 14);
            let (a, b) = (rng.gen_range(0..11), rng.gen_range(0..11));
            let mix: Vec<Elem> = u.iter().zip(&w).map(|(&x, &y)| f.add(f.mul(a, x), f.mul(b, y))).collect();
            let (cu, cw, cm) = (encode(&l, &u).unwrap(), encode(&l, &w).unwrap(), encode(&l, &mix).unwrap());
            let lin: Vec<Elem> = cu.iter().zip(&cw).map(|(&x, &y)| f.add(f.mul(a, x), f.mul(b, y))).collect();
            assert_eq!(cm, lin);
            // Each block's symbols lie on a polynomial of degree < |A_j| - δ + 1.
            for j in 0..7 {
                let pts: Vec<(Elem, Elem)> =
                    l.sets()[j].iter().enumerate().map(|(t, &x)| (x, cu[l.coordinate(j, t)])).collect();
                let poly = Poly::interpolate(&f, &pts).unwrap();
                assert!(poly.degree().is_none_or(|d| d < 2));
            }
            // Globals equal Δ(s) Σ f_i(s)/g_i(s) evaluated pointwise.
            let polys = local_polys(&l, &u).unwrap();
            for (gi, &s) in l.global_points().iter().enumerate() {
                let delta: Elem = (0..7).fold(1, |acc, i| f.mul(acc, l.set_poly(i).eval(&f, s)));
                let sum = (0..7).fold(0, |acc, i| {
                    f.add(acc, f.div(polys[i].eval(&f, s), l.set_poly(i).eval(&f, s)).unwrap())
                });
                assert_eq!(cu[l.global_coordinate(gi)], f.mul(delta, sum));
            }
        }
    }

    #[test]
    fn example1_code_locality() {
        let l = example1_layout();
        let code = LinearCode::from_layout(&l).unwrap();
        let rep = verify_locality(&code).unwrap();
        assert!(rep.ok);
        for s in &rep.sets {
            assert_eq!((s.size, s.punctured_dimension, s.punctured_distance), (3, 2, Distance::Exact(2)));
        }
    }

    #[test]
    fn disjoint_blocks_are_mds() {
        let f = FiniteField::prime(13).unwrap();
        let p = LrcParams::new(3, 3, 1, 3, 0).unwrap();
        let l = EvaluationLayout::from_sets(&f, p, vec![(0..5).collect(), (5..10).collect()], vec![]).unwrap();
        let code = LinearCode::from_layout(&l).unwrap();
        let g = code.generator();
        for r in 0..3 {
            assert!(g.row(r)[5..].iter().all(|&x| x == 0));
            assert!(g.row(r + 3)[..5].iter().all(|&x| x == 0));
        }
        let rep = verify_locality(&code).unwrap();
        assert!(rep.sets.iter().all(|s| s.punctured_distance == Distance::Exact(3)));
    }

    #[test]
    fn random_code_fails_locality() {
        let f = FiniteField::prime(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rows: Vec<Vec<Elem>> = (0..14).map(|_| random_info(&mut rng, 11, 24)).collect();
        let g = Matrix::from_rows(&f, rows).unwrap();
        let code = LinearCode::from_generator(g, example1_layout().repair_sets()).unwrap();
        assert!(!verify_locality(&code).unwrap().ok);
    }

    #[test]
    fn ag_layout_dimensions() {
        let f = FiniteField::prime(13).unwrap();
        let d = ag_steiner(3, 2).unwrap();
        let p = LrcParams::new(2, 2, 11, 2, 4).unwrap();
        let l = EvaluationLayout::from_design(&f, p, &d, None).unwrap();
        let g = generator_matrix(&l);
        assert_eq!((g.rows(), g.cols()), (24, 40));
        assert_eq!(l.global_points(), &[9, 10, 11, 12]);
    }

    #[test]
    fn layout_json_round_trip() {
        let l = example1_layout();
        let json = serde_json::to_string(&l.to_file()).unwrap();
        let back = EvaluationLayout::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, l);
    }
}
