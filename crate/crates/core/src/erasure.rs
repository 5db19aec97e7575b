//! Erasure patterns, the admissibility test for heavy repair sets, the
//! polynomial decoder for admissible patterns, a generic linear-algebra
//! decoder, and exact minimum-distance search.

use std::sync::atomic::{AtomicUsize, Ordering};

use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteField, Matrix, Poly};
use crate::lrc::{Coord, EvaluationLayout};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ErasureError {
    #[error("pattern is not admissible: {0}")]
    NotAdmissible(String),
    #[error("surviving symbols are inconsistent: {0}")]
    Inconsistent(String),
    #[error("erased columns have rank {rank} < {erased}")]
    Unrecoverable { rank: usize, erased: usize },
    #[error("search needs about {work} rank tests, above the limit {limit}; use sampling")]
    Infeasible { work: u128, limit: u128 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("decoder attempted to read erased coordinate {0}")]
    ReadErased(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Erased evaluation points per evaluation set, plus erased global points.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErasurePattern {
    pub sets: Vec<Vec<Elem>>,
    pub globals: Vec<Elem>,
}

impl ErasurePattern {
    pub fn empty(layout: &EvaluationLayout) -> Self {
        Self { sets: vec![Vec::new(); layout.sets().len()], globals: Vec::new() }
    }

    pub fn validate(&self, layout: &EvaluationLayout) -> Result<(), ErasureError> {
        if self.sets.len() != layout.sets().len() {
            return Err(ErasureError::InvalidInput(format!(
                "pattern has {} sets, layout has {}",
                self.sets.len(),
                layout.sets().len()
            )));
        }
        for (i, (e, a)) in self.sets.iter().zip(layout.sets()).enumerate() {
            if !e.iter().all(|x| a.contains(x)) || !e.iter().all_unique() {
                return Err(ErasureError::InvalidInput(format!("E_{i} is not a subset of A_{i}")));
            }
        }
        let s = layout.global_points();
        if !self.globals.iter().all(|x| s.contains(x)) || !self.globals.iter().all_unique() {
            return Err(ErasureError::InvalidInput("global erasures must be distinct points of S".into()));
        }
        Ok(())
    }

    /// Erased coordinates, ascending.
    pub fn coordinates(&self, layout: &EvaluationLayout) -> Result<Vec<usize>, ErasureError> {
        self.validate(layout)?;
        let mut out = Vec::new();
        for (i, e) in self.sets.iter().enumerate() {
            for x in e {
                let pos = layout.sets()[i].iter().position(|y| y == x).expect("validated");
                out.push(layout.coordinate(i, pos));
            }
        }
        for x in &self.globals {
            let j = layout.global_points().iter().position(|y| y == x).expect("validated");
            out.push(layout.global_coordinate(j));
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn from_coordinates(layout: &EvaluationLayout, coords: &[usize]) -> Result<Self, ErasureError> {
        let mut pat = Self::empty(layout);
        for &c in coords {
            if c >= layout.n() {
                return Err(ErasureError::InvalidInput(format!("coordinate {c} out of range")));
            }
            match layout.coord(c) {
                Coord::Local { set, pos } => pat.sets[set].push(layout.sets()[set][pos]),
                Coord::Global(j) => pat.globals.push(layout.global_points()[j]),
            }
        }
        pat.validate(layout)?;
        Ok(pat)
    }

    pub fn erased_coordinates(&self) -> usize {
        self.sets.iter().map(Vec::len).sum::<usize>() + self.globals.len()
    }

    /// Distinct erased evaluation points (set points and global points).
    pub fn distinct_points(&self) -> usize {
        let mut pts: Vec<Elem> = self.sets.iter().flatten().chain(&self.globals).copied().collect();
        pts.sort_unstable();
        pts.dedup();
        pts.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// Sets with at least `δ` erasures.
    pub heavy_sets: Vec<usize>,
    /// `|∪ E_i|` over heavy sets.
    pub heavy_union: usize,
    pub global_erasures: usize,
    /// `|∪_heavy E_i| + |E_glob| <= h + δ - 1`.
    pub within_budget: bool,
    /// Each heavy set meets the other heavy sets in at most `δ-1` points.
    pub overlap_ok: bool,
}

/// Sufficient conditions for recovering `pat` with [`decode_structured`].
pub fn pattern_admissible(layout: &EvaluationLayout, pat: &ErasurePattern) -> Result<Admissibility, ErasureError> {
    pat.validate(layout)?;
    let p = layout.params();
    let heavy: Vec<usize> = (0..pat.sets.len()).filter(|&i| pat.sets[i].len() >= p.delta).collect();
    let mut union: Vec<Elem> = heavy.iter().flat_map(|&i| pat.sets[i].iter().copied()).collect();
    union.sort_unstable();
    union.dedup();
    let within_budget = union.len() + pat.globals.len() < p.h + p.delta;
    let sets = layout.sets();
    let overlap_ok = heavy.iter().all(|&j| {
        sets[j].iter().filter(|x| heavy.iter().any(|&t| t != j && sets[t].contains(x))).count() < p.delta
    });
    Ok(Admissibility {
        admissible: within_budget && overlap_ok,
        heavy_union: union.len(),
        heavy_sets: heavy,
        global_erasures: pat.globals.len(),
        within_budget,
        overlap_ok,
    })
}

/// Interpolates through the first `need` points and checks the remainder.
fn fit(f: &FiniteField, pts: &[(Elem, Elem)], need: usize, what: &str) -> Result<Poly, ErasureError> {
    if pts.len() < need {
        return Err(ErasureError::NotAdmissible(format!("{what}: {} values known, {need} needed", pts.len())));
    }
    let poly = Poly::interpolate(f, &pts[..need])?;
    if let Some(&(x, _)) = pts[need..].iter().find(|&&(x, y)| poly.eval(f, x) != y) {
        return Err(ErasureError::Inconsistent(format!("{what} disagrees at point {x}")));
    }
    Ok(poly)
}

/// Recovers an admissible pattern by the polynomial procedure: repair light
/// sets locally, solve for the combined heavy-set polynomial `f_E` from
/// surviving shared points and global parities, split it back into the
/// per-set polynomials, and re-encode.
///
/// Erased coordinates of `received` are never read; any attempt is an
/// internal error ([`ErasureError::ReadErased`]).
pub fn decode_structured(
    layout: &EvaluationLayout,
    received: &[Option<Elem>],
    pat: &ErasurePattern,
) -> Result<Vec<Elem>, ErasureError> {
    let adm = pattern_admissible(layout, pat)?;
    if !adm.admissible {
        return Err(ErasureError::NotAdmissible(format!(
            "heavy sets {:?}: budget {}, overlap {}",
            adm.heavy_sets, adm.within_budget, adm.overlap_ok
        )));
    }
    let n = layout.n();
    if received.len() != n {
        return Err(ErasureError::InvalidInput(format!("received word has length {}, expected {n}", received.len())));
    }
    let mut erased = vec![false; n];
    for c in pat.coordinates(layout)? {
        erased[c] = true;
    }
    let read = |c: usize| -> Result<Elem, ErasureError> {
        if erased[c] {
            return Err(ErasureError::ReadErased(c));
        }
        received[c].ok_or_else(|| ErasureError::InvalidInput(format!("coordinate {c} is missing but not erased")))
    };
    let f = layout.field();
    let p = layout.params();
    let sets = layout.sets();
    let s_pts = layout.global_points();
    let mut is_heavy = vec![false; sets.len()];
    for &i in &adm.heavy_sets {
        is_heavy[i] = true;
    }

    let mut polys: Vec<Option<Poly>> = vec![None; sets.len()];
    for (i, a) in sets.iter().enumerate() {
        if is_heavy[i] {
            continue;
        }
        let mut pts = Vec::with_capacity(a.len());
        for (t, &x) in a.iter().enumerate() {
            let c = layout.coordinate(i, t);
            if !erased[c] {
                pts.push((x, read(c)?));
            }
        }
        polys[i] = Some(fit(f, &pts, p.set_dim(i), &format!("set {i}"))?);
    }

    if !adm.heavy_sets.is_empty() {
        let heavy = &adm.heavy_sets;
        let mut union: Vec<Elem> = Vec::new();
        for &i in heavy {
            for &x in &sets[i] {
                if !union.contains(&x) {
                    union.push(x);
                }
            }
        }
        // e_i(θ) = Π_{a ∈ A ∖ A_i} (θ - a)
        let weight = |i: usize, x: Elem| -> Elem {
            union.iter().filter(|a| !sets[i].contains(a)).fold(1, |acc, &a| f.mul(acc, f.sub(x, a)))
        };
        let mut known: Vec<(Elem, Elem)> = Vec::new();
        'points: for &x in &union {
            let mut val = 0;
            for &i in heavy {
                if let Some(t) = sets[i].iter().position(|&y| y == x) {
                    let c = layout.coordinate(i, t);
                    if erased[c] {
                        continue 'points;
                    }
                    val = f.add(val, f.mul(weight(i, x), read(c)?));
                }
            }
            known.push((x, val));
        }
        for (j, &s) in s_pts.iter().enumerate() {
            let c = layout.global_coordinate(j);
            if erased[c] {
                continue;
            }
            let mut g = 0;
            for (i, fi) in polys.iter().enumerate() {
                if let Some(fi) = fi {
                    g = f.add(g, f.mul(fi.eval(f, s), layout.cofactor_at(i, s)));
                }
            }
            let delta_s = (0..sets.len()).fold(1, |acc, i| f.mul(acc, layout.vanishing_at(&sets[i], s)));
            let phi = f.div(delta_s, layout.vanishing_at(&union, s))?;
            known.push((s, f.div(f.sub(read(c)?, g), phi)?));
        }
        let f_e = fit(f, &known, union.len() + 1 - p.delta, "combined heavy polynomial")?;
        for &i in heavy {
            let private: Vec<(Elem, Elem)> = sets[i]
                .iter()
                .filter(|x| !heavy.iter().any(|&t| t != i && sets[t].contains(x)))
                .map(|&x| Ok((x, f.div(f_e.eval(f, x), weight(i, x))?)))
                .collect::<Result<_, AlgebraError>>()?;
            let need = p.set_dim(i);
            if private.len() < need {
                return Err(ErasureError::NotAdmissible(format!("set {i} has too few private points")));
            }
            polys[i] = Some(Poly::interpolate(f, &private[..need])?);
        }
    }

    let polys: Vec<Poly> = polys.into_iter().map(|x| x.expect("every set recovered")).collect();
    let mut out = Vec::with_capacity(n);
    for (a, fi) in sets.iter().zip(&polys) {
        out.extend(a.iter().map(|&x| fi.eval(f, x)));
    }
    for &s in s_pts {
        let v = polys.iter().enumerate().fold(0, |acc, (i, fi)| f.add(acc, f.mul(fi.eval(f, s), layout.cofactor_at(i, s))));
        out.push(v);
    }
    for c in (0..n).filter(|&c| !erased[c]) {
        if out[c] != read(c)? {
            return Err(ErasureError::Inconsistent(format!("recovered word disagrees at coordinate {c}")));
        }
    }
    Ok(out)
}

/// Fills `erased` by solving `H_E x = -H_K c_K`.
pub fn decode_linear(h: &Matrix, erased: &[usize], received: &[Option<Elem>]) -> Result<Vec<Elem>, ErasureError> {
    let n = h.cols();
    if received.len() != n {
        return Err(ErasureError::InvalidInput(format!("received word has length {}, expected {n}", received.len())));
    }
    let f = h.field();
    let mut is_erased = vec![false; n];
    for &c in erased {
        if c >= n || is_erased[c] {
            return Err(ErasureError::InvalidInput(format!("bad erased coordinate {c}")));
        }
        is_erased[c] = true;
    }
    let mut rhs = vec![0; h.rows()];
    let mut out = vec![0; n];
    for c in (0..n).filter(|&c| !is_erased[c]) {
        let v = received[c].ok_or_else(|| ErasureError::InvalidInput(format!("coordinate {c} is missing")))?;
        out[c] = v;
        if v != 0 {
            for (r, x) in rhs.iter_mut().enumerate() {
                *x = f.sub(*x, f.mul(h.get(r, c), v));
            }
        }
    }
    let he = h.select_columns(erased);
    let rank = he.rank();
    if rank < erased.len() {
        return Err(ErasureError::Unrecoverable { rank, erased: erased.len() });
    }
    let x = he.solve(&rhs)?.ok_or_else(|| ErasureError::Inconsistent("no codeword matches the survivors".into()))?;
    for (&c, v) in erased.iter().zip(x) {
        out[c] = v;
    }
    Ok(out)
}

/// Whether every codeword is determined by the coordinates outside `coords`.
pub fn recoverable(h: &Matrix, coords: &[usize]) -> bool {
    coords.is_empty() || h.select_columns(coords).rank() == coords.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Distance {
    Exact(usize),
    /// No dependent set of size below this value exists.
    AtLeast(usize),
}

impl Distance {
    pub fn at_least(&self, d: usize) -> bool {
        match *self {
            Distance::Exact(x) | Distance::AtLeast(x) => x >= d,
        }
    }

    pub fn exact(&self) -> Option<usize> {
        match *self {
            Distance::Exact(x) => Some(x),
            Distance::AtLeast(_) => None,
        }
    }
}

/// Upper limit on the rank tests [`min_distance`] will attempt.
pub const DISTANCE_GUARD: u128 = 100_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u128).fold(1u128, |acc, i| acc.saturating_mul(n as u128 - i) / (i + 1))
}

/// Smallest number of linearly dependent columns of `h`, searched up to
/// `d_max`; larger distances are reported as [`Distance::AtLeast`].
pub fn min_distance(h: &Matrix, d_max: usize) -> Result<Distance, ErasureError> {
    min_distance_with(h, d_max, 1)
}

struct Echelon {
    pivots: Vec<usize>,
    rows: Vec<Vec<Elem>>,
}

impl Echelon {
    /// Reduces `v` against the basis; returns the pivot of the remainder, if nonzero.
    fn reduce(&self, f: &FiniteField, v: &mut [Elem]) -> Option<usize> {
        for (&p, b) in self.pivots.iter().zip(&self.rows) {
            let c = v[p];
            if c != 0 {
                crate::algebra::axpy_sub(f, v, c, b);
            }
        }
        v.iter().position(|&x| x != 0)
    }

    fn push(&mut self, f: &FiniteField, mut v: Vec<Elem>, pivot: usize) {
        let inv = f.inv_nonzero(v[pivot]);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.pivots.push(pivot);
        self.rows.push(v);
    }

    fn pop(&mut self) {
        self.pivots.pop();
        self.rows.pop();
    }
}

/// Depth-first search over independent prefixes. A column in the span of the
/// prefix closes a dependent set of size `depth + 1`; branches that cannot
/// beat the best size found so far are pruned.
fn dfs(f: &FiniteField, cols: &[Vec<Elem>], basis: &mut Echelon, start: usize, best: &AtomicUsize) {
    let depth = basis.rows.len();
    let mut scratch = vec![0; cols.first().map_or(0, Vec::len)];
    for c in start..cols.len() {
        if depth + 1 >= best.load(Ordering::Relaxed) {
            return;
        }
        scratch.copy_from_slice(&cols[c]);
        match basis.reduce(f, &mut scratch) {
            None => {
                best.fetch_min(depth + 1, Ordering::Relaxed);
            }
            Some(pivot) => {
                if depth + 2 < best.load(Ordering::Relaxed) {
                    basis.push(f, scratch.clone(), pivot);
                    dfs(f, cols, basis, c + 1, best);
                    basis.pop();
                }
            }
        }
    }
}

/// [`min_distance`] with the search partitioned by first column over
/// `workers` threads. The result does not depend on `workers`.
pub fn min_distance_with(h: &Matrix, d_max: usize, workers: usize) -> Result<Distance, ErasureError> {
    let n = h.cols();
    let f = h.field();
    // Any rows+1 columns are dependent.
    let cap = d_max.min(h.rows() + 1).min(n);
    let work: u128 = (1..=cap).map(|s| binomial(n, s)).fold(0u128, u128::saturating_add);
    if work > DISTANCE_GUARD {
        return Err(ErasureError::Infeasible { work, limit: DISTANCE_GUARD });
    }
    let cols: Vec<Vec<Elem>> = (0..n).map(|c| h.column(c)).collect();
    let best = AtomicUsize::new(cap + 1);
    crate::sweep::map_indexed(n, workers, |first| {
        let mut v = cols[first].clone();
        let mut basis = Echelon { pivots: Vec::new(), rows: Vec::new() };
        match basis.reduce(f, &mut v) {
            None => {
                best.fetch_min(1, Ordering::Relaxed);
            }
            Some(pivot) => {
                if 2 < best.load(Ordering::Relaxed) {
                    basis.push(f, v, pivot);
                    dfs(f, &cols, &mut basis, first + 1, &best);
                }
            }
        }
    });
    let best = best.into_inner();
    // `best > cap` means cap is d_max or n: rows+1 columns are always dependent.
    Ok(if best <= cap { Distance::Exact(best) } else { Distance::AtLeast(cap + 1) })
}

/// Reference implementation: rank of every column subset, by increasing size.
pub fn min_distance_naive(h: &Matrix, d_max: usize) -> Distance {
    for s in 1..=d_max.min(h.cols()) {
        if (0..h.cols()).combinations(s).any(|cs| h.select_columns(&cs).rank() < s) {
            return Distance::Exact(s);
        }
    }
    Distance::AtLeast(d_max.min(h.cols()) + 1)
}

/// How [`pattern_iter`] generates patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternSpec {
    /// Every coordinate set of size at most `max_weight`, by size then lexicographically.
    Exhaustive { max_weight: usize },
    /// `count` uniformly random coordinate sets of size `weight`.
    Sampled { count: usize, seed: u64, weight: usize },
    /// Every choice of `blocks` fully erased evaluation sets and `globals` global points.
    BlocksAndGlobals { blocks: usize, globals: usize },
    /// Up to `max_heavy` sets with at least `δ` erasures each, plus global
    /// erasures, with at most `max_points` erased distinct points in total
    /// (heavy-set points and global points).
    HeavyBlocks { max_heavy: usize, max_points: usize },
}

/// Deterministic stream of erasure patterns.
pub fn pattern_iter<'a>(
    layout: &'a EvaluationLayout,
    spec: PatternSpec,
) -> Box<dyn Iterator<Item = ErasurePattern> + 'a> {
    let n = layout.n();
    let to_pattern =
        move |cs: Vec<usize>| ErasurePattern::from_coordinates(layout, &cs).expect("coordinates in range");
    match spec {
        PatternSpec::Exhaustive { max_weight } => Box::new(
            (0..=max_weight.min(n)).flat_map(move |s| (0..n).combinations(s)).map(to_pattern),
        ),
        PatternSpec::Sampled { count, seed, weight } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let weight = weight.min(n);
            Box::new((0..count).map(move |_| {
                let mut cs = sample(&mut rng, n, weight).into_vec();
                cs.sort_unstable();
                to_pattern(cs)
            }))
        }
        PatternSpec::BlocksAndGlobals { blocks, globals } => {
            let n_sets = layout.sets().len();
            let s = layout.global_points().to_vec();
            Box::new((0..n_sets).combinations(blocks).flat_map(move |bs| {
                let s = s.clone();
                s.clone().into_iter().combinations(globals).map(move |gs| {
                    let mut pat = ErasurePattern::empty(layout);
                    for &b in &bs {
                        pat.sets[b] = layout.sets()[b].clone();
                    }
                    pat.globals = gs;
                    pat
                })
            }))
        }
        PatternSpec::HeavyBlocks { max_heavy, max_points } => Box::new(heavy_patterns(layout, max_heavy, max_points).into_iter()),
    }
}

fn heavy_patterns(layout: &EvaluationLayout, max_heavy: usize, max_points: usize) -> Vec<ErasurePattern> {
    let delta = layout.params().delta;
    let sets = layout.sets();
    let s = layout.global_points();
    let mut out = Vec::new();
    let globals_up_to = |budget: usize| (0..=budget.min(s.len())).flat_map(|g| s.iter().copied().combinations(g));
    for gs in globals_up_to(max_points) {
        out.push(ErasurePattern { sets: vec![Vec::new(); sets.len()], globals: gs });
    }
    for w in 1..=max_heavy {
        for chosen in (0..sets.len()).combinations(w) {
            // Per chosen set, every erased subset of size >= δ.
            let options: Vec<Vec<Vec<Elem>>> = chosen
                .iter()
                .map(|&i| (delta..=sets[i].len()).flat_map(|sz| sets[i].iter().copied().combinations(sz)).collect())
                .collect();
            for combo in options.iter().map(|o| o.iter()).multi_cartesian_product() {
                let mut union: Vec<Elem> = combo.iter().flat_map(|e| e.iter().copied()).collect();
                union.sort_unstable();
                union.dedup();
                if union.len() > max_points {
                    continue;
                }
                for gs in globals_up_to(max_points - union.len()) {
                    let mut pat = ErasurePattern::empty(layout);
                    for (&i, e) in chosen.iter().zip(&combo) {
                        pat.sets[i] = (*e).clone();
                    }
                    pat.globals = gs;
                    out.push(pat);
                }
            }
        }
    }
    out
}
