//! Packings and Steiner systems used as evaluation-set families.
//!
//! Points are always dense labels `0..n`; `descriptions` maps each label to
//! its algebraic meaning (a vector, a projective point, ...).

use std::collections::HashMap;
use std::fmt::Write as _;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{prime_power, AlgebraError, Elem, FiniteField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Design {
    pub n_points: usize,
    /// Strength: every `tau`-subset of points lies in at most one block.
    pub tau: usize,
    pub block_size: usize,
    pub blocks: Vec<Vec<usize>>,
    /// Advertised replication number, if the family is regular.
    pub regularity: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub descriptions: Vec<String>,
}

/// Largest number of points any generator here will build.
const MAX_POINTS: usize = 20_000;

fn field_for(q1: u64) -> Result<FiniteField, DesignError> {
    if prime_power(q1).is_none() {
        return Err(DesignError::InvalidParameter(format!("{q1} is not a prime power")));
    }
    Ok(FiniteField::of_order(q1)?)
}

fn checked_points(q: u64, dim: u32) -> Result<usize, DesignError> {
    match q.checked_pow(dim) {
        Some(n) if n as usize <= MAX_POINTS => Ok(n as usize),
        _ => Err(DesignError::InvalidParameter(format!("{q}^{dim} points exceed the supported size"))),
    }
}

fn vector_of(index: usize, q: usize, dim: usize) -> Vec<Elem> {
    let mut v = Vec::with_capacity(dim);
    let mut x = index;
    for _ in 0..dim {
        v.push((x % q) as Elem);
        x /= q;
    }
    v
}

fn index_of(v: &[Elem], q: usize) -> usize {
    v.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
}

impl Design {
    pub fn new(n_points: usize, tau: usize, block_size: usize, blocks: Vec<Vec<usize>>) -> Self {
        Self { n_points, tau, block_size, blocks, regularity: None, descriptions: Vec::new() }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Blocks containing each point.
    pub fn replication(&self) -> Vec<usize> {
        let mut count = vec![0; self.n_points];
        for b in &self.blocks {
            for &p in b {
                if p < self.n_points {
                    count[p] += 1;
                }
            }
        }
        count
    }

    /// Largest intersection between two distinct blocks.
    pub fn max_pairwise_intersection(&self) -> usize {
        let sets: Vec<Vec<bool>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut mask = vec![false; self.n_points];
                b.iter().filter(|&&p| p < self.n_points).for_each(|&p| mask[p] = true);
                mask
            })
            .collect();
        let mut best = 0;
        for i in 0..self.blocks.len() {
            for j in i + 1..self.blocks.len() {
                let c = self.blocks[j].iter().filter(|&&p| p < self.n_points && sets[i][p]).count();
                best = best.max(c);
            }
        }
        best
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.n_points, self.tau, self.block_size);
        for b in &self.blocks {
            let _ = writeln!(s, "{}", b.iter().join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Design, DesignError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let parse = |l: &str| -> Result<Vec<usize>, DesignError> {
            l.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| DesignError::Parse(format!("{t:?}: {e}"))))
                .collect()
        };
        let header = parse(lines.next().ok_or_else(|| DesignError::Parse("empty design file".into()))?)?;
        let [n, tau, t] = header[..] else {
            return Err(DesignError::Parse("header must be `n tau t`".into()));
        };
        let mut blocks = Vec::new();
        for l in lines {
            let b = parse(l)?;
            if let Some(&bad) = b.iter().find(|&&p| p >= n) {
                return Err(DesignError::Parse(format!("point {bad} out of range 0..{n}")));
            }
            blocks.push(b);
        }
        Ok(Design::new(n, tau, t, blocks))
    }
}

/// Lines of the affine geometry `AG(beta, q1)`: a `(2, q1, q1^beta)` Steiner system.
pub fn ag_steiner(q1: u64, beta: u32) -> Result<Design, DesignError> {
    if beta < 2 {
        return Err(DesignError::InvalidParameter("beta must be at least 2".into()));
    }
    let f = field_for(q1)?;
    let q = q1 as usize;
    let dim = beta as usize;
    let n = checked_points(q1, beta)?;
    // Directions normalized so that the first nonzero coordinate is 1.
    let directions: Vec<Vec<Elem>> = (1..n)
        .map(|i| vector_of(i, q, dim))
        .filter(|v| v.iter().find(|&&c| c != 0) == Some(&1))
        .collect();
    let mut blocks = Vec::new();
    for d in &directions {
        for a in 0..n {
            let base = vector_of(a, q, dim);
            let mut line: Vec<usize> = f
                .elements()
                .map(|t| {
                    let p: Vec<Elem> = base.iter().zip(d).map(|(&x, &y)| f.add(x, f.mul(t, y))).collect();
                    index_of(&p, q)
                })
                .collect();
            line.sort_unstable();
            if line[0] == a {
                blocks.push(line);
            }
        }
    }
    blocks.sort();
    let descriptions = (0..n).map(|i| format!("{:?}", vector_of(i, q, dim))).collect();
    Ok(Design {
        n_points: n,
        tau: 2,
        block_size: q,
        blocks,
        regularity: Some((n - 1) / (q - 1)),
        descriptions,
    })
}

/// Lines of the projective geometry `PG(beta, q1)`: a
/// `(2, q1+1, (q1^{beta+1}-1)/(q1-1))` Steiner system.
pub fn pg_steiner(q1: u64, beta: u32) -> Result<Design, DesignError> {
    if beta < 2 {
        return Err(DesignError::InvalidParameter("beta must be at least 2".into()));
    }
    let f = field_for(q1)?;
    let q = q1 as usize;
    let dim = beta as usize + 1;
    let total = checked_points(q1, beta + 1)?;
    let normalized = |v: &[Elem]| -> Vec<Elem> {
        let lead = *v.iter().find(|&&c| c != 0).expect("nonzero vector");
        let inv = f.inv_nonzero(lead);
        v.iter().map(|&c| f.mul(c, inv)).collect()
    };
    let mut points: Vec<Vec<Elem>> = Vec::new();
    let mut label = vec![usize::MAX; total];
    for i in 1..total {
        let v = vector_of(i, q, dim);
        if normalized(&v) == v {
            label[i] = points.len();
            points.push(v);
        }
    }
    let n = points.len();
    let mut blocks = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut line = vec![i];
            for lambda in f.elements() {
                let w: Vec<Elem> = points[j].iter().zip(&points[i]).map(|(&b, &a)| f.add(b, f.mul(lambda, a))).collect();
                line.push(label[index_of(&normalized(&w), q)]);
            }
            line.sort_unstable();
            if line[0] == i && line[1] == j {
                blocks.push(line);
            }
        }
    }
    blocks.sort();
    let descriptions = points.iter().map(|v| format!("{v:?}")).collect();
    Ok(Design {
        n_points: n,
        tau: 2,
        block_size: q + 1,
        blocks,
        regularity: Some((n - 1) / q),
        descriptions,
    })
}

/// Circles of the inversive (spherical) geometry over `F_{q1^beta}`: images of
/// the subline `F_{q1} ∪ {∞}` under Möbius maps, a `(3, q1+1, q1^beta+1)`
/// Steiner system. Label `q1^beta` is the point at infinity.
pub fn sg_steiner(q1: u64, beta: u32) -> Result<Design, DesignError> {
    if beta < 2 {
        return Err(DesignError::InvalidParameter("beta must be at least 2".into()));
    }
    let (p, m) = prime_power(q1).ok_or_else(|| DesignError::InvalidParameter(format!("{q1} is not a prime power")))?;
    let big_q = checked_points(q1, beta)?;
    let n = big_q + 1;
    if n > 512 {
        return Err(DesignError::InvalidParameter(format!("{n} points exceed the supported size")));
    }
    let f = FiniteField::new(p, m * beta)?;
    let subline = f.subfield(m)?;
    let inf = big_q;
    // Image of u (label, possibly infinity) under the map sending ∞, 0, 1 to z1, z2, z3.
    let image = |z: [usize; 3], u: usize| -> usize {
        let [z1, z2, z3] = z;
        if z1 == inf {
            if u == inf {
                return inf;
            }
            let (z2, z3, u) = (z2 as Elem, z3 as Elem, u as Elem);
            return f.add(z2, f.mul(u, f.sub(z3, z2))) as usize;
        }
        if u == inf {
            return z1;
        }
        let (z1, z2, z3, u) = (z1 as Elem, z2 as Elem, z3 as Elem, u as Elem);
        let a = f.mul(z1, f.sub(z3, z2));
        let b = f.mul(z2, f.sub(z1, z3));
        let c = f.sub(z3, z2);
        let d = f.sub(z1, z3);
        let den = f.add(f.mul(c, u), d);
        if den == 0 {
            inf
        } else {
            f.mul(f.add(f.mul(a, u), b), f.inv_nonzero(den)) as usize
        }
    };
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let mut covered = vec![false; n * n * n];
    let mut blocks = Vec::new();
    for (x, y, z) in (0..n).tuple_combinations() {
        if covered[idx(x, y, z)] {
            continue;
        }
        // Put infinity (the largest label) first.
        let triple = if z == inf { [z, x, y] } else { [x, y, z] };
        let mut block: Vec<usize> = subline
            .iter()
            .map(|&u| image(triple, u as usize))
            .chain(std::iter::once(image(triple, inf)))
            .collect();
        block.sort_unstable();
        block.dedup();
        debug_assert_eq!(block.len(), q1 as usize + 1);
        for (a, b, c) in block.iter().copied().tuple_combinations() {
            covered[idx(a, b, c)] = true;
        }
        blocks.push(block);
    }
    blocks.sort();
    let mut descriptions: Vec<String> = (0..big_q).map(|e| e.to_string()).collect();
    descriptions.push("inf".into());
    let t = q1 as usize + 1;
    Ok(Design {
        n_points: n,
        tau: 3,
        block_size: t,
        blocks,
        regularity: Some((n - 1) * (n - 2) / (t - 1) / (t - 2)),
        descriptions,
    })
}

/// Cyclotomic regular packing on `Z_e × F_{q_1} × .. × F_{q_u}`.
///
/// Blocks are `{(j, α^J β^j + ε) : j ∈ Z_e}` for every exponent vector `J`
/// in `∏ Z_{(q_i-1)/e}` and shift `ε`; `α` is the smallest primitive element
/// of each factor and `β = α^{(q_i-1)/e}`. Point `(j, t)` has label
/// `j * |T| + index(t)`, with `index` the mixed-radix packing of the factor
/// encodings (first factor least significant).
pub fn cyclotomic_packing(prime_powers: &[u64], e: u64) -> Result<Design, DesignError> {
    if prime_powers.is_empty() {
        return Err(DesignError::InvalidParameter("need at least one prime power".into()));
    }
    if e < 2 {
        return Err(DesignError::InvalidParameter("e must exceed 1".into()));
    }
    let mut primes = Vec::new();
    let mut fields = Vec::new();
    for &q in prime_powers {
        let (p, _) = prime_power(q).ok_or_else(|| DesignError::InvalidParameter(format!("{q} is not a prime power")))?;
        if primes.contains(&p) {
            return Err(DesignError::InvalidParameter(format!("prime powers must be coprime; {p} repeats")));
        }
        if (q - 1) % e != 0 {
            return Err(DesignError::InvalidParameter(format!("{e} does not divide {q} - 1")));
        }
        primes.push(p);
        fields.push(FiniteField::of_order(q)?);
    }
    let n2: usize = prime_powers.iter().map(|&q| q as usize).product();
    let e = e as usize;
    let n = e * n2;
    if n > MAX_POINTS {
        return Err(DesignError::InvalidParameter(format!("{n} points exceed the supported size")));
    }
    let radices: Vec<usize> = prime_powers.iter().map(|&q| q as usize).collect();
    let exps: Vec<usize> = prime_powers.iter().map(|&q| (q as usize - 1) / e).collect();
    let split = |mut idx: usize| -> Vec<Elem> {
        radices
            .iter()
            .map(|&r| {
                let c = idx % r;
                idx /= r;
                c as Elem
            })
            .collect()
    };
    let join = |t: &[Elem]| -> usize { t.iter().zip(&radices).rev().fold(0, |acc, (&c, &r)| acc * r + c as usize) };
    let alphas: Vec<Elem> = fields.iter().map(FiniteField::primitive_element).collect();
    let betas: Vec<Elem> = fields.iter().zip(&exps).zip(&alphas).map(|((f, &x), &a)| f.pow(a, x as u64)).collect();
    let n_j: usize = exps.iter().product();
    let mut blocks = Vec::with_capacity(n_j * n2);
    for j_index in 0..n_j {
        let mut rest = j_index;
        let jvec: Vec<u64> = exps
            .iter()
            .map(|&x| {
                let c = rest % x;
                rest /= x;
                c as u64
            })
            .collect();
        for eps_index in 0..n2 {
            let eps = split(eps_index);
            let block: Vec<usize> = (0..e)
                .map(|j| {
                    let t: Vec<Elem> = fields
                        .iter()
                        .enumerate()
                        .map(|(i, f)| {
                            let v = f.mul(f.pow(alphas[i], jvec[i]), f.pow(betas[i], j as u64));
                            f.add(v, eps[i])
                        })
                        .collect();
                    j * n2 + join(&t)
                })
                .collect();
            blocks.push(block);
        }
    }
    let descriptions = (0..n).map(|x| format!("({};{:?})", x / n2, split(x % n2))).collect();
    Ok(Design {
        n_points: n,
        tau: 2,
        block_size: e,
        blocks,
        regularity: Some(n_j),
        descriptions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Regular(usize),
    NonRegular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignReport {
    pub n_points: usize,
    pub tau: usize,
    pub block_size: usize,
    pub blocks: usize,
    pub blocks_well_formed: bool,
    pub is_packing: bool,
    pub is_steiner: bool,
    pub regularity: Regularity,
    pub mode: CheckMode,
}

/// Incidence count above which [`verify_design`] switches to sampling.
pub const EXHAUSTIVE_GUARD: u128 = 1_000_000;
pub const DEFAULT_SAMPLE_SEED: u64 = 0x5eed;
const DEFAULT_SAMPLES: usize = 100_000;

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Checks the packing, Steiner and regularity axioms.
///
/// Exhaustive when the `tau`-subsets of the points (or the block
/// incidences) number at most [`EXHAUSTIVE_GUARD`]; otherwise samples
/// `tau`-subsets with [`DEFAULT_SAMPLE_SEED`].
pub fn verify_design(d: &Design) -> DesignReport {
    let subsets = binomial(d.n_points as u128, d.tau as u128);
    let incidences = d.blocks.len() as u128 * binomial(d.block_size as u128, d.tau as u128);
    if subsets <= EXHAUSTIVE_GUARD || incidences <= EXHAUSTIVE_GUARD {
        verify_design_exhaustive(d)
    } else {
        verify_design_sampled(d, DEFAULT_SAMPLE_SEED, DEFAULT_SAMPLES)
    }
}

fn well_formed(d: &Design) -> bool {
    d.blocks.iter().all(|b| {
        b.len() == d.block_size && b.iter().all(|&p| p < d.n_points) && b.iter().all_unique()
    })
}

fn regularity_of(d: &Design) -> Regularity {
    let rep = d.replication();
    match rep.first() {
        Some(&w) if rep.iter().all(|&x| x == w) => Regularity::Regular(w),
        None => Regularity::Regular(0),
        _ => Regularity::NonRegular,
    }
}

/// Exact check by counting how often each `tau`-subset is covered.
pub fn verify_design_exhaustive(d: &Design) -> DesignReport {
    let ok = well_formed(d);
    let mut cover: HashMap<Vec<usize>, u32> = HashMap::new();
    let mut is_packing = ok;
    for b in &d.blocks {
        let mut sorted = b.clone();
        sorted.sort_unstable();
        sorted.dedup();
        for sub in sorted.into_iter().combinations(d.tau) {
            let c = cover.entry(sub).or_insert(0);
            *c += 1;
            if *c > 1 {
                is_packing = false;
            }
        }
    }
    let is_steiner =
        is_packing && cover.len() as u128 == binomial(d.n_points as u128, d.tau as u128);
    DesignReport {
        n_points: d.n_points,
        tau: d.tau,
        block_size: d.block_size,
        blocks: d.blocks.len(),
        blocks_well_formed: ok,
        is_packing,
        is_steiner,
        regularity: regularity_of(d),
        mode: CheckMode::Exhaustive,
    }
}

/// Seeded check of random `tau`-subsets against a point-to-block index.
pub fn verify_design_sampled(d: &Design, seed: u64, samples: usize) -> DesignReport {
    let ok = well_formed(d);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); d.n_points];
    for (bi, b) in d.blocks.iter().enumerate() {
        for &p in b {
            if p < d.n_points {
                incident[p].push(bi);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<usize> = (0..d.n_points).collect();
    let (mut is_packing, mut is_steiner) = (ok, ok);
    for _ in 0..samples {
        let sub: Vec<usize> = points.choose_multiple(&mut rng, d.tau).copied().collect();
        let hits = incident[sub[0]]
            .iter()
            .filter(|bi| sub[1..].iter().all(|p| incident[*p].binary_search(bi).is_ok()))
            .count();
        if hits > 1 {
            is_packing = false;
        }
        if hits != 1 {
            is_steiner = false;
        }
    }
    DesignReport {
        n_points: d.n_points,
        tau: d.tau,
        block_size: d.block_size,
        blocks: d.blocks.len(),
        blocks_well_formed: ok,
        is_packing,
        is_steiner: is_steiner && is_packing,
        regularity: regularity_of(d),
        mode: CheckMode::Sampled { seed, samples },
    }
}

/// Nested-floor upper bound on the number of blocks of a
/// `(tau+1)-(n1, t, 1)` packing:
/// `⌊n1/t ⌊(n1-1)/(t-1) … ⌊(n1-tau)/(t-tau)⌋…⌋⌋`.
pub fn johnson_bound(n1: u64, t: u64, tau: u64) -> Result<u64, DesignError> {
    if !(n1 >= t && t > tau && tau >= 1) {
        return Err(DesignError::InvalidParameter(format!(
            "need n1 >= t >= tau + 1 >= 2, got n1={n1}, t={t}, tau={tau}"
        )));
    }
    let mut inner: u128 = 1;
    for i in (0..=tau).rev() {
        inner = (n1 - i) as u128 * inner / (t - i) as u128;
    }
    u64::try_from(inner).map_err(|_| DesignError::InvalidParameter("bound overflows u64".into()))
}
