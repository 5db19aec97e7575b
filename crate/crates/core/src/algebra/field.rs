//! Prime-power finite fields with a fixed integer encoding.
//!
//! An element of `F_{p^m}` is stored as the integer `sum c_i * p^i`, where
//! `(c_0, .., c_{m-1})` are its coordinates in the monomial basis modulo the
//! field's defining polynomial. For prime fields this is the usual residue.

use std::fmt;
use std::sync::Arc;

use super::AlgebraError;

/// Encoded field element, always in `[0, q)`.
pub type Elem = u32;

/// Largest field order handled by the table-driven arithmetic.
pub const MAX_ORDER: u64 = 1 << 20;

#[derive(Debug)]
struct FieldData {
    p: u32,
    m: u32,
    q: u32,
    /// Monic defining polynomial, `m + 1` coefficients, low degree first.
    modulus: Vec<u32>,
    primitive: Elem,
    /// `exp[i] = g^i` for `i in 0..2(q-1)`, so products never need a reduction.
    exp: Vec<Elem>,
    log: Vec<u32>,
}

/// Arithmetic context for `F_{p^m}`. Cheap to clone.
#[derive(Clone)]
pub struct FiniteField {
    inner: Arc<FieldData>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.m == other.inner.m
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.m == 1 {
            write!(f, "F_{}", self.inner.p)
        } else {
            write!(f, "F_{}^{} mod {:?}", self.inner.p, self.inner.m, self.inner.modulus)
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^m` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p as u32, m))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p on plain coefficient vectors, used only while
// the field tables do not exist yet.
fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn prime_poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_pow(b[db] as u64, p as u64 - 2, p as u64) as u32;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &bi) in b.iter().enumerate() {
            let t = (c as u64 * bi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        trim(&mut r);
    }
    r
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn digits_of(mut x: u64, p: u32, len: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push((x % p as u64) as u32);
        x /= p as u64;
    }
    v
}

/// True iff the monic `poly` (low degree first) of degree `deg` has no monic
/// factor of degree `1..=deg/2` over `F_p`.
fn irreducible_over_prime(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = digits_of(low, p, d);
            divisor.push(1);
            if prime_poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `m` over `F_p`,
/// ordered by the integer encoding of its lower coefficients.
fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    if m == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(m);
    for low in 0..count {
        let mut poly = digits_of(low, p, m as usize);
        poly.push(1);
        if poly[0] != 0 && irreducible_over_prime(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FiniteField {
    /// `F_{p^m}` defined by the smallest monic irreducible of degree `m`.
    pub fn new(p: u32, m: u32) -> Result<Self, AlgebraError> {
        if !is_prime(p as u64) {
            return Err(AlgebraError::NotPrime(p as u64));
        }
        if m == 0 {
            return Err(AlgebraError::InvalidParameter("extension degree must be >= 1".into()));
        }
        Self::check_order(p, m)?;
        let modulus = smallest_irreducible(p, m);
        Self::build(p, m, modulus)
    }

    /// Prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self, AlgebraError> {
        Self::new(p, 1)
    }

    /// The field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Self, AlgebraError> {
        let (p, m) = prime_power(q).ok_or(AlgebraError::NotPrimePower(q))?;
        Self::new(p, m)
    }

    /// `F_{p^m}` with an explicit monic modulus (low degree first).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self, AlgebraError> {
        if !is_prime(p as u64) {
            return Err(AlgebraError::NotPrime(p as u64));
        }
        if modulus.len() < 2 || modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(AlgebraError::InvalidParameter(format!(
                "modulus {modulus:?} is not a monic polynomial over F_{p}"
            )));
        }
        let m = (modulus.len() - 1) as u32;
        Self::check_order(p, m)?;
        if m > 1 && (modulus[0] == 0 || !irreducible_over_prime(&modulus, p)) {
            return Err(AlgebraError::Reducible(modulus));
        }
        if m == 1 {
            return Self::build(p, 1, vec![0, 1]);
        }
        Self::build(p, m, modulus)
    }

    fn check_order(p: u32, m: u32) -> Result<(), AlgebraError> {
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(AlgebraError::FieldTooLarge(q));
        }
        Ok(())
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>) -> Result<Self, AlgebraError> {
        let q = p.pow(m);
        let slow_mul = |a: u32, b: u32| -> u32 {
            let da = digits_of(a as u64, p, m as usize);
            let db = digits_of(b as u64, p, m as usize);
            let mut prod = vec![0u32; 2 * m as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                }
            }
            let r = if m == 1 {
                prod.truncate(1);
                prod
            } else {
                prime_poly_rem(&prod, &modulus, p)
            };
            r.iter().rev().fold(0u32, |acc, &c| acc * p + c)
        };
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let pow = |g: u32, mut e: u64| -> u32 {
            let mut acc = 1u32;
            let mut base = g;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                e >>= 1;
            }
            acc
        };
        let primitive = if q == 2 {
            1
        } else {
            (2..q)
                .find(|&g| factors.iter().all(|&f| pow(g, order / f) != 1))
                .expect("multiplicative group is cyclic")
        };
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp[i] = x;
            exp[i + n] = x;
            log[x as usize] = i as u32;
            x = slow_mul(x, primitive);
        }
        Ok(Self {
            inner: Arc::new(FieldData { p, m, q, modulus, primitive, exp, log }),
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.m
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// Smallest primitive element in the canonical encoding.
    pub fn primitive_element(&self) -> Elem {
        self.inner.primitive
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.inner.q
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.inner.q
    }

    pub fn to_digits(&self, a: Elem) -> Vec<u32> {
        digits_of(a as u64, self.inner.p, self.inner.m as usize)
    }

    pub fn from_digits(&self, digits: &[u32]) -> Elem {
        digits.iter().rev().fold(0u32, |acc, &c| acc * self.inner.p + c % self.inner.p)
    }

    /// Image of the integer `n` under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.inner.p as i64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let d = &*self.inner;
        if d.m == 1 {
            let s = a + b;
            if s >= d.p {
                s - d.p
            } else {
                s
            }
        } else if d.p == 2 {
            a ^ b
        } else {
            let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
            for _ in 0..d.m {
                out += ((a % d.p + b % d.p) % d.p) * place;
                a /= d.p;
                b /= d.p;
                place *= d.p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let d = &*self.inner;
        if d.m == 1 {
            if a == 0 {
                0
            } else {
                d.p - a
            }
        } else if d.p == 2 {
            a
        } else {
            let (mut a, mut out, mut place) = (a, 0, 1);
            for _ in 0..d.m {
                out += ((d.p - a % d.p) % d.p) * place;
                a /= d.p;
                place *= d.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let d = &*self.inner;
        d.exp[(d.log[a as usize] + d.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, AlgebraError> {
        if a == 0 {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.inv_nonzero(a))
    }

    /// Inverse of an element known to be nonzero.
    #[inline]
    pub(crate) fn inv_nonzero(&self, a: Elem) -> Elem {
        debug_assert!(a != 0);
        let d = &*self.inner;
        let n = d.q - 1;
        d.exp[((n - d.log[a as usize]) % n) as usize]
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, AlgebraError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let d = &*self.inner;
        let n = (d.q - 1) as u64;
        d.exp[((d.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Discrete logarithm to the primitive base; `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a != 0).then(|| self.inner.log[a as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Elem) -> Option<u64> {
        let l = self.log(a)? as u64;
        let n = (self.inner.q - 1) as u64;
        Some(n / num_integer::gcd(n, l))
    }

    /// Elements of the unique subfield of order `p^d`; `d` must divide `m`.
    pub fn subfield(&self, d: u32) -> Result<Vec<Elem>, AlgebraError> {
        if d == 0 || !self.inner.m.is_multiple_of(d) {
            return Err(AlgebraError::InvalidParameter(format!(
                "F_{}^{} has no subfield of degree {d}",
                self.inner.p, self.inner.m
            )));
        }
        let sub_q = (self.inner.p as u64).pow(d);
        Ok(self.elements().filter(|&a| self.pow(a, sub_q) == a).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_field_inverse() {
        let f = FiniteField::prime(11).unwrap();
        assert_eq!(f.inv(7).unwrap(), 8);
        assert_eq!(f.inv(0), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn f4_multiplication() {
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.add(3, 0), 3);
    }

    #[test]
    fn conventional_moduli_are_smallest() {
        assert_eq!(FiniteField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FiniteField::new(2, 4).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(FiniteField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FiniteField::new(2, 8).unwrap().modulus(), &[1, 1, 0, 1, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FiniteField::prime(12).unwrap_err(), AlgebraError::NotPrime(12));
        assert_eq!(FiniteField::of_order(6).unwrap_err(), AlgebraError::NotPrimePower(6));
        assert!(matches!(
            FiniteField::with_modulus(2, vec![1, 0, 1]),
            Err(AlgebraError::Reducible(_))
        ));
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn subfield_of_f64() {
        let f = FiniteField::new(2, 6).unwrap();
        assert_eq!(f.subfield(2).unwrap().len(), 4);
        assert_eq!(f.subfield(3).unwrap().len(), 8);
        assert!(f.subfield(4).is_err());
    }

    fn fields() -> impl Strategy<Value = FiniteField> {
        prop::sample::select(vec![(2u32, 1u32), (2, 3), (3, 2), (5, 2), (11, 1), (13, 1), (2, 4), (7, 1)])
            .prop_map(|(p, m)| FiniteField::new(p, m).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms(f in fields(), a in 0u32..1000, b in 0u32..1000, c in 0u32..1000) {
            let q = f.order();
            let (a, b, c) = (a % q, b % q, c % q);
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.add(a, 0), a);
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.pow(a, q as u64), a);
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }
}
