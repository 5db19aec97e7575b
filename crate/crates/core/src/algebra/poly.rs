//! Dense univariate polynomials over a [`FiniteField`].

use super::{AlgebraError, Elem, FiniteField};

/// Coefficients low degree first. The leading coefficient is nonzero; the
/// zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    pub fn constant(c: Elem) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `x - a`.
    pub fn linear(f: &FiniteField, a: Elem) -> Self {
        Self { coeffs: vec![f.neg(a), 1] }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, f: &FiniteField, x: Elem) -> Elem {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn add(&self, other: &Poly, f: &FiniteField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, f: &FiniteField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, c: Elem, f: &FiniteField) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &FiniteField) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, divisor: &Poly, f: &FiniteField) -> Result<(Poly, Poly), AlgebraError> {
        let dd = divisor.degree().ok_or(AlgebraError::DivisionByZero)?;
        let lead_inv = f.inv_nonzero(divisor.leading());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![0; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(rem[k + dd], lead_inv);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = f.sub(rem[k + j], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Poly, f: &FiniteField) -> Result<Poly, AlgebraError> {
        Ok(self.div_rem(divisor, f)?.1)
    }

    pub fn monic(&self, f: &FiniteField) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv_nonzero(self.leading()), f)
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly, f: &FiniteField) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn derivative(&self, f: &FiniteField) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
                .collect(),
        )
    }

    /// The monic polynomial `prod (x - theta)` over `roots`.
    pub fn from_roots(f: &FiniteField, roots: &[Elem]) -> Poly {
        let mut coeffs = vec![1];
        for &r in roots {
            // multiply in place by (x - r)
            let nr = f.neg(r);
            coeffs.push(0);
            for i in (0..coeffs.len()).rev() {
                let shifted = if i > 0 { coeffs[i - 1] } else { 0 };
                coeffs[i] = f.add(shifted, f.mul(coeffs[i], nr));
            }
        }
        Poly::from_coeffs(coeffs)
    }

    /// The unique polynomial of degree `< points.len()` through `points`
    /// (Newton divided differences).
    pub fn interpolate(f: &FiniteField, points: &[(Elem, Elem)]) -> Result<Poly, AlgebraError> {
        if points.is_empty() {
            return Err(AlgebraError::InvalidParameter("interpolation needs at least one point".into()));
        }
        for (i, a) in points.iter().enumerate() {
            if points[..i].iter().any(|b| b.0 == a.0) {
                return Err(AlgebraError::DuplicateNode(a.0));
            }
        }
        let n = points.len();
        let xs: Vec<Elem> = points.iter().map(|p| p.0).collect();
        let mut dd: Vec<Elem> = points.iter().map(|p| p.1).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                let num = f.sub(dd[i], dd[i - 1]);
                let den = f.sub(xs[i], xs[i - level]);
                dd[i] = f.mul(num, f.inv_nonzero(den));
            }
        }
        // Horner on the Newton form.
        let mut acc = Poly::constant(dd[n - 1]);
        for i in (0..n - 1).rev() {
            acc = acc.mul(&Poly::linear(f, xs[i]), f).add(&Poly::constant(dd[i]), f);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f11() -> FiniteField {
        FiniteField::prime(11).unwrap()
    }

    #[test]
    fn line_through_two_points() {
        let f = f11();
        let p = Poly::interpolate(&f, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p.coeffs(), &[1, 1]);
    }

    #[test]
    fn constant_data_gives_constant() {
        let f = f11();
        let p = Poly::interpolate(&f, &[(3, 4), (6, 4), (5, 4)]).unwrap();
        assert_eq!(p, Poly::constant(4));
    }

    #[test]
    fn squares_over_f13() {
        let f = FiniteField::prime(13).unwrap();
        let p = Poly::interpolate(&f, &[(1, 1), (2, 4), (3, 9)]).unwrap();
        assert_eq!(p.coeffs(), &[0, 0, 1]);
        for x in 0..13 {
            assert_eq!(p.eval(&f, x), x * x % 13);
        }
    }

    #[test]
    fn duplicate_node_rejected() {
        let f = f11();
        assert_eq!(Poly::interpolate(&f, &[(2, 1), (2, 5)]), Err(AlgebraError::DuplicateNode(2)));
    }

    #[test]
    fn roots_products() {
        let f = f11();
        assert_eq!(Poly::from_roots(&f, &[]), Poly::one());
        assert_eq!(Poly::from_roots(&f, &[1, 2]).coeffs(), &[2, 8, 1]);
        let f7 = FiniteField::prime(7).unwrap();
        assert_eq!(Poly::from_roots(&f7, &[0]).coeffs(), &[0, 1]);
    }

    #[test]
    fn division_identity() {
        let f = f11();
        let a = Poly::from_coeffs(vec![3, 0, 7, 1, 9]);
        let b = Poly::from_coeffs(vec![2, 5, 1]);
        let (q, r) = a.div_rem(&b, &f).unwrap();
        assert_eq!(q.mul(&b, &f).add(&r, &f), a);
        assert!(r.degree() < b.degree());
        assert_eq!(a.div_rem(&Poly::zero(), &f), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn gcd_of_products() {
        let f = f11();
        let a = Poly::from_roots(&f, &[1, 2, 3]);
        let b = Poly::from_roots(&f, &[2, 3, 7]);
        assert_eq!(a.gcd(&b, &f), Poly::from_roots(&f, &[2, 3]));
    }

    proptest! {
        #[test]
        fn interpolation_round_trip(coeffs in prop::collection::vec(0u32..13, 1..8), shift in 0u32..5) {
            let f = FiniteField::prime(13).unwrap();
            let p = Poly::from_coeffs(coeffs.clone());
            let n = coeffs.len();
            let pts: Vec<(Elem, Elem)> = (0..n as u32).map(|i| {
                let x = (i + shift) % 13;
                (x, p.eval(&f, x))
            }).collect();
            let back = Poly::interpolate(&f, &pts).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn disjoint_root_sets_multiply(mask in 0u32..(1 << 11), other in 0u32..(1 << 11)) {
            let f = FiniteField::prime(11).unwrap();
            let a: Vec<Elem> = (0..11).filter(|i| mask >> i & 1 == 1).collect();
            let b: Vec<Elem> = (0..11).filter(|i| other >> i & 1 == 1 && mask >> i & 1 == 0).collect();
            let mut ab = a.clone();
            ab.extend(&b);
            let lhs = Poly::from_roots(&f, &a).mul(&Poly::from_roots(&f, &b), &f);
            prop_assert_eq!(lhs, Poly::from_roots(&f, &ab));
        }
    }
}
