use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;

pub fn euler_phi(n: u64) -> u64 {
    super::factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

fn poly_exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    // Both lowest-degree first; den monic.
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i + j] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Integer coefficients of the e-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(e: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&e) {
        return p.clone();
    }
    let mut poly = vec![0i64; e as usize + 1];
    poly[0] = -1;
    poly[e as usize] = 1;
    for d in super::divisors(e) {
        if d < e {
            poly = poly_exact_div(&poly, &cyclotomic_polynomial(d));
        }
    }
    let poly = Arc::new(poly);
    cache.lock().unwrap().insert(e, poly.clone());
    poly
}

/// An element of Q(ζ_e), stored as its coefficient vector in the power basis
/// 1, ζ, …, ζ^{φ(e)−1}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicValue {
    order: u64,
    coeffs: Vec<Rational>,
}

impl CyclotomicValue {
    /// Reduce an arbitrary polynomial in ζ_e modulo Φ_e.
    pub fn from_poly(order: u64, mut poly: Vec<Rational>) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        for i in (deg..poly.len()).rev() {
            let c = std::mem::replace(&mut poly[i], Rational::zero());
            if c.is_zero() {
                continue;
            }
            for (j, &pc) in phi.iter().enumerate().take(deg) {
                if pc != 0 {
                    poly[i - deg + j] -= &c * Rational::from_integer(BigInt::from(pc));
                }
            }
        }
        poly.resize(deg, Rational::zero());
        CyclotomicValue { order, coeffs: poly }
    }

    pub fn zero(order: u64) -> Self {
        cyclotomic_embed(&Rational::zero(), order)
    }

    pub fn one(order: u64) -> Self {
        cyclotomic_embed(&Rational::one(), order)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational, when it lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let e = self.order as usize;
        let mut poly = vec![Rational::zero(); e.max(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[(e - i % e) % e] += c;
        }
        Self::from_poly(self.order, poly)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CyclotomicValue { order: self.order, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = Self::one(self.order);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Value under the embedding ζ_e ↦ exp(2πi/e).
    pub fn to_complex(&self) -> (f64, f64) {
        let e = self.order as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, c)| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / e;
            let c = super::to_f64(c);
            (re + c * t.cos(), im + c * t.sin())
        })
    }

    pub fn abs(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }

    fn lift(&self, order: u64) -> Self {
        if self.order == order {
            return self.clone();
        }
        let r = self
            .as_rational()
            .unwrap_or_else(|| panic!("cannot combine Q(ζ_{}) with Q(ζ_{})", self.order, order));
        cyclotomic_embed(&r, order)
    }

    fn common_order(a: &Self, b: &Self) -> u64 {
        if a.order == b.order || a.as_rational().is_none() {
            a.order
        } else {
            b.order
        }
    }
}

impl fmt::Debug for CyclotomicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CyclotomicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·ζ{}", self.order)?,
                _ => write!(f, "({c})·ζ{}^{i}", self.order)?,
            }
        }
        Ok(())
    }
}

/// Constant embedding of a rational into Q(ζ_e).
pub fn cyclotomic_embed(r: &Rational, order: u64) -> CyclotomicValue {
    assert!(order >= 1, "cyclotomic order must be positive");
    let deg = euler_phi(order) as usize;
    let mut coeffs = vec![Rational::zero(); deg];
    coeffs[0] = r.clone();
    CyclotomicValue { order, coeffs }
}

/// ζ_e^j.
pub fn root_of_unity(order: u64, power: u64) -> CyclotomicValue {
    assert!(order >= 1, "cyclotomic order must be positive");
    let j = (power % order) as usize;
    let mut poly = vec![Rational::zero(); j + 1];
    poly[j] = Rational::one();
    CyclotomicValue::from_poly(order, poly)
}

impl Add for &CyclotomicValue {
    type Output = CyclotomicValue;
    fn add(self, rhs: &CyclotomicValue) -> CyclotomicValue {
        let e = CyclotomicValue::common_order(self, rhs);
        let (a, b) = (self.lift(e), rhs.lift(e));
        CyclotomicValue { order: e, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }
}

impl Sub for &CyclotomicValue {
    type Output = CyclotomicValue;
    fn sub(self, rhs: &CyclotomicValue) -> CyclotomicValue {
        self + &(-rhs)
    }
}

impl Neg for &CyclotomicValue {
    type Output = CyclotomicValue;
    fn neg(self) -> CyclotomicValue {
        CyclotomicValue { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &CyclotomicValue {
    type Output = CyclotomicValue;
    fn mul(self, rhs: &CyclotomicValue) -> CyclotomicValue {
        let e = CyclotomicValue::common_order(self, rhs);
        let (a, b) = (self.lift(e), rhs.lift(e));
        let mut poly = vec![Rational::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                poly[i + j] += x * y;
            }
        }
        CyclotomicValue::from_poly(e, poly)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CyclotomicValue {
            type Output = CyclotomicValue;
            fn $m(self, rhs: CyclotomicValue) -> CyclotomicValue {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CyclotomicValue {
    type Output = CyclotomicValue;
    fn neg(self) -> CyclotomicValue {
        -&self
    }
}

impl std::iter::Sum for CyclotomicValue {
    fn sum<I: Iterator<Item = CyclotomicValue>>(iter: I) -> Self {
        iter.fold(CyclotomicValue::zero(1), |acc, x| &acc + &x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(105)[7], -2);
    }

    #[test]
    fn embed_examples() {
        let v = cyclotomic_embed(&rat(3, 2), 1);
        assert_eq!(v.as_rational(), Some(rat(3, 2)));
        assert!(cyclotomic_embed(&int(0), 5).is_zero());
        assert_eq!(cyclotomic_embed(&int(1), 3), CyclotomicValue::one(3));
        assert_eq!(cyclotomic_embed(&int(1), 3).coefficients().len(), 2);
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(root_of_unity(2, 1).as_rational(), Some(int(-1)));
        assert_eq!(root_of_unity(3, 1).pow(3), CyclotomicValue::one(3));
        let s: CyclotomicValue = (0..3).map(|j| root_of_unity(3, j)).sum();
        assert!(s.is_zero());
        for e in 2..13 {
            let s: CyclotomicValue = (0..e).map(|j| root_of_unity(e, j)).sum();
            assert!(s.is_zero(), "e={e}");
            assert_eq!(root_of_unity(e, 1).pow(e), CyclotomicValue::one(e));
        }
    }

    #[test]
    fn conjugation_inverts_roots() {
        for e in 1..10 {
            for j in 0..e {
                let z = root_of_unity(e, j);
                assert_eq!(&z * &z.conj(), CyclotomicValue::one(e));
                assert_eq!(z.conj(), root_of_unity(e, e - j));
            }
        }
    }

    #[test]
    fn complex_embedding() {
        let (re, im) = root_of_unity(4, 1).to_complex();
        assert!(re.abs() < 1e-12 && (im - 1.0).abs() < 1e-12);
    }

    fn arb_value(e: u64) -> impl Strategy<Value = CyclotomicValue> {
        let n = euler_phi(e) as usize;
        proptest::collection::vec((-20i64..20, 1i64..6), n)
            .prop_map(move |cs| CyclotomicValue::from_poly(e, cs.into_iter().map(|(a, b)| rat(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn ring_axioms(
            (a, b, c) in prop::sample::select(vec![1u64, 2, 3, 4, 5, 6, 8, 12])
                .prop_flat_map(|e| (arb_value(e), arb_value(e), arb_value(e))),
            k in -50i64..50,
        ) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            let r = cyclotomic_embed(&rat(k, 7), a.order());
            prop_assert_eq!(r.conj(), r);
        }
    }
}
