//! Exact arithmetic substrate: big rationals, cyclotomic field elements,
//! Legendre polynomials, rational matrices and the small integer number
//! theory helpers every other module leans on.

mod cyclotomic;
mod legendre;
pub mod matrix;

pub use cyclotomic::{cyclotomic_embed, cyclotomic_polynomial, euler_phi, root_of_unity, CyclotomicValue};
pub use legendre::{legendre_eval, LegendrePoly};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Serializable mirror of a [`Rational`]: numerator and denominator as decimal
/// strings so arbitrarily large values survive a JSON round trip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRational {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for ExactRational {
    fn from(r: &Rational) -> Self {
        ExactRational { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

impl TryFrom<&ExactRational> for Rational {
    type Error = num_bigint::ParseBigIntError;

    fn try_from(e: &ExactRational) -> Result<Self, Self::Error> {
        let num: BigInt = e.num.parse()?;
        let den: BigInt = e.den.parse()?;
        Ok(Rational::new(num, den))
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn p_valuation(x: &Rational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |mut n: BigInt| {
        let mut v = 0i64;
        n = n.abs();
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                return v;
            }
            n = q;
            v += 1;
        }
    };
    Some(count(x.numer().clone()) - count(x.denom().clone()))
}

pub fn to_f64(x: &Rational) -> f64 {
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // Shift both parts down until they fit.
        let bits = x.numer().bits().max(x.denom().bits()) as i64 - 1000;
        let n = (x.numer() >> bits.max(0) as usize).to_f64().unwrap_or(f64::NAN);
        let d = (x.denom() >> bits.max(0) as usize).to_f64().unwrap_or(f64::NAN);
        n / d
    }
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

// ---------------------------------------------------------------------------
// Integer helpers
// ---------------------------------------------------------------------------

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Number of positive divisors, d(n).
pub fn num_divisors(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let cur = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Kronecker symbol (a | p) for p prime; p = 2 uses the mod-8 rule for odd a.
pub fn kronecker_prime(a: i64, p: u64) -> i32 {
    if p == 2 {
        if a % 2 == 0 {
            return 0;
        }
        return match a.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}
