//! Representation numbers: r_A(m) (integral ideals of norm m in class A),
//! the Ψ-twisted sums r_Ψ(m), R(m), theta coefficients and σ_N(m).

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exactmath::{self, cyclotomic_embed, int, rat, CyclotomicValue, Rational};
use crate::quadfield::{splitting_type, ClassCharacter, ClassGroup, SplittingType};

/// Which form is attached to an ideal class when counting representations.
///
/// An element α of an ideal 𝔞 with N(α) = m·N(𝔞) yields the ideal (α)𝔞⁻¹ of
/// norm m in the class [𝔞]⁻¹, so ideals in class A are counted by the form
/// of A⁻¹. `Standard` does exactly that; `Inverse` uses the form of A itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    Standard,
    Inverse,
}

impl Orientation {
    fn counting_form(self, g: &ClassGroup, class: usize) -> usize {
        match self {
            Orientation::Standard => g.inverse(class),
            Orientation::Inverse => class,
        }
    }
}

fn isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let mut s = (n as f64).sqrt() as i64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    Some(s)
}

/// Number of (x, y) ∈ Z² with a x² + b xy + c y² = m.
fn representation_count(a: i64, b: i64, c: i64, m: i64) -> u64 {
    let d = 4 * a * c - b * b;
    let y_max = isqrt(4 * a * m / d).unwrap_or(0);
    let mut n = 0;
    for y in -y_max..=y_max {
        let disc = 4 * a * m - d * y * y;
        let Some(s) = isqrt(disc) else { continue };
        if s * s != disc {
            continue;
        }
        for x_num in if s == 0 { vec![-b * y] } else { vec![-b * y + s, -b * y - s] } {
            if x_num % (2 * a) == 0 {
                n += 1;
            }
        }
    }
    n
}

fn ideal_count_from_reps(g: &ClassGroup, reps: u64) -> u64 {
    let units = 2 * g.u();
    assert_eq!(reps % units, 0, "representation count {reps} not divisible by |O_K^×| = {units}");
    reps / units
}

/// r_A(m) with the default orientation.
pub fn r_class(g: &ClassGroup, class: usize, m: u64) -> Rational {
    r_class_oriented(g, class, m, Orientation::Standard)
}

pub fn r_class_oriented(g: &ClassGroup, class: usize, m: u64, orientation: Orientation) -> Rational {
    if m == 0 {
        return rat(1, 2 * g.u() as i64);
    }
    int(r_class_count(g, class, m, orientation) as i64)
}

/// Integer ideal count behind r_A(m), m ≥ 1.
pub fn r_class_count(g: &ClassGroup, class: usize, m: u64, orientation: Orientation) -> u64 {
    debug_assert!(m >= 1);
    let f = g.form(orientation.counting_form(g, class));
    ideal_count_from_reps(g, representation_count(f.a, f.b, f.c, m as i64))
}

/// r_Ψ(m) = Σ_A Ψ(A) r_A(m); at m = 0 it is h/2u for Ψ = 1_K and 0 otherwise.
pub fn r_psi(g: &ClassGroup, psi: &ClassCharacter, m: u64) -> CyclotomicValue {
    if m == 0 {
        let v = if psi.is_trivial() { rat(g.h() as i64, 2 * g.u() as i64) } else { Rational::zero() };
        return cyclotomic_embed(&v, psi.order());
    }
    weighted_sum(g, m, |a| psi.value(a), psi.order())
}

/// R(m) = Σ_A r_A(m).
pub fn r_total(g: &ClassGroup, m: u64) -> Rational {
    (0..g.h() as usize).map(|a| r_class(g, a, m)).sum()
}

/// a_m(θ_Ψ) = Σ_A conj(Ψ(A)) r_A(m).
pub fn theta_coefficient(g: &ClassGroup, psi: &ClassCharacter, m: u64) -> CyclotomicValue {
    let conj = psi.conj();
    if m == 0 {
        let total: CyclotomicValue = conj.values().into_iter().sum();
        return total.scale(&rat(1, 2 * g.u() as i64));
    }
    weighted_sum(g, m, |a| conj.value(a), psi.order())
}

fn weighted_sum(g: &ClassGroup, m: u64, weight: impl Fn(usize) -> CyclotomicValue, order: u64) -> CyclotomicValue {
    let mut acc = CyclotomicValue::zero(order);
    for a in 0..g.h() as usize {
        let r = r_class(g, a, m);
        if !r.is_zero() {
            acc = &acc + &weight(a).scale(&r);
        }
    }
    acc
}

/// σ_N(m) = Σ_{d | m, (d, N) = 1} d.
pub fn sigma_n(n: u64, m: u64) -> u64 {
    exactmath::divisors(m).into_iter().filter(|d| exactmath::gcd(*d as i64, n as i64) == 1).sum()
}

/// Per-class ideal counts by norm, tabulated once for 0 ≤ m ≤ m_max.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepTable {
    d: u64,
    m_max: u64,
    orientation: Orientation,
    h: u64,
    u: u64,
    counts: Vec<Vec<u64>>,
}

impl RepTable {
    pub fn build(g: &ClassGroup, m_max: u64, orientation: Orientation) -> Self {
        let h = g.h() as usize;
        let d = g.d() as i64;
        let counts = (0..h)
            .map(|class| {
                let f = g.form(orientation.counting_form(g, class));
                let mut reps = vec![0u64; m_max as usize + 1];
                let bound = m_max as i64;
                let y_max = isqrt(4 * f.a * bound / d).unwrap_or(0);
                for y in -y_max..=y_max {
                    let disc = 4 * f.a * bound - d * y * y;
                    let s = isqrt(disc).unwrap_or(-1);
                    if s < 0 {
                        continue;
                    }
                    let lo = (-f.b * y - s).div_euclid(2 * f.a) - 1;
                    let hi = (-f.b * y + s).div_euclid(2 * f.a) + 1;
                    for x in lo..=hi {
                        let v = f.eval(x, y);
                        if (0..=bound).contains(&v) {
                            reps[v as usize] += 1;
                        }
                    }
                }
                reps[0] = 0;
                reps.into_iter().map(|r| ideal_count_from_reps(g, r)).collect()
            })
            .collect();
        RepTable { d: g.d(), m_max, orientation, h: g.h(), u: g.u(), counts }
    }

    pub fn m_max(&self) -> u64 {
        self.m_max
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// r_A(m) as a rational (1/2u at m = 0).
    pub fn r(&self, class: usize, m: u64) -> Rational {
        if m == 0 {
            rat(1, 2 * self.u as i64)
        } else {
            int(self.count(class, m) as i64)
        }
    }

    pub fn count(&self, class: usize, m: u64) -> u64 {
        assert!(m <= self.m_max, "m = {m} beyond tabulated bound {}", self.m_max);
        self.counts[class][m as usize]
    }

    /// R(m).
    pub fn total(&self, m: u64) -> Rational {
        if m == 0 {
            rat(self.h as i64, 2 * self.u as i64)
        } else {
            int((0..self.h as usize).map(|a| self.count(a, m)).sum::<u64>() as i64)
        }
    }

    pub fn r_psi(&self, psi: &ClassCharacter, m: u64) -> CyclotomicValue {
        if m == 0 {
            let v = if psi.is_trivial() { self.total(0) } else { Rational::zero() };
            return cyclotomic_embed(&v, psi.order());
        }
        let mut acc = CyclotomicValue::zero(psi.order());
        for a in 0..self.h as usize {
            let c = self.count(a, m);
            if c != 0 {
                acc = &acc + &psi.value(a).scale(&int(c as i64));
            }
        }
        acc
    }
}

/// Independent r_A(m): enumerates every integral ideal of norm m from the
/// factorization of m (split primes contribute P^i P̄^{e−i}, inert primes
/// only even powers, ramified primes their unique prime) and reads off its
/// class through the group law. Shares nothing with the lattice count.
pub fn r_class_oracle(g: &ClassGroup, class: usize, m: u64) -> Rational {
    if m == 0 {
        return rat(1, 2 * g.u() as i64);
    }
    int(ideal_class_distribution(g, m)[class] as i64)
}

/// Number of ideals of norm m ≥ 1 in each class.
pub fn ideal_class_distribution(g: &ClassGroup, m: u64) -> Vec<u64> {
    let h = g.h() as usize;
    let mut dist = vec![0u64; h];
    dist[g.identity()] = 1;
    for (p, e) in exactmath::factorize(m) {
        let mut local = vec![0u64; h];
        match splitting_type(g.discriminant(), p) {
            SplittingType::Inert => {
                if e % 2 == 1 {
                    return vec![0; h];
                }
                local[g.identity()] = 1;
            }
            SplittingType::Ramified => {
                let c = g.prime_ideal_class(p).expect("ramified prime has a class");
                local[g.power(c, e as u64)] += 1;
            }
            SplittingType::Split => {
                let c = g.prime_ideal_class(p).expect("split prime has a class");
                let cbar = g.inverse(c);
                for i in 0..=e as u64 {
                    local[g.op(g.power(c, i), g.power(cbar, e as u64 - i))] += 1;
                }
            }
        }
        let mut next = vec![0u64; h];
        for (a, &x) in dist.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (b, &y) in local.iter().enumerate() {
                next[g.op(a, b)] += x * y;
            }
        }
        dist = next;
    }
    dist
}
