//! Fourier coefficients of the averaging kernel G_A, the weight-2 Eisenstein
//! series of prime level, and the cuspidal projection G^cusp_A.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{self, int, legendre_eval, rat, Rational};
use crate::quadfield::{splitting_type, ClassGroup, SplittingType};
use crate::repnum::{self, Orientation, RepTable};

/// Default ceiling for the auxiliary prime search.
pub const AUX_SEARCH_BOUND: u64 = 1_000_000;

/// Checks that N is a prime, coprime to D and inert in K.
pub fn check_level(g: &ClassGroup, n: u64) -> Result<()> {
    if !exactmath::is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    if g.d() % n == 0 {
        return Err(Error::InvalidParameters(format!("N = {n} divides D = {}", g.d())));
    }
    if splitting_type(g.discriminant(), n) != SplittingType::Inert {
        return Err(Error::InvalidParameters(format!("N = {n} is not inert in Q(sqrt(-{}))", g.d())));
    }
    Ok(())
}

/// E(z) = (N−1)/24 + Σ σ_N(m) q^m, the Eisenstein series of weight 2 on Γ0(N).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisensteinSeries {
    n: u64,
}

impl EisensteinSeries {
    pub fn new(n: u64) -> Result<Self> {
        if !exactmath::is_prime(n) {
            return Err(Error::NotPrime(n));
        }
        Ok(EisensteinSeries { n })
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn a0(&self) -> Rational {
        rat(self.n as i64 - 1, 24)
    }

    pub fn coeff(&self, m: u64) -> Rational {
        if m == 0 {
            self.a0()
        } else {
            int(repnum::sigma_n(self.n, m) as i64)
        }
    }
}

/// a_m(E) for the level-N Eisenstein series.
pub fn eisenstein_coeff(n: u64, m: u64) -> Rational {
    EisensteinSeries { n }.coeff(m)
}

/// A split prime q ≡ −N (mod D) together with the class of a prime above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AuxiliaryPrime {
    pub q: u64,
    pub q_class: usize,
}

fn admissible(g: &ClassGroup, n: u64, m_max: u64, q: u64) -> bool {
    let d = g.d();
    q % d == (d - n % d) % d && q > m_max && q != 2 && q != n && d % q != 0 && exactmath::is_prime(q)
}

/// The smallest admissible auxiliary prime for (D, N) and every m ≤ m_max.
pub fn auxiliary_prime(g: &ClassGroup, n: u64, m_max: u64) -> Result<AuxiliaryPrime> {
    auxiliary_primes(g, n, m_max, 1, AUX_SEARCH_BOUND).map(|v| v[0])
}

/// The `count` smallest admissible auxiliary primes below `bound`.
pub fn auxiliary_primes(g: &ClassGroup, n: u64, m_max: u64, count: usize, bound: u64) -> Result<Vec<AuxiliaryPrime>> {
    check_level(g, n)?;
    let d = g.d();
    let start = (d - n % d) % d;
    let mut out = Vec::with_capacity(count);
    let mut q = start;
    while out.len() < count {
        if q > bound {
            return Err(Error::SearchExhausted(bound));
        }
        if admissible(g, n, m_max, q) {
            let q_class = g.prime_ideal_class(q).expect("q ≡ −N mod D is split");
            out.push(AuxiliaryPrime { q, q_class });
        }
        q += d;
    }
    Ok(out)
}

fn check_aux(g: &ClassGroup, n: u64, m: u64, aux: &AuxiliaryPrime) -> Result<()> {
    if !admissible(g, n, m, aux.q) {
        return Err(Error::InconsistentAuxiliary(format!("q = {} for D = {}, N = {n}, m = {m}", aux.q, g.d())));
    }
    let c = g.prime_ideal_class(aux.q).expect("admissible q is split");
    if aux.q_class != c && aux.q_class != g.inverse(c) {
        return Err(Error::InconsistentAuxiliary(format!("class {} does not lie above q = {}", aux.q_class, aux.q)));
    }
    Ok(())
}

/// Number of ideals I of norm n ≥ 1 with base·[I] ∈ Pic².
pub fn r_braced(g: &ClassGroup, base: usize, n: u64) -> u64 {
    let squares = g.square_classes();
    (0..g.h() as usize)
        .filter(|&c| squares.contains(&g.op(base, c)))
        .map(|c| repnum::r_class_count(g, c, n, Orientation::Standard))
        .sum()
}

/// Source of r_A(m) values: direct enumeration or a precomputed table.
enum Counts<'a> {
    Direct(Orientation),
    Table(&'a RepTable),
}

impl Counts<'_> {
    fn r(&self, g: &ClassGroup, a: usize, m: u64) -> Rational {
        match self {
            Counts::Direct(o) => repnum::r_class_oriented(g, a, m, *o),
            Counts::Table(t) => t.r(a, m),
        }
    }

    fn braced(&self, g: &ClassGroup, base: usize, n: u64) -> u64 {
        let squares = g.square_classes();
        (0..g.h() as usize)
            .filter(|&c| squares.contains(&g.op(base, c)))
            .map(|c| match self {
                Counts::Direct(o) => repnum::r_class_count(g, c, n, *o),
                Counts::Table(t) => t.count(c, n),
            })
            .sum()
    }
}

fn phi_sum(g: &ClassGroup, n_level: u64, k: u32, a: usize, m: u64, aux: &AuxiliaryPrime, counts: &Counts) -> Rational {
    let d = g.d();
    let md = m * d;
    let shifted = g.op(aux.q_class, a);
    let mut total = Rational::zero();
    for n in 1..=md / n_level {
        let r = counts.r(g, a, md - n * n_level);
        if r.is_zero() {
            continue;
        }
        let rb = counts.braced(g, shifted, n);
        if rb == 0 {
            continue;
        }
        let delta = exactmath::num_divisors(exactmath::gcd(n as i64, d as i64) as u64);
        let x = Rational::from_integer(1.into()) - rat(2 * (n * n_level) as i64, md as i64);
        total += r * int((delta * rb) as i64) * legendre_eval(k as usize - 1, &x);
    }
    total
}

/// The n-sum Σ_{1 ≤ n ≤ mD/N} d((n,D))·r_A(mD − nN)·R_{Q·A}(n)·P_{k−1}(1 − 2nN/(mD))
/// for a single class, without the m^{k−1} factor.
pub fn phi_class_sum(g: &ClassGroup, n_level: u64, k: u32, a: usize, m: u64, aux: &AuxiliaryPrime) -> Result<Rational> {
    validate(g, n_level, k, m, aux)?;
    Ok(phi_sum(g, n_level, k, a, m, aux, &Counts::Direct(Orientation::Standard)))
}

fn validate(g: &ClassGroup, n_level: u64, k: u32, m: u64, aux: &AuxiliaryPrime) -> Result<()> {
    check_level(g, n_level)?;
    if k < 1 {
        return Err(Error::InvalidParameters("weight k must be at least 1".into()));
    }
    check_aux(g, n_level, m, aux)
}

fn b_with(g: &ClassGroup, n_level: u64, k: u32, a: usize, m: u64, aux: &AuxiliaryPrime, counts: &Counts) -> Rational {
    let (h, u) = (g.h() as i64, g.u() as i64);
    if m == 0 {
        return rat(h, 2 * u * u);
    }
    let weight = Rational::from_integer(num_bigint::BigInt::from(m).pow(k - 1));
    let main = rat(h, u) * counts.r(g, a, g.d() * m);
    weight * (main + phi_sum(g, n_level, k, a, m, aux, counts))
}

/// b_{m,A}, the m-th coefficient of the kernel G_A.
pub fn b_coeff(g: &ClassGroup, n_level: u64, k: u32, a: usize, m: u64, aux: &AuxiliaryPrime) -> Result<Rational> {
    validate(g, n_level, k, m, aux)?;
    Ok(b_with(g, n_level, k, a, m, aux, &Counts::Direct(Orientation::Standard)))
}

fn cusp_correction(g: &ClassGroup, n_level: u64, k: u32, m: u64) -> Rational {
    if k != 1 {
        return Rational::zero();
    }
    let e = EisensteinSeries { n: n_level };
    rat(g.h() as i64, 2 * (g.u() * g.u()) as i64) / e.a0() * e.coeff(m)
}

/// a_m(G^cusp_A) = b_{m,A} − [k=1]·(b_{0,A}/a_0(E))·a_m(E).
pub fn g_cusp_coeff(g: &ClassGroup, n_level: u64, k: u32, a: usize, m: u64, aux: &AuxiliaryPrime) -> Result<Rational> {
    Ok(b_coeff(g, n_level, k, a, m, aux)? - cusp_correction(g, n_level, k, m))
}

/// Tabulated b_{m,A} for 0 ≤ m ≤ m_max and every class A.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSeries {
    pub d: u64,
    pub n: u64,
    pub k: u32,
    pub m_max: u64,
    pub orientation: Orientation,
    pub aux: AuxiliaryPrime,
    coeffs: Vec<Vec<Rational>>,
}

impl KernelSeries {
    pub fn build(g: &ClassGroup, n_level: u64, k: u32, m_max: u64, orientation: Orientation) -> Result<Self> {
        let aux = auxiliary_prime(g, n_level, m_max)?;
        validate(g, n_level, k, m_max, &aux)?;
        let table = RepTable::build(g, m_max * g.d(), orientation);
        let counts = Counts::Table(&table);
        let coeffs = (0..g.h() as usize)
            .map(|a| (0..=m_max).map(|m| b_with(g, n_level, k, a, m, &aux, &counts)).collect())
            .collect();
        Ok(KernelSeries { d: g.d(), n: n_level, k, m_max, orientation, aux, coeffs })
    }

    pub fn b(&self, class: usize, m: u64) -> &Rational {
        &self.coeffs[class][m as usize]
    }

    pub fn g_cusp(&self, g: &ClassGroup, class: usize, m: u64) -> Rational {
        self.b(class, m) - cusp_correction(g, self.n, self.k, m)
    }

    pub fn classes(&self) -> usize {
        self.coeffs.len()
    }
}
