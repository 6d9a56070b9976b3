//! Exact weighted averages of central L-values: the three-term identity,
//! its stable-range collapse, the genus-zero class-number identities and a
//! floating-point subconvexity report.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{self, cyclotomic_embed, int, rat, CyclotomicValue, Rational};
use crate::kernel::{self, AuxiliaryPrime};
use crate::quadfield::{ClassCharacter, ClassGroup};
use crate::repnum;

/// The three terms of the average, kept apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breakdown {
    /// −δ·12h²σ_N(m)/(N−1), nonzero only for (k, Ψ) = (1, 1_K).
    pub eisenstein: Rational,
    /// u·m^{k−1}·r_Ψ(m)·h.
    pub main: CyclotomicValue,
    /// u²·m^{k−1}·Σ_n Φ_k(n, Ψ, N).
    pub phi: CyclotomicValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverageValue {
    pub d: u64,
    pub n: u64,
    pub k: u32,
    pub m: u64,
    pub character: ClassCharacter,
    pub value: CyclotomicValue,
    pub stable: bool,
    pub breakdown: Breakdown,
    /// Odd weight k ≥ 3 lies outside the range where the identity is proved.
    pub outside_hypotheses: bool,
}

fn check(g: &ClassGroup, n: u64, k: u32, m: u64) -> Result<()> {
    kernel::check_level(g, n)?;
    if m < 1 {
        return Err(Error::InvalidParameters("m must be at least 1".into()));
    }
    if k < 1 {
        return Err(Error::InvalidParameters("weight k must be at least 1".into()));
    }
    Ok(())
}

fn m_power(m: u64, k: u32) -> Rational {
    Rational::from_integer(BigInt::from(m).pow(k - 1))
}

fn eisenstein_term(g: &ClassGroup, n: u64, k: u32, psi: &ClassCharacter, m: u64) -> Rational {
    if k == 1 && psi.is_trivial() {
        let h = g.h() as i64;
        -rat(12 * h * h * repnum::sigma_n(n, m) as i64, n as i64 - 1)
    } else {
        Rational::zero()
    }
}

fn main_term(g: &ClassGroup, k: u32, psi: &ClassCharacter, m: u64) -> CyclotomicValue {
    repnum::r_psi(g, psi, m).scale(&(int((g.u() * g.h()) as i64) * m_power(m, k)))
}

fn assemble(
    g: &ClassGroup,
    n: u64,
    k: u32,
    psi: &ClassCharacter,
    m: u64,
    eisenstein: Rational,
    main: CyclotomicValue,
    phi: CyclotomicValue,
) -> AverageValue {
    let value = &(&main + &phi) + &cyclotomic_embed(&eisenstein, psi.order());
    AverageValue {
        d: g.d(),
        n,
        k,
        m,
        character: psi.clone(),
        value,
        stable: n > m * g.d(),
        breakdown: Breakdown { eisenstein, main, phi },
        outside_hypotheses: k >= 3 && k % 2 == 1,
    }
}

/// Right-hand side of the exact average identity, with the Φ term summed
/// class by class.
pub fn theorem1_rhs(
    g: &ClassGroup,
    n: u64,
    k: u32,
    psi: &ClassCharacter,
    m: u64,
    aux: &AuxiliaryPrime,
) -> Result<AverageValue> {
    check(g, n, k, m)?;
    let u2 = int((g.u() * g.u()) as i64);
    let mut phi = CyclotomicValue::zero(psi.order());
    for a in 0..g.h() as usize {
        let s = kernel::phi_class_sum(g, n, k, a, m, aux)?;
        if !s.is_zero() {
            phi = &phi + &psi.value(a).scale(&s);
        }
    }
    let phi = phi.scale(&(u2 * m_power(m, k)));
    Ok(assemble(g, n, k, psi, m, eisenstein_term(g, n, k, psi, m), main_term(g, k, psi, m), phi))
}

/// u²·Σ_A Ψ(A)·a_m(G^cusp_A): the same average read off the kernel.
pub fn average_via_kernel(
    g: &ClassGroup,
    n: u64,
    k: u32,
    psi: &ClassCharacter,
    m: u64,
    aux: &AuxiliaryPrime,
) -> Result<CyclotomicValue> {
    check(g, n, k, m)?;
    let u2 = int((g.u() * g.u()) as i64);
    let mut acc = CyclotomicValue::zero(psi.order());
    for a in 0..g.h() as usize {
        let c = kernel::g_cusp_coeff(g, n, k, a, m, aux)?;
        acc = &acc + &psi.value(a).scale(&c);
    }
    Ok(acc.scale(&u2))
}

/// Whether N > mD, together with the two-term closed form. In the stable
/// range the full Φ sum is recomputed and required to vanish.
pub fn stability_check(g: &ClassGroup, n: u64, k: u32, psi: &ClassCharacter, m: u64) -> Result<(bool, AverageValue)> {
    check(g, n, k, m)?;
    let stable = n > m * g.d();
    let eisenstein = eisenstein_term(g, n, k, psi, m);
    let main = main_term(g, k, psi, m);
    if stable {
        let aux = kernel::auxiliary_prime(g, n, m)?;
        let full = theorem1_rhs(g, n, k, psi, m, &aux)?;
        assert!(full.breakdown.phi.is_zero(), "Φ sum nonzero in the stable range");
        let zero = CyclotomicValue::zero(psi.order());
        return Ok((true, assemble(g, n, k, psi, m, eisenstein, main, zero)));
    }
    let aux = kernel::auxiliary_prime(g, n, m)?;
    Ok((false, theorem1_rhs(g, n, k, psi, m, &aux)?))
}

/// h = (N−1)u/12, which holds exactly when X_0(N) has genus zero and N > D
/// is inert.
pub fn class_number_identity(n: u64, g: &ClassGroup) -> Result<bool> {
    if n <= g.d() {
        return Err(Error::PreconditionViolated(format!("N = {n} must exceed D = {}", g.d())));
    }
    kernel::check_level(g, n).map_err(|e| Error::PreconditionViolated(e.to_string()))?;
    Ok(int(g.h() as i64) * int(12) == int((n as i64 - 1) * g.u() as i64))
}

/// Floating-point comparison of the bound implied by the exact average with
/// the convexity bound. Every number here is approximate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubconvexityReport {
    pub d: u64,
    pub n: u64,
    pub k: u32,
    pub delta: f64,
    pub stable: bool,
    pub exact_average: exactmath::ExactRational,
    /// Upper bound on each summand, read off the nonnegative average.
    pub term_bound: f64,
    /// k·N^{1/2}·D^{1/2}.
    pub convexity_bound: f64,
    /// k·(D^{1/2} + N).
    pub averaged_bound: f64,
    /// averaged_bound / convexity_bound.
    pub ratio: f64,
    /// term_bound / convexity_bound; carries log factors that dominate at small D.
    pub term_ratio: f64,
    /// (kD)^δ ≤ N ≤ D·(kD)^{−δ}.
    pub subconvex_window: bool,
    pub outside_hypotheses: bool,
    pub approximate: bool,
}

pub fn subconvexity_report(g: &ClassGroup, n: u64, k: u32, delta: f64) -> Result<SubconvexityReport> {
    let one = g.trivial_character();
    let aux = kernel::auxiliary_prime(g, n, 1)?;
    let avg = theorem1_rhs(g, n, k, &one, 1, &aux)?;
    let exact = avg.value.as_rational().expect("trivial character gives a rational average");
    let (d, nf, kf, u) = (g.d() as f64, n as f64, k as f64, g.u() as f64);
    let total = exactmath::to_f64(&exact.clone().max(Rational::zero()));
    let log = (kf * nf).ln().max(1.0);
    let term_bound = total * (2.0 * kf - 1.0) * nf * log.powi(3) / (2.0 * d.sqrt() * u * u);
    let convexity_bound = kf * nf.sqrt() * d.sqrt();
    let averaged_bound = kf * (d.sqrt() + nf);
    let kd = kf * d;
    Ok(SubconvexityReport {
        d: g.d(),
        n,
        k,
        delta,
        stable: avg.stable,
        exact_average: (&exact).into(),
        term_bound,
        convexity_bound,
        averaged_bound,
        ratio: averaged_bound / convexity_bound,
        term_ratio: term_bound / convexity_bound,
        subconvex_window: kd.powf(delta) <= nf && nf <= d * kd.powf(-delta),
        outside_hypotheses: avg.outside_hypotheses,
        approximate: true,
    })
}

/// The average with Ψ = 1_K is rational; returns it.
pub fn trivial_average(g: &ClassGroup, n: u64, k: u32, m: u64) -> Result<Rational> {
    let aux = kernel::auxiliary_prime(g, n, m)?;
    let v = theorem1_rhs(g, n, k, &g.trivial_character(), m, &aux)?;
    Ok(v.value.as_rational().expect("rational for the trivial character"))
}

/// |value| under the standard embedding, for reporting.
pub fn magnitude(v: &AverageValue) -> f64 {
    match v.value.as_rational() {
        Some(r) => exactmath::to_f64(&r.abs()),
        None => v.value.abs(),
    }
}
