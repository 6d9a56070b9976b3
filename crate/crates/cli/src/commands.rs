//! Command implementations. Each returns its records together with the
//! number of identity violations found, so output is written before the
//! exit status is decided.

use std::ops::RangeInclusive;

use gzavg_core::average::{self, theorem1_rhs};
use gzavg_core::brandt::{block_central_value, central_value_ratio, eigen_split, verify_average, BrandtModule};
use gzavg_core::exactmath::{self, int};
use gzavg_core::kernel::{self, KernelSeries};
use gzavg_core::quadfield::validate_discriminant;
use gzavg_core::repnum::{Orientation, RepTable};
use gzavg_core::scanner::{self, CertificateKind, CertificateReport};
use gzavg_core::{ClassGroup, CyclotomicValue, Error as CoreError, Rational};
use rayon::prelude::*;
use serde_json::json;

use crate::cache::{Cache, CacheKind};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{sort_records, ExactValue, Record};

pub type CmdResult = Result<Outcome, CliError>;

#[derive(Debug, Default)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub mismatches: usize,
}

impl Outcome {
    fn merge(parts: Vec<Outcome>) -> Outcome {
        let mut out = Outcome::default();
        for p in parts {
            out.records.extend(p.records);
            out.mismatches += p.mismatches;
        }
        sort_records(&mut out.records);
        out
    }
}

pub struct Context {
    pub config: RunConfig,
    pub cache: Cache,
}

fn orientation_tag(o: Orientation) -> &'static str {
    match o {
        Orientation::Standard => "std",
        Orientation::Inverse => "inv",
    }
}

impl Context {
    pub fn new(config: RunConfig) -> Self {
        let cache = Cache::new(config.cache_dir.clone());
        Context { config, cache }
    }

    pub fn class_group(&self, d: u64) -> Result<ClassGroup, CliError> {
        let disc = validate_discriminant(d)?;
        self.cache.get_or_compute(CacheKind::Classgroup, &format!("d{d}"), || Ok(ClassGroup::new(disc)))
    }

    pub fn rep_table(&self, g: &ClassGroup, m_max: u64) -> Result<RepTable, CliError> {
        let o = self.config.orientation;
        let key = format!("d{}-m{m_max}-{}", g.d(), orientation_tag(o));
        self.cache.get_or_compute(CacheKind::Reptable, &key, || Ok(RepTable::build(g, m_max, o)))
    }

    pub fn kernel(&self, g: &ClassGroup, n: u64, k: u32, m_max: u64) -> Result<KernelSeries, CliError> {
        let o = self.config.orientation;
        let key = format!("d{}-n{n}-k{k}-m{m_max}-{}", g.d(), orientation_tag(o));
        self.cache.get_or_compute(CacheKind::Kernel, &key, || Ok(KernelSeries::build(g, n, k, m_max, o)?))
    }

    pub fn brandt(&self, n: u64, m_max: u64) -> Result<BrandtModule, CliError> {
        let cfg = self.config.brandt;
        self.cache
            .get_or_compute(CacheKind::Brandt, &format!("n{n}-m{m_max}"), || Ok(BrandtModule::build_with(n, m_max, cfg)?))
    }

    /// Evaluate `f` on every item with the configured worker count; the first
    /// error in item order wins, and records are sorted afterwards.
    fn parallel<T: Sync>(&self, items: &[T], f: impl Fn(&T) -> CmdResult + Sync + Send) -> CmdResult {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.jobs)
            .build()
            .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
        let results: Vec<CmdResult> = pool.install(|| items.par_iter().map(&f).collect());
        let parts = results.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(Outcome::merge(parts))
    }
}

fn psi_index(g: &ClassGroup, exponents: &[u64]) -> Option<usize> {
    g.characters().iter().position(|c| c.exponents() == exponents)
}

fn certificate_record(g: &ClassGroup, r: &CertificateReport) -> Record {
    let kind = match r.kind {
        CertificateKind::Positivity => "positivity",
        CertificateKind::ModP => "mod_p",
        CertificateKind::ModPFallback => "mod_p_fallback",
        CertificateKind::EisensteinFilter => "eisenstein_filter",
    };
    let psi = psi_index(g, &r.character).unwrap_or(0);
    let p = r.p.unwrap_or(0);
    let mut rec = Record::new(kind, vec![r.d, r.n, r.k as u64, psi as u64, p])
        .param("D", r.d)
        .param("N", r.n)
        .param("k", r.k)
        .param("psi", psi)
        .value(ExactValue::Rational(r.value.clone()))
        .flag("verdict", r.verdict);
    if let Some(p) = r.p {
        rec = rec.param("p", p).flag("p_valuation", json!(r.p_valuation)).flag("excluded_primes", json!(r.excluded_primes));
    }
    rec.narrative = r.narrative.clone();
    rec
}

fn skipped(d: u64, n: u64, extra: u64, reason: &CoreError) -> Record {
    Record::new("skipped", vec![d, n, extra]).param("D", d).param("N", n).note(reason.to_string())
}

pub fn classgroup(ctx: &Context, d: u64) -> CmdResult {
    let g = ctx.class_group(d)?;
    let mut rec = Record::new("classgroup", vec![d])
        .param("D", d)
        .value((&int(g.h() as i64)).into())
        .flag("h", g.h())
        .flag("u", g.u())
        .flag("exponent", g.exponent());
    for f in g.elements() {
        rec = rec.note(format!("form=({},{},{}) order={}", f.a, f.b, f.c, g.element_order(g.index_of(f).unwrap())));
    }
    for (i, c) in g.characters().iter().enumerate() {
        rec = rec.note(format!("psi{i}: order {} exponents {:?}", c.order(), c.exponents()));
    }
    Ok(Outcome { records: vec![rec], mismatches: 0 })
}

pub fn average(ctx: &Context, d: u64, n: u64, k: u32, psi: usize, m: u64) -> CmdResult {
    let g = ctx.class_group(d)?;
    let chars = g.characters();
    let character = chars.get(psi).ok_or_else(|| CliError::Input(format!("psi index {psi} out of range (h = {})", g.h())))?;
    let series = ctx.kernel(&g, n, k, m)?;
    let v = theorem1_rhs(&g, n, k, character, m, &series.aux)?;

    let u2 = int((g.u() * g.u()) as i64);
    let mut via_kernel = CyclotomicValue::zero(character.order());
    for a in 0..g.h() as usize {
        via_kernel = &via_kernel + &character.value(a).scale(&(&u2 * series.g_cusp(&g, a, m)));
    }
    let kernel_agrees = (&via_kernel - &v.value).is_zero();

    let table = ctx.rep_table(&g, m)?;
    let scale = int((g.u() * g.h()) as i64) * Rational::from_integer(m.pow(k - 1).into());
    let main_agrees = (&table.r_psi(character, m).scale(&scale) - &v.breakdown.main).is_zero();

    let rec = Record::new("average", vec![d, n, k as u64, psi as u64, m])
        .param("D", d)
        .param("N", n)
        .param("k", k)
        .param("psi", psi)
        .param("m", m)
        .value((&v.value).into())
        .flag("stable", v.stable)
        .flag("outside_hypotheses", v.outside_hypotheses)
        .flag("kernel_agrees", kernel_agrees)
        .flag("main_term_agrees", main_agrees)
        .note(format!("eisenstein={}", v.breakdown.eisenstein))
        .note(format!("main={}", v.breakdown.main))
        .note(format!("phi={}", v.breakdown.phi))
        .note(format!("aux_q={} aux_class={}", series.aux.q, series.aux.q_class));
    let mismatches = usize::from(!kernel_agrees) + usize::from(!main_agrees);
    Ok(Outcome { records: vec![rec], mismatches })
}

pub fn brandt_verify(ctx: &Context, d: u64, n: u64, m_max: u64) -> CmdResult {
    let g = ctx.class_group(d)?;
    if !exactmath::is_prime(n) || n == 2 {
        return Err(CoreError::NotPrime(n).into());
    }
    kernel::check_level(&g, n)?;
    if m_max == 0 {
        return Err(CliError::Input("m_max must be positive".into()));
    }
    let module = ctx.brandt(n, m_max)?;
    let mut out = Outcome::default();
    for m in (1..=m_max).filter(|m| m % n != 0) {
        let c = verify_average(&module, &g, m)?;
        out.mismatches += usize::from(!c.matches);
        out.records.push(
            Record::new("brandt_verify", vec![0, m])
                .param("D", d)
                .param("N", n)
                .param("m", m)
                .value((&c.left).into())
                .flag("matches", c.matches)
                .note(format!("right={}", c.right))
                .note(format!("cusp={}", c.cusp)),
        );
    }
    let split = eigen_split(&module);
    for (i, f) in split.rational.iter().enumerate() {
        let v = central_value_ratio(&module, &g, &f.vector)?;
        let eig: Vec<String> = f.eigenvalues.iter().map(|(p, a)| format!("a_{p}={a}")).collect();
        out.records.push(
            Record::new("eigenform", vec![1, i as u64])
                .param("D", d)
                .param("N", n)
                .value((&v).into())
                .flag("rational", true)
                .note(eig.join(" "))
                .note("value=<c_f,c_f>/u^2"),
        );
    }
    for (i, b) in split.residual.iter().enumerate() {
        let v = block_central_value(&module, &g, b)?;
        let poly: Vec<String> = b.char_poly.iter().map(|c| c.to_string()).collect();
        out.records.push(
            Record::new("eigenblock", vec![2, i as u64])
                .param("D", d)
                .param("N", n)
                .value((&v).into())
                .flag("dimension", b.dimension())
                .flag("rational", false)
                .note(format!("charpoly(T_{}) coefficients, lowest first: [{}]", b.prime, poly.join(", "))),
        );
    }
    sort_records(&mut out.records);
    Ok(out)
}

/// Odd fundamental discriminants in the range; a single invalid value is
/// an input error.
fn discriminants(range: &RangeInclusive<u64>) -> Result<Vec<u64>, CliError> {
    if range.start() == range.end() {
        validate_discriminant(*range.start())?;
    }
    Ok(range.clone().filter(|&d| validate_discriminant(d).is_ok()).collect())
}

fn inert_levels(g: &ClassGroup, range: &RangeInclusive<u64>) -> Vec<u64> {
    exactmath::primes_up_to(*range.end())
        .into_iter()
        .filter(|n| range.contains(n) && *n > 2 && kernel::check_level(g, *n).is_ok())
        .collect()
}

pub struct ScanRanges {
    pub d: RangeInclusive<u64>,
    pub n: RangeInclusive<u64>,
    pub m: RangeInclusive<u64>,
}

fn pairs(ctx: &Context, ranges: &ScanRanges) -> Result<Vec<(ClassGroup, u64)>, CliError> {
    let mut out = Vec::new();
    for d in discriminants(&ranges.d)? {
        let g = ctx.class_group(d)?;
        for n in inert_levels(&g, &ranges.n) {
            out.push((g.clone(), n));
        }
    }
    Ok(out)
}

pub fn scan_stability(ctx: &Context, ranges: &ScanRanges, k: u32) -> CmdResult {
    let items = pairs(ctx, ranges)?;
    ctx.parallel(&items, |(g, n)| {
        let n = *n;
        let series = ctx.kernel(g, n, k, *ranges.m.end())?;
        let one = g.trivial_character();
        let mut out = Outcome::default();
        for m in ranges.m.clone() {
            let v = theorem1_rhs(g, n, k, &one, m, &series.aux)?;
            let phi_zero = v.breakdown.phi.is_zero();
            out.mismatches += usize::from(v.stable && !phi_zero);
            out.records.push(
                Record::new("stability", vec![g.d(), n, m])
                    .param("D", g.d())
                    .param("N", n)
                    .param("k", k)
                    .param("m", m)
                    .value((&v.breakdown.phi).into())
                    .flag("stable", v.stable)
                    .flag("phi_zero", phi_zero)
                    .flag("accidental_zero", !v.stable && phi_zero)
                    .note("value=phi term"),
            );
        }
        Ok(out)
    })
}

pub fn scan_nonvanishing(ctx: &Context, ranges: &ScanRanges, k: u32) -> CmdResult {
    let items = pairs(ctx, ranges)?;
    ctx.parallel(&items, |(g, n)| {
        let mut out = Outcome::default();
        if *n <= g.d() {
            return Ok(out);
        }
        for psi in g.characters() {
            let r = scanner::positivity_certificate(g, *n, k, &psi)?;
            out.records.push(certificate_record(g, &r));
        }
        Ok(out)
    })
}

pub fn scan_modp(ctx: &Context, ranges: &ScanRanges, k: u32, p: u64) -> CmdResult {
    let items = pairs(ctx, ranges)?;
    ctx.parallel(&items, |(g, n)| {
        let n = *n;
        let mut out = Outcome::default();
        if n <= g.d() {
            return Ok(out);
        }
        for psi in g.characters() {
            match scanner::mod_p_certificate(g, n, k, &psi, p) {
                Ok(r) => {
                    let needs_fallback = !r.verdict && k == 1 && psi.is_trivial() && n > p * g.d();
                    out.records.push(certificate_record(g, &r));
                    if needs_fallback {
                        match scanner::mod_p_fallback(g, n, p) {
                            Ok(f) => out.records.push(certificate_record(g, &f)),
                            Err(e @ CoreError::PreconditionViolated(_)) => out.records.push(skipped(g.d(), n, p, &e)),
                            Err(e) => return Err(e.into()),
                        }
                    }
                }
                Err(e @ CoreError::PreconditionViolated(_)) => {
                    out.records.push(skipped(g.d(), n, p, &e));
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(out)
    })
}

pub fn scan_theorem6(ctx: &Context, ranges: &ScanRanges, p: u64) -> CmdResult {
    let ds = discriminants(&ranges.d)?;
    ctx.parallel(&ds, |&d| {
        let g = ctx.class_group(d)?;
        let mut out = Outcome::default();
        match scanner::theorem6_scan(&g, p, ranges.n.clone()) {
            Ok(reports) => out.records.extend(reports.iter().map(|r| certificate_record(&g, r))),
            Err(e @ CoreError::PreconditionViolated(_)) => out.records.push(skipped(d, 0, p, &e)),
            Err(e) => return Err(e.into()),
        }
        Ok(out)
    })
}

pub fn scan_subconvexity(ctx: &Context, ranges: &ScanRanges, k: u32, delta: f64) -> CmdResult {
    let items = pairs(ctx, ranges)?;
    ctx.parallel(&items, |(g, n)| {
        let r = average::subconvexity_report(g, *n, k, delta)?;
        let rec = Record::new("subconvexity", vec![g.d(), *n, k as u64])
            .param("D", g.d())
            .param("N", *n)
            .param("k", k)
            .param("delta", delta)
            .value(ExactValue::Rational(r.exact_average.clone()))
            .flag("approximate", true)
            .flag("stable", r.stable)
            .flag("term_bound", r.term_bound)
            .flag("convexity_bound", r.convexity_bound)
            .flag("averaged_bound", r.averaged_bound)
            .flag("ratio", r.ratio)
            .flag("term_ratio", r.term_ratio)
            .flag("subconvex_window", r.subconvex_window)
            .flag("outside_hypotheses", r.outside_hypotheses)
            .note("value=exact stable average; bounds are floating point");
        Ok(Outcome { records: vec![rec], mismatches: 0 })
    })
}
