//! Coset-regular decompositions of stable subsets of finite groups: a
//! stabilizer subgroup of polynomial index with a union-of-cosets
//! approximant, and the normal variant through the normal core.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{Float, One, Signed, ToPrimitive};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup};
use crate::level::Level;
use crate::rational::{factorial, fraction_string, int, pow, ratio, Rational};
use crate::stability::{
    half_graph, k_star_bound, phi_a_stability, set_relation, stability_index, HalfGraphSearch, KStarBound,
};
use crate::stabilizer::{eta_for_stab_with_witness, stab_counts, stab_set_level_from_counts, EtaResult, EtaSearchConfig, Sigma};
use crate::subset::{left_cosets, normal_core, GroupSubset, Subgroup};

/// How the stability parameter `k` is obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KMode {
    /// Compute the exact stability index.
    Exact,
    /// Use the given `k`.
    Supplied(u64),
}

/// Threshold map used by the η-search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaChoice {
    /// `x^{4k}`.
    Power,
    /// `2^-⌈x^-k⌉`.
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposeOptions {
    pub mode: KMode,
    /// Skip checking that `A` is `k`-stable in supplied mode.
    pub unchecked: bool,
    /// Chain parameter to use instead of computing it.
    pub k_star: Option<u64>,
    /// Search for the exact stability of `φ_A`; when off, `k_*` is the Ramsey bound.
    pub phi_search: bool,
    pub sigma: SigmaChoice,
    pub caps: Caps,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            mode: KMode::Exact,
            unchecked: false,
            k_star: None,
            phi_search: true,
            sigma: SigmaChoice::Power,
            caps: Caps::default(),
        }
    }
}

impl DecomposeOptions {
    pub fn supplied(k: u64) -> Self {
        DecomposeOptions { mode: KMode::Supplied(k), ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KSource {
    Computed,
    Verified,
    /// Supplied with the check switched off; the hypothesis is unverified.
    Unverified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KStarSource {
    /// Exact stability of `φ_A`.
    PhiExact,
    /// The Ramsey bound.
    Bound,
    Supplied,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetClass {
    /// Least element of the left coset.
    pub rep: Element,
    /// `|gH ∩ A|`.
    pub hits: usize,
    /// `hits ≥ m^-1 η |H|`.
    pub dense: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsLedger {
    /// `(30/η)^(k-1)` when η is exact.
    pub index_bound: Option<Rational>,
    pub index_bound_holds: bool,
    /// `N_k = k^(exp(exp(2k)))`, reported as a formula only.
    pub paper_exponent: String,
    /// `η|H|` when η is exact.
    pub error_bound: Option<Rational>,
    /// `|A △ D| < η|H|`.
    pub error_below_eta: bool,
    /// `ε|H|`.
    pub epsilon_bound: Rational,
    /// `(8(k-1)·30^(4k-4))^-1`, when small enough to write down.
    pub guard: Option<Rational>,
    pub epsilon_exceeds_guard: bool,
    /// Every coset has `|gH ∩ A|` or `|gH ∖ A|` below `m^-1 η|H|`.
    pub dichotomy_eta: bool,
    /// The same at `m^-1 ε|H|`.
    pub dichotomy_epsilon: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalLedger {
    /// `Stab_η(A)` before taking the core.
    pub h0: Subgroup,
    pub m0: usize,
    pub m0_index_bound_holds: bool,
    /// `m ≤ m0!`.
    pub factorial_bound_holds: bool,
    /// The feasibility inequality of the exponential variant, evaluated in
    /// floating point when η is exact; recorded, never enforced.
    pub dagger: Option<bool>,
    pub is_normal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub k_used: u64,
    pub k_source: KSource,
    pub k_star_used: u64,
    pub k_star_source: KStarSource,
    pub k_star_bound: KStarBound,
    pub epsilon: Rational,
    pub sigma: Sigma,
    pub eta: EtaResult,
    pub h: Subgroup,
    pub index: usize,
    pub coset_classes: Vec<CosetClass>,
    pub d: GroupSubset,
    pub error_count: usize,
    pub bounds: BoundsLedger,
    pub normal: Option<NormalLedger>,
}

struct Parameters {
    k: u64,
    k_source: KSource,
    k_star: u64,
    k_star_source: KStarSource,
    bound: KStarBound,
}

fn check_inputs(group: &FiniteGroup, a: &GroupSubset, epsilon: &Rational) -> Result<()> {
    if a.order() != group.order() {
        return Err(Error::GroupMismatch { left: group.order(), right: a.order() });
    }
    if !epsilon.is_positive() || *epsilon > ratio(1, 2) {
        return Err(Error::Precondition(format!("ε must lie in (0, 1/2], got {}", fraction_string(epsilon))));
    }
    Ok(())
}

fn parameters(group: &FiniteGroup, a: &GroupSubset, opts: &DecomposeOptions) -> Result<Parameters> {
    let (k, k_source) = match opts.mode {
        KMode::Exact => (stability_index(group, a, &opts.caps)? as u64, KSource::Computed),
        KMode::Supplied(k) if opts.unchecked => (k, KSource::Unverified),
        KMode::Supplied(k) => {
            let size = usize::try_from(k).map_err(|_| Error::CapExceeded(format!("k = {k}")))?;
            match half_graph(&set_relation(group, a), size, &opts.caps) {
                HalfGraphSearch::Absent => (k, KSource::Verified),
                HalfGraphSearch::Found(w) => {
                    return Err(Error::Precondition(format!(
                        "A is not {k}-stable: half-graph a = {:?}, b = {:?}",
                        w.a, w.b
                    )))
                }
                HalfGraphSearch::Indeterminate(why) => {
                    return Err(Error::CapExceeded(format!("cannot verify {k}-stability: {why}")))
                }
            }
        }
    };
    // k = 1 means A = ∅, which is also 2-stable.
    let k = k.max(2);
    let bound = k_star_bound(k)?;
    let (k_star, k_star_source) = match opts.k_star {
        Some(s) => (s, KStarSource::Supplied),
        None if !opts.phi_search => (bound.saturated, KStarSource::Bound),
        None => match phi_a_stability(group, a, &opts.caps).exact() {
            Some(exact) if (exact as u64) <= bound.saturated => (exact as u64, KStarSource::PhiExact),
            _ => (bound.saturated, KStarSource::Bound),
        },
    };
    Ok(Parameters { k, k_source, k_star: k_star.max(2), k_star_source, bound })
}

fn sigma_for(choice: SigmaChoice, k: u64) -> Result<Sigma> {
    match choice {
        SigmaChoice::Power => Sigma::theorem_power(k),
        SigmaChoice::Exponential => u32::try_from(k)
            .map(|k| Sigma::ExpSnapped { k })
            .map_err(|_| Error::Config(format!("exponential σ needs k < 2^32, got {k}"))),
    }
}

/// `count < m^-1 · level · |H|`.
fn below_level(level: &Level, count: usize, m: usize, h: usize) -> Result<bool> {
    let v = ratio((count * m) as u64, h as u64);
    level
        .cmp_rational(&v)
        .map(|o| o == Ordering::Greater)
        .ok_or_else(|| Error::Precision(format!("{level} vs {}", fraction_string(&v))))
}

fn below_rational(r: &Rational, count: usize, m: usize, h: usize) -> bool {
    int((count * m) as u64) < r * int(h as u64)
}

/// `m ≤ (30/η)^(k-1)`, i.e. `η^(k-1) ≤ 30^(k-1)/m`.
fn index_bound_holds(eta: &Level, k: u64, m: usize) -> Result<bool> {
    let e = u32::try_from(k - 1).map_err(|_| Error::CapExceeded(format!("k = {k}")))?;
    if e == 0 {
        return Ok(m <= 1);
    }
    let rhs = pow(&int(30), e) / int(m as u64);
    eta.powi(e)
        .cmp_rational(&rhs)
        .map(|o| o != Ordering::Greater)
        .ok_or_else(|| Error::Precision(format!("index bound for m = {m}")))
}

fn index_bound_value(eta: &Level, k: u64) -> Option<Rational> {
    let e = u32::try_from(k - 1).ok().filter(|&e| e <= 64)?;
    eta.as_exact().map(|r| pow(&(int(30) / r), e))
}

fn guard(k: u64) -> Option<Rational> {
    let e = u32::try_from(4 * k - 4).ok().filter(|&e| e <= 1024)?;
    Some((int(8 * (k - 1)) * pow(&int(30), e)).recip())
}

fn paper_exponent(k: u64) -> String {
    format!("{k}^(exp(exp({})))", 2 * k)
}

/// `exp[η^-k - 4M ln M] > 8(k-1)η^-3` with `M = (30/η)^(k-1)`, compared in logs.
fn dagger(eta: &Level, k: u64) -> Option<bool> {
    let e = eta.as_exact()?.to_f64().filter(|e| *e > 0.0)?;
    let kf = k as f64;
    let inv = 1.0 / e;
    let m = Float::powf(30.0 * inv, kf - 1.0);
    let lhs = Float::powf(inv, kf) - 4.0 * m * Float::ln(m);
    let rhs = Float::ln(8.0 * (kf - 1.0)) + 3.0 * Float::ln(inv);
    if lhs.is_nan() || rhs.is_nan() {
        None
    } else {
        Some(lhs > rhs)
    }
}

/// `Stab_η(A)`, checked to equal `Stab_σ(η)(A)` and to be a subgroup.
fn stabilizer_subgroup(group: &FiniteGroup, counts: &[usize], found: &EtaResult) -> Result<Subgroup> {
    if found.sigma_eta.cmp_level(&found.eta.half()) == Some(Ordering::Greater) {
        return Err(Error::TheoremViolation(format!(
            "2σ(η) > η at η = {}; the stabilizer need not be a subgroup",
            found.eta
        )));
    }
    let upper = stab_set_level_from_counts(counts, group.order(), &found.eta)?;
    let lower = stab_set_level_from_counts(counts, group.order(), &found.sigma_eta)?;
    if upper != lower {
        return Err(Error::Internal("Stab_η and Stab_σ(η) differ after a successful search".into()));
    }
    Subgroup::new(group, upper).map_err(|e| Error::TheoremViolation(format!("Stab_η(A) is not a subgroup: {e}")))
}

struct Classification {
    classes: Vec<CosetClass>,
    d: GroupSubset,
    error_count: usize,
    dichotomy_eta: bool,
    dichotomy_epsilon: bool,
}

fn classify(group: &FiniteGroup, a: &GroupSubset, h: &Subgroup, eta: &Level, epsilon: &Rational) -> Result<Classification> {
    let cosets = left_cosets(group, h);
    let m = cosets.len();
    let size = h.len();
    let mut hits = alloc::vec![0usize; m];
    for x in a.iter() {
        hits[cosets.coset_of[x]] += 1;
    }
    let mut classes = Vec::with_capacity(m);
    let mut dense_cosets = Vec::new();
    let mut dichotomy_eta = true;
    let mut dichotomy_epsilon = true;
    for (i, (&rep, &c)) in cosets.reps.iter().zip(&hits).enumerate() {
        let dense = !below_level(eta, c, m, size)?;
        dichotomy_eta &= below_level(eta, c, m, size)? || below_level(eta, size - c, m, size)?;
        dichotomy_epsilon &= below_rational(epsilon, c, m, size) || below_rational(epsilon, size - c, m, size);
        if dense {
            dense_cosets.push(i);
        }
        classes.push(CosetClass { rep, hits: c, dense });
    }
    let d = GroupSubset::from_predicate(group.order(), |x| classes[cosets.coset_of[x]].dense);
    let error_count = a.symdiff_count(&d)?;
    Ok(Classification { classes, d, error_count, dichotomy_eta, dichotomy_epsilon })
}

fn ledger(
    params: &Parameters,
    eta: &Level,
    epsilon: &Rational,
    h: &Subgroup,
    cls: &Classification,
) -> Result<BoundsLedger> {
    let size = h.len();
    let guard = guard(params.k);
    Ok(BoundsLedger {
        index_bound: index_bound_value(eta, params.k),
        index_bound_holds: index_bound_holds(eta, params.k, h.index())?,
        paper_exponent: paper_exponent(params.k),
        error_bound: eta.as_exact().map(|r| r * int(size as u64)),
        error_below_eta: below_level(eta, cls.error_count, 1, size)?,
        epsilon_bound: epsilon * int(size as u64),
        epsilon_exceeds_guard: guard.as_ref().map_or(true, |g| epsilon >= g),
        guard,
        dichotomy_eta: cls.dichotomy_eta,
        dichotomy_epsilon: cls.dichotomy_epsilon,
    })
}

fn assert_conclusions(report: &RegularityReport) -> Result<()> {
    let b = &report.bounds;
    let note = if b.epsilon_exceeds_guard { " (ε is above the proof's small-ε guard)" } else { "" };
    let fail = |what: String| Err(Error::TheoremViolation(format!("{what}{note}")));
    if int(report.error_count as u64) >= b.epsilon_bound {
        return fail(format!(
            "|A △ D| = {} is not below ε|H| = {}",
            report.error_count,
            fraction_string(&b.epsilon_bound)
        ));
    }
    if !b.dichotomy_eta {
        return fail("a coset meets both A and its complement in at least m^-1 η|H| points".into());
    }
    if !b.dichotomy_epsilon {
        return fail("a coset meets both A and its complement in at least m^-1 ε|H| points".into());
    }
    match &report.normal {
        None if !b.index_bound_holds => fail(format!("index {} exceeds (30/η)^(k-1)", report.index)),
        Some(n) if !n.m0_index_bound_holds => fail(format!("index {} of H_0 exceeds (30/η)^(k-1)", n.m0)),
        Some(n) if !n.is_normal => Err(Error::Internal("normal core is not normal".into())),
        Some(n) if !n.factorial_bound_holds => fail(format!("index {} exceeds {}!", report.index, n.m0)),
        _ => Ok(()),
    }
}

/// Subgroup `H = Stab_η(A)` and a union `D` of left cosets of `H` with
/// `|A △ D| < ε|H|`.
pub fn decompose(group: &FiniteGroup, a: &GroupSubset, epsilon: &Rational, opts: &DecomposeOptions) -> Result<RegularityReport> {
    check_inputs(group, a, epsilon)?;
    let params = parameters(group, a, opts)?;
    let sigma = sigma_for(opts.sigma, params.k)?;
    let cfg = EtaSearchConfig { sigma: sigma.clone(), k: params.k_star, r: Rational::one(), epsilon: epsilon.clone() };
    let found = eta_for_stab_with_witness(group, a, &cfg)?;
    let counts = stab_counts(group, a);
    let h = stabilizer_subgroup(group, &counts, &found)?;
    let cls = classify(group, a, &h, &found.eta, epsilon)?;
    let bounds = ledger(&params, &found.eta, epsilon, &h, &cls)?;
    let report = RegularityReport {
        k_used: params.k,
        k_source: params.k_source,
        k_star_used: params.k_star,
        k_star_source: params.k_star_source,
        k_star_bound: params.bound,
        epsilon: epsilon.clone(),
        sigma,
        eta: found,
        index: h.index(),
        h,
        coset_classes: cls.classes,
        d: cls.d,
        error_count: cls.error_count,
        bounds,
        normal: None,
    };
    assert_conclusions(&report)?;
    Ok(report)
}

/// As [`decompose`] with the exponential σ, replacing `H_0 = Stab_η(A)` by its
/// normal core.
pub fn decompose_normal(group: &FiniteGroup, a: &GroupSubset, epsilon: &Rational, opts: &DecomposeOptions) -> Result<RegularityReport> {
    check_inputs(group, a, epsilon)?;
    let params = parameters(group, a, opts)?;
    let sigma = sigma_for(SigmaChoice::Exponential, params.k)?;
    let cfg = EtaSearchConfig { sigma: sigma.clone(), k: params.k_star, r: Rational::one(), epsilon: epsilon.clone() };
    let found = eta_for_stab_with_witness(group, a, &cfg)?;
    let counts = stab_counts(group, a);
    let h0 = stabilizer_subgroup(group, &counts, &found)?;
    let m0 = h0.index();
    let h = normal_core(group, &h0);
    let cls = classify(group, a, &h, &found.eta, epsilon)?;
    let bounds = ledger(&params, &found.eta, epsilon, &h, &cls)?;
    let normal = NormalLedger {
        m0_index_bound_holds: index_bound_holds(&found.eta, params.k, m0)?,
        factorial_bound_holds: BigUint::from(h.index()) <= factorial(m0 as u64),
        dagger: dagger(&found.eta, params.k),
        is_normal: h.is_normal(group),
        h0,
        m0,
    };
    let report = RegularityReport {
        k_used: params.k,
        k_source: params.k_source,
        k_star_used: params.k_star,
        k_star_source: params.k_star_source,
        k_star_bound: params.bound,
        epsilon: epsilon.clone(),
        sigma,
        eta: found,
        index: h.index(),
        h,
        coset_classes: cls.classes,
        d: cls.d,
        error_count: cls.error_count,
        bounds,
        normal: Some(normal),
    };
    assert_conclusions(&report)?;
    Ok(report)
}
