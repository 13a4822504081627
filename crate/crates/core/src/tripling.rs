//! Regularity for finite stable sets with small tripling in represented
//! groups, which may be infinite.
//!
//! Every stabilizer lives inside `A^-1 A`, so all computations run on the
//! finite working sets `A^-1 A`, `X = A A^-1 A` and `A^-1 X`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::level::Level;
use crate::rational::{fraction_string, int, pow, ratio, Rational};
use crate::regularity::{KMode, KSource, KStarSource};
use crate::repgroup::{ElementSet, RepGroup};
use crate::stability::{half_graph, k_star_bound, max_half_graph, BinaryRelation, HalfGraphSearch};
use crate::stabilizer::{find_eta, EtaResult, EtaSearchConfig, Sigma, StabilizerProfile};
use crate::verify::VerifyLedger;

/// Seed for the sampled group-axiom check on the working sets.
pub const AXIOM_SEED: u64 = 0x7269_706c;

/// `{ab : a ∈ A, b ∈ B}`.
pub fn product_set<G: RepGroup>(
    g: &G,
    a: &ElementSet<G::Elem>,
    b: &ElementSet<G::Elem>,
    caps: &Caps,
) -> Result<ElementSet<G::Elem>> {
    let work = (a.len() as u64).saturating_mul(b.len() as u64);
    if work > caps.product_evaluations {
        return Err(Error::CapExceeded(format!(
            "product of sets of size {} and {} exceeds {} evaluations",
            a.len(),
            b.len(),
            caps.product_evaluations
        )));
    }
    Ok(a.iter().flat_map(|x| b.iter().map(move |y| g.mul(x, y))).collect())
}

pub fn inverse_set<G: RepGroup>(g: &G, a: &ElementSet<G::Elem>) -> ElementSet<G::Elem> {
    a.iter().map(|x| g.inv(x)).collect()
}

/// `A^-1 A`, `X = A A^-1 A` and `A^-1 X`.
#[derive(Clone, Debug)]
pub struct WorkingSets<E: Ord> {
    pub a_inv_a: ElementSet<E>,
    pub x: ElementSet<E>,
    pub a_inv_x: ElementSet<E>,
}

pub fn working_sets<G: RepGroup>(g: &G, a: &ElementSet<G::Elem>, caps: &Caps) -> Result<WorkingSets<G::Elem>> {
    nonempty(a)?;
    let a_inv = inverse_set(g, a);
    let a_inv_a = product_set(g, &a_inv, a, caps)?;
    let x = product_set(g, a, &a_inv_a, caps)?;
    let a_inv_x = product_set(g, &a_inv, &x, caps)?;
    Ok(WorkingSets { a_inv_a, x, a_inv_x })
}

fn nonempty<E: Clone + Ord>(a: &ElementSet<E>) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Precondition("A must be nonempty".into()));
    }
    Ok(())
}

/// `c = |A A^-1 A| / |A|`.
pub fn alternation_ratio<G: RepGroup>(g: &G, a: &ElementSet<G::Elem>, caps: &Caps) -> Result<Rational> {
    nonempty(a)?;
    let a_inv_a = product_set(g, &inverse_set(g, a), a, caps)?;
    let x = product_set(g, a, &a_inv_a, caps)?;
    Ok(ratio(x.len() as u64, a.len() as u64))
}

/// Both sides of `|(A^-1 A)^3| ≤ c^4 |A A^-1 A|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuzsaCheck {
    pub cubed: usize,
    pub x_size: usize,
    pub a_size: usize,
    pub c: Rational,
    pub bound: Rational,
    pub holds: bool,
}

pub fn ruzsa_check<G: RepGroup>(g: &G, a: &ElementSet<G::Elem>, caps: &Caps) -> Result<RuzsaCheck> {
    let w = working_sets(g, a, caps)?;
    let squared = product_set(g, &w.a_inv_a, &w.a_inv_a, caps)?;
    let cubed = product_set(g, &squared, &w.a_inv_a, caps)?;
    Ok(ruzsa_from_sizes(cubed.len(), w.x.len(), a.len()))
}

fn ruzsa_from_sizes(cubed: usize, x_size: usize, a_size: usize) -> RuzsaCheck {
    let c = ratio(x_size as u64, a_size as u64);
    let bound = pow(&c, 4) * int(x_size as u64);
    let holds = int(cubed as u64) <= bound;
    RuzsaCheck { cubed, x_size, a_size, c, bound, holds }
}

fn right_translate<G: RepGroup>(g: &G, a: &ElementSet<G::Elem>, t: &G::Elem) -> ElementSet<G::Elem> {
    a.iter().map(|x| g.mul(x, t)).collect()
}

/// `|Ag △ A| / |X|` over `(A^-1 A) ∪ (A^-1 X)`, keeping the `g` with `Ag △ A ⊆ X`.
pub fn relative_values<G: RepGroup>(
    g: &G,
    a: &ElementSet<G::Elem>,
    caps: &Caps,
) -> Result<StabilizerProfile<G::Elem>> {
    let w = working_sets(g, a, caps)?;
    relative_values_on(g, a, &w)
}

fn relative_values_on<G: RepGroup>(
    g: &G,
    a: &ElementSet<G::Elem>,
    w: &WorkingSets<G::Elem>,
) -> Result<StabilizerProfile<G::Elem>> {
    let domain = w.a_inv_a.union(&w.a_inv_x);
    let mut counts = Vec::new();
    for t in domain.iter() {
        let at = right_translate(g, a, t);
        let inside = at.iter().all(|y| w.x.contains(y));
        if inside {
            counts.push((t.clone(), at.symdiff_count(a)));
        }
    }
    Ok(StabilizerProfile::from_counts("(A^-1 A) u (A^-1 X)", w.x.len(), counts))
}

/// Checks identity, inverses and sampled associativity on the given elements.
pub fn spot_check_axioms<G: RepGroup>(g: &G, elems: &[G::Elem], samples: usize, seed: u64) -> Result<()> {
    let e = g.identity();
    for x in elems {
        if g.mul(x, &e) != *x || g.mul(&e, x) != *x {
            return Err(Error::InvalidTable(format!("identity fails at {x:?}")));
        }
        let xi = g.inv(x);
        if g.mul(x, &xi) != e || g.mul(&xi, x) != e {
            return Err(Error::InvalidTable(format!("inverse fails at {x:?}")));
        }
    }
    if elems.is_empty() {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let [x, y, z] = [0; 3].map(|_| &elems[rng.gen_range(0..elems.len())]);
        if g.mul(&g.mul(x, y), z) != g.mul(x, &g.mul(y, z)) {
            return Err(Error::InvalidTable(format!("not associative at ({x:?}, {y:?}, {z:?})")));
        }
    }
    Ok(())
}

/// The relation `xy ∈ A` on rows `X` and columns `A^-1 A`, identity first.
///
/// Right translation `(x, y) ↦ (x t^-1, t y)` moves any half-graph to one
/// with `b_1 = e`, and then `b_j ∈ A^-1 A` and `a_i ∈ A A^-1 A`, so the
/// search on this relation with the identity as the only first choice is
/// exact for all of `G`.
pub fn working_relation<G: RepGroup>(
    g: &G,
    a: &ElementSet<G::Elem>,
    w: &WorkingSets<G::Elem>,
) -> Result<BinaryRelation<G::Elem>> {
    let rows = w.x.to_vec();
    let e = g.identity();
    let mut seen: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
    let mut columns = Vec::new();
    let order = core::iter::once(e.clone()).chain(w.a_inv_a.iter().filter(|b| **b != e).cloned());
    for b in order {
        let mut bits = FixedBitSet::with_capacity(rows.len());
        for (i, x) in rows.iter().enumerate() {
            if a.contains(&g.mul(x, &b)) {
                bits.insert(i);
            }
        }
        let key: Vec<usize> = bits.ones().collect();
        if seen.insert(key, ()).is_none() {
            columns.push((b, bits));
        }
    }
    BinaryRelation::with_first_choices(rows.len(), columns, 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplingOptions {
    pub mode: KMode,
    /// Skip the stability check of a supplied `k`.
    pub unchecked: bool,
    pub k_star: Option<u64>,
    pub axiom_samples: usize,
    pub caps: Caps,
}

impl Default for TriplingOptions {
    fn default() -> Self {
        TriplingOptions { mode: KMode::Exact, unchecked: false, k_star: None, axiom_samples: 4096, caps: Caps::default() }
    }
}

impl TriplingOptions {
    pub fn supplied(k: u64) -> Self {
        TriplingOptions { mode: KMode::Supplied(k), ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverClass<E> {
    pub rep: E,
    /// `|gH ∩ A|`.
    pub hits: usize,
    pub dense: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplingLedger {
    pub h_subgroup: bool,
    pub h_in_a_inv_a: bool,
    /// `Stab^A_η(A) = Stab^A_{η^4k}(A)`.
    pub stab_levels_agree: bool,
    pub a_in_ch: bool,
    /// `(30c/η)^(k-1)` when η is exact and the power is small enough to print.
    pub cover_bound: Option<Rational>,
    pub cover_bound_holds: bool,
    pub paper_exponent: String,
    pub error_bound: Rational,
    pub error_below_epsilon: bool,
    pub error_below_eta: bool,
    pub dichotomy: bool,
    pub ruzsa: RuzsaCheck,
    pub guard: Option<Rational>,
    pub epsilon_exceeds_guard: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplingReport<E: Ord> {
    pub group: String,
    pub a_size: usize,
    pub x_size: usize,
    pub c: Rational,
    pub k_used: u64,
    pub k_source: KSource,
    pub k_star_used: u64,
    pub k_star_source: KStarSource,
    pub epsilon: Rational,
    pub sigma: Sigma,
    pub r: Rational,
    pub domain_size: usize,
    pub eta: EtaResult,
    pub h: ElementSet<E>,
    pub cover: Vec<CoverClass<E>>,
    pub c_set: ElementSet<E>,
    pub d: ElementSet<E>,
    pub error_count: usize,
    pub ledger: TriplingLedger,
}

fn check_epsilon(eps: &Rational) -> Result<()> {
    if *eps <= int(0) || *eps > ratio(1, 2) {
        return Err(Error::Precondition(format!("ε must lie in (0, 1/2], got {}", fraction_string(eps))));
    }
    Ok(())
}

fn stability_k<G: RepGroup>(
    g: &G,
    a: &ElementSet<G::Elem>,
    w: &WorkingSets<G::Elem>,
    opts: &TriplingOptions,
) -> Result<(u64, KSource)> {
    match opts.mode {
        KMode::Supplied(k) if opts.unchecked => Ok((k, KSource::Unverified)),
        KMode::Supplied(k) => {
            let size = usize::try_from(k).map_err(|_| Error::CapExceeded(format!("k = {k}")))?;
            match half_graph(&working_relation(g, a, w)?, size, &opts.caps) {
                HalfGraphSearch::Absent => Ok((k, KSource::Verified)),
                HalfGraphSearch::Found(wit) => Err(Error::Precondition(format!(
                    "A is not {k}-stable: half-graph rows {:?} of X, columns {:?}",
                    wit.a, wit.b
                ))),
                HalfGraphSearch::Indeterminate(why) => {
                    Err(Error::CapExceeded(format!("cannot verify {k}-stability: {why}")))
                }
            }
        }
        KMode::Exact => {
            let outcome = max_half_graph(&working_relation(g, a, w)?, &opts.caps);
            match outcome.exact() {
                Some(k) => Ok((k as u64, KSource::Computed)),
                None => Err(Error::CapExceeded(format!(
                    "stability index undecided beyond {}; supply k",
                    outcome.lower_bound()
                ))),
            }
        }
    }
}

/// `count·m / size < level`.
fn below_level(level: &Level, count: usize, m: usize, size: usize) -> Result<bool> {
    let v = ratio((count * m) as u64, size as u64);
    level
        .cmp_rational(&v)
        .map(|o| o == Ordering::Greater)
        .ok_or_else(|| Error::Precision(format!("{level} vs {}", fraction_string(&v))))
}

/// `{t ∈ A^-1 A : |At △ A| ≤ level·|A|}`.
fn stab_on<G: RepGroup>(
    g: &G,
    a: &ElementSet<G::Elem>,
    domain: &ElementSet<G::Elem>,
    level: &Level,
) -> Result<ElementSet<G::Elem>> {
    let mut out = ElementSet::new();
    for t in domain.iter() {
        let count = right_translate(g, a, t).symdiff_count(a);
        if level.ge(&ratio(count as u64, a.len() as u64))? {
            out.insert(t.clone());
        }
    }
    Ok(out)
}

fn is_subgroup<G: RepGroup>(g: &G, h: &ElementSet<G::Elem>) -> bool {
    h.contains(&g.identity())
        && h.iter().all(|x| h.contains(&g.inv(x)))
        && h.iter().all(|x| h.iter().all(|y| h.contains(&g.mul(x, y))))
}

fn same_coset<G: RepGroup>(g: &G, h: &ElementSet<G::Elem>, x: &G::Elem, y: &G::Elem) -> bool {
    h.contains(&g.mul(&g.inv(x), y))
}

/// `η^(k-1) ≤ (30c)^(k-1) / m`.
fn cover_bound_holds(eta: &Level, c: &Rational, k: u64, m: usize) -> Result<bool> {
    let e = u32::try_from(k - 1).map_err(|_| Error::CapExceeded(format!("k = {k}")))?;
    let rhs = pow(&(int(30) * c), e) / int(m as u64);
    eta.powi(e)
        .cmp_rational(&rhs)
        .map(|o| o != Ordering::Greater)
        .ok_or_else(|| Error::Precision(format!("cover bound for m = {m}")))
}

fn cover_bound_value(eta: &Level, c: &Rational, k: u64) -> Option<Rational> {
    let e = u32::try_from(k - 1).ok().filter(|&e| e <= 64)?;
    eta.as_exact().map(|r| pow(&(int(30) * c / r), e))
}

fn guard(c: &Rational, k: u64) -> Option<Rational> {
    let e = u32::try_from(4 * k - 4).ok().filter(|&e| e <= 1024)?;
    Some((int(8 * (k - 1)) * pow(&(int(30) * c), e)).recip())
}

/// Finds `H ≤ G` with `H ⊆ A^-1 A`, a cover `A ⊆ CH` with `C ⊆ A`, and `D ⊆ C`
/// with `|A △ DH| < ε|H|`, asserting every conclusion.
pub fn decompose_tripling<G: RepGroup>(
    g: &G,
    a: &ElementSet<G::Elem>,
    epsilon: &Rational,
    opts: &TriplingOptions,
) -> Result<TriplingReport<G::Elem>> {
    check_epsilon(epsilon)?;
    nonempty(a)?;
    let w = working_sets(g, a, &opts.caps)?;
    let mut working: Vec<G::Elem> = w.a_inv_a.union(&w.x).to_vec();
    working.extend(a.iter().cloned());
    spot_check_axioms(g, &working, opts.axiom_samples, AXIOM_SEED)?;

    let squared = product_set(g, &w.a_inv_a, &w.a_inv_a, &opts.caps)?;
    let cubed = product_set(g, &squared, &w.a_inv_a, &opts.caps)?;
    let ruzsa = ruzsa_from_sizes(cubed.len(), w.x.len(), a.len());
    if !ruzsa.holds {
        return Err(Error::TheoremViolation(format!(
            "|(A^-1 A)^3| = {} exceeds c^4 |AA^-1A| = {}",
            ruzsa.cubed,
            fraction_string(&ruzsa.bound)
        )));
    }

    let (k, k_source) = stability_k(g, a, &w, opts)?;
    let k = k.max(2);
    let (k_star, k_star_source) = match opts.k_star {
        Some(s) => (s.max(2), KStarSource::Supplied),
        None => (k_star_bound(k)?.saturated, KStarSource::Bound),
    };
    let c = ratio(w.x.len() as u64, a.len() as u64);
    let p = k
        .checked_mul(4)
        .and_then(|p| u32::try_from(p).ok())
        .ok_or_else(|| Error::Config(format!("σ exponent 4k overflows for k = {k}")))?;
    let sigma = Sigma::ScaledPower { c: c.clone(), p };
    let r = pow(&c, 4);
    let cfg = EtaSearchConfig { sigma: sigma.clone(), k: k_star, r: r.clone(), epsilon: epsilon.clone() };
    let profile = relative_values_on(g, a, &w)?;
    let found = find_eta(&profile.values(), &cfg)?;

    let h = stab_on(g, a, &w.a_inv_a, &found.eta)?;
    let h_low = stab_on(g, a, &w.a_inv_a, &found.eta.powi(p))?;
    let h_subgroup = is_subgroup(g, &h);
    let h_in_a_inv_a = h.is_subset(&w.a_inv_a);
    let stab_levels_agree = h == h_low;
    if !h_subgroup {
        return Err(Error::TheoremViolation(format!("Stab^A_η(A) is not a subgroup at η = {}", found.eta)));
    }
    if !stab_levels_agree {
        return Err(Error::TheoremViolation(format!(
            "Stab^A_η(A) differs from Stab^A_(η^{p})(A) at η = {}",
            found.eta
        )));
    }

    // Representatives in A, one per H-coset meeting A, in increasing order.
    let mut reps: Vec<G::Elem> = Vec::new();
    let mut hits: Vec<usize> = Vec::new();
    for x in a.iter() {
        match reps.iter().position(|r| same_coset(g, &h, r, x)) {
            Some(i) => hits[i] += 1,
            None => {
                reps.push(x.clone());
                hits.push(1);
            }
        }
    }
    let m = reps.len();
    let size = h.len();
    let mut cover = Vec::with_capacity(m);
    let mut dichotomy = true;
    for (rep, &count) in reps.iter().zip(&hits) {
        let sparse = below_level(&found.eta, count, m, size)?;
        dichotomy &= sparse || below_level(&found.eta, size - count, m, size)?;
        cover.push(CoverClass { rep: rep.clone(), hits: count, dense: !sparse });
    }
    let c_set: ElementSet<G::Elem> = reps.iter().cloned().collect();
    let d: ElementSet<G::Elem> = cover.iter().filter(|cl| cl.dense).map(|cl| cl.rep.clone()).collect();
    let dh = product_set(g, &d, &h, &opts.caps)?;
    let ch = product_set(g, &c_set, &h, &opts.caps)?;
    let a_in_ch = a.is_subset(&ch);
    let error_count = a.symdiff_count(&dh);
    let error_bound = epsilon * int(size as u64);
    let error_below_epsilon = int(error_count as u64) < error_bound;
    let error_below_eta = below_level(&found.eta, error_count, 1, size)?;
    let guard = guard(&c, k);
    let ledger = TriplingLedger {
        h_subgroup,
        h_in_a_inv_a,
        stab_levels_agree,
        a_in_ch,
        cover_bound: cover_bound_value(&found.eta, &c, k),
        cover_bound_holds: cover_bound_holds(&found.eta, &c, k, m)?,
        paper_exponent: format!("{k}^(exp(exp({})))", 2 * k),
        error_bound,
        error_below_epsilon,
        error_below_eta,
        dichotomy,
        ruzsa,
        epsilon_exceeds_guard: guard.as_ref().map_or(true, |gd| epsilon >= gd),
        guard,
    };
    let report = TriplingReport {
        group: g.name(),
        a_size: a.len(),
        x_size: w.x.len(),
        c,
        k_used: k,
        k_source,
        k_star_used: k_star,
        k_star_source,
        epsilon: epsilon.clone(),
        sigma,
        r,
        domain_size: profile.entries.iter().map(|e| e.multiplicity).sum(),
        eta: found,
        h,
        cover,
        c_set,
        d,
        error_count,
        ledger,
    };
    assert_conclusions(&report)?;
    Ok(report)
}

fn assert_conclusions<E: Ord>(report: &TriplingReport<E>) -> Result<()> {
    let l = &report.ledger;
    let note = if l.epsilon_exceeds_guard { " (ε is above the proof's guard)" } else { "" };
    let failures: Vec<&str> = [
        (l.h_in_a_inv_a, "H ⊆ A^-1 A"),
        (l.a_in_ch, "A ⊆ CH"),
        (l.cover_bound_holds, "|C| ≤ (30c/η)^(k-1)"),
        (l.error_below_epsilon, "|A △ DH| < ε|H|"),
        (l.dichotomy, "coset dichotomy"),
    ]
    .into_iter()
    .filter(|(ok, _)| !ok)
    .map(|(_, what)| what)
    .collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::TheoremViolation(format!("{}{note}", failures.join(", "))))
    }
}

/// Recomputes every ledger entry of a [`TriplingReport`] with direct loops
/// over the group operation.
pub fn verify_tripling<G: RepGroup>(
    g: &G,
    a: &ElementSet<G::Elem>,
    epsilon: &Rational,
    report: &TriplingReport<G::Elem>,
) -> VerifyLedger {
    let mut ledger = VerifyLedger::default();
    let a_vec = a.to_vec();
    let mut a_inv_a: Vec<G::Elem> = Vec::new();
    for x in &a_vec {
        for y in &a_vec {
            a_inv_a.push(g.mul(&g.inv(x), y));
        }
    }
    a_inv_a.sort();
    a_inv_a.dedup();
    let mut x_set: Vec<G::Elem> = Vec::new();
    for x in &a_vec {
        for t in &a_inv_a {
            x_set.push(g.mul(x, t));
        }
    }
    x_set.sort();
    x_set.dedup();
    let c = ratio(x_set.len() as u64, a_vec.len() as u64);
    ledger.record("c", c == report.c, format!("|AA^-1A| = {}, |A| = {}", x_set.len(), a_vec.len()));

    let mut cubed: Vec<G::Elem> = Vec::new();
    for x in &a_inv_a {
        for y in &a_inv_a {
            let xy = g.mul(x, y);
            for z in &a_inv_a {
                cubed.push(g.mul(&xy, z));
            }
        }
    }
    cubed.sort();
    cubed.dedup();
    let lhs = BigUint::from(cubed.len()) * BigUint::from(a_vec.len()).pow(4);
    let rhs = BigUint::from(x_set.len()).pow(5);
    ledger.record("ruzsa", lhs <= rhs && report.ledger.ruzsa.cubed == cubed.len(), format!("|(A^-1A)^3| = {}", cubed.len()));

    let h = report.h.to_vec();
    let in_h = |x: &G::Elem| h.binary_search(x).is_ok();
    ledger.record("h_identity", in_h(&g.identity()), "identity membership");
    let closure = h.iter().all(|x| h.iter().all(|y| in_h(&g.mul(x, y))));
    ledger.record("h_closure", closure, "products of H stay in H");
    ledger.record("h_inverse", h.iter().all(|x| in_h(&g.inv(x))), "inverses of H stay in H");
    ledger.record(
        "h_in_a_inv_a",
        h.iter().all(|x| a_inv_a.binary_search(x).is_ok()),
        "H ⊆ A^-1 A",
    );

    let symdiff = |t: &G::Elem| -> usize {
        let mut at: Vec<G::Elem> = a_vec.iter().map(|x| g.mul(x, t)).collect();
        at.sort();
        let both = at.iter().filter(|y| a_vec.binary_search(y).is_ok()).count();
        2 * (a_vec.len() - both)
    };
    let eta = &report.eta.eta;
    let expected: Option<Vec<G::Elem>> = a_inv_a
        .iter()
        .map(|t| {
            eta.cmp_rational(&ratio(symdiff(t) as u64, a_vec.len() as u64))
                .map(|o| (o != Ordering::Less).then(|| t.clone()))
        })
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect());
    ledger.record(
        "stab_eta",
        expected.as_deref() == Some(&h[..]),
        format!("|H| = {}, recomputed {:?}", h.len(), expected.as_ref().map(Vec::len)),
    );

    let lo = report.eta.sigma_eta.cmp_rational(&int(0)).is_some();
    ledger.record("eta_range", lo && eta.cmp_rational(epsilon) != Some(Ordering::Greater), format!("η = {eta}"));

    let reps: Vec<G::Elem> = report.cover.iter().map(|cl| cl.rep.clone()).collect();
    let coset_of = |x: &G::Elem| reps.iter().position(|r| in_h(&g.mul(&g.inv(r), x)));
    let distinct = reps
        .iter()
        .enumerate()
        .all(|(i, r)| coset_of(r) == Some(i) && a_vec.binary_search(r).is_ok());
    ledger.record("c_distinct_in_a", distinct, format!("m = {}", reps.len()));
    let mut hits = alloc::vec![0usize; reps.len()];
    let mut covered = true;
    for x in &a_vec {
        match coset_of(x) {
            Some(i) => hits[i] += 1,
            None => covered = false,
        }
    }
    ledger.record("a_in_ch", covered, "every element of A lies in some cH");
    ledger.record(
        "coset_hits",
        report.cover.iter().zip(&hits).all(|(cl, &n)| cl.hits == n),
        format!("{hits:?}"),
    );

    let m = reps.len();
    let size = h.len();
    let below = |count: usize| eta.cmp_rational(&ratio((count * m) as u64, size as u64)).map(|o| o == Ordering::Greater);
    let mut dense_ok = true;
    let mut dichotomy = true;
    for (cl, &n) in report.cover.iter().zip(&hits) {
        dense_ok &= below(n).map(|b| b != cl.dense) == Some(true);
        dichotomy &= below(n) == Some(true) || below(size - n) == Some(true);
    }
    ledger.record("dense_rule", dense_ok, "D = {g ∈ C : |gH ∩ A| ≥ m^-1 η|H|}");
    ledger.record("dichotomy", dichotomy, "each coset is η-sparse or η-full");
    let d_expected: Vec<G::Elem> = report.cover.iter().filter(|cl| cl.dense).map(|cl| cl.rep.clone()).collect();
    let mut d_sorted = d_expected.clone();
    d_sorted.sort();
    ledger.record("d_dense_reps", d_sorted == report.d.to_vec(), format!("|D| = {}", report.d.len()));

    let mut dh: Vec<G::Elem> = Vec::new();
    for x in report.d.iter() {
        for y in &h {
            dh.push(g.mul(x, y));
        }
    }
    dh.sort();
    dh.dedup();
    let common = dh.iter().filter(|y| a_vec.binary_search(y).is_ok()).count();
    let error = a_vec.len() + dh.len() - 2 * common;
    ledger.record("error_count", error == report.error_count, format!("|A △ DH| = {error}"));
    ledger.record(
        "error_bound",
        int(error as u64) < epsilon * int(size as u64),
        format!("{error} < {}·{size}", fraction_string(epsilon)),
    );

    let bound = u32::try_from(report.k_used.saturating_sub(1)).ok().and_then(|e| {
        eta.powi(e)
            .cmp_rational(&(pow(&(int(30) * &c), e) / int(m as u64)))
            .map(|o| o != Ordering::Greater)
    });
    ledger.record("cover_bound", bound == Some(true), format!("|C| = {m}, k = {}", report.k_used));
    ledger
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_group;
    use crate::repgroup::{Heisenberg, HeisenbergMod, IntegerLattice, LatticeTimesFinite};
    use alloc::vec;

    fn z() -> IntegerLattice {
        IntegerLattice { dim: 1 }
    }

    fn interval(lo: i64, hi: i64) -> ElementSet<Vec<i64>> {
        (lo..=hi).map(|x| vec![x]).collect()
    }

    #[test]
    fn products_and_inverses() {
        let caps = Caps::default();
        let a = interval(0, 9);
        let e: ElementSet<Vec<i64>> = [vec![0]].into_iter().collect();
        assert_eq!(product_set(&z(), &a, &e, &caps).unwrap(), a);
        assert_eq!(inverse_set(&z(), &inverse_set(&z(), &a)), a);
        let w = working_sets(&z(), &a, &caps).unwrap();
        assert_eq!(w.x, interval(-9, 18));
        let tight = Caps { product_evaluations: 99, ..Caps::default() };
        assert!(matches!(product_set(&z(), &a, &a, &tight), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn interval_ratio_and_ruzsa() {
        let caps = Caps::default();
        let a = interval(0, 9);
        assert_eq!(alternation_ratio(&z(), &a, &caps).unwrap(), ratio(28, 10));
        let r = ruzsa_check(&z(), &a, &caps).unwrap();
        assert_eq!(r.cubed, 55);
        assert!(r.holds);
    }

    #[test]
    fn interval_relative_values() {
        let p = relative_values(&z(), &interval(0, 9), &Caps::default()).unwrap();
        let expected: Vec<Rational> = (0..10).map(|j| ratio(2 * j, 28)).collect();
        assert_eq!(p.values(), expected);
        assert_eq!(p.normalizer, 28);
    }

    #[test]
    fn subgroup_collapses() {
        let f = build_group("Z/6", &Caps::default()).unwrap();
        let g = LatticeTimesFinite { dim: 1, finite: f };
        let a: ElementSet<_> = (0..6).map(|i| (vec![0], i)).collect();
        assert_eq!(alternation_ratio(&g, &a, &Caps::default()).unwrap(), int(1));
        let p = relative_values(&g, &a, &Caps::default()).unwrap();
        assert_eq!(p.values(), vec![int(0)]);
        let rep = decompose_tripling(&g, &a, &ratio(1, 4), &TriplingOptions::default()).unwrap();
        assert_eq!(rep.k_used, 2);
        assert_eq!(rep.h, a);
        assert_eq!(rep.c_set.to_vec(), vec![(vec![0], 0)]);
        assert_eq!(rep.d, rep.c_set);
        assert_eq!(rep.error_count, 0);
        assert!(verify_tripling(&g, &a, &ratio(1, 4), &rep).all_passed());
    }

    #[test]
    fn interval_in_the_integers() {
        let a = interval(0, 99);
        // a_i = i, b_j = j - 99 is a half-graph of size 100; the rows of any
        // half-graph are distinct and lie in the window b_k + A, so the index is 101.
        let opts = TriplingOptions { unchecked: true, ..TriplingOptions::supplied(101) };
        let rep = decompose_tripling(&z(), &a, &ratio(1, 4), &opts).unwrap();
        assert_eq!(rep.h.to_vec(), vec![vec![0]]);
        assert_eq!(rep.c_set, a);
        assert_eq!(rep.d, a);
        assert_eq!(rep.error_count, 0);
        assert!(rep.eta.index > 0);
        assert!(verify_tripling(&z(), &a, &ratio(1, 4), &rep).all_passed());
    }

    #[test]
    fn short_interval_stability_is_exact() {
        let a = interval(0, 3);
        let rep = decompose_tripling(&z(), &a, &ratio(1, 2), &TriplingOptions::default()).unwrap();
        assert_eq!(rep.k_used, 5);
        let opts = TriplingOptions::supplied(4);
        assert!(matches!(decompose_tripling(&z(), &a, &ratio(1, 2), &opts), Err(Error::Precondition(_))));
    }

    #[test]
    fn subgroup_plus_coset() {
        let f = build_group("Z/12", &Caps::default()).unwrap();
        let g = LatticeTimesFinite { dim: 1, finite: f };
        let k: Vec<usize> = vec![0, 4, 8];
        let a: ElementSet<_> =
            k.iter().map(|&x| (vec![0], x)).chain(k.iter().map(|&x| (vec![2], (x + 1) % 12))).collect();
        for eps in [ratio(1, 2), ratio(1, 4)] {
            let rep = decompose_tripling(&g, &a, &eps, &TriplingOptions::default()).unwrap();
            assert_eq!(rep.h.len(), 3);
            assert_eq!(rep.c_set.len(), 2);
            assert_eq!(rep.error_count, 0);
            let v = verify_tripling(&g, &a, &eps, &rep);
            assert!(v.all_passed(), "{:?}", v.failures());
        }
    }

    #[test]
    fn heisenberg_subgroup() {
        let g = HeisenbergMod::new(3).unwrap();
        let a: ElementSet<[i64; 3]> = (0..3).flat_map(|x| (0..3).map(move |c| [x, 0, c])).collect();
        let rep = decompose_tripling(&g, &a, &ratio(1, 2), &TriplingOptions::default()).unwrap();
        assert_eq!(rep.c, int(1));
        assert_eq!(rep.h, a);
        assert!(verify_tripling(&g, &a, &ratio(1, 2), &rep).all_passed());
    }

    #[test]
    fn heisenberg_box_over_the_integers() {
        let a: ElementSet<[i64; 3]> = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]].into_iter().collect();
        let rep = decompose_tripling(&Heisenberg, &a, &ratio(1, 2), &TriplingOptions::default()).unwrap();
        assert!(rep.ledger.ruzsa.holds);
        assert!(verify_tripling(&Heisenberg, &a, &ratio(1, 2), &rep).all_passed());
    }

    #[test]
    fn tampered_report_fails_verification() {
        let f = build_group("Z/12", &Caps::default()).unwrap();
        let g = LatticeTimesFinite { dim: 1, finite: f };
        let a: ElementSet<_> = [0usize, 4, 8].iter().map(|&x| (vec![0], x)).collect();
        let eps = ratio(1, 4);
        let mut rep = decompose_tripling(&g, &a, &eps, &TriplingOptions::default()).unwrap();
        rep.h.remove(&(vec![0], 4));
        let v = verify_tripling(&g, &a, &eps, &rep);
        assert!(v.failed("h_closure") && v.failed("stab_eta"));
    }

    #[test]
    fn rejects_bad_input() {
        let a = interval(0, 3);
        let opts = TriplingOptions::default();
        assert!(matches!(decompose_tripling(&z(), &a, &ratio(3, 4), &opts), Err(Error::Precondition(_))));
        let empty = ElementSet::new();
        assert!(matches!(decompose_tripling(&z(), &empty, &ratio(1, 4), &opts), Err(Error::Precondition(_))));
    }
}
