//! Stabilizer profiles, `Stab_ε` sets, the σ-chain, the η-search and witness
//! extraction when the search fails.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{BlockedCandidate, Error, EtaViolation, Result};
use crate::group::{Element, FiniteGroup, IDENTITY};
use crate::level::Level;
use crate::rational::{ceil_to_biguint, int, ratio, Rational};
use crate::stability::HalfGraphWitness;
use crate::subset::GroupSubset;

/// Half-graph of `φ_A`; columns are pairs `(y, z)` standing for `Ay △ Az`.
pub type PhiWitness = HalfGraphWitness<(Element, Element)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileEntry<E> {
    /// `|Ax △ A|`.
    pub count: usize,
    pub multiplicity: usize,
    /// Least `x` (in the domain order) attaining `count`.
    pub sample: E,
}

/// The multiset `{|Ax △ A| : x ∈ domain}` over a normalizer `|X|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerProfile<E = Element> {
    pub domain: String,
    pub normalizer: usize,
    /// Ascending by count.
    pub entries: Vec<ProfileEntry<E>>,
}

impl<E: Clone> StabilizerProfile<E> {
    pub fn from_counts(domain: impl Into<String>, normalizer: usize, counts: impl IntoIterator<Item = (E, usize)>) -> Self {
        let mut by_count: BTreeMap<usize, ProfileEntry<E>> = BTreeMap::new();
        for (x, c) in counts {
            by_count
                .entry(c)
                .and_modify(|e| e.multiplicity += 1)
                .or_insert(ProfileEntry { count: c, multiplicity: 1, sample: x });
        }
        StabilizerProfile { domain: domain.into(), normalizer, entries: by_count.into_values().collect() }
    }

    /// Distinct values `count / normalizer`, ascending.
    pub fn values(&self) -> Vec<Rational> {
        self.entries
            .iter()
            .map(|e| ratio(e.count as u64, self.normalizer as u64))
            .collect()
    }

    pub fn sample_for(&self, value: &Rational) -> Option<&E> {
        self.entries
            .iter()
            .find(|e| ratio(e.count as u64, self.normalizer as u64) == *value)
            .map(|e| &e.sample)
    }
}

/// `|Ax △ A|` for every `x`, indexed by `x`.
pub fn stab_counts(group: &FiniteGroup, a: &GroupSubset) -> Vec<usize> {
    let size = a.len();
    group
        .elements()
        .map(|x| {
            let ax = a.translate_right(group, x).expect("same group");
            2 * (size - ax.intersection_count(a).expect("same group"))
        })
        .collect()
}

pub fn stab_profile(group: &FiniteGroup, a: &GroupSubset) -> StabilizerProfile {
    let counts = stab_counts(group, a);
    StabilizerProfile::from_counts("x in G, X = G", group.order(), counts.into_iter().enumerate())
}

/// `{x : |Ax △ A| ≤ ε|G|}`.
pub fn stab_set(group: &FiniteGroup, a: &GroupSubset, epsilon: &Rational) -> GroupSubset {
    let counts = stab_counts(group, a);
    stab_set_from_counts(&counts, group.order(), epsilon)
}

pub fn stab_set_from_counts(counts: &[usize], normalizer: usize, epsilon: &Rational) -> GroupSubset {
    // count ≤ (p/q)·n  ⇔  count·q ≤ p·n
    let p = epsilon.numer();
    let q = epsilon.denom();
    let bound = p * BigInt::from(normalizer);
    GroupSubset::from_predicate(counts.len(), |x| BigInt::from(counts[x]) * q <= bound)
}

/// `Stab_level(A)` for a threshold that may only be known as an enclosure.
pub fn stab_set_level(group: &FiniteGroup, a: &GroupSubset, level: &Level) -> Result<GroupSubset> {
    stab_set_level_from_counts(&stab_counts(group, a), group.order(), level)
}

pub fn stab_set_level_from_counts(counts: &[usize], normalizer: usize, level: &Level) -> Result<GroupSubset> {
    let mut out = GroupSubset::empty(counts.len());
    let mut verdicts: BTreeMap<usize, bool> = BTreeMap::new();
    for (x, &c) in counts.iter().enumerate() {
        let inside = match verdicts.get(&c) {
            Some(&v) => v,
            None => {
                let v = level.ge(&ratio(c as u64, normalizer as u64))?;
                verdicts.insert(c, v);
                v
            }
        };
        if inside {
            out.insert(x);
        }
    }
    Ok(out)
}

/// The increasing map σ driving the chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sigma {
    /// `x^p`.
    Power { p: u32 },
    /// `x^p / c` with `c ≥ 1`.
    ScaledPower { c: Rational, p: u32 },
    /// `2^-⌈x^-k⌉`, a dyadic value never above `exp2(-x^-k)`.
    ExpSnapped { k: u32 },
}

impl Sigma {
    /// `x^{4k}`.
    pub fn theorem_power(k: u64) -> Result<Sigma> {
        let p = k
            .checked_mul(4)
            .and_then(|p| u32::try_from(p).ok())
            .ok_or_else(|| Error::Config(format!("σ exponent 4k overflows for k = {k}")))?;
        Ok(Sigma::Power { p })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Sigma::Power { p } if *p < 2 => Err(Error::Config("σ(x) = x^p needs p ≥ 2 to stay below x".into())),
            Sigma::ScaledPower { c, p } if *c < Rational::one() || (*p < 2 && c.is_one()) || *p == 0 => {
                Err(Error::Config("σ(x) = x^p/c needs c ≥ 1, p ≥ 1, and σ(x) < x".into()))
            }
            Sigma::ExpSnapped { k } if *k == 0 => Err(Error::Config("exponential σ needs k ≥ 1".into())),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &Level) -> Level {
        match self {
            Sigma::Power { p } => x.powi(*p),
            Sigma::ScaledPower { c, p } => x.powi(*p).scale(&c.recip()),
            Sigma::ExpSnapped { k } => exp_snapped(*k, x),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Sigma::Power { p } => format!("x^{p}"),
            Sigma::ScaledPower { c, p } => format!("x^{p}/({})", crate::rational::fraction_string(c)),
            Sigma::ExpSnapped { k } => format!("2^-ceil(x^-{k})"),
        }
    }
}

fn exp_snapped(k: u32, x: &Level) -> Level {
    const BUDGET: u64 = crate::level::EXPONENT_BIT_BUDGET;
    match x {
        Level::Exact(r) => {
            let inv = r.recip();
            let base_bits = crate::rational::bits(&inv);
            if base_bits.saturating_mul(k as u64) > 4 * BUDGET {
                // x^-k ≥ 2^((bits-ish)·k): far beyond the tracked exponent range.
                let floor_log = crate::rational::floor_log2(&inv).max(0) as u64;
                if floor_log.saturating_mul(k as u64) > BUDGET {
                    return Level::Vanishing;
                }
            }
            let e = ceil_to_biguint(&crate::rational::pow(&inv, k));
            Level::pow2_neg(e)
        }
        Level::Dyadic { lo, hi } => {
            // x ∈ [2^-hi, 2^-lo] ⇒ x^-k ∈ [2^(lo·k), 2^(hi·k)]
            let lo_k = lo * k;
            let exp_lo = match lo_k.to_u64().filter(|&e| e < BUDGET) {
                Some(e) => BigUint::one() << e,
                None => return Level::Vanishing,
            };
            let exp_hi = hi
                .as_ref()
                .and_then(|h| (h * k).to_u64())
                .filter(|&e| e < BUDGET)
                .map(|e| BigUint::one() << e);
            Level::Dyadic { lo: exp_lo, hi: exp_hi }
        }
        Level::Vanishing => Level::Vanishing,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaSearchConfig {
    pub sigma: Sigma,
    /// Stability parameter of the chain (`k_*` in the decompositions).
    pub k: u64,
    /// Covering ratio `r ≥ 1` with `|X^{-1}X| ≤ r|X|`.
    pub r: Rational,
    pub epsilon: Rational,
}

impl EtaSearchConfig {
    pub fn validate(&self) -> Result<()> {
        self.sigma.validate()?;
        if self.k < 2 {
            return Err(Error::Config(format!("chain parameter k must be ≥ 2, got {}", self.k)));
        }
        if self.r < Rational::one() {
            return Err(Error::Config("covering ratio r must be ≥ 1".into()));
        }
        if !self.epsilon.is_positive() || self.epsilon >= Rational::one() {
            return Err(Error::Config("ε must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// `σ_{k,r}(x) = x σ(x/2)^2 / (8(k-1)r^2)`.
    pub fn tau(&self, x: &Level) -> Level {
        let s = self.sigma.eval(&x.half());
        let denom = Rational::from_integer(BigInt::from(8u32) * BigInt::from(self.k - 1)) * &self.r * &self.r;
        x.mul(&s.powi(2)).scale(&denom.recip())
    }
}

/// Lazily materialized candidates `[ε, ½τ(ε), …, ½τ^{k-1}(ε)]` and `δ = τ^k(ε)`.
///
/// Iterates of τ become [`Level::Vanishing`] within a few steps and stay there,
/// so `k` may be astronomically large.
#[derive(Clone, Debug)]
pub struct Chain {
    cfg: EtaSearchConfig,
    /// `τ^n(ε)` for `n = 0, 1, …` until the first vanishing value.
    iterates: Vec<Level>,
}

impl Chain {
    pub fn new(cfg: &EtaSearchConfig) -> Result<Chain> {
        cfg.validate()?;
        Ok(Chain { cfg: cfg.clone(), iterates: alloc::vec![Level::exact(cfg.epsilon.clone())] })
    }

    pub fn config(&self) -> &EtaSearchConfig {
        &self.cfg
    }

    /// `τ^n(ε)`.
    pub fn iterate(&mut self, n: u64) -> Level {
        while (self.iterates.len() as u64) <= n {
            let last = self.iterates.last().expect("nonempty");
            if last.is_vanishing() {
                return Level::Vanishing;
            }
            let next = self.cfg.tau(last);
            self.iterates.push(next);
        }
        self.iterates[n as usize].clone()
    }

    pub fn len(&self) -> u64 {
        self.cfg.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Candidate `n < k`: `ε` for `n = 0`, else `½τ^n(ε)`.
    pub fn candidate(&mut self, n: u64) -> Level {
        assert!(n < self.cfg.k, "candidate index out of range");
        if n == 0 {
            Level::exact(self.cfg.epsilon.clone())
        } else {
            self.iterate(n).half()
        }
    }

    /// `δ = τ^k(ε)`.
    pub fn delta(&mut self) -> Level {
        self.iterate(self.cfg.k)
    }
}

/// The candidate list, with a trailing run of vanishing candidates collapsed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainListing {
    pub candidates: Vec<Level>,
    /// Number of further candidates, all vanishing, not listed.
    pub vanishing_tail: u64,
    pub delta: Level,
}

pub fn sigma_chain(cfg: &EtaSearchConfig) -> Result<ChainListing> {
    let mut chain = Chain::new(cfg)?;
    let mut candidates = Vec::new();
    let mut n = 0;
    while n < cfg.k {
        let c = chain.candidate(n);
        let vanished = c.is_vanishing();
        if let Some(prev) = candidates.last() {
            if c.cmp_level(prev) == Some(Ordering::Greater) || c.cmp_level(prev) == Some(Ordering::Equal) {
                return Err(Error::Config(format!("σ does not decrease the chain at step {n}")));
            }
        }
        candidates.push(c);
        n += 1;
        if vanished {
            break;
        }
    }
    Ok(ChainListing { candidates, vanishing_tail: cfg.k - n, delta: chain.delta() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaResult {
    pub eta: Level,
    pub sigma_eta: Level,
    pub index: u64,
    /// Candidates examined, in order; the last one is `eta`.
    pub chain: Vec<Level>,
    pub delta: Level,
    pub blocked: Vec<BlockedCandidate>,
    /// `η ≥ δ`, or `None` when both are too small to compare.
    pub eta_ge_delta: Option<bool>,
}

/// Values `v` with `σ(η) < v ≤ η`.
fn blocking_values(values: &[Rational], eta: &Level, sigma_eta: &Level) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for v in values {
        if v.is_negative() || *v > Rational::one() {
            return Err(Error::Precondition(format!("value {v} outside [0, 1]")));
        }
        if eta.ge(v)? && sigma_eta.lt(v)? {
            out.push(v.clone());
        }
    }
    Ok(out)
}

/// First chain candidate `η` with no value in `(σ(η), η]`.
pub fn find_eta(values: &[Rational], cfg: &EtaSearchConfig) -> Result<EtaResult> {
    let mut chain = Chain::new(cfg)?;
    let mut blocked = Vec::new();
    let mut listed = Vec::new();
    for n in 0..cfg.k {
        let eta = chain.candidate(n);
        let sigma_eta = cfg.sigma.eval(&eta);
        listed.push(eta.clone());
        let blocking = blocking_values(values, &eta, &sigma_eta)?;
        if blocking.is_empty() {
            let delta = chain.delta();
            let eta_ge_delta = eta.cmp_level(&delta).map(|o| o != Ordering::Less);
            return Ok(EtaResult { eta, sigma_eta, index: n, chain: listed, delta, blocked, eta_ge_delta });
        }
        blocked.push(BlockedCandidate { index: n, eta, sigma_eta, blocking });
        if listed.last().is_some_and(Level::is_vanishing) {
            // Every later candidate is the same vanishing level with the same verdict.
            break;
        }
    }
    Err(Error::EtaSearch(Box::new(EtaViolation { chain: listed, blocked, witness: None })))
}

/// η-search on `{|Ax △ A| / |G|}`; `φ_A` is right-invariant so these values
/// cover every column.
pub fn eta_for_stab(group: &FiniteGroup, a: &GroupSubset, cfg: &EtaSearchConfig) -> Result<EtaResult> {
    if !cfg.r.is_one() {
        return Err(Error::Precondition("the finite-group η-search uses r = 1".into()));
    }
    find_eta(&stab_profile(group, a).values(), cfg)
}

/// As [`eta_for_stab`], attaching a verified `φ_A` half-graph on failure.
pub fn eta_for_stab_with_witness(group: &FiniteGroup, a: &GroupSubset, cfg: &EtaSearchConfig) -> Result<EtaResult> {
    match eta_for_stab(group, a, cfg) {
        Err(Error::EtaSearch(mut violation)) => {
            match witness_from_violation(group, a, cfg, &violation) {
                Ok(w) => violation.witness = Some(w),
                // Chain parameters past the stage cap keep the bare diagnostic.
                Err(Error::CapExceeded(_)) => {}
                Err(e) => return Err(e),
            }
            Err(Error::EtaSearch(violation))
        }
        other => other,
    }
}

/// Replays the inductive construction behind the η-search on a failed input
/// and returns a half-graph of size `cfg.k` for `φ_A`.
pub fn lemma_witness(group: &FiniteGroup, a: &GroupSubset, cfg: &EtaSearchConfig) -> Result<PhiWitness> {
    match eta_for_stab(group, a, cfg) {
        Ok(found) => Err(Error::Precondition(format!(
            "the η-search succeeded at candidate {}; there is nothing to witness",
            found.index
        ))),
        Err(Error::EtaSearch(violation)) => witness_from_violation(group, a, cfg, &violation),
        Err(e) => Err(e),
    }
}

const WITNESS_STAGE_CAP: u64 = 4096;

fn witness_from_violation(
    group: &FiniteGroup,
    a: &GroupSubset,
    cfg: &EtaSearchConfig,
    violation: &EtaViolation,
) -> Result<PhiWitness> {
    let k = cfg.k;
    if k > WITNESS_STAGE_CAP {
        return Err(Error::CapExceeded(format!("witness of size {k}")));
    }
    if (violation.blocked.len() as u64) < k {
        return Err(Error::Internal("violation does not block every candidate".into()));
    }
    let n = group.order();
    let counts = stab_counts(group, a);
    let sample_for = |stage: usize| -> Result<Element> {
        let v = violation.blocked[stage]
            .blocking
            .first()
            .ok_or_else(|| Error::Internal(format!("stage {stage} has no blocking value")))?;
        group
            .elements()
            .find(|&x| int(counts[x] as u64) == v * int(n as u64))
            .ok_or_else(|| Error::Internal(format!("no element realizes blocking value {v}")))
    };
    let column = |y: Element, z: Element| -> GroupSubset {
        let ay = a.translate_right(group, y).expect("same group");
        let az = a.translate_right(group, z).expect("same group");
        ay.symdiff(&az).expect("same group")
    };

    // Stage 1: b_1 = (e, x_1), φ(G, b_1) = A △ A x_1.
    let x1 = sample_for(0)?;
    let mut b: Vec<(Element, Element)> = alloc::vec![(IDENTITY, x1)];
    let mut cols: Vec<GroupSubset> = alloc::vec![column(IDENTITY, x1)];
    for stage in 1..k as usize {
        let x = sample_for(stage)?;
        let c = column(IDENTITY, x);
        let top = cols.iter().skip(1).try_fold(cols[0].clone(), |acc, s| acc.intersect(s))?;
        // averaging: Σ_g |B ∩ Cg| = |B||C|, take the best g (least on ties)
        let (g, _) = group
            .elements()
            .map(|g| (g, top.intersection_count(&c.translate_right(group, g).expect("same group")).expect("same group")))
            .fold((IDENTITY, 0usize), |best, cand| if cand.1 > best.1 { cand } else { best });
        let cg = c.translate_right(group, g)?;
        b.push((g, group.mul(x, g)));
        cols.push(cg);
    }

    // a_t from φ^k_t: in b_1..b_t, outside b_{t+1}..b_k.
    let k = k as usize;
    let mut a_pts = Vec::with_capacity(k);
    for t in 1..=k {
        let cell = GroupSubset::from_predicate(n, |x| {
            cols.iter().enumerate().all(|(i, s)| s.contains(x) == (i < t))
        });
        let pick = cell
            .min_element()
            .ok_or_else(|| Error::Internal(format!("cell {t} of the witness construction is empty")))?;
        a_pts.push(pick);
    }
    // φ(a_i, b_j) iff i ≥ j; reversing both index orders gives i ≤ j.
    a_pts.reverse();
    b.reverse();
    let witness = PhiWitness { a: a_pts, b };
    if !crate::stability::verify_phi_witness(group, a, &witness) {
        return Err(Error::Internal("constructed witness fails verification".into()));
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Caps;
    use crate::group::build_group;
    use crate::rational::pow;
    use crate::subset::is_subgroup;

    fn g(spec: &str) -> FiniteGroup {
        build_group(spec, &Caps::default()).unwrap()
    }

    fn set(n: usize, xs: &[usize]) -> GroupSubset {
        GroupSubset::from_elements(n, xs.iter().copied()).unwrap()
    }

    fn square_cfg(eps: Rational) -> EtaSearchConfig {
        EtaSearchConfig { sigma: Sigma::Power { p: 2 }, k: 2, r: int(1), epsilon: eps }
    }

    #[test]
    fn profiles() {
        let z12 = g("Z/12");
        let full = stab_profile(&z12, &GroupSubset::full(12));
        assert_eq!(full.entries.len(), 1);
        assert_eq!(full.entries[0].count, 0);
        let h = stab_profile(&z12, &set(12, &[0, 4, 8]));
        let summary: Vec<_> = h.entries.iter().map(|e| (e.count, e.multiplicity)).collect();
        assert_eq!(summary, alloc::vec![(0, 3), (6, 9)]);
        let z5 = g("Z/5");
        let p = stab_profile(&z5, &set(5, &[0, 1]));
        let summary: Vec<_> = p.entries.iter().map(|e| (e.count, e.multiplicity)).collect();
        // shifts ±1 overlap in one point, shifts ±2 in none
        assert_eq!(summary, alloc::vec![(0, 1), (2, 2), (4, 2)]);
    }

    #[test]
    fn stab_sets() {
        let z12 = g("Z/12");
        let h = set(12, &[0, 4, 8]);
        assert!(stab_set(&z12, &h, &int(2)).is_full());
        assert_eq!(stab_set(&z12, &h, &ratio(1, 4)), h);
        let a = set(12, &[0, 1, 5]);
        let exact = stab_set(&z12, &a, &int(0));
        assert!(is_subgroup(&z12, &exact));
        assert_eq!(stab_set_level(&z12, &h, &Level::exact(ratio(1, 4))).unwrap(), h);
    }

    #[test]
    fn chain_for_squares() {
        let listing = sigma_chain(&square_cfg(ratio(3, 10))).unwrap();
        // τ(x) = x·((x/2)^2)^2/8 = x^5/128
        assert_eq!(
            listing.candidates,
            alloc::vec![Level::exact(ratio(3, 10)), Level::exact(ratio(243, 25_600_000))]
        );
        let t1 = pow(&ratio(3, 10), 5) / int(128);
        assert_eq!(listing.delta, Level::exact(pow(&t1, 5) / int(128)));
    }

    #[test]
    fn tau_for_half() {
        let cfg = EtaSearchConfig { sigma: Sigma::ScaledPower { c: int(2), p: 1 }, k: 2, r: int(1), epsilon: ratio(1, 2) };
        let x = ratio(1, 3);
        assert_eq!(cfg.tau(&Level::exact(x.clone())), Level::exact(pow(&x, 3) / int(128)));
    }

    #[test]
    fn find_eta_examples() {
        let cfg = square_cfg(ratio(3, 10));
        assert_eq!(find_eta(&[int(0)], &cfg).unwrap().index, 0);
        let r = find_eta(&[int(0), ratio(1, 2)], &cfg).unwrap();
        assert_eq!(r.eta, Level::exact(ratio(3, 10)));
        let r = find_eta(&[ratio(1, 5)], &cfg).unwrap();
        assert_eq!(r.index, 1);
        assert_eq!(r.eta, Level::exact(ratio(243, 25_600_000)));
        assert_eq!(r.blocked[0].blocking, alloc::vec![ratio(1, 5)]);
        assert_eq!(r.eta_ge_delta, Some(true));
    }

    #[test]
    fn subgroup_eta() {
        let z12 = g("Z/12");
        let cfg = EtaSearchConfig { sigma: Sigma::Power { p: 8 }, k: 2, r: int(1), epsilon: ratio(1, 4) };
        let r = eta_for_stab(&z12, &set(12, &[0, 4, 8]), &cfg).unwrap();
        assert_eq!(r.index, 0);
        assert_eq!(r.eta, Level::exact(ratio(1, 4)));
        assert!(eta_for_stab(&z12, &GroupSubset::empty(12), &cfg).unwrap().index == 0);
    }

    #[test]
    fn dense_spectrum_moves_down_the_chain() {
        let z32 = g("Z/32");
        let a = GroupSubset::from_predicate(32, |x| (x * 7 + 3) % 11 < 5);
        let cfg = EtaSearchConfig { sigma: Sigma::Power { p: 8 }, k: 7, r: int(1), epsilon: ratio(1, 2) };
        let r = eta_for_stab(&z32, &a, &cfg).unwrap();
        assert!(r.index > 0);
        let lower = stab_set_level(&z32, &a, &r.sigma_eta).unwrap();
        let upper = stab_set_level(&z32, &a, &r.eta).unwrap();
        assert_eq!(lower, upper);
    }

    #[test]
    fn huge_chain_parameters_terminate() {
        let cfg = EtaSearchConfig { sigma: Sigma::Power { p: 16 }, k: u64::MAX, r: int(1), epsilon: ratio(1, 8) };
        let listing = sigma_chain(&cfg).unwrap();
        assert!(listing.candidates.len() < 40);
        assert!(listing.delta.is_vanishing());
        let r = find_eta(&[int(0), ratio(1, 16), ratio(1, 15)], &cfg).unwrap();
        assert_eq!(r.index, 1);
    }

    #[test]
    fn exponential_sigma_is_dyadic_and_below_the_true_value() {
        let s = Sigma::ExpSnapped { k: 2 };
        // x = 1/2: x^-2 = 4, σ = 2^-4
        assert_eq!(s.eval(&Level::exact(ratio(1, 2))), Level::exact(ratio(1, 16)));
        // x = 2/3: x^-2 = 9/4, ceil = 3
        assert_eq!(s.eval(&Level::exact(ratio(2, 3))), Level::exact(ratio(1, 8)));
        // x = 1/1000: 2^-(10^6), an exact power of two outside the exact budget
        let e = BigUint::from(1_000_000u32);
        assert_eq!(s.eval(&Level::exact(ratio(1, 1000))), Level::Dyadic { lo: e.clone(), hi: Some(e) });
        assert!(s.eval(&Level::exact(ratio(1, 1u64 << 40))).is_vanishing());
    }

    #[test]
    fn witness_on_a_failed_search() {
        let z720 = g("Z/720");
        let a = GroupSubset::from_predicate(720, |x| x < 400);
        let cfg = EtaSearchConfig { sigma: Sigma::ScaledPower { c: int(2), p: 1 }, k: 2, r: int(1), epsilon: ratio(9, 10) };
        let err = eta_for_stab_with_witness(&z720, &a, &cfg).unwrap_err();
        assert!(err.is_theorem_violation());
        let w = lemma_witness(&z720, &a, &cfg).unwrap();
        assert_eq!(w.len(), 2);
        assert!(crate::stability::verify_phi_witness(&z720, &a, &w));
        match err {
            Error::EtaSearch(v) => assert_eq!(v.witness, Some(w)),
            other => panic!("{other:?}"),
        }
        let z12 = g("Z/12");
        let ok = EtaSearchConfig { sigma: Sigma::Power { p: 8 }, k: 2, r: int(1), epsilon: ratio(1, 4) };
        assert!(matches!(lemma_witness(&z12, &set(12, &[0, 4, 8]), &ok), Err(Error::Precondition(_))));
    }
}
