//! Set systems: VC dimension, ε-nets, packings, ε-approximations and covers.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup};
use crate::rational::{floor_log2, floor_to_biguint, int, ratio, Rational};
use crate::subset::GroupSubset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    pub ground: usize,
    pub sets: Vec<FixedBitSet>,
    /// Optional tag per set, such as the translating element.
    pub labels: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl SetSystem {
    pub fn new(ground: usize, sets: Vec<FixedBitSet>) -> Result<SetSystem> {
        if let Some(bad) = sets.iter().find(|s| s.len() != ground) {
            return Err(Error::Precondition(format!(
                "set of length {} on a ground set of size {ground}",
                bad.len()
            )));
        }
        Ok(SetSystem { ground, sets, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<SetSystem> {
        if labels.len() != self.sets.len() {
            return Err(Error::Precondition("one label per set is required".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Distinct sets in first-occurrence order.
    pub fn distinct(&self) -> Vec<FixedBitSet> {
        let mut seen = BTreeSet::new();
        self.sets.iter().filter(|s| seen.insert((*s).clone())).cloned().collect()
    }

    pub fn deduplicated(&self) -> SetSystem {
        let mut seen = BTreeSet::new();
        let mut sets = Vec::new();
        let mut labels = Vec::new();
        for (i, s) in self.sets.iter().enumerate() {
            if seen.insert(s.clone()) {
                sets.push(s.clone());
                labels.push(self.labels.as_ref().map_or(i, |l| l[i]));
            }
        }
        SetSystem { ground: self.ground, sets, labels: self.labels.as_ref().map(|_| labels) }
    }
}

/// `{gA : g ∈ G}` or `{Ag : g ∈ G}`, labelled by `g`.
pub fn translates_system(group: &FiniteGroup, a: &GroupSubset, side: Side) -> SetSystem {
    let sets = group
        .elements()
        .map(|g| {
            let t = match side {
                Side::Left => a.translate_left(group, g),
                Side::Right => a.translate_right(group, g),
            };
            t.expect("same group").bits().clone()
        })
        .collect();
    SetSystem { ground: group.order(), sets, labels: Some(group.elements().collect()) }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcCertificate {
    pub dimension: usize,
    /// A shattered set of size `dimension`.
    pub witness: Vec<usize>,
    /// False when the depth cap stopped the search: `dimension` is then only a lower bound.
    pub exhaustive: bool,
    /// Number of shattered sets found at each size `0, 1, …`; the last entry
    /// being `0` proves no larger set is shattered.
    pub shattered_per_size: Vec<usize>,
}

fn shatters(sets: &[FixedBitSet], points: &[usize]) -> bool {
    let t = points.len();
    if sets.len() < 1 << t {
        return false;
    }
    let mut seen = vec![false; 1 << t];
    let mut distinct = 0;
    for s in sets {
        let trace = points
            .iter()
            .enumerate()
            .fold(0usize, |m, (i, &p)| if s.contains(p) { m | 1 << i } else { m });
        if !core::mem::replace(&mut seen[trace], true) {
            distinct += 1;
            if distinct == 1 << t {
                return true;
            }
        }
    }
    false
}

/// Exact VC dimension by growing shattered sets one point at a time. A set
/// can only be shattered if all its subsets are, and there are never more
/// shattered sets than member sets, so each level stays small.
pub fn vc_dimension(system: &SetSystem, depth_cap: Option<usize>, caps: &Caps) -> Result<VcCertificate> {
    if system.ground > caps.vc_ground && depth_cap.is_none() {
        return Err(Error::CapExceeded(format!(
            "ground set of size {} exceeds the VC cap {}; supply a depth cap",
            system.ground, caps.vc_ground
        )));
    }
    let sets = system.distinct();
    if sets.is_empty() {
        return Ok(VcCertificate { dimension: 0, witness: Vec::new(), exhaustive: true, shattered_per_size: vec![0] });
    }
    let max_depth = depth_cap.unwrap_or(usize::MAX).min(usize::BITS as usize - 2);
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    let mut counts = vec![1];
    let mut witness = Vec::new();
    loop {
        if witness.len() >= max_depth {
            return Ok(VcCertificate { dimension: witness.len(), witness, exhaustive: false, shattered_per_size: counts });
        }
        let previous: BTreeSet<Vec<usize>> = level.iter().cloned().collect();
        let mut next = Vec::new();
        for base in &level {
            let start = base.last().map_or(0, |&m| m + 1);
            for p in start..system.ground {
                let mut cand = base.clone();
                cand.push(p);
                let closed = (0..cand.len()).all(|drop| {
                    let mut sub = cand.clone();
                    sub.remove(drop);
                    previous.contains(&sub)
                });
                if closed && shatters(&sets, &cand) {
                    next.push(cand);
                }
            }
        }
        counts.push(next.len());
        if next.is_empty() {
            return Ok(VcCertificate { dimension: witness.len(), witness, exhaustive: true, shattered_per_size: counts });
        }
        witness = next[0].clone();
        level = next;
    }
}

/// Re-checks that `witness` is shattered by `system`.
pub fn verify_vc_witness(system: &SetSystem, witness: &[usize]) -> bool {
    shatters(&system.sets, witness)
}

fn is_heavy(size: usize, epsilon: &Rational, ground: usize) -> bool {
    // size > (p/q)·N
    BigInt::from(size) * epsilon.denom() > epsilon.numer() * BigInt::from(ground)
}

fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if !epsilon.is_positive() || *epsilon > ratio(1, 2) {
        return Err(Error::Precondition("ε must lie in (0, 1/2]".into()));
    }
    Ok(())
}

/// `⌊8·max(d,1)·ε^-2⌋`. With `d = 0` the bound `0` is not attainable for a
/// system containing one heavy set, so `d` is raised to `1`.
pub fn epsilon_net_bound(epsilon: &Rational, d: usize) -> BigUint {
    let d = d.max(1) as u64;
    floor_to_biguint(&(int(8 * d) / (epsilon * epsilon)))
}

/// True iff `net` meets every member set of size `> εN`.
pub fn verify_epsilon_net(system: &SetSystem, epsilon: &Rational, net: &[usize]) -> bool {
    system.sets.iter().all(|s| {
        !is_heavy(s.count_ones(..), epsilon, system.ground) || net.iter().any(|&p| p < system.ground && s.contains(p))
    })
}

/// An ε-net of size at most `8dε^-2`, by seeded sampling with exact
/// verification and a greedy fallback.
pub fn epsilon_net(system: &SetSystem, epsilon: &Rational, d: usize, seed: u64, caps: &Caps) -> Result<Vec<usize>> {
    check_epsilon(epsilon)?;
    let bound = epsilon_net_bound(epsilon, d).to_usize().unwrap_or(usize::MAX);
    let heavy: Vec<&FixedBitSet> = system
        .sets
        .iter()
        .filter(|s| is_heavy(s.count_ones(..), epsilon, system.ground))
        .collect();
    if heavy.is_empty() {
        return Ok(Vec::new());
    }
    let n = system.ground;
    let hits_all = |net: &[usize]| heavy.iter().all(|s| net.iter().any(|&p| s.contains(p)));
    let draw = bound.min(n);
    if draw == n {
        // The whole ground set is small enough and hits every nonempty set.
        let all: Vec<usize> = (0..n).collect();
        return Ok(all);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..caps.retries {
        let sample: BTreeSet<usize> = (0..draw).map(|_| rng.gen_range(0..n)).collect();
        let net: Vec<usize> = sample.into_iter().collect();
        if hits_all(&net) {
            return Ok(net);
        }
    }
    // Greedy hitting set: repeatedly take the point in most unhit heavy sets.
    let mut unhit: Vec<&FixedBitSet> = heavy.clone();
    let mut net = Vec::new();
    while !unhit.is_empty() {
        let best = (0..n)
            .max_by_key(|&p| (unhit.iter().filter(|s| s.contains(p)).count(), core::cmp::Reverse(p)))
            .expect("ground set nonempty");
        net.push(best);
        unhit.retain(|s| !s.contains(best));
    }
    net.sort_unstable();
    if net.len() <= bound {
        Ok(net)
    } else {
        Err(Error::NetUnachievable { bound, best: net })
    }
}

/// `(30/ε)^d`.
pub fn haussler_bound(epsilon: &Rational, d: usize) -> Rational {
    crate::rational::pow(&(int(30) / epsilon), d as u32)
}

/// Greedy maximal subfamily with pairwise `|U △ V| > εN`, in set order.
/// When `d` is given the packing size is checked against `(30/ε)^d`.
pub fn haussler_packing(system: &SetSystem, epsilon: &Rational, d: Option<usize>) -> Result<SetSystem> {
    check_epsilon(epsilon)?;
    let mut kept: Vec<usize> = Vec::new();
    for (i, s) in system.sets.iter().enumerate() {
        if kept
            .iter()
            .all(|&j| is_heavy(s.symmetric_difference_count(&system.sets[j]), epsilon, system.ground))
        {
            kept.push(i);
        }
    }
    if let Some(d) = d {
        let bound = haussler_bound(epsilon, d);
        if int(kept.len() as u64) > bound {
            return Err(Error::BoundViolated {
                what: "Haussler packing size",
                observed: format!("{}", kept.len()),
                bound: crate::rational::fraction_string(&bound),
            });
        }
    }
    Ok(SetSystem {
        ground: system.ground,
        sets: kept.iter().map(|&i| system.sets[i].clone()).collect(),
        labels: Some(
            kept.iter()
                .map(|&i| system.labels.as_ref().map_or(i, |l| l[i]))
                .collect(),
        ),
    })
}

/// `⌊C·d'·ε^-2·⌊log2(d'/ε + 2)⌋⌋` with `d' = max(d, 1)`.
pub fn vca_length_cap(epsilon: &Rational, d: usize, constant: u64) -> BigUint {
    let d = BigUint::from(d.max(1));
    let (p, q) = (epsilon.numer().magnitude(), epsilon.denom().magnitude());
    // ⌊log2(d/ε + 2)⌋ = ⌊log2((dq + 2p)/p)⌋
    let log = floor_log2(&Rational::new_raw((&d * q + p * 2u32).into(), p.clone().into())).max(1) as u64;
    (BigUint::from(constant) * d * log * q * q) / (p * p)
}

/// Largest `||S|/N − Av_ā(S)|` over the system.
pub fn approximation_discrepancy(system: &SetSystem, tuple: &[usize]) -> Rational {
    if tuple.is_empty() || system.ground == 0 {
        return int(1);
    }
    let n = tuple.len() as u64;
    let big_n = system.ground as u64;
    system
        .sets
        .iter()
        .map(|s| {
            let hits = tuple.iter().filter(|&&p| s.contains(p)).count() as u64;
            let size = s.count_ones(..) as u64;
            (ratio(size, big_n) - ratio(hits, n)).abs()
        })
        .max()
        .unwrap_or_else(Rational::zero)
}

/// A tuple `ā` with every member density estimated within `ε`.
pub fn epsilon_approximation(system: &SetSystem, epsilon: &Rational, d: usize, seed: u64, caps: &Caps) -> Result<Vec<usize>> {
    if !epsilon.is_positive() {
        return Err(Error::Precondition("ε must be positive".into()));
    }
    if system.ground == 0 {
        return Err(Error::Precondition("ground set must be nonempty".into()));
    }
    let cap = vca_length_cap(epsilon, d, caps.vca_constant).to_usize().unwrap_or(usize::MAX);
    let start = crate::rational::ceil_inverse_square(epsilon)
        .to_usize()
        .unwrap_or(usize::MAX)
        .clamp(1, cap.max(1));
    // Each ground point once realizes every density exactly, and no sampled
    // tuple is shorter than that once `start ≥ N`.
    if system.ground <= start {
        return Ok((0..system.ground).collect());
    }
    let mut len = start;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Rational> = None;
    for _ in 0..caps.retries {
        let tuple: Vec<usize> = (0..len).map(|_| rng.gen_range(0..system.ground)).collect();
        let disc = approximation_discrepancy(system, &tuple);
        if disc <= *epsilon {
            return Ok(tuple);
        }
        if best.as_ref().is_none_or(|b| disc < *b) {
            best = Some(disc);
        }
        len = len.saturating_mul(2).min(cap);
    }
    if system.ground <= cap {
        return Ok((0..system.ground).collect());
    }
    Err(Error::ApproximationFailed { cap, best: best.unwrap_or_else(|| int(1)) })
}

/// Greedy `F` with `X ⊆ AF`: repeatedly take the `g` whose `Ag` covers the
/// most uncovered points, least `g` on ties.
pub fn find_right_cover(group: &FiniteGroup, x: &GroupSubset, a: &GroupSubset) -> Result<Vec<Element>> {
    if x.is_empty() {
        return Ok(Vec::new());
    }
    if a.is_empty() {
        return Err(Error::Precondition("an empty set covers nothing".into()));
    }
    let translates: Vec<GroupSubset> = group
        .elements()
        .map(|g| a.translate_right(group, g))
        .collect::<Result<_>>()?;
    let mut uncovered = x.clone();
    let mut cover = Vec::new();
    while !uncovered.is_empty() {
        let (g, gain) = translates
            .iter()
            .enumerate()
            .map(|(g, t)| (g, t.intersection_count(&uncovered).expect("same group")))
            .fold((0, 0), |best, c| if c.1 > best.1 { c } else { best });
        debug_assert!(gain > 0);
        cover.push(g);
        uncovered = uncovered.difference(&translates[g])?;
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_group;
    use crate::stabilizer::stab_set;
    use crate::subset::Subgroup;

    fn caps() -> Caps {
        Caps::default()
    }

    fn g(spec: &str) -> FiniteGroup {
        build_group(spec, &caps()).unwrap()
    }

    fn set(n: usize, xs: &[usize]) -> GroupSubset {
        GroupSubset::from_elements(n, xs.iter().copied()).unwrap()
    }

    fn bits(n: usize, xs: &[usize]) -> FixedBitSet {
        set(n, xs).bits().clone()
    }

    #[test]
    fn vc_of_small_systems() {
        let singletons = SetSystem::new(3, (0..3).map(|i| bits(3, &[i])).collect()).unwrap();
        assert_eq!(vc_dimension(&singletons, None, &caps()).unwrap().dimension, 1);
        let power = SetSystem::new(3, (0..8u64).map(|m| GroupSubset::from_mask(3, m).bits().clone()).collect()).unwrap();
        let cert = vc_dimension(&power, None, &caps()).unwrap();
        assert_eq!(cert.dimension, 3);
        assert!(verify_vc_witness(&power, &cert.witness));
    }

    #[test]
    fn interval_in_z7_has_left_vc_two() {
        let z7 = g("Z/7");
        let sys = translates_system(&z7, &set(7, &[0, 1, 2, 3]), Side::Left);
        let cert = vc_dimension(&sys, None, &caps()).unwrap();
        assert_eq!(cert.dimension, 2);
        assert!(cert.exhaustive);
        assert!(verify_vc_witness(&sys, &cert.witness));
    }

    #[test]
    fn degenerate_translate_systems() {
        let z5 = g("Z/5");
        let empty = translates_system(&z5, &GroupSubset::empty(5), Side::Left);
        assert_eq!(empty.len(), 5);
        assert_eq!(vc_dimension(&empty, None, &caps()).unwrap().dimension, 0);
        let full = translates_system(&z5, &GroupSubset::full(5), Side::Right);
        assert_eq!(vc_dimension(&full, None, &caps()).unwrap().dimension, 0);
        let z12 = g("Z/12");
        let h = set(12, &[0, 4, 8]);
        assert_eq!(translates_system(&z12, &h, Side::Right).distinct().len(), 4);
    }

    #[test]
    fn depth_cap_flags_lower_bounds() {
        let power = SetSystem::new(4, (0..16u64).map(|m| GroupSubset::from_mask(4, m).bits().clone()).collect()).unwrap();
        let cert = vc_dimension(&power, Some(2), &caps()).unwrap();
        assert_eq!(cert.dimension, 2);
        assert!(!cert.exhaustive);
        let wide = SetSystem::new(100, vec![FixedBitSet::with_capacity(100)]).unwrap();
        assert!(matches!(vc_dimension(&wide, None, &caps()), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn nets() {
        let z12 = g("Z/12");
        let empty = SetSystem::new(12, vec![FixedBitSet::with_capacity(12)]).unwrap();
        assert!(epsilon_net(&empty, &ratio(1, 2), 0, 1, &caps()).unwrap().is_empty());
        let full = translates_system(&z12, &GroupSubset::full(12), Side::Left);
        let net = epsilon_net(&full, &ratio(1, 2), 0, 1, &caps()).unwrap();
        assert!(!net.is_empty() && verify_epsilon_net(&full, &ratio(1, 2), &net));
        let sys = translates_system(&z12, &set(12, &[0, 1, 2, 3, 4, 5]), Side::Left);
        let net = epsilon_net(&sys, &ratio(1, 2), 2, 7, &caps()).unwrap();
        assert!(net.len() <= 64);
        assert!(verify_epsilon_net(&sys, &ratio(1, 2), &net));
        assert!(epsilon_net(&sys, &ratio(3, 4), 2, 7, &caps()).is_err());
    }

    #[test]
    fn greedy_net_fallback_reports_its_best_attempt() {
        // 40 disjoint heavy-enough sets need 40 points; d = 1, ε = 1/2 allows 32.
        let ground = 80;
        let sets: Vec<FixedBitSet> = (0..40).map(|i| bits(ground, &[2 * i, 2 * i + 1])).collect();
        let sys = SetSystem::new(ground, sets).unwrap();
        // sets of size 2 are not heavy at ε = 1/2 over 80 points
        assert!(epsilon_net(&sys, &ratio(1, 2), 1, 3, &caps()).unwrap().is_empty());
        let heavy_sets: Vec<FixedBitSet> = (0..2)
            .map(|i| GroupSubset::from_predicate(ground, |x| x % 2 == i).bits().clone())
            .collect();
        let sys = SetSystem::new(ground, heavy_sets).unwrap();
        let net = epsilon_net(&sys, &ratio(1, 4), 1, 3, &caps()).unwrap();
        assert!(verify_epsilon_net(&sys, &ratio(1, 4), &net));
    }

    #[test]
    fn packings() {
        let z12 = g("Z/12");
        let one = SetSystem::new(12, vec![bits(12, &[1, 2])]).unwrap();
        assert_eq!(haussler_packing(&one, &ratio(1, 2), Some(1)).unwrap().len(), 1);
        let two = SetSystem::new(12, vec![FixedBitSet::with_capacity(12), GroupSubset::full(12).bits().clone()]).unwrap();
        assert_eq!(haussler_packing(&two, &ratio(1, 2), None).unwrap().len(), 2);
        let h = set(12, &[0, 4, 8]);
        let sys = translates_system(&z12, &h, Side::Right);
        let packing = haussler_packing(&sys, &ratio(1, 4), Some(1)).unwrap();
        assert_eq!(packing.len(), 4);
        assert_eq!(packing.labels, Some(vec![0, 1, 2, 3]));
        // an overstated packing claim is caught
        assert!(matches!(
            haussler_packing(&sys, &ratio(1, 4), Some(0)),
            Err(Error::BoundViolated { .. })
        ));
    }

    #[test]
    fn approximations() {
        let z12 = g("Z/12");
        let empty = SetSystem::new(12, vec![FixedBitSet::with_capacity(12)]).unwrap();
        let t = epsilon_approximation(&empty, &ratio(1, 4), 0, 1, &caps()).unwrap();
        assert_eq!(approximation_discrepancy(&empty, &t), Rational::zero());
        let full = SetSystem::new(12, vec![GroupSubset::full(12).bits().clone()]).unwrap();
        let t = epsilon_approximation(&full, &ratio(1, 4), 0, 1, &caps()).unwrap();
        assert_eq!(approximation_discrepancy(&full, &t), Rational::zero());
        let h = set(12, &[0, 4, 8]);
        let sets = z12
            .elements()
            .map(|x| h.translate_right(&z12, x).unwrap().symdiff(&h).unwrap().bits().clone())
            .collect();
        let sys = SetSystem::new(12, sets).unwrap();
        let t = epsilon_approximation(&sys, &ratio(1, 4), 10, 5, &caps()).unwrap();
        assert!(approximation_discrepancy(&sys, &t) <= ratio(1, 4));
        assert!(BigUint::from(t.len()) <= vca_length_cap(&ratio(1, 4), 10, 64));
    }

    #[test]
    fn covers() {
        let z8 = g("Z/8");
        let a = set(8, &[0, 1, 2, 3]);
        assert_eq!(find_right_cover(&z8, &set(8, &[1, 2]), &a).unwrap(), vec![0]);
        assert_eq!(find_right_cover(&z8, &GroupSubset::full(8), &a).unwrap(), vec![0, 4]);
        let z12 = g("Z/12");
        let h = Subgroup::new(&z12, set(12, &[0, 4, 8])).unwrap();
        assert_eq!(find_right_cover(&z12, &GroupSubset::full(12), h.carrier()).unwrap().len(), 4);
        assert!(find_right_cover(&z8, &set(8, &[1]), &GroupSubset::empty(8)).is_err());
    }

    #[test]
    fn stabilizer_covers_respect_the_packing_bound() {
        let d4 = g("D/4");
        for mask in 0..256u64 {
            let a = GroupSubset::from_mask(8, mask);
            let vc_r = vc_dimension(&translates_system(&d4, &a, Side::Right), None, &caps()).unwrap().dimension;
            for eps in [ratio(1, 2), ratio(1, 4)] {
                let stab = stab_set(&d4, &a, &eps);
                let cover = find_right_cover(&d4, &GroupSubset::full(8), &stab).unwrap();
                assert!(int(cover.len() as u64) <= haussler_bound(&eps, vc_r));
            }
        }
    }
}
