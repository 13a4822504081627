//! Half-graph search, stability indices, the relation φ_A and Ramsey bounds.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, IDENTITY};
use crate::rational::binomial;
use crate::subset::GroupSubset;

/// A relation on `rows × columns`, stored column by column.
///
/// `columns[..first_choices]` must meet every orbit of a symmetry group of the
/// relation acting on columns. The search then only tries those columns in
/// the first position of a half-graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryRelation<L> {
    left_size: usize,
    columns: Vec<FixedBitSet>,
    labels: Vec<L>,
    first_choices: usize,
}

impl<L: Clone> BinaryRelation<L> {
    /// A relation without symmetry information.
    pub fn new(left_size: usize, columns: Vec<(L, FixedBitSet)>) -> Result<Self> {
        let n = columns.len();
        Self::with_first_choices(left_size, columns, n)
    }

    pub fn with_first_choices(
        left_size: usize,
        columns: Vec<(L, FixedBitSet)>,
        first_choices: usize,
    ) -> Result<Self> {
        if let Some((_, bad)) = columns.iter().find(|(_, c)| c.len() != left_size) {
            return Err(Error::Precondition(format!(
                "column of length {} in a relation with {left_size} rows",
                bad.len()
            )));
        }
        let first_choices = first_choices.min(columns.len());
        let (labels, columns) = columns.into_iter().unzip();
        Ok(BinaryRelation { left_size, columns, labels, first_choices })
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.columns.len()
    }

    pub fn holds(&self, a: usize, column: usize) -> bool {
        self.columns[column].contains(a)
    }

    pub fn column(&self, column: usize) -> &FixedBitSet {
        &self.columns[column]
    }

    pub fn label(&self, column: usize) -> &L {
        &self.labels[column]
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    /// True iff the relation holds nowhere.
    pub fn is_empty(&self) -> bool {
        self.columns.iter().all(|c| c.is_clear())
    }

    /// Checks a witness against the stored matrix.
    pub fn verify(&self, a: &[usize], columns: &[usize]) -> bool {
        a.len() == columns.len()
            && a.iter().enumerate().all(|(i, &ai)| {
                columns
                    .iter()
                    .enumerate()
                    .all(|(j, &c)| self.holds(ai, c) == (i <= j))
            })
    }
}

/// `a_i R b_j` iff `i ≤ j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfGraphWitness<L> {
    pub a: Vec<usize>,
    pub b: Vec<L>,
}

impl<L> HalfGraphWitness<L> {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Re-checks the pattern with an arbitrary membership predicate.
    pub fn verify_with(&self, mut holds: impl FnMut(usize, &L) -> bool) -> bool {
        self.a.len() == self.b.len()
            && self.a.iter().enumerate().all(|(i, &a)| {
                self.b.iter().enumerate().all(|(j, b)| holds(a, b) == (i <= j))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HalfGraphSearch<L> {
    Found(HalfGraphWitness<L>),
    /// Exhaustively ruled out.
    Absent,
    /// Outside the configured caps; nothing is claimed.
    Indeterminate(String),
}

fn check_caps<L>(rel: &BinaryRelation<L>, caps: &Caps) -> core::result::Result<(), String> {
    let rows = caps.half_graph_rows.min(128);
    if rel.left_size > rows {
        return Err(format!("{} rows exceed the cap {rows}", rel.left_size));
    }
    if rel.columns.len() > caps.half_graph_columns {
        return Err(format!(
            "{} columns exceed the cap {}",
            rel.columns.len(),
            caps.half_graph_columns
        ));
    }
    Ok(())
}

fn to_mask(bits: &FixedBitSet) -> u128 {
    bits.ones().fold(0u128, |m, i| m | 1u128 << i)
}

struct Search<'a> {
    cols: &'a [u128],
    first_choices: usize,
    k: usize,
    chosen: Vec<usize>,
    /// Cell configurations (cells then future cell) already known to fail.
    dead: BTreeSet<Vec<u128>>,
}

impl Search<'_> {
    fn run(&mut self, cells: &mut Vec<u128>, future: u128) -> Option<Vec<u128>> {
        let j = cells.len();
        if j == self.k {
            return Some(cells.clone());
        }
        let limit = if j == 0 { self.first_choices } else { self.cols.len() };
        let still_needed = (self.k - j - 1) as u32;
        for c in 0..limit {
            let b = self.cols[c];
            let fresh = future & b;
            let rest = future & !b;
            if fresh == 0 || rest.count_ones() < still_needed || cells.iter().any(|&l| l & b == 0) {
                continue;
            }
            let mut next: Vec<u128> = cells.iter().map(|&l| l & b).collect();
            next.push(fresh);
            let mut key = next.clone();
            key.push(rest);
            if self.dead.contains(&key) {
                continue;
            }
            self.chosen.push(c);
            if let Some(done) = self.run(&mut next, rest) {
                return Some(done);
            }
            self.chosen.pop();
            self.dead.insert(key);
        }
        None
    }
}

/// Searches for a half-graph of size `k` by depth-first choice of `b_1, …, b_k`,
/// tracking the cells `L_t` that `a_t` must come from.
pub fn half_graph<L: Clone>(rel: &BinaryRelation<L>, k: usize, caps: &Caps) -> HalfGraphSearch<L> {
    if k == 0 {
        return HalfGraphSearch::Found(HalfGraphWitness { a: Vec::new(), b: Vec::new() });
    }
    if let Err(why) = check_caps(rel, caps) {
        return HalfGraphSearch::Indeterminate(why);
    }
    if k > rel.left_size {
        return HalfGraphSearch::Absent;
    }
    let cols: Vec<u128> = rel.columns.iter().map(to_mask).collect();
    let full = if rel.left_size == 128 { u128::MAX } else { (1u128 << rel.left_size) - 1 };
    let mut search = Search {
        cols: &cols,
        first_choices: rel.first_choices,
        k,
        chosen: Vec::with_capacity(k),
        dead: BTreeSet::new(),
    };
    match search.run(&mut Vec::with_capacity(k), full) {
        None => HalfGraphSearch::Absent,
        Some(cells) => {
            let a: Vec<usize> = cells.iter().map(|c| c.trailing_zeros() as usize).collect();
            let chosen = search.chosen;
            debug_assert!(rel.verify(&a, &chosen));
            if !rel.verify(&a, &chosen) {
                return HalfGraphSearch::Indeterminate("witness failed re-verification".into());
            }
            let b = chosen.iter().map(|&c| rel.labels[c].clone()).collect();
            HalfGraphSearch::Found(HalfGraphWitness { a, b })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityOutcome<L> {
    /// The least `k` with no half-graph of size `k`, with a largest half-graph.
    Exact { index: usize, witness: HalfGraphWitness<L> },
    /// Half-graphs of size `lower - 1` exist; larger sizes were not decided.
    AtLeast { lower: usize, witness: HalfGraphWitness<L>, reason: String },
}

impl<L> StabilityOutcome<L> {
    pub fn exact(&self) -> Option<usize> {
        match self {
            StabilityOutcome::Exact { index, .. } => Some(*index),
            StabilityOutcome::AtLeast { .. } => None,
        }
    }

    pub fn lower_bound(&self) -> usize {
        match self {
            StabilityOutcome::Exact { index, .. } => *index,
            StabilityOutcome::AtLeast { lower, .. } => *lower,
        }
    }
}

/// `1 + ` the largest half-graph size, searched up to `caps.half_graph_k`.
pub fn max_half_graph<L: Clone>(rel: &BinaryRelation<L>, caps: &Caps) -> StabilityOutcome<L> {
    let mut best = HalfGraphWitness { a: Vec::new(), b: Vec::new() };
    let mut k = 1;
    loop {
        if k > caps.half_graph_k {
            return StabilityOutcome::AtLeast {
                lower: k,
                witness: best,
                reason: format!("half-graph size cap {} reached", caps.half_graph_k),
            };
        }
        match half_graph(rel, k, caps) {
            HalfGraphSearch::Found(w) => best = w,
            HalfGraphSearch::Absent => return StabilityOutcome::Exact { index: k, witness: best },
            HalfGraphSearch::Indeterminate(reason) => {
                return StabilityOutcome::AtLeast { lower: k, witness: best, reason }
            }
        }
        k += 1;
    }
}

/// The relation `xy ∈ A`: column `b` is `Ab^{-1}`, duplicates removed.
pub fn set_relation(group: &FiniteGroup, a: &GroupSubset) -> BinaryRelation<Element> {
    let n = group.order();
    let mut seen = BTreeSet::new();
    let mut columns = Vec::new();
    for b in group.elements() {
        let col = a.translate_right(group, group.inv(b)).expect("same group");
        if seen.insert(col.clone()) {
            columns.push((b, col.bits().clone()));
        }
    }
    // Right translation (a, b) ↦ (a g^{-1}, g b) preserves the relation, so
    // b_1 can be taken to be the identity.
    BinaryRelation::with_first_choices(n, columns, 1).expect("columns have length n")
}

/// `φ_A(x; y, z)`: `x ∈ Ay △ Az`, one column per distinct set, labelled by the
/// first `(y, z)` producing it.
pub fn phi_a_relation(group: &FiniteGroup, a: &GroupSubset) -> BinaryRelation<(Element, Element)> {
    let n = group.order();
    let translates: Vec<GroupSubset> = group
        .elements()
        .map(|y| a.translate_right(group, y).expect("same group"))
        .collect();
    let mut seen = BTreeSet::new();
    let mut columns = Vec::new();
    let mut first_choices = 0;
    for y in group.elements() {
        for z in group.elements() {
            let col = translates[y].symdiff(&translates[z]).expect("same group");
            if seen.insert(col.clone()) {
                columns.push(((y, z), col.bits().clone()));
            }
        }
        if y == IDENTITY {
            // (Ay △ Az)g = Ayg △ Azg, so every column is a right translate of
            // one with y = e.
            first_choices = columns.len();
        }
    }
    BinaryRelation::with_first_choices(n, columns, first_choices).expect("columns have length n")
}

pub fn phi_a_holds(group: &FiniteGroup, a: &GroupSubset, x: Element, y: Element, z: Element) -> bool {
    let xi_y = group.mul(x, group.inv(y));
    let xi_z = group.mul(x, group.inv(z));
    a.contains(xi_y) != a.contains(xi_z)
}

/// Stability of the set relation `xy ∈ A`.
pub fn set_stability(group: &FiniteGroup, a: &GroupSubset, caps: &Caps) -> StabilityOutcome<Element> {
    max_half_graph(&set_relation(group, a), caps)
}

/// The least `k` such that `A` is `k`-stable.
pub fn stability_index(group: &FiniteGroup, a: &GroupSubset, caps: &Caps) -> Result<usize> {
    match set_stability(group, a, caps) {
        StabilityOutcome::Exact { index, .. } => Ok(index),
        StabilityOutcome::AtLeast { lower, reason, .. } => Err(Error::CapExceeded(format!(
            "stability index is at least {lower}: {reason}"
        ))),
    }
}

/// Stability of `φ_A`, exact when within caps.
pub fn phi_a_stability(
    group: &FiniteGroup,
    a: &GroupSubset,
    caps: &Caps,
) -> StabilityOutcome<(Element, Element)> {
    let n = group.order() as u128;
    if n * n > caps.half_graph_columns as u128 {
        return StabilityOutcome::AtLeast {
            lower: 1,
            witness: HalfGraphWitness { a: Vec::new(), b: Vec::new() },
            reason: format!("|G|^2 = {} exceeds the column cap", n * n),
        };
    }
    max_half_graph(&phi_a_relation(group, a), caps)
}

/// Ramsey number `R(k, l)` when known exactly, otherwise `C(k+l-2, k-1)`.
pub fn ramsey(k: u64, l: u64) -> BigUint {
    let (k, l) = (k.min(l), k.max(l));
    match (k, l) {
        (0, _) => BigUint::from(0u32),
        (1, _) => BigUint::one(),
        (2, l) => BigUint::from(l),
        (3, 3) => BigUint::from(6u32),
        (3, 4) => BigUint::from(9u32),
        (3, 5) => BigUint::from(14u32),
        (4, 4) => BigUint::from(18u32),
        _ => binomial(k + l - 2, k - 1),
    }
}

/// The same quantity under the cruder `R(k, l) ≤ 2^(k+l-2)`.
pub fn ramsey_crude(k: u64, l: u64) -> BigUint {
    BigUint::one() << (k + l - 2)
}

/// Above this the inner Ramsey bound is not expanded; the outer binomial
/// would take too long to evaluate and already exceeds `u64`.
const RAMSEY_EXPANSION_LIMIT: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KStarBound {
    pub k: u64,
    /// `R(k, k+1)` under the table-or-binomial rule.
    pub inner: BigUint,
    /// `R(R(k,k+1), R(k,k+1)) + 1`; `None` when too large to expand.
    pub value: Option<BigUint>,
    /// `value` saturated to `u64`.
    pub saturated: u64,
    /// `log2` of the crude variant minus one: the crude bound is `2^crude_log2 + 1`.
    pub crude_log2: BigUint,
}

impl KStarBound {
    /// The crude variant, when it is small enough to write down.
    pub fn crude(&self) -> Option<BigUint> {
        self.crude_log2
            .to_u64()
            .filter(|&e| e <= 1 << 20)
            .map(|e| (BigUint::one() << e) + 1u32)
    }
}

/// Bound on the stability of `φ_A` for a `k`-stable `A`.
pub fn k_star_bound(k: u64) -> Result<KStarBound> {
    if k < 2 {
        return Err(Error::Precondition(format!("k_* bound needs k ≥ 2, got {k}")));
    }
    let inner = ramsey(k, k + 1);
    let value = inner
        .to_u64()
        .filter(|&r| r <= RAMSEY_EXPANSION_LIMIT)
        .map(|r| ramsey(r, r) + 1u32);
    let saturated = value.as_ref().and_then(|v| v.to_u64()).unwrap_or(u64::MAX);
    // crude: r = 2^(2k-1), then R(r, r) ≤ 2^(2r-2)
    let crude_inner = BigUint::one() << (2 * k - 1);
    let crude_log2 = crude_inner * 2u32 - 2u32;
    Ok(KStarBound { k, inner, value, saturated, crude_log2 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureBounds {
    pub complement: BigUint,
    pub intersection: BigUint,
    pub union: BigUint,
}

/// Stability bounds for `G∖A`, `A ∩ B` and `A ∪ B`.
pub fn closure_bounds(k_a: u64, k_b: u64) -> Result<ClosureBounds> {
    if k_a < 2 || k_b < 2 {
        return Err(Error::Precondition("closure bounds need k_A, k_B ≥ 2".into()));
    }
    let r = ramsey(k_a, k_b);
    Ok(ClosureBounds {
        complement: BigUint::from(k_a + 1),
        intersection: r.clone(),
        union: r + 1u32,
    })
}

/// Half-graph of `xy ∈ A` as group elements: `a_i b_j ∈ A` iff `i ≤ j`.
pub fn verify_set_witness(group: &FiniteGroup, a: &GroupSubset, w: &HalfGraphWitness<Element>) -> bool {
    w.verify_with(|x, &b| a.contains(group.mul(x, b)))
}

pub fn verify_phi_witness(
    group: &FiniteGroup,
    a: &GroupSubset,
    w: &HalfGraphWitness<(Element, Element)>,
) -> bool {
    w.verify_with(|x, &(y, z)| phi_a_holds(group, a, x, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_group;
    use crate::subset::{all_subgroups, is_coset};

    fn caps() -> Caps {
        Caps::default()
    }

    fn g(spec: &str) -> FiniteGroup {
        build_group(spec, &caps()).unwrap()
    }

    fn set(n: usize, xs: &[usize]) -> GroupSubset {
        GroupSubset::from_elements(n, xs.iter().copied()).unwrap()
    }

    /// Largest half-graph of `xy ∈ A`: try every k-tuple of right factors and
    /// check that each required cell of left factors is nonempty.
    fn brute_max_half_graph(group: &FiniteGroup, a: &GroupSubset) -> usize {
        let n = group.order();
        let mut best = 0;
        for k in 1..=n {
            let found = (0..n.pow(k as u32)).any(|code| {
                let ys: Vec<usize> = (0..k).map(|i| code / n.pow(i as u32) % n).collect();
                (0..k).all(|i| {
                    group
                        .elements()
                        .any(|x| (0..k).all(|j| a.contains(group.mul(x, ys[j])) == (i <= j)))
                })
            });
            if !found {
                break;
            }
            best = k;
        }
        best
    }

    #[test]
    fn empty_set_is_one_stable() {
        let z5 = g("Z/5");
        assert_eq!(stability_index(&z5, &GroupSubset::empty(5), &caps()).unwrap(), 1);
        assert!(matches!(half_graph(&set_relation(&z5, &GroupSubset::empty(5)), 1, &caps()), HalfGraphSearch::Absent));
    }

    #[test]
    fn subgroups_are_two_stable() {
        let d4 = g("D/4");
        for h in all_subgroups(&d4) {
            let rel = set_relation(&d4, h.carrier());
            assert!(matches!(half_graph(&rel, 2, &caps()), HalfGraphSearch::Absent));
            assert_eq!(stability_index(&d4, h.carrier(), &caps()).unwrap(), 2);
        }
    }

    #[test]
    fn interval_in_z8_has_a_half_graph_of_size_two() {
        let z8 = g("Z/8");
        let a = set(8, &[0, 1, 2, 3]);
        match half_graph(&set_relation(&z8, &a), 2, &caps()) {
            HalfGraphSearch::Found(w) => assert!(verify_set_witness(&z8, &a, &w)),
            other => panic!("{other:?}"),
        }
        assert_eq!(brute_max_half_graph(&z8, &a), 4);
        assert_eq!(stability_index(&z8, &a, &caps()).unwrap(), 5);
    }

    #[test]
    fn three_interval_in_z7() {
        let z7 = g("Z/7");
        let a = set(7, &[0, 1, 2]);
        assert_eq!(brute_max_half_graph(&z7, &a), 3);
        assert_eq!(stability_index(&z7, &a, &caps()).unwrap(), 4);
    }

    #[test]
    fn search_agrees_with_brute_force_on_z6_and_s3() {
        for spec in ["Z/6", "S/3"] {
            let grp = g(spec);
            for mask in 0..64u64 {
                let a = GroupSubset::from_mask(6, mask);
                let fast = stability_index(&grp, &a, &caps()).unwrap();
                assert_eq!(fast, brute_max_half_graph(&grp, &a) + 1, "{spec} {mask:b}");
                assert_eq!(fast == 2, is_coset(&grp, &a), "{spec} {mask:b}");
            }
        }
    }

    #[test]
    fn phi_a_examples() {
        let z6 = g("Z/6");
        assert!(phi_a_relation(&z6, &GroupSubset::empty(6)).is_empty());
        assert!(phi_a_relation(&z6, &GroupSubset::full(6)).is_empty());
        let a = set(6, &[0, 1, 3]);
        for y in z6.elements() {
            assert!(z6.elements().all(|x| !phi_a_holds(&z6, &a, x, y, y)));
        }
        let rel = phi_a_relation(&z6, &a);
        for c in 0..rel.right_size() {
            let (y, z) = *rel.label(c);
            for x in z6.elements() {
                assert_eq!(rel.holds(x, c), phi_a_holds(&z6, &a, x, y, z));
            }
        }
        if let StabilityOutcome::Exact { witness, .. } = phi_a_stability(&z6, &a, &caps()) {
            assert!(verify_phi_witness(&z6, &a, &witness));
        } else {
            panic!("order 6 is within caps");
        }
    }

    #[test]
    fn first_column_restriction_loses_nothing() {
        let d4 = g("D/4");
        for mask in (0..256u64).step_by(7) {
            let a = GroupSubset::from_mask(8, mask);
            let rel = phi_a_relation(&d4, &a);
            let unrestricted =
                BinaryRelation::new(8, (0..rel.right_size()).map(|c| (*rel.label(c), rel.column(c).clone())).collect())
                    .unwrap();
            assert_eq!(
                max_half_graph(&rel, &caps()).exact(),
                max_half_graph(&unrestricted, &caps()).exact()
            );
        }
    }

    #[test]
    fn ramsey_values_and_k_star() {
        assert_eq!(ramsey(2, 3), BigUint::from(3u32));
        assert_eq!(ramsey(3, 3), BigUint::from(6u32));
        assert_eq!(ramsey(4, 3), BigUint::from(9u32));
        assert_eq!(ramsey(9, 9), BigUint::from(12870u32));
        let b2 = k_star_bound(2).unwrap();
        assert_eq!(b2.value, Some(BigUint::from(7u32)));
        assert_eq!(b2.saturated, 7);
        assert_eq!(b2.crude(), Some((BigUint::one() << 14u32) + 1u32));
        let b3 = k_star_bound(3).unwrap();
        assert_eq!(b3.inner, BigUint::from(9u32));
        assert_eq!(b3.value, Some(BigUint::from(12871u32)));
        assert!(k_star_bound(1).is_err());
        assert_eq!(k_star_bound(12).unwrap().saturated, u64::MAX);
    }

    #[test]
    fn closure_bound_examples() {
        let c = closure_bounds(2, 2).unwrap();
        assert_eq!(c.complement, BigUint::from(3u32));
        assert_eq!(c.intersection, BigUint::from(2u32));
        assert_eq!(c.union, BigUint::from(3u32));
        let c = closure_bounds(2, 3).unwrap();
        assert_eq!(c.intersection, BigUint::from(3u32));
        assert_eq!(c.union, BigUint::from(4u32));
        let once = closure_bounds(2, 2).unwrap().complement.to_u64().unwrap();
        assert_eq!(closure_bounds(once, 2).unwrap().complement, BigUint::from(4u32));
    }

    #[test]
    fn row_cap_gives_indeterminate() {
        let z130 = g("Z/130");
        let rel = set_relation(&z130, &set(130, &[0, 1]));
        assert!(matches!(half_graph(&rel, 2, &caps()), HalfGraphSearch::Indeterminate(_)));
        assert!(stability_index(&z130, &set(130, &[0, 1]), &caps()).is_err());
    }
}
