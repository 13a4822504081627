//! Subsets of a finite group as bit-vectors, subgroups, cosets and normal cores.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, IDENTITY};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSubset {
    order: usize,
    bits: FixedBitSet,
}

impl GroupSubset {
    pub fn empty(order: usize) -> Self {
        GroupSubset { order, bits: FixedBitSet::with_capacity(order) }
    }

    pub fn full(order: usize) -> Self {
        let mut s = Self::empty(order);
        s.bits.insert_range(..);
        s
    }

    pub fn singleton(order: usize, x: Element) -> Self {
        let mut s = Self::empty(order);
        s.bits.insert(x);
        s
    }

    pub fn from_elements(order: usize, elements: impl IntoIterator<Item = Element>) -> Result<Self> {
        let mut s = Self::empty(order);
        for x in elements {
            if x >= order {
                return Err(Error::Precondition(format!("element {x} out of range 0..{order}")));
            }
            s.bits.insert(x);
        }
        Ok(s)
    }

    pub fn from_predicate(order: usize, mut pred: impl FnMut(Element) -> bool) -> Self {
        let mut s = Self::empty(order);
        for x in 0..order {
            if pred(x) {
                s.bits.insert(x);
            }
        }
        s
    }

    /// The subset of `0..order` whose indicator is the low `order` bits of `mask`.
    pub fn from_mask(order: usize, mask: u64) -> Self {
        debug_assert!(order <= 64);
        Self::from_predicate(order, |x| mask >> x & 1 == 1)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, x: Element) -> bool {
        self.bits.contains(x)
    }

    pub fn insert(&mut self, x: Element) {
        self.bits.insert(x);
    }

    pub fn remove(&mut self, x: Element) {
        self.bits.set(x, false);
    }

    pub fn toggle(&mut self, x: Element) {
        self.bits.toggle(x);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.order
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    pub fn min_element(&self) -> Option<Element> {
        self.bits.minimum()
    }

    pub fn is_subset(&self, other: &GroupSubset) -> bool {
        self.bits.is_subset(&other.bits)
    }

    fn check(&self, other: &GroupSubset) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::GroupMismatch { left: self.order, right: other.order })
        }
    }

    fn check_group(&self, g: &FiniteGroup) -> Result<()> {
        if self.order == g.order() {
            Ok(())
        } else {
            Err(Error::GroupMismatch { left: self.order, right: g.order() })
        }
    }

    /// `gA`.
    pub fn translate_left(&self, group: &FiniteGroup, g: Element) -> Result<GroupSubset> {
        self.check_group(group)?;
        let row = group.row(g);
        let mut out = Self::empty(self.order);
        for a in self.iter() {
            out.bits.insert(row[a] as usize);
        }
        Ok(out)
    }

    /// `Ag`.
    pub fn translate_right(&self, group: &FiniteGroup, g: Element) -> Result<GroupSubset> {
        self.check_group(group)?;
        let mut out = Self::empty(self.order);
        for a in self.iter() {
            out.bits.insert(group.mul(a, g));
        }
        Ok(out)
    }

    /// `A^{-1}`.
    pub fn inverse(&self, group: &FiniteGroup) -> Result<GroupSubset> {
        self.check_group(group)?;
        Ok(Self::from_predicate(self.order, |x| self.contains(group.inv(x))))
    }

    pub fn complement(&self) -> GroupSubset {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    pub fn intersect(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        Ok(out)
    }

    pub fn union(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        Ok(out)
    }

    pub fn difference(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        Ok(out)
    }

    pub fn symdiff(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits.symmetric_difference_with(&other.bits);
        Ok(out)
    }

    /// `|A △ B|`.
    pub fn symdiff_count(&self, other: &GroupSubset) -> Result<usize> {
        self.check(other)?;
        Ok(self.bits.symmetric_difference_count(&other.bits))
    }

    pub fn intersection_count(&self, other: &GroupSubset) -> Result<usize> {
        self.check(other)?;
        Ok(self.bits.intersection_count(&other.bits))
    }
}

/// True iff `s` is nonempty and closed under products and inverses.
pub fn is_subgroup(group: &FiniteGroup, s: &GroupSubset) -> bool {
    if s.order() != group.order() || !s.contains(IDENTITY) {
        return false;
    }
    let members = s.to_vec();
    members.iter().all(|&a| {
        s.contains(group.inv(a)) && {
            let row = group.row(a);
            members.iter().all(|&b| s.contains(row[b] as usize))
        }
    })
}

/// True iff `a` is a left coset `gH` of some subgroup `H` (equivalently a right coset).
pub fn is_coset(group: &FiniteGroup, a: &GroupSubset) -> bool {
    match a.min_element() {
        None => false,
        Some(g) => a
            .translate_left(group, group.inv(g))
            .map(|h| is_subgroup(group, &h))
            .unwrap_or(false),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    carrier: GroupSubset,
    index: usize,
}

impl Subgroup {
    pub fn new(group: &FiniteGroup, carrier: GroupSubset) -> Result<Subgroup> {
        if !is_subgroup(group, &carrier) {
            return Err(Error::NotSubgroup(format!("{:?}", carrier.to_vec())));
        }
        let index = group.order() / carrier.len();
        Ok(Subgroup { carrier, index })
    }

    /// Wraps `carrier` without checking the axioms. Meant for building
    /// corrupted reports in verifier tests.
    #[doc(hidden)]
    pub fn new_unchecked(group: &FiniteGroup, carrier: GroupSubset) -> Subgroup {
        let index = group.order() / carrier.len().max(1);
        Subgroup { carrier, index }
    }

    pub fn trivial(group: &FiniteGroup) -> Subgroup {
        Subgroup { carrier: GroupSubset::singleton(group.order(), IDENTITY), index: group.order() }
    }

    pub fn whole(group: &FiniteGroup) -> Subgroup {
        Subgroup { carrier: GroupSubset::full(group.order()), index: 1 }
    }

    /// Subgroup generated by `gens`.
    pub fn generated(group: &FiniteGroup, gens: &[Element]) -> Result<Subgroup> {
        let n = group.order();
        if let Some(&bad) = gens.iter().find(|&&g| g >= n) {
            return Err(Error::Precondition(format!("generator {bad} out of range")));
        }
        let mut carrier = GroupSubset::singleton(n, IDENTITY);
        let mut frontier = vec![IDENTITY];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = group.mul(x, g);
                if !carrier.contains(y) {
                    carrier.insert(y);
                    frontier.push(y);
                }
            }
        }
        Ok(Subgroup { index: n / carrier.len(), carrier })
    }

    pub fn carrier(&self) -> &GroupSubset {
        &self.carrier
    }

    pub fn into_carrier(self) -> GroupSubset {
        self.carrier
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: Element) -> bool {
        self.carrier.contains(x)
    }

    pub fn is_normal(&self, group: &FiniteGroup) -> bool {
        let members = self.carrier.to_vec();
        group
            .elements()
            .all(|g| members.iter().all(|&h| self.carrier.contains(group.conjugate(g, h))))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetDecomposition {
    pub subgroup: Subgroup,
    /// Least element of each left coset, ascending.
    pub reps: Vec<Element>,
    /// Position in `reps` of the coset containing each element.
    pub coset_of: Vec<usize>,
}

impl CosetDecomposition {
    pub fn coset(&self, group: &FiniteGroup, i: usize) -> GroupSubset {
        self.subgroup
            .carrier()
            .translate_left(group, self.reps[i])
            .expect("same group")
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Left cosets `gH`, each represented by its least element.
pub fn left_cosets(group: &FiniteGroup, h: &Subgroup) -> CosetDecomposition {
    let n = group.order();
    let members = h.carrier().to_vec();
    let mut coset_of = vec![usize::MAX; n];
    let mut reps = Vec::with_capacity(h.index());
    for g in 0..n {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let pos = reps.len();
        reps.push(g);
        for &x in &members {
            coset_of[group.mul(g, x)] = pos;
        }
    }
    CosetDecomposition { subgroup: h.clone(), reps, coset_of }
}

/// `⋂_g gHg^{-1}`.
pub fn normal_core(group: &FiniteGroup, h: &Subgroup) -> Subgroup {
    let n = group.order();
    let cosets = left_cosets(group, h);
    let mut core = h.carrier().clone();
    // gHg^{-1} depends only on the left coset gH.
    for &g in &cosets.reps {
        let gi = group.inv(g);
        for x in h.carrier().iter() {
            if core.contains(x) && !h.contains(group.mul(group.mul(gi, x), g)) {
                core.remove(x);
            }
        }
    }
    let index = n / core.len();
    Subgroup { carrier: core, index }
}

/// Every subgroup of `group`, found by closing over generated subgroups.
/// Intended for small orders in tests and oracles.
pub fn all_subgroups(group: &FiniteGroup) -> Vec<Subgroup> {
    let mut found: Vec<GroupSubset> = vec![GroupSubset::singleton(group.order(), IDENTITY)];
    let mut i = 0;
    while i < found.len() {
        let base = found[i].to_vec();
        for g in group.elements() {
            if found[i].contains(g) {
                continue;
            }
            let mut gens = base.clone();
            gens.push(g);
            let s = Subgroup::generated(group, &gens).expect("in range").into_carrier();
            if !found.contains(&s) {
                found.push(s);
            }
        }
        i += 1;
    }
    found.sort_by_key(|s| (s.len(), s.to_vec()));
    found
        .into_iter()
        .map(|c| Subgroup { index: group.order() / c.len(), carrier: c })
        .collect()
}
