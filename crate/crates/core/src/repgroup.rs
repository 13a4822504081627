//! Groups given by a multiplication rule on opaque elements, possibly
//! infinite, and finite sets of their elements.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, IDENTITY};

pub trait RepGroup {
    type Elem: Clone + Ord + Debug;

    fn name(&self) -> String;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Integer-tuple form used for serialization.
    fn encode(&self, a: &Self::Elem) -> Vec<i64>;
    fn decode(&self, v: &[i64]) -> Result<Self::Elem>;
    /// `Some(|G|)` for finite groups.
    fn finite_order(&self) -> Option<usize> {
        None
    }
}

/// A finite collection of group elements with set semantics.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ElementSet<E: Ord> {
    items: BTreeSet<E>,
}

impl<E: Clone + Ord> ElementSet<E> {
    pub fn new() -> Self {
        ElementSet { items: BTreeSet::new() }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, e: &E) -> bool {
        self.items.contains(e)
    }

    pub fn insert(&mut self, e: E) -> bool {
        self.items.insert(e)
    }

    pub fn remove(&mut self, e: &E) -> bool {
        self.items.remove(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &E> + '_ {
        self.items.iter()
    }

    pub fn to_vec(&self) -> Vec<E> {
        self.items.iter().cloned().collect()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.items.is_subset(&other.items)
    }

    pub fn union(&self, other: &Self) -> Self {
        ElementSet { items: self.items.union(&other.items).cloned().collect() }
    }

    pub fn symdiff_count(&self, other: &Self) -> usize {
        self.items.symmetric_difference(&other.items).count()
    }

    pub fn intersection_count(&self, other: &Self) -> usize {
        self.items.intersection(&other.items).count()
    }
}

impl<E: Clone + Ord> Default for ElementSet<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E: Clone + Ord> FromIterator<E> for ElementSet<E> {
    fn from_iter<I: IntoIterator<Item = E>>(iter: I) -> Self {
        ElementSet { items: iter.into_iter().collect() }
    }
}

impl<E: Clone + Ord> IntoIterator for ElementSet<E> {
    type Item = E;
    type IntoIter = alloc::collections::btree_set::IntoIter<E>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

fn arity(v: &[i64], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::Parse(format!("{what} element needs {n} coordinates, got {}", v.len())));
    }
    Ok(())
}

impl RepGroup for FiniteGroup {
    type Elem = Element;

    fn name(&self) -> String {
        String::from(FiniteGroup::name(self))
    }

    fn identity(&self) -> Element {
        IDENTITY
    }

    fn mul(&self, a: &Element, b: &Element) -> Element {
        FiniteGroup::mul(self, *a, *b)
    }

    fn inv(&self, a: &Element) -> Element {
        FiniteGroup::inv(self, *a)
    }

    fn encode(&self, a: &Element) -> Vec<i64> {
        alloc::vec![*a as i64]
    }

    fn decode(&self, v: &[i64]) -> Result<Element> {
        arity(v, 1, "finite group")?;
        usize::try_from(v[0])
            .ok()
            .filter(|&x| x < self.order())
            .ok_or_else(|| Error::Parse(format!("element {} out of range", v[0])))
    }

    fn finite_order(&self) -> Option<usize> {
        Some(self.order())
    }
}

/// `ℤ^d` under addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    pub dim: usize,
}

impl RepGroup for IntegerLattice {
    type Elem = Vec<i64>;

    fn name(&self) -> String {
        format!("Z^{}", self.dim)
    }

    fn identity(&self) -> Vec<i64> {
        alloc::vec![0; self.dim]
    }

    fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inv(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn encode(&self, a: &Vec<i64>) -> Vec<i64> {
        a.clone()
    }

    fn decode(&self, v: &[i64]) -> Result<Vec<i64>> {
        arity(v, self.dim, "lattice")?;
        Ok(v.to_vec())
    }
}

/// `ℤ^d × F` for a finite group `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeTimesFinite {
    pub dim: usize,
    pub finite: FiniteGroup,
}

impl RepGroup for LatticeTimesFinite {
    type Elem = (Vec<i64>, Element);

    fn name(&self) -> String {
        format!("Z^{}x{}", self.dim, self.finite.name())
    }

    fn identity(&self) -> Self::Elem {
        (alloc::vec![0; self.dim], IDENTITY)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect(), self.finite.mul(a.1, b.1))
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        (a.0.iter().map(|x| -x).collect(), self.finite.inv(a.1))
    }

    fn encode(&self, a: &Self::Elem) -> Vec<i64> {
        let mut v = a.0.clone();
        v.push(a.1 as i64);
        v
    }

    fn decode(&self, v: &[i64]) -> Result<Self::Elem> {
        arity(v, self.dim + 1, "lattice-times-finite")?;
        let f = RepGroup::decode(&self.finite, &v[self.dim..])?;
        Ok((v[..self.dim].to_vec(), f))
    }
}

/// Upper unitriangular 3×3 integer matrices; `(a, b, c)` has `a, b` above the
/// diagonal and `c` in the corner, so `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Heisenberg;

impl RepGroup for Heisenberg {
    type Elem = [i64; 3];

    fn name(&self) -> String {
        "H(Z)".into()
    }

    fn identity(&self) -> [i64; 3] {
        [0, 0, 0]
    }

    fn mul(&self, x: &[i64; 3], y: &[i64; 3]) -> [i64; 3] {
        [x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]]
    }

    fn inv(&self, x: &[i64; 3]) -> [i64; 3] {
        [-x[0], -x[1], -x[2] + x[0] * x[1]]
    }

    fn encode(&self, a: &[i64; 3]) -> Vec<i64> {
        a.to_vec()
    }

    fn decode(&self, v: &[i64]) -> Result<[i64; 3]> {
        arity(v, 3, "Heisenberg")?;
        Ok([v[0], v[1], v[2]])
    }
}

/// The Heisenberg group with entries in `ℤ/n`, coordinates kept in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeisenbergMod {
    pub n: i64,
}

impl HeisenbergMod {
    pub fn new(n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Parse(format!("modulus must be positive, got {n}")));
        }
        Ok(HeisenbergMod { n })
    }

    fn reduce(&self, x: i64) -> i64 {
        x.rem_euclid(self.n)
    }
}

impl RepGroup for HeisenbergMod {
    type Elem = [i64; 3];

    fn name(&self) -> String {
        format!("H(Z/{})", self.n)
    }

    fn identity(&self) -> [i64; 3] {
        [0, 0, 0]
    }

    fn mul(&self, x: &[i64; 3], y: &[i64; 3]) -> [i64; 3] {
        [
            self.reduce(x[0] + y[0]),
            self.reduce(x[1] + y[1]),
            self.reduce(x[2] + y[2] + x[0] * y[1]),
        ]
    }

    fn inv(&self, x: &[i64; 3]) -> [i64; 3] {
        [self.reduce(-x[0]), self.reduce(-x[1]), self.reduce(-x[2] + x[0] * x[1])]
    }

    fn encode(&self, a: &[i64; 3]) -> Vec<i64> {
        a.to_vec()
    }

    fn decode(&self, v: &[i64]) -> Result<[i64; 3]> {
        arity(v, 3, "Heisenberg")?;
        Ok([self.reduce(v[0]), self.reduce(v[1]), self.reduce(v[2])])
    }

    fn finite_order(&self) -> Option<usize> {
        usize::try_from(self.n).ok().and_then(|n| n.checked_pow(3))
    }
}
