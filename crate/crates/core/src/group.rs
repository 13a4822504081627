//! Finite groups as identity-anchored Cayley tables.
//!
//! Elements are dense indices `0..n` with the identity at `0`. Groups are
//! built from a small DSL (`Z/n`, `D/n`, `S/n`, `Q/8`, joined by `x` for
//! direct products) or from a raw multiplication table.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Caps;
use crate::error::{Error, Result};

/// Dense element index; the identity is always `0`.
pub type Element = usize;

pub const IDENTITY: Element = 0;

/// Seed for the sampled associativity check above the exhaustive cutoff.
const ASSOC_SEED: u64 = 0x5eed_a55c;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl FiniteGroup {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.mul[a * self.order + b] as Element
    }

    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        self.inv[a] as Element
    }

    pub fn elements(&self) -> core::ops::Range<Element> {
        0..self.order
    }

    /// Row `a` of the multiplication table.
    pub fn row(&self, a: Element) -> &[u32] {
        &self.mul[a * self.order..(a + 1) * self.order]
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn conjugate(&self, g: Element, x: Element) -> Element {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Validates a raw table: Latin square, two-sided identity at some index
    /// (relabelled to `0`), inverses, and associativity per `caps`.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<usize>>, caps: &Caps) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if n > caps.max_order {
            return Err(Error::OrderCap { order: n as u128, cap: caps.max_order });
        }
        if let Some((i, row)) = table.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidTable(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if let Some(&bad) = table.iter().flatten().find(|&&v| v >= n) {
            return Err(Error::InvalidTable(format!("entry {bad} out of range 0..{n}")));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidTable("no two-sided identity".into()))?;
        // Swap labels e <-> 0 so the identity sits at index 0.
        let relabel = |x: usize| if x == e { 0 } else if x == 0 { e } else { x };
        let mut flat = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[relabel(a) * n + relabel(b)] = relabel(table[a][b]) as u32;
            }
        }
        Self::from_flat(name.into(), n, flat, caps)
    }

    fn from_flat(name: String, n: usize, mul: Vec<u32>, caps: &Caps) -> Result<Self> {
        let mut seen = vec![false; n];
        for a in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for b in 0..n {
                let v = mul[a * n + b] as usize;
                if core::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidTable(format!("row {a} repeats {v}")));
                }
            }
        }
        for b in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for a in 0..n {
                let v = mul[a * n + b] as usize;
                if core::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidTable(format!("column {b} repeats {v}")));
                }
            }
        }
        if (0..n).any(|x| mul[x] as usize != x || mul[x * n] as usize != x) {
            return Err(Error::InvalidTable("element 0 is not the identity".into()));
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| mul[a * n + b] == 0)
                .expect("Latin square row contains the identity");
            if mul[b * n + a] != 0 {
                return Err(Error::InvalidTable(format!("element {a} has no two-sided inverse")));
            }
            inv[a] = b as u32;
        }
        let group = FiniteGroup { name, order: n, mul, inv };
        group.check_associativity(caps)?;
        Ok(group)
    }

    fn check_associativity(&self, caps: &Caps) -> Result<()> {
        let n = self.order;
        let fail = |a, b, c| Err(Error::InvalidTable(format!("not associative at ({a}, {b}, {c})")));
        if n <= caps.full_assoc_order {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    let row_ab = self.row(ab);
                    let row_b = self.row(b);
                    let row_a = self.row(a);
                    for c in 0..n {
                        if row_ab[c] != row_a[row_b[c] as usize] {
                            return fail(a, b, c);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(ASSOC_SEED);
            for _ in 0..caps.assoc_samples {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                    return fail(a, b, c);
                }
            }
        }
        Ok(())
    }

    /// Applies a relabelling `perm` (a bijection of `0..n` fixing `0`).
    pub fn relabel(&self, perm: &[Element]) -> Result<FiniteGroup> {
        let n = self.order;
        if perm.len() != n || perm[0] != 0 {
            return Err(Error::Precondition("relabelling must be a permutation fixing 0".into()));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || core::mem::replace(&mut seen[p], true) {
                return Err(Error::Precondition("relabelling is not a permutation".into()));
            }
        }
        let mut mul = vec![0u32; n * n];
        let mut inv = vec![0u32; n];
        for a in 0..n {
            inv[perm[a]] = perm[self.inv(a)] as u32;
            for b in 0..n {
                mul[perm[a] * n + perm[b]] = perm[self.mul(a, b)] as u32;
            }
        }
        Ok(FiniteGroup { name: format!("{}'", self.name), order: n, mul, inv })
    }

    /// Direct product; the pair `(a, b)` gets index `a * |H| + b`.
    pub fn product(&self, other: &FiniteGroup, caps: &Caps) -> Result<FiniteGroup> {
        let (n1, n2) = (self.order, other.order);
        let n = n1
            .checked_mul(n2)
            .filter(|&n| n <= caps.max_order)
            .ok_or(Error::OrderCap { order: n1 as u128 * n2 as u128, cap: caps.max_order })?;
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            let (a1, a2) = (a / n2, a % n2);
            for b in 0..n {
                let (b1, b2) = (b / n2, b % n2);
                mul[a * n + b] = (self.mul(a1, b1) * n2 + other.mul(a2, b2)) as u32;
            }
        }
        let inv = (0..n)
            .map(|a| (self.inv(a / n2) * n2 + other.inv(a % n2)) as u32)
            .collect();
        // Factors are already verified; a product of groups is a group.
        Ok(FiniteGroup { name: format!("{}x{}", self.name, other.name), order: n, mul, inv })
    }

    pub fn cyclic(n: usize, caps: &Caps) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::Parse("Z/0 is not a finite group".into()));
        }
        check_cap(n as u128, caps)?;
        let mul = (0..n * n).map(|i| ((i / n + i % n) % n) as u32).collect();
        let inv = (0..n).map(|a| ((n - a) % n) as u32).collect();
        Ok(FiniteGroup { name: format!("Z/{n}"), order: n, mul, inv })
    }

    /// Dihedral group of order `2n`: `r^i` is index `i`, `r^i s` is `n + i`.
    pub fn dihedral(n: usize, caps: &Caps) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::Parse("D/0 is not a finite group".into()));
        }
        check_cap(2 * n as u128, caps)?;
        let order = 2 * n;
        let decode = |x: usize| (x % n, x / n);
        let encode = |i: usize, s: usize| s * n + i;
        let mut mul = vec![0u32; order * order];
        for a in 0..order {
            let (i, s) = decode(a);
            for b in 0..order {
                let (j, t) = decode(b);
                // r^i s^s · r^j s^t = r^(i ± j) s^(s+t)
                let rot = if s == 0 { (i + j) % n } else { (i + n - j) % n };
                mul[a * order + b] = encode(rot, (s + t) % 2) as u32;
            }
        }
        let inv = (0..order)
            .map(|a| {
                let (i, s) = decode(a);
                (if s == 0 { encode((n - i) % n, 0) } else { a }) as u32
            })
            .collect();
        Ok(FiniteGroup { name: format!("D/{n}"), order, mul, inv })
    }

    /// Symmetric group on `n` points, elements in lexicographic order of
    /// their one-line notation; `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(n: usize, caps: &Caps) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::Parse("S/0 is not supported".into()));
        }
        let order = (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i));
        let order = order.ok_or(Error::OrderCap { order: u128::MAX, cap: caps.max_order })?;
        check_cap(order, caps)?;
        let order = order as usize;
        let perms: Vec<Vec<u8>> = (0..order).map(|r| unrank_permutation(r, n)).collect();
        let mut mul = vec![0u32; order * order];
        let mut composed = vec![0u8; n];
        for (a, pa) in perms.iter().enumerate() {
            for (b, pb) in perms.iter().enumerate() {
                for i in 0..n {
                    composed[i] = pa[pb[i] as usize];
                }
                mul[a * order + b] = rank_permutation(&composed) as u32;
            }
        }
        let mut inverse = vec![0u8; n];
        let inv = perms
            .iter()
            .map(|p| {
                for (i, &v) in p.iter().enumerate() {
                    inverse[v as usize] = i as u8;
                }
                rank_permutation(&inverse) as u32
            })
            .collect();
        Ok(FiniteGroup { name: format!("S/{n}"), order, mul, inv })
    }

    /// Quaternion group: index `2u + s` is `(-1)^s · unit[u]` with units `1, i, j, k`.
    pub fn quaternion(caps: &Caps) -> Result<FiniteGroup> {
        check_cap(8, caps)?;
        // unit product as (sign, unit)
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let mut mul = vec![0u32; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (sign, unit) = UNIT[a / 2][b / 2];
                mul[a * 8 + b] = (2 * unit + (sign + a % 2 + b % 2) % 2) as u32;
            }
        }
        let inv = (0..8)
            .map(|a: usize| (if a / 2 == 0 { a } else { a ^ 1 }) as u32)
            .collect();
        Ok(FiniteGroup { name: "Q/8".to_string(), order: 8, mul, inv })
    }
}

fn check_cap(order: u128, caps: &Caps) -> Result<()> {
    if order > caps.max_order as u128 {
        Err(Error::OrderCap { order, cap: caps.max_order })
    } else {
        Ok(())
    }
}

fn unrank_permutation(mut rank: usize, n: usize) -> Vec<u8> {
    let mut pool: Vec<u8> = (0..n as u8).collect();
    let mut fact: usize = (1..n).product();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let idx = rank / fact.max(1);
        rank %= fact.max(1);
        out.push(pool.remove(idx));
        if n - 1 - i > 0 {
            fact /= n - 1 - i;
        }
    }
    out
}

fn rank_permutation(p: &[u8]) -> usize {
    let n = p.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&v| v < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// Builds a group from the DSL: factors `Z/n`, `D/n`, `S/n`, `Q/8` joined by `x`.
pub fn build_group(spec: &str, caps: &Caps) -> Result<FiniteGroup> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::Parse("empty group spec".into()));
    }
    // Reject oversized products before materializing any factor.
    let mut factors = Vec::new();
    let mut order: u128 = 1;
    for raw in spec.split('x') {
        let factor = parse_factor(raw.trim())?;
        order = order.saturating_mul(factor.order());
        check_cap(order, caps)?;
        factors.push(factor);
    }
    let mut iter = factors.into_iter();
    let mut group = iter.next().expect("nonempty").build(caps)?;
    for factor in iter {
        group = group.product(&factor.build(caps)?, caps)?;
    }
    Ok(group)
}

#[derive(Clone, Copy, Debug)]
enum Factor {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Quaternion,
}

impl Factor {
    fn order(self) -> u128 {
        match self {
            Factor::Cyclic(n) => n as u128,
            Factor::Dihedral(n) => 2 * n as u128,
            Factor::Symmetric(n) => (1..=n as u128).try_fold(1u128, |a, i| a.checked_mul(i)).unwrap_or(u128::MAX),
            Factor::Quaternion => 8,
        }
    }

    fn build(self, caps: &Caps) -> Result<FiniteGroup> {
        match self {
            Factor::Cyclic(n) => FiniteGroup::cyclic(n, caps),
            Factor::Dihedral(n) => FiniteGroup::dihedral(n, caps),
            Factor::Symmetric(n) => FiniteGroup::symmetric(n, caps),
            Factor::Quaternion => FiniteGroup::quaternion(caps),
        }
    }
}

fn parse_factor(s: &str) -> Result<Factor> {
    let (kind, n) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("expected KIND/n, got {s:?}")))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad size in {s:?}")))?;
    if n == 0 {
        return Err(Error::Parse(format!("size must be positive in {s:?}")));
    }
    match kind.trim() {
        "Z" => Ok(Factor::Cyclic(n)),
        "D" => Ok(Factor::Dihedral(n)),
        "S" => Ok(Factor::Symmetric(n)),
        "Q" if n == 8 => Ok(Factor::Quaternion),
        "Q" => Err(Error::Parse(format!("only Q/8 is supported, got {s:?}"))),
        other => Err(Error::Parse(format!("unknown group kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    fn pow(g: &FiniteGroup, x: Element, e: usize) -> Element {
        (0..e).fold(IDENTITY, |acc, _| g.mul(acc, x))
    }

    #[test]
    fn cyclic_six() {
        let g = build_group("Z/6", &caps()).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.mul(4, 5), 3);
        assert_eq!(g.inv(2), 4);
        assert!(g.is_abelian());
    }

    #[test]
    fn dihedral_four_has_order_eight_and_is_nonabelian() {
        let g = build_group("D/4", &caps()).unwrap();
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        // five involutions: r^2 and four reflections
        let involutions = g.elements().filter(|&x| x != 0 && g.mul(x, x) == 0).count();
        assert_eq!(involutions, 5);
    }

    #[test]
    fn small_dihedral_groups_are_degenerate_but_valid() {
        assert_eq!(build_group("D/1", &caps()).unwrap().order(), 2);
        let klein = build_group("D/2", &caps()).unwrap();
        assert!(klein.is_abelian());
        assert!(klein.elements().all(|x| klein.mul(x, x) == 0));
    }

    #[test]
    fn product_exponent() {
        let g = build_group("Z/2xZ/3", &caps()).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.elements().all(|x| pow(&g, x, 6) == IDENTITY));
        assert!(g.elements().any(|x| (1..6).all(|e| pow(&g, x, e) != IDENTITY)));
    }

    #[test]
    fn symmetric_three_and_quaternion() {
        let s3 = build_group("S/3", &caps()).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        let q = build_group("Q/8", &caps()).unwrap();
        assert_eq!(q.order(), 8);
        // unique involution -1
        let involutions: Vec<_> = q.elements().filter(|&x| x != 0 && q.mul(x, x) == 0).collect();
        assert_eq!(involutions, vec![1]);
        assert!(!q.is_abelian());
    }

    #[test]
    fn parse_and_cap_errors() {
        assert!(matches!(build_group("", &caps()), Err(Error::Parse(_))));
        assert!(matches!(build_group("Y/3", &caps()), Err(Error::Parse(_))));
        assert!(matches!(build_group("Z/0", &caps()), Err(Error::Parse(_))));
        assert!(matches!(build_group("Q/4", &caps()), Err(Error::Parse(_))));
        assert!(matches!(build_group("Z/100xZ/100", &caps()), Err(Error::OrderCap { .. })));
        assert!(matches!(build_group("S/8", &caps()), Err(Error::OrderCap { .. })));
    }

    #[test]
    fn tables_are_validated_and_relabelled() {
        // Z/3 with the identity stored at index 2.
        let t = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = FiniteGroup::from_table("t", t, &caps()).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.mul(0, 1), 1);
        let bad = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::from_table("bad", bad, &caps()).is_err());
        // Latin square with identity but not associative (order 5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_table("loop", loop5, &caps()).is_err());
    }

    #[test]
    fn permutation_ranking_round_trips() {
        for r in 0..24 {
            assert_eq!(rank_permutation(&unrank_permutation(r, 4)), r);
        }
        assert_eq!(unrank_permutation(0, 4), vec![0, 1, 2, 3]);
    }
}
