//! The groups covered by the exhaustive suites.

use stabreg_core::{build_group, Caps, FiniteGroup, Result};

/// One DSL name per isomorphism type the DSL can express up to order 16, plus
/// `S/3` next to `D/3`: cyclic groups, non-cyclic abelian groups in
/// invariant-factor form, dihedral groups, `Q/8`, `Z/2xD/4` and `Z/2xQ/8`.
const CATALOG: &[(usize, &str)] = &[
    (1, "Z/1"),
    (2, "Z/2"),
    (3, "Z/3"),
    (4, "Z/4"),
    (4, "Z/2xZ/2"),
    (5, "Z/5"),
    (6, "Z/6"),
    (6, "D/3"),
    (6, "S/3"),
    (7, "Z/7"),
    (8, "Z/8"),
    (8, "Z/2xZ/4"),
    (8, "Z/2xZ/2xZ/2"),
    (8, "D/4"),
    (8, "Q/8"),
    (9, "Z/9"),
    (9, "Z/3xZ/3"),
    (10, "Z/10"),
    (10, "D/5"),
    (11, "Z/11"),
    (12, "Z/12"),
    (12, "Z/2xZ/6"),
    (12, "D/6"),
    (13, "Z/13"),
    (14, "Z/14"),
    (14, "D/7"),
    (15, "Z/15"),
    (16, "Z/16"),
    (16, "Z/2xZ/8"),
    (16, "Z/4xZ/4"),
    (16, "Z/2xZ/2xZ/4"),
    (16, "Z/2xZ/2xZ/2xZ/2"),
    (16, "D/8"),
    (16, "Z/2xD/4"),
    (16, "Z/2xQ/8"),
];

/// DSL names of catalog groups with order in `min..=max`.
pub fn group_names(min: usize, max: usize) -> Vec<&'static str> {
    CATALOG
        .iter()
        .filter(|(n, _)| (min..=max).contains(n))
        .map(|&(_, s)| s)
        .collect()
}

pub fn groups(min: usize, max: usize, caps: &Caps) -> Result<Vec<FiniteGroup>> {
    group_names(min, max).into_iter().map(|s| build_group(s, caps)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_match_names() {
        let caps = Caps::default();
        for &(n, s) in CATALOG {
            assert_eq!(build_group(s, &caps).unwrap().order(), n, "{s}");
        }
        assert_eq!(group_names(16, 16).len(), 8);
        assert!(group_names(17, 20).is_empty());
    }
}
