//! Independent re-check of a [`RegularityReport`].
//!
//! Every claim is recomputed from the multiplication table with plain loops
//! over `Vec<bool>`; none of the set algebra, stabilizer or coset routines of
//! the pipeline are used.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;

use crate::group::{FiniteGroup, IDENTITY};
use crate::level::Level;
use crate::rational::{int, pow, ratio, Rational};
use crate::regularity::RegularityReport;
use crate::subset::GroupSubset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyLedger {
    pub checks: Vec<Check>,
}

impl VerifyLedger {
    pub(crate) fn record(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name, passed, detail: detail.into() });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn failed(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && !c.passed)
    }
}

fn members(s: &GroupSubset) -> Vec<bool> {
    (0..s.order()).map(|x| s.contains(x)).collect()
}

fn diff(expected: &[bool], got: &[bool]) -> String {
    let missing: Vec<usize> = (0..expected.len()).filter(|&i| expected[i] && !got[i]).collect();
    let extra: Vec<usize> = (0..expected.len()).filter(|&i| !expected[i] && got[i]).collect();
    format!("missing {missing:?}, extra {extra:?}")
}

/// `{x : |Ax △ A| ≤ level·|G|}`, by direct counting.
fn brute_stab(group: &FiniteGroup, a: &[bool], level: &Level) -> Option<Vec<bool>> {
    let n = group.order();
    (0..n)
        .map(|x| {
            let mut ax = alloc::vec![false; n];
            for y in 0..n {
                if a[y] {
                    ax[group.mul(y, x)] = true;
                }
            }
            let count = (0..n).filter(|&z| ax[z] != a[z]).count();
            level.cmp_rational(&ratio(count as u64, n as u64)).map(|o| o != Ordering::Less)
        })
        .collect()
}

fn subgroup_checks(ledger: &mut VerifyLedger, group: &FiniteGroup, h: &[bool], prefix: &'static [&'static str; 3]) {
    let n = group.order();
    ledger.record(prefix[0], h[IDENTITY], "identity membership");
    let mut bad_product = None;
    'outer: for x in 0..n {
        for y in 0..n {
            if h[x] && h[y] && !h[group.mul(x, y)] {
                bad_product = Some((x, y));
                break 'outer;
            }
        }
    }
    ledger.record(
        prefix[1],
        bad_product.is_none(),
        bad_product.map_or(String::new(), |(x, y)| format!("{x}·{y} = {} not in H", group.mul(x, y))),
    );
    let bad_inverse = (0..n).find(|&x| h[x] && !h[group.inv(x)]);
    ledger.record(prefix[2], bad_inverse.is_none(), bad_inverse.map_or(String::new(), |x| format!("{x}^-1 not in H")));
}

/// `count < m^-1·t·|H|` for a level `t`, `None` when undecidable.
fn below(level: &Level, count: usize, m: usize, h: usize) -> Option<bool> {
    level.cmp_rational(&ratio((count * m) as u64, h as u64)).map(|o| o == Ordering::Greater)
}

/// Recomputes every claim of `report` for `(group, a, epsilon)`.
pub fn verify_report(group: &FiniteGroup, a: &GroupSubset, epsilon: &Rational, report: &RegularityReport) -> VerifyLedger {
    let mut ledger = VerifyLedger::default();
    let n = group.order();
    if a.order() != n || report.h.carrier().order() != n || report.d.order() != n {
        ledger.record("orders", false, "report and group sizes differ");
        return ledger;
    }
    let a = members(a);
    let h = members(report.h.carrier());
    let d = members(&report.d);
    let hsize = h.iter().filter(|&&b| b).count();
    let eta = &report.eta.eta;

    subgroup_checks(&mut ledger, group, &h, &["h_identity", "h_closure", "h_inverse"]);
    if !ledger.all_passed() || hsize == 0 {
        return ledger;
    }
    let m = n / hsize;
    ledger.record(
        "index",
        m * hsize == n && report.index == m,
        format!("reported {}, recomputed {m}", report.index),
    );

    // H (or H_0) is Stab_η(A) = Stab_σ(η)(A)
    let stab_target = match &report.normal {
        Some(nl) => members(nl.h0.carrier()),
        None => h.clone(),
    };
    for (name, level) in [("stab_eta", eta), ("stab_sigma_eta", &report.eta.sigma_eta)] {
        match brute_stab(group, &a, level) {
            Some(s) => ledger.record(name, s == stab_target, diff(&s, &stab_target)),
            None => ledger.record(name, false, format!("level {level} undecidable against |G|-grid")),
        }
    }
    ledger.record(
        "eta_range",
        eta.cmp_rational(epsilon) != Some(Ordering::Greater) && report.eta.eta_ge_delta != Some(false),
        format!("η = {eta}, ε = {}", crate::rational::fraction_string(epsilon)),
    );

    // left cosets gH from the reported representatives
    let mut owner = alloc::vec![usize::MAX; n];
    let mut partition_ok = report.coset_classes.len() == m;
    for (i, c) in report.coset_classes.iter().enumerate() {
        for y in 0..n {
            if h[y] {
                let z = group.mul(c.rep, y);
                if owner[z] != usize::MAX {
                    partition_ok = false;
                }
                owner[z] = i;
            }
        }
    }
    partition_ok &= owner.iter().all(|&o| o != usize::MAX);
    ledger.record("coset_partition", partition_ok, format!("{} classes for index {m}", report.coset_classes.len()));
    if !partition_ok {
        return ledger;
    }
    let mut hits = alloc::vec![0usize; m];
    for x in 0..n {
        if a[x] {
            hits[owner[x]] += 1;
        }
    }
    let hits_ok = report.coset_classes.iter().zip(&hits).all(|(c, &h)| c.hits == h);
    ledger.record("coset_hits", hits_ok, format!("recomputed {hits:?}"));

    let mut dense_ok = true;
    let mut dich_eta = true;
    let mut dich_eps = true;
    for (c, &k) in report.coset_classes.iter().zip(&hits) {
        match (below(eta, k, m, hsize), below(eta, hsize - k, m, hsize)) {
            (Some(lo), Some(hi)) => {
                dense_ok &= c.dense == !lo;
                dich_eta &= lo || hi;
            }
            _ => {
                dense_ok = false;
                dich_eta = false;
            }
        }
        let thr = epsilon * int(hsize as u64);
        dich_eps &= int((k * m) as u64) < thr || int(((hsize - k) * m) as u64) < thr;
    }
    ledger.record("dense_rule", dense_ok, "dense iff |gH ∩ A| ≥ m^-1 η|H|");
    ledger.record("dichotomy_eta", dich_eta, "|gH ∩ A| or |gH ∖ A| below m^-1 η|H|");
    ledger.record("dichotomy_epsilon", dich_eps, "|gH ∩ A| or |gH ∖ A| below m^-1 ε|H|");

    let expected_d: Vec<bool> = (0..n).map(|x| report.coset_classes[owner[x]].dense).collect();
    ledger.record("d_dense_cosets", expected_d == d, diff(&expected_d, &d));
    let closed = (0..n).all(|x| !d[x] || (0..n).all(|y| !h[y] || d[group.mul(x, y)]));
    ledger.record("d_union_of_cosets", closed, "DH = D");

    let error = (0..n).filter(|&x| a[x] != d[x]).count();
    ledger.record(
        "error_count",
        error == report.error_count,
        format!("reported {}, recomputed {error}", report.error_count),
    );
    ledger.record(
        "error_bound",
        int(error as u64) < epsilon * int(hsize as u64),
        format!("|A △ D| = {error}, ε|H| = {}", crate::rational::fraction_string(&(epsilon * int(hsize as u64)))),
    );

    let k = report.k_used;
    let index_checked = match &report.normal {
        Some(nl) => nl.h0.index(),
        None => m,
    };
    let e = (k - 1) as u32;
    let bound_ok = eta
        .powi(e)
        .cmp_rational(&(pow(&int(30), e) / int(index_checked as u64)))
        .is_some_and(|o| o != Ordering::Greater);
    ledger.record("index_bound", bound_ok, format!("index {index_checked} against (30/η)^{e}"));

    if let Some(nl) = &report.normal {
        let h0 = members(nl.h0.carrier());
        subgroup_checks(&mut ledger, group, &h0, &["h0_identity", "h0_closure", "h0_inverse"]);
        let h0size = h0.iter().filter(|&&b| b).count();
        let normal = (0..n).all(|g| (0..n).all(|x| !h[x] || h[group.mul(group.mul(g, x), group.inv(g))]));
        ledger.record("h_normal", normal, "gHg^-1 = H for all g");
        let core: Vec<bool> = (0..n)
            .map(|x| (0..n).all(|g| h0[group.mul(group.mul(group.inv(g), x), g)]))
            .collect();
        ledger.record("h_core", core == h, diff(&core, &h));
        let m0 = if h0size == 0 { 0 } else { n / h0size };
        ledger.record("m0", m0 == nl.m0, format!("reported {}, recomputed {m0}", nl.m0));
        let fact: BigUint = (1..=m0 as u64).product();
        ledger.record("factorial_bound", BigUint::from(m) <= fact, format!("m = {m}, m0 = {m0}"));
    }
    ledger
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Caps;
    use crate::group::build_group;
    use crate::regularity::{decompose, decompose_normal, DecomposeOptions};
    use crate::subset::Subgroup;

    #[test]
    fn successful_reports_verify() {
        let caps = Caps::default();
        for spec in ["Z/12", "D/6", "Z/2xZ/6"] {
            let g = build_group(spec, &caps).unwrap();
            for mask in [0u64, 0b1, 0b1001, 0b10101010, 0b111, 0b111000111] {
                let a = GroupSubset::from_mask(12, mask);
                for eps in [ratio(1, 2), ratio(1, 4)] {
                    let r = decompose(&g, &a, &eps, &DecomposeOptions::default()).unwrap();
                    let l = verify_report(&g, &a, &eps, &r);
                    assert!(l.all_passed(), "{spec} {mask:b}: {:?}", l.failures());
                    let r = decompose_normal(&g, &a, &eps, &DecomposeOptions::default()).unwrap();
                    let l = verify_report(&g, &a, &eps, &r);
                    assert!(l.all_passed(), "{spec} {mask:b} normal: {:?}", l.failures());
                }
            }
        }
    }

    #[test]
    fn flipped_coset_is_caught() {
        let g = build_group("Z/12", &Caps::default()).unwrap();
        let a = GroupSubset::from_elements(12, [0, 4, 8]).unwrap();
        let eps = ratio(1, 4);
        let mut r = decompose(&g, &a, &eps, &DecomposeOptions::default()).unwrap();
        for x in [1, 5, 9] {
            r.d.toggle(x);
        }
        let l = verify_report(&g, &a, &eps, &r);
        assert!(l.failed("error_count"));
        assert!(l.failed("d_dense_cosets"));
        assert!(!l.failed("d_union_of_cosets"));
        r.d.toggle(1);
        assert!(verify_report(&g, &a, &eps, &r).failed("d_union_of_cosets"));
    }

    #[test]
    fn enlarged_subgroup_is_caught() {
        let g = build_group("Z/12", &Caps::default()).unwrap();
        let a = GroupSubset::from_elements(12, [0, 4, 8]).unwrap();
        let eps = ratio(1, 4);
        let mut r = decompose(&g, &a, &eps, &DecomposeOptions::default()).unwrap();
        let mut carrier = r.h.carrier().clone();
        carrier.insert(1);
        r.h = Subgroup::new_unchecked(&g, carrier);
        let l = verify_report(&g, &a, &eps, &r);
        assert!(l.failed("h_closure"));
    }
}
