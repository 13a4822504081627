//! `Stab_κ(A)` as an explicit union of intersections of left translates
//! `g_i A` and their complements.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup};
use crate::level::Level;
use crate::rational::{binomial_prefix_sum, floor_to_biguint, fraction_string, int, ratio, Rational};
use crate::regularity::{decompose, decompose_normal, DecomposeOptions, RegularityReport};
use crate::setsys::{approximation_discrepancy, epsilon_approximation, translates_system, vc_dimension, vca_length_cap, Side, SetSystem};
use crate::stability::stability_index;
use crate::stabilizer::{stab_counts, stab_set_from_counts};
use crate::subset::{left_cosets, GroupSubset};

/// `X_i = g_i A` or, when `complemented`, `G ∖ g_i A`; this is the set `Z_{a_i}`
/// with `g_i = a_i^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub source: Element,
    pub element: Element,
    /// `a_i ∈ A`.
    pub complemented: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VcSource {
    Exact,
    /// `stability_index − 1`.
    StabilityBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnfFormula {
    /// The set `A` the literals translate.
    pub base: GroupSubset,
    pub literals: Vec<Literal>,
    /// Each clause lists the `i` with `x ∈ Z_{a_i}`; all other literals enter
    /// complemented. Lexicographic order.
    pub clauses: Vec<Vec<usize>>,
    pub kappa: Rational,
    pub lambda: Rational,
    pub theta: Rational,
    /// `Av_ā` is within `θ` of every density in `{Ax △ A}`.
    pub discrepancy: Rational,
    pub vc_r: usize,
    pub vc_source: VcSource,
    /// `10·VC_r(A)`.
    pub d: usize,
    /// `Σ_{j ≤ ⌊(λ+θ)n⌋} C(n, j)`.
    pub clause_bound: BigUint,
    pub length_cap: BigUint,
}

impl DnfFormula {
    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Set-builder text, one clause per line.
    pub fn render(&self) -> String {
        if self.clauses.is_empty() {
            return "∅".into();
        }
        let lit = |i: usize, positive: bool| {
            let l = &self.literals[i];
            if positive != l.complemented {
                format!("{}A", l.element)
            } else {
                format!("G∖{}A", l.element)
            }
        };
        self.clauses
            .iter()
            .map(|c| {
                let parts: Vec<String> = (0..self.literals.len()).map(|i| lit(i, c.binary_search(&i).is_ok())).collect();
                if parts.is_empty() {
                    "G".into()
                } else {
                    parts.join(" ∩ ")
                }
            })
            .collect::<Vec<_>>()
            .join("\n∪ ")
    }
}

fn literal_set(group: &FiniteGroup, base: &GroupSubset, l: &Literal) -> Result<GroupSubset> {
    let t = base.translate_left(group, l.element)?;
    Ok(if l.complemented { t.complement() } else { t })
}

/// Exact evaluation: `⋃_σ (⋂_{i∈σ} Z_i ∩ ⋂_{i∉σ} G∖Z_i)`.
pub fn evaluate_dnf(group: &FiniteGroup, f: &DnfFormula) -> Result<GroupSubset> {
    let z = f
        .literals
        .iter()
        .map(|l| literal_set(group, &f.base, l))
        .collect::<Result<Vec<_>>>()?;
    let mut out = GroupSubset::empty(group.order());
    for clause in &f.clauses {
        let mut y = GroupSubset::full(group.order());
        for (i, zi) in z.iter().enumerate() {
            y = if clause.binary_search(&i).is_ok() { y.intersect(zi)? } else { y.difference(zi)? };
        }
        out = out.union(&y)?;
    }
    Ok(out)
}

/// `VC_r(A)` exactly when the ground set is within the cap, else
/// `stability_index − 1`.
pub fn vc_r_bound(group: &FiniteGroup, a: &GroupSubset, caps: &Caps) -> Result<(usize, VcSource)> {
    match vc_dimension(&translates_system(group, a, Side::Right), None, caps) {
        Ok(c) => Ok((c.dimension, VcSource::Exact)),
        Err(Error::CapExceeded(_)) => Ok((stability_index(group, a, caps)?.saturating_sub(1), VcSource::StabilityBound)),
        Err(e) => Err(e),
    }
}

/// `{Ax △ A : x ∈ G}` over `G`.
fn stabilizer_system(group: &FiniteGroup, a: &GroupSubset) -> SetSystem {
    let sets = group
        .elements()
        .map(|x| a.translate_right(group, x).and_then(|ax| ax.symdiff(a)).expect("same group").bits().clone())
        .collect();
    SetSystem { ground: group.order(), sets, labels: Some(group.elements().collect()) }
}

pub fn stab_dnf(group: &FiniteGroup, a: &GroupSubset, kappa: &Rational, lambda: &Rational, seed: u64, caps: &Caps) -> Result<DnfFormula> {
    if a.order() != group.order() {
        return Err(Error::GroupMismatch { left: group.order(), right: a.order() });
    }
    if !lambda.is_positive() || lambda >= kappa || *kappa >= Rational::one() {
        return Err(Error::Precondition(format!(
            "need 0 < λ < κ < 1, got κ = {}, λ = {}",
            fraction_string(kappa),
            fraction_string(lambda)
        )));
    }
    let n_g = group.order();
    let counts = stab_counts(group, a);
    let target = stab_set_from_counts(&counts, n_g, kappa);
    if stab_set_from_counts(&counts, n_g, lambda) != target {
        return Err(Error::Precondition(format!(
            "Stab_κ(A) ≠ Stab_λ(A) for κ = {}, λ = {}",
            fraction_string(kappa),
            fraction_string(lambda)
        )));
    }
    let theta = (kappa - lambda) / int(2);
    let (vc_r, vc_source) = vc_r_bound(group, a, caps)?;
    let d = 10 * vc_r;
    let system = stabilizer_system(group, a);
    let tuple = epsilon_approximation(&system, &theta, d, seed, caps)?;
    let discrepancy = approximation_discrepancy(&system, &tuple);
    if discrepancy > theta {
        return Err(Error::Internal("ε-approximation exceeds its accuracy".into()));
    }
    let length_cap = vca_length_cap(&theta, d, caps.vca_constant);
    let n = tuple.len();
    if BigUint::from(n) > length_cap {
        return Err(Error::BoundViolated {
            what: "ε-approximation length",
            observed: format!("{n}"),
            bound: format!("{length_cap}"),
        });
    }

    let literals: Vec<Literal> = tuple
        .iter()
        .map(|&s| Literal { source: s, element: group.inv(s), complemented: a.contains(s) })
        .collect();
    let z = literals
        .iter()
        .map(|l| literal_set(group, a, l))
        .collect::<Result<Vec<_>>>()?;
    // |σ|/n ≤ λ + θ
    let limit = floor_to_biguint(&((lambda + &theta) * int(n as u64)));
    let limit = limit.to_usize().unwrap_or(usize::MAX);
    // Only patterns realized by some x give nonempty clauses.
    let clauses: BTreeSet<Vec<usize>> = group
        .elements()
        .map(|x| (0..n).filter(|&i| z[i].contains(x)).collect::<Vec<usize>>())
        .filter(|sigma| sigma.len() <= limit)
        .collect();
    let clause_bound = binomial_prefix_sum(n as u64, limit as u64);
    let formula = DnfFormula {
        base: a.clone(),
        literals,
        clauses: clauses.into_iter().collect(),
        kappa: kappa.clone(),
        lambda: lambda.clone(),
        theta,
        discrepancy,
        vc_r,
        vc_source,
        d,
        clause_bound,
        length_cap,
    };
    if BigUint::from(formula.clauses.len()) > formula.clause_bound {
        return Err(Error::BoundViolated {
            what: "clause count",
            observed: format!("{}", formula.clauses.len()),
            bound: format!("{}", formula.clause_bound),
        });
    }
    let value = evaluate_dnf(group, &formula)?;
    if value != target {
        return Err(Error::TheoremViolation(format!(
            "formula evaluates to {:?}, Stab_κ(A) is {:?}",
            value.to_vec(),
            target.to_vec()
        )));
    }
    Ok(formula)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaPair {
    pub kappa: Rational,
    pub lambda: Rational,
    /// False when `σ(η)` was too small to hold exactly and `λ` was replaced by
    /// a rational with the same stabilizer.
    pub lambda_is_sigma_eta: bool,
    pub k: u64,
}

/// `λ = σ(η)` when exact. Otherwise `σ(η) < 2^-65536 < 1/|G|`, so
/// `Stab_σ(η) = Stab_0`, and any `λ < min(η, 1/|G|)` has the same stabilizer.
fn pair_from_report(group: &FiniteGroup, report: &RegularityReport) -> Result<EtaPair> {
    let kappa = report
        .eta
        .eta
        .as_exact()
        .cloned()
        .ok_or_else(|| Error::Precision(format!("η = {} is not exact", report.eta.eta)))?;
    let (lambda, exact) = match &report.eta.sigma_eta {
        Level::Exact(r) => (r.clone(), true),
        _ => {
            let cap = ratio(1, group.order() as u64).min(kappa.clone());
            (cap / int(2), false)
        }
    };
    Ok(EtaPair { kappa, lambda, lambda_is_sigma_eta: exact, k: report.k_used })
}

/// `(η, η^{4k})` from the decomposition's η-search.
pub fn eta_pair_for_dnf(group: &FiniteGroup, a: &GroupSubset, epsilon: &Rational, opts: &DecomposeOptions) -> Result<EtaPair> {
    pair_from_report(group, &decompose(group, a, epsilon, opts)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinedSubgroup {
    pub report: RegularityReport,
    pub pair: EtaPair,
    pub formula: DnfFormula,
}

/// The subgroup of the decomposition together with a formula defining it.
pub fn define_subgroup(group: &FiniteGroup, a: &GroupSubset, epsilon: &Rational, opts: &DecomposeOptions, seed: u64) -> Result<DefinedSubgroup> {
    let report = decompose(group, a, epsilon, opts)?;
    let pair = pair_from_report(group, &report)?;
    let formula = stab_dnf(group, a, &pair.kappa, &pair.lambda, seed, &opts.caps)?;
    if evaluate_dnf(group, &formula)? != *report.h.carrier() {
        return Err(Error::Internal("formula does not define H".into()));
    }
    Ok(DefinedSubgroup { report, pair, formula })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalDefinition {
    pub report: RegularityReport,
    pub pair: EtaPair,
    /// Defines `H_0`.
    pub formula: DnfFormula,
    /// Representatives `g` of the left cosets of `H_0`; `H = ⋂ g H_0 g^-1`.
    pub conjugators: Vec<Element>,
}

/// The normal variant: a formula for `H_0` and the conjugators whose
/// intersection of conjugates is `H`.
pub fn define_normal_subgroup(group: &FiniteGroup, a: &GroupSubset, epsilon: &Rational, opts: &DecomposeOptions, seed: u64) -> Result<NormalDefinition> {
    let report = decompose_normal(group, a, epsilon, opts)?;
    let pair = pair_from_report(group, &report)?;
    let formula = stab_dnf(group, a, &pair.kappa, &pair.lambda, seed, &opts.caps)?;
    let nl = report.normal.as_ref().ok_or_else(|| Error::Internal("missing normal ledger".into()))?;
    let h0 = evaluate_dnf(group, &formula)?;
    if h0 != *nl.h0.carrier() {
        return Err(Error::Internal("formula does not define H_0".into()));
    }
    let conjugators = left_cosets(group, &nl.h0).reps;
    let core = GroupSubset::from_predicate(group.order(), |x| {
        conjugators.iter().all(|&g| h0.contains(group.conjugate(group.inv(g), x)))
    });
    if core != *report.h.carrier() {
        return Err(Error::Internal("conjugates of H_0 do not intersect to H".into()));
    }
    Ok(NormalDefinition { report, pair, formula, conjugators })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_group;
    use crate::stabilizer::stab_set;

    fn g(spec: &str) -> FiniteGroup {
        build_group(spec, &Caps::default()).unwrap()
    }

    #[test]
    fn whole_group() {
        let z6 = g("Z/6");
        let a = GroupSubset::full(6);
        let f = stab_dnf(&z6, &a, &ratio(1, 2), &ratio(1, 4), 1, &Caps::default()).unwrap();
        assert!(evaluate_dnf(&z6, &f).unwrap().is_full());
    }

    #[test]
    fn subgroup_of_z12() {
        let z12 = g("Z/12");
        let a = GroupSubset::from_elements(12, [0, 4, 8]).unwrap();
        let f = stab_dnf(&z12, &a, &ratio(1, 4), &ratio(1, 8), 7, &Caps::default()).unwrap();
        assert_eq!(evaluate_dnf(&z12, &f).unwrap(), a);
        assert_eq!(f.vc_r, 1);
        assert_eq!(f.d, 10);
        assert!(BigUint::from(f.clauses.len()) <= f.clause_bound);
        for l in &f.literals {
            assert_eq!(l.element, z12.inv(l.source));
            assert_eq!(l.complemented, a.contains(l.source));
        }
        let mut sorted = f.clauses.clone();
        sorted.sort();
        assert_eq!(sorted, f.clauses);
    }

    #[test]
    fn unequal_stabilizers_are_rejected() {
        let z12 = g("Z/12");
        let a = GroupSubset::from_elements(12, [0, 1, 2, 3]).unwrap();
        // values are multiples of 2/12; 1/6 separates κ = 1/4 from λ = 1/8
        assert_ne!(stab_set(&z12, &a, &ratio(1, 4)), stab_set(&z12, &a, &ratio(1, 8)));
        let r = stab_dnf(&z12, &a, &ratio(1, 4), &ratio(1, 8), 0, &Caps::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn evaluate_edge_cases() {
        let z5 = g("Z/5");
        let mut f = DnfFormula {
            base: GroupSubset::empty(5),
            literals: Vec::new(),
            clauses: Vec::new(),
            kappa: ratio(1, 2),
            lambda: ratio(1, 4),
            theta: ratio(1, 8),
            discrepancy: int(0),
            vc_r: 0,
            vc_source: VcSource::Exact,
            d: 0,
            clause_bound: BigUint::one(),
            length_cap: BigUint::one(),
        };
        assert!(evaluate_dnf(&z5, &f).unwrap().is_empty());
        // Z_{a} = ∅ for A = ∅: one empty clause gives G
        f.literals = alloc::vec![Literal { source: 2, element: 3, complemented: false }];
        f.clauses = alloc::vec![Vec::new()];
        assert!(evaluate_dnf(&z5, &f).unwrap().is_full());
    }

    #[test]
    fn eta_pairs() {
        let z12 = g("Z/12");
        let a = GroupSubset::from_elements(12, [0, 4, 8]).unwrap();
        let p = eta_pair_for_dnf(&z12, &a, &ratio(1, 4), &DecomposeOptions::default()).unwrap();
        assert_eq!((p.kappa, p.lambda), (ratio(1, 4), crate::rational::pow(&ratio(1, 4), 8)));
        let e = eta_pair_for_dnf(&z12, &GroupSubset::empty(12), &ratio(1, 3), &DecomposeOptions::default()).unwrap();
        assert_eq!((e.kappa, e.lambda), (ratio(1, 3), crate::rational::pow(&ratio(1, 3), 8)));
        let b = GroupSubset::from_elements(12, [0, 1, 2, 3, 4]).unwrap();
        let too_small = eta_pair_for_dnf(&z12, &b, &ratio(1, 4), &DecomposeOptions::supplied(2));
        assert!(matches!(too_small, Err(Error::Precondition(_))));
    }

    #[test]
    fn defined_subgroups() {
        let d4 = g("D/4");
        let a = GroupSubset::from_elements(8, [0, 4, 2, 6]).unwrap();
        let def = define_subgroup(&d4, &a, &ratio(1, 4), &DecomposeOptions::default(), 3).unwrap();
        assert_eq!(evaluate_dnf(&d4, &def.formula).unwrap(), *def.report.h.carrier());
        let n = define_normal_subgroup(&d4, &GroupSubset::from_elements(8, [0, 4]).unwrap(), &ratio(1, 4), &DecomposeOptions::default(), 3).unwrap();
        assert!(n.report.h.is_normal(&d4));
        assert_eq!(n.conjugators.len(), n.report.normal.as_ref().unwrap().m0);
    }
}
