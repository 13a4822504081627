//! Single-task commands. Each returns its JSON report or a [`Failure`]
//! carrying the exit code.

use std::fmt;

use serde::Serialize;
use stabreg_core::definability::{define_normal_subgroup, define_subgroup, evaluate_dnf};
use stabreg_core::regularity::{decompose, decompose_normal, DecomposeOptions, KMode};
use stabreg_core::repgroup::RepGroup;
use stabreg_core::setsys::{translates_system, vc_dimension, Side};
use stabreg_core::stability::set_stability;
use stabreg_core::stabilizer::stab_profile;
use stabreg_core::subset::is_coset;
use stabreg_core::tripling::{decompose_tripling, verify_tripling, TriplingOptions};
use stabreg_core::verify::verify_report;
use stabreg_core::{Caps, Error, FiniteGroup, GroupSubset, Rational};

use crate::dto::{AnalyzeJson, DnfJson, DnfReportJson, RegularityJson, TriplingJson, VerifyJson};
use crate::rep::{parse_rep, AnyRep};
use crate::spec::{load_group, parse_element_set, parse_subset, ModeFlag};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_THEOREM: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// Exit code for a core error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        _ if e.is_theorem_violation() => EXIT_THEOREM,
        Error::NetUnachievable { .. } | Error::ApproximationFailed { .. } => EXIT_THEOREM,
        Error::Precision(_) | Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_PRECONDITION,
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

pub type CmdResult<T> = Result<T, Failure>;

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn verify_failure(what: &str, v: &VerifyJson) -> Failure {
    let names: Vec<&str> = v.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    Failure::new(EXIT_THEOREM, format!("{what}: independent verification failed: {}", names.join(", ")))
}

pub fn analyze(group: &str, subset: &str, caps: &Caps) -> CmdResult<AnalyzeJson> {
    let g = load_group(group, caps)?;
    let a = parse_subset(&g, subset)?;
    let stability = set_stability(&g, &a, caps);
    let vc = |side| -> CmdResult<_> { Ok(vc_dimension(&translates_system(&g, &a, side), None, caps)?) };
    Ok(AnalyzeJson {
        group: g.name().to_string(),
        order: g.order(),
        subset: a.to_vec(),
        stability: (&stability).into(),
        is_coset: is_coset(&g, &a),
        vc_left: (&vc(Side::Left)?).into(),
        vc_right: (&vc(Side::Right)?).into(),
        profile: (&stab_profile(&g, &a)).into(),
    })
}

/// Runs the decomposition (or its normal variant) for each `ε`.
pub fn decompose_cmd(
    group: &str,
    subset: &str,
    epsilons: &[Rational],
    opts: &DecomposeOptions,
    verify: bool,
    normal: bool,
) -> CmdResult<Vec<RegularityJson>> {
    let g = load_group(group, &opts.caps)?;
    let a = parse_subset(&g, subset)?;
    decompose_on(&g, &a, epsilons, opts, verify, normal)
}

pub fn decompose_on(
    g: &FiniteGroup,
    a: &GroupSubset,
    epsilons: &[Rational],
    opts: &DecomposeOptions,
    verify: bool,
    normal: bool,
) -> CmdResult<Vec<RegularityJson>> {
    let mut out = Vec::with_capacity(epsilons.len());
    for eps in epsilons {
        let report = if normal { decompose_normal(g, a, eps, opts)? } else { decompose(g, a, eps, opts)? };
        let mut json = RegularityJson::new(g.name(), a, &report);
        if verify {
            let v = VerifyJson::from(&verify_report(g, a, eps, &report));
            if !v.all_passed {
                return Err(verify_failure("decomposition", &v));
            }
            json.verify = Some(v);
        }
        out.push(json);
    }
    Ok(out)
}

pub fn dnf_cmd(
    group: &str,
    subset: &str,
    epsilons: &[Rational],
    opts: &DecomposeOptions,
    seed: u64,
    verify: bool,
    normal: bool,
) -> CmdResult<Vec<DnfReportJson>> {
    let g = load_group(group, &opts.caps)?;
    let a = parse_subset(&g, subset)?;
    let mut out = Vec::with_capacity(epsilons.len());
    for eps in epsilons {
        let (report, pair, formula, conjugators, target) = if normal {
            let d = define_normal_subgroup(&g, &a, eps, opts, seed)?;
            let h0 = d.report.normal.as_ref().map(|n| n.h0.carrier().clone());
            let target = h0.ok_or_else(|| Failure::new(EXIT_INTERNAL, "normal report without H_0"))?;
            (d.report, d.pair, d.formula, Some(d.conjugators), target)
        } else {
            let d = define_subgroup(&g, &a, eps, opts, seed)?;
            let target = d.report.h.carrier().clone();
            (d.report, d.pair, d.formula, None, target)
        };
        let defines = evaluate_dnf(&g, &formula)?;
        let round_trip = defines == target;
        if !round_trip {
            return Err(Failure::new(EXIT_THEOREM, "formula does not define the stabilizer"));
        }
        let mut regularity = RegularityJson::new(g.name(), &a, &report);
        if verify {
            let v = VerifyJson::from(&verify_report(&g, &a, eps, &report));
            if !v.all_passed {
                return Err(verify_failure("decomposition", &v));
            }
            regularity.verify = Some(v);
        }
        out.push(DnfReportJson {
            regularity,
            formula: DnfJson::new(&formula, &pair, &defines, round_trip),
            conjugators,
        });
    }
    Ok(out)
}

pub fn tripling_options(mode: ModeFlag, k: Option<u64>, caps: &Caps) -> CmdResult<TriplingOptions> {
    let need_k = || k.ok_or_else(|| Failure::new(EXIT_PRECONDITION, "--k is required with --mode supplied/override"));
    let (mode, unchecked) = match mode {
        ModeFlag::Exact => (KMode::Exact, false),
        ModeFlag::Supplied => (KMode::Supplied(need_k()?), false),
        ModeFlag::Override => (KMode::Supplied(need_k()?), true),
    };
    Ok(TriplingOptions { mode, unchecked, caps: caps.clone(), ..TriplingOptions::default() })
}

fn tripling_on<G: RepGroup>(
    g: &G,
    finite: Option<&FiniteGroup>,
    subset: &str,
    epsilons: &[Rational],
    opts: &TriplingOptions,
    verify: bool,
) -> CmdResult<Vec<TriplingJson>> {
    let a = parse_element_set(g, subset, finite)?;
    let mut out = Vec::with_capacity(epsilons.len());
    for eps in epsilons {
        let report = decompose_tripling(g, &a, eps, opts)?;
        let mut json = TriplingJson::new(g, &a, &report);
        if verify {
            let v = VerifyJson::from(&verify_tripling(g, &a, eps, &report));
            if !v.all_passed {
                return Err(verify_failure("tripling decomposition", &v));
            }
            json.verify = Some(v);
        }
        out.push(json);
    }
    Ok(out)
}

pub fn tripling_cmd(
    group: &str,
    subset: &str,
    epsilons: &[Rational],
    opts: &TriplingOptions,
    verify: bool,
) -> CmdResult<Vec<TriplingJson>> {
    match parse_rep(group, &opts.caps)? {
        AnyRep::Finite(g) => tripling_on(&g, None, subset, epsilons, opts, verify),
        AnyRep::Lattice(g) => tripling_on(&g, None, subset, epsilons, opts, verify),
        AnyRep::LatticeFinite(g) => tripling_on(&g, Some(&g.finite.clone()), subset, epsilons, opts, verify),
        AnyRep::Heisenberg(g) => tripling_on(&g, None, subset, epsilons, opts, verify),
        AnyRep::HeisenbergMod(g) => tripling_on(&g, None, subset, epsilons, opts, verify),
    }
}
