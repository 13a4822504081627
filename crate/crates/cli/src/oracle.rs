//! Exhaustive theorem checks over every subset of every catalog group.
//!
//! The checks recompute their claims from the multiplication table wherever
//! the claim is not the output of the routine under test.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use stabreg_core::definability::{define_subgroup, evaluate_dnf};
use stabreg_core::rational::{int, ratio};
use stabreg_core::regularity::{decompose, decompose_normal, DecomposeOptions, KMode};
use stabreg_core::repgroup::ElementSet;
use stabreg_core::setsys::{
    approximation_discrepancy, epsilon_approximation, epsilon_net, haussler_bound, haussler_packing,
    translates_system, vc_dimension, SetSystem, Side,
};
use stabreg_core::stability::{half_graph, k_star_bound, phi_a_stability, set_relation, HalfGraphSearch};
use stabreg_core::stabilizer::{find_eta, EtaSearchConfig, Sigma};
use stabreg_core::tripling::ruzsa_check;
use stabreg_core::verify::verify_report;
use stabreg_core::{Caps, Error, FiniteGroup, GroupSubset, Level, Rational, Result};

use crate::catalog;
use crate::dto::frac;
use crate::spec::mask_spec;

/// Theorem checks, in report column order.
pub const CLAUSES: &[&str] = &[
    "empty-iff-index-1",
    "coset-iff-index-2",
    "vc-below-k",
    "eta-search",
    "epsilon-net",
    "epsilon-approximation",
    "haussler-packing",
    "ruzsa",
    "decompose",
    "normal-decompose",
    "dnf-defines-stabilizer",
];

pub fn clause_index(name: &str) -> Option<usize> {
    CLAUSES.iter().position(|c| *c == name)
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Catalog groups of order at most this are included.
    pub max_order: usize,
    /// Index, VC, η-search and set-system checks run up to this order.
    pub fact_order: usize,
    /// Every subset is enumerated up to this order; above it, `samples`
    /// seeded subsets per group.
    pub exhaustive_order: usize,
    pub samples: usize,
    pub epsilons: Vec<Rational>,
    /// Decomposition checks run on sets with stability index at most this.
    pub k_max: usize,
    pub seed: u64,
    /// Test mode: report this clause as failing wherever it passes.
    pub inject_fault: Option<usize>,
    pub caps: Caps,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_order: 8,
            fact_order: 10,
            exhaustive_order: 16,
            samples: 256,
            epsilons: vec![ratio(1, 2), ratio(1, 4), ratio(1, 8)],
            k_max: 4,
            seed: 0,
            inject_fault: None,
            caps: Caps::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl Verdict {
    fn of(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub group: String,
    pub subset: String,
    pub size: usize,
    /// Stability index; `None` when above `k_max` at orders past `fact_order`.
    pub k: Option<usize>,
    pub vc_left: Option<usize>,
    pub vc_right: Option<usize>,
    pub k_star: Option<u64>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip)]
    pub failures: Vec<(usize, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub group: String,
    pub clause: &'static str,
    pub subset: Vec<usize>,
    pub minimized: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClauseTotals {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub order: usize,
    pub subsets: usize,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub groups: Vec<GroupSummary>,
    pub totals: BTreeMap<&'static str, ClauseTotals>,
    pub counterexamples: Vec<Counterexample>,
    #[serde(skip)]
    pub rows: Vec<SuiteRow>,
}

impl SuiteResult {
    pub fn all_passed(&self) -> bool {
        self.totals.values().all(|t| t.fail == 0)
    }

    pub fn totals_for(&self, clause: &str) -> ClauseTotals {
        self.totals.get(clause).cloned().unwrap_or_default()
    }
}

struct Ctx<'a> {
    g: &'a FiniteGroup,
    cfg: &'a SuiteConfig,
    /// Caps with the half-graph size cap raised to `|G| + 1`.
    exact_caps: Caps,
}

fn mul_set(g: &FiniteGroup, a: &[bool], x: usize, right: bool) -> Vec<bool> {
    let mut out = vec![false; a.len()];
    for (y, &inside) in a.iter().enumerate() {
        if inside {
            out[if right { g.mul(y, x) } else { g.mul(x, y) }] = true;
        }
    }
    out
}

fn members(a: &GroupSubset) -> Vec<bool> {
    (0..a.order()).map(|x| a.contains(x)).collect()
}

/// `A` is a left coset of a subgroup: `a^-1 A` is closed under products for
/// some (any) `a ∈ A`.
fn brute_is_coset(g: &FiniteGroup, a: &[bool]) -> bool {
    let Some(a0) = a.iter().position(|&b| b) else { return false };
    let h = mul_set(g, a, g.inv(a0), false);
    let elems: Vec<usize> = (0..h.len()).filter(|&x| h[x]).collect();
    elems.iter().all(|&x| elems.iter().all(|&y| h[g.mul(x, y)]))
}

/// VC dimension of `{gA}` or `{Ag}` by checking every point set.
fn brute_vc(g: &FiniteGroup, a: &[bool], right: bool) -> usize {
    let n = a.len();
    let sets: Vec<u64> = (0..n)
        .map(|x| {
            mul_set(g, a, x, right)
                .iter()
                .enumerate()
                .fold(0u64, |m, (i, &b)| if b { m | 1 << i } else { m })
        })
        .collect();
    let mut best = 0;
    for points in 0u64..(1 << n) {
        let t = points.count_ones() as usize;
        if t <= best || (1usize << t) > sets.len() {
            continue;
        }
        let mut traces: Vec<u64> = sets.iter().map(|s| s & points).collect();
        traces.sort_unstable();
        traces.dedup();
        if traces.len() == 1 << t {
            best = t;
        }
    }
    best
}

fn brute_counts(g: &FiniteGroup, a: &[bool]) -> Vec<usize> {
    (0..a.len())
        .map(|x| {
            let ax = mul_set(g, a, x, true);
            ax.iter().zip(a).filter(|(p, q)| p != q).count()
        })
        .collect()
}

fn stability_up_to(a: &GroupSubset, g: &FiniteGroup, limit: usize, caps: &Caps) -> Result<Option<usize>> {
    let rel = set_relation(g, a);
    for k in 1..=limit {
        match half_graph(&rel, k, caps) {
            HalfGraphSearch::Absent => return Ok(Some(k)),
            HalfGraphSearch::Found(_) => {}
            HalfGraphSearch::Indeterminate(why) => return Err(Error::CapExceeded(why)),
        }
    }
    Ok(None)
}

fn net_ok(system: &SetSystem, eps: &Rational, net: &[usize]) -> bool {
    let n = system.ground as u64;
    system.sets.iter().all(|s| {
        let size = s.count_ones(..) as u64;
        int(size) <= eps * int(n) || net.iter().any(|&p| s.contains(p))
    })
}

fn packing_ok(packing: &SetSystem, eps: &Rational, d: usize) -> bool {
    let n = packing.ground as u64;
    let separated = packing.sets.iter().enumerate().all(|(i, s)| {
        packing.sets[..i]
            .iter()
            .all(|t| int(s.symmetric_difference_count(t) as u64) > eps * int(n))
    });
    separated && int(packing.sets.len() as u64) <= haussler_bound(eps, d)
}

/// `(σ(η), η]` holds no value `|Ax △ A| / |G|`.
fn gap_is_clear(counts: &[usize], n: usize, eta: &Level, sigma_eta: &Level) -> bool {
    counts.iter().all(|&c| {
        let v = ratio(c as u64, n as u64);
        let le_eta = eta.cmp_rational(&v).map(|o| o != std::cmp::Ordering::Less);
        let gt_sigma = sigma_eta.cmp_rational(&v).map(|o| o == std::cmp::Ordering::Less);
        matches!((le_eta, gt_sigma), (Some(false), _) | (_, Some(false)))
    })
}

struct Eval {
    row: SuiteRow,
}

impl Eval {
    fn set(&mut self, clause: &str, v: Verdict, detail: impl FnOnce() -> String) {
        let i = clause_index(clause).expect("known clause");
        if v == Verdict::Fail {
            self.row.failures.push((i, detail()));
        }
        self.row.verdicts[i] = v;
    }

    fn from_result(&mut self, clause: &str, r: std::result::Result<(), String>) {
        match r {
            Ok(()) => self.set(clause, Verdict::Pass, String::new),
            Err(why) => self.set(clause, Verdict::Fail, || why),
        }
    }
}

fn err_string(e: Error) -> String {
    e.to_string()
}

fn evaluate(ctx: &Ctx, a: &GroupSubset, only: Option<usize>) -> SuiteRow {
    let g = ctx.g;
    let n = g.order();
    let cfg = ctx.cfg;
    let wants = |c: &str| only.is_none_or(|i| CLAUSES[i] == c);
    let mut ev = Eval {
        row: SuiteRow {
            group: g.name().to_string(),
            subset: mask_spec(a),
            size: a.len(),
            k: None,
            vc_left: None,
            vc_right: None,
            k_star: None,
            verdicts: vec![Verdict::Skip; CLAUSES.len()],
            failures: Vec::new(),
        },
    };
    let bits = members(a);
    let small = n <= cfg.fact_order;
    let limit = if small { n + 1 } else { cfg.k_max + 1 };
    let k = match stability_up_to(a, g, limit, &ctx.exact_caps) {
        Ok(k) => k,
        Err(e) => {
            for c in CLAUSES {
                if wants(c) {
                    ev.set(c, Verdict::Fail, || format!("stability index: {e}"));
                }
            }
            return finish(ctx, ev);
        }
    };
    ev.row.k = k;

    let mut phi_exact = None;
    if small {
        let k = k.expect("exact below fact_order");
        if wants("empty-iff-index-1") {
            ev.set("empty-iff-index-1", Verdict::of((k == 1) == a.is_empty()), || format!("index {k}"));
        }
        if wants("coset-iff-index-2") {
            let coset = brute_is_coset(g, &bits);
            ev.set("coset-iff-index-2", Verdict::of((k == 2 && !a.is_empty()) == coset), || {
                format!("index {k}, coset {coset}")
            });
        }
        if wants("vc-below-k") || wants("epsilon-net") || wants("epsilon-approximation") || wants("haussler-packing") {
            let (l, r) = (brute_vc(g, &bits, false), brute_vc(g, &bits, true));
            ev.row.vc_left = Some(l);
            ev.row.vc_right = Some(r);
            if wants("vc-below-k") {
                let cert = |side| vc_dimension(&translates_system(g, a, side), None, &ctx.exact_caps);
                let agree = matches!((cert(Side::Left), cert(Side::Right)),
                    (Ok(cl), Ok(cr)) if cl.dimension == l && cr.dimension == r && cl.exhaustive && cr.exhaustive);
                ev.set("vc-below-k", Verdict::of(agree && l < k && r < k), || {
                    format!("VC_l {l}, VC_r {r}, index {k}, certificates agree {agree}")
                });
            }
            set_system_checks(ctx, a, l, &mut ev, &wants);
        }
        if wants("eta-search") || wants("decompose") || wants("normal-decompose") || wants("dnf-defines-stabilizer") {
            match phi_a_stability(g, a, &ctx.exact_caps).exact() {
                Some(ks) => phi_exact = Some(ks as u64),
                None => ev.set("eta-search", Verdict::Fail, || "φ_A stability not exact".into()),
            }
        }
        if wants("eta-search") {
            if let Some(ks) = phi_exact {
                let ks = ks.min(k_star_bound(k.max(2) as u64).map(|b| b.saturated).unwrap_or(u64::MAX));
                let r = eta_search_check(g, &bits, k, ks, &cfg.epsilons);
                ev.from_result("eta-search", r);
            }
        }
    }

    if wants("ruzsa") && !a.is_empty() {
        let set: ElementSet<usize> = a.iter().collect();
        let r = ruzsa_check(g, &set, &cfg.caps);
        ev.from_result(
            "ruzsa",
            match r {
                Ok(c) if c.holds => Ok(()),
                Ok(c) => Err(format!("|(A^-1A)^3| = {} > {}", c.cubed, frac(&c.bound))),
                Err(e) => Err(err_string(e)),
            },
        );
    }

    if let Some(k) = k.filter(|&k| k <= cfg.k_max) {
        let k64 = k as u64;
        let mut opts = DecomposeOptions {
            mode: KMode::Supplied(k64),
            unchecked: true,
            caps: cfg.caps.clone(),
            ..DecomposeOptions::default()
        };
        match phi_exact {
            Some(ks) => {
                let bound = k_star_bound(k64.max(2)).map(|b| b.saturated).unwrap_or(u64::MAX);
                opts.k_star = Some(ks.min(bound));
                ev.row.k_star = opts.k_star;
            }
            None => {
                opts.phi_search = false;
                ev.row.k_star = k_star_bound(k64.max(2)).ok().map(|b| b.saturated);
            }
        }
        if wants("decompose") {
            let r = decomposition_check(g, a, &cfg.epsilons, &opts, false);
            ev.from_result("decompose", r);
        }
        if wants("normal-decompose") {
            let r = decomposition_check(g, a, &cfg.epsilons, &opts, true);
            ev.from_result("normal-decompose", r);
        }
        if wants("dnf-defines-stabilizer") {
            let r = dnf_check(g, a, &bits, &cfg.epsilons, &opts, cfg.seed);
            ev.from_result("dnf-defines-stabilizer", r);
        }
    }
    finish(ctx, ev)
}

fn finish(ctx: &Ctx, mut ev: Eval) -> SuiteRow {
    if let Some(i) = ctx.cfg.inject_fault {
        if ev.row.verdicts[i] == Verdict::Pass {
            ev.row.verdicts[i] = Verdict::Fail;
            ev.row.failures.push((i, "injected fault".into()));
        }
    }
    ev.row
}

fn set_system_checks(ctx: &Ctx, a: &GroupSubset, d: usize, ev: &mut Eval, wants: &dyn Fn(&str) -> bool) {
    let system = translates_system(ctx.g, a, Side::Left);
    let caps = &ctx.cfg.caps;
    let mut net = Ok(());
    let mut approx = Ok(());
    let mut pack = Ok(());
    for eps in &ctx.cfg.epsilons {
        let tag = frac(eps);
        if wants("epsilon-net") && net.is_ok() {
            net = match epsilon_net(&system, eps, d, ctx.cfg.seed, caps) {
                Ok(p) if net_ok(&system, eps, &p) => Ok(()),
                Ok(p) => Err(format!("ε = {tag}: {p:?} misses a heavy set")),
                Err(e) => Err(format!("ε = {tag}: {e}")),
            };
        }
        if wants("epsilon-approximation") && approx.is_ok() {
            approx = match epsilon_approximation(&system, eps, d, ctx.cfg.seed, caps) {
                Ok(t) if approximation_discrepancy(&system, &t) <= *eps => Ok(()),
                Ok(t) => Err(format!("ε = {tag}: discrepancy {}", frac(&approximation_discrepancy(&system, &t)))),
                Err(e) => Err(format!("ε = {tag}: {e}")),
            };
        }
        if wants("haussler-packing") && pack.is_ok() {
            pack = match haussler_packing(&system, eps, Some(d)) {
                Ok(p) if packing_ok(&p, eps, d) => Ok(()),
                Ok(p) => Err(format!("ε = {tag}: packing of {} sets fails separation or bound", p.sets.len())),
                Err(e) => Err(format!("ε = {tag}: {e}")),
            };
        }
    }
    if wants("epsilon-net") {
        ev.from_result("epsilon-net", net);
    }
    if wants("epsilon-approximation") {
        ev.from_result("epsilon-approximation", approx);
    }
    if wants("haussler-packing") {
        ev.from_result("haussler-packing", pack);
    }
}

fn eta_search_check(
    g: &FiniteGroup,
    a: &[bool],
    k: usize,
    k_star: u64,
    epsilons: &[Rational],
) -> std::result::Result<(), String> {
    let n = a.len();
    let counts = brute_counts(g, a);
    let mut values: Vec<Rational> = counts.iter().map(|&c| ratio(c as u64, n as u64)).collect();
    values.sort();
    values.dedup();
    let sigma = Sigma::theorem_power(k.max(2) as u64).map_err(err_string)?;
    for eps in epsilons {
        let cfg = EtaSearchConfig { sigma: sigma.clone(), k: k_star.max(2), r: int(1), epsilon: eps.clone() };
        let found = find_eta(&values, &cfg).map_err(|e| format!("ε = {}: {e}", frac(eps)))?;
        if !gap_is_clear(&counts, n, &found.eta, &found.sigma_eta) {
            return Err(format!("ε = {}: a value lies in (σ(η), η] at η = {}", frac(eps), found.eta));
        }
        if found.eta_ge_delta != Some(true) {
            return Err(format!("ε = {}: η = {} not shown ≥ δ = {}", frac(eps), found.eta, found.delta));
        }
    }
    Ok(())
}

fn decomposition_check(
    g: &FiniteGroup,
    a: &GroupSubset,
    epsilons: &[Rational],
    opts: &DecomposeOptions,
    normal: bool,
) -> std::result::Result<(), String> {
    for eps in epsilons {
        let tag = frac(eps);
        let report = if normal { decompose_normal(g, a, eps, opts) } else { decompose(g, a, eps, opts) }
            .map_err(|e| format!("ε = {tag}: {e}"))?;
        let v = verify_report(g, a, eps, &report);
        if !v.all_passed() {
            let names: Vec<&str> = v.failures().iter().map(|c| c.name).collect();
            return Err(format!("ε = {tag}: verification failed: {}", names.join(", ")));
        }
    }
    Ok(())
}

fn dnf_check(
    g: &FiniteGroup,
    a: &GroupSubset,
    bits: &[bool],
    epsilons: &[Rational],
    opts: &DecomposeOptions,
    seed: u64,
) -> std::result::Result<(), String> {
    let n = a.order();
    let counts = brute_counts(g, bits);
    for eps in epsilons {
        let tag = frac(eps);
        let d = define_subgroup(g, a, eps, opts, seed).map_err(|e| format!("ε = {tag}: {e}"))?;
        let kappa = &d.pair.kappa;
        let expected = GroupSubset::from_predicate(n, |x| int(counts[x] as u64) <= kappa * int(n as u64));
        let got = evaluate_dnf(g, &d.formula).map_err(|e| format!("ε = {tag}: {e}"))?;
        if got != expected {
            return Err(format!("ε = {tag}: formula defines {:?}, Stab is {:?}", got.to_vec(), expected.to_vec()));
        }
        let f = &d.formula;
        if num_bigint::BigUint::from(f.clauses.len()) > f.clause_bound {
            return Err(format!("ε = {tag}: {} clauses exceed {}", f.clauses.len(), f.clause_bound));
        }
        if num_bigint::BigUint::from(f.len()) > f.length_cap {
            return Err(format!("ε = {tag}: length {} exceeds {}", f.len(), f.length_cap));
        }
    }
    Ok(())
}

/// Greedily removes elements while `clause` keeps failing.
fn minimize(ctx: &Ctx, a: &GroupSubset, clause: usize) -> GroupSubset {
    let mut cur = a.clone();
    loop {
        let mut shrunk = false;
        for x in cur.to_vec() {
            let mut b = cur.clone();
            b.remove(x);
            if evaluate(ctx, &b, Some(clause)).verdicts[clause] == Verdict::Fail {
                cur = b;
                shrunk = true;
            }
        }
        if !shrunk {
            return cur;
        }
    }
}

fn subsets_for(g: &FiniteGroup, cfg: &SuiteConfig) -> (Vec<u64>, bool) {
    let n = g.order();
    if n <= cfg.exhaustive_order && n < 64 {
        return ((0..1u64 << n).collect(), true);
    }
    let salt = g.name().bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ salt);
    let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut masks: Vec<u64> = (0..cfg.samples).map(|_| rng.gen::<u64>() & full).collect();
    masks.sort_unstable();
    masks.dedup();
    (masks, false)
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let groups = catalog::groups(1, cfg.max_order, &cfg.caps)?;
    let mut summaries = Vec::new();
    let mut rows = Vec::new();
    let mut counterexamples = Vec::new();
    for g in &groups {
        let exact_caps = Caps { half_graph_k: g.order() + 1, ..cfg.caps.clone() };
        let ctx = Ctx { g, cfg, exact_caps };
        let (masks, exhaustive) = subsets_for(g, cfg);
        let group_rows: Vec<SuiteRow> = masks
            .par_iter()
            .with_min_len(64)
            .map(|&m| evaluate(&ctx, &GroupSubset::from_mask(g.order(), m), None))
            .collect();
        for row in &group_rows {
            for (clause, detail) in &row.failures {
                // One counterexample per (group, clause).
                if counterexamples.iter().any(|c: &Counterexample| c.group == row.group && c.clause == CLAUSES[*clause]) {
                    continue;
                }
                let a = crate::spec::parse_subset(g, &row.subset)?;
                let min = minimize(&ctx, &a, *clause);
                counterexamples.push(Counterexample {
                    group: row.group.clone(),
                    clause: CLAUSES[*clause],
                    subset: a.to_vec(),
                    minimized: min.to_vec(),
                    detail: detail.clone(),
                });
            }
        }
        summaries.push(GroupSummary {
            group: g.name().to_string(),
            order: g.order(),
            subsets: group_rows.len(),
            exhaustive,
        });
        rows.extend(group_rows);
    }
    let mut totals: BTreeMap<&'static str, ClauseTotals> = CLAUSES.iter().map(|c| (*c, ClauseTotals::default())).collect();
    for row in &rows {
        for (i, v) in row.verdicts.iter().enumerate() {
            let t = totals.get_mut(CLAUSES[i]).expect("clause");
            match v {
                Verdict::Pass => t.pass += 1,
                Verdict::Fail => t.fail += 1,
                Verdict::Skip => t.skip += 1,
            }
        }
    }
    Ok(SuiteResult { groups: summaries, totals, counterexamples, rows })
}

#[derive(Serialize)]
struct SuiteJson<'a> {
    max_order: usize,
    fact_order: usize,
    exhaustive_order: usize,
    samples: usize,
    epsilons: Vec<String>,
    k_max: usize,
    seed: u64,
    inject_fault: Option<&'static str>,
    all_passed: bool,
    groups: &'a [GroupSummary],
    totals: &'a BTreeMap<&'static str, ClauseTotals>,
    counterexamples: &'a [Counterexample],
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Writes `suite.csv` (one row per subset) and `suite.json` (summary).
pub fn write_outputs(dir: &Path, cfg: &SuiteConfig, result: &SuiteResult) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("suite.csv"))?;
    let mut header = vec!["group", "subset", "size", "k", "vc_left", "vc_right", "k_star"];
    header.extend_from_slice(CLAUSES);
    w.write_record(&header)?;
    for r in &result.rows {
        let mut rec = vec![
            r.group.clone(),
            r.subset.clone(),
            r.size.to_string(),
            opt(r.k),
            opt(r.vc_left),
            opt(r.vc_right),
            opt(r.k_star),
        ];
        rec.extend(r.verdicts.iter().map(|v| v.as_str().to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    let json = SuiteJson {
        max_order: cfg.max_order,
        fact_order: cfg.fact_order,
        exhaustive_order: cfg.exhaustive_order,
        samples: cfg.samples,
        epsilons: cfg.epsilons.iter().map(frac).collect(),
        k_max: cfg.k_max,
        seed: cfg.seed,
        inject_fault: cfg.inject_fault.map(|i| CLAUSES[i]),
        all_passed: result.all_passed(),
        groups: &result.groups,
        totals: &result.totals,
        counterexamples: &result.counterexamples,
    };
    let text = serde_json::to_string_pretty(&json).expect("suite summary serializes");
    fs::write(dir.join("suite.json"), text + "\n")
}
