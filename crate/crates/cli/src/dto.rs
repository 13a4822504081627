//! JSON report shapes. Fractions are `"p/q"` strings, levels use the core's
//! compact text form, and sets are sorted element arrays.

use serde::Serialize;
use stabreg_core::definability::{DnfFormula, EtaPair, VcSource};
use stabreg_core::error::BlockedCandidate;
use stabreg_core::rational::fraction_string;
use stabreg_core::regularity::{KSource, KStarSource, RegularityReport};
use stabreg_core::repgroup::{ElementSet, RepGroup};
use stabreg_core::setsys::VcCertificate;
use stabreg_core::stability::{HalfGraphWitness, KStarBound, StabilityOutcome};
use stabreg_core::stabilizer::{EtaResult, StabilizerProfile};
use stabreg_core::tripling::{RuzsaCheck, TriplingReport};
use stabreg_core::verify::VerifyLedger;
use stabreg_core::{GroupSubset, Level, Rational};

pub fn frac(r: &Rational) -> String {
    fraction_string(r)
}

pub fn level(l: &Level) -> String {
    l.render()
}

pub fn members(s: &GroupSubset) -> Vec<usize> {
    s.to_vec()
}

fn k_source(s: KSource) -> &'static str {
    match s {
        KSource::Computed => "computed",
        KSource::Verified => "verified",
        KSource::Unverified => "unverified",
    }
}

fn k_star_source(s: KStarSource) -> &'static str {
    match s {
        KStarSource::PhiExact => "phi-exact",
        KStarSource::Bound => "bound",
        KStarSource::Supplied => "supplied",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckJson {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyJson {
    pub all_passed: bool,
    pub checks: Vec<CheckJson>,
}

impl From<&VerifyLedger> for VerifyJson {
    fn from(v: &VerifyLedger) -> Self {
        VerifyJson {
            all_passed: v.all_passed(),
            checks: v
                .checks
                .iter()
                .map(|c| CheckJson { name: c.name, passed: c.passed, detail: c.detail.clone() })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockedJson {
    pub index: u64,
    pub eta: String,
    pub sigma_eta: String,
    pub blocking: Vec<String>,
}

impl From<&BlockedCandidate> for BlockedJson {
    fn from(b: &BlockedCandidate) -> Self {
        BlockedJson {
            index: b.index,
            eta: level(&b.eta),
            sigma_eta: level(&b.sigma_eta),
            blocking: b.blocking.iter().map(frac).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EtaJson {
    pub eta: String,
    pub sigma_eta: String,
    pub index: u64,
    pub chain: Vec<String>,
    pub delta: String,
    pub eta_ge_delta: Option<bool>,
    pub blocked: Vec<BlockedJson>,
}

impl From<&EtaResult> for EtaJson {
    fn from(e: &EtaResult) -> Self {
        EtaJson {
            eta: level(&e.eta),
            sigma_eta: level(&e.sigma_eta),
            index: e.index,
            chain: e.chain.iter().map(level).collect(),
            delta: level(&e.delta),
            eta_ge_delta: e.eta_ge_delta,
            blocked: e.blocked.iter().map(BlockedJson::from).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KStarBoundJson {
    pub k: u64,
    pub inner: String,
    pub value: Option<String>,
    pub crude_log2: String,
}

impl From<&KStarBound> for KStarBoundJson {
    fn from(b: &KStarBound) -> Self {
        KStarBoundJson {
            k: b.k,
            inner: b.inner.to_string(),
            value: b.value.as_ref().map(|v| v.to_string()),
            crude_log2: b.crude_log2.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetJson {
    pub rep: usize,
    pub hits: usize,
    pub dense: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsJson {
    pub index_bound: Option<String>,
    pub index_bound_holds: bool,
    pub paper_exponent: String,
    pub error_bound: Option<String>,
    pub error_below_eta: bool,
    pub epsilon_bound: String,
    pub guard: Option<String>,
    pub epsilon_exceeds_guard: bool,
    pub dichotomy_eta: bool,
    pub dichotomy_epsilon: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalJson {
    pub h0: Vec<usize>,
    pub m0: usize,
    pub m0_index_bound_holds: bool,
    pub factorial_bound_holds: bool,
    pub dagger: Option<bool>,
    pub is_normal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityJson {
    pub group: String,
    pub subset: Vec<usize>,
    pub epsilon: String,
    pub k: u64,
    pub k_source: &'static str,
    pub k_star: u64,
    pub k_star_source: &'static str,
    pub k_star_bound: KStarBoundJson,
    pub sigma: String,
    pub eta: EtaJson,
    pub h: Vec<usize>,
    pub index: usize,
    pub cosets: Vec<CosetJson>,
    pub d: Vec<usize>,
    pub error_count: usize,
    pub bounds: BoundsJson,
    pub normal: Option<NormalJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyJson>,
}

impl RegularityJson {
    pub fn new(group: &str, a: &GroupSubset, r: &RegularityReport) -> Self {
        let b = &r.bounds;
        RegularityJson {
            group: group.to_string(),
            subset: members(a),
            epsilon: frac(&r.epsilon),
            k: r.k_used,
            k_source: k_source(r.k_source),
            k_star: r.k_star_used,
            k_star_source: k_star_source(r.k_star_source),
            k_star_bound: (&r.k_star_bound).into(),
            sigma: r.sigma.describe(),
            eta: (&r.eta).into(),
            h: members(r.h.carrier()),
            index: r.index,
            cosets: r
                .coset_classes
                .iter()
                .map(|c| CosetJson { rep: c.rep, hits: c.hits, dense: c.dense })
                .collect(),
            d: members(&r.d),
            error_count: r.error_count,
            bounds: BoundsJson {
                index_bound: b.index_bound.as_ref().map(frac),
                index_bound_holds: b.index_bound_holds,
                paper_exponent: b.paper_exponent.clone(),
                error_bound: b.error_bound.as_ref().map(frac),
                error_below_eta: b.error_below_eta,
                epsilon_bound: frac(&b.epsilon_bound),
                guard: b.guard.as_ref().map(frac),
                epsilon_exceeds_guard: b.epsilon_exceeds_guard,
                dichotomy_eta: b.dichotomy_eta,
                dichotomy_epsilon: b.dichotomy_epsilon,
            },
            normal: r.normal.as_ref().map(|n| NormalJson {
                h0: members(n.h0.carrier()),
                m0: n.m0,
                m0_index_bound_holds: n.m0_index_bound_holds,
                factorial_bound_holds: n.factorial_bound_holds,
                dagger: n.dagger,
                is_normal: n.is_normal,
            }),
            verify: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LiteralJson {
    pub source: usize,
    pub element: usize,
    pub complemented: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DnfJson {
    pub kappa: String,
    pub lambda: String,
    pub lambda_is_sigma_eta: bool,
    pub theta: String,
    pub discrepancy: String,
    pub vc_r: usize,
    pub vc_source: &'static str,
    pub d: usize,
    pub length: usize,
    pub length_cap: String,
    pub clause_count: usize,
    pub clause_bound: String,
    pub literals: Vec<LiteralJson>,
    /// One sign vector per clause: `true` where the literal enters positively.
    pub clauses: Vec<Vec<bool>>,
    pub rendered: String,
    pub defines: Vec<usize>,
    pub round_trip: bool,
}

impl DnfJson {
    pub fn new(f: &DnfFormula, pair: &EtaPair, defines: &GroupSubset, round_trip: bool) -> Self {
        DnfJson {
            kappa: frac(&f.kappa),
            lambda: frac(&f.lambda),
            lambda_is_sigma_eta: pair.lambda_is_sigma_eta,
            theta: frac(&f.theta),
            discrepancy: frac(&f.discrepancy),
            vc_r: f.vc_r,
            vc_source: match f.vc_source {
                VcSource::Exact => "exact",
                VcSource::StabilityBound => "stability-bound",
            },
            d: f.d,
            length: f.len(),
            length_cap: f.length_cap.to_string(),
            clause_count: f.clauses.len(),
            clause_bound: f.clause_bound.to_string(),
            literals: f
                .literals
                .iter()
                .map(|l| LiteralJson { source: l.source, element: l.element, complemented: l.complemented })
                .collect(),
            clauses: f
                .clauses
                .iter()
                .map(|c| (0..f.len()).map(|i| c.binary_search(&i).is_ok()).collect())
                .collect(),
            rendered: f.render(),
            defines: members(defines),
            round_trip,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DnfReportJson {
    pub regularity: RegularityJson,
    pub formula: DnfJson,
    /// Left-coset representatives `g` with `H = ⋂ g H_0 g^-1` (normal variant).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugators: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessJson {
    pub rows: Vec<usize>,
    pub columns: Vec<String>,
}

impl WitnessJson {
    pub fn new<L: core::fmt::Debug>(w: &HalfGraphWitness<L>) -> Self {
        WitnessJson { rows: w.a.clone(), columns: w.b.iter().map(|b| format!("{b:?}")).collect() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityJson {
    pub exact: bool,
    /// The index when exact, otherwise a lower bound.
    pub index: usize,
    pub witness: WitnessJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl<L: core::fmt::Debug> From<&StabilityOutcome<L>> for StabilityJson {
    fn from(o: &StabilityOutcome<L>) -> Self {
        match o {
            StabilityOutcome::Exact { index, witness } => {
                StabilityJson { exact: true, index: *index, witness: WitnessJson::new(witness), reason: None }
            }
            StabilityOutcome::AtLeast { lower, witness, reason } => StabilityJson {
                exact: false,
                index: *lower,
                witness: WitnessJson::new(witness),
                reason: Some(reason.clone()),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VcJson {
    pub dimension: usize,
    pub witness: Vec<usize>,
    pub exhaustive: bool,
}

impl From<&VcCertificate> for VcJson {
    fn from(c: &VcCertificate) -> Self {
        VcJson { dimension: c.dimension, witness: c.witness.clone(), exhaustive: c.exhaustive }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileEntryJson {
    /// `|Ax △ A|`.
    pub count: usize,
    pub value: String,
    pub multiplicity: usize,
    pub sample: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileJson {
    pub domain: String,
    pub normalizer: usize,
    pub entries: Vec<ProfileEntryJson>,
}

impl<E: core::fmt::Debug + Clone> From<&StabilizerProfile<E>> for ProfileJson {
    fn from(p: &StabilizerProfile<E>) -> Self {
        let values = p.values();
        ProfileJson {
            domain: p.domain.clone(),
            normalizer: p.normalizer,
            entries: p
                .entries
                .iter()
                .zip(values)
                .map(|(e, v)| ProfileEntryJson {
                    count: e.count,
                    value: frac(&v),
                    multiplicity: e.multiplicity,
                    sample: format!("{:?}", e.sample),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeJson {
    pub group: String,
    pub order: usize,
    pub subset: Vec<usize>,
    pub stability: StabilityJson,
    pub is_coset: bool,
    pub vc_left: VcJson,
    pub vc_right: VcJson,
    pub profile: ProfileJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct RuzsaJson {
    pub cubed: usize,
    pub x_size: usize,
    pub a_size: usize,
    pub c: String,
    pub bound: String,
    pub holds: bool,
}

impl From<&RuzsaCheck> for RuzsaJson {
    fn from(r: &RuzsaCheck) -> Self {
        RuzsaJson {
            cubed: r.cubed,
            x_size: r.x_size,
            a_size: r.a_size,
            c: frac(&r.c),
            bound: frac(&r.bound),
            holds: r.holds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TriplingLedgerJson {
    pub h_subgroup: bool,
    pub h_in_a_inv_a: bool,
    pub stab_levels_agree: bool,
    pub a_in_ch: bool,
    pub cover_bound: Option<String>,
    pub cover_bound_holds: bool,
    pub paper_exponent: String,
    pub error_bound: String,
    pub error_below_epsilon: bool,
    pub error_below_eta: bool,
    pub dichotomy: bool,
    pub ruzsa: RuzsaJson,
    pub guard: Option<String>,
    pub epsilon_exceeds_guard: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverJson {
    pub rep: Vec<i64>,
    pub hits: usize,
    pub dense: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TriplingJson {
    pub group: String,
    pub subset: Vec<Vec<i64>>,
    pub epsilon: String,
    pub c: String,
    pub a_size: usize,
    pub x_size: usize,
    pub k: u64,
    pub k_source: &'static str,
    pub k_star: u64,
    pub k_star_source: &'static str,
    pub sigma: String,
    pub r: String,
    pub domain_size: usize,
    pub eta: EtaJson,
    pub h: Vec<Vec<i64>>,
    pub cover: Vec<CoverJson>,
    pub c_set: Vec<Vec<i64>>,
    pub d: Vec<Vec<i64>>,
    pub error_count: usize,
    pub ledger: TriplingLedgerJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyJson>,
}

pub fn encode_set<G: RepGroup>(g: &G, s: &ElementSet<G::Elem>) -> Vec<Vec<i64>> {
    s.iter().map(|x| g.encode(x)).collect()
}

impl TriplingJson {
    pub fn new<G: RepGroup>(g: &G, a: &ElementSet<G::Elem>, r: &TriplingReport<G::Elem>) -> Self {
        let l = &r.ledger;
        TriplingJson {
            group: r.group.clone(),
            subset: encode_set(g, a),
            epsilon: frac(&r.epsilon),
            c: frac(&r.c),
            a_size: r.a_size,
            x_size: r.x_size,
            k: r.k_used,
            k_source: k_source(r.k_source),
            k_star: r.k_star_used,
            k_star_source: k_star_source(r.k_star_source),
            sigma: r.sigma.describe(),
            r: frac(&r.r),
            domain_size: r.domain_size,
            eta: (&r.eta).into(),
            h: encode_set(g, &r.h),
            cover: r
                .cover
                .iter()
                .map(|c| CoverJson { rep: g.encode(&c.rep), hits: c.hits, dense: c.dense })
                .collect(),
            c_set: encode_set(g, &r.c_set),
            d: encode_set(g, &r.d),
            error_count: r.error_count,
            ledger: TriplingLedgerJson {
                h_subgroup: l.h_subgroup,
                h_in_a_inv_a: l.h_in_a_inv_a,
                stab_levels_agree: l.stab_levels_agree,
                a_in_ch: l.a_in_ch,
                cover_bound: l.cover_bound.as_ref().map(frac),
                cover_bound_holds: l.cover_bound_holds,
                paper_exponent: l.paper_exponent.clone(),
                error_bound: frac(&l.error_bound),
                error_below_epsilon: l.error_below_epsilon,
                error_below_eta: l.error_below_eta,
                dichotomy: l.dichotomy,
                ruzsa: (&l.ruzsa).into(),
                guard: l.guard.as_ref().map(frac),
                epsilon_exceeds_guard: l.epsilon_exceeds_guard,
            },
            verify: None,
        }
    }
}
