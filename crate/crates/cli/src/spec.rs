//! Task descriptions: group names, subset specs, cap overrides and the JSON
//! config file.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use stabreg_core::rational::parse_rational;
use stabreg_core::regularity::{DecomposeOptions, KMode};
use stabreg_core::repgroup::{ElementSet, RepGroup};
use stabreg_core::subset::Subgroup;
use stabreg_core::{build_group, Caps, Element, Error, FiniteGroup, GroupSubset, Rational, Result};

/// Environment variable holding cap overrides, e.g. `half_graph_k=9,max_order=64`.
pub const CAPS_ENV: &str = "STABREG_CAPS";

/// Applies `key=value` pairs separated by commas.
pub fn apply_cap_overrides(caps: &mut Caps, text: &str) -> Result<()> {
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("cap override {item:?} is not key=value")))?;
        set_cap(caps, key.trim(), value.trim())?;
    }
    Ok(())
}

fn set_cap(caps: &mut Caps, key: &str, value: &str) -> Result<()> {
    let v: u64 = value.parse().map_err(|_| Error::Config(format!("cap {key} needs an integer, got {value:?}")))?;
    let as_usize = || usize::try_from(v).map_err(|_| Error::Config(format!("cap {key} = {v} is too large")));
    match key {
        "max_order" => caps.max_order = as_usize()?,
        "full_assoc_order" => caps.full_assoc_order = as_usize()?,
        "assoc_samples" => caps.assoc_samples = as_usize()?,
        "half_graph_rows" => caps.half_graph_rows = as_usize()?,
        "half_graph_columns" => caps.half_graph_columns = as_usize()?,
        "half_graph_k" => caps.half_graph_k = as_usize()?,
        "vc_ground" => caps.vc_ground = as_usize()?,
        "vca_constant" => caps.vca_constant = v,
        "retries" => caps.retries = as_usize()?,
        "product_evaluations" => caps.product_evaluations = v,
        _ => return Err(Error::Config(format!("unknown cap {key:?}"))),
    }
    Ok(())
}

/// Default caps, then the config file's `caps`, then the environment.
pub fn resolve_caps(config: Option<&BTreeMap<String, u64>>) -> Result<Caps> {
    let mut caps = Caps::default();
    if let Some(map) = config {
        for (k, v) in map {
            set_cap(&mut caps, k, &v.to_string())?;
        }
    }
    if let Ok(text) = std::env::var(CAPS_ENV) {
        apply_cap_overrides(&mut caps, &text)?;
    }
    Ok(caps)
}

/// A finite group from the DSL, or from a Cayley-table file
/// `{ "order": n, "mul": [[...]] }` when the name ends in `.json`.
pub fn load_group(spec: &str, caps: &Caps) -> Result<FiniteGroup> {
    if spec.ends_with(".json") {
        #[derive(Deserialize)]
        struct Table {
            order: usize,
            mul: Vec<Vec<usize>>,
        }
        let text = std::fs::read_to_string(spec).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
        let t: Table = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
        if t.mul.len() != t.order {
            return Err(Error::InvalidTable(format!("order {} but {} rows", t.order, t.mul.len())));
        }
        let name = Path::new(spec).file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
        return FiniteGroup::from_table(name, t.mul, caps);
    }
    build_group(spec, caps)
}

fn element(group: &FiniteGroup, s: &str) -> Result<Element> {
    let x: usize = s.trim().parse().map_err(|_| Error::Parse(format!("bad element {s:?}")))?;
    if x >= group.order() {
        return Err(Error::Parse(format!("element {x} out of range for order {}", group.order())));
    }
    Ok(x)
}

fn elements(group: &FiniteGroup, s: &str, sep: char) -> Result<Vec<Element>> {
    s.split(sep).map(str::trim).filter(|t| !t.is_empty()).map(|t| element(group, t)).collect()
}

fn seeded(seed: &str) -> Result<ChaCha8Rng> {
    let s: u64 = seed.trim().parse().map_err(|_| Error::Parse(format!("bad seed {seed:?}")))?;
    Ok(ChaCha8Rng::seed_from_u64(s))
}

/// Parses a subset spec:
///
/// * `0,3,5` or `{0,3,5}` (explicit), `{}` or `empty`, `all`, `mask:0x…`
/// * `coset:g,h1;h2` for `g⟨h1, h2⟩`
/// * `union-cosets:h1;h2,g1;g2` for `⋃ g_i⟨h1, h2⟩`
/// * `random:p,seed`, each element kept with probability `p`
/// * `perturb:base,t,seed`, exactly `t` membership bits of `base` flipped
pub fn parse_subset(group: &FiniteGroup, spec: &str) -> Result<GroupSubset> {
    let n = group.order();
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("coset:") {
        let (g, gens) = rest.split_once(',').unwrap_or((rest, ""));
        let g = element(group, g)?;
        let h = Subgroup::generated(group, &elements(group, gens, ';')?)?;
        return h.carrier().translate_left(group, g);
    }
    if let Some(rest) = spec.strip_prefix("union-cosets:") {
        let (gens, reps) =
            rest.split_once(',').ok_or_else(|| Error::Parse(format!("union-cosets needs gens,reps: {rest:?}")))?;
        let h = Subgroup::generated(group, &elements(group, gens, ';')?)?;
        let mut out = GroupSubset::empty(n);
        for g in elements(group, reps, ';')? {
            out = out.union(&h.carrier().translate_left(group, g)?)?;
        }
        return Ok(out);
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let (p, seed) = rest.split_once(',').ok_or_else(|| Error::Parse(format!("random needs p,seed: {rest:?}")))?;
        let p = parse_rational(p.trim())?;
        if p < Rational::from_integer(0.into()) || p > Rational::from_integer(1.into()) {
            return Err(Error::Parse(format!("probability {p} outside [0, 1]")));
        }
        let (num, den) = (
            u32::try_from(p.numer()).map_err(|_| Error::Parse("probability numerator too large".into()))?,
            u32::try_from(p.denom()).map_err(|_| Error::Parse("probability denominator too large".into()))?,
        );
        let mut rng = seeded(seed)?;
        return Ok(GroupSubset::from_predicate(n, |_| rng.gen_ratio(num, den)));
    }
    if let Some(rest) = spec.strip_prefix("perturb:") {
        let mut parts = rest.rsplitn(3, ',');
        let (seed, t, base) = match (parts.next(), parts.next(), parts.next()) {
            (Some(s), Some(t), Some(b)) => (s, t, b),
            _ => return Err(Error::Parse(format!("perturb needs base,t,seed: {rest:?}"))),
        };
        let mut a = parse_subset(group, base)?;
        let t: usize = t.trim().parse().map_err(|_| Error::Parse(format!("bad flip count {t:?}")))?;
        if t > n {
            return Err(Error::Parse(format!("cannot flip {t} of {n} bits")));
        }
        let mut all: Vec<Element> = (0..n).collect();
        let mut rng = seeded(seed)?;
        let (chosen, _) = all.partial_shuffle(&mut rng, t);
        chosen.sort_unstable();
        for &x in chosen.iter() {
            a.toggle(x);
        }
        return Ok(a);
    }
    if let Some(rest) = spec.strip_prefix("mask:") {
        let digits = rest.trim().trim_start_matches("0x");
        let mask = u64::from_str_radix(digits, 16).map_err(|_| Error::Parse(format!("bad mask {rest:?}")))?;
        if n < 64 && mask >> n != 0 {
            return Err(Error::Parse(format!("mask {rest} has bits beyond order {n}")));
        }
        return Ok(GroupSubset::from_mask(n, mask));
    }
    match spec {
        "all" => return Ok(GroupSubset::full(n)),
        "empty" | "{}" | "" => return Ok(GroupSubset::empty(n)),
        _ => {}
    }
    let inner = spec.trim_start_matches('{').trim_end_matches('}');
    GroupSubset::from_elements(n, elements(group, inner, ',')?)
}

/// `mask:0x…` form of a subset of a group of order at most 64.
pub fn mask_spec(a: &GroupSubset) -> String {
    let mask = a.iter().fold(0u64, |m, x| m | 1 << x);
    format!("mask:0x{mask:x}")
}

/// Parses `[[…], …]`, `interval:lo,hi` (first coordinate, others zero) or a
/// `+`-separated union of `fiber:v1;v2|subset-spec` terms for `ℤ^d × F`.
pub fn parse_element_set<G: RepGroup>(g: &G, spec: &str, finite: Option<&FiniteGroup>) -> Result<ElementSet<G::Elem>> {
    let spec = spec.trim();
    if spec.starts_with('[') {
        let tuples: Vec<Vec<i64>> =
            serde_json::from_str(spec).map_err(|e| Error::Parse(format!("element list: {e}")))?;
        return tuples.iter().map(|t| g.decode(t)).collect();
    }
    if let Some(rest) = spec.strip_prefix("interval:") {
        let (lo, hi) = rest.split_once(',').ok_or_else(|| Error::Parse(format!("interval needs lo,hi: {rest:?}")))?;
        let parse = |s: &str| s.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad bound {s:?}")));
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        let width = g.encode(&g.identity()).len();
        return (lo..=hi)
            .map(|x| {
                let mut v = vec![0; width];
                v[0] = x;
                g.decode(&v)
            })
            .collect();
    }
    let mut out = ElementSet::new();
    for term in spec.split('+').map(str::trim) {
        let rest = term
            .strip_prefix("fiber:")
            .ok_or_else(|| Error::Parse(format!("unknown element-set term {term:?}")))?;
        let f = finite.ok_or_else(|| Error::Parse("fiber terms need a group Z^d x F".into()))?;
        let (coords, sub) = rest.split_once('|').ok_or_else(|| Error::Parse(format!("fiber needs v|subset: {rest:?}")))?;
        let base: Vec<i64> = coords
            .split(';')
            .map(|s| s.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad coordinate {s:?}"))))
            .collect::<Result<_>>()?;
        for x in parse_subset(f, sub)?.iter() {
            let mut v = base.clone();
            v.push(x as i64);
            out.insert(g.decode(&v)?);
        }
    }
    Ok(out)
}

/// How `k` is chosen, mirroring `--mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeFlag {
    /// Compute the stability index.
    Exact,
    /// Use `--k`, checked against the set.
    Supplied,
    /// Use `--k` without checking it.
    Override,
}

pub fn decompose_options(mode: ModeFlag, k: Option<u64>, caps: &Caps) -> Result<DecomposeOptions> {
    let need_k = || k.ok_or_else(|| Error::Config("--k is required with --mode supplied/override".into()));
    let (mode, unchecked) = match mode {
        ModeFlag::Exact => (KMode::Exact, false),
        ModeFlag::Supplied => (KMode::Supplied(need_k()?), false),
        ModeFlag::Override => (KMode::Supplied(need_k()?), true),
    };
    Ok(DecomposeOptions { mode, unchecked, caps: caps.clone(), ..DecomposeOptions::default() })
}

pub fn parse_epsilons(list: &[String]) -> Result<Vec<Rational>> {
    list.iter().map(|s| parse_rational(s.trim())).collect()
}

/// One sweep task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub group: String,
    pub subset: String,
    #[serde(default)]
    pub epsilons: Vec<String>,
    #[serde(default)]
    pub mode: Option<ModeFlag>,
    #[serde(default)]
    pub k: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

impl TaskSpec {
    /// Sort key used to canonicalize sweep output.
    pub fn key(&self) -> String {
        format!("{}|{}|{}", self.group, self.subset, self.epsilons.join(";"))
    }
}

/// Config file mirroring the command-line flags.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub epsilon: Option<Vec<String>>,
    pub k: Option<u64>,
    pub mode: Option<ModeFlag>,
    pub seed: Option<u64>,
    pub verify: Option<bool>,
    pub jobs: Option<usize>,
    pub out: Option<String>,
    pub caps: Option<BTreeMap<String, u64>>,
}

impl Config {
    pub fn load(path: &str) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{path}: {e}")))
    }
}
