//! Batch runs over task lists: each task and `ε` runs the decomposition, its
//! normal variant and the formula round trip, each checked independently.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use stabreg_core::definability::define_subgroup;
use stabreg_core::regularity::{decompose, decompose_normal};
use stabreg_core::verify::verify_report;
use stabreg_core::{Caps, Error, Rational, Result};

use crate::commands::exit_code;
use crate::dto::frac;
use crate::spec::{decompose_options, load_group, parse_epsilons, parse_subset, ModeFlag, TaskSpec};

/// Defaults applied to tasks that leave a field unset.
#[derive(Clone, Debug)]
pub struct SweepDefaults {
    pub epsilons: Vec<String>,
    pub mode: ModeFlag,
    pub k: Option<u64>,
    pub caps: Caps,
    pub timing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub task: String,
    pub group: String,
    pub subset: Vec<usize>,
    pub epsilon: String,
    /// `0` when every step succeeded, otherwise the exit code of the first failure.
    pub status: i32,
    pub message: String,
    pub k: Option<u64>,
    pub k_star: Option<u64>,
    pub h_size: Option<usize>,
    pub index: Option<usize>,
    pub error_count: Option<usize>,
    pub normal_index: Option<usize>,
    pub normal_error_count: Option<usize>,
    pub decompose_verified: Option<bool>,
    pub normal_verified: Option<bool>,
    pub dnf_round_trip: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub tasks: usize,
    pub rows: Vec<SweepRow>,
    pub failures: usize,
}

/// Reads a JSON array of tasks.
pub fn load_tasks(path: &Path) -> Result<Vec<TaskSpec>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn blank(task: &TaskSpec, group: String, eps: String) -> SweepRow {
    SweepRow {
        task: task.key(),
        group,
        subset: Vec::new(),
        epsilon: eps,
        status: 0,
        message: String::new(),
        k: None,
        k_star: None,
        h_size: None,
        index: None,
        error_count: None,
        normal_index: None,
        normal_error_count: None,
        decompose_verified: None,
        normal_verified: None,
        dnf_round_trip: None,
        millis: None,
    }
}

fn fail(row: &mut SweepRow, e: &Error) {
    if row.status == 0 {
        row.status = exit_code(e);
        row.message = e.to_string();
    }
}

fn steps(task: &TaskSpec, eps: &Rational, defaults: &SweepDefaults, row: &mut SweepRow) -> Result<()> {
    let opts = decompose_options(
        task.mode.unwrap_or(defaults.mode),
        task.k.or(defaults.k),
        &defaults.caps,
    )?;
    let g = load_group(&task.group, &defaults.caps)?;
    let a = parse_subset(&g, &task.subset)?;
    row.group = g.name().to_string();
    row.subset = a.to_vec();
    match decompose(&g, &a, eps, &opts) {
        Ok(r) => {
            let ok = verify_report(&g, &a, eps, &r).all_passed();
            row.k = Some(r.k_used);
            row.k_star = Some(r.k_star_used);
            row.h_size = Some(r.h.len());
            row.index = Some(r.index);
            row.error_count = Some(r.error_count);
            row.decompose_verified = Some(ok);
            if !ok {
                fail(
                    row,
                    &Error::TheoremViolation("decomposition failed verification".into()),
                );
            }
        }
        Err(e) => return Err(e),
    }
    match decompose_normal(&g, &a, eps, &opts) {
        Ok(r) => {
            let ok = verify_report(&g, &a, eps, &r).all_passed();
            row.normal_index = Some(r.index);
            row.normal_error_count = Some(r.error_count);
            row.normal_verified = Some(ok);
            if !ok {
                fail(
                    row,
                    &Error::TheoremViolation("normal decomposition failed verification".into()),
                );
            }
        }
        Err(e) => fail(row, &e),
    }
    match define_subgroup(&g, &a, eps, &opts, task.seed) {
        Ok(_) => row.dnf_round_trip = Some(true),
        Err(e) => {
            row.dnf_round_trip = Some(false);
            fail(row, &e);
        }
    }
    Ok(())
}

fn run_one(task: &TaskSpec, eps: &Rational, defaults: &SweepDefaults) -> SweepRow {
    let start = Instant::now();
    let mut row = blank(task, task.group.clone(), frac(eps));
    if let Err(e) = steps(task, eps, defaults, &mut row) {
        fail(&mut row, &e);
    }
    if defaults.timing {
        row.millis = Some(start.elapsed().as_millis() as u64);
    }
    row
}

/// Runs every task for each of its `ε` values; rows are ordered by task key
/// and then by position in the `ε` list, independent of `jobs`.
pub fn run_sweep(tasks: &[TaskSpec], defaults: &SweepDefaults) -> SweepResult {
    let mut order: Vec<&TaskSpec> = tasks.iter().collect();
    order.sort_by_key(|t| t.key());
    let mut units: Vec<(&TaskSpec, Result<Rational>)> = Vec::new();
    for task in order {
        let list = if task.epsilons.is_empty() {
            &defaults.epsilons
        } else {
            &task.epsilons
        };
        match parse_epsilons(list) {
            Ok(eps) => units.extend(eps.into_iter().map(|e| (task, Ok(e)))),
            Err(e) => units.push((task, Err(e))),
        }
    }
    let rows: Vec<SweepRow> = units
        .par_iter()
        .map(|(task, eps)| match eps {
            Ok(eps) => run_one(task, eps, defaults),
            Err(e) => {
                let mut row = blank(task, task.group.clone(), String::new());
                fail(&mut row, e);
                row
            }
        })
        .collect();
    let failures = rows.iter().filter(|r| r.status != 0).count();
    SweepResult {
        tasks: tasks.len(),
        rows,
        failures,
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Writes `sweep.csv` and `sweep.json`.
pub fn write_outputs(dir: &Path, result: &SweepResult) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
    let timing = result.rows.iter().any(|r| r.millis.is_some());
    let mut header = vec![
        "task",
        "group",
        "subset",
        "epsilon",
        "status",
        "k",
        "k_star",
        "h_size",
        "index",
        "error_count",
        "normal_index",
        "normal_error_count",
        "decompose_verified",
        "normal_verified",
        "dnf_round_trip",
        "message",
    ];
    if timing {
        header.push("millis");
    }
    w.write_record(&header)?;
    for r in &result.rows {
        let subset: Vec<String> = r.subset.iter().map(|x| x.to_string()).collect();
        let mut rec = vec![
            r.task.clone(),
            r.group.clone(),
            subset.join(" "),
            r.epsilon.clone(),
            r.status.to_string(),
            opt(r.k),
            opt(r.k_star),
            opt(r.h_size),
            opt(r.index),
            opt(r.error_count),
            opt(r.normal_index),
            opt(r.normal_error_count),
            opt(r.decompose_verified),
            opt(r.normal_verified),
            opt(r.dnf_round_trip),
            r.message.clone(),
        ];
        if timing {
            rec.push(opt(r.millis));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    let text = serde_json::to_string_pretty(result).expect("sweep result serializes");
    fs::write(dir.join("sweep.json"), text + "\n")
}
