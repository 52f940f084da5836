//! Rendering and orchestration behind the `brieskorn` command line.
//!
//! Output is deterministic: rows are emitted in a fixed order and rationals
//! are written as reduced `num/den`.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::families::{enumerate_triplets, FamilyReport};
use crate::fast::{d_invariant, region_dump, DInvariantResult, Method, RegionSlice};
use crate::oracle::{initial_count, linear_lemmas_hold, oracle_d, OracleConfig};
use crate::plumbing::{AslGraph, PlumbingGraph};
use crate::triplet::Triplet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DMethod {
    Fast,
    Oracle,
    Both,
}

/// The d-invariant through the ASL plumbing and the brute-force oracle.
pub fn oracle_d_invariant(t: &Triplet, config: &OracleConfig) -> Result<DInvariantResult> {
    let graph = AslGraph::new(*t)?;
    let res = oracle_d(graph.graph(), config)?;
    DInvariantResult::from_max(*t, res.max_k_squared, None, Method::Oracle)
}

/// Returns the result plus, for [`DMethod::Both`], the agreement flag (a
/// disagreement is reported as [`Error::Mismatch`]).
pub fn compute_d(
    t: &Triplet,
    method: DMethod,
    config: &OracleConfig,
) -> Result<(DInvariantResult, Option<bool>)> {
    match method {
        DMethod::Fast => Ok((d_invariant(t)?, None)),
        DMethod::Oracle => Ok((oracle_d_invariant(t, config)?, None)),
        DMethod::Both => {
            let fast = d_invariant(t)?;
            let slow = oracle_d_invariant(t, config)?;
            if fast.d != slow.d {
                return Err(Error::Mismatch(format!(
                    "{t}: lattice scan gives d = {}, oracle gives d = {}",
                    fast.d, slow.d
                )));
            }
            Ok((fast, Some(true)))
        }
    }
}

pub fn d_json(res: &DInvariantResult, agreement: Option<bool>) -> Value {
    let t = res.triplet;
    let mut v = json!({
        "p": t.p(),
        "q": t.q(),
        "r": t.r(),
        "d": res.d,
        "method": res.method.as_str(),
        "argmax": res.argmax.map(|pt| json!({"a": pt.a, "m": pt.m})),
        "max_f": res.max_f.as_ref().map(|f| json_int(&f.to_string())),
        "qhb_obstructed": res.qhb_obstructed,
        "pretzel": res.pretzel_note,
    });
    if let Some(agree) = agreement {
        v["match"] = json!(agree);
    }
    v
}

// Big integers as JSON numbers; they always fit here, fall back to a string.
fn json_int(digits: &str) -> Value {
    digits
        .parse::<i64>()
        .map(Value::from)
        .unwrap_or_else(|_| Value::String(digits.to_owned()))
}

pub fn d_table(res: &DInvariantResult) -> String {
    let t = res.triplet;
    let argmax = res
        .argmax
        .map_or_else(|| "-".to_owned(), |pt| format!("({},{})", pt.a, pt.m));
    let max_f = res.max_f.as_ref().map_or_else(|| "-".to_owned(), ToString::to_string);
    format!(
        "triplet         {t}\n\
         d               {}\n\
         method          {}\n\
         argmax (a,m)    {argmax}\n\
         max f           {max_f}\n\
         qhb obstructed  {}\n\
         pretzel         {}\n",
        res.d,
        res.method.as_str(),
        res.qhb_obstructed,
        res.pretzel_note.unwrap_or("-"),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripletRow {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub s: u64,
    pub d: i64,
}

pub fn triplet_rows(p: u64) -> Result<Vec<TripletRow>> {
    enumerate_triplets(p)?
        .into_iter()
        .map(|t| {
            Ok(TripletRow { p: t.p(), q: t.q(), r: t.r(), s: t.q() - t.p(), d: d_invariant(&t)?.d })
        })
        .collect()
}

fn csv_string<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn triplets_csv(rows: &[TripletRow]) -> Result<String> {
    csv_string(&["p", "q", "r", "s", "d"], |w| {
        for row in rows {
            w.serialize(row)?;
        }
        Ok(())
    })
}

pub fn triplets_table(rows: &[TripletRow]) -> String {
    let mut out = format!("{:>8} {:>8} {:>12} {:>8} {:>10}\n", "p", "q", "r", "s", "d");
    for row in rows {
        out.push_str(&format!(
            "{:>8} {:>8} {:>12} {:>8} {:>10}\n",
            row.p, row.q, row.r, row.s, row.d
        ));
    }
    out
}

pub fn family_csv(report: &FamilyReport) -> Result<String> {
    let header = [
        "n", "p", "q", "r", "d_computed", "d_expected", "match", "argmax_a", "argmax_m",
    ];
    csv_string(&header, |w| {
        for row in &report.rows {
            let opt = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                row.n.to_string(),
                row.triplet.p().to_string(),
                row.triplet.q().to_string(),
                row.triplet.r().to_string(),
                row.d_computed.to_string(),
                opt(row.d_expected),
                row.matched.map(|m| m.to_string()).unwrap_or_default(),
                opt(row.argmax.map(|pt| pt.a)),
                opt(row.argmax.map(|pt| pt.m)),
            ])?;
        }
        Ok(())
    })
}

pub fn family_summary(report: &FamilyReport) -> String {
    let checked = report.rows.iter().filter(|r| r.matched.is_some()).count();
    let nonpositive = report.rows.iter().filter(|r| r.d_computed <= 0).count();
    format!(
        "family {}: {} rows, {} checked against closed form, {} mismatches, {} rows with d <= 0",
        report.name,
        report.rows.len(),
        checked,
        report.mismatches(),
        nonpositive
    )
}

pub const REGION_COLUMNS: [&str; 10] = [
    "m",
    "delta",
    "center_num",
    "center_den",
    "radius_sq_num",
    "radius_sq_den",
    "nearest_odd",
    "tie",
    "f_at_best",
    "in_region",
];

pub fn region_csv(slices: &[RegionSlice]) -> Result<String> {
    csv_string(&REGION_COLUMNS, |w| {
        for s in slices {
            w.write_record([
                s.m.to_string(),
                s.delta.to_string(),
                s.center.numer().to_string(),
                s.center.denom().to_string(),
                s.radius_sq.numer().to_string(),
                s.radius_sq.denom().to_string(),
                s.nearest_odd.to_string(),
                s.tie.to_string(),
                s.f_at_best.to_string(),
                s.in_region.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Region CSV plus a one-line summary of the global maximizer.
pub fn region_report(t: &Triplet) -> Result<(String, String)> {
    let slices = region_dump(t)?;
    let res = d_invariant(t)?;
    let pt = res.argmax.expect("odd p has a lattice maximizer");
    let summary = format!(
        "max f = {} at (a,m) = ({},{}), d = {}, region slices: {}",
        res.max_f.as_ref().expect("odd p"),
        pt.a,
        pt.m,
        res.d,
        slices
            .iter()
            .filter(|s| s.in_region)
            .map(|s| s.m.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    Ok((region_csv(&slices)?, summary))
}

pub fn graph_header(t: &Triplet) -> Vec<String> {
    let (q, r) = (t.q(), t.r());
    vec![
        format!("plumbing graph of Sigma{t}, {} vertices", q + r),
        format!("v0: weight -{}; v1: central -2 vertex", t.p()),
        format!("v2..v{q}: (q-1)-arm of -2 vertices, outward from v1"),
        format!("v{}..v{}: (r-1)-arm of -2 vertices, outward from v1", q + 1, q + r - 1),
    ]
}

pub fn graph_dot(t: &Triplet) -> Result<String> {
    let g = AslGraph::new(*t)?;
    let header = graph_header(t);
    let lines: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(g.graph().to_dot(&lines))
}

pub fn graph_json(t: &Triplet) -> Result<String> {
    AslGraph::new(*t)?.graph().to_json()
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckedTriplet {
    pub p: u64,
    pub q: u64,
    pub r: u64,
}

impl From<Triplet> for CheckedTriplet {
    fn from(t: Triplet) -> Self {
        CheckedTriplet { p: t.p(), q: t.q(), r: t.r() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheckRow {
    pub triplet: CheckedTriplet,
    pub d_oracle: Option<i64>,
    pub d_fast: i64,
    #[serde(rename = "match")]
    pub matched: bool,
    pub enumerated: u64,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkippedTriplet {
    pub triplet: CheckedTriplet,
    pub states: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearCheck {
    pub t: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheckReport {
    pub instances: Vec<OracleCheckRow>,
    pub skipped: Vec<SkippedTriplet>,
    pub linear: Vec<LinearCheck>,
    pub failures: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleCheckOptions {
    pub config: OracleConfig,
    pub max_p: u64,
    pub max_linear: usize,
    /// Perturb the `-p` weight before running the oracle (negative test).
    pub inject_fault: bool,
}

impl Default for OracleCheckOptions {
    fn default() -> Self {
        OracleCheckOptions {
            config: OracleConfig::default(),
            max_p: 5,
            max_linear: 10,
            inject_fault: false,
        }
    }
}

fn faulty(graph: &PlumbingGraph) -> Result<PlumbingGraph> {
    let mut weights = graph.weights().to_vec();
    weights[0] -= 1;
    PlumbingGraph::new(weights, graph.edges().to_vec())
}

/// Fast method against the oracle on every feasible triplet with
/// `p <= max_p`, plus the terminal-class checks on `A_1..A_max_linear`.
pub fn oracle_check(opts: &OracleCheckOptions) -> Result<OracleCheckReport> {
    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for p in 2..=opts.max_p {
        for t in enumerate_triplets(p)? {
            let asl = AslGraph::new(t)?;
            let graph = if opts.inject_fault { faulty(asl.graph())? } else { asl.into_graph() };
            let states = initial_count(&graph);
            if states > opts.config.enumeration_budget.into() {
                skipped.push(SkippedTriplet { triplet: t.into(), states: states.to_string() });
                continue;
            }
            let d_fast = d_invariant(&t)?.d;
            let start = Instant::now();
            let outcome = oracle_d(&graph, &opts.config).and_then(|res| {
                let d = DInvariantResult::from_max(t, res.max_k_squared, None, Method::Oracle)?.d;
                Ok((d, res.enumerated))
            });
            let seconds = start.elapsed().as_secs_f64();
            let row = match outcome {
                Ok((d, enumerated)) => OracleCheckRow {
                    triplet: t.into(),
                    d_oracle: Some(d),
                    d_fast,
                    matched: d == d_fast,
                    enumerated,
                    seconds,
                    error: None,
                },
                Err(e) => OracleCheckRow {
                    triplet: t.into(),
                    d_oracle: None,
                    d_fast,
                    matched: false,
                    enumerated: 0,
                    seconds,
                    error: Some(e.to_string()),
                },
            };
            instances.push(row);
        }
    }
    let linear = (1..=opts.max_linear)
        .map(|t| Ok(LinearCheck { t, ok: linear_lemmas_hold(t)? }))
        .collect::<Result<Vec<_>>>()?;
    let failures = instances.iter().filter(|r| !r.matched).count()
        + linear.iter().filter(|l| !l.ok).count();
    Ok(OracleCheckReport { instances, skipped, linear, failures })
}
