//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::code::{min_distance, CodeRecord, InitialVector};
use crate::error::{Error, Result};
use crate::ivp::{optimal_initial_vector, LpStatus};
use crate::lattice::{
    enumerate_lattices, group_elements, isomorphism_class, lattice_from_generators, DedupRule,
    DiagonalBound, EnumerationOptions, GroupElementTable,
};
use crate::search::{
    count_estimates, search_optimum_odd, search_with_candidates, CandidateEvaluation, OddDimCode,
    SearchOptions, SearchParams,
};

pub const SCHEMA_VERSION: &str = "1";
pub const CSV_HEADER: &str = "M,n,d_min,deltas,factors,generators";

/// Largest group `evaluate` will close under addition.
pub const EVALUATE_LIMIT: u64 = 1 << 22;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "groupcode",
    version,
    about = "Search for commutative group codes with largest minimum distance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Best code of order M in dimension n.
    Search(SearchCmd),
    /// Candidate lattices for (M, n).
    Enumerate(EnumerateCmd),
    /// Distance of the code generated by given exponent vectors.
    Evaluate(EvaluateCmd),
    /// One optimum per order, in table form.
    Table(TableCmd),
    /// Counting estimates and tested-candidate counts.
    Estimate(EstimateCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DedupArg {
    Adam,
    Isometry,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiagonalsArg {
    Strict,
    Inclusive,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Significant digits for reals.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=17))]
    precision: u32,
}

#[derive(Args, Debug, Clone)]
struct EnumArgs {
    /// Isometry filter applied to the raw candidates.
    #[arg(long, value_enum)]
    dedupe: Option<DedupArg>,
    /// Test every raw candidate (same as `--dedupe none`).
    #[arg(long, conflicts_with = "dedupe")]
    no_dedupe: bool,
    #[arg(long, value_enum, default_value_t = DiagonalsArg::Strict)]
    diagonals: DiagonalsArg,
    #[arg(long)]
    threads: Option<usize>,
}

impl EnumArgs {
    fn options(&self) -> EnumerationOptions {
        let dedup = if self.no_dedupe {
            DedupRule::None
        } else {
            match self.dedupe {
                Some(DedupArg::Adam) | None => DedupRule::Adam,
                Some(DedupArg::Isometry) => DedupRule::Isometry,
                Some(DedupArg::None) => DedupRule::None,
            }
        };
        let bound = match self.diagonals {
            DiagonalsArg::Strict => DiagonalBound::Strict,
            DiagonalsArg::Inclusive => DiagonalBound::Inclusive,
        };
        EnumerationOptions { bound, dedup }
    }

    fn echo(&self, p: &mut ParamsEcho) {
        let o = self.options();
        p.dedupe = Some(dedup_name(o.dedup).into());
        p.diagonals = Some(
            match o.bound {
                DiagonalBound::Strict => "strict",
                DiagonalBound::Inclusive => "inclusive",
            }
            .into(),
        );
        p.threads = self.threads;
    }
}

fn dedup_name(d: DedupRule) -> &'static str {
    match d {
        DedupRule::Adam => "adam",
        DedupRule::Isometry => "isometry",
        DedupRule::None => "none",
    }
}

#[derive(Args, Debug)]
struct SearchCmd {
    #[arg(long)]
    points: u64,
    #[arg(long)]
    dim: usize,
    /// Also emit every tested candidate with its distance.
    #[arg(long)]
    list_candidates: bool,
    #[command(flatten)]
    enumeration: EnumArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct EnumerateCmd {
    #[arg(long)]
    points: u64,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    count_only: bool,
    #[command(flatten)]
    enumeration: EnumArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct EvaluateCmd {
    #[arg(long)]
    points: u64,
    /// Exponent vectors, e.g. "1,11" or "0,20;5,10".
    #[arg(long)]
    generators: String,
    /// Radii "δ1,...,δk"; rescaled to unit norm. Without it the LP optimum is used.
    #[arg(long)]
    initial_vector: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct TableCmd {
    #[arg(long)]
    dim: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    points: Vec<u64>,
    #[command(flatten)]
    enumeration: EnumArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct EstimateCmd {
    #[arg(long, value_delimiter = ',', required = true)]
    points: Vec<u64>,
    #[arg(long)]
    dim: usize,
    #[command(flatten)]
    enumeration: EnumArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// Top-level JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord<R> {
    pub schema_version: String,
    pub command: String,
    pub params: ParamsEcho,
    pub result: R,
    pub counts: Option<Counts>,
    pub timing_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub points: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_vector: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dedupe: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonals: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub list_candidates: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub count_only: bool,
    pub precision: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub raw: usize,
    pub tested: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejected: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isometry_classes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layering {
    pub theta: f64,
    pub base_order: u64,
    pub base_min_distance: f64,
    pub orbit_min_distance: Option<f64>,
}

/// One code in output form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSummary {
    #[serde(rename = "M")]
    pub order: u64,
    pub n: usize,
    pub min_distance: f64,
    pub group: String,
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<Vec<u64>>,
    /// Sign on the last coordinate for each generator (odd dimension only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflection_signs: Option<Vec<i8>>,
    /// Radii `δ_j`, then the last-coordinate value in odd dimension.
    pub initial_vector: Vec<f64>,
    pub lattice: Vec<Vec<i64>>,
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layered: Option<Layering>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<CandidateSummary>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(flatten)]
    pub code: CodeSummary,
    /// Always null: the upper bound column is not computed.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub lattice: Vec<Vec<i64>>,
    pub min_distance: f64,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerateResult {
    pub raw: usize,
    pub deduped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<LatticeSummary>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSummary {
    pub diagonal: Vec<u64>,
    pub lattice: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    #[serde(rename = "M")]
    pub order: u64,
    pub n: usize,
    pub binomial: Option<u64>,
    pub adam_estimate: Option<u64>,
    pub tested_cyclic: usize,
    pub tested_commutative: usize,
}

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1) as usize, x)
        .parse()
        .unwrap_or(x)
}

fn round_all(v: &[f64], digits: u32) -> Vec<f64> {
    v.iter().map(|&x| round_sig(x, digits)).collect()
}

impl CodeSummary {
    fn from_record(r: &CodeRecord, digits: u32) -> Self {
        CodeSummary {
            order: r.order,
            n: r.dim,
            min_distance: round_sig(r.min_distance, digits),
            group: r.group.clone(),
            invariant_factors: r.presentation.invariant_factors.clone(),
            generators: r.presentation.generators.clone(),
            reflection_signs: None,
            initial_vector: round_all(&r.initial_vector.deltas, digits),
            lattice: r.lattice.clone(),
            degenerate: r.degenerate,
            layered: None,
            candidates: None,
        }
    }

    fn from_odd(c: &OddDimCode, digits: u32) -> Self {
        let m = c.order;
        let mut generators: Vec<Vec<u64>> = c
            .base
            .presentation
            .generators
            .iter()
            .map(|g| g.iter().map(|x| (2 * x) % m).collect())
            .collect();
        let mut signs = vec![1i8; generators.len()];
        generators.push(vec![
            0;
            c.base
                .presentation
                .generators
                .first()
                .map_or(c.dim / 2, Vec::len)
        ]);
        signs.push(-1);
        let (s, cth) = c.theta.sin_cos();
        let mut radii: Vec<f64> = c
            .base
            .initial_vector
            .deltas
            .iter()
            .map(|d| d * cth)
            .collect();
        radii.push(s);
        CodeSummary {
            order: m,
            n: c.dim,
            min_distance: round_sig(c.min_distance, digits),
            group: c.group_label(),
            invariant_factors: c.invariant_factors.clone(),
            generators,
            reflection_signs: Some(signs),
            initial_vector: round_all(&radii, digits),
            lattice: c.base.lattice.clone(),
            degenerate: c.base.degenerate,
            layered: Some(Layering {
                theta: round_sig(c.theta, digits),
                base_order: c.base.order,
                base_min_distance: round_sig(c.base.min_distance, digits),
                orbit_min_distance: c.orbit_min_distance.map(|d| round_sig(d, digits)),
            }),
            candidates: None,
        }
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.order.to_string(),
            self.n.to_string(),
            self.min_distance.to_string(),
            join_list(&self.initial_vector),
            join_list(&self.invariant_factors),
            self.generators
                .iter()
                .enumerate()
                .map(|(i, g)| match &self.reflection_signs {
                    // odd dimension: the last-coordinate sign follows the exponents
                    Some(signs) => format!("{} {}", join_vector(g), signs[i]),
                    None => join_vector(g),
                })
                .collect::<Vec<_>>()
                .join(";"),
        ]
    }
}

fn join_list<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn join_vector<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_matrix(rows: &[Vec<i64>]) -> String {
    rows.iter()
        .map(|r| join_vector(r))
        .collect::<Vec<_>>()
        .join(";")
}

fn candidate_summaries(evals: &[CandidateEvaluation], digits: u32) -> Vec<CandidateSummary> {
    evals
        .iter()
        .map(|e| CandidateSummary {
            lattice: e.lattice.clone(),
            min_distance: round_sig(e.min_distance, digits),
            deltas: round_all(&e.deltas, digits),
        })
        .collect()
}

struct Emitted {
    json: String,
    csv: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NumericalFailure(_) | Error::Internal(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn document<R: Serialize>(
    command: &str,
    params: ParamsEcho,
    result: R,
    counts: Option<Counts>,
    start: Instant,
) -> Result<String> {
    let record = OutputRecord {
        schema_version: SCHEMA_VERSION.into(),
        command: command.into(),
        params,
        result,
        counts,
        timing_ms: round_sig(start.elapsed().as_secs_f64() * 1e3, 6),
    };
    serde_json::to_string_pretty(&record).map_err(|e| Error::Internal(e.to_string()))
}

fn search_params(points: u64, dim: usize, e: &EnumArgs, keep_all: bool) -> SearchParams {
    SearchParams::new(points, dim).with_options(SearchOptions {
        threads: e.threads,
        keep_all,
        enumeration: e.options(),
    })
}

fn find_code(params: &SearchParams, digits: u32) -> Result<(CodeSummary, Counts)> {
    params.validate()?;
    if params.dim % 2 == 1 {
        let c = search_optimum_odd(params)?;
        let counts = Counts {
            raw: c.base.raw_count,
            tested: c.base.tested_count,
            rejected: None,
            isometry_classes: None,
        };
        Ok((CodeSummary::from_odd(&c, digits), counts))
    } else {
        let out = search_with_candidates(params)?;
        let mut s = CodeSummary::from_record(&out.record, digits);
        if params.options.keep_all {
            s.candidates = Some(candidate_summaries(&out.evaluations, digits));
        }
        let counts = Counts {
            raw: out.record.raw_count,
            tested: out.record.tested_count,
            rejected: None,
            isometry_classes: None,
        };
        Ok((s, counts))
    }
}

fn cmd_search(c: &SearchCmd) -> Result<Emitted> {
    let start = Instant::now();
    let digits = c.output.precision;
    let params = search_params(c.points, c.dim, &c.enumeration, c.list_candidates);
    let (summary, counts) = find_code(&params, digits)?;
    let mut echo = ParamsEcho {
        points: vec![c.points],
        dim: Some(c.dim),
        list_candidates: c.list_candidates,
        precision: digits,
        ..Default::default()
    };
    c.enumeration.echo(&mut echo);

    let mut csv = csv_text(
        &CSV_HEADER.split(',').collect::<Vec<_>>(),
        &[summary.csv_row()],
    )?;
    if let Some(cands) = &summary.candidates {
        let rows: Vec<Vec<String>> = cands
            .iter()
            .map(|x| {
                vec![
                    join_matrix(&x.lattice),
                    x.min_distance.to_string(),
                    join_list(&x.deltas),
                ]
            })
            .collect();
        csv.push('\n');
        csv.push_str(&csv_text(&["lattice", "d_min", "deltas"], &rows)?);
    }
    Ok(Emitted {
        json: document("search", echo, summary, Some(counts), start)?,
        csv,
    })
}

fn cmd_enumerate(c: &EnumerateCmd) -> Result<Emitted> {
    let start = Instant::now();
    let params = SearchParams::new(c.points, c.dim);
    params.validate()?;
    if c.dim % 2 == 1 {
        return Err(Error::InvalidDimension(format!(
            "enumeration needs even n (got {})",
            c.dim
        )));
    }
    let opts = c.enumeration.options();
    let set = crate::search::with_threads(c.enumeration.threads, || {
        Ok(enumerate_lattices(c.points, c.dim / 2, &opts))
    })?;
    let candidates: Vec<LatticeSummary> = set
        .candidates
        .iter()
        .map(|x| LatticeSummary {
            diagonal: x.diagonal(),
            lattice: x.rows_i64(),
        })
        .collect();
    let result = EnumerateResult {
        raw: set.raw_count,
        deduped: set.candidates.len(),
        candidates: (!c.count_only).then(|| candidates.clone()),
    };
    let mut echo = ParamsEcho {
        points: vec![c.points],
        dim: Some(c.dim),
        count_only: c.count_only,
        precision: c.output.precision,
        ..Default::default()
    };
    c.enumeration.echo(&mut echo);
    let counts = Counts {
        raw: set.raw_count,
        tested: set.candidates.len(),
        rejected: Some(set.rejected_count),
        isometry_classes: Some(set.isometry_classes),
    };
    let m = c.points.to_string();
    let n = c.dim.to_string();
    let csv = if c.count_only {
        csv_text(
            &["M", "n", "raw", "deduped"],
            &[vec![
                m,
                n,
                result.raw.to_string(),
                result.deduped.to_string(),
            ]],
        )?
    } else {
        let rows: Vec<Vec<String>> = candidates
            .iter()
            .map(|x| {
                vec![
                    m.clone(),
                    n.clone(),
                    join_list(&x.diagonal),
                    join_matrix(&x.lattice),
                ]
            })
            .collect();
        csv_text(&["M", "n", "diagonal", "lattice"], &rows)?
    };
    Ok(Emitted {
        json: document("enumerate", echo, result, Some(counts), start)?,
        csv,
    })
}

/// `"1,11;0,5"` into exponent vectors.
pub fn parse_generators(s: &str) -> Result<Vec<Vec<i64>>> {
    let gens: Vec<Vec<i64>> = s
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::InvalidParameter(format!("bad generator entry {x:?}")))
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<_>>()?;
    let k = gens.first().map_or(0, Vec::len);
    if k == 0 || gens.iter().any(|g| g.len() != k) {
        return Err(Error::InvalidParameter(
            "generators must be nonempty vectors of equal length".into(),
        ));
    }
    Ok(gens)
}

fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad real {x:?}")))
        })
        .collect()
}

fn cmd_evaluate(c: &EvaluateCmd) -> Result<Emitted> {
    let start = Instant::now();
    let digits = c.output.precision;
    let m = c.points;
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "order must be at least 2 (got M = {m})"
        )));
    }
    if m > EVALUATE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "order {m} exceeds the evaluation limit {EVALUATE_LIMIT}"
        )));
    }
    let gens = parse_generators(&c.generators)?;
    let k = gens[0].len();
    let closure = GroupElementTable::closure(&gens, m);
    if closure.len() as u64 != m {
        return Err(Error::WrongOrder {
            expected: m,
            actual: closure.len() as u64,
        });
    }
    let t = lattice_from_generators(&gens, m);
    let presentation = isomorphism_class(&t, m)?;
    let table = group_elements(&t, m)?;

    let (vector, d, degenerate, given) = match &c.initial_vector {
        Some(s) => {
            let raw = parse_reals(s)?;
            if raw.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "{} radii for {k} blocks",
                    raw.len()
                )));
            }
            let v = InitialVector::normalized(raw.clone())?;
            let d = min_distance(&table, m, &v);
            let degenerate = v.deltas.contains(&0.0);
            (v, d, degenerate, Some(raw))
        }
        None => {
            let best = optimal_initial_vector(&table, m)?;
            let degenerate = best.solution.status == LpStatus::DegenerateFlagged;
            (best.vector, best.min_distance, degenerate, None)
        }
    };
    let summary = CodeSummary {
        order: m,
        n: 2 * k,
        min_distance: round_sig(d, digits),
        group: presentation.label(),
        invariant_factors: presentation.invariant_factors.clone(),
        generators: presentation.generators.clone(),
        reflection_signs: None,
        initial_vector: round_all(&vector.deltas, digits),
        lattice: t.to_i64_rows().unwrap_or_default(),
        degenerate,
        layered: None,
        candidates: None,
    };
    let echo = ParamsEcho {
        points: vec![m],
        generators: Some(gens),
        initial_vector: given,
        precision: digits,
        ..Default::default()
    };
    let csv = csv_text(
        &CSV_HEADER.split(',').collect::<Vec<_>>(),
        &[summary.csv_row()],
    )?;
    Ok(Emitted {
        json: document("evaluate", echo, summary, None, start)?,
        csv,
    })
}

fn cmd_table(c: &TableCmd) -> Result<Emitted> {
    let start = Instant::now();
    let digits = c.output.precision;
    let mut rows = Vec::with_capacity(c.points.len());
    for &m in &c.points {
        let params = search_params(m, c.dim, &c.enumeration, false);
        let (code, _) = find_code(&params, digits)?;
        rows.push(TableRow { code, bound: None });
    }
    let mut echo = ParamsEcho {
        points: c.points.clone(),
        dim: Some(c.dim),
        precision: digits,
        ..Default::default()
    };
    c.enumeration.echo(&mut echo);
    let mut header: Vec<&str> = CSV_HEADER.split(',').collect();
    header.push("bound");
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = r.code.csv_row();
            v.push(String::new());
            v
        })
        .collect();
    Ok(Emitted {
        json: document("table", echo, rows, None, start)?,
        csv: csv_text(&header, &csv_rows)?,
    })
}

fn cmd_estimate(c: &EstimateCmd) -> Result<Emitted> {
    let start = Instant::now();
    let opts = c.enumeration.options();
    let mut rows = Vec::with_capacity(c.points.len());
    for &m in &c.points {
        let e = crate::search::with_threads(c.enumeration.threads, || {
            count_estimates(m, c.dim, &opts)
        })?;
        rows.push(EstimateRow {
            order: m,
            n: c.dim,
            binomial: e.binomial.and_then(|x| u64::try_from(x).ok()),
            adam_estimate: e.adam_estimate.and_then(|x| u64::try_from(x).ok()),
            tested_cyclic: e.tested_cyclic,
            tested_commutative: e.tested_commutative,
        });
    }
    let mut echo = ParamsEcho {
        points: c.points.clone(),
        dim: Some(c.dim),
        precision: c.output.precision,
        ..Default::default()
    };
    c.enumeration.echo(&mut echo);
    let opt = |x: Option<u64>| x.map_or(String::new(), |v| v.to_string());
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.order.to_string(),
                r.n.to_string(),
                opt(r.binomial),
                opt(r.adam_estimate),
                r.tested_cyclic.to_string(),
                r.tested_commutative.to_string(),
            ]
        })
        .collect();
    let csv = csv_text(
        &[
            "M",
            "n",
            "binomial",
            "adam_estimate",
            "tested_cyclic",
            "tested_commutative",
        ],
        &csv_rows,
    )?;
    Ok(Emitted {
        json: document("estimate", echo, rows, None, start)?,
        csv,
    })
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let (emitted, format) = match &cli.command {
        Command::Search(c) => (cmd_search(c), c.output.format),
        Command::Enumerate(c) => (cmd_enumerate(c), c.output.format),
        Command::Evaluate(c) => (cmd_evaluate(c), c.output.format),
        Command::Table(c) => (cmd_table(c), c.output.format),
        Command::Estimate(c) => (cmd_estimate(c), c.output.format),
    };
    match emitted {
        Ok(e) => {
            let text = match format {
                Format::Json => e.json + "\n",
                Format::Csv => e.csv,
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_NUMERICAL;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
