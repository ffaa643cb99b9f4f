//! Command-line front end. [`run`] parses arguments, executes one command
//! and returns the JSON report with the process exit code.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::constructions::{
    build_nearring, builtin_maps, check_h16_conditions, check_h19_conditions, example1_maps, identity_index,
    select_general_variant, GeneralVariant, MapQuad, MulKind,
};
use crate::error::{Error, Result};
use crate::h1::{check_lemma_identities, compare_with_oracle, BinomialReading, LemmaReport};
use crate::nearring::{
    check_group_associativity, check_structural_lemmas, element_order_histogram, units_and_locality, verify_axioms,
    LemmaOptions, UnitSummary, VerifyMode, DEFAULT_TABLE_CAP,
};
use crate::pcgroup::{build_presentation, GroupId};
use crate::search::{search_local_nearrings, Pruning, SearchOptions, SearchStatus};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Orders up to this size default to exhaustive sweeps.
const AUTO_EXHAUSTIVE_CAP: usize = 625;
const ORACLE_SAMPLES: u64 = 1_000_000;
const VERIFY_SAMPLES: u64 = 10_000_000;

#[derive(Parser, Debug)]
#[command(name = "nearring", version, about = "Verify and search finite local nearrings")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub parallel: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a presentation by collection, and for h1 the closed forms and
    /// commutator identities.
    OracleCheck(OracleArgs),
    /// Build and fully verify the explicit local nearring on H1(p).
    VerifyExample(VerifyArgs),
    /// Build a nearring from coefficient maps and classify it.
    Construct(ConstructArgs),
    /// Search a small group for local nearrings with identity.
    Search(SearchArgs),
    /// Write a multiplication table as CSV.
    ExportTable(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Exhaustive up to order 625, sampled above.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Clone)]
pub struct ModeArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Random triples per law in sampled mode (default 10^6 for
    /// oracle-check, 10^7 otherwise).
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl ModeArgs {
    fn resolve(&self, order: usize, default_samples: u64) -> Result<VerifyMode> {
        match self.mode {
            ModeArg::Exhaustive if order > DEFAULT_TABLE_CAP => {
                Err(Error::CapExceeded { order, cap: DEFAULT_TABLE_CAP })
            }
            ModeArg::Exhaustive => Ok(VerifyMode::Exhaustive),
            ModeArg::Auto if order <= AUTO_EXHAUSTIVE_CAP => Ok(VerifyMode::Exhaustive),
            _ => Ok(VerifyMode::Sampled { count: self.samples.unwrap_or(default_samples), seed: self.seed }),
        }
    }
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// h1..h4, d16, qd16, q16, c16, g81-7..g81-10
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub p: Option<u32>,
    /// Random pairs for the closed-form comparison above order 625.
    #[arg(long, default_value_t = 1_000_000)]
    pub pairs: u64,
    #[command(flatten)]
    pub mode: ModeArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub p: u32,
    #[command(flatten)]
    pub mode: ModeArgs,
    /// Also write the multiplication table (orders up to 2401).
    #[arg(long)]
    pub table_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verdict {
    Local,
    NearringNotLocal,
    NotANearring,
}

impl Verdict {
    fn label(self) -> &'static str {
        match self {
            Verdict::Local => "LOCAL",
            Verdict::NearringNotLocal => "NEARRING-NOT-LOCAL",
            Verdict::NotANearring => "NOT-A-NEARRING",
        }
    }
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long)]
    pub p: u32,
    /// Builtin name (example1, trivial-beta1) or a CSV file of
    /// `index,alpha,beta,gamma,phi` rows.
    #[arg(long)]
    pub maps: String,
    #[command(flatten)]
    pub mode: ModeArgs,
    /// Exit 0 when the verdict matches instead of only for LOCAL.
    #[arg(long, value_enum)]
    pub expect: Option<Verdict>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PruningArg {
    Full,
    ClosureOnly,
    None,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub p: Option<u32>,
    /// Allow the order-81 groups.
    #[arg(long)]
    pub order81: bool,
    /// Wall-clock budget, e.g. `90s` or `2h`.
    #[arg(long, value_parser = humantime::parse_duration)]
    pub budget: Option<Duration>,
    #[arg(long, conflicts_with = "expect_some")]
    pub expect_none: bool,
    #[arg(long)]
    pub expect_some: bool,
    /// Accept nearrings with identity that are not local.
    #[arg(long)]
    pub no_local: bool,
    #[arg(long, value_enum, default_value_t = PruningArg::Full)]
    pub pruning: PruningArg,
    #[arg(long, default_value_t = 2)]
    pub split_depth: usize,
    #[arg(long)]
    pub max_results: Option<usize>,
    /// Resume from and save progress to this file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Write every result table to this directory.
    #[arg(long)]
    pub tables_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value = "example1")]
    pub maps: String,
    #[arg(long)]
    pub table_out: PathBuf,
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    /// JSON report, absent for usage errors.
    pub report: Option<Value>,
    /// Human-readable text for stderr (or stdout for help).
    pub message: Option<String>,
}

impl Outcome {
    fn usage(message: String) -> Self {
        Outcome { code: EXIT_USAGE, report: None, message: Some(message) }
    }
}

struct Timer(BTreeMap<String, f64>);

impl Timer {
    fn new() -> Self {
        Timer(BTreeMap::new())
    }

    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.insert(name.to_string(), start.elapsed().as_secs_f64());
        out
    }

    fn into_json(self) -> Value {
        json!(self.0)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_SUCCESS,
                _ => EXIT_USAGE,
            };
            return Outcome { code, report: None, message: Some(e.render().to_string()) };
        }
    };
    let outcome = match cli.parallel {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => return Outcome::usage(format!("thread pool: {e}")),
        },
        None => dispatch(&cli.command),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return Outcome::usage(format!("error: {e}")),
    };
    if let (Some(path), Some(report)) = (&cli.out, &outcome.report) {
        if let Err(e) = write_json(path, report) {
            return Outcome::usage(format!("error: {e}"));
        }
    }
    outcome
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::OracleCheck(a) => oracle_check(a),
        Command::VerifyExample(a) => verify_example(a),
        Command::Construct(a) => construct(a),
        Command::Search(a) => search(a),
        Command::ExportTable(a) => export_table(a),
    }
}

fn finish(pass: bool, report: Value) -> Outcome {
    Outcome { code: if pass { EXIT_SUCCESS } else { EXIT_VERIFICATION }, report: Some(report), message: None }
}

fn mode_json(mode: VerifyMode) -> Value {
    serde_json::to_value(mode).expect("plain enum")
}

fn lemma_summary(report: &LemmaReport) -> Value {
    let rows: Vec<Value> = report
        .identities
        .iter()
        .map(|r| {
            let poly = r.verdict(BinomialReading::Polynomial);
            let piece = r.verdict(BinomialReading::Piecewise);
            json!({
                "name": r.name,
                "statement": r.statement,
                "tuples": r.tuples_checked,
                "misprinted": LemmaReport::MISPRINTED.contains(&r.name),
                "polynomial": {"pass": poly.pass, "failures": poly.failures, "counterexample": poly.counterexample},
                "piecewise": {"pass": piece.pass, "failures": piece.failures, "counterexample": piece.counterexample},
            })
        })
        .collect();
    json!({"p": report.p, "holds": report.holds(), "identities": rows})
}

pub fn oracle_check(a: &OracleArgs) -> Result<Outcome> {
    let id = GroupId::parse(&a.group, a.p)?;
    let mut timer = Timer::new();
    let pres = build_presentation(id)?;
    let mode = a.mode.resolve(pres.order(), ORACLE_SAMPLES)?;
    let assoc = timer.time("associativity", || check_group_associativity(&pres, mode));
    let hist = element_order_histogram(&pres);
    let exponent = hist.last().map(|h| h.0).unwrap_or(1);
    let mut report = json!({
        "command": "oracle-check",
        "group": id.name(),
        "p": pres.prime(),
        "order": pres.order(),
        "seed": a.mode.seed,
        "mode": mode_json(mode),
        "associativity": assoc,
        "exponent": exponent,
        "element_orders": hist,
    });
    let mut pass = assoc.pass;
    if let GroupId::H1(p) = id {
        let pairs = (pres.order() > AUTO_EXHAUSTIVE_CAP).then_some((a.pairs, a.mode.seed));
        let closed = timer.time("closed_forms", || compare_with_oracle(p, pairs))?;
        let lemmas = timer.time("identities", || check_lemma_identities(p))?;
        pass &= closed.pass() && lemmas.holds();
        report["closed_forms"] = json!({
            "pairs_checked": closed.pairs_checked,
            "pass": closed.pass(),
            "add_mismatch": closed.add_mismatch,
            "neg_mismatch": closed.neg_mismatch,
            "smul_mismatch": closed.smul_mismatch,
        });
        report["identities"] = lemma_summary(&lemmas);
    }
    report["pass"] = json!(pass);
    report["timings"] = timer.into_json();
    Ok(finish(pass, report))
}

pub fn verify_example(a: &VerifyArgs) -> Result<Outcome> {
    let mut timer = Timer::new();
    let maps = example1_maps(a.p)?;
    let nr = build_nearring(Arc::new(maps.clone()), MulKind::Local)?;
    let n = nr.order();
    let mode = a.mode.resolve(n, VERIFY_SAMPLES)?;
    let axioms = timer.time("axioms", || verify_axioms(&nr, mode));
    let local = timer.time("units", || units_and_locality(&nr));
    let lemma_opts = LemmaOptions { seed: a.mode.seed, ..LemmaOptions::default() };
    let lemmas = timer.time("lemmas", || check_structural_lemmas(&nr, &local, lemma_opts));
    let conditions = timer.time("conditions", || check_h19_conditions(&maps))?;
    // L is exactly the elements with vanishing first coordinate
    let p3 = identity_index(a.p);
    let l_is_x1_zero = local.non_units.iter().all(|&x| x < p3) && local.l_order == p3 as usize;
    let i_plus_l_order = if local.i_plus_l_is_subgroup_of_units { local.l_order } else { 0 };
    if let Some(path) = &a.table_out {
        let table = nr.multiplication_table(DEFAULT_TABLE_CAP)?;
        timer.time("table_export", || table.save(path))?;
    }
    let pass = axioms.is_nearring()
        && local.is_local
        && local.i_plus_l_is_subgroup_of_units
        && lemmas.pass()
        && conditions.pass()
        && l_is_x1_zero;
    let report = json!({
        "command": "verify-example",
        "group": "h1",
        "p": a.p,
        "order": n,
        "identity": nr.identity,
        "seed": a.mode.seed,
        "mode": mode_json(mode),
        "axioms": axioms,
        "units": UnitSummary { count: local.unit_count, non_units: local.l_order },
        "locality": local,
        "l_is_x1_zero": l_is_x1_zero,
        "i_plus_l_order": i_plus_l_order,
        "lemmas": lemmas,
        "conditions": conditions,
        "failure": axioms.first_failure().map(|(law, s)| json!({"law": law, "witness": s.witness})),
        "pass": pass,
        "timings": timer.into_json(),
    });
    Ok(finish(pass, report))
}

fn load_maps(spec: &str, p: u32) -> Result<MapQuad> {
    let path = Path::new(spec);
    if path.is_file() {
        MapQuad::load(p, path)
    } else if spec.contains(['/', '.']) {
        Err(Error::Usage(format!("map file {spec} not found")))
    } else {
        builtin_maps(spec, p)
    }
}

pub fn construct(a: &ConstructArgs) -> Result<Outcome> {
    let mut timer = Timer::new();
    let maps = Arc::new(load_maps(&a.maps, a.p)?);
    let order = maps.order();
    let mode = a.mode.resolve(order, VERIFY_SAMPLES)?;
    let mut report = json!({
        "command": "construct",
        "p": a.p,
        "maps": a.maps,
        "seed": a.mode.seed,
        "mode": mode_json(mode),
        "alpha_vanishes": maps.alpha_vanishes(),
    });
    let kind = if maps.alpha_vanishes() {
        let local = timer.time("screen_local", || check_h19_conditions(&maps))?;
        let general = timer.time("screen_general", || check_h16_conditions(&maps, GeneralVariant::Printed))?;
        report["screening"] = json!({"local": local, "general": general});
        MulKind::Local
    } else {
        let general = timer.time("screen_general", || check_h16_conditions(&maps, GeneralVariant::Printed))?;
        let (selection, _) = timer.time("variant_selection", || select_general_variant(maps.clone(), mode))?;
        report["screening"] = json!({"general": general});
        report["variant_selection"] = json!(selection);
        MulKind::General(selection.selected.unwrap_or(GeneralVariant::Printed))
    };
    let nr = build_nearring(maps.clone(), kind)?;
    let axioms = timer.time("axioms", || verify_axioms(&nr, mode));
    let verdict = if axioms.is_nearring() {
        let local = timer.time("units", || units_and_locality(&nr));
        let v = if local.is_local { Verdict::Local } else { Verdict::NearringNotLocal };
        report["units"] = json!(UnitSummary { count: local.unit_count, non_units: local.l_order });
        report["locality"] = json!(local);
        v
    } else {
        let (law, s) = axioms.first_failure().expect("a failed report names a law");
        report["failure"] = json!({"law": law, "witness": s.witness});
        Verdict::NotANearring
    };
    report["multiplication"] = json!(kind);
    report["axioms"] = json!(axioms);
    report["verdict"] = json!(verdict.label());
    let pass = match a.expect {
        Some(e) => e == verdict,
        None => verdict == Verdict::Local,
    };
    report["pass"] = json!(pass);
    report["timings"] = timer.into_json();
    Ok(finish(pass, report))
}

pub fn search(a: &SearchArgs) -> Result<Outcome> {
    let id = GroupId::parse(&a.group, a.p)?;
    if id.is_order81() && !a.order81 {
        return Err(Error::Usage(format!("{} has order 81; pass --order81 to search it", id.name())));
    }
    let pres = build_presentation(id)?;
    let opts = SearchOptions {
        require_local: !a.no_local,
        max_results: a.max_results,
        split_depth: a.split_depth,
        pruning: match a.pruning {
            PruningArg::Full => Pruning::Full,
            PruningArg::ClosureOnly => Pruning::ClosureOnly,
            PruningArg::None => Pruning::None,
        },
        budget: a.budget,
        checkpoint: a.checkpoint.clone(),
        allow_large: a.order81,
        ..SearchOptions::default()
    };
    let mut report = search_local_nearrings(&pres, &opts)?;
    if let Some(dir) = &a.tables_dir {
        std::fs::create_dir_all(dir)?;
        for (k, r) in report.results.iter_mut().enumerate() {
            let path = dir.join(format!("{}-{:04}-i{}.csv", id.name(), k, r.identity));
            r.table.save(&path)?;
            r.table_ref = Some(path.display().to_string());
        }
    }
    let found = report.result_count();
    let expectation_met = if a.expect_none {
        found == 0
    } else if a.expect_some {
        found > 0
    } else {
        true
    };
    let code = match report.status {
        SearchStatus::Inconclusive => EXIT_INCONCLUSIVE,
        SearchStatus::Exhaustive if !expectation_met => EXIT_VERIFICATION,
        SearchStatus::Exhaustive => EXIT_SUCCESS,
    };
    let mut v = json!({"command": "search"});
    v["search"] = json!(report);
    v["budget"] = json!(a.budget.map(|b| humantime::format_duration(b).to_string()));
    v["expectation"] = json!(if a.expect_none { "none" } else if a.expect_some { "some" } else { "any" });
    v["expectation_met"] = json!(expectation_met);
    v["timings"] = json!({"search": report.elapsed.as_secs_f64()});
    Ok(Outcome { code, report: Some(v), message: None })
}

pub fn export_table(a: &ExportArgs) -> Result<Outcome> {
    let maps = Arc::new(load_maps(&a.maps, a.p)?);
    let kind = if maps.alpha_vanishes() { MulKind::Local } else { MulKind::General(GeneralVariant::Printed) };
    let nr = build_nearring(maps, kind)?;
    let mut timer = Timer::new();
    let table = timer.time("table", || nr.multiplication_table(DEFAULT_TABLE_CAP))?;
    table.save(&a.table_out)?;
    let report = json!({
        "command": "export-table",
        "p": a.p,
        "maps": a.maps,
        "order": table.n,
        "identity": table.identity,
        "path": a.table_out.display().to_string(),
        "timings": timer.into_json(),
    });
    Ok(Outcome { code: EXIT_SUCCESS, report: Some(report), message: None })
}
