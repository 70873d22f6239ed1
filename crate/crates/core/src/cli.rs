//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adjunction::{superlevels, xi, Evaluator, TheoremReport};
use crate::engine::{prohibit, ClassResult, EngineConfig, Verdict, DEFAULT_CAP};
use crate::index::index_integral;
use crate::scenario::{build_prop1_scenario, build_prop2_scenario, curve_to_json, validate_scenario, OrientationSpec, Scenario};
use crate::scheme::{format_scheme, parallel_copies, parse_scheme, realize_scheme};
use crate::smoothing::{CrossingPattern, OrientationAssignment};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "ovalcert", version, about = "Adjunction-inequality prohibitions for pairs of real projective curves")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Coefficient of Ξ in the bound (1 or 2; any rational is accepted).
    #[arg(long = "xi-coeff", global = true)]
    pub xi_coeff: Option<String>,
    /// Evaluate the bound even when m ≤ n (the result is marked in every report).
    #[arg(long, global = true)]
    pub allow_equal_degrees: bool,
    /// Also search smoothings with cusps.
    #[arg(long, global = true)]
    pub cusped_smoothings: bool,
    /// Maximum number of orientation classes to evaluate.
    #[arg(long, default_value_t = DEFAULT_CAP, global = true)]
    pub cap: usize,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0, global = true)]
    pub jobs: usize,
    /// Write the main output to a file instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the bound once (fixed orientation, or the first class representative).
    Check { scenario: PathBuf },
    /// Decide prohibition over all orientation classes.
    Prohibit { scenario: PathBuf },
    /// Regions, index table, superlevel sets, Ξ, d and the Fubini self-check.
    Invariants { scenario: PathBuf },
    /// Parse a scheme and print its canonical form.
    Parse { scheme: String },
    /// Realize a scheme as a piecewise-linear curve (JSON).
    Realize {
        scheme: String,
        #[arg(long)]
        degree: u32,
    },
    /// Arc plus k(2k−1) ovals against a line; `split` ovals on one side.
    Prop1 {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        split: u32,
    },
    /// Degree-2k Harnack-type curve against an ellipse enclosing `enclosed` interior ovals.
    Prop2 {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        enclosed: u32,
    },
    /// Scheme of s parallel copies.
    Copies {
        scheme: String,
        #[arg(long)]
        s: usize,
    },
}

fn load(path: &Path, cli: &Cli) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut s = Scenario::from_json(&text)?;
    apply_flags(&mut s, cli);
    Ok(s)
}

fn apply_flags(s: &mut Scenario, cli: &Cli) {
    if let Some(c) = &cli.xi_coeff {
        s.options.xi_coefficient = c.clone();
    }
    s.options.allow_equal_degrees |= cli.allow_equal_degrees;
    s.options.cusped_smoothings |= cli.cusped_smoothings;
}

fn engine_config(cli: &Cli) -> EngineConfig {
    EngineConfig { cap: cli.cap, jobs: cli.jobs, cusped: cli.cusped_smoothings, symmetry_reduction: true }
}

fn first_assignment(s: &Scenario) -> OrientationAssignment {
    match &s.orientation_spec {
        OrientationSpec::Fixed { assignment } => assignment.clone(),
        OrientationSpec::Enumerate { .. } => crate::engine::enumerate_classes(s, true).next().expect("at least one class").assignment,
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn signs(v: &[i8]) -> String {
    v.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

fn report_text(r: &TheoremReport) -> String {
    let mut t = String::new();
    t += &format!("m = {}, n = {}, d = {}\n", r.m, r.n, r.d);
    t += &format!("orientation: A {} | B {}\n", signs(&r.orientation.a), signs(&r.orientation.b));
    t += &format!("lhs = {}\n", r.lhs);
    t += &format!("xi = {} (coefficient {})\n", r.xi, r.xi_coefficient);
    t += &format!("rhs = {}\n", r.rhs);
    if r.allow_equal_degrees {
        t += "degree guard overridden\n";
    }
    t += &format!("fubini: {}\n", if r.fubini { "ok" } else { "FAILED" });
    t += &format!("violated: {}\n", r.violated);
    t
}

fn verdict_text(v: &Verdict) -> String {
    let mut t = format!("status: {}\n", v.status);
    t += &format!("m = {}, n = {}, d = {}\n", v.m, v.n, v.d);
    t += &format!("xi coefficient = {}\n", v.xi_coefficient);
    if v.allow_equal_degrees {
        t += "degree guard overridden\n";
    }
    let w = v.witnesses().count();
    let s = v.survivors().count();
    t += &format!(
        "classes: {} examined{}, {} witnessed, {} surviving, {} choices per class\n",
        v.statistics.classes_examined,
        if v.statistics.cap_hit { " (cap hit)" } else { "" },
        w,
        s,
        v.statistics.choices_per_class
    );
    for o in &v.classes {
        let head = format!("  A {} | B {}", signs(&o.class.assignment.a), signs(&o.class.assignment.b));
        match &o.result {
            ClassResult::Witness { choice, report } => {
                let cusps = choice.patterns.iter().filter(|p| **p != CrossingPattern::Compatible).count();
                t += &format!(
                    "{head}: witness lhs = {} > rhs = {} (xi = {}, B reversed: {}, cusped crossings: {cusps})\n",
                    report.lhs, report.rhs, report.xi, choice.reverse_b
                );
            }
            ClassResult::Survives { best_lhs, rhs } => {
                t += &format!("{head}: survives (max lhs = {best_lhs} <= rhs = {rhs})\n");
            }
        }
    }
    t
}

#[derive(Serialize)]
struct RegionRow {
    region: usize,
    chi: i64,
    orientable: bool,
    index: u64,
}

#[derive(Serialize)]
struct Invariants {
    d: u64,
    regions: Vec<RegionRow>,
    euler_integral: i64,
    superlevels: Vec<crate::adjunction::SuperlevelComponent>,
    #[serde(serialize_with = "crate::adjunction::ratio_str")]
    xi: num_rational::Rational64,
    fubini: bool,
    report: TheoremReport,
}

fn invariants(s: &Scenario) -> Result<Invariants, Error> {
    let ev = Evaluator::new(s)?;
    let orient = first_assignment(s);
    let patterns = vec![CrossingPattern::Compatible; ev.crossings()];
    let (c, rs, idx) = ev.stages(&orient, &patterns)?;
    let levels = superlevels(&idx, &rs, &c);
    let report = ev.evaluate(&orient, &patterns)?;
    Ok(Invariants {
        d: ev.crossings() as u64,
        regions: rs
            .regions
            .iter()
            .map(|r| RegionRow { region: r.id, chi: r.chi, orientable: r.orientable, index: idx.quotient[r.id] })
            .collect(),
        euler_integral: index_integral(&idx, &rs),
        xi: xi(&levels),
        superlevels: levels,
        fubini: report.fubini,
        report,
    })
}

fn invariants_text(inv: &Invariants) -> String {
    let mut t = format!("d = {}\nregion  chi  orientable  |ind|\n", inv.d);
    for r in &inv.regions {
        t += &format!("{:>6} {:>4} {:>11} {:>6}\n", r.region, r.chi, r.orientable, r.index);
    }
    t += &format!("integral |ind| dchi = {}\n", inv.euler_integral);
    for c in &inv.superlevels {
        t += &format!(
            "level {} component {:?}: chi = {}, c_in = {}, c_out = {}, chi' = {}, chi'_- = {}\n",
            c.level, c.regions, c.chi, c.c_in, c.c_out, c.chi_prime, c.chi_prime_minus
        );
    }
    t += &format!("xi = {}\nfubini: {}\n", inv.xi, if inv.fubini { "ok" } else { "FAILED" });
    t += &format!("lhs = {}, rhs = {} (xi coefficient {})\n", inv.report.lhs, inv.report.rhs, inv.report.xi_coefficient);
    if inv.report.allow_equal_degrees {
        t += "degree guard overridden\n";
    }
    t
}

#[derive(Serialize)]
struct SchemeSummary {
    scheme: String,
    ovals: usize,
    one_sided: bool,
    components: usize,
}

fn scheme_summary(s: &crate::scheme::Scheme) -> SchemeSummary {
    SchemeSummary { scheme: format_scheme(s), ovals: s.ovals(), one_sided: s.has_j, components: s.components() }
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Result<String, Error> {
    let fmt = cli.format;
    let verdict_out = |v: Verdict, err: &mut dyn Write| {
        let _ = writeln!(err, "wall-clock: {} ms", v.statistics.wall_clock_ms);
        match fmt {
            Format::Text => verdict_text(&v),
            Format::Json => json(&v),
        }
    };
    Ok(match &cli.command {
        Command::Check { scenario } => {
            let s = load(scenario, cli)?;
            let ev = Evaluator::new(&s)?;
            let r = ev.evaluate(&first_assignment(&s), &vec![CrossingPattern::Compatible; ev.crossings()])?;
            match fmt {
                Format::Text => report_text(&r),
                Format::Json => json(&r),
            }
        }
        Command::Prohibit { scenario } => {
            let s = load(scenario, cli)?;
            for c in validate_scenario(&s).iter().filter(|c| !c.passed) {
                let _ = writeln!(err, "{}: {} {}", if c.warning { "warning" } else { "check failed" }, c.name, c.detail);
            }
            verdict_out(prohibit(&s, &engine_config(cli))?, err)
        }
        Command::Invariants { scenario } => {
            let s = load(scenario, cli)?;
            let inv = invariants(&s)?;
            match fmt {
                Format::Text => invariants_text(&inv),
                Format::Json => json(&inv),
            }
        }
        Command::Parse { scheme } => {
            let sum = scheme_summary(&parse_scheme(scheme)?);
            match fmt {
                Format::Text => {
                    format!("{}\novals: {}, one-sided: {}, components: {}\n", sum.scheme, sum.ovals, sum.one_sided, sum.components)
                }
                Format::Json => json(&sum),
            }
        }
        Command::Realize { scheme, degree } => curve_to_json(&realize_scheme(&parse_scheme(scheme)?, *degree)?),
        Command::Prop1 { k, split } => {
            let mut s = build_prop1_scenario(*k, *split)?;
            apply_flags(&mut s, cli);
            verdict_out(prohibit(&s, &engine_config(cli))?, err)
        }
        Command::Prop2 { k, enclosed } => {
            let mut s = build_prop2_scenario(*k, *enclosed)?;
            apply_flags(&mut s, cli);
            verdict_out(prohibit(&s, &engine_config(cli))?, err)
        }
        Command::Copies { scheme, s } => {
            if *s == 0 {
                return Err(crate::scheme::SchemeError::Syntax { pos: 0, msg: "s must be at least 1".into() }.into());
            }
            let sum = scheme_summary(&parallel_copies(&parse_scheme(scheme)?, *s));
            match fmt {
                Format::Text => format!("{}\novals: {}, one-sided: {}\n", sum.scheme, sum.ovals, sum.one_sided),
                Format::Json => json(&sum),
            }
        }
    })
}

/// Runs the tool; returns the process exit code (0 ok, 2 input error, 3 internal error).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli, err) {
        Ok(text) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &text) {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_internal() {
                3
            } else {
                2
            }
        }
    }
}
