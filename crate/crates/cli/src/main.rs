use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use mary_core::charact::{
    char_b_mod_m, char_b_mod_mu2, char_c_mod_m, char_ovb_mod_2m, char_ovb_mod_m, char_ovb_mod_m2,
    charact_general, lemchar_rhs,
};
use mary_core::eval::{forward_fill, Backend};
use mary_core::levels::{build_levels, rank_constrained_b2, rank_general, RankResult, VarDomain};
use mary_core::parse::parse_range;
use mary_core::report::CheckReport;
use mary_core::search::{
    appendix_table, check_andrews_gupta, check_churchhouse, check_rodseth_gupta, verify_report,
};
use mary_core::table::{rank_table, search_table, Cell, Format, Table};
use mary_core::verify::{char_sweep, identity_sweep, oracle_sweep, twp3_sweep};
use mary_core::{BuiltinFamily, EvalContext, Exact, FamilyTag, Modular, TripleSpec};

#[derive(Parser)]
#[command(name = "mary", version, about = "Generalized m-ary partition recurrences")]
struct Cli {
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "MARY_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Values of a sequence, exactly or modulo h.
    Eval(EvalArgs),
    /// Digit characterizations of b_m, c_m and ovb_m.
    Char(CharArgs),
    /// Rank of non-divisibility in the general case.
    Rank(RankArgs),
    /// Smallest n with value = 0 mod p for the appendix prime ranges.
    Search(SearchArgs),
    /// Run a verification sweep; exit status 1 on any violation.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Reproducible tables: appendix searches, rank columns, level formulas.
    Table {
        #[command(subcommand)]
        which: TableCommand,
    },
    /// Print a built-in triple as JSON.
    Triple(FamilyArgs),
}

#[derive(Args, Clone)]
struct SequenceArgs {
    /// Built-in family: b, c or ovb.
    #[arg(long, requires = "m", conflicts_with = "triple")]
    family: Option<FamilyTag>,
    /// Degree of the built-in family.
    #[arg(long)]
    m: Option<u64>,
    /// JSON triple file.
    #[arg(long)]
    triple: Option<PathBuf>,
}

impl SequenceArgs {
    fn load(&self) -> anyhow::Result<TripleSpec> {
        match (&self.family, &self.triple) {
            (Some(tag), None) => Ok(BuiltinFamily::new(*tag, self.m.expect("clap enforces --m")).triple()?),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading triple file {}", path.display()))?;
                Ok(TripleSpec::from_json(&text)?)
            }
            _ => bail!("exactly one of --family or --triple is required"),
        }
    }
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    family: FamilyTag,
    #[arg(long)]
    m: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValueFormat {
    Plain,
    Csv,
    Json,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    /// A single index.
    #[arg(long, conflicts_with = "range", required_unless_present = "range",
          value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    n: Option<u64>,
    /// All indices 0..=N.
    #[arg(long, value_name = "N")]
    range: Option<u64>,
    /// Reduce modulo H.
    #[arg(long = "mod", value_name = "H")]
    modulus: Option<u64>,
    /// Evaluate the auxiliary sequence d_T instead of b_T (single index only).
    #[arg(long, conflicts_with = "range")]
    aux: bool,
    #[arg(long, value_enum, default_value = "plain")]
    format: ValueFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum CharModulus {
    /// b_m(mN), c_m(mN+1) or ovb_m(mN) modulo m.
    M,
    /// b_m(mN) modulo mu_2.
    Mu2,
    /// ovb_m(mN) modulo m^2.
    M2,
    /// ovb_m(mN) modulo 2m.
    #[value(name = "2m")]
    TwoM,
    /// The general block identity; needs --q.
    Identity,
}

#[derive(Args)]
struct CharArgs {
    #[arg(long)]
    family: FamilyTag,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    n: u64,
    #[arg(long, value_enum, default_value = "m")]
    modulus: CharModulus,
    /// Offset inside the block for the identity.
    #[arg(long)]
    q: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Value,
    Witness,
    Table,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long, default_value_t = 2)]
    m: u64,
    #[arg(long, conflicts_with = "h_range", required_unless_present = "h_range")]
    h: Option<u64>,
    /// Inclusive range such as 3..41.
    #[arg(long, value_parser = range_arg)]
    h_range: Option<RangeInclusive<u64>>,
    #[arg(long, default_value_t = 13)]
    cutoff: usize,
    /// Restrict every variable to even residues (bounds the rank of b_2).
    #[arg(long)]
    constrained_even: bool,
    #[arg(long, value_enum, default_value = "value")]
    emit: Emit,
    #[arg(long, value_parser = format_arg, default_value = "md")]
    format: Format,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    family: FamilyTag,
    #[arg(long, value_parser = range_arg)]
    m_range: RangeInclusive<u64>,
    #[arg(long, default_value_t = 10_000)]
    bound: u64,
    #[arg(long, value_parser = format_arg, default_value = "csv")]
    format: Format,
    /// Re-check every row and exit 1 on a mismatch.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct LevelsArgs {
    #[arg(long, default_value_t = 2)]
    m: u64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    c: i64,
    #[arg(long, default_value_t = 4)]
    s: usize,
}

#[derive(Args)]
struct AppendixArgs {
    #[arg(long, value_parser = range_arg, default_value = "3..12")]
    m_range: RangeInclusive<u64>,
    #[arg(long, default_value_t = 10_000)]
    bound: u64,
    #[arg(long, value_parser = format_arg, default_value = "md")]
    format: Format,
}

#[derive(Subcommand)]
enum TableCommand {
    /// Smallest zeros of b_m modulo the primes m+2..m^2+m+1.
    AppendixA(AppendixArgs),
    /// Smallest zeros of c_m modulo the primes m+2..m^2+m+1.
    AppendixB(AppendixArgs),
    /// General ranks for m = 2 and m = 3 plus the even-constrained bounds.
    AppendixC {
        #[arg(long, value_parser = format_arg, default_value = "md")]
        format: Format,
    },
    /// Symbolic formulas of one construction level.
    Levels(LevelsArgs),
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Recurrence values against brute-force partition counts.
    Oracles {
        #[arg(long, value_parser = range_arg, default_value = "2..5")]
        m_range: RangeInclusive<u64>,
        #[arg(long, default_value_t = 200)]
        n_max: u64,
    },
    /// Digit characterizations against direct evaluation.
    Char {
        #[arg(long, value_parser = range_arg, default_value = "2..12")]
        m_range: RangeInclusive<u64>,
        #[arg(long, default_value_t = 2000)]
        n_max: u64,
    },
    /// The exact block identity and its reduction mod m.
    Identity {
        #[arg(long, value_parser = range_arg, default_value = "2..4")]
        m_range: RangeInclusive<u64>,
        #[arg(long, default_value_t = 30)]
        n_max: u64,
    },
    /// Churchhouse, Rodseth-Gupta and Andrews-Gupta congruences.
    Classical {
        #[arg(long, default_value_t = 100_000)]
        churchhouse_n: u64,
        #[arg(long, default_value_t = 4)]
        s_max: u32,
        #[arg(long, default_value_t = 99)]
        odd_n_max: u64,
        #[arg(long, default_value_t = 6)]
        m_max: u64,
        #[arg(long, default_value_t = 3)]
        r_max: u32,
        #[arg(long, default_value_t = 50)]
        n_max: u64,
    },
    /// Re-check appendix search rows for both families.
    Search {
        #[arg(long, value_parser = range_arg, default_value = "3..12")]
        m_range: RangeInclusive<u64>,
        #[arg(long, default_value_t = 10_000)]
        bound: u64,
    },
    /// Mod-3 quadruples for every built-in family.
    Twp3 {
        #[arg(long, value_parser = range_arg, default_value = "2..6")]
        m_range: RangeInclusive<u64>,
        #[arg(long, default_value_t = 500)]
        n_max: u64,
    },
}

fn range_arg(s: &str) -> Result<RangeInclusive<u64>, String> {
    parse_range(s).map_err(|e| e.to_string())
}

fn format_arg(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: mary_core::Error| e.to_string())
}

/// What a command produced: text plus whether a verification failed.
struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failed: false }
    }
}

fn render_values<V: ToString>(values: &[(u64, V)], format: ValueFormat, single: bool) -> String {
    match format {
        ValueFormat::Plain if single => format!("{}\n", values[0].1.to_string()),
        ValueFormat::Plain => values.iter().map(|(n, v)| format!("{n} {}\n", v.to_string())).collect(),
        ValueFormat::Csv => {
            let mut t = Table::new(&["n", "value"]);
            for (n, v) in values {
                t.push(vec![Cell::int(*n), Cell::text(v.to_string())]);
            }
            t.render(Format::Csv)
        }
        ValueFormat::Json => {
            let rows: Vec<serde_json::Value> = values
                .iter()
                .map(|(n, v)| serde_json::json!({ "n": n, "value": v.to_string() }))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).expect("json"))
        }
    }
}

fn eval_with<B: Backend>(t: TripleSpec, backend: B, a: &EvalArgs) -> String
where
    B::Value: ToString,
{
    if let Some(n_max) = a.range {
        let values = forward_fill(&t, &backend, n_max);
        let rows: Vec<(u64, B::Value)> = (0..=n_max).zip(values).collect();
        return render_values(&rows, a.format, false);
    }
    let n = a.n.expect("clap enforces --n or --range");
    let mut ctx = EvalContext::new(t, backend);
    let v = if a.aux { ctx.eval_d(n) } else { ctx.eval(n as i64) };
    render_values(&[(n, v)], a.format, true)
}

fn run_eval(a: &EvalArgs) -> anyhow::Result<Outcome> {
    let t = a.seq.load()?;
    let text = match a.modulus {
        Some(h) => eval_with(t, Modular::new(h)?, a),
        None => eval_with(t, Exact, a),
    };
    Ok(Outcome::ok(text))
}

fn run_char(a: &CharArgs) -> anyhow::Result<Outcome> {
    let (m, n) = (a.m, a.n);
    let value: BigInt = match (a.family, a.modulus) {
        (_, CharModulus::Identity) => {
            let q = a.q.context("--q is required with --modulus identity")?;
            let t = BuiltinFamily::new(a.family, m).triple()?;
            let exact = lemchar_rhs(&t, n, q)?;
            return Ok(Outcome::ok(format!("{exact}\n{}\n", charact_general(&t, n, q)?)));
        }
        (FamilyTag::Bm, CharModulus::M) => char_b_mod_m(m, n).into(),
        (FamilyTag::Bm, CharModulus::Mu2) => char_b_mod_mu2(m, n).into(),
        (FamilyTag::Cm, CharModulus::M) => char_c_mod_m(m, n)?.into(),
        (FamilyTag::OvBm, CharModulus::M) => char_ovb_mod_m(m, n).into(),
        (FamilyTag::OvBm, CharModulus::M2) => char_ovb_mod_m2(m, n)?.into(),
        (FamilyTag::OvBm, CharModulus::TwoM) => char_ovb_mod_2m(m, n)?.into(),
        (family, _) => bail!("no characterization of {family}_m for that modulus"),
    };
    Ok(Outcome::ok(format!("{value}\n")))
}

fn run_rank(a: &RankArgs) -> anyhow::Result<Outcome> {
    if a.m < 2 {
        bail!("--m must be at least 2");
    }
    if a.cutoff == 0 {
        bail!("--cutoff must be at least 1");
    }
    let hs: Vec<u64> = match (&a.h, &a.h_range) {
        (Some(h), _) => vec![*h],
        (None, Some(r)) => r.clone().collect(),
        _ => unreachable!("clap enforces --h or --h-range"),
    };
    if hs.iter().any(|&h| h < 2) {
        bail!("--h values must be at least 2");
    }
    let results: Vec<(u64, RankResult)> = hs
        .iter()
        .map(|&h| {
            let r = if a.constrained_even {
                if a.m != 2 {
                    return Err(anyhow::anyhow!("--constrained-even applies to m = 2 only"));
                }
                rank_constrained_b2(h, a.cutoff)
            } else {
                rank_general(a.m, h, a.cutoff, &VarDomain::full(h))
            };
            Ok((h, r))
        })
        .collect::<anyhow::Result<_>>()?;
    let text = match a.emit {
        Emit::Table => rank_table(&results).render(a.format),
        Emit::Value => results.iter().map(|(h, r)| format!("{h} {}\n", r.outcome)).collect(),
        Emit::Witness => results
            .iter()
            .map(|(h, r)| {
                let w = r.witness.as_ref().map_or("-".to_string(), |w| {
                    w.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
                });
                format!("{h} {} {w}\n", r.outcome)
            })
            .collect(),
    };
    Ok(Outcome::ok(text))
}

fn run_search(a: &SearchArgs) -> anyhow::Result<Outcome> {
    let report = appendix_table(a.family, *a.m_range.start(), *a.m_range.end(), a.bound)?;
    let mut out = Outcome::ok(search_table(&report).render(a.format));
    if a.check {
        let check = verify_report(&report)?;
        out.failed = !check.passed();
        if out.failed {
            eprint!("{}", describe(&[check]));
        }
    }
    Ok(out)
}

fn describe(reports: &[CheckReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let status = if r.passed() { "ok" } else { "FAILED" };
        s.push_str(&format!("{status}: {} ({} checks)\n", r.name, r.checked));
        for v in &r.violations {
            s.push_str(&format!("  violation: {v}\n"));
        }
    }
    s
}

fn run_verify(what: &VerifyCommand) -> anyhow::Result<Outcome> {
    let reports = match what {
        VerifyCommand::Oracles { m_range, n_max } => vec![oracle_sweep(m_range.clone(), *n_max)?],
        VerifyCommand::Char { m_range, n_max } => char_sweep(m_range.clone(), *n_max)?,
        VerifyCommand::Identity { m_range, n_max } => identity_sweep(m_range.clone(), *n_max)?,
        VerifyCommand::Twp3 { m_range, n_max } => twp3_sweep(m_range.clone(), *n_max)?,
        VerifyCommand::Search { m_range, bound } => [FamilyTag::Bm, FamilyTag::Cm]
            .into_iter()
            .map(|tag| verify_report(&appendix_table(tag, *m_range.start(), *m_range.end(), *bound)?))
            .collect::<mary_core::Result<_>>()?,
        VerifyCommand::Classical { churchhouse_n, s_max, odd_n_max, m_max, r_max, n_max } => {
            let mut v = vec![check_churchhouse(*churchhouse_n), check_rodseth_gupta(*s_max, *odd_n_max)];
            for m in 2..=*m_max {
                v.push(check_andrews_gupta(m, *r_max, *n_max)?);
            }
            v
        }
    };
    let failed = reports.iter().any(|r| !r.passed());
    Ok(Outcome { text: describe(&reports), failed })
}

fn run_levels(a: &LevelsArgs) -> anyhow::Result<Outcome> {
    if a.s == 0 {
        bail!("--s must be at least 1");
    }
    let levels = build_levels(a.m, a.c, a.s)?;
    let last = levels.last().expect("s >= 1");
    Ok(Outcome::ok(last.render()))
}

/// The three rank columns, cutoffs as printed: 13 for m = 2, 9 for m = 3.
fn appendix_c() -> Table {
    let mut t = Table::new(&["m", "h", "domain", "rank"]);
    let mut push = |m: u64, h: u64, domain: &str, r: RankResult| {
        t.push(vec![Cell::int(m), Cell::int(h), Cell::text(domain), Cell::rank(r.outcome)]);
    };
    for h in 3..=41 {
        push(2, h, "full", rank_general(2, h, 13, &VarDomain::full(h)));
    }
    for h in (4..=76).step_by(8) {
        push(2, h, "even", rank_constrained_b2(h, 13));
    }
    for h in 3..=50 {
        push(3, h, "full", rank_general(3, h, 9, &VarDomain::full(h)));
    }
    t
}

fn run_table(which: &TableCommand) -> anyhow::Result<Outcome> {
    let text = match which {
        TableCommand::AppendixA(a) | TableCommand::AppendixB(a) => {
            let tag = if matches!(which, TableCommand::AppendixA(_)) { FamilyTag::Bm } else { FamilyTag::Cm };
            let report = appendix_table(tag, *a.m_range.start(), *a.m_range.end(), a.bound)?;
            search_table(&report).render(a.format)
        }
        TableCommand::AppendixC { format } => appendix_c().render(*format),
        TableCommand::Levels(a) => return run_levels(a),
    };
    Ok(Outcome::ok(text))
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Char(a) => run_char(a),
        Command::Rank(a) => run_rank(a),
        Command::Search(a) => run_search(a),
        Command::Verify { what } => run_verify(what),
        Command::Table { which } => run_table(which),
        Command::Triple(a) => {
            let t = BuiltinFamily::new(a.family, a.m).triple()?;
            Ok(Outcome::ok(format!("{}\n", t.to_json())))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs as usize).build_global() {
            eprintln!("error: cannot start {jobs} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &outcome.text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(outcome.text.as_bytes()).context("writing output"),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if outcome.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
