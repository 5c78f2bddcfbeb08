//! Command-line front end for `specialsys`.
//!
//! [`run`] takes the full argument vector and returns the exit code and the
//! text destined for stdout and stderr, so the binary and the tests share one
//! code path. Exit codes: 0 success, 2 parse or precondition error, 3 when
//! `special --verify` finds the oracle disagreeing with the symbolic verdict.

pub mod notation;
pub mod output;

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use specialsys::classify::{very_ample_failure, Verdict, VerdictBasis};
use specialsys::cremona::TraceOp;
use specialsys::oracle::{DEFAULT_PRIME, DEFAULT_SEED, DEFAULT_TRIALS};
use specialsys::{
    actual_dim, classify_kodaira_zero, enumerate_minus_one_classes, expected_dim, scan_defective,
    secant_report, speciality_plane, to_standard_form, virtual_dim, InterpolationProblem,
    OracleConfig, SecantMode, SecantReport, SurfaceKind, SystemSpec, Terminal,
};

use crate::notation::{parse_system, SystemNotation};
use crate::output::*;

pub use notation::ParseError;

#[derive(Parser, Debug)]
#[command(
    name = "specialsys",
    version,
    about = "Speciality of plane linear systems through general fat points"
)]
struct Cli {
    /// Emit a versioned JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for oracle trials and scans (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OracleArgs {
    /// Field modulus for the interpolation oracle.
    #[arg(long, env = "SPECIALSYS_PRIME", default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Comma-separated list of moduli; overrides --prime.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u32,
    #[arg(long, env = "SPECIALSYS_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl OracleArgs {
    fn primes(&self) -> Vec<u64> {
        if self.primes.is_empty() {
            vec![self.prime]
        } else {
            self.primes.clone()
        }
    }

    fn config(&self) -> OracleConfig {
        OracleConfig {
            prime: self.primes()[0],
            trials: self.trials,
            seed: self.seed,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Surface {
    P2,
    K3,
    Abelian,
    Enriques,
    Hyperelliptic,
}

impl Surface {
    fn kind(self) -> Result<SurfaceKind, Failure> {
        match self {
            Surface::P2 => Ok(SurfaceKind::RationalAnticanonical),
            Surface::K3 => Ok(SurfaceKind::K3),
            Surface::Abelian => Ok(SurfaceKind::Abelian),
            Surface::Enriques => Ok(SurfaceKind::Enriques),
            Surface::Hyperelliptic => Err(Failure::usage(
                "unsupported: no speciality classification is available for hyperelliptic surfaces",
            )),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Symbolic,
    Oracle,
}

impl Mode {
    fn secant(self) -> SecantMode {
        match self {
            Mode::Symbolic => SecantMode::Symbolic,
            Mode::Oracle => SecantMode::Oracle,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Mode::Symbolic => "symbolic",
            Mode::Oracle => "oracle",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Virtual and expected dimension.
    Vdim {
        system: String,
        #[arg(long, value_enum, default_value_t = Surface::P2)]
        surface: Surface,
    },
    /// Actual dimension from the interpolation oracle.
    Adim {
        system: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Speciality verdict with witness and decomposition.
    Special {
        system: String,
        #[arg(long, value_enum, default_value_t = Surface::P2)]
        surface: Surface,
        /// Cross-check against the oracle; exit 3 on disagreement.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Reduce a class to standard form and print the Cremona trace.
    Reduce { system: String },
    /// List (−1)-classes on r points up to a degree bound.
    NegCurves {
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 6)]
        bound: i64,
    },
    /// Secant variety dimension for a very ample class.
    Secant {
        system: String,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Mode::Symbolic)]
        mode: Mode,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Table of defective secant varieties within degree and k bounds.
    Scan {
        #[arg(long)]
        dmax: i64,
        #[arg(long)]
        kmax: u32,
        #[arg(long, value_enum, default_value_t = Mode::Symbolic)]
        mode: Mode,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Classification rules on K3, Abelian and Enriques surfaces.
    Classify {
        #[arg(long, value_enum)]
        surface: Surface,
        /// Self-intersection of H.
        #[arg(long, default_value_t = 2)]
        hsq: i64,
        /// Coefficient c of the class c·H.
        #[arg(long, default_value_t = 1)]
        multiple: i64,
        #[arg(long, default_value_t = 0)]
        doubles: u32,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<specialsys::Error> for Failure {
    fn from(e: specialsys::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Successful output plus the exit code to report.
struct Emitted {
    code: i32,
    text: String,
}

impl Emitted {
    fn ok(text: String) -> Self {
        Emitted { code: 0, text }
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("output documents serialize");
    s.push('\n');
    s
}

pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let json = cli.json;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build();
    let result = match pool {
        Ok(pool) => pool.install(|| dispatch(cli.command, json)),
        Err(e) => Err(Failure::usage(format!("cannot start worker pool: {e}"))),
    };
    match result {
        Ok(Emitted { code, text }) => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
        Err(Failure { code, message }) => {
            let stdout = if json {
                to_json(&ErrorDoc {
                    schema_version: SCHEMA_VERSION,
                    error: message.clone(),
                })
            } else {
                String::new()
            };
            Outcome {
                code,
                stdout,
                stderr: format!("error: {message}\n"),
            }
        }
    }
}

fn require_plane(surface: Surface) -> Result<(), Failure> {
    match surface.kind()? {
        SurfaceKind::RationalAnticanonical => Ok(()),
        other => Err(Failure::usage(format!(
            "{} systems have no plane representation; use `classify --surface {}`",
            other.name(),
            other.name()
        ))),
    }
}

fn dispatch(command: Command, json: bool) -> Result<Emitted, Failure> {
    match command {
        Command::Vdim { system, surface } => {
            require_plane(surface)?;
            vdim(&parse_system(&system)?, json)
        }
        Command::Adim { system, oracle } => adim(&parse_system(&system)?, &oracle, json),
        Command::Special {
            system,
            surface,
            verify,
            oracle,
        } => {
            require_plane(surface)?;
            special(&parse_system(&system)?, verify, &oracle, json)
        }
        Command::Reduce { system } => reduce(&parse_system(&system)?, json),
        Command::NegCurves { r, bound } => neg_curves(r, bound, json),
        Command::Secant {
            system,
            k,
            mode,
            oracle,
        } => secant(&parse_system(&system)?, k, mode, &oracle, json),
        Command::Scan {
            dmax,
            kmax,
            mode,
            oracle,
        } => scan(dmax, kmax, mode, &oracle, json),
        Command::Classify {
            surface,
            hsq,
            multiple,
            doubles,
        } => classify(surface, hsq, multiple, doubles, json),
    }
}

fn vdim(sys: &SystemNotation, json: bool) -> Result<Emitted, Failure> {
    let class = sys.plane_spec().full_class()?;
    let (v, e) = (virtual_dim(&class, 1), expected_dim(&class, 1));
    if json {
        return Ok(Emitted::ok(to_json(&VdimDoc {
            schema_version: SCHEMA_VERSION,
            command: "vdim".into(),
            system: sys.render(),
            class,
            vdim: v,
            edim: e,
        })));
    }
    Ok(Emitted::ok(format!("system: {}\nvdim={v}, edim={e}\n", sys.render())))
}

fn oracle_runs(
    class: &specialsys::DivisorClass,
    oracle: &OracleArgs,
) -> Result<Vec<specialsys::RankResult>, Failure> {
    oracle
        .primes()
        .into_iter()
        .map(|prime| {
            let cfg = OracleConfig {
                prime,
                ..oracle.config()
            };
            actual_dim(&InterpolationProblem::new(class.degree(), class.mults(), &cfg))
                .map_err(Failure::from)
        })
        .collect()
}

fn adim(sys: &SystemNotation, oracle: &OracleArgs, json: bool) -> Result<Emitted, Failure> {
    let class = sys.plane_spec().full_class()?;
    let results = oracle_runs(&class, oracle)?;
    let agree = results.windows(2).all(|w| w[0].adim == w[1].adim);
    if json {
        return Ok(Emitted::ok(to_json(&AdimDoc {
            schema_version: SCHEMA_VERSION,
            command: "adim".into(),
            system: sys.render(),
            vdim: virtual_dim(&class, 1),
            class,
            trials: oracle.trials,
            seed: oracle.seed,
            results,
            agree,
        })));
    }
    let mut out = format!("system: {}\n", sys.render());
    for r in &results {
        let _ = writeln!(
            out,
            "adim={} (prime={}, rank={}, per_trial={:?})",
            r.adim, r.prime, r.rank, r.per_trial
        );
    }
    if results.len() > 1 {
        let _ = writeln!(out, "primes agree: {}", if agree { "yes" } else { "no" });
    }
    Ok(Emitted::ok(out))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict_text(verdict: &Verdict) -> String {
    let mut out = format!(
        "special: {}, vdim={}, adim={}",
        yes_no(verdict.special),
        verdict.vdim,
        verdict.adim_predicted
    );
    if let Some(w) = &verdict.witness {
        let _ = write!(out, ", witness={}", w.folded());
    }
    out.push('\n');
    if let Some(dec) = &verdict.decomposition {
        if !dec.fixed.is_empty() {
            let parts: Vec<String> = dec
                .fixed
                .iter()
                .map(|f| format!("{}*{}", f.multiplicity, f.class.folded()))
                .collect();
            let _ = writeln!(out, "fixed: {}", parts.join(" + "));
        }
        match &dec.free {
            Some(f) => {
                let _ = writeln!(out, "free: {}*{}", f.n, f.class.folded());
            }
            None => out.push_str("free: none\n"),
        }
    }
    if let Some(p) = &verdict.pencil {
        let _ = writeln!(
            out,
            "pencil: without double point {} the system is {}*{} plus {} fixed curve(s); R = {}",
            p.removed_slot + 1,
            p.n,
            p.pencil.folded(),
            p.fixed.len(),
            p.curve.folded()
        );
    }
    out
}

fn special(
    sys: &SystemNotation,
    verify: bool,
    oracle: &OracleArgs,
    json: bool,
) -> Result<Emitted, Failure> {
    let spec = sys.plane_spec();
    let class = spec.full_class()?;
    let verdict = speciality_plane(&spec)?;
    let check = if verify {
        let results = oracle_runs(&class, oracle)?;
        let adim = results[0].adim;
        let special = adim > verdict.edim;
        let agrees = results.iter().all(|r| r.adim == verdict.adim_predicted)
            && special == verdict.special;
        Some(OracleCheck {
            adim,
            special,
            agrees,
        })
    } else {
        None
    };
    let code = match &check {
        Some(c) if !c.agrees => 3,
        _ => 0,
    };
    if json {
        return Ok(Emitted {
            code,
            text: to_json(&SpecialDoc {
                schema_version: SCHEMA_VERSION,
                command: "special".into(),
                system: sys.render(),
                class,
                vdim: verdict.vdim,
                edim: verdict.edim,
                adim: verdict.adim_predicted,
                special: verdict.special,
                witness: verdict.witness,
                decomposition: verdict.decomposition,
                pencil: verdict.pencil,
                verify: check,
            }),
        });
    }
    let mut out = verdict_text(&verdict);
    if let Some(c) = check {
        let _ = writeln!(
            out,
            "oracle: adim={}, {}",
            c.adim,
            if c.agrees { "agrees" } else { "MISMATCH" }
        );
    }
    Ok(Emitted { code, text: out })
}

fn terminal_text(t: &Terminal) -> String {
    match t {
        Terminal::Standard => "standard form".into(),
        Terminal::NegativeDegree => "negative degree (empty system)".into(),
        Terminal::NegativeMultiplicity { slot, value } => {
            format!("negative multiplicity {value} at slot {}", slot + 1)
        }
    }
}

fn reduce(sys: &SystemNotation, json: bool) -> Result<Emitted, Failure> {
    let input = sys.class();
    let reduced = to_standard_form(&input);
    let peeled = reduced.peeled();
    if json {
        return Ok(Emitted::ok(to_json(&ReduceDoc {
            schema_version: SCHEMA_VERSION,
            command: "reduce".into(),
            input,
            reduced: reduced.cls,
            terminal: reduced.terminal,
            trace: reduced.trace,
            peeled,
        })));
    }
    let mut out = format!("input: {input}\nreduced: {}\nterminal: {}\n", reduced.cls, terminal_text(&reduced.terminal));
    if reduced.trace.is_empty() {
        out.push_str("trace: empty\n");
    } else {
        out.push_str("trace:\n");
        for (i, op) in reduced.trace.ops().iter().enumerate() {
            let line = match op {
                TraceOp::Permute(p) => {
                    let one: Vec<usize> = p.iter().map(|s| s + 1).collect();
                    format!("sort {one:?}")
                }
                TraceOp::Cremona(s) => format!(
                    "cremona at ({}, {}, {}), t={}",
                    s.slots[0] + 1,
                    s.slots[1] + 1,
                    s.slots[2] + 1,
                    s.t
                ),
                TraceOp::Peel { slot, amount } => {
                    format!("peel {amount} x exceptional curve at slot {}", slot + 1)
                }
            };
            let _ = writeln!(out, "  {}. {line}", i + 1);
        }
    }
    for (class, amount) in &peeled {
        let _ = writeln!(out, "fixed: {amount}*{class}");
    }
    Ok(Emitted::ok(out))
}

fn neg_curves(r: usize, bound: i64, json: bool) -> Result<Emitted, Failure> {
    let classes = enumerate_minus_one_classes(r, bound)?;
    if json {
        return Ok(Emitted::ok(to_json(&NegCurvesDoc {
            schema_version: SCHEMA_VERSION,
            command: "neg-curves".into(),
            r,
            bound,
            count: classes.len(),
            classes,
        })));
    }
    let mut out = format!("r={r}, bound={bound}, count={}\n", classes.len());
    for c in &classes {
        let _ = writeln!(out, "{c}");
    }
    Ok(Emitted::ok(out))
}

fn secant_line(r: &SecantReport) -> String {
    format!(
        "H={}, k={}: N={}, expected={}, actual={}, defective: {}",
        r.h.folded(),
        r.k,
        r.n,
        r.expected,
        r.actual,
        yes_no(r.defective)
    )
}

fn secant(
    sys: &SystemNotation,
    k: u32,
    mode: Mode,
    oracle: &OracleArgs,
    json: bool,
) -> Result<Emitted, Failure> {
    let h = specialsys::DivisorClass::new(sys.degree, sys.canonical_mults());
    if let Some(why) = very_ample_failure(&h)? {
        return Err(Failure::usage(format!(
            "precondition failed: {} is not very ample ({why})",
            sys.render()
        )));
    }
    let report = secant_report(&h, k, mode.secant(), &oracle.config())?;
    if json {
        return Ok(Emitted::ok(to_json(&SecantDoc {
            schema_version: SCHEMA_VERSION,
            command: "secant".into(),
            mode: mode.name().into(),
            report,
        })));
    }
    Ok(Emitted::ok(format!("{}\n", secant_line(&report))))
}

fn scan(
    dmax: i64,
    kmax: u32,
    mode: Mode,
    oracle: &OracleArgs,
    json: bool,
) -> Result<Emitted, Failure> {
    let defective = scan_defective(dmax, kmax, mode.secant(), &oracle.config())?;
    if json {
        return Ok(Emitted::ok(to_json(&ScanDoc {
            schema_version: SCHEMA_VERSION,
            command: "scan".into(),
            mode: mode.name().into(),
            dmax,
            kmax,
            defective,
        })));
    }
    let header = ["H", "k", "N", "expected", "actual"];
    let rows: Vec<[String; 5]> = defective
        .iter()
        .map(|r| {
            [
                r.h.folded(),
                r.k.to_string(),
                r.n.to_string(),
                r.expected.to_string(),
                r.actual.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: [&str; 5], out: &mut String| {
        let line: Vec<String> = cells
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    };
    fmt_row(header, &mut out);
    for row in &rows {
        fmt_row(
            [&row[0], &row[1], &row[2], &row[3], &row[4]].map(String::as_str),
            &mut out,
        );
    }
    let _ = writeln!(
        out,
        "{} defective of degree <= {dmax}, k <= {kmax}",
        defective.len()
    );
    Ok(Emitted::ok(out))
}

fn classify(
    surface: Surface,
    hsq: i64,
    multiple: i64,
    doubles: u32,
    json: bool,
) -> Result<Emitted, Failure> {
    let kind = surface.kind()?;
    if kind == SurfaceKind::RationalAnticanonical {
        return Err(Failure::usage(
            "plane systems are classified by `special`",
        ));
    }
    let spec = SystemSpec::abstract_class(kind, multiple, hsq, doubles);
    let verdict = classify_kodaira_zero(&spec)?;
    if json {
        return Ok(Emitted::ok(to_json(&ClassifyDoc {
            schema_version: SCHEMA_VERSION,
            command: "classify".into(),
            surface: kind.name().into(),
            chi: spec.surface.chi(),
            multiple,
            h_squared: hsq,
            doubles,
            vdim: verdict.vdim,
            edim: verdict.edim,
            adim: verdict.adim_predicted,
            special: verdict.special,
            unverified: verdict.basis == VerdictBasis::Rule,
            note: verdict.note,
        })));
    }
    let mut out = format!("special: {}", yes_no(verdict.special));
    if let Some(note) = &verdict.note {
        let _ = write!(out, " ({note})");
    }
    let _ = writeln!(
        out,
        "\nvdim={}, edim={}, adim={} (rule-based)",
        verdict.vdim, verdict.edim, verdict.adim_predicted
    );
    Ok(Emitted::ok(out))
}
