use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pcompletion::abelian::{AbelianError, Prime, TameGroup};
use pcompletion::complexes::{parse_degree_zero_map, ComplexError, FreeComplex, DEFAULT_STAGES};
use pcompletion::engine::EngineRegistry;
use pcompletion::presheaf::{
    complete_sectionwise, li_sectionwise_check, product_preservation_check, PresheafError, SpectralPresheaf,
};
use pcompletion::suite::{CheckRegistry, SuiteConfig};
use pcompletion::text::ParseError;
use pcompletion::tstructure::{pi_p, pi_p_range, FormalSpectrum};
use pcompletion::unstable::{complete_em, complete_space, postnikov_limit_check, FormalSpace, UnstableError};

const EXIT_CODES: &str = "\
Exit codes:
  0  success (for checks: every check passed)
  1  a check failed
  2  input could not be parsed or is invalid
  3  a tower did not stabilize within the stage budget
  4  an extension is not determined by its two ends";

#[derive(Parser)]
#[command(
    name = "pcomp",
    version,
    about = "Exact derived p-completion of tame groups, complexes, spaces and presheaves"
)]
#[command(after_help = EXIT_CODES)]
struct Cli {
    /// The prime p.
    #[arg(long, global = true, default_value_t = 2)]
    prime: u64,
    /// Stage budget for the tower engine (at least 3).
    #[arg(long, global = true, default_value_t = DEFAULT_STAGES)]
    stages: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Read the input from a file ("-" for stdin) instead of the argument.
    #[arg(long, global = true)]
    input: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// One JSON object per line.
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Homotopy of the completion of a free complex, e.g. "degrees 0..1; rank 0 = 1; rank 1 = 1; d 1 = [4];"
    Complete {
        expr: Option<String>,
        /// symbolic, tower, or all (runs every engine and compares).
        #[arg(long, default_value = "symbolic")]
        engine: String,
    },
    /// L_0 and L_1 of a group, e.g. "Prufer(2) + Z/4".
    Li { expr: Option<String> },
    /// The sequences 0 -> L_0 pi_n -> pi_n^p -> L_1 pi_{n-1} -> 0 of a spectrum, e.g. "0: Z; 1: Prufer(2)".
    Ses {
        expr: Option<String>,
        /// Only this degree; default is every degree where pi_n^p can be nonzero.
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
    },
    /// Whether a degree-0 map of free modules is a p-equivalence.
    Peq {
        /// "k: Z^a -> Z^b" or "[r;..]: Z^a -> Z^b".
        #[arg(long)]
        map: String,
    },
    /// Completion of an Eilenberg-MacLane space, e.g. "K(Prufer(2), 3)".
    Em { expr: Option<String> },
    /// Completion of a formal space, e.g. "K(Z, 2) x K(Prufer(2), 4)".
    Space { expr: Option<String> },
    /// Compares the completion of a space with the limit of its completed truncations.
    PostnikovCheck { expr: Option<String> },
    /// Sectionwise completion of a presheaf, with the L_i and product checks.
    Presheaf { expr: Option<String> },
    /// Runs the seeded property suite.
    Suite {
        /// Seed for every random instance.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Run only these checks (repeatable).
        #[arg(long = "check")]
        checks: Vec<String>,
        /// Number of random complexes.
        #[arg(long)]
        complexes: Option<usize>,
        /// List the registered checks and exit.
        #[arg(long)]
        list: bool,
    },
}

enum CliError {
    Input(String),
    NoStabilization(String),
    Unresolved(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::NoStabilization(_) => 3,
            CliError::Unresolved(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::NoStabilization(m) | CliError::Unresolved(m) => m,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AbelianError> for CliError {
    fn from(e: AbelianError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        match e {
            ComplexError::NoStabilization(_) => CliError::NoStabilization(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<UnstableError> for CliError {
    fn from(e: UnstableError) -> Self {
        match e {
            UnstableError::UnresolvedExtension { .. } => CliError::Unresolved(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<PresheafError> for CliError {
    fn from(e: PresheafError) -> Self {
        match e {
            PresheafError::UnresolvedExtension { .. } => CliError::Unresolved(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

/// Text lines and JSON records of one run, printed in the chosen format.
#[derive(Default)]
struct Report {
    text: Vec<String>,
    json: Vec<Value>,
    failed: bool,
}

impl Report {
    fn line(&mut self, text: impl Into<String>, record: Value) {
        self.text.push(text.into());
        self.json.push(record);
    }

    fn print(&self, format: Format) -> io::Result<()> {
        let mut out = io::stdout().lock();
        match format {
            Format::Text => {
                for l in &self.text {
                    writeln!(out, "{l}")?;
                }
            }
            Format::Json => {
                for r in &self.json {
                    writeln!(out, "{r}")?;
                }
            }
        }
        Ok(())
    }
}

fn read_input(arg: Option<String>, file: &Option<String>) -> Result<String, CliError> {
    match (arg, file) {
        (Some(s), None) => Ok(s),
        (None, Some(path)) if path == "-" => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
            Ok(s)
        }
        (None, Some(path)) => fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}"))),
        (Some(_), Some(_)) => Err(CliError::Input("give either an argument or --input, not both".into())),
        (None, None) => Err(CliError::Input("missing input: pass an argument or --input".into())),
    }
}

fn echo(r: &mut Report, kind: &str, value: &str, p: Prime) {
    let one_line = value.split_whitespace().collect::<Vec<_>>().join(" ");
    r.line(
        format!("input {kind}: {one_line}"),
        json!({"kind": "input", "type": kind, "value": one_line, "prime": p.get()}),
    );
}

fn provenance(r: &mut Report, text: String) {
    r.line(
        format!("provenance: {text}"),
        json!({"kind": "provenance", "path": text}),
    );
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let p = Prime::new(cli.prime).map_err(|e| CliError::Input(e.to_string()))?;
    if cli.stages < 3 {
        return Err(CliError::Input(format!(
            "--stages must be at least 3, got {}",
            cli.stages
        )));
    }
    let mut r = Report::default();
    match cli.command {
        Command::Complete { expr, engine } => {
            let c: FreeComplex = read_input(expr, &cli.input)?.parse()?;
            echo(&mut r, "complex", &c.to_string(), p);
            let registry = EngineRegistry::with_stages(cli.stages);
            let names: Vec<&str> = if engine == "all" {
                registry.names().collect()
            } else if registry.get(&engine).is_some() {
                vec![engine.as_str()]
            } else {
                let known = registry.names().collect::<Vec<_>>().join(", ");
                return Err(CliError::Input(format!("unknown engine {engine}; known: {known}, all")));
            };
            let mut results = Vec::new();
            for name in names {
                let e = registry.get(name).expect("listed engine");
                let g = e.complete(&c, p)?;
                provenance(&mut r, e.provenance());
                for (n, a) in g.iter() {
                    r.line(
                        format!("pi_{n} = {a}"),
                        json!({"kind": "homotopy", "engine": name, "degree": n, "group": a.to_string()}),
                    );
                }
                if g.is_zero() {
                    r.line(
                        "completion is zero",
                        json!({"kind": "homotopy", "engine": name, "zero": true}),
                    );
                }
                results.push((name, g));
            }
            if results.len() > 1 {
                let agree = results.windows(2).all(|w| w[0].1 == w[1].1);
                r.line(
                    format!("engines agree: {agree}"),
                    json!({"kind": "check", "name": "engines agree", "pass": agree}),
                );
                r.failed = !agree;
            }
        }
        Command::Li { expr } => {
            let a: TameGroup = read_input(expr, &cli.input)?.parse()?;
            echo(&mut r, "group", &a.to_string(), p);
            let d = a.derived_completion(p)?;
            provenance(&mut r, "symbolic: additive atom table".into());
            r.line(
                format!("L0 = {}", d.l0),
                json!({"kind": "derived", "index": 0, "group": d.l0.to_string()}),
            );
            r.line(
                format!("L1 = {}", d.l1),
                json!({"kind": "derived", "index": 1, "group": d.l1.to_string()}),
            );
        }
        Command::Ses { expr, degree } => {
            let e: FormalSpectrum = read_input(expr, &cli.input)?.parse()?;
            echo(&mut r, "spectrum", &e.to_string(), p);
            provenance(
                &mut r,
                "symbolic: L_0 and L_1 of homotopy, middle only when the sequence splits".into(),
            );
            let degrees: Vec<i64> = match degree {
                Some(n) => vec![n],
                None => pi_p_range(&e).map(|d| d.collect()).unwrap_or_default(),
            };
            let mut unresolved = Vec::new();
            for n in degrees {
                let s = pi_p(&e, p, n)?;
                let middle = s.middle_known.as_ref().map_or("?".to_string(), |m| m.to_string());
                r.line(
                    format!("degree {n}: 0 -> {} -> {middle} -> {} -> 0", s.left, s.right),
                    json!({
                        "kind": "ses",
                        "degree": n,
                        "left": s.left.to_string(),
                        "right": s.right.to_string(),
                        "middle": s.middle_known.as_ref().map(|m| m.to_string()),
                    }),
                );
                if s.middle_known.is_none() {
                    unresolved.push(n);
                }
            }
            if !unresolved.is_empty() {
                r.print(cli.format).ok();
                return Err(CliError::Unresolved(format!(
                    "extension not determined in degree(s) {unresolved:?}"
                )));
            }
        }
        Command::Peq { map } => {
            let f = parse_degree_zero_map(&map)?;
            echo(&mut r, "map", &map, p);
            provenance(&mut r, "chain level: cone of the map mod p is acyclic".into());
            let ok = f.is_p_equivalence(p);
            r.line(format!("p-equivalence: {ok}"), json!({"kind": "peq", "value": ok}));
        }
        Command::Em { expr } => {
            let x: FormalSpace = read_input(expr, &cli.input)?.parse()?;
            echo(&mut r, "space", &x.to_string(), p);
            let factors: Vec<(i64, &TameGroup)> = x.homotopy().iter().filter(|(_, a)| !a.is_zero()).collect();
            let (n, a) = match factors.as_slice() {
                [(n, a)] => (*n, *a),
                _ => return Err(CliError::Input(format!("{x} is not a single K(G, n)"))),
            };
            provenance(&mut r, "symbolic: degreewise L_0 and shifted L_1".into());
            report_space(&mut r, p, &x, &complete_em(a, n, p)?)?;
        }
        Command::Space { expr } => {
            let x: FormalSpace = read_input(expr, &cli.input)?.parse()?;
            echo(&mut r, "space", &x.to_string(), p);
            provenance(&mut r, "symbolic: degreewise L_0 and shifted L_1".into());
            report_space(&mut r, p, &x, &complete_space(&x, p)?)?;
        }
        Command::PostnikovCheck { expr } => {
            let x: FormalSpace = read_input(expr, &cli.input)?.parse()?;
            echo(&mut r, "space", &x.to_string(), p);
            provenance(&mut r, "symbolic: limit of completed truncations vs completion".into());
            let ok = postnikov_limit_check(&x, p)?;
            r.line(
                format!("postnikov limit: {}", verdict(ok)),
                json!({"kind": "check", "name": "postnikov limit", "pass": ok}),
            );
            r.failed = !ok;
        }
        Command::Presheaf { expr } => {
            let f: SpectralPresheaf = read_input(expr, &cli.input)?.parse()?;
            echo(&mut r, "presheaf", &f.to_string().replace('\n', "; "), p);
            provenance(
                &mut r,
                "symbolic: sectionwise L_0 and L_1 with induced restrictions".into(),
            );
            let c = complete_sectionwise(&f, p)?;
            for (v, s) in c.sections().iter().enumerate() {
                let name = c.poset().name(v);
                r.line(
                    format!("section {name} = {s}"),
                    json!({"kind": "section", "element": name, "homotopy": s.to_string()}),
                );
            }
            let mut checks = vec![("product preservation", product_preservation_check(&f, p)?)];
            if f.sections()
                .iter()
                .all(|s| s.homotopy.support().is_none_or(|b| b == (0, 0)))
            {
                for i in [0u8, 1] {
                    let name = if i == 0 { "L0 sectionwise" } else { "L1 sectionwise" };
                    checks.push((name, li_sectionwise_check(&f, p, i)?));
                }
            }
            for (name, ok) in checks {
                r.line(
                    format!("{name}: {}", verdict(ok)),
                    json!({"kind": "check", "name": name, "pass": ok}),
                );
                r.failed |= !ok;
            }
        }
        Command::Suite {
            seed,
            checks,
            complexes,
            list,
        } => {
            let registry = CheckRegistry::default();
            if list {
                for name in registry.names() {
                    let d = registry.get(name).expect("listed check").description();
                    r.line(
                        format!("{name}: {d}"),
                        json!({"kind": "check-info", "name": name, "description": d}),
                    );
                }
                return Ok(r);
            }
            let mut cfg = SuiteConfig::with_seed(seed);
            cfg.stages = cli.stages;
            if let Some(k) = complexes {
                cfg.complexes = k;
            }
            let report = registry.run(&cfg, &checks).map_err(CliError::Input)?;
            r.failed = !report.all_passed();
            r.text.push(report.to_string());
            r.json.push(serde_json::to_value(&report).expect("report serializes"));
        }
    }
    Ok(r)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Prints both ends of every sequence, then the completed space.
fn report_space(r: &mut Report, p: Prime, x: &FormalSpace, c: &FormalSpace) -> Result<(), CliError> {
    if let Some((lo, hi)) = x.homotopy().support() {
        for n in lo..=hi + 1 {
            let left = x.pi(n).derived_completion(p)?.l0;
            let right = x.pi(n - 1).derived_completion(p)?.l1;
            let middle = c.pi(n);
            r.line(
                format!("degree {n}: 0 -> {left} -> {middle} -> {right} -> 0"),
                json!({
                    "kind": "ses",
                    "degree": n,
                    "left": left.to_string(),
                    "right": right.to_string(),
                    "middle": middle.to_string(),
                }),
            );
        }
    }
    r.line(
        format!("completion = {c}"),
        json!({"kind": "space", "completion": c.to_string()}),
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(r) => {
            if let Err(e) = r.print(format) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if r.failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
