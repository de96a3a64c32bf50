mod commands;

use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use cartan_eds::formlang::{parse_document, ParseError, Report, Severity};
use cartan_eds::EdsError;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Structural invariants of Pfaffian systems and first-order PDE systems.
#[derive(Parser, Debug)]
#[command(name = "cartan-eds", version)]
struct Cli {
    /// Emit the versioned JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for seeded strategies and sampling.
    #[arg(long, global = true, env = "CARTAN_EDS_SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Document in the text format; `-` reads standard input.
    file: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct SystemArg {
    #[arg(long, default_value = "P")]
    system: String,
}

#[derive(Args, Debug, Clone)]
struct PdeArg {
    #[arg(long, default_value = "S")]
    pde: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Strategy {
    Generic,
    FirstBasis,
    SeededRandom,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First derived system.
    Derived {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
    },
    /// Derived flag down to its fixpoint.
    Flag {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
    },
    /// Cauchy characteristic system.
    Characteristic {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
    },
    /// Cartan class, generic or at a named point.
    Class {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
        #[arg(long)]
        point: Option<String>,
    },
    /// Darboux class of one generator.
    DarbouxClass {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
        /// One-based generator index.
        #[arg(long, default_value_t = 1)]
        generator: usize,
        #[arg(long)]
        point: Option<String>,
    },
    /// Gender of the system, or of one form modulo the system.
    Gender {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
        /// System holding the form; defaults to the system itself.
        #[arg(long)]
        section: Option<String>,
        /// One-based index of the form within its system.
        #[arg(long)]
        generator: Option<usize>,
    },
    /// Character through a chain of integral elements.
    Character {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
        /// Named point; a generic sample point when omitted.
        #[arg(long)]
        point: Option<String>,
        #[arg(long, value_enum, default_value_t = Strategy::Generic)]
        strategy: Strategy,
    },
    /// Polar space of an integral element at a point.
    Polar {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
        #[arg(long)]
        point: String,
        /// Comma-separated components of one element vector; repeatable.
        #[arg(long = "vector")]
        vectors: Vec<String>,
    },
    /// Frobenius test.
    Frobenius {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
    },
    /// Match the signature against the catalog of normal forms.
    Identify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
    },
    /// Pointwise invariants at named points, flagged where they leave the generic values.
    Scan {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
        /// Points to scan; every point of the document when omitted.
        #[arg(long = "point")]
        points: Vec<String>,
    },
    /// Contact system of order k in n independent variables.
    ContactBuild {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Jacobi or Lagrange bracket of two named functions.
    #[command(group(ArgGroup::new("kind").required(true).args(["jacobi", "lagrange"])))]
    Bracket {
        #[command(flatten)]
        input: Input,
        f: String,
        g: String,
        #[arg(long)]
        jacobi: bool,
        #[arg(long)]
        lagrange: bool,
    },
    /// Contact vector field of a named function.
    HamiltonianField {
        #[command(flatten)]
        input: Input,
        function: String,
    },
    /// Contact prolongation of a named base field.
    Prolong {
        #[command(flatten)]
        input: Input,
        field: String,
    },
    /// Characteristic field of the equation F = 0.
    CharField {
        #[command(flatten)]
        input: Input,
        function: String,
    },
    /// Bracket integrability test for a PDE block.
    PdeCheck {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: PdeArg,
        /// Sample points on the locus, used when the block is not solved for distinct p's.
        #[arg(long = "point")]
        points: Vec<String>,
    },
    /// Contact system pulled back to the locus of a PDE block.
    Restrict {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: PdeArg,
    },
    /// Structure congruences of the system in a coframe.
    Congruences {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sel: SystemArg,
        /// System whose forms complete the generators to a coframe.
        #[arg(long)]
        complement: String,
        /// One-based generator indices to work modulo, comma separated.
        #[arg(long, value_delimiter = ',')]
        modulo: Vec<usize>,
    },
    /// Recompute every catalog signature and compare.
    CatalogSelftest {
        /// Catalog file; the built-in catalog when omitted.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Derived { .. } => "derived",
            Command::Flag { .. } => "flag",
            Command::Characteristic { .. } => "characteristic",
            Command::Class { .. } => "class",
            Command::DarbouxClass { .. } => "darboux-class",
            Command::Gender { .. } => "gender",
            Command::Character { .. } => "character",
            Command::Polar { .. } => "polar",
            Command::Frobenius { .. } => "frobenius",
            Command::Identify { .. } => "identify",
            Command::Scan { .. } => "scan",
            Command::ContactBuild { .. } => "contact-build",
            Command::Bracket { .. } => "bracket",
            Command::HamiltonianField { .. } => "hamiltonian-field",
            Command::Prolong { .. } => "prolong",
            Command::CharField { .. } => "char-field",
            Command::PdeCheck { .. } => "pde-check",
            Command::Restrict { .. } => "restrict",
            Command::Congruences { .. } => "congruences",
            Command::CatalogSelftest { .. } => "catalog-selftest",
        }
    }

    fn input(&self) -> Option<&Input> {
        match self {
            Command::Derived { input, .. }
            | Command::Flag { input, .. }
            | Command::Characteristic { input, .. }
            | Command::Class { input, .. }
            | Command::DarbouxClass { input, .. }
            | Command::Gender { input, .. }
            | Command::Character { input, .. }
            | Command::Polar { input, .. }
            | Command::Frobenius { input, .. }
            | Command::Identify { input, .. }
            | Command::Scan { input, .. }
            | Command::Bracket { input, .. }
            | Command::HamiltonianField { input, .. }
            | Command::Prolong { input, .. }
            | Command::CharField { input, .. }
            | Command::PdeCheck { input, .. }
            | Command::Restrict { input, .. }
            | Command::Congruences { input, .. } => Some(input),
            Command::ContactBuild { .. } | Command::CatalogSelftest { .. } => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{file}:{source}")]
    Parse { file: String, source: ParseError },
    #[error("{message}")]
    Usage { message: String, object: Option<String> },
    #[error("{object}: {source}")]
    Math { object: String, source: EdsError },
}

impl CliError {
    pub fn usage(message: impl Into<String>, object: Option<&str>) -> Self {
        CliError::Usage {
            message: message.into(),
            object: object.map(str::to_string),
        }
    }

    pub fn math(object: impl Into<String>) -> impl FnOnce(EdsError) -> CliError {
        let object = object.into();
        move |source| CliError::Math { object, source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Math { .. } => 1,
            _ => 2,
        }
    }

    fn object(&self) -> Option<String> {
        match self {
            CliError::Io { path, .. } => Some(path.clone()),
            CliError::Parse { file, source } => {
                let (line, col) = source.position();
                Some(format!("{file}:{line}:{col}"))
            }
            CliError::Usage { object, .. } => object.clone(),
            CliError::Math { object, .. } => Some(object.clone()),
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Math { source, .. } => source.to_string(),
            CliError::Parse { source, .. } => source.to_string(),
            other => other.to_string(),
        }
    }
}

/// Text and JSON renderings of one command's result.
pub struct Outcome {
    pub text: String,
    pub result: serde_json::Value,
    pub notes: Vec<(Severity, String, Option<String>)>,
}

impl Outcome {
    pub fn new(text: String, result: serde_json::Value) -> Self {
        Outcome {
            text,
            result,
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, severity: Severity, message: impl Into<String>, object: Option<&str>) -> Self {
        self.notes.push((severity, message.into(), object.map(str::to_string)));
        self
    }
}

fn read_input(input: &Input) -> Result<String, CliError> {
    let io_err = |source| CliError::Io {
        path: input.file.display().to_string(),
        source,
    };
    if input.file.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        std::fs::read_to_string(&input.file).map_err(io_err)
    }
}

fn source_label(cli: &Cli) -> String {
    match (&cli.command, cli.command.input()) {
        (_, Some(input)) if input.file.as_os_str() == "-" => "<stdin>".into(),
        (_, Some(input)) => input.file.display().to_string(),
        (Command::CatalogSelftest { catalog: Some(path) }, None) => path.display().to_string(),
        (Command::CatalogSelftest { .. }, None) => "<builtin catalog>".into(),
        _ => "<arguments>".into(),
    }
}

fn execute(cli: &Cli, text: &str) -> Result<Outcome, CliError> {
    let file = source_label(cli);
    let doc = || {
        parse_document(text).map_err(|source| CliError::Parse {
            file: file.clone(),
            source,
        })
    };
    let seed = cli.seed;
    match &cli.command {
        Command::Derived { sel, .. } => commands::derived(&doc()?, &sel.system),
        Command::Flag { sel, .. } => commands::flag(&doc()?, &sel.system),
        Command::Characteristic { sel, .. } => commands::characteristic(&doc()?, &sel.system),
        Command::Class { sel, point, .. } => commands::class(&doc()?, &sel.system, point.as_deref()),
        Command::DarbouxClass {
            sel, generator, point, ..
        } => commands::darboux_class(&doc()?, &sel.system, *generator, point.as_deref()),
        Command::Gender {
            sel,
            section,
            generator,
            ..
        } => {
            let form = match (section, generator) {
                (None, None) => None,
                (s, g) => Some((s.as_deref().unwrap_or(&sel.system), g.unwrap_or(1))),
            };
            commands::gender(&doc()?, &sel.system, form)
        }
        Command::Character {
            sel, point, strategy, ..
        } => commands::character(&doc()?, &sel.system, point.as_deref(), *strategy, seed),
        Command::Polar {
            sel, point, vectors, ..
        } => commands::polar(&doc()?, &sel.system, point, vectors),
        Command::Frobenius { sel, .. } => commands::frobenius(&doc()?, &sel.system),
        Command::Identify { sel, .. } => commands::identify(&doc()?, &sel.system),
        Command::Scan { sel, points, .. } => commands::scan(&doc()?, &sel.system, points),
        Command::ContactBuild { n, order } => commands::contact_build(*n, *order),
        Command::Bracket { f, g, jacobi, .. } => commands::bracket(&doc()?, f, g, *jacobi),
        Command::HamiltonianField { function, .. } => commands::hamiltonian_field(&doc()?, function),
        Command::Prolong { field, .. } => commands::prolong(&doc()?, field),
        Command::CharField { function, .. } => commands::char_field(&doc()?, function),
        Command::PdeCheck { sel, points, .. } => commands::pde_check(&doc()?, &sel.pde, points),
        Command::Restrict { sel, .. } => commands::restrict(&doc()?, &sel.pde),
        Command::Congruences {
            sel,
            complement,
            modulo,
            ..
        } => commands::congruences(&doc()?, &sel.system, complement, modulo),
        Command::CatalogSelftest { .. } => commands::catalog_selftest(&file, text),
    }
}

/// Text that identifies the input for the report digest.
fn load(cli: &Cli) -> Result<String, CliError> {
    match (&cli.command, cli.command.input()) {
        (_, Some(input)) => read_input(input),
        (Command::ContactBuild { n, order }, None) => Ok(format!("contact-build n={n} order={order}\n")),
        (Command::CatalogSelftest { catalog: Some(path) }, None) => {
            std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        _ => Ok(cartan_eds::catalog::Catalog::builtin_text().to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.name();
    let loaded = load(&cli);
    let input = loaded.as_deref().unwrap_or("").to_string();
    let outcome = loaded.and_then(|text| execute(&cli, &text));
    let code = match &outcome {
        Ok(o) if o.notes.iter().any(|n| n.0 == Severity::Error) => 1,
        Ok(_) => 0,
        Err(e) => e.exit_code(),
    };
    if cli.json {
        let mut report = match &outcome {
            Ok(o) => {
                let mut r = Report::new(command, &input, o.result.clone());
                for (sev, msg, obj) in &o.notes {
                    r.diagnose(*sev, msg.clone(), obj.as_deref());
                }
                r
            }
            Err(_) => Report::new(command, &input, serde_json::Value::Null),
        };
        if let Err(e) = &outcome {
            report.diagnose(Severity::Error, e.message(), e.object().as_deref());
        }
        println!("{}", report.to_json());
    } else {
        match &outcome {
            Ok(o) => {
                print!("{}", o.text);
                for (sev, msg, obj) in &o.notes {
                    let tag = match sev {
                        Severity::Error => "error",
                        Severity::Warning => "warning",
                        Severity::Info => "note",
                    };
                    match obj {
                        Some(obj) => eprintln!("{tag}: {obj}: {msg}"),
                        None => eprintln!("{tag}: {msg}"),
                    }
                }
            }
            Err(e) => eprintln!("error: {e}"),
        }
    }
    ExitCode::from(code)
}
