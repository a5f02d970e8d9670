use std::fs;
use std::io::{self, IsTerminal, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fmre::export::recognition_json;
use fmre::{
    feature_type_mining, from_json, has_errors, parse, print_canonical, slice, to_dot, to_json,
    validate, Diagnostic, FeatureModel, ParseError, Severity, SliceError, SliceQuery,
};

#[derive(Parser)]
#[command(
    name = "fmre",
    version,
    about = "Validate, classify, slice and export feature models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model and report diagnostics on standard error
    Validate { path: PathBuf },
    /// Print the model in canonical form
    Fmt {
        path: PathBuf,
        /// Rewrite the file in place instead of printing
        #[arg(long)]
        write: bool,
    },
    /// Classify a feature and print its meaning
    Recognize {
        path: PathBuf,
        #[arg(long)]
        feature: String,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Slice a model around a feature, one output file per slice
    Slice {
        path: PathBuf,
        #[arg(long)]
        feature: String,
        #[arg(long, value_enum, ignore_case = true)]
        direction: DirectionArg,
        #[arg(long, value_enum, ignore_case = true)]
        relation: RelationArg,
        /// Alternative feature for an OR slice; repeatable
        #[arg(long = "alt")]
        alts: Vec<String>,
        #[arg(short = 'o', long = "out-dir")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = SliceFormat::Fm)]
        format: SliceFormat,
    },
    /// Serialize a model to standard output
    Export {
        path: PathBuf,
        #[arg(long, value_enum)]
        format: ExportArg,
    },
    /// Check a JSON model read from a file, or standard input when omitted
    ImportCheck {
        path: Option<PathBuf>,
        /// Also print the imported model
        #[arg(long, value_enum)]
        emit: Option<SliceFormat>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    And,
    Or,
}

#[derive(Clone, Copy, ValueEnum)]
enum SliceFormat {
    Fm,
    Dot,
    Json,
}

impl SliceFormat {
    fn render(self, model: &FeatureModel) -> String {
        match self {
            SliceFormat::Fm => print_canonical(model),
            SliceFormat::Dot => to_dot(model),
            SliceFormat::Json => to_json(model) + "\n",
        }
    }

    fn extension(self) -> &'static str {
        match self {
            SliceFormat::Fm => "fm",
            SliceFormat::Dot => "dot",
            SliceFormat::Json => "json",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportArg {
    Dot,
    Json,
}

const OK: u8 = 0;
const INVALID: u8 = 1;
const USAGE: u8 = 2;

/// Failure of a command, already reported on standard error.
struct Exit(u8);

type Outcome = Result<(), Exit>;

struct Reporter {
    color: bool,
}

impl Reporter {
    fn from_env() -> Self {
        let color = match std::env::var("FMRE_COLOR").as_deref() {
            Ok("never") => false,
            _ => io::stderr().is_terminal() && std::env::var_os("NO_COLOR").is_none(),
        };
        Reporter { color }
    }

    fn line(&self, location: &str, severity: Severity, message: impl std::fmt::Display) {
        let label = match (self.color, severity) {
            (false, s) => s.to_string(),
            (true, Severity::Error) => "\x1b[1;31merror\x1b[0m".to_string(),
            (true, Severity::Warning) => "\x1b[1;33mwarning\x1b[0m".to_string(),
        };
        eprintln!("{location}: {label}: {message}");
    }

    fn parse_errors(&self, file: &Path, errors: &[ParseError]) {
        for e in errors {
            self.line(
                &format!("{}:{}:{}", file.display(), e.span.line, e.span.column),
                Severity::Error,
                e,
            );
        }
    }

    fn diagnostics(&self, file: &Path, diags: &[Diagnostic]) {
        for d in diags {
            let (line, col) = d.span.map_or((1, 1), |s| (s.line, s.column));
            self.line(&format!("{}:{line}:{col}", file.display()), d.severity, d);
        }
    }

    fn fail(&self, file: &Path, code: u8, message: impl std::fmt::Display) -> Exit {
        self.line(&file.display().to_string(), Severity::Error, message);
        Exit(code)
    }
}

fn read(rep: &Reporter, path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path)
        .map_err(|e| rep.fail(path, USAGE, format_args!("cannot read file: {e}")))
}

fn load(rep: &Reporter, path: &Path) -> Result<FeatureModel, Exit> {
    parse(&read(rep, path)?).map_err(|errors| {
        rep.parse_errors(path, &errors);
        Exit(INVALID)
    })
}

/// Loads a model and refuses it when validation finds errors.
fn load_valid(rep: &Reporter, path: &Path) -> Result<FeatureModel, Exit> {
    let model = load(rep, path)?;
    let diags = validate(&model);
    if has_errors(&diags) {
        rep.diagnostics(path, &diags);
        return Err(Exit(INVALID));
    }
    Ok(model)
}

fn cmd_validate(rep: &Reporter, path: &Path) -> Outcome {
    let model = load(rep, path)?;
    let diags = validate(&model);
    rep.diagnostics(path, &diags);
    if has_errors(&diags) {
        Err(Exit(INVALID))
    } else {
        Ok(())
    }
}

fn cmd_fmt(rep: &Reporter, path: &Path, write: bool) -> Outcome {
    let text = print_canonical(&load(rep, path)?);
    if write {
        fs::write(path, text)
            .map_err(|e| rep.fail(path, USAGE, format_args!("cannot write file: {e}")))
    } else {
        print!("{text}");
        Ok(())
    }
}

fn cmd_recognize(rep: &Reporter, path: &Path, feature: &str, format: ReportFormat) -> Outcome {
    let model = load_valid(rep, path)?;
    let (kind, meaning) =
        feature_type_mining(&model, feature).map_err(|e| rep.fail(path, INVALID, e))?;
    match format {
        ReportFormat::Text => print!("{}", meaning.report(kind)),
        ReportFormat::Json => println!("{}", recognition_json(kind, &meaning)),
    }
    Ok(())
}

fn cmd_slice(
    rep: &Reporter,
    path: &Path,
    query: &SliceQuery,
    out_dir: &Path,
    format: SliceFormat,
) -> Outcome {
    let model = load_valid(rep, path)?;
    let result = slice(&model, query).map_err(|e| {
        let code = if matches!(e, SliceError::AlternativesWithAnd) {
            USAGE
        } else {
            INVALID
        };
        rep.fail(path, code, e)
    })?;
    fs::create_dir_all(out_dir)
        .map_err(|e| rep.fail(out_dir, USAGE, format_args!("cannot create directory: {e}")))?;
    for (i, s) in result.slices.iter().enumerate() {
        let file = out_dir.join(format!("slice-{}.{}", i + 1, format.extension()));
        fs::write(&file, format.render(s))
            .map_err(|e| rep.fail(&file, USAGE, format_args!("cannot write file: {e}")))?;
    }
    println!("{} slice(s)", result.slices.len());
    Ok(())
}

fn cmd_export(rep: &Reporter, path: &Path, format: ExportArg) -> Outcome {
    let model = load_valid(rep, path)?;
    match format {
        ExportArg::Dot => print!("{}", to_dot(&model)),
        ExportArg::Json => println!("{}", to_json(&model)),
    }
    Ok(())
}

fn cmd_import_check(rep: &Reporter, path: Option<&Path>, emit: Option<SliceFormat>) -> Outcome {
    let stdin = Path::new("<stdin>");
    let (source, text) = match path {
        Some(p) if p != Path::new("-") => (p, read(rep, p)?),
        _ => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| rep.fail(stdin, USAGE, format_args!("cannot read input: {e}")))?;
            (stdin, text)
        }
    };
    let model = from_json(&text).map_err(|diags| {
        for d in &diags {
            rep.line(&source.display().to_string(), d.severity, d);
        }
        Exit(INVALID)
    })?;
    let diags = validate(&model);
    rep.diagnostics(source, &diags);
    if has_errors(&diags) {
        return Err(Exit(INVALID));
    }
    if let Some(format) = emit {
        print!("{}", format.render(&model));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let rep = Reporter::from_env();
    match cli.command {
        Command::Validate { path } => cmd_validate(&rep, &path),
        Command::Fmt { path, write } => cmd_fmt(&rep, &path, write),
        Command::Recognize {
            path,
            feature,
            format,
        } => cmd_recognize(&rep, &path, &feature, format),
        Command::Slice {
            path,
            feature,
            direction,
            relation,
            alts,
            out_dir,
            format,
        } => {
            let direction = match direction {
                DirectionArg::Forward => fmre::Direction::Forward,
                DirectionArg::Backward => fmre::Direction::Backward,
            };
            let relation = match relation {
                RelationArg::And => fmre::Relation::And,
                RelationArg::Or => fmre::Relation::Or,
            };
            if relation == fmre::Relation::And && !alts.is_empty() {
                eprintln!("error: --alt requires --relation or");
                return Err(Exit(USAGE));
            }
            let query = SliceQuery::new(feature, direction, relation).with_alternatives(alts);
            cmd_slice(&rep, &path, &query, &out_dir, format)
        }
        Command::Export { path, format } => cmd_export(&rep, &path, format),
        Command::ImportCheck { path, emit } => cmd_import_check(&rep, path.as_deref(), emit),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(OK),
        Err(Exit(code)) => ExitCode::from(code),
    }
}
