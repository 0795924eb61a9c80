//! The `doctags` command line.
//!
//! Exit codes: 0 success, 1 validation or parse failure, 2 usage error,
//! 3 batch finished with skipped items. Diagnostics are written as JSON
//! lines.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use doctags_core::diagnostic::{codes as core_codes, has_errors};
use doctags_core::export::{to_html, to_markdown, MarkdownOptions};
use doctags_core::{parse, serialize, Diagnostic, Document, ParseMode};

use crate::codes;
use crate::eval::{evaluate, EvalConfig, Task};
use crate::json::{from_json, to_json};
use crate::labels::LabelMap;
use crate::manifest::Manifest;
use crate::policy::LoadedPolicy;
use crate::report::write_jsonl;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "doctags", version, about = "Convert, validate, repair and evaluate DocTags documents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Markdown,
    Html,
    Json,
    Doctags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a DocTags (or JSON) document to another format.
    Convert {
        /// Input file; `-` reads standard input. `.json` files are read as
        /// the JSON document format.
        input: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        to: Target,
        /// Repair defects instead of failing on them.
        #[arg(long)]
        lenient: bool,
        /// Keep page headers and footers in Markdown output.
        #[arg(long)]
        include_page_furniture: bool,
        /// Render tables in Markdown output.
        #[arg(long)]
        include_tables: bool,
        /// Output file; standard output by default.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a DocTags file strictly and print its diagnostics.
    Validate { input: PathBuf },
    /// Repair a DocTags file and write it in canonical form.
    Repair {
        input: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Score predictions against ground truth and write a JSON report.
    Eval {
        #[arg(long, value_enum)]
        task: Task,
        /// Prediction manifest (JSONL).
        #[arg(long)]
        pred: PathBuf,
        /// Ground truth manifest (JSONL).
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// LaTeX normalization policy file for the formula task.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Layout label map file for the layout task.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    EXIT_SUCCESS
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io { stdout, stderr };
    let result = match cli.command {
        Command::Convert {
            input,
            to,
            lenient,
            include_page_furniture,
            include_tables,
            out,
        } => io.convert(
            &input,
            to,
            lenient,
            MarkdownOptions {
                include_page_furniture,
                include_tables,
            },
            out.as_deref(),
        ),
        Command::Validate { input } => io.validate(&input),
        Command::Repair { input, out } => io.repair(&input, out.as_deref()),
        Command::Eval {
            task,
            pred,
            gt,
            report,
            policy,
            labels,
        } => io.eval(task, &pred, &gt, &report, policy.as_deref(), labels.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(diagnostic) => {
            let _ = write_jsonl(io.stderr, None, &[diagnostic]);
            EXIT_FAILURE
        }
    }
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

fn io_error(path: &Path, e: io::Error) -> Diagnostic {
    Diagnostic::error(codes::IO_ERROR, format!("{}: {e}", path.display()))
}

fn read_input(path: &Path) -> Result<String, Diagnostic> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| io_error(path, e))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| io_error(path, e))
    }
}

fn label(path: &Path) -> String {
    path.display().to_string()
}

impl Io<'_> {
    fn diagnostics(&mut self, file: &Path, diagnostics: &[Diagnostic]) {
        let _ = write_jsonl(self.stderr, Some(&label(file)), diagnostics);
    }

    fn emit(&mut self, out: Option<&Path>, text: &str) -> Result<(), Diagnostic> {
        match out {
            Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| io_error(Path::new("<stdout>"), e)),
        }
    }

    fn convert(
        &mut self,
        input: &Path,
        to: Target,
        lenient: bool,
        options: MarkdownOptions,
        out: Option<&Path>,
    ) -> Result<i32, Diagnostic> {
        let source = read_input(input)?;
        let is_json = input.extension().is_some_and(|e| e == "json");
        let doc: Document = if is_json {
            match from_json(&source) {
                Ok(doc) => doc,
                Err(diagnostics) => {
                    self.diagnostics(input, &diagnostics);
                    return Ok(EXIT_FAILURE);
                }
            }
        } else {
            let mode = if lenient { ParseMode::Lenient } else { ParseMode::Strict };
            let parsed = parse(&source, mode);
            self.diagnostics(input, &parsed.diagnostics);
            match parsed.document {
                Some(doc) => doc,
                None => return Ok(EXIT_FAILURE),
            }
        };
        let text = match to {
            Target::Markdown => to_markdown(&doc, options),
            Target::Html => to_html(&doc),
            Target::Json => to_json(&doc) + "\n",
            Target::Doctags => serialize(&doc).map_err(|mut d| d.remove(0))?,
        };
        self.emit(out, &text)?;
        Ok(EXIT_SUCCESS)
    }

    fn validate(&mut self, input: &Path) -> Result<i32, Diagnostic> {
        let source = read_input(input)?;
        let parsed = parse(&source, ParseMode::Strict);
        let _ = write_jsonl(self.stdout, Some(&label(input)), &parsed.diagnostics);
        Ok(if has_errors(&parsed.diagnostics) {
            EXIT_FAILURE
        } else {
            EXIT_SUCCESS
        })
    }

    fn repair(&mut self, input: &Path, out: Option<&Path>) -> Result<i32, Diagnostic> {
        let source = read_input(input)?;
        let parsed = parse(&source, ParseMode::Lenient);
        self.diagnostics(input, &parsed.diagnostics);
        let doc = parsed.document.unwrap_or_default();
        if doc.blocks().next().is_none() {
            if !parsed.diagnostics.iter().any(|d| d.code == core_codes::MISSING_ROOT) {
                self.diagnostics(
                    input,
                    &[Diagnostic::error(core_codes::EMPTY_DOCUMENT, "nothing left to write after repair")],
                );
            }
            return Ok(EXIT_FAILURE);
        }
        let text = serialize(&doc).map_err(|mut d| d.remove(0))?;
        self.emit(out, &text)?;
        Ok(EXIT_SUCCESS)
    }

    fn eval(
        &mut self,
        task: Task,
        pred: &Path,
        gt: &Path,
        report_path: &Path,
        policy: Option<&Path>,
        labels: Option<&Path>,
    ) -> Result<i32, Diagnostic> {
        let mut config = EvalConfig::new(task);
        if let Some(path) = policy {
            config.policy = LoadedPolicy::from_json(&read_input(path)?)?;
        }
        if let Some(path) = labels {
            config.labels = LabelMap::from_json(&read_input(path)?)?;
        }
        let pred = Manifest::read(pred)?;
        let gt = Manifest::read(gt)?;
        let report = evaluate(&pred, &gt, &config)?;
        let text = serde_json::to_string_pretty(&report).map_err(|e| Diagnostic::error(codes::IO_ERROR, e.to_string()))?;
        fs::write(report_path, text + "\n").map_err(|e| io_error(report_path, e))?;
        for item in &report.items {
            if let Some(error) = &item.error {
                let diagnostic = Diagnostic::error(error.code, format!("{}: {}", item.id, error.message));
                let _ = write_jsonl(self.stderr, None, &[diagnostic]);
            }
        }
        let _ = write_jsonl(self.stderr, None, &report.diagnostics);
        Ok(if report.skipped > 0 { EXIT_PARTIAL } else { EXIT_SUCCESS })
    }
}
