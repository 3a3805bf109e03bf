//! Report envelope, error classification and output.

use std::io::Write;
use std::path::Path;

use dpsqueeze::domains::DomainError;
use dpsqueeze::holomaps::MapError;
use dpsqueeze::levi::LeviError;
use dpsqueeze::squeeze::SqueezeError;
use dpsqueeze::wpoly::PolyError;
use serde::Serialize;

use crate::config::{Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_JSON: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip)]
    pub exit_code: i32,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { kind: "validation", message: message.into(), line: None, column: None, exit_code: EXIT_INVALID }
    }

    pub fn nonconvergence(message: impl Into<String>) -> Self {
        Self { kind: "non-convergence", message: message.into(), line: None, column: None, exit_code: EXIT_NONCONVERGENCE }
    }

    /// Syntax errors are malformed JSON (exit 1); well-formed JSON of the
    /// wrong shape is a validation failure (exit 2). Both carry the position.
    pub fn json(path: &Path, e: &serde_json::Error) -> Self {
        let syntax = matches!(e.classify(), serde_json::error::Category::Syntax | serde_json::error::Category::Eof);
        Self {
            kind: if syntax { "malformed-json" } else { "schema" },
            message: format!("{}: {e}", path.display()),
            line: Some(e.line()),
            column: Some(e.column()),
            exit_code: if syntax { EXIT_JSON } else { EXIT_INVALID },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::NonConvergence { .. } => CliError::nonconvergence(e.to_string()),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        match e {
            DomainError::NonConvergence(_) => CliError::nonconvergence(e.to_string()),
            DomainError::Poly(p) => p.into(),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::ScaleSolve(_) => CliError::nonconvergence(e.to_string()),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

impl From<SqueezeError> for CliError {
    fn from(e: SqueezeError) -> Self {
        match e {
            SqueezeError::Domain(d) => d.into(),
            SqueezeError::Map(m) | SqueezeError::Scale(m) => m.into(),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

impl From<LeviError> for CliError {
    fn from(e: LeviError) -> Self {
        match e {
            LeviError::Domain(d) => d.into(),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

/// Command output: the JSON result, CSV rows, and whether it passed.
pub struct Outcome {
    pub result: serde_json::Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub pass: bool,
}

impl Outcome {
    pub fn new<T: Serialize>(result: &T, pass: bool) -> Self {
        Self {
            result: serde_json::to_value(result).expect("reports serialize"),
            header: Vec::new(),
            rows: Vec::new(),
            pass,
        }
    }

    pub fn table(mut self, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        self.header = header;
        self.rows = rows;
        self
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    status: &'static str,
    exit_code: i32,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a CliError>,
}

/// Writes the report and returns the exit code.
pub fn emit(cfg: &RunConfig, outcome: Result<Outcome, CliError>) -> i32 {
    let (status, code) = match &outcome {
        Ok(o) if o.pass => ("ok", EXIT_OK),
        Ok(_) => ("fail", EXIT_INVALID),
        Err(e) => ("error", e.exit_code),
    };
    let (result, error) = match &outcome {
        Ok(o) => (Some(&o.result), None),
        Err(e) => (None, Some(e)),
    };
    let env = Envelope {
        tool: "dpsqueeze",
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.name(),
        status,
        exit_code: code,
        config: cfg,
        result,
        error,
    };
    let text = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&env).expect("envelope serializes");
            s.push('\n');
            s
        }
        Format::Csv => csv_text(&env, outcome.as_ref().ok()),
    };
    if let Err(e) = write_out(cfg.out.as_deref(), &text) {
        eprintln!("dpsqueeze: cannot write report: {e}");
        return code.max(EXIT_INVALID);
    }
    if let Err(e) = &outcome {
        eprintln!("dpsqueeze {}: {e}", cfg.command.name());
    }
    code
}

/// Leading `#` lines carry the status, the config and any error; the table
/// follows.
fn csv_text(env: &Envelope<'_>, outcome: Option<&Outcome>) -> String {
    let mut s = format!("# dpsqueeze {} status={} exit_code={}\n", env.command, env.status, env.exit_code);
    s.push_str(&format!("# config={}\n", serde_json::to_string(env.config).expect("config serializes")));
    if let Some(e) = env.error {
        s.push_str(&format!("# error={}\n", serde_json::to_string(e).expect("error serializes")));
    }
    if let Some(o) = outcome {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&o.header).expect("in-memory write");
        for row in &o.rows {
            w.write_record(row).expect("in-memory write");
        }
        s.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields"));
    }
    s
}

fn write_out(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Shortest round-trip float text, in exponent form when tiny or huge.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Empty for absent values.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
