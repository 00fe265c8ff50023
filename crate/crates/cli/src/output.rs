use std::fmt;

use num::complex::Complex64;
use serde_json::{json, Value};
use weylgraph::error::Error;

/// The result of a command: a text rendering, a JSON rendering and whether
/// any verification it performed passed.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

impl Report {
    pub fn new(text: String, json: Value) -> Self {
        Report { text, json, ok: true }
    }

    pub fn verdict(text: String, json: Value, ok: bool) -> Self {
        Report { text, json, ok }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Capacity { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Io(m) => f.write_str(m),
        }
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("{:.15e} {:+.15e}i", z.re, z.im)
}

pub fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
