use std::io::Write;
use std::process::ExitCode;

use mexlab::certificate::Certificate;
use mexlab::model::AllocationDistribution;
use mexlab::Rational;
use serde_json::{json, Value};

/// A finished run: the JSON document, its exit status and a summary.
pub struct Outcome {
    pub status: u8,
    pub doc: Certificate,
    pub summary: String,
}

impl Outcome {
    pub fn holds(doc: Certificate, summary: impl Into<String>) -> Self {
        Outcome {
            status: 0,
            doc,
            summary: summary.into(),
        }
    }

    pub fn fails(doc: Certificate, summary: impl Into<String>) -> Self {
        Outcome {
            status: 1,
            doc,
            summary: summary.into(),
        }
    }

    pub fn emit(self) -> ExitCode {
        print_doc(&self.doc);
        if !self.summary.is_empty() {
            eprintln!("{}", self.summary);
        }
        ExitCode::from(self.status)
    }
}

/// Usage or validation error: exit status 2. `doc` is printed when present.
pub struct Failure {
    pub message: String,
    pub doc: Option<Certificate>,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            doc: None,
        }
    }

    pub fn emit(self) -> ExitCode {
        if let Some(doc) = self.doc {
            print_doc(&doc);
        }
        eprintln!("error: {}", self.message);
        ExitCode::from(2)
    }
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::usage(e.to_string())
    }
}

/// A closed pipe on stdout is not an error worth a panic.
fn print_doc(doc: &Certificate) {
    let _ = writeln!(std::io::stdout().lock(), "{}", doc.to_json());
}

/// `p/q (≈ 0.123456)`, or just the integer.
pub fn approx(r: &Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("{r} (≈ {:.6})", r.to_f64())
    }
}

pub fn dist_json(d: &AllocationDistribution) -> Value {
    Value::Array(
        d.entries()
            .iter()
            .map(|(f, p)| json!({ "f": f, "p": p }))
            .collect(),
    )
}
