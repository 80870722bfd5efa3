use std::fmt;

use serde::Serialize;
use serde_json::Value;

#[derive(Serialize)]
pub struct Versions {
    pub mulex: &'static str,
    pub mulex_cli: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            mulex: mulex::VERSION,
            mulex_cli: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// What every subcommand prints. `results` is a pure function of
/// `parameters`; timings and search statistics go elsewhere.
#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    /// Scheduling-dependent numbers such as node counts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Value>,
    /// Seconds.
    pub wall_time: f64,
    pub versions: Versions,
}

/// A subcommand's output before timing is attached.
pub struct Outcome {
    pub parameters: Value,
    pub results: Value,
    pub diagnostics: Option<Value>,
    /// `false` when a verification the command ran did not hold.
    pub verified: bool,
}

impl Outcome {
    pub fn new(parameters: Value, results: Value) -> Self {
        Outcome {
            parameters,
            results,
            diagnostics: None,
            verified: true,
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    NoInput(String),
    Resource(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Data(_) => 65,
            Failure::NoInput(_) => 66,
            Failure::Resource(_) => 3,
            Failure::Internal(_) => 70,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m)
            | Failure::Data(m)
            | Failure::NoInput(m)
            | Failure::Resource(m)
            | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<mulex::Error> for Failure {
    fn from(e: mulex::Error) -> Self {
        use mulex::Error as E;
        let msg = e.to_string();
        match e {
            E::BudgetExceeded { .. } | E::Inconclusive { .. } => Failure::Resource(msg),
            E::Parse(_) | E::NotInD | E::NotNeat | E::ZeroWeight | E::NotForest | E::NotStar => Failure::Data(msg),
            E::Internal(_) => Failure::Internal(msg),
            _ => Failure::Usage(msg),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Internal(format!("serialization: {e}"))
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<Value, Failure> {
    Ok(serde_json::to_value(v)?)
}

/// Move `key` out of an object, for fields that vary between runs.
pub fn take_field(v: &mut Value, key: &str) -> Option<Value> {
    v.as_object_mut().and_then(|o| o.remove(key))
}
