use serde_json::{Map, Value};

pub const REPORT_VERSION: &str = "1";

/// Result of one subcommand: `positive` selects exit status 0 or 1.
pub struct Outcome {
    pub positive: bool,
    pub report: Map<String, Value>,
    pub text: String,
    /// A document printed verbatim in place of the report.
    pub document: Option<String>,
}

impl Outcome {
    pub fn new(positive: bool, report: Value, text: String) -> Self {
        let report = match report {
            Value::Object(m) => m,
            other => panic!("report must be an object, got {other}"),
        };
        Self {
            positive,
            report,
            text,
            document: None,
        }
    }

    pub fn document(doc: String) -> Self {
        Self {
            positive: true,
            report: Map::new(),
            text: String::new(),
            document: Some(doc),
        }
    }

    /// Versioned JSON report; keys are sorted so equal runs give equal bytes.
    pub fn to_json(&self, command: &str) -> String {
        let mut m = self.report.clone();
        m.insert("report_version".into(), REPORT_VERSION.into());
        m.insert("command".into(), command.into());
        let mut out = serde_json::to_string_pretty(&Value::Object(m)).expect("report serializes");
        out.push('\n');
        out
    }
}

pub fn tuple(values: &[usize]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}
