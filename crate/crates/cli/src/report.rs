use std::collections::BTreeMap;
use std::io::Write;

use abrd_core::theorems::{Outcome, Step, StepStatus, Value, Verdict};
use abrd_core::valdiv::DivisionCertificate;
use serde::Serialize;

pub const SCHEMA: &str = "abrd-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub engine: String,
    pub task: String,
    pub parameters: BTreeMap<String, Value>,
    pub outcome: Outcome,
    pub exit_code: i32,
    pub payload: BTreeMap<String, Value>,
    pub trace: Vec<Step>,
    pub certificates: Vec<DivisionCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

pub fn exit_code(o: Outcome) -> i32 {
    match o {
        Outcome::Verified => 0,
        Outcome::Refuted => 1,
        Outcome::Inconclusive => 2,
    }
}

impl Report {
    pub fn from_verdict(v: Verdict, timing_ms: Option<u128>) -> Self {
        Self {
            schema: SCHEMA,
            engine: format!("abrd-core {}", env!("CARGO_PKG_VERSION")),
            task: v.task,
            parameters: v.parameters,
            outcome: v.outcome,
            exit_code: exit_code(v.outcome),
            payload: v.payload,
            trace: v.trace,
            certificates: v.certificates,
            timing_ms,
        }
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Int(i) => i.to_string(),
        Value::Text(s) => s.clone(),
        Value::List(xs) => format!("[{}]", xs.iter().map(value_text).collect::<Vec<_>>().join(", ")),
    }
}

fn cert_text(c: &DivisionCertificate, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    out.push_str(&format!("{pad}- {} [{:?}, {:?}]\n", c.subject, c.rule, c.status));
    for line in &c.trace {
        out.push_str(&format!("{pad}    {line}\n"));
    }
    for ch in &c.children {
        cert_text(ch, depth + 1, out);
    }
}

pub fn render_text(r: &Report) -> String {
    let mut s = format!("{} ({})\ntask: {}\n", r.schema, r.engine, r.task);
    for (k, v) in &r.parameters {
        s.push_str(&format!("  {k} = {}\n", value_text(v)));
    }
    s.push_str(&format!("outcome: {:?} (exit {})\n", r.outcome, r.exit_code).to_lowercase());
    s.push_str("payload:\n");
    for (k, v) in &r.payload {
        s.push_str(&format!("  {k} = {}\n", value_text(v)));
    }
    s.push_str("trace:\n");
    for st in &r.trace {
        let tag = match st.status {
            StepStatus::Ok => "ok",
            StepStatus::Failed => "FAILED",
            StepStatus::Info => "info",
        };
        s.push_str(&format!("  [{tag}] {}: {}\n", st.rule, st.detail));
    }
    if !r.certificates.is_empty() {
        s.push_str("certificates:\n");
        for c in &r.certificates {
            cert_text(c, 1, &mut s);
        }
    }
    if let Some(t) = r.timing_ms {
        s.push_str(&format!("timing: {t} ms\n"));
    }
    s
}

pub fn render(r: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(r),
    }
}

pub fn emit_report(r: &Report, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    out.write_all(render(r, format).as_bytes())
}
