//! Verifiers that replay the proof skeletons with every number recomputed.

mod char_not_p;
mod family;
mod main_theorem;
mod residue_pipelines;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::valdiv::DivisionCertificate;

pub use char_not_p::verify_char_not_p;
pub use family::{build_family, family_size, BForm, FamilyMember, FamilySpec, MemberKind};
pub use main_theorem::{
    expected_shift_lattice,
    verify_count_identities, verify_no_common_splitting, verify_shift_lemma, verify_value_groups,
    verify_value_groups_against,
};
pub use residue_pipelines::{
    example73_scenario, verify_example73, verify_example73_with, verify_lemma72, verify_prop71,
    Example73Scenario, Prop71Toggle,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Verified,
    Refuted,
    Inconclusive,
}

/// A payload entry. Numbers stay exact: rationals and lattices are rendered as text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i128),
    Text(String),
    List(Vec<Value>),
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl From<$t> for Value {
            fn from(x: $t) -> Self {
                Value::Int(x as i128)
            }
        }
    )*};
}
int_value!(i64, u64, usize, u32, i128);

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(v: Vec<T>) -> Self {
        Value::List(v.into_iter().map(Into::into).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Ok,
    Failed,
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: String,
    pub detail: String,
    pub status: StepStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub task: String,
    pub parameters: BTreeMap<String, Value>,
    pub outcome: Outcome,
    pub payload: BTreeMap<String, Value>,
    pub trace: Vec<Step>,
    pub certificates: Vec<DivisionCertificate>,
}

impl Verdict {
    pub fn new(task: &str) -> Self {
        Self {
            task: task.to_string(),
            parameters: BTreeMap::new(),
            outcome: Outcome::Inconclusive,
            payload: BTreeMap::new(),
            trace: Vec::new(),
            certificates: Vec::new(),
        }
    }

    pub fn param(mut self, k: &str, v: impl Into<Value>) -> Self {
        self.parameters.insert(k.to_string(), v.into());
        self
    }

    pub fn put(&mut self, k: &str, v: impl Into<Value>) {
        self.payload.insert(k.to_string(), v.into());
    }

    pub fn step(&mut self, rule: &str, detail: impl Into<String>, ok: bool) -> bool {
        let status = if ok { StepStatus::Ok } else { StepStatus::Failed };
        self.trace.push(Step { rule: rule.into(), detail: detail.into(), status });
        ok
    }

    pub fn info(&mut self, rule: &str, detail: impl Into<String>) {
        self.trace.push(Step { rule: rule.into(), detail: detail.into(), status: StepStatus::Info });
    }

    pub fn finish(mut self, outcome: Outcome) -> Self {
        self.outcome = outcome;
        self
    }

    /// `Verified` if every recorded step passed, else the given fallback.
    pub fn conclude(self, otherwise: Outcome) -> Self {
        let ok = self.trace.iter().all(|s| s.status != StepStatus::Failed);
        self.finish(if ok { Outcome::Verified } else { otherwise })
    }

    pub fn is_verified(&self) -> bool {
        self.outcome == Outcome::Verified
    }

    pub fn get(&self, k: &str) -> Option<&Value> {
        self.payload.get(k)
    }

    pub fn get_int(&self, k: &str) -> Option<i128> {
        match self.payload.get(k)? {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }
}
