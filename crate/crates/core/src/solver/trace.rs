//! Per-step records and their JSON form.

use serde_json::{json, Value as Json};

use crate::allocation::Allocation;
use crate::instance::{Instance, PerturbedValue};
use crate::value::Value;

use super::CaseLabel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord<V> {
    pub iteration: usize,
    pub case: CaseLabel,
    /// Which terminal allocation of the case was emitted.
    pub detail: &'static str,
    /// The unallocated good the step was driven by; `None` for rotations.
    pub good: Option<usize>,
    pub phi_before: Vec<PerturbedValue<V>>,
    pub phi_after: Vec<PerturbedValue<V>>,
    pub allocation_after: Allocation,
}

fn phi_json<V: Value>(phi: &[PerturbedValue<V>]) -> Json {
    phi.iter()
        .map(|p| json!({"value": p.base.to_json(), "key": p.key.to_string()}))
        .collect()
}

impl<V: Value> StepRecord<V> {
    pub fn to_json(&self, inst: &Instance<V>) -> Json {
        json!({
            "iteration": self.iteration,
            "case": self.case.name(),
            "detail": self.detail,
            "good": self.good.map(|g| inst.good_id(g).to_string()),
            "phi_before": phi_json(&self.phi_before),
            "phi_after": phi_json(&self.phi_after),
            "allocation_after": self.allocation_after.to_json(inst),
        })
    }
}

pub fn trace_to_json<V: Value>(inst: &Instance<V>, trace: &[StepRecord<V>]) -> Json {
    Json::Array(trace.iter().map(|r| r.to_json(inst)).collect())
}
