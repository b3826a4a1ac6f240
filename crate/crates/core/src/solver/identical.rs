//! Baseline for identical valuations: repeatedly move a good out of a
//! strongly envied bundle into the poorest agent's bundle.

use crate::allocation::{phi, strong_envy_witnesses, Allocation, PhiOrder};
use crate::bundle::Bundle;
use crate::error::ContractError;
use crate::instance::{Instance, Order};
use crate::value::Value;

use super::{Audit, CaseLabel, Solution, StepRecord};

/// Works for any number of agents. The trace records each move; its potential
/// is the identity-order vector and is not monotone here, only the minimum
/// bundle value is.
pub fn solve_identical<V: Value>(inst: &Instance<V>) -> Result<Solution<V>, ContractError> {
    let n = inst.num_agents();
    if (1..n).any(|i| inst.row(i) != inst.row(0)) {
        return Err(ContractError::new("valuations are not identical"));
    }
    let order = PhiOrder::identity(n);
    let mut bundles = vec![Bundle::new(); n];
    bundles[0] = inst.all_goods();
    let mut x = Allocation::with_complement_pool(inst, bundles);
    let mut trace = Vec::new();

    while let Some(&(_, j, g)) = strong_envy_witnesses(Order::Perturbed, inst, &x).first() {
        // one shared valuation, so agent 0's order ranks every bundle
        let poorest = (0..n)
            .min_by(|&a, &b| inst.compare(0, &x.bundles[a], &x.bundles[b]).then(a.cmp(&b)))
            .expect("at least one agent");
        let mut y = x.clone();
        y.bundles[j].remove(g);
        y.bundles[poorest].insert(g);
        trace.push(StepRecord {
            iteration: trace.len() + 1,
            case: CaseLabel::IdenticalBaseline,
            detail: "move",
            good: Some(g),
            phi_before: phi(inst, &order, &x),
            phi_after: phi(inst, &order, &y),
            allocation_after: y.clone(),
        });
        x = y;
    }
    Ok(Solution {
        allocation: x,
        trace,
        audit: Audit::new(false),
    })
}
