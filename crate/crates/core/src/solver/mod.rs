//! Constructive EFX solver for three agents.
//!
//! Starting from the empty allocation, every step moves to another EFX
//! allocation whose potential `(v_a(X_a), v_b(X_b), v_c(X_c))` is strictly
//! larger in lexicographic order. The potential takes finitely many values,
//! so the loop ends, and it can only end once the pool is empty.

mod audit;
mod identical;
mod three_sources;
mod trace;
mod two_sources;

use std::fmt;

use thiserror::Error;

use crate::allocation::{is_efx, lex_dominates, phi, Allocation, PhiOrder};
use crate::error::ContractError;
use crate::graphs::{champion_cut, champion_graph, eliminate_envy_cycles, envy_graph};
use crate::instance::Instance;
use crate::value::Value;

pub use audit::Audit;
pub use identical::solve_identical;
pub use three_sources::handle_three_sources;
pub use trace::{trace_to_json, StepRecord};

pub use two_sources::handle_two_sources;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseLabel {
    CycleElim,
    SingleSource,
    SelfChampion,
    ThreeSrc2Cycle,
    ThreeSrc3Cycle,
    TwoSrcQuick,
    TwoSrcA13,
    TwoSrcA2,
    IdenticalBaseline,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 9] = [
        CaseLabel::CycleElim,
        CaseLabel::SingleSource,
        CaseLabel::SelfChampion,
        CaseLabel::ThreeSrc2Cycle,
        CaseLabel::ThreeSrc3Cycle,
        CaseLabel::TwoSrcQuick,
        CaseLabel::TwoSrcA13,
        CaseLabel::TwoSrcA2,
        CaseLabel::IdenticalBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseLabel::CycleElim => "CycleElim",
            CaseLabel::SingleSource => "SingleSource",
            CaseLabel::SelfChampion => "SelfChampion",
            CaseLabel::ThreeSrc2Cycle => "ThreeSrc2Cycle",
            CaseLabel::ThreeSrc3Cycle => "ThreeSrc3Cycle",
            CaseLabel::TwoSrcQuick => "TwoSrcQuick",
            CaseLabel::TwoSrcA13 => "TwoSrcA13",
            CaseLabel::TwoSrcA2 => "TwoSrcA2",
            CaseLabel::IdenticalBaseline => "IdenticalBaseline",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("the solver needs exactly 3 agents, instance has {0}")]
    AgentCount(usize),
    #[error(transparent)]
    Contract(#[from] ContractError),
    /// An invariant the construction guarantees did not hold.
    #[error("solver defect after {} steps: {message}", trace.len())]
    Defect { message: String, trace: Vec<String> },
}

fn defect(message: impl Into<String>) -> SolveError {
    SolveError::Defect {
        message: message.into(),
        trace: Vec::new(),
    }
}

/// Result of one case handler: the new allocation and a short sub-case tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandlerOutcome {
    pub allocation: Allocation,
    pub detail: &'static str,
}

impl HandlerOutcome {
    fn new(allocation: Allocation, detail: &'static str) -> Self {
        HandlerOutcome { allocation, detail }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Potential ordering; input order when `None`.
    pub phi_order: Option<PhiOrder>,
    /// Run the structural audit at every step.
    pub instrumented: bool,
    pub max_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            phi_order: None,
            instrumented: false,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution<V> {
    pub allocation: Allocation,
    pub trace: Vec<StepRecord<V>>,
    pub audit: Audit,
}

/// Mutable state of one solve.
pub struct SolverState<'a, V> {
    inst: &'a Instance<V>,
    x: Allocation,
    order: PhiOrder,
    iteration: usize,
    trace: Vec<StepRecord<V>>,
    audit: Audit,
}

impl<'a, V: Value> SolverState<'a, V> {
    pub fn new(inst: &'a Instance<V>, opts: &SolveOptions) -> Result<Self, SolveError> {
        if inst.num_agents() != 3 {
            return Err(SolveError::AgentCount(inst.num_agents()));
        }
        let order = opts.phi_order.clone().unwrap_or_else(|| PhiOrder::identity(3));
        if order.agents().len() != 3 {
            return Err(ContractError::new("potential order must list 3 agents").into());
        }
        Ok(SolverState {
            inst,
            x: Allocation::empty(inst),
            order,
            iteration: 0,
            trace: Vec::new(),
            audit: Audit::new(opts.instrumented),
        })
    }

    /// Resumes from an arbitrary EFX allocation, e.g. a partial one.
    pub fn from_allocation(
        inst: &'a Instance<V>,
        x: Allocation,
        opts: &SolveOptions,
    ) -> Result<Self, SolveError> {
        let mut state = Self::new(inst, opts)?;
        x.validate(inst)
            .map_err(|e| ContractError::new(format!("invalid allocation: {e}")))?;
        if !is_efx(inst, &x) {
            return Err(ContractError::new("starting allocation is not EFX").into());
        }
        state.x = x;
        Ok(state)
    }

    pub fn audit(&self) -> &Audit {
        &self.audit
    }

    pub fn allocation(&self) -> &Allocation {
        &self.x
    }

    pub fn trace(&self) -> &[StepRecord<V>] {
        &self.trace
    }

    pub fn is_done(&self) -> bool {
        self.x.is_complete()
    }

    /// One dominating move. Requires a nonempty pool.
    pub fn step(&mut self) -> Result<&StepRecord<V>, SolveError> {
        let inst = self.inst;
        let x = self.x.clone();
        if x.pool.is_empty() {
            return Err(ContractError::new("step needs an unallocated good").into());
        }
        let (case, good, outcome) = dispatch(inst, &x, &self.order, &mut self.audit)?;
        let y = outcome.allocation;

        if let Err(e) = y.validate(inst) {
            return Err(defect(format!("{case}/{}: invalid allocation: {e}", outcome.detail)));
        }
        if y.allocated().union(&y.pool) != inst.all_goods() {
            return Err(defect(format!("{case}/{}: goods lost", outcome.detail)));
        }
        if !is_efx(inst, &y) {
            return Err(defect(format!("{case}/{}: result is not EFX", outcome.detail)));
        }
        if !lex_dominates(inst, &self.order, &y, &x) {
            return Err(defect(format!(
                "{case}/{}: potential did not increase",
                outcome.detail
            )));
        }
        if let Some(v) = self.audit.violations().first() {
            return Err(defect(format!("{case}/{}: audit check `{v}` failed", outcome.detail)));
        }

        self.iteration += 1;
        self.trace.push(StepRecord {
            iteration: self.iteration,
            case,
            detail: outcome.detail,
            good,
            phi_before: phi(inst, &self.order, &x),
            phi_after: phi(inst, &self.order, &y),
            allocation_after: y.clone(),
        });
        self.x = y;
        Ok(self.trace.last().expect("just pushed"))
    }
}

/// Case dispatch in fixed priority.
fn dispatch<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    order: &PhiOrder,
    audit: &mut Audit,
) -> Result<(CaseLabel, Option<usize>, HandlerOutcome), SolveError> {
    let e = envy_graph(inst, x);
    if !e.is_acyclic() {
        let y = eliminate_envy_cycles(inst, x);
        return Ok((CaseLabel::CycleElim, None, HandlerOutcome::new(y, "rotate_cycles")));
    }
    let g = x.pool.first().expect("pool checked nonempty");
    let m = champion_graph(inst, x, g);
    audit::champion_structure(audit, inst, x, &m);

    let sources = e.sources();
    if let [s] = sources[..] {
        let i = m.champions_of(s)[0];
        let y = apply_champion_path(inst, x, s, i, g)?;
        return Ok((CaseLabel::SingleSource, Some(g), HandlerOutcome::new(y, "path")));
    }
    if let Some(&s) = m.self_champions().first() {
        let y = apply_champion_path(inst, x, s, s, g)?;
        return Ok((CaseLabel::SelfChampion, Some(g), HandlerOutcome::new(y, "self")));
    }
    if sources.len() == 3 {
        let out = three_sources::three_sources(inst, x, g, audit)?;
        Ok((out.0, Some(g), out.1))
    } else {
        let out = two_sources::two_sources(inst, x, g, order, audit)?;
        Ok((out.0, Some(g), out.1))
    }
}

/// Shifts bundles backward along an envy path from `s` to its champion `i`
/// and hands `i` the upper part of `X_s + g`; the cut's lower part returns
/// to the pool. Everybody on the path strictly improves.
pub fn apply_champion_path<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    s: usize,
    i: usize,
    g: usize,
) -> Result<Allocation, ContractError> {
    if !x.pool.contains(g) {
        return Err(ContractError::new(format!(
            "good {} is not unallocated",
            inst.good_id(g)
        )));
    }
    let cut = champion_cut(inst, x, i, s, g)?;
    let path = envy_graph(inst, x).path(s, i).ok_or_else(|| {
        ContractError::new(format!(
            "champion {} is not reachable from {} in the envy graph",
            i + 1,
            s + 1
        ))
    })?;
    let mut bundles = x.bundles.clone();
    for w in path.windows(2) {
        bundles[w[0]] = x.bundles[w[1]].clone();
    }
    bundles[i] = cut.upper;
    Ok(Allocation::with_complement_pool(inst, bundles))
}

pub fn solve<V: Value>(inst: &Instance<V>) -> Result<Solution<V>, SolveError> {
    solve_with(inst, &SolveOptions::default())
}

pub fn solve_with<V: Value>(inst: &Instance<V>, opts: &SolveOptions) -> Result<Solution<V>, SolveError> {
    run(SolverState::new(inst, opts)?, opts)
}

/// Completes an EFX partial allocation.
pub fn solve_from<V: Value>(
    inst: &Instance<V>,
    start: Allocation,
    opts: &SolveOptions,
) -> Result<Solution<V>, SolveError> {
    run(SolverState::from_allocation(inst, start, opts)?, opts)
}

fn run<V: Value>(mut state: SolverState<'_, V>, opts: &SolveOptions) -> Result<Solution<V>, SolveError> {
    while !state.is_done() {
        if state.iteration >= opts.max_steps {
            return Err(attach_trace(defect("step limit reached"), &state));
        }
        if let Err(e) = state.step() {
            return Err(attach_trace(e, &state));
        }
    }
    Ok(Solution {
        allocation: state.x,
        trace: state.trace,
        audit: state.audit,
    })
}

fn attach_trace<V: Value>(err: SolveError, state: &SolverState<'_, V>) -> SolveError {
    match err {
        SolveError::Defect { message, .. } => SolveError::Defect {
            message,
            trace: state
                .trace
                .iter()
                .map(|r| format!("{} {}/{}", r.iteration, r.case, r.detail))
                .collect(),
        },
        other => other,
    }
}
