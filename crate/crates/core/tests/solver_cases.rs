//! Frozen partial allocations, found by the seeded local search in
//! `common`, that drive one solver step into each handler branch.

mod common;

use efx_core::allocation::{is_efx, lex_dominates, Allocation, PhiOrder};
use efx_core::instance::Instance;
use efx_core::solver::{
    handle_three_sources, handle_two_sources, CaseLabel, SolveOptions, SolverState,
};
use efx_core::solver::solve_from;
use efx_core::Rational;
use serde_json::Value as Json;

struct Case {
    case: CaseLabel,
    detail: String,
    order: PhiOrder,
    inst: Instance<Rational>,
    x: Allocation,
}

fn cases() -> Vec<Case> {
    let text = include_str!("data/cases.json");
    let doc: Json = serde_json::from_str(text).unwrap();
    doc.as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let inst = Instance::from_json(&c["instance"]).unwrap();
            let x = Allocation::from_json(&inst, &c["allocation"]).unwrap();
            let order = c["phi_order"]
                .as_array()
                .unwrap()
                .iter()
                .map(|a| a.as_u64().unwrap() as usize - 1)
                .collect();
            Case {
                case: CaseLabel::from_name(c["case"].as_str().unwrap()).unwrap(),
                detail: c["detail"].as_str().unwrap().to_string(),
                order: PhiOrder::new(order).unwrap(),
                inst,
                x,
            }
        })
        .collect()
}

fn opts(order: &PhiOrder) -> SolveOptions {
    SolveOptions {
        phi_order: Some(order.clone()),
        instrumented: true,
        ..Default::default()
    }
}

#[test]
fn each_fixture_lands_in_its_branch() {
    for c in cases() {
        let mut st = SolverState::from_allocation(&c.inst, c.x.clone(), &opts(&c.order)).unwrap();
        let rec = st.step().unwrap().clone();
        let name = format!("{}/{}", c.case, c.detail);
        assert_eq!((rec.case, rec.detail), (c.case, c.detail.as_str()), "{name}");
        assert!(is_efx(&c.inst, &rec.allocation_after), "{name}");
        assert!(lex_dominates(&c.inst, &c.order, &rec.allocation_after, &c.x), "{name}");
        assert!(st.audit().violations().is_empty(), "{name}: {:?}", st.audit().violations());
    }
}

#[test]
fn each_fixture_solves_to_completion() {
    for c in cases() {
        let sol = solve_from(&c.inst, c.x.clone(), &opts(&c.order)).unwrap();
        assert!(sol.allocation.is_complete());
        assert!(is_efx(&c.inst, &sol.allocation));
        assert!(sol.audit.violations().is_empty());
    }
}

#[test]
fn public_handlers_agree_with_the_solver_step() {
    for c in cases() {
        let g = c.x.pool.first().unwrap();
        let mut st = SolverState::from_allocation(&c.inst, c.x.clone(), &opts(&c.order)).unwrap();
        let rec = st.step().unwrap().clone();
        let direct = match c.case {
            CaseLabel::ThreeSrc2Cycle | CaseLabel::ThreeSrc3Cycle => handle_three_sources(&c.inst, &c.x, g),
            _ => handle_two_sources(&c.inst, &c.x, g, &c.order),
        }
        .unwrap_or_else(|e| panic!("{}/{}: {e}", c.case, c.detail));
        assert_eq!(direct, rec.allocation_after, "{}/{}", c.case, c.detail);
    }
}

#[test]
fn handlers_reject_wrong_source_counts() {
    let c = cases().into_iter().find(|c| c.case == CaseLabel::ThreeSrc3Cycle).unwrap();
    let g = c.x.pool.first().unwrap();
    assert!(handle_two_sources(&c.inst, &c.x, g, &c.order).is_err());
    let c = cases().into_iter().find(|c| c.case == CaseLabel::TwoSrcA13).unwrap();
    assert!(handle_three_sources(&c.inst, &c.x, c.x.pool.first().unwrap()).is_err());
}

#[test]
fn every_order_steps_cleanly_from_every_fixture() {
    for c in cases() {
        for o in common::ORDERS {
            let (rec, violations) = common::step(&common::Candidate { inst: c.inst.clone(), x: c.x.clone() }, o).unwrap();
            assert!(is_efx(&c.inst, &rec.allocation_after));
            assert!(violations.is_empty(), "{violations:?}");
        }
    }
}
