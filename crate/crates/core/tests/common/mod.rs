//! Shared helpers for the integration tests: seeded instances, a naive
//! re-implementation of the predicates, and a local search that builds
//! partial allocations reaching the deeper solver cases.
#![allow(dead_code)]

use efx_core::allocation::{is_efx, strong_envy_witnesses, Allocation, PhiOrder};
use efx_core::bundle::Bundle;
use efx_core::graphs::{champion_graph, envy_graph};
use efx_core::instance::{Instance, Order};
use efx_core::solver::{CaseLabel, SolveOptions, SolverState, StepRecord};
use efx_core::value::int;
use efx_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// A starting point for one solver step.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub inst: Instance<Rational>,
    pub x: Allocation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Want {
    ThreeSources,
    TwoSources,
}

/// Lower is better; zero means the candidate reaches a multi-source case
/// without self-champions.
fn badness(c: &Candidate, want: Want) -> usize {
    let strong = strong_envy_witnesses(Order::Perturbed, &c.inst, &c.x).len();
    let e = envy_graph(&c.inst, &c.x);
    let g = match c.x.pool.first() {
        Some(g) => g,
        None => return usize::MAX,
    };
    let m = champion_graph(&c.inst, &c.x, g);
    let sources = e.sources().len();
    let source_pen = match want {
        Want::ThreeSources => 3 - sources,
        Want::TwoSources => sources.abs_diff(2),
    };
    20 * strong + 5 * usize::from(!e.is_acyclic()) + 4 * source_pen + 3 * m.self_champions().len()
}

fn mutate(c: &Candidate, rng: &mut ChaCha8Rng, max_value: i64) -> Candidate {
    let n = 3;
    let m = c.inst.num_goods();
    let mut next = c.clone();
    if rng.gen_bool(0.6) {
        let (i, g) = (rng.gen_range(0..n), rng.gen_range(0..m));
        next.inst = c.inst.with_value(i, g, int(rng.gen_range(0..=max_value))).unwrap();
    } else {
        // good 0 stays unallocated so it drives the step
        let g = rng.gen_range(1..m);
        let mut bundles = c.x.bundles.clone();
        for b in bundles.iter_mut() {
            b.remove(g);
        }
        let to = rng.gen_range(0..=n);
        if to < n {
            bundles[to].insert(g);
        }
        next.x = Allocation::with_complement_pool(&next.inst, bundles);
    }
    next
}

fn random_candidate(rng: &mut ChaCha8Rng, max_value: i64) -> Candidate {
    let m = rng.gen_range(4..=9);
    let rows = (0..3)
        .map(|_| (0..m).map(|_| int(rng.gen_range(0..=max_value))).collect())
        .collect();
    let inst = Instance::from_rows(rows).unwrap();
    let mut bundles = vec![Bundle::new(); 3];
    for g in 1..m {
        let to = rng.gen_range(0..4);
        if to < 3 {
            bundles[to].insert(g);
        }
    }
    let x = Allocation::with_complement_pool(&inst, bundles);
    Candidate { inst, x }
}

/// Hill-climbs from a random start until the candidate is EFX, has the wanted
/// number of sources and no self-champion. `None` when the budget runs out.
pub fn climb(rng: &mut ChaCha8Rng, want: Want, budget: usize) -> Option<Candidate> {
    let max_value = [10, 20, 40][rng.gen_range(0..3)];
    let mut cur = random_candidate(rng, max_value);
    let mut score = badness(&cur, want);
    for _ in 0..budget {
        if score == 0 {
            debug_assert!(is_efx(&cur.inst, &cur.x));
            return Some(cur);
        }
        let next = mutate(&cur, rng, max_value);
        let s = badness(&next, want);
        if s <= score {
            cur = next;
            score = s;
        }
    }
    None
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One instrumented step from `c` under the given potential order.
pub fn step(c: &Candidate, order: [usize; 3]) -> Result<(StepRecord<Rational>, Vec<String>), String> {
    let opts = SolveOptions {
        instrumented: true,
        phi_order: PhiOrder::new(order.to_vec()),
        ..Default::default()
    };
    let mut st = SolverState::from_allocation(&c.inst, c.x.clone(), &opts).map_err(|e| e.to_string())?;
    let rec = st.step().map_err(|e| e.to_string())?.clone();
    Ok((rec, st.audit().violations().to_vec()))
}

/// Like [`climb`], but keeps walking until one step under `order` lands in
/// the given case and detail (any detail when `detail` is empty).
pub fn climb_to(
    rng: &mut ChaCha8Rng,
    case: CaseLabel,
    detail: &str,
    order: [usize; 3],
    budget: usize,
) -> Option<Candidate> {
    let want = match case {
        CaseLabel::ThreeSrc2Cycle | CaseLabel::ThreeSrc3Cycle => Want::ThreeSources,
        _ => Want::TwoSources,
    };
    let score = |c: &Candidate| {
        let base = badness(c, want);
        if base == usize::MAX {
            return base;
        }
        let mut s = 10 * base;
        if case == CaseLabel::ThreeSrc3Cycle {
            if let Some(g) = c.x.pool.first() {
                s += 10 * champion_graph(&c.inst, &c.x, g).two_cycles().len();
            }
        }
        if s == 0 {
            match step(c, order) {
                Ok((rec, _)) if rec.case == case && (detail.is_empty() || rec.detail == detail) => 0,
                Ok((rec, _)) if rec.case == case => 1,
                _ => 2,
            }
        } else {
            s + 2
        }
    };
    let max_value = [10, 20, 40][rng.gen_range(0..3)];
    let mut cur = random_candidate(rng, max_value);
    let mut best = score(&cur);
    for _ in 0..budget {
        if best == 0 {
            return Some(cur);
        }
        let next = mutate(&cur, rng, max_value);
        let s = score(&next);
        if s <= best {
            cur = next;
            best = s;
        }
    }
    None
}
