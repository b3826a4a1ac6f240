//! Envy-free allocations: upper-half swaps along champion 2- and 3-cycles.

use crate::allocation::{envies, is_efx, strong_envy, Allocation};
use crate::bundle::Bundle;
use crate::graphs::{champion_cut, champion_graph, envy_graph, smallest_beating, ChampionGraph};
use crate::instance::Instance;
use crate::value::Value;

use super::{defect, Audit, CaseLabel, HandlerOutcome, SolveError};
use crate::error::ContractError;

/// Public entry: checks the preconditions and runs the handler without
/// auditing.
pub fn handle_three_sources<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    g: usize,
) -> Result<Allocation, SolveError> {
    if x.num_agents() != 3 {
        return Err(SolveError::AgentCount(x.num_agents()));
    }
    if !x.pool.contains(g) {
        return Err(ContractError::new("good is not unallocated").into());
    }
    if envy_graph(inst, x).sources().len() != 3 {
        return Err(ContractError::new("allocation is not envy-free").into());
    }
    if !champion_graph(inst, x, g).self_champions().is_empty() {
        return Err(ContractError::new("champion graph has a self-loop").into());
    }
    let mut audit = Audit::new(false);
    three_sources(inst, x, g, &mut audit).map(|(_, out)| out.allocation)
}

pub(super) fn three_sources<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    g: usize,
    audit: &mut Audit,
) -> Result<(CaseLabel, HandlerOutcome), SolveError> {
    let m = champion_graph(inst, x, g);
    if let Some(&(p, q)) = m.two_cycles().first() {
        let r = 3 - p - q;
        let out = two_cycle_swap(inst, x, g, p, q, r)?;
        return Ok((CaseLabel::ThreeSrc2Cycle, out));
    }
    let out = three_cycle(inst, x, g, &m, audit)?;
    Ok((CaseLabel::ThreeSrc3Cycle, out))
}

/// `p` and `q` champion each other and `r` envies neither. Swap the upper
/// halves; if `r` now envies one of them, that agent trades its new lower
/// half for `g`.
pub(super) fn two_cycle_swap<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    g: usize,
    p: usize,
    q: usize,
    r: usize,
) -> Result<HandlerOutcome, SolveError> {
    let g_pq = champion_cut(inst, x, p, q, g)?.lower;
    let g_qp = champion_cut(inst, x, q, p, g)?.lower;
    let upper_p = x.bundles[p].minus(&g_qp);
    let upper_q = x.bundles[q].minus(&g_pq);

    let mut bundles = x.bundles.clone();
    bundles[p] = upper_q.union(&g_qp);
    bundles[q] = upper_p.union(&g_pq);
    let swapped = Allocation::with_complement_pool(inst, bundles);
    if is_efx(inst, &swapped) {
        return Ok(HandlerOutcome::new(swapped, "swap"));
    }

    let mut bundles = swapped.bundles.clone();
    if envies(inst, &swapped, r, q) {
        bundles[q] = upper_p.with(g);
    } else if envies(inst, &swapped, r, p) {
        bundles[p] = upper_q.with(g);
    } else {
        return Err(defect("upper-half swap left strong envy not caused by the third agent"));
    }
    Ok(HandlerOutcome::new(
        Allocation::with_complement_pool(inst, bundles),
        "swap_with_good",
    ))
}

fn three_cycle<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    g: usize,
    m: &ChampionGraph,
    audit: &mut Audit,
) -> Result<HandlerOutcome, SolveError> {
    let unique = |j: usize| -> Result<usize, SolveError> {
        match m.champions_of(j) {
            [c] if *c != j => Ok(*c),
            _ => Err(defect("champion graph without 1- or 2-cycles is not a 3-cycle")),
        }
    };
    // role k + 1 is the unique champion of role k
    let c0 = unique(0)?;
    let roles = [0, c0, unique(c0)?];
    if unique(roles[2])? != 0 {
        return Err(defect("champion graph without 1- or 2-cycles is not a 3-cycle"));
    }

    let mut lower = Vec::with_capacity(3);
    for k in 0..3 {
        lower.push(champion_cut(inst, x, roles[(k + 1) % 3], roles[k], g)?.lower);
    }
    let upper: Vec<Bundle> = (0..3).map(|k| x.bundles[roles[k]].minus(&lower[k])).collect();
    let gb = Bundle::singleton(g);
    let prev = |k: usize| (k + 2) % 3;
    let next = |k: usize| (k + 1) % 3;

    for k in 0..3 {
        let a = roles[k];
        audit.check("three_cycle_upper_order", || {
            inst.prefers(a, &upper[prev(k)], &upper[k]) && inst.prefers(a, &upper[prev(k)], &upper[next(k)])
        });
        audit.check("three_cycle_lower_order", || {
            !lower[k].contains(g)
                && inst.prefers(a, &lower[k], &gb)
                && inst.prefers(a, &gb, &lower[prev(k)])
        });
    }

    // everyone takes the upper half it likes best
    let mut bundles = x.bundles.clone();
    for k in 0..3 {
        bundles[roles[k]] = upper[prev(k)].union(&lower[k]);
    }
    let shifted = Allocation::with_complement_pool(inst, bundles);
    if is_efx(inst, &shifted) {
        return Ok(HandlerOutcome::new(shifted, "shift"));
    }

    let strong: Vec<bool> = (0..3)
        .map(|k| strong_envy(inst, &shifted, roles[k], roles[next(k)]))
        .collect();
    if strong.iter().all(|&s| s) {
        let mut bundles = shifted.bundles.clone();
        for k in 0..3 {
            bundles[roles[k]] = shifted.bundles[roles[next(k)]].clone();
        }
        return Ok(HandlerOutcome::new(
            Allocation::with_complement_pool(inst, bundles),
            "shift_rotate",
        ));
    }

    // relabel so role 0 strongly envies role 1 and role 2 does not strongly envy role 0
    let t = (0..3)
        .find(|&t| strong[t] && !strong[prev(t)])
        .ok_or_else(|| defect("shifted allocation is not EFX yet has no strong envy edge"))?;
    let s: Vec<usize> = (0..3).map(|k| roles[(k + t) % 3]).collect();
    let l: Vec<&Bundle> = (0..3).map(|k| &lower[(k + t) % 3]).collect();
    let u: Vec<&Bundle> = (0..3).map(|k| &upper[(k + t) % 3]).collect();

    audit.check("three_cycle_first_envier_order", || {
        inst.prefers(s[0], u[0], u[1]) && inst.prefers(s[0], l[1], l[0])
    });

    let mut bundles = shifted.bundles.clone();
    bundles[s[1]] = u[0].with(g);
    let replaced = Allocation::with_complement_pool(inst, bundles);
    if is_efx(inst, &replaced) {
        return Ok(HandlerOutcome::new(replaced, "shift_with_good"));
    }

    audit.check("three_cycle_second_envier_order", || {
        inst.prefers(s[1], u[1], u[2]) && inst.prefers(s[1], l[2], l[1])
    });

    let z = smallest_beating(inst, s[1], &u[0].union(l[2]), &x.bundles[s[1]])
        .ok_or_else(|| defect("no subset beats the second agent's bundle"))?;
    let mut bundles = x.bundles.clone();
    let detail = if inst.prefers(s[2], &z, &x.bundles[s[2]]) {
        bundles[s[0]] = u[2].with(g);
        bundles[s[1]] = x.bundles[s[1]].clone();
        bundles[s[2]] = z;
        "z_to_third"
    } else {
        bundles[s[0]] = u[2].union(l[1]);
        bundles[s[1]] = z;
        bundles[s[2]] = u[1].with(g);
        "z_to_second"
    };
    Ok(HandlerOutcome::new(
        Allocation::with_complement_pool(inst, bundles),
        detail,
    ))
}
