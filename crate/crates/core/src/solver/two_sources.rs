//! Envy graphs with exactly two sources.
//!
//! After the quick cases the agents are relabelled into roles `one`, `two`,
//! `three`: `one` and `two` are sources, `one` envies `three`, `two` does not,
//! `two` champions `one` and `three` champions `two`. The potential leader
//! decides which agent is made strictly better off.

use crate::allocation::{envies, is_efx, strong_envy, Allocation, PhiOrder};
use crate::bundle::Bundle;
use crate::error::ContractError;
use crate::graphs::{champion_cut, champion_graph, envy_graph, most_envious, smallest_beating};
use crate::instance::Instance;
use crate::value::Value;

use super::three_sources::two_cycle_swap;
use super::{apply_champion_path, defect, Audit, CaseLabel, HandlerOutcome, SolveError};

/// Public entry: checks the preconditions and runs the handler without
/// auditing.
pub fn handle_two_sources<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    g: usize,
    order: &PhiOrder,
) -> Result<Allocation, SolveError> {
    if x.num_agents() != 3 {
        return Err(SolveError::AgentCount(x.num_agents()));
    }
    if !x.pool.contains(g) {
        return Err(ContractError::new("good is not unallocated").into());
    }
    let e = envy_graph(inst, x);
    if !e.is_acyclic() || e.sources().len() != 2 {
        return Err(ContractError::new("envy graph must be acyclic with two sources").into());
    }
    if !champion_graph(inst, x, g).self_champions().is_empty() {
        return Err(ContractError::new("champion graph has a self-loop").into());
    }
    let mut audit = Audit::new(false);
    two_sources(inst, x, g, order, &mut audit).map(|(_, out)| out.allocation)
}

#[derive(Clone, Copy)]
struct Roles {
    one: usize,
    two: usize,
    three: usize,
}

pub(super) fn two_sources<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    g: usize,
    order: &PhiOrder,
    audit: &mut Audit,
) -> Result<(CaseLabel, HandlerOutcome), SolveError> {
    let e = envy_graph(inst, x);
    let m = champion_graph(inst, x, g);
    let sources = e.sources();
    let (s1, s2) = (sources[0], sources[1]);
    let t = 3 - s1 - s2;
    let quick = |out: HandlerOutcome| Ok((CaseLabel::TwoSrcQuick, out));

    let roles = if e.has_edge(s1, t) && e.has_edge(s2, t) {
        for s in [s1, s2] {
            if m.has_edge(t, s) {
                let y = apply_champion_path(inst, x, s, t, g)?;
                return quick(HandlerOutcome::new(y, "path_to_sink"));
            }
        }
        return quick(two_cycle_swap(inst, x, g, s1, s2, t)?);
    } else if e.has_edge(s1, t) {
        Roles { one: s1, two: s2, three: t }
    } else {
        Roles { one: s2, two: s1, three: t }
    };
    let Roles { one, two, three } = roles;

    if m.has_edge(three, one) {
        let y = apply_champion_path(inst, x, one, three, g)?;
        return quick(HandlerOutcome::new(y, "path_to_sink"));
    }
    if !m.has_edge(two, one) {
        return Err(defect("source without a champion"));
    }
    if m.has_edge(one, two) {
        return quick(two_cycle_swap(inst, x, g, one, two, three)?);
    }
    if !m.has_edge(three, two) {
        return Err(defect("source without a champion"));
    }

    let g21 = champion_cut(inst, x, two, one, g)?.lower;
    let g32 = champion_cut(inst, x, three, two, g)?.lower;
    audit.check("two_sources_lower_halves", || {
        !g21.contains(g) && !g32.contains(g) && !g21.is_empty() && !g32.is_empty()
    });
    let g_prime = g21.first().ok_or_else(|| defect("empty lower half"))?;
    let ctx = Ctx {
        inst,
        x,
        g,
        g_prime,
        roles,
        u1: x.bundles[one].minus(&g21),
        g32,
    };

    if order.leader() == two {
        Ok((CaseLabel::TwoSrcA2, ctx.leader_two(audit)?))
    } else {
        Ok((CaseLabel::TwoSrcA13, ctx.leader_one_or_three(order.leader(), audit)?))
    }
}

struct Ctx<'a, V> {
    inst: &'a Instance<V>,
    x: &'a Allocation,
    g: usize,
    /// Lowest good of the lower half `two` cuts from `one`.
    g_prime: usize,
    roles: Roles,
    u1: Bundle,
    g32: Bundle,
}

impl<V: Value> Ctx<'_, V> {
    fn alloc(&self, one: Bundle, two: Bundle, three: Bundle) -> Allocation {
        let mut bundles = vec![Bundle::new(); 3];
        bundles[self.roles.one] = one;
        bundles[self.roles.two] = two;
        bundles[self.roles.three] = three;
        Allocation::with_complement_pool(self.inst, bundles)
    }

    /// Hands `g'` along the envy path from the single source `s`.
    fn single_source(&self, y: &Allocation, s: usize) -> Result<Allocation, SolveError> {
        let e = envy_graph(self.inst, y);
        if e.sources() != [s] {
            return Err(defect("expected a single-source envy graph"));
        }
        let m = champion_graph(self.inst, y, self.g_prime);
        Ok(apply_champion_path(self.inst, y, s, m.champions_of(s)[0], self.g_prime)?)
    }

    fn leader_one_or_three(&self, leader: usize, audit: &mut Audit) -> Result<HandlerOutcome, SolveError> {
        let (inst, x) = (self.inst, self.x);
        let Roles { one, two, three } = self.roles;
        let x3 = &x.bundles[three];
        let u2 = x.bundles[two].minus(&self.g32);
        audit.check("two_sources_upper_order", || inst.prefers(two, &self.u1, &u2));

        let mid = self.u1.union(&self.g32);
        let a = u2.with(self.g);
        let first = self.alloc(x3.clone(), mid.clone(), a.clone());
        if is_efx(inst, &first) {
            return Ok(HandlerOutcome::new(first, "shift"));
        }
        audit.check("two_sources_only_one_strongly_envies_two", || {
            strong_envy(inst, &first, one, two)
                && !strong_envy(inst, &first, two, one)
                && !strong_envy(inst, &first, two, three)
                && !strong_envy(inst, &first, three, one)
                && !strong_envy(inst, &first, three, two)
                && !strong_envy(inst, &first, one, three)
        });

        let best = inst.max_of(two, &a, x3).clone();
        let worst = inst.min_of(two, &a, x3).clone();
        let z = smallest_beating(inst, two, &mid, &best)
            .ok_or_else(|| defect("no subset beats the middle agent's best bundle"))?;
        if !inst.prefers(one, &z, x3) {
            return Ok(HandlerOutcome::new(self.alloc(x3.clone(), z, a), "z_to_two"));
        }
        if leader == one || worst == a {
            return Ok(HandlerOutcome::new(self.alloc(z, best, worst), "z_to_one"));
        }
        // three keeps X_3; it becomes the single source and takes g' along the path
        let path = self.alloc(z, a, x3.clone());
        Ok(HandlerOutcome::new(self.single_source(&path, three)?, "z_to_one_then_path"))
    }

    fn leader_two(&self, audit: &mut Audit) -> Result<HandlerOutcome, SolveError> {
        let (inst, x) = (self.inst, self.x);
        let Roles { one, two, three } = self.roles;
        let x2 = &x.bundles[two];
        let x3 = &x.bundles[three];
        let b = self.u1.with(self.g);
        for i in [one, three] {
            audit.check("two_sources_third_bundle_best", || {
                inst.prefers(i, x3, inst.max_of(i, &b, x2))
            });
        }

        let kappa = |i: usize| {
            smallest_beating(inst, i, x3, inst.max_of(i, &b, x2))
                .map(|z| z.len())
                .ok_or_else(|| defect("third bundle does not beat the alternatives"))
        };
        let (w, l) = if kappa(one)? <= kappa(three)? {
            (one, three)
        } else {
            (three, one)
        };

        let hi = inst.max_of(l, x2, &b).clone();
        let lo = inst.min_of(l, x2, &b).clone();
        let with = |w_b: Bundle, l_b: Bundle, two_b: Bundle| {
            let mut bundles = vec![Bundle::new(); 3];
            bundles[w] = w_b;
            bundles[l] = l_b;
            bundles[two] = two_b;
            Allocation::with_complement_pool(inst, bundles)
        };

        let first = with(x3.clone(), hi.clone(), lo.clone());
        if !strong_envy(inst, &first, l, w) {
            if lo == b {
                return Ok(HandlerOutcome::new(first, "winner_takes_third"));
            }
            let y = with(x3.clone(), b, x2.clone());
            return Ok(HandlerOutcome::new(self.single_source(&y, two)?, "winner_takes_third_then_path"));
        }

        // trim w's bundle from the bottom until l stops envying it strongly
        let mut z = x3.clone();
        let mut last_removed = None;
        loop {
            let trial = with(z.clone(), hi.clone(), lo.clone());
            if !strong_envy(inst, &trial, l, w) {
                break;
            }
            let least = *inst
                .ranked_desc(w, &z)
                .last()
                .ok_or_else(|| defect("trimmed bundle became empty"))?;
            z.remove(least);
            last_removed = Some(least);
        }
        let g2 = last_removed.ok_or_else(|| defect("nothing was trimmed"))?;
        let trimmed = with(z.clone(), hi.clone(), lo.clone());
        audit.check("two_sources_winner_envies_nobody", || {
            !envies(inst, &trimmed, w, two) && !envies(inst, &trimmed, w, l)
        });
        if lo == b {
            return Ok(HandlerOutcome::new(trimmed, "trim"));
        }

        let y = with(z.clone(), b.clone(), x2.clone());
        if envies(inst, &y, l, w) {
            return Ok(HandlerOutcome::new(self.single_source(&y, two)?, "trim_then_path"));
        }
        let m = champion_graph(inst, &y, self.g_prime);
        if let Some(&c) = m.champions_of(two).iter().find(|&&c| c == two || c == l) {
            let out = apply_champion_path(inst, &y, two, c, self.g_prime)?;
            return Ok(HandlerOutcome::new(out, "trim_then_path"));
        }
        audit.check("two_sources_unique_champion_of_winner", || {
            most_envious(inst, &y, &z.with(g2)) == [l]
        });
        let upper_w = champion_cut(inst, &y, w, two, self.g_prime)?.upper;
        let upper_l = champion_cut(inst, &y, l, w, g2)?.upper;
        Ok(HandlerOutcome::new(with(upper_w, upper_l, b), "double_champion"))
    }
}
