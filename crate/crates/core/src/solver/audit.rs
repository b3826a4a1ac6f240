//! Optional runtime verification of the structural facts the solver relies on.
//!
//! When enabled, each named check counts how often its hypotheses fired and
//! records any violation. A violation aborts the solve as a defect.

use std::collections::BTreeMap;

use crate::allocation::Allocation;
use crate::graphs::{champion_cut, ChampionGraph};
use crate::instance::Instance;
use crate::value::Value;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Audit {
    enabled: bool,
    fired: BTreeMap<&'static str, usize>,
    violations: Vec<String>,
}

impl Audit {
    pub fn new(enabled: bool) -> Self {
        Audit {
            enabled,
            ..Default::default()
        }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    /// Evaluates `holds` only when auditing is on.
    pub fn check(&mut self, name: &'static str, holds: impl FnOnce() -> bool) {
        if !self.enabled {
            return;
        }
        *self.fired.entry(name).or_default() += 1;
        if !holds() {
            self.violations.push(name.to_string());
        }
    }

    pub fn fired(&self) -> &BTreeMap<&'static str, usize> {
        &self.fired
    }

    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    pub fn merge(&mut self, other: &Audit) {
        for (k, v) in &other.fired {
            *self.fired.entry(k).or_default() += v;
        }
        self.violations.extend(other.violations.iter().cloned());
    }
}

/// Facts about champion cuts, checked for every champion edge of `m`.
pub(crate) fn champion_structure<V: Value>(
    audit: &mut Audit,
    inst: &Instance<V>,
    x: &Allocation,
    m: &ChampionGraph,
) {
    if !audit.enabled() {
        return;
    }
    let n = x.num_agents();
    let g = m.good;
    let gb = crate::bundle::Bundle::singleton(g);
    for j in 0..n {
        audit.check("champion_graph_in_degree", || m.in_degree(j) >= 1);
    }
    let mut cuts = Vec::new();
    for (i, j) in m.edges() {
        let cut = match champion_cut(inst, x, i, j, g) {
            Ok(c) => c,
            Err(_) => {
                audit.check("champion_cut_exists", || false);
                continue;
            }
        };
        audit.check("cut_size_equals_kappa", || Some(cut.upper.len()) == m.kappa(i, j));
        audit.check("cut_upper_beats_champion", || {
            inst.prefers(i, &cut.upper, &x.bundles[i])
        });
        for k in 0..n {
            audit.check("obs_upper_minus_any_not_envied", || {
                cut.upper
                    .iter()
                    .all(|h| !inst.prefers(k, &cut.upper.without(h), &x.bundles[k]))
            });
            if !m.has_edge(k, j) {
                audit.check("obs_non_champion_does_not_envy_upper", || {
                    !inst.prefers(k, &cut.upper, &x.bundles[k])
                });
            }
        }
        if !inst.prefers(i, &x.bundles[j], &x.bundles[i]) {
            audit.check("obs_lower_half_below_good", || {
                !cut.lower.contains(g)
                    && cut.lower.is_subset(&x.bundles[j])
                    && inst.prefers(i, &gb, &cut.lower)
            });
        }
        if !m.has_edge(j, j) {
            audit.check("obs_lower_half_nonempty", || {
                !cut.lower.is_empty() && !inst.prefers(j, &gb, &cut.lower)
            });
        }
        cuts.push(cut);
    }
    // i champions j, i' champions k, neither envies the bundle it champions,
    // and i does not champion k.
    for c1 in &cuts {
        for c2 in &cuts {
            let (i, j) = (c1.champion, c1.owner);
            let (i2, k) = (c2.champion, c2.owner);
            if j == k || m.has_edge(i, k) {
                continue;
            }
            if inst.prefers(i, &x.bundles[j], &x.bundles[i])
                || inst.prefers(i2, &x.bundles[k], &x.bundles[i2])
            {
                continue;
            }
            audit.check("obs_upper_half_order", || {
                inst.prefers(
                    i,
                    &x.bundles[j].minus(&c1.lower),
                    &x.bundles[k].minus(&c2.lower),
                )
            });
        }
    }
}
