//! Envy graphs, most-envious agents, champion graphs and champion cuts.
//!
//! All comparisons here are in the perturbed order, so every good is worth
//! strictly more than nothing to every agent and values are additive over a
//! totally ordered group. Under those two facts the most valuable `k`-subset
//! of a set is its top `k` goods, which is why `kappa` and the cuts below
//! are computed greedily instead of by subset search.

use serde_json::{json, Value as Json};

use crate::allocation::Allocation;
use crate::bundle::Bundle;
use crate::error::ContractError;
use crate::instance::Instance;
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyGraph {
    adj: Vec<Vec<bool>>,
}

impl EnvyGraph {
    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.num_vertices();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adj[i][j])
            .collect()
    }

    pub fn in_degree(&self, j: usize) -> usize {
        self.adj.iter().filter(|row| row[j]).count()
    }

    pub fn sources(&self) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&j| self.in_degree(j) == 0)
            .collect()
    }

    fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i]
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(|(j, _)| j)
    }

    /// First cycle met by depth-first search from the lowest vertex, visiting
    /// successors in increasing order. Returned as `[c0, c1, ..]` with an edge
    /// `c_k -> c_{k+1}` and a closing edge back to `c0`.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        fn visit(g: &EnvyGraph, v: usize, marks: &mut [Mark], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
            marks[v] = Mark::Open;
            stack.push(v);
            for w in g.successors(v) {
                match marks[w] {
                    Mark::Open => {
                        let start = stack.iter().position(|&u| u == w).expect("open vertex on stack");
                        return Some(stack[start..].to_vec());
                    }
                    Mark::New => {
                        if let Some(c) = visit(g, w, marks, stack) {
                            return Some(c);
                        }
                    }
                    Mark::Done => {}
                }
            }
            stack.pop();
            marks[v] = Mark::Done;
            None
        }
        let mut marks = vec![Mark::New; self.num_vertices()];
        for v in 0..self.num_vertices() {
            if marks[v] == Mark::New {
                let mut stack = Vec::new();
                if let Some(c) = visit(self, v, &mut marks, &mut stack) {
                    return Some(c);
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Shortest path `from -> .. -> to` (breadth first, low indices first).
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let n = self.num_vertices();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while let Some(p) = parent[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for w in self.successors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> Json {
        json!({
            "vertices": (1..=self.num_vertices()).collect::<Vec<_>>(),
            "edges": self.edges().iter().map(|&(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
        })
    }
}

pub fn envy_graph<V: Value>(inst: &Instance<V>, x: &Allocation) -> EnvyGraph {
    let n = x.num_agents();
    let adj = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && inst.prefers(i, &x.bundles[j], &x.bundles[i]))
                .collect()
        })
        .collect();
    EnvyGraph { adj }
}

/// A smallest-cardinality subset of `set` that `agent` values above
/// `threshold`: the top `k` goods for the least such `k`.
pub fn smallest_beating<V: Value>(
    inst: &Instance<V>,
    agent: usize,
    set: &Bundle,
    threshold: &Bundle,
) -> Option<Bundle> {
    let target = inst.value(agent, threshold);
    let mut chosen = Bundle::new();
    if inst.value(agent, &chosen) > target {
        return Some(chosen);
    }
    for g in inst.ranked_desc(agent, set) {
        chosen.insert(g);
        if inst.value(agent, &chosen) > target {
            return Some(chosen);
        }
    }
    None
}

/// Size of a smallest subset of `s` that `i` prefers to `X_i`; `None` when
/// `i` does not envy `s` at all.
pub fn kappa<V: Value>(inst: &Instance<V>, x: &Allocation, i: usize, s: &Bundle) -> Option<usize> {
    if !inst.prefers(i, s, &x.bundles[i]) {
        return None;
    }
    smallest_beating(inst, i, s, &x.bundles[i]).map(|z| z.len())
}

/// Agents minimizing `kappa` over those that envy `s`.
pub fn most_envious<V: Value>(inst: &Instance<V>, x: &Allocation, s: &Bundle) -> Vec<usize> {
    let ks: Vec<Option<usize>> = (0..x.num_agents()).map(|i| kappa(inst, x, i, s)).collect();
    let Some(best) = ks.iter().flatten().min().copied() else {
        return Vec::new();
    };
    (0..x.num_agents()).filter(|&i| ks[i] == Some(best)).collect()
}

/// Champion graph for one unallocated good.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChampionGraph {
    pub good: usize,
    champions: Vec<Vec<usize>>,
    kappas: Vec<Vec<Option<usize>>>,
}

impl ChampionGraph {
    pub fn num_vertices(&self) -> usize {
        self.champions.len()
    }

    /// `i` champions `j`.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.champions[j].contains(&i)
    }

    /// `A_X(X_j + g)`, ascending.
    pub fn champions_of(&self, j: usize) -> &[usize] {
        &self.champions[j]
    }

    /// `kappa(i, X_j + g)`.
    pub fn kappa(&self, i: usize, j: usize) -> Option<usize> {
        self.kappas[j][i]
    }

    pub fn in_degree(&self, j: usize) -> usize {
        self.champions[j].len()
    }

    pub fn self_champions(&self) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&j| self.has_edge(j, j))
            .collect()
    }

    /// Pairs `i < j` championing each other, in increasing order.
    pub fn two_cycles(&self) -> Vec<(usize, usize)> {
        let n = self.num_vertices();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j) && self.has_edge(j, i))
            .collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.num_vertices();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j))
            .collect()
    }

    pub fn to_json<V: Value>(&self, inst: &Instance<V>) -> Json {
        json!({
            "good": inst.good_id(self.good),
            "vertices": (1..=self.num_vertices()).collect::<Vec<_>>(),
            "edges": self.edges().iter().map(|&(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
            // kappa[j][i] = kappa(i, X_j + g)
            "kappa": self.kappas,
        })
    }
}

pub fn champion_graph<V: Value>(inst: &Instance<V>, x: &Allocation, g: usize) -> ChampionGraph {
    let n = x.num_agents();
    let mut champions = Vec::with_capacity(n);
    let mut kappas = Vec::with_capacity(n);
    for j in 0..n {
        let s = x.bundles[j].with(g);
        let ks: Vec<Option<usize>> = (0..n).map(|i| kappa(inst, x, i, &s)).collect();
        let best = ks.iter().flatten().min().copied();
        champions.push((0..n).filter(|&i| best.is_some() && ks[i] == best).collect());
        kappas.push(ks);
    }
    ChampionGraph {
        good: g,
        champions,
        kappas,
    }
}

/// Split of `X_j + g` for a champion `i` of `j`: `upper` is the smallest top
/// part `i` still prefers to `X_i`, `lower` the removable rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChampionCut {
    pub champion: usize,
    pub owner: usize,
    pub good: usize,
    pub lower: Bundle,
    pub upper: Bundle,
}

impl ChampionCut {
    pub fn to_json<V: Value>(&self, inst: &Instance<V>) -> Json {
        let ids = |b: &Bundle| b.iter().map(|g| inst.good_id(g).to_string()).collect::<Vec<_>>();
        json!({
            "champion": self.champion + 1,
            "owner": self.owner + 1,
            "good": inst.good_id(self.good),
            "lower": ids(&self.lower),
            "upper": ids(&self.upper),
        })
    }
}

pub fn champion_cut<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    i: usize,
    j: usize,
    g: usize,
) -> Result<ChampionCut, ContractError> {
    let s = x.bundles[j].with(g);
    if !most_envious(inst, x, &s).contains(&i) {
        return Err(ContractError::new(format!(
            "agent {} does not champion agent {} for good {}",
            i + 1,
            j + 1,
            inst.good_id(g)
        )));
    }
    let upper = smallest_beating(inst, i, &s, &x.bundles[i])
        .expect("a champion envies the extended bundle");
    Ok(ChampionCut {
        champion: i,
        owner: j,
        good: g,
        lower: s.minus(&upper),
        upper,
    })
}

/// Rotates bundles along envy cycles until the envy graph is acyclic. Each
/// agent on a cycle takes the bundle of the agent it envies, so everybody on
/// the cycle strictly improves and nobody else changes.
pub fn eliminate_envy_cycles<V: Value>(inst: &Instance<V>, x: &Allocation) -> Allocation {
    let mut y = x.clone();
    while let Some(cycle) = envy_graph(inst, &y).find_cycle() {
        y = rotate(&y, &cycle);
    }
    y
}

/// `Y_{c_k} = X_{c_{k+1}}` around the cycle.
pub(crate) fn rotate(x: &Allocation, cycle: &[usize]) -> Allocation {
    let mut y = x.clone();
    for (k, &agent) in cycle.iter().enumerate() {
        let next = cycle[(k + 1) % cycle.len()];
        y.bundles[agent] = x.bundles[next].clone();
    }
    y
}
