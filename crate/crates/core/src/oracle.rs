//! Exhaustive ground truth for small instances.
//!
//! Every complete allocation is visited: good 1 is the most significant digit
//! of the assignment code and agents are tried in increasing order, so
//! "enumeration order" is increasing code order. All comparisons use base
//! values with ties allowed. Bundle values are replaced by per-agent ranks
//! (equal values share a rank) so the inner loop compares integers.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::allocation::{is_efx, lex_dominates, Allocation, PhiOrder};
use crate::bundle::Bundle;
use crate::instance::Instance;
use crate::solver::{solve_with, SolveOptions};
use crate::value::Value;

pub const DEFAULT_MAX_GOODS: usize = 16;
/// Rank tables hold `2^m` entries per agent; beyond this they stop fitting.
pub const HARD_MAX_GOODS: usize = 20;
pub const MAX_GOODS_ENV: &str = "EFX_MAX_GOODS";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {goods} goods, above the oracle limit of {limit}; raise it with --max-goods or {MAX_GOODS_ENV}")]
    TooManyGoods { goods: usize, limit: usize },
    #[error("a limit of {0} goods exceeds the hard cap of {HARD_MAX_GOODS}")]
    LimitTooHigh(usize),
    #[error("{MAX_GOODS_ENV} must be a non-negative integer, got `{0}`")]
    BadEnv(String),
    #[error("query allocation does not match the instance")]
    BadQuery,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub max_goods: usize,
    /// Keep every EFX allocation in the report.
    pub list: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_goods: DEFAULT_MAX_GOODS,
            list: false,
        }
    }
}

impl OracleOptions {
    /// Default options with the guard taken from `EFX_MAX_GOODS` if set.
    pub fn from_env() -> Result<Self, OracleError> {
        let mut opts = Self::default();
        if let Ok(raw) = std::env::var(MAX_GOODS_ENV) {
            opts.max_goods = raw.trim().parse().map_err(|_| OracleError::BadEnv(raw.clone()))?;
        }
        Ok(opts)
    }

    fn check<V: Value>(&self, inst: &Instance<V>) -> Result<(), OracleError> {
        if self.max_goods > HARD_MAX_GOODS {
            return Err(OracleError::LimitTooHigh(self.max_goods));
        }
        if inst.num_goods() > self.max_goods {
            return Err(OracleError::TooManyGoods {
                goods: inst.num_goods(),
                limit: self.max_goods,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationReport<V> {
    pub agents: usize,
    pub goods: usize,
    /// `n^m`.
    pub total: u128,
    pub efx_count: u64,
    /// Assignment codes of the EFX allocations, ascending; kept on request.
    pub efx_codes: Option<Vec<u64>>,
    /// Largest Nash product over EFX allocations, first witness.
    pub max_nash: Option<(V, Allocation)>,
    /// Present when a dominance query was given: the query and the first
    /// EFX allocation Pareto dominating it, if any.
    pub dominance: Option<(Allocation, Option<Allocation>)>,
}

impl<V: Value> EnumerationReport<V> {
    pub fn contains(&self, x: &Allocation) -> Option<bool> {
        let codes = self.efx_codes.as_ref()?;
        let code = assignment_code(x, self.goods)?;
        Some(codes.binary_search(&code).is_ok())
    }

    pub fn efx_allocations<'a>(&'a self, inst: &'a Instance<V>) -> impl Iterator<Item = Allocation> + 'a {
        self.efx_codes
            .iter()
            .flatten()
            .map(move |&c| decode(inst, c))
    }

    pub fn to_json(&self, inst: &Instance<V>) -> Json {
        let mut doc = json!({
            "agents": self.agents,
            "goods": self.goods,
            "total": self.total.to_string(),
            "efx_count": self.efx_count,
            "max_nash": self.max_nash.as_ref().map(|(v, w)| json!({
                "product": v.to_json(),
                "witness": w.to_json(inst),
            })),
        });
        if let Some((query, witness)) = &self.dominance {
            doc["dominance"] = json!({
                "query": query.to_json(inst),
                "dominator": witness.as_ref().map(|w| w.to_json(inst)),
            });
        }
        if self.efx_codes.is_some() {
            doc["efx_allocations"] = self.efx_allocations(inst).map(|x| x.to_json(inst)).collect();
        }
        doc
    }
}

/// Code of a complete allocation; `None` if some good is unallocated.
pub fn assignment_code(x: &Allocation, goods: usize) -> Option<u64> {
    let n = x.num_agents() as u64;
    let owner = x.assignment(goods);
    owner
        .iter()
        .try_fold(0u64, |code, o| o.map(|a| code * n + a as u64))
}

pub fn decode<V: Value>(inst: &Instance<V>, mut code: u64) -> Allocation {
    let n = inst.num_agents() as u64;
    let mut bundles = vec![Bundle::new(); inst.num_agents()];
    for g in (0..inst.num_goods()).rev() {
        bundles[(code % n) as usize].insert(g);
        code /= n;
    }
    Allocation::with_complement_pool(inst, bundles)
}

/// Dense ranks of all `2^m` subsets for one agent, by base value.
fn rank_table<V: Value>(inst: &Instance<V>, agent: usize) -> Vec<u32> {
    let m = inst.num_goods();
    let mut values: Vec<V> = Vec::with_capacity(1 << m);
    values.push(V::zero());
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        let v = values[mask & (mask - 1)].clone() + inst.good_value(agent, low).clone();
        values.push(v);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].cmp(&values[b]));
    let mut ranks = vec![0u32; values.len()];
    let mut rank = 0u32;
    for k in 0..order.len() {
        if k > 0 && values[order[k]] != values[order[k - 1]] {
            rank += 1;
        }
        ranks[order[k]] = rank;
    }
    ranks
}

struct Tables {
    ranks: Vec<Vec<u32>>,
}

impl Tables {
    fn is_efx(&self, masks: &[u64]) -> bool {
        let n = masks.len();
        for i in 0..n {
            let own = self.ranks[i][masks[i] as usize];
            for (j, &other) in masks.iter().enumerate() {
                if i == j || self.ranks[i][other as usize] <= own {
                    continue;
                }
                let mut rest = other;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    if self.ranks[i][(other ^ bit) as usize] > own {
                        return false;
                    }
                    rest ^= bit;
                }
            }
        }
        true
    }

    /// Base-order Pareto dominance of `y` over `x`.
    fn dominates(&self, y: &[u64], x: &[u64]) -> bool {
        let mut strict = false;
        for i in 0..y.len() {
            match self.ranks[i][y[i] as usize].cmp(&self.ranks[i][x[i] as usize]) {
                Ordering::Less => return false,
                Ordering::Greater => strict = true,
                Ordering::Equal => {}
            }
        }
        strict
    }
}

/// Per-partition accumulator; merged in partition order.
struct Partial<V> {
    efx_count: u64,
    codes: Vec<u64>,
    best: Option<(V, u64)>,
    dominator: Option<u64>,
}

struct Scan<'a, V> {
    inst: &'a Instance<V>,
    tables: &'a Tables,
    keep_codes: bool,
    query: Option<&'a [u64]>,
}

impl<V: Value> Scan<'_, V> {
    fn nash(&self, masks: &[u64]) -> V {
        masks.iter().enumerate().fold(V::one(), |acc, (i, &mask)| {
            acc * self.inst.base(i, &Bundle::from_mask(mask))
        })
    }

    fn leaf(&self, masks: &[u64], code: u64, acc: &mut Partial<V>) {
        if !self.tables.is_efx(masks) {
            return;
        }
        acc.efx_count += 1;
        if self.keep_codes {
            acc.codes.push(code);
        }
        let p = self.nash(masks);
        if acc.best.as_ref().is_none_or(|(b, _)| p > *b) {
            acc.best = Some((p, code));
        }
        if let Some(q) = self.query {
            if acc.dominator.is_none() && self.tables.dominates(masks, q) {
                acc.dominator = Some(code);
            }
        }
    }

    fn walk(&self, g: usize, masks: &mut [u64], code: u64, acc: &mut Partial<V>) {
        let m = self.inst.num_goods();
        if g == m {
            self.leaf(masks, code, acc);
            return;
        }
        let n = masks.len() as u64;
        for a in 0..masks.len() {
            masks[a] |= 1 << g;
            self.walk(g + 1, masks, code * n + a as u64, acc);
            masks[a] &= !(1 << g);
        }
    }
}

fn query_masks<V: Value>(inst: &Instance<V>, x: &Allocation) -> Result<Vec<u64>, OracleError> {
    x.validate(inst).map_err(|_| OracleError::BadQuery)?;
    Ok(x.bundles.iter().map(Bundle::mask).collect())
}

fn scan<V: Value>(
    inst: &Instance<V>,
    opts: &OracleOptions,
    keep_codes: bool,
    query: Option<&Allocation>,
) -> Result<EnumerationReport<V>, OracleError> {
    opts.check(inst)?;
    let n = inst.num_agents();
    let m = inst.num_goods();
    let tables = Tables {
        ranks: (0..n).map(|i| rank_table(inst, i)).collect(),
    };
    let q = query.map(|x| query_masks(inst, x)).transpose()?;
    let scan = Scan {
        inst,
        tables: &tables,
        keep_codes,
        query: q.as_deref(),
    };

    // partition on the first half of the goods
    let split = m.div_ceil(2);
    let prefixes = (n as u64).pow(split as u32);
    let partials: Vec<Partial<V>> = (0..prefixes)
        .into_par_iter()
        .map(|prefix| {
            let mut masks = vec![0u64; n];
            let mut rest = prefix;
            for g in (0..split).rev() {
                masks[(rest % n as u64) as usize] |= 1 << g;
                rest /= n as u64;
            }
            let mut acc = Partial {
                efx_count: 0,
                codes: Vec::new(),
                best: None,
                dominator: None,
            };
            scan.walk(split, &mut masks, prefix, &mut acc);
            acc
        })
        .collect();

    let mut efx_count = 0;
    let mut codes = keep_codes.then(Vec::new);
    let mut best: Option<(V, u64)> = None;
    let mut dominator = None;
    for p in partials {
        efx_count += p.efx_count;
        if let Some(c) = codes.as_mut() {
            c.extend(p.codes);
        }
        if let Some((v, code)) = p.best {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, code));
            }
        }
        dominator = dominator.or(p.dominator);
    }

    Ok(EnumerationReport {
        agents: n,
        goods: m,
        total: (n as u128).pow(m as u32),
        efx_count,
        efx_codes: codes,
        max_nash: best.map(|(v, code)| (v, decode(inst, code))),
        dominance: query.map(|x| (x.clone(), dominator.map(|c| decode(inst, c)))),
    })
}

pub fn enumerate_efx<V: Value>(
    inst: &Instance<V>,
    opts: &OracleOptions,
) -> Result<EnumerationReport<V>, OracleError> {
    scan(inst, opts, opts.list, None)
}

/// Full scan with the EFX set kept and a dominance query answered.
pub fn enumerate_with_query<V: Value>(
    inst: &Instance<V>,
    opts: &OracleOptions,
    query: &Allocation,
) -> Result<EnumerationReport<V>, OracleError> {
    scan(inst, opts, opts.list, Some(query))
}

/// First complete EFX allocation (base values) Pareto dominating `x`.
pub fn exists_pareto_dominator<V: Value>(
    inst: &Instance<V>,
    x: &Allocation,
    opts: &OracleOptions,
) -> Result<Option<Allocation>, OracleError> {
    let report = scan(inst, opts, false, Some(x))?;
    Ok(report.dominance.and_then(|(_, w)| w))
}

pub fn max_nash_efx<V: Value>(
    inst: &Instance<V>,
    opts: &OracleOptions,
) -> Result<Option<(V, Allocation)>, OracleError> {
    Ok(scan(inst, opts, false, None)?.max_nash)
}

/// Outcome of running the solver against the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certification {
    pub steps: usize,
    pub failures: Vec<String>,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Solves with auditing on and checks: complete, in the oracle's EFX set,
/// EFX in the perturbed order, every step strictly raises the potential and
/// keeps EFX, and no audited check failed.
pub fn certify_solver<V: Value>(
    inst: &Instance<V>,
    opts: &OracleOptions,
) -> Result<Certification, OracleError> {
    opts.check(inst)?;
    let solve_opts = SolveOptions {
        instrumented: true,
        ..Default::default()
    };
    let sol = match solve_with(inst, &solve_opts) {
        Ok(s) => s,
        Err(e) => {
            return Ok(Certification {
                steps: 0,
                failures: vec![format!("solver error: {e}")],
            })
        }
    };
    let report = scan(inst, opts, true, None)?;
    let mut failures = Vec::new();
    let x = &sol.allocation;
    if !x.is_complete() {
        failures.push("allocation is not complete".to_string());
    } else if report.contains(x) != Some(true) {
        failures.push("allocation is not in the oracle's EFX set".to_string());
    }
    if !is_efx(inst, x) {
        failures.push("allocation is not EFX in the perturbed order".to_string());
    }
    let order = PhiOrder::identity(inst.num_agents());
    let mut prev = Allocation::empty(inst);
    for rec in &sol.trace {
        if !lex_dominates(inst, &order, &rec.allocation_after, &prev) || rec.phi_after <= rec.phi_before {
            failures.push(format!("step {} does not raise the potential", rec.iteration));
        }
        if !is_efx(inst, &rec.allocation_after) {
            failures.push(format!("step {} is not EFX", rec.iteration));
        }
        prev = rec.allocation_after.clone();
    }
    failures.extend(sol.audit.violations().iter().map(|v| format!("audit: {v}")));
    Ok(Certification {
        steps: sol.trace.len(),
        failures,
    })
}
