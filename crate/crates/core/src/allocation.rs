//! Allocations, envy predicates, fairness criteria and dominance orders.
//!
//! Predicates without a suffix use the perturbed order (what the solver
//! reasons in); the `_in` variants take an explicit [`Order`].

use std::cmp::Ordering;

use serde_json::{json, Value as Json};

use crate::bundle::Bundle;
use crate::error::FormatError;
use crate::instance::{Instance, Order, PerturbedValue};
use crate::value::Value;

/// One bundle per agent plus the unallocated pool.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
    pub pool: Bundle,
}

impl Allocation {
    /// Every good in the pool.
    pub fn empty<V: Value>(inst: &Instance<V>) -> Self {
        Allocation {
            bundles: vec![Bundle::new(); inst.num_agents()],
            pool: inst.all_goods(),
        }
    }

    /// Bundles as given; the pool is every good not in a bundle.
    pub fn with_complement_pool<V: Value>(inst: &Instance<V>, bundles: Vec<Bundle>) -> Self {
        let held = bundles.iter().fold(Bundle::new(), |acc, b| acc.union(b));
        Allocation {
            pool: inst.all_goods().minus(&held),
            bundles,
        }
    }

    pub fn new<V: Value>(
        inst: &Instance<V>,
        bundles: Vec<Bundle>,
        pool: Option<Bundle>,
    ) -> Result<Self, FormatError> {
        let alloc = match pool {
            Some(pool) => Allocation { bundles, pool },
            None => Self::with_complement_pool(inst, bundles),
        };
        alloc.validate(inst)?;
        Ok(alloc)
    }

    pub fn from_ids<V: Value>(
        inst: &Instance<V>,
        bundles: &[&[&str]],
        pool: Option<&[&str]>,
    ) -> Result<Self, FormatError> {
        let bundles = bundles
            .iter()
            .map(|ids| checked_bundle(inst, ids.iter().copied()))
            .collect::<Result<Vec<_>, _>>()?;
        let pool = pool
            .map(|ids| checked_bundle(inst, ids.iter().copied()))
            .transpose()?;
        Self::new(inst, bundles, pool)
    }

    pub fn validate<V: Value>(&self, inst: &Instance<V>) -> Result<(), FormatError> {
        if self.bundles.len() != inst.num_agents() {
            return Err(FormatError::BundleCount {
                expected: inst.num_agents(),
                found: self.bundles.len(),
            });
        }
        let mut seen = Bundle::new();
        for b in self.bundles.iter().chain(std::iter::once(&self.pool)) {
            for g in b.iter() {
                if g >= inst.num_goods() {
                    return Err(FormatError::UnknownGood(format!("#{g}")));
                }
                if !seen.insert(g) {
                    return Err(FormatError::OverlappingBundles(inst.good_id(g).to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn is_complete(&self) -> bool {
        self.pool.is_empty()
    }

    pub fn allocated(&self) -> Bundle {
        self.bundles.iter().fold(Bundle::new(), |acc, b| acc.union(b))
    }

    /// Agent per good (`None` for pooled goods), indexed by good position.
    pub fn assignment(&self, num_goods: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; num_goods];
        for (i, b) in self.bundles.iter().enumerate() {
            for g in b.iter() {
                owner[g] = Some(i);
            }
        }
        owner
    }

    pub fn to_json<V: Value>(&self, inst: &Instance<V>) -> Json {
        let ids = |b: &Bundle| b.iter().map(|g| inst.good_id(g).to_string()).collect::<Vec<_>>();
        json!({
            "bundles": self.bundles.iter().map(ids).collect::<Vec<_>>(),
            "pool": ids(&self.pool),
        })
    }

    pub fn from_json<V: Value>(inst: &Instance<V>, doc: &Json) -> Result<Self, FormatError> {
        let ids = |v: &Json| -> Result<Bundle, FormatError> {
            let arr = v.as_array().ok_or(FormatError::Field("bundles"))?;
            let names = arr
                .iter()
                .map(|g| g.as_str().ok_or(FormatError::Field("bundles")))
                .collect::<Result<Vec<_>, _>>()?;
            checked_bundle(inst, names.into_iter())
        };
        let bundles = doc
            .get("bundles")
            .and_then(Json::as_array)
            .ok_or(FormatError::Field("bundles"))?
            .iter()
            .map(ids)
            .collect::<Result<Vec<_>, _>>()?;
        let pool = match doc.get("pool") {
            None | Some(Json::Null) => None,
            Some(p) => Some(ids(p).map_err(|e| match e {
                FormatError::Field(_) => FormatError::Field("pool"),
                other => other,
            })?),
        };
        Self::new(inst, bundles, pool)
    }

    pub fn parse<V: Value>(inst: &Instance<V>, text: &str) -> Result<Self, FormatError> {
        let doc: Json = serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
        Self::from_json(inst, &doc)
    }

    pub fn serialize<V: Value>(&self, inst: &Instance<V>) -> String {
        serde_json::to_string(&self.to_json(inst)).expect("JSON values always serialize")
    }
}

/// Rejects unknown ids and ids repeated within one list.
fn checked_bundle<'a, V: Value>(
    inst: &Instance<V>,
    ids: impl Iterator<Item = &'a str>,
) -> Result<Bundle, FormatError> {
    let mut b = Bundle::new();
    for id in ids {
        if !b.insert(inst.good_index(id)?) {
            return Err(FormatError::OverlappingBundles(id.to_string()));
        }
    }
    Ok(b)
}

/// `i` envies `j`: `X_j >_i X_i`.
pub fn envies<V: Value>(inst: &Instance<V>, x: &Allocation, i: usize, j: usize) -> bool {
    envies_in(Order::Perturbed, inst, x, i, j)
}

pub fn envies_in<V: Value>(
    order: Order,
    inst: &Instance<V>,
    x: &Allocation,
    i: usize,
    j: usize,
) -> bool {
    i != j && inst.prefers_in(order, i, &x.bundles[j], &x.bundles[i])
}

/// The lowest-index good `g` of `X_j` with `X_j \ g >_i X_i`, if any.
pub fn strong_envy_witness<V: Value>(
    order: Order,
    inst: &Instance<V>,
    x: &Allocation,
    i: usize,
    j: usize,
) -> Option<usize> {
    if i == j {
        return None;
    }
    let (own, other) = (&x.bundles[i], &x.bundles[j]);
    other
        .iter()
        .find(|&g| inst.prefers_in(order, i, &other.without(g), own))
}

pub fn strong_envy<V: Value>(inst: &Instance<V>, x: &Allocation, i: usize, j: usize) -> bool {
    strong_envy_in(Order::Perturbed, inst, x, i, j)
}

pub fn strong_envy_in<V: Value>(
    order: Order,
    inst: &Instance<V>,
    x: &Allocation,
    i: usize,
    j: usize,
) -> bool {
    strong_envy_witness(order, inst, x, i, j).is_some()
}

pub fn weak_envy<V: Value>(inst: &Instance<V>, x: &Allocation, i: usize, j: usize) -> bool {
    weak_envy_in(Order::Perturbed, inst, x, i, j)
}

pub fn weak_envy_in<V: Value>(
    order: Order,
    inst: &Instance<V>,
    x: &Allocation,
    i: usize,
    j: usize,
) -> bool {
    envies_in(order, inst, x, i, j) && !strong_envy_in(order, inst, x, i, j)
}

fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Every `(i, j, g)` with `X_j \ g >_i X_i`.
pub fn strong_envy_witnesses<V: Value>(
    order: Order,
    inst: &Instance<V>,
    x: &Allocation,
) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (i, j) in ordered_pairs(x.num_agents()) {
        let (own, other) = (&x.bundles[i], &x.bundles[j]);
        for g in other.iter() {
            if inst.prefers_in(order, i, &other.without(g), own) {
                out.push((i, j, g));
            }
        }
    }
    out
}

pub fn is_efx<V: Value>(inst: &Instance<V>, x: &Allocation) -> bool {
    is_efx_in(Order::Perturbed, inst, x)
}

pub fn is_efx_in<V: Value>(order: Order, inst: &Instance<V>, x: &Allocation) -> bool {
    ordered_pairs(x.num_agents()).all(|(i, j)| !strong_envy_in(order, inst, x, i, j))
}

pub fn is_ef1<V: Value>(inst: &Instance<V>, x: &Allocation) -> bool {
    is_ef1_in(Order::Perturbed, inst, x)
}

pub fn is_ef1_in<V: Value>(order: Order, inst: &Instance<V>, x: &Allocation) -> bool {
    ordered_pairs(x.num_agents()).all(|(i, j)| {
        let (own, other) = (&x.bundles[i], &x.bundles[j]);
        !inst.prefers_in(order, i, other, own)
            || other
                .iter()
                .any(|g| !inst.prefers_in(order, i, &other.without(g), own))
    })
}

pub fn is_envy_free<V: Value>(inst: &Instance<V>, x: &Allocation) -> bool {
    is_envy_free_in(Order::Perturbed, inst, x)
}

pub fn is_envy_free_in<V: Value>(order: Order, inst: &Instance<V>, x: &Allocation) -> bool {
    ordered_pairs(x.num_agents()).all(|(i, j)| !envies_in(order, inst, x, i, j))
}

/// Product of the agents' true (unperturbed) bundle values: the n-th power
/// of Nash welfare.
pub fn nash_product<V: Value>(inst: &Instance<V>, x: &Allocation) -> V {
    x.bundles
        .iter()
        .enumerate()
        .fold(V::one(), |acc, (i, b)| acc * inst.base(i, b))
}

pub fn pareto_dominates<V: Value>(inst: &Instance<V>, y: &Allocation, x: &Allocation) -> bool {
    pareto_dominates_in(Order::Perturbed, inst, y, x)
}

/// Nobody worse off in `y`, somebody strictly better.
pub fn pareto_dominates_in<V: Value>(
    order: Order,
    inst: &Instance<V>,
    y: &Allocation,
    x: &Allocation,
) -> bool {
    let mut strict = false;
    for i in 0..x.num_agents() {
        match inst.compare_in(order, i, &y.bundles[i], &x.bundles[i]) {
            Ordering::Less => return false,
            Ordering::Greater => strict = true,
            Ordering::Equal => {}
        }
    }
    strict
}

/// The agent ordering `(a, b, c)` of the potential; fixed for a whole solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiOrder(Vec<usize>);

impl PhiOrder {
    pub fn new(agent_order: Vec<usize>) -> Option<Self> {
        let mut sorted = agent_order.clone();
        sorted.sort_unstable();
        (sorted == (0..agent_order.len()).collect::<Vec<_>>()).then_some(PhiOrder(agent_order))
    }

    pub fn identity(n: usize) -> Self {
        PhiOrder((0..n).collect())
    }

    pub fn agents(&self) -> &[usize] {
        &self.0
    }

    /// The agent whose value is compared first.
    pub fn leader(&self) -> usize {
        self.0[0]
    }
}

/// Potential vector `(v_a(X_a), v_b(X_b), ...)` in the perturbed order.
pub fn phi<V: Value>(
    inst: &Instance<V>,
    order: &PhiOrder,
    x: &Allocation,
) -> Vec<PerturbedValue<V>> {
    order
        .agents()
        .iter()
        .map(|&i| inst.value(i, &x.bundles[i]))
        .collect()
}

pub fn lex_dominates<V: Value>(
    inst: &Instance<V>,
    order: &PhiOrder,
    y: &Allocation,
    x: &Allocation,
) -> bool {
    for &i in order.agents() {
        match inst.compare(i, &y.bundles[i], &x.bundles[i]) {
            Ordering::Greater => return true,
            Ordering::Less => return false,
            Ordering::Equal => {}
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::value::int;

    fn intro_alloc(a: &[&str], b: &[&str]) -> Allocation {
        let inst = fixtures::intro();
        Allocation::from_ids(&inst, &[a, b], None).unwrap()
    }

    #[test]
    fn intro_ef1_but_not_efx() {
        let inst = fixtures::intro();
        let x = intro_alloc(&["g1"], &["g2", "g3"]);
        assert!(strong_envy(&inst, &x, 0, 1));
        assert_eq!(strong_envy_witness(Order::Base, &inst, &x, 0, 1), Some(1));
        // the perturbed order breaks the g1/g2 tie, so EF1 only holds on base values
        assert!(!is_ef1(&inst, &x));
        assert!(!is_efx(&inst, &x));
        assert!(is_ef1_in(Order::Base, &inst, &x));
        assert!(!is_efx_in(Order::Base, &inst, &x));
    }

    #[test]
    fn intro_efx_allocation() {
        let inst = fixtures::intro();
        let x = intro_alloc(&["g3"], &["g1", "g2"]);
        assert!(!strong_envy(&inst, &x, 0, 1));
        assert!(!strong_envy(&inst, &x, 1, 0));
        assert!(is_efx_in(Order::Base, &inst, &x));
    }

    #[test]
    fn singleton_never_strongly_envied_by_empty_owner() {
        let inst = fixtures::intro();
        let x = intro_alloc(&[], &["g3"]);
        assert!(!strong_envy(&inst, &x, 0, 1));
        assert!(weak_envy(&inst, &x, 0, 1));
    }

    #[test]
    fn empty_allocation_is_efx() {
        let inst = fixtures::table1();
        let x = Allocation::empty(&inst);
        assert!(is_efx(&inst, &x));
        assert!(is_envy_free(&inst, &x));
        assert_eq!(nash_product(&inst, &x), int(0));
    }

    #[test]
    fn table1_partial_allocation() {
        let inst = fixtures::table1();
        let x = fixtures::partial_x(&inst);
        assert!(is_efx(&inst, &x));
        assert!(is_efx_in(Order::Base, &inst, &x));
        assert_eq!(nash_product(&inst, &x), int(2400));
        assert!(!x.is_complete());
    }

    #[test]
    fn dominance_orders() {
        let inst = fixtures::table1();
        let x = fixtures::partial_x(&inst);
        assert!(!pareto_dominates(&inst, &x, &x));
        let order = PhiOrder::identity(3);
        assert!(!lex_dominates(&inst, &order, &x, &x));

        // only agent 3 improves
        let mut y = x.clone();
        y.bundles[2].insert(6);
        assert!(lex_dominates(&inst, &order, &y, &x));
        assert!(pareto_dominates(&inst, &y, &x));

        // agent 1 improves, agent 2 loses g5
        let mut z = x.clone();
        z.bundles[0].insert(6);
        z.bundles[1].remove(4);
        assert!(lex_dominates(&inst, &order, &z, &x));
        assert!(!pareto_dominates(&inst, &z, &x));
        assert!(!lex_dominates(&inst, &order, &x, &z));
    }

    #[test]
    fn phi_order_validation() {
        assert!(PhiOrder::new(vec![2, 0, 1]).is_some());
        assert!(PhiOrder::new(vec![0, 0, 1]).is_none());
    }

    #[test]
    fn allocation_json() {
        let inst = fixtures::table1();
        let x = fixtures::partial_x(&inst);
        let back = Allocation::parse(&inst, &x.serialize(&inst)).unwrap();
        assert_eq!(back, x);

        let twice = r#"{"bundles": [["g1","g1"],[],[]]}"#;
        assert_eq!(
            Allocation::parse(&inst, twice),
            Err(FormatError::OverlappingBundles("g1".into()))
        );
        let across = r#"{"bundles": [["g1"],["g1"],[]]}"#;
        assert!(matches!(
            Allocation::parse(&inst, across),
            Err(FormatError::OverlappingBundles(_))
        ));
        let unknown = r#"{"bundles": [["zz"],[],[]]}"#;
        assert_eq!(
            Allocation::parse(&inst, unknown),
            Err(FormatError::UnknownGood("zz".into()))
        );
        let no_pool = r#"{"bundles": [["g2","g3","g4"],["g1","g5"],["g6"]]}"#;
        assert_eq!(Allocation::parse(&inst, no_pool).unwrap(), x);
    }
}
