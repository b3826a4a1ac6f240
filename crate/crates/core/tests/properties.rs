//! Randomized properties of the value order, the fairness predicates and the
//! small combinatorial helpers, checked against naive re-implementations.

use std::cmp::Ordering;

use efx_core::allocation::{
    is_ef1_in, is_efx_in, is_envy_free_in, pareto_dominates_in, Allocation,
};
use efx_core::bundle::Bundle;
use efx_core::graphs::{champion_cut, champion_graph, eliminate_envy_cycles, envy_graph, smallest_beating};
use efx_core::instance::{Instance, Order};
use efx_core::oracle::{enumerate_efx, exists_pareto_dominator, OracleOptions};
use efx_core::value::{int, rational};
use efx_core::{EpsPoly, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn instance(agents: usize, max_goods: usize, max_value: i64) -> impl Strategy<Value = Instance<Rational>> {
    (1..=max_goods).prop_flat_map(move |m| {
        proptest::collection::vec(proptest::collection::vec(0..=max_value, m), agents).prop_map(|rows| {
            Instance::from_rows(rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect()).unwrap()
        })
    })
}

/// Instance plus an owner per good (`agents` means pooled).
fn with_owners(agents: usize, max_goods: usize, max_value: i64) -> impl Strategy<Value = (Instance<Rational>, Allocation)> {
    instance(agents, max_goods, max_value).prop_flat_map(move |inst| {
        let m = inst.num_goods();
        proptest::collection::vec(0..=agents, m).prop_map(move |owners| {
            let x = from_owners(&inst, agents, &owners);
            (inst.clone(), x)
        })
    })
}

fn from_owners(inst: &Instance<Rational>, agents: usize, owners: &[usize]) -> Allocation {
    let mut bundles = vec![Bundle::new(); agents];
    for (g, &o) in owners.iter().enumerate() {
        if o < agents {
            bundles[o].insert(g);
        }
    }
    Allocation::with_complement_pool(inst, bundles)
}

fn subset(mask: u32, m: usize) -> Bundle {
    let mut b = Bundle::new();
    for g in 0..m {
        if mask >> g & 1 == 1 {
            b.insert(g);
        }
    }
    b
}

fn naive_base(inst: &Instance<Rational>, i: usize, b: &Bundle) -> Rational {
    b.iter().fold(Rational::zero(), |acc, g| acc + inst.good_value(i, g))
}

/// Naive perturbed comparison: base value, then the bundle holding the
/// highest good of the symmetric difference wins.
fn naive_cmp(inst: &Instance<Rational>, i: usize, s: &Bundle, t: &Bundle) -> Ordering {
    naive_base(inst, i, s).cmp(&naive_base(inst, i, t)).then_with(|| {
        let top = (0..inst.num_goods()).rev().find(|&g| s.contains(g) != t.contains(g));
        match top {
            None => Ordering::Equal,
            Some(g) if s.contains(g) => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    })
}

fn naive_cmp_in(order: Order, inst: &Instance<Rational>, i: usize, s: &Bundle, t: &Bundle) -> Ordering {
    match order {
        Order::Base => naive_base(inst, i, s).cmp(&naive_base(inst, i, t)),
        Order::Perturbed => naive_cmp(inst, i, s, t),
    }
}

fn naive_efx(order: Order, inst: &Instance<Rational>, x: &Allocation) -> bool {
    let n = x.num_agents();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for g in x.bundles[j].iter() {
                let mut rest = x.bundles[j].clone();
                rest.remove(g);
                if naive_cmp_in(order, inst, i, &rest, &x.bundles[i]) == Ordering::Greater {
                    return false;
                }
            }
        }
    }
    true
}

fn naive_ef1(order: Order, inst: &Instance<Rational>, x: &Allocation) -> bool {
    let n = x.num_agents();
    (0..n).all(|i| {
        (0..n).all(|j| {
            i == j
                || naive_cmp_in(order, inst, i, &x.bundles[j], &x.bundles[i]) != Ordering::Greater
                || x.bundles[j].iter().any(|g| {
                    let mut rest = x.bundles[j].clone();
                    rest.remove(g);
                    naive_cmp_in(order, inst, i, &rest, &x.bundles[i]) != Ordering::Greater
                })
        })
    })
}

const ORDERS: [Order; 2] = [Order::Base, Order::Perturbed];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn perturbed_order_is_total_and_strict(inst in instance(1, 7, 6), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let m = inst.num_goods();
        let (s, t, u) = (subset(a, m), subset(b, m), subset(c, m));
        prop_assert_eq!(inst.compare(0, &s, &t), naive_cmp(&inst, 0, &s, &t));
        prop_assert_eq!(inst.compare(0, &s, &t) == Ordering::Equal, s == t);
        prop_assert_eq!(inst.compare(0, &s, &t), inst.compare(0, &t, &s).reverse());
        if inst.compare(0, &s, &t) == Ordering::Less && inst.compare(0, &t, &u) == Ordering::Less {
            prop_assert_eq!(inst.compare(0, &s, &u), Ordering::Less);
        }
    }

    #[test]
    fn perturbation_refines_base_order(inst in instance(1, 7, 6), a in any::<u32>(), b in any::<u32>()) {
        let m = inst.num_goods();
        let (s, t) = (subset(a, m), subset(b, m));
        let base = inst.base(0, &s).cmp(&inst.base(0, &t));
        if base != Ordering::Equal {
            prop_assert_eq!(inst.compare(0, &s, &t), base);
        }
        prop_assert_eq!(inst.compare_in(Order::Base, 0, &s, &t), base);
    }

    #[test]
    fn values_are_additive(inst in instance(1, 7, 9), a in any::<u32>(), b in any::<u32>()) {
        let m = inst.num_goods();
        let s = subset(a, m);
        let t = subset(b & !a, m);
        prop_assert_eq!(inst.base(0, &s.union(&t)), inst.base(0, &s) + inst.base(0, &t));
        prop_assert_eq!(inst.base(0, &s), naive_base(&inst, 0, &s));
    }

    #[test]
    fn fairness_hierarchy((inst, x) in with_owners(3, 6, 5)) {
        for order in ORDERS {
            let ef = is_envy_free_in(order, &inst, &x);
            let efx = is_efx_in(order, &inst, &x);
            let ef1 = is_ef1_in(order, &inst, &x);
            prop_assert!(!ef || efx);
            prop_assert!(!efx || ef1);
            prop_assert_eq!(efx, naive_efx(order, &inst, &x));
            prop_assert_eq!(ef1, naive_ef1(order, &inst, &x));
        }
    }

    #[test]
    fn cycle_elimination_is_monotone((inst, x) in with_owners(3, 7, 5)) {
        let y = eliminate_envy_cycles(&inst, &x);
        prop_assert!(envy_graph(&inst, &y).is_acyclic());
        prop_assert_eq!(&y.pool, &x.pool);
        let mut before = x.bundles.clone();
        let mut after = y.bundles.clone();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
        for i in 0..3 {
            prop_assert_ne!(inst.compare(i, &y.bundles[i], &x.bundles[i]), Ordering::Less);
        }
        if is_efx_in(Order::Perturbed, &inst, &x) {
            prop_assert!(is_efx_in(Order::Perturbed, &inst, &y));
        }
    }

    #[test]
    fn greedy_smallest_beating_matches_exhaustive(inst in instance(1, 6, 8), a in any::<u32>(), b in any::<u32>()) {
        let m = inst.num_goods();
        let (set, threshold) = (subset(a, m), subset(b, m));
        let greedy = smallest_beating(&inst, 0, &set, &threshold);
        let best = (0u32..1 << m)
            .map(|mask| subset(mask, m))
            .filter(|z| z.minus(&set).is_empty() && naive_cmp(&inst, 0, z, &threshold) == Ordering::Greater)
            .map(|z| z.len())
            .min();
        prop_assert_eq!(greedy.as_ref().map(Bundle::len), best);
        if let Some(z) = greedy {
            prop_assert!(z.minus(&set).is_empty());
            prop_assert_eq!(naive_cmp(&inst, 0, &z, &threshold), Ordering::Greater);
        }
    }

    #[test]
    fn champion_cuts_match_exhaustive((inst, x) in with_owners(3, 6, 6)) {
        let Some(g) = x.pool.first() else { return Ok(()) };
        let m = inst.num_goods();
        let cg = champion_graph(&inst, &x, g);
        for j in 0..3 {
            let s = x.bundles[j].with(g);
            // exhaustive kappa: smallest subset of X_j + g beating X_i, if X_j + g beats X_i
            let k: Vec<Option<usize>> = (0..3).map(|i| {
                if naive_cmp(&inst, i, &s, &x.bundles[i]) != Ordering::Greater {
                    return None;
                }
                (0u32..1 << m)
                    .map(|mask| subset(mask, m))
                    .filter(|z| z.minus(&s).is_empty() && naive_cmp(&inst, i, z, &x.bundles[i]) == Ordering::Greater)
                    .map(|z| z.len())
                    .min()
            }).collect();
            let best = k.iter().flatten().min().copied();
            let champs: Vec<usize> = (0..3).filter(|&i| best.is_some() && k[i] == best).collect();
            prop_assert_eq!(cg.champions_of(j), champs.as_slice());
            for &i in &champs {
                prop_assert_eq!(cg.kappa(i, j), k[i]);
                let cut = champion_cut(&inst, &x, i, j, g).unwrap();
                prop_assert_eq!(Some(cut.upper.len()), k[i]);
                prop_assert_eq!(cut.upper.union(&cut.lower), s.clone());
                prop_assert_eq!(naive_cmp(&inst, i, &cut.upper, &x.bundles[i]), Ordering::Greater);
                // no good of the lower half beats any good of the upper half
                for lo in cut.lower.iter() {
                    for hi in cut.upper.iter() {
                        prop_assert_eq!(inst.compare_goods(i, lo, hi), Ordering::Less);
                    }
                }
            }
        }
    }
}

fn eps(terms: &[(u32, i64)]) -> EpsPoly {
    EpsPoly::from_terms(terms.iter().map(|&(d, c)| (d, int(c))))
}

fn poly() -> impl Strategy<Value = EpsPoly> {
    proptest::collection::vec((0u32..5, -5i64..=5), 0..4).prop_map(|t| eps(&t))
}

proptest! {
    #[test]
    fn eps_ring_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(p.clone() + q.clone(), q.clone() + p.clone());
        prop_assert_eq!(p.clone() * q.clone(), q.clone() * p.clone());
        prop_assert_eq!((p.clone() * q.clone()) * r.clone(), p.clone() * (q.clone() * r.clone()));
        prop_assert_eq!(p.clone() * (q.clone() + r.clone()), p.clone() * q.clone() + p.clone() * r.clone());
        prop_assert_eq!(p.clone() - p.clone(), EpsPoly::zero());
        if p < q {
            prop_assert!(p.clone() + r.clone() < q.clone() + r.clone());
        }
    }

    #[test]
    fn eps_order_matches_small_positive_eps(p in poly(), q in poly()) {
        // p - q has at most eight terms with coefficients of size at most ten,
        // so at 1/1000 its lowest term decides the sign
        let e = rational(1, 1000);
        let diff = p.eval(&e) - q.eval(&e);
        let expected = if p == q { Ordering::Equal } else { diff.cmp(&Rational::zero()) };
        prop_assert_eq!(p.cmp(&q), expected);
    }
}

/// Oracle counts against a plain Cartesian-product loop, for tiny instances.
#[test]
fn oracle_matches_cartesian_product() {
    let mut checked = 0;
    for seed in 0..60u64 {
        let inst = efx_core::generate::generate(&efx_core::generate::GenParams {
            agents: 3,
            goods: (seed % 4) as usize,
            max_value: 4,
            seed,
        });
        let m = inst.num_goods();
        let opts = OracleOptions {
            list: true,
            ..Default::default()
        };
        let report = enumerate_efx(&inst, &opts).unwrap();
        let mut count = 0u64;
        let mut owners = vec![0usize; m];
        let total = 3usize.pow(m as u32);
        for code in 0..total {
            let mut c = code;
            for o in owners.iter_mut().rev() {
                *o = c % 3;
                c /= 3;
            }
            let x = from_owners(&inst, 3, &owners);
            let naive = naive_efx(Order::Base, &inst, &x);
            count += u64::from(naive);
            assert_eq!(report.contains(&x), Some(naive), "seed {seed} owners {owners:?}");
            // dominance query against a naive scan
            let naive_dom = (0..total).any(|d| {
                let mut c = d;
                let mut o2 = vec![0usize; m];
                for o in o2.iter_mut().rev() {
                    *o = c % 3;
                    c /= 3;
                }
                let y = from_owners(&inst, 3, &o2);
                naive_efx(Order::Base, &inst, &y)
                    && (0..3).all(|i| naive_base(&inst, i, &y.bundles[i]) >= naive_base(&inst, i, &x.bundles[i]))
                    && (0..3).any(|i| naive_base(&inst, i, &y.bundles[i]) > naive_base(&inst, i, &x.bundles[i]))
            });
            let found = exists_pareto_dominator(&inst, &x, &opts).unwrap();
            assert_eq!(found.is_some(), naive_dom, "seed {seed} owners {owners:?}");
            if let Some(y) = found {
                assert!(pareto_dominates_in(Order::Base, &inst, &y, &x));
            }
        }
        assert_eq!(report.total, total as u128);
        assert_eq!(report.efx_count, count, "seed {seed}");
        checked += 1;
    }
    assert_eq!(checked, 60);
}
