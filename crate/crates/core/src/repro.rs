//! Exhaustive re-checks of the two seven-good counterexamples.

use num_traits::Zero;
use serde_json::{json, Value as Json};

use crate::allocation::{is_efx_in, nash_product, Allocation};
use crate::eps_poly::EpsPoly;
use crate::fixtures;
use crate::instance::{Instance, Order};
use crate::oracle::{enumerate_with_query, OracleError, OracleOptions};
use crate::value::{int, Rational, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReproReport {
    pub table: &'static str,
    pub checks: Vec<Check>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "table": self.table,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "passed": c.passed,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

fn opts() -> OracleOptions {
    OracleOptions {
        list: true,
        ..Default::default()
    }
}

pub fn table1() -> Result<ReproReport, OracleError> {
    table1_on(&fixtures::table1())
}

/// The partial allocation is EFX with values (16, 15, 10) and no complete
/// EFX allocation Pareto dominates it.
pub fn table1_on(inst: &Instance<Rational>) -> Result<ReproReport, OracleError> {
    let x = fixtures::partial_x(inst);
    let values: Vec<Rational> = (0..3).map(|i| inst.base(i, &x.bundles[i])).collect();
    let report = enumerate_with_query(inst, &opts(), &x)?;
    let dominator = report.dominance.as_ref().and_then(|(_, w)| w.clone());
    let checks = vec![
        Check {
            name: "partial_values",
            passed: values == [int(16), int(15), int(10)],
            detail: json!(values.iter().map(Value::to_json).collect::<Vec<_>>()),
        },
        Check {
            name: "partial_is_efx",
            passed: is_efx_in(Order::Base, inst, &x),
            detail: x.to_json(inst),
        },
        Check {
            name: "no_efx_pareto_dominator",
            passed: dominator.is_none(),
            detail: json!({
                "scanned": report.total.to_string(),
                "efx_count": report.efx_count,
                "dominator": dominator.map(|w| w.to_json(inst)),
            }),
        },
    ];
    Ok(ReproReport {
        table: "table1",
        checks,
    })
}

pub fn table2() -> Result<ReproReport, OracleError> {
    table2_on(&fixtures::table2())
}

/// Over the ε-ring: the partial allocation is EFX, the listed complete
/// allocation is EFX, every complete EFX allocation has a smaller Nash
/// product than the partial one, and each of them splits g3, g5, g6.
pub fn table2_on(inst: &Instance<EpsPoly>) -> Result<ReproReport, OracleError> {
    let x = fixtures::partial_x(inst);
    let x_hat = fixtures::table2_x_hat(inst);
    let target = fixtures::table2_partial_nash();
    let report = enumerate_with_query(inst, &opts(), &x)?;

    let mut above: Option<(EpsPoly, Allocation)> = None;
    let mut merged: Option<Allocation> = None;
    let (g3, g5, g6) = (2, 4, 5);
    for y in report.efx_allocations(inst) {
        let p = nash_product(inst, &y);
        if above.is_none() && p >= target {
            above = Some((p, y.clone()));
        }
        let owner = y.assignment(inst.num_goods());
        if merged.is_none() && (owner[g3] == owner[g5] || owner[g3] == owner[g6] || owner[g5] == owner[g6]) {
            merged = Some(y);
        }
    }

    let checks = vec![
        Check {
            name: "partial_is_efx",
            passed: is_efx_in(Order::Base, inst, &x),
            detail: json!({
                "allocation": x.to_json(inst),
                "nash_product": nash_product(inst, &x).to_string(),
                "target": target.to_string(),
            }),
        },
        Check {
            name: "x_hat_complete_efx",
            passed: x_hat.is_complete() && is_efx_in(Order::Base, inst, &x_hat),
            detail: x_hat.to_json(inst),
        },
        Check {
            name: "complete_efx_nash_below_partial",
            passed: report.efx_count > 0 && above.is_none(),
            detail: json!({
                "scanned": report.total.to_string(),
                "efx_count": report.efx_count,
                "max_nash": report.max_nash.as_ref().map(|(v, _)| v.to_string()),
                "counter_witness": above.map(|(p, y)| json!({
                    "nash_product": p.to_string(),
                    "allocation": y.to_json(inst),
                })),
            }),
        },
        Check {
            name: "g3_g5_g6_distinct_owners",
            passed: merged.is_none(),
            detail: json!({"counter_witness": merged.map(|y| y.to_json(inst))}),
        },
    ];
    Ok(ReproReport {
        table: "table2",
        checks,
    })
}

/// The `table2` instance with agent 3's value for g7 set to zero: a negative control that
/// must fail the Nash check.
pub fn tampered_table2() -> Instance<EpsPoly> {
    fixtures::table2()
        .with_value(2, 6, EpsPoly::zero())
        .expect("in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_passes() {
        let r = table1().unwrap();
        assert!(r.passed(), "{:#}", r.to_json());
    }

    #[test]
    fn table2_passes() {
        let r = table2().unwrap();
        assert!(r.passed(), "{:#}", r.to_json());
    }

    #[test]
    fn partial_nash_matches_target() {
        let inst = fixtures::table2();
        let x = fixtures::partial_x(&inst);
        assert_eq!(nash_product(&inst, &x), fixtures::table2_partial_nash());
    }

    #[test]
    fn tampered_fails() {
        let r = table2_on(&tampered_table2()).unwrap();
        assert!(!r.passed());
    }
}
