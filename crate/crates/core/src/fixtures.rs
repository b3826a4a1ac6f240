//! Built-in instances: the two-agent warm-up example and the two seven-good
//! counterexample instances with their distinguished allocations.

use crate::allocation::Allocation;
use crate::eps_poly::EpsPoly;
use crate::instance::Instance;
use crate::value::{int, Rational};

fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| int(v)).collect())
        .collect()
}

/// Two agents, three goods valued `(1, 1, 2)` by both.
pub fn intro() -> Instance<Rational> {
    Instance::from_rows(ints(&[&[1, 1, 2], &[1, 1, 2]])).expect("static fixture")
}

/// The seven-good instance whose partial allocation has no complete EFX
/// Pareto improvement.
pub fn table1() -> Instance<Rational> {
    Instance::from_rows(ints(&[
        &[8, 2, 12, 2, 0, 17, 1],
        &[5, 0, 9, 4, 10, 0, 3],
        &[0, 0, 0, 0, 9, 10, 2],
    ]))
    .expect("static fixture")
}

/// `({g2,g3,g4}, {g1,g5}, {g6})` with `g7` unallocated; valid for both
/// seven-good instances since they share good ids.
pub fn partial_x<V: crate::Value>(inst: &Instance<V>) -> Allocation {
    Allocation::from_ids(inst, &[&["g2", "g3", "g4"], &["g1", "g5"], &["g6"]], Some(&["g7"]))
        .expect("static fixture")
}

fn e(terms: &[(u32, i64)]) -> EpsPoly {
    EpsPoly::from_terms(terms.iter().map(|&(d, c)| (d, int(c))))
}

/// The infinitesimal variant of [`table1`] on which a partial EFX allocation
/// beats every complete one in Nash welfare.
pub fn table2() -> Instance<EpsPoly> {
    let rows = vec![
        vec![
            e(&[(3, 1), (5, 6)]),
            e(&[(5, 2)]),
            e(&[(0, 10), (3, -1)]),
            e(&[(3, 1)]),
            e(&[(0, 10), (3, -2)]),
            e(&[(0, 10), (5, 3)]),
            e(&[(5, 1)]),
        ],
        vec![
            e(&[(1, 1)]),
            e(&[]),
            e(&[(0, 10), (2, -1), (6, 1)]),
            e(&[(2, 2)]),
            e(&[(0, 10)]),
            e(&[]),
            e(&[(1, 1), (2, -1)]),
        ],
        vec![
            e(&[]),
            e(&[]),
            e(&[]),
            e(&[]),
            e(&[(0, 10), (4, -1)]),
            e(&[(0, 10)]),
            e(&[(4, 2)]),
        ],
    ];
    Instance::from_rows(rows).expect("static fixture")
}

/// `({g6}, {g3,g4,g7}, {g1,g2,g5})`, a complete EFX allocation of [`table2`].
pub fn table2_x_hat(inst: &Instance<EpsPoly>) -> Allocation {
    Allocation::from_ids(inst, &[&["g6"], &["g3", "g4", "g7"], &["g1", "g2", "g5"]], None)
        .expect("static fixture")
}

/// `(10 + 2ε^5)(10 + ε)(10)`: cubed Nash welfare of the partial allocation.
pub fn table2_partial_nash() -> EpsPoly {
    e(&[(0, 10), (5, 2)]) * e(&[(0, 10), (1, 1)]) * e(&[(0, 10)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table2_spot_entries() {
        let t = table2();
        assert_eq!(t.good_value(0, 5), &e(&[(0, 10), (5, 3)]));
        assert_eq!(t.good_value(2, 6), &e(&[(4, 2)]));
        assert_eq!(t.good_value(1, 1), &e(&[]));
    }
}
