//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;
use crate::value::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub agents: usize,
    pub goods: usize,
    pub max_value: u64,
    pub seed: u64,
}

/// Integer values drawn uniformly from `[0, max_value]`, row by row.
pub fn generate(p: &GenParams) -> Instance<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let rows = (0..p.agents)
        .map(|_| {
            (0..p.goods)
                .map(|_| int(rng.gen_range(0..=p.max_value) as i64))
                .collect()
        })
        .collect();
    Instance::from_rows(rows)
        .expect("generated rows are rectangular and non-negative")
        .with_comment(format!(
            "efx gen --agents {} --goods {} --max-value {} --seed {}",
            p.agents, p.goods, p.max_value, p.seed
        ))
}

/// Every agent gets the same row.
pub fn generate_identical(p: &GenParams) -> Instance<Rational> {
    let one = generate(&GenParams { agents: 1, ..*p });
    let row = one.row(0).to_vec();
    Instance::from_rows(vec![row; p.agents])
        .expect("copied rows are valid")
        .with_comment(format!(
            "identical rows, goods {} max-value {} seed {}",
            p.goods, p.max_value, p.seed
        ))
}

/// Values from a small set so ties between bundles are common.
pub fn generate_tied(p: &GenParams) -> Instance<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x7469_6573);
    let palette = [0i64, 1, 1, 2, 2, 3];
    let rows = (0..p.agents)
        .map(|_| {
            (0..p.goods)
                .map(|_| int(palette[rng.gen_range(0..palette.len())]))
                .collect()
        })
        .collect();
    Instance::from_rows(rows).expect("palette values are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let p = GenParams {
            agents: 3,
            goods: 6,
            max_value: 20,
            seed: 42,
        };
        assert_eq!(generate(&p).serialize(), generate(&p).serialize());
        assert_ne!(generate(&p), generate(&GenParams { seed: 43, ..p }));
    }

    #[test]
    fn degenerate_parameters() {
        let p = GenParams {
            agents: 3,
            goods: 0,
            max_value: 5,
            seed: 1,
        };
        assert_eq!(generate(&p).num_goods(), 0);
        let z = generate(&GenParams { goods: 4, max_value: 0, ..p });
        assert!((0..3).all(|i| z.row(i).iter().all(|v| *v == int(0))));
    }
}
