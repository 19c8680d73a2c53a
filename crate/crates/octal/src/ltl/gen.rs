use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ast::LtlFormula;

/// Parameters for the random formula generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    /// Target expression-tree node count; the draw hits it exactly.
    pub tree_size: usize,
    /// Number of distinct atoms, drawn from the front of `a..z`.
    pub atom_count: usize,
    pub seed: u64,
    pub allow_constants: bool,
}

impl GenConfig {
    pub fn new(tree_size: usize, atom_count: usize, seed: u64) -> Self {
        assert!(tree_size >= 1, "tree_size must be at least 1");
        assert!(
            (1..=26).contains(&atom_count),
            "atom_count must be in 1..=26"
        );
        GenConfig {
            tree_size,
            atom_count,
            seed,
            allow_constants: false,
        }
    }

    pub fn with_constants(mut self, allow: bool) -> Self {
        self.allow_constants = allow;
        self
    }
}

const UNARY_OPS: [u8; 4] = [b'!', b'G', b'F', b'X'];
const BINARY_OPS: [u8; 6] = [b'U', b'R', b'W', b'M', b'&', b'|'];
const CONSTANT_PROB: f64 = 0.02;

/// Draw a random formula; a pure function of the config.
///
/// Trees grow top-down: the operator is drawn uniformly from the ten-symbol
/// alphabet among those that fit the remaining size budget, and a binary
/// operator splits the budget uniformly between its children.
pub fn random_ltl(cfg: &GenConfig) -> LtlFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    grow(&mut rng, cfg, cfg.tree_size)
}

fn grow(rng: &mut ChaCha8Rng, cfg: &GenConfig, budget: usize) -> LtlFormula {
    if budget == 1 {
        return leaf(rng, cfg);
    }
    let op = if budget == 2 {
        UNARY_OPS[rng.gen_range(0..UNARY_OPS.len())]
    } else {
        let pick = rng.gen_range(0..UNARY_OPS.len() + BINARY_OPS.len());
        if pick < UNARY_OPS.len() {
            UNARY_OPS[pick]
        } else {
            BINARY_OPS[pick - UNARY_OPS.len()]
        }
    };
    match op {
        b'!' => LtlFormula::not(grow(rng, cfg, budget - 1)),
        b'G' => LtlFormula::globally(grow(rng, cfg, budget - 1)),
        b'F' => LtlFormula::finally(grow(rng, cfg, budget - 1)),
        b'X' => LtlFormula::next(grow(rng, cfg, budget - 1)),
        binary => {
            let left = rng.gen_range(1..budget - 1);
            let l = grow(rng, cfg, left);
            let r = grow(rng, cfg, budget - 1 - left);
            match binary {
                b'U' => LtlFormula::until(l, r),
                b'R' => LtlFormula::release(l, r),
                b'W' => LtlFormula::weak_until(l, r),
                b'M' => LtlFormula::strong_release(l, r),
                b'&' => LtlFormula::and(l, r),
                _ => LtlFormula::or(l, r),
            }
        }
    }
}

fn leaf(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> LtlFormula {
    if cfg.allow_constants && rng.gen_bool(CONSTANT_PROB) {
        return if rng.gen_bool(0.5) {
            LtlFormula::True
        } else {
            LtlFormula::False
        };
    }
    let idx = rng.gen_range(0..cfg.atom_count) as u8;
    LtlFormula::Atom((b'a' + idx) as char)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_one_is_a_leaf() {
        for seed in 0..20 {
            let f = random_ltl(&GenConfig::new(1, 1, seed).with_constants(true));
            assert_eq!(f.size(), 1);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let cfg = GenConfig::new(15, 4, 7);
        assert_eq!(random_ltl(&cfg), random_ltl(&cfg));
    }

    #[test]
    fn hits_the_size_target() {
        for seed in 0..50 {
            let cfg = GenConfig::new(15, 3, seed);
            let f = random_ltl(&cfg);
            assert_eq!(f.size(), 15, "seed {seed}: {f}");
        }
    }

    #[test]
    fn no_constants_unless_allowed() {
        for seed in 0..50 {
            let f = random_ltl(&GenConfig::new(9, 2, seed));
            let text = f.to_string();
            assert!(!text.contains('1') && !text.contains('0'), "{text}");
        }
    }
}
