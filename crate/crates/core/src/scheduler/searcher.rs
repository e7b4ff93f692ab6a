use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Source of new configurations. Returns the candidate key of each draw.
///
/// Only random search is provided; model-based searchers plug in here.
pub trait Searcher: Send {
    fn draw(&mut self) -> Result<u64>;
}

/// Uniform sampling without replacement over a fixed candidate universe.
///
/// Draws are a seeded partial Fisher–Yates shuffle, so the sequence of the
/// first `k` draws is a prefix of the sequence of the first `k + 1`.
#[derive(Debug, Clone)]
pub struct RandomSearcher {
    candidates: Vec<u64>,
    drawn: usize,
    rng: ChaCha8Rng,
}

impl RandomSearcher {
    pub fn new(mut candidates: Vec<u64>, seed: u64) -> Self {
        candidates.sort_unstable();
        candidates.dedup();
        Self { candidates, drawn: 0, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn universe_size(&self) -> usize {
        self.candidates.len()
    }
}

impl Searcher for RandomSearcher {
    fn draw(&mut self) -> Result<u64> {
        let n = self.candidates.len();
        if self.drawn == n {
            return Err(Error::SearcherExhausted(n));
        }
        let j = self.rng.random_range(self.drawn..n);
        self.candidates.swap(self.drawn, j);
        self.drawn += 1;
        Ok(self.candidates[self.drawn - 1])
    }
}

/// Draws one candidate from `searcher`.
pub fn draw_config(searcher: &mut dyn Searcher) -> Result<u64> {
    searcher.draw()
}
