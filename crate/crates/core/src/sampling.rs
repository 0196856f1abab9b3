//! Seeded uniform sampling in coordinate boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    /// Box with the given corners; each pair is reordered so `lo <= hi`.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        assert_eq!(a.len(), b.len(), "box corners differ in dimension");
        let (lo, hi) = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| (x.min(y), x.max(y)))
            .unzip();
        SampleBox { lo, hi }
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        SampleBox::new(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, pt: &[f64]) -> bool {
        pt.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(&lo, &hi)| {
                    if lo == hi {
                        lo
                    } else {
                        rng.random_range(lo..hi)
                    }
                })
                .collect(),
        )
    }

    /// `count` points from a ChaCha stream seeded with `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_with(&mut rng)).collect()
    }
}
