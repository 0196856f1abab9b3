//! Random expressions with bounded depth and coefficients.
//!
//! Every function application is guarded so the result is finite and
//! smooth for any real input: `log`, `sqrt`, division and fractional
//! powers are only ever applied to arguments bounded away from zero.

use std::sync::Arc;

use rand::Rng;

use super::{Func, ScalarExpr, Scope};

#[derive(Debug, Clone)]
pub struct RandomExpr {
    scope: Arc<Scope>,
    max_depth: u32,
    coeff_range: (f64, f64),
}

impl RandomExpr {
    pub fn new(scope: &Arc<Scope>, max_depth: u32) -> Self {
        RandomExpr {
            scope: scope.clone(),
            max_depth,
            coeff_range: (0.1, 2.0),
        }
    }

    pub fn with_coefficients(mut self, lo: f64, hi: f64) -> Self {
        assert!(lo <= hi);
        self.coeff_range = (lo, hi);
        self
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> ScalarExpr {
        self.node(rng, self.max_depth)
    }

    fn constant(&self, v: f64) -> ScalarExpr {
        ScalarExpr::constant(&self.scope, v)
    }

    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R) -> ScalarExpr {
        let n = self.scope.dim();
        let p = self.scope.params().len();
        let roll = rng.random_range(0..10);
        if roll < 6 && n > 0 {
            ScalarExpr::coord(&self.scope, rng.random_range(0..n))
        } else if roll < 7 && p > 0 {
            ScalarExpr::param(&self.scope, rng.random_range(0..p))
        } else {
            let (lo, hi) = self.coeff_range;
            let v: f64 = rng.random_range(lo..=hi);
            self.constant((v * 100.0).round() / 100.0)
        }
    }

    /// `c + u^2`, strictly positive.
    fn positive<R: Rng + ?Sized>(&self, rng: &mut R, depth: u32) -> ScalarExpr {
        let u = self.node(rng, depth);
        if rng.random_bool(0.5) {
            self.constant(1.0).add(&u.powi(2))
        } else {
            self.constant(2.0).add(&u.call(Func::Sin))
        }
    }

    fn node<R: Rng + ?Sized>(&self, rng: &mut R, depth: u32) -> ScalarExpr {
        if depth == 0 || rng.random_bool(0.2) {
            return self.leaf(rng);
        }
        let d = depth - 1;
        match rng.random_range(0..11) {
            0 => self.node(rng, d).add(&self.node(rng, d)),
            1 => self.node(rng, d).sub(&self.node(rng, d)),
            2 | 3 => self.node(rng, d).mul(&self.node(rng, d)),
            4 => self.node(rng, d).div(&self.positive(rng, d)),
            5 => self.node(rng, d).call(Func::Sin),
            6 => self.node(rng, d).call(Func::Cos),
            7 => self.node(rng, d).call(Func::Sin).call(Func::Exp),
            8 => self.positive(rng, d).call(Func::Log),
            9 => self.positive(rng, d).call(Func::Sqrt),
            _ => {
                if rng.random_bool(0.5) {
                    self.node(rng, d).powi(rng.random_range(2..=3))
                } else {
                    let e = [0.5, -1.0, 1.5][rng.random_range(0..3)];
                    self.positive(rng, d).pow(&self.constant(e))
                }
            }
        }
    }
}
