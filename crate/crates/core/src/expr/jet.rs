//! Forward-mode jets of order one and two over `n` chart coordinates.

/// Scalar types the expression evaluator runs on.
///
/// `chain(f0, f1, f2)` composes a unary function with value `f0`, first
/// derivative `f1` and second derivative `f2` at `self.value()`.
pub(crate) trait JetScalar: Sized {
    const ORDER: u8;
    fn constant(v: f64, n: usize) -> Self;
    fn variable(v: f64, idx: usize, n: usize) -> Self;
    fn value(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self;
}

impl JetScalar for f64 {
    const ORDER: u8 = 0;
    fn constant(v: f64, _: usize) -> Self {
        v
    }
    fn variable(v: f64, _: usize, _: usize) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn chain(&self, f0: f64, _: f64, _: f64) -> Self {
        f0
    }
}

/// Value and gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl JetScalar for Jet1 {
    const ORDER: u8 = 1;
    fn constant(v: f64, n: usize) -> Self {
        Jet1 {
            value: v,
            grad: vec![0.0; n],
        }
    }
    fn variable(v: f64, idx: usize, n: usize) -> Self {
        let mut j = Self::constant(v, n);
        j.grad[idx] = 1.0;
        j
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn add(&self, o: &Self) -> Self {
        Jet1 {
            value: self.value + o.value,
            grad: zip(&self.grad, &o.grad, |a, b| a + b),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Jet1 {
            value: self.value - o.value,
            grad: zip(&self.grad, &o.grad, |a, b| a - b),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        Jet1 {
            value: self.value * o.value,
            grad: zip(&self.grad, &o.grad, |a, b| a * o.value + self.value * b),
        }
    }
    fn div(&self, o: &Self) -> Self {
        let q = self.value / o.value;
        Jet1 {
            value: q,
            grad: zip(&self.grad, &o.grad, |a, b| (a - q * b) / o.value),
        }
    }
    fn neg(&self) -> Self {
        Jet1 {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
        }
    }
    fn chain(&self, f0: f64, f1: f64, _: f64) -> Self {
        Jet1 {
            value: f0,
            grad: self.grad.iter().map(|g| f1 * g).collect(),
        }
    }
}

fn zip(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

/// Value, gradient and Hessian.
///
/// The Hessian is stored as its packed upper triangle, so it is symmetric
/// by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    hess: Vec<f64>,
}

#[inline]
fn tri(i: usize, j: usize, n: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl Jet2 {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Second partial derivative with respect to coordinates `i` and `j`.
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[tri(i, j, self.dim())]
    }

    pub fn hessian_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.hess(i, j)).collect())
            .collect()
    }

    fn hess_from(n: usize, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
        let mut h = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                h.push(f(i, j));
            }
        }
        h
    }
}

impl JetScalar for Jet2 {
    const ORDER: u8 = 2;
    fn constant(v: f64, n: usize) -> Self {
        Jet2 {
            value: v,
            grad: vec![0.0; n],
            hess: vec![0.0; n * (n + 1) / 2],
        }
    }
    fn variable(v: f64, idx: usize, n: usize) -> Self {
        let mut j = Self::constant(v, n);
        j.grad[idx] = 1.0;
        j
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn add(&self, o: &Self) -> Self {
        Jet2 {
            value: self.value + o.value,
            grad: zip(&self.grad, &o.grad, |a, b| a + b),
            hess: zip(&self.hess, &o.hess, |a, b| a + b),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Jet2 {
            value: self.value - o.value,
            grad: zip(&self.grad, &o.grad, |a, b| a - b),
            hess: zip(&self.hess, &o.hess, |a, b| a - b),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        let n = self.dim();
        let (u, v) = (self.value, o.value);
        let (gu, gv) = (&self.grad, &o.grad);
        Jet2 {
            value: u * v,
            grad: zip(gu, gv, |a, b| a * v + u * b),
            hess: Self::hess_from(n, |i, j| {
                let k = tri(i, j, n);
                u * o.hess[k] + v * self.hess[k] + gu[i] * gv[j] + gv[i] * gu[j]
            }),
        }
    }
    fn div(&self, o: &Self) -> Self {
        let n = self.dim();
        let v = o.value;
        let q = self.value / v;
        let gq = zip(&self.grad, &o.grad, |a, b| (a - q * b) / v);
        let gv = &o.grad;
        let hess = Self::hess_from(n, |i, j| {
            let k = tri(i, j, n);
            (self.hess[k] - q * o.hess[k] - gq[i] * gv[j] - gv[i] * gq[j]) / v
        });
        Jet2 {
            value: q,
            grad: gq,
            hess,
        }
    }
    fn neg(&self) -> Self {
        Jet2 {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
            hess: self.hess.iter().map(|h| -h).collect(),
        }
    }
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.dim();
        let g = &self.grad;
        Jet2 {
            value: f0,
            grad: g.iter().map(|x| f1 * x).collect(),
            hess: Self::hess_from(n, |i, j| f2 * g[i] * g[j] + f1 * self.hess[tri(i, j, n)]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_index_covers_upper_triangle() {
        let n = 4;
        let mut seen = vec![false; n * (n + 1) / 2];
        for i in 0..n {
            for j in 0..n {
                let k = tri(i, j, n);
                assert_eq!(k, tri(j, i, n));
                seen[k] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn product_rule() {
        let x = Jet2::variable(2.0, 0, 2);
        let y = Jet2::variable(3.0, 1, 2);
        let p = x.mul(&x).mul(&y);
        assert_eq!(p.value, 12.0);
        assert_eq!(p.grad, vec![12.0, 4.0]);
        assert_eq!(p.hessian_matrix(), vec![vec![6.0, 4.0], vec![4.0, 0.0]]);
    }

    #[test]
    fn quotient_rule() {
        // x / y at (1, 2): grad (1/2, -1/4), hess [[0, -1/4], [-1/4, 1/4]]
        let x = Jet2::variable(1.0, 0, 2);
        let y = Jet2::variable(2.0, 1, 2);
        let q = x.div(&y);
        assert_eq!(q.grad, vec![0.5, -0.25]);
        assert_eq!(
            q.hessian_matrix(),
            vec![vec![0.0, -0.25], vec![-0.25, 0.25]]
        );
    }
}
