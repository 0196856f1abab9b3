//! Symbolic differentiation with light constant folding.

use std::sync::Arc;

use super::{num_node, BinOp, Func, Node};

fn num(v: f64) -> Arc<Node> {
    Arc::new(num_node(v))
}

pub(super) fn simplify_bin(op: BinOp, a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    let (ca, cb) = (a.as_num(), b.as_num());
    if let (Some(x), Some(y)) = (ca, cb) {
        let folded = match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            BinOp::Mul => x * y,
            BinOp::Div => x / y,
        };
        if folded.is_finite() {
            return num(folded);
        }
    }
    match op {
        BinOp::Add if ca == Some(0.0) => b,
        BinOp::Add | BinOp::Sub if cb == Some(0.0) => a,
        BinOp::Sub if ca == Some(0.0) => simplify_neg(b),
        BinOp::Mul if ca == Some(0.0) || cb == Some(0.0) => num(0.0),
        BinOp::Mul if ca == Some(1.0) => b,
        BinOp::Mul | BinOp::Div if cb == Some(1.0) => a,
        BinOp::Div if ca == Some(0.0) && cb != Some(0.0) => num(0.0),
        _ => Arc::new(Node::Bin(op, a, b)),
    }
}

pub(super) fn simplify_neg(a: Arc<Node>) -> Arc<Node> {
    match a.as_num() {
        Some(v) => num(-v),
        None => Arc::new(Node::Neg(a)),
    }
}

pub(super) fn simplify_pow(base: Arc<Node>, exponent: Arc<Node>) -> Arc<Node> {
    match exponent.as_num() {
        Some(1.0) => base,
        Some(0.0) => num(1.0),
        _ => Arc::new(Node::Pow(base, exponent)),
    }
}

fn mul(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    simplify_bin(BinOp::Mul, a, b)
}

fn call(f: Func, a: &Arc<Node>) -> Arc<Node> {
    Arc::new(Node::Call(f, a.clone()))
}

pub(super) fn derivative(node: &Node, idx: usize) -> Arc<Node> {
    if !node.has_coords() {
        return num(0.0);
    }
    match node {
        Node::Num(_) | Node::Param(_) => num(0.0),
        Node::Coord(j) => num(if *j == idx { 1.0 } else { 0.0 }),
        Node::Neg(a) => simplify_neg(derivative(a, idx)),
        Node::Bin(op, a, b) => {
            let (da, db) = (derivative(a, idx), derivative(b, idx));
            match op {
                BinOp::Add | BinOp::Sub => simplify_bin(*op, da, db),
                BinOp::Mul => simplify_bin(BinOp::Add, mul(da, b.clone()), mul(a.clone(), db)),
                BinOp::Div => {
                    // (a/b)' = a'/b - (a/b) * b'/b
                    let first = simplify_bin(BinOp::Div, da, b.clone());
                    let quotient = Arc::new(Node::Bin(BinOp::Div, a.clone(), b.clone()));
                    let second = mul(quotient, simplify_bin(BinOp::Div, db, b.clone()));
                    simplify_bin(BinOp::Sub, first, second)
                }
            }
        }
        Node::Call(f, a) => {
            let da = derivative(a, idx);
            let outer = match f {
                Func::Sin => call(Func::Cos, a),
                Func::Cos => simplify_neg(call(Func::Sin, a)),
                Func::Exp => call(Func::Exp, a),
                Func::Log => return simplify_bin(BinOp::Div, da, a.clone()),
                Func::Sqrt => {
                    let denom = mul(num(2.0), call(Func::Sqrt, a));
                    return simplify_bin(BinOp::Div, da, denom);
                }
            };
            mul(outer, da)
        }
        Node::Pow(a, e) => {
            let da = derivative(a, idx);
            let lowered = simplify_bin(BinOp::Sub, e.clone(), num(1.0));
            mul(mul(e.clone(), simplify_pow(a.clone(), lowered)), da)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::Scope;

    #[test]
    fn derivatives_match_jets() {
        let s = Scope::new(["x", "y"], ["a"]).unwrap();
        let b = s.bind([("a", 0.7)]).unwrap();
        let pt = [0.4, 1.3];
        for src in [
            "x^2*y",
            "exp(a*x + 2*y)",
            "log(2 + sin(x)*cos(y))",
            "sqrt(1 + x^2) / (3 + y)",
            "-(x*y)^3 + x^-1",
            "y^0.5 * cos(x)",
            "a",
        ] {
            let e = s.parse(src).unwrap();
            let jet = e.eval_jet2(&pt, &b).unwrap();
            for i in 0..2 {
                let d = e.derivative(i);
                let dj = d.eval_jet1(&pt, &b).unwrap();
                assert!((dj.value - jet.grad[i]).abs() < 1e-12, "{src} d{i}");
                for j in 0..2 {
                    assert!(
                        (dj.grad[j] - jet.hess(i, j)).abs() < 1e-11,
                        "{src} d{i}d{j}"
                    );
                }
            }
        }
    }

    #[test]
    fn folds_trivial_terms() {
        let s = Scope::new(["x", "y"], ["a"]).unwrap();
        assert_eq!(s.parse("a*x").unwrap().derivative(0).to_string(), "a");
        assert_eq!(s.parse("a*x").unwrap().derivative(1).to_string(), "0");
        assert_eq!(s.parse("x^3").unwrap().derivative(0).to_string(), "3 * x^2");
    }
}
