//! Scalar expressions over named chart coordinates and named parameters.
//!
//! An expression is parsed once against a [`Scope`] and then evaluated at
//! many points, either as a plain `f64` or as a second-order jet
//! ([`Jet2`]) carrying the exact gradient and Hessian with respect to the
//! chart coordinates. Parameters stay symbolic until evaluation, so one
//! parsed scenario serves any number of parameter bindings.

mod diff;
mod jet;
mod parser;
pub mod random;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub(crate) use jet::JetScalar;
pub use jet::{Jet1, Jet2};

/// Names that cannot be used as coordinates or parameters.
pub const FUNCTION_NAMES: [&str; 5] = ["sin", "cos", "exp", "log", "sqrt"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error: {op} of {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("point has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("bindings do not belong to this expression's scope")]
    ForeignBindings,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScopeError {
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("`{0}` is a reserved function name")]
    Reserved(String),
    #[error("`{0}` is not a valid identifier")]
    Invalid(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter `{0}` bound more than once")]
    Rebound(String),
    #[error("parameter `{0}` is not bound")]
    Unbound(String),
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Declared coordinate and parameter names.
///
/// Coordinates are the chart variables jets differentiate against;
/// parameters are constants supplied through [`Bindings`].
#[derive(Debug, PartialEq, Eq)]
pub struct Scope {
    coords: Vec<String>,
    params: Arc<[String]>,
}

impl Scope {
    pub fn new<C, P>(coords: C, params: P) -> Result<Arc<Self>, ScopeError>
    where
        C: IntoIterator,
        C::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let coords: Vec<String> = coords.into_iter().map(Into::into).collect();
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        Self::with_params(coords, params.into())
    }

    /// Scope with its own coordinates sharing the parameter list of `other`.
    ///
    /// Bindings built for `other` evaluate expressions of the new scope.
    pub fn sharing_params<C>(coords: C, other: &Scope) -> Result<Arc<Self>, ScopeError>
    where
        C: IntoIterator,
        C::Item: Into<String>,
    {
        let coords: Vec<String> = coords.into_iter().map(Into::into).collect();
        Self::with_params(coords, other.params.clone())
    }

    fn with_params(coords: Vec<String>, params: Arc<[String]>) -> Result<Arc<Self>, ScopeError> {
        let mut seen = std::collections::HashSet::new();
        for name in coords.iter().chain(params.iter()) {
            if !is_identifier(name) {
                return Err(ScopeError::Invalid(name.clone()));
            }
            if FUNCTION_NAMES.contains(&name.as_str()) {
                return Err(ScopeError::Reserved(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(ScopeError::Duplicate(name.clone()));
            }
        }
        Ok(Arc::new(Scope { coords, params }))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|c| c == name)
    }

    pub fn parse(self: &Arc<Self>, text: &str) -> Result<ScalarExpr, ParseError> {
        ScalarExpr::parse(text, self)
    }

    /// Bindings with every parameter set from `pairs`; each must appear once.
    pub fn bind<I, S>(&self, pairs: I) -> Result<Bindings, ScopeError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut values = vec![None; self.params.len()];
        for (name, value) in pairs {
            let name = name.as_ref();
            let idx = self
                .param_index(name)
                .ok_or_else(|| ScopeError::UnknownParameter(name.to_string()))?;
            if values[idx].replace(value).is_some() {
                return Err(ScopeError::Rebound(name.to_string()));
            }
        }
        let values = values
            .into_iter()
            .zip(self.params.iter())
            .map(|(v, name)| v.ok_or_else(|| ScopeError::Unbound(name.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Bindings {
            names: self.params.clone(),
            values,
        })
    }
}

/// Parameter values, stored in the declaration order of their scope.
#[derive(Debug, Clone, PartialEq)]
pub struct Bindings {
    names: Arc<[String]>,
    values: Vec<f64>,
}

impl Bindings {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    /// Copy with one parameter replaced.
    pub fn with(&self, name: &str, value: f64) -> Result<Self, ScopeError> {
        let idx = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ScopeError::UnknownParameter(name.to_string()))?;
        let mut out = self.clone();
        out.values[idx] = value;
        Ok(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.values.iter().copied())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn matches(&self, scope: &Scope) -> bool {
        Arc::ptr_eq(&self.names, &scope.params) || *self.names == *scope.params
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Expression tree node. Literals are never negative; negation is a node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Coord(usize),
    Param(usize),
    Neg(Arc<Node>),
    Call(Func, Arc<Node>),
    Bin(BinOp, Arc<Node>, Arc<Node>),
    /// The exponent never depends on coordinates.
    Pow(Arc<Node>, Arc<Node>),
}

const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Bin(op, ..) => op.precedence(),
            Node::Neg(_) => PREC_NEG,
            Node::Pow(..) => PREC_POW,
            _ => PREC_ATOM,
        }
    }

    pub(crate) fn has_coords(&self) -> bool {
        match self {
            Node::Num(_) | Node::Param(_) => false,
            Node::Coord(_) => true,
            Node::Neg(a) | Node::Call(_, a) => a.has_coords(),
            Node::Bin(_, a, b) | Node::Pow(a, b) => a.has_coords() || b.has_coords(),
        }
    }

    fn as_num(&self) -> Option<f64> {
        match self {
            Node::Num(v) => Some(*v),
            Node::Neg(a) => a.as_num().map(|v| -v),
            _ => None,
        }
    }
}

/// A parsed scalar expression bound to the scope it was parsed in.
#[derive(Clone)]
pub struct ScalarExpr {
    node: Arc<Node>,
    scope: Arc<Scope>,
}

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarExpr({self})")
    }
}

impl ScalarExpr {
    pub fn parse(text: &str, scope: &Arc<Scope>) -> Result<Self, ParseError> {
        let node = parser::parse(text, scope)?;
        Ok(ScalarExpr {
            node: Arc::new(node),
            scope: scope.clone(),
        })
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn scope(&self) -> &Arc<Scope> {
        &self.scope
    }

    pub fn constant(scope: &Arc<Scope>, value: f64) -> Self {
        Self::wrap(scope, num_node(value))
    }

    pub fn coord(scope: &Arc<Scope>, idx: usize) -> Self {
        assert!(idx < scope.dim(), "coordinate index out of range");
        Self::wrap(scope, Node::Coord(idx))
    }

    pub fn param(scope: &Arc<Scope>, idx: usize) -> Self {
        assert!(idx < scope.params.len(), "parameter index out of range");
        Self::wrap(scope, Node::Param(idx))
    }

    fn wrap(scope: &Arc<Scope>, node: Node) -> Self {
        ScalarExpr {
            node: Arc::new(node),
            scope: scope.clone(),
        }
    }

    fn same_scope(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.scope, &other.scope) || self.scope == other.scope,
            "expressions from different scopes"
        );
    }

    fn binary(&self, op: BinOp, other: &Self) -> Self {
        self.same_scope(other);
        let node = diff::simplify_bin(op, self.node.clone(), other.node.clone());
        ScalarExpr {
            node,
            scope: self.scope.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binary(BinOp::Add, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binary(BinOp::Sub, other)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.binary(BinOp::Mul, other)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.binary(BinOp::Div, other)
    }

    pub fn neg(&self) -> Self {
        ScalarExpr {
            node: diff::simplify_neg(self.node.clone()),
            scope: self.scope.clone(),
        }
    }

    pub fn call(&self, func: Func) -> Self {
        ScalarExpr {
            node: Arc::new(Node::Call(func, self.node.clone())),
            scope: self.scope.clone(),
        }
    }

    /// `self ^ exponent`; panics if the exponent depends on coordinates.
    pub fn pow(&self, exponent: &Self) -> Self {
        self.same_scope(exponent);
        assert!(!exponent.node.has_coords(), "exponent must be constant");
        ScalarExpr {
            node: diff::simplify_pow(self.node.clone(), exponent.node.clone()),
            scope: self.scope.clone(),
        }
    }

    pub fn powi(&self, k: i32) -> Self {
        self.pow(&Self::constant(&self.scope, k as f64))
    }

    /// The same tree re-homed in another scope with identical names.
    ///
    /// Used to move expressions between scopes that share parameter lists.
    pub fn rescoped(&self, scope: &Arc<Scope>) -> Option<Self> {
        fn remap(node: &Node, from: &Scope, to: &Scope) -> Option<Node> {
            Some(match node {
                Node::Num(v) => Node::Num(*v),
                Node::Coord(i) => Node::Coord(to.coord_index(&from.coords[*i])?),
                Node::Param(i) => Node::Param(to.param_index(&from.params[*i])?),
                Node::Neg(a) => Node::Neg(Arc::new(remap(a, from, to)?)),
                Node::Call(f, a) => Node::Call(*f, Arc::new(remap(a, from, to)?)),
                Node::Bin(op, a, b) => Node::Bin(
                    *op,
                    Arc::new(remap(a, from, to)?),
                    Arc::new(remap(b, from, to)?),
                ),
                Node::Pow(a, b) => {
                    Node::Pow(Arc::new(remap(a, from, to)?), Arc::new(remap(b, from, to)?))
                }
            })
        }
        let node = remap(&self.node, &self.scope, scope)?;
        Some(Self::wrap(scope, node))
    }

    /// True when the expression is the literal zero.
    pub fn is_zero(&self) -> bool {
        self.node.as_num() == Some(0.0)
    }

    pub fn depends_on_coords(&self) -> bool {
        self.node.has_coords()
    }

    /// Symbolic partial derivative with respect to coordinate `idx`.
    pub fn derivative(&self, idx: usize) -> Self {
        assert!(idx < self.scope.dim(), "coordinate index out of range");
        ScalarExpr {
            node: diff::derivative(&self.node, idx),
            scope: self.scope.clone(),
        }
    }

    fn check(&self, pt: &[f64], binds: &Bindings) -> Result<(), EvalError> {
        if pt.len() != self.scope.dim() {
            return Err(EvalError::Dimension {
                expected: self.scope.dim(),
                got: pt.len(),
            });
        }
        if !binds.matches(&self.scope) {
            return Err(EvalError::ForeignBindings);
        }
        Ok(())
    }

    pub fn eval(&self, pt: &[f64], binds: &Bindings) -> Result<f64, EvalError> {
        self.check(pt, binds)?;
        eval_node::<f64>(&self.node, pt, &binds.values)
    }

    /// First-order jet: value and gradient.
    pub fn eval_jet1(&self, pt: &[f64], binds: &Bindings) -> Result<Jet1, EvalError> {
        self.check(pt, binds)?;
        eval_node::<Jet1>(&self.node, pt, &binds.values)
    }

    /// Value, gradient and Hessian at `pt`, exact up to rounding.
    pub fn eval_jet2(&self, pt: &[f64], binds: &Bindings) -> Result<Jet2, EvalError> {
        self.check(pt, binds)?;
        eval_node::<Jet2>(&self.node, pt, &binds.values)
    }
}

/// Canonical literal: negative values become a negation node.
pub(crate) fn num_node(value: f64) -> Node {
    assert!(value.is_finite(), "non-finite literal");
    if value < 0.0 {
        Node::Neg(Arc::new(Node::Num(-value)))
    } else {
        // folds -0.0 into 0.0
        Node::Num(value.abs())
    }
}

fn constant_value(node: &Node, params: &[f64]) -> Result<f64, EvalError> {
    eval_node::<f64>(node, &[], params)
}

fn eval_node<T: JetScalar>(node: &Node, pt: &[f64], params: &[f64]) -> Result<T, EvalError> {
    let n = pt.len();
    Ok(match node {
        Node::Num(v) => T::constant(*v, n),
        Node::Coord(i) => T::variable(pt[*i], *i, n),
        Node::Param(i) => T::constant(params[*i], n),
        Node::Neg(a) => eval_node::<T>(a, pt, params)?.neg(),
        Node::Bin(op, a, b) => {
            let a = eval_node::<T>(a, pt, params)?;
            let b = eval_node::<T>(b, pt, params)?;
            match op {
                BinOp::Add => a.add(&b),
                BinOp::Sub => a.sub(&b),
                BinOp::Mul => a.mul(&b),
                BinOp::Div => {
                    if b.value() == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    a.div(&b)
                }
            }
        }
        Node::Call(func, a) => {
            let a = eval_node::<T>(a, pt, params)?;
            let x = a.value();
            match func {
                Func::Sin => {
                    let (s, c) = (x.sin(), x.cos());
                    a.chain(s, c, -s)
                }
                Func::Cos => {
                    let (s, c) = (x.sin(), x.cos());
                    a.chain(c, -s, -c)
                }
                Func::Exp => {
                    let e = x.exp();
                    a.chain(e, e, e)
                }
                Func::Log => {
                    if x <= 0.0 {
                        return Err(EvalError::Domain { op: "log", arg: x });
                    }
                    a.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
                }
                Func::Sqrt => {
                    if x < 0.0 || (x == 0.0 && T::ORDER > 0) {
                        return Err(EvalError::Domain { op: "sqrt", arg: x });
                    }
                    let r = x.sqrt();
                    a.chain(r, 0.5 / r, -0.25 / (r * x))
                }
            }
        }
        Node::Pow(base, exponent) => {
            let e = constant_value(exponent, params)?;
            let b = eval_node::<T>(base, pt, params)?;
            let x = b.value();
            if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                let k = e as i32;
                if x == 0.0 && k < 0 {
                    return Err(EvalError::DivisionByZero);
                }
                let f0 = x.powi(k);
                let f1 = if k == 0 {
                    0.0
                } else {
                    k as f64 * x.powi(k - 1)
                };
                let f2 = if k == 0 || k == 1 {
                    0.0
                } else {
                    (k as f64) * (k as f64 - 1.0) * x.powi(k - 2)
                };
                b.chain(f0, f1, f2)
            } else {
                if x <= 0.0 {
                    return Err(EvalError::Domain { op: "pow", arg: x });
                }
                b.chain(
                    x.powf(e),
                    e * x.powf(e - 1.0),
                    e * (e - 1.0) * x.powf(e - 2.0),
                )
            }
        }
    })
}

struct Printer<'a> {
    node: &'a Node,
    scope: &'a Scope,
}

fn fmt_number(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v == 0.0 || (1e-4..1e15).contains(&v) {
        write!(f, "{v}")
    } else {
        write!(f, "{v:e}")
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrapped = |f: &mut fmt::Formatter<'_>, node: &Node, parens: bool| {
            let p = Printer {
                node,
                scope: self.scope,
            };
            if parens {
                write!(f, "({p})")
            } else {
                write!(f, "{p}")
            }
        };
        match self.node {
            Node::Num(v) => fmt_number(*v, f),
            Node::Coord(i) => f.write_str(&self.scope.coords[*i]),
            Node::Param(i) => f.write_str(&self.scope.params[*i]),
            Node::Neg(a) => {
                f.write_str("-")?;
                wrapped(f, a, a.precedence() < PREC_NEG)
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                wrapped(f, a, false)?;
                f.write_str(")")
            }
            Node::Bin(op, a, b) => {
                let p = op.precedence();
                wrapped(f, a, a.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                wrapped(f, b, b.precedence() <= p)
            }
            Node::Pow(a, b) => {
                wrapped(f, a, a.precedence() < PREC_ATOM)?;
                f.write_str("^")?;
                wrapped(f, b, b.precedence() < PREC_ATOM)
            }
        }
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer {
            node: &self.node,
            scope: &self.scope,
        }
        .fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope_xy() -> Arc<Scope> {
        Scope::new(["x", "y"], ["a", "b"]).unwrap()
    }

    #[test]
    fn scope_rejects_bad_names() {
        assert_eq!(
            Scope::new(["x", "x"], Vec::<String>::new()).unwrap_err(),
            ScopeError::Duplicate("x".into())
        );
        assert_eq!(
            Scope::new(["sin"], Vec::<String>::new()).unwrap_err(),
            ScopeError::Reserved("sin".into())
        );
        assert!(Scope::new(["1x"], Vec::<String>::new()).is_err());
    }

    #[test]
    fn bindings_must_be_complete_and_unique() {
        let s = scope_xy();
        assert!(s.bind([("a", 1.0), ("b", 2.0)]).is_ok());
        assert_eq!(
            s.bind([("a", 1.0)]).unwrap_err(),
            ScopeError::Unbound("b".into())
        );
        assert_eq!(
            s.bind([("a", 1.0), ("a", 2.0), ("b", 0.0)]).unwrap_err(),
            ScopeError::Rebound("a".into())
        );
        assert_eq!(
            s.bind([("c", 1.0)]).unwrap_err(),
            ScopeError::UnknownParameter("c".into())
        );
    }

    #[test]
    fn eval_examples() {
        let s = Scope::new(["t", "theta"], Vec::<String>::new()).unwrap();
        let b = s.bind(Vec::<(&str, f64)>::new()).unwrap();
        let e = s.parse("sin(theta)*cos(theta)").unwrap();
        assert_eq!(e.eval(&[0.3, 0.0], &b).unwrap(), 0.0);

        let s = Scope::new(["x"], ["a"]).unwrap();
        let b = s.bind([("a", 1.0)]).unwrap();
        let e = s.parse("exp(a*x)").unwrap();
        assert_eq!(e.eval(&[1.0], &b).unwrap(), std::f64::consts::E);
        let e = s.parse("log(x)").unwrap();
        assert_eq!(
            e.eval(&[-1.0], &b).unwrap_err(),
            EvalError::Domain {
                op: "log",
                arg: -1.0
            }
        );
    }

    #[test]
    fn eval_domain_errors() {
        let s = Scope::new(["x"], Vec::<String>::new()).unwrap();
        let b = s.bind(Vec::<(&str, f64)>::new()).unwrap();
        assert_eq!(
            s.parse("1/x").unwrap().eval(&[0.0], &b).unwrap_err(),
            EvalError::DivisionByZero
        );
        assert!(matches!(
            s.parse("sqrt(x)").unwrap().eval(&[-2.0], &b),
            Err(EvalError::Domain { op: "sqrt", .. })
        ));
        assert!(matches!(
            s.parse("x^0.5").unwrap().eval(&[-2.0], &b),
            Err(EvalError::Domain { op: "pow", .. })
        ));
        assert_eq!(
            s.parse("x^-2").unwrap().eval(&[0.0], &b).unwrap_err(),
            EvalError::DivisionByZero
        );
        assert_eq!(s.parse("x^3").unwrap().eval(&[-2.0], &b).unwrap(), -8.0);
        assert_eq!(
            s.parse("x").unwrap().eval(&[1.0, 2.0], &b).unwrap_err(),
            EvalError::Dimension {
                expected: 1,
                got: 2
            }
        );
    }

    #[test]
    fn foreign_bindings_are_rejected() {
        let s1 = Scope::new(["x"], ["a"]).unwrap();
        let s2 = Scope::new(["x"], ["c"]).unwrap();
        let b2 = s2.bind([("c", 1.0)]).unwrap();
        assert_eq!(
            s1.parse("a*x").unwrap().eval(&[1.0], &b2).unwrap_err(),
            EvalError::ForeignBindings
        );
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let s = Scope::new(["x"], Vec::<String>::new()).unwrap();
        let b = s.bind(Vec::<(&str, f64)>::new()).unwrap();
        assert_eq!(s.parse("-x^2").unwrap().eval(&[3.0], &b).unwrap(), -9.0);
        assert_eq!(s.parse("(-x)^2").unwrap().eval(&[3.0], &b).unwrap(), 9.0);
        assert_eq!(s.parse("2^-1").unwrap().eval(&[0.0], &b).unwrap(), 0.5);
    }

    #[test]
    fn printing_is_canonical() {
        let s = scope_xy();
        for (src, printed) in [
            ("a-(b-x)", "a - (b - x)"),
            ("(a-b)-x", "a - b - x"),
            ("a+(b+x)", "a + (b + x)"),
            ("-x^2", "-x^2"),
            ("(-x)^2", "(-x)^2"),
            ("x^-1", "x^(-1)"),
            ("(x^2)^3", "(x^2)^3"),
            ("--x", "--x"),
            ("-(x*y)", "-(x * y)"),
            ("0.00001*x", "1e-5 * x"),
            ("exp(a*x+b*y)", "exp(a * x + b * y)"),
        ] {
            let e = s.parse(src).unwrap();
            assert_eq!(e.to_string(), printed, "{src}");
            let again = s.parse(&e.to_string()).unwrap();
            assert_eq!(again.node(), e.node(), "{src}");
        }
    }

    #[test]
    fn constant_literals_are_canonical() {
        let s = scope_xy();
        let c = ScalarExpr::constant(&s, -2.5);
        assert_eq!(c.to_string(), "-2.5");
        assert_eq!(s.parse(&c.to_string()).unwrap(), c);
    }
}
