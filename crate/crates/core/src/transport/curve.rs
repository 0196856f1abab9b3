use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Bindings, ScalarExpr, Scope};
use crate::fields::Point;

#[derive(Debug, Clone)]
enum Shape {
    /// Coordinates as expressions of a single curve parameter over `[s0, s1]`.
    Expr {
        comps: Vec<ScalarExpr>,
        s0: f64,
        s1: f64,
    },
    /// Piecewise linear; piece `k` runs over `s ∈ [k, k + 1]`.
    Polyline(Vec<Point>),
}

/// A piecewise smooth curve in cover coordinates.
#[derive(Debug, Clone)]
pub struct Curve {
    shape: Shape,
    reversed: bool,
}

impl Curve {
    pub fn segment(from: Point, to: Point) -> Self {
        Self::polyline(vec![from, to]).expect("segment endpoints")
    }

    pub fn polyline(points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Invalid(
                "a polyline needs at least two points".into(),
            ));
        }
        let n = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: p.dim(),
            });
        }
        Ok(Curve {
            shape: Shape::Polyline(points),
            reversed: false,
        })
    }

    /// Curve `s ↦ (comps[0](s), …)`; the expressions' scope has exactly one
    /// coordinate, the curve parameter.
    pub fn from_exprs(comps: Vec<ScalarExpr>, s0: f64, s1: f64) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::Invalid("curve needs at least one component".into()));
        }
        if comps.iter().any(|c| c.scope().dim() != 1) {
            return Err(Error::Invalid(
                "curve components must depend on exactly one parameter".into(),
            ));
        }
        if !(s0.is_finite() && s1.is_finite() && s0 != s1) {
            return Err(Error::Invalid(format!("bad curve interval [{s0}, {s1}]")));
        }
        Ok(Curve {
            shape: Shape::Expr { comps, s0, s1 },
            reversed: false,
        })
    }

    /// Parse component strings in a scope `[param_name]` sharing `params_of`'s parameters.
    pub fn parse<S: AsRef<str>>(
        param_name: &str,
        comps: &[S],
        s0: f64,
        s1: f64,
        params_of: &Scope,
    ) -> Result<Self> {
        let scope: Arc<Scope> = Scope::sharing_params([param_name], params_of)?;
        let comps = comps
            .iter()
            .map(|c| scope.parse(c.as_ref()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::from_exprs(comps, s0, s1)
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Expr { comps, .. } => comps.len(),
            Shape::Polyline(p) => p[0].dim(),
        }
    }

    pub fn reversed(&self) -> Self {
        Curve {
            shape: self.shape.clone(),
            reversed: !self.reversed,
        }
    }

    /// Parameter intervals of the smooth pieces, in traversal order.
    pub fn pieces(&self) -> Vec<(f64, f64)> {
        match &self.shape {
            Shape::Expr { s0, s1, .. } => vec![(*s0, *s1)],
            Shape::Polyline(p) => (0..p.len() - 1)
                .map(|k| (k as f64, k as f64 + 1.0))
                .collect(),
        }
    }

    fn raw(&self, piece: usize, s: f64, binds: &Bindings) -> Result<(Point, Vec<f64>)> {
        match &self.shape {
            Shape::Expr { comps, .. } => {
                let mut x = Vec::with_capacity(comps.len());
                let mut v = Vec::with_capacity(comps.len());
                for c in comps {
                    let j = c.eval_jet1(&[s], binds)?;
                    x.push(j.value);
                    v.push(j.grad[0]);
                }
                Ok((Point::new(x), v))
            }
            Shape::Polyline(p) => {
                let (a, b) = (&p[piece], &p[piece + 1]);
                let t = s - piece as f64;
                let dir: Vec<f64> = b.iter().zip(a.iter()).map(|(y, x)| y - x).collect();
                Ok((a.offset(&dir, t), dir))
            }
        }
    }

    /// Point and tangent at parameter `s` on smooth piece `piece`.
    ///
    /// Parameters refer to the curve as traversed: for a reversed curve,
    /// piece 0 starts at the original end.
    pub fn eval_on_piece(
        &self,
        piece: usize,
        s: f64,
        binds: &Bindings,
    ) -> Result<(Point, Vec<f64>)> {
        if !self.reversed {
            return self.raw(piece, s, binds);
        }
        let pieces = self.raw_pieces_len();
        let raw_piece = pieces - 1 - piece;
        let (lo, hi) = match &self.shape {
            Shape::Expr { s0, s1, .. } => (*s0, *s1),
            Shape::Polyline(_) => (piece as f64, piece as f64 + 1.0),
        };
        let raw_s = match &self.shape {
            Shape::Expr { .. } => lo + hi - s,
            Shape::Polyline(_) => raw_piece as f64 + (hi - s),
        };
        let (x, v) = self.raw(raw_piece, raw_s, binds)?;
        Ok((x, v.into_iter().map(|c| -c).collect()))
    }

    fn raw_pieces_len(&self) -> usize {
        match &self.shape {
            Shape::Expr { .. } => 1,
            Shape::Polyline(p) => p.len() - 1,
        }
    }

    pub fn start(&self, binds: &Bindings) -> Result<Point> {
        let (a, _) = self.pieces()[0];
        Ok(self.eval_on_piece(0, a, binds)?.0)
    }

    pub fn end(&self, binds: &Bindings) -> Result<Point> {
        let pieces = self.pieces();
        let last = pieces.len() - 1;
        Ok(self.eval_on_piece(last, pieces[last].1, binds)?.0)
    }

    /// True for a polyline whose points all coincide.
    pub fn is_degenerate(&self) -> bool {
        match &self.shape {
            Shape::Polyline(p) => p.windows(2).all(|w| w[0] == w[1]),
            Shape::Expr { .. } => false,
        }
    }
}
