//! Geometric input data on the universal cover: metrics, 1-forms and the
//! affine deck maps whose quotient is the manifold of interest.

use std::ops::Deref;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::{Bindings, ScalarExpr, Scope};
use crate::tolerances;

/// A point of the cover `ℝⁿ` in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub fn offset(&self, dir: &[f64], t: f64) -> Point {
        Point(self.0.iter().zip(dir).map(|(x, d)| x + t * d).collect())
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<DVector<f64>> for Point {
    fn from(v: DVector<f64>) -> Self {
        Point(v.as_slice().to_vec())
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

/// Counts of negative, zero and positive eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Declared signature `(n_minus, n_plus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub negative: usize,
    pub positive: usize,
}

impl Signature {
    pub fn riemannian(dim: usize) -> Self {
        Signature {
            negative: 0,
            positive: dim,
        }
    }

    pub fn lorentzian(dim: usize) -> Self {
        Signature {
            negative: 1,
            positive: dim - 1,
        }
    }
}

pub fn inertia(m: &DMatrix<f64>) -> Inertia {
    let eig = m.clone().symmetric_eigenvalues();
    let mut out = Inertia {
        negative: 0,
        zero: 0,
        positive: 0,
    };
    for &ev in eig.iter() {
        if ev.abs() < tolerances::SIGNATURE_ZERO {
            out.zero += 1;
        } else if ev < 0.0 {
            out.negative += 1;
        } else {
            out.positive += 1;
        }
    }
    out
}

/// `|det m|` divided by the product of row norms; zero iff singular, at most one.
pub fn relative_determinant(m: &DMatrix<f64>) -> f64 {
    let scale: f64 = m.row_iter().map(|r| r.norm()).product();
    if scale == 0.0 {
        0.0
    } else {
        m.determinant().abs() / scale
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

#[inline]
fn packed(i: usize, j: usize, n: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

/// Metric value with first and (optionally) second coordinate derivatives.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub value: DMatrix<f64>,
    /// `first[m]` is `∂_m g`.
    pub first: Vec<DMatrix<f64>>,
    /// `second[m * n + p]` is `∂_m ∂_p g`; empty for first-order jets.
    pub second: Vec<DMatrix<f64>>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.value.nrows()
    }

    pub fn second(&self, m: usize, p: usize) -> &DMatrix<f64> {
        &self.second[m * self.dim() + p]
    }
}

/// A symmetric bilinear form field given by expressions.
///
/// Components are stored once per unordered index pair, so `(i, j)` and
/// `(j, i)` are the same expression object.
#[derive(Debug, Clone)]
pub struct MetricField {
    scope: Arc<Scope>,
    comps: Vec<ScalarExpr>,
    signature: Signature,
}

impl MetricField {
    /// From the upper triangle, row by row: `upper[i]` holds columns `i..n`.
    pub fn from_upper(
        scope: &Arc<Scope>,
        upper: Vec<Vec<ScalarExpr>>,
        signature: Signature,
    ) -> Result<Self> {
        let n = scope.dim();
        check_dim(n, upper.len())?;
        if signature.negative + signature.positive != n {
            return Err(Error::Invalid(format!(
                "signature ({}, {}) does not add up to dimension {n}",
                signature.negative, signature.positive
            )));
        }
        let mut comps = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in upper.into_iter().enumerate() {
            check_dim(n - i, row.len())?;
            comps.extend(row);
        }
        Ok(MetricField {
            scope: scope.clone(),
            comps,
            signature,
        })
    }

    /// Parse upper-triangle component strings.
    pub fn parse_upper<S: AsRef<str>>(
        scope: &Arc<Scope>,
        upper: &[Vec<S>],
        signature: Signature,
    ) -> Result<Self> {
        let rows = upper
            .iter()
            .map(|row| row.iter().map(|s| scope.parse(s.as_ref())).collect())
            .collect::<std::result::Result<Vec<Vec<_>>, _>>()?;
        Self::from_upper(scope, rows, signature)
    }

    pub fn diagonal(
        scope: &Arc<Scope>,
        diag: Vec<ScalarExpr>,
        signature: Signature,
    ) -> Result<Self> {
        let n = scope.dim();
        check_dim(n, diag.len())?;
        let zero = ScalarExpr::constant(scope, 0.0);
        let upper = diag
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                let mut row = vec![d];
                row.extend(std::iter::repeat_n(zero.clone(), n - i - 1));
                row
            })
            .collect();
        Self::from_upper(scope, upper, signature)
    }

    pub fn scope(&self) -> &Arc<Scope> {
        &self.scope
    }

    pub fn dim(&self) -> usize {
        self.scope.dim()
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.comps[packed(i, j, self.dim())]
    }

    /// `factor · g`, componentwise. Panics if `factor` is from another scope.
    pub fn scaled(&self, factor: &ScalarExpr) -> MetricField {
        self.map(|c| factor.mul(c))
    }

    /// `self + other`, componentwise, keeping this field's declared signature.
    pub fn plus(&self, other: &MetricField) -> Result<MetricField> {
        check_dim(self.dim(), other.dim())?;
        let mut out = self.clone();
        for (c, o) in out.comps.iter_mut().zip(&other.comps) {
            *c = c.add(o);
        }
        Ok(out)
    }

    pub fn with_signature(mut self, signature: Signature) -> Self {
        self.signature = signature;
        self
    }

    fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> MetricField {
        MetricField {
            scope: self.scope.clone(),
            comps: self.comps.iter().map(f).collect(),
            signature: self.signature,
        }
    }

    /// Evaluated matrix with no singularity or signature checks.
    pub fn matrix_at(&self, pt: &[f64], binds: &Bindings) -> Result<DMatrix<f64>> {
        let n = self.dim();
        check_dim(n, pt.len())?;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.component(i, j).eval(pt, binds)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Evaluated matrix; fails if singular or of the wrong signature.
    pub fn metric_at(&self, pt: &[f64], binds: &Bindings) -> Result<DMatrix<f64>> {
        let m = self.matrix_at(pt, binds)?;
        self.validate(&m, pt)?;
        Ok(m)
    }

    fn validate(&self, m: &DMatrix<f64>, pt: &[f64]) -> Result<()> {
        let rel = relative_determinant(m);
        if rel < tolerances::SINGULAR_RELATIVE_DET {
            return Err(Error::Singular {
                point: pt.to_vec(),
                relative_det: rel,
            });
        }
        let found = inertia(m);
        if found.zero != 0
            || found.negative != self.signature.negative
            || found.positive != self.signature.positive
        {
            return Err(Error::Signature {
                point: pt.to_vec(),
                negative: found.negative,
                zero: found.zero,
                positive: found.positive,
                declared_negative: self.signature.negative,
                declared_positive: self.signature.positive,
            });
        }
        Ok(())
    }

    pub fn inverse_metric_at(&self, pt: &[f64], binds: &Bindings) -> Result<DMatrix<f64>> {
        let m = self.metric_at(pt, binds)?;
        invert(&m, pt)
    }

    fn jet(&self, pt: &[f64], binds: &Bindings, second: bool) -> Result<MetricJet> {
        let n = self.dim();
        check_dim(n, pt.len())?;
        let mut value = DMatrix::zeros(n, n);
        let mut first = vec![DMatrix::zeros(n, n); n];
        let mut sec = if second {
            vec![DMatrix::zeros(n, n); n * n]
        } else {
            Vec::new()
        };
        for i in 0..n {
            for j in i..n {
                let c = self.component(i, j);
                if second {
                    let jet = c.eval_jet2(pt, binds)?;
                    set_sym(&mut value, i, j, jet.value);
                    for m in 0..n {
                        set_sym(&mut first[m], i, j, jet.grad[m]);
                        for p in 0..n {
                            set_sym(&mut sec[m * n + p], i, j, jet.hess(m, p));
                        }
                    }
                } else {
                    let jet = c.eval_jet1(pt, binds)?;
                    set_sym(&mut value, i, j, jet.value);
                    for m in 0..n {
                        set_sym(&mut first[m], i, j, jet.grad[m]);
                    }
                }
            }
        }
        Ok(MetricJet {
            value,
            first,
            second: sec,
        })
    }

    /// Value and first derivatives.
    pub fn jet1_at(&self, pt: &[f64], binds: &Bindings) -> Result<MetricJet> {
        self.jet(pt, binds, false)
    }

    /// Value, first and second derivatives.
    pub fn jet2_at(&self, pt: &[f64], binds: &Bindings) -> Result<MetricJet> {
        self.jet(pt, binds, true)
    }

    /// Max-norm of `φ*g − g` at `pt`.
    pub fn deck_residual(&self, deck: &DeckMap, pt: &[f64], binds: &Bindings) -> Result<f64> {
        let here = self.matrix_at(pt, binds)?;
        let there = self.matrix_at(&deck.apply(pt), binds)?;
        Ok(max_abs(&(deck.pull_back_bilinear(&there) - here)))
    }
}

fn set_sym(m: &mut DMatrix<f64>, i: usize, j: usize, v: f64) {
    m[(i, j)] = v;
    m[(j, i)] = v;
}

pub(crate) fn invert(m: &DMatrix<f64>, pt: &[f64]) -> Result<DMatrix<f64>> {
    let rel = relative_determinant(m);
    if rel < tolerances::SINGULAR_RELATIVE_DET {
        return Err(Error::Singular {
            point: pt.to_vec(),
            relative_det: rel,
        });
    }
    let inv = m.clone().try_inverse().ok_or_else(|| Error::Singular {
        point: pt.to_vec(),
        relative_det: rel,
    })?;
    // symmetrize away rounding
    Ok((&inv + inv.transpose()) * 0.5)
}

/// A covector field given by expressions.
#[derive(Debug, Clone)]
pub struct OneFormField {
    scope: Arc<Scope>,
    comps: Vec<ScalarExpr>,
}

impl OneFormField {
    pub fn new(scope: &Arc<Scope>, comps: Vec<ScalarExpr>) -> Result<Self> {
        check_dim(scope.dim(), comps.len())?;
        Ok(OneFormField {
            scope: scope.clone(),
            comps,
        })
    }

    pub fn parse<S: AsRef<str>>(scope: &Arc<Scope>, comps: &[S]) -> Result<Self> {
        let comps = comps
            .iter()
            .map(|s| scope.parse(s.as_ref()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(scope, comps)
    }

    pub fn zero(scope: &Arc<Scope>) -> Self {
        OneFormField {
            scope: scope.clone(),
            comps: vec![ScalarExpr::constant(scope, 0.0); scope.dim()],
        }
    }

    /// The differential `df`.
    pub fn differential(f: &ScalarExpr) -> Self {
        let scope = f.scope().clone();
        let comps = (0..scope.dim()).map(|i| f.derivative(i)).collect();
        OneFormField { scope, comps }
    }

    /// `d log f = df / f`, for `f` that never vanishes.
    pub fn dlog(f: &ScalarExpr) -> Self {
        let scope = f.scope().clone();
        let comps = (0..scope.dim()).map(|i| f.derivative(i).div(f)).collect();
        OneFormField { scope, comps }
    }

    pub fn plus(&self, other: &OneFormField) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(OneFormField {
            scope: self.scope.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn scope(&self) -> &Arc<Scope> {
        &self.scope
    }

    pub fn dim(&self) -> usize {
        self.scope.dim()
    }

    pub fn component(&self, i: usize) -> &ScalarExpr {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(ScalarExpr::is_zero)
    }

    pub fn at(&self, pt: &[f64], binds: &Bindings) -> Result<DVector<f64>> {
        check_dim(self.dim(), pt.len())?;
        let vals = self
            .comps
            .iter()
            .map(|c| c.eval(pt, binds))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(DVector::from_vec(vals))
    }

    /// Components and their derivatives: `d[(i, m)] = ∂_m Ψ_i`.
    pub fn jet1_at(&self, pt: &[f64], binds: &Bindings) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let n = self.dim();
        check_dim(n, pt.len())?;
        let mut value = DVector::zeros(n);
        let mut d = DMatrix::zeros(n, n);
        for (i, c) in self.comps.iter().enumerate() {
            let jet = c.eval_jet1(pt, binds)?;
            value[i] = jet.value;
            for m in 0..n {
                d[(i, m)] = jet.grad[m];
            }
        }
        Ok((value, d))
    }

    /// `(dΨ)_{ij} = ∂_i Ψ_j − ∂_j Ψ_i`.
    pub fn closedness_residual(&self, pt: &[f64], binds: &Bindings) -> Result<DMatrix<f64>> {
        let (_, d) = self.jet1_at(pt, binds)?;
        Ok(d.transpose() - d)
    }

    /// Max-norm of `φ*Ψ − Ψ` at `pt`.
    pub fn deck_residual(&self, deck: &DeckMap, pt: &[f64], binds: &Bindings) -> Result<f64> {
        let here = self.at(pt, binds)?;
        let there = self.at(&deck.apply(pt), binds)?;
        Ok((deck.pull_back_covector(&there) - here).amax())
    }
}

/// Either kind of tensor field, for pullback residuals.
#[derive(Debug, Clone, Copy)]
pub enum FieldRef<'a> {
    Metric(&'a MetricField),
    OneForm(&'a OneFormField),
}

/// Max-norm of `φ*field(pt) − field(pt)`.
pub fn deck_invariance_residual(
    field: FieldRef<'_>,
    deck: &DeckMap,
    pt: &[f64],
    binds: &Bindings,
) -> Result<f64> {
    match field {
        FieldRef::Metric(g) => g.deck_residual(deck, pt, binds),
        FieldRef::OneForm(w) => w.deck_residual(deck, pt, binds),
    }
}

/// The affine map `x ↦ A x + b` of the cover.
#[derive(Debug, Clone, PartialEq)]
pub struct DeckMap {
    linear: DMatrix<f64>,
    translation: DVector<f64>,
    inverse_linear: DMatrix<f64>,
}

impl DeckMap {
    pub fn new(linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = linear.nrows();
        check_dim(n, linear.ncols())?;
        check_dim(n, translation.len())?;
        if linear
            .iter()
            .chain(translation.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::Invalid("deck map has non-finite entries".into()));
        }
        if relative_determinant(&linear) < tolerances::SINGULAR_RELATIVE_DET {
            return Err(Error::Invalid("deck map linear part is singular".into()));
        }
        let inverse_linear = linear
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Invalid("deck map linear part is singular".into()))?;
        Ok(DeckMap {
            linear,
            translation,
            inverse_linear,
        })
    }

    pub fn identity(n: usize) -> Self {
        DeckMap {
            linear: DMatrix::identity(n, n),
            translation: DVector::zeros(n),
            inverse_linear: DMatrix::identity(n, n),
        }
    }

    pub fn translation(shift: &[f64]) -> Self {
        let n = shift.len();
        DeckMap {
            linear: DMatrix::identity(n, n),
            translation: DVector::from_column_slice(shift),
            inverse_linear: DMatrix::identity(n, n),
        }
    }

    /// Translation followed by a sign flip of the listed coordinates.
    pub fn translation_with_flips(shift: &[f64], flips: &[usize]) -> Self {
        let n = shift.len();
        let mut diag = DVector::from_element(n, 1.0);
        for &i in flips {
            diag[i] = -1.0;
        }
        let linear = DMatrix::from_diagonal(&diag);
        DeckMap {
            inverse_linear: linear.clone(),
            linear,
            translation: DVector::from_column_slice(shift),
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn inverse_linear(&self) -> &DMatrix<f64> {
        &self.inverse_linear
    }

    pub fn translation_part(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn apply(&self, pt: &[f64]) -> Point {
        let x = DVector::from_column_slice(pt);
        (&self.linear * x + &self.translation).into()
    }

    /// Pushforward of a tangent vector: `A v`.
    pub fn push_vector(&self, v: &[f64]) -> Vec<f64> {
        (&self.linear * DVector::from_column_slice(v))
            .as_slice()
            .to_vec()
    }

    /// `Aᵀ B A`.
    pub fn pull_back_bilinear(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.linear.transpose() * b * &self.linear
    }

    /// `Aᵀ w`.
    pub fn pull_back_covector(&self, w: &DVector<f64>) -> DVector<f64> {
        self.linear.transpose() * w
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &DeckMap) -> DeckMap {
        DeckMap {
            linear: &other.linear * &self.linear,
            translation: &other.linear * &self.translation + &other.translation,
            inverse_linear: &self.inverse_linear * &other.inverse_linear,
        }
    }

    pub fn inverse(&self) -> DeckMap {
        DeckMap {
            linear: self.inverse_linear.clone(),
            translation: -(&self.inverse_linear * &self.translation),
            inverse_linear: self.linear.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.translation.iter().all(|&x| x == 0.0)
            && self.linear == DMatrix::identity(self.dim(), self.dim())
    }
}

/// The cover `ℝⁿ` with a set of generating deck maps.
#[derive(Debug, Clone)]
pub struct QuotientSpec {
    scope: Arc<Scope>,
    generators: Vec<DeckMap>,
    basepoint: Point,
}

impl QuotientSpec {
    pub fn new(scope: &Arc<Scope>, generators: Vec<DeckMap>, basepoint: Point) -> Result<Self> {
        let n = scope.dim();
        check_dim(n, basepoint.dim())?;
        for g in &generators {
            check_dim(n, g.dim())?;
        }
        Ok(QuotientSpec {
            scope: scope.clone(),
            generators,
            basepoint,
        })
    }

    pub fn dim(&self) -> usize {
        self.scope.dim()
    }

    pub fn scope(&self) -> &Arc<Scope> {
        &self.scope
    }

    pub fn coord_names(&self) -> &[String] {
        self.scope.coords()
    }

    pub fn generators(&self) -> &[DeckMap] {
        &self.generators
    }

    pub fn generator(&self, idx: usize) -> Result<&DeckMap> {
        self.generators.get(idx).ok_or_else(|| {
            Error::Invalid(format!(
                "generator index {idx} out of range (have {})",
                self.generators.len()
            ))
        })
    }

    /// Composite deck map of a word; the first letter is applied first.
    pub fn word(&self, letters: &[usize]) -> Result<DeckMap> {
        let mut acc = DeckMap::identity(self.dim());
        for &l in letters {
            acc = acc.then(self.generator(l)?);
        }
        Ok(acc)
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn no_params(coords: &[&str]) -> (Arc<Scope>, Bindings) {
        let s = Scope::new(coords.iter().copied(), Vec::<String>::new()).unwrap();
        let b = s.bind(Vec::<(&str, f64)>::new()).unwrap();
        (s, b)
    }

    fn g1(s: &Arc<Scope>) -> MetricField {
        MetricField::parse_upper(
            s,
            &[vec!["-cos(theta)", "sin(theta)"], vec!["cos(theta)"]],
            Signature::lorentzian(2),
        )
        .unwrap()
    }

    #[test]
    fn flat_metric_is_identity() {
        let (s, b) = no_params(&["x", "y", "z"]);
        let one = ScalarExpr::constant(&s, 1.0);
        let g = MetricField::diagonal(&s, vec![one; 3], Signature::riemannian(3)).unwrap();
        assert_eq!(
            g.metric_at(&[0.3, -2.0, 5.0], &b).unwrap(),
            DMatrix::identity(3, 3)
        );
        assert_eq!(
            g.inverse_metric_at(&[0.3, -2.0, 5.0], &b).unwrap(),
            DMatrix::identity(3, 3)
        );
    }

    #[test]
    fn symmetric_components_share_expression() {
        let (s, _) = no_params(&["t", "theta"]);
        let g = g1(&s);
        assert!(std::ptr::eq(g.component(0, 1), g.component(1, 0)));
    }

    #[test]
    fn g1_values() {
        let (s, b) = no_params(&["t", "theta"]);
        let g = g1(&s);
        let m0 = g.metric_at(&[0.0, 0.0], &b).unwrap();
        assert_eq!(m0, DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]));
        let m = g.metric_at(&[0.0, FRAC_PI_2], &b).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((&m - &want).amax() < 1e-15);
        assert!((m.determinant() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn g1_is_its_own_inverse() {
        let (s, b) = no_params(&["t", "theta"]);
        let g = g1(&s);
        for th in [0.0, 0.4, 1.3, 2.9] {
            let m = g.metric_at(&[0.0, th], &b).unwrap();
            // 2x2 inverse by cofactors
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let oracle = DMatrix::from_row_slice(
                2,
                2,
                &[
                    m[(1, 1)] / det,
                    -m[(0, 1)] / det,
                    -m[(1, 0)] / det,
                    m[(0, 0)] / det,
                ],
            );
            let inv = g.inverse_metric_at(&[0.0, th], &b).unwrap();
            assert!((&inv - &oracle).amax() < 1e-14);
            assert!((&inv - &m).amax() < 1e-14);
            assert!((&inv * &m - DMatrix::identity(2, 2)).amax() < 1e-12);
        }
    }

    #[test]
    fn conformal_inverse() {
        let s = Scope::new(["x", "y", "z"], ["a"]).unwrap();
        let b = s.bind([("a", 1.0)]).unwrap();
        let f = s.parse("exp(a*x)").unwrap();
        let g = MetricField::diagonal(&s, vec![f; 3], Signature::riemannian(3)).unwrap();
        let x = 0.7;
        let inv = g.inverse_metric_at(&[x, 0.0, 0.0], &b).unwrap();
        let want = DMatrix::identity(3, 3) * (-x).exp();
        assert!((&inv - &want).amax() < 1e-14);
    }

    #[test]
    fn singular_and_signature_errors() {
        let (s, b) = no_params(&["x", "y"]);
        let g =
            MetricField::parse_upper(&s, &[vec!["1", "1"], vec!["1"]], Signature::riemannian(2))
                .unwrap();
        assert!(matches!(
            g.metric_at(&[0.0, 0.0], &b),
            Err(Error::Singular { .. })
        ));
        let g =
            MetricField::parse_upper(&s, &[vec!["-1", "0"], vec!["1"]], Signature::riemannian(2))
                .unwrap();
        assert!(matches!(
            g.metric_at(&[0.0, 0.0], &b),
            Err(Error::Signature { .. })
        ));
    }

    #[test]
    fn closedness_examples() {
        let s = Scope::new(["x", "y", "z"], ["a", "b"]).unwrap();
        let bind = s.bind([("a", 1.0), ("b", 2.0)]).unwrap();
        let pt = [0.3, -0.8, 1.1];
        let w = OneFormField::parse(&s, &["-a", "-b", "0"]).unwrap();
        assert_eq!(w.closedness_residual(&pt, &bind).unwrap().amax(), 0.0);
        let alpha = s.parse("2 + sin(x)*cos(y)").unwrap();
        let w = OneFormField::dlog(&alpha);
        assert!(w.closedness_residual(&pt, &bind).unwrap().amax() < 1e-12);
        let w = OneFormField::parse(&s, &["0", "x", "0"]).unwrap();
        let d = w.closedness_residual(&pt, &bind).unwrap();
        assert_eq!(d[(0, 1)], 1.0);
        assert_eq!(d[(1, 0)], -1.0);
    }

    #[test]
    fn deck_residual_examples() {
        let (s, b) = no_params(&["t", "theta", "x", "y"]);
        let g = MetricField::parse_upper(
            &s,
            &[
                vec!["-cos(theta)", "sin(theta)", "0", "0"],
                vec!["cos(theta)", "0", "0"],
                vec!["1", "0"],
                vec!["1"],
            ],
            Signature::lorentzian(4),
        )
        .unwrap();
        let shift = DeckMap::translation(&[0.0, PI, 0.0, 0.0]);
        let pt = [0.2, 0.4, 1.0, -1.0];
        let res = g.deck_residual(&shift, &pt, &b).unwrap();
        let g1_max = 0.4f64.cos().abs().max(0.4f64.sin().abs());
        assert!((res - 2.0 * g1_max).abs() < 1e-12);

        let w = OneFormField::parse(&s, &["1", "-2", "3", "0.5"]).unwrap();
        assert_eq!(
            deck_invariance_residual(FieldRef::OneForm(&w), &shift, &pt, &b).unwrap(),
            0.0
        );
    }

    #[test]
    fn deck_map_algebra() {
        let a = DeckMap::translation_with_flips(&[0.0, 1.0, 2.0], &[2]);
        let b = DeckMap::translation(&[3.0, 0.0, 0.0]);
        let pt = [0.5, -1.0, 4.0];
        let ab = a.then(&b);
        assert_eq!(ab.apply(&pt), b.apply(&a.apply(&pt)));
        let back = a.inverse().apply(&a.apply(&pt));
        assert!(back.iter().zip(&pt).all(|(x, y)| (x - y).abs() < 1e-15));
        assert!(a.then(&a.inverse()).is_identity());
        assert!(DeckMap::new(DMatrix::zeros(3, 3), DVector::zeros(3)).is_err());
    }
}
