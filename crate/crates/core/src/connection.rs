//! Symmetric connections: Levi-Civita of a metric, the Weyl-type connection
//! fixed by `∇h = h ⊗ Ψ`, and explicit Christoffel tables.
//!
//! For a metric `h` and closed 1-form `Ψ` the connection is
//!
//! ```text
//! Γ^k_ij = LC(h)^k_ij − ½ (δ^k_i Ψ_j + δ^k_j Ψ_i − h_ij Ψ^k),   Ψ^k = h^kl Ψ_l
//! ```
//!
//! which is the Levi-Civita connection of `μ⁻¹h` wherever `Ψ = dlog μ`.
//! [`nabla_h_residual`] checks the defining equation directly, so the
//! closed form is never trusted on its own.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::{Bindings, ScalarExpr, Scope};
use crate::fields::{invert, DeckMap, MetricField, MetricJet, OneFormField, Point};
use crate::tolerances;
use crate::transport::{line_integral, Curve};

/// Christoffel symbols `Γ^k_ij` at one point, symmetric in `i, j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Christoffel {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    /// Sets both `Γ^k_ij` and `Γ^k_ji`.
    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.data[(k * n + i) * n + j] = v;
        self.data[(k * n + j) * n + i] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    /// Largest `|Γ^k_ij − Γ^k_ji|`; zero for every connection built here.
    pub fn torsion(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }

    /// `Γ^k_ij u^i v^j`.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..n {
                    if u[i] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        acc += self.get(k, i, j) * u[i] * v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// `M^l_i = Γ^l_ik u^k` as a matrix indexed `(l, i)`.
    pub fn along(&self, u: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |l, i| (0..n).map(|k| self.get(l, i, k) * u[k]).sum())
    }

    /// Nonzero entries with `i <= j`, above `threshold` in magnitude.
    pub fn nonzero(&self, threshold: f64) -> Vec<(usize, usize, usize, f64)> {
        let n = self.n;
        let mut out = Vec::new();
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v = self.get(k, i, j);
                    if v.abs() > threshold {
                        out.push((k, i, j, v));
                    }
                }
            }
        }
        out
    }

    /// The connection transported by the affine map `x ↦ A x + b`:
    /// `A^k_l Γ^l_mn (A⁻¹)^m_i (A⁻¹)^n_j`.
    pub fn pushed_forward(&self, deck: &DeckMap) -> Christoffel {
        let n = self.n;
        let a = deck.linear();
        let ai = deck.inverse_linear();
        let mut out = Christoffel::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = 0.0;
                    for l in 0..n {
                        if a[(k, l)] == 0.0 {
                            continue;
                        }
                        for m in 0..n {
                            if ai[(m, i)] == 0.0 {
                                continue;
                            }
                            for p in 0..n {
                                acc += a[(k, l)] * self.get(l, m, p) * ai[(m, i)] * ai[(p, j)];
                            }
                        }
                    }
                    out.set(k, i, j, acc);
                }
            }
        }
        out
    }
}

/// Christoffel symbols together with their first coordinate derivatives.
#[derive(Debug, Clone)]
pub struct ChristoffelJet {
    pub gamma: Christoffel,
    /// `d[m]` holds `∂_m Γ^k_ij`.
    pub d: Vec<Christoffel>,
}

/// Christoffel symbols given directly as expressions, one per `k` and `i <= j`.
#[derive(Debug, Clone)]
pub struct ChristoffelTable {
    scope: Arc<Scope>,
    entries: Vec<ScalarExpr>,
}

impl ChristoffelTable {
    pub fn zero(scope: &Arc<Scope>) -> Self {
        let n = scope.dim();
        ChristoffelTable {
            scope: scope.clone(),
            entries: vec![ScalarExpr::constant(scope, 0.0); n * n * (n + 1) / 2],
        }
    }

    fn index(&self, k: usize, i: usize, j: usize) -> usize {
        let n = self.scope.dim();
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        k * n * (n + 1) / 2 + i * n - i * (i + 1) / 2 + j
    }

    /// Sets `Γ^k_ij = Γ^k_ji = expr`.
    pub fn set(&mut self, k: usize, i: usize, j: usize, expr: ScalarExpr) {
        let idx = self.index(k, i, j);
        self.entries[idx] = expr;
    }

    pub fn entry(&self, k: usize, i: usize, j: usize) -> &ScalarExpr {
        &self.entries[self.index(k, i, j)]
    }
}

/// Where a connection's Christoffel symbols come from.
#[derive(Debug, Clone)]
pub enum ConnectionSource {
    LeviCivita(MetricField),
    Weyl { h: MetricField, psi: OneFormField },
    Explicit(ChristoffelTable),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    LeviCivita,
    Weyl,
    ExplicitTable,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::LeviCivita => "levi_civita",
            Provenance::Weyl => "weyl",
            Provenance::ExplicitTable => "explicit_table",
        }
    }
}

/// A symmetric connection on the cover, evaluated pointwise.
#[derive(Debug, Clone)]
pub struct ConnectionField {
    source: ConnectionSource,
}

/// Levi-Civita connection of `g`.
pub fn levi_civita(g: &MetricField) -> ConnectionField {
    ConnectionField {
        source: ConnectionSource::LeviCivita(g.clone()),
    }
}

/// The symmetric connection with `∇h = h ⊗ Ψ`.
///
/// Closedness of `psi` is checked at `check_points`; a residual above
/// [`tolerances::CLOSEDNESS_ABORT`] is an error.
pub fn weyl_connection(
    h: &MetricField,
    psi: &OneFormField,
    check_points: &[Point],
    binds: &Bindings,
) -> Result<ConnectionField> {
    if h.dim() != psi.dim() {
        return Err(Error::Dimension {
            expected: h.dim(),
            got: psi.dim(),
        });
    }
    for pt in check_points {
        let residual = psi.closedness_residual(pt, binds)?.amax();
        if residual > tolerances::CLOSEDNESS_ABORT {
            return Err(Error::NotClosed {
                point: pt.to_vec(),
                residual,
            });
        }
    }
    Ok(ConnectionField {
        source: ConnectionSource::Weyl {
            h: h.clone(),
            psi: psi.clone(),
        },
    })
}

impl ConnectionField {
    pub fn explicit(table: ChristoffelTable) -> Self {
        ConnectionField {
            source: ConnectionSource::Explicit(table),
        }
    }

    pub fn source(&self) -> &ConnectionSource {
        &self.source
    }

    pub fn provenance(&self) -> Provenance {
        match self.source {
            ConnectionSource::LeviCivita(_) => Provenance::LeviCivita,
            ConnectionSource::Weyl { .. } => Provenance::Weyl,
            ConnectionSource::Explicit(_) => Provenance::ExplicitTable,
        }
    }

    pub fn scope(&self) -> &Arc<Scope> {
        match &self.source {
            ConnectionSource::LeviCivita(g) => g.scope(),
            ConnectionSource::Weyl { h, .. } => h.scope(),
            ConnectionSource::Explicit(t) => &t.scope,
        }
    }

    pub fn dim(&self) -> usize {
        self.scope().dim()
    }

    pub fn christoffel(&self, pt: &[f64], binds: &Bindings) -> Result<Christoffel> {
        match &self.source {
            ConnectionSource::LeviCivita(g) => {
                let jet = g.jet1_at(pt, binds)?;
                levi_civita_from_jet(&jet, pt)
            }
            ConnectionSource::Weyl { h, psi } => {
                let jet = h.jet1_at(pt, binds)?;
                let w = psi.at(pt, binds)?;
                weyl_from_jet(&jet, &w, pt)
            }
            ConnectionSource::Explicit(t) => {
                let n = t.scope.dim();
                let mut out = Christoffel::zeros(n);
                for k in 0..n {
                    for i in 0..n {
                        for j in i..n {
                            out.set(k, i, j, t.entry(k, i, j).eval(pt, binds)?);
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Christoffel symbols and their exact first derivatives.
    pub fn christoffel_jet(&self, pt: &[f64], binds: &Bindings) -> Result<ChristoffelJet> {
        match &self.source {
            ConnectionSource::LeviCivita(g) => {
                let jet = g.jet2_at(pt, binds)?;
                weyl_jet(&jet, None, pt)
            }
            ConnectionSource::Weyl { h, psi } => {
                let jet = h.jet2_at(pt, binds)?;
                let (w, dw) = psi.jet1_at(pt, binds)?;
                weyl_jet(&jet, Some((&w, &dw)), pt)
            }
            ConnectionSource::Explicit(t) => {
                let n = t.scope.dim();
                let mut gamma = Christoffel::zeros(n);
                let mut d = vec![Christoffel::zeros(n); n];
                for k in 0..n {
                    for i in 0..n {
                        for j in i..n {
                            let jet = t.entry(k, i, j).eval_jet1(pt, binds)?;
                            gamma.set(k, i, j, jet.value);
                            for (m, dm) in d.iter_mut().enumerate() {
                                dm.set(k, i, j, jet.grad[m]);
                            }
                        }
                    }
                }
                Ok(ChristoffelJet { gamma, d })
            }
        }
    }
}

/// First-kind symbols `C_lij = ½(∂_i g_lj + ∂_j g_li − ∂_l g_ij)`.
fn first_kind(first: &[DMatrix<f64>], l: usize, i: usize, j: usize) -> f64 {
    0.5 * (first[i][(l, j)] + first[j][(l, i)] - first[l][(i, j)])
}

/// Levi-Civita symbols from a metric value and its first derivatives.
pub fn levi_civita_from_jet(jet: &MetricJet, pt: &[f64]) -> Result<Christoffel> {
    let n = jet.dim();
    let inv = invert(&jet.value, pt)?;
    let mut out = Christoffel::zeros(n);
    for i in 0..n {
        for j in i..n {
            let c: Vec<f64> = (0..n).map(|l| first_kind(&jet.first, l, i, j)).collect();
            for k in 0..n {
                let v = (0..n).map(|l| inv[(k, l)] * c[l]).sum();
                out.set(k, i, j, v);
            }
        }
    }
    Ok(out)
}

fn weyl_from_jet(jet: &MetricJet, psi: &DVector<f64>, pt: &[f64]) -> Result<Christoffel> {
    let n = jet.dim();
    let mut out = levi_civita_from_jet(jet, pt)?;
    let inv = invert(&jet.value, pt)?;
    let raised = &inv * psi;
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let delta = kron(k, i) * psi[j] + kron(k, j) * psi[i];
                let corr = -0.5 * (delta - jet.value[(i, j)] * raised[k]);
                out.set(k, i, j, out.get(k, i, j) + corr);
            }
        }
    }
    Ok(out)
}

#[inline]
fn kron(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn weyl_jet(
    jet: &MetricJet,
    psi: Option<(&DVector<f64>, &DMatrix<f64>)>,
    pt: &[f64],
) -> Result<ChristoffelJet> {
    let n = jet.dim();
    let inv = invert(&jet.value, pt)?;
    // ∂_m h^kl = −(h⁻¹ ∂_m h h⁻¹)^kl
    let dinv: Vec<DMatrix<f64>> = jet.first.iter().map(|d| -(&inv * d * &inv)).collect();
    let mut gamma = Christoffel::zeros(n);
    let mut d = vec![Christoffel::zeros(n); n];
    let zero_w = DVector::zeros(n);
    let zero_dw = DMatrix::zeros(n, n);
    let (w, dw) = psi.unwrap_or((&zero_w, &zero_dw));
    let raised = &inv * w;
    // ∂_m Ψ^k = ∂_m h^kl Ψ_l + h^kl ∂_m Ψ_l
    let draised: Vec<DVector<f64>> = (0..n).map(|m| &dinv[m] * w + &inv * dw.column(m)).collect();
    for i in 0..n {
        for j in i..n {
            let c: Vec<f64> = (0..n).map(|l| first_kind(&jet.first, l, i, j)).collect();
            for k in 0..n {
                let lc: f64 = (0..n).map(|l| inv[(k, l)] * c[l]).sum();
                let corr =
                    -0.5 * (kron(k, i) * w[j] + kron(k, j) * w[i] - jet.value[(i, j)] * raised[k]);
                gamma.set(k, i, j, lc + corr);
                for m in 0..n {
                    let mut v = 0.0;
                    for l in 0..n {
                        let dc = 0.5
                            * (jet.second(m, i)[(l, j)] + jet.second(m, j)[(l, i)]
                                - jet.second(m, l)[(i, j)]);
                        v += dinv[m][(k, l)] * c[l] + inv[(k, l)] * dc;
                    }
                    v -= 0.5
                        * (kron(k, i) * dw[(j, m)] + kron(k, j) * dw[(i, m)]
                            - jet.first[m][(i, j)] * raised[k]
                            - jet.value[(i, j)] * draised[m][k]);
                    d[m].set(k, i, j, v);
                }
            }
        }
    }
    Ok(ChristoffelJet { gamma, d })
}

/// Max-norm over `i, j, k` of `∂_k h_ij − Γ^l_ki h_lj − Γ^l_kj h_il − h_ij Ψ_k`.
///
/// `psi = None` checks metric compatibility `∇h = 0`.
pub fn nabla_h_residual(
    conn: &ConnectionField,
    h: &MetricField,
    psi: Option<&OneFormField>,
    pt: &[f64],
    binds: &Bindings,
) -> Result<f64> {
    let n = h.dim();
    let gamma = conn.christoffel(pt, binds)?;
    let jet = h.jet1_at(pt, binds)?;
    let w = match psi {
        Some(p) => p.at(pt, binds)?,
        None => DVector::zeros(n),
    };
    let g = &jet.value;
    let mut worst = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut r = jet.first[k][(i, j)] - g[(i, j)] * w[k];
                for l in 0..n {
                    r -= gamma.get(l, k, i) * g[(l, j)] + gamma.get(l, k, j) * g[(i, l)];
                }
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// Max-norm of `A Γ(pt) (A⁻¹, A⁻¹) − Γ(φ(pt))`.
pub fn deck_equivariance_residual(
    conn: &ConnectionField,
    deck: &DeckMap,
    pt: &[f64],
    binds: &Bindings,
) -> Result<f64> {
    let here = conn.christoffel(pt, binds)?.pushed_forward(deck);
    let there = conn.christoffel(&deck.apply(pt), binds)?;
    Ok(here.max_abs_diff(&there))
}

/// A local gauge `μ` with `dlog μ = Ψ`, known along one recorded path.
///
/// `μ` is path dependent whenever `Ψ` has nonzero periods, so it is never
/// represented as a global function.
#[derive(Debug, Clone)]
pub struct GaugeFunction {
    basepoint: Point,
    path: Curve,
    log_value: f64,
}

impl GaugeFunction {
    /// Integrates `Ψ` along `path`; `μ = 1` at the path's start.
    pub fn along(psi: &OneFormField, path: Curve, binds: &Bindings) -> Result<Self> {
        let log_value = line_integral(psi, &path, binds)?;
        Ok(GaugeFunction {
            basepoint: path.start(binds)?,
            path,
            log_value,
        })
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }

    pub fn path(&self) -> &Curve {
        &self.path
    }

    /// `log μ` at the end of the path.
    pub fn log_value(&self) -> f64 {
        self.log_value
    }

    /// `μ` at the end of the path.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// `μ(pt) = exp(∫_path Ψ)` for a path from `base` to `pt`.
pub fn local_gauge(
    psi: &OneFormField,
    base: &[f64],
    pt: &[f64],
    path: &Curve,
    binds: &Bindings,
) -> Result<f64> {
    let start = path.start(binds)?;
    let end = path.end(binds)?;
    let close = |a: &[f64], b: &[f64]| {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs())))
    };
    if !close(&start, base) || !close(&end, pt) {
        return Err(Error::Invalid(format!(
            "path runs from {:?} to {:?}, expected {base:?} to {pt:?}",
            start.coords(),
            end.coords()
        )));
    }
    Ok(GaugeFunction::along(psi, path.clone(), binds)?.value())
}

/// The local parallel metric `μ⁻¹ h` at `pt` for a gauge value `mu`.
pub fn gauge_metric_at(
    h: &MetricField,
    mu: f64,
    pt: &[f64],
    binds: &Bindings,
) -> Result<DMatrix<f64>> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Invalid(format!("gauge value {mu} is not positive")));
    }
    Ok(h.metric_at(pt, binds)? / mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Signature;
    use crate::sampling::SampleBox;

    fn flat3(s: &Arc<Scope>) -> MetricField {
        let one = ScalarExpr::constant(s, 1.0);
        MetricField::diagonal(s, vec![one; 3], Signature::riemannian(3)).unwrap()
    }

    fn scope_xyz() -> (Arc<Scope>, Bindings) {
        let s = Scope::new(["x", "y", "z"], ["a", "b"]).unwrap();
        let b = s.bind([("a", 1.0), ("b", 0.0)]).unwrap();
        (s, b)
    }

    #[test]
    fn flat_levi_civita_vanishes() {
        let (s, b) = scope_xyz();
        let conn = levi_civita(&flat3(&s));
        assert_eq!(
            conn.christoffel(&[0.1, 2.0, -3.0], &b).unwrap().max_abs(),
            0.0
        );
    }

    #[test]
    fn conformally_flat_table() {
        let (s, b) = scope_xyz();
        let f = s.parse("exp(a*x + b*y)").unwrap();
        let conn = levi_civita(&flat3(&s).scaled(&f));
        let g = conn.christoffel(&[0.4, -0.2, 0.9], &b).unwrap();
        let close = |v: f64, want: f64| (v - want).abs() < 1e-14;
        assert!(close(g.get(0, 0, 0), 0.5));
        assert!(close(g.get(1, 0, 1), 0.5));
        assert!(close(g.get(0, 1, 1), -0.5));
        assert!(close(g.get(0, 2, 2), -0.5));
    }

    #[test]
    fn weyl_with_zero_form_is_levi_civita() {
        let (s, b) = scope_xyz();
        let h = MetricField::parse_upper(
            &s,
            &[
                vec!["2 + sin(x)", "0.3*cos(y)", "0"],
                vec!["3 + x*z/10", "0.1"],
                vec!["1.5 + cos(z)^2"],
            ],
            Signature::riemannian(3),
        )
        .unwrap();
        let psi = OneFormField::zero(&s);
        let pts = SampleBox::cube(3, 1.0).sample(100, 1);
        let weyl = weyl_connection(&h, &psi, &pts, &b).unwrap();
        let lc = levi_civita(&h);
        for p in &pts {
            let d = weyl
                .christoffel(p, &b)
                .unwrap()
                .max_abs_diff(&lc.christoffel(p, &b).unwrap());
            assert!(d < 1e-15);
        }
    }

    #[test]
    fn weyl_constant_form_table() {
        let (s, b) = scope_xyz();
        let psi = OneFormField::parse(&s, &["-a", "0", "0"]).unwrap();
        let conn = weyl_connection(&flat3(&s), &psi, &[], &b).unwrap();
        let g = conn.christoffel(&[0.0; 3], &b).unwrap();
        assert_eq!(g.get(0, 0, 0), 0.5);
        assert_eq!(g.get(0, 1, 1), -0.5);
        assert_eq!(g.get(1, 0, 1), 0.5);
    }

    #[test]
    fn weyl_rejects_non_closed_form() {
        let (s, b) = scope_xyz();
        let psi = OneFormField::parse(&s, &["0", "x", "0"]).unwrap();
        let err = weyl_connection(&flat3(&s), &psi, &[Point::origin(3)], &b).unwrap_err();
        assert!(matches!(err, Error::NotClosed { .. }));
    }

    #[test]
    fn residual_of_mismatched_pair() {
        let (s, b) = scope_xyz();
        let h = flat3(&s);
        let lc = levi_civita(&h);
        assert_eq!(
            nabla_h_residual(&lc, &h, None, &[0.2, 0.1, 0.0], &b).unwrap(),
            0.0
        );
        let psi = OneFormField::parse(&s, &["-1", "0", "0"]).unwrap();
        let r = nabla_h_residual(&lc, &h, Some(&psi), &[0.2, 0.1, 0.0], &b).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn constant_connection_is_translation_equivariant() {
        let (s, b) = scope_xyz();
        let mut t = ChristoffelTable::zero(&s);
        t.set(0, 1, 2, s.parse("0.7").unwrap());
        t.set(2, 0, 0, s.parse("-1.5").unwrap());
        let conn = ConnectionField::explicit(t);
        let deck = DeckMap::translation(&[1.0, -2.0, 0.5]);
        assert_eq!(
            deck_equivariance_residual(&conn, &deck, &[0.3, 0.3, 0.3], &b).unwrap(),
            0.0
        );
    }

    #[test]
    fn explicit_table_is_symmetric() {
        let (s, b) = scope_xyz();
        let mut t = ChristoffelTable::zero(&s);
        t.set(1, 2, 0, s.parse("x*y").unwrap());
        let g = ConnectionField::explicit(t)
            .christoffel(&[2.0, 3.0, 0.0], &b)
            .unwrap();
        assert_eq!(g.get(1, 0, 2), 6.0);
        assert_eq!(g.get(1, 2, 0), 6.0);
        assert_eq!(g.torsion(), 0.0);
    }

    #[test]
    fn local_gauge_examples() {
        let (s, b) = scope_xyz();
        let zero = OneFormField::zero(&s);
        let seg = Curve::segment(Point::origin(3), Point::new(vec![1.0, 2.0, 3.0]));
        assert_eq!(
            local_gauge(&zero, &[0.0; 3], &[1.0, 2.0, 3.0], &seg, &b).unwrap(),
            1.0
        );

        let psi = OneFormField::parse(&s, &["-a", "0", "0"]).unwrap();
        let seg = Curve::segment(Point::origin(3), Point::new(vec![1.0, 0.0, 0.0]));
        let mu = local_gauge(&psi, &[0.0; 3], &[1.0, 0.0, 0.0], &seg, &b).unwrap();
        assert!((mu - (-1.0f64).exp()).abs() < 1e-12);

        let alpha = s.parse("2 + sin(x)").unwrap();
        let psi = OneFormField::dlog(&alpha);
        let end = [std::f64::consts::FRAC_PI_2, 0.0, 0.0];
        let seg = Curve::segment(Point::origin(3), Point::new(end.to_vec()));
        let mu = local_gauge(&psi, &[0.0; 3], &end, &seg, &b).unwrap();
        assert!((mu - 1.5).abs() < 1e-10);

        assert!(local_gauge(&psi, &[1.0, 0.0, 0.0], &end, &seg, &b).is_err());
    }
}
