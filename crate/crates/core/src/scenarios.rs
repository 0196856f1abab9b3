//! Built-in scenarios: a Robertson-Walker cover quotiented to a Klein-bottle
//! (or torus) bundle carrying a Weyl connection, and a degenerate product
//! metric on a cylinder whose Levi-Civita connection is only locally metric.

use std::sync::Arc;

use crate::connection::{levi_civita, weyl_connection, Christoffel, ConnectionField};
use crate::error::{Error, Result};
use crate::expr::{Bindings, ScalarExpr, Scope};
use crate::fields::{DeckMap, MetricField, OneFormField, Point, QuotientSpec, Signature};
use crate::sampling::SampleBox;
use crate::tolerances;

/// Where a golden value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Stated in the published derivation.
    Published,
    /// Computed independently from the construction.
    Derived,
    /// Follows immediately from structure (flatness, block form, exactness).
    Trivial,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::Published => "published",
            Source::Derived => "derived",
            Source::Trivial => "trivial",
        }
    }
}

/// Which chart a golden Christoffel formula lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Full,
    /// The constant-`t` spatial slice of the Robertson-Walker scenarios.
    Slice,
}

/// `Γ^k_ij = formula`; every entry not listed for a chart is zero.
#[derive(Debug, Clone)]
pub struct GoldenChristoffel {
    pub chart: Chart,
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub formula: ScalarExpr,
    pub source: Source,
    pub citation: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpectedHolonomy {
    Scale(f64),
    /// The transported metric returns with the rows and columns in `negated` flipped in sign.
    SignFlip {
        negated: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct GoldenHolonomy {
    pub generator: usize,
    pub expected: ExpectedHolonomy,
    pub source: Source,
    pub citation: &'static str,
}

#[derive(Debug, Clone)]
pub struct GoldenPeriods {
    pub values: Vec<f64>,
    pub source: Source,
    pub citation: &'static str,
}

/// A check that `verify` should see fail for this scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedFailure {
    pub check: &'static str,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Default)]
pub struct GoldenData {
    pub christoffel: Vec<GoldenChristoffel>,
    pub periods: Option<GoldenPeriods>,
    pub holonomy: Vec<GoldenHolonomy>,
    pub expected_failures: Vec<ExpectedFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    RwKlein,
    RwTorus,
    DegCylinder,
    Custom,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub spec: QuotientSpec,
    pub h: MetricField,
    /// False when `h` is not invariant under the deck group.
    pub projects_to_quotient: bool,
    pub psi: Option<OneFormField>,
    pub connection: ConnectionField,
    pub bindings: Bindings,
    pub sample_box: SampleBox,
    pub golden: GoldenData,
    rw: Option<RwParams>,
}

impl Scenario {
    pub fn scope(&self) -> &Arc<Scope> {
        self.spec.scope()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn rw_params(&self) -> Option<&RwParams> {
        self.rw.as_ref()
    }

    /// A user-defined scenario; `psi = None` means the connection is
    /// Levi-Civita of `h`.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: impl Into<String>,
        spec: QuotientSpec,
        h: MetricField,
        psi: Option<OneFormField>,
        connection: Option<ConnectionField>,
        bindings: Bindings,
        sample_box: SampleBox,
        seed: u64,
    ) -> Result<Self> {
        let pts = sample_box.sample(tolerances::SAMPLE_POINTS, seed);
        let connection = match (connection, &psi) {
            (Some(c), _) => c,
            (None, Some(p)) => weyl_connection(&h, p, &pts, &bindings)?,
            (None, None) => levi_civita(&h),
        };
        let mut projects = true;
        for pt in &pts {
            for g in spec.generators() {
                if h.deck_residual(g, pt, &bindings)? > tolerances::DECK_INVARIANCE {
                    projects = false;
                }
            }
        }
        Ok(Scenario {
            name: name.into(),
            kind: ScenarioKind::Custom,
            spec,
            h,
            projects_to_quotient: projects,
            psi,
            connection,
            bindings,
            sample_box,
            golden: GoldenData::default(),
            rw: None,
        })
    }

    /// The `t = t0` slice of a Robertson-Walker scenario.
    pub fn slice(&self, t0: f64) -> Result<Slice> {
        let rw = self.rw.as_ref().ok_or_else(|| {
            Error::Invalid(format!("scenario {} has no spatial slice", self.name))
        })?;
        rw.slice(self.scope(), &self.bindings, t0)
    }

    /// Max deviation between the connection and its golden table on `chart` at `pt`.
    ///
    /// Entries absent from the table are compared against zero.
    pub fn golden_christoffel_residual(&self, chart: Chart, pt: &[f64]) -> Result<f64> {
        let (conn, binds) = match chart {
            Chart::Full => (self.connection.clone(), self.bindings.clone()),
            Chart::Slice => {
                let s = self.slice(0.0)?;
                (s.connection, s.bindings)
            }
        };
        let entries: Vec<_> = self
            .golden
            .christoffel
            .iter()
            .filter(|e| e.chart == chart)
            .collect();
        if entries.is_empty() {
            return Err(Error::Invalid(format!(
                "no golden table on this chart for {}",
                self.name
            )));
        }
        let got = conn.christoffel(pt, &binds)?;
        let mut want = Christoffel::zeros(got.dim());
        for e in entries {
            want.set(e.k, e.i, e.j, e.formula.eval(pt, &binds)?);
        }
        Ok(got.max_abs_diff(&want))
    }
}

/// A spatial slice: Levi-Civita of the conformally flat slice metric.
#[derive(Debug, Clone)]
pub struct Slice {
    pub scope: Arc<Scope>,
    pub metric: MetricField,
    pub connection: ConnectionField,
    pub bindings: Bindings,
}

/// Parameters of the Robertson-Walker scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct RwParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    /// Scale factor `S(t)`.
    pub scale: String,
    /// Positive deck-invariant `α`; `Ψ` gains `dlog α`.
    pub alpha: String,
}

impl Default for RwParams {
    fn default() -> Self {
        RwParams {
            p: 1.0,
            q: 1.0,
            r: 1.0,
            a: 1.0,
            b: 2.0,
            scale: "1".into(),
            alpha: "1".into(),
        }
    }
}

pub const RW_COORDS: [&str; 4] = ["t", "x", "y", "z"];
pub const RW_PARAMS: [&str; 5] = ["p", "q", "r", "a", "b"];

impl RwParams {
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "p" => self.p = value,
            "q" => self.q = value,
            "r" => self.r = value,
            "a" => self.a = value,
            "b" => self.b = value,
            _ => return Err(Error::Invalid(format!("unknown parameter {name:?}"))),
        }
        Ok(())
    }

    fn values(&self) -> [(&'static str, f64); 5] {
        [
            ("p", self.p),
            ("q", self.q),
            ("r", self.r),
            ("a", self.a),
            ("b", self.b),
        ]
    }

    fn slice(&self, scope: &Arc<Scope>, binds: &Bindings, t0: f64) -> Result<Slice> {
        let s = scope
            .parse(&self.scale)?
            .eval(&[t0, 0.0, 0.0, 0.0], binds)?;
        if s.is_nan() || s <= 0.0 {
            return Err(Error::Invalid(format!(
                "scale factor S({t0}) = {s} is not positive"
            )));
        }
        let sub = Scope::sharing_params(["x", "y", "z"], scope)?;
        let conformal = sub
            .parse("exp(a*x + b*y)")?
            .mul(&ScalarExpr::constant(&sub, s * s));
        let metric = MetricField::diagonal(&sub, vec![conformal; 3], Signature::riemannian(3))?;
        let bindings = sub.bind(self.values())?;
        Ok(Slice {
            connection: levi_civita(&metric),
            scope: sub,
            metric,
            bindings,
        })
    }
}

const CITE_SLICE: &str = "spatial slice connection table";
const CITE_RW_PERIODS: &str = "periods of the closed part of Psi";
const CITE_RW_SCALE: &str = "holonomy scale exp(-period)";
const CITE_DEG_TABLE: &str = "degenerate example Christoffel table";
const CITE_DEG_FLIP: &str = "timelike/spacelike exchange around the theta loop";

fn slice_table(sub: &Arc<Scope>) -> Result<Vec<GoldenChristoffel>> {
    let (x, y, z) = (0, 1, 2);
    let mut out = Vec::new();
    let mut push = |k, i, j, f: &str| -> Result<()> {
        out.push(GoldenChristoffel {
            chart: Chart::Slice,
            k,
            i,
            j,
            formula: sub.parse(f)?,
            source: Source::Published,
            citation: CITE_SLICE,
        });
        Ok(())
    };
    push(x, x, x, "a/2")?;
    push(y, y, y, "b/2")?;
    push(y, x, y, "a/2")?;
    push(z, x, z, "a/2")?;
    push(x, x, y, "b/2")?;
    push(z, y, z, "b/2")?;
    push(x, y, y, "-a/2")?;
    push(x, z, z, "-a/2")?;
    push(y, x, x, "-b/2")?;
    push(y, z, z, "-b/2")?;
    Ok(out)
}

fn build_rw(params: &RwParams, klein: bool) -> Result<Scenario> {
    for (name, v) in [("p", params.p), ("q", params.q), ("r", params.r)] {
        if v == 0.0 || !v.is_finite() {
            return Err(Error::Invalid(format!(
                "period {name} must be a nonzero finite number, got {v}"
            )));
        }
    }
    if !(params.a.is_finite() && params.b.is_finite()) {
        return Err(Error::Invalid("a and b must be finite".into()));
    }
    let scope = Scope::new(RW_COORDS, RW_PARAMS)?;
    let binds = scope.bind(params.values())?;
    let s = scope.parse(&params.scale)?;
    let alpha = scope.parse(&params.alpha)?;

    let s2 = s.powi(2);
    let zero = ScalarExpr::constant(&scope, 0.0);
    let h = MetricField::diagonal(
        &scope,
        vec![
            ScalarExpr::constant(&scope, -1.0),
            s2.clone(),
            s2.clone(),
            s2,
        ],
        Signature::lorentzian(4),
    )?;
    let closed = OneFormField::new(
        &scope,
        vec![zero.clone(), scope.parse("-a")?, scope.parse("-b")?, zero],
    )?;
    let psi = if alpha.depends_on_coords() {
        closed.plus(&OneFormField::dlog(&alpha))?
    } else {
        closed
    };

    let (p, q, r) = (params.p, params.q, params.r);
    let flips: &[usize] = if klein { &[3] } else { &[] };
    let generators = vec![
        DeckMap::translation(&[0.0, p, 0.0, 0.0]),
        DeckMap::translation_with_flips(&[0.0, 0.0, q, 0.0], flips),
        DeckMap::translation(&[0.0, 0.0, 0.0, r]),
    ];
    let spec = QuotientSpec::new(&scope, generators, Point::origin(4))?;
    let sample_box = SampleBox::new(vec![-1.0, 0.0, 0.0, 0.0], vec![1.0, p, q, r]);

    let pts = sample_box.sample(tolerances::SAMPLE_POINTS, 0);
    for pt in &pts {
        let sv = s.eval(pt, &binds)?;
        if sv.is_nan() || sv <= 0.0 {
            return Err(Error::Invalid(format!(
                "S = {sv} is not positive at {:?}",
                pt.coords()
            )));
        }
        let av = alpha.eval(pt, &binds)?;
        if av.is_nan() || av <= 0.0 {
            return Err(Error::Invalid(format!(
                "alpha = {av} is not positive at {:?}",
                pt.coords()
            )));
        }
        for (g, deck) in spec.generators().iter().enumerate() {
            let moved = alpha.eval(&deck.apply(pt), &binds)?;
            if (moved - av).abs() > tolerances::DECK_INVARIANCE * av.abs().max(1.0) {
                return Err(Error::Invalid(format!(
                    "alpha is not invariant under generator {g} at {:?}: {av} vs {moved}",
                    pt.coords()
                )));
            }
        }
    }
    let connection = weyl_connection(&h, &psi, &pts, &binds)?;

    let sub = Scope::sharing_params(["x", "y", "z"], &scope)?;
    let periods = vec![-params.a * p, -params.b * q, 0.0];
    let holonomy = periods
        .iter()
        .enumerate()
        .map(|(g, per)| GoldenHolonomy {
            generator: g,
            expected: ExpectedHolonomy::Scale((-per).exp()),
            source: Source::Derived,
            citation: CITE_RW_SCALE,
        })
        .collect();
    let golden = GoldenData {
        christoffel: slice_table(&sub)?,
        periods: Some(GoldenPeriods {
            values: periods,
            source: Source::Derived,
            citation: CITE_RW_PERIODS,
        }),
        holonomy,
        expected_failures: Vec::new(),
    };

    Ok(Scenario {
        name: if klein { "rw-klein" } else { "rw-torus" }.into(),
        kind: if klein {
            ScenarioKind::RwKlein
        } else {
            ScenarioKind::RwTorus
        },
        spec,
        h,
        projects_to_quotient: true,
        psi: Some(psi),
        connection,
        bindings: binds,
        sample_box,
        golden,
        rw: Some(params.clone()),
    })
}

/// `−dt² + S²(dx² + dy² + dz²)` with `Ψ = −a dx − b dy + dlog α`, quotiented by
/// `x ↦ x + p`, `(y, z) ↦ (y + q, −z)`, `z ↦ z + r`.
pub fn build_rw_klein(params: &RwParams) -> Result<Scenario> {
    build_rw(params, true)
}

/// As [`build_rw_klein`] but with three pure translations.
pub fn build_rw_torus(params: &RwParams) -> Result<Scenario> {
    build_rw(params, false)
}

pub const DEG_COORDS: [&str; 4] = ["t", "th", "x", "y"];

const G1: [&str; 3] = ["-cos(th)", "sin(th)", "cos(th)"];

fn deg_scope() -> Result<Arc<Scope>> {
    Ok(Scope::new(DEG_COORDS, Vec::<String>::new())?)
}

/// `a·g₁ + b₁ dx² + 2b₂ dx dy + b₃ dy²` on the degenerate cylinder cover.
///
/// With `extra = Some(expr)` the expression is added to the `dx²` coefficient.
pub fn parallel_family_metric(
    scope: &Arc<Scope>,
    a: f64,
    b1: f64,
    b2: f64,
    b3: f64,
    extra: Option<&str>,
) -> Result<MetricField> {
    let num = |v: f64| format!("({v:?})");
    let ag = |s: &str| format!("{}*{s}", num(a));
    let xx = match extra {
        Some(e) => format!("{} + {e}", num(b1)),
        None => num(b1),
    };
    let rows = vec![
        vec![ag(G1[0]), ag(G1[1]), "0".into(), "0".into()],
        vec![ag(G1[2]), "0".into(), "0".into()],
        vec![xx, num(b2)],
        vec![num(b3)],
    ];
    if a == 0.0 || b1 * b3 - b2 * b2 <= 0.0 || b1 <= 0.0 {
        return Err(Error::Invalid(format!(
            "family metric needs a != 0 and a positive definite (b1, b2, b3) block, got a={a}, b=({b1}, {b2}, {b3})"
        )));
    }
    let sig = Signature {
        negative: 1,
        positive: 3,
    };
    MetricField::parse_upper(scope, &rows, sig)
}

/// `g₁ + g₂` with `g₁ = −cosθ dt² + 2 sinθ dt dθ + cosθ dθ²`,
/// `g₂ = dx² + dy²`, quotiented by `θ ↦ θ + π`.
pub fn build_deg_cylinder() -> Result<Scenario> {
    let scope = deg_scope()?;
    let binds = scope.bind(Vec::<(&str, f64)>::new())?;
    let h = parallel_family_metric(&scope, 1.0, 1.0, 0.0, 1.0, None)?;
    let spec = QuotientSpec::new(
        &scope,
        vec![DeckMap::translation(&[0.0, std::f64::consts::PI, 0.0, 0.0])],
        Point::origin(4),
    )?;
    let sample_box = SampleBox::new(
        vec![-1.0, 0.0, -1.0, -1.0],
        vec![1.0, std::f64::consts::PI, 1.0, 1.0],
    );

    let (t, th) = (0, 1);
    let mut christoffel = Vec::new();
    for (k, i, j, f) in [
        (th, th, th, "sin(th)*cos(th)/2"),
        (th, t, t, "-sin(th)*cos(th)/2"),
        (t, t, th, "-sin(th)*cos(th)/2"),
        (t, th, t, "-sin(th)*cos(th)/2"),
        (t, t, t, "-sin(th)^2/2"),
        (th, t, th, "sin(th)^2/2"),
        (th, th, t, "sin(th)^2/2"),
        (t, th, th, "-(cos(th)^2 + sin(th)^2/2)"),
    ] {
        christoffel.push(GoldenChristoffel {
            chart: Chart::Full,
            k,
            i,
            j,
            formula: scope.parse(f)?,
            source: Source::Published,
            citation: CITE_DEG_TABLE,
        });
    }
    let golden = GoldenData {
        christoffel,
        periods: None,
        holonomy: vec![GoldenHolonomy {
            generator: 0,
            expected: ExpectedHolonomy::SignFlip {
                negated: vec![0, 1],
            },
            source: Source::Published,
            citation: CITE_DEG_FLIP,
        }],
        expected_failures: vec![ExpectedFailure {
            check: "metric-deck-invariance",
            reason: "g1 changes sign under the identification, so h does not project",
        }],
    };
    Ok(Scenario {
        name: "deg-cylinder".into(),
        kind: ScenarioKind::DegCylinder,
        spec,
        connection: levi_civita(&h),
        h,
        projects_to_quotient: false,
        psi: None,
        bindings: binds,
        sample_box,
        golden,
        rw: None,
    })
}

pub const BUILTIN_NAMES: [&str; 3] = ["rw-klein", "rw-torus", "deg-cylinder"];

/// Build a built-in scenario by name with parameter overrides.
pub fn builtin(name: &str, overrides: &[(String, f64)]) -> Result<Scenario> {
    match name {
        "rw-klein" | "rw-torus" => {
            let mut p = RwParams::default();
            for (k, v) in overrides {
                p.set(k, *v)?;
            }
            if name == "rw-klein" {
                build_rw_klein(&p)
            } else {
                build_rw_torus(&p)
            }
        }
        "deg-cylinder" => {
            if let Some((k, _)) = overrides.first() {
                return Err(Error::Invalid(format!(
                    "deg-cylinder has no parameter {k:?}"
                )));
            }
            build_deg_cylinder()
        }
        _ => Err(Error::Invalid(format!("unknown scenario {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{deck_equivariance_residual, nabla_h_residual};

    #[test]
    fn rw_default_slice_values() {
        let sc = build_rw_klein(&RwParams::default()).unwrap();
        let sl = sc.slice(0.0).unwrap();
        let g = sl
            .connection
            .christoffel(&[0.2, 0.4, 0.1], &sl.bindings)
            .unwrap();
        assert!((g.get(0, 0, 0) - 0.5).abs() < 1e-14);
        assert!((g.get(1, 1, 1) - 1.0).abs() < 1e-14);
        assert!((g.get(0, 1, 1) + 0.5).abs() < 1e-14);
        assert!((g.get(1, 0, 0) + 1.0).abs() < 1e-14);
        assert!(
            sc.golden_christoffel_residual(Chart::Slice, &[0.2, 0.4, 0.1])
                .unwrap()
                < 1e-14
        );
    }

    #[test]
    fn rw_spatial_block_matches_slice() {
        let sc = build_rw_klein(&RwParams::default()).unwrap();
        let sl = sc.slice(0.3).unwrap();
        let full = sc
            .connection
            .christoffel(&[0.3, 0.2, 0.4, 0.1], &sc.bindings)
            .unwrap();
        let s3 = sl
            .connection
            .christoffel(&[0.2, 0.4, 0.1], &sl.bindings)
            .unwrap();
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert!((full.get(k + 1, i + 1, j + 1) - s3.get(k, i, j)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn rw_validation() {
        let p = RwParams {
            p: 0.0,
            ..RwParams::default()
        };
        assert!(build_rw_klein(&p).is_err());
        let p = RwParams {
            alpha: "2+sin(x)".into(),
            ..RwParams::default()
        };
        assert!(build_rw_klein(&p).is_err());
        let p = RwParams {
            alpha: "2+sin(x*6.283185307179586)".into(),
            ..RwParams::default()
        };
        assert!(build_rw_klein(&p).is_ok());
        let p = RwParams {
            alpha: "2+sin(z*6.283185307179586)".into(),
            ..RwParams::default()
        };
        assert!(
            build_rw_klein(&p).is_err(),
            "sin(2πz) is odd under the z flip"
        );
        assert!(build_rw_torus(&p).is_ok());
    }

    #[test]
    fn deg_cylinder_table_and_flags() {
        let sc = build_deg_cylinder().unwrap();
        let binds = &sc.bindings;
        let g = sc
            .connection
            .christoffel(&[0.0, 0.0, 0.0, 0.0], binds)
            .unwrap();
        assert!((g.get(0, 1, 1) + 1.0).abs() < 1e-15);
        let g = sc
            .connection
            .christoffel(&[0.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0], binds)
            .unwrap();
        assert!((g.get(0, 0, 0) + 0.5).abs() < 1e-15);
        for th in [0.0, 0.5, 1.1, 2.9] {
            assert!(
                sc.golden_christoffel_residual(Chart::Full, &[0.1, th, 0.2, 0.3])
                    .unwrap()
                    < 1e-14
            );
        }
        assert!(!sc.projects_to_quotient);
        assert!(sc.psi.is_none());
        let pt = [0.1, 0.7, 0.2, 0.3];
        let gen = sc.spec.generator(0).unwrap();
        assert!(deck_equivariance_residual(&sc.connection, gen, &pt, binds).unwrap() < 1e-14);
        assert!(sc.h.deck_residual(gen, &pt, binds).unwrap() > 1.0);
    }

    #[test]
    fn parallel_family_and_negative_control() {
        let sc = build_deg_cylinder().unwrap();
        let fam = parallel_family_metric(sc.scope(), -2.0, 1.5, 0.3, 0.8, None).unwrap();
        let bad = parallel_family_metric(sc.scope(), 1.0, 1.0, 0.0, 1.0, Some("x^2")).unwrap();
        let pt = [0.1, 0.7, 0.9, 0.3];
        assert!(nabla_h_residual(&sc.connection, &fam, None, &pt, &sc.bindings).unwrap() < 1e-14);
        assert!(nabla_h_residual(&sc.connection, &bad, None, &pt, &sc.bindings).unwrap() > 0.1);
    }

    #[test]
    fn builtin_lookup() {
        let sc = builtin("rw-torus", &[("a".into(), 0.0)]).unwrap();
        assert_eq!(sc.rw_params().unwrap().a, 0.0);
        assert!(builtin("deg-cylinder", &[("a".into(), 1.0)]).is_err());
        assert!(builtin("nope", &[]).is_err());
    }
}
