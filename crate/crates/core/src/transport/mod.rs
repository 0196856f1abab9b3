//! Curves, period integrals, parallel transport, holonomy scale factors and
//! geodesics.
//!
//! All ODEs are integrated with fixed-step classical RK4 and re-run at half
//! the step; a result is accepted only if the two runs agree to the gate
//! tolerance in [`crate::tolerances`].

mod curve;
mod holonomy;

use std::io::Write;

use nalgebra::DMatrix;

pub use curve::Curve;
pub use holonomy::{
    cocycle_check, holonomy_fit, holonomy_report, holonomy_scale, sign_flip_witness,
    words_of_length, CocycleResult, GeneratorHolonomy, HolonomyOutcome, HolonomyReport,
    HolonomyScale, SignFlip,
};

use crate::connection::ConnectionField;
use crate::error::{Error, Result};
use crate::expr::Bindings;
use crate::fields::{DeckMap, OneFormField, Point, QuotientSpec};
use crate::tolerances;

/// `∫_γ Ψ` by composite Simpson quadrature.
pub fn line_integral(psi: &OneFormField, curve: &Curve, binds: &Bindings) -> Result<f64> {
    Ok(line_integral_with_error(psi, curve, binds)?.0)
}

/// `∫_γ Ψ` together with its Richardson error estimate.
///
/// Each smooth piece starts at [`tolerances::QUADRATURE_INTERVALS`]
/// subintervals and doubles until the estimate `|S_N − S_{N/2}| / 15` is
/// within [`tolerances::QUADRATURE`] of `max(1, |S_N|)`.
pub fn line_integral_with_error(
    psi: &OneFormField,
    curve: &Curve,
    binds: &Bindings,
) -> Result<(f64, f64)> {
    if psi.dim() != curve.dim() {
        return Err(Error::Dimension {
            expected: psi.dim(),
            got: curve.dim(),
        });
    }
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (piece, (a, b)) in curve.pieces().into_iter().enumerate() {
        let f = |s: f64| -> Result<f64> {
            let (x, v) = curve.eval_on_piece(piece, s, binds)?;
            let w = psi.at(&x, binds)?;
            Ok(w.iter().zip(&v).map(|(w, v)| w * v).sum())
        };
        let mut n = tolerances::QUADRATURE_INTERVALS;
        loop {
            let h = (b - a) / n as f64;
            let values = (0..=n)
                .map(|k| f(if k == n { b } else { a + k as f64 * h }))
                .collect::<Result<Vec<_>>>()?;
            let fine = simpson(&values, h);
            let coarse = simpson(
                &values.iter().step_by(2).copied().collect::<Vec<_>>(),
                2.0 * h,
            );
            let err = (fine - coarse).abs() / 15.0;
            if err <= tolerances::QUADRATURE * fine.abs().max(1.0) {
                total += fine;
                total_err += err;
                break;
            }
            if n >= 1 << 22 {
                return Err(Error::NonConvergence {
                    what: "line integral",
                    detail: format!("error estimate {err:e} with {n} subintervals"),
                });
            }
            n *= 2;
        }
    }
    Ok((total, total_err))
}

/// Composite Simpson over equally spaced samples (odd count).
fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let mut acc = values[0] + values[n];
    for (k, v) in values.iter().enumerate().take(n).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// A cover segment from a basepoint to its image under one deck map.
///
/// It projects to a closed loop on the quotient.
#[derive(Debug, Clone)]
pub struct GeneratorLoop {
    pub curve: Curve,
    pub deck: DeckMap,
    pub degenerate: bool,
}

impl GeneratorLoop {
    pub fn from_deck(deck: DeckMap, base: &Point) -> Self {
        let end = deck.apply(base);
        let curve = Curve::segment(base.clone(), end);
        GeneratorLoop {
            degenerate: curve.is_degenerate(),
            curve,
            deck,
        }
    }
}

pub fn generator_loop(spec: &QuotientSpec, gen: usize, base: &Point) -> Result<GeneratorLoop> {
    if base.dim() != spec.dim() {
        return Err(Error::Dimension {
            expected: spec.dim(),
            got: base.dim(),
        });
    }
    Ok(GeneratorLoop::from_deck(spec.generator(gen)?.clone(), base))
}

/// `∮Ψ` over every generator loop based at `base`.
pub fn periods_from(
    psi: &OneFormField,
    spec: &QuotientSpec,
    base: &Point,
    binds: &Bindings,
) -> Result<Vec<f64>> {
    (0..spec.generators().len())
        .map(|g| {
            let lp = generator_loop(spec, g, base)?;
            if lp.degenerate {
                Ok(0.0)
            } else {
                line_integral(psi, &lp.curve, binds)
            }
        })
        .collect()
}

/// `∮Ψ` over every generator loop based at the spec's basepoint.
pub fn periods(psi: &OneFormField, spec: &QuotientSpec, binds: &Bindings) -> Result<Vec<f64>> {
    periods_from(psi, spec, spec.basepoint(), binds)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    GloballyMetric,
    LocallyMetricOnly { periods: Vec<f64> },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::GloballyMetric => "GloballyMetric",
            Verdict::LocallyMetricOnly { .. } => "LocallyMetricOnly",
        }
    }
}

/// Globally metric iff every period vanishes within `tol`.
///
/// This equates "all generator periods vanish" with exactness, which holds
/// when the deck generators generate first homology.
pub fn classify_exactness(periods: &[f64], tol: f64) -> Verdict {
    if periods.iter().all(|p| p.abs() < tol) {
        Verdict::GloballyMetric
    } else {
        Verdict::LocallyMetricOnly {
            periods: periods.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub step: f64,
    /// Relative tolerance on the step-halving comparison.
    pub gate: f64,
}

impl StepOptions {
    pub fn transport() -> Self {
        StepOptions {
            step: tolerances::RK4_STEP,
            gate: tolerances::TRANSPORT_HALVING,
        }
    }
}

impl Default for StepOptions {
    fn default() -> Self {
        Self::transport()
    }
}

/// Result of a gated integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Transported<T> {
    pub value: T,
    /// Max-norm change between the step `h` and `h/2` runs, relative to `max(1, |value|)`.
    pub halving_delta: f64,
}

fn rk4_step<F>(f: &mut F, s: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let axpy = |y: &[f64], k: &[f64], c: f64| -> Vec<f64> {
        y.iter().zip(k).map(|(y, k)| y + c * k).collect()
    };
    let k1 = f(s, y)?;
    let k2 = f(s + 0.5 * h, &axpy(y, &k1, 0.5 * h))?;
    let k3 = f(s + 0.5 * h, &axpy(y, &k2, 0.5 * h))?;
    let k4 = f(s + h, &axpy(y, &k3, h))?;
    Ok((0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Integrate a linear-in-state ODE along every piece of `curve`.
///
/// `rhs(gamma, tangent, y)` returns `dy/ds`.
fn integrate_along<F>(
    curve: &Curve,
    y0: &[f64],
    step: f64,
    binds: &Bindings,
    rhs: &mut F,
) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], &[f64], &[f64]) -> Result<Vec<f64>>,
{
    let mut y = y0.to_vec();
    for (piece, (a, b)) in curve.pieces().into_iter().enumerate() {
        let steps = ((b - a).abs() / step).ceil().max(1.0) as usize;
        let h = (b - a) / steps as f64;
        let mut f = |s: f64, y: &[f64]| -> Result<Vec<f64>> {
            let (x, v) = curve.eval_on_piece(piece, s, binds)?;
            rhs(&x, &v, y)
        };
        for k in 0..steps {
            y = rk4_step(&mut f, a + k as f64 * h, &y, h)?;
        }
    }
    Ok(y)
}

fn gated<F>(what: &'static str, opts: StepOptions, mut run: F) -> Result<Transported<Vec<f64>>>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let coarse = run(opts.step)?;
    let fine = run(opts.step / 2.0)?;
    let scale = fine.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let delta = coarse
        .iter()
        .zip(&fine)
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
        / scale;
    if !(delta <= opts.gate) {
        return Err(Error::NonConvergence {
            what,
            detail: format!(
                "step halving changed the result by {delta:e} (gate {:e})",
                opts.gate
            ),
        });
    }
    Ok(Transported {
        value: fine,
        halving_delta: delta,
    })
}

/// Parallel transport of a vector: `dV^k/ds = −Γ^k_ij γ̇^i V^j`.
pub fn transport_vector(
    conn: &ConnectionField,
    curve: &Curve,
    v0: &[f64],
    binds: &Bindings,
    opts: StepOptions,
) -> Result<Transported<Vec<f64>>> {
    let n = conn.dim();
    if v0.len() != n || curve.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: if v0.len() != n { v0.len() } else { curve.dim() },
        });
    }
    gated("vector transport", opts, |step| {
        integrate_along(curve, v0, step, binds, &mut |x, t, v| {
            let g = conn.christoffel(x, binds)?;
            Ok(g.contract(t, v).into_iter().map(|c| -c).collect())
        })
    })
}

fn pack_upper(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn unpack_upper(v: &[f64], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = v[k];
            m[(j, i)] = v[k];
            k += 1;
        }
    }
    m
}

/// Parallel transport of a symmetric bilinear form:
/// `dB_ij/ds = Γ^l_ik γ̇^k B_lj + Γ^l_jk γ̇^k B_il`.
///
/// Only the upper triangle is integrated, so symmetry is exact.
pub fn transport_bilinear(
    conn: &ConnectionField,
    curve: &Curve,
    b0: &DMatrix<f64>,
    binds: &Bindings,
    opts: StepOptions,
) -> Result<Transported<DMatrix<f64>>> {
    let n = conn.dim();
    if b0.nrows() != n || b0.ncols() != n || curve.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b0.nrows(),
        });
    }
    if (b0 - b0.transpose()).amax() > 0.0 {
        return Err(Error::Invalid(
            "initial bilinear form is not symmetric".into(),
        ));
    }
    let out = gated("bilinear transport", opts, |step| {
        integrate_along(curve, &pack_upper(b0), step, binds, &mut |x, t, y| {
            let m = conn.christoffel(x, binds)?.along(t);
            let b = unpack_upper(y, n);
            let mb = m.transpose() * &b;
            Ok(pack_upper(&(&mb + mb.transpose())))
        })
    })?;
    Ok(Transported {
        value: unpack_upper(&out.value, n),
        halving_delta: out.halving_delta,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct GeodesicOptions {
    pub step: f64,
    /// Record every `stride`-th step (the final point is always recorded).
    pub stride: usize,
    pub gate: f64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            step: tolerances::RK4_STEP,
            stride: 100,
            gate: tolerances::GEODESIC_HALVING,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub s: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Endpoint change under step halving, relative to `max(1, |x|)`.
    pub halving_delta: f64,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has samples")
    }

    /// CSV with columns `s`, the coordinates, then `v_<coord>` velocities.
    pub fn write_csv<W: Write>(&self, coord_names: &[String], out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["s".to_string()];
        header.extend(coord_names.iter().cloned());
        header.extend(coord_names.iter().map(|c| format!("v_{c}")));
        w.write_record(&header).map_err(io)?;
        for smp in &self.samples {
            let row: Vec<String> = std::iter::once(smp.s)
                .chain(smp.x.iter().copied())
                .chain(smp.v.iter().copied())
                .map(|v| format!("{v:?}"))
                .collect();
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Invalid(format!("csv: {e}")))?;
        Ok(())
    }
}

/// Why a geodesic stopped early.
#[derive(Debug, Clone, PartialEq)]
pub enum GeodesicError {
    /// A coordinate exceeded [`tolerances::BLOW_UP`]; the samples so far are kept.
    BlowUp {
        s: f64,
        partial: Trajectory,
    },
    Failed(Error),
}

impl std::fmt::Display for GeodesicError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeodesicError::BlowUp { s, .. } => write!(f, "geodesic blew up at s = {s}"),
            GeodesicError::Failed(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for GeodesicError {}

impl From<Error> for GeodesicError {
    fn from(e: Error) -> Self {
        GeodesicError::Failed(e)
    }
}

fn geodesic_run(
    conn: &ConnectionField,
    x0: &[f64],
    v0: &[f64],
    s_max: f64,
    step: f64,
    stride: usize,
    binds: &Bindings,
) -> std::result::Result<Vec<TrajectorySample>, GeodesicError> {
    let n = x0.len();
    let steps = (s_max / step).ceil().max(1.0) as usize;
    let h = s_max / steps as f64;
    let mut y: Vec<f64> = x0.iter().chain(v0).copied().collect();
    let mut f = |_s: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (x, v) = y.split_at(n);
        let acc = conn.christoffel(x, binds)?.contract(v, v);
        Ok(v.iter()
            .copied()
            .chain(acc.into_iter().map(|a| -a))
            .collect())
    };
    let sample = |s: f64, y: &[f64]| TrajectorySample {
        s,
        x: y[..n].to_vec(),
        v: y[n..].to_vec(),
    };
    let mut out = vec![sample(0.0, &y)];
    for k in 0..steps {
        let s = k as f64 * h;
        y = match rk4_step(&mut f, s, &y, h) {
            Ok(y) => y,
            Err(e) => return Err(GeodesicError::Failed(e)),
        };
        let s_next = if k + 1 == steps {
            s_max
        } else {
            (k + 1) as f64 * h
        };
        if y[..n]
            .iter()
            .any(|c| !c.is_finite() || c.abs() > tolerances::BLOW_UP)
        {
            out.push(sample(s_next, &y));
            return Err(GeodesicError::BlowUp {
                s: s_next,
                partial: Trajectory {
                    samples: out,
                    halving_delta: f64::NAN,
                },
            });
        }
        if (k + 1) % stride.max(1) == 0 || k + 1 == steps {
            out.push(sample(s_next, &y));
        }
    }
    Ok(out)
}

/// Geodesic `ẍ^k + Γ^k_ij ẋ^i ẋ^j = 0` from `x0` with velocity `v0`.
pub fn geodesic(
    conn: &ConnectionField,
    x0: &[f64],
    v0: &[f64],
    s_max: f64,
    binds: &Bindings,
    opts: GeodesicOptions,
) -> std::result::Result<Trajectory, GeodesicError> {
    let n = conn.dim();
    if x0.len() != n || v0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: if x0.len() != n { x0.len() } else { v0.len() },
        }
        .into());
    }
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(Error::Invalid(format!("s_max must be positive, got {s_max}")).into());
    }
    let samples = geodesic_run(conn, x0, v0, s_max, opts.step, opts.stride, binds)?;
    let fine = geodesic_run(conn, x0, v0, s_max, opts.step / 2.0, usize::MAX, binds)?;
    let end = &samples.last().expect("samples").x;
    let end_fine = &fine.last().expect("samples").x;
    let scale = end_fine.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let delta = end
        .iter()
        .zip(end_fine)
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
        / scale;
    if !(delta <= opts.gate) {
        return Err(Error::NonConvergence {
            what: "geodesic",
            detail: format!(
                "step halving moved the endpoint by {delta:e} (gate {:e})",
                opts.gate
            ),
        }
        .into());
    }
    Ok(Trajectory {
        samples,
        halving_delta: delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{levi_civita, weyl_connection};
    use crate::expr::{ScalarExpr, Scope};
    use crate::fields::{MetricField, Signature};
    use std::sync::Arc;

    fn scope3() -> (Arc<Scope>, Bindings) {
        let s = Scope::new(["x", "y", "z"], ["a", "b"]).unwrap();
        let b = s.bind([("a", 1.0), ("b", 2.0)]).unwrap();
        (s, b)
    }

    fn flat(s: &Arc<Scope>) -> MetricField {
        let one = ScalarExpr::constant(s, 1.0);
        MetricField::diagonal(s, vec![one; s.dim()], Signature::riemannian(s.dim())).unwrap()
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let h = 0.25;
        let vals: Vec<f64> = (0..=4).map(|k| (k as f64 * h).powi(3)).collect();
        assert!((simpson(&vals, h) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn line_integral_examples() {
        let (s, b) = scope3();
        let seg = Curve::segment(Point::origin(3), Point::new(vec![1.0, 0.0, 0.0]));
        assert_eq!(
            line_integral(&OneFormField::zero(&s), &seg, &b).unwrap(),
            0.0
        );
        let psi = OneFormField::parse(&s, &["-a", "-b", "0"]).unwrap();
        assert!((line_integral(&psi, &seg, &b).unwrap() + 1.0).abs() < 1e-14);

        let alpha = s.parse("2 + sin(x)*cos(y)").unwrap();
        let exact = OneFormField::dlog(&alpha);
        let lp = Curve::polyline(vec![
            Point::new(vec![0.0, 0.0, 0.0]),
            Point::new(vec![1.0, 0.5, 0.0]),
            Point::new(vec![-0.5, 2.0, 1.0]),
            Point::new(vec![0.0, 0.0, 0.0]),
        ])
        .unwrap();
        assert!(line_integral(&exact, &lp, &b).unwrap().abs() < 1e-9);
    }

    #[test]
    fn reversing_negates_integral() {
        let (s, b) = scope3();
        let psi = OneFormField::parse(&s, &["y", "x*z", "cos(x)"]).unwrap();
        let c = Curve::polyline(vec![
            Point::new(vec![0.0, 0.0, 0.0]),
            Point::new(vec![1.0, 0.5, 0.0]),
            Point::new(vec![-0.5, 2.0, 1.0]),
        ])
        .unwrap();
        let fwd = line_integral(&psi, &c, &b).unwrap();
        let back = line_integral(&psi, &c.reversed(), &b).unwrap();
        assert!((fwd + back).abs() < 1e-12);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_exactness(&[0.0, 0.0, 0.0], 1e-8),
            Verdict::GloballyMetric
        );
        assert_eq!(
            classify_exactness(&[-1.0, -6.0, 0.0], 1e-8),
            Verdict::LocallyMetricOnly {
                periods: vec![-1.0, -6.0, 0.0]
            }
        );
        assert_eq!(
            classify_exactness(&[1e-12, 0.0, 0.0], 1e-8),
            Verdict::GloballyMetric
        );
    }

    #[test]
    fn flat_transport_is_trivial() {
        let (s, b) = scope3();
        let conn = levi_civita(&flat(&s));
        let c = Curve::parse("s", &["cos(s)", "sin(s)", "s^2"], 0.0, 2.0, &s).unwrap();
        let v = transport_vector(&conn, &c, &[1.0, -2.0, 0.5], &b, StepOptions::default()).unwrap();
        assert_eq!(v.value, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn flat_geodesic_is_straight() {
        let (s, b) = scope3();
        let conn = levi_civita(&flat(&s));
        let t = geodesic(
            &conn,
            &[0.0; 3],
            &[1.0, 0.0, 0.0],
            2.0,
            &b,
            GeodesicOptions::default(),
        )
        .unwrap();
        for smp in &t.samples {
            assert!((smp.x[0] - smp.s).abs() < 1e-12);
            assert_eq!(smp.x[1], 0.0);
        }
        assert_eq!(t.last().s, 2.0);
    }

    #[test]
    fn geodesic_blow_up_keeps_partial_trajectory() {
        // Γ^x_xx = -1 gives x'' = x'^2, which reaches infinity at s = 1 from x' = 1.
        let s = Scope::new(["x"], Vec::<String>::new()).unwrap();
        let b = s.bind(Vec::<(&str, f64)>::new()).unwrap();
        let mut t = crate::connection::ChristoffelTable::zero(&s);
        t.set(0, 0, 0, s.parse("-1").unwrap());
        let conn = ConnectionField::explicit(t);
        match geodesic(&conn, &[0.0], &[1.0], 2.0, &b, GeodesicOptions::default()) {
            Err(GeodesicError::BlowUp { s, partial }) => {
                assert!(s < 1.1);
                assert!(partial.samples.len() > 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weyl_transport_scales_metric_by_gauge_factor() {
        // Ψ = -a dx on flat ℝ³: the local parallel metric is e^{ax} δ.
        let (s, b) = scope3();
        let h = flat(&s);
        let psi = OneFormField::parse(&s, &["-a", "0", "0"]).unwrap();
        let conn = weyl_connection(&h, &psi, &[], &b).unwrap();
        let seg = Curve::segment(Point::origin(3), Point::new(vec![1.0, 0.0, 0.0]));
        let out = transport_bilinear(
            &conn,
            &seg,
            &DMatrix::identity(3, 3),
            &b,
            StepOptions::default(),
        )
        .unwrap();
        let want = DMatrix::identity(3, 3) * 1.0f64.exp();
        assert!((&out.value - &want).amax() / want.amax() < 1e-10);

        // a vector's h-norm picks up the inverse factor e^{-a/2} per unit x, squared
        let v =
            transport_vector(&conn, &seg, &[0.0, 0.0, 1.0], &b, StepOptions::default()).unwrap();
        let norm2: f64 = v.value.iter().map(|c| c * c).sum();
        assert!((norm2 - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let (s, b) = scope3();
        let conn = levi_civita(&flat(&s));
        let opts = GeodesicOptions {
            stride: 500,
            ..Default::default()
        };
        let t = geodesic(&conn, &[0.0; 3], &[1.0, 0.0, 0.0], 1.0, &b, opts).unwrap();
        let mut buf = Vec::new();
        t.write_csv(s.coords(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "s,x,y,z,v_x,v_y,v_z");
        assert_eq!(lines.count(), 3);
    }
}
