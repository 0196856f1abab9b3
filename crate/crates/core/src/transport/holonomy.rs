use nalgebra::DMatrix;

use super::{
    classify_exactness, line_integral, transport_bilinear, GeneratorLoop, StepOptions, Verdict,
};
use crate::connection::ConnectionField;
use crate::error::{Error, Result};
use crate::expr::Bindings;
use crate::fields::{MetricField, OneFormField, Point, QuotientSpec};
use crate::tolerances;

/// Least-squares fit of the pulled-back transported form against `B0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyScale {
    /// `c = <P, B0> / <B0, B0>` (Frobenius inner product).
    pub scale: f64,
    /// `‖P − c·B0‖ / ‖P‖`.
    pub fit_residual: f64,
    pub reference: DMatrix<f64>,
    /// Transported form at the loop end, pulled back to the basepoint by the deck map.
    pub pulled_back: DMatrix<f64>,
    pub halving_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HolonomyOutcome {
    Multiple(HolonomyScale),
    /// The transported form is not `c·B0` with `c > 0`; the best fit is kept for reporting.
    NotPositiveMultiple(HolonomyScale),
}

impl HolonomyOutcome {
    pub fn fit(&self) -> &HolonomyScale {
        match self {
            HolonomyOutcome::Multiple(f) | HolonomyOutcome::NotPositiveMultiple(f) => f,
        }
    }

    pub fn scale(&self) -> Option<f64> {
        match self {
            HolonomyOutcome::Multiple(f) => Some(f.scale),
            HolonomyOutcome::NotPositiveMultiple(_) => None,
        }
    }

    pub fn is_multiple(&self) -> bool {
        matches!(self, HolonomyOutcome::Multiple(_))
    }
}

/// Transport `b0` around `lp` and fit the result against `b0`.
pub fn holonomy_fit(
    conn: &ConnectionField,
    b0: &DMatrix<f64>,
    lp: &GeneratorLoop,
    binds: &Bindings,
) -> Result<HolonomyOutcome> {
    let (end, halving_delta) = if lp.degenerate {
        (b0.clone(), 0.0)
    } else {
        let t = transport_bilinear(conn, &lp.curve, b0, binds, StepOptions::transport())?;
        (t.value, t.halving_delta)
    };
    let pulled_back = lp.deck.pull_back_bilinear(&end);
    let norm_b0 = b0.norm_squared();
    if norm_b0 == 0.0 {
        return Err(Error::Invalid("reference form is zero".into()));
    }
    let scale = pulled_back.dot(b0) / norm_b0;
    let fit_residual =
        (&pulled_back - b0 * scale).norm() / pulled_back.norm().max(f64::MIN_POSITIVE);
    let fit = HolonomyScale {
        scale,
        fit_residual,
        reference: b0.clone(),
        pulled_back,
        halving_delta,
    };
    Ok(if fit_residual <= tolerances::MULTIPLE_FIT && scale > 0.0 {
        HolonomyOutcome::Multiple(fit)
    } else {
        HolonomyOutcome::NotPositiveMultiple(fit)
    })
}

/// Holonomy of the local parallel metric around a generator loop, with
/// `B0 = h(base)`.
pub fn holonomy_scale(
    conn: &ConnectionField,
    h: &MetricField,
    lp: &GeneratorLoop,
    binds: &Bindings,
) -> Result<HolonomyOutcome> {
    let base = lp.curve.start(binds)?;
    let b0 = h.matrix_at(&base, binds)?;
    holonomy_fit(conn, &b0, lp, binds)
}

/// Quadratic-form value of `v` before and after transport around a loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignFlip {
    pub before: f64,
    pub after: f64,
}

impl SignFlip {
    pub fn flipped(&self) -> bool {
        self.before * self.after < 0.0
    }
}

pub fn sign_flip_witness(fit: &HolonomyScale, v: &[f64]) -> SignFlip {
    let q = |m: &DMatrix<f64>| -> f64 {
        let n = v.len();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += m[(i, j)] * v[i] * v[j];
            }
        }
        acc
    };
    SignFlip {
        before: q(&fit.reference),
        after: q(&fit.pulled_back),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleResult {
    pub word: Vec<usize>,
    pub composite: f64,
    pub product: f64,
    /// `|composite − product| / product`.
    pub residual: f64,
}

/// Compare the scale of the composite loop of `word` (first letter applied
/// first) with the product of the generators' scales.
pub fn cocycle_check(
    conn: &ConnectionField,
    h: &MetricField,
    spec: &QuotientSpec,
    word: &[usize],
    binds: &Bindings,
) -> Result<CocycleResult> {
    if word.is_empty() {
        return Err(Error::Invalid("cocycle word must be nonempty".into()));
    }
    let base = spec.basepoint();
    let scale_of = |lp: GeneratorLoop| -> Result<f64> {
        holonomy_scale(conn, h, &lp, binds)?.scale().ok_or_else(|| {
            Error::Invalid("transported metric is not a positive multiple of the reference".into())
        })
    };
    let composite = scale_of(GeneratorLoop::from_deck(spec.word(word)?, base))?;
    let mut product = 1.0;
    for &g in word {
        product *= scale_of(GeneratorLoop::from_deck(spec.generator(g)?.clone(), base))?;
    }
    Ok(CocycleResult {
        word: word.to_vec(),
        composite,
        product,
        residual: (composite - product).abs() / product,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorHolonomy {
    pub generator: usize,
    pub period: Option<f64>,
    pub outcome: HolonomyOutcome,
    /// `exp(−period)` when a period is known.
    pub expected_scale: Option<f64>,
    /// `|c − exp(−period)| / c`.
    pub law_residual: Option<f64>,
}

impl GeneratorHolonomy {
    pub fn law_holds(&self) -> bool {
        self.law_residual.is_some_and(|r| r < tolerances::SCALE_LAW)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyReport {
    pub generators: Vec<GeneratorHolonomy>,
    pub verdict: Option<Verdict>,
    pub cocycles: Vec<CocycleResult>,
}

/// Every word of exactly `len` letters over `count` generators, lexicographic.
pub fn words_of_length(count: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..count).map(move |g| {
                    let mut w = w.clone();
                    w.push(g);
                    w
                })
            })
            .collect();
    }
    out
}

/// Periods, scales and the scale law for every generator, plus cocycle
/// residuals for all words of length `word_len`.
pub fn holonomy_report(
    conn: &ConnectionField,
    h: &MetricField,
    psi: Option<&OneFormField>,
    spec: &QuotientSpec,
    word_len: usize,
    binds: &Bindings,
) -> Result<HolonomyReport> {
    let base: &Point = spec.basepoint();
    let mut generators = Vec::new();
    let mut periods = Vec::new();
    for g in 0..spec.generators().len() {
        let lp = GeneratorLoop::from_deck(spec.generator(g)?.clone(), base);
        let period = match psi {
            Some(psi) if !lp.degenerate => Some(line_integral(psi, &lp.curve, binds)?),
            Some(_) => Some(0.0),
            None => None,
        };
        let outcome = holonomy_scale(conn, h, &lp, binds)?;
        let expected_scale = period.map(|p| (-p).exp());
        let law_residual = match (outcome.scale(), expected_scale) {
            (Some(c), Some(e)) => Some((c - e).abs() / c),
            _ => None,
        };
        if let Some(p) = period {
            periods.push(p);
        }
        generators.push(GeneratorHolonomy {
            generator: g,
            period,
            outcome,
            expected_scale,
            law_residual,
        });
    }
    let verdict = psi.map(|_| classify_exactness(&periods, tolerances::EXACTNESS));
    let scales: Option<Vec<f64>> = generators.iter().map(|g| g.outcome.scale()).collect();
    let mut cocycles = Vec::new();
    if let Some(scales) = scales {
        for word in words_of_length(scales.len(), word_len) {
            let lp = GeneratorLoop::from_deck(spec.word(&word)?, base);
            let composite = holonomy_scale(conn, h, &lp, binds)?
                .scale()
                .ok_or_else(|| {
                    Error::Invalid(format!(
                        "composite loop {word:?} does not return a positive multiple"
                    ))
                })?;
            let product: f64 = word.iter().map(|&g| scales[g]).product();
            cocycles.push(CocycleResult {
                residual: (composite - product).abs() / product,
                word,
                composite,
                product,
            });
        }
    }
    Ok(HolonomyReport {
        generators,
        verdict,
        cocycles,
    })
}
