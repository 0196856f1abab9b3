//! JSON scenario files and their preflight checks.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use weylconn_core::connection::{ChristoffelTable, ConnectionField};
use weylconn_core::fields::{DeckMap, FieldRef};
use weylconn_core::tolerances;
use weylconn_core::{
    MetricField, OneFormField, Point, QuotientSpec, SampleBox, Scenario, Scope, Signature,
};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    pub dimension: usize,
    pub coordinates: Vec<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    /// Rows of the metric: either full rows of length `n` or upper-triangle
    /// rows of length `n - i`.
    pub metric: Vec<Vec<String>>,
    #[serde(default)]
    pub psi: Option<Vec<String>>,
    pub signature: SignatureSpec,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    pub basepoint: Vec<f64>,
    pub sample_box: BoxSpec,
    #[serde(default)]
    pub seed: u64,
    /// Set to false when the metric is not expected to be deck invariant.
    #[serde(default = "yes")]
    pub metric_projects: bool,
    /// Explicit Christoffel symbols overriding the connection built from
    /// `metric` and `psi`.
    #[serde(default)]
    pub christoffel: Option<Vec<ChristoffelEntry>>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureSpec {
    pub negative: usize,
    pub positive: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub matrix: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChristoffelEntry {
    pub upper: String,
    pub lower: [String; 2],
    pub expr: String,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn check_len(what: &str, got: usize, want: usize) -> Result<(), CliError> {
    if got == want {
        Ok(())
    } else {
        Err(input(format!(
            "{what}: expected {want} entries, found {got}"
        )))
    }
}

impl ScenarioFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
    }

    /// Validate and build, overriding parameters with `overrides`.
    pub fn build(
        &self,
        overrides: &[(String, f64)],
        fallback_name: &str,
    ) -> Result<Scenario, CliError> {
        let n = self.dimension;
        check_len("coordinates", self.coordinates.len(), n)?;
        check_len("basepoint", self.basepoint.len(), n)?;
        check_len("sample_box.lo", self.sample_box.lo.len(), n)?;
        check_len("sample_box.hi", self.sample_box.hi.len(), n)?;
        check_len("metric rows", self.metric.len(), n)?;

        let mut params = self.parameters.clone();
        for (k, v) in overrides {
            if !params.contains_key(k) {
                return Err(input(format!("unknown parameter {k:?}")));
            }
            params.insert(k.clone(), *v);
        }
        let scope = Scope::new(self.coordinates.iter().cloned(), params.keys().cloned())
            .map_err(|e| input(format!("scope: {e}")))?;
        let binds = scope
            .bind(params.iter().map(|(k, v)| (k.as_str(), *v)))
            .map_err(|e| input(format!("parameters: {e}")))?;

        let parse = |where_: String, text: &str| {
            scope
                .parse(text)
                .map_err(|e| input(format!("{where_}: {e}")))
        };
        let mut upper = Vec::with_capacity(n);
        let mut lower_checks = Vec::new();
        for (i, row) in self.metric.iter().enumerate() {
            let offset = if row.len() == n {
                for (j, text) in row.iter().enumerate().take(i) {
                    lower_checks.push((i, j, parse(format!("metric[{i}][{j}]"), text)?));
                }
                i
            } else if row.len() == n - i {
                0
            } else {
                return Err(input(format!(
                    "metric row {i}: expected {n} or {} entries, found {}",
                    n - i,
                    row.len()
                )));
            };
            let parsed = row[offset..]
                .iter()
                .enumerate()
                .map(|(k, t)| parse(format!("metric[{i}][{}]", i + k), t))
                .collect::<Result<Vec<_>, _>>()?;
            upper.push(parsed);
        }
        let signature = Signature {
            negative: self.signature.negative,
            positive: self.signature.positive,
        };
        let h = MetricField::from_upper(&scope, upper, signature)
            .map_err(|e| input(format!("metric: {e}")))?;

        let psi = match &self.psi {
            Some(comps) => {
                check_len("psi", comps.len(), n)?;
                let exprs = comps
                    .iter()
                    .enumerate()
                    .map(|(i, t)| parse(format!("psi[{i}]"), t))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(OneFormField::new(&scope, exprs).map_err(|e| input(format!("psi: {e}")))?)
            }
            None => None,
        };

        let mut generators = Vec::with_capacity(self.generators.len());
        for (g, spec) in self.generators.iter().enumerate() {
            check_len(&format!("generators[{g}].matrix"), spec.matrix.len(), n)?;
            check_len(
                &format!("generators[{g}].translation"),
                spec.translation.len(),
                n,
            )?;
            for row in &spec.matrix {
                check_len(&format!("generators[{g}].matrix row"), row.len(), n)?;
            }
            let m = DMatrix::from_fn(n, n, |i, j| spec.matrix[i][j]);
            let deck = DeckMap::new(m, DVector::from_column_slice(&spec.translation))
                .map_err(|e| input(format!("generators[{g}]: {e}")))?;
            generators.push(deck);
        }
        let spec = QuotientSpec::new(&scope, generators, Point::new(self.basepoint.clone()))
            .map_err(|e| input(format!("quotient: {e}")))?;
        let sample_box = SampleBox::new(self.sample_box.lo.clone(), self.sample_box.hi.clone());

        let connection = match &self.christoffel {
            Some(entries) => {
                let mut table = ChristoffelTable::zero(&scope);
                for (e_idx, e) in entries.iter().enumerate() {
                    let idx = |name: &str| {
                        scope.coord_index(name).ok_or_else(|| {
                            input(format!("christoffel[{e_idx}]: unknown coordinate {name:?}"))
                        })
                    };
                    let expr = parse(format!("christoffel[{e_idx}]"), &e.expr)?;
                    table.set(idx(&e.upper)?, idx(&e.lower[0])?, idx(&e.lower[1])?, expr);
                }
                Some(ConnectionField::explicit(table))
            }
            None => None,
        };

        let pts = sample_box.sample(tolerances::SAMPLE_POINTS, self.seed);
        for pt in &pts {
            let at = || format!("{:?}", pt.coords());
            for (i, j, lower) in &lower_checks {
                let a = lower
                    .eval(pt, &binds)
                    .map_err(|e| input(format!("metric[{i}][{j}] at {}: {e}", at())))?;
                let b = h
                    .component(*i, *j)
                    .eval(pt, &binds)
                    .map_err(|e| input(format!("metric[{j}][{i}] at {}: {e}", at())))?;
                if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                    return Err(input(format!(
                        "preflight symmetry: metric[{i}][{j}] != metric[{j}][{i}] at {}",
                        at()
                    )));
                }
            }
            h.metric_at(pt, &binds)
                .map_err(|e| input(format!("preflight metric at {}: {e}", at())))?;
            if let Some(psi) = &psi {
                let r = psi
                    .closedness_residual(pt, &binds)
                    .map_err(|e| input(format!("preflight closedness at {}: {e}", at())))?
                    .amax();
                if r > tolerances::CLOSEDNESS {
                    return Err(input(format!(
                        "preflight closedness: |dPsi| = {r:e} at {}",
                        at()
                    )));
                }
            }
            for (g, deck) in spec.generators().iter().enumerate() {
                if let Some(psi) = &psi {
                    let r = weylconn_core::fields::deck_invariance_residual(
                        FieldRef::OneForm(psi),
                        deck,
                        pt,
                        &binds,
                    )
                    .map_err(|e| input(format!("preflight psi invariance at {}: {e}", at())))?;
                    if r > tolerances::DECK_INVARIANCE {
                        return Err(input(format!(
                            "preflight psi deck invariance: generator {g} residual {r:e} at {}",
                            at()
                        )));
                    }
                }
                if self.metric_projects {
                    let r = weylconn_core::fields::deck_invariance_residual(
                        FieldRef::Metric(&h),
                        deck,
                        pt,
                        &binds,
                    )
                    .map_err(|e| input(format!("preflight metric invariance at {}: {e}", at())))?;
                    if r > tolerances::DECK_INVARIANCE {
                        return Err(input(format!(
                            "preflight metric deck invariance: generator {g} residual {r:e} at {}",
                            at()
                        )));
                    }
                }
            }
        }

        let name = self
            .name
            .clone()
            .unwrap_or_else(|| fallback_name.to_string());
        Scenario::custom(name, spec, h, psi, connection, binds, sample_box, self.seed)
            .map_err(|e| input(format!("scenario: {e}")))
    }
}
