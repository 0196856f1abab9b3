//! Riemann, Ricci, scalar curvature and Einstein tensor of a connection.
//!
//! Index convention:
//! `R^l_kij = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`,
//! `R_kj = R^i_kij`. Scalar curvature depends on the chosen gauge `μ` and is
//! always reported together with it; the Einstein tensor does not.

use nalgebra::DMatrix;

use crate::connection::{ChristoffelJet, ConnectionField};
use crate::error::{Error, Result};
use crate::expr::Bindings;
use crate::fields::{invert, MetricField};

/// `R^l_kij` stored densely as `[l][k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Riemann {
    n: usize,
    data: Vec<f64>,
}

impl Riemann {
    fn idx(&self, l: usize, k: usize, i: usize, j: usize) -> usize {
        ((l * self.n + k) * self.n + i) * self.n + j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(l, k, i, j)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Built from the Christoffel symbols and their derivatives.
    ///
    /// Only `i < j` is computed; the `j < i` half is its exact negative and
    /// the diagonal is exactly zero.
    pub fn from_jet(jet: &ChristoffelJet) -> Self {
        let n = jet.gamma.dim();
        let g = &jet.gamma;
        let mut out = Riemann {
            n,
            data: vec![0.0; n * n * n * n],
        };
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let mut v = jet.d[i].get(l, j, k) - jet.d[j].get(l, i, k);
                        for m in 0..n {
                            v += g.get(l, i, m) * g.get(m, j, k) - g.get(l, j, m) * g.get(m, i, k);
                        }
                        let a = out.idx(l, k, i, j);
                        let b = out.idx(l, k, j, i);
                        out.data[a] = v;
                        out.data[b] = -v;
                    }
                }
            }
        }
        out
    }

    /// Max of `|R^l_kij + R^l_kji|`; zero by construction.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        worst = worst.max((self.get(l, k, i, j) + self.get(l, k, j, i)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Max of `|R^l_kij + R^l_ijk + R^l_jki|`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let s = self.get(l, k, i, j) + self.get(l, i, j, k) + self.get(l, j, k, i);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |k, j| (0..n).map(|i| self.get(i, k, i, j)).sum())
    }
}

pub fn riemann(conn: &ConnectionField, pt: &[f64], binds: &Bindings) -> Result<Riemann> {
    Ok(Riemann::from_jet(&conn.christoffel_jet(pt, binds)?))
}

pub fn ricci(conn: &ConnectionField, pt: &[f64], binds: &Bindings) -> Result<DMatrix<f64>> {
    Ok(riemann(conn, pt, binds)?.ricci())
}

/// Scalar curvature and Einstein tensor in the gauge `g_loc = μ⁻¹ h`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugedCurvature {
    pub mu: f64,
    pub gauge_metric: DMatrix<f64>,
    pub scalar: f64,
    pub einstein: DMatrix<f64>,
}

fn gauged(ricci: &DMatrix<f64>, h: &DMatrix<f64>, mu: f64, pt: &[f64]) -> Result<GaugedCurvature> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Invalid(format!("gauge value {mu} is not positive")));
    }
    let g_loc = h / mu;
    let inv = invert(&g_loc, pt)?;
    let scalar = inv.dot(ricci);
    let einstein = ricci - &g_loc * (0.5 * scalar);
    Ok(GaugedCurvature {
        mu,
        gauge_metric: g_loc,
        scalar,
        einstein,
    })
}

pub fn scalar_and_einstein(
    conn: &ConnectionField,
    h: &MetricField,
    mu: f64,
    pt: &[f64],
    binds: &Bindings,
) -> Result<GaugedCurvature> {
    let ric = ricci(conn, pt, binds)?;
    gauged(&ric, &h.matrix_at(pt, binds)?, mu, pt)
}

/// Everything at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensors {
    pub riemann: Riemann,
    pub ricci: DMatrix<f64>,
    pub gauged: GaugedCurvature,
}

impl CurvatureTensors {
    pub fn at(
        conn: &ConnectionField,
        h: &MetricField,
        mu: f64,
        pt: &[f64],
        binds: &Bindings,
    ) -> Result<Self> {
        let riemann = riemann(conn, pt, binds)?;
        let ricci = riemann.ricci();
        let gauged = gauged(&ricci, &h.matrix_at(pt, binds)?, mu, pt)?;
        Ok(CurvatureTensors {
            riemann,
            ricci,
            gauged,
        })
    }

    /// `max |R_kj − R_jk|`.
    pub fn ricci_asymmetry(&self) -> f64 {
        (&self.ricci - self.ricci.transpose()).amax()
    }

    /// Max difference of the Einstein tensor between gauges `μ` and `c·μ`.
    pub fn einstein_rescale_residual(&self, c: f64, pt: &[f64]) -> Result<f64> {
        let h = &self.gauged.gauge_metric * self.gauged.mu;
        let other = gauged(&self.ricci, &h, self.gauged.mu * c, pt)?;
        Ok((&other.einstein - &self.gauged.einstein).amax())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{levi_civita, weyl_connection};
    use crate::expr::Scope;
    use crate::fields::{OneFormField, Signature};

    #[test]
    fn flat_is_flat() {
        let s = Scope::new(["x", "y", "z"], Vec::<String>::new()).unwrap();
        let b = s.bind(Vec::<(&str, f64)>::new()).unwrap();
        let h = MetricField::parse_upper(
            &s,
            &[vec!["1", "0", "0"], vec!["1", "0"], vec!["1"]],
            Signature::riemannian(3),
        )
        .unwrap();
        let c = CurvatureTensors::at(&levi_civita(&h), &h, 1.0, &[0.3, 0.1, -2.0], &b).unwrap();
        assert_eq!(c.riemann.max_abs(), 0.0);
        assert_eq!(c.gauged.scalar, 0.0);
        assert_eq!(c.gauged.einstein.amax(), 0.0);
    }

    #[test]
    fn round_sphere() {
        // r = 1 sphere: R^θ_φθφ = sin²θ, Ric = g, R = 2.
        let s = Scope::new(["th", "ph"], Vec::<String>::new()).unwrap();
        let b = s.bind(Vec::<(&str, f64)>::new()).unwrap();
        let h = MetricField::parse_upper(
            &s,
            &[vec!["1", "0"], vec!["sin(th)^2"]],
            Signature::riemannian(2),
        )
        .unwrap();
        let th: f64 = 0.7;
        let c = CurvatureTensors::at(&levi_civita(&h), &h, 1.0, &[th, 0.2], &b).unwrap();
        assert!((c.riemann.get(0, 1, 0, 1) - th.sin().powi(2)).abs() < 1e-14);
        assert!((c.ricci[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((c.ricci[(1, 1)] - th.sin().powi(2)).abs() < 1e-14);
        assert!((c.gauged.scalar - 2.0).abs() < 1e-13);
        assert!(c.gauged.einstein.amax() < 1e-13);
        let c2 = CurvatureTensors::at(&levi_civita(&h), &h, 2.0, &[th, 0.2], &b).unwrap();
        assert!((c2.gauged.scalar - 4.0).abs() < 1e-13);
        assert!(c.einstein_rescale_residual(10.0, &[th, 0.2]).unwrap() < 1e-13);
    }

    #[test]
    fn weyl_curvature_symmetries() {
        let s = Scope::new(["x", "y", "z"], Vec::<String>::new()).unwrap();
        let b = s.bind(Vec::<(&str, f64)>::new()).unwrap();
        let h = MetricField::parse_upper(
            &s,
            &[vec!["1+x^2", "0", "0"], vec!["1", "0"], vec!["2+sin(y)"]],
            Signature::riemannian(3),
        )
        .unwrap();
        let psi = OneFormField::parse(&s, &["y", "x", "0"]).unwrap();
        let conn = weyl_connection(&h, &psi, &[], &b).unwrap();
        let r = riemann(&conn, &[0.2, -0.4, 0.9], &b).unwrap();
        assert_eq!(r.antisymmetry_residual(), 0.0);
        assert!(r.bianchi_residual() < 1e-13);
        assert!(r.max_abs() > 1e-3);
    }

    #[test]
    fn non_positive_gauge_rejected() {
        let s = Scope::new(["x"], Vec::<String>::new()).unwrap();
        let b = s.bind(Vec::<(&str, f64)>::new()).unwrap();
        let h = MetricField::parse_upper(&s, &[vec!["1"]], Signature::riemannian(1)).unwrap();
        assert!(scalar_and_einstein(&levi_civita(&h), &h, 0.0, &[0.0], &b).is_err());
    }
}
