//! Curvature of a coordinate metric from its first and second derivatives.
//!
//! Conventions: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z` and
//! `R(X,Y,Z,W) = ⟨R(X,Y)Z, W⟩`. With these, a round sphere of curvature `k`
//! has `R(X,Y,Y,X) = k` for orthonormal `X, Y`.

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::jets::Jet;

/// Value, gradient and Hessian of every metric component at one point.
#[derive(Debug, Clone)]
pub struct MetricDerivs {
    pub g: DMatrix<f64>,
    /// `dg[e][(a, b)] = ∂_e g_ab`
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[e][f][(a, b)] = ∂_e ∂_f g_ab`
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

/// Christoffel symbols of the second kind, `get(a, b, c) = Γ^a_bc`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }
}

/// Fully covariant curvature tensor, `get(x, y, z, w) = R(∂x, ∂y, ∂z, ∂w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Riemann4 {
    dim: usize,
    data: Vec<f64>,
}

impl MetricDerivs {
    /// Reads derivatives off metric jets of degree at least 2, all in
    /// `g.len()` variables.
    pub fn from_jets(g: &[Vec<Jet>]) -> Result<Self> {
        let d = g.len();
        if g.iter().any(|row| row.len() != d) {
            return Err(GeomError::Degenerate("metric jets are not square".into()));
        }
        if let Some(j) = g.iter().flatten().find(|j| j.degree() < 2 || j.num_vars() != d) {
            return Err(GeomError::Config(format!(
                "metric jets need {d} variables and degree >= 2, got {}",
                j.shape()
            )));
        }
        let value = DMatrix::from_fn(d, d, |a, b| g[a][b].value());
        let dg = (0..d).map(|e| DMatrix::from_fn(d, d, |a, b| g[a][b].partial_value(e))).collect();
        let ddg = (0..d)
            .map(|e| (0..d).map(|f| DMatrix::from_fn(d, d, |a, b| g[a][b].second_partial_value(e, f))).collect())
            .collect();
        Ok(Self { g: value, dg, ddg })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    fn inverse(&self) -> Result<DMatrix<f64>> {
        self.g.clone().try_inverse().ok_or_else(|| GeomError::Degenerate("metric is singular".into()))
    }

    // Γ_dbc = ½(∂_b g_dc + ∂_c g_db − ∂_d g_bc)
    fn first_kind(&self, d: usize, b: usize, c: usize) -> f64 {
        0.5 * (self.dg[b][(d, c)] + self.dg[c][(d, b)] - self.dg[d][(b, c)])
    }

    fn first_kind_derivative(&self, e: usize, d: usize, b: usize, c: usize) -> f64 {
        0.5 * (self.ddg[e][b][(d, c)] + self.ddg[e][c][(d, b)] - self.ddg[e][d][(b, c)])
    }

    pub fn christoffel(&self) -> Result<Christoffel> {
        let n = self.dim();
        let inv = self.inverse()?;
        let mut data = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    data[(a * n + b) * n + c] = (0..n).map(|d| inv[(a, d)] * self.first_kind(d, b, c)).sum();
                }
            }
        }
        Ok(Christoffel { dim: n, data })
    }

    pub fn riemann(&self) -> Result<Riemann4> {
        let n = self.dim();
        let inv = self.inverse()?;
        let gamma = self.christoffel()?;
        // dinv[e] = ∂_e g^{-1} = −g^{-1} (∂_e g) g^{-1}
        let dinv: Vec<DMatrix<f64>> = self.dg.iter().map(|dg| -(&inv * dg * &inv)).collect();
        // dgamma[e][a][b][c] = ∂_e Γ^a_bc
        let idx = |e: usize, a: usize, b: usize, c: usize| ((e * n + a) * n + b) * n + c;
        let mut dgamma = vec![0.0; n * n * n * n];
        for e in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        dgamma[idx(e, a, b, c)] = (0..n)
                            .map(|d| {
                                dinv[e][(a, d)] * self.first_kind(d, b, c)
                                    + inv[(a, d)] * self.first_kind_derivative(e, d, b, c)
                            })
                            .sum();
                    }
                }
            }
        }
        // R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb
        let mut upper = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut v = dgamma[idx(c, a, d, b)] - dgamma[idx(d, a, c, b)];
                        for e in 0..n {
                            v += gamma.get(a, c, e) * gamma.get(e, d, b) - gamma.get(a, d, e) * gamma.get(e, c, b);
                        }
                        upper[idx(a, b, c, d)] = v;
                    }
                }
            }
        }
        let mut data = vec![0.0; n * n * n * n];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        data[idx(x, y, z, w)] = (0..n).map(|a| self.g[(w, a)] * upper[idx(a, z, x, y)]).sum();
                    }
                }
            }
        }
        Ok(Riemann4 { dim: n, data })
    }
}

impl Riemann4 {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim.pow(4));
        for x in 0..dim {
            for y in 0..dim {
                for z in 0..dim {
                    for w in 0..dim {
                        data.push(f(x, y, z, w));
                    }
                }
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, x: usize, y: usize, z: usize, w: usize) -> f64 {
        let n = self.dim;
        self.data[((x * n + y) * n + z) * n + w]
    }

    /// Multilinear evaluation on coordinate vectors.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.dim;
        let mut sum = 0.0;
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                if y[b] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    if z[c] == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        sum += x[a] * y[b] * z[c] * w[d] * self.get(a, b, c, d);
                    }
                }
            }
        }
        sum
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest violation of the antisymmetries and pair symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let r = self.get(x, y, z, w);
                        worst = worst
                            .max((r + self.get(y, x, z, w)).abs())
                            .max((r + self.get(x, y, w, z)).abs())
                            .max((r - self.get(z, w, x, y)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest violation of the first Bianchi identity.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let s = self.get(x, y, z, w) + self.get(y, z, x, w) + self.get(z, x, y, w);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Sectional curvature `R(X,Y,Y,X) / (⟨X,X⟩⟨Y,Y⟩ − ⟨X,Y⟩²)`.
    pub fn sectional(&self, g: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
        let ip = |u: &[f64], v: &[f64]| -> f64 {
            (0..self.dim).map(|a| (0..self.dim).map(|b| u[a] * g[(a, b)] * v[b]).sum::<f64>()).sum()
        };
        self.eval(x, y, y, x) / (ip(x, x) * ip(y, y) - ip(x, y).powi(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::JetShape;

    // Round sphere of radius r in spherical coordinates (θ, ϕ).
    fn sphere_metric(r: f64, theta: f64) -> Vec<Vec<Jet>> {
        let shape = JetShape::new(2, 2).unwrap();
        let th = shape.seed(0, theta).unwrap();
        let s = th.sin();
        vec![vec![shape.constant(r * r), shape.zero()], vec![shape.zero(), &(&s * &s) * (r * r)]]
    }

    #[test]
    fn sphere_has_curvature_inverse_radius_squared() {
        let m = MetricDerivs::from_jets(&sphere_metric(2.0, 0.9)).unwrap();
        let r = m.riemann().unwrap();
        let k = r.sectional(&m.g, &[1.0, 0.0], &[0.0, 1.0]);
        assert!((k - 0.25).abs() < 1e-13, "{k}");
        assert!(r.symmetry_defect() < 1e-13);
        assert!(r.bianchi_defect() < 1e-13);
    }

    #[test]
    fn christoffel_of_sphere() {
        let theta: f64 = 0.7;
        let m = MetricDerivs::from_jets(&sphere_metric(1.0, theta)).unwrap();
        let g = m.christoffel().unwrap();
        assert!((g.get(0, 1, 1) + theta.sin() * theta.cos()).abs() < 1e-14);
        assert!((g.get(1, 0, 1) - theta.cos() / theta.sin()).abs() < 1e-14);
        assert_eq!(g.get(0, 0, 0), 0.0);
    }

    #[test]
    fn rejects_low_degree() {
        let shape = JetShape::new(1, 1).unwrap();
        assert!(MetricDerivs::from_jets(&[vec![shape.constant(1.0)]]).is_err());
    }
}
