//! Extrinsic geometry of a spacelike immersion at a parameter point.
//!
//! Everything is computed from jets of the immersion in its parameters `u`:
//! coordinate tangents `∂_i F`, the induced metric, the second fundamental
//! form `α_ij = (∂_i∂_j F + Γ̄(∂_i F, ∂_j F))^⊥` and its first two covariant
//! derivatives. Frame components are taken at the end, against a
//! Gram-Schmidt tangent frame and a normal frame obtained by projecting the
//! ambient coordinate basis.
//!
//! Validity: with immersion jets of degree `D`, `α` is exact to order
//! `D − 2`, `∇α` to `D − 3` and `∇²α` to `D − 4`; the second covariant
//! derivative therefore needs degree 4.

use nalgebra::{DMatrix, DVector};

use crate::ambient::{AmbientConfig, ChartPoint, WarpScalars};
use crate::error::{GeomError, Result};
use crate::immersion::Immersion;
use crate::jets::{Jet, JetShape, MAX_DEGREE};
use crate::linalg::{jet_inverse, symmetric_eigenvalues};
use crate::residual::Residual;
use crate::tensor::{MetricDerivs, Riemann4};

/// Smallest induced-metric eigenvalue accepted as spacelike.
pub const SPACELIKE_TOL: f64 = 1e-10;
/// Projected basis vectors with `|⟨v,v⟩|` below this are skipped when
/// building the normal frame.
pub const FRAME_SKIP_TOL: f64 = 1e-12;

type JVec = Vec<Jet>;

/// First-order data at one point, in orthonormal frames.
#[derive(Debug, Clone)]
pub struct ExtrinsicData {
    pub u: Vec<f64>,
    pub point: ChartPoint,
    /// Dimension `n` of the submanifold.
    pub dim: usize,
    pub codim: usize,
    pub epsilon: f64,
    /// Diagonal ambient metric at the point.
    pub ambient_metric: Vec<f64>,
    /// `∂_i F`, ambient chart components.
    pub coord_tangents: Vec<Vec<f64>>,
    pub induced_metric: DMatrix<f64>,
    /// `E_a = Σ_i frame_coeffs[(a, i)] ∂_i F`
    pub frame_coeffs: DMatrix<f64>,
    pub tangent_frame: Vec<Vec<f64>>,
    pub normal_frame: Vec<Vec<f64>>,
    /// `⟨e_β, e_β⟩ = ±1`
    pub normal_signs: Vec<f64>,
    /// `h[β][(i, j)] = ⟨α(E_i, E_j), e_β⟩`, the matrix of `A_β`.
    pub h: Vec<DMatrix<f64>>,
    /// `−⟨∇̄_{E_i} e_β, E_j⟩`, the shape operators from the Weingarten formula.
    pub weingarten: Vec<DMatrix<f64>>,
    /// Mean curvature vector, ambient chart components.
    pub mean_curvature: Vec<f64>,
    /// `⟨T, E_a⟩`, where `T` is the tangent part of `∂t`.
    pub t_frame: Vec<f64>,
    /// `⟨ξ, e_β⟩`, where `ξ = ∂t − T`.
    pub xi_normal: Vec<f64>,
    pub warp: WarpScalars,
    pub structure: StructureResiduals,
}

/// Defects of the first-order structure equations at one point.
#[derive(Debug, Clone, Default)]
pub struct StructureResiduals {
    /// `∇̄_X ∂t = (a′/a)(X − ε⟨X,∂t⟩∂t)`
    pub ambient_dt: Residual,
    /// `∇_X T = (a′/a)(X − ε⟨X,T⟩T) + A_ξ X`
    pub tangent_t: Residual,
    /// `∇⊥_X ξ = −ε(a′/a)⟨X,T⟩ξ − α(X,T)`
    pub normal_xi: Residual,
    /// Shape operators from `α` against those from differentiating the
    /// normal frame.
    pub weingarten: Residual,
    /// Orthonormality of the combined frame.
    pub frame: Residual,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquaredNorms {
    /// `|α|²`
    pub alpha: f64,
    /// `|∇⊥α|²`
    pub nabla_alpha: f64,
    /// `Δ|α|²`
    pub laplacian_alpha: f64,
}

/// Second-order data at one point.
#[derive(Debug, Clone)]
pub struct DerivedTensors {
    pub dim: usize,
    pub codim: usize,
    /// `h^β_ijk = ⟨(∇_{E_k} α)(E_i, E_j), e_β⟩`
    h3: Vec<f64>,
    /// `h^β_ijkl = ⟨(∇²_{E_l,E_k} α)(E_i, E_j), e_β⟩`
    h4: Vec<f64>,
    /// Fails with an unsupported-signature error on an indefinite normal
    /// bundle.
    pub norms: Result<SquaredNorms>,
    /// Frame components of `∇B`.
    pub grad_b: Vec<f64>,
    /// Curvature of the induced metric in the tangent frame.
    pub intrinsic_riemann: Riemann4,
    /// `⟨R⊥(E_i,E_j) e_β, e_γ⟩` from differentiating the normal frame twice.
    normal_curvature: Vec<f64>,
}

impl DerivedTensors {
    pub fn h3(&self, beta: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.h3[((beta * n + i) * n + j) * n + k]
    }

    pub fn h4(&self, beta: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.h4[(((beta * n + i) * n + j) * n + k) * n + l]
    }

    pub fn normal_curvature(&self, i: usize, j: usize, beta: usize, gamma: usize) -> f64 {
        let (n, m) = (self.dim, self.codim);
        self.normal_curvature[((i * n + j) * m + beta) * m + gamma]
    }

    /// `Σ (h^β_ijk)²` over all indices.
    pub fn h3_sum_sq(&self) -> f64 {
        self.h3.iter().map(|v| v * v).sum()
    }
}

/// Both levels of data from one evaluation.
#[derive(Debug, Clone)]
pub struct PointEvaluation {
    pub data: ExtrinsicData,
    pub derived: DerivedTensors,
}

impl ExtrinsicData {
    pub fn shape_operator(&self, beta: usize) -> &DMatrix<f64> {
        &self.h[beta]
    }

    /// The common sign of the normal frame, if it has one.
    pub fn normal_definite_sign(&self) -> Option<f64> {
        let first = *self.normal_signs.first()?;
        self.normal_signs.iter().all(|&s| s == first).then_some(first)
    }

    /// `⟨T, T⟩`
    pub fn t_norm_sq(&self) -> f64 {
        self.t_frame.iter().map(|v| v * v).sum()
    }

    /// `Σ_β Σ_ij (h^β_ij)²`
    pub fn alpha_frame_sq(&self) -> f64 {
        self.h.iter().map(|m| m.norm_squared()).sum()
    }

    /// `⟨H, H⟩`
    pub fn mean_curvature_sq(&self) -> f64 {
        self.mean_curvature.iter().zip(&self.ambient_metric).map(|(v, g)| g * v * v).sum()
    }

    /// Coefficients `c_β` of `α(E_i, E_j) = Σ c_β e_β`.
    pub fn alpha_coeffs(&self, i: usize, j: usize) -> Vec<f64> {
        self.h.iter().zip(&self.normal_signs).map(|(m, s)| s * m[(i, j)]).collect()
    }

    /// Shape operator of the normal vector `Σ c_β e_β`.
    pub fn shape_operator_of(&self, coeffs: &[f64]) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.dim, self.dim);
        for (c, h) in coeffs.iter().zip(&self.h) {
            a += h * *c;
        }
        a
    }

    /// `A_ξ`
    pub fn a_xi(&self) -> DMatrix<f64> {
        let coeffs: Vec<f64> = self.xi_normal.iter().zip(&self.normal_signs).map(|(x, s)| x * s).collect();
        self.shape_operator_of(&coeffs)
    }

    /// `α(X, Y)` for frame-component vectors, as normal coefficients.
    pub fn alpha_of(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.h
            .iter()
            .zip(&self.normal_signs)
            .map(|(m, s)| {
                let mut v = 0.0;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        v += x[i] * m[(i, j)] * y[j];
                    }
                }
                s * v
            })
            .collect()
    }

    /// `R⊥(E_i, E_j) V` from the Ricci equation
    /// `R⊥(X,Y)V = α(A_V Y, X) − α(A_V X, Y)`, in normal coefficients.
    pub fn normal_curvature_of(&self, i: usize, j: usize, coeffs: &[f64]) -> Vec<f64> {
        let a = self.shape_operator_of(coeffs);
        let (ei, ej) = (unit(self.dim, i), unit(self.dim, j));
        let ay: Vec<f64> = a.column(j).iter().copied().collect();
        let ax: Vec<f64> = a.column(i).iter().copied().collect();
        let p = self.alpha_of(&ay, &ei);
        let q = self.alpha_of(&ax, &ej);
        p.iter().zip(&q).map(|(p, q)| p - q).collect()
    }

    /// Scalar product of normal coefficient vectors.
    pub fn normal_product(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).zip(&self.normal_signs).map(|((a, b), s)| s * a * b).sum()
    }
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

fn vsub(a: &[Jet], b: &[Jet]) -> JVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn vadd(a: &[Jet], b: &[Jet]) -> JVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `acc += s v`
fn axpy(acc: &mut [Jet], s: &Jet, v: &[Jet]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = &*a + &(s * x);
    }
}

fn partial(v: &[Jet], k: usize) -> JVec {
    v.iter().map(|x| x.partial(k)).collect()
}

/// Jet-level state of the pipeline.
struct Geometry<'a> {
    cfg: &'a AmbientConfig,
    shape: JetShape,
    n: usize,
    d: usize,
    t: Jet,
    x: Vec<f64>,
    df: Vec<JVec>,
    h: JVec,
    /// Nonzero ambient Christoffel symbols `(A, B, C, Γ^A_BC)`.
    gamma: Vec<(usize, usize, usize, Jet)>,
    g: Vec<JVec>,
    ginv: Vec<JVec>,
    /// `α_ij`, ambient components.
    alpha: Vec<Vec<JVec>>,
    /// Induced Christoffel symbols `[k][i][j] = Γ^k_ij`.
    chris: Vec<Vec<JVec>>,
    normal: Vec<JVec>,
    normal_signs: Vec<f64>,
    frame_coeffs: DMatrix<f64>,
}

impl<'a> Geometry<'a> {
    fn new(imm: &Immersion, cfg: &'a AmbientConfig, u: &[f64], degree: usize) -> Result<Self> {
        let (t, x) = imm.chart_jets(cfg, u, degree)?;
        let shape = t.shape();
        let n = imm.dim();
        let d = cfg.dim();
        let mut f = vec![t.clone()];
        f.extend(x.iter().cloned());
        let df: Vec<JVec> = (0..n).map(|i| partial(&f, i)).collect();
        let h = cfg.metric_diagonal(&t, &x)?;
        let full = cfg.christoffel_along(&t, &x)?;
        let mut gamma = Vec::new();
        for (a, rows) in full.into_iter().enumerate() {
            for (b, row) in rows.into_iter().enumerate() {
                for (c, j) in row.into_iter().enumerate() {
                    if j.coeffs().iter().any(|v| *v != 0.0) {
                        gamma.push((a, b, c, j));
                    }
                }
            }
        }
        let mut geo = Geometry {
            cfg,
            shape,
            n,
            d,
            x: values(&x),
            t,
            df,
            h,
            gamma,
            g: Vec::new(),
            ginv: Vec::new(),
            alpha: Vec::new(),
            chris: Vec::new(),
            normal: Vec::new(),
            normal_signs: Vec::new(),
            frame_coeffs: DMatrix::zeros(n, n),
        };
        geo.g = (0..n).map(|i| (0..n).map(|j| geo.ip(&geo.df[i], &geo.df[j])).collect()).collect();
        let gval = DMatrix::from_fn(n, n, |i, j| geo.g[i][j].value());
        let lowest = symmetric_eigenvalues(&gval)[0];
        if !(lowest > SPACELIKE_TOL) {
            return Err(GeomError::NotSpacelike { eigenvalue: lowest });
        }
        geo.ginv = jet_inverse(&geo.g)?;

        let mut alpha = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let acc = vadd(&partial(&geo.df[i], j), &geo.gamma_apply(&geo.df[i], &geo.df[j]));
                let a = geo.proj_normal(&acc);
                alpha[j][i] = a.clone();
                alpha[i][j] = a;
            }
        }
        geo.alpha = alpha;

        // Γ^k_ij = ½ g^{kl} (∂_i g_lj + ∂_j g_li − ∂_l g_ij)
        let dg: Vec<Vec<JVec>> = (0..n).map(|e| (0..n).map(|a| partial(&geo.g[a], e)).collect()).collect();
        let mut chris = vec![vec![vec![shape.zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let first = (&(&dg[i][l][j] + &dg[j][l][i]) - &dg[l][i][j]).scale(0.5);
                    for (k, row) in chris.iter_mut().enumerate() {
                        row[i][j] = &row[i][j] + &(&geo.ginv[k][l] * &first);
                    }
                }
            }
        }
        geo.chris = chris;
        geo.build_frames()?;
        Ok(geo)
    }

    fn ip(&self, x: &[Jet], y: &[Jet]) -> Jet {
        let mut s = self.shape.zero();
        for a in 0..self.d {
            s = &s + &(&self.h[a] * &(&x[a] * &y[a]));
        }
        s
    }

    fn gamma_apply(&self, x: &[Jet], y: &[Jet]) -> JVec {
        let mut out = vec![self.shape.zero(); self.d];
        for (a, b, c, g) in &self.gamma {
            out[*a] = &out[*a] + &(g * &(&x[*b] * &y[*c]));
        }
        out
    }

    /// `g^{ij}⟨v, ∂_j F⟩`
    fn tangent_coeffs(&self, v: &[Jet]) -> JVec {
        let dots: JVec = self.df.iter().map(|t| self.ip(v, t)).collect();
        (0..self.n)
            .map(|i| {
                let mut s = self.shape.zero();
                for (j, dot) in dots.iter().enumerate() {
                    s = &s + &(&self.ginv[i][j] * dot);
                }
                s
            })
            .collect()
    }

    fn tangent_vector(&self, c: &[Jet]) -> JVec {
        let mut out = vec![self.shape.zero(); self.d];
        for (ci, t) in c.iter().zip(&self.df) {
            axpy(&mut out, ci, t);
        }
        out
    }

    fn proj_tangent(&self, v: &[Jet]) -> JVec {
        self.tangent_vector(&self.tangent_coeffs(v))
    }

    fn proj_normal(&self, v: &[Jet]) -> JVec {
        vsub(v, &self.proj_tangent(v))
    }

    /// `∇̄_{∂_k} V` for a vector field along the immersion.
    fn ambient_derivative(&self, k: usize, v: &[Jet]) -> JVec {
        vadd(&partial(v, k), &self.gamma_apply(&self.df[k], v))
    }

    fn normal_derivative(&self, k: usize, v: &[Jet]) -> JVec {
        self.proj_normal(&self.ambient_derivative(k, v))
    }

    fn basis(&self, a: usize) -> JVec {
        (0..self.d).map(|b| self.shape.constant(if a == b { 1.0 } else { 0.0 })).collect()
    }

    fn build_frames(&mut self) -> Result<()> {
        let n = self.n;
        let gval = DMatrix::from_fn(n, n, |i, j| self.g[i][j].value());
        let mut coeffs = DMatrix::zeros(n, n);
        for a in 0..n {
            let mut c = DVector::from_fn(n, |i, _| if i == a { 1.0 } else { 0.0 });
            for b in 0..a {
                let prev: DVector<f64> = coeffs.row(b).transpose();
                let dot = c.dot(&(&gval * &prev));
                c -= prev * dot;
            }
            let norm = c.dot(&(&gval * &c)).sqrt();
            for i in 0..n {
                coeffs[(a, i)] = c[i] / norm;
            }
        }
        self.frame_coeffs = coeffs;

        let mut normal: Vec<JVec> = Vec::new();
        let mut signs = Vec::new();
        for a in 0..self.d {
            let mut w = self.proj_normal(&self.basis(a));
            for (e, s) in normal.iter().zip(&signs) {
                let dot = self.ip(&w, e).scale(*s);
                w = vsub(&w, &e.iter().map(|x| &dot * x).collect::<JVec>());
            }
            let q = self.ip(&w, &w);
            if q.value().abs() < FRAME_SKIP_TOL {
                continue;
            }
            let sign = q.value().signum();
            let inv = q.scale(sign).pow_rational(-1, 2)?;
            normal.push(w.iter().map(|x| x * &inv).collect());
            signs.push(sign);
        }
        if normal.len() != self.d - n {
            return Err(GeomError::Frame(format!("found {} normal directions, expected {}", normal.len(), self.d - n)));
        }
        self.normal = normal;
        self.normal_signs = signs;
        Ok(())
    }

    /// Frame vectors `E_a` as ambient components.
    fn tangent_frame(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|a| {
                (0..self.d)
                    .map(|c| (0..self.n).map(|i| self.frame_coeffs[(a, i)] * self.df[i][c].value()).sum())
                    .collect()
            })
            .collect()
    }

    fn hval(&self) -> Vec<f64> {
        values(&self.h)
    }

    /// `⟨v, e_β⟩` for every `β`.
    fn normal_components(&self, v: &[f64]) -> Vec<f64> {
        let h = self.hval();
        self.normal.iter().map(|e| (0..self.d).map(|a| h[a] * v[a] * e[a].value()).sum()).collect()
    }

    /// Converts a coordinate 2-tensor to the tangent frame.
    fn to_frame2(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.frame_coeffs * m * self.frame_coeffs.transpose()
    }

    /// `T = Σ T^i ∂_i F` with `T^i = g^{ij}⟨∂t, ∂_j F⟩`.
    fn t_coeffs(&self) -> JVec {
        self.tangent_coeffs(&self.basis(0))
    }

    fn extrinsic(&self, u: &[f64]) -> Result<ExtrinsicData> {
        let (n, d) = (self.n, self.d);
        let m = d - n;
        let point = ChartPoint::new(self.t.value(), self.x.clone());
        let warp = self.cfg.warp_scalars(self.t.value())?;
        let hv = self.hval();
        let eps = self.cfg.epsilon();

        let mut h = vec![DMatrix::zeros(n, n); m];
        for i in 0..n {
            for j in 0..n {
                let comps = self.normal_components(&values(&self.alpha[i][j]));
                for (b, v) in comps.into_iter().enumerate() {
                    h[b][(i, j)] = v;
                }
            }
        }
        let h: Vec<DMatrix<f64>> = h.iter().map(|c| self.to_frame2(c)).collect();

        let mut weingarten = vec![DMatrix::zeros(n, n); m];
        for (b, e) in self.normal.iter().enumerate() {
            let mut coord = DMatrix::zeros(n, n);
            for k in 0..n {
                let de = self.ambient_derivative(k, e);
                for j in 0..n {
                    coord[(k, j)] = -self.ip(&de, &self.df[j]).value();
                }
            }
            weingarten[b] = self.to_frame2(&coord);
        }

        let ginv = DMatrix::from_fn(n, n, |i, j| self.ginv[i][j].value());
        let mut mean = vec![0.0; d];
        for i in 0..n {
            for j in 0..n {
                for (a, v) in self.alpha[i][j].iter().enumerate() {
                    mean[a] += ginv[(i, j)] * v.value() / n as f64;
                }
            }
        }

        let tangent_frame = self.tangent_frame();
        let normal_frame: Vec<Vec<f64>> = self.normal.iter().map(|e| values(e)).collect();
        let t_frame: Vec<f64> = tangent_frame.iter().map(|e| eps * e[0]).collect();
        let xi_normal: Vec<f64> = normal_frame.iter().map(|e| eps * e[0]).collect();

        let mut frame = Residual::default();
        let all: Vec<(&Vec<f64>, f64)> = tangent_frame
            .iter()
            .map(|e| (e, 1.0))
            .chain(normal_frame.iter().zip(self.normal_signs.iter().copied()))
            .collect();
        for (p, (x, sx)) in all.iter().enumerate() {
            for (q, (y, _)) in all.iter().enumerate() {
                let dot: f64 = (0..d).map(|a| hv[a] * x[a] * y[a]).sum();
                let target = if p == q { *sx } else { 0.0 };
                frame.absorb_arrays(&[dot], &[target]);
            }
        }
        let mut weingarten_res = Residual::default();
        for (w, hb) in weingarten.iter().zip(&h) {
            weingarten_res.absorb_arrays(w.as_slice(), hb.as_slice());
        }

        let structure = StructureResiduals {
            ambient_dt: self.ambient_dt_residual(&warp),
            tangent_t: self.tangent_t_residual(&warp),
            normal_xi: self.normal_xi_residual(&warp),
            weingarten: weingarten_res,
            frame,
        };

        Ok(ExtrinsicData {
            u: u.to_vec(),
            point,
            dim: n,
            codim: m,
            epsilon: eps,
            ambient_metric: hv,
            coord_tangents: self.df.iter().map(|v| values(v)).collect(),
            induced_metric: DMatrix::from_fn(n, n, |i, j| self.g[i][j].value()),
            frame_coeffs: self.frame_coeffs.clone(),
            tangent_frame,
            normal_frame,
            normal_signs: self.normal_signs.clone(),
            h,
            weingarten,
            mean_curvature: mean,
            t_frame,
            xi_normal,
            warp,
            structure,
        })
    }

    fn ambient_dt_residual(&self, warp: &WarpScalars) -> Residual {
        let e0 = self.basis(0);
        let mut r = Residual::default();
        for k in 0..self.n {
            let lhs = values(&self.gamma_apply(&self.df[k], &e0));
            let x = values(&self.df[k]);
            let rhs: Vec<f64> =
                (0..self.d).map(|a| warp.da / warp.a * (x[a] - if a == 0 { x[0] } else { 0.0 })).collect();
            r.absorb_arrays(&lhs, &rhs);
        }
        r
    }

    fn tangent_t_residual(&self, warp: &WarpScalars) -> Residual {
        let eps = self.cfg.epsilon();
        let tc = self.t_coeffs();
        let t = self.tangent_vector(&tc);
        let xi = vsub(&self.basis(0), &t);
        let tv = values(&t);
        let mut r = Residual::default();
        for k in 0..self.n {
            let lhs = values(&self.proj_tangent(&self.ambient_derivative(k, &t)));
            let x = values(&self.df[k]);
            let xt = self.ip(&self.df[k], &t).value();
            // A_ξ ∂_k F = g^{ij}⟨α_kj, ξ⟩ ∂_i F
            let mut rhs: Vec<f64> = (0..self.d).map(|a| warp.da / warp.a * (x[a] - eps * xt * tv[a])).collect();
            for i in 0..self.n {
                let c: f64 =
                    (0..self.n).map(|j| self.ginv[i][j].value() * self.ip(&self.alpha[k][j], &xi).value()).sum();
                for (a, v) in rhs.iter_mut().enumerate() {
                    *v += c * self.df[i][a].value();
                }
            }
            r.absorb_arrays(&lhs, &rhs);
        }
        r
    }

    fn normal_xi_residual(&self, warp: &WarpScalars) -> Residual {
        let eps = self.cfg.epsilon();
        let tc = self.t_coeffs();
        let t = self.tangent_vector(&tc);
        let xi = vsub(&self.basis(0), &t);
        let xiv = values(&xi);
        let mut r = Residual::default();
        for k in 0..self.n {
            let lhs = values(&self.normal_derivative(k, &xi));
            let xt = self.ip(&self.df[k], &t).value();
            let mut rhs: Vec<f64> = xiv.iter().map(|v| -eps * warp.da / warp.a * xt * v).collect();
            for (j, c) in tc.iter().enumerate() {
                for (a, v) in rhs.iter_mut().enumerate() {
                    *v -= c.value() * self.alpha[k][j][a].value();
                }
            }
            r.absorb_arrays(&lhs, &rhs);
        }
        r
    }

    fn derived(&self, data: &ExtrinsicData) -> Result<DerivedTensors> {
        let (n, d) = (self.n, self.d);
        let m = d - n;
        if self.shape.degree() < MAX_DEGREE {
            return Err(GeomError::Config(format!("second covariant derivatives need jets of degree {MAX_DEGREE}")));
        }
        let zero = vec![self.shape.zero(); d];

        // d1[k][i][j] = (∇_k α)_ij
        let mut d1 = vec![vec![vec![zero.clone(); n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut v = self.normal_derivative(k, &self.alpha[i][j]);
                    for l in 0..n {
                        v = vsub(&v, &self.alpha[l][j].iter().map(|x| &self.chris[l][k][i] * x).collect::<JVec>());
                        v = vsub(&v, &self.alpha[i][l].iter().map(|x| &self.chris[l][k][j] * x).collect::<JVec>());
                    }
                    d1[k][j][i] = v.clone();
                    d1[k][i][j] = v;
                }
            }
        }

        // d2[l][k][i][j] = (∇²_{l,k} α)_ij, values only
        let mut d2 = vec![vec![vec![vec![vec![0.0; d]; n]; n]; n]; n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in i..n {
                        let mut v = values(&self.normal_derivative(l, &d1[k][i][j]));
                        for p in 0..n {
                            let (c1, c2, c3) =
                                (self.chris[p][l][k].value(), self.chris[p][l][i].value(), self.chris[p][l][j].value());
                            for a in 0..d {
                                v[a] -= c1 * d1[p][i][j][a].value()
                                    + c2 * d1[k][p][j][a].value()
                                    + c3 * d1[k][i][p][a].value();
                            }
                        }
                        d2[l][k][j][i] = v.clone();
                        d2[l][k][i][j] = v;
                    }
                }
            }
        }

        let c = &self.frame_coeffs;
        // Normal components of d1 and d2 in coordinates, then to the frame.
        let nc1: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
            .map(|k| (0..n).map(|i| (0..n).map(|j| self.normal_components(&values(&d1[k][i][j]))).collect()).collect())
            .collect();
        let nc2: Vec<Vec<Vec<Vec<Vec<f64>>>>> = (0..n)
            .map(|l| {
                (0..n)
                    .map(|k| {
                        (0..n).map(|i| (0..n).map(|j| self.normal_components(&d2[l][k][i][j])).collect()).collect()
                    })
                    .collect()
            })
            .collect();

        let mut h3 = vec![0.0; m * n * n * n];
        for b in 0..m {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut s = 0.0;
                        for (pk, ck) in c.row(k).iter().enumerate() {
                            for (pi, ci) in c.row(i).iter().enumerate() {
                                for (pj, cj) in c.row(j).iter().enumerate() {
                                    s += ck * ci * cj * nc1[pk][pi][pj][b];
                                }
                            }
                        }
                        h3[((b * n + i) * n + j) * n + k] = s;
                    }
                }
            }
        }
        let mut h4 = vec![0.0; m * n * n * n * n];
        for b in 0..m {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut s = 0.0;
                            for pl in 0..n {
                                for pk in 0..n {
                                    for pi in 0..n {
                                        for pj in 0..n {
                                            s += c[(l, pl)]
                                                * c[(k, pk)]
                                                * c[(i, pi)]
                                                * c[(j, pj)]
                                                * nc2[pl][pk][pi][pj][b];
                                        }
                                    }
                                }
                            }
                            h4[(((b * n + i) * n + j) * n + k) * n + l] = s;
                        }
                    }
                }
            }
        }

        let norms = match data.normal_definite_sign() {
            _ if m == 0 => Ok(SquaredNorms { alpha: 0.0, nabla_alpha: 0.0, laplacian_alpha: 0.0 }),
            Some(sigma) => Ok(self.squared_norms(sigma, &h3)),
            None => Err(GeomError::UnsupportedSignature(format!(
                "normal bundle has signs {:?}; squared norms need a definite normal bundle",
                data.normal_signs
            ))),
        };

        let bj = self.cfg.big_b_jet(&self.t)?;
        let grad_b: Vec<f64> = (0..n).map(|a| (0..n).map(|i| c[(a, i)] * bj.partial_value(i)).sum()).collect();

        let coord_r = MetricDerivs::from_jets(&self.g)?.riemann()?;
        let intrinsic_riemann = Riemann4::from_fn(n, |x, y, z, w| {
            coord_r.eval(
                c.row(x).transpose().as_slice(),
                c.row(y).transpose().as_slice(),
                c.row(z).transpose().as_slice(),
                c.row(w).transpose().as_slice(),
            )
        });

        // R⊥(∂_k, ∂_l) e_β = ∇⊥_k ∇⊥_l e_β − ∇⊥_l ∇⊥_k e_β
        let first: Vec<Vec<JVec>> =
            self.normal.iter().map(|e| (0..n).map(|k| self.normal_derivative(k, e)).collect()).collect();
        let mut coord_rn = vec![vec![vec![vec![0.0; m]; m]; n]; n];
        for (b, fb) in first.iter().enumerate() {
            for k in 0..n {
                for l in 0..n {
                    let lhs = values(&self.normal_derivative(k, &fb[l]));
                    let rhs = values(&self.normal_derivative(l, &fb[k]));
                    let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
                    coord_rn[k][l][b] = self.normal_components(&diff);
                }
            }
        }
        let mut normal_curvature = vec![0.0; n * n * m * m];
        for i in 0..n {
            for j in 0..n {
                for b in 0..m {
                    for g in 0..m {
                        let mut s = 0.0;
                        for k in 0..n {
                            for l in 0..n {
                                s += c[(i, k)] * c[(j, l)] * coord_rn[k][l][b][g];
                            }
                        }
                        normal_curvature[((i * n + j) * m + b) * m + g] = s;
                    }
                }
            }
        }

        Ok(DerivedTensors { dim: n, codim: m, h3, h4, norms, grad_b, intrinsic_riemann, normal_curvature })
    }

    fn squared_norms(&self, sigma: f64, h3: &[f64]) -> SquaredNorms {
        let n = self.n;
        // |α|² = σ g^{ik} g^{jl} ⟨α_ij, α_kl⟩ as a jet
        let mut s = self.shape.zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let w = &self.ginv[i][k] * &self.ginv[j][l];
                        s = &s + &(&w * &self.ip(&self.alpha[i][j], &self.alpha[k][l]));
                    }
                }
            }
        }
        let s = s.scale(sigma);
        // Δ = g^{ij}(∂_i∂_j − Γ^k_ij ∂_k)
        let mut lap = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut inner = s.second_partial_value(i, j);
                for k in 0..n {
                    inner -= self.chris[k][i][j].value() * s.partial_value(k);
                }
                lap += self.ginv[i][j].value() * inner;
            }
        }
        SquaredNorms { alpha: s.value(), nabla_alpha: h3.iter().map(|v| v * v).sum(), laplacian_alpha: lap }
    }
}

/// First-order data at `u`.
pub fn extrinsic_at(imm: &Immersion, cfg: &AmbientConfig, u: &[f64]) -> Result<ExtrinsicData> {
    let geo = Geometry::new(imm, cfg, u, 2)?;
    geo.extrinsic(u)
}

/// Second-order data at `u`.
pub fn derived_at(imm: &Immersion, cfg: &AmbientConfig, u: &[f64]) -> Result<DerivedTensors> {
    Ok(evaluate_point(imm, cfg, u)?.derived)
}

/// First- and second-order data from a single degree-4 evaluation.
pub fn evaluate_point(imm: &Immersion, cfg: &AmbientConfig, u: &[f64]) -> Result<PointEvaluation> {
    let geo = Geometry::new(imm, cfg, u, MAX_DEGREE)?;
    let data = geo.extrinsic(u)?;
    let derived = geo.derived(&data)?;
    Ok(PointEvaluation { data, derived })
}
