//! Pointwise identities of spacelike submanifolds in warped products and
//! the threshold test for geodesic points.
//!
//! Frame conventions follow [`crate::extrinsic`]: `h[β]` is the matrix of
//! `A_β` in an orthonormal tangent frame, normal vectors are written as
//! coefficients in the normal frame, and `T_a = ⟨T, E_a⟩`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ambient::AmbientConfig;
use crate::error::{GeomError, Result};
use crate::extrinsic::{unit, DerivedTensors, ExtrinsicData};
use crate::immersion::{Immersion, ImmersionSpec};
use crate::linalg::{symmetric_eigenvalues, trace_product};
use crate::residual::Residual;
use crate::tensor::Riemann4;

/// Norm of the `ψ` coefficient block below which `ψ` is left undetermined.
pub const UNDERDETERMINED_TOL: f64 = 1e-12;
/// Mean curvature bound for a point to count as extremal.
pub const EXTREMAL_TOL: f64 = 1e-10;

fn kron(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// `R̄(E_i,E_j,E_k,E_l)` for tangent frame vectors.
fn ambient_curvature(data: &ExtrinsicData, i: usize, j: usize, k: usize, l: usize) -> f64 {
    let t = &data.t_frame;
    let (b, big_b) = (data.warp.b, data.warp.big_b);
    b * (kron(i, k) * kron(j, l) - kron(j, k) * kron(i, l))
        + big_b
            * (kron(i, k) * t[j] * t[l] - kron(j, k) * t[i] * t[l] + kron(j, l) * t[i] * t[k]
                - kron(i, l) * t[j] * t[k])
}

/// Right-hand side of the Gauss equation,
/// `R̄(X,Y,Z,W) − ⟨α(X,Z),α(Y,W)⟩ + ⟨α(X,W),α(Y,Z)⟩`.
pub fn gauss_curvature(data: &ExtrinsicData) -> Riemann4 {
    let n = data.dim;
    let alpha: Vec<Vec<Vec<f64>>> = (0..n).map(|i| (0..n).map(|j| data.alpha_coeffs(i, j)).collect()).collect();
    Riemann4::from_fn(n, |i, j, k, l| {
        ambient_curvature(data, i, j, k, l) - data.normal_product(&alpha[i][k], &alpha[j][l])
            + data.normal_product(&alpha[i][l], &alpha[j][k])
    })
}

/// Gauss, Codazzi and Ricci residuals at one point.
#[derive(Debug, Clone)]
pub struct FundamentalResiduals {
    pub gauss: Residual,
    pub codazzi: Residual,
    pub ricci: Residual,
}

pub fn check_fundamental(data: &ExtrinsicData, derived: &DerivedTensors) -> FundamentalResiduals {
    let (n, m) = (data.dim, data.codim);
    let rhs = gauss_curvature(data);
    let mut gauss = Residual::default();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    gauss.absorb_arrays(&[derived.intrinsic_riemann.get(i, j, k, l)], &[rhs.get(i, j, k, l)]);
                }
            }
        }
    }

    // (∇_{E_k} α)(E_i, E_j) = (∇_{E_i} α)(E_k, E_j) + B(T_i δ_kj − T_k δ_ij)⟨ξ, e_β⟩
    let t = &data.t_frame;
    let mut codazzi = Residual::default();
    for b in 0..m {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = derived.h3(b, i, j, k);
                    let swapped = derived.h3(b, k, j, i);
                    let correction = data.warp.big_b * (t[i] * kron(k, j) - t[k] * kron(i, j)) * data.xi_normal[b];
                    codazzi.abs = codazzi.abs.max((lhs - swapped - correction).abs());
                    codazzi.scale = codazzi.scale.max(lhs.abs()).max(swapped.abs()).max(correction.abs());
                }
            }
        }
    }

    let mut ricci = Residual::default();
    for i in 0..n {
        for j in 0..n {
            for b in 0..m {
                let from_shape = data.normal_curvature_of(i, j, &unit(m, b));
                for g in 0..m {
                    ricci.absorb_arrays(
                        &[derived.normal_curvature(i, j, b, g)],
                        &[data.normal_signs[g] * from_shape[g]],
                    );
                }
            }
        }
    }
    FundamentalResiduals { gauss, codazzi, ricci }
}

/// Left-hand side `½Δ|α|²` and the eight right-hand terms of the Simons-type
/// formula.
#[derive(Debug, Clone, PartialEq)]
pub struct SimonsTerms {
    pub half_laplacian: f64,
    pub t: [f64; 8],
}

impl SimonsTerms {
    pub const NAMES: [&'static str; 8] = ["T0", "T1", "T2", "T3", "T4", "T5", "T6", "T7"];

    pub fn residual(&self) -> Residual {
        let terms: Vec<(&str, f64)> = Self::NAMES.iter().copied().zip(self.t).collect();
        Residual::from_terms(("half_laplacian", self.half_laplacian), &terms)
    }
}

fn quad(a: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| x[i] * a[(i, j)] * y[j]).sum::<f64>()).sum()
}

fn apply(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|i| (0..x.len()).map(|j| a[(i, j)] * x[j]).sum()).collect()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `Σ_{β,γ} ε_γ (tr A_γ tr(A_β² A_γ) + tr([A_β,A_γ]²) − tr(A_β A_γ)²)`
fn normal_algebra_sum(data: &ExtrinsicData) -> f64 {
    let mut s = 0.0;
    for a_b in &data.h {
        for (a_g, eps_g) in data.h.iter().zip(&data.normal_signs) {
            let comm = a_b * a_g - a_g * a_b;
            let sq = a_b * a_b;
            s += eps_g
                * (a_g.trace() * trace_product(&sq, a_g) + trace_product(&comm, &comm)
                    - trace_product(a_b, a_g).powi(2));
        }
    }
    s
}

fn require_definite(data: &ExtrinsicData) -> Result<f64> {
    if data.codim == 0 {
        return Ok(1.0);
    }
    data.normal_definite_sign().ok_or_else(|| {
        GeomError::UnsupportedSignature(format!(
            "normal frame signs {:?} are mixed; the Simons-type terms need a definite normal bundle",
            data.normal_signs
        ))
    })
}

pub fn simons_terms(data: &ExtrinsicData, derived: &DerivedTensors) -> Result<SimonsTerms> {
    require_definite(data)?;
    let norms = derived.norms.clone()?;
    let (n, m) = (data.dim, data.codim);
    let nf = n as f64;
    let w = &data.warp;
    let t = &data.t_frame;
    let tt = dot(t, t);
    let a_xi = data.a_xi();
    let mut terms = [0.0; 8];
    for b in 0..m {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    terms[0] += data.h[b][(i, j)] * derived.h4(b, k, k, j, i);
                }
            }
        }
    }
    terms[1] = derived.h3_sum_sq();
    for (a, xi) in data.h.iter().zip(&data.xi_normal) {
        let tr = a.trace();
        let at = apply(a, t);
        let att = dot(&at, t);
        // (n A − tr A) T
        let shifted: Vec<f64> = at.iter().zip(t).map(|(x, y)| nf * x - tr * y).collect();
        terms[2] += dot(&derived.grad_b, &shifted) * xi;
        terms[3] -= w.db * dot(&shifted, t) * xi;
        terms[4] += w.big_b * (nf * trace_product(&a_xi, a) - a_xi.trace() * tr) * xi;
        let tr2 = trace_product(a, a);
        terms[5] += w.big_b * (3.0 * att * tr - 2.0 * nf * dot(&at, &at) - tt * tr2);
        terms[6] += w.b * (tr * tr - nf * tr2);
    }
    terms[7] = normal_algebra_sum(data);
    Ok(SimonsTerms { half_laplacian: 0.5 * norms.laplacian_alpha, t: terms })
}

/// Specializations of the Simons-type formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimonsVariant {
    /// All eight terms, any codimension.
    General,
    /// Codimension one, written with `A`, `H` and `S = tr A²`.
    Hypersurface,
    /// Hypersurfaces of Riemannian space forms.
    NomizuSmyth,
    /// Hypersurfaces of constant-curvature warped products.
    ConstantCurvature,
    /// `ε = 1`, `a ≡ 1`, Riemannian fiber.
    ProductSpace,
}

impl SimonsVariant {
    pub const ALL: [SimonsVariant; 5] = [
        SimonsVariant::General,
        SimonsVariant::Hypersurface,
        SimonsVariant::NomizuSmyth,
        SimonsVariant::ConstantCurvature,
        SimonsVariant::ProductSpace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimonsVariant::General => "general",
            SimonsVariant::Hypersurface => "hypersurface",
            SimonsVariant::NomizuSmyth => "nomizu_smyth",
            SimonsVariant::ConstantCurvature => "constant_curvature",
            SimonsVariant::ProductSpace => "product_space",
        }
    }
}

fn precondition(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(GeomError::Precondition(what.to_string()))
    }
}

/// Whether the warp is identically 1, judged at probe points of the interval.
fn warp_is_unit(cfg: &AmbientConfig) -> Result<bool> {
    for t in cfg.interval().probe_points(9) {
        let w = cfg.warp_scalars(t)?;
        if (w.a - 1.0).abs() > 1e-12 || w.da.abs() > 1e-12 || w.dda.abs() > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Residual of `½Δ|α|² = Σ terms` for the chosen specialization, after
/// checking its hypotheses.
pub fn check_simons(
    data: &ExtrinsicData,
    derived: &DerivedTensors,
    cfg: &AmbientConfig,
    variant: SimonsVariant,
) -> Result<Residual> {
    let general = simons_terms(data, derived)?;
    if variant == SimonsVariant::General {
        return Ok(general.residual());
    }
    let lhs = ("half_laplacian", general.half_laplacian);
    let (t0, t1, t7) = (general.t[0], general.t[1], general.t[7]);
    let nf = data.dim as f64;
    let w = &data.warp;
    if variant == SimonsVariant::ProductSpace {
        precondition(data.epsilon == 1.0, "product space needs epsilon = 1")?;
        precondition(cfg.fiber_index() == 0, "product space needs a Riemannian fiber")?;
        precondition(warp_is_unit(cfg)?, "product space needs the warp a = 1")?;
        let c = cfg.fiber_curvature();
        let t = &data.t_frame;
        let tt = dot(t, t);
        let (mut shape, mut trace_sq) = (0.0, 0.0);
        for a in &data.h {
            let at = apply(a, t);
            shape += (nf - tt) * trace_product(a, a) - 2.0 * nf * dot(&at, &at) + 3.0 * a.trace() * quad(a, t, t);
            trace_sq += a.trace().powi(2);
        }
        let a_xi = data.a_xi();
        let xi_term = nf * trace_product(&a_xi, &a_xi) - a_xi.trace().powi(2);
        return Ok(Residual::from_terms(
            lhs,
            &[("T1", t1), ("T0", t0), ("shape", c * shape), ("trace", -c * trace_sq), ("xi", c * xi_term), ("T7", t7)],
        ));
    }

    precondition(data.codim == 1, "variant needs a hypersurface")?;
    let a = &data.h[0];
    let delta = data.normal_signs[0];
    let h = a.trace() / nf;
    let s = trace_product(a, a);
    let tr3 = trace_product(&(a * a), a);
    let cubic = delta * (nf * h * tr3 - s * s);
    match variant {
        SimonsVariant::Hypersurface => {
            precondition(delta == data.epsilon, "hypersurface variant needs the normal sign to equal epsilon")?;
            let t = &data.t_frame;
            let xi = data.xi_normal[0];
            let shifted: Vec<f64> = apply(a, t).iter().zip(t).map(|(x, y)| x - h * y).collect();
            let at = apply(a, t);
            Ok(Residual::from_terms(
                lhs,
                &[
                    ("T0", t0),
                    ("T1", t1),
                    ("grad_b", nf * dot(&derived.grad_b, &shifted) * xi),
                    ("db", -nf * w.db * dot(t, &shifted) * xi),
                    ("xi", nf * (data.epsilon * w.dda / w.a - w.b) * (s - nf * h * h) * xi * xi),
                    ("big_b", w.big_b * (3.0 * nf * quad(a, t, t) * h - 2.0 * nf * dot(&at, &at) - dot(t, t) * s)),
                    ("b", w.b * (nf * nf * h * h - nf * s)),
                    ("cubic", cubic),
                ],
            ))
        }
        SimonsVariant::NomizuSmyth => {
            precondition(data.epsilon == 1.0 && cfg.fiber_index() == 0, "variant needs a Riemannian ambient")?;
            let kappa = cfg
                .constant_curvature()?
                .ok_or_else(|| GeomError::Precondition("ambient does not have constant curvature".into()))?;
            Ok(Residual::from_terms(
                lhs,
                &[
                    ("T1", t1),
                    ("T0", t0),
                    ("kappa", kappa * nf * (s - nf * h * h)),
                    ("s_sq", -s * s),
                    ("h_tr3", nf * h * tr3),
                ],
            ))
        }
        SimonsVariant::ConstantCurvature => {
            let kappa = cfg
                .constant_curvature()?
                .ok_or_else(|| GeomError::Precondition("ambient does not have constant curvature".into()))?;
            Ok(Residual::from_terms(
                lhs,
                &[("T1", t1), ("T0", t0), ("kappa", nf * kappa * (s - nf * h * h)), ("cubic", cubic)],
            ))
        }
        SimonsVariant::General | SimonsVariant::ProductSpace => unreachable!("handled above"),
    }
}

/// Both sides of
/// `κ(n trA² − (trA)²) + δ(trA trA³ − (trA²)²) = Σ_{i<j} (λ_i − λ_j)²(κ + δ λ_i λ_j)`.
pub fn eigenvalue_identity(a: &DMatrix<f64>, kappa: f64, delta: f64) -> Residual {
    let nf = a.nrows() as f64;
    let tr = a.trace();
    let tr2 = trace_product(a, a);
    let tr3 = trace_product(&(a * a), a);
    let lhs = kappa * (nf * tr2 - tr * tr) + delta * (tr * tr3 - tr2 * tr2);
    let ev = symmetric_eigenvalues(a);
    let mut rhs = 0.0;
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            rhs += (ev[i] - ev[j]).powi(2) * (kappa + delta * ev[i] * ev[j]);
        }
    }
    Residual::from_terms(("lhs", lhs), &[("rhs", rhs)])
}

/// The pseudo-parallel residual `r(ψ) = r₀ + ψ r₁` over all frame 4-tuples
/// `(E_i, E_j, E_k, E_l)`, as normal coefficients, where
/// `r(ψ) = R⊥(X,Y)α(Z,W) − α(R(X,Y)Z,W) − α(Z,R(X,Y)W)
///       + ψ(⟨Y,Z⟩α(X,W) − ⟨X,Z⟩α(Y,W) + ⟨Y,W⟩α(X,Z) − ⟨X,W⟩α(Y,Z))`.
/// `R` comes from the Gauss equation and `R⊥` from the Ricci equation.
pub fn pseudo_parallel_blocks(data: &ExtrinsicData) -> (Vec<f64>, Vec<f64>) {
    let (n, m) = (data.dim, data.codim);
    let r = gauss_curvature(data);
    let alpha: Vec<Vec<Vec<f64>>> = (0..n).map(|i| (0..n).map(|j| data.alpha_coeffs(i, j)).collect()).collect();
    let mut r0 = Vec::with_capacity(n.pow(4) * m);
    let mut r1 = Vec::with_capacity(n.pow(4) * m);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let rn = data.normal_curvature_of(i, j, &alpha[k][l]);
                    for b in 0..m {
                        let mut v = rn[b];
                        for p in 0..n {
                            // R(E_i,E_j)E_k = Σ_p R(i,j,k,p) E_p
                            v -= r.get(i, j, k, p) * alpha[p][l][b] + r.get(i, j, l, p) * alpha[k][p][b];
                        }
                        r0.push(v);
                        r1.push(
                            kron(j, k) * alpha[i][l][b] - kron(i, k) * alpha[j][l][b] + kron(j, l) * alpha[i][k][b]
                                - kron(i, l) * alpha[j][k][b],
                        );
                    }
                }
            }
        }
    }
    (r0, r1)
}

/// Largest component of the pseudo-parallel residual at `ψ`.
pub fn pseudo_residual(data: &ExtrinsicData, psi: f64) -> f64 {
    let (r0, r1) = pseudo_parallel_blocks(data);
    r0.iter().zip(&r1).fold(0.0_f64, |m, (a, b)| m.max((a + psi * b).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoParallelFit {
    pub psi_hat: f64,
    /// Largest residual component at `psi_hat`.
    pub residual_norm: f64,
    /// Set when the `ψ` coefficients vanish, so any `ψ` fits equally well.
    pub underdetermined: bool,
}

/// Least-squares `ψ` for the pseudo-parallel equation.
pub fn fit_psi(data: &ExtrinsicData) -> PseudoParallelFit {
    let (r0, r1) = pseudo_parallel_blocks(data);
    let nn: f64 = r1.iter().map(|v| v * v).sum();
    let underdetermined = nn.sqrt() < UNDERDETERMINED_TOL;
    let psi_hat = if underdetermined { 0.0 } else { -r0.iter().zip(&r1).map(|(a, b)| a * b).sum::<f64>() / nn };
    let residual_norm = r0.iter().zip(&r1).fold(0.0_f64, |m, (a, b)| m.max((a + psi_hat * b).abs()));
    PseudoParallelFit { psi_hat, residual_norm, underdetermined }
}

/// Residual of the identity satisfied by `ψ`-pseudo-parallel immersions:
/// `Σ_β B(n‖A_βT‖² − 2⟨A_βT,T⟩trA_β + ‖T‖²trA_β²) + Σ_β (ψ + b)(n trA_β² − (trA_β)²)
///  − Σ_{β,γ} ε_γ(trA_γ tr(A_β²A_γ) + tr([A_β,A_γ]²) − tr(A_βA_γ)²) = 0`.
/// `pseudo_tol` bounds [`pseudo_residual`] at `psi`.
pub fn check_pp_identity(data: &ExtrinsicData, psi: f64, pseudo_tol: f64) -> Result<Residual> {
    let defect = pseudo_residual(data, psi);
    if !(defect <= pseudo_tol) {
        return Err(GeomError::Precondition(format!(
            "not pseudo-parallel with psi = {psi}: residual {defect:e} exceeds {pseudo_tol:e}"
        )));
    }
    let nf = data.dim as f64;
    let w = &data.warp;
    let t = &data.t_frame;
    let tt = dot(t, t);
    let (mut big_b, mut psi_b) = (0.0, 0.0);
    for a in &data.h {
        let at = apply(a, t);
        let tr = a.trace();
        let tr2 = trace_product(a, a);
        big_b += w.big_b * (nf * dot(&at, &at) - 2.0 * dot(&at, t) * tr + tt * tr2);
        psi_b += (psi + w.b) * (nf * tr2 - tr * tr);
    }
    let algebra = -normal_algebra_sum(data);
    Ok(Residual::from_terms(("zero", 0.0), &[("big_b", big_b), ("psi_b", psi_b), ("T7", algebra)]))
}

/// Signature case used for the geodesic threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdCase {
    /// `s = 0`, `ε = 1`: hypotheses `B ≥ 0`, `ψ ≥ ψ*`.
    Riemannian,
    /// `s = 0`, `ε = −1`: hypotheses `B ≤ 0`, `ψ ≤ ψ*`.
    LorentzianRw,
    /// `0 < s = m + (1+ε)/2`: hypotheses `B ≤ 0`, `ψ ≤ ψ*`.
    DefiniteNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    /// Hypotheses hold, so `α` must vanish.
    GeodesicPoint,
    /// The point is extremal but a hypothesis fails.
    HypothesesFail,
    /// `H ≠ 0`; only the threshold values are meaningful.
    NotExtremal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub big_b: f64,
    pub psi_star: f64,
    pub psi: f64,
    pub case: ThresholdCase,
    pub prediction: Prediction,
    pub t_norm_sq: f64,
    pub mean_curvature_sq: f64,
    /// `Σ (h^β_ij)²`
    pub alpha_sq: f64,
    /// The sign condition on `B` is dropped when `A_β T = 0` for every `β`.
    pub b_condition_waived: bool,
}

/// Threshold `ψ* = −(1/n)(B‖T‖² + n b)` and the resulting prediction for
/// the given `ψ`.
pub fn geodesic_threshold(cfg: &AmbientConfig, data: &ExtrinsicData, psi: f64) -> Result<Threshold> {
    let eps = cfg.epsilon();
    let s = cfg.fiber_index();
    let m = cfg.fiber_dim() - data.dim;
    let case = if s == 0 && eps == 1.0 {
        ThresholdCase::Riemannian
    } else if s == 0 && eps == -1.0 {
        ThresholdCase::LorentzianRw
    } else if s > 0 && s == m + usize::from(eps > 0.0) {
        ThresholdCase::DefiniteNegative
    } else {
        return Err(GeomError::Case(format!("epsilon = {eps}, s = {s}, m = {m}")));
    };
    let nf = data.dim as f64;
    let w = &data.warp;
    let tt = data.t_norm_sq();
    let psi_star = -(w.big_b * tt + nf * w.b) / nf;
    let mean_curvature_sq = data.mean_curvature_sq();
    let waived = data.h.iter().all(|a| apply(a, &data.t_frame).iter().all(|v| v.abs() <= EXTREMAL_TOL));
    let slack = 1e-10;
    let prediction = if mean_curvature_sq.abs().sqrt() > EXTREMAL_TOL {
        Prediction::NotExtremal
    } else {
        let holds = match case {
            ThresholdCase::Riemannian => (waived || w.big_b >= -slack) && psi >= psi_star - slack,
            ThresholdCase::LorentzianRw | ThresholdCase::DefiniteNegative => {
                (waived || w.big_b <= slack) && psi <= psi_star + slack
            }
        };
        if holds {
            Prediction::GeodesicPoint
        } else {
            Prediction::HypothesesFail
        }
    };
    Ok(Threshold {
        big_b: w.big_b,
        psi_star,
        psi,
        case,
        prediction,
        t_norm_sq: tt,
        mean_curvature_sq,
        alpha_sq: data.alpha_frame_sq(),
        b_condition_waived: waived,
    })
}

/// Largest `‖R⊥(E_i,E_j)H‖` (Euclidean norm of normal coefficients), after
/// checking pseudo-parallelism with tolerance `pseudo_tol`.
pub fn mean_curvature_normal_curvature(data: &ExtrinsicData, pseudo_tol: f64) -> Result<Residual> {
    let fit = fit_psi(data);
    if !(fit.residual_norm <= pseudo_tol) {
        return Err(GeomError::Precondition(format!(
            "not pseudo-parallel: best fit residual {:e} exceeds {pseudo_tol:e}",
            fit.residual_norm
        )));
    }
    let n = data.dim;
    let mut h = vec![0.0; data.codim];
    for i in 0..n {
        for (hb, a) in h.iter_mut().zip(data.alpha_coeffs(i, i)) {
            *hb += a / n as f64;
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = data.normal_curvature_of(i, j, &h);
            worst = worst.max(v.iter().map(|x| x * x).sum::<f64>().sqrt());
        }
    }
    Ok(Residual::new(worst, 0.0))
}

/// Largest `|⟨R⊥(E_i,E_j)e_β, e_γ⟩|` from the Ricci equation.
pub fn normal_flatness(data: &ExtrinsicData) -> f64 {
    let (n, m) = (data.dim, data.codim);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for b in 0..m {
                for v in data.normal_curvature_of(i, j, &unit(m, b)) {
                    worst = worst.max(v.abs());
                }
            }
        }
    }
    worst
}

fn fresh_name(taken: &[String]) -> String {
    std::iter::once("s".to_string())
        .chain((1..).map(|k| format!("s{k}")))
        .find(|c| !taken.contains(c))
        .expect("infinite candidates")
}

/// `F(s, x) = (s, f(x))`: lifts an immersion that sits in a slice of a
/// product `ℝ × Q` (`ε = 1`, `a ≡ 1`) to a cylinder over the parameter
/// interval `s_range`. The new parameter comes first.
pub fn cylinder_lift(imm: &Immersion, cfg: &AmbientConfig, s_range: [f64; 2]) -> Result<Immersion> {
    precondition(cfg.epsilon() == 1.0, "cylinder lift needs epsilon = 1")?;
    precondition(warp_is_unit(cfg)?, "cylinder lift needs the warp a = 1")?;
    let t = &imm.components()[0];
    if imm.params().iter().any(|p| t.depends_on(p)) {
        return Err(GeomError::Precondition("the t component depends on the parameters".into()));
    }
    let spec = imm.spec();
    let mut taken = spec.params.clone();
    taken.extend(spec.constants.keys().cloned());
    let s = fresh_name(&taken);
    let params: Vec<String> = std::iter::once(s.clone()).chain(spec.params.iter().cloned()).collect();
    let mut domain = vec![s_range];
    domain.extend(spec.domain.iter().copied());
    let sample_region = spec.sample_region.as_ref().map(|r| {
        let mut v = vec![s_range];
        v.extend(r.iter().copied());
        v
    });
    let mut exprs = imm.components().to_vec();
    exprs[0] = crate::exprlang::Expr::var(&s);
    Immersion::from_exprs(
        ImmersionSpec {
            params,
            components: Vec::new(),
            domain,
            sample_region,
            hyperquadric: spec.hyperquadric,
            constants: spec.constants.clone(),
        },
        exprs,
    )
}
