//! Warped products `ε I ×_a Q_s^N(c)` in a conformal fiber chart.
//!
//! Slot 0 is the base coordinate `t`; slots `1..=N` are conformal
//! coordinates `x` on the fiber, in which the fiber metric is `φ(x)² η` with
//! `φ = 1 / (1 + (c/4)⟨x,x⟩_η)` and `η = diag(+1 × (N−s), −1 × s)`. The full
//! metric is `ε dt² + a(t)² φ(x)² η`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::exprlang::{parse, Expr, JetEnv};
use crate::jets::{Jet, JetShape};
use crate::tensor::{MetricDerivs, Riemann4};

/// Open interval, `None` for an infinite end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval { lo: None, hi: None };

    pub fn new(lo: Option<f64>, hi: Option<f64>) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo.is_none_or(|lo| t > lo) && self.hi.is_none_or(|hi| t < hi)
    }

    /// Interior points used for sampled criteria, away from the ends.
    pub fn probe_points(&self, count: usize) -> Vec<f64> {
        let frac = |k: usize| (k as f64 + 1.0) / (count as f64 + 1.0);
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => (0..count).map(|k| lo + (hi - lo) * (0.05 + 0.9 * frac(k))).collect(),
            (Some(lo), None) => (0..count).map(|k| lo + 0.25 + 3.75 * frac(k)).collect(),
            (None, Some(hi)) => (0..count).map(|k| hi - 0.25 - 3.75 * frac(k)).collect(),
            (None, None) => (0..count).map(|k| -2.0 + 4.0 * frac(k)).collect(),
        }
    }
}

/// Serializable description of an ambient space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSpec {
    /// Sign of the `dt²` term, `1` or `-1`.
    pub epsilon: i32,
    /// Warp function `a(t)`; may use `t` and the named constants.
    pub warp: String,
    pub interval: Interval,
    pub fiber_dim: usize,
    pub fiber_curvature: f64,
    pub fiber_index: usize,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct AmbientConfig {
    spec: AmbientSpec,
    warp: [Expr; 3],
}

/// The point of the chart: base coordinate and fiber coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub t: f64,
    pub x: Vec<f64>,
}

impl ChartPoint {
    pub fn new(t: f64, x: Vec<f64>) -> Self {
        Self { t, x }
    }

    /// Chart components with `t` in slot 0.
    pub fn coords(&self) -> Vec<f64> {
        std::iter::once(self.t).chain(self.x.iter().copied()).collect()
    }
}

/// Metric components as jets in the `N + 1` chart coordinates.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub components: Vec<Vec<Jet>>,
    /// Signs of the coordinate directions: `ε` then `η`.
    pub signature: Vec<f64>,
}

/// Warp data at one value of `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpScalars {
    pub a: f64,
    pub da: f64,
    pub dda: f64,
    /// `(ε a′² − c)/a²`
    pub b: f64,
    /// `a″/a − ε b`, equal to `a″/a − a′²/a² + εc/a²`
    pub big_b: f64,
    /// `db/dt = 2 ε B a′/a`
    pub db: f64,
}

/// The warp and its first two derivatives composed with a jet of `t`.
#[derive(Debug, Clone)]
pub struct WarpJets {
    pub a: Jet,
    pub da: Jet,
    pub dda: Jet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferDirection {
    ToChart,
    FromChart,
}

impl AmbientConfig {
    pub fn from_spec(spec: AmbientSpec) -> Result<Self> {
        if spec.epsilon != 1 && spec.epsilon != -1 {
            return Err(GeomError::Config(format!("epsilon must be 1 or -1, got {}", spec.epsilon)));
        }
        if spec.fiber_dim == 0 || spec.fiber_dim + 1 > crate::jets::MAX_VARS {
            return Err(GeomError::Config(format!(
                "fiber dimension must be between 1 and {}, got {}",
                crate::jets::MAX_VARS - 1,
                spec.fiber_dim
            )));
        }
        if spec.fiber_index > spec.fiber_dim {
            return Err(GeomError::Config(format!(
                "fiber index {} exceeds fiber dimension {}",
                spec.fiber_index, spec.fiber_dim
            )));
        }
        if !spec.fiber_curvature.is_finite() {
            return Err(GeomError::Config("fiber curvature must be finite".into()));
        }
        if let (Some(lo), Some(hi)) = (spec.interval.lo, spec.interval.hi) {
            if lo >= hi {
                return Err(GeomError::Config(format!("empty interval ({lo}, {hi})")));
            }
        }
        if spec.constants.contains_key("t") {
            return Err(GeomError::Config("`t` cannot be a constant".into()));
        }
        let mut declared = vec!["t"];
        declared.extend(spec.constants.keys().map(String::as_str));
        let a = parse(&spec.warp, &declared).map_err(|source| GeomError::Parse { what: "warp".into(), source })?;
        let da = a.diff("t");
        let dda = da.diff("t");
        Ok(Self { spec, warp: [a, da, dda] })
    }

    pub fn spec(&self) -> &AmbientSpec {
        &self.spec
    }

    pub fn epsilon(&self) -> f64 {
        self.spec.epsilon as f64
    }

    pub fn fiber_dim(&self) -> usize {
        self.spec.fiber_dim
    }

    pub fn fiber_curvature(&self) -> f64 {
        self.spec.fiber_curvature
    }

    pub fn fiber_index(&self) -> usize {
        self.spec.fiber_index
    }

    pub fn interval(&self) -> Interval {
        self.spec.interval
    }

    pub fn constants(&self) -> &BTreeMap<String, f64> {
        &self.spec.constants
    }

    pub fn warp_expr(&self) -> &Expr {
        &self.warp[0]
    }

    /// Chart dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.spec.fiber_dim + 1
    }

    /// Sign of fiber coordinate `i` (0-based within the fiber).
    pub fn eta(&self, i: usize) -> f64 {
        if i < self.spec.fiber_dim - self.spec.fiber_index {
            1.0
        } else {
            -1.0
        }
    }

    /// Signs of all chart directions: `ε` followed by `η`.
    pub fn signature(&self) -> Vec<f64> {
        std::iter::once(self.epsilon()).chain((0..self.spec.fiber_dim).map(|i| self.eta(i))).collect()
    }

    fn env(&self, t: &Jet) -> JetEnv {
        let mut env = JetEnv::new(t.shape());
        for (name, value) in &self.spec.constants {
            env = env.with_const(name, *value);
        }
        env.bind("t", t.clone()).expect("shape taken from t");
        env
    }

    /// `a, a′, a″` composed with `t`. Fails when `a ≤ 0` or `t ∉ I`.
    pub fn warp_jets(&self, t: &Jet) -> Result<WarpJets> {
        if !self.spec.interval.contains(t.value()) {
            return Err(GeomError::ChartDomain(format!("t = {} is outside the interval", t.value())));
        }
        let env = self.env(t);
        let a = self.warp[0].eval_jet(&env)?;
        if !(a.value() > 0.0) {
            return Err(GeomError::Config(format!("warp a(t) = {} is not positive at t = {}", a.value(), t.value())));
        }
        Ok(WarpJets { a, da: self.warp[1].eval_jet(&env)?, dda: self.warp[2].eval_jet(&env)? })
    }

    pub fn warp_scalars(&self, t: f64) -> Result<WarpScalars> {
        let shape = JetShape::new(1, 0)?;
        let w = self.warp_jets(&shape.constant(t))?;
        let (a, da, dda) = (w.a.value(), w.da.value(), w.dda.value());
        let eps = self.epsilon();
        let c = self.fiber_curvature();
        let b = (eps * da * da - c) / (a * a);
        let big_b = dda / a - eps * b;
        Ok(WarpScalars { a, da, dda, b, big_b, db: 2.0 * eps * big_b * da / a })
    }

    /// `B = a″/a − a′²/a² + εc/a²` composed with `t`.
    pub fn big_b_jet(&self, t: &Jet) -> Result<Jet> {
        let w = self.warp_jets(t)?;
        let a2 = &w.a * &w.a;
        let num = &w.da * &w.da;
        let num = num.add_scalar(-self.epsilon() * self.fiber_curvature());
        Ok(&w.dda.try_div(&w.a)? - &num.try_div(&a2)?)
    }

    /// Conformal factor `φ` as a jet, checking the chart domain.
    pub fn conformal_factor(&self, x: &[Jet]) -> Result<Jet> {
        let shape = x.first().map(Jet::shape).ok_or_else(|| GeomError::Config("empty fiber point".into()))?;
        let mut q = shape.zero();
        for (i, xi) in x.iter().enumerate() {
            q.add_scaled(&(xi * xi), self.eta(i));
        }
        let denom = q.scale(self.fiber_curvature() / 4.0).add_scalar(1.0);
        if !(denom.value() > 0.0) {
            return Err(GeomError::ChartDomain(format!("conformal denominator {} is not positive", denom.value())));
        }
        Ok(denom.recip()?)
    }

    fn check_point(&self, p: &ChartPoint) -> Result<()> {
        if p.x.len() != self.spec.fiber_dim {
            return Err(GeomError::Config(format!(
                "chart point has {} fiber coordinates, expected {}",
                p.x.len(),
                self.spec.fiber_dim
            )));
        }
        Ok(())
    }

    /// Metric components with every chart coordinate seeded as a jet
    /// variable.
    pub fn metric_at(&self, p: &ChartPoint, degree: usize) -> Result<MetricJet> {
        self.check_point(p)?;
        let shape = JetShape::new(self.dim(), degree)?;
        let t = shape.seed(0, p.t)?;
        let x: Vec<Jet> = p.x.iter().enumerate().map(|(i, &v)| shape.seed(i + 1, v)).collect::<Result<_, _>>()?;
        let diag = self.metric_diagonal(&t, &x)?;
        let components = (0..self.dim())
            .map(|a| (0..self.dim()).map(|b| if a == b { diag[a].clone() } else { shape.zero() }).collect())
            .collect();
        Ok(MetricJet { components, signature: self.signature() })
    }

    /// Diagonal metric entries `h_A` at a point given by jets of any shape.
    pub fn metric_diagonal(&self, t: &Jet, x: &[Jet]) -> Result<Vec<Jet>> {
        let w = self.warp_jets(t)?;
        let phi = self.conformal_factor(x)?;
        let ap = &w.a * &phi;
        let fiber = &ap * &ap;
        let mut out = vec![t.shape().constant(self.epsilon())];
        out.extend((0..self.spec.fiber_dim).map(|i| fiber.scale(self.eta(i))));
        Ok(out)
    }

    /// Metric matrix at a chart point.
    pub fn metric_matrix(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let shape = JetShape::new(1, 0)?;
        let t = shape.constant(p.t);
        let x: Vec<Jet> = p.x.iter().map(|&v| shape.constant(v)).collect();
        let diag = self.metric_diagonal(&t, &x)?;
        Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(self.dim(), diag.iter().map(Jet::value))))
    }

    /// Christoffel symbols `Γ^A_BC` of the ambient metric along jets of the
    /// chart coordinates, from the closed form for a diagonal conformal
    /// metric. Indexed `[A][B][C]`.
    pub fn christoffel_along(&self, t: &Jet, x: &[Jet]) -> Result<Vec<Vec<Vec<Jet>>>> {
        let d = self.dim();
        let shape = t.shape();
        let w = self.warp_jets(t)?;
        let phi = self.conformal_factor(x)?;
        let c = self.fiber_curvature();
        let eps = self.epsilon();
        let log_da = w.da.try_div(&w.a)?;
        // Γ^0_ii = −ε a a′ φ² η_i
        let aap = &(&w.a * &w.da) * &(&phi * &phi);
        let mut g = vec![vec![vec![shape.zero(); d]; d]; d];
        for i in 0..self.spec.fiber_dim {
            let (ii, eta_i) = (i + 1, self.eta(i));
            g[0][ii][ii] = aap.scale(-eps * eta_i);
            g[ii][0][ii] = log_da.clone();
            g[ii][ii][0] = log_da.clone();
            for j in 0..self.spec.fiber_dim {
                let (jj, eta_j) = (j + 1, self.eta(j));
                // Γ^i_ij = Γ^i_ji = −(c/2) φ η_j x_j
                let mixed = (&phi * &x[j]).scale(-0.5 * c * eta_j);
                if i == j {
                    g[ii][ii][ii] = mixed;
                } else {
                    g[ii][ii][jj] = mixed.clone();
                    g[ii][jj][ii] = mixed;
                    // Γ^i_jj = (c/2) η_j φ x_i
                    g[ii][jj][jj] = (&phi * &x[i]).scale(0.5 * c * eta_j);
                }
            }
        }
        Ok(g)
    }

    /// Curvature tensor computed numerically from second derivatives of the
    /// chart metric.
    pub fn riemann_from_chart(&self, p: &ChartPoint) -> Result<Riemann4> {
        let m = self.metric_at(p, 2)?;
        MetricDerivs::from_jets(&m.components)?.riemann()
    }

    /// Closed-form curvature:
    /// `b (⟨X,Z⟩⟨Y,W⟩ − ⟨Y,Z⟩⟨X,W⟩) + B (⟨X,Z⟩⟨Y,∂t⟩⟨W,∂t⟩ − ⟨Y,Z⟩⟨X,∂t⟩⟨W,∂t⟩
    ///  − ⟨X,W⟩⟨Y,∂t⟩⟨Z,∂t⟩ + ⟨Y,W⟩⟨X,∂t⟩⟨Z,∂t⟩)`.
    pub fn riemann_closed_form(&self, p: &ChartPoint, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> Result<f64> {
        let g = self.metric_matrix(p)?;
        let d = self.dim();
        for v in [x, y, z, w] {
            if v.len() != d {
                return Err(GeomError::Config(format!("vector has {} components, expected {d}", v.len())));
            }
        }
        let s = self.warp_scalars(p.t)?;
        let ip = |u: &[f64], v: &[f64]| (0..d).map(|a| u[a] * g[(a, a)] * v[a]).sum::<f64>();
        let dt = |u: &[f64]| self.epsilon() * u[0];
        Ok(s.b * (ip(x, z) * ip(y, w) - ip(y, z) * ip(x, w))
            + s.big_b
                * (ip(x, z) * dt(y) * dt(w) - ip(y, z) * dt(x) * dt(w) - ip(x, w) * dt(y) * dt(z)
                    + ip(y, w) * dt(x) * dt(z)))
    }

    /// The constant sectional curvature `κ`, if the space has one: requires
    /// `a″/a = (a′² − εc)/a²` at probe points of `I`, with `κ = −ε a″/a`
    /// the same at all of them, to 1e-10.
    pub fn constant_curvature(&self) -> Result<Option<f64>> {
        const TOL: f64 = 1e-10;
        let eps = self.epsilon();
        let c = self.fiber_curvature();
        let mut kappa: Option<f64> = None;
        for t in self.spec.interval.probe_points(9) {
            let s = self.warp_scalars(t)?;
            let lhs = s.dda / s.a;
            let rhs = (s.da * s.da - eps * c) / (s.a * s.a);
            if (lhs - rhs).abs() > TOL * lhs.abs().max(rhs.abs()).max(1.0) {
                return Ok(None);
            }
            let k = -eps * lhs;
            match kappa {
                Some(k0) if (k - k0).abs() > TOL * k0.abs().max(1.0) => return Ok(None),
                Some(_) => {}
                None => kappa = Some(k),
            }
        }
        Ok(kappa)
    }

    /// Evaluates the warp with scalar arithmetic.
    pub fn warp_value(&self, t: f64) -> Result<f64> {
        let mut env: HashMap<String, f64> = self.spec.constants.clone().into_iter().collect();
        env.insert("t".into(), t);
        Ok(self.warp[0].eval_f64(&env)?)
    }
}

/// Sign of the pole coordinate in the flat scalar product of the model.
fn pole_sign(c: f64) -> f64 {
    c.signum()
}

fn check_transfer(c: f64, s: usize, n: usize) -> Result<()> {
    if c == 0.0 || !c.is_finite() {
        return Err(GeomError::Config("hyperquadric transfer needs finite nonzero curvature".into()));
    }
    if s > n {
        return Err(GeomError::Config(format!("index {s} exceeds fiber dimension {n}")));
    }
    Ok(())
}

fn eta(n: usize, s: usize, i: usize) -> f64 {
    if i < n - s {
        1.0
    } else {
        -1.0
    }
}

/// Flat scalar product of the hyperquadric model: `sgn(c) y₀² + ⟨ȳ,ȳ⟩_η`.
pub fn hyperquadric_product(c: f64, s: usize, y: &[f64], z: &[f64]) -> f64 {
    let n = y.len() - 1;
    pole_sign(c) * y[0] * z[0] + (0..n).map(|i| eta(n, s, i) * y[i + 1] * z[i + 1]).sum::<f64>()
}

/// Moves between the hyperquadric `⟨y,y⟩ = 1/c` (pole coordinate first,
/// `N + 1` components) and the conformal chart (`N` components).
pub fn hyperquadric_transfer(c: f64, s: usize, direction: TransferDirection, point: &[f64]) -> Result<Vec<f64>> {
    let root = c.abs().sqrt();
    match direction {
        TransferDirection::ToChart => {
            if point.len() < 2 {
                return Err(GeomError::Config("hyperquadric point needs at least 2 components".into()));
            }
            check_transfer(c, s, point.len() - 1)?;
            let denom = 1.0 + root * point[0];
            if denom.abs() < 1e-12 {
                return Err(GeomError::ChartDomain("hyperquadric point is at the pole".into()));
            }
            Ok(point[1..].iter().map(|v| 2.0 * v / denom).collect())
        }
        TransferDirection::FromChart => {
            let n = point.len();
            check_transfer(c, s, n)?;
            let u = c / 4.0 * (0..n).map(|i| eta(n, s, i) * point[i] * point[i]).sum::<f64>();
            if 1.0 + u <= 0.0 {
                return Err(GeomError::ChartDomain(format!("conformal denominator {} is not positive", 1.0 + u)));
            }
            let mut y = vec![(1.0 - u) / ((1.0 + u) * root)];
            y.extend(point.iter().map(|v| v / (1.0 + u)));
            Ok(y)
        }
    }
}

/// [`hyperquadric_transfer`] towards the chart, on jets.
pub fn hyperquadric_to_chart_jets(c: f64, s: usize, y: &[Jet]) -> Result<Vec<Jet>> {
    if y.len() < 2 {
        return Err(GeomError::Config("hyperquadric point needs at least 2 components".into()));
    }
    check_transfer(c, s, y.len() - 1)?;
    let denom = y[0].scale(c.abs().sqrt()).add_scalar(1.0);
    if denom.value().abs() < 1e-12 {
        return Err(GeomError::ChartDomain("hyperquadric point is at the pole".into()));
    }
    let inv = denom.recip()?;
    Ok(y[1..].iter().map(|v| (v * &inv).scale(2.0)).collect())
}

/// [`hyperquadric_transfer`] away from the chart, on jets.
pub fn hyperquadric_from_chart_jets(c: f64, s: usize, x: &[Jet]) -> Result<Vec<Jet>> {
    let n = x.len();
    check_transfer(c, s, n)?;
    let shape = x.first().map(Jet::shape).ok_or_else(|| GeomError::Config("empty chart point".into()))?;
    let mut u = shape.zero();
    for (i, xi) in x.iter().enumerate() {
        u.add_scaled(&(xi * xi), c / 4.0 * eta(n, s, i));
    }
    let one_plus = u.add_scalar(1.0);
    if one_plus.value() <= 0.0 {
        return Err(GeomError::ChartDomain(format!("conformal denominator {} is not positive", one_plus.value())));
    }
    let inv = one_plus.recip()?;
    let mut y = vec![(&(-&u).add_scalar(1.0) * &inv).scale(1.0 / c.abs().sqrt())];
    y.extend(x.iter().map(|v| v * &inv));
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(epsilon: i32, warp: &str, n: usize, c: f64, s: usize) -> AmbientConfig {
        AmbientConfig::from_spec(AmbientSpec {
            epsilon,
            warp: warp.into(),
            interval: Interval::REAL_LINE,
            fiber_dim: n,
            fiber_curvature: c,
            fiber_index: s,
            constants: BTreeMap::from([("k".to_string(), 2.0)]),
        })
        .unwrap()
    }

    #[test]
    fn einstein_de_sitter_metric() {
        let mut a = cfg(-1, "t^(1/3)", 3, 0.0, 0);
        a.spec.interval = Interval::new(Some(0.0), None);
        let m = a.metric_at(&ChartPoint::new(1.0, vec![0.3, -0.2, 0.5]), 2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m.components[i][i].value()).collect();
        assert_eq!(diag, vec![-1.0, 1.0, 1.0, 1.0]);
        let m = a.metric_at(&ChartPoint::new(8.0, vec![0.0; 3]), 1).unwrap();
        assert!((m.components[2][2].value() - 4.0).abs() < 1e-14);
        assert_eq!(m.components[0][1].value(), 0.0);
    }

    #[test]
    fn flat_origin_metric_is_identity() {
        let a = cfg(1, "1", 3, 1.0, 0);
        let g = a.metric_matrix(&ChartPoint::new(0.4, vec![0.0; 3])).unwrap();
        assert_eq!(g, DMatrix::identity(4, 4));
    }

    #[test]
    fn chart_domain_errors() {
        let a = cfg(1, "1", 2, -1.0, 0);
        assert!(matches!(a.metric_at(&ChartPoint::new(0.0, vec![2.0, 0.0]), 2), Err(GeomError::ChartDomain(_))));
        let a = cfg(1, "t", 2, 0.0, 0);
        assert!(matches!(a.metric_at(&ChartPoint::new(-1.0, vec![0.0, 0.0]), 2), Err(GeomError::Config(_))));
    }

    #[test]
    fn bad_specs() {
        let mut spec = cfg(1, "1", 2, 1.0, 0).spec().clone();
        spec.epsilon = 0;
        assert!(AmbientConfig::from_spec(spec.clone()).is_err());
        spec.epsilon = 1;
        spec.fiber_index = 3;
        assert!(AmbientConfig::from_spec(spec.clone()).is_err());
        spec.fiber_index = 0;
        spec.warp = "cosh(q*t)".into();
        let err = AmbientConfig::from_spec(spec).unwrap_err();
        assert!(matches!(err, GeomError::Parse { .. }), "{err}");
    }

    #[test]
    fn flat_space_has_no_curvature() {
        let a = cfg(1, "1", 3, 0.0, 0);
        let r = a.riemann_from_chart(&ChartPoint::new(0.2, vec![0.1, 0.4, -0.3])).unwrap();
        assert!(r.max_abs() < 1e-14);
    }

    #[test]
    fn product_with_sphere_has_flat_mixed_planes() {
        let a = cfg(1, "1", 3, 1.0, 0);
        let p = ChartPoint::new(0.2, vec![0.1, 0.4, -0.3]);
        let r = a.riemann_from_chart(&p).unwrap();
        let g = a.metric_matrix(&p).unwrap();
        let dt = [1.0, 0.0, 0.0, 0.0];
        let x = [0.0, 0.3, -1.0, 0.5];
        assert!(r.eval(&dt, &x, &x, &dt).abs() < 1e-13);
        let y = [0.0, 1.0, 0.2, 0.0];
        assert!((r.sectional(&g, &x, &y) - 1.0).abs() < 1e-12);
        assert!(a.riemann_closed_form(&p, &dt, &x, &x, &dt).unwrap().abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_chart() {
        let spaces = [
            cfg(1, "cosh(t) + t/3", 3, 1.0, 0),
            cfg(-1, "2 + sin(t)", 2, -1.0, 0),
            cfg(-1, "cos(t)", 2, -1.0, 0),
            cfg(1, "exp(t/2)", 4, -1.0, 2),
            cfg(-1, "1 + t^2", 3, 0.5, 1),
        ];
        let vecs = [
            [0.3, 1.0, -0.2, 0.5, 0.1],
            [-1.1, 0.2, 0.7, -0.4, 0.9],
            [0.6, -0.5, 0.3, 1.2, -0.3],
            [0.2, 0.4, -0.9, 0.1, 0.6],
        ];
        for a in &spaces {
            let d = a.dim();
            let p = ChartPoint::new(0.3, (0..a.fiber_dim()).map(|i| 0.1 * (i as f64 + 1.0) - 0.15).collect());
            let r = a.riemann_from_chart(&p).unwrap();
            assert!(r.symmetry_defect() < 1e-10 && r.bianchi_defect() < 1e-10);
            let v: Vec<&[f64]> = vecs.iter().map(|v| &v[..d]).collect();
            let chart = r.eval(v[0], v[1], v[2], v[3]);
            let closed = a.riemann_closed_form(&p, v[0], v[1], v[2], v[3]).unwrap();
            assert!((chart - closed).abs() < 1e-10 * chart.abs().max(1.0), "{chart} vs {closed}");
            assert_eq!(a.riemann_closed_form(&p, v[0], v[0], v[2], v[3]).unwrap(), 0.0);
        }
    }

    #[test]
    fn analytic_christoffels_match_metric_derivatives() {
        let a = cfg(-1, "2 + sin(t)", 3, -0.7, 1);
        let p = ChartPoint::new(0.4, vec![0.3, -0.5, 0.2]);
        let numeric = MetricDerivs::from_jets(&a.metric_at(&p, 2).unwrap().components).unwrap().christoffel().unwrap();
        let shape = JetShape::new(1, 0).unwrap();
        let t = shape.constant(p.t);
        let x: Vec<Jet> = p.x.iter().map(|&v| shape.constant(v)).collect();
        let analytic = a.christoffel_along(&t, &x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert!((numeric.get(i, j, k) - analytic[i][j][k].value()).abs() < 1e-13, "{i}{j}{k}");
                }
            }
        }
    }

    #[test]
    fn constant_curvature_criterion() {
        let de_sitter = cfg(-1, "cosh(sqrt(k)*t)/sqrt(k)", 2, 1.0, 0);
        assert!((de_sitter.constant_curvature().unwrap().unwrap() - 2.0).abs() < 1e-10);
        let mut ads = cfg(-1, "cos(t)", 2, -1.0, 0);
        ads.spec.interval = Interval::new(Some(-std::f64::consts::FRAC_PI_2), Some(std::f64::consts::FRAC_PI_2));
        assert!((ads.constant_curvature().unwrap().unwrap() + 1.0).abs() < 1e-10);
        assert_eq!(cfg(1, "1", 3, 1.0, 0).constant_curvature().unwrap(), None);
        assert_eq!(cfg(1, "1", 3, 0.0, 0).constant_curvature().unwrap(), Some(0.0));
    }

    #[test]
    fn transfer_examples() {
        let x = hyperquadric_transfer(1.0, 0, TransferDirection::ToChart, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(x, vec![2.0, 0.0]);
        let y = hyperquadric_transfer(1.0, 0, TransferDirection::FromChart, &x).unwrap();
        assert!(y.iter().zip([0.0, 1.0, 0.0]).all(|(a, b)| (a - b).abs() < 1e-15));
        let x = hyperquadric_transfer(-1.0, 0, TransferDirection::ToChart, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(x, vec![0.0; 3]);
        assert!(matches!(
            hyperquadric_transfer(4.0, 0, TransferDirection::ToChart, &[-0.5, 0.0, 0.0]),
            Err(GeomError::ChartDomain(_))
        ));
    }

    #[test]
    fn transfer_round_trip_and_constraint() {
        for (c, s) in [(1.0, 0), (-1.0, 0), (-1.0, 2), (0.25, 1), (-3.0, 1)] {
            let x = [0.21, -0.33, 0.12, 0.05];
            let y = hyperquadric_transfer(c, s, TransferDirection::FromChart, &x).unwrap();
            assert!((hyperquadric_product(c, s, &y, &y) - 1.0 / c).abs() < 1e-12);
            let back = hyperquadric_transfer(c, s, TransferDirection::ToChart, &y).unwrap();
            assert!(back.iter().zip(x).all(|(a, b)| (a - b).abs() < 1e-14));
        }
    }

    #[test]
    fn transfer_pulls_back_the_conformal_metric() {
        for (c, s) in [(1.0, 0), (-1.0, 2), (-0.5, 1)] {
            let n = 4;
            let pt = [0.2, -0.1, 0.3, 0.15];
            let shape = JetShape::new(n, 1).unwrap();
            let x: Vec<Jet> = pt.iter().enumerate().map(|(i, &v)| shape.seed(i, v).unwrap()).collect();
            let y = hyperquadric_from_chart_jets(c, s, &x).unwrap();
            let amb = cfg(1, "1", n, c, s);
            let phi = amb.conformal_factor(&x).unwrap().value();
            for i in 0..n {
                for j in 0..n {
                    let dyi: Vec<f64> = y.iter().map(|yk| yk.partial_value(i)).collect();
                    let dyj: Vec<f64> = y.iter().map(|yk| yk.partial_value(j)).collect();
                    let pulled = hyperquadric_product(c, s, &dyi, &dyj);
                    let expected = if i == j { phi * phi * amb.eta(i) } else { 0.0 };
                    assert!((pulled - expected).abs() < 1e-12, "c={c} s={s} ({i},{j}): {pulled} vs {expected}");
                }
            }
            let back = hyperquadric_to_chart_jets(c, s, &y).unwrap();
            for (b, xi) in back.iter().zip(&x) {
                assert!(b.coeffs().iter().zip(xi.coeffs()).all(|(p, q)| (p - q).abs() < 1e-14));
            }
        }
    }

    #[test]
    fn warp_scalars_of_de_sitter() {
        let a = cfg(-1, "cosh(sqrt(k)*t)/sqrt(k)", 2, 1.0, 0);
        let s = a.warp_scalars(0.4).unwrap();
        assert!(s.big_b.abs() < 1e-14);
        assert!((s.b + 2.0).abs() < 1e-13);
        assert!((a.warp_value(0.4).unwrap() - s.a).abs() < 1e-15);
    }
}
