//! Sampling, check dispatch and report assembly.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientConfig, AmbientSpec};
use crate::catalog::{self, measure, Expectation};
use crate::error::{GeomError, Result};
use crate::extrinsic::{evaluate_point, PointEvaluation};
use crate::identities::{
    check_fundamental, check_pp_identity, check_simons, eigenvalue_identity, fit_psi, geodesic_threshold,
    mean_curvature_normal_curvature, normal_flatness, Prediction, SimonsVariant, ThresholdCase,
};
use crate::immersion::{Immersion, ImmersionSpec};
use crate::residual::{IdentityReport, Residual};

/// One verification run as read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Catalog entry supplying whichever of `ambient` and `immersion` is
    /// absent.
    #[serde(default)]
    pub catalog: Option<String>,
    #[serde(default)]
    pub ambient: Option<AmbientSpec>,
    #[serde(default)]
    pub immersion: Option<ImmersionSpec>,
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_checks() -> Vec<String> {
    vec!["structure".into(), "fundamental".into(), "simons".into()]
}

fn default_points() -> usize {
    10
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            catalog: None,
            ambient: None,
            immersion: None,
            checks: default_checks(),
            points: default_points(),
            seed: 0,
            tolerances: BTreeMap::new(),
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| GeomError::Config(format!("config file: {e}")))
    }

    pub fn for_entry(name: &str) -> Self {
        Self { catalog: Some(name.to_string()), ..Self::default() }
    }
}

/// Checks runnable on one point evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    AmbientCurvature,
    AmbientDt,
    TangentT,
    NormalXi,
    Weingarten,
    Frame,
    Gauss,
    Codazzi,
    Ricci,
    Simons(SimonsVariant),
    PsiFit,
    PpIdentity,
    Threshold,
    MeanCurvatureNormal,
    NormalFlatness,
    Eigenvalue,
    Catalog,
}

impl Check {
    pub const ALL: [Check; 21] = [
        Check::AmbientCurvature,
        Check::AmbientDt,
        Check::TangentT,
        Check::NormalXi,
        Check::Weingarten,
        Check::Frame,
        Check::Gauss,
        Check::Codazzi,
        Check::Ricci,
        Check::Simons(SimonsVariant::General),
        Check::Simons(SimonsVariant::Hypersurface),
        Check::Simons(SimonsVariant::NomizuSmyth),
        Check::Simons(SimonsVariant::ConstantCurvature),
        Check::Simons(SimonsVariant::ProductSpace),
        Check::PsiFit,
        Check::PpIdentity,
        Check::Threshold,
        Check::MeanCurvatureNormal,
        Check::NormalFlatness,
        Check::Eigenvalue,
        Check::Catalog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::AmbientCurvature => "ambient_curvature",
            Check::AmbientDt => "ambient_dt",
            Check::TangentT => "tangent_t",
            Check::NormalXi => "normal_xi",
            Check::Weingarten => "weingarten",
            Check::Frame => "frame",
            Check::Gauss => "gauss",
            Check::Codazzi => "codazzi",
            Check::Ricci => "ricci",
            Check::Simons(SimonsVariant::General) => "simons",
            Check::Simons(SimonsVariant::Hypersurface) => "simons_hypersurface",
            Check::Simons(SimonsVariant::NomizuSmyth) => "simons_nomizu_smyth",
            Check::Simons(SimonsVariant::ConstantCurvature) => "simons_constant_curvature",
            Check::Simons(SimonsVariant::ProductSpace) => "simons_product_space",
            Check::PsiFit => "psi_fit",
            Check::PpIdentity => "pp_identity",
            Check::Threshold => "threshold",
            Check::MeanCurvatureNormal => "mean_curvature_normal",
            Check::NormalFlatness => "normal_flatness",
            Check::Eigenvalue => "eigenvalue",
            Check::Catalog => "catalog",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Check::Simons(_) => 1e-6,
            Check::PpIdentity => 1e-7,
            Check::MeanCurvatureNormal | Check::Eigenvalue => 1e-9,
            Check::Threshold => 1e-10,
            // deviations are already divided by each expectation's tolerance
            Check::Catalog => 1.0,
            _ => 1e-8,
        }
    }

    fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// Expands a comma list entry, accepting the group names `structure`,
/// `fundamental`, `simons_variants` and `all`.
pub fn resolve_checks(names: &[String]) -> Result<Vec<Check>> {
    let mut out: Vec<Check> = Vec::new();
    for name in names {
        let group: Vec<Check> = match name.as_str() {
            "structure" => vec![Check::AmbientDt, Check::TangentT, Check::NormalXi, Check::Weingarten, Check::Frame],
            "fundamental" => vec![Check::Gauss, Check::Codazzi, Check::Ricci],
            "simons_variants" => SimonsVariant::ALL.into_iter().map(Check::Simons).collect(),
            "all" => Check::ALL.to_vec(),
            other => vec![Check::from_name(other).ok_or_else(|| {
                GeomError::Config(format!(
                    "unknown check `{other}`; known: structure, fundamental, simons_variants, all, {}",
                    Check::ALL.map(Check::name).join(", ")
                ))
            })?],
        };
        for c in group {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    if out.is_empty() {
        return Err(GeomError::Config("no checks requested".into()));
    }
    Ok(out)
}

/// Everything needed to run checks on one submanifold.
#[derive(Debug, Clone)]
pub struct Subject {
    pub name: String,
    pub cfg: AmbientConfig,
    pub imm: Immersion,
    /// Present only when both halves come from the catalog.
    pub expected: Option<Vec<Expectation>>,
}

impl Subject {
    pub fn resolve(config: &RunConfig) -> Result<Self> {
        let entry = config.catalog.as_deref().map(catalog::get_entry).transpose()?;
        let cfg = match (&config.ambient, &entry) {
            (Some(spec), _) => AmbientConfig::from_spec(spec.clone())?,
            (None, Some(e)) => e.cfg.clone(),
            (None, None) => return Err(GeomError::Config("need `catalog` or `ambient`".into())),
        };
        let imm = match (&config.immersion, &entry) {
            (Some(spec), _) => Immersion::from_spec(spec.clone())?,
            (None, Some(e)) => e.imm.clone(),
            (None, None) => return Err(GeomError::Config("need `catalog` or `immersion`".into())),
        };
        imm.check_against(&cfg)?;
        let from_catalog = config.ambient.is_none() && config.immersion.is_none();
        let name = match &entry {
            Some(e) if from_catalog => e.name.to_string(),
            Some(e) => format!("{} (modified)", e.name),
            None => "config".to_string(),
        };
        let expected = entry.filter(|_| from_catalog).map(|e| e.expected);
        Ok(Self { name, cfg, imm, expected })
    }
}

const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

fn radical_inverse(mut k: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / f64::from(base);
    let (mut f, mut out) = (inv, 0.0);
    while k > 0 {
        out += (k % b) as f64 * f;
        k /= b;
        f *= inv;
    }
    out
}

/// `count` points of the Halton sequence in `region`, shifted modulo 1 by
/// a random vector drawn from `seed`.
pub fn sample_points(region: &[[f64; 2]], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = region.iter().map(|_| rng.random::<f64>()).collect();
    (1..=count as u64)
        .map(|k| {
            region
                .iter()
                .enumerate()
                .map(|(i, [lo, hi])| {
                    let v = (radical_inverse(k, PRIMES[i]) + shift[i]).fract();
                    lo + v * (hi - lo)
                })
                .collect()
        })
        .collect()
}

/// Reports for every requested check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub subject: String,
    pub seed: u64,
    pub points: usize,
    pub checks: Vec<IdentityReport>,
    pub pass: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn tolerance(config: &RunConfig, check: Check) -> f64 {
    config.tolerances.get(check.name()).copied().unwrap_or_else(|| check.default_tol())
}

pub fn run(config: &RunConfig) -> Result<RunReport> {
    if config.points == 0 {
        return Err(GeomError::Config("points must be at least 1".into()));
    }
    let checks = resolve_checks(&config.checks)?;
    for (name, tol) in &config.tolerances {
        if Check::from_name(name).is_none() {
            return Err(GeomError::Config(format!("tolerance given for unknown check `{name}`")));
        }
        if !(*tol > 0.0) {
            return Err(GeomError::Config(format!("tolerance for `{name}` must be positive")));
        }
    }
    let subject = Subject::resolve(config)?;
    if checks.contains(&Check::Catalog) && subject.expected.is_none() {
        return Err(GeomError::Config("the `catalog` check needs an unmodified catalog entry".into()));
    }
    let us = sample_points(subject.imm.sample_region(), config.points, config.seed);
    let per_point: Vec<Result<PointEvaluation>> =
        us.par_iter().map(|u| evaluate_point(&subject.imm, &subject.cfg, u)).collect();
    let config_tol = |c| tolerance(config, c);
    let reports: Vec<IdentityReport> = checks
        .iter()
        .map(|&check| {
            let tol = config_tol(check);
            let points = us
                .par_iter()
                .zip(&per_point)
                .map(|(u, eval)| {
                    let r = eval.as_ref().map_err(Clone::clone).and_then(|e| run_check(check, &subject, config, e));
                    (u.clone(), r)
                })
                .collect();
            IdentityReport::from_points(check.name(), tol, points)
        })
        .collect();
    let pass = reports.iter().all(|r| r.pass);
    Ok(RunReport { subject: subject.name, seed: config.seed, points: config.points, checks: reports, pass })
}

fn run_check(check: Check, subject: &Subject, config: &RunConfig, eval: &PointEvaluation) -> Result<Residual> {
    let (data, derived) = (&eval.data, &eval.derived);
    let cfg = &subject.cfg;
    Ok(match check {
        Check::AmbientCurvature => ambient_curvature_residual(cfg, data)?,
        Check::AmbientDt => data.structure.ambient_dt.clone(),
        Check::TangentT => data.structure.tangent_t.clone(),
        Check::NormalXi => data.structure.normal_xi.clone(),
        Check::Weingarten => data.structure.weingarten.clone(),
        Check::Frame => data.structure.frame.clone(),
        Check::Gauss => check_fundamental(data, derived).gauss,
        Check::Codazzi => check_fundamental(data, derived).codazzi,
        Check::Ricci => check_fundamental(data, derived).ricci,
        Check::Simons(v) => check_simons(data, derived, cfg, v)?,
        Check::PsiFit => {
            let fit = fit_psi(data);
            Residual::new(fit.residual_norm, 0.0)
                .with_term("psi_hat", fit.psi_hat)
                .with_label("underdetermined", if fit.underdetermined { "yes" } else { "no" })
        }
        Check::PpIdentity => {
            let fit = fit_psi(data);
            check_pp_identity(data, fit.psi_hat, tolerance(config, Check::PsiFit))?.with_term("psi", fit.psi_hat)
        }
        Check::Threshold => {
            let th = geodesic_threshold(cfg, data, fit_psi(data).psi_hat)?;
            // A geodesic prediction is confirmed when α vanishes.
            let abs = if th.prediction == Prediction::GeodesicPoint { th.alpha_sq.sqrt() } else { 0.0 };
            Residual::new(abs, 0.0)
                .with_term("big_b", th.big_b)
                .with_term("psi_star", th.psi_star)
                .with_term("psi", th.psi)
                .with_term("t_norm_sq", th.t_norm_sq)
                .with_term("alpha_sq", th.alpha_sq)
                .with_term("mean_curvature_sq", th.mean_curvature_sq)
                .with_label("case", case_label(th.case))
                .with_label("prediction", prediction_label(th.prediction))
                .with_label("b_condition_waived", if th.b_condition_waived { "yes" } else { "no" })
        }
        Check::MeanCurvatureNormal => mean_curvature_normal_curvature(data, tolerance(config, Check::PsiFit))?,
        Check::NormalFlatness => Residual::new(normal_flatness(data), 0.0),
        Check::Eigenvalue => {
            if data.codim != 1 {
                return Err(GeomError::Precondition("eigenvalue identity needs a hypersurface".into()));
            }
            let kappa = cfg
                .constant_curvature()?
                .ok_or_else(|| GeomError::Precondition("ambient does not have constant curvature".into()))?;
            eigenvalue_identity(&data.h[0], kappa, data.normal_signs[0])
        }
        Check::Catalog => {
            let expected = subject.expected.as_deref().unwrap_or_default();
            let mut r = Residual::new(0.0, 0.0);
            for exp in expected {
                let v = measure(exp.quantity, cfg, &subject.imm, data, derived)?;
                let dev = exp.deviation(v, data);
                r.abs = r.abs.max(dev);
                r.terms.insert(exp.quantity.name().to_string(), v);
            }
            r
        }
    })
}

fn case_label(c: ThresholdCase) -> &'static str {
    match c {
        ThresholdCase::Riemannian => "riemannian",
        ThresholdCase::LorentzianRw => "lorentzian_rw",
        ThresholdCase::DefiniteNegative => "definite_negative",
    }
}

pub fn prediction_label(p: Prediction) -> &'static str {
    match p {
        Prediction::GeodesicPoint => "geodesic point",
        Prediction::HypothesesFail => "hypotheses fail",
        Prediction::NotExtremal => "not extremal",
    }
}

/// Closed-form ambient curvature against the one computed from chart
/// derivatives, on coordinate vectors at the image point.
pub fn ambient_curvature_residual(cfg: &AmbientConfig, data: &crate::extrinsic::ExtrinsicData) -> Result<Residual> {
    let chart = cfg.riemann_from_chart(&data.point)?;
    let d = cfg.dim();
    let e = |i: usize| crate::extrinsic::unit(d, i);
    let mut r = Residual::default();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let closed = cfg.riemann_closed_form(&data.point, &e(i), &e(j), &e(k), &e(l))?;
                    r.absorb_arrays(&[chart.get(i, j, k, l)], &[closed]);
                }
            }
        }
    }
    Ok(r)
}
