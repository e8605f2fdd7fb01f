//! Built-in ambient/immersion pairs with known geometry.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::ambient::{hyperquadric_product, AmbientConfig, AmbientSpec, Interval};
use crate::error::{GeomError, Result};
use crate::extrinsic::{DerivedTensors, ExtrinsicData};
use crate::identities::{cylinder_lift, fit_psi, geodesic_threshold, normal_flatness, Prediction};
use crate::immersion::{Immersion, ImmersionSpec};

/// A scalar read off the geometry at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `|⟨H, H⟩|^{1/2}`
    MeanCurvature,
    /// `Σ (h^β_ij)²`
    AlphaSq,
    /// `|∇⊥α|²`
    NablaAlphaSq,
    PsiHat,
    PsiFitResidual,
    BigB,
    PsiStar,
    TNormSq,
    /// `1` when the threshold test predicts a geodesic point, else `0`.
    PredictsGeodesic,
    /// Largest normal curvature component.
    NormalCurvature,
    /// Ambient constant curvature (point independent).
    AmbientCurvature,
    /// `|⟨y, y⟩ − 1/c|` for hyperquadric components.
    HyperquadricDefect,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::MeanCurvature => "mean_curvature",
            Quantity::AlphaSq => "alpha_sq",
            Quantity::NablaAlphaSq => "nabla_alpha_sq",
            Quantity::PsiHat => "psi_hat",
            Quantity::PsiFitResidual => "psi_fit_residual",
            Quantity::BigB => "big_b",
            Quantity::PsiStar => "psi_star",
            Quantity::TNormSq => "t_norm_sq",
            Quantity::PredictsGeodesic => "predicts_geodesic",
            Quantity::NormalCurvature => "normal_curvature",
            Quantity::AmbientCurvature => "ambient_curvature",
            Quantity::HyperquadricDefect => "hyperquadric_defect",
        }
    }
}

/// Target for a [`Quantity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Equals {
        value: f64,
        tol: f64,
    },
    /// Value at `t`, `‖T‖²`, `n` via a closed form.
    Formula {
        formula: Formula,
        tol: f64,
    },
    AtLeast(f64),
    AtMost(f64),
}

/// Closed forms that depend on the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// `−t⁻²/3`
    DustB,
    /// `(t⁻²/3n)(‖T‖² + n/3)`
    DustPsiStar,
    /// `n (a′/a)²` for a slice
    SliceAlphaSq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub quantity: Quantity,
    pub target: Target,
    pub note: String,
}

impl Expectation {
    fn equals(quantity: Quantity, value: f64, tol: f64, note: &str) -> Self {
        Self { quantity, target: Target::Equals { value, tol }, note: note.into() }
    }

    fn formula(quantity: Quantity, formula: Formula, tol: f64, note: &str) -> Self {
        Self { quantity, target: Target::Formula { formula, tol }, note: note.into() }
    }

    /// Signed miss divided by the tolerance; at most 1 passes.
    pub fn deviation(&self, measured: f64, data: &ExtrinsicData) -> f64 {
        match self.target {
            Target::Equals { value, tol } => (measured - value).abs() / tol,
            Target::Formula { formula, tol } => (measured - formula.eval(data)).abs() / tol,
            Target::AtLeast(v) => {
                if measured >= v {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Target::AtMost(v) => {
                if measured <= v {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

impl Formula {
    pub fn describe(self) -> &'static str {
        match self {
            Formula::DustB => "-1/(3 t^2)",
            Formula::DustPsiStar => "(|T|^2 + n/3)/(3 n t^2)",
            Formula::SliceAlphaSq => "n (a'/a)^2",
        }
    }

    pub fn eval(self, data: &ExtrinsicData) -> f64 {
        let t = data.point.t;
        let nf = data.dim as f64;
        match self {
            Formula::DustB => -1.0 / (3.0 * t * t),
            Formula::DustPsiStar => (data.t_norm_sq() + nf / 3.0) / (3.0 * nf * t * t),
            Formula::SliceAlphaSq => nf * (data.warp.da / data.warp.a).powi(2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub cfg: AmbientConfig,
    pub imm: Immersion,
    pub expected: Vec<Expectation>,
}

impl CatalogEntry {
    pub fn sample_region(&self) -> &[[f64; 2]] {
        self.imm.sample_region()
    }
}

/// Entry names in alphabetical order.
pub const NAMES: [&str; 8] = [
    "adS_product",
    "de_sitter_slice",
    "einstein_de_sitter_slice",
    "graph",
    "hyperbolic_veronese_cylinder",
    "slice",
    "space_form_models",
    "veronese_RxS4",
];

pub fn list() -> Vec<CatalogEntry> {
    NAMES.iter().map(|n| get_entry(n).expect("built-in entry")).collect()
}

pub fn get_entry(name: &str) -> Result<CatalogEntry> {
    match name {
        "adS_product" => ads_product(),
        "de_sitter_slice" => de_sitter_slice(2.0, 3),
        "einstein_de_sitter_slice" => einstein_de_sitter_slice(1.5, 3),
        "graph" => graph(),
        "hyperbolic_veronese_cylinder" => hyperbolic_veronese_cylinder(),
        "slice" => slice(
            AmbientSpec {
                epsilon: 1,
                warp: "2 + sin(t)".into(),
                interval: Interval::REAL_LINE,
                fiber_dim: 3,
                fiber_curvature: 1.0,
                fiber_index: 0,
                constants: BTreeMap::new(),
            },
            0.7,
        ),
        "space_form_models" => space_form_models(),
        "veronese_RxS4" => veronese(),
        _ => Err(GeomError::UnknownEntry(name.to_string())),
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn spec(params: Vec<String>, components: Vec<String>, domain: Vec<[f64; 2]>, region: Vec<[f64; 2]>) -> ImmersionSpec {
    ImmersionSpec {
        params,
        components,
        domain,
        sample_region: Some(region),
        hyperquadric: false,
        constants: BTreeMap::new(),
    }
}

/// Fiber space form of dimension `n` as the warped model of the constant
/// curvature space `Q^{n+1}(c)`: `a = t` for `c = 0`, `sin(√c t)/c` or
/// `sinh(√|c| t)/|c|` otherwise, with fiber curvature `1/|c|` (`1` when
/// `c = 0`).
pub fn space_form_model(c: f64, n: usize) -> AmbientSpec {
    let (warp, hi, fiber) = if c == 0.0 {
        ("t".to_string(), None, 1.0)
    } else if c > 0.0 {
        (format!("sin(sqrt({c})*t)/{c}"), Some(std::f64::consts::PI / c.sqrt()), 1.0 / c)
    } else {
        (format!("sinh(sqrt({})*t)/{}", -c, -c), None, 1.0 / c.abs())
    };
    AmbientSpec {
        epsilon: 1,
        warp,
        interval: Interval::new(Some(0.0), hi),
        fiber_dim: n,
        fiber_curvature: fiber,
        fiber_index: 0,
        constants: BTreeMap::new(),
    }
}

/// The slice `t = t0`, `x = u` in any ambient.
pub fn slice(ambient: AmbientSpec, t0: f64) -> Result<CatalogEntry> {
    let n = ambient.fiber_dim;
    let params = names("x", n);
    let mut components = vec![format!("{t0}")];
    components.extend(params.iter().cloned());
    let cfg = AmbientConfig::from_spec(ambient)?;
    let imm = Immersion::from_spec(spec(params, components, vec![[-0.5, 0.5]; n], vec![[-0.4, 0.4]; n]))?;
    Ok(CatalogEntry {
        name: "slice",
        description: "slice t = t0 of a warped product; totally umbilical",
        cfg,
        imm,
        expected: vec![
            Expectation::formula(Quantity::AlphaSq, Formula::SliceAlphaSq, 1e-10, "umbilic with A = -(a'/a) I"),
            Expectation::equals(Quantity::NablaAlphaSq, 0.0, 1e-10, "shape operator is constant along the slice"),
            Expectation::equals(Quantity::TNormSq, 0.0, 1e-12, "dt is normal to a slice"),
        ],
    })
}

fn graph() -> Result<CatalogEntry> {
    let cfg = AmbientConfig::from_spec(AmbientSpec {
        epsilon: -1,
        warp: "cosh(t) + t/3".into(),
        interval: Interval::REAL_LINE,
        fiber_dim: 2,
        fiber_curvature: 1.0,
        fiber_index: 0,
        constants: BTreeMap::new(),
    })?;
    let imm = Immersion::from_spec(spec(
        vec!["u".into(), "v".into()],
        vec!["0.8 + 0.2*sin(u) + 0.1*u*v".into(), "u".into(), "v".into()],
        vec![[-0.6, 0.6]; 2],
        vec![[-0.5, 0.5]; 2],
    ))?;
    Ok(CatalogEntry {
        name: "graph",
        description: "spacelike graph t = phi(x) in a Robertson-Walker spacetime with non-constant B",
        cfg,
        imm,
        expected: vec![Expectation {
            quantity: Quantity::TNormSq,
            target: Target::AtLeast(1e-4),
            note: "tilted graph, so T does not vanish".into(),
        }],
    })
}

fn space_form_models() -> Result<CatalogEntry> {
    let cfg = AmbientConfig::from_spec(space_form_model(4.0, 2))?;
    let imm = Immersion::from_spec(spec(
        vec!["u".into(), "v".into()],
        vec!["0.6 + 0.1*sin(u) + 0.05*v^2".into(), "u".into(), "v".into()],
        vec![[-0.8, 0.8]; 2],
        vec![[-0.6, 0.6]; 2],
    ))?;
    Ok(CatalogEntry {
        name: "space_form_models",
        description: "graph surface in the warped model (0, pi/2) x_{sin(2t)/4} S^2 of the 3-sphere of curvature 4",
        cfg,
        imm,
        expected: vec![Expectation::equals(Quantity::AmbientCurvature, 4.0, 1e-10, "warped model of Q^3(4)")],
    })
}

fn veronese() -> Result<CatalogEntry> {
    let cfg = AmbientConfig::from_spec(AmbientSpec {
        epsilon: 1,
        warp: "1".into(),
        interval: Interval::REAL_LINE,
        fiber_dim: 4,
        fiber_curvature: 1.0,
        fiber_index: 0,
        constants: BTreeMap::new(),
    })?;
    // (x, y, z) on the sphere of radius √3, in spherical angles
    let x = "sqrt(3)*sin(th)*cos(ph)";
    let y = "sqrt(3)*sin(th)*sin(ph)";
    let z = "sqrt(3)*cos(th)";
    let components = vec![
        "0".to_string(),
        format!("(({x})^2 + ({y})^2 - 2*({z})^2)/6"),
        format!("({x})*({y})/sqrt(3)"),
        format!("({x})*({z})/sqrt(3)"),
        format!("({y})*({z})/sqrt(3)"),
        format!("(({x})^2 - ({y})^2)/(2*sqrt(3))"),
    ];
    let mut s =
        spec(vec!["th".into(), "ph".into()], components, vec![[0.2, 2.9], [-3.0, 3.0]], vec![[0.6, 2.5], [-2.5, 2.5]]);
    s.hyperquadric = true;
    let imm = Immersion::from_spec(s)?;
    Ok(CatalogEntry {
        name: "veronese_RxS4",
        description: "Veronese surface of the 2-sphere of radius sqrt(3) in S^4(1), included in R x S^4(1)",
        cfg,
        imm,
        expected: vec![
            Expectation::equals(Quantity::MeanCurvature, 0.0, 1e-10, "minimal in S^4"),
            Expectation::equals(
                Quantity::AlphaSq,
                4.0 / 3.0,
                1e-8,
                "squared norm of the Veronese second fundamental form",
            ),
            Expectation::equals(Quantity::NablaAlphaSq, 0.0, 1e-8, "parallel second fundamental form"),
            Expectation::equals(Quantity::PsiHat, 0.0, 1e-8, "semi-parallel"),
            Expectation::equals(Quantity::PsiFitResidual, 0.0, 1e-8, "semi-parallel"),
            Expectation::equals(Quantity::BigB, 1.0, 1e-10, "B = c/a^2 = 1"),
            Expectation::equals(Quantity::PsiStar, 1.0, 1e-10, "psi* = 1 - |T|^2/n with T = 0"),
            Expectation::equals(Quantity::PredictsGeodesic, 0.0, 0.5, "psi = 0 < psi*, hypotheses fail"),
            Expectation {
                quantity: Quantity::NormalCurvature,
                target: Target::AtLeast(1e-3),
                note: "non-flat normal bundle".into(),
            },
            Expectation::equals(Quantity::HyperquadricDefect, 0.0, 1e-10, "image lies on S^4(1)"),
        ],
    })
}

/// The source surface of the hyperbolic Veronese cylinder in `ℝ × H⁴₂(−1)`.
pub fn hyperbolic_veronese() -> Result<(AmbientConfig, Immersion)> {
    let cfg = AmbientConfig::from_spec(AmbientSpec {
        epsilon: 1,
        warp: "1".into(),
        interval: Interval::REAL_LINE,
        fiber_dim: 4,
        fiber_curvature: -1.0,
        fiber_index: 2,
        constants: BTreeMap::new(),
    })?;
    let w = "v/sqrt(3)";
    let components = vec![
        "0".to_string(),
        format!("(3*cosh({w})^2 - 1)/2"),
        "sqrt(3)/2*sinh(2*v/sqrt(3))*sin(u/sqrt(3))".to_string(),
        "sqrt(3)/2*sinh(2*v/sqrt(3))*cos(u/sqrt(3))".to_string(),
        format!("sqrt(3)/2*sinh({w})^2*sin(2*u/sqrt(3))"),
        format!("sqrt(3)/2*sinh({w})^2*cos(2*u/sqrt(3))"),
    ];
    let mut s =
        spec(vec!["u".into(), "v".into()], components, vec![[-3.0, 3.0], [0.2, 2.0]], vec![[-1.5, 1.5], [0.4, 1.5]]);
    s.hyperquadric = true;
    Ok((cfg, Immersion::from_spec(s)?))
}

fn hyperbolic_veronese_cylinder() -> Result<CatalogEntry> {
    let (cfg, source) = hyperbolic_veronese()?;
    let imm = cylinder_lift(&source, &cfg, [-1.5, 1.5])?;
    Ok(CatalogEntry {
        name: "hyperbolic_veronese_cylinder",
        description: "cylinder R x (hyperbolic Veronese surface) in R x H^4_2(-1)",
        cfg,
        imm,
        expected: vec![
            Expectation::equals(Quantity::MeanCurvature, 0.0, 1e-10, "extremal"),
            Expectation::equals(Quantity::NablaAlphaSq, 0.0, 1e-8, "parallel"),
            Expectation {
                quantity: Quantity::AlphaSq,
                target: Target::AtLeast(1e-3),
                note: "not totally geodesic".into(),
            },
            Expectation::equals(Quantity::PsiHat, 0.0, 1e-8, "semi-parallel"),
            Expectation::equals(Quantity::PsiFitResidual, 0.0, 1e-8, "semi-parallel"),
            Expectation::equals(Quantity::BigB, -1.0, 1e-10, "B = c/a^2 = -1"),
            Expectation::equals(Quantity::TNormSq, 1.0, 1e-10, "T = dt is tangent"),
            Expectation::equals(Quantity::PsiStar, -2.0 / 3.0, 1e-10, "psi* = -(1/3)(3 - |T|^2)"),
            Expectation::equals(Quantity::PredictsGeodesic, 0.0, 0.5, "psi = 0 > psi*, hypotheses fail"),
            Expectation::equals(Quantity::HyperquadricDefect, 0.0, 1e-10, "image lies on H^4_2(-1)"),
        ],
    })
}

fn ads_product() -> Result<CatalogEntry> {
    let cfg = AmbientConfig::from_spec(AmbientSpec {
        epsilon: -1,
        warp: "cos(t)".into(),
        interval: Interval::new(Some(-std::f64::consts::FRAC_PI_2), Some(std::f64::consts::FRAC_PI_2)),
        fiber_dim: 2,
        fiber_curvature: -1.0,
        fiber_index: 0,
        constants: BTreeMap::new(),
    })?;
    // X = (cosh p, sinh p, cosh q, sinh q)/√2 on ⟨X,X⟩ = −1 in signature (−,+,−,+);
    // t = arcsin X₀ and the fiber point X̄/cos t, pole coordinate first.
    let inv_cos = "(1 - cosh(p)^2/2)^(-1/2)";
    let components = vec![
        "arcsin(sqrt(1/2)*cosh(p))".to_string(),
        format!("sqrt(1/2)*cosh(q)*{inv_cos}"),
        format!("sqrt(1/2)*sinh(p)*{inv_cos}"),
        format!("sqrt(1/2)*sinh(q)*{inv_cos}"),
    ];
    let mut s = spec(vec!["p".into(), "q".into()], components, vec![[-0.6, 0.6]; 2], vec![[-0.3, 0.3]; 2]);
    s.hyperquadric = true;
    let imm = Immersion::from_spec(s)?;
    Ok(CatalogEntry {
        name: "adS_product",
        description:
            "H^1(-2) x H^1(-2) in anti-de Sitter space H^3_1(-1), warped model (-pi/2, pi/2) x_{cos t} H^2(-1)",
        cfg,
        imm,
        expected: vec![
            Expectation::equals(Quantity::MeanCurvature, 0.0, 1e-10, "extremal"),
            Expectation::equals(Quantity::AlphaSq, 2.0, 1e-8, "|alpha|^2 = n"),
            Expectation::equals(Quantity::NablaAlphaSq, 0.0, 1e-8, "parallel"),
            Expectation::equals(Quantity::PsiHat, 0.0, 1e-8, "flat, so semi-parallel"),
            Expectation::equals(Quantity::BigB, 0.0, 1e-10, "constant curvature ambient"),
            Expectation::equals(Quantity::PsiStar, -1.0, 1e-10, "psi* = -b = -1"),
            Expectation::equals(Quantity::PredictsGeodesic, 0.0, 0.5, "psi = 0 > psi*, hypotheses fail"),
            Expectation::equals(Quantity::AmbientCurvature, -1.0, 1e-10, "anti-de Sitter"),
            Expectation::equals(Quantity::HyperquadricDefect, 0.0, 1e-10, "fiber point lies on H^2(-1)"),
        ],
    })
}

pub fn de_sitter_slice(kappa: f64, n: usize) -> Result<CatalogEntry> {
    let mut entry = slice(
        AmbientSpec {
            epsilon: -1,
            warp: "cosh(sqrt(k)*t)/sqrt(k)".into(),
            interval: Interval::REAL_LINE,
            fiber_dim: n,
            fiber_curvature: 1.0,
            fiber_index: 0,
            constants: BTreeMap::from([("k".to_string(), kappa)]),
        },
        0.0,
    )?;
    entry.name = "de_sitter_slice";
    entry.description =
        "totally geodesic slice t = 0 of de Sitter space, warped model -R x_{cosh(sqrt(k) t)/sqrt(k)} S^n(1)";
    entry.expected = vec![
        Expectation::equals(Quantity::AlphaSq, 0.0, 1e-12, "totally geodesic"),
        Expectation::equals(Quantity::BigB, 0.0, 1e-10, "constant curvature ambient"),
        Expectation::equals(Quantity::PsiStar, kappa, 1e-10, "psi* = kappa"),
        Expectation::equals(Quantity::PredictsGeodesic, 1.0, 0.5, "semi-parallel and extremal, so geodesic"),
        Expectation::equals(Quantity::AmbientCurvature, kappa, 1e-10, "de Sitter"),
    ];
    Ok(entry)
}

pub fn einstein_de_sitter_slice(t0: f64, n: usize) -> Result<CatalogEntry> {
    let mut entry = slice(
        AmbientSpec {
            epsilon: -1,
            warp: "t^(1/3)".into(),
            interval: Interval::new(Some(0.0), None),
            fiber_dim: n,
            fiber_curvature: 0.0,
            fiber_index: 0,
            constants: BTreeMap::new(),
        },
        t0,
    )?;
    entry.name = "einstein_de_sitter_slice";
    entry.description = "slice of the Einstein-de Sitter model (0, inf) x_{t^(1/3)} R^n";
    entry.expected = vec![
        Expectation::formula(Quantity::AlphaSq, Formula::SliceAlphaSq, 1e-10, "umbilic, |alpha|^2 = n/(9 t^2)"),
        Expectation::formula(Quantity::BigB, Formula::DustB, 1e-10, "B = -1/(3 t^2)"),
        Expectation::formula(Quantity::PsiStar, Formula::DustPsiStar, 1e-10, "psi* = (|T|^2 + n/3)/(3 n t^2)"),
        Expectation::equals(Quantity::PredictsGeodesic, 0.0, 0.5, "not extremal"),
    ];
    Ok(entry)
}

/// Measures `q` at a point. `u` is needed for the hyperquadric defect.
pub fn measure(
    q: Quantity,
    entry_cfg: &AmbientConfig,
    imm: &Immersion,
    data: &ExtrinsicData,
    derived: &DerivedTensors,
) -> Result<f64> {
    Ok(match q {
        Quantity::MeanCurvature => data.mean_curvature_sq().abs().sqrt(),
        Quantity::AlphaSq => data.alpha_frame_sq(),
        Quantity::NablaAlphaSq => derived.h3_sum_sq(),
        Quantity::PsiHat => fit_psi(data).psi_hat,
        Quantity::PsiFitResidual => fit_psi(data).residual_norm,
        Quantity::BigB => data.warp.big_b,
        Quantity::PsiStar => geodesic_threshold(entry_cfg, data, fit_psi(data).psi_hat)?.psi_star,
        Quantity::TNormSq => data.t_norm_sq(),
        Quantity::PredictsGeodesic => {
            let th = geodesic_threshold(entry_cfg, data, fit_psi(data).psi_hat)?;
            if th.prediction == Prediction::GeodesicPoint {
                1.0
            } else {
                0.0
            }
        }
        Quantity::NormalCurvature => normal_flatness(data),
        Quantity::AmbientCurvature => entry_cfg
            .constant_curvature()?
            .ok_or_else(|| GeomError::Precondition("ambient does not have constant curvature".into()))?,
        Quantity::HyperquadricDefect => hyperquadric_defect(entry_cfg, imm, &data.u)?,
    })
}

/// `|⟨y, y⟩ − 1/c|` for the raw hyperquadric components at `u`.
pub fn hyperquadric_defect(cfg: &AmbientConfig, imm: &Immersion, u: &[f64]) -> Result<f64> {
    if !imm.spec().hyperquadric {
        return Err(GeomError::Precondition("immersion is not given by hyperquadric components".into()));
    }
    let mut env: HashMap<String, f64> = imm.spec().constants.iter().map(|(k, v)| (k.clone(), *v)).collect();
    for (p, v) in imm.params().iter().zip(u) {
        env.insert(p.clone(), *v);
    }
    let y: Vec<f64> = imm.components()[1..].iter().map(|e| e.eval_f64(&env)).collect::<Result<_, _>>()?;
    let c = cfg.fiber_curvature();
    Ok((hyperquadric_product(c, cfg.fiber_index(), &y, &y) - 1.0 / c).abs())
}
