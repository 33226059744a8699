//! Run configuration: TOML with dotted sections, strict keys, and conversion
//! into library types.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use spar_core::ardensity::ArDensityEngine;
use spar_core::copulas::{CopulaModel, EvDependence, Family};
use spar_core::geometry::{AngleScale, AngularSystem, PolarMap, StarBoundary};
use spar_core::margins::Margin;
use spar_core::spar::{Source, SparOptions, Variant};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub margin: MarginSpec,
    #[serde(default)]
    pub polar: PolarSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub spar: SparSpec,
    #[serde(default)]
    pub transform: TransformSpec,
    #[serde(default)]
    pub verify: VerifySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default = "independence")]
    pub family: String,
    pub alpha: Option<f64>,
    pub rho: Option<f64>,
    pub nu: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    /// Corner the copula is viewed from; `[1, 1]` gives the survival copula.
    #[serde(default)]
    pub corner: [u8; 2],
    /// Dimension; only the independence copula accepts more than 2.
    #[serde(default = "two")]
    pub dim: usize,
}

fn independence() -> String {
    "independence".into()
}

fn two() -> usize {
    2
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec { family: independence(), alpha: None, rho: None, nu: None, gamma1: None, gamma2: None, corner: [0, 0], dim: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginSpec {
    /// `laplace`, `sgp`, `gp`, `pareto`, `exponential`, `normal` or `t`.
    pub kind: String,
    pub xi: Option<f64>,
    pub scale: Option<f64>,
    pub nu: Option<f64>,
}

impl Default for MarginSpec {
    fn default() -> Self {
        MarginSpec { kind: "laplace".into(), xi: None, scale: None, nu: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    /// `l1`, `l2`, `linf`, `lp` or `elliptical`.
    pub kind: String,
    pub p: Option<f64>,
    pub rho: Option<f64>,
}

impl GaugeSpec {
    fn l1() -> Self {
        GaugeSpec { kind: "l1".into(), p: None, rho: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarSpec {
    #[serde(default = "GaugeSpec::l1")]
    pub radial: GaugeSpec,
    #[serde(default = "GaugeSpec::l1")]
    pub angular: GaugeSpec,
    /// `pseudo` (default) or `radians` (L2 angular gauge only).
    #[serde(default = "pseudo")]
    pub angle_scale: String,
    pub origin: Option<Vec<f64>>,
}

fn pseudo() -> String {
    "pseudo".into()
}

impl Default for PolarSpec {
    fn default() -> Self {
        PolarSpec { radial: GaugeSpec::l1(), angular: GaugeSpec::l1(), angle_scale: pseudo(), origin: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Number of angles over one turn.
    #[serde(default = "default_angles")]
    pub angles: usize,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_r_count")]
    pub r_count: usize,
    /// Cartesian grid `[lo, hi]` used for both axes of the joint density table.
    #[serde(default = "default_xy_range")]
    pub xy_range: [f64; 2],
    #[serde(default = "default_xy_count")]
    pub xy_count: usize,
}

fn default_angles() -> usize {
    720
}
fn default_r_min() -> f64 {
    0.5
}
fn default_r_max() -> f64 {
    10.0
}
fn default_r_count() -> usize {
    20
}
fn default_xy_range() -> [f64; 2] {
    [-5.0, 5.0]
}
fn default_xy_count() -> usize {
    41
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            angles: default_angles(),
            r_min: default_r_min(),
            r_max: default_r_max(),
            r_count: default_r_count(),
            xy_range: default_xy_range(),
            xy_count: default_xy_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparSpec {
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    /// `catalog` (default) or `numeric`.
    #[serde(default = "catalog")]
    pub source: String,
    /// `gp_tail`, `gamma_tail_laplace` or `pareto_tail`; default depends on the margin.
    pub variant: Option<String>,
    /// Also write the limit-set boundary (Laplace margins only).
    #[serde(default)]
    pub limit_set: bool,
    /// Grid resolution per edge for three-dimensional L¹ sphere grids.
    #[serde(default = "default_sphere")]
    pub sphere_resolution: usize,
}

fn default_zeta() -> f64 {
    0.05
}
fn catalog() -> String {
    "catalog".into()
}
fn default_sphere() -> usize {
    8
}

impl Default for SparSpec {
    fn default() -> Self {
        SparSpec { zeta: default_zeta(), source: catalog(), variant: None, limit_set: false, sphere_resolution: default_sphere() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSpec {
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default = "all")]
    pub suite: String,
}

fn all() -> String {
    "all".into()
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec { suite: all() }
    }
}

impl RunConfig {
    /// Parses and validates a TOML document. Errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| anyhow!("config: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.copula()?;
        self.margin()?;
        self.polar_map()?;
        if self.grid.angles < 4 {
            bail!("grid.angles must be at least 4");
        }
        if !(self.grid.r_min > 0.0 && self.grid.r_max > self.grid.r_min && self.grid.r_count >= 1) {
            bail!("grid needs 0 < r_min < r_max and r_count >= 1");
        }
        if !(self.grid.xy_range[1] > self.grid.xy_range[0] && self.grid.xy_count >= 2) {
            bail!("grid needs xy_range[0] < xy_range[1] and xy_count >= 2");
        }
        self.spar_options()?;
        Ok(())
    }

    fn need(v: Option<f64>, name: &str, family: &str) -> Result<f64> {
        v.ok_or_else(|| anyhow!("model.{name} is required for family {family}"))
    }

    pub fn family(&self) -> Result<Family> {
        let m = &self.model;
        let f = m.family.as_str();
        let a = || Self::need(m.alpha, "alpha", f);
        Ok(match f {
            "independence" => Family::Independence,
            "frank" => Family::Frank { alpha: a()? },
            "joe" => Family::Joe { alpha: a()? },
            "gaussian" => Family::Gaussian { rho: Self::need(m.rho, "rho", f)? },
            "t" => Family::StudentT { rho: Self::need(m.rho, "rho", f)?, nu: Self::need(m.nu, "nu", f)? },
            "ev_logistic" => Family::Ev(EvDependence::SymmetricLogistic { alpha: a()? }),
            "ev_asymmetric_logistic" => Family::Ev(EvDependence::AsymmetricLogistic {
                alpha: a()?,
                gamma1: Self::need(m.gamma1, "gamma1", f)?,
                gamma2: Self::need(m.gamma2, "gamma2", f)?,
            }),
            "husler_reiss" => Family::Ev(EvDependence::HuslerReiss { alpha: a()? }),
            "clayton" => Family::Clayton { alpha: a()? },
            "nelsen_4215" => Family::Nelsen4215 { alpha: a()? },
            "bivariate_exponential" => Family::BivExponential { alpha: a()? },
            other => bail!("model.family: unknown family '{other}' (see the catalog command)"),
        })
    }

    pub fn copula(&self) -> Result<CopulaModel> {
        let fam = self.family()?;
        if self.model.corner.iter().any(|&c| c > 1) {
            bail!("model.corner entries must be 0 or 1");
        }
        let c = match fam {
            Family::Independence => CopulaModel::independence(self.model.dim)?,
            _ if self.model.dim != 2 => bail!("model.dim other than 2 needs the independence family"),
            _ => CopulaModel::new(fam)?,
        };
        Ok(c.reflect_corner(self.model.corner))
    }

    pub fn margin(&self) -> Result<Margin> {
        let s = &self.margin;
        Ok(match s.kind.as_str() {
            "laplace" => Margin::laplace(),
            "sgp" => Margin::sgp(s.xi.ok_or_else(|| anyhow!("margin.xi is required for sgp"))?)?,
            "gp" => Margin::gp(s.xi.ok_or_else(|| anyhow!("margin.xi is required for gp"))?, s.scale.unwrap_or(1.0))?,
            "pareto" => Margin::StandardPareto,
            "exponential" => Margin::Exponential,
            "normal" => Margin::Normal,
            "t" => Margin::student_t(s.nu.ok_or_else(|| anyhow!("margin.nu is required for t"))?)?,
            other => bail!("margin.kind: unknown margin '{other}'"),
        })
    }

    fn boundary(g: &GaugeSpec, dim: usize, key: &str) -> Result<StarBoundary> {
        Ok(match g.kind.as_str() {
            "l1" => StarBoundary::l1(dim),
            "l2" => StarBoundary::l2(dim),
            "linf" => StarBoundary::linf(dim),
            "lp" => StarBoundary::lp(g.p.ok_or_else(|| anyhow!("{key}.p is required for lp"))?, dim)?,
            "elliptical" => StarBoundary::elliptical(g.rho.ok_or_else(|| anyhow!("{key}.rho is required for elliptical"))?)?,
            other => bail!("{key}.kind: unknown gauge '{other}'"),
        })
    }

    pub fn polar_map(&self) -> Result<PolarMap> {
        let d = self.model.dim;
        let radial = Self::boundary(&self.polar.radial, d, "polar.radial")?;
        let angular = Self::boundary(&self.polar.angular, d, "polar.angular")?;
        let scale = match self.polar.angle_scale.as_str() {
            "pseudo" => AngleScale::Pseudo,
            "radians" => AngleScale::Radians,
            other => bail!("polar.angle_scale: unknown scale '{other}'"),
        };
        Ok(PolarMap::new(radial, AngularSystem::new(angular, scale)?)?)
    }

    pub fn engine(&self) -> Result<ArDensityEngine> {
        Ok(ArDensityEngine::new(self.copula()?, self.margin()?, self.polar_map()?, self.polar.origin.clone())?)
    }

    pub fn spar_options(&self) -> Result<SparOptions> {
        let source = match self.spar.source.as_str() {
            "catalog" => Source::Catalog,
            "numeric" => Source::Numeric,
            other => bail!("spar.source: unknown source '{other}'"),
        };
        let variant = match self.spar.variant.as_deref() {
            None => None,
            Some("gp_tail") => Some(Variant::GpTail),
            Some("gamma_tail_laplace") => Some(Variant::GammaTailLaplace),
            Some("pareto_tail") => Some(Variant::ParetoTail),
            Some(other) => bail!("spar.variant: unknown variant '{other}'"),
        };
        if !(self.spar.zeta > 0.0 && self.spar.zeta < 1.0) {
            bail!("spar.zeta must lie in (0, 1)");
        }
        Ok(SparOptions { zeta: self.spar.zeta, source, variant })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.model.family, "independence");
        assert_eq!(c.grid.angles, 720);
        let again = RunConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(c, again);
        let c = RunConfig::parse("[model]\nfamily = \"t\"\nrho = 0.6\nnu = 2.0\n[margin]\nkind = \"t\"\nnu = 2.0\n").unwrap();
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_report_location() {
        let e = RunConfig::parse("[model]\nfamily = \"joe\"\nalpha = 2.0\nbogus = 1\n").unwrap_err().to_string();
        assert!(e.contains("bogus") && e.contains("line 4"), "{e}");
    }

    #[test]
    fn missing_parameters_are_errors() {
        assert!(RunConfig::parse("[model]\nfamily = \"joe\"\n").is_err());
        assert!(RunConfig::parse("[model]\nfamily = \"joe\"\nalpha = 0.5\n").is_err());
        assert!(RunConfig::parse("[margin]\nkind = \"gp\"\n").is_err());
        assert!(RunConfig::parse("[spar]\nzeta = 1.5\n").is_err());
    }
}
