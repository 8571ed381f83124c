//! Run configuration: one JSON document per run.

use serde::Deserialize;
use urysohn_ifs::io::{IoError, Literal, MatrixDoc, MeasureDoc, ModulusDoc, PointRef};
use urysohn_ifs::maps::{AffineMap, Coords, TableMap};
use urysohn_ifs::moduli::ContinuityModulus;
use urysohn_ifs::{EuclideanSpace, FiniteMetricSpace, Rational, Scalar};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: Option<SpaceSpec>,
    #[serde(default)]
    pub maps: Vec<MapSpec>,
    #[serde(default)]
    pub moduli: Vec<ModulusDoc>,
    /// Starting set for `attractor`; its first point seeds `chaos`.
    #[serde(default)]
    pub start: Vec<PointRef>,
    pub tol: Option<Literal>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub chaos: Option<ChaosSpec>,
    pub classify: Option<ClassifySpec>,
    pub wasserstein: Option<WassersteinSpec>,
    pub lift: Option<LiftSpec>,
    pub extend: Option<ExtendSpec>,
    pub realize: Option<RealizeSpec>,
    pub urysohn: Option<UrysohnSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceSpec {
    Euclidean {
        dim: usize,
    },
    Table {
        labels: Vec<String>,
        dist: Vec<Vec<Literal>>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    Affine {
        linear: Vec<Vec<Literal>>,
        offset: Vec<Literal>,
    },
    /// `[from, to]` label pairs.
    Table { pairs: Vec<[String; 2]> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaosSpec {
    pub steps: usize,
    #[serde(default)]
    pub burn_in: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySpec {
    pub modulus: ModulusDoc,
    pub d_max: Literal,
    pub delta_grid: Vec<Literal>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WassersteinSpec {
    pub mu: MeasureDoc,
    pub eta: MeasureDoc,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftSpec {
    /// Index into `maps`/`moduli`.
    #[serde(default)]
    pub map: usize,
    #[serde(default = "yes")]
    pub enforce_precondition: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendSpec {
    /// The domain `A`; `space` is the ambient.
    pub domain: MatrixDoc,
    /// `[domain label, ambient label]` pairs defining `f` on `B`.
    pub base: Vec<[String; 2]>,
    pub modulus: ModulusDoc,
    pub order: Option<Vec<String>>,
    #[serde(default)]
    pub injective: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizeSpec {
    /// Growth rounds applied to `space` before extending the maps.
    pub rounds: usize,
    pub grid: Vec<Literal>,
    #[serde(default = "default_budget")]
    pub max_ambient: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UrysohnSpec {
    pub rounds: usize,
    pub grid: Vec<Literal>,
    #[serde(default = "default_checks")]
    pub checks: usize,
    pub tolerance: Option<Literal>,
}

fn yes() -> bool {
    true
}

fn default_budget() -> usize {
    256
}

fn default_checks() -> usize {
    200
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<String>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

pub enum Space {
    Euclidean(EuclideanSpace<f64>),
    Table(FiniteMetricSpace<Rational>),
}

impl RunConfig {
    pub fn parse(text: &str, overrides: &Overrides) -> Result<RunConfig, CliError> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::malformed("Json", e))?;
        if let Some(t) = &overrides.tol {
            cfg.tol = Some(Literal::Text(t.clone()));
        }
        cfg.max_iter = overrides.max_iter.or(cfg.max_iter);
        cfg.seed = overrides.seed.or(cfg.seed);
        cfg.trials = overrides.trials.or(cfg.trials);
        Ok(cfg)
    }

    pub fn space(&self) -> Result<Space, CliError> {
        match self
            .space
            .as_ref()
            .ok_or_else(|| CliError::missing("space"))?
        {
            SpaceSpec::Euclidean { dim } => Ok(Space::Euclidean(EuclideanSpace::new(*dim)?)),
            SpaceSpec::Table { labels, dist } => {
                let doc = MatrixDoc {
                    labels: labels.clone(),
                    dist: dist.clone(),
                };
                Ok(Space::Table(doc.to_space()?))
            }
        }
    }

    pub fn table_space(&self) -> Result<FiniteMetricSpace<Rational>, CliError> {
        match self.space()? {
            Space::Table(s) => Ok(s),
            Space::Euclidean(_) => Err(CliError::malformed(
                "Shape",
                "this command needs a table space",
            )),
        }
    }

    pub fn affine_maps(&self, dim: usize) -> Result<Vec<AffineMap<f64>>, CliError> {
        self.maps
            .iter()
            .map(|m| match m {
                MapSpec::Affine { linear, offset } => {
                    let linear = linear
                        .iter()
                        .map(|row| parse_list(row, "linear"))
                        .collect::<Result<Vec<_>, _>>()?;
                    let map = AffineMap::new(linear, parse_list(offset, "offset")?)
                        .map_err(|e| CliError::malformed("Shape", e))?;
                    if map.dim() != dim {
                        return Err(CliError::malformed(
                            "Shape",
                            "map dimension differs from the space",
                        ));
                    }
                    Ok(map)
                }
                MapSpec::Table { .. } => Err(CliError::malformed(
                    "Shape",
                    "table map on a Euclidean space",
                )),
            })
            .collect()
    }

    pub fn table_maps(
        &self,
        space: &FiniteMetricSpace<Rational>,
    ) -> Result<Vec<TableMap>, CliError> {
        self.maps
            .iter()
            .map(|m| match m {
                MapSpec::Table { pairs } => table_map(space, space, pairs),
                MapSpec::Affine { .. } => {
                    Err(CliError::malformed("Shape", "affine map on a table space"))
                }
            })
            .collect()
    }

    pub fn moduli(&self) -> Result<Vec<ContinuityModulus<Rational>>, CliError> {
        self.moduli.iter().map(|m| Ok(m.to_modulus()?)).collect()
    }

    pub fn tol<S: Scalar>(&self) -> Result<S, CliError> {
        let tol = self.tol.as_ref().ok_or_else(|| CliError::missing("tol"))?;
        Ok(tol.parse("tol")?)
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter.unwrap_or(100)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(100)
    }

    pub fn start_coords(&self, dim: usize) -> Result<Vec<Coords<f64>>, CliError> {
        if self.start.is_empty() {
            return Err(CliError::missing("start"));
        }
        self.start.iter().map(|p| Ok(p.to_coords(dim)?)).collect()
    }

    pub fn start_labels(
        &self,
        space: &FiniteMetricSpace<Rational>,
    ) -> Result<Vec<usize>, CliError> {
        if self.start.is_empty() {
            return Err(CliError::missing("start"));
        }
        self.start.iter().map(|p| Ok(p.to_index(space)?)).collect()
    }
}

pub fn parse_list<S: Scalar>(values: &[Literal], context: &str) -> Result<Vec<S>, IoError> {
    values.iter().map(|v| v.parse(context)).collect()
}

/// Partial table map from `[from, to]` label pairs.
pub fn table_map(
    from: &FiniteMetricSpace<Rational>,
    to: &FiniteMetricSpace<Rational>,
    pairs: &[[String; 2]],
) -> Result<TableMap, CliError> {
    let mut map = TableMap::partial(vec![None; from.len()]);
    for [a, b] in pairs {
        let a = index(from, a)?;
        let b = index(to, b)?;
        map.set(a, b);
    }
    Ok(map)
}

pub fn index(space: &FiniteMetricSpace<Rational>, label: &str) -> Result<usize, CliError> {
    space
        .index_of(label)
        .ok_or_else(|| CliError::malformed("UnknownLabel", format!("UnknownLabel({label})")))
}
