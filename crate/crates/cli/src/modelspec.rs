//! JSON model files and their conversion into core model values.
//!
//! Three tagged layouts are accepted, dispatched on the `"model"` field:
//!
//! ```json
//! {"model": "dd", "class_probs": [..],
//!  "rows": [{"weight": w, "p_y1": q, "p_y0": [..]}, ..],
//!  "contrasts": [[j, jdag], ..]}                  // optional, default vs last class
//!
//! {"model": "tprd",
//!  "rows": [{"weight": w, "p11": a, "p01": b, "p_y0": [..]}, ..],
//!  "pairs": [[j, jdag], ..]}                      // optional, default vs last class
//!
//! {"model": "linear_projection", "d0": 2,
//!  "moment_matrix": [[..], ..], "cross_moment": [..],
//!  "atoms": 400,                                  // optional
//!  "box": [[lo, hi], ..],                         // optional candidate box
//!  "rows": [{"weight": w,
//!            "law1": {"atoms": [[v, p], ..]} | {"gaussian": {"mean": m, "sd": s}},
//!            "law0": {"points": [[[..], p], ..]} | {"atoms": [[v, p], ..]}
//!                    | {"gaussian": {"mean": [..], "cov": [[..], ..]}}}, ..]}
//! ```
//!
//! A bare conditional-law table `{"rows": [{"weight": w, "law1": [[v,p],..],
//! "law0": [[v,p],..]}, ..]}` is also accepted and treated as a scalar
//! linear projection model on the single regressor `Y0` (its second moment
//! is computed from the table itself).

use otis_core::models::{
    DdModel, DdRow, LinearProjectionModel, LpModelRow, QuantileEval, ScalarLaw, TprdModel,
    TprdRow, VectorLaw,
};
use otis_core::{DiscreteDist, GaussianSpec, Matrix};
use serde::{Deserialize, Serialize};

pub const DEFAULT_GAUSSIAN_ATOMS: usize = 400;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Dd(DdSpec),
    Tprd(TprdSpec),
    LinearProjection(LinearProjectionSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DdSpec {
    pub class_probs: Vec<f64>,
    pub rows: Vec<DdRowSpec>,
    #[serde(default)]
    pub contrasts: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DdRowSpec {
    pub weight: f64,
    pub p_y1: f64,
    pub p_y0: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TprdSpec {
    pub rows: Vec<TprdRowSpec>,
    #[serde(default)]
    pub pairs: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TprdRowSpec {
    pub weight: f64,
    pub p11: f64,
    pub p01: f64,
    pub p_y0: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearProjectionSpec {
    pub d0: usize,
    pub moment_matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub cross_moment: Vec<f64>,
    #[serde(default)]
    pub atoms: Option<usize>,
    #[serde(default)]
    pub r#box: Option<Vec<(f64, f64)>>,
    pub rows: Vec<LpRowSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpRowSpec {
    pub weight: f64,
    pub law1: ScalarLawSpec,
    pub law0: VectorLawSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarLawSpec {
    Atoms(Vec<(f64, f64)>),
    Gaussian { mean: f64, sd: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorLawSpec {
    /// Weighted points in R^{d0}.
    Points(Vec<(Vec<f64>, f64)>),
    /// Scalar shorthand for d0 = 1.
    Atoms(Vec<(f64, f64)>),
    Gaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
}

/// Bare conditional-law table (both laws univariate discrete).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableSpec {
    pub rows: Vec<TableRowSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRowSpec {
    pub weight: f64,
    pub law1: Vec<(f64, f64)>,
    pub law0: Vec<(f64, f64)>,
}

/// A parsed model ready for the commands.
#[derive(Debug)]
pub enum LoadedModel {
    Dd {
        model: DdModel,
        contrasts: Vec<(usize, usize)>,
    },
    Tprd {
        model: TprdModel,
        pairs: Vec<(usize, usize)>,
    },
    LinearProjection {
        model: LinearProjectionModel,
        candidate_box: Option<Vec<(f64, f64)>>,
    },
}

impl LoadedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedModel::Dd { .. } => "dd",
            LoadedModel::Tprd { .. } => "tprd",
            LoadedModel::LinearProjection { .. } => "linear_projection",
        }
    }
}

fn scalar_law(spec: &ScalarLawSpec) -> Result<ScalarLaw, otis_core::Error> {
    Ok(match spec {
        ScalarLawSpec::Atoms(pairs) => ScalarLaw::Discrete(DiscreteDist::new(pairs)?),
        ScalarLawSpec::Gaussian { mean, sd } => ScalarLaw::Gaussian(GaussianSpec::new(*mean, *sd)?),
    })
}

fn vector_law(spec: &VectorLawSpec) -> Result<VectorLaw, otis_core::Error> {
    Ok(match spec {
        VectorLawSpec::Points(points) => VectorLaw::Discrete {
            points: points.clone(),
        },
        VectorLawSpec::Atoms(pairs) => VectorLaw::Discrete {
            points: pairs.iter().map(|&(v, p)| (vec![v], p)).collect(),
        },
        VectorLawSpec::Gaussian { mean, cov } => VectorLaw::Gaussian {
            mean: mean.clone(),
            cov: Matrix::from_rows(cov),
        },
    })
}

/// Parse a model file: the tagged layouts first, then the bare table form.
pub fn parse_model(text: &str) -> Result<LoadedModel, String> {
    match serde_json::from_str::<ModelSpec>(text) {
        Ok(spec) => build_model(spec).map_err(|e| format!("invalid model: {e}")),
        Err(tag_err) => match serde_json::from_str::<TableSpec>(text) {
            Ok(table) => build_table_model(table).map_err(|e| format!("invalid model: {e}")),
            Err(_) => Err(format!("cannot parse model JSON: {tag_err}")),
        },
    }
}

fn build_model(spec: ModelSpec) -> Result<LoadedModel, otis_core::Error> {
    match spec {
        ModelSpec::Dd(s) => {
            let j = s.class_probs.len();
            let rows: Vec<DdRow> = s
                .rows
                .iter()
                .map(|r| DdRow {
                    weight: r.weight,
                    p_y1: r.p_y1,
                    class_probs_x: r.p_y0.clone(),
                })
                .collect();
            let model = DdModel::new(s.class_probs, rows)?;
            let contrasts = s
                .contrasts
                .unwrap_or_else(|| (0..j - 1).map(|k| (k, j - 1)).collect());
            Ok(LoadedModel::Dd { model, contrasts })
        }
        ModelSpec::Tprd(s) => {
            let rows: Vec<TprdRow> = s
                .rows
                .iter()
                .map(|r| TprdRow {
                    weight: r.weight,
                    p11: r.p11,
                    p01: r.p01,
                    class_probs_x: r.p_y0.clone(),
                })
                .collect();
            let model = TprdModel::new(rows)?;
            let j = model.num_classes();
            let pairs = s
                .pairs
                .unwrap_or_else(|| (0..j - 1).map(|k| (k, j - 1)).collect());
            Ok(LoadedModel::Tprd { model, pairs })
        }
        ModelSpec::LinearProjection(s) => {
            let d = s.moment_matrix.len();
            let dx = d.saturating_sub(s.d0);
            let rows: Vec<LpModelRow> = s
                .rows
                .iter()
                .map(|r| {
                    Ok(LpModelRow {
                        weight: r.weight,
                        law1: scalar_law(&r.law1)?,
                        law0: vector_law(&r.law0)?,
                    })
                })
                .collect::<Result<_, otis_core::Error>>()?;
            let model = LinearProjectionModel::new(
                s.d0,
                dx,
                Matrix::from_rows(&s.moment_matrix),
                s.cross_moment,
                rows,
                QuantileEval::Atoms(s.atoms.unwrap_or(DEFAULT_GAUSSIAN_ATOMS)),
            )?;
            Ok(LoadedModel::LinearProjection {
                model,
                candidate_box: s.r#box,
            })
        }
    }
}

/// Bare table: scalar linear projection on the single regressor `Y0`,
/// with `M = E[Y0²]` computed from the table.
fn build_table_model(table: TableSpec) -> Result<LoadedModel, otis_core::Error> {
    let rows: Vec<LpModelRow> = table
        .rows
        .iter()
        .map(|r| {
            Ok(LpModelRow {
                weight: r.weight,
                law1: ScalarLaw::Discrete(DiscreteDist::new(&r.law1)?),
                law0: VectorLaw::Discrete {
                    points: r.law0.iter().map(|&(v, p)| (vec![v], p)).collect(),
                },
            })
        })
        .collect::<Result<_, otis_core::Error>>()?;
    let mut second_moment = 0.0;
    for r in &table.rows {
        let law = DiscreteDist::new(&r.law0)?;
        second_moment += r.weight * law.atoms().iter().map(|&(v, p)| v * v * p).sum::<f64>();
    }
    let model = LinearProjectionModel::new(
        1,
        0,
        Matrix::from_rows(&[vec![second_moment]]),
        vec![],
        rows,
        QuantileEval::Atoms(DEFAULT_GAUSSIAN_ATOMS),
    )?;
    Ok(LoadedModel::LinearProjection {
        model,
        candidate_box: None,
    })
}
