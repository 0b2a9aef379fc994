//! JSON and CSV file formats.
//!
//! ```text
//! space:    {"points": [[x, y, ...], ...], "norm": "l1" | "l2" | "linf"}
//!       or  {"distance_matrix": [[...], ...]}
//! measure:  {"weights": [w_0, ..., w_{N-1}]}
//! function: {"values": [...]}
//! csv:      point_id,weight,value
//! ```
//!
//! Decimal numbers are parsed with correct rounding to the nearest double.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::measure::{DiscreteMeasure, FunctionOnSpace};
use crate::metric::{build_space, Geometry, MetricSpace, Norm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceFile {
    Coordinates { points: Vec<Vec<f64>>, norm: Norm },
    Matrix { distance_matrix: Vec<Vec<f64>> },
}

impl SpaceFile {
    pub fn from_space(space: &MetricSpace) -> Self {
        match space.geometry() {
            Geometry::Coordinates { points, norm } => SpaceFile::Coordinates { points, norm },
            Geometry::DistanceMatrix(m) => SpaceFile::Matrix { distance_matrix: m },
        }
    }

    pub fn into_space(self) -> Result<MetricSpace> {
        build_space(match self {
            SpaceFile::Coordinates { points, norm } => Geometry::Coordinates { points, norm },
            SpaceFile::Matrix { distance_matrix } => Geometry::DistanceMatrix(distance_matrix),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub values: Vec<f64>,
}

pub fn parse_space(json: &str) -> Result<MetricSpace> {
    serde_json::from_str::<SpaceFile>(json)?.into_space()
}

pub fn parse_measure(json: &str) -> Result<DiscreteMeasure> {
    DiscreteMeasure::new(serde_json::from_str::<MeasureFile>(json)?.weights)
}

pub fn parse_function(json: &str) -> Result<FunctionOnSpace> {
    FunctionOnSpace::new(serde_json::from_str::<FunctionFile>(json)?.values)
}

pub fn read_space(path: &Path) -> Result<MetricSpace> {
    parse_space(&std::fs::read_to_string(path)?)
}

pub fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    parse_measure(&std::fs::read_to_string(path)?)
}

pub fn read_function(path: &Path) -> Result<FunctionOnSpace> {
    parse_function(&std::fs::read_to_string(path)?)
}

pub fn space_json(space: &MetricSpace) -> Result<String> {
    Ok(serde_json::to_string(&SpaceFile::from_space(space))?)
}

pub fn measure_json(measure: &DiscreteMeasure) -> Result<String> {
    Ok(serde_json::to_string(&MeasureFile {
        weights: measure.weights().to_vec(),
    })?)
}

pub fn function_json(f: &FunctionOnSpace) -> Result<String> {
    Ok(serde_json::to_string(&FunctionFile {
        values: f.values().to_vec(),
    })?)
}

/// Formats a number with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `point_id,weight,value` rows.
pub fn write_points_csv<W: Write>(
    out: W,
    measure: &DiscreteMeasure,
    f: &FunctionOnSpace,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["point_id", "weight", "value"])?;
    for (i, (&wt, &v)) in measure.weights().iter().zip(f.values()).enumerate() {
        w.write_record([i.to_string(), fmt_num(wt), fmt_num(v)])?;
    }
    w.flush()?;
    Ok(())
}
