//! Wire formats. Matrices serialize as
//! `{"rows": r, "cols": c, "data": [entry, ...]}` row-major, where an entry is
//! either a bare number (real) or a `[re, im]` pair. Floats go through the
//! shortest round-trip representation, so replaying a serialized value is
//! bit-faithful.

use ndarray::Array2;
use ndarray_linalg::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Pair(f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Entry>,
}

impl MatrixJson {
    pub fn from_cmat(m: &CMat) -> Self {
        let (rows, cols) = m.dim();
        let data = m
            .iter()
            .map(|z| if z.im == 0.0 { Entry::Real(z.re) } else { Entry::Pair(z.re, z.im) })
            .collect();
        MatrixJson { rows, cols, data }
    }

    pub fn to_cmat(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Validation(format!(
                "matrix data length {} does not match {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        let entries: Vec<c64> = self
            .data
            .iter()
            .map(|e| match *e {
                Entry::Real(r) => c64::new(r, 0.0),
                Entry::Pair(r, i) => c64::new(r, i),
            })
            .collect();
        for z in &entries {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::Validation("matrix entry is not finite".into()));
            }
        }
        Array2::from_shape_vec((self.rows, self.cols), entries)
            .map_err(|e| Error::Validation(e.to_string()))
    }
}

pub fn matrix_to_json_string(m: &CMat) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_cmat(m)).expect("matrix serialization")
}

pub fn matrix_from_json_str(s: &str) -> Result<CMat> {
    let mj: MatrixJson =
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("bad matrix JSON: {e}")))?;
    mj.to_cmat()
}

/// Quiver representations on the wire: dimension vectors plus block matrices
/// under the keys used throughout the docs: "v", "w", "X", "Y", "x", "y".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuiverRepJson {
    pub v: Vec<usize>,
    pub w: Vec<usize>,
    #[serde(rename = "X")]
    pub xs: Vec<MatrixJson>,
    #[serde(rename = "Y")]
    pub ys: Vec<MatrixJson>,
    pub x: MatrixJson,
    pub y: MatrixJson,
}

impl QuiverRepJson {
    pub fn from_rep(rep: &crate::quiver::QuiverRep) -> Self {
        QuiverRepJson {
            v: rep.dims.v.clone(),
            w: rep.dims.w.clone(),
            xs: rep.xs.iter().map(MatrixJson::from_cmat).collect(),
            ys: rep.ys.iter().map(MatrixJson::from_cmat).collect(),
            x: MatrixJson::from_cmat(&rep.xw),
            y: MatrixJson::from_cmat(&rep.yw),
        }
    }

    pub fn to_rep(&self) -> Result<crate::quiver::QuiverRep> {
        let rep = crate::quiver::QuiverRep {
            dims: crate::quiver::DimensionVector { v: self.v.clone(), w: self.w.clone() },
            xs: self.xs.iter().map(|m| m.to_cmat()).collect::<Result<_>>()?,
            ys: self.ys.iter().map(|m| m.to_cmat()).collect::<Result<_>>()?,
            xw: self.x.to_cmat()?,
            yw: self.y.to_cmat()?,
        };
        rep.validate()?;
        Ok(rep)
    }
}

/// Encoded point on the wire: rep + spectral parameter + balance diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodedPointJson {
    pub rep: QuiverRepJson,
    pub zeta: crate::linalg::SpectralData,
    pub balance: crate::bridge::BalanceReport,
    pub kappa: (f64, f64),
}

impl EncodedPointJson {
    pub fn from_point(pt: &crate::bridge::EncodedPoint) -> Self {
        EncodedPointJson {
            rep: QuiverRepJson::from_rep(&pt.rep),
            zeta: pt.zeta.clone(),
            balance: pt.balance.clone(),
            kappa: pt.kappa,
        }
    }

    pub fn to_point(&self) -> Result<crate::bridge::EncodedPoint> {
        Ok(crate::bridge::EncodedPoint {
            rep: self.rep.to_rep()?,
            zeta: self.zeta.clone(),
            balance: self.balance.clone(),
            kappa: self.kappa,
        })
    }
}
