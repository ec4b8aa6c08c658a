//! File formats: colligations, point lists and a deterministic JSON writer
//! printing every float with 17 significant digits.

use std::io;

use num_complex::Complex;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::indefinite::SignatureMetric;
use crate::linalg::CMat;
use crate::scalar::{lit, to_f64, Real};

/// Compact JSON with floats written as `{:.16e}`; non-finite values become `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedFloatFormatter;

impl serde_json::ser::Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloatFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

/// Parse JSON, reporting the line and column of malformed input.
pub fn from_json<D: DeserializeOwned>(text: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("malformed JSON: {e}")))
}

fn check_format(format: u32) -> Result<()> {
    if format == 1 {
        Ok(())
    } else {
        Err(Error::Format(format!("unsupported format version {format}")))
    }
}

fn one() -> u32 {
    1
}

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json<T: Real>(m: &CMat<T>) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [to_f64(m[(i, j)].re), to_f64(m[(i, j)].im)]).collect())
        .collect()
}

pub fn matrix_from_json<T: Real>(rows: &JsonMatrix, what: &str) -> Result<CMat<T>> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Format(format!("\"{what}\" has rows of different lengths")));
    }
    Ok(CMat::from_fn(nr, nc, |i, j| Complex::new(lit(rows[i][j][0]), lit(rows[i][j][1]))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ColligationFile {
    #[serde(default = "one")]
    pub format: u32,
    pub n: usize,
    pub metric: JsonMatrix,
    pub H: JsonMatrix,
    pub K: JsonMatrix,
    pub Jdir: JsonMatrix,
}

impl ColligationFile {
    pub fn from_colligation<T: Real>(c: &Colligation<T>) -> Self {
        Self {
            format: 1,
            n: c.n(),
            metric: matrix_to_json(c.metric().matrix()),
            H: matrix_to_json(c.h_full()),
            K: matrix_to_json(c.k()),
            Jdir: matrix_to_json(c.jdir().matrix()),
        }
    }

    pub fn to_colligation<T: Real>(&self) -> Result<Colligation<T>> {
        check_format(self.format)?;
        let metric = SignatureMetric::new(matrix_from_json(&self.metric, "metric")?)?;
        if metric.dim() != self.n {
            return Err(Error::Format(format!("\"n\" is {} but the metric is {}x{}", self.n, metric.dim(), metric.dim())));
        }
        let jdir = SignatureMetric::new(matrix_from_json(&self.Jdir, "Jdir")?)?;
        let mut k = matrix_from_json::<T>(&self.K, "K")?;
        if self.n == 0 && k.nrows() == 0 {
            k = CMat::zeros(0, jdir.dim());
        }
        Colligation::new(metric, matrix_from_json(&self.H, "H")?, k, jdir)
    }
}

pub fn colligation_to_json<T: Real>(c: &Colligation<T>) -> Result<String> {
    to_json(&ColligationFile::from_colligation(c))
}

pub fn colligation_from_json<T: Real>(text: &str) -> Result<Colligation<T>> {
    from_json::<ColligationFile>(text)?.to_colligation()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsFile {
    #[serde(default = "one")]
    pub format: u32,
    pub points: Vec<[f64; 2]>,
}

pub fn points_to_json<T: Real>(points: &[Complex<T>]) -> Result<String> {
    to_json(&PointsFile { format: 1, points: points.iter().map(|z| [to_f64(z.re), to_f64(z.im)]).collect() })
}

pub fn points_from_json<T: Real>(text: &str) -> Result<Vec<Complex<T>>> {
    let file: PointsFile = from_json(text)?;
    check_format(file.format)?;
    Ok(file.points.iter().map(|&[re, im]| Complex::new(lit(re), lit(im))).collect())
}
