use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::function::{Builtin, MatrixFunction, RationalMatrix};
use super::poly::ComplexPolynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Serialized form of a [`MatrixFunction`]. Complex numbers are `[re, im]`
/// pairs and polynomial coefficients are in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FunctionSpec {
    Rational {
        dim: usize,
        entries: Vec<Vec<EntrySpec>>,
    },
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        negated: Option<bool>,
    },
    Blockdiag {
        blocks: Vec<FunctionSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntrySpec {
    pub num: Vec<[f64; 2]>,
    pub den: Vec<[f64; 2]>,
}

/// Top-level function file: a [`FunctionSpec`] plus the schema version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionFile {
    #[serde(default = "format_version")]
    pub format: u32,
    #[serde(flatten)]
    pub spec: FunctionSpec,
}

fn format_version() -> u32 {
    1
}

impl FunctionFile {
    pub fn new(spec: FunctionSpec) -> Self {
        Self { format: 1, spec }
    }
}

fn poly_to_json<T: Real>(p: &ComplexPolynomial<T>) -> Vec<[f64; 2]> {
    if p.is_zero() {
        return vec![[0.0, 0.0]];
    }
    p.coeffs().iter().map(|c| [to_f64(c.re), to_f64(c.im)]).collect()
}

fn poly_from_json<T: Real>(c: &[[f64; 2]]) -> ComplexPolynomial<T> {
    ComplexPolynomial::new(c.iter().map(|&[re, im]| Complex::new(lit(re), lit(im))).collect())
}

impl<T: Real> MatrixFunction<T> {
    pub fn to_spec(&self) -> FunctionSpec {
        match self {
            MatrixFunction::Rational(r) => FunctionSpec::Rational {
                dim: r.dim(),
                entries: (0..r.dim())
                    .map(|i| {
                        (0..r.dim())
                            .map(|j| {
                                let f = r.entry(i, j);
                                EntrySpec { num: poly_to_json(f.num()), den: poly_to_json(f.den()) }
                            })
                            .collect()
                    })
                    .collect(),
            },
            MatrixFunction::Builtin(Builtin::Example1 { negated }) => FunctionSpec::Builtin {
                name: "example1".into(),
                gamma: None,
                d: None,
                negated: negated.then_some(true),
            },
            MatrixFunction::Builtin(Builtin::Example2 { gamma, d }) => FunctionSpec::Builtin {
                name: "example2".into(),
                gamma: Some(to_f64(*gamma)),
                d: Some(to_f64(*d)),
                negated: None,
            },
            MatrixFunction::BlockDiag(blocks) => FunctionSpec::Blockdiag {
                blocks: blocks.iter().map(Self::to_spec).collect(),
            },
        }
    }

    pub fn from_spec(spec: &FunctionSpec) -> Result<Self> {
        match spec {
            FunctionSpec::Rational { dim, entries } => {
                if entries.len() != *dim || entries.iter().any(|row| row.len() != *dim) {
                    return Err(Error::Format(format!("rational entries must form a {dim}x{dim} array")));
                }
                let mut fs = Vec::with_capacity(dim * dim);
                for (i, row) in entries.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        let den = poly_from_json::<T>(&e.den);
                        if den.is_zero() {
                            return Err(Error::Format(format!("entry ({i},{j}) has a zero denominator")));
                        }
                        fs.push(RationalFunction::new(poly_from_json(&e.num), den)?);
                    }
                }
                Ok(MatrixFunction::Rational(RationalMatrix::new(*dim, fs)?))
            }
            FunctionSpec::Builtin { name, gamma, d, negated } => match name.as_str() {
                "example1" => Ok(MatrixFunction::Builtin(Builtin::Example1 { negated: negated.unwrap_or(false) })),
                "example2" => {
                    let gamma = gamma.ok_or_else(|| Error::Format("example2 needs \"gamma\"".into()))?;
                    MatrixFunction::example2(lit(gamma), lit(d.unwrap_or(0.0)))
                }
                other => Err(Error::Format(format!("unknown builtin \"{other}\""))),
            },
            FunctionSpec::Blockdiag { blocks } => {
                if blocks.is_empty() {
                    return Err(Error::Format("blockdiag needs at least one block".into()));
                }
                Ok(MatrixFunction::BlockDiag(blocks.iter().map(Self::from_spec).collect::<Result<_>>()?))
            }
        }
    }

    /// Parse a function file, checking the schema version when present.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: FunctionFile = serde_json::from_str(text)
            .map_err(|e| Error::Format(format!("malformed JSON: {e}")))?;
        if file.format != 1 {
            return Err(Error::Format(format!("unsupported format version {}", file.format)));
        }
        Self::from_spec(&file.spec)
    }

    pub fn to_file(&self) -> FunctionFile {
        FunctionFile::new(self.to_spec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = MatrixFunction<f64>;

    #[test]
    fn parses_documented_shapes() {
        let r = F::from_json(r#"{"type":"rational","dim":1,"entries":[[{"num":[[-1,0]],"den":[[0,0],[1,0]]}]]}"#)
            .unwrap();
        assert_eq!(r, F::scalar_real(&[-1.0], &[0.0, 1.0]).unwrap());
        assert_eq!(F::from_json(r#"{"type":"builtin","name":"example1"}"#).unwrap(), F::example1());
        let e2 = F::from_json(r#"{"format":1,"type":"builtin","name":"example2","gamma":1,"d":0.5}"#).unwrap();
        assert_eq!(e2, F::example2(1.0, 0.5).unwrap());
        let bd = F::from_json(
            r#"{"type":"blockdiag","blocks":[{"type":"builtin","name":"example1"},
                {"type":"rational","dim":1,"entries":[[{"num":[[-1,0]],"den":[[0,0],[1,0]]}]]}]}"#,
        )
        .unwrap();
        assert_eq!(bd.dim(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(F::from_json("{"), Err(Error::Format(_))));
        assert!(matches!(F::from_json(r#"{"type":"builtin","name":"example3"}"#), Err(Error::Format(_))));
        assert!(matches!(
            F::from_json(r#"{"format":2,"type":"builtin","name":"example1"}"#),
            Err(Error::Format(_))
        ));
        assert!(F::from_json(r#"{"type":"rational","dim":1,"entries":[[{"num":[[1,0]],"den":[[0,0]]}]]}"#).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let f = F::BlockDiag(vec![
            F::scalar_real(&[0.0, -1.0], &[1.0, 0.0, 1.0]).unwrap(),
            F::example2(2.0, 1.0).unwrap(),
            F::Builtin(Builtin::Example1 { negated: true }),
        ]);
        let text = serde_json::to_string(&f.to_file()).unwrap();
        assert_eq!(F::from_json(&text).unwrap(), f);
    }
}
