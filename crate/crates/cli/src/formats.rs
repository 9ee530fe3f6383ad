//! JSON file formats. Complex entries are `[re, im]` pairs and matrices are
//! row-major arrays of rows.

use std::fs;
use std::path::Path;

use algpath::path::BoundCheck;
use algpath::{
    validate_zero_set, CMatrix64, MatrixPath64, MatrixTuple64, MultiPoly, MultiPolySystem64, PathSegment,
    SkewGenerator, Tolerances64, ZeroSet64,
};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleFile {
    pub m: usize,
    pub n: usize,
    pub matrices: Vec<MatrixJson>,
}

impl TupleFile {
    pub fn from_tuple(x: &MatrixTuple64) -> Self {
        Self { m: x.m(), n: x.n(), matrices: x.iter().map(matrix_to_json).collect() }
    }

    pub fn to_tuple(&self) -> Result<MatrixTuple64, CliError> {
        if self.matrices.len() != self.m {
            return Err(CliError::Param(format!("declared m = {} but {} matrices given", self.m, self.matrices.len())));
        }
        let mats = self.matrices.iter().map(|a| matrix_from_json(a, self.n)).collect::<Result<Vec<_>, _>>()?;
        Ok(MatrixTuple64::new(mats)?)
    }
}

pub fn matrix_to_json(a: &CMatrix64) -> MatrixJson {
    let n = a.dim();
    (0..n).map(|i| (0..n).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson, n: usize) -> Result<CMatrix64, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Param(format!("matrix is not {n}x{n}")));
    }
    let data = rows.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
    Ok(CMatrix64::from_row_major(n, data)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonomialJson {
    pub exps: Vec<u32>,
    pub coeff: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub monomials: Vec<MonomialJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstraintFile {
    pub variables: usize,
    pub polys: Vec<PolyJson>,
    pub zero_set: Vec<Vec<[f64; 2]>>,
}

impl ConstraintFile {
    /// Parses the system and validates the zero set against it.
    pub fn load(&self, tol: &Tolerances64) -> Result<(MultiPolySystem64, ZeroSet64), CliError> {
        let polys = self
            .polys
            .iter()
            .map(|p| {
                let terms =
                    p.monomials.iter().map(|t| (t.exps.clone(), Complex64::new(t.coeff[0], t.coeff[1]))).collect();
                MultiPoly::new(self.variables, terms)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let sys = MultiPolySystem64::new(self.variables, polys)?;
        let pts: Vec<Vec<Complex64>> =
            self.zero_set.iter().map(|p| p.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).collect();
        let z = validate_zero_set(&sys, &pts, tol)?;
        Ok((sys, z))
    }

    /// `x_k² − 1 = 0` for every coordinate; zero set `{−1, 1}^m`.
    pub fn sign_cube(m: usize) -> Self {
        let polys = (0..m)
            .map(|k| {
                let mut sq = vec![0; m];
                sq[k] = 2;
                PolyJson {
                    monomials: vec![
                        MonomialJson { exps: sq, coeff: [1.0, 0.0] },
                        MonomialJson { exps: vec![0; m], coeff: [-1.0, 0.0] },
                    ],
                }
            })
            .collect();
        let zero_set = (0..1usize << m)
            .map(|bits| (0..m).map(|k| [if bits >> k & 1 == 1 { 1.0 } else { -1.0 }, 0.0]).collect())
            .collect();
        Self { variables: m, polys, zero_set }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SegmentJson {
    Linear { start: TupleFile, end: TupleFile },
    Conjugation { base: TupleFile, generator: MatrixJson, a: f64, b: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathFile {
    pub segments: Vec<SegmentJson>,
    #[serde(default)]
    pub checks: Vec<BoundCheck>,
}

impl PathFile {
    pub fn from_path(p: &MatrixPath64) -> Self {
        let segments = p
            .segments()
            .iter()
            .map(|s| match s {
                PathSegment::Linear { start, end } => {
                    SegmentJson::Linear { start: TupleFile::from_tuple(start), end: TupleFile::from_tuple(end) }
                }
                PathSegment::Conjugation(c) => {
                    let (a, b) = c.interval();
                    SegmentJson::Conjugation {
                        base: TupleFile::from_tuple(c.base()),
                        generator: matrix_to_json(c.generator().matrix()),
                        a,
                        b,
                    }
                }
            })
            .collect();
        Self { segments, checks: p.checks().to_vec() }
    }

    /// Rebuilds the path. Generators are re-diagonalised, so samples agree
    /// with the original path to rounding, not bit for bit.
    pub fn to_path(&self, tol: &Tolerances64) -> Result<MatrixPath64, CliError> {
        let segments = self
            .segments
            .iter()
            .map(|s| match s {
                SegmentJson::Linear { start, end } => Ok(PathSegment::linear(start.to_tuple()?, end.to_tuple()?)?),
                SegmentJson::Conjugation { base, generator, a, b } => {
                    let k = matrix_from_json(generator, base.n)?;
                    Ok(PathSegment::conjugation(base.to_tuple()?, SkewGenerator::new(&k, tol)?, *a, *b)?)
                }
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(MatrixPath64::new(segments, tol)?.with_checks(self.checks.clone()))
    }
}

pub fn read_json<D: DeserializeOwned>(path: &Path) -> Result<D, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
