//! JSON file schemas: task, dataset, shares, outputs, decoded result.
//!
//! ```text
//! task     {"p": int, "m": int, "n": int, "g": [[{"coeff": int, "exps": [int; m]}, ...]; n]}
//! dataset  {"K": int, "data": [[int; m]; K]}
//! shares   {"scheme": str, "p": int, "K": int, "d": int, <scheme params>, "shares": [[int; m]; N]}
//! outputs  {"outputs": [[int; n]; N]}
//! decoded  {"f": [int; n]}
//! ```
//!
//! All integers inside vectors are residues in `[0, p)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::field::{FieldConfig, FieldVector};
use crate::poly::{Dataset, Monomial, PolyMap};
use crate::scheme::SchemeParams;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("schema violation in {file} file: {source}")]
    Schema {
        file: &'static str,
        #[source]
        source: serde_json::Error,
    },
    #[error("{file} file: residue {value} at {location} is out of range for F_{p}")]
    ResidueOutOfRange {
        file: &'static str,
        location: String,
        value: u64,
        p: u64,
    },
    #[error("{file} file: expected {expected} {what}, found {actual}")]
    CountMismatch {
        file: &'static str,
        what: String,
        expected: usize,
        actual: usize,
    },
    #[error("{file} file: {source}")]
    Invalid {
        file: &'static str,
        #[source]
        source: Error,
    },
}

pub type FileResult<T> = std::result::Result<T, FileError>;

fn parse<T: for<'de> Deserialize<'de>>(file: &'static str, text: &str) -> FileResult<T> {
    serde_json::from_str(text).map_err(|source| FileError::Schema { file, source })
}

fn check_rows(
    file: &'static str,
    what: &str,
    field: FieldConfig,
    rows: &[Vec<u64>],
    count: Option<usize>,
    width: Option<usize>,
) -> FileResult<Vec<FieldVector>> {
    if let Some(expected) = count {
        if rows.len() != expected {
            return Err(FileError::CountMismatch {
                file,
                what: format!("{what} rows"),
                expected,
                actual: rows.len(),
            });
        }
    }
    let width = width.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
    rows.iter()
        .enumerate()
        .map(|(r, row)| {
            if row.len() != width {
                return Err(FileError::CountMismatch {
                    file,
                    what: format!("entries in {what} row {r}"),
                    expected: width,
                    actual: row.len(),
                });
            }
            if let Some((c, &value)) = row.iter().enumerate().find(|(_, &v)| v >= field.modulus()) {
                return Err(FileError::ResidueOutOfRange {
                    file,
                    location: format!("{what}[{r}][{c}]"),
                    value,
                    p: field.modulus(),
                });
            }
            Ok(FieldVector::reduced(field, row))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: u64,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub p: u64,
    pub m: usize,
    pub n: usize,
    pub g: Vec<Vec<TermJson>>,
}

impl TaskFile {
    pub fn parse(text: &str) -> FileResult<Self> {
        parse("task", text)
    }

    pub fn from_poly(g: &PolyMap) -> Self {
        TaskFile {
            p: g.field().modulus(),
            m: g.input_dim(),
            n: g.output_dim(),
            g: (0..g.output_dim())
                .map(|t| {
                    g.terms(t)
                        .iter()
                        .map(|term| TermJson {
                            coeff: term.coeff.value(),
                            exps: term.exps.clone(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> FileResult<PolyMap> {
        const FILE: &str = "task";
        let field = FieldConfig::new(self.p).map_err(|source| FileError::Invalid { file: FILE, source })?;
        if self.g.len() != self.n {
            return Err(FileError::CountMismatch {
                file: FILE,
                what: "output polynomials".into(),
                expected: self.n,
                actual: self.g.len(),
            });
        }
        let mut outputs = Vec::with_capacity(self.n);
        for (t, terms) in self.g.iter().enumerate() {
            let mut out = Vec::with_capacity(terms.len());
            for (i, term) in terms.iter().enumerate() {
                if term.exps.len() != self.m {
                    return Err(FileError::CountMismatch {
                        file: FILE,
                        what: format!("exponents in g[{t}][{i}]"),
                        expected: self.m,
                        actual: term.exps.len(),
                    });
                }
                let coeff = field.residue(term.coeff).map_err(|_| FileError::ResidueOutOfRange {
                    file: FILE,
                    location: format!("g[{t}][{i}].coeff"),
                    value: term.coeff,
                    p: self.p,
                })?;
                out.push(Monomial::new(coeff, term.exps.clone()));
            }
            outputs.push(out);
        }
        PolyMap::new(field, self.m, outputs).map_err(|source| FileError::Invalid { file: FILE, source })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    #[serde(rename = "K")]
    pub k: usize,
    pub data: Vec<Vec<u64>>,
}

impl DatasetFile {
    pub fn parse(text: &str) -> FileResult<Self> {
        parse("dataset", text)
    }

    pub fn from_dataset(data: &Dataset) -> Self {
        DatasetFile {
            k: data.len(),
            data: data.items().iter().map(|x| x.residues().to_vec()).collect(),
        }
    }

    pub fn to_dataset(&self, field: FieldConfig) -> FileResult<Dataset> {
        let items = check_rows("dataset", "data", field, &self.data, Some(self.k), None)?;
        Dataset::new(field, items).map_err(|source| FileError::Invalid { file: "dataset", source })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharesFile {
    #[serde(flatten)]
    pub params: SchemeParams,
    pub shares: Vec<Vec<u64>>,
}

impl SharesFile {
    pub fn parse(text: &str) -> FileResult<Self> {
        parse("shares", text)
    }

    pub fn new(params: SchemeParams, shares: &[FieldVector]) -> Self {
        SharesFile {
            params,
            shares: shares.iter().map(|s| s.residues().to_vec()).collect(),
        }
    }

    pub fn share_vectors(&self, workers: usize) -> FileResult<Vec<FieldVector>> {
        let field = self
            .params
            .field()
            .map_err(|source| FileError::Invalid { file: "shares", source })?;
        check_rows("shares", "shares", field, &self.shares, Some(workers), None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsFile {
    pub outputs: Vec<Vec<u64>>,
}

impl OutputsFile {
    pub fn parse(text: &str) -> FileResult<Self> {
        parse("outputs", text)
    }

    pub fn new(outputs: &[FieldVector]) -> Self {
        OutputsFile {
            outputs: outputs.iter().map(|o| o.residues().to_vec()).collect(),
        }
    }

    pub fn vectors(&self, field: FieldConfig, workers: usize) -> FileResult<Vec<FieldVector>> {
        check_rows("outputs", "outputs", field, &self.outputs, Some(workers), None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodedFile {
    pub f: Vec<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldRng;
    use crate::poly::random_poly;
    use proptest::prelude::*;

    fn f(p: u64) -> FieldConfig {
        FieldConfig::new(p).unwrap()
    }

    #[test]
    fn task_parse_and_errors() {
        let text = r#"{"p": 5, "m": 2, "n": 1, "g": [[{"coeff": 2, "exps": [1, 1]}, {"coeff": 1, "exps": [0, 1]}]]}"#;
        let g = TaskFile::parse(text).unwrap().to_poly().unwrap();
        let x = FieldVector::reduced(f(5), &[2, 3]);
        assert_eq!(g.eval(&x).unwrap().residues(), &[0]);

        let bad_residue = r#"{"p": 5, "m": 1, "n": 1, "g": [[{"coeff": 7, "exps": [1]}]]}"#;
        assert!(matches!(
            TaskFile::parse(bad_residue).unwrap().to_poly(),
            Err(FileError::ResidueOutOfRange { .. })
        ));
        let bad_count = r#"{"p": 5, "m": 2, "n": 1, "g": [[{"coeff": 1, "exps": [1]}]]}"#;
        assert!(matches!(
            TaskFile::parse(bad_count).unwrap().to_poly(),
            Err(FileError::CountMismatch { .. })
        ));
        assert!(matches!(TaskFile::parse(r#"{"p": 5}"#), Err(FileError::Schema { .. })));
        let not_prime = r#"{"p": 6, "m": 1, "n": 1, "g": [[]]}"#;
        assert!(matches!(
            TaskFile::parse(not_prime).unwrap().to_poly(),
            Err(FileError::Invalid { .. })
        ));
    }

    #[test]
    fn dataset_errors() {
        let file = DatasetFile::parse(r#"{"K": 2, "data": [[1], [2]]}"#).unwrap();
        assert_eq!(file.to_dataset(f(5)).unwrap().len(), 2);
        let file = DatasetFile::parse(r#"{"K": 3, "data": [[1], [2]]}"#).unwrap();
        assert!(matches!(file.to_dataset(f(5)), Err(FileError::CountMismatch { .. })));
        let file = DatasetFile::parse(r#"{"K": 2, "data": [[1], [9]]}"#).unwrap();
        assert!(matches!(file.to_dataset(f(5)), Err(FileError::ResidueOutOfRange { .. })));
        let file = DatasetFile::parse(r#"{"K": 2, "data": [[1], [2, 3]]}"#).unwrap();
        assert!(matches!(file.to_dataset(f(5)), Err(FileError::CountMismatch { .. })));
    }

    #[test]
    fn shares_file_layout() {
        let params = SchemeParams {
            c: Some(4),
            betas: Some(vec![4]),
            ..SchemeParams::new("harmonic", 5, 2, 2)
        };
        let shares = vec![FieldVector::reduced(f(5), &[3]); 4];
        let json = serde_json::to_string(&SharesFile::new(params, &shares)).unwrap();
        assert_eq!(
            json,
            r#"{"scheme":"harmonic","p":5,"K":2,"d":2,"c":4,"betas":[4],"shares":[[3],[3],[3],[3]]}"#
        );
        let back = SharesFile::parse(&json).unwrap();
        assert_eq!(back.share_vectors(4).unwrap(), shares);
        assert!(matches!(back.share_vectors(3), Err(FileError::CountMismatch { .. })));
    }

    proptest! {
        #[test]
        fn task_roundtrip(seed in any::<u64>(), d in 1usize..4) {
            let mut rng = FieldRng::seed_from_u64(seed);
            let g = random_poly(&mut rng, f(11), 3, 2, d).unwrap();
            let text = serde_json::to_string(&TaskFile::from_poly(&g)).unwrap();
            prop_assert_eq!(TaskFile::parse(&text).unwrap().to_poly().unwrap(), g);
        }
    }
}
