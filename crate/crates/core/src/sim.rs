//! Master/worker simulation, validity trials, and the exhaustive privacy
//! auditor.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldRng, FieldVector};
use crate::poly::{direct_gradient_sum, Dataset, PolyMap};
use crate::scheme::CodingScheme;

/// Default cap on the number of `(dataset, keys)` states the auditor enumerates.
pub const DEFAULT_AUDIT_BUDGET: u128 = 10_000_000;

/// Outcome of one encode / evaluate / decode round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialReport {
    pub scheme: String,
    pub p: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub workers: usize,
    pub keys: usize,
    pub decoded: Vec<u64>,
    pub oracle: Vec<u64>,
    pub exact_match: bool,
    pub worker_evaluations: usize,
}

/// Draws `scheme.key_count()` uniform keys of dimension `m` from `seed`,
/// encodes `data`, applies `g` to every share, decodes, and compares
/// against the direct sum.
pub fn run_trial(scheme: &dyn CodingScheme, g: &PolyMap, data: &Dataset, seed: u64) -> Result<TrialReport> {
    scheme.check_task(g)?;
    if data.dim() != g.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: g.input_dim(),
            actual: data.dim(),
        });
    }
    let field = scheme.field();
    let mut rng = FieldRng::seed_from_u64(seed);
    let keys: Vec<FieldVector> = (0..scheme.key_count())
        .map(|_| rng.uniform_vector(field, data.dim()))
        .collect();
    let shares = scheme.encode(data, &keys)?;
    let outputs = shares.iter().map(|s| g.eval(s)).collect::<Result<Vec<_>>>()?;
    let decoded = scheme.decode(&outputs)?;
    let oracle = direct_gradient_sum(g, data)?;
    Ok(TrialReport {
        scheme: scheme.name().to_string(),
        p: field.modulus(),
        k: scheme.inputs(),
        d: scheme.degree(),
        m: g.input_dim(),
        n: g.output_dim(),
        seed,
        workers: scheme.worker_count(),
        keys: scheme.key_count(),
        exact_match: decoded == oracle,
        decoded: decoded.residues().to_vec(),
        oracle: oracle.residues().to_vec(),
        worker_evaluations: outputs.len(),
    })
}

/// Exhaustive single-worker privacy audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub scheme: String,
    pub p: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub d: usize,
    pub m: usize,
    pub workers: usize,
    /// Number of dataset values enumerated, `p^{Km}`.
    pub dataset_values: u128,
    /// Number of key values enumerated per dataset value.
    pub key_values: u128,
    /// `I(X; X~_i)` in bits under a uniform prior on `X`.
    pub mi_bits_per_worker: Vec<f64>,
    /// Whether the law of `X~_i` given `X = x` is the same for every `x`.
    pub conditional_equal_per_worker: Vec<bool>,
    pub private: bool,
}

impl PrivacyReport {
    pub fn leaking_workers(&self) -> Vec<usize> {
        self.conditional_equal_per_worker
            .iter()
            .enumerate()
            .filter(|(_, &ok)| !ok)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Number of states the audit would enumerate, `p^{(K + keys) m}`.
pub fn audit_size(scheme: &dyn CodingScheme, m: usize) -> Option<u128> {
    let p = scheme.field().modulus() as u128;
    let exp = ((scheme.inputs() + scheme.key_count()) * m) as u32;
    p.checked_pow(exp)
}

fn digits_to_vectors(mut code: u128, field: crate::field::FieldConfig, count: usize, m: usize) -> Vec<FieldVector> {
    let p = field.modulus() as u128;
    (0..count)
        .map(|_| {
            let residues: Vec<u64> = (0..m)
                .map(|_| {
                    let r = (code % p) as u64;
                    code /= p;
                    r
                })
                .collect();
            FieldVector::reduced(field, &residues)
        })
        .collect()
}

/// Enumerates every dataset value and every key value, tabulates each
/// worker's share, and checks that its conditional law does not depend on
/// the dataset. Mutual information is derived from the exact counts.
pub fn privacy_audit_exhaustive(scheme: &dyn CodingScheme, m: usize, budget: u128) -> Result<PrivacyReport> {
    let required = audit_size(scheme, m).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let field = scheme.field();
    let p = field.modulus() as u128;
    let k = scheme.inputs();
    let n_keys = scheme.key_count();
    let n_workers = scheme.worker_count();
    let dataset_values = p.pow((k * m) as u32);
    let key_values = p.pow((n_keys * m) as u32);

    let encode_all = |x_code: u128| -> Result<Vec<HashMap<u128, u64>>> {
        let data = Dataset::new(field, digits_to_vectors(x_code, field, k, m))?;
        let mut hists = vec![HashMap::new(); n_workers];
        for key_code in 0..key_values {
            let keys = digits_to_vectors(key_code, field, n_keys, m);
            let shares = scheme.encode(&data, &keys)?;
            if shares.len() != n_workers {
                return Err(Error::CountMismatch {
                    what: "shares",
                    expected: n_workers,
                    actual: shares.len(),
                });
            }
            for (h, s) in hists.iter_mut().zip(&shares) {
                *h.entry(s.index()).or_insert(0u64) += 1;
            }
        }
        Ok(hists)
    };

    // Pass 1: marginal share counts per worker.
    let mut marginal: Vec<HashMap<u128, u64>> = vec![HashMap::new(); n_workers];
    for x_code in 0..dataset_values {
        for (acc, h) in marginal.iter_mut().zip(encode_all(x_code)?) {
            for (s, c) in h {
                *acc.entry(s).or_insert(0) += c;
            }
        }
    }

    // Pass 2: conditional laws against the first dataset value, and MI.
    let reference = encode_all(0)?;
    let mut equal = vec![true; n_workers];
    let mut mi = vec![0f64; n_workers];
    let x_total = dataset_values as f64;
    let k_total = key_values as f64;
    for x_code in 0..dataset_values {
        let hists = encode_all(x_code)?;
        for (w, h) in hists.iter().enumerate() {
            if *h != reference[w] {
                equal[w] = false;
            }
            for (s, &c) in h {
                let ratio_num = c as u128 * dataset_values;
                let ratio_den = marginal[w][s] as u128;
                if ratio_num != ratio_den {
                    mi[w] += (c as f64 / (x_total * k_total)) * (ratio_num as f64 / ratio_den as f64).log2();
                }
            }
        }
    }
    for (w, ok) in equal.iter().enumerate() {
        if *ok {
            mi[w] = 0.0;
        }
    }
    Ok(PrivacyReport {
        scheme: scheme.name().to_string(),
        p: field.modulus(),
        k,
        d: scheme.degree(),
        m,
        workers: n_workers,
        dataset_values,
        key_values,
        private: equal.iter().all(|&b| b),
        mi_bits_per_worker: mi,
        conditional_equal_per_worker: equal,
    })
}

/// One line of the worker-count comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerCountRow {
    pub scheme: String,
    pub workers: usize,
    /// Only valid for the special task family with `d = char F`.
    pub special_case_only: bool,
}

pub fn worker_count_table(k: usize, d: usize) -> Vec<WorkerCountRow> {
    let row = |scheme: &str, workers, special_case_only| WorkerCountRow {
        scheme: scheme.into(),
        workers,
        special_case_only,
    };
    vec![
        row("harmonic", k * (d - 1) + 2, false),
        row("lcc", k * d + 1, false),
        row("shamir", k * (d + 1), false),
        row("freshman", 2, true),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{SchemeParams, SchemeRegistry};

    #[test]
    fn worker_count_examples() {
        let counts = |k, d| -> Vec<usize> {
            worker_count_table(k, d).iter().take(3).map(|r| r.workers).collect()
        };
        assert_eq!(counts(10, 2), vec![12, 21, 30]);
        assert_eq!(counts(1, 1), vec![2, 2, 2]);
        assert_eq!(counts(2, 2), vec![4, 5, 6]);
        assert!(worker_count_table(3, 3)[3].special_case_only);
    }

    #[test]
    fn trial_is_deterministic() {
        let reg = SchemeRegistry::default();
        let s = reg.build(&SchemeParams::new("harmonic", 13, 3, 2)).unwrap();
        let mut rng = FieldRng::seed_from_u64(1);
        let g = s.sample_task(&mut rng, 2, 2).unwrap();
        let data = Dataset::random(&mut rng, s.field(), 3, 2).unwrap();
        let a = run_trial(s.as_ref(), &g, &data, 77).unwrap();
        let b = run_trial(s.as_ref(), &g, &data, 77).unwrap();
        assert_eq!(a, b);
        assert!(a.exact_match);
        assert_eq!(a.worker_evaluations, 5);
    }

    #[test]
    fn trial_rejects_bad_inputs() {
        let reg = SchemeRegistry::default();
        let s = reg.build(&SchemeParams::new("harmonic", 13, 2, 2)).unwrap();
        let mut rng = FieldRng::seed_from_u64(1);
        let g = s.sample_task(&mut rng, 2, 1).unwrap();
        let wrong_dim = Dataset::random(&mut rng, s.field(), 2, 3).unwrap();
        assert!(run_trial(s.as_ref(), &g, &wrong_dim, 0).is_err());
        let g3 = crate::poly::random_poly(&mut rng, s.field(), 2, 1, 3).unwrap();
        let data = Dataset::random(&mut rng, s.field(), 2, 2).unwrap();
        assert!(run_trial(s.as_ref(), &g3, &data, 0).is_err());
    }

    #[test]
    fn audit_budget() {
        let reg = SchemeRegistry::default();
        let s = reg.build(&SchemeParams::new("shamir", 11, 3, 2)).unwrap();
        assert_eq!(audit_size(s.as_ref(), 1), Some(11u128.pow(6)));
        assert!(matches!(
            privacy_audit_exhaustive(s.as_ref(), 1, 1000),
            Err(Error::BudgetExceeded { required: 1771561, budget: 1000 })
        ));
    }

    #[test]
    fn harmonic_fixture_is_private() {
        let reg = SchemeRegistry::default();
        let s = reg.build(&SchemeParams::new("harmonic", 5, 2, 2)).unwrap();
        let r = privacy_audit_exhaustive(s.as_ref(), 1, DEFAULT_AUDIT_BUDGET).unwrap();
        assert!(r.private);
        assert_eq!(r.mi_bits_per_worker, vec![0.0; 4]);
        assert_eq!((r.dataset_values, r.key_values), (25, 5));
    }
}
