//! Sparse multivariate polynomial maps `g: F^m -> F^n`, the brute-force
//! gradient-type sum, and the multilinearization `g'`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FieldConfig, FieldElement, FieldRng, FieldVector};

/// One term `coeff * prod_k x_k^{exps[k]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: FieldElement,
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: FieldElement, exps: Vec<u32>) -> Self {
        Monomial { coeff, exps }
    }

    pub fn degree(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    fn eval(&self, x: &FieldVector) -> FieldElement {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(self.coeff, |acc, (k, &e)| acc * x.get(k).pow(e as u64))
    }
}

/// Reduces an exponent to its canonical representative: `x^e` and
/// `x^{e'}` agree as functions on `F_p` when `e, e' >= 1` and
/// `e = e' (mod p-1)`.
pub fn canonical_exponent(e: u32, p: u64) -> u32 {
    if e == 0 {
        0
    } else {
        (((e as u64 - 1) % (p - 1)) + 1) as u32
    }
}

/// A polynomial map `F^m -> F^n` stored as one sparse term list per
/// output coordinate, in canonical form: exponents are at most `p - 1`,
/// exponent vectors within one coordinate are distinct and sorted, and no
/// stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    field: FieldConfig,
    m: usize,
    n: usize,
    outputs: Vec<Vec<Monomial>>,
}

impl PolyMap {
    /// Canonicalizes and merges the given terms.
    pub fn new(field: FieldConfig, m: usize, outputs: Vec<Vec<Monomial>>) -> Result<Self> {
        let n = outputs.len();
        if n == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        let p = field.modulus();
        let mut canon = Vec::with_capacity(n);
        for terms in outputs {
            let mut merged: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
            for t in terms {
                if t.exps.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        actual: t.exps.len(),
                    });
                }
                field.check(t.coeff.field())?;
                let exps: Vec<u32> = t.exps.iter().map(|&e| canonical_exponent(e, p)).collect();
                let slot = merged.entry(exps).or_insert(field.zero());
                *slot = *slot + t.coeff;
            }
            canon.push(
                merged
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(exps, coeff)| Monomial { coeff, exps })
                    .collect(),
            );
        }
        Ok(PolyMap {
            field,
            m,
            n,
            outputs: canon,
        })
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    pub fn output_dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self, coord: usize) -> &[Monomial] {
        &self.outputs[coord]
    }

    /// Maximum total degree over all stored terms (0 for a constant map).
    pub fn total_degree(&self) -> usize {
        self.outputs
            .iter()
            .flatten()
            .map(Monomial::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.total_degree() == 0
    }

    pub fn eval(&self, x: &FieldVector) -> Result<FieldVector> {
        self.field.check(x.field())?;
        if x.dim() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: x.dim(),
            });
        }
        let vals: Vec<FieldElement> = self
            .outputs
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .fold(self.field.zero(), |acc, t| acc + t.eval(x))
            })
            .collect();
        FieldVector::from_elements(self.field, &vals)
    }

    /// Coefficient-wise sum of two maps with equal shapes.
    pub fn add(&self, other: &PolyMap) -> Result<PolyMap> {
        self.field.check(other.field)?;
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::DimensionMismatch {
                expected: self.m * self.n,
                actual: other.m * other.n,
            });
        }
        let outputs = self
            .outputs
            .iter()
            .zip(&other.outputs)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        PolyMap::new(self.field, self.m, outputs)
    }
}

/// A dataset `X_1, ..., X_K` of equal-dimension vectors over one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    field: FieldConfig,
    m: usize,
    items: Vec<FieldVector>,
}

impl Dataset {
    pub fn new(field: FieldConfig, items: Vec<FieldVector>) -> Result<Self> {
        let Some(first) = items.first() else {
            return Err(Error::CountMismatch {
                what: "dataset items (need K >= 1)",
                expected: 1,
                actual: 0,
            });
        };
        let m = first.dim();
        for x in &items {
            field.check(x.field())?;
            if x.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: x.dim(),
                });
            }
        }
        Ok(Dataset { field, m, items })
    }

    /// `K` uniform items of dimension `m`, drawn item by item.
    pub fn random(rng: &mut FieldRng, field: FieldConfig, k: usize, m: usize) -> Result<Self> {
        let items = (0..k).map(|_| rng.uniform_vector(field, m)).collect();
        Dataset::new(field, items)
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn items(&self) -> &[FieldVector] {
        &self.items
    }
}

/// The gradient-type function `f(X) = g(X_1) + ... + g(X_K)`, evaluated
/// directly. This is the oracle every scheme is checked against.
pub fn direct_gradient_sum(g: &PolyMap, data: &Dataset) -> Result<FieldVector> {
    let mut acc = FieldVector::zeros(g.field(), g.output_dim());
    for x in data.items() {
        acc = acc.add(&g.eval(x)?)?;
    }
    Ok(acc)
}

/// `g'(X_1, ..., X_d) = sum over S of (-1)^{|S|} g(sum_{j in S} X_j)`,
/// evaluated on demand over all `2^d` subsets.
///
/// For `d = deg g` the result is multilinear in the `d` blocks, and it is
/// not identically zero when `p > d`.
#[derive(Debug, Clone)]
pub struct Multilinearized {
    g: PolyMap,
    d: usize,
}

pub fn multilinearize(g: &PolyMap, d: usize) -> Result<Multilinearized> {
    if d < 1 {
        return Err(Error::InvalidDegree {
            degree: d,
            reason: "multilinearization needs at least one block".into(),
        });
    }
    Ok(Multilinearized { g: g.clone(), d })
}

impl Multilinearized {
    pub fn blocks(&self) -> usize {
        self.d
    }

    pub fn block_dim(&self) -> usize {
        self.g.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.g.output_dim()
    }

    pub fn eval(&self, blocks: &[FieldVector]) -> Result<FieldVector> {
        if blocks.len() != self.d {
            return Err(Error::CountMismatch {
                what: "multilinear blocks",
                expected: self.d,
                actual: blocks.len(),
            });
        }
        let field = self.g.field();
        let m = self.g.input_dim();
        let mut acc = FieldVector::zeros(field, self.g.output_dim());
        for mask in 0u64..(1u64 << self.d) {
            let mut sum = FieldVector::zeros(field, m);
            for (j, b) in blocks.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    sum = sum.add(b)?;
                }
            }
            let sign = if mask.count_ones() % 2 == 0 {
                field.one()
            } else {
                -field.one()
            };
            acc.add_scaled(sign, &self.g.eval(&sum)?)?;
        }
        Ok(acc)
    }
}

/// Random sparse map of total degree exactly `d` with canonical exponents.
///
/// One term of degree `d` with a nonzero coefficient is always placed in a
/// random output coordinate; every coordinate additionally gets 1..=3
/// random terms of degree `0..=d`.
pub fn random_poly(
    rng: &mut FieldRng,
    field: FieldConfig,
    m: usize,
    n: usize,
    d: usize,
) -> Result<PolyMap> {
    let cap = (field.modulus() - 1) as usize;
    if d < 1 {
        return Err(Error::InvalidDegree {
            degree: d,
            reason: "random polynomials must be non-constant".into(),
        });
    }
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    if d > m * cap {
        return Err(Error::InvalidDegree {
            degree: d,
            reason: format!("no canonical monomial of degree {d} in {m} variables over {field}"),
        });
    }
    let random_exps = |rng: &mut FieldRng, deg: usize| -> Vec<u32> {
        let mut exps = vec![0u32; m];
        for _ in 0..deg {
            let open: Vec<usize> = (0..m).filter(|&k| (exps[k] as usize) < cap).collect();
            exps[open[rng.index(0, open.len())]] += 1;
        }
        exps
    };
    let mut outputs: Vec<BTreeMap<Vec<u32>, FieldElement>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut terms = BTreeMap::new();
        for _ in 0..rng.index(1, 4) {
            let deg = rng.index(0, d + 1);
            let exps = random_exps(rng, deg);
            terms.insert(exps, rng.nonzero_element(field));
        }
        outputs.push(terms);
    }
    let lead = rng.index(0, n);
    let exps = random_exps(rng, d);
    let coeff = rng.nonzero_element(field);
    outputs[lead].insert(exps, coeff);
    PolyMap::new(
        field,
        m,
        outputs
            .into_iter()
            .map(|t| t.into_iter().map(|(exps, coeff)| Monomial { coeff, exps }).collect())
            .collect(),
    )
}

/// `g(X) = A X^T X + B X + C` for square `r x r` matrices, with `X`
/// flattened row-major into `F^{r*r}` and the output flattened the same
/// way. `a`, `b`, `c` are row-major `r x r` residue arrays.
pub fn matrix_quadratic(field: FieldConfig, r: usize, a: &[u64], b: &[u64], c: &[u64]) -> Result<PolyMap> {
    for mat in [a, b, c] {
        if mat.len() != r * r {
            return Err(Error::DimensionMismatch {
                expected: r * r,
                actual: mat.len(),
            });
        }
    }
    let m = r * r;
    let var = |row: usize, col: usize| row * r + col;
    let mut outputs = Vec::with_capacity(m);
    for row in 0..r {
        for col in 0..r {
            let mut terms = Vec::new();
            // (A X^T X)[row][col] = sum_{k,l} A[row][k] X[l][k] X[l][col]
            for k in 0..r {
                for l in 0..r {
                    let mut exps = vec![0u32; m];
                    exps[var(l, k)] += 1;
                    exps[var(l, col)] += 1;
                    terms.push(Monomial::new(field.elem(a[row * r + k]), exps));
                }
            }
            // (B X)[row][col] = sum_k B[row][k] X[k][col]
            for k in 0..r {
                let mut exps = vec![0u32; m];
                exps[var(k, col)] = 1;
                terms.push(Monomial::new(field.elem(b[row * r + k]), exps));
            }
            terms.push(Monomial::new(field.elem(c[row * r + col]), vec![0; m]));
            outputs.push(terms);
        }
    }
    PolyMap::new(field, m, outputs)
}
