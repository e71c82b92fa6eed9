//! Harmonic Coding: `N = K(d-1) + 2` workers, one random key.
//!
//! The dataset is masked by a single uniform key `Z` through the
//! intermediate variables
//!
//! ```text
//! P_j = c/(c-j) * Z - 1/(c-j) * (X_1 + ... + X_j),   j = 0..K
//! ```
//!
//! Worker 1 (head) stores `P_0 = Z`, worker `N` (tail) stores `P_K`, and
//! worker `i` of group `j` stores a point on the line through `X_j` and
//! `P_{j-1}`:
//!
//! ```text
//! X~_(i,j) = X_j (1 - beta_i (c-j+1)/c) + P_{j-1} beta_i (c-j+1)/c
//! ```
//!
//! Because `P_j` lies on the same line, `g` of the group's shares, of
//! `X_j`, `P_{j-1}` and `P_j` are `d + 2` evaluations of one degree-`d`
//! univariate polynomial. Interpolating yields
//! `Q_j = g(X_j) - A_j g(P_{j-1}) + B_j g(P_j)` from the group alone, and
//! `A_{j+1} = B_j` makes `sum_j Q_j` telescope down to
//! `f - A_1 g(P_0) + B_K g(P_K)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{next_prime, FieldConfig, FieldElement, FieldRng, FieldVector};
use crate::poly::Dataset;

/// Scheme parameters `(p, K, d, c, beta_1..beta_{d-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicParams {
    field: FieldConfig,
    k: usize,
    d: usize,
    c: FieldElement,
    betas: Vec<FieldElement>,
}

/// A broken parameter constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamViolation {
    /// `c = j (mod p)` for some `j` in `0..=K`.
    CForbidden { c: u64, j: usize },
    BetaCount { expected: usize, actual: usize },
    BetaZero { index: usize },
    /// `beta_index = c/(c-j)`.
    BetaForbidden { index: usize, beta: u64, j: usize },
    BetasNotDistinct { first: usize, second: usize },
    ForeignField { what: &'static str },
    EmptyDataset,
    ZeroDegree,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamViolation::CForbidden { c, j } => write!(f, "c = {c} coincides with {j} (c must avoid 0..=K)"),
            ParamViolation::BetaCount { expected, actual } => {
                write!(f, "expected {expected} betas (d - 1), got {actual}")
            }
            ParamViolation::BetaZero { index } => write!(f, "beta_{index} is zero"),
            ParamViolation::BetaForbidden { index, beta, j } => {
                write!(f, "beta_{index} = {beta} equals c/(c-{j})")
            }
            ParamViolation::BetasNotDistinct { first, second } => {
                write!(f, "beta_{first} and beta_{second} coincide")
            }
            ParamViolation::ForeignField { what } => write!(f, "{what} belongs to a different field"),
            ParamViolation::EmptyDataset => write!(f, "K must be at least 1"),
            ParamViolation::ZeroDegree => write!(f, "d must be at least 1"),
        }
    }
}

/// `{c/(c-j) : j = 0..=K}` skipping `j` where `c - j = 0`, paired with `j`.
fn forbidden_betas(c: FieldElement, k: usize) -> Vec<(usize, FieldElement)> {
    let field = c.field();
    (0..=k)
        .filter_map(|j| {
            let denom = c - field.elem(j as u64);
            denom.inv().ok().map(|inv| (j, c * inv))
        })
        .collect()
}

fn c_is_forbidden(c: FieldElement, k: usize) -> Option<usize> {
    let p = c.field().modulus();
    (0..=k).find(|&j| (j as u64) % p == c.value())
}

impl HarmonicParams {
    /// Deterministic choice: `c` is the smallest residue `>= K+1` that
    /// avoids `0..=K`, betas are the first `d-1` admissible residues
    /// scanning upward from 2.
    pub fn select(field: FieldConfig, k: usize, d: usize) -> Result<Self> {
        let too_small = |reason: &str| Error::FieldTooSmall {
            p: field.modulus(),
            reason: reason.to_string(),
            min_prime: next_prime((k + d + 2) as u64),
        };
        check_shape(k, d)?;
        let c = (k as u64 + 1..field.modulus())
            .map(|v| field.elem(v))
            .find(|&c| c_is_forbidden(c, k).is_none())
            .ok_or_else(|| too_small("no residue for c outside {0..K}"))?;
        let betas = scan_betas(field, c, k, d).ok_or_else(|| too_small("not enough admissible betas"))?;
        let params = HarmonicParams {
            field,
            k,
            d,
            c,
            betas,
        };
        debug_assert!(params.validate().is_empty());
        Ok(params)
    }

    /// Explicit `c` and betas, rejected unless every constraint holds.
    pub fn with_overrides(
        field: FieldConfig,
        k: usize,
        d: usize,
        c: u64,
        betas: &[u64],
    ) -> Result<Self> {
        let params = HarmonicParams {
            field,
            k,
            d,
            c: field.residue(c)?,
            betas: betas
                .iter()
                .map(|&b| field.residue(b))
                .collect::<Result<_>>()?,
        };
        params.into_validated()
    }

    /// Given `c`, scan betas as `select` would.
    pub fn with_c(field: FieldConfig, k: usize, d: usize, c: u64) -> Result<Self> {
        check_shape(k, d)?;
        let c = field.residue(c)?;
        if let Some(j) = c_is_forbidden(c, k) {
            return Err(Error::InvalidParams(
                ParamViolation::CForbidden { c: c.value(), j }.to_string(),
            ));
        }
        let betas = scan_betas(field, c, k, d).ok_or_else(|| Error::FieldTooSmall {
            p: field.modulus(),
            reason: "not enough admissible betas".into(),
            min_prime: next_prime((k + d + 2) as u64),
        })?;
        HarmonicParams {
            field,
            k,
            d,
            c,
            betas,
        }
        .into_validated()
    }

    /// Random valid parameters: `c` uniform over admissible residues,
    /// betas uniform distinct admissible residues.
    pub fn random(rng: &mut FieldRng, field: FieldConfig, k: usize, d: usize) -> Result<Self> {
        check_shape(k, d)?;
        let p = field.modulus();
        let err = || Error::FieldTooSmall {
            p,
            reason: "no admissible random parameters".into(),
            min_prime: next_prime((k + d + 2) as u64),
        };
        if p < (k + d + 1) as u64 {
            return Err(err());
        }
        let c = loop {
            let c = rng.element(field);
            if c_is_forbidden(c, k).is_none() {
                break c;
            }
        };
        let forbidden = forbidden_betas(c, k);
        let mut betas: Vec<FieldElement> = Vec::with_capacity(d - 1);
        let admissible_total = p as usize - 1 - forbidden.len();
        if admissible_total < d - 1 {
            return Err(err());
        }
        while betas.len() < d - 1 {
            let b = rng.nonzero_element(field);
            if forbidden.iter().all(|&(_, f)| f != b) && !betas.contains(&b) {
                betas.push(b);
            }
        }
        HarmonicParams {
            field,
            k,
            d,
            c,
            betas,
        }
        .into_validated()
    }

    /// Builds parameters without checking them. Used to exercise
    /// `validate` and the decoder's corruption guards.
    pub fn unchecked(field: FieldConfig, k: usize, d: usize, c: u64, betas: &[u64]) -> Self {
        HarmonicParams {
            field,
            k,
            d,
            c: field.elem(c),
            betas: betas.iter().map(|&b| field.elem(b)).collect(),
        }
    }

    fn into_validated(self) -> Result<Self> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(
                violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    /// Every violated constraint, empty when the parameters are usable.
    pub fn validate(&self) -> Vec<ParamViolation> {
        let mut out = Vec::new();
        if self.k == 0 {
            out.push(ParamViolation::EmptyDataset);
        }
        if self.d == 0 {
            out.push(ParamViolation::ZeroDegree);
        }
        if self.c.field() != self.field {
            out.push(ParamViolation::ForeignField { what: "c" });
            return out;
        }
        if self.betas.iter().any(|b| b.field() != self.field) {
            out.push(ParamViolation::ForeignField { what: "beta" });
            return out;
        }
        if let Some(j) = c_is_forbidden(self.c, self.k) {
            out.push(ParamViolation::CForbidden {
                c: self.c.value(),
                j,
            });
        }
        let expected = self.d.saturating_sub(1);
        if self.betas.len() != expected {
            out.push(ParamViolation::BetaCount {
                expected,
                actual: self.betas.len(),
            });
        }
        let forbidden = forbidden_betas(self.c, self.k);
        for (idx, &b) in self.betas.iter().enumerate() {
            let index = idx + 1;
            if b.is_zero() {
                out.push(ParamViolation::BetaZero { index });
            }
            for &(j, f) in &forbidden {
                if b == f {
                    out.push(ParamViolation::BetaForbidden {
                        index,
                        beta: b.value(),
                        j,
                    });
                }
            }
            for (idx2, &b2) in self.betas.iter().enumerate().skip(idx + 1) {
                if b == b2 {
                    out.push(ParamViolation::BetasNotDistinct {
                        first: index,
                        second: idx2 + 1,
                    });
                }
            }
        }
        out
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn c(&self) -> FieldElement {
        self.c
    }

    pub fn betas(&self) -> &[FieldElement] {
        &self.betas
    }

    pub fn worker_count(&self) -> usize {
        self.k * (self.d - 1) + 2
    }

    pub fn layout(&self) -> WorkerLayout {
        WorkerLayout {
            k: self.k,
            d: self.d,
        }
    }

    fn j_elem(&self, j: usize) -> FieldElement {
        self.field.elem(j as u64)
    }
}

fn check_shape(k: usize, d: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParams("K must be at least 1".into()));
    }
    if d == 0 {
        return Err(Error::ConstantPolynomial);
    }
    Ok(())
}

fn scan_betas(field: FieldConfig, c: FieldElement, k: usize, d: usize) -> Option<Vec<FieldElement>> {
    let forbidden = forbidden_betas(c, k);
    let betas: Vec<FieldElement> = (2..field.modulus())
        .map(|v| field.elem(v))
        .filter(|b| forbidden.iter().all(|&(_, f)| f != *b))
        .take(d - 1)
        .collect();
    (betas.len() == d - 1).then_some(betas)
}

/// Role of a worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WorkerLabel {
    /// Worker 1, stores `P_0 = Z`.
    Head,
    /// Worker `i` (1..d-1) of group `j` (1..K).
    Group { i: usize, j: usize },
    /// Worker `N`, stores `P_K`.
    Tail,
}

impl fmt::Display for WorkerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkerLabel::Head => write!(f, "head"),
            WorkerLabel::Group { i, j } => write!(f, "({i},{j})"),
            WorkerLabel::Tail => write!(f, "tail"),
        }
    }
}

/// Group-major flat worker numbering, 1-based: head is 1, worker `(i, j)`
/// is `1 + (j-1)(d-1) + i`, tail is `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkerLayout {
    k: usize,
    d: usize,
}

impl WorkerLayout {
    pub fn new(k: usize, d: usize) -> Self {
        WorkerLayout { k, d }
    }

    pub fn worker_count(&self) -> usize {
        self.k * (self.d - 1) + 2
    }

    pub fn label(&self, flat: usize) -> Result<WorkerLabel> {
        let n = self.worker_count();
        if flat == 0 || flat > n {
            return Err(Error::IndexOutOfRange { index: flat, max: n });
        }
        Ok(if flat == 1 {
            WorkerLabel::Head
        } else if flat == n {
            WorkerLabel::Tail
        } else {
            let off = flat - 2;
            WorkerLabel::Group {
                i: off % (self.d - 1) + 1,
                j: off / (self.d - 1) + 1,
            }
        })
    }

    pub fn flat_index(&self, label: WorkerLabel) -> Result<usize> {
        match label {
            WorkerLabel::Head => Ok(1),
            WorkerLabel::Tail => Ok(self.worker_count()),
            WorkerLabel::Group { i, j } => {
                if !(1..self.d).contains(&i) {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        max: self.d - 1,
                    });
                }
                if !(1..=self.k).contains(&j) {
                    return Err(Error::IndexOutOfRange { index: j, max: self.k });
                }
                Ok(1 + (j - 1) * (self.d - 1) + i)
            }
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = WorkerLabel> + '_ {
        (1..=self.worker_count()).map(move |w| self.label(w).expect("in range"))
    }
}

fn check_inputs(params: &HarmonicParams, data: &Dataset, z: &FieldVector) -> Result<()> {
    params.field.check(data.field())?;
    params.field.check(z.field())?;
    if data.len() != params.k {
        return Err(Error::CountMismatch {
            what: "dataset items",
            expected: params.k,
            actual: data.len(),
        });
    }
    if z.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            actual: z.dim(),
        });
    }
    Ok(())
}

fn guarded_inv(x: FieldElement, what: &'static str) -> Result<FieldElement> {
    x.inv().map_err(|_| Error::ParameterCorruption(what))
}

/// `P_0, ..., P_K`, computed recursively:
/// `P_j = (c-j+1)/(c-j) P_{j-1} - 1/(c-j) X_j`.
pub fn intermediate_vars(
    params: &HarmonicParams,
    data: &Dataset,
    z: &FieldVector,
) -> Result<Vec<FieldVector>> {
    let mut ops = 0;
    intermediate_vars_counted(params, data, z, &mut ops)
}

fn intermediate_vars_counted(
    params: &HarmonicParams,
    data: &Dataset,
    z: &FieldVector,
    ops: &mut usize,
) -> Result<Vec<FieldVector>> {
    check_inputs(params, data, z)?;
    let c = params.c;
    let mut ps = Vec::with_capacity(params.k + 1);
    ps.push(z.clone());
    for (idx, x) in data.items().iter().enumerate() {
        let j = idx + 1;
        let inv = guarded_inv(c - params.j_elem(j), "1/(c-j)")?;
        let prev_scale = (c - params.j_elem(j - 1)) * inv;
        let next = FieldVector::combine(prev_scale, &ps[j - 1], -inv, x)?;
        *ops += 1;
        ps.push(next);
    }
    Ok(ps)
}

/// Operation counts from the instrumented encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncodeStats {
    /// Number of two-term vector combinations `a*u + b*v` performed.
    pub combinations: usize,
}

/// Coded shares in worker-layout order.
pub fn encode(params: &HarmonicParams, data: &Dataset, z: &FieldVector) -> Result<Vec<FieldVector>> {
    encode_with_stats(params, data, z).map(|(shares, _)| shares)
}

/// Recursive encoder: `K` combinations build `P_1..P_K`, then one
/// combination per group worker.
pub fn encode_with_stats(
    params: &HarmonicParams,
    data: &Dataset,
    z: &FieldVector,
) -> Result<(Vec<FieldVector>, EncodeStats)> {
    let mut ops = 0;
    let ps = intermediate_vars_counted(params, data, z, &mut ops)?;
    let c_inv = guarded_inv(params.c, "1/c")?;
    let one = params.field.one();
    let mut shares = Vec::with_capacity(params.worker_count());
    shares.push(ps[0].clone());
    for (idx, x) in data.items().iter().enumerate() {
        let j = idx + 1;
        let s = (params.c - params.j_elem(j - 1)) * c_inv;
        for &beta in &params.betas {
            let t = beta * s;
            shares.push(FieldVector::combine(one - t, x, t, &ps[j - 1])?);
            ops += 1;
        }
    }
    shares.push(ps[params.k].clone());
    Ok((shares, EncodeStats { combinations: ops }))
}

/// `N x (K+1)` encoding matrix; column `k < K` multiplies `X_{k+1}`, the
/// last column multiplies `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingMatrix {
    rows: Vec<Vec<FieldElement>>,
}

impl EncodingMatrix {
    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn residue_rows(&self) -> Vec<Vec<u64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(FieldElement::value).collect())
            .collect()
    }

    pub fn z_column(&self) -> Vec<FieldElement> {
        self.rows.iter().map(|r| *r.last().expect("nonempty row")).collect()
    }

    /// Copy with the `Z` column zeroed. Only useful for fault injection.
    pub fn without_key(mut self) -> Self {
        for row in &mut self.rows {
            let last = row.len() - 1;
            row[last] = row[last].field().zero();
        }
        self
    }

    /// `matrix * (X_1, ..., X_K, Z)`.
    pub fn apply(&self, data: &Dataset, z: &FieldVector) -> Result<Vec<FieldVector>> {
        let inputs: Vec<&FieldVector> = data.items().iter().chain(std::iter::once(z)).collect();
        self.rows
            .iter()
            .map(|row| {
                let mut acc = FieldVector::zeros(z.field(), z.dim());
                for (coef, x) in row.iter().zip(&inputs) {
                    acc.add_scaled(*coef, x)?;
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Closed-form encoding matrix.
pub fn encoding_matrix(params: &HarmonicParams) -> Result<EncodingMatrix> {
    let field = params.field;
    let k = params.k;
    let c = params.c;
    let c_inv = guarded_inv(c, "1/c")?;
    let mut rows = Vec::with_capacity(params.worker_count());
    let mut head = vec![field.zero(); k + 1];
    head[k] = field.one();
    rows.push(head);
    for j in 1..=k {
        let s = (c - params.j_elem(j - 1)) * c_inv;
        for &beta in &params.betas {
            let mut row = vec![field.zero(); k + 1];
            for entry in row.iter_mut().take(j - 1) {
                *entry = -(beta * c_inv);
            }
            row[j - 1] = field.one() - beta * s;
            row[k] = beta;
            rows.push(row);
        }
    }
    let tail_inv = guarded_inv(c - params.j_elem(k), "1/(c-K)")?;
    let mut tail = vec![-tail_inv; k + 1];
    tail[k] = c * tail_inv;
    rows.push(tail);
    Ok(EncodingMatrix { rows })
}

/// Decoding weights for one group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCoefficients {
    /// `w_(i,j)` for `i = 1..d-1`.
    pub weights: Vec<FieldElement>,
    /// Coefficient of `g(P_{j-1})` in `Q_j` (entering with a minus sign).
    pub a: FieldElement,
    /// Coefficient of `g(P_j)` in `Q_j`.
    pub b: FieldElement,
}

/// `sum_i weights[i] g(X~_(i,j)) = g(X_j) - a g(P_{j-1}) + b g(P_j)`.
pub fn group_coeffs(params: &HarmonicParams, j: usize) -> Result<GroupCoefficients> {
    if !(1..=params.k).contains(&j) {
        return Err(Error::IndexOutOfRange { index: j, max: params.k });
    }
    let field = params.field;
    let c = params.c;
    let c_inv = guarded_inv(c, "1/c")?;
    let s = c - params.j_elem(j - 1); // c - j + 1
    let t = c - params.j_elem(j); // c - j

    // A_j = (c-j+1) prod_i beta_i (c-j+1) / (beta_i (c-j+1) - c)
    let mut a = s;
    for &beta in &params.betas {
        a = a * beta * s * guarded_inv(beta * s - c, "beta(c-j+1) - c")?;
    }
    // B_j = (c-j) prod_i beta_i (c-j) / (beta_i (c-j) - c)
    let mut b = t;
    for &beta in &params.betas {
        b = b * beta * t * guarded_inv(beta * t - c, "beta(c-j) - c")?;
    }

    // Interpolation points: X_j at 0, P_{j-1} at 1, P_j at r, share i at beta_i s / c.
    let r = s * guarded_inv(t, "c-j")?;
    let mut weights = Vec::with_capacity(params.betas.len());
    for (i, &beta_i) in params.betas.iter().enumerate() {
        let point = beta_i * s * c_inv;
        let mut w = r * guarded_inv((field.one() - point) * (r - point), "share interpolation point")?;
        for (i2, &beta_other) in params.betas.iter().enumerate() {
            if i2 != i {
                w = w * beta_other * guarded_inv(beta_other - beta_i, "beta_i' - beta_i")?;
            }
        }
        weights.push(w);
    }
    Ok(GroupCoefficients { weights, a, b })
}

/// The `N` scalars the master applies to worker outputs: `A_1` for the
/// head, the group weights in layout order, `-B_K` for the tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeVector {
    weights: Vec<FieldElement>,
}

impl DecodeVector {
    pub fn weights(&self) -> &[FieldElement] {
        &self.weights
    }

    pub fn residues(&self) -> Vec<u64> {
        self.weights.iter().map(FieldElement::value).collect()
    }

    /// `sum_w weight_w * outputs_w`, accumulated in worker order.
    pub fn apply(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        combine_outputs(&self.weights, outputs)
    }
}

pub(crate) fn combine_outputs(weights: &[FieldElement], outputs: &[FieldVector]) -> Result<FieldVector> {
    if outputs.len() != weights.len() {
        return Err(Error::CountMismatch {
            what: "worker outputs",
            expected: weights.len(),
            actual: outputs.len(),
        });
    }
    let first = &outputs[0];
    let mut acc = FieldVector::zeros(first.field(), first.dim());
    for (w, out) in weights.iter().zip(outputs) {
        acc.add_scaled(*w, out)?;
    }
    Ok(acc)
}

pub fn decode_vector(params: &HarmonicParams) -> Result<DecodeVector> {
    let mut weights = Vec::with_capacity(params.worker_count());
    let mut last_b = None;
    for j in 1..=params.k {
        let gc = group_coeffs(params, j)?;
        if j == 1 {
            weights.push(gc.a);
        }
        weights.extend(gc.weights);
        last_b = Some(gc.b);
    }
    weights.push(-last_b.expect("K >= 1"));
    Ok(DecodeVector { weights })
}

/// Recovers `f(X)` from the `N` worker outputs.
pub fn decode(params: &HarmonicParams, outputs: &[FieldVector]) -> Result<FieldVector> {
    decode_vector(params)?.apply(outputs)
}
