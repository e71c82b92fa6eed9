//! Comparison schemes: per-variable Shamir sharing, Lagrange Coded
//! Computing, and the two-worker scheme for `deg g = char F`.

use crate::error::{Error, Result};
use crate::field::{next_prime, FieldConfig, FieldElement, FieldRng, FieldVector};
use crate::harmonic::combine_outputs;
use crate::interp::{distinct, lagrange_basis_at};
use crate::poly::{Dataset, Monomial, PolyMap};

fn check_data(field: FieldConfig, k: usize, data: &Dataset) -> Result<()> {
    field.check(data.field())?;
    if data.len() != k {
        return Err(Error::CountMismatch {
            what: "dataset items",
            expected: k,
            actual: data.len(),
        });
    }
    Ok(())
}

fn check_key(data: &Dataset, key: &FieldVector) -> Result<()> {
    data.field().check(key.field())?;
    if key.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            actual: key.dim(),
        });
    }
    Ok(())
}

/// Shamir-style MPC baseline: each `X_k` is shared separately as
/// `X_k + Z_k theta_r` for `r = 1..d+1`, so `N = K(d+1)` and `K` keys.
///
/// Worker `(k, r)` sits at flat position `(k-1)(d+1) + r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShamirParams {
    field: FieldConfig,
    k: usize,
    d: usize,
    thetas: Vec<FieldElement>,
    /// Basis at 0 over the thetas.
    at_zero: Vec<FieldElement>,
}

impl ShamirParams {
    /// `theta_r = r`.
    pub fn new(field: FieldConfig, k: usize, d: usize) -> Result<Self> {
        if field.modulus() < (d + 2) as u64 {
            return Err(Error::FieldTooSmall {
                p: field.modulus(),
                reason: format!("need d+1 = {} distinct nonzero share points", d + 1),
                min_prime: next_prime((d + 2) as u64),
            });
        }
        let thetas: Vec<u64> = (1..=d as u64 + 1).collect();
        Self::with_thetas(field, k, d, &thetas)
    }

    pub fn with_thetas(field: FieldConfig, k: usize, d: usize, thetas: &[u64]) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("K must be at least 1".into()));
        }
        if d == 0 {
            return Err(Error::ConstantPolynomial);
        }
        if thetas.len() != d + 1 {
            return Err(Error::CountMismatch {
                what: "share points",
                expected: d + 1,
                actual: thetas.len(),
            });
        }
        let thetas: Vec<FieldElement> = thetas.iter().map(|&t| field.residue(t)).collect::<Result<_>>()?;
        if thetas.iter().any(FieldElement::is_zero) {
            return Err(Error::InvalidParams("share point 0 would expose the secret".into()));
        }
        if !distinct(&thetas) {
            return Err(Error::InvalidParams("share points must be distinct".into()));
        }
        let at_zero = lagrange_basis_at(&thetas, field.zero())?;
        Ok(ShamirParams {
            field,
            k,
            d,
            thetas,
            at_zero,
        })
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

    pub fn thetas(&self) -> &[FieldElement] {
        &self.thetas
    }

    pub fn worker_count(&self) -> usize {
        self.k * (self.d + 1)
    }

    pub fn encode(&self, data: &Dataset, keys: &[FieldVector]) -> Result<Vec<FieldVector>> {
        check_data(self.field, self.k, data)?;
        if keys.len() != self.k {
            return Err(Error::CountMismatch {
                what: "shamir keys",
                expected: self.k,
                actual: keys.len(),
            });
        }
        let one = self.field.one();
        let mut shares = Vec::with_capacity(self.worker_count());
        for (x, z) in data.items().iter().zip(keys) {
            check_key(data, z)?;
            for &theta in &self.thetas {
                shares.push(FieldVector::combine(one, x, theta, z)?);
            }
        }
        Ok(shares)
    }

    /// Interpolates each `g(X_k)` at 0 from its `d+1` outputs and sums.
    pub fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        combine_outputs(&self.decode_weights(), outputs)
    }

    pub fn decode_weights(&self) -> Vec<FieldElement> {
        self.at_zero.repeat(self.k)
    }
}

/// Lagrange Coded Computing with one key: `u` of degree `K` interpolates
/// `X_1..X_K` at `alpha_1..alpha_K` and `Z` at `alpha_{K+1}`; worker `i`
/// stores `u(gamma_i)`. `N = Kd + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LccParams {
    field: FieldConfig,
    k: usize,
    d: usize,
    alphas: Vec<FieldElement>,
    gammas: Vec<FieldElement>,
    /// Row `i`: basis over alphas evaluated at `gamma_i`.
    encode_rows: Vec<Vec<FieldElement>>,
    decode_weights: Vec<FieldElement>,
}

impl LccParams {
    /// `alpha_k = k - 1` for `k = 1..K+1`, `gamma_i = K + i - 1` for
    /// `i = 1..N`. The first evaluation point shares the key's anchor
    /// `alpha_{K+1} = K`, which keeps every share masked while needing only
    /// `p >= K + N`.
    pub fn new(field: FieldConfig, k: usize, d: usize) -> Result<Self> {
        let n = k * d + 1;
        if field.modulus() < (k + n) as u64 {
            return Err(Error::FieldTooSmall {
                p: field.modulus(),
                reason: format!("need K + N = {} distinct points", k + n),
                min_prime: next_prime((k + n) as u64),
            });
        }
        let alphas: Vec<u64> = (0..=k as u64).collect();
        let gammas: Vec<u64> = (k as u64..(k + n) as u64).collect();
        Self::with_points(field, k, d, &alphas, &gammas)
    }

    pub fn with_points(
        field: FieldConfig,
        k: usize,
        d: usize,
        alphas: &[u64],
        gammas: &[u64],
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("K must be at least 1".into()));
        }
        if d == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let n = k * d + 1;
        if alphas.len() != k + 1 {
            return Err(Error::CountMismatch {
                what: "lcc anchors",
                expected: k + 1,
                actual: alphas.len(),
            });
        }
        if gammas.len() != n {
            return Err(Error::CountMismatch {
                what: "lcc evaluation points",
                expected: n,
                actual: gammas.len(),
            });
        }
        let alphas: Vec<FieldElement> = alphas.iter().map(|&a| field.residue(a)).collect::<Result<_>>()?;
        let gammas: Vec<FieldElement> = gammas.iter().map(|&g| field.residue(g)).collect::<Result<_>>()?;
        if !distinct(&alphas) {
            return Err(Error::InvalidParams("lcc anchors must be distinct".into()));
        }
        if !distinct(&gammas) {
            return Err(Error::InvalidParams("lcc evaluation points must be distinct".into()));
        }
        if gammas.iter().any(|g| alphas[..k].contains(g)) {
            return Err(Error::InvalidParams(
                "lcc evaluation points must avoid the data anchors".into(),
            ));
        }
        let encode_rows = gammas
            .iter()
            .map(|&g| lagrange_basis_at(&alphas, g))
            .collect::<Result<Vec<_>>>()?;
        let mut decode_weights = vec![field.zero(); n];
        for &a in &alphas[..k] {
            for (w, l) in decode_weights.iter_mut().zip(lagrange_basis_at(&gammas, a)?) {
                *w = *w + l;
            }
        }
        Ok(LccParams {
            field,
            k,
            d,
            alphas,
            gammas,
            encode_rows,
            decode_weights,
        })
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

    pub fn alphas(&self) -> &[FieldElement] {
        &self.alphas
    }

    pub fn gammas(&self) -> &[FieldElement] {
        &self.gammas
    }

    pub fn worker_count(&self) -> usize {
        self.k * self.d + 1
    }

    /// Coefficient of `Z` in each share.
    pub fn key_coefficients(&self) -> Vec<FieldElement> {
        self.encode_rows.iter().map(|r| r[self.k]).collect()
    }

    pub fn encode(&self, data: &Dataset, z: &FieldVector) -> Result<Vec<FieldVector>> {
        check_data(self.field, self.k, data)?;
        check_key(data, z)?;
        let inputs: Vec<&FieldVector> = data.items().iter().chain(std::iter::once(z)).collect();
        self.encode_rows
            .iter()
            .map(|row| {
                let mut acc = FieldVector::zeros(self.field, data.dim());
                for (&coef, x) in row.iter().zip(&inputs) {
                    acc.add_scaled(coef, x)?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// Interpolates `h = g o u` (degree `<= Kd`) through the outputs and
    /// returns `h(alpha_1) + ... + h(alpha_K)`.
    pub fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        combine_outputs(&self.decode_weights, outputs)
    }

    pub fn decode_weights(&self) -> &[FieldElement] {
        &self.decode_weights
    }
}

/// Two-worker scheme for `g(X) = A (X_1^d, ..., X_m^d)` with `d = p`:
/// worker 1 stores `Z`, worker 2 stores `Z + X_1 + ... + X_K`, and the
/// master returns `g(share_2) - g(share_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreshmanParams {
    field: FieldConfig,
    k: usize,
    d: usize,
}

impl FreshmanParams {
    pub fn new(field: FieldConfig, k: usize, d: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("K must be at least 1".into()));
        }
        if d as u64 != field.modulus() {
            return Err(Error::InvalidDegree {
                degree: d,
                reason: format!("the two-worker scheme needs d equal to the characteristic {}", field.modulus()),
            });
        }
        Ok(FreshmanParams { field, k, d })
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

    pub fn worker_count(&self) -> usize {
        2
    }

    pub fn encode(&self, data: &Dataset, z: &FieldVector) -> Result<Vec<FieldVector>> {
        check_data(self.field, self.k, data)?;
        check_key(data, z)?;
        let mut masked = z.clone();
        for x in data.items() {
            masked = masked.add(x)?;
        }
        Ok(vec![z.clone(), masked])
    }

    pub fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        let one = self.field.one();
        combine_outputs(&[-one, one], outputs)
    }
}

/// `g(X) = A (X_1^d, ..., X_m^d)^T` for a nonzero row-major `n x m` matrix.
///
/// Over a prime field `x^p` and `x` are the same function, so the
/// canonical form of this map has total degree 1 when `d = p`.
pub fn freshman_task(field: FieldConfig, a: &[Vec<u64>], d: usize) -> Result<PolyMap> {
    let m = a.first().map(Vec::len).unwrap_or(0);
    if m == 0 {
        return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
    }
    if a.iter().any(|row| row.len() != m) {
        return Err(Error::InvalidParams("ragged matrix A".into()));
    }
    if a.iter().flatten().all(|&v| v % field.modulus() == 0) {
        return Err(Error::InvalidParams("matrix A must be nonzero".into()));
    }
    let outputs = a
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(k, &coef)| {
                    let mut exps = vec![0u32; m];
                    exps[k] = d as u32;
                    Monomial::new(field.elem(coef), exps)
                })
                .collect()
        })
        .collect();
    PolyMap::new(field, m, outputs)
}

/// Random nonzero `A` and the matching task.
pub fn random_freshman_task(rng: &mut FieldRng, field: FieldConfig, m: usize, n: usize, d: usize) -> Result<PolyMap> {
    let mut a: Vec<Vec<u64>> = (0..n)
        .map(|_| (0..m).map(|_| rng.element(field).value()).collect())
        .collect();
    if a.iter().flatten().all(|&v| v == 0) && m > 0 && n > 0 {
        let (r, c) = (rng.index(0, n), rng.index(0, m));
        a[r][c] = rng.nonzero_element(field).value();
    }
    freshman_task(field, &a, d)
}
