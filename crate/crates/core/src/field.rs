//! Exact arithmetic in a prime field `F_p` with `p <= 2^31`.
//!
//! Residues are stored as `u64` so every product of two residues fits
//! without overflow. Elements carry their modulus; mixing elements of two
//! different fields through the operator impls panics, the `try_*` methods
//! return [`Error::FieldMismatch`] instead.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 1 << 31;

/// A prime modulus, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FieldConfig {
    p: u64,
}

impl<'de> Deserialize<'de> for FieldConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        FieldConfig::new(p).map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut q = 3;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut q = n.max(2);
    while !is_prime(q) {
        q += 1;
    }
    q
}

impl FieldConfig {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&p) {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldConfig { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary integer into the field.
    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement {
            value: v % self.p,
            p: self.p,
        }
    }

    /// Reduces a signed integer into the field.
    pub fn elem_i64(&self, v: i64) -> FieldElement {
        let p = self.p as i64;
        self.elem(v.rem_euclid(p) as u64)
    }

    /// Accepts only canonical residues in `[0, p)`.
    pub fn residue(&self, v: u64) -> Result<FieldElement> {
        if v >= self.p {
            return Err(Error::ResidueOutOfRange { value: v, p: self.p });
        }
        Ok(FieldElement { value: v, p: self.p })
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// All residues `0, 1, ..., p-1` in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.p).map(move |v| FieldElement { value: v, p: self.p })
    }

    pub fn check(&self, other: FieldConfig) -> Result<()> {
        if self.p != other.p {
            return Err(Error::FieldMismatch {
                left: self.p,
                right: other.p,
            });
        }
        Ok(())
    }
}

impl fmt::Display for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// A residue modulo `p`, bound to its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    p: u64,
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> FieldConfig {
        FieldConfig { p: self.p }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        self.field().check(other.field())
    }

    pub fn try_add(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(&rhs)?;
        Ok(self.add_unchecked(rhs))
    }

    pub fn try_sub(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(&rhs)?;
        Ok(self.sub_unchecked(rhs))
    }

    pub fn try_mul(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(&rhs)?;
        Ok(self.mul_unchecked(rhs))
    }

    pub fn try_div(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(&rhs)?;
        Ok(self.mul_unchecked(rhs.inv()?))
    }

    #[inline]
    fn add_unchecked(self, rhs: FieldElement) -> FieldElement {
        let s = self.value + rhs.value;
        FieldElement {
            value: if s >= self.p { s - self.p } else { s },
            p: self.p,
        }
    }

    #[inline]
    fn sub_unchecked(self, rhs: FieldElement) -> FieldElement {
        let s = self.value + self.p - rhs.value;
        FieldElement {
            value: if s >= self.p { s - self.p } else { s },
            p: self.p,
        }
    }

    #[inline]
    fn mul_unchecked(self, rhs: FieldElement) -> FieldElement {
        FieldElement {
            value: self.value * rhs.value % self.p,
            p: self.p,
        }
    }

    /// `self^e` by square-and-multiply; `0^0 = 1`.
    pub fn pow(self, mut e: u64) -> FieldElement {
        let mut base = self;
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(base);
            }
            base = base.mul_unchecked(base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self) -> Result<FieldElement> {
        if self.value == 0 {
            return Err(Error::InverseOfZero(self.p));
        }
        let (mut r0, mut r1) = (self.p as i64, self.value as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.field().elem_i64(t0))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field mismatch in add")
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("field mismatch in sub")
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field mismatch in mul")
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field().zero().sub_unchecked(self)
    }
}

/// A vector in `F_p^dim`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldVector {
    field: FieldConfig,
    coords: Vec<u64>,
}

impl FieldVector {
    pub fn zeros(field: FieldConfig, dim: usize) -> Self {
        FieldVector {
            field,
            coords: vec![0; dim],
        }
    }

    /// Builds a vector from canonical residues, rejecting anything `>= p`.
    pub fn from_residues(field: FieldConfig, residues: &[u64]) -> Result<Self> {
        for &v in residues {
            field.residue(v)?;
        }
        Ok(FieldVector {
            field,
            coords: residues.to_vec(),
        })
    }

    /// Builds a vector reducing every entry modulo `p`.
    pub fn reduced(field: FieldConfig, values: &[u64]) -> Self {
        FieldVector {
            field,
            coords: values.iter().map(|v| v % field.modulus()).collect(),
        }
    }

    pub fn from_elements(field: FieldConfig, elems: &[FieldElement]) -> Result<Self> {
        for e in elems {
            field.check(e.field())?;
        }
        Ok(FieldVector {
            field,
            coords: elems.iter().map(|e| e.value()).collect(),
        })
    }

    /// The unit vector `e_index` (0-based).
    pub fn unit(field: FieldConfig, dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(field, dim);
        v.coords[index] = 1;
        v
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn get(&self, i: usize) -> FieldElement {
        self.field.elem(self.coords[i])
    }

    pub fn residues(&self) -> &[u64] {
        &self.coords
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.coords.iter().map(move |&v| FieldElement {
            value: v,
            p: self.field.p,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&v| v == 0)
    }

    fn compatible(&self, other: &FieldVector) -> Result<()> {
        self.field.check(other.field)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldVector) -> Result<FieldVector> {
        let one = self.field.one();
        FieldVector::combine(one, self, one, other)
    }

    pub fn sub(&self, other: &FieldVector) -> Result<FieldVector> {
        let one = self.field.one();
        FieldVector::combine(one, self, -one, other)
    }

    pub fn scale(&self, s: FieldElement) -> Result<FieldVector> {
        self.field.check(s.field())?;
        Ok(FieldVector {
            field: self.field,
            coords: self.iter().map(|x| (x * s).value()).collect(),
        })
    }

    /// The two-term linear combination `a*u + b*v`.
    pub fn combine(
        a: FieldElement,
        u: &FieldVector,
        b: FieldElement,
        v: &FieldVector,
    ) -> Result<FieldVector> {
        u.compatible(v)?;
        u.field.check(a.field())?;
        u.field.check(b.field())?;
        let coords = u
            .iter()
            .zip(v.iter())
            .map(|(x, y)| (a * x + b * y).value())
            .collect();
        Ok(FieldVector {
            field: u.field,
            coords,
        })
    }

    /// In-place `self += s * other`.
    pub fn add_scaled(&mut self, s: FieldElement, other: &FieldVector) -> Result<()> {
        self.compatible(other)?;
        self.field.check(s.field())?;
        let p = self.field.p;
        for (x, &y) in self.coords.iter_mut().zip(&other.coords) {
            *x = (*x + s.value() * y % p) % p;
        }
        Ok(())
    }

    /// Mixed-radix index of the vector (`sum coords[i] * p^i`), used to
    /// tabulate share values during enumeration.
    pub fn index(&self) -> u128 {
        let p = self.field.p as u128;
        self.coords
            .iter()
            .rev()
            .fold(0u128, |acc, &v| acc * p + v as u128)
    }
}

/// Seeded source of uniform field elements.
///
/// Backed by ChaCha8 seeded with `seed_from_u64`. Every draw consumes one
/// `gen_range(0..p)` sample; vectors are drawn coordinate by coordinate in
/// ascending index order, so equal seeds give bit-identical streams.
#[derive(Debug, Clone)]
pub struct FieldRng {
    inner: ChaCha8Rng,
}

impl FieldRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        FieldRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn element(&mut self, field: FieldConfig) -> FieldElement {
        field.elem(self.inner.gen_range(0..field.modulus()))
    }

    pub fn nonzero_element(&mut self, field: FieldConfig) -> FieldElement {
        field.elem(self.inner.gen_range(1..field.modulus()))
    }

    pub fn uniform_vector(&mut self, field: FieldConfig, dim: usize) -> FieldVector {
        let coords = (0..dim)
            .map(|_| self.inner.gen_range(0..field.modulus()))
            .collect();
        FieldVector { field, coords }
    }

    /// Uniform integer in `[lo, hi)` for structural choices (term counts,
    /// exponent placement).
    pub fn index(&mut self, lo: usize, hi: usize) -> usize {
        self.inner.gen_range(lo..hi)
    }

    pub fn coin(&mut self) -> bool {
        self.inner.gen()
    }

    /// A fresh 64-bit seed for a derived stream.
    pub fn next_seed(&mut self) -> u64 {
        self.inner.gen()
    }
}

/// Samples a uniform vector of `F_p^dim` from `rng`.
pub fn sample_uniform_vector(rng: &mut FieldRng, field: FieldConfig, dim: usize) -> FieldVector {
    rng.uniform_vector(field, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> FieldConfig {
        FieldConfig::new(p).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!((f(5).elem(3) + f(5).elem(4)).value(), 2);
        assert_eq!((f(5).elem(0) + f(5).elem(4)).value(), 4);
        assert_eq!((f(7).elem(6) + f(7).elem(6)).value(), 5);
    }

    #[test]
    fn mul_examples() {
        assert_eq!((f(5).elem(4) * f(5).elem(3)).value(), 2);
        for x in f(5).elements() {
            assert_eq!(f(5).one() * x, x);
        }
        assert_eq!((f(7).elem(3) * f(7).elem(5)).value(), 1);
    }

    #[test]
    fn inv_examples() {
        assert_eq!(f(5).elem(3).inv().unwrap().value(), 2);
        assert_eq!(f(5).elem(4).inv().unwrap().value(), 4);
        assert_eq!(f(11).elem(7).inv().unwrap().value(), 8);
        assert_eq!(f(5).zero().inv(), Err(Error::InverseOfZero(5)));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(f(5).elem(2).pow(3).value(), 3);
        for x in f(5).elements() {
            assert_eq!(x.pow(0).value(), 1);
        }
        assert_eq!(f(3).elem(2).pow(3).value(), 2);
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = f(5).elem(1);
        let b = f(7).elem(1);
        assert_eq!(
            a.try_add(b),
            Err(Error::FieldMismatch { left: 5, right: 7 })
        );
        assert!(a.try_mul(b).is_err());
        let u = FieldVector::zeros(f(5), 2);
        let v = FieldVector::zeros(f(7), 2);
        assert!(u.add(&v).is_err());
    }

    #[test]
    fn construction_checks() {
        assert_eq!(FieldConfig::new(1), Err(Error::ModulusOutOfRange(1)));
        assert_eq!(FieldConfig::new(9), Err(Error::NotPrime(9)));
        assert!(FieldConfig::new(2).is_ok());
        assert!(FieldConfig::new(65537).is_ok());
        assert!(FieldConfig::new(2147483647).is_ok());
        assert!(FieldConfig::new(MAX_MODULUS + 1).is_err());
        assert!(f(5).residue(5).is_err());
        assert!(FieldVector::from_residues(f(5), &[1, 5]).is_err());
    }

    #[test]
    fn large_modulus_products_are_exact() {
        let g = f(2147483647);
        let a = g.elem(2147483646);
        assert_eq!((a * a).value(), 1);
        assert_eq!((a * a.inv().unwrap()).value(), 1);
    }

    #[test]
    fn sampling_range_and_determinism() {
        let mut r1 = FieldRng::seed_from_u64(42);
        let mut r2 = FieldRng::seed_from_u64(42);
        let v1 = sample_uniform_vector(&mut r1, f(13), 8);
        let v2 = sample_uniform_vector(&mut r2, f(13), 8);
        assert_eq!(v1, v2);
        assert!(v1.residues().iter().all(|&x| x < 13));
        let one = sample_uniform_vector(&mut r1, f(13), 1);
        assert_eq!(one.dim(), 1);
        assert!(one.residues()[0] < 13);
    }

    #[test]
    fn sampling_is_uniform() {
        // p=5, dim=3, 1e5 draws: each residue count within 5 sigma of n/5.
        let field = f(5);
        let n = 100_000u64;
        let mut rng = FieldRng::seed_from_u64(2024);
        let mut counts = [[0u64; 5]; 3];
        for _ in 0..n {
            let v = sample_uniform_vector(&mut rng, field, 3);
            for (c, &x) in v.residues().iter().enumerate() {
                counts[c][x as usize] += 1;
            }
        }
        let mean = n as f64 / 5.0;
        let sigma = (n as f64 * 0.2 * 0.8).sqrt();
        for row in counts {
            for c in row {
                assert!(((c as f64) - mean).abs() <= 5.0 * sigma, "count {c}");
            }
        }
    }

    #[test]
    fn vector_index_is_mixed_radix() {
        let v = FieldVector::from_residues(f(5), &[3, 1]).unwrap();
        assert_eq!(v.index(), 3 + 5);
    }

    fn small_prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101, 65537, 2147483647])
    }

    proptest! {
        #[test]
        fn field_axioms(p in small_prime(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let fp = f(p);
            let (a, b, c) = (fp.elem(a), fp.elem(b), fp.elem(c));
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a - a, fp.zero());
            if !a.is_zero() {
                prop_assert_eq!(a * a.inv().unwrap(), fp.one());
                prop_assert_eq!(a.pow(p - 1), fp.one());
            }
        }
    }
}
