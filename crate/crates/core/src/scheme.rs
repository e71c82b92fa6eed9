//! Common contract for coding schemes and a name-keyed registry of
//! constructors.
//!
//! Every scheme encodes a dataset plus its random keys into `N` shares
//! with linear maps, lets each worker apply `g` once, and decodes with a
//! linear combination of the `N` outputs. The registry resolves a
//! [`SchemeParams`] block (as read from the command line or from a shares
//! file) into a boxed [`CodingScheme`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::baselines::{random_freshman_task, FreshmanParams, LccParams, ShamirParams};
use crate::error::{Error, Result};
use crate::field::{FieldConfig, FieldElement, FieldRng, FieldVector};
use crate::harmonic::{self, DecodeVector, HarmonicParams};
use crate::poly::{random_poly, Dataset, PolyMap};

/// Scheme name plus its parameters. Optional fields carry the
/// scheme-specific blocks; when absent the scheme's deterministic defaults
/// are used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub scheme: String,
    pub p: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<u64>>,
}

impl SchemeParams {
    pub fn new(scheme: impl Into<String>, p: u64, k: usize, d: usize) -> Self {
        SchemeParams {
            scheme: scheme.into(),
            p,
            k,
            d,
            c: None,
            betas: None,
            thetas: None,
            alphas: None,
            gammas: None,
        }
    }

    pub fn field(&self) -> Result<FieldConfig> {
        FieldConfig::new(self.p)
    }
}

/// A linear, single-round coded computing scheme.
pub trait CodingScheme: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;
    fn field(&self) -> FieldConfig;
    /// Dataset size `K`.
    fn inputs(&self) -> usize;
    /// Largest `deg g` the scheme is built for.
    fn degree(&self) -> usize;
    fn worker_count(&self) -> usize;
    /// Number of uniform key vectors consumed per encoding.
    fn key_count(&self) -> usize;
    /// Shares in worker order. `keys.len()` must equal `key_count()`.
    fn encode(&self, data: &Dataset, keys: &[FieldVector]) -> Result<Vec<FieldVector>>;
    fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector>;
    /// Fully resolved parameters, enough to rebuild the scheme.
    fn params(&self) -> SchemeParams;

    /// A random task this scheme is meant to compute.
    fn sample_task(&self, rng: &mut FieldRng, m: usize, n: usize) -> Result<PolyMap> {
        random_poly(rng, self.field(), m, n, self.degree())
    }

    /// Rejects tasks the scheme cannot compute.
    fn check_task(&self, g: &PolyMap) -> Result<()> {
        self.field().check(g.field())?;
        if g.is_constant() {
            return Err(Error::ConstantPolynomial);
        }
        if g.total_degree() > self.degree() {
            return Err(Error::DegreeTooLarge {
                actual: g.total_degree(),
                scheme: self.degree(),
            });
        }
        Ok(())
    }
}

fn single_key(keys: &[FieldVector]) -> Result<&FieldVector> {
    match keys {
        [z] => Ok(z),
        _ => Err(Error::CountMismatch {
            what: "keys",
            expected: 1,
            actual: keys.len(),
        }),
    }
}

fn residues(v: &[FieldElement]) -> Vec<u64> {
    v.iter().map(FieldElement::value).collect()
}

#[derive(Debug, Clone)]
pub struct HarmonicScheme {
    params: HarmonicParams,
    decoder: DecodeVector,
}

impl HarmonicScheme {
    pub fn new(params: HarmonicParams) -> Result<Self> {
        let decoder = harmonic::decode_vector(&params)?;
        Ok(HarmonicScheme { params, decoder })
    }

    pub fn harmonic_params(&self) -> &HarmonicParams {
        &self.params
    }

    pub fn decode_vector(&self) -> &DecodeVector {
        &self.decoder
    }

    fn build(cfg: &SchemeParams) -> Result<Box<dyn CodingScheme>> {
        let field = cfg.field()?;
        let params = match (cfg.c, &cfg.betas) {
            (Some(c), Some(betas)) => HarmonicParams::with_overrides(field, cfg.k, cfg.d, c, betas)?,
            (Some(c), None) => HarmonicParams::with_c(field, cfg.k, cfg.d, c)?,
            (None, Some(_)) => {
                return Err(Error::InvalidParams("betas override requires c".into()));
            }
            (None, None) => HarmonicParams::select(field, cfg.k, cfg.d)?,
        };
        Ok(Box::new(HarmonicScheme::new(params)?))
    }
}

impl CodingScheme for HarmonicScheme {
    fn name(&self) -> &str {
        "harmonic"
    }
    fn field(&self) -> FieldConfig {
        self.params.field()
    }
    fn inputs(&self) -> usize {
        self.params.k()
    }
    fn degree(&self) -> usize {
        self.params.d()
    }
    fn worker_count(&self) -> usize {
        self.params.worker_count()
    }
    fn key_count(&self) -> usize {
        1
    }
    fn encode(&self, data: &Dataset, keys: &[FieldVector]) -> Result<Vec<FieldVector>> {
        harmonic::encode(&self.params, data, single_key(keys)?)
    }
    fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        self.decoder.apply(outputs)
    }
    fn params(&self) -> SchemeParams {
        SchemeParams {
            c: Some(self.params.c().value()),
            betas: Some(residues(self.params.betas())),
            ..SchemeParams::new("harmonic", self.field().modulus(), self.inputs(), self.degree())
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShamirScheme(pub ShamirParams);

impl ShamirScheme {
    fn build(cfg: &SchemeParams) -> Result<Box<dyn CodingScheme>> {
        let field = cfg.field()?;
        let params = match &cfg.thetas {
            Some(t) => ShamirParams::with_thetas(field, cfg.k, cfg.d, t)?,
            None => ShamirParams::new(field, cfg.k, cfg.d)?,
        };
        Ok(Box::new(ShamirScheme(params)))
    }
}

impl CodingScheme for ShamirScheme {
    fn name(&self) -> &str {
        "shamir"
    }
    fn field(&self) -> FieldConfig {
        self.0.field()
    }
    fn inputs(&self) -> usize {
        self.0.k()
    }
    fn degree(&self) -> usize {
        self.0.d()
    }
    fn worker_count(&self) -> usize {
        self.0.worker_count()
    }
    fn key_count(&self) -> usize {
        self.0.k()
    }
    fn encode(&self, data: &Dataset, keys: &[FieldVector]) -> Result<Vec<FieldVector>> {
        self.0.encode(data, keys)
    }
    fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        self.0.decode(outputs)
    }
    fn params(&self) -> SchemeParams {
        SchemeParams {
            thetas: Some(residues(self.0.thetas())),
            ..SchemeParams::new("shamir", self.field().modulus(), self.inputs(), self.degree())
        }
    }
}

#[derive(Debug, Clone)]
pub struct LccScheme(pub LccParams);

impl LccScheme {
    fn build(cfg: &SchemeParams) -> Result<Box<dyn CodingScheme>> {
        let field = cfg.field()?;
        let params = match (&cfg.alphas, &cfg.gammas) {
            (Some(a), Some(g)) => LccParams::with_points(field, cfg.k, cfg.d, a, g)?,
            (None, None) => LccParams::new(field, cfg.k, cfg.d)?,
            _ => {
                return Err(Error::InvalidParams(
                    "lcc needs both alphas and gammas, or neither".into(),
                ))
            }
        };
        Ok(Box::new(LccScheme(params)))
    }
}

impl CodingScheme for LccScheme {
    fn name(&self) -> &str {
        "lcc"
    }
    fn field(&self) -> FieldConfig {
        self.0.field()
    }
    fn inputs(&self) -> usize {
        self.0.k()
    }
    fn degree(&self) -> usize {
        self.0.d()
    }
    fn worker_count(&self) -> usize {
        self.0.worker_count()
    }
    fn key_count(&self) -> usize {
        1
    }
    fn encode(&self, data: &Dataset, keys: &[FieldVector]) -> Result<Vec<FieldVector>> {
        self.0.encode(data, single_key(keys)?)
    }
    fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        self.0.decode(outputs)
    }
    fn params(&self) -> SchemeParams {
        SchemeParams {
            alphas: Some(residues(self.0.alphas())),
            gammas: Some(residues(self.0.gammas())),
            ..SchemeParams::new("lcc", self.field().modulus(), self.inputs(), self.degree())
        }
    }
}

#[derive(Debug, Clone)]
pub struct FreshmanScheme(pub FreshmanParams);

impl FreshmanScheme {
    fn build(cfg: &SchemeParams) -> Result<Box<dyn CodingScheme>> {
        Ok(Box::new(FreshmanScheme(FreshmanParams::new(cfg.field()?, cfg.k, cfg.d)?)))
    }
}

impl CodingScheme for FreshmanScheme {
    fn name(&self) -> &str {
        "freshman"
    }
    fn field(&self) -> FieldConfig {
        self.0.field()
    }
    fn inputs(&self) -> usize {
        self.0.k()
    }
    fn degree(&self) -> usize {
        self.0.d()
    }
    fn worker_count(&self) -> usize {
        2
    }
    fn key_count(&self) -> usize {
        1
    }
    fn encode(&self, data: &Dataset, keys: &[FieldVector]) -> Result<Vec<FieldVector>> {
        self.0.encode(data, single_key(keys)?)
    }
    fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        self.0.decode(outputs)
    }
    fn params(&self) -> SchemeParams {
        SchemeParams::new("freshman", self.field().modulus(), self.inputs(), self.degree())
    }
    fn sample_task(&self, rng: &mut FieldRng, m: usize, n: usize) -> Result<PolyMap> {
        random_freshman_task(rng, self.field(), m, n, self.degree())
    }
    /// Only maps of the form `A (x_1^d, ..., x_m^d)` decode correctly; in
    /// canonical form over `F_p` these are the linear maps without a
    /// constant term.
    fn check_task(&self, g: &PolyMap) -> Result<()> {
        self.field().check(g.field())?;
        let m = g.input_dim();
        let linear = (0..g.output_dim()).all(|t| {
            g.terms(t)
                .iter()
                .all(|term| term.degree() == 1 && term.exps.iter().filter(|&&e| e > 0).count() == 1)
        });
        if !linear || g.is_constant() || m == 0 {
            return Err(Error::InvalidParams(
                "the two-worker scheme only computes g(X) = A (X_1^d, ..., X_m^d)".into(),
            ));
        }
        Ok(())
    }
}

/// Constructs a scheme from its parameter block.
pub type SchemeBuilder = Box<dyn Fn(&SchemeParams) -> Result<Box<dyn CodingScheme>> + Send + Sync>;

/// Name-keyed scheme constructors.
pub struct SchemeRegistry {
    builders: BTreeMap<String, SchemeBuilder>,
}

impl fmt::Debug for SchemeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchemeRegistry")
            .field("schemes", &self.names().collect::<Vec<_>>())
            .finish()
    }
}

impl Default for SchemeRegistry {
    /// The four bundled schemes.
    fn default() -> Self {
        let mut reg = SchemeRegistry::empty();
        reg.register("harmonic", HarmonicScheme::build);
        reg.register("shamir", ShamirScheme::build);
        reg.register("lcc", LccScheme::build);
        reg.register("freshman", FreshmanScheme::build);
        reg
    }
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        SchemeRegistry {
            builders: BTreeMap::new(),
        }
    }

    /// Registers (or replaces) a constructor under `name`.
    pub fn register<F>(&mut self, name: impl Into<String>, builder: F)
    where
        F: Fn(&SchemeParams) -> Result<Box<dyn CodingScheme>> + Send + Sync + 'static,
    {
        self.builders.insert(name.into(), Box::new(builder));
    }

    pub fn contains(&self, name: &str) -> bool {
        self.builders.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, params: &SchemeParams) -> Result<Box<dyn CodingScheme>> {
        let builder = self
            .builders
            .get(&params.scheme)
            .ok_or_else(|| Error::UnknownScheme(params.scheme.clone()))?;
        builder(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_builds_every_builtin() {
        let reg = SchemeRegistry::default();
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["freshman", "harmonic", "lcc", "shamir"]);
        for (name, p, d, n) in [("harmonic", 11, 3, 6), ("shamir", 11, 3, 8), ("lcc", 11, 3, 7), ("freshman", 5, 5, 2)] {
            let s = reg.build(&SchemeParams::new(name, p, 2, d)).unwrap();
            assert_eq!(s.name(), name);
            assert_eq!(s.worker_count(), n);
            let rebuilt = reg.build(&s.params()).unwrap();
            assert_eq!(rebuilt.params(), s.params());
        }
        assert!(matches!(
            reg.build(&SchemeParams::new("nope", 5, 1, 1)),
            Err(Error::UnknownScheme(_))
        ));
    }

    #[test]
    fn key_counts() {
        let reg = SchemeRegistry::default();
        assert_eq!(reg.build(&SchemeParams::new("shamir", 11, 3, 2)).unwrap().key_count(), 3);
        assert_eq!(reg.build(&SchemeParams::new("harmonic", 11, 3, 2)).unwrap().key_count(), 1);
    }

    #[test]
    fn harmonic_overrides() {
        let reg = SchemeRegistry::default();
        let cfg = SchemeParams {
            c: Some(4),
            betas: Some(vec![4]),
            ..SchemeParams::new("harmonic", 5, 2, 2)
        };
        let s = reg.build(&cfg).unwrap();
        assert_eq!(s.params(), cfg);
        let bad = SchemeParams {
            betas: Some(vec![4]),
            ..SchemeParams::new("harmonic", 5, 2, 2)
        };
        assert!(reg.build(&bad).is_err());
    }

    #[test]
    fn params_json_keys() {
        let cfg = SchemeParams {
            c: Some(4),
            betas: Some(vec![4]),
            ..SchemeParams::new("harmonic", 5, 2, 2)
        };
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(json, r#"{"scheme":"harmonic","p":5,"K":2,"d":2,"c":4,"betas":[4]}"#);
    }

    #[test]
    fn task_checks() {
        let reg = SchemeRegistry::default();
        let h = reg.build(&SchemeParams::new("harmonic", 11, 2, 2)).unwrap();
        let mut rng = FieldRng::seed_from_u64(0);
        let g3 = random_poly(&mut rng, h.field(), 1, 1, 3).unwrap();
        assert!(matches!(h.check_task(&g3), Err(Error::DegreeTooLarge { .. })));
        let g1 = random_poly(&mut rng, h.field(), 1, 1, 1).unwrap();
        assert!(h.check_task(&g1).is_ok());
        let fr = reg.build(&SchemeParams::new("freshman", 5, 2, 5)).unwrap();
        let task = fr.sample_task(&mut rng, 2, 2).unwrap();
        assert!(fr.check_task(&task).is_ok());
        let quad = random_poly(&mut rng, fr.field(), 2, 1, 2).unwrap();
        assert!(fr.check_task(&quad).is_err());
    }
}
