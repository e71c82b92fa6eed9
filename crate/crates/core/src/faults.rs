//! Deliberately leaky schemes. Compiled only for tests and with the
//! `fault-injection` feature; they exist to show the auditor can fail.

use crate::error::Result;
use crate::field::{FieldConfig, FieldVector};
use crate::harmonic::{self, EncodingMatrix, HarmonicParams};
use crate::poly::Dataset;
use crate::scheme::{CodingScheme, HarmonicScheme, SchemeParams, SchemeRegistry};

/// Harmonic coding, except the tail worker stores `X_1` in the clear
/// instead of `P_K`.
#[derive(Debug, Clone)]
pub struct ClearStorage(pub HarmonicScheme);

impl CodingScheme for ClearStorage {
    fn name(&self) -> &str {
        "leaky-clear"
    }
    fn field(&self) -> FieldConfig {
        self.0.field()
    }
    fn inputs(&self) -> usize {
        self.0.inputs()
    }
    fn degree(&self) -> usize {
        self.0.degree()
    }
    fn worker_count(&self) -> usize {
        self.0.worker_count()
    }
    fn key_count(&self) -> usize {
        1
    }
    fn encode(&self, data: &Dataset, keys: &[FieldVector]) -> Result<Vec<FieldVector>> {
        let mut shares = self.0.encode(data, keys)?;
        *shares.last_mut().expect("N >= 2") = data.items()[0].clone();
        Ok(shares)
    }
    fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        self.0.decode(outputs)
    }
    fn params(&self) -> SchemeParams {
        SchemeParams {
            scheme: self.name().into(),
            ..self.0.params()
        }
    }
}

/// Harmonic coding with every `Z` coefficient zeroed in the encoding
/// matrix.
#[derive(Debug, Clone)]
pub struct ZeroKey {
    inner: HarmonicScheme,
    matrix: EncodingMatrix,
}

impl ZeroKey {
    pub fn new(params: HarmonicParams) -> Result<Self> {
        let matrix = harmonic::encoding_matrix(&params)?.without_key();
        Ok(ZeroKey {
            inner: HarmonicScheme::new(params)?,
            matrix,
        })
    }
}

impl CodingScheme for ZeroKey {
    fn name(&self) -> &str {
        "leaky-zero-key"
    }
    fn field(&self) -> FieldConfig {
        self.inner.field()
    }
    fn inputs(&self) -> usize {
        self.inner.inputs()
    }
    fn degree(&self) -> usize {
        self.inner.degree()
    }
    fn worker_count(&self) -> usize {
        self.inner.worker_count()
    }
    fn key_count(&self) -> usize {
        1
    }
    fn encode(&self, data: &Dataset, keys: &[FieldVector]) -> Result<Vec<FieldVector>> {
        self.matrix.apply(data, &keys[0])
    }
    fn decode(&self, outputs: &[FieldVector]) -> Result<FieldVector> {
        self.inner.decode(outputs)
    }
    fn params(&self) -> SchemeParams {
        SchemeParams {
            scheme: self.name().into(),
            ..self.inner.params()
        }
    }
}

fn harmonic_params(cfg: &SchemeParams) -> Result<HarmonicParams> {
    let field = FieldConfig::new(cfg.p)?;
    match (cfg.c, &cfg.betas) {
        (Some(c), Some(b)) => HarmonicParams::with_overrides(field, cfg.k, cfg.d, c, b),
        _ => HarmonicParams::select(field, cfg.k, cfg.d),
    }
}

/// Adds `leaky-clear` and `leaky-zero-key` to `registry`.
pub fn register_faults(registry: &mut SchemeRegistry) {
    registry.register("leaky-clear", |cfg| {
        Ok(Box::new(ClearStorage(HarmonicScheme::new(harmonic_params(cfg)?)?)) as Box<dyn CodingScheme>)
    });
    registry.register("leaky-zero-key", |cfg| {
        Ok(Box::new(ZeroKey::new(harmonic_params(cfg)?)?) as Box<dyn CodingScheme>)
    });
}
