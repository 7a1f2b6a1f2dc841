//! Operad sources and cached per-prime rank computations.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use operad_core::consequences::ConsequenceError;
use operad_core::dual::DualError;
use operad_core::identity_dsl::IdentityError;
use operad_core::{
    dual_relations, expand_consequences, parse_identities, preset, rank_mod_p, DualPresentation,
    Identity, PrimeField, SparseRowMatrix,
};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cache::{Cache, CacheError, RunRecord};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Identity(#[from] IdentityError),
    #[error("{0}")]
    Consequence(#[from] ConsequenceError),
    #[error("{0}")]
    Dual(#[from] DualError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("stopped after {0} fresh rank computations; rerun to resume from the cache")]
    Interrupted(usize),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Interrupted(_) => 130,
            _ => 1,
        }
    }
}

/// Identities together with the key under which their runs are cached.
#[derive(Debug, Clone)]
pub struct Source {
    pub key: String,
    pub identities: Vec<Identity>,
    pub is_preset: bool,
}

impl Source {
    pub fn resolve(preset_name: Option<&str>, file: Option<&Path>) -> Result<Source, CliError> {
        match (preset_name, file) {
            (Some(name), None) => {
                let p = preset(name)?;
                Ok(Source {
                    key: p.name,
                    identities: p.identities,
                    is_preset: true,
                })
            }
            (None, Some(path)) => {
                let bytes = std::fs::read(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                let text = String::from_utf8(bytes.clone())
                    .map_err(|_| CliError::Usage(format!("{}: not valid UTF-8", path.display())))?;
                let identities = parse_identities(&text)?;
                if identities.is_empty() {
                    return Err(CliError::Usage(format!(
                        "{}: no identities found",
                        path.display()
                    )));
                }
                if let Some(id) = identities.iter().find(|id| !id.is_multilinear()) {
                    return Err(CliError::Usage(format!(
                        "identity `{id}` is not multilinear; run `operad linearize` on it first"
                    )));
                }
                let key = format!("file:{}", hex::encode(Sha256::digest(&bytes)));
                Ok(Source {
                    key,
                    identities,
                    is_preset: false,
                })
            }
            _ => Err(CliError::Usage(
                "give exactly one of --preset and --identities".into(),
            )),
        }
    }

    /// The quadratic dual, cached under `dual:<key>`.
    pub fn dual(&self) -> Result<(DualPresentation, Source), CliError> {
        let presentation = dual_relations(&self.identities)?;
        let identities = presentation.engine_identities()?;
        let source = Source {
            key: format!("dual:{}", self.key),
            identities,
            is_preset: self.is_preset,
        };
        Ok((presentation, source))
    }

    /// Consequence matrix in degree `n`. Identities of higher degree impose
    /// nothing there and are left out.
    pub fn matrix(&self, n: usize) -> Result<SparseRowMatrix, CliError> {
        let relevant: Vec<Identity> = self
            .identities
            .iter()
            .filter(|id| id.degree() <= n)
            .cloned()
            .collect();
        Ok(expand_consequences(&relevant, n)?)
    }
}

/// Rank computations served from the cache where possible.
pub struct Ranks {
    cache: Option<Cache>,
    recompute: bool,
    stop_after: Option<usize>,
    fresh: AtomicUsize,
}

impl Ranks {
    pub fn new(cache: Option<Cache>, recompute: bool, stop_after: Option<usize>) -> Self {
        Ranks {
            cache,
            recompute,
            stop_after,
            fresh: AtomicUsize::new(0),
        }
    }

    pub fn cached(&self, source: &Source, degree: usize, prime: u64) -> Option<RunRecord> {
        if self.recompute {
            return None;
        }
        self.cache.as_ref()?.get(&source.key, degree, prime)
    }

    /// The run record for `matrix` modulo `prime`, computing and caching it
    /// if needed. With `recompute` set, a fresh rank that disagrees with the
    /// cache is an error.
    pub fn record(
        &self,
        source: &Source,
        matrix: &SparseRowMatrix,
        prime: u64,
    ) -> Result<RunRecord, CliError> {
        let degree = matrix.degree();
        if let Some(r) = self.cached(source, degree, prime) {
            return Ok(r);
        }
        let started = self.fresh.fetch_add(1, Ordering::SeqCst);
        if let Some(limit) = self.stop_after {
            if started >= limit {
                return Err(CliError::Interrupted(limit));
            }
        }
        let field = PrimeField::new(prime).map_err(|e| CliError::Usage(e.to_string()))?;
        let clock = Instant::now();
        let rank = rank_mod_p(matrix, &field) as u64;
        let monomial_count = matrix.n_cols() as u64;
        let record = RunRecord {
            operad: source.key.clone(),
            degree,
            prime,
            monomial_count,
            row_count: matrix.n_rows() as u64,
            rank,
            dim: monomial_count - rank,
            wall_time_ms: clock.elapsed().as_millis() as u64,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        };
        match &self.cache {
            Some(cache) => Ok(cache.insert(record)?),
            None => Ok(record),
        }
    }
}
