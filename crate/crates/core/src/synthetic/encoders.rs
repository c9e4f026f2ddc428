use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rng::{gaussian_vec, sample_without_replacement};
use crate::numerics::{l2_normalize_rows, pca, zscore_columns, EmbeddingMatrix, RandomStream};

/// Encoder transformation family applied to a base representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncoderKind {
    Pca { k: usize },
    RandomProjection { k: usize },
    TopVariance { k: usize },
    RandomFeatures { k: usize },
    Noise { sigma: f64 },
    Zscore,
    L2,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderTransform {
    #[serde(flatten)]
    pub kind: EncoderKind,
    pub seed: u64,
}

impl EncoderTransform {
    pub fn new(kind: EncoderKind, seed: u64) -> Self {
        Self { kind, seed }
    }
}

impl fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncoderKind::Pca { k } => write!(f, "pca:k={k}"),
            EncoderKind::RandomProjection { k } => write!(f, "random_projection:k={k}"),
            EncoderKind::TopVariance { k } => write!(f, "top_variance:k={k}"),
            EncoderKind::RandomFeatures { k } => write!(f, "random_features:k={k}"),
            EncoderKind::Noise { sigma } => write!(f, "noise:sigma={sigma}"),
            EncoderKind::Zscore => write!(f, "zscore"),
            EncoderKind::L2 => write!(f, "l2"),
            EncoderKind::Identity => write!(f, "identity"),
        }
    }
}

/// Parses `kind(:param=value)*`, e.g. `pca:k=100` or `noise:sigma=0.2`.
impl FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::SpecParse(format!("{s}: {msg}"));
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or("").trim();
        let mut params: Vec<(String, String)> = Vec::new();
        for p in parts {
            let (key, value) = p.split_once('=').ok_or_else(|| bad(format!("parameter '{p}' is not key=value")))?;
            let key = key.trim().to_string();
            if params.iter().any(|(k, _)| *k == key) {
                return Err(bad(format!("duplicate parameter '{key}'")));
            }
            params.push((key, value.trim().to_string()));
        }
        let take = |name: &str| params.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str());
        let check_only = |allowed: &[&str]| -> Result<()> {
            match params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
                Some((k, _)) => Err(bad(format!("unknown parameter '{k}' for {kind}"))),
                None => Ok(()),
            }
        };
        let int_k = || -> Result<usize> {
            check_only(&["k"])?;
            let v = take("k").ok_or_else(|| bad("missing k".into()))?;
            let k: usize = v.parse().map_err(|_| bad(format!("k='{v}' is not a positive integer")))?;
            if k == 0 {
                return Err(bad("k must be >= 1".into()));
            }
            Ok(k)
        };
        match kind {
            "pca" => Ok(EncoderKind::Pca { k: int_k()? }),
            "random_projection" => Ok(EncoderKind::RandomProjection { k: int_k()? }),
            "top_variance" => Ok(EncoderKind::TopVariance { k: int_k()? }),
            "random_features" => Ok(EncoderKind::RandomFeatures { k: int_k()? }),
            "noise" => {
                check_only(&["sigma"])?;
                let v = take("sigma").ok_or_else(|| bad("missing sigma".into()))?;
                let sigma: f64 = v.parse().map_err(|_| bad(format!("sigma='{v}' is not a number")))?;
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(bad("sigma must be > 0".into()));
                }
                Ok(EncoderKind::Noise { sigma })
            }
            "zscore" | "l2" | "identity" => {
                check_only(&[])?;
                Ok(match kind {
                    "zscore" => EncoderKind::Zscore,
                    "l2" => EncoderKind::L2,
                    _ => EncoderKind::Identity,
                })
            }
            other => Err(bad(format!("unknown encoder '{other}'"))),
        }
    }
}

fn check_columns(k: usize, d: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(Error::RankTooHigh { k, max: d });
    }
    Ok(())
}

/// Applies an encoder transformation; random kinds draw from `t.seed`.
pub fn apply_encoder(x: &EmbeddingMatrix, t: &EncoderTransform) -> Result<EmbeddingMatrix> {
    let stream = RandomStream::new(t.seed);
    let d = x.ncols();
    match t.kind {
        EncoderKind::Identity => Ok(x.clone()),
        EncoderKind::Zscore => zscore_columns(x),
        EncoderKind::L2 => l2_normalize_rows(x),
        EncoderKind::Pca { k } => Ok(pca(x, k)?.0),
        EncoderKind::RandomProjection { k } => {
            if k == 0 {
                return Err(Error::RankTooHigh { k, max: usize::MAX });
            }
            let g = DMatrix::from_row_slice(d, k, &gaussian_vec(&mut stream.rng(0), d * k)) / (k as f64).sqrt();
            EmbeddingMatrix::new(x.matrix() * g)
        }
        EncoderKind::TopVariance { k } => {
            check_columns(k, d)?;
            let c = x.centered();
            let var: Vec<f64> = c.column_iter().map(|col| col.norm_squared()).collect();
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| var[b].total_cmp(&var[a]).then(a.cmp(&b)));
            Ok(x.select_columns(&order[..k]))
        }
        EncoderKind::RandomFeatures { k } => {
            check_columns(k, d)?;
            Ok(x.select_columns(&sample_without_replacement(&mut stream.rng(0), d, k)))
        }
        EncoderKind::Noise { sigma } => {
            if sigma.is_nan() || sigma <= 0.0 {
                return Err(Error::InvalidParameter("sigma must be > 0".into()));
            }
            let scale = sigma * x.global_std();
            let eps = gaussian_vec(&mut stream.rng(0), x.nrows() * d);
            let noise = DMatrix::from_row_slice(x.nrows(), d, &eps) * scale;
            EmbeddingMatrix::new(x.matrix() + noise)
        }
    }
}
