//! Exact certificates and their JSON form.

use serde::{Deserialize, Serialize};

use super::exact::{self, RatMatrix};
use crate::error::{Error, Result};
use crate::graph::GraphJson;
use crate::poly::PolyJson;
use crate::rational::{serde_rational, Rational};
use crate::symrep::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Flag,
    GpRestricted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateBlock {
    pub label: String,
    #[serde(with = "serde_rational::matrix")]
    pub matrix: RatMatrix,
}

/// One `(T, f)` family of a flag certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    #[serde(rename = "type")]
    pub ty: GraphJson,
    pub f: usize,
}

/// What the symmetric program asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GpMode {
    /// `target ≡ Σ n_λ ⟨Q_λ, Y_λ⟩`.
    Feasibility,
    /// `bound − target ≡ Σ n_λ ⟨Q_λ, Y_λ⟩ + Σ c_H d_H` with `c_H ≥ 0`.
    Bound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum Setup {
    Flag {
        forbidden: GraphJson,
        host_size: usize,
        families: Vec<FamilyJson>,
    },
    Gp {
        forbidden: GraphJson,
        n: usize,
        degree: usize,
        hook_t: usize,
        partitions: Vec<Partition>,
        mode: GpMode,
        /// Size of the host graphs whose densities act as nonnegative slack
        /// (bound mode only).
        host_size: usize,
        target: PolyJson,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    pub blocks: Vec<CertificateBlock>,
    pub setup: Setup,
}

impl Certificate {
    pub fn matrices(&self) -> Vec<RatMatrix> {
        self.blocks.iter().map(|b| b.matrix.clone()).collect()
    }

    pub fn block(&self, label: &str) -> Option<&CertificateBlock> {
        self.blocks.iter().find(|b| b.label == label)
    }

    /// Index of the first block failing the exact PSD test.
    pub fn first_non_psd(&self) -> Result<Option<usize>> {
        for (i, b) in self.blocks.iter().enumerate() {
            if !exact::check_psd_rational(&b.matrix)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Certificate = serde_json::from_str(s)?;
        let kind_ok = matches!((&c.kind, &c.setup), (CertificateKind::Flag, Setup::Flag { .. }) | (CertificateKind::GpRestricted, Setup::Gp { .. }));
        if !kind_ok {
            return Err(Error::Parse("certificate kind does not match its setup".into()));
        }
        Ok(c)
    }
}
