use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SweepArgs;
use crate::sampling::{EigenMethod, DISTRIBUTION};

/// Everything needed to regenerate an output file byte for byte.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub arguments: SweepArgs,
    pub seed: u64,
    pub grid: String,
    pub distribution: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen_method: Option<EigenMethod>,
    pub output: OutputRecord,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn for_sweep(args: &SweepArgs, method: Option<EigenMethod>, bytes: &[u8]) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: "sweep".into(),
            arguments: args.clone(),
            seed: args.seed,
            grid: args.grid.clone(),
            distribution: DISTRIBUTION.into(),
            eigen_method: method,
            output: OutputRecord {
                path: args.out.display().to_string(),
                sha256: sha256_hex(bytes),
            },
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
