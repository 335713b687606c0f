//! Versioned reconstruction certificates with per-stage hashes.
//!
//! A certificate freezes one end-to-end reconstruction run: the field
//! tower, the input unital (verbatim, as portable coordinate strings), the
//! chosen point and slack, the seeded withholding choices, and one record
//! per pipeline stage carrying SHA-256 digests of that stage's input and
//! output. Anyone holding only the certificate file can rebuild the tower,
//! re-validate the unital, replay every stage with the recorded choices,
//! and compare digests — no access to the producing process is needed.
//!
//! Serialization is canonical: struct fields serialize in declaration
//! order, maps are ordered, and point lists are sorted, so identical runs
//! produce byte-identical JSON at any thread count.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Current certificate schema version.
pub const CERT_VERSION: u32 = 1;

/// Errors raised while reading certificates.
#[derive(Debug, thiserror::Error)]
pub enum CertError {
    #[error("certificate version {got}, this build reads version {want}")]
    Version { got: u32, want: u32 },
    #[error("malformed certificate: {0}")]
    Json(#[from] serde_json::Error),
}

/// Hex SHA-256 of raw bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}

/// Hex SHA-256 of a value's canonical JSON bytes.
pub fn hash_json<T: Serialize>(value: &T) -> String {
    sha256_hex(&serde_json::to_vec(value).expect("certificate payloads serialize"))
}

/// One pipeline stage: named, with input/output digests and the output
/// itself for human audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub input_sha256: String,
    pub output_sha256: String,
    pub output: Value,
}

impl Stage {
    /// Builds a stage record, hashing both payloads canonically.
    pub fn record<I: Serialize, O: Serialize>(name: &str, input: &I, output: &O) -> Stage {
        Stage {
            name: name.to_string(),
            input_sha256: hash_json(input),
            output_sha256: hash_json(output),
            output: serde_json::to_value(output).expect("certificate payloads serialize"),
        }
    }
}

/// A complete reconstruction certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    /// Tower parameters: characteristic, degree, and both defining
    /// polynomials, enough to rebuild identical arithmetic tables.
    pub p: u32,
    pub h: u32,
    pub poly_q: Vec<u16>,
    pub poly_q2: (u16, u16),
    pub q: u32,
    /// The reconstruction point in plane coordinates `x:y:z`.
    pub point: String,
    /// Requested slack: the run used exactly `q² − ε` secants.
    pub epsilon: u32,
    /// Seed of the withholding draw (unused when `ε` matches the census).
    pub seed: u64,
    /// Withheld secants, each by its plane line coefficients `a:b:c`.
    pub dropped_secants: Vec<String>,
    /// Verbatim conditions of the hypothesis table row the run was checked
    /// against, or `None` when no row applies at this order.
    pub hypothesis_row: Option<String>,
    /// Whether that row's bound held (`None` when no row applies).
    pub hypothesis_satisfied: Option<bool>,
    /// The input unital, one `x:y:z` point per entry, ascending.
    pub unital_points: Vec<String>,
    pub stages: Vec<Stage>,
    /// `"verified"` — failed runs raise errors instead of certificates.
    pub result: String,
}

impl Certificate {
    /// Canonical pretty JSON; byte-identical across identical runs.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    /// Parses and version-checks a certificate.
    pub fn from_json(text: &str) -> Result<Certificate, CertError> {
        let peek: Value = serde_json::from_str(text)?;
        let got = peek
            .get("version")
            .and_then(Value::as_u64)
            .unwrap_or(u64::from(u32::MAX)) as u32;
        if got != CERT_VERSION {
            return Err(CertError::Version {
                got,
                want: CERT_VERSION,
            });
        }
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashing_is_stable_and_input_sensitive() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        let a = hash_json(&vec![1u32, 2, 3]);
        let b = hash_json(&vec![1u32, 2, 3]);
        let c = hash_json(&vec![3u32, 2, 1]);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    fn sample() -> Certificate {
        Certificate {
            version: CERT_VERSION,
            p: 3,
            h: 1,
            poly_q: vec![0, 1],
            poly_q2: (1, 0),
            q: 3,
            point: "0:1:0".into(),
            epsilon: 0,
            seed: 7,
            dropped_secants: vec![],
            hypothesis_row: None,
            hypothesis_satisfied: None,
            unital_points: vec!["0:1:0".into()],
            stages: vec![Stage::record("census", &("0:1:0", 0u32), &9u32)],
            result: "verified".into(),
        }
    }

    #[test]
    fn certificates_round_trip_byte_identically() {
        let cert = sample();
        let text = cert.to_json();
        let back = Certificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn wrong_versions_are_rejected() {
        let mut cert = sample();
        cert.version = CERT_VERSION + 1;
        let text = serde_json::to_string(&cert).unwrap();
        assert!(matches!(
            Certificate::from_json(&text),
            Err(CertError::Version { want: CERT_VERSION, .. })
        ));
        assert!(matches!(
            Certificate::from_json("not json"),
            Err(CertError::Json(_))
        ));
    }

    #[test]
    fn stage_records_hash_their_own_output() {
        let s = Stage::record("extend", &1u32, &vec!["a", "b"]);
        assert_eq!(s.output_sha256, hash_json(&s.output));
        assert_ne!(s.input_sha256, s.output_sha256);
    }
}
