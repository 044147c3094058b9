use sha2::{Digest, Sha256};

/// Short hex fingerprint of a canonical configuration string.
pub fn config_digest(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}
