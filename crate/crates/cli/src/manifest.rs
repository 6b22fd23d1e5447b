use ccurv_core::ode::Tolerance;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Reproducibility record written next to every `--out` file.
///
/// Everything except `wall_time_s` is a function of the inputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub command: Vec<String>,
    /// sha256 of the field file bytes.
    pub field_config_hash: Option<String>,
    pub tolerances: Tolerance,
    pub grid: Option<Value>,
    /// sha256 over command, field hash, tolerances and grid.
    pub config_hash: String,
    /// sha256 of the rendered output.
    pub result_digest: String,
    pub wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(
        command: Vec<String>,
        field_config_hash: Option<String>,
        tolerances: Tolerance,
        grid: Option<Value>,
        output: &str,
        wall_time_s: f64,
    ) -> Self {
        let key = serde_json::json!({
            "command": command,
            "field": field_config_hash,
            "tolerances": tolerances,
            "grid": grid,
        });
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            config_hash: sha256_hex(key.to_string().as_bytes()),
            result_digest: sha256_hex(output.as_bytes()),
            command,
            field_config_hash,
            tolerances,
            grid,
            wall_time_s,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
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

    #[test]
    fn only_wall_time_varies() {
        let make = |t| {
            RunManifest::new(
                vec!["conjugate".into()],
                Some("00".into()),
                Tolerance::tight(),
                None,
                "1.57079633\n",
                t,
            )
        };
        let (a, b) = (make(0.5), make(2.0));
        assert_eq!(a.config_hash, b.config_hash);
        assert_eq!(a.result_digest, b.result_digest);
        assert_ne!(a.to_json(), b.to_json());
    }
}
