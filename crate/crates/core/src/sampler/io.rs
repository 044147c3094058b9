//! Sample file format.
//!
//! ```text
//! # cricket-hazard samples
//! # model: varying
//! # player: lara
//! # seed: 42
//! # ...more `# key: value` metadata...
//! mu1    mu2    tau    ell
//! 14.21  59.87  4.93   2.71
//! ```
//!
//! Columns are tab-separated. Values are written in shortest round-trip form, so a file reloads to the
//! identical draws.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::digest::config_digest;
use crate::error::{Error, Result};
use crate::model::ModelKind;

use super::{ChainConfig, PosteriorSamples};

const MAGIC: &str = "# cricket-hazard samples";

/// Provenance carried alongside a sample set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleMetadata {
    pub player: String,
    /// Largest score in the fitted career; sets the default predictive range.
    pub max_observed_score: Option<u32>,
    pub config: Option<ChainConfig>,
    /// Proposal scales after burn-in adaptation.
    pub final_step_sizes: Option<Vec<f64>>,
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

impl ChainConfig {
    /// Fingerprint of everything that determines a chain's output.
    pub fn digest(&self, kind: ModelKind) -> String {
        config_digest(&format!(
            "model={kind};iterations={};burn_in={};thin={};seed={};steps={};adapt={}",
            self.iterations,
            self.burn_in,
            self.thin,
            self.seed,
            join(&self.step_sizes),
            self.adapt_during_burn_in
        ))
    }
}

impl PosteriorSamples {
    pub fn config_digest(&self) -> String {
        match &self.metadata.config {
            Some(c) => c.digest(self.kind),
            None => config_digest(&format!("model={};seed={}", self.kind, self.seed)),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let m = &self.metadata;
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "# model: {}", self.kind);
        let _ = writeln!(out, "# player: {}", m.player);
        let _ = writeln!(out, "# seed: {}", self.seed);
        if let Some(c) = &m.config {
            let _ = writeln!(out, "# iterations: {}", c.iterations);
            let _ = writeln!(out, "# burn_in: {}", c.burn_in);
            let _ = writeln!(out, "# thin: {}", c.thin);
            let _ = writeln!(out, "# step_sizes: {}", join(&c.step_sizes));
            let _ = writeln!(out, "# adapt: {}", c.adapt_during_burn_in);
        }
        if let Some(s) = &m.final_step_sizes {
            let _ = writeln!(out, "# final_step_sizes: {}", join(s));
        }
        let _ = writeln!(out, "# acceptance_rate: {}", self.acceptance_rate);
        if let Some(x) = m.max_observed_score {
            let _ = writeln!(out, "# max_observed_score: {x}");
        }
        let _ = writeln!(out, "# config_digest: {}", self.config_digest());
        let _ = writeln!(out, "{}", self.kind.param_names().join("\t"));
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PosteriorSamples::parse(&text, path)
    }

    pub fn parse(text: &str, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let err = |line: usize, message: String| Error::Format {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut meta: BTreeMap<&str, &str> = BTreeMap::new();
        let mut kind: Option<ModelKind> = None;
        let mut header_seen = false;
        let mut values = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    meta.insert(k.trim(), v.trim());
                }
                continue;
            }
            if !header_seen {
                let k: ModelKind = meta
                    .get("model")
                    .ok_or_else(|| err(lineno, "missing `# model:` metadata before header".into()))?
                    .parse()
                    .map_err(|e: Error| err(lineno, e.to_string()))?;
                let names: Vec<&str> = line.split_whitespace().collect();
                if names != k.param_names() {
                    return Err(err(
                        lineno,
                        format!("expected header `{}`", k.param_names().join("\t")),
                    ));
                }
                kind = Some(k);
                header_seen = true;
                continue;
            }
            let dim = kind.map_or(0, ModelKind::dim);
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| err(lineno, format!("`{t}`: {e}"))))
                .collect::<Result<_>>()?;
            if row.len() != dim {
                return Err(err(lineno, format!("expected {dim} columns, found {}", row.len())));
            }
            if let Some(bad) = row.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                return Err(err(lineno, format!("non-positive draw component {bad}")));
            }
            values.extend(row);
        }
        let kind = kind.ok_or_else(|| err(text.lines().count(), "no header row".into()))?;

        let num = |key: &str| -> Result<Option<u64>> {
            meta.get(key)
                .map(|v| v.parse::<u64>().map_err(|e| err(0, format!("{key}: {e}"))))
                .transpose()
        };
        let floats = |key: &str| -> Result<Option<Vec<f64>>> {
            meta.get(key)
                .map(|v| {
                    v.split_whitespace()
                        .map(|t| t.parse::<f64>().map_err(|e| err(0, format!("{key}: {e}"))))
                        .collect::<Result<Vec<f64>>>()
                })
                .transpose()
        };
        let seed = num("seed")?.unwrap_or(0);
        let config = match (num("iterations")?, num("burn_in")?, num("thin")?) {
            (Some(it), Some(b), Some(t)) => {
                let mut c = ChainConfig::new(it, b, t, seed)?;
                if let Some(s) = floats("step_sizes")? {
                    let arr: [f64; 4] = s
                        .try_into()
                        .map_err(|_| err(0, "step_sizes needs four values".into()))?;
                    c = c.with_step_sizes(arr)?;
                }
                if let Some(a) = meta.get("adapt") {
                    c = c.with_adaptation(*a == "true");
                }
                Some(c)
            }
            _ => None,
        };
        let acceptance_rate = meta
            .get("acceptance_rate")
            .and_then(|v| v.parse::<f64>().ok())
            .unwrap_or(f64::NAN);
        Ok(PosteriorSamples {
            kind,
            values,
            acceptance_rate,
            seed,
            metadata: SampleMetadata {
                player: meta.get("player").map(|s| s.to_string()).unwrap_or_default(),
                max_observed_score: num("max_observed_score")?.map(|x| x as u32),
                config,
                final_step_sizes: floats("final_step_sizes")?,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::career::Career;
    use crate::sampler::run_chain;
    use proptest::prelude::*;

    #[test]
    fn chain_output_round_trips() {
        let c = Career::parse("10\n20\n3*\n0\n55\n", "someone").unwrap();
        let cfg = ChainConfig::new(2_000, 100, 7, 42).unwrap();
        let s = run_chain(&c, ModelKind::Varying, &cfg);
        let back = PosteriorSamples::parse(&s.to_text(), "mem").unwrap();
        assert_eq!(back, s);
        assert_eq!(back.metadata.player, "someone");
        assert_eq!(back.metadata.max_observed_score, Some(55));
    }

    #[test]
    fn rejects_malformed_files() {
        let cases = [
            ("mu1\tmu2\ttau\tell\n1\t2\t3\t4\n", "missing model"),
            ("# model: varying\nmu\n1\n", "wrong header"),
            ("# model: constant\nmu\n1 2\n", "wrong width"),
            ("# model: constant\nmu\n-1\n", "negative"),
            ("# model: constant\nmu\nabc\n", "not a number"),
            ("# model: constant\n", "no header"),
        ];
        for (text, what) in cases {
            assert!(PosteriorSamples::parse(text, "x").is_err(), "{what}");
        }
    }

    proptest! {
        #[test]
        fn arbitrary_draws_round_trip(
            draws in prop::collection::vec(prop::collection::vec(1e-9f64..1e6, 1), 0..30)
        ) {
            let s = PosteriorSamples::from_draws(ModelKind::Constant, &draws, 7).unwrap();
            let back = PosteriorSamples::parse(&s.to_text(), "x").unwrap();
            prop_assert_eq!(back.len(), s.len());
            prop_assert!(back.rows().zip(s.rows()).all(|(a, b)| a == b));
        }
    }
}
