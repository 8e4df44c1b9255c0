//! Flat `key = value` configuration files.
//!
//! ```text
//! # relay halfway, free space
//! d_sr = 0.5
//! alpha = 2
//! sigma2_sr = 1.5, 2.0
//! ```
//!
//! Keys are case-sensitive; `-` and `_` are interchangeable. Later
//! assignments win, and [`KvConfig::overlay`] applies command-line values on
//! top of a file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::channel::{ChannelVariances, NetworkGeometry};
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl KvConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            let key = normalize(key);
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            cfg.entries.insert(key, value.trim().to_string());
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(normalize(key), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// `other`'s entries take precedence.
    pub fn overlay(mut self, other: &KvConfig) -> Self {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
        self
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Config(format!("{key}: `{s}` is not a number")))
            })
            .transpose()
    }

    pub fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|s| {
                s.split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("{key}: `{p}` is not a number")))
                    })
                    .collect()
            })
            .transpose()
    }
}

impl std::fmt::Display for KvConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

fn join(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        // shortest round-trip representation
        let _ = write!(s, "{v:?}");
    }
    s
}

pub fn geometry_to_config(g: &NetworkGeometry) -> KvConfig {
    let mut cfg = KvConfig::new();
    cfg.set("d_sd", format!("{:?}", g.d_sd()));
    cfg.set("d_sr", join(g.d_sr()));
    cfg.set("d_rd", join(g.d_rd()));
    cfg.set("alpha", format!("{:?}", g.alpha()));
    cfg
}

/// Reads `d_sr`, `alpha` and optionally `d_rd` / `d_sd`. Without `d_rd` the
/// relay is placed on the source-destination line.
pub fn geometry_from_config(cfg: &KvConfig) -> Result<NetworkGeometry> {
    let missing = |k: &str| Error::Config(format!("missing key `{k}`"));
    let alpha = cfg.get_f64("alpha")?.ok_or_else(|| missing("alpha"))?;
    let d_sr = cfg.get_list("d_sr")?.ok_or_else(|| missing("d_sr"))?;
    match cfg.get_list("d_rd")? {
        Some(d_rd) => {
            let d_sd = cfg.get_f64("d_sd")?.unwrap_or(1.0);
            NetworkGeometry::new(d_sd, d_sr, d_rd, alpha)
        }
        None => match d_sr[..] {
            [d] => NetworkGeometry::collinear(d, alpha),
            _ => Err(Error::Config("multiple relays need explicit `d_rd`".into())),
        },
    }
}

pub fn variances_to_config(v: &ChannelVariances) -> KvConfig {
    let mut cfg = KvConfig::new();
    cfg.set("sigma2_sd", format!("{:?}", v.sd()));
    cfg.set("sigma2_sr", join(v.sr()));
    cfg.set("sigma2_rd", join(v.rd()));
    cfg
}

pub fn variances_from_config(cfg: &KvConfig) -> Result<ChannelVariances> {
    let missing = |k: &str| Error::Config(format!("missing key `{k}`"));
    ChannelVariances::new(
        cfg.get_f64("sigma2_sd")?.unwrap_or(1.0),
        cfg.get_list("sigma2_sr")?
            .ok_or_else(|| missing("sigma2_sr"))?,
        cfg.get_list("sigma2_rd")?
            .ok_or_else(|| missing("sigma2_rd"))?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::variances_from_geometry;

    #[test]
    fn parses_comments_and_precedence() {
        let cfg = KvConfig::parse("# c\nalpha = 3\n\nd-sr=0.25 # inline\nalpha = 4\n").unwrap();
        assert_eq!(cfg.get("alpha"), Some("4"));
        assert_eq!(cfg.get("d_sr"), Some("0.25"));
        let mut cli = KvConfig::new();
        cli.set("alpha", "2.5");
        let merged = cfg.overlay(&cli);
        assert_eq!(merged.get_f64("alpha").unwrap(), Some(2.5));
        assert_eq!(merged.get_f64("d_sr").unwrap(), Some(0.25));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(KvConfig::parse("alpha 3").is_err());
        assert!(KvConfig::parse(" = 3").is_err());
        let cfg = KvConfig::parse("alpha = x").unwrap();
        assert!(cfg.get_f64("alpha").is_err());
    }

    #[test]
    fn geometry_round_trip() {
        let g = NetworkGeometry::new(1.0, vec![0.3, 1.0 / 7.0], vec![0.71, 0.9], 3.7).unwrap();
        let text = geometry_to_config(&g).to_string();
        let back = geometry_from_config(&KvConfig::parse(&text).unwrap()).unwrap();
        assert_eq!(back, g);
        assert_eq!(
            variances_from_geometry(&back).unwrap(),
            variances_from_geometry(&g).unwrap()
        );
    }

    #[test]
    fn collinear_geometry_from_config() {
        let g = geometry_from_config(&KvConfig::parse("d_sr = 0.25\nalpha = 2").unwrap()).unwrap();
        assert_eq!(g.d_rd(), &[0.75]);
        assert!(geometry_from_config(&KvConfig::parse("d_sr = 0.25").unwrap()).is_err());
    }

    #[test]
    fn variances_round_trip() {
        let v = ChannelVariances::new(1.0, vec![9.0, 0.1 + 0.2], vec![2.25, 1e-3]).unwrap();
        let text = variances_to_config(&v).to_string();
        assert_eq!(
            variances_from_config(&KvConfig::parse(&text).unwrap()).unwrap(),
            v
        );
    }
}
