//! `key = value` config files.
//!
//! Keys are the long flag names without the leading dashes; `_` and `-` are
//! interchangeable and case is ignored. Blank lines and `#` comments are
//! skipped. Command-line flags are layered on top with [`ConfigFile::set`].

use std::collections::BTreeMap;
use std::path::Path;

use super::{parse_range, parse_rat_list, ScanConfig};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn norm(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

/// Keys understood by [`ScanConfig::from_config`].
pub const SCAN_KEYS: &[&str] = &[
    "a-range", "b-range", "a-den", "b-den", "S", "eps", "tower", "centers", "jobs", "top-k", "no-points",
];

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = norm(k);
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", i + 1)));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: `{key}` set twice", i + 1)));
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        ConfigFile::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(&norm(key)).map(String::as_str)
    }

    /// Overrides `key` when `value` is present.
    pub fn set(&mut self, key: &str, value: Option<&str>) {
        if let Some(v) = value {
            self.values.insert(norm(key), v.to_string());
        }
    }

    /// A boolean key; `true`, `false` or absent.
    pub fn switch(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(Error::Config(format!("`{key}` must be true or false, got `{v}`"))),
        }
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| Error::Config(format!("`{key}` = `{v}` does not parse"))))
            .transpose()
    }

    /// Fails on keys outside `known`.
    pub fn check_known(&self, known: &[&str]) -> Result<()> {
        let unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !known.iter().any(|n| norm(n) == **k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))))
        }
    }
}

fn den_range(s: &str) -> Result<(u64, u64)> {
    let (lo, hi) = parse_range(s)?;
    if lo < 1 {
        return Err(Error::Config(format!("denominators must be positive: {s}")));
    }
    Ok((lo as u64, hi as u64))
}

impl ScanConfig {
    /// Defaults overridden by whichever of [`SCAN_KEYS`] are present. Points
    /// are recorded unless `no-points = true`.
    pub fn from_config(c: &ConfigFile) -> Result<ScanConfig> {
        let mut cfg = ScanConfig::default();
        if let Some(r) = c.get("a-range") {
            cfg.a_range = parse_range(r)?;
        }
        if let Some(r) = c.get("b-range") {
            cfg.b_range = parse_range(r)?;
        }
        if let Some(r) = c.get("a-den") {
            cfg.a_den = den_range(r)?;
        }
        if let Some(r) = c.get("b-den") {
            cfg.b_den = den_range(r)?;
        }
        if let Some(s) = c.get("S") {
            cfg.s = s.parse()?;
        }
        if let Some(e) = c.get("eps") {
            cfg.eps = e.parse()?;
        }
        if let Some(t) = c.get("tower") {
            cfg.tower = t.parse()?;
        }
        if let Some(x) = c.get("centers") {
            cfg.centers = parse_rat_list(x)?;
        }
        if let Some(j) = c.parsed::<usize>("jobs")? {
            if j == 0 {
                return Err(Error::Config("jobs must be at least 1".into()));
            }
            cfg.jobs = j;
        }
        if let Some(k) = c.parsed("top-k")? {
            cfg.top_k = k;
        }
        cfg.record_points = !c.switch("no-points")?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rat;

    #[test]
    fn parse_and_override() {
        let mut c = ConfigFile::parse("# scan\na_range = 2..40  # numerators\n\nS = 2,3\nno-points = true\n").unwrap();
        assert_eq!(c.get("a-range"), Some("2..40"));
        c.set("a-range", Some("5..6"));
        c.set("eps", None);
        assert_eq!(c.get("A_RANGE"), Some("5..6"));
        assert!(c.switch("no-points").unwrap());
        assert!(c.check_known(&["a-range", "S"]).is_err());
        assert!(c.check_known(SCAN_KEYS).is_ok());
        let cfg = ScanConfig::from_config(&c).unwrap();
        assert_eq!(cfg.a_range, (5, 6));
        assert_eq!(cfg.eps, Rat::frac(1, 10));
        assert!(!cfg.record_points);
        assert_eq!(cfg.s.to_string(), "{inf,2,3}");
        assert!(ConfigFile::parse("novalue\n").is_err());
        assert!(ConfigFile::parse("a = 1\na = 2\n").is_err());
        assert!(ScanConfig::from_config(&ConfigFile::parse("jobs = 0").unwrap()).is_err());
        assert!(ScanConfig::from_config(&ConfigFile::parse("a-den = 0..2").unwrap()).is_err());
    }
}
