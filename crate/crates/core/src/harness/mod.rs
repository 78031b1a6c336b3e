//! Scan campaigns and constructions built on the tower and height modules.
//!
//! Every scan splits its point space into fixed-size chunks, evaluates the
//! chunks on a pool of `jobs` workers and merges the partial results in
//! chunk order, so reports do not depend on the degree of parallelism.

pub mod abc;
pub mod checks;
pub mod config;
pub mod lemma;
pub mod report;
pub mod ridout;
pub mod t2;
pub mod vojta;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{LogRat, LogSum, Rat};
use crate::stern_brocot::SBPath;
use crate::tower::{chain_tower, theorem2_tower, tower_from_paths, Tower};

pub use abc::{abc_scan, abc_truncated_margin, compare_quality, AbcReport, AbcTriple};
pub use config::{ConfigFile, SCAN_KEYS};
pub use lemma::{lemma_elementary_check, lemma_m, LemmaOutcome};
pub use ridout::ridout_scan;
pub use t2::{saturation_report, theorem2_construct, SaturationRow, T2Construction, T2Variant};
pub use vojta::{vojta_scan, vojta_scan_nested, ScanConfig, ScanReport};

/// Points per chunk. Fixed so the merge order never depends on `jobs`.
pub const CHUNK: usize = 1 << 12;

/// An exact value with its double rendering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Num {
    pub exact: String,
    pub float: f64,
}

impl From<&Rat> for Num {
    fn from(r: &Rat) -> Num {
        Num {
            exact: r.to_string(),
            float: r.to_f64(),
        }
    }
}

impl From<&LogRat> for Num {
    fn from(l: &LogRat) -> Num {
        Num {
            exact: l.to_string(),
            float: l.to_f64(),
        }
    }
}

impl From<&LogSum> for Num {
    fn from(l: &LogSum) -> Num {
        Num {
            exact: l.to_string(),
            float: l.to_f64(),
        }
    }
}

/// Which tower to build over each center.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TowerSpec {
    Chain(usize),
    Theorem2(usize),
    /// Fork paths of the crossing intervals, in blowup order.
    Custom(Vec<SBPath>),
}

impl TowerSpec {
    pub fn build(&self, center: Rat) -> Result<Tower> {
        match self {
            TowerSpec::Chain(n) => chain_tower(*n, center),
            TowerSpec::Theorem2(n) => theorem2_tower(*n, center),
            TowerSpec::Custom(paths) => tower_from_paths(paths, center),
        }
    }
}

impl fmt::Display for TowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerSpec::Chain(n) => write!(f, "chain:{n}"),
            TowerSpec::Theorem2(n) => write!(f, "t2:{n}"),
            TowerSpec::Custom(p) => {
                let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                write!(f, "custom:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for TowerSpec {
    type Err = Error;

    /// `chain:N`, `t2:N` or `custom:P1,P2,...` where each `Pi` is a fork
    /// string over `L`/`R` and `.` is the root interval. `custom:` alone is
    /// the single blowup `X_1`.
    fn from_str(s: &str) -> Result<TowerSpec> {
        let bad = || Error::Parse(format!("tower spec `{s}`"));
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind {
            "chain" => Ok(TowerSpec::Chain(arg.parse().map_err(|_| bad())?)),
            "t2" => Ok(TowerSpec::Theorem2(arg.parse().map_err(|_| bad())?)),
            "custom" => Ok(TowerSpec::Custom(
                arg.split(',')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?,
            )),
            _ => Err(bad()),
        }
    }
}

/// Evaluates `f` on consecutive chunks of `0..n` with `jobs` workers and
/// returns the results in chunk order.
pub(crate) fn run_chunks<T, F>(n: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    let ranges: Vec<Range<usize>> = (0..n)
        .step_by(CHUNK)
        .map(|s| s..(s + CHUNK).min(n))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    Ok(pool.install(|| ranges.into_par_iter().map(&f).collect()))
}

/// Parses `lo..hi` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("range `{s}`"));
    let t = s.trim();
    let (lo, hi) = match t.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().trim_start_matches('=').parse().map_err(|_| bad())?,
        ),
        None => {
            let v = t.parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(Error::Precondition(format!("empty range {s}")));
    }
    Ok((lo, hi))
}

/// Comma separated rationals.
pub fn parse_rat_list(s: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_specs_round_trip() {
        for s in ["chain:4", "t2:5", "custom:.,L,LR", "custom:"] {
            assert_eq!(s.parse::<TowerSpec>().unwrap().to_string(), s);
        }
        assert!("chain".parse::<TowerSpec>().is_err());
        assert!("custom:.,X".parse::<TowerSpec>().is_err());
        let t = "custom:.,R".parse::<TowerSpec>().unwrap().build(Rat::one()).unwrap();
        assert_eq!(t.node(3).unwrap().fraction.to_string(), "2/3");
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..300").unwrap(), (2, 300));
        assert_eq!(parse_range("-5..=5").unwrap(), (-5, 5));
        assert_eq!(parse_range("7").unwrap(), (7, 7));
        assert!(parse_range("3..1").is_err());
    }

    #[test]
    fn chunks_keep_order() {
        for jobs in [1, 3] {
            let v = run_chunks(10_000, jobs, |r| r.start).unwrap();
            assert_eq!(v, vec![0, 4096, 8192]);
        }
    }
}
