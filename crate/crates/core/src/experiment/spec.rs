//! Experiment configuration: flat `key = value` files, overlaid by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::codegree::TrackingPolicy;
use crate::error::{Error, Result};
use crate::process::{Budgets, RejectionCap, StopRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Run,
    Maximal,
    Sweep,
    Verify,
    Bounds,
    Curves,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "run" => Self::Run,
            "maximal" => Self::Maximal,
            "sweep" => Self::Sweep,
            "verify" => Self::Verify,
            "bounds" => Self::Bounds,
            "curves" => Self::Curves,
            _ => return Err(Error::Usage(format!("unknown mode {s:?}"))),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Run => "run",
            Self::Maximal => "maximal",
            Self::Sweep => "sweep",
            Self::Verify => "verify",
            Self::Bounds => "bounds",
            Self::Curves => "curves",
        })
    }
}

/// Raw settings as repeatable string values, keyed by name.
///
/// Files and flags both land here; a key set by a later layer replaces
/// every value the earlier layer gave it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, Vec<String>>,
}

const KEYS: &[&str] = &[
    "mode",
    "n",
    "q",
    "seed",
    "runs",
    "stop",
    "stride",
    "samples",
    "jobs",
    "out",
    "tracked",
    "enumeration",
    "rejection_cap",
    "suite",
];

impl Settings {
    /// Parses `key = value` lines. `#` starts a comment; repeated keys
    /// accumulate, and a value may also be a comma-separated list.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Usage(format!("line {}: expected key = value", lineno + 1))
            })?;
            out.push(k.trim(), v.trim())?;
        }
        Ok(out)
    }

    pub fn push(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Usage(format!("unknown key {key:?}")));
        }
        let entry = self.values.entry(key.to_string()).or_default();
        entry.extend(
            value
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty()),
        );
        Ok(())
    }

    pub fn overlay(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    fn all(&self, key: &str) -> &[String] {
        self.values.get(key).map_or(&[], Vec::as_slice)
    }

    fn one(&self, key: &str) -> Result<Option<&str>> {
        match self.all(key) {
            [] => Ok(None),
            [v] => Ok(Some(v)),
            _ => Err(Error::Usage(format!("{key} takes a single value"))),
        }
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.one(key)?
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Usage(format!("bad value {v:?} for {key}")))
            })
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.all(key)
            .iter()
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Usage(format!("bad value {v:?} for {key}")))
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub n: Vec<usize>,
    pub q: Vec<usize>,
    pub seed: u64,
    pub runs: u64,
    pub stop: StopRule,
    pub stride: Option<u64>,
    pub tracking: TrackingPolicy,
    pub out: PathBuf,
    pub budgets: Budgets,
    pub rejection_cap: RejectionCap,
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
    /// Suite names for `verify`; empty means all.
    pub suites: Vec<String>,
}

impl ExperimentSpec {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let mode: Mode = s
            .parsed("mode")?
            .ok_or_else(|| Error::Usage("no mode given".into()))?;
        let needs_sizes = !matches!(mode, Mode::Verify);
        let n: Vec<usize> = s.list("n")?;
        let q: Vec<usize> = s.list("q")?;
        if needs_sizes && (n.is_empty() || q.is_empty()) {
            return Err(Error::Usage(format!(
                "{mode} needs at least one n and one q"
            )));
        }
        let stop = match (mode, s.parsed::<StopRule>("stop")?) {
            (Mode::Maximal, None | Some(StopRule::Maximal)) => StopRule::Maximal,
            (Mode::Maximal, Some(other)) => {
                return Err(Error::Usage(format!("maximal mode cannot stop at {other}")))
            }
            (_, Some(rule)) => rule,
            (_, None) => StopRule::M0,
        };
        let runs = s.parsed("runs")?.unwrap_or(1);
        if runs == 0 {
            return Err(Error::Usage("runs must be at least 1".into()));
        }
        let stride = s.parsed("stride")?;
        if stride == Some(0) {
            return Err(Error::Usage("stride must be at least 1".into()));
        }
        let tracking = match s.one("tracked")? {
            None => match mode {
                Mode::Maximal => TrackingPolicy::EmptyOnly,
                _ => TrackingPolicy::default(),
            },
            Some("none") => TrackingPolicy::EmptyOnly,
            Some(v) => TrackingPolicy::Random {
                per_size: v
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad value {v:?} for tracked")))?,
            },
        };
        let mut budgets = Budgets::default();
        if let Some(k) = s.parsed("samples")? {
            if k == 0 {
                return Err(Error::Usage("samples must be at least 1".into()));
            }
            budgets.samples = k;
        }
        if let Some(k) = s.parsed("enumeration")? {
            budgets.enumeration_nodes = k;
        }
        let rejection_cap = match s.one("rejection_cap")? {
            None | Some("adaptive") => RejectionCap::Adaptive,
            Some(v) => RejectionCap::Fixed(
                v.parse()
                    .map_err(|_| Error::Usage(format!("bad value {v:?} for rejection_cap")))?,
            ),
        };
        let jobs = s.parsed("jobs")?;
        if jobs == Some(0) {
            return Err(Error::Usage("jobs must be at least 1".into()));
        }
        let spec = Self {
            mode,
            n,
            q,
            seed: s.parsed("seed")?.unwrap_or(0),
            runs,
            stop,
            stride,
            tracking,
            out: s
                .one("out")?
                .map_or_else(|| PathBuf::from("out"), PathBuf::from),
            budgets,
            rejection_cap,
            jobs,
            suites: s.list("suite")?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (n, q) in self.pairs() {
            if q < 2 || q > n {
                return Err(Error::Usage(format!(
                    "need 2 <= q <= n, got n = {n}, q = {q}"
                )));
            }
        }
        Ok(())
    }

    /// Every `(n, q)` combination, in the order given.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.n
            .iter()
            .flat_map(|&n| self.q.iter().map(move |&q| (n, q)))
            .collect()
    }

    /// `(n, q, seed)` for every run; seeds are `seed + run index` within each pair.
    pub fn jobs_list(&self) -> Vec<(usize, usize, u64)> {
        self.pairs()
            .into_iter()
            .flat_map(|(n, q)| (0..self.runs).map(move |i| (n, q, self.seed + i)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut s = Settings::parse("mode = sweep\nn = 10\nn = 20, 30  # sizes\nq = 3\nruns = 4\n")
            .unwrap();
        let mut flags = Settings::default();
        flags.push("n", "50").unwrap();
        flags.push("stop", "steps:7").unwrap();
        s.overlay(&flags);
        let spec = ExperimentSpec::from_settings(&s).unwrap();
        assert_eq!(spec.n, vec![50]);
        assert_eq!(spec.stop, StopRule::Steps(7));
        assert_eq!(spec.jobs_list().len(), 4);
        assert_eq!(spec.jobs_list()[3], (50, 3, 3));
    }

    #[test]
    fn list_accumulates() {
        let s = Settings::parse("mode=run\nn=10\nn=20\nq=3,4").unwrap();
        let spec = ExperimentSpec::from_settings(&s).unwrap();
        assert_eq!(spec.pairs(), vec![(10, 3), (10, 4), (20, 3), (20, 4)]);
    }

    #[test]
    fn rejects_bad_specs() {
        for text in [
            "mode=run\nn=3\nq=4",
            "mode=run\nn=10",
            "mode=run\nn=10\nq=3\nruns=0",
            "mode=maximal\nn=10\nq=3\nstop=m0",
            "mode=fly\nn=10\nq=3",
            "mode=run\nn=10\nq=3\ncolour=red",
            "mode=run\nn10",
        ] {
            let r = Settings::parse(text).and_then(|s| ExperimentSpec::from_settings(&s));
            assert!(matches!(r, Err(Error::Usage(_))), "{text:?}");
        }
    }
}
