// key=value settings file. Blank lines and `#` comments are skipped.

use std::path::Path;

use anyhow::{bail, Context, Result};
use histsnark::tree::{DEFAULT_HIST_BUDGET, DEFAULT_HIST_LIMIT};
use histsnark::enumerate::DEFAULT_SHARD_DEPTH;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub hist_limit: usize,
    pub hist_budget: u64,
    pub shard_depth: usize,
    pub jobs: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            hist_limit: DEFAULT_HIST_LIMIT,
            hist_budget: DEFAULT_HIST_BUDGET,
            shard_depth: DEFAULT_SHARD_DEPTH,
            jobs: None,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key=value", no + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: std::num::ParseIntError| anyhow::anyhow!("line {}: {key}: {e}", no + 1);
            match key {
                "hist_limit" => cfg.hist_limit = value.parse().map_err(bad)?,
                "hist_budget" => cfg.hist_budget = value.parse().map_err(bad)?,
                "shard_depth" => cfg.shard_depth = value.parse().map_err(bad)?,
                "jobs" => cfg.jobs = Some(value.parse().map_err(bad)?),
                _ => bail!("line {}: unknown key {key:?}", no + 1),
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let cfg = Config::parse("# budgets\nhist_limit = 5\n\nhist_budget=1000 # nodes\njobs=2\n").unwrap();
        assert_eq!(cfg.hist_limit, 5);
        assert_eq!(cfg.hist_budget, 1000);
        assert_eq!(cfg.jobs, Some(2));
        assert_eq!(cfg.shard_depth, DEFAULT_SHARD_DEPTH);
        assert!(Config::parse("colour=blue").is_err());
        assert!(Config::parse("hist_limit").is_err());
        assert!(Config::parse("hist_limit=-1").is_err());
    }
}
