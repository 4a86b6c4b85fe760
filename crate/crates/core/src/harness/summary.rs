//! Cross-replication statistics of final combined fitness (`summary.csv`).

use std::path::{Path, PathBuf};

use super::curve::FitnessCurve;
use crate::error::{Error, Result};

pub const SUMMARY_HEADER: &str = "config,n,mean,std,min,q1,median,q3,max";

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub config: String,
    pub n: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear interpolation between order statistics at `p · (n − 1)`.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl SummaryStats {
    pub fn from_values(config: &str, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Usage("cannot summarize zero values".into()));
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(SummaryStats {
            config: config.to_string(),
            n,
            mean,
            std: var.sqrt(),
            min: sorted[0],
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q3: quantile(&sorted, 0.75),
            max: sorted[n - 1],
        })
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{SUMMARY_HEADER}\n{},{},{},{},{},{},{},{},{}\n",
            self.config,
            self.n,
            self.mean,
            self.std,
            self.min,
            self.q1,
            self.median,
            self.q3,
            self.max
        )
    }
}

/// Final-generation combined fitness of each curve file.
pub fn final_fitness(files: &[PathBuf]) -> Result<Vec<f64>> {
    files
        .iter()
        .map(|f| {
            let curve = FitnessCurve::read(f)?;
            curve
                .last()
                .map(|r| r.combined)
                .ok_or_else(|| Error::parse(f, 2, "curve file has no data rows"))
        })
        .collect()
}

pub fn summarize(files: &[PathBuf], config: &str) -> Result<SummaryStats> {
    if files.is_empty() {
        return Err(Error::Usage(
            "summarize needs at least one curve file".into(),
        ));
    }
    SummaryStats::from_values(config, &final_fitness(files)?)
}

pub fn write_summary(path: &Path, stats: &SummaryStats) -> Result<()> {
    std::fs::write(path, stats.to_csv()).map_err(|e| Error::io(path, e))
}

/// `fitness_gen_r*.csv` files in `dir`, ordered by replication index.
pub fn curve_files_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut found: Vec<(u64, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let index = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_prefix("fitness_gen_r"))
            .and_then(|n| n.strip_suffix(".csv"))
            .and_then(|n| n.parse().ok());
        if let Some(r) = index {
            found.push((r, path));
        }
    }
    found.sort();
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_statistics() {
        let s = SummaryStats::from_values("x", &[30.0, 10.0, 20.0]).unwrap();
        assert_eq!(s.mean, 20.0);
        assert!((s.std - 8.164_965_809_277_26).abs() < 1e-12);
        assert_eq!(
            (s.min, s.q1, s.median, s.q3, s.max),
            (10.0, 15.0, 20.0, 25.0, 30.0)
        );
    }

    #[test]
    fn single_value() {
        let s = SummaryStats::from_values("strategy1", &[1137.19]).unwrap();
        assert_eq!(s.mean, 1137.19);
        assert_eq!(s.std, 0.0);
        assert_eq!(s.q1, 1137.19);
        assert_eq!(
            s.to_csv(),
            "config,n,mean,std,min,q1,median,q3,max\nstrategy1,1,1137.19,0,1137.19,1137.19,1137.19,1137.19,1137.19\n"
        );
    }

    #[test]
    fn empty_is_an_error() {
        assert!(SummaryStats::from_values("x", &[]).is_err());
        assert!(summarize(&[], "x").is_err());
    }
}
