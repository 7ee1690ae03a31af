//! Aggregation of sweep records: descriptive statistics per algorithm,
//! factor-wise ANOVA, and file export.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use biomap_core::stats::{anova_oneway, describe, AnovaResult, StatsError};

use crate::config::Algorithm;
use crate::sweep::{ExperimentRecord, TimingRecord};

/// One row of the comparison table: pooled over every evaluation
/// episode of every record of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub episodes: usize,
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub variance: f64,
}

pub fn summarize_by_algorithm(records: &[ExperimentRecord]) -> Result<Vec<AlgorithmSummary>> {
    let mut grouped: BTreeMap<Algorithm, (usize, Vec<f64>)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.error.is_none()) {
        let entry = grouped.entry(r.algorithm).or_default();
        entry.0 += 1;
        entry.1.extend_from_slice(&r.rewards);
    }
    let mut out = Vec::new();
    for (algorithm, (runs, rewards)) in grouped {
        let d = describe(&rewards)
            .map_err(|e| anyhow::anyhow!("{algorithm:?} has no successful episodes: {e}"))?;
        out.push(AlgorithmSummary {
            algorithm,
            runs,
            episodes: d.n,
            mean: d.mean,
            max: d.max,
            min: d.min,
            variance: d.variance,
        });
    }
    Ok(out)
}

/// Experimental dimension an ANOVA can be sliced along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Algorithm,
    Direction,
    Count,
    Continuity,
    Layers,
}

impl std::str::FromStr for Factor {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "algorithm" => Ok(Factor::Algorithm),
            "direction" => Ok(Factor::Direction),
            "count" => Ok(Factor::Count),
            "continuity" => Ok(Factor::Continuity),
            "layers" => Ok(Factor::Layers),
            other => bail!(
                "unknown factor '{other}' (expected algorithm, direction, count, continuity, or layers)"
            ),
        }
    }
}

fn level_of(record: &ExperimentRecord, factor: Factor) -> String {
    match factor {
        Factor::Algorithm => record.algorithm.name().to_string(),
        Factor::Direction => format!("{:?}", record.mask.direction).to_lowercase(),
        Factor::Count => record.mask.count.to_string(),
        Factor::Continuity => record.mask.continuity.to_string(),
        Factor::Layers => record.mask.layers.to_string(),
    }
}

/// ANOVA over one factor, or the reason it cannot be computed. A factor
/// with no reward spread at all (the expected benchmark outcome: every
/// run scores -2) is reported as degenerate, not as significance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorAnova {
    pub factor: Factor,
    /// (level, record count) pairs in level order.
    pub levels: Vec<(String, usize)>,
    pub result: Option<AnovaResult>,
    pub degenerate: Option<String>,
}

pub fn anova_by_factor(records: &[ExperimentRecord], factor: Factor) -> Result<FactorAnova> {
    let mut grouped: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.error.is_none()) {
        grouped.entry(level_of(r, factor)).or_default().push(r.mean);
    }
    let levels: Vec<(String, usize)> = grouped.iter().map(|(k, v)| (k.clone(), v.len())).collect();
    let groups: Vec<Vec<f64>> = grouped.into_values().collect();
    if groups.len() < 2 {
        return Ok(FactorAnova {
            factor,
            levels,
            result: None,
            degenerate: Some("factor has fewer than two levels".into()),
        });
    }
    match anova_oneway(&groups) {
        Ok(result) => Ok(FactorAnova {
            factor,
            levels,
            result: Some(result),
            degenerate: None,
        }),
        Err(e @ (StatsError::DegenerateVariance | StatsError::BadParameter(_))) => {
            Ok(FactorAnova {
                factor,
                levels,
                result: None,
                degenerate: Some(e.to_string()),
            })
        }
        Err(e) => bail!("anova over {factor:?} failed: {e}"),
    }
}

pub fn write_records_json(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let text = serde_json::to_string_pretty(records)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_records_json(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_timings_json(path: &Path, timings: &[TimingRecord]) -> Result<()> {
    let text = serde_json::to_string_pretty(timings)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// One CSV row per algorithm, mirroring the comparison-table columns.
pub fn write_summary_csv(path: &Path, summaries: &[AlgorithmSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_record(["algorithm", "runs", "episodes", "mean", "max", "min", "variance"])?;
    for s in summaries {
        w.write_record([
            s.algorithm.name().to_string(),
            s.runs.to_string(),
            s.episodes.to_string(),
            s.mean.to_string(),
            s.max.to_string(),
            s.min.to_string(),
            s.variance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use biomap_core::{MaskConfig, MaskDirection};

    fn record(id: &str, algorithm: Algorithm, layers: u8, mean: f64) -> ExperimentRecord {
        ExperimentRecord {
            setting_id: id.into(),
            mask: MaskConfig {
                direction: MaskDirection::Column,
                count: 2,
                continuity: false,
                layers,
            },
            algorithm,
            seed: 0,
            rewards: vec![mean],
            mean,
            max: mean,
            min: mean,
            variance: 0.0,
            deterministic: Some(true),
            error: None,
        }
    }

    #[test]
    fn summary_pools_rewards_per_algorithm() {
        let records = vec![
            record("a", Algorithm::Biomap, 0, -2.0),
            record("b", Algorithm::Biomap, 5, -2.0),
            record("a", Algorithm::Qmdp, 0, -2.0),
        ];
        let s = summarize_by_algorithm(&records).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].algorithm, Algorithm::Biomap);
        assert_eq!(s[0].runs, 2);
        assert_eq!(s[0].mean, -2.0);
        assert_eq!(s[0].variance, 0.0);
    }

    #[test]
    fn constant_rewards_make_anova_degenerate() {
        let records = vec![
            record("a", Algorithm::Biomap, 0, -2.0),
            record("b", Algorithm::Biomap, 5, -2.0),
        ];
        let a = anova_by_factor(&records, Factor::Layers).unwrap();
        assert_eq!(a.levels.len(), 2);
        assert!(a.result.is_none());
        assert!(a.degenerate.is_some());
    }

    #[test]
    fn varied_rewards_yield_a_p_value() {
        let records = vec![
            record("a", Algorithm::Biomap, 0, -2.0),
            record("b", Algorithm::Biomap, 0, -3.0),
            record("c", Algorithm::Biomap, 5, -4.0),
            record("d", Algorithm::Biomap, 5, -6.0),
        ];
        let a = anova_by_factor(&records, Factor::Layers).unwrap();
        let r = a.result.unwrap();
        assert!(r.f > 0.0);
        assert!((0.0..=1.0).contains(&r.p));
    }

    #[test]
    fn single_level_factor_is_reported_not_crashed() {
        let records = vec![record("a", Algorithm::Biomap, 0, -2.0)];
        let a = anova_by_factor(&records, Factor::Direction).unwrap();
        assert!(a.result.is_none());
    }

    #[test]
    fn factor_parsing() {
        assert_eq!("layers".parse::<Factor>().unwrap(), Factor::Layers);
        assert_eq!(" Algorithm ".parse::<Factor>().unwrap(), Factor::Algorithm);
        assert!("flavor".parse::<Factor>().is_err());
    }
}
