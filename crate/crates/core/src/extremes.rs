//! Extreme-event extraction from gridded observation series.
//!
//! Observations are read from CSV with header `x,y,t,variable,value` (or
//! `x,t,variable,value`). `t` is either a real number or a `YYYY-MM-DD`
//! date, which is converted to days since 1970-01-01.
//!
//! Per variable, the empirical `q` quantile is the order statistic of rank
//! `ceil(q · n)` over all of that variable's values. Observations strictly
//! above the upper quantile become `High-<var>` events and observations at
//! or below the lower quantile become `Low-<var>` events.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::io::{open, parse_err, parse_f64, record_line};
use crate::model::{EventDataset, EventInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub location: Vec<f64>,
    pub time: f64,
    pub variable: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeParams {
    pub q_lo: f64,
    pub q_hi: f64,
    /// Variables that get no `Low-` events.
    pub suppress_low: BTreeSet<String>,
}

impl ExtremeParams {
    pub fn new(q_lo: f64, q_hi: f64) -> Result<Self> {
        if !(0.0 < q_lo && q_lo < q_hi && q_hi < 1.0) {
            return Err(Error::invalid(format!(
                "quantiles must satisfy 0 < q_lo < q_hi < 1 (q_lo={q_lo}, q_hi={q_hi})"
            )));
        }
        Ok(ExtremeParams {
            q_lo,
            q_hi,
            suppress_low: BTreeSet::new(),
        })
    }

    pub fn suppress_low(mut self, variable: impl Into<String>) -> Self {
        self.suppress_low.insert(variable.into());
        self
    }
}

/// Order statistic of rank `ceil(q · n)` (1-based, clamped to `1..=n`).
pub fn empirical_quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("quantile {q} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // The small slack keeps q·n from rounding up past an exact integer.
    let rank = ((q * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    Ok(sorted[rank - 1])
}

/// Real number or `YYYY-MM-DD` date as days since 1970-01-01.
pub fn parse_time(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let date = NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()?;
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1)?;
    Some((date - epoch).num_days() as f64)
}

pub fn read_observations(path: impl AsRef<Path>) -> Result<Vec<Observation>> {
    let path = path.as_ref();
    parse_observations(open(path)?, path)
}

pub fn parse_observations<R: Read>(reader: R, source: &Path) -> Result<Vec<Observation>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let dim = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "t", "variable", "value"] => 1,
        ["x", "y", "t", "variable", "value"] => 2,
        _ => {
            return Err(parse_err(
                source,
                1,
                format!("expected header x,y,t,variable,value or x,t,variable,value, got {}", header.join(",")),
            ))
        }
    };
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record_line(&record);
        if record.len() != dim + 3 {
            return Err(parse_err(source, line, format!("expected {} fields, got {}", dim + 3, record.len())));
        }
        let location = (0..dim)
            .map(|k| parse_f64(source, line, &header[k], &record[k]))
            .collect::<Result<Vec<_>>>()?;
        let time = parse_time(&record[dim])
            .ok_or_else(|| parse_err(source, line, format!("t: not a number or date: {:?}", &record[dim])))?;
        let variable = record[dim + 1].to_string();
        if variable.is_empty() {
            return Err(parse_err(source, line, "variable: empty"));
        }
        let value = parse_f64(source, line, "value", &record[dim + 2])?;
        out.push(Observation {
            location,
            time,
            variable,
            value,
        });
    }
    Ok(out)
}

/// Turns observations into High/Low events. Event ids are `e<k>` in input
/// order. The embedding space is the bounding box of the emitted events.
pub fn extract_extremes(observations: &[Observation], params: &ExtremeParams) -> Result<EventDataset> {
    let Some(first) = observations.first() else {
        return Err(Error::EmptySeries);
    };
    let dim = first.location.len();
    let mut by_var: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for o in observations {
        if o.location.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: o.location.len(),
            });
        }
        by_var.entry(o.variable.as_str()).or_default().push(o.value);
    }
    let mut thresholds = BTreeMap::new();
    for (var, values) in &by_var {
        let lo = empirical_quantile(values, params.q_lo)?;
        let hi = empirical_quantile(values, params.q_hi)?;
        thresholds.insert(*var, (lo, hi));
    }

    let mut instances = Vec::new();
    for o in observations {
        let (lo, hi) = thresholds[o.variable.as_str()];
        let kind = if o.value > hi {
            "High"
        } else if o.value <= lo && !params.suppress_low.contains(&o.variable) {
            "Low"
        } else {
            continue;
        };
        let id = format!("e{}", instances.len() + 1);
        instances.push(EventInstance::new(
            id,
            format!("{kind}-{}", o.variable),
            &o.location,
            o.time,
        ));
    }
    EventDataset::from_instances(dim, instances)
}
