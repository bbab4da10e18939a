use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::geometry::Point;

/// A point set that attains (or bounds) one of the measured extremes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub points: Vec<Point>,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
}

/// Rows of per-item measurements, e.g. one row per stage of a sweep.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| String::from(*c)).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Measured constants of one audit together with the inequality they are checked against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub name: String,
    pub measured: BTreeMap<String, f64>,
    /// Threshold values and the formula inputs they were computed from.
    pub bound: BTreeMap<String, f64>,
    /// Human-readable form of the checked inequality.
    pub threshold: String,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

impl AuditReport {
    pub fn new(name: &str, threshold: &str) -> Self {
        AuditReport {
            name: name.into(),
            measured: BTreeMap::new(),
            bound: BTreeMap::new(),
            threshold: threshold.into(),
            pass: false,
            witnesses: Vec::new(),
            flags: Vec::new(),
            table: None,
        }
    }

    pub fn measure(&mut self, key: &str, value: f64) -> &mut Self {
        self.measured.insert(key.into(), value);
        self
    }

    pub fn bound(&mut self, key: &str, value: f64) -> &mut Self {
        self.bound.insert(key.into(), value);
        self
    }

    pub fn flag(&mut self, text: &str) -> &mut Self {
        if !self.flags.iter().any(|f| f == text) {
            self.flags.push(text.into());
        }
        self
    }

    pub fn witness(&mut self, label: &str, points: Vec<Point>, value: f64, params: Vec<f64>) -> &mut Self {
        self.witnesses.push(Witness { label: label.into(), points, value, params });
        self
    }

    /// Measured value by key; panics on a missing key (programming error).
    pub fn get(&self, key: &str) -> f64 {
        match self.measured.get(key) {
            Some(v) => *v,
            None => panic!("report {} has no measured value {key}", self.name),
        }
    }

    pub fn has_flag(&self, text: &str) -> bool {
        self.flags.iter().any(|f| f == text)
    }
}
