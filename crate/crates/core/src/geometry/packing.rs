use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::metric::separation;
use super::{Rect, Region};
use crate::error::{Error, Result};

/// Generator parameter value as recorded in packing metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Num(f64),
    List(Vec<f64>),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PackingMeta {
    pub generator: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl PackingMeta {
    pub fn new(generator: &str) -> Self {
        PackingMeta { generator: generator.into(), params: BTreeMap::new(), seed: None }
    }

    pub fn with(mut self, key: &str, value: ParamValue) -> Self {
        self.params.insert(key.into(), value);
        self
    }
}

/// Pairwise-disjoint regions inside a rectangular computation window.
///
/// `outer`, when present, is the boundary of the ambient open set (e.g. the
/// enclosing circle of a gasket); points outside it are not part of the residual set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Packing {
    pub domain: Rect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<Region>,
    pub regions: Vec<Region>,
    pub meta: PackingMeta,
}

/// Outcome of [`Packing::certify`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Certificate {
    /// Indices of regions whose bounding box leaves the domain window.
    pub boundary_crossing: Vec<usize>,
    /// Number of pairs that needed the support-function separation test.
    pub pairs_tested: usize,
}

impl Packing {
    pub fn new(domain: Rect, regions: Vec<Region>, meta: PackingMeta) -> Self {
        Packing { domain, outer: None, regions, meta }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn boundary_crossing(&self, i: usize) -> bool {
        !self.domain.contains_rect(&self.regions[i].bbox(), 1e-12 * self.domain.diagonal())
    }

    pub fn is_sorted_by_diameter(&self) -> bool {
        self.first_unsorted().is_none()
    }

    /// First index breaking the non-increasing diameter order.
    pub fn first_unsorted(&self) -> Option<usize> {
        // Equal sizes built along different paths differ in the last bits.
        self.regions.windows(2).position(|w| w[0].diam() < w[1].diam() * (1.0 - 1e-12)).map(|i| i + 1)
    }

    /// Stable sort by decreasing diameter.
    pub fn sort_by_diameter(&mut self) {
        self.regions.sort_by(|a, b| b.diam().partial_cmp(&a.diam()).unwrap());
    }

    /// Copy keeping only the first `n` regions.
    pub fn prefix(&self, n: usize) -> Packing {
        let mut p = self.clone();
        p.regions.truncate(n);
        p
    }

    pub fn diameters(&self) -> Vec<f64> {
        self.regions.iter().map(Region::diam).collect()
    }

    /// Checks pairwise disjointness of interiors and records boundary-crossing regions.
    ///
    /// Disks are compared by centre distance; other pairs need a separating direction
    /// whose gap is at least `-1e-9 · min(diam)`.
    pub fn certify(&self) -> Result<Certificate> {
        if !self.domain.is_valid() {
            return Err(Error::NotAPacking("domain rectangle is degenerate".into()));
        }
        let mut cert = Certificate {
            boundary_crossing: (0..self.len()).filter(|&i| self.boundary_crossing(i)).collect(),
            ..Certificate::default()
        };
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.regions[a].bbox().x0.partial_cmp(&self.regions[b].bbox().x0).unwrap());
        let mut active: Vec<usize> = Vec::new();
        for &i in &order {
            let bi = self.regions[i].bbox();
            active.retain(|&j| self.regions[j].bbox().x1 > bi.x0);
            for &j in &active {
                if !self.regions[j].bbox().interiors_overlap(&bi) {
                    continue;
                }
                let (a, b) = (i.min(j), i.max(j));
                if !disjoint(&self.regions[a], &self.regions[b], &mut cert.pairs_tested) {
                    return Err(Error::NotAPacking(format!("regions {a} and {b} overlap")));
                }
            }
            active.push(i);
        }
        Ok(cert)
    }
}

/// Interiors of `a` and `b` are disjoint, up to the certification tolerance.
pub fn regions_disjoint(a: &Region, b: &Region) -> bool {
    let mut n = 0;
    disjoint(a, b, &mut n)
}

fn disjoint(a: &Region, b: &Region, tested: &mut usize) -> bool {
    if !a.bbox().interiors_overlap(&b.bbox()) {
        return true;
    }
    if let (Some((c1, r1)), Some((c2, r2))) = (a.as_circle(), b.as_circle()) {
        let tol = (1e-10 * (r1 + r2)).max(1e-12);
        return c1.dist(c2) >= r1 + r2 - tol;
    }
    *tested += 1;
    let (gap, _) = separation(a, b);
    gap >= -1e-9 * a.diam().min(b.diam())
}
