//! Greedy balancing of encoder work across devices.
//!
//! Items are sorted by cost, largest first, and each is placed on the device
//! with the lowest running load (longest-processing-time scheduling). Group
//! balancing splits the devices into contiguous groups and only moves items
//! within the group that loaded them.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkItem {
    pub id: String,
    /// FLOPs needed to encode the item.
    pub cost: f64,
    /// Device that loaded the item.
    pub origin_rank: usize,
}

impl WorkItem {
    pub fn new(id: impl Into<String>, cost: f64, origin_rank: usize) -> Self {
        WorkItem {
            id: id.into(),
            cost,
            origin_rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// Item ids per device, in placement order.
    pub devices: Vec<Vec<String>>,
    pub loads: Vec<f64>,
}

impl Assignment {
    fn empty(m: usize) -> Self {
        Assignment {
            devices: vec![Vec::new(); m],
            loads: vec![0.0; m],
        }
    }

    pub fn device_count(&self) -> usize {
        self.devices.len()
    }

    pub fn makespan(&self) -> f64 {
        self.loads.iter().copied().fold(0.0, f64::max)
    }

    /// Device holding `id`, if assigned.
    pub fn device_of(&self, id: &str) -> Option<usize> {
        self.devices
            .iter()
            .position(|d| d.iter().any(|i| i == id))
    }
}

fn check_items(items: &[WorkItem]) -> Result<()> {
    match items.iter().find(|it| !(it.cost.is_finite() && it.cost > 0.0)) {
        Some(it) => Err(Error::invalid(format!(
            "item `{}` has non-positive cost {}",
            it.id, it.cost
        ))),
        None => Ok(()),
    }
}

fn by_cost_desc(a: &&WorkItem, b: &&WorkItem) -> Ordering {
    b.cost.total_cmp(&a.cost).then_with(|| a.id.cmp(&b.id))
}

fn lpt(items: &[&WorkItem], m: usize) -> Assignment {
    let mut sorted = items.to_vec();
    sorted.sort_by(by_cost_desc);

    let mut out = Assignment::empty(m);
    let mut heap: BinaryHeap<Reverse<(OrderedFloat<f64>, usize)>> =
        (0..m).map(|d| Reverse((OrderedFloat(0.0), d))).collect();
    for item in sorted {
        let Reverse((load, d)) = heap.pop().expect("m >= 1");
        let load = load.0 + item.cost;
        out.devices[d].push(item.id.clone());
        out.loads[d] = load;
        heap.push(Reverse((OrderedFloat(load), d)));
    }
    out
}

pub fn balance_lpt(items: &[WorkItem], m: usize) -> Result<Assignment> {
    if m == 0 {
        return Err(Error::invalid("device count must be at least 1"));
    }
    check_items(items)?;
    let refs: Vec<&WorkItem> = items.iter().collect();
    Ok(lpt(&refs, m))
}

pub fn group_balance(items: &[WorkItem], m: usize, group_size: usize) -> Result<Assignment> {
    if m == 0 {
        return Err(Error::invalid("device count must be at least 1"));
    }
    if group_size == 0 || m % group_size != 0 {
        return Err(Error::invalid(format!(
            "group size {group_size} does not divide device count {m}"
        )));
    }
    check_items(items)?;
    if let Some(it) = items.iter().find(|it| it.origin_rank >= m) {
        return Err(Error::invalid(format!(
            "item `{}` has origin rank {} but only {m} devices exist",
            it.id, it.origin_rank
        )));
    }

    let groups = m / group_size;
    let mut buckets: Vec<Vec<&WorkItem>> = vec![Vec::new(); groups];
    for it in items {
        buckets[it.origin_rank / group_size].push(it);
    }
    let parts: Vec<Assignment> = buckets
        .par_iter()
        .map(|bucket| lpt(bucket, group_size))
        .collect();

    let mut out = Assignment {
        devices: Vec::with_capacity(m),
        loads: Vec::with_capacity(m),
    };
    for part in parts {
        out.devices.extend(part.devices);
        out.loads.extend(part.loads);
    }
    Ok(out)
}

/// Max device load over mean device load.
pub fn imbalance(a: &Assignment) -> Result<f64> {
    if a.loads.is_empty() {
        return Err(Error::UndefinedMetric("assignment has no devices".into()));
    }
    let total: f64 = a.loads.iter().sum();
    if total <= 0.0 {
        return Err(Error::UndefinedMetric("all device loads are zero".into()));
    }
    let mean = total / a.loads.len() as f64;
    Ok(a.makespan() / mean)
}
