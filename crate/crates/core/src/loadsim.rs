//! Read and transfer volumes of a parallelism-aware data loader.
//!
//! Ranks that share a data-parallel replica (its pipeline and tensor peers)
//! consume the same samples. Naively every rank reads them; the optimized
//! loader has one reader per replica that broadcasts metadata to its peers.
//! The encoder runs purely data-parallel, so each device only needs its own
//! share of images and the rest are dropped before the host-to-device copy.

use serde::{Deserialize, Serialize};

use crate::balancer::Assignment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    pub dp: u64,
    pub pp: u64,
    pub tp: u64,
}

impl Topology {
    pub fn new(dp: u64, pp: u64, tp: u64) -> Result<Self> {
        if dp == 0 || pp == 0 || tp == 0 {
            return Err(Error::invalid(format!(
                "parallel widths must be positive, got dp={dp} pp={pp} tp={tp}"
            )));
        }
        Ok(Topology { dp, pp, tp })
    }

    pub fn world(&self) -> u64 {
        self.dp * self.pp * self.tp
    }

    /// Ranks that consume the same samples.
    pub fn replica_size(&self) -> u64 {
        self.pp * self.tp
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IoReport {
    pub naive_read_bytes: u64,
    pub optimized_read_bytes: u64,
    pub broadcast_messages: u64,
    /// Host-to-device bytes if every device copied every image.
    pub pcie_bytes_before_filter: u64,
    /// Host-to-device bytes after each device drops images it does not own.
    pub pcie_bytes_after_filter: u64,
    pub pcie_bytes_per_device: Vec<u64>,
    /// IO is overlapped with compute by a prefetcher; no timeline is modeled.
    pub prefetch_overlap: bool,
}

/// Simulate with images dealt to devices round-robin.
pub fn simulate_io(t: &Topology, bytes_per_dp_rank: u64, image_bytes: &[u64]) -> Result<IoReport> {
    let world = check(t)?;
    let owner: Vec<usize> = (0..image_bytes.len()).map(|i| i % world).collect();
    Ok(report(t, bytes_per_dp_rank, image_bytes, &owner))
}

/// Simulate with images placed by a balancer assignment. `ids[i]` names image
/// `i` inside the assignment, which must span the whole world.
pub fn simulate_io_assigned(
    t: &Topology,
    bytes_per_dp_rank: u64,
    image_bytes: &[u64],
    ids: &[String],
    assignment: &Assignment,
) -> Result<IoReport> {
    let world = check(t)?;
    if assignment.device_count() != world {
        return Err(Error::invalid(format!(
            "assignment covers {} devices, topology has {world}",
            assignment.device_count()
        )));
    }
    if ids.len() != image_bytes.len() {
        return Err(Error::invalid("one id is needed per image"));
    }
    let lookup: std::collections::HashMap<&str, usize> = assignment
        .devices
        .iter()
        .enumerate()
        .flat_map(|(d, list)| list.iter().map(move |id| (id.as_str(), d)))
        .collect();
    let owner = ids
        .iter()
        .map(|id| {
            lookup
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::invalid(format!("image `{id}` is not in the assignment")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(t, bytes_per_dp_rank, image_bytes, &owner))
}

fn check(t: &Topology) -> Result<usize> {
    Topology::new(t.dp, t.pp, t.tp)?;
    usize::try_from(t.world()).map_err(|_| Error::invalid("world size overflows"))
}

fn report(t: &Topology, bytes_per_dp_rank: u64, image_bytes: &[u64], owner: &[usize]) -> IoReport {
    let world = t.world();
    let mut per_device = vec![0u64; world as usize];
    for (&bytes, &d) in image_bytes.iter().zip(owner) {
        per_device[d] += bytes;
    }
    let total: u64 = image_bytes.iter().sum();
    IoReport {
        naive_read_bytes: world * bytes_per_dp_rank,
        optimized_read_bytes: t.dp * bytes_per_dp_rank,
        broadcast_messages: t.dp * (t.replica_size() - 1),
        pcie_bytes_before_filter: world * total,
        pcie_bytes_after_filter: per_device.iter().sum(),
        pcie_bytes_per_device: per_device,
        prefetch_overlap: true,
    }
}
