//! Compare naive and single-reader data loading for a few parallel layouts.
//!
//! cargo run --example io_simulation

use vlplan::balancer::{balance_lpt, WorkItem};
use vlplan::geometry::plan_image;
use vlplan::loadsim::{simulate_io, simulate_io_assigned, Topology};

fn main() -> vlplan::Result<()> {
    let images = [(1920, 1080), (640, 480), (1024, 1024), (300, 1200), (2000, 3000), (512, 512)]
        .iter()
        .map(|&(w, h)| plan_image(w, h))
        .collect::<vlplan::Result<Vec<_>>>()?;
    let bytes: Vec<u64> = images.iter().map(|p| p.rgb_bytes()).collect();
    let per_rank = 64 << 20;

    for (dp, pp, tp) in [(1, 1, 1), (2, 4, 1), (4, 2, 2)] {
        let t = Topology::new(dp, pp, tp)?;
        let r = simulate_io(&t, per_rank, &bytes)?;
        println!(
            "dp={dp} pp={pp} tp={tp}: reads {} -> {} MiB, {} broadcasts, PCIe {} -> {} bytes",
            r.naive_read_bytes >> 20,
            r.optimized_read_bytes >> 20,
            r.broadcast_messages,
            r.pcie_bytes_before_filter,
            r.pcie_bytes_after_filter,
        );
    }

    let t = Topology::new(2, 2, 1)?;
    let ids: Vec<String> = (0..bytes.len()).map(|i| format!("img{i}")).collect();
    let work: Vec<WorkItem> = ids.iter().zip(&bytes).map(|(id, &b)| WorkItem::new(id.clone(), b as f64, 0)).collect();
    let a = balance_lpt(&work, t.world() as usize)?;
    let r = simulate_io_assigned(&t, per_rank, &bytes, &ids, &a)?;
    println!("\nbalanced partition over 4 devices: {:?}", r.pcie_bytes_per_device);
    Ok(())
}
