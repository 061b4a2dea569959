//! Spread vision encoder work across devices, globally and within fixed groups.
//!
//! cargo run --example balance_workload

use vlplan::balancer::{balance_lpt, group_balance, imbalance, WorkItem};
use vlplan::geometry::{flops_cost, plan_image, CostModel};

fn main() -> vlplan::Result<()> {
    let model = CostModel::default();
    let sizes = [(1920, 1080), (640, 480), (3000, 2000), (224, 224), (1024, 1024), (800, 600), (300, 1200), (512, 512)];
    let items = sizes
        .iter()
        .enumerate()
        .map(|(i, &(w, h))| {
            let p = plan_image(w, h)?;
            Ok(WorkItem::new(format!("img{i}"), flops_cost(&model, p.patch_count), i % 4))
        })
        .collect::<vlplan::Result<Vec<_>>>()?;

    let global = balance_lpt(&items, 4)?;
    let grouped = group_balance(&items, 4, 2)?;
    for (name, a) in [("global", &global), ("groups of 2", &grouped)] {
        println!("{name}: imbalance {:.4}", imbalance(a)?);
        for (d, ids) in a.devices.iter().enumerate() {
            println!("  device {d}: {:>8.1} GFLOPs {ids:?}", a.loads[d] / 1e9);
        }
    }
    Ok(())
}
