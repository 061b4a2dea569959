//! Snap a few image sizes to the patch grid and print their token and FLOP cost.
//!
//! cargo run --example plan_images

use vlplan::geometry::{flops_cost, plan_image, CostModel};

fn main() -> vlplan::Result<()> {
    let model = CostModel::default();
    println!("{:>11} {:>11} {:>9} {:>7} {:>12}", "native", "target", "patches", "tokens", "GFLOPs");
    for (w, h) in [(1000, 750), (640, 480), (1920, 1080), (13, 4000), (28, 28)] {
        let p = plan_image(w, h)?;
        println!(
            "{:>11} {:>11} {:>9} {:>7} {:>12.2}",
            format!("{w}x{h}"),
            format!("{}x{}", p.target_w, p.target_h),
            p.patch_count,
            p.token_count,
            flops_cost(&model, p.patch_count) / 1e9,
        );
    }
    Ok(())
}
