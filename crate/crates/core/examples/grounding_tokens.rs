//! Turn pixel boxes into grid tokens and read them back out of model text.
//!
//! cargo run --example grounding_tokens

use vlplan::grounding::{denormalize, emit_region, normalize_box, normalize_point, parse_region, parse_regions, PixelBox, Region};

fn main() -> vlplan::Result<()> {
    let (w, h) = (1280, 720);
    let b = normalize_box(&PixelBox { x1: 100.0, y1: 50.0, x2: 640.0, y2: 700.0 }, w, h)?;
    let p = normalize_point(1279.0, 0.0, w, h)?;
    let text = format!(
        "The dog is at {} and the bird at {}.",
        emit_region(&Region::Box(b)),
        emit_region(&Region::Point(p)),
    );
    println!("{text}");

    for r in parse_regions(&text)? {
        if let Region::Box(b) = r {
            println!(
                "box back in pixels: ({:.1}, {:.1}) - ({:.1}, {:.1})",
                denormalize(b.x1, w),
                denormalize(b.y1, h),
                denormalize(b.x2, w),
                denormalize(b.y2, h),
            );
        }
    }

    let r = parse_region("<3dbbox>0.5 -1 4.25 1.2 0.8 2 0 0 1.5708</3dbbox>")?;
    println!("{r}");

    for bad in ["<point>1000 5</point>", "<bbox>10 20 30</bbox>", "<bbox>01 2 3 4</bbox>"] {
        println!("{bad:<24} -> {}", parse_region(bad).unwrap_err());
    }
    Ok(())
}
