//! Attention scores under 2D RoPE depend only on the offset between patches.
//!
//! cargo run --example rope_relative

use vlplan::rope2d::{rope_dot, rope_rotate, PatchPosition, RopeParams};

fn main() -> vlplan::Result<()> {
    let params = RopeParams::with_head_dim(8)?;
    let q = [0.3, -1.2, 0.8, 0.1, -0.5, 0.9, 1.1, -0.4];
    let k = [1.0, 0.2, -0.7, 0.6, 0.4, -0.3, 0.05, 0.9];

    println!("frequencies: {:?}", params.frequencies());
    println!("identity at origin: {}", rope_rotate(&q, PatchPosition::new(0, 0), &params)? == q);

    // same (dx, dy) = (3, -2) at different absolute positions
    for (x, y) in [(0u32, 5u32), (10, 20), (100, 7)] {
        let s = rope_dot(&q, &k, PatchPosition::new(x + 3, y), PatchPosition::new(x, y + 2), &params)?;
        println!("q at ({:>3},{:>2}) k at ({:>3},{:>2}): {s:.12}", x + 3, y, x, y + 2);
    }
    Ok(())
}
