//! Pack variable-length sequences into fixed-length rows and show the mask.
//!
//! cargo run --example pack_sequences

use vlplan::packer::{pack_ffd, PackItem};

fn main() -> vlplan::Result<()> {
    let items: Vec<PackItem> = [("a", 5), ("b", 3), ("c", 4), ("d", 2), ("e", 6), ("f", 1)]
        .into_iter()
        .map(|(id, len)| PackItem::new(id, len))
        .collect();
    let plan = pack_ffd(&items, 8)?;
    for (i, bin) in plan.bins.iter().enumerate() {
        let ids: Vec<&str> = bin.items.iter().map(|it| it.id.as_str()).collect();
        println!("bin {i}: {ids:?} offsets {:?} free {}", bin.offsets, plan.free(i).unwrap_or(0));
    }

    let bin = &plan.bins[0];
    let n = bin.used();
    let mask = bin.attention_mask();
    println!("\nmask of bin 0:");
    for r in 0..n {
        let row: String = (0..n).map(|c| if mask[r * n + c] { '#' } else { '.' }).collect();
        println!("  {row}");
    }
    Ok(())
}
