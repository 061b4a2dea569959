//! Pick a per-frame token level for videos of different lengths under the default budget.
//!
//! cargo run --example video_budget

use vlplan::videoplan::{level_to_dims, plan_video, SamplingPolicy, TaskKind};

fn main() -> vlplan::Result<()> {
    let policy = SamplingPolicy::default();
    println!("budget {} levels {:?}\n", policy.budget, policy.levels);
    for (duration, task) in [
        (0.3, TaskKind::General),
        (100.0, TaskKind::General),
        (200.0, TaskKind::General),
        (60.0, TaskKind::DenseMotion),
        (1000.0, TaskKind::General),
    ] {
        let fps = policy.fps_for(task);
        let plan = plan_video(duration, fps, &policy)?;
        let (fw, fh) = level_to_dims(plan.level, 16.0 / 9.0)?;
        println!(
            "{duration:>7}s {task:?} @ {fps} fps: {} frames x level {} ({fw}x{fh} px frames) = {} tokens{}",
            plan.frame_count,
            plan.level,
            plan.total_tokens,
            if plan.fallback_applied { ", subsampled" } else { "" },
        );
        let ts = plan.timestamp_tokens();
        println!("    first {:?} last {:?}", ts.first().unwrap(), ts.last().unwrap());
    }
    Ok(())
}
