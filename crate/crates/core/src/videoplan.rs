//! Frame-rate and per-frame resolution planning for videos under a fixed
//! visual token budget.
//!
//! The frame rate follows the task. The per-frame token level is the largest
//! level that fits every sampled frame into the budget. When even the
//! smallest level does not fit, frames are thinned by uniform striding so the
//! whole duration stays covered.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CELL_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// General understanding.
    General,
    /// Tasks that need finer temporal detail.
    TemporalDetail,
    /// Counting and motion tracking.
    DenseMotion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingPolicy {
    pub default_fps: f64,
    pub detailed_fps: f64,
    pub dense_fps: f64,
    /// Visual tokens allowed per video, after pooling.
    pub budget: u64,
    /// Tokens-per-frame levels, strictly descending.
    pub levels: Vec<u64>,
}

pub const DEFAULT_BUDGET: u64 = 81_920;
pub const DEFAULT_LEVELS: [u64; 6] = [640, 512, 384, 256, 160, 128];

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy {
            default_fps: 1.0,
            detailed_fps: 2.0,
            dense_fps: 5.0,
            budget: DEFAULT_BUDGET,
            levels: DEFAULT_LEVELS.to_vec(),
        }
    }
}

impl SamplingPolicy {
    pub fn validate(&self) -> Result<()> {
        for fps in [self.default_fps, self.detailed_fps, self.dense_fps] {
            if !(fps.is_finite() && fps > 0.0) {
                return Err(Error::invalid(format!("fps must be positive, got {fps}")));
            }
        }
        let Some(&smallest) = self.levels.last() else {
            return Err(Error::invalid("policy needs at least one level"));
        };
        if smallest == 0 || self.levels.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::invalid(format!(
                "levels must be positive and strictly descending, got {:?}",
                self.levels
            )));
        }
        if self.budget < smallest {
            return Err(Error::invalid(format!(
                "budget {} is below the smallest level {smallest}",
                self.budget
            )));
        }
        Ok(())
    }

    pub fn fps_for(&self, task: TaskKind) -> f64 {
        match task {
            TaskKind::General => self.default_fps,
            TaskKind::TemporalDetail => self.detailed_fps,
            TaskKind::DenseMotion => self.dense_fps,
        }
    }

    fn smallest_level(&self) -> u64 {
        *self.levels.last().expect("validated policy has levels")
    }
}

pub fn choose_fps(task: TaskKind) -> f64 {
    SamplingPolicy::default().fps_for(task)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoPlan {
    pub frame_count: u64,
    /// Sample times in seconds, strictly increasing.
    pub frame_times: Vec<f64>,
    /// Tokens per frame.
    pub level: u64,
    pub total_tokens: u64,
    pub fallback_applied: bool,
}

impl VideoPlan {
    /// One timestamp token per selected frame.
    pub fn timestamp_tokens(&self) -> Vec<String> {
        self.frame_times
            .iter()
            .map(|&t| format_timestamp(t))
            .collect()
    }
}

/// Frames sampled at `fps` before any budget is applied. At least one.
pub fn nominal_frame_count(duration: f64, fps: f64) -> u64 {
    ((duration * fps).floor() as u64).max(1)
}

/// Indices of `count` frames spread uniformly over `nominal` frames, each
/// taken from the center of its stride.
pub fn uniform_stride(nominal: u64, count: u64) -> Vec<u64> {
    if count >= nominal {
        return (0..nominal).collect();
    }
    let (n, c) = (u128::from(nominal), u128::from(count));
    (0..c).map(|j| ((2 * j + 1) * n / (2 * c)) as u64).collect()
}

pub fn plan_video(duration: f64, fps: f64, policy: &SamplingPolicy) -> Result<VideoPlan> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::invalid(format!("duration must be positive, got {duration}")));
    }
    if !(fps.is_finite() && fps > 0.0) {
        return Err(Error::invalid(format!("fps must be positive, got {fps}")));
    }
    policy.validate()?;

    let nominal = nominal_frame_count(duration, fps);
    let frame_time = |k: u64| {
        let t = (k as f64 + 0.5) / fps;
        // a clip shorter than one frame interval still gets a frame inside it
        if k == 0 {
            t.min(duration / 2.0)
        } else {
            t
        }
    };

    let fitting = policy
        .levels
        .iter()
        .copied()
        .find(|&level| nominal.checked_mul(level).is_some_and(|t| t <= policy.budget));

    let (level, indices, fallback_applied) = match fitting {
        Some(level) => (level, (0..nominal).collect::<Vec<_>>(), false),
        None => {
            let level = policy.smallest_level();
            let count = policy.budget / level;
            (level, uniform_stride(nominal, count), true)
        }
    };

    let frame_times: Vec<f64> = indices.iter().map(|&k| frame_time(k)).collect();
    let frame_count = frame_times.len() as u64;
    Ok(VideoPlan {
        frame_count,
        frame_times,
        level,
        total_tokens: frame_count * level,
        fallback_applied,
    })
}

/// Pixel size of a frame given its token level and aspect ratio (width over
/// height).
///
/// The ideal grid scales the aspect ratio to the level's area,
/// `(sqrt(level·aspect), sqrt(level/aspect))`. The chosen grid is the
/// largest-area one among the integer neighbours of that ideal which fits
/// the level, then the one closest to the aspect ratio, then the wider one.
/// If no neighbour fits, the long side is shortened until one does.
pub fn level_to_dims(level: u64, aspect: f64) -> Result<(u32, u32)> {
    if level == 0 {
        return Err(Error::invalid("level must be at least 1"));
    }
    if !(aspect.is_finite() && aspect > 0.0) {
        return Err(Error::invalid(format!("aspect must be positive, got {aspect}")));
    }
    let lf = level as f64;
    let ideal_w = (lf * aspect).sqrt();
    let ideal_h = (lf / aspect).sqrt();
    let around = |v: f64, hi: u64| {
        let lo = (v.floor() as u64).clamp(1, hi);
        let up = (v.ceil() as u64).clamp(1, hi);
        [lo, up]
    };

    let fits = |g: &(u64, u64)| g.0 * g.1 <= level;
    let mut cands: Vec<(u64, u64)> = around(ideal_h, level)
        .into_iter()
        .flat_map(|gh| around(ideal_w, level).map(|gw| (gw, gh)))
        .filter(fits)
        .collect();
    if cands.is_empty() {
        // very elongated frames: the short side is pinned to one cell and
        // the long side shrinks until the grid fits
        cands = around(ideal_h, level)
            .into_iter()
            .map(|gh| ((ideal_w.floor() as u64).clamp(1, level / gh), gh))
            .filter(fits)
            .collect();
    }
    let best = cands.into_iter().reduce(|a, b| pick_grid(a, b, aspect));
    let (gw, gh) = best.expect("1x1 always fits");
    Ok((gw as u32 * CELL_SIZE, gh as u32 * CELL_SIZE))
}

fn pick_grid(a: (u64, u64), b: (u64, u64), aspect: f64) -> (u64, u64) {
    let area = |g: (u64, u64)| g.0 * g.1;
    let dev = |g: (u64, u64)| (g.0 as f64 / g.1 as f64 - aspect).abs();
    match area(a).cmp(&area(b)) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => match dev(a).total_cmp(&dev(b)) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                if b.0 > a.0 {
                    b
                } else {
                    a
                }
            }
        },
    }
}

fn format_timestamp(t: f64) -> String {
    format!("[{t:.1} second]")
}

pub fn timestamp_token(t: f64) -> Result<String> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("timestamp must be non-negative, got {t}")));
    }
    Ok(format_timestamp(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fps_by_task() {
        assert_eq!(choose_fps(TaskKind::General), 1.0);
        assert_eq!(choose_fps(TaskKind::TemporalDetail), 2.0);
        assert_eq!(choose_fps(TaskKind::DenseMotion), 5.0);
    }

    #[test]
    fn policy_override() {
        let p = SamplingPolicy {
            dense_fps: 4.0,
            ..Default::default()
        };
        assert_eq!(p.fps_for(TaskKind::DenseMotion), 4.0);
    }

    #[test]
    fn worked_examples() {
        let p = SamplingPolicy::default();
        let v = plan_video(100.0, 1.0, &p).unwrap();
        assert_eq!((v.frame_count, v.level, v.total_tokens, v.fallback_applied), (100, 640, 64_000, false));
        let v = plan_video(200.0, 1.0, &p).unwrap();
        assert_eq!((v.frame_count, v.level, v.total_tokens), (200, 384, 76_800));
        let v = plan_video(1000.0, 1.0, &p).unwrap();
        assert_eq!((v.frame_count, v.level, v.total_tokens, v.fallback_applied), (640, 128, 81_920, true));
    }

    #[test]
    fn frame_times_are_centered() {
        let v = plan_video(3.0, 2.0, &SamplingPolicy::default()).unwrap();
        assert_eq!(v.frame_times, vec![0.25, 0.75, 1.25, 1.75, 2.25, 2.75]);
    }

    #[test]
    fn very_short_clip_gets_one_frame_inside() {
        let v = plan_video(0.2, 1.0, &SamplingPolicy::default()).unwrap();
        assert_eq!(v.frame_count, 1);
        assert!(v.frame_times[0] < 0.2 && v.frame_times[0] >= 0.0);
    }

    #[test]
    fn invalid_inputs() {
        let p = SamplingPolicy::default();
        assert!(plan_video(0.0, 1.0, &p).is_err());
        assert!(plan_video(10.0, -1.0, &p).is_err());
        assert!(plan_video(f64::NAN, 1.0, &p).is_err());
        let bad = SamplingPolicy {
            levels: vec![128, 256],
            ..Default::default()
        };
        assert!(plan_video(10.0, 1.0, &bad).is_err());
        let bad = SamplingPolicy {
            budget: 100,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn stride_shape() {
        assert_eq!(uniform_stride(10, 5), vec![1, 3, 5, 7, 9]);
        assert_eq!(uniform_stride(3, 5), vec![0, 1, 2]);
        let idx = uniform_stride(1000, 640);
        assert_eq!(idx.len(), 640);
        let gaps: Vec<u64> = idx.windows(2).map(|w| w[1] - w[0]).collect();
        let (lo, hi) = (gaps.iter().min().unwrap(), gaps.iter().max().unwrap());
        assert!(hi - lo <= 1);
    }

    /// Brute force over every grid with `gw·gh <= level`, keeping those
    /// within one cell of the aspect-scaled ideal on both axes.
    fn dims_oracle(level: u64, aspect: f64) -> (u32, u32) {
        let iw = (level as f64 * aspect).sqrt();
        let ih = (level as f64 / aspect).sqrt();
        let mut cands = Vec::new();
        for gw in 1..=level {
            for gh in 1..=level / gw {
                if (gw as f64 - iw).abs() < 1.0 && (gh as f64 - ih).abs() < 1.0 {
                    cands.push((gw, gh));
                }
            }
        }
        cands.sort_by(|a, b| {
            (b.0 * b.1)
                .cmp(&(a.0 * a.1))
                .then((a.0 as f64 / a.1 as f64 - aspect).abs().total_cmp(&(b.0 as f64 / b.1 as f64 - aspect).abs()))
                .then(b.0.cmp(&a.0))
        });
        let (gw, gh) = cands[0];
        (gw as u32 * 28, gh as u32 * 28)
    }

    #[test]
    fn dims_examples() {
        assert_eq!(dims_oracle(640, 1.0), (700, 700));
        assert_eq!(dims_oracle(128, 1.0), (308, 308));
        assert_eq!(level_to_dims(640, 1.0).unwrap(), (700, 700));
        assert_eq!(level_to_dims(128, 1.0).unwrap(), (308, 308));
        assert_eq!(level_to_dims(1, 1.0).unwrap(), (28, 28));
        assert_eq!(level_to_dims(1, 7.5).unwrap(), (28, 28));
        assert_eq!(level_to_dims(640, 1.6).unwrap(), (32 * 28, 20 * 28));
    }

    #[test]
    fn dims_match_oracle_on_all_levels() {
        for &level in &DEFAULT_LEVELS {
            for aspect in [0.3, 0.5, 0.75, 1.0, 4.0 / 3.0, 16.0 / 9.0, 2.35, 3.0] {
                assert_eq!(level_to_dims(level, aspect).unwrap(), dims_oracle(level, aspect), "{level} {aspect}");
            }
        }
    }

    #[test]
    fn extreme_aspect_stays_in_budget() {
        let (w, h) = level_to_dims(128, 1000.0).unwrap();
        assert_eq!((w, h), (128 * 28, 28));
        let (w, h) = level_to_dims(128, 0.001).unwrap();
        assert_eq!((w, h), (28, 128 * 28));
        assert!(level_to_dims(0, 1.0).is_err());
        assert!(level_to_dims(5, 0.0).is_err());
    }

    #[test]
    fn timestamps() {
        assert_eq!(timestamp_token(1.5).unwrap(), "[1.5 second]");
        assert_eq!(timestamp_token(0.0).unwrap(), "[0.0 second]");
        assert_eq!(timestamp_token(12.0).unwrap(), "[12.0 second]");
        assert!(timestamp_token(-0.1).is_err());
        let v = plan_video(2.0, 1.0, &SamplingPolicy::default()).unwrap();
        assert_eq!(v.timestamp_tokens(), vec!["[0.5 second]", "[1.5 second]"]);
    }

    proptest! {
        #[test]
        fn budget_and_times(duration in 0.01f64..50_000.0, fps_idx in 0usize..3) {
            let fps = [1.0, 2.0, 5.0][fps_idx];
            let p = SamplingPolicy::default();
            let v = plan_video(duration, fps, &p).unwrap();
            prop_assert!(v.total_tokens <= p.budget);
            prop_assert_eq!(v.total_tokens, v.frame_count * v.level);
            prop_assert!(v.frame_times.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(v.frame_times.iter().all(|&t| t >= 0.0 && t < duration));
        }

        #[test]
        fn dims_within_level(level in 1u64..2048, aspect in 0.05f64..20.0) {
            let (w, h) = level_to_dims(level, aspect).unwrap();
            prop_assert!(w >= 28 && h >= 28);
            prop_assert!(u64::from(w / 28) * u64::from(h / 28) <= level);
        }
    }
}
