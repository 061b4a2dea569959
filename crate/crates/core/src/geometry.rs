//! Native-resolution image geometry.
//!
//! Images are snapped to the nearest multiple of 28 pixels per axis, cut into
//! 14×14 patches, and pooled 2×2 before reaching the language model, so one
//! post-pool token covers a 28×28 pixel cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side of one encoder patch in pixels.
pub const PATCH_SIZE: u32 = 14;
/// Side of the pooling window in patches.
pub const POOL_SIZE: u32 = 2;
/// Side of the pixel cell covered by one post-pool token.
pub const CELL_SIZE: u32 = PATCH_SIZE * POOL_SIZE;

/// Resolved geometry for one image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImagePlan {
    pub native_w: u32,
    pub native_h: u32,
    pub target_w: u32,
    pub target_h: u32,
    pub patch_grid_w: u32,
    pub patch_grid_h: u32,
    /// Patches seen by the encoder, before pooling.
    pub patch_count: u64,
    /// Tokens handed to the language model, after pooling.
    pub token_count: u64,
}

/// Snap one axis to the nearest multiple of [`CELL_SIZE`]. Exact half-cells
/// round up and the result never drops below one cell.
pub fn snap_to_cell(native: u32) -> u32 {
    let cells = (u64::from(native) + u64::from(CELL_SIZE / 2)) / u64::from(CELL_SIZE);
    (cells.max(1) as u32) * CELL_SIZE
}

pub fn plan_image(native_w: u32, native_h: u32) -> Result<ImagePlan> {
    if native_w == 0 || native_h == 0 {
        return Err(Error::invalid(format!(
            "image dimensions must be positive, got {native_w}x{native_h}"
        )));
    }
    let target_w = snap_to_cell(native_w);
    let target_h = snap_to_cell(native_h);
    Ok(ImagePlan::from_target(native_w, native_h, target_w, target_h))
}

impl ImagePlan {
    fn from_target(native_w: u32, native_h: u32, target_w: u32, target_h: u32) -> Self {
        debug_assert!(target_w % CELL_SIZE == 0 && target_h % CELL_SIZE == 0);
        let patch_grid_w = target_w / PATCH_SIZE;
        let patch_grid_h = target_h / PATCH_SIZE;
        let patch_count = u64::from(patch_grid_w) * u64::from(patch_grid_h);
        let token_count = u64::from(target_w / CELL_SIZE) * u64::from(target_h / CELL_SIZE);
        ImagePlan {
            native_w,
            native_h,
            target_w,
            target_h,
            patch_grid_w,
            patch_grid_h,
            patch_count,
            token_count,
        }
    }

    /// Plan for an image whose target resolution is already cell-aligned,
    /// such as a video frame sized by the frame planner.
    pub fn aligned(target_w: u32, target_h: u32) -> Result<Self> {
        if target_w == 0 || target_h == 0 || target_w % CELL_SIZE != 0 || target_h % CELL_SIZE != 0
        {
            return Err(Error::invalid(format!(
                "{target_w}x{target_h} is not a positive multiple of {CELL_SIZE}"
            )));
        }
        Ok(Self::from_target(target_w, target_h, target_w, target_h))
    }

    /// Bytes of an 8-bit RGB buffer at the target resolution.
    pub fn rgb_bytes(&self) -> u64 {
        u64::from(self.target_w) * u64::from(self.target_h) * 3
    }
}

/// Per-image encoder cost as `alpha·n + beta·n²` over the patch count `n`.
///
/// The linear term covers the per-token projections and MLP, the quadratic
/// term covers attention scores and their weighted sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub alpha: f64,
    pub beta: f64,
}

/// Encoder width.
const EMBED_DIM: f64 = 1280.0;
/// Transformer blocks in the encoder.
const DEPTH: f64 = 27.0;

impl Default for CostModel {
    /// Derived from the encoder shape (width 1280, 27 blocks, MLP ratio 4),
    /// counting a multiply-add as two FLOPs:
    ///
    /// - alpha = depth · (8d² attention projections + 8d² MLP) · 2
    /// - beta  = depth · 4d · 2 (QKᵀ and AV over every patch pair)
    fn default() -> Self {
        let d = EMBED_DIM;
        CostModel {
            alpha: DEPTH * (8.0 * d * d + 8.0 * d * d) * 2.0,
            beta: DEPTH * 4.0 * d * 2.0,
        }
    }
}

impl CostModel {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(alpha) || !ok(beta) {
            return Err(Error::invalid(format!(
                "cost coefficients must be finite and non-negative, got alpha={alpha} beta={beta}"
            )));
        }
        if alpha == 0.0 && beta == 0.0 {
            return Err(Error::invalid("cost coefficients cannot both be zero"));
        }
        Ok(CostModel { alpha, beta })
    }
}

pub fn flops_cost(model: &CostModel, patch_count: u64) -> f64 {
    let n = patch_count as f64;
    model.alpha * n + model.beta * n * n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn aligned_dims_are_kept() {
        let p = plan_image(1008, 756).unwrap();
        assert_eq!((p.target_w, p.target_h), (1008, 756));
        assert_eq!((p.patch_grid_w, p.patch_grid_h), (72, 54));
        assert_eq!(p.patch_count, 3888);
        assert_eq!(p.token_count, 972);
    }

    #[test]
    fn snaps_to_nearest_cell() {
        let p = plan_image(1000, 750).unwrap();
        assert_eq!((p.target_w, p.target_h), (1008, 756));
        assert_eq!(p.token_count, 972);
    }

    #[test]
    fn smallest_and_clamped() {
        let p = plan_image(28, 28).unwrap();
        assert_eq!((p.patch_grid_w, p.patch_grid_h, p.token_count), (2, 2, 1));
        let p = plan_image(10, 10).unwrap();
        assert_eq!((p.target_w, p.target_h, p.token_count), (28, 28, 1));
    }

    #[test]
    fn half_cell_rounds_up() {
        assert_eq!(snap_to_cell(14), 28);
        assert_eq!(snap_to_cell(42), 56);
        assert_eq!(snap_to_cell(41), 28);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(plan_image(0, 5), Err(Error::InvalidInput(_))));
        assert!(matches!(plan_image(5, 0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn aligned_constructor_validates() {
        assert!(ImagePlan::aligned(700, 700).is_ok());
        assert!(ImagePlan::aligned(700, 701).is_err());
        assert!(ImagePlan::aligned(0, 28).is_err());
    }

    #[test]
    fn cost_examples() {
        let m = CostModel::new(2.0, 1.0).unwrap();
        assert_eq!(flops_cost(&m, 3), 15.0);
        assert_eq!(flops_cost(&CostModel::new(5.0, 0.0).unwrap(), 0), 0.0);
        let m = CostModel::new(1.0, 1.0).unwrap();
        assert_eq!(flops_cost(&m, 10), 110.0);
        assert_eq!(flops_cost(&m, 5), 30.0);
    }

    #[test]
    fn default_cost_model() {
        let m = CostModel::default();
        assert_eq!(m.alpha, 1_415_577_600.0);
        assert_eq!(m.beta, 276_480.0);
    }

    #[test]
    fn cost_model_rejects_bad_coefficients() {
        assert!(CostModel::new(0.0, 0.0).is_err());
        assert!(CostModel::new(-1.0, 1.0).is_err());
        assert!(CostModel::new(f64::NAN, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn plan_invariants(w in 1u32..20_000, h in 1u32..20_000) {
            let p = plan_image(w, h).unwrap();
            prop_assert_eq!(p.target_w % 28, 0);
            prop_assert_eq!(p.target_h % 28, 0);
            prop_assert_eq!(p.patch_grid_w % 2, 0);
            prop_assert_eq!(p.patch_grid_h % 2, 0);
            prop_assert_eq!(p.token_count * 4, p.patch_count);
            if w >= 14 {
                prop_assert!(p.target_w.abs_diff(w) <= 14);
            }
            if h >= 14 {
                prop_assert!(p.target_h.abs_diff(h) <= 14);
            }
        }

        #[test]
        fn cost_is_monotone(a in 0.0f64..1e6, b in 0.0f64..1e3, n in 0u64..100_000) {
            let m = CostModel { alpha: a, beta: b };
            prop_assert!(flops_cost(&m, n + 1) >= flops_cost(&m, n));
        }
    }
}
