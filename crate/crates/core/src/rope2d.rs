//! Two-dimensional rotary position encoding over patch-grid coordinates.
//!
//! A head vector of length `head_dim` is split in two halves. The first half
//! is rotated by angles proportional to the patch column `x`, the second half
//! by angles proportional to the patch row `y`. Inside each half, adjacent
//! coordinates `(2i, 2i + 1)` form a rotation plane with frequency
//! `base^(-2i / half)`.
//!
//! Because every plane is a pure rotation, the inner product of two encoded
//! vectors only depends on the coordinate difference of their patches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RopeParams {
    head_dim: usize,
    base: f64,
}

impl RopeParams {
    pub const DEFAULT_BASE: f64 = 10_000.0;

    pub fn new(head_dim: usize, base: f64) -> Result<Self> {
        if head_dim == 0 || head_dim % 4 != 0 {
            return Err(Error::invalid(format!(
                "head_dim must be a positive multiple of 4, got {head_dim}"
            )));
        }
        if !(base.is_finite() && base > 1.0) {
            return Err(Error::invalid(format!("rope base must exceed 1, got {base}")));
        }
        Ok(RopeParams { head_dim, base })
    }

    pub fn with_head_dim(head_dim: usize) -> Result<Self> {
        Self::new(head_dim, Self::DEFAULT_BASE)
    }

    pub fn head_dim(&self) -> usize {
        self.head_dim
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// Rotation frequencies for one axis, one per plane.
    pub fn frequencies(&self) -> Vec<f64> {
        let half = self.head_dim / 2;
        (0..half / 2)
            .map(|i| self.base.powf(-((2 * i) as f64) / half as f64))
            .collect()
    }
}

impl Default for RopeParams {
    /// Encoder head width of 64.
    fn default() -> Self {
        RopeParams {
            head_dim: 64,
            base: Self::DEFAULT_BASE,
        }
    }
}

/// Column/row of a patch in its image's patch grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PatchPosition {
    pub x: u32,
    pub y: u32,
}

impl PatchPosition {
    pub fn new(x: u32, y: u32) -> Self {
        PatchPosition { x, y }
    }
}

fn rotate_half(half: &mut [f64], pos: u32, freqs: &[f64]) {
    // A zero coordinate is left untouched so that the origin is an exact identity.
    if pos == 0 {
        return;
    }
    let p = f64::from(pos);
    for (pair, &freq) in half.chunks_exact_mut(2).zip(freqs) {
        let (sin, cos) = (p * freq).sin_cos();
        let (a, b) = (pair[0], pair[1]);
        pair[0] = a * cos - b * sin;
        pair[1] = a * sin + b * cos;
    }
}

pub fn rope_rotate(v: &[f64], pos: PatchPosition, params: &RopeParams) -> Result<Vec<f64>> {
    check_len(v, params)?;
    let mut out = v.to_vec();
    let freqs = params.frequencies();
    let (xs, ys) = out.split_at_mut(params.head_dim / 2);
    rotate_half(xs, pos.x, &freqs);
    rotate_half(ys, pos.y, &freqs);
    Ok(out)
}

/// Inner product of `q` encoded at `pq` with `k` encoded at `pk`.
pub fn rope_dot(
    q: &[f64],
    k: &[f64],
    pq: PatchPosition,
    pk: PatchPosition,
    params: &RopeParams,
) -> Result<f64> {
    let rq = rope_rotate(q, pq, params)?;
    let rk = rope_rotate(k, pk, params)?;
    Ok(rq.iter().zip(&rk).map(|(a, b)| a * b).sum())
}

/// Positions of every patch in a `grid_w × grid_h` grid, row-major.
pub fn grid_positions(grid_w: u32, grid_h: u32) -> Vec<PatchPosition> {
    (0..grid_h)
        .flat_map(|y| (0..grid_w).map(move |x| PatchPosition { x, y }))
        .collect()
}

fn check_len(v: &[f64], params: &RopeParams) -> Result<()> {
    if v.len() != params.head_dim {
        return Err(Error::invalid(format!(
            "vector has length {}, expected head_dim {}",
            v.len(),
            params.head_dim
        )));
    }
    Ok(())
}
