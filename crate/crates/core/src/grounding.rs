//! Grounding coordinates on the fixed `[0, 999]` grid and their text form.
//!
//! ```text
//! <bbox>x1 y1 x2 y2</bbox>
//! <point>x y</point>
//! <3dbbox>x y z w h l pitch yaw roll</3dbbox>
//! ```
//!
//! Box and point coordinates are integers without leading zeros separated by
//! single spaces. 3D boxes carry nine decimal numbers and are handled
//! syntactically only.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest normalized coordinate.
pub const GRID_MAX: u32 = 999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizedBox {
    pub x1: u32,
    pub y1: u32,
    pub x2: u32,
    pub y2: u32,
}

impl NormalizedBox {
    pub fn new(x1: u32, y1: u32, x2: u32, y2: u32) -> Result<Self> {
        for v in [x1, y1, x2, y2] {
            if v > GRID_MAX {
                return Err(Error::invalid(format!("coordinate {v} is outside [0, 999]")));
            }
        }
        if x1 > x2 || y1 > y2 {
            return Err(Error::invalid(format!(
                "box ({x1}, {y1}, {x2}, {y2}) has inverted corners"
            )));
        }
        Ok(NormalizedBox { x1, y1, x2, y2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizedPoint {
    pub x: u32,
    pub y: u32,
}

impl NormalizedPoint {
    pub fn new(x: u32, y: u32) -> Result<Self> {
        if x > GRID_MAX || y > GRID_MAX {
            return Err(Error::invalid(format!("point ({x}, {y}) is outside [0, 999]")));
        }
        Ok(NormalizedPoint { x, y })
    }
}

/// Center, size (meters) and Euler angles of a 3D box, in text order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3d(pub [f64; 9]);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Box(NormalizedBox),
    Point(NormalizedPoint),
    Box3d(Box3d),
}

/// Pixel-space box with corners `(x1, y1)` and `(x2, y2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

fn normalize_coord(v: f64, dim: u32, axis: &str) -> Result<u32> {
    let d = f64::from(dim);
    if !v.is_finite() || v < 0.0 || v > d {
        return Err(Error::invalid(format!("{axis} coordinate {v} is outside [0, {dim}]")));
    }
    // round half up, then clamp
    let scaled = (v * f64::from(GRID_MAX) / d + 0.5).floor();
    Ok(scaled.clamp(0.0, f64::from(GRID_MAX)) as u32)
}

fn check_dims(w: u32, h: u32) -> Result<()> {
    if w == 0 || h == 0 {
        return Err(Error::invalid(format!("image dimensions must be positive, got {w}x{h}")));
    }
    Ok(())
}

pub fn normalize_box(px: &PixelBox, image_w: u32, image_h: u32) -> Result<NormalizedBox> {
    check_dims(image_w, image_h)?;
    if px.x1 > px.x2 || px.y1 > px.y2 {
        return Err(Error::invalid(format!(
            "box ({}, {}, {}, {}) has inverted corners",
            px.x1, px.y1, px.x2, px.y2
        )));
    }
    Ok(NormalizedBox {
        x1: normalize_coord(px.x1, image_w, "x")?,
        y1: normalize_coord(px.y1, image_h, "y")?,
        x2: normalize_coord(px.x2, image_w, "x")?,
        y2: normalize_coord(px.y2, image_h, "y")?,
    })
}

pub fn normalize_point(x: f64, y: f64, image_w: u32, image_h: u32) -> Result<NormalizedPoint> {
    check_dims(image_w, image_h)?;
    Ok(NormalizedPoint {
        x: normalize_coord(x, image_w, "x")?,
        y: normalize_coord(y, image_h, "y")?,
    })
}

/// Map a normalized coordinate back to pixels along an axis of length `dim`.
pub fn denormalize(v: u32, dim: u32) -> f64 {
    f64::from(v) / f64::from(GRID_MAX) * f64::from(dim)
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Box(b) => write!(f, "<bbox>{} {} {} {}</bbox>", b.x1, b.y1, b.x2, b.y2),
            Region::Point(p) => write!(f, "<point>{} {}</point>", p.x, p.y),
            Region::Box3d(b) => {
                f.write_str("<3dbbox>")?;
                for (i, v) in b.0.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("</3dbbox>")
            }
        }
    }
}

pub fn emit_region(region: &Region) -> String {
    region.to_string()
}

const TAGS: [(&str, &str); 3] = [
    ("<bbox>", "</bbox>"),
    ("<point>", "</point>"),
    ("<3dbbox>", "</3dbbox>"),
];

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{lit}`")))
        }
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> (usize, &'a str) {
        let start = self.pos;
        let len = self.rest().bytes().take_while(|&b| pred(b)).count();
        self.pos += len;
        (start, &self.src[start..self.pos])
    }

    fn grid_value(&mut self) -> Result<u32> {
        let (start, digits) = self.take_while(|b| b.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.err("expected an integer"));
        }
        if digits.len() > 1 && digits.starts_with('0') {
            return Err(Error::Parse {
                offset: start,
                message: "leading zero".into(),
            });
        }
        let value = digits.parse::<u64>().unwrap_or(u64::MAX);
        if value > u64::from(GRID_MAX) {
            return Err(Error::Range { offset: start, value });
        }
        Ok(value as u32)
    }

    fn real_value(&mut self) -> Result<f64> {
        let (start, text) =
            self.take_while(|b| b.is_ascii_digit() || matches!(b, b'-' | b'+' | b'.' | b'e' | b'E'));
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::Parse {
                offset: start,
                message: format!("expected a number, found `{text}`"),
            }),
        }
    }

    fn grid_values<const N: usize>(&mut self, close: &str) -> Result<[u32; N]> {
        let mut out = [0; N];
        for (i, slot) in out.iter_mut().enumerate() {
            if i > 0 {
                self.separator(close, N)?;
            }
            *slot = self.grid_value()?;
        }
        Ok(out)
    }

    fn separator(&mut self, close: &str, arity: usize) -> Result<()> {
        if self.rest().starts_with(close) {
            return Err(self.err(format!("expected {arity} values")));
        }
        self.expect(" ")
    }

    fn close(&mut self, close: &str, arity: usize) -> Result<()> {
        if self.rest().starts_with(' ') {
            return Err(self.err(format!("expected {arity} values")));
        }
        self.expect(close)
    }

    fn region(&mut self) -> Result<Region> {
        let at = self.pos;
        let region = if self.rest().starts_with("<bbox>") {
            self.expect("<bbox>")?;
            let [x1, y1, x2, y2] = self.grid_values::<4>("</bbox>")?;
            self.close("</bbox>", 4)?;
            let b = NormalizedBox::new(x1, y1, x2, y2).map_err(|e| Error::Parse {
                offset: at,
                message: e.to_string(),
            })?;
            Region::Box(b)
        } else if self.rest().starts_with("<point>") {
            self.expect("<point>")?;
            let [x, y] = self.grid_values::<2>("</point>")?;
            self.close("</point>", 2)?;
            Region::Point(NormalizedPoint { x, y })
        } else if self.rest().starts_with("<3dbbox>") {
            self.expect("<3dbbox>")?;
            let mut v = [0.0; 9];
            for (i, slot) in v.iter_mut().enumerate() {
                if i > 0 {
                    self.separator("</3dbbox>", 9)?;
                }
                *slot = self.real_value()?;
            }
            self.close("</3dbbox>", 9)?;
            Region::Box3d(Box3d(v))
        } else {
            return Err(self.err("expected `<bbox>`, `<point>` or `<3dbbox>`"));
        };
        Ok(region)
    }
}

/// Parse exactly one region spanning the whole input.
pub fn parse_region(text: &str) -> Result<Region> {
    let mut c = Cursor { src: text, pos: 0 };
    let region = c.region()?;
    if !c.rest().is_empty() {
        return Err(c.err("trailing input after region"));
    }
    Ok(region)
}

/// Parse every region tag embedded in free text, in order of appearance.
/// Text outside the tags is ignored.
pub fn parse_regions(text: &str) -> Result<Vec<Region>> {
    let mut out = Vec::new();
    let mut c = Cursor { src: text, pos: 0 };
    loop {
        let next = TAGS
            .iter()
            .filter_map(|(open, _)| c.rest().find(open))
            .min();
        let Some(skip) = next else { break };
        c.pos += skip;
        out.push(c.region()?);
    }
    Ok(out)
}
