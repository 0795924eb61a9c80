//! Location grid conversion and detection geometry.

mod map;

use core::fmt;

use crate::model::{LocBox, LOC_GRID_MAX};

pub use map::{evaluate_map, ClassAp, Detection, MapReport, IOU_THRESHOLDS, RECALL_POINTS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryError {
    /// Page width or height is zero, negative or not finite.
    InvalidPageSize { width: f64, height: f64 },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::InvalidPageSize { width, height } => {
                write!(f, "page size {width}x{height} must be positive")
            }
        }
    }
}

/// Axis-aligned box in any coordinate system.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BBox {
    pub const fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        BBox { x1, y1, x2, y2 }
    }

    pub fn area(&self) -> f64 {
        (self.x2 - self.x1).max(0.0) * (self.y2 - self.y1).max(0.0)
    }

    pub fn scaled(&self, sx: f64, sy: f64) -> Self {
        BBox::new(self.x1 * sx, self.y1 * sy, self.x2 * sx, self.y2 * sy)
    }
}

impl From<LocBox> for BBox {
    fn from(loc: LocBox) -> Self {
        BBox::new(
            f64::from(loc.x1),
            f64::from(loc.y1),
            f64::from(loc.x2),
            f64::from(loc.y2),
        )
    }
}

/// Box in page pixels together with the page size it refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelBox {
    pub bbox: BBox,
    pub page_width: f64,
    pub page_height: f64,
}

impl PixelBox {
    pub fn new(bbox: BBox, page_width: f64, page_height: f64) -> Result<Self, GeometryError> {
        check_page(page_width, page_height)?;
        Ok(PixelBox {
            bbox,
            page_width,
            page_height,
        })
    }
}

fn check_page(width: f64, height: f64) -> Result<(), GeometryError> {
    if width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::InvalidPageSize { width, height })
    }
}

fn to_grid(coord: f64, dim: f64) -> u16 {
    let v = libm::round(coord / dim * f64::from(LOC_GRID_MAX));
    if v.is_nan() {
        0
    } else {
        v.clamp(0.0, f64::from(LOC_GRID_MAX)) as u16
    }
}

/// Quantizes a pixel box onto the location grid: each coordinate is scaled
/// by `500 / page_dim`, rounded half away from zero and clamped to the grid.
pub fn encode_loc(pixel: &PixelBox) -> Result<LocBox, GeometryError> {
    check_page(pixel.page_width, pixel.page_height)?;
    let b = pixel.bbox;
    let (x1, x2) = (to_grid(b.x1, pixel.page_width), to_grid(b.x2, pixel.page_width));
    let (y1, y2) = (to_grid(b.y1, pixel.page_height), to_grid(b.y2, pixel.page_height));
    Ok(LocBox::new(x1.min(x2), y1.min(y2), x1.max(x2), y1.max(y2)))
}

pub fn decode_loc(loc: LocBox, page_width: f64, page_height: f64) -> Result<PixelBox, GeometryError> {
    check_page(page_width, page_height)?;
    let grid = f64::from(LOC_GRID_MAX);
    let bbox = BBox::from(loc).scaled(page_width / grid, page_height / grid);
    Ok(PixelBox {
        bbox,
        page_width,
        page_height,
    })
}

/// Intersection over union by area. Boxes with zero area never overlap.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let iw = a.x2.min(b.x2) - a.x1.max(b.x1);
    let ih = a.y2.min(b.y2) - a.y1.max(b.y1);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn px(x1: f64, y1: f64, x2: f64, y2: f64, w: f64, h: f64) -> PixelBox {
        PixelBox::new(BBox::new(x1, y1, x2, y2), w, h).unwrap()
    }

    #[test]
    fn encode_examples() {
        let (w, h) = (612.0, 792.0);
        assert_eq!(encode_loc(&px(0.0, 0.0, w, h, w, h)).unwrap(), LocBox::FULL_PAGE);
        assert_eq!(
            encode_loc(&px(w / 2.0, h / 2.0, w / 2.0, h / 2.0, w, h)).unwrap(),
            LocBox::new(250, 250, 250, 250)
        );
        assert_eq!(
            encode_loc(&px(100.0, 50.0, 300.0, 150.0, 1000.0, 500.0)).unwrap(),
            LocBox::new(50, 50, 150, 150)
        );
    }

    #[test]
    fn decode_examples() {
        let full = decode_loc(LocBox::FULL_PAGE, 612.0, 792.0).unwrap();
        assert_eq!(full.bbox, BBox::new(0.0, 0.0, 612.0, 792.0));
        let mid = decode_loc(LocBox::new(250, 250, 250, 250), 1000.0, 500.0).unwrap();
        assert_eq!(mid.bbox, BBox::new(500.0, 250.0, 500.0, 250.0));
        let b = decode_loc(LocBox::new(50, 50, 150, 150), 1000.0, 500.0).unwrap();
        assert_eq!(b.bbox, BBox::new(100.0, 50.0, 300.0, 150.0));
    }

    #[test]
    fn rounding_ties_away_from_zero() {
        // 1/1000 * 500 = 0.5 -> 1
        assert_eq!(encode_loc(&px(1.0, 0.0, 3.0, 0.0, 1000.0, 10.0)).unwrap().x1, 1);
        // 3/1000 * 500 = 1.5 -> 2
        assert_eq!(encode_loc(&px(1.0, 0.0, 3.0, 0.0, 1000.0, 10.0)).unwrap().x2, 2);
    }

    #[test]
    fn clamps_off_page_boxes() {
        let loc = encode_loc(&px(-50.0, -1.0, 2000.0, 900.0, 1000.0, 800.0)).unwrap();
        assert_eq!(loc, LocBox::FULL_PAGE);
    }

    #[test]
    fn rejects_bad_pages() {
        assert!(PixelBox::new(BBox::new(0.0, 0.0, 1.0, 1.0), 0.0, 10.0).is_err());
        assert!(decode_loc(LocBox::FULL_PAGE, 10.0, -1.0).is_err());
        assert!(decode_loc(LocBox::FULL_PAGE, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn iou_examples() {
        let a = BBox::new(0.0, 0.0, 2.0, 2.0);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &BBox::new(5.0, 5.0, 6.0, 6.0)), 0.0);
        let b = BBox::new(1.0, 1.0, 3.0, 3.0);
        assert!((iou(&a, &b) - 1.0 / 7.0).abs() < 1e-12);
        let point = BBox::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(iou(&point, &point), 0.0);
    }
}
