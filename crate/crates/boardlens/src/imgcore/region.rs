//! Region-of-interest algebra: axis-aligned rectangles, rotated
//! rectangles, unions, and rasterization to explicit pixel sets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A rasterized region: the set of covered `(row, col)` pixel coordinates.
///
/// `BTreeSet` keeps iteration order deterministic (row-major).
pub type PixelSet = BTreeSet<(u32, u32)>;

/// Errors raised by region construction, parsing, and rasterization.
#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    /// After clipping to the target bounds the region covers no pixels.
    #[error("region covers no pixels within {width}x{height} bounds")]
    EmptyRegion { width: u32, height: u32 },
    /// Textual region syntax could not be parsed.
    #[error("invalid region syntax: {reason}")]
    Syntax { reason: String },
    /// A numeric parameter was NaN or infinite.
    #[error("region parameter {name} must be finite")]
    NonFiniteParam { name: &'static str },
    /// A half-extent was negative.
    #[error("half-extents must be nonnegative, got ({half_rows}, {half_cols})")]
    NegativeHalfExtents { half_rows: f64, half_cols: f64 },
}

/// A region of interest over pixel-center coordinates.
///
/// Membership is inclusive: a pixel `(r, c)` belongs to an axis-aligned
/// rectangle when `|r - center_row| <= half_rows` and
/// `|c - center_col| <= half_cols`, so integer-valued extents cover an odd
/// number of pixels per axis. Rotated rectangles apply the same test in a
/// frame rotated by `angle_deg` (measured from the column axis toward the
/// row axis), and unions accept a pixel covered by any member.
///
/// The textual form accepted by [`Region::from_str`] and produced by
/// [`fmt::Display`] is:
///
/// ```text
/// axis:<center_row>,<center_col>,<half_rows>,<half_cols>
/// rot:<center_row>,<center_col>,<half_rows>,<half_cols>,<angle_deg>
/// <region>|<region>|...
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// Axis-aligned rectangle.
    AxisRect {
        /// `(row, col)` of the rectangle center; may lie outside the image.
        center: [f64; 2],
        /// `(half_rows, half_cols)`, both nonnegative.
        half_extents: [f64; 2],
    },
    /// Rectangle rotated about its center.
    RotatedRect {
        center: [f64; 2],
        half_extents: [f64; 2],
        /// Rotation in degrees from the column axis toward the row axis.
        angle_deg: f64,
    },
    /// Union of member regions.
    Union { members: Vec<Region> },
}

fn check_param(name: &'static str, value: f64) -> Result<(), RegionError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(RegionError::NonFiniteParam { name })
    }
}

fn check_half_extents(half: [f64; 2]) -> Result<(), RegionError> {
    check_param("half_rows", half[0])?;
    check_param("half_cols", half[1])?;
    if half[0] < 0.0 || half[1] < 0.0 {
        return Err(RegionError::NegativeHalfExtents {
            half_rows: half[0],
            half_cols: half[1],
        });
    }
    Ok(())
}

impl Region {
    /// Axis-aligned rectangle from center `(row, col)` and half-extents
    /// `(half_rows, half_cols)`.
    pub fn axis_rect(center: [f64; 2], half_extents: [f64; 2]) -> Result<Self, RegionError> {
        check_param("center_row", center[0])?;
        check_param("center_col", center[1])?;
        check_half_extents(half_extents)?;
        Ok(Region::AxisRect {
            center,
            half_extents,
        })
    }

    /// Rectangle rotated by `angle_deg` about its center.
    pub fn rotated_rect(
        center: [f64; 2],
        half_extents: [f64; 2],
        angle_deg: f64,
    ) -> Result<Self, RegionError> {
        check_param("center_row", center[0])?;
        check_param("center_col", center[1])?;
        check_half_extents(half_extents)?;
        check_param("angle_deg", angle_deg)?;
        Ok(Region::RotatedRect {
            center,
            half_extents,
            angle_deg,
        })
    }

    /// Union of member regions. An empty union is valid to build but
    /// rasterizes to [`RegionError::EmptyRegion`].
    pub fn union(members: Vec<Region>) -> Self {
        Region::Union { members }
    }

    /// Validates parameters recursively; used to re-check values that
    /// arrived through deserialization rather than the constructors.
    pub fn validate(&self) -> Result<(), RegionError> {
        match self {
            Region::AxisRect {
                center,
                half_extents,
            } => {
                check_param("center_row", center[0])?;
                check_param("center_col", center[1])?;
                check_half_extents(*half_extents)
            }
            Region::RotatedRect {
                center,
                half_extents,
                angle_deg,
            } => {
                check_param("center_row", center[0])?;
                check_param("center_col", center[1])?;
                check_half_extents(*half_extents)?;
                check_param("angle_deg", *angle_deg)
            }
            Region::Union { members } => {
                for m in members {
                    m.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Tests whether the pixel center `(row, col)` lies inside the region.
    pub fn contains(&self, row: f64, col: f64) -> bool {
        match self {
            Region::AxisRect {
                center,
                half_extents,
            } => {
                (row - center[0]).abs() <= half_extents[0]
                    && (col - center[1]).abs() <= half_extents[1]
            }
            Region::RotatedRect {
                center,
                half_extents,
                angle_deg,
            } => {
                let a = angle_deg.to_radians();
                let (sin, cos) = a.sin_cos();
                let dy = row - center[0];
                let dx = col - center[1];
                // Coordinates of the pixel in the rectangle's own frame:
                // `u` runs along the axis rotated by `angle_deg` from the
                // column axis, `v` along its perpendicular.
                let u = dx * cos + dy * sin;
                let v = -dx * sin + dy * cos;
                u.abs() <= half_extents[1] && v.abs() <= half_extents[0]
            }
            Region::Union { members } => members.iter().any(|m| m.contains(row, col)),
        }
    }

    /// Conservative `(row_lo, row_hi, col_lo, col_hi)` pixel bounds of the
    /// region clipped to `width x height`, or `None` when the clip is empty.
    fn clipped_bounds(&self, width: u32, height: u32) -> Option<(u32, u32, u32, u32)> {
        let (center, half_rows, half_cols) = match self {
            Region::AxisRect {
                center,
                half_extents,
            } => (*center, half_extents[0], half_extents[1]),
            Region::RotatedRect {
                center,
                half_extents,
                angle_deg,
            } => {
                let (sin, cos) = angle_deg.to_radians().sin_cos();
                // Extent of the rotated rectangle along the image axes.
                let ext_cols = half_extents[1] * cos.abs() + half_extents[0] * sin.abs();
                let ext_rows = half_extents[1] * sin.abs() + half_extents[0] * cos.abs();
                (*center, ext_rows, ext_cols)
            }
            Region::Union { .. } => unreachable!("unions are rasterized member-wise"),
        };
        if width == 0 || height == 0 {
            return None;
        }
        let row_lo = (center[0] - half_rows).ceil().max(0.0) as i64;
        let row_hi = (center[0] + half_rows).floor().min(height as f64 - 1.0) as i64;
        let col_lo = (center[1] - half_cols).ceil().max(0.0) as i64;
        let col_hi = (center[1] + half_cols).floor().min(width as f64 - 1.0) as i64;
        if row_lo > row_hi || col_lo > col_hi || row_hi < 0 || col_hi < 0 {
            return None;
        }
        Some((row_lo as u32, row_hi as u32, col_lo as u32, col_hi as u32))
    }

    fn collect_pixels(&self, width: u32, height: u32, out: &mut PixelSet) {
        match self {
            Region::Union { members } => {
                for m in members {
                    m.collect_pixels(width, height, out);
                }
            }
            _ => {
                let Some((row_lo, row_hi, col_lo, col_hi)) = self.clipped_bounds(width, height)
                else {
                    return;
                };
                for r in row_lo..=row_hi {
                    for c in col_lo..=col_hi {
                        if self.contains(r as f64, c as f64) {
                            out.insert((r, c));
                        }
                    }
                }
            }
        }
    }

    /// Rasterizes the region against a `width x height` pixel grid.
    ///
    /// Returns the covered pixel set, or [`RegionError::EmptyRegion`] when
    /// clipping leaves nothing (a union only fails when *all* members are
    /// clipped away). Parameters are re-validated first so deserialized
    /// regions cannot smuggle NaNs into the scan.
    pub fn rasterize(&self, width: u32, height: u32) -> Result<PixelSet, RegionError> {
        self.validate()?;
        let mut out = PixelSet::new();
        self.collect_pixels(width, height, &mut out);
        if out.is_empty() {
            return Err(RegionError::EmptyRegion { width, height });
        }
        Ok(out)
    }
}

/// Free-function form of [`Region::rasterize`].
pub fn rasterize_region(region: &Region, width: u32, height: u32) -> Result<PixelSet, RegionError> {
    region.rasterize(width, height)
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::AxisRect {
                center,
                half_extents,
            } => write!(
                f,
                "axis:{},{},{},{}",
                center[0], center[1], half_extents[0], half_extents[1]
            ),
            Region::RotatedRect {
                center,
                half_extents,
                angle_deg,
            } => write!(
                f,
                "rot:{},{},{},{},{}",
                center[0], center[1], half_extents[0], half_extents[1], angle_deg
            ),
            Region::Union { members } => {
                let mut first = true;
                for m in members {
                    if !first {
                        write!(f, "|")?;
                    }
                    first = false;
                    write!(f, "{m}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_fields(body: &str, expected: usize, spec: &str) -> Result<Vec<f64>, RegionError> {
    let parts: Vec<&str> = body.split(',').collect();
    if parts.len() != expected {
        return Err(RegionError::Syntax {
            reason: format!(
                "`{spec}` regions take {expected} comma-separated numbers, got {}",
                parts.len()
            ),
        });
    }
    parts
        .iter()
        .map(|p| {
            p.trim().parse::<f64>().map_err(|_| RegionError::Syntax {
                reason: format!("`{}` is not a number", p.trim()),
            })
        })
        .collect()
}

impl FromStr for Region {
    type Err = RegionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut members = Vec::new();
        for part in s.split('|') {
            let part = part.trim();
            let (kind, body) = part.split_once(':').ok_or_else(|| RegionError::Syntax {
                reason: format!("`{part}` is missing the `axis:`/`rot:` prefix"),
            })?;
            let region = match kind.trim() {
                "axis" => {
                    let v = parse_fields(body, 4, "axis")?;
                    Region::axis_rect([v[0], v[1]], [v[2], v[3]])?
                }
                "rot" => {
                    let v = parse_fields(body, 5, "rot")?;
                    Region::rotated_rect([v[0], v[1]], [v[2], v[3]], v[4])?
                }
                other => {
                    return Err(RegionError::Syntax {
                        reason: format!("unknown region kind `{other}`"),
                    })
                }
            };
            members.push(region);
        }
        match members.len() {
            0 => Err(RegionError::Syntax {
                reason: "empty region specification".into(),
            }),
            1 => Ok(members.into_iter().next().expect("one member")),
            _ => Ok(Region::union(members)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn axis_rect_with_unit_half_extents_covers_nine_pixels() {
        let region = Region::axis_rect([5.0, 5.0], [1.0, 1.0]).unwrap();
        let px = region.rasterize(16, 16).unwrap();
        let expected: PixelSet = (4..=6).flat_map(|r| (4..=6).map(move |c| (r, c))).collect();
        assert_eq!(px, expected);
    }

    #[test]
    fn fractional_center_covers_even_spans() {
        // Centered between pixels with half-extent 0.5 per axis: a 2x2 block.
        let region = Region::axis_rect([1.5, 1.5], [0.5, 0.5]).unwrap();
        let px = region.rasterize(8, 8).unwrap();
        let expected: PixelSet = [(1, 1), (1, 2), (2, 1), (2, 2)].into_iter().collect();
        assert_eq!(px, expected);
    }

    #[test]
    fn union_of_disjoint_rects_is_set_union() {
        let a = Region::axis_rect([1.5, 1.5], [0.5, 0.5]).unwrap();
        let b = Region::axis_rect([5.5, 5.5], [0.5, 0.5]).unwrap();
        let union = Region::union(vec![a.clone(), b.clone()]);
        let mut expected = a.rasterize(16, 16).unwrap();
        expected.extend(b.rasterize(16, 16).unwrap());
        assert_eq!(union.rasterize(16, 16).unwrap(), expected);
        assert_eq!(expected.len(), 8);
    }

    #[test]
    fn rotation_by_45_degrees_gives_a_diamond() {
        let region = Region::rotated_rect([8.0, 8.0], [2.0, 2.0], 45.0).unwrap();
        let px = region.rasterize(16, 16).unwrap();
        assert_eq!(px.len(), 13);
        for p in [(8, 6), (6, 8), (8, 10), (10, 8), (8, 8)] {
            assert!(px.contains(&p), "expected {p:?} in diamond");
        }
        assert!(!px.contains(&(6, 6)), "corner should rotate out");
    }

    #[test]
    fn fully_clipped_region_is_an_error() {
        let region = Region::axis_rect([100.0, 100.0], [1.0, 1.0]).unwrap();
        assert_eq!(
            region.rasterize(16, 16),
            Err(RegionError::EmptyRegion {
                width: 16,
                height: 16
            })
        );
    }

    #[test]
    fn union_survives_one_clipped_member() {
        let inside = Region::axis_rect([2.0, 2.0], [1.0, 1.0]).unwrap();
        let outside = Region::axis_rect([100.0, 100.0], [1.0, 1.0]).unwrap();
        let union = Region::union(vec![outside, inside.clone()]);
        assert_eq!(
            union.rasterize(16, 16).unwrap(),
            inside.rasterize(16, 16).unwrap()
        );
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(matches!(
            Region::axis_rect([0.0, 0.0], [-1.0, 1.0]),
            Err(RegionError::NegativeHalfExtents { .. })
        ));
        assert!(matches!(
            Region::axis_rect([f64::NAN, 0.0], [1.0, 1.0]),
            Err(RegionError::NonFiniteParam { .. })
        ));
        assert!(matches!(
            Region::rotated_rect([0.0, 0.0], [1.0, 1.0], f64::INFINITY),
            Err(RegionError::NonFiniteParam { .. })
        ));
    }

    #[test]
    fn parses_textual_forms() {
        let axis: Region = "axis:5,5,1,1".parse().unwrap();
        assert_eq!(axis, Region::axis_rect([5.0, 5.0], [1.0, 1.0]).unwrap());

        let rot: Region = "rot:8,8,2,2,45".parse().unwrap();
        assert_eq!(
            rot,
            Region::rotated_rect([8.0, 8.0], [2.0, 2.0], 45.0).unwrap()
        );

        let union: Region = "axis:1,1,1,1|rot:8,8,2,2,45".parse().unwrap();
        match &union {
            Region::Union { members } => assert_eq!(members.len(), 2),
            other => panic!("expected union, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_malformed_input() {
        for bad in [
            "",
            "axis:1,2,3",
            "axis:1,2,3,4,5",
            "blob:1,2,3,4",
            "axis:1,2,x,4",
            "1,2,3,4",
            "axis:1,2,3,4|",
        ] {
            assert!(bad.parse::<Region>().is_err(), "`{bad}` should not parse");
        }
        assert!(matches!(
            "axis:1,2,-3,4".parse::<Region>(),
            Err(RegionError::NegativeHalfExtents { .. })
        ));
        assert!(matches!(
            "axis:1,2,nan,4".parse::<Region>(),
            Err(RegionError::NonFiniteParam { .. })
        ));
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "axis:5,5,1,1",
            "rot:8,8,2.5,2,45",
            "axis:1.5,1.5,0.5,0.5|rot:8,8,2,2,-30",
        ] {
            let region: Region = text.parse().unwrap();
            assert_eq!(region.to_string(), text);
            let reparsed: Region = region.to_string().parse().unwrap();
            assert_eq!(reparsed, region);
        }
    }

    proptest! {
        #[test]
        fn zero_angle_matches_axis_rect(
            cr in 0.0f64..16.0, cc in 0.0f64..16.0,
            hr in 0.0f64..6.0, hc in 0.0f64..6.0,
        ) {
            let axis = Region::axis_rect([cr, cc], [hr, hc]).unwrap();
            let rot = Region::rotated_rect([cr, cc], [hr, hc], 0.0).unwrap();
            prop_assert_eq!(axis.rasterize(16, 16).ok(), rot.rasterize(16, 16).ok());
        }

        #[test]
        fn union_is_commutative_and_idempotent(
            cr in 0.0f64..12.0, cc in 0.0f64..12.0,
            hr in 0.5f64..3.0, hc in 0.5f64..3.0,
            dr in -4.0f64..4.0, dc in -4.0f64..4.0,
        ) {
            let a = Region::axis_rect([cr, cc], [hr, hc]).unwrap();
            let b = Region::axis_rect([cr + dr, cc + dc], [hc, hr]).unwrap();
            let ab = Region::union(vec![a.clone(), b.clone()]).rasterize(12, 12).ok();
            let ba = Region::union(vec![b.clone(), a.clone()]).rasterize(12, 12).ok();
            let aa = Region::union(vec![a.clone(), a.clone()]).rasterize(12, 12).ok();
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(aa, a.rasterize(12, 12).ok());
        }

        #[test]
        fn rasterized_pixels_all_satisfy_membership(
            cr in -4.0f64..20.0, cc in -4.0f64..20.0,
            hr in 0.0f64..8.0, hc in 0.0f64..8.0,
            angle in -180.0f64..180.0,
        ) {
            let region = Region::rotated_rect([cr, cc], [hr, hc], angle).unwrap();
            if let Ok(px) = region.rasterize(16, 16) {
                for (r, c) in px {
                    prop_assert!(region.contains(r as f64, c as f64));
                }
            }
        }
    }
}
