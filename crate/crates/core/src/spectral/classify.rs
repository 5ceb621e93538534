use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    BL,
    BR,
    TL,
    TR,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::BL, Corner::BR, Corner::TL, Corner::TR];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateClass {
    Bulk,
    Edge(Side),
    Corner(Corner),
    Mixed,
}

impl StateClass {
    pub fn is_bulk(&self) -> bool {
        matches!(self, StateClass::Bulk)
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, StateClass::Edge(_) | StateClass::Corner(_))
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateClass::Bulk => f.write_str("bulk"),
            StateClass::Mixed => f.write_str("mixed"),
            StateClass::Edge(side) => write!(
                f,
                "edge-{}",
                match side {
                    Side::Left => "left",
                    Side::Right => "right",
                    Side::Bottom => "bottom",
                    Side::Top => "top",
                }
            ),
            StateClass::Corner(c) => write!(f, "corner-{c:?}"),
        }
    }
}

impl FromStr for StateClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bulk" => StateClass::Bulk,
            "mixed" => StateClass::Mixed,
            "edge-left" => StateClass::Edge(Side::Left),
            "edge-right" => StateClass::Edge(Side::Right),
            "edge-bottom" => StateClass::Edge(Side::Bottom),
            "edge-top" => StateClass::Edge(Side::Top),
            "corner-BL" => StateClass::Corner(Corner::BL),
            "corner-BR" => StateClass::Corner(Corner::BR),
            "corner-TL" => StateClass::Corner(Corner::TL),
            "corner-TR" => StateClass::Corner(Corner::TR),
            other => return Err(Error::Parse(format!("unknown state class {other:?}"))),
        })
    }
}

/// Strip and corner-block sizes, in sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionOptions {
    pub edge_depth: usize,
    pub corner_block: usize,
    pub threshold: f64,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            edge_depth: 2,
            corner_block: 2,
            threshold: 0.5,
        }
    }
}

impl RegionOptions {
    pub fn with_depth(edge_depth: usize) -> Self {
        RegionOptions {
            edge_depth,
            ..RegionOptions::default()
        }
    }
}

/// Probability held in each side strip and corner block.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryWeights {
    pub left: f64,
    pub right: f64,
    pub bottom: f64,
    pub top: f64,
    #[serde(rename = "BL")]
    pub bl: f64,
    #[serde(rename = "BR")]
    pub br: f64,
    #[serde(rename = "TL")]
    pub tl: f64,
    #[serde(rename = "TR")]
    pub tr: f64,
}

impl BoundaryWeights {
    pub fn side(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
            Side::Bottom => self.bottom,
            Side::Top => self.top,
        }
    }

    pub fn corner(&self, corner: Corner) -> f64 {
        match corner {
            Corner::BL => self.bl,
            Corner::BR => self.br,
            Corner::TL => self.tl,
            Corner::TR => self.tr,
        }
    }

    /// Corner block with the largest weight (first wins on ties).
    pub fn dominant_corner(&self) -> Corner {
        let mut best = Corner::BL;
        for c in Corner::ALL {
            if self.corner(c) > self.corner(best) {
                best = c;
            }
        }
        best
    }
}

/// Sums `probs` (flat index `y·size_x + x`) over strips and corner blocks.
pub fn boundary_weights(probs: &[f64], size_x: usize, size_y: usize, edge_depth: usize, corner_block: usize) -> BoundaryWeights {
    let mut w = BoundaryWeights::default();
    for y in 0..size_y {
        for x in 0..size_x {
            let p = probs[y * size_x + x];
            let (left, right) = (x < edge_depth, x + edge_depth >= size_x);
            let (bottom, top) = (y < edge_depth, y + edge_depth >= size_y);
            if left {
                w.left += p;
            }
            if right {
                w.right += p;
            }
            if bottom {
                w.bottom += p;
            }
            if top {
                w.top += p;
            }
            let (cl, cr) = (x < corner_block, x + corner_block >= size_x);
            let (cb, ct) = (y < corner_block, y + corner_block >= size_y);
            if cl && cb {
                w.bl += p;
            }
            if cr && cb {
                w.br += p;
            }
            if cl && ct {
                w.tl += p;
            }
            if cr && ct {
                w.tr += p;
            }
        }
    }
    w
}

/// Labels a normalised state by where its weight sits.
///
/// Only axes longer than `2·edge_depth` have boundaries; a chain (`size_y = 1`)
/// can be `Edge(Left)`, `Edge(Right)`, `Bulk` or `Mixed`. Corners need both
/// axes.
pub fn classify_state(vector: &[Complex64], spec: &LatticeSpec, options: RegionOptions) -> Result<StateClass> {
    let n = spec.num_sites();
    if vector.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: vector.len(),
        });
    }
    let probs: Vec<f64> = vector.iter().map(|a| a.norm_sqr()).collect();
    Ok(classify_probabilities(&probs, spec.size_x, spec.size_y, options))
}

pub fn classify_probabilities(probs: &[f64], size_x: usize, size_y: usize, options: RegionOptions) -> StateClass {
    let RegionOptions {
        edge_depth,
        corner_block,
        threshold,
    } = options;
    let w = boundary_weights(probs, size_x, size_y, edge_depth, corner_block);
    let x_active = size_x > 2 * edge_depth;
    let y_active = size_y > 2 * edge_depth;

    if x_active && y_active && size_x >= 2 * corner_block && size_y >= 2 * corner_block {
        if let Some(c) = Corner::ALL.into_iter().find(|&c| w.corner(c) >= threshold) {
            return StateClass::Corner(c);
        }
    }
    let mut sides = Vec::with_capacity(4);
    if x_active {
        sides.extend([Side::Left, Side::Right]);
    }
    if y_active {
        sides.extend([Side::Bottom, Side::Top]);
    }
    let heavy: Vec<Side> = sides.into_iter().filter(|&s| w.side(s) >= threshold).collect();
    match heavy.as_slice() {
        [] => StateClass::Bulk,
        [side] => StateClass::Edge(*side),
        _ => StateClass::Mixed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(nx: usize, ny: usize) -> LatticeSpec {
        LatticeSpec {
            size_x: nx,
            size_y: ny,
            ..LatticeSpec::default()
        }
    }

    fn delta(spec: &LatticeSpec, x: usize, y: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); spec.num_sites()];
        v[spec.site_index(x, y)] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn delta_at_origin_is_bottom_left_corner() {
        let s = spec(13, 7);
        assert_eq!(
            classify_state(&delta(&s, 0, 0), &s, RegionOptions::default()).unwrap(),
            StateClass::Corner(Corner::BL)
        );
        assert_eq!(
            classify_state(&delta(&s, 12, 6), &s, RegionOptions::default()).unwrap(),
            StateClass::Corner(Corner::TR)
        );
        assert_eq!(
            classify_state(&delta(&s, 0, 3), &s, RegionOptions::default()).unwrap(),
            StateClass::Edge(Side::Left)
        );
    }

    #[test]
    fn uniform_state_is_bulk() {
        let s = spec(13, 7);
        let a = Complex64::new((1.0 / 91.0f64).sqrt(), 0.0);
        let v = vec![a; 91];
        for depth in [1, 2] {
            assert_eq!(
                classify_state(&v, &s, RegionOptions::with_depth(depth)).unwrap(),
                StateClass::Bulk
            );
        }
    }

    #[test]
    fn wrong_length_rejected() {
        let s = spec(13, 7);
        assert!(matches!(
            classify_state(&[Complex64::new(1.0, 0.0)], &s, RegionOptions::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn chain_has_no_vertical_boundaries() {
        let s = spec(13, 1);
        assert_eq!(
            classify_state(&delta(&s, 0, 0), &s, RegionOptions::default()).unwrap(),
            StateClass::Edge(Side::Left)
        );
        assert_eq!(
            classify_state(&delta(&s, 6, 0), &s, RegionOptions::default()).unwrap(),
            StateClass::Bulk
        );
    }

    #[test]
    fn split_state_is_mixed() {
        let s = spec(13, 7);
        let mut v = vec![Complex64::new(0.0, 0.0); 91];
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        v[s.site_index(0, 3)] = h;
        v[s.site_index(12, 3)] = h;
        assert_eq!(classify_state(&v, &s, RegionOptions::default()).unwrap(), StateClass::Mixed);
    }

    #[test]
    fn label_round_trip() {
        for c in [
            StateClass::Bulk,
            StateClass::Mixed,
            StateClass::Edge(Side::Top),
            StateClass::Corner(Corner::BR),
        ] {
            assert_eq!(c.to_string().parse::<StateClass>().unwrap(), c);
        }
    }
}
