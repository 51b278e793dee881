//! Hand geometry in the hand frame: origin at the centre of the finger base
//! line, `y` growing towards the wrist, fingers pointing to negative `y`.

use crate::error::{Error, Result};

pub type Coord = (f64, f64);

fn add(a: Coord, b: Coord) -> Coord {
    (a.0 + b.0, a.1 + b.1)
}

fn scale(a: Coord, s: f64) -> Coord {
    (a.0 * s, a.1 * s)
}

/// Tapered capsule: every point within `r(s)` of the segment `a -> b`, where the
/// radius runs linearly from `ra` at `a` to `rb` at `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub a: Coord,
    pub b: Coord,
    pub ra: f64,
    pub rb: f64,
}

impl Capsule {
    fn axis(&self) -> (Coord, f64) {
        let d = (self.b.0 - self.a.0, self.b.1 - self.a.1);
        let len = d.0.hypot(d.1);
        ((d.0 / len, d.1 / len), len)
    }

    pub fn radius_at(&self, s: f64) -> f64 {
        let (_, len) = self.axis();
        self.ra + (self.rb - self.ra) * s / len
    }

    pub fn contains(&self, p: Coord) -> bool {
        let (dir, len) = self.axis();
        let d = (p.0 - self.a.0, p.1 - self.a.1);
        let u = d.0 * dir.0 + d.1 * dir.1;
        let v = (dir.0 * d.1 - dir.1 * d.0).abs();
        // Closest point of the swept-disk family: minimizes |p - c(s)| - r(s).
        let k = (self.rb - self.ra) / len;
        let s = (u + v * k / (1.0 - k * k).sqrt()).clamp(0.0, len);
        let c = add(self.a, scale(dir, s));
        (p.0 - c.0).hypot(p.1 - c.1) <= self.ra + (self.rb - self.ra) * s / len
    }

    /// Side line point at axial offset `s` from `a`, on the side given by
    /// `side` (+1: right of travel direction in y-down coordinates, -1: left).
    pub fn edge_point(&self, s: f64, side: f64) -> Coord {
        let (dir, _) = self.axis();
        // Right-hand normal of the travel direction in y-down coordinates.
        let normal = (-dir.1, dir.0);
        add(add(self.a, scale(dir, s)), scale(normal, side * self.radius_at(s)))
    }

    fn bounds(&self) -> (Coord, Coord) {
        let r = self.ra.max(self.rb);
        (
            (self.a.0.min(self.b.0) - r, self.a.1.min(self.b.1) - r),
            (self.a.0.max(self.b.0) + r, self.a.1.max(self.b.1) + r),
        )
    }
}

/// Convex polygon, vertices in order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    pub vertices: Vec<Coord>,
}

impl ConvexPolygon {
    pub fn contains(&self, p: Coord) -> bool {
        let n = self.vertices.len();
        let (mut pos, mut neg) = (false, false);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross > 0.0 {
                pos = true;
            } else if cross < 0.0 {
                neg = true;
            }
            if pos && neg {
                return false;
            }
        }
        true
    }
}

/// Per-finger anatomy. For the four long fingers `angle_deg` is the tilt of the
/// finger axis from vertical (positive leans towards the thumb) and `length`
/// runs from the base line to the tip-cap centre. For the thumb `angle_deg` is
/// the abduction from vertical and `length` is measured from where the axis
/// crosses the palm edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerAnatomy {
    pub length: f64,
    pub base_width: f64,
    /// Tip width as a fraction of base width.
    pub taper: f64,
    pub angle_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anatomy {
    /// Order: thumb, index, middle, ring, little.
    pub fingers: [FingerAnatomy; 5],
    /// Background gap between neighbouring finger bases on the base line.
    pub base_gap: f64,
    /// Depth below the base line where the thumb axis crosses the palm edge.
    pub thumb_attach: f64,
    /// Horizontal run per row of the palm edges where they narrow to the wrist.
    pub narrowing_slope: f64,
    /// How far the thumb-side palm edge moves in below the thumb.
    pub thumb_side_narrowing: f64,
    /// How far the little-finger-side palm edge moves in towards the wrist.
    pub little_side_narrowing: f64,
}

impl Default for Anatomy {
    fn default() -> Self {
        let f = |length, base_width, angle_deg| FingerAnatomy {
            length,
            base_width,
            taper: 0.8,
            angle_deg,
        };
        Anatomy {
            fingers: [
                FingerAnatomy {
                    length: 80.0,
                    base_width: 32.0,
                    taper: 0.82,
                    angle_deg: 35.0,
                },
                f(105.0, 30.0, 10.0),
                f(120.0, 31.0, 2.0),
                f(112.0, 29.0, -5.0),
                f(88.0, 25.0, -14.0),
            ],
            base_gap: 4.0,
            thumb_attach: 75.0,
            narrowing_slope: 0.4,
            thumb_side_narrowing: 25.0,
            little_side_narrowing: 20.0,
        }
    }
}

/// How far below the base line the long-finger capsules start.
const FINGER_ROOT_DEPTH: f64 = 20.0;
/// How far the thumb capsule reaches back into the palm.
const THUMB_ROOT_DEPTH: f64 = 75.0;
/// Far end of the forearm band; always beyond any canvas.
const FOREARM_END: f64 = 4000.0;

/// Resolved hand shape plus the landmarks the ground truth is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct HandGeometry {
    pub palm: ConvexPolygon,
    pub forearm: ConvexPolygon,
    /// Order: thumb, index, middle, ring, little.
    pub fingers: [Capsule; 5],
    /// Palm edges on the little-finger and thumb sides (`x`).
    pub palm_left: f64,
    pub palm_right: f64,
    /// Right edge `x` of index, middle, ring, little at the base line.
    pub base_right_edges: [f64; 4],
    /// Valley between index and thumb (upper thumb edge meets the palm edge).
    pub thumb_valley: Coord,
    /// Lower thumb edge crossing the palm-edge column: the wrist line anchor.
    pub wrist_point: Coord,
    /// Two points on the lower thumb edge.
    pub thumb_lower_edge: (Coord, Coord),
}

impl HandGeometry {
    pub fn build(a: &Anatomy) -> Result<Self> {
        for (i, f) in a.fingers.iter().enumerate() {
            if !(f.base_width > 4.0 && f.length > f.base_width && f.taper > 0.3 && f.taper <= 1.0) {
                return Err(Error::invalid(format!("finger {i}: implausible shape {f:?}")));
            }
        }
        let long = &a.fingers[1..];
        // little..index must fan out so neighbouring fingers never touch.
        for pair in long.windows(2) {
            if pair[0].angle_deg - pair[1].angle_deg < 3.0 {
                return Err(Error::invalid(format!(
                    "neighbouring fingers converge ({:.1} vs {:.1} deg)",
                    pair[0].angle_deg, pair[1].angle_deg
                )));
            }
        }
        let thumb = a.fingers[0];
        if !(15.0..=42.0).contains(&thumb.angle_deg) || thumb.angle_deg <= long[0].angle_deg + 10.0 {
            return Err(Error::invalid(format!(
                "thumb abduction {:.1} deg out of range",
                thumb.angle_deg
            )));
        }
        if a.base_gap < 3.0 || !(0.1..=0.7).contains(&a.narrowing_slope) {
            return Err(Error::invalid("base gap or palm narrowing out of range"));
        }

        // Lay out little, ring, middle, index left to right on the base line.
        let half_cuts: Vec<f64> = long
            .iter()
            .map(|f| 0.5 * f.base_width / f.angle_deg.to_radians().cos())
            .collect();
        let palm_width: f64 = half_cuts.iter().map(|h| 2.0 * h).sum::<f64>() + 3.0 * a.base_gap;
        let palm_left = -0.5 * palm_width;
        let palm_right = 0.5 * palm_width;

        let mut capsules = [Capsule {
            a: (0.0, 0.0),
            b: (0.0, -1.0),
            ra: 1.0,
            rb: 1.0,
        }; 5];
        let mut base_right_edges = [0.0; 4];
        let mut cursor = palm_left;
        for order in 0..4 {
            // order 0 = little (finger index 4) ... order 3 = index (finger index 1)
            let fi = 4 - order;
            let f = a.fingers[fi];
            let half = half_cuts[fi - 1];
            let cx = cursor + half;
            base_right_edges[fi - 1] = cursor + 2.0 * half;
            cursor += 2.0 * half + a.base_gap;
            let t = f.angle_deg.to_radians();
            let dir = (t.sin(), -t.cos());
            let r0 = 0.5 * f.base_width;
            let rt = r0 * f.taper;
            let slope = (r0 - rt) / f.length;
            capsules[fi] = Capsule {
                a: add((cx, 0.0), scale(dir, -FINGER_ROOT_DEPTH)),
                b: add((cx, 0.0), scale(dir, f.length)),
                ra: r0 + slope * FINGER_ROOT_DEPTH,
                rb: rt,
            };
        }

        let t = thumb.angle_deg.to_radians();
        let dir = (t.sin(), -t.cos());
        let anchor = (palm_right, a.thumb_attach);
        let r0 = 0.5 * thumb.base_width;
        let rt = r0 * thumb.taper;
        let slope = (r0 - rt) / thumb.length;
        let thumb_cap = Capsule {
            a: add(anchor, scale(dir, -THUMB_ROOT_DEPTH)),
            b: add(anchor, scale(dir, thumb.length)),
            ra: r0 + slope * THUMB_ROOT_DEPTH,
            rb: rt,
        };
        capsules[0] = thumb_cap;

        // Edge crossings with the palm-edge column x = palm_right. Edge points are
        // affine in the axial offset, so one secant step is exact.
        let crossing = |side: f64| -> Coord {
            let p0 = thumb_cap.edge_point(0.0, side);
            let p1 = thumb_cap.edge_point(THUMB_ROOT_DEPTH, side);
            let s = (palm_right - p0.0) / (p1.0 - p0.0) * THUMB_ROOT_DEPTH;
            thumb_cap.edge_point(s, side)
        };
        // Travel direction runs root -> tip (up and right): its left side faces
        // the index finger.
        let thumb_valley = crossing(-1.0);
        let wrist_point = crossing(1.0);
        let thumb_lower_edge = (
            thumb_cap.edge_point(THUMB_ROOT_DEPTH, 1.0),
            thumb_cap.edge_point(THUMB_ROOT_DEPTH + 0.5 * thumb.length, 1.0),
        );
        if !(thumb_valley.1 > 10.0 && wrist_point.1 > thumb_valley.1 + 10.0) {
            return Err(Error::invalid("thumb attaches too close to the finger base line"));
        }

        let s = a.narrowing_slope;
        let right_turn = 0.5 * (thumb_valley.1 + wrist_point.1);
        let left_turn = wrist_point.1 + 20.0;
        let rn = a.thumb_side_narrowing;
        let ln = a.little_side_narrowing;
        if palm_width - rn - ln < 0.4 * palm_width {
            return Err(Error::invalid("wrist narrower than 40% of the palm"));
        }
        let right_low = (palm_right - rn, right_turn + rn / s);
        let left_low = (palm_left + ln, left_turn + ln / s);
        let palm = ConvexPolygon {
            vertices: vec![
                (palm_left, 0.0),
                (palm_right, 0.0),
                (palm_right, right_turn),
                right_low,
                left_low,
                (palm_left, left_turn),
            ],
        };
        // The waist is concave, so the forearm is a separate piece.
        let forearm_top = right_low.1.min(left_low.1);
        let forearm = ConvexPolygon {
            vertices: vec![
                (left_low.0, forearm_top),
                (right_low.0, forearm_top),
                (right_low.0, FOREARM_END),
                (left_low.0, FOREARM_END),
            ],
        };

        Ok(HandGeometry {
            palm,
            forearm,
            fingers: capsules,
            palm_left,
            palm_right,
            base_right_edges,
            thumb_valley,
            wrist_point,
            thumb_lower_edge,
        })
    }

    pub fn contains(&self, p: Coord) -> bool {
        if self.palm.contains(p) || self.forearm.contains(p) {
            return true;
        }
        self.fingers.iter().any(|c| {
            let (lo, hi) = c.bounds();
            p.0 >= lo.0 && p.0 <= hi.0 && p.1 >= lo.1 && p.1 <= hi.1 && c.contains(p)
        })
    }

    /// Tip-cap centre of finger `i`.
    pub fn tip(&self, i: usize) -> Coord {
        self.fingers[i].b
    }

    /// Left and right valley landmarks of finger `i`: the two ends of the
    /// straight segment that closes the finger outline.
    pub fn valleys(&self, i: usize) -> (Coord, Coord) {
        let e = &self.base_right_edges;
        match i {
            0 => (self.thumb_valley, self.wrist_point),
            1 => ((e[1], 0.0), self.thumb_valley),
            2 => ((e[2], 0.0), (e[1], 0.0)),
            3 => ((e[3], 0.0), (e[2], 0.0)),
            _ => ((self.palm_left, self.wrist_point.1), (e[3], 0.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn untapered_capsule_is_stadium() {
        let c = Capsule {
            a: (0.0, 0.0),
            b: (0.0, -10.0),
            ra: 2.0,
            rb: 2.0,
        };
        assert!(c.contains((1.9, -5.0)));
        assert!(!c.contains((2.1, -5.0)));
        assert!(c.contains((0.0, -11.9)));
        assert!(!c.contains((0.0, -12.1)));
        assert!(c.contains((0.0, 1.9)));
    }

    #[test]
    fn tapered_capsule_boundary() {
        let c = Capsule {
            a: (0.0, 0.0),
            b: (0.0, -100.0),
            ra: 10.0,
            rb: 6.0,
        };
        // halfway the radius is about 8
        assert!(c.contains((7.9, -50.0)));
        assert!(!c.contains((8.1, -50.0)));
        let e = c.edge_point(50.0, 1.0);
        assert!((e.0 - 8.0).abs() < 1e-9 && (e.1 + 50.0).abs() < 1e-9);
    }

    #[test]
    fn convex_polygon() {
        let p = ConvexPolygon {
            vertices: vec![(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)],
        };
        assert!(p.contains((2.0, 2.0)));
        assert!(p.contains((0.0, 2.0)));
        assert!(!p.contains((5.0, 2.0)));
    }

    #[test]
    fn default_hand_landmarks() {
        let g = HandGeometry::build(&Anatomy::default()).unwrap();
        assert!((g.thumb_valley.0 - g.palm_right).abs() < 1e-9);
        assert!((g.wrist_point.0 - g.palm_right).abs() < 1e-9);
        assert!(g.wrist_point.1 > g.thumb_valley.1);
        // the landmarks sit on the hand outline
        assert!(g.contains((g.palm_right - 0.5, g.thumb_valley.1)));
        assert!(!g.contains((g.palm_right + 0.5, g.thumb_valley.1 - 2.0)));
        for i in 0..5 {
            assert!(g.contains(g.tip(i)));
        }
    }

    #[test]
    fn converging_fingers_rejected() {
        let mut a = Anatomy::default();
        a.fingers[2].angle_deg = a.fingers[3].angle_deg + 1.0;
        assert!(HandGeometry::build(&a).is_err());
    }
}
