//! Rasterization helpers.

/// Bresenham line from `a` to `b`, both endpoints included. Consecutive points
/// are 8-adjacent.
pub fn line_points(a: (isize, isize), b: (isize, isize)) -> Vec<(isize, isize)> {
    let (mut x, mut y) = a;
    let dx = (b.0 - a.0).abs();
    let dy = -(b.1 - a.1).abs();
    let sx = if a.0 < b.0 { 1 } else { -1 };
    let sy = if a.1 < b.1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = Vec::with_capacity((dx - dy) as usize + 1);
    loop {
        out.push((x, y));
        if (x, y) == b {
            return out;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_adjacency() {
        for (a, b) in [((0, 0), (7, 3)), ((5, 5), (5, -4)), ((3, 1), (-6, 9)), ((2, 2), (2, 2))] {
            let pts = line_points(a, b);
            assert_eq!(pts[0], a);
            assert_eq!(*pts.last().unwrap(), b);
            let n = (b.0 - a.0).abs().max((b.1 - a.1).abs()) as usize + 1;
            assert_eq!(pts.len(), n);
            for w in pts.windows(2) {
                assert!((w[0].0 - w[1].0).abs() <= 1 && (w[0].1 - w[1].1).abs() <= 1);
            }
        }
    }
}
