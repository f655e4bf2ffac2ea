//! Polyline self-intersection search.

use num_complex::Complex64;

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn on_segment(p: Complex64, a: Complex64, b: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed segments `[a, b]` and `[c, d]` share a point.
pub fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

/// Consecutive segments `[a, b]`, `[b, c]` overlap beyond their shared
/// vertex (the polyline folds back on itself).
fn folds_back(a: Complex64, b: Complex64, c: Complex64) -> bool {
    if cross(a, b, c) != 0.0 {
        return false;
    }
    let u = b - a;
    let v = c - b;
    u.re * v.re + u.im * v.im < 0.0
}

/// Indices `(i, j)`, `i < j`, of the first pair of intersecting segments
/// `[p_i, p_{i+1}]` and `[p_j, p_{j+1}]`, found by a sweep over `x`.
/// Consecutive segments only count when they fold back.
pub fn first_self_intersection(points: &[Complex64]) -> Option<(usize, usize)> {
    if points.len() < 3 {
        return None;
    }
    let segs = points.len() - 1;
    for i in 0..segs - 1 {
        if folds_back(points[i], points[i + 1], points[i + 2]) {
            return Some((i, i + 1));
        }
    }
    let min_x = |i: usize| points[i].re.min(points[i + 1].re);
    let max_x = |i: usize| points[i].re.max(points[i + 1].re);
    let mut order: Vec<usize> = (0..segs).collect();
    order.sort_by(|&a, &b| min_x(a).total_cmp(&min_x(b)));

    let mut found: Option<(usize, usize)> = None;
    for (pos, &a) in order.iter().enumerate() {
        let right = max_x(a);
        let (a_lo, a_hi) = (points[a].im.min(points[a + 1].im), points[a].im.max(points[a + 1].im));
        for &b in &order[pos + 1..] {
            if min_x(b) > right {
                break;
            }
            if a.abs_diff(b) < 2 {
                continue;
            }
            let (b_lo, b_hi) = (points[b].im.min(points[b + 1].im), points[b].im.max(points[b + 1].im));
            if b_lo > a_hi || a_lo > b_hi {
                continue;
            }
            if segments_intersect(points[a], points[a + 1], points[b], points[b + 1]) {
                let pair = (a.min(b), a.max(b));
                if found.is_none_or(|f| pair < f) {
                    found = Some(pair);
                }
            }
        }
    }
    found
}
