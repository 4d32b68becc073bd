//! Oriented footprint-box intersection over union.
//!
//! Boxes are rectangles centered on the object position with length along the
//! heading. Intersection area comes from Sutherland-Hodgman clipping of one
//! convex polygon by the other; areas use the shoelace formula.

use crate::angles::DEG_TO_RAD;
use nalgebra::Vector2;

/// Corner points of an oriented rectangle, counter-clockwise.
pub fn box_corners(
    cx: f64,
    cy: f64,
    length: f64,
    width: f64,
    theta_deg: f64,
) -> [Vector2<f64>; 4] {
    let th = theta_deg * DEG_TO_RAD;
    let (s, c) = th.sin_cos();
    let hl = 0.5 * length;
    let hw = 0.5 * width;
    let local = [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)];
    local.map(|(x, y)| Vector2::new(cx + x * c - y * s, cy + x * s + y * c))
}

/// Signed polygon area via the shoelace formula (positive for CCW winding).
fn signed_area(poly: &[Vector2<f64>]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    0.5 * acc
}

/// Clips `subject` by the convex CCW polygon `clip` (Sutherland-Hodgman).
fn clip_polygon(subject: &[Vector2<f64>], clip: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    let mut output: Vec<Vector2<f64>> = subject.to_vec();
    let m = clip.len();
    for e in 0..m {
        if output.is_empty() {
            break;
        }
        let a = clip[e];
        let b = clip[(e + 1) % m];
        // inside = left of directed edge a->b for CCW clip polygon
        let inside = |p: &Vector2<f64>| (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0;
        let input = std::mem::take(&mut output);
        let n = input.len();
        for i in 0..n {
            let cur = input[i];
            let prev = input[(i + n - 1) % n];
            let cur_in = inside(&cur);
            let prev_in = inside(&prev);
            if cur_in {
                if !prev_in {
                    output.push(edge_intersection(prev, cur, a, b));
                }
                output.push(cur);
            } else if prev_in {
                output.push(edge_intersection(prev, cur, a, b));
            }
        }
    }
    output
}

fn edge_intersection(
    p1: Vector2<f64>,
    p2: Vector2<f64>,
    a: Vector2<f64>,
    b: Vector2<f64>,
) -> Vector2<f64> {
    let d1 = (b.x - a.x) * (p1.y - a.y) - (b.y - a.y) * (p1.x - a.x);
    let d2 = (b.x - a.x) * (p2.y - a.y) - (b.y - a.y) * (p2.x - a.x);
    let t = d1 / (d1 - d2);
    p1 + (p2 - p1) * t
}

/// Intersection over union of two oriented boxes, in [0, 1].
pub fn oriented_iou(
    a: (f64, f64, f64, f64, f64),
    b: (f64, f64, f64, f64, f64),
) -> f64 {
    let pa = box_corners(a.0, a.1, a.2, a.3, a.4);
    let pb = box_corners(b.0, b.1, b.2, b.3, b.4);
    let area_a = signed_area(&pa).abs();
    let area_b = signed_area(&pb).abs();
    if area_a <= 0.0 || area_b <= 0.0 {
        return 0.0;
    }
    let inter_poly = clip_polygon(&pa, &pb);
    let inter = signed_area(&inter_poly).abs();
    let union = area_a + area_b - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}
