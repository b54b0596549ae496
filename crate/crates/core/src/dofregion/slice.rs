use super::DofPolytope;
use crate::{Error, Result};

/// Vertices of the cross-section of `poly` in coordinates `x` and `y` with the other
/// coordinates held at their values in `fixed`, in counter-clockwise order. Empty
/// when the section is empty.
pub fn slice_2d(poly: &DofPolytope, x: usize, y: usize, fixed: &[f64]) -> Result<Vec<(f64, f64)>> {
    poly.check_dim(fixed.len())?;
    if x == y || x >= poly.dim() || y >= poly.dim() {
        return Err(Error::Precondition(format!("slice axes must be two distinct coordinates, got {x}, {y}")));
    }
    // half-planes a x + b y <= r, nonnegativity included
    let mut planes = vec![(-1.0, 0.0, 0.0), (0.0, -1.0, 0.0)];
    for q in &poly.inequalities {
        let rest: f64 = (0..poly.dim())
            .filter(|&n| n != x && n != y)
            .map(|n| q.coeffs[n] as f64 * fixed[n])
            .sum();
        planes.push((q.coeffs[x] as f64, q.coeffs[y] as f64, q.rhs as f64 - rest));
    }
    let tol = 1e-9;
    let feasible = |px: f64, py: f64| planes.iter().all(|&(a, b, r)| a * px + b * py <= r + tol);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (i, &(a1, b1, r1)) in planes.iter().enumerate() {
        for &(a2, b2, r2) in &planes[i + 1..] {
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-12 {
                continue;
            }
            let px = (r1 * b2 - r2 * b1) / det;
            let py = (a1 * r2 - a2 * r1) / det;
            if feasible(px, py) && !pts.iter().any(|&(qx, qy)| (qx - px).abs() < tol && (qy - py).abs() < tol) {
                pts.push((px + 0.0, py + 0.0));
            }
        }
    }
    if pts.len() > 2 {
        let n = pts.len() as f64;
        let (cx, cy) = pts.iter().fold((0.0, 0.0), |(sx, sy), &(px, py)| (sx + px / n, sy + py / n));
        pts.sort_by(|p, q| (p.1 - cy).atan2(p.0 - cx).total_cmp(&(q.1 - cy).atan2(q.0 - cx)));
    }
    Ok(pts)
}
