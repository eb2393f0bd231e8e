use crate::cubic::{roots, CubicDirectionField};
use crate::error::{Error, Result};
use crate::jets::{Point, C64};
use crate::linalg::best_matching;

/// Image of `p` under the flow of `w₁(x − x₀)∂x + w₂(y − y₀)∂y` at time `a`.
pub fn flow_point(p: Point, center: Point, weights: [f64; 2], a: f64) -> Point {
    let (k1, k2) = ((weights[0] * a).exp(), (weights[1] * a).exp());
    Point::new(center.x + (p.x - center.x) * k1, center.y + (p.y - center.y) * k2)
}

fn leaf_directions(field: &CubicDirectionField, p: Point) -> Result<[[C64; 2]; 3]> {
    Ok(roots(field, p)?.map(|r| [r[1], -r[0]]))
}

/// Largest projective distance, over the samples, between the pushed-forward
/// web directions and the directions at the image points.
pub fn symmetry_residual(
    field: &CubicDirectionField,
    weights: [f64; 2],
    samples: &[Point],
    a: f64,
    center: Point,
) -> Result<f64> {
    let (k1, k2) = ((weights[0] * a).exp(), (weights[1] * a).exp());
    let mut worst: f64 = 0.0;
    for &p in samples {
        let image = flow_point(p, center, weights, a);
        if !image.is_finite() {
            return Err(Error::NonFinite);
        }
        let here = leaf_directions(field, p)?.map(|d| [d[0] * k1, d[1] * k2]);
        let there = leaf_directions(field, image)?;
        worst = worst.max(best_matching(&here, &there).1);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::c;

    #[test]
    fn constant_web_is_fixed_by_uniform_scaling() {
        let f = CubicDirectionField::constant([1.0, -2.0, 0.5, 3.0].map(c));
        let samples = [Point::real(0.3, 0.4), Point::new(C64::new(0.1, 0.2), c(-1.0))];
        let r = symmetry_residual(&f, [1.0, 1.0], &samples, 0.3, Point::real(0.0, 0.0)).unwrap();
        assert!(r < 1e-14);
    }
}
