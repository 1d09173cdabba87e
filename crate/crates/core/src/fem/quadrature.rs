//! Quadrature rules on triangles in barycentric form.

use crate::scalar::Real;

/// Points are barycentric triples; weights sum to one and are scaled by the
/// triangle area at use.
#[derive(Debug, Clone)]
pub struct TriangleRule<T> {
    pub points: Vec<[T; 3]>,
    pub weights: Vec<T>,
}

impl<T: Real> TriangleRule<T> {
    /// Edge-midpoint rule, exact for quadratics.
    pub fn edge_midpoints() -> Self {
        let (h, z, w) = (T::lit(0.5), T::zero(), T::one() / T::lit(3.0));
        Self { points: vec![[z, h, h], [h, z, h], [h, h, z]], weights: vec![w; 3] }
    }

    /// Six-point symmetric rule, exact for polynomials of degree 4.
    pub fn degree4() -> Self {
        let (a1, b1, w1) = (0.108103018168070, 0.445948490915965, 0.223381589678011);
        let (a2, b2, w2) = (0.816847572980459, 0.091576213509771, 0.109951743655322);
        let mut points = Vec::with_capacity(6);
        let mut weights = Vec::with_capacity(6);
        for (a, b, w) in [(a1, b1, w1), (a2, b2, w2)] {
            let (a, b) = (T::lit(a), T::lit(b));
            points.extend([[a, b, b], [b, a, b], [b, b, a]]);
            weights.extend([T::lit(w); 3]);
        }
        Self { points, weights }
    }

    /// Cartesian quadrature points on a triangle with the given corners.
    pub fn map(&self, corners: &[[T; 2]; 3]) -> impl Iterator<Item = ([T; 2], T)> + '_ {
        let c = *corners;
        self.points.iter().zip(&self.weights).map(move |(l, &w)| {
            let x = l[0] * c[0][0] + l[1] * c[1][0] + l[2] * c[2][0];
            let y = l[0] * c[0][1] + l[1] * c[1][1] + l[2] * c[2][1];
            ([x, y], w)
        })
    }
}

/// Three-point Gauss–Legendre rule on `[0, 1]`, exact for degree 5.
pub fn gauss3_unit<T: Real>() -> [(T, T); 3] {
    let s = T::lit(0.6).sqrt() * T::lit(0.5);
    let h = T::lit(0.5);
    [(h - s, T::lit(5.0 / 18.0)), (h, T::lit(8.0 / 18.0)), (h + s, T::lit(5.0 / 18.0))]
}
