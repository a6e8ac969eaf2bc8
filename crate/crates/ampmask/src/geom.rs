//! Convex polygons in the (Δ_X, Δ_Y) information plane.
//!
//! Regions are stored canonically: counter-clockwise, starting from the
//! lexicographically smallest vertex, with no three consecutive collinear
//! vertices. Degenerate regions are first-class — an empty set, a single
//! point, or a segment all arise at extreme rate pairs and must survive
//! intersection and export.

use serde::{Deserialize, Serialize};

/// Collinearity / dedup tolerance on vertex coordinates (bits).
const VERTEX_EPS: f64 = 1e-9;
/// Inclusive tolerance for half-plane clipping.
const CLIP_EPS: f64 = 1e-12;

pub type Point = (f64, f64);

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn dist(a: Point, b: Point) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = (b.0 - a.0, b.1 - a.1);
    let len2 = d.0 * d.0 + d.1 * d.1;
    if len2 <= CLIP_EPS * CLIP_EPS {
        return dist(p, a);
    }
    let t = (((p.0 - a.0) * d.0 + (p.1 - a.1) * d.1) / len2).clamp(0.0, 1.0);
    dist(p, (a.0 + t * d.0, a.1 + t * d.1))
}

/// Convex hull via Andrew's monotone chain: counter-clockwise, starting at the
/// lexicographically smallest point; collinear and near-duplicate (1e-9)
/// points are dropped. Degenerate inputs yield 0, 1, or 2 points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points
        .iter()
        .copied()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() <= VERTEX_EPS && (a.1 - b.1).abs() <= VERTEX_EPS);
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    // lower hull
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= VERTEX_EPS
        {
            hull.pop();
        }
        hull.push(p);
    }
    // upper hull
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= VERTEX_EPS
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop(); // last point repeats the first
    hull
}

/// Closed half-plane `n·p ≤ c`.
#[derive(Debug, Clone, Copy)]
struct Halfplane {
    n: Point,
    c: f64,
}

impl Halfplane {
    fn holds(&self, p: Point) -> bool {
        self.n.0 * p.0 + self.n.1 * p.1 <= self.c + CLIP_EPS
    }

    fn value(&self, p: Point) -> f64 {
        self.n.0 * p.0 + self.n.1 * p.1 - self.c
    }
}

/// Sutherland–Hodgman step: clip a convex vertex loop by one half-plane.
/// Works for degenerate loops of one or two vertices.
fn clip_halfplane(subject: &[Point], hp: &Halfplane) -> Vec<Point> {
    if subject.is_empty() {
        return vec![];
    }
    if subject.len() == 1 {
        return if hp.holds(subject[0]) { subject.to_vec() } else { vec![] };
    }
    let mut out = Vec::with_capacity(subject.len() + 2);
    for i in 0..subject.len() {
        let s = subject[i];
        let e = subject[(i + 1) % subject.len()];
        let s_in = hp.holds(s);
        let e_in = hp.holds(e);
        if s_in {
            out.push(s);
        }
        if s_in != e_in {
            let vs = hp.value(s);
            let ve = hp.value(e);
            let denom = ve - vs;
            if denom.abs() > CLIP_EPS {
                let t = (-vs / denom).clamp(0.0, 1.0);
                out.push((s.0 + t * (e.0 - s.0), s.1 + t * (e.1 - s.1)));
            }
        }
    }
    out
}

/// Convex region of achievable (Δ_X, Δ_Y) pairs, possibly degenerate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region2D {
    vertices: Vec<Point>,
}

impl Region2D {
    pub fn empty() -> Self {
        Self { vertices: vec![] }
    }

    /// Convex hull of arbitrary points, canonicalized.
    pub fn from_points(points: &[Point]) -> Self {
        Self { vertices: convex_hull(points) }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area; zero for degenerate regions.
    pub fn area(&self) -> f64 {
        if self.vertices.len() < 3 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..self.vertices.len() {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % self.vertices.len()];
            acc += a.0 * b.1 - b.0 * a.1;
        }
        acc / 2.0
    }

    /// Euclidean distance from `p` to the region (0 inside); infinite for the
    /// empty region.
    pub fn distance(&self, p: Point) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => dist(p, self.vertices[0]),
            2 => point_segment_distance(p, self.vertices[0], self.vertices[1]),
            n => {
                let inside = (0..n).all(|i| {
                    cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= -CLIP_EPS
                });
                if inside {
                    return 0.0;
                }
                (0..n)
                    .map(|i| {
                        point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n])
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// True iff `p` lies inside or within `tol` of the region boundary.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.distance(p) <= tol + CLIP_EPS
    }

    /// Intersection of two convex regions (possibly empty or degenerate).
    pub fn intersect(&self, other: &Region2D) -> Region2D {
        if self.is_empty() || other.is_empty() {
            return Region2D::empty();
        }
        let mut pts = self.vertices.clone();
        for hp in other.halfplanes() {
            pts = clip_halfplane(&pts, &hp);
            if pts.is_empty() {
                return Region2D::empty();
            }
        }
        Region2D::from_points(&pts)
    }

    /// Intersection with the box `[0, xmax] × [0, ymax]`.
    pub fn clip_to_box(&self, xmax: f64, ymax: f64) -> Region2D {
        let mut pts = self.vertices.clone();
        for hp in [
            Halfplane { n: (1.0, 0.0), c: xmax },
            Halfplane { n: (-1.0, 0.0), c: 0.0 },
            Halfplane { n: (0.0, 1.0), c: ymax },
            Halfplane { n: (0.0, -1.0), c: 0.0 },
        ] {
            pts = clip_halfplane(&pts, &hp);
        }
        Region2D::from_points(&pts)
    }

    /// Vertex containment test: every vertex of `self` within `tol` of
    /// `other`. For convex regions this is equivalent to set inclusion
    /// (up to `tol`).
    pub fn subset_of(&self, other: &Region2D, tol: f64) -> bool {
        self.vertices.iter().all(|&v| other.contains(v, tol))
    }

    /// Same canonical vertex list within `tol` per coordinate.
    pub fn approx_eq(&self, other: &Region2D, tol: f64) -> bool {
        self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .zip(&other.vertices)
                .all(|(a, b)| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol)
    }

    /// Largest convexity violation: most negative consecutive-edge cross
    /// product (0 for degenerate regions). Canonical regions satisfy ≥ -1e-9.
    pub fn convexity_residual(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        (0..n)
            .map(|i| {
                cross(
                    self.vertices[i],
                    self.vertices[(i + 1) % n],
                    self.vertices[(i + 2) % n],
                )
            })
            .fold(0.0_f64, f64::min)
    }

    fn halfplanes(&self) -> Vec<Halfplane> {
        match self.vertices.len() {
            0 => vec![],
            1 => {
                let v = self.vertices[0];
                vec![
                    Halfplane { n: (1.0, 0.0), c: v.0 },
                    Halfplane { n: (-1.0, 0.0), c: -v.0 },
                    Halfplane { n: (0.0, 1.0), c: v.1 },
                    Halfplane { n: (0.0, -1.0), c: -v.1 },
                ]
            }
            2 => {
                let (u, v) = (self.vertices[0], self.vertices[1]);
                let d = (v.0 - u.0, v.1 - u.1);
                let n1 = (d.1, -d.0);
                vec![
                    // the line itself, from both sides
                    Halfplane { n: n1, c: n1.0 * u.0 + n1.1 * u.1 },
                    Halfplane { n: (-n1.0, -n1.1), c: -(n1.0 * u.0 + n1.1 * u.1) },
                    // endpoint caps
                    Halfplane { n: (-d.0, -d.1), c: -(d.0 * u.0 + d.1 * u.1) },
                    Halfplane { n: d, c: d.0 * v.0 + d.1 * v.1 },
                ]
            }
            n => (0..n)
                .map(|i| {
                    let v = self.vertices[i];
                    let w = self.vertices[(i + 1) % n];
                    let nrm = (w.1 - v.1, -(w.0 - v.0));
                    Halfplane { n: nrm, c: nrm.0 * v.0 + nrm.1 * v.1 }
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::testutil::assert_close;

    fn unit_square() -> Region2D {
        Region2D::from_points(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    #[test]
    fn hull_canonical_form() {
        let hull = convex_hull(&[
            (1.0, 1.0),
            (0.0, 0.0),
            (1.0, 0.0),
            (0.5, 0.5), // interior
            (0.5, 0.0), // collinear on an edge
            (0.0, 1.0),
        ]);
        assert_eq!(hull, vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    }

    #[test]
    fn degenerate_regions() {
        assert!(Region2D::empty().is_empty());
        assert_eq!(Region2D::from_points(&[]).vertices().len(), 0);
        let point = Region2D::from_points(&[(0.3, 0.4), (0.3, 0.4)]);
        assert_eq!(point.vertices(), &[(0.3, 0.4)]);
        assert_eq!(point.area(), 0.0);
        let segment = Region2D::from_points(&[(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]);
        assert_eq!(segment.vertices(), &[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(segment.area(), 0.0);
    }

    #[test]
    fn area_and_convexity() {
        let sq = unit_square();
        assert_close(sq.area(), 1.0, 1e-12);
        assert!(sq.convexity_residual() >= -1e-9);
        let tri = Region2D::from_points(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]);
        assert_close(tri.area(), 2.0, 1e-12);
    }

    #[test]
    fn containment_cases() {
        let sq = unit_square();
        assert!(sq.contains((0.5, 0.5), 0.0)); // centroid
        assert!(!sq.contains((5.0, 5.0), 0.1)); // far outside
        assert!(sq.contains((0.0, 0.0), 0.0)); // boundary vertex, zero tol
        assert!(sq.contains((1.0, 0.5), 0.0)); // edge midpoint
        assert!(sq.contains((1.05, 0.5), 0.1)); // near miss within tol
        assert!(!sq.contains((1.05, 0.5), 0.01));
        // degenerate containment
        let point = Region2D::from_points(&[(0.3, 0.4)]);
        assert!(point.contains((0.3, 0.4), 0.0));
        assert!(!point.contains((0.4, 0.4), 0.05));
        let seg = Region2D::from_points(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!(seg.contains((0.5, 0.0), 0.0));
        assert!(seg.contains((0.5, 0.05), 0.1));
        assert!(!seg.contains((1.5, 0.0), 0.1));
        assert!(!Region2D::empty().contains((0.0, 0.0), 10.0));
    }

    #[test]
    fn self_intersection_is_identity() {
        let sq = unit_square();
        assert!(sq.intersect(&sq).approx_eq(&sq, 1e-9));
        let tri = Region2D::from_points(&[(0.1, 0.1), (0.9, 0.2), (0.4, 0.8)]);
        assert!(tri.intersect(&tri).approx_eq(&tri, 1e-9));
    }

    #[test]
    fn disjoint_intersection_is_empty() {
        let a = unit_square();
        let b = Region2D::from_points(&[(2.0, 2.0), (3.0, 2.0), (3.0, 3.0), (2.0, 3.0)]);
        assert!(a.intersect(&b).is_empty());
        assert!(b.intersect(&a).is_empty());
    }

    #[test]
    fn square_triangle_intersection_matches_rasterization() {
        // the hypotenuse x + y = 2 touches the square only at (1,1), so the
        // intersection is the unit square itself
        let sq = unit_square();
        let tri = Region2D::from_points(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]);
        let inter = sq.intersect(&tri);
        assert!(inter.approx_eq(&sq, 1e-9));

        // rasterization oracle: count containment on a 0.001-step lattice over
        // the bounding box and compare the measured area
        let step = 0.001;
        let mut hits = 0u64;
        let mut total = 0u64;
        let cells = (1.0 / step) as usize;
        for i in 0..cells {
            for jj in 0..cells {
                let p = ((i as f64 + 0.5) * step, (jj as f64 + 0.5) * step);
                total += 1;
                if inter.contains(p, 0.0) {
                    hits += 1;
                }
            }
        }
        let raster_area = hits as f64 / total as f64; // box area is 1
        assert_close(raster_area, inter.area(), 0.01);
    }

    #[test]
    fn partial_overlap() {
        let sq = unit_square();
        let shifted = Region2D::from_points(&[(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)]);
        let inter = sq.intersect(&shifted);
        let want = Region2D::from_points(&[(0.5, 0.5), (1.0, 0.5), (1.0, 1.0), (0.5, 1.0)]);
        assert!(inter.approx_eq(&want, 1e-9), "got {:?}", inter.vertices());
        assert_close(inter.area(), 0.25, 1e-9);
    }

    #[test]
    fn degenerate_intersections() {
        let sq = unit_square();
        let inner = Region2D::from_points(&[(0.25, 0.25)]);
        assert!(sq.intersect(&inner).approx_eq(&inner, 1e-9));
        let outer = Region2D::from_points(&[(2.0, 2.0)]);
        assert!(sq.intersect(&outer).is_empty());
        assert!(outer.intersect(&sq).is_empty());

        // segment crossing the square boundary is trimmed
        let seg = Region2D::from_points(&[(0.5, 0.5), (2.0, 0.5)]);
        let cut = seg.intersect(&sq);
        let want = Region2D::from_points(&[(0.5, 0.5), (1.0, 0.5)]);
        assert!(cut.approx_eq(&want, 1e-9), "got {:?}", cut.vertices());

        // two crossing segments meet in a point
        let d1 = Region2D::from_points(&[(0.0, 0.0), (1.0, 1.0)]);
        let d2 = Region2D::from_points(&[(0.0, 1.0), (1.0, 0.0)]);
        let cross_pt = d1.intersect(&d2);
        assert!(cross_pt.contains((0.5, 0.5), 1e-9));
        assert!(!cross_pt.contains((0.6, 0.6), 1e-3));
    }

    #[test]
    fn box_clipping() {
        let big = Region2D::from_points(&[(-1.0, -1.0), (3.0, -1.0), (3.0, 3.0), (-1.0, 3.0)]);
        let clipped = big.clip_to_box(1.0, 0.5);
        let want = Region2D::from_points(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.0, 0.5)]);
        assert!(clipped.approx_eq(&want, 1e-9));
    }

    #[test]
    fn subset_relation() {
        let sq = unit_square();
        let inner = Region2D::from_points(&[(0.2, 0.2), (0.8, 0.2), (0.5, 0.8)]);
        assert!(inner.subset_of(&sq, 0.0));
        assert!(!sq.subset_of(&inner, 0.0));
        assert!(Region2D::empty().subset_of(&inner, 0.0));
        assert!(sq.subset_of(&sq, 0.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_points(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
            proptest::collection::vec((0.0f64..1.5, 0.0f64..1.0), 3..n)
        }

        proptest! {
            #[test]
            fn hull_contains_inputs(pts in arb_points(24)) {
                let region = Region2D::from_points(&pts);
                for &p in &pts {
                    prop_assert!(region.contains(p, 1e-7));
                }
                prop_assert!(region.convexity_residual() >= -1e-9);
            }

            #[test]
            fn intersection_shrinks(a in arb_points(12), b in arb_points(12)) {
                let ra = Region2D::from_points(&a);
                let rb = Region2D::from_points(&b);
                let i1 = ra.intersect(&rb);
                let i2 = rb.intersect(&ra);
                prop_assert!(i1.area() <= ra.area() + 1e-9);
                prop_assert!(i1.area() <= rb.area() + 1e-9);
                prop_assert!((i1.area() - i2.area()).abs() <= 1e-6);
                prop_assert!(i1.subset_of(&ra, 1e-6));
                prop_assert!(i1.subset_of(&rb, 1e-6));
            }
        }
    }
}
