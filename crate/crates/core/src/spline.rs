//! B-spline curves over routed control polygons.
//!
//! Each routed strand becomes a spline whose control points are the laid-out
//! positions of its path nodes. Strands that share a run of control points
//! evaluate to identical points along it (a degree-p spline is decided by p+1
//! consecutive control points, and at a knot by p of them), which is what
//! fuses parallel strands into drawn bundles.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// How the ends of the knot vector are treated.
///
/// `Clamp` repeats the first and last knot values degree+1 times so the
/// curve interpolates the end control points. `Duplicate` instead repeats
/// the first and last control points degree-1 times over a fully uniform
/// knot vector, which also pins the ends but keeps every span uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndMethod {
    Clamp,
    Duplicate,
}

/// A planar B-spline with integer-spaced knots.
#[derive(Debug, Clone)]
pub struct BSpline {
    degree: usize,
    control: Vec<Point>,
    knots: Vec<f64>,
}

impl BSpline {
    /// Builds a spline over `control` (at least two points).
    ///
    /// With `Clamp` the requested degree is capped at `control.len() - 1`
    /// so short strands degrade to lower-degree curves; `Duplicate` always
    /// has enough points after duplication.
    pub fn new(control: &[Point], degree: usize, end: EndMethod) -> BSpline {
        assert!(control.len() >= 2, "need at least two control points");
        assert!((1..=10).contains(&degree), "unsupported degree {degree}");
        match end {
            EndMethod::Clamp => {
                let p = degree.min(control.len() - 1);
                let n = control.len();
                let mut knots = vec![0.0; p + 1];
                for i in 1..=(n - p - 1) {
                    knots.push(i as f64);
                }
                let last = (n - p) as f64;
                knots.extend(std::iter::repeat(last).take(p + 1));
                debug_assert_eq!(knots.len(), n + p + 1);
                BSpline { degree: p, control: control.to_vec(), knots }
            }
            EndMethod::Duplicate => {
                let p = degree;
                let mut ctrl = Vec::with_capacity(control.len() + 2 * (p - 1));
                ctrl.extend(std::iter::repeat(control[0]).take(p - 1));
                ctrl.extend_from_slice(control);
                ctrl.extend(std::iter::repeat(*control.last().unwrap()).take(p - 1));
                let n = ctrl.len();
                let knots: Vec<f64> = (0..=(n + p)).map(|i| i as f64).collect();
                BSpline { degree: p, control: ctrl, knots }
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Control points after end treatment.
    pub fn control_points(&self) -> &[Point] {
        &self.control
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Parameter range over which the curve is defined.
    pub fn domain(&self) -> (f64, f64) {
        (self.knots[self.degree], self.knots[self.control.len()])
    }

    /// De Boor evaluation; parameters outside the domain are clamped to it.
    pub fn evaluate(&self, t: f64) -> Point {
        let p = self.degree;
        let n = self.control.len();
        let (lo, hi) = self.domain();
        let t = t.clamp(lo, hi);
        let inside = self.knots[p..=n].partition_point(|&x| x <= t);
        let k = (p + inside.max(1) - 1).min(n - 1);
        let mut d: Vec<Point> = (0..=p).map(|j| self.control[k - p + j]).collect();
        for r in 1..=p {
            for j in (r..=p).rev() {
                let i = k - p + j;
                let denom = self.knots[i + p - r + 1] - self.knots[i];
                let alpha = if denom == 0.0 { 0.0 } else { (t - self.knots[i]) / denom };
                d[j] = d[j - 1] * (1.0 - alpha) + d[j] * alpha;
            }
        }
        d[p]
    }

    /// Samples the curve as a polyline: `per_span` evenly spaced parameters
    /// in every non-empty knot span plus the final endpoint. Doubling
    /// `per_span` refines the previous parameter grid in place.
    pub fn sample_polyline(&self, per_span: usize) -> Vec<Point> {
        assert!(per_span >= 1);
        let p = self.degree;
        let n = self.control.len();
        let mut breaks: Vec<f64> = Vec::new();
        for &t in &self.knots[p..=n] {
            if breaks.last() != Some(&t) {
                breaks.push(t);
            }
        }
        let mut out = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            for i in 0..per_span {
                out.push(self.evaluate(a + (b - a) * (i as f64 / per_span as f64)));
            }
        }
        out.push(self.evaluate(*breaks.last().unwrap()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Cox-de Boor basis recursion, used as an independent oracle.
    fn basis(knots: &[f64], i: usize, p: usize, t: f64) -> f64 {
        if p == 0 {
            return if knots[i] <= t && t < knots[i + 1] { 1.0 } else { 0.0 };
        }
        let mut v = 0.0;
        let d1 = knots[i + p] - knots[i];
        if d1 > 0.0 {
            v += (t - knots[i]) / d1 * basis(knots, i, p - 1, t);
        }
        let d2 = knots[i + p + 1] - knots[i + 1];
        if d2 > 0.0 {
            v += (knots[i + p + 1] - t) / d2 * basis(knots, i + 1, p - 1, t);
        }
        v
    }

    fn oracle_eval(s: &BSpline, t: f64) -> Point {
        let mut acc = Point::new(0.0, 0.0);
        for (i, &c) in s.control_points().iter().enumerate() {
            acc = acc + c * basis(s.knots(), i, s.degree(), t);
        }
        acc
    }

    fn random_controls(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
        (0..n)
            .map(|_| Point::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)))
            .collect()
    }

    #[test]
    fn clamp_knot_vector_matches_convention() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, -1.0),
            Point::new(3.0, 0.0),
        ];
        let s = BSpline::new(&pts, 2, EndMethod::Clamp);
        assert_eq!(s.knots(), &[0.0, 0.0, 0.0, 1.0, 2.0, 2.0, 2.0]);
        assert_eq!(s.domain(), (0.0, 2.0));
        let c = BSpline::new(&random_controls(&mut ChaCha8Rng::seed_from_u64(1), 5), 3, EndMethod::Clamp);
        assert_eq!(c.knots(), &[0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn duplicate_knot_vector_is_uniform_with_repeated_ends() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, -1.0),
            Point::new(3.0, 0.0),
        ];
        let s = BSpline::new(&pts, 2, EndMethod::Duplicate);
        assert_eq!(s.control_points().len(), 6);
        assert_eq!(s.control_points()[0], s.control_points()[1]);
        assert_eq!(s.control_points()[4], s.control_points()[5]);
        let want: Vec<f64> = (0..=8).map(|i| i as f64).collect();
        assert_eq!(s.knots(), &want[..]);
        assert_eq!(s.domain(), (2.0, 6.0));
    }

    #[test]
    fn both_end_methods_interpolate_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for degree in [2, 3] {
            for end in [EndMethod::Clamp, EndMethod::Duplicate] {
                for n in [2usize, 3, 4, 7, 12] {
                    let pts = random_controls(&mut rng, n);
                    let s = BSpline::new(&pts, degree, end);
                    let (lo, hi) = s.domain();
                    assert!(s.evaluate(lo).dist(pts[0]) < 1e-12, "{end:?} d{degree} n{n} start");
                    assert!(
                        s.evaluate(hi).dist(*pts.last().unwrap()) < 1e-12,
                        "{end:?} d{degree} n{n} end"
                    );
                }
            }
        }
    }

    #[test]
    fn de_boor_matches_cox_de_boor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for degree in [1, 2, 3] {
            for end in [EndMethod::Clamp, EndMethod::Duplicate] {
                for n in [3usize, 5, 9] {
                    let pts = random_controls(&mut rng, n);
                    let s = BSpline::new(&pts, degree, end);
                    let (lo, hi) = s.domain();
                    for _ in 0..50 {
                        // Strictly interior, almost surely off every knot,
                        // where the order-zero basis indicator is unambiguous.
                        let t = rng.random_range(lo..hi);
                        let diff = s.evaluate(t).dist(oracle_eval(&s, t));
                        assert!(diff < 1e-10, "{end:?} d{degree} n{n} t{t}: {diff}");
                    }
                }
            }
        }
    }

    #[test]
    fn basis_functions_partition_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for degree in [2, 3] {
            for end in [EndMethod::Clamp, EndMethod::Duplicate] {
                let pts = random_controls(&mut rng, 8);
                let s = BSpline::new(&pts, degree, end);
                let (lo, hi) = s.domain();
                for i in 0..200 {
                    let t = lo + (hi - lo) * (i as f64 + 0.31) / 200.0;
                    let total: f64 = (0..s.control_points().len())
                        .map(|j| basis(s.knots(), j, s.degree(), t))
                        .sum();
                    assert!((total - 1.0).abs() < 1e-12, "{end:?} d{degree} t{t}: {total}");
                }
            }
        }
    }

    /// Axis-aligned bounds of a point set as (low corner, high corner).
    fn bounding_box(pts: &[Point]) -> (Point, Point) {
        let mut lo = Point::new(f64::MAX, f64::MAX);
        let mut hi = Point::new(f64::MIN, f64::MIN);
        for p in pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    #[test]
    fn curve_stays_in_control_bounding_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for end in [EndMethod::Clamp, EndMethod::Duplicate] {
            let pts = random_controls(&mut rng, 10);
            let s = BSpline::new(&pts, 3, end);
            let (lo, hi) = bounding_box(&pts);
            for q in s.sample_polyline(16) {
                assert!(q.x >= lo.x - 1e-9 && q.x <= hi.x + 1e-9);
                assert!(q.y >= lo.y - 1e-9 && q.y <= hi.y + 1e-9);
            }
        }
    }

    #[test]
    fn moving_one_control_point_only_changes_its_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pts = random_controls(&mut rng, 12);
        let p = 2;
        let s = BSpline::new(&pts, p, EndMethod::Clamp);
        let moved_idx = 6;
        let mut pts2 = pts.clone();
        pts2[moved_idx] = pts2[moved_idx] + Point::new(3.0, -2.0);
        let s2 = BSpline::new(&pts2, p, EndMethod::Clamp);
        // Support of control i is [knots[i], knots[i+p+1]).
        let lo = s.knots()[moved_idx];
        let hi = s.knots()[moved_idx + p + 1];
        let (dlo, dhi) = s.domain();
        for i in 0..400 {
            let t = dlo + (dhi - dlo) * i as f64 / 399.0;
            let diff = s.evaluate(t).dist(s2.evaluate(t));
            if t < lo - 1e-12 || t > hi + 1e-12 {
                assert!(diff < 1e-12, "outside support at t={t}: {diff}");
            }
        }
        // And it does move somewhere inside the support.
        let mid = (lo + hi) / 2.0;
        assert!(s.evaluate(mid).dist(s2.evaluate(mid)) > 1e-3);
    }

    #[test]
    fn quadratic_interior_knot_is_midpoint_of_flanking_controls() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts = random_controls(&mut rng, 7);
        let s = BSpline::new(&pts, 2, EndMethod::Clamp);
        // Interior knots are 1..=n-p-1; at knot j the curve sits halfway
        // between control points j and j+1.
        for j in 1..=(7 - 2 - 1) {
            let mid = (pts[j] + pts[j + 1]) * 0.5;
            assert!(s.evaluate(j as f64).dist(mid) < 1e-12, "knot {j}");
        }
        let d = BSpline::new(&pts, 2, EndMethod::Duplicate);
        // With duplicated ends every domain knot k covers original controls
        // shifted by the duplication offset.
        let ctrl = d.control_points();
        let (lo, hi) = d.domain();
        let mut k = lo as usize;
        while k < hi as usize {
            if k > lo as usize {
                let mid = (ctrl[k - 2] + ctrl[k - 1]) * 0.5;
                assert!(d.evaluate(k as f64).dist(mid) < 1e-12, "knot {k}");
            }
            k += 1;
        }
    }

    #[test]
    fn sharing_degree_many_controls_forces_coincidence_at_knot() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for degree in [2usize, 3] {
            for _ in 0..100 {
                let shared = random_controls(&mut rng, degree);
                // Two different strands, each embedding the shared run at a
                // random interior position with margin from the ends.
                let margin = degree + 1;
                let build = |rng: &mut ChaCha8Rng| {
                    let pre = rng.random_range(margin..margin + 3);
                    let post = rng.random_range(margin..margin + 3);
                    let mut pts = random_controls(rng, pre);
                    pts.extend_from_slice(&shared);
                    pts.extend(random_controls(rng, post));
                    let idx = pre; // shared run starts here
                    (BSpline::new(&pts, degree, EndMethod::Clamp), idx)
                };
                let (sa, ia) = build(&mut rng);
                let (sb, ib) = build(&mut rng);
                // For degree p, the curve value at interior knot t_j depends
                // on controls j..j+p only; align both curves on the knot
                // whose window is exactly the shared run.
                let ta = knot_for_window(&sa, ia);
                let tb = knot_for_window(&sb, ib);
                let d = sa.evaluate(ta).dist(sb.evaluate(tb));
                assert!(d < 1e-9, "degree {degree}: {d}");
            }
        }
    }

    /// Knot parameter at which a clamped spline's value is determined by
    /// controls `i..i+p`: for integer-spaced clamped knots that is knot
    /// value `i` (the knot at index `i + p` in the padded vector).
    fn knot_for_window(s: &BSpline, i: usize) -> f64 {
        s.knots()[i + s.degree()]
    }

    #[test]
    fn sharing_one_control_point_does_not_force_coincidence() {
        // Witness: both quadratic strands pass near, but not through, the
        // single shared control point, and at the aligned knots their
        // values differ by a visible margin.
        let shared = Point::new(0.0, 0.0);
        let a = vec![
            Point::new(-4.0, 2.0),
            Point::new(-2.0, 1.0),
            shared,
            Point::new(2.0, 1.0),
            Point::new(4.0, 2.0),
        ];
        let b = vec![
            Point::new(-4.0, -2.0),
            Point::new(-2.0, -1.0),
            shared,
            Point::new(2.0, -1.0),
            Point::new(4.0, -2.0),
        ];
        let sa = BSpline::new(&a, 2, EndMethod::Clamp);
        let sb = BSpline::new(&b, 2, EndMethod::Clamp);
        // Check every pair of knot values and a fine sample of both curves:
        // the curves never meet.
        let mut closest = f64::MAX;
        for pa in sa.sample_polyline(32) {
            for pb in sb.sample_polyline(32) {
                closest = closest.min(pa.dist(pb));
            }
        }
        assert!(closest > 0.2, "curves should stay apart, got {closest}");
    }

    #[test]
    fn sample_polyline_refines_nested_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts = random_controls(&mut rng, 6);
        let s = BSpline::new(&pts, 2, EndMethod::Clamp);
        let coarse = s.sample_polyline(4);
        let fine = s.sample_polyline(8);
        assert_eq!(fine.len(), 2 * coarse.len() - 1);
        for (i, c) in coarse.iter().enumerate() {
            let f = fine[2 * i];
            assert!(c.dist(f) < 1e-12, "sample {i} moved under refinement");
        }
    }

    #[test]
    fn two_point_paths_degrade_to_straight_lines() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(4.0, 2.0)];
        for end in [EndMethod::Clamp, EndMethod::Duplicate] {
            let s = BSpline::new(&pts, 2, end);
            for q in s.sample_polyline(8) {
                // On the segment: cross product with the direction is ~0.
                let cross = q.x * 2.0 - q.y * 4.0;
                assert!(cross.abs() < 1e-12, "{end:?}: off-line sample {q:?}");
            }
        }
    }

    proptest::proptest! {
        /// Every sampled point stays in the control bounding box (slightly
        /// padded for roundoff) and the curve starts and ends exactly on
        /// the first and last control points.
        #[test]
        fn samples_bounded_and_ends_pinned(
            raw in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 2..10),
            degree in 1usize..4,
            duplicate in proptest::bool::ANY,
        ) {
            let pts: Vec<Point> = raw.iter().map(|&(x, y)| Point::new(x, y)).collect();
            let end = if duplicate { EndMethod::Duplicate } else { EndMethod::Clamp };
            let s = BSpline::new(&pts, degree, end);
            let (lo, hi) = bounding_box(&pts);
            for q in s.sample_polyline(16) {
                proptest::prop_assert!(q.x >= lo.x - 1e-9 && q.x <= hi.x + 1e-9);
                proptest::prop_assert!(q.y >= lo.y - 1e-9 && q.y <= hi.y + 1e-9);
            }
            let (t0, t1) = s.domain();
            proptest::prop_assert!(s.evaluate(t0).dist(pts[0]) < 1e-9);
            proptest::prop_assert!(s.evaluate(t1).dist(*pts.last().unwrap()) < 1e-9);
        }
    }
}
