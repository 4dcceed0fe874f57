//! Piecewise-linear curves.
//!
//! Every elicited graph in a knowledge base (link strength against hours since
//! onset, prior or base rate against age, cycle weighting against day of the
//! month) is stored as a list of breakpoints and evaluated by linear
//! interpolation. Evaluation clamps outside the breakpoint range; the domain
//! bounds of each curve kind are enforced by validation only.

use std::fmt;

/// Upper end of the time axis on which link curves are drawn, in hours.
pub const MAX_HOURS: f64 = 132.0;
/// Upper end of the age axis, in years.
pub const MAX_AGE: f64 = 120.0;
/// Days in the cycle axis used for cycle weighting.
pub const CYCLE_DAYS: f64 = 28.0;

/// One breakpoint of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Breakpoints of a piecewise-linear function, ordered by `x`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Breakpoints(pub Vec<Point>);

impl Breakpoints {
    pub fn new<P: Into<Point>>(points: impl IntoIterator<Item = P>) -> Self {
        Self(points.into_iter().map(Into::into).collect())
    }

    pub fn constant(y: f64) -> Self {
        Self(vec![Point::new(0.0, y)])
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    /// Linear interpolation with end clamping. An empty curve evaluates to 0.
    pub fn eval(&self, x: f64) -> f64 {
        let pts = &self.0;
        let (first, last) = match (pts.first(), pts.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return 0.0,
        };
        if x <= first.x {
            return first.y;
        }
        if x >= last.x {
            return last.y;
        }
        // first index whose x is strictly greater than the query
        let hi = pts.partition_point(|p| p.x <= x);
        let (a, b) = (pts[hi - 1], pts[hi]);
        if x == a.x || b.x == a.x {
            return a.y;
        }
        let w = (x - a.x) / (b.x - a.x);
        a.y + w * (b.y - a.y)
    }

    /// Structural problems relative to the given domain and value range.
    pub fn check(&self, domain: (f64, f64), range: (f64, f64)) -> Vec<CurveIssue> {
        let mut issues = Vec::new();
        if self.0.is_empty() {
            issues.push(CurveIssue::Empty);
            return issues;
        }
        for (i, p) in self.0.iter().enumerate() {
            if !p.x.is_finite() || p.x < domain.0 || p.x > domain.1 {
                issues.push(CurveIssue::XOutOfDomain { index: i, x: p.x, domain });
            }
            if !p.y.is_finite() || p.y < range.0 || p.y > range.1 {
                issues.push(CurveIssue::YOutOfRange { index: i, y: p.y, range });
            }
            if i > 0 && !(p.x > self.0[i - 1].x) {
                issues.push(CurveIssue::NotIncreasing { index: i, x: p.x, prev: self.0[i - 1].x });
            }
        }
        issues
    }
}

/// A problem with one curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveIssue {
    Empty,
    XOutOfDomain { index: usize, x: f64, domain: (f64, f64) },
    YOutOfRange { index: usize, y: f64, range: (f64, f64) },
    NotIncreasing { index: usize, x: f64, prev: f64 },
}

impl fmt::Display for CurveIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveIssue::Empty => write!(f, "curve has no breakpoints"),
            CurveIssue::XOutOfDomain { index, x, domain } => {
                write!(f, "point {index}: x = {x} outside [{}, {}]", domain.0, domain.1)
            }
            CurveIssue::YOutOfRange { index, y, range } => {
                write!(f, "point {index}: value {y} outside [{}, {}]", range.0, range.1)
            }
            CurveIssue::NotIncreasing { index, x, prev } => {
                write!(f, "point {index}: x = {x} does not increase past {prev}")
            }
        }
    }
}

macro_rules! curve_kind {
    ($(#[$doc:meta])* $name:ident, domain = ($lo:expr, $hi:expr), range = ($rlo:expr, $rhi:expr)) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Default)]
        pub struct $name(pub Breakpoints);

        impl $name {
            pub const DOMAIN: (f64, f64) = ($lo, $hi);
            pub const RANGE: (f64, f64) = ($rlo, $rhi);

            pub fn new<P: Into<Point>>(points: impl IntoIterator<Item = P>) -> Self {
                Self(Breakpoints::new(points))
            }

            pub fn constant(y: f64) -> Self {
                Self(Breakpoints(vec![Point::new(Self::DOMAIN.0, y)]))
            }

            pub fn eval(&self, x: f64) -> f64 {
                self.0.eval(x)
            }

            pub fn points(&self) -> &[Point] {
                self.0.points()
            }

            pub fn check(&self) -> Vec<CurveIssue> {
                self.0.check(Self::DOMAIN, Self::RANGE)
            }
        }
    };
}

curve_kind!(
    /// Probability as a function of hours since onset.
    TimeCurve,
    domain = (0.0, MAX_HOURS),
    range = (0.0, 1.0)
);
curve_kind!(
    /// Probability as a function of age in years.
    AgeCurve,
    domain = (0.0, MAX_AGE),
    range = (0.0, 1.0)
);
curve_kind!(
    /// Non-negative weight as a function of cycle day.
    CycleCurve,
    domain = (1.0, CYCLE_DAYS),
    range = (0.0, f64::MAX)
);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_point() -> TimeCurve {
        TimeCurve::new([(0.0, 0.1), (24.0, 0.5)])
    }

    #[test]
    fn breakpoint_hit() {
        assert_eq!(two_point().eval(0.0), 0.1);
        assert_eq!(two_point().eval(24.0), 0.5);
    }

    #[test]
    fn midpoint() {
        assert!((two_point().eval(12.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn clamps_past_last_breakpoint() {
        assert_eq!(two_point().eval(200.0), 0.5);
        assert_eq!(two_point().eval(-5.0), 0.1);
    }

    #[test]
    fn single_point_is_constant() {
        let c = TimeCurve::constant(0.7);
        for t in [0.0, 3.5, 132.0, 500.0] {
            assert_eq!(c.eval(t), 0.7);
        }
    }

    #[test]
    fn empty_curve_is_zero_and_flagged() {
        let c = TimeCurve::default();
        assert_eq!(c.eval(10.0), 0.0);
        assert_eq!(c.check(), vec![CurveIssue::Empty]);
    }

    #[test]
    fn check_names_offending_point() {
        let c = TimeCurve::new([(0.0, 0.2), (10.0, 1.2), (5.0, 0.3)]);
        let issues = c.check();
        assert!(issues.contains(&CurveIssue::YOutOfRange { index: 1, y: 1.2, range: (0.0, 1.0) }));
        assert!(issues.contains(&CurveIssue::NotIncreasing { index: 2, x: 5.0, prev: 10.0 }));
        assert!(TimeCurve::new([(0.0, 0.2), (140.0, 0.3)])
            .check()
            .iter()
            .any(|i| matches!(i, CurveIssue::XOutOfDomain { index: 1, .. })));
    }

    fn arb_curve() -> impl Strategy<Value = TimeCurve> {
        prop::collection::vec((0.0f64..132.0, 0.0f64..=1.0), 1..8).prop_map(|mut pts| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts.dedup_by(|a, b| a.0 == b.0);
            TimeCurve::new(pts)
        })
    }

    proptest! {
        #[test]
        fn output_in_unit_interval(c in arb_curve(), t in -10.0f64..200.0) {
            let v = c.eval(t);
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn exact_at_breakpoints(c in arb_curve()) {
            for p in c.points() {
                prop_assert_eq!(c.eval(p.x), p.y);
            }
        }

        #[test]
        fn monotone_within_segments(c in arb_curve(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let pts = c.points();
            for w in pts.windows(2) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let x1 = w[0].x + lo * (w[1].x - w[0].x);
                let x2 = w[0].x + hi * (w[1].x - w[0].x);
                let (v1, v2) = (c.eval(x1), c.eval(x2));
                if w[1].y >= w[0].y {
                    prop_assert!(v2 >= v1 - 1e-15);
                } else {
                    prop_assert!(v2 <= v1 + 1e-15);
                }
            }
        }
    }
}
