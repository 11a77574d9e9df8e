//! Incremental piecewise-linear encoding of `g(f) = f·|f|`.

use crate::instance::GasPipeline;
use serde::{Deserialize, Serialize};

/// The nonconvex Weymouth image of a flow.
pub fn signed_square(f: f64) -> f64 {
    f * f.abs()
}

/// Breakpoints `F_1 < … < F_{K+1}` of one pipeline and their images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwlBreakpoints {
    pub points: Vec<f64>,
    pub images: Vec<f64>,
}

impl PwlBreakpoints {
    pub fn from_points(points: Vec<f64>) -> Self {
        let images = points.iter().map(|&f| signed_square(f)).collect();
        Self { points, images }
    }

    /// Number of segments `K`.
    pub fn segments(&self) -> usize {
        self.points.len() - 1
    }

    pub fn width(&self, k: usize) -> f64 {
        self.points[k + 1] - self.points[k]
    }

    pub fn max_width(&self) -> f64 {
        (0..self.segments()).map(|k| self.width(k)).fold(0.0, f64::max)
    }

    /// Worst-case gap between the chordal image and `g` (|g''| ≤ 2).
    pub fn error_bound(&self) -> f64 {
        self.max_width().powi(2) / 4.0
    }

    /// Flow reconstructed from fill levels: `F_1 + Σ δ_k (F_{k+1} − F_k)`.
    pub fn flow(&self, delta: &[f64]) -> f64 {
        self.points[0]
            + delta
                .iter()
                .enumerate()
                .map(|(k, d)| d * self.width(k))
                .sum::<f64>()
    }

    /// Linearized image: `g(F_1) + Σ δ_k (g(F_{k+1}) − g(F_k))`.
    pub fn image(&self, delta: &[f64]) -> f64 {
        self.images[0]
            + delta
                .iter()
                .enumerate()
                .map(|(k, d)| d * (self.images[k + 1] - self.images[k]))
                .sum::<f64>()
    }

    /// Fill vector (1,…,1,θ,0,…,0) whose flow is `f`; `f` is clamped to the range.
    pub fn fill_for(&self, f: f64) -> Vec<f64> {
        let f = f.clamp(self.points[0], *self.points.last().unwrap());
        (0..self.segments())
            .map(|k| ((f - self.points[k]) / self.width(k)).clamp(0.0, 1.0))
            .collect()
    }
}

/// Equal-width breakpoints over `[flow_min, flow_max]`, with 0 inserted when
/// the range is signed and 0 is not already a point.
pub fn compute_breakpoints(pipeline: &GasPipeline, seg: usize) -> PwlBreakpoints {
    breakpoints_over(pipeline.flow_min, pipeline.flow_max, seg)
}

pub fn breakpoints_over(lo: f64, hi: f64, seg: usize) -> PwlBreakpoints {
    assert!(seg >= 1 && lo < hi, "breakpoints need seg >= 1 and a nonempty range");
    let width = (hi - lo) / seg as f64;
    let snap = 1e-12 * (hi - lo);
    let mut points: Vec<f64> = (0..=seg)
        .map(|k| {
            if k == seg {
                return hi;
            }
            let x = lo + k as f64 * width;
            if x.abs() <= snap {
                0.0
            } else {
                x
            }
        })
        .collect();
    if lo < 0.0 && hi > 0.0 && !points.contains(&0.0) {
        let at = points.partition_point(|&x| x < 0.0);
        points.insert(at, 0.0);
    }
    PwlBreakpoints::from_points(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn breakpoint_examples() {
        assert_eq!(breakpoints_over(-2.0, 2.0, 4).points, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(breakpoints_over(0.0, 4.0, 2).points, vec![0.0, 2.0, 4.0]);
        assert_eq!(breakpoints_over(-1.0, 3.0, 2).points, vec![-1.0, 0.0, 1.0, 3.0]);
    }

    #[test]
    fn exact_on_breakpoints_and_bounded_between() {
        let bp = breakpoints_over(-2.0, 2.0, 4);
        let full = [1.0, 1.0, 1.0, 1.0];
        assert_abs_diff_eq!(bp.flow(&full), 2.0);
        assert_abs_diff_eq!(bp.image(&full), 4.0);
        let half = [1.0, 1.0, 1.0, 0.5];
        assert_abs_diff_eq!(bp.flow(&half), 1.5);
        assert_abs_diff_eq!(bp.image(&half), 2.5);
        let err = bp.image(&half) - signed_square(1.5);
        assert_abs_diff_eq!(err, 0.25);
        assert!(err <= bp.error_bound() + 1e-12);
    }

    proptest! {
        #[test]
        fn points_strictly_increasing_with_endpoints(
            lo in -5.0f64..5.0, span in 0.01f64..10.0, seg in 1usize..9
        ) {
            let hi = lo + span;
            let bp = breakpoints_over(lo, hi, seg);
            prop_assert_eq!(bp.points[0], lo);
            prop_assert_eq!(*bp.points.last().unwrap(), hi);
            prop_assert!(bp.points.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(bp.segments() == seg || bp.segments() == seg + 1);
            if lo < 0.0 && hi > 0.0 {
                prop_assert!(bp.points.contains(&0.0));
            }
        }

        #[test]
        fn chord_error_within_curvature_bound(
            lo in -3.0f64..0.5, span in 0.1f64..6.0, seg in 1usize..7, u in 0.0f64..1.0
        ) {
            let bp = breakpoints_over(lo, lo + span, seg);
            let f = lo + u * span;
            let fill = bp.fill_for(f);
            prop_assert!((bp.flow(&fill) - f).abs() < 1e-9);
            let err = (bp.image(&fill) - signed_square(f)).abs();
            prop_assert!(err <= bp.error_bound() * (1.0 + 1e-9) + 1e-12);
        }
    }
}
