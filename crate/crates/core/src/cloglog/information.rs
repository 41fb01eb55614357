use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};

use super::{g_weight, ModelParams};
use crate::error::{Error, Result};

/// Symmetric 2x2 Fisher information `(j11, j12; j12, j22)` for `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InformationMatrix {
    pub j11: f64,
    pub j12: f64,
    pub j22: f64,
}

impl InformationMatrix {
    pub const ZERO: InformationMatrix = InformationMatrix { j11: 0.0, j12: 0.0, j22: 0.0 };

    pub fn new(j11: f64, j12: f64, j22: f64) -> Self {
        InformationMatrix { j11, j12, j22 }
    }

    /// Contribution `weight * (x^2, x; x, 1)` of a single design point.
    #[inline]
    pub fn from_point(weight: f64, x: f64) -> Self {
        InformationMatrix { j11: weight * x * x, j12: weight * x, j22: weight }
    }

    /// `j11 j22 - j12^2`, evaluated with Kahan's fma scheme so the only
    /// error left is the rounding already present in the entries.
    pub fn det(&self) -> f64 {
        let w = self.j12 * self.j12;
        let err = (-self.j12).mul_add(self.j12, w);
        self.j11.mul_add(self.j22, -w) + err
    }

    pub fn trace(&self) -> f64 {
        self.j11 + self.j22
    }

    /// Inverse as `(c11, c12, c22)`, or `None` when singular.
    pub fn inverse(&self) -> Option<InformationMatrix> {
        let det = self.det();
        if !(det > 0.0) || !det.is_finite() {
            return None;
        }
        Some(InformationMatrix { j11: self.j22 / det, j12: -self.j12 / det, j22: self.j11 / det })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        *self * factor
    }
}

impl Add for InformationMatrix {
    type Output = InformationMatrix;
    fn add(self, rhs: Self) -> Self {
        InformationMatrix { j11: self.j11 + rhs.j11, j12: self.j12 + rhs.j12, j22: self.j22 + rhs.j22 }
    }
}

impl AddAssign for InformationMatrix {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Mul<f64> for InformationMatrix {
    type Output = InformationMatrix;
    fn mul(self, factor: f64) -> Self {
        InformationMatrix { j11: self.j11 * factor, j12: self.j12 * factor, j22: self.j22 * factor }
    }
}

impl Sum for InformationMatrix {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(InformationMatrix::ZERO, Add::add)
    }
}

/// Fisher information of the design points `xs` under `params`.
pub fn fisher_information(params: &ModelParams, xs: &[f64]) -> InformationMatrix {
    xs.iter()
        .map(|&x| InformationMatrix::from_point(g_weight(params.linear_predictor(x)), x))
        .sum()
}

/// D-criterion `sqrt(det J)`.
///
/// A determinant within round-off of zero (`|det| <= 8 eps j11 j22`) counts
/// as singular. Below that, down to `-1e-8 j11 j22`, it is clamped to zero;
/// anything smaller means the matrix was not positive semidefinite.
pub fn d_criterion(j: &InformationMatrix) -> Result<f64> {
    let det = j.det();
    let scale = (j.j11 * j.j22).abs();
    if det > 8.0 * f64::EPSILON * scale {
        return Ok(det.sqrt());
    }
    if det < -1e-8 * scale || j.j11 < 0.0 || j.j22 < 0.0 || det.is_nan() {
        return Err(Error::InvalidMatrix { det });
    }
    Ok(0.0)
}
