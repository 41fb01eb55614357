use crate::error::{invalid, Result};

/// How grid points are spread between the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridSpacing {
    /// Constant ratio between neighbours; resolves small D finely.
    #[default]
    Geometric,
    Uniform,
}

/// Sorted grid of criterion values with nearest-point rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct DGrid {
    points: Vec<f64>,
    midpoints: Vec<f64>,
}

impl DGrid {
    pub fn new(d_min: f64, d_max: f64, n: usize, spacing: GridSpacing) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {n}")));
        }
        if !(d_min > 0.0 && d_min < d_max && d_max.is_finite()) {
            return Err(invalid(format!("grid bounds must satisfy 0 < d_min < d_max, got [{d_min}, {d_max}]")));
        }
        let last = (n - 1) as f64;
        let mut points: Vec<f64> = match spacing {
            GridSpacing::Geometric => {
                let log_ratio = (d_max / d_min).ln();
                (0..n).map(|i| d_min * (log_ratio * i as f64 / last).exp()).collect()
            }
            GridSpacing::Uniform => (0..n).map(|i| d_min + (d_max - d_min) * i as f64 / last).collect(),
        };
        points[0] = d_min;
        points[n - 1] = d_max;
        Self::from_points(points)
    }

    /// Grid from explicit, strictly increasing, positive points.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("grid needs at least 2 points"));
        }
        if !(points[0] > 0.0) || points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("grid points must be positive and strictly increasing"));
        }
        let midpoints = points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(DGrid { points, midpoints })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Cell boundaries between consecutive points.
    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }

    #[inline]
    pub fn value(&self, index: usize) -> f64 {
        self.points[index]
    }

    pub fn d_min(&self) -> f64 {
        self.points[0]
    }

    pub fn d_max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Index of the grid point nearest to `d`; exact midpoints round up.
    /// Values outside the grid map to the end points.
    #[inline]
    pub fn nearest(&self, d: f64) -> usize {
        self.midpoints.partition_point(|&m| m <= d)
    }

    /// Largest distance between neighbouring points.
    pub fn max_cell_width(&self) -> f64 {
        self.points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}
