//! First fundamental form data.

use num_complex::Complex64;
use serde::Serialize;

use crate::minkowski::MinkVector4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricData {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// √(EG − F²), zero when the determinant is not positive.
    pub area_w: f64,
    /// λ² of an isothermic chart.
    pub lambda2: Option<f64>,
    #[serde(skip)]
    pub alpha: Option<Complex64>,
}

impl MetricData {
    pub fn new(e: f64, f: f64, g: f64) -> Self {
        let det = e * g - f * f;
        let area_w = if det > 0.0 { det.sqrt() } else { 0.0 };
        let alpha = (e > 0.0 && det > 0.0).then(|| Complex64::new(f, area_w) / e);
        Self {
            e,
            f,
            g,
            area_w,
            lambda2: None,
            alpha,
        }
    }

    pub fn from_tangents(xx: &MinkVector4, xy: &MinkVector4) -> Self {
        Self::new(xx.dot(xx), xx.dot(xy), xy.dot(xy))
    }

    pub fn isothermic(lambda2: f64) -> Self {
        Self {
            lambda2: Some(lambda2),
            ..Self::new(lambda2, 0.0, lambda2)
        }
    }

    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    /// E > 0, G > 0 and EG − F² above `eps`.
    pub fn is_spacelike(&self, eps: f64) -> bool {
        self.e > 0.0 && self.g > 0.0 && self.det() > eps
    }
}

/// Degeneracy threshold 1e−10·scale² for a metric of characteristic size `scale`.
pub fn metric_epsilon(scale: f64) -> f64 {
    1e-10 * scale.max(1.0).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_plane() {
        let m = MetricData::from_tangents(&MinkVector4::basis(1), &MinkVector4::basis(2));
        assert_eq!((m.e, m.f, m.g, m.area_w), (1.0, 0.0, 1.0, 1.0));
        assert_eq!(m.alpha, Some(Complex64::new(0.0, 1.0)));
        assert!(m.is_spacelike(1e-10));
    }

    #[test]
    fn timelike_plane_has_no_area() {
        let m = MetricData::from_tangents(&MinkVector4::basis(0), &MinkVector4::basis(2));
        assert_eq!(m.area_w, 0.0);
        assert!(m.alpha.is_none());
        assert!(!m.is_spacelike(0.0));
    }
}
