//! Uniform linear array geometry.
//!
//! Element `n` runs 1..=N in the phase formula and is stored at index `n - 1`.
//! Angles are radians throughout the library.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Element count and spacing (in wavelengths) of a uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    spacing_ratio: f64,
}

impl ArrayGeometry {
    pub fn new(num_elements: usize, spacing_ratio: f64) -> Result<Self> {
        if num_elements == 0 {
            return Err(Error::EmptyArray);
        }
        if !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) {
            return Err(Error::InvalidSpacing(spacing_ratio));
        }
        Ok(Self {
            num_elements,
            spacing_ratio,
        })
    }

    /// Half-wavelength spacing.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, 0.5)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_ratio(&self) -> f64 {
        self.spacing_ratio
    }
}

/// Array response toward `angle`; entries are unit-modulus phasors.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
    angle: f64,
}

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }
}

/// Phase of each element in cycles: `-(n - (N+1)/2) * (d/λ) * cos(theta)`.
///
/// The profile is antisymmetric about the array center, so the center element
/// of an odd array is always zero.
pub fn phase_profile(geometry: &ArrayGeometry, theta: f64) -> Vec<f64> {
    let n = geometry.num_elements;
    let center = (n as f64 + 1.0) / 2.0;
    let slope = geometry.spacing_ratio * theta.cos();
    (1..=n).map(|i| -(i as f64 - center) * slope).collect()
}

/// Steering vector `exp(j 2π Ψ(n))`. No `1/sqrt(N)` normalization is applied.
pub fn steering_vector(geometry: &ArrayGeometry, theta: f64) -> SteeringVector {
    let entries = phase_profile(geometry, theta)
        .into_iter()
        .map(|psi| Complex64::from_polar(1.0, 2.0 * PI * psi))
        .collect();
    SteeringVector {
        entries,
        angle: theta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn broadside_profile_is_flat() {
        let g = ArrayGeometry::half_wavelength(4).unwrap();
        assert_close(&phase_profile(&g, PI / 2.0), &[0.0; 4], 1e-15);
    }

    #[test]
    fn odd_array_center_is_zero() {
        for spacing in [0.1, 0.5, 1.7] {
            let g = ArrayGeometry::new(5, spacing).unwrap();
            for theta in [0.0, 0.3, 1.0, 2.5, 4.0] {
                assert_eq!(phase_profile(&g, theta)[2], 0.0);
            }
        }
    }

    #[test]
    fn sixty_degree_profile() {
        let g = ArrayGeometry::half_wavelength(4).unwrap();
        let p = phase_profile(&g, 60f64.to_radians());
        assert_close(&p, &[0.375, 0.125, -0.125, -0.375], 1e-12);
    }

    #[test]
    fn single_element_steering_is_one() {
        let g = ArrayGeometry::half_wavelength(1).unwrap();
        for theta in [0.0, 1.0, 3.0] {
            let sv = steering_vector(&g, theta);
            assert_eq!(sv.entries(), &[Complex64::new(1.0, 0.0)]);
        }
    }

    #[test]
    fn sixty_degree_steering_phases() {
        let g = ArrayGeometry::half_wavelength(4).unwrap();
        let sv = steering_vector(&g, 60f64.to_radians());
        let expected = [0.375, 0.125, -0.125, -0.375];
        for (h, psi) in sv.entries().iter().zip(expected) {
            let want = Complex64::from_polar(1.0, 2.0 * PI * psi);
            assert!((h - want).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_symmetry_and_norm() {
        let g = ArrayGeometry::new(7, 0.45).unwrap();
        let sv = steering_vector(&g, 1.1);
        let e = sv.entries();
        let n = e.len();
        for i in 0..n {
            assert!((e[i].norm() - 1.0).abs() < 1e-12);
            assert!((e[i] * e[n - 1 - i] - 1.0).norm() < 1e-12);
        }
        let energy: f64 = e.iter().map(|z| z.norm_sqr()).sum();
        assert!((energy - n as f64).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_geometry() {
        assert_eq!(ArrayGeometry::new(0, 0.5), Err(Error::EmptyArray));
        assert!(ArrayGeometry::new(4, 0.0).is_err());
        assert!(ArrayGeometry::new(4, f64::NAN).is_err());
    }
}
