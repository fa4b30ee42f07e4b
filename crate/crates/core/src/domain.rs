//! Geometry of the Fock–Bargmann–Hartogs domain
//! `D = {(z, w) ∈ ℂⁿ × ℂᵐ : ‖w‖² < exp(−μ‖z‖²)}` and its weight `(−ρ)^α`.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::math::{log_gamma_unchecked, norm_sq, C64};

/// Relative tolerance below which `|ρ|` counts as the boundary.
pub const BOUNDARY_TOL: f64 = 1e-14;

/// Parameters `(n, m, μ, α)` of the domain and its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainParams {
    n: usize,
    m: usize,
    mu: f64,
    alpha: f64,
}

impl DomainParams {
    pub fn new(n: usize, m: usize, mu: f64, alpha: f64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(domain(format!(
                "dimensions must be positive, got n={n}, m={m}"
            )));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(domain(format!("mu must be positive and finite, got {mu}")));
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(domain(format!("alpha must exceed -1, got {alpha}")));
        }
        Ok(DomainParams { n, m, mu, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Gaussian parameter `μ(α+m)` of the reduced base weight.
    pub fn base_beta(&self) -> f64 {
        self.mu * (self.alpha + self.m as f64)
    }

    /// `C_fiber(m, α)` for these parameters.
    pub fn fiber_constant(&self) -> f64 {
        fiber_constant_unchecked(self.m, self.alpha)
    }

    pub(crate) fn check_point(&self, point: &PointPair) -> Result<()> {
        if point.z.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: point.z.len(),
            });
        }
        if point.w.len() != self.m {
            return Err(Error::LengthMismatch {
                expected: self.m,
                actual: point.w.len(),
            });
        }
        Ok(())
    }
}

/// A point `(z, w) ∈ ℂⁿ × ℂᵐ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPair {
    pub z: Vec<C64>,
    pub w: Vec<C64>,
}

impl PointPair {
    pub fn new(z: Vec<C64>, w: Vec<C64>) -> Self {
        PointPair { z, w }
    }

    /// The point `(0, 0)` in the given dimensions.
    pub fn origin(n: usize, m: usize) -> Self {
        PointPair {
            z: vec![C64::new(0.0, 0.0); n],
            w: vec![C64::new(0.0, 0.0); m],
        }
    }
}

/// Where a point sits relative to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Exterior,
}

/// Defining function `ρ(z, w) = ‖w‖² − exp(−μ‖z‖²)`.
pub fn rho(point: &PointPair, params: &DomainParams) -> Result<f64> {
    params.check_point(point)?;
    Ok(rho_unchecked(&point.z, &point.w, params.mu))
}

#[inline]
pub(crate) fn rho_unchecked(z: &[C64], w: &[C64], mu: f64) -> f64 {
    norm_sq(w) - (-mu * norm_sq(z)).exp()
}

/// Classifies a point; `|ρ| ≤ 1e-14·(1 + ‖w‖²)` counts as boundary.
pub fn membership(point: &PointPair, params: &DomainParams) -> Result<Membership> {
    let r = rho(point, params)?;
    Ok(classify(r, norm_sq(&point.w)))
}

pub(crate) fn classify(rho: f64, w_norm_sq: f64) -> Membership {
    if rho.abs() <= BOUNDARY_TOL * (1.0 + w_norm_sq) {
        Membership::Boundary
    } else if rho < 0.0 {
        Membership::Interior
    } else {
        Membership::Exterior
    }
}

/// Checks strict interior membership, returning `ρ` on success.
pub fn require_interior(point: &PointPair, params: &DomainParams) -> Result<f64> {
    let r = rho(point, params)?;
    match classify(r, norm_sq(&point.w)) {
        Membership::Interior => Ok(r),
        _ => Err(Error::OutsideDomain { rho: r }),
    }
}

/// Interior test relative to the fiber over `z`: `‖w‖² < (1 − 1e-14)·e^{−μ‖z‖²}`.
///
/// Far out in the base the whole fiber lies inside the absolute boundary band of
/// [`membership`]; quadrature nodes there are still interior points.
pub fn require_fiber_interior(point: &PointPair, params: &DomainParams) -> Result<f64> {
    let r = rho(point, params)?;
    let r2 = (-params.mu * norm_sq(&point.z)).exp();
    if norm_sq(&point.w) < (1.0 - BOUNDARY_TOL) * r2 {
        Ok(r)
    } else {
        Err(Error::OutsideDomain { rho: r })
    }
}

/// Radius `exp(−μ‖z‖²/2)` of the fiber ball over `z`.
pub fn fiber_radius(z: &[C64], params: &DomainParams) -> f64 {
    (-0.5 * params.mu * norm_sq(z)).exp()
}

/// `∫_{‖τ‖<1} (1 − ‖τ‖²)^α dV(τ) = π^m Γ(α+1)/Γ(α+m+1)` over the unit ball of ℂᵐ.
///
/// The weighted integral over the whole fiber at `z` equals this constant times
/// `exp(−μ(α+m)‖z‖²)`.
pub fn fiber_weight_integral(m: usize, alpha: f64) -> Result<f64> {
    if m == 0 {
        return Err(domain("fiber dimension must be positive"));
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(domain(format!("alpha must exceed -1, got {alpha}")));
    }
    Ok(fiber_constant_unchecked(m, alpha))
}

pub(crate) fn fiber_constant_unchecked(m: usize, alpha: f64) -> f64 {
    let mf = m as f64;
    (mf * PI.ln() + log_gamma_unchecked(alpha + 1.0) - log_gamma_unchecked(alpha + mf + 1.0)).exp()
}

/// Real `2m`-dimensional volume of the unit ball in ℂᵐ, `π^m/m!`.
pub fn unit_ball_volume(m: usize) -> f64 {
    let mf = m as f64;
    (mf * PI.ln() - log_gamma_unchecked(mf + 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::log_gamma;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn params_validation() {
        assert!(DomainParams::new(1, 1, 1.0, 0.0).is_ok());
        assert!(DomainParams::new(0, 1, 1.0, 0.0).is_err());
        assert!(DomainParams::new(1, 0, 1.0, 0.0).is_err());
        assert!(DomainParams::new(1, 1, 0.0, 0.0).is_err());
        assert!(DomainParams::new(1, 1, 1.0, -1.0).is_err());
        assert!(DomainParams::new(1, 1, 1.0, -0.99).is_ok());
    }

    #[test]
    fn fiber_relative_interior() {
        let p = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        let far = PointPair::new(vec![c(8.0, 0.0)], vec![c(0.5 * (-32.0f64).exp(), 0.0)]);
        assert_eq!(membership(&far, &p).unwrap(), Membership::Boundary);
        assert!(require_fiber_interior(&far, &p).is_ok());
        let edge = PointPair::new(vec![c(0.0, 0.0)], vec![c(0.6, 0.8)]);
        assert!(require_fiber_interior(&edge, &p).is_err());
        let out = PointPair::new(vec![c(8.0, 0.0)], vec![c(2.0 * (-32.0f64).exp(), 0.0)]);
        assert!(require_fiber_interior(&out, &p).is_err());
    }

    #[test]
    fn rho_examples() {
        let p = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        let origin = PointPair::origin(1, 1);
        assert_eq!(rho(&origin, &p).unwrap(), -1.0);

        let edge = PointPair::new(vec![c(0.0, 0.0)], vec![c(0.6, 0.8)]);
        assert!(rho(&edge, &p).unwrap().abs() < 1e-15);
        assert_eq!(membership(&edge, &p).unwrap(), Membership::Boundary);

        let z = (2f64.ln()).sqrt();
        let pt = PointPair::new(vec![c(0.0, z)], vec![c(0.0, 0.0)]);
        assert!((rho(&pt, &p).unwrap() + 0.5).abs() < 1e-15);

        let outside = PointPair::new(vec![c(1.0, 0.0)], vec![c(0.9, 0.0)]);
        assert_eq!(membership(&outside, &p).unwrap(), Membership::Exterior);
        assert!(matches!(
            require_interior(&outside, &p),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn rho_rejects_wrong_dimensions() {
        let p = DomainParams::new(2, 1, 1.0, 0.0).unwrap();
        let pt = PointPair::origin(1, 1);
        assert!(matches!(
            rho(&pt, &p),
            Err(Error::LengthMismatch {
                expected: 2,
                actual: 1
            })
        ));
    }

    #[test]
    fn base_slice_is_interior() {
        let p = DomainParams::new(2, 3, 0.7, 0.5).unwrap();
        for k in 0..20 {
            let t = k as f64 * 0.9;
            let pt = PointPair::new(vec![c(t, -0.3 * t), c(0.1, t)], vec![c(0.0, 0.0); 3]);
            assert!(rho(&pt, &p).unwrap() < 0.0);
        }
    }

    #[test]
    fn fiber_radius_examples() {
        let p1 = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        assert_eq!(fiber_radius(&[c(0.0, 0.0)], &p1), 1.0);
        assert!((fiber_radius(&[c(1.0, 0.0)], &p1) - (-0.5f64).exp()).abs() < 1e-16);
        let p2 = DomainParams::new(1, 1, 0.5, 0.0).unwrap();
        assert!((fiber_radius(&[c(1.0, 1.0)], &p2) - (-0.5f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn fiber_weight_integral_examples() {
        assert!((fiber_weight_integral(1, 0.0).unwrap() - PI).abs() < 1e-14);
        assert!((fiber_weight_integral(1, 1.0).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((fiber_weight_integral(2, 0.0).unwrap() - PI * PI / 2.0).abs() < 1e-14);
        assert!(fiber_weight_integral(1, -1.0).is_err());
    }

    #[test]
    fn fiber_weight_integral_normalisation() {
        for m in 1..6 {
            for alpha in [-0.9, -0.5, 0.0, 0.3, 1.0, 2.5, 10.0] {
                let mf = m as f64;
                let c = fiber_weight_integral(m, alpha).unwrap();
                let back = c
                    * (log_gamma(alpha + mf + 1.0).unwrap()
                        - mf * PI.ln()
                        - log_gamma(alpha + 1.0).unwrap())
                    .exp();
                assert!((back - 1.0).abs() < 1e-12, "m={m} alpha={alpha}");
            }
        }
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI * PI / 2.0).abs() < 1e-14);
    }
}
