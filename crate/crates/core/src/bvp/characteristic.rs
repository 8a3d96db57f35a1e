//! Roots of `a ω² + 1 = 0` and the boundary determinant `η`.

use serde::{Deserialize, Serialize};

use super::problem::{BoundaryFunctional, BvpProblem};
use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicData {
    pub omega1: C64,
    pub omega2: C64,
    pub eta: C64,
}

/// `ω_1 = (−a)^{−1/2}` (principal branch), `ω_2 = −ω_1`, and
/// `η = (−ω_1)^{m_1} α_1 · β_2 ω_2^{m_2} − β_1 ω_1^{m_1} · (−ω_2)^{m_2} α_2`.
pub fn characteristic_from(a: C64, boundary: &[BoundaryFunctional; 2]) -> Result<CharacteristicData> {
    if a.norm() == 0.0 {
        return Err(Error::InvalidArgument("a(x) = 0 has no characteristic roots".into()));
    }
    let omega1 = C64::new(1.0, 0.0) / (-a).sqrt();
    let omega2 = -omega1;
    let (m1, m2) = (boundary[0].order as i32, boundary[1].order as i32);
    let (alpha1, beta1) = boundary[0].leading();
    let (alpha2, beta2) = boundary[1].leading();
    let eta = (-omega1).powi(m1) * alpha1 * beta2 * omega2.powi(m2)
        - beta1 * omega1.powi(m1) * (-omega2).powi(m2) * alpha2;
    Ok(CharacteristicData { omega1, omega2, eta })
}

pub fn characteristic_data(problem: &BvpProblem, x: f64) -> Result<CharacteristicData> {
    characteristic_from(problem.a.eval(x), &problem.boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_coefficient_roots() {
        let b = [
            BoundaryFunctional::dirichlet_left(),
            BoundaryFunctional::dirichlet_right(),
        ];
        let d = characteristic_from(C64::new(-1.0, 0.0), &b).unwrap();
        assert_eq!(d.omega1, C64::new(1.0, 0.0));
        assert_eq!(d.omega2, C64::new(-1.0, 0.0));
        assert_eq!(d.eta, C64::new(1.0, 0.0));
        assert!(characteristic_from(C64::new(0.0, 0.0), &b).is_err());
    }

    #[test]
    fn neumann_determinant_follows_formula() {
        let b = [BoundaryFunctional::neumann(true), BoundaryFunctional::neumann(false)];
        let d = characteristic_from(C64::new(-1.0, 0.0), &b).unwrap();
        // (−ω_1) · ω_2 = (−1)(−1).
        assert_eq!(d.eta, C64::new(1.0, 0.0));
    }
}
