//! Initial density profiles on the continuous torus.
//!
//! Profiles come as named analytic families or as a periodic grid with
//! linear interpolation, matching the config-file surface. A profile can
//! be regularized by pushing its subcritical part strictly below 1/2,
//! which the classical free-boundary solver requires.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("profile value {value} at u={u} outside [0,1]")]
    OutOfRange { u: f64, value: f64 },
    #[error("grid profile needs at least two nodes with ascending u in [0,1)")]
    BadGrid,
    #[error("front geometry unavailable: {0}")]
    BadFrontGeometry(String),
}

/// Initial density profile `ρ: T → [0,1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProfileSpec {
    Constant { value: f64 },
    /// `ρ(u) = mean - amplitude · sin(2πu)`.
    Sine { mean: f64, amplitude: f64 },
    /// Periodic piecewise-linear interpolation of `(u_i, ρ_i)` nodes.
    Grid { u: Vec<f64>, rho: Vec<f64> },
    /// `ρ̃(u) = ρ(u) · (1 - 1{ρ(u) < 1/2}/n)`: subcritical part pushed
    /// strictly below 1/2, supercritical part untouched.
    Regularized { base: Box<ProfileSpec>, n: u32 },
}

impl ProfileSpec {
    /// Desk-scale standard: `ρ(u) = 1/2 - sin(2πu)/4`. Subcritical exactly
    /// on `(0, 1/2)`, critical points at 0 and 1/2, never reaches density 1.
    pub fn reference() -> Self {
        ProfileSpec::Sine { mean: 0.5, amplitude: 0.25 }
    }

    pub fn regularized(&self, n: u32) -> Self {
        assert!(n >= 3, "regularization index must be at least 3");
        ProfileSpec::Regularized { base: Box::new(self.clone()), n }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            ProfileSpec::Constant { value } => *value,
            ProfileSpec::Sine { mean, amplitude } => {
                mean - amplitude * (2.0 * std::f64::consts::PI * u).sin()
            }
            ProfileSpec::Grid { u: us, rho } => {
                let x = u.rem_euclid(1.0);
                let m = us.len();
                // last segment wraps from us[m-1] to us[0]+1
                let idx = match us.binary_search_by(|a| a.partial_cmp(&x).unwrap()) {
                    Ok(i) => return rho[i],
                    Err(i) if i == 0 || i == m => m - 1, // wrap segment
                    Err(i) => i - 1,
                };
                let (u0, r0) = (us[idx], rho[idx]);
                let (mut u1, r1) = (us[(idx + 1) % m], rho[(idx + 1) % m]);
                if u1 <= u0 {
                    u1 += 1.0;
                }
                let x = if x < u0 { x + 1.0 } else { x };
                r0 + (r1 - r0) * (x - u0) / (u1 - u0)
            }
            ProfileSpec::Regularized { base, n } => {
                let r = base.eval(u);
                if r < 0.5 {
                    r * (1.0 - 1.0 / *n as f64)
                } else {
                    r
                }
            }
        }
    }

    /// `∫_a^b ρ(u) du` on the periodic extension (any real `a ≤ b`).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            ProfileSpec::Constant { value } => value * (b - a),
            ProfileSpec::Sine { mean, amplitude } => {
                let tau = 2.0 * std::f64::consts::PI;
                mean * (b - a) + amplitude * ((tau * b).cos() - (tau * a).cos()) / tau
            }
            ProfileSpec::Grid { .. } => self.grid_antiderivative(b) - self.grid_antiderivative(a),
            // No closed form once the subcritical indicator enters; composite
            // Simpson at fixed resolution (initialization-time use only).
            ProfileSpec::Regularized { .. } => {
                if b <= a {
                    return -self.integral(b, a);
                }
                let panels = (((b - a) * 8192.0).ceil() as usize).max(8);
                let h = (b - a) / panels as f64;
                let mut total = 0.0;
                for i in 0..panels {
                    let x0 = a + i as f64 * h;
                    total += h / 6.0
                        * (self.eval(x0) + 4.0 * self.eval(x0 + 0.5 * h) + self.eval(x0 + h));
                }
                total
            }
        }
    }

    fn grid_antiderivative(&self, x: f64) -> f64 {
        let ProfileSpec::Grid { u: us, rho } = self else { unreachable!() };
        let m = us.len();
        let mut nodes = Vec::with_capacity(m + 1);
        nodes.extend(us.iter().zip(rho).map(|(&u, &r)| (u, r)));
        nodes.push((us[0] + 1.0, rho[0]));
        let mut cums = vec![0.0; m + 1];
        for i in 0..m {
            let (u0, r0) = nodes[i];
            let (u1, r1) = nodes[i + 1];
            cums[i + 1] = cums[i] + 0.5 * (r0 + r1) * (u1 - u0);
        }
        let period = cums[m];
        let xw = (x - us[0]).rem_euclid(1.0) + us[0];
        let whole = ((x - us[0]) - (xw - us[0])).round();
        let mut part = 0.0;
        for i in 0..m {
            let (u0, r0) = nodes[i];
            let (u1, r1) = nodes[i + 1];
            if xw >= u1 {
                part = cums[i + 1];
            } else if xw > u0 {
                let t = (xw - u0) / (u1 - u0);
                let rx = r0 + (r1 - r0) * t;
                part = cums[i] + 0.5 * (r0 + rx) * (xw - u0);
                break;
            } else {
                break;
            }
        }
        whole * period + part
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            ProfileSpec::Constant { .. } => 0.0,
            ProfileSpec::Sine { amplitude, .. } => {
                let tau = 2.0 * std::f64::consts::PI;
                -amplitude * tau * (tau * u).cos()
            }
            _ => {
                let h = 1e-6;
                (self.eval(u + h) - self.eval(u - h)) / (2.0 * h)
            }
        }
    }

    /// Check all sampled values lie in `[0,1]`.
    pub fn validate(&self) -> Result<(), ProfileError> {
        if let ProfileSpec::Grid { u, rho } = self {
            let ascending = u.windows(2).all(|w| w[0] < w[1]);
            if u.len() < 2 || u.len() != rho.len() || !ascending || u[0] < 0.0 || *u.last().unwrap() >= 1.0
            {
                return Err(ProfileError::BadGrid);
            }
        }
        for i in 0..=4096 {
            let x = i as f64 / 4096.0;
            let v = self.eval(x);
            if !(0.0..=1.0).contains(&v) {
                return Err(ProfileError::OutOfRange { u: x, value: v });
            }
        }
        Ok(())
    }

    /// Geometry of the subcritical phase, for profiles with exactly two
    /// critical points (at 0 and `u_*`), subcritical set `[0, u_*]`, and
    /// density strictly below 1.
    pub fn front_geometry(&self) -> Result<FrontGeometry, ProfileError> {
        self.validate()?;
        let m = 16384usize;
        let eval = |i: usize| self.eval(i as f64 / m as f64);
        if (eval(0) - 0.5).abs() > 1e-9 {
            return Err(ProfileError::BadFrontGeometry(format!(
                "density at u=0 must equal 1/2, got {}",
                eval(0)
            )));
        }
        let mut rho_max: f64 = 0.0;
        for i in 0..m {
            rho_max = rho_max.max(eval(i));
        }
        if rho_max >= 1.0 - 1e-9 {
            return Err(ProfileError::BadFrontGeometry("density reaches 1".into()));
        }
        // subcritical grid points must form one block right after 0
        let sub: Vec<usize> = (1..m).filter(|&i| eval(i) < 0.5).collect();
        if sub.is_empty() || sub[0] != 1 || sub.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(ProfileError::BadFrontGeometry(
                "subcritical set is not a single arc starting at 0".into(),
            ));
        }
        let j = *sub.last().unwrap();
        // refine u_* by bisection on ρ - 1/2 over [j/m, (j+1)/m]
        let (mut lo, mut hi) = (j as f64 / m as f64, (j + 1) as f64 / m as f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u_star = 0.5 * (lo + hi);
        let d0 = self.derivative(0.0);
        let dstar = self.derivative(u_star);
        if d0 >= -1e-6 || dstar <= 1e-6 {
            return Err(ProfileError::BadFrontGeometry(
                "profile derivative vanishes at a critical point".into(),
            ));
        }
        let v_bar = 1.0 - self.integral(0.0, 1.0);
        let v_star = u_star - self.integral(0.0, u_star);
        let c_star = 4.0 * v_bar * (-d0).min(dstar);
        Ok(FrontGeometry { u_star, v_bar, v_star, c_star, rho_max })
    }
}

/// Derived constants of a profile satisfying the two-critical-point
/// geometry; everything downstream (zero-range mapping, typicality
/// parameters, classical solver) reads from here.
#[derive(Clone, Copy, Debug)]
pub struct FrontGeometry {
    /// Right end of the subcritical arc `[0, u_*]`.
    pub u_star: f64,
    /// Total empty-site fraction `v̄ = ∫ (1-ρ)`.
    pub v_bar: f64,
    /// Image of `u_*` under `v`.
    pub v_star: f64,
    /// `c_* = 4 v̄ min(-ρ'(0), ρ'(u_*))`.
    pub c_star: f64,
    pub rho_max: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_profile_geometry() {
        let p = ProfileSpec::reference();
        let g = p.front_geometry().unwrap();
        assert_abs_diff_eq!(g.u_star, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(g.v_bar, 0.5, epsilon = 1e-12);
        // v(1/2) = 1/4 + 1/(4π)
        assert_abs_diff_eq!(g.v_star, 0.25 + 0.25 / std::f64::consts::PI, epsilon = 1e-9);
        // both slopes are π/2 in magnitude
        assert_abs_diff_eq!(g.c_star, std::f64::consts::PI, epsilon = 1e-6);
        assert!(g.rho_max <= 0.75 + 1e-12);
    }

    #[test]
    fn sine_integral_matches_quadrature() {
        let p = ProfileSpec::reference();
        let quad: f64 = (0..10_000).map(|i| p.eval((i as f64 + 0.5) / 10_000.0) / 10_000.0).sum();
        assert_abs_diff_eq!(p.integral(0.0, 1.0), quad, epsilon = 1e-9);
        assert_abs_diff_eq!(p.integral(-0.3, 1.7), 2.0 * p.integral(0.0, 1.0), epsilon = 1e-12);
    }

    #[test]
    fn regularization_examples() {
        let p = ProfileSpec::Constant { value: 0.4 }.regularized(4);
        assert_abs_diff_eq!(p.eval(0.3), 0.3, epsilon = 1e-15);
        let p = ProfileSpec::Constant { value: 0.7 }.regularized(4);
        assert_eq!(p.eval(0.3), 0.7); // supercritical untouched
        // pointwise increasing back to the base as n grows
        let base = ProfileSpec::reference();
        let u = 0.21;
        let mut prev = 0.0;
        for n in [3u32, 6, 12, 24] {
            let v = base.regularized(n).eval(u);
            assert!(v > prev && v < base.eval(u));
            prev = v;
        }
    }

    #[test]
    fn grid_profile_interpolates_periodically() {
        let p = ProfileSpec::Grid { u: vec![0.0, 0.25, 0.5, 0.75], rho: vec![0.5, 0.25, 0.5, 0.75] };
        p.validate().unwrap();
        assert_abs_diff_eq!(p.eval(0.125), 0.375, epsilon = 1e-12);
        assert_abs_diff_eq!(p.eval(0.875), 0.625, epsilon = 1e-12); // wrap toward ρ(1)=0.5
        assert_abs_diff_eq!(p.integral(0.0, 1.0), 0.5, epsilon = 1e-12);
        // periodic extension
        assert_abs_diff_eq!(p.eval(1.125), p.eval(0.125), epsilon = 1e-12);
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let p = ProfileSpec::Sine { mean: 0.9, amplitude: 0.3 };
        assert!(matches!(p.validate(), Err(ProfileError::OutOfRange { .. })));
    }

    #[test]
    fn front_geometry_rejects_flat_profiles() {
        assert!(ProfileSpec::Constant { value: 0.7 }.front_geometry().is_err());
    }

    #[test]
    fn regularized_integral_consistent() {
        let p = ProfileSpec::reference().regularized(8);
        let quad: f64 = (0..20_000).map(|i| p.eval((i as f64 + 0.5) / 20_000.0) / 20_000.0).sum();
        assert_abs_diff_eq!(p.integral(0.0, 1.0), quad, epsilon = 1e-6);
    }
}
