//! Continuous MERA for Lifshitz fermions: Bogoliubov angle, entangler
//! strength `g(u)`, emergent radial metric and the geodesic estimate of the
//! entanglement entropy.
//!
//! Scale `u ≤ 0` maps to momentum `k = Λ e^u`, with `Λ = 1/ε` and a sharp
//! cut-off at `|k| = Λ`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use thiserror::Error;

/// Coarsest sampling accepted by [`g_from_phi_numeric`]: 100 points per
/// decade of `k`.
pub const MAX_PROFILE_SPACING: f64 = std::f64::consts::LN_10 / 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmeraError {
    #[error("momentum must be positive, got {0}")]
    InvalidMomentum(f64),
    #[error("parameter {name} is invalid: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("scale u = {0} lies above the cut-off (u must be <= 0)")]
    AboveCutoff(f64),
    #[error("angle profile is too coarse: {0}")]
    InsufficientSampling(String),
    #[error("angle {phi} at u = {u} exceeds pi/2 in magnitude")]
    InvalidProfile { u: f64, phi: f64 },
    #[error("interval l = {l} must exceed the cut-off length {epsilon}")]
    DegenerateInterval { l: f64, epsilon: f64 },
    #[error("momentum grid must be ascending and symmetric about 0")]
    NonSymmetricGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmeraParams {
    pub z: u32,
    pub mass: f64,
    /// UV cut-off `Λ = 1/ε`.
    pub cutoff: f64,
    /// Lower end of the sampled scale range; the upper end is 0.
    pub u_min: f64,
}

impl CmeraParams {
    pub fn new(z: u32, mass: f64, cutoff: f64, u_min: f64) -> Result<Self, CmeraError> {
        if z < 1 {
            return Err(CmeraError::InvalidParameter {
                name: "z",
                value: z as f64,
            });
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(CmeraError::InvalidParameter {
                name: "mass",
                value: mass,
            });
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(CmeraError::InvalidParameter {
                name: "cutoff",
                value: cutoff,
            });
        }
        if !(u_min < 0.0 && u_min.is_finite()) {
            return Err(CmeraError::InvalidParameter {
                name: "u_min",
                value: u_min,
            });
        }
        Ok(Self {
            z,
            mass,
            cutoff,
            u_min,
        })
    }
}

fn parity(z: u32) -> f64 {
    if z.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `φ_k = ½ arcsin(k^z / sqrt(k^{2z} + m²)) - (-1)^z π/4` for `k > 0`.
pub fn bogoliubov_angle(k: f64, z: u32, mass: f64) -> Result<f64, CmeraError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(CmeraError::InvalidMomentum(k));
    }
    let a = k.powi(z as i32);
    Ok(0.5 * (a / a.hypot(mass)).asin() - parity(z) * FRAC_PI_4)
}

/// Angle that minimizes the energy integrand at momentum `k` of either sign:
/// `cos 2φ = -(-k)^z / ω`, `sin 2φ = m / ω`.
pub fn minimizing_angle(k: f64, z: u32, mass: f64) -> f64 {
    0.5 * mass.atan2(-(-k).powi(z as i32))
}

/// `g(u) = -φ_k + k dφ_k/dk` at `k = Λ e^u`, from the closed-form angle.
pub fn g_closed_form(u: f64, z: u32, mass: f64, cutoff: f64) -> Result<f64, CmeraError> {
    if u > 0.0 {
        return Err(CmeraError::AboveCutoff(u));
    }
    let k = cutoff * u.exp();
    let phi = bogoliubov_angle(k, z, mass)?;
    let a = k.powi(z as i32);
    // k dφ/dk = z m k^z / (2 (k^{2z} + m²)), written to avoid overflow.
    let slope = if mass == 0.0 {
        0.0
    } else {
        let r = a.hypot(mass);
        0.5 * z as f64 * (a / r) * (mass / r)
    };
    Ok(-phi + slope)
}

/// Radial metric component `g_uu = g(u)² / 3`.
pub fn metric_guu(u: f64, z: u32, mass: f64, cutoff: f64) -> Result<f64, CmeraError> {
    let g = g_closed_form(u, z, mass, cutoff)?;
    Ok(g * g / 3.0)
}

/// Angle samples on a uniform grid in `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleProfile {
    u: Vec<f64>,
    phi: Vec<f64>,
}

impl AngleProfile {
    pub fn new(u: Vec<f64>, phi: Vec<f64>) -> Result<Self, CmeraError> {
        if u.len() != phi.len() {
            return Err(CmeraError::InsufficientSampling(format!(
                "{} scales but {} angles",
                u.len(),
                phi.len()
            )));
        }
        if let Some((&u, &phi)) = u
            .iter()
            .zip(&phi)
            .find(|(_, p)| !(p.abs() <= FRAC_PI_2 + 1e-12))
        {
            return Err(CmeraError::InvalidProfile { u, phi });
        }
        Ok(Self { u, phi })
    }

    /// Closed-form angle on `points` evenly spaced scales in `[u_min, 0]`.
    pub fn closed_form(params: &CmeraParams, points: usize) -> Result<Self, CmeraError> {
        let u = uniform_scales(params.u_min, points);
        let phi = u
            .iter()
            .map(|&u| bogoliubov_angle(params.cutoff * u.exp(), params.z, params.mass))
            .collect::<Result<_, _>>()?;
        Self::new(u, phi)
    }

    pub fn constant(value: f64, u_min: f64, points: usize) -> Result<Self, CmeraError> {
        let u = uniform_scales(u_min, points);
        let phi = vec![value; u.len()];
        Self::new(u, phi)
    }

    pub fn scales(&self) -> &[f64] {
        &self.u
    }

    pub fn angles(&self) -> &[f64] {
        &self.phi
    }
}

fn uniform_scales(u_min: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![u_min; points];
    }
    (0..points)
        .map(|i| u_min * (1.0 - i as f64 / (points - 1) as f64))
        .collect()
}

/// `g(u) = -φ + dφ/du` by fourth-order finite differences (one-sided at
/// the ends).
pub fn g_from_phi_numeric(profile: &AngleProfile) -> Result<Vec<f64>, CmeraError> {
    let (u, phi) = (&profile.u, &profile.phi);
    let n = u.len();
    if n < 5 {
        return Err(CmeraError::InsufficientSampling(format!(
            "{n} samples, need at least 5"
        )));
    }
    let h = (u[n - 1] - u[0]) / (n - 1) as f64;
    if !(h > 0.0) {
        return Err(CmeraError::InsufficientSampling(
            "scales must increase".into(),
        ));
    }
    if h > MAX_PROFILE_SPACING * (1.0 + 1e-12) {
        return Err(CmeraError::InsufficientSampling(format!(
            "spacing {h:.4} exceeds {MAX_PROFILE_SPACING:.4}"
        )));
    }
    if u.windows(2)
        .any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0))
    {
        return Err(CmeraError::InsufficientSampling(
            "scales are not evenly spaced".into(),
        ));
    }
    let d = |i: usize| -> f64 {
        let p = |j: usize| phi[j];
        let sum = if i == 0 {
            -25.0 * p(0) + 48.0 * p(1) - 36.0 * p(2) + 16.0 * p(3) - 3.0 * p(4)
        } else if i == 1 {
            -3.0 * p(0) - 10.0 * p(1) + 18.0 * p(2) - 6.0 * p(3) + p(4)
        } else if i == n - 2 {
            3.0 * p(n - 1) + 10.0 * p(n - 2) - 18.0 * p(n - 3) + 6.0 * p(n - 4) - p(n - 5)
        } else if i == n - 1 {
            25.0 * p(n - 1) - 48.0 * p(n - 2) + 36.0 * p(n - 3) - 16.0 * p(n - 4) + 3.0 * p(n - 5)
        } else {
            p(i - 2) - 8.0 * p(i - 1) + 8.0 * p(i + 1) - p(i + 2)
        };
        sum / (12.0 * h)
    };
    Ok((0..n).map(|i| -phi[i] + d(i)).collect())
}

/// Ascending grid of `points` momenta spanning `[-Λ, Λ]`.
pub fn symmetric_momenta(cutoff: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| cutoff * (2.0 * i as f64 / (points - 1) as f64 - 1.0))
        .collect()
}

/// `∫ dk/2π [(-k)^z cos 2φ_k - m sin 2φ_k]` by the trapezoidal rule over an
/// ascending grid symmetric about `k = 0`.
pub fn energy_density(momenta: &[f64], phi: &[f64], z: u32, mass: f64) -> Result<f64, CmeraError> {
    let n = momenta.len();
    if n < 2 || phi.len() != n {
        return Err(CmeraError::NonSymmetricGrid);
    }
    let scale = momenta[n - 1].abs().max(momenta[0].abs());
    let symmetric = (0..n).all(|i| (momenta[i] + momenta[n - 1 - i]).abs() <= 1e-12 * scale);
    let ascending = momenta.windows(2).all(|w| w[1] > w[0]);
    if !symmetric || !ascending {
        return Err(CmeraError::NonSymmetricGrid);
    }
    let integrand: Vec<f64> = momenta
        .iter()
        .zip(phi)
        .map(|(&k, &p)| (-k).powi(z as i32) * (2.0 * p).cos() - mass * (2.0 * p).sin())
        .collect();
    let total: f64 = (0..n - 1)
        .map(|i| 0.5 * (integrand[i] + integrand[i + 1]) * (momenta[i + 1] - momenta[i]))
        .sum();
    Ok(total / (2.0 * PI))
}

/// `(2|g|/√3) ln(l/ε)` for a constant entangler strength.
pub fn geodesic_length(g: f64, l: f64, epsilon: f64) -> Result<f64, CmeraError> {
    check_interval(l, epsilon)?;
    Ok(2.0 * g.abs() / 3f64.sqrt() * (l / epsilon).ln())
}

fn check_interval(l: f64, epsilon: f64) -> Result<(), CmeraError> {
    if !(epsilon > 0.0 && l > epsilon && l.is_finite()) {
        return Err(CmeraError::DegenerateInterval { l, epsilon });
    }
    Ok(())
}

/// Length of the semicircle `r(s) = (l/2) sech s` in the metric `g_uu`, with
/// `u = ln(ε/r)` and `Λ = 1/ε`:
/// `2 ∫_{-acosh(l/2ε)}^0 sqrt(g_uu(u(s))) ds`, by Simpson's rule.
///
/// The semicircle is the exact geodesic only for constant `g`, where this
/// returns `(2|g|/√3) acosh(l/2ε)`; for `m > 0` it is an ansatz.
pub fn geodesic_length_semicircle(
    z: u32,
    mass: f64,
    l: f64,
    epsilon: f64,
    steps: usize,
) -> Result<f64, CmeraError> {
    check_interval(l, epsilon)?;
    if l < 2.0 * epsilon {
        return Ok(0.0);
    }
    let steps = steps.max(2) + steps % 2;
    let s_max = (l / (2.0 * epsilon)).acosh();
    let h = s_max / steps as f64;
    let integrand = |s: f64| -> Result<f64, CmeraError> {
        let r = 0.5 * l / s.cosh();
        let u = (epsilon / r).ln().min(0.0);
        Ok(metric_guu(u, z, mass, 1.0 / epsilon)?.sqrt())
    };
    let mut sum = integrand(0.0)? + integrand(s_max)?;
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * integrand(i as f64 * h)?;
    }
    Ok(2.0 * sum * h / 3.0)
}

/// Massless entangler strength `(π/4)((-1)^z - 1)`.
pub fn g_massless(z: u32) -> f64 {
    FRAC_PI_4 * (parity(z) - 1.0)
}

/// Holographic entanglement entropy of a massless Lifshitz fermion,
/// normalized so that `z = 1` gives `(c/3) ln(l/ε)`.
pub fn ee_cmera(z: u32, l: f64, epsilon: f64, central_charge: f64) -> Result<f64, CmeraError> {
    let length = geodesic_length(g_massless(z), l, epsilon)?;
    Ok(central_charge / (PI * 3f64.sqrt()) * length)
}
