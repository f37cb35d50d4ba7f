//! Discretized Lifshitz-Dirac fermions on a ring of `N` sites.
//!
//! The spatial derivative is replaced by the centered difference, so a plane
//! wave of momentum `k` sees the effective momentum `k̃ = sin(kε)/ε` and the
//! dispersion `ω = sqrt(k̃^{2z} + m²)`. Equal-time two-point functions of the
//! spinor components are sums over the `N` allowed momenta, weighted by the
//! Fermi-Dirac factor `tanh(βω/2)`.
//!
//! Composite indices inside a [`CorrelationMatrix`] are site-major and
//! chirality-minor: `(a, s) -> 2a + s` with `s = 0` for `ψ₊` and `s = 1` for
//! `ψ₋`, where `a` is the position of the site inside the subsystem list.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("lattice needs at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("lattice spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("dynamical exponent z must be at least 1, got {0}")]
    InvalidExponent(u32),
    #[error("mass must be non-negative and finite, got {0}")]
    InvalidMass(f64),
    #[error("boundary phase must lie in [0, 1), got {0}")]
    InvalidBoundaryPhase(f64),
    #[error("inverse temperature must be positive or infinite, got {0}")]
    InvalidBeta(f64),
    #[error("subsystem is empty")]
    EmptySubsystem,
    #[error("site {site} appears more than once in the subsystem")]
    DuplicateSite { site: usize },
    #[error("site {site} is outside the lattice of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
}

/// Physical and lattice configuration. Natural units `ħ = α = k_B = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub n_sites: usize,
    pub spacing: f64,
    pub z_exponent: u32,
    pub mass: f64,
    /// Twist `θ` of the boundary condition `ψ_N = e^{2πiθ} ψ_0`.
    pub boundary_phase: f64,
    pub zero_modes: ZeroModeConvention,
}

impl LatticeSpec {
    /// Periodic, unit-spacing, massless lattice.
    pub fn new(n_sites: usize, z_exponent: u32) -> Result<Self, LatticeError> {
        let spec = Self {
            n_sites,
            spacing: 1.0,
            z_exponent,
            mass: 0.0,
            boundary_phase: 0.0,
            zero_modes: ZeroModeConvention::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self, LatticeError> {
        self.mass = mass;
        self.validate()?;
        Ok(self)
    }

    pub fn with_spacing(mut self, spacing: f64) -> Result<Self, LatticeError> {
        self.spacing = spacing;
        self.validate()?;
        Ok(self)
    }

    pub fn with_boundary_phase(mut self, theta: f64) -> Result<Self, LatticeError> {
        self.boundary_phase = theta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_zero_modes(mut self, convention: ZeroModeConvention) -> Self {
        self.zero_modes = convention;
        self
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.n_sites < 2 {
            return Err(LatticeError::TooFewSites(self.n_sites));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(LatticeError::InvalidSpacing(self.spacing));
        }
        if self.z_exponent < 1 {
            return Err(LatticeError::InvalidExponent(self.z_exponent));
        }
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(LatticeError::InvalidMass(self.mass));
        }
        if !(0.0..1.0).contains(&self.boundary_phase) {
            return Err(LatticeError::InvalidBoundaryPhase(self.boundary_phase));
        }
        Ok(())
    }

    /// Total ring length `L = Nε`.
    pub fn length(&self) -> f64 {
        self.n_sites as f64 * self.spacing
    }
}

/// Occupation assigned to gapless zero modes (`k̃ = 0`, `m = 0`) in the
/// ground state, where the many-body vacuum is degenerate.
///
/// At any finite `β` a zero-energy mode is half filled regardless of this
/// setting, since `tanh(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroModeConvention {
    /// `sign(0) = +1`: the zero mode takes the `k̃ → 0⁺` limit of the
    /// occupation factor, `F = (-1)^z`. The global ground state is pure.
    #[default]
    Polarized,
    /// `sign(0) = 0`: `F = 0`, each chirality of the zero mode is half
    /// filled. The global state is mixed on the zero-mode sector.
    HalfFilled,
}

/// Inverse temperature. `+∞` denotes the ground state.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Beta(f64);

impl Beta {
    pub const GROUND_STATE: Beta = Beta(f64::INFINITY);

    pub fn new(beta: f64) -> Result<Self, LatticeError> {
        if beta > 0.0 && !beta.is_nan() {
            Ok(Beta(beta))
        } else {
            Err(LatticeError::InvalidBeta(beta))
        }
    }

    pub fn from_temperature(t: f64) -> Result<Self, LatticeError> {
        if t > 0.0 && t.is_finite() {
            Ok(Beta(1.0 / t))
        } else {
            Err(LatticeError::InvalidBeta(1.0 / t))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_ground_state(self) -> bool {
        self.0.is_infinite()
    }

    /// `tanh(βω/2)`, with the ground-state limit taken exactly.
    pub fn fermi_weight(self, omega: f64) -> f64 {
        if omega == 0.0 {
            0.0
        } else if self.is_ground_state() {
            1.0
        } else {
            (0.5 * self.0 * omega).tanh()
        }
    }
}

/// Quantized momenta and the lattice dispersion.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    pub momenta: Vec<f64>,
    pub effective_momenta: Vec<f64>,
    pub frequencies: Vec<f64>,
}

impl ModeGrid {
    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    pub fn is_zero_mode(&self, kappa: usize) -> bool {
        self.frequencies[kappa] == 0.0
    }
}

pub fn build_mode_grid(spec: &LatticeSpec) -> ModeGrid {
    let n = spec.n_sites;
    let eps = spec.spacing;
    let z = spec.z_exponent as i32;
    let mut momenta = Vec::with_capacity(n);
    let mut effective = Vec::with_capacity(n);
    let mut freqs = Vec::with_capacity(n);
    for kappa in 0..n {
        let shifted = spec.boundary_phase + kappa as f64;
        let phase = 2.0 * PI * shifted / n as f64;
        // sin(kε) vanishes exactly when 2(θ+κ)/N is an integer; floating point
        // would otherwise leave a ~1e-16 residue at k = π/ε.
        let half_turns = 2.0 * shifted / n as f64;
        let k_eff = if (half_turns - half_turns.round()).abs() < 1e-12 {
            0.0
        } else {
            phase.sin() / eps
        };
        let omega = if spec.mass == 0.0 {
            k_eff.abs().powi(z)
        } else {
            (k_eff.powi(2 * z) + spec.mass * spec.mass).sqrt()
        };
        momenta.push(phase / eps);
        effective.push(k_eff);
        freqs.push(omega);
    }
    ModeGrid {
        momenta,
        effective_momenta: effective,
        frequencies: freqs,
    }
}

/// Chirality-diagonal occupation factor `F = ((-k̃)^z / ω) tanh(βω/2)`.
///
/// `F = 0` for a zero-energy mode at finite temperature; at `β = ∞` the zero
/// mode follows `convention`.
pub fn thermal_occupation_factor(
    k_eff: f64,
    omega: f64,
    z: u32,
    beta: Beta,
    convention: ZeroModeConvention,
) -> f64 {
    if omega == 0.0 {
        return match (beta.is_ground_state(), convention) {
            (true, ZeroModeConvention::Polarized) => parity_sign(z),
            _ => 0.0,
        };
    }
    let weight = beta.fermi_weight(omega);
    let k_pow = k_eff.abs().powi(z as i32);
    if k_pow == omega {
        // Massless: (-k̃)^z / |k̃|^z is exactly ±1.
        let sign = if k_eff > 0.0 { parity_sign(z) } else { 1.0 };
        return sign * weight;
    }
    (-k_eff).powi(z as i32) / omega * weight
}

/// Chirality-mixing factor `(m/ω) tanh(βω/2)`.
pub fn mass_mixing_factor(mass: f64, omega: f64, beta: Beta) -> f64 {
    if omega == 0.0 || mass == 0.0 {
        0.0
    } else {
        mass / omega * beta.fermi_weight(omega)
    }
}

fn parity_sign(z: u32) -> f64 {
    if z.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// 2×2 block `⟨ψ†_{s,i} ψ_{s',j}⟩`, indexed `[s][s']`.
pub type SpinorBlock = [[Complex64; 2]; 2];

/// Precomputed per-mode factors for one `(spec, β)` point.
struct ModeWeights {
    diagonal: Vec<f64>,
    mixing: Vec<f64>,
    n_sites: usize,
    boundary_phase: f64,
}

impl ModeWeights {
    fn new(spec: &LatticeSpec, beta: Beta) -> Self {
        let grid = build_mode_grid(spec);
        let diagonal = grid
            .effective_momenta
            .iter()
            .zip(&grid.frequencies)
            .map(|(&k, &w)| thermal_occupation_factor(k, w, spec.z_exponent, beta, spec.zero_modes))
            .collect();
        let mixing = grid
            .frequencies
            .iter()
            .map(|&w| mass_mixing_factor(spec.mass, w, beta))
            .collect();
        Self {
            diagonal,
            mixing,
            n_sites: spec.n_sites,
            boundary_phase: spec.boundary_phase,
        }
    }

    /// Block for separation `offset = j - i`.
    fn block(&self, offset: i64) -> SpinorBlock {
        let n = self.n_sites as i64;
        let mut diag = Complex64::new(0.0, 0.0);
        let mut mix = Complex64::new(0.0, 0.0);
        let twist = 2.0 * PI * self.boundary_phase * offset as f64 / n as f64;
        for (kappa, (&f, &g)) in self.diagonal.iter().zip(&self.mixing).enumerate() {
            if f == 0.0 && g == 0.0 {
                continue;
            }
            // k_κ ε · offset reduced modulo 2π on the integer part.
            let turns = (kappa as i64 * offset).rem_euclid(n);
            let angle = if self.boundary_phase == 0.0 {
                2.0 * PI * turns as f64 / n as f64
            } else {
                2.0 * PI * turns as f64 / n as f64 + twist
            };
            let (s, c) = angle.sin_cos();
            let phase = Complex64::new(c, s);
            diag += phase * f;
            mix += phase * g;
        }
        let norm = 0.5 / n as f64;
        let delta = if offset == 0 { 0.5 } else { 0.0 };
        let d = diag * norm;
        let x = -mix * norm;
        [
            [Complex64::new(delta, 0.0) + d, x],
            [x, Complex64::new(delta, 0.0) - d],
        ]
    }
}

/// Equal-time correlator block between sites `i` and `j`, evaluated by direct
/// summation over all `N` modes.
pub fn correlator_block(
    spec: &LatticeSpec,
    beta: Beta,
    i: usize,
    j: usize,
) -> Result<SpinorBlock, LatticeError> {
    spec.validate()?;
    for site in [i, j] {
        if site >= spec.n_sites {
            return Err(LatticeError::SiteOutOfRange {
                site,
                n_sites: spec.n_sites,
            });
        }
    }
    Ok(ModeWeights::new(spec, beta).block(j as i64 - i as i64))
}

/// Hermitian `2N_A × 2N_A` matrix of spinor correlators on a subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    subsystem: Vec<usize>,
}

impl CorrelationMatrix {
    /// Wraps a row-major square matrix. Used for externally assembled
    /// matrices; no physical invariant is checked here.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entries must be dim × dim");
        Self {
            dim,
            entries,
            subsystem: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subsystem(&self) -> &[usize] {
        &self.subsystem
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Largest `|C_ab - conj(C_ba)|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }
}

pub fn build_correlation_matrix(
    spec: &LatticeSpec,
    beta: Beta,
    subsystem: &[usize],
) -> Result<CorrelationMatrix, LatticeError> {
    spec.validate()?;
    check_subsystem(spec.n_sites, subsystem)?;
    let weights = ModeWeights::new(spec, beta);

    // Only the separations that actually occur are summed.
    let mut blocks: HashMap<i64, SpinorBlock> = HashMap::new();
    for &i in subsystem {
        for &j in subsystem {
            let offset = j as i64 - i as i64;
            blocks
                .entry(offset)
                .or_insert_with(|| weights.block(offset));
        }
    }

    let na = subsystem.len();
    let dim = 2 * na;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (a, &i) in subsystem.iter().enumerate() {
        for (b, &j) in subsystem.iter().enumerate() {
            let block = &blocks[&(j as i64 - i as i64)];
            for s in 0..2 {
                for t in 0..2 {
                    entries[(2 * a + s) * dim + 2 * b + t] = block[s][t];
                }
            }
        }
    }
    Ok(CorrelationMatrix {
        dim,
        entries,
        subsystem: subsystem.to_vec(),
    })
}

pub fn check_subsystem(n_sites: usize, subsystem: &[usize]) -> Result<(), LatticeError> {
    if subsystem.is_empty() {
        return Err(LatticeError::EmptySubsystem);
    }
    let mut seen = vec![false; n_sites];
    for &site in subsystem {
        if site >= n_sites {
            return Err(LatticeError::SiteOutOfRange { site, n_sites });
        }
        if std::mem::replace(&mut seen[site], true) {
            return Err(LatticeError::DuplicateSite { site });
        }
    }
    Ok(())
}

/// Contiguous block `[0, n_a)`.
pub fn contiguous(n_a: usize) -> Vec<usize> {
    (0..n_a).collect()
}

/// `(1/2L) Σ_κ e^{2πi(dx/L)κ} sign(k̃_κ)` on an `N`-site ring of length `L`,
/// with `sign(0) = 0`.
pub fn offdiagonal_sum_check(n_sites: usize, length: f64, dx: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for kappa in 0..n_sites {
        let sign = lattice_momentum_sign(kappa, n_sites);
        if sign == 0.0 {
            continue;
        }
        let (s, c) = (2.0 * PI * (dx / length) * kappa as f64).sin_cos();
        acc += Complex64::new(c, s) * sign;
    }
    acc / (2.0 * length)
}

/// Sign of `sin(2πκ/N)`, exactly zero at `κ = 0` and `κ = N/2`.
fn lattice_momentum_sign(kappa: usize, n_sites: usize) -> f64 {
    let twice = 2 * kappa;
    if twice.is_multiple_of(n_sites) {
        0.0
    } else if twice < n_sites {
        1.0
    } else {
        -1.0
    }
}

/// One-sided geometric resummation `(1/2L) / (1 - e^{2πi dx/L})`.
pub fn offdiagonal_continuum_limit(length: f64, dx: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * dx / length).sin_cos();
    Complex64::new(0.5 / length, 0.0) / (Complex64::new(1.0, 0.0) - Complex64::new(c, s))
}

/// Infinite-line limit `-i / (4π dx)`.
pub fn offdiagonal_infinite_line(dx: f64) -> Complex64 {
    Complex64::new(0.0, -1.0 / (4.0 * PI * dx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(n: usize, z: u32, m: f64) -> LatticeSpec {
        LatticeSpec::new(n, z).unwrap().with_mass(m).unwrap()
    }

    #[test]
    fn mode_grid_quarter_points() {
        let grid = build_mode_grid(&spec(4, 1, 0.0));
        let expected_k = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        let expected_kt = [0.0, 1.0, 0.0, -1.0];
        for i in 0..4 {
            assert_abs_diff_eq!(grid.momenta[i], expected_k[i], epsilon = 1e-15);
            assert_abs_diff_eq!(grid.effective_momenta[i], expected_kt[i], epsilon = 1e-15);
        }
        assert_eq!(grid.frequencies, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn mode_grid_massive_z2() {
        let grid = build_mode_grid(&spec(4, 2, 3.0));
        let r10 = 10f64.sqrt();
        for (w, e) in grid.frequencies.iter().zip([3.0, r10, 3.0, r10]) {
            assert_abs_diff_eq!(*w, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn mode_grid_invariants_hold_for_twisted_lattices() {
        for &(n, eps, theta, m) in &[(7, 0.5, 0.3, 0.2), (10, 2.0, 0.0, 0.0), (33, 1.0, 0.5, 1.0)] {
            let s = LatticeSpec::new(n, 3)
                .unwrap()
                .with_spacing(eps)
                .unwrap()
                .with_boundary_phase(theta)
                .unwrap()
                .with_mass(m)
                .unwrap();
            let g = build_mode_grid(&s);
            assert_eq!(g.len(), n);
            for (&kt, &w) in g.effective_momenta.iter().zip(&g.frequencies) {
                assert!(kt.abs() <= 1.0 / eps + 1e-15);
                assert!(w >= m - 1e-15);
            }
        }
    }

    #[test]
    fn occupation_factor_examples() {
        let inf = Beta::GROUND_STATE;
        let pol = ZeroModeConvention::Polarized;
        assert_eq!(thermal_occupation_factor(1.0, 1.0, 1, inf, pol), -1.0);
        assert_eq!(
            thermal_occupation_factor(0.0, 0.0, 2, Beta::new(10.0).unwrap(), pol),
            0.0
        );
        let f = thermal_occupation_factor(-1.0, 1.0, 2, Beta::new(2.0).unwrap(), pol);
        assert_abs_diff_eq!(f, 1f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(f, 0.76159, epsilon = 1e-5);
    }

    #[test]
    fn zero_mode_conventions_at_ground_state() {
        let inf = Beta::GROUND_STATE;
        let half = ZeroModeConvention::HalfFilled;
        let pol = ZeroModeConvention::Polarized;
        for z in 1..6 {
            assert_eq!(thermal_occupation_factor(0.0, 0.0, z, inf, half), 0.0);
            assert_eq!(
                thermal_occupation_factor(0.0, 0.0, z, inf, pol),
                parity_sign(z)
            );
        }
    }

    #[test]
    fn beta_rejects_non_positive() {
        assert!(Beta::new(0.0).is_err());
        assert!(Beta::new(-1.0).is_err());
        assert!(Beta::new(f64::NAN).is_err());
        assert!(Beta::new(f64::INFINITY).unwrap().is_ground_state());
        assert_abs_diff_eq!(Beta::from_temperature(0.25).unwrap().value(), 4.0);
    }

    #[test]
    fn spec_validation() {
        assert_eq!(LatticeSpec::new(1, 1), Err(LatticeError::TooFewSites(1)));
        assert_eq!(
            LatticeSpec::new(4, 0),
            Err(LatticeError::InvalidExponent(0))
        );
        assert!(LatticeSpec::new(4, 1).unwrap().with_mass(-0.1).is_err());
        assert!(LatticeSpec::new(4, 1).unwrap().with_spacing(0.0).is_err());
        assert!(LatticeSpec::new(4, 1)
            .unwrap()
            .with_boundary_phase(1.0)
            .is_err());
    }

    #[test]
    fn even_z_massless_ground_state_blocks() {
        for z in [2, 4] {
            let s = spec(10, z, 0.0);
            for (i, j) in [(0, 0), (2, 5), (9, 1)] {
                let b = correlator_block(&s, Beta::GROUND_STATE, i, j).unwrap();
                let delta = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(b[0][0].re, delta, epsilon = 1e-14);
                assert_abs_diff_eq!(b[0][0].im, 0.0, epsilon = 1e-14);
                assert_abs_diff_eq!(b[1][1].norm(), 0.0, epsilon = 1e-14);
                assert_eq!(b[0][1], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn half_filled_n4_blocks() {
        // Oracle: direct evaluation of the four-term sum with sign(0) = 0.
        let s = spec(4, 1, 0.0).with_zero_modes(ZeroModeConvention::HalfFilled);
        let b = correlator_block(&s, Beta::GROUND_STATE, 0, 1).unwrap();
        assert_abs_diff_eq!(b[0][0].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[0][0].im, -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1][1].im, 0.25, epsilon = 1e-15);
        let d = correlator_block(&s, Beta::GROUND_STATE, 2, 2).unwrap();
        assert_abs_diff_eq!(d[0][0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1][1].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn half_filled_n4_matrix_layout() {
        let s = spec(4, 1, 0.0).with_zero_modes(ZeroModeConvention::HalfFilled);
        let c = build_correlation_matrix(&s, Beta::GROUND_STATE, &[0, 1]).unwrap();
        assert_eq!(c.dim(), 4);
        for r in 0..4 {
            assert_abs_diff_eq!(c.get(r, r).re, 0.5, epsilon = 1e-15);
        }
        // (site 0, +) ↔ (site 1, +) and the minus-chirality counterpart.
        assert_abs_diff_eq!(c.get(0, 2).im, -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(2, 0).im, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(1, 3).im, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(0, 1).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn infinite_temperature_limit_is_half_identity() {
        let s = spec(12, 3, 0.5);
        let c = build_correlation_matrix(&s, Beta::new(1e-12).unwrap(), &[0, 1, 2, 7]).unwrap();
        for r in 0..c.dim() {
            for col in 0..c.dim() {
                let expected = if r == col { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(c.get(r, col).re, expected, epsilon = 1e-12);
                assert_abs_diff_eq!(c.get(r, col).im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn subsystem_errors() {
        let s = spec(5, 1, 0.0);
        assert_eq!(
            build_correlation_matrix(&s, Beta::GROUND_STATE, &[0, 2, 2]),
            Err(LatticeError::DuplicateSite { site: 2 })
        );
        assert_eq!(
            build_correlation_matrix(&s, Beta::GROUND_STATE, &[5]),
            Err(LatticeError::SiteOutOfRange {
                site: 5,
                n_sites: 5
            })
        );
        assert_eq!(
            build_correlation_matrix(&s, Beta::GROUND_STATE, &[]),
            Err(LatticeError::EmptySubsystem)
        );
        assert!(correlator_block(&s, Beta::GROUND_STATE, 0, 7).is_err());
    }

    #[test]
    fn massless_has_no_cross_chirality_terms() {
        for z in 1..5 {
            for beta in [
                Beta::GROUND_STATE,
                Beta::new(3.0).unwrap(),
                Beta::new(0.1).unwrap(),
            ] {
                let c = build_correlation_matrix(&spec(17, z, 0.0), beta, &[0, 1, 4, 9]).unwrap();
                for a in 0..4 {
                    for b in 0..4 {
                        assert_eq!(c.get(2 * a, 2 * b + 1), Complex64::new(0.0, 0.0));
                        assert_eq!(c.get(2 * a + 1, 2 * b), Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn parity_classes_give_identical_ground_state_matrices() {
        let sub: Vec<usize> = (0..12).collect();
        for z in 1..8 {
            let a = build_correlation_matrix(&spec(40, z, 0.0), Beta::GROUND_STATE, &sub).unwrap();
            let b =
                build_correlation_matrix(&spec(40, z + 2, 0.0), Beta::GROUND_STATE, &sub).unwrap();
            for (x, y) in a.entries().iter().zip(b.entries()) {
                assert!((x - y).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn blocks_depend_only_on_separation() {
        let s = spec(15, 3, 0.7);
        let beta = Beta::new(2.0).unwrap();
        let reference = correlator_block(&s, beta, 0, 4).unwrap();
        for i in 1..11 {
            let b = correlator_block(&s, beta, i, i + 4).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    assert!((b[r][c] - reference[r][c]).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn twisted_phase_sum_matches_naive_exponent() {
        let s = LatticeSpec::new(9, 1)
            .unwrap()
            .with_boundary_phase(0.37)
            .unwrap()
            .with_mass(0.4)
            .unwrap();
        let beta = Beta::new(1.5).unwrap();
        let grid = build_mode_grid(&s);
        let b = correlator_block(&s, beta, 2, 7).unwrap();
        let mut sum = Complex64::new(0.0, 0.0);
        for kappa in 0..9 {
            let f = thermal_occupation_factor(
                grid.effective_momenta[kappa],
                grid.frequencies[kappa],
                1,
                beta,
                s.zero_modes,
            );
            sum += Complex64::from_polar(1.0, grid.momenta[kappa] * 5.0) * f;
        }
        assert!((b[0][0] - sum / 18.0).norm() < 1e-14);
    }

    #[test]
    fn offdiagonal_sum_closed_form() {
        // Σ_{κ} sign(sin 2πκ/N) e^{2πiκd/N} = 2i cot(πd/N) for odd d and 0 for even d.
        let n = 64;
        for d in 1..20 {
            let v = offdiagonal_sum_check(n, n as f64, d as f64);
            let expected = if d % 2 == 1 {
                1.0 / (PI * d as f64 / n as f64).tan() / n as f64
            } else {
                0.0
            };
            assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(v.im, expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn continuum_references() {
        let antipode = offdiagonal_continuum_limit(1.0, 0.5);
        assert_abs_diff_eq!(antipode.re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(antipode.im, 0.0, epsilon = 1e-15);
        // Large-L limit of the resummed form.
        let far = offdiagonal_continuum_limit(1e6, 10.0);
        assert_abs_diff_eq!(
            far.im,
            offdiagonal_infinite_line(10.0).im.abs(),
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            offdiagonal_infinite_line(10.0).im.abs(),
            0.0079577,
            epsilon = 1e-7
        );
    }
}
