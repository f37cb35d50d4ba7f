//! Exact diagonalization in the full fermionic Fock space of a tiny ring.
//!
//! Modes are labeled `a = 2·site + s` (`s = 0` for `ψ₊`, `1` for `ψ₋`). An
//! occupation bitmask `n` stands for `∏_{a ascending} (c†_a)^{n_a} |0⟩`, so an
//! operator on mode `a` picks up `(-1)` per occupied mode below `a`.
//!
//! The state is stored as density-matrix blocks per particle number, which
//! keeps six sites (4096 states, largest block 924) cheap.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::{build_mode_grid, check_subsystem, Beta, LatticeError, LatticeSpec};

/// Largest ring the oracle accepts.
pub const MAX_ORACLE_SITES: usize = 6;

/// Single-particle levels closer than this to zero make the ground state
/// degenerate.
pub const ZERO_LEVEL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("exact diagonalization is limited to {MAX_ORACLE_SITES} sites, got {0}")]
    TooLarge(usize),
    /// A zero single-particle level leaves the many-body ground space degenerate.
    #[error(
        "ground state is degenerate (single-particle level {level:.3e}); use finite beta or a mass"
    )]
    DegenerateGroundState { level: f64 },
    #[error("mode {mode} is outside the {n_modes}-mode Fock space")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Position-space single-particle Hamiltonian, `2N × 2N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleHamiltonian {
    pub matrix: DMatrix<Complex64>,
}

impl SingleParticleHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Ascending single-particle spectrum.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// `h(k) = -(-k̃)^z σ³ + m σ¹`, Fourier transformed to the ring.
pub fn single_particle_hamiltonian(
    spec: &LatticeSpec,
) -> Result<SingleParticleHamiltonian, OracleError> {
    spec.validate()?;
    let n = spec.n_sites;
    let grid = build_mode_grid(spec);
    let z = spec.z_exponent as i32;
    let mut h = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            let mut diag = Complex64::new(0.0, 0.0);
            let mut mix = Complex64::new(0.0, 0.0);
            for kappa in 0..n {
                let phase = 2.0 * PI * (spec.boundary_phase + kappa as f64) * (i as f64 - j as f64)
                    / n as f64;
                let e = Complex64::from_polar(1.0, phase);
                diag += e * (-grid.effective_momenta[kappa]).powi(z);
                mix += e * spec.mass;
            }
            diag /= n as f64;
            mix /= n as f64;
            h[(2 * i, 2 * j)] = -diag;
            h[(2 * i + 1, 2 * j + 1)] = diag;
            h[(2 * i, 2 * j + 1)] = mix;
            h[(2 * i + 1, 2 * j)] = mix;
        }
    }
    Ok(SingleParticleHamiltonian { matrix: h })
}

/// Density-matrix block for a fixed total particle number.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub particles: u32,
    /// Occupation bitmasks spanning the block, ascending.
    pub states: Vec<u32>,
    pub rho: DMatrix<Complex64>,
}

/// Many-body density matrix of `2N` fermionic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub n_sites: usize,
    pub sectors: Vec<Sector>,
    /// `Tr(ρ H)`; `None` for states not built from a Hamiltonian.
    pub energy: Option<f64>,
}

impl FockState {
    pub fn n_modes(&self) -> usize {
        2 * self.n_sites
    }

    /// `4^N`.
    pub fn dimension(&self) -> usize {
        1 << self.n_modes()
    }

    pub fn trace(&self) -> Complex64 {
        self.sectors.iter().map(|s| s.rho.trace()).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.sectors
            .iter()
            .map(|s| {
                (&s.rho - s.rho.adjoint())
                    .iter()
                    .fold(0.0f64, |a, x| a.max(x.norm()))
            })
            .fold(0.0, f64::max)
    }

    /// Ascending spectrum of `ρ`.
    pub fn populations(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .sectors
            .iter()
            .flat_map(|s| {
                s.rho
                    .clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .copied()
                    .collect::<Vec<_>>()
            })
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.sectors
            .iter()
            .map(|s| s.rho.iter().map(|x| x.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Pure occupation-number state `|n⟩`.
    pub fn basis_state(n_sites: usize, occupied: u32) -> Result<Self, OracleError> {
        check_size(n_sites)?;
        let particles = occupied.count_ones();
        let sectors = (0..=2 * n_sites as u32)
            .map(|p| {
                let states = sector_states(2 * n_sites, p);
                let mut rho =
                    DMatrix::from_element(states.len(), states.len(), Complex64::new(0.0, 0.0));
                if p == particles {
                    let idx = states
                        .binary_search(&occupied)
                        .expect("mask has the right count");
                    rho[(idx, idx)] = Complex64::new(1.0, 0.0);
                }
                Sector {
                    particles: p,
                    states,
                    rho,
                }
            })
            .collect();
        Ok(Self {
            n_sites,
            sectors,
            energy: None,
        })
    }

    /// `Tr(ρ c†_a c_b)`.
    pub fn correlator(&self, a: usize, b: usize) -> Result<Complex64, OracleError> {
        let n_modes = self.n_modes();
        for mode in [a, b] {
            if mode >= n_modes {
                return Err(OracleError::ModeOutOfRange { mode, n_modes });
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for sector in &self.sectors {
            for (col, &state) in sector.states.iter().enumerate() {
                if let Some((target, sign)) = hop(state, a, b) {
                    let row = sector
                        .states
                        .binary_search(&target)
                        .expect("hopping conserves particle number");
                    acc += sector.rho[(col, row)] * sign;
                }
            }
        }
        Ok(acc)
    }

    /// `⟨c†_{(i,s)} c_{(j,s')}⟩` over the sites of `subsystem`, in the
    /// composite ordering of the correlation-matrix pipeline.
    pub fn correlation_matrix(
        &self,
        subsystem: &[usize],
    ) -> Result<DMatrix<Complex64>, OracleError> {
        check_subsystem(self.n_sites, subsystem)?;
        let dim = 2 * subsystem.len();
        let mut out = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (p, &i) in subsystem.iter().enumerate() {
            for (q, &j) in subsystem.iter().enumerate() {
                for s in 0..2 {
                    for t in 0..2 {
                        out[(2 * p + s, 2 * q + t)] = self.correlator(2 * i + s, 2 * j + t)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn check_size(n_sites: usize) -> Result<(), OracleError> {
    if n_sites > MAX_ORACLE_SITES {
        Err(OracleError::TooLarge(n_sites))
    } else if n_sites < 1 {
        Err(LatticeError::TooFewSites(n_sites).into())
    } else {
        Ok(())
    }
}

fn sector_states(n_modes: usize, particles: u32) -> Vec<u32> {
    (0u32..1 << n_modes)
        .filter(|s| s.count_ones() == particles)
        .collect()
}

/// Parity of occupied modes strictly below `mode`.
fn string_sign(state: u32, mode: usize) -> f64 {
    if (state & ((1u32 << mode) - 1))
        .count_ones()
        .is_multiple_of(2)
    {
        1.0
    } else {
        -1.0
    }
}

/// `c†_a c_b |state⟩ = sign |target⟩`, or `None` if it vanishes.
fn hop(state: u32, a: usize, b: usize) -> Option<(u32, f64)> {
    if state & (1 << b) == 0 {
        return None;
    }
    let sign_b = string_sign(state, b);
    let mid = state & !(1 << b);
    if mid & (1 << a) != 0 {
        return None;
    }
    let sign_a = string_sign(mid, a);
    Some((mid | (1 << a), sign_a * sign_b))
}

fn sector_hamiltonian(h: &DMatrix<Complex64>, states: &[u32]) -> DMatrix<Complex64> {
    let n_modes = h.nrows();
    let mut out = DMatrix::from_element(states.len(), states.len(), Complex64::new(0.0, 0.0));
    for (col, &state) in states.iter().enumerate() {
        for b in (0..n_modes).filter(|&b| state & (1 << b) != 0) {
            for a in 0..n_modes {
                let amp = h[(a, b)];
                if amp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if let Some((target, sign)) = hop(state, a, b) {
                    let row = states.binary_search(&target).expect("same sector");
                    out[(row, col)] += amp * sign;
                }
            }
        }
    }
    out
}

/// Ground state (`β = ∞`) or Gibbs state of `H = Σ c†_a h_ab c_b`.
pub fn many_body_state(spec: &LatticeSpec, beta: Beta) -> Result<FockState, OracleError> {
    check_size(spec.n_sites)?;
    let hamiltonian = single_particle_hamiltonian(spec)?;
    let levels = hamiltonian.spectrum();
    let n_modes = hamiltonian.dim();

    if beta.is_ground_state() {
        if let Some(&level) = levels.iter().find(|e| e.abs() <= ZERO_LEVEL_TOLERANCE) {
            return Err(OracleError::DegenerateGroundState { level });
        }
        let filled = levels.iter().filter(|&&e| e < 0.0).count() as u32;
        let mut sectors = Vec::new();
        let mut energy = 0.0;
        for p in 0..=n_modes as u32 {
            let states = sector_states(n_modes, p);
            let dim = states.len();
            let rho = if p == filled {
                let eig = sector_hamiltonian(&hamiltonian.matrix, &states).symmetric_eigen();
                let (lowest, e0) = eig
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .min_by(|x, y| x.1.total_cmp(y.1))
                    .map(|(i, &e)| (i, e))
                    .expect("non-empty sector");
                energy = e0;
                let v = eig.eigenvectors.column(lowest).into_owned();
                &v * v.adjoint()
            } else {
                DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0))
            };
            sectors.push(Sector {
                particles: p,
                states,
                rho,
            });
        }
        return Ok(FockState {
            n_sites: spec.n_sites,
            sectors,
            energy: Some(energy),
        });
    }

    // Gibbs state, with energies measured from the single-particle ground
    // energy so the Boltzmann weights never overflow.
    let e_floor: f64 = levels.iter().filter(|&&e| e < 0.0).sum();
    let b = beta.value();
    let mut sectors = Vec::new();
    let mut partition = 0.0;
    let mut weighted_energy = 0.0;
    for p in 0..=n_modes as u32 {
        let states = sector_states(n_modes, p);
        let eig = sector_hamiltonian(&hamiltonian.matrix, &states).symmetric_eigen();
        let weights: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&e| (-b * (e - e_floor)).exp())
            .collect();
        partition += weights.iter().sum::<f64>();
        weighted_energy += weights
            .iter()
            .zip(eig.eigenvalues.iter())
            .map(|(w, e)| w * e)
            .sum::<f64>();
        let v = &eig.eigenvectors;
        let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| v[(r, c)] * weights[c]);
        sectors.push(Sector {
            particles: p,
            states,
            rho: scaled * v.adjoint(),
        });
    }
    for s in &mut sectors {
        s.rho /= Complex64::new(partition, 0.0);
    }
    Ok(FockState {
        n_sites: spec.n_sites,
        sectors,
        energy: Some(weighted_energy / partition),
    })
}

/// Von Neumann entropy of the reduced state on `subsystem` (sites).
pub fn reduced_entropy(state: &FockState, subsystem: &[usize]) -> Result<f64, OracleError> {
    check_subsystem(state.n_sites, subsystem)?;
    let n_modes = state.n_modes();

    // New position of every mode: subsystem modes first, in the given
    // order, then the rest ascending.
    let mut order: Vec<usize> = subsystem.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect();
    let n_a_modes = order.len();
    order.extend((0..n_modes).filter(|m| !subsystem.contains(&(m / 2))));
    let mut position = vec![0usize; n_modes];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let relabel = |s: u32| -> (u32, f64) {
        let occupied: Vec<usize> = (0..n_modes).filter(|&m| s & (1 << m) != 0).collect();
        let mut inversions = 0;
        let mut mask = 0u32;
        for (x, &p) in occupied.iter().enumerate() {
            mask |= 1 << position[p];
            inversions += occupied[x + 1..]
                .iter()
                .filter(|&&q| position[q] < position[p])
                .count();
        }
        (mask, if inversions % 2 == 0 { 1.0 } else { -1.0 })
    };

    let a_mask = (1u32 << n_a_modes) - 1;
    let mut blocks: HashMap<u32, (Vec<u32>, DMatrix<Complex64>)> = HashMap::new();
    for n_a in 0..=n_a_modes as u32 {
        let states = sector_states(n_a_modes, n_a);
        let dim = states.len();
        blocks.insert(
            n_a,
            (
                states,
                DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0)),
            ),
        );
    }

    for sector in &state.sectors {
        // Group basis states by their complement occupation.
        let mut groups: HashMap<u32, Vec<(usize, u32, f64)>> = HashMap::new();
        for (idx, &s) in sector.states.iter().enumerate() {
            let (mask, sign) = relabel(s);
            groups
                .entry(mask >> n_a_modes)
                .or_default()
                .push((idx, mask & a_mask, sign));
        }
        for members in groups.values() {
            for &(i, a_i, s_i) in members {
                let (states, block) = blocks
                    .get_mut(&a_i.count_ones())
                    .expect("all counts present");
                let r = states.binary_search(&a_i).expect("member of A sector");
                for &(j, a_j, s_j) in members {
                    let c = states.binary_search(&a_j).expect("same A count");
                    block[(r, c)] += sector.rho[(i, j)] * (s_i * s_j);
                }
            }
        }
    }

    let mut entropy = 0.0;
    for (_, block) in blocks.into_values() {
        for &lambda in block.symmetric_eigen().eigenvalues.iter() {
            if lambda > 1e-15 {
                entropy -= lambda * lambda.ln();
            }
        }
    }
    Ok(entropy.max(0.0))
}
