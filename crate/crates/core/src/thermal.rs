//! Temperature sweeps, reference CFT formulas and the low/high temperature
//! fits of the entanglement entropy.
//!
//! The scaling variable throughout is `x = l β^{-1/z}` with `l = N_A ε`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::entropy::{entropy_of, max_entropy, EntropyError};
use crate::lattice::{contiguous, Beta, LatticeError, LatticeSpec};
use crate::table::{SweepRow, SweepTable, TableError};

/// Rows with `x` below this enter the low-temperature fit.
pub const LOW_T_MAX_X: f64 = 0.3;
/// Rows with `x` above this may enter the high-temperature fit.
pub const HIGH_T_MIN_X: f64 = 3.0;
/// High-temperature rows must stay below this fraction of `2 N_A ln 2`.
pub const SATURATION_FRACTION: f64 = 0.9;
/// High-temperature rows need a thermal length `β^{1/z}` of at least this
/// many lattice spacings.
pub const MIN_THERMAL_LENGTH: f64 = 3.0;
/// Decades of `β` the high-temperature window must span.
pub const MIN_BETA_DECADES: f64 = 2.0;
pub const MIN_FIT_ROWS: usize = 8;
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Error)]
pub enum ThermalError {
    #[error("unknown reference formula '{0}' (expected finite_size, thermal, low_t or high_t)")]
    InvalidKind(String),
    #[error("parameter {name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("jobs must be at least 1")]
    NoWorkers,
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("{rows} rows in the fit window, need at least {needed}")]
    InsufficientData { rows: usize, needed: usize },
    #[error("normal equations are ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("high-temperature regime unreachable: {reason}")]
    RegimeUnreachable { reason: String },
    #[error("rows in the fit window mix different lattice configurations")]
    MixedConfigurations,
}

/// Closed-form entanglement entropies of a 1+1d CFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CftKind {
    /// Interval on a periodic system of length `L` at zero temperature.
    FiniteSize,
    /// Interval on an infinite line at inverse temperature `β`.
    Thermal,
    /// Small `l/β` expansion of [`CftKind::Thermal`].
    LowTemperature,
    /// Large `l/β` expansion of [`CftKind::Thermal`].
    HighTemperature,
}

impl FromStr for CftKind {
    type Err = ThermalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "finite_size" => Ok(Self::FiniteSize),
            "thermal" => Ok(Self::Thermal),
            "low_t" | "low_t_expansion" => Ok(Self::LowTemperature),
            "high_t" | "high_t_expansion" => Ok(Self::HighTemperature),
            other => Err(ThermalError::InvalidKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CftParams {
    pub central_charge: f64,
    /// Interval length `l`.
    pub interval: f64,
    pub cutoff: f64,
    /// Inverse temperature; unused by [`CftKind::FiniteSize`].
    pub beta: f64,
    /// System length `L`; used only by [`CftKind::FiniteSize`].
    pub length: f64,
}

impl CftParams {
    /// Unit-spacing lattice of `n` sites with an `n_a`-site interval.
    pub fn lattice(central_charge: f64, n: usize, n_a: usize) -> Self {
        Self {
            central_charge,
            interval: n_a as f64,
            cutoff: 1.0,
            beta: f64::INFINITY,
            length: n as f64,
        }
    }
}

pub fn cft_reference(kind: CftKind, p: &CftParams) -> Result<f64, ThermalError> {
    let positive = |name, value: f64| {
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(ThermalError::InvalidParameter { name, value })
        }
    };
    let c = p.central_charge;
    let l = positive("interval", p.interval)?;
    let eps = positive("cutoff", p.cutoff)?;
    Ok(match kind {
        CftKind::FiniteSize => {
            let big_l = positive("length", p.length)?;
            c / 3.0 * (big_l / (PI * eps) * (PI * l / big_l).sin()).ln()
        }
        CftKind::Thermal => {
            let b = positive("beta", p.beta)?;
            c / 3.0 * (b / (PI * eps) * (PI * l / b).sinh()).ln()
        }
        CftKind::LowTemperature => {
            let b = positive("beta", p.beta)?;
            c / 3.0 * ((l / eps).ln() + PI * PI * l * l / (6.0 * b * b))
        }
        CftKind::HighTemperature => {
            let b = positive("beta", p.beta)?;
            c / 3.0 * (PI * l / b - (l / b).ln() + (l / (2.0 * PI * eps)).ln())
        }
    })
}

/// Crossover temperature `T_c = (ε N_A)^{-z}` and saturation value
/// `S_max = 2 N_A ln 2`.
pub fn regime_scales(spec: &LatticeSpec, n_a: usize) -> (f64, f64) {
    let t_c = (spec.spacing * n_a as f64).powi(-(spec.z_exponent as i32));
    (t_c, max_entropy(n_a))
}

/// Cartesian grid of sweep points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepGrid {
    pub zs: Vec<u32>,
    pub betas: Vec<Beta>,
    pub nas: Vec<usize>,
}

/// Evaluates the entropy of a contiguous block for every grid point on
/// `jobs` worker threads. Row order does not depend on `jobs`.
pub fn sweep_entropy(
    grid: &SweepGrid,
    template: &LatticeSpec,
    jobs: usize,
) -> Result<SweepTable, ThermalError> {
    if jobs == 0 {
        return Err(ThermalError::NoWorkers);
    }
    let mut zs = grid.zs.clone();
    zs.sort_unstable();
    zs.dedup();
    let mut betas = grid.betas.clone();
    betas.sort_by(|a, b| a.value().total_cmp(&b.value()));
    betas.dedup();
    let mut nas = grid.nas.clone();
    nas.sort_unstable();
    nas.dedup();

    let mut points: Vec<(u32, Beta, usize)> =
        Vec::with_capacity(zs.len() * betas.len() * nas.len());
    for &z in &zs {
        for &b in &betas {
            points.extend(nas.iter().map(|&na| (z, b, na)));
        }
    }

    let evaluate = |&(z, beta, na): &(u32, Beta, usize)| -> Result<SweepRow, ThermalError> {
        let spec = LatticeSpec {
            z_exponent: z,
            ..*template
        };
        spec.validate()?;
        let point = entropy_of(&spec, beta, &contiguous(na))?;
        Ok(SweepRow {
            z,
            beta,
            n: spec.n_sites,
            na,
            epsilon: spec.spacing,
            mass: spec.mass,
            entropy: point.entropy,
        })
    };

    let rows = if jobs == 1 {
        points.iter().map(evaluate).collect::<Result<Vec<_>, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ThermalError::ThreadPool(e.to_string()))?;
        pool.install(|| {
            points
                .par_iter()
                .map(evaluate)
                .collect::<Result<Vec<_>, _>>()
        })?
    };
    Ok(SweepTable::from_rows(rows)?)
}

/// Linear least-squares fit `S ≈ Σ_i coefficients[i] · basis[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub basis: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// `sqrt(RSS / rows)`.
    pub residual_rms: f64,
    pub mean_value: f64,
    pub rows: usize,
    /// Range of `x = l β^{-1/z}` covered by the fitted rows.
    pub x_range: (f64, f64),
}

impl FitResult {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.basis
            .iter()
            .position(|b| b == name)
            .map(|i| self.coefficients[i])
    }

    /// `coefficient / std_error` for a named basis function.
    pub fn t_statistic(&self, name: &str) -> Option<f64> {
        let i = self.basis.iter().position(|b| b == name)?;
        Some(self.coefficients[i] / self.std_errors[i])
    }
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((b, c), e) in self
            .basis
            .iter()
            .zip(&self.coefficients)
            .zip(&self.std_errors)
        {
            writeln!(f, "{b:>10} = {c:.10e} ± {e:.3e}")?;
        }
        write!(
            f,
            "rows = {}, x in [{:.4}, {:.4}], residual_rms = {:.3e}",
            self.rows, self.x_range.0, self.x_range.1, self.residual_rms
        )
    }
}

/// Solves the normal equations for `design · c ≈ target`.
pub fn least_squares(
    basis: Vec<String>,
    design: &DMatrix<f64>,
    target: &DVector<f64>,
) -> Result<FitResult, FitError> {
    let (n, p) = design.shape();
    if n < p {
        return Err(FitError::InsufficientData { rows: n, needed: p });
    }
    let normal = design.transpose() * design;
    let eig = normal.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| {
            (lo.min(e.abs()), hi.max(e.abs()))
        });
    let condition = hi / lo;
    if !(condition <= MAX_CONDITION) {
        return Err(FitError::IllConditioned { condition });
    }
    let inverse = normal.try_inverse().ok_or(FitError::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let coefficients = &inverse * (design.transpose() * target);
    let residual = design * &coefficients - target;
    let rss = residual.norm_squared();
    let dof = n - p;
    let sigma2 = if dof > 0 { rss / dof as f64 } else { 0.0 };
    Ok(FitResult {
        basis,
        coefficients: coefficients.iter().copied().collect(),
        std_errors: (0..p).map(|i| (sigma2 * inverse[(i, i)]).sqrt()).collect(),
        residual_rms: (rss / n as f64).sqrt(),
        mean_value: target.mean(),
        rows: n,
        x_range: (0.0, 0.0),
    })
}

fn scaling_x(row: &SweepRow) -> f64 {
    row.na as f64 * row.epsilon * row.beta.value().powf(-1.0 / row.z as f64)
}

fn single_configuration(rows: &[&SweepRow]) -> Result<(), FitError> {
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let same = rows.iter().all(|r| {
        r.n == first.n && r.na == first.na && r.epsilon == first.epsilon && r.mass == first.mass
    });
    if same {
        Ok(())
    } else {
        Err(FitError::MixedConfigurations)
    }
}

fn x_range(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        })
}

/// Fits `S = S_∞ + f1 x + f2 x²` on finite-temperature rows of exponent `z`
/// with `x < 0.3`.
pub fn fit_low_temperature(table: &SweepTable, z: u32) -> Result<FitResult, FitError> {
    fit_low_temperature_degree(table, z, 2)
}

/// Polynomial generalization of [`fit_low_temperature`] with basis
/// `{1, x, ..., x^degree}`, named `S_inf, f1, f2, ...`.
pub fn fit_low_temperature_degree(
    table: &SweepTable,
    z: u32,
    degree: usize,
) -> Result<FitResult, FitError> {
    let rows: Vec<&SweepRow> = table
        .rows()
        .iter()
        .filter(|r| r.z == z && !r.beta.is_ground_state() && scaling_x(r) < LOW_T_MAX_X)
        .collect();
    let needed = MIN_FIT_ROWS.max(degree + 2);
    if rows.len() < needed {
        return Err(FitError::InsufficientData {
            rows: rows.len(),
            needed,
        });
    }
    single_configuration(&rows)?;
    let xs: Vec<f64> = rows.iter().map(|r| scaling_x(r)).collect();
    let design = DMatrix::from_fn(rows.len(), degree + 1, |i, j| xs[i].powi(j as i32));
    let target = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.entropy));
    let basis = std::iter::once("S_inf".to_string())
        .chain((1..=degree).map(|j| format!("f{j}")))
        .collect();
    let mut fit = least_squares(basis, &design, &target)?;
    fit.x_range = x_range(&xs);
    Ok(fit)
}

/// Fits `S = S_off + g x + h ln(ε^z/β)` on rows of exponent `z` with `x > 3`,
/// `S < 0.9 S_max` and a thermal length of at least three lattice spacings.
pub fn fit_high_temperature(table: &SweepTable, z: u32) -> Result<FitResult, FitError> {
    let rows: Vec<&SweepRow> = table
        .rows()
        .iter()
        .filter(|r| {
            r.z == z
                && !r.beta.is_ground_state()
                && scaling_x(r) > HIGH_T_MIN_X
                && r.entropy < SATURATION_FRACTION * max_entropy(r.na)
                && r.beta.value().powf(1.0 / z as f64) >= MIN_THERMAL_LENGTH * r.epsilon
        })
        .collect();
    if rows.is_empty() {
        return Err(FitError::RegimeUnreachable {
            reason: format!("no rows with x > {HIGH_T_MIN_X} below saturation for z = {z}"),
        });
    }
    single_configuration(&rows)?;
    let (b_min, b_max) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.beta.value()), hi.max(r.beta.value()))
    });
    let decades = (b_max / b_min).log10();
    if decades < MIN_BETA_DECADES {
        return Err(FitError::RegimeUnreachable {
            reason: format!("window spans only {decades:.2} decades of beta for z = {z}"),
        });
    }
    if rows.len() < MIN_FIT_ROWS {
        return Err(FitError::InsufficientData {
            rows: rows.len(),
            needed: MIN_FIT_ROWS,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| scaling_x(r)).collect();
    let design = DMatrix::from_fn(rows.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => xs[i],
        _ => (rows[i].epsilon.powi(z as i32) / rows[i].beta.value()).ln(),
    });
    let target = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.entropy));
    let basis = ["S_off", "g", "h"].map(String::from).to_vec();
    let mut fit = least_squares(basis, &design, &target)?;
    fit.x_range = x_range(&xs);
    Ok(fit)
}

/// Inverse temperatures with `x` evenly spaced on `[N_A/N, 0.3)`. The lower
/// end keeps the thermal length `β^{1/z}` inside the ring.
pub fn default_low_temperature_betas(spec: &LatticeSpec, n_a: usize, points: usize) -> Vec<Beta> {
    let l = n_a as f64 * spec.spacing;
    let x_min = n_a as f64 / spec.n_sites as f64;
    (0..points)
        .map(|i| x_min + (LOW_T_MAX_X - x_min) * i as f64 / points as f64)
        .filter(|&x| x > 0.0)
        .filter_map(|x| Beta::new((l / x).powi(spec.z_exponent as i32)).ok())
        .collect()
}

/// Log-spaced inverse temperatures strictly inside
/// `((3ε)^z, (l/3)^z)`. Empty when the interval is empty.
pub fn default_high_temperature_betas(spec: &LatticeSpec, n_a: usize, points: usize) -> Vec<Beta> {
    let z = spec.z_exponent as i32;
    let lo = (MIN_THERMAL_LENGTH * spec.spacing).powi(z).ln();
    let hi = (n_a as f64 * spec.spacing / HIGH_T_MIN_X).powi(z).ln();
    if hi <= lo {
        return Vec::new();
    }
    (1..=points)
        .filter_map(|i| Beta::new((lo + (hi - lo) * i as f64 / (points + 1) as f64).exp()).ok())
        .collect()
}
