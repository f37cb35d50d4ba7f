//! Executes a [`RunConfig`] and writes its output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use lifshitz_core::cmera::{g_closed_form, metric_guu, AngleProfile, CmeraParams};
use lifshitz_core::lattice::{build_correlation_matrix, contiguous};
use lifshitz_core::oracle::{many_body_state, reduced_entropy};
use lifshitz_core::plot::{emit_plot, PlotMeta, Series, SeriesStyle};
use lifshitz_core::table::{emit_table, format_significant, parse_table, TableFormat};
use lifshitz_core::thermal::{
    default_high_temperature_betas, default_low_temperature_betas, fit_high_temperature,
    fit_low_temperature, sweep_entropy, SweepGrid,
};
use lifshitz_core::{entropy_of, FitResult, SweepRow, SweepTable};
use serde_json::json;

use crate::config::{Command, OutputFormat, Regime, RunConfig};
use crate::CliError;

/// Grid sizes for `fit` without `--input`.
pub const LOW_T_POINTS: usize = 36;
pub const HIGH_T_POINTS: usize = 40;

/// Oracle agreement thresholds.
pub const ORACLE_ENTROPY_TOLERANCE: f64 = 1e-8;
pub const ORACLE_CORRELATOR_TOLERANCE: f64 = 1e-10;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    match config.command {
        Command::Ee => ee(config),
        Command::Sweep => sweep(config),
        Command::Fit => fit(config),
        Command::Cmera => cmera(config),
        Command::OracleCheck => oracle_check(config),
    }
}

fn write_output(config: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "stdout".into(),
                    source,
                })
        }
    }
}

fn table_format(format: OutputFormat) -> TableFormat {
    match format {
        OutputFormat::Json => TableFormat::Json,
        _ => TableFormat::Csv,
    }
}

fn json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("JSON values always serialize");
    out.push(b'\n');
    out
}

fn ee(config: &RunConfig) -> Result<(), CliError> {
    let point = entropy_of(&config.spec, config.beta, &contiguous(config.n_a))?;
    let row = SweepRow {
        z: config.spec.z_exponent,
        beta: config.beta,
        n: config.spec.n_sites,
        na: config.n_a,
        epsilon: config.spec.spacing,
        mass: config.spec.mass,
        entropy: point.entropy,
    };
    let table = SweepTable::from_rows(vec![row])?;
    write_output(config, &emit_table(&table, table_format(config.format))?)
}

fn grid(config: &RunConfig) -> SweepGrid {
    SweepGrid {
        zs: config.zs.clone(),
        betas: config.betas.clone(),
        nas: config.nas.clone(),
    }
}

fn sweep(config: &RunConfig) -> Result<(), CliError> {
    let table = sweep_entropy(&grid(config), &config.spec, config.jobs)?;
    let bytes = match config.format {
        OutputFormat::Svg => sweep_plot(&table)?,
        f => emit_table(&table, table_format(f))?,
    };
    write_output(config, &bytes)
}

fn beta_label(row: &SweepRow) -> String {
    if row.beta.is_ground_state() {
        "β = inf".into()
    } else {
        format!("β = {}", format_significant(row.beta.value()))
    }
}

type Curve = (String, Vec<(f64, f64)>);

/// S against N_A per (z, β) when several block sizes were swept, otherwise
/// S against z per β with the saturation bound dashed.
fn sweep_plot(table: &SweepTable) -> Result<Vec<u8>, CliError> {
    let rows = table.rows();
    let mut nas: Vec<usize> = rows.iter().map(|r| r.na).collect();
    nas.sort_unstable();
    nas.dedup();
    let mut groups: BTreeMap<(u32, u64), Curve> = BTreeMap::new();
    let mut series = Vec::new();
    let meta = if nas.len() > 1 {
        for r in rows {
            let entry = groups
                .entry((r.z, r.beta.value().to_bits()))
                .or_insert_with(|| (format!("z = {}, {}", r.z, beta_label(r)), Vec::new()));
            entry.1.push((r.na as f64, r.entropy));
        }
        PlotMeta {
            title: "Entanglement entropy".into(),
            x_label: "N_A".into(),
            y_label: "S".into(),
            ..PlotMeta::default()
        }
    } else {
        for r in rows {
            let entry = groups
                .entry((0, r.beta.value().to_bits()))
                .or_insert_with(|| (beta_label(r), Vec::new()));
            entry.1.push((r.z as f64, r.entropy));
        }
        let (lo, hi) = rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.z as f64), hi.max(r.z as f64))
            });
        let bound = 2.0 * nas[0] as f64 * std::f64::consts::LN_2;
        series.push(Series::new(
            "2 N_A ln 2",
            vec![(lo, bound), (hi, bound)],
            SeriesStyle::Dashed,
        ));
        PlotMeta {
            title: format!("Entanglement entropy, N_A = {}", nas[0]),
            x_label: "z".into(),
            y_label: "S".into(),
            ..PlotMeta::default()
        }
    };
    let mut data: Vec<Series> = groups
        .into_values()
        .map(|(label, points)| Series::new(label, points, SeriesStyle::Line))
        .collect();
    data.append(&mut series);
    Ok(emit_plot(&data, &meta)?)
}

fn read_table(path: &Path) -> Result<SweepTable, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let format = if is_json {
        TableFormat::Json
    } else {
        TableFormat::Csv
    };
    Ok(parse_table(&bytes, format)?)
}

fn fit(config: &RunConfig) -> Result<(), CliError> {
    let (table, zs) = match &config.input {
        Some(path) => {
            let table = read_table(path)?;
            let mut zs: Vec<u32> = table.rows().iter().map(|r| r.z).collect();
            zs.sort_unstable();
            zs.dedup();
            if config.explicit_z {
                zs.retain(|z| config.zs.contains(z));
            }
            (table, zs)
        }
        None => {
            let mut rows = Vec::new();
            for &z in &config.zs {
                let spec = lifshitz_core::LatticeSpec {
                    z_exponent: z,
                    ..config.spec
                };
                let betas = match config.regime {
                    Regime::Low => default_low_temperature_betas(&spec, config.n_a, LOW_T_POINTS),
                    Regime::High => {
                        default_high_temperature_betas(&spec, config.n_a, HIGH_T_POINTS)
                    }
                };
                let grid = SweepGrid {
                    zs: vec![z],
                    betas,
                    nas: vec![config.n_a],
                };
                rows.extend(
                    sweep_entropy(&grid, &config.spec, config.jobs)?
                        .rows()
                        .iter()
                        .copied(),
                );
            }
            let mut zs = config.zs.clone();
            zs.sort_unstable();
            zs.dedup();
            (SweepTable::from_rows(rows)?, zs)
        }
    };
    let fits = zs
        .iter()
        .map(|&z| {
            let result = match config.regime {
                Regime::Low => fit_low_temperature(&table, z),
                Regime::High => fit_high_temperature(&table, z),
            };
            result.map(|f| (z, f))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let regime = match config.regime {
        Regime::Low => "low",
        Regime::High => "high",
    };
    let bytes = match config.format {
        OutputFormat::Csv => fit_csv(regime, &fits),
        OutputFormat::Json => json_bytes(&json!(fits
            .iter()
            .map(|(z, f)| json!({
                "z": z,
                "regime": regime,
                "basis": f.basis,
                "coefficients": f.coefficients,
                "std_errors": f.std_errors,
                "residual_rms": f.residual_rms,
                "mean_entropy": f.mean_value,
                "rows": f.rows,
                "x_range": [f.x_range.0, f.x_range.1],
            }))
            .collect::<Vec<_>>())),
        OutputFormat::Svg => fit_plot(regime, &fits)?,
    };
    write_output(config, &bytes)
}

pub const FIT_CSV_HEADER: &str =
    "z,regime,term,coefficient,std_error,residual_rms,mean_entropy,rows";

fn fit_csv(regime: &str, fits: &[(u32, FitResult)]) -> Vec<u8> {
    let mut out = format!("{FIT_CSV_HEADER}\n");
    for (z, f) in fits {
        for ((term, c), e) in f.basis.iter().zip(&f.coefficients).zip(&f.std_errors) {
            out.push_str(&format!(
                "{z},{regime},{term},{},{},{},{},{}\n",
                format_significant(*c),
                format_significant(*e),
                format_significant(f.residual_rms),
                format_significant(f.mean_value),
                f.rows
            ));
        }
    }
    out.into_bytes()
}

/// Fit coefficients against z, one series per basis term.
fn fit_plot(regime: &str, fits: &[(u32, FitResult)]) -> Result<Vec<u8>, CliError> {
    let mut terms: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for (z, f) in fits {
        for (term, c) in f.basis.iter().zip(&f.coefficients) {
            terms.entry(term).or_default().push((*z as f64, *c));
        }
    }
    let series: Vec<Series> = terms
        .into_iter()
        .map(|(term, points)| Series::new(term, points, SeriesStyle::Markers))
        .collect();
    let meta = PlotMeta {
        title: format!("{regime}-temperature fit coefficients"),
        x_label: "z".into(),
        y_label: "coefficient".into(),
        ..PlotMeta::default()
    };
    Ok(emit_plot(&series, &meta)?)
}

pub const CMERA_CSV_HEADER: &str = "u,k,phi,g,g_uu";

fn cmera(config: &RunConfig) -> Result<(), CliError> {
    let cutoff = 1.0 / config.spec.spacing;
    let (z, mass) = (config.spec.z_exponent, config.spec.mass);
    let params = CmeraParams::new(z, mass, cutoff, config.u_min)?;
    let profile = AngleProfile::closed_form(&params, config.points)?;
    let mut rows = Vec::with_capacity(config.points);
    for (&u, &phi) in profile.scales().iter().zip(profile.angles()) {
        let g = g_closed_form(u, z, mass, cutoff)?;
        let guu = metric_guu(u, z, mass, cutoff)?;
        rows.push([u, cutoff * u.exp(), phi, g, guu]);
    }
    let bytes = match config.format {
        OutputFormat::Csv => {
            let mut out = format!("{CMERA_CSV_HEADER}\n");
            for r in &rows {
                let cells: Vec<String> = r.iter().map(|v| format_significant(*v)).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out.into_bytes()
        }
        OutputFormat::Json => json_bytes(&json!(rows
            .iter()
            .map(|r| json!({"u": r[0], "k": r[1], "phi": r[2], "g": r[3], "g_uu": r[4]}))
            .collect::<Vec<_>>())),
        OutputFormat::Svg => {
            let points = rows.iter().map(|r| (r[0], r[4])).collect();
            let meta = PlotMeta {
                title: format!("Emergent metric, z = {z}, m = {}", format_significant(mass)),
                x_label: "u".into(),
                y_label: "g_uu".into(),
                ..PlotMeta::default()
            };
            emit_plot(&[Series::new("g_uu", points, SeriesStyle::Line)], &meta)?
        }
    };
    write_output(config, &bytes)
}

pub const ORACLE_CSV_HEADER: &str = "s_correlation,s_oracle,abs_diff,max_correlator_dev";

fn oracle_check(config: &RunConfig) -> Result<(), CliError> {
    let spec = &config.spec;
    let state = many_body_state(spec, config.beta)?;
    let sub = contiguous(config.n_a);
    let s_oracle = reduced_entropy(&state, &sub)?;
    let s_correlation = entropy_of(spec, config.beta, &sub)?.entropy;
    let all: Vec<usize> = (0..spec.n_sites).collect();
    let exact = state.correlation_matrix(&all)?;
    let formula = build_correlation_matrix(spec, config.beta, &all)?;
    let dim = 2 * spec.n_sites;
    let mut dev: f64 = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            dev = dev.max((exact[(r, c)] - formula.get(r, c)).norm());
        }
    }
    let diff = (s_correlation - s_oracle).abs();
    let bytes = match config.format {
        OutputFormat::Json => json_bytes(&json!({
            "s_correlation": s_correlation,
            "s_oracle": s_oracle,
            "abs_diff": diff,
            "max_correlator_dev": dev,
        })),
        _ => format!(
            "{ORACLE_CSV_HEADER}\n{},{},{},{}\n",
            format_significant(s_correlation),
            format_significant(s_oracle),
            format_significant(diff),
            format_significant(dev)
        )
        .into_bytes(),
    };
    write_output(config, &bytes)?;
    if diff > ORACLE_ENTROPY_TOLERANCE || dev > ORACLE_CORRELATOR_TOLERANCE {
        return Err(CliError::OracleMismatch {
            entropy: diff,
            correlator: dev,
        });
    }
    Ok(())
}
