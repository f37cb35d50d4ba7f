//! Sweep tables and their CSV / JSON encodings.
//!
//! Both encodings use the columns `z,beta,n,na,epsilon,mass,entropy`. Reals
//! carry 12 significant digits and an infinite `beta` is written `inf`.

use std::cmp::Ordering;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::Beta;

pub const CSV_HEADER: &str = "z,beta,n,na,epsilon,mass,entropy";

const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("duplicate row for z={z}, beta={beta}, n={n}, na={na}")]
    DuplicateRow {
        z: u32,
        beta: f64,
        n: usize,
        na: usize,
    },
    #[error("invalid row {index}: {reason}")]
    InvalidRow { index: usize, reason: String },
    #[error("unknown table format '{0}' (expected csv or json)")]
    UnknownFormat(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub z: u32,
    pub beta: Beta,
    pub n: usize,
    pub na: usize,
    pub epsilon: f64,
    pub mass: f64,
    pub entropy: f64,
}

impl SweepRow {
    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.z
            .cmp(&other.z)
            .then(self.beta.value().total_cmp(&other.beta.value()))
            .then(self.na.cmp(&other.na))
            .then(self.n.cmp(&other.n))
            .then(self.epsilon.total_cmp(&other.epsilon))
            .then(self.mass.total_cmp(&other.mass))
    }

    fn same_parameters(&self, other: &Self) -> bool {
        self.sort_key_cmp(other) == Ordering::Equal
    }
}

/// Rows sorted by `(z, β, N_A)` with `β = ∞` last; parameter tuples are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn from_rows(mut rows: Vec<SweepRow>) -> Result<Self, TableError> {
        for (index, r) in rows.iter().enumerate() {
            if !(r.entropy.is_finite() && r.entropy >= 0.0) {
                return Err(TableError::InvalidRow {
                    index,
                    reason: format!("entropy {} is not a non-negative number", r.entropy),
                });
            }
        }
        rows.sort_by(SweepRow::sort_key_cmp);
        if let Some(w) = rows.windows(2).find(|w| w[0].same_parameters(&w[1])) {
            let r = w[0];
            return Err(TableError::DuplicateRow {
                z: r.z,
                beta: r.beta.value(),
                n: r.n,
                na: r.na,
            });
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(TableError::UnknownFormat(other.to_string())),
        }
    }
}

/// `%.12g`-style formatting with `inf` / `-inf` / `nan` spelled out.
pub fn format_significant(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    // The rounded value prints in at most 12 digits without an exponent.
    let rounded: f64 = sci.parse().expect("valid float");
    format!("{rounded}")
}

fn round_significant(v: f64) -> f64 {
    if v.is_finite() {
        format_significant(v)
            .parse()
            .expect("formatted float parses")
    } else {
        v
    }
}

pub fn emit_table(table: &SweepTable, format: TableFormat) -> Result<Vec<u8>, TableError> {
    match format {
        TableFormat::Csv => Ok(emit_csv(table).into_bytes()),
        TableFormat::Json => {
            let rows: Vec<JsonRow> = table.rows.iter().map(JsonRow::from).collect();
            let mut out = serde_json::to_vec_pretty(&rows)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn emit_csv(table: &SweepTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.z,
            format_significant(r.beta.value()),
            r.n,
            r.na,
            format_significant(r.epsilon),
            format_significant(r.mass),
            format_significant(r.entropy),
        ));
    }
    out
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    z: u32,
    beta: f64,
    n: usize,
    na: usize,
    epsilon: f64,
    mass: f64,
    entropy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonBeta {
    Finite(f64),
    Text(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonRow {
    z: u32,
    beta: JsonBeta,
    n: usize,
    na: usize,
    epsilon: f64,
    mass: f64,
    entropy: f64,
}

impl From<&SweepRow> for JsonRow {
    fn from(r: &SweepRow) -> Self {
        let beta = if r.beta.is_ground_state() {
            JsonBeta::Text("inf".into())
        } else {
            JsonBeta::Finite(round_significant(r.beta.value()))
        };
        Self {
            z: r.z,
            beta,
            n: r.n,
            na: r.na,
            epsilon: round_significant(r.epsilon),
            mass: round_significant(r.mass),
            entropy: round_significant(r.entropy),
        }
    }
}

fn make_row(
    index: usize,
    (z, beta, n, na, epsilon, mass, entropy): (u32, f64, usize, usize, f64, f64, f64),
) -> Result<SweepRow, TableError> {
    let invalid = |reason: String| TableError::InvalidRow { index, reason };
    let beta = Beta::new(beta).map_err(|e| invalid(e.to_string()))?;
    if z < 1 || n < 2 || na < 1 || na > n {
        return Err(invalid(format!("inconsistent sizes z={z}, n={n}, na={na}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) || !(mass >= 0.0 && mass.is_finite()) {
        return Err(invalid(format!("bad epsilon {epsilon} or mass {mass}")));
    }
    Ok(SweepRow {
        z,
        beta,
        n,
        na,
        epsilon,
        mass,
        entropy,
    })
}

pub fn parse_table(bytes: &[u8], format: TableFormat) -> Result<SweepTable, TableError> {
    let rows = match format {
        TableFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_reader(bytes);
            let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
            if header != CSV_HEADER {
                return Err(TableError::InvalidRow {
                    index: 0,
                    reason: format!("expected header '{CSV_HEADER}', found '{header}'"),
                });
            }
            reader
                .deserialize::<CsvRow>()
                .enumerate()
                .map(|(i, r)| {
                    let r = r?;
                    make_row(i, (r.z, r.beta, r.n, r.na, r.epsilon, r.mass, r.entropy))
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        TableFormat::Json => {
            let raw: Vec<JsonRow> = serde_json::from_slice(bytes)?;
            raw.into_iter()
                .enumerate()
                .map(|(i, r)| {
                    let beta = match r.beta {
                        JsonBeta::Finite(b) => b,
                        JsonBeta::Text(t) => {
                            t.parse::<f64>().map_err(|_| TableError::InvalidRow {
                                index: i,
                                reason: format!("beta '{t}' is not a number"),
                            })?
                        }
                    };
                    make_row(i, (r.z, beta, r.n, r.na, r.epsilon, r.mass, r.entropy))
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    SweepTable::from_rows(rows)
}
