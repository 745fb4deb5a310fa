//! Batch experiments over random instances, reported as CSV tables.
//!
//! Each instance draws from its own rng stream derived from the base seed, so
//! reports are identical for any thread count.

use std::fmt;
use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::evaluators::{
    all_correlations, correlation_clifford, correlation_diagonal, correlation_statevector, output_distribution,
    DiagonalMode,
};
use crate::keygen::{random_2local, random_program, AnglePolicy};
use crate::model::IqpProgram;
use crate::{par, rng};

/// Largest `n` accepted by the sweep experiments.
pub const EXPERIMENT_CAP: usize = 12;
/// Largest `n` accepted by [`exp_parseval`].
pub const PARSEVAL_CAP: usize = 10;

/// Tolerance when matching a value to a quantized level.
const LEVEL_TOLERANCE: f64 = 1e-9;

/// A table of results plus the parameters that produced it.
///
/// Cells are kept as strings so a report survives a CSV round trip exactly.
/// `wall_clock` is informational and ignored by equality.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub id: String,
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub wall_clock: Duration,
}

impl PartialEq for ExperimentReport {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.params == other.params && self.columns == other.columns && self.rows == other.rows
    }
}

impl ExperimentReport {
    fn new(id: &str, params: Vec<(&str, String)>, columns: &[&str]) -> Self {
        Self {
            id: id.to_string(),
            params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            wall_clock: Duration::ZERO,
        }
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Argument(format!("report {} has no column {name:?}", self.id)))
    }

    /// Cells of one column, in row order.
    pub fn column(&self, name: &str) -> Result<Vec<&str>> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[j].as_str()).collect())
    }

    /// A column parsed as floats. Empty cells become NaN.
    pub fn f64_column(&self, name: &str) -> Result<Vec<f64>> {
        self.column(name)?
            .into_iter()
            .map(|c| {
                if c.is_empty() {
                    Ok(f64::NAN)
                } else {
                    c.parse::<f64>().map_err(|e| Error::Argument(format!("cell {c:?} in {name}: {e}")))
                }
            })
            .collect()
    }

    /// CSV with a `#`-prefixed header carrying the id, parameters and wall clock.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# experiment = {}\n", self.id);
        for (k, v) in &self.params {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&format!("# wall_clock_s = {:.3}\n", self.wall_clock.as_secs_f64()));
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            writer.write_record(row).map_err(csv_error)?;
        }
        let body = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| Error::Io(e.to_string()))?);
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut id = None;
        let mut params = Vec::new();
        let mut wall_clock = Duration::ZERO;
        let mut body_start = 0;
        for (lineno, line) in text.lines().enumerate() {
            let Some(rest) = line.strip_prefix('#') else { break };
            body_start += line.len() + 1;
            let (k, v) = rest
                .split_once(" = ")
                .ok_or_else(|| Error::Parse { line: lineno + 1, msg: format!("malformed header {line:?}") })?;
            let (k, v) = (k.trim(), v.to_string());
            match k {
                "experiment" => id = Some(v),
                "wall_clock_s" => {
                    let secs: f64 = v.parse().map_err(|_| Error::Parse { line: lineno + 1, msg: "bad wall clock".into() })?;
                    wall_clock = Duration::from_secs_f64(secs.max(0.0));
                }
                _ => params.push((k.to_string(), v)),
            }
        }
        let id = id.ok_or_else(|| Error::Parse { line: 1, msg: "missing experiment id".into() })?;
        let mut reader = csv::Reader::from_reader(&text.as_bytes()[body_start.min(text.len())..]);
        let columns = reader.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()).map_err(csv_error))
            .collect::<Result<Vec<Vec<String>>>>()?;
        Ok(Self { id, params, columns, rows, wall_clock })
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(format!("csv: {e}"))
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_csv() {
            Ok(s) => f.write_str(&s),
            Err(_) => Err(fmt::Error),
        }
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.12}")
}

fn check_n(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Argument("qubit count must be positive".into()));
    }
    if n > cap {
        return Err(Error::Capacity { what: "experiment qubit count", got: n, cap });
    }
    Ok(())
}

fn check_range(range: &RangeInclusive<usize>, cap: usize) -> Result<()> {
    if range.is_empty() {
        return Err(Error::Argument(format!("empty qubit range {}..={}", range.start(), range.end())));
    }
    check_n(*range.start(), cap)?;
    check_n(*range.end(), cap)
}

/// Stream id for instance `i` at size `n`, unique across a sweep.
fn stream_id(n: usize, i: usize) -> u64 {
    ((n as u64) << 40) | i as u64
}

/// Nearest element of `{0} U {2^(-g/2) : 0 <= g <= n}`: returns `(g, level)`
/// with `g = None` for the zero level.
pub fn nearest_level(abs_value: f64, n: usize) -> (Option<u32>, f64) {
    let mut best = (None, 0.0);
    let mut dist = abs_value.abs();
    for g in 0..=n as u32 {
        let level = 2f64.powf(-(g as f64) / 2.0);
        let d = (abs_value - level).abs();
        if d < dist {
            dist = d;
            best = (Some(g), level);
        }
    }
    best
}

/// Random program with `m = n` uniform nonzero rows at angle `pi/8`, and a
/// uniform nonzero secret.
fn clifford_instance(n: usize, seed: u64, i: usize) -> Result<(IqpProgram, BitVector)> {
    let mut r = rng::stream(seed, stream_id(n, i));
    let program = random_program(n, n, AnglePolicy::AllPiOver8, &mut r)?;
    let s = BitVector::random_nonzero(n, &mut r);
    Ok((program, s))
}

const CLIFFORD_ENSEMBLE: &str = "rows iid uniform nonzero, m = n, theta = pi/8, s uniform nonzero";

/// Per-instance `|<Z_s>|` at `theta = pi/8` with the matched quantization
/// level. The value comes from the statevector backend, so the level match
/// is an independent check of the stabilizer backend's `g`.
pub fn exp_fig1b(count: usize, n: usize, seed: u64) -> Result<ExperimentReport> {
    check_n(n, EXPERIMENT_CAP)?;
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "fig1b",
        vec![
            ("n", n.to_string()),
            ("count", count.to_string()),
            ("seed", seed.to_string()),
            ("ensemble", CLIFFORD_ENSEMBLE.to_string()),
        ],
        &["instance", "secret", "abs_value", "g", "level", "residual", "clifford_g"],
    );
    let rows = par::map_indexed(count, |i| -> Result<Vec<String>> {
        let (program, s) = clifford_instance(n, seed, i)?;
        let value = correlation_statevector(&program, &s)?.value.abs();
        let (g, level) = nearest_level(value, n);
        let clifford = correlation_clifford(&program, &s)?;
        Ok(vec![
            i.to_string(),
            s.to_string(),
            fmt_f(value),
            g.map(|g| g.to_string()).unwrap_or_default(),
            fmt_f(level),
            format!("{:.3e}", (value - level).abs()),
            clifford.g.map(|g| g.to_string()).unwrap_or_default(),
        ])
    });
    report.rows = rows.into_iter().collect::<Result<_>>()?;
    report.wall_clock = start.elapsed();
    Ok(report)
}

/// Counts of each quantization level in a [`exp_fig1b`] report. Rows whose
/// residual exceeds the matching tolerance are counted under `unmatched`.
pub fn fig1b_histogram(report: &ExperimentReport) -> Result<ExperimentReport> {
    let n: usize = report
        .param("n")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Argument("fig1b report lacks parameter n".into()))?;
    let gs = report.column("g")?;
    let residuals = report.f64_column("residual")?;
    let mut counts = vec![0u64; n + 2];
    let mut unmatched = 0u64;
    for (g, r) in gs.iter().zip(&residuals) {
        if r.is_nan() || *r >= LEVEL_TOLERANCE {
            unmatched += 1;
        } else if g.is_empty() {
            counts[n + 1] += 1;
        } else {
            let g: usize = g.parse().map_err(|_| Error::Argument(format!("bad g cell {g:?}")))?;
            counts[g] += 1;
        }
    }
    let mut out = ExperimentReport::new("fig1b-histogram", report.params.iter().map(|(k, v)| (k.as_str(), v.clone())).collect(), &["g", "level", "count"]);
    for (g, c) in counts.iter().enumerate().take(n + 1) {
        out.rows.push(vec![g.to_string(), fmt_f(2f64.powf(-(g as f64) / 2.0)), c.to_string()]);
    }
    out.rows.push(vec![String::new(), fmt_f(0.0), counts[n + 1].to_string()]);
    out.rows.push(vec!["unmatched".into(), String::new(), unmatched.to_string()]);
    out.wall_clock = report.wall_clock;
    Ok(out)
}

/// Fraction of instances at each level `1, 2^(-1/2), ..., 2^(-n/2), 0`, one
/// row per `(n, level)`.
pub fn exp_fig1a(n_range: RangeInclusive<usize>, count_per_n: usize, seed: u64) -> Result<ExperimentReport> {
    check_range(&n_range, EXPERIMENT_CAP)?;
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "fig1a",
        vec![
            ("n_min", n_range.start().to_string()),
            ("n_max", n_range.end().to_string()),
            ("count_per_n", count_per_n.to_string()),
            ("seed", seed.to_string()),
            ("ensemble", CLIFFORD_ENSEMBLE.to_string()),
        ],
        &["n", "g", "level", "count", "fraction"],
    );
    if count_per_n == 0 {
        report.wall_clock = start.elapsed();
        return Ok(report);
    }
    for n in n_range {
        let gs = par::map_indexed(count_per_n, |i| -> Result<Option<u32>> {
            let (program, s) = clifford_instance(n, seed, i)?;
            Ok(correlation_clifford(&program, &s)?.g)
        });
        let mut counts = vec![0u64; n + 2];
        for g in gs {
            match g? {
                Some(g) => counts[g as usize] += 1,
                None => counts[n + 1] += 1,
            }
        }
        for (idx, c) in counts.iter().enumerate() {
            let (g_cell, level) = if idx <= n {
                (idx.to_string(), 2f64.powf(-(idx as f64) / 2.0))
            } else {
                (String::new(), 0.0)
            };
            report.rows.push(vec![
                n.to_string(),
                g_cell,
                fmt_f(level),
                c.to_string(),
                fmt_f(*c as f64 / count_per_n as f64),
            ]);
        }
    }
    report.wall_clock = start.elapsed();
    Ok(report)
}

/// Thresholds `a = k / 2^n` for the tail table, `k` a power of two up to `2^n`.
fn tail_grid(n: usize) -> Vec<f64> {
    let scale = 2f64.powi(n as i32);
    (0..=n.min(8)).map(|e| 2f64.powi(e as i32) / scale).collect()
}

/// Mean of `<Z_s>^2` over random 2-local circuits and uniform secrets
/// (including `s = 0`), against `3 / 2^n`, plus tail probabilities with the
/// Markov bound `3 / (a 2^n)`.
pub fn exp_anticoncentration(
    n_range: RangeInclusive<usize>,
    circuits: usize,
    secrets_per_circuit: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    check_range(&n_range, EXPERIMENT_CAP)?;
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "anticoncentration",
        vec![
            ("n_min", n_range.start().to_string()),
            ("n_max", n_range.end().to_string()),
            ("circuits", circuits.to_string()),
            ("secrets_per_circuit", secrets_per_circuit.to_string()),
            ("seed", seed.to_string()),
            ("ensemble", "random 2-local, coefficients uniform in 0..8 times pi/8; s uniform over all strings".into()),
        ],
        &["n", "kind", "a", "value", "stderr", "bound"],
    );
    for n in n_range {
        let per_circuit = par::map_indexed(circuits, |c| -> Result<Vec<f64>> {
            let mut r = rng::stream(seed, stream_id(n, c));
            let program = random_2local(n, &mut r)?;
            let z = all_correlations(&program)?;
            Ok((0..secrets_per_circuit)
                .map(|_| {
                    let s: u64 = r.random_range(0..1u64 << n);
                    z[s as usize] * z[s as usize]
                })
                .collect())
        });
        let mut z2 = Vec::with_capacity(circuits * secrets_per_circuit);
        for v in per_circuit {
            z2.extend(v?);
        }
        let draws = z2.len();
        let scale = 2f64.powi(n as i32);
        let (mean, stderr) = mean_and_stderr(&z2);
        report.rows.push(vec![n.to_string(), "mean".into(), String::new(), fmt_f(mean), fmt_f(stderr), fmt_f(3.0 / scale)]);
        for a in tail_grid(n) {
            let hits = z2.iter().filter(|&&v| v >= a).count();
            let p = if draws == 0 { f64::NAN } else { hits as f64 / draws as f64 };
            let se = if draws == 0 { f64::NAN } else { (p * (1.0 - p) / draws as f64).sqrt() };
            report.rows.push(vec![
                n.to_string(),
                "tail".into(),
                fmt_f(a),
                fmt_f(p),
                fmt_f(se),
                fmt_f((3.0 / (a * scale)).min(1.0)),
            ]);
        }
    }
    report.wall_clock = start.elapsed();
    Ok(report)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Both sides of the collision identity for one program: `sum_x p(x)^2` from
/// the output distribution and `2^-n sum_s <Z_s>^2` from the diagonal
/// backend.
pub fn parseval_sides(program: &IqpProgram) -> Result<(f64, f64)> {
    check_n(program.n(), PARSEVAL_CAP)?;
    let n = program.n();
    let lhs = output_distribution(program)?.collision_probability();
    let terms = par::map_indexed(1usize << n, |s| -> Result<f64> {
        let v = correlation_diagonal(program, &BitVector::from_index(n, s as u64), DiagonalMode::Exact)?.value;
        Ok(v * v)
    });
    let mut sum = 0.0;
    for t in terms {
        sum += t?;
    }
    Ok((lhs, sum / 2f64.powi(n as i32)))
}

/// Collision identity on `instances` random programs with `2n` rows and
/// angles `k pi/8`, `k` uniform in `0..8`.
pub fn exp_parseval(n: usize, instances: usize, seed: u64) -> Result<ExperimentReport> {
    check_n(n, PARSEVAL_CAP)?;
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "parseval",
        vec![
            ("n", n.to_string()),
            ("instances", instances.to_string()),
            ("seed", seed.to_string()),
            ("ensemble", "rows iid uniform nonzero, m = 2n, theta = k pi/8 with k uniform in 0..8".into()),
        ],
        &["instance", "collision", "correlation_side", "abs_difference"],
    );
    for i in 0..instances {
        let mut r = rng::stream(seed, stream_id(n, i));
        let program = random_program(n, 2 * n, AnglePolicy::UniformPiOver8Multiples, &mut r)?;
        let (lhs, rhs) = parseval_sides(&program)?;
        report.rows.push(vec![i.to_string(), fmt_f(lhs), fmt_f(rhs), format!("{:.3e}", (lhs - rhs).abs())]);
    }
    report.wall_clock = start.elapsed();
    Ok(report)
}
