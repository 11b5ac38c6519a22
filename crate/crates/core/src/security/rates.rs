use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{bfs_floor, fas_bits, fas_extrapolate, SecurityError};
use crate::decoders::Strategy;

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Decidability d′ = |μg − μi| / √((σg² + σi²)/2) with unbiased variances.
pub fn decidability(mated: &[f64], nonmated: &[f64]) -> Result<f64, SecurityError> {
    if mated.is_empty() {
        return Err(SecurityError::EmptyClass("mated"));
    }
    if nonmated.is_empty() {
        return Err(SecurityError::EmptyClass("non-mated"));
    }
    let (mg, vg) = mean_var(mated);
    let (mi, vi) = mean_var(nonmated);
    let pooled = 0.5 * (vg + vi);
    if !(pooled > 0.0) {
        return Err(SecurityError::ZeroVariance);
    }
    Ok((mg - mi).abs() / pooled.sqrt())
}

/// FNMR and FMR of dissimilarity scores, accepting when score ≤ threshold.
/// The first point is the threshold −∞; the rest are the distinct scores in
/// increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    pub thresholds: Vec<f64>,
    pub fnmr: Vec<f64>,
    pub fmr: Vec<f64>,
}

pub fn error_curve(mated: &[f64], nonmated: &[f64]) -> Result<ErrorCurve, SecurityError> {
    if mated.is_empty() {
        return Err(SecurityError::EmptyClass("mated"));
    }
    if nonmated.is_empty() {
        return Err(SecurityError::EmptyClass("non-mated"));
    }
    if mated.iter().chain(nonmated).any(|x| x.is_nan()) {
        return Err(SecurityError::Range("NaN score".into()));
    }
    let mut g = mated.to_vec();
    let mut i = nonmated.to_vec();
    g.sort_by(f64::total_cmp);
    i.sort_by(f64::total_cmp);
    let mut all: Vec<f64> = g.iter().chain(&i).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let (ng, ni) = (g.len() as f64, i.len() as f64);
    let mut curve = ErrorCurve {
        thresholds: vec![f64::NEG_INFINITY],
        fnmr: vec![1.0],
        fmr: vec![0.0],
    };
    let (mut pg, mut pi) = (0, 0);
    for t in all {
        while pg < g.len() && g[pg] <= t {
            pg += 1;
        }
        while pi < i.len() && i[pi] <= t {
            pi += 1;
        }
        curve.thresholds.push(t);
        curve.fnmr.push(1.0 - pg as f64 / ng);
        curve.fmr.push(pi as f64 / ni);
    }
    Ok(curve)
}

/// Equal error rate: the crossing of FNMR and FMR, interpolated linearly
/// between the two thresholds that bracket it.
pub fn eer(mated: &[f64], nonmated: &[f64]) -> Result<f64, SecurityError> {
    let c = error_curve(mated, nonmated)?;
    let i = (0..c.fnmr.len())
        .find(|&i| c.fnmr[i] <= c.fmr[i])
        .expect("FNMR reaches 0 at the largest score");
    if i == 0 {
        return Ok(c.fnmr[0]);
    }
    let a = c.fnmr[i - 1] - c.fmr[i - 1];
    let b = c.fmr[i] - c.fnmr[i];
    let lam = a / (a + b);
    Ok(c.fnmr[i - 1] + lam * (c.fnmr[i] - c.fnmr[i - 1]))
}

/// One vault retrieval trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub mated: bool,
    pub k: u16,
    pub strategy: Strategy,
    pub success: bool,
    pub elapsed_secs: f64,
    pub operation_units: f64,
}

/// Counts and rates for one (k, decoder) cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub k: u16,
    pub strategy: Strategy,
    pub mated_trials: usize,
    pub mated_successes: usize,
    pub nonmated_trials: usize,
    pub nonmated_successes: usize,
    pub fnmr: f64,
    pub fmr: f64,
    pub gmr: f64,
    /// Mean decode time of mated / non-mated trials, milliseconds.
    pub t_g_ms: f64,
    pub t_i_ms: f64,
    /// Mean work of a non-mated attempt in Lagrange units.
    pub nonmated_units: f64,
}

/// FNMR = mated failures / mated trials and FMR = non-mated successes /
/// non-mated trials, per (k, decoder), sorted by k then decoder.
pub fn vault_error_rates(outcomes: &[TrialOutcome]) -> Result<Vec<RateRow>, SecurityError> {
    #[derive(Default)]
    struct Acc {
        g: usize,
        gs: usize,
        i: usize,
        is: usize,
        tg: f64,
        ti: f64,
        ui: f64,
    }
    let mut cells: BTreeMap<(u16, Strategy), Acc> = BTreeMap::new();
    for o in outcomes {
        let a = cells.entry((o.k, o.strategy)).or_default();
        if o.mated {
            a.g += 1;
            a.gs += o.success as usize;
            a.tg += o.elapsed_secs;
        } else {
            a.i += 1;
            a.is += o.success as usize;
            a.ti += o.elapsed_secs;
            a.ui += o.operation_units;
        }
    }
    let mut rows = Vec::with_capacity(cells.len());
    for ((k, strategy), a) in cells {
        if a.g == 0 {
            return Err(SecurityError::EmptyClass("mated"));
        }
        if a.i == 0 {
            return Err(SecurityError::EmptyClass("non-mated"));
        }
        let fnmr = (a.g - a.gs) as f64 / a.g as f64;
        rows.push(RateRow {
            k,
            strategy,
            mated_trials: a.g,
            mated_successes: a.gs,
            nonmated_trials: a.i,
            nonmated_successes: a.is,
            fnmr,
            fmr: a.is as f64 / a.i as f64,
            gmr: 1.0 - fnmr,
            t_g_ms: 1e3 * a.tg / a.g as f64,
            t_i_ms: 1e3 * a.ti / a.i as f64,
            nonmated_units: a.ui / a.i as f64,
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MetricsOptions {
    /// Add an FMR column bounded by the rule of three (3/N when no false
    /// match was observed).
    pub rule_of_three: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsRow {
    #[serde(flatten)]
    pub rates: RateRow,
    pub fmr_rule_of_three: Option<f64>,
    /// Operation count l used for FAS.
    pub fas_operations: f64,
    pub fas_bits: Option<f64>,
    pub fas_interpolated: bool,
    pub bfs_bits: f64,
}

/// Per-(k, decoder) table of rates, timings and security estimates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub rows: Vec<MetricsRow>,
}

impl MetricsReport {
    /// FAS uses the mean non-mated GS work at the same k as l (an attacker
    /// would pick the strongest decoder), falling back to the row's own
    /// decoder when no GS trials exist; gaps are extrapolated per decoder.
    pub fn from_outcomes(outcomes: &[TrialOutcome], opts: MetricsOptions) -> Result<Self, SecurityError> {
        let rates = vault_error_rates(outcomes)?;
        let gs_units: BTreeMap<u16, f64> = rates
            .iter()
            .filter(|r| r.strategy == Strategy::GsList)
            .map(|r| (r.k, r.nonmated_units))
            .collect();
        let mut rows: Vec<MetricsRow> = rates
            .into_iter()
            .map(|r| {
                let l = gs_units.get(&r.k).copied().unwrap_or(r.nonmated_units).max(1.0);
                let bits = fas_bits(r.fmr, l).ok();
                MetricsRow {
                    fmr_rule_of_three: opts.rule_of_three.then(|| {
                        if r.nonmated_successes == 0 {
                            (3.0 / r.nonmated_trials as f64).min(1.0)
                        } else {
                            r.fmr
                        }
                    }),
                    fas_operations: l,
                    fas_bits: bits,
                    fas_interpolated: false,
                    bfs_bits: bfs_floor(r.k as u32),
                    rates: r,
                }
            })
            .collect();
        for strategy in Strategy::ALL {
            let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].rates.strategy == strategy).collect();
            let series: Vec<(u32, Option<f64>)> =
                idx.iter().map(|&i| (rows[i].rates.k as u32, rows[i].fas_bits)).collect();
            for (&i, e) in idx.iter().zip(fas_extrapolate(&series)) {
                rows[i].fas_bits = e.bits;
                rows[i].fas_interpolated = e.extrapolated;
            }
        }
        Ok(MetricsReport { rows })
    }

    pub const TSV_COLUMNS: &'static [&'static str] = &[
        "k", "decoder", "mated", "nonmated", "fnmr", "fmr", "gmr", "fmr_rule_of_three", "fas_bits",
        "fas_interpolated", "bfs_bits", "fas_operations", "t_g_ms", "t_i_ms",
    ];

    /// Tab-separated table with a header line. Timings are printed with
    /// three decimals; absent values are `NA`.
    pub fn to_tsv(&self) -> String {
        let mut out = Self::TSV_COLUMNS.join("\t");
        out.push('\n');
        let opt = |x: Option<f64>, p: usize| x.map_or("NA".to_string(), |v| format!("{v:.p$}"));
        for r in &self.rows {
            let q = &r.rates;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{:.0}\t{:.3}\t{:.3}\t{:.3}",
                q.k,
                q.strategy.label(),
                q.mated_trials,
                q.nonmated_trials,
                q.fnmr,
                q.fmr,
                q.gmr,
                opt(r.fmr_rule_of_three, 6),
                opt(r.fas_bits, 3),
                r.fas_interpolated as u8,
                r.bfs_bits,
                r.fas_operations,
                q.t_g_ms,
                q.t_i_ms,
            );
        }
        out
    }
}
