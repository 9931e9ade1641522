//! Parallel Monte Carlo surveys of correlation quantities over random
//! states by rank: records, exceedance fractions, histograms and 2-D
//! density grids.
//!
//! Surveys are deterministic: sample i always draws from stream i of the
//! master seed, so the output is identical for any worker count.

use crate::correlations::{correlation_record_with, CorrelationRecord, OptimizerSettings};
use crate::randstate::{random_density_in, random_pure, Ensemble, SeededGenerator};
use rayon::prelude::*;
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("no records to aggregate")]
    EmptyInput,
    #[error("histograms need at least 2 bins")]
    InvalidBins,
    #[error("rank must be 1..=4, got {0}")]
    InvalidRank(u8),
    #[error("survey needs at least one sample")]
    NoSamples,
    #[error("{failed} of {total} samples failed optimization (budget is 0.01%)")]
    TooManyFailures { failed: usize, total: usize },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("records csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Survey parameters. `workers = 0` uses all available parallelism.
#[derive(Debug, Clone)]
pub struct SurveyConfig {
    pub rank: u8,
    pub n_samples: usize,
    pub master_seed: u64,
    pub workers: usize,
    pub ensemble: Ensemble,
    pub optimizer: OptimizerSettings,
}

impl SurveyConfig {
    pub fn new(rank: u8, n_samples: usize, master_seed: u64) -> Self {
        SurveyConfig {
            rank,
            n_samples,
            master_seed,
            workers: 0,
            ensemble: Ensemble::HaarSimplex,
            optimizer: OptimizerSettings::default(),
        }
    }

    /// One-line echo used as the CSV comment header.
    pub fn echo(&self) -> String {
        format!(
            "rank={} n={} seed={} ensemble={}",
            self.rank, self.n_samples, self.master_seed, self.ensemble
        )
    }
}

/// Survey output: records in sample order plus the dropped-sample count.
#[derive(Debug, Clone)]
pub struct Survey {
    pub records: Vec<CorrelationRecord>,
    pub failed_samples: usize,
}

/// Runs the survey. Isolated optimizer failures drop the sample and are
/// counted; the survey fails if they reach 0.01% of the total.
pub fn run_survey(config: &SurveyConfig) -> Result<Survey, SurveyError> {
    if !(1..=4).contains(&config.rank) {
        return Err(SurveyError::InvalidRank(config.rank));
    }
    if config.n_samples == 0 {
        return Err(SurveyError::NoSamples);
    }

    let compute = |i: usize| -> Option<CorrelationRecord> {
        let mut gen = SeededGenerator::new(config.master_seed, i as u64);
        let state = if config.rank == 1 {
            random_pure(&mut gen)
        } else {
            random_density_in(config.ensemble, config.rank, &mut gen)
        };
        correlation_record_with(&state, &config.optimizer).ok()
    };

    let results: Vec<Option<CorrelationRecord>> = if config.workers == 1 {
        (0..config.n_samples).map(compute).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| SurveyError::Pool(e.to_string()))?;
        pool.install(|| (0..config.n_samples).into_par_iter().map(compute).collect())
    };

    let failed = results.iter().filter(|r| r.is_none()).count();
    if failed as f64 >= 1e-4 * config.n_samples as f64 {
        return Err(SurveyError::TooManyFailures {
            failed,
            total: config.n_samples,
        });
    }
    Ok(Survey {
        records: results.into_iter().flatten().collect(),
        failed_samples: failed,
    })
}

/// Binomial point estimate with its one-sigma standard error.
#[derive(Debug, Clone, Copy)]
pub struct FractionEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Fraction of records with delta_{A:B} > J.
pub fn fraction_delta_exceeds_j(
    records: &[CorrelationRecord],
) -> Result<FractionEstimate, SurveyError> {
    if records.is_empty() {
        return Err(SurveyError::EmptyInput);
    }
    let n = records.len() as f64;
    let hits = records
        .iter()
        .filter(|r| r.delta_ab > r.classical_j)
        .count() as f64;
    let p = hits / n;
    Ok(FractionEstimate {
        value: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
    })
}

/// Quantity selected out of a record for aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Delta,
    J,
    E,
    I,
    Purity,
}

impl Quantity {
    pub fn of(&self, r: &CorrelationRecord) -> f64 {
        match self {
            Quantity::Delta => r.delta_ab,
            Quantity::J => r.classical_j,
            Quantity::E => r.concurrence,
            Quantity::I => r.mutual_i,
            Quantity::Purity => r.purity,
        }
    }

    /// Histogram support of the quantity.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Quantity::I => (0.0, 2.0),
            _ => (0.0, 1.0),
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quantity::Delta => write!(f, "delta"),
            Quantity::J => write!(f, "J"),
            Quantity::E => write!(f, "E"),
            Quantity::I => write!(f, "I"),
            Quantity::Purity => write!(f, "purity"),
        }
    }
}

/// Normalized probability density over uniform bins.
#[derive(Debug, Clone)]
pub struct Histogram1D {
    pub quantity: Quantity,
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
}

impl Histogram1D {
    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w)
    }

    /// Density integrated over a value interval.
    pub fn mass_below(&self, x: f64) -> f64 {
        let w = self.bin_width();
        let mut acc = 0.0;
        for (i, d) in self.density.iter().enumerate() {
            let (a, b) = (self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w);
            if b <= x {
                acc += d * w;
            } else if a < x {
                acc += d * (x - a);
            }
        }
        acc
    }
}

/// Histograms a quantity over uniform bins spanning its range; out-of-range
/// roundoff is clamped into the edge bins.
pub fn histogram(
    records: &[CorrelationRecord],
    quantity: Quantity,
    n_bins: usize,
) -> Result<Histogram1D, SurveyError> {
    if records.is_empty() {
        return Err(SurveyError::EmptyInput);
    }
    if n_bins < 2 {
        return Err(SurveyError::InvalidBins);
    }
    let (lo, hi) = quantity.range();
    let w = (hi - lo) / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for r in records {
        let v = quantity.of(r);
        let idx = (((v - lo) / w).floor() as isize).clamp(0, n_bins as isize - 1) as usize;
        counts[idx] += 1;
    }
    let n = records.len() as f64;
    let density: Vec<f64> = counts.iter().map(|&k| k as f64 / (n * w)).collect();
    Ok(Histogram1D {
        quantity,
        lo,
        hi,
        counts,
        density,
    })
}

/// Scatter quantity for the y axis of a 2-D grid; x is always J.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YQuantity {
    Delta,
    E,
}

impl YQuantity {
    fn as_quantity(self) -> Quantity {
        match self {
            YQuantity::Delta => Quantity::Delta,
            YQuantity::E => Quantity::E,
        }
    }
}

impl std::fmt::Display for YQuantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            YQuantity::Delta => write!(f, "delta"),
            YQuantity::E => write!(f, "E"),
        }
    }
}

/// 2-D occupancy counts over (J, y).
#[derive(Debug, Clone)]
pub struct DensityGrid2D {
    pub y_quantity: YQuantity,
    pub bins: usize,
    /// Row-major over (x_bin, y_bin).
    pub counts: Vec<u64>,
}

impl DensityGrid2D {
    pub fn count(&self, ix: usize, iy: usize) -> u64 {
        self.counts[ix * self.bins + iy]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn density_grid(
    records: &[CorrelationRecord],
    y_quantity: YQuantity,
    bins: usize,
) -> Result<DensityGrid2D, SurveyError> {
    if records.is_empty() {
        return Err(SurveyError::EmptyInput);
    }
    if bins < 2 {
        return Err(SurveyError::InvalidBins);
    }
    let yq = y_quantity.as_quantity();
    let w = 1.0 / bins as f64;
    let mut counts = vec![0u64; bins * bins];
    for r in records {
        let x = r.classical_j;
        let y = yq.of(r);
        let ix = ((x / w).floor() as isize).clamp(0, bins as isize - 1) as usize;
        let iy = ((y / w).floor() as isize).clamp(0, bins as isize - 1) as usize;
        counts[ix * bins + iy] += 1;
    }
    Ok(DensityGrid2D {
        y_quantity,
        bins,
        counts,
    })
}

// ---------------------------------------------------------------------------
// CSV

/// Writes records with a `# comment` echo line and the header
/// `delta_ab,delta_ba,J,I,E,purity,rank`.
pub fn write_records_csv<W: Write>(
    mut w: W,
    records: &[CorrelationRecord],
    comment: &str,
) -> Result<(), SurveyError> {
    writeln!(w, "# {comment}")?;
    let mut wtr = csv::Writer::from_writer(w);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a records file, skipping `#` comment lines. Never panics on
/// malformed input.
pub fn read_records_csv<R: Read>(r: R) -> Result<Vec<CorrelationRecord>, SurveyError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut out = Vec::new();
    for rec in rdr.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn write_histogram_csv<W: Write>(
    mut w: W,
    hist: &Histogram1D,
    comment: &str,
) -> Result<(), SurveyError> {
    writeln!(w, "# {comment}")?;
    writeln!(w, "bin_lo,bin_hi,density")?;
    for i in 0..hist.counts.len() {
        let (a, b) = hist.bin_edges(i);
        writeln!(w, "{},{},{}", a, b, hist.density[i])?;
    }
    Ok(())
}

/// Writes occupied grid cells as `x_lo,x_hi,y_lo,y_hi,count`.
pub fn write_grid_csv<W: Write>(
    mut w: W,
    grid: &DensityGrid2D,
    comment: &str,
) -> Result<(), SurveyError> {
    writeln!(w, "# {comment}")?;
    writeln!(w, "x_lo,x_hi,y_lo,y_hi,count")?;
    let wdt = 1.0 / grid.bins as f64;
    for ix in 0..grid.bins {
        for iy in 0..grid.bins {
            let k = grid.count(ix, iy);
            if k == 0 {
                continue;
            }
            writeln!(
                w,
                "{},{},{},{},{}",
                ix as f64 * wdt,
                (ix + 1) as f64 * wdt,
                iy as f64 * wdt,
                (iy + 1) as f64 * wdt,
                k
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_survey(workers: usize) -> Survey {
        let mut cfg = SurveyConfig::new(2, 120, 4242);
        cfg.workers = workers;
        run_survey(&cfg).unwrap()
    }

    #[test]
    fn survey_is_worker_count_independent() {
        let a = small_survey(1);
        let b = small_survey(2);
        assert_eq!(a.records.len(), b.records.len());
        for (x, y) in a.records.iter().zip(b.records.iter()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn survey_records_satisfy_invariants() {
        let s = small_survey(0);
        assert_eq!(s.failed_samples, 0);
        for r in &s.records {
            assert!(r.delta_ab >= 0.0 && r.classical_j >= 0.0 && r.mutual_i >= 0.0);
            assert!((r.mutual_i - (r.delta_ab + r.classical_j)).abs() < 1e-6);
            assert_eq!(r.rank, 2);
        }
    }

    #[test]
    fn rank1_records_have_delta_equal_j() {
        let mut cfg = SurveyConfig::new(1, 40, 99);
        cfg.workers = 2;
        let s = run_survey(&cfg).unwrap();
        for r in &s.records {
            assert!((r.delta_ab - r.classical_j).abs() < 1e-6);
        }
    }

    #[test]
    fn fraction_and_errors() {
        let s = small_survey(0);
        let f = fraction_delta_exceeds_j(&s.records).unwrap();
        assert!(f.value >= 0.0 && f.value <= 1.0);
        assert!(f.std_error > 0.0);
        assert!(matches!(
            fraction_delta_exceeds_j(&[]),
            Err(SurveyError::EmptyInput)
        ));
    }

    #[test]
    fn histogram_normalizes() {
        let s = small_survey(0);
        for q in [Quantity::Delta, Quantity::J, Quantity::E, Quantity::I, Quantity::Purity] {
            let h = histogram(&s.records, q, 50).unwrap();
            let mass: f64 = h.density.iter().map(|d| d * h.bin_width()).sum();
            assert!((mass - 1.0).abs() < 1e-9, "{q}: mass {mass}");
        }
        assert!(matches!(
            histogram(&s.records, Quantity::Delta, 1),
            Err(SurveyError::InvalidBins)
        ));
    }

    #[test]
    fn grid_total_matches_sample_count() {
        let s = small_survey(0);
        let g = density_grid(&s.records, YQuantity::Delta, 40).unwrap();
        assert_eq!(g.total() as usize, s.records.len());
    }

    #[test]
    fn records_csv_round_trip() {
        let s = small_survey(0);
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &s.records, "rank=2 n=120 seed=4242").unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# rank=2"));
        assert!(text.contains("delta_ab,delta_ba,J,I,E,purity,rank"));
        let back = read_records_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), s.records.len());
        for (x, y) in back.iter().zip(s.records.iter()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn malformed_csv_is_an_error_not_a_panic() {
        for text in ["", "a,b\n1,2\n", "delta_ab\nnot_a_number\n", "\u{0}"] {
            let _ = read_records_csv(text.as_bytes());
        }
    }
}
