//! Time-series post-processing: peak and revival detection, series comparison
//! and the linear revival-time fit.
//!
//! Collapse-and-revival signals oscillate at the Rabi frequency (≈ N·A at
//! resonance) under a slowly varying envelope. Every fast oscillation maximum
//! inside a revival is a prominent peak on its own, so a revival is identified
//! as a *burst* of prominent peaks that follows a quiet stretch (the collapse),
//! and its time is the highest peak of the burst.

use crate::{Error, Result};

/// Default moving-average width in samples.
pub const DEFAULT_SMOOTH_WINDOW: usize = 5;
/// Default prominence threshold, in units of the analysed observable.
pub const DEFAULT_MIN_PROMINENCE: f64 = 0.05;
/// A gap between prominent peaks longer than this multiple of their median
/// spacing counts as a collapse.
pub const DEFAULT_GAP_FACTOR: f64 = 10.0;

/// Strictly increasing sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// `n_points` evenly spaced times from `start` to `end` inclusive.
    pub fn linspace(start: f64, end: f64, n_points: usize) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::Domain("time grid bounds must be finite".into()));
        }
        match n_points {
            0 => Err(Error::Domain("time grid needs at least one point".into())),
            1 => Self::from_points(vec![start]),
            _ => {
                if end <= start {
                    return Err(Error::Domain(format!(
                        "time grid end {end} must exceed start {start}"
                    )));
                }
                let step = (end - start) / (n_points - 1) as f64;
                let mut points: Vec<f64> =
                    (0..n_points).map(|i| start + step * i as f64).collect();
                points[n_points - 1] = end;
                Self::from_points(points)
            }
        }
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("time grid is empty".into()));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("time grid contains non-finite values".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("time grid must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    #[inline]
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A sampled observable.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t: Vec<f64>,
    y: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, y: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::Domain(format!(
                "series has {} times but {} values",
                t.len(),
                y.len()
            )));
        }
        let grid = TimeGrid::from_points(t)?;
        Ok(Self {
            t: grid.points,
            y,
            label: label.into(),
        })
    }

    pub fn from_grid(grid: &TimeGrid, y: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::new(grid.points().to_vec(), y, label)
    }

    #[inline]
    pub fn times(&self) -> &[f64] {
        &self.t
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.y
    }

    #[inline]
    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.t.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Sample index in the series.
    pub index: usize,
    pub time: f64,
    /// Height of the smoothed series at the peak.
    pub height: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    /// Sorted by time.
    pub peaks: Vec<Peak>,
    pub smooth_window: usize,
    pub min_prominence: f64,
}

/// Centered moving average of width `window`, truncated at the ends.
pub fn moving_average(y: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return y.to_vec();
    }
    let left = (window - 1) / 2;
    let right = window - 1 - left;
    let n = y.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(left);
            let hi = (i + right + 1).min(n);
            y[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Topographic prominence of the strict local maximum at `i`: its height
/// above the higher of the two lowest points reachable on either side before
/// meeting higher ground.
fn prominence(s: &[f64], i: usize) -> f64 {
    let h = s[i];
    let mut left_min = h;
    for &v in s[..i].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &s[i + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Moving-average smoothing followed by a scan for strict local maxima whose
/// prominence reaches `min_prominence`.
pub fn detect_peaks(
    series: &TimeSeries,
    min_prominence: f64,
    smooth_window: usize,
) -> Result<PeakReport> {
    if smooth_window == 0 || series.len() <= smooth_window {
        return Err(Error::Domain(format!(
            "peak detection needs 1 ≤ window ({smooth_window}) < series length ({})",
            series.len()
        )));
    }
    if !(min_prominence >= 0.0) {
        return Err(Error::Domain("minimum prominence must be non-negative".into()));
    }
    let s = moving_average(series.values(), smooth_window);
    let mut peaks = Vec::new();
    for i in 1..s.len().saturating_sub(1) {
        if s[i] > s[i - 1] && s[i] > s[i + 1] {
            let p = prominence(&s, i);
            if p >= min_prominence && p > 0.0 {
                peaks.push(Peak {
                    index: i,
                    time: series.times()[i],
                    height: s[i],
                    prominence: p,
                });
            }
        }
    }
    Ok(PeakReport {
        peaks,
        smooth_window,
        min_prominence,
    })
}

/// Knobs for [`detect_revivals`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalSettings {
    pub min_prominence: f64,
    pub smooth_window: usize,
    /// Minimum quiet stretch that counts as a collapse. `None` derives it as
    /// [`DEFAULT_GAP_FACTOR`] times the median spacing of the prominent peaks.
    pub collapse_gap: Option<f64>,
}

impl Default for RevivalSettings {
    fn default() -> Self {
        Self {
            min_prominence: DEFAULT_MIN_PROMINENCE,
            smooth_window: DEFAULT_SMOOTH_WINDOW,
            collapse_gap: None,
        }
    }
}

/// A run of prominent peaks with no collapse-sized gap inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Burst {
    pub start: f64,
    pub end: f64,
    /// Highest peak of the burst.
    pub apex: Peak,
    pub peak_count: usize,
    /// Whether the burst follows a collapse (or starts after one at the
    /// beginning of the series).
    pub is_revival: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevivalReport {
    pub bursts: Vec<Burst>,
    /// Quiet intervals `(start, end)` preceding each revival burst, in order.
    pub collapses: Vec<(f64, f64)>,
    pub collapse_gap: f64,
    pub peaks: PeakReport,
}

impl RevivalReport {
    /// Apex of every revival burst, in time order; the m-th revival is
    /// `revivals()[m - 1]`.
    pub fn revivals(&self) -> Vec<Peak> {
        self.bursts
            .iter()
            .filter(|b| b.is_revival)
            .map(|b| b.apex)
            .collect()
    }

    pub fn revival_times(&self) -> Vec<f64> {
        self.revivals().iter().map(|p| p.time).collect()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Groups prominent peaks into bursts and marks those that follow a collapse
/// as revivals.
pub fn detect_revivals(series: &TimeSeries, settings: RevivalSettings) -> Result<RevivalReport> {
    let peaks = detect_peaks(series, settings.min_prominence, settings.smooth_window)?;
    let gap = match settings.collapse_gap {
        Some(g) if g > 0.0 && g.is_finite() => g,
        Some(g) => return Err(Error::Domain(format!("collapse gap {g} must be positive"))),
        None => {
            if peaks.peaks.len() < 2 {
                f64::INFINITY
            } else {
                let spacing: Vec<f64> =
                    peaks.peaks.windows(2).map(|w| w[1].time - w[0].time).collect();
                DEFAULT_GAP_FACTOR * median(spacing)
            }
        }
    };

    let mut bursts = Vec::new();
    let mut collapses = Vec::new();
    let mut previous_end = series.times()[0];
    let mut group: Vec<Peak> = Vec::new();

    let mut close = |group: &mut Vec<Peak>, previous_end: &mut f64| {
        if group.is_empty() {
            return;
        }
        let start = group[0].time;
        let end = group[group.len() - 1].time;
        let apex = *group
            .iter()
            .reduce(|best, p| if p.height > best.height { p } else { best })
            .expect("non-empty");
        let is_revival = start - *previous_end > gap;
        if is_revival {
            collapses.push((*previous_end, start));
        }
        bursts.push(Burst {
            start,
            end,
            apex,
            peak_count: group.len(),
            is_revival,
        });
        *previous_end = end;
        group.clear();
    };

    for &p in &peaks.peaks {
        if let Some(last) = group.last() {
            if p.time - last.time > gap {
                close(&mut group, &mut previous_end);
            }
        }
        group.push(p);
    }
    close(&mut group, &mut previous_end);

    Ok(RevivalReport {
        bursts,
        collapses,
        collapse_gap: gap,
        peaks,
    })
}

/// Difference metrics between two series on the same grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesDiff {
    pub max_abs: f64,
    pub rms: f64,
}

pub fn compare_series(a: &TimeSeries, b: &TimeSeries) -> Result<SeriesDiff> {
    if a.times() != b.times() {
        return Err(Error::Domain(format!(
            "cannot compare '{}' and '{}': time grids differ",
            a.label(),
            b.label()
        )));
    }
    let mut max_abs = 0.0f64;
    let mut sq = 0.0;
    for (x, y) in a.values().iter().zip(b.values()) {
        let d = (x - y).abs();
        max_abs = max_abs.max(d);
        sq += d * d;
    }
    Ok(SeriesDiff {
        max_abs,
        rms: (sq / a.len() as f64).sqrt(),
    })
}

/// Least-squares line through revival times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Fits `t_r(N) = slope·N + intercept` to `(N, t_r)` pairs.
pub fn revival_linearity(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 3 {
        return Err(Error::Domain(format!(
            "revival linearity needs at least 3 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("revival linearity needs distinct bath sizes".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(LinearFit {
        slope,
        intercept,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn cosine(period: f64, t_end: f64, n: usize) -> TimeSeries {
        let grid = TimeGrid::linspace(0.0, t_end, n).unwrap();
        let y = grid
            .points()
            .iter()
            .map(|t| (2.0 * PI * t / period).cos())
            .collect();
        TimeSeries::from_grid(&grid, y, "cos").unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::linspace(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::linspace(1.0, 1.0, 3).is_err());
        assert_eq!(TimeGrid::linspace(2.0, 2.0, 1).unwrap().points(), &[2.0]);
        assert!(TimeGrid::from_points(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeGrid::from_points(vec![]).is_err());
        let g = TimeGrid::linspace(0.0, 60.0, 2000).unwrap();
        assert_eq!(g.points()[1999], 60.0);
        assert!(TimeSeries::new(vec![0.0, 1.0], vec![1.0], "x").is_err());
    }

    #[test]
    fn cosine_peaks_at_multiples_of_the_period() {
        let s = cosine(2.0, 20.0, 2001);
        let r = detect_peaks(&s, 0.1, 5).unwrap();
        let times: Vec<f64> = r.peaks.iter().map(|p| p.time).collect();
        assert_eq!(times.len(), 9);
        for (k, t) in times.iter().enumerate() {
            assert!((t - 2.0 * (k + 1) as f64).abs() <= 0.01 + 1e-12, "{t}");
        }
    }

    #[test]
    fn constant_series_has_no_peaks() {
        let s = TimeSeries::new((0..50).map(f64::from).collect(), vec![0.3; 50], "c").unwrap();
        assert!(detect_peaks(&s, 0.0, 5).unwrap().peaks.is_empty());
        let r = detect_revivals(&s, RevivalSettings::default()).unwrap();
        assert!(r.bursts.is_empty());
    }

    #[test]
    fn window_must_fit_in_series() {
        let s = TimeSeries::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0], "x").unwrap();
        assert!(detect_peaks(&s, 0.0, 3).is_err());
        assert!(detect_peaks(&s, 0.0, 0).is_err());
        assert_eq!(detect_peaks(&s, 0.5, 1).unwrap().peaks.len(), 1);
    }

    #[test]
    fn prominence_is_measured_to_the_higher_saddle() {
        // peaks 3 and 2 separated by a dip to 1, everything sits on 0
        let y = vec![0.0, 3.0, 1.0, 2.0, 0.0];
        let s = TimeSeries::new((0..5).map(f64::from).collect(), y, "x").unwrap();
        let r = detect_peaks(&s, 0.0, 1).unwrap();
        assert_eq!(r.peaks.len(), 2);
        assert_eq!(r.peaks[0].prominence, 3.0);
        assert_eq!(r.peaks[1].prominence, 1.0);
    }

    #[test]
    fn revival_bursts_are_split_by_quiet_stretches() {
        // oscillation on [0,5), silence, oscillation on [20,25)
        let grid = TimeGrid::linspace(0.0, 30.0, 3001).unwrap();
        let y = grid
            .points()
            .iter()
            .map(|&t| {
                let env = if t < 5.0 {
                    1.0
                } else if (20.0..25.0).contains(&t) {
                    1.0 - 0.1 * (t - 22.5).abs()
                } else {
                    0.0
                };
                env * (2.0 * PI * t).cos()
            })
            .collect();
        let s = TimeSeries::from_grid(&grid, y, "cr").unwrap();
        let r = detect_revivals(&s, RevivalSettings::default()).unwrap();
        assert_eq!(r.bursts.len(), 2);
        assert!(!r.bursts[0].is_revival);
        assert!(r.bursts[1].is_revival);
        let t = r.revival_times();
        assert_eq!(t.len(), 1);
        assert!((t[0] - 22.0).abs() < 0.02 || (t[0] - 23.0).abs() < 0.02, "{t:?}");
        assert_eq!(r.collapses.len(), 1);
    }

    #[test]
    fn compare_identical_and_offset() {
        let a = cosine(3.0, 10.0, 101);
        let d = compare_series(&a, &a).unwrap();
        assert_eq!((d.max_abs, d.rms), (0.0, 0.0));
        let shifted: Vec<f64> = a.values().iter().map(|v| v + 1e-3).collect();
        let b = TimeSeries::new(a.times().to_vec(), shifted, "b").unwrap();
        let d = compare_series(&a, &b).unwrap();
        assert!((d.max_abs - 1e-3).abs() < 1e-15);
        let c = cosine(3.0, 11.0, 101);
        assert!(compare_series(&a, &c).is_err());
    }

    #[test]
    fn linear_fit_recovers_exact_law() {
        let pts: Vec<(f64, f64)> = [50.0, 70.0, 90.0].iter().map(|&n| (n, PI * n)).collect();
        let fit = revival_linearity(&pts).unwrap();
        assert!((fit.slope - PI).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-9);
        assert!(fit.residual < 1e-9);
        assert!(revival_linearity(&pts[..2]).is_err());
    }
}
