//! Parameter-plane scans of ξ(t₀, ρ) and resonance detection.
//!
//! Every sample is a pure function of its grid coordinates, so the scans are
//! evaluated in parallel with rayon and collected in index order: the output
//! does not depend on the number of worker threads.

use std::collections::VecDeque;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::enhancement::{self, AggregateFactor, AggregateMode, Variant};
use crate::error::{Error, Result};
use crate::numerics::{self, Complex, QuadratureSpec, RootFindSpec};
use crate::threebody::{self, Separation, RHO_MIN};
use crate::twobody::{self, Coupling, TwoBodyDress};

/// `count` equally spaced points from `start` to `stop`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(Error::Domain(format!("range needs start < stop, got {start}:{stop}")));
        }
        if count < 2 {
            return Err(Error::Domain(format!("range needs at least 2 points, got {count}")));
        }
        Ok(Self { start, stop, count })
    }

    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            self.stop
        } else {
            self.start + (self.stop - self.start) * (k as f64) / ((self.count - 1) as f64)
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / ((self.count - 1) as f64)
    }
}

impl FromStr for GridRange {
    type Err = Error;

    /// Parses `start:stop:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Domain(format!("expected start:stop:count, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
        let stop = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
        let count = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        Self::new(start, stop, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanGrid {
    pub t0: GridRange,
    pub rho: GridRange,
    pub coupling: Coupling,
    pub variant: Variant,
}

impl ScanGrid {
    pub fn new(coupling: Coupling, t0: GridRange, rho: GridRange, variant: Variant) -> Result<Self> {
        if t0.start < 0.0 {
            return Err(Error::Domain(format!(
                "t0 range must be non-negative, got {}",
                t0.start
            )));
        }
        if rho.start < RHO_MIN {
            return Err(Error::Domain(format!("rho range must start at or above {RHO_MIN:e}")));
        }
        Ok(Self {
            t0,
            rho,
            coupling,
            variant,
        })
    }

    pub fn len(&self) -> usize {
        self.t0.count * self.rho.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSample {
    pub t0: f64,
    pub rho: f64,
    /// `None` when the point is singular.
    pub xi: Option<Complex>,
    /// Modulus of the contraction's resonance denominator.
    pub denom_abs: f64,
    pub singular: bool,
}

fn sample_point(coupling: Coupling, t0: f64, rho: f64, variant: Variant) -> ScanSample {
    let singular = |denom_abs| ScanSample {
        t0,
        rho,
        xi: None,
        denom_abs,
        singular: true,
    };
    let Ok(sep) = Separation::new(rho) else {
        return singular(f64::NAN);
    };
    let dress = match twobody::amplification(coupling, Complex::new(t0, 0.0)) {
        Ok(d) => d,
        Err(_) => return singular(0.0),
    };
    let denom_abs = match threebody::exchange_kernel(sep, t0) {
        Ok(j) => enhancement::denominator(&dress, j, variant).norm(),
        Err(_) => return singular(f64::NAN),
    };
    match enhancement::xi(coupling, t0, sep, variant) {
        Ok(x) => ScanSample {
            t0,
            rho,
            xi: Some(x.value),
            denom_abs,
            singular: false,
        },
        Err(_) => singular(denom_abs),
    }
}

/// Evaluates ξ on the whole grid, t₀ outer and ρ inner.
pub fn scan_surface(grid: &ScanGrid) -> Vec<ScanSample> {
    let n_rho = grid.rho.count;
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let t0 = grid.t0.point(idx / n_rho);
            let rho = grid.rho.point(idx % n_rho);
            sample_point(grid.coupling, t0, rho, grid.variant)
        })
        .collect()
}

/// A located resonance distance at fixed t₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceRecord {
    pub lambda: f64,
    pub t0: f64,
    pub rho_star: f64,
    pub peak_abs_xi: f64,
    /// Full width at half maximum of |ξ(ρ)|.
    pub fwhm_rho: f64,
    /// Resonance denominator modulus at `rho_star`.
    pub residual: f64,
}

/// Pre-grid spacing used by [`find_resonances`].
pub const PREGRID_STEP: f64 = 0.005;

/// Largest admissible denominator modulus at a resonance.
pub const MAX_RESIDUAL: f64 = 0.5;

struct Line<'a> {
    dress: &'a TwoBodyDress,
    t0: f64,
    variant: Variant,
}

impl Line<'_> {
    fn kernel(&self, rho: f64) -> Complex {
        // rho is validated against RHO_MIN by the caller.
        threebody::exchange_kernel(Separation::new(rho).expect("rho in range"), self.t0).expect("t0 >= 0")
    }

    fn denom(&self, rho: f64) -> f64 {
        enhancement::denominator(self.dress, self.kernel(rho), self.variant).norm()
    }

    fn abs_xi(&self, rho: f64) -> f64 {
        enhancement::closed_form(self.dress, self.kernel(rho), self.variant).norm()
    }
}

/// Resonances of |ξ(ρ)| at fixed t₀ within `rho_range`.
///
/// Local maxima of |ξ| on a pre-grid of step [`PREGRID_STEP`] seed a
/// golden-section minimisation of the resonance denominator; seeds whose
/// refined denominator stays above [`MAX_RESIDUAL`] are background
/// oscillations and are dropped. An empty result is not an error.
pub fn find_resonances(
    coupling: Coupling,
    t0: f64,
    rho_range: (f64, f64),
    variant: Variant,
    spec: &RootFindSpec,
) -> Result<Vec<ResonanceRecord>> {
    let (a, b) = rho_range;
    if !(a >= RHO_MIN && a < b && b.is_finite()) {
        return Err(Error::Domain(format!(
            "rho range must satisfy {RHO_MIN:e} <= a < b, got [{a}, {b}]"
        )));
    }
    if !(t0.is_finite() && t0 >= 0.0) {
        return Err(Error::Domain(format!("t0 must be >= 0, got {t0}")));
    }
    if coupling.is_free() {
        return Ok(Vec::new());
    }

    let dress = twobody::amplification(coupling, Complex::new(t0, 0.0))?;
    let line = Line {
        dress: &dress,
        t0,
        variant,
    };

    let n = (((b - a) / PREGRID_STEP).ceil() as usize).max(2) + 1;
    let grid = GridRange::new(a, b, n)?;
    let rhos = grid.points();
    let values: Vec<f64> = rhos.par_iter().map(|&r| line.abs_xi(r)).collect();

    let mut records: Vec<ResonanceRecord> = Vec::new();
    for k in 1..n - 1 {
        if !(values[k] > values[k - 1] && values[k] >= values[k + 1]) {
            continue;
        }
        let seed = rhos[k];
        let lo = rhos[k.saturating_sub(2)];
        let hi = rhos[(k + 2).min(n - 1)];
        let refined = numerics::minimize_bracketed(|r| line.denom(r).powi(2), lo, hi, spec.tol.max(1e-12))?;
        let rho_star = if line.denom(refined) <= line.denom(seed) {
            refined
        } else {
            seed
        };
        let residual = line.denom(rho_star);
        if !(residual < MAX_RESIDUAL) {
            continue;
        }
        if records.iter().any(|r| (r.rho_star - rho_star).abs() < 1e-6) {
            continue;
        }
        let peak = line.abs_xi(rho_star);
        let left = half_max_edge(&line, rho_star, peak, a, -grid.step(), spec)?;
        let right = half_max_edge(&line, rho_star, peak, b, grid.step(), spec)?;
        records.push(ResonanceRecord {
            lambda: coupling.lambda(),
            t0,
            rho_star,
            peak_abs_xi: peak,
            fwhm_rho: right - left,
            residual,
        });
    }
    records.sort_by(|x, y| x.rho_star.total_cmp(&y.rho_star));
    Ok(records)
}

/// Walks from the peak towards `limit` until |ξ| drops to half its peak,
/// then pins the crossing with the bracketed root finder. Returns `limit`
/// when no crossing occurs inside the range.
fn half_max_edge(line: &Line<'_>, rho_star: f64, peak: f64, limit: f64, step: f64, spec: &RootFindSpec) -> Result<f64> {
    let half = 0.5 * peak;
    let beyond = |r: f64| if step < 0.0 { r <= limit } else { r >= limit };
    let mut inner = rho_star;
    loop {
        let mut outer = inner + step;
        if beyond(outer) {
            outer = limit;
        }
        if line.abs_xi(outer) <= half {
            let (lo, hi) = if step < 0.0 { (outer, inner) } else { (inner, outer) };
            let edge_spec = RootFindSpec {
                tol: spec.tol.max(1e-10 * peak),
                ..*spec
            };
            return numerics::find_root_real(|r| line.abs_xi(r) - half, lo, hi, &edge_spec)
                .or_else(|_| numerics::minimize_bracketed(|r| (line.abs_xi(r) - half).abs(), lo, hi, 1e-12));
        }
        if outer == limit {
            return Ok(limit);
        }
        inner = outer;
    }
}

/// A connected patch of the (t₀, ρ) plane where the denominator is small.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceRegion {
    pub t0_window: (f64, f64),
    pub rho_window: (f64, f64),
    pub max_abs_xi: f64,
    pub peak_t0: f64,
    pub peak_rho: f64,
    pub min_denom: f64,
    pub samples: usize,
}

/// Default percentile of `denom_abs` below which samples join a region.
pub const DEFAULT_REGION_PERCENTILE: f64 = 2.0;

pub fn find_resonance_regions(grid: &ScanGrid) -> Vec<ResonanceRegion> {
    let samples = scan_surface(grid);
    regions_from_samples(grid, &samples, DEFAULT_REGION_PERCENTILE)
}

/// Linear-interpolated percentile (0..=100) of a non-empty sample.
pub fn percentile(values: &[f64], pct: f64) -> f64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = (pct.clamp(0.0, 100.0) / 100.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// 8-connected components of samples with `denom_abs` strictly below the
/// given percentile of the grid. Singular samples count as `denom_abs = 0`.
pub fn regions_from_samples(grid: &ScanGrid, samples: &[ScanSample], pct: f64) -> Vec<ResonanceRegion> {
    let n_rho = grid.rho.count;
    let n_t0 = grid.t0.count;
    assert_eq!(samples.len(), n_rho * n_t0, "samples do not match the grid");

    let denom: Vec<f64> = samples
        .iter()
        .map(|s| {
            if s.singular || !s.denom_abs.is_finite() {
                0.0
            } else {
                s.denom_abs
            }
        })
        .collect();
    let threshold = percentile(&denom, pct);
    let inside: Vec<bool> = denom.iter().map(|&d| d < threshold).collect();

    let mut seen = vec![false; samples.len()];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..samples.len() {
        if !inside[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut region = ResonanceRegion {
            t0_window: (f64::INFINITY, f64::NEG_INFINITY),
            rho_window: (f64::INFINITY, f64::NEG_INFINITY),
            max_abs_xi: f64::NEG_INFINITY,
            peak_t0: samples[start].t0,
            peak_rho: samples[start].rho,
            min_denom: f64::INFINITY,
            samples: 0,
        };
        while let Some(idx) = queue.pop_front() {
            let s = &samples[idx];
            region.samples += 1;
            region.t0_window = (region.t0_window.0.min(s.t0), region.t0_window.1.max(s.t0));
            region.rho_window = (region.rho_window.0.min(s.rho), region.rho_window.1.max(s.rho));
            region.min_denom = region.min_denom.min(denom[idx]);
            let magnitude = s.xi.map_or(f64::INFINITY, |x| x.norm());
            if magnitude > region.max_abs_xi {
                region.max_abs_xi = magnitude;
                region.peak_t0 = s.t0;
                region.peak_rho = s.rho;
            }

            let (row, col) = ((idx / n_rho) as isize, (idx % n_rho) as isize);
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let (r, c) = (row + dr, col + dc);
                    if r < 0 || c < 0 || r >= n_t0 as isize || c >= n_rho as isize {
                        continue;
                    }
                    let next = r as usize * n_rho + c as usize;
                    if inside[next] && !seen[next] {
                        seen[next] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        regions.push(region);
    }

    regions.sort_by(|x, y| {
        x.rho_window
            .0
            .total_cmp(&y.rho_window.0)
            .then(x.t0_window.0.total_cmp(&y.t0_window.0))
    });
    regions
}

/// Ξ(ρ) at each requested separation, evaluated in parallel.
pub fn aggregate_curve(
    coupling: Coupling,
    rhos: &[f64],
    interval: (f64, f64),
    spec: &QuadratureSpec,
    variant: Variant,
    mode: AggregateMode,
) -> Vec<Result<AggregateFactor>> {
    rhos.par_iter()
        .map(|&rho| {
            let sep = Separation::new(rho)?;
            enhancement::big_xi_with_mode(coupling, sep, interval, spec, variant, mode)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(x: f64) -> Coupling {
        Coupling::new(x).unwrap()
    }

    fn grid(l: f64, t0: &str, rho: &str) -> ScanGrid {
        ScanGrid::new(lam(l), t0.parse().unwrap(), rho.parse().unwrap(), Variant::Summed).unwrap()
    }

    #[test]
    fn range_parsing_and_points() {
        let r: GridRange = "1:6:6".parse().unwrap();
        assert_eq!(r.points(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert!("1:6".parse::<GridRange>().is_err());
        assert!("6:1:5".parse::<GridRange>().is_err());
        assert!("1:6:1".parse::<GridRange>().is_err());
        let odd: GridRange = "0.001:0.6:7".parse().unwrap();
        assert_eq!(odd.point(6), 0.6);
    }

    #[test]
    fn free_surface_is_flat() {
        let samples = scan_surface(&grid(0.0, "0.001:0.6:5", "1:6:7"));
        assert_eq!(samples.len(), 35);
        assert!(samples
            .iter()
            .all(|s| s.xi == Some(Complex::new(1.0, 0.0)) && !s.singular));
        // Row-major: t0 outer, rho inner.
        assert_eq!(samples[1].t0, 0.001);
        assert_eq!(samples[1].rho, grid(0.0, "0.001:0.6:5", "1:6:7").rho.point(1));
    }

    #[test]
    fn attractive_surface_peaks_near_fig1_ridge() {
        let samples = scan_surface(&grid(-0.95, "0.001:0.6:120", "1:6:250"));
        let peak = samples
            .iter()
            .filter_map(|s| s.xi.map(|x| (x.norm(), s.rho)))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        assert!((2.3..=3.0).contains(&peak.1), "{peak:?}");
    }

    #[test]
    fn repulsive_surface_has_no_small_denominator() {
        let samples = scan_surface(&grid(10.0, "0.001:0.6:120", "1:6:250"));
        let min = samples.iter().map(|s| s.denom_abs).fold(f64::INFINITY, f64::min);
        assert!(min > 0.3, "{min}");
        assert!(samples.iter().all(|s| !s.singular));
    }

    #[test]
    fn single_resonance_at_fixed_t0() {
        let spec = RootFindSpec::default();
        let recs = find_resonances(lam(-0.95), 0.12, (1.0, 6.0), Variant::Summed, &spec).unwrap();
        assert_eq!(recs.len(), 1, "{recs:?}");
        let r = recs[0];
        assert!((r.rho_star - 2.7).abs() <= 0.15, "{r:?}");
        assert!(r.fwhm_rho > 0.0 && r.residual < MAX_RESIDUAL);

        // Peak consistency: both half-maximum edges lie below the peak and
        // bracket it.
        let dress = twobody::amplification(lam(-0.95), Complex::new(0.12, 0.0)).unwrap();
        let line = Line {
            dress: &dress,
            t0: 0.12,
            variant: Variant::Summed,
        };
        let left = half_max_edge(&line, r.rho_star, r.peak_abs_xi, 1.0, -PREGRID_STEP, &spec).unwrap();
        let right = half_max_edge(&line, r.rho_star, r.peak_abs_xi, 6.0, PREGRID_STEP, &spec).unwrap();
        assert!(left < r.rho_star && r.rho_star < right);
        assert!((right - left - r.fwhm_rho).abs() < 1e-12);
        assert!(line.abs_xi(left) <= r.peak_abs_xi && line.abs_xi(right) <= r.peak_abs_xi);

        // Refinement never worsens the coarse seed.
        let coarse = GridRange::new(1.0, 6.0, 1001).unwrap().points();
        let seed = coarse
            .iter()
            .copied()
            .max_by(|a, b| line.abs_xi(*a).total_cmp(&line.abs_xi(*b)))
            .unwrap();
        assert!(r.residual <= line.denom(seed));
    }

    #[test]
    fn no_resonance_without_attraction() {
        let spec = RootFindSpec::default();
        assert!(find_resonances(lam(0.0), 0.12, (1.0, 6.0), Variant::Summed, &spec)
            .unwrap()
            .is_empty());
        assert!(find_resonances(lam(10.0), 0.12, (1.0, 30.0), Variant::Summed, &spec)
            .unwrap()
            .is_empty());
        assert!(find_resonances(lam(-0.9), 0.12, (0.0, 6.0), Variant::Summed, &spec).is_err());
    }

    #[test]
    fn peak_grows_towards_threshold_coupling() {
        let spec = RootFindSpec::default();
        let peaks: Vec<f64> = [-0.90, -0.95, -0.97]
            .iter()
            .map(|&l| {
                let recs = find_resonances(lam(l), 0.12, (1.0, 6.0), Variant::Summed, &spec).unwrap();
                recs.iter().map(|r| r.peak_abs_xi).fold(0.0, f64::max)
            })
            .collect();
        assert!(peaks[0] < peaks[1] && peaks[1] < peaks[2], "{peaks:?}");
    }

    #[test]
    fn percentile_interpolates() {
        let v = [4.0, 1.0, 3.0, 2.0, 5.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 50.0), 3.0);
        assert_eq!(percentile(&v, 100.0), 5.0);
        assert_eq!(percentile(&v, 12.5), 1.5);
    }

    #[test]
    fn free_model_has_no_regions() {
        assert!(find_resonance_regions(&grid(0.0, "0.001:0.6:30", "1:30:60")).is_empty());
    }

    #[test]
    fn fig1_coupling_has_a_region_at_the_ridge() {
        let regions = find_resonance_regions(&grid(-0.95, "0.001:0.6:150", "1:30:300"));
        assert!(
            regions.iter().any(|r| r.rho_window.0 <= 2.65 && 2.65 <= r.rho_window.1),
            "{regions:?}"
        );
    }

    #[test]
    fn aggregate_curve_preserves_order() {
        let spec = QuadratureSpec::new(1e-10, 1e-8, 4000).unwrap();
        let rhos = [1.5, 2.0, 3.0];
        let curve = aggregate_curve(
            lam(-0.5),
            &rhos,
            (0.001, 0.6),
            &spec,
            Variant::Summed,
            AggregateMode::Mean,
        );
        for (agg, rho) in curve.iter().zip(rhos) {
            assert_eq!(agg.as_ref().unwrap().rho, rho);
        }
    }
}
