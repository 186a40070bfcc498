//! Python bindings for the `fadres` enhancement-factor library.

use fadres_core::enhancement::{self, AggregateMode, Regime, Variant};
use fadres_core::numerics::{Complex, QuadratureSpec, RootFindSpec};
use fadres_core::scanner::{self, GridRange, ScanGrid};
use fadres_core::threebody::{self, Separation};
use fadres_core::twobody::{self, Coupling};
use fadres_core::units::{self, PhysicalScale};
use fadres_core::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

create_exception!(fadres, NumericalError, PyArithmeticError);

type Sample = (f64, f64, Option<Complex>, f64, bool);
type Window = ((f64, f64), (f64, f64), f64);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(msg) => PyValueError::new_err(msg),
        other => NumericalError::new_err(other.to_string()),
    }
}

fn coupling(lambda: f64) -> PyResult<Coupling> {
    Coupling::new(lambda).map_err(to_py)
}

fn separation(rho: f64) -> PyResult<Separation> {
    Separation::new(rho).map_err(to_py)
}

fn variant(name: &str) -> PyResult<Variant> {
    name.parse().map_err(to_py)
}

fn quadrature(tol: Option<f64>) -> PyResult<QuadratureSpec> {
    match tol {
        Some(t) => QuadratureSpec::new(t * 1e-2, t, QuadratureSpec::default().max_subdivisions).map_err(to_py),
        None => Ok(QuadratureSpec::default()),
    }
}

fn grid_range((start, stop, count): (f64, f64, usize)) -> PyResult<GridRange> {
    GridRange::new(start, stop, count).map_err(to_py)
}

/// Loop integral I(t0) of the pair propagator; accepts complex t0.
#[pyfunction]
fn loop_integral(t0: Complex) -> PyResult<Complex> {
    twobody::propagator_loop(t0).map_err(to_py)
}

/// Two-body amplification eta = lambda / (1 + lambda I(t0)).
#[pyfunction]
fn amplification(lambda: f64, t0: Complex) -> PyResult<Complex> {
    Ok(twobody::amplification(coupling(lambda)?, t0).map_err(to_py)?.eta)
}

#[pyfunction]
fn exchange_kernel(rho: f64, t0: f64) -> PyResult<Complex> {
    threebody::exchange_kernel(separation(rho)?, t0).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (lambda, t0, rho, variant = "summed"))]
fn xi(lambda: f64, t0: f64, rho: f64, variant: &str) -> PyResult<Complex> {
    let v = self::variant(variant)?;
    Ok(enhancement::xi(coupling(lambda)?, t0, separation(rho)?, v)
        .map_err(to_py)?
        .value)
}

/// "amplified_attraction", "suppressed" or "repulsive".
#[pyfunction]
fn classify(value: Complex) -> &'static str {
    Regime::from_value(value).as_str()
}

#[pyfunction]
#[pyo3(signature = (lambda, rho, interval = (0.001, 0.6), variant = "summed", mode = "mean", tol = None))]
fn big_xi(
    py: Python<'_>,
    lambda: f64,
    rho: f64,
    interval: (f64, f64),
    variant: &str,
    mode: &str,
    tol: Option<f64>,
) -> PyResult<Complex> {
    let mode = match mode {
        "mean" => AggregateMode::Mean,
        "integral" => AggregateMode::Integral,
        other => return Err(PyValueError::new_err(format!("unknown mode '{other}'"))),
    };
    let (c, sep, v, spec) = (
        coupling(lambda)?,
        separation(rho)?,
        self::variant(variant)?,
        quadrature(tol)?,
    );
    py.detach(|| enhancement::big_xi_with_mode(c, sep, interval, &spec, v, mode))
        .map(|f| f.value)
        .map_err(to_py)
}

#[pyclass(frozen, get_all, module = "fadres")]
struct PairPole {
    location: Complex,
    kind: &'static str,
}

#[pymethods]
impl PairPole {
    fn __repr__(&self) -> String {
        format!("PairPole(location={}, kind='{}')", self.location, self.kind)
    }
}

/// Every zero of 1/lambda + I(t0) on the principal branch.
#[pyfunction]
fn pair_poles(lambda: f64) -> PyResult<Vec<PairPole>> {
    let poles = twobody::pair_poles(coupling(lambda)?, &RootFindSpec::default()).map_err(to_py)?;
    Ok(poles
        .into_iter()
        .map(|p| PairPole {
            location: p.location,
            kind: p.kind.as_str(),
        })
        .collect())
}

#[pyclass(frozen, get_all, module = "fadres")]
struct Resonance {
    lambda: f64,
    t0: f64,
    rho_star: f64,
    peak_abs_xi: f64,
    fwhm_rho: f64,
    residual: f64,
}

#[pymethods]
impl Resonance {
    fn __repr__(&self) -> String {
        format!(
            "Resonance(t0={}, rho_star={}, peak_abs_xi={}, fwhm_rho={})",
            self.t0, self.rho_star, self.peak_abs_xi, self.fwhm_rho
        )
    }
}

#[pyfunction]
#[pyo3(signature = (lambda, t0, rho_range = (1.0, 6.0), variant = "summed"))]
fn find_resonances(lambda: f64, t0: f64, rho_range: (f64, f64), variant: &str) -> PyResult<Vec<Resonance>> {
    let found = scanner::find_resonances(
        coupling(lambda)?,
        t0,
        rho_range,
        self::variant(variant)?,
        &RootFindSpec::default(),
    )
    .map_err(to_py)?;
    Ok(found
        .into_iter()
        .map(|r| Resonance {
            lambda: r.lambda,
            t0: r.t0,
            rho_star: r.rho_star,
            peak_abs_xi: r.peak_abs_xi,
            fwhm_rho: r.fwhm_rho,
            residual: r.residual,
        })
        .collect())
}

fn scan_grid(
    lambda: f64,
    t0_range: (f64, f64, usize),
    rho_range: (f64, f64, usize),
    variant: &str,
) -> PyResult<ScanGrid> {
    ScanGrid::new(
        coupling(lambda)?,
        grid_range(t0_range)?,
        grid_range(rho_range)?,
        self::variant(variant)?,
    )
    .map_err(to_py)
}

/// Row-major samples `(t0, rho, xi or None, denom_abs, singular)`.
#[pyfunction]
#[pyo3(signature = (lambda, t0_range, rho_range, variant = "summed"))]
fn scan_surface(
    py: Python<'_>,
    lambda: f64,
    t0_range: (f64, f64, usize),
    rho_range: (f64, f64, usize),
    variant: &str,
) -> PyResult<Vec<Sample>> {
    let grid = scan_grid(lambda, t0_range, rho_range, variant)?;
    let samples = py.detach(|| scanner::scan_surface(&grid));
    Ok(samples
        .into_iter()
        .map(|s| (s.t0, s.rho, s.xi, s.denom_abs, s.singular))
        .collect())
}

/// Bounding windows `((t0_lo, t0_hi), (rho_lo, rho_hi), max_abs_xi)`.
#[pyfunction]
#[pyo3(signature = (lambda, t0_range, rho_range, variant = "summed", percentile = 2.0))]
fn find_resonance_regions(
    py: Python<'_>,
    lambda: f64,
    t0_range: (f64, f64, usize),
    rho_range: (f64, f64, usize),
    variant: &str,
    percentile: f64,
) -> PyResult<Vec<Window>> {
    let grid = scan_grid(lambda, t0_range, rho_range, variant)?;
    let regions = py.detach(|| {
        let samples = scanner::scan_surface(&grid);
        scanner::regions_from_samples(&grid, &samples, percentile)
    });
    Ok(regions
        .into_iter()
        .map(|r| (r.t0_window, r.rho_window, r.max_abs_xi))
        .collect())
}

/// Half-separation and separation in cm.
#[pyfunction]
fn rho_to_distance(rho: f64, beta: f64) -> PyResult<(f64, f64)> {
    let d = units::rho_to_distance(rho, PhysicalScale::new(beta).map_err(to_py)?).map_err(to_py)?;
    Ok((d.r_cm, d.d_cm))
}

#[pyfunction]
fn t0_to_momentum(t0: f64, beta: f64) -> PyResult<f64> {
    units::t0_to_momentum(t0, PhysicalScale::new(beta).map_err(to_py)?).map_err(to_py)
}

#[pymodule]
fn fadres(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PairPole>()?;
    m.add_class::<Resonance>()?;
    m.add_function(wrap_pyfunction!(loop_integral, m)?)?;
    m.add_function(wrap_pyfunction!(amplification, m)?)?;
    m.add_function(wrap_pyfunction!(exchange_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(xi, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(big_xi, m)?)?;
    m.add_function(wrap_pyfunction!(pair_poles, m)?)?;
    m.add_function(wrap_pyfunction!(find_resonances, m)?)?;
    m.add_function(wrap_pyfunction!(scan_surface, m)?)?;
    m.add_function(wrap_pyfunction!(find_resonance_regions, m)?)?;
    m.add_function(wrap_pyfunction!(rho_to_distance, m)?)?;
    m.add_function(wrap_pyfunction!(t0_to_momentum, m)?)?;
    Ok(())
}
