//! Numerical kernel: adaptive Gauss-Kronrod quadrature, Cauchy principal
//! values, bracketed and complex root finding, golden-section minimisation
//! and a pivoted 2×2 complex solve.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

const MIN_TOL: f64 = 100.0 * f64::EPSILON;

// 21-point Kronrod extension of the 10-point Gauss rule, abscissae on [0, 1]
// in decreasing order. Odd indices are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_460,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_958_109_831,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Error targets and subdivision budget for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol >= MIN_TOL) {
            return Err(Error::Domain(format!(
                "abs_tol must be at least {MIN_TOL:e}, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol >= MIN_TOL) {
            return Err(Error::Domain(format!(
                "rel_tol must be at least {MIN_TOL:e}, got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

/// Tolerance and iteration budget for the root finders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootFindSpec {
    pub tol: f64,
    pub max_iterations: usize,
}

impl RootFindSpec {
    pub fn new(tol: f64, max_iterations: usize) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::Domain(format!("root tolerance must be positive, got {tol}")));
        }
        if max_iterations == 0 {
            return Err(Error::Domain("max_iterations must be positive".into()));
        }
        Ok(Self { tol, max_iterations })
    }
}

impl Default for RootFindSpec {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Value of an adaptive integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // Ties broken on position so the refinement order is fully determined.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn checked<F>(f: &F, x: f64) -> Result<Complex>
where
    F: Fn(f64) -> Result<Complex>,
{
    let v = f(x)?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at: x })
    }
}

fn gauss_kronrod_21<F>(f: &F, a: f64, b: f64) -> Result<Segment>
where
    F: Fn(f64) -> Result<Complex>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = checked(f, center)?;
    let mut kronrod = f_center * WGK[10];
    let mut gauss = Complex::new(0.0, 0.0);
    let mut abs_sum = f_center.norm() * WGK[10];

    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(10).enumerate() {
        let dx = half * x;
        let lo = checked(f, center - dx)?;
        let hi = checked(f, center + dx)?;
        let sum = lo + hi;
        kronrod += sum * w;
        abs_sum += w * (lo.norm() + hi.norm());
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }

    let value = kronrod * half;
    let roundoff = 50.0 * f64::EPSILON * abs_sum * half.abs();
    let error = ((kronrod - gauss) * half).norm().max(roundoff);
    Ok(Segment { a, b, value, error })
}

fn validate_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!(
            "integration requires finite a < b, got [{a}, {b}]"
        )));
    }
    Ok(())
}

/// Globally adaptive 21-point Gauss-Kronrod integration of a fallible
/// integrand over the finite interval `[a, b]`.
///
/// The segment with the largest error estimate is bisected until the total
/// error falls below `max(abs_tol, rel_tol·|I|)`.
pub fn try_integrate_adaptive<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Complex>,
{
    spec.validate()?;
    validate_interval(a, b)?;

    let first = gauss_kronrod_21(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut value = first.value;
    let mut error = first.error;

    loop {
        let target = spec.abs_tol.max(spec.rel_tol * value.norm());
        if error <= target {
            break;
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                subdivisions: heap.len(),
                estimate: value.norm(),
                error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in double precision.
            return Err(Error::NonConvergence {
                subdivisions: heap.len() + 1,
                estimate: value.norm(),
                error,
            });
        }
        let left = gauss_kronrod_21(&f, worst.a, mid)?;
        let right = gauss_kronrod_21(&f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in interval order so the result does not depend on the
    // accumulated history of the running totals.
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().map(|s| s.value).sum();
    let error = segments.iter().map(|s| s.error).sum();
    Ok(QuadratureResult {
        value,
        error,
        subdivisions: segments.len(),
    })
}

/// Adaptive integration of a complex-valued integrand on `[a, b]`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex,
{
    try_integrate_adaptive(|x| Ok(f(x)), a, b, spec)
}

/// Integral over `[a, ∞)` using the map `t = a + u/(1-u)`, `u ∈ [0, 1)`.
pub fn integrate_semi_infinite<F>(f: F, a: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex,
{
    if !a.is_finite() {
        return Err(Error::Domain(format!("lower limit must be finite, got {a}")));
    }
    let mapped = |u: f64| {
        let w = 1.0 - u;
        let t = a + u / w;
        let v = f(t) / (w * w);
        // The map sends u -> 1 to infinity; the integrand must have decayed.
        if t.is_finite() {
            v
        } else {
            Complex::new(0.0, 0.0)
        }
    };
    integrate_adaptive(mapped, 0.0, 1.0, spec)
}

/// Cauchy principal value of `∫ₐᵇ g(t)/(pole² − t²) dt`.
///
/// With `h(t) = g(t)/(pole + t)` the integrand is `h(t)/(pole − t)`; the
/// singular part `h(pole)/(pole − t)` is integrated analytically and the
/// remainder, which is regular at the pole, by adaptive quadrature on either
/// side of it. The `−iπ` on-shell term of a `+iγ` prescription is left to
/// the caller.
pub fn integrate_pv<G>(g: G, pole: f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    validate_interval(a, b)?;
    if !(pole > a && pole < b) {
        return Err(Error::PoleOutsideInterval { pole, a, b });
    }
    if a <= -pole {
        return Err(Error::Domain(format!(
            "mirror pole at {} must lie below the interval [{a}, {b}]",
            -pole
        )));
    }

    let h = |t: f64| g(t) / (pole + t);
    let h_pole = h(pole);
    let regular = |t: f64| Complex::new((h(t) - h_pole) / (pole - t), 0.0);

    let lower = integrate_adaptive(regular, a, pole, spec)?;
    let upper = integrate_adaptive(regular, pole, b, spec)?;
    let singular = h_pole * ((pole - a) / (b - pole)).ln();

    let value = lower.value.re + upper.value.re + singular;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { at: pole })
    }
}

/// Brent's method on a sign-changing bracket. Every evaluation stays inside
/// `[a, b]`; returns `x` with `|f(x)| <= tol`.
pub fn find_root_real<F>(f: F, a: f64, b: f64, spec: &RootFindSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!("bracket requires a < b, got [{a}, {b}]")));
    }
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::NonFinite {
            at: if fa.is_finite() { b } else { a },
        });
    }
    if fa.abs() <= spec.tol {
        return Ok(a);
    }
    if fb.abs() <= spec.tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { a, b });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..spec.max_iterations {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol1 = 2.0 * f64::EPSILON * b.abs();
        let m = 0.5 * (c - b);
        if fb.abs() <= spec.tol {
            return Ok(b);
        }
        if m.abs() <= tol1 {
            break;
        }

        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite { at: b });
        }
    }

    Err(Error::IterationLimit {
        iterations: spec.max_iterations,
        residual: fb.abs(),
    })
}

/// Newton iteration for an analytic `f` with a central-difference
/// derivative, step `1e-6·max(1, |z|)` along the real axis.
pub fn find_root_complex<F>(f: F, guess: Complex, spec: &RootFindSpec) -> Result<Complex>
where
    F: Fn(Complex) -> Complex,
{
    let mut z = guess;
    let mut fz = f(z);
    for _ in 0..spec.max_iterations {
        if !(fz.re.is_finite() && fz.im.is_finite()) {
            return Err(Error::NonFinite { at: z.re });
        }
        if fz.norm() <= spec.tol {
            return Ok(z);
        }
        let h = 1e-6 * z.norm().max(1.0);
        let deriv = (f(z + h) - f(z - h)) / (2.0 * h);
        if deriv.norm() == 0.0 || !deriv.norm().is_finite() {
            return Err(Error::DerivativeVanished { re: z.re, im: z.im });
        }
        z -= fz / deriv;
        fz = f(z);
    }
    if fz.norm() <= spec.tol {
        return Ok(z);
    }
    Err(Error::IterationLimit {
        iterations: spec.max_iterations,
        residual: fz.norm(),
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]`; returns the
/// abscissa once the bracket is narrower than `tol`.
pub fn minimize_bracketed<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!("bracket requires a < b, got [{a}, {b}]")));
    }
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol.max(4.0 * f64::EPSILON * hi.abs().max(lo.abs())) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    Ok(if f1 <= f2 { x1 } else { x2 })
}

pub type Matrix2 = [[Complex; 2]; 2];

pub fn det_2x2(m: &Matrix2) -> Complex {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn frobenius(m: &Matrix2) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves `A·x = b` by Gaussian elimination with partial pivoting.
///
/// Fails with [`Error::SingularMatrix`] when `|det A| < 1e-14·‖A‖²_F`.
pub fn solve_2x2(a: &Matrix2, b: &[Complex; 2]) -> Result<[Complex; 2]> {
    let det = det_2x2(a);
    let scale = frobenius(a);
    if !(det.norm() >= 1e-14 * scale * scale) || scale == 0.0 {
        return Err(Error::SingularMatrix { det_abs: det.norm() });
    }

    let (p, q) = if a[0][0].norm() >= a[1][0].norm() {
        (0, 1)
    } else {
        (1, 0)
    };
    let pivot = a[p][0];
    let factor = a[q][0] / pivot;
    let u11 = a[q][1] - factor * a[p][1];
    let y1 = b[q] - factor * b[p];
    let x1 = y1 / u11;
    let x0 = (b[p] - a[p][1] * x1) / pivot;

    if [x0, x1].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok([x0, x1])
    } else {
        Err(Error::SingularMatrix { det_abs: det.norm() })
    }
}
