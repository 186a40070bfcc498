//! Born-Oppenheimer solution of the light particle scattered on two fixed
//! heavy bodies.
//!
//! With identical light-heavy channels (labelled 2 and 3) the connected
//! amplitude `M = Λ + ΛηM` is a 2×2 channel matrix whose exchange structure
//! `Λ` has an identically vanishing diagonal. Its two independent entries
//! are `M⁻` (diagonal, attached to `δ(r − r′)`) and `M⁺` (off-diagonal,
//! attached to `δ(r + r′)`). Inserting `M(r, r′) = M⁺δ(r + r′) + M⁻δ(r − r′)`
//! into the coordinate-space equation and matching the two δ-structures
//! gives the coefficient equations
//!
//! ```text
//! M⁺ = J + Jη M⁻,      M⁻ = Jη M⁺,
//! ```
//!
//! solved here through `[I − Kη]⁻¹` with `K = ΛηΛ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, det_2x2, Complex, Matrix2, QuadratureSpec};
use crate::twobody::TwoBodyDress;

/// Smallest admissible half-separation; the kernel diverges as `1/ρ`.
pub const RHO_MIN: f64 = 1e-6;

/// `|det(I − Kη)|` below which a point counts as an exact resonance.
pub const SINGULAR_DET: f64 = 1e-14;

/// Dimensionless half-separation `ρ = rβ` (the bodies are `d = 2r` apart).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Separation(f64);

impl Separation {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_finite() && rho >= RHO_MIN {
            Ok(Self(rho))
        } else {
            Err(Error::Domain(format!(
                "rho must be a finite value >= {RHO_MIN:e}, got {rho}"
            )))
        }
    }

    pub fn rho(self) -> f64 {
        self.0
    }

    /// Full separation `d = 2ρ` in the same units.
    pub fn separation(self) -> f64 {
        2.0 * self.0
    }
}

fn check_t0(t0: f64) -> Result<()> {
    if t0.is_finite() && t0 >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("t0 must be finite and >= 0, got {t0}")))
    }
}

/// Exchange kernel `J(ρ, t₀)` in closed form:
///
/// ```text
/// J = e^{−ρ}(1 − 2/ρ)/(1 + t₀²) − (2/ρ)·[e^{−ρ} + t₀² e^{it₀ρ}]/(1 + t₀²)²
/// ```
pub fn exchange_kernel(rho: Separation, t0: f64) -> Result<Complex> {
    check_t0(t0)?;
    let r = rho.rho();
    let decay = (-r).exp();
    let q = 1.0 + t0 * t0;
    let outgoing = Complex::from_polar(t0 * t0, t0 * r);
    let value = Complex::new(decay * (1.0 - 2.0 / r) / q, 0.0) - (2.0 / r) * (outgoing + decay) / (q * q);
    Ok(value)
}

/// Radial Fourier transform of the light-particle exchange,
///
/// ```text
/// (1/ρ) ∫₀^∞ t sin(tρ) · t²/(1 + t²)² · 1/(t₀² − t² + i0) dt,
/// ```
///
/// by quadrature: a principal value on `[0, 2t₀]`, a regular oscillatory
/// piece on `[2t₀, T]` and a mapped tail, plus the on-shell `−iπ` term.
pub fn exchange_transform(rho: Separation, t0: f64, spec: &QuadratureSpec) -> Result<Complex> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::Domain(format!("transform needs t0 > 0, got {t0}")));
    }
    let r = rho.rho();
    let numerator = |t: f64| {
        let nu = t / (1.0 + t * t);
        t * (t * r).sin() * nu * nu
    };
    let regular = |t: f64| Complex::new(numerator(t) / (t0 * t0 - t * t), 0.0);

    let near = numerics::integrate_pv(numerator, t0, 0.0, 2.0 * t0, spec)?;

    // Resolve the oscillations on a finite stretch; past `cut` the integrand
    // is f(t)·sin(ρt) with smooth f ~ -1/t³, and repeated integration by
    // parts gives the remainder as an asymptotic series in 1/(ρ·cut).
    let cut = 2.0 * t0 + 100.0;
    let oscillatory = QuadratureSpec {
        max_subdivisions: spec.max_subdivisions.max(40_000),
        ..*spec
    };
    let middle = numerics::integrate_adaptive(regular, 2.0 * t0, cut, &oscillatory)?;
    let tail = oscillatory_tail(t0, r, cut);

    let on_shell = PI * numerator(t0) / (2.0 * t0);
    Ok(Complex::new(near + middle.value.re + tail, -on_shell) / r)
}

/// `∫_a^∞ f(t) sin(ρt) dt` for `f(t) = t³/((1+t²)²(t0²-t²))`, from the
/// first three terms of the integration-by-parts series.
fn oscillatory_tail(t0: f64, rho: f64, a: f64) -> f64 {
    let f = |t: f64| t.powi(3) / ((1.0 + t * t).powi(2) * (t0 * t0 - t * t));
    let df = |t: f64| f(t) * (3.0 / t - 4.0 * t / (1.0 + t * t) + 2.0 * t / (t0 * t0 - t * t));
    let h = 1e-3 * a;
    let d2f = (df(a + h) - df(a - h)) / (2.0 * h);
    let (s, c) = (rho * a).sin_cos();
    f(a) * c / rho - df(a) * s / (rho * rho) - d2f * c / rho.powi(3)
}

/// Reference point at which the transform is normalised to the closed form.
pub const ORACLE_REFERENCE: (f64, f64) = (2.0, 0.1);

/// Exchange kernel from the momentum-space transform, with its overall
/// constant fixed by matching [`exchange_kernel`] at [`ORACLE_REFERENCE`].
pub fn exchange_kernel_oracle(rho: Separation, t0: f64, spec: &QuadratureSpec) -> Result<Complex> {
    let (ref_rho, ref_t0) = ORACLE_REFERENCE;
    let ref_sep = Separation::new(ref_rho)?;
    let scale = exchange_kernel(ref_sep, ref_t0)? / exchange_transform(ref_sep, ref_t0, spec)?;
    Ok(scale * exchange_transform(rho, t0, spec)?)
}

/// 2×2 matrix over the light-heavy channels {2, 3}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelMatrix(pub Matrix2);

impl ChannelMatrix {
    /// Exchange structure `Λ` with kernel `j` between distinct channels.
    pub fn exchange(j: Complex) -> Self {
        let zero = Complex::new(0.0, 0.0);
        Self([[zero, j], [j, zero]])
    }

    /// Accepts an arbitrary exchange structure, rejecting any nonzero
    /// diagonal: a channel cannot exchange with itself.
    pub fn from_exchange_entries(m: Matrix2) -> Result<Self> {
        if m[0][0] != Complex::new(0.0, 0.0) || m[1][1] != Complex::new(0.0, 0.0) {
            return Err(Error::NonZeroDiagonal);
        }
        Ok(Self(m))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.0[i][j]
    }

    /// The same operator with channels 2 and 3 relabelled.
    pub fn swap_channels(&self) -> Self {
        let m = self.0;
        Self([[m[1][1], m[1][0]], [m[0][1], m[0][0]]])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|z| *z == Complex::new(0.0, 0.0))
    }
}

/// `K_ij = Σ_l Λ_il η Λ_lj`, using `J(−r) = J(r)` for the S-wave kernel.
pub fn channel_matrix(rho: Separation, t0: f64, dress: &TwoBodyDress) -> Result<ChannelMatrix> {
    let lambda = ChannelMatrix::exchange(exchange_kernel(rho, t0)?);
    Ok(channel_matrix_from(&lambda, dress.eta))
}

fn channel_matrix_from(lambda: &ChannelMatrix, eta: Complex) -> ChannelMatrix {
    let mut k = [[Complex::new(0.0, 0.0); 2]; 2];
    for (i, row) in k.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..2).map(|l| lambda.get(i, l) * eta * lambda.get(l, j)).sum();
        }
    }
    ChannelMatrix(k)
}

/// Connected amplitudes with the determinant of `I − Kη`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MAmplitudes {
    pub m_plus: Complex,
    pub m_minus: Complex,
    pub denominator: Complex,
}

impl MAmplitudes {
    /// Full channel matrix `M_ij`: `M⁻` on the diagonal, `M⁺` off it.
    pub fn channel_matrix(&self) -> ChannelMatrix {
        ChannelMatrix([[self.m_minus, self.m_plus], [self.m_plus, self.m_minus]])
    }
}

/// Solves for `M⁺ = Σ_l [I − Kη]⁻¹_il J_lj (j ≠ i)` and
/// `M⁻ = Σ_l [I − Kη]⁻¹_il K_li`, both taken for channel `i = 2`.
pub fn m_amplitudes(rho: Separation, t0: f64, dress: &TwoBodyDress) -> Result<MAmplitudes> {
    let j = exchange_kernel(rho, t0)?;
    let lambda = ChannelMatrix::exchange(j);
    let k = channel_matrix_from(&lambda, dress.eta);

    let one = Complex::new(1.0, 0.0);
    let mut a = [[Complex::new(0.0, 0.0); 2]; 2];
    for (i, row) in a.iter_mut().enumerate() {
        for (l, entry) in row.iter_mut().enumerate() {
            let delta = if i == l { one } else { Complex::new(0.0, 0.0) };
            *entry = delta - k.get(i, l) * dress.eta;
        }
    }
    let det = det_2x2(&a);
    let singular = || Error::ResonanceSingularity {
        t0,
        rho: rho.rho(),
        det_abs: det.norm(),
    };
    if !(det.norm() >= SINGULAR_DET) {
        return Err(singular());
    }

    let plus = numerics::solve_2x2(&a, &[lambda.get(0, 1), lambda.get(1, 1)]).map_err(|_| singular())?;
    let minus = numerics::solve_2x2(&a, &[k.get(0, 0), k.get(1, 0)]).map_err(|_| singular())?;

    Ok(MAmplitudes {
        m_plus: plus[0],
        m_minus: minus[0],
        denominator: det,
    })
}

/// `M⁺ + M⁻`, the amplitude contracted over the final channel.
pub fn effective_exchange(m: &MAmplitudes) -> Complex {
    m.m_plus + m.m_minus
}
