//! Enhancement factor of the heavy-heavy interaction due to the exchanged
//! light particle.
//!
//! The factor is the ratio of dressed to bare heavy-heavy matrix elements,
//!
//! ```text
//! ξ = 1 + I(t₀) η_i (δ_ij + M_ij η_j),
//! ```
//!
//! in which the bare potential cancels. The free channel indices admit three
//! contractions, see [`Variant`]. Re ξ > 1 reads as amplified attraction and
//! Re ξ < 0 as a reversal of the force.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, Complex, QuadratureSpec};
use crate::threebody::{self, Separation};
use crate::twobody::{self, Coupling, TwoBodyDress};

/// Contraction of the channel indices in ξ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Sum over the final channel: `1 + Iη/(1 − Jη)`.
    #[default]
    Summed,
    /// `i = j`: `1 + Iη/(1 − J²η²)`.
    Diagonal,
    /// `i ≠ j`: `1 + IJη²/(1 − J²η²)`.
    OffDiagonal,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Summed, Variant::Diagonal, Variant::OffDiagonal];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Summed => "summed",
            Variant::Diagonal => "diagonal",
            Variant::OffDiagonal => "offdiag",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "summed" => Ok(Variant::Summed),
            "diagonal" => Ok(Variant::Diagonal),
            "offdiag" | "off_diagonal" | "off-diagonal" => Ok(Variant::OffDiagonal),
            other => Err(Error::Domain(format!(
                "unknown variant '{other}' (expected summed, diagonal or offdiag)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnhancementFactor {
    pub value: Complex,
    pub variant: Variant,
    pub lambda: f64,
    pub t0: f64,
    pub rho: f64,
}

impl EnhancementFactor {
    pub fn regime(&self) -> Regime {
        classify(self)
    }
}

/// ξ at one kinematic point, contracted explicitly from the channel matrix
/// `M_ij` obtained through the 2×2 solve.
pub fn xi(coupling: Coupling, t0: f64, rho: Separation, variant: Variant) -> Result<EnhancementFactor> {
    let dress = twobody::amplification(coupling, Complex::new(t0, 0.0))?;
    let m = threebody::m_amplitudes(rho, t0, &dress)?.channel_matrix();
    let eta = dress.eta;
    let one = Complex::new(1.0, 0.0);

    // Initial channel i = 2 (index 0); the result is channel-symmetric.
    let contraction = match variant {
        Variant::Summed => (0..2)
            .map(|j| {
                if j == 0 {
                    one + m.get(0, j) * eta
                } else {
                    m.get(0, j) * eta
                }
            })
            .sum(),
        Variant::Diagonal => one + m.get(0, 0) * eta,
        Variant::OffDiagonal => m.get(0, 1) * eta,
    };

    Ok(EnhancementFactor {
        value: one + dress.loop_integral * eta * contraction,
        variant,
        lambda: coupling.lambda(),
        t0,
        rho: rho.rho(),
    })
}

/// Resonance denominator of each contraction: `1 − Jη` for
/// [`Variant::Summed`], `1 − J²η²` otherwise.
pub fn denominator(dress: &TwoBodyDress, j: Complex, variant: Variant) -> Complex {
    let x = j * dress.eta;
    match variant {
        Variant::Summed => 1.0 - x,
        Variant::Diagonal | Variant::OffDiagonal => 1.0 - x * x,
    }
}

/// Reduced closed forms of the three contractions.
pub fn xi_closed_form(coupling: Coupling, t0: f64, rho: Separation, variant: Variant) -> Result<Complex> {
    let dress = twobody::amplification(coupling, Complex::new(t0, 0.0))?;
    let j = threebody::exchange_kernel(rho, t0)?;
    Ok(closed_form(&dress, j, variant))
}

pub(crate) fn closed_form(dress: &TwoBodyDress, j: Complex, variant: Variant) -> Complex {
    let born = dress.loop_integral * dress.eta;
    let denom = denominator(dress, j, variant);
    match variant {
        Variant::Summed | Variant::Diagonal => 1.0 + born / denom,
        Variant::OffDiagonal => 1.0 + born * j * dress.eta / denom,
    }
}

/// Character of the effective heavy-heavy force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AmplifiedAttraction,
    Suppressed,
    Repulsive,
}

impl Regime {
    /// Re ξ > 1 amplified, 0 <= Re ξ <= 1 suppressed, Re ξ < 0 repulsive.
    pub fn from_value(value: Complex) -> Self {
        if value.re > 1.0 {
            Regime::AmplifiedAttraction
        } else if value.re >= 0.0 {
            Regime::Suppressed
        } else {
            Regime::Repulsive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::AmplifiedAttraction => "amplified_attraction",
            Regime::Suppressed => "suppressed",
            Regime::Repulsive => "repulsive",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(xi: &EnhancementFactor) -> Regime {
    Regime::from_value(xi.value)
}

/// How ξ is aggregated over the t₀ interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateMode {
    /// `(1/(b − a)) ∫ ξ dt₀`.
    #[default]
    Mean,
    /// `∫ ξ dt₀`.
    Integral,
}

/// Default t₀ interval of the aggregate.
pub const DEFAULT_INTERVAL: (f64, f64) = (0.001, 0.6);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateFactor {
    pub value: Complex,
    pub rho: f64,
    pub interval: (f64, f64),
    pub mode: AggregateMode,
    /// Quadrature nodes that landed on a singular point and were evaluated
    /// at a slightly shifted t₀ instead.
    pub excluded: Vec<f64>,
}

/// Ξ(ρ): ξ averaged over `t₀ ∈ interval`.
pub fn big_xi(
    coupling: Coupling,
    rho: Separation,
    interval: (f64, f64),
    spec: &QuadratureSpec,
    variant: Variant,
) -> Result<AggregateFactor> {
    big_xi_with_mode(coupling, rho, interval, spec, variant, AggregateMode::Mean)
}

pub fn big_xi_with_mode(
    coupling: Coupling,
    rho: Separation,
    interval: (f64, f64),
    spec: &QuadratureSpec,
    variant: Variant,
    mode: AggregateMode,
) -> Result<AggregateFactor> {
    let (a, b) = interval;
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::Domain(format!(
            "t0 interval must satisfy 0 < a < b, got [{a}, {b}]"
        )));
    }
    let width = b - a;
    let normalise = |integral: Complex| match mode {
        AggregateMode::Mean => integral / width,
        AggregateMode::Integral => integral,
    };

    if coupling.is_free() {
        let value = match mode {
            AggregateMode::Mean => Complex::new(1.0, 0.0),
            AggregateMode::Integral => Complex::new(width, 0.0),
        };
        return Ok(AggregateFactor {
            value,
            rho: rho.rho(),
            interval,
            mode,
            excluded: Vec::new(),
        });
    }

    let excluded = RefCell::new(Vec::new());
    let failed = RefCell::new(Vec::new());
    let integrand = |t0: f64| -> Result<Complex> {
        match xi(coupling, t0, rho, variant) {
            Ok(x) => Ok(x.value),
            Err(Error::EtaPole { .. } | Error::ResonanceSingularity { .. }) => {
                let shifted = t0 * (1.0 + 1e-9);
                match xi(coupling, shifted, rho, variant) {
                    Ok(x) => {
                        excluded.borrow_mut().push(t0);
                        Ok(x.value)
                    }
                    Err(e) => {
                        failed.borrow_mut().push(t0);
                        Err(e)
                    }
                }
            }
            Err(e) => Err(e),
        }
    };

    let result = numerics::try_integrate_adaptive(integrand, a, b, spec);
    let failed = failed.into_inner();
    if !failed.is_empty() {
        return Err(Error::SingularPath { t0: failed });
    }
    let integral = result?.value;
    let mut excluded = excluded.into_inner();
    excluded.sort_by(f64::total_cmp);
    excluded.dedup();

    Ok(AggregateFactor {
        value: normalise(integral),
        rho: rho.rho(),
        interval,
        mode,
        excluded,
    })
}
