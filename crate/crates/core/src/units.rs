//! Conversion of the dimensionless variables to CGS units.
//!
//! The form-factor range β (cm⁻¹) sets both scales: `r = ρ/β` and `p₀ = t₀β`.

use serde::Serialize;

use crate::error::{Error, Result};

pub const CM_PER_PARSEC: f64 = 3.085_677_581_491_367e18;
pub const CM_PER_LIGHT_YEAR: f64 = 9.460_730_472_580_8e17;

/// Inverse-length range parameter β in cm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalScale {
    beta: f64,
}

impl PhysicalScale {
    pub fn new(beta_per_cm: f64) -> Result<Self> {
        if beta_per_cm.is_finite() && beta_per_cm > 0.0 {
            Ok(Self { beta: beta_per_cm })
        } else {
            Err(Error::Domain(format!(
                "beta must be positive and finite, got {beta_per_cm}"
            )))
        }
    }

    pub fn beta(self) -> f64 {
        self.beta
    }
}

/// Half-separation `r` and full separation `d = 2r`, in cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distance {
    pub r_cm: f64,
    pub d_cm: f64,
}

impl Distance {
    pub fn r_parsec(&self) -> f64 {
        self.r_cm / CM_PER_PARSEC
    }

    pub fn r_light_years(&self) -> f64 {
        self.r_cm / CM_PER_LIGHT_YEAR
    }
}

fn check_non_negative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and >= 0, got {x}")))
    }
}

pub fn rho_to_distance(rho: f64, scale: PhysicalScale) -> Result<Distance> {
    check_non_negative("rho", rho)?;
    let r_cm = rho / scale.beta;
    Ok(Distance { r_cm, d_cm: 2.0 * r_cm })
}

pub fn distance_to_rho(r_cm: f64, scale: PhysicalScale) -> Result<f64> {
    check_non_negative("r", r_cm)?;
    Ok(r_cm * scale.beta)
}

/// Splits the shortest round-trip decimal form of `x` into an integer
/// mantissa and a power of ten.
fn decimal_parts(x: f64) -> (u128, i32) {
    let sci = format!("{:e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("LowerExp always has an exponent");
    let mut exp: i32 = exp.parse().expect("LowerExp exponent is an integer");
    let digits = match mantissa.split_once('.') {
        Some((int, frac)) => {
            exp -= frac.len() as i32;
            format!("{int}{frac}")
        }
        None => mantissa.to_owned(),
    };
    (digits.parse().expect("at most 17 decimal digits"), exp)
}

/// `a·b` formed exactly on the decimal forms of both operands, then rounded
/// once. Keeps products of literals such as 0.1 × 1e-22 at the nearest
/// double to the decimal result.
fn decimal_product(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let (ma, ea) = decimal_parts(a);
    let (mb, eb) = decimal_parts(b);
    let magnitude: f64 = format!("{}e{}", ma * mb, ea + eb).parse().expect("valid float literal");
    magnitude.copysign(a * b)
}

/// Dark-particle wavenumber `p₀ = t₀β` in cm⁻¹.
pub fn t0_to_momentum(t0: f64, scale: PhysicalScale) -> Result<f64> {
    check_non_negative("t0", t0)?;
    Ok(decimal_product(t0, scale.beta))
}

pub fn momentum_to_t0(p0: f64, scale: PhysicalScale) -> Result<f64> {
    check_non_negative("p0", p0)?;
    Ok(p0 / scale.beta)
}
