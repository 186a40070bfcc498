//! Light-heavy pair subsystem with the rank-one separable interaction
//! `V = |ν⟩λ⟨ν|` and S-wave form factor `ν(t) ∝ t/(1 + t²)`.
//!
//! Momenta are in units of the form-factor range, `t = p/β`. The loop
//! integral is normalised to `I(0) = 1`, which makes λ dimensionless: λ < 0
//! is attractive and λ < −1 binds.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, Complex, QuadratureSpec, RootFindSpec};

/// Dimensionless strength λ of the light-heavy pair force.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Coupling(f64);

impl Coupling {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() {
            Ok(Self(lambda))
        } else {
            Err(Error::Domain(format!("coupling must be finite, got {lambda}")))
        }
    }

    pub fn lambda(self) -> f64 {
        self.0
    }

    pub fn is_free(self) -> bool {
        self.0 == 0.0
    }
}

/// `t/(1 + t²)`; the `4π/(μβ)` normalisation is absorbed into `I(0) = 1`.
pub fn form_factor(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("form factor needs t >= 0, got {t}")));
    }
    Ok(t / (1.0 + t * t))
}

fn loop_unchecked(t0: Complex) -> Complex {
    let i = Complex::i();
    let w = Complex::new(1.0, 0.0) - i * t0;
    (Complex::new(1.0, 0.0) - 2.0 * i * t0) / (w * w)
}

/// Closed-form loop integral `I(t₀) = (1 − 2it₀)/(1 − it₀)²`.
///
/// Defined on the principal branch `Re(1 − it₀) > 0`, i.e. `Im t₀ > −1`.
pub fn propagator_loop(t0: Complex) -> Result<Complex> {
    if !(1.0 + t0.im > 0.0) || !t0.re.is_finite() {
        return Err(Error::Branch { re: t0.re, im: t0.im });
    }
    Ok(loop_unchecked(t0))
}

/// Loop integral evaluated by quadrature from its momentum-space definition,
///
/// ```text
/// I(t₀) = −(4/π) ∫₀^∞ t⁴ / [(1 + t²)² (t₀² − t² + i0)] dt,
/// ```
///
/// as a principal value plus the on-shell term `−iπ·t₀³/(2(1 + t₀²)²)`
/// inside the bracket. Independent of [`propagator_loop`].
pub fn propagator_loop_oracle(t0: f64, spec: &QuadratureSpec) -> Result<Complex> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::Domain(format!("oracle needs 0 < t0 < inf, got {t0}")));
    }
    let numerator = |t: f64| {
        let nu = t / (1.0 + t * t);
        t * t * nu * nu
    };

    let near = numerics::integrate_pv(numerator, t0, 0.0, 2.0 * t0, spec)?;
    let far =
        numerics::integrate_semi_infinite(|t| Complex::new(numerator(t) / (t0 * t0 - t * t), 0.0), 2.0 * t0, spec)?;
    let on_shell = PI * numerator(t0) / (2.0 * t0);

    Ok(Complex::new(near + far.value.re, -on_shell) * (-4.0 / PI))
}

/// Loop integral and amplification coefficient `η = λ/(1 + λI)` at one t₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoBodyDress {
    pub loop_integral: Complex,
    pub eta: Complex,
    pub coupling: Coupling,
}

/// Dresses the pair interaction at momentum `t0`.
///
/// The free limit λ = 0 gives `η = 0` exactly. A vanishing `1 + λI` is the
/// two-body pole and is returned as [`Error::EtaPole`].
pub fn amplification(coupling: Coupling, t0: Complex) -> Result<TwoBodyDress> {
    let loop_integral = propagator_loop(t0)?;
    let lambda = coupling.lambda();
    if lambda == 0.0 {
        return Ok(TwoBodyDress {
            loop_integral,
            eta: Complex::new(0.0, 0.0),
            coupling,
        });
    }
    let denom = 1.0 + lambda * loop_integral;
    if denom.norm() < 1e-12 {
        return Err(Error::EtaPole {
            t0: t0.re,
            denom_abs: denom.norm(),
        });
    }
    Ok(TwoBodyDress {
        loop_integral,
        eta: lambda / denom,
        coupling,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleKind {
    /// `t₀ = iτ`, τ > 0.
    Bound,
    /// `t₀ = iτ`, τ < 0.
    Virtual,
    /// Off the imaginary axis, lower half plane.
    Resonance,
    /// `t₀ = 0`.
    Threshold,
}

impl PoleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PoleKind::Bound => "bound",
            PoleKind::Virtual => "virtual",
            PoleKind::Resonance => "resonance",
            PoleKind::Threshold => "threshold",
        }
    }
}

impl std::fmt::Display for PoleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pole of the pair amplitude in the complex t₀ plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairPole {
    pub location: Complex,
    pub kind: PoleKind,
    /// Linear near-threshold estimate `τ ≈ −(1 + λ)` of the imaginary-axis
    /// pole, kept for comparison with the exact root.
    pub linear_tau_estimate: f64,
}

const AXIS_TOL: f64 = 1e-12;

fn classify_location(t: Complex) -> PoleKind {
    if t.norm() <= AXIS_TOL {
        PoleKind::Threshold
    } else if t.re.abs() <= AXIS_TOL * t.norm() {
        if t.im > 0.0 {
            PoleKind::Bound
        } else {
            PoleKind::Virtual
        }
    } else {
        PoleKind::Resonance
    }
}

/// All zeros of `1/λ + I(t₀)` on the principal branch.
///
/// Writing `t₀ = is` turns the condition into the quadratic
/// `s² + 2s(1 + λ) + (1 + λ) = 0`. Its roots are refined by complex Newton
/// on the original equation and sorted by descending `Im t₀`, then `Re t₀`.
pub fn pair_poles(coupling: Coupling, spec: &RootFindSpec) -> Result<Vec<PairPole>> {
    let lambda = coupling.lambda();
    if lambda == 0.0 {
        return Err(Error::Domain("the free coupling has no pair pole".into()));
    }
    let a = 1.0 + lambda;
    let root = Complex::new(a * lambda, 0.0).sqrt();
    let candidates = [-a + root, -a - root];

    let condition = |z: Complex| 1.0 / lambda + loop_unchecked(z);
    let mut poles = Vec::with_capacity(2);
    for s in candidates {
        if !(1.0 + s.re > 0.0) {
            continue;
        }
        let closed = Complex::i() * s;
        let location = if closed.norm() <= AXIS_TOL {
            Complex::new(0.0, 0.0)
        } else {
            match numerics::find_root_complex(condition, closed, spec) {
                Ok(z) if (z - closed).norm() < 1e-6 * closed.norm().max(1.0) => z,
                _ => closed,
            }
        };
        let kind = classify_location(location);
        // Snap axis poles so classification and reporting agree.
        let location = match kind {
            PoleKind::Threshold => Complex::new(0.0, 0.0),
            PoleKind::Bound | PoleKind::Virtual => Complex::new(0.0, location.im),
            PoleKind::Resonance => location,
        };
        if poles
            .iter()
            .any(|p: &PairPole| (p.location - location).norm() <= AXIS_TOL)
        {
            continue;
        }
        poles.push(PairPole {
            location,
            kind,
            linear_tau_estimate: -a,
        });
    }
    poles.sort_by(|x, y| {
        y.location
            .im
            .total_cmp(&x.location.im)
            .then(y.location.re.total_cmp(&x.location.re))
    });
    Ok(poles)
}

/// The physically leading pair pole: a bound state if one exists, else the
/// threshold pole, else the resonance with `Re t₀ > 0`, else a virtual level.
pub fn find_pair_pole(coupling: Coupling, spec: &RootFindSpec) -> Result<PairPole> {
    let poles = pair_poles(coupling, spec)?;
    let rank = |k: PoleKind| match k {
        PoleKind::Bound => 0,
        PoleKind::Threshold => 1,
        PoleKind::Resonance => 2,
        PoleKind::Virtual => 3,
    };
    poles
        .into_iter()
        .filter(|p| p.kind != PoleKind::Resonance || p.location.re > 0.0)
        .min_by_key(|p| rank(p.kind))
        .ok_or(Error::NoPoleFound {
            lambda: coupling.lambda(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn lam(x: f64) -> Coupling {
        Coupling::new(x).unwrap()
    }

    #[test]
    fn form_factor_values() {
        assert_eq!(form_factor(0.0).unwrap(), 0.0);
        assert_eq!(form_factor(1.0).unwrap(), 0.5);
        assert_eq!(form_factor(2.0).unwrap(), 0.4);
        assert!(form_factor(-0.1).is_err());
    }

    #[test]
    fn loop_closed_form_values() {
        assert_eq!(propagator_loop(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let one = propagator_loop(c(1.0, 0.0)).unwrap();
        assert!((one - c(1.0, 0.5)).norm() < 1e-15);
        let half = propagator_loop(c(0.5, 0.0)).unwrap();
        assert!((half - c(1.12, 0.16)).norm() < 1e-15);
    }

    #[test]
    fn loop_branch_violation() {
        assert!(matches!(propagator_loop(c(0.0, -1.0)), Err(Error::Branch { .. })));
        assert!(matches!(propagator_loop(c(0.3, -2.0)), Err(Error::Branch { .. })));
    }

    #[test]
    fn oracle_prefactor_reproduces_unit_normalisation() {
        let spec = QuadratureSpec::default();
        for t0 in [1e-3, 1e-4] {
            let v = propagator_loop_oracle(t0, &spec).unwrap();
            assert!((v - c(1.0, 0.0)).norm() < 10.0 * t0 * t0, "t0 = {t0}: {v}");
        }
    }

    #[test]
    fn oracle_matches_closed_form() {
        let spec = QuadratureSpec::default();
        for t0 in [0.1, 0.25, 0.5, 1.0, 2.0, 4.0] {
            let exact = propagator_loop(c(t0, 0.0)).unwrap();
            let quad = propagator_loop_oracle(t0, &spec).unwrap();
            assert!(
                (quad - exact).norm() / exact.norm() <= 1e-6,
                "t0 = {t0}: {quad} vs {exact}"
            );
        }
    }

    #[test]
    fn amplification_examples() {
        let free = amplification(lam(0.0), c(0.3, 0.0)).unwrap();
        assert_eq!(free.eta, c(0.0, 0.0));

        let at_zero = amplification(lam(-0.95), c(0.0, 0.0)).unwrap();
        assert!((at_zero.eta - c(-19.0, 0.0)).norm() < 1e-12);

        let d = amplification(lam(-0.95), c(0.12, 0.0)).unwrap();
        assert!((d.eta.re + 25.5).abs() < 0.1, "{}", d.eta);
        assert!((d.eta.im + 2.2).abs() < 0.05, "{}", d.eta);
    }

    #[test]
    fn eta_pole_is_reported() {
        // λ = -1 at t0 = 0: 1 + λ·I(0) = 0.
        let err = amplification(lam(-1.0), c(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::EtaPole { .. }));
    }

    #[test]
    fn threshold_pole() {
        let p = find_pair_pole(lam(-1.0), &RootFindSpec::default()).unwrap();
        assert_eq!(p.kind, PoleKind::Threshold);
        assert_eq!(p.location, c(0.0, 0.0));
    }

    #[test]
    fn bound_pole_at_lambda_minus_two() {
        let spec = RootFindSpec::default();
        let p = find_pair_pole(lam(-2.0), &spec).unwrap();
        assert_eq!(p.kind, PoleKind::Bound);
        assert!((p.location - c(0.0, 1.0 + 2f64.sqrt())).norm() < 1e-10);
        // Independent route: Newton on 1/λ + I from a rough guess.
        let z = numerics::find_root_complex(|z| -0.5 + loop_unchecked(z), c(0.0, 2.0), &spec).unwrap();
        assert!((z - p.location).norm() < 1e-10);
        assert_eq!(p.linear_tau_estimate, 1.0);
    }

    #[test]
    fn resonance_pair_for_intermediate_attraction() {
        let spec = RootFindSpec::default();
        let poles = pair_poles(lam(-0.75), &spec).unwrap();
        assert_eq!(poles.len(), 2);
        assert!(poles.iter().all(|p| p.kind == PoleKind::Resonance));
        assert!((poles[0].location.re + poles[1].location.re).abs() < 1e-12);
        let lead = find_pair_pole(lam(-0.75), &spec).unwrap();
        assert!(lead.location.re > 0.0);
        assert!((lead.location - c((0.75f64 * 0.25).sqrt(), -0.25)).norm() < 1e-12);
        // It solves 1/λ + I = 0 through an independent Newton run.
        let z = numerics::find_root_complex(|z| 1.0 / -0.75 + loop_unchecked(z), c(0.5, -0.2), &spec).unwrap();
        assert!((z - lead.location).norm() < 1e-10);
    }

    #[test]
    fn newton_reaches_threshold_root() {
        let spec = RootFindSpec::default();
        let z = numerics::find_root_complex(|z| -1.0 + loop_unchecked(z), c(0.0, 0.1), &spec).unwrap();
        assert!(z.norm() < 1e-5, "{z}");
    }

    #[test]
    fn free_coupling_has_no_pole() {
        assert!(find_pair_pole(lam(0.0), &RootFindSpec::default()).is_err());
    }

    #[test]
    fn bound_tau_grows_with_attraction() {
        let spec = RootFindSpec::default();
        let mut last = 0.0;
        for k in 0..=199 {
            let l = -1.01 - (3.0 - 1.01) * k as f64 / 199.0;
            let p = find_pair_pole(lam(l), &spec).unwrap();
            assert_eq!(p.kind, PoleKind::Bound);
            assert!(p.location.im > last, "lambda = {l}");
            last = p.location.im;
        }
    }

    proptest! {
        #[test]
        fn optical_identity(t0 in 1e-6f64..=5.0) {
            let v = propagator_loop(c(t0, 0.0)).unwrap();
            let expect = 2.0 * t0.powi(3) / (1.0 + t0 * t0).powi(2);
            prop_assert!((v.im - expect).abs() <= 1e-12);
        }

        #[test]
        fn separable_inverse(l in -5.0f64..5.0, t0 in 0.0f64..5.0) {
            prop_assume!(l.abs() > 1e-3);
            let d = amplification(lam(l), c(t0, 0.0)).unwrap();
            let recovered = 1.0 / d.eta - 1.0 / l;
            prop_assert!((recovered - d.loop_integral).norm() <= 1e-12 * (1.0 + 1.0 / l.abs()));
        }
    }
}
