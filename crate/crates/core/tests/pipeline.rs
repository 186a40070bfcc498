use fadres_core::enhancement::{big_xi, xi, Variant, DEFAULT_INTERVAL};
use fadres_core::numerics::{integrate_adaptive, Complex, QuadratureSpec, RootFindSpec};
use fadres_core::scanner::{find_resonance_regions, find_resonances, scan_surface, GridRange, ScanGrid};
use fadres_core::threebody::Separation;
use fadres_core::twobody::{amplification, pair_poles, Coupling, PoleKind};

fn lam(x: f64) -> Coupling {
    Coupling::new(x).unwrap()
}

fn sep(rho: f64) -> Separation {
    Separation::new(rho).unwrap()
}

#[test]
fn surface_samples_match_point_evaluation() {
    let grid = ScanGrid::new(
        lam(-0.9),
        GridRange::new(0.01, 0.5, 6).unwrap(),
        GridRange::new(1.0, 12.0, 23).unwrap(),
        Variant::Diagonal,
    )
    .unwrap();
    for s in scan_surface(&grid) {
        let point = xi(lam(-0.9), s.t0, sep(s.rho), Variant::Diagonal).unwrap().value;
        assert_eq!(s.xi, Some(point));
    }
}

#[test]
fn resonance_line_falls_inside_a_region() {
    let grid = ScanGrid::new(
        lam(-0.95),
        GridRange::new(0.001, 0.6, 120).unwrap(),
        GridRange::new(1.0, 6.0, 200).unwrap(),
        Variant::Summed,
    )
    .unwrap();
    let regions = find_resonance_regions(&grid);
    let found = find_resonances(lam(-0.95), 0.12, (1.0, 6.0), Variant::Summed, &RootFindSpec::default()).unwrap();
    assert_eq!(found.len(), 1);
    let r = found[0];
    assert!(regions.iter().any(|g| {
        (g.rho_window.0..=g.rho_window.1).contains(&r.rho_star) && (g.t0_window.0..=g.t0_window.1).contains(&0.12)
    }));
}

#[test]
fn aggregate_far_field_is_the_two_body_mean() {
    // Ξ_∞: the mean of 1 + I(t0)η(t0) over the interval, with J = 0.
    let (a, b) = DEFAULT_INTERVAL;
    let spec = QuadratureSpec::default();
    let born = |t0: f64| {
        let d = amplification(lam(-0.95), Complex::new(t0, 0.0)).unwrap();
        1.0 + d.loop_integral * d.eta
    };
    let limit = integrate_adaptive(born, a, b, &spec).unwrap().value / (b - a);
    let near = big_xi(lam(-0.95), sep(50.0), DEFAULT_INTERVAL, &spec, Variant::Summed).unwrap();
    let far = big_xi(lam(-0.95), sep(500.0), DEFAULT_INTERVAL, &spec, Variant::Summed).unwrap();
    let e50 = (near.value - limit).norm() / limit.norm();
    let e500 = (far.value - limit).norm() / limit.norm();
    assert!(e50 < 0.05, "{e50}");
    assert!(e500 < e50, "{e500} vs {e50}");
}

#[test]
fn pole_kinds_across_couplings() {
    let spec = RootFindSpec::default();
    let kinds = |l: f64| -> Vec<PoleKind> { pair_poles(lam(l), &spec).unwrap().iter().map(|p| p.kind).collect() };
    assert!(kinds(-3.0).contains(&PoleKind::Bound));
    assert_eq!(kinds(-1.0), vec![PoleKind::Threshold]);
    assert_eq!(kinds(-0.5), vec![PoleKind::Resonance, PoleKind::Resonance]);
    assert!(!kinds(2.0).contains(&PoleKind::Bound));
}
