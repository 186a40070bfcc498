use fadres_core::scanner::{aggregate_curve, regions_from_samples, DEFAULT_REGION_PERCENTILE};
use fadres_core::units::{self, PhysicalScale};
use fadres_core::{find_pair_pole, find_resonances, scan_surface, xi, Complex, PoleKind, ScanGrid, Separation};
use serde_json::{json, Value};

use crate::config::{Axis, Options};
use crate::output::{Cell, Table};
use crate::CliError;

fn complex_cells(z: Complex) -> [Cell; 3] {
    [Cell::Float(z.re), Cell::Float(z.im), Cell::Float(z.norm())]
}

fn point(axis: Option<Axis>, flag: &str) -> Result<f64, CliError> {
    match axis {
        Some(Axis::Point(x)) => Ok(x),
        Some(_) => Err(CliError::Usage(format!("{flag} must be a single value here"))),
        None => Err(CliError::Usage(format!("{flag} is required"))),
    }
}

pub fn xi_point(o: &Options) -> Result<Table, CliError> {
    let coupling = o.coupling()?;
    let t0 = point(o.t0_axis()?, "--t0")?;
    let rho = point(o.rho_axis()?, "--rho")?;
    let factor = xi(coupling, t0, Separation::new(rho)?, o.variant()?)?;

    let mut table = Table::new(&["lambda", "t0", "rho", "re_xi", "im_xi", "abs_xi", "regime"]);
    let mut row = vec![coupling.lambda().into(), t0.into(), rho.into()];
    row.extend(complex_cells(factor.value));
    row.push(factor.regime().as_str().into());
    table.push(row);
    Ok(table)
}

pub fn surface(o: &Options) -> Result<Table, CliError> {
    let t0 = o
        .t0_axis()?
        .ok_or_else(|| CliError::Usage("--t0-range is required".into()))?;
    let rho = o
        .rho_axis()?
        .ok_or_else(|| CliError::Usage("--rho-range is required".into()))?;
    let grid = ScanGrid::new(
        o.coupling()?,
        t0.grid("--t0-range")?,
        rho.grid("--rho-range")?,
        o.variant()?,
    )?;
    let pct = o.percentile.unwrap_or(DEFAULT_REGION_PERCENTILE);
    if !(0.0..=100.0).contains(&pct) {
        return Err(CliError::Usage(format!("--percentile must lie in [0, 100], got {pct}")));
    }

    let samples = scan_surface(&grid);
    let mut table = Table::new(&["t0", "rho", "re_xi", "im_xi", "abs_xi", "denom_abs", "singular_flag"]);
    for s in &samples {
        let mut row = vec![s.t0.into(), s.rho.into()];
        row.extend(complex_cells(s.xi.unwrap_or(Complex::new(f64::NAN, f64::NAN))));
        row.push(s.denom_abs.into());
        row.push(Cell::Int(i64::from(s.singular)));
        table.push(row);
    }
    let regions = regions_from_samples(&grid, &samples, pct);
    eprintln!(
        "surface: {} resonance region(s) below the {pct} percentile",
        regions.len()
    );
    table.meta.insert("regions".into(), json!(regions));
    Ok(table)
}

pub fn big_xi(o: &Options) -> Result<Table, CliError> {
    let coupling = o.coupling()?;
    let rhos = o
        .rho_axis()?
        .ok_or_else(|| CliError::Usage("--rho or --rho-range is required".into()))?
        .values("--rho-range")?;
    let curve = aggregate_curve(
        coupling,
        &rhos,
        o.interval()?,
        &o.quadrature()?,
        o.variant()?,
        o.mode()?,
    );

    let mut table = Table::new(&["rho", "re_Xi", "im_Xi", "abs_Xi"]);
    let mut excluded = Vec::new();
    for factor in curve {
        let factor = factor?;
        let mut row = vec![factor.rho.into()];
        row.extend(complex_cells(factor.value));
        table.push(row);
        if !factor.excluded.is_empty() {
            excluded.push(json!({ "rho": factor.rho, "t0": factor.excluded }));
        }
    }
    table.meta.insert("excluded".into(), Value::Array(excluded));
    Ok(table)
}

/// Default separation window of the resonance search.
pub const RESONANCE_WINDOW: (f64, f64) = (1.0, 6.0);

pub fn resonances(o: &Options) -> Result<Table, CliError> {
    let coupling = o.coupling()?;
    let t0s = o
        .t0_axis()?
        .ok_or_else(|| CliError::Usage("--t0 or --t0-range is required".into()))?
        .values("--t0-range")?;
    let window = match o.rho_axis()? {
        None => RESONANCE_WINDOW,
        Some(Axis::Span { start, stop, .. }) => (start, stop),
        Some(Axis::Point(_)) => return Err(CliError::Usage("resonances takes --rho-range a:b".into())),
    };
    let variant = o.variant()?;
    let spec = o.root_finding()?;

    let mut table = Table::new(&["lambda", "t0", "rho_star", "peak_abs_xi", "fwhm_rho", "residual"]);
    let mut warnings = Vec::new();
    if coupling.lambda() < -1.0 {
        let pole = find_pair_pole(coupling, &spec)?;
        if pole.kind == PoleKind::Bound {
            let msg = format!(
                "lambda = {} supports a two-body bound state (pole at t0 = {}i); listing continuum resonances",
                coupling.lambda(),
                pole.location.im
            );
            eprintln!("warning: {msg}");
            warnings.push(Value::from(msg));
        }
    }
    for t0 in t0s {
        for r in find_resonances(coupling, t0, window, variant, &spec)? {
            table.push(vec![
                r.lambda.into(),
                r.t0.into(),
                r.rho_star.into(),
                r.peak_abs_xi.into(),
                r.fwhm_rho.into(),
                r.residual.into(),
            ]);
        }
    }
    table.meta.insert("warnings".into(), Value::Array(warnings));
    Ok(table)
}

pub fn pole(o: &Options) -> Result<Table, CliError> {
    let coupling = o.coupling()?;
    let mut table = Table::new(&["lambda", "re_t0", "im_t0", "kind"]);
    for p in fadres_core::twobody::pair_poles(coupling, &o.root_finding()?)? {
        table.push(vec![
            coupling.lambda().into(),
            p.location.re.into(),
            p.location.im.into(),
            p.kind.as_str().into(),
        ]);
    }
    Ok(table)
}

pub fn convert(o: &Options) -> Result<Table, CliError> {
    let scale = PhysicalScale::new(o.beta.ok_or_else(|| CliError::Usage("--beta is required".into()))?)?;
    if o.rho.is_none() && o.t0.is_none() {
        return Err(CliError::Usage("convert needs --rho, --t0 or both".into()));
    }
    let mut table = Table::new(&["name", "value", "unit"]);
    if let Some(rho) = o.rho {
        let d = units::rho_to_distance(rho, scale)?;
        table.push(vec!["r".into(), d.r_cm.into(), "cm".into()]);
        table.push(vec!["d".into(), d.d_cm.into(), "cm".into()]);
        table.push(vec!["r".into(), d.r_parsec().into(), "pc".into()]);
        table.push(vec!["r".into(), d.r_light_years().into(), "ly".into()]);
    }
    if let Some(t0) = o.t0 {
        table.push(vec![
            "p0".into(),
            units::t0_to_momentum(t0, scale)?.into(),
            "cm^-1".into(),
        ]);
    }
    Ok(table)
}
