use std::path::Path;
use std::sync::Arc;

use kinsplit_core::dynamics::{
    cn_propagate, gaussian_evolve, gaussian_grid_for, pib_evolve, GAUSSIAN_DT, PIB_DT,
};
use kinsplit_core::functionals::{fit_parabola, pointwise_residual, variational_scan};
use kinsplit_core::hydrogenic::{analytic_values, grid_for, orbital, OrbitalSpec};
use kinsplit_core::qstate::density;
use kinsplit_core::quadgrid::RADIAL_EPS;
use kinsplit_core::{
    decompose, Complex64, DecompositionReport, Grid, Grid1D, Grid2D, PibSuperposition, RealField,
    Wavefunction,
};
use serde::Serialize;

use crate::args::{
    Command, GaussianArgs, GridArgs, HydrogenArgs, OrbitalArgs, OutputArgs, PibArgs, ScanArgs, SystemKind,
};
use crate::error::{CliError, CliResult};
use crate::output::{csv_table, json_document, with_suffix, Artifact};

const THETA_POINTS: usize = 1001;
const RADIAL_SPACING: f64 = 60.0 / 4000.0;
const GAUSSIAN_SPACING: f64 = 0.03;
const PIB_POINTS: usize = 2001;
/// Relative bound on `|T − T_C − T_W|` checked before anything is written.
pub const SPLIT_TOLERANCE: f64 = 1e-8;

pub fn execute(command: Command) -> CliResult<Vec<Artifact>> {
    match command {
        Command::Hydrogen(a) => hydrogen(&a),
        Command::Pib(a) => pib(&a),
        Command::Gaussian(a) => gaussian(&a),
        Command::Scan(a) => scan(&a),
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn ensure_split(label: &str, t: f64, t_c: f64, t_w: f64) -> CliResult<()> {
    let defect = (t - t_c - t_w).abs();
    if defect <= SPLIT_TOLERANCE * t.abs() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!(
            "{label}: |T - T_C - T_W| = {defect:e} exceeds {SPLIT_TOLERANCE:e} T (T = {t:e})"
        )))
    }
}

fn odd_points(span: f64, spacing: f64) -> usize {
    let n = (span / spacing).ceil().max(2.0) as usize + 1;
    n + (n + 1) % 2
}

fn check_times(times: &[f64]) -> CliResult<()> {
    match times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        Some(t) => Err(invalid(format!("time {t} rejected: times must be finite and >= 0"))),
        None => Ok(()),
    }
}

fn reject_polar_flags(g: &GridArgs) -> CliResult<()> {
    if g.rmax.is_some() || g.theta_points.is_some() {
        return Err(invalid("--rmax and --theta-points apply only to hydrogen states"));
    }
    Ok(())
}

fn reject_line_flags(g: &GridArgs) -> CliResult<()> {
    if g.xmin.is_some() || g.xmax.is_some() {
        return Err(invalid("--xmin and --xmax apply only to 1D systems; use --rmax"));
    }
    Ok(())
}

fn orbital_spec(o: &OrbitalArgs) -> CliResult<OrbitalSpec> {
    let get = |v: Option<i64>, name: &str| v.ok_or_else(|| invalid(format!("--{name} is required")));
    Ok(OrbitalSpec::new(get(o.n, "n")?, get(o.l, "l")?, get(o.m, "m")?)?)
}

fn hydrogen_grid(spec: OrbitalSpec, g: &GridArgs) -> CliResult<Arc<Grid>> {
    reject_line_flags(g)?;
    let default = grid_for(spec.n(), THETA_POINTS)?;
    let r_max = g.rmax.unwrap_or(default.r().max());
    let r_points = match (g.points, g.rmax) {
        (Some(p), _) => p,
        (None, Some(r)) if r.is_finite() && r > RADIAL_EPS => odd_points(r - RADIAL_EPS, RADIAL_SPACING),
        _ => default.r().len(),
    };
    let theta = g.theta_points.unwrap_or(THETA_POINTS);
    Ok(Arc::new(Grid2D::with_extent(r_max, r_points, theta)?.into()))
}

fn box_state(coeffs: &[f64], g: &GridArgs) -> CliResult<(PibSuperposition, Arc<Grid>)> {
    reject_polar_flags(g)?;
    if let Some(x0) = g.xmin {
        if x0 != 0.0 {
            return Err(invalid(format!("--xmin {x0} rejected: the box grid starts at its left wall, 0")));
        }
    }
    let length = g.xmax.unwrap_or(1.0);
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(invalid("--coeffs must be finite and not all zero"));
    }
    let c = coeffs.iter().map(|&c| Complex64::new(c / norm, 0.0)).collect();
    let s = PibSuperposition::new(length, c)?;
    let grid = Grid1D::new(0.0, length, g.points.unwrap_or(PIB_POINTS))?;
    Ok((s, Arc::new(grid.into())))
}

fn gaussian_line(t_max: f64, g: &GridArgs) -> CliResult<Arc<Grid>> {
    reject_polar_flags(g)?;
    let default = gaussian_grid_for(t_max);
    let grid = if g.xmin.is_none() && g.xmax.is_none() && g.points.is_none() {
        default
    } else {
        let xmin = g.xmin.unwrap_or(default.min());
        let xmax = g.xmax.unwrap_or(default.max());
        let points = match g.points {
            Some(p) => p,
            None if xmax > xmin && (xmax - xmin).is_finite() => odd_points(xmax - xmin, GAUSSIAN_SPACING),
            None => 0,
        };
        Grid1D::new(xmin, xmax, points)?
    };
    Ok(Arc::new(grid.into()))
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Serialize)]
struct PolarGridInfo {
    r_min: f64,
    r_max: f64,
    r_points: usize,
    theta_points: usize,
}

#[derive(Serialize)]
struct LineGridInfo {
    xmin: f64,
    xmax: f64,
    points: usize,
}

#[derive(Serialize)]
#[serde(untagged)]
enum GridInfo {
    Polar(PolarGridInfo),
    Line(LineGridInfo),
}

impl GridInfo {
    fn of(grid: &Grid) -> Self {
        match grid {
            Grid::Polar(g) => GridInfo::Polar(PolarGridInfo {
                r_min: g.r().min(),
                r_max: g.r().max(),
                r_points: g.r().len(),
                theta_points: g.theta().len(),
            }),
            Grid::Line(g) => GridInfo::Line(LineGridInfo {
                xmin: g.min(),
                xmax: g.max(),
                points: g.len(),
            }),
        }
    }
}

#[derive(Serialize)]
struct HydrogenSummary {
    n: u32,
    l: u32,
    m: i32,
    #[serde(rename = "T_C")]
    t_c: f64,
    #[serde(rename = "T_W")]
    t_w: f64,
    #[serde(rename = "T")]
    t: f64,
    fisher: f64,
    shannon: f64,
    #[serde(rename = "analytic_T_C")]
    analytic_t_c: f64,
    #[serde(rename = "analytic_T_W")]
    analytic_t_w: f64,
    max_pointwise_residual: f64,
    grid: GridInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
}

fn hydrogen(a: &HydrogenArgs) -> CliResult<Vec<Artifact>> {
    let spec = orbital_spec(&a.orbital)?;
    let grid = hydrogen_grid(spec, &a.grid)?;
    let w = orbital(spec, &grid)?;
    let r = decompose(&w)?;
    ensure_split(&spec.to_string(), r.kinetic, r.classical, r.weizsacker)?;
    let residual = pointwise_residual(&w)?;
    let (analytic_t_c, analytic_t_w, _) = analytic_values(spec);

    let OutputArgs { out, format } = &a.output;
    let csv_path = with_suffix(out, ".csv");
    let mut files = Vec::new();
    if format.csv() {
        files.push(csv_table(
            csv_path.clone(),
            &["r", "t_c", "t_w", "t"],
            &[&r.abscissa, &r.integrand_tc, &r.integrand_tw, &r.integrand_t],
        )?);
    }
    if format.json() {
        let summary = HydrogenSummary {
            n: spec.n(),
            l: spec.l(),
            m: spec.m(),
            t_c: r.classical,
            t_w: r.weizsacker,
            t: r.kinetic,
            fisher: r.fisher,
            shannon: r.shannon,
            analytic_t_c,
            analytic_t_w,
            max_pointwise_residual: residual,
            grid: GridInfo::of(&grid),
            csv: format.csv().then(|| file_name(&csv_path)),
        };
        files.push(json_document(with_suffix(out, ".json"), &summary)?);
    }
    Ok(files)
}

#[derive(Serialize)]
struct SeriesEntry {
    t: f64,
    #[serde(rename = "T")]
    kinetic: f64,
    #[serde(rename = "T_C")]
    classical: f64,
    #[serde(rename = "T_W")]
    weizsacker: f64,
    fisher: f64,
    shannon: f64,
    max_pointwise_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_l2_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
}

#[derive(Serialize)]
struct SeriesSummary {
    system: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    box_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<f64>>,
    grid: GridInfo,
    series: Vec<SeriesEntry>,
}

/// Crank–Nicolson from `w0` to time `t` in steps no longer than `dt`.
fn oracle_residual(w0: &Wavefunction, exact: &Wavefunction, t: f64, dt: f64) -> CliResult<f64> {
    let steps = (t / dt).ceil() as usize;
    if steps == 0 {
        return Ok(w0.l2_distance(exact)?);
    }
    let v = RealField::zeros(w0.grid().len());
    let w = cn_propagate(w0, &v, t / steps as f64, steps)?;
    Ok(w.l2_distance(exact)?)
}

fn time_series(
    system: &'static str,
    times: &[f64],
    oracle_dt: Option<f64>,
    state: impl Fn(f64) -> kinsplit_core::Result<Wavefunction>,
    out: &OutputArgs,
) -> CliResult<(Vec<SeriesEntry>, Vec<Artifact>)> {
    let initial = match oracle_dt {
        Some(_) => Some(state(0.0)?),
        None => None,
    };
    let mut entries = Vec::with_capacity(times.len());
    let mut files = Vec::new();
    for (idx, &t) in times.iter().enumerate() {
        let w = state(t)?;
        let r = decompose(&w)?;
        ensure_split(&format!("{system} t={t}"), r.kinetic, r.classical, r.weizsacker)?;
        let oracle = match (&initial, oracle_dt) {
            (Some(w0), Some(dt)) => Some(oracle_residual(w0, &w, t, dt)?),
            _ => None,
        };
        let csv_path = with_suffix(&out.out, &format!("_t{idx}.csv"));
        if out.format.csv() {
            files.push(field_csv(csv_path.clone(), &w, &r)?);
        }
        entries.push(SeriesEntry {
            t,
            kinetic: r.kinetic,
            classical: r.classical,
            weizsacker: r.weizsacker,
            fisher: r.fisher,
            shannon: r.shannon,
            max_pointwise_residual: pointwise_residual(&w)?,
            oracle_l2_residual: oracle,
            csv: out.format.csv().then(|| file_name(&csv_path)),
        });
    }
    Ok((entries, files))
}

fn field_csv(path: std::path::PathBuf, w: &Wavefunction, r: &DecompositionReport) -> CliResult<Artifact> {
    let p = density(w);
    csv_table(
        path,
        &["x", "p", "t_c", "t_w", "t"],
        &[&r.abscissa, &p, &r.integrand_tc, &r.integrand_tw, &r.integrand_t],
    )
}

fn pib(a: &PibArgs) -> CliResult<Vec<Artifact>> {
    check_times(&a.times)?;
    let (s, grid) = box_state(&a.coeffs, &a.grid)?;
    let oracle = a.oracle.then_some(PIB_DT);
    let (series, mut files) = time_series("pib", &a.times, oracle, |t| pib_evolve(&s, t, &grid), &a.output)?;
    if a.output.format.json() {
        let summary = SeriesSummary {
            system: "pib",
            box_length: Some(s.box_length()),
            coefficients: Some(s.coefficients().iter().map(|c| c.re).collect()),
            grid: GridInfo::of(&grid),
            series,
        };
        files.push(json_document(with_suffix(&a.output.out, ".json"), &summary)?);
    }
    Ok(files)
}

fn gaussian(a: &GaussianArgs) -> CliResult<Vec<Artifact>> {
    check_times(&a.times)?;
    let t_max = a.times.iter().copied().fold(0.0, f64::max);
    let grid = gaussian_line(t_max, &a.grid)?;
    let oracle = a.oracle.then_some(GAUSSIAN_DT);
    let (series, mut files) = time_series("gaussian", &a.times, oracle, |t| gaussian_evolve(t, &grid), &a.output)?;
    if a.output.format.json() {
        let summary = SeriesSummary {
            system: "gaussian",
            box_length: None,
            coefficients: None,
            grid: GridInfo::of(&grid),
            series,
        };
        files.push(json_document(with_suffix(&a.output.out, ".json"), &summary)?);
    }
    Ok(files)
}

pub fn parse_alphas(list: &str) -> CliResult<Vec<f64>> {
    let tokens: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if tokens.is_empty() {
        return Err(invalid("--alphas is empty: at least one scale factor is required"));
    }
    tokens
        .iter()
        .map(|s| match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(invalid(format!("--alphas entry '{s}' is not a finite number"))),
        })
        .collect()
}

#[derive(Serialize)]
#[serde(untagged)]
enum ScanState {
    Orbital { n: u32, l: u32, m: i32 },
    Box { t: f64, box_length: f64, coefficients: Vec<f64> },
    Packet { t: f64 },
}

#[derive(Serialize)]
struct ScanPoint {
    alpha: f64,
    #[serde(rename = "T_alpha")]
    t_alpha: f64,
}

#[derive(Serialize)]
struct ScanSummary {
    system: &'static str,
    state: ScanState,
    grid: GridInfo,
    #[serde(rename = "T")]
    kinetic: f64,
    #[serde(rename = "T_C")]
    classical: f64,
    #[serde(rename = "T_W")]
    weizsacker: f64,
    scan: Vec<ScanPoint>,
    /// Least-squares parabola vertex; absent with fewer than three distinct alphas.
    vertex: Option<ScanPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
}

fn scan(a: &ScanArgs) -> CliResult<Vec<Artifact>> {
    let alphas = parse_alphas(&a.alphas)?;
    let hydrogen = a.system == SystemKind::Hydrogen;
    let has_orbital = a.orbital.n.is_some() || a.orbital.l.is_some() || a.orbital.m.is_some();
    if !hydrogen && has_orbital {
        return Err(invalid("--n, --l and --m apply only to --system hydrogen"));
    }
    if hydrogen && (a.time.is_some() || a.coeffs.is_some()) {
        return Err(invalid("--time and --coeffs do not apply to --system hydrogen"));
    }
    if a.system == SystemKind::Gaussian && a.coeffs.is_some() {
        return Err(invalid("--coeffs applies only to --system pib"));
    }
    let t = a.time.unwrap_or(0.0);
    check_times(&[t])?;

    let (name, state, w) = match a.system {
        SystemKind::Hydrogen => {
            let spec = orbital_spec(&a.orbital)?;
            let grid = hydrogen_grid(spec, &a.grid)?;
            let state = ScanState::Orbital {
                n: spec.n(),
                l: spec.l(),
                m: spec.m(),
            };
            ("hydrogen", state, orbital(spec, &grid)?)
        }
        SystemKind::Pib => {
            let coeffs = a.coeffs.clone().unwrap_or_else(|| vec![1.0, 1.0]);
            let (s, grid) = box_state(&coeffs, &a.grid)?;
            let state = ScanState::Box {
                t,
                box_length: s.box_length(),
                coefficients: s.coefficients().iter().map(|c| c.re).collect(),
            };
            ("pib", state, pib_evolve(&s, t, &grid)?)
        }
        SystemKind::Gaussian => {
            let grid = gaussian_line(t, &a.grid)?;
            ("gaussian", ScanState::Packet { t }, gaussian_evolve(t, &grid)?)
        }
    };

    let r = decompose(&w)?;
    ensure_split(name, r.kinetic, r.classical, r.weizsacker)?;
    let points = variational_scan(&w, &alphas)?;
    let vertex = fit_parabola(&points).map(|p| {
        let (alpha, t_alpha) = p.vertex();
        ScanPoint { alpha, t_alpha }
    });

    let OutputArgs { out, format } = &a.output;
    let csv_path = with_suffix(out, ".csv");
    let mut files = Vec::new();
    if format.csv() {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        files.push(csv_table(csv_path.clone(), &["alpha", "T_alpha"], &[&xs, &ys])?);
    }
    if format.json() {
        let summary = ScanSummary {
            system: name,
            state,
            grid: GridInfo::of(w.grid()),
            kinetic: r.kinetic,
            classical: r.classical,
            weizsacker: r.weizsacker,
            scan: points
                .iter()
                .map(|&(alpha, t_alpha)| ScanPoint { alpha, t_alpha })
                .collect(),
            vertex,
            csv: format.csv().then(|| file_name(&csv_path)),
        };
        files.push(json_document(with_suffix(out, ".json"), &summary)?);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_check_flags_violations() {
        assert!(ensure_split("s", 1.0, 0.25, 0.75).is_ok());
        let err = ensure_split("s", 1.0, 0.25, 0.7).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert_eq!(ensure_split("s", f64::NAN, 0.0, 0.0).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn alpha_lists() {
        assert_eq!(parse_alphas("0, 0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_alphas("").unwrap_err().exit_code(), 2);
        assert_eq!(parse_alphas(" , ").unwrap_err().exit_code(), 2);
        assert_eq!(parse_alphas("1,x").unwrap_err().exit_code(), 2);
        assert_eq!(parse_alphas("inf").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn odd_point_counts() {
        assert_eq!(odd_points(60.0, 0.015), 4001);
        assert_eq!(odd_points(1.0, 0.3), 5);
        assert_eq!(odd_points(0.0, 1.0), 3);
    }

    #[test]
    fn default_hydrogen_grid_matches_library() {
        let spec = OrbitalSpec::new(3, 1, 1).unwrap();
        let g = hydrogen_grid(spec, &GridArgs::default()).unwrap();
        let p = g.as_polar().unwrap();
        assert_eq!(p.shape(), (4001, THETA_POINTS));
        assert_eq!(p.r().max(), 60.0);
    }

    #[test]
    fn box_flags_validated() {
        let g = GridArgs {
            xmin: Some(-1.0),
            ..GridArgs::default()
        };
        assert_eq!(box_state(&[1.0], &g).unwrap_err().exit_code(), 2);
        assert_eq!(box_state(&[0.0, 0.0], &GridArgs::default()).unwrap_err().exit_code(), 2);
        let g = GridArgs {
            rmax: Some(10.0),
            ..GridArgs::default()
        };
        assert_eq!(box_state(&[1.0], &g).unwrap_err().exit_code(), 2);
        let (s, grid) = box_state(&[3.0, 4.0], &GridArgs::default()).unwrap();
        assert_eq!(s.coefficients()[0].re, 0.6);
        assert_eq!(grid.len(), PIB_POINTS);
    }
}
