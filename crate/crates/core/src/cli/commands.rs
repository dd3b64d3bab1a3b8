use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::config::RunConfig;
use super::output::fmt_f64;
use super::CliError;
use crate::analysis::{march_squares, sweep, Method, SweepSpec};
use crate::approx::{alpha0, f0, f1_closed, finfinity, solve_lambda, z_series};
use crate::exact::{solve_exact, solve_f1_exact, solve_rwa};
use crate::grid::ComplexTrajectory;

fn trajectory(cfg: &RunConfig, m: Method) -> crate::Result<ComplexTrajectory> {
    let (p, k) = (&cfg.pulse, cfg.settings.intervals);
    match m {
        Method::F0 => f0(p, k),
        Method::F1Closed => f1_closed(p, k),
        Method::F1Exact => solve_f1_exact(p, k),
        Method::FInf => finfinity(p, k),
        Method::Rwa => solve_rwa(p, k).map(|s| s.f),
        Method::ZSeries => z_series(p, k, cfg.zseries_order).map(|z| z.f),
    }
}

fn push_complex(row: &mut String, traj: &ComplexTrajectory, i: usize) {
    if traj.is_masked(i) {
        row.push_str(",,");
    } else {
        let z = traj.samples()[i];
        let _ = write!(row, ",{},{}", fmt_f64(z.re), fmt_f64(z.im));
    }
}

/// Exact trajectory plus one `f` column pair per requested method.
pub fn simulate(cfg: &RunConfig) -> Result<String, CliError> {
    let exact = solve_exact(&cfg.pulse, &cfg.settings)?;
    let approx = cfg
        .methods
        .iter()
        .map(|&m| trajectory(cfg, m).map(|t| (m, t)))
        .collect::<crate::Result<Vec<_>>>()?;

    let mut out = cfg.header_line();
    out.push_str("t,re_C,im_C,re_D,im_D,re_f,im_f,pop_c,masked");
    for (m, _) in &approx {
        let _ = write!(out, ",re_f_{m},im_f_{m}");
    }
    out.push('\n');
    for i in 0..exact.c.len() {
        let (c, d) = (exact.c.samples()[i], exact.d.samples()[i]);
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{},{},{}",
            fmt_f64(exact.c.time(i)),
            fmt_f64(c.re),
            fmt_f64(c.im),
            fmt_f64(d.re),
            fmt_f64(d.im)
        );
        push_complex(&mut row, &exact.f, i);
        let masked = u8::from(exact.f.is_masked(i));
        let _ = write!(row, ",{},{masked}", fmt_f64(c.norm_sqr()));
        for (_, t) in &approx {
            push_complex(&mut row, t, i);
        }
        row.push('\n');
        out.push_str(&row);
    }
    Ok(out)
}

pub const SWEEP_HEADER: &str = "omega0_ratio,omegac_ratio,err_f0,err_f1_closed,err_f1_exact,err_finf,err_finf_pct,lambda_re,lambda_im,lambda_converged,flags";

/// Error surface over the configured grid, ω_c/ω outer and Ω₀/ω inner.
pub fn sweep_surface(cfg: &RunConfig) -> Result<String, CliError> {
    if let Some(m) = cfg.methods.iter().find(|m| m.surface_column().is_none()) {
        return Err(CliError::Usage(format!(
            "method '{m}' has no error-surface column"
        )));
    }
    let mut template = cfg.pulse;
    template.omega0 = 0.0;
    let surface = sweep(&SweepSpec {
        template,
        x: cfg.x.clone(),
        y: cfg.y.clone(),
        methods: cfg.methods.clone(),
        settings: cfg.settings,
    });

    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let mut out = cfg.header_line();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for c in &surface.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(c.omega0_ratio),
            fmt_f64(c.omegac_ratio),
            opt(c.err_f0),
            opt(c.err_f1_closed),
            opt(c.err_f1_exact),
            opt(c.err_finf),
            opt(c.err_finf.map(|e| 100.0 * e)),
            opt(c.lambda.map(|l| l.re)),
            opt(c.lambda.map(|l| l.im)),
            u8::from(c.lambda_converged),
            c.flags.join("|"),
        );
    }
    Ok(out)
}

/// One-line λ report. A non-converged solve still reports its best iterate
/// but fails with exit code 3.
pub fn lambda(cfg: &RunConfig) -> Result<String, CliError> {
    let k = cfg.settings.intervals;
    let a0 = alpha0(&cfg.pulse, k)?.value;
    let r = solve_lambda(&cfg.pulse, k)?;
    let line = format!(
        "lambda_re={} lambda_im={} residual={} iterations={} converged={} alpha0_re={} alpha0_im={}\n",
        fmt_f64(r.lambda.re),
        fmt_f64(r.lambda.im),
        fmt_f64(r.residual),
        r.iterations,
        r.converged,
        fmt_f64(a0.re),
        fmt_f64(a0.im),
    );
    if r.converged {
        Ok(line)
    } else {
        Err(CliError::Numerical {
            message: format!("lambda did not converge in {} iterations", r.iterations),
            report: Some(line),
        })
    }
}

/// Grid read back from a surface CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Row-major, `y` outer; NaN for empty cells.
    pub values: Vec<f64>,
}

fn sorted_unique(v: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = v.collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| a.to_bits() == b.to_bits());
    out
}

/// Reads one error column of a surface CSV onto its (x, y) grid.
pub fn read_surface(text: &str, column: &str) -> Result<SurfaceGrid, CliError> {
    let bad = |msg: String| CliError::Usage(format!("malformed surface CSV: {msg}"));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let idx = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column '{name}'")))
    };
    let (ix, iy, iv) = (idx("omega0_ratio")?, idx("omegac_ratio")?, idx(column)?);

    let mut points = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64, CliError> {
            let s = rec.get(i).unwrap_or("");
            s.parse::<f64>()
                .map_err(|_| bad(format!("row {}: '{s}' is not a number", n + 1)))
        };
        let v = match rec.get(iv).unwrap_or("") {
            "" => f64::NAN,
            _ => num(iv)?,
        };
        points.push((num(ix)?, num(iy)?, v));
    }
    let x = sorted_unique(points.iter().map(|p| p.0));
    let y = sorted_unique(points.iter().map(|p| p.1));
    if points.len() != x.len() * y.len() {
        return Err(bad(format!(
            "{} rows do not form a {}x{} grid",
            points.len(),
            x.len(),
            y.len()
        )));
    }
    let mut cells: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (px, py, v) in points {
        let i = x.binary_search_by(|a| a.total_cmp(&px)).unwrap();
        let j = y.binary_search_by(|a| a.total_cmp(&py)).unwrap();
        if cells.insert((j, i), v).is_some() {
            return Err(bad(format!("duplicate cell ({px}, {py})")));
        }
    }
    Ok(SurfaceGrid {
        x,
        y,
        values: cells.into_values().collect(),
    })
}

/// Level-set polylines of a surface CSV column.
pub fn contour(cfg: &RunConfig) -> Result<String, CliError> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("contour needs --input <surface.csv>".into()))?;
    let column = cfg.method.surface_column().ok_or_else(|| {
        CliError::Usage(format!(
            "method '{}' has no error-surface column",
            cfg.method
        ))
    })?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let grid = read_surface(&text, column)?;
    let lines = march_squares(&grid.x, &grid.y, &grid.values, cfg.level);

    let mut out = cfg.header_line();
    out.push_str("polyline_id,omega0_ratio,omegac_ratio\n");
    for (id, line) in lines.iter().enumerate() {
        for (px, py) in line {
            let _ = writeln!(out, "{id},{},{}", fmt_f64(*px), fmt_f64(*py));
        }
    }
    Ok(out)
}
