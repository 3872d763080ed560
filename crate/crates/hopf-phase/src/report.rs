//! Pipeline orchestration: run every phase route over one motion, collect
//! the cross-check report, and emit text / CSV / SVG artifacts.
//!
//! Reports carry a human-readable block plus a `[machine]` section of
//! key=value lines meant for grep-based assertions. Identical configs give
//! bitwise-identical reports and CSV on one platform: every reduction is
//! ordered and pairwise.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::curvature;
use crate::error::{Error, Result};
use crate::geometry;
use crate::lift;
use crate::motion::{self, lipschitz_estimate, Family, MotionSpec, MotionTable, SampledPath};
use crate::phase;
use crate::quad::mod_2pi_distance;
use crate::regularize;
use crate::topology::{self, ChartPole};

/// Default cut-off ladder, inside (0, pi/8) with geometric decay.
pub const DEFAULT_EPS_LADDER: [f64; 4] = [0.08, 0.04, 0.02, 0.01];
/// Per-interval slope above which a Lipschitz warning is emitted.
pub const DEFAULT_LIPSCHITZ_WARN: f64 = 1e3;

/// Everything one run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub label: String,
    pub spec: MotionSpec,
    pub grid: usize,
    pub eps_ladder: Vec<f64>,
    pub lipschitz_warn: f64,
    pub emit_report: bool,
    pub emit_csv: bool,
    pub emit_svg: bool,
    pub out_dir: PathBuf,
    pub strict: bool,
}

/// A phase route either produced a value or was skipped with a reason.
#[derive(Debug, Clone)]
pub enum RouteOutcome {
    Value(f64),
    Skipped(String),
}

impl RouteOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            RouteOutcome::Value(v) => Some(*v),
            RouteOutcome::Skipped(_) => None,
        }
    }
}

/// One entry of the route-against-route residual matrix.
#[derive(Debug, Clone)]
pub struct ResidualEntry {
    pub first: &'static str,
    pub second: &'static str,
    pub difference: f64,
    /// True when the two routes are only congruent mod 2*pi and the
    /// difference is measured on the circle.
    pub congruence: bool,
}

/// Per-node columns for the CSV emitter, fixed order.
#[derive(Debug, Clone)]
pub struct NodeTable {
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_delta_g: Vec<f64>,
    pub phi_fiber: Vec<f64>,
    pub phi_compass: Vec<f64>,
    pub s: Vec<f64>,
    pub kappa_g: Vec<f64>,
}

/// The assembled cross-check report of one run.
#[derive(Debug, Clone)]
pub struct PhaseReport {
    pub label: String,
    pub turns: i64,
    pub delta_d: f64,
    pub delta_g_routes: Vec<(&'static str, RouteOutcome)>,
    pub tau: Complex64,
    pub transport_angle: RouteOutcome,
    pub simple: bool,
    pub i_plus: u8,
    pub i_minus: u8,
    pub a_plus: Option<f64>,
    pub a_minus: Option<f64>,
    pub curve_length: Option<f64>,
    pub lift_route_mismatch: f64,
    pub lift_unit_drift: f64,
    pub lift_horizontality: f64,
    pub residuals: Vec<ResidualEntry>,
    pub warnings: Vec<String>,
    pub table: NodeTable,
    /// Regularized Gauss curve, the SVG subject.
    pub curve: Vec<geometry::SpherePoint>,
}

impl PhaseReport {
    pub fn route(&self, name: &str) -> Option<&RouteOutcome> {
        self.delta_g_routes
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, o)| o)
    }

    /// True when no route was skipped.
    pub fn all_routes_ok(&self) -> bool {
        self.delta_g_routes
            .iter()
            .all(|(_, o)| matches!(o, RouteOutcome::Value(_)))
            && matches!(self.transport_angle, RouteOutcome::Value(_))
    }
}

/// Run the whole pipeline on one config.
pub fn run(config: &RunConfig) -> Result<PhaseReport> {
    let path = motion::sample(&config.spec, config.grid)?;
    let turns = path.closure_winding()?;
    let mut warnings = Vec::new();

    let (c_theta, c_beta) = lipschitz_estimate(&path);
    if c_theta > config.lipschitz_warn || c_beta > config.lipschitz_warn {
        warnings.push(format!(
            "lipschitz estimate exceeds bound {}: C_theta = {c_theta:.3e}, C_beta = {c_beta:.3e}",
            config.lipschitz_warn
        ));
    }

    let phases = phase::PhaseResult::compute(&path, config.spec.a, config.spec.b)?;

    let (_, reg_limit) = regularize::regularized_phase(&path, &config.eps_ladder)?;
    let eps_min = *config.eps_ladder.last().unwrap();
    let reg_path = regularize::clamp(&path, eps_min)?.as_path();

    // horizontal lift and holonomy
    let lifted = lift::horizontal_lift(&path, 0.0)?;
    let fiber_delta = lifted.phi[path.n()] - lifted.phi[0];
    let tau = Complex64::from_polar(1.0, fiber_delta);
    if lifted.route_mismatch() > 1e-8 {
        warnings.push(format!(
            "angle and embedded lifts disagree by {:.3e}",
            lifted.route_mismatch()
        ));
    }

    // topology on the regularized curve
    let topo = topology::curve_topology(&path, eps_min)?;
    let area_route = if topo.simple {
        match (topo.a_plus, topo.i_plus) {
            (Some(ap), ip) => RouteOutcome::Value(ap - TAU * ip as f64),
            _ => RouteOutcome::Skipped("area unavailable".into()),
        }
    } else {
        RouteOutcome::Skipped("NotSimple".into())
    };

    // curvature corollary
    let corollary = curvature::corollary_check(&path, &config.eps_ladder);
    let corollary_route = match &corollary {
        Ok(c) => RouteOutcome::Value(TAU * (c.i_plus as f64 - 1.0) + c.total_kappa),
        Err(e) => RouteOutcome::Skipped(e.to_string()),
    };

    // Levi-Civita transport, congruent mod 2 pi only
    let transport_angle = match lift::transport_oracle(&path) {
        Ok(a) => RouteOutcome::Value(a),
        Err(e) => RouteOutcome::Skipped(e.to_string()),
    };

    let delta_g_routes: Vec<(&'static str, RouteOutcome)> = vec![
        ("line_integral", RouteOutcome::Value(phases.delta_g)),
        ("regularized_limit", RouteOutcome::Value(reg_limit)),
        ("area_index", area_route),
        ("fiber_coordinate", RouteOutcome::Value(fiber_delta)),
        ("curvature_corollary", corollary_route),
    ];

    // residual matrix over completed routes
    let mut residuals = Vec::new();
    for i in 0..delta_g_routes.len() {
        for j in i + 1..delta_g_routes.len() {
            if let (Some(a), Some(b)) = (delta_g_routes[i].1.value(), delta_g_routes[j].1.value()) {
                residuals.push(ResidualEntry {
                    first: delta_g_routes[i].0,
                    second: delta_g_routes[j].0,
                    difference: (a - b).abs(),
                    congruence: false,
                });
            }
        }
    }
    residuals.push(ResidualEntry {
        first: "holonomy_tau",
        second: "line_integral",
        difference: (tau - Complex64::from_polar(1.0, phases.delta_g)).norm(),
        congruence: true,
    });
    if let RouteOutcome::Value(angle) = transport_angle {
        residuals.push(ResidualEntry {
            first: "transport_oracle",
            second: "line_integral",
            difference: mod_2pi_distance(angle, phases.delta_g),
            congruence: true,
        });
    }

    // per-node columns: compass machinery runs on the regularized curve,
    // which exists even when the raw Gauss vector parks on a pole
    let n = path.n();
    let (s_col, phi_c_col, kappa_col, length) = match curvature::geodesic_curvature(&reg_path) {
        Ok(profile) => {
            let arc = curvature::arclength(&reg_path)?;
            (
                arc.s.clone(),
                profile.phi_c.clone(),
                profile.kappa_g.clone(),
                Some(arc.total),
            )
        }
        Err(e) => {
            warnings.push(format!("compass columns unavailable: {e}"));
            (
                vec![f64::NAN; n + 1],
                vec![f64::NAN; n + 1],
                vec![f64::NAN; n + 1],
                None,
            )
        }
    };

    let table = NodeTable {
        t: path.t.clone(),
        theta: path.theta.clone(),
        beta: path.beta.clone(),
        running_delta_g: phases.running_delta_g.clone(),
        phi_fiber: lifted.phi.clone(),
        phi_compass: phi_c_col,
        s: s_col,
        kappa_g: kappa_col,
    };

    Ok(PhaseReport {
        label: config.label.clone(),
        turns,
        delta_d: phases.delta_d,
        delta_g_routes,
        tau,
        transport_angle,
        simple: topo.simple,
        i_plus: topo.i_plus,
        i_minus: topo.i_minus,
        a_plus: topo.a_plus,
        a_minus: topo.a_minus,
        curve_length: length,
        lift_route_mismatch: lifted.route_mismatch(),
        lift_unit_drift: lifted.unit_drift,
        lift_horizontality: lifted.horizontality_residual,
        residuals,
        warnings,
        table,
        curve: topology::gauss_curve(&reg_path),
    })
}

fn fmt_outcome(o: &RouteOutcome) -> String {
    match o {
        RouteOutcome::Value(v) => format!("{v}"),
        RouteOutcome::Skipped(reason) => format!("skipped: {reason}"),
    }
}

fn machine_outcome(o: &RouteOutcome) -> String {
    match o {
        RouteOutcome::Value(v) => format!("{v}"),
        RouteOutcome::Skipped(reason) => format!("skipped:{}", reason.replace(' ', "_")),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_else(|| "n/a".into())
}

/// Render the aligned human block plus the `[machine]` key=value section.
pub fn render_text(report: &PhaseReport) -> String {
    let mut out = String::new();
    let w = 30;
    let _ = writeln!(out, "run: {}", report.label);
    let _ = writeln!(out, "{:<w$} {}", "turns n", report.turns);
    let _ = writeln!(out, "{:<w$} {}", "dynamical phase", report.delta_d);
    for (name, outcome) in &report.delta_g_routes {
        let _ = writeln!(
            out,
            "{:<w$} {}",
            format!("delta_g [{name}]"),
            fmt_outcome(outcome)
        );
    }
    let _ = writeln!(
        out,
        "{:<w$} {} {:+}i",
        "holonomy tau", report.tau.re, report.tau.im
    );
    let _ = writeln!(
        out,
        "{:<w$} {}",
        "transport angle (mod 2pi)",
        fmt_outcome(&report.transport_angle)
    );
    let _ = writeln!(out, "{:<w$} {}", "curve simple", report.simple);
    let _ = writeln!(
        out,
        "{:<w$} I+ = {}, I- = {}",
        "pole indices", report.i_plus, report.i_minus
    );
    let _ = writeln!(
        out,
        "{:<w$} A+ = {}, A- = {}",
        "enclosed areas",
        fmt_opt(report.a_plus),
        fmt_opt(report.a_minus)
    );
    let _ = writeln!(
        out,
        "{:<w$} {}",
        "curve length",
        fmt_opt(report.curve_length)
    );
    let _ = writeln!(out, "residuals (route vs route):");
    for r in &report.residuals {
        let tag = if r.congruence { "  [mod 2pi]" } else { "" };
        let _ = writeln!(
            out,
            "  {:<40} {:.3e}{tag}",
            format!("{} vs {}", r.first, r.second),
            r.difference
        );
    }
    if report.warnings.is_empty() {
        let _ = writeln!(out, "warnings: none");
    } else {
        let _ = writeln!(out, "warnings:");
        for wline in &report.warnings {
            let _ = writeln!(out, "  - {wline}");
        }
    }

    let _ = writeln!(out, "\n[machine]");
    let _ = writeln!(out, "label={}", report.label);
    let _ = writeln!(out, "n={}", report.turns);
    let _ = writeln!(out, "delta_d={}", report.delta_d);
    for (name, outcome) in &report.delta_g_routes {
        let _ = writeln!(out, "delta_g_{name}={}", machine_outcome(outcome));
    }
    let _ = writeln!(out, "tau_re={}", report.tau.re);
    let _ = writeln!(out, "tau_im={}", report.tau.im);
    let _ = writeln!(
        out,
        "transport_angle={}",
        machine_outcome(&report.transport_angle)
    );
    let _ = writeln!(out, "simple={}", report.simple);
    let _ = writeln!(out, "i_plus={}", report.i_plus);
    let _ = writeln!(out, "i_minus={}", report.i_minus);
    let _ = writeln!(out, "a_plus={}", fmt_opt(report.a_plus));
    let _ = writeln!(out, "a_minus={}", fmt_opt(report.a_minus));
    let _ = writeln!(out, "curve_length={}", fmt_opt(report.curve_length));
    let _ = writeln!(out, "lift_route_mismatch={}", report.lift_route_mismatch);
    let _ = writeln!(out, "lift_unit_drift={}", report.lift_unit_drift);
    let _ = writeln!(out, "lift_horizontality={}", report.lift_horizontality);
    for r in &report.residuals {
        let kind = if r.congruence {
            "congruence"
        } else {
            "residual"
        };
        let _ = writeln!(out, "{kind}_{}_vs_{}={}", r.first, r.second, r.difference);
    }
    let _ = writeln!(out, "tol_unit={}", geometry::UNIT_TOL);
    let _ = writeln!(out, "tol_frame={}", geometry::FRAME_TOL);
    let _ = writeln!(out, "warning_count={}", report.warnings.len());
    out
}

/// Write the per-node CSV: header row, fixed column order, full-precision
/// shortest round-trip decimals.
pub fn emit_csv(report: &PhaseReport, path: &Path) -> Result<()> {
    let t = &report.table;
    let mut out = String::from("t,theta,beta,running_delta_g,phi_fiber,phi_compass,s,kappa_g\n");
    for k in 0..t.t.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            t.t[k],
            t.theta[k],
            t.beta[k],
            t.running_delta_g[k],
            t.phi_fiber[k],
            t.phi_compass[k],
            t.s[k],
            t.kappa_g[k]
        );
    }
    std::fs::write(path, out).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Render the regularized Gauss curve in the chart that projects from the
/// south pole (north pole at the origin), with orientation arrowheads and
/// left-region shading when the curve is simple.
pub fn emit_svg(report: &PhaseReport, path: &Path) -> Result<()> {
    let poly = topology::stereographic(&report.curve, ChartPole::North)?;
    let xs: Vec<f64> = poly.iter().map(|z| z.re).collect();
    let ys: Vec<f64> = poly.iter().map(|z| -z.im).collect(); // svg y grows down
    let (min_x, max_x) = bounds(&xs);
    let (min_y, max_y) = bounds(&ys);
    let span = ((max_x - min_x).max(max_y - min_y)).max(1e-6);
    let pad = 0.15 * span;
    let vb = (
        min_x.min(-0.1) - pad,
        min_y.min(-0.1) - pad,
        (max_x.max(0.1) - min_x.min(-0.1)) + 2.0 * pad,
        (max_y.max(0.1) - min_y.min(-0.1)) + 2.0 * pad,
    );
    let stroke = 0.004 * vb.2.max(vb.3);

    let mut d = String::new();
    for (k, (x, y)) in xs.iter().zip(&ys).enumerate() {
        let _ = write!(d, "{}{:.6},{:.6} ", if k == 0 { "M" } else { "L" }, x, y);
    }
    d.push('Z');

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        vb.0, vb.1, vb.2, vb.3
    );
    let _ = writeln!(
        svg,
        r#"<title>regularized Gauss curve, projected from the south pole</title>"#
    );
    if report.simple {
        // the bounded chart region is whichever side avoids the projection
        // center (the south pole)
        let label = if report.south_is_left() {
            "right"
        } else {
            "left"
        };
        let _ = writeln!(
            svg,
            r##"<path d="{d}" fill="#9ecae1" fill-opacity="0.45" stroke="none"><!--shaded: {label} region--></path>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.6}" y="{:.6}" font-size="{:.6}">shaded interior = {label} region</text>"#,
            vb.0 + 0.02 * vb.2,
            vb.1 + 0.06 * vb.3,
            0.035 * vb.3
        );
    }
    let _ = writeln!(
        svg,
        r##"<path d="{d}" fill="none" stroke="#08519c" stroke-width="{stroke:.6}"/>"##
    );
    // orientation arrowheads
    let n = xs.len();
    for a in 0..8 {
        let k = a * n / 8;
        let k2 = (k + 1) % n;
        let (dx, dy) = (xs[k2] - xs[k], ys[k2] - ys[k]);
        let len = (dx * dx + dy * dy).sqrt().max(1e-12);
        let (ux, uy) = (dx / len, dy / len);
        let (px, py) = (-uy, ux);
        let size = 2.5 * stroke;
        let tip = (xs[k] + ux * 2.0 * size, ys[k] + uy * 2.0 * size);
        let l = (xs[k] - ux * size + px * size, ys[k] - uy * size + py * size);
        let r = (xs[k] - ux * size - px * size, ys[k] - uy * size - py * size);
        let _ = writeln!(
            svg,
            r##"<polygon points="{:.6},{:.6} {:.6},{:.6} {:.6},{:.6}" fill="#de2d26"/>"##,
            tip.0, tip.1, l.0, l.1, r.0, r.1
        );
    }
    // poles: north at the origin, south at infinity
    let _ = writeln!(
        svg,
        r##"<circle cx="0" cy="0" r="{:.6}" fill="#000"/>"##,
        1.5 * stroke
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.6}" y="{:.6}" font-size="{:.6}">N at origin; S at infinity</text>"#,
        vb.0 + 0.02 * vb.2,
        vb.1 + 0.11 * vb.3,
        0.035 * vb.3
    );
    let _ = writeln!(svg, "</svg>");
    std::fs::write(path, svg).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

impl PhaseReport {
    fn south_is_left(&self) -> bool {
        topology::side_of_point(
            &self.curve,
            geometry::SpherePoint {
                x: 0.0,
                y: 0.0,
                z: -1.0,
            },
        )
        .map(|s| s == topology::Side::Left)
        .unwrap_or(false)
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}

/// Write the requested artifacts next to each other in `out_dir`.
pub fn emit(config: &RunConfig, report: &PhaseReport) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if !(config.emit_report || config.emit_csv || config.emit_svg) {
        return Ok(written);
    }
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::Io {
        path: config.out_dir.display().to_string(),
        source: e,
    })?;
    if config.emit_report {
        let p = config.out_dir.join(format!("{}.report.txt", config.label));
        std::fs::write(&p, render_text(report)).map_err(|e| Error::Io {
            path: p.display().to_string(),
            source: e,
        })?;
        written.push(p);
    }
    if config.emit_csv {
        let p = config.out_dir.join(format!("{}.csv", config.label));
        emit_csv(report, &p)?;
        written.push(p);
    }
    if config.emit_svg {
        let p = config.out_dir.join(format!("{}.svg", config.label));
        emit_svg(report, &p)?;
        written.push(p);
    }
    Ok(written)
}

// ---------------------------------------------------------------------
// configuration parsing
// ---------------------------------------------------------------------

/// Raw key-value options collected from a config file and/or flag
/// overrides; later sources win.
#[derive(Debug, Clone, Default)]
pub struct Options {
    values: BTreeMap<String, String>,
}

impl Options {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// Parse a flat key-value file: `key = value` or `key value` per line,
    /// `#` comments allowed.
    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = if let Some((k, v)) = line.split_once('=') {
                (k.trim(), v.trim())
            } else if let Some((k, v)) = line.split_once(char::is_whitespace) {
                (k.trim(), v.trim())
            } else {
                return Err(Error::Config(format!(
                    "{}:{}: expected `key = value`, got {line:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!(
                    "{}:{}: empty key or value",
                    path.display(),
                    lineno + 1
                )));
            }
            self.set(key, value);
        }
        Ok(())
    }

    fn parse_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|e| Error::Config(format!("field {key}: bad number {s:?}: {e}"))),
        }
    }

    fn parse_angle(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => parse_angle(s)
                .map(Some)
                .map_err(|e| Error::Config(format!("field {key}: {e}"))),
        }
    }

    /// Validate and assemble the run configuration.
    pub fn resolve(&self) -> Result<RunConfig> {
        let turns = match self.get("n") {
            Some(s) => s
                .parse::<i64>()
                .map_err(|e| Error::Config(format!("field n: bad integer {s:?}: {e}")))?,
            None => 1,
        };
        let a = self.parse_f64("a")?.unwrap_or(1.0);
        let b = self.parse_f64("b")?.unwrap_or(1.0);

        let family = match self.get("family").unwrap_or("constant_tilt") {
            "constant_tilt" => Family::ConstantTilt {
                beta0: self.parse_angle("beta0")?.unwrap_or(std::f64::consts::FRAC_PI_2),
            },
            "wobble" => Family::Wobble {
                beta0: self.parse_angle("beta0")?.unwrap_or(std::f64::consts::FRAC_PI_2),
                amplitude: self.parse_angle("dbeta")?.unwrap_or(0.5),
                frequency: match self.get("mfreq") {
                    Some(s) => s.parse::<u32>().map_err(|e| {
                        Error::Config(format!("field mfreq: bad integer {s:?}: {e}"))
                    })?,
                    None => 1,
                },
            },
            "tilt_sweep" => Family::TiltSweep {
                beta0: self.parse_angle("beta0")?.unwrap_or(0.4),
                beta1: self.parse_angle("beta1")?.unwrap_or(0.0),
            },
            "piecewise_linear_table" => {
                let file = self
                    .get("table")
                    .ok_or_else(|| Error::Config("family piecewise_linear_table needs table=<path>".into()))?;
                let text = std::fs::read_to_string(file).map_err(|e| Error::Io {
                    path: file.to_string(),
                    source: e,
                })?;
                Family::PiecewiseLinearTable(MotionTable::parse(&text)?)
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown family {other:?}; expected constant_tilt, wobble, tilt_sweep or piecewise_linear_table"
                )))
            }
        };
        // tables define their own winding
        let turns = match &family {
            Family::PiecewiseLinearTable(t) => t.winding().round() as i64,
            _ => turns,
        };
        let spec = motion::make_motion(family, turns, a, b)?;

        let grid = match self.get("grid") {
            Some(s) => s
                .parse::<usize>()
                .map_err(|e| Error::Config(format!("field grid: bad integer {s:?}: {e}")))?,
            None => motion::DEFAULT_GRID,
        };

        let eps_ladder: Vec<f64> = match self.get("eps_ladder") {
            Some(s) => s
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|e| {
                        Error::Config(format!("field eps_ladder: bad number {tok:?}: {e}"))
                    })
                })
                .collect::<Result<_>>()?,
            None => DEFAULT_EPS_LADDER.to_vec(),
        };

        let emit = self.get("emit").unwrap_or("");
        let emit_list: Vec<&str> = emit
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .collect();
        for e in &emit_list {
            if !matches!(*e, "report" | "csv" | "svg") {
                return Err(Error::Config(format!(
                    "field emit: unknown artifact {e:?}; expected report, csv or svg"
                )));
            }
        }

        let strict = match self.get("strict") {
            None => false,
            Some("true") | Some("1") => true,
            Some("false") | Some("0") => false,
            Some(other) => {
                return Err(Error::Config(format!(
                    "field strict: expected true/false, got {other:?}"
                )))
            }
        };

        Ok(RunConfig {
            label: self.get("label").unwrap_or("run").to_string(),
            spec,
            grid,
            eps_ladder,
            lipschitz_warn: self
                .parse_f64("lipschitz_warn")?
                .unwrap_or(DEFAULT_LIPSCHITZ_WARN),
            emit_report: emit_list.contains(&"report"),
            emit_csv: emit_list.contains(&"csv"),
            emit_svg: emit_list.contains(&"svg"),
            out_dir: PathBuf::from(self.get("out_dir").unwrap_or(".")),
            strict,
        })
    }
}

/// Radians by default; degrees only with an explicit `deg` suffix.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let (num, degrees) = if let Some(stripped) = s.strip_suffix("deg") {
        (stripped.trim(), true)
    } else {
        (s, false)
    };
    let v: f64 = num.parse().map_err(|e| format!("bad angle {s:?}: {e}"))?;
    Ok(if degrees { v.to_radians() } else { v })
}

/// Build a quick config programmatically; tests and the batch runner use it.
pub fn config_for(spec: MotionSpec, label: &str) -> RunConfig {
    RunConfig {
        label: label.to_string(),
        spec,
        grid: motion::DEFAULT_GRID,
        eps_ladder: DEFAULT_EPS_LADDER.to_vec(),
        lipschitz_warn: DEFAULT_LIPSCHITZ_WARN,
        emit_report: false,
        emit_csv: false,
        emit_svg: false,
        out_dir: PathBuf::from("."),
        strict: false,
    }
}

/// Run every `.cfg` file in a directory, one worker thread per run.
/// Returns (label, report or error message) pairs in filename order.
pub fn run_batch(dir: &Path) -> Result<Vec<(String, std::result::Result<PhaseReport, String>)>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Io {
            path: dir.display().to_string(),
            source: e,
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "cfg").unwrap_or(false))
        .collect();
    files.sort();

    let handles: Vec<_> = files
        .into_iter()
        .map(|file| {
            std::thread::spawn(move || {
                let label = file
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "run".into());
                let result = (|| -> Result<PhaseReport> {
                    let mut opts = Options::default();
                    opts.merge_file(&file)?;
                    if opts.get("label").is_none() {
                        opts.set("label", label.clone());
                    }
                    let config = opts.resolve()?;
                    let report = run(&config)?;
                    emit(&config, &report)?;
                    Ok(report)
                })();
                (label, result.map_err(|e| e.to_string()))
            })
        })
        .collect();

    Ok(handles
        .into_iter()
        .map(|h| h.join().expect("batch worker panicked"))
        .collect())
}

/// Convenience: sampled path of a config (the acceptance suite reuses it).
pub fn sample_config(config: &RunConfig) -> Result<SampledPath> {
    motion::sample(&config.spec, config.grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::make_motion;
    use std::f64::consts::{FRAC_PI_3, PI};

    fn latitude_config(beta0: f64) -> RunConfig {
        config_for(
            make_motion(Family::ConstantTilt { beta0 }, 1, 1.0, 1.0).unwrap(),
            "test",
        )
    }

    #[test]
    fn full_pipeline_latitude() {
        let mut cfg = latitude_config(FRAC_PI_3);
        cfg.grid = 4096;
        let report = run(&cfg).unwrap();
        assert!((report.delta_d - TAU).abs() < 1e-12);
        for (name, outcome) in &report.delta_g_routes {
            let v = outcome.value().unwrap_or_else(|| panic!("{name} skipped"));
            assert!((v + PI).abs() < 2e-3, "{name} gave {v}");
        }
        assert!((report.tau.re + 1.0).abs() < 1e-9);
        assert!(report.tau.im.abs() < 1e-9);
        assert!(report.simple);
        assert_eq!((report.i_plus, report.i_minus), (1, 1));
        assert!(report.all_routes_ok());
    }

    #[test]
    fn flat_coin_pipeline() {
        // beta == 0, n = 1, a = 2, b = 1: Delta = 4 pi - 2 pi
        let mut cfg = config_for(
            make_motion(Family::ConstantTilt { beta0: 0.0 }, 1, 2.0, 1.0).unwrap(),
            "flat",
        );
        cfg.grid = 4096;
        let report = run(&cfg).unwrap();
        assert!((report.delta_d - 2.0 * TAU).abs() < 1e-12);
        let line = report.route("line_integral").unwrap().value().unwrap();
        assert!((line + TAU).abs() < 1e-9);
        let reg = report.route("regularized_limit").unwrap().value().unwrap();
        assert!((reg + TAU).abs() < 1e-6);
        // tau = exp(-2 pi i) = 1 even though delta_g = -2 pi
        assert!((report.tau.re - 1.0).abs() < 1e-8);
        assert!(report.tau.im.abs() < 1e-8);
        // transport needs a frame at the start point; skipped here
        assert!(matches!(report.transport_angle, RouteOutcome::Skipped(_)));
    }

    #[test]
    fn figure_eight_skips_area_routes() {
        let table = MotionTable::new(vec![
            (0.0, 0.0, PI / 2.0),
            (0.25, PI, PI / 2.0 - 0.5),
            (0.5, TAU, PI / 2.0),
            (0.75, PI, PI / 2.0 + 0.5),
            (1.0, 0.0, PI / 2.0),
        ])
        .unwrap();
        let cfg = config_for(
            make_motion(Family::PiecewiseLinearTable(table), 0, 1.0, 1.0).unwrap(),
            "eight",
        );
        let report = run(&cfg).unwrap();
        assert!(!report.simple);
        assert!(matches!(
            report.route("area_index").unwrap(),
            RouteOutcome::Skipped(_)
        ));
        assert!(matches!(
            report.route("curvature_corollary").unwrap(),
            RouteOutcome::Skipped(_)
        ));
        // line integral and holonomy still present
        assert!(report.route("line_integral").unwrap().value().is_some());
        assert!(report.route("fiber_coordinate").unwrap().value().is_some());
        let text = render_text(&report);
        assert!(text.contains("skipped"));
    }

    #[test]
    fn lipschitz_warning_emitted() {
        let table = MotionTable::new(vec![
            (0.0, 0.0, 0.5),
            (0.499, PI, 0.5),
            (0.501, PI + 0.1, 2.0),
            (1.0, TAU, 0.5),
        ])
        .unwrap();
        let mut cfg = config_for(
            make_motion(Family::PiecewiseLinearTable(table), 1, 1.0, 1.0).unwrap(),
            "jumpy",
        );
        cfg.grid = 2048;
        cfg.lipschitz_warn = 100.0;
        let report = run(&cfg).unwrap();
        assert!(
            report.warnings.iter().any(|w| w.contains("lipschitz")),
            "warnings: {:?}",
            report.warnings
        );
    }

    #[test]
    fn determinism_bitwise() {
        let mut cfg = latitude_config(1.1);
        cfg.grid = 1024;
        let r1 = render_text(&run(&cfg).unwrap());
        let r2 = render_text(&run(&cfg).unwrap());
        assert_eq!(r1, r2);
    }

    #[test]
    fn options_parsing_and_angles() {
        assert!((parse_angle("1.5").unwrap() - 1.5).abs() < 1e-15);
        assert!((parse_angle("60 deg").unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((parse_angle("60deg").unwrap() - PI / 3.0).abs() < 1e-15);
        assert!(parse_angle("sixty").is_err());

        let mut opts = Options::default();
        opts.set("family", "wobble");
        opts.set("beta0", "90 deg");
        opts.set("dbeta", "0.5");
        opts.set("mfreq", "2");
        opts.set("grid", "512");
        let cfg = opts.resolve().unwrap();
        assert_eq!(cfg.grid, 512);
        match cfg.spec.family {
            Family::Wobble {
                beta0, frequency, ..
            } => {
                assert!((beta0 - PI / 2.0).abs() < 1e-15);
                assert_eq!(frequency, 2);
            }
            _ => panic!("wrong family"),
        }

        let mut bad = Options::default();
        bad.set("family", "nonsense");
        assert!(matches!(bad.resolve(), Err(Error::Config(_))));
    }

    #[test]
    fn emit_artifacts() {
        let dir = std::env::temp_dir().join(format!("hopf-phase-test-{}", std::process::id()));
        let mut cfg = latitude_config(FRAC_PI_3);
        cfg.grid = 1024;
        cfg.emit_report = true;
        cfg.emit_csv = true;
        cfg.emit_svg = true;
        cfg.out_dir = dir.clone();
        let report = run(&cfg).unwrap();
        let written = emit(&cfg, &report).unwrap();
        assert_eq!(written.len(), 3);
        let csv = std::fs::read_to_string(&written[1]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,theta,beta,running_delta_g,phi_fiber,phi_compass,s,kappa_g"
        );
        assert_eq!(csv.lines().count(), 1 + 1024 + 1);
        let svg = std::fs::read_to_string(&written[2]).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("</svg>"));
        std::fs::remove_dir_all(&dir).ok();
    }
}
