use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use soulgeom::comparison::{verify_trapezoid_on_surface, Surface, VerificationReport};
use soulgeom::cone::{ConePoint, ConeSurface};
use soulgeom::convex_domain::generators::parse_generator;
use soulgeom::convex_domain::{excess_slope, soul as soul_of, BodyJson, Erosion, HalfplaneBody, MaxSet};
use soulgeom::grad_flow::{random_boundary_point, sharafutdinov_flow, theta_monotonicity_experiment, write_trajectory_csv};
use soulgeom::riccati::{integrate, monotonicity_report, write_riccati_csv, RiccatiSpec};
use soulgeom::{Point, Vector};

use crate::report::{Artifacts, Check, RunReport};
use crate::svg::Svg;
use crate::{Common, Failure};

type Outcome = Result<RunReport, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected 'x,y', got '{s}'"));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}'"));
    Ok((num(parts[0])?, num(parts[1])?))
}

/// `--body` is a JSON file path when such a file exists, otherwise a generator expression.
fn load_body(spec: &str) -> Result<(HalfplaneBody, Value), Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("reading {spec}: {e}")))?;
        let json: BodyJson = serde_json::from_str(&text).map_err(|e| input(format!("malformed body JSON in {spec}: {e}")))?;
        let body = HalfplaneBody::from_json(&json)?;
        let echo = json!({"path": spec, "body": json});
        return Ok((body, echo));
    }
    Ok((parse_generator(spec)?, json!({"generator": spec})))
}

fn pt(p: &Point) -> Value {
    json!([p.x, p.y])
}

fn write_svg(report: &mut RunReport, artifacts: &Artifacts, name: &str, svg: Svg) -> Result<(), Failure> {
    if let Some(path) = artifacts.svg_path(name) {
        artifacts.write(report, &path, svg.finish().as_bytes())?;
    }
    Ok(())
}

fn draw_body(svg: &mut Svg, body: &HalfplaneBody, stroke: &str, width: f64) {
    svg.polygon(body.vertices(), stroke, "none", width);
}

fn verification(report: &VerificationReport) -> Value {
    serde_json::to_value(report).expect("serializable")
}

// ---------------------------------------------------------------- soul

#[derive(Args)]
pub struct SoulArgs {
    /// Body: JSON file or generator such as stadium41a, rect(2,1), ngon(6,1).
    #[arg(long)]
    body: String,
    #[command(flatten)]
    pub common: Common,
}

pub fn soul(args: &SoulArgs, artifacts: &Artifacts) -> Outcome {
    let (body, echo) = load_body(&args.body)?;
    let mut report = RunReport::new("soul", json!({"body": echo}));
    let (inradius, max_set) = body.inradius_and_max_set()?;
    let construction = soul_of(&body)?;
    let tol = body.tol();
    let soul_level = body.min_slack(&construction.soul);
    let max_set_level =
        max_set.witness_points().iter().map(|p| (body.min_slack(p) - inradius).abs()).fold(0.0, f64::max);
    report.outputs = json!({
        "label": body.label(),
        "halfplanes": body.len(),
        "inradius": inradius,
        "max_set": max_set,
        "stages": construction.stages,
        "soul": pt(&construction.soul),
    });
    report.checks.push(Check::new("max_set_attains_inradius", max_set_level, tol));
    report.checks.push(Check::new("soul_in_max_set", (soul_level - inradius).abs(), tol));

    let mut svg = Svg::geometric(body.vertices());
    draw_body(&mut svg, &body, "black", 2.0);
    for k in 1..5 {
        if let Erosion::Body(b) = body.inner_parallel(inradius * k as f64 / 5.0)? {
            draw_body(&mut svg, &b, "#6699cc", 1.0);
        }
    }
    match &max_set {
        MaxSet::Segment { from, to, .. } => svg.polyline(&[*from, *to], "#cc3333", 3.0),
        MaxSet::Point { at, .. } => svg.dot(at, 5.0, "#cc3333"),
    }
    svg.dot(&construction.soul, 5.0, "black");
    svg.label(&format!("{}: soul ({:.6}, {:.6})", body.label(), construction.soul.x, construction.soul.y));
    write_svg(&mut report, artifacts, "soul.svg", svg)?;
    Ok(report)
}

// ---------------------------------------------------------------- evolve

#[derive(Args)]
pub struct EvolveArgs {
    #[arg(long)]
    body: String,
    /// Comma-separated erosion depths; defaults to nine equal fractions of the inradius.
    #[arg(long, value_delimiter = ',')]
    s: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

pub fn evolve(args: &EvolveArgs, artifacts: &Artifacts) -> Outcome {
    let (body, echo) = load_body(&args.body)?;
    let depths: Vec<f64> = if args.s.is_empty() {
        (1..=9).map(|k| body.inradius() * k as f64 / 10.0).collect()
    } else {
        args.s.clone()
    };
    let mut report = RunReport::new("evolve", json!({"body": echo, "s": depths}));
    let tol = body.tol();
    let mut worst_depth: f64 = 0.0;
    let mut worst_nesting: f64 = 0.0;
    let mut stages = Vec::new();
    let mut svg = Svg::geometric(body.vertices());
    draw_body(&mut svg, &body, "black", 2.0);
    let mut sorted = depths.clone();
    sorted.sort_by(f64::total_cmp);
    let mut previous: Option<HalfplaneBody> = None;
    for &s in &sorted {
        let stage = match body.inner_parallel(s)? {
            Erosion::Body(b) => {
                for v in b.vertices() {
                    worst_depth = worst_depth.max((body.min_slack(v) - s).abs());
                    if let Some(prev) = &previous {
                        worst_nesting = worst_nesting.max(-prev.min_slack(v));
                    }
                }
                draw_body(&mut svg, &b, "#6699cc", 1.0);
                let out = json!({"s": s, "kind": "body", "inradius": b.inradius(),
                    "vertices": b.vertices().iter().map(pt).collect::<Vec<_>>()});
                previous = Some(b);
                out
            }
            Erosion::Degenerate(m) => {
                match &m {
                    MaxSet::Segment { from, to, .. } => svg.polyline(&[*from, *to], "#cc3333", 3.0),
                    MaxSet::Point { at, .. } => svg.dot(at, 5.0, "#cc3333"),
                }
                json!({"s": s, "kind": "degenerate", "max_set": m})
            }
            Erosion::Empty => json!({"s": s, "kind": "empty"}),
        };
        stages.push(stage);
    }
    report.outputs = json!({"label": body.label(), "inradius": body.inradius(), "stages": stages});
    report.checks.push(Check::new("vertex_depth_equals_s", worst_depth, tol));
    report.checks.push(Check::new("nested", worst_nesting, tol));
    svg.label(&format!("{}: inner parallel bodies", body.label()));
    write_svg(&mut report, artifacts, "evolve.svg", svg)?;
    Ok(report)
}

// ---------------------------------------------------------------- excess

#[derive(Args)]
pub struct ExcessArgs {
    #[arg(long)]
    body: String,
    /// Boundary point `x,y`; defaults to the foot of the facet whose normal is closest to +y.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    point: Option<(f64, f64)>,
    /// At-least-normal direction `ux,uy` (normalized); defaults to that facet's normal.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    direction: Option<(f64, f64)>,
    #[arg(long, default_value_t = 0.02)]
    r_min: f64,
    #[arg(long, default_value_t = 0.2)]
    r_max: f64,
    #[arg(long, default_value_t = 9)]
    n: usize,
    /// Expected limit of θ(r)/r, checked with relative tolerance `--slope-rtol`.
    #[arg(long)]
    expect_slope: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    slope_rtol: f64,
    #[command(flatten)]
    pub common: Common,
}

fn default_boundary_point(body: &HalfplaneBody) -> Result<(Point, Vector), Failure> {
    let up = Vector::new(0.0, 1.0);
    let i = (0..body.len())
        .max_by(|&a, &b| body.normal(a).dot(&up).total_cmp(&body.normal(b).dot(&up)))
        .ok_or_else(|| input("empty body"))?;
    let n = body.normal(i);
    let c = body.chebyshev_center();
    let foot = c + n * body.slack(i, &c);
    if body.min_slack(&foot).abs() > body.tol() {
        return Err(input("default boundary point is not on the body; pass --point and --direction"));
    }
    Ok((foot, n))
}

pub fn excess(args: &ExcessArgs, artifacts: &Artifacts) -> Outcome {
    let (body, echo) = load_body(&args.body)?;
    let (p, u) = match (args.point, args.direction) {
        (Some((x, y)), Some((ux, uy))) => {
            let u = Vector::new(ux, uy);
            if !(u.norm() > 0.0) {
                return Err(input("direction must be nonzero"));
            }
            (Point::new(x, y), u.normalize())
        }
        (None, None) => default_boundary_point(&body)?,
        _ => return Err(input("--point and --direction go together")),
    };
    let mut report = RunReport::new(
        "excess",
        json!({"body": echo, "point": pt(&p), "direction": pt(&u), "r_min": args.r_min, "r_max": args.r_max,
               "n": args.n, "expect_slope": args.expect_slope, "slope_rtol": args.slope_rtol}),
    );
    let profile = excess_slope(&body, &p, &u, args.r_min, args.r_max, args.n)?;
    let theta = &profile.theta_values;
    let min_theta = theta.iter().cloned().fold(f64::INFINITY, f64::min);
    let worst_drop = theta.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    report.outputs = json!({"profile": profile});
    report.checks.push(Check::new("theta_nonnegative", -min_theta, 1e-12));
    report.checks.push(Check::new("theta_nondecreasing_in_r", worst_drop, 1e-12));
    if let Some(expected) = args.expect_slope {
        let rel = (profile.fitted_slope - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        report.checks.push(Check::new("fitted_slope", rel, args.slope_rtol));
    }

    let curve: Vec<Point> = profile.radii.iter().zip(theta).map(|(r, t)| Point::new(*r, *t)).collect();
    let top = theta.iter().cloned().fold(0.0, f64::max).max(profile.fitted_slope * args.r_max);
    let mut svg = Svg::plot(&[Point::new(0.0, 0.0), Point::new(args.r_max, top.max(1e-9))]);
    svg.polyline(&[Point::new(0.0, 0.0), Point::new(args.r_max, profile.fitted_slope * args.r_max)], "#cc3333", 1.0);
    svg.polyline(&curve, "black", 2.0);
    for c in &curve {
        svg.dot(c, 3.0, "black");
    }
    svg.label(&format!("θ(r) on {}, fitted slope {:.6}", body.label(), profile.fitted_slope));
    write_svg(&mut report, artifacts, "excess.svg", svg)?;
    Ok(report)
}

// ---------------------------------------------------------------- trapezoid

#[derive(Args)]
pub struct TrapezoidArgs {
    /// `plane` or `cone`.
    #[arg(long, default_value = "plane")]
    surface: String,
    /// Total angle of the cone (radians), required with `--surface cone`.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Minimal fraction of cone configurations with the apex inside the trapezoid.
    #[arg(long, default_value_t = 0.1)]
    min_enclosing: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn trapezoid(args: &TrapezoidArgs, _artifacts: &Artifacts) -> Outcome {
    let surface = match (args.surface.as_str(), args.beta) {
        ("plane", None) => Surface::Plane,
        ("cone", Some(beta)) => {
            ConeSurface::new(beta)?;
            Surface::Cone { beta }
        }
        ("plane", Some(_)) => return Err(input("--beta only applies to --surface cone")),
        ("cone", None) => return Err(input("--surface cone needs --beta")),
        (other, _) => return Err(input(format!("unknown surface '{other}'"))),
    };
    if args.trials == 0 {
        return Err(input("--trials must be positive"));
    }
    let mut report = RunReport::new(
        "trapezoid",
        json!({"surface": surface, "trials": args.trials, "seed": args.common.seed, "tol": args.tol,
               "min_enclosing": args.min_enclosing,
               "sampling": {"s": [0.0, 0.3], "r": [0.2, 2.0], "beta": [0.2, PI - 0.2]},
               "interpretation": "hinge p̂ at the origin, φ3 along e1, q2 = (s/sin β)e^{iβ}, σ leaves q2 at angle ψ ∈ [β+π, 2π]; measured = d(σ(r), φ3(l cos α3))"}),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
    let sweep = verify_trapezoid_on_surface(surface, args.trials, args.min_enclosing, args.tol, &mut rng)?;
    let fraction = sweep.apex_enclosing as f64 / sweep.valid as f64;
    let failures: Vec<Value> = sweep.failures.iter().take(20).map(|f| json!(f)).collect();
    let vr = VerificationReport {
        check: "trapezoid_comparison".into(),
        trials: sweep.valid,
        worst_slack: sweep.worst_slack,
        failures,
    };
    report.outputs = json!({"valid": sweep.valid, "skipped": sweep.skipped, "apex_enclosing": sweep.apex_enclosing,
        "apex_enclosing_fraction": fraction, "worst": sweep.worst, "verification": verification(&vr)});
    report.checks.push(Check::new("trapezoid_slack", sweep.worst_slack, args.tol));
    if let Surface::Cone { .. } = surface {
        report.checks.push(Check::new("apex_enclosing_fraction", args.min_enclosing - fraction, 0.0));
    }
    Ok(report)
}

// ---------------------------------------------------------------- flow

#[derive(Args)]
pub struct FlowArgs {
    #[arg(long)]
    body: String,
    /// Start point `x,y`; defaults to a seeded random boundary point.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    x0: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Time limit; the flow otherwise runs until it reaches a critical point.
    #[arg(long)]
    t_max: Option<f64>,
    /// Also sample θ_t(r) along the trajectory at this radius (needs a boundary start).
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn flow(args: &FlowArgs, artifacts: &Artifacts) -> Outcome {
    let (body, echo) = load_body(&args.body)?;
    let x0 = match args.x0 {
        Some((x, y)) => Point::new(x, y),
        None => random_boundary_point(&body, &mut ChaCha8Rng::seed_from_u64(args.common.seed)),
    };
    let mut report = RunReport::new(
        "flow",
        json!({"body": echo, "x0": pt(&x0), "dt": args.dt, "t_max": args.t_max, "theta_r": args.theta,
               "samples": args.samples, "seed": args.common.seed}),
    );
    let flow = sharafutdinov_flow(&body, &x0, args.dt, args.t_max.unwrap_or(f64::INFINITY))?;
    let growth = flow.level_growth_error();
    report.checks.push(Check::new("unit_level_growth", growth, 10.0 * args.dt));
    let theta = match args.theta {
        Some(r) => theta_monotonicity_experiment(&body, &x0, r, args.dt, args.samples)?,
        None => Vec::new(),
    };
    let mut theta_out = Value::Null;
    if args.theta.is_some() {
        let mut high = f64::NEG_INFINITY;
        let mut worst_drop: f64 = 0.0;
        for s in &theta {
            worst_drop = worst_drop.max(high - s.theta);
            high = high.max(s.theta);
        }
        report.checks.push(Check::new("theta_nondecreasing", worst_drop, 5.0 * args.dt));
        theta_out = json!({"count": theta.len(), "first": theta.first(), "last": theta.last(), "worst_drop": worst_drop});
    }
    report.outputs = json!({
        "final_position": pt(&flow.position),
        "final_level": flow.level,
        "elapsed": flow.elapsed(),
        "termination": flow.termination,
        "events": flow.events,
        "logged_steps": flow.step_log.len(),
        "level_growth_error": growth,
        "theta": theta_out,
    });
    if let Some(path) = artifacts.path("trajectory.csv") {
        let mut buf = Vec::new();
        write_trajectory_csv(&flow, &theta, &mut buf)?;
        artifacts.write(&mut report, &path, &buf)?;
    }
    let mut svg = Svg::geometric(body.vertices());
    draw_body(&mut svg, &body, "black", 2.0);
    for k in 1..5 {
        if let Erosion::Body(b) = body.inner_parallel(body.inradius() * k as f64 / 5.0)? {
            draw_body(&mut svg, &b, "#cccccc", 1.0);
        }
    }
    let path: Vec<Point> = flow.step_log.iter().map(|s| s.position).collect();
    svg.polyline(&path, "#cc3333", 2.0);
    svg.dot(&x0, 4.0, "#cc3333");
    svg.dot(&flow.position, 5.0, "black");
    svg.label(&format!("{}: flow from ({:.4}, {:.4})", body.label(), x0.x, x0.y));
    write_svg(&mut report, artifacts, "flow.svg", svg)?;
    Ok(report)
}

// ---------------------------------------------------------------- riccati

#[derive(Args)]
pub struct RiccatiArgs {
    /// Run description as a JSON file or inline JSON:
    /// {"u0": [[..]], "source": {"kind": "scalar", "value": 1}, "t_max": 1, "probes": [[..]]}.
    #[arg(long)]
    spec: String,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn riccati(args: &RiccatiArgs, artifacts: &Artifacts) -> Outcome {
    let text = if Path::new(&args.spec).is_file() {
        std::fs::read_to_string(&args.spec).map_err(|e| input(format!("reading {}: {e}", args.spec)))?
    } else {
        args.spec.clone()
    };
    let spec: RiccatiSpec = serde_json::from_str(&text).map_err(|e| input(format!("malformed Riccati spec: {e}")))?;
    let (state0, source, probes) = spec.build()?;
    let mut report = RunReport::new("riccati", json!({"spec": spec, "dt": args.dt}));
    let rep = monotonicity_report(&state0, &source, spec.t_max, args.dt, &probes)?;
    let traj = integrate(&state0, &source, spec.t_max, args.dt)?;
    let last = traj.last();
    let (lo, hi) = last.eigen_range();
    let rows: Vec<Vec<f64>> = (0..last.dim()).map(|i| (0..last.dim()).map(|j| last.u[(i, j)]).collect()).collect();
    let worst = rep.probes.iter().map(|p| p.worst_increase).fold(f64::NEG_INFINITY, f64::max);
    report.outputs = json!({"monotonicity": rep, "final": {"t": last.t, "u": rows, "lambda_min": lo, "lambda_max": hi}});
    report.checks.push(Check::new("probe_monotonicity", worst, rep.tolerance));
    if let Some(path) = artifacts.path("riccati.csv") {
        let mut buf = Vec::new();
        write_riccati_csv(&traj, &mut buf)?;
        artifacts.write(&mut report, &path, &buf)?;
    }
    Ok(report)
}

// ---------------------------------------------------------------- busemann

#[derive(Args)]
pub struct BusemannArgs {
    /// Total cone angle in radians (2π is the plane).
    #[arg(long, default_value_t = TAU)]
    beta: f64,
    /// Angular coordinate of the ray leaving the apex.
    #[arg(long, default_value_t = 0.0)]
    ray_angle: f64,
    /// Probes on an n × n polar grid, r ∈ [0, 2].
    #[arg(long, default_value_t = 9)]
    grid: usize,
    /// Finite time for the oracle `d(x, σ(t)) − t`.
    #[arg(long, default_value_t = 1e6)]
    t_finite: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn busemann(args: &BusemannArgs, _artifacts: &Artifacts) -> Outcome {
    let cone = ConeSurface::new(args.beta)?;
    if args.grid < 2 {
        return Err(input("--grid must be at least 2"));
    }
    let mut report = RunReport::new(
        "busemann",
        json!({"beta": args.beta, "ray_angle": args.ray_angle, "grid": args.grid, "t_finite": args.t_finite}),
    );
    let n = args.grid;
    let mut probes = Vec::new();
    let mut points = Vec::new();
    let mut worst_finite: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = ConePoint::new(2.0 * i as f64 / (n - 1) as f64, args.ray_angle + cone.beta() * j as f64 / n as f64)?;
            let b = cone.busemann(args.ray_angle, &x);
            let bt = cone.busemann_at(args.ray_angle, &x, args.t_finite);
            worst_finite = worst_finite.max((b - bt).abs());
            probes.push(json!({"r": x.r, "theta": x.theta, "b": b, "b_finite": bt}));
            points.push((x, b));
        }
    }
    let worst_ray = (0..n)
        .map(|i| {
            let r = 2.0 * i as f64 / (n - 1) as f64;
            (cone.busemann(args.ray_angle, &ConePoint { r, theta: args.ray_angle }) + r).abs()
        })
        .fold(0.0, f64::max);
    let mut worst_lip: f64 = 0.0;
    for (x, bx) in &points {
        for (y, by) in &points {
            worst_lip = worst_lip.max((bx - by).abs() - cone.distance(x, y));
        }
    }
    report.checks.push(Check::new("on_ray_equals_minus_r", worst_ray, 1e-12));
    report.checks.push(Check::new("finite_t_agreement", worst_finite, 1e-5));
    report.checks.push(Check::new("one_lipschitz", worst_lip, 1e-12));
    if cone.beta() >= PI {
        let worst_orth = (0..n)
            .map(|i| {
                let r = 2.0 * i as f64 / (n - 1) as f64;
                cone.busemann(args.ray_angle, &ConePoint { r, theta: args.ray_angle + FRAC_PI_2 }).abs()
            })
            .fold(0.0, f64::max);
        report.checks.push(Check::new("orthogonal_probe_zero", worst_orth, 1e-12));
    }
    report.outputs = json!({"probes": probes});
    Ok(report)
}
