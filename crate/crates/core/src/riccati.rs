//! Riccati evolution `u′ + u² + R = 0` of the second fundamental form of equidistant
//! hypersurfaces, with `R(t)` positive semidefinite.

use std::io::Write;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{GeomError, Result};

pub const MAX_DIM: usize = 8;
const SYM_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;

/// The curvature term `R(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureSource {
    /// `R ≡ c·I`.
    Scalar(f64),
    Constant(DMatrix<f64>),
    /// `R(t) = A + t·B` with `A, B` PSD.
    Affine { a: DMatrix<f64>, b: DMatrix<f64> },
    /// `R(t) = G(t)·G(t)ᵀ` with `G(t) = G0 + t·G1`; PSD for every `t`.
    Gram { g0: DMatrix<f64>, g1: DMatrix<f64> },
}

impl CurvatureSource {
    pub fn eval(&self, t: f64, d: usize) -> DMatrix<f64> {
        match self {
            CurvatureSource::Scalar(c) => DMatrix::identity(d, d) * *c,
            CurvatureSource::Constant(m) => m.clone(),
            CurvatureSource::Affine { a, b } => a + b * t,
            CurvatureSource::Gram { g0, g1 } => {
                let g = g0 + g1 * t;
                &g * g.transpose()
            }
        }
    }

    fn check(&self, t: f64, d: usize) -> Result<()> {
        let r = self.eval(t, d);
        if r.nrows() != d || r.ncols() != d {
            return Err(GeomError::domain(format!("curvature term is {}×{}, expected {d}×{d}", r.nrows(), r.ncols())));
        }
        let min = r.symmetric_eigen().eigenvalues.min();
        if min < -PSD_TOL {
            return Err(GeomError::domain(format!("curvature term not PSD at t = {t}: min eigenvalue {min}")));
        }
        Ok(())
    }
}

/// A seeded source `G(t)·G(t)ᵀ` with entries of `G0, G1` uniform in `[−1, 1]`.
pub fn random_psd_source<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CurvatureSource {
    let mut m = || DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..=1.0));
    let g0 = m();
    let g1 = m();
    CurvatureSource::Gram { g0, g1 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiState {
    pub t: f64,
    pub u: DMatrix<f64>,
}

impl RiccatiState {
    pub fn new(t: f64, u: DMatrix<f64>) -> Result<Self> {
        let d = u.nrows();
        if d == 0 || d != u.ncols() || d > MAX_DIM {
            return Err(GeomError::domain(format!("u must be square with 1 <= d <= {MAX_DIM}")));
        }
        if (&u - u.transpose()).amax() > SYM_TOL * (1.0 + u.amax()) {
            return Err(GeomError::domain("u is not symmetric"));
        }
        Ok(Self { t, u })
    }

    pub fn scalar(t: f64, u: f64) -> Self {
        Self { t, u: DMatrix::from_element(1, 1, u) }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// Extreme eigenvalues `(min, max)`.
    pub fn eigen_range(&self) -> (f64, f64) {
        let e = self.u.clone().symmetric_eigen().eigenvalues;
        (e.min(), e.max())
    }

    fn norm(&self) -> f64 {
        let (lo, hi) = self.eigen_range();
        lo.abs().max(hi.abs())
    }
}

fn rhs(u: &DMatrix<f64>, r: &DMatrix<f64>) -> DMatrix<f64> {
    -(u * u) - r
}

/// One RK4 step of `u′ = −u² − R(t)`, symmetrized. Fails with a focal-point bracket
/// once `‖u‖` would exceed `1/dt`.
pub fn riccati_step(state: &RiccatiState, source: &CurvatureSource, dt: f64) -> Result<RiccatiState> {
    if !(dt > 0.0) {
        return Err(GeomError::domain("dt must be positive"));
    }
    let d = state.dim();
    let (t, u) = (state.t, &state.u);
    let r0 = source.eval(t, d);
    let rm = source.eval(t + 0.5 * dt, d);
    let r1 = source.eval(t + dt, d);
    let k1 = rhs(u, &r0);
    let k2 = rhs(&(u + &k1 * (0.5 * dt)), &rm);
    let k3 = rhs(&(u + &k2 * (0.5 * dt)), &rm);
    let k4 = rhs(&(u + &k3 * dt), &r1);
    let next = u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let next = (&next + next.transpose()) * 0.5;
    let out = RiccatiState { t: t + dt, u: next };
    // Accepted states satisfy ‖u‖ <= 1/dt, so a pole ahead of t lies beyond t + dt; a
    // rejected step puts it before t + 2·dt.
    if !out.u.iter().all(|x| x.is_finite()) || out.norm() > 1.0 / dt {
        return Err(GeomError::FocalPoint { t_lo: t, t_hi: t + 2.0 * dt });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalBracket {
    pub t_lo: f64,
    pub t_hi: f64,
}

/// States at every step up to `t_max`, or up to a focal point.
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiTrajectory {
    pub states: Vec<RiccatiState>,
    pub focal: Option<FocalBracket>,
}

impl RiccatiTrajectory {
    pub fn last(&self) -> &RiccatiState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

pub fn integrate(state0: &RiccatiState, source: &CurvatureSource, t_max: f64, dt: f64) -> Result<RiccatiTrajectory> {
    if !(dt > 0.0) || !(t_max >= state0.t) {
        return Err(GeomError::domain("need dt > 0 and t_max >= t0"));
    }
    let state0 = RiccatiState::new(state0.t, state0.u.clone())?;
    if state0.norm() > 1.0 / dt {
        return Err(GeomError::domain("initial ‖u‖ exceeds 1/dt; reduce dt"));
    }
    let d = state0.dim();
    let steps = ((t_max - state0.t) / dt).round() as usize;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(state0);
    for k in 0..steps {
        let cur = states.last().unwrap();
        if k % 16 == 0 {
            source.check(cur.t, d)?;
        }
        match riccati_step(cur, source, dt) {
            Ok(mut next) => {
                next.t = states[0].t + (k + 1) as f64 * dt;
                states.push(next);
            }
            Err(GeomError::FocalPoint { t_lo, t_hi }) => {
                return Ok(RiccatiTrajectory { states, focal: Some(FocalBracket { t_lo, t_hi }) });
            }
            Err(e) => return Err(e),
        }
    }
    source.check(states.last().unwrap().t, d)?;
    Ok(RiccatiTrajectory { states, focal: None })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeMonotonicity {
    pub probe: Vec<f64>,
    pub initial: f64,
    pub last: f64,
    /// Largest `q(t) − q(s)` over `s < t` with `q = ⟨u E, E⟩`.
    pub worst_increase: f64,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub t_end: f64,
    pub steps: usize,
    pub tolerance: f64,
    pub probes: Vec<ProbeMonotonicity>,
    pub all_monotone: bool,
    /// Set when integration stopped at a focal point; the probes cover the part before it.
    pub focal: Option<FocalBracket>,
}

/// Integrates and reports whether each `⟨u(t)E, E⟩` is non-increasing within `10·dt`.
pub fn monotonicity_report(
    state0: &RiccatiState,
    source: &CurvatureSource,
    t_max: f64,
    dt: f64,
    probes: &[Vec<f64>],
) -> Result<MonotonicityReport> {
    let traj = integrate(state0, source, t_max, dt)?;
    let tolerance = 10.0 * dt;
    let d = state0.dim();
    let probes = probes
        .iter()
        .map(|e| {
            if e.len() != d {
                return Err(GeomError::domain(format!("probe has dimension {}, expected {d}", e.len())));
            }
            let v = nalgebra::DVector::from_column_slice(e);
            let q: Vec<f64> = traj.states.iter().map(|s| v.dot(&(&s.u * &v))).collect();
            let mut low = f64::INFINITY;
            let mut worst = f64::NEG_INFINITY;
            for &x in &q {
                worst = worst.max(x - low);
                low = low.min(x);
            }
            let worst = if q.len() < 2 { 0.0 } else { worst };
            Ok(ProbeMonotonicity {
                probe: e.clone(),
                initial: q[0],
                last: *q.last().unwrap(),
                worst_increase: worst,
                monotone: worst <= tolerance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotonicityReport {
        t_end: traj.last().t,
        steps: traj.states.len() - 1,
        tolerance,
        all_monotone: probes.iter().all(|p| p.monotone),
        probes,
        focal: traj.focal,
    })
}

/// CSV with `t`, the upper-triangle entries `u_i_j`, and the extreme eigenvalues.
pub fn write_riccati_csv<W: Write>(traj: &RiccatiTrajectory, out: W) -> Result<()> {
    let d = traj.states[0].dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for i in 0..d {
        for j in i..d {
            header.push(format!("u_{}_{}", i + 1, j + 1));
        }
    }
    header.extend(["lambda_min".to_string(), "lambda_max".to_string()]);
    let io = |e: csv::Error| GeomError::Internal(format!("csv: {e}"));
    w.write_record(&header).map_err(io)?;
    for s in &traj.states {
        let (lo, hi) = s.eigen_range();
        let mut row = vec![fmt(s.t)];
        for i in 0..d {
            for j in i..d {
                row.push(fmt(s.u[(i, j)]));
            }
        }
        row.extend([fmt(lo), fmt(hi)]);
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| GeomError::Internal(format!("csv: {e}")))?;
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

/// JSON description of a run: matrices as row lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiccatiSpec {
    pub u0: Vec<Vec<f64>>,
    pub source: SourceSpec,
    pub t_max: f64,
    #[serde(default)]
    pub probes: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    Scalar { value: f64 },
    Constant { matrix: Vec<Vec<f64>> },
    Affine { a: Vec<Vec<f64>>, b: Vec<Vec<f64>> },
    Gram { g0: Vec<Vec<f64>>, g1: Vec<Vec<f64>> },
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(GeomError::Parse("matrix rows must be nonempty and of equal length".into()));
    }
    Ok(DMatrix::from_fn(n, rows[0].len(), |i, j| rows[i][j]))
}

impl SourceSpec {
    pub fn build(&self) -> Result<CurvatureSource> {
        Ok(match self {
            SourceSpec::Scalar { value } => CurvatureSource::Scalar(*value),
            SourceSpec::Constant { matrix } => CurvatureSource::Constant(matrix_from_rows(matrix)?),
            SourceSpec::Affine { a, b } => {
                CurvatureSource::Affine { a: matrix_from_rows(a)?, b: matrix_from_rows(b)? }
            }
            SourceSpec::Gram { g0, g1 } => {
                CurvatureSource::Gram { g0: matrix_from_rows(g0)?, g1: matrix_from_rows(g1)? }
            }
        })
    }
}

impl RiccatiSpec {
    /// Initial state at `t = 0`, the source, and the probes (coordinate axes when none given).
    pub fn build(&self) -> Result<(RiccatiState, CurvatureSource, Vec<Vec<f64>>)> {
        let state = RiccatiState::new(0.0, matrix_from_rows(&self.u0)?)?;
        let d = state.dim();
        let probes = if self.probes.is_empty() {
            (0..d).map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect()).collect()
        } else {
            self.probes.clone()
        };
        Ok((state, self.source.build()?, probes))
    }
}
