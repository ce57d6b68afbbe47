//! Time integration of the contact Euler-Arnold equation and its reductions.
//!
//! Five variants share one classical RK4 stepper acting on the momentum-type
//! variable, with the stream function recovered by elliptic inversion at
//! every stage:
//!
//! - `ContactEa`: `m_t = -u(m) - (n+2) m E(f)`, `u = S_θ f`, `m = f - Δf`;
//! - `CamassaHolm`: the direct 1-D composition `m_t = -f m_x - 2 m f_x`
//!   (kept as an independent code path; it must agree with `ContactEa` on
//!   the circle model to spectral tolerance);
//! - `Quasigeostrophic`: `ω_t = -{f, ω}` with `ω = Δf - α²f` on the quotient
//!   torus (α² is the Froude parameter);
//! - `BetaPlane`: `ω_t = -{f, ω}` with `ω = Δf - α²f - βψ`;
//! - `Reduced1d`: `φ_t = -4g² + 4g g_yy + y g g_yyy - y g_y g_yy` with
//!   `φ = g - g_yy` on a large periodic box, `y` being the periodic
//!   coordinate recentred to `[-L/2, L/2)`.
//!
//! Every quadratic product is 2/3-dealiased. The stepper enforces a CFL check
//! at the start of each step (violations are reported, not fatal), advances
//! the breakdown integral `∫ ‖E(f)‖_∞ dt` by the left-endpoint rule, and
//! turns non-finite values or a sup-norm past the configured threshold into
//! a terminal [`Error::Blowup`] carrying that integral. [`run`] drives a full
//! trajectory, invokes observers on a cadence and reports blowup as a status
//! rather than an error.

use crate::contact::{ContactModel, ModelKind};
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::lagrangian::{self, FlowMap};
use crate::spectral::{Grid, ScalarField, Spectrum};

/// Which equation a simulation advances, with its model and parameters.
#[derive(Debug, Clone)]
pub enum EquationKind {
    ContactEa {
        model: ContactModel,
    },
    CamassaHolm {
        model: ContactModel,
    },
    Quasigeostrophic {
        model: ContactModel,
        alpha: f64,
    },
    BetaPlane {
        model: ContactModel,
        alpha: f64,
        beta: f64,
        psi: ScalarField,
    },
    Reduced1d {
        grid: Grid,
    },
}

impl EquationKind {
    /// Full contact Euler-Arnold flow on S¹ or T³.
    pub fn contact_ea(model: ContactModel) -> Result<Self> {
        match model.kind() {
            ModelKind::CircleCh | ModelKind::Torus3 => Ok(Self::ContactEa { model }),
            ModelKind::QuantoTorus2 => Err(Error::UnsupportedKind {
                op: "contact_ea",
                kind: model.kind().to_string(),
            }),
        }
    }

    /// Camassa-Holm on the circle (direct 1-D right-hand side).
    pub fn camassa_holm(model: ContactModel) -> Result<Self> {
        if model.kind() != ModelKind::CircleCh {
            return Err(Error::UnsupportedKind {
                op: "camassa_holm",
                kind: model.kind().to_string(),
            });
        }
        Ok(Self::CamassaHolm { model })
    }

    /// Quasigeostrophic f-plane flow on the quotient torus. `alpha ≥ 0`.
    pub fn quasigeostrophic(model: ContactModel, alpha: f64) -> Result<Self> {
        if model.kind() != ModelKind::QuantoTorus2 {
            return Err(Error::UnsupportedKind {
                op: "quasigeostrophic",
                kind: model.kind().to_string(),
            });
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {alpha} must be >= 0"
            )));
        }
        Ok(Self::Quasigeostrophic { model, alpha })
    }

    /// β-plane flow: `ω = Δf - α²f - βψ` for a fixed profile ψ.
    pub fn beta_plane(
        model: ContactModel,
        alpha: f64,
        beta: f64,
        psi: ScalarField,
    ) -> Result<Self> {
        if model.kind() != ModelKind::QuantoTorus2 {
            return Err(Error::UnsupportedKind {
                op: "beta_plane",
                kind: model.kind().to_string(),
            });
        }
        if !(alpha.is_finite() && alpha >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "beta_plane parameters must be finite with alpha >= 0 (alpha = {alpha}, beta = {beta})"
            )));
        }
        if psi.grid() != model.grid() {
            return Err(Error::GridMismatch("beta_plane: psi grid".into()));
        }
        Ok(Self::BetaPlane {
            model,
            alpha,
            beta,
            psi,
        })
    }

    /// Reduced one-dimensional shear equation on a periodic box.
    pub fn reduced_1d(grid: Grid) -> Result<Self> {
        if grid.ndim() != 1 {
            return Err(Error::InvalidArgument(format!(
                "reduced_1d needs a 1-D grid, got {} axes",
                grid.ndim()
            )));
        }
        Ok(Self::Reduced1d { grid })
    }

    pub fn grid(&self) -> &Grid {
        match self {
            Self::ContactEa { model }
            | Self::CamassaHolm { model }
            | Self::Quasigeostrophic { model, .. }
            | Self::BetaPlane { model, .. } => model.grid(),
            Self::Reduced1d { grid } => grid,
        }
    }

    /// Contact model backing the variant, when there is one.
    pub fn model(&self) -> Option<&ContactModel> {
        match self {
            Self::ContactEa { model }
            | Self::CamassaHolm { model }
            | Self::Quasigeostrophic { model, .. }
            | Self::BetaPlane { model, .. } => Some(model),
            Self::Reduced1d { .. } => None,
        }
    }

    /// Contact dimension parameter entering the transport exponents.
    pub fn n(&self) -> u32 {
        match self {
            Self::ContactEa { model } => model.n(),
            Self::CamassaHolm { .. } | Self::Reduced1d { .. } => 0,
            Self::Quasigeostrophic { .. } | Self::BetaPlane { .. } => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ContactEa { .. } => "contact-ea",
            Self::CamassaHolm { .. } => "camassa-holm",
            Self::Quasigeostrophic { .. } => "quasigeostrophic",
            Self::BetaPlane { .. } => "beta-plane",
            Self::Reduced1d { .. } => "reduced-1d",
        }
    }
}

/// Evolving state: momentum-type variable (m, ω or φ depending on the
/// variant), current time, step count and the accumulated breakdown integral
/// `∫₀ᵗ ‖E(f)‖_∞ dτ` (left-endpoint rule, advanced once per step).
#[derive(Debug, Clone)]
pub struct SimState {
    pub eq: EquationKind,
    pub t: f64,
    pub m: ScalarField,
    pub step_count: u64,
    pub bkm_integral: f64,
}

impl SimState {
    pub fn new(eq: EquationKind, m0: ScalarField) -> Result<Self> {
        if m0.grid() != eq.grid() {
            return Err(Error::GridMismatch("SimState: initial data grid".into()));
        }
        if !m0.is_finite() {
            return Err(Error::NonFinite {
                context: "SimState initial data".into(),
            });
        }
        Ok(Self {
            eq,
            t: 0.0,
            m: m0,
            step_count: 0,
            bkm_integral: 0.0,
        })
    }
}

/// Stepper parameters.
#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    pub dt: f64,
    /// Advective CFL bound `dt ‖u‖_∞ / h_min`; exceeding it is reported per
    /// step, not fatal.
    pub cfl_limit: f64,
    /// Sup-norm threshold past which the run is declared blown up.
    pub blowup_linf_threshold: f64,
    /// Apply the 2/3 truncation to the state after each step.
    pub dealias: bool,
}

impl StepperConfig {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt = {dt} must be positive"
            )));
        }
        Ok(Self {
            dt,
            cfl_limit: 0.4,
            blowup_linf_threshold: 1e6,
            dealias: true,
        })
    }
}

/// Per-step report.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    /// `dt ‖u‖_∞ / h_min` measured at the start of the step.
    pub cfl: f64,
    pub cfl_exceeded: bool,
    /// `‖E(f)‖_∞` at the start of the step (breakdown-integral integrand).
    pub reeb_linf: f64,
    pub u_linf: f64,
}

/// One right-hand-side evaluation plus the by-products the stepper needs.
struct RhsEval {
    tendency: ScalarField,
    /// Dealiased spectrum of the stream function (f, or g for the reduced
    /// equation), for particle interpolation.
    stream_hat: Spectrum,
    u_linf: f64,
    reeb_linf: f64,
}

/// Periodic coordinate along `axis` recentred to `[-L/2, L/2)`.
pub fn sawtooth_coordinate(grid: &Grid, axis: usize) -> Result<ScalarField> {
    if axis >= grid.ndim() {
        return Err(Error::AxisOutOfRange {
            axis,
            ndim: grid.ndim(),
        });
    }
    let l = grid.length(axis);
    Ok(ScalarField::from_fn(grid, |x| {
        let c = x[axis];
        if c < 0.5 * l {
            c
        } else {
            c - l
        }
    }))
}

/// Time derivative of the state variable (the equation right-hand side).
pub fn rhs(state: &SimState) -> Result<ScalarField> {
    Ok(eval_rhs(&state.eq, &state.m)?.tendency)
}

fn eval_rhs(eq: &EquationKind, m: &ScalarField) -> Result<RhsEval> {
    match eq {
        EquationKind::ContactEa { model } => {
            let mut f_hat = m.spectrum();
            f_hat.scale_isotropic(|k2| 1.0 / (1.0 + k2));
            f_hat.dealias();
            let f = f_hat.clone().into_field();
            let u = model.contact_vector_field(&f)?;
            let ef = model.reeb_derivative(&f)?;
            let advection = model.advect(&u, m)?;
            let stretch = m.product(&ef)?.dealias();
            let mut tendency = advection.scaled(-1.0);
            tendency.axpy(-((model.n() + 2) as f64), &stretch)?;
            Ok(RhsEval {
                tendency,
                u_linf: u.linf(),
                reeb_linf: ef.linf(),
                stream_hat: f_hat,
            })
        }
        EquationKind::CamassaHolm { .. } => {
            // m_t = -f m_x - 2 m f_x, assembled from 1-D primitives only.
            let mut f_hat = m.spectrum();
            f_hat.scale_isotropic(|k2| 1.0 / (1.0 + k2));
            f_hat.dealias();
            let f = f_hat.clone().into_field();
            let fx = f.partial_derivative(0)?;
            let mx = m.partial_derivative(0)?;
            let mut tendency = f.product(&mx)?.dealias().scaled(-1.0);
            tendency.axpy(-2.0, &m.product(&fx)?.dealias())?;
            Ok(RhsEval {
                tendency,
                u_linf: f.linf(),
                reeb_linf: fx.linf(),
                stream_hat: f_hat,
            })
        }
        EquationKind::Quasigeostrophic { model, alpha } => {
            let alpha2 = alpha * alpha;
            let mut f_hat = m.spectrum();
            f_hat.scale_isotropic(|k2| {
                let d = -(k2 + alpha2);
                if d == 0.0 {
                    0.0
                } else {
                    1.0 / d
                }
            });
            f_hat.dealias();
            let f = f_hat.clone().into_field();
            let u = model.hamiltonian_field(&f)?;
            let tendency = model.advect(&u, m)?.scaled(-1.0);
            Ok(RhsEval {
                tendency,
                u_linf: u.linf(),
                reeb_linf: 0.0,
                stream_hat: f_hat,
            })
        }
        EquationKind::BetaPlane {
            model,
            alpha,
            beta,
            psi,
        } => {
            let alpha2 = alpha * alpha;
            let forced = m.add(&psi.scaled(*beta))?;
            let mut f_hat = forced.spectrum();
            f_hat.scale_isotropic(|k2| {
                let d = -(k2 + alpha2);
                if d == 0.0 {
                    0.0
                } else {
                    1.0 / d
                }
            });
            f_hat.dealias();
            let f = f_hat.clone().into_field();
            let u = model.hamiltonian_field(&f)?;
            let tendency = model.advect(&u, m)?.scaled(-1.0);
            Ok(RhsEval {
                tendency,
                u_linf: u.linf(),
                reeb_linf: 0.0,
                stream_hat: f_hat,
            })
        }
        EquationKind::Reduced1d { grid } => {
            // φ_t = -4g² + 4 g g_yy + y (g g_yyy - g_y g_yy), g = (1-∂²)⁻¹ φ
            let mut g_hat = m.spectrum();
            g_hat.scale_isotropic(|k2| 1.0 / (1.0 + k2));
            g_hat.dealias();
            let g = g_hat.clone().into_field();
            let gy = g.partial_derivative(0)?;
            let gyy = g.apply_isotropic(|k2| -k2);
            let gyyy = gyy.partial_derivative(0)?;
            let y = sawtooth_coordinate(grid, 0)?;

            let mut tendency = g.product(&g)?.dealias().scaled(-4.0);
            tendency.axpy(4.0, &g.product(&gyy)?.dealias())?;
            let shear = g.product(&gyyy)?.sub(&gy.product(&gyy)?)?.dealias();
            tendency.axpy(1.0, &y.product(&shear)?.dealias())?;

            // the momentum is transported by the flow of y g ∂_y
            let u_linf = y.product(&g)?.linf();
            Ok(RhsEval {
                u_linf,
                reeb_linf: g.linf(),
                tendency,
                stream_hat: g_hat,
            })
        }
    }
}

/// One classical RK4 step. See [`step_with_flow`] for the particle-coupled
/// variant; this is the plain field update.
pub fn step_rk4(state: &mut SimState, cfg: &StepperConfig) -> Result<StepInfo> {
    step_with_flow(state, cfg, None)
}

/// One RK4 step that optionally advances a particle [`FlowMap`] through the
/// same four stages, interpolating each stage's stream function, so field and
/// particles share a single 4th-order clock.
pub fn step_with_flow(
    state: &mut SimState,
    cfg: &StepperConfig,
    flow: Option<&mut FlowMap>,
) -> Result<StepInfo> {
    let dt = cfg.dt;
    if dt == 0.0 || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt = {dt}")));
    }

    let e1 = eval_rhs(&state.eq, &state.m)?;
    let h = state.eq.grid().min_spacing();
    let cfl = dt.abs() * e1.u_linf / h;
    let cfl_exceeded = cfl > cfg.cfl_limit;

    let mut m2 = state.m.clone();
    m2.axpy(0.5 * dt, &e1.tendency)?;
    let e2 = eval_rhs(&state.eq, &m2)?;
    let mut m3 = state.m.clone();
    m3.axpy(0.5 * dt, &e2.tendency)?;
    let e3 = eval_rhs(&state.eq, &m3)?;
    let mut m4 = state.m.clone();
    m4.axpy(dt, &e3.tendency)?;
    let e4 = eval_rhs(&state.eq, &m4)?;

    if let Some(flow) = flow {
        let model = state.eq.model().ok_or(Error::UnsupportedKind {
            op: "particle flow",
            kind: "Reduced1d".into(),
        })?;
        let p1 = flow.positions().to_vec();
        let (v1, l1) = lagrangian::stage_rates(model, &e1.stream_hat, &p1)?;
        let p2 = lagrangian::displaced(&p1, 0.5 * dt, &v1);
        let (v2, l2) = lagrangian::stage_rates(model, &e2.stream_hat, &p2)?;
        let p3 = lagrangian::displaced(&p1, 0.5 * dt, &v2);
        let (v3, l3) = lagrangian::stage_rates(model, &e3.stream_hat, &p3)?;
        let p4 = lagrangian::displaced(&p1, dt, &v3);
        let (v4, l4) = lagrangian::stage_rates(model, &e4.stream_hat, &p4)?;
        flow.commit_rk4(
            state.eq.grid(),
            dt,
            [&v1, &v2, &v3, &v4],
            [&l1, &l2, &l3, &l4],
        );
    }

    let mut new_m = state.m.clone();
    new_m.axpy(dt / 6.0, &e1.tendency)?;
    new_m.axpy(dt / 3.0, &e2.tendency)?;
    new_m.axpy(dt / 3.0, &e3.tendency)?;
    new_m.axpy(dt / 6.0, &e4.tendency)?;
    if cfg.dealias {
        new_m = new_m.dealias();
    }

    let bkm_next = state.bkm_integral + dt.abs() * e1.reeb_linf;
    let m_linf = if new_m.is_finite() {
        new_m.linf()
    } else {
        f64::INFINITY
    };
    if !m_linf.is_finite() || m_linf > cfg.blowup_linf_threshold {
        return Err(Error::Blowup {
            t: state.t + dt,
            m_linf,
            bkm_integral: bkm_next,
        });
    }

    state.m = new_m;
    state.t += dt;
    state.step_count += 1;
    state.bkm_integral = bkm_next;
    Ok(StepInfo {
        cfl,
        cfl_exceeded,
        reeb_linf: e1.reeb_linf,
        u_linf: e1.u_linf,
    })
}

/// Diagnostics sample of the current state.
pub fn diagnostics_record(state: &SimState) -> Result<DiagnosticsRecord> {
    let mut rec = match &state.eq {
        EquationKind::ContactEa { model } | EquationKind::CamassaHolm { model } => {
            let f = model.inverse_contact_laplacian(&state.m)?;
            let mut rec = diagnostics::conserved_quantities(model, &state.m, &f, model.n())?;
            rec.reeb_f_linf = model.reeb_derivative(&f)?.linf();
            rec
        }
        EquationKind::Quasigeostrophic { .. } | EquationKind::BetaPlane { .. } => {
            diagnostics::quotient_quantities(&state.m)
        }
        EquationKind::Reduced1d { .. } => {
            let g = state.m.helmholtz_inverse();
            let mut rec = diagnostics::momentum_quantities(&state.m, &g, 0)?;
            // in the 3-D embedding f = z g the Reeb derivative is g itself
            rec.reeb_f_linf = g.linf();
            rec
        }
    };
    rec.t = state.t;
    rec.bkm_integral = state.bkm_integral;
    Ok(rec)
}

/// Run configuration: stepper, final time, observer cadence in steps.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub stepper: StepperConfig,
    pub t_end: f64,
    pub cadence: usize,
}

/// How a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    /// Blowup detected: time of detection, momentum sup norm there, and the
    /// breakdown integral accumulated up to that point.
    Blowup {
        t: f64,
        m_linf: f64,
        bkm_integral: f64,
    },
}

/// Trajectory summary: terminal status, final (last finite) state, recorded
/// diagnostics series, final particle flow and CFL bookkeeping.
#[derive(Debug)]
pub struct RunSummary {
    pub status: RunStatus,
    pub state: SimState,
    pub records: Vec<DiagnosticsRecord>,
    pub flow: Option<FlowMap>,
    pub cfl_violations: usize,
}

/// Integrate from `m0` to `cfg.t_end`, recording diagnostics every
/// `cfg.cadence` steps (plus the initial and final states) and invoking the
/// observer on each record. Blowup terminates the run with a partial
/// trajectory and `RunStatus::Blowup`; all other errors propagate.
pub fn run(
    eq: EquationKind,
    m0: ScalarField,
    cfg: &RunConfig,
    mut flow: Option<FlowMap>,
    mut observer: impl FnMut(&SimState, &DiagnosticsRecord, Option<&FlowMap>) -> Result<()>,
) -> Result<RunSummary> {
    if !(cfg.t_end.is_finite() && cfg.t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_end = {} must be nonnegative",
            cfg.t_end
        )));
    }
    if cfg.cadence == 0 {
        return Err(Error::InvalidArgument("cadence must be >= 1".into()));
    }
    if !(cfg.stepper.dt.is_finite() && cfg.stepper.dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt = {} must be positive",
            cfg.stepper.dt
        )));
    }
    if !(cfg.stepper.cfl_limit > 0.0 && cfg.stepper.cfl_limit <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "cfl_limit = {} must lie in (0, 1]",
            cfg.stepper.cfl_limit
        )));
    }

    let mut state = SimState::new(eq, m0)?;
    let mut cfl_violations = 0usize;
    let mut records = Vec::new();

    let rec = diagnostics_record(&state)?;
    observer(&state, &rec, flow.as_ref())?;
    records.push(rec);

    let eps = 1e-12 * cfg.t_end.max(1.0);
    let mut status = RunStatus::Completed;
    while state.t < cfg.t_end - eps {
        let dt = cfg.stepper.dt.min(cfg.t_end - state.t);
        let step_cfg = StepperConfig { dt, ..cfg.stepper };
        match step_with_flow(&mut state, &step_cfg, flow.as_mut()) {
            Ok(info) => {
                if info.cfl_exceeded {
                    cfl_violations += 1;
                }
            }
            Err(Error::Blowup {
                t,
                m_linf,
                bkm_integral,
            }) => {
                status = RunStatus::Blowup {
                    t,
                    m_linf,
                    bkm_integral,
                };
                break;
            }
            Err(e) => return Err(e),
        }
        let at_end = state.t >= cfg.t_end - eps;
        if state.step_count % cfg.cadence as u64 == 0 || at_end {
            let rec = diagnostics_record(&state)?;
            observer(&state, &rec, flow.as_ref())?;
            records.push(rec);
        }
    }

    // make sure the last finite state is recorded (blowup path or cadence gap)
    if records.last().map(|r| r.t) != Some(state.t) {
        let rec = diagnostics_record(&state)?;
        observer(&state, &rec, flow.as_ref())?;
        records.push(rec);
    }

    Ok(RunSummary {
        status,
        state,
        records,
        flow,
        cfl_violations,
    })
}
