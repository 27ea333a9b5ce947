//! Time integration of the rescaled fast-diffusion equation.
//!
//! The unknown is `ψ = w^p` (plane) or `ψ = v^p` (sphere), which makes the
//! time derivative linear in the unknown; the nonlinear elliptic part
//! evaluates `w = ψ^m`. The base scheme is backward Euler with step-doubling
//! error control: every step is computed once with `ds` and twice with
//! `ds/2`, the Richardson-extrapolated (second-order) value is kept, and the
//! difference drives acceptance and step-size adaptation.
//!
//! Sphere-zonal is the production representation: the domain is compact, so
//! there is no artificial outer boundary and the stationary states are
//! bounded away from the degenerate `ψ = 0` regime. The plane-radial form
//! integrates the same equation in flat coordinates and is kept for
//! cross-checks; its far-field tail decays like `r^{-(n+2)}`, so the
//! pointwise positivity floor is applied to the state maximum there, not to
//! every node.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dim::Dimension;
use crate::error::{Error, Result};
use crate::field::{ModalField, ZonalSphereField};
use crate::functionals::{
    curvature_normalizer, curvature_normalizer_sphere, deficit_field, deficit_sphere,
    dissipation_sphere, flow_energy, flow_energy_sphere, stationary_energy_flat,
    stationary_energy_sphere, stationary_value_sphere,
};
use crate::grid::{basis::gegenbauer_table, RadialGrid, SphereGrid};

/// Integrator controls shared by both representations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    /// Initial step.
    pub ds0: f64,
    /// Step-size ceiling.
    pub ds_max: f64,
    /// Integration horizon in rescaled time.
    pub s_end: f64,
    /// Diagnostics cadence; records land exactly on multiples of this.
    pub record_every: f64,
    /// Relative local-error target for step doubling.
    pub step_tol: f64,
    /// Newton residual tolerance, relative to `‖ψ‖`.
    pub newton_tol: f64,
    /// Positivity floor as a fraction of the initial maximum.
    pub floor_factor: f64,
    /// Maximum allowed increase of J per accepted step.
    pub j_guard: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            ds0: 1e-3,
            ds_max: 0.05,
            s_end: 12.0,
            record_every: 0.25,
            step_tol: 1e-5,
            newton_tol: 1e-11,
            floor_factor: 1e-14,
            j_guard: 1e-10,
            max_steps: 2_000_000,
        }
    }
}

/// Terminal state of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Reached `s_end` with the critical mass inside the configured band.
    Converged,
    /// Mass fell below `1e-6` of its initial value or the state touched the
    /// positivity floor.
    Vanished,
    /// Mass exceeded `1e3` times its initial value.
    BlewUp,
}

/// One recorded diagnostics row plus the state snapshot it describes.
#[derive(Debug, Clone)]
pub struct SphereRecord {
    pub s: f64,
    /// Flow energy `J`.
    pub j: f64,
    /// Energy gap `I = J - J∞` against the same-grid stationary energy.
    pub i: f64,
    /// Deficit at the state's own energy-ratio curvature.
    pub delta: f64,
    pub k0: f64,
    /// Critical mass `∫ v^{2*} dσ`.
    pub mass: f64,
    /// Dissipation `D ≥ 0` with `dJ/ds = -D`.
    pub dissipation: f64,
    /// Step size of the accepted step that produced this state.
    pub dt_accepted: f64,
    pub state: ZonalSphereField,
}

#[derive(Debug, Clone)]
pub struct SphereRun {
    pub records: Vec<SphereRecord>,
    pub classification: Classification,
    pub final_s: f64,
    pub accepted: usize,
    pub rejected: usize,
    /// Largest increase of J over a single accepted step (negative when J
    /// strictly decreased on every step).
    pub max_j_increase: f64,
}

/// Implicit integrator for `dψ/ds = (Δ_S - shift) ψ^m + cFlow ψ` on the
/// zonal sphere grid.
pub struct SphereFlow {
    grid: Arc<SphereGrid>,
    cfg: FlowConfig,
    /// `Δ_S - shift·I` as a dense collocation matrix
    lap_shift: DMatrix<f64>,
    dim: Dimension,
}

impl SphereFlow {
    pub fn new(grid: Arc<SphereGrid>, cfg: FlowConfig) -> Self {
        let dim = grid.dim();
        let mut lap_shift = grid.laplacian_matrix().clone();
        let shift = dim.sphere_shift();
        for i in 0..lap_shift.nrows() {
            lap_shift[(i, i)] -= shift;
        }
        Self { grid, cfg, lap_shift, dim }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn config(&self) -> &FlowConfig {
        &self.cfg
    }

    fn field(&self, psi: &DVector<f64>) -> ZonalSphereField {
        let m = self.dim.m();
        let vals: Vec<f64> = psi.iter().map(|&x| x.max(0.0).powf(m)).collect();
        ZonalSphereField::new(self.grid.clone(), vals).expect("state length matches grid")
    }

    /// One backward-Euler solve; `None` when Newton fails to converge.
    ///
    /// The Jacobian is frozen across iterations (refreshed only when the
    /// iteration stalls). The convergence test is on the true residual, so
    /// the frozen factorization costs iterations, never accuracy.
    fn implicit(&self, psi: &DVector<f64>, ds: f64) -> Option<DVector<f64>> {
        let m = self.dim.m();
        let c_flow = self.dim.c_flow();
        let nn = psi.len();
        let mut x = psi.clone();
        let norm_ref = psi.norm().max(1e-300);
        let mut lu = None;
        for iter in 0..40 {
            let v = x.map(|y| y.powf(m));
            let residual = &x - psi - ds * (&self.lap_shift * &v + c_flow * &x);
            if residual.norm() <= self.cfg.newton_tol * norm_ref {
                return Some(x);
            }
            if lu.is_none() || iter % 10 == 9 {
                // J = I - ds (lap_shift · diag(m ψ^{m-1}) + cFlow I)
                let mut jac = DMatrix::<f64>::zeros(nn, nn);
                for j in 0..nn {
                    let dpsi = m * v[j] / x[j];
                    for i in 0..nn {
                        jac[(i, j)] = -ds * self.lap_shift[(i, j)] * dpsi;
                    }
                }
                for i in 0..nn {
                    jac[(i, i)] += 1.0 - ds * c_flow;
                }
                lu = Some(jac.lu());
            }
            let mut delta = lu.as_ref().and_then(|f| f.solve(&(-&residual)))?;
            // keep iterates strictly positive
            let mut guard = 0;
            loop {
                let min_next = x
                    .iter()
                    .zip(delta.iter())
                    .map(|(a, d)| a + d)
                    .fold(f64::INFINITY, f64::min);
                if min_next > 0.0 {
                    break;
                }
                delta *= 0.5;
                guard += 1;
                if guard > 50 {
                    return None;
                }
            }
            x += delta;
        }
        None
    }

    /// Step-doubled backward Euler: returns the extrapolated state and the
    /// local error estimate, falling back to the un-extrapolated composite
    /// when extrapolation would break positivity.
    fn attempt(&self, psi: &DVector<f64>, ds: f64) -> Option<(DVector<f64>, f64)> {
        let full = self.implicit(psi, ds)?;
        let half = self.implicit(psi, 0.5 * ds)?;
        let half2 = self.implicit(&half, 0.5 * ds)?;
        let err = (&half2 - &full).norm() / psi.norm().max(1e-300);
        let extr = 2.0 * &half2 - &full;
        if extr.min() > 0.0 {
            Some((extr, err))
        } else {
            Some((half2, err))
        }
    }

    /// One accepted extrapolated step at fixed `ds` (no adaptivity); used by
    /// structure tests and the dissipation-identity check.
    pub fn step_once(&self, v: &ZonalSphereField, ds: f64) -> Result<ZonalSphereField> {
        let psi = self.state_vector(v)?;
        let (next, _) = self
            .attempt(&psi, ds)
            .ok_or_else(|| Error::StepFailed(format!("implicit solve failed at ds = {ds}")))?;
        Ok(self.field(&next))
    }

    fn state_vector(&self, v: &ZonalSphereField) -> Result<DVector<f64>> {
        if !self.grid.compatible(v.grid()) {
            return Err(Error::GridMismatch("flow state on a different grid".into()));
        }
        if v.min_value() <= 0.0 {
            return Err(Error::NonPositive("flow initial state".into()));
        }
        let p = self.dim.p();
        Ok(DVector::from_iterator(v.values().len(), v.values().iter().map(|&x| x.powf(p))))
    }

    fn record(&self, s: f64, psi: &DVector<f64>, j_inf: f64, dt: f64) -> SphereRecord {
        let state = self.field(psi);
        let j = flow_energy_sphere(&state);
        let k0 = curvature_normalizer_sphere(&state);
        SphereRecord {
            s,
            j,
            i: j - j_inf,
            delta: deficit_sphere(&state, k0),
            k0,
            mass: state.critical_mass(),
            dissipation: dissipation_sphere(&state),
            dt_accepted: dt,
            state,
        }
    }

    /// Integrate from `v0` to `s_end` or until classified, recording
    /// diagnostics at exact multiples of `record_every`.
    pub fn run(&self, v0: &ZonalSphereField) -> Result<SphereRun> {
        let cfg = &self.cfg;
        let mut psi = self.state_vector(v0)?;
        let floor = cfg.floor_factor * psi.max();
        let j_inf = stationary_energy_sphere(&self.grid);
        let mass0 = v0.critical_mass();

        let mut s = 0.0;
        let mut ds = cfg.ds0;
        let mut records = vec![self.record(0.0, &psi, j_inf, 0.0)];
        let mut j_prev = records[0].j;
        let mut next_record = cfg.record_every;
        let mut accepted = 0usize;
        let mut rejected = 0usize;
        let mut max_j_increase = f64::NEG_INFINITY;
        let mut classification = None;

        for _ in 0..cfg.max_steps {
            if s >= cfg.s_end - 1e-12 {
                classification = Some(Classification::Converged);
                break;
            }
            // land exactly on record points and the horizon
            let mut ds_try = ds.min(cfg.ds_max).min(cfg.s_end - s);
            if next_record - s > 1e-12 {
                ds_try = ds_try.min(next_record - s);
            }

            let attempt = self.attempt(&psi, ds_try);
            let (next, err) = match attempt {
                Some(pair) => pair,
                None => {
                    rejected += 1;
                    ds = 0.5 * ds_try;
                    if ds < 1e-12 {
                        if psi.max() <= 1e3 * floor {
                            classification = Some(Classification::Vanished);
                            break;
                        }
                        return Err(Error::StepFailed(format!(
                            "step underflow at s = {s:.6}: ds = {ds:.3e}"
                        )));
                    }
                    continue;
                }
            };

            if next.min() <= floor {
                // the state touched the positivity floor: vanishing
                psi = next;
                s += ds_try;
                classification = Some(Classification::Vanished);
                break;
            }

            let j_new = flow_energy_sphere(&self.field(&next));
            if err > cfg.step_tol || j_new > j_prev + cfg.j_guard {
                rejected += 1;
                ds = 0.5 * ds_try;
                if ds < 1e-12 {
                    return Err(Error::StepFailed(format!(
                        "step underflow at s = {s:.6} (error {err:.3e}, J change {:.3e})",
                        j_new - j_prev
                    )));
                }
                continue;
            }

            psi = next;
            s += ds_try;
            max_j_increase = max_j_increase.max(j_new - j_prev);
            j_prev = j_new;
            accepted += 1;

            let mass = self.field(&psi).critical_mass();
            if mass < 1e-6 * mass0 {
                classification = Some(Classification::Vanished);
                break;
            }
            if mass > 1e3 * mass0 {
                classification = Some(Classification::BlewUp);
                break;
            }

            if s >= next_record - 1e-12 {
                records.push(self.record(s, &psi, j_inf, ds_try));
                while next_record <= s + 1e-12 {
                    next_record += cfg.record_every;
                }
            }

            let grow = (cfg.step_tol / err.max(1e-300)).sqrt() * 0.9;
            ds = (ds_try * grow.clamp(0.25, 4.0)).min(cfg.ds_max);
        }

        let classification = classification.ok_or_else(|| {
            Error::StepFailed(format!("step budget exhausted at s = {s:.6}"))
        })?;
        // terminal state is always recorded
        if (records.last().map(|r| r.s).unwrap_or(-1.0) - s).abs() > 1e-12 {
            records.push(self.record(s, &psi, j_inf, ds));
        }
        Ok(SphereRun {
            records,
            classification,
            final_s: s,
            accepted,
            rejected,
            max_j_increase,
        })
    }
}

/// `v∞ + eps·G_degree(cos θ)`: the constant stationary state plus one zonal
/// harmonic (pole-normalized to 1).
pub fn perturbed_constant(
    grid: &Arc<SphereGrid>,
    eps: f64,
    degree: usize,
) -> Result<ZonalSphereField> {
    let dim = grid.dim();
    let v_inf = stationary_value_sphere(dim);
    let lambda = (dim.nf() - 1.0) / 2.0;
    let table = gegenbauer_table(lambda, degree, grid.cos_theta());
    let vals: Vec<f64> =
        grid.cos_theta().iter().enumerate().map(|(i, _)| v_inf + eps * table[degree][i]).collect();
    if vals.iter().any(|&v| v <= 0.0) {
        return Err(Error::NonPositive("perturbed constant state".into()));
    }
    ZonalSphereField::new(grid.clone(), vals)
}

/// Outcome of the amplitude bisection.
#[derive(Debug)]
pub struct Calibration {
    pub c_star: f64,
    pub bracket: (f64, f64),
    pub bisections: usize,
    /// Run at `c_star` (the returned near-critical trajectory).
    pub run: SphereRun,
}

/// Which side of the critical amplitude a finished run sits on. Runs that
/// reach the horizon inside the mass band are classified by comparing the
/// final mass with the stationary family's mass (shared by every member):
/// the unstable direction grows mass on one side and shrinks it on the
/// other.
fn bisection_side(run: &SphereRun, family_mass: f64) -> Classification {
    match run.classification {
        Classification::Converged => {
            let final_mass = run.records.last().map(|r| r.mass).unwrap_or(family_mass);
            if final_mass >= family_mass {
                Classification::BlewUp
            } else {
                Classification::Vanished
            }
        }
        other => other,
    }
}

/// Bisection on the initial amplitude `c` of `c · base`: brackets the
/// critical amplitude separating vanishing from blow-up to relative width
/// `rel_tol`, then reruns at the midpoint and returns that trajectory.
pub fn calibrate_amplitude(
    flow: &SphereFlow,
    base: &ZonalSphereField,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<Calibration> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::NoBracket(format!("invalid amplitude bracket [{lo}, {hi}]")));
    }
    let family_mass = ZonalSphereField::constant(
        flow.grid().clone(),
        stationary_value_sphere(flow.grid().dim()),
    )
    .critical_mass();

    let side = |c: f64| -> Result<Classification> {
        let run = flow.run(&base.scale(c))?;
        Ok(bisection_side(&run, family_mass))
    };
    let lo_side = side(lo)?;
    let hi_side = side(hi)?;
    if lo_side != Classification::Vanished || hi_side != Classification::BlewUp {
        return Err(Error::NoBracket(format!(
            "amplitude {lo} classifies {lo_side:?} and {hi} classifies {hi_side:?}; \
             need Vanished below and BlewUp above"
        )));
    }

    let (mut a, mut b) = (lo, hi);
    let mut bisections = 0usize;
    while b - a > rel_tol * 0.5 * (a + b) {
        let mid = 0.5 * (a + b);
        match side(mid)? {
            Classification::Vanished => a = mid,
            Classification::BlewUp => b = mid,
            Classification::Converged => unreachable!("sides are binary"),
        }
        bisections += 1;
        if bisections > 200 {
            break;
        }
    }
    let c_star = 0.5 * (a + b);
    let run = flow.run(&base.scale(c_star))?;
    Ok(Calibration { c_star, bracket: (a, b), bisections, run })
}

/// Classify a ladder of amplitudes (parallel) and report whether the
/// classification flips exactly once from Vanished to BlewUp.
pub fn amplitude_scan(
    flow: &SphereFlow,
    base: &ZonalSphereField,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<(Vec<(f64, Classification)>, bool)> {
    use rayon::prelude::*;
    let family_mass = ZonalSphereField::constant(
        flow.grid().clone(),
        stationary_value_sphere(flow.grid().dim()),
    )
    .critical_mass();
    let amps: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1).max(1) as f64)
        .collect();
    let sides: Vec<(f64, Classification)> = amps
        .par_iter()
        .map(|&c| -> Result<(f64, Classification)> {
            let run = flow.run(&base.scale(c))?;
            Ok((c, bisection_side(&run, family_mass)))
        })
        .collect::<Result<Vec<_>>>()?;
    let flips = sides.windows(2).filter(|w| w[0].1 != w[1].1).count();
    let monotone = flips == 1
        && sides.first().map(|x| x.1) == Some(Classification::Vanished)
        && sides.last().map(|x| x.1) == Some(Classification::BlewUp);
    Ok((sides, monotone))
}

/// Diagnostics row of the plane-radial integrator.
#[derive(Debug, Clone)]
pub struct PlaneRecord {
    pub s: f64,
    pub j: f64,
    pub i: f64,
    pub delta: f64,
    pub k0: f64,
    pub mass: f64,
    pub dt_accepted: f64,
    pub state: ModalField,
}

#[derive(Debug, Clone)]
pub struct PlaneRun {
    pub records: Vec<PlaneRecord>,
    pub classification: Classification,
    pub final_s: f64,
    pub accepted: usize,
    pub rejected: usize,
    /// Largest increase of J over a single accepted step.
    pub max_j_increase: f64,
}

/// Implicit integrator for `dψ/ds = Δ(ψ^m) + cFlow ψ` for radial states on
/// the mapped flat grid.
pub struct PlaneFlow {
    grid: Arc<RadialGrid>,
    cfg: FlowConfig,
    lap: DMatrix<f64>,
    dim: Dimension,
}

impl PlaneFlow {
    pub fn new(grid: Arc<RadialGrid>, cfg: FlowConfig) -> Self {
        let dim = grid.dim();
        let nn = grid.len();
        // radial Laplacian as a dense matrix, column by column
        let mut lap = DMatrix::<f64>::zeros(nn, nn);
        let mut e = vec![0.0; nn];
        for j in 0..nn {
            e[j] = 1.0;
            let col = grid.mode_laplacian(&e, 0);
            for i in 0..nn {
                lap[(i, j)] = col[i];
            }
            e[j] = 0.0;
        }
        Self { grid, cfg, lap, dim }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    fn field(&self, psi: &DVector<f64>) -> ModalField {
        let m = self.dim.m();
        let vals: Vec<f64> = psi.iter().map(|&x| x.max(0.0).powf(m)).collect();
        ModalField::radial(self.grid.clone(), vals).expect("state length matches grid")
    }

    fn implicit(&self, psi: &DVector<f64>, ds: f64) -> Option<DVector<f64>> {
        let m = self.dim.m();
        let c_flow = self.dim.c_flow();
        let nn = psi.len();
        let mut x = psi.clone();
        let norm_ref = psi.norm().max(1e-300);
        let mut lu = None;
        for iter in 0..40 {
            let v = x.map(|y| y.powf(m));
            let residual = &x - psi - ds * (&self.lap * &v + c_flow * &x);
            if residual.norm() <= self.cfg.newton_tol * norm_ref {
                return Some(x);
            }
            if lu.is_none() || iter % 10 == 9 {
                let mut jac = DMatrix::<f64>::zeros(nn, nn);
                for j in 0..nn {
                    let dpsi = m * v[j] / x[j];
                    for i in 0..nn {
                        jac[(i, j)] = -ds * self.lap[(i, j)] * dpsi;
                    }
                }
                for i in 0..nn {
                    jac[(i, i)] += 1.0 - ds * c_flow;
                }
                lu = Some(jac.lu());
            }
            let mut delta = lu.as_ref().and_then(|f| f.solve(&(-&residual)))?;
            let mut guard = 0;
            loop {
                let min_next = x
                    .iter()
                    .zip(delta.iter())
                    .map(|(a, d)| a + d)
                    .fold(f64::INFINITY, f64::min);
                if min_next > 0.0 {
                    break;
                }
                delta *= 0.5;
                guard += 1;
                if guard > 50 {
                    return None;
                }
            }
            x += delta;
        }
        None
    }

    fn attempt(&self, psi: &DVector<f64>, ds: f64) -> Option<(DVector<f64>, f64)> {
        let full = self.implicit(psi, ds)?;
        let half = self.implicit(psi, 0.5 * ds)?;
        let half2 = self.implicit(&half, 0.5 * ds)?;
        let err = (&half2 - &full).norm() / psi.norm().max(1e-300);
        let extr = 2.0 * &half2 - &full;
        if extr.min() > 0.0 {
            Some((extr, err))
        } else {
            Some((half2, err))
        }
    }

    pub fn step_once(&self, w: &ModalField, ds: f64) -> Result<ModalField> {
        let psi = self.state_vector(w)?;
        let (next, _) = self
            .attempt(&psi, ds)
            .ok_or_else(|| Error::StepFailed(format!("implicit solve failed at ds = {ds}")))?;
        Ok(self.field(&next))
    }

    fn state_vector(&self, w: &ModalField) -> Result<DVector<f64>> {
        if !w.is_radial() {
            return Err(Error::OffAxis("plane-radial flow needs a radial state".into()));
        }
        if !self.grid.compatible(w.grid()) {
            return Err(Error::GridMismatch("flow state on a different grid".into()));
        }
        if w.min_on_grid() <= 0.0 {
            return Err(Error::NonPositive("flow initial state".into()));
        }
        let p = self.dim.p();
        let prof = w.profile(0);
        Ok(DVector::from_iterator(prof.len(), prof.iter().map(|&x| x.powf(p))))
    }

    fn record(&self, s: f64, psi: &DVector<f64>, j_inf: f64, dt: f64) -> PlaneRecord {
        let state = self.field(psi);
        let j = flow_energy(&state);
        let k0 = curvature_normalizer(&state);
        PlaneRecord {
            s,
            j,
            i: j - j_inf,
            delta: deficit_field(&state, k0),
            k0,
            mass: state.critical_mass(),
            dt_accepted: dt,
            state,
        }
    }

    /// Integrate; identical control flow to the sphere runner, except the
    /// positivity floor compares against the state maximum (the planar tail
    /// is legitimately below any pointwise floor).
    pub fn run(&self, w0: &ModalField) -> Result<PlaneRun> {
        let cfg = &self.cfg;
        let mut psi = self.state_vector(w0)?;
        let floor = cfg.floor_factor * psi.max();
        let j_inf = stationary_energy_flat(&self.grid)?;
        let mass0 = w0.critical_mass();

        let mut s = 0.0;
        let mut ds = cfg.ds0;
        let mut records = vec![self.record(0.0, &psi, j_inf, 0.0)];
        let mut j_prev = records[0].j;
        let mut next_record = cfg.record_every;
        let mut accepted = 0usize;
        let mut rejected = 0usize;
        let mut max_j_increase = f64::NEG_INFINITY;
        let mut classification = None;

        for _ in 0..cfg.max_steps {
            if s >= cfg.s_end - 1e-12 {
                classification = Some(Classification::Converged);
                break;
            }
            let mut ds_try = ds.min(cfg.ds_max).min(cfg.s_end - s);
            if next_record - s > 1e-12 {
                ds_try = ds_try.min(next_record - s);
            }

            let (next, err) = match self.attempt(&psi, ds_try) {
                Some(pair) => pair,
                None => {
                    rejected += 1;
                    ds = 0.5 * ds_try;
                    if ds < 1e-12 {
                        if psi.max() <= 1e3 * floor {
                            classification = Some(Classification::Vanished);
                            break;
                        }
                        return Err(Error::StepFailed(format!(
                            "step underflow at s = {s:.6}: ds = {ds:.3e}"
                        )));
                    }
                    continue;
                }
            };

            if next.max() <= floor {
                psi = next;
                s += ds_try;
                classification = Some(Classification::Vanished);
                break;
            }

            let j_new = flow_energy(&self.field(&next));
            if err > cfg.step_tol || j_new > j_prev + cfg.j_guard {
                rejected += 1;
                ds = 0.5 * ds_try;
                if ds < 1e-12 {
                    return Err(Error::StepFailed(format!(
                        "step underflow at s = {s:.6} (error {err:.3e}, J change {:.3e})",
                        j_new - j_prev
                    )));
                }
                continue;
            }

            psi = next;
            s += ds_try;
            max_j_increase = max_j_increase.max(j_new - j_prev);
            j_prev = j_new;
            accepted += 1;

            let mass = self.field(&psi).critical_mass();
            if mass < 1e-6 * mass0 {
                classification = Some(Classification::Vanished);
                break;
            }
            if mass > 1e3 * mass0 {
                classification = Some(Classification::BlewUp);
                break;
            }

            if s >= next_record - 1e-12 {
                records.push(self.record(s, &psi, j_inf, ds_try));
                while next_record <= s + 1e-12 {
                    next_record += cfg.record_every;
                }
            }

            let grow = (cfg.step_tol / err.max(1e-300)).sqrt() * 0.9;
            ds = (ds_try * grow.clamp(0.25, 4.0)).min(cfg.ds_max);
        }

        let classification = classification.ok_or_else(|| {
            Error::StepFailed(format!("step budget exhausted at s = {s:.6}"))
        })?;
        if (records.last().map(|r| r.s).unwrap_or(-1.0) - s).abs() > 1e-12 {
            records.push(self.record(s, &psi, j_inf, ds));
        }
        Ok(PlaneRun {
            records,
            classification,
            final_s: s,
            accepted,
            rejected,
            max_j_increase,
        })
    }
}
