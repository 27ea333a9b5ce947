//! Nearest-bubble decomposition and the quantitative stability check.
//!
//! [`project_to_bubble`] minimizes `‖∇u - a ∇v₁[w,μ]‖` over amplitude,
//! center and concentration. The amplitude enters quadratically, so it is
//! eliminated exactly: with `g(z,λ) = ⟨∇u, ∇V[z,λ]⟩` and `S_V = ‖∇V‖²`, the
//! optimal amplitude is `g/S_V` and the objective reduces to
//! `‖∇u‖² - g²/S_V` over the two remaining parameters. The cross term is
//! computed without differentiating `u`: integrating by parts against the
//! bubble equation gives `g = ∫ u V^p dx`, a pointwise quadrature.
//!
//! The stationarity conditions of the reduced objective are exactly the
//! Dirichlet orthogonality of the remainder `ρ = u - αV` to the tangent
//! fields `V` (amplitude), `∂_λ V` and `∂_z V`, which is what the stability
//! statement needs.

use rayon::prelude::*;
use serde::Serialize;

use crate::bubble::{bubble_field, BubbleParams};
use crate::dim::Dimension;
use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::functionals::{curvature_normalizer, deficit_field};
use crate::grid::AngularRule;

/// Options for the nearest-bubble fit.
#[derive(Debug, Clone)]
pub struct ProjectOptions {
    /// Number of deterministic moment-based starts.
    pub starts: usize,
    /// Convergence: objective gradient below `grad_tol_factor · ‖∇u‖²`.
    pub grad_tol_factor: f64,
    pub max_iter: usize,
    /// Fits escaping this concentration range are rejected.
    pub lambda_bounds: (f64, f64),
    /// Angular degrees used when synthesizing the fitted bubble off-center.
    pub lmax_cap: usize,
}

impl Default for ProjectOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            grad_tol_factor: 1e-10,
            max_iter: 60,
            lambda_bounds: (1e-6, 1e6),
            lmax_cap: 256,
        }
    }
}

/// Outcome of the nearest-bubble fit.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionResult {
    pub alpha: f64,
    pub z: f64,
    pub lambda: f64,
    /// `‖∇ρ‖` with `ρ = u - α v₁[z,λ]`.
    pub rho_h1: f64,
    pub u_h1: f64,
    /// Dirichlet-orthogonality residuals of ρ against the amplitude,
    /// concentration and translation tangent fields, each normalized by
    /// `‖∇u‖ ‖∇(tangent)‖`.
    pub ortho_residuals: [f64; 3],
    /// Deficit of `u` at its energy-ratio curvature (numerical Laplacian).
    pub delta: f64,
    /// `rho_h1 / delta`; absent when the deficit is at the noise floor.
    pub ratio: Option<f64>,
    pub converged: bool,
    pub multistart: usize,
    pub warnings: Vec<String>,
}

impl ProjectionResult {
    pub fn params(&self) -> BubbleParams {
        BubbleParams::standard(self.z, self.lambda)
    }
}

/// `u` synthesized once on its tensor grid, plus the weights needed for the
/// inner quadratures of the fit.
struct FitWorkspace {
    dim: Dimension,
    r: Vec<f64>,
    t: Vec<f64>,
    /// combined weight `w_r · w_t · |S^{n-2}|` per tensor point
    w: Vec<f64>,
    u_vals: Vec<f64>,
    u_h1_sq: f64,
}

impl FitWorkspace {
    fn new(u: &ModalField) -> Self {
        let rule = AngularRule::new(u.dim(), u.lmax().max(8));
        let grid = u.grid();
        let nt = rule.len();
        let u_vals = u.synth(&rule);
        let mut r = Vec::with_capacity(grid.len() * nt);
        let mut t = Vec::with_capacity(grid.len() * nt);
        let mut w = Vec::with_capacity(grid.len() * nt);
        for (&rr, &wr) in grid.r().iter().zip(grid.weights()) {
            for (&tt, &wt) in rule.t().iter().zip(rule.weights()) {
                r.push(rr);
                t.push(tt);
                w.push(wr * wt * rule.area_factor());
            }
        }
        Self { dim: u.dim(), r, t, w, u_vals, u_h1_sq: u.dirichlet_energy() }
    }

    /// `∫ u f(x) dx` for a pointwise closure.
    fn integral_u(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.w.len() {
            acc += self.w[i] * self.u_vals[i] * f(self.r[i], self.t[i]);
        }
        acc
    }

    /// `∫ |u|^{2*} g(x) dx` moments for the initializers.
    fn moment(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let q = self.dim.two_star();
        let mut acc = 0.0;
        for i in 0..self.w.len() {
            acc += self.w[i] * self.u_vals[i].abs().powf(q) * g(self.r[i], self.t[i]);
        }
        acc
    }

    /// `g(z,λ) = ⟨∇u, ∇V[z,λ]⟩ = ∫ u V^p dx`.
    fn cross(&self, params: BubbleParams) -> f64 {
        let p = self.dim.p();
        let d = self.dim;
        self.integral_u(|r, t| params.eval(d, r, t).powf(p))
    }

    /// Stationarity defect `(⟨∇u,∇(λ ∂_λ V)⟩, ⟨∇u,∇∂_z V⟩)`, computed through
    /// `⟨∇u, ∇B⟩ = p ∫ u V^{p-1} B dx` (the tangent fields solve the
    /// linearized equation).
    fn tangent_defect(&self, params: BubbleParams) -> (f64, f64) {
        let p = self.dim.p();
        let d = self.dim;
        let mut dl = 0.0;
        let mut dz = 0.0;
        for i in 0..self.w.len() {
            let (r, t) = (self.r[i], self.t[i]);
            let v = params.eval(d, r, t);
            let common = self.w[i] * self.u_vals[i] * p * v.powf(p - 1.0);
            dl += common * params.deriv_lambda(d, r, t) * params.lambda;
            dz += common * params.deriv_center(d, r, t);
        }
        (dl, dz)
    }
}

fn objective(ws: &FitWorkspace, params: BubbleParams, s_v: f64) -> f64 {
    let g = ws.cross(params);
    ws.u_h1_sq - g * g / s_v
}

/// Deterministic starting points from `u^{2*}` moments: barycenter along the
/// axis, a moment-based and a half-height concentration estimate, and spread
/// offsets around them.
fn initial_guesses(u: &ModalField, ws: &FitWorkspace, starts: usize) -> Vec<(f64, f64)> {
    let dim = u.dim();
    let mass = ws.moment(|_, _| 1.0).max(1e-300);
    let zbar = ws.moment(|r, t| r * t) / mass;
    let second = (ws.moment(|r, t| {
        let d = r * t - zbar;
        d * d + r * r * (1.0 - t * t)
    }) / mass)
        .max(1e-300);
    // calibrate the same moment on the unit bubble once: second = c(n)/λ²
    let unit = BubbleParams::standard(0.0, 1.0);
    let q = dim.two_star();
    let grid = u.grid();
    let m0: f64 = grid
        .r()
        .iter()
        .zip(grid.weights())
        .map(|(&r, &w)| w * unit.eval(dim, r, 1.0).powf(q))
        .sum();
    let m2: f64 = grid
        .r()
        .iter()
        .zip(grid.weights())
        .map(|(&r, &w)| w * r * r * unit.eval(dim, r, 1.0).powf(q))
        .sum();
    let lambda_mom = (m2 / m0 / second).sqrt();

    // half-height of the on-axis profile relative to its peak
    let axis = u.axis_values();
    let (imax, &umax) = axis
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let mut r_half = grid.r()[imax] + 1.0;
    for i in imax..axis.len() {
        if axis[i] <= 0.5 * umax {
            r_half = grid.r()[i] - zbar.abs().min(grid.r()[i] * 0.9);
            break;
        }
    }
    let half_factor = (2f64.powf(2.0 / (dim.nf() - 2.0)) - 1.0).sqrt();
    let lambda_hh = (half_factor / r_half.max(1e-6)).max(1e-6);

    let spread = second.sqrt();
    let mut guesses = vec![
        (zbar, lambda_mom),
        (zbar, lambda_hh),
        (zbar, 2.0 * lambda_mom),
        (zbar, 0.5 * lambda_mom),
        (zbar + spread, lambda_mom),
        (zbar - spread, lambda_mom),
        (0.0, 1.0),
        (zbar, 4.0 * lambda_mom),
    ];
    guesses.truncate(starts.max(1));
    guesses
}

struct StartOutcome {
    z: f64,
    lambda: f64,
    objective: f64,
    converged: bool,
    escaped: bool,
}

fn run_start(
    ws: &FitWorkspace,
    s_v: f64,
    z0: f64,
    lambda0: f64,
    opts: &ProjectOptions,
) -> StartOutcome {
    let (lo, hi) = opts.lambda_bounds;
    let mut z = z0;
    let mut ln_l = lambda0.clamp(lo, hi).ln();
    let tol = opts.grad_tol_factor * ws.u_h1_sq;
    let mut converged = false;
    let mut escaped = false;

    for _ in 0..opts.max_iter {
        let lambda = ln_l.exp();
        let params = BubbleParams::standard(z, lambda);
        let alpha = ws.cross(params) / s_v;
        let (dl, dz) = ws.tangent_defect(params);
        // objective gradient in (z, ln λ): ∂E = -2 α ⟨∇u, ∇∂V⟩
        let grad = [-2.0 * alpha * dz, -2.0 * alpha * dl];
        if (grad[0] * grad[0] + grad[1] * grad[1]).sqrt() <= tol {
            converged = true;
            break;
        }
        // finite-difference Jacobian of the defect in (z, ln λ)
        let h_z = 1e-6 * (1.0 / lambda).max(z.abs() * 1e-3).max(1e-8);
        let h_l = 1e-6;
        let (dl_z, dz_z) = ws.tangent_defect(BubbleParams::standard(z + h_z, lambda));
        let (dl_l, dz_l) =
            ws.tangent_defect(BubbleParams::standard(z, (ln_l + h_l).exp()));
        let j = [
            [(dz_z - dz) / h_z, (dz_l - dz) / h_l],
            [(dl_z - dl) / h_z, (dl_l - dl) / h_l],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let (mut step_z, mut step_l) = if det.abs() > 1e-300 {
            (
                -(j[1][1] * dz - j[0][1] * dl) / det,
                -(-j[1][0] * dz + j[0][0] * dl) / det,
            )
        } else {
            // fall back to a gradient step scaled to the parameter size
            (-grad[0] / ws.u_h1_sq, -grad[1] / ws.u_h1_sq)
        };
        // trust region in the well-conditioned (z·λ, ln λ) chart
        let cap = 1.5;
        let size = ((step_z * lambda).powi(2) + step_l.powi(2)).sqrt();
        if size > cap {
            step_z *= cap / size;
            step_l *= cap / size;
        }

        // backtracking on the reduced objective
        let base = objective(ws, params, s_v);
        let mut factor = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let zt = z + factor * step_z;
            let lt = (ln_l + factor * step_l).exp();
            if lt >= lo && lt <= hi {
                let trial = objective(ws, BubbleParams::standard(zt, lt), s_v);
                if trial <= base + 1e-14 * ws.u_h1_sq {
                    z = zt;
                    ln_l = lt.ln();
                    accepted = true;
                    break;
                }
            }
            factor *= 0.5;
        }
        if !accepted {
            // no descent and bounds block progress: treat as escape
            escaped = true;
            break;
        }
        let lam = ln_l.exp();
        if lam <= lo * 1.0001 || lam >= hi * 0.9999 {
            escaped = true;
            break;
        }
    }

    let lambda = ln_l.exp();
    StartOutcome {
        z,
        lambda,
        objective: objective(ws, BubbleParams::standard(z, lambda), s_v),
        converged,
        escaped,
    }
}

/// Discrete `∫ V^{2*} dx` of the unit concentration profile on `u`'s grid;
/// by parts this equals the discrete `‖∇V‖²` of every family member, so one
/// radial quadrature serves all `(z, λ)`.
fn unit_bubble_mass(u: &ModalField) -> f64 {
    let dim = u.dim();
    let unit = BubbleParams::standard(0.0, 1.0);
    let grid = u.grid();
    let q = dim.two_star();
    dim.sphere_area_flat()
        * grid
            .r()
            .iter()
            .zip(grid.weights())
            .map(|(&r, &w)| w * unit.eval(dim, r, 1.0).powf(q))
            .sum::<f64>()
}

/// Lowest reduced objective among non-escaped starts, ties broken toward
/// the least extreme concentration.
fn select_best(outcomes: &[StartOutcome]) -> Option<&StartOutcome> {
    let mut best: Option<&StartOutcome> = None;
    for o in outcomes {
        if o.escaped {
            continue;
        }
        best = Some(match best {
            None => o,
            Some(b) => {
                let cmp = o
                    .objective
                    .partial_cmp(&b.objective)
                    .unwrap_or(std::cmp::Ordering::Equal);
                match cmp {
                    std::cmp::Ordering::Less => o,
                    std::cmp::Ordering::Equal
                        if o.lambda.ln().abs() < b.lambda.ln().abs() =>
                    {
                        o
                    }
                    _ => b,
                }
            }
        });
    }
    best
}

/// Two-parameter `(z, λ)` fit of the reduced objective, shared with the
/// stationary-family fitting of trajectory states. The reduced objective is
/// invariant under scalar rescaling of `u`, and maximizing the normalized
/// cross term is equivalent to minimizing `‖∇u − ∇W[z,λ]‖` over any
/// fixed-amplitude slice of the family, so the same optimum serves both the
/// three-parameter decomposition and the amplitude-free nearest-profile fit.
///
/// A warm start, when given, is tried alone first; the full multistart runs
/// only if it escapes or stalls.
pub(crate) fn reduced_fit(
    u: &ModalField,
    warm: Option<(f64, f64)>,
    opts: &ProjectOptions,
) -> Result<(f64, f64, bool)> {
    let ws = FitWorkspace::new(u);
    if !ws.u_h1_sq.is_finite() || ws.u_h1_sq <= 0.0 {
        return Err(Error::NonFinite("Dirichlet energy of fit input".into()));
    }
    let s_v = unit_bubble_mass(u);
    if let Some((z0, l0)) = warm {
        let o = run_start(&ws, s_v, z0, l0, opts);
        if !o.escaped && o.converged {
            return Ok((o.z, o.lambda, true));
        }
    }
    let guesses = initial_guesses(u, &ws, opts.starts);
    let outcomes: Vec<StartOutcome> = guesses
        .par_iter()
        .map(|&(z0, l0)| run_start(&ws, s_v, z0, l0, opts))
        .collect();
    let best = select_best(&outcomes)
        .ok_or_else(|| Error::FitFailed("all starts escaped the concentration bounds".into()))?;
    Ok((best.z, best.lambda, best.converged))
}

/// Fit `u ≈ α v₁[z,λ]` and report the decomposition diagnostics.
pub fn project_to_bubble(u: &ModalField, opts: &ProjectOptions) -> Result<ProjectionResult> {
    if u.min_on_grid() <= 0.0 {
        return Err(Error::NonPositive("projection input".into()));
    }
    let ws = FitWorkspace::new(u);
    if !ws.u_h1_sq.is_finite() || ws.u_h1_sq <= 0.0 {
        return Err(Error::NonFinite("Dirichlet energy of projection input".into()));
    }
    let grid = u.grid();
    let s_v = unit_bubble_mass(u);

    let guesses = initial_guesses(u, &ws, opts.starts);
    let outcomes: Vec<StartOutcome> = guesses
        .par_iter()
        .map(|&(z0, l0)| run_start(&ws, s_v, z0, l0, opts))
        .collect();

    let best = select_best(&outcomes).ok_or_else(|| {
        let min_obj = outcomes
            .iter()
            .map(|o| o.objective)
            .fold(f64::INFINITY, f64::min);
        Error::FitFailed(format!(
            "all {} starts escaped the concentration bounds; best objective {min_obj:.6e}",
            outcomes.len()
        ))
    })?;

    let mut warnings = Vec::new();
    if !best.converged {
        warnings.push("best start stopped on iteration budget, not on gradient tolerance".into());
    }

    // final discrete decomposition: α from the discrete Gram so that the
    // Pythagoras identity holds to roundoff
    let dim = u.dim();
    let params = BubbleParams::standard(best.z, best.lambda);
    let v = bubble_field(grid.clone(), params, 1e-12, opts.lmax_cap)?;
    let s_v_disc = v.dirichlet_energy();
    let g_disc = u.dirichlet_inner(&v)?;
    let alpha = g_disc / s_v_disc;
    let rho = u.add_scaled(-alpha, &v)?;
    let rho_h1 = rho.dirichlet_inner(&rho)?.max(0.0).sqrt();
    let u_h1 = ws.u_h1_sq.sqrt();

    // tangent fields at the fitted parameters
    let d_lambda = ModalField::from_fn_adaptive(
        grid.clone(),
        |r, t| params.deriv_lambda(dim, r, t),
        1e-11,
        opts.lmax_cap,
    )?;
    let d_center = ModalField::from_fn_adaptive(
        grid.clone(),
        |r, t| params.deriv_center(dim, r, t),
        1e-11,
        opts.lmax_cap,
    )?;
    let mut ortho = [0.0; 3];
    for (slot, b) in ortho.iter_mut().zip([&v, &d_lambda, &d_center]) {
        let b_h1 = b.dirichlet_inner(b)?.max(1e-300).sqrt();
        *slot = rho.dirichlet_inner(b)?.abs() / (u_h1 * b_h1);
    }

    if rho_h1 > 0.2 * u_h1 {
        warnings
            .push(format!("decomposition unreliable: ‖∇ρ‖ = {:.3} ‖∇u‖", rho_h1 / u_h1));
    }

    let delta = deficit_field(u, curvature_normalizer(u));
    let ratio = if delta > 1e-12 * u_h1 { Some(rho_h1 / delta) } else { None };

    Ok(ProjectionResult {
        alpha,
        z: best.z,
        lambda: best.lambda,
        rho_h1,
        u_h1,
        ortho_residuals: ortho,
        delta,
        ratio,
        converged: best.converged,
        multistart: guesses.len(),
        warnings,
    })
}

/// Rescale `u` so its energy-ratio curvature is one.
pub fn normalize_k0(u: &ModalField) -> Result<ModalField> {
    Ok(crate::functionals::normalize_curvature(u, 1.0)?.0)
}

/// Result of the two-hypothesis stability check.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub k0: f64,
    pub k0_ok: bool,
    pub dirichlet: f64,
    pub energy_ok: bool,
    /// `‖∇ρ'‖ / δ(u)` with `ρ' = ρ + (α-1) v₁[z,λ]`.
    pub c_ratio: Option<f64>,
    pub alpha_minus_one: f64,
    pub rho_prime_h1: f64,
    pub delta: f64,
    pub skipped: Option<String>,
    pub projection: Option<ProjectionResult>,
}

/// Verify the two hypotheses (unit energy-ratio curvature, energy below
/// `(3/2) Sⁿ`), project, absorb the amplitude error into the remainder
/// (`ρ' = u - v₁[z,λ]`), and report the measured stability constant.
///
/// `delta_exact` supplies a deficit computed from exact closures when the
/// caller has them; otherwise the numerical-Laplacian deficit of the
/// projection is used.
pub fn stability_check(u: &ModalField, delta_exact: Option<f64>) -> Result<StabilityReport> {
    let dim = u.dim();
    let k0 = curvature_normalizer(u);
    let k0_ok = (k0 - 1.0).abs() <= 1e-6;
    let dirichlet = u.dirichlet_energy();
    let energy_ok = dirichlet <= 1.5 * crate::bubble::sharp_sobolev_power(dim) * (1.0 + 1e-12);

    if !k0_ok || !energy_ok {
        let reason = if !k0_ok {
            format!("energy-ratio curvature {k0} is not 1; normalize first")
        } else {
            format!(
                "Dirichlet energy {dirichlet:.6} exceeds 3/2 of the sharp constant power"
            )
        };
        return Ok(StabilityReport {
            k0,
            k0_ok,
            dirichlet,
            energy_ok,
            c_ratio: None,
            alpha_minus_one: f64::NAN,
            rho_prime_h1: f64::NAN,
            delta: delta_exact.unwrap_or(f64::NAN),
            skipped: Some(reason),
            projection: None,
        });
    }

    let proj = project_to_bubble(u, &ProjectOptions::default())?;
    let delta = delta_exact.unwrap_or(proj.delta);
    // ρ' = ρ + (α-1)V with ρ ⊥ V in the Dirichlet form, so
    // ‖∇ρ'‖² = ‖∇ρ‖² + (α-1)²‖∇V‖²
    let v = bubble_field(
        u.grid().clone(),
        proj.params(),
        1e-12,
        ProjectOptions::default().lmax_cap,
    )?;
    let v_h1_sq = v.dirichlet_energy();
    let a1 = proj.alpha - 1.0;
    let rho_prime_h1 = (proj.rho_h1 * proj.rho_h1 + a1 * a1 * v_h1_sq).sqrt();
    let c_ratio = if delta > 1e-12 * proj.u_h1 { Some(rho_prime_h1 / delta) } else { None };

    Ok(StabilityReport {
        k0,
        k0_ok,
        dirichlet,
        energy_ok,
        c_ratio,
        alpha_minus_one: a1,
        rho_prime_h1,
        delta,
        skipped: None,
        projection: Some(proj),
    })
}
