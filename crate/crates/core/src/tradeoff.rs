//! Current–dissipation and power–efficiency trade-off quantities for
//! Dicke-diagonal states.
//!
//! For a state diagonal in the Dicke basis the block-diagonal projection is
//! the state itself, and the degenerate computational-basis structure of
//! each |M⟩ enters only through the binomial C(N, N/2 + M). The operator
//! X is diagonal in the Dicke basis with
//!
//! X_MM = Δ_M² γ_M^↑ + Δ_{M+1}² γ_{M+1}^↓,
//!
//! out-of-range links omitted.

use crate::dynamics::{
    entropy_production_rate, heat_current, population_rate, sample_trajectory, PopulationState, Stroke,
    Trajectory, LOG_FLOOR,
};
use crate::engine::{run_cycle, CycleRecord, StrokePlan};
use crate::error::{Error, Result};
use crate::ladder::{Generator, LadderModel, RateTable};

/// Relative tolerance on both inequality verdicts.
pub const VERDICT_TOLERANCE: f64 = 1e-8;
/// J and σ̇ below this fraction of their gross-flux scales count as zero.
pub const ZERO_FLUX_FRACTION: f64 = 1e-12;

/// ln C(n, k) by direct summation of logarithms.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
}

/// Exact through u128 while it fits, log-space beyond.
pub fn binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    let k = k.min(n - k);
    if n <= 120 {
        (1..=k).fold(1u128, |acc, i| acc * (n - k + i) as u128 / i as u128) as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

/// C(N, N/2 + M) for every ladder level, descending-M order.
pub fn dicke_degeneracies(n_qubits: usize) -> Vec<f64> {
    // index i ↔ M = N/2 − i ↔ N/2 + M = N − i excitations
    (0..=n_qubits).map(|i| binomial(n_qubits, n_qubits - i)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceFactors {
    pub n_qubits: usize,
    /// a_M κ(ω_M) n(ω_M), per link.
    pub gamma_up: Vec<f64>,
    /// a_M κ(ω_M)(1 + n(ω_M)), per link.
    pub gamma_down: Vec<f64>,
    /// C(N, N/2 + M), per level.
    pub binom: Vec<f64>,
    /// X_MM, per level.
    pub x_diag: Vec<f64>,
    /// Largest |⟨e,a|X|e,a′⟩| over degenerate pairs a ≠ a′.
    pub c_x: f64,
}

pub fn coherence_factors(ladder: &LadderModel, rates: &RateTable) -> Result<CoherenceFactors> {
    if rates.links.len() != ladder.gaps.len() {
        return Err(Error::DimensionMismatch { expected: ladder.gaps.len(), actual: rates.links.len() });
    }
    for (k, &gap) in ladder.gaps.iter().enumerate() {
        if gap <= 0.0 {
            return Err(Error::NonpositiveGap { m: ladder.levels[k], gap });
        }
    }
    let n = ladder.n_qubits;
    let gamma_up: Vec<f64> = rates.links.iter().map(|l| l.up_rate).collect();
    let gamma_down: Vec<f64> = rates.links.iter().map(|l| l.down_rate).collect();
    let binom = dicke_degeneracies(n);
    let x_diag: Vec<f64> = (0..=n)
        .map(|i| {
            // link i carries Δ_M, link i − 1 carries Δ_{M+1}
            let own = if i < n { ladder.gaps[i].powi(2) * gamma_up[i] } else { 0.0 };
            let above = if i >= 1 { ladder.gaps[i - 1].powi(2) * gamma_down[i - 1] } else { 0.0 };
            own + above
        })
        .collect();
    // ⟨a|M⟩⟨M|a′⟩ = 1/C for every pair inside a degenerate level; a level
    // with C = 1 has no off-diagonal pair
    let c_x = x_diag
        .iter()
        .zip(&binom)
        .filter(|(_, &c)| c > 1.5)
        .map(|(x, c)| x / c)
        .fold(0.0, f64::max);
    Ok(CoherenceFactors { n_qubits: n, gamma_up, gamma_down, binom, x_diag, c_x })
}

/// A_cl = Tr[X ρ_sd] = Σ_M p_M X_MM / C(N, N/2 + M).
pub fn a_classical(state: &PopulationState, factors: &CoherenceFactors) -> Result<f64> {
    check_dim(state, factors)?;
    Ok(state
        .probs
        .iter()
        .zip(factors.x_diag.iter().zip(&factors.binom))
        .map(|(p, (x, c))| p * x / c)
        .sum())
}

/// l1 coherence of ρ_bd = ρ in the computational basis: Σ_M p_M (C − 1).
pub fn c_l1(state: &PopulationState) -> f64 {
    let binom = dicke_degeneracies(state.n_qubits);
    state.probs.iter().zip(&binom).map(|(p, c)| p * (c - 1.0)).sum()
}

/// A_qm = C_X · C_l1(ρ_bd).
pub fn a_quantum(state: &PopulationState, factors: &CoherenceFactors) -> Result<f64> {
    check_dim(state, factors)?;
    Ok(factors.c_x * c_l1(state))
}

fn check_dim(state: &PopulationState, factors: &CoherenceFactors) -> Result<()> {
    if state.n_qubits != factors.n_qubits {
        return Err(Error::DimensionMismatch { expected: factors.n_qubits + 1, actual: state.dim() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub t: f64,
    pub stroke: Stroke,
    pub a_cl: f64,
    pub a_qm: f64,
    pub a_mean: f64,
    pub j: f64,
    pub sigma_dot: f64,
    pub ratio_ok: bool,
}

impl BoundSample {
    /// J²/σ̇, zero under the 0/0 convention.
    pub fn ratio(&self) -> f64 {
        if self.sigma_dot > 0.0 {
            self.j * self.j / self.sigma_dot
        } else {
            0.0
        }
    }
}

/// Gross (one-way) flux scales of J and σ̇, used to recognise roundoff zeros.
fn gross_scales(state: &PopulationState, gen: &Generator, ladder: &LadderModel, beta: f64) -> (f64, f64) {
    let dim = state.dim();
    let mut j_scale = 0.0;
    let mut s_scale = 0.0;
    for i in 0..dim {
        let churn: f64 = (0..dim).map(|j| (gen.matrix[[i, j]] * state.probs[j]).abs()).sum();
        let e = ladder.energies[i].abs();
        j_scale += e * churn;
        s_scale += churn * (state.probs[i].max(LOG_FLOOR).ln().abs() + beta * e);
    }
    (j_scale, s_scale)
}

pub fn bound_sample(
    t: f64,
    stroke: Stroke,
    state: &PopulationState,
    gen: &Generator,
    ladder: &LadderModel,
    factors: &CoherenceFactors,
    beta: f64,
) -> Result<BoundSample> {
    let j = heat_current(state, gen, ladder);
    let sigma_dot = entropy_production_rate(state, gen, ladder, beta)?;
    let a_cl = a_classical(state, factors)?;
    let a_qm = a_quantum(state, factors)?;
    let a_mean = 0.5 * (a_cl + a_qm);
    let (j_scale, s_scale) = gross_scales(state, gen, ladder, beta);
    let zero_j = j.abs() <= ZERO_FLUX_FRACTION * j_scale;
    let zero_sigma = sigma_dot.abs() <= ZERO_FLUX_FRACTION * s_scale;
    let ratio_ok = if zero_j && zero_sigma {
        true
    } else {
        sigma_dot > 0.0 && j * j <= a_mean * sigma_dot * (1.0 + VERDICT_TOLERANCE)
    };
    Ok(BoundSample { t, stroke, a_cl, a_qm, a_mean, j, sigma_dot, ratio_ok })
}

/// Evaluates J²/σ̇ ≤ A(t) at every point of a stroke trajectory. `t_offset`
/// shifts sample times onto the cycle clock.
pub fn check_current_bound(
    traj: &Trajectory,
    gen: &Generator,
    ladder: &LadderModel,
    factors: &CoherenceFactors,
    beta: f64,
    t_offset: f64,
) -> Result<Vec<BoundSample>> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| bound_sample(t + t_offset, traj.stroke, s, gen, ladder, factors, beta))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub a_bar: f64,
    pub alpha: f64,
    pub p_over_delta_eta: f64,
    pub bound_value: f64,
    pub satisfied: bool,
    /// (P/Δη)/(αĀ); at most 1 when the bound holds.
    pub margin: f64,
    /// Δη = 0: the ratio P/Δη is undefined and the verdict is not meaningful.
    pub division_by_zero: bool,
}

/// α = β_C η_C / (2 − η_C)².
pub fn alpha_factor(beta_cold: f64, eta_carnot: f64) -> f64 {
    beta_cold * eta_carnot / (2.0 - eta_carnot).powi(2)
}

fn trapezoid(samples: &[BoundSample]) -> f64 {
    samples.windows(2).map(|w| (w[1].t - w[0].t) * 0.5 * (w[0].a_mean + w[1].a_mean)).sum()
}

/// Time average of A over the cycle (each stroke integrated separately) and
/// the P/Δη ≤ αĀ verdict.
pub fn check_power_bound(
    record: &CycleRecord,
    hot: &[BoundSample],
    cold: &[BoundSample],
    beta_cold: f64,
) -> BoundReport {
    let a_bar = if record.tau > 0.0 { (trapezoid(hot) + trapezoid(cold)) / record.tau } else { 0.0 };
    let alpha = alpha_factor(beta_cold, record.eta_carnot);
    let bound_value = alpha * a_bar;
    let division_by_zero = record.delta_eta == 0.0;
    let p_over_delta_eta = if division_by_zero { f64::INFINITY } else { record.power / record.delta_eta };
    let satisfied = !division_by_zero && p_over_delta_eta <= bound_value * (1.0 + VERDICT_TOLERANCE);
    let margin = if bound_value > 0.0 { p_over_delta_eta / bound_value } else { f64::INFINITY };
    BoundReport { a_bar, alpha, p_over_delta_eta, bound_value, satisfied, margin, division_by_zero }
}

/// Bound evaluation for one engine cycle.
#[derive(Debug, Clone)]
pub struct CycleBound {
    pub record: CycleRecord,
    pub hot: Vec<BoundSample>,
    pub cold: Vec<BoundSample>,
    pub report: BoundReport,
}

impl CycleBound {
    pub fn all_current_bounds_hold(&self) -> bool {
        self.hot.iter().chain(&self.cold).all(|s| s.ratio_ok)
    }

    pub fn max_current_ratio(&self) -> f64 {
        self.hot.iter().chain(&self.cold).map(BoundSample::ratio).fold(0.0, f64::max)
    }
}

/// Runs one cycle from `state`, sampling each stroke with `samples_per_stroke`
/// points and evaluating both trade-off inequalities. Fails with
/// `NonpositiveGap` when either stroke's ladder has a non-positive gap.
pub fn evaluate_cycle(
    state: &PopulationState,
    plan: &StrokePlan,
    samples_per_stroke: usize,
) -> Result<CycleBound> {
    let f_hot = coherence_factors(&plan.ladder_hot, &plan.rates_hot)?;
    let f_cold = coherence_factors(&plan.ladder_cold, &plan.rates_cold)?;
    let (_, record) = run_cycle(state, plan)?;

    let traj_hot = sample_trajectory(state, &plan.gen_hot, plan.tau_hot, samples_per_stroke, Stroke::Hot)?;
    let mid = traj_hot.states.last().cloned().expect("trajectory has at least two samples");
    let traj_cold = sample_trajectory(&mid, &plan.gen_cold, plan.tau_cold, samples_per_stroke, Stroke::Cold)?;

    let hot = check_current_bound(&traj_hot, &plan.gen_hot, &plan.ladder_hot, &f_hot, plan.bath_hot.beta, 0.0)?;
    let cold = check_current_bound(
        &traj_cold,
        &plan.gen_cold,
        &plan.ladder_cold,
        &f_cold,
        plan.bath_cold.beta,
        plan.tau_hot,
    )?;
    let report = check_power_bound(&record, &hot, &cold, plan.bath_cold.beta);
    Ok(CycleBound { record, hot, cold, report })
}

/// Net flux form Σ_links (w₊ − w₋) ln(w₊/w₋) of the entropy production
/// rate, independent of the Ṡ − βJ route.
pub fn link_entropy_production(state: &PopulationState, gen: &Generator) -> f64 {
    let dim = state.dim();
    let mut total = 0.0;
    for k in 0..dim.saturating_sub(1) {
        let fwd = gen.matrix[[k + 1, k]] * state.probs[k];
        let bwd = gen.matrix[[k, k + 1]] * state.probs[k + 1];
        if fwd > 0.0 && bwd > 0.0 {
            total += (fwd - bwd) * (fwd / bwd).ln();
        }
    }
    total
}

/// Σ_M ṗ_M, for diagnostics.
pub fn probability_drift(state: &PopulationState, gen: &Generator) -> f64 {
    population_rate(state, gen).sum()
}
