//! Four-stroke superabsorption engine: stroke schedule, per-cycle
//! thermodynamic ledger, closed-form two-level predictions and the N sweep.

use ndarray::Array2;
use rayon::prelude::*;

use crate::dynamics::{apply_propagator, propagate, propagator, PopulationState};
use crate::error::{Error, Result};
use crate::ladder::{
    build_ladder, enhancement_factor, occupation, spectral_density, stroke_generator, BathModel,
    Generator, LadderModel, RateTable,
};
use crate::units::NaturalParams;

/// Everything needed to run cycles at fixed N.
#[derive(Debug, Clone)]
pub struct StrokePlan {
    pub tau_hot: f64,
    pub tau_cold: f64,
    pub ladder_hot: LadderModel,
    pub ladder_cold: LadderModel,
    pub bath_hot: BathModel,
    pub bath_cold: BathModel,
    pub rates_hot: RateTable,
    pub rates_cold: RateTable,
    pub gen_hot: Generator,
    pub gen_cold: Generator,
    pub eta_carnot: f64,
}

pub fn hot_bath(p: &NaturalParams) -> BathModel {
    BathModel { omega_cavity: p.omega_a_hot, coupling: p.coupling, linewidth: p.linewidth, beta: p.beta_hot }
}

pub fn cold_bath(p: &NaturalParams) -> BathModel {
    BathModel { omega_cavity: p.omega_a_cold, coupling: p.coupling, linewidth: p.linewidth, beta: p.beta_cold }
}

/// Relaxation rate Γ_{1/2}^↓ = κ(ω_c)(1 + n) of the resonant central link.
fn central_down_rate(bath: &BathModel) -> f64 {
    bath.purcell_rate() * (1.0 + occupation(bath.beta, bath.omega_cavity))
}

impl StrokePlan {
    pub fn new(p: &NaturalParams) -> Result<Self> {
        let n = p.n_qubits;
        let ladder_hot = build_ladder(n, p.omega_a_hot, p.omega_interaction);
        let ladder_cold = build_ladder(n, p.omega_a_cold, p.omega_interaction);
        let bath_hot = hot_bath(p);
        let bath_cold = cold_bath(p);
        let floor = p.gap_floor_abs();
        let (rates_hot, gen_hot) = stroke_generator(&ladder_hot, &bath_hot, floor)?;
        let (rates_cold, gen_cold) = stroke_generator(&ladder_cold, &bath_cold, floor)?;
        let a_half = enhancement_factor(n, 0.5);
        let tau_hot = p.epsilon / (a_half * central_down_rate(&bath_hot));
        let tau_cold = p.epsilon / (a_half * central_down_rate(&bath_cold));
        Ok(Self {
            tau_hot,
            tau_cold,
            ladder_hot,
            ladder_cold,
            bath_hot,
            bath_cold,
            rates_hot,
            rates_cold,
            gen_hot,
            gen_cold,
            eta_carnot: p.carnot_efficiency(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.ladder_hot.n_qubits
    }

    pub fn tau(&self) -> f64 {
        self.tau_hot + self.tau_cold
    }

    /// Same plan with different stroke durations.
    pub fn with_durations(mut self, tau_hot: f64, tau_cold: f64) -> Self {
        self.tau_hot = tau_hot;
        self.tau_cold = tau_cold;
        self
    }
}

/// Thermodynamic ledger of one cycle. Energies in rad/s, power in rad/s².
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle_index: usize,
    pub q_hot: f64,
    pub q_cold: f64,
    pub w_out: f64,
    pub w_in: f64,
    pub w_ext: f64,
    pub eta: f64,
    pub power: f64,
    pub eta_carnot: f64,
    pub delta_eta: f64,
    pub tau: f64,
    /// Population outside {|1/2⟩, |−1/2⟩} at the end of the cycle.
    pub leak_mass: f64,
    /// Mean hot-ladder energy at the start and end of the cycle.
    pub energy_hot_start: f64,
    pub energy_hot_end: f64,
}

impl CycleRecord {
    /// E^H(end) − E^H(start) − (Q_H − Q_C − W_ext).
    pub fn energy_balance_residual(&self) -> f64 {
        (self.energy_hot_end - self.energy_hot_start) - (self.q_hot - self.q_cold - self.w_ext)
    }
}

fn dot(a: &[f64], p: &PopulationState) -> f64 {
    a.iter().zip(p.probs.iter()).map(|(x, y)| x * y).sum()
}

fn e2ls_indices(n_qubits: usize) -> (usize, usize) {
    // M = 1/2 and M = −1/2 in descending order
    let upper = (n_qubits - 1) / 2;
    (upper, upper + 1)
}

pub fn leak_mass(state: &PopulationState) -> f64 {
    let (up, lo) = e2ls_indices(state.n_qubits);
    state
        .probs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != up && *i != lo)
        .map(|(_, p)| p)
        .sum()
}

fn ledger(
    plan: &StrokePlan,
    cycle_index: usize,
    start: &PopulationState,
    after_hot: &PopulationState,
    end: &PopulationState,
) -> CycleRecord {
    let eh = &plan.ladder_hot.energies;
    let ec = &plan.ladder_cold.energies;
    let quench: Vec<f64> = eh.iter().zip(ec).map(|(h, c)| h - c).collect();

    let energy_hot_start = dot(eh, start);
    let energy_hot_mid = dot(eh, after_hot);
    let energy_hot_end = dot(eh, end);
    let q_hot = energy_hot_mid - energy_hot_start;
    let w_out = dot(&quench, after_hot);
    let q_cold = dot(ec, after_hot) - dot(ec, end);
    let w_in = dot(&quench, end);
    let w_ext = w_out - w_in;
    let eta = if q_hot != 0.0 { w_ext / q_hot } else { 0.0 };
    let tau = plan.tau();
    let power = if tau > 0.0 { w_ext / tau } else { 0.0 };
    CycleRecord {
        cycle_index,
        q_hot,
        q_cold,
        w_out,
        w_in,
        w_ext,
        eta,
        power,
        eta_carnot: plan.eta_carnot,
        delta_eta: plan.eta_carnot - eta,
        tau,
        leak_mass: leak_mass(end),
        energy_hot_start,
        energy_hot_end,
    }
}

/// Runs strokes 1–4 once. Quenches are instantaneous and leave the
/// (diagonal) state untouched.
pub fn run_cycle(state: &PopulationState, plan: &StrokePlan) -> Result<(PopulationState, CycleRecord)> {
    let after_hot = propagate(state, &plan.gen_hot, plan.tau_hot)?;
    let end = propagate(&after_hot, &plan.gen_cold, plan.tau_cold)?;
    let record = ledger(plan, 0, state, &after_hot, &end);
    Ok((end, record))
}

/// Stroke propagators exp(G_H τ_H) and exp(G_C τ_C) for repeated cycling.
#[derive(Debug, Clone)]
pub struct CyclePropagators {
    pub hot: Array2<f64>,
    pub cold: Array2<f64>,
}

impl CyclePropagators {
    pub fn new(plan: &StrokePlan) -> Result<Self> {
        Ok(Self {
            hot: propagator(&plan.gen_hot, plan.tau_hot)?,
            cold: propagator(&plan.gen_cold, plan.tau_cold)?,
        })
    }
}

/// Runs `n_cycles` consecutive cycles; returns the final state and one
/// record per cycle (indices starting at 1).
pub fn run_cycles(
    state: &PopulationState,
    plan: &StrokePlan,
    n_cycles: usize,
) -> Result<(PopulationState, Vec<CycleRecord>)> {
    if n_cycles == 0 {
        return Err(Error::OutOfRange { what: "n_cycles", value: 0.0, reason: "must be ≥ 1" });
    }
    let props = CyclePropagators::new(plan)?;
    let mut current = state.clone();
    let mut records = Vec::with_capacity(n_cycles);
    for i in 1..=n_cycles {
        let after_hot = apply_propagator(&current, &props.hot)?;
        let end = apply_propagator(&after_hot, &props.cold)?;
        records.push(ledger(plan, i, &current, &after_hot, &end));
        current = end;
    }
    Ok((current, records))
}

fn project_e2ls(state: &PopulationState) -> PopulationState {
    let (up, lo) = e2ls_indices(state.n_qubits);
    let kept = state.probs[up] + state.probs[lo];
    let mut out = PopulationState::basis(state.n_qubits, up);
    out.probs[up] = state.probs[up] / kept;
    out.probs[lo] = state.probs[lo] / kept;
    out
}

/// Diagnostic cycle with leakage removed: the state is projected back onto
/// the E2LS after each thermalization stroke. Not an energy-conserving
/// ledger; used only to check the leakage-free closed-trajectory limit.
pub fn run_cycle_projected(
    state: &PopulationState,
    plan: &StrokePlan,
) -> Result<(PopulationState, CycleRecord)> {
    let start = project_e2ls(state);
    let after_hot = project_e2ls(&propagate(&start, &plan.gen_hot, plan.tau_hot)?);
    let end = project_e2ls(&propagate(&after_hot, &plan.gen_cold, plan.tau_cold)?);
    let record = ledger(plan, 0, &start, &after_hot, &end);
    Ok((end, record))
}

/// p_{−1/2}(0) = 2/(2 + e^{−β_Hω_A^H} + e^{−β_Cω_A^C}).
pub fn initial_minus_population(p: &NaturalParams) -> f64 {
    let (xh, xc) = boltzmann_factors(p);
    2.0 / (2.0 + xh + xc)
}

fn boltzmann_factors(p: &NaturalParams) -> (f64, f64) {
    ((-p.beta_hot * p.omega_a_hot).exp(), (-p.beta_cold * p.omega_a_cold).exp())
}

/// Two-point initial state on the E2LS.
pub fn initial_state(p: &NaturalParams) -> Result<PopulationState> {
    let n = p.n_qubits;
    if n % 2 == 0 {
        return Err(Error::InvalidParameter { key: "n_qubits", reason: format!("n_qubits must be odd, got {n}") });
    }
    let minus = initial_minus_population(p);
    let (up, lo) = e2ls_indices(n);
    let mut s = PopulationState::basis(n, up);
    s.probs[up] = 1.0 - minus;
    s.probs[lo] = minus;
    Ok(s)
}

/// Closed-form expectations for the leakage-free engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub n_qubits: usize,
    pub p_init_minus: f64,
    pub eta_carnot: f64,
    pub delta_eta_e2ls: f64,
    pub gamma_purcell: f64,
    pub p_one_qubit: f64,
    pub p_e2ls: f64,
    pub p_separable: f64,
    pub chi_conf: f64,
    /// 1/(a_{−1/2}(Γ_{−1/2}^{H↓}τ_H + Γ_{−1/2}^{C↓}τ_C)).
    pub n_conf: f64,
    /// [1 + 16(Ω/Δω)²]/(2ε).
    pub n_conf_closed_form: f64,
    pub tau_hot: f64,
    pub tau_cold: f64,
}

/// Below this χ_conf the confinement assumption is considered weak.
pub const WEAK_CONFINEMENT: f64 = 10.0;

impl Predictions {
    pub fn confinement_weak(&self) -> bool {
        self.chi_conf <= WEAK_CONFINEMENT
    }
}

fn lorentzian_suppression(p: &NaturalParams) -> f64 {
    1.0 + 16.0 * (p.omega_interaction / p.linewidth).powi(2)
}

/// P_{N=1}: single-qubit power with the N = 1 stroke schedule.
pub fn single_qubit_power(p: &NaturalParams) -> f64 {
    let (xh, xc) = boltzmann_factors(p);
    let gamma_p = hot_bath(p).purcell_rate();
    gamma_p * (xh - xc) * (p.omega_a_hot - p.omega_a_cold) / (4.0 - (xh + xc).powi(2))
}

/// N independent single-qubit engines running the N = 1 schedule.
pub fn separable_baseline(p: &NaturalParams) -> f64 {
    p.n_qubits as f64 * single_qubit_power(p)
}

pub fn predict(p: &NaturalParams) -> Result<Predictions> {
    let n = p.n_qubits;
    let (xh, xc) = boltzmann_factors(p);
    let bath_h = hot_bath(p);
    let bath_c = cold_bath(p);
    let a_half = enhancement_factor(n, 0.5);
    let a_minus = enhancement_factor(n, -0.5);
    let tau_hot = p.epsilon / (a_half * central_down_rate(&bath_h));
    let tau_cold = p.epsilon / (a_half * central_down_rate(&bath_c));

    let leak_rate = |bath: &BathModel, omega_a: f64| {
        let omega = (omega_a - 2.0 * p.omega_interaction).abs();
        spectral_density(bath, omega) * (1.0 + occupation(bath.beta, omega))
    };
    let leak_per_cycle =
        a_minus * (leak_rate(&bath_h, p.omega_a_hot) * tau_hot + leak_rate(&bath_c, p.omega_a_cold) * tau_cold);
    let n_conf = if leak_per_cycle > 0.0 { 1.0 / leak_per_cycle } else { f64::INFINITY };

    let p_one_qubit = single_qubit_power(p);
    let suppression = lorentzian_suppression(p);
    Ok(Predictions {
        n_qubits: n,
        p_init_minus: initial_minus_population(p),
        eta_carnot: p.carnot_efficiency(),
        delta_eta_e2ls: p.omega_a_cold / p.omega_a_hot - p.beta_hot / p.beta_cold,
        gamma_purcell: bath_h.purcell_rate(),
        p_one_qubit,
        p_e2ls: a_half * p_one_qubit,
        p_separable: separable_baseline(p),
        chi_conf: suppression * (xh - xc) / 2.0,
        n_conf,
        n_conf_closed_form: suppression / (2.0 * p.epsilon),
        tau_hot,
        tau_cold,
    })
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub p_first_cycle: f64,
    pub p_e2ls: f64,
    pub p_separable: f64,
    pub chi_conf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub slope_simulated: f64,
    pub slope_e2ls: f64,
    pub slope_separable: f64,
}

fn sweep_point(p: &NaturalParams, n: usize) -> Result<SweepRow> {
    let q = p.with_n_qubits(n);
    let plan = StrokePlan::new(&q)?;
    let (_, rec) = run_cycle(&initial_state(&q)?, &plan)?;
    let pred = predict(&q)?;
    Ok(SweepRow {
        n,
        p_first_cycle: rec.power,
        p_e2ls: pred.p_e2ls,
        p_separable: pred.p_separable,
        chi_conf: pred.chi_conf,
    })
}

/// First-cycle power for each N in `n_list` (odd, strictly ascending),
/// evaluated in parallel; rows are ordered by N.
pub fn sweep_n(p: &NaturalParams, n_list: &[usize]) -> Result<SweepResult> {
    if n_list.len() < 2 {
        return Err(Error::OutOfRange { what: "sweep length", value: n_list.len() as f64, reason: "need at least two N values" });
    }
    for w in n_list.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::OutOfRange { what: "n", value: w[1] as f64, reason: "N values must be strictly ascending" });
        }
    }
    if let Some(&bad) = n_list.iter().find(|&&n| n % 2 == 0) {
        return Err(Error::OutOfRange { what: "n", value: bad as f64, reason: "N values must be odd" });
    }
    let rows = n_list.par_iter().map(|&n| sweep_point(p, n)).collect::<Result<Vec<_>>>()?;
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let col = |f: fn(&SweepRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    Ok(SweepResult {
        slope_simulated: loglog_slope(&ns, &col(|r| r.p_first_cycle)),
        slope_e2ls: loglog_slope(&ns, &col(|r| r.p_e2ls)),
        slope_separable: loglog_slope(&ns, &col(|r| r.p_separable)),
        rows,
    })
}
