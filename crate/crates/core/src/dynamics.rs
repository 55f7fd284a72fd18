//! Exact propagation of ladder populations and the instantaneous
//! thermodynamic observables built on them.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::ladder::{Generator, LadderModel};
use crate::linalg::expm_metzler;

/// Negative populations down to this value are treated as roundoff and clamped.
pub const NEGATIVE_SLACK: f64 = 1e-12;
const NEGATIVE_HARD_LIMIT: f64 = 1e-9;
/// Floor applied to populations inside logarithms.
pub const LOG_FLOOR: f64 = 1e-300;
/// σ̇ below −SIGMA_ERROR_BAND·scale is reported as an implementation error.
pub const SIGMA_ERROR_BAND: f64 = 1e-6;

/// Probability vector over Dicke states, descending-M order.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    pub n_qubits: usize,
    pub probs: Array1<f64>,
}

impl PopulationState {
    pub fn new(n_qubits: usize, probs: Array1<f64>) -> Result<Self> {
        if probs.len() != n_qubits + 1 {
            return Err(Error::DimensionMismatch { expected: n_qubits + 1, actual: probs.len() });
        }
        let mut s = Self { n_qubits, probs };
        s.clamp()?;
        Ok(s)
    }

    /// Pure Dicke state at ladder index `index`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut probs = Array1::zeros(n_qubits + 1);
        probs[index] = 1.0;
        Self { n_qubits, probs }
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn total(&self) -> f64 {
        self.probs.sum()
    }

    fn clamp(&mut self) -> Result<()> {
        for (index, p) in self.probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite("population vector"));
            }
            if *p < 0.0 {
                if *p < -NEGATIVE_HARD_LIMIT {
                    return Err(Error::NegativePopulation { index, value: *p });
                }
                *p = 0.0;
            }
        }
        Ok(())
    }
}

/// Gibbs distribution p_M ∝ e^{−βE_M} over the ladder.
pub fn gibbs_state(ladder: &LadderModel, beta: f64) -> PopulationState {
    let e_min = ladder.energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Array1<f64> = ladder.energies.iter().map(|e| (-beta * (e - e_min)).exp()).collect();
    let z = w.sum();
    PopulationState { n_qubits: ladder.n_qubits, probs: w / z }
}

fn check_dims(state: &PopulationState, gen: &Generator) -> Result<()> {
    if gen.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), actual: state.dim() });
    }
    Ok(())
}

/// exp(G t) as a dense matrix.
pub fn propagator(gen: &Generator, duration: f64) -> Result<Array2<f64>> {
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::OutOfRange { what: "duration", value: duration, reason: "must be finite and ≥ 0" });
    }
    if duration == 0.0 {
        return Ok(Array2::eye(gen.dim()));
    }
    expm_metzler(&(&gen.matrix * duration)).ok_or(Error::NonFinite("matrix exponential"))
}

/// Applies a precomputed propagator and clamps roundoff negativity.
pub fn apply_propagator(state: &PopulationState, prop: &Array2<f64>) -> Result<PopulationState> {
    if prop.nrows() != state.dim() {
        return Err(Error::DimensionMismatch { expected: prop.nrows(), actual: state.dim() });
    }
    PopulationState::new(state.n_qubits, prop.dot(&state.probs))
}

pub fn propagate(state: &PopulationState, gen: &Generator, duration: f64) -> Result<PopulationState> {
    check_dims(state, gen)?;
    let prop = propagator(gen, duration)?;
    apply_propagator(state, &prop)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stroke {
    Hot,
    Cold,
}

impl Stroke {
    pub fn label(self) -> &'static str {
        match self {
            Stroke::Hot => "hot",
            Stroke::Cold => "cold",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PopulationState>,
    pub stroke: Stroke,
}

/// States at `n_samples` equally spaced times in [0, duration], each
/// propagated directly from the initial state.
pub fn sample_trajectory(
    state: &PopulationState,
    gen: &Generator,
    duration: f64,
    n_samples: usize,
    stroke: Stroke,
) -> Result<Trajectory> {
    check_dims(state, gen)?;
    if n_samples < 2 {
        return Err(Error::OutOfRange { what: "n_samples", value: n_samples as f64, reason: "must be ≥ 2" });
    }
    let mut times = Vec::with_capacity(n_samples);
    let mut states = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = if k + 1 == n_samples { duration } else { duration * k as f64 / (n_samples - 1) as f64 };
        states.push(propagate(state, gen, t)?);
        times.push(t);
    }
    Ok(Trajectory { times, states, stroke })
}

/// Σ_M E_M p_M.
pub fn mean_energy(state: &PopulationState, ladder: &LadderModel) -> f64 {
    state.probs.iter().zip(&ladder.energies).map(|(p, e)| p * e).sum()
}

/// dp/dt = G p.
pub fn population_rate(state: &PopulationState, gen: &Generator) -> Array1<f64> {
    gen.matrix.dot(&state.probs)
}

/// J = Tr[H dρ/dt] = Σ_M E_M (G p)_M.
pub fn heat_current(state: &PopulationState, gen: &Generator, ladder: &LadderModel) -> f64 {
    population_rate(state, gen).iter().zip(&ladder.energies).map(|(dp, e)| dp * e).sum()
}

/// Shannon entropy of the populations (von Neumann entropy of the diagonal state).
pub fn entropy(state: &PopulationState) -> f64 {
    state.probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// dS/dt = −Σ_M (G p)_M ln p_M.
pub fn entropy_rate(state: &PopulationState, gen: &Generator) -> f64 {
    population_rate(state, gen)
        .iter()
        .zip(&state.probs)
        .filter(|(dp, _)| **dp != 0.0)
        .map(|(dp, p)| -dp * p.max(LOG_FLOOR).ln())
        .sum()
}

/// σ̇ = Ṡ − βJ. Fails if σ̇ is negative beyond roundoff, which a detailed-balance
/// generator cannot produce.
pub fn entropy_production_rate(
    state: &PopulationState,
    gen: &Generator,
    ladder: &LadderModel,
    beta: f64,
) -> Result<f64> {
    check_dims(state, gen)?;
    let dp = population_rate(state, gen);
    let mut s_dot = 0.0;
    let mut j = 0.0;
    // gross one-way flux through each level sets the roundoff scale
    let mut scale = 0.0;
    for (i, ((d, p), e)) in dp.iter().zip(&state.probs).zip(&ladder.energies).enumerate() {
        let log_p = p.max(LOG_FLOOR).ln();
        if *d != 0.0 {
            s_dot -= d * log_p;
        }
        j += d * e;
        let churn: f64 = gen.matrix.row(i).iter().zip(&state.probs).map(|(g, q)| (g * q).abs()).sum();
        scale += churn * (log_p.abs() + (beta * e).abs());
    }
    let sigma = s_dot - beta * j;
    if !sigma.is_finite() {
        return Err(Error::NonFinite("entropy production rate"));
    }
    if sigma < -SIGMA_ERROR_BAND * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NegativeEntropyProduction(sigma));
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{build_ladder, build_rates, build_generator, spectral_density, occupation, BathModel};
    use approx::assert_relative_eq;
    use ndarray::array;

    fn small_system(n: usize) -> (LadderModel, BathModel, Generator) {
        let ladder = build_ladder(n, 1.0, 0.08);
        let bath = BathModel { omega_cavity: 1.0, coupling: 0.02, linewidth: 0.05, beta: 2.0 };
        let rates = build_rates(&ladder, &bath, 1e-9).unwrap();
        let gen = build_generator(&rates);
        (ladder, bath, gen)
    }

    #[test]
    fn zero_duration_is_identity() {
        let (_, _, gen) = small_system(5);
        let s = PopulationState::new(5, array![0.1, 0.2, 0.3, 0.15, 0.15, 0.1]).unwrap();
        assert_eq!(propagate(&s, &gen, 0.0).unwrap(), s);
    }

    #[test]
    fn two_level_closed_form() {
        let (ladder, bath, gen) = small_system(1);
        let kappa = spectral_density(&bath, ladder.gaps[0]);
        let n = occupation(bath.beta, ladder.gaps[0]);
        let p_inf = n / (1.0 + 2.0 * n);
        let p0 = 0.8;
        let s = PopulationState::new(1, array![p0, 1.0 - p0]).unwrap();
        for t in [0.0, 0.3, 1.0, 7.0, 40.0] {
            let got = propagate(&s, &gen, t).unwrap();
            let expect = p_inf + (p0 - p_inf) * (-kappa * (1.0 + 2.0 * n) * t).exp();
            assert!((got.probs[0] - expect).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn relaxes_to_gibbs() {
        let (ladder, bath, gen) = small_system(5);
        let s = PopulationState::basis(5, 0);
        let slowest = gen.matrix.diag().iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
        let out = propagate(&s, &gen, 200.0 / slowest).unwrap();
        let gibbs = gibbs_state(&ladder, bath.beta);
        let tv: f64 = 0.5 * (&out.probs - &gibbs.probs).mapv(f64::abs).sum();
        assert!(tv < 1e-8, "tv = {tv}");
    }

    #[test]
    fn trajectory_endpoints_and_semigroup() {
        let (_, _, gen) = small_system(3);
        let s = PopulationState::new(3, array![0.0, 0.1, 0.9, 0.0]).unwrap();
        let traj = sample_trajectory(&s, &gen, 2.0, 2, Stroke::Hot).unwrap();
        assert_eq!(traj.times, vec![0.0, 2.0]);
        let direct = propagate(&s, &gen, 2.0).unwrap();
        let chained = propagate(&propagate(&s, &gen, 0.7).unwrap(), &gen, 1.3).unwrap();
        for i in 0..4 {
            assert!((traj.states[1].probs[i] - direct.probs[i]).abs() < 1e-12);
            assert!((chained.probs[i] - direct.probs[i]).abs() < 1e-10);
        }
        assert!(sample_trajectory(&s, &gen, 1.0, 1, Stroke::Hot).is_err());
    }

    #[test]
    fn energy_examples() {
        let ladder = build_ladder(3, 1.0, 0.1);
        let s = PopulationState::basis(3, 1);
        assert_relative_eq!(mean_energy(&s, &ladder), 0.525, epsilon = 1e-15);

        let ladder = build_ladder(1, 1.4, 0.3);
        let s = PopulationState::new(1, array![0.5, 0.5]).unwrap();
        let avg = 0.5 * (ladder.energies[0] + ladder.energies[1]);
        assert_relative_eq!(mean_energy(&s, &ladder), avg, epsilon = 1e-15);
        assert_relative_eq!(avg, 0.3 / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn gibbs_energy_decreases_with_beta() {
        let ladder = build_ladder(7, 1.0, 0.05);
        let mut prev = f64::INFINITY;
        for k in 0..50 {
            let beta = 0.1 + 0.1 * k as f64;
            let e = mean_energy(&gibbs_state(&ladder, beta), &ladder);
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn current_at_fixed_point_and_below_it() {
        let (ladder, bath, gen) = small_system(5);
        let g = gibbs_state(&ladder, bath.beta);
        let scale = gen.max_abs() * ladder.energies.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        assert!(heat_current(&g, &gen, &ladder).abs() < 1e-12 * scale);
        assert!(entropy_production_rate(&g, &gen, &ladder, bath.beta).unwrap().abs() < 1e-12 * scale);
        // ground state is colder than any finite-temperature bath
        let cold = PopulationState::basis(5, 5);
        assert!(heat_current(&cold, &gen, &ladder) > 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&PopulationState::basis(4, 2)), 0.0);
        let u = PopulationState::new(4, Array1::from_elem(5, 0.2)).unwrap();
        assert_relative_eq!(entropy(&u), 5f64.ln(), epsilon = 1e-14);
        let h = PopulationState::new(1, array![0.5, 0.5]).unwrap();
        assert_relative_eq!(entropy(&h), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn finite_difference_current_and_entropy_rate() {
        let (ladder, _, gen) = small_system(5);
        let s = PopulationState::new(5, array![0.05, 0.1, 0.4, 0.3, 0.1, 0.05]).unwrap();
        let h = 1e-4;
        let plus = propagate(&s, &gen, h).unwrap();
        let minus_start = propagate(&s, &gen, 2.0 * h).unwrap();
        // central difference around t = h
        let j_fd = (mean_energy(&minus_start, &ladder) - mean_energy(&s, &ladder)) / (2.0 * h);
        let j = heat_current(&plus, &gen, &ladder);
        assert!(((j_fd - j) / j).abs() < 1e-6, "{j_fd} vs {j}");
        let sd_fd = (entropy(&minus_start) - entropy(&s)) / (2.0 * h);
        let sd = entropy_rate(&plus, &gen);
        assert!(((sd_fd - sd) / sd).abs() < 1e-6, "{sd_fd} vs {sd}");
    }

    #[test]
    fn negative_population_rejected() {
        assert!(PopulationState::new(1, array![1.1, -0.1]).is_err());
        let s = PopulationState::new(1, array![1.0, -1e-14]).unwrap();
        assert_eq!(s.probs[1], 0.0);
        assert!(PopulationState::new(2, array![1.0, 0.0]).is_err());
    }
}
