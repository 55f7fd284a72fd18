//! Dicke-ladder spectrum, the engineered cavity bath and the population rate
//! generator of the collective master equation.
//!
//! Population vectors are indexed by M in descending order: index `i` holds
//! M = N/2 − i, so index 0 is the fully excited state |N/2⟩ and index N is
//! |−N/2⟩. Link `k` couples index `k` (M) with index `k + 1` (M − 1) and
//! carries the gap Δ_M = E_M − E_{M−1}.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Spectral data of the maximal-J Dicke ladder for H = ω_A J_z + Ω J_z².
#[derive(Debug, Clone, PartialEq)]
pub struct LadderModel {
    pub n_qubits: usize,
    pub omega_a: f64,
    pub omega_interaction: f64,
    /// M = N/2, N/2 − 1, …, −N/2.
    pub levels: Vec<f64>,
    /// E_M, aligned with `levels`.
    pub energies: Vec<f64>,
    /// Δ_M for M = N/2 … −N/2 + 1 (one entry per link, signed).
    pub gaps: Vec<f64>,
    /// ω_M = |Δ_M|.
    pub trans_freqs: Vec<f64>,
    /// a_M = (N/2 + M)(N/2 − M + 1) per link.
    pub degeneracy_factors: Vec<f64>,
}

pub fn level_energy(omega_a: f64, omega_interaction: f64, m: f64) -> f64 {
    omega_a * m + omega_interaction * m * m
}

pub fn enhancement_factor(n_qubits: usize, m: f64) -> f64 {
    let half = n_qubits as f64 / 2.0;
    (half + m) * (half - m + 1.0)
}

pub fn build_ladder(n_qubits: usize, omega_a: f64, omega_interaction: f64) -> LadderModel {
    assert!(n_qubits >= 1, "ladder needs at least one qubit");
    let half = n_qubits as f64 / 2.0;
    let levels: Vec<f64> = (0..=n_qubits).map(|i| half - i as f64).collect();
    let energies = levels
        .iter()
        .map(|&m| level_energy(omega_a, omega_interaction, m))
        .collect();
    let link_ms = &levels[..n_qubits];
    let gaps: Vec<f64> = link_ms
        .iter()
        .map(|&m| omega_a + (2.0 * m - 1.0) * omega_interaction)
        .collect();
    let trans_freqs = gaps.iter().map(|g| g.abs()).collect();
    let degeneracy_factors = link_ms
        .iter()
        .map(|&m| enhancement_factor(n_qubits, m))
        .collect();
    LadderModel {
        n_qubits,
        omega_a,
        omega_interaction,
        levels,
        energies,
        gaps,
        trans_freqs,
        degeneracy_factors,
    }
}

impl LadderModel {
    pub fn dim(&self) -> usize {
        self.n_qubits + 1
    }

    /// Index of level M in population vectors, if M is on the ladder.
    pub fn index_of(&self, m: f64) -> Option<usize> {
        let twice = (self.n_qubits as f64 - 2.0 * m).round();
        if (twice - (self.n_qubits as f64 - 2.0 * m)).abs() > 1e-9 || twice < 0.0 || twice % 2.0 != 0.0 {
            return None;
        }
        let i = (twice / 2.0) as usize;
        (i <= self.n_qubits).then_some(i)
    }

    /// Link index carrying Δ_M, if M − 1 and M are both on the ladder.
    pub fn link_of(&self, m: f64) -> Option<usize> {
        self.index_of(m).filter(|&i| i < self.n_qubits)
    }

    pub fn energy(&self, m: f64) -> Option<f64> {
        self.index_of(m).map(|i| self.energies[i])
    }

    pub fn gap(&self, m: f64) -> Option<f64> {
        self.link_of(m).map(|k| self.gaps[k])
    }

    /// a_M for the link ending at M; zero when the link is off the ladder.
    pub fn enhancement(&self, m: f64) -> f64 {
        self.link_of(m).map_or(0.0, |k| self.degeneracy_factors[k])
    }

    pub fn all_gaps_positive(&self) -> bool {
        self.gaps.iter().all(|&g| g > 0.0)
    }
}

/// Leaky cavity bath seen by the qubits through a Lorentzian form factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathModel {
    pub omega_cavity: f64,
    pub coupling: f64,
    pub linewidth: f64,
    pub beta: f64,
}

impl BathModel {
    /// On-resonance Purcell rate 8g²/Δω.
    pub fn purcell_rate(&self) -> f64 {
        8.0 * self.coupling * self.coupling / self.linewidth
    }
}

/// κ(ω) = 4π|ξ(ω)|² = 2Δω g² / ((ω − ω_c)² + Δω²/4).
pub fn spectral_density(bath: &BathModel, omega: f64) -> f64 {
    let detuning = omega - bath.omega_cavity;
    2.0 * bath.linewidth * bath.coupling * bath.coupling
        / (detuning * detuning + 0.25 * bath.linewidth * bath.linewidth)
}

const OCCUPATION_CUTOFF: f64 = 700.0;

/// Bose–Einstein occupation 1/(e^{βω} − 1).
pub fn occupation(beta: f64, omega: f64) -> f64 {
    let x = beta * omega;
    if x > OCCUPATION_CUTOFF {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapSign {
    Positive,
    Negative,
}

/// Transition rates of one ladder link between |M⟩ and |M − 1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRates {
    pub m: f64,
    pub omega: f64,
    /// a_M κ(ω_M)(1 + n(ω_M)): the energy-lowering direction.
    pub down_rate: f64,
    /// a_M κ(ω_M) n(ω_M): the energy-raising direction.
    pub up_rate: f64,
    pub gap_sign: GapSign,
}

impl LinkRates {
    /// Rate of |M⟩ → |M − 1⟩.
    pub fn rate_lowering_m(&self) -> f64 {
        match self.gap_sign {
            GapSign::Positive => self.down_rate,
            GapSign::Negative => self.up_rate,
        }
    }

    /// Rate of |M − 1⟩ → |M⟩.
    pub fn rate_raising_m(&self) -> f64 {
        match self.gap_sign {
            GapSign::Positive => self.up_rate,
            GapSign::Negative => self.down_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub n_qubits: usize,
    /// One entry per link, same order as `LadderModel::gaps`.
    pub links: Vec<LinkRates>,
}

/// Builds the detailed-balance rates of every link. `gap_floor` is absolute
/// (rad/s); links with |Δ_M| below it are rejected because n(ω) diverges.
pub fn build_rates(ladder: &LadderModel, bath: &BathModel, gap_floor: f64) -> Result<RateTable> {
    let mut links = Vec::with_capacity(ladder.gaps.len());
    for (k, &gap) in ladder.gaps.iter().enumerate() {
        let m = ladder.levels[k];
        let omega = gap.abs();
        if omega < gap_floor {
            return Err(Error::DegenerateGap { m, gap: omega, floor: gap_floor });
        }
        let a = ladder.degeneracy_factors[k];
        let kappa = spectral_density(bath, omega);
        let n = occupation(bath.beta, omega);
        let down_rate = a * kappa * (1.0 + n);
        let up_rate = a * kappa * n;
        if !(down_rate.is_finite() && up_rate.is_finite()) || down_rate < 0.0 || up_rate < 0.0 {
            return Err(Error::NonFinite("ladder transition rates"));
        }
        let gap_sign = if gap > 0.0 { GapSign::Positive } else { GapSign::Negative };
        links.push(LinkRates { m, omega, down_rate, up_rate, gap_sign });
    }
    Ok(RateTable { n_qubits: ladder.n_qubits, links })
}

/// Rate matrix G with dp/dt = G p in the descending-M index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub matrix: Array2<f64>,
}

pub fn build_generator(rates: &RateTable) -> Generator {
    let dim = rates.n_qubits + 1;
    let mut g = Array2::<f64>::zeros((dim, dim));
    for (k, link) in rates.links.iter().enumerate() {
        // index k is M, index k + 1 is M − 1
        g[[k + 1, k]] += link.rate_lowering_m();
        g[[k, k + 1]] += link.rate_raising_m();
    }
    for j in 0..dim {
        let outflow: f64 = (0..dim).filter(|&i| i != j).map(|i| g[[i, j]]).sum();
        g[[j, j]] = -outflow;
    }
    Generator { matrix: g }
}

impl Generator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Column sums with off-diagonal entries accumulated first.
    pub fn column_sums(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim)
            .map(|j| {
                let off: f64 = (0..dim).filter(|&i| i != j).map(|i| self.matrix[[i, j]]).sum();
                off + self.matrix[[j, j]]
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Convenience: ladder, rates and generator for one stroke.
pub fn stroke_generator(
    ladder: &LadderModel,
    bath: &BathModel,
    gap_floor: f64,
) -> Result<(RateTable, Generator)> {
    let rates = build_rates(ladder, bath, gap_floor)?;
    let gen = build_generator(&rates);
    Ok((rates, gen))
}
