//! 2N_d-state comparison model: two N_d-fold degenerate levels coupled by a
//! collective jump operator. Only the initial decay-rate scalings are
//! modelled here.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::engine::loglog_slope;
use crate::error::{Error, Result};
use crate::oracle::{evolve_liouville, liouvillian};

pub const MAX_DEGENERACY: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfSpec {
    pub n_degeneracy: usize,
    pub omega0: f64,
    pub gamma_down: f64,
    pub gamma_up: f64,
}

impl TfSpec {
    /// Rates obeying Γ↓/Γ↑ = e^{βω₀}.
    pub fn thermal(n_degeneracy: usize, omega0: f64, gamma_down: f64, beta: f64) -> Result<Self> {
        let spec = Self { n_degeneracy, omega0, gamma_down, gamma_up: gamma_down * (-beta * omega0).exp() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_degeneracy == 0 || self.n_degeneracy > MAX_DEGENERACY {
            return Err(Error::OutOfRange { what: "n_degeneracy", value: self.n_degeneracy as f64, reason: "must lie in 1..=12" });
        }
        for (key, v) in [("omega0", self.omega0), ("gamma_down", self.gamma_down)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter { key, reason: format!("must be a positive finite number, got {v}") });
            }
        }
        if !(self.gamma_up.is_finite() && self.gamma_up >= 0.0) {
            return Err(Error::InvalidParameter { key: "gamma_up", reason: format!("must be non-negative, got {}", self.gamma_up) });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        2 * self.n_degeneracy
    }
}

/// Density matrix over (e,1)…(e,N_d),(g,1)…(g,N_d).
#[derive(Debug, Clone, PartialEq)]
pub struct TfState {
    pub n_degeneracy: usize,
    pub rho: Array2<Complex64>,
}

impl TfState {
    /// Uniform mixture of the excited computational states.
    pub fn sd(n_degeneracy: usize) -> Self {
        let d = 2 * n_degeneracy;
        let mut rho = Array2::zeros((d, d));
        for j in 0..n_degeneracy {
            rho[[j, j]] = Complex64::new(1.0 / n_degeneracy as f64, 0.0);
        }
        Self { n_degeneracy, rho }
    }

    /// |e,+⟩⟨e,+| with |e,+⟩ = Σ_j |e,j⟩/√N_d.
    pub fn bd(n_degeneracy: usize) -> Self {
        let d = 2 * n_degeneracy;
        let mut rho = Array2::zeros((d, d));
        let w = Complex64::new(1.0 / n_degeneracy as f64, 0.0);
        for i in 0..n_degeneracy {
            for j in 0..n_degeneracy {
                rho[[i, j]] = w;
            }
        }
        Self { n_degeneracy, rho }
    }

    pub fn trace(&self) -> f64 {
        self.rho.diag().iter().map(|z| z.re).sum()
    }

    pub fn excited_population(&self) -> f64 {
        (0..self.n_degeneracy).map(|j| self.rho[[j, j]].re).sum()
    }

    /// Weight outside span{|e,+⟩, |g,+⟩}.
    pub fn leak_outside_symmetric(&self) -> f64 {
        let nd = self.n_degeneracy;
        let plus = |offset: usize| -> f64 {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..nd {
                for j in 0..nd {
                    s += self.rho[[offset + i, offset + j]];
                }
            }
            s.re / nd as f64
        };
        self.trace() - plus(0) - plus(nd)
    }
}

/// L = Σ_{j,j′} |g,j⟩⟨e,j′|.
pub fn build_tf_jump(spec: &TfSpec) -> Array2<Complex64> {
    let nd = spec.n_degeneracy;
    let mut l = Array2::zeros((2 * nd, 2 * nd));
    for j in 0..nd {
        for jp in 0..nd {
            l[[nd + j, jp]] = Complex64::new(1.0, 0.0);
        }
    }
    l
}

pub fn tf_hamiltonian(spec: &TfSpec) -> Array2<Complex64> {
    let nd = spec.n_degeneracy;
    Array2::from_diag(&Array1::from_shape_fn(2 * nd, |i| Complex64::new(if i < nd { spec.omega0 } else { 0.0 }, 0.0)))
}

/// ⟨g,+|L|e,+⟩ = (1/N_d) Σ_{j,j′} ⟨g,j|L|e,j′⟩; the sum is an integer so the
/// result is exact.
pub fn symmetric_matrix_element(spec: &TfSpec) -> f64 {
    let nd = spec.n_degeneracy;
    let l = build_tf_jump(spec);
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..nd {
        for jp in 0..nd {
            s += l[[nd + j, jp]];
        }
    }
    s.re / nd as f64
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn matrix_rank(m: &Array2<Complex64>, tol: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.dim();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (piv, mag) = (rank..rows).map(|r| (r, a[[r, c]].norm())).fold((rank, 0.0), |b, x| if x.1 > b.1 { x } else { b });
        if mag <= tol {
            continue;
        }
        for k in 0..cols {
            a.swap([rank, k], [piv, k]);
        }
        for r in rank + 1..rows {
            let f = a[[r, c]] / a[[rank, c]];
            for k in c..cols {
                let v = a[[rank, k]];
                a[[r, k]] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Exact evolution under −i[H, ρ] + Γ↓D_L[ρ] + Γ↑D_{L†}[ρ].
pub fn evolve_tf(state: &TfState, spec: &TfSpec, duration: f64) -> Result<TfState> {
    spec.validate()?;
    if state.rho.dim() != (spec.dim(), spec.dim()) {
        return Err(Error::DimensionMismatch { expected: spec.dim(), actual: state.rho.nrows() });
    }
    let l = build_tf_jump(spec);
    let ld = l.t().mapv(|z| z.conj());
    let sup = liouvillian(&tf_hamiltonian(spec), &[(spec.gamma_down, l), (spec.gamma_up, ld)]);
    let rho = evolve_liouville(&state.rho, &sup, duration)?;
    Ok(TfState { n_degeneracy: state.n_degeneracy, rho })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sd,
    Bd,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Sd => "sd",
            Mode::Bd => "bd",
        }
    }

    pub fn initial_state(self, n_degeneracy: usize) -> TfState {
        match self {
            Mode::Sd => TfState::sd(n_degeneracy),
            Mode::Bd => TfState::bd(n_degeneracy),
        }
    }
}

/// −(dP_e/dt)/P_e at t = 0⁺ by a Richardson-extrapolated forward difference.
pub fn initial_decay_rate(spec: &TfSpec, mode: Mode) -> Result<f64> {
    let s0 = mode.initial_state(spec.n_degeneracy);
    let p0 = s0.excited_population();
    let scale = spec.n_degeneracy.pow(2) as f64 * (spec.gamma_down + spec.gamma_up) + spec.omega0;
    let h = 1e-4 / scale;
    let slope = |dt: f64| -> Result<f64> { Ok((p0 - evolve_tf(&s0, spec, dt)?.excited_population()) / dt) };
    let r1 = slope(h)?;
    let r2 = slope(h / 2.0)?;
    Ok((2.0 * r2 - r1) / p0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateScaling {
    pub mode: Mode,
    pub n_degeneracies: Vec<usize>,
    pub rates: Vec<f64>,
    pub slope: f64,
}

/// Decay rates over a family of specs differing only in N_d, and the fitted
/// log-log exponent.
pub fn measure_rate_scaling(base: &TfSpec, n_degeneracies: &[usize], mode: Mode) -> Result<RateScaling> {
    if n_degeneracies.len() < 4 {
        return Err(Error::OutOfRange { what: "N_d count", value: n_degeneracies.len() as f64, reason: "need at least four N_d values" });
    }
    let rates = n_degeneracies
        .iter()
        .map(|&nd| initial_decay_rate(&TfSpec { n_degeneracy: nd, ..*base }, mode))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = n_degeneracies.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&xs, &rates);
    Ok(RateScaling { mode, n_degeneracies: n_degeneracies.to_vec(), rates, slope })
}
