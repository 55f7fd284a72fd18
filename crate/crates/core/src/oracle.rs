//! Brute-force cross-checks: Dicke states in the 2^N computational basis,
//! collective lowering matrix elements, l1 coherence and A_cl by direct
//! summation, and full density-matrix Lindblad evolution in Liouville space.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder::{occupation, spectral_density, BathModel, LadderModel, RateTable};
use crate::linalg::expm;

pub const MAX_STATE_QUBITS: usize = 16;
pub const MAX_DENSE_QUBITS: usize = 11;
pub const MAX_LIOUVILLE_DIM: usize = 64;

/// Real amplitudes over computational basis states; bit i set means qubit i
/// is excited.
#[derive(Debug, Clone, PartialEq)]
pub struct FullBasisVector {
    pub n_qubits: usize,
    pub amplitudes: Vec<f64>,
}

impl FullBasisVector {
    pub fn dot(&self, other: &Self) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

fn check_state_args(n: usize, m: f64) -> Result<usize> {
    if n == 0 || n > MAX_STATE_QUBITS {
        return Err(Error::OutOfRange { what: "n_qubits", value: n as f64, reason: "oracle supports 1 ≤ N ≤ 16" });
    }
    let excitations = n as f64 / 2.0 + m;
    if excitations < -1e-9 || excitations > n as f64 + 1e-9 || (excitations - excitations.round()).abs() > 1e-9 {
        return Err(Error::OutOfRange { what: "M", value: m, reason: "not a level of the Dicke ladder" });
    }
    Ok(excitations.round() as usize)
}

fn binomial_exact(n: usize, k: usize) -> f64 {
    (1..=k).fold(1u128, |acc, i| acc * (n - k + i) as u128 / i as u128) as f64
}

/// |J = N/2, M⟩: amplitude 1/√C(N, N/2 + M) on every bitstring with
/// N/2 + M set bits.
pub fn build_dicke_state(n: usize, m: f64) -> Result<FullBasisVector> {
    let k = check_state_args(n, m)?;
    let amp = 1.0 / binomial_exact(n, k).sqrt();
    let amplitudes = (0..1usize << n)
        .map(|b| if b.count_ones() as usize == k { amp } else { 0.0 })
        .collect();
    Ok(FullBasisVector { n_qubits: n, amplitudes })
}

/// J₋ = Σᵢ σ₋⁽ⁱ⁾ applied bit by bit.
pub fn apply_lowering(v: &FullBasisVector) -> FullBasisVector {
    let mut out = vec![0.0; v.amplitudes.len()];
    for (b, &a) in v.amplitudes.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for i in 0..v.n_qubits {
            if b & (1 << i) != 0 {
                out[b ^ (1 << i)] += a;
            }
        }
    }
    FullBasisVector { n_qubits: v.n_qubits, amplitudes: out }
}

/// ⟨M_bra|J₋|M_ket⟩ by explicit contraction.
pub fn collective_lowering_element(n: usize, m_bra: f64, m_ket: f64) -> Result<f64> {
    let bra = build_dicke_state(n, m_bra)?;
    let ket = build_dicke_state(n, m_ket)?;
    Ok(bra.dot(&apply_lowering(&ket)))
}

/// ⟨M − 1|J₋|M⟩.
pub fn lowering_matrix_element(n: usize, m: f64) -> Result<f64> {
    collective_lowering_element(n, m - 1.0, m)
}

/// Number of basis states of |M − 1⟩ reached from one basis state of |M⟩
/// by a single spin flip.
pub fn connectivity(n: usize, m: f64) -> Result<usize> {
    let k = check_state_args(n, m)?;
    check_state_args(n, m - 1.0)?;
    let start = (1usize << k) - 1;
    let target = apply_lowering(&FullBasisVector {
        n_qubits: n,
        amplitudes: (0..1usize << n).map(|b| if b == start { 1.0 } else { 0.0 }).collect(),
    });
    Ok(target.amplitudes.iter().filter(|&&a| a != 0.0).count())
}

fn dense_mixture(n: usize, weights: &[f64], diag_weights: &[f64]) -> Result<Array2<f64>> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::OutOfRange { what: "n_qubits", value: n as f64, reason: "dense oracle supports 1 ≤ N ≤ 11" });
    }
    if weights.len() != n + 1 || diag_weights.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, actual: weights.len() });
    }
    let dim = 1usize << n;
    let mut rho = Array2::<f64>::zeros((dim, dim));
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = Array1::from(build_dicke_state(n, n as f64 / 2.0 - i as f64)?.amplitudes);
        // ρ += w |v⟩⟨v|
        for a in 0..dim {
            if v[a] != 0.0 {
                for b in 0..dim {
                    rho[[a, b]] += w * v[a] * v[b];
                }
            }
        }
    }
    Ok(rho)
}

/// Σ_{(e,a) ≠ (e′,a′)} |ρ| for ρ = Σ_M p_M |M⟩⟨M| written out in the
/// computational basis. `weights` in descending-M order.
pub fn c_l1_bruteforce(n: usize, weights: &[f64]) -> Result<f64> {
    let rho = dense_mixture(n, weights, weights)?;
    let mut total = 0.0;
    for ((a, b), x) in rho.indexed_iter() {
        if a != b {
            total += x.abs();
        }
    }
    Ok(total)
}

pub const MAX_ACL_QUBITS: usize = 9;

/// Tr[X ρ_sd] with X lifted to the computational basis and ρ_sd obtained by
/// zeroing every computational-basis off-diagonal of ρ.
pub fn a_cl_bruteforce(ladder: &LadderModel, rates: &RateTable, weights: &[f64]) -> Result<f64> {
    let n = ladder.n_qubits;
    if n > MAX_ACL_QUBITS {
        return Err(Error::OutOfRange { what: "n_qubits", value: n as f64, reason: "A_cl oracle supports N ≤ 9" });
    }
    for (k, &gap) in ladder.gaps.iter().enumerate() {
        if gap <= 0.0 {
            return Err(Error::NonpositiveGap { m: ladder.levels[k], gap });
        }
    }
    // X = Σ_M Δ_M² γ_M^↑ |M⟩⟨M| + Σ_M Δ_M² γ_M^↓ |M−1⟩⟨M−1|
    let mut x_weights = vec![0.0; n + 1];
    for (k, link) in rates.links.iter().enumerate() {
        let d2 = ladder.gaps[k] * ladder.gaps[k];
        x_weights[k] += d2 * link.up_rate;
        x_weights[k + 1] += d2 * link.down_rate;
    }
    let x = dense_mixture(n, &x_weights, &x_weights)?;
    let rho = dense_mixture(n, weights, weights)?;
    Ok((0..x.nrows()).map(|i| x[[i, i]] * rho[[i, i]]).sum())
}

/// Complex density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseDensityMatrix {
    pub data: Array2<Complex64>,
}

impl DenseDensityMatrix {
    pub fn new(data: Array2<Complex64>) -> Result<Self> {
        let dev = hermiticity_error(&data);
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { data })
    }

    pub fn from_populations(probs: &[f64]) -> Self {
        let d = probs.len();
        let mut data = Array2::zeros((d, d));
        for (i, &p) in probs.iter().enumerate() {
            data[[i, i]] = Complex64::new(p, 0.0);
        }
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.data.diag().iter().map(|z| z.re).collect()
    }

    pub fn max_off_diagonal(&self) -> f64 {
        self.data
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.data)
    }
}

fn hermiticity_error(m: &Array2<Complex64>) -> f64 {
    m.indexed_iter().map(|((i, j), z)| (z - m[[j, i]].conj()).norm()).fold(0.0, f64::max)
}

fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == Complex64::new(0.0, 0.0) {
            continue;
        }
        for ((k, l), &y) in b.indexed_iter() {
            out[[i * br + k, j * bc + l]] = x * y;
        }
    }
    out
}

fn dagger(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|z| z.conj())
}

/// Liouvillian acting on column-stacked density matrices, vec(ρ)[i + d·j] = ρ_ij:
/// −i(I⊗H − Hᵀ⊗I) + Σ γ (L̄⊗L − ½ I⊗L†L − ½ (L†L)ᵀ⊗I).
pub fn liouvillian(h: &Array2<Complex64>, jumps: &[(f64, Array2<Complex64>)]) -> Array2<Complex64> {
    let d = h.nrows();
    let id = Array2::<Complex64>::eye(d);
    let i = Complex64::new(0.0, 1.0);
    let mut sup = (kron(&id, h) - kron(&h.t().to_owned(), &id)) * (-i);
    for (rate, l) in jumps {
        if *rate == 0.0 {
            continue;
        }
        let ldl = dagger(l).dot(l);
        let term = kron(&l.mapv(|z| z.conj()), l)
            - kron(&id, &ldl) * Complex64::new(0.5, 0.0)
            - kron(&ldl.t().to_owned(), &id) * Complex64::new(0.5, 0.0);
        sup = sup + term * Complex64::new(*rate, 0.0);
    }
    sup
}

pub fn vectorize(rho: &Array2<Complex64>) -> Array1<Complex64> {
    let d = rho.nrows();
    Array1::from_shape_fn(d * d, |idx| rho[[idx % d, idx / d]])
}

pub fn unvectorize(v: &Array1<Complex64>, d: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((d, d), |(i, j)| v[i + d * j])
}

/// exp(L t) vec(ρ).
pub fn evolve_liouville(
    rho: &Array2<Complex64>,
    sup: &Array2<Complex64>,
    duration: f64,
) -> Result<Array2<Complex64>> {
    let d = rho.nrows();
    let prop = expm(&(sup * Complex64::new(duration, 0.0))).ok_or(Error::NonFinite("Liouvillian exponential"))?;
    Ok(unvectorize(&prop.dot(&vectorize(rho)), d))
}

fn unit(d: usize, row: usize, col: usize) -> Array2<Complex64> {
    let mut m = Array2::zeros((d, d));
    m[[row, col]] = Complex64::new(1.0, 0.0);
    m
}

/// Jump operators and rates of the ladder dissipator in the descending-M
/// basis. For Δ_M > 0 the relaxation operator is |M−1⟩⟨M|; for Δ_M < 0 it is
/// |M⟩⟨M−1|. Rates are assembled here from κ and n, not taken from the
/// population generator.
pub fn ladder_jumps(ladder: &LadderModel, bath: &BathModel) -> Vec<(f64, Array2<Complex64>)> {
    let d = ladder.dim();
    let mut jumps = Vec::with_capacity(2 * ladder.gaps.len());
    for (k, &gap) in ladder.gaps.iter().enumerate() {
        let omega = gap.abs();
        let a = ladder.degeneracy_factors[k];
        let kappa = spectral_density(bath, omega);
        let n = occupation(bath.beta, omega);
        // index k is M, index k + 1 is M − 1
        let (relax, excite) = if gap > 0.0 { (unit(d, k + 1, k), unit(d, k, k + 1)) } else { (unit(d, k, k + 1), unit(d, k + 1, k)) };
        jumps.push((a * kappa * (1.0 + n), relax));
        jumps.push((a * kappa * n, excite));
    }
    jumps
}

/// Full (N+1)×(N+1) density-matrix evolution under −i[H, ρ] + D[ρ].
pub fn full_lindblad_evolve(
    rho: &DenseDensityMatrix,
    ladder: &LadderModel,
    bath: &BathModel,
    duration: f64,
) -> Result<DenseDensityMatrix> {
    let d = ladder.dim();
    if d > MAX_LIOUVILLE_DIM {
        return Err(Error::OutOfRange { what: "ladder dimension", value: d as f64, reason: "Liouville oracle supports N + 1 ≤ 64" });
    }
    if rho.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: rho.dim() });
    }
    let dev = rho.hermiticity_error();
    if dev > 1e-12 {
        return Err(Error::NotHermitian(dev));
    }
    let h = Array2::from_diag(&Array1::from_iter(ladder.energies.iter().map(|&e| Complex64::new(e, 0.0))));
    let sup = liouvillian(&h, &ladder_jumps(ladder, bath));
    let out = evolve_liouville(&rho.data, &sup, duration)?;
    Ok(DenseDensityMatrix { data: out })
}
