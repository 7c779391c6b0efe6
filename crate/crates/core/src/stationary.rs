//! Second-order adiabatic elimination of a fast environment with a unique
//! stationary state.
//!
//! For `H_TE = g Σ_k T_k ⊗ E_k` and an environment generator `L_E` with stationary
//! state `ρ̄`, each coupling operator is centred and propagated through `L_E⁻¹`:
//!
//! ```text
//! L_E(Q_k) = −(E_k ρ̄ − Tr(E_k ρ̄) ρ̄),      X_kj = g² Tr(Q_j E_k† + E_j Q_k†)
//! ```
//!
//! The induced target dissipator is `Σ_kj X_kj (T_k ρ T_j† − ½{T_j† T_k, ρ})`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result, Warning};
use crate::floquet::{floquet_reduce, FloquetReduction, PeriodicPerturbation};
use crate::lindblad::DissipationChannel;
use crate::linalg::{
    build_dissipator, build_hamiltonian_superop, c, commutator_superop, fro_norm, hermitian_eigen,
    hermitian_part, hermiticity_defect, identity, is_hermitian, kron, spectral_split, trace, Op,
    ShiftedSolver, SpectralSplit, Superop, C64, DEFAULT_KERNEL_TOL,
};

/// Recommended lower bound on `gap / (g‖E‖)`.
pub const MIN_GAP_RATIO: f64 = 5.0;

#[derive(Clone, Debug)]
pub struct EnvModel {
    pub h: Op,
    pub channels: Vec<DissipationChannel>,
}

impl EnvModel {
    pub fn new(h: Op, channels: Vec<DissipationChannel>) -> Self {
        Self { h, channels }
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn liouvillian(&self) -> Result<Superop> {
        let d = self.dim();
        let mut l = build_hamiltonian_superop(&self.h)?;
        for ch in &self.channels {
            if ch.op.nrows() != d {
                return Err(Error::DimensionMismatch { expected: d, found: ch.op.nrows() });
            }
            if !(ch.rate >= 0.0 && ch.rate.is_finite()) {
                return Err(invalid("rate", format!("{} is not a finite non-negative rate", ch.rate)));
            }
            l += &build_dissipator(&ch.op).scale(c(ch.rate, 0.0));
        }
        Ok(l)
    }

    /// `id_T ⊗ L_E` acting on operators of `T ⊗ E`.
    pub fn lifted(&self, d_t: usize) -> Result<Superop> {
        let id = identity(d_t);
        let mut l = build_hamiltonian_superop(&kron(&id, &self.h))?;
        for ch in &self.channels {
            l += &build_dissipator(&kron(&id, &ch.op)).scale(c(ch.rate, 0.0));
        }
        Ok(l)
    }

    /// Same environment with every rate and the Hamiltonian multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> EnvModel {
        EnvModel {
            h: self.h.scale(alpha),
            channels: self
                .channels
                .iter()
                .map(|ch| DissipationChannel::new(ch.rate * alpha, ch.op.clone()))
                .collect(),
        }
    }

    pub fn split(&self) -> Result<(SpectralSplit, Op)> {
        let l = self.liouvillian()?;
        let split = spectral_split(&l, DEFAULT_KERNEL_TOL)?;
        if split.dim() != 1 {
            return Err(Error::DegenerateSteadyState { dim: split.dim() });
        }
        let k = &split.kernel[0];
        let rho = hermitian_part(&(k / trace(k)));
        Ok((split, rho))
    }
}

/// Unique stationary state of the environment.
pub fn env_steady_state(env: &EnvModel) -> Result<Op> {
    Ok(env.split()?.1)
}

/// `H_TE = g Σ_k T_k ⊗ E_k`.
#[derive(Clone, Debug)]
pub struct CouplingSet {
    pub g: f64,
    pub terms: Vec<(Op, Op)>,
}

impl CouplingSet {
    pub fn new(g: f64, terms: Vec<(Op, Op)>) -> Self {
        Self { g, terms }
    }

    pub fn target_ops(&self) -> Vec<Op> {
        self.terms.iter().map(|(t, _)| t.clone()).collect()
    }

    pub fn target_dim(&self) -> usize {
        self.terms.first().map(|(t, _)| t.nrows()).unwrap_or(0)
    }

    pub fn hamiltonian(&self) -> Op {
        let (dt, de) = self
            .terms
            .first()
            .map(|(t, e)| (t.nrows(), e.nrows()))
            .unwrap_or((0, 0));
        let mut h = Op::zeros(dt * de, dt * de);
        for (t, e) in &self.terms {
            h += kron(t, e).scale(self.g);
        }
        h
    }

    fn validate(&self, d_e: usize) -> Result<()> {
        let d_t = self.target_dim();
        for (t, e) in &self.terms {
            if e.nrows() != d_e {
                return Err(Error::DimensionMismatch { expected: d_e, found: e.nrows() });
            }
            if t.nrows() != d_t {
                return Err(Error::DimensionMismatch { expected: d_t, found: t.nrows() });
            }
            for op in [t, e] {
                if !is_hermitian(op) {
                    return Err(Error::NonHermitian { defect: hermiticity_defect(op) });
                }
            }
        }
        Ok(())
    }
}

/// Dissipation matrix of the induced target channels (includes the `g²` factor).
#[derive(Clone, Debug, PartialEq)]
pub struct XMatrix {
    pub m: DMatrix<C64>,
}

/// Negative eigenvalues of `X` smaller than this fraction of `‖X‖` are rounding.
pub const PSD_CLIP: f64 = 1e-10;

impl XMatrix {
    pub fn norm(&self) -> f64 {
        fro_norm(&self.m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.m).0.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.m).0.last().copied().unwrap_or(0.0)
    }

    /// `Λ` with `X = ΛΛ†`, columns ordered by decreasing weight.
    pub fn factor(&self) -> Result<DMatrix<C64>> {
        let (vals, vecs) = hermitian_eigen(&self.m);
        let floor = -PSD_CLIP * self.norm();
        if vals.iter().any(|&v| v < floor) {
            return Err(Error::NumericalFailure("dissipation matrix is not positive semidefinite"));
        }
        let n = vals.len();
        Ok(DMatrix::from_fn(n, n, |j, k| {
            let src = n - 1 - k;
            vecs[(j, src)] * vals[src].max(0.0).sqrt()
        }))
    }

    /// Jump operators `L_k = Σ_j conj(Λ_jk) T_j`, so that `Σ_k D_{L_k}` is [`Self::dissipator`].
    pub fn induced_channels(&self, t_ops: &[Op]) -> Result<Vec<Op>> {
        let lam = self.factor()?;
        let d = t_ops.first().map(|t| t.nrows()).unwrap_or(0);
        Ok((0..lam.ncols())
            .map(|k| {
                let mut l = Op::zeros(d, d);
                for (j, t) in t_ops.iter().enumerate() {
                    l += t * lam[(j, k)].conj();
                }
                l
            })
            .collect())
    }

    /// `ρ ↦ Σ_kj X_jk (T_k ρ T_j† − ½{T_j† T_k, ρ})`.
    ///
    /// With `X_kj = Tr(Q_j E_k† + E_j Q_k†)` the coefficient of `T_k ρ T_j†` is `X_jk`;
    /// the two pairings differ only when `X` has complex off-diagonal entries.
    pub fn dissipator(&self, t_ops: &[Op]) -> Superop {
        let d = t_ops.first().map(|t| t.nrows()).unwrap_or(0);
        let mut s = Superop::zeros(d);
        for (k, tk) in t_ops.iter().enumerate() {
            for (j, tj) in t_ops.iter().enumerate() {
                let x = self.m[(j, k)];
                let tjd = tj.adjoint();
                let prod = &tjd * tk;
                let term = Superop::sandwich(tk, &tjd)
                    - (Superop::left(&prod) + Superop::right(&prod)).scale(c(0.5, 0.0));
                s += &term.scale(x);
            }
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct Elimination {
    pub x: XMatrix,
    pub rho_env: Op,
    pub q: Vec<Op>,
    /// `g Tr(E_k ρ̄)`, the first-order Hamiltonian is `Σ_k h_k T_k`.
    pub first_order: Vec<f64>,
    pub gap: f64,
    pub warnings: Vec<Warning>,
}

impl Elimination {
    pub fn first_order_hamiltonian(&self, t_ops: &[Op]) -> Op {
        let d = t_ops.first().map(|t| t.nrows()).unwrap_or(0);
        let mut h = Op::zeros(d, d);
        for (t, hk) in t_ops.iter().zip(&self.first_order) {
            h += t.scale(*hk);
        }
        h
    }

    /// Reduced target generator `−i[H₁, ·] + Σ X_kj(…)`; the second-order Lamb shift is not included.
    pub fn generator(&self, t_ops: &[Op]) -> Superop {
        commutator_superop(&self.first_order_hamiltonian(t_ops)) + self.x.dissipator(t_ops)
    }
}

pub fn second_order_eliminate(env: &EnvModel, coupling: &CouplingSet) -> Result<Elimination> {
    coupling.validate(env.dim())?;
    let (split, rho) = env.split()?;
    let l = env.liouvillian()?;
    let solver = ShiftedSolver::new(&l, Complex64::new(0.0, 0.0), &split)?;
    let g = coupling.g;
    let mut q = Vec::with_capacity(coupling.terms.len());
    let mut first_order = Vec::with_capacity(coupling.terms.len());
    let mut e_norm: f64 = 0.0;
    for (_, e) in &coupling.terms {
        let mean = trace(&(e * &rho));
        first_order.push(g * mean.re);
        let centred = e * &rho - rho.scale(1.0) * mean;
        q.push(solver.solve(&(-centred))?);
        e_norm = e_norm.max(hermitian_eigen(e).0.iter().fold(0.0_f64, |a, v| a.max(v.abs())));
    }
    let n = q.len();
    let e_ops: Vec<&Op> = coupling.terms.iter().map(|(_, e)| e).collect();
    let m = DMatrix::from_fn(n, n, |k, j| {
        (trace(&(&q[j] * e_ops[k].adjoint())) + trace(&(e_ops[j] * q[k].adjoint()))) * (g * g)
    });
    let x = XMatrix { m: hermitian_part(&m) };
    let mut warnings = Vec::new();
    let scale = g.abs() * e_norm;
    if scale > 0.0 && split.gap / scale < MIN_GAP_RATIO {
        warnings.push(Warning::WeakGap { ratio: split.gap / scale });
    }
    Ok(Elimination { x, rho_env: rho, q, first_order, gap: split.gap, warnings })
}

/// Elimination of a fast environment process whose stationary manifold is degenerate.
///
/// `fast` channels (with `H_E`) define the fast generator; `slow` channels and the coupling
/// are treated as the perturbation. The slow manifold is `L(H_T) ⊗ ker L_fast`.
#[derive(Clone, Debug)]
pub struct DegenerateReduction {
    /// Stationary operators of the fast environment generator.
    pub manifold: Vec<Op>,
    pub split: SpectralSplit,
    /// First-order (projected slow) dynamics in manifold coordinates.
    pub l_s1: DMatrix<C64>,
    pub l_s2: DMatrix<C64>,
    pub reduction: FloquetReduction,
}

impl DegenerateReduction {
    pub fn generator(&self) -> DMatrix<C64> {
        &self.l_s1 + &self.l_s2
    }
}

pub fn degenerate_reduce(
    env: &EnvModel,
    fast: &[DissipationChannel],
    slow: &[DissipationChannel],
    coupling: &CouplingSet,
) -> Result<DegenerateReduction> {
    coupling.validate(env.dim())?;
    let d_t = coupling.target_dim();
    let fast_env = EnvModel::new(env.h.clone(), fast.to_vec());
    let env_l = fast_env.liouvillian()?;
    let env_split = spectral_split(&env_l, DEFAULT_KERNEL_TOL)?;
    let split = SpectralSplit::product(d_t, &env_split);
    let l0 = fast_env.lifted(d_t)?;
    let slow_env = EnvModel::new(Op::zeros(env.dim(), env.dim()), slow.to_vec());
    let mut l1 = slow_env.lifted(d_t)?;
    l1 += &build_hamiltonian_superop(&coupling.hamiltonian())?;
    let pert = PeriodicPerturbation { omega: 1.0, eps: 1.0, modes: vec![(0, l1)] };
    let reduction = floquet_reduce(&l0, &pert, &split, 2)?;
    Ok(DegenerateReduction {
        manifold: env_split.kernel.clone(),
        split,
        l_s1: reduction.l_s1.clone(),
        l_s2: reduction.l_s2.clone().unwrap_or_else(|| DMatrix::zeros(0, 0)),
        reduction,
    })
}

/// Exact eigenvalues `r∓ = −κ₁(n+½) ∓ √(κ₁²(n+½)² − L² + iκ₁L)` of the coherence block
/// for a `T_z` eigenvalue gap `L` (absorbing `g`), under thermal `σ∓` exchange.
pub fn offdiag_decay_eigenvalues(kappa1: f64, n_th: f64, l: f64) -> (C64, C64) {
    let a = kappa1 * (n_th + 0.5);
    let root = (C64::from(a * a - l * l) + C64::new(0.0, kappa1 * l)).sqrt();
    (-root - a, root - a)
}

/// The same block as a `2 × 2` generator on `(ρ_g, ρ_e)` coherences.
pub fn offdiag_generator(kappa1: f64, n_th: f64, l: f64) -> DMatrix<C64> {
    let km = kappa1 * (1.0 + n_th);
    let kp = kappa1 * n_th;
    DMatrix::from_row_slice(2, 2, &[c(-kp, l), c(km, 0.0), c(kp, 0.0), c(-km, -l)])
}
