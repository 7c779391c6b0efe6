//! Second-order Floquet adiabatic elimination around a dissipative `L0`.
//!
//! The perturbation is `ε L₁(t) = ε Σ_n e^{inωt} L₁,ₙ`. With the averaged gauge
//! `R K̄₁ = 0` the recursion reads
//!
//! ```text
//! K₀ L_s1            = R L̄₁ K₀
//! R K₁,ₙ             = R L₁,ₙ K₀ / (inω)                      n ≠ 0
//! (L0 − inω)(1−R)K₁,ₙ = −(1−R) L₁,ₙ K₀
//! K₀ L_s2            = R ⟨L₁K₁ − K₁L_s1⟩
//! ```
//!
//! Slow coordinates are those of the kernel basis in [`SpectralSplit`]; for a product split
//! with a unique environment state they are `vec(ρ_s)` and `K₀(ρ_s) = ρ_s ⊗ ρ̄_E`.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result, Warning};
use crate::linalg::{
    commutator_superop, fro_norm, hs_inner, identity, kossakowski, kron, stack_columns, unvec,
    vec_op, CVec, Kossakowski, Op, ShiftedSolver, SpectralSplit, Superop, C64, I,
};
use crate::ops::partial_trace_second;
use crate::stationary::EnvModel;

/// Recommended upper bound on `ε‖L₁‖ / gap`.
pub const MAX_PERTURBATION_RATIO: f64 = 0.2;

#[derive(Clone, Debug)]
pub struct PeriodicPerturbation {
    pub omega: f64,
    pub eps: f64,
    /// `(n, L₁,ₙ)`; mode 0 may be absent.
    pub modes: Vec<(i32, Superop)>,
}

impl PeriodicPerturbation {
    fn mode(&self, n: i32) -> Option<&Superop> {
        self.modes.iter().find(|(m, _)| *m == n).map(|(_, s)| s)
    }

    fn mode_numbers(&self) -> Vec<i32> {
        let mut ns: Vec<i32> = self.modes.iter().map(|(n, _)| *n).chain([0]).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReductionDiagnostics {
    /// `ε Σ_n ‖L₁,ₙ‖₂ / gap`.
    pub perturbation_ratio: f64,
    pub gap: f64,
    /// Highest Fourier mode produced by `L₁K₁` (twice the perturbation's).
    pub closure_mode: i32,
    pub warnings: Vec<Warning>,
}

#[derive(Clone, Debug)]
pub struct FloquetReduction {
    pub eps: f64,
    pub omega: f64,
    pub l_s1: DMatrix<C64>,
    pub l_s2: Option<DMatrix<C64>>,
    /// `N × m` embedding of slow coordinates.
    pub k0: DMatrix<C64>,
    pub k1: Vec<(i32, DMatrix<C64>)>,
    /// Hilbert dimension of the full system.
    pub full_dim: usize,
    /// Set when slow coordinates are `vec(ρ_s)` for a `d_T`-dimensional target.
    pub target_dim: Option<usize>,
    pub diagnostics: ReductionDiagnostics,
}

impl FloquetReduction {
    /// `ε L_s1 + ε² L_s2` in slow coordinates.
    pub fn generator(&self) -> DMatrix<C64> {
        let mut g = &self.l_s1 * C64::from(self.eps);
        if let Some(l2) = &self.l_s2 {
            g += l2 * C64::from(self.eps * self.eps);
        }
        g
    }

    pub fn generator_superop(&self) -> Option<Superop> {
        self.target_dim.map(|d| Superop::from_matrix(d, self.generator()))
    }

    pub fn k1_at(&self, t: f64) -> DMatrix<C64> {
        let mut k = DMatrix::zeros(self.k0.nrows(), self.k0.ncols());
        for (n, kn) in &self.k1 {
            k += kn * C64::from_polar(1.0, *n as f64 * self.omega * t);
        }
        k
    }

    /// `K₀ + ε K₁(t)`.
    pub fn embedding_at(&self, t: f64) -> DMatrix<C64> {
        &self.k0 + self.k1_at(t) * C64::from(self.eps)
    }
}

fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.singular_values().max()
}

/// Second-order reduction (`order` 1 or 2) in the averaged gauge.
pub fn floquet_reduce(
    l0: &Superop,
    pert: &PeriodicPerturbation,
    split: &SpectralSplit,
    order: u8,
) -> Result<FloquetReduction> {
    floquet_reduce_gauged(l0, pert, split, order, None)
}

/// As [`floquet_reduce`] with `R K̄₁ = K₀ G` for a chosen `m × m` gauge `G`.
pub fn floquet_reduce_gauged(
    l0: &Superop,
    pert: &PeriodicPerturbation,
    split: &SpectralSplit,
    order: u8,
    gauge: Option<&DMatrix<C64>>,
) -> Result<FloquetReduction> {
    if !(1..=2).contains(&order) {
        return Err(invalid("order", format!("{order} is not 1 or 2")));
    }
    let n_full = l0.m.nrows();
    for (_, s) in &pert.modes {
        if s.m.nrows() != n_full {
            return Err(Error::DimensionMismatch { expected: n_full, found: s.m.nrows() });
        }
    }
    if pert.omega <= 0.0 && pert.modes.iter().any(|(n, _)| *n != 0) {
        return Err(invalid("omega", "periodic modes need a positive frequency"));
    }
    let v = split.embed();
    let wd = split.coords();
    let m = v.ncols();
    let r = &split.projector.m;
    let zero = DMatrix::<C64>::zeros(n_full, n_full);
    let l1 = |n: i32| pert.mode(n).map(|s| &s.m).unwrap_or(&zero);

    let l_s1 = &wd * l1(0) * &v;
    let mut k1 = Vec::new();
    for n in pert.mode_numbers() {
        let y = l1(n) * &v;
        let comp = &y - r * &y;
        let shift = I * (n as f64 * pert.omega);
        let solver = ShiftedSolver::new(l0, shift, split)?;
        let mut kn = solver.solve_block(&(-comp))?;
        if n != 0 {
            kn += &v * (&wd * &y) / shift;
        } else if let Some(gm) = gauge {
            if gm.nrows() != m || gm.ncols() != m {
                return Err(Error::DimensionMismatch { expected: m, found: gm.nrows() });
            }
            kn += &v * gm;
        }
        k1.push((n, kn));
    }

    let l_s2 = (order == 2).then(|| {
        let mut avg = DMatrix::<C64>::zeros(n_full, m);
        for (p, _) in &pert.modes {
            if let Some((_, k)) = k1.iter().find(|(q, _)| *q == -p) {
                avg += l1(*p) * k;
            }
        }
        let mut ls2 = &wd * avg;
        if let Some((_, k10)) = k1.iter().find(|(q, _)| *q == 0) {
            ls2 -= &wd * k10 * &l_s1;
        }
        ls2
    });

    let l1_norm: f64 = pert.modes.iter().map(|(_, s)| spectral_norm(&s.m)).sum();
    let ratio = pert.eps.abs() * l1_norm / split.gap;
    let mut warnings = Vec::new();
    if ratio > MAX_PERTURBATION_RATIO {
        warnings.push(Warning::StrongPerturbation { ratio });
    }
    let n_max = pert.modes.iter().map(|(n, _)| n.abs()).max().unwrap_or(0);
    Ok(FloquetReduction {
        eps: pert.eps,
        omega: pert.omega,
        l_s1,
        l_s2,
        k0: v,
        k1,
        full_dim: l0.d,
        target_dim: split.target_dim,
        diagnostics: ReductionDiagnostics {
            perturbation_ratio: ratio,
            gap: split.gap,
            closure_mode: 2 * n_max,
            warnings,
        },
    })
}

/// Perturbation `ε L₁(t) = −iε[H₁(t), ·]` with `H₁(t) = Σ_n e^{inωt} Σ_k A_k ⊗ B_k`.
#[derive(Clone, Debug)]
pub struct BipartitePerturbation {
    pub omega: f64,
    pub eps: f64,
    /// `(n, [(A_k, B_k)])` with `A_k` on the target and `B_k` on the environment.
    pub modes: Vec<(i32, Vec<(Op, Op)>)>,
}

impl BipartitePerturbation {
    pub fn mode_hamiltonian(&self, n: i32) -> Option<Op> {
        let terms = self.modes.iter().filter(|(m, _)| *m == n).flat_map(|(_, t)| t.iter());
        let mut acc: Option<Op> = None;
        for (a, b) in terms {
            let ab = kron(a, b);
            acc = Some(match acc {
                Some(x) => x + ab,
                None => ab,
            });
        }
        acc
    }

    /// Full-space superoperator modes.
    pub fn to_periodic(&self) -> PeriodicPerturbation {
        let mut ns: Vec<i32> = self.modes.iter().map(|(n, _)| *n).collect();
        ns.sort_unstable();
        ns.dedup();
        let modes = ns
            .into_iter()
            .filter_map(|n| self.mode_hamiltonian(n).map(|h| (n, commutator_superop(&h))))
            .collect();
        PeriodicPerturbation { omega: self.omega, eps: self.eps, modes }
    }

    /// Physical coupling Hamiltonian `ε H₁(t)`.
    pub fn hamiltonian_at(&self, t: f64) -> Option<Op> {
        let mut acc: Option<Op> = None;
        for (n, terms) in &self.modes {
            let ph = C64::from_polar(self.eps, *n as f64 * self.omega * t);
            for (a, b) in terms {
                let x = kron(a, b) * ph;
                acc = Some(match acc {
                    Some(y) => y + x,
                    None => x,
                });
            }
        }
        acc
    }
}

/// Random environment (Hamiltonian plus `channels` generic jumps) and a Hermitian
/// three-mode coupling `H₁(t) = A₀⊗B₀ + e^{iωt} A⊗B + e^{−iωt} A†⊗B†`.
pub fn random_bipartite_instance(
    r: &mut crate::random::Rand,
    d_t: usize,
    d_e: usize,
    channels: usize,
    eps: f64,
) -> (EnvModel, BipartitePerturbation) {
    use crate::random::{random_hermitian, random_matrix, uniform};
    let h = random_hermitian(r, d_e);
    let chans = (0..channels)
        .map(|_| crate::lindblad::DissipationChannel::new(uniform(r, 0.5, 1.5), random_matrix(r, d_e)))
        .collect();
    let (a0, b0) = (random_hermitian(r, d_t), random_hermitian(r, d_e));
    let (a, b) = (random_matrix(r, d_t), random_matrix(r, d_e));
    let omega = uniform(r, 0.5, 2.0);
    let pert = BipartitePerturbation {
        omega,
        eps,
        modes: vec![(0, vec![(a0, b0)]), (1, vec![(a.clone(), b.clone())]), (-1, vec![(a.adjoint(), b.adjoint())])],
    };
    (EnvModel::new(h, chans), pert)
}

/// Fast path for `L0 = id_T ⊗ L_E` with a unique environment state: every solve is on `E`.
pub fn floquet_reduce_bipartite(
    env: &EnvModel,
    d_t: usize,
    pert: &BipartitePerturbation,
    order: u8,
) -> Result<FloquetReduction> {
    if !(1..=2).contains(&order) {
        return Err(invalid("order", format!("{order} is not 1 or 2")));
    }
    let d_e = env.dim();
    for (_, terms) in &pert.modes {
        for (a, b) in terms {
            if a.nrows() != d_t {
                return Err(Error::DimensionMismatch { expected: d_t, found: a.nrows() });
            }
            if b.nrows() != d_e {
                return Err(Error::DimensionMismatch { expected: d_e, found: b.nrows() });
            }
        }
    }
    let (env_split, rho) = env.split()?;
    let l_e = env.liouvillian()?;
    let omega = pert.omega;

    struct Term {
        a: Op,
        b: Op,
        mean: C64,
        yl: Op,
        yr: Op,
    }
    let mut mode_terms: Vec<(i32, Vec<Term>, Op)> = Vec::new();
    let mut ns: Vec<i32> = pert.modes.iter().map(|(n, _)| *n).chain([0]).collect();
    ns.sort_unstable();
    ns.dedup();
    for &n in &ns {
        let shift = I * (n as f64 * omega);
        let solver = ShiftedSolver::new(&l_e, shift, &env_split)?;
        let mut terms = Vec::new();
        let mut h_mean = Op::zeros(d_t, d_t);
        for (_, list) in pert.modes.iter().filter(|(m, _)| *m == n) {
            for (a, b) in list {
                let mean = crate::linalg::trace(&(b * &rho));
                let rhs_l = (b * &rho - &rho * mean) * I;
                let rhs_r = (&rho * b - &rho * mean) * I;
                let yl = solver.solve(&rhs_l)?;
                let yr = solver.solve(&rhs_r)?;
                h_mean += a * mean;
                terms.push(Term { a: a.clone(), b: b.clone(), mean, yl, yr });
            }
        }
        mode_terms.push((n, terms, h_mean));
    }
    let find = |n: i32| mode_terms.iter().find(|(m, _, _)| *m == n);

    let comm = |x: &Op| Superop::commutator(x);
    let h0 = find(0).map(|(_, _, h)| h.clone()).unwrap_or_else(|| Op::zeros(d_t, d_t));
    let l_s1 = commutator_superop(&h0).m;

    // K₁,ₙ(ρ_s) = −[h_n, ρ_s]/(nω) ⊗ ρ̄ + Σ_k (A_k ρ_s ⊗ Y^L_k − ρ_s A_k ⊗ Y^R_k)
    let m = d_t * d_t;
    let mut k1 = Vec::new();
    for (n, terms, h_n) in &mode_terms {
        let mut cols = Vec::with_capacity(m);
        for j in 0..d_t {
            for i in 0..d_t {
                let mut e = Op::zeros(d_t, d_t);
                e[(i, j)] = C64::from(1.0);
                let mut out = Op::zeros(d_t * d_e, d_t * d_e);
                if *n != 0 {
                    let slow = crate::linalg::commutator(h_n, &e) / C64::from(-(*n as f64) * omega);
                    out += kron(&slow, &rho);
                }
                for t in terms {
                    out += kron(&(&t.a * &e), &t.yl) - kron(&(&e * &t.a), &t.yr);
                }
                cols.push(out);
            }
        }
        k1.push((*n, stack_columns(&cols)));
    }

    let l_s2 = (order == 2).then(|| {
        let mut s = Superop::zeros(d_t);
        for (p, terms_p, _) in &mode_terms {
            let Some((_, terms_q, h_q)) = find(-p) else { continue };
            for t in terms_p {
                let ca = comm(&t.a);
                if *p != 0 {
                    // −i b [A, [h_{−p}, ρ]]/(pω)
                    let x = ca.compose(&comm(h_q)).scale(-I * t.mean / (*p as f64 * omega));
                    s += &x;
                }
                for u in terms_q {
                    let bl = crate::linalg::trace(&(&t.b * &u.yl));
                    let br = crate::linalg::trace(&(&t.b * &u.yr));
                    s += &ca.compose(&Superop::left(&u.a)).scale(-I * bl);
                    s += &ca.compose(&Superop::right(&u.a)).scale(I * br);
                }
            }
        }
        s.m
    });

    let split = crate::linalg::SpectralSplit::product(d_t, &env_split);
    let full = pert.to_periodic();
    let l1_norm: f64 = full.modes.iter().map(|(_, s)| spectral_norm(&s.m)).sum();
    let ratio = pert.eps.abs() * l1_norm / env_split.gap;
    let mut warnings = Vec::new();
    if ratio > MAX_PERTURBATION_RATIO {
        warnings.push(Warning::StrongPerturbation { ratio });
    }
    let n_max = pert.modes.iter().map(|(n, _)| n.abs()).max().unwrap_or(0);
    Ok(FloquetReduction {
        eps: pert.eps,
        omega,
        l_s1,
        l_s2,
        k0: split.embed(),
        k1,
        full_dim: d_t * d_e,
        target_dim: Some(d_t),
        diagnostics: ReductionDiagnostics {
            perturbation_ratio: ratio,
            gap: env_split.gap,
            closure_mode: 2 * n_max,
            warnings,
        },
    })
}

/// Rates and Hamiltonian coefficients of a reduced target generator.
#[derive(Clone, Debug)]
pub struct RateExtraction {
    /// Coefficient matrix `k_mn` of `B_m ρ B_n†` in the requested dissipator basis.
    pub kossakowski: DMatrix<C64>,
    /// Diagonal `k_mm`, i.e. the rates of `D_{B_m}`.
    pub rates: Vec<f64>,
    /// Largest off-diagonal `|k_mn|`.
    pub max_offdiag: f64,
    /// First-order Hamiltonian coefficients (from `ε L_s1`).
    pub hamiltonian_first: Vec<f64>,
    /// Second-order Hamiltonian coefficients (from `ε² L_s2`), minimum-norm if degenerate.
    pub hamiltonian_second: Vec<f64>,
}

/// Expresses the dissipative part in `dissipators` and the Hamiltonian parts in the
/// given operator lists.
pub fn extract_rates(
    red: &FloquetReduction,
    dissipators: &[Op],
    ham_first: &[Op],
    ham_second: &[Op],
) -> Result<RateExtraction> {
    let d = red
        .target_dim
        .ok_or_else(|| invalid("reduction", "slow coordinates are not a target operator space"))?;
    for op in dissipators.iter().chain(ham_first).chain(ham_second) {
        if op.nrows() != d {
            return Err(Error::DimensionMismatch { expected: d, found: op.nrows() });
        }
    }
    let total = Superop::from_matrix(d, red.generator());
    let k = kossakowski(&total);
    let km = decompose_dissipator(&k, dissipators)?;
    let rates = (0..km.nrows()).map(|i| km[(i, i)].re).collect();
    let mut max_offdiag: f64 = 0.0;
    for i in 0..km.nrows() {
        for j in 0..km.ncols() {
            if i != j {
                max_offdiag = max_offdiag.max(km[(i, j)].norm());
            }
        }
    }
    let h1 = kossakowski(&Superop::from_matrix(d, &red.l_s1 * C64::from(red.eps))).hamiltonian;
    let h2 = red
        .l_s2
        .as_ref()
        .map(|l2| kossakowski(&Superop::from_matrix(d, l2 * C64::from(red.eps * red.eps))).hamiltonian)
        .unwrap_or_else(|| Op::zeros(d, d));
    Ok(RateExtraction {
        kossakowski: km,
        rates,
        max_offdiag,
        hamiltonian_first: fit_hamiltonian(&h1, ham_first),
        hamiltonian_second: fit_hamiltonian(&h2, ham_second),
    })
}

fn traceless(op: &Op) -> Op {
    let d = op.nrows();
    op - identity(d) * (op.trace() / d as f64)
}

/// Solves `K = A k A†` for `k`, where column `m` of `A` holds the Gell-Mann coordinates of `B_m`.
pub fn decompose_dissipator(k: &Kossakowski, ops: &[Op]) -> Result<DMatrix<C64>> {
    let nb = k.basis.len();
    let a = DMatrix::from_fn(nb, ops.len(), |i, m| hs_inner(&k.basis[i], &traceless(&ops[m])));
    let pinv = a
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|_| Error::NumericalFailure("pseudo-inverse failed"))?;
    let km = &pinv * &k.matrix * pinv.adjoint();
    let resid = fro_norm(&(&a * &km * a.adjoint() - &k.matrix));
    let scale = fro_norm(&k.matrix);
    if resid > 1e-8 * scale && resid > 1e-14 {
        return Err(Error::BasisMismatch { residual: resid / scale.max(1e-300) });
    }
    Ok(km)
}

/// Minimum-norm real coefficients `c` with `traceless(H) ≈ Σ_m c_m traceless(O_m)`.
pub fn fit_hamiltonian(h: &Op, ops: &[Op]) -> Vec<f64> {
    if ops.is_empty() {
        return Vec::new();
    }
    let target = traceless(h);
    let cols: Vec<Op> = ops.iter().map(traceless).collect();
    let n = target.len();
    let a = DMatrix::<f64>::from_fn(2 * n, ops.len(), |r, m| {
        let z = cols[m].as_slice()[r % n];
        if r < n { z.re } else { z.im }
    });
    let b = nalgebra::DVector::<f64>::from_fn(2 * n, |r, _| {
        let z = target.as_slice()[r % n];
        if r < n { z.re } else { z.im }
    });
    match a.pseudo_inverse(1e-12) {
        Ok(p) => (p * b).iter().copied().collect(),
        Err(_) => vec![f64::NAN; ops.len()],
    }
}

#[derive(Clone, Debug)]
pub struct CpReport {
    /// Smallest Kossakowski eigenvalue of the reduced generator divided by its norm.
    pub kossakowski_min_rel: f64,
    pub kossakowski_norm: f64,
    /// Norm of the dissipative part of `ε L_s1`.
    pub first_order_dissipative: f64,
    /// Largest `|Tr((K₀ + εK₁(t)) x) − Tr(K₀ x)|` over unit coordinates and sampled phases.
    pub trace_defect: f64,
    /// Smallest Choi eigenvalue of `K₀ + εK₁(t)` over sampled phases.
    pub choi_min: f64,
}

pub fn cp_structure_check(red: &FloquetReduction, phases: usize) -> Result<CpReport> {
    let d = red
        .target_dim
        .ok_or_else(|| invalid("reduction", "slow coordinates are not a target operator space"))?;
    let total = Superop::from_matrix(d, red.generator());
    let k = kossakowski(&total);
    let norm = k.dissipative_norm();
    let kmin = if norm > 0.0 { k.min_eigenvalue() / norm } else { 0.0 };
    let first = kossakowski(&Superop::from_matrix(d, &red.l_s1 * C64::from(red.eps))).dissipative_norm();

    let nf = red.full_dim;
    let tr_row = vec_op(&identity(nf)).adjoint();
    let period = if red.omega > 0.0 { 2.0 * std::f64::consts::PI / red.omega } else { 1.0 };
    let mut trace_defect: f64 = 0.0;
    let mut choi_min = f64::INFINITY;
    for s in 0..phases.max(1) {
        let t = period * s as f64 / phases.max(1) as f64;
        let emb = red.embedding_at(t);
        let defect = &tr_row * (&emb - &red.k0);
        trace_defect = trace_defect.max(defect.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let mut choi = Op::zeros(d * nf, d * nf);
        for j in 0..d {
            for i in 0..d {
                let mut e = Op::zeros(d, d);
                e[(i, j)] = C64::from(1.0);
                let img = unvec(&CVec::from_column_slice(emb.column(i + j * d).as_slice()), nf);
                choi += kron(&e, &img);
            }
        }
        choi_min = choi_min.min(crate::linalg::min_hermitian_eigenvalue(&choi));
    }
    Ok(CpReport {
        kossakowski_min_rel: kmin,
        kossakowski_norm: norm,
        first_order_dissipative: first,
        trace_defect,
        choi_min,
    })
}

/// `Tr_E` of a full-space operator (for product splits).
pub fn reduce_state(x: &Op, d_t: usize) -> Op {
    partial_trace_second(x, d_t, x.nrows() / d_t)
}
