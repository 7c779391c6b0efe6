//! Dense complex operators, column-stacking superoperators and the spectral
//! split of a Lindbladian into its stationary kernel and the decaying rest.
//!
//! Vectorization stacks columns, so that
//!
//! ```text
//! vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)
//! ```
//!
//! which matches the column-major storage of `nalgebra::DMatrix`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// Dense `d × d` complex operator.
pub type Op = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Relative threshold for the Hermiticity checks on inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> Op {
    Op::identity(d, d)
}

pub fn dagger(a: &Op) -> Op {
    a.adjoint()
}

pub fn commutator(a: &Op, b: &Op) -> Op {
    a * b - b * a
}

pub fn anticommutator(a: &Op, b: &Op) -> Op {
    a * b + b * a
}

pub fn trace(a: &Op) -> C64 {
    a.trace()
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &Op, b: &Op) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn fro_norm(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn kron(a: &Op, b: &Op) -> Op {
    a.kronecker(b)
}

pub fn hermiticity_defect(a: &Op) -> f64 {
    fro_norm(&(a - a.adjoint()))
}

pub fn is_hermitian(a: &Op) -> bool {
    a.is_square() && hermiticity_defect(a) <= HERMITIAN_TOL * fro_norm(a).max(1.0)
}

pub fn hermitian_part(a: &Op) -> Op {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &Op) -> (Vec<f64>, Op) {
    let eig = hermitian_part(a).symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Op::from_fn(a.nrows(), idx.len(), |r, k| eig.eigenvectors[(r, idx[k])]);
    (vals, vecs)
}

pub fn min_hermitian_eigenvalue(a: &Op) -> f64 {
    hermitian_eigen(a).0.first().copied().unwrap_or(0.0)
}

/// Eigenvalues of a general complex matrix from its complex Schur form.
pub fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000 * m.nrows())
        .ok_or(Error::NumericalFailure("Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
}

pub fn vec_op(a: &Op) -> CVec {
    CVec::from_column_slice(a.as_slice())
}

pub fn unvec(v: &CVec, d: usize) -> Op {
    assert_eq!(v.len(), d * d, "vector length is not a square");
    Op::from_column_slice(d, d, v.as_slice())
}

/// Linear map on `d × d` operators stored as a `d² × d²` matrix acting on `vec(ρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superop {
    pub d: usize,
    pub m: DMatrix<C64>,
}

impl Superop {
    pub fn zeros(d: usize) -> Self {
        Self { d, m: DMatrix::zeros(d * d, d * d) }
    }

    pub fn identity(d: usize) -> Self {
        Self { d, m: DMatrix::identity(d * d, d * d) }
    }

    pub fn from_matrix(d: usize, m: DMatrix<C64>) -> Self {
        assert_eq!((m.nrows(), m.ncols()), (d * d, d * d));
        Self { d, m }
    }

    /// `ρ ↦ A ρ`.
    pub fn left(a: &Op) -> Self {
        let d = a.nrows();
        Self { d, m: kron(&identity(d), a) }
    }

    /// `ρ ↦ ρ B`.
    pub fn right(b: &Op) -> Self {
        let d = b.nrows();
        Self { d, m: kron(&b.transpose(), &identity(d)) }
    }

    /// `ρ ↦ A ρ B`.
    pub fn sandwich(a: &Op, b: &Op) -> Self {
        Self { d: a.nrows(), m: kron(&b.transpose(), a) }
    }

    /// `ρ ↦ [A, ρ]`.
    pub fn commutator(a: &Op) -> Self {
        Self::left(a) - Self::right(a)
    }

    pub fn apply(&self, rho: &Op) -> Op {
        unvec(&(&self.m * vec_op(rho)), self.d)
    }

    pub fn compose(&self, other: &Superop) -> Superop {
        Superop { d: self.d, m: &self.m * &other.m }
    }

    pub fn scale(&self, s: C64) -> Superop {
        Superop { d: self.d, m: self.m.map(|z| z * s) }
    }

    pub fn norm(&self) -> f64 {
        fro_norm(&self.m)
    }

    /// Defect of trace preservation, `‖vec(𝟙)† L‖`.
    pub fn trace_defect(&self) -> f64 {
        let id = vec_op(&identity(self.d));
        (id.adjoint() * &self.m).norm()
    }
}

impl std::ops::Add for Superop {
    type Output = Superop;
    fn add(self, rhs: Superop) -> Superop {
        Superop { d: self.d, m: self.m + rhs.m }
    }
}

impl std::ops::Sub for Superop {
    type Output = Superop;
    fn sub(self, rhs: Superop) -> Superop {
        Superop { d: self.d, m: self.m - rhs.m }
    }
}

impl std::ops::AddAssign<&Superop> for Superop {
    fn add_assign(&mut self, rhs: &Superop) {
        self.m += &rhs.m;
    }
}

/// `D_X(ρ) = X ρ X† − ½{X†X, ρ}`.
pub fn build_dissipator(x: &Op) -> Superop {
    let xdx = x.adjoint() * x;
    let half = c(0.5, 0.0);
    Superop::sandwich(x, &x.adjoint()) - (Superop::left(&xdx) + Superop::right(&xdx)).scale(half)
}

/// `ρ ↦ −i[H, ρ]`; rejects non-Hermitian `H`.
pub fn build_hamiltonian_superop(h: &Op) -> Result<Superop> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: h.ncols() });
    }
    if !is_hermitian(h) {
        return Err(Error::NonHermitian { defect: hermiticity_defect(h) });
    }
    Ok(commutator_superop(h))
}

/// `ρ ↦ −i[A, ρ]` without a Hermiticity check (Fourier modes of a real-time Hamiltonian).
pub fn commutator_superop(a: &Op) -> Superop {
    Superop::commutator(a).scale(-I)
}

/// Kernel / complement decomposition of a stable generator.
///
/// `kernel[i]` and `cokernel[j]` are biorthonormal, `Tr(cokernel[j]† kernel[i]) = δ_ij`,
/// and the projector is `R = Σ_i |kernel_i⟩⟩⟨⟨cokernel_i|`.
#[derive(Clone, Debug)]
pub struct SpectralSplit {
    pub d: usize,
    pub kernel: Vec<Op>,
    pub cokernel: Vec<Op>,
    pub projector: Superop,
    /// Smallest `|Re λ|` over the non-kernel spectrum.
    pub gap: f64,
    /// Kernel vectors are `E_ij ⊗ v` for this target dimension, see [`SpectralSplit::product`].
    pub target_dim: Option<usize>,
}

pub const DEFAULT_KERNEL_TOL: f64 = 1e-9;
const GRAM_COND_MAX: f64 = 1e8;

impl SpectralSplit {
    /// `N × m` matrix whose columns are the vectorized kernel basis.
    pub fn embed(&self) -> DMatrix<C64> {
        stack_columns(&self.kernel)
    }

    /// `m × N` coordinate map `W†`, a left inverse of [`Self::embed`].
    pub fn coords(&self) -> DMatrix<C64> {
        stack_columns(&self.cokernel).adjoint()
    }

    pub fn dim(&self) -> usize {
        self.kernel.len()
    }

    /// Split of `id_T ⊗ L_E` built from a split of `L_E`.
    ///
    /// The kernel basis is `E_ij ⊗ v_a` with `E_ij` ordered column-major, so for a
    /// one-dimensional env kernel the slow coordinates are exactly `vec(ρ_s)`.
    pub fn product(d_t: usize, env: &SpectralSplit) -> SpectralSplit {
        let mut kernel = Vec::new();
        let mut cokernel = Vec::new();
        for a in 0..env.dim() {
            for j in 0..d_t {
                for i in 0..d_t {
                    let mut e = Op::zeros(d_t, d_t);
                    e[(i, j)] = ONE;
                    kernel.push(kron(&e, &env.kernel[a]));
                    cokernel.push(kron(&e, &env.cokernel[a]));
                }
            }
        }
        let d = d_t * env.d;
        let embed = stack_columns(&kernel);
        let coords = stack_columns(&cokernel).adjoint();
        SpectralSplit {
            d,
            projector: Superop::from_matrix(d, embed * coords),
            kernel,
            cokernel,
            gap: env.gap,
            target_dim: (env.dim() == 1).then_some(d_t),
        }
    }
}

pub fn stack_columns(ops: &[Op]) -> DMatrix<C64> {
    let n = ops.first().map(|o| o.len()).unwrap_or(0);
    DMatrix::from_fn(n, ops.len(), |r, k| ops[k].as_slice()[r])
}

/// Splits `L0` into kernel and decaying complement.
///
/// Eigenvalues with `|λ| < tol · ‖L0‖_F` count as kernel. The kernel bases come from
/// the SVD null spaces of `L0` (right) and `L0†` (left) and are biorthonormalized.
pub fn spectral_split(l0: &Superop, tol: f64) -> Result<SpectralSplit> {
    let n = l0.m.nrows();
    let scale = l0.norm().max(f64::MIN_POSITIVE);
    let eigs = eigenvalues(&l0.m)?;
    let thr = tol * scale;
    let (kern, rest): (Vec<C64>, Vec<C64>) = eigs.iter().partition(|z| z.norm() < thr);
    if let Some(bad) = rest.iter().find(|z| z.re > -thr) {
        return Err(Error::UnstableGenerator { re: bad.re, im: bad.im });
    }
    let m = kern.len();
    if m == 0 {
        return Err(Error::NumericalFailure("generator has no stationary state"));
    }
    let gap = rest.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);

    let svd = nalgebra::SVD::try_new(l0.m.clone(), false, true, f64::EPSILON, 10_000 * n)
        .ok_or(Error::NumericalFailure("SVD did not converge"))?;
    let vt = svd.v_t.unwrap();
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));
    let null: Vec<usize> = order[..m].to_vec();
    // A Jordan block at zero leaves fewer exact null vectors than its multiplicity.
    let worst = null.iter().map(|&k| sv[k]).fold(0.0, f64::max);
    if worst > tol.sqrt() * scale {
        return Err(Error::DegenerateKernel { condition: f64::INFINITY });
    }
    let vr = DMatrix::from_fn(n, m, |r, k| vt[(null[k], r)].conj());
    // Left singular vectors of a nearly singular matrix can be inaccurate; the
    // cokernel is taken from the right singular vectors of the adjoint instead.
    let svd_adj = nalgebra::SVD::try_new(l0.m.adjoint(), false, true, f64::EPSILON, 10_000 * n)
        .ok_or(Error::NumericalFailure("SVD did not converge"))?;
    let vt_adj = svd_adj.v_t.unwrap();
    let sv_adj = &svd_adj.singular_values;
    let mut order_adj: Vec<usize> = (0..n).collect();
    order_adj.sort_by(|&a, &b| sv_adj[a].total_cmp(&sv_adj[b]));
    let wl = DMatrix::from_fn(n, m, |r, k| vt_adj[(order_adj[k], r)].conj());

    let gram = wl.adjoint() * &vr;
    let gsv = gram.singular_values();
    let cond = gsv.max() / gsv.min().max(f64::MIN_POSITIVE);
    if cond > GRAM_COND_MAX {
        return Err(Error::DegenerateKernel { condition: cond });
    }
    let ginv = gram
        .try_inverse()
        .ok_or(Error::DegenerateKernel { condition: f64::INFINITY })?;
    let vr = vr * ginv;
    let d = l0.d;
    let mut kernel: Vec<Op> = (0..m).map(|k| unvec(&vr.column(k).into_owned(), d)).collect();
    let mut cokernel: Vec<Op> = (0..m).map(|k| unvec(&wl.column(k).into_owned(), d)).collect();
    // A unique stationary operator is scaled to unit trace.
    if m == 1 {
        let tr = trace(&kernel[0]);
        if tr.norm() > 1e-8 * fro_norm(&kernel[0]) {
            kernel[0] /= tr;
            cokernel[0] *= tr.conj();
        }
    }
    let projector = Superop::from_matrix(d, &vr * wl.adjoint());
    Ok(SpectralSplit { d, kernel, cokernel, projector, gap, target_dim: None })
}

/// Solver for `(L0 − s) X = Y` on the range of `1 − R`, with the LU factors cached.
pub struct ShiftedSolver {
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    l0: DMatrix<C64>,
    shift: C64,
    projector: DMatrix<C64>,
    d: usize,
}

const PROJECTION_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-9;

impl ShiftedSolver {
    pub fn new(l0: &Superop, shift: C64, split: &SpectralSplit) -> Result<Self> {
        let n = l0.m.nrows();
        let mut a = &l0.m - DMatrix::<C64>::identity(n, n) * shift;
        // On the kernel L0 − s is either −s or singular; adding R makes it invertible
        // without touching the complement, which R annihilates.
        if shift.norm() < 1e-300 {
            a += &split.projector.m;
        }
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::SolverFailure { residual: f64::INFINITY });
        }
        Ok(Self { lu, l0: l0.m.clone(), shift, projector: split.projector.m.clone(), d: l0.d })
    }

    pub fn solve_vec(&self, y: &CVec) -> Result<CVec> {
        let ny = y.norm();
        let ry = (&self.projector * y).norm();
        if ry > PROJECTION_TOL * ny.max(1e-300) && ry > 1e-14 {
            return Err(Error::ProjectionViolation { defect: ry / ny.max(1e-300) });
        }
        let y = y - &self.projector * y;
        let x = self
            .lu
            .solve(&y)
            .ok_or(Error::SolverFailure { residual: f64::INFINITY })?;
        let x = &x - &self.projector * &x;
        let resid = (&self.l0 * &x - &x * self.shift - &y).norm();
        let scale = fro_norm(&self.l0) * x.norm() + y.norm();
        if !resid.is_finite() || resid > RESIDUAL_TOL * scale.max(1e-300) {
            return Err(Error::SolverFailure { residual: resid / scale.max(1e-300) });
        }
        Ok(x)
    }

    pub fn solve(&self, y: &Op) -> Result<Op> {
        Ok(unvec(&self.solve_vec(&vec_op(y))?, self.d))
    }

    /// Column-wise solve for a block of right-hand sides.
    pub fn solve_block(&self, y: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let mut out = DMatrix::zeros(y.nrows(), y.ncols());
        for k in 0..y.ncols() {
            let x = self.solve_vec(&y.column(k).into_owned())?;
            out.set_column(k, &x);
        }
        Ok(out)
    }
}

/// Solves `(L0 − shift) X = Y` for `Y` in the range of `1 − R`; the result is in that range too.
pub fn shifted_solve(l0: &Superop, shift: C64, y: &Op, split: &SpectralSplit) -> Result<Op> {
    ShiftedSolver::new(l0, shift, split)?.solve(y)
}

/// Orthonormal Hermitian operator basis: `𝟙/√d` followed by the generalized Gell-Mann matrices.
pub fn gell_mann_basis(d: usize) -> Vec<Op> {
    let mut out = vec![identity(d).scale(1.0 / (d as f64).sqrt())];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = Op::zeros(d, d);
            sym[(j, k)] = c(s, 0.0);
            sym[(k, j)] = c(s, 0.0);
            let mut asym = Op::zeros(d, d);
            asym[(j, k)] = c(0.0, -s);
            asym[(k, j)] = c(0.0, s);
            out.push(sym);
            out.push(asym);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = Op::zeros(d, d);
        for k in 0..l {
            diag[(k, k)] = c(norm, 0.0);
        }
        diag[(l, l)] = c(-(l as f64) * norm, 0.0);
        out.push(diag);
    }
    out
}

/// Canonical form `L(ρ) = −i[H, ρ] + {G, ρ} + Σ_ij K_ij F_i ρ F_j†` over the traceless
/// Gell-Mann basis `F_i`.
#[derive(Clone, Debug)]
pub struct Kossakowski {
    pub hamiltonian: Op,
    pub matrix: DMatrix<C64>,
    /// Traceless basis `F_1 … F_{d²−1}`.
    pub basis: Vec<Op>,
}

pub fn kossakowski(l: &Superop) -> Kossakowski {
    let d = l.d;
    let f = gell_mann_basis(d);
    let nb = f.len();
    // c_ab is the coefficient of F_a ρ F_b†, i.e. of the matrix conj(F_b) ⊗ F_a.
    let mut cmat = DMatrix::<C64>::zeros(nb, nb);
    for a in 0..nb {
        for b in 0..nb {
            let basis = kron(&f[b].map(|z| z.conj()), &f[a]);
            cmat[(a, b)] = hs_inner(&basis, &l.m);
        }
    }
    let sd = (d as f64).sqrt();
    let mut fop = Op::zeros(d, d);
    for i in 1..nb {
        fop += &f[i] * (cmat[(i, 0)] / sd);
    }
    let hamiltonian = (fop.adjoint() - &fop) * c(0.0, -0.5);
    Kossakowski {
        hamiltonian,
        matrix: cmat.view((1, 1), (nb - 1, nb - 1)).into_owned(),
        basis: f[1..].to_vec(),
    }
}

impl Kossakowski {
    /// Smallest eigenvalue of the Hermitian part of the Kossakowski matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.matrix)
    }

    pub fn dissipative_norm(&self) -> f64 {
        fro_norm(&self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{sigma_minus, sigma_z};
    use crate::random::{random_lindbladian, rng};
    use approx::assert_abs_diff_eq;

    fn ket_bra(d: usize, i: usize, j: usize) -> Op {
        let mut m = Op::zeros(d, d);
        m[(i, j)] = ONE;
        m
    }

    // basis index 0 = |e⟩, 1 = |g⟩
    const E: usize = 0;
    const G: usize = 1;

    #[test]
    fn dephasing_dissipator_on_coherence() {
        let out = build_dissipator(&sigma_z()).apply(&ket_bra(2, G, E));
        assert_abs_diff_eq!(fro_norm(&(out + ket_bra(2, G, E).scale(2.0))), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn lowering_dissipator_on_excited_state() {
        let out = build_dissipator(&sigma_minus()).apply(&ket_bra(2, E, E));
        let want = ket_bra(2, G, G) - ket_bra(2, E, E);
        assert_abs_diff_eq!(fro_norm(&(out - want)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hamiltonian_superop_phase() {
        let h = sigma_z().scale(0.5);
        let out = build_hamiltonian_superop(&h).unwrap().apply(&ket_bra(2, G, E));
        let want = ket_bra(2, G, E) * I;
        assert_abs_diff_eq!(fro_norm(&(out - want)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        assert!(matches!(
            build_hamiltonian_superop(&sigma_minus()),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn amplitude_damping_split() {
        let k = 0.7;
        let l = build_dissipator(&sigma_minus()).scale(c(k, 0.0));
        let s = spectral_split(&l, DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(s.dim(), 1);
        assert_abs_diff_eq!(s.gap, k / 2.0, epsilon = 1e-12);
        let rho = s.kernel[0].clone() / trace(&s.kernel[0]);
        assert_abs_diff_eq!(fro_norm(&(rho - ket_bra(2, G, G))), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn dephasing_split_has_two_dim_kernel() {
        let kz = 0.3;
        let l = build_dissipator(&sigma_z()).scale(c(kz, 0.0));
        let s = spectral_split(&l, DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(s.dim(), 2);
        assert_abs_diff_eq!(s.gap, 2.0 * kz, epsilon = 1e-12);
    }

    #[test]
    fn jordan_kernel_rejected() {
        // 2×2 nilpotent block embedded as a fake "superoperator" on d = 2.
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 1)] = ONE;
        m[(2, 2)] = c(-1.0, 0.0);
        m[(3, 3)] = c(-2.0, 0.0);
        let err = spectral_split(&Superop::from_matrix(2, m), DEFAULT_KERNEL_TOL).unwrap_err();
        assert!(matches!(err, Error::DegenerateKernel { .. }), "{err:?}");
    }

    #[test]
    fn unstable_generator_rejected() {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(1, 1)] = c(0.5, 0.0);
        m[(2, 2)] = c(-1.0, 0.0);
        m[(3, 3)] = c(-2.0, 0.0);
        let err = spectral_split(&Superop::from_matrix(2, m), DEFAULT_KERNEL_TOL).unwrap_err();
        assert!(matches!(err, Error::UnstableGenerator { .. }));
    }

    #[test]
    fn projector_is_long_time_propagator() {
        let mut r = rng(11);
        let l = random_lindbladian(&mut r, 3, 2);
        let s = spectral_split(&l, DEFAULT_KERNEL_TOL).unwrap();
        let prop = (&l.m * C64::from(50.0 / s.gap)).exp();
        assert!(fro_norm(&(prop - &s.projector.m)) < 1e-8);
    }

    #[test]
    fn shifted_solve_residual() {
        let mut r = rng(5);
        let l = random_lindbladian(&mut r, 3, 2);
        let s = spectral_split(&l, DEFAULT_KERNEL_TOL).unwrap();
        let y0 = crate::random::random_matrix(&mut r, 3);
        let y = &y0 - s.projector.apply(&y0);
        let shift = I * 3.0 * 1.7;
        let x = shifted_solve(&l, shift, &y, &s).unwrap();
        let resid = fro_norm(&(l.apply(&x) - &x * shift - &y));
        assert!(resid < 1e-11 * fro_norm(&y).max(1.0), "{resid}");
        let err = shifted_solve(&l, shift, &s.kernel[0], &s).unwrap_err();
        assert!(matches!(err, Error::ProjectionViolation { .. }));
    }

    #[test]
    fn kossakowski_recovers_channels() {
        let h = sigma_z().scale(0.4);
        let l = build_hamiltonian_superop(&h).unwrap()
            + build_dissipator(&sigma_minus()).scale(c(0.8, 0.0));
        let k = kossakowski(&l);
        assert_abs_diff_eq!(fro_norm(&(&k.hamiltonian - h)), 0.0, epsilon = 1e-14);
        assert!(k.min_eigenvalue() > -1e-14);
        let tr: f64 = k.matrix.trace().re;
        // σ- has Hilbert–Schmidt norm 1, so its squared coordinates sum to 1.
        assert_abs_diff_eq!(tr, 0.8, epsilon = 1e-14);
    }
}
