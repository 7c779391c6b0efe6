//! Standard qubit and spin operators. Basis order is `(|e⟩, |g⟩)`, so `σz|e⟩ = |e⟩`,
//! `σ+ = |e⟩⟨g|` and `σ- = |g⟩⟨e|`.

use crate::linalg::{c, identity, kron, Op, ONE, ZERO};

pub fn sigma_x() -> Op {
    Op::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> Op {
    Op::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn sigma_z() -> Op {
    Op::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn sigma_plus() -> Op {
    Op::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

pub fn sigma_minus() -> Op {
    Op::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

pub fn projector_e() -> Op {
    Op::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])
}

pub fn projector_g() -> Op {
    Op::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE])
}

/// Spin-`(d−1)/2` operators `(S_x, S_y, S_z)` in the basis `m = j, j−1, …, −j`.
pub fn spin_ops(d: usize) -> (Op, Op, Op) {
    let j = (d as f64 - 1.0) / 2.0;
    let mut sp = Op::zeros(d, d);
    let mut sz = Op::zeros(d, d);
    for k in 0..d {
        let m = j - k as f64;
        sz[(k, k)] = c(m, 0.0);
        if k > 0 {
            // ⟨m+1| S+ |m⟩
            sp[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm).scale(0.5);
    let sy = (&sp - &sm) * c(0.0, -0.5);
    (sx, sy, sz)
}

/// `A ⊗ 𝟙_dB`.
pub fn on_first(a: &Op, db: usize) -> Op {
    kron(a, &identity(db))
}

/// `𝟙_dA ⊗ B`.
pub fn on_second(da: usize, b: &Op) -> Op {
    kron(&identity(da), b)
}

/// Partial trace over the second factor of a `dA·dB` operator.
pub fn partial_trace_second(x: &Op, da: usize, db: usize) -> Op {
    Op::from_fn(da, da, |i, j| (0..db).map(|k| x[(i * db + k, j * db + k)]).sum())
}
