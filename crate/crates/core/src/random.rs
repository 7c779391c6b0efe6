//! Seeded random instances for property suites and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{build_dissipator, build_hamiltonian_superop, c, Op, Superop};

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for instance `index` of property family `family` under a master seed.
pub fn instance_rng(seed: u64, family: &str, index: u64) -> Rand {
    // FNV-1a over the family name keeps streams stable across releases.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in family.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ h);
    r.set_stream(index);
    r
}

pub fn uniform(r: &mut Rand, lo: f64, hi: f64) -> f64 {
    r.random_range(lo..hi)
}

/// Entries uniform in the unit square of the complex plane, centred at zero.
pub fn random_matrix(r: &mut Rand, d: usize) -> Op {
    Op::from_fn(d, d, |_, _| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

pub fn random_hermitian(r: &mut Rand, d: usize) -> Op {
    let a = random_matrix(r, d);
    (&a + a.adjoint()).scale(0.5)
}

pub fn random_density(r: &mut Rand, d: usize) -> Op {
    let a = random_matrix(r, d);
    let rho = &a * a.adjoint();
    let t = rho.trace();
    rho / t
}

/// Random Hamiltonian plus `channels` random jump operators.
pub fn random_lindbladian(r: &mut Rand, d: usize, channels: usize) -> Superop {
    let mut l = build_hamiltonian_superop(&random_hermitian(r, d)).expect("Hermitian by construction");
    for _ in 0..channels {
        l += &build_dissipator(&random_matrix(r, d));
    }
    l
}
