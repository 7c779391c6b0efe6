//! Closed-form and linear-solve rates for a driven two-level environment.
//!
//! Conventions: basis `(|e⟩, |g⟩)`, `σ₊ = |e⟩⟨g|`. In the frame rotating at `ω̄₁σ_z/2`
//! the environment Hamiltonian is `(Δ/2)σ_z + (ω₂/2)σ_x = (Λ/2)σ_αx` with
//! `σ_αx = cos α σ_x + sin α σ_z`, and the coupling is
//! `g(T_z⊗σ_z + e^{iω̄₁t} T₋⊗σ₊ + e^{−iω̄₁t} T₊⊗σ₋)`.
//!
//! `σ_α±` are the ladder operators of `σ_αx` with its `+1` eigenvector as the excited
//! state: `σ_α± = U σ± U†`, `U = exp(−iθσ_y/2)`, `θ = π/2 − α`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result, Warning};
use crate::floquet::{extract_rates, floquet_reduce_bipartite, BipartitePerturbation};
use crate::lindblad::{DissipationChannel, LindbladModel, PeriodicHamiltonian};
use crate::linalg::{c, identity, kron, trace, Op, ShiftedSolver, C64, I};
use crate::ops::{sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z, spin_ops};
use crate::stationary::EnvModel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    pub kappa1: f64,
    pub n_th: f64,
}

impl ThermalParams {
    pub fn new(kappa1: f64, n_th: f64) -> Result<Self> {
        let tp = Self { kappa1, n_th };
        tp.validate()?;
        Ok(tp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa1 >= 0.0 && self.kappa1.is_finite()) {
            return Err(invalid("kappa1", format!("{} must be finite and non-negative", self.kappa1)));
        }
        if !(self.n_th >= 0.0 && self.n_th.is_finite()) {
            return Err(invalid("n_th", format!("{} must be finite and non-negative", self.n_th)));
        }
        Ok(())
    }

    pub fn kappa_minus(&self) -> f64 {
        self.kappa1 * (1.0 + self.n_th)
    }

    pub fn kappa_plus(&self) -> f64 {
        self.kappa1 * self.n_th
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QddStrongParams {
    pub g: f64,
    /// Known drive frequency `ω̄₁`.
    pub omega1: f64,
    /// Strong drive amplitude, nominal value plus deviation.
    pub omega2: f64,
    /// Total detuning, drive offset plus frequency uncertainty.
    pub delta: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
}

impl QddStrongParams {
    pub fn thermal(g: f64, omega1: f64, omega2: f64, delta: f64, tp: ThermalParams) -> Self {
        Self { g, omega1, omega2, delta, kappa_minus: tp.kappa_minus(), kappa_plus: tp.kappa_plus() }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.g, self.omega1, self.omega2, self.delta, self.kappa_minus, self.kappa_plus];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(invalid("params", "all parameters must be finite"));
        }
        if self.g < 0.0 {
            return Err(invalid("g", format!("{} is negative", self.g)));
        }
        if self.omega1 < 0.0 {
            return Err(invalid("omega1", format!("{} is negative", self.omega1)));
        }
        if self.omega2 < 0.0 {
            return Err(invalid("omega2", format!("{} is negative", self.omega2)));
        }
        if self.kappa_minus < 0.0 {
            return Err(invalid("kappa_minus", format!("{} is negative", self.kappa_minus)));
        }
        if self.kappa_plus < 0.0 {
            return Err(invalid("kappa_plus", format!("{} is negative", self.kappa_plus)));
        }
        if self.kappa_sigma() <= 0.0 {
            return Err(invalid("kappa_minus", "kappa_minus + kappa_plus must be positive"));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        self.delta.hypot(self.omega2)
    }

    pub fn cos_alpha(&self) -> f64 {
        let l = self.lambda();
        if l > 0.0 { self.omega2 / l } else { 1.0 }
    }

    pub fn sin_alpha(&self) -> f64 {
        let l = self.lambda();
        if l > 0.0 { self.delta / l } else { 0.0 }
    }

    pub fn kappa_sigma(&self) -> f64 {
        self.kappa_minus + self.kappa_plus
    }

    pub fn kappa_delta(&self) -> f64 {
        self.kappa_minus - self.kappa_plus
    }
}

/// Drive-corrected environment rates under ultra-strong driving.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UltraRates {
    pub kappa_ax: f64,
    pub kappa_am: f64,
    pub kappa_ap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QddUltraParams {
    pub g: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub delta: f64,
    pub rates: UltraRates,
}

impl QddUltraParams {
    pub fn validate(&self) -> Result<()> {
        let r = self.rates;
        for (name, v) in [("kappa_ax", r.kappa_ax), ("kappa_am", r.kappa_am), ("kappa_ap", r.kappa_ap)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} must be finite and non-negative")));
            }
        }
        if self.kappa_sigma() <= 0.0 {
            return Err(invalid("kappa_am", "kappa_am + kappa_ap must be positive"));
        }
        Ok(())
    }

    pub fn kappa_sigma(&self) -> f64 {
        self.rates.kappa_am + self.rates.kappa_ap
    }

    pub fn kappa_delta(&self) -> f64 {
        self.rates.kappa_am - self.rates.kappa_ap
    }

    /// Stationary `⟨σ_αx⟩`.
    pub fn x_infinity(&self) -> f64 {
        -self.kappa_delta() / self.kappa_sigma()
    }

    fn strong(&self) -> QddStrongParams {
        QddStrongParams {
            g: self.g,
            omega1: self.omega1,
            omega2: self.omega2,
            delta: self.delta,
            kappa_minus: 0.0,
            kappa_plus: 0.0,
        }
    }
}

/// Bath seen by the environment: coupling `γ`, nominal frequency `Ω̄_E`, spectral density `G`.
#[derive(Clone, Copy, Debug)]
pub struct BathSpec<G: Fn(f64) -> f64> {
    pub gamma: f64,
    pub omega_e: f64,
    pub density: G,
}

impl<G: Fn(f64) -> f64> BathSpec<G> {
    fn eval(&self, nu: f64) -> Result<f64> {
        let v = (self.density)(nu);
        if !(v >= 0.0 && v.is_finite()) {
            return Err(invalid("spectral_density", format!("G({nu}) = {v} is not a finite non-negative value")));
        }
        Ok(v)
    }
}

/// Induced target rates in front of `D_{T_z}`, `D_{T₋}` and `D_{T₊}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedRates {
    pub ksz: f64,
    pub ks_minus: f64,
    pub ks_plus: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Op {
        match self {
            Axis::X => sigma_x(),
            Axis::Y => sigma_y(),
            Axis::Z => sigma_z(),
        }
    }
}

/// `U` with `U σ_z U† = σ_αx`.
fn alpha_frame(sin_a: f64, cos_a: f64) -> Op {
    // θ = π/2 − α: cos(θ/2), sin(θ/2) from half-angle identities of sin α = cos θ.
    let ch = ((1.0 + sin_a) / 2.0).max(0.0).sqrt();
    let sh = ((1.0 - sin_a) / 2.0).max(0.0).sqrt() * if cos_a < 0.0 { -1.0 } else { 1.0 };
    DMatrix::from_row_slice(2, 2, &[c(ch, 0.0), c(-sh, 0.0), c(sh, 0.0), c(ch, 0.0)])
}

pub fn sigma_alpha_x(sin_a: f64, cos_a: f64) -> Op {
    sigma_x().scale(cos_a) + sigma_z().scale(sin_a)
}

pub fn sigma_alpha_minus(sin_a: f64, cos_a: f64) -> Op {
    let u = alpha_frame(sin_a, cos_a);
    &u * sigma_minus() * u.adjoint()
}

pub fn sigma_alpha_plus(sin_a: f64, cos_a: f64) -> Op {
    sigma_alpha_minus(sin_a, cos_a).adjoint()
}

/// Rotating-frame environment under `σ∓` exchange.
pub fn strong_env(p: &QddStrongParams) -> EnvModel {
    EnvModel::new(
        sigma_z().scale(p.delta / 2.0) + sigma_x().scale(p.omega2 / 2.0),
        vec![
            DissipationChannel::new(p.kappa_minus, sigma_minus()),
            DissipationChannel::new(p.kappa_plus, sigma_plus()),
        ],
    )
}

/// Rotating-frame environment with drive-corrected channels along the `σ_αx` frame.
pub fn ultra_env(p: &QddUltraParams) -> EnvModel {
    let s = p.strong();
    let (sa, ca) = (s.sin_alpha(), s.cos_alpha());
    EnvModel::new(
        sigma_alpha_x(sa, ca).scale(s.lambda() / 2.0),
        vec![
            DissipationChannel::new(p.rates.kappa_ax, sigma_alpha_x(sa, ca)),
            DissipationChannel::new(p.rates.kappa_am, sigma_alpha_minus(sa, ca)),
            DissipationChannel::new(p.rates.kappa_ap, sigma_alpha_plus(sa, ca)),
        ],
    )
}

/// `(T_x, T_y, T_z)` of a spin of dimension `d`; `d = 2` gives `σ/2`.
pub fn target_ops(d: usize) -> (Op, Op, Op) {
    spin_ops(d)
}

fn ladder(tx: &Op, ty: &Op) -> (Op, Op) {
    (tx - ty * I, tx + ty * I)
}

/// Coupling as a periodic perturbation with `ε = g/ω̄₁` and modes scaled by `ω̄₁`.
pub fn qdd_perturbation(g: f64, omega1: f64, t_ops: &(Op, Op, Op)) -> Result<BipartitePerturbation> {
    if !(omega1 > 0.0) {
        return Err(invalid("omega1", "the periodic reduction needs a positive drive frequency"));
    }
    let (tx, ty, tz) = t_ops;
    let (tm, tp) = ladder(tx, ty);
    let w = C64::from(omega1);
    Ok(BipartitePerturbation {
        omega: omega1,
        eps: g / omega1,
        modes: vec![
            (0, vec![(tz * w, sigma_z())]),
            (1, vec![(tm * w, sigma_plus())]),
            (-1, vec![(tp * w, sigma_minus())]),
        ],
    })
}

/// Joint rotating-frame model of target and environment.
pub fn joint_model(env: &EnvModel, g: f64, omega1: f64, t_ops: &(Op, Op, Op)) -> LindbladModel {
    let (tx, ty, tz) = t_ops;
    let d_t = tz.nrows();
    let (tm, tp) = ladder(tx, ty);
    let id_t = identity(d_t);
    let h_static = kron(&id_t, &env.h) + kron(tz, &sigma_z()).scale(g);
    let channels =
        env.channels.iter().map(|ch| DissipationChannel::new(ch.rate, kron(&id_t, &ch.op))).collect();
    LindbladModel {
        d_t,
        d_e: 2,
        h_static,
        periodic: Some(PeriodicHamiltonian {
            omega: omega1,
            modes: vec![(1, kron(&tm, &sigma_plus()).scale(g)), (-1, kron(&tp, &sigma_minus()).scale(g))],
        }),
        channels,
    }
}

/// Lab-frame environment Hamiltonian of the two-tone drive.
pub fn lab_hamiltonian(p: &QddStrongParams, t: f64) -> Op {
    let ph = p.omega1 * t;
    sigma_z().scale((p.delta + p.omega1) / 2.0)
        + (sigma_x().scale(ph.cos()) + sigma_y().scale(ph.sin())).scale(p.omega2 / 2.0)
}

/// `U(t) = exp(−iω̄₁σ_z t/2) exp(−iΛσ_αx t/2)`.
pub fn drive_propagator(p: &QddStrongParams, t: f64) -> Op {
    let a = p.omega1 * t / 2.0;
    let outer = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        C64::from_polar(1.0, -a),
        C64::from_polar(1.0, a),
    ]));
    let b = p.lambda() * t / 2.0;
    let n = sigma_alpha_x(p.sin_alpha(), p.cos_alpha());
    let inner = identity(2).scale(b.cos()) - n * c(0.0, b.sin());
    outer * inner
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre integral of an operator-valued function over `[a, b]`.
fn integrate_op(f: impl Fn(f64) -> Op, a: f64, b: f64, panels: usize, gl: &(Vec<f64>, Vec<f64>)) -> Op {
    let h = (b - a) / panels as f64;
    let mut acc: Option<Op> = None;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for (x, w) in gl.0.iter().zip(&gl.1) {
            let v = f(mid + x * h / 2.0).scale(w * h / 2.0);
            acc = Some(match acc {
                Some(s) => s + v,
                None => v,
            });
        }
    }
    acc.unwrap_or_else(|| Op::zeros(2, 2))
}

/// Largest tolerated change between successive panel doublings.
pub const QUADRATURE_TOL: f64 = 1e-13;

/// Toggling-frame average `(1/T)∫₀ᵀ U†σ_a U dt` over `T = n_periods · 2π/ω̄₁`.
pub fn decoupling_average(p: &QddStrongParams, a: Axis, n_periods: usize) -> Result<Op> {
    if n_periods == 0 {
        return Err(invalid("n_periods", "must be at least 1"));
    }
    if !(p.omega1 > 0.0) {
        return Err(invalid("omega1", "must be positive"));
    }
    let t_end = n_periods as f64 * 2.0 * PI / p.omega1;
    let sigma = a.pauli();
    let f = |t: f64| {
        let u = drive_propagator(p, t);
        u.adjoint() * &sigma * u
    };
    let gl = gauss_legendre(16);
    // Enough panels to resolve the fastest rotation, then doubling until stable.
    let fastest = (p.lambda() + p.omega1) * t_end / (2.0 * PI);
    let mut panels = (fastest.ceil() as usize).max(n_periods).max(1);
    let mut prev = integrate_op(f, 0.0, t_end, panels, &gl) / C64::from(t_end);
    for _ in 0..12 {
        panels *= 2;
        let next = integrate_op(f, 0.0, t_end, panels, &gl) / C64::from(t_end);
        let diff = (&next - &prev).norm();
        if diff <= QUADRATURE_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NumericalFailure("decoupling quadrature did not converge"))
}

/// Induced rates of the rotating-frame coupling for any two-level environment model.
pub fn induced_rates(env: &EnvModel, g: f64, omega1: f64) -> Result<InducedRates> {
    let (split, rho) = env.split()?;
    let l = env.liouvillian()?;
    let centred = |e: &Op| {
        let mean = trace(&(e * &rho));
        e * &rho - &rho * mean
    };
    let solve = |shift: f64, e: &Op| -> Result<Op> {
        ShiftedSolver::new(&l, C64::new(0.0, shift), &split)?.solve(&centred(e))
    };
    let xz = solve(0.0, &sigma_z())?;
    // (L − iω̄₁) X₊ = (σ₊ − ⟨σ₊⟩)ρ̄ pairs with σ₋; the conjugate shift gives κ_{s,+}.
    let xp = solve(omega1, &sigma_plus())?;
    let xm = solve(-omega1, &sigma_minus())?;
    let g2 = g * g;
    Ok(InducedRates {
        ksz: -2.0 * g2 * trace(&(sigma_z() * xz)).re,
        ks_minus: -2.0 * g2 * trace(&(sigma_minus() * xp)).re,
        ks_plus: -2.0 * g2 * trace(&(sigma_plus() * xm)).re,
    })
}

/// Rates of the strong-drive model from the environment linear systems.
pub fn strong_rates_exact(p: &QddStrongParams) -> Result<InducedRates> {
    p.validate()?;
    induced_rates(&strong_env(p), p.g, p.omega1)
}

/// Rates of the ultra-strong model from the environment linear systems.
pub fn ultra_rates_exact(p: &QddUltraParams) -> Result<InducedRates> {
    p.validate()?;
    induced_rates(&ultra_env(p), p.g, p.omega1)
}

/// Rates of any two-level environment model read off the order-2 Floquet reduction
/// of the qubit coupling.
pub fn floquet_rates(env: &EnvModel, g: f64, omega1: f64) -> Result<InducedRates> {
    let ops = target_ops(2);
    let red = floquet_reduce_bipartite(env, 2, &qdd_perturbation(g, omega1, &ops)?, 2)?;
    let (tm, tp) = ladder(&ops.0, &ops.1);
    let ex = extract_rates(&red, &[ops.2.clone(), tm, tp], &[], &[])?;
    Ok(InducedRates { ksz: ex.rates[0], ks_minus: ex.rates[1], ks_plus: ex.rates[2] })
}

/// Rates of the strong-drive model from the Floquet reduction.
pub fn strong_rates_floquet(p: &QddStrongParams) -> Result<InducedRates> {
    p.validate()?;
    floquet_rates(&strong_env(p), p.g, p.omega1)
}

/// Closed-form `κ_{s,z}` of the strong-drive model, valid for all `ω₂`.
pub fn ksz_closed_form(p: &QddStrongParams) -> f64 {
    let (km, kp) = (p.kappa_minus, p.kappa_plus);
    let k = km + kp;
    let d2 = p.delta * p.delta;
    let w2 = p.omega2 * p.omega2;
    let dd = 4.0 * d2 + k * k;
    let num = 4.0 * kp * km * (16.0 * d2 * w2 + dd * dd) + 4.0 * k * k * w2 * (2.0 * km * km + 2.0 * kp * kp + w2);
    2.0 * p.g * p.g * dd * num / (k.powi(3) * (dd + 2.0 * w2).powi(3))
}

/// Quadratic `P(s)`, `s = ω₂²`, whose sign is that of `∂κ_{s,z}/∂ω₂` for `ω₂ > 0`.
pub fn ksz_derivative_numerator(p: &QddStrongParams) -> [f64; 3] {
    let (km, kp) = (p.kappa_minus, p.kappa_plus);
    let k2 = (km + kp).powi(2);
    let dd = 4.0 * p.delta * p.delta + k2;
    let a = 4.0 * kp * km;
    let b = 4.0 * k2 * (2.0 * km * km + 2.0 * kp * kp);
    let lin = 16.0 * a * p.delta * p.delta + b;
    [lin * dd - 6.0 * a * dd * dd, 8.0 * k2 * dd - 4.0 * lin, -8.0 * k2]
}

/// Analytic `∂κ_{s,z}/∂ω₂`.
pub fn ksz_derivative(p: &QddStrongParams) -> f64 {
    let k = p.kappa_sigma();
    let dd = 4.0 * p.delta * p.delta + k * k;
    let s = p.omega2 * p.omega2;
    let [c0, c1, c2] = ksz_derivative_numerator(p);
    let poly = c0 + c1 * s + c2 * s * s;
    // dκ/ds = 2g² D P(s) / (K³ (D + 2s)⁴), dκ/dω₂ = 2ω₂ dκ/ds.
    2.0 * p.omega2 * 2.0 * p.g * p.g * dd * poly / (k.powi(3) * (dd + 2.0 * s).powi(4))
}

/// Large-`ω₂` form of the strong-drive rates.
pub fn strong_rates_asymptotic(p: &QddStrongParams) -> (InducedRates, Option<Warning>) {
    let k = p.kappa_sigma();
    let g2 = p.g * p.g;
    let w2 = p.omega2 * p.omega2;
    let ksz = k * g2 / w2 + 4.0 * (p.delta * p.delta / w2) * g2 / k;
    let kpm = k * g2 / (k * k + 4.0 * p.omega1 * p.omega1);
    let rates = InducedRates { ksz, ks_minus: kpm, ks_plus: kpm };
    (rates, regime_warning(p.omega2, &[k, p.delta.abs(), p.omega1]))
}

fn regime_warning(omega2: f64, others: &[f64]) -> Option<Warning> {
    let m = others.iter().fold(0.0_f64, |a, b| a.max(*b));
    let ratio = if m > 0.0 { omega2 / m } else { f64::INFINITY };
    (ratio <= 1.0).then_some(Warning::AsymptoticRegime { ratio })
}

/// Large-`ω₂` form of the ultra-strong rates.
pub fn ultra_rates_asymptotic(p: &QddUltraParams) -> Result<(InducedRates, Option<Warning>)> {
    p.validate()?;
    let ks = p.kappa_sigma();
    let pol = 1.0 - (p.kappa_delta() / ks).powi(2);
    let kx = p.rates.kappa_ax;
    let g2 = p.g * p.g;
    let w2 = p.omega2 * p.omega2;
    let d2 = p.delta * p.delta;
    let ksz = (ks + 4.0 * kx) * g2 / w2 + 2.0 * (d2 / w2) * g2 * pol / ks;
    let kpm = ks * g2 * (1.0 - d2 / w2) * pol / (2.0 * (ks * ks + p.omega1 * p.omega1))
        + g2 * (4.0 * kx + ks) / (4.0 * w2);
    let rates = InducedRates { ksz, ks_minus: kpm, ks_plus: kpm };
    Ok((rates, regime_warning(p.omega2, &[ks, kx, p.delta.abs(), p.omega1])))
}

/// `κ_{s,∓}` at `ω₂ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmRates {
    pub ks_minus: f64,
    pub ks_plus: f64,
}

pub fn om2_zero_rates(p: &QddStrongParams) -> PmRates {
    let k = p.kappa_sigma();
    let den = k * k + 4.0 * (p.omega1 + p.delta).powi(2);
    let g2 = p.g * p.g;
    PmRates { ks_minus: 4.0 * p.kappa_minus * g2 / den, ks_plus: 4.0 * p.kappa_plus * g2 / den }
}

/// `κ_{s,z}` at `ω₂ = 0` for a thermal environment.
pub fn ksz_omega2_zero(tp: &ThermalParams, g: f64) -> f64 {
    let n = tp.n_th;
    8.0 * g * g * n * (n + 1.0) / (tp.kappa1 * (8.0 * n.powi(3) + 12.0 * n * n + 6.0 * n + 1.0))
}

/// `κ∓ = 2γ²G(±Ω̃_E)` with `Ω̃_E = Ω̄_E + ω̄₁`.
pub fn bath_dissipators_flat<G: Fn(f64) -> f64>(b: &BathSpec<G>, omega1: f64) -> Result<(f64, f64)> {
    let w = b.omega_e + omega1;
    let g2 = b.gamma * b.gamma;
    Ok((2.0 * g2 * b.eval(w)?, 2.0 * g2 * b.eval(-w)?))
}

pub fn bath_dissipators_ultrastrong<G: Fn(f64) -> f64>(b: &BathSpec<G>, p: &QddStrongParams) -> Result<UltraRates> {
    let w = b.omega_e + p.omega1;
    let l = p.lambda();
    let (sa, ca) = (p.sin_alpha(), p.cos_alpha());
    let h = b.gamma * b.gamma / 2.0;
    let (up, dn) = ((1.0 + sa).powi(2), (1.0 - sa).powi(2));
    Ok(UltraRates {
        kappa_ax: h * (b.eval(w)? + b.eval(-w)?) * ca * ca,
        kappa_am: h * (b.eval(w + l)? * up + b.eval(-w + l)? * dn),
        kappa_ap: h * (b.eval(-w - l)? * up + b.eval(w - l)? * dn),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Thm3Class {
    LocalMax,
    MonotoneDecreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm3Result {
    /// Classification from the temperature and detuning thresholds.
    pub class: Thm3Class,
    /// Classification from the sign pattern of `∂κ_{s,z}/∂ω₂`.
    pub derivative_class: Thm3Class,
    /// `ω₂` of the interior maximum, in the same units as `κ₁`.
    pub omega2_max: Option<f64>,
    /// `κ_{s,z}/g²` at the maximum.
    pub ksz_max: Option<f64>,
}

/// Temperature below which an interior maximum exists for every detuning.
pub fn thm3_threshold() -> f64 {
    3f64.sqrt() / 3.0 - 0.5
}

/// Upper bound on `Δ²/κ₁²` for an interior maximum above the temperature threshold.
pub fn thm3_detuning_bound(n_th: f64) -> f64 {
    let m = 2.0 * n_th + 1.0;
    let r = (12.0 * n_th * n_th + 12.0 * n_th - 1.0).sqrt();
    m * m * (2.0 * 3f64.sqrt() * m + r) / (4.0 * r)
}

pub fn thm3_classify(tp: &ThermalParams, delta: f64) -> Result<Thm3Result> {
    tp.validate()?;
    if tp.kappa1 <= 0.0 {
        return Err(invalid("kappa1", "must be positive"));
    }
    let n = tp.n_th;
    let class = if n < thm3_threshold() || (delta / tp.kappa1).powi(2) < thm3_detuning_bound(n) {
        Thm3Class::LocalMax
    } else {
        Thm3Class::MonotoneDecreasing
    };
    let p = QddStrongParams::thermal(1.0, 1.0, 0.0, delta, *tp);
    let root = derivative_sign_change(&p);
    let (derivative_class, omega2_max, ksz_max) = match root {
        Some(s) => {
            let w = s.sqrt();
            (Thm3Class::LocalMax, Some(w), Some(ksz_closed_form(&QddStrongParams { omega2: w, ..p })))
        }
        None => (Thm3Class::MonotoneDecreasing, None, None),
    };
    Ok(Thm3Result { class, derivative_class, omega2_max, ksz_max })
}

/// Positive `s` where `P(s)` crosses from positive to negative, if any.
fn derivative_sign_change(p: &QddStrongParams) -> Option<f64> {
    let [c0, c1, c2] = ksz_derivative_numerator(p);
    let poly = |s: f64| c0 + c1 * s + c2 * s * s;
    // P is a downward parabola; its larger root is the only + → − crossing.
    let vertex = (-c1 / (2.0 * c2)).max(0.0);
    if poly(vertex) <= 0.0 {
        return None;
    }
    let mut hi = vertex.max(1.0);
    while poly(hi) > 0.0 {
        hi *= 2.0;
    }
    let s = brent(poly, vertex, hi, 1e-15)?;
    (s > 0.0).then_some(s)
}

/// Brent's method on a bracketing interval.
pub fn brent(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> Option<f64> {
    let (mut fa, mut fb) = (f(a), f(b));
    if fa * fb > 0.0 {
        return None;
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut cc, mut fc) = (a, fa);
    let mut bisected = true;
    let mut dd = 0.0;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() <= rel_tol * b.abs().max(1e-300) {
            return Some(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc))
                + cc * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let out_of_range = !((s > lo.min(b)) && (s < lo.max(b)));
        let slow = if bisected { (s - b).abs() >= (b - cc).abs() / 2.0 } else { (s - b).abs() >= (cc - dd).abs() / 2.0 };
        if out_of_range || slow {
            s = (a + b) / 2.0;
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        dd = cc;
        cc = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Some(b)
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a).abs() > rel_tol * (a.abs() + b.abs()).max(1e-300) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    (a + b) / 2.0
}

/// Indices of strict interior local maxima of a sampled curve.
pub fn interior_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

/// Sampled `κ_{s,z}(ω₂)` with a refined interior maximum, if the samples show one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KszCurve {
    pub omega2: Vec<f64>,
    pub ksz: Vec<f64>,
    pub max_index: Option<usize>,
    pub max_location: Option<f64>,
}

pub fn ksz_curve(base: &QddStrongParams, omega2: &[f64]) -> KszCurve {
    let ksz: Vec<f64> =
        omega2.iter().map(|&w| ksz_closed_form(&QddStrongParams { omega2: w, ..*base })).collect();
    let max_index = interior_maxima(&ksz).first().copied();
    let max_location = max_index.map(|i| {
        let f = |w: f64| ksz_closed_form(&QddStrongParams { omega2: w, ..*base });
        golden_max(f, omega2[i - 1], omega2[i + 1], 1e-12)
    });
    KszCurve { omega2: omega2.to_vec(), ksz, max_index, max_location }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fro_norm;
    use approx::assert_relative_eq;

    fn params() -> QddStrongParams {
        QddStrongParams { g: 0.1, omega1: 1.3, omega2: 2.1, delta: 0.7, kappa_minus: 0.9, kappa_plus: 0.2 }
    }

    #[test]
    fn alpha_ladder_convention() {
        let p = params();
        let (sa, ca) = (p.sin_alpha(), p.cos_alpha());
        let x = sigma_alpha_x(sa, ca);
        let m = sigma_alpha_minus(sa, ca);
        let pl = sigma_alpha_plus(sa, ca);
        // [σ_αx, σ_α±] = ±2σ_α± and σ_α₊ + σ_α₋ = −(cos α σ_z − sin α σ_x).
        assert!(fro_norm(&(&x * &pl - &pl * &x - pl.scale(2.0))) < 1e-14);
        assert!(fro_norm(&(&x * &m - &m * &x + m.scale(2.0))) < 1e-14);
        let perp = sigma_z().scale(ca) - sigma_x().scale(sa);
        assert!(fro_norm(&(&pl + &m + perp)) < 1e-14);
    }

    #[test]
    fn propagator_identity_and_unitarity() {
        let p = params();
        assert!(fro_norm(&(drive_propagator(&p, 0.0) - identity(2))) < 1e-15);
        let u = drive_propagator(&p, 3.7);
        assert!(fro_norm(&(u.adjoint() * &u - identity(2))) < 1e-12);
    }

    #[test]
    fn propagator_spin_pi_rotation() {
        let p = QddStrongParams { delta: 0.0, ..params() };
        let t = 2.0 * PI / p.lambda();
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::from_polar(1.0, -p.omega1 * PI / p.lambda()),
            C64::from_polar(1.0, p.omega1 * PI / p.lambda()),
        ])) * c(-1.0, 0.0);
        assert!(fro_norm(&(drive_propagator(&p, t) - expect)) < 1e-12);
    }

    #[test]
    fn propagator_solves_schroedinger() {
        let p = params();
        let h = 1e-6 / p.lambda();
        for t in [0.3, 1.7, 4.2] {
            let du = (drive_propagator(&p, t + h) - drive_propagator(&p, t - h)) / c(2.0 * h, 0.0);
            let rhs = lab_hamiltonian(&p, t) * drive_propagator(&p, t) * c(0.0, -1.0);
            assert!(fro_norm(&(du - rhs)) < 1e-6);
        }
    }

    #[test]
    fn closed_form_matches_linear_solve() {
        let p = params();
        let exact = strong_rates_exact(&p).unwrap();
        assert_relative_eq!(exact.ksz, ksz_closed_form(&p), max_relative = 1e-10);
    }

    #[test]
    fn omega2_zero_rates_match() {
        let p = QddStrongParams { omega2: 0.0, ..params() };
        let exact = strong_rates_exact(&p).unwrap();
        let z = om2_zero_rates(&p);
        assert_relative_eq!(exact.ks_minus, z.ks_minus, max_relative = 1e-10);
        assert_relative_eq!(exact.ks_plus, z.ks_plus, max_relative = 1e-10);
        let tp = ThermalParams::new(0.8, 0.3).unwrap();
        let q = QddStrongParams::thermal(0.1, 1.0, 0.0, 0.4, tp);
        assert_relative_eq!(ksz_closed_form(&q), ksz_omega2_zero(&tp, 0.1), max_relative = 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = params();
        let h = 1e-5;
        let fd = (ksz_closed_form(&QddStrongParams { omega2: p.omega2 + h, ..p })
            - ksz_closed_form(&QddStrongParams { omega2: p.omega2 - h, ..p }))
            / (2.0 * h);
        assert_relative_eq!(ksz_derivative(&p), fd, max_relative = 1e-7);
    }

    #[test]
    fn thm3_examples() {
        let r = thm3_classify(&ThermalParams::new(1.0, 0.0).unwrap(), 3.0).unwrap();
        assert_eq!(r.class, Thm3Class::LocalMax);
        assert_eq!(r.derivative_class, Thm3Class::LocalMax);
        let r = thm3_classify(&ThermalParams::new(1.0, 0.2).unwrap(), 1e3).unwrap();
        assert_eq!(r.class, Thm3Class::MonotoneDecreasing);
        assert_eq!(r.derivative_class, Thm3Class::MonotoneDecreasing);
    }

    #[test]
    fn flat_bath_rates() {
        let b = BathSpec { gamma: 0.5, omega_e: 10.0, density: |_| 0.3 };
        let (km, kp) = bath_dissipators_flat(&b, 2.0).unwrap();
        assert_relative_eq!(km, 2.0 * 0.25 * 0.3);
        assert_relative_eq!(kp, km);
        let p = QddStrongParams { delta: 0.0, ..params() };
        let u = bath_dissipators_ultrastrong(&b, &p).unwrap();
        assert_relative_eq!(u.kappa_ax, 0.25 * 0.3, max_relative = 1e-14);
        assert_relative_eq!(u.kappa_am, 0.25 * 0.3, max_relative = 1e-14);
        assert_relative_eq!(u.kappa_ap, 0.25 * 0.3, max_relative = 1e-14);
    }

    #[test]
    fn negative_density_rejected() {
        let b = BathSpec { gamma: 0.5, omega_e: 1.0, density: |nu: f64| nu };
        assert!(bath_dissipators_flat(&b, 0.5).is_err());
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(s, 2.0 / 31.0, max_relative = 1e-13);
    }
}
