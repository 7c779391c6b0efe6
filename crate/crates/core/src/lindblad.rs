//! Time-periodic Lindblad models, their Liouvillians, an adaptive Dormand–Prince
//! integrator, one-period monodromy and exponential decay fits.
//!
//! ```text
//! dρ/dt = −i[H(t), ρ] + Σ_k γ_k D_{L_k}(ρ),   H(t) = H_0 + Σ_n e^{inωt} H_n
//! ```

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    build_dissipator, build_hamiltonian_superop, c, commutator_superop, eigenvalues, fro_norm,
    hermiticity_defect, is_hermitian, trace, unvec, vec_op, CVec, Op, Superop, C64,
};

/// Largest joint dimension `d_T · d_E` accepted (dense superoperators are `d⁴` entries).
pub const MAX_DIM: usize = 64;

#[derive(Clone, Debug)]
pub struct PeriodicHamiltonian {
    pub omega: f64,
    /// Fourier modes `(n, H_n)`; `H_{−n}` must equal `H_n†`.
    pub modes: Vec<(i32, Op)>,
}

#[derive(Clone, Debug)]
pub struct DissipationChannel {
    pub rate: f64,
    pub op: Op,
}

impl DissipationChannel {
    pub fn new(rate: f64, op: Op) -> Self {
        Self { rate, op }
    }
}

#[derive(Clone, Debug)]
pub struct LindbladModel {
    pub d_t: usize,
    pub d_e: usize,
    pub h_static: Op,
    pub periodic: Option<PeriodicHamiltonian>,
    pub channels: Vec<DissipationChannel>,
}

impl LindbladModel {
    pub fn dim(&self) -> usize {
        self.d_t * self.d_e
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || d > MAX_DIM {
            return Err(invalid("d_T·d_E", format!("{d} outside 1..={MAX_DIM}")));
        }
        let check_dim = |op: &Op| {
            if op.nrows() != d || op.ncols() != d {
                Err(Error::DimensionMismatch { expected: d, found: op.nrows() })
            } else {
                Ok(())
            }
        };
        check_dim(&self.h_static)?;
        if !is_hermitian(&self.h_static) {
            return Err(Error::NonHermitian { defect: hermiticity_defect(&self.h_static) });
        }
        for ch in &self.channels {
            check_dim(&ch.op)?;
            if !(ch.rate >= 0.0 && ch.rate.is_finite()) {
                return Err(invalid("rate", format!("{} is not a finite non-negative rate", ch.rate)));
            }
        }
        if let Some(p) = &self.periodic {
            if !(p.omega > 0.0 && p.omega.is_finite()) {
                return Err(invalid("omega", "drive frequency must be positive"));
            }
            for (n, h) in &p.modes {
                check_dim(h)?;
                let partner = self.mode_sum(-n);
                let defect = fro_norm(&(self.mode_sum(*n).adjoint() - partner));
                if defect > 1e-12 * fro_norm(h).max(1.0) {
                    return Err(Error::NonHermitian { defect });
                }
            }
        }
        Ok(())
    }

    fn mode_sum(&self, n: i32) -> Op {
        let d = self.dim();
        let mut acc = Op::zeros(d, d);
        if let Some(p) = &self.periodic {
            for (m, h) in &p.modes {
                if *m == n {
                    acc += h;
                }
            }
        }
        acc
    }

    pub fn period(&self) -> Option<f64> {
        self.periodic.as_ref().map(|p| 2.0 * PI / p.omega)
    }

    pub fn hamiltonian_at(&self, t: f64) -> Op {
        let mut h = self.h_static.clone();
        if let Some(p) = &self.periodic {
            for (n, hn) in &p.modes {
                h += hn * C64::from_polar(1.0, *n as f64 * p.omega * t);
            }
        }
        h
    }

    /// Constant part and Fourier modes of the Liouvillian.
    pub fn generator(&self) -> Result<Generator> {
        self.validate()?;
        let mut constant = build_hamiltonian_superop(&self.h_static)?;
        for ch in &self.channels {
            constant += &build_dissipator(&ch.op).scale(c(ch.rate, 0.0));
        }
        let (omega, modes) = match &self.periodic {
            Some(p) => {
                let mut modes: Vec<(i32, Superop)> = Vec::new();
                for (n, h) in &p.modes {
                    let s = commutator_superop(h);
                    if *n == 0 {
                        constant += &s;
                    } else if let Some(slot) = modes.iter_mut().find(|(m, _)| m == n) {
                        slot.1 += &s;
                    } else {
                        modes.push((*n, s));
                    }
                }
                (p.omega, modes)
            }
            None => (0.0, Vec::new()),
        };
        Ok(Generator { constant, omega, modes })
    }
}

/// `L(t) = L_c + Σ_n e^{inωt} L_n`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub constant: Superop,
    pub omega: f64,
    pub modes: Vec<(i32, Superop)>,
}

impl Generator {
    pub fn at(&self, t: f64) -> Superop {
        let mut l = self.constant.clone();
        for (n, s) in &self.modes {
            l.m += &s.m * C64::from_polar(1.0, *n as f64 * self.omega * t);
        }
        l
    }

    /// `L(t) · Y` without forming `L(t)`.
    pub fn apply(&self, t: f64, y: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = &self.constant.m * y;
        for (n, s) in &self.modes {
            out += (&s.m * y) * C64::from_polar(1.0, *n as f64 * self.omega * t);
        }
        out
    }
}

pub fn liouvillian_at(model: &LindbladModel, t: f64) -> Result<Superop> {
    Ok(model.generator()?.at(t))
}

#[derive(Clone, Copy, Debug)]
pub struct Dopri5Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Dopri5Options {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, abs_tol: rel_tol * 1e-3, max_steps: 2_000_000 }
    }
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// `y + h Σ cᵢ kᵢ` without intermediate allocations per term.
fn stage(y: &DMatrix<C64>, h: f64, terms: &[(f64, &DMatrix<C64>)]) -> DMatrix<C64> {
    let mut out = y.clone();
    for (coef, k) in terms {
        out.zip_apply(*k, |o, v| *o += v * (h * coef));
    }
    out
}

/// Adaptive Dormand–Prince integration of `dy/dt = f(t, y)` from `t0` through each
/// time in `stops` (ascending); `on_stop` sees the state at every stop.
pub fn dopri5<F>(
    f: F,
    t0: f64,
    y0: &DMatrix<C64>,
    stops: &[f64],
    opts: &Dopri5Options,
    mut on_stop: impl FnMut(f64, &DMatrix<C64>),
) -> Result<DMatrix<C64>>
where
    F: Fn(f64, &DMatrix<C64>) -> DMatrix<C64>,
{
    let mut t = t0;
    let mut y = y0.clone();
    let Some(&t_end) = stops.last() else {
        return Ok(y);
    };
    let span = (t_end - t0).abs().max(1e-300);
    let mut k1 = f(t, &y);
    let mut h = initial_step(&y, &k1, opts, span);
    let mut steps = 0usize;
    let mut next = 0usize;
    while next < stops.len() && stops[next] <= t {
        on_stop(stops[next], &y);
        next += 1;
    }
    while next < stops.len() {
        let target = stops[next];
        let mut hit = false;
        let h_free = h;
        if t + h >= target {
            h = target - t;
            hit = true;
        }
        let k2 = f(t + h / 5.0, &stage(&y, h, &[(A21, &k1)]));
        let k3 = f(t + 0.3 * h, &stage(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + 0.8 * h, &stage(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + 8.0 / 9.0 * h,
            &stage(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &stage(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = stage(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new);
        let zero = DMatrix::zeros(y.nrows(), y.ncols());
        let err_vec = stage(
            &zero,
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = err_vec
            .iter()
            .zip(y.iter().zip(y_new.iter()))
            .map(|(e, (a, b))| {
                let sc = opts.abs_tol + opts.rel_tol * a.norm().max(b.norm());
                (e.norm() / sc).powi(2)
            })
            .sum::<f64>()
            / err_vec.len() as f64;
        let err = err.sqrt();
        steps += 1;
        if steps > opts.max_steps || !err.is_finite() {
            return Err(Error::Stiffness { t, h });
        }
        if err <= 1.0 {
            t = if hit { target } else { t + h };
            y = y_new;
            k1 = k7;
            if hit {
                while next < stops.len() && stops[next] <= t {
                    on_stop(stops[next], &y);
                    next += 1;
                }
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = if hit { h_free.max(h * fac) } else { h * fac };
        } else {
            h *= (0.9 * err.powf(-0.25)).clamp(0.1, 1.0);
        }
        if h < 1e-13 * span {
            return Err(Error::Stiffness { t, h });
        }
    }
    Ok(y)
}

fn initial_step(y: &DMatrix<C64>, dy: &DMatrix<C64>, opts: &Dopri5Options, span: f64) -> f64 {
    let sc = opts.abs_tol + opts.rel_tol * fro_norm(y) / (y.len() as f64).sqrt();
    let d0 = fro_norm(y) / (y.len() as f64).sqrt() / sc;
    let d1 = fro_norm(dy) / (dy.len() as f64).sqrt() / sc;
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span)
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Op>,
}

impl Trajectory {
    pub fn expectation(&self, obs: &Op) -> Vec<C64> {
        self.states.iter().map(|rho| trace(&(obs * rho))).collect()
    }

    pub fn last(&self) -> Option<&Op> {
        self.states.last()
    }
}

/// Integrates from `t = 0` to `t_final`, recording every accepted step.
pub fn integrate(model: &LindbladModel, rho0: &Op, t_final: f64, rel_tol: f64) -> Result<Trajectory> {
    let n = 200.max((t_final / model.period().unwrap_or(t_final.max(1e-300)) * 16.0) as usize);
    let times: Vec<f64> = (0..=n).map(|k| t_final * k as f64 / n as f64).collect();
    integrate_sampled(model, rho0, &times, rel_tol)
}

/// Integrates from `t = 0`, recording the state at the given ascending times.
pub fn integrate_sampled(model: &LindbladModel, rho0: &Op, times: &[f64], rel_tol: f64) -> Result<Trajectory> {
    let gen = model.generator()?;
    let d = model.dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho0.nrows() });
    }
    if !(rel_tol > 0.0) {
        return Err(invalid("rel_tol", "must be positive"));
    }
    let v = vec_op(rho0);
    let y0 = DMatrix::from_column_slice(v.len(), 1, v.as_slice());
    let opts = Dopri5Options::with_rel_tol(rel_tol);
    let mut traj = Trajectory::default();
    dopri5(|t, y| gen.apply(t, y), 0.0, &y0, times, &opts, |t, y| {
        traj.times.push(t);
        traj.states.push(unvec(&CVec::from_column_slice(y.as_slice()), d));
    })?;
    Ok(traj)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MonodromyMethod {
    /// Adaptive integration, falling back to exponential splitting if the step size collapses.
    Auto,
    Adaptive,
    /// Midpoint exponential splitting with a fixed number of steps.
    Splitting { steps: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct MonodromyOptions {
    pub method: MonodromyMethod,
    pub rel_tol: f64,
    /// Overrides the period implied by the drive (required for static models).
    pub period: Option<f64>,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        Self { method: MonodromyMethod::Auto, rel_tol: 1e-12, period: None }
    }
}

pub const MIN_SPLITTING_STEPS: usize = 4096;

/// One-period propagator `Φ(T)` of `dΦ/dt = L(t) Φ`, `Φ(0) = 𝟙`.
pub fn monodromy(model: &LindbladModel) -> Result<Superop> {
    monodromy_with(model, &MonodromyOptions::default())
}

pub fn monodromy_with(model: &LindbladModel, opts: &MonodromyOptions) -> Result<Superop> {
    let gen = model.generator()?;
    let period = opts
        .period
        .or(model.period())
        .ok_or_else(|| invalid("period", "static model needs an explicit period"))?;
    let d = model.dim();
    let n = d * d;
    let id = DMatrix::<C64>::identity(n, n);
    let adaptive = |max_steps| {
        let o = Dopri5Options { rel_tol: opts.rel_tol, abs_tol: opts.rel_tol * 1e-2, max_steps };
        dopri5(|t, y| gen.apply(t, y), 0.0, &id, &[period], &o, |_, _| {})
    };
    let splitting = |steps: usize| {
        let h = period / steps as f64;
        let mut phi = id.clone();
        for k in 0..steps {
            let l = gen.at((k as f64 + 0.5) * h);
            phi = (&l.m * c(h, 0.0)).exp() * phi;
        }
        phi
    };
    let m = match opts.method {
        MonodromyMethod::Adaptive => adaptive(2_000_000)?,
        MonodromyMethod::Splitting { steps } => splitting(steps.max(1)),
        MonodromyMethod::Auto => match adaptive(200_000) {
            Ok(m) => m,
            Err(Error::Stiffness { .. }) => splitting(MIN_SPLITTING_STEPS),
            Err(e) => return Err(e),
        },
    };
    Ok(Superop::from_matrix(d, m))
}

/// Floquet exponents `log(μ)/T` of a monodromy matrix, sorted by decreasing real part.
pub fn floquet_exponents(phi: &Superop, period: f64) -> Result<Vec<C64>> {
    let mut ex: Vec<C64> = eigenvalues(&phi.m)?.into_iter().map(|mu| mu.ln() / period).collect();
    ex.sort_by(|a, b| b.re.total_cmp(&a.re));
    Ok(ex)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
    /// True when the fit used local maxima of `|⟨O⟩|` rather than every sample.
    pub envelope: bool,
}

pub const MIN_R2: f64 = 0.9;

/// Least-squares fit of `log|⟨O⟩(t)| ≈ a − γ t` for `t ≥ t_0 + transient`.
///
/// Oscillating signals are fitted through their local maxima. Fits with `R² < 0.9`
/// are rejected. A typical transient is `5/gap`.
pub fn fit_decay_rate(traj: &Trajectory, observable: &Op, transient: f64) -> Result<DecayFit> {
    let values = traj.expectation(observable);
    let t0 = traj.times.first().copied().unwrap_or(0.0);
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(values.iter())
        .filter(|(t, v)| **t >= t0 + transient && v.norm() > 1e-300)
        .map(|(t, v)| (*t, v.norm()))
        .collect();
    fit_decay_points(&pts)
}

/// Same fit on raw `(t, |x|)` samples.
pub fn fit_decay_points(pts: &[(f64, f64)]) -> Result<DecayFit> {
    let peaks: Vec<(f64, f64)> = (1..pts.len().saturating_sub(1))
        .filter(|&i| pts[i].1 > pts[i - 1].1 && pts[i].1 >= pts[i + 1].1)
        .map(|i| pts[i])
        .collect();
    let (data, envelope) = if peaks.len() >= 3 { (peaks, true) } else { (pts.to_vec(), false) };
    if data.len() < 3 {
        return Err(Error::FitQuality { r2: f64::NAN });
    }
    let n = data.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(t, a) in &data {
        let y = a.ln();
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return Err(Error::FitQuality { r2: f64::NAN });
    }
    let slope = (n * sty - st * sy) / denom;
    let intercept = (sy - slope * st) / n;
    let mean = sy / n;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for &(t, a) in &data {
        let y = a.ln();
        ss_res += (y - intercept - slope * t).powi(2);
        ss_tot += (y - mean).powi(2);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 0.0 };
    if !(r2 >= MIN_R2) {
        return Err(Error::FitQuality { r2 });
    }
    Ok(DecayFit { rate: -slope, intercept, r2, points: data.len(), envelope })
}

/// Smallest eigenvalue (of the Hermitian part) and largest trace defect over the recorded states.
pub fn state_defects(traj: &Trajectory) -> (f64, f64) {
    let mut min_eig = f64::INFINITY;
    let mut tr_defect: f64 = 0.0;
    for rho in &traj.states {
        min_eig = min_eig.min(crate::linalg::min_hermitian_eigenvalue(rho));
        tr_defect = tr_defect.max((trace(rho) - 1.0).norm());
    }
    (min_eig, tr_defect)
}

/// Model without a periodic drive.
pub fn static_model(d_t: usize, d_e: usize, h: Op, channels: Vec<DissipationChannel>) -> LindbladModel {
    LindbladModel { d_t, d_e, h_static: h, periodic: None, channels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::ops::*;
    use approx::assert_relative_eq;

    #[test]
    fn excited_population_decays_exponentially() {
        let k = 0.8;
        let m = static_model(2, 1, Op::zeros(2, 2), vec![DissipationChannel::new(k, sigma_minus())]);
        let traj = integrate(&m, &projector_e(), 3.0, 1e-10).unwrap();
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            assert_relative_eq!(rho[(0, 0)].re, (-k * t).exp(), epsilon = 1e-8);
        }
    }

    #[test]
    fn rabi_oscillation() {
        let w2 = 1.3;
        let m = static_model(2, 1, sigma_x().scale(w2 / 2.0), vec![]);
        let traj = integrate(&m, &projector_g(), 10.0, 1e-10).unwrap();
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            assert_relative_eq!(rho[(0, 0)].re, (w2 * t / 2.0).sin().powi(2), epsilon = 1e-8);
        }
    }

    #[test]
    fn static_monodromy_is_exponential() {
        let w = 2.0;
        let h = sigma_x().scale(0.4) + sigma_z().scale(0.3);
        let chans = vec![DissipationChannel::new(0.5, sigma_minus())];
        let mut m = static_model(2, 1, h, chans);
        m.periodic = Some(PeriodicHamiltonian { omega: w, modes: vec![] });
        let phi = monodromy(&m).unwrap();
        let l = liouvillian_at(&m, 0.0).unwrap();
        let exact = (&l.m * c(2.0 * PI / w, 0.0)).exp();
        assert!(fro_norm(&(phi.m - exact)) < 1e-10);
    }

    #[test]
    fn splitting_agrees_with_adaptive() {
        let w = 1.0;
        let h1 = sigma_plus().scale(0.3);
        let mut m = static_model(2, 1, sigma_z().scale(0.2), vec![DissipationChannel::new(0.4, sigma_minus())]);
        m.periodic = Some(PeriodicHamiltonian { omega: w, modes: vec![(1, h1.clone()), (-1, h1.adjoint())] });
        let a = monodromy_with(&m, &MonodromyOptions { method: MonodromyMethod::Adaptive, ..Default::default() }).unwrap();
        let s = monodromy_with(
            &m,
            &MonodromyOptions { method: MonodromyMethod::Splitting { steps: 4096 }, ..Default::default() },
        )
        .unwrap();
        assert!(fro_norm(&(a.m - s.m)) < 1e-6);
    }

    #[test]
    fn non_hermitian_drive_rejected() {
        let mut m = static_model(2, 1, Op::zeros(2, 2), vec![]);
        m.periodic = Some(PeriodicHamiltonian { omega: 1.0, modes: vec![(1, sigma_plus())] });
        assert!(matches!(m.validate(), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn synthetic_decay_fit() {
        let pts: Vec<(f64, f64)> = (0..400)
            .map(|k| {
                let t = k as f64 * 0.05;
                (t, (-0.3 * t).exp())
            })
            .collect();
        let fit = fit_decay_points(&pts).unwrap();
        assert!((fit.rate - 0.3).abs() < 1e-6);
        let traj = Trajectory {
            times: (0..2000).map(|k| k as f64 * 0.01).collect(),
            states: (0..2000)
                .map(|k| {
                    let t = k as f64 * 0.01;
                    identity(2).scale(0.5) + sigma_x().scale(0.5 * (-0.3 * t).exp() * (5.0 * t).cos())
                })
                .collect(),
        };
        let fit = fit_decay_rate(&traj, &sigma_x(), 0.0).unwrap();
        assert!(fit.envelope);
        assert!((fit.rate - 0.3).abs() < 1e-3, "{}", fit.rate);
    }

    #[test]
    fn coherence_decays_at_half_rate() {
        let k = 0.6;
        let m = static_model(2, 1, sigma_z().scale(0.7), vec![DissipationChannel::new(k, sigma_minus())]);
        let rho0 = identity(2).scale(0.5) + sigma_x().scale(0.5);
        let traj = integrate(&m, &rho0, 20.0, 1e-10).unwrap();
        let fit = fit_decay_rate(&traj, &sigma_plus(), 5.0 / (k / 2.0)).unwrap();
        assert_relative_eq!(fit.rate, k / 2.0, max_relative = 1e-6);
    }

    #[test]
    fn noise_is_rejected() {
        let pts: Vec<(f64, f64)> = (0..50).map(|k| (k as f64, 1.0 + 0.5 * ((k * 7919) % 13) as f64)).collect();
        assert!(matches!(fit_decay_points(&pts), Err(Error::FitQuality { .. })));
    }
}
