//! Tuning environment dissipation rates: closed forms for a two-level environment
//! and property harnesses for rate scaling, monotonicity and strong-rate limits.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::lindblad::DissipationChannel;
use crate::linalg::{fro_norm, hermitian_eigen, Op, C64, I};
use crate::ops::{sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z, spin_ops};
use crate::random::{random_hermitian, uniform, Rand};
use crate::stationary::{second_order_eliminate, CouplingSet, EnvModel, XMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo < 0.0 || self.lo > self.hi {
            return Err(invalid(name, format!("bounds [{}, {}] must satisfy 0 ≤ lo ≤ hi", self.lo, self.hi)));
        }
        Ok(())
    }

    fn grid(&self, n: usize) -> Vec<f64> {
        if self.lo == self.hi || n < 2 {
            return vec![self.lo];
        }
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                // Exact at both ends, so boundary detection can compare with `==`.
                self.lo * (1.0 - t) + self.hi * t
            })
            .collect()
    }
}

/// One admissible setting of the tunable two-level environment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvRates {
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub kappa_z: f64,
    pub kappa1: f64,
    pub n_th: f64,
}

impl EnvRates {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa_x", self.kappa_x),
            ("kappa_y", self.kappa_y),
            ("kappa_z", self.kappa_z),
            ("kappa1", self.kappa1),
            ("n_th", self.n_th),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} must be finite and non-negative")));
            }
        }
        Ok(())
    }

    pub fn channels(&self) -> Vec<DissipationChannel> {
        vec![
            DissipationChannel::new(self.kappa_x, sigma_x()),
            DissipationChannel::new(self.kappa_y, sigma_y()),
            DissipationChannel::new(self.kappa_z, sigma_z()),
            DissipationChannel::new(self.kappa1 * (1.0 + self.n_th), sigma_minus()),
            DissipationChannel::new(self.kappa1 * self.n_th, sigma_plus()),
        ]
    }

    pub fn env(&self, h: Op) -> EnvModel {
        EnvModel::new(h, self.channels())
    }

    /// Stationary `⟨σ_z⟩` of the channels alone (and under `H_E ∝ σ_z`).
    pub fn z_bar(&self) -> f64 {
        let den = (1.0 + 2.0 * self.n_th) * self.kappa1 + 2.0 * (self.kappa_x + self.kappa_y);
        if den > 0.0 { -self.kappa1 / den } else { 0.0 }
    }
}

/// Box of admissible rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunableEnvChannels {
    pub kappa_x: Bounds,
    pub kappa_y: Bounds,
    pub kappa_z: Bounds,
    pub kappa1: Bounds,
    pub n_th: Bounds,
}

impl TunableEnvChannels {
    pub fn validate(&self) -> Result<()> {
        self.kappa_x.validate("kappa_x")?;
        self.kappa_y.validate("kappa_y")?;
        self.kappa_z.validate("kappa_z")?;
        self.kappa1.validate("kappa1")?;
        self.n_th.validate("n_th")
    }

    pub fn contains(&self, r: &EnvRates) -> bool {
        let inside = |b: &Bounds, v: f64| v >= b.lo && v <= b.hi;
        inside(&self.kappa_x, r.kappa_x)
            && inside(&self.kappa_y, r.kappa_y)
            && inside(&self.kappa_z, r.kappa_z)
            && inside(&self.kappa1, r.kappa1)
            && inside(&self.n_th, r.n_th)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveScenario {
    pub c_minus: f64,
    pub c_plus: f64,
    pub n_eff: f64,
}

impl DispersiveScenario {
    pub fn new(r: &EnvRates) -> Self {
        let s = r.kappa_x + r.kappa_y;
        Self {
            c_minus: (1.0 + r.n_th) * r.kappa1 + s,
            c_plus: r.n_th * r.kappa1 + s,
            n_eff: if r.kappa1 > 0.0 { r.n_th + s / r.kappa1 } else { f64::INFINITY },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonantScenario {
    pub delta: f64,
    pub c_x: f64,
    pub c_y: f64,
    pub z_bar: f64,
}

impl ResonantScenario {
    pub fn new(r: &EnvRates, delta: f64) -> Self {
        let th = (1.0 + 2.0 * r.n_th) * r.kappa1 / 4.0;
        Self {
            delta,
            c_x: r.kappa_y + r.kappa_z + th,
            c_y: r.kappa_x + r.kappa_z + th,
            z_bar: r.z_bar(),
        }
    }
}

/// Induced `T_z` rate per unit `g²` under `T_z ⊗ σ_z` coupling.
pub fn dispersive_x(s: &DispersiveScenario) -> f64 {
    let sum = s.c_plus + s.c_minus;
    4.0 * s.c_plus * s.c_minus / sum.powi(3)
}

/// Induced dissipation matrix on `(T_x, T_y)` per unit `g²` under `T_x⊗σ_x + T_y⊗σ_y` coupling.
pub fn resonant_x(s: &ResonantScenario) -> XMatrix {
    let den = s.delta * s.delta / 4.0 + s.c_x * s.c_y;
    let off = I * (s.z_bar * (s.c_x + s.c_y) / 2.0);
    let m = DMatrix::from_row_slice(2, 2, &[C64::from(s.c_y), off, -off, C64::from(s.c_x)]);
    XMatrix { m: m / C64::from(den) }
}

/// Dispersive instance for the generic elimination: `H_E = 0`, `g = 1`, `T_z = σ_z/2`.
pub fn dispersive_instance(r: &EnvRates) -> (EnvModel, CouplingSet) {
    let (_, _, tz) = spin_ops(2);
    (r.env(Op::zeros(2, 2)), CouplingSet::new(1.0, vec![(tz, sigma_z())]))
}

/// Resonant instance: `H_E = (Δ/2)σ_z`, `g = 1`, coupling `T_x⊗σ_x + T_y⊗σ_y`.
pub fn resonant_instance(r: &EnvRates, delta: f64) -> (EnvModel, CouplingSet) {
    let (tx, ty, _) = spin_ops(2);
    (r.env(sigma_z().scale(delta / 2.0)), CouplingSet::new(1.0, vec![(tx, sigma_x()), (ty, sigma_y())]))
}

fn rel_defect(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let scale = fro_norm(b).max(fro_norm(a));
    if scale == 0.0 { 0.0 } else { fro_norm(&(a - b)) / scale }
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop1Report {
    pub alpha: f64,
    /// `X` of the unscaled instance.
    pub x: Vec<Vec<[f64; 2]>>,
    /// `X` with rates and `H_E` scaled by `α`.
    pub x_scaled: Vec<Vec<[f64; 2]>>,
    /// Relative defect of `X_scaled = X/α`.
    pub exact_defect: f64,
    /// Relative defect of `X/α` when only the rates are scaled.
    pub fixed_h_defect: f64,
    /// `‖H_E‖₂ / gap` of the unscaled environment.
    pub fixed_h_scale: f64,
    pub exact_pass: bool,
    pub fixed_h_within_scale: bool,
}

pub const PROP1_TOL: f64 = 1e-12;

fn as_pairs(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn prop1_scaling_check(env: &EnvModel, coupling: &CouplingSet, alpha: f64) -> Result<Prop1Report> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(invalid("alpha", format!("{alpha} must exceed 1")));
    }
    let base = second_order_eliminate(env, coupling)?;
    let scaled = second_order_eliminate(&env.scaled(alpha), coupling)?;
    let rates_only = EnvModel::new(env.h.clone(), env.scaled(alpha).channels);
    let fixed = second_order_eliminate(&rates_only, coupling)?;
    let expect = &base.x.m / C64::from(alpha);
    let exact_defect = rel_defect(&scaled.x.m, &expect);
    let fixed_h_defect = rel_defect(&fixed.x.m, &expect);
    let h_norm = hermitian_eigen(&env.h).0.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let fixed_h_scale = h_norm / base.gap;
    Ok(Prop1Report {
        alpha,
        x: as_pairs(&base.x.m),
        x_scaled: as_pairs(&scaled.x.m),
        exact_defect,
        fixed_h_defect,
        fixed_h_scale,
        exact_pass: exact_defect <= PROP1_TOL,
        fixed_h_within_scale: fixed_h_defect <= fixed_h_scale.max(PROP1_TOL),
    })
}

/// Random instance with Hermitian environment channels and `H_E = 0`.
#[derive(Clone, Debug)]
pub struct HermitianInstance {
    pub channels: Vec<Op>,
    pub rates: Vec<f64>,
    pub coupling: CouplingSet,
}

impl HermitianInstance {
    pub fn env(&self, rates: &[f64]) -> EnvModel {
        let d = self.channels[0].nrows();
        EnvModel::new(
            Op::zeros(d, d),
            self.channels.iter().zip(rates).map(|(l, k)| DissipationChannel::new(*k, l.clone())).collect(),
        )
    }
}

/// Required separation `gap / (g‖E‖)` for the monotonicity samples.
pub const PROP2_GAP_RATIO: f64 = 10.0;

pub fn random_hermitian_instance(r: &mut Rand, d_t: usize, d_e: usize, n_channels: usize, n_terms: usize) -> Result<HermitianInstance> {
    let channels: Vec<Op> = (0..n_channels).map(|_| random_hermitian(r, d_e)).collect();
    let rates: Vec<f64> = (0..n_channels).map(|_| uniform(r, 0.2, 2.0)).collect();
    let terms: Vec<(Op, Op)> = (0..n_terms).map(|_| (random_hermitian(r, d_t), random_hermitian(r, d_e))).collect();
    let mut inst = HermitianInstance { channels, rates, coupling: CouplingSet::new(1.0, terms) };
    let el = second_order_eliminate(&inst.env(&inst.rates), &inst.coupling)?;
    let e_norm = inst
        .coupling
        .terms
        .iter()
        .map(|(_, e)| hermitian_eigen(e).0.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
        .fold(0.0, f64::max);
    inst.coupling.g = el.gap / (PROP2_GAP_RATIO * e_norm);
    Ok(inst)
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop2Report {
    pub samples: usize,
    pub violations: usize,
    /// Largest relative increase of a diagonal element of `X` (negative when all decrease).
    pub worst_increase: f64,
}

/// Raising any single Hermitian rate must not increase any diagonal element of `X`.
pub fn prop2_monotonicity_check(inst: &HermitianInstance, channel: usize, factor: f64) -> Result<f64> {
    if channel >= inst.rates.len() || !(factor > 1.0) {
        return Err(invalid("channel", "index out of range or factor ≤ 1"));
    }
    let x0 = second_order_eliminate(&inst.env(&inst.rates), &inst.coupling)?.x;
    let mut raised = inst.rates.clone();
    raised[channel] *= factor;
    let x1 = second_order_eliminate(&inst.env(&raised), &inst.coupling)?.x;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..x0.m.nrows() {
        let (a, b) = (x0.m[(k, k)].re, x1.m[(k, k)].re);
        worst = worst.max((b - a) / a.abs().max(1e-300));
    }
    Ok(worst)
}

/// Tolerance on relative increases attributed to rounding.
pub const PROP2_TOL: f64 = 1e-10;

/// Worst relative diagonal increase of instance `index` of the seeded suite.
pub fn prop2_sample(seed: u64, index: u64) -> Result<f64> {
    let mut r = crate::random::instance_rng(seed, "prop2", index);
    let d_e = 2 + (index % 2) as usize;
    let inst = random_hermitian_instance(&mut r, 2, d_e, 3, 2)?;
    let channel = index as usize % inst.rates.len();
    let factor = uniform(&mut r, 1.1, 4.0);
    prop2_monotonicity_check(&inst, channel, factor)
}

pub fn prop2_suite(seed: u64, samples: usize, mode: ExecMode) -> Result<Prop2Report> {
    let results = map_indexed(mode, samples, |i| prop2_sample(seed, i as u64));
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for res in results {
        let w = res?;
        worst = worst.max(w);
        if w > PROP2_TOL {
            violations += 1;
        }
    }
    Ok(Prop2Report { samples, violations, worst_increase: worst })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LimitClass {
    Vanishing,
    Finite,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop3Report {
    pub delta: Vec<f64>,
    pub x_norm: Vec<f64>,
    /// Log-log slope of `‖X‖` against `δ` over the smaller half of the grid.
    pub slope: Option<f64>,
    /// `max/min` of `‖X‖` over the same points.
    pub spread: Option<f64>,
    pub class: LimitClass,
}

/// Slope separating vanishing from finite limits.
pub const PROP3_SLOPE_SPLIT: f64 = 0.5;
/// Accepted distance of a vanishing slope from 1.
pub const PROP3_SLOPE_TOL: f64 = 0.3;
/// Largest `max/min` ratio accepted as a plateau.
pub const PROP3_PLATEAU: f64 = 1.2;
/// `‖X‖` below this counts as identically zero.
pub const PROP3_ZERO: f64 = 1e-14;

/// Scans `‖X‖` while the `b` channels are multiplied by `1/δ`.
pub fn prop3_limit_scan(
    env_a: &EnvModel,
    env_b_channels: &[DissipationChannel],
    coupling: &CouplingSet,
    delta_grid: &[f64],
) -> Result<Prop3Report> {
    if delta_grid.len() < 3 {
        return Err(invalid("delta_grid", "needs at least 3 points"));
    }
    if delta_grid.windows(2).any(|w| !(w[1] < w[0])) || delta_grid.iter().any(|d| !(*d > 0.0)) {
        return Err(invalid("delta_grid", "must be positive and strictly decreasing"));
    }
    let mut x_norm = Vec::with_capacity(delta_grid.len());
    for &d in delta_grid {
        let mut channels = env_a.channels.clone();
        channels.extend(env_b_channels.iter().map(|ch| DissipationChannel::new(ch.rate / d, ch.op.clone())));
        let env = EnvModel::new(env_a.h.clone(), channels);
        x_norm.push(second_order_eliminate(&env, coupling)?.x.norm());
    }
    let tail = delta_grid.len() / 2;
    let (ds, xs) = (&delta_grid[tail..], &x_norm[tail..]);
    let scale = x_norm.iter().fold(0.0_f64, |a, b| a.max(*b));
    if scale <= PROP3_ZERO {
        return Ok(Prop3Report { delta: delta_grid.to_vec(), x_norm, slope: None, spread: None, class: LimitClass::Vanishing });
    }
    let spread = xs.iter().fold(0.0_f64, |a, b| a.max(*b)) / xs.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    let slope = if xs.iter().all(|x| *x > 0.0) {
        let pts: Vec<(f64, f64)> = ds.iter().zip(xs).map(|(d, x)| (d.ln(), x.ln())).collect();
        Some(ls_slope(&pts))
    } else {
        None
    };
    let class = match slope {
        Some(s) if s > PROP3_SLOPE_SPLIT && (s - 1.0).abs() <= PROP3_SLOPE_TOL => LimitClass::Vanishing,
        Some(s) if s <= PROP3_SLOPE_SPLIT && spread <= PROP3_PLATEAU => LimitClass::Finite,
        _ => LimitClass::Inconclusive,
    };
    Ok(Prop3Report { delta: delta_grid.to_vec(), x_norm, slope, spread: Some(spread), class })
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
    num / den
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scenario {
    Dispersive,
    Resonant { delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "kebab-case")]
pub enum Objective {
    Trace,
    MaxEigenvalue,
    /// Diagonal element of `X` for one coupling operator.
    SpecificChannel(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub rates: EnvRates,
    /// `NaN` where the closed form is undefined (no dissipation at all).
    pub objective: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrontierScan {
    pub points: Vec<FrontierPoint>,
    pub argmin: Option<usize>,
    pub argmax: Option<usize>,
    /// Per axis `(κ_x, κ_y, κ_z, κ₁, n_th)`: is the minimizer at a bound.
    pub argmin_on_boundary: [bool; 5],
    pub argmax_on_boundary: [bool; 5],
}

pub fn scenario_objective(rates: &EnvRates, scenario: Scenario, objective: Objective) -> Result<f64> {
    match scenario {
        Scenario::Dispersive => {
            let s = DispersiveScenario::new(rates);
            if s.c_plus + s.c_minus <= 0.0 {
                return Ok(f64::NAN);
            }
            match objective {
                Objective::Trace | Objective::MaxEigenvalue | Objective::SpecificChannel(0) => Ok(dispersive_x(&s)),
                Objective::SpecificChannel(k) => Err(invalid("objective", format!("channel {k} out of range for one coupling term"))),
            }
        }
        Scenario::Resonant { delta } => {
            let s = ResonantScenario::new(rates, delta);
            if s.delta * s.delta / 4.0 + s.c_x * s.c_y <= 0.0 {
                return Ok(f64::NAN);
            }
            let x = resonant_x(&s);
            match objective {
                Objective::Trace => Ok(x.m.trace().re),
                Objective::MaxEigenvalue => Ok(x.max_eigenvalue()),
                Objective::SpecificChannel(k) if k < 2 => Ok(x.m[(k, k)].re),
                Objective::SpecificChannel(k) => Err(invalid("objective", format!("channel {k} out of range for two coupling terms"))),
            }
        }
    }
}

/// Grid scan of the objective over the admissible box; `resolution` points per non-degenerate axis.
pub fn rate_frontier_scan(
    bounds: &TunableEnvChannels,
    scenario: Scenario,
    objective: Objective,
    resolution: usize,
    mode: ExecMode,
) -> Result<FrontierScan> {
    bounds.validate()?;
    if resolution == 0 {
        return Err(invalid("resolution", "must be positive"));
    }
    let axes = [
        bounds.kappa_x.grid(resolution),
        bounds.kappa_y.grid(resolution),
        bounds.kappa_z.grid(resolution),
        bounds.kappa1.grid(resolution),
        bounds.n_th.grid(resolution),
    ];
    let total: usize = axes.iter().map(|a| a.len()).product();
    let point = |mut idx: usize| {
        let mut v = [0.0; 5];
        for (k, axis) in axes.iter().enumerate().rev() {
            v[k] = axis[idx % axis.len()];
            idx /= axis.len();
        }
        EnvRates { kappa_x: v[0], kappa_y: v[1], kappa_z: v[2], kappa1: v[3], n_th: v[4] }
    };
    let evaluated = map_indexed(mode, total, |i| {
        let rates = point(i);
        scenario_objective(&rates, scenario, objective).map(|objective| FrontierPoint { rates, objective })
    });
    let points = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
    let pick = |better: fn(f64, f64) -> bool| {
        let mut best: Option<usize> = None;
        for (i, p) in points.iter().enumerate() {
            if p.objective.is_nan() {
                continue;
            }
            if best.is_none_or(|b| better(p.objective, points[b].objective)) {
                best = Some(i);
            }
        }
        best
    };
    let argmin = pick(|a, b| a < b);
    let argmax = pick(|a, b| a > b);
    let boundary = |i: Option<usize>| {
        let mut flags = [false; 5];
        if let Some(i) = i {
            let r = points[i].rates;
            let vals = [r.kappa_x, r.kappa_y, r.kappa_z, r.kappa1, r.n_th];
            let bs = [bounds.kappa_x, bounds.kappa_y, bounds.kappa_z, bounds.kappa1, bounds.n_th];
            for k in 0..5 {
                flags[k] = vals[k] == bs[k].lo || vals[k] == bs[k].hi;
            }
        }
        flags
    };
    Ok(FrontierScan {
        argmin_on_boundary: boundary(argmin),
        argmax_on_boundary: boundary(argmax),
        points,
        argmin,
        argmax,
    })
}

/// Relative mismatch between a closed form and the generic elimination.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClosedFormCheck {
    pub closed_form: f64,
    pub pipeline: f64,
    pub rel_error: f64,
}

pub fn dispersive_check(r: &EnvRates) -> Result<ClosedFormCheck> {
    let (env, cs) = dispersive_instance(r);
    let x = second_order_eliminate(&env, &cs)?.x.m[(0, 0)].re;
    let cf = dispersive_x(&DispersiveScenario::new(r));
    let rel_error = if x == 0.0 && cf == 0.0 { 0.0 } else { (cf - x).abs() / x.abs().max(cf.abs()) };
    Ok(ClosedFormCheck { closed_form: cf, pipeline: x, rel_error })
}

pub fn resonant_check(r: &EnvRates, delta: f64) -> Result<f64> {
    let (env, cs) = resonant_instance(r, delta);
    let x = second_order_eliminate(&env, &cs)?.x;
    let cf = resonant_x(&ResonantScenario::new(r, delta));
    Ok(rel_defect(&cf.m, &x.m))
}

/// Random rates drawn uniformly from a fixed box with strictly positive relaxation.
pub fn random_env_rates(r: &mut Rand) -> EnvRates {
    EnvRates {
        kappa_x: uniform(r, 0.0, 2.0),
        kappa_y: uniform(r, 0.0, 2.0),
        kappa_z: uniform(r, 0.0, 2.0),
        kappa1: uniform(r, 0.1, 3.0),
        n_th: uniform(r, 0.0, 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rates() -> EnvRates {
        EnvRates { kappa_x: 0.3, kappa_y: 0.5, kappa_z: 0.2, kappa1: 1.1, n_th: 0.4 }
    }

    #[test]
    fn dispersive_zero_at_zero_temperature() {
        let r = EnvRates { kappa_x: 0.0, kappa_y: 0.0, kappa_z: 0.7, kappa1: 1.0, n_th: 0.0 };
        assert_eq!(dispersive_x(&DispersiveScenario::new(&r)), 0.0);
    }

    #[test]
    fn dispersive_symmetric_in_x_and_y() {
        let a = rates();
        let b = EnvRates { kappa_x: a.kappa_y, kappa_y: a.kappa_x, ..a };
        assert_eq!(dispersive_x(&DispersiveScenario::new(&a)), dispersive_x(&DispersiveScenario::new(&b)));
    }

    #[test]
    fn resonant_matches_pipeline() {
        assert!(resonant_check(&rates(), 0.8).unwrap() < 1e-12);
    }

    #[test]
    fn resonant_large_detuning_decays() {
        let r = rates();
        let a = resonant_x(&ResonantScenario::new(&r, 1e3)).norm();
        let b = resonant_x(&ResonantScenario::new(&r, 1e4)).norm();
        assert_relative_eq!(a / b, 100.0, max_relative = 1e-4);
    }

    #[test]
    fn prop1_exact_halving_without_hamiltonian() {
        let (env, cs) = dispersive_instance(&rates());
        let rep = prop1_scaling_check(&env, &cs, 2.0).unwrap();
        assert!(rep.exact_pass, "{}", rep.exact_defect);
        assert!(rep.fixed_h_defect < 1e-12);
    }

    #[test]
    fn frontier_single_point() {
        let r = rates();
        let b = TunableEnvChannels {
            kappa_x: Bounds::point(r.kappa_x),
            kappa_y: Bounds::point(r.kappa_y),
            kappa_z: Bounds::point(r.kappa_z),
            kappa1: Bounds::point(r.kappa1),
            n_th: Bounds::point(r.n_th),
        };
        let scan = rate_frontier_scan(&b, Scenario::Dispersive, Objective::Trace, 7, ExecMode::Sequential).unwrap();
        assert_eq!(scan.points.len(), 1);
        assert_eq!(scan.points[0].rates, r);
        assert_eq!(scan.argmin, Some(0));
    }
}
