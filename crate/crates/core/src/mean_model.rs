//! The two-parameter mean model of the ReLU network.
//!
//! Replacing each sum of ReLUs by its Gaussian expectation d·g(b) leaves
//! the dynamics of A = d(a⁻ + a⁺) and the bias b. Below η = 8π/d² the bias
//! barely moves; above it, A oscillates and drives b to a strictly negative
//! limit.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::losses::{loss_deriv, LossKind, LossSpec};
use crate::numerics::{adaptive_quadrature, std_normal_cdf, std_normal_pdf};
use crate::single_neuron::Record;

const OVERFLOW: f64 = 1e300;

/// g(b) = E ReLU(z + b) for z ~ N(0, 1), which equals φ(b) + bΦ(b).
#[inline]
pub fn smoothed_relu(b: f64) -> f64 {
    std_normal_pdf(b) + b * std_normal_cdf(b)
}

/// g′(b) = Φ(b).
#[inline]
pub fn smoothed_relu_deriv(b: f64) -> f64 {
    std_normal_cdf(b)
}

/// The b with g(b) = v, by bisection to 1e-13.
pub fn smoothed_relu_inverse(v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::NonPositiveTarget(v));
    }
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!("target {v} is not finite")));
    }
    // g(b) > max(b, 0), so v + 1 is above the root.
    let mut hi = v + 1.0;
    let mut lo = -1.0;
    while smoothed_relu(lo) >= v {
        lo *= 2.0;
        if lo < -1e3 {
            return Err(Error::InvalidInput(format!("target {v} is below the range of g")));
        }
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if smoothed_relu(mid) < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[inline]
fn kappa_integrand(u: f64) -> f64 {
    smoothed_relu(u) / std_normal_cdf(u)
}

/// κ(b) = ∫₀ᵇ g/g′ by adaptive quadrature (tolerance 1e-12).
pub fn kappa(b: f64) -> Result<f64> {
    if !(-10.0..=10.0).contains(&b) {
        return Err(Error::InvalidInput(format!("kappa is tabulated for b in [-10, 10], got {b}")));
    }
    adaptive_quadrature(kappa_integrand, 0.0, b, 1e-12)
}

const TABLE_LO: f64 = -10.0;
const TABLE_STEP: f64 = 1e-3;
const TABLE_CELLS: usize = 10_000;

struct KappaTable {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

fn kappa_table() -> &'static KappaTable {
    static TABLE: OnceLock<KappaTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let node = |i: usize| TABLE_LO + i as f64 * TABLE_STEP;
        let mut values = vec![0.0; TABLE_CELLS + 1];
        // Integrate cell by cell from b = 0 down to the left end.
        for i in (0..TABLE_CELLS).rev() {
            let cell = adaptive_quadrature(kappa_integrand, node(i + 1), node(i), 1e-15)
                .expect("kappa integrand is smooth on the table range");
            values[i] = values[i + 1] + cell;
        }
        let slopes = (0..=TABLE_CELLS).map(|i| kappa_integrand(node(i))).collect();
        KappaTable { values, slopes }
    })
}

/// κ(b) from the memoized table on [−10, 0] (cubic Hermite with exact
/// slopes, error well below 1e-9); falls back to [`kappa`] elsewhere.
pub fn kappa_interp(b: f64) -> Result<f64> {
    if !(TABLE_LO..=0.0).contains(&b) {
        return kappa(b);
    }
    let t = kappa_table();
    let pos = (b - TABLE_LO) / TABLE_STEP;
    let i = (pos.floor() as usize).min(TABLE_CELLS - 1);
    let u = pos - i as f64;
    let h = TABLE_STEP;
    let (p0, p1) = (t.values[i], t.values[i + 1]);
    let (m0, m1) = (t.slopes[i] * h, t.slopes[i + 1] * h);
    let u2 = u * u;
    let u3 = u2 * u;
    Ok((2.0 * u3 - 3.0 * u2 + 1.0) * p0 + (u3 - 2.0 * u2 + u) * m0 + (-2.0 * u3 + 3.0 * u2) * p1 + (u3 - u2) * m1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanModelState {
    /// A = d(a⁻ + a⁺).
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanModelConfig {
    pub d: usize,
    pub eta: f64,
    pub loss: LossSpec,
    pub a0: f64,
    /// Zero in the analysed setting; other values run but sit outside it.
    pub b0: f64,
}

impl MeanModelConfig {
    pub fn new(d: usize, eta: f64, a0: f64) -> Self {
        Self { d, eta, loss: LossSpec::sym_logistic(), a0, b0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.loss.kind != LossKind::SymLogistic {
            return Err(Error::InvalidInput("the mean model uses the sym-logistic loss".into()));
        }
        if self.d == 0 || !(self.eta > 0.0) || !self.a0.is_finite() || !self.b0.is_finite() {
            return Err(Error::InvalidInput(format!("invalid mean-model config {self:?}")));
        }
        Ok(())
    }

    /// η* = 8π/d².
    pub fn threshold(&self) -> f64 {
        threshold_eta(self.d)
    }

    pub fn eta_ratio(&self) -> f64 {
        self.eta / self.threshold()
    }

    fn d2(&self) -> f64 {
        (self.d as f64) * (self.d as f64)
    }
}

/// 8π/d².
pub fn threshold_eta(d: usize) -> f64 {
    8.0 * PI / (d as f64 * d as f64)
}

/// One simultaneous GD step of the mean model.
#[inline]
pub fn mm_step(state: MeanModelState, cfg: &MeanModelConfig) -> Result<MeanModelState> {
    let g = smoothed_relu(state.b);
    let lp = loss_deriv(&cfg.loss, state.a * g);
    let next = MeanModelState {
        a: state.a - 2.0 * cfg.d2() * cfg.eta * lp * g,
        b: state.b - cfg.eta * lp * state.a * smoothed_relu_deriv(state.b),
    };
    if !(next.a.abs() <= OVERFLOW && next.b.abs() <= OVERFLOW) {
        return Err(Error::NumericOverflow { iter: 0 });
    }
    Ok(next)
}

/// ½A² − 2d²κ(b), conserved by the mean-model gradient flow.
pub fn mm_conserved(state: MeanModelState, cfg: &MeanModelConfig) -> Result<f64> {
    Ok(0.5 * state.a * state.a - 2.0 * cfg.d2() * kappa_interp(state.b)?)
}

/// ½d²g(b)², the sharpness at a global minimizer with bias b.
pub fn mm_minimizer_sharpness(b: f64, d: usize) -> f64 {
    let g = smoothed_relu(b);
    0.5 * (d as f64) * (d as f64) * g * g
}

/// γ = min{δ, 8 − δ, (8 − δ)/|A0|}/200 for η = (8 − δ)π/d²; `None` unless
/// δ ∈ (0, 8).
pub fn gf_gamma(d: usize, eta: f64, a0: f64) -> Option<f64> {
    let delta = 8.0 - eta * (d as f64) * (d as f64) / PI;
    if !(delta > 0.0 && delta < 8.0) {
        return None;
    }
    let mut m = delta.min(8.0 - delta);
    if a0 != 0.0 {
        m = m.min((8.0 - delta) / a0.abs());
    }
    Some(m / 200.0)
}

/// g⁻¹(2/√(ηd²)), the bias below which ½d²g(b)² ≤ 2/η.
pub fn eos_bias_bound(d: usize, eta: f64) -> Result<f64> {
    smoothed_relu_inverse(2.0 / (eta * (d as f64) * (d as f64)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MmStopRule {
    pub tol_a: f64,
    pub max_iters: usize,
    /// Stop when b moved by at most `b_rel_tol·|b|` over `b_window` steps.
    pub b_window: usize,
    pub b_rel_tol: f64,
    pub record: Record,
}

impl Default for MmStopRule {
    fn default() -> Self {
        Self { tol_a: 1e-12, max_iters: 10_000_000, b_window: 10_000, b_rel_tol: 1e-15, record: Record::All }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MmOutcome {
    Converged,
    BiasStalled,
    MaxItersExceeded,
    HitAxisExactly,
}

#[derive(Clone, Debug)]
pub struct MeanModelTrajectory {
    pub cfg: MeanModelConfig,
    pub iters: Vec<usize>,
    pub states: Vec<MeanModelState>,
    /// ½d²g(b_t)² per recorded row.
    pub sharp_proxy: Vec<f64>,
    /// First t with ½d²g(b_t)² < 2/η.
    pub crossing_iter: Option<usize>,
    pub b_inf: f64,
    pub final_iter: usize,
    pub outcome: MmOutcome,
    /// Longest run of consecutive sign flips of A.
    pub max_sign_alternations: usize,
    pub gamma: Option<f64>,
}

impl MeanModelTrajectory {
    pub fn final_state(&self) -> MeanModelState {
        *self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn status(&self) -> Result<()> {
        match self.outcome {
            MmOutcome::MaxItersExceeded => Err(Error::MaxItersExceeded(self.final_iter)),
            MmOutcome::HitAxisExactly => Err(Error::HitAxisExactly(self.final_iter)),
            _ => Ok(()),
        }
    }
}

/// Iterate [`mm_step`] from (A0, b0) until |A| or the bias settles.
pub fn mm_run(cfg: &MeanModelConfig, stop: MmStopRule) -> Result<MeanModelTrajectory> {
    cfg.validate()?;
    let limit = 2.0 / cfg.eta;
    let window = stop.b_window.max(1);
    let mut history = vec![cfg.b0; window];
    let mut state = MeanModelState { a: cfg.a0, b: cfg.b0 };
    let mut t = 0usize;
    let mut iters = Vec::new();
    let mut states = Vec::new();
    let mut sharp_proxy = Vec::new();
    let mut crossing_iter = None;
    let mut run_len = 0usize;
    let mut max_run = 0usize;

    let wants = |t: usize| match stop.record {
        Record::All => true,
        Record::Every(k) => t.is_multiple_of(k.max(1)),
        Record::Ends => t == 0,
    };

    let outcome = loop {
        let proxy = mm_minimizer_sharpness(state.b, cfg.d);
        if crossing_iter.is_none() && proxy < limit {
            crossing_iter = Some(t);
        }
        if wants(t) {
            iters.push(t);
            states.push(state);
            sharp_proxy.push(proxy);
        }
        if t > 0 && state.a == 0.0 && proxy > limit {
            break MmOutcome::HitAxisExactly;
        }
        if state.a.abs() < stop.tol_a {
            break MmOutcome::Converged;
        }
        let slot = t % window;
        if t >= window && (state.b - history[slot]).abs() <= stop.b_rel_tol * state.b.abs() {
            break MmOutcome::BiasStalled;
        }
        history[slot] = state.b;
        if t >= stop.max_iters {
            break MmOutcome::MaxItersExceeded;
        }
        let next = mm_step(state, cfg).map_err(|_| Error::NumericOverflow { iter: t + 1 })?;
        if next.a * state.a < 0.0 {
            run_len += 1;
            max_run = max_run.max(run_len);
        } else {
            run_len = 0;
        }
        state = next;
        t += 1;
    };

    if iters.last() != Some(&t) {
        iters.push(t);
        states.push(state);
        sharp_proxy.push(mm_minimizer_sharpness(state.b, cfg.d));
    }

    Ok(MeanModelTrajectory {
        cfg: *cfg,
        iters,
        states,
        sharp_proxy,
        crossing_iter,
        b_inf: state.b,
        final_iter: t,
        outcome,
        max_sign_alternations: max_run,
        gamma: gf_gamma(cfg.d, cfg.eta, cfg.a0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MmRegime {
    SmallBias,
    ThresholdNeuron,
    Indeterminate,
}

impl MmRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            MmRegime::SmallBias => "small-bias",
            MmRegime::ThresholdNeuron => "threshold-neuron",
            MmRegime::Indeterminate => "indeterminate",
        }
    }
}

/// Label a limiting bias.
///
/// Above the threshold, `b∞ ≤ g⁻¹(2/√(ηd²))` (plus 1e-9) is a threshold
/// neuron. Below it, |b∞| ≤ K/d² with K = |A0|ηd²/γ is small bias.
pub fn classify_bias(d: usize, eta: f64, a0: f64, b_inf: f64) -> Result<MmRegime> {
    if eta > threshold_eta(d) && b_inf <= eos_bias_bound(d, eta)? + 1e-9 {
        return Ok(MmRegime::ThresholdNeuron);
    }
    if let Some(gamma) = gf_gamma(d, eta, a0) {
        if b_inf.abs() <= a0.abs() * eta / gamma {
            return Ok(MmRegime::SmallBias);
        }
    }
    Ok(MmRegime::Indeterminate)
}

#[derive(Clone, Debug, Serialize)]
pub struct PhasePoint {
    pub eta: f64,
    pub eta_over_threshold: f64,
    pub b_inf: f64,
    pub regime: MmRegime,
    pub gamma: Option<f64>,
    pub iterations: usize,
    pub outcome: MmOutcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseSweep {
    pub d: usize,
    pub a0: f64,
    pub threshold: f64,
    pub points: Vec<PhasePoint>,
    /// First grid η labelled a threshold neuron.
    pub regime_transition: Option<f64>,
}

impl PhaseSweep {
    /// First grid η whose limiting bias is at most `cutoff`.
    pub fn first_eta_below(&self, cutoff: f64) -> Option<f64> {
        self.points.iter().find(|p| p.b_inf <= cutoff).map(|p| p.eta)
    }
}

/// One point of [`phase_transition_sweep`].
pub fn phase_point(d: usize, a0: f64, eta: f64, stop: MmStopRule) -> Result<PhasePoint> {
    let cfg = MeanModelConfig::new(d, eta, a0);
    let traj = mm_run(&cfg, MmStopRule { record: Record::Ends, ..stop })?;
    Ok(PhasePoint {
        eta,
        eta_over_threshold: cfg.eta_ratio(),
        b_inf: traj.b_inf,
        regime: classify_bias(d, eta, a0, traj.b_inf)?,
        gamma: traj.gamma,
        iterations: traj.final_iter,
        outcome: traj.outcome,
    })
}

/// Limiting bias across an η grid (sorted ascending before running).
pub fn phase_transition_sweep(d: usize, a0: f64, eta_grid: &[f64]) -> Result<PhaseSweep> {
    let mut grid = eta_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let points = grid.iter().map(|&eta| phase_point(d, a0, eta, MmStopRule::default())).collect::<Result<Vec<_>>>()?;
    Ok(assemble_sweep(d, a0, points))
}

pub(crate) fn assemble_sweep(d: usize, a0: f64, points: Vec<PhasePoint>) -> PhaseSweep {
    let regime_transition = points.iter().find(|p| p.regime == MmRegime::ThresholdNeuron).map(|p| p.eta);
    PhaseSweep { d, a0, threshold: threshold_eta(d), points, regime_transition }
}
