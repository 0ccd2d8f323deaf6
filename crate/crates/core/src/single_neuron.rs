//! Gradient descent on f(x, y) = ℓ(xy).
//!
//! Above the threshold y² > 2/η the iterates bounce: x flips sign while y
//! shrinks until η y² drops below 2. The limiting sharpness then sits just
//! under 2/η, with a gap of order η^{1/(β−1)}.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::losses::{loss_deriv, loss_second_deriv, ratio_r, LossSpec};
use crate::numerics::sym_eig_max;

const OVERFLOW: f64 = 1e300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct State2D {
    pub x: f64,
    pub y: f64,
}

impl State2D {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepDiag {
    pub s: f64,
    pub r: f64,
    /// y² − x².
    pub d: f64,
    /// η y² − 2.
    pub delta: f64,
    /// 2 − η y².
    pub rho: f64,
    /// ℓ″(0) y², the sharpness if x were zero.
    pub sharp_if_converged: f64,
}

impl StepDiag {
    pub fn of(state: State2D, loss: &LossSpec, eta: f64) -> Self {
        let s = state.x * state.y;
        let y2 = state.y * state.y;
        let delta = eta * y2 - 2.0;
        Self {
            s,
            r: ratio_r(loss, s),
            d: y2 - state.x * state.x,
            delta,
            rho: -delta,
            sharp_if_converged: loss.second_deriv_at_zero * y2,
        }
    }
}

/// Diagnostic phase labels. These are this crate's definitions, not sharp
/// notions from the analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    GradientFlowLike,
    Bouncing,
    Converging,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::GradientFlowLike => "gradient-flow-like",
            Phase::Bouncing => "bouncing",
            Phase::Converging => "converging",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    GradientFlow,
    EdgeOfStability,
}

/// Which iterates a run keeps in memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Record {
    All,
    /// Every k-th iterate plus the last one.
    Every(usize),
    /// Only the initial and final iterates.
    Ends,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    /// Stop once |x| falls below this.
    pub tol_x: f64,
    pub max_iters: usize,
    /// Stop early once the remaining decrease of y² is provably below this
    /// fraction of the current gap 2/η − y². Off by default.
    pub gap_rel_tol: Option<f64>,
    /// Stop at the threshold crossing (enough for bounce counting).
    pub stop_at_crossing: bool,
    /// Band of y²·η counted online, default [2, 3].
    pub band: (f64, f64),
    pub record: Record,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            tol_x: 1e-12,
            max_iters: 100_000_000,
            gap_rel_tol: None,
            stop_at_crossing: false,
            band: (2.0, 3.0),
            record: Record::All,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// |x| < tol_x.
    Converged,
    /// Remaining drift of y² bounded below the requested tolerance.
    DriftBounded,
    StoppedAtCrossing,
    MaxItersExceeded,
    HitAxisExactly,
}

#[derive(Clone, Debug)]
pub struct Trajectory2D {
    pub eta: f64,
    pub loss: LossSpec,
    /// Iteration index of each recorded row.
    pub iters: Vec<usize>,
    pub states: Vec<State2D>,
    pub diags: Vec<StepDiag>,
    pub phase_tags: Vec<Phase>,
    pub crossing_iter: Option<usize>,
    pub landing_iter: Option<usize>,
    /// Number of iterations taken; the last state is iterate `final_iter`.
    pub final_iter: usize,
    pub outcome: Outcome,
    /// Online count of iterates with η y² inside `band`.
    pub band_count: usize,
    pub band: (f64, f64),
    pub complete: bool,
    pub stop: StopRule,
}

impl Trajectory2D {
    pub fn final_state(&self) -> State2D {
        *self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn is_converged(&self) -> bool {
        matches!(self.outcome, Outcome::Converged | Outcome::DriftBounded)
    }

    /// Maps flagged outcomes to their error.
    pub fn status(&self) -> Result<()> {
        match self.outcome {
            Outcome::MaxItersExceeded => Err(Error::MaxItersExceeded(self.final_iter)),
            Outcome::HitAxisExactly => Err(Error::HitAxisExactly(self.final_iter)),
            _ => Ok(()),
        }
    }
}

/// One simultaneous GD step.
#[inline]
pub fn gd_step(state: State2D, loss: &LossSpec, eta: f64) -> Result<State2D> {
    let g = eta * loss_deriv(loss, state.x * state.y);
    let next = State2D { x: state.x - g * state.y, y: state.y - g * state.x };
    if !(next.x.abs() <= OVERFLOW && next.y.abs() <= OVERFLOW) {
        return Err(Error::NumericOverflow { iter: 0 });
    }
    Ok(next)
}

/// Hessian of (x, y) ↦ ℓ(xy).
pub fn hessian(state: State2D, loss: &LossSpec) -> Result<[[f64; 2]; 2]> {
    let State2D { x, y } = state;
    let s = x * y;
    let l2 = loss_second_deriv(loss, s)?;
    let l1 = loss_deriv(loss, s);
    Ok([[l2 * y * y, l2 * x * y + l1], [l2 * x * y + l1, l2 * x * x]])
}

/// y² − x², conserved by gradient flow.
#[inline]
pub fn gf_conserved(state: State2D) -> f64 {
    state.y * state.y - state.x * state.x
}

/// Regime of an initialization with y0 > |x0| > 0; the tie y0² − x0² = 2/η
/// counts as edge of stability.
pub fn classify_regime(x0: f64, y0: f64, eta: f64) -> Result<Regime> {
    if x0.abs() == y0 {
        return Err(Error::OnInvariantLine);
    }
    if !(y0 > x0.abs() && x0 != 0.0 && eta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "regime needs y0 > |x0| > 0 and eta > 0, got ({x0}, {y0}), eta {eta}"
        )));
    }
    if y0 * y0 - x0 * x0 < 2.0 / eta {
        Ok(Regime::GradientFlow)
    } else {
        Ok(Regime::EdgeOfStability)
    }
}

/// Reference direction (x̃, ỹ) = (3, √10) with ỹ² − x̃² = 1.
pub const REFERENCE_DIRECTION: (f64, f64) = (3.0, 3.162_277_660_168_379_5);

/// Start √((2 ± δ)/η)·(x̃, ỹ), so y0² − x0² = (2 ± δ)/η.
pub fn initial_point(eta: f64, delta: f64, regime: Regime) -> State2D {
    let level = match regime {
        Regime::EdgeOfStability => 2.0 + delta,
        Regime::GradientFlow => 2.0 - delta,
    };
    let scale = (level / eta).sqrt();
    State2D::new(scale * REFERENCE_DIRECTION.0, scale * REFERENCE_DIRECTION.1)
}

struct Recorder {
    mode: Record,
    loss: LossSpec,
    eta: f64,
    iters: Vec<usize>,
    states: Vec<State2D>,
    diags: Vec<StepDiag>,
    tags: Vec<Phase>,
}

impl Recorder {
    fn push(&mut self, t: usize, state: State2D, phase: Phase) {
        self.iters.push(t);
        self.states.push(state);
        self.diags.push(StepDiag::of(state, &self.loss, self.eta));
        self.tags.push(phase);
    }

    fn wants(&self, t: usize) -> bool {
        match self.mode {
            Record::All => true,
            Record::Every(k) => t.is_multiple_of(k.max(1)),
            Record::Ends => t == 0,
        }
    }
}

/// Iterate [`gd_step`] from (x0, y0) until a stop condition fires.
///
/// Flagged endings (iteration cap, exact zero of x above threshold) still
/// return the trajectory; see [`Trajectory2D::status`].
pub fn run(x0: f64, y0: f64, loss: &LossSpec, eta: f64, stop: StopRule) -> Result<Trajectory2D> {
    if !(eta > 0.0) || !x0.is_finite() || !y0.is_finite() {
        return Err(Error::InvalidInput(format!("need finite start and eta > 0, got eta {eta}")));
    }
    let landing_scale = loss.landing_scale();
    let threshold = 2.0 / eta;
    let (band_lo, band_hi) = (stop.band.0 / eta, stop.band.1 / eta);

    let mut rec = Recorder {
        mode: stop.record,
        loss: *loss,
        eta,
        iters: Vec::new(),
        states: Vec::new(),
        diags: Vec::new(),
        tags: Vec::new(),
    };

    let mut x = x0;
    let mut y = y0;
    let mut t = 0usize;
    let mut landed = false;
    let mut landing_iter = None;
    let mut crossing_iter = None;
    let mut band_count = 0usize;
    let mut prev_above = y * y >= threshold;

    let phase_of = |landed: bool, y2: f64| {
        if !landed {
            Phase::GradientFlowLike
        } else if y2 > threshold {
            Phase::Bouncing
        } else {
            Phase::Converging
        }
    };

    let outcome = loop {
        let y2 = y * y;
        let s = x * y;
        if !landed && s.abs() < landing_scale {
            landed = true;
            landing_iter = Some(t);
        }
        if (band_lo..=band_hi).contains(&y2) {
            band_count += 1;
        }
        if rec.wants(t) {
            rec.push(t, State2D { x, y }, phase_of(landed, y2));
        }

        if t > 0 && x == 0.0 && y2 > threshold {
            break Outcome::HitAxisExactly;
        }
        if x.abs() < stop.tol_x {
            break Outcome::Converged;
        }
        if stop.stop_at_crossing && crossing_iter.is_some() {
            break Outcome::StoppedAtCrossing;
        }
        if let Some(rel) = stop.gap_rel_tol {
            // Once η r y² ∈ [1, 2 − ρ], |x| contracts by at most 1 − ρ per
            // step, so the rest of the decrease of y² is bounded by a
            // geometric series.
            let rho = 2.0 - eta * y2;
            if rho > 0.0 && landed && eta * ratio_r(loss, s) * y2 >= 1.0 {
                let remaining = 2.0 * eta * y2 * x * x / (rho * (2.0 - rho));
                if remaining <= rel * rho / eta {
                    break Outcome::DriftBounded;
                }
            }
        }
        if t >= stop.max_iters {
            break Outcome::MaxItersExceeded;
        }

        let g = eta * loss_deriv(loss, s);
        let nx = x - g * y;
        let ny = y - g * x;
        if !(nx.abs() <= OVERFLOW && ny.abs() <= OVERFLOW) {
            return Err(Error::NumericOverflow { iter: t + 1 });
        }
        if !landed && nx * x < 0.0 {
            landed = true;
            landing_iter = Some(t + 1);
        }
        x = nx;
        y = ny;
        t += 1;
        let above = y * y >= threshold;
        if prev_above && !above && crossing_iter.is_none() {
            crossing_iter = Some(t);
        }
        prev_above = above;
    };

    if rec.iters.last() != Some(&t) {
        rec.push(t, State2D { x, y }, phase_of(landed, y * y));
    }

    Ok(Trajectory2D {
        eta,
        loss: *loss,
        iters: rec.iters,
        states: rec.states,
        diags: rec.diags,
        phase_tags: rec.tags,
        crossing_iter,
        landing_iter,
        final_iter: t,
        outcome,
        band_count,
        band: stop.band,
        complete: stop.record == Record::All,
        stop,
    })
}

/// Sharpness at the final iterate of a converged run.
pub fn limiting_sharpness(traj: &Trajectory2D) -> Result<f64> {
    if !traj.is_converged() {
        return Err(Error::NotConverged);
    }
    sym_eig_max(&hessian(traj.final_state(), &traj.loss)?)
}

/// Positive root x of η ℓ′(xy) y = 2x, the perfect-bouncing amplitude.
pub fn quasi_static_envelope(loss: &LossSpec, eta: f64, y: f64) -> Result<f64> {
    let level = eta * loss.second_deriv_at_zero * y * y;
    if !(level > 2.0) {
        return Err(Error::NoRoot(eta * y * y));
    }
    // Dividing by x leaves η r(xy) y² = 2, which is monotone in x.
    let excess = |x: f64| eta * ratio_r(loss, x * y) * y * y - 2.0;
    let (mut lo, mut hi) = (0.0_f64, y.abs());
    if excess(hi) >= 0.0 {
        return Err(Error::NoRoot(eta * y * y));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Number of iterates with y² in [lo_mult/η, hi_mult/η].
///
/// Needs either a fully recorded trajectory or the band tracked online.
pub fn bouncing_iterations(traj: &Trajectory2D, lo_mult: f64, hi_mult: f64) -> Result<usize> {
    if !(lo_mult < hi_mult) {
        return Err(Error::InvalidInput("band needs lo < hi".into()));
    }
    if traj.complete {
        let (lo, hi) = (lo_mult / traj.eta, hi_mult / traj.eta);
        return Ok(traj.states.iter().filter(|st| (lo..=hi).contains(&(st.y * st.y))).count());
    }
    if (lo_mult, hi_mult) == traj.band {
        return Ok(traj.band_count);
    }
    Err(Error::InvalidInput(format!(
        "band [{lo_mult}, {hi_mult}] was not tracked and the trajectory is not fully recorded"
    )))
}

/// Summary of one run in an η sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub eta: f64,
    pub y_inf_sq: f64,
    pub limiting_sharpness: Option<f64>,
    /// 2/η − y∞².
    pub gap: f64,
    pub bounce_iters: usize,
    pub crossing_iter: Option<usize>,
    pub iterations: usize,
    pub outcome: Outcome,
}

/// Run from [`initial_point`] and summarise.
pub fn sweep_point(loss: &LossSpec, eta: f64, delta: f64, regime: Regime, stop: StopRule) -> Result<SweepPoint> {
    let start = initial_point(eta, delta, regime);
    let stop = StopRule { record: Record::Ends, ..stop };
    let traj = run(start.x, start.y, loss, eta, stop)?;
    let last = traj.final_state();
    let y_inf_sq = last.y * last.y;
    Ok(SweepPoint {
        eta,
        y_inf_sq,
        limiting_sharpness: limiting_sharpness(&traj).ok(),
        gap: 2.0 / eta - y_inf_sq,
        bounce_iters: traj.band_count,
        crossing_iter: traj.crossing_iter,
        iterations: traj.final_iter,
        outcome: traj.outcome,
    })
}
