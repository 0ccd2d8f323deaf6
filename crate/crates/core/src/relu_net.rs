//! Simplified two-layer ReLU network on sparse-coding data.
//!
//! f(x) = a⁻ Σᵢ ReLU(−x[i] + b) + a⁺ Σᵢ ReLU(x[i] + b), trained by full-batch
//! GD on the mean logistic loss. Only the bias moves the activation pattern,
//! so each sample's coordinates are sorted once and every ReLU sum is a
//! binary search plus a prefix sum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mean_model::{mm_run, MeanModelConfig, MmStopRule};
use crate::numerics::{sym_eig_max, RngStream};
use crate::single_neuron::Record;

const KINK_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseDataset {
    pub d: usize,
    pub n: usize,
    pub lambda: f64,
    /// Row-major n × d.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub js: Vec<usize>,
    pub seed: u64,
}

impl SparseDataset {
    /// x = λ·y·e_j + ξ with ξ standard normal. Any λ ≥ 0 is accepted here;
    /// [`generate_dataset`] enforces λ > 1.
    pub fn generate(d: usize, n: usize, lambda: f64, seed: u64) -> Result<Self> {
        if d == 0 || n == 0 || !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("bad dataset shape d={d}, n={n}, lambda={lambda}")));
        }
        let mut rng = RngStream::new(seed);
        let mut xs = vec![0.0; n * d];
        let mut ys = Vec::with_capacity(n);
        let mut js = Vec::with_capacity(n);
        for row in xs.chunks_exact_mut(d) {
            let y = rng.sign();
            let j = rng.index(d);
            rng.fill_normal(row);
            row[j] += lambda * y;
            ys.push(y);
            js.push(j);
        }
        Ok(Self { d, n, lambda, xs, ys, js, seed })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.xs[i * self.d..(i + 1) * self.d]
    }

    /// Same distribution, seed + 1.
    pub fn held_out(&self) -> Result<Self> {
        Self::generate(self.d, self.n, self.lambda, self.seed.wrapping_add(1))
    }
}

/// Draw a sparse-coding sample set from `RngStream(seed)`.
pub fn generate_dataset(d: usize, n: usize, lambda: f64, seed: u64) -> Result<SparseDataset> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidInput(format!("signal strength must exceed 1, got {lambda}")));
    }
    SparseDataset::generate(d, n, lambda, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReluParams {
    pub a_minus: f64,
    pub a_plus: f64,
    pub b: f64,
}

impl ReluParams {
    /// A = d(a⁻ + a⁺).
    pub fn a_sum(&self, d: usize) -> f64 {
        d as f64 * (self.a_minus + self.a_plus)
    }
}

/// a± ~ N(0, 1/(2d)) and b = 0, drawn from a stream derived from `seed`.
pub fn init_params(d: usize, seed: u64) -> ReluParams {
    let mut rng = RngStream::new(seed ^ 0x9e37_79b9_7f4a_7c15);
    let (u, v) = rng.normal_pair();
    let sd = (0.5 / d as f64).sqrt();
    ReluParams { a_minus: sd * u, a_plus: sd * v, b: 0.0 }
}

/// f(x) by direct summation.
pub fn network_output(p: &ReluParams, x: &[f64]) -> f64 {
    let mut minus = 0.0;
    let mut plus = 0.0;
    for &xi in x {
        minus += (p.b - xi).max(0.0);
        plus += (xi + p.b).max(0.0);
    }
    p.a_minus * minus + p.a_plus * plus
}

/// Per-sample sorted coordinates with prefix sums.
#[derive(Clone, Debug)]
pub struct PreparedData {
    pub d: usize,
    pub n: usize,
    ys: Vec<f64>,
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

/// ReLU sums S∓ and active counts N∓ of one sample at bias b.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Activations {
    pub s_minus: f64,
    pub s_plus: f64,
    pub n_minus: f64,
    pub n_plus: f64,
    /// Distance from b to the nearest kink ±x[i] + b = 0.
    pub kink_gap: f64,
}

impl PreparedData {
    pub fn new(ds: &SparseDataset) -> Self {
        let d = ds.d;
        let mut sorted = ds.xs.clone();
        let mut prefix = vec![0.0; ds.n * (d + 1)];
        for (row, pre) in sorted.chunks_exact_mut(d).zip(prefix.chunks_exact_mut(d + 1)) {
            row.sort_by(f64::total_cmp);
            for k in 0..d {
                pre[k + 1] = pre[k] + row[k];
            }
        }
        Self { d, n: ds.n, ys: ds.ys.clone(), sorted, prefix }
    }

    #[inline]
    pub fn activations(&self, i: usize, b: f64) -> Activations {
        let d = self.d;
        let row = &self.sorted[i * d..(i + 1) * d];
        let pre = &self.prefix[i * (d + 1)..(i + 1) * (d + 1)];
        // ReLU(x + b) is active for x > −b; ReLU(−x + b) for x < b.
        let kp = row.partition_point(|&v| v <= -b);
        let km = row.partition_point(|&v| v < b);
        let n_plus = (d - kp) as f64;
        let n_minus = km as f64;
        let near = |k: usize, at: f64| {
            let left = if k > 0 { (row[k - 1] - at).abs() } else { f64::INFINITY };
            let right = if k < d { (row[k] - at).abs() } else { f64::INFINITY };
            left.min(right)
        };
        Activations {
            s_minus: b * n_minus - pre[km],
            s_plus: (pre[d] - pre[kp]) + b * n_plus,
            n_minus,
            n_plus,
            kink_gap: near(kp, -b).min(near(km, b)),
        }
    }

    #[inline]
    pub fn output(&self, i: usize, p: &ReluParams) -> f64 {
        let act = self.activations(i, p.b);
        p.a_minus * act.s_minus + p.a_plus * act.s_plus
    }

    /// Fraction of samples with y·f(x) > 0.
    pub fn accuracy(&self, p: &ReluParams) -> f64 {
        let hits = (0..self.n).filter(|&i| self.ys[i] * self.output(i, p) > 0.0).count();
        hits as f64 / self.n as f64
    }

    /// Mean loss, gradient and Hessian in (a⁻, a⁺, b).
    pub fn evaluate(&self, p: &ReluParams) -> Evaluation {
        let mut loss = 0.0;
        let mut grad = [0.0; 3];
        let mut hess = [[0.0; 3]; 3];
        let mut kink = None;
        for i in 0..self.n {
            let act = self.activations(i, p.b);
            if kink.is_none() && act.kink_gap <= KINK_TOL {
                kink = Some(i);
            }
            let y = self.ys[i];
            let f = p.a_minus * act.s_minus + p.a_plus * act.s_plus;
            let m = y * f;
            let df = [act.s_minus, act.s_plus, p.a_minus * act.n_minus + p.a_plus * act.n_plus];
            let l1 = logistic_deriv(m);
            let l2 = logistic_second_deriv(m);
            loss += logistic(m);
            for r in 0..3 {
                grad[r] += l1 * y * df[r];
                for c in 0..3 {
                    hess[r][c] += l2 * df[r] * df[c];
                }
            }
            // ∂²f/∂a∓∂b = N∓; the other second derivatives vanish a.e.
            hess[0][2] += l1 * y * act.n_minus;
            hess[2][0] += l1 * y * act.n_minus;
            hess[1][2] += l1 * y * act.n_plus;
            hess[2][1] += l1 * y * act.n_plus;
        }
        let inv = 1.0 / self.n as f64;
        grad.iter_mut().for_each(|g| *g *= inv);
        hess.iter_mut().flatten().for_each(|h| *h *= inv);
        Evaluation { loss: loss * inv, grad, hess, kink }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub loss: f64,
    pub grad: [f64; 3],
    pub hess: [[f64; 3]; 3],
    /// First sample found sitting on a ReLU kink.
    pub kink: Option<usize>,
}

impl Evaluation {
    pub fn sharpness(&self) -> Result<f64> {
        if let Some(sample) = self.kink {
            return Err(Error::KinkEncountered { sample });
        }
        sym_eig_max(&self.hess)
    }
}

/// log(1 + e^{−m}).
#[inline]
pub fn logistic(m: f64) -> f64 {
    (-m).max(0.0) + (-m.abs()).exp().ln_1p()
}

/// d/dm log(1 + e^{−m}) = −1/(1 + e^m).
#[inline]
pub fn logistic_deriv(m: f64) -> f64 {
    -1.0 / (1.0 + m.exp())
}

#[inline]
pub fn logistic_second_deriv(m: f64) -> f64 {
    let e = (-m.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

pub fn mean_loss(ds: &SparseDataset, p: &ReluParams) -> f64 {
    PreparedData::new(ds).evaluate(p).loss
}

pub fn param_gradient(ds: &SparseDataset, p: &ReluParams) -> [f64; 3] {
    PreparedData::new(ds).evaluate(p).grad
}

/// Largest eigenvalue of the 3×3 parameter Hessian of the mean loss.
pub fn param_hessian_sharpness(ds: &SparseDataset, p: &ReluParams) -> Result<f64> {
    PreparedData::new(ds).evaluate(p).sharpness()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReluRecord {
    pub t: usize,
    pub a_minus: f64,
    pub a_plus: f64,
    /// A = d(a⁻ + a⁺).
    pub a_sum: f64,
    pub b: f64,
    pub loss: f64,
    /// NaN when a sample sits on a kink.
    pub sharpness: f64,
    pub test_acc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainOptions {
    pub record: Record,
    /// Evaluate held-out accuracy on recorded rows.
    pub test_accuracy: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { record: Record::All, test_accuracy: true }
    }
}

#[derive(Clone, Debug)]
pub struct ReluTrajectory {
    pub d: usize,
    pub eta: f64,
    pub records: Vec<ReluRecord>,
    pub final_params: ReluParams,
    /// Total number of sign changes of A.
    pub sign_flips: usize,
    /// Longest run of consecutive sign changes of A.
    pub max_sign_alternations: usize,
}

impl ReluTrajectory {
    /// Records up to the first one with b ≤ `level` (inclusive), or all.
    pub fn until_bias(&self, level: f64) -> &[ReluRecord] {
        match self.records.iter().position(|r| r.b <= level) {
            Some(k) => &self.records[..=k],
            None => &self.records,
        }
    }
}

/// Full-batch GD for `iters` steps, recording every iterate.
pub fn train_full_batch(ds: &SparseDataset, p0: ReluParams, eta: f64, iters: usize) -> Result<ReluTrajectory> {
    train_with(ds, p0, eta, iters, TrainOptions::default())
}

pub fn train_with(
    ds: &SparseDataset,
    p0: ReluParams,
    eta: f64,
    iters: usize,
    opts: TrainOptions,
) -> Result<ReluTrajectory> {
    if iters == 0 || !(eta > 0.0) {
        return Err(Error::InvalidInput(format!("need iters >= 1 and eta > 0, got {iters}, {eta}")));
    }
    let train = PreparedData::new(ds);
    let test = if opts.test_accuracy { Some(PreparedData::new(&ds.held_out()?)) } else { None };
    let d = ds.d;
    let mut p = p0;
    let mut records = Vec::new();
    let mut sign_flips = 0usize;
    let mut run = 0usize;
    let mut max_run = 0usize;

    for t in 0..=iters {
        let eval = train.evaluate(&p);
        let wanted = match opts.record {
            Record::All => true,
            Record::Every(k) => t % k.max(1) == 0 || t == iters,
            Record::Ends => t == 0 || t == iters,
        };
        if wanted {
            records.push(ReluRecord {
                t,
                a_minus: p.a_minus,
                a_plus: p.a_plus,
                a_sum: p.a_sum(d),
                b: p.b,
                loss: eval.loss,
                sharpness: eval.sharpness().unwrap_or(f64::NAN),
                test_acc: test.as_ref().map_or(f64::NAN, |s| s.accuracy(&p)),
            });
        }
        if t == iters {
            break;
        }
        let next = ReluParams {
            a_minus: p.a_minus - eta * eval.grad[0],
            a_plus: p.a_plus - eta * eval.grad[1],
            b: p.b - eta * eval.grad[2],
        };
        if !(next.a_minus.is_finite() && next.a_plus.is_finite() && next.b.is_finite()) {
            return Err(Error::NumericOverflow { iter: t + 1 });
        }
        if next.a_sum(d) * p.a_sum(d) < 0.0 {
            sign_flips += 1;
            run += 1;
            max_run = max_run.max(run);
        } else {
            run = 0;
        }
        p = next;
    }

    Ok(ReluTrajectory { d, eta, records, final_params: p, sign_flips, max_sign_alternations: max_run })
}

/// Iterations for a time budget: round(budget/η), at least one.
pub fn iterations_for_budget(eta: f64, budget: f64) -> usize {
    ((budget / eta).round() as usize).max(1)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub t: usize,
    pub b_network: f64,
    pub b_mean_model: f64,
    pub a_network: f64,
    pub a_mean_model: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    /// End of the initial phase: first t with network b ≤ −0.5, or the run end.
    pub t_init: usize,
    pub max_b_deviation: f64,
    pub max_a_deviation: f64,
    pub rows: Vec<ComparisonRow>,
}

/// Run the network and the mean model from matched (d, η, A0) side by side.
pub fn compare_to_mean_model(ds: &SparseDataset, p0: ReluParams, eta: f64, iters: usize) -> Result<ComparisonReport> {
    if p0.b != 0.0 {
        return Err(Error::InvalidInput("comparison starts from b = 0".into()));
    }
    let net = train_with(ds, p0, eta, iters, TrainOptions { record: Record::All, test_accuracy: false })?;
    let cfg = MeanModelConfig::new(ds.d, eta, p0.a_sum(ds.d));
    let mm = mm_run(&cfg, MmStopRule { max_iters: iters, record: Record::All, ..MmStopRule::default() })?;
    let last = *mm.states.last().expect("mean-model trajectory is non-empty");
    let t_init = net.records.iter().position(|r| r.b <= -0.5).unwrap_or(iters);

    let mut rows = Vec::with_capacity(net.records.len());
    let (mut max_b, mut max_a) = (0.0_f64, 0.0_f64);
    for r in &net.records {
        // The mean model may stop early once A vanishes; it stays put after.
        let m = mm.states.get(r.t).copied().unwrap_or(last);
        if r.t <= t_init {
            max_b = max_b.max((r.b - m.b).abs());
            max_a = max_a.max((r.a_sum - m.a).abs());
        }
        rows.push(ComparisonRow { t: r.t, b_network: r.b, b_mean_model: m.b, a_network: r.a_sum, a_mean_model: m.a });
    }
    Ok(ComparisonReport { t_init, max_b_deviation: max_b, max_a_deviation: max_a, rows })
}
