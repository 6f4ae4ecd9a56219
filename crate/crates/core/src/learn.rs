//! Training of the decoder weights: bitwise cross-entropy loss, exact
//! reverse-mode gradients through the unrolled message-passing computation,
//! the optimizer loop and weight-file persistence.
//!
//! Gradients are hand-rolled against the fixed computation graph of the
//! forward pass. The backward sweep walks the iterations in reverse, using
//! `d tanh = 1 - tanh^2` and `d atanh(p) = 1 / (1 - p^2)`, with zero
//! gradient through the clamped region of the `atanh` input. Check-side
//! products are recomputed from the forward trace with the same prefix and
//! suffix ordering the forward pass used, so the clamp decisions agree
//! bit for bit.

use crate::channel::{draw_message, train_rng, transmit, uniform01};
use crate::code::CodeSpec;
use crate::decoder::{
    build_extended_graph, neural_bp_forward_traced, puncture_adapter, ForwardTrace, LlrVector,
    WeightBank, ATANH_EPS,
};
use crate::tanner::StructuredTannerGraph;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Which outputs the loss averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LossMode {
    /// Cross-entropy on the final outputs only.
    #[default]
    FinalOnly,
    /// Average of the cross-entropy computed from the output formula after
    /// every even iteration.
    Multiloss,
}

/// First-order optimizer used by the training loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Adam {
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
    Sgd,
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Training configuration. `code` is the transmitted code; cyclic codes are
/// trained through the puncturing adapter on the extended graph, with the
/// loss taken over the transmitted coordinates.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub code: CodeSpec,
    pub p: usize,
    pub t: usize,
    pub batch_size: usize,
    pub steps: usize,
    pub learning_rate: f64,
    pub snr_range_db: (f64, f64),
    pub seed: u64,
    pub loss_mode: LossMode,
    pub optimizer: Optimizer,
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.t < 1 || self.batch_size < 1 {
            return Err(Error::InvalidParameter(
                "training needs t >= 1 and batch_size >= 1".into(),
            ));
        }
        if self.snr_range_db.0 > self.snr_range_db.1 {
            return Err(Error::InvalidParameter(
                "snr range must satisfy low <= high".into(),
            ));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::InvalidParameter("learning rate must be >= 0".into()));
        }
        Ok(())
    }
}

/// Accumulated partial derivatives, shape-congruent with [`WeightBank`]
/// (same flat layout: `self_w[s*u + b]`, `cross_w[(s*u + b)*(u-1) + k]`,
/// `out_w[b]`).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBank {
    pub t: usize,
    pub u: usize,
    pub self_w: Vec<f64>,
    pub cross_w: Vec<f64>,
    pub out_w: Vec<f64>,
}

impl GradientBank {
    pub fn zeros(t: usize, u: usize) -> Self {
        GradientBank {
            t,
            u,
            self_w: vec![0.0; t * u],
            cross_w: vec![0.0; t * u * (u - 1)],
            out_w: vec![0.0; u],
        }
    }

    pub fn add_assign(&mut self, other: &GradientBank) {
        for (a, b) in self.self_w.iter_mut().zip(&other.self_w) {
            *a += b;
        }
        for (a, b) in self.cross_w.iter_mut().zip(&other.cross_w) {
            *a += b;
        }
        for (a, b) in self.out_w.iter_mut().zip(&other.out_w) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self
            .self_w
            .iter_mut()
            .chain(self.cross_w.iter_mut())
            .chain(self.out_w.iter_mut())
        {
            *v *= factor;
        }
    }
}

// ---------------------------------------------------------------------------
// Loss
// ---------------------------------------------------------------------------

/// Numerically stable `ln(1 + e^x)`.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Mean bitwise binary cross-entropy between `sigmoid(-o_j)` (the decoder's
/// probability that bit j is 1) and the transmitted bits: a large positive
/// `o_j` with `c_j = 0` costs nearly nothing, `o = 0` costs `ln 2` per bit.
pub fn loss(outputs: &[f64], bits: &[u8]) -> Result<f64> {
    if outputs.len() != bits.len() {
        return Err(Error::LengthMismatch {
            expected: bits.len(),
            got: outputs.len(),
        });
    }
    if outputs.iter().any(|o| !o.is_finite()) {
        return Err(Error::NonFinite("loss inputs"));
    }
    let total: f64 = outputs
        .iter()
        .zip(bits)
        .map(|(&o, &c)| softplus((2.0 * c as f64 - 1.0) * o))
        .sum();
    Ok(total / outputs.len() as f64)
}

/// Stage weights of the loss: `(stage index, weight)` pairs.
fn stage_plan(t: usize, mode: LossMode) -> Vec<(usize, f64)> {
    match mode {
        LossMode::FinalOnly => vec![(t - 1, 1.0)],
        LossMode::Multiloss => (0..t).map(|tau| (tau, 1.0 / t as f64)).collect(),
    }
}

fn staged_loss(trace: &ForwardTrace, bits: &[u8], offset: usize, mode: LossMode) -> Result<f64> {
    let mut total = 0.0;
    for (tau, w) in stage_plan(trace.t(), mode) {
        total += w * loss(&trace.stage_outputs[tau][offset..], bits)?;
    }
    Ok(total)
}

/// Forward pass plus loss, without gradients. The targets are the
/// transmitted bits; when they are one shorter than the graph (punctured
/// transmission), output 0 is excluded from the loss.
pub fn eval_loss(
    graph: &StructuredTannerGraph,
    bank: &WeightBank,
    llr: &LlrVector,
    bits: &[u8],
    mode: LossMode,
) -> Result<f64> {
    let offset = target_offset(graph, bits)?;
    let (_, trace) = neural_bp_forward_traced(graph, bank, llr)?;
    staged_loss(&trace, bits, offset, mode)
}

fn target_offset(graph: &StructuredTannerGraph, bits: &[u8]) -> Result<usize> {
    let offset = graph
        .n()
        .checked_sub(bits.len())
        .ok_or(Error::LengthMismatch {
            expected: graph.n(),
            got: bits.len(),
        })?;
    if offset > 1 {
        return Err(Error::LengthMismatch {
            expected: graph.n(),
            got: bits.len(),
        });
    }
    Ok(offset)
}

// ---------------------------------------------------------------------------
// Reverse-mode gradients
// ---------------------------------------------------------------------------

/// Exact gradients of the loss with respect to every weight, from a retained
/// forward trace. Returns the loss value together with the gradient bank.
pub fn backward(
    graph: &StructuredTannerGraph,
    bank: &WeightBank,
    trace: &ForwardTrace,
    llr: &LlrVector,
    bits: &[u8],
    mode: LossMode,
) -> Result<(f64, GradientBank)> {
    let offset = target_offset(graph, bits)?;
    let topo = graph.topology();
    let t = bank.t();
    let u = bank.u();
    let e = topo.n_edges;
    if trace.t() != t || trace.n_edges() != e {
        return Err(Error::MetadataMismatch(
            "trace does not match graph and bank".into(),
        ));
    }
    let l = llr.values();
    let n_targets = bits.len() as f64;

    // per-stage loss weights, indexed by stage
    let mut stage_weight = vec![0.0; t];
    for (tau, w) in stage_plan(t, mode) {
        stage_weight[tau] = w;
    }
    let total_loss = staged_loss(trace, bits, offset, mode)?;

    let mut grads = GradientBank::zeros(t, u);
    let mut d_cur = vec![0.0f64; e];
    let mut d_prev = vec![0.0f64; e];
    let mut vals: Vec<f64> = Vec::new();
    let mut prefix: Vec<f64> = Vec::new();
    let mut suffix: Vec<f64> = Vec::new();

    for s in (1..=2 * t).rev() {
        let cur = trace.stage(s);
        let prev = trace.stage(s - 1);

        if s % 2 == 0 {
            let tau = s / 2 - 1;
            let w = stage_weight[tau];
            if w != 0.0 {
                // d loss / d o_j, then into the output layer
                let outputs = &trace.stage_outputs[tau];
                let mut d_out = vec![0.0f64; outputs.len()];
                for (idx, &c) in bits.iter().enumerate() {
                    let j = offset + idx;
                    let sign = 2.0 * c as f64 - 1.0;
                    d_out[j] = w * sign * sigmoid(sign * outputs[j]) / n_targets;
                }
                for (g, edges) in topo.group_edges.iter().enumerate() {
                    let dj = d_out[topo.group_var[g] as usize];
                    if dj == 0.0 {
                        continue;
                    }
                    for (b, &eid) in edges.iter().enumerate() {
                        d_cur[eid as usize] += dj * bank.output_weight(b);
                        grads.out_w[b] += dj * cur[eid as usize];
                    }
                }
            }

            // through the check-side update
            for edges in &topo.row_edges {
                let d = edges.len();
                if d == 0 {
                    continue;
                }
                vals.clear();
                vals.extend(edges.iter().map(|&id| prev[id as usize]));
                // same product ordering as the forward pass, so the clamp
                // branch matches exactly
                prefix.clear();
                prefix.resize(d + 1, 1.0);
                suffix.clear();
                suffix.resize(d + 1, 1.0);
                for i in 0..d {
                    prefix[i + 1] = prefix[i] * vals[i];
                }
                for i in (0..d).rev() {
                    suffix[i] = suffix[i + 1] * vals[i];
                }
                for i in 0..d {
                    let g_up = d_cur[edges[i] as usize];
                    if g_up == 0.0 {
                        continue;
                    }
                    let p = prefix[i] * suffix[i + 1];
                    if p.abs() >= 1.0 - ATANH_EPS {
                        continue; // clamped: zero gradient
                    }
                    let factor = g_up * 2.0 / (1.0 - p * p);
                    for q in 0..d {
                        if q == i {
                            continue;
                        }
                        let mut rest = 1.0;
                        for r in 0..d {
                            if r != i && r != q {
                                rest *= vals[r];
                            }
                        }
                        d_prev[edges[q] as usize] += factor * rest;
                    }
                }
            }
        } else {
            let si = (s - 1) / 2;
            for (g, edges) in topo.group_edges.iter().enumerate() {
                let lj = l[topo.group_var[g] as usize];
                for (b, &eid) in edges.iter().enumerate() {
                    let g_up = d_cur[eid as usize];
                    if g_up == 0.0 {
                        continue;
                    }
                    let x = cur[eid as usize];
                    let dd = g_up * (1.0 - x * x) * 0.5;
                    grads.self_w[si * u + b] += dd * lj;
                    let mut k = 0;
                    for (bp, &sib) in edges.iter().enumerate() {
                        if bp == b {
                            continue;
                        }
                        grads.cross_w[(si * u + b) * (u - 1) + k] += dd * prev[sib as usize];
                        d_prev[sib as usize] += dd * bank.cross_weight(si, b, k);
                        k += 1;
                    }
                }
            }
        }

        std::mem::swap(&mut d_cur, &mut d_prev);
        d_prev.iter_mut().for_each(|v| *v = 0.0);
    }

    Ok((total_loss, grads))
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub bank: WeightBank,
    pub loss_history: Vec<f64>,
}

struct AdamState {
    m: GradientBank,
    v: GradientBank,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    steps: usize,
}

fn apply_update(bank: &mut WeightBank, grad: &GradientBank, lr: f64, adam: &mut Option<AdamState>) {
    let weights = [
        (&mut bank.self_w, &grad.self_w, 0usize),
        (&mut bank.cross_w, &grad.cross_w, 1),
        (&mut bank.out_w, &grad.out_w, 2),
    ];
    match adam {
        None => {
            for (w, g, _) in weights {
                for (wi, gi) in w.iter_mut().zip(g) {
                    *wi -= lr * gi;
                }
            }
        }
        Some(state) => {
            state.steps += 1;
            let b1 = state.beta1;
            let b2 = state.beta2;
            let bc1 = 1.0 - b1.powi(state.steps as i32);
            let bc2 = 1.0 - b2.powi(state.steps as i32);
            for (w, g, part) in weights {
                let (m, v) = match part {
                    0 => (&mut state.m.self_w, &mut state.v.self_w),
                    1 => (&mut state.m.cross_w, &mut state.v.cross_w),
                    _ => (&mut state.m.out_w, &mut state.v.out_w),
                };
                for i in 0..w.len() {
                    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                    let mh = m[i] / bc1;
                    let vh = v[i] / bc2;
                    w[i] -= lr * mh / (vh.sqrt() + state.epsilon);
                }
            }
        }
    }
}

/// Train a weight bank from all-ones initialization. Deterministic given the
/// seed: every step draws its batch sequentially from one pinned stream,
/// per-sample gradients are computed in parallel and reduced in sample
/// order, so results do not depend on the worker count.
pub fn train(config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let graph = build_extended_graph(&config.code, config.p)?;
    let mut bank = WeightBank::unit(config.t, graph.u());
    let mut adam = match config.optimizer {
        Optimizer::Adam {
            beta1,
            beta2,
            epsilon,
        } => Some(AdamState {
            m: GradientBank::zeros(config.t, graph.u()),
            v: GradientBank::zeros(config.t, graph.u()),
            beta1,
            beta2,
            epsilon,
            steps: 0,
        }),
        Optimizer::Sgd => None,
    };
    let mut rng = train_rng(config.seed);
    let mut history = Vec::with_capacity(config.steps);
    let (snr_lo, snr_hi) = config.snr_range_db;

    for step in 0..config.steps {
        let batch: Vec<(LlrVector, Vec<u8>)> = (0..config.batch_size)
            .map(|_| {
                let msg = draw_message(&mut rng, config.code.k);
                let cw = config.code.encode(&msg).expect("message length");
                let snr = snr_lo + (snr_hi - snr_lo) * uniform01(&mut rng);
                let sample = transmit(&config.code, &cw, snr, &mut rng);
                let llr = if config.code.extended {
                    sample.llr
                } else {
                    puncture_adapter(sample.llr.values())
                };
                (llr, cw)
            })
            .collect();

        let per_sample: Vec<Result<(f64, GradientBank)>> = batch
            .par_iter()
            .map(|(llr, bits)| {
                let (_, trace) = neural_bp_forward_traced(&graph, &bank, llr)?;
                backward(&graph, &bank, &trace, llr, bits, config.loss_mode)
            })
            .collect();

        let mut grad = GradientBank::zeros(config.t, graph.u());
        let mut loss_sum = 0.0;
        for r in per_sample {
            let (l, g) = r?;
            loss_sum += l;
            grad.add_assign(&g);
        }
        let step_loss = loss_sum / config.batch_size as f64;
        if !step_loss.is_finite() {
            return Err(Error::Diverged {
                step,
                loss: step_loss,
            });
        }
        grad.scale(1.0 / config.batch_size as f64);
        apply_update(&mut bank, &grad, config.learning_rate, &mut adam);
        history.push(step_loss);
    }

    Ok(TrainOutcome {
        bank,
        loss_history: history,
    })
}

// ---------------------------------------------------------------------------
// Weight persistence
// ---------------------------------------------------------------------------

/// Provenance recorded alongside the weights.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainingMeta {
    pub seed: u64,
    pub steps: usize,
    pub lr: f64,
    pub snr_range: (f64, f64),
}

/// On-disk weight file: the code, the graph parameters and the full-precision
/// weights in nested layout (`self_weights[t][u]`, `cross_weights[t][u][u-1]`
/// with sibling sources in ascending slot order, `output_weights[u]`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WeightFile {
    pub format_version: u32,
    pub code: CodeSpec,
    pub p: usize,
    pub t: usize,
    pub u: usize,
    pub self_weights: Vec<Vec<f64>>,
    pub cross_weights: Vec<Vec<Vec<f64>>>,
    pub output_weights: Vec<f64>,
    pub training: TrainingMeta,
}

pub const WEIGHT_FORMAT_VERSION: u32 = 1;

impl WeightFile {
    pub fn new(code: &CodeSpec, p: usize, bank: &WeightBank, training: TrainingMeta) -> Self {
        let (self_weights, cross_weights, output_weights) = bank.to_nested();
        WeightFile {
            format_version: WEIGHT_FORMAT_VERSION,
            code: code.clone(),
            p,
            t: bank.t(),
            u: bank.u(),
            self_weights,
            cross_weights,
            output_weights,
            training,
        }
    }

    /// Reconstruct the weight bank, checking the recorded metadata against
    /// the code and the array shapes.
    pub fn bank(&self) -> Result<WeightBank> {
        let bank = WeightBank::from_nested(
            &self.self_weights,
            &self.cross_weights,
            &self.output_weights,
        )?;
        if bank.t() != self.t || bank.u() != self.u {
            return Err(Error::MetadataMismatch(format!(
                "recorded t={}/u={} but arrays give t={}/u={}",
                self.t,
                self.u,
                bank.t(),
                bank.u()
            )));
        }
        let expect_u = self.code.check_poly.weight();
        if self.u != expect_u {
            return Err(Error::MetadataMismatch(format!(
                "u={} does not match the code's check-polynomial weight {}",
                self.u, expect_u
            )));
        }
        let n_ext = self.code.n_cyclic + 1;
        if self.p < 1 || self.p > n_ext {
            return Err(Error::MetadataMismatch(format!(
                "P={} outside [1, {n_ext}]",
                self.p
            )));
        }
        Ok(bank)
    }
}

pub fn save_weights(path: &Path, file: &WeightFile) -> Result<()> {
    let mut body =
        serde_json::to_string_pretty(file).map_err(|e| Error::Malformed(e.to_string()))?;
    body.push('\n');
    std::fs::write(path, body)?;
    Ok(())
}

pub fn load_weights(path: &Path) -> Result<WeightFile> {
    let body = std::fs::read_to_string(path)?;
    let file: WeightFile =
        serde_json::from_str(&body).map_err(|e| Error::Malformed(e.to_string()))?;
    if file.format_version != WEIGHT_FORMAT_VERSION {
        return Err(Error::MetadataMismatch(format!(
            "unsupported weight format version {}",
            file.format_version
        )));
    }
    file.bank()?;
    Ok(file)
}
