//! Forward decoding: the weighted belief-propagation decoder on the stacked
//! Tanner graph, classic sum-product BP, the list-decoding baseline, the
//! brute-force ML oracle and the puncturing adapter.
//!
//! Message semantics: odd iterations produce variable-to-check messages
//! already passed through `tanh(arg / 2)`, even iterations produce
//! check-to-variable messages in the LLR domain via `2 * atanh(product)`.
//! Odd iterations mix only the sibling edges of the same variable within
//! the same block; the blocks couple solely through the output layer, which
//! sums the final check-to-variable messages of every block.

use crate::code::{CodeSpec, SigmaPermutation};
use crate::tanner::{BpTopology, StructuredTannerGraph};
use crate::{Error, Result};

/// LLR magnitudes are clamped to this bound at ingestion.
pub const LLR_CLAMP: f64 = 30.0;

/// Products feeding `atanh` are clamped to `[-1 + ATANH_EPS, 1 - ATANH_EPS]`.
pub const ATANH_EPS: f64 = 1e-7;

/// Channel log-likelihood ratios, one per variable node, clamped to
/// `[-LLR_CLAMP, LLR_CLAMP]` on construction. Positive favors bit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector {
    values: Vec<f64>,
}

impl LlrVector {
    pub fn new(values: &[f64]) -> Self {
        let clamped = values
            .iter()
            .map(|&v| {
                assert!(!v.is_nan(), "LLR input is NaN");
                v.clamp(-LLR_CLAMP, LLR_CLAMP)
            })
            .collect();
        LlrVector { values: clamped }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.values.len()
    }
}

/// Adapter for decoding a punctured (cyclic) code with the extended-code
/// decoder: prepend a zero LLR for the overall parity bit, about which the
/// channel says nothing. Callers drop coordinate 0 of the decoded word.
pub fn puncture_adapter(llr: &[f64]) -> LlrVector {
    let mut padded = Vec::with_capacity(llr.len() + 1);
    padded.push(0.0);
    padded.extend_from_slice(llr);
    LlrVector::new(&padded)
}

/// Hard decision: bit j is 1 iff `soft[j] < 0`; ties decode to 0.
pub fn hard_decision(soft: &[f64]) -> Vec<u8> {
    soft.iter().map(|&o| u8::from(o < 0.0)).collect()
}

/// BPSK correlation score `sum_j (1 - 2 c_j) L_j`; the quantity maximized
/// by ML decoding over equiprobable codewords.
pub fn correlation(bits: &[u8], llr: &[f64]) -> f64 {
    bits.iter()
        .zip(llr)
        .map(|(&b, &l)| (1.0 - 2.0 * b as f64) * l)
        .sum()
}

// ---------------------------------------------------------------------------
// Weight bank
// ---------------------------------------------------------------------------

/// Nested weight layout used by the weight file:
/// `(self_w[t][u], cross_w[t][u][u-1], out_w[u])`.
pub type NestedWeights = (Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>, Vec<f64>);

/// The tied learnable weights of the decoder.
///
/// Per odd iteration `s` there are `u` self weights (applied to the channel
/// LLR) and `u * (u - 1)` cross weights (applied to the sibling messages),
/// plus `u` output weights used by the final layer: `t * u^2 + u` scalars in
/// total, independent of the code length and of the number of blocks.
///
/// Cross weights are stored per target slot `b` with the `u - 1` sibling
/// sources `b' != b` enumerated in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightBank {
    t: usize,
    u: usize,
    pub(crate) self_w: Vec<f64>,
    pub(crate) cross_w: Vec<f64>,
    pub(crate) out_w: Vec<f64>,
}

impl WeightBank {
    /// All-ones bank: the decoder then reproduces classic sum-product BP.
    pub fn unit(t: usize, u: usize) -> Self {
        WeightBank {
            t,
            u,
            self_w: vec![1.0; t * u],
            cross_w: vec![1.0; t * u * (u - 1)],
            out_w: vec![1.0; u],
        }
    }

    /// Half-iteration count; the decoder runs `2t` iterations.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn u(&self) -> usize {
        self.u
    }

    /// Number of distinct trainable scalars, `t * u^2 + u`.
    pub fn param_count(&self) -> usize {
        self.self_w.len() + self.cross_w.len() + self.out_w.len()
    }

    #[inline]
    pub fn self_weight(&self, s: usize, b: usize) -> f64 {
        self.self_w[s * self.u + b]
    }

    /// Cross weight applied to the `k`-th sibling (sources enumerated in
    /// ascending slot order, skipping `b`) when updating slot `b`.
    #[inline]
    pub fn cross_weight(&self, s: usize, b: usize, k: usize) -> f64 {
        self.cross_w[(s * self.u + b) * (self.u - 1) + k]
    }

    #[inline]
    pub fn output_weight(&self, b: usize) -> f64 {
        self.out_w[b]
    }

    /// Build from the nested layout used by the weight file:
    /// `self_w[t][u]`, `cross_w[t][u][u-1]`, `out_w[u]`.
    pub fn from_nested(
        self_w: &[Vec<f64>],
        cross_w: &[Vec<Vec<f64>>],
        out_w: &[f64],
    ) -> Result<Self> {
        let t = self_w.len();
        let u = out_w.len();
        if u < 2 {
            return Err(Error::MetadataMismatch("weight bank needs u >= 2".into()));
        }
        let shape_ok = cross_w.len() == t
            && self_w.iter().all(|row| row.len() == u)
            && cross_w
                .iter()
                .all(|rows| rows.len() == u && rows.iter().all(|r| r.len() == u - 1));
        if !shape_ok {
            return Err(Error::MetadataMismatch(
                "weight arrays have inconsistent shapes".into(),
            ));
        }
        Ok(WeightBank {
            t,
            u,
            self_w: self_w.iter().flatten().copied().collect(),
            cross_w: cross_w.iter().flatten().flatten().copied().collect(),
            out_w: out_w.to_vec(),
        })
    }

    /// The nested layout used by the weight file.
    pub fn to_nested(&self) -> NestedWeights {
        let self_w = (0..self.t)
            .map(|s| (0..self.u).map(|b| self.self_weight(s, b)).collect())
            .collect();
        let cross_w = (0..self.t)
            .map(|s| {
                (0..self.u)
                    .map(|b| {
                        (0..self.u - 1)
                            .map(|k| self.cross_weight(s, b, k))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        (self_w, cross_w, self.out_w.clone())
    }
}

// ---------------------------------------------------------------------------
// Decode result and trace
// ---------------------------------------------------------------------------

/// Output of one decode call.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub soft_outputs: Vec<f64>,
    pub hard_bits: Vec<u8>,
    /// Whether the hard decision is a codeword of the underlying code.
    pub is_valid_codeword: bool,
    pub iterations_used: usize,
}

/// Full record of a forward pass: every per-edge message for iterations
/// `0..=2t` plus the outputs computed after each even iteration. Retained
/// for training; cheap enough to produce unconditionally.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    n_edges: usize,
    t: usize,
    data: Vec<f64>,
    /// Outputs after even iteration `2(tau + 1)`, for `tau` in `0..t`.
    pub stage_outputs: Vec<Vec<f64>>,
}

impl ForwardTrace {
    fn new(t: usize, n_edges: usize) -> Self {
        ForwardTrace {
            n_edges,
            t,
            data: vec![0.0; (2 * t + 1) * n_edges],
            stage_outputs: Vec::with_capacity(t),
        }
    }

    /// Messages of iteration `s`, `s` in `0..=2t`.
    pub fn stage(&self, s: usize) -> &[f64] {
        debug_assert!(s <= 2 * self.t);
        &self.data[s * self.n_edges..(s + 1) * self.n_edges]
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }
}

fn outputs_from_stage(
    topo: &BpTopology,
    llr: &[f64],
    stage: &[f64],
    out_weight: impl Fn(usize) -> f64,
) -> Vec<f64> {
    let mut o = llr.to_vec();
    for (g, edges) in topo.group_edges.iter().enumerate() {
        let j = topo.group_var[g] as usize;
        for (b, &eid) in edges.iter().enumerate() {
            o[j] += out_weight(b) * stage[eid as usize];
        }
    }
    o
}

fn finish(
    code: Option<&CodeSpec>,
    topo: &BpTopology,
    outputs: Vec<f64>,
    iterations: usize,
) -> Result<DecodeResult> {
    if outputs.iter().any(|o| !o.is_finite()) {
        return Err(Error::NonFinite("decoder outputs"));
    }
    let hard = hard_decision(&outputs);
    let is_valid = match code {
        Some(spec) => spec.is_codeword(&hard),
        None => topo.row_edges.iter().all(|row| {
            row.iter()
                .fold(0u8, |a, &e| a ^ hard[topo.edge_var[e as usize] as usize])
                == 0
        }),
    };
    Ok(DecodeResult {
        soft_outputs: outputs,
        hard_bits: hard,
        is_valid_codeword: is_valid,
        iterations_used: iterations,
    })
}

// ---------------------------------------------------------------------------
// Weighted forward pass
// ---------------------------------------------------------------------------

/// Run the weighted decoder and keep the full message trace.
pub fn neural_bp_forward_traced(
    graph: &StructuredTannerGraph,
    bank: &WeightBank,
    llr: &LlrVector,
) -> Result<(DecodeResult, ForwardTrace)> {
    let trace = run_forward(graph, bank, llr)?;
    let outputs = trace.stage_outputs.last().expect("t >= 1").clone();
    let result = finish(Some(graph.code()), graph.topology(), outputs, 2 * bank.t())?;
    Ok((result, trace))
}

/// The message-passing core: all iterations plus per-stage outputs, without
/// the hard decision and codeword check.
fn run_forward(
    graph: &StructuredTannerGraph,
    bank: &WeightBank,
    llr: &LlrVector,
) -> Result<ForwardTrace> {
    if bank.u() != graph.u() {
        return Err(Error::MetadataMismatch(format!(
            "weight bank has u={}, graph has u={}",
            bank.u(),
            graph.u()
        )));
    }
    if llr.len() != graph.n() {
        return Err(Error::LengthMismatch {
            expected: graph.n(),
            got: llr.len(),
        });
    }
    let topo = graph.topology();
    let e = topo.n_edges;
    let t = bank.t();
    let l = llr.values();
    let mut trace = ForwardTrace::new(t, e);
    let mut prefix: Vec<f64> = Vec::new();
    let mut suffix: Vec<f64> = Vec::new();

    for s in 1..=2 * t {
        let (head, tail) = trace.data.split_at_mut(s * e);
        let prev = &head[(s - 1) * e..];
        let cur = &mut tail[..e];

        if s % 2 == 1 {
            let si = (s - 1) / 2;
            for (g, edges) in topo.group_edges.iter().enumerate() {
                let lj = l[topo.group_var[g] as usize];
                for (b, &eid) in edges.iter().enumerate() {
                    let mut acc = bank.self_weight(si, b) * lj;
                    let mut k = 0;
                    for (bp, &sib) in edges.iter().enumerate() {
                        if bp == b {
                            continue;
                        }
                        acc += bank.cross_weight(si, b, k) * prev[sib as usize];
                        k += 1;
                    }
                    cur[eid as usize] = (0.5 * acc).tanh();
                }
            }
        } else {
            for edges in &topo.row_edges {
                let d = edges.len();
                if d == 0 {
                    continue;
                }
                prefix.clear();
                prefix.resize(d + 1, 1.0);
                suffix.clear();
                suffix.resize(d + 1, 1.0);
                for i in 0..d {
                    prefix[i + 1] = prefix[i] * prev[edges[i] as usize];
                }
                for i in (0..d).rev() {
                    suffix[i] = suffix[i + 1] * prev[edges[i] as usize];
                }
                for i in 0..d {
                    let p = (prefix[i] * suffix[i + 1]).clamp(-1.0 + ATANH_EPS, 1.0 - ATANH_EPS);
                    cur[edges[i] as usize] = 2.0 * p.atanh();
                }
            }
            let outputs = outputs_from_stage(topo, l, cur, |b| bank.output_weight(b));
            trace.stage_outputs.push(outputs);
        }
    }

    Ok(trace)
}

/// Run the weighted decoder, discarding the trace.
pub fn neural_bp_forward(
    graph: &StructuredTannerGraph,
    bank: &WeightBank,
    llr: &LlrVector,
) -> Result<DecodeResult> {
    neural_bp_forward_traced(graph, bank, llr).map(|(r, _)| r)
}

/// Recompute outputs from an arbitrary final-iteration message slice.
/// Exists so tests can perturb single messages and observe output locality.
#[cfg(test)]
fn outputs_from_final(
    graph: &StructuredTannerGraph,
    bank: &WeightBank,
    llr: &LlrVector,
    final_stage: &[f64],
) -> Vec<f64> {
    outputs_from_stage(graph.topology(), llr.values(), final_stage, |b| {
        bank.output_weight(b)
    })
}

// ---------------------------------------------------------------------------
// Classic sum-product BP
// ---------------------------------------------------------------------------

/// Classic (unweighted) sum-product decoding on a Tanner graph topology,
/// written independently of the weighted pass: `2t` iterations of textbook
/// variable-side and check-side updates with the same numerical guards.
///
/// On the Tanner graph of a plain parity-check matrix this is vanilla BP;
/// on a structured stacked graph it equals the weighted decoder with every
/// weight set to 1.
pub fn classic_bp_traced(
    topo: &BpTopology,
    llr: &LlrVector,
    t: usize,
) -> Result<(DecodeResult, ForwardTrace)> {
    if llr.len() != topo.n_vars {
        return Err(Error::LengthMismatch {
            expected: topo.n_vars,
            got: llr.len(),
        });
    }
    let e = topo.n_edges;
    let l = llr.values();
    let mut trace = ForwardTrace::new(t, e);

    for s in 1..=2 * t {
        let (head, tail) = trace.data.split_at_mut(s * e);
        let prev = &head[(s - 1) * e..];
        let cur = &mut tail[..e];

        if s % 2 == 1 {
            // variable side: the LLR plus the extrinsic sum over siblings
            for (g, edges) in topo.group_edges.iter().enumerate() {
                let lj = l[topo.group_var[g] as usize];
                for &eid in edges {
                    let mut total = lj;
                    for &sib in edges {
                        if sib != eid {
                            total += prev[sib as usize];
                        }
                    }
                    cur[eid as usize] = (0.5 * total).tanh();
                }
            }
        } else {
            // check side: product of the other tanh-domain messages
            for edges in &topo.row_edges {
                for &eid in edges {
                    let mut prod = 1.0;
                    for &other in edges {
                        if other != eid {
                            prod *= prev[other as usize];
                        }
                    }
                    let p = prod.clamp(-1.0 + ATANH_EPS, 1.0 - ATANH_EPS);
                    cur[eid as usize] = 2.0 * p.atanh();
                }
            }
            let outputs = outputs_from_stage(topo, l, cur, |_| 1.0);
            trace.stage_outputs.push(outputs);
        }
    }

    let outputs = trace.stage_outputs.last().expect("t >= 1").clone();
    let result = finish(None, topo, outputs, 2 * t)?;
    Ok((result, trace))
}

pub fn classic_bp(topo: &BpTopology, llr: &LlrVector, t: usize) -> Result<DecodeResult> {
    classic_bp_traced(topo, llr, t).map(|(r, _)| r)
}

// ---------------------------------------------------------------------------
// ML oracle
// ---------------------------------------------------------------------------

/// Brute-force maximum-likelihood decoding: the codeword maximizing the
/// BPSK correlation with the LLRs, enumerating all 2^k messages. Ties go to
/// the earliest codeword in enumeration order.
pub fn ml_oracle(spec: &CodeSpec, llr: &[f64]) -> Result<Vec<u8>> {
    if spec.k > 20 {
        return Err(Error::InvalidParameter(format!(
            "ml_oracle enumeration limited to k <= 20, got k={}",
            spec.k
        )));
    }
    if llr.len() != spec.length() {
        return Err(Error::LengthMismatch {
            expected: spec.length(),
            got: llr.len(),
        });
    }
    let mut best: Option<(f64, Vec<u8>)> = None;
    for msg in 0u64..1 << spec.k {
        let bits: Vec<u8> = (0..spec.k).map(|i| ((msg >> i) & 1) as u8).collect();
        let cw = spec.encode(&bits)?;
        let score = correlation(&cw, llr);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, cw));
        }
    }
    Ok(best.expect("k >= 1").1)
}

// ---------------------------------------------------------------------------
// List-decoding baseline
// ---------------------------------------------------------------------------

/// The list-decoding baseline: decode once per permutation on the single
/// Tanner graph of `H_0` (equivalently, permute the LLRs, decode, permute
/// back), then pick the best candidate by BPSK correlation.
///
/// Candidates whose hard decision is a valid codeword are preferred: the
/// selection is maximum-likelihood over the codewords the list produced. A
/// run that did not converge to a codeword only wins when no run did (its
/// hard decision sits near the received word, which maximizes raw
/// correlation over all binary words and would otherwise always win).
pub fn cyc_list_decode(
    graph_p1: &StructuredTannerGraph,
    sigmas: &[SigmaPermutation],
    bank: &WeightBank,
    llr: &LlrVector,
    list_size: usize,
) -> Result<DecodeResult> {
    if graph_p1.p() != 1 {
        return Err(Error::InvalidParameter(
            "cyc_list_decode runs on a P=1 graph".into(),
        ));
    }
    if list_size < 1 || list_size > sigmas.len() {
        return Err(Error::InvalidParameter(format!(
            "list size must lie in [1, {}], got {list_size}",
            sigmas.len()
        )));
    }
    let code = graph_p1.code();
    // (is_codeword, score) ranked lexicographically, earliest z on ties
    let mut best: Option<(bool, f64, Vec<f64>)> = None;
    for s in sigmas.iter().take(list_size) {
        let permuted = LlrVector::new(&s.permute(llr.values()));
        let trace = run_forward(graph_p1, bank, &permuted)?;
        let soft = s.permute(trace.stage_outputs.last().expect("t >= 1"));
        let hard = hard_decision(&soft);
        let valid = code.is_codeword(&hard);
        let score = correlation(&hard, llr.values());
        let better = match &best {
            None => true,
            Some((bv, bs, _)) => (valid, score) > (*bv, *bs),
        };
        if better {
            best = Some((valid, score, soft));
        }
    }
    let (_, _, soft) = best.expect("list_size >= 1");
    finish(Some(code), graph_p1.topology(), soft, 2 * bank.t())
}

// ---------------------------------------------------------------------------
// Frame decoders for the simulation harness
// ---------------------------------------------------------------------------

/// Per-frame context handed to decoders by the Monte-Carlo harness. Real
/// decoders ignore it; test stubs use it to replay the frame's channel
/// sample deterministically.
#[derive(Debug, Clone, Copy)]
pub struct FrameContext {
    pub seed: u64,
    pub snr_index: usize,
    pub snr_db: f64,
    pub frame_index: u64,
}

/// A decoder the simulation harness can evaluate: maps transmitted-domain
/// LLRs to transmitted-domain bit decisions.
pub trait FrameDecoder: Sync {
    fn name(&self) -> &str;
    fn decode_frame(&self, llr: &[f64], ctx: &FrameContext) -> Vec<u8>;
}

fn pad_for(punctured: bool, llr: &[f64]) -> LlrVector {
    if punctured {
        puncture_adapter(llr)
    } else {
        LlrVector::new(llr)
    }
}

fn strip_for(punctured: bool, mut bits: Vec<u8>) -> Vec<u8> {
    if punctured {
        bits.remove(0);
    }
    bits
}

/// The stacked weighted decoder. For a cyclic (non-extended) code the
/// forward pass runs on the extended graph via the puncturing adapter.
pub struct StackedDecoder {
    name: String,
    graph: StructuredTannerGraph,
    bank: WeightBank,
    punctured: bool,
}

impl StackedDecoder {
    pub fn new(spec: &CodeSpec, p: usize, bank: WeightBank) -> Result<Self> {
        let graph = build_extended_graph(spec, p)?;
        if bank.u() != graph.u() {
            return Err(Error::MetadataMismatch(format!(
                "weight bank u={} does not fit graph u={}",
                bank.u(),
                graph.u()
            )));
        }
        Ok(StackedDecoder {
            name: "stacked".into(),
            punctured: !spec.extended,
            graph,
            bank,
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn graph(&self) -> &StructuredTannerGraph {
        &self.graph
    }
}

impl FrameDecoder for StackedDecoder {
    fn name(&self) -> &str {
        &self.name
    }

    fn decode_frame(&self, llr: &[f64], _ctx: &FrameContext) -> Vec<u8> {
        let padded = pad_for(self.punctured, llr);
        let res = neural_bp_forward(&self.graph, &self.bank, &padded).expect("forward pass");
        strip_for(self.punctured, res.hard_bits)
    }
}

/// Classic sum-product BP on the same stacked graph (the all-ones special
/// case, run through the independent classic implementation).
pub struct ClassicDecoder {
    name: String,
    graph: StructuredTannerGraph,
    t: usize,
    punctured: bool,
}

impl ClassicDecoder {
    pub fn new(spec: &CodeSpec, p: usize, t: usize) -> Result<Self> {
        Ok(ClassicDecoder {
            name: "classic".into(),
            punctured: !spec.extended,
            graph: build_extended_graph(spec, p)?,
            t,
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}

impl FrameDecoder for ClassicDecoder {
    fn name(&self) -> &str {
        &self.name
    }

    fn decode_frame(&self, llr: &[f64], _ctx: &FrameContext) -> Vec<u8> {
        let padded = pad_for(self.punctured, llr);
        let res = classic_bp(self.graph.topology(), &padded, self.t).expect("forward pass");
        strip_for(self.punctured, res.hard_bits)
    }
}

/// The prior list-decoding baseline.
pub struct CycListDecoder {
    name: String,
    graph: StructuredTannerGraph,
    sigmas: Vec<SigmaPermutation>,
    bank: WeightBank,
    list_size: usize,
    punctured: bool,
}

impl CycListDecoder {
    pub fn new(spec: &CodeSpec, list_size: usize, bank: WeightBank) -> Result<Self> {
        let graph = build_extended_graph(spec, 1)?;
        if bank.u() != graph.u() {
            return Err(Error::MetadataMismatch(format!(
                "weight bank u={} does not fit graph u={}",
                bank.u(),
                graph.u()
            )));
        }
        let table = crate::gf2m::FieldTable::new(spec.m)?;
        let map = crate::code::IndexMap::new(&table);
        if list_size < 1 || list_size > map.len() {
            return Err(Error::InvalidParameter(format!(
                "list size must lie in [1, {}], got {list_size}",
                map.len()
            )));
        }
        Ok(CycListDecoder {
            name: "cyclist".into(),
            punctured: !spec.extended,
            graph,
            sigmas: crate::code::all_sigmas(&map),
            bank,
            list_size,
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}

impl FrameDecoder for CycListDecoder {
    fn name(&self) -> &str {
        &self.name
    }

    fn decode_frame(&self, llr: &[f64], _ctx: &FrameContext) -> Vec<u8> {
        let padded = pad_for(self.punctured, llr);
        let res = cyc_list_decode(
            &self.graph,
            &self.sigmas,
            &self.bank,
            &padded,
            self.list_size,
        )
        .expect("forward pass");
        strip_for(self.punctured, res.hard_bits)
    }
}

/// Brute-force ML decoding of the transmitted code.
pub struct MlDecoder {
    name: String,
    spec: CodeSpec,
}

impl MlDecoder {
    pub fn new(spec: &CodeSpec) -> Result<Self> {
        if spec.k > 20 {
            return Err(Error::InvalidParameter(format!(
                "ml decoder limited to k <= 20, got k={}",
                spec.k
            )));
        }
        Ok(MlDecoder {
            name: "ml".into(),
            spec: spec.clone(),
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}

impl FrameDecoder for MlDecoder {
    fn name(&self) -> &str {
        &self.name
    }

    fn decode_frame(&self, llr: &[f64], _ctx: &FrameContext) -> Vec<u8> {
        ml_oracle(&self.spec, llr).expect("enumeration")
    }
}

/// Build the structured graph of the extended version of `spec` with `p`
/// permutation blocks.
pub fn build_extended_graph(spec: &CodeSpec, p: usize) -> Result<StructuredTannerGraph> {
    let ext = spec.to_extended();
    crate::tanner::build_graph(&crate::code::StackedCheckMatrix::build(&ext, p)?)
}
