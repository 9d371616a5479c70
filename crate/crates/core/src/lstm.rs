//! Single-layer LSTM over a small token vocabulary, trained by full
//! backpropagation through time with elementwise gradient clipping and
//! plain SGD.
//!
//! Per step, with `z = [h_{t-1}; x_t]` and `x_t` one-hot:
//!
//! ```text
//! f = sigma(W_f z + b_f)    i = sigma(W_i z + b_i)
//! o = sigma(W_o z + b_o)    g = tanh(W_c z + b_c)
//! c = f * c_{t-1} + i * g   h = o * tanh(c)
//! p = softmax(W_y h + b_y)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LstmError {
    #[error("hidden and vocab sizes must be >= 1")]
    InvalidSize,
    #[error("token {token} at position {position} is outside the vocabulary of {vocab}")]
    TokenOutOfRange {
        token: usize,
        position: usize,
        vocab: usize,
    },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("non-finite loss in epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("temperature must be > 0, got {0}")]
    InvalidTemperature(f64),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed parameter file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn matvec(&self, v: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            *o += row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    fn matvec_t(&self, v: &[f64], out: &mut [f64]) {
        for (r, &vr) in v.iter().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * vr;
            }
        }
    }

    fn add_outer(&mut self, left: &[f64], right: &[f64]) {
        for (r, &l) in left.iter().enumerate() {
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            for (a, b) in row.iter_mut().zip(right) {
                *a += l * b;
            }
        }
    }
}

/// Gate order used by the tensor accessors.
pub const TENSOR_NAMES: [&str; 10] = [
    "w_forget", "w_input", "w_output", "w_cell", "b_forget", "b_input", "b_output", "b_cell",
    "w_out", "b_out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub hidden_size: usize,
    pub vocab_size: usize,
    pub w_forget: Matrix,
    pub w_input: Matrix,
    pub w_output: Matrix,
    pub w_cell: Matrix,
    pub b_forget: Vec<f64>,
    pub b_input: Vec<f64>,
    pub b_output: Vec<f64>,
    pub b_cell: Vec<f64>,
    /// Output projection, `vocab x hidden`.
    pub w_out: Matrix,
    pub b_out: Vec<f64>,
}

impl LstmParams {
    pub fn zeros(hidden_size: usize, vocab_size: usize) -> Result<Self, LstmError> {
        if hidden_size == 0 || vocab_size == 0 {
            return Err(LstmError::InvalidSize);
        }
        let z = hidden_size + vocab_size;
        Ok(Self {
            hidden_size,
            vocab_size,
            w_forget: Matrix::zeros(hidden_size, z),
            w_input: Matrix::zeros(hidden_size, z),
            w_output: Matrix::zeros(hidden_size, z),
            w_cell: Matrix::zeros(hidden_size, z),
            b_forget: vec![0.0; hidden_size],
            b_input: vec![0.0; hidden_size],
            b_output: vec![0.0; hidden_size],
            b_cell: vec![0.0; hidden_size],
            w_out: Matrix::zeros(vocab_size, hidden_size),
            b_out: vec![0.0; vocab_size],
        })
    }

    /// Flat views of every tensor, in [`TENSOR_NAMES`] order.
    pub fn tensors(&self) -> [&[f64]; 10] {
        [
            &self.w_forget.data,
            &self.w_input.data,
            &self.w_output.data,
            &self.w_cell.data,
            &self.b_forget,
            &self.b_input,
            &self.b_output,
            &self.b_cell,
            &self.w_out.data,
            &self.b_out,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 10] {
        [
            &mut self.w_forget.data,
            &mut self.w_input.data,
            &mut self.w_output.data,
            &mut self.w_cell.data,
            &mut self.b_forget,
            &mut self.b_input,
            &mut self.b_output,
            &mut self.b_cell,
            &mut self.w_out.data,
            &mut self.b_out,
        ]
    }

    fn shapes(&self) -> [(usize, usize); 10] {
        let (h, v) = (self.hidden_size, self.vocab_size);
        [
            (h, h + v),
            (h, h + v),
            (h, h + v),
            (h, h + v),
            (h, 1),
            (h, 1),
            (h, 1),
            (h, 1),
            (v, h),
            (v, 1),
        ]
    }

    fn is_weight(index: usize) -> bool {
        matches!(index, 0..=3 | 8)
    }

    /// Writes a text dump: a `lstm <hidden> <vocab>` header, then per tensor
    /// a `<name> <rows> <cols>` line followed by one line of values.
    pub fn to_text(&self) -> String {
        let mut out = format!("lstm {} {}\n", self.hidden_size, self.vocab_size);
        for ((name, data), (r, c)) in TENSOR_NAMES.iter().zip(self.tensors()).zip(self.shapes()) {
            let _ = writeln!(out, "{name} {r} {c}");
            let values: Vec<String> = data.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&values.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LstmError> {
        let fmt = |m: String| LstmError::Format(m);
        let mut lines = text.lines();
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| fmt("missing header".into()))?
            .split_whitespace()
            .collect();
        let (hidden, vocab) = match header.as_slice() {
            ["lstm", h, v] => (
                h.parse()
                    .map_err(|_| fmt(format!("bad hidden size `{h}`")))?,
                v.parse()
                    .map_err(|_| fmt(format!("bad vocab size `{v}`")))?,
            ),
            _ => return Err(fmt("expected `lstm <hidden> <vocab>` header".into())),
        };
        let mut params = Self::zeros(hidden, vocab)?;
        let shapes = params.shapes();
        for (i, tensor) in params.tensors_mut().into_iter().enumerate() {
            let shape_line = lines
                .next()
                .ok_or_else(|| fmt(format!("missing tensor {}", TENSOR_NAMES[i])))?;
            let expected = format!("{} {} {}", TENSOR_NAMES[i], shapes[i].0, shapes[i].1);
            if shape_line.trim() != expected {
                return Err(fmt(format!("expected `{expected}`, found `{shape_line}`")));
            }
            let values = lines
                .next()
                .ok_or_else(|| fmt(format!("missing values for {}", TENSOR_NAMES[i])))?
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| fmt(format!("{}: {e}", TENSOR_NAMES[i])))?;
            if values.len() != tensor.len() {
                return Err(fmt(format!(
                    "{}: expected {} values, found {}",
                    TENSOR_NAMES[i],
                    tensor.len(),
                    values.len()
                )));
            }
            *tensor = values;
        }
        Ok(params)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LstmError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LstmError> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}

/// Weights uniform in `[-0.01, 0.01]`, biases zero.
pub fn init_params(
    hidden_size: usize,
    vocab_size: usize,
    seed: u64,
) -> Result<LstmParams, LstmError> {
    init_params_scaled(hidden_size, vocab_size, seed, 0.01)
}

/// Weights uniform in `[-scale, scale]`, biases zero.
pub fn init_params_scaled(
    hidden_size: usize,
    vocab_size: usize,
    seed: u64,
    scale: f64,
) -> Result<LstmParams, LstmError> {
    let mut params = LstmParams::zeros(hidden_size, vocab_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (i, t) in params.tensors_mut().into_iter().enumerate() {
        if LstmParams::is_weight(i) {
            for w in t.iter_mut() {
                *w = scale * (2.0 * rng.gen::<f64>() - 1.0);
            }
        }
    }
    Ok(params)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in v.iter_mut() {
        *x /= sum;
    }
}

/// Activations of one time step.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub token: usize,
    pub z: Vec<f64>,
    pub forget: Vec<f64>,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    pub candidate: Vec<f64>,
    pub cell: Vec<f64>,
    pub cell_tanh: Vec<f64>,
    pub hidden: Vec<f64>,
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub steps: Vec<StepCache>,
}

impl ForwardPass {
    pub fn distributions(&self) -> impl Iterator<Item = &[f64]> {
        self.steps.iter().map(|s| s.probs.as_slice())
    }
}

/// Recurrent state carried between steps.
#[derive(Debug, Clone)]
pub struct LstmState {
    pub hidden: Vec<f64>,
    pub cell: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden_size: usize) -> Self {
        Self {
            hidden: vec![0.0; hidden_size],
            cell: vec![0.0; hidden_size],
        }
    }
}

fn check_tokens(params: &LstmParams, tokens: &[usize]) -> Result<(), LstmError> {
    match tokens.iter().position(|&t| t >= params.vocab_size) {
        Some(position) => Err(LstmError::TokenOutOfRange {
            token: tokens[position],
            position,
            vocab: params.vocab_size,
        }),
        None => Ok(()),
    }
}

fn step(params: &LstmParams, state: &mut LstmState, token: usize) -> StepCache {
    let h = params.hidden_size;
    let mut z = Vec::with_capacity(h + params.vocab_size);
    z.extend_from_slice(&state.hidden);
    z.extend((0..params.vocab_size).map(|k| if k == token { 1.0 } else { 0.0 }));

    let gate = |w: &Matrix, b: &[f64], act: fn(f64) -> f64| {
        let mut out = b.to_vec();
        w.matvec(&z, &mut out);
        out.iter_mut().for_each(|x| *x = act(*x));
        out
    };
    let forget = gate(&params.w_forget, &params.b_forget, sigmoid);
    let input = gate(&params.w_input, &params.b_input, sigmoid);
    let output = gate(&params.w_output, &params.b_output, sigmoid);
    let candidate = gate(&params.w_cell, &params.b_cell, f64::tanh);

    let cell: Vec<f64> = (0..h)
        .map(|k| forget[k] * state.cell[k] + input[k] * candidate[k])
        .collect();
    let cell_tanh: Vec<f64> = cell.iter().map(|c| c.tanh()).collect();
    let hidden: Vec<f64> = (0..h).map(|k| output[k] * cell_tanh[k]).collect();

    let mut logits = params.b_out.clone();
    params.w_out.matvec(&hidden, &mut logits);
    let mut probs = logits.clone();
    softmax_in_place(&mut probs);

    state.hidden.clone_from(&hidden);
    state.cell.clone_from(&cell);
    StepCache {
        token,
        z,
        forget,
        input,
        output,
        candidate,
        cell,
        cell_tanh,
        hidden,
        logits,
        probs,
    }
}

/// Runs the sequence from a zero state, keeping every step's activations.
pub fn forward(params: &LstmParams, input_sequence: &[usize]) -> Result<ForwardPass, LstmError> {
    check_tokens(params, input_sequence)?;
    let mut state = LstmState::zeros(params.hidden_size);
    let steps = input_sequence
        .iter()
        .map(|&t| step(params, &mut state, t))
        .collect();
    Ok(ForwardPass { steps })
}

/// Cross-entropy of predicting `targets[t]` from `inputs[..=t]`, summed over
/// steps, plus `0.5 * l2 * |W|^2` over the weight matrices.
pub fn loss(
    params: &LstmParams,
    inputs: &[usize],
    targets: &[usize],
    l2: f64,
) -> Result<f64, LstmError> {
    check_tokens(params, targets)?;
    let pass = forward(params, inputs)?;
    Ok(cross_entropy(&pass, targets) + l2_penalty(params, l2))
}

fn cross_entropy(pass: &ForwardPass, targets: &[usize]) -> f64 {
    pass.steps
        .iter()
        .zip(targets)
        .map(|(s, &t)| -s.probs[t].ln())
        .sum()
}

fn l2_penalty(params: &LstmParams, l2: f64) -> f64 {
    params
        .tensors()
        .iter()
        .enumerate()
        .filter(|(i, _)| LstmParams::is_weight(*i))
        .map(|(_, t)| t.iter().map(|w| w * w).sum::<f64>())
        .sum::<f64>()
        * 0.5
        * l2
}

/// Loss and its exact gradient (unclipped) for one sequence.
pub fn loss_and_gradients(
    params: &LstmParams,
    inputs: &[usize],
    targets: &[usize],
    l2: f64,
) -> Result<(f64, LstmParams), LstmError> {
    check_tokens(params, targets)?;
    if inputs.len() != targets.len() {
        return Err(LstmError::InvalidConfig(format!(
            "{} inputs vs {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    let pass = forward(params, inputs)?;
    let h = params.hidden_size;
    let mut grads = LstmParams::zeros(h, params.vocab_size)?;

    let mut dh_next = vec![0.0; h];
    let mut dc_next = vec![0.0; h];
    for (t, s) in pass.steps.iter().enumerate().rev() {
        let mut dy = s.probs.clone();
        dy[targets[t]] -= 1.0;
        grads.w_out.add_outer(&dy, &s.hidden);
        grads.b_out.iter_mut().zip(&dy).for_each(|(g, d)| *g += d);

        let mut dh = dh_next.clone();
        params.w_out.matvec_t(&dy, &mut dh);

        let c_prev: Vec<f64> = if t == 0 {
            vec![0.0; h]
        } else {
            pass.steps[t - 1].cell.clone()
        };
        let mut d_output = vec![0.0; h];
        let mut d_forget = vec![0.0; h];
        let mut d_input = vec![0.0; h];
        let mut d_cand = vec![0.0; h];
        let mut dc = vec![0.0; h];
        for k in 0..h {
            d_output[k] = dh[k] * s.cell_tanh[k] * s.output[k] * (1.0 - s.output[k]);
            dc[k] = dh[k] * s.output[k] * (1.0 - s.cell_tanh[k] * s.cell_tanh[k]) + dc_next[k];
            d_forget[k] = dc[k] * c_prev[k] * s.forget[k] * (1.0 - s.forget[k]);
            d_input[k] = dc[k] * s.candidate[k] * s.input[k] * (1.0 - s.input[k]);
            d_cand[k] = dc[k] * s.input[k] * (1.0 - s.candidate[k] * s.candidate[k]);
        }

        let mut dz = vec![0.0; h + params.vocab_size];
        for (w, gw, gb, d) in [
            (
                &params.w_forget,
                &mut grads.w_forget,
                &mut grads.b_forget,
                &d_forget,
            ),
            (
                &params.w_input,
                &mut grads.w_input,
                &mut grads.b_input,
                &d_input,
            ),
            (
                &params.w_output,
                &mut grads.w_output,
                &mut grads.b_output,
                &d_output,
            ),
            (
                &params.w_cell,
                &mut grads.w_cell,
                &mut grads.b_cell,
                &d_cand,
            ),
        ] {
            gw.add_outer(d, &s.z);
            gb.iter_mut().zip(d.iter()).for_each(|(g, x)| *g += x);
            w.matvec_t(d, &mut dz);
        }
        dh_next.copy_from_slice(&dz[..h]);
        for k in 0..h {
            dc_next[k] = dc[k] * s.forget[k];
        }
    }

    if l2 != 0.0 {
        for (i, (g, w)) in grads
            .tensors_mut()
            .into_iter()
            .zip(params.tensors())
            .enumerate()
        {
            if LstmParams::is_weight(i) {
                g.iter_mut().zip(w).for_each(|(g, w)| *g += l2 * w);
            }
        }
    }

    let total = cross_entropy(&pass, targets) + l2_penalty(params, l2);
    Ok((total, grads))
}

/// Clamps every gradient entry into `[-clip, clip]`.
pub fn clip_gradients(grads: &mut LstmParams, clip: f64) {
    for t in grads.tensors_mut() {
        t.iter_mut().for_each(|g| *g = g.clamp(-clip, clip));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmTrainConfig {
    pub learning_rate: f64,
    pub l2_strength: f64,
    pub clip_value: f64,
    pub softmax_temperature: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for LstmTrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            l2_strength: 1e-6,
            clip_value: 0.05,
            softmax_temperature: 0.1,
            epochs: 300,
            seed: 7,
        }
    }
}

impl LstmTrainConfig {
    pub fn validate(&self) -> Result<(), LstmError> {
        let bad = |m: String| Err(LstmError::InvalidConfig(m));
        if !(0.0..=0.01).contains(&self.learning_rate) {
            return bad(format!(
                "learning_rate {} outside [0, 0.01]",
                self.learning_rate
            ));
        }
        if !(self.l2_strength.is_finite() && self.l2_strength >= 0.0) {
            return bad(format!("l2_strength {} must be >= 0", self.l2_strength));
        }
        if !(5e-6..=0.05).contains(&self.clip_value) {
            return bad(format!(
                "clip_value {} outside [5e-6, 0.05]",
                self.clip_value
            ));
        }
        if !(self.softmax_temperature > 0.0 && self.softmax_temperature <= 0.1) {
            return bad(format!(
                "softmax_temperature {} outside (0, 0.1]",
                self.softmax_temperature
            ));
        }
        if self.epochs < 1 {
            return bad("epochs must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: LstmParams,
    /// Mean per-token cross-entropy of each epoch.
    pub loss_trace: Vec<f64>,
}

/// Next-token training: each sequence predicts `seq[1..]` from `seq[..n-1]`.
/// Sequences are visited in a per-epoch order shuffled by `cfg.seed`;
/// parameters are updated after each sequence.
pub fn train(
    params: LstmParams,
    corpus: &[Vec<usize>],
    cfg: &LstmTrainConfig,
) -> Result<TrainOutcome, LstmError> {
    cfg.validate()?;
    let usable: Vec<&Vec<usize>> = corpus.iter().filter(|s| s.len() >= 2).collect();
    if usable.is_empty() {
        return Err(LstmError::EmptyCorpus);
    }
    let mut params = params;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..usable.len()).collect();
    let mut loss_trace = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        // Fisher-Yates with the seeded stream
        for i in (1..order.len()).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let mut total = 0.0;
        let mut tokens = 0usize;
        for &idx in &order {
            let seq = usable[idx];
            let (inputs, targets) = (&seq[..seq.len() - 1], &seq[1..]);
            let (l, mut grads) = loss_and_gradients(&params, inputs, targets, cfg.l2_strength)?;
            if !l.is_finite() {
                return Err(LstmError::NonFiniteLoss { epoch });
            }
            total += l;
            tokens += targets.len();
            clip_gradients(&mut grads, cfg.clip_value);
            for (p, g) in params.tensors_mut().into_iter().zip(grads.tensors()) {
                p.iter_mut()
                    .zip(g)
                    .for_each(|(p, g)| *p -= cfg.learning_rate * g);
            }
        }
        loss_trace.push(total / tokens as f64);
    }
    Ok(TrainOutcome { params, loss_trace })
}

/// Feeds `prime`, then draws `length` tokens autoregressively from the
/// temperature-scaled softmax.
pub fn sample(
    params: &LstmParams,
    prime: &[usize],
    length: usize,
    temperature: f64,
    seed: u64,
) -> Result<Vec<usize>, LstmError> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(LstmError::InvalidTemperature(temperature));
    }
    if prime.is_empty() {
        return Err(LstmError::InvalidConfig(
            "prime must hold at least one token".into(),
        ));
    }
    check_tokens(params, prime)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = LstmState::zeros(params.hidden_size);
    let mut last = None;
    for &t in prime {
        last = Some(step(params, &mut state, t));
    }
    let mut out = Vec::with_capacity(length);
    let mut cache = last.expect("nonempty prime");
    for _ in 0..length {
        let mut scaled: Vec<f64> = cache.logits.iter().map(|l| l / temperature).collect();
        softmax_in_place(&mut scaled);
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut token = scaled.len() - 1;
        for (k, p) in scaled.iter().enumerate() {
            acc += p;
            if u < acc {
                token = k;
                break;
            }
        }
        out.push(token);
        cache = step(params, &mut state, token);
    }
    Ok(out)
}

/// Quantizes each feature column into equal-width bins over the column's
/// observed min-max range.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBinner {
    bins: usize,
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl FeatureBinner {
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>, bins: usize) -> Option<Self> {
        let mut mins: Vec<f64> = Vec::new();
        let mut maxs: Vec<f64> = Vec::new();
        for row in rows {
            if mins.is_empty() {
                mins = row.to_vec();
                maxs = row.to_vec();
            } else if row.len() != mins.len() {
                return None;
            } else {
                for (k, &v) in row.iter().enumerate() {
                    mins[k] = mins[k].min(v);
                    maxs[k] = maxs[k].max(v);
                }
            }
        }
        (bins >= 1 && !mins.is_empty()).then_some(Self { bins, mins, maxs })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn arity(&self) -> usize {
        self.mins.len()
    }

    pub fn tokenize(&self, row: &[f64]) -> Vec<usize> {
        row.iter()
            .enumerate()
            .map(|(k, &v)| {
                let width = self.maxs[k] - self.mins[k];
                if width <= 0.0 {
                    return 0;
                }
                let pos = ((v - self.mins[k]) / width * self.bins as f64).floor();
                (pos.max(0.0) as usize).min(self.bins - 1)
            })
            .collect()
    }

    /// Bin centres for the tokens, column `k` taken as `k mod arity`.
    pub fn detokenize(&self, tokens: &[usize]) -> Vec<f64> {
        tokens
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let k = i % self.arity();
                let width = (self.maxs[k] - self.mins[k]) / self.bins as f64;
                self.mins[k] + (t as f64 + 0.5) * width
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_seeded() {
        let a = init_params(20, 5, 3).unwrap();
        let b = init_params(20, 5, 3).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert_ne!(a, init_params(20, 5, 4).unwrap());
        assert_eq!((a.w_out.rows, a.w_out.cols), (5, 20));
        assert_eq!((a.w_forget.rows, a.w_forget.cols), (20, 25));
        for (i, t) in a.tensors().iter().enumerate() {
            if LstmParams::is_weight(i) {
                assert!(t.iter().all(|w| w.abs() <= 0.01));
            } else {
                assert!(t.iter().all(|&b| b == 0.0));
            }
        }
        assert!(matches!(init_params(0, 5, 1), Err(LstmError::InvalidSize)));
    }

    #[test]
    fn zero_weights_give_uniform_distributions() {
        let p = LstmParams::zeros(4, 5).unwrap();
        let pass = forward(&p, &[0, 3, 4, 1]).unwrap();
        for dist in pass.distributions() {
            assert!(dist.iter().all(|&q| (q - 0.2).abs() < 1e-15));
        }
    }

    #[test]
    fn rejects_out_of_range_token() {
        let p = LstmParams::zeros(2, 3).unwrap();
        assert!(matches!(
            forward(&p, &[0, 3]),
            Err(LstmError::TokenOutOfRange {
                token: 3,
                position: 1,
                vocab: 3
            })
        ));
    }

    #[test]
    fn text_dump_round_trips() {
        let p = init_params_scaled(3, 4, 11, 0.7).unwrap();
        let back = LstmParams::from_text(&p.to_text()).unwrap();
        assert_eq!(p, back);
        assert!(LstmParams::from_text("lstm 3 4\nw_forget 3 7\n1 2\n").is_err());
        assert!(LstmParams::from_text("nonsense").is_err());
    }

    #[test]
    fn sample_validates_temperature() {
        let p = init_params(3, 4, 1).unwrap();
        assert!(matches!(
            sample(&p, &[0], 3, 0.0, 1),
            Err(LstmError::InvalidTemperature(_))
        ));
    }

    #[test]
    fn config_ranges() {
        assert!(LstmTrainConfig::default().validate().is_ok());
        let over = LstmTrainConfig {
            learning_rate: 0.02,
            ..Default::default()
        };
        assert!(over.validate().is_err());
        let clip = LstmTrainConfig {
            clip_value: 0.1,
            ..Default::default()
        };
        assert!(clip.validate().is_err());
        let temp = LstmTrainConfig {
            softmax_temperature: 0.0,
            ..Default::default()
        };
        assert!(temp.validate().is_err());
    }

    #[test]
    fn empty_corpus() {
        let p = init_params(3, 4, 1).unwrap();
        assert!(matches!(
            train(p.clone(), &[], &LstmTrainConfig::default()),
            Err(LstmError::EmptyCorpus)
        ));
        assert!(matches!(
            train(p, &[vec![1]], &LstmTrainConfig::default()),
            Err(LstmError::EmptyCorpus)
        ));
    }

    #[test]
    fn binner_round_trip() {
        let rows = [vec![0.0, 10.0], vec![5.0, 10.0], vec![10.0, 10.0]];
        let b = FeatureBinner::fit(rows.iter().map(|r| r.as_slice()), 5).unwrap();
        assert_eq!(b.tokenize(&[0.0, 10.0]), vec![0, 0]);
        assert_eq!(b.tokenize(&[5.0, 10.0]), vec![2, 0]);
        assert_eq!(b.tokenize(&[10.0, 10.0]), vec![4, 0]);
        assert_eq!(b.detokenize(&[2, 0]), vec![5.0, 10.0]);
    }
}
