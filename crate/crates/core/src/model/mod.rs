//! The auto-encoder: a stack of dilated causal convolutions that condenses a
//! window into a latent Gaussian, and a mirrored stack that expands a latent
//! sample back into per-timestep `(μ, σ)`.

mod file;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Normalizer;
use crate::error::{FaeError, Result};
use crate::tensor::{
    dilated_causal_conv_backward, dilated_causal_conv_forward, relu_backward, relu_forward,
    ConvParams, Tensor2,
};

pub use file::{load_model, read_model, save_model, write_model, MAGIC};

/// Both log-σ heads are clamped to this range before exponentiation.
pub const LOG_SIGMA_MIN: f64 = -6.0;
pub const LOG_SIGMA_MAX: f64 = 6.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Architecture and training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FaeHyperparams {
    /// Window length `T`.
    pub window: usize,
    /// Latent dimension `J`.
    pub latent: usize,
    /// Filters per hidden layer `U`.
    pub filters: usize,
    /// Filter length `F`.
    pub filter_len: usize,
    /// Learning rate `γ`.
    pub learning_rate: f64,
    /// Mini-batch size `m`.
    pub batch_size: usize,
    /// Default detection multiplier `α`.
    pub alpha_default: u32,
    /// KL weight.
    pub beta: f64,
}

impl Default for FaeHyperparams {
    fn default() -> Self {
        Self {
            window: 256,
            latent: 48,
            filters: 128,
            filter_len: 2,
            learning_rate: 6e-5,
            batch_size: 32,
            alpha_default: 3,
            beta: 1.0,
        }
    }
}

impl FaeHyperparams {
    pub fn new(window: usize, latent: usize, filters: usize, filter_len: usize) -> Self {
        Self {
            window,
            latent,
            filters,
            filter_len,
            ..Self::default()
        }
    }

    /// Hidden-layer count `N`, derived from `T` and `F`.
    pub fn depth(&self) -> Result<usize> {
        derive_depth(self.window, self.filter_len)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FaeError::InvalidHyperparameter(msg));
        if self.window < 1 || self.latent < 1 || self.filters < 1 || self.batch_size < 1 {
            return bad(format!(
                "T, J, U, m must be >= 1 (T={}, J={}, U={}, m={})",
                self.window, self.latent, self.filters, self.batch_size
            ));
        }
        if self.latent >= self.window {
            return bad(format!(
                "latent dimension J={} must be smaller than window T={}",
                self.latent, self.window
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be > 0, got {}", self.learning_rate));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be finite and >= 0, got {}", self.beta));
        }
        self.depth().map(|_| ())
    }
}

/// Smallest `N ≥ 1` with `T ≤ 2·F^(N−1)`.
pub fn derive_depth(window: usize, filter_len: usize) -> Result<usize> {
    if filter_len < 2 {
        return Err(FaeError::InvalidHyperparameter(format!(
            "filter length must be >= 2, got {filter_len}"
        )));
    }
    if window < 1 {
        return Err(FaeError::InvalidHyperparameter("window must be >= 1".into()));
    }
    let mut n = 1;
    let mut reach: u128 = 2;
    while (window as u128) > reach {
        n += 1;
        reach *= filter_len as u128;
    }
    Ok(n)
}

/// Reparameterization record for one encoded window.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentSample {
    pub mu_z: Vec<f64>,
    pub logsigma_z: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub z: Vec<f64>,
}

/// `z = μ + exp(log σ) ⊙ ε`.
pub fn reparameterize(mu_z: &[f64], logsigma_z: &[f64], epsilon: &[f64]) -> Result<LatentSample> {
    if mu_z.len() != logsigma_z.len() || mu_z.len() != epsilon.len() {
        return Err(FaeError::Shape(format!(
            "reparameterize lengths differ: mu={} logsigma={} epsilon={}",
            mu_z.len(),
            logsigma_z.len(),
            epsilon.len()
        )));
    }
    let z = mu_z
        .iter()
        .zip(logsigma_z)
        .zip(epsilon)
        .map(|((m, ls), e)| m + ls.exp() * e)
        .collect();
    Ok(LatentSample {
        mu_z: mu_z.to_vec(),
        logsigma_z: logsigma_z.to_vec(),
        epsilon: epsilon.to_vec(),
        z,
    })
}

/// The three scalars of the negative ELBO.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElboTerms {
    pub nll: f64,
    pub kl: f64,
    pub loss: f64,
}

/// Gaussian negative log-likelihood of `x` plus `beta` times the KL
/// divergence of `N(μ_Z, σ_Z²)` from the standard normal prior.
pub fn elbo_terms(
    x: &Tensor2,
    mu_x: &Tensor2,
    sigma_x: &Tensor2,
    mu_z: &[f64],
    logsigma_z: &[f64],
    beta: f64,
) -> Result<ElboTerms> {
    if !x.same_shape(mu_x) || !x.same_shape(sigma_x) {
        return Err(FaeError::Shape("x, mu_x and sigma_x must share a shape".into()));
    }
    if mu_z.len() != logsigma_z.len() {
        return Err(FaeError::Shape("mu_z and logsigma_z lengths differ".into()));
    }
    let mut nll = 0.0;
    for ((&xv, &m), &s) in x.data().iter().zip(mu_x.data()).zip(sigma_x.data()) {
        if s.is_nan() || s <= 0.0 {
            return Err(FaeError::Domain(format!("sigma_x must be positive, got {s}")));
        }
        let r = xv - m;
        nll += HALF_LN_2PI + s.ln() + r * r / (2.0 * s * s);
    }
    let kl = kl_divergence(mu_z, logsigma_z);
    Ok(ElboTerms {
        nll,
        kl,
        loss: nll + beta * kl,
    })
}

/// Closed-form `KL(N(μ, σ²) ‖ N(0, I))`.
pub fn kl_divergence(mu_z: &[f64], logsigma_z: &[f64]) -> f64 {
    0.5 * mu_z
        .iter()
        .zip(logsigma_z)
        .map(|(m, ls)| m * m + (2.0 * ls).exp() - 1.0 - 2.0 * ls)
        .sum::<f64>()
}

fn clamp_log_sigma(v: f64) -> f64 {
    v.clamp(LOG_SIGMA_MIN, LOG_SIGMA_MAX)
}

fn clamp_passes(v: f64) -> bool {
    (LOG_SIGMA_MIN..=LOG_SIGMA_MAX).contains(&v)
}

/// Which block of the parameter layout a layer belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerRole {
    Encoder(usize),
    EncoderMuHead,
    EncoderLogSigmaHead,
    Decoder(usize),
    DecoderMuHead,
    DecoderLogSigmaHead,
}

/// Full parameter set plus hyperparameters and normalization statistics.
///
/// Layers are stored in file layout order: encoder `0..N`, the two latent
/// heads, decoder `0..N`, the two output heads.
#[derive(Debug, Clone, PartialEq)]
pub struct FaeModel {
    hyper: FaeHyperparams,
    depth: usize,
    layers: Vec<ConvParams>,
    pub normalizer: Normalizer,
}

/// Shapes `(out, in, kernel, dilation)` of every layer in layout order.
pub fn layer_shapes(hyper: &FaeHyperparams) -> Result<Vec<(usize, usize, usize, usize)>> {
    hyper.validate()?;
    let n = hyper.depth()?;
    let (u, j, f) = (hyper.filters, hyper.latent, hyper.filter_len);
    let mut shapes = Vec::with_capacity(2 * n + 4);
    for h in 0..n {
        let input = if h == 0 { 1 } else { u };
        shapes.push((u, input, f, f.pow(h as u32)));
    }
    shapes.push((j, u, 1, 1));
    shapes.push((j, u, 1, 1));
    for h in 0..n {
        let input = if h == 0 { j } else { u };
        shapes.push((u, input, f, f.pow((n - 1 - h) as u32)));
    }
    shapes.push((1, u, 1, 1));
    shapes.push((1, u, 1, 1));
    Ok(shapes)
}

/// Closed-form parameter count `Σ out·in·F` without allocating a model.
pub fn param_count_for(hyper: &FaeHyperparams) -> Result<usize> {
    Ok(layer_shapes(hyper)?.iter().map(|(o, i, k, _)| o * i * k).sum())
}

/// Activations kept from a forward pass for the backward pass.
struct Trace {
    /// Inputs to each encoder layer, then the final hidden activation.
    enc_inputs: Vec<Tensor2>,
    enc_pre: Vec<Tensor2>,
    mu_z: Vec<f64>,
    logsigma_z_raw: Vec<f64>,
    logsigma_z: Vec<f64>,
    sample: LatentSample,
    dec_inputs: Vec<Tensor2>,
    dec_pre: Vec<Tensor2>,
    mu_x: Tensor2,
    logsigma_x_raw: Tensor2,
    sigma_x: Tensor2,
}

/// Result of [`FaeModel::forward_backward`].
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub terms: ElboTerms,
    pub grads: Gradients,
}

/// Gradient storage with the same layer layout as the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &FaeModel) -> Self {
        Self {
            layers: model.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.layers.iter_mut().flatten() {
            *v *= factor;
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.layers.iter().flatten().copied().collect()
    }

    pub fn norm(&self) -> f64 {
        self.layers.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FaeModel {
    /// Allocates every layer and draws weights from
    /// `U(−√(6/(in·F)), +√(6/(in·F)))` with a seeded generator. Both
    /// log-σ heads then start at zero, so every σ is initially 1.
    pub fn build(hyper: FaeHyperparams, seed: u64) -> Result<Self> {
        let shapes = layer_shapes(&hyper)?;
        let depth = hyper.depth()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = shapes
            .into_iter()
            .map(|(o, i, k, d)| {
                let bound = (6.0 / (i * k) as f64).sqrt();
                let weights = (0..o * i * k).map(|_| rng.random_range(-bound..=bound)).collect();
                ConvParams::new(o, i, k, d, weights)
            })
            .collect::<Result<Vec<_>>>()?;
        for head in [depth + 1, 2 * depth + 3] {
            layers[head].weights.fill(0.0);
        }
        Ok(Self {
            hyper,
            depth,
            layers,
            normalizer: Normalizer::default(),
        })
    }

    /// Same layout as [`FaeModel::build`] but every weight is zero.
    pub fn zeros(hyper: FaeHyperparams) -> Result<Self> {
        let shapes = layer_shapes(&hyper)?;
        let depth = hyper.depth()?;
        let layers = shapes
            .into_iter()
            .map(|(o, i, k, d)| ConvParams::zeros(o, i, k, d))
            .collect();
        Ok(Self {
            hyper,
            depth,
            layers,
            normalizer: Normalizer::default(),
        })
    }

    pub(crate) fn from_parts(
        hyper: FaeHyperparams,
        layers: Vec<ConvParams>,
        normalizer: Normalizer,
    ) -> Result<Self> {
        let shapes = layer_shapes(&hyper)?;
        if shapes.len() != layers.len()
            || shapes.iter().zip(&layers).any(|(&(o, i, k, d), l)| {
                (o, i, k, d) != (l.out_channels, l.in_channels, l.kernel, l.dilation)
            })
        {
            return Err(FaeError::Shape("layer shapes do not match hyperparameters".into()));
        }
        let depth = hyper.depth()?;
        Ok(Self {
            hyper,
            depth,
            layers,
            normalizer,
        })
    }

    pub fn hyper(&self) -> &FaeHyperparams {
        &self.hyper
    }

    /// Hidden-layer count `N`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn window(&self) -> usize {
        self.hyper.window
    }

    pub fn latent_dim(&self) -> usize {
        self.hyper.latent
    }

    pub fn layers(&self) -> &[ConvParams] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [ConvParams] {
        &mut self.layers
    }

    pub fn role(&self, index: usize) -> LayerRole {
        let n = self.depth;
        match index {
            i if i < n => LayerRole::Encoder(i),
            i if i == n => LayerRole::EncoderMuHead,
            i if i == n + 1 => LayerRole::EncoderLogSigmaHead,
            i if i < 2 * n + 2 => LayerRole::Decoder(i - n - 2),
            i if i == 2 * n + 2 => LayerRole::DecoderMuHead,
            _ => LayerRole::DecoderLogSigmaHead,
        }
    }

    pub fn encoder_layers(&self) -> &[ConvParams] {
        &self.layers[..self.depth]
    }

    pub fn enc_mu_head(&self) -> &ConvParams {
        &self.layers[self.depth]
    }

    pub fn enc_logsigma_head(&self) -> &ConvParams {
        &self.layers[self.depth + 1]
    }

    pub fn decoder_layers(&self) -> &[ConvParams] {
        &self.layers[self.depth + 2..2 * self.depth + 2]
    }

    pub fn dec_mu_head(&self) -> &ConvParams {
        &self.layers[2 * self.depth + 2]
    }

    pub fn dec_logsigma_head(&self) -> &ConvParams {
        &self.layers[2 * self.depth + 3]
    }

    /// All weights concatenated in layout order.
    pub fn flat_weights(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|l| l.weights.iter().copied()).collect()
    }

    /// Overwrites all weights from a layout-ordered slice.
    pub fn set_flat_weights(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(FaeError::Shape(format!(
                "expected {} weights, got {}",
                self.param_count(),
                flat.len()
            )));
        }
        let mut offset = 0;
        for l in &mut self.layers {
            let n = l.weights.len();
            l.weights.copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        }
        Ok(())
    }

    pub fn set_beta(&mut self, beta: f64) {
        self.hyper.beta = beta;
    }

    /// Number of trainable weights.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(ConvParams::weight_count).sum()
    }

    fn check_window(&self, x: &Tensor2) -> Result<()> {
        if x.channels() != 1 || x.length() != self.hyper.window {
            return Err(FaeError::Shape(format!(
                "expected a 1x{} window, got {}x{}",
                self.hyper.window,
                x.channels(),
                x.length()
            )));
        }
        Ok(())
    }

    fn run_encoder(&self, x: &Tensor2) -> Result<(Vec<Tensor2>, Vec<Tensor2>, Vec<f64>, Vec<f64>)> {
        self.check_window(x)?;
        let mut inputs = Vec::with_capacity(self.depth + 1);
        let mut pre = Vec::with_capacity(self.depth);
        inputs.push(x.clone());
        for layer in self.encoder_layers() {
            let a = dilated_causal_conv_forward(inputs.last().unwrap(), layer)?;
            inputs.push(relu_forward(&a));
            pre.push(a);
        }
        let last = inputs.last().unwrap().column(self.hyper.window - 1);
        let mu = head_at_column(self.enc_mu_head(), &last);
        let ls_raw = head_at_column(self.enc_logsigma_head(), &last);
        Ok((inputs, pre, mu, ls_raw))
    }

    /// Posterior mean and (clamped) log standard deviation of the latent
    /// code, read at the last time step of the encoder output.
    pub fn encode(&self, x: &Tensor2) -> Result<(Vec<f64>, Vec<f64>)> {
        let (_, _, mu, ls_raw) = self.run_encoder(x)?;
        Ok((mu, ls_raw.into_iter().map(clamp_log_sigma).collect()))
    }

    fn run_decoder(&self, z: &[f64]) -> Result<(Vec<Tensor2>, Vec<Tensor2>, Tensor2, Tensor2)> {
        if z.len() != self.hyper.latent {
            return Err(FaeError::Shape(format!(
                "latent vector has length {}, expected {}",
                z.len(),
                self.hyper.latent
            )));
        }
        let mut inputs = Vec::with_capacity(self.depth + 1);
        let mut pre = Vec::with_capacity(self.depth);
        inputs.push(Tensor2::repeat_column(z, self.hyper.window)?);
        for layer in self.decoder_layers() {
            let a = dilated_causal_conv_forward(inputs.last().unwrap(), layer)?;
            inputs.push(relu_forward(&a));
            pre.push(a);
        }
        let top = inputs.last().unwrap();
        let mu_x = dilated_causal_conv_forward(top, self.dec_mu_head())?;
        let ls_raw = dilated_causal_conv_forward(top, self.dec_logsigma_head())?;
        Ok((inputs, pre, mu_x, ls_raw))
    }

    /// Expands `z` over the window and returns `(μ_X, σ_X)`.
    pub fn decode(&self, z: &[f64]) -> Result<(Tensor2, Tensor2)> {
        let (_, _, mu_x, ls_raw) = self.run_decoder(z)?;
        Ok((mu_x, sigma_from_raw(&ls_raw)))
    }

    /// Deterministic reconstruction through the posterior mean (`ε = 0`).
    pub fn reconstruct(&self, x: &Tensor2) -> Result<(Tensor2, Tensor2)> {
        let (mu_z, _) = self.encode(x)?;
        self.decode(&mu_z)
    }

    fn forward_trace(&self, x: &Tensor2, epsilon: &[f64]) -> Result<Trace> {
        let (enc_inputs, enc_pre, mu_z, logsigma_z_raw) = self.run_encoder(x)?;
        let logsigma_z: Vec<f64> = logsigma_z_raw.iter().copied().map(clamp_log_sigma).collect();
        let sample = reparameterize(&mu_z, &logsigma_z, epsilon)?;
        let (dec_inputs, dec_pre, mu_x, logsigma_x_raw) = self.run_decoder(&sample.z)?;
        let sigma_x = sigma_from_raw(&logsigma_x_raw);
        Ok(Trace {
            enc_inputs,
            enc_pre,
            mu_z,
            logsigma_z_raw,
            logsigma_z,
            sample,
            dec_inputs,
            dec_pre,
            mu_x,
            logsigma_x_raw,
            sigma_x,
        })
    }

    /// Negative ELBO of one window for a given noise draw, without gradients.
    pub fn loss(&self, x: &Tensor2, epsilon: &[f64]) -> Result<ElboTerms> {
        let tr = self.forward_trace(x, epsilon)?;
        elbo_terms(x, &tr.mu_x, &tr.sigma_x, &tr.mu_z, &tr.logsigma_z, self.hyper.beta)
    }

    /// Loss and exact pathwise gradients for one window with `epsilon` held
    /// fixed.
    pub fn forward_backward(&self, x: &Tensor2, epsilon: &[f64]) -> Result<Evaluation> {
        let tr = self.forward_trace(x, epsilon)?;
        let beta = self.hyper.beta;
        let terms = elbo_terms(x, &tr.mu_x, &tr.sigma_x, &tr.mu_z, &tr.logsigma_z, beta)?;
        let t_len = self.hyper.window;
        let n = self.depth;
        let mut grads = Gradients::zeros_like(self);

        // Output heads.
        let mut g_mu_x = Tensor2::zeros(1, t_len);
        let mut g_ls_x = Tensor2::zeros(1, t_len);
        for t in 0..t_len {
            let s = tr.sigma_x.get(0, t);
            let r = x.get(0, t) - tr.mu_x.get(0, t);
            let inv_var = 1.0 / (s * s);
            g_mu_x.set(0, t, -r * inv_var);
            if clamp_passes(tr.logsigma_x_raw.get(0, t)) {
                g_ls_x.set(0, t, 1.0 - r * r * inv_var);
            }
        }
        let top = &tr.dec_inputs[n];
        let (mut g_top, gw) = dilated_causal_conv_backward(&g_mu_x, top, self.dec_mu_head())?;
        grads.layers[2 * n + 2] = gw;
        let (g_top_ls, gw) = dilated_causal_conv_backward(&g_ls_x, top, self.dec_logsigma_head())?;
        grads.layers[2 * n + 3] = gw;
        add_into(&mut g_top, &g_top_ls);

        // Decoder stack, top to bottom.
        let mut g = g_top;
        for h in (0..n).rev() {
            let ga = relu_backward(&g, &tr.dec_pre[h])?;
            let (gi, gw) =
                dilated_causal_conv_backward(&ga, &tr.dec_inputs[h], &self.decoder_layers()[h])?;
            grads.layers[n + 2 + h] = gw;
            g = gi;
        }
        // The decoder input repeats z over time, so dL/dz sums over columns.
        let g_z: Vec<f64> = (0..self.hyper.latent).map(|j| g.channel(j).iter().sum()).collect();

        // Reparameterization and KL.
        let mut g_mu_z = vec![0.0; self.hyper.latent];
        let mut g_ls_z = vec![0.0; self.hyper.latent];
        for j in 0..self.hyper.latent {
            let ls = tr.logsigma_z[j];
            g_mu_z[j] = g_z[j] + beta * tr.mu_z[j];
            if clamp_passes(tr.logsigma_z_raw[j]) {
                g_ls_z[j] = g_z[j] * ls.exp() * tr.sample.epsilon[j]
                    + beta * ((2.0 * ls).exp() - 1.0);
            }
        }

        // Latent heads read only the last column of the final hidden layer.
        let last_col = t_len - 1;
        let hidden = &tr.enc_inputs[n];
        let u = self.hyper.filters;
        let mut g_hidden = Tensor2::zeros(u, t_len);
        for (head_idx, g_head) in [(n, &g_mu_z), (n + 1, &g_ls_z)] {
            let head = &self.layers[head_idx];
            let gw = &mut grads.layers[head_idx];
            for (j, &gj) in g_head.iter().enumerate() {
                for c in 0..u {
                    gw[j * u + c] = gj * hidden.get(c, last_col);
                    let prev = g_hidden.get(c, last_col);
                    g_hidden.set(c, last_col, prev + head.weights[j * u + c] * gj);
                }
            }
        }

        let mut g = g_hidden;
        for h in (0..n).rev() {
            let ga = relu_backward(&g, &tr.enc_pre[h])?;
            let (gi, gw) =
                dilated_causal_conv_backward(&ga, &tr.enc_inputs[h], &self.encoder_layers()[h])?;
            grads.layers[h] = gw;
            g = gi;
        }

        Ok(Evaluation { terms, grads })
    }

    /// Full forward pass returning the latent sample and output parameters.
    pub fn forward(&self, x: &Tensor2, epsilon: &[f64]) -> Result<(LatentSample, Tensor2, Tensor2)> {
        let tr = self.forward_trace(x, epsilon)?;
        Ok((tr.sample, tr.mu_x, tr.sigma_x))
    }
}

fn head_at_column(head: &ConvParams, column: &[f64]) -> Vec<f64> {
    let u = head.in_channels;
    (0..head.out_channels)
        .map(|j| head.weights[j * u..(j + 1) * u].iter().zip(column).map(|(w, h)| w * h).sum())
        .collect()
}

fn sigma_from_raw(raw: &Tensor2) -> Tensor2 {
    let mut s = raw.clone();
    for v in s.data_mut() {
        *v = clamp_log_sigma(*v).exp();
    }
    s
}

fn add_into(dst: &mut Tensor2, src: &Tensor2) {
    for (a, b) in dst.data_mut().iter_mut().zip(src.data()) {
        *a += b;
    }
}
