//! Dense channels×time tensors and the forward/backward passes of the
//! layers the auto-encoder is built from: bias-free dilated causal
//! convolutions and rectifiers.

use crate::error::{FaeError, Result};

/// Row-major `channels × length` array of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    channels: usize,
    length: usize,
    data: Vec<f64>,
}

impl Tensor2 {
    pub fn zeros(channels: usize, length: usize) -> Self {
        Self {
            channels,
            length,
            data: vec![0.0; channels * length],
        }
    }

    pub fn from_vec(channels: usize, length: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || length == 0 {
            return Err(FaeError::Shape(format!(
                "tensor dimensions must be positive, got {channels}x{length}"
            )));
        }
        if data.len() != channels * length {
            return Err(FaeError::Shape(format!(
                "expected {} values for {channels}x{length}, got {}",
                channels * length,
                data.len()
            )));
        }
        Ok(Self {
            channels,
            length,
            data,
        })
    }

    /// Single-channel tensor holding `values`.
    pub fn row(values: &[f64]) -> Result<Self> {
        Self::from_vec(1, values.len(), values.to_vec())
    }

    /// `column.len() × length` tensor whose every column equals `column`.
    pub fn repeat_column(column: &[f64], length: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(column.len() * length);
        for &v in column {
            data.extend(std::iter::repeat_n(v, length));
        }
        Self::from_vec(column.len(), length, data)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.data[c * self.length..(c + 1) * self.length]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.data[c * self.length..(c + 1) * self.length]
    }

    pub fn get(&self, c: usize, t: usize) -> f64 {
        self.data[c * self.length + t]
    }

    pub fn set(&mut self, c: usize, t: usize, v: f64) {
        self.data[c * self.length + t] = v;
    }

    /// Values of every channel at time `t`.
    pub fn column(&self, t: usize) -> Vec<f64> {
        (0..self.channels).map(|c| self.get(c, t)).collect()
    }

    pub fn same_shape(&self, other: &Tensor2) -> bool {
        self.channels == other.channels && self.length == other.length
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Sum over all elements of the elementwise product.
    pub fn dot(&self, other: &Tensor2) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }
}

/// Weights of one bias-free convolution layer, laid out
/// `out_channels × in_channels × kernel`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvParams {
    pub out_channels: usize,
    pub in_channels: usize,
    pub kernel: usize,
    pub dilation: usize,
    pub weights: Vec<f64>,
}

impl ConvParams {
    pub fn zeros(out_channels: usize, in_channels: usize, kernel: usize, dilation: usize) -> Self {
        Self {
            out_channels,
            in_channels,
            kernel,
            dilation,
            weights: vec![0.0; out_channels * in_channels * kernel],
        }
    }

    pub fn new(
        out_channels: usize,
        in_channels: usize,
        kernel: usize,
        dilation: usize,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if out_channels == 0 || in_channels == 0 || kernel == 0 || dilation == 0 {
            return Err(FaeError::Shape(format!(
                "conv dimensions must be positive: out={out_channels} in={in_channels} \
                 kernel={kernel} dilation={dilation}"
            )));
        }
        if weights.len() != out_channels * in_channels * kernel {
            return Err(FaeError::Shape(format!(
                "expected {} weights, got {}",
                out_channels * in_channels * kernel,
                weights.len()
            )));
        }
        Ok(Self {
            out_channels,
            in_channels,
            kernel,
            dilation,
            weights,
        })
    }

    pub fn weight_count(&self) -> usize {
        self.out_channels * self.in_channels * self.kernel
    }

    #[inline]
    fn index(&self, o: usize, i: usize, k: usize) -> usize {
        (o * self.in_channels + i) * self.kernel + k
    }

    pub fn weight(&self, o: usize, i: usize, k: usize) -> f64 {
        self.weights[self.index(o, i, k)]
    }

    /// Delay applied by tap `k`: the newest tap (`k = kernel-1`) reads the
    /// current sample.
    #[inline]
    pub fn tap_shift(&self, k: usize) -> usize {
        (self.kernel - 1 - k) * self.dilation
    }
}

fn check_input(input: &Tensor2, params: &ConvParams) -> Result<()> {
    if input.length == 0 {
        return Err(FaeError::Shape("zero-length input".into()));
    }
    if input.channels != params.in_channels {
        return Err(FaeError::Shape(format!(
            "conv expects {} input channels, got {}",
            params.in_channels, input.channels
        )));
    }
    Ok(())
}

/// `out[o,t] = Σ_i Σ_k w[o,i,k] · in[i, t − (F−1−k)·d]`, reading zeros
/// before the start of the sequence. Output length equals input length.
pub fn dilated_causal_conv_forward(input: &Tensor2, params: &ConvParams) -> Result<Tensor2> {
    check_input(input, params)?;
    let len = input.length;
    let mut out = Tensor2::zeros(params.out_channels, len);
    for o in 0..params.out_channels {
        let dst = out.channel_mut(o);
        for i in 0..params.in_channels {
            let src = input.channel(i);
            for k in 0..params.kernel {
                let shift = params.tap_shift(k);
                if shift >= len {
                    continue;
                }
                let w = params.weight(o, i, k);
                if w == 0.0 {
                    continue;
                }
                for (d, s) in dst[shift..].iter_mut().zip(&src[..len - shift]) {
                    *d += w * s;
                }
            }
        }
    }
    Ok(out)
}

/// Adjoint of [`dilated_causal_conv_forward`] with respect to both the
/// input and the weights. Returns `(grad_input, grad_weights)`.
pub fn dilated_causal_conv_backward(
    grad_output: &Tensor2,
    cached_input: &Tensor2,
    params: &ConvParams,
) -> Result<(Tensor2, Vec<f64>)> {
    check_input(cached_input, params)?;
    if grad_output.channels != params.out_channels || grad_output.length != cached_input.length {
        return Err(FaeError::Shape(format!(
            "grad_output is {}x{}, expected {}x{}",
            grad_output.channels, grad_output.length, params.out_channels, cached_input.length
        )));
    }
    let len = cached_input.length;
    let mut grad_input = Tensor2::zeros(params.in_channels, len);
    let mut grad_weights = vec![0.0; params.weight_count()];
    for o in 0..params.out_channels {
        let g = grad_output.channel(o);
        for i in 0..params.in_channels {
            let x = cached_input.channel(i);
            for k in 0..params.kernel {
                let shift = params.tap_shift(k);
                if shift >= len {
                    continue;
                }
                let idx = params.index(o, i, k);
                let gw: f64 = g[shift..].iter().zip(&x[..len - shift]).map(|(a, b)| a * b).sum();
                grad_weights[idx] += gw;
                let w = params.weights[idx];
                if w == 0.0 {
                    continue;
                }
                let gi = grad_input.channel_mut(i);
                for (d, s) in gi[..len - shift].iter_mut().zip(&g[shift..]) {
                    *d += w * s;
                }
            }
        }
    }
    Ok((grad_input, grad_weights))
}

/// Which direction [`relu_pointwise`] runs in.
#[derive(Debug, Clone, Copy)]
pub enum ReluMode<'a> {
    Forward,
    /// Backward pass given the upstream gradient; `input` is the cached
    /// pre-activation.
    Backward { grad: &'a Tensor2 },
}

/// Rectifier. Forward: `max(x, 0)`. Backward: passes `grad` where the
/// cached pre-activation is strictly positive (subgradient 0 at 0).
pub fn relu_pointwise(input: &Tensor2, mode: ReluMode<'_>) -> Result<Tensor2> {
    match mode {
        ReluMode::Forward => Ok(relu_forward(input)),
        ReluMode::Backward { grad } => relu_backward(grad, input),
    }
}

pub fn relu_forward(input: &Tensor2) -> Tensor2 {
    let mut out = input.clone();
    for v in out.data.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    out
}

pub fn relu_backward(grad: &Tensor2, cached_input: &Tensor2) -> Result<Tensor2> {
    if !grad.same_shape(cached_input) {
        return Err(FaeError::Shape(format!(
            "relu grad is {}x{}, cached input is {}x{}",
            grad.channels, grad.length, cached_input.channels, cached_input.length
        )));
    }
    let mut out = grad.clone();
    for (g, &x) in out.data.iter_mut().zip(&cached_input.data) {
        if x <= 0.0 {
            *g = 0.0;
        }
    }
    Ok(out)
}
