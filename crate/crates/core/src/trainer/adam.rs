use crate::error::{FaeError, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Adam moment accumulators over a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step: u64,
}

impl OptimizerState {
    pub fn new(len: usize) -> Self {
        Self {
            first_moment: vec![0.0; len],
            second_moment: vec![0.0; len],
            step: 0,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut OptimizerState,
    learning_rate: f64,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.first_moment.len() {
        return Err(FaeError::Shape(format!(
            "adam: {} params, {} grads, {} state slots",
            params.len(),
            grads.len(),
            state.first_moment.len()
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - BETA1.powi(t);
    let c2 = 1.0 - BETA2.powi(t);
    for (((p, &g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(state.first_moment.iter_mut())
        .zip(state.second_moment.iter_mut())
    {
        *m = BETA1 * *m + (1.0 - BETA1) * g;
        *v = BETA2 * *v + (1.0 - BETA2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= learning_rate * m_hat / (v_hat.sqrt() + EPSILON);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_weights() {
        let mut p = vec![1.0, -2.0, 3.5];
        let mut s = OptimizerState::new(3);
        adam_step(&mut p, &[0.0; 3], &mut s, 0.1).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 3.5]);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn first_step_is_learning_rate_times_sign() {
        let mut p = vec![0.0];
        let mut s = OptimizerState::new(1);
        adam_step(&mut p, &[3.0], &mut s, 0.001).unwrap();
        // m̂ = 3, v̂ = 9, so Δ = −0.001·3/(3 + 1e−8)
        let expect = -0.001 * 3.0 / (3.0 + 1e-8);
        assert!((p[0] - expect).abs() < 1e-18);
        assert!((p[0] + 0.001).abs() < 1e-11);
    }

    #[test]
    fn deterministic_and_shape_checked() {
        let run = || {
            let mut p = vec![0.5, -0.25];
            let mut s = OptimizerState::new(2);
            for i in 0..5 {
                adam_step(&mut p, &[0.1 * i as f64, -0.3], &mut s, 0.01).unwrap();
            }
            (p, s)
        };
        assert_eq!(run(), run());
        let mut s = OptimizerState::new(2);
        assert!(adam_step(&mut [0.0; 2], &[0.0; 3], &mut s, 0.1).is_err());
    }
}
