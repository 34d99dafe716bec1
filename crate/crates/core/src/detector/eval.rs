use crate::error::{FaeError, Result};

/// Point-wise confusion matrix and derived metrics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalReport {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            tp,
            fp,
            fn_,
            tn,
            precision,
            recall,
            f1,
        }
    }

    /// Pools the confusion counts of several reports.
    pub fn pooled<'a>(reports: impl IntoIterator<Item = &'a EvalReport>) -> Self {
        let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
        for r in reports {
            tp += r.tp;
            fp += r.fp;
            fn_ += r.fn_;
            tn += r.tn;
        }
        Self::from_counts(tp, fp, fn_, tn)
    }
}

pub fn evaluate_pointwise(flags: &[u8], labels: &[u8]) -> Result<EvalReport> {
    if flags.len() != labels.len() {
        return Err(FaeError::Shape(format!(
            "{} flags vs {} labels",
            flags.len(),
            labels.len()
        )));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&f, &l) in flags.iter().zip(labels) {
        match (f != 0, l != 0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(EvalReport::from_counts(tp, fp, fn_, tn))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_flags() {
        let r = evaluate_pointwise(&[0, 1, 1, 0], &[0, 1, 1, 0]).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn silent_detector() {
        let r = evaluate_pointwise(&[0, 0, 0], &[0, 1, 0]).unwrap();
        assert_eq!((r.recall, r.f1), (0.0, 0.0));
    }

    #[test]
    fn hand_counted() {
        let r = evaluate_pointwise(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_, r.tn), (1, 1, 1, 1));
        assert_eq!((r.precision, r.recall, r.f1), (0.5, 0.5, 0.5));
        assert!(evaluate_pointwise(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn pooling_sums_counts() {
        let a = evaluate_pointwise(&[1, 0], &[1, 1]).unwrap();
        let b = evaluate_pointwise(&[1, 1], &[0, 1]).unwrap();
        let p = EvalReport::pooled([&a, &b]);
        assert_eq!((p.tp, p.fp, p.fn_, p.tn), (2, 1, 1, 0));
    }
}
