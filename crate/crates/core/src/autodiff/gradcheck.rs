//! Finite-difference verification of reverse-mode gradients.
//!
//! The checker never looks at the tape: it perturbs stored parameter values
//! one scalar at a time, re-runs a caller-supplied forward function, and
//! compares central differences against whatever gradients the caller has
//! accumulated in the store. That keeps the oracle independent of the code
//! it is checking.

use super::{ParamStore, Scalar};

/// One compared gradient entry.
#[derive(Clone, Debug)]
pub struct GradEntry {
    pub param: String,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_err: f64,
}

/// Outcome of a full store comparison.
#[derive(Clone, Debug)]
pub struct GradReport {
    /// Entry with the largest relative error, if anything was checked.
    pub worst: Option<GradEntry>,
    pub checked: usize,
}

impl GradReport {
    pub fn max_rel_err(&self) -> f64 {
        self.worst.as_ref().map_or(0.0, |e| e.rel_err)
    }
}

/// Central difference for a single parameter scalar: the value is nudged by
/// +/- `h`, `forward` is re-evaluated, and the original value restored.
pub fn central_difference<T: Scalar>(
    params: &mut ParamStore<T>,
    name: &str,
    index: usize,
    h: T,
    forward: &mut dyn FnMut(&ParamStore<T>) -> T,
) -> T {
    let original = params.get(name).expect("unknown parameter").value.data()[index];

    params.get_mut(name).unwrap().value.data_mut()[index] = original + h;
    let plus = forward(params);
    params.get_mut(name).unwrap().value.data_mut()[index] = original - h;
    let minus = forward(params);
    params.get_mut(name).unwrap().value.data_mut()[index] = original;

    (plus - minus) / (h + h)
}

/// Compares every accumulated gradient in `params` against central
/// differences of `forward`.
///
/// The caller is expected to have run one forward/backward pass and
/// [`ParamStore::accumulate_grads`] beforehand, so the grad buffers hold the
/// analytic derivatives of exactly the quantity `forward` computes.
///
/// Relative error uses a floored denominator so that near-zero gradient
/// pairs do not blow up the ratio: `|a - n| / max(|a|, |n|, floor)`.
pub fn compare<T: Scalar>(
    params: &mut ParamStore<T>,
    h: T,
    floor: f64,
    mut forward: impl FnMut(&ParamStore<T>) -> T,
) -> GradReport {
    let names: Vec<String> = params.iter().map(|(n, _)| n.to_string()).collect();
    let mut worst: Option<GradEntry> = None;
    let mut checked = 0;

    for name in names {
        let len = params.get(&name).unwrap().value.len();
        for index in 0..len {
            let analytic = params.get(&name).unwrap().grad.data()[index]
                .to_f64()
                .unwrap();
            let numeric = central_difference(params, &name, index, h, &mut forward)
                .to_f64()
                .unwrap();
            let denom = analytic.abs().max(numeric.abs()).max(floor);
            let rel_err = (analytic - numeric).abs() / denom;
            checked += 1;
            if worst.as_ref().map_or(true, |w| rel_err > w.rel_err) {
                worst = Some(GradEntry {
                    param: name.clone(),
                    index,
                    analytic,
                    numeric,
                    rel_err,
                });
            }
        }
    }
    GradReport { worst, checked }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{Tape, Tensor};

    use crate::autodiff::{BoundParams, ValueId};

    /// Forward pass used by the oracle tests: a two-layer composition with
    /// sigmoid, tanh, softmax attention and a cross-entropy at the end, deep
    /// enough to exercise most backward rules at once.
    fn forward(params: &ParamStore<f64>) -> (Tape<f64>, BoundParams, ValueId) {
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape);
        let x = tape.constant(Tensor::from_vec(
            3,
            2,
            vec![0.5, -1.2, 0.3, 0.8, -0.7, 0.1],
        ));
        let w1 = bound.id("w1");
        let b1 = bound.id("b1");
        let h0 = tape.matmul(x, w1).unwrap();
        let h1 = tape.add(h0, b1).unwrap();
        let h2 = tape.tanh(h1);
        let slope = bound.id("slope");
        let h3 = tape.prelu(h2, slope).unwrap();

        let w_attn = bound.id("w_attn");
        let scores = tape.matmul(h3, w_attn).unwrap();
        let scores_t = tape.transpose(scores);
        let alpha = tape.softmax_rows(scores_t);
        let ctx = tape.matmul(alpha, h3).unwrap();

        let w2 = bound.id("w2");
        let logits = tape.matmul(ctx, w2).unwrap();
        let probs = tape.sigmoid(logits);
        let loss = tape
            .bce(probs, Tensor::row(&[1.0, 0.0]), Tensor::row(&[2.0, 0.5]))
            .unwrap();
        (tape, bound, loss)
    }

    fn loss_value(params: &ParamStore<f64>) -> f64 {
        let (tape, _, loss) = forward(params);
        tape.value(loss).item()
    }

    fn seeded_params() -> ParamStore<f64> {
        let mut params = ParamStore::new();
        params.insert(
            "w1",
            Tensor::from_vec(2, 4, vec![0.3, -0.2, 0.5, 0.1, -0.4, 0.25, -0.15, 0.35]),
        );
        params.insert("b1", Tensor::row(&[0.05, -0.1, 0.2, 0.0]));
        params.insert("slope", Tensor::scalar(0.25));
        params.insert("w_attn", Tensor::column(&[0.7, -0.3, 0.2, 0.4]));
        params.insert(
            "w2",
            Tensor::from_vec(4, 2, vec![0.6, -0.5, 0.3, 0.2, -0.25, 0.45, 0.15, -0.35]),
        );
        params
    }

    #[test]
    fn reverse_mode_matches_central_differences() {
        let mut params = seeded_params();
        let (mut tape, bound, loss) = forward(&params);
        tape.backward(loss).unwrap();
        params.accumulate_grads(&tape, &bound);

        let report = compare(&mut params, 1e-5, 1e-6, loss_value);
        // w1 + b1 + slope + w_attn + w2 = 8 + 4 + 1 + 4 + 8 scalars.
        assert_eq!(report.checked, 25);
        assert!(
            report.max_rel_err() < 1e-6,
            "worst entry: {:?}",
            report.worst
        );
    }

    #[test]
    fn central_difference_restores_the_parameter() {
        let mut params = seeded_params();
        let before = params.get("w1").unwrap().value.clone();
        central_difference(&mut params, "w1", 3, 1e-5, &mut loss_value);
        assert_eq!(params.get("w1").unwrap().value, before);
    }
}
