use super::{Scalar, Tensor};
use crate::error::AutodiffError;

/// Handle to a value recorded on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ValueId(usize);

enum Op<T> {
    /// Input node: a constant or a bound parameter. No backward rule.
    Leaf,
    MatMul(ValueId, ValueId),
    /// Elementwise sum of two same-shape tensors.
    Add(ValueId, ValueId),
    /// (n, m) plus a (1, m) bias row added to every row. The only broadcast
    /// the engine supports.
    AddBiasRow(ValueId, ValueId),
    Hadamard(ValueId, ValueId),
    /// Concatenation along the column axis; inputs share a row count.
    ConcatCols(Vec<ValueId>),
    Transpose(ValueId),
    Sigmoid(ValueId),
    Tanh(ValueId),
    /// Parametric ReLU with a learnable 1x1 slope for the negative side.
    PRelu { x: ValueId, slope: ValueId },
    /// Row-wise softmax with max subtraction for stability.
    SoftmaxRows(ValueId),
    /// Column sums: (n, m) -> (1, m).
    SumRows(ValueId),
    /// Sum of every entry: (n, m) -> (1, 1).
    SumAll(ValueId),
    /// Elementwise mul * x + add with constant coefficients. Only the
    /// multiplier matters in reverse.
    Affine { x: ValueId, mul: T },
    /// Product of a 1x1 value with every entry of x.
    ScalarMul { s: ValueId, x: ValueId },
    /// Summed binary cross-entropy of predictions against constant labels,
    /// scaled by a fixed example weight. Produces a 1x1 loss.
    Bce { pred: ValueId, labels: Tensor<T>, weights: Tensor<T> },
}

struct Node<T> {
    op: Op<T>,
    value: Tensor<T>,
    grad: Tensor<T>,
}

/// Records forward operations and differentiates them in reverse.
///
/// A tape is built fresh for every forward pass: parameters are bound as
/// leaves, ops are appended, and [`Tape::backward`] fills every node's
/// gradient buffer. Creation order is topological by construction, so the
/// reverse sweep is a single backwards loop.
pub struct Tape<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Tape<T> {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: ValueId) -> &Tensor<T> {
        &self.nodes[id.0].value
    }

    pub fn grad(&self, id: ValueId) -> &Tensor<T> {
        &self.nodes[id.0].grad
    }

    fn push(&mut self, op: Op<T>, value: Tensor<T>) -> ValueId {
        let grad = Tensor::zeros(value.rows(), value.cols());
        self.nodes.push(Node { op, value, grad });
        ValueId(self.nodes.len() - 1)
    }

    fn shape_err(op: &'static str, a: &Tensor<T>, b: &Tensor<T>) -> AutodiffError {
        AutodiffError::ShapeMismatch {
            op,
            left: format!("{:?}", a.shape()),
            right: format!("{:?}", b.shape()),
        }
    }

    /// Records an input value with no backward rule. Used for both constants
    /// and parameter bindings; gradients of leaves are readable after
    /// `backward` either way.
    pub fn leaf(&mut self, value: Tensor<T>) -> ValueId {
        self.push(Op::Leaf, value)
    }

    /// Alias of [`Tape::leaf`] that signals intent at call sites.
    pub fn constant(&mut self, value: Tensor<T>) -> ValueId {
        self.leaf(value)
    }

    pub fn matmul(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, AutodiffError> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.cols() != bv.rows() {
            return Err(Self::shape_err("matmul", av, bv));
        }
        let value = av.matmul(bv);
        Ok(self.push(Op::MatMul(a, b), value))
    }

    /// Elementwise sum, or a bias-row add when `b` is (1, m) and `a` is
    /// (n, m).
    pub fn add(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, AutodiffError> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.shape() == bv.shape() {
            let value = av.zip(bv, |x, y| x + y);
            Ok(self.push(Op::Add(a, b), value))
        } else if bv.rows() == 1 && bv.cols() == av.cols() {
            let mut value = av.clone();
            for r in 0..value.rows() {
                for c in 0..value.cols() {
                    value.set(r, c, value.get(r, c) + bv.get(0, c));
                }
            }
            Ok(self.push(Op::AddBiasRow(a, b), value))
        } else {
            Err(Self::shape_err("add", av, bv))
        }
    }

    pub fn hadamard(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, AutodiffError> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.shape() != bv.shape() {
            return Err(Self::shape_err("hadamard", av, bv));
        }
        let value = av.zip(bv, |x, y| x * y);
        Ok(self.push(Op::Hadamard(a, b), value))
    }

    /// Concatenates along the column axis.
    pub fn concat_cols(&mut self, parts: &[ValueId]) -> Result<ValueId, AutodiffError> {
        assert!(!parts.is_empty(), "concat_cols needs at least one input");
        let rows = self.value(parts[0]).rows();
        let mut cols = 0;
        for &p in parts {
            let pv = self.value(p);
            if pv.rows() != rows {
                return Err(Self::shape_err("concat_cols", self.value(parts[0]), pv));
            }
            cols += pv.cols();
        }
        let mut value = Tensor::zeros(rows, cols);
        let mut offset = 0;
        for &p in parts {
            let pv = self.value(p).clone();
            for r in 0..rows {
                for c in 0..pv.cols() {
                    value.set(r, offset + c, pv.get(r, c));
                }
            }
            offset += pv.cols();
        }
        Ok(self.push(Op::ConcatCols(parts.to_vec()), value))
    }

    pub fn transpose(&mut self, a: ValueId) -> ValueId {
        let value = self.value(a).transpose();
        self.push(Op::Transpose(a), value)
    }

    pub fn sigmoid(&mut self, a: ValueId) -> ValueId {
        let value = self.value(a).map(stable_sigmoid);
        self.push(Op::Sigmoid(a), value)
    }

    pub fn tanh(&mut self, a: ValueId) -> ValueId {
        let value = self.value(a).map(|x| x.tanh());
        self.push(Op::Tanh(a), value)
    }

    /// PReLU with a learnable negative-side slope held in a 1x1 node.
    pub fn prelu(&mut self, x: ValueId, slope: ValueId) -> Result<ValueId, AutodiffError> {
        let sv = self.value(slope);
        if sv.shape() != (1, 1) {
            return Err(AutodiffError::NotScalar {
                op: "prelu slope",
                shape: format!("{:?}", sv.shape()),
            });
        }
        let a = sv.item();
        let value = self.value(x).map(|v| if v > T::zero() { v } else { a * v });
        Ok(self.push(Op::PRelu { x, slope }, value))
    }

    pub fn softmax_rows(&mut self, a: ValueId) -> ValueId {
        let av = self.value(a);
        let mut value = Tensor::zeros(av.rows(), av.cols());
        for r in 0..av.rows() {
            let row = av.row_slice(r);
            let max = row.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
            let exps: Vec<T> = row.iter().map(|&v| (v - max).exp()).collect();
            let total = exps.iter().fold(T::zero(), |s, &e| s + e);
            for (c, e) in exps.into_iter().enumerate() {
                value.set(r, c, e / total);
            }
        }
        self.push(Op::SoftmaxRows(a), value)
    }

    /// Column sums: (n, m) -> (1, m).
    pub fn sum_rows(&mut self, a: ValueId) -> ValueId {
        let av = self.value(a);
        let mut value = Tensor::zeros(1, av.cols());
        for r in 0..av.rows() {
            for c in 0..av.cols() {
                value.set(0, c, value.get(0, c) + av.get(r, c));
            }
        }
        self.push(Op::SumRows(a), value)
    }

    pub fn sum_all(&mut self, a: ValueId) -> ValueId {
        let total = self
            .value(a)
            .data()
            .iter()
            .fold(T::zero(), |s, &v| s + v);
        self.push(Op::SumAll(a), Tensor::scalar(total))
    }

    /// Elementwise `mul * x + add` with constant coefficients.
    pub fn affine(&mut self, x: ValueId, mul: T, add: T) -> ValueId {
        let value = self.value(x).map(|v| mul * v + add);
        self.push(Op::Affine { x, mul }, value)
    }

    /// `1 - x`, elementwise.
    pub fn one_minus(&mut self, x: ValueId) -> ValueId {
        self.affine(x, -T::one(), T::one())
    }

    /// Multiplies every entry of `x` by the 1x1 value `s`.
    pub fn scalar_mul(&mut self, s: ValueId, x: ValueId) -> Result<ValueId, AutodiffError> {
        let sv = self.value(s);
        if sv.shape() != (1, 1) {
            return Err(AutodiffError::NotScalar {
                op: "scalar_mul",
                shape: format!("{:?}", sv.shape()),
            });
        }
        let sc = sv.item();
        let value = self.value(x).map(|v| sc * v);
        Ok(self.push(Op::ScalarMul { s, x }, value))
    }

    /// Summed binary cross-entropy against constant labels, with one weight
    /// per element.
    ///
    /// Predictions are clamped to [eps, 1 - eps] before the logs; the same
    /// clamped value is used in the backward rule, so gradients stay finite
    /// even for saturated predictions.
    pub fn bce(
        &mut self,
        pred: ValueId,
        labels: Tensor<T>,
        weights: Tensor<T>,
    ) -> Result<ValueId, AutodiffError> {
        let pv = self.value(pred);
        if pv.shape() != labels.shape() {
            return Err(Self::shape_err("bce", pv, &labels));
        }
        if pv.shape() != weights.shape() {
            return Err(Self::shape_err("bce", pv, &weights));
        }
        let eps = T::bce_epsilon();
        let mut loss = T::zero();
        for ((&p, &y), &w) in pv.data().iter().zip(labels.data()).zip(weights.data()) {
            let p = clamp(p, eps, T::one() - eps);
            loss = loss - w * (y * p.ln() + (T::one() - y) * (T::one() - p).ln());
        }
        Ok(self.push(Op::Bce { pred, labels, weights }, Tensor::scalar(loss)))
    }

    /// `bce` with the same weight on every element.
    pub fn bce_uniform(
        &mut self,
        pred: ValueId,
        labels: Tensor<T>,
        weight: T,
    ) -> Result<ValueId, AutodiffError> {
        let (r, c) = labels.shape();
        let mut weights = Tensor::zeros(r, c);
        weights.fill(weight);
        self.bce(pred, labels, weights)
    }

    /// Reverse sweep from a scalar loss. Clears every gradient buffer, seeds
    /// the loss gradient with one, and walks the tape backwards. Repeating
    /// the call on an unchanged tape produces bitwise-identical gradients.
    pub fn backward(&mut self, loss: ValueId) -> Result<(), AutodiffError> {
        if self.value(loss).shape() != (1, 1) {
            return Err(AutodiffError::NotScalar {
                op: "backward",
                shape: format!("{:?}", self.value(loss).shape()),
            });
        }
        for node in &mut self.nodes {
            node.grad.fill(T::zero());
        }
        self.nodes[loss.0].grad.set(0, 0, T::one());

        for i in (0..self.nodes.len()).rev() {
            if self.nodes[i].grad.max_abs() == T::zero() {
                continue;
            }
            let grad = self.nodes[i].grad.clone();
            // Ops read values of their inputs and of the node itself; clones
            // keep the borrow checker out of the arithmetic.
            match &self.nodes[i].op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let (a, b) = (*a, *b);
                    let at = self.nodes[a.0].value.transpose();
                    let bt = self.nodes[b.0].value.transpose();
                    let ga = grad.matmul(&bt);
                    let gb = at.matmul(&grad);
                    self.nodes[a.0].grad.add_assign(&ga);
                    self.nodes[b.0].grad.add_assign(&gb);
                }
                Op::Add(a, b) => {
                    let (a, b) = (*a, *b);
                    self.nodes[a.0].grad.add_assign(&grad);
                    self.nodes[b.0].grad.add_assign(&grad);
                }
                Op::AddBiasRow(a, b) => {
                    let (a, b) = (*a, *b);
                    self.nodes[a.0].grad.add_assign(&grad);
                    let mut gb = Tensor::zeros(1, grad.cols());
                    for r in 0..grad.rows() {
                        for c in 0..grad.cols() {
                            gb.set(0, c, gb.get(0, c) + grad.get(r, c));
                        }
                    }
                    self.nodes[b.0].grad.add_assign(&gb);
                }
                Op::Hadamard(a, b) => {
                    let (a, b) = (*a, *b);
                    let ga = grad.zip(&self.nodes[b.0].value, |g, v| g * v);
                    let gb = grad.zip(&self.nodes[a.0].value, |g, v| g * v);
                    self.nodes[a.0].grad.add_assign(&ga);
                    self.nodes[b.0].grad.add_assign(&gb);
                }
                Op::ConcatCols(parts) => {
                    let parts = parts.clone();
                    let mut offset = 0;
                    for p in parts {
                        let pc = self.nodes[p.0].value.cols();
                        let mut gp = Tensor::zeros(grad.rows(), pc);
                        for r in 0..grad.rows() {
                            for c in 0..pc {
                                gp.set(r, c, grad.get(r, offset + c));
                            }
                        }
                        self.nodes[p.0].grad.add_assign(&gp);
                        offset += pc;
                    }
                }
                Op::Transpose(a) => {
                    let a = *a;
                    let ga = grad.transpose();
                    self.nodes[a.0].grad.add_assign(&ga);
                }
                Op::Sigmoid(a) => {
                    let a = *a;
                    let ga = grad.zip(&self.nodes[i].value, |g, y| g * y * (T::one() - y));
                    self.nodes[a.0].grad.add_assign(&ga);
                }
                Op::Tanh(a) => {
                    let a = *a;
                    let ga = grad.zip(&self.nodes[i].value, |g, y| g * (T::one() - y * y));
                    self.nodes[a.0].grad.add_assign(&ga);
                }
                Op::PRelu { x, slope } => {
                    let (x, slope) = (*x, *slope);
                    let a = self.nodes[slope.0].value.item();
                    let xv = self.nodes[x.0].value.clone();
                    let gx = grad.zip(&xv, |g, v| if v > T::zero() { g } else { a * g });
                    let gs = grad
                        .data()
                        .iter()
                        .zip(xv.data())
                        .fold(T::zero(), |s, (&g, &v)| {
                            if v > T::zero() {
                                s
                            } else {
                                s + g * v
                            }
                        });
                    self.nodes[x.0].grad.add_assign(&gx);
                    self.nodes[slope.0].grad.add_assign(&Tensor::scalar(gs));
                }
                Op::SoftmaxRows(a) => {
                    let a = *a;
                    let y = self.nodes[i].value.clone();
                    let mut ga = Tensor::zeros(y.rows(), y.cols());
                    for r in 0..y.rows() {
                        let mut dot = T::zero();
                        for c in 0..y.cols() {
                            dot = dot + grad.get(r, c) * y.get(r, c);
                        }
                        for c in 0..y.cols() {
                            ga.set(r, c, y.get(r, c) * (grad.get(r, c) - dot));
                        }
                    }
                    self.nodes[a.0].grad.add_assign(&ga);
                }
                Op::SumRows(a) => {
                    let a = *a;
                    let shape = self.nodes[a.0].value.shape();
                    let mut ga = Tensor::zeros(shape.0, shape.1);
                    for r in 0..shape.0 {
                        for c in 0..shape.1 {
                            ga.set(r, c, grad.get(0, c));
                        }
                    }
                    self.nodes[a.0].grad.add_assign(&ga);
                }
                Op::SumAll(a) => {
                    let a = *a;
                    let g = grad.item();
                    let shape = self.nodes[a.0].value.shape();
                    let mut ga = Tensor::zeros(shape.0, shape.1);
                    ga.fill(g);
                    self.nodes[a.0].grad.add_assign(&ga);
                }
                Op::Affine { x, mul } => {
                    let (x, mul) = (*x, *mul);
                    let ga = grad.map(|g| mul * g);
                    self.nodes[x.0].grad.add_assign(&ga);
                }
                Op::ScalarMul { s, x } => {
                    let (s, x) = (*s, *x);
                    let sc = self.nodes[s.0].value.item();
                    let gx = grad.map(|g| sc * g);
                    let gs = grad
                        .data()
                        .iter()
                        .zip(self.nodes[x.0].value.data())
                        .fold(T::zero(), |acc, (&g, &v)| acc + g * v);
                    self.nodes[x.0].grad.add_assign(&gx);
                    self.nodes[s.0].grad.add_assign(&Tensor::scalar(gs));
                }
                Op::Bce { pred, labels, weights } => {
                    let pred = *pred;
                    let labels = labels.clone();
                    let weights = weights.clone();
                    let g = grad.item();
                    let eps = T::bce_epsilon();
                    let mut gp = self.nodes[pred.0].value.zip(&labels, |p, y| {
                        let p = clamp(p, eps, T::one() - eps);
                        -g * (y / p - (T::one() - y) / (T::one() - p))
                    });
                    gp = gp.zip(&weights, |v, w| v * w);
                    self.nodes[pred.0].grad.add_assign(&gp);
                }
            }
        }
        Ok(())
    }
}

fn stable_sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

// Float::max/min would swallow NaN here; a diverged prediction must stay
// NaN so the caller can notice the loss went bad.
fn clamp<T: Scalar>(v: T, lo: T, hi: T) -> T {
    if v < lo {
        lo
    } else if v > hi {
        hi
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn sigmoid_of_zero_is_half() {
        let mut tape = Tape::new();
        let x = tape.constant(Tensor::row(&[0.0, 100.0, -100.0]));
        let y = tape.sigmoid(x);
        close(tape.value(y).get(0, 0), 0.5, 1e-15);
        close(tape.value(y).get(0, 1), 1.0, 1e-15);
        close(tape.value(y).get(0, 2), 0.0, 1e-15);
    }

    #[test]
    fn softmax_rows_are_distributions() {
        let mut tape = Tape::new();
        let x = tape.constant(Tensor::from_vec(2, 3, vec![1.0, 2.0, 3.0, -5.0, 0.0, 5.0]));
        let y = tape.softmax_rows(x);
        for r in 0..2 {
            let sum: f64 = tape.value(y).row_slice(r).iter().sum();
            close(sum, 1.0, 1e-12);
            assert!(tape.value(y).row_slice(r).iter().all(|&p| p > 0.0));
        }
    }

    #[test]
    fn softmax_of_equal_scores_is_uniform() {
        let mut tape = Tape::new();
        let x = tape.constant(Tensor::row(&[7.0, 7.0, 7.0, 7.0]));
        let y = tape.softmax_rows(x);
        for c in 0..4 {
            close(tape.value(y).get(0, c), 0.25, 1e-15);
        }
    }

    #[test]
    fn matmul_backward_matches_closed_form() {
        // f = sum(A B) with A 1x2, B 2x1: f = a0 b0 + a1 b1,
        // so df/dA = B^T and df/dB = A^T.
        let mut tape = Tape::new();
        let a = tape.leaf(Tensor::row(&[2.0, 3.0]));
        let b = tape.leaf(Tensor::column(&[5.0, 7.0]));
        let p = tape.matmul(a, b).unwrap();
        let loss = tape.sum_all(p);
        tape.backward(loss).unwrap();
        assert_eq!(tape.value(p).item(), 31.0);
        assert_eq!(tape.grad(a).data(), &[5.0, 7.0]);
        assert_eq!(tape.grad(b).data(), &[2.0, 3.0]);
    }

    #[test]
    fn bias_row_backward_sums_over_rows() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_vec(3, 2, vec![1.0; 6]));
        let b = tape.leaf(Tensor::row(&[0.5, -0.5]));
        let y = tape.add(x, b).unwrap();
        let loss = tape.sum_all(y);
        tape.backward(loss).unwrap();
        assert_eq!(tape.grad(b).data(), &[3.0, 3.0]);
        assert_eq!(tape.grad(x).data(), &[1.0; 6]);
    }

    #[test]
    fn concat_routes_gradients_to_the_right_slices() {
        let mut tape = Tape::new();
        let a = tape.leaf(Tensor::row(&[1.0, 2.0]));
        let b = tape.leaf(Tensor::row(&[3.0]));
        let cat = tape.concat_cols(&[a, b]).unwrap();
        assert_eq!(tape.value(cat).data(), &[1.0, 2.0, 3.0]);
        // Weight the three columns differently so routing errors show up.
        let w = tape.constant(Tensor::column(&[10.0, 20.0, 30.0]));
        let p = tape.matmul(cat, w).unwrap();
        tape.backward(p).unwrap();
        assert_eq!(tape.grad(a).data(), &[10.0, 20.0]);
        assert_eq!(tape.grad(b).data(), &[30.0]);
    }

    #[test]
    fn tanh_backward_uses_one_minus_square() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::scalar(0.5));
        let y = tape.tanh(x);
        tape.backward(y).unwrap();
        let t = 0.5f64.tanh();
        close(tape.grad(x).item(), 1.0 - t * t, 1e-15);
    }

    #[test]
    fn prelu_forward_and_slope_gradient() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::row(&[2.0, -4.0]));
        let slope = tape.leaf(Tensor::scalar(0.25));
        let y = tape.prelu(x, slope).unwrap();
        assert_eq!(tape.value(y).data(), &[2.0, -1.0]);
        let loss = tape.sum_all(y);
        tape.backward(loss).unwrap();
        assert_eq!(tape.grad(x).data(), &[1.0, 0.25]);
        // Only the negative entry contributes to the slope gradient.
        assert_eq!(tape.grad(slope).item(), -4.0);
    }

    #[test]
    fn bce_matches_hand_computed_loss_and_gradient() {
        let mut tape = Tape::new();
        let p = tape.leaf(Tensor::row(&[0.8, 0.3]));
        let loss = tape.bce_uniform(p, Tensor::row(&[1.0, 0.0]), 1.0).unwrap();
        let expected = -(0.8f64.ln() + 0.7f64.ln());
        close(tape.value(loss).item(), expected, 1e-12);
        tape.backward(loss).unwrap();
        close(tape.grad(p).get(0, 0), -1.0 / 0.8, 1e-12);
        close(tape.grad(p).get(0, 1), 1.0 / 0.7, 1e-12);
    }

    #[test]
    fn bce_weight_scales_loss_and_gradient() {
        let run = |w: f64| {
            let mut tape = Tape::new();
            let p = tape.leaf(Tensor::row(&[0.6]));
            let loss = tape.bce_uniform(p, Tensor::row(&[1.0]), w).unwrap();
            tape.backward(loss).unwrap();
            (tape.value(loss).item(), tape.grad(p).item())
        };
        let (l1, g1) = run(1.0);
        let (l2, g2) = run(2.0);
        close(l2, 2.0 * l1, 1e-12);
        close(g2, 2.0 * g1, 1e-12);
    }

    #[test]
    fn bce_stays_finite_on_saturated_predictions() {
        let mut tape = Tape::<f64>::new();
        let p = tape.leaf(Tensor::row(&[0.0, 1.0]));
        let loss = tape.bce_uniform(p, Tensor::row(&[1.0, 0.0]), 1.0).unwrap();
        assert!(tape.value(loss).item().is_finite());
        tape.backward(loss).unwrap();
        assert!(tape.grad(p).data().iter().all(|g| g.is_finite()));
    }

    #[test]
    fn gradients_accumulate_across_shared_inputs() {
        // y = x * x via hadamard with the same node on both sides.
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::scalar(3.0));
        let y = tape.hadamard(x, x).unwrap();
        tape.backward(y).unwrap();
        assert_eq!(tape.grad(x).item(), 6.0);
    }

    #[test]
    fn backward_twice_gives_identical_gradients() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::row(&[0.3, -0.7, 1.1]));
        let s = tape.sigmoid(x);
        let loss = tape.sum_all(s);
        tape.backward(loss).unwrap();
        let first = tape.grad(x).clone();
        tape.backward(loss).unwrap();
        assert_eq!(tape.grad(x), &first);
    }

    #[test]
    fn backward_rejects_non_scalar_roots() {
        let mut tape = Tape::<f64>::new();
        let x = tape.leaf(Tensor::row(&[1.0, 2.0]));
        assert!(matches!(
            tape.backward(x),
            Err(AutodiffError::NotScalar { .. })
        ));
    }

    #[test]
    fn add_rejects_incompatible_shapes() {
        let mut tape = Tape::<f64>::new();
        let a = tape.leaf(Tensor::zeros(2, 3));
        let b = tape.leaf(Tensor::zeros(3, 2));
        assert!(matches!(
            tape.add(a, b),
            Err(AutodiffError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn scalar_mul_backward() {
        let mut tape = Tape::new();
        let s = tape.leaf(Tensor::scalar(2.0));
        let x = tape.leaf(Tensor::row(&[1.0, 4.0]));
        let y = tape.scalar_mul(s, x).unwrap();
        let loss = tape.sum_all(y);
        tape.backward(loss).unwrap();
        assert_eq!(tape.value(y).data(), &[2.0, 8.0]);
        assert_eq!(tape.grad(x).data(), &[2.0, 2.0]);
        assert_eq!(tape.grad(s).item(), 5.0);
    }
}
