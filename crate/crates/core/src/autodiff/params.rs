use std::collections::BTreeMap;

use super::{Scalar, Tape, Tensor, ValueId};

/// A named trainable tensor with its accumulated gradient.
#[derive(Clone, Debug)]
pub struct Param<T> {
    pub value: Tensor<T>,
    pub grad: Tensor<T>,
}

/// Named parameter collection, ordered by name.
///
/// The store owns the long-lived values; each forward pass binds them onto a
/// fresh tape with [`ParamStore::bind`] and pulls the resulting leaf
/// gradients back with [`ParamStore::accumulate_grads`]. Ordering by name
/// keeps binding, checkpointing, and optimizer walks deterministic.
#[derive(Clone, Debug, Default)]
pub struct ParamStore<T> {
    params: BTreeMap<String, Param<T>>,
}

impl<T: Scalar> ParamStore<T> {
    pub fn new() -> Self {
        ParamStore { params: BTreeMap::new() }
    }

    /// Registers a tensor under a name. Names are code-controlled and must be
    /// unique and whitespace-free (the checkpoint format is line-oriented).
    pub fn insert(&mut self, name: &str, value: Tensor<T>) {
        debug_assert!(
            !name.chars().any(char::is_whitespace),
            "parameter name {name:?} contains whitespace"
        );
        let grad = Tensor::zeros(value.rows(), value.cols());
        let previous = self.params.insert(name.to_string(), Param { value, grad });
        assert!(previous.is_none(), "duplicate parameter name {name}");
    }

    pub fn get(&self, name: &str) -> Option<&Param<T>> {
        self.params.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Param<T>> {
        self.params.get_mut(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.params.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar entries across all parameters.
    pub fn scalar_count(&self) -> usize {
        self.params.values().map(|p| p.value.len()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Param<T>)> {
        self.params.iter().map(|(n, p)| (n.as_str(), p))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Param<T>)> {
        self.params.iter_mut().map(|(n, p)| (n.as_str(), p))
    }

    pub fn zero_grads(&mut self) {
        for p in self.params.values_mut() {
            p.grad.fill(T::zero());
        }
    }

    /// Records every parameter value as a leaf on `tape`, in name order.
    pub fn bind(&self, tape: &mut Tape<T>) -> BoundParams {
        let mut ids = BTreeMap::new();
        for (name, param) in &self.params {
            ids.insert(name.clone(), tape.leaf(param.value.clone()));
        }
        BoundParams { ids }
    }

    /// Adds the leaf gradients captured on `tape` into the store. Calling
    /// this once per example accumulates over a batch; the caller zeroes
    /// grads between optimizer steps.
    pub fn accumulate_grads(&mut self, tape: &Tape<T>, bound: &BoundParams) {
        for (name, id) in &bound.ids {
            let param = self
                .params
                .get_mut(name)
                .unwrap_or_else(|| panic!("bound parameter {name} missing from store"));
            param.grad.add_assign(tape.grad(*id));
        }
    }
}

/// Map from parameter name to its leaf on one particular tape.
pub struct BoundParams {
    ids: BTreeMap<String, ValueId>,
}

impl BoundParams {
    pub fn id(&self, name: &str) -> ValueId {
        *self
            .ids
            .get(name)
            .unwrap_or_else(|| panic!("parameter {name} was not bound"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bind_then_accumulate_round_trips_gradients() {
        let mut store = ParamStore::new();
        store.insert("w", Tensor::row(&[2.0, -1.0]));

        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let w = bound.id("w");
        let s = tape.hadamard(w, w).unwrap();
        let loss = tape.sum_all(s);
        tape.backward(loss).unwrap();

        store.accumulate_grads(&tape, &bound);
        assert_eq!(store.get("w").unwrap().grad.data(), &[4.0, -2.0]);

        // A second accumulation doubles the stored gradient.
        store.accumulate_grads(&tape, &bound);
        assert_eq!(store.get("w").unwrap().grad.data(), &[8.0, -4.0]);

        store.zero_grads();
        assert_eq!(store.get("w").unwrap().grad.data(), &[0.0, 0.0]);
    }

    #[test]
    #[should_panic(expected = "duplicate parameter")]
    fn duplicate_names_are_rejected() {
        let mut store = ParamStore::<f64>::new();
        store.insert("w", Tensor::zeros(1, 1));
        store.insert("w", Tensor::zeros(1, 1));
    }
}
