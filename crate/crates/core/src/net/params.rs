use std::collections::HashMap;

/// Handle to one tensor in a [`ParamTree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParamId(pub(crate) usize);

/// A named row-major tensor with its gradient slot.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub shape: Vec<usize>,
    pub value: Vec<f64>,
    pub grad: Vec<f64>,
}

/// Named parameters of one network, in registration order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamTree {
    params: Vec<Param>,
    index: HashMap<String, usize>,
    skipped_updates: u64,
}

impl ParamTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a tensor. Panics on a duplicate name or a shape/length mismatch.
    pub fn add(&mut self, name: impl Into<String>, shape: Vec<usize>, value: Vec<f64>) -> ParamId {
        let name = name.into();
        assert_eq!(shape.iter().product::<usize>(), value.len(), "shape mismatch for {name}");
        assert!(!self.index.contains_key(&name), "duplicate parameter {name}");
        let id = self.params.len();
        self.index.insert(name.clone(), id);
        let grad = vec![0.0; value.len()];
        self.params.push(Param {
            name,
            shape,
            value,
            grad,
        });
        ParamId(id)
    }

    pub fn get(&self, id: ParamId) -> &Param {
        &self.params[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Param {
        &mut self.params[id.0]
    }

    pub fn value(&self, id: ParamId) -> &[f64] {
        &self.params[id.0].value
    }

    pub fn by_name(&self, name: &str) -> Option<&Param> {
        self.index.get(name).map(|&i| &self.params[i])
    }

    pub fn by_name_mut(&mut self, name: &str) -> Option<&mut Param> {
        self.index.get(name).map(|&i| &mut self.params[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Param> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Param> {
        self.params.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar parameters.
    pub fn numel(&self) -> usize {
        self.params.iter().map(|p| p.value.len()).sum()
    }

    pub fn zero_grad(&mut self) {
        for p in &mut self.params {
            p.grad.iter_mut().for_each(|g| *g = 0.0);
        }
    }

    /// Number of updates rejected because of a non-finite gradient.
    pub fn skipped_updates(&self) -> u64 {
        self.skipped_updates
    }

    pub fn set_skipped_updates(&mut self, n: u64) {
        self.skipped_updates = n;
    }

    /// Plain gradient descent `p ← p − lr·g`, then zeroes the gradients.
    ///
    /// If any gradient entry is NaN or infinite nothing is written, the
    /// skip counter is bumped and `false` is returned.
    pub fn sgd_step(&mut self, learning_rate: f64) -> bool {
        if !self.grads_finite() {
            self.reject_step();
            return false;
        }
        for p in &mut self.params {
            for (v, g) in p.value.iter_mut().zip(&p.grad) {
                *v -= learning_rate * g;
            }
        }
        self.zero_grad();
        true
    }

    pub fn grads_finite(&self) -> bool {
        self.params.iter().all(|p| p.grad.iter().all(|g| g.is_finite()))
    }

    /// Discards the pending gradients of a rejected update.
    pub(crate) fn reject_step(&mut self) {
        self.skipped_updates += 1;
        self.zero_grad();
    }

    /// Bitwise equality of all values (gradients ignored).
    pub fn same_values(&self, other: &ParamTree) -> bool {
        self.params.len() == other.params.len()
            && self.params.iter().zip(&other.params).all(|(a, b)| {
                a.name == b.name
                    && a.shape == b.shape
                    && a.value.iter().zip(&b.value).all(|(x, y)| x.to_bits() == y.to_bits())
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_tree(v: f64, g: f64) -> ParamTree {
        let mut t = ParamTree::new();
        let id = t.add("p", vec![1], vec![v]);
        t.get_mut(id).grad[0] = g;
        t
    }

    #[test]
    fn sgd_definition() {
        let mut t = scalar_tree(1.0, 2.0);
        assert!(t.sgd_step(0.1));
        assert!((t.by_name("p").unwrap().value[0] - 0.8).abs() < 1e-15);
        assert_eq!(t.by_name("p").unwrap().grad[0], 0.0);
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut t = scalar_tree(1.5, 0.0);
        let before = t.clone();
        t.sgd_step(0.3);
        assert!(t.same_values(&before));
    }

    #[test]
    fn nan_gradient_skips_whole_update() {
        let mut t = ParamTree::new();
        let a = t.add("a", vec![2], vec![1.0, 2.0]);
        let b = t.add("b", vec![1], vec![3.0]);
        t.get_mut(a).grad = vec![1.0, 1.0];
        t.get_mut(b).grad[0] = f64::NAN;
        let before = t.clone();
        assert!(!t.sgd_step(0.5));
        assert!(t.same_values(&before));
        assert_eq!(t.skipped_updates(), 1);
        assert!(t.iter().all(|p| p.grad.iter().all(|g| *g == 0.0)));
    }

    #[test]
    #[should_panic(expected = "duplicate")]
    fn names_are_unique() {
        let mut t = ParamTree::new();
        t.add("w", vec![1], vec![0.0]);
        t.add("w", vec![1], vec![0.0]);
    }
}
