use indexmap::IndexMap;

use super::Tensor2;
use crate::{Error, Result};

/// Named parameters with same-shape gradient buffers, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet {
    index: IndexMap<String, usize>,
    pub(crate) values: Vec<Tensor2>,
    pub(crate) grads: Vec<Tensor2>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor2) -> Result<()> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::Config(format!("duplicate parameter `{name}`")));
        }
        let (r, c) = value.shape();
        self.index.insert(name, self.values.len());
        self.values.push(value);
        self.grads.push(Tensor2::zeros(r, c));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total number of scalar entries.
    pub fn num_entries(&self) -> usize {
        self.values.iter().map(Tensor2::len).sum()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub(crate) fn slot(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownParam(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Result<&Tensor2> {
        Ok(&self.values[self.slot(name)?])
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Tensor2> {
        let i = self.slot(name)?;
        Ok(&mut self.values[i])
    }

    pub fn grad(&self, name: &str) -> Result<&Tensor2> {
        Ok(&self.grads[self.slot(name)?])
    }

    pub fn grad_mut(&mut self, name: &str) -> Result<&mut Tensor2> {
        let i = self.slot(name)?;
        Ok(&mut self.grads[i])
    }

    /// `(name, value, grad)` in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor2, &Tensor2)> {
        self.index
            .iter()
            .map(|(n, &i)| (n.as_str(), &self.values[i], &self.grads[i]))
    }

    /// `(name, value, grad)` with mutable values.
    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Tensor2, &Tensor2)> {
        // Slots are assigned in insertion order, so keys line up with values.
        self.index
            .keys()
            .map(String::as_str)
            .zip(self.values.iter_mut())
            .zip(self.grads.iter())
            .map(|((n, v), g)| (n, v, g))
    }

    pub fn zero_grads(&mut self) {
        for g in &mut self.grads {
            g.fill(0.0);
        }
    }

    pub fn grad_norm(&self) -> f64 {
        self.grads
            .iter()
            .flat_map(|g| g.data())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale_grads(&mut self, factor: f64) {
        for g in &mut self.grads {
            g.data_mut().iter_mut().for_each(|v| *v *= factor);
        }
    }

    /// Copies parameter values (not gradients) from `other`, which must have
    /// the same names and shapes.
    pub fn copy_values_from(&mut self, other: &ParamSet) -> Result<()> {
        if self.index.keys().ne(other.index.keys()) {
            return Err(Error::Config("parameter sets have different names".into()));
        }
        for (dst, src) in self.values.iter_mut().zip(&other.values) {
            if dst.shape() != src.shape() {
                return Err(Error::shape("copy_values_from", format!("{:?}", dst.shape()), format!("{:?}", src.shape())));
            }
            dst.data_mut().copy_from_slice(src.data());
        }
        Ok(())
    }
}
