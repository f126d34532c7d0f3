use serde::{Deserialize, Serialize};

use super::features::FeatureStack;
use crate::error::{Error, Result};
use crate::grid::ProbMap;
use crate::scalar::Real;

/// Weights of the pixelwise logistic model `P = sigmoid(w·f + b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamVector<T> {
    pub weights: Vec<T>,
    pub bias: T,
}

impl<T: Real> ParamVector<T> {
    pub fn zeros(dim: usize) -> Self {
        ParamVector { weights: vec![T::zero(); dim], bias: T::zero() }
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }

    fn ensure_dim(&self, dim: usize) -> Result<()> {
        if self.weights.len() != dim {
            return Err(Error::Validation(format!(
                "model has {} weights, features have dimension {dim}",
                self.weights.len()
            )));
        }
        Ok(())
    }
}

/// Pre-sigmoid activations `w·f_p + b`.
pub fn logits<T: Real>(params: &ParamVector<T>, features: &FeatureStack<T>) -> Result<Vec<T>> {
    params.ensure_dim(features.dim())?;
    Ok(features.rows().map(|f| f.iter().zip(&params.weights).fold(params.bias, |acc, (&x, &w)| acc + w * x)).collect())
}

pub fn predict<T: Real>(params: &ParamVector<T>, features: &FeatureStack<T>) -> Result<ProbMap<T>> {
    let z = logits(params, features)?;
    ProbMap::from_logits(features.shape(), &z)
}
