//! Per-channel standardization with training-set statistics.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Dataset, Sample};
use crate::scalar::Real;

/// Pooled per-channel mean and population standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ChannelStats {
    /// Two-pass pooled statistics over every pixel of every image. A constant
    /// channel gets its value as mean and a standard deviation of exactly 0.
    pub fn from_dataset<T: Real>(ds: &Dataset<T>) -> Self {
        let channels = ds.channels();
        let mut mean = vec![0.0; channels];
        let mut std = vec![0.0; channels];
        for c in 0..channels {
            let count: usize = ds.items().iter().map(|s| s.image.shape().len()).sum();
            let sum: f64 = ds.items().iter().flat_map(|s| s.image.channel(c).iter()).map(|v| v.as_f64()).sum();
            let mut values = ds.items().iter().flat_map(|s| s.image.channel(c).iter());
            let first = values.next().map_or(0.0, |v| v.as_f64());
            if values.all(|v| v.as_f64() == first) {
                mean[c] = first;
                continue;
            }
            let m = sum / count as f64;
            let ss: f64 =
                ds.items().iter().flat_map(|s| s.image.channel(c).iter()).map(|v| (v.as_f64() - m).powi(2)).sum();
            mean[c] = m;
            std[c] = (ss / count as f64).sqrt();
        }
        ChannelStats { mean, std }
    }

    /// `(v - mean) / std`; channels with zero spread are only mean-subtracted.
    pub fn apply<T: Real>(&self, ds: &Dataset<T>) -> Result<Dataset<T>> {
        let items = ds
            .items()
            .iter()
            .map(|s| {
                let image = s.image.map_channels(|c, v| {
                    let centered = v.as_f64() - self.mean[c];
                    let sd = self.std[c];
                    T::of(if sd > 0.0 { centered / sd } else { centered })
                })?;
                Ok(Sample { name: s.name.clone(), image, mask: s.mask.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(items)
    }
}

/// Standardizes a training set and returns the statistics for reuse on
/// validation and test data.
pub fn normalize_dataset<T: Real>(ds: &Dataset<T>) -> Result<(Dataset<T>, ChannelStats)> {
    let stats = ChannelStats::from_dataset(ds);
    Ok((stats.apply(ds)?, stats))
}
