use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { test_fraction: 0.2, seed: 0 }
    }
}

/// Seeded shuffle of `0..m`; the last `ceil(test_fraction * m)` indices form
/// the test part. Both parts are kept nonempty.
pub fn split_indices(m: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::Config(format!("test_fraction {} outside (0, 1)", spec.test_fraction)));
    }
    if m < 2 {
        return Err(Error::Config(format!("cannot split {m} rows")));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let n_test = ((spec.test_fraction * m as f64).ceil() as usize).clamp(1, m - 1);
    let test = order.split_off(m - n_test);
    Ok((order, test))
}

pub fn split<F: Scalar>(data: &Dataset<F>, spec: &SplitSpec) -> Result<(Dataset<F>, Dataset<F>)> {
    let (train, test) = split_indices(data.n_rows(), spec)?;
    Ok((data.select(&train)?, data.select(&test)?))
}
