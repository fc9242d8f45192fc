//! Seeded synthetic datasets used as bundled fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal, Poisson};

use crate::data::{Dataset, Label};
use crate::scalar::Scalar;

pub const DIABETES_ROWS: usize = 768;
pub const DIABETES_COLS: usize = 8;

/// 768×8 stand-in for the diabetes benchmark: clinical-looking features
/// (pregnancies, glucose, blood pressure, skin fold, insulin, BMI, pedigree,
/// age) with a noisy logistic label, about a third positive.
pub fn diabetes_like(seed: u64) -> Dataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let preg = Poisson::<f64>::new(3.8).unwrap();
    let glucose = Normal::<f64>::new(121.0, 32.0).unwrap();
    let pressure = Normal::<f64>::new(69.0, 12.0).unwrap();
    let skin = Normal::<f64>::new(29.0, 10.0).unwrap();
    let insulin = LogNormal::new(120.0_f64.ln(), 0.6).unwrap();
    let bmi = Normal::<f64>::new(32.4, 6.9).unwrap();
    let pedigree = LogNormal::new(0.38_f64.ln(), 0.6).unwrap();
    let age = Exp::<f64>::new(1.0 / 12.0).unwrap();

    let mut features = Vec::with_capacity(DIABETES_ROWS * DIABETES_COLS);
    let mut labels = Vec::with_capacity(DIABETES_ROWS);
    for _ in 0..DIABETES_ROWS {
        let row = [
            preg.sample(&mut rng).min(17.0),
            glucose.sample(&mut rng).clamp(40.0, 199.0).round(),
            pressure.sample(&mut rng).clamp(24.0, 122.0).round(),
            skin.sample(&mut rng).clamp(7.0, 99.0).round(),
            insulin.sample(&mut rng).clamp(14.0, 846.0).round(),
            (bmi.sample(&mut rng).clamp(18.0, 67.0) * 10.0).round() / 10.0,
            (pedigree.sample(&mut rng).clamp(0.078, 2.42) * 1000.0).round() / 1000.0,
            (21.0 + age.sample(&mut rng)).min(81.0).round(),
        ];
        let logit = -0.8
            + 1.1 * (row[1] - 121.0) / 32.0
            + 0.7 * (row[5] - 32.4) / 6.9
            + 0.4 * (row[7] - 33.0) / 12.0
            + 0.3 * (row[6] - 0.47) / 0.33
            + 0.2 * (row[0] - 3.8) / 2.0;
        let p = 1.0 / (1.0 + (-logit).exp());
        labels.push(if rng.random_bool(p) { Label::Positive } else { Label::Negative });
        features.extend_from_slice(&row);
    }
    Dataset::from_flat(features, DIABETES_COLS, labels).expect("finite synthetic features")
}

/// Threshold used by [`stump_learnable`].
pub const STUMP_THRESHOLD: f64 = 0.37;

/// `m` points uniform on `[0, 1]^4`, labeled `+1` iff `x0 > 0.37`. A single
/// stump on feature 0 realizes the target.
pub fn stump_learnable<F: Scalar>(m: usize, seed: u64) -> Dataset<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(m * 4);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let row: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
        labels.push(if row[0] > STUMP_THRESHOLD { Label::Positive } else { Label::Negative });
        features.extend(row.iter().map(|&v| F::lit(v)));
    }
    Dataset::from_flat(features, 4, labels).expect("finite synthetic features")
}
