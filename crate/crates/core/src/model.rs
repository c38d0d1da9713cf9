//! Public SVM model: normalisation parameters, weights, quantized weights and
//! the sigmoid decision.
//!
//! Model file (TOML):
//!
//! ```toml
//! label = "zksvm-demo-v1"   # generator label
//! n = 128                   # padded vector length, power of two
//! digits = 6                # d, decimal digits kept by quantization
//! intercept = 0.25          # c
//! threshold = 0.5           # human iff s ≥ threshold
//!
//! [encoding]
//! offset = 32.0
//! scale_digits = 4
//! bits = 20
//!
//! [[features]]
//! vector = "acc_x_pre"      # {acc|gyro}_{x|y|z}_{pre|post}
//! stat = "mean"             # mean | std | diff_mean | diff_std
//! mean = 320000.0           # M_i
//! scale = 1500.0            # S_i
//! weight = 0.8              # w_i
//! ```
//!
//! Feature values are in encoded units: the mean of the committed integers
//! (`Avg / N`) and their population standard deviation
//! (`Std / N^{3/2}`). Features not listed get weight zero.
//!
//! The quantized weight of feature `i` is `q_i = ⌊w_i·10^d / (N_i·S_i)⌋`
//! with `N_i = N` for means and `N^{3/2}` for standard deviations, computed
//! exactly (the `f64` inputs are treated as the dyadic rationals they are).
//! The offsets `M_i` touch no secret, so they fold into the intercept:
//! `c′ = c − Σ M_i·w_i/S_i`, and the score is
//! `s = 1 / (1 + exp(−(c′ + Score/10^d)))`.

use std::path::Path;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::errors::Error;
use crate::features::{EncodingConfig, VECTOR_COUNT, VECTOR_NAMES};

/// Statistics per input vector, in feature-index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stat {
    Mean,
    DiffMean,
    Std,
    DiffStd,
}

impl Stat {
    pub const ALL: [Stat; 4] = [Stat::Mean, Stat::DiffMean, Stat::Std, Stat::DiffStd];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Stat::Mean => "mean",
            Stat::DiffMean => "diff_mean",
            Stat::Std => "std",
            Stat::DiffStd => "diff_std",
        }
    }

    pub fn is_std(self) -> bool {
        matches!(self, Stat::Std | Stat::DiffStd)
    }
}

pub const FEATURE_COUNT: usize = VECTOR_COUNT * 4;

/// Index of `(vector, stat)` in the flat feature list.
pub fn feature_index(vector: usize, stat: Stat) -> usize {
    vector * 4 + stat.index()
}

/// The factor `N_i` between a committed feature and the feature itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormFactor {
    /// `N_i = N`.
    Linear(u64),
    /// `N_i = N^{3/2}`.
    ThreeHalves(u64),
}

/// `(mantissa, exponent)` with `x = mantissa · 2^exponent` exactly.
fn dyadic(x: f64) -> Result<(BigInt, i32), Error> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite model parameter {x}")));
    }
    if x == 0.0 {
        return Ok((BigInt::zero(), 0));
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { Sign::Minus } else { Sign::Plus };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    Ok((BigInt::from_biguint(sign, mant.into()), e))
}

/// `⌊w·10^d / (N_i·s)⌋`, exactly.
pub fn quantize_weight(w: f64, s: f64, factor: NormFactor, d: u32) -> Result<i128, Error> {
    if s == 0.0 {
        return Err(Error::InvalidParameter("normalisation scale must be nonzero".into()));
    }
    let (mw, ew) = dyadic(w)?;
    let (ms, es) = dyadic(s)?;
    // w/s = num/den with den > 0.
    let mut num = mw * BigInt::from(10u32).pow(d);
    let mut den = ms.abs();
    if ms.is_negative() {
        num = -num;
    }
    if ew >= es {
        num <<= (ew - es) as usize;
    } else {
        den <<= (es - ew) as usize;
    }
    let q = match factor {
        NormFactor::Linear(n) => {
            if n == 0 {
                return Err(Error::InvalidParameter("N must be positive".into()));
            }
            num.div_floor(&(den * BigInt::from(n)))
        }
        NormFactor::ThreeHalves(n) => {
            if n == 0 {
                return Err(Error::InvalidParameter("N must be positive".into()));
            }
            // |num| / (den·N^{3/2}) = sqrt(num² / (den²·N³))
            let a = &num * &num;
            let b = &den * &den * BigInt::from(n).pow(3);
            let s = (&a / &b).sqrt();
            if num.is_negative() {
                let exact = &s * &s * &b == a;
                -(if exact { s } else { s + 1 })
            } else {
                s
            }
        }
    };
    q.to_i128()
        .ok_or_else(|| Error::InvalidParameter("quantized weight does not fit in 128 bits".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    pub vector: String,
    pub stat: Stat,
    pub mean: f64,
    pub scale: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub label: String,
    pub n: usize,
    pub digits: u32,
    pub intercept: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub encoding: EncodingConfig,
    #[serde(default)]
    pub features: Vec<FeatureSpec>,
}

fn default_threshold() -> f64 {
    0.5
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureParams {
    pub mean: f64,
    pub scale: f64,
    pub weight: f64,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams { mean: 0.0, scale: 1.0, weight: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Human,
    Bot,
}

/// A loaded model with its derived public quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    pub label: String,
    pub n: usize,
    pub digits: u32,
    pub intercept: f64,
    pub threshold: f64,
    pub encoding: EncodingConfig,
    /// Indexed by [`feature_index`].
    pub features: Vec<FeatureParams>,
    /// `q_i`, indexed like `features`.
    pub quantized: Vec<i128>,
    /// `c′ = c − Σ M_i·w_i/S_i`.
    pub folded_intercept: f64,
}

impl SvmModel {
    /// Builds a model from per-feature parameters (`FEATURE_COUNT` entries).
    pub fn new(
        label: &str,
        n: usize,
        digits: u32,
        intercept: f64,
        threshold: f64,
        encoding: EncodingConfig,
        features: Vec<FeatureParams>,
    ) -> Result<Self, Error> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("n = {n} is not a power of two")));
        }
        if !(1..=9).contains(&digits) {
            return Err(Error::InvalidParameter(format!("digits = {digits} outside [1, 9]")));
        }
        if label.is_empty() {
            return Err(Error::InvalidParameter("model label must not be empty".into()));
        }
        if features.len() != FEATURE_COUNT {
            return Err(Error::InvalidParameter(format!(
                "expected {FEATURE_COUNT} features, got {}",
                features.len()
            )));
        }
        if !intercept.is_finite() || !threshold.is_finite() {
            return Err(Error::InvalidParameter("intercept and threshold must be finite".into()));
        }
        encoding.validate()?;
        let mut quantized = Vec::with_capacity(FEATURE_COUNT);
        let mut folded = intercept;
        for (i, f) in features.iter().enumerate() {
            let stat = Stat::ALL[i % 4];
            let factor = if stat.is_std() { NormFactor::ThreeHalves(n as u64) } else { NormFactor::Linear(n as u64) };
            quantized.push(quantize_weight(f.weight, f.scale, factor, digits)?);
            if !f.mean.is_finite() {
                return Err(Error::InvalidParameter("feature mean must be finite".into()));
            }
            folded -= f.mean * f.weight / f.scale;
        }
        Ok(SvmModel {
            label: label.to_string(),
            n,
            digits,
            intercept,
            threshold,
            encoding,
            features,
            quantized,
            folded_intercept: folded,
        })
    }

    pub fn from_file(file: ModelFile) -> Result<Self, Error> {
        let mut features = vec![None; FEATURE_COUNT];
        for spec in &file.features {
            let vector = VECTOR_NAMES
                .iter()
                .position(|v| *v == spec.vector)
                .ok_or_else(|| Error::Model(format!("unknown vector name {:?}", spec.vector)))?;
            let slot = &mut features[feature_index(vector, spec.stat)];
            if slot.is_some() {
                return Err(Error::Model(format!("feature {} {} listed twice", spec.vector, spec.stat.name())));
            }
            *slot = Some(FeatureParams { mean: spec.mean, scale: spec.scale, weight: spec.weight });
        }
        let features = features.into_iter().map(Option::unwrap_or_default).collect();
        Self::new(&file.label, file.n, file.digits, file.intercept, file.threshold, file.encoding, features)
    }

    pub fn parse_toml(text: &str) -> Result<Self, Error> {
        let file: ModelFile = toml::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Model(format!("{}: {e}", path.display())))?;
        Self::parse_toml(&text)
    }

    pub fn to_file(&self) -> ModelFile {
        let mut features = Vec::new();
        for (v, name) in VECTOR_NAMES.iter().enumerate() {
            for stat in Stat::ALL {
                let f = self.features[feature_index(v, stat)];
                if f != FeatureParams::default() {
                    features.push(FeatureSpec {
                        vector: name.to_string(),
                        stat,
                        mean: f.mean,
                        scale: f.scale,
                        weight: f.weight,
                    });
                }
            }
        }
        ModelFile {
            label: self.label.clone(),
            n: self.n,
            digits: self.digits,
            intercept: self.intercept,
            threshold: self.threshold,
            encoding: self.encoding,
            features,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(&self.to_file()).expect("model serializes")
    }

    /// Bytes bound into every attestation transcript.
    pub fn digest_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&self.digits.to_le_bytes());
        for q in &self.quantized {
            out.extend_from_slice(&q.to_le_bytes());
        }
        out
    }

    /// Sigmoid score and decision for an opened `Score`.
    pub fn evaluate(&self, score: i128) -> (f64, Decision) {
        let s = sigmoid(self.folded_intercept + score as f64 / 10f64.powi(self.digits as i32));
        let decision = if s >= self.threshold { Decision::Human } else { Decision::Bot };
        (s, decision)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantization_examples() {
        assert_eq!(quantize_weight(1.0, 1.0, NormFactor::Linear(1), 3).unwrap(), 1000);
        // 0.15 / (64·2) · 10⁶ = 1171.875
        assert_eq!(quantize_weight(0.15, 2.0, NormFactor::Linear(64), 6).unwrap(), 1171);
        assert_eq!(quantize_weight(-0.5, 1.0, NormFactor::Linear(1), 2).unwrap(), -50);
        assert!(matches!(quantize_weight(1.0, 0.0, NormFactor::Linear(1), 2), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn floor_is_exact_at_representation_edges() {
        // 0.1 is slightly above 1/10 as a double, so 0.1·10 floors to 1.
        assert_eq!(quantize_weight(0.1, 1.0, NormFactor::Linear(1), 1).unwrap(), 1);
        // 0.3 is slightly below 3/10, so 0.3·10 floors to 2.
        assert_eq!(quantize_weight(0.3, 1.0, NormFactor::Linear(1), 1).unwrap(), 2);
        assert_eq!(quantize_weight(-0.3, 1.0, NormFactor::Linear(1), 1).unwrap(), -3);
    }

    #[test]
    fn three_halves_factor() {
        // N = 4: N^{3/2} = 8 exactly.
        assert_eq!(quantize_weight(1.0, 1.0, NormFactor::ThreeHalves(4), 3).unwrap(), 125);
        assert_eq!(quantize_weight(-1.0, 1.0, NormFactor::ThreeHalves(4), 3).unwrap(), -125);
        // N = 2: 1000 / 2√2 = 353.55…
        assert_eq!(quantize_weight(1.0, 1.0, NormFactor::ThreeHalves(2), 3).unwrap(), 353);
        assert_eq!(quantize_weight(-1.0, 1.0, NormFactor::ThreeHalves(2), 3).unwrap(), -354);
        // N = 128: 10⁶ / 1448.15… = 690.53…
        assert_eq!(quantize_weight(1.0, 1.0, NormFactor::ThreeHalves(128), 6).unwrap(), 690);
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(50.0) > 1.0 - 1e-12);
        let model = sample_model(-0.01);
        let (s, _) = model.evaluate(10539);
        let oracle = 1.0 / (1.0 + f64::exp(-(-0.01 + 0.010539)));
        assert!((s - oracle).abs() < 1e-9);
    }

    fn sample_model(intercept: f64) -> SvmModel {
        SvmModel::new(
            "m",
            64,
            6,
            intercept,
            0.5,
            EncodingConfig::default(),
            vec![FeatureParams::default(); FEATURE_COUNT],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let f = vec![FeatureParams::default(); FEATURE_COUNT];
        let enc = EncodingConfig::default();
        assert!(SvmModel::new("m", 48, 6, 0.0, 0.5, enc, f.clone()).is_err());
        assert!(SvmModel::new("m", 64, 0, 0.0, 0.5, enc, f.clone()).is_err());
        assert!(SvmModel::new("m", 64, 10, 0.0, 0.5, enc, f.clone()).is_err());
        let mut bad = f.clone();
        bad[3].scale = 0.0;
        assert!(matches!(SvmModel::new("m", 64, 6, 0.0, 0.5, enc, bad), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn toml_round_trip_and_folding() {
        let text = r#"
            label = "demo"
            n = 64
            digits = 6
            intercept = 1.5

            [[features]]
            vector = "acc_x_pre"
            stat = "mean"
            mean = 10.0
            scale = 2.0
            weight = 0.15

            [[features]]
            vector = "gyro_z_post"
            stat = "diff_std"
            mean = 4.0
            scale = 1.0
            weight = -1.0
        "#;
        let model = SvmModel::parse_toml(text).unwrap();
        assert_eq!(model.threshold, 0.5);
        assert_eq!(model.quantized[feature_index(0, Stat::Mean)], 1171);
        assert_eq!(model.quantized[feature_index(11, Stat::DiffStd)], -1954);
        assert_eq!(model.quantized.iter().filter(|q| **q != 0).count(), 2);
        // c′ = 1.5 − 10·0.15/2 − 4·(−1)/1
        assert!((model.folded_intercept - 4.75).abs() < 1e-12);
        assert_eq!(SvmModel::parse_toml(&model.to_toml()).unwrap(), model);
    }

    #[test]
    fn model_errors() {
        let dup = r#"
            label = "demo"
            n = 64
            digits = 6
            intercept = 0.0
            [[features]]
            vector = "acc_x_pre"
            stat = "mean"
            mean = 0.0
            scale = 1.0
            weight = 1.0
            [[features]]
            vector = "acc_x_pre"
            stat = "mean"
            mean = 0.0
            scale = 1.0
            weight = 1.0
        "#;
        assert!(matches!(SvmModel::parse_toml(dup), Err(Error::Model(_))));
        let unknown = dup.replacen("acc_x_pre", "acc_w_pre", 1);
        assert!(matches!(SvmModel::parse_toml(&unknown), Err(Error::Model(_))));
        assert!(matches!(SvmModel::parse_toml("label = 3"), Err(Error::Model(_))));
    }
}
