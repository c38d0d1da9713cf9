//! Fits the demo model: a nearest-centroid linear classifier between the
//! synthetic `human` and `rest` presets, written as model TOML.
//!
//! cargo run -p zksvm-cli --example fit_demo_model -- models/demo.toml

use zksvm::features::{build_vector_set, simulate_window, EncodingConfig, Preset};
use zksvm::model::{FeatureParams, SvmModel, FEATURE_COUNT};
use zksvm::zksvm::plaintext_features;

const N: usize = 64;
const TRAIN: u64 = 60;

/// Features in encoded units: means as `Avg/N`, deviations as `Std/N^{3/2}`.
fn real_features(preset: Preset, seed: u64, enc: &EncodingConfig) -> Vec<f64> {
    let w = simulate_window(preset, seed);
    let v = build_vector_set(&w, enc, N).expect("window fits").vectors;
    let n = N as f64;
    plaintext_features(&v)
        .expect("features fit")
        .iter()
        .enumerate()
        .map(|(i, f)| if i % 4 < 2 { *f as f64 / n } else { *f as f64 / n.powf(1.5) })
        .collect()
}

fn stats(rows: &[Vec<f64>], i: usize) -> (f64, f64) {
    let m = rows.iter().map(|r| r[i]).sum::<f64>() / rows.len() as f64;
    let var = rows.iter().map(|r| (r[i] - m).powi(2)).sum::<f64>() / rows.len() as f64;
    (m, var)
}

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "models/demo.toml".into());
    let enc = EncodingConfig::default();
    let human: Vec<_> = (0..TRAIN).map(|s| real_features(Preset::Human, 10_000 + s, &enc)).collect();
    let rest: Vec<_> = (0..TRAIN).map(|s| real_features(Preset::Rest, 20_000 + s, &enc)).collect();
    let mut features = Vec::with_capacity(FEATURE_COUNT);
    for i in 0..FEATURE_COUNT {
        let ((mh, vh), (mr, vr)) = (stats(&human, i), stats(&rest, i));
        let scale = ((vh + vr) / 2.0).sqrt().max(1.0);
        let weight = ((mh - mr) / scale / 8.0 * 1e3).round() / 1e3;
        features.push(FeatureParams { mean: ((mh + mr) / 2.0).round(), scale: scale.round(), weight });
    }
    let model = SvmModel::new("zksvm-demo-v1", N, 9, 0.0, 0.5, enc, features).expect("valid model");
    std::fs::write(&out, model.to_toml()).expect("write model");

    let mut correct = 0;
    for s in 0..50 {
        for (preset, human) in [(Preset::Human, true), (Preset::Rest, false)] {
            let w = simulate_window(preset, 90_000 + s);
            let v = build_vector_set(&w, &enc, N).unwrap().vectors;
            let f = plaintext_features(&v).unwrap();
            let score: i128 = f.iter().zip(&model.quantized).map(|(a, b)| a * b).sum();
            let (_, d) = model.evaluate(score);
            if (d == zksvm::model::Decision::Human) == human {
                correct += 1;
            }
        }
    }
    println!("wrote {out}; held-out accuracy {correct}/100");
}
