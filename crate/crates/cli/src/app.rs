//! Command implementations behind the `zksvm` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use zksvm::envelope::{bundle_element_counts, envelope_len, envelope_overhead, BundleEnvelope};
use zksvm::features::{build_vector_set, simulate_window, Preset, SensorWindow};
use zksvm::ipzkp::IpVariant;
use zksvm::model::SvmModel;
use zksvm::wire::element_bytes;
use zksvm::zksvm::{prove_bundle, setup, vector_element_counts, verify_bundle, Verdict};

use crate::nonce::DEFAULT_TTL;
use crate::service::{system_clock, AppState};

#[derive(Debug, Parser)]
#[command(name = "zksvm", version, about = "Zero-knowledge SVM attestation over touch sensor windows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Log,
    Linear,
}

impl From<VariantArg> for IpVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Log => IpVariant::Logarithmic,
            VariantArg::Linear => IpVariant::Linear,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Human,
    Rest,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prove a sensor window against a model, bound to a server nonce.
    Prove {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        sensors: PathBuf,
        /// Hex-encoded server challenge (at least 16 bytes).
        #[arg(long)]
        nonce: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "log")]
        variant: VariantArg,
        /// Deterministic prover randomness, for reproducible bundles.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify a bundle for a nonce.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        nonce: String,
    },
    /// Write a synthetic sensor window.
    SimulateWindow {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print per-vector and total proof sizes for a model.
    Sizes {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "log")]
        variant: VariantArg,
        /// Nonce length assumed for the envelope overhead.
        #[arg(long, default_value_t = 32)]
        nonce_bytes: usize,
    },
    /// Run the challenge/attest HTTP service.
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Nonce lifetime in seconds.
        #[arg(long, default_value_t = DEFAULT_TTL.as_secs())]
        ttl: u64,
    },
}

/// How a command ended, mapped to exit codes 0, 1 and 2.
#[derive(Debug)]
pub enum Outcome {
    Done(String),
    Rejected(String),
    Failed(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Done(_) => 0,
            Outcome::Rejected(_) => 1,
            Outcome::Failed(_) => 2,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Outcome> {
    std::fs::read(path).map_err(|e| Outcome::Failed(format!("{}: {e}", path.display())))
}

fn write(path: &Path, data: &[u8]) -> Result<(), Outcome> {
    std::fs::write(path, data).map_err(|e| Outcome::Failed(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<SvmModel, Outcome> {
    SvmModel::load(path).map_err(|e| Outcome::Failed(e.to_string()))
}

fn parse_nonce(hex_nonce: &str) -> Result<Vec<u8>, Outcome> {
    hex::decode(hex_nonce.trim()).map_err(|e| Outcome::Failed(format!("nonce is not hex: {e}")))
}

pub fn run(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::Prove { model, sensors, nonce, out, variant, seed } => {
            prove(&model, &sensors, &nonce, &out, variant.into(), seed)
        }
        Command::Verify { model, bundle, nonce } => verify(&model, &bundle, &nonce),
        Command::SimulateWindow { preset, out, seed } => {
            let preset = match preset {
                PresetArg::Human => Preset::Human,
                PresetArg::Rest => Preset::Rest,
            };
            write(&out, simulate_window(preset, seed).to_text().as_bytes())
                .map(|_| Outcome::Done(format!("wrote {}", out.display())))
        }
        Command::Sizes { model, variant, nonce_bytes } => {
            load_model(&model).map(|m| Outcome::Done(sizes_report(&m, variant.into(), nonce_bytes)))
        }
        Command::Serve { model, addr, ttl } => serve(&model, &addr, ttl),
    };
    result.unwrap_or_else(|o| o)
}

fn prove(
    model_path: &Path,
    sensors: &Path,
    nonce: &str,
    out: &Path,
    variant: IpVariant,
    seed: Option<u64>,
) -> Result<Outcome, Outcome> {
    let model = load_model(model_path)?;
    let nonce = parse_nonce(nonce)?;
    let text = String::from_utf8(read(sensors)?).map_err(|_| Outcome::Failed("sensor file is not UTF-8".into()))?;
    let window = SensorWindow::parse(&text).map_err(|e| Outcome::Failed(e.to_string()))?;
    let vectors = build_vector_set(&window, &model.encoding, model.n).map_err(|e| Outcome::Failed(e.to_string()))?;
    let params = setup(&model).map_err(|e| Outcome::Failed(e.to_string()))?;
    let mut rng = match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    };
    let att = prove_bundle(&params, &model, &vectors.vectors, &nonce, variant, &mut rng)
        .map_err(|e| Outcome::Failed(format!("prover refused: {e}")))?;
    let envelope = BundleEnvelope::new(params.label(), model.n, variant, att.bundle);
    let bytes = envelope.encode();
    write(out, &bytes)?;
    let (p, s) = envelope.element_counts();
    Ok(Outcome::Done(format!("wrote {} ({} bytes, {p} points, {s} scalars)", out.display(), bytes.len())))
}

fn verify(model_path: &Path, bundle: &Path, nonce: &str) -> Result<Outcome, Outcome> {
    let model = load_model(model_path)?;
    let nonce = parse_nonce(nonce)?;
    let bytes = read(bundle)?;
    let envelope = match BundleEnvelope::decode(&bytes) {
        Ok(e) => e,
        Err(e) => return Ok(Outcome::Rejected(format!("reject: malformed bundle: {e}"))),
    };
    let params = setup(&model).map_err(|e| Outcome::Failed(e.to_string()))?;
    if envelope.label != params.label() || envelope.n != model.n {
        return Ok(Outcome::Rejected("reject: bundle was produced for a different model".into()));
    }
    Ok(match verify_bundle(&params, &model, &envelope.bundle, &nonce) {
        Verdict::Accept { score, probability } => {
            Outcome::Done(format!("accept: score {score}, s = {probability:.6}"))
        }
        Verdict::Reject(r) => Outcome::Rejected(format!("reject: {r}")),
    })
}

/// Human-readable size table for `model`.
pub fn sizes_report(model: &SvmModel, variant: IpVariant, nonce_bytes: usize) -> String {
    let n = model.n;
    let (vp, vs) = vector_element_counts(n, variant);
    let (bp, bs) = bundle_element_counts(n, variant);
    let label_len = model.label.len();
    let overhead = envelope_overhead(label_len, nonce_bytes);
    let total = envelope_len(label_len, nonce_bytes, n, variant);
    let mut out = String::new();
    let _ = writeln!(out, "n = {n}, variant = {variant:?}");
    let _ = writeln!(out, "per vector: {vp} points, {vs} scalars, {} bytes", element_bytes(vp, vs));
    let _ = writeln!(out, "12 vectors + r_R: {bp} points, {bs} scalars, {} bytes", element_bytes(bp, bs));
    let _ = writeln!(out, "envelope overhead: {overhead} bytes");
    let _ = write!(out, "total: {total} bytes");
    out
}

fn serve(model_path: &Path, addr: &str, ttl: u64) -> Result<Outcome, Outcome> {
    let model = load_model(model_path)?;
    let state = AppState::new(model, Duration::from_secs(ttl), system_clock()).map_err(|e| Outcome::Failed(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Outcome::Failed(e.to_string()))?;
    eprintln!("listening on {addr}");
    runtime
        .block_on(crate::service::serve(Arc::new(state), addr))
        .map_err(|e| Outcome::Failed(format!("{addr}: {e}")))?;
    Ok(Outcome::Done(String::new()))
}
