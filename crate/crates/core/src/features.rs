//! Sensor windows to fixed-point input vectors.
//!
//! A touch window covers `[touch_start − 50 ms, touch_end + 250 ms]` and is
//! split at finger release into a "pre" and a "post" segment. Each of the six
//! channels (accelerometer and gyroscope, x/y/z) yields one vector per
//! segment, so there are 12 vectors, ordered by
//! `sensor·6 + axis·2 + segment` (see [`VECTOR_NAMES`]).
//!
//! A sample `x` encodes as `round((x + offset)·10^k)`, which must lie in
//! `[0, 2^B)`. Segments shorter than `n` are padded by repeating their last
//! value.
//!
//! Text input format:
//!
//! ```text
//! events,<touch_start_ms>,<release_ms>,<touch_end_ms>
//! timestamp,ax,ay,az,gx,gy,gz
//! 0,0.01,-0.02,9.81,0.001,0.0,-0.002
//! 4,...
//! ```
//!
//! The column-name line is optional; lines starting with `#` are ignored.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::errors::Error;

pub const VECTOR_COUNT: usize = 12;
pub const CHANNELS: usize = 6;

pub const VECTOR_NAMES: [&str; VECTOR_COUNT] = [
    "acc_x_pre", "acc_x_post", "acc_y_pre", "acc_y_post", "acc_z_pre", "acc_z_post",
    "gyro_x_pre", "gyro_x_post", "gyro_y_pre", "gyro_y_post", "gyro_z_pre", "gyro_z_post",
];

pub const PRE_TOUCH_MS: f64 = 50.0;
pub const POST_TOUCH_MS: f64 = 250.0;

/// Vector index of `(channel, segment)`; channels are `ax, ay, az, gx, gy, gz`.
pub fn vector_index(channel: usize, segment: usize) -> usize {
    channel * 2 + segment
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingConfig {
    pub offset: f64,
    /// `k`: values are scaled by `10^k`.
    pub scale_digits: u32,
    /// `B`: encoded entries lie in `[0, 2^B)`.
    pub bits: u32,
}

impl Default for EncodingConfig {
    fn default() -> Self {
        EncodingConfig { offset: 32.0, scale_digits: 4, bits: 20 }
    }
}

impl EncodingConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !self.offset.is_finite() || self.offset < 0.0 {
            return Err(Error::InvalidParameter("encoding offset must be finite and non-negative".into()));
        }
        if self.scale_digits > 9 {
            return Err(Error::InvalidParameter("scale digits must be at most 9".into()));
        }
        if !(1..=24).contains(&self.bits) {
            return Err(Error::InvalidParameter("encoding bits must be in [1, 24]".into()));
        }
        Ok(())
    }

    pub fn scale(&self) -> f64 {
        10f64.powi(self.scale_digits as i32)
    }

    /// Encodes one sample.
    pub fn encode(&self, x: f64) -> Result<u64, Error> {
        let y = ((x + self.offset) * self.scale()).round();
        if !y.is_finite() || y < 0.0 {
            return Err(Error::Encoding(format!("sample {x} is negative after the offset")));
        }
        if y >= (1u64 << self.bits) as f64 {
            return Err(Error::Bound(format!("sample {x} encodes beyond 2^{}", self.bits)));
        }
        Ok(y as u64)
    }
}

/// Encodes `samples` and pads them to length `n` with the last value.
pub fn encode_fixed_point(samples: &[f64], config: &EncodingConfig, n: usize) -> Result<Vec<u64>, Error> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("cannot encode an empty segment".into()));
    }
    if samples.len() > n {
        return Err(Error::InvalidParameter(format!(
            "segment has {} samples, more than n = {n}",
            samples.len()
        )));
    }
    let mut out = samples.iter().map(|x| config.encode(*x)).collect::<Result<Vec<_>, _>>()?;
    let last = *out.last().expect("nonempty");
    out.resize(n, last);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t_ms: f64,
    pub values: [f64; CHANNELS],
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensorWindow {
    pub samples: Vec<Sample>,
    pub touch_start: f64,
    pub release: f64,
    pub touch_end: f64,
}

impl SensorWindow {
    pub fn window_start(&self) -> f64 {
        self.touch_start - PRE_TOUCH_MS
    }

    pub fn window_end(&self) -> f64 {
        self.touch_end + POST_TOUCH_MS
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.samples.windows(2).any(|w| w[1].t_ms <= w[0].t_ms) {
            return Err(Error::InvalidParameter("timestamps must be strictly increasing".into()));
        }
        if !(self.touch_start <= self.touch_end) {
            return Err(Error::InvalidParameter("touch must end after it starts".into()));
        }
        Ok(())
    }

    /// Splits the window at finger release into the pre- and post-release
    /// samples.
    pub fn segment(&self) -> Result<(Vec<Sample>, Vec<Sample>), Error> {
        self.validate()?;
        let (start, end) = (self.window_start(), self.window_end());
        if self.release < start || self.release > end {
            return Err(Error::InvalidParameter("release lies outside the window".into()));
        }
        let inside = self.samples.iter().filter(|s| s.t_ms >= start && s.t_ms <= end);
        let (pre, post): (Vec<Sample>, Vec<Sample>) = inside.partition(|s| s.t_ms < self.release);
        if pre.is_empty() || post.is_empty() {
            return Err(Error::InvalidParameter("both segments must contain samples".into()));
        }
        Ok((pre, post))
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let bad = |line: usize, msg: &str| Error::Encoding(format!("line {line}: {msg}"));
        let mut events = None;
        let mut samples = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("timestamp") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let nums = |xs: &[&str]| -> Result<Vec<f64>, Error> {
                xs.iter()
                    .map(|x| x.parse::<f64>().map_err(|_| bad(i + 1, &format!("bad number {x:?}"))))
                    .collect()
            };
            if fields[0] == "events" {
                if fields.len() != 4 {
                    return Err(bad(i + 1, "events line needs three timestamps"));
                }
                let e = nums(&fields[1..])?;
                events = Some((e[0], e[1], e[2]));
                continue;
            }
            if fields.len() != 1 + CHANNELS {
                return Err(bad(i + 1, "expected timestamp and six channel values"));
            }
            let v = nums(&fields)?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(bad(i + 1, "non-finite value"));
            }
            let mut values = [0.0; CHANNELS];
            values.copy_from_slice(&v[1..]);
            samples.push(Sample { t_ms: v[0], values });
        }
        let (touch_start, release, touch_end) =
            events.ok_or_else(|| Error::Encoding("missing events line".into()))?;
        let w = SensorWindow { samples, touch_start, release, touch_end };
        w.validate()?;
        Ok(w)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("events,{},{},{}\ntimestamp,ax,ay,az,gx,gy,gz\n", self.touch_start, self.release, self.touch_end);
        for s in &self.samples {
            out.push_str(&s.t_ms.to_string());
            for v in s.values {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// The 12 encoded input vectors of one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedVectorSet {
    pub vectors: Vec<Vec<u64>>,
}

pub fn build_vector_set(window: &SensorWindow, config: &EncodingConfig, n: usize) -> Result<EncodedVectorSet, Error> {
    config.validate()?;
    let (pre, post) = window.segment()?;
    let mut vectors = vec![Vec::new(); VECTOR_COUNT];
    for channel in 0..CHANNELS {
        for (segment, samples) in [&pre, &post].into_iter().enumerate() {
            let raw: Vec<f64> = samples.iter().map(|s| s.values[channel]).collect();
            vectors[vector_index(channel, segment)] = encode_fixed_point(&raw, config, n)?;
        }
    }
    Ok(EncodedVectorSet { vectors })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// A finger tap: small hand tremor plus a short impulse on touch and release.
    Human,
    /// A device lying still: gravity plus sensor noise only.
    Rest,
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "human" => Ok(Preset::Human),
            "rest" => Ok(Preset::Rest),
            _ => Err(Error::InvalidParameter(format!("unknown preset {s:?}"))),
        }
    }
}

/// Synthetic 250 Hz window for `preset`, deterministic in `seed`.
pub fn simulate_window(preset: Preset, seed: u64) -> SensorWindow {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let touch_start = 100.0;
    let touch_len = match preset {
        Preset::Human => 60.0 + 80.0 * rand::Rng::gen::<f64>(&mut rng),
        Preset::Rest => 100.0,
    };
    let release = touch_start + touch_len;
    let touch_end = release;
    let (acc_noise, gyro_noise) = match preset {
        Preset::Human => (0.08, 0.02),
        Preset::Rest => (0.004, 0.001),
    };
    let acc = Normal::new(0.0, acc_noise).expect("valid sigma");
    let gyro = Normal::new(0.0, gyro_noise).expect("valid sigma");
    let tilt: f64 = match preset {
        Preset::Human => Normal::new(0.0, 0.3).expect("valid sigma").sample(&mut rng),
        Preset::Rest => 0.0,
    };
    let gravity = [tilt.sin() * 9.81 * 0.3, tilt.sin() * 9.81 * 0.1, tilt.cos() * 9.81];
    let end = touch_end + POST_TOUCH_MS + 40.0;
    let mut samples = Vec::new();
    let mut t = 0.0;
    while t <= end {
        let impulse = |center: f64, width: f64| (-((t - center) / width).powi(2)).exp();
        let bump = match preset {
            Preset::Human => 0.6 * impulse(touch_start, 15.0) - 0.4 * impulse(release, 20.0),
            Preset::Rest => 0.0,
        };
        let mut values = [0.0; CHANNELS];
        for axis in 0..3 {
            values[axis] = gravity[axis] + bump * [0.2, 0.3, 1.0][axis] + acc.sample(&mut rng);
            values[3 + axis] = bump * [0.5, -0.3, 0.1][axis] + gyro.sample(&mut rng);
        }
        samples.push(Sample { t_ms: t, values });
        t += 4.0;
    }
    SensorWindow { samples, touch_start, release, touch_end }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(n: usize, release: f64) -> SensorWindow {
        let samples = (0..n).map(|i| Sample { t_ms: i as f64 * 4.0, values: [1.0; 6] }).collect();
        SensorWindow { samples, touch_start: 50.0, release, touch_end: release }
    }

    #[test]
    fn encoding_examples() {
        let plain = EncodingConfig { offset: 0.0, scale_digits: 3, bits: 20 };
        assert_eq!(encode_fixed_point(&[0.0, 0.5], &plain, 2).unwrap(), vec![0, 500]);
        let shifted = EncodingConfig { offset: 20.0, scale_digits: 3, bits: 20 };
        assert_eq!(shifted.encode(-9.81).unwrap(), 10190);
        assert!(matches!(shifted.encode(-20.5), Err(Error::Encoding(_))));
        let small = EncodingConfig { offset: 0.0, scale_digits: 0, bits: 4 };
        assert_eq!(small.encode(15.0).unwrap(), 15);
        assert!(matches!(small.encode(16.0), Err(Error::Bound(_))));
    }

    #[test]
    fn padding_repeats_last_value() {
        let cfg = EncodingConfig { offset: 0.0, scale_digits: 0, bits: 8 };
        assert_eq!(encode_fixed_point(&[1.0, 2.0], &cfg, 5).unwrap(), vec![1, 2, 2, 2, 2]);
        assert!(encode_fixed_point(&[1.0; 6], &cfg, 5).is_err());
        assert!(encode_fixed_point(&[], &cfg, 5).is_err());
    }

    #[test]
    fn segmentation() {
        // 300 ms at 250 Hz: samples at 0, 4, …, 300 ms.
        let w = window(76, 150.0);
        let (pre, post) = w.segment().unwrap();
        assert_eq!(pre.len() + post.len(), 76);
        // Release at the midpoint of [0, 300] gives equal-duration segments.
        assert_eq!(pre.len(), 38);
        assert!(pre.iter().all(|s| s.t_ms < 150.0) && post.iter().all(|s| s.t_ms >= 150.0));

        // Window starts at t = 4; release at t = 8 leaves one pre-release sample.
        let w = SensorWindow { touch_start: 54.0, release: 8.0, touch_end: 54.0, ..window(76, 0.0) };
        let (pre, post) = w.segment().unwrap();
        assert_eq!(pre.len(), 1);
        assert_eq!(pre.len() + post.len(), 75);

        let outside = SensorWindow { touch_start: 10.0, release: 900.0, touch_end: 900.0, ..window(10, 0.0) };
        assert!(outside.segment().is_err());
    }

    #[test]
    fn twelve_vectors_constant_window() {
        let w = window(76, 150.0);
        let set = build_vector_set(&w, &EncodingConfig::default(), 64).unwrap();
        assert_eq!(set.vectors.len(), 12);
        for v in &set.vectors {
            assert_eq!(v.len(), 64);
            assert!(v.iter().all(|x| *x == 330000));
        }
    }

    #[test]
    fn channel_layout() {
        let mut w = window(76, 150.0);
        for s in &mut w.samples {
            s.values = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        }
        let cfg = EncodingConfig { offset: 0.0, scale_digits: 0, bits: 8 };
        let set = build_vector_set(&w, &cfg, 64).unwrap();
        for (i, name) in VECTOR_NAMES.iter().enumerate() {
            let channel = i / 2;
            assert_eq!(set.vectors[i][0], channel as u64, "{name}");
        }
    }

    #[test]
    fn text_round_trip_and_presets() {
        for preset in [Preset::Human, Preset::Rest] {
            let w = simulate_window(preset, 5);
            let parsed = SensorWindow::parse(&w.to_text()).unwrap();
            assert_eq!(parsed, w);
            assert_eq!(simulate_window(preset, 5), w);
            let set = build_vector_set(&w, &EncodingConfig::default(), 128).unwrap();
            assert_eq!(set, build_vector_set(&parsed, &EncodingConfig::default(), 128).unwrap());
        }
        assert!(SensorWindow::parse("0,1,2,3,4,5,6\n").is_err());
        assert!(SensorWindow::parse("events,1,2\n").is_err());
        assert!(SensorWindow::parse("events,0,10,10\n0,1,2,3,4,5\n").is_err());
        assert!(SensorWindow::parse("events,0,10,10\n4,1,2,3,4,5,6\n0,1,2,3,4,5,6\n").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn encoding_is_monotone(a in -30.0f64..60.0, b in -30.0f64..60.0) {
                let cfg = EncodingConfig::default();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(cfg.encode(lo).unwrap() <= cfg.encode(hi).unwrap());
            }
        }
    }
}
