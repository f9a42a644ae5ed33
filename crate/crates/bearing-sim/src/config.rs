//! Run configuration: JSON schema, defaults, and validation.
//!
//! Every field is optional; omitted fields take the reference defaults
//! (20 s at 1 ms steps, gain 1, both observers, the standard noise levels,
//! randomly drawn sinusoid inputs). Unknown keys are rejected by name. All
//! angles are radians.

use bearing_core::dynamics::{Curve, SceneSpec, Sinusoid, SinusoidSpec};
use bearing_core::noise::NoiseSpec;
use bearing_core::{UnitVector3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    /// Structural JSON problems; serde's message names the offending key.
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: String) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObserverChoice {
    Equivariant,
    Naive,
    Both,
}

impl ObserverChoice {
    pub fn runs_equivariant(self) -> bool {
        matches!(self, ObserverChoice::Equivariant | ObserverChoice::Both)
    }

    pub fn runs_naive(self) -> bool {
        matches!(self, ObserverChoice::Naive | ObserverChoice::Both)
    }
}

impl core::str::FromStr for ObserverChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "equivariant" => Ok(ObserverChoice::Equivariant),
            "naive" => Ok(ObserverChoice::Naive),
            "both" => Ok(ObserverChoice::Both),
            other => {
                Err(format!("unknown observer '{other}', expected equivariant, naive, or both"))
            }
        }
    }
}

impl core::fmt::Display for ObserverChoice {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            ObserverChoice::Equivariant => "equivariant",
            ObserverChoice::Naive => "naive",
            ObserverChoice::Both => "both",
        };
        f.write_str(s)
    }
}

/// Noise magnitudes, mirroring the core spec minus the seed (the run seed
/// feeds the noise streams).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub input_sigma: f64,
    pub bearing_angle_sigma: f64,
    pub outlier_prob: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        let spec = NoiseSpec::default();
        NoiseConfig {
            input_sigma: spec.input_sigma,
            bearing_angle_sigma: spec.bearing_angle_sigma,
            outlier_prob: spec.outlier_prob,
        }
    }
}

impl NoiseConfig {
    pub fn silenced() -> Self {
        NoiseConfig { input_sigma: 0.0, bearing_angle_sigma: 0.0, outlier_prob: 0.0 }
    }

    pub fn to_spec(&self, seed: u64) -> NoiseSpec {
        NoiseSpec {
            input_sigma: self.input_sigma,
            bearing_angle_sigma: self.bearing_angle_sigma,
            outlier_prob: self.outlier_prob,
            seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub amplitude: f64,
    pub frequency_hz: f64,
    pub phase: f64,
}

impl ChannelConfig {
    fn to_core(self) -> Sinusoid {
        Sinusoid { amplitude: self.amplitude, frequency_hz: self.frequency_hz, phase: self.phase }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelsConfig {
    pub omega: [ChannelConfig; 3],
    pub vprime: [ChannelConfig; 3],
}

impl ChannelsConfig {
    pub fn to_core(&self) -> SinusoidSpec {
        SinusoidSpec {
            omega: [self.omega[0].to_core(), self.omega[1].to_core(), self.omega[2].to_core()],
            vprime: [self.vprime[0].to_core(), self.vprime[1].to_core(), self.vprime[2].to_core()],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SinusoidConfig {
    /// Explicit per-axis channels. Omitted: all six channels are drawn from
    /// the run's initial-conditions stream (amplitudes and frequencies
    /// uniform on [0, 10], phases uniform on (-pi, pi)).
    pub channels: Option<ChannelsConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    Cubic {
        c: [f64; 4],
    },
    Wave {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        frequency_hz: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig::Cubic { c: [0.0; 4] }
    }
}

impl CurveConfig {
    fn to_core(self) -> Curve {
        match self {
            CurveConfig::Cubic { c } => Curve::Cubic { c },
            CurveConfig::Wave { offset, amplitude, frequency_hz, phase } => {
                Curve::Wave { offset, amplitude, frequency_hz, phase }
            }
        }
    }

    fn params(&self) -> [f64; 4] {
        match *self {
            CurveConfig::Cubic { c } => c,
            CurveConfig::Wave { offset, amplitude, frequency_hz, phase } => {
                [offset, amplitude, frequency_hz, phase]
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneConfig {
    pub vehicle_position: [CurveConfig; 3],
    pub target_position: [CurveConfig; 3],
    pub attitude_axis: [f64; 3],
    pub attitude_angle: CurveConfig,
    pub min_distance: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            vehicle_position: [CurveConfig::default(); 3],
            target_position: [
                CurveConfig::Cubic { c: [5.0, 0.0, 0.0, 0.0] },
                CurveConfig::default(),
                CurveConfig::default(),
            ],
            attitude_axis: [0.0, 0.0, 1.0],
            attitude_angle: CurveConfig::default(),
            min_distance: 0.1,
        }
    }
}

impl SceneConfig {
    pub fn to_core(&self) -> Result<SceneSpec, ConfigError> {
        let axis = Vector3::from_array(self.attitude_axis);
        let attitude_axis = UnitVector3::normalize(axis).map_err(|_| {
            ConfigError::Invalid("input.scene.attitude_axis must be a nonzero finite vector".into())
        })?;
        Ok(SceneSpec {
            vehicle_position: self.vehicle_position.map(CurveConfig::to_core),
            target_position: self.target_position.map(CurveConfig::to_core),
            attitude_axis,
            attitude_angle: self.attitude_angle.to_core(),
            min_distance: self.min_distance,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputConfig {
    Sinusoid(SinusoidConfig),
    Scene(SceneConfig),
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig::Sinusoid(SinusoidConfig::default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Simulated time span in seconds.
    pub duration: f64,
    /// Integration step in seconds.
    pub dt: f64,
    /// Innovation gain k.
    pub gain: f64,
    pub observer: ObserverChoice,
    /// Base seed; run i of a batch uses seed + i.
    pub seed: u64,
    /// Monte Carlo run count.
    pub runs: u32,
    /// A fresh measurement every this many steps; held in between.
    pub measurement_decimation: u32,
    pub noise: NoiseConfig,
    pub input: InputConfig,
    /// When set, input noise lands on the raw linear velocity before its
    /// tangent projection instead of on the projected value.
    pub input_noise_before_projection: bool,
    /// Fixed initial bearing (normalized). Omitted: drawn uniformly from the
    /// initial-conditions stream. Not allowed with a scene input.
    pub initial_bearing: Option<[f64; 3]>,
    /// CSV destination; standard output when omitted.
    pub out: Option<String>,
    /// SVG destination; no plot when omitted.
    pub plot: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            duration: 20.0,
            dt: 1e-3,
            gain: 1.0,
            observer: ObserverChoice::Both,
            seed: 0,
            runs: 1,
            measurement_decimation: 1,
            noise: NoiseConfig::default(),
            input: InputConfig::default(),
            input_noise_before_projection: false,
            initial_bearing: None,
            out: None,
            plot: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return invalid(format!(
                "duration must be positive and finite (got {})",
                self.duration
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return invalid(format!("dt must be positive and finite (got {})", self.dt));
        }
        let steps = self.duration / self.dt;
        if steps > 1e7 {
            return invalid(format!("duration/dt = {steps:.3e} exceeds the 1e7 step budget"));
        }
        if !(self.gain.is_finite() && self.gain > 0.0) {
            return invalid(format!("gain must be positive and finite (got {})", self.gain));
        }
        if self.runs < 1 {
            return invalid("runs must be at least 1".into());
        }
        if self.measurement_decimation < 1 {
            return invalid("measurement_decimation must be at least 1".into());
        }
        self.validate_noise()?;
        self.validate_input()?;
        if let Some(b) = self.initial_bearing {
            let v = Vector3::from_array(b);
            if !v.is_finite() || v.norm() < 1e-12 {
                return invalid("initial_bearing must be a nonzero finite vector".into());
            }
        }
        Ok(())
    }

    fn validate_noise(&self) -> Result<(), ConfigError> {
        let n = &self.noise;
        if !(n.input_sigma.is_finite() && n.input_sigma >= 0.0) {
            return invalid(format!(
                "noise.input_sigma must be nonnegative (got {})",
                n.input_sigma
            ));
        }
        if !(n.bearing_angle_sigma.is_finite() && n.bearing_angle_sigma >= 0.0) {
            return invalid(format!(
                "noise.bearing_angle_sigma must be nonnegative (got {})",
                n.bearing_angle_sigma
            ));
        }
        if !(n.outlier_prob.is_finite() && (0.0..=1.0).contains(&n.outlier_prob)) {
            return invalid(format!(
                "noise.outlier_prob must lie in [0, 1] (got {})",
                n.outlier_prob
            ));
        }
        Ok(())
    }

    fn validate_input(&self) -> Result<(), ConfigError> {
        match &self.input {
            InputConfig::Sinusoid(s) => {
                if let Some(ch) = &s.channels {
                    for (name, bank) in [("omega", &ch.omega), ("vprime", &ch.vprime)] {
                        for (i, c) in bank.iter().enumerate() {
                            let key = format!("input.sinusoid.channels.{name}[{i}]");
                            if !(c.amplitude.is_finite() && c.amplitude >= 0.0) {
                                return invalid(format!("{key}.amplitude must be nonnegative"));
                            }
                            if !(c.frequency_hz.is_finite() && c.frequency_hz >= 0.0) {
                                return invalid(format!("{key}.frequency_hz must be nonnegative"));
                            }
                            if !c.phase.is_finite() {
                                return invalid(format!("{key}.phase must be finite"));
                            }
                        }
                    }
                }
            }
            InputConfig::Scene(s) => {
                if self.initial_bearing.is_some() {
                    return invalid(
                        "initial_bearing cannot be combined with a scene input (the scene fixes the initial bearing)"
                            .into(),
                    );
                }
                if !(s.min_distance.is_finite() && s.min_distance > 0.0) {
                    return invalid(format!(
                        "input.scene.min_distance must be positive (got {})",
                        s.min_distance
                    ));
                }
                let axis = Vector3::from_array(s.attitude_axis);
                if !axis.is_finite() || axis.norm() < 1e-12 {
                    return invalid(
                        "input.scene.attitude_axis must be a nonzero finite vector".into(),
                    );
                }
                let all_curves = s
                    .vehicle_position
                    .iter()
                    .chain(s.target_position.iter())
                    .chain(core::iter::once(&s.attitude_angle));
                for c in all_curves {
                    if c.params().iter().any(|p| !p.is_finite()) {
                        return invalid("input.scene curves must have finite parameters".into());
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a JSON run configuration. An empty document yields
/// the full defaults. Unknown keys and ill-typed values are rejected with
/// messages naming the key.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let trimmed = text.trim();
    let cfg: RunConfig =
        if trimmed.is_empty() { RunConfig::default() } else { serde_json::from_str(trimmed)? };
    cfg.validate()?;
    Ok(cfg)
}
