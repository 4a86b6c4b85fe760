//! Deterministic surrogate locomotion environments with behavior cues.
//!
//! Both surrogates keep the input layout of the original robots (17 inputs
//! for the hopper, 30 for the walker) and score every step with the
//! behavior-specific reward selected by a [`BehaviorCue`].

mod hopper;
pub mod rewards;
mod walker;

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use hopper::HopperState;
pub use walker::WalkerState;

/// Integration step of both surrogates, in seconds.
pub const DT: f64 = 0.05;

/// Which of the two behaviors is requested (and rewarded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BehaviorCue {
    B1,
    B2,
}

impl BehaviorCue {
    pub const ALL: [BehaviorCue; 2] = [BehaviorCue::B1, BehaviorCue::B2];

    /// Values of the two cue inputs.
    pub fn encoding(self) -> [f64; 2] {
        match self {
            BehaviorCue::B1 => [5.0, 0.0],
            BehaviorCue::B2 => [0.0, 5.0],
        }
    }

    pub fn index(self) -> usize {
        match self {
            BehaviorCue::B1 => 0,
            BehaviorCue::B2 => 1,
        }
    }
}

impl fmt::Display for BehaviorCue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BehaviorCue::B1 => "b1",
            BehaviorCue::B2 => "b2",
        })
    }
}

impl FromStr for BehaviorCue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "b1" | "1" => Ok(BehaviorCue::B1),
            "b2" | "2" => Ok(BehaviorCue::B2),
            other => Err(Error::Config(format!("unknown behavior {other:?}"))),
        }
    }
}

/// Network input vector. The last two slots always hold a cue encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation(Vec<f64>);

impl Observation {
    /// Appends the cue encoding to a cue-less observation body.
    pub fn with_cue(mut body: Vec<f64>, cue: BehaviorCue) -> Self {
        body.extend_from_slice(&cue.encoding());
        Observation(body)
    }

    pub fn cue_slots(&self) -> [f64; 2] {
        let n = self.0.len();
        [self.0[n - 2], self.0[n - 1]]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Observation {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
}

/// Common interface of the surrogates.
pub trait Environment: Sized {
    const OBS_DIM: usize;
    const ACTION_DIM: usize;
    /// Column names of the two state columns after `x` in trajectory dumps.
    const TRACE_COLUMNS: [&'static str; 2];

    fn reset(episode_seed: u64) -> Self;

    /// Observation body without the two cue slots.
    fn observation_body(&self) -> Vec<f64>;

    fn step(&mut self, action: &[f64], behavior: BehaviorCue) -> Result<StepOutcome>;

    /// `(x, y-or-h, yaw-or-vh)` for trajectory dumps.
    fn trace_state(&self) -> [f64; 3];

    fn observe(&self, behavior: BehaviorCue) -> Observation {
        Observation::with_cue(self.observation_body(), behavior)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvKind {
    Hopper,
    Walker,
}

impl EnvKind {
    pub fn obs_dim(self) -> usize {
        match self {
            EnvKind::Hopper => HopperState::OBS_DIM,
            EnvKind::Walker => WalkerState::OBS_DIM,
        }
    }

    pub fn action_dim(self) -> usize {
        match self {
            EnvKind::Hopper => HopperState::ACTION_DIM,
            EnvKind::Walker => WalkerState::ACTION_DIM,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Hopper => "hopper",
            EnvKind::Walker => "walker",
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hopper" => Ok(EnvKind::Hopper),
            "walker" | "ant" => Ok(EnvKind::Walker),
            other => Err(Error::Config(format!("unknown environment {other:?}"))),
        }
    }
}

pub(crate) fn clamp_action<const N: usize>(action: &[f64]) -> Result<[f64; N]> {
    if action.len() != N {
        return Err(Error::Dimension {
            context: "action",
            expected: N,
            got: action.len(),
        });
    }
    let mut out = [0.0; N];
    for (o, &a) in out.iter_mut().zip(action) {
        if a.is_nan() {
            return Err(Error::Numerical("action component is NaN".into()));
        }
        *o = a.clamp(-1.0, 1.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cue_encodings() {
        assert_eq!(BehaviorCue::B1.encoding(), [5.0, 0.0]);
        assert_eq!(BehaviorCue::B2.encoding(), [0.0, 5.0]);
        let obs = Observation::with_cue(vec![1.0, 2.0], BehaviorCue::B2);
        assert_eq!(&*obs, &[1.0, 2.0, 0.0, 5.0]);
        assert_eq!(obs.cue_slots(), [0.0, 5.0]);
    }

    #[test]
    fn parse_names() {
        assert_eq!("hopper".parse::<EnvKind>().unwrap(), EnvKind::Hopper);
        assert_eq!("Walker".parse::<EnvKind>().unwrap(), EnvKind::Walker);
        assert!("cheetah".parse::<EnvKind>().is_err());
        assert_eq!("b2".parse::<BehaviorCue>().unwrap(), BehaviorCue::B2);
        assert_eq!(EnvKind::Hopper.obs_dim(), 17);
        assert_eq!(EnvKind::Walker.obs_dim(), 30);
        assert_eq!(EnvKind::Walker.action_dim(), 8);
    }

    #[test]
    fn clamping() {
        assert_eq!(
            clamp_action::<3>(&[2.0, -7.0, 0.5]).unwrap(),
            [1.0, -1.0, 0.5]
        );
        assert!(clamp_action::<3>(&[0.0; 2]).is_err());
        assert!(clamp_action::<1>(&[f64::NAN]).is_err());
    }
}
