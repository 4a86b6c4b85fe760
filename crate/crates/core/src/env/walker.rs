use std::f64::consts::PI;

use super::{clamp_action, rewards, BehaviorCue, Environment, StepOutcome, DT};
use crate::error::{Error, Result};

pub const TARGET: (f64, f64) = (1000.0, 0.0);
pub const BODY_HEIGHT: f64 = 0.5;
const GAIN: f64 = 2.0;
const LINEAR_DRAG: f64 = 1.0;
const TURN_DRAG: f64 = 2.0;

/// Planar unicycle-like walker.
///
/// The four hip actions (`0..4`) drive forward speed `v`. The ankle actions
/// drive both the yaw rate (`mean(4..8)`) and the sideways speed `u`
/// (`(mean(4..6) − mean(6..8)) / 2`), positive to the left of the heading.
/// Forward and sideways drive share the same range, so full drive on both
/// moves the body at exactly ±45° from its heading.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub v: f64,
    pub u: f64,
    pub omega: f64,
    pub x_old: f64,
    pub y_old: f64,
    pub last_action: [f64; 8],
    pub last_v: f64,
    pub last_omega: f64,
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

impl WalkerState {
    pub fn world_velocity(&self) -> (f64, f64) {
        let (s, c) = self.yaw.sin_cos();
        (self.v * c - self.u * s, self.v * s + self.u * c)
    }

    fn is_finite(&self) -> bool {
        [self.x, self.y, self.yaw, self.v, self.u, self.omega]
            .iter()
            .all(|v| v.is_finite())
    }
}

impl Environment for WalkerState {
    const OBS_DIM: usize = 30;
    const ACTION_DIM: usize = 8;
    const TRACE_COLUMNS: [&'static str; 2] = ["y", "yaw"];

    fn reset(_episode_seed: u64) -> Self {
        WalkerState {
            x: 0.0,
            y: 0.0,
            yaw: 0.0,
            v: 0.0,
            u: 0.0,
            omega: 0.0,
            x_old: 0.0,
            y_old: 0.0,
            last_action: [0.0; 8],
            last_v: 0.0,
            last_omega: 0.0,
        }
    }

    fn observation_body(&self) -> Vec<f64> {
        let bearing = (TARGET.1 - self.y).atan2(TARGET.0 - self.x) - self.yaw;
        let (vx, vy) = self.world_velocity();
        let mut obs = Vec::with_capacity(Self::OBS_DIM - 2);
        obs.extend_from_slice(&[
            BODY_HEIGHT,
            bearing.sin(),
            bearing.cos(),
            vx,
            vy,
            0.0, // vertical velocity
            0.0, // roll
            0.0, // pitch
        ]);
        obs.extend_from_slice(&self.last_action);
        for _ in 0..4 {
            obs.push(self.last_v);
            obs.push(self.last_omega);
        }
        obs.extend_from_slice(&[1.0; 4]); // feet contact
        obs
    }

    fn step(&mut self, action: &[f64], behavior: BehaviorCue) -> Result<StepOutcome> {
        let a: [f64; 8] = clamp_action(action)?;
        self.x_old = self.x;
        self.y_old = self.y;
        self.last_v = self.v;
        self.last_omega = self.omega;

        let thrust = mean(&a[0..4]) * GAIN;
        let turn = mean(&a[4..8]) * GAIN;
        let strafe = (mean(&a[4..6]) - mean(&a[6..8])) * 0.5 * GAIN;
        self.v += (thrust - LINEAR_DRAG * self.v) * DT;
        self.u += (strafe - LINEAR_DRAG * self.u) * DT;
        self.omega += (turn - TURN_DRAG * self.omega) * DT;
        self.yaw = wrap_angle(self.yaw + self.omega * DT);
        let (vx, vy) = self.world_velocity();
        self.x += vx * DT;
        self.y += vy * DT;
        self.last_action = a;

        if !self.is_finite() {
            return Err(Error::Numerical("walker state became non-finite".into()));
        }
        let reward = rewards::walker(behavior, self.x_old, self.y_old, self.x, self.y, self.yaw);
        Ok(StepOutcome {
            observation: self.observe(behavior),
            reward,
            done: false,
        })
    }

    fn trace_state(&self) -> [f64; 3] {
        [self.x, self.y, self.yaw]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reset_state() {
        let s = WalkerState::reset(5);
        assert_eq!(s.yaw, 0.0);
        assert_eq!(s, WalkerState::reset(5));
        let obs = s.observe(BehaviorCue::B2);
        assert_eq!(obs.len(), 30);
        assert_eq!(obs[0], 0.5);
        assert_eq!(obs.cue_slots(), [0.0, 5.0]);
        assert_eq!(&obs[24..28], &[1.0; 4]);
    }

    #[test]
    fn full_action_from_rest() {
        let mut s = WalkerState::reset(0);
        s.step(&[1.0; 8], BehaviorCue::B1).unwrap();
        assert!((s.v - 0.1).abs() < 1e-15);
        assert!((s.omega - 0.1).abs() < 1e-15);
        assert!((s.yaw - 0.005).abs() < 1e-15);
        assert_eq!(s.u, 0.0);
    }

    #[test]
    fn null_action_is_still() {
        let mut s = WalkerState::reset(0);
        let out = s.step(&[0.0; 8], BehaviorCue::B1).unwrap();
        assert_eq!(out.reward, 0.0);
        assert_eq!((s.x, s.y, s.yaw, s.v), (0.0, 0.0, 0.0, 0.0));
        assert!(!out.done);
    }

    #[test]
    fn strafing_reaches_forty_five_degrees() {
        let mut left = WalkerState::reset(0);
        let mut right = WalkerState::reset(0);
        let a_left = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0];
        let a_right = [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0];
        for _ in 0..20 {
            let l = left.step(&a_left, BehaviorCue::B1).unwrap();
            let r = right.step(&a_right, BehaviorCue::B2).unwrap();
            assert!(l.reward > 0.0);
            assert!((l.reward - r.reward).abs() < 1e-12);
        }
        assert_eq!(left.yaw, 0.0);
        assert!((left.x - left.y).abs() < 1e-12);
        assert!((right.x + right.y).abs() < 1e-12);
    }

    #[test]
    fn yaw_wraps() {
        assert!((wrap_angle(PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert_eq!(wrap_angle(0.3), 0.3);
    }

    #[test]
    fn observation_echoes_previous_action() {
        let mut s = WalkerState::reset(0);
        let a = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
        s.step(&a, BehaviorCue::B1).unwrap();
        let out = s.step(&a, BehaviorCue::B1).unwrap();
        assert_eq!(&out.observation[8..16], &a);
        assert_eq!(out.observation[16], out.observation[18]);
    }
}
