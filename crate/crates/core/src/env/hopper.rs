use super::{clamp_action, rewards, BehaviorCue, Environment, StepOutcome, DT};
use crate::error::{Error, Result};

pub const GRAVITY: f64 = 9.8;
pub const TARGET_X: f64 = 1000.0;
/// Episode ends once the hopper has been on the ground this many steps in a row.
pub const MAX_GROUND_STEPS: u32 = 50;
const JUMP_SPEED: f64 = 5.0;
const PUSH: f64 = 1.0;
const AIR_BRAKE: f64 = 0.1;
const LANDING_RETENTION: f64 = 0.5;

/// Point-mass hopper moving along x toward a target at `x = 1000`.
///
/// On the ground, `action[1]` launches a jump and `action[0]` pushes
/// horizontally; in flight, positive `action[2]` brakes horizontal motion.
/// Landing halves the horizontal speed.
#[derive(Debug, Clone, PartialEq)]
pub struct HopperState {
    pub x: f64,
    pub h: f64,
    pub vx: f64,
    pub vh: f64,
    pub contact: bool,
    pub ground_timer: u32,
    pub x_old: f64,
    pub h_old: f64,
    pub d: f64,
    pub d_old: f64,
    pub last_jump_action: f64,
}

impl HopperState {
    fn is_finite(&self) -> bool {
        [self.x, self.h, self.vx, self.vh, self.d]
            .iter()
            .all(|v| v.is_finite())
    }
}

impl Environment for HopperState {
    const OBS_DIM: usize = 17;
    const ACTION_DIM: usize = 3;
    const TRACE_COLUMNS: [&'static str; 2] = ["h", "vh"];

    /// The seed is reserved; every episode starts at rest on the ground.
    fn reset(_episode_seed: u64) -> Self {
        HopperState {
            x: 0.0,
            h: 0.0,
            vx: 0.0,
            vh: 0.0,
            contact: true,
            ground_timer: 0,
            x_old: 0.0,
            h_old: 0.0,
            d: TARGET_X,
            d_old: TARGET_X,
            last_jump_action: 0.0,
        }
    }

    fn observation_body(&self) -> Vec<f64> {
        let contact = if self.contact { 1.0 } else { 0.0 };
        vec![
            self.h,
            0.0, // sin(angle to target), target straight ahead
            1.0, // cos(angle to target)
            self.vx,
            0.0,
            self.vh,
            0.0, // roll
            0.0, // pitch
            self.vx / 10.0,
            self.vh / 10.0,
            self.h,
            contact,
            self.ground_timer as f64 / MAX_GROUND_STEPS as f64,
            self.last_jump_action,
            contact,
        ]
    }

    fn step(&mut self, action: &[f64], behavior: BehaviorCue) -> Result<StepOutcome> {
        let a: [f64; 3] = clamp_action(action)?;
        self.x_old = self.x;
        self.h_old = self.h;
        self.d_old = self.d;

        if self.contact {
            self.vh = a[1].max(0.0) * JUMP_SPEED;
            self.vx += a[0] * PUSH;
            self.contact = self.vh <= 0.0;
        } else {
            self.vh -= GRAVITY * DT;
            self.vx *= 1.0 - AIR_BRAKE * a[2].max(0.0);
        }
        self.x += self.vx * DT;
        self.h += self.vh * DT;
        if self.h < 0.0 {
            self.h = 0.0;
            self.vh = 0.0;
            self.vx *= LANDING_RETENTION;
            self.contact = true;
        }
        if self.contact {
            self.ground_timer += 1;
        } else {
            self.ground_timer = 0;
        }
        self.d = TARGET_X - self.x;
        self.last_jump_action = a[1];

        if !self.is_finite() {
            return Err(Error::Numerical("hopper state became non-finite".into()));
        }
        let reward = match behavior {
            BehaviorCue::B1 => rewards::hopper_forward(self.d_old, self.d, DT),
            BehaviorCue::B2 => rewards::hopper_vertical(self.h_old, self.h, self.d_old, self.d, DT),
        };
        Ok(StepOutcome {
            observation: self.observe(behavior),
            reward,
            done: self.ground_timer > MAX_GROUND_STEPS,
        })
    }

    fn trace_state(&self) -> [f64; 3] {
        [self.x, self.h, self.vh]
    }
}
