//! Per-step behavior rewards.

use std::f64::consts::FRAC_PI_4;

use super::BehaviorCue;

/// Progress toward the target per unit time: `(d_old − d) / dt`.
pub fn hopper_forward(d_old: f64, d: f64, dt: f64) -> f64 {
    (d_old - d) / dt
}

/// Vertical jumping: `2 |(h − h_old) / dt| − 0.5 · hopper_forward`.
///
/// Moving backward turns the forward penalty into a bonus.
pub fn hopper_vertical(h_old: f64, h: f64, d_old: f64, d: f64, dt: f64) -> f64 {
    let progress_up = ((h - h_old) / dt).abs();
    2.0 * progress_up - 0.5 * hopper_forward(d_old, d, dt)
}

/// Planar walking 45° left (B1) or right (B2) of the heading `yaw`.
pub fn walker(behavior: BehaviorCue, x_old: f64, y_old: f64, x: f64, y: f64, yaw: f64) -> f64 {
    let dx = x - x_old;
    let dy = y - y_old;
    let step_length = dx.hypot(dy);
    if step_length == 0.0 {
        return 0.0;
    }
    let self_angle = dy.atan2(dx) - yaw;
    match behavior {
        BehaviorCue::B1 => step_length * (self_angle - FRAC_PI_4).cos(),
        BehaviorCue::B2 => step_length * (self_angle + FRAC_PI_4).cos(),
    }
}
