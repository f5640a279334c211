use alloc::vec::Vec;

use crate::geometry::Vec3;

use super::trace::{TraceHeader, TraceRecord};

/// Slack on the per-tick motion limits.
const LIMIT_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("tick {tick}: records out of order")]
    TickOrder { tick: u64 },
    #[error("tick {tick}: selected grasp touches the hand")]
    UnsafeGrasp { tick: u64 },
    #[error("tick {tick}: moved {moved:.6} m, limit {limit:.6} m")]
    Speed { tick: u64, moved: f64, limit: f64 },
    #[error("tick {tick}: turned {turned:.6} rad, limit {limit:.6} rad")]
    Turn { tick: u64, turned: f64, limit: f64 },
}

/// Re-checks the safety and velocity invariants over a whole trace. Each
/// selected grasp is tested against the most recent hand cloud at or before
/// its tick.
pub fn audit(header: &TraceHeader, records: &[TraceRecord]) -> Result<(), Violation> {
    let mut hand: &[Vec3] = &[];
    let step_limit = header.v_max * header.dt + LIMIT_SLACK;
    let turn_limit = header.w_max * header.dt + LIMIT_SLACK;
    let mut prev: Option<&TraceRecord> = None;
    for r in records {
        if let Some(cloud) = &r.hand_cloud {
            hand = cloud;
        }
        if let Some(p) = prev {
            if r.tick != p.tick + 1 {
                return Err(Violation::TickOrder { tick: r.tick });
            }
            let moved = p.ee_pose.p.distance(r.ee_pose.p);
            if moved > step_limit {
                return Err(Violation::Speed { tick: r.tick, moved, limit: step_limit });
            }
            let turned = p.ee_pose.q.angle_to(r.ee_pose.q);
            if turned > turn_limit {
                return Err(Violation::Turn { tick: r.tick, turned, limit: turn_limit });
            }
        }
        if let Some(t) = &r.selected_target {
            if header.gripper.collides(&t.grasp.pose, hand, header.hand_margin) {
                return Err(Violation::UnsafeGrasp { tick: r.tick });
            }
        }
        prev = Some(r);
    }
    Ok(())
}

/// Ticks whose record carries `event`.
pub fn event_ticks(records: &[TraceRecord], event: &str) -> Vec<u64> {
    records.iter().filter(|r| r.events.iter().any(|e| e == event)).map(|r| r.tick).collect()
}
