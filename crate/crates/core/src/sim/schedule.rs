use crate::Error;

/// Fixed-rate module schedule on a common base tick. Module `m` runs on ticks
/// where `tick % every_m == 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub base_hz: u32,
    pub tracking_every: u32,
    pub segmentation_every: u32,
    pub refinement_every: u32,
    pub planning_every: u32,
}

impl Default for Schedule {
    /// 90 Hz base: body tracking 15 Hz, segmentation 9 Hz, grasp refinement
    /// 5 Hz, planning 10 Hz.
    fn default() -> Self {
        Schedule::from_rates(90, 15, 9, 5, 10).expect("90 Hz divides every default rate")
    }
}

impl Schedule {
    pub fn from_rates(base_hz: u32, tracking: u32, segmentation: u32, refinement: u32, planning: u32) -> Result<Self, Error> {
        let every = |hz: u32| {
            if hz == 0 || !base_hz.is_multiple_of(hz) {
                Err(Error::InvalidConfig("schedule"))
            } else {
                Ok(base_hz / hz)
            }
        };
        Ok(Self {
            base_hz,
            tracking_every: every(tracking)?,
            segmentation_every: every(segmentation)?,
            refinement_every: every(refinement)?,
            planning_every: every(planning)?,
        })
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.base_hz as f64
    }

    pub fn tracking(&self, tick: u64) -> bool {
        tick.is_multiple_of(self.tracking_every as u64)
    }

    pub fn segmentation(&self, tick: u64) -> bool {
        tick.is_multiple_of(self.segmentation_every as u64)
    }

    pub fn refinement(&self, tick: u64) -> bool {
        tick.is_multiple_of(self.refinement_every as u64)
    }

    pub fn planning(&self, tick: u64) -> bool {
        tick.is_multiple_of(self.planning_every as u64)
    }
}
