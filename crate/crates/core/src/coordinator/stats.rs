use std::time::Duration;

use serde::Serialize;

/// Wall-clock timing over solver invocations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub count: u64,
    pub total: Duration,
    pub min: Option<Duration>,
    pub max: Option<Duration>,
    pub timeouts: u64,
}

impl SolveStats {
    pub fn record(&mut self, elapsed: Duration, timed_out: bool) {
        self.count += 1;
        self.total += elapsed;
        self.min = Some(self.min.map_or(elapsed, |m| m.min(elapsed)));
        self.max = Some(self.max.map_or(elapsed, |m| m.max(elapsed)));
        if timed_out {
            self.timeouts += 1;
        }
    }

    pub fn mean(&self) -> Option<Duration> {
        (self.count > 0).then(|| self.total / self.count as u32)
    }
}
