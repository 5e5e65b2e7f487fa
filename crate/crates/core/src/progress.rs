//! Heartbeat reporting for long-running phases.
//!
//! Every phase of the pipelines accepts a [`Progress`] handle and reports a
//! monotone metric through it (edges removed, bicliques counted, nodes
//! explored). When enabled, a line is printed to stderr at most every
//! `interval`, so an operator can always tell the difference between slow
//! progress and no progress.

use std::time::{Duration, Instant};

pub struct Progress {
    enabled: bool,
    trace: bool,
    interval: Duration,
    last: Instant,
    started: Instant,
}

impl Progress {
    /// Heartbeats enabled, per-event tracing off.
    pub fn enabled() -> Self {
        Self::new(true, false)
    }

    /// No output at all; the default for library and test use.
    pub fn silent() -> Self {
        Self::new(false, false)
    }

    pub fn new(enabled: bool, trace: bool) -> Self {
        Progress {
            enabled,
            trace,
            interval: Duration::from_secs(10),
            last: Instant::now(),
            started: Instant::now(),
        }
    }

    pub fn with_interval(mut self, interval: Duration) -> Self {
        self.interval = interval;
        self
    }

    /// Reports a monotone metric; prints at most once per interval.
    pub fn heartbeat(&mut self, phase: &str, metric: u64, unit: &str) {
        if !self.enabled {
            return;
        }
        if self.last.elapsed() >= self.interval {
            self.last = Instant::now();
            eprintln!(
                "[{phase}] {:>7.1}s {metric} {unit}",
                self.started.elapsed().as_secs_f64()
            );
        }
    }

    /// Per-event trace line (one per reduction removal, etc.), independent of
    /// the heartbeat throttle.
    pub fn trace(&mut self, line: impl FnOnce() -> String) {
        if self.enabled && self.trace {
            eprintln!("{}", line());
        }
    }
}

impl Default for Progress {
    fn default() -> Self {
        Self::silent()
    }
}
