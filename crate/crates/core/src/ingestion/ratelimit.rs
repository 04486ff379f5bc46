//! Per-source request budget.

use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// At most `max_requests` requests in any window of `per_secs` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateLimit {
    pub max_requests: u32,
    pub per_secs: f64,
}

impl Default for RateLimit {
    fn default() -> Self {
        RateLimit {
            max_requests: 1,
            per_secs: 1.0,
        }
    }
}

impl RateLimit {
    pub fn window(&self) -> Duration {
        Duration::from_secs_f64(self.per_secs.max(0.0))
    }

    pub fn is_unlimited(&self) -> bool {
        self.max_requests == 0 || self.per_secs <= 0.0
    }
}

/// Sliding-window limiter. One instance per source; safe to share between
/// threads.
#[derive(Debug)]
pub struct RateLimiter {
    limit: RateLimit,
    sent: Mutex<VecDeque<Instant>>,
}

impl RateLimiter {
    pub fn new(limit: RateLimit) -> Self {
        RateLimiter {
            limit,
            sent: Mutex::new(VecDeque::new()),
        }
    }

    pub fn limit(&self) -> RateLimit {
        self.limit
    }

    /// Blocks until a request may be sent and records it. Returns the time
    /// spent waiting.
    pub fn acquire(&self) -> Duration {
        if self.limit.is_unlimited() {
            return Duration::ZERO;
        }
        let window = self.limit.window();
        let started = Instant::now();
        loop {
            let wait = {
                let mut sent = self.sent.lock().unwrap_or_else(|e| e.into_inner());
                let now = Instant::now();
                while sent
                    .front()
                    .is_some_and(|t| now.duration_since(*t) >= window)
                {
                    sent.pop_front();
                }
                if sent.len() < self.limit.max_requests as usize {
                    sent.push_back(now);
                    return started.elapsed();
                }
                window - now.duration_since(*sent.front().expect("window is full"))
            };
            std::thread::sleep(wait);
        }
    }
}
