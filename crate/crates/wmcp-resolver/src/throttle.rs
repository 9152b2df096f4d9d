//! Token-bucket self-throttling from endpoint `rpm`/`burst` hints.
//!
//! Exact integer arithmetic: levels are tracked in sixtieths of a token,
//! so a refill of `rpm` tokens per minute is `rpm` sixtieths per second
//! with no rounding drift. Capacity is `burst` tokens. Over any window of
//! `W` seconds at most `burst + rpm*W/60` acquisitions can proceed.

use std::sync::Mutex;

use wmcp_core::EndpointPolicy;

/// One token expressed in sixtieths.
const TOKEN: u64 = 60;

/// Outcome of an acquire attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// A bucket token was consumed; the caller may proceed now.
    Proceed,
    /// Bucket empty; earliest unix second at which a token will exist.
    WaitUntil(u64),
}

#[derive(Debug)]
struct Bucket {
    /// Current level in sixtieths of a token.
    level: u64,
    /// Unix second of the last refill accounting.
    last_refill: u64,
}

/// Shared throttle state for one endpoint. Acquire calls are atomic:
/// no two callers can consume the same bucket token.
#[derive(Debug)]
pub struct ThrottleState {
    rpm: u64,
    capacity: u64,
    bucket: Mutex<Bucket>,
}

impl ThrottleState {
    /// Build from explicit hints. The bucket starts full.
    pub fn new(rpm: u64, burst: u64, now: u64) -> Self {
        let rpm = rpm.max(1);
        let burst = burst.max(1);
        ThrottleState {
            rpm,
            capacity: burst * TOKEN,
            bucket: Mutex::new(Bucket {
                level: burst * TOKEN,
                last_refill: now,
            }),
        }
    }

    /// Build from an endpoint policy; `None` when the policy carries no
    /// rpm hint (unthrottled). A missing burst defaults to
    /// `max(1, rpm/12)` — a five-second burst window.
    pub fn from_policy(policy: &EndpointPolicy, now: u64) -> Option<Self> {
        let rpm = policy.rpm?;
        let burst = policy.burst.unwrap_or_else(|| (rpm / 12).max(1));
        Some(ThrottleState::new(rpm, burst, now))
    }

    pub fn rpm(&self) -> u64 {
        self.rpm
    }

    pub fn burst(&self) -> u64 {
        self.capacity / TOKEN
    }

    /// Try to consume one token at `now` (unix seconds).
    pub fn acquire(&self, now: u64) -> Decision {
        let mut bucket = self.bucket.lock().expect("throttle lock poisoned");

        // Monotone refill: a clock that runs backwards adds nothing and
        // never rewinds the accounting point.
        if now > bucket.last_refill {
            let elapsed = now - bucket.last_refill;
            bucket.level = bucket
                .level
                .saturating_add(elapsed.saturating_mul(self.rpm))
                .min(self.capacity);
            bucket.last_refill = now;
        }

        if bucket.level >= TOKEN {
            bucket.level -= TOKEN;
            return Decision::Proceed;
        }

        let deficit = TOKEN - bucket.level;
        let wait_secs = deficit.div_ceil(self.rpm);
        Decision::WaitUntil(bucket.last_refill + wait_secs)
    }
}
