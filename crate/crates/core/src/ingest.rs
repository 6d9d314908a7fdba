//! Reply-delay extraction from directed message events and discretization
//! into counts.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::sample::CountSample;

pub const DEFAULT_DT_SECONDS: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MessageEvent {
    pub timestamp: i64,
    pub sender: String,
    pub receiver: String,
}

impl MessageEvent {
    pub fn new(timestamp: i64, sender: impl Into<String>, receiver: impl Into<String>) -> Self {
        Self {
            timestamp,
            sender: sender.into(),
            receiver: receiver.into(),
        }
    }
}

/// How a reverse-direction message is matched to earlier messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplyRule {
    /// Every `A -> B` message is answered by the first later `B -> A`
    /// message; one reply may answer several messages.
    #[default]
    FirstResponse,
    /// Each `B -> A` message answers at most one pending `A -> B` message,
    /// oldest first.
    Exclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExtractionStats {
    pub events: usize,
    pub self_messages: usize,
    pub unanswered: usize,
    pub replies: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplyDelaySample {
    /// Delays in seconds, ordered by the time of the answered message.
    pub delays: Vec<f64>,
    /// Discretization interval in seconds.
    pub dt: f64,
}

impl ReplyDelaySample {
    pub fn new(delays: Vec<f64>, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "discretization interval {dt} must be finite and > 0"
            )));
        }
        if delays.iter().any(|&d| !(d >= 0.0) || !d.is_finite()) {
            return Err(Error::Domain("delays must be finite and >= 0"));
        }
        Ok(Self { delays, dt })
    }
}

/// Extracts reply delays from `events`; input order does not matter.
pub fn extract_reply_delays(
    events: &[MessageEvent],
    rule: ReplyRule,
    dt: f64,
) -> Result<(ReplyDelaySample, ExtractionStats)> {
    let mut sorted: Vec<&MessageEvent> = events.iter().collect();
    sorted.sort();

    let mut stats = ExtractionStats {
        events: events.len(),
        ..Default::default()
    };
    // per ordered pair (from, to): indices into `sorted`
    let mut by_pair: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, e) in sorted.iter().enumerate() {
        if e.sender == e.receiver {
            stats.self_messages += 1;
            continue;
        }
        by_pair
            .entry((e.sender.as_str(), e.receiver.as_str()))
            .or_default()
            .push(i);
    }

    // (index of answered message, delay)
    let mut matched: Vec<(usize, i64)> = Vec::new();
    for (&(from, to), outgoing) in &by_pair {
        let Some(replies) = by_pair.get(&(to, from)) else {
            continue;
        };
        let reply_times: Vec<i64> = replies.iter().map(|&i| sorted[i].timestamp).collect();
        match rule {
            ReplyRule::FirstResponse => {
                for &i in outgoing {
                    let t = sorted[i].timestamp;
                    let j = reply_times.partition_point(|&r| r <= t);
                    if let Some(&r) = reply_times.get(j) {
                        matched.push((i, r - t));
                    }
                }
            }
            ReplyRule::Exclusive => {
                let mut pending: VecDeque<usize> = VecDeque::new();
                let mut next_out = 0;
                for &r in &reply_times {
                    while next_out < outgoing.len() && sorted[outgoing[next_out]].timestamp < r {
                        pending.push_back(outgoing[next_out]);
                        next_out += 1;
                    }
                    if let Some(i) = pending.pop_front() {
                        matched.push((i, r - sorted[i].timestamp));
                    }
                }
            }
        }
    }
    matched.sort_unstable();

    let outgoing_total: usize = by_pair.values().map(Vec::len).sum();
    stats.replies = matched.len();
    stats.unanswered = outgoing_total - matched.len();
    if matched.is_empty() {
        return Err(Error::NoReplies);
    }
    let delays = matched.into_iter().map(|(_, d)| d as f64).collect();
    Ok((ReplyDelaySample::new(delays, dt)?, stats))
}

/// `k = max(1, ceil(delay / dt))`.
pub fn discretize_delay(delay: f64, dt: f64) -> u64 {
    let k = math::ceil(delay / dt);
    if k < 1.0 {
        1
    } else if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        k as u64
    }
}

pub fn discretize(sample: &ReplyDelaySample) -> Result<CountSample> {
    if !(sample.dt > 0.0) {
        return Err(Error::InvalidParameter(
            "discretization interval must be > 0".into(),
        ));
    }
    CountSample::from_values(
        sample
            .delays
            .iter()
            .map(|&d| discretize_delay(d, sample.dt)),
    )
}
