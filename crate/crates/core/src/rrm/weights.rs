/// Floor on the average rate used by proportional fairness, bits/s.
pub const PF_FLOOR_BPS: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SchedulerPolicy {
    #[default]
    RoundRobin,
    ProportionalFairness,
}

impl SchedulerPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::RoundRobin => "round_robin",
            Self::ProportionalFairness => "proportional_fair",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "round_robin" | "round-robin" | "rr" => Some(Self::RoundRobin),
            "proportional_fair" | "proportional-fair" | "pf" => Some(Self::ProportionalFairness),
            _ => None,
        }
    }
}

/// Per-entity service record the scheduler weights are derived from.
pub trait ServiceHistory {
    fn num_entities(&self) -> usize;
    fn times_scheduled(&self, entity: usize) -> u64;
    /// Credited rate averaged over the snapshots elapsed so far, bits/s.
    fn average_rate(&self, entity: usize) -> f64;
}

/// Scheduler weight of every entity.
///
/// Round robin uses `1 / (1 + times scheduled)`, proportional fairness the
/// reciprocal of the average rate (floored at [`PF_FLOOR_BPS`]).
pub fn update_weights<H: ServiceHistory + ?Sized>(history: &H, policy: SchedulerPolicy) -> Vec<f64> {
    (0..history.num_entities())
        .map(|e| match policy {
            SchedulerPolicy::RoundRobin => 1.0 / (1.0 + history.times_scheduled(e) as f64),
            SchedulerPolicy::ProportionalFairness => 1.0 / history.average_rate(e).max(PF_FLOOR_BPS),
        })
        .collect()
}
