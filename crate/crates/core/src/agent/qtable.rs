use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use crate::detectors::{Action, ActionSpace, DetectorId};

/// Agent state: the detector that produced the current structure and the
/// current metric value bucketed over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub last_detector: Option<DetectorId>,
    pub bucket: usize,
}

impl State {
    pub const INITIAL: State = State {
        last_detector: None,
        bucket: 0,
    };
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.last_detector {
            Some(d) => write!(f, "{d}|{}", self.bucket),
            None => write!(f, "none|{}", self.bucket),
        }
    }
}

/// Buckets `value` into one of `buckets` equal-width bins over `[0, 1]`.
/// Values outside the interval (and NaN) are clamped first.
pub fn state_of(value: f64, last_detector: Option<DetectorId>, buckets: usize) -> State {
    let clamped = if value.is_nan() { 0.0 } else { value.clamp(0.0, 1.0) };
    let bucket = ((clamped * buckets as f64).floor() as usize).min(buckets.saturating_sub(1));
    State { last_detector, bucket }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QEntry {
    pub value: f64,
    pub visits: u64,
}

/// Tabular action values. Entries never written read as 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QTable {
    entries: BTreeMap<(State, Action), QEntry>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, state: State, action: Action) -> f64 {
        self.entries.get(&(state, action)).map_or(0.0, |e| e.value)
    }

    pub fn visits(&self, state: State, action: Action) -> u64 {
        self.entries.get(&(state, action)).map_or(0, |e| e.visits)
    }

    pub fn set(&mut self, state: State, action: Action, value: f64) {
        self.entries.entry((state, action)).or_default().value = value;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(State, Action), &QEntry)> {
        self.entries.iter()
    }

    /// One SARSA step:
    /// `Q(s,a) ← Q(s,a) + α (r + γ Q(s',a') − Q(s,a))`. Returns the new value.
    #[allow(clippy::too_many_arguments)]
    pub fn sarsa_update(
        &mut self,
        state: State,
        action: Action,
        reward: f64,
        next_state: State,
        next_action: Action,
        alpha: f64,
        gamma: f64,
    ) -> f64 {
        let target = reward + gamma * self.get(next_state, next_action);
        let entry = self.entries.entry((state, action)).or_default();
        let predict = entry.value;
        // (1 − α)·predict + α·target: same update, exact when α = 1
        entry.value = (1.0 - alpha) * predict + alpha * target;
        entry.visits += 1;
        entry.value
    }

    /// `state<TAB>action<TAB>value<TAB>visits`, sorted by state then action.
    pub fn write_dump<W: Write>(&self, space: &ActionSpace, mut w: W) -> std::io::Result<()> {
        for ((s, a), e) in &self.entries {
            writeln!(w, "{s}\t{}\t{}\t{}", space.encode(*a), e.value, e.visits)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(i: usize) -> Action {
        Action {
            detector: DetectorId::Multilevel,
            index: i,
        }
    }

    #[test]
    fn bucketing() {
        assert_eq!(state_of(0.0, None, 10), State::INITIAL);
        let s = state_of(0.95, Some(DetectorId::Multilevel), 10);
        assert_eq!(s.bucket, 9);
        assert_eq!(state_of(1.0, None, 10).bucket, 9);
        assert_eq!(state_of(-0.2, Some(DetectorId::Walktrap), 10).bucket, 0);
        assert_eq!(state_of(f64::NAN, None, 10).bucket, 0);
        assert_eq!(state_of(0.35, None, 10).bucket, 3);
        assert_eq!(s.to_string(), "multilevel|9");
        assert_eq!(State::INITIAL.to_string(), "none|0");
    }

    #[test]
    fn sarsa_substitutions() {
        let s = State::INITIAL;
        let mut q = QTable::new();
        assert_eq!(q.sarsa_update(s, a(0), 0.0, s, a(1), 0.8, 0.5), 0.0);

        let mut q = QTable::new();
        let v = q.sarsa_update(s, a(0), 0.6, s, a(1), 0.8, 0.5);
        assert!((v - 0.48).abs() < 1e-12);

        let mut q = QTable::new();
        q.set(s, a(0), 0.48);
        q.set(s, a(1), 0.48);
        let v = q.sarsa_update(s, a(0), 0.6, s, a(1), 0.8, 0.5);
        assert!((v - 0.768).abs() < 1e-12);
        assert_eq!(q.visits(s, a(0)), 1);
    }

    #[test]
    fn missing_entries_read_zero() {
        let q = QTable::new();
        assert_eq!(q.get(State::INITIAL, a(3)), 0.0);
        assert_eq!(q.visits(State::INITIAL, a(3)), 0);
    }

    proptest! {
        #[test]
        fn greedy_one_step_sets_reward(r in 0.0f64..1.0, prior in -5.0f64..5.0) {
            let s = State::INITIAL;
            let mut q = QTable::new();
            q.set(s, a(0), prior);
            let v = q.sarsa_update(s, a(0), r, s, a(1), 1.0, 0.0);
            prop_assert_eq!(v, r);
        }

        #[test]
        fn values_stay_bounded(
            steps in proptest::collection::vec((0usize..4, 0usize..3, 0.0f64..=1.0, 0usize..4, 0usize..3), 1..300),
            alpha in 0.01f64..=1.0,
            gamma in 0.0f64..0.95,
        ) {
            let bound = 1.0 / (1.0 - gamma);
            let mut q = QTable::new();
            for (s, act, r, s2, act2) in steps {
                let st = State { last_detector: None, bucket: s };
                let st2 = State { last_detector: None, bucket: s2 };
                q.sarsa_update(st, a(act), r, st2, a(act2), alpha, gamma);
            }
            for (_, e) in q.iter() {
                prop_assert!(e.value >= 0.0 && e.value <= bound + 1e-12);
            }
        }
    }
}
