//! Tabular SARSA agent with an ε-greedy policy over detector actions.
//!
//! Each step runs the chosen detector on the current snapshot, rewards the
//! resulting partition with the configured metric (modularity density by
//! default), picks the next action with the same policy and applies the
//! SARSA update. Episodes end after `steps_per_episode` steps or, when a
//! patience is configured, once the episode's best reward has not improved
//! for that many consecutive steps. Snapshots advance with the episode index.

mod qtable;

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::sync::{Arc, Mutex};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use qtable::{state_of, QEntry, QTable, State};

use crate::detectors::{Action, ActionSpace};
use crate::error::{Error, Result};
use crate::graph::{Graph, SnapshotStream};
use crate::scoring::{Metric, Partition};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub max_episodes: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub steps_per_episode: usize,
    /// Early stop after this many steps without a new episode best. Off by
    /// default: a greedy agent repeating a deterministic detector never
    /// improves on itself, so early stopping shortens exactly the episodes
    /// that exploit well and accumulated reward stops reflecting the policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patience: Option<usize>,
    pub metric: Metric,
    pub seed: u64,
    /// Number of reward buckets in the state.
    pub buckets: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            max_episodes: 50,
            alpha: 0.8,
            gamma: 0.5,
            epsilon: 0.2,
            steps_per_episode: 20,
            patience: None,
            metric: Metric::ModularityDensity,
            seed: 0,
            buckets: 10,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            problems.push(format!("alpha = {} is outside (0, 1]", self.alpha));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            problems.push(format!("gamma = {} is outside [0, 1)", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            problems.push(format!("epsilon = {} is outside [0, 1]", self.epsilon));
        }
        if self.steps_per_episode == 0 {
            problems.push("steps_per_episode must be at least 1".into());
        }
        if self.patience == Some(0) {
            problems.push("patience must be at least 1".into());
        }
        if self.buckets == 0 {
            problems.push("buckets must be at least 1".into());
        }
        problems
    }
}

/// ε-greedy action choice.
///
/// With probability `epsilon` a uniformly random element of `allowed`;
/// otherwise the allowed action with the largest `q[state, ·]`, ties going to
/// the earliest in `allowed` (enumeration order). When `reward > 0` the
/// chosen action then moves one step up or down its parameter grid, the
/// direction drawn from `rng`.
pub fn improve_modularity_policy(
    state: State,
    reward: f64,
    epsilon: f64,
    q: &QTable,
    space: &ActionSpace,
    allowed: &[Action],
    rng: &mut seed::Rng,
) -> Result<Action> {
    if allowed.is_empty() {
        return Err(Error::Config(vec![
            "no detector action is allowed for this graph".into()
        ]));
    }
    let mut action = if rng.gen::<f64>() < epsilon {
        allowed[rng.gen_range(0..allowed.len())]
    } else {
        let mut best = allowed[0];
        let mut best_value = q.get(state, best);
        for &a in &allowed[1..] {
            let v = q.get(state, a);
            if v > best_value {
                best = a;
                best_value = v;
            }
        }
        best
    };
    if reward > 0.0 {
        action = space.neighbor(action, rng.gen_bool(0.5));
    }
    Ok(action)
}

/// One logged agent step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub episode: usize,
    pub step: usize,
    pub snapshot: usize,
    pub state: State,
    pub action: Action,
    pub detector_seed: u64,
    pub reward: f64,
    pub accumulated_reward: f64,
    /// `Q(state, action)` after the update.
    pub q_value: f64,
    /// The action was masked for the snapshot; reward forced to 0.
    pub refused: bool,
    pub partition: Option<Arc<Partition>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub snapshot: usize,
    pub steps: usize,
    pub accumulated_reward: f64,
    pub best_reward: f64,
    /// Index into [`EpisodeLog::steps`] of the episode's best step.
    pub best_step: usize,
}

#[derive(Debug, Clone)]
pub struct EpisodeLog {
    pub metric: Metric,
    pub steps: Vec<StepRecord>,
    pub episodes: Vec<EpisodeSummary>,
}

impl EpisodeLog {
    /// Step with the highest reward over the whole run (first on ties).
    pub fn best_step(&self) -> Option<&StepRecord> {
        self.steps
            .iter()
            .filter(|s| s.partition.is_some())
            .fold(None, |best: Option<&StepRecord>, s| match best {
                Some(b) if b.reward >= s.reward => Some(b),
                _ => Some(s),
            })
    }

    /// Mean over episodes of each episode's best reward.
    pub fn average_metric(&self) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        self.episodes.iter().map(|e| e.best_reward).sum::<f64>() / self.episodes.len() as f64
    }

    /// Episode log as CSV:
    /// `episode,step,state,action,reward,accumulated_reward,q_value`.
    pub fn write_csv<W: Write>(&self, space: &ActionSpace, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Invariant(format!("writing episode CSV: {e}"));
        out.write_record([
            "episode",
            "step",
            "state",
            "action",
            "reward",
            "accumulated_reward",
            "q_value",
        ])
        .map_err(csv_err)?;
        for s in &self.steps {
            out.write_record([
                s.episode.to_string(),
                s.step.to_string(),
                s.state.to_string(),
                space.encode(s.action),
                s.reward.to_string(),
                s.accumulated_reward.to_string(),
                s.q_value.to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()
            .map_err(|e| Error::Invariant(format!("writing episode CSV: {e}")))
    }
}

/// Outcome of [`run_agent`]: the step log and the learned table.
#[derive(Debug, Clone)]
pub struct AgentRun {
    pub log: EpisodeLog,
    pub qtable: QTable,
}

type CacheKey = (u64, Action, Option<u64>);

/// Memo of detector outputs and their scores.
///
/// Deterministic detectors are keyed by (graph fingerprint, action); seeded
/// ones also by seed. Sharing one cache between independent runs changes
/// nothing but wall-clock time.
#[derive(Debug, Default)]
pub struct DetectionCache {
    inner: Mutex<HashMap<CacheKey, (Arc<Partition>, f64)>>,
}

impl DetectionCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get_or_run(
        &self,
        key: CacheKey,
        run: impl FnOnce() -> Result<(Partition, f64)>,
    ) -> Result<(Arc<Partition>, f64)> {
        if let Some(hit) = self.inner.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let (p, score) = run()?;
        let entry = (Arc::new(p), score);
        // seeded results are rarely reused; keep the memo small
        if key.2.is_none() {
            self.inner.lock().expect("cache lock").insert(key, entry.clone());
        }
        Ok(entry)
    }
}

pub(crate) fn fingerprint(g: &Graph) -> u64 {
    let mut h = DefaultHasher::new();
    g.node_count().hash(&mut h);
    g.edges().hash(&mut h);
    h.finish()
}

/// Snapshot used in `episode`: `episode · snapshots / episodes`.
pub fn snapshot_for_episode(episode: usize, episodes: usize, snapshots: usize) -> usize {
    (episode * snapshots / episodes.max(1)).min(snapshots - 1)
}

pub fn run_agent(stream: &SnapshotStream, config: &AgentConfig, space: &ActionSpace) -> Result<AgentRun> {
    run_agent_with_cache(stream, config, space, &DetectionCache::new())
}

/// [`run_agent`] with a caller-provided detection memo.
pub fn run_agent_with_cache(
    stream: &SnapshotStream,
    config: &AgentConfig,
    space: &ActionSpace,
    cache: &DetectionCache,
) -> Result<AgentRun> {
    let problems = config.validate();
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let mut rng = seed::rng(seed::derive(config.seed, "agent"));
    let mut q = QTable::new();
    let mut log = EpisodeLog {
        metric: config.metric,
        steps: Vec::new(),
        episodes: Vec::new(),
    };
    let fingerprints: Vec<u64> = stream.iter().map(fingerprint).collect();

    for episode in 0..config.max_episodes {
        let snapshot = snapshot_for_episode(episode, config.max_episodes, stream.len());
        let g = stream.get(snapshot);
        let allowed = space.allowed_actions(g.node_count());

        let mut state = State::INITIAL;
        let mut action = improve_modularity_policy(state, 0.0, config.epsilon, &q, space, &allowed, &mut rng)?;
        let mut accumulated = 0.0;
        let mut best = f64::NEG_INFINITY;
        let mut best_step = log.steps.len();
        let mut stale = 0;
        let first = log.steps.len();

        for step in 0..config.steps_per_episode {
            let detector_seed: u64 = rng.gen();
            let key = (
                fingerprints[snapshot],
                action,
                ActionSpace::is_seeded(action).then_some(detector_seed),
            );
            let outcome = cache.get_or_run(key, || {
                let p = space.run(action, g, detector_seed)?;
                let r = config.metric.score(g, &p)?;
                Ok((p, r))
            });
            let (partition, reward, refused) = match outcome {
                Ok((p, r)) => (Some(p), r, false),
                Err(Error::Refused(_)) => (None, 0.0, true),
                Err(e) => return Err(e),
            };

            let next_state = state_of(reward, Some(action.detector), config.buckets);
            let next_action =
                improve_modularity_policy(next_state, reward, config.epsilon, &q, space, &allowed, &mut rng)?;
            let q_value = q.sarsa_update(
                state,
                action,
                reward,
                next_state,
                next_action,
                config.alpha,
                config.gamma,
            );
            accumulated += reward;

            log.steps.push(StepRecord {
                episode,
                step,
                snapshot,
                state,
                action,
                detector_seed,
                reward,
                accumulated_reward: accumulated,
                q_value,
                refused,
                partition,
            });

            if !refused && reward > best + 1e-12 {
                best = reward;
                best_step = log.steps.len() - 1;
                stale = 0;
            } else {
                stale += 1;
            }
            state = next_state;
            action = next_action;
            if config.patience.is_some_and(|p| stale >= p) {
                break;
            }
        }

        log.episodes.push(EpisodeSummary {
            episode,
            snapshot,
            steps: log.steps.len() - first,
            accumulated_reward: accumulated,
            best_reward: if best.is_finite() { best } else { 0.0 },
            best_step,
        });
    }
    Ok(AgentRun { log, qtable: q })
}
