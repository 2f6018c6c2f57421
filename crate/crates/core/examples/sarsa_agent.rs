//! Train the SARSA agent on a growing random graph next to its ε = 1 null
//! model and print per-episode accumulated reward plus the learned table.

use rlcomm::agent::{run_agent_with_cache, AgentConfig, DetectionCache};
use rlcomm::detectors::ActionSpace;
use rlcomm::graph::{build_snapshots, erdos_renyi, EdgeOrder};

fn main() -> rlcomm::Result<()> {
    let g = erdos_renyi(300, 0.03, 5)?;
    let stream = build_snapshots(&g, 5, EdgeOrder::Shuffled, 6)?;
    let space = ActionSpace::default();
    let cache = DetectionCache::new();

    let config = AgentConfig {
        seed: 1,
        ..AgentConfig::default()
    };
    let agent = run_agent_with_cache(&stream, &config, &space, &cache)?;
    let null = run_agent_with_cache(
        &stream,
        &AgentConfig {
            epsilon: 1.0,
            ..config.clone()
        },
        &space,
        &cache,
    )?;

    println!("{:>7} {:>8} {:>10} {:>10}", "episode", "snapshot", "agent", "null");
    for (a, n) in agent.log.episodes.iter().zip(&null.log.episodes) {
        println!(
            "{:>7} {:>8} {:>10.4} {:>10.4}",
            a.episode, a.snapshot, a.accumulated_reward, n.accumulated_reward
        );
    }
    println!(
        "\naverage best reward: agent {:.4}, null {:.4}",
        agent.log.average_metric(),
        null.log.average_metric()
    );

    if let Some(best) = agent.log.best_step() {
        println!(
            "best step: episode {} step {} {} -> {:.4}",
            best.episode,
            best.step,
            space.encode(best.action),
            best.reward
        );
    }

    let mut top: Vec<_> = agent.qtable.iter().collect();
    top.sort_by(|a, b| b.1.value.total_cmp(&a.1.value));
    println!("\nhighest Q entries:");
    for ((state, action), e) in top.into_iter().take(8) {
        println!(
            "  {state:<22} {:<36} {:.4} ({} visits)",
            space.encode(*action),
            e.value,
            e.visits
        );
    }
    Ok(())
}
