//! Seeded synthetic corpora with a hub-heavy degree distribution, for
//! exercising the walk and selection stages at realistic scale.
//!
//! Papers belong to topics. Each paper links to a few private nodes, to a
//! Zipf-weighted sample of its topic's shared nodes and to a Zipf-weighted
//! sample of global hubs. The defaults give about 29.5k nodes and 197.5k
//! edges.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{GraphParts, KnowledgeGraph, Node, NodeId, NodeOrigin, PaperId};
use crate::kind::NodeKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthParams {
    pub papers: usize,
    pub topics: usize,
    pub global_hubs: usize,
    pub topic_pool: usize,
    pub private_per_paper: usize,
    pub topic_picks: usize,
    pub global_picks: usize,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            papers: 2500,
            topics: 40,
            global_hubs: 30,
            topic_pool: 300,
            private_per_paper: 6,
            topic_picks: 70,
            global_picks: 3,
            seed: 7,
        }
    }
}

const TOPIC_KINDS: [NodeKind; 7] = [
    NodeKind::ClassificationTags,
    NodeKind::ResearchBackground,
    NodeKind::Methodology,
    NodeKind::Datasets,
    NodeKind::Metrics,
    NodeKind::Results,
    NodeKind::Limitations,
];

const PRIVATE_KINDS: [NodeKind; 6] = [
    NodeKind::KeyContributions,
    NodeKind::Figures,
    NodeKind::Tables,
    NodeKind::Formulas,
    NodeKind::Algorithms,
    NodeKind::Results,
];

/// `count` distinct indices of `0..weights.len()`, drawn without replacement
/// with probability proportional to weight (exponential-key method).
fn weighted_sample<R: Rng>(rng: &mut R, weights: &[f64], count: usize) -> Vec<usize> {
    let mut keys: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let u: f64 = 1.0 - rng.random::<f64>();
            (libm::log(u) / w, i)
        })
        .collect();
    let count = count.min(keys.len());
    if count < keys.len() {
        keys.select_nth_unstable_by(count, |a, b| b.0.total_cmp(&a.0));
        keys.truncate(count);
    }
    keys.into_iter().map(|(_, i)| i).collect()
}

fn zipf(n: usize) -> Vec<f64> {
    (1..=n).map(|r| 1.0 / r as f64).collect()
}

struct Proto {
    kind: NodeKind,
    content: alloc::string::String,
    papers: BTreeSet<usize>,
}

/// Builds the synthetic graph. Nodes no paper links to are omitted.
pub fn hub_heavy_graph(p: &SynthParams) -> KnowledgeGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let topics = p.topics.max(1);
    let topic_of: Vec<usize> = (0..p.papers).map(|_| rng.random_range(0..topics)).collect();

    let mut protos: Vec<Proto> = Vec::new();
    let global_base = protos.len();
    for h in 0..p.global_hubs {
        protos.push(Proto {
            kind: NodeKind::ClassificationTags,
            content: format!("global tag {h}"),
            papers: BTreeSet::new(),
        });
    }
    let topic_base = protos.len();
    for t in 0..topics {
        for j in 0..p.topic_pool {
            protos.push(Proto {
                kind: TOPIC_KINDS[j % TOPIC_KINDS.len()],
                content: format!("topic {t} entity {j}"),
                papers: BTreeSet::new(),
            });
        }
    }

    let zs = zipf(p.topic_pool);
    let zg = zipf(p.global_hubs);
    for (paper, &t) in topic_of.iter().enumerate() {
        for j in 0..p.private_per_paper {
            protos.push(Proto {
                kind: PRIVATE_KINDS[j % PRIVATE_KINDS.len()],
                content: format!("paper {paper} item {j}"),
                papers: BTreeSet::from([paper]),
            });
        }
        for j in weighted_sample(&mut rng, &zs, p.topic_picks) {
            protos[topic_base + t * p.topic_pool + j].papers.insert(paper);
        }
        for h in weighted_sample(&mut rng, &zg, p.global_picks) {
            protos[global_base + h].papers.insert(paper);
        }
    }

    let paper_id = |i: usize| PaperId::from(format!("s{i:05}"));
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for i in 0..p.papers {
        nodes.push(Node {
            id: NodeId(i as u32),
            kind: NodeKind::Title,
            content: format!("synthetic paper {i}"),
            modality: NodeKind::Title.modality(),
            media: None,
            origin: NodeOrigin {
                paper_id: paper_id(i),
                ordinal: 0,
            },
            source_paper_ids: BTreeSet::from([paper_id(i)]),
        });
    }
    let mut next = p.papers as u32;
    for proto in protos.into_iter().filter(|pr| !pr.papers.is_empty()) {
        let id = NodeId(next);
        next += 1;
        let first = *proto.papers.first().expect("filtered non-empty");
        for &paper in &proto.papers {
            edges.push((NodeId(paper as u32), id));
        }
        nodes.push(Node {
            id,
            kind: proto.kind,
            content: proto.content,
            modality: proto.kind.modality(),
            media: None,
            origin: NodeOrigin {
                paper_id: paper_id(first),
                ordinal: 0,
            },
            source_paper_ids: proto.papers.iter().map(|&i| paper_id(i)).collect(),
        });
    }
    KnowledgeGraph::from_parts(GraphParts {
        next_id: next,
        nodes,
        edges,
        high_frequency: Vec::new(),
    })
    .expect("synthetic parts are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instance_is_consistent_and_seeded() {
        let p = SynthParams {
            papers: 60,
            topics: 3,
            global_hubs: 5,
            topic_pool: 30,
            private_per_paper: 2,
            topic_picks: 6,
            global_picks: 2,
            seed: 1,
        };
        let g = hub_heavy_graph(&p);
        g.check_invariants().unwrap();
        assert_eq!(g.articles().len(), 60);
        assert_eq!(g.num_edges(), 60 * (2 + 6 + 2));
        assert_eq!(g, hub_heavy_graph(&p));
    }

    #[test]
    fn weighted_sample_is_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = weighted_sample(&mut rng, &zipf(50), 20);
        assert_eq!(s.iter().collect::<BTreeSet<_>>().len(), 20);
    }
}
