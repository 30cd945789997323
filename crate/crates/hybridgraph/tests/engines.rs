//! Quick cross-engine equivalence properties on small random graphs. The
//! full-scale equivalence sweep lives in the acceptance suite; this one
//! keeps the development loop honest in seconds.

mod common;

use std::collections::BTreeSet;

use common::{bfs_components, dense_pagerank, labeling_map, nested_loop_two_hop, random_graph};
use hybridgraph::engine::{local, parallel, PageRankOptions};
use proptest::prelude::*;
use rand::prelude::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn partitions_for(rng: &mut impl Rng) -> usize {
    *[1usize, 2, 3, 7, 16, 64]
        .choose(rng)
        .expect("choices are non-empty")
}

proptest! {
    #[test]
    fn component_partitions_match_across_engines_and_oracle(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = random_graph(&mut rng, 120, 300);

        let local_labels = labeling_map(&local::connected_components(&graph));
        let pg = parallel::partition(&graph, partitions_for(&mut rng)).unwrap();
        let rt = parallel::Runtime::new(rng.random_range(1..=4)).unwrap();
        let parallel_labels = labeling_map(&parallel::connected_components(&pg, &rt));
        let oracle = bfs_components(&graph);

        prop_assert_eq!(&local_labels, &oracle);
        prop_assert_eq!(&parallel_labels, &oracle);
        prop_assert_eq!(
            local::count_components(&graph),
            oracle.values().collect::<BTreeSet<_>>().len()
        );
    }

    #[test]
    fn motif_sets_match_across_engines_and_oracle(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = random_graph(&mut rng, 60, 200);
        let endpoint = *common::VERTEX_TYPES.choose(&mut rng).unwrap();
        let via_count = rng.random_range(1..=common::VERTEX_TYPES.len());
        let via: BTreeSet<String> = common::VERTEX_TYPES[..via_count]
            .iter()
            .map(|t| t.to_string())
            .collect();

        let local_motifs = local::two_hop_match(&graph, endpoint, &via);
        let pg = parallel::partition(&graph, partitions_for(&mut rng)).unwrap();
        let rt = parallel::Runtime::new(rng.random_range(1..=4)).unwrap();
        let parallel_motifs = parallel::two_hop_match(&pg, &rt, endpoint, &via);
        let oracle = nested_loop_two_hop(&graph, endpoint, &via);

        prop_assert_eq!(&local_motifs, &oracle);
        prop_assert_eq!(&parallel_motifs, &oracle);
    }

    #[test]
    fn pagerank_agrees_with_the_dense_oracle(seed: u64, forced_iterations: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = random_graph(&mut rng, 80, 200);
        let opts = PageRankOptions {
            damping: rng.random_range(0.3..0.95),
            max_iters: rng.random_range(1..40),
            // tol 0 forces every engine through the same iteration count.
            tol: if forced_iterations { 0.0 } else { 1e-8 },
        };

        let local_scores = local::pagerank(&graph, opts).unwrap();
        let pg = parallel::partition(&graph, partitions_for(&mut rng)).unwrap();
        let rt = parallel::Runtime::new(rng.random_range(1..=4)).unwrap();
        let parallel_scores = parallel::pagerank(&pg, &rt, opts).unwrap();
        let oracle = dense_pagerank(&graph, opts);

        for (vertex, expected) in &oracle {
            let got = local_scores.score(vertex).unwrap();
            prop_assert!(
                (got - expected).abs() <= 1e-12,
                "local {} vs oracle {} at {}", got, expected, vertex
            );
        }
        let worst = local_scores.max_abs_difference(&parallel_scores);
        prop_assert!(matches!(worst, Some(d) if d <= 1e-6), "engines differ: {:?}", worst);

        if !graph.vertices().is_empty() {
            prop_assert!((local_scores.sum() - 1.0).abs() <= 1e-9);
            prop_assert!((parallel_scores.sum() - 1.0).abs() <= 1e-9);
        }
    }
}
