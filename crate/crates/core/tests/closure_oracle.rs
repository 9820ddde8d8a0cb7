mod support;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempeval_core::closure::reduce;
use tempeval_core::{EntityRef, PointGraph, RelationType as R, TemporalLink};

use support::oracle::{compare_with_closure, entity_name, random_case, satisfiable, LABELS};

#[test]
fn every_single_link_agrees_with_oracle() {
    for r in LABELS {
        compare_with_closure(2, &[(0, r, 1)]).unwrap();
    }
}

#[test]
fn every_label_pair_on_a_chain_agrees_with_oracle() {
    for r in LABELS {
        for s in LABELS {
            compare_with_closure(3, &[(0, r, 1), (1, s, 2)]).unwrap();
        }
    }
}

#[test]
fn random_link_sets_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2_000 {
        let (n, links) = random_case(&mut rng);
        compare_with_closure(n, &links).unwrap();
    }
}

fn tlinks(links: &[(usize, R, usize)]) -> Vec<TemporalLink> {
    links
        .iter()
        .enumerate()
        .map(|(i, &(a, r, b))| {
            TemporalLink::new(format!("l{}", i + 1), EntityRef::Event(entity_name(a)), EntityRef::Event(entity_name(b)), r)
        })
        .collect()
}

#[test]
fn reduction_preserves_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..2_000 {
        let (n, links) = random_case(&mut rng);
        if !satisfiable(n, &links) {
            continue;
        }
        let full = tlinks(&links);
        let reduced = reduce(&full, (0..n).map(entity_name)).unwrap();
        assert!(reduced.len() <= full.len());
        let a = PointGraph::build(&full, (0..n).map(entity_name)).unwrap().close().unwrap();
        let b = PointGraph::build(&reduced, (0..n).map(entity_name)).unwrap().close().unwrap();
        assert_eq!(a, b, "{links:?} reduced to {reduced:?}");
        checked += 1;
    }
    assert!(checked > 1_000);
}

#[test]
fn closing_twice_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1_000 {
        let (n, links) = random_case(&mut rng);
        let graph = PointGraph::build(&tlinks(&links), (0..n).map(entity_name)).unwrap();
        if let Ok(closed) = graph.close() {
            assert_eq!(closed.to_point_graph().close().unwrap(), closed);
        }
    }
}
