#![allow(dead_code)]

//! Brute-force interval oracle. Entities get integer endpoints with
//! `start < end`; every assignment satisfying the links is a model. A label
//! is entailed between two entities iff it holds in every model.

use tempeval_core::RelationType;

pub const LABELS: [RelationType; 13] = [
    RelationType::Before,
    RelationType::After,
    RelationType::Includes,
    RelationType::IsIncluded,
    RelationType::During,
    RelationType::Simultaneous,
    RelationType::IAfter,
    RelationType::IBefore,
    RelationType::Identity,
    RelationType::Begins,
    RelationType::Ends,
    RelationType::BegunBy,
    RelationType::EndedBy,
];

pub fn holds(relation: RelationType, a: (i32, i32), b: (i32, i32)) -> bool {
    let ((as_, ae), (bs, be)) = (a, b);
    use RelationType::*;
    match relation {
        Before => ae < bs,
        After => be < as_,
        IBefore => ae == bs,
        IAfter => be == as_,
        Includes => as_ < bs && be < ae,
        IsIncluded => bs < as_ && ae < be,
        Begins => as_ == bs && ae < be,
        BegunBy => as_ == bs && be < ae,
        Ends => ae == be && bs < as_,
        EndedBy => ae == be && as_ < bs,
        Simultaneous | Identity | During => as_ == bs && ae == be,
        None => true,
    }
}

#[derive(Debug)]
pub struct Verdict {
    pub consistent: bool,
    /// `violated[a][b]` has bit `k` set iff `LABELS[k]` fails for (a, b) in some model.
    pub violated: Vec<Vec<u16>>,
}

impl Verdict {
    pub fn entails(&self, a: usize, label: usize, b: usize) -> bool {
        self.consistent && self.violated[a][b] & (1 << label) == 0
    }
}

/// `links` are `(a, relation, b)` over entities `0..n`.
pub fn solve(n: usize, links: &[(usize, RelationType, usize)]) -> Verdict {
    // 2n distinct values always suffice to realize any order of 2n points.
    let max = 2 * n as i32;
    let mut state = Search {
        n,
        max,
        links,
        assigned: vec![(0, 0); n],
        violated: vec![vec![0u16; n]; n],
        found: false,
        first_only: false,
    };
    state.assign(0);
    Verdict { consistent: state.found, violated: state.violated }
}

struct Search<'a> {
    n: usize,
    max: i32,
    links: &'a [(usize, RelationType, usize)],
    assigned: Vec<(i32, i32)>,
    violated: Vec<Vec<u16>>,
    found: bool,
    first_only: bool,
}

const FULL: u16 = (1 << 13) - 1;

impl Search<'_> {
    fn saturated(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| a == b || self.violated[a][b] == FULL))
    }

    /// Returns true once nothing more can be learned.
    fn assign(&mut self, i: usize) -> bool {
        if i == self.n {
            self.found = true;
            if self.first_only {
                return true;
            }
            for a in 0..self.n {
                for b in 0..self.n {
                    if a == b {
                        continue;
                    }
                    for (k, &label) in LABELS.iter().enumerate() {
                        if !holds(label, self.assigned[a], self.assigned[b]) {
                            self.violated[a][b] |= 1 << k;
                        }
                    }
                }
            }
            return self.saturated();
        }
        for s in 0..self.max {
            for e in s + 1..self.max {
                self.assigned[i] = (s, e);
                let ok = self.links.iter().all(|&(a, r, b)| {
                    let (a_done, b_done) = (a <= i, b <= i);
                    !(a_done && b_done) || holds(r, self.assigned[a], self.assigned[b])
                });
                if ok && self.assign(i + 1) {
                    return true;
                }
            }
        }
        false
    }
}

/// Whether the links admit any model.
pub fn satisfiable(n: usize, links: &[(usize, RelationType, usize)]) -> bool {
    let mut state = Search {
        n,
        max: 2 * n as i32,
        links,
        assigned: vec![(0, 0); n],
        violated: vec![vec![0u16; n]; n],
        found: false,
        first_only: true,
    };
    state.assign(0);
    state.found
}

pub fn entity_name(i: usize) -> String {
    format!("E{i}")
}

/// A random link set: 2 to 4 entities, 1 to 3 links between distinct entities.
pub fn random_case(rng: &mut impl rand::Rng) -> (usize, Vec<(usize, RelationType, usize)>) {
    let n = rng.gen_range(2..=4);
    let k = rng.gen_range(1..=3);
    let links = (0..k)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            (a, LABELS[rng.gen_range(0..LABELS.len())], b)
        })
        .collect();
    (n, links)
}

/// Compares the point-algebra closure with the oracle on consistency and on
/// every ordered entity pair and label.
pub fn compare_with_closure(n: usize, links: &[(usize, RelationType, usize)]) -> Result<(), String> {
    use tempeval_core::{Entailment, EntityRef, PointGraph, TemporalLink};

    let tlinks: Vec<TemporalLink> = links
        .iter()
        .enumerate()
        .map(|(i, &(a, r, b))| {
            TemporalLink::new(format!("l{}", i + 1), EntityRef::Event(entity_name(a)), EntityRef::Event(entity_name(b)), r)
        })
        .collect();
    let graph = PointGraph::build(&tlinks, (0..n).map(entity_name)).map_err(|e| e.to_string())?;
    let verdict = solve(n, links);
    let closed = match graph.close() {
        Ok(c) => c,
        Err(_) if !verdict.consistent => return Ok(()),
        Err(w) => return Err(format!("{links:?}: closure reports {w} but the oracle found a model")),
    };
    if !verdict.consistent {
        return Err(format!("{links:?}: oracle finds no model but closure succeeded"));
    }
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            for (k, &label) in LABELS.iter().enumerate() {
                let got = closed
                    .entails_relation(&entity_name(a), label, &entity_name(b))
                    .map_err(|e| e.to_string())?
                    == Entailment::Yes;
                if got != verdict.entails(a, k, b) {
                    return Err(format!(
                        "{links:?}: E{a} {} E{b}: closure says {got}, oracle says {}",
                        label.as_str(),
                        !got
                    ));
                }
            }
        }
    }
    Ok(())
}
