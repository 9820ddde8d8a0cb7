//! Point-algebra temporal reasoning over TimeML interval relations.
//!
//! Every entity becomes two points, its start and its end. Interval labels
//! translate into conjunctions of `<` / `=` constraints between endpoints,
//! the constraint network is closed under composition, and entailment is
//! read off the closed matrix. All inputs are basic (non-disjunctive)
//! relations, so path consistency over points is exact.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::model::{AnnotatedDocument, EntityRef, RelationType, TemporalLink};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointRelation {
    Less,
    Equal,
    Greater,
    /// No information.
    Unknown,
}

impl PointRelation {
    pub fn converse(self) -> Self {
        match self {
            PointRelation::Less => PointRelation::Greater,
            PointRelation::Greater => PointRelation::Less,
            other => other,
        }
    }

    /// Relation between `a` and `c` implied by `a self b` and `b other c`.
    pub fn compose(self, other: PointRelation) -> PointRelation {
        use PointRelation::*;
        match (self, other) {
            (Equal, x) | (x, Equal) => x,
            (Less, Less) => Less,
            (Greater, Greater) => Greater,
            _ => Unknown,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PointRelation::Less => "<",
            PointRelation::Equal => "=",
            PointRelation::Greater => ">",
            PointRelation::Unknown => "?",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Start,
    End,
}

/// Which argument of a binary relation `a R b` an endpoint belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    A,
    B,
}

/// One endpoint constraint of an interval relation, e.g. `a.end < b.start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EndpointConstraint {
    pub left: (Operand, Endpoint),
    pub relation: PointRelation,
    pub right: (Operand, Endpoint),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("relation NONE has no endpoint semantics")]
    NoneRelation,
    #[error("unknown entity {id:?}{}", .link.as_ref().map(|l| format!(" in link {l}")).unwrap_or_default())]
    UnknownEntity { id: String, link: Option<String> },
    #[error(transparent)]
    Inconsistent(#[from] Inconsistency),
}

/// Endpoint constraints defining `a relation b`.
///
/// IDENTITY and DURING share the SIMULTANEOUS constraints; IBEFORE/IAFTER
/// mean the intervals meet.
pub fn interval_to_points(relation: RelationType) -> Result<Vec<EndpointConstraint>, ClosureError> {
    use Endpoint::{End, Start};
    use Operand::{A, B};
    use PointRelation::{Equal, Less};
    use RelationType as R;
    let c = |la, le, rel, ra, re| EndpointConstraint { left: (la, le), relation: rel, right: (ra, re) };
    let forward = match relation {
        R::None => return Err(ClosureError::NoneRelation),
        R::Before => vec![c(A, End, Less, B, Start)],
        R::IBefore => vec![c(A, End, Equal, B, Start)],
        R::Includes => vec![c(A, Start, Less, B, Start), c(B, End, Less, A, End)],
        R::Begins => vec![c(A, Start, Equal, B, Start), c(A, End, Less, B, End)],
        R::Ends => vec![c(A, End, Equal, B, End), c(B, Start, Less, A, Start)],
        R::Simultaneous | R::Identity | R::During => {
            vec![c(A, Start, Equal, B, Start), c(A, End, Equal, B, End)]
        }
        R::After | R::IAfter | R::IsIncluded | R::BegunBy | R::EndedBy => {
            let swap = |(o, e): (Operand, Endpoint)| (if o == A { B } else { A }, e);
            let inverse = relation.inverse().map_err(|_| ClosureError::NoneRelation)?;
            return Ok(interval_to_points(inverse)?
                .into_iter()
                .map(|k| EndpointConstraint { left: swap(k.left), relation: k.relation, right: swap(k.right) })
                .collect());
        }
    };
    Ok(forward)
}

/// Where a base constraint came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    /// `start < end` for the entity with this identifier.
    Interval(String),
    /// The link with this lid.
    Link(String),
    /// A constraint copied out of an already closed graph.
    Derived,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Interval(id) => write!(f, "interval {id}"),
            Origin::Link(lid) => write!(f, "link {lid}"),
            Origin::Derived => f.write_str("derived"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct BaseConstraint {
    from: usize,
    to: usize,
    /// `Less` or `Equal`; `Greater` is stored flipped.
    relation: PointRelation,
    origin: Origin,
}

/// A constraint that contradicted the direct relation already recorded for
/// the same point pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub from: String,
    pub to: String,
    pub existing: PointRelation,
    pub proposed: PointRelation,
    pub origin: Origin,
}

fn point_name(ids: &[String], point: usize) -> String {
    let side = if point.is_multiple_of(2) { "start" } else { "end" };
    format!("{}.{}", ids[point / 2], side)
}

fn point_of(entity: usize, endpoint: Endpoint) -> usize {
    2 * entity + usize::from(endpoint == Endpoint::End)
}

/// Unclosed constraint network: two points per entity, the interval axioms,
/// and the endpoint constraints contributed by links.
#[derive(Debug, Clone)]
pub struct PointGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    direct: Vec<PointRelation>,
    constraints: Vec<BaseConstraint>,
    conflicts: Vec<Conflict>,
}

impl PointGraph {
    /// A graph with only the interval axioms `start < end` for each entity.
    /// Repeated identifiers are collapsed.
    pub fn new<I, S>(entities: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ids = Vec::new();
        let mut index = HashMap::new();
        for id in entities {
            let id = id.into();
            if !index.contains_key(&id) {
                index.insert(id.clone(), ids.len());
                ids.push(id);
            }
        }
        let n = ids.len() * 2;
        let mut graph = PointGraph {
            ids,
            index,
            direct: vec![PointRelation::Unknown; n * n],
            constraints: Vec::new(),
            conflicts: Vec::new(),
        };
        for p in 0..n {
            graph.direct[p * n + p] = PointRelation::Equal;
        }
        for e in 0..graph.ids.len() {
            let origin = Origin::Interval(graph.ids[e].clone());
            graph.add_point_constraint(2 * e, PointRelation::Less, 2 * e + 1, origin);
        }
        graph
    }

    /// Builds the network for a link set over the given entities. NONE links
    /// are skipped; contradictions are recorded and surface in [`close`](Self::close).
    pub fn build<I, S>(links: &[TemporalLink], entities: I) -> Result<Self, ClosureError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut graph = PointGraph::new(entities);
        for link in links {
            graph.add_link(link)?;
        }
        Ok(graph)
    }

    pub fn from_document(doc: &AnnotatedDocument) -> Result<Self, ClosureError> {
        PointGraph::build(&doc.links, doc.instance_ids())
    }

    pub fn entity_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn entity_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn point_count(&self) -> usize {
        self.ids.len() * 2
    }

    pub fn conflicts(&self) -> &[Conflict] {
        &self.conflicts
    }

    /// Direct (not yet closed) relation between two points.
    pub fn direct_relation(&self, a: &str, a_end: Endpoint, b: &str, b_end: Endpoint) -> Option<PointRelation> {
        let p = point_of(self.entity_index(a)?, a_end);
        let q = point_of(self.entity_index(b)?, b_end);
        Some(self.direct[p * self.point_count() + q])
    }

    pub fn add_link(&mut self, link: &TemporalLink) -> Result<(), ClosureError> {
        if link.relation.is_none() {
            return Ok(());
        }
        let resolve = |r: &EntityRef| {
            self.entity_index(r.id())
                .ok_or_else(|| ClosureError::UnknownEntity { id: r.id().to_string(), link: Some(link.lid.clone()) })
        };
        let a = resolve(&link.source)?;
        let b = resolve(&link.target)?;
        let origin = Origin::Link(link.lid.clone());
        for k in interval_to_points(link.relation)? {
            let at = |(o, e): (Operand, Endpoint)| point_of(if o == Operand::A { a } else { b }, e);
            self.add_point_constraint(at(k.left), k.relation, at(k.right), origin.clone());
        }
        Ok(())
    }

    fn add_point_constraint(&mut self, from: usize, relation: PointRelation, to: usize, origin: Origin) {
        let (from, relation, to) = match relation {
            PointRelation::Greater => (to, PointRelation::Less, from),
            PointRelation::Unknown => return,
            r => (from, r, to),
        };
        let n = self.point_count();
        let existing = self.direct[from * n + to];
        if existing == PointRelation::Unknown {
            self.direct[from * n + to] = relation;
            self.direct[to * n + from] = relation.converse();
        } else if existing != relation {
            self.conflicts.push(Conflict {
                from: point_name(&self.ids, from),
                to: point_name(&self.ids, to),
                existing,
                proposed: relation,
                origin: origin.clone(),
            });
        }
        self.constraints.push(BaseConstraint { from, to, relation, origin });
    }

    /// Closes the network under composition (Floyd–Warshall over endpoint
    /// reachability). Fails with a witness cycle if the constraints admit no
    /// model.
    pub fn close(&self) -> Result<ClosedGraph, Inconsistency> {
        let n = self.point_count();
        // reach[i][j]: i <= j derivable; strict[i][j]: i < j derivable.
        let mut reach: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        let mut strict: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        for (i, row) in reach.iter_mut().enumerate() {
            row.insert(i);
        }
        for c in &self.constraints {
            reach[c.from].insert(c.to);
            match c.relation {
                PointRelation::Less => strict[c.from].insert(c.to),
                _ => reach[c.to].insert(c.from),
            }
        }
        for k in 0..n {
            let reach_k = reach[k].clone();
            let strict_k = strict[k].clone();
            for i in 0..n {
                if !reach[i].contains(k) {
                    continue;
                }
                if strict[i].contains(k) {
                    strict[i].union_with(&reach_k);
                } else {
                    strict[i].union_with(&strict_k);
                }
                reach[i].union_with(&reach_k);
            }
        }
        if let Some(p) = (0..n).find(|&p| strict[p].contains(p)) {
            return Err(self.witness(p));
        }
        let mut matrix = vec![PointRelation::Unknown; n * n];
        for i in 0..n {
            for j in 0..n {
                matrix[i * n + j] = if strict[i].contains(j) {
                    PointRelation::Less
                } else if strict[j].contains(i) {
                    PointRelation::Greater
                } else if reach[i].contains(j) {
                    PointRelation::Equal
                } else {
                    PointRelation::Unknown
                };
            }
        }
        Ok(ClosedGraph { ids: self.ids.clone(), index: self.index.clone(), matrix })
    }

    /// Shortest cycle through `point` that contains a strict step.
    fn witness(&self, point: usize) -> Inconsistency {
        let n = self.point_count();
        let mut adjacency: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); n];
        for (ci, c) in self.constraints.iter().enumerate() {
            let is_strict = c.relation == PointRelation::Less;
            adjacency[c.from].push((c.to, ci, is_strict));
            if !is_strict {
                adjacency[c.to].push((c.from, ci, false));
            }
        }
        let state = |p: usize, s: bool| 2 * p + usize::from(s);
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; 2 * n];
        let mut visited = vec![false; 2 * n];
        let start = state(point, false);
        let goal = state(point, true);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(cur) = queue.pop_front() {
            if cur == goal {
                break;
            }
            let (p, s) = (cur / 2, cur % 2 == 1);
            for &(q, ci, edge_strict) in &adjacency[p] {
                let next = state(q, s || edge_strict);
                if !visited[next] {
                    visited[next] = true;
                    prev[next] = Some((cur, ci));
                    queue.push_back(next);
                }
            }
        }
        let mut steps = Vec::new();
        let mut cur = goal;
        while let Some((before, ci)) = prev[cur] {
            let c = &self.constraints[ci];
            let (from, to) = (before / 2, cur / 2);
            let relation = if c.relation == PointRelation::Less { PointRelation::Less } else { PointRelation::Equal };
            steps.push(WitnessStep {
                from: point_name(&self.ids, from),
                relation,
                to: point_name(&self.ids, to),
                origin: c.origin.clone(),
            });
            cur = before;
            if cur == start {
                break;
            }
        }
        steps.reverse();
        Inconsistency { witness: steps }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub from: String,
    pub relation: PointRelation,
    pub to: String,
    pub origin: Origin,
}

/// The constraints admit no model. The witness is a cycle of base
/// constraints that forces some point strictly before itself.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct Inconsistency {
    pub witness: Vec<WitnessStep>,
}

impl Inconsistency {
    /// Link identifiers taking part in the witness cycle, in cycle order.
    pub fn links(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for step in &self.witness {
            if let Origin::Link(lid) = &step.origin {
                if !out.contains(&lid.as_str()) {
                    out.push(lid);
                }
            }
        }
        out
    }
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("inconsistent temporal constraints: ")?;
        for (i, s) in self.witness.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} {} {} ({})", s.from, s.relation.symbol(), s.to, s.origin)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entailment {
    Yes,
    NoInfo,
}

/// A path-consistent point network. Every derivable endpoint relation is
/// explicit in the matrix.
#[derive(Debug, Clone)]
pub struct ClosedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    matrix: Vec<PointRelation>,
}

impl PartialEq for ClosedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.matrix == other.matrix
    }
}

impl ClosedGraph {
    pub fn entity_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn point_count(&self) -> usize {
        self.ids.len() * 2
    }

    fn index_of(&self, id: &str) -> Result<usize, ClosureError> {
        self.index.get(id).copied().ok_or_else(|| ClosureError::UnknownEntity { id: id.to_string(), link: None })
    }

    pub fn relation(&self, a: &str, a_end: Endpoint, b: &str, b_end: Endpoint) -> Result<PointRelation, ClosureError> {
        let p = point_of(self.index_of(a)?, a_end);
        let q = point_of(self.index_of(b)?, b_end);
        Ok(self.matrix[p * self.point_count() + q])
    }

    /// Full closed matrix in point order (entity `i` owns points `2i`, `2i+1`).
    pub fn matrix(&self) -> &[PointRelation] {
        &self.matrix
    }

    fn holds(&self, a: usize, relation: RelationType, b: usize) -> Result<bool, ClosureError> {
        let n = self.point_count();
        Ok(interval_to_points(relation)?.iter().all(|k| {
            let at = |(o, e): (Operand, Endpoint)| point_of(if o == Operand::A { a } else { b }, e);
            self.matrix[at(k.left) * n + at(k.right)] == k.relation
        }))
    }

    /// Whether `a relation b` follows from the closed constraints.
    pub fn entails_relation(&self, a: &str, relation: RelationType, b: &str) -> Result<Entailment, ClosureError> {
        let (a, b) = (self.index_of(a)?, self.index_of(b)?);
        Ok(if self.holds(a, relation, b)? { Entailment::Yes } else { Entailment::NoInfo })
    }

    pub fn entails(&self, link: &TemporalLink) -> Result<Entailment, ClosureError> {
        let with_link = |e: ClosureError| match e {
            ClosureError::UnknownEntity { id, .. } => ClosureError::UnknownEntity { id, link: Some(link.lid.clone()) },
            other => other,
        };
        self.entails_relation(link.source.id(), link.relation, link.target.id()).map_err(with_link)
    }

    /// The single interval label fixed by the closure for `a`, `b`, if any.
    /// Equal intervals are reported as SIMULTANEOUS.
    pub fn determined_relation(&self, a: &str, b: &str) -> Result<Option<RelationType>, ClosureError> {
        use RelationType as R;
        const CANDIDATES: [RelationType; 11] = [
            R::Before,
            R::After,
            R::IBefore,
            R::IAfter,
            R::Includes,
            R::IsIncluded,
            R::Begins,
            R::BegunBy,
            R::Ends,
            R::EndedBy,
            R::Simultaneous,
        ];
        let (ai, bi) = (self.index_of(a)?, self.index_of(b)?);
        for r in CANDIDATES {
            if self.holds(ai, r, bi)? {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }

    /// Every entity pair whose interval relation the closure fixes, oriented
    /// from the lexicographically smaller identifier.
    pub fn determined_pairs(&self) -> Vec<(&str, RelationType, &str)> {
        let mut ids: Vec<&str> = self.ids.iter().map(String::as_str).collect();
        ids.sort_unstable();
        let mut out = Vec::new();
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                if let Ok(Some(r)) = self.determined_relation(a, b) {
                    out.push((*a, r, *b));
                }
            }
        }
        out
    }

    /// A minimal link set with this closure that depends on nothing but the
    /// closure: [`reduce`] applied to [`ClosedGraph::determined_pairs`].
    /// `entity_ref` supplies the reference kind for each identifier.
    pub fn canonical_reduction(&self, entity_ref: impl Fn(&str) -> EntityRef) -> Vec<TemporalLink> {
        let links: Vec<TemporalLink> = self
            .determined_pairs()
            .into_iter()
            .enumerate()
            .map(|(i, (a, r, b))| TemporalLink::new(format!("c{}", i + 1), entity_ref(a), entity_ref(b), r))
            .collect();
        reduce(&links, self.ids.iter().cloned()).expect("links read off a closed graph are consistent")
    }

    /// Re-expresses the closed matrix as an unclosed network carrying every
    /// derived constraint. Closing it again yields an equal graph.
    pub fn to_point_graph(&self) -> PointGraph {
        let mut graph = PointGraph::new(self.ids.iter().cloned());
        let n = self.point_count();
        for p in 0..n {
            for q in (p + 1)..n {
                let r = self.matrix[p * n + q];
                if r != PointRelation::Unknown {
                    graph.add_point_constraint(p, r, q, Origin::Derived);
                }
            }
        }
        graph
    }
}

/// Closes the links of a document over all of its entities.
pub fn close_document(doc: &AnnotatedDocument) -> Result<ClosedGraph, ClosureError> {
    Ok(PointGraph::from_document(doc)?.close()?)
}

/// Removes links implied by the others.
///
/// Links are visited sorted by (source id, target id, relation); a link is
/// dropped when the links still kept entail it. The result entails every
/// input link and is minimal with respect to that visit order. NONE links
/// are discarded.
pub fn reduce<I, S>(links: &[TemporalLink], entities: I) -> Result<Vec<TemporalLink>, ClosureError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let graph = PointGraph::build(links, entities)?;
    graph.close()?;

    let mut ordered: Vec<&TemporalLink> = links.iter().filter(|l| !l.relation.is_none()).collect();
    ordered.sort_by(|x, y| {
        (x.source.id(), x.target.id(), x.relation).cmp(&(y.source.id(), y.target.id(), y.relation))
    });

    let n = graph.point_count();
    // Edge owner: None for interval axioms, Some(i) for ordered[i].
    let mut adjacency: Vec<Vec<(usize, bool, Option<usize>)>> = vec![Vec::new(); n];
    for e in 0..graph.ids.len() {
        adjacency[2 * e].push((2 * e + 1, true, None));
    }
    let mut link_constraints = Vec::with_capacity(ordered.len());
    for (li, link) in ordered.iter().enumerate() {
        let a = graph.index[link.source.id()];
        let b = graph.index[link.target.id()];
        let mut cs = Vec::new();
        for k in interval_to_points(link.relation)? {
            let at = |(o, e): (Operand, Endpoint)| point_of(if o == Operand::A { a } else { b }, e);
            let (p, q) = (at(k.left), at(k.right));
            match k.relation {
                PointRelation::Less => adjacency[p].push((q, true, Some(li))),
                _ => {
                    adjacency[p].push((q, false, Some(li)));
                    adjacency[q].push((p, false, Some(li)));
                }
            }
            cs.push((p, k.relation, q));
        }
        link_constraints.push(cs);
    }

    let mut kept = vec![true; ordered.len()];
    for li in 0..ordered.len() {
        kept[li] = false;
        let implied = link_constraints[li]
            .iter()
            .all(|&(p, rel, q)| derivable(&adjacency, &kept, p, rel, q));
        if !implied {
            kept[li] = true;
        }
    }
    Ok(ordered.into_iter().zip(kept).filter(|(_, k)| *k).map(|(l, _)| l.clone()).collect())
}

/// Searches the active edges for a path proving `p rel q`.
fn derivable(
    adjacency: &[Vec<(usize, bool, Option<usize>)>],
    active: &[bool],
    p: usize,
    rel: PointRelation,
    q: usize,
) -> bool {
    let want_strict = rel == PointRelation::Less;
    let n = adjacency.len();
    let mut visited = vec![false; 2 * n];
    let mut queue = VecDeque::from([(p, false)]);
    visited[2 * p] = true;
    while let Some((cur, s)) = queue.pop_front() {
        if cur == q && s == want_strict {
            return true;
        }
        for &(next, edge_strict, owner) in &adjacency[cur] {
            if owner.is_some_and(|i| !active[i]) {
                continue;
            }
            if !want_strict && edge_strict {
                continue;
            }
            let ns = s || edge_strict;
            let slot = 2 * next + usize::from(ns);
            if !visited[slot] {
                visited[slot] = true;
                queue.push_back((next, ns));
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RelationType as R;

    fn link(lid: &str, a: &str, r: RelationType, b: &str) -> TemporalLink {
        TemporalLink::new(lid, EntityRef::Event(a.into()), EntityRef::Event(b.into()), r)
    }

    const ABC: [&str; 3] = ["A", "B", "C"];

    #[test]
    fn point_semantics() {
        use Endpoint::*;
        use Operand::*;
        assert_eq!(
            interval_to_points(R::Before).unwrap(),
            vec![EndpointConstraint { left: (A, End), relation: PointRelation::Less, right: (B, Start) }]
        );
        assert_eq!(
            interval_to_points(R::Begins).unwrap(),
            vec![
                EndpointConstraint { left: (A, Start), relation: PointRelation::Equal, right: (B, Start) },
                EndpointConstraint { left: (A, End), relation: PointRelation::Less, right: (B, End) },
            ]
        );
        assert_eq!(
            interval_to_points(R::IsIncluded).unwrap(),
            vec![
                EndpointConstraint { left: (B, Start), relation: PointRelation::Less, right: (A, Start) },
                EndpointConstraint { left: (A, End), relation: PointRelation::Less, right: (B, End) },
            ]
        );
        assert_eq!(interval_to_points(R::None), Err(ClosureError::NoneRelation));
    }

    #[test]
    fn composition_table() {
        use PointRelation::*;
        assert_eq!(Equal.compose(Less), Less);
        assert_eq!(Less.compose(Less), Less);
        assert_eq!(Less.compose(Equal), Less);
        assert_eq!(Greater.compose(Greater), Greater);
        assert_eq!(Greater.compose(Equal), Greater);
        assert_eq!(Less.compose(Greater), Unknown);
        assert_eq!(Greater.compose(Less), Unknown);
        assert_eq!(Unknown.compose(Less), Unknown);
    }

    #[test]
    fn build_records_direct_constraints() {
        let g = PointGraph::build(&[link("l1", "A", R::Before, "B")], ["A", "B"]).unwrap();
        assert_eq!(g.point_count(), 4);
        assert_eq!(g.direct_relation("A", Endpoint::End, "B", Endpoint::Start), Some(PointRelation::Less));
        assert_eq!(g.direct_relation("A", Endpoint::Start, "A", Endpoint::End), Some(PointRelation::Less));
        assert!(g.conflicts().is_empty());

        let empty = PointGraph::build(&[], ["A", "B"]).unwrap();
        let closed = empty.close().unwrap();
        for (ea, eb) in [(Endpoint::Start, Endpoint::Start), (Endpoint::End, Endpoint::Start), (Endpoint::End, Endpoint::End)] {
            assert_eq!(closed.relation("A", ea, "B", eb).unwrap(), PointRelation::Unknown);
        }
    }

    #[test]
    fn conflicts_flagged_and_inconsistent() {
        let links = [link("l1", "A", R::Before, "B"), link("l2", "A", R::After, "B")];
        let g = PointGraph::build(&links, ["A", "B"]).unwrap();
        let err = g.close().unwrap_err();
        assert!(err.links().contains(&"l1") && err.links().contains(&"l2"));

        let links = [link("l1", "A", R::Simultaneous, "B"), link("l2", "A", R::Begins, "B")];
        let g = PointGraph::build(&links, ["A", "B"]).unwrap();
        assert_eq!(g.conflicts().len(), 1);
        assert!(g.close().is_err());
    }

    #[test]
    fn unknown_endpoint_rejected() {
        let err = PointGraph::build(&[link("l1", "A", R::Before, "Z")], ["A"]).unwrap_err();
        assert_eq!(err, ClosureError::UnknownEntity { id: "Z".into(), link: Some("l1".into()) });
    }

    #[test]
    fn transitivity_of_before() {
        let links = [link("l1", "A", R::Before, "B"), link("l2", "B", R::Before, "C")];
        let closed = PointGraph::build(&links, ABC).unwrap().close().unwrap();
        assert_eq!(closed.relation("A", Endpoint::End, "C", Endpoint::Start).unwrap(), PointRelation::Less);
        assert_eq!(closed.entails(&link("q", "A", R::Before, "C")).unwrap(), Entailment::Yes);
        assert_eq!(closed.entails(&link("q", "C", R::After, "A")).unwrap(), Entailment::Yes);
    }

    #[test]
    fn cycle_is_inconsistent_with_witness() {
        let links = [link("l1", "A", R::Before, "B"), link("l2", "B", R::Before, "A")];
        let err = PointGraph::build(&links, ["A", "B"]).unwrap().close().unwrap_err();
        let first = &err.witness[0].from;
        assert_eq!(&err.witness.last().unwrap().to, first);
        assert!(err.witness.iter().any(|s| s.relation == PointRelation::Less));
        assert_eq!(err.links().len(), 2);
    }

    #[test]
    fn begins_then_before() {
        let links = [link("l1", "A", R::Begins, "B"), link("l2", "B", R::Before, "C")];
        let closed = PointGraph::build(&links, ABC).unwrap().close().unwrap();
        assert_eq!(closed.entails_relation("A", R::Before, "C").unwrap(), Entailment::Yes);
    }

    #[test]
    fn entailment_examples() {
        let closed = PointGraph::build(&[link("l1", "A", R::Before, "B")], ["A", "B"]).unwrap().close().unwrap();
        assert_eq!(closed.entails_relation("A", R::Includes, "B").unwrap(), Entailment::NoInfo);
        let closed = PointGraph::build(&[link("l1", "A", R::Identity, "B")], ["A", "B"]).unwrap().close().unwrap();
        assert_eq!(closed.entails_relation("B", R::Simultaneous, "A").unwrap(), Entailment::Yes);
        assert!(closed.entails_relation("A", R::None, "B").is_err());
        assert!(closed.entails_relation("A", R::Before, "Q").is_err());
    }

    #[test]
    fn determined_relation_reads_back_labels() {
        for r in RelationType::LABELS {
            let closed = PointGraph::build(&[link("l1", "A", r, "B")], ["A", "B"]).unwrap().close().unwrap();
            let got = closed.determined_relation("A", "B").unwrap().unwrap();
            let expected = match r {
                R::Identity | R::During => R::Simultaneous,
                other => other,
            };
            assert_eq!(got, expected);
        }
        let closed = PointGraph::new(["A", "B"]).close().unwrap();
        assert_eq!(closed.determined_relation("A", "B").unwrap(), None);
    }

    #[test]
    fn reduce_examples() {
        let links = [
            link("l1", "A", R::Before, "B"),
            link("l2", "B", R::Before, "C"),
            link("l3", "A", R::Before, "C"),
        ];
        let reduced = reduce(&links, ABC).unwrap();
        let lids: Vec<_> = reduced.iter().map(|l| l.lid.as_str()).collect();
        assert_eq!(lids, ["l1", "l2"]);

        let single = [link("l1", "A", R::Before, "B")];
        assert_eq!(reduce(&single, ["A", "B"]).unwrap(), single.to_vec());

        let same = [link("l1", "A", R::Identity, "B"), link("l2", "A", R::Simultaneous, "B")];
        assert_eq!(reduce(&same, ["A", "B"]).unwrap().len(), 1);

        let bad = [link("l1", "A", R::Before, "B"), link("l2", "B", R::Before, "A")];
        assert!(matches!(reduce(&bad, ["A", "B"]), Err(ClosureError::Inconsistent(_))));
    }

    #[test]
    fn reclosing_is_idempotent() {
        let links = [link("l1", "A", R::Includes, "B"), link("l2", "B", R::IBefore, "C")];
        let closed = PointGraph::build(&links, ABC).unwrap().close().unwrap();
        let again = closed.to_point_graph().close().unwrap();
        assert_eq!(closed, again);
    }
}
