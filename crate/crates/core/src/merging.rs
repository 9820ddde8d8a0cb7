//! Ensemble merging of several systems' annotations of the same text into
//! one silver-standard annotation.
//!
//! Everything the designated best system proposes is kept; proposals from
//! other systems are kept when at least `support_threshold` systems agree
//! on them. Weights only break ties between competing extents, attribute
//! values and relation labels.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::closure::PointGraph;
use crate::model::{
    char_slice, AnnotatedDocument, EntityRef, EventAnnotation, RelationType, Span, TemporalLink, TimexAnnotation,
};
use crate::scalar::Scalar;
use crate::timeml::{self, SerializeError, TimemlError};

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec<W> {
    pub name: String,
    pub weight: W,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeConfig<W> {
    pub systems: Vec<SystemSpec<W>>,
    pub best_system: String,
    /// Minimum number of systems (best system included) that must propose
    /// an entity or relation for a non-best proposal to be kept.
    pub support_threshold: usize,
}

#[derive(Debug, Error)]
pub enum MergeError {
    #[error("invalid merge configuration: {0}")]
    Config(String),
    #[error("document {doc_id}: TEXT of {system} differs from {reference_system}")]
    TextMismatch { doc_id: String, system: String, reference_system: String },
    #[error("system corpora do not cover the same documents: {}", .0.join("; "))]
    DocIdMismatch(Vec<String>),
    #[error("{} failed to load: {error}", .path.display())]
    Load { path: PathBuf, error: TimemlError },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("document {doc_id}: {source}")]
    Serialize {
        doc_id: String,
        #[source]
        source: SerializeError,
    },
}

impl<W: Scalar> MergeConfig<W> {
    /// Three systems weighted 0.36 (best), 0.32 and 0.32, support threshold 2.
    pub fn standard_three(tipsem: PathBuf, tipsem_b: PathBuf, trios: PathBuf) -> Self {
        let w = |s: &str| W::parse_decimal(s).expect("decimal literal");
        MergeConfig {
            systems: vec![
                SystemSpec { name: "TIPSem".into(), weight: w("0.36"), path: tipsem },
                SystemSpec { name: "TIPSemB".into(), weight: w("0.32"), path: tipsem_b },
                SystemSpec { name: "TRIOS".into(), weight: w("0.32"), path: trios },
            ],
            best_system: "TIPSem".into(),
            support_threshold: 2,
        }
    }

    pub fn validate(&self) -> Result<(), MergeError> {
        if self.systems.is_empty() {
            return Err(MergeError::Config("no systems listed".into()));
        }
        let mut names = BTreeSet::new();
        for s in &self.systems {
            if !names.insert(s.name.as_str()) {
                return Err(MergeError::Config(format!("system {:?} listed twice", s.name)));
            }
            if s.weight <= W::zero() {
                return Err(MergeError::Config(format!("system {:?} has a non-positive weight", s.name)));
            }
        }
        if !names.contains(self.best_system.as_str()) {
            return Err(MergeError::Config(format!("best_system {:?} is not among the systems", self.best_system)));
        }
        if self.support_threshold == 0 {
            return Err(MergeError::Config("support_threshold must be at least 1".into()));
        }
        Ok(())
    }

    pub fn best_index(&self) -> usize {
        self.systems.iter().position(|s| s.name == self.best_system).unwrap_or(0)
    }

    /// Parses `{"systems":[{"name","weight","path"}], "best_system", "support_threshold"}`.
    /// Relative paths are resolved against `base_dir`. Weights are read from
    /// their decimal text, so `0.36` is exact for rational weights.
    pub fn from_json(json: &str, base_dir: &Path) -> Result<Self, MergeError> {
        let bad = |m: String| MergeError::Config(m);
        let value: serde_json::Value = serde_json::from_str(json).map_err(|e| bad(e.to_string()))?;
        let systems = value
            .get("systems")
            .and_then(|v| v.as_array())
            .ok_or_else(|| bad("\"systems\" must be an array".into()))?;
        let mut parsed = Vec::with_capacity(systems.len());
        for (i, s) in systems.iter().enumerate() {
            let name = s
                .get("name")
                .and_then(|v| v.as_str())
                .ok_or_else(|| bad(format!("systems[{i}].name must be a string")))?;
            let weight_text = match s.get("weight") {
                Some(serde_json::Value::Number(n)) => n.to_string(),
                Some(serde_json::Value::String(t)) => t.clone(),
                _ => return Err(bad(format!("systems[{i}].weight must be a number"))),
            };
            let weight = W::parse_decimal(&weight_text)
                .ok_or_else(|| bad(format!("systems[{i}].weight {weight_text:?} is not a plain decimal")))?;
            let path = s
                .get("path")
                .and_then(|v| v.as_str())
                .ok_or_else(|| bad(format!("systems[{i}].path must be a string")))?;
            parsed.push(SystemSpec { name: name.to_string(), weight, path: base_dir.join(path) });
        }
        let best_system = value
            .get("best_system")
            .and_then(|v| v.as_str())
            .ok_or_else(|| bad("\"best_system\" must be a string".into()))?
            .to_string();
        let support_threshold = match value.get("support_threshold") {
            None => 2,
            Some(v) => v
                .as_u64()
                .and_then(|n| usize::try_from(n).ok())
                .ok_or_else(|| bad("\"support_threshold\" must be a non-negative integer".into()))?,
        };
        let config = MergeConfig { systems: parsed, best_system, support_threshold };
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, MergeError> {
        let json = fs::read_to_string(path).map_err(|source| MergeError::Io { path: path.to_path_buf(), source })?;
        MergeConfig::from_json(&json, path.parent().unwrap_or(Path::new(".")))
    }

    /// Order in which systems win ties: best system first, then by weight
    /// (highest first), then by configuration order.
    fn priority(&self) -> Vec<usize> {
        let best = self.best_index();
        let mut order: Vec<usize> = (0..self.systems.len()).collect();
        order.sort_by(|&a, &b| {
            (b == best)
                .cmp(&(a == best))
                .then_with(|| self.systems[b].weight.partial_cmp(&self.systems[a].weight).unwrap_or(std::cmp::Ordering::Equal))
                .then(a.cmp(&b))
        });
        let mut rank = vec![0; order.len()];
        for (r, s) in order.into_iter().enumerate() {
            rank[s] = r;
        }
        rank
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Timex,
    Event,
}

/// One system's entity inside a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member {
    pub system: usize,
    /// Index into that system's `timexes` or `events`.
    pub index: usize,
    pub span: Span,
}

/// Entities of one kind from different systems whose spans overlap,
/// directly or through a chain of overlaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityCluster {
    pub kind: EntityKind,
    /// At most one member per system, ordered by system.
    pub members: Vec<Member>,
    /// Shorter candidates a system also placed in this cluster.
    pub discarded: Vec<Member>,
}

impl EntityCluster {
    pub fn support(&self) -> usize {
        self.members.len()
    }

    pub fn has_system(&self, system: usize) -> bool {
        self.members.iter().any(|m| m.system == system)
    }

    fn start(&self) -> usize {
        self.members.iter().map(|m| m.span.start).min().unwrap_or(0)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn cluster_kind(kind: EntityKind, items: Vec<Member>) -> Vec<EntityCluster> {
    let mut parent: Vec<usize> = (0..items.len()).collect();
    let mut by_start: Vec<usize> = (0..items.len()).collect();
    by_start.sort_by_key(|&i| (items[i].span.start, items[i].span.end));
    // Sweep: an item overlaps the running group while it starts before the
    // group's furthest end.
    let mut group_end = 0;
    let mut group_head: Option<usize> = None;
    for &i in &by_start {
        let span = items[i].span;
        match group_head {
            Some(h) if span.start < group_end => {
                let (a, b) = (find(&mut parent, h), find(&mut parent, i));
                parent[b] = a;
                group_end = group_end.max(span.end);
            }
            _ => {
                group_head = Some(i);
                group_end = span.end;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Member>> = BTreeMap::new();
    for (i, item) in items.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(*item);
    }
    groups
        .into_values()
        .map(|mut group| {
            group.sort_by_key(|m| (m.system, std::cmp::Reverse(m.span.len()), m.span.start, m.index));
            let mut members: Vec<Member> = Vec::new();
            let mut discarded = Vec::new();
            for m in group {
                if members.last().is_some_and(|last| last.system == m.system) {
                    discarded.push(m);
                } else {
                    members.push(m);
                }
            }
            EntityCluster { kind, members, discarded }
        })
        .collect()
}

/// Clusters the body entities of all systems' versions of one document.
/// Clusters come back in text order.
pub fn cluster_entities(docs: &[&AnnotatedDocument]) -> Result<Vec<EntityCluster>, MergeError> {
    if let Some(first) = docs.first() {
        for (s, d) in docs.iter().enumerate().skip(1) {
            if d.text != first.text {
                return Err(MergeError::TextMismatch {
                    doc_id: first.doc_id.clone(),
                    system: format!("system {s}"),
                    reference_system: "system 0".into(),
                });
            }
        }
    }
    let mut timexes = Vec::new();
    let mut events = Vec::new();
    for (system, d) in docs.iter().enumerate() {
        for (index, t) in d.timexes.iter().enumerate() {
            if let Some(span) = t.span {
                timexes.push(Member { system, index, span });
            }
        }
        for (index, e) in d.events.iter().enumerate() {
            events.push(Member { system, index, span: e.span });
        }
    }
    let mut clusters = cluster_kind(EntityKind::Timex, timexes);
    clusters.extend(cluster_kind(EntityKind::Event, events));
    clusters.sort_by_key(|c| (c.start(), c.kind));
    Ok(clusters)
}

/// Weighted vote over candidate values. Ties go to the value proposed by
/// the higher-priority system (best system first).
fn vote<W: Scalar, V: Ord + Clone>(config: &MergeConfig<W>, rank: &[usize], proposals: &[(usize, V)]) -> V {
    let mut tally: BTreeMap<V, (W, usize)> = BTreeMap::new();
    for (system, value) in proposals {
        let entry = tally.entry(value.clone()).or_insert((W::zero(), usize::MAX));
        entry.0 = entry.0 + config.systems[*system].weight;
        entry.1 = entry.1.min(rank[*system]);
    }
    tally
        .into_iter()
        .max_by(|(_, (wa, ra)), (_, (wb, rb))| {
            wa.partial_cmp(wb).unwrap_or(std::cmp::Ordering::Equal).then(rb.cmp(ra))
        })
        .map(|(v, _)| v)
        .expect("at least one proposal")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DocumentSummary {
    pub doc_id: String,
    pub entities_kept: usize,
    pub entities_dropped: usize,
    pub entities_conflicted: usize,
    pub links_kept: usize,
    pub links_dropped: usize,
    pub links_conflicted: usize,
    pub links_repaired: usize,
    pub consistent: bool,
}

/// Result of entity merging: merged entities plus, per system, the mapping
/// from that system's instance identifiers to merged ones.
#[derive(Debug, Clone)]
pub struct MergedEntities {
    pub dct: TimexAnnotation,
    pub timexes: Vec<TimexAnnotation>,
    pub events: Vec<EventAnnotation>,
    pub mapping: Vec<HashMap<String, EntityRef>>,
    pub kept: usize,
    pub dropped: usize,
    pub conflicted: usize,
}

/// Emits a cluster iff it contains the best system's entity or has at least
/// `support_threshold` members. Extent comes from the highest-priority
/// contributor; each attribute is a weighted vote.
pub fn merge_entities<W: Scalar>(
    docs: &[&AnnotatedDocument],
    clusters: &[EntityCluster],
    config: &MergeConfig<W>,
) -> MergedEntities {
    let best = config.best_index();
    let rank = config.priority();
    let text = &docs[best].text;
    let mut mapping: Vec<HashMap<String, EntityRef>> = vec![HashMap::new(); docs.len()];

    let mut dct = docs[best].dct.clone();
    dct.tid = "t0".to_string();
    for (s, d) in docs.iter().enumerate() {
        mapping[s].insert(d.dct.tid.clone(), EntityRef::Timex(dct.tid.clone()));
    }

    let mut timexes = Vec::new();
    let mut events = Vec::new();
    let (mut kept, mut dropped, mut conflicted) = (0, 0, 0);
    for cluster in clusters {
        if !(cluster.has_system(best) || cluster.support() >= config.support_threshold) {
            dropped += 1;
            continue;
        }
        kept += 1;
        let lead = *cluster.members.iter().min_by_key(|m| rank[m.system]).expect("non-empty cluster");
        let span = lead.span;
        let surface = char_slice(text, span).unwrap_or_default().to_string();
        let spans_differ = cluster.members.iter().any(|m| m.span != span);
        match cluster.kind {
            EntityKind::Timex => {
                let of = |m: &Member| &docs[m.system].timexes[m.index];
                let ttype = vote(config, &rank, &cluster.members.iter().map(|m| (m.system, of(m).ttype)).collect::<Vec<_>>());
                let value = vote(config, &rank, &cluster.members.iter().map(|m| (m.system, of(m).value.clone())).collect::<Vec<_>>());
                let function_in_document = vote(
                    config,
                    &rank,
                    &cluster.members.iter().map(|m| (m.system, of(m).function_in_document.clone())).collect::<Vec<_>>(),
                );
                let temporal_function = vote(
                    config,
                    &rank,
                    &cluster.members.iter().map(|m| (m.system, of(m).temporal_function)).collect::<Vec<_>>(),
                );
                if spans_differ || cluster.members.iter().any(|m| of(m).ttype != ttype || of(m).value != value) {
                    conflicted += 1;
                }
                let tid = format!("t{}", timexes.len() + 1);
                for m in &cluster.members {
                    mapping[m.system].insert(of(m).tid.clone(), EntityRef::Timex(tid.clone()));
                }
                timexes.push(TimexAnnotation {
                    tid,
                    span: Some(span),
                    ttype,
                    value,
                    function_in_document,
                    temporal_function,
                    surface,
                    extras: of(&lead).extras.clone(),
                });
            }
            EntityKind::Event => {
                let of = |m: &Member| &docs[m.system].events[m.index];
                let pick = |get: &dyn Fn(&EventAnnotation) -> Option<String>| {
                    vote(config, &rank, &cluster.members.iter().map(|m| (m.system, get(of(m)))).collect::<Vec<_>>())
                };
                let eclass = pick(&|e| Some(e.eclass.clone())).unwrap_or_default();
                if spans_differ || cluster.members.iter().any(|m| of(m).eclass != eclass) {
                    conflicted += 1;
                }
                let n = events.len() + 1;
                let eiid = format!("ei{n}");
                for m in &cluster.members {
                    mapping[m.system].insert(of(m).eiid.clone(), EntityRef::Event(eiid.clone()));
                }
                events.push(EventAnnotation {
                    eid: format!("e{n}"),
                    eiid,
                    span,
                    eclass,
                    tense: pick(&|e| e.tense.clone()),
                    aspect: pick(&|e| e.aspect.clone()),
                    polarity: pick(&|e| e.polarity.clone()),
                    modality: pick(&|e| e.modality.clone()),
                    pos: pick(&|e| e.pos.clone()),
                    surface,
                    extras: of(&lead).extras.clone(),
                });
            }
        }
        conflicted += cluster.discarded.len();
    }
    MergedEntities { dct, timexes, events, mapping, kept, dropped, conflicted }
}

#[derive(Debug, Clone)]
pub struct MergedLinks {
    pub links: Vec<TemporalLink>,
    pub dropped: usize,
    pub conflicted: usize,
    pub repaired: usize,
    pub consistent: bool,
}

struct Candidate<W> {
    systems: BTreeSet<usize>,
    weight: W,
    /// Orientation as written by the highest-priority proposer.
    oriented: (EntityRef, RelationType, EntityRef),
    oriented_rank: usize,
}

/// Merges links onto the merged entities.
///
/// Links are normalized so that `a R b` and `b inverse(R) a` count as the
/// same proposal. For each entity pair a relation survives if the best
/// system proposes it or enough systems agree; competing survivors are
/// resolved by total weight. With `repair`, the lowest-weight links are
/// dropped until the result is consistent.
pub fn merge_links<W: Scalar>(
    docs: &[&AnnotatedDocument],
    merged: &MergedEntities,
    config: &MergeConfig<W>,
    repair: bool,
) -> MergedLinks {
    let best = config.best_index();
    let rank = config.priority();
    let mut dropped = 0;
    let mut pairs: BTreeMap<(String, String), BTreeMap<RelationType, Candidate<W>>> = BTreeMap::new();
    for (s, d) in docs.iter().enumerate() {
        for link in d.relation_links() {
            let (Some(a), Some(b)) = (merged.mapping[s].get(link.source.id()), merged.mapping[s].get(link.target.id()))
            else {
                dropped += 1;
                continue;
            };
            if a.id() == b.id() {
                dropped += 1;
                continue;
            }
            let (key, relation) = if a.id() < b.id() {
                ((a.id().to_string(), b.id().to_string()), link.relation)
            } else {
                ((b.id().to_string(), a.id().to_string()), link.relation.inverse().expect("relation link"))
            };
            let slot = pairs.entry(key).or_default();
            let candidate = slot.entry(relation).or_insert_with(|| Candidate {
                systems: BTreeSet::new(),
                weight: W::zero(),
                oriented: (a.clone(), link.relation, b.clone()),
                oriented_rank: rank[s],
            });
            if candidate.systems.insert(s) {
                candidate.weight = candidate.weight + config.systems[s].weight;
            }
            if rank[s] < candidate.oriented_rank {
                candidate.oriented = (a.clone(), link.relation, b.clone());
                candidate.oriented_rank = rank[s];
            }
        }
    }

    let mut chosen: Vec<(W, bool, (EntityRef, RelationType, EntityRef))> = Vec::new();
    let mut conflicted = 0;
    for candidates in pairs.into_values() {
        let total = candidates.len();
        let survivors: Vec<(RelationType, Candidate<W>)> = candidates
            .into_iter()
            .filter(|(_, c)| c.systems.contains(&best) || c.systems.len() >= config.support_threshold)
            .collect();
        // Everything but the eventual winner is dropped.
        dropped += total - survivors.len().min(1);
        if survivors.len() > 1 {
            conflicted += 1;
        }
        let Some((_, winner)) = survivors.into_iter().max_by(|(ra, a), (rb, b)| {
            a.weight
                .partial_cmp(&b.weight)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.systems.contains(&best).cmp(&b.systems.contains(&best)))
                .then(rb.cmp(ra))
        }) else {
            continue;
        };
        chosen.push((winner.weight, winner.systems.contains(&best), winner.oriented));
    }

    let entity_ids: Vec<String> = std::iter::once(merged.dct.tid.clone())
        .chain(merged.timexes.iter().map(|t| t.tid.clone()))
        .chain(merged.events.iter().map(|e| e.eiid.clone()))
        .collect();
    let order: HashMap<&str, usize> = entity_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    chosen.sort_by_key(|(_, _, (a, _, b))| (order[a.id()], order[b.id()]));
    let to_links = |chosen: &[(W, bool, (EntityRef, RelationType, EntityRef))]| -> Vec<TemporalLink> {
        chosen
            .iter()
            .enumerate()
            .map(|(i, (_, _, (a, r, b)))| TemporalLink::new(format!("l{}", i + 1), a.clone(), b.clone(), *r))
            .collect()
    };
    let consistent_with = |chosen: &[(W, bool, (EntityRef, RelationType, EntityRef))]| {
        PointGraph::build(&to_links(chosen), entity_ids.iter().cloned()).is_ok_and(|g| g.close().is_ok())
    };

    let mut repaired = 0;
    let mut consistent = consistent_with(&chosen);
    if !consistent && repair {
        // Drop order: lowest weight first, best-system links last, later links first.
        let mut drop_order: Vec<usize> = (0..chosen.len()).collect();
        drop_order.sort_by(|&x, &y| {
            chosen[x]
                .0
                .partial_cmp(&chosen[y].0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(chosen[x].1.cmp(&chosen[y].1))
                .then(y.cmp(&x))
        });
        let mut alive = vec![true; chosen.len()];
        for victim in drop_order {
            alive[victim] = false;
            repaired += 1;
            let remaining: Vec<_> = chosen.iter().zip(&alive).filter(|(_, a)| **a).map(|(c, _)| c.clone()).collect();
            if consistent_with(&remaining) {
                break;
            }
        }
        chosen = chosen.into_iter().zip(alive).filter(|(_, a)| *a).map(|(c, _)| c).collect();
        consistent = true;
    }

    MergedLinks { links: to_links(&chosen), dropped, conflicted, repaired, consistent }
}

/// Merges one document given every system's version of it, in the order
/// of `config.systems`.
pub fn merge_document<W: Scalar>(
    docs: &[&AnnotatedDocument],
    config: &MergeConfig<W>,
    repair: bool,
) -> Result<(AnnotatedDocument, DocumentSummary), MergeError> {
    config.validate()?;
    if docs.len() != config.systems.len() {
        return Err(MergeError::Config(format!(
            "{} documents given for {} systems",
            docs.len(),
            config.systems.len()
        )));
    }
    let best = config.best_index();
    for (s, d) in docs.iter().enumerate() {
        if d.text != docs[best].text {
            return Err(MergeError::TextMismatch {
                doc_id: docs[best].doc_id.clone(),
                system: config.systems[s].name.clone(),
                reference_system: config.best_system.clone(),
            });
        }
    }
    let clusters = cluster_entities(docs)?;
    let entities = merge_entities(docs, &clusters, config);
    let links = merge_links(docs, &entities, config, repair);
    let base = docs[best];
    let summary = DocumentSummary {
        doc_id: base.doc_id.clone(),
        entities_kept: entities.kept,
        entities_dropped: entities.dropped,
        entities_conflicted: entities.conflicted,
        links_kept: links.links.len(),
        links_dropped: links.dropped,
        links_conflicted: links.conflicted,
        links_repaired: links.repaired,
        consistent: links.consistent,
    };
    let doc = AnnotatedDocument {
        doc_id: base.doc_id.clone(),
        extra_info: base.extra_info.clone(),
        title: base.title.clone(),
        dct: entities.dct,
        dct_lead: base.dct_lead.clone(),
        dct_tail: base.dct_tail.clone(),
        text: base.text.clone(),
        timexes: entities.timexes,
        events: entities.events,
        links: links.links,
    };
    Ok((doc, summary))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MergeSummary {
    pub systems: Vec<String>,
    pub best_system: String,
    pub support_threshold: usize,
    pub documents: Vec<DocumentSummary>,
    pub entities_kept: usize,
    pub entities_dropped: usize,
    pub links_kept: usize,
    pub links_dropped: usize,
}

fn output_name(doc_id: &str) -> String {
    let cleaned: String = doc_id
        .chars()
        .map(|c| if c.is_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' })
        .collect();
    format!("{cleaned}.tml")
}

/// Merges every document shared by the configured system corpora and writes
/// one `.tml` file per document into `out_dir`.
pub fn merge_corpus<W: Scalar>(config: &MergeConfig<W>, out_dir: &Path, repair: bool) -> Result<MergeSummary, MergeError> {
    config.validate()?;
    let mut per_system: Vec<BTreeMap<String, AnnotatedDocument>> = Vec::new();
    for system in &config.systems {
        let corpus = timeml::load_corpus(&system.path, false).map_err(|error| match error {
            TimemlError::Io { path, source } => MergeError::Io { path, source },
            error => MergeError::Load { path: system.path.clone(), error },
        })?;
        if let Some(f) = corpus.failures.into_iter().next() {
            return Err(MergeError::Load { path: f.path, error: f.error });
        }
        let mut docs = BTreeMap::new();
        for d in corpus.documents {
            let id = d.document.doc_id.clone();
            if docs.insert(id.clone(), d.document).is_some() {
                return Err(MergeError::DocIdMismatch(vec![format!("{} has doc_id {id} twice", system.name)]));
            }
        }
        per_system.push(docs);
    }

    let all_ids: BTreeSet<&String> = per_system.iter().flat_map(|m| m.keys()).collect();
    let mut problems = Vec::new();
    for (s, docs) in per_system.iter().enumerate() {
        let missing: Vec<&str> = all_ids.iter().filter(|id| !docs.contains_key(**id)).map(|id| id.as_str()).collect();
        if !missing.is_empty() {
            problems.push(format!("{} lacks {}", config.systems[s].name, missing.join(", ")));
        }
    }
    if !problems.is_empty() {
        return Err(MergeError::DocIdMismatch(problems));
    }

    fs::create_dir_all(out_dir).map_err(|source| MergeError::Io { path: out_dir.to_path_buf(), source })?;
    let ids: Vec<&String> = all_ids.into_iter().collect();
    let results: Vec<Result<DocumentSummary, MergeError>> = ids
        .par_iter()
        .map(|id| {
            let docs: Vec<&AnnotatedDocument> = per_system.iter().map(|m| &m[*id]).collect();
            let (merged, summary) = merge_document(&docs, config, repair)?;
            let text = timeml::serialize_document(&merged)
                .map_err(|source| MergeError::Serialize { doc_id: merged.doc_id.clone(), source })?;
            let path = out_dir.join(output_name(id));
            fs::write(&path, text).map_err(|source| MergeError::Io { path, source })?;
            Ok(summary)
        })
        .collect();

    let mut summary = MergeSummary {
        systems: config.systems.iter().map(|s| s.name.clone()).collect(),
        best_system: config.best_system.clone(),
        support_threshold: config.support_threshold,
        ..Default::default()
    };
    for r in results {
        let d = r?;
        summary.entities_kept += d.entities_kept;
        summary.entities_dropped += d.entities_dropped;
        summary.links_kept += d.links_kept;
        summary.links_dropped += d.links_dropped;
        summary.documents.push(d);
    }
    Ok(summary)
}
