//! Evaluation metrics: extent and attribute scores for temporal expressions
//! and events, Cohen's kappa on attributes, and the closure-based temporal
//! awareness score for temporal links.
//!
//! Scores are generic over [`Scalar`], so the same code yields `f64`
//! reports or exact rationals.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::closure::{ClosureError, Entailment, Inconsistency, PointGraph};
use crate::model::{AnnotatedDocument, EntityRef, EventAnnotation, Span, TemporalLink, TimexAnnotation};
use crate::scalar::Scalar;
use crate::timeml::{self, TimemlError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Spans must be identical.
    Strict,
    /// Spans must share at least one character.
    Relaxed,
}

/// Something with an extent in the body text.
pub trait Extent {
    /// `None` for the creation-time timex, which lives outside the body.
    fn extent(&self) -> Option<Span>;
}

impl Extent for Span {
    fn extent(&self) -> Option<Span> {
        Some(*self)
    }
}

impl Extent for TimexAnnotation {
    fn extent(&self) -> Option<Span> {
        self.span
    }
}

impl Extent for EventAnnotation {
    fn extent(&self) -> Option<Span> {
        Some(self.span)
    }
}

impl<E: Extent + ?Sized> Extent for &E {
    fn extent(&self) -> Option<Span> {
        (**self).extent()
    }
}

/// One-to-one matching between reference and response entities, by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_ref: Vec<usize>,
    pub unmatched_resp: Vec<usize>,
    pub mode: MatchMode,
}

/// Greedy one-to-one alignment. Candidate pairs are taken by overlap length
/// (longest first), then reference start, then response start. The
/// creation-time timexes (no extent) always match each other.
pub fn align_entities<R: Extent, S: Extent>(reference: &[R], response: &[S], mode: MatchMode) -> Alignment {
    let mut candidates: Vec<(usize, usize, usize, usize, usize)> = Vec::new();
    for (i, r) in reference.iter().enumerate() {
        for (j, s) in response.iter().enumerate() {
            match (r.extent(), s.extent()) {
                (None, None) => candidates.push((usize::MAX, 0, 0, i, j)),
                (Some(a), Some(b)) => {
                    let ok = match mode {
                        MatchMode::Strict => a == b,
                        MatchMode::Relaxed => a.overlaps(&b),
                    };
                    if ok {
                        candidates.push((a.overlap(&b), a.start, b.start, i, j));
                    }
                }
                _ => {}
            }
        }
    }
    candidates.sort_by(|x, y| y.0.cmp(&x.0).then((x.1, x.2, x.3, x.4).cmp(&(y.1, y.2, y.3, y.4))));
    let mut ref_used = vec![false; reference.len()];
    let mut resp_used = vec![false; response.len()];
    let mut pairs = Vec::new();
    for (_, _, _, i, j) in candidates {
        if !ref_used[i] && !resp_used[j] {
            ref_used[i] = true;
            resp_used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort();
    Alignment {
        pairs,
        unmatched_ref: (0..reference.len()).filter(|&i| !ref_used[i]).collect(),
        unmatched_resp: (0..response.len()).filter(|&j| !resp_used[j]).collect(),
        mode,
    }
}

/// Raw counts behind a precision/recall pair. For extents and attributes
/// the precision and recall hits coincide (true positives); for temporal
/// awareness they count verified response and reference links separately.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub precision_hits: u64,
    pub precision_total: u64,
    pub recall_hits: u64,
    pub recall_total: u64,
}

impl Counts {
    pub fn from_confusion(tp: u64, fp: u64, fn_: u64) -> Self {
        Counts { precision_hits: tp, precision_total: tp + fp, recall_hits: tp, recall_total: tp + fn_ }
    }

    pub fn tp(&self) -> u64 {
        self.precision_hits
    }

    pub fn fp(&self) -> u64 {
        self.precision_total - self.precision_hits
    }

    pub fn fn_(&self) -> u64 {
        self.recall_total - self.recall_hits
    }

    pub fn add(&mut self, other: &Counts) {
        self.precision_hits += other.precision_hits;
        self.precision_total += other.precision_total;
        self.recall_hits += other.recall_hits;
        self.recall_total += other.recall_total;
    }
}

/// Precision, recall and their harmonic mean.
///
/// A zero denominator gives 0, except that an empty reference scored
/// against an empty response gives 1 everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
    pub counts: Counts,
}

impl<T: Scalar> Prf<T> {
    pub fn from_counts(counts: Counts) -> Self {
        if counts.precision_total == 0 && counts.recall_total == 0 {
            return Prf { precision: T::one(), recall: T::one(), f1: T::one(), counts };
        }
        let frac = |num: u64, den: u64| if den == 0 { T::zero() } else { T::ratio(num, den) };
        let precision = frac(counts.precision_hits, counts.precision_total);
        let recall = frac(counts.recall_hits, counts.recall_total);
        let f1 = harmonic_mean(precision, recall);
        Prf { precision, recall, f1, counts }
    }

    pub fn from_confusion(tp: u64, fp: u64, fn_: u64) -> Self {
        Prf::from_counts(Counts::from_confusion(tp, fp, fn_))
    }
}

pub fn harmonic_mean<T: Scalar>(p: T, r: T) -> T {
    if p + r == T::zero() {
        T::zero()
    } else {
        (T::one() + T::one()) * p * r / (p + r)
    }
}

impl<T: Scalar> Serialize for Prf<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Prf", 6)?;
        s.serialize_field("precision", &self.precision.as_f64())?;
        s.serialize_field("recall", &self.recall.as_f64())?;
        s.serialize_field("f1", &self.f1.as_f64())?;
        s.serialize_field("tp", &self.counts.tp())?;
        s.serialize_field("fp", &self.counts.fp())?;
        s.serialize_field("fn", &self.counts.fn_())?;
        s.end()
    }
}

pub fn extent_counts(alignment: &Alignment) -> Counts {
    Counts::from_confusion(
        alignment.pairs.len() as u64,
        alignment.unmatched_resp.len() as u64,
        alignment.unmatched_ref.len() as u64,
    )
}

pub fn extent_prf<T: Scalar>(alignment: &Alignment) -> Prf<T> {
    Prf::from_counts(extent_counts(alignment))
}

/// Scored entity attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attribute {
    TimexType,
    TimexValue,
    EventClass,
    Tense,
    Aspect,
    Polarity,
    Modality,
    Pos,
}

impl Attribute {
    pub const TIMEX_HEADLINE: [Attribute; 2] = [Attribute::TimexType, Attribute::TimexValue];
    pub const EVENT_HEADLINE: [Attribute; 1] = [Attribute::EventClass];
    pub const EVENT_SECONDARY: [Attribute; 5] =
        [Attribute::Tense, Attribute::Aspect, Attribute::Polarity, Attribute::Modality, Attribute::Pos];

    /// Metric name used in reports.
    pub fn metric_name(&self) -> &'static str {
        match self {
            Attribute::TimexType => "timex_type",
            Attribute::TimexValue => "timex_value",
            Attribute::EventClass => "event_class",
            Attribute::Tense => "event_tense",
            Attribute::Aspect => "event_aspect",
            Attribute::Polarity => "event_polarity",
            Attribute::Modality => "event_modality",
            Attribute::Pos => "event_pos",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("attribute {attribute:?} does not apply to this entity kind")]
pub struct NotApplicable {
    pub attribute: Attribute,
}

/// Entities carrying scorable attributes.
pub trait Attributed: Extent {
    /// `Err` when the attribute belongs to the other entity kind. An absent
    /// optional attribute is `Ok(None)`.
    fn attribute(&self, attribute: Attribute) -> Result<Option<&str>, NotApplicable>;
}

impl Attributed for TimexAnnotation {
    fn attribute(&self, attribute: Attribute) -> Result<Option<&str>, NotApplicable> {
        match attribute {
            Attribute::TimexType => Ok(Some(self.ttype.as_str())),
            Attribute::TimexValue => Ok(Some(&self.value)),
            _ => Err(NotApplicable { attribute }),
        }
    }
}

impl Attributed for EventAnnotation {
    fn attribute(&self, attribute: Attribute) -> Result<Option<&str>, NotApplicable> {
        match attribute {
            Attribute::EventClass => Ok(Some(&self.eclass)),
            Attribute::Tense => Ok(self.tense.as_deref()),
            Attribute::Aspect => Ok(self.aspect.as_deref()),
            Attribute::Polarity => Ok(self.polarity.as_deref()),
            Attribute::Modality => Ok(self.modality.as_deref()),
            Attribute::Pos => Ok(self.pos.as_deref()),
            _ => Err(NotApplicable { attribute }),
        }
    }
}

impl<E: Attributed + ?Sized> Attributed for &E {
    fn attribute(&self, attribute: Attribute) -> Result<Option<&str>, NotApplicable> {
        (**self).attribute(attribute)
    }
}

fn label(value: Option<&str>) -> String {
    value.map(|v| v.trim().to_uppercase()).unwrap_or_default()
}

/// Reference/response label pairs over matched entities, upper-cased.
pub fn attribute_labels<E: Attributed>(
    alignment: &Alignment,
    reference: &[E],
    response: &[E],
    attribute: Attribute,
) -> Result<Vec<(String, String)>, NotApplicable> {
    alignment
        .pairs
        .iter()
        .map(|&(i, j)| Ok((label(reference[i].attribute(attribute)?), label(response[j].attribute(attribute)?))))
        .collect()
}

/// Attribute agreement counted over the alignment. Matched pairs with equal
/// values (case-insensitive) are true positives; a disagreeing pair counts
/// as one false positive and one false negative; unmatched entities count
/// as in extent scoring.
pub fn attribute_counts<E: Attributed>(
    alignment: &Alignment,
    reference: &[E],
    response: &[E],
    attribute: Attribute,
) -> Result<Counts, NotApplicable> {
    let labels = attribute_labels(alignment, reference, response, attribute)?;
    let agree = labels.iter().filter(|(a, b)| a == b).count() as u64;
    let disagree = labels.len() as u64 - agree;
    Ok(Counts::from_confusion(
        agree,
        disagree + alignment.unmatched_resp.len() as u64,
        disagree + alignment.unmatched_ref.len() as u64,
    ))
}

pub fn attribute_prf<T: Scalar, E: Attributed>(
    alignment: &Alignment,
    reference: &[E],
    response: &[E],
    attribute: Attribute,
) -> Result<Prf<T>, NotApplicable> {
    attribute_counts(alignment, reference, response, attribute).map(Prf::from_counts)
}

/// Cohen's kappa over paired labels; `None` for an empty sample. When the
/// chance agreement is 1, kappa is 1 for perfect observed agreement and 0
/// otherwise.
pub fn cohen_kappa<T: Scalar>(labels: &[(String, String)]) -> Option<T> {
    if labels.is_empty() {
        return None;
    }
    let n = labels.len() as u64;
    let agree = labels.iter().filter(|(a, b)| a == b).count() as u64;
    let mut ref_counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut resp_counts: BTreeMap<&str, u64> = BTreeMap::new();
    for (a, b) in labels {
        *ref_counts.entry(a).or_default() += 1;
        *resp_counts.entry(b).or_default() += 1;
    }
    let observed = T::ratio(agree, n);
    let chance = ref_counts
        .iter()
        .map(|(k, &rc)| T::ratio(rc * resp_counts.get(k).copied().unwrap_or(0), n * n))
        .fold(T::zero(), |acc, x| acc + x);
    if chance == T::one() {
        return Some(if observed == T::one() { T::one() } else { T::zero() });
    }
    Some((observed - chance) / (T::one() - chance))
}

pub fn attribute_kappa<T: Scalar, E: Attributed>(
    alignment: &Alignment,
    reference: &[E],
    response: &[E],
    attribute: Attribute,
) -> Result<Option<T>, NotApplicable> {
    Ok(cohen_kappa(&attribute_labels(alignment, reference, response, attribute)?))
}

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("reference document {doc_id} is temporally inconsistent: {inconsistency}")]
    InconsistentReference { doc_id: String, inconsistency: Inconsistency },
    #[error("document {doc_id}: {source}")]
    Closure {
        doc_id: String,
        #[source]
        source: ClosureError,
    },
    #[error("{corpus} corpus has more than one document with doc_id {doc_id}")]
    DocIdCollision { corpus: &'static str, doc_id: String },
    #[error("reference corpus is empty")]
    EmptyReference,
    #[error("response documents without a reference counterpart: {}", .0.join(", "))]
    UnmatchedResponse(Vec<String>),
    #[error("temporal awareness requested but {0} carries no temporal links")]
    NoLinks(&'static str),
    #[error("{} failed to load: {}", .path.display(), .error)]
    Load { path: PathBuf, error: TimemlError },
    #[error(transparent)]
    Io(#[from] TimemlError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AwarenessOptions {
    /// Reduce both link sets to non-redundant cores before verification.
    pub reduce: bool,
}

impl Default for AwarenessOptions {
    fn default() -> Self {
        AwarenessOptions { reduce: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AwarenessOutcome {
    pub counts: Counts,
    /// The response links (mapped onto reference entities) admit no model.
    pub inconsistent_response: bool,
    /// Response links with an endpoint that aligns to no reference entity.
    pub unverifiable: u64,
}

impl AwarenessOutcome {
    pub fn prf<T: Scalar>(&self) -> Prf<T> {
        Prf::from_counts(self.counts)
    }
}

const UNALIGNED_PREFIX: &str = "response#";

fn entity_ref(timex_ids: &HashSet<String>, id: &str) -> EntityRef {
    if timex_ids.contains(id) {
        EntityRef::Timex(id.to_string())
    } else {
        EntityRef::Event(id.to_string())
    }
}

/// Temporal awareness of a response against a reference document.
///
/// Entities are aligned with relaxed matching and response links are
/// rewritten onto reference identifiers. Precision is the share of
/// (reduced) response links entailed by the reference closure; recall the
/// share of (reduced) reference links entailed by the response closure.
/// The reduction is read off each closure, so any two link sets with the
/// same closure score the same.
/// Links touching an unaligned response entity stay in the precision
/// denominator but can never verify.
pub fn temporal_awareness(
    reference: &AnnotatedDocument,
    response: &AnnotatedDocument,
    options: AwarenessOptions,
) -> Result<AwarenessOutcome, ScoringError> {
    let closure_err = |source| ScoringError::Closure { doc_id: reference.doc_id.clone(), source };
    let ref_ids = reference.instance_ids();
    let ref_links: Vec<TemporalLink> = reference.relation_links().cloned().collect();
    let ref_closed = PointGraph::build(&ref_links, ref_ids.iter().cloned())
        .map_err(closure_err)?
        .close()
        .map_err(|inconsistency| ScoringError::InconsistentReference {
            doc_id: reference.doc_id.clone(),
            inconsistency,
        })?;
    let mut timex_ids: HashSet<String> = reference.all_timexes().map(|t| t.tid.clone()).collect();
    let ref_core = if options.reduce {
        ref_closed.canonical_reduction(|id| entity_ref(&timex_ids, id))
    } else {
        ref_links
    };

    let mut mapping: HashMap<&str, EntityRef> = HashMap::new();
    let ref_timexes: Vec<&TimexAnnotation> = reference.all_timexes().collect();
    let resp_timexes: Vec<&TimexAnnotation> = response.all_timexes().collect();
    for (i, j) in align_entities(&ref_timexes, &resp_timexes, MatchMode::Relaxed).pairs {
        mapping.insert(&resp_timexes[j].tid, EntityRef::Timex(ref_timexes[i].tid.clone()));
    }
    for (i, j) in align_entities(&reference.events, &response.events, MatchMode::Relaxed).pairs {
        mapping.insert(&response.events[j].eiid, EntityRef::Event(reference.events[i].eiid.clone()));
    }

    let mut unaligned: Vec<String> = Vec::new();
    let mut rename = |r: &EntityRef| -> EntityRef {
        mapping.get(r.id()).cloned().unwrap_or_else(|| {
            let id = format!("{UNALIGNED_PREFIX}{}", r.id());
            if !unaligned.contains(&id) {
                unaligned.push(id.clone());
            }
            match r {
                EntityRef::Event(_) => EntityRef::Event(id),
                EntityRef::Timex(_) => EntityRef::Timex(id),
            }
        })
    };
    let resp_links: Vec<TemporalLink> = response
        .relation_links()
        .map(|l| TemporalLink {
            lid: l.lid.clone(),
            source: rename(&l.source),
            target: rename(&l.target),
            relation: l.relation,
            extras: Default::default(),
        })
        .collect();
    let resp_entities: Vec<String> = ref_ids.iter().cloned().chain(unaligned).collect();
    let is_aligned = |l: &TemporalLink| {
        !l.source.id().starts_with(UNALIGNED_PREFIX) && !l.target.id().starts_with(UNALIGNED_PREFIX)
    };
    let unverifiable = resp_links.iter().filter(|l| !is_aligned(l)).count() as u64;

    let resp_graph = PointGraph::build(&resp_links, resp_entities.iter().cloned()).map_err(closure_err)?;
    let resp_closed = match resp_graph.close() {
        Ok(closed) => closed,
        Err(_) => {
            return Ok(AwarenessOutcome {
                counts: Counts {
                    precision_hits: 0,
                    precision_total: resp_links.len() as u64,
                    recall_hits: 0,
                    recall_total: ref_core.len() as u64,
                },
                inconsistent_response: true,
                unverifiable,
            })
        }
    };
    let resp_core = if options.reduce {
        timex_ids.extend(resp_links.iter().flat_map(|l| [&l.source, &l.target]).filter(|r| !r.is_event()).map(|r| r.id().to_string()));
        resp_closed.canonical_reduction(|id| entity_ref(&timex_ids, id))
    } else {
        resp_links
    };

    let mut precision_hits = 0u64;
    for link in resp_core.iter().filter(|l| is_aligned(l)) {
        if ref_closed.entails(link).map_err(closure_err)? == Entailment::Yes {
            precision_hits += 1;
        }
    }
    let mut recall_hits = 0u64;
    for link in &ref_core {
        if resp_closed.entails(link).map_err(closure_err)? == Entailment::Yes {
            recall_hits += 1;
        }
    }
    Ok(AwarenessOutcome {
        counts: Counts {
            precision_hits,
            precision_total: resp_core.len() as u64,
            recall_hits,
            recall_total: ref_core.len() as u64,
        },
        inconsistent_response: false,
        unverifiable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskSet {
    /// Temporal expressions: extent, TYPE, VAL.
    pub timexes: bool,
    /// Events: extent, CLASS (and secondary attributes on request).
    pub events: bool,
    /// Temporal links: temporal awareness.
    pub relations: bool,
}

impl TaskSet {
    pub const ALL: TaskSet = TaskSet { timexes: true, events: true, relations: true };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreOptions {
    pub tasks: TaskSet,
    /// Extent matching for entity and attribute scores. Awareness always
    /// aligns with relaxed matching.
    pub mode: MatchMode,
    pub all_attributes: bool,
    pub awareness: AwarenessOptions,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            tasks: TaskSet::ALL,
            mode: MatchMode::Relaxed,
            all_attributes: false,
            awareness: AwarenessOptions::default(),
        }
    }
}

/// Arithmetic mean of per-document scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroPrf<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
    pub documents: u64,
}

impl<T: Scalar> Serialize for MacroPrf<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("MacroPrf", 4)?;
        s.serialize_field("precision", &self.precision.as_f64())?;
        s.serialize_field("recall", &self.recall.as_f64())?;
        s.serialize_field("f1", &self.f1.as_f64())?;
        s.serialize_field("documents", &self.documents)?;
        s.end()
    }
}

pub fn macro_average<'a, T: Scalar + 'a>(scores: impl IntoIterator<Item = &'a Prf<T>>) -> Option<MacroPrf<T>> {
    let mut n = 0u64;
    let (mut p, mut r, mut f) = (T::zero(), T::zero(), T::zero());
    for s in scores {
        n += 1;
        p = p + s.precision;
        r = r + s.recall;
        f = f + s.f1;
    }
    (n > 0).then(|| {
        let d = T::from_count(n);
        MacroPrf { precision: p / d, recall: r / d, f1: f / d, documents: n }
    })
}

fn serialize_kappas<T: Scalar, S: Serializer>(map: &BTreeMap<String, Option<T>>, s: S) -> Result<S::Ok, S::Error> {
    let view: BTreeMap<&str, Option<f64>> = map.iter().map(|(k, v)| (k.as_str(), v.map(|x| x.as_f64()))).collect();
    view.serialize(s)
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct DocumentScore<T> {
    pub doc_id: String,
    pub metrics: BTreeMap<String, Prf<T>>,
    #[serde(serialize_with = "serialize_kappas")]
    pub kappa: BTreeMap<String, Option<T>>,
    pub awareness: Option<Prf<T>>,
    pub inconsistent_response: bool,
    pub missing_response: bool,
    #[serde(skip)]
    labels: BTreeMap<String, Vec<(String, String)>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ScoreReport<T> {
    pub documents: usize,
    pub mode: MatchMode,
    /// Micro-averaged scores: counts pooled over the corpus.
    pub metrics: BTreeMap<String, Prf<T>>,
    #[serde(serialize_with = "serialize_kappas")]
    pub kappa: BTreeMap<String, Option<T>>,
    /// Present only when both corpora carry temporal links and relations
    /// were requested.
    pub awareness: Option<Prf<T>>,
    pub macro_averages: BTreeMap<String, MacroPrf<T>>,
    pub inconsistent_responses: Vec<String>,
    pub warnings: Vec<String>,
    pub per_document: Vec<DocumentScore<T>>,
}

type Scored<T> = Result<(DocumentScore<T>, Option<AwarenessOutcome>), ScoringError>;

fn score_document<T: Scalar>(
    reference: &AnnotatedDocument,
    response: Option<&AnnotatedDocument>,
    options: &ScoreOptions,
    with_awareness: bool,
) -> Scored<T> {
    let empty = AnnotatedDocument::minimal(reference.doc_id.clone(), reference.dct.value.clone(), "");
    let resp = response.unwrap_or(&empty);
    let mut metrics = BTreeMap::new();
    let mut kappa = BTreeMap::new();
    let mut labels = BTreeMap::new();

    let mut record = |name: &str, counts: Counts, pairs: Option<Vec<(String, String)>>| {
        metrics.insert(name.to_string(), Prf::<T>::from_counts(counts));
        if let Some(pairs) = pairs {
            kappa.insert(name.to_string(), cohen_kappa::<T>(&pairs));
            labels.insert(name.to_string(), pairs);
        }
    };

    if options.tasks.timexes {
        let alignment = align_entities(&reference.timexes, &resp.timexes, options.mode);
        record("timex_extent", extent_counts(&alignment), None);
        for attr in Attribute::TIMEX_HEADLINE {
            let counts = attribute_counts(&alignment, &reference.timexes, &resp.timexes, attr).expect("timex attribute");
            let pairs = attribute_labels(&alignment, &reference.timexes, &resp.timexes, attr).expect("timex attribute");
            record(attr.metric_name(), counts, Some(pairs));
        }
    }
    if options.tasks.events {
        let alignment = align_entities(&reference.events, &resp.events, options.mode);
        record("event_extent", extent_counts(&alignment), None);
        let secondary: &[Attribute] = if options.all_attributes { &Attribute::EVENT_SECONDARY } else { &[] };
        for &attr in Attribute::EVENT_HEADLINE.iter().chain(secondary) {
            let counts = attribute_counts(&alignment, &reference.events, &resp.events, attr).expect("event attribute");
            let pairs = attribute_labels(&alignment, &reference.events, &resp.events, attr).expect("event attribute");
            record(attr.metric_name(), counts, Some(pairs));
        }
    }

    let outcome = if with_awareness { Some(temporal_awareness(reference, resp, options.awareness)?) } else { None };
    Ok((
        DocumentScore {
            doc_id: reference.doc_id.clone(),
            metrics,
            kappa,
            awareness: outcome.as_ref().map(AwarenessOutcome::prf),
            inconsistent_response: outcome.as_ref().is_some_and(|o| o.inconsistent_response),
            missing_response: response.is_none(),
            labels,
        },
        outcome,
    ))
}

/// A document together with the file it came from.
#[derive(Debug, Clone)]
pub struct NamedDocument {
    pub name: String,
    pub document: AnnotatedDocument,
}

impl NamedDocument {
    pub fn new(name: impl Into<String>, document: AnnotatedDocument) -> Self {
        NamedDocument { name: name.into(), document }
    }
}

fn index_by_id<'a>(docs: &'a [NamedDocument], corpus: &'static str) -> Result<HashMap<&'a str, usize>, ScoringError> {
    let mut index = HashMap::new();
    for (i, d) in docs.iter().enumerate() {
        if index.insert(d.document.doc_id.as_str(), i).is_some() {
            return Err(ScoringError::DocIdCollision { corpus, doc_id: d.document.doc_id.clone() });
        }
    }
    Ok(index)
}

/// Scores a response corpus against a reference corpus held in memory.
///
/// Documents pair by doc_id, falling back to file name. A reference
/// document without a response counts all of its entities and links as
/// missed; a response document without a reference is an error.
pub fn score_documents<T: Scalar>(
    reference: &[NamedDocument],
    response: &[NamedDocument],
    options: &ScoreOptions,
) -> Result<ScoreReport<T>, ScoringError> {
    if reference.is_empty() {
        return Err(ScoringError::EmptyReference);
    }
    let ref_index = index_by_id(reference, "reference")?;
    let resp_index = index_by_id(response, "response")?;

    let mut order: Vec<usize> = (0..reference.len()).collect();
    order.sort_by(|&a, &b| reference[a].document.doc_id.cmp(&reference[b].document.doc_id));

    let mut used: HashSet<usize> = HashSet::new();
    let mut pairs: Vec<(usize, Option<usize>)> = Vec::new();
    let mut warnings = Vec::new();
    for &i in &order {
        let d = &reference[i];
        let by_id = resp_index.get(d.document.doc_id.as_str()).copied();
        let by_name = || {
            response.iter().position(|r| r.name == d.name && !ref_index.contains_key(r.document.doc_id.as_str()))
        };
        let j = by_id.or_else(by_name).filter(|j| !used.contains(j));
        match j {
            Some(j) => {
                used.insert(j);
            }
            None => warnings.push(format!("no response for reference document {}; scored as all missed", d.document.doc_id)),
        }
        pairs.push((i, j));
    }
    let mut orphans: Vec<String> =
        (0..response.len()).filter(|j| !used.contains(j)).map(|j| response[j].document.doc_id.clone()).collect();
    if !orphans.is_empty() {
        orphans.sort();
        return Err(ScoringError::UnmatchedResponse(orphans));
    }

    let has_links = |docs: &[NamedDocument]| docs.iter().any(|d| d.document.relation_links().next().is_some());
    let mut with_awareness = options.tasks.relations;
    if with_awareness {
        let missing = if !has_links(reference) {
            Some("the reference corpus")
        } else if !has_links(response) {
            Some("the response corpus")
        } else {
            None
        };
        if let Some(which) = missing {
            if !options.tasks.timexes && !options.tasks.events {
                return Err(ScoringError::NoLinks(which));
            }
            warnings.push(format!("temporal awareness skipped: {which} carries no temporal links"));
            with_awareness = false;
        }
    }

    let scored: Vec<Scored<T>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            score_document::<T>(&reference[i].document, j.map(|j| &response[j].document), options, with_awareness)
        })
        .collect();

    let mut per_document = Vec::with_capacity(scored.len());
    let mut pooled: BTreeMap<String, Counts> = BTreeMap::new();
    let mut pooled_labels: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    let mut awareness_counts: Option<Counts> = None;
    let mut inconsistent_responses = Vec::new();
    for result in scored {
        let (doc, outcome) = result?;
        for (name, prf) in &doc.metrics {
            pooled.entry(name.clone()).or_default().add(&prf.counts);
        }
        for (name, pairs) in &doc.labels {
            pooled_labels.entry(name.clone()).or_default().extend(pairs.iter().cloned());
        }
        if let Some(o) = outcome {
            awareness_counts.get_or_insert_with(Counts::default).add(&o.counts);
            if o.inconsistent_response {
                inconsistent_responses.push(doc.doc_id.clone());
            }
        }
        per_document.push(doc);
    }

    let metrics: BTreeMap<String, Prf<T>> = pooled.into_iter().map(|(k, c)| (k, Prf::from_counts(c))).collect();
    let kappa = pooled_labels.iter().map(|(k, pairs)| (k.clone(), cohen_kappa::<T>(pairs))).collect();
    let mut macro_averages = BTreeMap::new();
    for name in metrics.keys() {
        if let Some(m) = macro_average(per_document.iter().filter_map(|d| d.metrics.get(name))) {
            macro_averages.insert(name.clone(), m);
        }
    }
    if let Some(m) = macro_average(per_document.iter().filter_map(|d| d.awareness.as_ref())) {
        macro_averages.insert("awareness".to_string(), m);
    }

    Ok(ScoreReport {
        documents: per_document.len(),
        mode: options.mode,
        metrics,
        kappa,
        awareness: awareness_counts.map(Prf::from_counts),
        macro_averages,
        inconsistent_responses,
        warnings,
        per_document,
    })
}

/// Loads every `.tml` file of a directory as named documents. Any parse
/// failure is an error.
pub fn load_named(dir: &Path, recursive: bool) -> Result<Vec<NamedDocument>, ScoringError> {
    let corpus = timeml::load_corpus(dir, recursive)?;
    if let Some(failure) = corpus.failures.into_iter().next() {
        return Err(ScoringError::Load { path: failure.path, error: failure.error });
    }
    Ok(corpus
        .documents
        .into_iter()
        .map(|d| {
            let name = d.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            NamedDocument::new(name, d.document)
        })
        .collect())
}

pub fn score_corpus<T: Scalar>(
    reference_dir: &Path,
    response_dir: &Path,
    options: &ScoreOptions,
    recursive: bool,
) -> Result<ScoreReport<T>, ScoringError> {
    let reference = load_named(reference_dir, recursive)?;
    let response = load_named(response_dir, recursive)?;
    score_documents(&reference, &response, options)
}
