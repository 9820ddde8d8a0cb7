//! Annotation data model: entities, temporal links and documents.
//!
//! Entity extents are character spans over the tag-stripped body text,
//! counted in Unicode scalar values.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Attributes that the model does not interpret, kept so they can be re-emitted.
pub type Extras = BTreeMap<String, String>;

/// Half-open character range `[start, end)` over a document's plain text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Number of characters shared by both spans.
    pub fn overlap(&self, other: &Span) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        hi.saturating_sub(lo)
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.overlap(other) > 0
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// Returns the characters of `text` covered by `span`, or `None` when the
/// span falls outside the text.
pub fn char_slice(text: &str, span: Span) -> Option<&str> {
    if span.start > span.end {
        return None;
    }
    let mut indices = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
    let start = indices.nth(span.start)?;
    let end = if span.end == span.start {
        start
    } else {
        indices.nth(span.end - span.start - 1)?
    };
    Some(&text[start..end])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TimexType {
    Date,
    Time,
    Duration,
    Set,
}

impl TimexType {
    pub const ALL: [TimexType; 4] = [TimexType::Date, TimexType::Time, TimexType::Duration, TimexType::Set];

    pub fn as_str(&self) -> &'static str {
        match self {
            TimexType::Date => "DATE",
            TimexType::Time => "TIME",
            TimexType::Duration => "DURATION",
            TimexType::Set => "SET",
        }
    }
}

impl fmt::Display for TimexType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} value {value:?}")]
pub struct UnknownLabel {
    pub kind: &'static str,
    pub value: String,
}

impl FromStr for TimexType {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DATE" => Ok(TimexType::Date),
            "TIME" => Ok(TimexType::Time),
            "DURATION" => Ok(TimexType::Duration),
            "SET" => Ok(TimexType::Set),
            _ => Err(UnknownLabel { kind: "TIMEX3 type", value: s.to_string() }),
        }
    }
}

/// TimeML TLINK relation labels. `None` only exists at the file level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationType {
    Before,
    After,
    Includes,
    IsIncluded,
    During,
    Simultaneous,
    IAfter,
    IBefore,
    Identity,
    Begins,
    Ends,
    BegunBy,
    EndedBy,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("relation NONE carries no temporal information")]
pub struct NoneRelation;

impl RelationType {
    /// The thirteen labels that carry temporal information.
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

    pub fn as_str(&self) -> &'static str {
        match self {
            RelationType::Before => "BEFORE",
            RelationType::After => "AFTER",
            RelationType::Includes => "INCLUDES",
            RelationType::IsIncluded => "IS_INCLUDED",
            RelationType::During => "DURING",
            RelationType::Simultaneous => "SIMULTANEOUS",
            RelationType::IAfter => "IAFTER",
            RelationType::IBefore => "IBEFORE",
            RelationType::Identity => "IDENTITY",
            RelationType::Begins => "BEGINS",
            RelationType::Ends => "ENDS",
            RelationType::BegunBy => "BEGUN_BY",
            RelationType::EndedBy => "ENDED_BY",
            RelationType::None => "NONE",
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, RelationType::None)
    }

    /// Converse relation: `a R b` holds iff `b inverse(R) a` holds.
    pub fn inverse(self) -> Result<RelationType, NoneRelation> {
        use RelationType::*;
        Ok(match self {
            Before => After,
            After => Before,
            Includes => IsIncluded,
            IsIncluded => Includes,
            IBefore => IAfter,
            IAfter => IBefore,
            Begins => BegunBy,
            BegunBy => Begins,
            Ends => EndedBy,
            EndedBy => Ends,
            During => During,
            Simultaneous => Simultaneous,
            Identity => Identity,
            None => return Err(NoneRelation),
        })
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationType {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .chars()
            .map(|c| if c == '-' || c == ' ' { '_' } else { c.to_ascii_uppercase() })
            .collect();
        use RelationType::*;
        Ok(match norm.as_str() {
            "BEFORE" => Before,
            "AFTER" => After,
            "INCLUDES" => Includes,
            "IS_INCLUDED" => IsIncluded,
            "DURING" => During,
            "SIMULTANEOUS" => Simultaneous,
            "IAFTER" | "IMMEDIATELY_AFTER" => IAfter,
            "IBEFORE" | "IMMEDIATELY_BEFORE" => IBefore,
            "IDENTITY" => Identity,
            "BEGINS" => Begins,
            "ENDS" => Ends,
            "BEGUN_BY" => BegunBy,
            "ENDED_BY" => EndedBy,
            "NONE" => None,
            _ => return Err(UnknownLabel { kind: "relType", value: s.to_string() }),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimexAnnotation {
    pub tid: String,
    /// `None` for a creation-time timex whose extent lies outside TEXT.
    pub span: Option<Span>,
    pub ttype: TimexType,
    pub value: String,
    pub function_in_document: Option<String>,
    pub temporal_function: Option<bool>,
    pub surface: String,
    pub extras: Extras,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventAnnotation {
    pub eid: String,
    pub eiid: String,
    pub span: Span,
    pub eclass: String,
    pub tense: Option<String>,
    pub aspect: Option<String>,
    pub polarity: Option<String>,
    pub modality: Option<String>,
    pub pos: Option<String>,
    pub surface: String,
    pub extras: Extras,
}

/// A link endpoint. The variant records which attribute family named it
/// (`eventInstanceID`/`relatedToEventInstance` vs `timeID`/`relatedToTime`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityRef {
    Event(String),
    Timex(String),
}

impl EntityRef {
    pub fn id(&self) -> &str {
        match self {
            EntityRef::Event(id) | EntityRef::Timex(id) => id,
        }
    }

    pub fn is_event(&self) -> bool {
        matches!(self, EntityRef::Event(_))
    }
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalLink {
    pub lid: String,
    pub source: EntityRef,
    pub target: EntityRef,
    pub relation: RelationType,
    pub extras: Extras,
}

impl TemporalLink {
    pub fn new(lid: impl Into<String>, source: EntityRef, target: EntityRef, relation: RelationType) -> Self {
        TemporalLink { lid: lid.into(), source, target, relation, extras: Extras::new() }
    }
}

/// Borrowed handle to an entity found by identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entity<'a> {
    Timex(&'a TimexAnnotation),
    Event(&'a EventAnnotation),
}

impl<'a> Entity<'a> {
    /// Identifier that links use to refer to this entity (tid or eiid).
    pub fn instance_id(&self) -> &'a str {
        match self {
            Entity::Timex(t) => &t.tid,
            Entity::Event(e) => &e.eiid,
        }
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            Entity::Timex(t) => t.span,
            Entity::Event(e) => Some(e.span),
        }
    }
}

/// Codes for every problem the model check and the validator can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    MalformedXml,
    BadRoot,
    MissingDocid,
    MissingDct,
    MissingDctTimex,
    MissingText,
    DuplicateElement,
    MissingAttribute,
    BadAttribute,
    NestedTag,
    DuplicateId,
    DanglingRef,
    SelfLink,
    OverlappingSpans,
    SpanOutOfBounds,
    SurfaceMismatch,
    EmptyTimexValue,
    EmptyEventClass,
    BadIdentifierShape,
    BadTimexValueShape,
    DctNotCreationTime,
    EventMissingDctLink,
}

impl IssueCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            IssueCode::MalformedXml => "MALFORMED_XML",
            IssueCode::BadRoot => "BAD_ROOT",
            IssueCode::MissingDocid => "MISSING_DOCID",
            IssueCode::MissingDct => "MISSING_DCT",
            IssueCode::MissingDctTimex => "MISSING_DCT_TIMEX",
            IssueCode::MissingText => "MISSING_TEXT",
            IssueCode::DuplicateElement => "DUPLICATE_ELEMENT",
            IssueCode::MissingAttribute => "MISSING_ATTRIBUTE",
            IssueCode::BadAttribute => "BAD_ATTRIBUTE",
            IssueCode::NestedTag => "NESTED_TAG",
            IssueCode::DuplicateId => "DUPLICATE_ID",
            IssueCode::DanglingRef => "DANGLING_REF",
            IssueCode::SelfLink => "SELF_LINK",
            IssueCode::OverlappingSpans => "OVERLAPPING_SPANS",
            IssueCode::SpanOutOfBounds => "SPAN_OUT_OF_BOUNDS",
            IssueCode::SurfaceMismatch => "SURFACE_MISMATCH",
            IssueCode::EmptyTimexValue => "EMPTY_TIMEX_VALUE",
            IssueCode::EmptyEventClass => "EMPTY_EVENT_CLASS",
            IssueCode::BadIdentifierShape => "BAD_IDENTIFIER_SHAPE",
            IssueCode::BadTimexValueShape => "BAD_TIMEX_VALUE_SHAPE",
            IssueCode::DctNotCreationTime => "DCT_NOT_CREATION_TIME",
            IssueCode::EventMissingDctLink => "EVENT_MISSING_DCT_LINK",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A broken model invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: IssueCode,
    /// Entity or link identifier the violation is attached to.
    pub id: Option<String>,
    pub message: String,
}

impl Violation {
    pub(crate) fn new(code: IssueCode, id: Option<&str>, message: impl Into<String>) -> Self {
        Violation { code, id: id.map(str::to_string), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            Some(id) => write!(f, "{} {}: {}", self.code, id, self.message),
            None => write!(f, "{} {}", self.code, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("document {doc_id}: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ModelError {
    pub doc_id: String,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dangling reference {id:?}{}", .link.as_ref().map(|l| format!(" in link {l}")).unwrap_or_default())]
pub struct DanglingReference {
    pub id: String,
    pub link: Option<String>,
}

/// One datafile: metadata, body text, entities and links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedDocument {
    pub doc_id: String,
    pub extra_info: Option<String>,
    pub title: Option<String>,
    pub dct: TimexAnnotation,
    /// Text inside the DCT element before its TIMEX3.
    pub dct_lead: String,
    /// Text inside the DCT element after its TIMEX3.
    pub dct_tail: String,
    pub text: String,
    pub timexes: Vec<TimexAnnotation>,
    pub events: Vec<EventAnnotation>,
    pub links: Vec<TemporalLink>,
}

impl AnnotatedDocument {
    /// A document with no entities besides the creation time and no links.
    pub fn minimal(doc_id: impl Into<String>, dct_value: impl Into<String>, text: impl Into<String>) -> Self {
        let value = dct_value.into();
        AnnotatedDocument {
            doc_id: doc_id.into(),
            extra_info: None,
            title: None,
            dct: TimexAnnotation {
                tid: "t0".to_string(),
                span: None,
                ttype: TimexType::Date,
                surface: value.clone(),
                value,
                function_in_document: Some("CREATION_TIME".to_string()),
                temporal_function: Some(false),
                extras: Extras::new(),
            },
            dct_lead: String::new(),
            dct_tail: String::new(),
            text: text.into(),
            timexes: Vec::new(),
            events: Vec::new(),
            links: Vec::new(),
        }
    }

    /// Checks every model invariant and returns the document unchanged if
    /// none is broken.
    pub fn validated(self) -> Result<Self, ModelError> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(ModelError { doc_id: self.doc_id.clone(), violations })
        }
    }

    /// All timexes including the creation time, DCT first.
    pub fn all_timexes(&self) -> impl Iterator<Item = &TimexAnnotation> {
        std::iter::once(&self.dct).chain(self.timexes.iter())
    }

    /// Every entity a link may refer to, DCT first, then body timexes, then events.
    pub fn entities(&self) -> impl Iterator<Item = Entity<'_>> {
        self.all_timexes().map(Entity::Timex).chain(self.events.iter().map(Entity::Event))
    }

    /// Finds the timex (by tid) or event instance (by eiid) with this identifier.
    pub fn resolve_endpoint(&self, reference: &str) -> Result<Entity<'_>, DanglingReference> {
        if let Some(t) = self.all_timexes().find(|t| t.tid == reference) {
            return Ok(Entity::Timex(t));
        }
        if let Some(e) = self.events.iter().find(|e| e.eiid == reference) {
            return Ok(Entity::Event(e));
        }
        Err(DanglingReference { id: reference.to_string(), link: None })
    }

    /// Resolves both endpoints of a link, respecting the endpoint kind.
    pub fn resolve_link(&self, link: &TemporalLink) -> Result<(Entity<'_>, Entity<'_>), DanglingReference> {
        let lookup = |r: &EntityRef| -> Result<Entity<'_>, DanglingReference> {
            let found = match r {
                EntityRef::Timex(id) => self.all_timexes().find(|t| &t.tid == id).map(Entity::Timex),
                EntityRef::Event(id) => self.events.iter().find(|e| &e.eiid == id).map(Entity::Event),
            };
            found.ok_or_else(|| DanglingReference { id: r.id().to_string(), link: Some(link.lid.clone()) })
        };
        Ok((lookup(&link.source)?, lookup(&link.target)?))
    }

    /// Links that carry a temporal relation (relType other than NONE).
    pub fn relation_links(&self) -> impl Iterator<Item = &TemporalLink> {
        self.links.iter().filter(|l| !l.relation.is_none())
    }

    /// Identifiers of every entity a link may refer to.
    pub fn instance_ids(&self) -> Vec<String> {
        self.entities().map(|e| e.instance_id().to_string()).collect()
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let char_len = self.text.chars().count();

        let tids: Vec<&str> = self.all_timexes().map(|t| t.tid.as_str()).collect();
        let eids: Vec<&str> = self.events.iter().map(|e| e.eid.as_str()).collect();
        let eiids: Vec<&str> = self.events.iter().map(|e| e.eiid.as_str()).collect();
        let lids: Vec<&str> = self.links.iter().map(|l| l.lid.as_str()).collect();
        for (kind, ids) in [("tid", &tids), ("eid", &eids), ("eiid", &eiids), ("lid", &lids)] {
            let mut seen = HashSet::new();
            for id in ids.iter() {
                if !seen.insert(*id) {
                    out.push(Violation::new(IssueCode::DuplicateId, Some(id), format!("duplicate {kind} {id:?}")));
                }
            }
        }
        for id in &eiids {
            if tids.contains(id) {
                out.push(Violation::new(
                    IssueCode::DuplicateId,
                    Some(id),
                    format!("identifier {id:?} names both a timex and an event instance"),
                ));
            }
        }

        for t in self.all_timexes() {
            if t.value.trim().is_empty() {
                out.push(Violation::new(IssueCode::EmptyTimexValue, Some(&t.tid), "TIMEX3 value is empty"));
            }
        }
        for e in &self.events {
            if e.eclass.trim().is_empty() {
                out.push(Violation::new(IssueCode::EmptyEventClass, Some(&e.eid), "EVENT class is empty"));
            }
        }

        let mut spans: Vec<(Span, &str)> = Vec::new();
        let spanned = self
            .timexes
            .iter()
            .map(|t| (t.span, t.tid.as_str(), t.surface.as_str()))
            .chain(std::iter::once((self.dct.span, self.dct.tid.as_str(), self.dct.surface.as_str())))
            .chain(self.events.iter().map(|e| (Some(e.span), e.eid.as_str(), e.surface.as_str())));
        for (span, id, surface) in spanned {
            let Some(span) = span else {
                if id != self.dct.tid {
                    out.push(Violation::new(IssueCode::SpanOutOfBounds, Some(id), "body timex has no span"));
                }
                continue;
            };
            if span.is_empty() || span.end > char_len {
                out.push(Violation::new(
                    IssueCode::SpanOutOfBounds,
                    Some(id),
                    format!("span {span} invalid for text of {char_len} characters"),
                ));
                continue;
            }
            match char_slice(&self.text, span) {
                Some(s) if s == surface => {}
                Some(s) => out.push(Violation::new(
                    IssueCode::SurfaceMismatch,
                    Some(id),
                    format!("surface {surface:?} differs from text {s:?} at {span}"),
                )),
                None => unreachable!("span bounds checked above"),
            }
            spans.push((span, id));
        }
        spans.sort();
        for w in spans.windows(2) {
            if w[0].0.overlaps(&w[1].0) {
                out.push(Violation::new(
                    IssueCode::OverlappingSpans,
                    Some(w[1].1),
                    format!("{} {} overlaps {} {}", w[1].1, w[1].0, w[0].1, w[0].0),
                ));
            }
        }

        for link in &self.links {
            if link.source.id() == link.target.id() {
                out.push(Violation::new(
                    IssueCode::SelfLink,
                    Some(&link.lid),
                    format!("link relates {} to itself", link.source),
                ));
            }
            for endpoint in [&link.source, &link.target] {
                let ok = match endpoint {
                    EntityRef::Timex(id) => tids.contains(&id.as_str()),
                    EntityRef::Event(id) => eiids.contains(&id.as_str()),
                };
                if !ok {
                    out.push(Violation::new(
                        IssueCode::DanglingRef,
                        Some(&link.lid),
                        format!("link {} refers to unknown identifier {}", link.lid, endpoint),
                    ));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> AnnotatedDocument {
        let mut d = AnnotatedDocument::minimal("d1", "2006-11-19", "Russia signed a deal.");
        d.events.push(EventAnnotation {
            eid: "e1".into(),
            eiid: "ei1".into(),
            span: Span::new(7, 13),
            eclass: "OCCURRENCE".into(),
            tense: Some("PAST".into()),
            aspect: None,
            polarity: None,
            modality: None,
            pos: None,
            surface: "signed".into(),
            extras: Extras::new(),
        });
        d.links.push(TemporalLink::new(
            "l1",
            EntityRef::Event("ei1".into()),
            EntityRef::Timex("t0".into()),
            RelationType::Before,
        ));
        d
    }

    #[test]
    fn inverse_pairs() {
        assert_eq!(RelationType::Before.inverse(), Ok(RelationType::After));
        assert_eq!(RelationType::Begins.inverse(), Ok(RelationType::BegunBy));
        assert_eq!(RelationType::Simultaneous.inverse(), Ok(RelationType::Simultaneous));
        assert_eq!(RelationType::During.inverse(), Ok(RelationType::During));
        assert_eq!(RelationType::Identity.inverse(), Ok(RelationType::Identity));
        assert_eq!(RelationType::None.inverse(), Err(NoneRelation));
        for r in RelationType::LABELS {
            assert_eq!(r.inverse().unwrap().inverse().unwrap(), r);
        }
    }

    #[test]
    fn relation_labels_parse_case_insensitively() {
        assert_eq!("is-included".parse::<RelationType>().unwrap(), RelationType::IsIncluded);
        assert_eq!("BEGUN_BY".parse::<RelationType>().unwrap(), RelationType::BegunBy);
        assert_eq!("immediately after".parse::<RelationType>().unwrap(), RelationType::IAfter);
        for r in RelationType::LABELS {
            assert_eq!(r.as_str().parse::<RelationType>().unwrap(), r);
        }
        assert!("OVERLAPS".parse::<RelationType>().is_err());
    }

    #[test]
    fn timex_type_case_insensitive() {
        assert_eq!("duration".parse::<TimexType>().unwrap(), TimexType::Duration);
        assert_eq!(TimexType::Set.to_string(), "SET");
        assert!("period".parse::<TimexType>().is_err());
    }

    #[test]
    fn char_slice_counts_scalar_values() {
        let text = "Zürich – été";
        assert_eq!(char_slice(text, Span::new(0, 6)), Some("Zürich"));
        assert_eq!(char_slice(text, Span::new(9, 12)), Some("été"));
        assert_eq!(char_slice(text, Span::new(9, 13)), None);
        assert_eq!(char_slice(text, Span::new(12, 12)), Some(""));
    }

    #[test]
    fn resolves_endpoints() {
        let d = doc();
        assert_eq!(d.resolve_endpoint("ei1").unwrap().instance_id(), "ei1");
        assert!(matches!(d.resolve_endpoint("t0").unwrap(), Entity::Timex(t) if t.tid == "t0"));
        let err = d.resolve_endpoint("ei99").unwrap_err();
        assert_eq!(err.id, "ei99");
    }

    #[test]
    fn valid_document_passes() {
        assert!(doc().validated().is_ok());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut d = doc();
        let mut e = d.events[0].clone();
        e.span = Span::new(0, 6);
        e.surface = "Russia".into();
        d.events.push(e);
        let err = d.validated().unwrap_err();
        assert!(err.violations.iter().any(|v| v.code == IssueCode::DuplicateId));
    }

    #[test]
    fn dangling_and_self_links_rejected() {
        let mut d = doc();
        d.links.push(TemporalLink::new("l2", EntityRef::Event("ei1".into()), EntityRef::Timex("t9".into()), RelationType::Before));
        d.links.push(TemporalLink::new("l3", EntityRef::Event("ei1".into()), EntityRef::Event("ei1".into()), RelationType::Before));
        let codes: Vec<_> = d.violations().into_iter().map(|v| v.code).collect();
        assert!(codes.contains(&IssueCode::DanglingRef));
        assert!(codes.contains(&IssueCode::SelfLink));
    }

    #[test]
    fn surface_and_overlap_checked() {
        let mut d = doc();
        d.events[0].surface = "sig".into();
        let mut e = d.events[0].clone();
        e.eid = "e2".into();
        e.eiid = "ei2".into();
        e.span = Span::new(10, 15);
        e.surface = "ned a".into();
        d.events.push(e);
        let codes: Vec<_> = d.violations().into_iter().map(|v| v.code).collect();
        assert!(codes.contains(&IssueCode::SurfaceMismatch));
        assert!(codes.contains(&IssueCode::OverlappingSpans));
    }
}
