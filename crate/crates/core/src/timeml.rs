//! Reader, writer and validator for the TempEval-3 TimeML datafile format.
//!
//! A datafile is a `TimeML` element holding `DOCID`, optional `EXTRAINFO`
//! and `TITLE`, a `DCT` wrapping one `TIMEX3`, a `TEXT` element with inline
//! `EVENT`/`TIMEX3` tags, and trailing `TLINK` elements. Inline tags are
//! converted to character spans over the tag-stripped text.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use roxmltree::{Document, Node, ParsingOptions};
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    AnnotatedDocument, EntityRef, EventAnnotation, IssueCode, ModelError, RelationType, Span, TemporalLink,
    TimexAnnotation, TimexType,
};

const XML_DECLARATION: &str = "<?xml version=\"1.0\" ?>";
const ROOT_OPEN: &str = "<TimeML xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
xsi:noNamespaceSchemaLocation=\"http://timeml.org/timeMLdocs/TimeML_1.2.1.xsd\">";

#[derive(Debug, Error)]
pub enum TimemlError {
    #[error("malformed markup at {line}:{column}: {message}")]
    Xml { line: u32, column: u32, message: String },
    #[error("{code} at {line}:{column}: {message}")]
    Structure { code: IssueCode, line: u32, column: u32, message: String, id: Option<String> },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerializeError {
    #[error("{first} {first_span} overlaps {second} {second_span}; inline tags cannot nest")]
    Overlap { first: String, first_span: Span, second: String, second_span: Span },
    #[error("{id} span {span} lies outside the text")]
    OutOfBounds { id: String, span: Span },
}

fn structure(doc: &Document, node: Node, code: IssueCode, message: impl Into<String>, id: Option<&str>) -> TimemlError {
    let pos = doc.text_pos_at(node.range().start);
    TimemlError::Structure { code, line: pos.row, column: pos.col, message: message.into(), id: id.map(str::to_string) }
}

fn attributes(node: Node) -> BTreeMap<String, String> {
    node.attributes().map(|a| (a.name().to_string(), a.value().to_string())).collect()
}

fn text_content(node: Node) -> String {
    node.descendants().filter(|n| n.is_text()).filter_map(|n| n.text()).collect()
}

struct Parser<'a, 'input> {
    doc: &'a Document<'input>,
}

impl<'a, 'input> Parser<'a, 'input> {
    fn required(&self, node: Node, attrs: &mut BTreeMap<String, String>, name: &str) -> Result<String, TimemlError> {
        attrs.remove(name).ok_or_else(|| {
            structure(
                self.doc,
                node,
                IssueCode::MissingAttribute,
                format!("<{}> lacks attribute {name}", node.tag_name().name()),
                None,
            )
        })
    }

    fn timex(&self, node: Node, span: Option<Span>, surface: String) -> Result<TimexAnnotation, TimemlError> {
        let mut attrs = attributes(node);
        let tid = self.required(node, &mut attrs, "tid")?;
        let raw_type = self.required(node, &mut attrs, "type")?;
        let ttype: TimexType = raw_type
            .parse()
            .map_err(|e: crate::model::UnknownLabel| structure(self.doc, node, IssueCode::BadAttribute, e.to_string(), Some(&tid)))?;
        let value = attrs.remove("value").unwrap_or_default();
        let function_in_document = attrs.remove("functionInDocument");
        let temporal_function = match attrs.remove("temporalFunction") {
            None => None,
            Some(v) if v.eq_ignore_ascii_case("true") => Some(true),
            Some(v) if v.eq_ignore_ascii_case("false") => Some(false),
            Some(v) => {
                return Err(structure(
                    self.doc,
                    node,
                    IssueCode::BadAttribute,
                    format!("temporalFunction must be true or false, found {v:?}"),
                    Some(&tid),
                ))
            }
        };
        Ok(TimexAnnotation { tid, span, ttype, value, function_in_document, temporal_function, surface, extras: attrs })
    }

    fn event(&self, node: Node, span: Span, surface: String) -> Result<EventAnnotation, TimemlError> {
        let mut attrs = attributes(node);
        let eid = self.required(node, &mut attrs, "eid")?;
        let eiid = self.required(node, &mut attrs, "eiid")?;
        Ok(EventAnnotation {
            eid,
            eiid,
            span,
            eclass: attrs.remove("class").unwrap_or_default(),
            tense: attrs.remove("tense"),
            aspect: attrs.remove("aspect"),
            polarity: attrs.remove("polarity"),
            modality: attrs.remove("modality"),
            pos: attrs.remove("pos"),
            surface,
            extras: attrs,
        })
    }

    fn tlink(&self, node: Node) -> Result<TemporalLink, TimemlError> {
        let mut attrs = attributes(node);
        let lid = self.required(node, &mut attrs, "lid")?;
        let raw_rel = self.required(node, &mut attrs, "relType")?;
        let relation: RelationType = raw_rel
            .parse()
            .map_err(|e: crate::model::UnknownLabel| structure(self.doc, node, IssueCode::BadAttribute, e.to_string(), Some(&lid)))?;
        let mut endpoint = |event_attr: &str, time_attr: &str| -> Result<EntityRef, TimemlError> {
            match (attrs.remove(event_attr), attrs.remove(time_attr)) {
                (Some(e), None) => Ok(EntityRef::Event(e)),
                (None, Some(t)) => Ok(EntityRef::Timex(t)),
                (Some(_), Some(_)) => Err(structure(
                    self.doc,
                    node,
                    IssueCode::BadAttribute,
                    format!("TLINK {lid} has both {event_attr} and {time_attr}"),
                    Some(&lid),
                )),
                (None, None) => Err(structure(
                    self.doc,
                    node,
                    IssueCode::MissingAttribute,
                    format!("TLINK {lid} needs {event_attr} or {time_attr}"),
                    Some(&lid),
                )),
            }
        };
        let source = endpoint("eventInstanceID", "timeID")?;
        let target = endpoint("relatedToEventInstance", "relatedToTime")?;
        Ok(TemporalLink { lid, source, target, relation, extras: attrs })
    }

    fn body(
        &self,
        node: Node,
        text: &mut String,
        chars: &mut usize,
        inside: Option<Node>,
        timexes: &mut Vec<TimexAnnotation>,
        events: &mut Vec<EventAnnotation>,
    ) -> Result<(), TimemlError> {
        for child in node.children() {
            if let Some(t) = child.text().filter(|_| child.is_text()) {
                text.push_str(t);
                *chars += t.chars().count();
                continue;
            }
            if !child.is_element() {
                continue;
            }
            let name = child.tag_name().name();
            let is_entity = name == "EVENT" || name == "TIMEX3";
            if is_entity {
                if let Some(outer) = inside {
                    return Err(structure(
                        self.doc,
                        child,
                        IssueCode::NestedTag,
                        format!("<{name}> nested inside <{}>", outer.tag_name().name()),
                        None,
                    ));
                }
                let (start, byte_start) = (*chars, text.len());
                self.body(child, text, chars, Some(child), timexes, events)?;
                let span = Span::new(start, *chars);
                let surface = text[byte_start..].to_string();
                if name == "EVENT" {
                    events.push(self.event(child, span, surface)?);
                } else {
                    timexes.push(self.timex(child, Some(span), surface)?);
                }
            } else {
                self.body(child, text, chars, inside, timexes, events)?;
            }
        }
        Ok(())
    }
}

/// Parses one datafile.
pub fn parse_document(raw: &str) -> Result<AnnotatedDocument, TimemlError> {
    let options = ParsingOptions { allow_dtd: true, ..ParsingOptions::default() };
    let doc = Document::parse_with_options(raw, options).map_err(|e| {
        let pos = e.pos();
        TimemlError::Xml { line: pos.row, column: pos.col, message: e.to_string() }
    })?;
    let parser = Parser { doc: &doc };
    let root = doc.root_element();
    if root.tag_name().name() != "TimeML" {
        return Err(structure(
            &doc,
            root,
            IssueCode::BadRoot,
            format!("root element is <{}>, expected <TimeML>", root.tag_name().name()),
            None,
        ));
    }

    let mut doc_id = None;
    let mut extra_info = None;
    let mut title = None;
    let mut dct = None;
    let mut body = None;
    let mut links = Vec::new();

    let once = |present: bool, node: Node| -> Result<(), TimemlError> {
        if present {
            Err(structure(
                &doc,
                node,
                IssueCode::DuplicateElement,
                format!("more than one <{}> element", node.tag_name().name()),
                None,
            ))
        } else {
            Ok(())
        }
    };

    for child in root.children().filter(|n| n.is_element()) {
        match child.tag_name().name() {
            "DOCID" => {
                once(doc_id.is_some(), child)?;
                doc_id = Some(text_content(child).trim().to_string());
            }
            "EXTRAINFO" => {
                once(extra_info.is_some(), child)?;
                extra_info = Some(text_content(child));
            }
            "TITLE" => {
                once(title.is_some(), child)?;
                title = Some(text_content(child));
            }
            "DCT" => {
                once(dct.is_some(), child)?;
                let mut lead = String::new();
                let mut tail = String::new();
                let mut timex = None;
                for part in child.children() {
                    if part.is_element() && part.tag_name().name() == "TIMEX3" {
                        if timex.is_some() {
                            return Err(structure(&doc, part, IssueCode::DuplicateElement, "DCT holds more than one TIMEX3", None));
                        }
                        timex = Some(parser.timex(part, None, text_content(part))?);
                    } else {
                        let t = text_content(part);
                        if timex.is_none() {
                            lead.push_str(&t);
                        } else {
                            tail.push_str(&t);
                        }
                    }
                }
                let timex = timex
                    .ok_or_else(|| structure(&doc, child, IssueCode::MissingDctTimex, "DCT holds no TIMEX3", None))?;
                dct = Some((timex, lead, tail));
            }
            "TEXT" => {
                once(body.is_some(), child)?;
                let (mut text, mut chars) = (String::new(), 0usize);
                let (mut timexes, mut events) = (Vec::new(), Vec::new());
                parser.body(child, &mut text, &mut chars, None, &mut timexes, &mut events)?;
                body = Some((text, timexes, events));
            }
            "TLINK" => links.push(parser.tlink(child)?),
            _ => {}
        }
    }

    let doc_id = doc_id.ok_or_else(|| structure(&doc, root, IssueCode::MissingDocid, "no DOCID element", None))?;
    let (dct, dct_lead, dct_tail) =
        dct.ok_or_else(|| structure(&doc, root, IssueCode::MissingDct, "no DCT element", None))?;
    let (text, timexes, events) =
        body.ok_or_else(|| structure(&doc, root, IssueCode::MissingText, "no TEXT element", None))?;

    Ok(AnnotatedDocument { doc_id, extra_info, title, dct, dct_lead, dct_tail, text, timexes, events, links }.validated()?)
}

fn escape_text(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}

fn escape_attr(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\t' => out.push_str("&#9;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}

/// Attributes are written in ASCII order, known and unknown alike.
fn open_tag(out: &mut String, name: &str, attrs: &BTreeMap<String, String>, self_closing: bool) {
    out.push('<');
    out.push_str(name);
    for (k, v) in attrs {
        out.push(' ');
        out.push_str(k);
        out.push_str("=\"");
        escape_attr(out, v);
        out.push('"');
    }
    out.push_str(if self_closing { "/>" } else { ">" });
}

fn timex_attrs(t: &TimexAnnotation) -> BTreeMap<String, String> {
    let mut attrs = t.extras.clone();
    attrs.insert("tid".into(), t.tid.clone());
    attrs.insert("type".into(), t.ttype.to_string());
    attrs.insert("value".into(), t.value.clone());
    if let Some(f) = &t.function_in_document {
        attrs.insert("functionInDocument".into(), f.clone());
    }
    if let Some(tf) = t.temporal_function {
        attrs.insert("temporalFunction".into(), tf.to_string());
    }
    attrs
}

fn event_attrs(e: &EventAnnotation) -> BTreeMap<String, String> {
    let mut attrs = e.extras.clone();
    attrs.insert("eid".into(), e.eid.clone());
    attrs.insert("eiid".into(), e.eiid.clone());
    attrs.insert("class".into(), e.eclass.clone());
    for (k, v) in [("tense", &e.tense), ("aspect", &e.aspect), ("polarity", &e.polarity), ("modality", &e.modality), ("pos", &e.pos)] {
        if let Some(v) = v {
            attrs.insert(k.into(), v.clone());
        }
    }
    attrs
}

fn link_attrs(l: &TemporalLink) -> BTreeMap<String, String> {
    let mut attrs = l.extras.clone();
    attrs.insert("lid".into(), l.lid.clone());
    attrs.insert("relType".into(), l.relation.to_string());
    let (k, v) = match &l.source {
        EntityRef::Event(id) => ("eventInstanceID", id),
        EntityRef::Timex(id) => ("timeID", id),
    };
    attrs.insert(k.into(), v.clone());
    let (k, v) = match &l.target {
        EntityRef::Event(id) => ("relatedToEventInstance", id),
        EntityRef::Timex(id) => ("relatedToTime", id),
    };
    attrs.insert(k.into(), v.clone());
    attrs
}

enum Inline<'a> {
    Timex(&'a TimexAnnotation),
    Event(&'a EventAnnotation),
}

/// Writes a document in datafile form. Header elements follow the order of
/// the published example: DOCID, DCT, TITLE, EXTRAINFO, TEXT, then TLINKs.
pub fn serialize_document(doc: &AnnotatedDocument) -> Result<String, SerializeError> {
    let mut inline: Vec<(Span, String, Inline)> = Vec::new();
    for t in &doc.timexes {
        let span = t.span.ok_or(SerializeError::OutOfBounds { id: t.tid.clone(), span: Span::new(0, 0) })?;
        inline.push((span, t.tid.clone(), Inline::Timex(t)));
    }
    for e in &doc.events {
        inline.push((e.span, e.eid.clone(), Inline::Event(e)));
    }
    inline.sort_by_key(|(span, _, _)| *span);
    for w in inline.windows(2) {
        if w[0].0.overlaps(&w[1].0) || w[0].0 == w[1].0 {
            return Err(SerializeError::Overlap {
                first: w[0].1.clone(),
                first_span: w[0].0,
                second: w[1].1.clone(),
                second_span: w[1].0,
            });
        }
    }

    let chars: Vec<char> = doc.text.chars().collect();
    for (span, id, _) in &inline {
        if span.is_empty() || span.end > chars.len() {
            return Err(SerializeError::OutOfBounds { id: id.clone(), span: *span });
        }
    }

    let mut out = String::with_capacity(doc.text.len() * 2 + 512);
    out.push_str(XML_DECLARATION);
    out.push('\n');
    out.push_str(ROOT_OPEN);
    out.push_str("\n\n<DOCID>");
    escape_text(&mut out, &doc.doc_id);
    out.push_str("</DOCID>\n\n<DCT>");
    escape_text(&mut out, &doc.dct_lead);
    open_tag(&mut out, "TIMEX3", &timex_attrs(&doc.dct), false);
    escape_text(&mut out, &doc.dct.surface);
    out.push_str("</TIMEX3>");
    escape_text(&mut out, &doc.dct_tail);
    out.push_str("</DCT>\n\n");
    if let Some(title) = &doc.title {
        out.push_str("<TITLE>");
        escape_text(&mut out, title);
        out.push_str("</TITLE>\n\n");
    }
    if let Some(extra) = &doc.extra_info {
        out.push_str("<EXTRAINFO>");
        escape_text(&mut out, extra);
        out.push_str("</EXTRAINFO>\n\n");
    }

    out.push_str("<TEXT>");
    let mut cursor = 0;
    let push_chars = |out: &mut String, from: usize, to: usize| {
        let s: String = chars[from..to].iter().collect();
        escape_text(out, &s);
    };
    for (span, _, entity) in &inline {
        push_chars(&mut out, cursor, span.start);
        let name = match entity {
            Inline::Timex(t) => {
                open_tag(&mut out, "TIMEX3", &timex_attrs(t), false);
                "TIMEX3"
            }
            Inline::Event(e) => {
                open_tag(&mut out, "EVENT", &event_attrs(e), false);
                "EVENT"
            }
        };
        push_chars(&mut out, span.start, span.end);
        let _ = write!(out, "</{name}>");
        cursor = span.end;
    }
    push_chars(&mut out, cursor, chars.len());
    out.push_str("</TEXT>\n\n");

    for link in &doc.links {
        open_tag(&mut out, "TLINK", &link_attrs(link), true);
        out.push_str("\n\n");
    }
    out.push_str("</TimeML>\n");
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Location {
    pub doc_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            Some(id) => write!(f, "{}:{}", self.doc_id, id),
            None => f.write_str(&self.doc_id),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub code: IssueCode,
    pub message: String,
    pub location: Location,
}

impl fmt::Display for ValidationIssue {
    /// `SEVERITY CODE doc_id[:id] message`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.severity, self.code, self.location, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Model invariants and value shapes.
    Structural,
    /// Structural checks plus corpus-review warnings.
    Gold,
}

fn timex_value_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| {
        let date = r"(?:[0-9X]{2,4}(?:-(?:[0-9X]{2}(?:-[0-9X]{2})?|W[0-9X]{2}(?:-(?:[1-7X]|WE))?|SP|SU|FA|WI|Q[1-4X]|H[12X]))?)";
        let clock = r"(?:T(?:[0-9X]{2}(?::[0-9X]{2}(?::[0-9X]{2}(?:\.[0-9]+)?)?)?|MO|MI|AF|EV|NI|DT)(?:Z|[+-][0-9]{2}(?::?[0-9]{2})?)?)";
        let duration = r"(?:P(?:(?:[0-9]+(?:\.[0-9]+)?|X+)(?:Y|M|W|D|DE|CE|ML|Q|H|WE|FA|SU|SP|WI))+(?:T(?:(?:[0-9]+(?:\.[0-9]+)?|X+)[HMS])+)?|PT(?:(?:[0-9]+(?:\.[0-9]+)?|X+)[HMS])+)";
        let reference = r"(?:PRESENT_REF|PAST_REF|FUTURE_REF)";
        Regex::new(&format!("^(?:{date}{clock}?|{clock}|{duration}|{reference})$")).expect("valid pattern")
    })
}

/// Whether a VAL has one of the ISO-8601-style shapes TIMEX3 uses (date,
/// time, duration, set, reference). Content is not normalized.
pub fn is_timex_value_shaped(value: &str) -> bool {
    timex_value_pattern().is_match(value.trim())
}

fn identifier_shaped(id: &str, prefix: &str) -> bool {
    id.strip_prefix(prefix).is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

pub fn validate_document(doc: &AnnotatedDocument, profile: Profile) -> Vec<ValidationIssue> {
    let issue = |severity, code, id: Option<&str>, message: String| ValidationIssue {
        severity,
        code,
        message,
        location: Location { doc_id: doc.doc_id.clone(), id: id.map(str::to_string) },
    };
    let mut out: Vec<ValidationIssue> = doc
        .violations()
        .into_iter()
        .map(|v| issue(Severity::Error, v.code, v.id.as_deref(), v.message))
        .collect();

    if doc.doc_id.trim().is_empty() {
        out.push(issue(Severity::Error, IssueCode::MissingDocid, None, "DOCID is empty".into()));
    }
    if doc.dct.function_in_document.as_deref() != Some("CREATION_TIME") {
        out.push(issue(
            Severity::Warning,
            IssueCode::DctNotCreationTime,
            Some(&doc.dct.tid),
            "DCT timex does not have functionInDocument=\"CREATION_TIME\"".into(),
        ));
    }

    let mut shapes = Vec::new();
    for t in doc.all_timexes() {
        shapes.push((t.tid.as_str(), "t"));
        if !t.value.trim().is_empty() && !is_timex_value_shaped(&t.value) {
            out.push(issue(
                Severity::Warning,
                IssueCode::BadTimexValueShape,
                Some(&t.tid),
                format!("value {:?} is not ISO-8601 shaped", t.value),
            ));
        }
    }
    for e in &doc.events {
        shapes.push((e.eid.as_str(), "e"));
        shapes.push((e.eiid.as_str(), "ei"));
    }
    for l in &doc.links {
        shapes.push((l.lid.as_str(), "l"));
    }
    for (id, prefix) in shapes {
        if !identifier_shaped(id, prefix) {
            out.push(issue(
                Severity::Warning,
                IssueCode::BadIdentifierShape,
                Some(id),
                format!("identifier {id:?} does not match {prefix}<digits>"),
            ));
        }
    }

    if profile == Profile::Gold {
        let dct = doc.dct.tid.as_str();
        for e in &doc.events {
            let linked = doc.links.iter().any(|l| {
                (l.source.id() == e.eiid && l.target.id() == dct) || (l.target.id() == e.eiid && l.source.id() == dct)
            });
            if !linked {
                out.push(issue(
                    Severity::Warning,
                    IssueCode::EventMissingDctLink,
                    Some(&e.eiid),
                    format!("event instance {} has no link to the document creation time {dct}", e.eiid),
                ));
            }
        }
    }
    out
}

/// Parses and validates raw datafile text. Parse failures become issues
/// located at `fallback_id` (usually the file name).
pub fn validate_source(raw: &str, fallback_id: &str, profile: Profile) -> Vec<ValidationIssue> {
    match parse_document(raw) {
        Ok(doc) => validate_document(&doc, profile),
        Err(err) => issues_from_error(&err, fallback_id),
    }
}

pub fn issues_from_error(err: &TimemlError, fallback_id: &str) -> Vec<ValidationIssue> {
    let at = |id: Option<&str>| Location { doc_id: fallback_id.to_string(), id: id.map(str::to_string) };
    match err {
        TimemlError::Xml { .. } => vec![ValidationIssue {
            severity: Severity::Error,
            code: IssueCode::MalformedXml,
            message: err.to_string(),
            location: at(None),
        }],
        TimemlError::Structure { code, line, column, message, id } => vec![ValidationIssue {
            severity: Severity::Error,
            code: *code,
            message: format!("{message} (line {line}, column {column})"),
            location: at(id.as_deref()),
        }],
        TimemlError::Model(m) => m
            .violations
            .iter()
            .map(|v| ValidationIssue {
                severity: Severity::Error,
                code: v.code,
                message: v.message.clone(),
                location: Location { doc_id: m.doc_id.clone(), id: v.id.clone() },
            })
            .collect(),
        TimemlError::Io { .. } => vec![ValidationIssue {
            severity: Severity::Error,
            code: IssueCode::MalformedXml,
            message: err.to_string(),
            location: at(None),
        }],
    }
}

pub fn read_document(path: &Path) -> Result<AnnotatedDocument, TimemlError> {
    let raw = fs::read_to_string(path).map_err(|source| TimemlError::Io { path: path.to_path_buf(), source })?;
    parse_document(&raw)
}

/// `*.tml` files in a directory, sorted by file name.
pub fn list_tml_files(dir: &Path, recursive: bool) -> Result<Vec<PathBuf>, TimemlError> {
    let io = |source| TimemlError::Io { path: dir.to_path_buf(), source };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_dir() {
            if recursive {
                files.extend(list_tml_files(&path, true)?);
            }
        } else if path.extension().is_some_and(|e| e == "tml") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

#[derive(Debug)]
pub struct LoadedDocument {
    pub path: PathBuf,
    pub document: AnnotatedDocument,
}

#[derive(Debug)]
pub struct LoadFailure {
    pub path: PathBuf,
    pub error: TimemlError,
}

#[derive(Debug, Default)]
pub struct Corpus {
    pub documents: Vec<LoadedDocument>,
    pub failures: Vec<LoadFailure>,
    pub warnings: Vec<String>,
}

/// Parses every `.tml` file under `dir` in file-name order. Files that fail
/// to parse are recorded in `failures` without aborting the batch.
pub fn load_corpus(dir: &Path, recursive: bool) -> Result<Corpus, TimemlError> {
    let files = list_tml_files(dir, recursive)?;
    let mut corpus = Corpus::default();
    if files.is_empty() {
        corpus.warnings.push(format!("{}: no .tml files", dir.display()));
    }
    let parsed: Vec<(PathBuf, Result<AnnotatedDocument, TimemlError>)> =
        files.into_par_iter().map(|p| { let r = read_document(&p); (p, r) }).collect();
    for (path, result) in parsed {
        match result {
            Ok(document) => corpus.documents.push(LoadedDocument { path, document }),
            Err(error) => corpus.failures.push(LoadFailure { path, error }),
        }
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Extras;

    const MINIMAL: &str = r#"<?xml version="1.0" ?>
<TimeML>
<DOCID>min</DOCID>
<DCT><TIMEX3 tid="t0" type="DATE" value="2012-01-01" functionInDocument="CREATION_TIME">2012-01-01</TIMEX3></DCT>
<TEXT></TEXT>
</TimeML>"#;

    #[test]
    fn minimal_document() {
        let doc = parse_document(MINIMAL).unwrap();
        assert_eq!(doc.doc_id, "min");
        assert!(doc.timexes.is_empty() && doc.events.is_empty() && doc.links.is_empty());
        let out = serialize_document(&doc).unwrap();
        assert_eq!(out.matches("<DCT>").count(), 1);
        assert_eq!(out.matches("<TEXT>").count(), 1);
        assert_eq!(parse_document(&out).unwrap(), doc);
    }

    #[test]
    fn missing_parts_are_structural_errors() {
        let no_docid = MINIMAL.replace("<DOCID>min</DOCID>", "");
        assert!(matches!(parse_document(&no_docid), Err(TimemlError::Structure { code: IssueCode::MissingDocid, .. })));
        let no_text = MINIMAL.replace("<TEXT></TEXT>", "");
        assert!(matches!(parse_document(&no_text), Err(TimemlError::Structure { code: IssueCode::MissingText, .. })));
        let no_dct = MINIMAL.replace("<DCT>", "<X>").replace("</DCT>", "</X>");
        assert!(matches!(parse_document(&no_dct), Err(TimemlError::Structure { code: IssueCode::MissingDct, .. })));
    }

    #[test]
    fn malformed_markup_reports_position() {
        let broken = MINIMAL.replace("</TEXT>", "</TXT>");
        match parse_document(&broken) {
            Err(TimemlError::Xml { line, .. }) => assert!(line >= 5),
            other => panic!("expected xml error, got {other:?}"),
        }
    }

    #[test]
    fn nested_entities_rejected() {
        let nested = MINIMAL.replace(
            "<TEXT></TEXT>",
            r#"<TEXT><TIMEX3 tid="t1" type="DATE" value="2012"><EVENT eid="e1" eiid="ei1" class="STATE">x</EVENT></TIMEX3></TEXT>"#,
        );
        assert!(matches!(parse_document(&nested), Err(TimemlError::Structure { code: IssueCode::NestedTag, .. })));
    }

    #[test]
    fn entities_and_escapes_count_as_single_characters() {
        let doc_src = MINIMAL.replace(
            "<TEXT></TEXT>",
            r#"<TEXT>A&amp;B café <EVENT eid="e1" eiid="ei1" class="OCCURRENCE" foo="bar">rose</EVENT> &lt;x&gt;</TEXT>"#,
        );
        let doc = parse_document(&doc_src).unwrap();
        assert_eq!(doc.text, "A&B café rose <x>");
        assert_eq!(doc.events[0].span, Span::new(9, 13));
        assert_eq!(doc.events[0].extras.get("foo").map(String::as_str), Some("bar"));
        let again = parse_document(&serialize_document(&doc).unwrap()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn tlink_endpoint_attributes() {
        let with = |attrs: &str| {
            MINIMAL.replace(
                "</TimeML>",
                &format!(r#"<TLINK lid="l1" relType="BEFORE" {attrs}/></TimeML>"#),
            )
        };
        let doc = parse_document(&with(r#"timeID="t0" relatedToTime="t0""#));
        // self link is a model error
        assert!(matches!(doc, Err(TimemlError::Model(_))));
        let both = with(r#"timeID="t0" eventInstanceID="ei1" relatedToTime="t0""#);
        assert!(matches!(parse_document(&both), Err(TimemlError::Structure { code: IssueCode::BadAttribute, .. })));
        let neither = with(r#"relatedToTime="t0""#);
        assert!(matches!(parse_document(&neither), Err(TimemlError::Structure { code: IssueCode::MissingAttribute, .. })));
        let bad_rel = MINIMAL.replace(
            "</TimeML>",
            r#"<TLINK lid="l1" relType="OVERLAP" timeID="t0" relatedToTime="t0"/></TimeML>"#,
        );
        assert!(matches!(parse_document(&bad_rel), Err(TimemlError::Structure { code: IssueCode::BadAttribute, .. })));
    }

    #[test]
    fn overlapping_spans_cannot_serialize() {
        let mut doc = AnnotatedDocument::minimal("d", "2012-01-01", "abcdefghij");
        for (i, (s, e)) in [(0, 6), (3, 9)].into_iter().enumerate() {
            doc.events.push(EventAnnotation {
                eid: format!("e{}", i + 1),
                eiid: format!("ei{}", i + 1),
                span: Span::new(s, e),
                eclass: "OCCURRENCE".into(),
                tense: None,
                aspect: None,
                polarity: None,
                modality: None,
                pos: None,
                surface: doc.text[s..e].to_string(),
                extras: Extras::new(),
            });
        }
        assert!(matches!(serialize_document(&doc), Err(SerializeError::Overlap { .. })));
    }

    #[test]
    fn value_shapes() {
        for ok in [
            "2006-11-19",
            "2006",
            "199X",
            "XXXX-XX-XX",
            "2006-W12",
            "2006-W12-WE",
            "2006-Q3",
            "2006-SU",
            "2006-11-19T10:30",
            "2006-11-19TEV",
            "T14:00:00Z",
            "P3D",
            "PT2H30M",
            "P1Y2M",
            "PXY",
            "PRESENT_REF",
            "XXXX-WXX-1",
        ] {
            assert!(is_timex_value_shaped(ok), "{ok}");
        }
        for bad in ["next week", "", "P", "2006-13-1x1", "yesterday"] {
            assert!(!is_timex_value_shaped(bad), "{bad}");
        }
    }

    #[test]
    fn value_shape_warning() {
        let mut doc = AnnotatedDocument::minimal("d", "2012-01-01", "see you next week");
        doc.timexes.push(TimexAnnotation {
            tid: "t1".into(),
            span: Some(Span::new(8, 17)),
            ttype: TimexType::Date,
            value: "next week".into(),
            function_in_document: None,
            temporal_function: None,
            surface: "next week".into(),
            extras: Extras::new(),
        });
        let issues = validate_document(&doc, Profile::Structural);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].code, IssueCode::BadTimexValueShape);
        assert_eq!(issues[0].severity, Severity::Warning);
        assert_eq!(issues[0].to_string(), "WARNING BAD_TIMEX_VALUE_SHAPE d:t1 value \"next week\" is not ISO-8601 shaped");
    }

    #[test]
    fn clean_document_has_no_issues() {
        let doc = parse_document(MINIMAL).unwrap();
        assert!(validate_document(&doc, Profile::Gold).is_empty());
    }

    #[test]
    fn source_validation_maps_errors() {
        let issues = validate_source("<TimeML><DCT/>", "f.tml", Profile::Structural);
        assert_eq!(issues[0].code, IssueCode::MalformedXml);
        let no_docid = MINIMAL.replace("<DOCID>min</DOCID>", "");
        let issues = validate_source(&no_docid, "f.tml", Profile::Structural);
        assert_eq!(issues[0].code, IssueCode::MissingDocid);
        assert_eq!(issues[0].location.doc_id, "f.tml");
    }
}
