//! Corpus size statistics.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::model::{AnnotatedDocument, RelationType};
use crate::timeml::{self, TimemlError};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub documents: usize,
    /// Whitespace-separated tokens of TITLE and TEXT.
    pub tokens: usize,
    /// Timexes inside TEXT; the DCT is counted separately.
    pub timexes: usize,
    pub dcts: usize,
    pub events: usize,
    pub links: usize,
    pub relations: BTreeMap<String, usize>,
}

pub fn token_count(text: &str) -> usize {
    text.split_whitespace().count()
}

impl CorpusStats {
    pub fn add_document(&mut self, doc: &AnnotatedDocument) {
        self.documents += 1;
        self.tokens += token_count(&doc.text) + doc.title.as_deref().map_or(0, token_count);
        self.timexes += doc.timexes.len();
        self.dcts += 1;
        self.events += doc.events.len();
        self.links += doc.links.len();
        for link in &doc.links {
            *self.relations.entry(link.relation.as_str().to_string()).or_default() += 1;
        }
    }

    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a AnnotatedDocument>) -> Self {
        let mut stats = CorpusStats::default();
        for d in docs {
            stats.add_document(d);
        }
        stats
    }

    pub fn relation_count(&self, relation: RelationType) -> usize {
        self.relations.get(relation.as_str()).copied().unwrap_or(0)
    }
}

/// Statistics for the documents that loaded; files that failed to parse are
/// returned alongside.
pub fn corpus_stats(dir: &Path, recursive: bool) -> Result<(CorpusStats, timeml::Corpus), TimemlError> {
    let corpus = timeml::load_corpus(dir, recursive)?;
    let stats = CorpusStats::from_documents(corpus.documents.iter().map(|d| &d.document));
    Ok((stats, corpus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EntityRef, TemporalLink};

    #[test]
    fn counts() {
        let mut d = AnnotatedDocument::minimal("d", "2010-01-01", "  one two\nthree  ");
        d.title = Some("A title".into());
        d.links.push(TemporalLink::new("l1", EntityRef::Timex("t0".into()), EntityRef::Timex("t0".into()), RelationType::None));
        let s = CorpusStats::from_documents([&d, &d]);
        assert_eq!(s.documents, 2);
        assert_eq!(s.tokens, 10);
        assert_eq!(s.dcts, 2);
        assert_eq!(s.links, 2);
        assert_eq!(s.relation_count(RelationType::None), 2);
    }
}
