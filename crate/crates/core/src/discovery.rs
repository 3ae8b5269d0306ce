//! Feature search, faceted filters and the landscape grid.
//!
//! The inverted index is derived data: it is rebuilt from the entries on
//! every open and updated inside the write transaction that changes an
//! entry, so readers always see an index consistent with their snapshot.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifecycle::LifecycleState;
use crate::taxonomy::{CategoryFilter, Scope};
use crate::vault::{Entry, EntryFilter, EntryId, Vault, VaultState};

/// Lowercase alphanumeric words; everything else separates.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchQuery {
    #[serde(default)]
    pub terms: Vec<String>,
    #[serde(default)]
    pub category: Option<CategoryFilter>,
    #[serde(default)]
    pub layer: Option<String>,
    #[serde(default)]
    pub state: Option<LifecycleState>,
    /// Keyword tags the entry must carry, compared exactly.
    #[serde(default)]
    pub keywords: Vec<String>,
}

impl SearchQuery {
    /// A query whose terms are the tokens of `text`.
    pub fn text(text: &str) -> Self {
        Self {
            terms: tokenize(text).collect(),
            ..Self::default()
        }
    }

    /// Distinct normalized terms.
    pub fn normalized_terms(&self) -> BTreeSet<String> {
        self.terms.iter().flat_map(|t| tokenize(t)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.normalized_terms().is_empty()
            && self.category.is_none()
            && self.layer.is_none()
            && self.state.is_none()
            && self.keywords.is_empty()
    }

    fn filter(&self) -> EntryFilter {
        EntryFilter {
            category: self.category,
            layer: self.layer.clone(),
            state: self.state,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub entry: EntryId,
    pub score: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
struct IndexedDoc {
    text: BTreeSet<String>,
    keywords: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchIndex {
    docs: BTreeMap<EntryId, IndexedDoc>,
    postings: BTreeMap<String, BTreeSet<EntryId>>,
}

impl SearchIndex {
    pub fn build(state: &VaultState) -> Self {
        let mut index = Self::default();
        for entry in state.entries.values() {
            index.reindex(entry);
        }
        index
    }

    /// Replaces the postings of one entry.
    pub fn reindex(&mut self, entry: &Entry) {
        let id = &entry.master.id;
        if let Some(old) = self.docs.remove(id) {
            for token in old.text.iter().chain(&old.keywords) {
                if let Some(ids) = self.postings.get_mut(token) {
                    ids.remove(id);
                    if ids.is_empty() {
                        self.postings.remove(token);
                    }
                }
            }
        }
        let master = &entry.master;
        let doc = IndexedDoc {
            text: tokenize(&master.title)
                .chain(tokenize(&master.abstract_text))
                .collect(),
            keywords: master.keywords.iter().flat_map(|k| tokenize(k)).collect(),
        };
        for token in doc.text.iter().chain(&doc.keywords) {
            self.postings
                .entry(token.clone())
                .or_default()
                .insert(id.clone());
        }
        self.docs.insert(id.clone(), doc);
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    fn score(&self, id: &EntryId, terms: &BTreeSet<String>) -> u32 {
        let Some(doc) = self.docs.get(id) else {
            return 0;
        };
        terms
            .iter()
            .map(|t| {
                if doc.keywords.contains(t) {
                    2
                } else if doc.text.contains(t) {
                    1
                } else {
                    0
                }
            })
            .sum()
    }
}

impl VaultState {
    /// Entries matching every filter and, when terms are given, at least
    /// one term; best score first, then the most recent status change,
    /// then ascending id.
    pub fn search(&self, query: &SearchQuery) -> Result<Vec<SearchHit>> {
        if query.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let terms = query.normalized_terms();
        let candidates: BTreeSet<&EntryId> = if terms.is_empty() {
            self.entries.keys().collect()
        } else {
            terms
                .iter()
                .filter_map(|t| self.index.postings.get(t))
                .flatten()
                .collect()
        };

        let filter = query.filter();
        let mut ranked: Vec<(u32, Option<DateTime<Utc>>, &EntryId)> = candidates
            .into_iter()
            .filter_map(|id| {
                let entry = self.entries.get(id)?;
                let keywords_ok = query
                    .keywords
                    .iter()
                    .all(|k| entry.master.keywords.contains(k));
                (keywords_ok && filter.matches(entry))
                    .then(|| (self.index.score(id, &terms), entry.last_status_change(), id))
            })
            .collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(b.2)));
        Ok(ranked
            .into_iter()
            .map(|(score, _, id)| SearchHit {
                entry: id.clone(),
                score,
            })
            .collect())
    }

    pub fn overview_grid(&self) -> GridView {
        let rows = self.config.layers.clone();
        let columns = Scope::ALL.to_vec();
        let mut cells = vec![vec![0usize; columns.len()]; rows.len()];
        for entry in self.entries.values() {
            if entry.is_invalid_only() {
                continue;
            }
            let row = rows
                .iter()
                .position(|l| l.eq_ignore_ascii_case(&entry.master.layer));
            let col = columns
                .iter()
                .position(|s| *s == entry.master.category.scope);
            if let (Some(r), Some(c)) = (row, col) {
                cells[r][c] += 1;
            }
        }
        GridView {
            rows,
            columns,
            cells,
        }
    }
}

/// Entry counts per (layer, category scope). Zero cells are kept: they show
/// the open areas of the library.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridView {
    pub rows: Vec<String>,
    pub columns: Vec<Scope>,
    /// `cells[row][column]`.
    pub cells: Vec<Vec<usize>>,
}

impl GridView {
    pub fn cell(&self, layer: &str, scope: Scope) -> Option<usize> {
        let r = self
            .rows
            .iter()
            .position(|l| l.eq_ignore_ascii_case(layer))?;
        let c = self.columns.iter().position(|s| *s == scope)?;
        Some(self.cells[r][c])
    }

    pub fn total(&self) -> usize {
        self.cells.iter().flatten().sum()
    }
}

impl Vault {
    pub fn search(&self, query: &SearchQuery) -> Result<Vec<SearchHit>> {
        self.snapshot().search(query)
    }

    pub fn overview_grid(&self) -> GridView {
        self.snapshot().overview_grid()
    }

    /// Keywords outside the configured vocabulary. An empty vocabulary
    /// accepts everything.
    pub fn keyword_warnings<'a>(
        &self,
        keywords: impl IntoIterator<Item = &'a String>,
    ) -> Vec<String> {
        self.snapshot().config.unknown_keywords(keywords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_splits_and_lowercases() {
        let tokens: Vec<_> = tokenize("Incident-Management, ÄRGER v2").collect();
        assert_eq!(tokens, ["incident", "management", "ärger", "v2"]);
    }

    #[test]
    fn empty_query_detected() {
        assert!(SearchQuery::default().is_empty());
        assert!(SearchQuery::text(" -- ").is_empty());
        assert!(!SearchQuery::text("x").is_empty());
        let q = SearchQuery {
            layer: Some("Business".into()),
            ..SearchQuery::default()
        };
        assert!(!q.is_empty());
    }
}
