//! TSV ingestion of entity and relation extraction files.
//!
//! Both files carry a mandatory header row. Bad data rows are logged and
//! skipped; only I/O failures and a malformed header abort a load. Entity ids
//! and relation endpoints are lowercased on the way in, so the graph only
//! ever holds canonical lowercase ids.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use crate::graph::{
    Entity, EntityType, GraphBuilder, GraphError, Insert, KnowledgeGraph, Relation,
};

pub const ENTITY_HEADER: &str = "id\tname\ttype";
pub const RELATION_HEADER: &str = "src_id\tdst_id\trel_type\tdoc_id";

/// Separator between document ids inside a single `doc_id` cell.
pub const DOC_SEPARATOR: char = ';';

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Open { path: String, source: io::Error },
    #[error("read error in {file} input: {source}")]
    Io { file: Source, source: io::Error },
    #[error("malformed {file} header: expected {expected:?}, found {found:?}")]
    MalformedHeader {
        file: Source,
        expected: &'static str,
        found: String,
    },
    #[error("malformed GraphML: {0}")]
    GraphMl(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Entities,
    Relations,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Entities => "entities",
            Source::Relations => "relations",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub source: Source,
    /// 1-based; the header is line 1.
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.source, self.line, self.reason)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub entity_rows: usize,
    pub relation_rows: usize,
    pub entities_loaded: usize,
    pub relations_loaded: usize,
    pub duplicates_merged: usize,
    pub rows_rejected: usize,
    pub rejection_log: Vec<Rejection>,
}

impl IngestReport {
    pub fn rejected_from(&self, source: Source) -> usize {
        self.rejection_log
            .iter()
            .filter(|r| r.source == source)
            .count()
    }

    fn reject(&mut self, source: Source, line: usize, reason: impl Into<String>) {
        self.rows_rejected += 1;
        self.rejection_log.push(Rejection {
            source,
            line,
            reason: reason.into(),
        });
    }
}

/// A parsed value tagged with the line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row<T> {
    pub line: usize,
    pub value: T,
}

#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub rows: Vec<Row<T>>,
    pub report: IngestReport,
}

impl<T> Parsed<T> {
    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.rows.iter().map(|r| &r.value)
    }
}

/// Yields `(line_number, line)` for every non-blank data line after
/// checking the header.
fn data_lines<R: BufRead>(
    reader: R,
    source: Source,
    expected: &'static str,
) -> Result<Vec<(usize, String)>, IngestError> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| IngestError::Io {
            file: source,
            source: e,
        })?,
        None => String::new(),
    };
    let header = header.strip_prefix('\u{feff}').unwrap_or(&header);
    if header.trim_end_matches('\r') != expected {
        return Err(IngestError::MalformedHeader {
            file: source,
            expected,
            found: header.to_string(),
        });
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut line = line.map_err(|e| IngestError::Io {
            file: source,
            source: e,
        })?;
        if line.ends_with('\r') {
            line.pop();
        }
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 2, line));
    }
    Ok(out)
}

fn canonical_id(raw: &str) -> String {
    raw.trim().to_lowercase()
}

pub fn parse_entities<R: BufRead>(reader: R) -> Result<Parsed<Entity>, IngestError> {
    let mut report = IngestReport::default();
    let mut rows = Vec::new();
    for (line, text) in data_lines(reader, Source::Entities, ENTITY_HEADER)? {
        report.entity_rows += 1;
        let cols: Vec<&str> = text.split('\t').collect();
        if cols.len() != 3 {
            report.reject(
                Source::Entities,
                line,
                format!("expected 3 columns, found {}", cols.len()),
            );
            continue;
        }
        let parsed = cols[2]
            .trim()
            .parse::<EntityType>()
            .and_then(|t| Entity::new(canonical_id(cols[0]), cols[1], t));
        match parsed {
            Ok(e) => {
                report.entities_loaded += 1;
                rows.push(Row { line, value: e });
            }
            Err(e) => report.reject(Source::Entities, line, e.to_string()),
        }
    }
    Ok(Parsed { rows, report })
}

pub fn parse_relations<R: BufRead>(reader: R) -> Result<Parsed<Relation>, IngestError> {
    let mut report = IngestReport::default();
    let mut rows = Vec::new();
    for (line, text) in data_lines(reader, Source::Relations, RELATION_HEADER)? {
        report.relation_rows += 1;
        let cols: Vec<&str> = text.split('\t').collect();
        if cols.len() != 4 {
            report.reject(
                Source::Relations,
                line,
                format!("expected 4 columns, found {}", cols.len()),
            );
            continue;
        }
        let docs = cols[3]
            .split(DOC_SEPARATOR)
            .map(str::trim)
            .filter(|d| !d.is_empty());
        let rtype = cols[2].trim().to_uppercase();
        match Relation::new(canonical_id(cols[0]), canonical_id(cols[1]), rtype, docs) {
            Ok(r) => {
                report.relations_loaded += 1;
                rows.push(Row { line, value: r });
            }
            Err(e) => report.reject(Source::Relations, line, e.to_string()),
        }
    }
    Ok(Parsed { rows, report })
}

/// Parse both files, insert into a builder and freeze.
///
/// Relations whose endpoints were rejected or never declared are themselves
/// rejected with their line number.
pub fn load_graph<E: BufRead, R: BufRead>(
    entities: E,
    relations: R,
) -> Result<(KnowledgeGraph, IngestReport), IngestError> {
    let ents = parse_entities(entities)?;
    let rels = parse_relations(relations)?;

    let mut report = IngestReport {
        entity_rows: ents.report.entity_rows,
        relation_rows: rels.report.relation_rows,
        ..IngestReport::default()
    };
    for r in ents
        .report
        .rejection_log
        .into_iter()
        .chain(rels.report.rejection_log)
    {
        report.reject(r.source, r.line, r.reason);
    }

    let mut builder = GraphBuilder::new();
    for Row { line, value } in ents.rows {
        record(
            &mut report,
            Source::Entities,
            line,
            builder.add_entity(value),
        );
    }
    for Row { line, value } in rels.rows {
        record(
            &mut report,
            Source::Relations,
            line,
            builder.add_relation(value),
        );
    }
    report.rejection_log.sort_by_key(|r| (r.source, r.line));
    Ok((builder.freeze(), report))
}

fn record(
    report: &mut IngestReport,
    source: Source,
    line: usize,
    outcome: Result<Insert, GraphError>,
) {
    match outcome {
        Ok(insert) => {
            match source {
                Source::Entities => report.entities_loaded += 1,
                Source::Relations => report.relations_loaded += 1,
            }
            if insert == Insert::Merged {
                report.duplicates_merged += 1;
            }
        }
        Err(e) => report.reject(source, line, e.to_string()),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| IngestError::Open {
            path: path.display().to_string(),
            source: e,
        })
}

pub fn load_graph_files(
    entities: &Path,
    relations: &Path,
) -> Result<(KnowledgeGraph, IngestReport), IngestError> {
    load_graph(open(entities)?, open(relations)?)
}

/// Rebuild a graph from GraphML produced by [`crate::export::to_graphml`].
///
/// Every relation type listed on an edge becomes one relation oriented from
/// the edge's `source` to its `target`, with no evidence attached.
pub fn read_graphml<R: BufRead>(reader: R) -> Result<KnowledgeGraph, IngestError> {
    let mut xml = Reader::from_reader(reader);
    let mut buf = Vec::new();
    let mut keys: Vec<(String, String)> = Vec::new();
    let mut builder = GraphBuilder::new();

    enum Open {
        Node {
            id: String,
            name: String,
            etype: Option<String>,
        },
        Edge {
            src: String,
            dst: String,
            rtypes: String,
        },
    }
    let mut current: Option<Open> = None;
    let mut data_key: Option<String> = None;
    let mut text = String::new();
    let bad = |m: String| IngestError::GraphMl(m);

    loop {
        let event = xml
            .read_event_into(&mut buf)
            .map_err(|e| bad(e.to_string()))?;
        match event {
            Event::Start(ref tag) | Event::Empty(ref tag) => {
                let empty = matches!(event, Event::Empty(_));
                match tag.name().as_ref() {
                    b"key" => {
                        let id = attr(tag, b"id")?.ok_or_else(|| bad("key without id".into()))?;
                        let name = attr(tag, b"attr.name")?.unwrap_or_default();
                        keys.push((id, name));
                    }
                    b"node" => {
                        let id = attr(tag, b"id")?.ok_or_else(|| bad("node without id".into()))?;
                        current = Some(Open::Node {
                            id,
                            name: String::new(),
                            etype: None,
                        });
                    }
                    b"edge" => {
                        let src = attr(tag, b"source")?
                            .ok_or_else(|| bad("edge without source".into()))?;
                        let dst = attr(tag, b"target")?
                            .ok_or_else(|| bad("edge without target".into()))?;
                        current = Some(Open::Edge {
                            src,
                            dst,
                            rtypes: String::new(),
                        });
                    }
                    b"data" if !empty => {
                        let key =
                            attr(tag, b"key")?.ok_or_else(|| bad("data without key".into()))?;
                        let name = keys
                            .iter()
                            .find(|(id, _)| *id == key)
                            .map(|(_, n)| n.clone())
                            .ok_or_else(|| bad(format!("undeclared key {key}")))?;
                        data_key = Some(name);
                        text.clear();
                    }
                    _ => {}
                }
                if empty {
                    close(tag.name().as_ref(), &mut current, &mut builder)?;
                }
            }
            Event::Text(t) => {
                if data_key.is_some() {
                    text.push_str(&t.unescape().map_err(|e| bad(e.to_string()))?);
                }
            }
            Event::End(tag) => {
                if tag.name().as_ref() == b"data" {
                    if let Some(key) = data_key.take() {
                        match (&mut current, key.as_str()) {
                            (Some(Open::Node { name, .. }), "name") => *name = text.clone(),
                            (Some(Open::Node { etype, .. }), "type") => *etype = Some(text.clone()),
                            (Some(Open::Edge { rtypes, .. }), "rtypes") => *rtypes = text.clone(),
                            _ => {}
                        }
                    }
                } else {
                    close(tag.name().as_ref(), &mut current, &mut builder)?;
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    return Ok(builder.freeze());

    fn close(
        tag: &[u8],
        current: &mut Option<Open>,
        builder: &mut GraphBuilder,
    ) -> Result<(), IngestError> {
        let g = |e: GraphError| IngestError::GraphMl(e.to_string());
        match (tag, current.take()) {
            (b"node", Some(Open::Node { id, name, etype })) => {
                let etype = etype
                    .ok_or_else(|| IngestError::GraphMl(format!("node {id} has no type")))?
                    .parse::<EntityType>()
                    .map_err(g)?;
                builder
                    .add_entity(Entity::new(id, name, etype).map_err(g)?)
                    .map_err(g)?;
            }
            (b"edge", Some(Open::Edge { src, dst, rtypes })) => {
                for rtype in rtypes.split(DOC_SEPARATOR).filter(|t| !t.is_empty()) {
                    let r = Relation::new(src.clone(), dst.clone(), rtype, Vec::<String>::new())
                        .map_err(g)?;
                    builder.add_relation(r).map_err(g)?;
                }
            }
            (_, other) => *current = other,
        }
        Ok(())
    }
}

fn attr(tag: &BytesStart<'_>, name: &[u8]) -> Result<Option<String>, IngestError> {
    match tag
        .try_get_attribute(name)
        .map_err(|e| IngestError::GraphMl(e.to_string()))?
    {
        Some(a) => Ok(Some(
            a.unescape_value()
                .map_err(|e| IngestError::GraphMl(e.to_string()))?
                .into_owned(),
        )),
        None => Ok(None),
    }
}
