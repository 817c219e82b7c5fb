//! Text renderings: ranking and treatment tables, path listings, and DOT,
//! GraphML and TSV serializations of graphs and subnetworks.
//!
//! Every renderer emits in a fixed order, so identical inputs produce
//! byte-identical output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::centrality::RankedEntity;
use crate::graph::{EntityType, KnowledgeGraph};
use crate::ingest::{DOC_SEPARATOR, ENTITY_HEADER, RELATION_HEADER};
use crate::query::{Path, Subnetwork, SubnetworkStats, TreatmentHit};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Tsv,
    Markdown,
}

/// Node fill colors per entity type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColorMap {
    pub protein: &'static str,
    pub drug: &'static str,
    pub disease: &'static str,
    pub taxonomy: &'static str,
}

impl Default for ColorMap {
    fn default() -> Self {
        ColorMap {
            protein: "blue",
            drug: "green",
            disease: "red",
            taxonomy: "orange",
        }
    }
}

impl ColorMap {
    pub fn color(&self, t: EntityType) -> &'static str {
        match t {
            EntityType::Protein => self.protein,
            EntityType::Drug => self.drug,
            EntityType::Disease => self.disease,
            EntityType::Taxonomy => self.taxonomy,
        }
    }
}

fn table(format: TableFormat, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    match format {
        TableFormat::Tsv => {
            out.push_str(&header.join("\t"));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        TableFormat::Markdown => {
            let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
            let header: Vec<String> = header.iter().map(|h| h.to_string()).collect();
            out.push_str(&line(&header));
            out.push_str(&line(&vec!["---".to_string(); header.len()]));
            for row in rows {
                let escaped: Vec<String> = row.iter().map(|c| c.replace('|', "\\|")).collect();
                out.push_str(&line(&escaped));
            }
        }
    }
    out
}

/// Columns `Rank, Entity, Type, Centrality Measure`; four decimals.
pub fn render_rank_table<T: Scalar>(rows: &[RankedEntity<'_, T>], format: TableFormat) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.rank.to_string(),
                r.id.to_string(),
                r.etype.to_string(),
                format!("{:.4}", r.score),
            ]
        })
        .collect();
    table(
        format,
        &["Rank", "Entity", "Type", "Centrality Measure"],
        &body,
    )
}

/// Columns `Entry, Drug, Relation, Disease, Reference Id`.
pub fn render_treatment_table(hits: &[TreatmentHit]) -> String {
    let body: Vec<Vec<String>> = hits
        .iter()
        .enumerate()
        .map(|(i, h)| {
            vec![
                (i + 1).to_string(),
                h.drug.clone(),
                h.rtype.clone(),
                h.disease.clone(),
                join_set(&h.evidence),
            ]
        })
        .collect();
    table(
        TableFormat::Tsv,
        &["Entry", "Drug", "Relation", "Disease", "Reference Id"],
        &body,
    )
}

fn join_set(set: &BTreeSet<String>) -> String {
    let parts: Vec<&str> = set.iter().map(String::as_str).collect();
    parts.join(&DOC_SEPARATOR.to_string())
}

pub fn render_stats(stats: &SubnetworkStats) -> String {
    let mut out = format!("nodes: {} edges: {}\n", stats.nodes, stats.edges);
    for (t, count) in stats.types.iter() {
        let _ = writeln!(out, "{t}: {count}");
    }
    out
}

/// One path per line, ids joined by ` -> `.
pub fn render_paths(graph: &KnowledgeGraph, paths: &[Path]) -> String {
    let mut out = String::new();
    for p in paths {
        let ids: Vec<&str> = p.iter().map(|&i| graph.entity(i).id()).collect();
        out.push_str(&ids.join(" -> "));
        out.push('\n');
    }
    out
}

fn dot_quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

/// Undirected DOT document with nodes filled by type color.
pub fn to_dot(graph: &KnowledgeGraph, view: &Subnetwork, colors: &ColorMap) -> String {
    if view.nodes.is_empty() {
        return "graph G { }\n".to_string();
    }
    let mut out = String::from("graph G {\n  node [style=filled];\n");
    for &i in &view.nodes {
        let e = graph.entity(i);
        let _ = writeln!(
            out,
            "  {} [label={}, fillcolor={}];",
            dot_quote(e.id()),
            dot_quote(e.name()),
            colors.color(e.etype())
        );
    }
    for &(i, j) in &view.edges {
        let _ = writeln!(
            out,
            "  {} -- {};",
            dot_quote(graph.entity(i).id()),
            dot_quote(graph.entity(j).id())
        );
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Distinct relation types per collapsed edge, keyed by `(i, j)` with `i < j`.
fn edge_rtypes(graph: &KnowledgeGraph) -> BTreeMap<(usize, usize), BTreeSet<&str>> {
    let mut map: BTreeMap<(usize, usize), BTreeSet<&str>> = BTreeMap::new();
    for r in graph.relations() {
        let (a, b) = (graph.index_of(r.src()), graph.index_of(r.dst()));
        if let (Some(a), Some(b)) = (a, b) {
            map.entry((a.min(b), a.max(b)))
                .or_default()
                .insert(r.rtype());
        }
    }
    map
}

/// GraphML 1.0 with node keys `name`, `type` and edge key `rtypes`.
pub fn to_graphml(graph: &KnowledgeGraph, view: &Subnetwork) -> String {
    let rtypes = edge_rtypes(graph);
    let mut out = String::from(concat!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" ",
        "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" ",
        "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns ",
        "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
        "  <key id=\"d0\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n",
        "  <key id=\"d1\" for=\"node\" attr.name=\"type\" attr.type=\"string\"/>\n",
        "  <key id=\"d2\" for=\"edge\" attr.name=\"rtypes\" attr.type=\"string\"/>\n",
        "  <graph id=\"G\" edgedefault=\"undirected\">\n",
    ));
    for &i in &view.nodes {
        let e = graph.entity(i);
        let _ = writeln!(
            out,
            "    <node id=\"{}\">\n      <data key=\"d0\">{}</data>\n      <data key=\"d1\">{}</data>\n    </node>",
            xml_escape(e.id()),
            xml_escape(e.name()),
            e.etype()
        );
    }
    for (n, &(i, j)) in view.edges.iter().enumerate() {
        let joined = rtypes
            .get(&(i, j))
            .map(|s| s.iter().copied().collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "    <edge id=\"e{n}\" source=\"{}\" target=\"{}\">\n      <data key=\"d2\">{}</data>\n    </edge>",
            xml_escape(graph.entity(i).id()),
            xml_escape(graph.entity(j).id()),
            joined
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// Entities file in the ingest format.
pub fn entities_tsv(graph: &KnowledgeGraph) -> String {
    let mut out = format!("{ENTITY_HEADER}\n");
    for e in graph.entities() {
        let name = e.name().replace(['\t', '\n', '\r'], " ");
        let _ = writeln!(out, "{}\t{}\t{}", e.id(), name, e.etype());
    }
    out
}

/// Relations file in the ingest format, one row per stored relation.
pub fn relations_tsv(graph: &KnowledgeGraph) -> String {
    let mut out = format!("{RELATION_HEADER}\n");
    for r in graph.relations() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.src(),
            r.dst(),
            r.rtype(),
            join_set(r.evidence())
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Entity, GraphBuilder, Relation};
    use crate::query::{Orientation, TreatmentHit};

    fn graph() -> KnowledgeGraph {
        let mut b = GraphBuilder::new();
        b.add_entity(Entity::new("ace2", "ACE2", EntityType::Protein).unwrap())
            .unwrap();
        b.add_entity(Entity::new("remdesivir", "Remdesivir", EntityType::Drug).unwrap())
            .unwrap();
        b.add_relation(Relation::new("remdesivir", "ace2", "BINDS", ["p1"]).unwrap())
            .unwrap();
        b.add_relation(Relation::new("ace2", "remdesivir", "INHIBITS", ["p2"]).unwrap())
            .unwrap();
        b.freeze()
    }

    #[test]
    fn rank_table_formatting() {
        let rows = [RankedEntity {
            rank: 1,
            id: "coronavirus",
            etype: EntityType::Taxonomy,
            score: 0.10501f64,
        }];
        assert_eq!(
            render_rank_table(&rows, TableFormat::Tsv),
            "Rank\tEntity\tType\tCentrality Measure\n1\tcoronavirus\ttaxonomy\t0.1050\n"
        );
        let one = [RankedEntity {
            rank: 1,
            id: "x",
            etype: EntityType::Drug,
            score: 1.0f64,
        }];
        assert!(render_rank_table(&one, TableFormat::Tsv).ends_with("\t1.0000\n"));
        let md = render_rank_table(&one, TableFormat::Markdown);
        assert_eq!(
            md,
            "| Rank | Entity | Type | Centrality Measure |\n| --- | --- | --- | --- |\n| 1 | x | drug | 1.0000 |\n"
        );
    }

    #[test]
    fn empty_tables_are_header_only() {
        let empty: [RankedEntity<'_, f64>; 0] = [];
        assert_eq!(
            render_rank_table(&empty, TableFormat::Tsv),
            "Rank\tEntity\tType\tCentrality Measure\n"
        );
        assert_eq!(
            render_treatment_table(&[]),
            "Entry\tDrug\tRelation\tDisease\tReference Id\n"
        );
    }

    #[test]
    fn treatment_rows() {
        let hit = |ev: &[&str]| TreatmentHit {
            drug: "ribavirin".into(),
            disease: "sars".into(),
            rtype: "TREATS".into(),
            evidence: ev.iter().map(|s| s.to_string()).collect(),
            orientation: Orientation::DrugToDisease,
        };
        let t = render_treatment_table(&[hit(&["d1"])]);
        assert_eq!(t.lines().nth(1), Some("1\tribavirin\tTREATS\tsars\td1"));
        let t = render_treatment_table(&[hit(&["d2", "d1"])]);
        assert!(t.ends_with("\td1;d2\n"));
    }

    #[test]
    fn dot_shapes() {
        let g = graph();
        let dot = to_dot(&g, &Subnetwork::whole(&g), &ColorMap::default());
        assert!(dot.starts_with("graph G {\n"));
        assert!(dot.contains("\"ace2\" [label=\"ACE2\", fillcolor=blue];"));
        assert!(dot.contains("\"remdesivir\" [label=\"Remdesivir\", fillcolor=green];"));
        assert_eq!(dot.matches(" -- ").count(), 1);
        assert!(dot.contains("\"ace2\" -- \"remdesivir\";"));

        let empty = GraphBuilder::new().freeze();
        assert_eq!(
            to_dot(&empty, &Subnetwork::whole(&empty), &ColorMap::default()),
            "graph G { }\n"
        );
    }

    #[test]
    fn dot_escapes() {
        let mut b = GraphBuilder::new();
        b.add_entity(Entity::new("a\"b", "say \"hi\"\\", EntityType::Disease).unwrap())
            .unwrap();
        let g = b.freeze();
        let dot = to_dot(&g, &Subnetwork::whole(&g), &ColorMap::default());
        assert!(dot.contains(r#""a\"b" [label="say \"hi\"\\", fillcolor=red];"#));
    }

    #[test]
    fn graphml_shape() {
        let g = graph();
        let xml = to_graphml(&g, &Subnetwork::whole(&g));
        assert_eq!(xml.matches("<node ").count(), 2);
        assert_eq!(xml.matches("<edge ").count(), 1);
        assert!(xml.contains("<data key=\"d1\">drug</data>"));
        assert!(xml.contains("<data key=\"d2\">BINDS;INHIBITS</data>"));
    }

    #[test]
    fn tsv_escapes_names() {
        let mut b = GraphBuilder::new();
        b.add_entity(Entity::new("x", "two\twords", EntityType::Drug).unwrap())
            .unwrap();
        let g = b.freeze();
        assert_eq!(entities_tsv(&g), "id\tname\ttype\nx\ttwo words\tdrug\n");
    }

    #[test]
    fn color_map_is_total() {
        let c = ColorMap::default();
        let all: Vec<_> = EntityType::ALL.iter().map(|&t| c.color(t)).collect();
        assert_eq!(all, ["blue", "green", "red", "orange"]);
    }
}
