//! Test-only oracles and generators. Nothing here calls the iterative
//! routines under test.
#![allow(dead_code)]

use std::collections::BTreeSet;

use kgnet::{Entity, EntityType, GraphBuilder, KnowledgeGraph, Relation};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn node_id(i: usize) -> String {
    format!("n{i:03}")
}

pub fn random_type(rng: &mut impl Rng) -> EntityType {
    EntityType::ALL[rng.gen_range(0..4)]
}

const RTYPES: [&str; 4] = ["TREATS", "BINDS", "INHIBITS", "ASSOCIATED_WITH"];

/// Erdos-Renyi style graph where each unordered pair gets an edge with
/// probability `p`; some edges carry several relations in random
/// orientations so collapsing is exercised.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> KnowledgeGraph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        let t = random_type(rng);
        b.add_entity(Entity::new(node_id(i), format!("Node {i}"), t).unwrap())
            .unwrap();
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                let copies = rng.gen_range(1..=2);
                for _ in 0..copies {
                    let (s, d) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
                    let rtype = RTYPES[rng.gen_range(0..RTYPES.len())];
                    let doc = format!("doc{}", rng.gen_range(0..5));
                    b.add_relation(Relation::new(node_id(s), node_id(d), rtype, [doc]).unwrap())
                        .unwrap();
                }
            }
        }
    }
    b.freeze()
}

pub fn dense_adjacency(g: &KnowledgeGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for r in g.relations() {
        let i = g.index_of(r.src()).unwrap();
        let j = g.index_of(r.dst()).unwrap();
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    a
}

/// Largest eigenvalue magnitude from a full symmetric eigendecomposition.
pub fn dense_spectral_radius(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `sum_{k=1}^{terms} alpha^k (A^T)^k 1` by explicit dense matrix powers.
pub fn truncated_katz_series(a: &DMatrix<f64>, alpha: f64, terms: usize) -> Vec<f64> {
    let n = a.nrows();
    let at = a.transpose();
    let ones = DVector::from_element(n, 1.0);
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut total = DVector::zeros(n);
    let mut scale = 1.0;
    for _ in 0..terms {
        power = &power * &at;
        scale *= alpha;
        total += (&power * &ones) * scale;
    }
    total.iter().copied().collect()
}

/// Every simple path `from -> ... -> to` of at most `max_hops` edges, found by
/// trying every injective sequence of intermediate nodes.
pub fn brute_force_paths(
    a: &DMatrix<f64>,
    types: &[EntityType],
    from: usize,
    to: usize,
    max_hops: usize,
    allowed: &BTreeSet<EntityType>,
) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let candidates: Vec<usize> = (0..n)
        .filter(|&v| v != from && v != to)
        .filter(|&v| allowed.is_empty() || allowed.contains(&types[v]))
        .collect();
    let mut out = Vec::new();
    let mut seq = Vec::new();
    fn rec(
        a: &DMatrix<f64>,
        candidates: &[usize],
        from: usize,
        to: usize,
        slots: usize,
        seq: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let mut full = vec![from];
        full.extend(seq.iter().copied());
        full.push(to);
        if full.windows(2).all(|w| a[(w[0], w[1])] == 1.0) {
            out.push(full);
        }
        if slots == 0 {
            return;
        }
        for &c in candidates {
            if !seq.contains(&c) {
                seq.push(c);
                rec(a, candidates, from, to, slots - 1, seq, out);
                seq.pop();
            }
        }
    }
    rec(a, &candidates, from, to, max_hops - 1, &mut seq, &mut out);
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

/// Induced subgraph on `{c} + N(c)` by checking every pair of the dense matrix.
pub fn brute_force_ego(a: &DMatrix<f64>, c: usize) -> (Vec<usize>, Vec<(usize, usize)>) {
    let n = a.nrows();
    let nodes: Vec<usize> = (0..n).filter(|&v| v == c || a[(c, v)] == 1.0).collect();
    let mut edges = Vec::new();
    for &i in &nodes {
        for &j in &nodes {
            if i < j && a[(i, j)] == 1.0 {
                edges.push((i, j));
            }
        }
    }
    (nodes, edges)
}

pub fn types_of(g: &KnowledgeGraph) -> Vec<EntityType> {
    g.entities().iter().map(Entity::etype).collect()
}

/// Builds a graph from `(id, type)` nodes and `(src, dst, rtype, docs)` rows.
pub fn build(nodes: &[(&str, EntityType)], rels: &[(&str, &str, &str, &[&str])]) -> KnowledgeGraph {
    let mut b = GraphBuilder::new();
    for &(id, t) in nodes {
        b.add_entity(Entity::new(id, id, t).unwrap()).unwrap();
    }
    for &(s, d, t, ev) in rels {
        b.add_relation(Relation::new(s, d, t, ev.iter().copied()).unwrap())
            .unwrap();
    }
    b.freeze()
}

/// Synthetic TSV pair at a given scale: random typed entities and random
/// distinct-endpoint relations.
pub fn synthetic_tsv(rng: &mut impl Rng, entities: usize, relations: usize) -> (String, String) {
    use std::fmt::Write;
    let mut e = String::from("id\tname\ttype\n");
    for i in 0..entities {
        let t = random_type(rng);
        writeln!(e, "e{i:05}\tEntity {i}\t{t}").unwrap();
    }
    let mut r = String::from("src_id\tdst_id\trel_type\tdoc_id\n");
    let mut written = 0;
    while written < relations {
        let s = rng.gen_range(0..entities);
        let d = rng.gen_range(0..entities);
        if s == d {
            continue;
        }
        let rtype = RTYPES[rng.gen_range(0..RTYPES.len())];
        writeln!(
            r,
            "e{s:05}\te{d:05}\t{rtype}\tPMC{}",
            rng.gen_range(0..100_000)
        )
        .unwrap();
        written += 1;
    }
    (e, r)
}

#[derive(Debug, Clone, PartialEq)]
enum DotToken {
    Id(String),
    Punct(&'static str),
}

fn dot_tokens(src: &str) -> Result<Vec<DotToken>, String> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' | '}' | '[' | ']' | '=' | ',' | ';' => {
                chars.next();
                out.push(DotToken::Punct(match c {
                    '{' => "{",
                    '}' => "}",
                    '[' => "[",
                    ']' => "]",
                    '=' => "=",
                    ',' => ",",
                    _ => ";",
                }));
            }
            '-' => {
                chars.next();
                match chars.next() {
                    Some('-') => out.push(DotToken::Punct("--")),
                    Some('>') => return Err("directed edge in undirected graph".into()),
                    other => return Err(format!("unexpected {other:?} after '-'")),
                }
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('\\') => match chars.next() {
                            Some('n') => s.push('\n'),
                            Some(e) => s.push(e),
                            None => return Err("dangling escape".into()),
                        },
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                        None => return Err("unterminated string".into()),
                    }
                }
                out.push(DotToken::Id(s));
            }
            c if c.is_alphanumeric() || c == '_' || c == '.' => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_alphanumeric() || ch == '_' || ch == '.' {
                        s.push(ch);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(DotToken::Id(s));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

/// Parsed subset of DOT: node statements with their attributes and
/// undirected edges.
#[derive(Debug, Default)]
pub struct DotDoc {
    pub nodes: Vec<(String, Vec<(String, String)>)>,
    pub edges: Vec<(String, String)>,
}

/// Accepts `graph ID { stmt* }` where a statement is a node statement, an
/// `a -- b` edge, or a `node [...]` default; rejects anything else.
pub fn parse_dot(src: &str) -> Result<DotDoc, String> {
    let toks = dot_tokens(src)?;
    let mut pos = 0;
    let next = |pos: &mut usize| -> Option<DotToken> {
        let t = toks.get(*pos).cloned();
        *pos += 1;
        t
    };
    let expect = |pos: &mut usize, p: &'static str| -> Result<(), String> {
        match toks.get(*pos) {
            Some(DotToken::Punct(q)) if *q == p => {
                *pos += 1;
                Ok(())
            }
            other => Err(format!("expected {p}, found {other:?}")),
        }
    };
    match next(&mut pos) {
        Some(DotToken::Id(k)) if k == "graph" => {}
        other => return Err(format!("expected `graph`, found {other:?}")),
    }
    if let Some(DotToken::Id(_)) = toks.get(pos) {
        pos += 1;
    }
    expect(&mut pos, "{")?;
    let mut doc = DotDoc::default();
    loop {
        match next(&mut pos) {
            Some(DotToken::Punct("}")) => break,
            Some(DotToken::Id(id)) => {
                let mut attrs = Vec::new();
                match toks.get(pos) {
                    Some(DotToken::Punct("--")) => {
                        pos += 1;
                        match next(&mut pos) {
                            Some(DotToken::Id(other)) => doc.edges.push((id, other)),
                            t => return Err(format!("edge without target: {t:?}")),
                        }
                    }
                    Some(DotToken::Punct("[")) => {
                        pos += 1;
                        loop {
                            match next(&mut pos) {
                                Some(DotToken::Punct("]")) => break,
                                Some(DotToken::Punct(",")) => continue,
                                Some(DotToken::Id(k)) => {
                                    expect(&mut pos, "=")?;
                                    match next(&mut pos) {
                                        Some(DotToken::Id(v)) => attrs.push((k, v)),
                                        t => return Err(format!("attribute without value: {t:?}")),
                                    }
                                }
                                t => return Err(format!("bad attribute list: {t:?}")),
                            }
                        }
                        if id != "node" {
                            doc.nodes.push((id, attrs));
                        }
                    }
                    _ => doc.nodes.push((id, attrs)),
                }
                expect(&mut pos, ";")?;
            }
            t => return Err(format!("unexpected token {t:?}")),
        }
    }
    if pos != toks.len() {
        return Err("trailing tokens after graph body".into());
    }
    Ok(doc)
}
