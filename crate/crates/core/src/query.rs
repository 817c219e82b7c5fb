//! Structural queries over a frozen graph.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{EntityType, GraphError, KnowledgeGraph, TypeCounts};

/// Relation type used for drug-disease lookups unless another is given.
pub const TREATS: &str = "TREATS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unknown entities: {}", .0.join(", "))]
    UnknownEntities(Vec<String>),
    #[error("path endpoints are the same node `{0}`")]
    SameEndpoints(String),
    #[error("max_hops must be at least 1")]
    ZeroHops,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubnetworkStats {
    pub nodes: usize,
    pub edges: usize,
    pub types: TypeCounts,
}

/// Induced subgraph of the collapsed view, in parent node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subnetwork {
    pub center: Option<usize>,
    /// Ascending.
    pub nodes: Vec<usize>,
    /// `(i, j)` with `i < j`, ascending.
    pub edges: Vec<(usize, usize)>,
    pub stats: SubnetworkStats,
}

impl Subnetwork {
    /// The whole graph viewed as a subnetwork.
    pub fn whole(graph: &KnowledgeGraph) -> Self {
        Self::build(graph, None, (0..graph.node_count()).collect())
    }

    fn build(graph: &KnowledgeGraph, center: Option<usize>, nodes: Vec<usize>) -> Self {
        let adj = graph.adjacency();
        let mut member = vec![false; graph.node_count()];
        for &i in &nodes {
            member[i] = true;
        }
        let edges: Vec<(usize, usize)> = nodes
            .iter()
            .flat_map(|&i| {
                let member = &member;
                adj.neighbors(i)
                    .iter()
                    .filter(move |&&j| j > i && member[j])
                    .map(move |&j| (i, j))
            })
            .collect();
        let stats = SubnetworkStats {
            nodes: nodes.len(),
            edges: edges.len(),
            types: nodes.iter().map(|&i| graph.entity(i).etype()).collect(),
        };
        Subnetwork {
            center,
            nodes,
            edges,
            stats,
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.nodes.binary_search(&i).is_ok()
    }
}

/// Center plus its neighbors, with every edge among them.
pub fn ego_subnetwork(graph: &KnowledgeGraph, center: &str) -> Result<Subnetwork, QueryError> {
    let c = graph.resolve(center)?;
    let mut nodes: Vec<usize> = graph.adjacency().neighbors(c).to_vec();
    let at = nodes.binary_search(&c).unwrap_err();
    nodes.insert(at, c);
    Ok(Subnetwork::build(graph, Some(c), nodes))
}

/// Subgraph induced by an explicit node set.
pub fn induced_subgraph<I, S>(graph: &KnowledgeGraph, ids: I) -> Result<Subnetwork, QueryError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut nodes = BTreeSet::new();
    let mut missing = BTreeSet::new();
    for id in ids {
        match graph.index_of(id.as_ref()) {
            Some(i) => {
                nodes.insert(i);
            }
            None => {
                missing.insert(id.as_ref().to_string());
            }
        }
    }
    if !missing.is_empty() {
        return Err(QueryError::UnknownEntities(missing.into_iter().collect()));
    }
    Ok(Subnetwork::build(graph, None, nodes.into_iter().collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathConstraint {
    max_hops: usize,
    allowed: BTreeSet<EntityType>,
}

impl PathConstraint {
    /// An empty `allowed_intermediate_types` set leaves intermediates
    /// unconstrained. Endpoints are never type-checked.
    pub fn new<I>(max_hops: usize, allowed_intermediate_types: I) -> Result<Self, QueryError>
    where
        I: IntoIterator<Item = EntityType>,
    {
        if max_hops == 0 {
            return Err(QueryError::ZeroHops);
        }
        Ok(PathConstraint {
            max_hops,
            allowed: allowed_intermediate_types.into_iter().collect(),
        })
    }

    pub fn max_hops(&self) -> usize {
        self.max_hops
    }

    pub fn allowed_intermediate_types(&self) -> &BTreeSet<EntityType> {
        &self.allowed
    }

    pub fn admits(&self, t: EntityType) -> bool {
        self.allowed.is_empty() || self.allowed.contains(&t)
    }
}

/// Node-index sequence from source to target.
pub type Path = Vec<usize>;

/// All simple paths of at most `max_hops` edges between two nodes.
///
/// Sorted by length, then lexicographically by node sequence (node indices
/// follow id order, so this is also id order).
pub fn paths_between(
    graph: &KnowledgeGraph,
    from: &str,
    to: &str,
    constraint: &PathConstraint,
) -> Result<Vec<Path>, QueryError> {
    let source = graph.resolve(from)?;
    let target = graph.resolve(to)?;
    if source == target {
        return Err(QueryError::SameEndpoints(from.to_string()));
    }

    struct Search<'a> {
        graph: &'a KnowledgeGraph,
        constraint: &'a PathConstraint,
        target: usize,
        on_path: Vec<bool>,
        path: Vec<usize>,
        found: Vec<Path>,
    }

    impl Search<'_> {
        fn extend(&mut self, remaining: usize) {
            let adj = self.graph.adjacency();
            let here = *self.path.last().expect("path starts at source");
            if adj.contains(here, self.target) {
                let mut p = self.path.clone();
                p.push(self.target);
                self.found.push(p);
            }
            if remaining < 2 {
                return;
            }
            for &next in adj.neighbors(here) {
                if next == self.target
                    || self.on_path[next]
                    || !self.constraint.admits(self.graph.entity(next).etype())
                {
                    continue;
                }
                self.on_path[next] = true;
                self.path.push(next);
                self.extend(remaining - 1);
                self.path.pop();
                self.on_path[next] = false;
            }
        }
    }

    let mut search = Search {
        graph,
        constraint,
        target,
        on_path: vec![false; graph.node_count()],
        path: vec![source],
        found: Vec::new(),
    };
    search.on_path[source] = true;
    search.extend(constraint.max_hops);

    let mut found = search.found;
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(found)
}

/// Stored orientation of the relation(s) behind a hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Orientation {
    DrugToDisease,
    DiseaseToDrug,
    Both,
}

impl Orientation {
    fn merge(self, other: Orientation) -> Orientation {
        if self == other {
            self
        } else {
            Orientation::Both
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreatmentHit {
    pub drug: String,
    pub disease: String,
    pub rtype: String,
    pub evidence: BTreeSet<String>,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreatmentReport {
    /// Sorted by `(drug, disease)`.
    pub hits: Vec<TreatmentHit>,
    /// Queried ids absent from the graph, sorted.
    pub unknown: Vec<String>,
}

/// Drugs linked to any of `diseases` by a relation of type `rtype`, in
/// either stored direction.
pub fn treatments_for<I, S>(graph: &KnowledgeGraph, diseases: I, rtype: &str) -> TreatmentReport
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let wanted: BTreeSet<String> = diseases
        .into_iter()
        .map(|s| s.as_ref().to_string())
        .collect();
    let unknown = wanted
        .iter()
        .filter(|id| graph.index_of(id).is_none())
        .cloned()
        .collect();

    let is_drug = |id: &str| {
        graph
            .index_of(id)
            .is_some_and(|i| graph.entity(i).etype() == EntityType::Drug)
    };
    let mut merged: BTreeMap<(String, String), TreatmentHit> = BTreeMap::new();
    for r in graph.relations().iter().filter(|r| r.rtype() == rtype) {
        let candidates = [
            (r.src(), r.dst(), Orientation::DrugToDisease),
            (r.dst(), r.src(), Orientation::DiseaseToDrug),
        ];
        for (drug, disease, orientation) in candidates {
            if !wanted.contains(disease) || !is_drug(drug) {
                continue;
            }
            merged
                .entry((drug.to_string(), disease.to_string()))
                .and_modify(|hit| {
                    hit.evidence.extend(r.evidence().iter().cloned());
                    hit.orientation = hit.orientation.merge(orientation);
                })
                .or_insert_with(|| TreatmentHit {
                    drug: drug.to_string(),
                    disease: disease.to_string(),
                    rtype: rtype.to_string(),
                    evidence: r.evidence().clone(),
                    orientation,
                });
        }
    }
    TreatmentReport {
        hits: merged.into_values().collect(),
        unknown,
    }
}
