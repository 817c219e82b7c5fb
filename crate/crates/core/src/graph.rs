//! Typed knowledge-graph model.
//!
//! Construction goes through [`GraphBuilder`]; [`GraphBuilder::freeze`]
//! consumes it and produces an immutable [`KnowledgeGraph`], so analytics can
//! only ever see a frozen graph. Relations keep their extracted direction and
//! type, while every analytic runs on the collapsed undirected 0/1 view held
//! in [`Adjacency`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("entity `{id}` redefined with a different name or type")]
    DuplicateConflict { id: String },
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("self-relation on `{0}`")]
    SelfLoop(String),
    #[error("invalid entity id {0:?}")]
    InvalidId(String),
    #[error("unknown entity type `{0}`")]
    UnknownType(String),
    #[error("invalid relation type {0:?} (expected A-Z and `_`)")]
    InvalidRelationType(String),
}

/// The four node categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    Protein,
    Drug,
    Disease,
    Taxonomy,
}

impl EntityType {
    pub const ALL: [EntityType; 4] = [
        EntityType::Protein,
        EntityType::Drug,
        EntityType::Disease,
        EntityType::Taxonomy,
    ];

    /// Lowercase token used in files and reports.
    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Protein => "protein",
            EntityType::Drug => "drug",
            EntityType::Disease => "disease",
            EntityType::Taxonomy => "taxonomy",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = GraphError;

    /// Case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| GraphError::UnknownType(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Entity {
    id: String,
    name: String,
    etype: EntityType,
}

impl Entity {
    /// Rejects empty ids and ids containing tabs or line breaks.
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        etype: EntityType,
    ) -> Result<Self, GraphError> {
        let id = id.into();
        validate_id(&id)?;
        Ok(Entity {
            id,
            name: name.into(),
            etype,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn etype(&self) -> EntityType {
        self.etype
    }
}

pub(crate) fn validate_id(id: &str) -> Result<(), GraphError> {
    if id.is_empty() || id.contains(['\t', '\n', '\r']) {
        return Err(GraphError::InvalidId(id.to_string()));
    }
    Ok(())
}

pub(crate) fn validate_rtype(rtype: &str) -> Result<(), GraphError> {
    if rtype.is_empty() || !rtype.bytes().all(|b| b.is_ascii_uppercase() || b == b'_') {
        return Err(GraphError::InvalidRelationType(rtype.to_string()));
    }
    Ok(())
}

/// A typed, directed relation with the documents it was extracted from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    src: String,
    dst: String,
    rtype: String,
    evidence: BTreeSet<String>,
}

impl Relation {
    pub fn new<I, S>(
        src: impl Into<String>,
        dst: impl Into<String>,
        rtype: impl Into<String>,
        evidence: I,
    ) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let (src, dst, rtype) = (src.into(), dst.into(), rtype.into());
        validate_id(&src)?;
        validate_id(&dst)?;
        if src == dst {
            return Err(GraphError::SelfLoop(src));
        }
        validate_rtype(&rtype)?;
        Ok(Relation {
            src,
            dst,
            rtype,
            evidence: evidence.into_iter().map(Into::into).collect(),
        })
    }

    pub fn src(&self) -> &str {
        &self.src
    }

    pub fn dst(&self) -> &str {
        &self.dst
    }

    pub fn rtype(&self) -> &str {
        &self.rtype
    }

    pub fn evidence(&self) -> &BTreeSet<String> {
        &self.evidence
    }

    /// Whether this relation links `a` and `b` in either direction.
    pub fn connects(&self, a: &str, b: &str) -> bool {
        (self.src == a && self.dst == b) || (self.src == b && self.dst == a)
    }
}

/// Whether an insertion created a new record or folded into an existing one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insert {
    New,
    Merged,
}

type RelationKey = (String, String, String);

/// Mutable, single-writer construction stage.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    entities: BTreeMap<String, Entity>,
    relations: BTreeMap<RelationKey, BTreeSet<String>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adding an identical entity twice is a no-op.
    pub fn add_entity(&mut self, e: Entity) -> Result<Insert, GraphError> {
        match self.entities.get(&e.id) {
            Some(existing) if *existing == e => Ok(Insert::Merged),
            Some(_) => Err(GraphError::DuplicateConflict { id: e.id }),
            None => {
                self.entities.insert(e.id.clone(), e);
                Ok(Insert::New)
            }
        }
    }

    /// Relations with the same `(src, dst, rtype)` merge by evidence union.
    pub fn add_relation(&mut self, r: Relation) -> Result<Insert, GraphError> {
        for end in [&r.src, &r.dst] {
            if !self.entities.contains_key(end) {
                return Err(GraphError::UnknownEntity(end.clone()));
            }
        }
        if r.src == r.dst {
            return Err(GraphError::SelfLoop(r.src));
        }
        let Relation {
            src,
            dst,
            rtype,
            evidence,
        } = r;
        match self.relations.entry((src, dst, rtype)) {
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                slot.get_mut().extend(evidence);
                Ok(Insert::Merged)
            }
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(evidence);
                Ok(Insert::New)
            }
        }
    }

    pub fn contains_entity(&self, id: &str) -> bool {
        self.entities.contains_key(id)
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// Builds the node index and the collapsed adjacency.
    pub fn freeze(self) -> KnowledgeGraph {
        let entities: Vec<Entity> = self.entities.into_values().collect();
        let index: HashMap<String, usize> = entities
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        let relations: Vec<Relation> = self
            .relations
            .into_iter()
            .map(|((src, dst, rtype), evidence)| Relation {
                src,
                dst,
                rtype,
                evidence,
            })
            .collect();
        let pairs = relations.iter().map(|r| (index[&r.src], index[&r.dst]));
        let adjacency = Adjacency::from_pairs(entities.len(), pairs);
        KnowledgeGraph {
            entities,
            index,
            relations,
            adjacency,
        }
    }
}

/// Symmetric 0/1 adjacency with zero diagonal in compressed-row form.
///
/// Row `i` lists the distinct neighbors of node `i` in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    /// Symmetrizes and deduplicates; diagonal entries are dropped.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, j) in pairs {
            assert!(i < n && j < n, "pair ({i}, {j}) out of range for n = {n}");
            if i != j {
                rows[i].push(j);
                rows[j].push(i);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            targets.extend(row);
            offsets.push(targets.len());
        }
        Adjacency { offsets, targets }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Upper-triangle iteration: each edge once as `(i, j)` with `i < j`,
    /// ordered by `i` then `j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// `out = A x`. Each row is summed sequentially in ascending column
    /// order, so the result does not depend on how rows are scheduled.
    pub fn mul_vec<T: Scalar>(&self, x: &[T], out: &mut [T]) {
        assert_eq!(x.len(), self.node_count());
        assert_eq!(out.len(), self.node_count());
        for (i, o) in out.iter_mut().enumerate() {
            *o = self
                .neighbors(i)
                .iter()
                .fold(T::zero(), |acc, &j| acc + x[j]);
        }
    }
}

/// Per-type node counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TypeCounts([usize; 4]);

impl TypeCounts {
    pub fn get(&self, t: EntityType) -> usize {
        self.0[t.slot()]
    }

    pub fn incr(&mut self, t: EntityType) {
        self.0[t.slot()] += 1;
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EntityType, usize)> + '_ {
        EntityType::ALL.into_iter().map(move |t| (t, self.get(t)))
    }
}

impl FromIterator<EntityType> for TypeCounts {
    fn from_iter<I: IntoIterator<Item = EntityType>>(iter: I) -> Self {
        let mut counts = TypeCounts::default();
        for t in iter {
            counts.incr(t);
        }
        counts
    }
}

/// Frozen typed multigraph.
///
/// Node indices follow ascending byte order of entity ids, so index order and
/// id order coincide everywhere.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    entities: Vec<Entity>,
    index: HashMap<String, usize>,
    relations: Vec<Relation>,
    adjacency: Adjacency,
}

impl KnowledgeGraph {
    pub fn node_count(&self) -> usize {
        self.entities.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.edge_count()
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn entity(&self, i: usize) -> &Entity {
        &self.entities[i]
    }

    /// Sorted by `(src, dst, rtype)`.
    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn resolve(&self, id: &str) -> Result<usize, GraphError> {
        self.index_of(id)
            .ok_or_else(|| GraphError::UnknownEntity(id.to_string()))
    }

    pub fn type_counts(&self) -> TypeCounts {
        self.entities.iter().map(Entity::etype).collect()
    }

    /// Distinct neighbors in the collapsed view.
    pub fn degree(&self, id: &str) -> Result<usize, GraphError> {
        Ok(self.adjacency.degree(self.resolve(id)?))
    }

    /// Every relation between the pair, in either direction.
    pub fn relations_between<'a>(
        &'a self,
        a: &'a str,
        b: &'a str,
    ) -> impl Iterator<Item = &'a Relation> + 'a {
        self.relations.iter().filter(move |r| r.connects(a, b))
    }
}
