//! Fuzzy labeled graphs and the graph corresponding to a transition system.
//!
//! The graph of a system has one vertex per state followed by one vertex per
//! distinct distribution. A transition `⟨s, a, µ⟩` becomes an `a`-edge of
//! degree 1 from `s` to `µ`; each `µ` has an `ε`-edge of degree `µ(t)` to
//! every `t` in its support. States carry the reserved vertex label `s` at
//! degree 1 on top of their own labels; distributions are unlabeled.

use std::fmt;

use crate::degree::{Degree, DegreePool};
use crate::error::{Error, Result};
use crate::fuzzy_set::FuzzySet;
use crate::model::{DistId, Model, StateId, EPSILON, STATE_MARKER};

/// What a vertex of a system's graph stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexId {
    State(StateId),
    Dist(DistId),
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::State(s) => write!(f, "state#{s}"),
            VertexId::Dist(m) => write!(f, "dist#{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: u32,
    pub label: u32,
    pub target: u32,
    pub degree: Degree,
}

/// `⟨V, E, L, Σ_V, Σ_E⟩` with vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flg {
    vertex_alphabet: Vec<String>,
    edge_alphabet: Vec<String>,
    vertex_names: Vec<String>,
    labels: Vec<FuzzySet<u32>>,
    edges: Vec<Edge>,
    out_offsets: Vec<usize>,
    in_edges: Vec<u32>,
    in_offsets: Vec<usize>,
    state_count: Option<usize>,
}

impl Flg {
    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn vertex_alphabet(&self) -> &[String] {
        &self.vertex_alphabet
    }

    pub fn edge_alphabet(&self) -> &[String] {
        &self.edge_alphabet
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn label(&self, v: usize) -> &FuzzySet<u32> {
        &self.labels[v]
    }

    /// `support(E)`, sorted by source, label and target.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: usize) -> &[Edge] {
        &self.edges[self.out_edge_range(v)]
    }

    /// Indices into [`Flg::edges`] of the edges leaving `v`.
    pub fn out_edge_range(&self, v: usize) -> std::ops::Range<usize> {
        self.out_offsets[v]..self.out_offsets[v + 1]
    }

    /// Indices into [`Flg::edges`] of the edges entering `v`.
    pub fn in_edge_ids(&self, v: usize) -> &[u32] {
        &self.in_edges[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// `E(x, r, y)`.
    pub fn edge_degree(&self, x: usize, r: u32, y: usize) -> Degree {
        let out = self.out_edges(x);
        match out.binary_search_by(|e| (e.label, e.target).cmp(&(r, y as u32))) {
            Ok(i) => out[i].degree,
            Err(_) => Degree::ZERO,
        }
    }

    /// For a system's graph, the number of state vertices (they come first).
    pub fn state_count(&self) -> Option<usize> {
        self.state_count
    }

    pub fn vertex_id(&self, v: usize) -> Option<VertexId> {
        let n = self.state_count?;
        Some(if v < n { VertexId::State(StateId::from(v)) } else { VertexId::Dist(DistId::from(v - n)) })
    }

    pub fn is_state(&self, v: usize) -> bool {
        self.state_count.is_some_and(|n| v < n)
    }

    /// Distinct edge degrees plus `0` and `1`; its size is `l`.
    pub fn edge_degree_pool(&self) -> DegreePool {
        DegreePool::new(self.edges.iter().map(|e| e.degree))
    }

    /// Distinct degrees used by edges and vertex labels, plus `0` and `1`.
    pub fn degree_pool(&self) -> DegreePool {
        DegreePool::new(
            self.edges
                .iter()
                .map(|e| e.degree)
                .chain(self.labels.iter().flat_map(|l| l.iter().map(|(_, d)| d))),
        )
    }

    pub fn same_signature(&self, other: &Flg) -> Result<()> {
        if self.vertex_alphabet != other.vertex_alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "vertex labels {:?} vs {:?}",
                self.vertex_alphabet, other.vertex_alphabet
            )));
        }
        if self.edge_alphabet != other.edge_alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "edge labels {:?} vs {:?}",
                self.edge_alphabet, other.edge_alphabet
            )));
        }
        Ok(())
    }
}

/// Builder for arbitrary graphs.
#[derive(Debug, Clone, Default)]
pub struct FlgBuilder {
    vertex_alphabet: Vec<String>,
    edge_alphabet: Vec<String>,
    vertex_names: Vec<String>,
    labels: Vec<FuzzySet<u32>>,
    edges: Vec<Edge>,
    state_count: Option<usize>,
}

impl FlgBuilder {
    pub fn new(vertex_alphabet: Vec<String>, edge_alphabet: Vec<String>) -> Self {
        FlgBuilder { vertex_alphabet, edge_alphabet, ..Default::default() }
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, label: FuzzySet<u32>) -> Result<usize> {
        if let Some(bad) = label.support().find(|&p| p as usize >= self.vertex_alphabet.len()) {
            return Err(Error::UnknownLabel(format!("#{bad}")));
        }
        self.vertex_names.push(name.into());
        self.labels.push(label);
        Ok(self.vertex_names.len() - 1)
    }

    /// Sets `E(source, label, target) = degree`; zero degrees are ignored.
    pub fn add_edge(&mut self, source: usize, label: u32, target: usize, degree: Degree) -> Result<()> {
        let n = self.vertex_names.len();
        if source >= n || target >= n {
            return Err(Error::UnknownElement(format!("vertex #{}", source.max(target))));
        }
        if label as usize >= self.edge_alphabet.len() {
            return Err(Error::UnknownLabel(format!("edge label #{label}")));
        }
        if !degree.is_zero() {
            self.edges.push(Edge { source: source as u32, label, target: target as u32, degree });
        }
        Ok(())
    }

    pub fn build(mut self) -> Flg {
        // a repeated triple keeps its last degree
        let mut indexed: Vec<(usize, Edge)> = self.edges.drain(..).enumerate().collect();
        indexed.sort_by(|(i, a), (j, b)| {
            (a.source, a.label, a.target).cmp(&(b.source, b.label, b.target)).then(j.cmp(i))
        });
        indexed.dedup_by(|later, earlier| {
            (later.1.source, later.1.label, later.1.target)
                == (earlier.1.source, earlier.1.label, earlier.1.target)
        });
        let edges: Vec<Edge> = indexed.into_iter().map(|(_, e)| e).collect();

        let n = self.vertex_names.len();
        let mut out_offsets = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.source as usize + 1] += 1;
        }
        for v in 0..n {
            out_offsets[v + 1] += out_offsets[v];
        }
        let mut in_offsets = vec![0usize; n + 1];
        for e in &edges {
            in_offsets[e.target as usize + 1] += 1;
        }
        for v in 0..n {
            in_offsets[v + 1] += in_offsets[v];
        }
        let mut fill = in_offsets.clone();
        let mut in_edges = vec![0u32; edges.len()];
        for (i, e) in edges.iter().enumerate() {
            let slot = &mut fill[e.target as usize];
            in_edges[*slot] = i as u32;
            *slot += 1;
        }
        Flg {
            vertex_alphabet: self.vertex_alphabet,
            edge_alphabet: self.edge_alphabet,
            vertex_names: self.vertex_names,
            labels: self.labels,
            edges,
            out_offsets,
            in_edges,
            in_offsets,
            state_count: self.state_count,
        }
    }
}

/// The graph corresponding to a system. Runs in `O(|S| + size(δ))` plus
/// sorting the edges of each vertex.
pub fn model_to_flg<M: Model + ?Sized>(m: &M) -> Flg {
    let nfts = m.nfts();
    let sigma = m.label_alphabet();
    let marker = sigma.len() as u32;
    let epsilon = nfts.actions().len() as u32;
    let n_states = nfts.state_count();

    let mut vertex_alphabet = sigma.to_vec();
    vertex_alphabet.push(STATE_MARKER.to_string());
    let mut edge_alphabet = nfts.actions().to_vec();
    edge_alphabet.push(EPSILON.to_string());

    let mut vertex_names = Vec::with_capacity(n_states + nfts.distributions().len());
    let mut labels = Vec::with_capacity(vertex_names.capacity());
    for s in nfts.state_ids() {
        vertex_names.push(nfts.state_name(s).to_string());
        let mut label: Vec<(u32, Degree)> = m.state_label(s).iter().map(|(p, d)| (p.0, d)).collect();
        label.push((marker, Degree::ONE));
        labels.push(FuzzySet::from_entries(label));
    }
    for i in 0..nfts.distributions().len() {
        vertex_names.push(format!("µ{}", i + 1));
        labels.push(FuzzySet::new());
    }

    let mut edges = Vec::with_capacity(nfts.size_of_delta());
    for t in nfts.transitions() {
        edges.push(Edge {
            source: t.source.0,
            label: t.action.0,
            target: (n_states + t.target.index()) as u32,
            degree: Degree::ONE,
        });
    }
    for (i, mu) in nfts.distributions().iter().enumerate() {
        for (t, d) in mu.iter() {
            edges.push(Edge { source: (n_states + i) as u32, label: epsilon, target: t.0, degree: d });
        }
    }

    let builder = FlgBuilder {
        vertex_alphabet,
        edge_alphabet,
        vertex_names,
        labels,
        edges,
        state_count: Some(n_states),
    };
    builder.build()
}

pub fn nfts_to_flg(m: &crate::model::Nfts) -> Flg {
    model_to_flg(m)
}

pub fn nflts_to_flg(m: &crate::model::Nflts) -> Flg {
    model_to_flg(m)
}
