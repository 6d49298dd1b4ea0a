//! Finite 2-truncated semisimplicial sets: clique complexes of graphs,
//! degenerate expansions, categories of simplices and regularity.
//!
//! Face-map indexing is fixed once and for all: the face map with index `i`
//! omits vertex `i`. For an edge with vertex tuple (v0, v1) this gives
//! d0 = v1, d1 = v0; for a triangle (v0, v1, v2) it gives e0 = (v1, v2),
//! e1 = (v0, v2), e2 = (v0, v1). The face identities then read
//! d_i ∘ e_j = d_{j-1} ∘ e_i for i < j, and are checked exhaustively on
//! every constructed object.

use std::collections::{BTreeMap, BTreeSet};

use crate::{Error, Report, Result};

/// Directed graph with identified edges. Multigraphs are representable but
/// rejected by the clique construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    pub vertices: Vec<String>,
    /// (id, tail, head)
    pub edges: Vec<(String, String, String)>,
}

impl DiGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String, String)>) -> Result<Self> {
        check_vertex_names(&vertices)?;
        let vset: BTreeSet<&String> = vertices.iter().collect();
        for (id, t, h) in &edges {
            if !vset.contains(t) || !vset.contains(h) {
                return Err(Error::InvalidInput(format!(
                    "edge {id} references missing vertex ({t} -> {h})"
                )));
            }
        }
        Ok(DiGraph { vertices, edges })
    }

    /// No two edges share the same ordered (tail, head) pair.
    pub fn at_most_one_edge(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|(_, t, h)| seen.insert((t.clone(), h.clone())))
    }

    fn has_arc(&self, tail: &str, head: &str) -> bool {
        self.edges.iter().any(|(_, t, h)| t == tail && h == head)
    }
}

/// Undirected graph; edges are unordered vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl UGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String)>) -> Result<Self> {
        check_vertex_names(&vertices)?;
        let vset: BTreeSet<&String> = vertices.iter().collect();
        for (a, b) in &edges {
            if !vset.contains(a) || !vset.contains(b) {
                return Err(Error::InvalidInput(format!("edge ({a},{b}) references missing vertex")));
            }
        }
        Ok(UGraph { vertices, edges })
    }

    /// No duplicate pairs and no self-pairs.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|(a, b)| {
            a != b && seen.insert(if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) })
        })
    }

    pub fn has_edge(&self, u: &str, v: &str) -> bool {
        self.edges
            .iter()
            .any(|(a, b)| (a == u && b == v) || (a == v && b == u))
    }

    pub fn cycle(n: usize) -> UGraph {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges = (0..n).map(|i| (vertices[i].clone(), vertices[(i + 1) % n].clone())).collect();
        UGraph { vertices, edges }
    }

    pub fn complete(n: usize) -> UGraph {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((vertices[i].clone(), vertices[j].clone()));
            }
        }
        UGraph { vertices, edges }
    }

    pub fn path(n: usize) -> UGraph {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges = (0..n.saturating_sub(1))
            .map(|i| (vertices[i].clone(), vertices[i + 1].clone()))
            .collect();
        UGraph { vertices, edges }
    }

    /// Star K_{1,n}: one center joined to n leaves.
    pub fn star(n: usize) -> UGraph {
        let mut vertices = vec!["c".to_string()];
        vertices.extend((0..n).map(|i| format!("l{i}")));
        let edges = (0..n).map(|i| ("c".to_string(), format!("l{i}"))).collect();
        UGraph { vertices, edges }
    }
}

fn check_vertex_names(vertices: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for v in vertices {
        if v.contains('|') {
            return Err(Error::InvalidInput(format!("vertex name {v:?} contains '|'")));
        }
        if v.is_empty() {
            return Err(Error::InvalidInput("empty vertex name".into()));
        }
        if !seen.insert(v) {
            return Err(Error::InvalidInput(format!("duplicate vertex {v:?}")));
        }
    }
    Ok(())
}

/// Either flavour of graph, as it appears in the JSON interface.
#[derive(Debug, Clone)]
pub enum Graph {
    Directed(DiGraph),
    Undirected(UGraph),
}

impl Graph {
    pub fn vertices(&self) -> &[String] {
        match self {
            Graph::Directed(g) => &g.vertices,
            Graph::Undirected(g) => &g.vertices,
        }
    }

    /// Adjacency in the clique sense: an edge in each direction for digraphs,
    /// an edge for undirected graphs.
    fn adjacent(&self, u: &str, v: &str) -> bool {
        if u == v {
            return false;
        }
        match self {
            Graph::Directed(g) => g.has_arc(u, v) && g.has_arc(v, u),
            Graph::Undirected(g) => g.has_edge(u, v),
        }
    }
}

pub fn edge_id(u: &str, v: &str) -> String {
    format!("{u}|{v}")
}

pub fn triangle_id(u: &str, v: &str, w: &str) -> String {
    format!("{u}|{v}|{w}")
}

/// Finite 2-truncated semisimplicial set. Simplex identifiers are globally
/// unique strings; for objects built by this module they encode the vertex
/// tuple ("u|v", "u|v|w").
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiSimplicialSet2 {
    s0: Vec<String>,
    s1: Vec<String>,
    s2: Vec<String>,
    /// edge id -> [d0, d1]
    d: BTreeMap<String, [String; 2]>,
    /// triangle id -> [e0, e1, e2]
    e: BTreeMap<String, [String; 3]>,
}

impl SemiSimplicialSet2 {
    pub fn new(
        s0: Vec<String>,
        s1: Vec<(String, String, String)>,
        s2: Vec<(String, String, String, String)>,
    ) -> Result<Self> {
        let mut ids: BTreeSet<String> = BTreeSet::new();
        for id in s0.iter().chain(s1.iter().map(|t| &t.0)).chain(s2.iter().map(|t| &t.0)) {
            if !ids.insert(id.clone()) {
                return Err(Error::InvalidInput(format!("duplicate simplex id {id:?}")));
            }
        }
        let s0set: BTreeSet<&String> = s0.iter().collect();
        let mut d = BTreeMap::new();
        for (id, d0, d1) in &s1 {
            if !s0set.contains(d0) || !s0set.contains(d1) {
                return Err(Error::InvalidInput(format!("edge {id} has a missing vertex face")));
            }
            d.insert(id.clone(), [d0.clone(), d1.clone()]);
        }
        let s1ids: BTreeSet<&String> = s1.iter().map(|t| &t.0).collect();
        let mut e = BTreeMap::new();
        for (id, e0, e1, e2) in &s2 {
            for f in [e0, e1, e2] {
                if !s1ids.contains(f) {
                    return Err(Error::InvalidInput(format!("2-simplex {id} has a missing edge face")));
                }
            }
            e.insert(id.clone(), [e0.clone(), e1.clone(), e2.clone()]);
        }
        let x = SemiSimplicialSet2 {
            s0,
            s1: s1.into_iter().map(|t| t.0).collect(),
            s2: s2.into_iter().map(|t| t.0).collect(),
            d,
            e,
        };
        let rep = x.check_face_identities();
        if !rep.ok() {
            return Err(Error::InvalidInput(format!("face identities violated: {rep}")));
        }
        Ok(x)
    }

    pub fn s0(&self) -> &[String] {
        &self.s0
    }
    pub fn s1(&self) -> &[String] {
        &self.s1
    }
    pub fn s2(&self) -> &[String] {
        &self.s2
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.s0.len(), self.s1.len(), self.s2.len())
    }

    pub fn d0(&self, edge: &str) -> &str {
        &self.d[edge][0]
    }
    pub fn d1(&self, edge: &str) -> &str {
        &self.d[edge][1]
    }
    pub fn edge_faces(&self, edge: &str) -> &[String; 2] {
        &self.d[edge]
    }
    pub fn triangle_faces(&self, tri: &str) -> &[String; 3] {
        &self.e[tri]
    }

    /// Vertex tuple of a simplex: (v0) / (v0, v1) / (v0, v1, v2) in face order.
    pub fn vertex_tuple(&self, id: &str) -> Vec<String> {
        if self.d.contains_key(id) {
            vec![self.d1(id).to_string(), self.d0(id).to_string()]
        } else if let Some([e0, _, e2]) = self.e.get(id) {
            vec![self.d1(e2).to_string(), self.d0(e2).to_string(), self.d0(e0).to_string()]
        } else {
            vec![id.to_string()]
        }
    }

    pub fn dim_of(&self, id: &str) -> Option<usize> {
        if self.s0.iter().any(|v| v == id) {
            Some(0)
        } else if self.d.contains_key(id) {
            Some(1)
        } else if self.e.contains_key(id) {
            Some(2)
        } else {
            None
        }
    }

    /// d_i ∘ e_j = d_{j-1} ∘ e_i for i < j, for every 2-simplex.
    pub fn check_face_identities(&self) -> Report {
        let mut rep = Report::new();
        for t in &self.s2 {
            let [e0, e1, e2] = &self.e[t];
            let d = |edge: &String, i: usize| &self.d[edge][i];
            // (i, j) = (0,1): d0 e1 = d0 e0
            if d(e1, 0) != d(e0, 0) {
                rep.push(format!("2-simplex {t}: d0 e1 != d0 e0"));
            }
            // (i, j) = (0,2): d0 e2 = d1 e0
            if d(e2, 0) != d(e0, 1) {
                rep.push(format!("2-simplex {t}: d0 e2 != d1 e0"));
            }
            // (i, j) = (1,2): d1 e2 = d1 e1
            if d(e2, 1) != d(e1, 1) {
                rep.push(format!("2-simplex {t}: d1 e2 != d1 e1"));
            }
        }
        rep
    }

    /// A simplex is regular when the smallest sub-semisimplicial set containing
    /// it is a standard simplex: edges need two distinct vertices, 2-simplices
    /// three distinct vertices and three distinct edges.
    pub fn is_regular(&self) -> bool {
        for edge in &self.s1 {
            if self.d0(edge) == self.d1(edge) {
                return false;
            }
        }
        for t in &self.s2 {
            let [e0, e1, e2] = &self.e[t];
            if e0 == e1 || e0 == e2 || e1 == e2 {
                return false;
            }
            let vs = self.vertex_tuple(t);
            if vs[0] == vs[1] || vs[0] == vs[2] || vs[1] == vs[2] {
                return false;
            }
        }
        true
    }

    /// All simplex ids in a fixed order: vertices, edges, triangles.
    pub fn all_simplices(&self) -> Vec<String> {
        let mut out = self.s0.clone();
        out.extend(self.s1.iter().cloned());
        out.extend(self.s2.iter().cloned());
        out
    }

    /// The poset of simplices: x <= y iff x is an (iterated) face of y.
    pub fn simplex_poset(&self) -> crate::finspace::FinPreorder {
        let elements = self.all_simplices();
        let mut covers: Vec<(String, String)> = Vec::new();
        for edge in &self.s1 {
            for v in self.edge_faces(edge) {
                covers.push((v.clone(), edge.clone()));
            }
        }
        for t in &self.s2 {
            for f in self.triangle_faces(t) {
                covers.push((f.clone(), t.clone()));
            }
        }
        crate::finspace::FinPreorder::from_covers(elements, &covers)
            .expect("face relation over known ids")
    }

    /// Rebuild with ids renamed to canonical vertex tuples, vertex order taken
    /// lexicographically. Requires simplices to be determined by their vertex
    /// tuples (true for clique complexes and degenerate expansions).
    pub fn canonical_form(&self) -> Result<SemiSimplicialSet2> {
        let mut rename: BTreeMap<String, String> = BTreeMap::new();
        for v in &self.s0 {
            rename.insert(v.clone(), v.clone());
        }
        for edge in &self.s1 {
            let mut t = self.vertex_tuple(edge);
            t.sort();
            rename.insert(edge.clone(), t.join("|"));
        }
        for tri in &self.s2 {
            let mut t = self.vertex_tuple(tri);
            t.sort();
            rename.insert(tri.clone(), t.join("|"));
        }
        let targets: BTreeSet<&String> = rename.values().collect();
        if targets.len() != rename.len() {
            return Err(Error::Precondition(
                "simplices are not determined by vertex tuples; no canonical form".into(),
            ));
        }
        let mut s0 = self.s0.clone();
        s0.sort();
        let mut s1: Vec<(String, String, String)> = self
            .s1
            .iter()
            .map(|edge| {
                let mut t = self.vertex_tuple(edge);
                t.sort();
                (rename[edge].clone(), t[1].clone(), t[0].clone())
            })
            .collect();
        s1.sort();
        let mut s2: Vec<(String, String, String, String)> = self
            .s2
            .iter()
            .map(|tri| {
                let mut v = self.vertex_tuple(tri);
                v.sort();
                (
                    rename[tri].clone(),
                    edge_id(&v[1], &v[2]),
                    edge_id(&v[0], &v[2]),
                    edge_id(&v[0], &v[1]),
                )
            })
            .collect();
        s2.sort();
        SemiSimplicialSet2::new(s0, s1, s2)
    }
}

/// Map of 2-truncated semisimplicial sets, one assignment per dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SSMap {
    pub map0: BTreeMap<String, String>,
    pub map1: BTreeMap<String, String>,
    pub map2: BTreeMap<String, String>,
}

impl SSMap {
    pub fn identity(x: &SemiSimplicialSet2) -> SSMap {
        SSMap {
            map0: x.s0.iter().map(|v| (v.clone(), v.clone())).collect(),
            map1: x.s1.iter().map(|v| (v.clone(), v.clone())).collect(),
            map2: x.s2.iter().map(|v| (v.clone(), v.clone())).collect(),
        }
    }

    pub fn apply(&self, id: &str) -> Option<&String> {
        self.map0.get(id).or_else(|| self.map1.get(id)).or_else(|| self.map2.get(id))
    }

    /// Check totality and commutation with all face maps.
    pub fn validate(&self, src: &SemiSimplicialSet2, dst: &SemiSimplicialSet2) -> Report {
        let mut rep = Report::new();
        for v in &src.s0 {
            match self.map0.get(v) {
                None => rep.push(format!("vertex {v} unmapped")),
                Some(w) if !dst.s0.contains(w) => rep.push(format!("vertex image {w} not in target")),
                _ => {}
            }
        }
        for edge in &src.s1 {
            let Some(f) = self.map1.get(edge) else {
                rep.push(format!("edge {edge} unmapped"));
                continue;
            };
            if !dst.d.contains_key(f) {
                rep.push(format!("edge image {f} not in target"));
                continue;
            }
            for i in 0..2 {
                let lhs = dst.d[f][i].clone();
                let rhs = self.map0.get(&src.d[edge][i]).cloned().unwrap_or_default();
                if lhs != rhs {
                    rep.push(format!("edge {edge}: face map d{i} does not commute"));
                }
            }
        }
        for t in &src.s2 {
            let Some(f) = self.map2.get(t) else {
                rep.push(format!("2-simplex {t} unmapped"));
                continue;
            };
            if !dst.e.contains_key(f) {
                rep.push(format!("2-simplex image {f} not in target"));
                continue;
            }
            for i in 0..3 {
                let lhs = dst.e[f][i].clone();
                let rhs = self.map1.get(&src.e[t][i]).cloned().unwrap_or_default();
                if lhs != rhs {
                    rep.push(format!("2-simplex {t}: face map e{i} does not commute"));
                }
            }
        }
        rep
    }

    pub fn compose(&self, then: &SSMap) -> SSMap {
        let comp = |a: &BTreeMap<String, String>| -> BTreeMap<String, String> {
            a.iter()
                .map(|(k, v)| (k.clone(), then.apply(v).cloned().unwrap_or_else(|| v.clone())))
                .collect()
        };
        SSMap { map0: comp(&self.map0), map1: comp(&self.map1), map2: comp(&self.map2) }
    }
}

/// Clique complex per the fixed total order (the order of the vertex list):
/// vertices are the 1-cliques, edges the 2-cliques, 2-simplices the 3-cliques.
pub fn clique_complex(g: &Graph) -> Result<SemiSimplicialSet2> {
    match g {
        Graph::Directed(dg) => {
            if !dg.at_most_one_edge() {
                return Err(Error::Precondition(
                    "digraph has two edges with the same (tail, head); not in diGraphs_<=1".into(),
                ));
            }
        }
        Graph::Undirected(ug) => {
            if !ug.is_simple() {
                return Err(Error::Precondition(
                    "graph has duplicate or self pairs; not in Graphs_<=1".into(),
                ));
            }
        }
    }
    let vs = g.vertices().to_vec();
    let n = vs.len();
    let mut s1 = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if g.adjacent(&vs[i], &vs[j]) {
                // tuple (v_i, v_j): d0 omits v_i, d1 omits v_j
                s1.push((edge_id(&vs[i], &vs[j]), vs[j].clone(), vs[i].clone()));
            }
        }
    }
    let mut s2 = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !g.adjacent(&vs[i], &vs[j]) {
                continue;
            }
            for k in j + 1..n {
                if g.adjacent(&vs[i], &vs[k]) && g.adjacent(&vs[j], &vs[k]) {
                    s2.push((
                        triangle_id(&vs[i], &vs[j], &vs[k]),
                        edge_id(&vs[j], &vs[k]),
                        edge_id(&vs[i], &vs[k]),
                        edge_id(&vs[i], &vs[j]),
                    ));
                }
            }
        }
    }
    SemiSimplicialSet2::new(vs, s1, s2)
}

/// Try to recognize `x` as a clique complex G_• and return the graph together
/// with a vertex order compatible with all edge orientations.
pub fn as_clique_complex(x: &SemiSimplicialSet2) -> Result<(UGraph, Vec<String>)> {
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    for edge in x.s1() {
        let (lo, hi) = (x.d1(edge).to_string(), x.d0(edge).to_string());
        if lo == hi {
            return Err(Error::Precondition(format!("edge {edge} is a loop")));
        }
        let key = if lo <= hi { (lo.clone(), hi.clone()) } else { (hi.clone(), lo.clone()) };
        if !pairs.insert(key) {
            return Err(Error::Precondition(format!("two edges share the vertex pair of {edge}")));
        }
    }
    // orientation digraph d1 -> d0 must admit a topological order
    let order = topological_order(x)?;
    let pos: BTreeMap<&String, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();
    // triangles must be regular, order-coherent and exactly the 3-cliques
    let mut triangle_triples: BTreeSet<Vec<String>> = BTreeSet::new();
    for t in x.s2() {
        let vs = x.vertex_tuple(t);
        if vs[0] == vs[1] || vs[1] == vs[2] || vs[0] == vs[2] {
            return Err(Error::Precondition(format!("2-simplex {t} is degenerate")));
        }
        if !(pos[&vs[0]] < pos[&vs[1]] && pos[&vs[1]] < pos[&vs[2]]) {
            return Err(Error::Precondition(format!("2-simplex {t} is not order-coherent")));
        }
        let mut sorted = vs.clone();
        sorted.sort();
        if !triangle_triples.insert(sorted) {
            return Err(Error::Precondition(format!("duplicate 2-simplex over {t}")));
        }
    }
    let has_pair = |a: &str, b: &str| {
        let key = if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        pairs.contains(&key)
    };
    // flagness: every 3-clique of the edge graph carries exactly one triangle
    let vs = order.clone();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if !has_pair(&vs[i], &vs[j]) {
                continue;
            }
            for k in j + 1..vs.len() {
                if has_pair(&vs[i], &vs[k]) && has_pair(&vs[j], &vs[k]) {
                    let mut key = vec![vs[i].clone(), vs[j].clone(), vs[k].clone()];
                    key.sort();
                    if !triangle_triples.remove(&key) {
                        return Err(Error::Precondition(format!(
                            "3-clique {{{}, {}, {}}} has no 2-simplex; not a clique complex",
                            vs[i], vs[j], vs[k]
                        )));
                    }
                }
            }
        }
    }
    if !triangle_triples.is_empty() {
        return Err(Error::Precondition("2-simplex without a supporting 3-clique".into()));
    }
    let graph = UGraph::new(order.clone(), pairs.into_iter().collect())?;
    Ok((graph, order))
}

fn topological_order(x: &SemiSimplicialSet2) -> Result<Vec<String>> {
    let n = x.s0().len();
    let idx: BTreeMap<&String, usize> = x.s0().iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut indegree = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for edge in x.s1() {
        let lo = idx[&x.d1(edge).to_string()];
        let hi = idx[&x.d0(edge).to_string()];
        succ[lo].push(hi);
        indegree[hi] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::new();
    while let Some(&i) = ready.iter().next() {
        ready.remove(&i);
        order.push(x.s0()[i].clone());
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if order.len() != n {
        return Err(Error::Precondition(
            "edge orientations are cyclic; no compatible total order".into(),
        ));
    }
    Ok(order)
}

/// The degenerate expansion: one self loop per vertex, a 2-simplex
/// u -> u -> u per vertex, and 2-simplices u -> u -> v, u -> v -> v per
/// non-loop edge. Input must be a clique complex.
pub fn degenerate_expansion(x: &SemiSimplicialSet2) -> Result<SemiSimplicialSet2> {
    as_clique_complex(x)?;
    let mut s1: Vec<(String, String, String)> = x
        .s1()
        .iter()
        .map(|edge| (edge.clone(), x.d0(edge).to_string(), x.d1(edge).to_string()))
        .collect();
    let mut s2: Vec<(String, String, String, String)> = x
        .s2()
        .iter()
        .map(|t| {
            let [e0, e1, e2] = x.triangle_faces(t);
            (t.clone(), e0.clone(), e1.clone(), e2.clone())
        })
        .collect();
    let existing: BTreeSet<String> = x.all_simplices().into_iter().collect();
    let claim = |id: &String| -> Result<()> {
        if existing.contains(id) {
            return Err(Error::InvalidInput(format!(
                "id {id:?} already used; cannot add degenerate simplices"
            )));
        }
        Ok(())
    };
    for u in x.s0() {
        let loop_id = edge_id(u, u);
        claim(&loop_id)?;
        s1.push((loop_id.clone(), u.clone(), u.clone()));
        let uuu = triangle_id(u, u, u);
        claim(&uuu)?;
        s2.push((uuu, loop_id.clone(), loop_id.clone(), loop_id));
    }
    for edge in x.s1() {
        let (u, v) = (x.d1(edge).to_string(), x.d0(edge).to_string());
        let uuv = triangle_id(&u, &u, &v);
        claim(&uuv)?;
        // tuple (u, u, v): e0 = (u, v), e1 = (u, v), e2 = (u, u)
        s2.push((uuv, edge.clone(), edge.clone(), edge_id(&u, &u)));
        let uvv = triangle_id(&u, &v, &v);
        claim(&uvv)?;
        // tuple (u, v, v): e0 = (v, v), e1 = (u, v), e2 = (u, v)
        s2.push((uvv, edge_id(&v, &v), edge.clone(), edge.clone()));
    }
    SemiSimplicialSet2::new(x.s0().to_vec(), s1, s2)
}

/// Recognize `x` as the degenerate expansion of a clique complex and return
/// that core: the non-loop edges and vertex-distinct triangles must form a
/// clique complex, loops must appear once per vertex, and the degenerate
/// 2-simplices must be exactly the u->u->u, u->u->v, u->v->v family.
pub fn as_degenerate_expansion(x: &SemiSimplicialSet2) -> Result<SemiSimplicialSet2> {
    let mut loops: BTreeMap<String, String> = BTreeMap::new();
    let mut core_edges: Vec<(String, String, String)> = Vec::new();
    for e in x.s1() {
        let (v0, v1) = (x.d1(e).to_string(), x.d0(e).to_string());
        if v0 == v1 {
            if loops.insert(v0.clone(), e.clone()).is_some() {
                return Err(Error::Precondition(format!("vertex {v0} has two self loops")));
            }
        } else {
            core_edges.push((e.clone(), v1, v0));
        }
    }
    for v in x.s0() {
        if !loops.contains_key(v) {
            return Err(Error::Precondition(format!("vertex {v} has no self loop")));
        }
    }
    let mut core_tris: Vec<(String, String, String, String)> = Vec::new();
    let mut degenerate: BTreeMap<Vec<String>, String> = BTreeMap::new();
    for t in x.s2() {
        let tuple = x.vertex_tuple(t);
        let distinct: BTreeSet<&String> = tuple.iter().collect();
        if distinct.len() == 3 {
            let [e0, e1, e2] = x.triangle_faces(t);
            core_tris.push((t.clone(), e0.clone(), e1.clone(), e2.clone()));
        } else if degenerate.insert(tuple.clone(), t.clone()).is_some() {
            return Err(Error::Precondition(format!("duplicate degenerate 2-simplex over {t}")));
        }
    }
    let core = SemiSimplicialSet2::new(x.s0().to_vec(), core_edges, core_tris)?;
    as_clique_complex(&core)?;
    // the degenerate triangles must be exactly the expansion family
    let mut expected: BTreeSet<Vec<String>> = BTreeSet::new();
    for u in core.s0() {
        expected.insert(vec![u.clone(), u.clone(), u.clone()]);
    }
    for e in core.s1() {
        let (u, v) = (core.d1(e).to_string(), core.d0(e).to_string());
        expected.insert(vec![u.clone(), u.clone(), v.clone()]);
        expected.insert(vec![u.clone(), v.clone(), v.clone()]);
    }
    let got: BTreeSet<Vec<String>> = degenerate.keys().cloned().collect();
    if got != expected {
        return Err(Error::Precondition(
            "degenerate 2-simplices do not match the expansion family".into(),
        ));
    }
    Ok(core)
}

/// Simplices added by `degenerate_expansion` relative to the clique complex:
/// loops and the 2-simplices with a repeated vertex.
pub fn is_degenerate_simplex(x: &SemiSimplicialSet2, id: &str) -> bool {
    let t = x.vertex_tuple(id);
    let mut dedup = t.clone();
    dedup.dedup();
    dedup.len() != t.len()
}
