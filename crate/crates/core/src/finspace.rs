//! Finite preorders and the Alexandrov topology: U_p, C_p, the
//! FTop <-> preorder equivalence, the T0 test and the poset of an undirected
//! graph. Open sets are bitsets over the element sequence; the open-set
//! oracle is up-closure membership, never a materialized lattice.

use std::collections::BTreeMap;

use crate::sscomplex::UGraph;
use crate::{Error, Report, Result};

/// Subset of the points of a finite space, as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PointSet {
    len: usize,
    bits: Vec<u64>,
}

impl PointSet {
    pub fn empty(len: usize) -> Self {
        PointSet { len, bits: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        let mut s = PointSet::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = PointSet::empty(len);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len_space(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        assert_eq!(self.len, other.len);
        PointSet {
            len: self.len,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersect(&self, other: &PointSet) -> PointSet {
        assert_eq!(self.len, other.len);
        PointSet {
            len: self.len,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn minus(&self, other: &PointSet) -> PointSet {
        assert_eq!(self.len, other.len);
        PointSet {
            len: self.len,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }
}

/// Finite preorder: elements with a reflexive transitive relation, stored as
/// a dense boolean matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinPreorder {
    elements: Vec<String>,
    index: BTreeMap<String, usize>,
    /// leq[i * n + j] == true iff element i <= element j
    leq: Vec<bool>,
}

/// Antisymmetric preorders are used under this alias where posetness is a
/// stated precondition; it is checked at the call sites, not by the type.
pub type FinPoset = FinPreorder;

impl FinPreorder {
    pub fn from_leq_matrix(elements: Vec<String>, leq: Vec<bool>) -> Result<Self> {
        let n = elements.len();
        if leq.len() != n * n {
            return Err(Error::InvalidInput("leq matrix has the wrong size".into()));
        }
        let index: BTreeMap<String, usize> =
            elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        if index.len() != n {
            return Err(Error::InvalidInput("duplicate element names".into()));
        }
        let p = FinPreorder { elements, index, leq };
        for i in 0..n {
            if !p.leq_idx(i, i) {
                return Err(Error::InvalidInput(format!("relation not reflexive at {}", p.elements[i])));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if p.leq_idx(i, j) && p.leq_idx(j, k) && !p.leq_idx(i, k) {
                        return Err(Error::InvalidInput(format!(
                            "relation not transitive: {} <= {} <= {}",
                            p.elements[i], p.elements[j], p.elements[k]
                        )));
                    }
                }
            }
        }
        Ok(p)
    }

    /// Generate the preorder from cover pairs (lo, hi) by reflexive-transitive
    /// closure.
    pub fn from_covers(elements: Vec<String>, covers: &[(String, String)]) -> Result<Self> {
        let n = elements.len();
        let index: BTreeMap<String, usize> =
            elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        if index.len() != n {
            return Err(Error::InvalidInput("duplicate element names".into()));
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (lo, hi) in covers {
            let i = *index
                .get(lo)
                .ok_or_else(|| Error::InvalidInput(format!("unknown element {lo:?}")))?;
            let j = *index
                .get(hi)
                .ok_or_else(|| Error::InvalidInput(format!("unknown element {hi:?}")))?;
            leq[i * n + j] = true;
        }
        // Floyd-Warshall style closure
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Ok(FinPreorder { elements, index, leq })
    }

    pub fn discrete(elements: Vec<String>) -> Result<Self> {
        FinPreorder::from_covers(elements, &[])
    }

    pub fn chain(elements: Vec<String>) -> Result<Self> {
        let covers: Vec<(String, String)> =
            elements.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        FinPreorder::from_covers(elements, &covers)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    pub fn leq_ids(&self, a: &str, b: &str) -> Result<bool> {
        let i = self.index_of(a).ok_or_else(|| Error::InvalidInput(format!("unknown {a:?}")))?;
        let j = self.index_of(b).ok_or_else(|| Error::InvalidInput(format!("unknown {b:?}")))?;
        Ok(self.leq_idx(i, j))
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq_idx(i, j) && self.leq_idx(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .filter(|&i| (0..n).all(|j| j == i || !(self.leq_idx(j, i) && !self.leq_idx(i, j))))
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .filter(|&i| (0..n).all(|j| j == i || !(self.leq_idx(i, j) && !self.leq_idx(j, i))))
            .collect()
    }

    /// Minimal elements of a subset: those with nothing strictly below inside
    /// the subset.
    pub fn minimal_in(&self, set: &PointSet) -> Vec<usize> {
        set.iter()
            .filter(|&i| set.iter().all(|j| j == i || !(self.leq_idx(j, i) && !self.leq_idx(i, j))))
            .collect()
    }

    /// Monotone map check for a vertex assignment into another preorder.
    pub fn is_monotone(&self, map: &BTreeMap<String, String>, target: &FinPreorder) -> bool {
        for a in &self.elements {
            let Some(fa) = map.get(a) else { return false };
            if target.index_of(fa).is_none() {
                return false;
            }
        }
        for a in &self.elements {
            for b in &self.elements {
                if self.leq_ids(a, b).unwrap() {
                    let fa = &map[a];
                    let fb = &map[b];
                    if !target.leq_ids(fa, fb).unwrap() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// T0 test: a finite Alexandrov space is T0 exactly when its specialization
/// preorder is antisymmetric.
pub fn is_t0(p: &FinPreorder) -> bool {
    p.is_antisymmetric()
}

/// Finite topological space presented by its specialization preorder; opens
/// are exactly the up-closed sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlexandrovSpace {
    preorder: FinPreorder,
}

/// The Alexandrov topology of a preorder.
pub fn alexandrov(p: &FinPreorder) -> AlexandrovSpace {
    AlexandrovSpace { preorder: p.clone() }
}

/// Specialization preorder of the space; a round trip with `alexandrov` is
/// the identity on both sides.
pub fn preorder_of(x: &AlexandrovSpace) -> FinPreorder {
    // recompute p <= q as U_p ⊇ U_q rather than returning the stored relation
    let n = x.preorder.len();
    let mut leq = vec![false; n * n];
    for p in 0..n {
        let up = x.min_open_idx(p);
        for q in 0..n {
            let uq = x.min_open_idx(q);
            leq[p * n + q] = uq.is_subset(&up);
        }
    }
    FinPreorder::from_leq_matrix(x.preorder.elements().to_vec(), leq)
        .expect("specialization preorder is reflexive and transitive")
}

impl AlexandrovSpace {
    pub fn preorder(&self) -> &FinPreorder {
        &self.preorder
    }

    pub fn len(&self) -> usize {
        self.preorder.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preorder.is_empty()
    }

    /// U_p: the minimal open set containing p (the up-set of p).
    pub fn min_open_idx(&self, p: usize) -> PointSet {
        let n = self.preorder.len();
        PointSet::from_indices(n, (0..n).filter(|&q| self.preorder.leq_idx(p, q)))
    }

    pub fn min_open(&self, id: &str) -> Result<PointSet> {
        let p = self
            .preorder
            .index_of(id)
            .ok_or_else(|| Error::InvalidInput(format!("unknown point {id:?}")))?;
        Ok(self.min_open_idx(p))
    }

    /// C_p: the closure of p (the down-set of p).
    pub fn closure_idx(&self, p: usize) -> PointSet {
        let n = self.preorder.len();
        PointSet::from_indices(n, (0..n).filter(|&q| self.preorder.leq_idx(q, p)))
    }

    /// A set is open iff it is up-closed.
    pub fn is_open(&self, set: &PointSet) -> bool {
        let n = self.preorder.len();
        assert_eq!(set.len_space(), n);
        set.iter().all(|p| (0..n).all(|q| !self.preorder.leq_idx(p, q) || set.contains(q)))
    }

    pub fn is_closed(&self, set: &PointSet) -> bool {
        let n = self.preorder.len();
        set.iter().all(|p| (0..n).all(|q| !self.preorder.leq_idx(q, p) || set.contains(q)))
    }

    pub fn whole(&self) -> PointSet {
        PointSet::full(self.preorder.len())
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.preorder.len())
    }

    /// Up-closure of a set of points.
    pub fn up_closure(&self, set: &PointSet) -> PointSet {
        let mut out = self.empty_set();
        for p in set.iter() {
            out = out.union(&self.min_open_idx(p));
        }
        out
    }

    /// A nonempty open is irreducible iff it has a least element, in which
    /// case it is U_p for that element. Tests cross-check this against the
    /// definition (not a union of two proper open subsets) by enumeration.
    pub fn is_irreducible_open(&self, set: &PointSet) -> bool {
        if !self.is_open(set) || set.is_empty() {
            return false;
        }
        set.iter().any(|p| self.min_open_idx(p) == *set)
    }

    /// Enumerate all open sets. Exponential; guarded for test-sized spaces.
    pub fn enumerate_opens(&self) -> Vec<PointSet> {
        let n = self.preorder.len();
        assert!(n <= 20, "open-set enumeration is exponential; refusing n > 20");
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let set = PointSet::from_indices(n, (0..n).filter(|&i| mask >> i & 1 == 1));
            if self.is_open(&set) {
                out.push(set);
            }
        }
        out
    }
}

/// The poset of an undirected graph: elements V ∪ E with v < e exactly when
/// v is an endpoint of e.
pub fn graph_poset(g: &UGraph) -> Result<FinPoset> {
    if !g.is_simple() {
        return Err(Error::Precondition("graph_poset needs a simple graph".into()));
    }
    let mut elements = g.vertices.clone();
    let mut covers = Vec::new();
    for (a, b) in &g.edges {
        let id = crate::sscomplex::edge_id(if a <= b { a } else { b }, if a <= b { b } else { a });
        covers.push((a.clone(), id.clone()));
        covers.push((b.clone(), id.clone()));
        elements.push(id);
    }
    FinPreorder::from_covers(elements, &covers)
}

/// Validation report for a preorder intended to be used as a poset.
pub fn poset_report(p: &FinPreorder) -> Report {
    let mut rep = Report::new();
    if !p.is_antisymmetric() {
        rep.push("relation is not antisymmetric");
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain2() -> FinPreorder {
        FinPreorder::chain(vec!["p".into(), "q".into()]).unwrap()
    }

    #[test]
    fn chain_opens() {
        let x = alexandrov(&chain2());
        let opens = x.enumerate_opens();
        // ∅, {q}, {p,q}
        assert_eq!(opens.len(), 3);
        assert!(x.is_open(&PointSet::from_indices(2, [1])));
        assert!(!x.is_open(&PointSet::from_indices(2, [0])));
    }

    #[test]
    fn discrete_opens() {
        let p = FinPreorder::discrete(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let x = alexandrov(&p);
        assert_eq!(x.enumerate_opens().len(), 8);
    }

    #[test]
    fn edge_graph_minimal_opens() {
        // poset of the graph a—b: U_a = {a, e}, U_e = {e}
        let g = UGraph::new(vec!["a".into(), "b".into()], vec![("a".into(), "b".into())]).unwrap();
        let p = graph_poset(&g).unwrap();
        let x = alexandrov(&p);
        let ua = x.min_open("a").unwrap();
        let ue = x.min_open("a|b").unwrap();
        assert_eq!(ua.count(), 2);
        assert!(ua.contains(p.index_of("a|b").unwrap()));
        assert_eq!(ue.count(), 1);
    }

    #[test]
    fn round_trips_are_exact() {
        for p in [
            chain2(),
            FinPreorder::discrete(vec!["a".into(), "b".into()]).unwrap(),
            graph_poset(&UGraph::cycle(3)).unwrap(),
        ] {
            let x = alexandrov(&p);
            assert_eq!(preorder_of(&x), p);
            assert_eq!(alexandrov(&preorder_of(&x)), x);
        }
    }

    #[test]
    fn t0_detects_antisymmetry() {
        assert!(is_t0(&chain2()));
        let p = FinPreorder::from_covers(
            vec!["a".into(), "b".into()],
            &[("a".into(), "b".into()), ("b".into(), "a".into())],
        )
        .unwrap();
        assert!(!is_t0(&p));
        assert!(!poset_report(&p).ok());
        // simplex posets are always T0
        let x = crate::sscomplex::clique_complex(&crate::sscomplex::Graph::Undirected(
            UGraph::complete(3),
        ))
        .unwrap();
        assert!(is_t0(&x.simplex_poset()));
    }

    #[test]
    fn graph_poset_shapes() {
        let c3 = graph_poset(&UGraph::cycle(3)).unwrap();
        assert_eq!(c3.len(), 6);
        assert_eq!(c3.minimal_elements().len(), 3);
        assert_eq!(c3.maximal_elements().len(), 3);

        let single = graph_poset(
            &UGraph::new(vec!["a".into(), "b".into()], vec![("a".into(), "b".into())]).unwrap(),
        )
        .unwrap();
        assert_eq!(single.len(), 3);

        let star = graph_poset(&UGraph::star(3)).unwrap();
        assert_eq!(star.len(), 7);
        for e in ["c|l0", "c|l1", "c|l2"] {
            assert!(star.leq_ids("c", e).unwrap());
        }
    }

    #[test]
    fn leq_iff_min_open_containment() {
        let p = graph_poset(&UGraph::cycle(4)).unwrap();
        let x = alexandrov(&p);
        for i in 0..p.len() {
            for j in 0..p.len() {
                let contain = x.min_open_idx(j).is_subset(&x.min_open_idx(i));
                assert_eq!(p.leq_idx(i, j), contain);
            }
        }
    }

    #[test]
    fn up_and_down_sets_are_open_and_closed_and_irreducible() {
        let p = graph_poset(&UGraph::cycle(3)).unwrap();
        let x = alexandrov(&p);
        for i in 0..p.len() {
            let up = x.min_open_idx(i);
            let cp = x.closure_idx(i);
            assert!(x.is_open(&up));
            assert!(x.is_closed(&cp));
            assert!(x.is_irreducible_open(&up));
            // brute-force irreducibility: U_p is not a union of two proper opens
            let opens = x.enumerate_opens();
            let mut reducible = false;
            for o1 in &opens {
                for o2 in &opens {
                    if o1.is_subset(&up)
                        && o2.is_subset(&up)
                        && *o1 != up
                        && *o2 != up
                        && o1.union(o2) == up
                    {
                        reducible = true;
                    }
                }
            }
            assert!(!reducible);
        }
    }

    #[test]
    fn non_irreducible_union_detected() {
        let p = FinPreorder::discrete(vec!["a".into(), "b".into()]).unwrap();
        let x = alexandrov(&p);
        assert!(!x.is_irreducible_open(&x.whole()));
    }
}
