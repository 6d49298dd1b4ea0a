//! Vector bundles on graphs (local systems): a space per vertex, an
//! invertible matrix per edge, and cocycle conditions over the 3-cliques.
//!
//! Edge matrices are stored for the direction they were given and inverted on
//! demand. The cocycle orientation follows the total vertex order used by the
//! clique construction: for a 3-clique u < v < w the condition is
//! M(v,w) · M(u,v) = M(u,w).

use std::collections::BTreeMap;

use crate::exact::RatMat;
use crate::finspace::graph_poset;
use crate::sheafcore::PoSheaf;
use crate::sscomplex::{clique_complex, Graph, UGraph};
use crate::{Error, Report, Result};

#[derive(Debug, Clone)]
pub struct GraphBundle {
    pub graph: UGraph,
    pub rank: usize,
    /// matrix per edge, keyed by the direction it was supplied in
    mats: BTreeMap<(String, String), RatMat>,
}

impl GraphBundle {
    pub fn new(
        graph: UGraph,
        rank: usize,
        mats: BTreeMap<(String, String), RatMat>,
    ) -> Result<Self> {
        if !graph.is_simple() {
            return Err(Error::Precondition("bundle base must be a simple graph".into()));
        }
        for (u, v) in mats.keys() {
            if !graph.has_edge(u, v) {
                return Err(Error::InvalidInput(format!("matrix given for non-edge ({u},{v})")));
            }
        }
        for (a, b) in &graph.edges {
            let stored = mats.contains_key(&(a.clone(), b.clone()))
                as usize
                + mats.contains_key(&(b.clone(), a.clone())) as usize;
            if stored != 1 {
                return Err(Error::InvalidInput(format!(
                    "edge ({a},{b}) needs exactly one matrix, found {stored}"
                )));
            }
        }
        for ((u, v), m) in &mats {
            if m.nrows() != rank || m.ncols() != rank {
                return Err(Error::InvalidInput(format!("matrix on ({u},{v}) is not {rank}x{rank}")));
            }
            if !m.is_invertible() {
                return Err(Error::InvalidInput(format!("matrix on ({u},{v}) is singular")));
            }
        }
        Ok(GraphBundle { graph, rank, mats })
    }

    pub fn rank1(graph: UGraph, scalars: &[((&str, &str), crate::exact::Rat)]) -> Result<Self> {
        let mats = scalars
            .iter()
            .map(|((u, v), c)| {
                ((u.to_string(), v.to_string()), RatMat::from_rows(vec![vec![c.clone()]]))
            })
            .collect();
        GraphBundle::new(graph, 1, mats)
    }

    /// Transport matrix along the oriented edge u -> v.
    pub fn edge_matrix(&self, u: &str, v: &str) -> Result<RatMat> {
        if let Some(m) = self.mats.get(&(u.to_string(), v.to_string())) {
            return Ok(m.clone());
        }
        if let Some(m) = self.mats.get(&(v.to_string(), u.to_string())) {
            return m.inverse();
        }
        Err(Error::InvalidInput(format!("({u},{v}) is not an edge of the base graph")))
    }

    fn ordered_triangles(&self) -> Vec<(String, String, String)> {
        let vs = &self.graph.vertices;
        let mut out = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if !self.graph.has_edge(&vs[i], &vs[j]) {
                    continue;
                }
                for k in j + 1..vs.len() {
                    if self.graph.has_edge(&vs[i], &vs[k]) && self.graph.has_edge(&vs[j], &vs[k]) {
                        out.push((vs[i].clone(), vs[j].clone(), vs[k].clone()));
                    }
                }
            }
        }
        out
    }
}

/// Check the triangle cocycle on every 3-clique. Passes vacuously when the
/// graph has none (a cover with empty triple intersections).
pub fn validate_bundle(b: &GraphBundle) -> Report {
    let mut rep = Report::new();
    for (u, v, w) in b.ordered_triangles() {
        let uv = b.edge_matrix(&u, &v).unwrap();
        let vw = b.edge_matrix(&v, &w).unwrap();
        let uw = b.edge_matrix(&u, &w).unwrap();
        if vw.mul(&uv) != uw {
            rep.push(format!("cocycle fails on 3-clique ({u}, {v}, {w})"));
        }
    }
    rep
}

/// The local system as a sheaf on the simplex poset of the clique complex:
/// constant rank, all restrictions invertible. The bundle must pass the
/// cocycle validation (the triangle stalks need it for functoriality).
pub fn bundle_to_sheaf(b: &GraphBundle) -> Result<PoSheaf> {
    let rep = validate_bundle(b);
    if !rep.ok() {
        return Err(Error::Precondition(format!("invalid bundle: {rep}")));
    }
    let x = clique_complex(&Graph::Undirected(b.graph.clone()))?;
    let poset = x.simplex_poset();
    let mut cover_maps: BTreeMap<(usize, usize), RatMat> = BTreeMap::new();
    let idx = |id: &str| poset.index_of(id).unwrap();
    for e in x.s1() {
        let (u, v) = (x.d1(e).to_string(), x.d0(e).to_string());
        // F(e) is identified with the head copy F(v)
        cover_maps.insert((idx(&u), idx(e)), b.edge_matrix(&u, &v)?);
        cover_maps.insert((idx(&v), idx(e)), RatMat::identity(b.rank));
    }
    for t in x.s2() {
        let [e0, e1, e2] = x.triangle_faces(t);
        let vs = x.vertex_tuple(t); // (u, v, w) in order
        // F(t) is identified with F(w); e0 = (v,w), e1 = (u,w) carry the
        // identity, e2 = (u,v) ~ F(v) carries the transport v -> w
        cover_maps.insert((idx(e0), idx(t)), RatMat::identity(b.rank));
        cover_maps.insert((idx(e1), idx(t)), RatMat::identity(b.rank));
        cover_maps.insert((idx(e2), idx(t)), b.edge_matrix(&vs[1], &vs[2])?);
    }
    let dims = vec![b.rank; poset.len()];
    PoSheaf::vect_from_covers(poset, dims, cover_maps)
}

/// The local system as a sheaf on the vertex-edge poset of the graph itself,
/// the cover-with-empty-triple-intersections reading: no triangle points, so
/// no cocycle conditions constrain the data.
pub fn bundle_to_graph_sheaf(b: &GraphBundle) -> Result<PoSheaf> {
    let poset = graph_poset(&b.graph)?;
    let mut maps: BTreeMap<(usize, usize), RatMat> = BTreeMap::new();
    let idx = |id: &str| poset.index_of(id).unwrap();
    for (a, bb) in &b.graph.edges {
        let (u, v) = if a <= bb { (a.clone(), bb.clone()) } else { (bb.clone(), a.clone()) };
        let e = crate::sscomplex::edge_id(&u, &v);
        maps.insert((idx(&u), idx(&e)), b.edge_matrix(&u, &v)?);
        maps.insert((idx(&v), idx(&e)), RatMat::identity(b.rank));
    }
    PoSheaf::vect(poset, vec![b.rank; b.graph.vertices.len() + b.graph.edges.len()], maps)
}

/// Ordered product of edge transports along a closed walk given as oriented
/// steps (tail, head).
pub fn monodromy(b: &GraphBundle, walk: &[(String, String)]) -> Result<RatMat> {
    if walk.is_empty() {
        return Ok(RatMat::identity(b.rank));
    }
    for w in walk.windows(2) {
        if w[0].1 != w[1].0 {
            return Err(Error::Precondition(format!(
                "walk breaks between ({}, {}) and ({}, {})",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    if walk.last().unwrap().1 != walk[0].0 {
        return Err(Error::Precondition("walk is not closed".into()));
    }
    let mut acc = RatMat::identity(b.rank);
    for (u, v) in walk {
        acc = b.edge_matrix(u, v)?.mul(&acc);
    }
    Ok(acc)
}

/// Closed walk around the cycle graph v0 -> v1 -> ... -> v0.
pub fn cycle_walk(n: usize) -> Vec<(String, String)> {
    (0..n).map(|i| (format!("v{i}"), format!("v{}", (i + 1) % n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::cochain_complex;
    use crate::exact::{rat, rat_int};
    use crate::finspace::PointSet;

    fn k3_scalars(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> GraphBundle {
        // edges oriented around the cycle: v0->v1, v1->v2, v2->v0
        GraphBundle::rank1(
            UGraph::cycle(3),
            &[
                (("v0", "v1"), rat(a.0, a.1)),
                (("v1", "v2"), rat(b.0, b.1)),
                (("v2", "v0"), rat(c.0, c.1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn k3_cocycle_accepts_telescoping_product() {
        // 2 * 3 * 1/6 = 1 around the triangle
        let b = k3_scalars((2, 1), (3, 1), (1, 6));
        assert!(validate_bundle(&b).ok());
    }

    #[test]
    fn k3_cocycle_rejects_bad_product() {
        let b = k3_scalars((2, 1), (3, 1), (1, 1));
        let rep = validate_bundle(&b);
        assert!(!rep.ok());
        assert!(rep.problems[0].contains("v0, v1, v2"));
    }

    #[test]
    fn triangle_free_graphs_pass_vacuously() {
        let b = GraphBundle::rank1(
            UGraph::cycle(4),
            &[
                (("v0", "v1"), rat_int(5)),
                (("v1", "v2"), rat_int(7)),
                (("v2", "v3"), rat(1, 3)),
                (("v3", "v0"), rat_int(2)),
            ],
        )
        .unwrap();
        assert!(validate_bundle(&b).ok());
    }

    #[test]
    fn singular_matrices_rejected() {
        let r = GraphBundle::new(
            UGraph::path(2),
            1,
            BTreeMap::from([(("v0".to_string(), "v1".to_string()), RatMat::zero(1, 1))]),
        );
        assert!(r.is_err());
    }

    #[test]
    fn trivial_rank2_bundle_gives_constant_sheaf() {
        let b = GraphBundle::new(
            UGraph::path(2),
            2,
            BTreeMap::from([(("v0".to_string(), "v1".to_string()), RatMat::identity(2))]),
        )
        .unwrap();
        let f = bundle_to_sheaf(&b).unwrap();
        assert!(f.validate().ok());
        for i in 0..f.base.len() {
            assert_eq!(f.stalk_dim(i), 2);
        }
        let s = f.sections_vect(&PointSet::full(f.base.len())).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn monodromy_of_trivial_bundle_is_identity() {
        let b = GraphBundle::new(
            UGraph::cycle(4),
            2,
            BTreeMap::from_iter((0..4).map(|i| {
                ((format!("v{i}"), format!("v{}", (i + 1) % 4)), RatMat::identity(2))
            })),
        )
        .unwrap();
        assert!(monodromy(&b, &cycle_walk(4)).unwrap().is_identity());
    }

    #[test]
    fn monodromy_of_c3_scalars() {
        let b = k3_scalars((2, 1), (3, 1), (1, 1));
        let m = monodromy(&b, &cycle_walk(3)).unwrap();
        assert_eq!(m, RatMat::from_i64(&[&[6]]));
    }

    #[test]
    fn backtracking_walk_is_identity() {
        let b = GraphBundle::rank1(UGraph::path(2), &[(("v0", "v1"), rat_int(7))]).unwrap();
        let walk = vec![
            ("v0".to_string(), "v1".to_string()),
            ("v1".to_string(), "v0".to_string()),
        ];
        assert!(monodromy(&b, &walk).unwrap().is_identity());
    }

    #[test]
    fn broken_walks_rejected() {
        let b = k3_scalars((1, 1), (1, 1), (1, 1));
        let open_walk = vec![("v0".to_string(), "v1".to_string())];
        assert!(monodromy(&b, &open_walk).is_err());
        let skip = vec![
            ("v0".to_string(), "v1".to_string()),
            ("v2".to_string(), "v0".to_string()),
        ];
        assert!(monodromy(&b, &skip).is_err());
    }

    #[test]
    fn cycle_local_system_cohomology() {
        // monodromy 1 around C_4: H0 = 1, H1 = 1
        let unit = GraphBundle::rank1(
            UGraph::cycle(4),
            &[
                (("v0", "v1"), rat_int(2)),
                (("v1", "v2"), rat(1, 2)),
                (("v2", "v3"), rat_int(3)),
                (("v3", "v0"), rat(1, 3)),
            ],
        )
        .unwrap();
        assert!(monodromy(&unit, &cycle_walk(4)).unwrap().is_identity());
        let f = bundle_to_graph_sheaf(&unit).unwrap();
        let c = cochain_complex(&f, &PointSet::full(f.base.len())).unwrap();
        assert_eq!(c.cohomology_dims().unwrap(), vec![1, 1]);

        // nontrivial monodromy on C_3, over the vertex-edge poset: H0 = 0
        let twisted = k3_scalars((2, 1), (3, 1), (1, 1));
        let g = bundle_to_graph_sheaf(&twisted).unwrap();
        let c2 = cochain_complex(&g, &PointSet::full(g.base.len())).unwrap();
        let h = c2.cohomology_dims().unwrap();
        assert_eq!(h, vec![0, 0]);

        // product 1 on C_3 over the vertex-edge poset
        let flat = k3_scalars((2, 1), (3, 1), (1, 6));
        let gf = bundle_to_graph_sheaf(&flat).unwrap();
        let hf = cochain_complex(&gf, &PointSet::full(gf.base.len()))
            .unwrap()
            .cohomology_dims()
            .unwrap();
        assert_eq!(hf[0], 1);
    }

    #[test]
    fn invalid_bundle_rejected_by_sheaf_construction() {
        let bad = k3_scalars((2, 1), (3, 1), (1, 1));
        assert!(bundle_to_sheaf(&bad).is_err());
        // but the graph-poset local system still exists (no triangles there)
        assert!(bundle_to_graph_sheaf(&bad).is_ok());
    }

    #[test]
    fn valid_k3_bundle_sheaf_has_invertible_restrictions() {
        let b = k3_scalars((2, 1), (3, 1), (1, 6));
        let f = bundle_to_sheaf(&b).unwrap();
        assert!(f.validate().ok());
        for (i, j) in crate::sheafcore::strict_pairs(&f.base) {
            assert!(f.restriction(i, j).is_invertible());
        }
        // contractible: the filled triangle has H = (1, 0)
        let h = cochain_complex(&f, &PointSet::full(f.base.len()))
            .unwrap()
            .cohomology_dims()
            .unwrap();
        assert_eq!(&h[..2], &[1, 0]);
    }

    #[test]
    fn h0_equals_fixed_space_of_monodromy() {
        // brute force over small connected graphs: H0 of the local system
        // equals the dimension of the simultaneous fixed space of the
        // fundamental cycle monodromies at a basepoint
        let cases: Vec<GraphBundle> = vec![
            k3_scalars((2, 1), (3, 1), (1, 6)),
            k3_scalars((2, 1), (3, 1), (1, 1)),
            GraphBundle::rank1(
                UGraph::cycle(5),
                &[
                    (("v0", "v1"), rat_int(1)),
                    (("v1", "v2"), rat_int(2)),
                    (("v2", "v3"), rat_int(1)),
                    (("v3", "v4"), rat(1, 2)),
                    (("v4", "v0"), rat_int(1)),
                ],
            )
            .unwrap(),
            GraphBundle::new(
                UGraph::cycle(4),
                2,
                BTreeMap::from_iter((0..4).map(|i| {
                    let m = if i == 0 {
                        RatMat::from_i64(&[&[0, 1], &[1, 0]])
                    } else {
                        RatMat::identity(2)
                    };
                    ((format!("v{i}"), format!("v{}", (i + 1) % 4)), m)
                })),
            )
            .unwrap(),
        ];
        for b in cases {
            let f = bundle_to_graph_sheaf(&b).unwrap();
            let h0 = f.sections_vect(&PointSet::full(f.base.len())).unwrap().dim();
            // single fundamental cycle for C_n
            let m = monodromy(&b, &cycle_walk(b.graph.vertices.len())).unwrap();
            let fixed = m.sub(&RatMat::identity(b.rank)).kernel_basis().ncols();
            assert_eq!(h0, fixed);
        }
    }

    #[test]
    fn monodromy_is_conjugation_invariant_under_basepoint_change() {
        let b = GraphBundle::new(
            UGraph::cycle(3),
            2,
            BTreeMap::from([
                (
                    ("v0".to_string(), "v1".to_string()),
                    RatMat::from_i64(&[&[1, 1], &[0, 1]]),
                ),
                (
                    ("v1".to_string(), "v2".to_string()),
                    RatMat::from_i64(&[&[2, 0], &[0, 1]]),
                ),
                (
                    ("v2".to_string(), "v0".to_string()),
                    RatMat::from_i64(&[&[1, 0], &[3, 1]]),
                ),
            ]),
        )
        .unwrap();
        let at0 = monodromy(&b, &cycle_walk(3)).unwrap();
        let rotated: Vec<(String, String)> = vec![
            ("v1".to_string(), "v2".to_string()),
            ("v2".to_string(), "v0".to_string()),
            ("v0".to_string(), "v1".to_string()),
        ];
        let at1 = monodromy(&b, &rotated).unwrap();
        // at1 = T at0 T^{-1} with T the transport v0 -> v1
        let t = b.edge_matrix("v0", "v1").unwrap();
        assert_eq!(at1.mul(&t), t.mul(&at0));
    }
}
