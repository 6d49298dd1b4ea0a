//! Gluing data, gluing cubes, gluing functors on clique complexes, colimits
//! of finite ringed models, and the two finite-space constructions: the
//! signature-class space S_U and the nerve space S_U².

use std::collections::{BTreeMap, BTreeSet};

use crate::finspace::{alexandrov, FinPoset, FinPreorder, PointSet};
use crate::poly::Polynomial;
use crate::ringcat::{tensor_over, EmbCert, LocRing, RingMor};
use crate::sheafcore::{strict_pairs, PoSheaf, RingSections, SheafData};
use crate::sscomplex::{clique_complex, SemiSimplicialSet2, UGraph};
use crate::{Error, Report, Result};

// ---------------------------------------------------------------------------
// Affine gluing data
// ---------------------------------------------------------------------------

/// Gluing datum over the structural ring fragment: patch rings A_i, overlap
/// rings O(U_ij) with inclusions A_i -> O(U_ij), and ring-side transition
/// isomorphisms. Pairs with empty overlap are simply absent.
#[derive(Debug, Clone)]
pub struct AffineGluingDatum {
    pub patches: Vec<LocRing>,
    /// inclusion[(i, j)]: A_i -> O(U_ij); present iff the overlap is nonempty
    pub inclusions: BTreeMap<(usize, usize), RingMor>,
    /// phi_sharp[(j, i)]: O(U_ji) -> O(U_ij), the ring side of the space
    /// isomorphism φ_ji: U_ij -> U_ji
    pub phi_sharp: BTreeMap<(usize, usize), RingMor>,
}

impl AffineGluingDatum {
    pub fn overlap_ring(&self, i: usize, j: usize) -> LocRing {
        if i == j {
            return self.patches[i].clone();
        }
        self.inclusions
            .get(&(i, j))
            .map(|m| m.target.clone())
            .unwrap_or_else(LocRing::zero_ring)
    }

    /// The canonical presentation of the overlap U_ij as a localization of
    /// A_i, with the named isomorphism onto the stored overlap ring.
    pub(crate) fn canonical_overlap(&self, i: usize, j: usize) -> Result<(LocRing, RingMor)> {
        let inc = &self.inclusions[&(i, j)];
        match &inc.cert {
            EmbCert::LocIso { inverted, inverse } => {
                let canon = self.patches[i]
                    .with_inverted(&inverted.iter().cloned().collect::<Vec<_>>());
                let iso = RingMor::iso(&canon, &inc.target, inc.images.clone(), inverse.clone())?;
                Ok((canon, iso))
            }
            _ => Err(Error::Precondition(format!(
                "overlap inclusion ({i}, {j}) is not a certified open embedding"
            ))),
        }
    }

    /// Normalized transition n_ji between canonical presentations:
    /// (A_j)_{S_ji} -> (A_i)_{S_ij}.
    pub(crate) fn normalized_transition(&self, j: usize, i: usize) -> Result<RingMor> {
        let (_, iso_ji) = self.canonical_overlap(j, i)?;
        let (canon_ij, iso_ij) = self.canonical_overlap(i, j)?;
        let phi = self
            .phi_sharp
            .get(&(j, i))
            .ok_or_else(|| Error::InvalidInput(format!("missing transition ({j}, {i})")))?;
        let inv_ij = invert_iso(&iso_ij)?;
        let m = iso_ji.compose(phi)?.compose(&inv_ij)?;
        debug_assert_eq!(m.target, canon_ij);
        Ok(m)
    }
}

/// Invert a morphism carrying an isomorphism certificate.
pub fn invert_iso(m: &RingMor) -> Result<RingMor> {
    if m.source.is_zero() && m.target.is_zero() {
        return Ok(RingMor::to_zero(&m.target));
    }
    match &m.cert {
        EmbCert::LocIso { inverted, inverse } if inverted.iter().all(|f| m.source.is_unit(f)) => {
            RingMor::iso(&m.target, &m.source, inverse.clone(), m.images.clone())
        }
        _ => Err(Error::Precondition("morphism is not a certified isomorphism".into())),
    }
}

/// Check φ_ii = id (implicit), φ_ij ∘ φ_ji = id, overlap symmetry and the
/// cocycle condition on every ordered triple; every violation is listed.
pub fn validate_gluing_datum(w: &AffineGluingDatum) -> Report {
    let mut rep = Report::new();
    let n = w.patches.len();
    for (&(i, j), inc) in &w.inclusions {
        if i >= n || j >= n || i == j {
            rep.push(format!("overlap key ({i}, {j}) out of range"));
            continue;
        }
        if inc.source != w.patches[i] {
            rep.push(format!("overlap ({i}, {j}) does not include out of patch {i}"));
        }
        if !inc.is_open_embedding() {
            rep.push(format!("overlap inclusion ({i}, {j}) is not an open embedding"));
        }
        if inc.target.is_zero() {
            rep.push(format!("overlap ({i}, {j}) stored as the zero ring; omit empty overlaps"));
        }
        if !w.inclusions.contains_key(&(j, i)) {
            rep.push(format!("overlap ({i}, {j}) present but ({j}, {i}) missing"));
        }
    }
    if !rep.ok() {
        return rep;
    }
    // pairwise: φ_ij ∘ φ_ji = id on U_ij
    for &(i, j) in w.inclusions.keys() {
        let Some(phi_ji) = w.phi_sharp.get(&(j, i)) else {
            rep.push(format!("missing transition phi_sharp ({j}, {i})"));
            continue;
        };
        if phi_ji.source != w.overlap_ring(j, i) || phi_ji.target != w.overlap_ring(i, j) {
            rep.push(format!("transition ({j}, {i}) has wrong endpoints"));
            continue;
        }
        if phi_ji.is_iso() != crate::Verdict::Yes {
            rep.push(format!("transition ({j}, {i}) is not an isomorphism"));
            continue;
        }
        if let Some(phi_ij) = w.phi_sharp.get(&(i, j)) {
            match phi_ij.compose(phi_ji) {
                Ok(round) if round.eq_mor(&RingMor::identity(&w.overlap_ring(i, j))) => {}
                _ => rep.push(format!("phi ({i},{j}) and ({j},{i}) do not compose to the identity")),
            }
        }
    }
    if !rep.ok() {
        return rep;
    }
    // partial overlaps must be consistent: if U_ij and U_ik are both
    // nonempty they meet inside the domain patch A_i, so U_jk cannot be
    // empty (U_ij ∩ U_ik maps into it under φ_ji)
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                if w.inclusions.contains_key(&(i, j))
                    && w.inclusions.contains_key(&(i, k))
                    && !w.inclusions.contains_key(&(j, k))
                    && j < k
                {
                    rep.push(format!(
                        "overlaps ({i},{j}) and ({i},{k}) meet inside patch {i} but ({j},{k}) is empty"
                    ));
                }
            }
        }
    }
    if !rep.ok() {
        return rep;
    }
    // cocycle on ordered triples with all three overlaps nonempty
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                if ![(i, j), (i, k), (j, k)]
                    .iter()
                    .all(|&(a, b)| w.inclusions.contains_key(&(a, b)))
                {
                    continue;
                }
                if let Err(e) = check_cocycle_triple(w, i, j, k) {
                    rep.push(format!("cocycle fails on ({i}, {j}, {k}): {e}"));
                }
            }
        }
    }
    rep
}

/// φ_ki = φ_kj ∘ φ_ji on U_ij ∩ U_ik, checked on the canonical triple
/// localizations.
fn check_cocycle_triple(w: &AffineGluingDatum, i: usize, j: usize, k: usize) -> Result<()> {
    let extend = |m: &RingMor, src: &LocRing, dst: &LocRing| -> Result<RingMor> {
        let mm = RingMor {
            source: src.clone(),
            target: dst.clone(),
            images: m.images.clone(),
            cert: EmbCert::None,
        };
        mm.validate().map_err(|e| {
            Error::Precondition(format!("transition does not restrict to the triple overlap: {e}"))
        })?;
        Ok(mm)
    };
    let triple = |a: usize, b: usize, c: usize| -> Result<LocRing> {
        // O(U_ab ∩ U_ac) inside patch a
        let (rab, _) = w.canonical_overlap(a, b)?;
        let (rac, _) = w.canonical_overlap(a, c)?;
        let mut fs: Vec<Polynomial> = rab.inverted().iter().cloned().collect();
        fs.extend(rac.inverted().iter().cloned());
        Ok(w.patches[a].with_inverted(&fs))
    };
    let t_i = triple(i, j, k)?;
    let t_j = triple(j, i, k)?;
    let t_k = triple(k, i, j)?;
    let n_ji = w.normalized_transition(j, i)?;
    let n_kj = w.normalized_transition(k, j)?;
    let n_ki = w.normalized_transition(k, i)?;
    let ext_ji = extend(&n_ji, &t_j, &t_i)?;
    let ext_kj = extend(&n_kj, &t_k, &t_j)?;
    let ext_ki = extend(&n_ki, &t_k, &t_i)?;
    let composite = ext_kj.compose(&ext_ji)?;
    if !composite.eq_mor(&ext_ki) {
        return Err(Error::Precondition("φ_ki != φ_kj ∘ φ_ji on the triple overlap".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Gluing cubes (three patches)
// ---------------------------------------------------------------------------

/// Functor on the index category of a triangle: three vertex rings, three
/// edge rings with maps from their endpoints, and the triple ring with maps
/// from the edges. Spaces run opposite to rings.
#[derive(Debug, Clone)]
pub struct GluingCube {
    pub vertex_rings: [LocRing; 3],
    pub edge_rings: BTreeMap<(usize, usize), LocRing>,
    /// vertex_to_edge[(v, (i, j))]: A_v -> O(X_ij) for v ∈ {i, j}
    pub vertex_to_edge: BTreeMap<(usize, (usize, usize)), RingMor>,
    pub triple_ring: LocRing,
    pub edge_to_triple: BTreeMap<(usize, usize), RingMor>,
}

const CUBE_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

impl GluingCube {
    /// All morphisms open embeddings, squares commute and are cartesian.
    pub fn validate(&self) -> Report {
        let mut rep = Report::new();
        for (&(v, pair), m) in &self.vertex_to_edge {
            if m.source != self.vertex_rings[v] || m.target != self.edge_rings[&pair] {
                rep.push(format!("map A_{v} -> O(X_{}{}) has wrong endpoints", pair.0, pair.1));
            } else if !m.is_open_embedding() {
                rep.push(format!("map A_{v} -> O(X_{}{}) is not an open embedding", pair.0, pair.1));
            }
        }
        for (&pair, m) in &self.edge_to_triple {
            if m.source != self.edge_rings[&pair] || m.target != self.triple_ring {
                rep.push(format!("map O(X_{}{}) -> O(X_123) has wrong endpoints", pair.0, pair.1));
            } else if !m.is_open_embedding() {
                rep.push(format!("map O(X_{}{}) -> O(X_123) is not an open embedding", pair.0, pair.1));
            }
        }
        if !rep.ok() {
            return rep;
        }
        // three squares, one per vertex: commutativity and cartesianness
        for v in 0..3 {
            let pairs: Vec<(usize, usize)> =
                CUBE_PAIRS.iter().copied().filter(|&(a, b)| a == v || b == v).collect();
            let via = |pair: (usize, usize)| -> Result<RingMor> {
                self.vertex_to_edge[&(v, pair)].compose(&self.edge_to_triple[&pair])
            };
            match (via(pairs[0]), via(pairs[1])) {
                (Ok(m1), Ok(m2)) => {
                    if !m1.eq_mor(&m2) {
                        rep.push(format!("square at vertex {v} does not commute"));
                        continue;
                    }
                    // cartesian: the triple is the tensor of the two edges over A_v
                    match self.is_cartesian_at(v, pairs[0], pairs[1]) {
                        Ok(true) => {}
                        Ok(false) => rep.push(format!("square at vertex {v} is not cartesian")),
                        Err(e) => rep.push(format!("square at vertex {v}: {e}")),
                    }
                }
                _ => rep.push(format!("square at vertex {v} has non-composable maps")),
            }
        }
        rep
    }

    fn is_cartesian_at(
        &self,
        v: usize,
        p1: (usize, usize),
        p2: (usize, usize),
    ) -> Result<bool> {
        let e1 = &self.vertex_to_edge[&(v, p1)];
        let e2 = &self.vertex_to_edge[&(v, p2)];
        if e1.target.is_zero() || e2.target.is_zero() {
            return Ok(self.triple_ring.is_zero());
        }
        let factors = |m: &RingMor| -> Result<Vec<Polynomial>> {
            m.localization_factors()
                .map(|s| s.iter().cloned().collect())
                .ok_or_else(|| Error::Precondition("edge map is not certified".into()))
        };
        let mut fs = factors(e1)?;
        fs.extend(factors(e2)?);
        let tensor = self.vertex_rings[v].with_inverted(&fs);
        // the composite A_v -> triple must present the triple as exactly that
        // localization
        let comp = e1.compose(&self.edge_to_triple[&p1])?;
        if comp.target.is_zero() {
            return Ok(tensor.is_zero());
        }
        let Some(tfs) = comp.localization_factors() else {
            return Err(Error::Precondition("triple map is not certified".into()));
        };
        let canonical = self.vertex_rings[v].with_inverted(&tfs.iter().cloned().collect::<Vec<_>>());
        Ok(canonical == tensor)
    }
}

/// Extract the gluing datum GD(F) of a cube, with overlaps presented as
/// canonical localizations of the patches.
pub fn datum_of_cube(f: &GluingCube) -> Result<AffineGluingDatum> {
    let rep = f.validate();
    if !rep.ok() {
        return Err(Error::Precondition(format!("not a gluing cube: {rep}")));
    }
    let patches: Vec<LocRing> = f.vertex_rings.to_vec();
    let mut inclusions = BTreeMap::new();
    let mut phi_sharp = BTreeMap::new();
    for &(i, j) in &CUBE_PAIRS {
        let ring = &f.edge_rings[&(i, j)];
        if ring.is_zero() {
            continue;
        }
        for (a, b) in [(i, j), (j, i)] {
            let m = &f.vertex_to_edge[&(a, (i, j))];
            let EmbCert::LocIso { inverted, .. } = &m.cert else {
                return Err(Error::Precondition("edge map lost its certificate".into()));
            };
            let canon =
                patches[a].with_inverted(&inverted.iter().cloned().collect::<Vec<_>>());
            inclusions.insert((a, b), RingMor::localization(&patches[a], &canon)?);
        }
        // φ_ji: U_ij -> U_ji ring-side O(U_ji) -> O(U_ij): through the shared
        // edge ring: canon_ji -> E -> canon_ij
        for (a, b) in [(i, j), (j, i)] {
            let m_a = &f.vertex_to_edge[&(a, (i, j))];
            let m_b = &f.vertex_to_edge[&(b, (i, j))];
            let EmbCert::LocIso { inverted: sa, inverse: inva } = &m_a.cert else {
                unreachable!()
            };
            let EmbCert::LocIso { inverted: sb, inverse: invb } = &m_b.cert else {
                unreachable!()
            };
            let canon_a = patches[a].with_inverted(&sa.iter().cloned().collect::<Vec<_>>());
            let canon_b = patches[b].with_inverted(&sb.iter().cloned().collect::<Vec<_>>());
            // O(U_ba) = canon_b -> E: forward images of m_b; E -> canon_a: inva
            let to_e = RingMor::iso(&canon_b, ring, m_b.images.clone(), invb.clone())?;
            let from_e = RingMor::iso(ring, &canon_a, inva.clone(), m_a.images.clone())?;
            // phi_sharp[(b, a)]: O(U_ba) -> O(U_ab)
            phi_sharp.insert((b, a), to_e.compose(&from_e)?);
        }
    }
    Ok(AffineGluingDatum { patches, inclusions, phi_sharp })
}

/// Build the gluing cube F_W of a 3-patch datum: edge rings are the overlaps
/// in the lower patch, the triple is the pullback computed through the
/// cocycle data.
pub fn cube_of_datum(w: &AffineGluingDatum) -> Result<GluingCube> {
    if w.patches.len() != 3 {
        return Err(Error::Precondition("a gluing cube involves exactly three patches".into()));
    }
    let rep = validate_gluing_datum(w);
    if !rep.ok() {
        return Err(Error::Precondition(format!("invalid gluing datum: {rep}")));
    }
    let mut edge_rings = BTreeMap::new();
    let mut vertex_to_edge = BTreeMap::new();
    for &(i, j) in &CUBE_PAIRS {
        if !w.inclusions.contains_key(&(i, j)) {
            edge_rings.insert((i, j), LocRing::zero_ring());
            vertex_to_edge.insert((i, (i, j)), RingMor::to_zero(&w.patches[i]));
            vertex_to_edge.insert((j, (i, j)), RingMor::to_zero(&w.patches[j]));
            continue;
        }
        // F_W(X_ij) := U_ij, the overlap inside the lower patch
        let (canon_ij, _) = w.canonical_overlap(i, j)?;
        edge_rings.insert((i, j), canon_ij.clone());
        vertex_to_edge
            .insert((i, (i, j)), RingMor::localization(&w.patches[i], &canon_ij)?);
        // A_j -> O(U_ji) -> O(U_ij) through the transition
        let (canon_ji, _) = w.canonical_overlap(j, i)?;
        let incl_j = RingMor::localization(&w.patches[j], &canon_ji)?;
        let n_ji = w.normalized_transition(j, i)?;
        vertex_to_edge.insert((j, (i, j)), incl_j.compose(&n_ji)?);
    }
    // triple = pullback of the two edges over patch 0 when possible, else
    // through whichever vertex has both adjacent edges nonzero
    let mut triple_ring = LocRing::zero_ring();
    let mut edge_to_triple = BTreeMap::new();
    let anchor = (0..3).find(|&v| {
        CUBE_PAIRS
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .all(|&p| !edge_rings[&p].is_zero())
    });
    if let Some(v) = anchor {
        let pairs: Vec<(usize, usize)> =
            CUBE_PAIRS.iter().copied().filter(|&(a, b)| a == v || b == v).collect();
        let m1 = &vertex_to_edge[&(v, pairs[0])];
        let m2 = &vertex_to_edge[&(v, pairs[1])];
        let f1 = m1.localization_factors().unwrap().iter().cloned().collect::<Vec<_>>();
        let f2 = m2.localization_factors().unwrap().iter().cloned().collect::<Vec<_>>();
        let mut fs = f1;
        fs.extend(f2);
        triple_ring = w.patches[v].with_inverted(&fs);
        for &p in &pairs {
            let loc = RingMor::localization(&edge_rings[&p], &triple_ring)?;
            edge_to_triple.insert(p, loc);
        }
        // the opposite edge maps in through the transition to the anchor
        let opposite = CUBE_PAIRS.iter().copied().find(|&(a, b)| a != v && b != v).unwrap();
        if edge_rings[&opposite].is_zero() {
            // empty opposite overlap forces an empty triple
            triple_ring = LocRing::zero_ring();
            edge_to_triple = CUBE_PAIRS
                .iter()
                .map(|&p| (p, RingMor::to_zero(&edge_rings[&p])))
                .collect();
        } else {
            let (a, _) = opposite;
            // O(U_ab) localizes to O(U_ab ∩ U_av), which the restricted
            // transition n_{av} identifies with the triple inside A_v
            let n_av = w.normalized_transition(a, v)?;
            let EmbCert::LocIso { inverse: inv_av, .. } = &n_av.cert else {
                return Err(Error::Precondition("transition lost its certificate".into()));
            };
            let (canon_av, _) = w.canonical_overlap(a, v)?;
            let mut fs: Vec<Polynomial> =
                edge_rings[&opposite].inverted().iter().cloned().collect();
            fs.extend(canon_av.inverted().iter().cloned());
            let mid = w.patches[a].with_inverted(&fs);
            let loc = RingMor::localization(&edge_rings[&opposite], &mid)?;
            let iso = RingMor::iso(&mid, &triple_ring, n_av.images.clone(), inv_av.clone())
                .map_err(|e| {
                    Error::Precondition(format!("opposite edge does not reach the triple: {e}"))
                })?;
            edge_to_triple.insert(opposite, loc.compose(&iso)?);
        }
    } else {
        for &p in &CUBE_PAIRS {
            edge_to_triple.insert(p, RingMor::to_zero(&edge_rings[&p]));
        }
    }
    Ok(GluingCube {
        vertex_rings: [w.patches[0].clone(), w.patches[1].clone(), w.patches[2].clone()],
        edge_rings,
        vertex_to_edge,
        triple_ring,
        edge_to_triple,
    })
}

/// Structural equality of gluing data after canonicalizing both sides'
/// overlap presentations.
pub fn datum_eq(a: &AffineGluingDatum, b: &AffineGluingDatum) -> bool {
    if a.patches != b.patches {
        return false;
    }
    let keys: BTreeSet<(usize, usize)> = a.inclusions.keys().copied().collect();
    if keys != b.inclusions.keys().copied().collect() {
        return false;
    }
    for &(i, j) in &keys {
        let (ca, _) = match a.canonical_overlap(i, j) {
            Ok(x) => x,
            Err(_) => return false,
        };
        let (cb, _) = match b.canonical_overlap(i, j) {
            Ok(x) => x,
            Err(_) => return false,
        };
        if ca != cb {
            return false;
        }
        let na = a.normalized_transition(j, i);
        let nb = b.normalized_transition(j, i);
        match (na, nb) {
            (Ok(x), Ok(y)) if x.eq_mor(&y) => {}
            _ => return false,
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Gluing functors on clique complexes (affine patches)
// ---------------------------------------------------------------------------

/// Functor Γ(G_•)^op -> RngSpcs over the structural fragment, stored
/// ring-side: a ring per simplex and a ring map per face incidence.
#[derive(Debug, Clone)]
pub struct AffineGluingFunctor {
    pub base: SemiSimplicialSet2,
    pub rings: BTreeMap<String, LocRing>,
    /// maps[(x, y)]: F(x) -> F(y) for x a face of y (cover pairs only)
    pub maps: BTreeMap<(String, String), RingMor>,
}

/// Conditions of a gluing functor: every restriction to a triangle, edge or
/// point is a gluing cube, wedge or point, and non-adjacent vertices have
/// empty pairwise pullbacks.
pub fn check_gluing_functor(f: &AffineGluingFunctor) -> Report {
    let mut rep = Report::new();
    let (graph, _) = match crate::sscomplex::as_clique_complex(&f.base) {
        Ok(g) => g,
        Err(e) => {
            rep.push(format!("base is not a clique complex: {e}"));
            return rep;
        }
    };
    for id in f.base.all_simplices() {
        if !f.rings.contains_key(&id) {
            rep.push(format!("simplex {id} has no ring"));
        }
    }
    if !rep.ok() {
        return rep;
    }
    let get_map = |x: &str, y: &str| -> Option<&RingMor> { f.maps.get(&(x.to_string(), y.to_string())) };
    // wedges: both vertex -> edge maps are open embeddings
    for e in f.base.s1() {
        for v in [f.base.d0(e), f.base.d1(e)] {
            match get_map(v, e) {
                None => rep.push(format!("missing map {v} -> {e}")),
                Some(m) => {
                    if m.source != f.rings[v] || m.target != f.rings[e] {
                        rep.push(format!("map {v} -> {e} has wrong endpoints"));
                    } else if !m.is_open_embedding() {
                        rep.push(format!("map {v} -> {e} is not an open embedding"));
                    }
                }
            }
        }
    }
    if !rep.ok() {
        return rep;
    }
    // cubes: per triangle, build the cube restriction and validate it
    for t in f.base.s2() {
        match cube_of_triangle(f, t) {
            Ok(cube) => {
                let r = cube.validate();
                if !r.ok() {
                    rep.push(format!("triangle {t} is not a gluing cube: {r}"));
                }
            }
            Err(e) => rep.push(format!("triangle {t}: {e}")),
        }
    }
    // non-adjacency: through every common neighbor the pullback is empty
    let vs = &graph.vertices;
    for a in vs {
        for c in vs {
            if a >= c || graph.has_edge(a, c) {
                continue;
            }
            for b in vs {
                if b == a || b == c || !graph.has_edge(a, b) || !graph.has_edge(b, c) {
                    continue;
                }
                let e_ab = edge_simplex_id(&f.base, a, b);
                let e_bc = edge_simplex_id(&f.base, b, c);
                let (Some(m_ab), Some(m_bc)) = (get_map(b, &e_ab), get_map(b, &e_bc)) else {
                    continue;
                };
                match pullback_over(&f.rings[b], m_ab, m_bc) {
                    Ok(r) if r.is_zero() => {}
                    Ok(r) => rep.push(format!(
                        "vertices {a} and {c} are not adjacent but F({e_ab}) x_{{F({b})}} F({e_bc}) = {r} is nonempty"
                    )),
                    Err(e) => rep.push(format!("pullback over {b} undecidable: {e}")),
                }
            }
        }
    }
    rep
}

fn edge_simplex_id(x: &SemiSimplicialSet2, u: &str, v: &str) -> String {
    x.s1()
        .iter()
        .find(|e| {
            let (a, b) = (x.d1(e), x.d0(e));
            (a == u && b == v) || (a == v && b == u)
        })
        .cloned()
        .unwrap_or_else(|| crate::sscomplex::edge_id(u, v))
}

/// Pullback of Spec F(e1) <- Spec A_b -> Spec F(e2) in the fragment: present
/// both edges as localizations of the vertex ring and tensor.
fn pullback_over(base: &LocRing, m1: &RingMor, m2: &RingMor) -> Result<LocRing> {
    let canon = |m: &RingMor| -> Result<RingMor> {
        let fs = m
            .localization_factors()
            .ok_or_else(|| Error::Precondition("edge map not certified".into()))?;
        if m.target.is_zero() {
            return Ok(RingMor::to_zero(base));
        }
        let r = base.with_inverted(&fs.iter().cloned().collect::<Vec<_>>());
        RingMor::localization(base, &r)
    };
    tensor_over(base, &canon(m1)?, &canon(m2)?)
}

fn cube_of_triangle(f: &AffineGluingFunctor, t: &str) -> Result<GluingCube> {
    let vs = f.base.vertex_tuple(t);
    let [e0, e1, e2] = f.base.triangle_faces(t);
    // local indices: 0, 1, 2 = vs[0], vs[1], vs[2]; pairs map to face edges
    let edge_of = |i: usize, j: usize| -> &str {
        match (i, j) {
            (0, 1) => e2,
            (0, 2) => e1,
            (1, 2) => e0,
            _ => unreachable!(),
        }
    };
    let mut edge_rings = BTreeMap::new();
    let mut vertex_to_edge = BTreeMap::new();
    for &(i, j) in &CUBE_PAIRS {
        let e = edge_of(i, j);
        edge_rings.insert((i, j), f.rings[e].clone());
        for v in [i, j] {
            let m = f
                .maps
                .get(&(vs[v].clone(), e.to_string()))
                .ok_or_else(|| Error::InvalidInput(format!("missing map {} -> {e}", vs[v])))?;
            vertex_to_edge.insert((v, (i, j)), m.clone());
        }
    }
    let mut edge_to_triple = BTreeMap::new();
    for &(i, j) in &CUBE_PAIRS {
        let e = edge_of(i, j);
        let m = f
            .maps
            .get(&(e.to_string(), t.to_string()))
            .ok_or_else(|| Error::InvalidInput(format!("missing map {e} -> {t}")))?;
        edge_to_triple.insert((i, j), m.clone());
    }
    Ok(GluingCube {
        vertex_rings: [
            f.rings[&vs[0]].clone(),
            f.rings[&vs[1]].clone(),
            f.rings[&vs[2]].clone(),
        ],
        edge_rings,
        vertex_to_edge,
        triple_ring: f.rings[t].clone(),
        edge_to_triple,
    })
}

// ---------------------------------------------------------------------------
// Finite ringed models and their colimits
// ---------------------------------------------------------------------------

/// Finite Alexandrov ringed model: a finite poset with a sheaf on it.
#[derive(Debug, Clone)]
pub struct FiniteModel {
    pub space: FinPreorder,
    pub sheaf: PoSheaf,
}

impl FiniteModel {
    pub fn constant(space: &FinPreorder, dim: usize) -> FiniteModel {
        FiniteModel { space: space.clone(), sheaf: PoSheaf::constant(space, dim) }
    }

    /// Open sub-model on an up-closed subset, with renamed-to-same points.
    pub fn open_submodel(&self, open: &PointSet) -> Result<FiniteModel> {
        let space = alexandrov(&self.space);
        if !space.is_open(open) {
            return Err(Error::Precondition("submodel needs an open subset".into()));
        }
        let keep: Vec<usize> = open.iter().collect();
        let names: Vec<String> =
            keep.iter().map(|&i| self.space.elements()[i].clone()).collect();
        let mut leq = vec![false; keep.len() * keep.len()];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                leq[a * keep.len() + b] = self.space.leq_idx(i, j);
            }
        }
        let sub = FinPreorder::from_leq_matrix(names, leq)?;
        let SheafData::Vect { dims, maps } = &self.sheaf.data else {
            return Err(Error::Precondition("open_submodel implemented for vect sheaves".into()));
        };
        let sub_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
        let mut sub_maps = BTreeMap::new();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                if a != b && sub.leq_idx(a, b) {
                    sub_maps.insert((a, b), maps[&(i, j)].clone());
                }
            }
        }
        Ok(FiniteModel { space: sub.clone(), sheaf: PoSheaf::vect(sub, sub_dims, sub_maps)? })
    }
}

/// Open embedding of finite models: an injective monotone order-reflecting
/// point map with open image, under which the sheaf data agree literally.
#[derive(Debug, Clone)]
pub struct ModelEmbedding {
    pub map: BTreeMap<String, String>,
}

fn check_embedding(sub: &FiniteModel, ambient: &FiniteModel, j: &ModelEmbedding) -> Result<()> {
    let mut image = Vec::new();
    for p in sub.space.elements() {
        let q = j
            .map
            .get(p)
            .ok_or_else(|| Error::InvalidInput(format!("embedding misses point {p}")))?;
        let qi = ambient
            .space
            .index_of(q)
            .ok_or_else(|| Error::InvalidInput(format!("embedding image {q} not in ambient")))?;
        image.push(qi);
    }
    let mut seen = BTreeSet::new();
    if !image.iter().all(|i| seen.insert(*i)) {
        return Err(Error::InvalidInput("embedding is not injective".into()));
    }
    for (a, pa) in sub.space.elements().iter().enumerate() {
        for (b, pb) in sub.space.elements().iter().enumerate() {
            let lhs = sub.space.leq_ids(pa, pb).unwrap();
            let rhs = ambient.space.leq_idx(image[a], image[b]);
            if lhs != rhs {
                return Err(Error::InvalidInput(format!(
                    "embedding does not reflect the order at ({pa}, {pb})"
                )));
            }
        }
    }
    let img_set = PointSet::from_indices(ambient.space.len(), image.iter().copied());
    if !alexandrov(&ambient.space).is_open(&img_set) {
        return Err(Error::InvalidInput("embedding image is not open".into()));
    }
    // literal sheaf agreement
    let (SheafData::Vect { dims: ds, maps: ms }, SheafData::Vect { dims: da, maps: ma }) =
        (&sub.sheaf.data, &ambient.sheaf.data)
    else {
        return Err(Error::Precondition("model embeddings need vect sheaves".into()));
    };
    for (a, _) in sub.space.elements().iter().enumerate() {
        if ds[a] != da[image[a]] {
            return Err(Error::InvalidInput("embedding changes a stalk dimension".into()));
        }
        for (b, _) in sub.space.elements().iter().enumerate() {
            if a != b && sub.space.leq_idx(a, b) && ms[&(a, b)] != ma[&(image[a], image[b])] {
                return Err(Error::InvalidInput("embedding changes a restriction map".into()));
            }
        }
    }
    Ok(())
}

/// Gluing functor valued in finite models: patches on vertices, overlap
/// models on edges (and triangles), embeddings along the face maps.
#[derive(Debug, Clone)]
pub struct FiniteGluingFunctor {
    pub base: SemiSimplicialSet2,
    pub models: BTreeMap<String, FiniteModel>,
    /// embeddings[(face simplex, ambient simplex)]: overlap model of the
    /// higher simplex into the model of its face (spaces run op to Γ)
    pub embeddings: BTreeMap<(String, String), ModelEmbedding>,
}

/// Colimit of a finite-model gluing functor: quotient of the disjoint union
/// of the patches by the overlap identifications, with the glued sheaf.
pub fn glue_finite(f: &FiniteGluingFunctor) -> Result<FiniteModel> {
    crate::sscomplex::as_clique_complex(&f.base)
        .map_err(|e| Error::Precondition(format!("base must be a clique complex: {e}")))?;
    // validate embeddings
    for e in f.base.s1() {
        let overlap = f
            .models
            .get(e)
            .ok_or_else(|| Error::InvalidInput(format!("edge {e} has no overlap model")))?;
        for v in [f.base.d0(e), f.base.d1(e)] {
            let patch = &f.models[v];
            let j = f
                .embeddings
                .get(&(v.to_string(), e.to_string()))
                .ok_or_else(|| Error::InvalidInput(format!("missing embedding for ({v}, {e})")))?;
            check_embedding(overlap, patch, j)?;
        }
    }
    for t in f.base.s2() {
        let tri = f
            .models
            .get(t)
            .ok_or_else(|| Error::InvalidInput(format!("triangle {t} has no model")))?;
        for e in f.base.triangle_faces(t) {
            let j = f
                .embeddings
                .get(&(e.to_string(), t.to_string()))
                .ok_or_else(|| Error::InvalidInput(format!("missing embedding for ({e}, {t})")))?;
            check_embedding(tri, &f.models[e], j)?;
        }
    }
    // disjoint union of patch points
    let mut offsets: BTreeMap<String, usize> = BTreeMap::new();
    let mut total = 0usize;
    for v in f.base.s0() {
        offsets.insert(v.clone(), total);
        total += f.models[v].space.len();
    }
    let global =
        |v: &str, local: &str, models: &BTreeMap<String, FiniteModel>| -> usize {
            offsets[v] + models[v].space.index_of(local).unwrap()
        };
    // union-find over the identifications coming from edge overlaps
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for e in f.base.s1() {
        let (u, v) = (f.base.d1(e).to_string(), f.base.d0(e).to_string());
        let ju = &f.embeddings[&(u.clone(), e.clone())];
        let jv = &f.embeddings[&(v.clone(), e.clone())];
        for p in f.models[e].space.elements() {
            let gu = global(&u, &ju.map[p], &f.models);
            let gv = global(&v, &jv.map[p], &f.models);
            let (ru, rv) = (find(&mut parent, gu), find(&mut parent, gv));
            if ru != rv {
                parent[ru] = rv;
            }
        }
    }
    // triangle coherence: both routes to a vertex give the same class
    for t in f.base.s2() {
        let [e0, e1, e2] = f.base.triangle_faces(t).clone();
        for p in f.models[t].space.elements() {
            let mut classes = BTreeSet::new();
            for e in [&e0, &e1, &e2] {
                let jt = &f.embeddings[&(e.clone(), t.clone())];
                let in_edge = &jt.map[p];
                for v in [f.base.d0(e).to_string(), f.base.d1(e).to_string()] {
                    let jv = &f.embeddings[&(v.clone(), e.clone())];
                    classes.insert(find(&mut parent, global(&v, &jv.map[in_edge], &f.models)));
                }
            }
            if classes.len() != 1 {
                return Err(Error::InvalidInput(format!(
                    "inconsistent identifications over triangle {t} at point {p}"
                )));
            }
        }
    }
    // patches must embed: no two points of one patch identified
    for v in f.base.s0() {
        let m = &f.models[v];
        let mut reps = BTreeSet::new();
        for p in m.space.elements() {
            if !reps.insert(find(&mut parent, global(v, p, &f.models))) {
                return Err(Error::InvalidInput(format!(
                    "identifications collapse two points of patch {v}; patches do not embed"
                )));
            }
        }
    }
    // classes and the quotient preorder
    let mut class_of = vec![0usize; total];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..total {
        let r = find(&mut parent, i);
        if let Some(pos) = reps.iter().position(|&x| x == r) {
            class_of[i] = pos;
        } else {
            class_of[i] = reps.len();
            reps.push(r);
        }
    }
    let ncl = reps.len();
    let mut leq = vec![false; ncl * ncl];
    for i in 0..ncl {
        leq[i * ncl + i] = true;
    }
    for v in f.base.s0() {
        let m = &f.models[v];
        for (a, pa) in m.space.elements().iter().enumerate() {
            for (b, pb) in m.space.elements().iter().enumerate() {
                if m.space.leq_idx(a, b) {
                    let ca = class_of[global(v, pa, &f.models)];
                    let cb = class_of[global(v, pb, &f.models)];
                    leq[ca * ncl + cb] = true;
                }
            }
        }
    }
    // transitive closure
    for k in 0..ncl {
        for i in 0..ncl {
            if leq[i * ncl + k] {
                for j in 0..ncl {
                    if leq[k * ncl + j] {
                        leq[i * ncl + j] = true;
                    }
                }
            }
        }
    }
    let names: Vec<String> = (0..ncl).map(|i| format!("g{i}")).collect();
    let space = FinPreorder::from_leq_matrix(names.clone(), leq)?;
    if !space.is_antisymmetric() {
        return Err(Error::InvalidInput("glued relation is not antisymmetric".into()));
    }
    // sheaf on the quotient: stalks from any representative, cover maps from
    // any patch realizing the cover relation
    let mut dims = vec![usize::MAX; ncl];
    for v in f.base.s0() {
        let m = &f.models[v];
        let SheafData::Vect { dims: dv, .. } = &m.sheaf.data else {
            return Err(Error::Precondition("glue_finite needs vect sheaves".into()));
        };
        for (a, pa) in m.space.elements().iter().enumerate() {
            let c = class_of[global(v, pa, &f.models)];
            if dims[c] == usize::MAX {
                dims[c] = dv[a];
            } else if dims[c] != dv[a] {
                return Err(Error::InvalidInput("identified points have different stalks".into()));
            }
        }
    }
    let dims: Vec<usize> = dims.into_iter().map(|d| if d == usize::MAX { 0 } else { d }).collect();
    let mut cover_maps: BTreeMap<(usize, usize), crate::exact::RatMat> = BTreeMap::new();
    for (ci, cj) in crate::sheafcore::cover_pairs(&space) {
        // find a patch with representatives of both classes in relation
        let mut found = None;
        'outer: for v in f.base.s0() {
            let m = &f.models[v];
            let SheafData::Vect { maps: mv, .. } = &m.sheaf.data else { unreachable!() };
            for (a, pa) in m.space.elements().iter().enumerate() {
                if class_of[global(v, pa, &f.models)] != ci {
                    continue;
                }
                for (b, pb) in m.space.elements().iter().enumerate() {
                    if class_of[global(v, pb, &f.models)] == cj && m.space.leq_idx(a, b) && a != b {
                        found = Some(mv[&(a, b)].clone());
                        break 'outer;
                    }
                }
            }
        }
        let m = found.ok_or_else(|| {
            Error::InvalidInput("cover relation in the colimit not realized in any patch".into())
        })?;
        cover_maps.insert((ci, cj), m);
    }
    let sheaf = PoSheaf::vect_from_covers(space.clone(), dims, cover_maps)?;
    Ok(FiniteModel { space, sheaf })
}

// ---------------------------------------------------------------------------
// S_U: the signature-class space of a cover
// ---------------------------------------------------------------------------

/// The finite ringed space S_U of a covered model: points are classes of
/// U^s = ∩_{s ∈ U_i} U_i, the sheaf is the pushforward along the projection.
pub fn build_su(
    model: &FiniteModel,
    cover: &[PointSet],
) -> Result<(FiniteModel, BTreeMap<String, String>)> {
    let n = model.space.len();
    let space = alexandrov(&model.space);
    let mut union = PointSet::empty(n);
    for u in cover {
        if !space.is_open(u) {
            return Err(Error::Precondition("cover contains a non-open set".into()));
        }
        union = union.union(u);
    }
    if union != PointSet::full(n) {
        return Err(Error::Precondition("the given opens do not cover the model".into()));
    }
    // signatures
    let usig: Vec<PointSet> = (0..n)
        .map(|s| {
            let mut acc = PointSet::full(n);
            for u in cover {
                if u.contains(s) {
                    acc = acc.intersect(u);
                }
            }
            acc
        })
        .collect();
    let mut classes: Vec<(PointSet, Vec<usize>)> = Vec::new();
    for s in 0..n {
        if let Some(entry) = classes.iter_mut().find(|(u, _)| *u == usig[s]) {
            entry.1.push(s);
        } else {
            classes.push((usig[s].clone(), vec![s]));
        }
    }
    let ncl = classes.len();
    let names: Vec<String> = (0..ncl).map(|i| format!("q{i}")).collect();
    let mut leq = vec![false; ncl * ncl];
    for i in 0..ncl {
        for j in 0..ncl {
            leq[i * ncl + j] = classes[j].0.is_subset(&classes[i].0);
        }
    }
    let su_space = FinPoset::from_leq_matrix(names.clone(), leq)?;
    let proj: BTreeMap<String, String> = (0..n)
        .map(|s| {
            let c = classes.iter().position(|(_, members)| members.contains(&s)).unwrap();
            (model.space.elements()[s].clone(), names[c].clone())
        })
        .collect();
    if !model.space.is_monotone(&proj, &su_space) {
        return Err(Error::InvalidInput("projection is not monotone; inconsistent cover".into()));
    }
    let sheaf = match &model.sheaf.data {
        SheafData::Vect { .. } => crate::sheafcore::pushforward(&model.sheaf, &proj, &su_space)?,
        SheafData::Ring { .. } => pushforward_ring(&model.sheaf, &proj, &su_space)?,
    };
    Ok((FiniteModel { space: su_space, sheaf }, proj))
}

/// Pushforward of a ring sheaf along a monotone map, within the structural
/// fragment: every preimage must have structurally expressible sections.
pub fn pushforward_ring(
    f: &PoSheaf,
    map: &BTreeMap<String, String>,
    target: &FinPreorder,
) -> Result<PoSheaf> {
    if !f.base.is_monotone(map, target) {
        return Err(Error::Precondition("pushforward along a non-monotone map".into()));
    }
    let space_y = alexandrov(target);
    let preimage = |q: usize| -> PointSet {
        let uq = space_y.min_open_idx(q);
        PointSet::from_indices(
            f.base.len(),
            (0..f.base.len()).filter(|&p| {
                let fp = target.index_of(&map[&f.base.elements()[p]]).unwrap();
                uq.contains(fp)
            }),
        )
    };
    let n = target.len();
    let mut secs = Vec::with_capacity(n);
    for q in 0..n {
        secs.push(f.sections_ring(&preimage(q))?);
    }
    let mut stalks = Vec::with_capacity(n);
    for s in &secs {
        stalks.push(f.ring_of_sections(s).ok_or_else(|| {
            Error::Precondition("ring sections outside the structural fragment".into())
        })?);
    }
    let mut maps = BTreeMap::new();
    for (q1, q2) in strict_pairs(target) {
        let m = match (&secs[q1], &secs[q2]) {
            (_, RingSections::Zero) => RingMor::to_zero(&stalks[q1]),
            (RingSections::Zero, _) => {
                return Err(Error::InvalidInput(
                    "sections grow along a restriction; inconsistent sheaf".into(),
                ))
            }
            (RingSections::Stalk { at: a1 }, RingSections::Stalk { at: a2 }) => {
                section_value_map(f, &preimage(q1), *a1, *a2)?
            }
            _ => unreachable!("limit cases already rejected"),
        };
        maps.insert((q1, q2), m);
    }
    PoSheaf::ring(target.clone(), stalks, maps)
}

/// The map F(at) -> F(r) sending a section (determined by its value at the
/// dominant point `at` of the open) to its value at r.
fn section_value_map(f: &PoSheaf, open: &PointSet, at: usize, r: usize) -> Result<RingMor> {
    if f.base.leq_idx(at, r) {
        return Ok(f.ring_restriction(at, r));
    }
    // r sits over another minimal point m; recover the value through a
    // common refinement where F(m <= w) is invertible
    let minimals = f.base.minimal_in(open);
    for &m in &minimals {
        if !f.base.leq_idx(m, r) {
            continue;
        }
        for w in open.iter() {
            if f.base.leq_idx(at, w)
                && f.base.leq_idx(m, w)
                && f.ring_restriction(m, w).is_iso().is_yes()
            {
                let down = invert_iso(&f.ring_restriction(m, w))?;
                return f.ring_restriction(at, w).compose(&down)?.compose(&f.ring_restriction(m, r));
            }
        }
    }
    Err(Error::Precondition("no structural route from the dominant point".into()))
}

// ---------------------------------------------------------------------------
// Cover nerves and S_U²
// ---------------------------------------------------------------------------

/// Nerve of an affine cover: patch rings, overlap rings for intersecting
/// pairs, and triple rings (possibly zero) for the 3-cliques.
#[derive(Debug, Clone)]
pub struct CoverNerve {
    pub patch_names: Vec<String>,
    pub patches: Vec<LocRing>,
    pub overlaps: BTreeMap<(usize, usize), NerveOverlap>,
    pub triples: BTreeMap<(usize, usize, usize), NerveTriple>,
}

#[derive(Debug, Clone)]
pub struct NerveOverlap {
    pub ring: LocRing,
    /// A_i -> ring and A_j -> ring for the pair (i, j), i < j
    pub from_lo: RingMor,
    pub from_hi: RingMor,
}

#[derive(Debug, Clone)]
pub struct NerveTriple {
    pub ring: LocRing,
    /// maps from the three edge rings, keyed by the pairs
    pub from_edges: BTreeMap<(usize, usize), RingMor>,
}

impl CoverNerve {
    pub fn intersection_graph(&self) -> Result<UGraph> {
        let edges = self
            .overlaps
            .keys()
            .map(|&(i, j)| (self.patch_names[i].clone(), self.patch_names[j].clone()))
            .collect();
        UGraph::new(self.patch_names.clone(), edges)
    }

    pub fn validate(&self) -> Report {
        let mut rep = Report::new();
        if self.patch_names.len() != self.patches.len() {
            rep.push("one name per patch required");
            return rep;
        }
        for (&(i, j), o) in &self.overlaps {
            if i >= j || j >= self.patches.len() {
                rep.push(format!("overlap key ({i}, {j}) is not an ordered pair of patches"));
                continue;
            }
            if o.ring.is_zero() {
                rep.push(format!("overlap ({i}, {j}) is the zero ring; omit empty intersections"));
            }
            if o.from_lo.source != self.patches[i]
                || o.from_hi.source != self.patches[j]
                || o.from_lo.target != o.ring
                || o.from_hi.target != o.ring
            {
                rep.push(format!("overlap ({i}, {j}) maps have wrong endpoints"));
            }
        }
        if !rep.ok() {
            return rep;
        }
        // triples exactly on the 3-cliques
        let cliques: BTreeSet<(usize, usize, usize)> = {
            let mut out = BTreeSet::new();
            let n = self.patches.len();
            for i in 0..n {
                for j in i + 1..n {
                    if !self.overlaps.contains_key(&(i, j)) {
                        continue;
                    }
                    for k in j + 1..n {
                        if self.overlaps.contains_key(&(i, k))
                            && self.overlaps.contains_key(&(j, k))
                        {
                            out.insert((i, j, k));
                        }
                    }
                }
            }
            out
        };
        let have: BTreeSet<(usize, usize, usize)> = self.triples.keys().copied().collect();
        for t in cliques.difference(&have) {
            rep.push(format!("3-clique {t:?} has no triple entry (use the zero ring if empty)"));
        }
        for t in have.difference(&cliques) {
            rep.push(format!("triple {t:?} is not supported by pairwise overlaps"));
        }
        if !rep.ok() {
            return rep;
        }
        for (&(i, j, k), t) in &self.triples {
            for &(a, b) in &[(i, j), (i, k), (j, k)] {
                let Some(m) = t.from_edges.get(&(a, b)) else {
                    rep.push(format!("triple ({i},{j},{k}) misses the map from ({a},{b})"));
                    continue;
                };
                if m.source != self.overlaps[&(a, b)].ring || m.target != t.ring {
                    rep.push(format!("triple ({i},{j},{k}) map from ({a},{b}) has wrong endpoints"));
                }
            }
            if !rep.ok() {
                continue;
            }
            // commutativity: both routes from each patch agree
            for (a, b) in [(i, j), (i, k), (j, k)] {
                let o = &self.overlaps[&(a, b)];
                for (v, from) in [(a, &o.from_lo), (b, &o.from_hi)] {
                    // another edge at v inside the triple
                    let other = [(i, j), (i, k), (j, k)]
                        .into_iter()
                        .find(|&(c, d)| (c == v || d == v) && (c, d) != (a, b))
                        .unwrap();
                    let o2 = &self.overlaps[&other];
                    let from2 = if other.0 == v { &o2.from_lo } else { &o2.from_hi };
                    let r1 = from.compose(&t.from_edges[&(a, b)]);
                    let r2 = from2.compose(&t.from_edges[&other]);
                    match (r1, r2) {
                        (Ok(x), Ok(y)) if x.eq_mor(&y) => {}
                        _ => rep.push(format!(
                            "triple ({i},{j},{k}): routes from patch {v} disagree"
                        )),
                    }
                }
            }
        }
        rep
    }
}

/// Build S_U²: the Alexandrov space of the simplex poset of the cover's
/// clique complex, carrying the nerve's section rings. Returns the space,
/// the structure sheaf, and the paraschematic report (every restriction an
/// open embedding).
pub fn build_su2(nerve: &CoverNerve) -> Result<(FinPoset, PoSheaf, Report)> {
    let rep = nerve.validate();
    if !rep.ok() {
        return Err(Error::InvalidInput(format!("inconsistent nerve: {rep}")));
    }
    let graph = nerve.intersection_graph()?;
    let x = clique_complex(&crate::sscomplex::Graph::Undirected(graph))?;
    let poset = x.simplex_poset();
    let idx = |id: &str| poset.index_of(id).unwrap();
    let name_index: BTreeMap<&String, usize> =
        nerve.patch_names.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut stalks = vec![LocRing::zero_ring(); poset.len()];
    for (name, &i) in &name_index {
        stalks[idx(name)] = nerve.patches[i].clone();
    }
    let mut cover_maps: BTreeMap<(usize, usize), RingMor> = BTreeMap::new();
    for e in x.s1() {
        let (u, v) = (x.d1(e).to_string(), x.d0(e).to_string());
        let (iu, iv) = (name_index[&u], name_index[&v]);
        let key = if iu < iv { (iu, iv) } else { (iv, iu) };
        let o = &nerve.overlaps[&key];
        stalks[idx(e)] = o.ring.clone();
        let (mu, mv) = if iu < iv {
            (o.from_lo.clone(), o.from_hi.clone())
        } else {
            (o.from_hi.clone(), o.from_lo.clone())
        };
        cover_maps.insert((idx(&u), idx(e)), mu);
        cover_maps.insert((idx(&v), idx(e)), mv);
    }
    for t in x.s2() {
        let vs = x.vertex_tuple(t);
        let mut is: Vec<usize> = vs.iter().map(|v| name_index[v]).collect();
        is.sort();
        let key = (is[0], is[1], is[2]);
        let tr = &nerve.triples[&key];
        stalks[idx(t)] = tr.ring.clone();
        for e in x.triangle_faces(t) {
            let (a, b) = (name_index[&x.d1(e).to_string()], name_index[&x.d0(e).to_string()]);
            let ekey = if a < b { (a, b) } else { (b, a) };
            cover_maps.insert((idx(e), idx(t)), tr.from_edges[&ekey].clone());
        }
    }
    // complete to all strict pairs by composition
    let mut maps = cover_maps.clone();
    for (i, j) in strict_pairs(&poset) {
        if maps.contains_key(&(i, j)) {
            continue;
        }
        // vertices to triangles: compose through any edge
        let mut done = false;
        for k in 0..poset.len() {
            if k != i && k != j && poset.leq_idx(i, k) && poset.leq_idx(k, j) {
                if let (Some(m1), Some(m2)) = (cover_maps.get(&(i, k)), cover_maps.get(&(k, j))) {
                    maps.insert((i, j), m1.compose(m2)?);
                    done = true;
                    break;
                }
            }
        }
        if !done {
            return Err(Error::InvalidInput(format!("no route for pair ({i}, {j})")));
        }
    }
    let sheaf = PoSheaf::ring(poset.clone(), stalks, maps)?;
    // paraschematic: all restriction morphisms are open embeddings
    let mut para = Report::new();
    if let SheafData::Ring { maps, .. } = &sheaf.data {
        for ((i, j), m) in maps {
            if !m.is_open_embedding() {
                para.push(format!(
                    "restriction {} -> {} is not an open embedding",
                    poset.elements()[*i],
                    poset.elements()[*j]
                ));
            }
        }
    }
    Ok((poset, sheaf, para))
}

/// The standard projective-line gluing datum: Q[x] and Q[y] glued along
/// their Laurent rings by y -> 1/x.
pub fn p1_datum() -> AffineGluingDatum {
    let qx = LocRing::polynomial(&["x"]);
    let qy = LocRing::polynomial(&["y"]);
    let (rx, inc_x) = crate::ringcat::localize(&qx, &Polynomial::var("x"));
    let (ry, inc_y) = crate::ringcat::localize(&qy, &Polynomial::var("y"));
    let phi10 = RingMor::iso(
        &ry,
        &rx,
        BTreeMap::from([("y".to_string(), crate::poly::Laurent::inv_var("x"))]),
        BTreeMap::from([("x".to_string(), crate::poly::Laurent::inv_var("y"))]),
    )
    .expect("projective-line transition");
    let phi01 = invert_iso(&phi10).expect("transition inverse");
    AffineGluingDatum {
        patches: vec![qx, qy],
        inclusions: BTreeMap::from([((0, 1), inc_x), ((1, 0), inc_y)]),
        phi_sharp: BTreeMap::from([((1, 0), phi10), ((0, 1), phi01)]),
    }
}

/// The standard projective-line cover nerve: patches Q[x] and Q[y], overlap
/// Q[x]_x with the second patch mapping in through y -> 1/x.
pub fn p1_nerve_standard() -> CoverNerve {
    let qx = LocRing::polynomial(&["x"]);
    let qy = LocRing::polynomial(&["y"]);
    let (rx, inc_x) = crate::ringcat::localize(&qx, &Polynomial::var("x"));
    let (ry, inc_y) = crate::ringcat::localize(&qy, &Polynomial::var("y"));
    let iso = RingMor::iso(
        &ry,
        &rx,
        BTreeMap::from([("y".to_string(), crate::poly::Laurent::inv_var("x"))]),
        BTreeMap::from([("x".to_string(), crate::poly::Laurent::inv_var("y"))]),
    )
    .expect("projective-line transition");
    let from_hi = inc_y.compose(&iso).expect("composite embedding");
    CoverNerve {
        patch_names: vec!["U1".into(), "U2".into()],
        patches: vec![qx, qy],
        overlaps: BTreeMap::from([(
            (0, 1),
            NerveOverlap { ring: rx, from_lo: inc_x, from_hi },
        )]),
        triples: BTreeMap::new(),
    }
}

/// Drop the 2-simplex points whose triple-intersection ring is zero; the
/// sheaf pushed forward along the inclusion is isomorphic to the original,
/// which is checked stalkwise and reported.
pub fn remove_empty_triples(
    poset: &FinPoset,
    sheaf: &PoSheaf,
) -> Result<(FinPoset, PoSheaf, Vec<String>, Report)> {
    let SheafData::Ring { stalks, maps } = &sheaf.data else {
        return Err(Error::Precondition("remove_empty_triples needs a ring sheaf".into()));
    };
    let keep: Vec<usize> = (0..poset.len())
        .filter(|&i| {
            !(stalks[i].is_zero() && poset.maximal_elements().contains(&i))
        })
        .collect();
    let removed: Vec<String> = (0..poset.len())
        .filter(|i| !keep.contains(i))
        .map(|i| poset.elements()[i].clone())
        .collect();
    let names: Vec<String> = keep.iter().map(|&i| poset.elements()[i].clone()).collect();
    let k = keep.len();
    let mut leq = vec![false; k * k];
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            leq[a * k + b] = poset.leq_idx(i, j);
        }
    }
    let sub = FinPoset::from_leq_matrix(names, leq)?;
    let sub_stalks: Vec<LocRing> = keep.iter().map(|&i| stalks[i].clone()).collect();
    let mut sub_maps = BTreeMap::new();
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            if a != b && sub.leq_idx(a, b) {
                sub_maps.insert((a, b), maps[&(i, j)].clone());
            }
        }
    }
    let sub_sheaf = PoSheaf::ring(sub.clone(), sub_stalks, sub_maps)?;
    // the comparison morphism is a sheaf isomorphism: on each minimal open
    // U_p the removed points contribute zero rings only
    let mut rep = Report::new();
    for (a, &i) in keep.iter().enumerate() {
        if sheaf.stalk_ring(i) != sub_sheaf.stalk_ring(a) {
            rep.push(format!("stalk changed at {}", poset.elements()[i]));
        }
    }
    for &r in &removed.iter().map(|n| poset.index_of(n).unwrap()).collect::<Vec<_>>() {
        if !stalks[r].is_zero() {
            rep.push(format!("removed point {} had a nonzero ring", poset.elements()[r]));
        }
    }
    Ok((sub, sub_sheaf, removed, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finspace::graph_poset;
    use crate::poly::Polynomial;
    use crate::ringcat::localize;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }

    /// Three opens D(g_i) of the affine line glued along their honest
    /// intersections D(g_i g_j) with identity transitions: a genuine gluing
    /// datum for any choice of nonzero g_i.
    fn line_3patch_datum(g: [Polynomial; 3]) -> AffineGluingDatum {
        let a = LocRing::polynomial(&["x"]);
        let patches: Vec<LocRing> = g.iter().map(|gi| localize(&a, gi).0).collect();
        let mut inclusions = BTreeMap::new();
        let mut phi_sharp = BTreeMap::new();
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let prod = g[i].mul(&g[j]);
            let (r, _) = localize(&a, &prod);
            inclusions.insert((i, j), RingMor::localization(&patches[i], &r).unwrap());
            inclusions.insert((j, i), RingMor::localization(&patches[j], &r).unwrap());
            phi_sharp.insert((i, j), RingMor::identity(&r));
            phi_sharp.insert((j, i), RingMor::identity(&r));
        }
        AffineGluingDatum { patches, inclusions, phi_sharp }
    }

    #[test]
    fn p1_datum_validates() {
        assert!(validate_gluing_datum(&p1_datum()).ok());
    }

    #[test]
    fn single_patch_datum_validates() {
        let w = AffineGluingDatum {
            patches: vec![LocRing::polynomial(&["x"])],
            inclusions: BTreeMap::new(),
            phi_sharp: BTreeMap::new(),
        };
        assert!(validate_gluing_datum(&w).ok());
    }

    #[test]
    fn broken_cocycle_is_reported_with_the_triple() {
        // all three overlaps are the symmetric Q[x]_x; replacing φ_21 by the
        // sign flip x -> -x breaks φ_20 = φ_21 ∘ φ_10 on the triple overlap
        let mut w = line_3patch_datum([x(), Polynomial::one(), Polynomial::one()]);
        let r = w.overlap_ring(1, 2);
        let neg = crate::poly::Laurent::from_poly(x().neg());
        let flip = RingMor::iso(
            &r,
            &r,
            BTreeMap::from([("x".to_string(), neg.clone())]),
            BTreeMap::from([("x".to_string(), neg)]),
        )
        .unwrap();
        w.phi_sharp.insert((2, 1), flip.clone());
        w.phi_sharp.insert((1, 2), flip);
        let rep = validate_gluing_datum(&w);
        assert!(!rep.ok());
        assert!(rep.problems.iter().any(|p| p.contains("cocycle")));
    }

    #[test]
    fn cube_datum_round_trip_exact() {
        let w = line_3patch_datum([Polynomial::one(), x(), x().sub(&Polynomial::one())]);
        let cube = cube_of_datum(&w).unwrap();
        assert!(cube.validate().ok());
        let back = datum_of_cube(&cube).unwrap();
        assert!(datum_eq(&w, &back));
        // and the cube rebuilt from the datum is the same cube
        let cube2 = cube_of_datum(&back).unwrap();
        assert_eq!(cube.triple_ring, cube2.triple_ring);
        assert_eq!(cube.edge_rings, cube2.edge_rings);
    }

    #[test]
    fn all_identity_cube_round_trip() {
        let w = line_3patch_datum([Polynomial::one(), Polynomial::one(), Polynomial::one()]);
        let cube = cube_of_datum(&w).unwrap();
        // fully overlapping: every edge ring is the patch itself
        assert_eq!(cube.edge_rings[&(0, 1)], LocRing::polynomial(&["x"]));
        let back = datum_of_cube(&cube).unwrap();
        assert!(datum_eq(&w, &back));
    }

    #[test]
    fn empty_overlap_gives_zero_apex() {
        // only patches 0 and 1 overlap; the third patch is disjoint, so the
        // triple intersection is empty and the apex is the zero ring
        let a = LocRing::polynomial(&["x"]);
        let (r, inc) = localize(&a, &x());
        let w = AffineGluingDatum {
            patches: vec![a.clone(), a.clone(), a],
            inclusions: BTreeMap::from([((0, 1), inc.clone()), ((1, 0), inc)]),
            phi_sharp: BTreeMap::from([
                ((0, 1), RingMor::identity(&r)),
                ((1, 0), RingMor::identity(&r)),
            ]),
        };
        assert!(validate_gluing_datum(&w).ok());
        let cube = cube_of_datum(&w).unwrap();
        assert!(cube.triple_ring.is_zero());
        assert!(cube.validate().ok());
    }

    #[test]
    fn partially_empty_overlaps_rejected() {
        // U_01 and U_12 nonempty with U_02 empty cannot satisfy the domain
        // conditions of a gluing datum
        let a = LocRing::polynomial(&["x"]);
        let mut inclusions = BTreeMap::new();
        let mut phi_sharp = BTreeMap::new();
        for (i, j, f) in [(0usize, 1usize, x()), (1, 2, x().sub(&Polynomial::one()))] {
            let (r, inc) = localize(&a, &f);
            inclusions.insert((i, j), inc.clone());
            inclusions.insert((j, i), inc);
            phi_sharp.insert((i, j), RingMor::identity(&r));
            phi_sharp.insert((j, i), RingMor::identity(&r));
        }
        let w = AffineGluingDatum { patches: vec![a.clone(), a.clone(), a], inclusions, phi_sharp };
        let rep = validate_gluing_datum(&w);
        assert!(!rep.ok());
        assert!(rep.problems.iter().any(|p| p.contains("empty")));
    }

    fn p1_functor() -> AffineGluingFunctor {
        let g = UGraph::new(vec!["a".into(), "b".into()], vec![("a".into(), "b".into())]).unwrap();
        let base = clique_complex(&crate::sscomplex::Graph::Undirected(g)).unwrap();
        let qx = LocRing::polynomial(&["x"]);
        let qy = LocRing::polynomial(&["y"]);
        let (rx, inc_x) = localize(&qx, &x());
        let (ry, inc_y) = localize(&qy, &Polynomial::var("y"));
        let iso = RingMor::iso(
            &ry,
            &rx,
            BTreeMap::from([("y".to_string(), crate::poly::Laurent::inv_var("x"))]),
            BTreeMap::from([("x".to_string(), crate::poly::Laurent::inv_var("y"))]),
        )
        .unwrap();
        let from_b = inc_y.compose(&iso).unwrap();
        let _ = ry;
        AffineGluingFunctor {
            base,
            rings: BTreeMap::from([
                ("a".to_string(), qx),
                ("b".to_string(), qy),
                ("a|b".to_string(), rx),
            ]),
            maps: BTreeMap::from([
                (("a".to_string(), "a|b".to_string()), inc_x),
                (("b".to_string(), "a|b".to_string()), from_b),
            ]),
        }
    }

    #[test]
    fn p1_functor_checks_out() {
        assert!(check_gluing_functor(&p1_functor()).ok());
    }

    #[test]
    fn single_point_functor_checks_out() {
        let g = UGraph::new(vec!["a".into()], vec![]).unwrap();
        let base = clique_complex(&crate::sscomplex::Graph::Undirected(g)).unwrap();
        let f = AffineGluingFunctor {
            base,
            rings: BTreeMap::from([("a".to_string(), LocRing::polynomial(&["x"]))]),
            maps: BTreeMap::new(),
        };
        assert!(check_gluing_functor(&f).ok());
    }

    #[test]
    fn path_with_nonzero_pullback_fails_nonadjacency() {
        // a - b - c with a, c non-adjacent but overlapping localizations
        let g = UGraph::path(3);
        let base = clique_complex(&crate::sscomplex::Graph::Undirected(g)).unwrap();
        let a = LocRing::polynomial(&["x"]);
        let (r1, m1) = localize(&a, &x());
        let (r2, m2) = localize(&a, &x().sub(&Polynomial::one()));
        let f = AffineGluingFunctor {
            base,
            rings: BTreeMap::from([
                ("v0".to_string(), a.clone()),
                ("v1".to_string(), a.clone()),
                ("v2".to_string(), a.clone()),
                ("v0|v1".to_string(), r1.clone()),
                ("v1|v2".to_string(), r2.clone()),
            ]),
            maps: BTreeMap::from([
                (("v0".to_string(), "v0|v1".to_string()), m1.clone()),
                (("v1".to_string(), "v0|v1".to_string()), m1),
                (("v1".to_string(), "v1|v2".to_string()), m2.clone()),
                (("v2".to_string(), "v1|v2".to_string()), m2),
            ]),
        };
        let rep = check_gluing_functor(&f);
        assert!(!rep.ok());
        assert!(rep.problems.iter().any(|p| p.contains("not adjacent")));
    }

    fn star_model() -> FiniteModel {
        // one closed point under two open points: a half-open interval
        let p = FinPreorder::from_covers(
            vec!["m".into(), "a".into(), "b".into()],
            &[("m".into(), "a".into()), ("m".into(), "b".into())],
        )
        .unwrap();
        FiniteModel::constant(&p, 1)
    }

    fn two_point_discrete() -> FiniteModel {
        FiniteModel::constant(&FinPreorder::discrete(vec!["p".into(), "q".into()]).unwrap(), 1)
    }

    #[test]
    fn glue_two_disjoint_points() {
        let g = UGraph::new(vec!["u".into(), "v".into()], vec![]).unwrap();
        let base = clique_complex(&crate::sscomplex::Graph::Undirected(g)).unwrap();
        let pt = FiniteModel::constant(&FinPreorder::discrete(vec!["p".into()]).unwrap(), 1);
        let f = FiniteGluingFunctor {
            base,
            models: BTreeMap::from([("u".to_string(), pt.clone()), ("v".to_string(), pt)]),
            embeddings: BTreeMap::new(),
        };
        let m = glue_finite(&f).unwrap();
        assert_eq!(m.space.len(), 2);
        assert!(m.space.is_antisymmetric());
        let x = alexandrov(&m.space);
        assert_eq!(x.enumerate_opens().len(), 4);
    }

    #[test]
    fn glue_circle_from_two_stars() {
        let g = UGraph::new(vec!["u".into(), "v".into()], vec![("u".into(), "v".into())]).unwrap();
        let base = clique_complex(&crate::sscomplex::Graph::Undirected(g)).unwrap();
        let overlap = two_point_discrete();
        let models = BTreeMap::from([
            ("u".to_string(), star_model()),
            ("v".to_string(), star_model()),
            ("u|v".to_string(), overlap),
        ]);
        let emb = |a: &str, b: &str| ModelEmbedding {
            map: BTreeMap::from([("p".to_string(), a.to_string()), ("q".to_string(), b.to_string())]),
        };
        let f = FiniteGluingFunctor {
            base,
            models,
            embeddings: BTreeMap::from([
                (("u".to_string(), "u|v".to_string()), emb("a", "b")),
                (("v".to_string(), "u|v".to_string()), emb("a", "b")),
            ]),
        };
        let m = glue_finite(&f).unwrap();
        assert_eq!(m.space.len(), 4);
        // pseudo-circle: H0 = H1 = 1
        let c = crate::cohomology::cochain_complex(&m.sheaf, &PointSet::full(4)).unwrap();
        assert_eq!(c.cohomology_dims().unwrap(), vec![1, 1]);
    }

    #[test]
    fn identity_self_gluing_returns_the_patch() {
        let g = UGraph::new(vec!["u".into()], vec![]).unwrap();
        let base = clique_complex(&crate::sscomplex::Graph::Undirected(g)).unwrap();
        let patch = star_model();
        let f = FiniteGluingFunctor {
            base,
            models: BTreeMap::from([("u".to_string(), patch.clone())]),
            embeddings: BTreeMap::new(),
        };
        let m = glue_finite(&f).unwrap();
        assert_eq!(m.space.len(), patch.space.len());
    }

    #[test]
    fn su_of_chain_two_open_cover() {
        // S = chain p < q, cover {S, U_q}: two signature classes
        let chain = FinPreorder::chain(vec!["p".into(), "q".into()]).unwrap();
        let model = FiniteModel::constant(&chain, 1);
        let whole = PointSet::full(2);
        let uq = PointSet::from_indices(2, [1]);
        let (su, proj) = build_su(&model, &[whole, uq]).unwrap();
        assert_eq!(su.space.len(), 2);
        assert_ne!(proj["p"], proj["q"]);
    }

    #[test]
    fn su_of_trivial_cover_is_a_point_with_global_sections() {
        let p = graph_poset(&UGraph::cycle(3)).unwrap();
        let model = FiniteModel::constant(&p, 1);
        let (su, _) = build_su(&model, &[PointSet::full(p.len())]).unwrap();
        assert_eq!(su.space.len(), 1);
        assert_eq!(su.sheaf.stalk_dim(0), 1); // global sections of the circle
    }

    #[test]
    fn su_of_circle_two_star_cover() {
        // the 4-point circle covered by its two 3-point stars: the two open
        // edge points share the same signature, so S_U has 3 points
        let g = UGraph::new(
            vec!["w0".into(), "w1".into()],
            vec![("w0".into(), "w1".into())],
        )
        .unwrap();
        let _ = g;
        let circle = FinPreorder::from_covers(
            vec!["v0".into(), "v1".into(), "e1".into(), "e2".into()],
            &[
                ("v0".into(), "e1".into()),
                ("v0".into(), "e2".into()),
                ("v1".into(), "e1".into()),
                ("v1".into(), "e2".into()),
            ],
        )
        .unwrap();
        let model = FiniteModel::constant(&circle, 1);
        let x = alexandrov(&circle);
        let u1 = x.min_open("v0").unwrap();
        let u2 = x.min_open("v1").unwrap();
        assert_eq!(u1.count(), 3);
        assert_eq!(u2.count(), 3);
        let (su, _) = build_su(&model, &[u1, u2]).unwrap();
        assert_eq!(su.space.len(), 3);
    }

    #[test]
    fn non_covering_input_rejected() {
        let chain = FinPreorder::chain(vec!["p".into(), "q".into()]).unwrap();
        let model = FiniteModel::constant(&chain, 1);
        let uq = PointSet::from_indices(2, [1]);
        assert!(build_su(&model, &[uq]).is_err());
    }

    #[test]
    fn glue_then_su_reproduces_the_finite_projection() {
        // start from the 4-point circle with its two star opens; S_U has 3
        // points; the images of the cover under π glue back to S_U
        let circle = FinPreorder::from_covers(
            vec!["v0".into(), "v1".into(), "e1".into(), "e2".into()],
            &[
                ("v0".into(), "e1".into()),
                ("v0".into(), "e2".into()),
                ("v1".into(), "e1".into()),
                ("v1".into(), "e2".into()),
            ],
        )
        .unwrap();
        let model = FiniteModel::constant(&circle, 1);
        let x = alexandrov(&circle);
        let u1 = x.min_open("v0").unwrap();
        let u2 = x.min_open("v1").unwrap();
        let (su, proj) = build_su(&model, &[u1.clone(), u2.clone()]).unwrap();
        // V_i = π(U_i) as open submodels of S_U
        let xsu = alexandrov(&su.space);
        let image = |u: &PointSet| -> PointSet {
            PointSet::from_indices(
                su.space.len(),
                u.iter().map(|p| {
                    su.space.index_of(&proj[&circle.elements()[p]]).unwrap()
                }),
            )
        };
        let v1 = image(&u1);
        let v2 = image(&u2);
        assert!(xsu.is_open(&v1) && xsu.is_open(&v2));
        let m1 = su.open_submodel(&v1).unwrap();
        let m2 = su.open_submodel(&v2).unwrap();
        let ov = su.open_submodel(&v1.intersect(&v2)).unwrap();
        let g = UGraph::new(vec!["a".into(), "b".into()], vec![("a".into(), "b".into())]).unwrap();
        let base = clique_complex(&crate::sscomplex::Graph::Undirected(g)).unwrap();
        let ident = |m: &FiniteModel| ModelEmbedding {
            map: m.space.elements().iter().map(|e| (e.clone(), e.clone())).collect(),
        };
        let f = FiniteGluingFunctor {
            base,
            models: BTreeMap::from([
                ("a".to_string(), m1),
                ("b".to_string(), m2),
                ("a|b".to_string(), ov.clone()),
            ]),
            embeddings: BTreeMap::from([
                (("a".to_string(), "a|b".to_string()), ident(&ov)),
                (("b".to_string(), "a|b".to_string()), ident(&ov)),
            ]),
        };
        let glued = glue_finite(&f).unwrap();
        assert_eq!(glued.space.len(), su.space.len());
        // same number of opens and the same cohomology: the models agree
        assert_eq!(
            alexandrov(&glued.space).enumerate_opens().len(),
            alexandrov(&su.space).enumerate_opens().len()
        );
    }

    fn p1_nerve() -> CoverNerve {
        p1_nerve_standard()
    }

    #[test]
    fn ring_pushforward_through_a_dominant_point() {
        // collapse the trivial double cover of the line onto a point: the
        // sections over the whole space are recovered through the dominant
        // minimal point and its invertible comparison at the common edge
        let base = FinPreorder::from_covers(
            vec!["a".into(), "b".into(), "e".into()],
            &[("a".into(), "e".into()), ("b".into(), "e".into())],
        )
        .unwrap();
        let r = LocRing::polynomial(&["t"]);
        let maps = BTreeMap::from([
            ((0usize, 2usize), RingMor::identity(&r)),
            ((1usize, 2usize), RingMor::identity(&r)),
        ]);
        let sheaf = PoSheaf::ring(base.clone(), vec![r.clone(), r.clone(), r.clone()], maps).unwrap();
        let f = sheaf;
        let pt = FinPreorder::discrete(vec!["*".into()]).unwrap();
        let map: BTreeMap<String, String> =
            base.elements().iter().map(|e| (e.clone(), "*".to_string())).collect();
        let pushed = pushforward_ring(&f, &map, &pt).unwrap();
        assert_eq!(pushed.stalk_ring(0), &r);
    }

    #[test]
    fn su2_of_two_open_chain_cover_has_three_points() {
        // cover {S, U}: S = Q[x], U = Q[x]_x, overlap = U
        let a = LocRing::polynomial(&["x"]);
        let (u, inc) = localize(&a, &x());
        let nerve = CoverNerve {
            patch_names: vec!["S".into(), "U".into()],
            patches: vec![a, u.clone()],
            overlaps: BTreeMap::from([(
                (0, 1),
                NerveOverlap { ring: u.clone(), from_lo: inc, from_hi: RingMor::identity(&u) },
            )]),
            triples: BTreeMap::new(),
        };
        let (poset, sheaf, para) = build_su2(&nerve).unwrap();
        assert_eq!(poset.len(), 3);
        assert!(para.ok());
        assert!(sheaf.validate().ok());
    }

    #[test]
    fn su2_of_p1_cover() {
        let (poset, sheaf, para) = build_su2(&p1_nerve()).unwrap();
        assert_eq!(poset.len(), 3);
        assert!(para.ok());
        let rings: BTreeSet<String> =
            (0..3).map(|i| sheaf.stalk_ring(i).to_string()).collect();
        assert!(rings.contains("Q[x]"));
        assert!(rings.contains("Q[y]"));
        assert!(rings.contains("Q[x]_{x}"));
        // the poset is the simplex poset of the clique complex
        let g = nerveless_intersection_poset(&p1_nerve());
        assert_eq!(poset, g);
    }

    fn nerveless_intersection_poset(n: &CoverNerve) -> FinPoset {
        let graph = n.intersection_graph().unwrap();
        clique_complex(&crate::sscomplex::Graph::Undirected(graph)).unwrap().simplex_poset()
    }

    #[test]
    fn remove_empty_triples_keeps_sheaf_iso() {
        // chain of three patches on the line with an empty triple overlap
        let a = LocRing::polynomial(&["x"]);
        let (r01, m01) = localize(&a, &x());
        let (r02, m02) = localize(&a, &x().sub(&Polynomial::one()));
        let (r12, m12) = localize(&a, &x().add(&Polynomial::one()));
        let tri = LocRing::zero_ring();
        let nerve = CoverNerve {
            patch_names: vec!["U1".into(), "U2".into(), "U3".into()],
            patches: vec![a.clone(), a.clone(), a.clone()],
            overlaps: BTreeMap::from([
                ((0, 1), NerveOverlap { ring: r01.clone(), from_lo: m01.clone(), from_hi: m01.clone() }),
                ((0, 2), NerveOverlap { ring: r02.clone(), from_lo: m02.clone(), from_hi: m02.clone() }),
                ((1, 2), NerveOverlap { ring: r12.clone(), from_lo: m12.clone(), from_hi: m12.clone() }),
            ]),
            triples: BTreeMap::from([(
                (0, 1, 2),
                NerveTriple {
                    ring: tri.clone(),
                    from_edges: BTreeMap::from([
                        ((0, 1), RingMor::to_zero(&r01)),
                        ((0, 2), RingMor::to_zero(&r02)),
                        ((1, 2), RingMor::to_zero(&r12)),
                    ]),
                },
            )]),
        };
        let (poset, sheaf, _) = build_su2(&nerve).unwrap();
        assert_eq!(poset.len(), 7);
        let (sub, _, removed, rep) = remove_empty_triples(&poset, &sheaf).unwrap();
        assert_eq!(sub.len(), 6);
        assert_eq!(removed.len(), 1);
        assert!(rep.ok());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(25))]

        /// Round trips of random structural 3-patch gluing data.
        #[test]
        fn random_datum_round_trips(seed in 0u64..60) {
            let pool = [
                Polynomial::one(),
                x(),
                x().sub(&Polynomial::one()),
                x().add(&Polynomial::one()),
            ];
            let pick = |s: u64| pool[(s % 4) as usize].clone();
            let w = line_3patch_datum([pick(seed), pick(seed / 4), pick(seed / 16)]);
            proptest::prop_assert!(validate_gluing_datum(&w).ok());
            let cube = cube_of_datum(&w).unwrap();
            proptest::prop_assert!(cube.validate().ok());
            let back = datum_of_cube(&cube).unwrap();
            proptest::prop_assert!(datum_eq(&w, &back));
            let cube2 = cube_of_datum(&back).unwrap();
            proptest::prop_assert_eq!(&cube.triple_ring, &cube2.triple_ring);
            proptest::prop_assert_eq!(&cube.edge_rings, &cube2.edge_rings);
            for (k, m) in &cube.vertex_to_edge {
                proptest::prop_assert!(m.eq_mor(&cube2.vertex_to_edge[k]));
            }
        }
    }
}
