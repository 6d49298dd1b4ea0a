//! Objects and morphisms of the 2-dimensional scheme category over the
//! structural ring fragment: degenerate-expansion bases with ring functors,
//! weak equivalences, product covers and refinements, schematic equality,
//! zig-zag composition and equivalence, and the two counterexamples.
//!
//! Decision procedures are complete on objects anchored over a shared glued
//! model (every cover element a basic open of a model patch); outside that
//! fragment they answer `Undecided` rather than guess. The comparison map of
//! a weak equivalence is tested on the affine cover of the target (the vertex
//! patches): that is the reading under which the reference constructions
//! (collapses, canonical inclusions, refinements) are weak equivalences.

use std::collections::{BTreeMap, BTreeSet};

use crate::finspace::{FinPoset, PointSet};
use crate::gluing::{
    build_su2, validate_gluing_datum, AffineGluingDatum, AffineGluingFunctor,
    CoverNerve, NerveOverlap, NerveTriple,
};
use crate::poly::{Laurent, Polynomial};
use crate::ringcat::{tensor_over, EmbCert, LocRing, RingMor};
use crate::sheafcore::{PoSheaf, RingSections, SheafData};
use crate::sscomplex::{
    as_degenerate_expansion, clique_complex, degenerate_expansion, edge_id, triangle_id, Graph,
    SSMap, SemiSimplicialSet2, UGraph,
};
use crate::{Error, Report, Result, Verdict};

// ---------------------------------------------------------------------------
// Glued models and anchors
// ---------------------------------------------------------------------------

/// The ambient glued model standing in for the scheme S: a validated gluing
/// datum whose patches provide the coordinate charts every anchored cover
/// refers to.
#[derive(Debug, Clone)]
pub struct GluedModel {
    datum: AffineGluingDatum,
}

impl GluedModel {
    pub fn new(datum: AffineGluingDatum) -> Result<GluedModel> {
        let rep = validate_gluing_datum(&datum);
        if !rep.ok() {
            return Err(Error::Precondition(format!("invalid glued model: {rep}")));
        }
        Ok(GluedModel { datum })
    }

    pub fn single_patch(ring: LocRing) -> GluedModel {
        GluedModel {
            datum: AffineGluingDatum {
                patches: vec![ring],
                inclusions: BTreeMap::new(),
                phi_sharp: BTreeMap::new(),
            },
        }
    }

    pub fn patch(&self, i: usize) -> &LocRing {
        &self.datum.patches[i]
    }

    pub fn patch_count(&self) -> usize {
        self.datum.patches.len()
    }

    /// Localization set of the overlap U_ab presented inside patch a.
    fn overlap_factors(&self, a: usize, b: usize) -> Option<BTreeSet<Polynomial>> {
        if a == b {
            return Some(BTreeSet::new());
        }
        if !self.datum.inclusions.contains_key(&(a, b)) {
            return None;
        }
        let (canon, _) = self.datum.canonical_overlap(a, b).ok()?;
        Some(canon.inverted().difference(self.patch(a).inverted()).cloned().collect())
    }

    /// Normalized transition (A_a)_{S_ab} -> (A_b)_{S_ba}.
    fn transition(&self, a: usize, b: usize) -> Result<RingMor> {
        self.datum.normalized_transition(a, b)
    }

    /// Two models share coordinates when their underlying data agree.
    pub fn same_as(&self, other: &GluedModel) -> bool {
        crate::gluing::datum_eq(&self.datum, &other.datum)
    }
}

/// A basic open of the model: D(factors) inside one patch, or empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Anchor {
    Empty,
    At { patch: usize, factors: BTreeSet<Polynomial> },
}

impl Anchor {
    pub fn whole(patch: usize) -> Anchor {
        Anchor::At { patch, factors: BTreeSet::new() }
    }

    pub fn basic(patch: usize, fs: &[Polynomial]) -> Anchor {
        let mut factors = BTreeSet::new();
        for f in fs {
            if f.is_zero() {
                return Anchor::Empty;
            }
            factors.extend(f.structural_factors());
        }
        Anchor::At { patch, factors }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Anchor::Empty)
    }

    pub fn ring(&self, model: &GluedModel) -> LocRing {
        match self {
            Anchor::Empty => LocRing::zero_ring(),
            Anchor::At { patch, factors } => model
                .patch(*patch)
                .with_inverted(&factors.iter().cloned().collect::<Vec<_>>()),
        }
    }

    /// Intersection, presented in the patch of `self` when both are nonempty.
    pub fn intersect(&self, model: &GluedModel, other: &Anchor) -> Result<Anchor> {
        let (Anchor::At { patch: p1, factors: f1 }, Anchor::At { patch: p2, factors: f2 }) =
            (self, other)
        else {
            return Ok(Anchor::Empty);
        };
        if p1 == p2 {
            let mut factors = f1.clone();
            factors.extend(f2.iter().cloned());
            return Ok(Anchor::At { patch: *p1, factors });
        }
        let Some(overlap) = model.overlap_factors(*p1, *p2) else {
            return Ok(Anchor::Empty);
        };
        // pull the second factor set through the transition into patch p1
        let t = model.transition(*p2, *p1)?;
        let mut factors = f1.clone();
        factors.extend(overlap);
        for f in f2 {
            let img = t
                .apply_poly(f)
                .ok_or_else(|| Error::Precondition("transition image failed".into()))?;
            factors.extend(img.num.structural_factors());
            factors.extend(img.den.structural_factors());
        }
        Ok(Anchor::At { patch: *p1, factors })
    }

    /// Does `self` contain `other` as an open of the model? Decided within a
    /// single patch by factor inclusion.
    pub fn contains(&self, other: &Anchor) -> Verdict {
        match (self, other) {
            (_, Anchor::Empty) => Verdict::Yes,
            (Anchor::Empty, Anchor::At { .. }) => Verdict::No,
            (Anchor::At { patch: p1, factors: f1 }, Anchor::At { patch: p2, factors: f2 }) => {
                if p1 == p2 {
                    Verdict::from_bool(f1.is_subset(f2))
                } else {
                    Verdict::Undecided
                }
            }
        }
    }
}

/// The canonical ring map between anchored opens `to ⊆ from`: a localization
/// inside one patch, or a localization-transition composite across patches.
fn anchored_map(model: &GluedModel, from: &Anchor, to: &Anchor) -> Result<RingMor> {
    let from_ring = from.ring(model);
    if to.is_empty() {
        return Ok(RingMor::to_zero(&from_ring));
    }
    let to_ring = to.ring(model);
    let (Anchor::At { patch: pf, factors: _ }, Anchor::At { patch: pt, factors: ft }) = (from, to)
    else {
        return Err(Error::Precondition("no map out of the empty anchor".into()));
    };
    if pf == pt {
        return RingMor::localization(&from_ring, &to_ring);
    }
    // from-ring -> (A_pf)_{++ overlap} -> (A_pt)_{transition image} -> to-ring
    let overlap = model
        .overlap_factors(*pf, *pt)
        .ok_or_else(|| Error::Precondition("anchors live in disjoint patches".into()))?;
    let t = model.transition(*pf, *pt)?;
    let EmbCert::LocIso { inverse: t_inv, .. } = &t.cert else {
        return Err(Error::Precondition("transition lost its certificate".into()));
    };
    let mut mid_factors: Vec<Polynomial> = from_ring.inverted().iter().cloned().collect();
    mid_factors.extend(overlap.iter().cloned());
    // also pull `to`'s factors back so the isomorphism lands exactly on to_ring
    let back = model.transition(*pt, *pf)?;
    for f in ft {
        let img = back
            .apply_poly(f)
            .ok_or_else(|| Error::Precondition("transition image failed".into()))?;
        mid_factors.push(img.num.clone());
        mid_factors.push(img.den.clone());
    }
    let mid = model.patch(*pf).with_inverted(&mid_factors);
    let loc = RingMor::localization(&from_ring, &mid)?;
    let iso = RingMor::iso(&mid, &to_ring, t.images.clone(), t_inv.clone()).map_err(|e| {
        Error::Precondition(format!("anchored map does not land in the target: {e}"))
    })?;
    loc.compose(&iso)
}

/// A cover of the glued model by anchored basic opens. Empty anchors are
/// allowed (they arise as cross terms of product covers).
#[derive(Debug, Clone)]
pub struct AnchoredCover {
    pub model: GluedModel,
    pub names: Vec<String>,
    pub anchors: Vec<Anchor>,
}

impl AnchoredCover {
    pub fn new(model: GluedModel, names: Vec<String>, anchors: Vec<Anchor>) -> Result<Self> {
        if names.len() != anchors.len() {
            return Err(Error::InvalidInput("one name per anchor required".into()));
        }
        Ok(AnchoredCover { model, names, anchors })
    }

    /// Derive the cover nerve: overlaps and triples from anchored
    /// intersections, with canonical maps.
    pub fn nerve(&self) -> Result<CoverNerve> {
        let n = self.anchors.len();
        let patches: Vec<LocRing> = self.anchors.iter().map(|a| a.ring(&self.model)).collect();
        let mut overlaps = BTreeMap::new();
        let mut pair_anchor: BTreeMap<(usize, usize), Anchor> = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let inter = self.anchors[i].intersect(&self.model, &self.anchors[j])?;
                if inter.is_empty() {
                    continue;
                }
                let ring = inter.ring(&self.model);
                let from_lo = anchored_map(&self.model, &self.anchors[i], &inter)?;
                let from_hi = anchored_map(&self.model, &self.anchors[j], &inter)?;
                debug_assert_eq!(from_lo.target, ring);
                overlaps.insert((i, j), NerveOverlap { ring, from_lo, from_hi });
                pair_anchor.insert((i, j), inter);
            }
        }
        let mut triples = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                if !pair_anchor.contains_key(&(i, j)) {
                    continue;
                }
                for k in j + 1..n {
                    if !pair_anchor.contains_key(&(i, k)) || !pair_anchor.contains_key(&(j, k)) {
                        continue;
                    }
                    let inter =
                        pair_anchor[&(i, j)].intersect(&self.model, &self.anchors[k])?;
                    let ring = inter.ring(&self.model);
                    let mut from_edges = BTreeMap::new();
                    for pair in [(i, j), (i, k), (j, k)] {
                        from_edges.insert(
                            pair,
                            anchored_map(&self.model, &pair_anchor[&pair], &inter)?,
                        );
                    }
                    triples.insert((i, j, k), NerveTriple { ring, from_edges });
                }
            }
        }
        Ok(CoverNerve {
            patch_names: self.names.clone(),
            patches,
            overlaps,
            triples,
        })
    }
}

// ---------------------------------------------------------------------------
// Objects
// ---------------------------------------------------------------------------

/// Object of the category: a degenerate-expansion base together with a ring
/// functor on its simplex poset, plus optional anchoring metadata used by
/// the decision procedures.
#[derive(Debug, Clone)]
pub struct CSch2Object {
    pub base: SemiSimplicialSet2,
    pub poset: FinPoset,
    pub sheaf: PoSheaf,
    pub model: Option<GluedModel>,
    pub anchors: Option<BTreeMap<String, Anchor>>,
}

impl CSch2Object {
    pub fn ring_of(&self, simplex: &str) -> &LocRing {
        self.sheaf.stalk_ring(self.poset.index_of(simplex).unwrap())
    }
}

/// Assemble the object of a cover nerve: the degenerate expansion of the
/// cover's clique complex, with identity data on the degenerate simplices.
pub fn object_from_cover(nerve: &CoverNerve) -> Result<CSch2Object> {
    let rep = nerve.validate();
    if !rep.ok() {
        return Err(Error::InvalidInput(format!("inconsistent nerve: {rep}")));
    }
    for (&(i, j), o) in &nerve.overlaps {
        for (v, m) in [(i, &o.from_lo), (j, &o.from_hi)] {
            if !m.is_open_embedding() {
                return Err(Error::Precondition(format!(
                    "nerve map from patch {v} into overlap ({i},{j}) is not a certified open embedding"
                )));
            }
        }
    }
    let graph = nerve.intersection_graph()?;
    let core = clique_complex(&Graph::Undirected(graph))?;
    let base = degenerate_expansion(&core)?;
    let poset = base.simplex_poset();
    let name_index: BTreeMap<&String, usize> =
        nerve.patch_names.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let idx = |id: &str| poset.index_of(id).unwrap();
    let mut stalks = vec![LocRing::zero_ring(); poset.len()];
    let mut cover_maps: BTreeMap<(usize, usize), RingMor> = BTreeMap::new();
    // vertices and loops
    for v in base.s0() {
        let ring = nerve.patches[name_index[&v.to_string()]].clone();
        stalks[idx(v)] = ring.clone();
        let l = edge_id(v, v);
        stalks[idx(&l)] = ring.clone();
        cover_maps.insert((idx(v), idx(&l)), RingMor::identity(&ring));
        let uuu = triangle_id(v, v, v);
        stalks[idx(&uuu)] = ring.clone();
        cover_maps.insert((idx(&l), idx(&uuu)), RingMor::identity(&ring));
    }
    // non-loop edges and their degenerate triangles
    for e in base.s1() {
        let (u, v) = (base.d1(e).to_string(), base.d0(e).to_string());
        if u == v {
            continue;
        }
        let (iu, iv) = (name_index[&u], name_index[&v]);
        let key = if iu < iv { (iu, iv) } else { (iv, iu) };
        let o = &nerve.overlaps[&key];
        let (mu, mv) = if iu < iv {
            (o.from_lo.clone(), o.from_hi.clone())
        } else {
            (o.from_hi.clone(), o.from_lo.clone())
        };
        stalks[idx(e)] = o.ring.clone();
        cover_maps.insert((idx(&u), idx(e)), mu.clone());
        cover_maps.insert((idx(&v), idx(e)), mv.clone());
        // u -> u -> v carries F(u -> v); its loop face maps by the embedding
        let uuv = triangle_id(&u, &u, &v);
        stalks[idx(&uuv)] = o.ring.clone();
        cover_maps.insert((idx(e), idx(&uuv)), RingMor::identity(&o.ring));
        cover_maps.insert((idx(&edge_id(&u, &u)), idx(&uuv)), mu);
        let uvv = triangle_id(&u, &v, &v);
        stalks[idx(&uvv)] = o.ring.clone();
        cover_maps.insert((idx(e), idx(&uvv)), RingMor::identity(&o.ring));
        cover_maps.insert((idx(&edge_id(&v, &v)), idx(&uvv)), mv);
    }
    // original triangles
    for t in base.s2() {
        let vs = base.vertex_tuple(t);
        let distinct: BTreeSet<&String> = vs.iter().collect();
        if distinct.len() != 3 {
            continue;
        }
        let mut is: Vec<usize> = vs.iter().map(|v| name_index[v]).collect();
        is.sort();
        let tr = &nerve.triples[&(is[0], is[1], is[2])];
        stalks[idx(t)] = tr.ring.clone();
        for e in base.triangle_faces(t) {
            let (a, b) = (name_index[&base.d1(e).to_string()], name_index[&base.d0(e).to_string()]);
            let ekey = if a < b { (a, b) } else { (b, a) };
            cover_maps.insert((idx(e), idx(t)), tr.from_edges[&ekey].clone());
        }
    }
    // close under composition
    let mut maps = cover_maps.clone();
    for (i, j) in crate::sheafcore::strict_pairs(&poset) {
        if maps.contains_key(&(i, j)) {
            continue;
        }
        let mut found = false;
        for k in 0..poset.len() {
            if k != i && k != j && poset.leq_idx(i, k) && poset.leq_idx(k, j) {
                if let (Some(m1), Some(m2)) = (cover_maps.get(&(i, k)), cover_maps.get(&(k, j))) {
                    maps.insert((i, j), m1.compose(m2)?);
                    found = true;
                    break;
                }
            }
        }
        if !found {
            return Err(Error::InvalidInput(format!("no composite for pair ({i}, {j})")));
        }
    }
    let sheaf = PoSheaf::ring(poset.clone(), stalks, maps)?;
    Ok(CSch2Object { base, poset, sheaf, model: None, anchors: None })
}

/// Anchored variant: cover elements are basic opens of the shared model, and
/// the anchoring of every simplex is recorded for the decision procedures.
pub fn object_from_anchored(cover: &AnchoredCover) -> Result<CSch2Object> {
    let nerve = cover.nerve()?;
    let mut obj = object_from_cover(&nerve)?;
    let name_index: BTreeMap<&String, usize> =
        cover.names.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut anchors: BTreeMap<String, Anchor> = BTreeMap::new();
    for v in obj.base.s0() {
        let a = cover.anchors[name_index[&v.to_string()]].clone();
        anchors.insert(v.clone(), a.clone());
        anchors.insert(edge_id(v, v), a.clone());
        anchors.insert(triangle_id(v, v, v), a);
    }
    for e in obj.base.s1() {
        let (u, v) = (obj.base.d1(e).to_string(), obj.base.d0(e).to_string());
        if u == v {
            continue;
        }
        let inter = cover.anchors[name_index[&u]]
            .intersect(&cover.model, &cover.anchors[name_index[&v]])?;
        anchors.insert(e.clone(), inter.clone());
        anchors.insert(triangle_id(&u, &u, &v), inter.clone());
        anchors.insert(triangle_id(&u, &v, &v), inter);
    }
    for t in obj.base.s2() {
        let vs = obj.base.vertex_tuple(t);
        let distinct: BTreeSet<&String> = vs.iter().collect();
        if distinct.len() != 3 {
            continue;
        }
        let mut acc = cover.anchors[name_index[&vs[0]]].clone();
        for v in &vs[1..] {
            acc = acc.intersect(&cover.model, &cover.anchors[name_index[v]])?;
        }
        anchors.insert(t.clone(), acc);
    }
    obj.model = Some(cover.model.clone());
    obj.anchors = Some(anchors);
    Ok(obj)
}

/// Shape, embedding and factorization checks for an object: the base is a
/// degenerate expansion, every arrow is an open embedding, the degenerate
/// arrows are isomorphisms, and the core restriction is a gluing functor.
pub fn validate_object(a: &CSch2Object) -> Report {
    let mut rep = Report::new();
    let core = match as_degenerate_expansion(&a.base) {
        Ok(c) => c,
        Err(e) => {
            rep.push(format!("base is not a degenerate expansion: {e}"));
            return rep;
        }
    };
    let sheaf_rep = a.sheaf.validate();
    if !sheaf_rep.ok() {
        rep.merge(sheaf_rep);
        return rep;
    }
    let SheafData::Ring { maps, .. } = &a.sheaf.data else {
        rep.push("object functor must be ring-valued");
        return rep;
    };
    for ((i, j), m) in maps {
        if !m.is_open_embedding() {
            rep.push(format!(
                "arrow {} -> {} is not a certified open embedding",
                a.poset.elements()[*i],
                a.poset.elements()[*j]
            ));
        }
    }
    if !rep.ok() {
        return rep;
    }
    // degenerate arrows must be isomorphisms so that Spec ∘ F factors through
    // the degenerate expansion of a gluing functor
    let idx = |id: &str| a.poset.index_of(id).unwrap();
    let mut check_iso = |from: &str, to: &str| {
        let m = &maps[&(idx(from), idx(to))];
        if !m.is_iso().is_yes() {
            rep.push(format!("degenerate arrow {from} -> {to} is not an isomorphism"));
        }
    };
    for v in core.s0() {
        let l = edge_id(v, v);
        check_iso(v, &l);
        check_iso(&l, &triangle_id(v, v, v));
    }
    for e in core.s1() {
        let (u, v) = (core.d1(e).to_string(), core.d0(e).to_string());
        check_iso(e, &triangle_id(&u, &u, &v));
        check_iso(e, &triangle_id(&u, &v, &v));
    }
    if !rep.ok() {
        return rep;
    }
    // the core is a gluing functor (cartesian cubes, non-adjacency condition)
    let mut rings = BTreeMap::new();
    let mut core_maps = BTreeMap::new();
    for id in core.all_simplices() {
        rings.insert(id.clone(), a.ring_of(&id).clone());
    }
    for e in core.s1() {
        for v in [core.d0(e), core.d1(e)] {
            core_maps.insert(
                (v.to_string(), e.to_string()),
                maps[&(idx(v), idx(e))].clone(),
            );
        }
    }
    for t in core.s2() {
        for e in core.triangle_faces(t) {
            core_maps.insert(
                (e.to_string(), t.to_string()),
                maps[&(idx(e), idx(t))].clone(),
            );
        }
    }
    let functor = AffineGluingFunctor { base: core, rings, maps: core_maps };
    let glue_rep = crate::gluing::check_gluing_functor(&functor);
    if !glue_rep.ok() {
        rep.push(format!("core is not a gluing functor: {glue_rep}"));
    }
    rep
}

// ---------------------------------------------------------------------------
// Morphisms
// ---------------------------------------------------------------------------

/// Morphism ψ = (f, ε): a semisimplicial map on the bases with a ring map
/// F_B(f(p)) -> F_A(p) per simplex, natural over the face relation.
#[derive(Debug, Clone)]
pub struct CSch2Mor {
    pub f: SSMap,
    pub eps: BTreeMap<String, RingMor>,
}

pub fn validate_mor(a: &CSch2Object, b: &CSch2Object, m: &CSch2Mor) -> Report {
    let mut rep = m.f.validate(&a.base, &b.base);
    if !rep.ok() {
        return rep;
    }
    for p in a.base.all_simplices() {
        let fp = m.f.apply(&p).cloned().unwrap_or_default();
        match m.eps.get(&p) {
            None => rep.push(format!("simplex {p} has no comparison map")),
            Some(e) => {
                if e.source != *b.ring_of(&fp) || e.target != *a.ring_of(&p) {
                    rep.push(format!("comparison at {p} has wrong endpoints"));
                }
            }
        }
    }
    if !rep.ok() {
        return rep;
    }
    // naturality on cover pairs of A's poset
    for (i, j) in crate::sheafcore::cover_pairs(&a.poset) {
        let p = a.poset.elements()[i].clone();
        let q = a.poset.elements()[j].clone();
        let fp = m.f.apply(&p).unwrap().clone();
        let fq = m.f.apply(&q).unwrap().clone();
        let bfp = b.poset.index_of(&fp).unwrap();
        let bfq = b.poset.index_of(&fq).unwrap();
        let top = b.sheaf.ring_restriction(bfp, bfq);
        let lhs = top.compose(&m.eps[&q]);
        let rhs = m.eps[&p].compose(&a.sheaf.ring_restriction(
            a.poset.index_of(&p).unwrap(),
            a.poset.index_of(&q).unwrap(),
        ));
        match (lhs, rhs) {
            (Ok(x), Ok(y)) if x.eq_mor(&y) => {}
            _ => rep.push(format!("naturality fails on {p} <= {q}")),
        }
    }
    rep
}

pub fn identity_mor(a: &CSch2Object) -> CSch2Mor {
    CSch2Mor {
        f: SSMap::identity(&a.base),
        eps: a
            .base
            .all_simplices()
            .into_iter()
            .map(|p| {
                let r = a.ring_of(&p).clone();
                (p, RingMor::identity(&r))
            })
            .collect(),
    }
}

/// Composite A -> B -> C.
pub fn compose_mor(
    a: &CSch2Object,
    m1: &CSch2Mor,
    m2: &CSch2Mor,
) -> Result<CSch2Mor> {
    let f = m1.f.compose(&m2.f);
    let mut eps = BTreeMap::new();
    for p in a.base.all_simplices() {
        let fp = m1.f.apply(&p).unwrap();
        let outer = m2.eps.get(fp).ok_or_else(|| {
            Error::InvalidInput(format!("second morphism misses simplex {fp}"))
        })?;
        eps.insert(p.clone(), outer.compose(&m1.eps[&p])?);
    }
    Ok(CSch2Mor { f, eps })
}

// ---------------------------------------------------------------------------
// Weak equivalences
// ---------------------------------------------------------------------------

/// Sections of A's functor over the preimage of a vertex patch, within the
/// structural fragment.
enum PreimageSections {
    Zero,
    /// sections are the stalk at this poset index
    Stalk(usize),
    /// anchored union inside one model patch: the intersection of the
    /// localization sets, with the minimal anchored points listed
    Anchored { ring: LocRing, minimals: Vec<usize>, covers_basic: Verdict },
    Unknown,
}

fn preimage_of_vertex(a: &CSch2Object, b: &CSch2Object, m: &CSch2Mor, q: &str) -> PointSet {
    let bq = b.poset.index_of(q).unwrap();
    PointSet::from_indices(
        a.poset.len(),
        (0..a.poset.len()).filter(|&p| {
            let fp = m.f.apply(&a.poset.elements()[p]).unwrap();
            b.poset.leq_idx(bq, b.poset.index_of(fp).unwrap())
        }),
    )
}

/// Intersection of anchored localization sets, via pairwise structural gcds.
/// None when a pair is outside the decidable fragment.
fn factor_sets_intersection(sets: &[BTreeSet<Polynomial>]) -> Option<BTreeSet<Polynomial>> {
    let Some(first) = sets.first() else {
        return Some(BTreeSet::new());
    };
    let mut acc = first.clone();
    for s in &sets[1..] {
        let mut next = BTreeSet::new();
        for f in &acc {
            for g in s {
                if f == g {
                    next.insert(f.clone());
                    continue;
                }
                let (vf, vg) = (f.variables(), g.variables());
                if vf.is_disjoint(&vg) {
                    continue; // coprime
                }
                if vf.len() == 1 && vf == vg {
                    let v = vf.iter().next().unwrap();
                    let d = Polynomial::gcd_univariate(f, g, v);
                    if !d.is_constant() {
                        next.extend(d.structural_factors());
                    }
                } else {
                    return None; // multivariate entanglement: undecided
                }
            }
        }
        acc = next;
    }
    Some(acc)
}

/// Do the opens D(T_k) jointly cover D(common)? Sufficient structural tests:
/// a residual that is a unit, or univariate residuals with a gcd whose
/// factors already divide the common part.
fn residuals_cover(
    patch: &LocRing,
    sets: &[BTreeSet<Polynomial>],
    common: &BTreeSet<Polynomial>,
) -> Verdict {
    let residuals: Vec<Polynomial> = sets
        .iter()
        .map(|s| {
            s.difference(common)
                .fold(Polynomial::one(), |acc, f| acc.mul(f))
        })
        .collect();
    if residuals.iter().any(|h| h.is_constant() && !h.is_zero()) {
        return Verdict::Yes;
    }
    let vars: BTreeSet<String> = residuals.iter().flat_map(|h| h.variables()).collect();
    if vars.len() == 1 {
        let v = vars.iter().next().unwrap();
        let mut g = residuals[0].clone();
        for h in &residuals[1..] {
            g = Polynomial::gcd_univariate(&g, h, v);
        }
        if g.is_constant() {
            return Verdict::Yes;
        }
        // common zeros of the residuals must already be outside D(common)
        let base = patch.with_inverted(&common.iter().cloned().collect::<Vec<_>>());
        return Verdict::from_bool(base.is_unit(&g));
    }
    Verdict::Undecided
}

fn sections_over_preimage(a: &CSch2Object, open: &PointSet) -> Result<PreimageSections> {
    match a.sheaf.sections_ring(open)? {
        RingSections::Zero => Ok(PreimageSections::Zero),
        RingSections::Stalk { at } => Ok(PreimageSections::Stalk(at)),
        RingSections::Limit { minimals } => {
            let (Some(model), Some(anchors)) = (&a.model, &a.anchors) else {
                return Ok(PreimageSections::Unknown);
            };
            let live: Vec<usize> = minimals
                .iter()
                .copied()
                .filter(|&p| !a.sheaf.stalk_ring(p).is_zero())
                .collect();
            let mut patch = None;
            let mut sets = Vec::new();
            for &p in &live {
                match anchors.get(&a.poset.elements()[p]) {
                    Some(Anchor::At { patch: pp, factors }) => {
                        if patch.is_none() {
                            patch = Some(*pp);
                        }
                        if patch != Some(*pp) {
                            return Ok(PreimageSections::Unknown);
                        }
                        sets.push(factors.clone());
                    }
                    _ => return Ok(PreimageSections::Unknown),
                }
            }
            let Some(pp) = patch else {
                return Ok(PreimageSections::Zero);
            };
            let Some(common) = factor_sets_intersection(&sets) else {
                return Ok(PreimageSections::Unknown);
            };
            let ring = model
                .patch(pp)
                .with_inverted(&common.iter().cloned().collect::<Vec<_>>());
            let covers = residuals_cover(model.patch(pp), &sets, &common);
            Ok(PreimageSections::Anchored { ring, minimals: live, covers_basic: covers })
        }
    }
}

/// Decide membership in the class of weak equivalences: the comparison map
/// must induce structural isomorphisms on sections over the preimages of the
/// target's vertex patches, and those preimages must be structurally affine.
/// Outside the fragment the verdict is `Undecided`, never a guess.
pub fn is_weak_equivalence(a: &CSch2Object, b: &CSch2Object, m: &CSch2Mor) -> Verdict {
    let rep = validate_mor(a, b, m);
    if !rep.ok() {
        return Verdict::No;
    }
    let mut undecided = false;
    for q in b.base.s0() {
        let open = preimage_of_vertex(a, b, m, q);
        let bq = b.poset.index_of(q).unwrap();
        let target_ring = b.sheaf.stalk_ring(bq).clone();
        let secs = match sections_over_preimage(a, &open) {
            Ok(s) => s,
            Err(_) => return Verdict::Undecided,
        };
        match secs {
            PreimageSections::Zero => {
                // empty preimage is affine; iso iff the target stalk is zero
                if !target_ring.is_zero() {
                    return Verdict::No;
                }
            }
            PreimageSections::Stalk(at) => {
                let p = a.poset.elements()[at].clone();
                let fp = m.f.apply(&p).unwrap();
                let bfp = b.poset.index_of(fp).unwrap();
                let route = b.sheaf.ring_restriction(bq, bfp).compose(&m.eps[&p]);
                match route {
                    Ok(r) => match r.is_iso() {
                        Verdict::Yes => {}
                        Verdict::No => return Verdict::No,
                        Verdict::Undecided => undecided = true,
                    },
                    Err(_) => return Verdict::No,
                }
            }
            PreimageSections::Anchored { ring, minimals, covers_basic } => {
                // every component map must be the canonical localization of
                // the section ring; then ε♭ is an isomorphism exactly when
                // the section ring equals the target stalk
                if covers_basic == Verdict::No {
                    return Verdict::No;
                }
                if covers_basic == Verdict::Undecided {
                    undecided = true;
                }
                let mut canonical = true;
                for &p in &minimals {
                    let pname = a.poset.elements()[p].clone();
                    let fp = m.f.apply(&pname).unwrap();
                    let bfp = b.poset.index_of(fp).unwrap();
                    let Ok(route) = b.sheaf.ring_restriction(bq, bfp).compose(&m.eps[&pname])
                    else {
                        return Verdict::No;
                    };
                    let stalk = a.sheaf.stalk_ring(p).clone();
                    match RingMor::localization(&ring, &stalk) {
                        Ok(canon_from_sections) => {
                            // route must factor as target -> sections -> stalk
                            // with identity images in the shared coordinates
                            match RingMor::localization(&target_ring, &ring) {
                                Ok(t2s) => {
                                    let expect = t2s.compose(&canon_from_sections);
                                    match expect {
                                        Ok(e) if e.eq_mor(&route) => {}
                                        _ => canonical = false,
                                    }
                                }
                                Err(_) => canonical = false,
                            }
                        }
                        Err(_) => canonical = false,
                    }
                }
                if !canonical {
                    undecided = true;
                } else if ring != target_ring {
                    return Verdict::No;
                }
            }
            PreimageSections::Unknown => undecided = true,
        }
    }
    if undecided {
        Verdict::Undecided
    } else {
        Verdict::Yes
    }
}

// ---------------------------------------------------------------------------
// Canonical inclusion, refinements, products
// ---------------------------------------------------------------------------

/// The canonical weak equivalence (U_A)²_sch -> A: the sub-object spanned by
/// the vertices with nonzero patches and the edges with nonzero rings, with
/// identity comparison maps.
pub fn canonical_inclusion(a: &CSch2Object) -> Result<(CSch2Object, CSch2Mor)> {
    let core = as_degenerate_expansion(&a.base)?;
    let live_vertices: Vec<String> =
        core.s0().iter().filter(|v| !a.ring_of(v).is_zero()).cloned().collect();
    let edges: Vec<(String, String)> = core
        .s1()
        .iter()
        .filter(|e| !a.ring_of(e).is_zero())
        .map(|e| (core.d1(e).to_string(), core.d0(e).to_string()))
        .filter(|(u, v)| live_vertices.contains(u) && live_vertices.contains(v))
        .collect();
    let graph = UGraph::new(live_vertices, edges)?;
    let sub_core = clique_complex(&Graph::Undirected(graph))?;
    let sub_base = degenerate_expansion(&sub_core)?;
    // rings are inherited by vertex tuple
    let tuple_of = |x: &SemiSimplicialSet2, id: &str| x.vertex_tuple(id);
    let find_in_a = |tuple: &Vec<String>| -> Result<String> {
        a.base
            .all_simplices()
            .into_iter()
            .find(|s| &tuple_of(&a.base, s) == tuple)
            .ok_or_else(|| Error::InvalidInput(format!("no simplex over {tuple:?} in the target")))
    };
    let poset = sub_base.simplex_poset();
    let mut stalks = vec![LocRing::zero_ring(); poset.len()];
    let mut maps = BTreeMap::new();
    let mut f = SSMap { map0: BTreeMap::new(), map1: BTreeMap::new(), map2: BTreeMap::new() };
    let mut eps = BTreeMap::new();
    let mut image: BTreeMap<String, String> = BTreeMap::new();
    for s in sub_base.all_simplices() {
        let t = find_in_a(&tuple_of(&sub_base, &s))?;
        stalks[poset.index_of(&s).unwrap()] = a.ring_of(&t).clone();
        eps.insert(s.clone(), RingMor::identity(a.ring_of(&t)));
        match sub_base.dim_of(&s) {
            Some(0) => {
                f.map0.insert(s.clone(), t.clone());
            }
            Some(1) => {
                f.map1.insert(s.clone(), t.clone());
            }
            _ => {
                f.map2.insert(s.clone(), t.clone());
            }
        }
        image.insert(s, t);
    }
    for (i, j) in crate::sheafcore::strict_pairs(&poset) {
        let (si, sj) = (poset.elements()[i].clone(), poset.elements()[j].clone());
        let (ti, tj) = (image[&si].clone(), image[&sj].clone());
        maps.insert(
            (i, j),
            a.sheaf
                .ring_restriction(a.poset.index_of(&ti).unwrap(), a.poset.index_of(&tj).unwrap()),
        );
    }
    let sheaf = PoSheaf::ring(poset.clone(), stalks, maps)?;
    let anchors = match (&a.model, &a.anchors) {
        (Some(_), Some(anch)) => Some(
            image
                .iter()
                .map(|(s, t)| (s.clone(), anch[t].clone()))
                .collect::<BTreeMap<String, Anchor>>(),
        ),
        _ => None,
    };
    let source =
        CSch2Object { base: sub_base, poset, sheaf, model: a.model.clone(), anchors };
    let mor = CSch2Mor { f, eps };
    Ok((source, mor))
}

/// Refinement morphism (V)² -> (U)² for anchored covers: `assignment[j] = i`
/// places the fine patch V_j inside the coarse patch U_i; the assignment must
/// be a partition into genuine subcovers (containment is checked anchor-wise).
pub fn refinement_mor(
    fine: &CSch2Object,
    fine_cover: &AnchoredCover,
    coarse: &CSch2Object,
    coarse_cover: &AnchoredCover,
    assignment: &BTreeMap<String, String>,
) -> Result<CSch2Mor> {
    if !fine_cover.model.same_as(&coarse_cover.model) {
        return Err(Error::Precondition("covers live over different glued models".into()));
    }
    let model = &fine_cover.model;
    let fine_anchor = |name: &str| -> &Anchor {
        &fine_cover.anchors[fine_cover.names.iter().position(|n| n == name).unwrap()]
    };
    let coarse_anchor = |name: &str| -> &Anchor {
        &coarse_cover.anchors[coarse_cover.names.iter().position(|n| n == name).unwrap()]
    };
    for (j, i) in assignment {
        if coarse_anchor(i).contains(fine_anchor(j)) == Verdict::No {
            return Err(Error::Precondition(format!("patch {j} is not contained in {i}")));
        }
    }
    let vertex_image = |j: &str| -> Result<&String> {
        assignment
            .get(j)
            .ok_or_else(|| Error::Precondition(format!("patch {j} not assigned")))
    };
    build_vertex_induced_mor(fine, coarse, &|j| vertex_image(j).cloned(), &|s, t| {
        let from = coarse
            .anchors
            .as_ref()
            .and_then(|m| m.get(t))
            .ok_or_else(|| Error::Precondition("coarse object is not anchored".into()))?;
        let to = fine
            .anchors
            .as_ref()
            .and_then(|m| m.get(s))
            .ok_or_else(|| Error::Precondition("fine object is not anchored".into()))?;
        anchored_map(model, from, to)
    })
}

/// Endomorphism of a single-object cover induced by a variable substitution:
/// the identity on the base with the given Laurent images on every ring.
pub fn substitution_endo(
    obj: &CSch2Object,
    images: &BTreeMap<String, Laurent>,
) -> Result<CSch2Mor> {
    build_vertex_induced_mor(obj, obj, &|v| Ok(v.to_string()), &|s, t| {
        let src = obj.ring_of(t).clone();
        let dst = obj.ring_of(s).clone();
        if dst.is_zero() {
            return Ok(RingMor::to_zero(&src));
        }
        let imgs: BTreeMap<String, Laurent> = src
            .vars()
            .iter()
            .map(|v| {
                images
                    .get(v)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput(format!("no image for variable {v}")))
                    .map(|l| (v.clone(), l))
            })
            .collect::<Result<_>>()?;
        RingMor::substitution(&src, &dst, imgs)
    })
}

/// Build the morphism induced by a map on vertices: images of edges and
/// triangles follow from the vertex tuples (collapsed simplices land on the
/// degenerate ones), comparison maps are supplied per simplex.
fn build_vertex_induced_mor(
    src: &CSch2Object,
    dst: &CSch2Object,
    vertex_image: &dyn Fn(&str) -> Result<String>,
    eps_of: &dyn Fn(&str, &str) -> Result<RingMor>,
) -> Result<CSch2Mor> {
    let mut f = SSMap { map0: BTreeMap::new(), map1: BTreeMap::new(), map2: BTreeMap::new() };
    let mut eps = BTreeMap::new();
    let find_target = |tuple: &Vec<String>| -> Result<String> {
        dst.base
            .all_simplices()
            .into_iter()
            .find(|s| &dst.base.vertex_tuple(s) == tuple)
            .ok_or_else(|| {
                Error::InvalidInput(format!("no simplex over {tuple:?} in the target base"))
            })
    };
    for s in src.base.all_simplices() {
        let tuple = src.base.vertex_tuple(&s);
        let image_tuple: Vec<String> =
            tuple.iter().map(|v| vertex_image(v)).collect::<Result<_>>()?;
        let t = find_target(&image_tuple)?;
        match src.base.dim_of(&s) {
            Some(0) => {
                f.map0.insert(s.clone(), t.clone());
            }
            Some(1) => {
                f.map1.insert(s.clone(), t.clone());
            }
            _ => {
                f.map2.insert(s.clone(), t.clone());
            }
        }
        eps.insert(s.clone(), eps_of(&s, &t)?);
    }
    Ok(CSch2Mor { f, eps })
}

/// The product cover V ×_S U with its two projection weak equivalences.
///
/// A projection exists as a semisimplicial map only when the product vertices
/// can be ordered with the projected index weakly increasing along every
/// nonempty edge. A single order serving both sides exists exactly when no
/// two intersecting product patches are strictly twisted ((i,j) vs (i',j')
/// with i < i' and j > j'); otherwise each projection receives its own
/// compatibly ordered copy of the product, the copies carrying the same
/// patches and anchors.
pub struct ProductCover {
    pub cover: AnchoredCover,
    pub object: CSch2Object,
    pub to_left: CSch2Mor,
    pub right_object: CSch2Object,
    pub to_right: CSch2Mor,
    /// both projections share the same source object
    pub shared_source: bool,
}

fn build_product_side(
    model: &GluedModel,
    pairs: &[(usize, usize)],
    left_cover: &AnchoredCover,
    right_cover: &AnchoredCover,
) -> Result<(AnchoredCover, CSch2Object, BTreeMap<String, (String, String)>)> {
    let mut names = Vec::new();
    let mut anchors = Vec::new();
    let mut pair_of = BTreeMap::new();
    for &(i, j) in pairs {
        let inter =
            left_cover.anchors[i].intersect(model, &right_cover.anchors[j])?;
        let name = format!("{}*{}", left_cover.names[i], right_cover.names[j]);
        pair_of.insert(name.clone(), (left_cover.names[i].clone(), right_cover.names[j].clone()));
        names.push(name);
        anchors.push(inter);
    }
    let cover = AnchoredCover::new(model.clone(), names, anchors)?;
    let object = object_from_anchored(&cover)?;
    Ok((cover, object, pair_of))
}

fn project_product(
    model: &GluedModel,
    object: &CSch2Object,
    side: &CSch2Object,
    pair_of: &BTreeMap<String, (String, String)>,
    take_left: bool,
) -> Result<CSch2Mor> {
    build_vertex_induced_mor(object, side, &|v| {
        let (l, r) = &pair_of[v];
        Ok(if take_left { l.clone() } else { r.clone() })
    }, &|s, t| {
        let from = side.anchors.as_ref().unwrap().get(t).unwrap();
        let to = object.anchors.as_ref().unwrap().get(s).unwrap();
        anchored_map(model, from, to)
    })
}

/// A total order of the product pairs along which both coordinates are
/// weakly increasing over every nonempty edge, when one exists.
fn compatible_product_order(
    model: &GluedModel,
    left_cover: &AnchoredCover,
    right_cover: &AnchoredCover,
) -> Result<Option<Vec<(usize, usize)>>> {
    let mut pairs = Vec::new();
    for i in 0..left_cover.anchors.len() {
        for j in 0..right_cover.anchors.len() {
            pairs.push((i, j));
        }
    }
    let anchor = |&(i, j): &(usize, usize)| -> Result<Anchor> {
        left_cover.anchors[i].intersect(model, &right_cover.anchors[j])
    };
    for a in 0..pairs.len() {
        for b in a + 1..pairs.len() {
            let (p, q) = (pairs[a], pairs[b]);
            let comparable = (p.0 <= q.0 && p.1 <= q.1) || (q.0 <= p.0 && q.1 <= p.1);
            if comparable {
                continue;
            }
            let inter = anchor(&p)?.intersect(model, &anchor(&q)?)?;
            if !inter.is_empty() {
                return Ok(None); // twisted intersecting pair: no common order
            }
        }
    }
    // lexicographic order extends the componentwise order
    Ok(Some(pairs))
}

pub fn product_cover(
    left: &CSch2Object,
    left_cover: &AnchoredCover,
    right: &CSch2Object,
    right_cover: &AnchoredCover,
) -> Result<ProductCover> {
    if !left_cover.model.same_as(&right_cover.model) {
        return Err(Error::Precondition("covers live over different glued models".into()));
    }
    let model = left_cover.model.clone();
    let lex: Vec<(usize, usize)> = {
        let mut v = Vec::new();
        for i in 0..left_cover.anchors.len() {
            for j in 0..right_cover.anchors.len() {
                v.push((i, j));
            }
        }
        v
    };
    let (cover, object, pair_of) = build_product_side(&model, &lex, left_cover, right_cover)?;
    let to_left = project_product(&model, &object, left, &pair_of, true)?;
    if compatible_product_order(&model, left_cover, right_cover)?.is_some() {
        let to_right = project_product(&model, &object, right, &pair_of, false)?;
        return Ok(ProductCover {
            cover,
            right_object: object.clone(),
            object,
            to_left,
            to_right,
            shared_source: true,
        });
    }
    // twisted pairs: order the copy for the right projection j-major
    let transposed: Vec<(usize, usize)> = {
        let mut v = Vec::new();
        for j in 0..right_cover.anchors.len() {
            for i in 0..left_cover.anchors.len() {
                v.push((i, j));
            }
        }
        v
    };
    let (_, right_object, pair_of_t) =
        build_product_side(&model, &transposed, left_cover, right_cover)?;
    let to_right = project_product(&model, &right_object, right, &pair_of_t, false)?;
    Ok(ProductCover { cover, object, to_left, right_object, to_right, shared_source: false })
}

// ---------------------------------------------------------------------------
// Schematic equality and zig-zags
// ---------------------------------------------------------------------------

/// Schematic equality: the two morphisms realize the same scheme map, decided
/// patchwise on the vertex charts in shared model coordinates.
pub fn schematic_equal(
    a: &CSch2Object,
    b: &CSch2Object,
    m1: &CSch2Mor,
    m2: &CSch2Mor,
) -> Result<Verdict> {
    for (m, tag) in [(m1, "first"), (m2, "second")] {
        let rep = validate_mor(a, b, m);
        if !rep.ok() {
            return Err(Error::Precondition(format!("{tag} morphism invalid: {rep}")));
        }
    }
    let (Some(anchors_b), Some(model)) = (&b.anchors, &b.model) else {
        return Ok(Verdict::Undecided);
    };
    let mut undecided = false;
    for p in a.base.s0() {
        let ring_p = a.ring_of(p);
        if ring_p.is_zero() {
            continue;
        }
        let (f1p, f2p) = (m1.f.apply(p).unwrap(), m2.f.apply(p).unwrap());
        let (e1, e2) = (&m1.eps[p], &m2.eps[p]);
        if f1p == f2p {
            if !e1.eq_mor(e2) {
                // same chart, different ring maps: genuinely different
                return Ok(Verdict::No);
            }
            continue;
        }
        // different target vertices: compare through the model transition
        let (Anchor::At { patch: n1, .. }, Anchor::At { patch: n2, .. }) =
            (&anchors_b[f1p], &anchors_b[f2p])
        else {
            undecided = true;
            continue;
        };
        if n1 == n2 {
            // both charts use the same model coordinates: compare images
            let same = b.ring_of(f1p).vars().iter().all(|v| {
                match (e1.images.get(v), e2.images.get(v)) {
                    (Some(x), Some(y)) => x.eq_cross(y),
                    _ => false,
                }
            });
            if !same {
                return Ok(Verdict::No);
            }
        } else {
            // transport the second through the transition n2 -> n1
            match model.transition(*n1, *n2) {
                Ok(t) => {
                    let mut same = true;
                    for v in b.ring_of(f1p).vars() {
                        let lhs = e1.images.get(v);
                        let rhs = t
                            .images
                            .get(v)
                            .and_then(|img| img.substitute(&e2.images));
                        match (lhs, rhs) {
                            (Some(x), Some(y)) => {
                                if !x.eq_cross(&y) {
                                    same = false;
                                }
                            }
                            _ => {
                                undecided = true;
                                same = true;
                            }
                        }
                    }
                    if !same {
                        return Ok(Verdict::No);
                    }
                }
                Err(_) => undecided = true,
            }
        }
    }
    Ok(if undecided { Verdict::Undecided } else { Verdict::Yes })
}

/// Zig-zag A <-s- P -g-> B representing a localized morphism; the left leg
/// must be a weak equivalence.
pub struct ZigZag {
    pub apex: CSch2Object,
    pub s: CSch2Mor,
    pub g: CSch2Mor,
    pub apex_cover: Option<AnchoredCover>,
}

pub fn validate_zigzag(z: &ZigZag, src: &CSch2Object, dst: &CSch2Object) -> Report {
    let mut rep = validate_mor(&z.apex, src, &z.s);
    rep.merge(validate_mor(&z.apex, dst, &z.g));
    if rep.ok() && !is_weak_equivalence(&z.apex, src, &z.s).is_yes() {
        rep.push("left leg is not a weak equivalence");
    }
    rep
}

/// The sRMS2 completion: given a weak equivalence f: A -> B and any morphism
/// g: C -> B over a shared model, produce Q with a weak equivalence
/// f': Q -> C and g': Q -> A such that g∘f' and f∘g' are schematic equal. Q
/// is the product of C's cover with the pullback of A's cover along g.
#[allow(clippy::too_many_arguments)]
pub fn srms2_complete(
    a: &CSch2Object,
    a_cover: &AnchoredCover,
    _b: &CSch2Object,
    c: &CSch2Object,
    c_cover: &AnchoredCover,
    g: &CSch2Mor,
    g_target: &CSch2Object,
) -> Result<(CSch2Object, AnchoredCover, CSch2Mor, CSch2Mor)> {
    if !a_cover.model.same_as(&c_cover.model) {
        return Err(Error::Precondition("covers live over different glued models".into()));
    }
    let model = a_cover.model.clone();
    // pull each A-patch back along g at each C-vertex: the scheme map piece
    // at k is given by the comparison eps_g[k] in model coordinates
    let mut names = Vec::new();
    let mut anchors = Vec::new();
    let mut assign_c: BTreeMap<String, String> = BTreeMap::new();
    let mut assign_a: BTreeMap<String, String> = BTreeMap::new();
    for (kidx, kname) in c_cover.names.iter().enumerate() {
        let gamma = &c_cover.anchors[kidx];
        if gamma.is_empty() {
            continue;
        }
        let Anchor::At { patch: pk, factors: tk } = gamma else { unreachable!() };
        let fk = g.f.apply(kname).unwrap();
        let eps_k = &g.eps[kname];
        let anchors_b = g_target
            .anchors
            .as_ref()
            .ok_or_else(|| Error::Precondition("target of g is not anchored".into()))?;
        let Anchor::At { patch: pb, .. } = &anchors_b[fk] else {
            return Err(Error::Precondition("g collapses onto an empty chart".into()));
        };
        for (iidx, iname) in a_cover.names.iter().enumerate() {
            let alpha = &a_cover.anchors[iidx];
            let Anchor::At { patch: pa, factors: fa } = alpha else {
                continue;
            };
            if pa != pb {
                return Err(Error::Precondition(
                    "pullback across model patches is outside the fragment".into(),
                ));
            }
            // preimage of D(fa) under the map with images eps_k: factors pull
            // back through substitution
            let mut fs = tk.clone();
            for f in fa {
                let img = f
                    .substitute(&eps_k.images)
                    .ok_or_else(|| Error::Precondition("pullback substitution failed".into()))?;
                if img.num.is_zero() {
                    fs.insert(Polynomial::zero());
                } else {
                    fs.extend(img.num.structural_factors());
                    fs.extend(img.den.structural_factors());
                }
            }
            let anchor = if fs.iter().any(|f| f.is_zero()) {
                Anchor::Empty
            } else {
                Anchor::At { patch: *pk, factors: fs }
            };
            let name = format!("{kname}^{iname}");
            assign_c.insert(name.clone(), kname.clone());
            assign_a.insert(name.clone(), iname.clone());
            names.push(name);
            anchors.push(anchor);
        }
    }
    // the piece labels must admit an order along which both coordinates
    // weakly increase over every intersecting pair; twisted intersecting
    // labels cannot carry both legs as semisimplicial maps
    {
        let idx_of = |name: &str| names.iter().position(|n| n == name).unwrap();
        for a in 0..names.len() {
            for b in a + 1..names.len() {
                let (ka, ia) = (
                    c_cover.names.iter().position(|n| *n == assign_c[&names[a]]).unwrap(),
                    a_cover.names.iter().position(|n| *n == assign_a[&names[a]]).unwrap(),
                );
                let (kb, ib) = (
                    c_cover.names.iter().position(|n| *n == assign_c[&names[b]]).unwrap(),
                    a_cover.names.iter().position(|n| *n == assign_a[&names[b]]).unwrap(),
                );
                let comparable = (ka <= kb && ia <= ib) || (kb <= ka && ib <= ia);
                if comparable {
                    continue;
                }
                let inter = anchors[idx_of(&names[a])]
                    .intersect(&model, &anchors[idx_of(&names[b])])?;
                if !inter.is_empty() {
                    return Err(Error::Precondition(
                        "pullback pieces are twisted; the completion is outside the structural fragment"
                            .into(),
                    ));
                }
            }
        }
    }
    let q_cover = AnchoredCover::new(model.clone(), names, anchors)?;
    let q = object_from_anchored(&q_cover)?;
    // f': Q -> C is the refinement projection (a weak equivalence)
    let f_prime = refinement_mor(&q, &q_cover, c, c_cover, &assign_c)?;
    // g': Q -> A maps the piece over (k, i) into U_i with the comparison
    // obtained by restricting eps_g[k]
    let g_prime = build_vertex_induced_mor(&q, a, &|v| Ok(assign_a[v].clone()), &|s, t| {
        // source ring: F_A(t); target ring: F_Q(s); images: restrict eps of
        // the underlying C-vertex
        let tuple = q.base.vertex_tuple(s);
        let kname = assign_c[&tuple[0]].clone();
        let eps_k = &g.eps[&kname];
        let src = a.ring_of(t).clone();
        let dst = q.ring_of(s).clone();
        if dst.is_zero() {
            return Ok(RingMor::to_zero(&src));
        }
        let images: BTreeMap<String, Laurent> = src
            .vars()
            .iter()
            .map(|v| (v.clone(), eps_k.images[v].clone()))
            .collect();
        RingMor::substitution(&src, &dst, images)
    })?;
    Ok((q, q_cover, f_prime, g_prime))
}

/// Compose two zig-zags through the sRMS2 completion; the result is verified
/// schematic-commutative.
pub fn compose_zigzags(
    src: &CSch2Object,
    mid: &CSch2Object,
    dst: &CSch2Object,
    z1: &ZigZag,
    z2: &ZigZag,
    covers: (&AnchoredCover, &AnchoredCover),
) -> Result<ZigZag> {
    // z1: src <- I -> mid, z2: mid <- J -> dst
    let (i_cover, j_cover) = covers;
    let (q, q_cover, r, h) = srms2_complete(
        &z2.apex,
        j_cover,
        mid,
        &z1.apex,
        i_cover,
        &z1.g,
        mid,
    )?;
    // r: Q -> I (weak equivalence), h: Q -> J with z1.g ∘ r ≈ z2.s ∘ h
    let lhs = compose_mor(&q, &r, &z1.g)?;
    let rhs = compose_mor(&q, &h, &z2.s)?;
    match schematic_equal(&q, mid, &lhs, &rhs)? {
        Verdict::Yes => {}
        v => {
            return Err(Error::Precondition(format!(
                "composition square is not schematic commutative: {v}"
            )))
        }
    }
    let s = compose_mor(&q, &r, &z1.s)?;
    let g = compose_mor(&q, &h, &z2.g)?;
    let _ = (src, dst);
    Ok(ZigZag { apex: q, s, g, apex_cover: Some(q_cover) })
}

/// Equivalence of two zig-zags with the same endpoints: search for a
/// connecting apex with weak equivalences to both, checking both squares
/// schematically. Candidates, in order: equal apex covers (identity legs),
/// one cover refining the other, and the product cover when a shared order
/// exists. A decided schematic inequality of the realized maps certifies a
/// negative answer; otherwise failure to find an apex leaves the question
/// undecided.
pub fn zigzag_equivalent(
    src: &CSch2Object,
    dst: &CSch2Object,
    z1: &ZigZag,
    z1_cover: &AnchoredCover,
    z2: &ZigZag,
    z2_cover: &AnchoredCover,
) -> Result<Verdict> {
    let check_with = |apex: &CSch2Object,
                      u: &CSch2Mor,
                      v: &CSch2Mor|
     -> Result<(Verdict, Verdict)> {
        let su = schematic_equal(
            apex,
            src,
            &compose_mor(apex, u, &z1.s)?,
            &compose_mor(apex, v, &z2.s)?,
        )?;
        let sf = schematic_equal(
            apex,
            dst,
            &compose_mor(apex, u, &z1.g)?,
            &compose_mor(apex, v, &z2.g)?,
        )?;
        Ok((su, sf))
    };
    // equal covers: connect through the common apex with identity legs
    if z1_cover.names == z2_cover.names
        && z1_cover.anchors == z2_cover.anchors
        && z1_cover.model.same_as(&z2_cover.model)
    {
        let id1 = identity_mor(&z1.apex);
        let id2 = identity_mor(&z1.apex);
        let (su, sf) = check_with(&z1.apex, &id1, &id2)?;
        return Ok(match (su, sf) {
            (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
            (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
            _ => Verdict::Undecided,
        });
    }
    // one apex cover refines the other
    if let Some(assignment) = refinement_assignment(z2_cover, z1_cover) {
        let u = refinement_mor(&z2.apex, z2_cover, &z1.apex, z1_cover, &assignment)?;
        if is_weak_equivalence(&z2.apex, &z1.apex, &u).is_yes() {
            let idv = identity_mor(&z2.apex);
            let (su, sf) = check_with(&z2.apex, &u, &idv)?;
            return Ok(match (su, sf) {
                (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
                (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
                _ => Verdict::Undecided,
            });
        }
    }
    if let Some(assignment) = refinement_assignment(z1_cover, z2_cover) {
        let v = refinement_mor(&z1.apex, z1_cover, &z2.apex, z2_cover, &assignment)?;
        if is_weak_equivalence(&z1.apex, &z2.apex, &v).is_yes() {
            let idu = identity_mor(&z1.apex);
            let (su, sf) = check_with(&z1.apex, &idu, &v)?;
            return Ok(match (su, sf) {
                (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
                (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
                _ => Verdict::Undecided,
            });
        }
    }
    // product apex, when one shared order serves both projections
    let prod = product_cover(&z1.apex, z1_cover, &z2.apex, z2_cover)?;
    if prod.shared_source {
        let (su, sf) = check_with(&prod.object, &prod.to_left, &prod.to_right)?;
        let wu = is_weak_equivalence(&prod.object, &z1.apex, &prod.to_left);
        let wv = is_weak_equivalence(&prod.object, &z2.apex, &prod.to_right);
        return Ok(match (su, sf, wu, wv) {
            (Verdict::Yes, Verdict::Yes, Verdict::Yes, Verdict::Yes) => Verdict::Yes,
            (Verdict::No, _, _, _) | (_, Verdict::No, _, _) => Verdict::No,
            _ => Verdict::Undecided,
        });
    }
    Ok(Verdict::Undecided)
}

/// Assignment placing each patch of `fine` inside a patch of `coarse`, when
/// anchor containment decides one.
fn refinement_assignment(
    fine: &AnchoredCover,
    coarse: &AnchoredCover,
) -> Option<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (j, a) in fine.anchors.iter().enumerate() {
        let host = coarse
            .anchors
            .iter()
            .position(|c| c.contains(a) == Verdict::Yes)?;
        out.insert(fine.names[j].clone(), coarse.names[host].clone());
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Counterexamples
// ---------------------------------------------------------------------------

/// Report of the failure of strict RMS3 for the weak equivalences.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Rms3Report {
    pub pi_is_weak_equivalence: Verdict,
    pub composites_strictly_equal: bool,
    pub equalizer_simplices: usize,
    pub strict_equalizer_exists: bool,
    pub psi_a_equals_psi_b_strictly: bool,
    pub psi_a_schematic_equal_psi_b: Verdict,
    pub psi_a_is_weak_equivalence: Verdict,
    pub srms3_holds_here: bool,
}

/// Objects whose patches are all the whole one-patch model: the trivial
/// covers used by the RMS3 example.
fn constant_object(
    model: &GluedModel,
    vertices: &[&str],
) -> Result<(CSch2Object, AnchoredCover)> {
    let names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
    let anchors = vec![Anchor::whole(0); names.len()];
    let cover = AnchoredCover::new(model.clone(), names, anchors)?;
    let obj = object_from_anchored(&cover)?;
    Ok((obj, cover))
}

/// The RMS3 counterexample: π ∘ ψ_a = π ∘ ψ_b strictly, yet no semisimplicial
/// map into A's base can equalize f_a and f_b, while ψ_a and ψ_b are
/// schematic equal. The equalizer search is exhaustive: the equalizer
/// sub-semisimplicial set is computed, and any equalizing map from any Q
/// factors through it.
pub fn rms3_counterexample(ring: &LocRing) -> Result<Rms3Report> {
    let model = GluedModel::single_patch(ring.clone());
    // A: one vertex u; B: two patches a, b both the whole model (a trivial
    // double cover, so the edge ring is again the constant ring)
    let (a_obj, _a_cover) = constant_object(&model, &["u"])?;
    let (b_obj, _b_cover) = constant_object(&model, &["a", "b"])?;
    let mk_psi = |target_vertex: &str| -> Result<CSch2Mor> {
        build_vertex_induced_mor(&a_obj, &b_obj, &|_| Ok(target_vertex.to_string()), &|s, t| {
            let src = b_obj.ring_of(t).clone();
            let dst = a_obj.ring_of(s).clone();
            RingMor::iso(&src, &dst, src.identity_images(), dst.identity_images())
        })
    };
    let psi_a = mk_psi("a")?;
    let psi_b = mk_psi("b")?;
    let pi = build_vertex_induced_mor(&b_obj, &a_obj, &|_| Ok("u".to_string()), &|s, t| {
        let src = a_obj.ring_of(t).clone();
        let dst = b_obj.ring_of(s).clone();
        RingMor::iso(&src, &dst, src.identity_images(), dst.identity_images())
    })?;
    for (obj, srcobj, m) in
        [(&b_obj, &a_obj, &psi_a), (&b_obj, &a_obj, &psi_b)]
    {
        let rep = validate_mor(srcobj, obj, m);
        if !rep.ok() {
            return Err(Error::InvalidInput(format!("counterexample morphism invalid: {rep}")));
        }
    }
    let rep_pi = validate_mor(&b_obj, &a_obj, &pi);
    if !rep_pi.ok() {
        return Err(Error::InvalidInput(format!("collapse morphism invalid: {rep_pi}")));
    }
    let pi_we = is_weak_equivalence(&b_obj, &a_obj, &pi);
    let left = compose_mor(&a_obj, &psi_a, &pi)?;
    let right = compose_mor(&a_obj, &psi_b, &pi)?;
    let composites_equal = mor_strictly_equal(&a_obj, &left, &right);
    // the equalizer sub-semisimplicial set of f_a, f_b inside A's base: any
    // equalizing map lands in it, so it is empty iff no equalizer exists
    let equalizer: Vec<String> = a_obj
        .base
        .all_simplices()
        .into_iter()
        .filter(|s| psi_a.f.apply(s) == psi_b.f.apply(s))
        .collect();
    let psi_eq = mor_strictly_equal(&a_obj, &psi_a, &psi_b);
    let schematic = schematic_equal(&a_obj, &b_obj, &psi_a, &psi_b)?;
    // sRMS3 premise: π ∘ ψ_a schematic-equal π ∘ ψ_b; conclusion witnessed by
    // t = id_A since ψ_a and ψ_b are already schematic equal
    let srms3 = {
        let premise = schematic_equal(&a_obj, &a_obj, &left, &right)?;
        premise.is_yes() && schematic.is_yes()
    };
    Ok(Rms3Report {
        pi_is_weak_equivalence: pi_we,
        composites_strictly_equal: composites_equal,
        equalizer_simplices: equalizer.len(),
        strict_equalizer_exists: !equalizer.is_empty(),
        psi_a_equals_psi_b_strictly: psi_eq,
        psi_a_schematic_equal_psi_b: schematic,
        psi_a_is_weak_equivalence: is_weak_equivalence(&a_obj, &b_obj, &psi_a),
        srms3_holds_here: srms3,
    })
}

/// Sanity flip for the RMS3 report: with B replaced by A itself the two
/// morphisms coincide and the strict equalizer exists.
pub fn rms3_sanity_flip(ring: &LocRing) -> Result<bool> {
    let model = GluedModel::single_patch(ring.clone());
    let (a_obj, _) = constant_object(&model, &["u"])?;
    let id1 = identity_mor(&a_obj);
    let id2 = identity_mor(&a_obj);
    let equalizer: Vec<String> = a_obj
        .base
        .all_simplices()
        .into_iter()
        .filter(|s| id1.f.apply(s) == id2.f.apply(s))
        .collect();
    Ok(equalizer.len() == a_obj.base.all_simplices().len())
}

fn mor_strictly_equal(src: &CSch2Object, m1: &CSch2Mor, m2: &CSch2Mor) -> bool {
    if m1.f != m2.f {
        return false;
    }
    src.base.all_simplices().iter().all(|s| m1.eps[s].eq_mor(&m2.eps[s]))
}

/// Report of the non-schematic witness: the two triangle points have empty
/// intersection (trivial section ring) while the tensor of their rings over
/// the edge ring is nonzero.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NonSchematicReport {
    pub space_points: usize,
    pub triangle_points: (String, String),
    pub opens_disjoint: bool,
    pub sections_over_intersection_trivial: bool,
    pub tensor_ring: String,
    pub tensor_nonzero: bool,
    pub witness_confirmed: bool,
}

/// The four-patch configuration: U_1 ∩ U_2 = Spec A, the two triples carry
/// B = A_f and C = A_g, and B ⊗_A C = A_{fg} is nonzero although the triangle
/// opens in S_U² are disjoint. With f or g zero the tensor vanishes and there
/// is no witness.
pub fn non_schematic_witness(f: &Polynomial, g: &Polynomial) -> Result<NonSchematicReport> {
    let a = LocRing::polynomial(&["x"]);
    let (b_ring, b_inc) = crate::ringcat::localize(&a, f);
    let (c_ring, c_inc) = crate::ringcat::localize(&a, g);
    let tensor = tensor_over(&a, &b_inc, &c_inc)?;
    if b_ring.is_zero() || c_ring.is_zero() {
        return Ok(NonSchematicReport {
            space_points: 0,
            triangle_points: (String::new(), String::new()),
            opens_disjoint: true,
            sections_over_intersection_trivial: true,
            tensor_ring: tensor.to_string(),
            tensor_nonzero: !tensor.is_zero(),
            witness_confirmed: false,
        });
    }
    // nerve of the figure: patches a, b carry A; c carries B inside U_1∩U_2;
    // d carries C; edges ab: A, ac/bc: B, ad/bd: C; triples abc: B, abd: C
    let names = vec!["U1".to_string(), "U2".to_string(), "U3".to_string(), "U4".to_string()];
    let patches = vec![a.clone(), a.clone(), b_ring.clone(), c_ring.clone()];
    let mut overlaps = BTreeMap::new();
    overlaps.insert(
        (0usize, 1usize),
        NerveOverlap {
            ring: a.clone(),
            from_lo: RingMor::identity(&a),
            from_hi: RingMor::identity(&a),
        },
    );
    for (i, ring, inc) in [(2usize, &b_ring, &b_inc), (3usize, &c_ring, &c_inc)] {
        for lo in [0usize, 1] {
            overlaps.insert(
                (lo, i),
                NerveOverlap {
                    ring: ring.clone(),
                    from_lo: inc.clone(),
                    from_hi: RingMor::identity(ring),
                },
            );
        }
    }
    let mut triples = BTreeMap::new();
    for (k, ring, inc) in [(2usize, &b_ring, &b_inc), (3usize, &c_ring, &c_inc)] {
        triples.insert(
            (0usize, 1usize, k),
            NerveTriple {
                ring: ring.clone(),
                from_edges: BTreeMap::from([
                    ((0usize, 1usize), inc.clone()),
                    ((0usize, k), RingMor::identity(ring)),
                    ((1usize, k), RingMor::identity(ring)),
                ]),
            },
        );
    }
    let nerve = CoverNerve { patch_names: names, patches, overlaps, triples };
    let (poset, sheaf, _) = build_su2(&nerve)?;
    // the two triangle points
    let p = poset
        .elements()
        .iter()
        .find(|e| e.split('|').count() == 3 && e.contains("U3"))
        .cloned()
        .ok_or_else(|| Error::InvalidInput("missing first triangle point".into()))?;
    let q = poset
        .elements()
        .iter()
        .find(|e| e.split('|').count() == 3 && e.contains("U4"))
        .cloned()
        .ok_or_else(|| Error::InvalidInput("missing second triangle point".into()))?;
    let space = crate::finspace::alexandrov(&poset);
    let up = space.min_open(&p)?;
    let uq = space.min_open(&q)?;
    let inter = up.intersect(&uq);
    let disjoint = inter.is_empty();
    let secs = sheaf.sections_ring(&inter)?;
    let trivial = matches!(secs, RingSections::Zero);
    let confirmed = disjoint && trivial && !tensor.is_zero();
    Ok(NonSchematicReport {
        space_points: poset.len(),
        triangle_points: (p, q),
        opens_disjoint: disjoint,
        sections_over_intersection_trivial: trivial,
        tensor_ring: tensor.to_string(),
        tensor_nonzero: !tensor.is_zero(),
        witness_confirmed: confirmed,
    })
}
