//! Sheaves on finite posets, valued in exact rational vector spaces or in
//! structural localized rings.
//!
//! By the equivalence between sheaves on an Alexandrov space and presheaves
//! on its specialization poset, a sheaf here is just a stalk per point plus a
//! restriction map per comparable pair, with functoriality checked
//! exhaustively. Sections over arbitrary opens are computed as kernels (vect)
//! or through the structural rules of the ring fragment.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::exact::RatMat;
use crate::finspace::{alexandrov, FinPreorder, PointSet};
use crate::ringcat::{LocRing, RingMor};
use crate::{Error, Report, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SheafData {
    /// dims\[p\] is the stalk dimension at p; maps\[(p, q)\] is the
    /// restriction F(U_p) -> F(U_q) for every strict pair p < q.
    Vect { dims: Vec<usize>, maps: BTreeMap<(usize, usize), RatMat> },
    /// Ring-valued: a structural ring per point and a RingMor per strict pair.
    Ring { stalks: Vec<LocRing>, maps: BTreeMap<(usize, usize), RingMor> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoSheaf {
    pub base: FinPreorder,
    pub data: SheafData,
}

/// Sections of a vect sheaf over an open set: a basis of the compatible
/// families, presented inside the product of the stalks at the minimal
/// points of the open.
#[derive(Debug, Clone)]
pub struct SectionSpace {
    pub minimals: Vec<usize>,
    pub block_dims: Vec<usize>,
    /// (sum of block_dims) x dim matrix whose columns are the basis sections
    pub basis: RatMat,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Sections of a ring sheaf over an open set, within the structural fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingSections {
    /// Empty open, or every minimal stalk is the zero ring.
    Zero,
    /// The sections are canonically the stalk at this point (least element of
    /// the open, or a dominant minimal point whose rivals land isomorphically
    /// in common refinements).
    Stalk { at: usize },
    /// Not structurally expressible: a symbolic limit over these minimals.
    Limit { minimals: Vec<usize> },
}

impl PoSheaf {
    pub fn vect(base: FinPreorder, dims: Vec<usize>, maps: BTreeMap<(usize, usize), RatMat>) -> Result<Self> {
        let f = PoSheaf { base, data: SheafData::Vect { dims, maps } };
        let rep = f.validate();
        if !rep.ok() {
            return Err(Error::InvalidInput(format!("sheaf not functorial: {rep}")));
        }
        Ok(f)
    }

    pub fn ring(base: FinPreorder, stalks: Vec<LocRing>, maps: BTreeMap<(usize, usize), RingMor>) -> Result<Self> {
        let f = PoSheaf { base, data: SheafData::Ring { stalks, maps } };
        let rep = f.validate();
        if !rep.ok() {
            return Err(Error::InvalidInput(format!("ring sheaf not functorial: {rep}")));
        }
        Ok(f)
    }

    /// Build a vect sheaf from restriction maps on cover pairs only; the
    /// remaining maps are composites along any cover path, and functoriality
    /// validation rejects path-dependent data.
    pub fn vect_from_covers(
        base: FinPreorder,
        dims: Vec<usize>,
        cover_maps: BTreeMap<(usize, usize), RatMat>,
    ) -> Result<Self> {
        let covers = cover_pairs(&base);
        for k in cover_maps.keys() {
            if !covers.contains(k) {
                return Err(Error::InvalidInput(format!("({}, {}) is not a cover pair", k.0, k.1)));
            }
        }
        let mut maps = cover_maps;
        for (i, j) in strict_pairs(&base) {
            if maps.contains_key(&(i, j)) {
                continue;
            }
            let m = compose_along_path(&base, &maps, &covers, i, j, &dims)?;
            maps.insert((i, j), m);
        }
        PoSheaf::vect(base, dims, maps)
    }

    /// Constant sheaf: every stalk Q^dim, every restriction the identity.
    pub fn constant(base: &FinPreorder, dim: usize) -> PoSheaf {
        let n = base.len();
        let mut maps = BTreeMap::new();
        for (i, j) in strict_pairs(base) {
            maps.insert((i, j), RatMat::identity(dim));
        }
        PoSheaf { base: base.clone(), data: SheafData::Vect { dims: vec![dim; n], maps } }
    }

    pub fn is_vect(&self) -> bool {
        matches!(self.data, SheafData::Vect { .. })
    }

    pub fn stalk_dim(&self, p: usize) -> usize {
        match &self.data {
            SheafData::Vect { dims, .. } => dims[p],
            SheafData::Ring { .. } => panic!("stalk_dim on a ring sheaf"),
        }
    }

    pub fn stalk_ring(&self, p: usize) -> &LocRing {
        match &self.data {
            SheafData::Ring { stalks, .. } => &stalks[p],
            SheafData::Vect { .. } => panic!("stalk_ring on a vect sheaf"),
        }
    }

    /// Restriction F(U_p) -> F(U_q) for p <= q (identity when p == q).
    pub fn restriction(&self, p: usize, q: usize) -> RatMat {
        match &self.data {
            SheafData::Vect { dims, maps } => {
                if p == q {
                    RatMat::identity(dims[p])
                } else {
                    maps[&(p, q)].clone()
                }
            }
            SheafData::Ring { .. } => panic!("matrix restriction on a ring sheaf"),
        }
    }

    pub fn ring_restriction(&self, p: usize, q: usize) -> RingMor {
        match &self.data {
            SheafData::Ring { stalks, maps } => {
                if p == q {
                    RingMor::identity(&stalks[p])
                } else {
                    maps[&(p, q)].clone()
                }
            }
            SheafData::Vect { .. } => panic!("ring restriction on a vect sheaf"),
        }
    }

    /// Exhaustive functoriality check on all composable strict pairs.
    pub fn validate(&self) -> Report {
        let mut rep = Report::new();
        let n = self.base.len();
        match &self.data {
            SheafData::Vect { dims, maps } => {
                if dims.len() != n {
                    rep.push("one dimension per point required");
                    return rep;
                }
                for (i, j) in strict_pairs(&self.base) {
                    match maps.get(&(i, j)) {
                        None => rep.push(format!(
                            "missing restriction {} -> {}",
                            self.base.elements()[i],
                            self.base.elements()[j]
                        )),
                        Some(m) => {
                            if m.nrows() != dims[j] || m.ncols() != dims[i] {
                                rep.push(format!(
                                    "restriction {} -> {} has shape {}x{}, want {}x{}",
                                    self.base.elements()[i],
                                    self.base.elements()[j],
                                    m.nrows(),
                                    m.ncols(),
                                    dims[j],
                                    dims[i]
                                ));
                            }
                        }
                    }
                }
                if !rep.ok() {
                    return rep;
                }
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            if i != j
                                && j != k
                                && i != k
                                && self.base.leq_idx(i, j)
                                && self.base.leq_idx(j, k)
                            {
                                let lhs = maps[&(j, k)].mul(&maps[&(i, j)]);
                                if lhs != maps[&(i, k)] {
                                    rep.push(format!(
                                        "functoriality fails along {} <= {} <= {}",
                                        self.base.elements()[i],
                                        self.base.elements()[j],
                                        self.base.elements()[k]
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            SheafData::Ring { stalks, maps } => {
                if stalks.len() != n {
                    rep.push("one stalk per point required");
                    return rep;
                }
                for (i, j) in strict_pairs(&self.base) {
                    match maps.get(&(i, j)) {
                        None => rep.push(format!(
                            "missing restriction {} -> {}",
                            self.base.elements()[i],
                            self.base.elements()[j]
                        )),
                        Some(m) => {
                            if m.source != stalks[i] || m.target != stalks[j] {
                                rep.push(format!(
                                    "restriction {} -> {} has wrong endpoints",
                                    self.base.elements()[i],
                                    self.base.elements()[j]
                                ));
                            } else if m.validate().is_err() {
                                rep.push(format!(
                                    "restriction {} -> {} is not well defined",
                                    self.base.elements()[i],
                                    self.base.elements()[j]
                                ));
                            }
                        }
                    }
                }
                if !rep.ok() {
                    return rep;
                }
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            if i != j
                                && j != k
                                && i != k
                                && self.base.leq_idx(i, j)
                                && self.base.leq_idx(j, k)
                            {
                                let comp = maps[&(i, j)].compose(&maps[&(j, k)]);
                                match comp {
                                    Ok(c) if c.eq_mor(&maps[&(i, k)]) => {}
                                    _ => rep.push(format!(
                                        "ring functoriality fails along {} <= {} <= {}",
                                        self.base.elements()[i],
                                        self.base.elements()[j],
                                        self.base.elements()[k]
                                    )),
                                }
                            }
                        }
                    }
                }
            }
        }
        rep
    }

    /// Sections of a vect sheaf over an open set, as the kernel of the
    /// pairwise-compatibility map on the minimal points of the open.
    pub fn sections_vect(&self, open: &PointSet) -> Result<SectionSpace> {
        let SheafData::Vect { dims, .. } = &self.data else {
            return Err(Error::Precondition("sections_vect on a ring sheaf".into()));
        };
        let space = alexandrov(&self.base);
        if !space.is_open(open) {
            return Err(Error::Precondition("sections over a non-open set".into()));
        }
        let minimals = self.base.minimal_in(open);
        let block_dims: Vec<usize> = minimals.iter().map(|&m| dims[m]).collect();
        let total: usize = block_dims.iter().sum();
        let offsets: Vec<usize> = block_dims
            .iter()
            .scan(0usize, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect();
        let mut rows: Vec<Vec<crate::exact::Rat>> = Vec::new();
        for (a, &m1) in minimals.iter().enumerate() {
            for (b, &m2) in minimals.iter().enumerate() {
                if b <= a {
                    continue;
                }
                for r in open.iter() {
                    if self.base.leq_idx(m1, r) && self.base.leq_idx(m2, r) {
                        let r1 = self.restriction(m1, r);
                        let r2 = self.restriction(m2, r);
                        for row in 0..r1.nrows() {
                            let mut line = vec![crate::exact::Rat::zero(); total];
                            for c in 0..r1.ncols() {
                                line[offsets[a] + c] = r1[(row, c)].clone();
                            }
                            for c in 0..r2.ncols() {
                                line[offsets[b] + c] = -r2[(row, c)].clone();
                            }
                            rows.push(line);
                        }
                    }
                }
            }
        }
        let constraint = if rows.is_empty() {
            RatMat::zero(0, total)
        } else {
            RatMat::from_rows(rows)
        };
        Ok(SectionSpace { minimals, block_dims, basis: constraint.kernel_basis() })
    }

    /// Restriction of section spaces along an inclusion of opens V ⊆ U.
    pub fn restrict_sections(
        &self,
        u: &SectionSpace,
        v_open: &PointSet,
    ) -> Result<SectionSpace> {
        let v = self.sections_vect(v_open)?;
        let map = self.section_restriction_matrix(u, &v)?;
        let images = map.mul(&u.basis);
        let coeffs = RatMat::express_in_basis(&v.basis, &images).ok_or_else(|| {
            Error::InvalidInput("restricted section left the section space; sheaf data inconsistent".into())
        })?;
        Ok(SectionSpace { minimals: v.minimals, block_dims: v.block_dims, basis: v.basis.mul(&coeffs) })
    }

    /// Matrix from the minimal-point product of U to the minimal-point
    /// product of V ⊆ U, sending a compatible family to its restriction.
    pub fn section_restriction_matrix(
        &self,
        u: &SectionSpace,
        v: &SectionSpace,
    ) -> Result<RatMat> {
        let u_total: usize = u.block_dims.iter().sum();
        let v_total: usize = v.block_dims.iter().sum();
        let u_offsets = offsets_of(&u.block_dims);
        let v_offsets = offsets_of(&v.block_dims);
        let mut out = RatMat::zero(v_total, u_total);
        for (bi, &mv) in v.minimals.iter().enumerate() {
            // any minimal of U below mv induces the same map on sections
            let Some((ai, &mu)) =
                u.minimals.iter().enumerate().find(|(_, &mu)| self.base.leq_idx(mu, mv))
            else {
                return Err(Error::Precondition("target open is not a subset of the source open".into()));
            };
            let r = self.restriction(mu, mv);
            for i in 0..r.nrows() {
                for j in 0..r.ncols() {
                    out[(v_offsets[bi] + i, u_offsets[ai] + j)] = r[(i, j)].clone();
                }
            }
        }
        Ok(out)
    }

    /// Sections of a ring sheaf over an open set, by the structural rules:
    /// empty or all-zero opens give the zero ring; a least element (or a
    /// dominant minimal point whose rivals map isomorphically into common
    /// refinements) gives that stalk; anything else is a symbolic limit.
    pub fn sections_ring(&self, open: &PointSet) -> Result<RingSections> {
        let SheafData::Ring { stalks, .. } = &self.data else {
            return Err(Error::Precondition("sections_ring on a vect sheaf".into()));
        };
        let space = alexandrov(&self.base);
        if !space.is_open(open) {
            return Err(Error::Precondition("sections over a non-open set".into()));
        }
        let minimals = self.base.minimal_in(open);
        let live: Vec<usize> =
            minimals.iter().copied().filter(|&m| !stalks[m].is_zero()).collect();
        if live.is_empty() {
            return Ok(RingSections::Zero);
        }
        if live.len() == 1 {
            return Ok(RingSections::Stalk { at: live[0] });
        }
        'candidate: for &j0 in &live {
            for &k in &live {
                if k == j0 {
                    continue;
                }
                let dominated = open.iter().any(|r| {
                    self.base.leq_idx(j0, r)
                        && self.base.leq_idx(k, r)
                        && self.ring_restriction(k, r).is_iso().is_yes()
                });
                if !dominated {
                    continue 'candidate;
                }
            }
            return Ok(RingSections::Stalk { at: j0 });
        }
        Ok(RingSections::Limit { minimals })
    }

    pub fn ring_of_sections(&self, rs: &RingSections) -> Option<LocRing> {
        match rs {
            RingSections::Zero => Some(LocRing::zero_ring()),
            RingSections::Stalk { at } => Some(self.stalk_ring(*at).clone()),
            RingSections::Limit { .. } => None,
        }
    }
}

fn offsets_of(block_dims: &[usize]) -> Vec<usize> {
    block_dims
        .iter()
        .scan(0usize, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect()
}

pub fn strict_pairs(p: &FinPreorder) -> Vec<(usize, usize)> {
    let n = p.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && p.leq_idx(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn cover_pairs(p: &FinPreorder) -> Vec<(usize, usize)> {
    strict_pairs(p)
        .into_iter()
        .filter(|&(i, j)| {
            !(0..p.len()).any(|k| {
                k != i && k != j && p.leq_idx(i, k) && p.leq_idx(k, j)
            })
        })
        .collect()
}

fn compose_along_path(
    base: &FinPreorder,
    maps: &BTreeMap<(usize, usize), RatMat>,
    covers: &[(usize, usize)],
    i: usize,
    j: usize,
    dims: &[usize],
) -> Result<RatMat> {
    // DFS over cover steps from i up to j
    let mut stack = vec![(i, RatMat::identity(dims[i]))];
    let mut seen = std::collections::BTreeSet::new();
    while let Some((at, acc)) = stack.pop() {
        if at == j {
            return Ok(acc);
        }
        if !seen.insert(at) {
            continue;
        }
        for &(a, b) in covers {
            if a == at && base.leq_idx(b, j) {
                let step = maps.get(&(a, b)).ok_or_else(|| {
                    Error::InvalidInput(format!("missing cover restriction {a} -> {b}"))
                })?;
                stack.push((b, step.mul(&acc)));
            }
        }
    }
    Err(Error::InvalidInput(format!("no cover path from {i} to {j}")))
}

/// Pushforward along a monotone map f: X -> Y, given by images of the points
/// of X. (f_* F)(U_q) = sections(F, f^{-1}(U_q)); vect sheaves only.
pub fn pushforward(
    f: &PoSheaf,
    map: &BTreeMap<String, String>,
    target: &FinPreorder,
) -> Result<PoSheaf> {
    if !f.base.is_monotone(map, target) {
        return Err(Error::Precondition("pushforward along a non-monotone map".into()));
    }
    if !f.is_vect() {
        return Err(Error::Precondition("pushforward implemented for vect sheaves".into()));
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
    let mut spaces = Vec::with_capacity(n);
    for q in 0..n {
        spaces.push(f.sections_vect(&preimage(q))?);
    }
    let dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
    let mut maps = BTreeMap::new();
    for (q1, q2) in strict_pairs(target) {
        // f^{-1}(U_{q2}) ⊆ f^{-1}(U_{q1})
        let restricted = f.restrict_sections(&spaces[q1], &preimage(q2))?;
        // express each restricted basis column in the q2 basis
        let coeffs = RatMat::express_in_basis(&spaces[q2].basis, &restricted.basis)
            .ok_or_else(|| Error::InvalidInput("pushforward restriction failed".into()))?;
        maps.insert((q1, q2), coeffs);
    }
    PoSheaf::vect(target.clone(), dims, maps)
}

/// Cosheaf on a poset: a stalk per point with corestrictions
/// F(U_q) -> F(U_p) for p <= q. Computes homology on closed sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PoCosheaf {
    pub base: FinPreorder,
    pub dims: Vec<usize>,
    /// maps\[(p, q)\] : F(U_q) -> F(U_p) for p < q
    pub maps: BTreeMap<(usize, usize), RatMat>,
}

impl PoCosheaf {
    pub fn new(
        base: FinPreorder,
        dims: Vec<usize>,
        maps: BTreeMap<(usize, usize), RatMat>,
    ) -> Result<Self> {
        let c = PoCosheaf { base, dims, maps };
        let rep = c.validate();
        if !rep.ok() {
            return Err(Error::InvalidInput(format!("cosheaf not functorial: {rep}")));
        }
        Ok(c)
    }

    pub fn constant(base: &FinPreorder, dim: usize) -> PoCosheaf {
        let n = base.len();
        let mut maps = BTreeMap::new();
        for (i, j) in strict_pairs(base) {
            maps.insert((i, j), RatMat::identity(dim));
        }
        PoCosheaf { base: base.clone(), dims: vec![dim; n], maps }
    }

    pub fn corestriction(&self, p: usize, q: usize) -> RatMat {
        if p == q {
            RatMat::identity(self.dims[p])
        } else {
            self.maps[&(p, q)].clone()
        }
    }

    pub fn validate(&self) -> Report {
        let mut rep = Report::new();
        let n = self.base.len();
        if self.dims.len() != n {
            rep.push("one dimension per point required");
            return rep;
        }
        for (i, j) in strict_pairs(&self.base) {
            match self.maps.get(&(i, j)) {
                None => rep.push(format!("missing corestriction for pair ({i}, {j})")),
                Some(m) => {
                    if m.nrows() != self.dims[i] || m.ncols() != self.dims[j] {
                        rep.push(format!("corestriction ({i}, {j}) has the wrong shape"));
                    }
                }
            }
        }
        if !rep.ok() {
            return rep;
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j && j != k && i != k && self.base.leq_idx(i, j) && self.base.leq_idx(j, k)
                    {
                        // dual functoriality: co(i,j) ∘ co(j,k) = co(i,k)
                        let lhs = self.maps[&(i, j)].mul(&self.maps[&(j, k)]);
                        if lhs != self.maps[&(i, k)] {
                            rep.push(format!("cosheaf functoriality fails along {i} <= {j} <= {k}"));
                        }
                    }
                }
            }
        }
        rep
    }
}
