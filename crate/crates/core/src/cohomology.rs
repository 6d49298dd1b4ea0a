//! The complexes computing sheaf cohomology and cosheaf homology on finite
//! spaces, Čech complexes of covers, and the degree-(0,1) comparison for the
//! projective-line model.
//!
//! Degree i of the cochain complex is indexed by strict chains
//! x_0 < ... < x_i inside the open, with values in the stalk at the top
//! element. The differential is
//!   (dσ)(x_0<...<x_{i+1}) = Σ_{j<=i} (-1)^j σ(delete x_j)
//!                           + (-1)^{i+1} ρ_{x_i<=x_{i+1}}(σ(delete x_{i+1}))
//! which is the unique convention (up to sign) making degree-0 cohomology the
//! space of sections; d∘d = 0 is machine-checked on every complex.

use std::collections::BTreeMap;


use crate::exact::{par_map_indexed, Rat, RatMat};
use crate::finspace::{FinPreorder, PointSet};
use crate::ringcat::{graded_sections, GradedPiece, LocRing};
use crate::sheafcore::{PoCosheaf, PoSheaf, SectionSpace};
use crate::sscomplex::{clique_complex, Graph, UGraph};
use crate::{Error, Report, Result};

/// Cochain complex of exact vector spaces; diffs\[i\] maps degree i to i+1.
#[derive(Debug, Clone)]
pub struct CochainComplex {
    /// chains\[i\] lists the strict (i+1)-element chains indexing degree i
    pub chains: Vec<Vec<Vec<usize>>>,
    /// block dimension of each chain summand, per degree
    pub block_dims: Vec<Vec<usize>>,
    pub diffs: Vec<RatMat>,
}

impl CochainComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.block_dims.iter().map(|b| b.iter().sum()).collect()
    }

    pub fn top_degree(&self) -> usize {
        self.block_dims.len().saturating_sub(1)
    }

    pub fn check_dd_zero(&self) -> Report {
        let mut rep = Report::new();
        for i in 0..self.diffs.len().saturating_sub(1) {
            if !self.diffs[i + 1].mul(&self.diffs[i]).is_zero() {
                rep.push(format!("d∘d != 0 between degrees {i} and {}", i + 2));
            }
        }
        rep
    }

    /// Exact cohomology dimensions. Per-degree ranks are independent and run
    /// under the thread cap.
    pub fn cohomology_dims(&self) -> Result<Vec<usize>> {
        let rep = self.check_dd_zero();
        if !rep.ok() {
            return Err(Error::Precondition(format!("broken complex: {rep}")));
        }
        let dims = self.dims();
        if dims.is_empty() {
            return Ok(Vec::new());
        }
        let ranks = par_map_indexed(self.diffs.len(), |i| self.diffs[i].rank());
        let rank_at = |i: usize| -> usize {
            if i < ranks.len() {
                ranks[i]
            } else {
                0
            }
        };
        Ok((0..dims.len())
            .map(|i| {
                let below = if i == 0 { 0 } else { rank_at(i - 1) };
                dims[i] - rank_at(i) - below
            })
            .collect())
    }

    /// Alternating sum of chain-space dimensions; equals the alternating sum
    /// of cohomology dimensions.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims()
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// Chain complex for cosheaf homology; diffs\[i\] maps degree i to i-1.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    pub chains: Vec<Vec<Vec<usize>>>,
    pub block_dims: Vec<Vec<usize>>,
    /// diffs\[i\]: C_i -> C_{i-1} for i >= 1
    pub diffs: Vec<RatMat>,
}

impl ChainComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.block_dims.iter().map(|b| b.iter().sum()).collect()
    }

    pub fn check_dd_zero(&self) -> Report {
        let mut rep = Report::new();
        // diffs[k] is ∂_{k+1}: C_{k+1} -> C_k
        for i in 0..self.diffs.len().saturating_sub(1) {
            if !self.diffs[i].mul(&self.diffs[i + 1]).is_zero() {
                rep.push(format!("∂∘∂ != 0 between degrees {} and {i}", i + 2));
            }
        }
        rep
    }

    pub fn homology_dims(&self) -> Result<Vec<usize>> {
        let rep = self.check_dd_zero();
        if !rep.ok() {
            return Err(Error::Precondition(format!("broken complex: {rep}")));
        }
        let dims = self.dims();
        if dims.is_empty() {
            return Ok(Vec::new());
        }
        // diffs[k] : C_{k+1} -> C_k
        let ranks = par_map_indexed(self.diffs.len(), |i| self.diffs[i].rank());
        let rank_at = |i: usize| if i < ranks.len() { ranks[i] } else { 0 };
        Ok((0..dims.len())
            .map(|i| {
                let out = if i == 0 { 0 } else { rank_at(i - 1) };
                dims[i] - out - rank_at(i)
            })
            .collect())
    }
}

/// Strict chains in the restriction of the poset to `subset`, grouped by
/// length; chains are increasing index sequences in the poset order.
fn strict_chains(p: &FinPreorder, subset: &PointSet) -> Vec<Vec<Vec<usize>>> {
    let pts: Vec<usize> = subset.iter().collect();
    let mut by_len: Vec<Vec<Vec<usize>>> = Vec::new();
    if pts.is_empty() {
        return by_len;
    }
    let mut current: Vec<Vec<usize>> = pts.iter().map(|&x| vec![x]).collect();
    while !current.is_empty() {
        by_len.push(current.clone());
        let mut next = Vec::new();
        for chain in &current {
            let last = *chain.last().unwrap();
            for &y in &pts {
                if y != last && p.leq_idx(last, y) && !p.leq_idx(y, last) {
                    let mut c = chain.clone();
                    c.push(y);
                    next.push(c);
                }
            }
        }
        current = next;
    }
    by_len
}

fn offsets(block_dims: &[usize]) -> Vec<usize> {
    block_dims
        .iter()
        .scan(0usize, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect()
}

fn copy_block(dst: &mut RatMat, r0: usize, c0: usize, m: &RatMat, sign: i64) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = if sign >= 0 { m[(i, j)].clone() } else { -m[(i, j)].clone() };
            dst[(r0 + i, c0 + j)] = &dst[(r0 + i, c0 + j)] + &v;
        }
    }
}

/// The complex C•F(U) of a vect sheaf over an open set.
pub fn cochain_complex(f: &PoSheaf, open: &PointSet) -> Result<CochainComplex> {
    if !f.is_vect() {
        return Err(Error::Precondition("cochain complex needs a vect sheaf".into()));
    }
    let space = crate::finspace::alexandrov(&f.base);
    if !space.is_open(open) {
        return Err(Error::Precondition("cochain complex over a non-open set".into()));
    }
    let chains = strict_chains(&f.base, open);
    let block_dims: Vec<Vec<usize>> = chains
        .iter()
        .map(|level| level.iter().map(|c| f.stalk_dim(*c.last().unwrap())).collect())
        .collect();
    let mut diffs = Vec::new();
    for i in 0..chains.len().saturating_sub(1) {
        let src_off = offsets(&block_dims[i]);
        let dst_off = offsets(&block_dims[i + 1]);
        let rows: usize = block_dims[i + 1].iter().sum();
        let cols: usize = block_dims[i].iter().sum();
        let mut d = RatMat::zero(rows, cols);
        let index_of: BTreeMap<&Vec<usize>, usize> =
            chains[i].iter().enumerate().map(|(k, c)| (c, k)).collect();
        for (t_idx, target) in chains[i + 1].iter().enumerate() {
            let top = *target.last().unwrap();
            for j in 0..target.len() {
                let mut face = target.clone();
                face.remove(j);
                let s_idx = index_of[&face];
                let sign = if j % 2 == 0 { 1 } else { -1 };
                if j + 1 == target.len() {
                    // deleting the top element: apply the restriction
                    let prev_top = target[target.len() - 2];
                    let rho = f.restriction(prev_top, top);
                    copy_block(&mut d, dst_off[t_idx], src_off[s_idx], &rho, sign);
                } else {
                    let id = RatMat::identity(f.stalk_dim(top));
                    copy_block(&mut d, dst_off[t_idx], src_off[s_idx], &id, sign);
                }
            }
        }
        diffs.push(d);
    }
    Ok(CochainComplex { chains, block_dims, diffs })
}

/// The complex C_•F̃(Z) of a cosheaf over a closed set; ∂ is the dual
/// alternating sum, with the corestriction applied on the top-deletion term.
pub fn chain_complex(f: &PoCosheaf, closed: &PointSet) -> Result<ChainComplex> {
    let space = crate::finspace::alexandrov(&f.base);
    if !space.is_closed(closed) {
        return Err(Error::Precondition("chain complex over a non-closed set".into()));
    }
    let chains = strict_chains(&f.base, closed);
    let block_dims: Vec<Vec<usize>> = chains
        .iter()
        .map(|level| level.iter().map(|c| f.dims[*c.last().unwrap()]).collect())
        .collect();
    let mut diffs = Vec::new();
    for i in 0..chains.len().saturating_sub(1) {
        // ∂_{i+1}: C_{i+1} -> C_i
        let src_off = offsets(&block_dims[i + 1]);
        let dst_off = offsets(&block_dims[i]);
        let rows: usize = block_dims[i].iter().sum();
        let cols: usize = block_dims[i + 1].iter().sum();
        let mut d = RatMat::zero(rows, cols);
        let index_of: BTreeMap<&Vec<usize>, usize> =
            chains[i].iter().enumerate().map(|(k, c)| (c, k)).collect();
        for (s_idx, source) in chains[i + 1].iter().enumerate() {
            let top = *source.last().unwrap();
            for j in 0..source.len() {
                let mut face = source.clone();
                face.remove(j);
                let t_idx = index_of[&face];
                let sign = if j % 2 == 0 { 1 } else { -1 };
                if j + 1 == source.len() {
                    let prev_top = source[source.len() - 2];
                    let co = f.corestriction(prev_top, top);
                    copy_block(&mut d, dst_off[t_idx], src_off[s_idx], &co, sign);
                } else {
                    let id = RatMat::identity(f.dims[top]);
                    copy_block(&mut d, dst_off[t_idx], src_off[s_idx], &id, sign);
                }
            }
        }
        diffs.push(d);
    }
    Ok(ChainComplex { chains, block_dims, diffs })
}

/// Čech data of a cover with finite-dimensional value spaces: dimensions for
/// patches, pairs and triples, plus the restriction matrices between them.
/// Missing pairs and triples are empty intersections (dimension zero).
#[derive(Debug, Clone, Default)]
pub struct CechData {
    pub n: usize,
    pub patch_dims: Vec<usize>,
    pub pair_dims: BTreeMap<(usize, usize), usize>,
    pub triple_dims: BTreeMap<(usize, usize, usize), usize>,
    /// restriction of patch i into pair (j, k), i ∈ {j, k}
    pub patch_to_pair: BTreeMap<(usize, (usize, usize)), RatMat>,
    /// restriction of pair into triple, for the three faces of each triple
    pub pair_to_triple: BTreeMap<((usize, usize), (usize, usize, usize)), RatMat>,
}

/// Alternating Čech complex of the cover data, in degrees 0..=2.
pub fn cech_complex(data: &CechData) -> Result<CochainComplex> {
    let pairs: Vec<(usize, usize)> = data.pair_dims.keys().copied().collect();
    let triples: Vec<(usize, usize, usize)> = data.triple_dims.keys().copied().collect();
    let d0_rows: usize = pairs.iter().map(|p| data.pair_dims[p]).sum();
    let d0_cols: usize = data.patch_dims.iter().sum();
    let patch_off = offsets(&data.patch_dims);
    let pair_dims_v: Vec<usize> = pairs.iter().map(|p| data.pair_dims[p]).collect();
    let pair_off = offsets(&pair_dims_v);
    let mut d0 = RatMat::zero(d0_rows, d0_cols);
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        let from_j = data
            .patch_to_pair
            .get(&(j, (i, j)))
            .ok_or_else(|| Error::InvalidInput(format!("missing restriction {j} -> ({i},{j})")))?;
        let from_i = data
            .patch_to_pair
            .get(&(i, (i, j)))
            .ok_or_else(|| Error::InvalidInput(format!("missing restriction {i} -> ({i},{j})")))?;
        copy_block(&mut d0, pair_off[pi], patch_off[j], from_j, 1);
        copy_block(&mut d0, pair_off[pi], patch_off[i], from_i, -1);
    }
    let triple_dims_v: Vec<usize> = triples.iter().map(|t| data.triple_dims[t]).collect();
    let triple_off = offsets(&triple_dims_v);
    let d1_rows: usize = triple_dims_v.iter().sum();
    let mut d1 = RatMat::zero(d1_rows, d0_rows);
    for (ti, &(i, j, k)) in triples.iter().enumerate() {
        for (face, sign) in [((j, k), 1i64), ((i, k), -1), ((i, j), 1)] {
            let Some(pi) = pairs.iter().position(|&p| p == face) else {
                return Err(Error::InvalidInput(format!(
                    "triple ({i},{j},{k}) lacks its face pair ({}, {})",
                    face.0, face.1
                )));
            };
            let m = data.pair_to_triple.get(&(face, (i, j, k))).ok_or_else(|| {
                Error::InvalidInput(format!("missing restriction ({},{}) -> ({i},{j},{k})", face.0, face.1))
            })?;
            copy_block(&mut d1, triple_off[ti], pair_off[pi], m, sign);
        }
    }
    // chains are synthetic here: degree 0 = patches, 1 = pairs, 2 = triples
    let chains = vec![
        (0..data.n).map(|i| vec![i]).collect::<Vec<_>>(),
        pairs.iter().map(|&(i, j)| vec![i, j]).collect(),
        triples.iter().map(|&(i, j, k)| vec![i, j, k]).collect(),
    ];
    let block_dims = vec![data.patch_dims.clone(), pair_dims_v, triple_dims_v];
    let mut diffs = vec![d0];
    if !triples.is_empty() || d1_rows > 0 {
        diffs.push(d1);
    }
    let (chains, block_dims) = if triples.is_empty() && d1_rows == 0 {
        (chains.into_iter().take(2).collect::<Vec<_>>(), block_dims.into_iter().take(2).collect())
    } else {
        (chains, block_dims)
    };
    let c = CochainComplex { chains, block_dims, diffs };
    let rep = c.check_dd_zero();
    if !rep.ok() {
        return Err(Error::InvalidInput(format!("Čech data inconsistent: {rep}")));
    }
    Ok(c)
}

/// Čech complex of a finite-model cover: value spaces are exact section
/// spaces of the sheaf over the cover opens and their intersections.
pub fn cech_from_cover(f: &PoSheaf, opens: &[PointSet]) -> Result<CochainComplex> {
    if !f.is_vect() {
        return Err(Error::Precondition("Čech over a model needs a vect sheaf".into()));
    }
    let space = crate::finspace::alexandrov(&f.base);
    for o in opens {
        if !space.is_open(o) {
            return Err(Error::Precondition("cover contains a non-open set".into()));
        }
    }
    let n = opens.len();
    let mut data = CechData { n, ..Default::default() };
    let mut patch_spaces: Vec<SectionSpace> = Vec::new();
    for o in opens {
        let s = f.sections_vect(o)?;
        data.patch_dims.push(s.dim());
        patch_spaces.push(s);
    }
    let transfer = |from: &SectionSpace, to: &SectionSpace| -> Result<RatMat> {
        let m = f.section_restriction_matrix(from, to)?;
        let images = m.mul(&from.basis);
        RatMat::express_in_basis(&to.basis, &images)
            .ok_or_else(|| Error::InvalidInput("section restriction left the section space".into()))
    };
    let mut pair_spaces: BTreeMap<(usize, usize), SectionSpace> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let inter = opens[i].intersect(&opens[j]);
            if inter.is_empty() {
                continue;
            }
            let s = f.sections_vect(&inter)?;
            data.pair_dims.insert((i, j), s.dim());
            data.patch_to_pair.insert((i, (i, j)), transfer(&patch_spaces[i], &s)?);
            data.patch_to_pair.insert((j, (i, j)), transfer(&patch_spaces[j], &s)?);
            pair_spaces.insert((i, j), s);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let inter = opens[i].intersect(&opens[j]).intersect(&opens[k]);
                if inter.is_empty() {
                    continue;
                }
                let s = f.sections_vect(&inter)?;
                data.triple_dims.insert((i, j, k), s.dim());
                for face in [(j, k), (i, k), (i, j)] {
                    let ps = pair_spaces.get(&face).ok_or_else(|| {
                        Error::InvalidInput("triple intersection without pair intersection".into())
                    })?;
                    data.pair_to_triple.insert((face, (i, j, k)), transfer(ps, &s)?);
                }
            }
        }
    }
    cech_complex(&data)
}

fn inclusion_matrix(from: &GradedPiece, to: &GradedPiece) -> RatMat {
    let mut m = RatMat::zero(to.exponents.len(), from.exponents.len());
    for (j, e) in from.exponents.iter().enumerate() {
        if let Some(i) = to.exponents.iter().position(|x| x == e) {
            m[(i, j)] = Rat::from_integer(1.into());
        }
    }
    m
}

/// The standard projective-line cover with the degree-d twist, restricted to
/// a finite exponent window: Čech data over the two patches.
pub fn cech_graded_p1(d: i64, window: (i64, i64)) -> Result<CechData> {
    let qx = LocRing::polynomial(&["x"]);
    let qy = LocRing::polynomial(&["y"]);
    let laurent = LocRing::new(&["x"], &[crate::poly::Polynomial::var("x")])?;
    let px = graded_sections(&qx, "x", d, window)?;
    let py = graded_sections(&qy, "x", d, window)?;
    let pxy = graded_sections(&laurent, "x", d, window)?;
    let mut data = CechData { n: 2, ..Default::default() };
    data.patch_dims = vec![px.dim(), py.dim()];
    data.pair_dims.insert((0, 1), pxy.dim());
    data.patch_to_pair.insert((0, (0, 1)), inclusion_matrix(&px, &pxy));
    data.patch_to_pair.insert((1, (0, 1)), inclusion_matrix(&py, &pxy));
    Ok(data)
}

/// The 3-point finite model of the projective line carrying the degree-d
/// graded pieces as a vect sheaf: two vertex points and one overlap point.
pub fn p1_graded_model(d: i64, window: (i64, i64)) -> Result<(FinPreorder, PoSheaf)> {
    let g = UGraph::new(
        vec!["u0".into(), "u1".into()],
        vec![("u0".into(), "u1".into())],
    )?;
    let x = clique_complex(&Graph::Undirected(g))?;
    let poset = x.simplex_poset();
    let qx = LocRing::polynomial(&["x"]);
    let qy = LocRing::polynomial(&["y"]);
    let laurent = LocRing::new(&["x"], &[crate::poly::Polynomial::var("x")])?;
    let px = graded_sections(&qx, "x", d, window)?;
    let py = graded_sections(&qy, "x", d, window)?;
    let pxy = graded_sections(&laurent, "x", d, window)?;
    let i0 = poset.index_of("u0").unwrap();
    let i1 = poset.index_of("u1").unwrap();
    let ie = poset.index_of("u0|u1").unwrap();
    let mut dims = vec![0; 3];
    dims[i0] = px.dim();
    dims[i1] = py.dim();
    dims[ie] = pxy.dim();
    let mut maps = BTreeMap::new();
    maps.insert((i0, ie), inclusion_matrix(&px, &pxy));
    maps.insert((i1, ie), inclusion_matrix(&py, &pxy));
    let sheaf = PoSheaf::vect(poset.clone(), dims, maps)?;
    Ok((poset, sheaf))
}

/// Independent oracle for the twisted projective-line cohomology: count
/// Laurent monomials degree by degree. H0 counts exponents in \[0, d\], H1
/// counts exponents strictly between d and 0; both within the window.
pub fn p1_monomial_count_oracle(d: i64, window: (i64, i64)) -> (usize, usize) {
    let (lo, hi) = window;
    let h0 = (lo.max(0)..=hi.min(d)).count();
    let h1 = (lo.max(d + 1)..=hi.min(-1)).count();
    (h0, h1)
}

/// Comparison report between two cohomology computations: degrees 0 and 1
/// must agree, higher degrees are reported without being asserted.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Compare01Report {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub agree01: bool,
    pub higher_degrees_agree: bool,
}

pub fn compare_01(left: &[usize], right: &[usize]) -> Compare01Report {
    let get = |v: &[usize], i: usize| v.get(i).copied().unwrap_or(0);
    let agree01 = get(left, 0) == get(right, 0) && get(left, 1) == get(right, 1);
    let max = left.len().max(right.len());
    let higher = (2..max).all(|i| get(left, i) == get(right, i));
    Compare01Report {
        left: left.to_vec(),
        right: right.to_vec(),
        agree01,
        higher_degrees_agree: higher,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use crate::finspace::graph_poset;

    /// Graph oracle: H0 = number of components, H1 = independent cycles.
    fn graph_h01(g: &UGraph) -> (usize, usize) {
        let n = g.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for (a, b) in &g.edges {
            let ia = g.vertices.iter().position(|v| v == a).unwrap();
            let ib = g.vertices.iter().position(|v| v == b).unwrap();
            let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let comps: std::collections::BTreeSet<usize> =
            (0..n).map(|i| find(&mut parent, i)).collect();
        let c = comps.len();
        (c, g.edges.len() + c - n)
    }

    fn constant_cohomology(g: &UGraph) -> Vec<usize> {
        let p = graph_poset(g).unwrap();
        let f = PoSheaf::constant(&p, 1);
        let c = cochain_complex(&f, &PointSet::full(p.len())).unwrap();
        c.cohomology_dims().unwrap()
    }

    #[test]
    fn edge_graph_cochain_dims_and_cohomology() {
        let g = UGraph::path(2);
        let p = graph_poset(&g).unwrap();
        let f = PoSheaf::constant(&p, 1);
        let c = cochain_complex(&f, &PointSet::full(p.len())).unwrap();
        assert_eq!(c.dims(), vec![3, 2]);
        assert_eq!(c.cohomology_dims().unwrap(), vec![1, 0]);
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn circle_model_cohomology() {
        for n in 3..=8 {
            let h = constant_cohomology(&UGraph::cycle(n));
            assert_eq!(h, vec![1, 1], "C_{n}");
        }
    }

    #[test]
    fn cohomology_matches_graph_oracle() {
        for g in [
            UGraph::path(4),
            UGraph::cycle(5),
            UGraph::star(3),
            UGraph::new(
                vec!["a".into(), "b".into(), "c".into(), "d".into()],
                vec![("a".into(), "b".into()), ("c".into(), "d".into())],
            )
            .unwrap(),
        ] {
            let (h0, h1) = graph_h01(&g);
            assert_eq!(constant_cohomology(&g), vec![h0, h1]);
        }
    }

    #[test]
    fn constant_sheaf_on_triangle_free_simplex_posets_counts_components_and_cycles() {
        // for a triangle-free graph the simplex poset of the clique complex
        // is the vertex-edge poset, and degrees 0, 1 count components and
        // independent cycles
        for g in [UGraph::cycle(5), UGraph::path(4), UGraph::star(3)] {
            let x = crate::sscomplex::clique_complex(&crate::sscomplex::Graph::Undirected(
                g.clone(),
            ))
            .unwrap();
            assert!(x.s2().is_empty());
            let p = x.simplex_poset();
            let f = PoSheaf::constant(&p, 1);
            let h = cochain_complex(&f, &PointSet::full(p.len()))
                .unwrap()
                .cohomology_dims()
                .unwrap();
            let (h0, h1) = graph_h01(&g);
            assert_eq!(h, vec![h0, h1]);
        }
    }

    #[test]
    fn empty_open_gives_zero_complex() {
        let p = graph_poset(&UGraph::cycle(3)).unwrap();
        let f = PoSheaf::constant(&p, 2);
        let c = cochain_complex(&f, &PointSet::empty(p.len())).unwrap();
        assert!(c.dims().is_empty());
        assert!(c.cohomology_dims().unwrap().is_empty());
    }

    #[test]
    fn identity_two_term_complex_is_acyclic() {
        let c = CochainComplex {
            chains: vec![vec![vec![0]], vec![vec![0, 1]]],
            block_dims: vec![vec![1], vec![1]],
            diffs: vec![RatMat::identity(1)],
        };
        assert_eq!(c.cohomology_dims().unwrap(), vec![0, 0]);
    }

    #[test]
    fn broken_complex_rejected() {
        let c = CochainComplex {
            chains: vec![vec![vec![0]], vec![vec![0, 1]], vec![vec![0, 1, 2]]],
            block_dims: vec![vec![1], vec![1], vec![1]],
            diffs: vec![RatMat::identity(1), RatMat::identity(1)],
        };
        assert!(!c.check_dd_zero().ok());
        assert!(c.cohomology_dims().is_err());
    }

    #[test]
    fn h0_equals_sections_dimension() {
        // degree-0 cohomology is the space of sections (the equalizer),
        // which pins the differential convention
        for g in [UGraph::path(3), UGraph::cycle(4), UGraph::star(2)] {
            let p = graph_poset(&g).unwrap();
            let f = PoSheaf::constant(&p, 2);
            let whole = PointSet::full(p.len());
            let c = cochain_complex(&f, &whole).unwrap();
            let s = f.sections_vect(&whole).unwrap();
            assert_eq!(c.cohomology_dims().unwrap()[0], s.dim());
        }
    }

    #[test]
    fn cosheaf_homology_of_circle_edge_and_point() {
        let p3 = graph_poset(&UGraph::cycle(3)).unwrap();
        let c = PoCosheaf::constant(&p3, 1);
        let z = PointSet::full(p3.len());
        let cc = chain_complex(&c, &z).unwrap();
        assert!(cc.check_dd_zero().ok());
        assert_eq!(cc.homology_dims().unwrap(), vec![1, 1]);

        let pe = graph_poset(&UGraph::path(2)).unwrap();
        let ce = PoCosheaf::constant(&pe, 1);
        assert_eq!(
            chain_complex(&ce, &PointSet::full(pe.len())).unwrap().homology_dims().unwrap(),
            vec![1, 0]
        );

        // a single closed point: a vertex (minimal = closed)
        let iv = pe.index_of("v0").unwrap();
        let single = PointSet::from_indices(pe.len(), [iv]);
        let cs = chain_complex(&ce, &single).unwrap();
        assert_eq!(cs.homology_dims().unwrap(), vec![1]);
        // non-closed set rejected
        let ie = pe.index_of("v0|v1").unwrap();
        assert!(chain_complex(&ce, &PointSet::from_indices(pe.len(), [ie])).is_err());
    }

    #[test]
    fn cech_p1_all_degrees_match_oracle() {
        let window = (-8, 8);
        for d in -3..=2 {
            let data = cech_graded_p1(d, window).unwrap();
            let c = cech_complex(&data).unwrap();
            let h = c.cohomology_dims().unwrap();
            let (h0, h1) = p1_monomial_count_oracle(d, window);
            assert_eq!(h[0], h0, "H0 at d={d}");
            assert_eq!(h[1], h1, "H1 at d={d}");
            assert_eq!(h0, (d + 1).max(0) as usize);
            assert_eq!(h1, (-d - 1).max(0) as usize);
        }
    }

    #[test]
    fn p1_model_agrees_with_cech_in_degrees_0_and_1() {
        let window = (-8, 8);
        for d in -3..=2 {
            let (_, sheaf) = p1_graded_model(d, window).unwrap();
            let c = cochain_complex(&sheaf, &PointSet::full(3)).unwrap();
            let hm = c.cohomology_dims().unwrap();
            let data = cech_graded_p1(d, window).unwrap();
            let hc = cech_complex(&data).unwrap().cohomology_dims().unwrap();
            let rep = compare_01(&hm, &hc);
            assert!(rep.agree01, "d={d}: {hm:?} vs {hc:?}");
        }
    }

    #[test]
    fn single_patch_cover_concentrates_in_degree_zero() {
        let p = graph_poset(&UGraph::cycle(3)).unwrap();
        let f = PoSheaf::constant(&p, 1);
        let whole = PointSet::full(p.len());
        let c = cech_from_cover(&f, &[whole]).unwrap();
        assert_eq!(c.dims().len(), 2);
        assert_eq!(c.dims()[1], 0);
        assert_eq!(c.cohomology_dims().unwrap()[0], 1);
    }

    #[test]
    fn circle_cover_cech_agrees_with_model() {
        // cover the circle model by two overlapping opens
        let p = graph_poset(&UGraph::cycle(4)).unwrap();
        let f = PoSheaf::constant(&p, 1);
        let x = crate::finspace::alexandrov(&p);
        let star = |v: &str| x.min_open(v).unwrap();
        let u1 = star("v0").union(&star("v1"));
        let u2 = star("v2").union(&star("v3"));
        assert_eq!(u1.union(&u2).count(), p.len());
        let cech = cech_from_cover(&f, &[u1, u2]).unwrap();
        let hc = cech.cohomology_dims().unwrap();
        let hm = cochain_complex(&f, &PointSet::full(p.len())).unwrap().cohomology_dims().unwrap();
        let rep = compare_01(&hc, &hm);
        assert!(rep.agree01, "{hc:?} vs {hm:?}");
        assert_eq!(&hc[..2], &[1, 1]);
    }

    #[test]
    fn compare_handles_empty() {
        let rep = compare_01(&[], &[]);
        assert!(rep.agree01);
    }

    #[test]
    fn euler_characteristic_equals_alternating_cohomology() {
        for g in [UGraph::cycle(5), UGraph::complete(4), UGraph::star(3)] {
            let p = graph_poset(&g).unwrap();
            let f = PoSheaf::constant(&p, 1);
            let c = cochain_complex(&f, &PointSet::full(p.len())).unwrap();
            let h = c.cohomology_dims().unwrap();
            let chi: i64 = h
                .iter()
                .enumerate()
                .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
                .sum();
            assert_eq!(chi, c.euler_characteristic());
        }
    }

    proptest::proptest! {
        /// d∘d = 0 for randomized functorial sheaves: random stalk dimensions
        /// and random restriction matrices on height-1 posets (where any
        /// assignment is functorial).
        #[test]
        fn dd_zero_on_random_functorial_sheaves(seed in 0u64..200) {
            let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            let mut next = move || {
                state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                state
            };
            let nv = 2 + (next() % 3) as usize;
            let mut edges = Vec::new();
            let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
            for i in 0..nv {
                for j in i+1..nv {
                    if next() % 2 == 0 {
                        edges.push((vertices[i].clone(), vertices[j].clone()));
                    }
                }
            }
            let g = UGraph::new(vertices, edges).unwrap();
            let p = graph_poset(&g).unwrap();
            let dims: Vec<usize> = (0..p.len()).map(|_| 1 + (next() % 2) as usize).collect();
            let mut maps = BTreeMap::new();
            for (i, j) in crate::sheafcore::strict_pairs(&p) {
                let mut m = RatMat::zero(dims[j], dims[i]);
                for r in 0..dims[j] {
                    for c in 0..dims[i] {
                        m[(r, c)] = rat_int((next() % 7) as i64 - 3);
                    }
                }
                maps.insert((i, j), m);
            }
            let f = PoSheaf::vect(p.clone(), dims, maps).unwrap();
            let c = cochain_complex(&f, &PointSet::full(p.len())).unwrap();
            proptest::prop_assert!(c.check_dd_zero().ok());
        }
    }
}
