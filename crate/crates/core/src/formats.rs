//! JSON schemas for every external interface: graphs, semisimplicial sets,
//! posets, sheaves, polynomials and rings, gluing data, cover nerves, bundles
//! and anchored scenarios. Parsing reports schema violations with JSON-path
//! locations; serialization uses sorted keys throughout, so identical inputs
//! produce byte-identical output.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::exact::{format_rat, parse_rat, RatMat};
use crate::finspace::{FinPreorder, PointSet};
use crate::gluing::{AffineGluingDatum, CoverNerve, FiniteModel, NerveOverlap, NerveTriple};
use crate::poly::{Laurent, Monomial, Polynomial};
use crate::ringcat::{EmbCert, LocRing, RingMor};
use crate::sheafcore::{PoCosheaf, PoSheaf, SheafData};
use crate::sscomplex::{DiGraph, Graph, SemiSimplicialSet2, UGraph};
use crate::{Error, Result};

fn bad(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{path}: {msg}"))
}

fn as_obj<'v>(v: &'v Value, path: &str) -> Result<&'v Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(path, "expected an object"))
}

fn as_arr<'v>(v: &'v Value, path: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn as_str<'v>(v: &'v Value, path: &str) -> Result<&'v str> {
    v.as_str().ok_or_else(|| bad(path, "expected a string"))
}

fn field<'v>(
    obj: &'v Map<String, Value>,
    key: &str,
    path: &str,
) -> Result<&'v Value> {
    obj.get(key).ok_or_else(|| bad(path, format!("missing field {key:?}")))
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

pub fn parse_graph(v: &Value) -> Result<Graph> {
    let obj = as_obj(v, "$")?;
    let vertices: Vec<String> = as_arr(field(obj, "vertices", "$")?, "$.vertices")?
        .iter()
        .enumerate()
        .map(|(i, x)| as_str(x, &format!("$.vertices[{i}]")).map(str::to_string))
        .collect::<Result<_>>()?;
    let directed = obj.get("directed").and_then(Value::as_bool).unwrap_or(false);
    let edges_v = as_arr(field(obj, "edges", "$")?, "$.edges")?;
    if directed {
        let mut edges = Vec::new();
        for (i, e) in edges_v.iter().enumerate() {
            let path = format!("$.edges[{i}]");
            let pair = as_arr(e, &path)?;
            if pair.len() != 2 {
                return Err(bad(&path, "expected [tail, head]"));
            }
            edges.push((
                format!("e{i}"),
                as_str(&pair[0], &format!("{path}[0]"))?.to_string(),
                as_str(&pair[1], &format!("{path}[1]"))?.to_string(),
            ));
        }
        Ok(Graph::Directed(DiGraph::new(vertices, edges)?))
    } else {
        let mut edges = Vec::new();
        for (i, e) in edges_v.iter().enumerate() {
            let path = format!("$.edges[{i}]");
            let pair = as_arr(e, &path)?;
            if pair.len() != 2 {
                return Err(bad(&path, "expected [a, b]"));
            }
            edges.push((
                as_str(&pair[0], &format!("{path}[0]"))?.to_string(),
                as_str(&pair[1], &format!("{path}[1]"))?.to_string(),
            ));
        }
        Ok(Graph::Undirected(UGraph::new(vertices, edges)?))
    }
}

pub fn sset_to_json(x: &SemiSimplicialSet2) -> Value {
    json!({
        "s0": x.s0(),
        "s1": x.s1().iter().map(|e| json!({
            "id": e, "d0": x.d0(e), "d1": x.d1(e),
        })).collect::<Vec<_>>(),
        "s2": x.s2().iter().map(|t| {
            let [e0, e1, e2] = x.triangle_faces(t);
            json!({"id": t, "e0": e0, "e1": e1, "e2": e2})
        }).collect::<Vec<_>>(),
        "counts": [x.s0().len(), x.s1().len(), x.s2().len()],
        "regular": x.is_regular(),
    })
}

// ---------------------------------------------------------------------------
// Posets and opens
// ---------------------------------------------------------------------------

pub fn parse_poset(v: &Value) -> Result<FinPreorder> {
    let obj = as_obj(v, "$.poset")?;
    let elements: Vec<String> = as_arr(field(obj, "elements", "$.poset")?, "$.poset.elements")?
        .iter()
        .enumerate()
        .map(|(i, x)| as_str(x, &format!("$.poset.elements[{i}]")).map(str::to_string))
        .collect::<Result<_>>()?;
    let mut covers = Vec::new();
    for (i, c) in as_arr(field(obj, "covers", "$.poset")?, "$.poset.covers")?.iter().enumerate() {
        let path = format!("$.poset.covers[{i}]");
        let pair = as_arr(c, &path)?;
        if pair.len() != 2 {
            return Err(bad(&path, "expected [lower, upper]"));
        }
        covers.push((
            as_str(&pair[0], &format!("{path}[0]"))?.to_string(),
            as_str(&pair[1], &format!("{path}[1]"))?.to_string(),
        ));
    }
    FinPreorder::from_covers(elements, &covers)
}

pub fn poset_to_json(p: &FinPreorder) -> Value {
    let mut covers = Vec::new();
    for (i, j) in crate::sheafcore::cover_pairs(p) {
        covers.push(json!([p.elements()[i], p.elements()[j]]));
    }
    json!({"elements": p.elements(), "covers": covers})
}

/// Comma-separated point names into a subset of the poset.
pub fn parse_point_set(p: &FinPreorder, spec: &str) -> Result<PointSet> {
    let mut set = PointSet::empty(p.len());
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let i = p
            .index_of(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown point {name:?}")))?;
        set.insert(i);
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// Sheaves of vector spaces
// ---------------------------------------------------------------------------

fn parse_matrix(v: &Value, path: &str) -> Result<RatMat> {
    let rows = as_arr(v, path)?;
    let mut grid = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}[{i}]");
        let cells = as_arr(row, &rpath)?;
        let mut out = Vec::new();
        for (j, c) in cells.iter().enumerate() {
            out.push(as_str(c, &format!("{rpath}[{j}]"))?.to_string());
        }
        grid.push(out);
    }
    RatMat::from_string_grid(&grid)
}

fn matrix_to_json(m: &RatMat) -> Value {
    Value::Array(
        m.to_string_grid()
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(Value::String).collect()))
            .collect(),
    )
}

fn parse_stalks_and_maps(
    obj: &Map<String, Value>,
    base: &FinPreorder,
) -> Result<(Vec<usize>, BTreeMap<(usize, usize), RatMat>)> {
    let stalks_v = as_obj(field(obj, "stalks", "$")?, "$.stalks")?;
    let mut dims = vec![0usize; base.len()];
    for (k, dv) in stalks_v {
        let i = base
            .index_of(k)
            .ok_or_else(|| bad("$.stalks", format!("unknown point {k:?}")))?;
        dims[i] = dv
            .as_u64()
            .ok_or_else(|| bad(&format!("$.stalks.{k}"), "expected a nonnegative integer"))?
            as usize;
    }
    let maps_v = as_obj(field(obj, "restrictions", "$")?, "$.restrictions")?;
    let mut maps = BTreeMap::new();
    for (k, mv) in maps_v {
        let (a, b) = k
            .split_once('<')
            .ok_or_else(|| bad("$.restrictions", format!("key {k:?} is not \"p<q\"")))?;
        let i = base
            .index_of(a.trim())
            .ok_or_else(|| bad("$.restrictions", format!("unknown point {a:?}")))?;
        let j = base
            .index_of(b.trim())
            .ok_or_else(|| bad("$.restrictions", format!("unknown point {b:?}")))?;
        maps.insert((i, j), parse_matrix(mv, &format!("$.restrictions.{k}"))?);
    }
    Ok((dims, maps))
}

/// Sheaf format: {"poset": ..., "kind": "vect"|"cosheaf", "stalks": {...},
/// "restrictions": {"p<q": [[..]]}}. Restriction keys may cover only the
/// cover pairs; composites are derived.
pub fn parse_sheaf(v: &Value) -> Result<PoSheaf> {
    let obj = as_obj(v, "$")?;
    let base = parse_poset(field(obj, "poset", "$")?)?;
    let kind = obj.get("kind").and_then(Value::as_str).unwrap_or("vect");
    if kind != "vect" {
        return Err(bad("$.kind", "expected \"vect\" (use parse_cosheaf for cosheaves)"));
    }
    let (dims, maps) = parse_stalks_and_maps(obj, &base)?;
    let covers: Vec<(usize, usize)> = crate::sheafcore::cover_pairs(&base);
    if maps.keys().all(|k| covers.contains(k)) {
        PoSheaf::vect_from_covers(base, dims, maps)
    } else {
        PoSheaf::vect(base, dims, maps)
    }
}

pub fn parse_cosheaf(v: &Value) -> Result<PoCosheaf> {
    let obj = as_obj(v, "$")?;
    let base = parse_poset(field(obj, "poset", "$")?)?;
    let kind = obj.get("kind").and_then(Value::as_str).unwrap_or("cosheaf");
    if kind != "cosheaf" {
        return Err(bad("$.kind", "expected \"cosheaf\""));
    }
    let (dims, mut maps) = parse_stalks_and_maps(obj, &base)?;
    // corestrictions compose dually; derive the missing composites
    let mut full = maps.clone();
    for (i, j) in crate::sheafcore::strict_pairs(&base) {
        if full.contains_key(&(i, j)) {
            continue;
        }
        let mut found = false;
        for k in 0..base.len() {
            if k != i && k != j && base.leq_idx(i, k) && base.leq_idx(k, j) {
                if let (Some(m1), Some(m2)) = (maps.get(&(i, k)), maps.get(&(k, j))) {
                    full.insert((i, j), m1.mul(m2));
                    found = true;
                    break;
                }
            }
        }
        if !found {
            return Err(bad("$.restrictions", format!("no corestriction route for pair ({i},{j})")));
        }
    }
    maps = full;
    PoCosheaf::new(base, dims, maps)
}

pub fn sheaf_to_json(f: &PoSheaf) -> Result<Value> {
    let SheafData::Vect { dims, maps } = &f.data else {
        return Err(Error::Precondition("only vect sheaves serialize to this format".into()));
    };
    let mut stalks = Map::new();
    for (i, d) in dims.iter().enumerate() {
        stalks.insert(f.base.elements()[i].clone(), json!(d));
    }
    let mut restrictions = Map::new();
    for ((i, j), m) in maps {
        restrictions.insert(
            format!("{}<{}", f.base.elements()[*i], f.base.elements()[*j]),
            matrix_to_json(m),
        );
    }
    Ok(json!({
        "poset": poset_to_json(&f.base),
        "kind": "vect",
        "stalks": Value::Object(stalks),
        "restrictions": Value::Object(restrictions),
    }))
}

// ---------------------------------------------------------------------------
// Polynomials, rings, morphisms
// ---------------------------------------------------------------------------

/// Polynomials are sparse term lists: [{"coeff": "num/den", "vars": {"x": 2}}].
pub fn parse_poly(v: &Value, path: &str) -> Result<Polynomial> {
    let terms = as_arr(v, path)?;
    let mut out = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        let tpath = format!("{path}[{i}]");
        let obj = as_obj(t, &tpath)?;
        let coeff = parse_rat(as_str(field(obj, "coeff", &tpath)?, &format!("{tpath}.coeff"))?)?;
        let mut mono = BTreeMap::new();
        if let Some(vars) = obj.get("vars") {
            for (name, e) in as_obj(vars, &format!("{tpath}.vars"))? {
                let exp = e
                    .as_u64()
                    .ok_or_else(|| bad(&format!("{tpath}.vars.{name}"), "expected an exponent"))?;
                if exp > 0 {
                    mono.insert(name.clone(), exp as u32);
                }
            }
        }
        out.push((Monomial(mono), coeff));
    }
    Ok(Polynomial::from_terms(out))
}

pub fn poly_to_json(p: &Polynomial) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                let mut vars = Map::new();
                for (v, e) in &m.0 {
                    vars.insert(v.clone(), json!(e));
                }
                json!({"coeff": format_rat(c), "vars": Value::Object(vars)})
            })
            .collect(),
    )
}

pub fn parse_laurent(v: &Value, path: &str) -> Result<Laurent> {
    let obj = as_obj(v, path)?;
    let num = parse_poly(field(obj, "num", path)?, &format!("{path}.num"))?;
    let den = match obj.get("den") {
        Some(d) => parse_poly(d, &format!("{path}.den"))?,
        None => Polynomial::one(),
    };
    if den.is_zero() {
        return Err(bad(path, "zero denominator"));
    }
    Ok(Laurent::new(num, den))
}

pub fn laurent_to_json(l: &Laurent) -> Value {
    json!({"num": poly_to_json(&l.num), "den": poly_to_json(&l.den)})
}

/// LocRing format: {"vars": ["x"], "inverted": [Poly...], "zero": false}.
pub fn parse_locring(v: &Value, path: &str) -> Result<LocRing> {
    let obj = as_obj(v, path)?;
    if obj.get("zero").and_then(Value::as_bool).unwrap_or(false) {
        return Ok(LocRing::zero_ring());
    }
    let vars: Vec<String> = as_arr(field(obj, "vars", path)?, &format!("{path}.vars"))?
        .iter()
        .enumerate()
        .map(|(i, x)| as_str(x, &format!("{path}.vars[{i}]")).map(str::to_string))
        .collect::<Result<_>>()?;
    let mut inverted = Vec::new();
    if let Some(inv) = obj.get("inverted") {
        for (i, p) in as_arr(inv, &format!("{path}.inverted"))?.iter().enumerate() {
            inverted.push(parse_poly(p, &format!("{path}.inverted[{i}]"))?);
        }
    }
    let var_refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    LocRing::new(&var_refs, &inverted)
}

pub fn locring_to_json(r: &LocRing) -> Value {
    if r.is_zero() {
        return json!({"vars": [], "inverted": [], "zero": true});
    }
    json!({
        "vars": r.vars(),
        "inverted": r.inverted().iter().map(poly_to_json).collect::<Vec<_>>(),
        "zero": false,
    })
}

/// Ring morphism format: {"images": {"x": Laurent}, "cert": null |
/// {"inverted": [Poly...], "inverse": {"y": Laurent}}}. The certificate, when
/// present, is validated like any library-built embedding.
pub fn parse_ringmor(
    v: &Value,
    source: &LocRing,
    target: &LocRing,
    path: &str,
) -> Result<RingMor> {
    if target.is_zero() {
        return Ok(RingMor::to_zero(source));
    }
    let obj = as_obj(v, path)?;
    let mut images = BTreeMap::new();
    for (name, iv) in as_obj(field(obj, "images", path)?, &format!("{path}.images"))? {
        images.insert(name.clone(), parse_laurent(iv, &format!("{path}.images.{name}"))?);
    }
    match obj.get("cert") {
        None | Some(Value::Null) => RingMor::substitution(source, target, images),
        Some(cv) => {
            let cobj = as_obj(cv, &format!("{path}.cert"))?;
            let mut inverted = std::collections::BTreeSet::new();
            if let Some(inv) = cobj.get("inverted") {
                for (i, p) in as_arr(inv, &format!("{path}.cert.inverted"))?.iter().enumerate() {
                    let poly = parse_poly(p, &format!("{path}.cert.inverted[{i}]"))?;
                    inverted.extend(poly.structural_factors());
                }
            }
            let mut inverse = BTreeMap::new();
            for (name, iv) in
                as_obj(field(cobj, "inverse", &format!("{path}.cert"))?, &format!("{path}.cert.inverse"))?
            {
                inverse
                    .insert(name.clone(), parse_laurent(iv, &format!("{path}.cert.inverse.{name}"))?);
            }
            let m = RingMor {
                source: source.clone(),
                target: target.clone(),
                images,
                cert: EmbCert::LocIso { inverted, inverse },
            };
            m.validate()?;
            Ok(m)
        }
    }
}

pub fn ringmor_to_json(m: &RingMor) -> Value {
    let mut images = Map::new();
    for (v, l) in &m.images {
        images.insert(v.clone(), laurent_to_json(l));
    }
    let cert = match &m.cert {
        EmbCert::ToZero => json!("to_zero"),
        EmbCert::None => Value::Null,
        EmbCert::LocIso { inverted, inverse } => {
            let mut inv = Map::new();
            for (v, l) in inverse {
                inv.insert(v.clone(), laurent_to_json(l));
            }
            json!({
                "inverted": inverted.iter().map(poly_to_json).collect::<Vec<_>>(),
                "inverse": Value::Object(inv),
            })
        }
    };
    json!({"images": Value::Object(images), "cert": cert})
}

// ---------------------------------------------------------------------------
// Gluing data and cover nerves
// ---------------------------------------------------------------------------

/// Datum format: {"patches": [LocRing...], "overlaps": {"i,j": {"ring": ...,
/// "include": Mor}}, "transitions": {"j,i": Mor}}.
pub fn parse_datum(v: &Value) -> Result<AffineGluingDatum> {
    let obj = as_obj(v, "$")?;
    let patches: Vec<LocRing> = as_arr(field(obj, "patches", "$")?, "$.patches")?
        .iter()
        .enumerate()
        .map(|(i, p)| parse_locring(p, &format!("$.patches[{i}]")))
        .collect::<Result<_>>()?;
    let mut inclusions = BTreeMap::new();
    let mut rings: BTreeMap<(usize, usize), LocRing> = BTreeMap::new();
    if let Some(ov) = obj.get("overlaps") {
        for (k, o) in as_obj(ov, "$.overlaps")? {
            let path = format!("$.overlaps.{k}");
            let (i, j) = parse_pair_key(k, patches.len(), &path)?;
            let oobj = as_obj(o, &path)?;
            let ring = parse_locring(field(oobj, "ring", &path)?, &format!("{path}.ring"))?;
            let inc = parse_ringmor(
                field(oobj, "include", &path)?,
                &patches[i],
                &ring,
                &format!("{path}.include"),
            )?;
            rings.insert((i, j), ring);
            inclusions.insert((i, j), inc);
        }
    }
    let mut phi_sharp = BTreeMap::new();
    if let Some(tv) = obj.get("transitions") {
        for (k, t) in as_obj(tv, "$.transitions")? {
            let path = format!("$.transitions.{k}");
            let (j, i) = parse_pair_key(k, patches.len(), &path)?;
            let src = rings
                .get(&(j, i))
                .ok_or_else(|| bad(&path, "transition for a missing overlap"))?;
            let dst = rings
                .get(&(i, j))
                .ok_or_else(|| bad(&path, "transition target overlap missing"))?;
            phi_sharp.insert((j, i), parse_ringmor(t, src, dst, &path)?);
        }
    }
    Ok(AffineGluingDatum { patches, inclusions, phi_sharp })
}

fn parse_pair_key(k: &str, n: usize, path: &str) -> Result<(usize, usize)> {
    let (a, b) = k.split_once(',').ok_or_else(|| bad(path, "key must be \"i,j\""))?;
    let i: usize = a.trim().parse().map_err(|_| bad(path, "bad index"))?;
    let j: usize = b.trim().parse().map_err(|_| bad(path, "bad index"))?;
    if i >= n || j >= n || i == j {
        return Err(bad(path, "index out of range"));
    }
    Ok((i, j))
}

/// Nerve format: {"patches": {"U1": LocRing, ...}, "overlaps": {"U1,U2":
/// {"ring": ..., "maps": {"U1": Mor, "U2": Mor}}}, "triples": {"U1,U2,U3":
/// {"ring": ..., "maps": {"U1,U2": Mor, ...}}}}.
pub fn parse_nerve(v: &Value) -> Result<CoverNerve> {
    let obj = as_obj(v, "$")?;
    let patches_obj = as_obj(field(obj, "patches", "$")?, "$.patches")?;
    let patch_names: Vec<String> = patches_obj.keys().cloned().collect();
    let index: BTreeMap<&String, usize> =
        patch_names.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut patches = Vec::new();
    for name in &patch_names {
        patches.push(parse_locring(&patches_obj[name], &format!("$.patches.{name}"))?);
    }
    let mut overlaps = BTreeMap::new();
    if let Some(ov) = obj.get("overlaps") {
        for (k, o) in as_obj(ov, "$.overlaps")? {
            let path = format!("$.overlaps.{k}");
            let names: Vec<&str> = k.split(',').map(str::trim).collect();
            if names.len() != 2 {
                return Err(bad(&path, "key must be \"U,V\""));
            }
            let (a, b) = (
                *index.get(&names[0].to_string()).ok_or_else(|| bad(&path, "unknown patch"))?,
                *index.get(&names[1].to_string()).ok_or_else(|| bad(&path, "unknown patch"))?,
            );
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let oobj = as_obj(o, &path)?;
            let ring = parse_locring(field(oobj, "ring", &path)?, &format!("{path}.ring"))?;
            let maps = as_obj(field(oobj, "maps", &path)?, &format!("{path}.maps"))?;
            let get_map = |n: usize| -> Result<RingMor> {
                let name = &patch_names[n];
                parse_ringmor(
                    field(maps, name, &format!("{path}.maps"))?,
                    &patches[n],
                    &ring,
                    &format!("{path}.maps.{name}"),
                )
            };
            overlaps.insert(
                (lo, hi),
                NerveOverlap { ring: ring.clone(), from_lo: get_map(lo)?, from_hi: get_map(hi)? },
            );
        }
    }
    let mut triples = BTreeMap::new();
    if let Some(tv) = obj.get("triples") {
        for (k, t) in as_obj(tv, "$.triples")? {
            let path = format!("$.triples.{k}");
            let names: Vec<&str> = k.split(',').map(str::trim).collect();
            if names.len() != 3 {
                return Err(bad(&path, "key must be \"U,V,W\""));
            }
            let mut is: Vec<usize> = Vec::new();
            for n in &names {
                is.push(*index.get(&n.to_string()).ok_or_else(|| bad(&path, "unknown patch"))?);
            }
            is.sort();
            let tobj = as_obj(t, &path)?;
            let ring = parse_locring(field(tobj, "ring", &path)?, &format!("{path}.ring"))?;
            let maps = as_obj(field(tobj, "maps", &path)?, &format!("{path}.maps"))?;
            let mut from_edges = BTreeMap::new();
            for pair in [(is[0], is[1]), (is[0], is[2]), (is[1], is[2])] {
                let key = format!("{},{}", patch_names[pair.0], patch_names[pair.1]);
                let src = overlaps
                    .get(&pair)
                    .map(|o: &NerveOverlap| o.ring.clone())
                    .ok_or_else(|| bad(&path, format!("triple without overlap {key}")))?;
                from_edges.insert(
                    pair,
                    parse_ringmor(
                        field(maps, &key, &format!("{path}.maps"))?,
                        &src,
                        &ring,
                        &format!("{path}.maps.{key}"),
                    )?,
                );
            }
            triples.insert((is[0], is[1], is[2]), NerveTriple { ring, from_edges });
        }
    }
    Ok(CoverNerve { patch_names, patches, overlaps, triples })
}

// ---------------------------------------------------------------------------
// Finite models and gluing functors
// ---------------------------------------------------------------------------

/// Model format: {"poset": ..., "sheaf": (vect sheaf fields), "cover":
/// [["p","q"], ...]} with the sheaf fields inline.
pub fn parse_model(v: &Value) -> Result<FiniteModel> {
    let obj = as_obj(v, "$")?;
    let sheaf = parse_sheaf(v)?;
    let _ = obj;
    Ok(FiniteModel { space: sheaf.base.clone(), sheaf })
}

pub fn parse_cover(v: &Value, p: &FinPreorder) -> Result<Vec<PointSet>> {
    let arr = as_arr(v, "$.cover")?;
    let mut out = Vec::new();
    for (i, u) in arr.iter().enumerate() {
        let path = format!("$.cover[{i}]");
        let names = as_arr(u, &path)?;
        let mut set = PointSet::empty(p.len());
        for (j, n) in names.iter().enumerate() {
            let name = as_str(n, &format!("{path}[{j}]"))?;
            let idx = p
                .index_of(name)
                .ok_or_else(|| bad(&format!("{path}[{j}]"), format!("unknown point {name:?}")))?;
            set.insert(idx);
        }
        out.push(set);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Bundles
// ---------------------------------------------------------------------------

/// Bundle format: {"graph": {...}, "rank": 1, "edges": {"a,b": [["2/1"]]}}.
pub fn parse_bundle(v: &Value) -> Result<crate::bundles::GraphBundle> {
    let obj = as_obj(v, "$")?;
    let graph = match parse_graph(field(obj, "graph", "$")?)? {
        Graph::Undirected(g) => g,
        Graph::Directed(_) => {
            return Err(bad("$.graph", "bundles live on undirected graphs"))
        }
    };
    let rank = field(obj, "rank", "$")?
        .as_u64()
        .ok_or_else(|| bad("$.rank", "expected a positive integer"))? as usize;
    let mut mats = BTreeMap::new();
    for (k, mv) in as_obj(field(obj, "edges", "$")?, "$.edges")? {
        let (a, b) = k
            .split_once(',')
            .ok_or_else(|| bad("$.edges", format!("key {k:?} is not \"a,b\"")))?;
        mats.insert(
            (a.trim().to_string(), b.trim().to_string()),
            parse_matrix(mv, &format!("$.edges.{k}"))?,
        );
    }
    crate::bundles::GraphBundle::new(graph, rank, mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    #[test]
    fn graph_round_trip() {
        let v = json!({
            "vertices": ["a", "b", "c"],
            "edges": [["a", "b"], ["b", "c"]],
            "directed": false,
        });
        let g = parse_graph(&v).unwrap();
        assert_eq!(g.vertices().len(), 3);
        let x = crate::sscomplex::clique_complex(&g).unwrap();
        assert_eq!(x.counts(), (3, 2, 0));
        let dumped = sset_to_json(&x);
        assert_eq!(dumped["counts"], json!([3, 2, 0]));
    }

    #[test]
    fn poset_and_sheaf_round_trip() {
        let v = json!({
            "poset": {"elements": ["p", "q"], "covers": [["p", "q"]]},
            "kind": "vect",
            "stalks": {"p": 1, "q": 1},
            "restrictions": {"p<q": [["2/1"]]},
        });
        let f = parse_sheaf(&v).unwrap();
        assert!(f.validate().ok());
        let back = sheaf_to_json(&f).unwrap();
        let f2 = parse_sheaf(&back).unwrap();
        assert_eq!(f, f2);
    }

    #[test]
    fn schema_violations_carry_paths() {
        let v = json!({"vertices": ["a", 3], "edges": []});
        let err = parse_graph(&v).unwrap_err().to_string();
        assert!(err.contains("$.vertices[1]"), "{err}");
        let v2 = json!({
            "poset": {"elements": ["p"], "covers": []},
            "kind": "vect",
            "stalks": {"nope": 1},
            "restrictions": {},
        });
        let err2 = parse_sheaf(&v2).unwrap_err().to_string();
        assert!(err2.contains("$.stalks"), "{err2}");
    }

    #[test]
    fn poly_and_ring_round_trip() {
        let p = Polynomial::var("x").pow(2).sub(&Polynomial::one());
        let v = poly_to_json(&p);
        assert_eq!(parse_poly(&v, "$").unwrap(), p);
        let r = LocRing::new(&["x"], &[Polynomial::var("x")]).unwrap();
        let rv = locring_to_json(&r);
        assert_eq!(parse_locring(&rv, "$").unwrap(), r);
    }

    #[test]
    fn nerve_parse_builds_su2() {
        let x = poly_to_json(&Polynomial::var("x"));
        let v = json!({
            "patches": {
                "U1": {"vars": ["x"], "inverted": []},
                "U2": {"vars": ["x"], "inverted": [x.clone()]},
            },
            "overlaps": {
                "U1,U2": {
                    "ring": {"vars": ["x"], "inverted": [x.clone()]},
                    "maps": {
                        "U1": {"images": {"x": {"num": x.clone()}},
                               "cert": {"inverted": [x.clone()], "inverse": {"x": {"num": x.clone()}}}},
                        "U2": {"images": {"x": {"num": x.clone()}},
                               "cert": {"inverted": [], "inverse": {"x": {"num": x}}}},
                    },
                },
            },
        });
        let nerve = parse_nerve(&v).unwrap();
        assert!(nerve.validate().ok());
        let (poset, _, para) = crate::gluing::build_su2(&nerve).unwrap();
        assert_eq!(poset.len(), 3);
        assert!(para.ok());
    }

    #[test]
    fn bundle_parse() {
        let v = json!({
            "graph": {"vertices": ["a", "b"], "edges": [["a", "b"]]},
            "rank": 1,
            "edges": {"a,b": [["2/1"]]},
        });
        let b = parse_bundle(&v).unwrap();
        assert!(crate::bundles::validate_bundle(&b).ok());
    }
}
