//! Python bindings: the main constructions behind a thin JSON-oriented API.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use glueforge::cohomology::{
    cech_complex, cech_graded_p1, chain_complex, cochain_complex, p1_graded_model,
};
use glueforge::finspace::PointSet;
use glueforge::formats;
use glueforge::poly::Polynomial;
use glueforge::ringcat::LocRing;
use glueforge::sscomplex::{clique_complex, degenerate_expansion, SemiSimplicialSet2};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_json(s: &str) -> PyResult<serde_json::Value> {
    serde_json::from_str(s).map_err(err)
}

/// A finite 2-truncated semisimplicial set built from a graph.
#[pyclass]
struct SemiSimplicial {
    inner: SemiSimplicialSet2,
}

#[pymethods]
impl SemiSimplicial {
    /// Build the clique complex of a graph given as JSON:
    /// {"vertices": [...], "edges": [[a, b], ...], "directed": false}.
    #[staticmethod]
    fn clique_complex(graph_json: &str) -> PyResult<Self> {
        let g = formats::parse_graph(&parse_json(graph_json)?).map_err(err)?;
        Ok(SemiSimplicial { inner: clique_complex(&g).map_err(err)? })
    }

    /// The degenerate expansion: loops and degenerate 2-simplices added.
    fn expand(&self) -> PyResult<Self> {
        Ok(SemiSimplicial { inner: degenerate_expansion(&self.inner).map_err(err)? })
    }

    fn counts(&self) -> (usize, usize, usize) {
        self.inner.counts()
    }

    fn is_regular(&self) -> bool {
        self.inner.is_regular()
    }

    fn poset_size(&self) -> usize {
        self.inner.simplex_poset().len()
    }

    fn to_json(&self) -> String {
        formats::sset_to_json(&self.inner).to_string()
    }

    fn __repr__(&self) -> String {
        let (a, b, c) = self.inner.counts();
        format!("SemiSimplicial({a} vertices, {b} edges, {c} two-simplices)")
    }
}

/// Cohomology of the constant sheaf on the vertex-edge poset of a graph.
#[pyfunction]
fn graph_cohomology(graph_json: &str, dim: usize) -> PyResult<Vec<usize>> {
    let g = match formats::parse_graph(&parse_json(graph_json)?).map_err(err)? {
        glueforge::sscomplex::Graph::Undirected(g) => g,
        _ => return Err(err("undirected graph expected")),
    };
    let p = glueforge::finspace::graph_poset(&g).map_err(err)?;
    let f = glueforge::sheafcore::PoSheaf::constant(&p, dim);
    let c = cochain_complex(&f, &PointSet::full(p.len())).map_err(err)?;
    c.cohomology_dims().map_err(err)
}

/// Cohomology of a vect sheaf given in the JSON sheaf format; `open` is a
/// comma-separated list of point names, absent for the whole space.
#[pyfunction]
#[pyo3(signature = (sheaf_json, open=None))]
fn sheaf_cohomology(sheaf_json: &str, open: Option<&str>) -> PyResult<Vec<usize>> {
    let f = formats::parse_sheaf(&parse_json(sheaf_json)?).map_err(err)?;
    let set = match open {
        Some(o) => formats::parse_point_set(&f.base, o).map_err(err)?,
        None => PointSet::full(f.base.len()),
    };
    let c = cochain_complex(&f, &set).map_err(err)?;
    c.cohomology_dims().map_err(err)
}

/// Homology of a cosheaf over a closed subset (default: everything).
#[pyfunction]
#[pyo3(signature = (cosheaf_json, closed=None))]
fn cosheaf_homology(cosheaf_json: &str, closed: Option<&str>) -> PyResult<Vec<usize>> {
    let f = formats::parse_cosheaf(&parse_json(cosheaf_json)?).map_err(err)?;
    let set = match closed {
        Some(z) => formats::parse_point_set(&f.base, z).map_err(err)?,
        None => PointSet::full(f.base.len()),
    };
    let c = chain_complex(&f, &set).map_err(err)?;
    c.homology_dims().map_err(err)
}

/// Twisted cohomology on the projective-line model: returns
/// ((h0, h1) from the finite 3-point space, (h0, h1) from the Čech complex).
#[pyfunction]
fn p1_twisted_cohomology(d: i64, lo: i64, hi: i64) -> PyResult<((usize, usize), (usize, usize))> {
    let window = (lo, hi);
    let (_, sheaf) = p1_graded_model(d, window).map_err(err)?;
    let m = cochain_complex(&sheaf, &PointSet::full(3))
        .map_err(err)?
        .cohomology_dims()
        .map_err(err)?;
    let c = cech_complex(&cech_graded_p1(d, window).map_err(err)?)
        .map_err(err)?
        .cohomology_dims()
        .map_err(err)?;
    Ok(((m[0], m[1]), (c[0], c[1])))
}

/// Point count and paraschematic flag of S_U² for a cover nerve in JSON.
#[pyfunction]
fn su2_summary(nerve_json: &str) -> PyResult<(usize, bool)> {
    let n = formats::parse_nerve(&parse_json(nerve_json)?).map_err(err)?;
    let (poset, _, para) = glueforge::gluing::build_su2(&n).map_err(err)?;
    Ok((poset.len(), para.ok()))
}

/// Point count of S_U for a covered model: the sheaf JSON plus "cover".
#[pyfunction]
fn su_points(model_json: &str) -> PyResult<usize> {
    let body = parse_json(model_json)?;
    let m = formats::parse_model(&body).map_err(err)?;
    let cover = formats::parse_cover(
        body.get("cover").ok_or_else(|| err("missing cover"))?,
        &m.space,
    )
    .map_err(err)?;
    let (su, _) = glueforge::gluing::build_su(&m, &cover).map_err(err)?;
    Ok(su.space.len())
}

/// Validate the triangle cocycles of a graph bundle; returns (ok, problems).
#[pyfunction]
fn validate_bundle(bundle_json: &str) -> PyResult<(bool, Vec<String>)> {
    let b = formats::parse_bundle(&parse_json(bundle_json)?).map_err(err)?;
    let rep = glueforge::bundles::validate_bundle(&b);
    Ok((rep.ok(), rep.problems))
}

/// Cohomology of the local system of a bundle on the vertex-edge poset.
#[pyfunction]
fn bundle_cohomology(bundle_json: &str) -> PyResult<Vec<usize>> {
    let b = formats::parse_bundle(&parse_json(bundle_json)?).map_err(err)?;
    let f = glueforge::bundles::bundle_to_graph_sheaf(&b).map_err(err)?;
    let c = cochain_complex(&f, &PointSet::full(f.base.len())).map_err(err)?;
    c.cohomology_dims().map_err(err)
}

/// Monodromy along a closed vertex walk; returns whether it is the identity.
#[pyfunction]
fn bundle_monodromy_is_identity(bundle_json: &str, walk: Vec<String>) -> PyResult<bool> {
    let b = formats::parse_bundle(&parse_json(bundle_json)?).map_err(err)?;
    let steps: Vec<(String, String)> =
        walk.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    Ok(glueforge::bundles::monodromy(&b, &steps).map_err(err)?.is_identity())
}

/// The strict-RMS3 counterexample report as a JSON string.
#[pyfunction]
fn rms3_report() -> PyResult<String> {
    let rep = glueforge::cschtwo::rms3_counterexample(&LocRing::polynomial(&["t"])).map_err(err)?;
    serde_json::to_string(&rep).map_err(err)
}

/// The non-schematic witness report as a JSON string.
#[pyfunction]
fn non_schematic_report() -> PyResult<String> {
    let rep = glueforge::cschtwo::non_schematic_witness(
        &Polynomial::var("x"),
        &Polynomial::var("x").sub(&Polynomial::one()),
    )
    .map_err(err)?;
    serde_json::to_string(&rep).map_err(err)
}

/// Validate a gluing datum in JSON; returns (ok, problems).
#[pyfunction]
fn validate_gluing_datum(datum_json: &str) -> PyResult<(bool, Vec<String>)> {
    let w = formats::parse_datum(&parse_json(datum_json)?).map_err(err)?;
    let rep = glueforge::gluing::validate_gluing_datum(&w);
    Ok((rep.ok(), rep.problems))
}

/// Sections dimension of a vect sheaf over an open set.
#[pyfunction]
fn sheaf_sections_dim(sheaf_json: &str, open: &str) -> PyResult<usize> {
    let f = formats::parse_sheaf(&parse_json(sheaf_json)?).map_err(err)?;
    let set = formats::parse_point_set(&f.base, open).map_err(err)?;
    Ok(f.sections_vect(&set).map_err(err)?.dim())
}

/// Rank of a rational matrix given as rows of "num/den" strings, computed by
/// fraction-free elimination.
#[pyfunction]
fn matrix_rank(rows: Vec<Vec<String>>) -> PyResult<usize> {
    let m = glueforge::exact::RatMat::from_string_grid(&rows).map_err(err)?;
    Ok(m.rank())
}

#[pymodule]
fn glueforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SemiSimplicial>()?;
    m.add_function(wrap_pyfunction!(graph_cohomology, m)?)?;
    m.add_function(wrap_pyfunction!(sheaf_cohomology, m)?)?;
    m.add_function(wrap_pyfunction!(cosheaf_homology, m)?)?;
    m.add_function(wrap_pyfunction!(p1_twisted_cohomology, m)?)?;
    m.add_function(wrap_pyfunction!(su2_summary, m)?)?;
    m.add_function(wrap_pyfunction!(su_points, m)?)?;
    m.add_function(wrap_pyfunction!(validate_bundle, m)?)?;
    m.add_function(wrap_pyfunction!(bundle_cohomology, m)?)?;
    m.add_function(wrap_pyfunction!(bundle_monodromy_is_identity, m)?)?;
    m.add_function(wrap_pyfunction!(rms3_report, m)?)?;
    m.add_function(wrap_pyfunction!(non_schematic_report, m)?)?;
    m.add_function(wrap_pyfunction!(validate_gluing_datum, m)?)?;
    m.add_function(wrap_pyfunction!(sheaf_sections_dim, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_rank, m)?)?;
    Ok(())
}
