//! Batch front end: parse JSON inputs, dispatch to the library, emit JSON or
//! text reports. Identical inputs produce byte-identical JSON output (keys
//! are sorted everywhere). Exit codes: 0 on success, 1 on validation
//! failure, 2 on malformed input.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cohomology::{
    cech_complex, cech_from_cover, cech_graded_p1, chain_complex, cochain_complex, compare_01,
    p1_graded_model,
};
use crate::cschtwo::{
    canonical_inclusion, is_weak_equivalence, non_schematic_witness, object_from_anchored,
    object_from_cover, product_cover, refinement_mor, rms3_counterexample, schematic_equal,
    validate_object, Anchor, AnchoredCover, CSch2Mor, CSch2Object, GluedModel,
};
use crate::finspace::{alexandrov, PointSet};
use crate::formats;
use crate::gluing::{
    build_su, build_su2, check_gluing_functor, glue_finite, validate_gluing_datum,
    AffineGluingFunctor, FiniteGluingFunctor, FiniteModel, ModelEmbedding,
};
use crate::poly::Polynomial;
use crate::ringcat::LocRing;
use crate::sscomplex::{clique_complex, degenerate_expansion};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "glueforge", version, about = "Finite ringed spaces, gluing data and sheaf cohomology, exactly")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: OutFormat,
    /// Write the output to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Clique complex of a graph
    Clique {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Degenerate expansion of a graph's clique complex
    Expand {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Simplex poset of a graph's clique complex
    Poset {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Alexandrov topology report of a poset
    Alexandrov {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Dimension of the sections of a vect sheaf over an open set
    SheafSections {
        #[arg(long)]
        sheaf: PathBuf,
        /// Comma-separated point names; must be an open set
        #[arg(long)]
        open: String,
    },
    /// Cohomology of the chain-indexed complex of a vect sheaf
    Cohomology {
        #[arg(long)]
        sheaf: PathBuf,
        /// Restrict to an open set (default: the whole space)
        #[arg(long)]
        open: Option<String>,
    },
    /// Homology of a cosheaf over a closed set
    Homology {
        #[arg(long)]
        sheaf: PathBuf,
        /// Comma-separated closed set (default: the whole space)
        #[arg(long)]
        closed: Option<String>,
    },
    /// Čech cohomology: of a model cover, or of the twisted line bundle on
    /// the standard projective-line cover
    Cech {
        /// Model file with "cover" field
        #[arg(long)]
        sheaf: Option<PathBuf>,
        /// Twist degree for the projective-line computation
        #[arg(long, allow_hyphen_values = true)]
        p1_degree: Option<i64>,
        /// Exponent window lo:hi
        #[arg(long, default_value = "-8:8", allow_hyphen_values = true)]
        degree_window: String,
    },
    /// Compare the finite-model complex with the Čech complex in degrees 0, 1
    Compare01 {
        #[arg(long)]
        sheaf: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        p1_degree: Option<i64>,
        #[arg(long, default_value = "-8:8", allow_hyphen_values = true)]
        degree_window: String,
    },
    /// Colimit of a finite-model gluing functor
    Glue {
        #[arg(long)]
        functor: PathBuf,
    },
    /// The signature-class space S_U of a covered model
    Su {
        #[arg(long)]
        model: PathBuf,
    },
    /// The nerve space S_U² of an affine cover
    Su2 {
        #[arg(long)]
        nerve: PathBuf,
    },
    /// Check a gluing datum: identities, transitions, cocycle
    ValidateDatum {
        #[arg(long)]
        datum: PathBuf,
    },
    /// Check a gluing functor: cubes, wedges, non-adjacency condition
    ValidateFunctor {
        #[arg(long)]
        functor: PathBuf,
    },
    /// Validate a graph bundle, compute its cohomology or a monodromy
    Bundle {
        #[arg(long)]
        bundle: PathBuf,
        /// Closed vertex walk "v0,v1,v2,v0" for a monodromy computation
        #[arg(long)]
        walk: Option<String>,
    },
    /// Build the category object of a cover nerve and validate it
    CschtwoBuild {
        #[arg(long)]
        nerve: PathBuf,
    },
    /// Weak-equivalence verdict for a scenario morphism
    CschtwoWe {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Schematic-equality verdict for two scenario morphisms
    CschtwoEq {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Reproduce the reference counterexamples
    Counterexamples {
        /// rms3 | nonschematic | all
        #[arg(default_value = "all")]
        which: String,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with its own exit codes
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(Outcome { value, pass, text }) => {
            let rendered = match cli.format {
                OutFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&value).unwrap();
                    s.push('\n');
                    s
                }
                OutFormat::Text => text,
            };
            let io_result = match &cli.out {
                Some(path) => std::fs::write(path, rendered),
                None => {
                    print!("{rendered}");
                    Ok(())
                }
            };
            if io_result.is_err() {
                return 2;
            }
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_) | Error::Json(_) | Error::Io(_) => 2,
                Error::Precondition(_) => 1,
            }
        }
    }
}

struct Outcome {
    value: Value,
    pass: bool,
    text: String,
}

/// Aligned text table for cohomology output.
fn cohomology_table(h: &[usize], chi: Option<i64>) -> String {
    let mut out = String::from("degree  dim\n");
    for (i, d) in h.iter().enumerate() {
        out.push_str(&format!("{i:<7} {d}\n"));
    }
    if let Some(c) = chi {
        out.push_str(&format!("chi     {c}\n"));
    }
    out
}

fn ok(value: Value, text: String) -> Result<Outcome> {
    Ok(Outcome { value, pass: true, text })
}

fn verdicted(value: Value, pass: bool, text: String) -> Result<Outcome> {
    Ok(Outcome { value, pass, text })
}

fn load(path: &PathBuf) -> Result<Value> {
    let body = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&body)?)
}

fn parse_window(spec: &str) -> Result<(i64, i64)> {
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidInput("window must be lo:hi".into()))?;
    let lo: i64 = lo.trim().parse().map_err(|_| Error::InvalidInput("bad window low".into()))?;
    let hi: i64 = hi.trim().parse().map_err(|_| Error::InvalidInput("bad window high".into()))?;
    Ok((lo, hi))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Clique { graph } => {
            let g = formats::parse_graph(&load(graph)?)?;
            let x = clique_complex(&g)?;
            let v = formats::sset_to_json(&x);
            let (a, b, c) = x.counts();
            ok(v, format!("clique complex: {a} vertices, {b} edges, {c} triangles\n"))
        }
        Cmd::Expand { graph } => {
            let g = formats::parse_graph(&load(graph)?)?;
            let x = degenerate_expansion(&clique_complex(&g)?)?;
            let v = formats::sset_to_json(&x);
            let (a, b, c) = x.counts();
            ok(v, format!("degenerate expansion: {a} vertices, {b} edges, {c} two-simplices\n"))
        }
        Cmd::Poset { graph } => {
            let g = formats::parse_graph(&load(graph)?)?;
            let p = clique_complex(&g)?.simplex_poset();
            let v = formats::poset_to_json(&p);
            ok(v, format!("simplex poset with {} elements\n", p.len()))
        }
        Cmd::Alexandrov { poset } => {
            let body = load(poset)?;
            let inner = body.get("poset").cloned().unwrap_or(body);
            let p = formats::parse_poset(&inner)?;
            let x = alexandrov(&p);
            let mut mins = serde_json::Map::new();
            for (i, e) in p.elements().iter().enumerate() {
                let u = x.min_open_idx(i);
                mins.insert(
                    e.clone(),
                    json!(u.iter().map(|k| p.elements()[k].clone()).collect::<Vec<_>>()),
                );
            }
            let t0 = crate::finspace::is_t0(&p);
            let v = json!({"points": p.len(), "t0": t0, "min_opens": Value::Object(mins)});
            ok(v, format!("{} points, T0: {t0}\n", p.len()))
        }
        Cmd::SheafSections { sheaf, open } => {
            let f = formats::parse_sheaf(&load(sheaf)?)?;
            let set = formats::parse_point_set(&f.base, open)?;
            let s = f.sections_vect(&set)?;
            let v = json!({"dim": s.dim()});
            ok(v, format!("sections dimension: {}\n", s.dim()))
        }
        Cmd::Cohomology { sheaf, open } => {
            let f = formats::parse_sheaf(&load(sheaf)?)?;
            let set = match open {
                Some(o) => formats::parse_point_set(&f.base, o)?,
                None => PointSet::full(f.base.len()),
            };
            let c = cochain_complex(&f, &set)?;
            let h = c.cohomology_dims()?;
            let v = json!({"H": h, "chi": c.euler_characteristic()});
            ok(v, cohomology_table(&h, Some(c.euler_characteristic())))
        }
        Cmd::Homology { sheaf, closed } => {
            let f = formats::parse_cosheaf(&load(sheaf)?)?;
            let set = match closed {
                Some(z) => formats::parse_point_set(&f.base, z)?,
                None => PointSet::full(f.base.len()),
            };
            let c = chain_complex(&f, &set)?;
            let h = c.homology_dims()?;
            let v = json!({"H": h});
            ok(v, cohomology_table(&h, None))
        }
        Cmd::Cech { sheaf, p1_degree, degree_window } => {
            let window = parse_window(degree_window)?;
            let c = match (sheaf, p1_degree) {
                (Some(path), None) => {
                    let body = load(path)?;
                    let f = formats::parse_sheaf(&body)?;
                    let cover = formats::parse_cover(
                        body.get("cover")
                            .ok_or_else(|| Error::InvalidInput("$.cover: missing".into()))?,
                        &f.base,
                    )?;
                    cech_from_cover(&f, &cover)?
                }
                (None, Some(d)) => cech_complex(&cech_graded_p1(*d, window)?)?,
                _ => {
                    return Err(Error::InvalidInput(
                        "provide exactly one of --sheaf or --p1-degree".into(),
                    ))
                }
            };
            let h = c.cohomology_dims()?;
            let v = json!({"H": h, "chi": c.euler_characteristic()});
            ok(v, cohomology_table(&h, Some(c.euler_characteristic())))
        }
        Cmd::Compare01 { sheaf, p1_degree, degree_window } => {
            let window = parse_window(degree_window)?;
            let (left, right) = match (sheaf, p1_degree) {
                (Some(path), None) => {
                    let body = load(path)?;
                    let f = formats::parse_sheaf(&body)?;
                    let cover = formats::parse_cover(
                        body.get("cover")
                            .ok_or_else(|| Error::InvalidInput("$.cover: missing".into()))?,
                        &f.base,
                    )?;
                    let model =
                        cochain_complex(&f, &PointSet::full(f.base.len()))?.cohomology_dims()?;
                    let cech = cech_from_cover(&f, &cover)?.cohomology_dims()?;
                    (model, cech)
                }
                (None, Some(d)) => {
                    let (_, mf) = p1_graded_model(*d, window)?;
                    let model =
                        cochain_complex(&mf, &PointSet::full(3))?.cohomology_dims()?;
                    let cech = cech_complex(&cech_graded_p1(*d, window)?)?.cohomology_dims()?;
                    (model, cech)
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "provide exactly one of --sheaf or --p1-degree".into(),
                    ))
                }
            };
            let rep = compare_01(&left, &right);
            let pass = rep.agree01;
            let v = serde_json::to_value(&rep)?;
            verdicted(
                v,
                pass,
                format!(
                    "model H = {:?}, cech H = {:?}, agree in degrees 0,1: {}\n",
                    rep.left, rep.right, rep.agree01
                ),
            )
        }
        Cmd::Glue { functor } => {
            let f = parse_finite_functor(&load(functor)?)?;
            let m = glue_finite(&f)?;
            let v = json!({
                "points": m.space.len(),
                "poset": formats::poset_to_json(&m.space),
                "sheaf": formats::sheaf_to_json(&m.sheaf)?,
            });
            ok(v, format!("glued model with {} points\n", m.space.len()))
        }
        Cmd::Su { model } => {
            let body = load(model)?;
            let m = formats::parse_model(&body)?;
            let cover = formats::parse_cover(
                body.get("cover").ok_or_else(|| Error::InvalidInput("$.cover: missing".into()))?,
                &m.space,
            )?;
            let (su, proj) = build_su(&m, &cover)?;
            let v = json!({
                "points": su.space.len(),
                "poset": formats::poset_to_json(&su.space),
                "projection": proj,
            });
            ok(v, format!("S_U has {} points\n", su.space.len()))
        }
        Cmd::Su2 { nerve } => {
            let n = formats::parse_nerve(&load(nerve)?)?;
            let (poset, sheaf, para) = build_su2(&n)?;
            let mut rings = serde_json::Map::new();
            for (i, e) in poset.elements().iter().enumerate() {
                rings.insert(e.clone(), json!(sheaf.stalk_ring(i).to_string()));
            }
            let v = json!({
                "points": poset.len(),
                "rings": Value::Object(rings),
                "paraschematic": para.ok(),
                "problems": para.problems,
            });
            let pass = para.ok();
            verdicted(
                v,
                pass,
                format!("S_U² has {} points; paraschematic: {}\n", poset.len(), para.ok()),
            )
        }
        Cmd::ValidateDatum { datum } => {
            let w = formats::parse_datum(&load(datum)?)?;
            let rep = validate_gluing_datum(&w);
            let v = json!({"ok": rep.ok(), "problems": rep.problems});
            let pass = rep.ok();
            verdicted(v, pass, format!("{rep}\n"))
        }
        Cmd::ValidateFunctor { functor } => {
            let f = parse_affine_functor(&load(functor)?)?;
            let rep = check_gluing_functor(&f);
            let v = json!({"ok": rep.ok(), "problems": rep.problems});
            let pass = rep.ok();
            verdicted(v, pass, format!("{rep}\n"))
        }
        Cmd::Bundle { bundle, walk } => {
            let b = formats::parse_bundle(&load(bundle)?)?;
            let rep = crate::bundles::validate_bundle(&b);
            if let Some(w) = walk {
                let vs: Vec<&str> = w.split(',').map(str::trim).collect();
                let steps: Vec<(String, String)> = vs
                    .windows(2)
                    .map(|p| (p[0].to_string(), p[1].to_string()))
                    .collect();
                let m = crate::bundles::monodromy(&b, &steps)?;
                let v = json!({
                    "cocycle_ok": rep.ok(),
                    "monodromy": m.to_string_grid(),
                    "is_identity": m.is_identity(),
                });
                return verdicted(
                    v,
                    rep.ok(),
                    format!("monodromy identity: {}; cocycle: {}\n", m.is_identity(), rep.ok()),
                );
            }
            let f = crate::bundles::bundle_to_graph_sheaf(&b)?;
            let h = cochain_complex(&f, &PointSet::full(f.base.len()))?.cohomology_dims()?;
            let v = json!({"cocycle_ok": rep.ok(), "problems": rep.problems, "H": h});
            let pass = rep.ok();
            verdicted(
                v,
                pass,
                format!("cocycle: {}; local-system H = {h:?}\n", rep.ok()),
            )
        }
        Cmd::CschtwoBuild { nerve } => {
            let n = formats::parse_nerve(&load(nerve)?)?;
            let obj = object_from_cover(&n)?;
            let rep = validate_object(&obj);
            let (a, b, c) = obj.base.counts();
            let v = json!({
                "counts": [a, b, c],
                "valid": rep.ok(),
                "problems": rep.problems,
            });
            let pass = rep.ok();
            verdicted(
                v,
                pass,
                format!("object: {a} vertices, {b} edges, {c} two-simplices; valid: {}\n", rep.ok()),
            )
        }
        Cmd::CschtwoWe { scenario } => {
            let body = load(scenario)?;
            let sc = Scenario::parse(&body)?;
            let (src, _, dst, _, m) = sc.morphism("check")?;
            let verdict = is_weak_equivalence(&src, &dst, &m);
            let v = json!({"weak_equivalence": verdict});
            verdicted(v, verdict.is_yes(), format!("weak equivalence: {verdict}\n"))
        }
        Cmd::CschtwoEq { scenario } => {
            let body = load(scenario)?;
            let sc = Scenario::parse(&body)?;
            let (src, _, dst, _, m1) = sc.morphism("first")?;
            let (_, _, _, _, m2) = sc.morphism("second")?;
            let verdict = schematic_equal(&src, &dst, &m1, &m2)?;
            let v = json!({"schematic_equal": verdict});
            verdicted(v, verdict.is_yes(), format!("schematic equal: {verdict}\n"))
        }
        Cmd::Counterexamples { which } => {
            let mut out = serde_json::Map::new();
            let mut pass = true;
            let mut text = String::new();
            if which == "rms3" || which == "all" {
                let rep = rms3_counterexample(&LocRing::polynomial(&["t"]))?;
                let confirmed = rep.pi_is_weak_equivalence.is_yes()
                    && rep.composites_strictly_equal
                    && !rep.strict_equalizer_exists
                    && rep.psi_a_schematic_equal_psi_b.is_yes();
                pass &= confirmed;
                text.push_str(&format!(
                    "rms3: strict equalizer exists: {}; schematic RMS3 premise holds: {}\n",
                    rep.strict_equalizer_exists,
                    rep.psi_a_schematic_equal_psi_b.is_yes()
                ));
                out.insert("rms3".into(), serde_json::to_value(&rep)?);
            }
            if which == "nonschematic" || which == "all" {
                let rep = non_schematic_witness(
                    &Polynomial::var("x"),
                    &Polynomial::var("x").sub(&Polynomial::one()),
                )?;
                pass &= rep.witness_confirmed;
                text.push_str(&format!(
                    "nonschematic: witness confirmed: {} (tensor {})\n",
                    rep.witness_confirmed, rep.tensor_ring
                ));
                out.insert("nonschematic".into(), serde_json::to_value(&rep)?);
            }
            if out.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "unknown counterexample {which:?}; use rms3, nonschematic or all"
                )));
            }
            verdicted(Value::Object(out), pass, text)
        }
    }
}

// ---------------------------------------------------------------------------
// Scenario files for the category-level commands
// ---------------------------------------------------------------------------

/// A scenario bundles a glued model, named anchored covers, and named
/// morphism specifications between their objects.
struct Scenario {
    covers: BTreeMap<String, AnchoredCover>,
    specs: BTreeMap<String, Value>,
}

impl Scenario {
    fn parse(v: &Value) -> Result<Scenario> {
        let obj = v.as_object().ok_or_else(|| Error::InvalidInput("$: expected object".into()))?;
        let model = match obj.get("model") {
            Some(Value::Object(m)) if m.contains_key("affine_line") => {
                let var = m["affine_line"]
                    .as_str()
                    .ok_or_else(|| Error::InvalidInput("$.model.affine_line: variable name".into()))?;
                GluedModel::single_patch(LocRing::polynomial(&[var]))
            }
            Some(m) => GluedModel::new(formats::parse_datum(m)?)?,
            None => return Err(Error::InvalidInput("$.model: missing".into())),
        };
        let mut covers = BTreeMap::new();
        let covers_v = obj
            .get("covers")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::InvalidInput("$.covers: missing".into()))?;
        for (cname, cv) in covers_v {
            let patches = cv
                .as_object()
                .ok_or_else(|| Error::InvalidInput(format!("$.covers.{cname}: object")))?;
            let mut names = Vec::new();
            let mut anchors = Vec::new();
            for (pname, av) in patches {
                names.push(pname.clone());
                anchors.push(parse_anchor(av, &format!("$.covers.{cname}.{pname}"))?);
            }
            covers.insert(cname.clone(), AnchoredCover::new(model.clone(), names, anchors)?);
        }
        let mut specs = BTreeMap::new();
        for key in ["check", "first", "second"] {
            if let Some(s) = obj.get(key) {
                specs.insert(key.to_string(), s.clone());
            }
        }
        let _ = model;
        Ok(Scenario { covers, specs })
    }

    fn cover(&self, name: &str) -> Result<&AnchoredCover> {
        self.covers
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown cover {name:?}")))
    }

    /// Resolve a named morphism spec into (source, source cover, target,
    /// target cover, morphism).
    fn morphism(
        &self,
        key: &str,
    ) -> Result<(CSch2Object, AnchoredCover, CSch2Object, AnchoredCover, CSch2Mor)> {
        let spec = self
            .specs
            .get(key)
            .ok_or_else(|| Error::InvalidInput(format!("$.{key}: missing morphism spec")))?;
        let obj = spec
            .as_object()
            .ok_or_else(|| Error::InvalidInput(format!("$.{key}: expected object")))?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidInput(format!("$.{key}.kind: missing")))?;
        match kind {
            "canonical-inclusion" => {
                let cover = self.cover(str_field(obj, "cover", key)?)?;
                let target = object_from_anchored(cover)?;
                let (src, m) = canonical_inclusion(&target)?;
                Ok((src, cover.clone(), target, cover.clone(), m))
            }
            "refinement" => {
                let fine_cover = self.cover(str_field(obj, "fine", key)?)?;
                let coarse_cover = self.cover(str_field(obj, "coarse", key)?)?;
                let fine = object_from_anchored(fine_cover)?;
                let coarse = object_from_anchored(coarse_cover)?;
                let mut assignment = BTreeMap::new();
                let amap = obj
                    .get("assignment")
                    .and_then(Value::as_object)
                    .ok_or_else(|| Error::InvalidInput(format!("$.{key}.assignment: missing")))?;
                for (k, v) in amap {
                    assignment.insert(
                        k.clone(),
                        v.as_str()
                            .ok_or_else(|| Error::InvalidInput(format!("$.{key}.assignment.{k}")))?
                            .to_string(),
                    );
                }
                let m = refinement_mor(&fine, fine_cover, &coarse, coarse_cover, &assignment)?;
                Ok((fine, fine_cover.clone(), coarse, coarse_cover.clone(), m))
            }
            "product-left" | "product-right" => {
                let left_cover = self.cover(str_field(obj, "left", key)?)?;
                let right_cover = self.cover(str_field(obj, "right", key)?)?;
                let left = object_from_anchored(left_cover)?;
                let right = object_from_anchored(right_cover)?;
                let prod = product_cover(&left, left_cover, &right, right_cover)?;
                if kind == "product-left" {
                    Ok((prod.object, prod.cover.clone(), left, left_cover.clone(), prod.to_left))
                } else {
                    Ok((
                        prod.right_object,
                        prod.cover.clone(),
                        right,
                        right_cover.clone(),
                        prod.to_right,
                    ))
                }
            }
            "endo" => {
                // substitution endomorphism of a single-cover object
                let cover = self.cover(str_field(obj, "cover", key)?)?;
                let target = object_from_anchored(cover)?;
                let source = target.clone();
                let mut images = BTreeMap::new();
                let imap = obj
                    .get("images")
                    .and_then(Value::as_object)
                    .ok_or_else(|| Error::InvalidInput(format!("$.{key}.images: missing")))?;
                for (var, lv) in imap {
                    images.insert(
                        var.clone(),
                        formats::parse_laurent(lv, &format!("$.{key}.images.{var}"))?,
                    );
                }
                let m = crate::cschtwo::substitution_endo(&source, &images)?;
                Ok((source, cover.clone(), target, cover.clone(), m))
            }
            other => Err(Error::InvalidInput(format!("$.{key}.kind: unknown kind {other:?}"))),
        }
    }
}

fn str_field<'v>(obj: &'v serde_json::Map<String, Value>, k: &str, key: &str) -> Result<&'v str> {
    obj.get(k)
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidInput(format!("$.{key}.{k}: missing")))
}

fn parse_anchor(v: &Value, path: &str) -> Result<Anchor> {
    if v.as_str() == Some("empty") {
        return Ok(Anchor::Empty);
    }
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidInput(format!("{path}: expected anchor object")))?;
    let patch = obj
        .get("patch")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidInput(format!("{path}.patch: missing")))? as usize;
    let mut factors = Vec::new();
    if let Some(fs) = obj.get("factors") {
        let arr = fs
            .as_array()
            .ok_or_else(|| Error::InvalidInput(format!("{path}.factors: expected array")))?;
        for (i, f) in arr.iter().enumerate() {
            factors.push(formats::parse_poly(f, &format!("{path}.factors[{i}]"))?);
        }
    }
    Ok(Anchor::basic(patch, &factors))
}

// ---------------------------------------------------------------------------
// Functor file parsers (affine and finite-model gluing functors)
// ---------------------------------------------------------------------------

/// Affine functor format: {"graph": {...}, "rings": {"simplex": LocRing},
/// "maps": {"x->y": RingMor}} over the clique complex of the graph.
fn parse_affine_functor(v: &Value) -> Result<AffineGluingFunctor> {
    let obj = v.as_object().ok_or_else(|| Error::InvalidInput("$: expected object".into()))?;
    let graph = formats::parse_graph(
        obj.get("graph").ok_or_else(|| Error::InvalidInput("$.graph: missing".into()))?,
    )?;
    let base = clique_complex(&graph)?;
    let mut rings = BTreeMap::new();
    let rings_v = obj
        .get("rings")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidInput("$.rings: missing".into()))?;
    for (k, rv) in rings_v {
        rings.insert(k.clone(), formats::parse_locring(rv, &format!("$.rings.{k}"))?);
    }
    let mut maps = BTreeMap::new();
    let maps_v = obj
        .get("maps")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidInput("$.maps: missing".into()))?;
    for (k, mv) in maps_v {
        let (a, b) = k
            .split_once("->")
            .ok_or_else(|| Error::InvalidInput(format!("$.maps: key {k:?} is not \"x->y\"")))?;
        let (a, b) = (a.trim().to_string(), b.trim().to_string());
        let src = rings
            .get(&a)
            .ok_or_else(|| Error::InvalidInput(format!("$.maps.{k}: unknown source {a:?}")))?
            .clone();
        let dst = rings
            .get(&b)
            .ok_or_else(|| Error::InvalidInput(format!("$.maps.{k}: unknown target {b:?}")))?
            .clone();
        maps.insert((a, b), formats::parse_ringmor(mv, &src, &dst, &format!("$.maps.{k}"))?);
    }
    Ok(AffineGluingFunctor { base, rings, maps })
}

/// Finite functor format: {"graph": {...}, "models": {"simplex": sheaf-json},
/// "embeddings": {"face,ambient": {"pt": "image", ...}}}.
fn parse_finite_functor(v: &Value) -> Result<FiniteGluingFunctor> {
    let obj = v.as_object().ok_or_else(|| Error::InvalidInput("$: expected object".into()))?;
    let graph = formats::parse_graph(
        obj.get("graph").ok_or_else(|| Error::InvalidInput("$.graph: missing".into()))?,
    )?;
    let base = clique_complex(&graph)?;
    let mut models = BTreeMap::new();
    let models_v = obj
        .get("models")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidInput("$.models: missing".into()))?;
    for (k, mv) in models_v {
        let sheaf = formats::parse_sheaf(mv)?;
        models.insert(k.clone(), FiniteModel { space: sheaf.base.clone(), sheaf });
    }
    let mut embeddings = BTreeMap::new();
    if let Some(embs) = obj.get("embeddings").and_then(Value::as_object) {
        for (k, ev) in embs {
            let (face, ambient) = k.split_once(',').ok_or_else(|| {
                Error::InvalidInput(format!("$.embeddings: key {k:?} is not \"vertex,edge\""))
            })?;
            let map_v = ev
                .as_object()
                .ok_or_else(|| Error::InvalidInput(format!("$.embeddings.{k}: object")))?;
            let mut map = BTreeMap::new();
            for (p, q) in map_v {
                map.insert(
                    p.clone(),
                    q.as_str()
                        .ok_or_else(|| Error::InvalidInput(format!("$.embeddings.{k}.{p}")))?
                        .to_string(),
                );
            }
            embeddings
                .insert((face.trim().to_string(), ambient.trim().to_string()), ModelEmbedding { map });
        }
    }
    Ok(FiniteGluingFunctor { base, models, embeddings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("-3:4").unwrap(), (-3, 4));
        assert!(parse_window("x").is_err());
    }
}
