//! The structural category of affine patches: localized polynomial rings over
//! the rationals and their morphisms.
//!
//! The fragment is deliberately structural. A ring is Q[x1..xn] with a
//! canonical set of inverted factors; a morphism is a variable substitution
//! with Laurent images. Open embeddings are recognized syntactically, as
//! compositions of localizations and named isomorphisms carried around as
//! certificates; nothing here attempts Groebner bases or general ideal
//! arithmetic. Every nonzero ring in the fragment is a domain, so equalities
//! of fractions are decided by cross-multiplication.

use std::collections::{BTreeMap, BTreeSet};

use crate::poly::{Laurent, Polynomial};
use crate::{Error, Result, Verdict};

/// Localized polynomial ring over Q, in canonical form: sorted variables and
/// a structurally factored, monic, deduplicated set of inverted polynomials.
/// The zero ring is a dedicated flagged value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LocRing {
    vars: Vec<String>,
    inverted: BTreeSet<Polynomial>,
    zero: bool,
}

impl LocRing {
    /// Q[vars], nothing inverted.
    pub fn polynomial(vars: &[&str]) -> LocRing {
        let mut vs: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        vs.sort();
        vs.dedup();
        LocRing { vars: vs, inverted: BTreeSet::new(), zero: false }
    }

    /// The rationals themselves: no variables, nothing inverted.
    pub fn rationals() -> LocRing {
        LocRing::polynomial(&[])
    }

    pub fn zero_ring() -> LocRing {
        LocRing { vars: Vec::new(), inverted: BTreeSet::new(), zero: true }
    }

    /// Canonical constructor: splits every inverted polynomial into structural
    /// factors. Inverting zero collapses to the zero ring.
    pub fn new(vars: &[&str], inverted: &[Polynomial]) -> Result<LocRing> {
        let mut ring = LocRing::polynomial(vars);
        for f in inverted {
            if f.is_zero() {
                return Ok(LocRing::zero_ring());
            }
            for v in f.variables() {
                if !ring.vars.contains(&v) {
                    return Err(Error::InvalidInput(format!(
                        "inverted polynomial {f} uses unknown variable {v}"
                    )));
                }
            }
            ring.inverted.extend(f.structural_factors());
        }
        Ok(ring)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn inverted(&self) -> &BTreeSet<Polynomial> {
        &self.inverted
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Unit test within the fragment: constants are units, and so is anything
    /// that divides a product of inverted factors. Complete whenever the
    /// factor set is fully split (the case for everything the library builds).
    pub fn is_unit(&self, p: &Polynomial) -> bool {
        if self.zero {
            return true;
        }
        if p.is_zero() {
            return false;
        }
        let mut f = p.monic();
        loop {
            if f.is_constant() {
                return true;
            }
            let mut divided = false;
            for g in &self.inverted {
                if let Some(q) = f.div_exact(g) {
                    f = q.monic();
                    divided = true;
                    break;
                }
            }
            if !divided {
                return false;
            }
        }
    }

    pub fn is_unit_laurent(&self, l: &Laurent) -> bool {
        self.is_unit(&l.num) && self.is_unit(&l.den)
    }

    /// Membership of a Laurent expression in this ring: the denominator must
    /// be a unit.
    pub fn contains_laurent(&self, l: &Laurent) -> bool {
        if self.zero {
            return true;
        }
        l.num.variables().iter().all(|v| self.vars.contains(v))
            && l.den.variables().iter().all(|v| self.vars.contains(v))
            && self.is_unit(&l.den)
    }

    /// This ring further localized at the structural factors of `fs`.
    pub fn with_inverted(&self, fs: &[Polynomial]) -> LocRing {
        if self.zero {
            return self.clone();
        }
        let mut out = self.clone();
        for f in fs {
            if f.is_zero() {
                return LocRing::zero_ring();
            }
            out.inverted.extend(f.structural_factors());
        }
        out
    }

    /// Identity-variable images for morphisms out of this ring.
    pub fn identity_images(&self) -> BTreeMap<String, Laurent> {
        self.vars.iter().map(|v| (v.clone(), Laurent::var(v))).collect()
    }
}

impl std::fmt::Display for LocRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.zero {
            return write!(f, "0");
        }
        if self.vars.is_empty() {
            return write!(f, "Q");
        }
        write!(f, "Q[{}]", self.vars.join(","))?;
        if !self.inverted.is_empty() {
            let fs: Vec<String> = self.inverted.iter().map(|p| p.to_string()).collect();
            write!(f, "_{{{}}}", fs.join(", "))?;
        }
        Ok(())
    }
}

/// Open-embedding certificate: how a morphism is recognized as (the ring side
/// of) an open embedding of affine patches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbCert {
    /// Spec of the zero ring is the empty open.
    ToZero,
    /// source -> source_S -> target, the second leg an isomorphism whose
    /// inverse sends target variables to Laurent expressions over the source.
    LocIso {
        inverted: BTreeSet<Polynomial>,
        inverse: BTreeMap<String, Laurent>,
    },
    /// Not recognized as an open embedding.
    None,
}

/// Ring morphism in the structural fragment: a substitution sending each
/// source variable to a Laurent expression over the target, together with an
/// optional open-embedding certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMor {
    pub source: LocRing,
    pub target: LocRing,
    pub images: BTreeMap<String, Laurent>,
    pub cert: EmbCert,
}

impl RingMor {
    pub fn identity(r: &LocRing) -> RingMor {
        if r.is_zero() {
            return RingMor::to_zero(r);
        }
        RingMor {
            source: r.clone(),
            target: r.clone(),
            images: r.identity_images(),
            cert: EmbCert::LocIso { inverted: BTreeSet::new(), inverse: r.identity_images() },
        }
    }

    /// The unique morphism into the zero ring.
    pub fn to_zero(source: &LocRing) -> RingMor {
        RingMor {
            source: source.clone(),
            target: LocRing::zero_ring(),
            images: source.vars().iter().map(|v| (v.clone(), Laurent::zero())).collect(),
            cert: EmbCert::ToZero,
        }
    }

    /// Canonical inclusion of a ring into a further localization of itself.
    pub fn localization(source: &LocRing, target: &LocRing) -> Result<RingMor> {
        if target.is_zero() {
            return Ok(RingMor::to_zero(source));
        }
        if source.is_zero() {
            return Err(Error::InvalidInput(
                "no morphism from the zero ring to a nonzero ring".into(),
            ));
        }
        if source.vars() != target.vars() || !source.inverted.is_subset(&target.inverted) {
            return Err(Error::InvalidInput(format!(
                "{target} is not a further localization of {source}"
            )));
        }
        let extra: BTreeSet<Polynomial> =
            target.inverted.difference(&source.inverted).cloned().collect();
        Ok(RingMor {
            source: source.clone(),
            target: target.clone(),
            images: source.identity_images(),
            cert: EmbCert::LocIso { inverted: extra, inverse: target.identity_images() },
        })
    }

    /// Named isomorphism: both directions are supplied and checked to compose
    /// to the identity.
    pub fn iso(
        source: &LocRing,
        target: &LocRing,
        images: BTreeMap<String, Laurent>,
        inverse: BTreeMap<String, Laurent>,
    ) -> Result<RingMor> {
        if source.is_zero() != target.is_zero() {
            return Err(Error::InvalidInput("isomorphism between zero and nonzero ring".into()));
        }
        if source.is_zero() {
            return Ok(RingMor::to_zero(source));
        }
        let m = RingMor {
            source: source.clone(),
            target: target.clone(),
            images,
            cert: EmbCert::LocIso { inverted: BTreeSet::new(), inverse },
        };
        m.validate()?;
        Ok(m)
    }

    /// General substitution with no embedding certificate.
    pub fn substitution(
        source: &LocRing,
        target: &LocRing,
        images: BTreeMap<String, Laurent>,
    ) -> Result<RingMor> {
        if target.is_zero() {
            return Ok(RingMor::to_zero(source));
        }
        if source.is_zero() {
            return Err(Error::InvalidInput(
                "no morphism from the zero ring to a nonzero ring".into(),
            ));
        }
        let m = RingMor { source: source.clone(), target: target.clone(), images, cert: EmbCert::None };
        m.validate()?;
        Ok(m)
    }

    /// Well-definedness: total images inside the target, inverted elements of
    /// the source become units, and any LocIso certificate round-trips.
    pub fn validate(&self) -> Result<()> {
        if self.target.is_zero() {
            return Ok(());
        }
        if self.source.is_zero() {
            return Err(Error::InvalidInput(
                "no morphism from the zero ring to a nonzero ring".into(),
            ));
        }
        for v in self.source.vars() {
            let img = self
                .images
                .get(v)
                .ok_or_else(|| Error::InvalidInput(format!("variable {v} has no image")))?;
            if !self.target.contains_laurent(img) {
                return Err(Error::InvalidInput(format!(
                    "image of {v} ({img}) does not lie in {}",
                    self.target
                )));
            }
        }
        for f in &self.source.inverted {
            let img = self.apply_poly(f).ok_or_else(|| {
                Error::InvalidInput(format!("cannot evaluate inverted element {f}"))
            })?;
            if !self.target.is_unit_laurent(&img) {
                return Err(Error::InvalidInput(format!(
                    "inverted element {f} does not map to a unit of {}",
                    self.target
                )));
            }
        }
        if let EmbCert::LocIso { inverted, inverse } = &self.cert {
            let localized =
                self.source.with_inverted(&inverted.iter().cloned().collect::<Vec<_>>());
            for w in self.target.vars() {
                let inv = inverse.get(w).ok_or_else(|| {
                    Error::InvalidInput(format!("certificate misses inverse of {w}"))
                })?;
                if !localized.contains_laurent(inv) {
                    return Err(Error::InvalidInput(format!(
                        "certificate inverse of {w} ({inv}) not in {localized}"
                    )));
                }
                // inverse then forward is the identity on target variables
                let round = inv
                    .substitute(&self.images)
                    .ok_or_else(|| Error::InvalidInput("certificate substitution failed".into()))?;
                if !round.is_var(w) {
                    return Err(Error::InvalidInput(format!(
                        "certificate round trip fails on target variable {w}"
                    )));
                }
            }
            for v in self.source.vars() {
                let round = self.images[v]
                    .substitute(inverse)
                    .ok_or_else(|| Error::InvalidInput("certificate substitution failed".into()))?;
                if !round.is_var(v) {
                    return Err(Error::InvalidInput(format!(
                        "certificate round trip fails on source variable {v}"
                    )));
                }
            }
            // the target must actually invert the certified factors
            for f in inverted {
                let img = self
                    .apply_poly(f)
                    .ok_or_else(|| Error::InvalidInput("certificate evaluation failed".into()))?;
                if !self.target.is_unit_laurent(&img) {
                    return Err(Error::InvalidInput(format!(
                        "certified factor {f} is not a unit in the target"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply_poly(&self, p: &Polynomial) -> Option<Laurent> {
        if self.target.is_zero() {
            return Some(Laurent::zero());
        }
        p.substitute(&self.images)
    }

    pub fn apply_laurent(&self, l: &Laurent) -> Option<Laurent> {
        if self.target.is_zero() {
            return Some(Laurent::zero());
        }
        l.substitute(&self.images)
    }

    /// Composition self: A -> B, then: B -> C.
    pub fn compose(&self, then: &RingMor) -> Result<RingMor> {
        if self.target != then.source {
            return Err(Error::Precondition(format!(
                "composition mismatch: {} vs {}",
                self.target, then.source
            )));
        }
        if then.target.is_zero() {
            return Ok(RingMor::to_zero(&self.source));
        }
        let mut images = BTreeMap::new();
        for (v, img) in &self.images {
            let mapped = then
                .apply_laurent(img)
                .ok_or_else(|| Error::InvalidInput("composite image failed".into()))?;
            images.insert(v.clone(), mapped);
        }
        let cert = match (&self.cert, &then.cert) {
            (EmbCert::ToZero, _) | (_, EmbCert::ToZero) => EmbCert::ToZero,
            (
                EmbCert::LocIso { inverted: s1, inverse: i1 },
                EmbCert::LocIso { inverted: s2, inverse: i2 },
            ) => {
                // pull the second localization set back along the first inverse
                let mut inverted = s1.clone();
                let mut ok = true;
                for g in s2 {
                    match g.substitute(i1) {
                        Some(l) => {
                            inverted.extend(l.num.structural_factors());
                            inverted.extend(l.den.structural_factors());
                        }
                        None => ok = false,
                    }
                }
                let mut inverse = BTreeMap::new();
                for (w, inv2) in i2 {
                    match inv2.substitute(i1) {
                        Some(l) => {
                            inverse.insert(w.clone(), l);
                        }
                        None => ok = false,
                    }
                }
                if ok {
                    EmbCert::LocIso { inverted, inverse }
                } else {
                    EmbCert::None
                }
            }
            _ => EmbCert::None,
        };
        let m = RingMor { source: self.source.clone(), target: then.target.clone(), images, cert };
        if m.validate().is_err() {
            // keep the morphism but drop an uncheckable certificate
            let mut m2 = m;
            m2.cert = EmbCert::None;
            m2.validate()?;
            return Ok(m2);
        }
        Ok(m)
    }

    /// True when the morphism is certified as an open embedding: identity,
    /// named isomorphism, further localization, or any composition of these;
    /// also the map onto the zero ring (empty open).
    pub fn is_open_embedding(&self) -> bool {
        !matches!(self.cert, EmbCert::None)
    }

    /// Isomorphism test within the fragment. LocIso certificates decide it
    /// exactly; uncertified substitutions are undecided.
    pub fn is_iso(&self) -> Verdict {
        match &self.cert {
            EmbCert::ToZero => Verdict::from_bool(self.source.is_zero()),
            EmbCert::LocIso { inverted, .. } => {
                Verdict::from_bool(inverted.iter().all(|f| self.source.is_unit(f)))
            }
            EmbCert::None => Verdict::Undecided,
        }
    }

    /// Equality of morphisms: same endpoints and the same variable images.
    pub fn eq_mor(&self, other: &RingMor) -> bool {
        if self.source != other.source || self.target != other.target {
            return false;
        }
        if self.target.is_zero() {
            return true;
        }
        self.source.vars().iter().all(|v| match (self.images.get(v), other.images.get(v)) {
            (Some(a), Some(b)) => a.eq_cross(b),
            _ => false,
        })
    }

    /// The target presented as a localization of the source, when certified:
    /// the factors adjoined.
    pub fn localization_factors(&self) -> Option<&BTreeSet<Polynomial>> {
        match &self.cert {
            EmbCert::LocIso { inverted, .. } => Some(inverted),
            _ => None,
        }
    }

    /// Is this the canonical inclusion of `source` into a localization of
    /// itself (identity images)?
    pub fn is_pure_localization(&self) -> bool {
        if self.target.is_zero() {
            return true;
        }
        self.source.vars() == self.target.vars()
            && self.source.vars().iter().all(|v| self.images[v].is_var(v))
            && self.source.inverted.is_subset(&self.target.inverted)
    }
}

/// Localize R at f. Localizing at zero yields the zero ring (flagged, not an
/// error); localizing at a unit returns R with an identity-kind morphism.
pub fn localize(r: &LocRing, f: &Polynomial) -> (LocRing, RingMor) {
    if r.is_zero() {
        return (r.clone(), RingMor::identity(r));
    }
    if f.is_zero() {
        return (LocRing::zero_ring(), RingMor::to_zero(r));
    }
    if r.is_unit(f) {
        return (r.clone(), RingMor::identity(r));
    }
    let target = r.with_inverted(std::slice::from_ref(f));
    let mor = RingMor::localization(r, &target).expect("further localization");
    (target, mor)
}

/// Fibre product of two further localizations of A, which in the fragment is
/// A localized at the union of the inverted sets. Either factor being the
/// zero ring absorbs everything.
pub fn tensor_over(a: &LocRing, b: &RingMor, c: &RingMor) -> Result<LocRing> {
    for (name, m) in [("first", b), ("second", c)] {
        if m.source != *a {
            return Err(Error::Precondition(format!("{name} morphism does not start at {a}")));
        }
        if !m.is_pure_localization() {
            return Err(Error::Precondition(format!(
                "{name} morphism is not a further localization; outside the fragment"
            )));
        }
    }
    if b.target.is_zero() || c.target.is_zero() {
        return Ok(LocRing::zero_ring());
    }
    let mut fs: Vec<Polynomial> = b.target.inverted.iter().cloned().collect();
    fs.extend(c.target.inverted.iter().cloned());
    Ok(a.with_inverted(&fs))
}

/// One graded piece of the twisted module O(d) on a patch of the standard
/// projective-line cover, under the standard trivialization. The coordinate
/// patch Q[coord] sees exponents >= 0, the opposite patch (any other single
/// variable) sees exponents <= d, and the Laurent overlap sees everything;
/// all windowed to [lo, hi].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece {
    pub coord: String,
    pub exponents: Vec<i64>,
}

impl GradedPiece {
    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn basis(&self) -> Vec<String> {
        self.exponents
            .iter()
            .map(|&e| match e {
                0 => "1".to_string(),
                1 => self.coord.clone(),
                _ => format!("{}^{}", self.coord, e),
            })
            .collect()
    }
}

pub fn graded_sections(
    r: &LocRing,
    coord: &str,
    d: i64,
    window: (i64, i64),
) -> Result<GradedPiece> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::InvalidInput("empty degree window".into()));
    }
    if r.is_zero() {
        return Ok(GradedPiece { coord: coord.to_string(), exponents: Vec::new() });
    }
    if r.vars().len() != 1 {
        return Err(Error::Precondition(format!(
            "graded sections need a single-variable patch, got {r}"
        )));
    }
    let v = r.vars()[0].clone();
    let var_poly = Polynomial::var(&v);
    let laurent = match r.inverted().len() {
        0 => false,
        1 if r.inverted().contains(&var_poly) => true,
        _ => {
            return Err(Error::Precondition(format!(
                "patch {r} inverts something other than its coordinate"
            )))
        }
    };
    let range: Vec<i64> = if laurent {
        (lo..=hi).collect()
    } else if v == coord {
        (lo.max(0)..=hi).collect()
    } else {
        (lo..=hi.min(d)).collect()
    };
    Ok(GradedPiece { coord: coord.to_string(), exponents: range })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }

    fn qx() -> LocRing {
        LocRing::polynomial(&["x"])
    }

    #[test]
    fn localize_at_variable() {
        let (rx, m) = localize(&qx(), &x());
        assert_eq!(rx, LocRing::new(&["x"], &[x()]).unwrap());
        assert!(m.is_open_embedding());
        assert!(m.is_iso().is_no());
        assert!(rx.is_unit(&x()));
        assert!(!rx.is_unit(&x().sub(&Polynomial::one())));
    }

    #[test]
    fn localize_at_unit_is_identity() {
        let (r, m) = localize(&qx(), &Polynomial::one());
        assert_eq!(r, qx());
        assert!(m.eq_mor(&RingMor::identity(&qx())));
        assert!(m.is_iso().is_yes());
    }

    #[test]
    fn localize_at_zero_gives_zero_ring() {
        let (r, m) = localize(&qx(), &Polynomial::zero());
        assert!(r.is_zero());
        assert!(matches!(m.cert, EmbCert::ToZero));
        assert!(m.is_open_embedding());
    }

    #[test]
    fn iterated_localization_canonicalizes() {
        // (Q[x]_x)_{x-1} = Q[x]_{x(x-1)}
        let (rx, _) = localize(&qx(), &x());
        let (rboth, _) = localize(&rx, &x().sub(&Polynomial::one()));
        let direct = LocRing::new(&["x"], &[x().mul(&x().sub(&Polynomial::one()))]).unwrap();
        assert_eq!(rboth, direct);
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let f = x().pow(2).sub(&x()); // x(x-1)
        let r = LocRing::new(&["x"], &[f]).unwrap();
        let again =
            LocRing::new(&["x"], &r.inverted().iter().cloned().collect::<Vec<_>>()).unwrap();
        assert_eq!(r, again);
        assert_eq!(r.inverted().len(), 2);
    }

    #[test]
    fn tensor_of_localizations() {
        let a = qx();
        let (b, mb) = localize(&a, &x());
        let (_c, mc) = localize(&a, &x().sub(&Polynomial::one()));
        let t = tensor_over(&a, &mb, &mc).unwrap();
        assert_eq!(t, LocRing::new(&["x"], &[x().mul(&x().sub(&Polynomial::one()))]).unwrap());
        // B tensor_A B = B
        let t2 = tensor_over(&a, &mb, &mb).unwrap();
        assert_eq!(t2, b);
        // zero absorbs
        let z = RingMor::to_zero(&a);
        assert!(tensor_over(&a, &mb, &z).unwrap().is_zero());
    }

    #[test]
    fn tensor_rejects_non_localizations() {
        let a = qx();
        let to_q = RingMor::substitution(
            &a,
            &LocRing::rationals(),
            BTreeMap::from([("x".to_string(), Laurent::constant(rat_int(0)))]),
        )
        .unwrap();
        let (_, mb) = localize(&a, &x());
        assert!(tensor_over(&a, &mb, &to_q).is_err());
    }

    #[test]
    fn open_embedding_judgments() {
        let a = qx();
        let (_, loc) = localize(&a, &x());
        assert!(loc.is_open_embedding());
        assert!(RingMor::identity(&a).is_open_embedding());
        // x -> 0 into Q is not a localization in the fragment
        let ev = RingMor::substitution(
            &a,
            &LocRing::rationals(),
            BTreeMap::from([("x".to_string(), Laurent::constant(rat_int(0)))]),
        )
        .unwrap();
        assert!(!ev.is_open_embedding());
        assert!(ev.is_iso() == Verdict::Undecided);
    }

    #[test]
    fn p1_transition_is_an_iso_and_composes() {
        // Q[y]_y -> Q[x]_x, y -> 1/x
        let rx = LocRing::new(&["x"], &[x()]).unwrap();
        let ry = LocRing::new(&["y"], &[Polynomial::var("y")]).unwrap();
        let m = RingMor::iso(
            &ry,
            &rx,
            BTreeMap::from([("y".to_string(), Laurent::inv_var("x"))]),
            BTreeMap::from([("x".to_string(), Laurent::inv_var("y"))]),
        )
        .unwrap();
        assert!(m.is_iso().is_yes());
        assert!(m.is_open_embedding());
        // composed with its inverse it is the identity
        let back = RingMor::iso(
            &rx,
            &ry,
            BTreeMap::from([("x".to_string(), Laurent::inv_var("y"))]),
            BTreeMap::from([("y".to_string(), Laurent::inv_var("x"))]),
        )
        .unwrap();
        let round = m.compose(&back).unwrap();
        assert!(round.eq_mor(&RingMor::identity(&ry)));
        assert!(round.is_iso().is_yes());
    }

    #[test]
    fn embeddings_closed_under_composition() {
        let a = qx();
        let (rx, m1) = localize(&a, &x());
        let (_, m2) = localize(&rx, &x().sub(&Polynomial::one()));
        let c = m1.compose(&m2).unwrap();
        assert!(c.is_open_embedding());
        assert_eq!(c.localization_factors().unwrap().len(), 2);
    }

    #[test]
    fn zero_ring_morphisms() {
        let z = LocRing::zero_ring();
        // every ring maps to the zero ring
        assert!(RingMor::to_zero(&qx()).validate().is_ok());
        // the zero ring maps to no nonzero ring
        assert!(RingMor::localization(&z, &qx()).is_err());
        let m = RingMor { source: z, target: qx(), images: BTreeMap::new(), cert: EmbCert::None };
        assert!(m.validate().is_err());
    }

    #[test]
    fn graded_pieces_of_the_standard_cover() {
        let window = (-2, 2);
        // Q[x] at d = 2: {1, x, x^2}
        let p = graded_sections(&qx(), "x", 2, window).unwrap();
        assert_eq!(p.dim(), 3);
        assert_eq!(p.basis(), vec!["1", "x", "x^2"]);
        // Laurent patch at d = 0: five exponents in the window
        let rxx = LocRing::new(&["x"], &[x()]).unwrap();
        let l = graded_sections(&rxx, "x", 0, window).unwrap();
        assert_eq!(l.dim(), 5);
        // opposite patch Q[y] at d = 0: exponents <= 0
        let ry = LocRing::polynomial(&["y"]);
        let o = graded_sections(&ry, "x", 0, window).unwrap();
        assert_eq!(o.exponents, vec![-2, -1, 0]);
        // multivariable input rejected
        assert!(graded_sections(&LocRing::polynomial(&["x", "y"]), "x", 0, window).is_err());
    }
}
