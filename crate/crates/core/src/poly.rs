//! Sparse multivariate polynomials over the rationals, plus the small amount
//! of structural factorization the ring fragment needs: monic scaling,
//! monomial-content splitting, univariate square-free reduction and rational
//! root extraction. No Groebner bases, no general ideal arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::{Rat, rat_int};

/// Exponent vector, e.g. {x: 2, y: 1} for x²y. Zero exponents are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Monomial(pub BTreeMap<String, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(BTreeMap::from([(name.to_string(), 1)]))
    }

    pub fn total_degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.0.clone();
        for (v, e) in &other.0 {
            *m.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(m)
    }

    /// self / other, if other divides self.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut m = self.0.clone();
        for (v, e) in &other.0 {
            let cur = m.get_mut(v)?;
            if *cur < *e {
                return None;
            }
            *cur -= e;
            if *cur == 0 {
                m.remove(v);
            }
        }
        Some(Monomial(m))
    }

    /// Graded order: total degree first, then the map order. Used to pick
    /// leading terms deterministically.
    fn graded_cmp(&self, other: &Monomial) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Polynomial {
    /// monomial -> nonzero coefficient
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Polynomial::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(name: &str) -> Self {
        let mut p = Polynomial::zero();
        p.terms.insert(Monomial::var(name), Rat::one());
        p
    }

    pub fn int(n: i64) -> Self {
        Polynomial::constant(rat_int(n))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_coeff() == Rat::one()
    }

    pub fn constant_coeff(&self) -> Rat {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.0.keys().cloned()).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Leading (monomial, coefficient) in the graded order.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().max_by(|a, b| a.0.graded_cmp(b.0))
    }

    /// Scale so the leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            None => Polynomial::zero(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Exact division: Some(q) with self = q * divisor, or None.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        if divisor.is_zero() {
            return None;
        }
        let (lead_m, lead_c) = divisor.leading().unwrap();
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let qm = rm.div(lead_m)?;
            let qc = &rc / lead_c;
            let t = Polynomial::from_terms([(qm, qc)]);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(divisor));
        }
        Some(quot)
    }

    pub fn eval_rat(&self, assignment: &BTreeMap<String, Rat>) -> Option<Rat> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let val = assignment.get(v)?;
                for _ in 0..*e {
                    t *= val;
                }
            }
            acc += t;
        }
        Some(acc)
    }

    /// Substitute each variable by a Laurent expression.
    pub fn substitute(&self, images: &BTreeMap<String, Laurent>) -> Option<Laurent> {
        let mut acc = Laurent::zero();
        for (m, c) in &self.terms {
            let mut t = Laurent::constant(c.clone());
            for (v, e) in &m.0 {
                let img = images.get(v)?;
                for _ in 0..*e {
                    t = t.mul(img);
                }
            }
            acc = acc.add(&t);
        }
        Some(acc)
    }

    // ---- univariate helpers ----

    pub fn sole_variable(&self) -> Option<String> {
        let vars = self.variables();
        if vars.len() == 1 {
            vars.into_iter().next()
        } else {
            None
        }
    }

    /// Dense coefficient vector c0..cn for a univariate polynomial in `v`.
    fn dense_coeffs(&self, v: &str) -> Vec<Rat> {
        let deg = self.total_degree() as usize;
        let mut out = vec![Rat::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0.get(v).copied().unwrap_or(0) as usize;
            out[e] = c.clone();
        }
        out
    }

    fn from_dense(v: &str, coeffs: &[Rat]) -> Polynomial {
        Polynomial::from_terms(coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(
            |(e, c)| {
                let m = if e == 0 {
                    Monomial::one()
                } else {
                    Monomial(BTreeMap::from([(v.to_string(), e as u32)]))
                };
                (m, c.clone())
            },
        ))
    }

    pub fn derivative(&self, v: &str) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let e = *m.0.get(v)?;
            let mut m2 = m.0.clone();
            if e == 1 {
                m2.remove(v);
            } else {
                m2.insert(v.to_string(), e - 1);
            }
            Some((Monomial(m2), c * rat_int(e as i64)))
        }))
    }

    /// Monic univariate gcd by the Euclidean algorithm. Both inputs must be
    /// polynomials in the single variable `v` (constants allowed).
    pub fn gcd_univariate(a: &Polynomial, b: &Polynomial, v: &str) -> Polynomial {
        let mut f = a.dense_coeffs(v);
        let mut g = b.dense_coeffs(v);
        let trim = |c: &mut Vec<Rat>| {
            while c.len() > 1 && c.last().unwrap().is_zero() {
                c.pop();
            }
        };
        trim(&mut f);
        trim(&mut g);
        let is_zero = |c: &Vec<Rat>| c.len() == 1 && c[0].is_zero();
        while !is_zero(&g) {
            // f mod g
            let dg = g.len() - 1;
            let lg = g[dg].clone();
            while f.len() >= g.len() && !is_zero(&f) {
                let df = f.len() - 1;
                let factor = &f[df] / &lg;
                let shift = df - dg;
                for i in 0..=dg {
                    let sub = &factor * &g[i];
                    f[i + shift] -= sub;
                }
                trim(&mut f);
                if f.iter().all(|c| c.is_zero()) {
                    f = vec![Rat::zero()];
                }
            }
            std::mem::swap(&mut f, &mut g);
        }
        Polynomial::from_dense(v, &f).monic()
    }

    /// Square-free part of a univariate polynomial: f / gcd(f, f').
    pub fn squarefree_univariate(&self, v: &str) -> Polynomial {
        let g = Polynomial::gcd_univariate(self, &self.derivative(v), v);
        if g.is_constant() {
            return self.monic();
        }
        self.div_exact(&g).expect("gcd divides").monic()
    }

    /// All rational roots with the cofactor left after dividing out the
    /// corresponding linear factors. Univariate input.
    fn rational_roots(&self, v: &str) -> (Vec<Rat>, Polynomial) {
        let coeffs = self.dense_coeffs(v);
        // clear denominators
        let mut lcm = BigInt::one();
        for c in &coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let mut f = self.clone();
        let mut roots = Vec::new();
        // trailing coefficient may be zero: roots at 0 handled by content
        let a0 = ints.iter().find(|c| !c.is_zero());
        let an = ints.last();
        let (Some(a0), Some(an)) = (a0, an) else {
            return (roots, f);
        };
        let mut candidates: BTreeSet<Rat> = BTreeSet::new();
        for p in divisors(a0) {
            for q in divisors(an) {
                candidates.insert(Rat::new(p.clone(), q.clone()));
                candidates.insert(Rat::new(-p.clone(), q.clone()));
            }
        }
        for r in candidates {
            loop {
                let val = f
                    .eval_rat(&BTreeMap::from([(v.to_string(), r.clone())]))
                    .expect("univariate eval");
                if !val.is_zero() {
                    break;
                }
                let linear = Polynomial::var(v).sub(&Polynomial::constant(r.clone()));
                f = f.div_exact(&linear).expect("root divides");
                roots.push(r.clone());
                if f.is_constant() {
                    return (roots, f);
                }
            }
        }
        (roots, f)
    }

    /// Structural factor list: monic, deduplicated, square-free where the
    /// factorization is cheap (monomial content, rational roots); anything
    /// deeper stays as a single monic factor. Constants and zero give an
    /// empty list / a marker handled by the caller.
    pub fn structural_factors(&self) -> BTreeSet<Polynomial> {
        let mut out = BTreeSet::new();
        if self.is_zero() || self.is_constant() {
            return out;
        }
        // monomial content: for each variable with min exponent > 0 across all
        // terms, the variable itself is a factor
        let mut f = self.monic();
        let vars = f.variables();
        for v in &vars {
            let min_e = f.terms.keys().map(|m| m.0.get(v).copied().unwrap_or(0)).min().unwrap();
            if min_e > 0 {
                out.insert(Polynomial::var(v));
                let divisor = Polynomial::from_terms([(
                    Monomial(BTreeMap::from([(v.clone(), min_e)])),
                    Rat::one(),
                )]);
                f = f.div_exact(&divisor).expect("content divides");
            }
        }
        if f.is_constant() {
            return out;
        }
        if let Some(v) = f.sole_variable() {
            let sf = f.squarefree_univariate(&v);
            let (roots, rest) = sf.rational_roots(&v);
            for r in roots {
                out.insert(Polynomial::var(&v).sub(&Polynomial::constant(r)));
            }
            if !rest.is_constant() {
                out.insert(rest.monic());
            }
        } else {
            out.insert(f.monic());
        }
        out
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    // candidate roots only matter for small structural polynomials; cap the
    // scan so adversarial inputs cannot stall canonicalization
    let cap = BigInt::from(100_000u32);
    while &d * &d <= n && d <= cap {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &Rat)> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.graded_cmp(a.0));
        for (i, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -(*c).clone() } else { (*c).clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = m
                .0
                .iter()
                .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect::<Vec<_>>()
                .join("*");
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

/// Quotient of two polynomials. Used for ring morphism images, where the
/// denominator is always a unit of the target ring. Equality is decided by
/// cross-multiplication, which is valid because every nonzero structural ring
/// is a domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Laurent {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl Laurent {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Laurent { num, den }
    }

    pub fn zero() -> Self {
        Laurent { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn constant(c: Rat) -> Self {
        Laurent { num: Polynomial::constant(c), den: Polynomial::one() }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Laurent { num: p, den: Polynomial::one() }
    }

    pub fn var(name: &str) -> Self {
        Laurent::from_poly(Polynomial::var(name))
    }

    pub fn inv_var(name: &str) -> Self {
        Laurent { num: Polynomial::one(), den: Polynomial::var(name) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        Laurent::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        Laurent::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn eq_cross(&self, other: &Laurent) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn is_var(&self, name: &str) -> bool {
        self.eq_cross(&Laurent::var(name))
    }

    /// Substitute variable images into both numerator and denominator.
    pub fn substitute(&self, images: &BTreeMap<String, Laurent>) -> Option<Laurent> {
        let n = self.num.substitute(images)?;
        let d = self.den.substitute(images)?;
        if d.is_zero() {
            return None;
        }
        Some(Laurent::new(n.num.mul(&d.den), n.den.mul(&d.num)))
    }
}

impl std::fmt::Display for Laurent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }

    #[test]
    fn arithmetic_basics() {
        let p = x().mul(&x()).sub(&Polynomial::one()); // x^2 - 1
        let q = x().add(&Polynomial::one()); // x + 1
        let d = p.div_exact(&q).unwrap();
        assert_eq!(d, x().sub(&Polynomial::one()));
        assert!(p.div_exact(&x().add(&Polynomial::int(2))).is_none());
    }

    #[test]
    fn gcd_univariate_works() {
        // gcd(x^2 - 1, x^2 - 2x + 1) = x - 1
        let a = x().pow(2).sub(&Polynomial::one());
        let b = x().pow(2).sub(&x().scale(&rat_int(2))).add(&Polynomial::one());
        let g = Polynomial::gcd_univariate(&a, &b, "x");
        assert_eq!(g, x().sub(&Polynomial::one()));
    }

    #[test]
    fn squarefree_strips_multiplicity() {
        let f = x().sub(&Polynomial::one()).pow(3).mul(&x());
        let sf = f.squarefree_univariate("x");
        assert_eq!(sf, x().mul(&x().sub(&Polynomial::one())));
    }

    #[test]
    fn structural_factors_split_products() {
        // x^2 - x = x (x - 1)
        let f = x().pow(2).sub(&x());
        let factors = f.structural_factors();
        let expected: BTreeSet<Polynomial> =
            [x(), x().sub(&Polynomial::one())].into_iter().collect();
        assert_eq!(factors, expected);
    }

    #[test]
    fn structural_factors_keep_irreducible_whole() {
        // x^2 + 1 has no rational roots
        let f = x().pow(2).add(&Polynomial::one());
        let factors = f.structural_factors();
        assert_eq!(factors.len(), 1);
        assert!(factors.contains(&f));
    }

    #[test]
    fn structural_factors_monomial_content() {
        // x*y splits into x and y even though it is multivariate
        let f = x().mul(&Polynomial::var("y"));
        let factors = f.structural_factors();
        let expected: BTreeSet<Polynomial> =
            [x(), Polynomial::var("y")].into_iter().collect();
        assert_eq!(factors, expected);
    }

    #[test]
    fn rational_root_with_denominator() {
        // 2x - 1 has root 1/2
        let f = x().scale(&rat_int(2)).sub(&Polynomial::one());
        let factors = f.structural_factors();
        assert!(factors.contains(&x().sub(&Polynomial::constant(rat(1, 2)))));
    }

    #[test]
    fn laurent_equality_cross_multiplies() {
        // 1/(1/x) == x
        let inv = Laurent::inv_var("x");
        let images = BTreeMap::from([("y".to_string(), inv)]);
        let back = Laurent::inv_var("y").substitute(&images).unwrap();
        assert!(back.is_var("x"));
    }

    #[test]
    fn substitution_composes() {
        // p(x) = x^2 + 1 under x -> 1/t gives (1 + t^2)/t^2
        let p = x().pow(2).add(&Polynomial::one());
        let img = BTreeMap::from([("x".to_string(), Laurent::inv_var("t"))]);
        let l = p.substitute(&img).unwrap();
        let t = Polynomial::var("t");
        let expected = Laurent::new(t.pow(2).add(&Polynomial::one()), t.pow(2));
        assert!(l.eq_cross(&expected));
    }

    #[test]
    fn display_is_readable() {
        let f = x().pow(2).sub(&x());
        assert_eq!(f.to_string(), "x^2 - x");
    }
}
