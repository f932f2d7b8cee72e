//! Normal-ordered noncommutative polynomials over conjugate generator pairs.
//!
//! An [`AlgebraSignature`] lists pairs `(x_i, y_i)` with `[x_i, y_i] = κ_i`
//! and every other commutator zero. Elements are kept in normal form: within
//! a pair all `x` powers stand left of `y` powers, and pairs appear in
//! signature order. The exponent vector of a term is
//! `(x_1, y_1, x_2, y_2, ...)`.
//!
//! The same kernel houses the Weyl algebra (`qh`, `ph`, κ = iħ) and the
//! polynomial differential operators (`q`, `dq`, κ = −1).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::coeffring::{CoeffError, Coefficient, GaussianRational, Registry};
use crate::combinatorics::contraction_count;

pub const DEFAULT_DEGREE_CAP: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("elements belong to different algebras")]
    SignatureMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("total degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("generator pair `{0}` is not declared self-adjoint")]
    NotSelfAdjoint(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorPair {
    pub x: String,
    pub y: String,
    /// `[x, y]`.
    pub kappa: Coefficient,
    pub self_adjoint: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSignature {
    pairs: Vec<GeneratorPair>,
    registry: Arc<Registry>,
}

impl AlgebraSignature {
    pub fn new(pairs: Vec<GeneratorPair>) -> Result<Arc<Self>, WeylError> {
        let registry = pairs
            .first()
            .map(|p| p.kappa.registry().clone())
            .unwrap_or_else(Registry::standard);
        let mut names: Vec<&str> = Vec::new();
        for p in &pairs {
            if p.kappa.is_zero() {
                return Err(WeylError::InvalidSignature(format!("κ of ({}, {}) is zero", p.x, p.y)));
            }
            if p.kappa.registry() != &registry && **p.kappa.registry() != *registry {
                return Err(CoeffError::RegistryMismatch.into());
            }
            for n in [p.x.as_str(), p.y.as_str()] {
                if names.contains(&n) {
                    return Err(WeylError::InvalidSignature(format!("duplicate generator `{n}`")));
                }
                names.push(n);
            }
        }
        Ok(Arc::new(Self { pairs, registry }))
    }

    /// Heisenberg–Weyl algebra: `[qh, ph] = iħ`.
    pub fn weyl() -> Arc<Self> {
        static WEYL: OnceLock<Arc<AlgebraSignature>> = OnceLock::new();
        WEYL.get_or_init(|| {
            Self::new(vec![GeneratorPair {
                x: "qh".into(),
                y: "ph".into(),
                kappa: Coefficient::i_hbar(),
                self_adjoint: true,
            }])
            .unwrap()
        })
        .clone()
    }

    pub fn pairs(&self) -> &[GeneratorPair] {
        &self.pairs
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn width(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Slot of a generator in the exponent vector.
    pub fn slot(&self, name: &str) -> Option<usize> {
        self.pairs.iter().enumerate().find_map(|(k, p)| {
            if p.x == name {
                Some(2 * k)
            } else if p.y == name {
                Some(2 * k + 1)
            } else {
                None
            }
        })
    }

    pub fn generator_name(&self, slot: usize) -> &str {
        let p = &self.pairs[slot / 2];
        if slot.is_multiple_of(2) {
            &p.x
        } else {
            &p.y
        }
    }
}

fn same_sig(a: &Arc<AlgebraSignature>, b: &Arc<AlgebraSignature>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub type Word = Vec<u32>;

#[derive(Clone)]
pub struct CanonicalElement {
    sig: Arc<AlgebraSignature>,
    terms: BTreeMap<Word, Coefficient>,
}

impl PartialEq for CanonicalElement {
    fn eq(&self, other: &Self) -> bool {
        same_sig(&self.sig, &other.sig) && self.terms == other.terms
    }
}

impl Eq for CanonicalElement {}

impl CanonicalElement {
    pub fn zero(sig: &Arc<AlgebraSignature>) -> Self {
        Self { sig: sig.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(sig: &Arc<AlgebraSignature>, c: Coefficient) -> Self {
        Self::monomial(sig, vec![0; sig.width()], c)
    }

    pub fn identity(sig: &Arc<AlgebraSignature>) -> Self {
        Self::scalar(sig, Coefficient::constant_in(sig.registry(), GaussianRational::one()))
    }

    pub fn monomial(sig: &Arc<AlgebraSignature>, exps: Word, c: Coefficient) -> Self {
        assert_eq!(exps.len(), sig.width(), "exponent vector width");
        let mut out = Self::zero(sig);
        out.add_term(exps, &c);
        out
    }

    pub fn generator(sig: &Arc<AlgebraSignature>, name: &str) -> Result<Self, WeylError> {
        let slot = sig.slot(name).ok_or_else(|| WeylError::UnknownGenerator(name.into()))?;
        let mut e = vec![0; sig.width()];
        e[slot] = 1;
        Ok(Self::monomial(sig, e, Coefficient::constant_in(sig.registry(), GaussianRational::one())))
    }

    /// Builds from raw terms (already normal-ordered exponent vectors).
    pub fn from_terms<I>(sig: &Arc<AlgebraSignature>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Word, Coefficient)>,
    {
        let mut out = Self::zero(sig);
        for (e, c) in terms {
            assert_eq!(e.len(), sig.width(), "exponent vector width");
            out.add_term(e, &c);
        }
        out
    }

    pub fn signature(&self) -> &Arc<AlgebraSignature> {
        &self.sig
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient_of(&self, exps: &[u32]) -> Coefficient {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| Coefficient::zero_in(self.sig.registry()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Word, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), WeylError> {
        if same_sig(&self.sig, &other.sig) {
            Ok(())
        } else {
            Err(WeylError::SignatureMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), &-c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = Self::zero(&self.sig);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), &(x * c));
        }
        out
    }

    pub fn map_coefficients<F>(&self, f: F) -> Result<Self, WeylError>
    where
        F: Fn(&Coefficient) -> Result<Coefficient, CoeffError>,
    {
        let mut out = Self::zero(&self.sig);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c)?);
        }
        Ok(out)
    }

    /// Normal-form product using the closed-form reordering of each pair.
    pub fn multiply(&self, other: &Self) -> Result<Self, WeylError> {
        self.multiply_capped(other, DEFAULT_DEGREE_CAP)
    }

    pub fn multiply_capped(&self, other: &Self, cap: u32) -> Result<Self, WeylError> {
        self.check(other)?;
        let degree = self.total_degree() + other.total_degree();
        if !self.is_zero() && !other.is_zero() && degree > cap {
            return Err(WeylError::DegreeCap { degree, cap });
        }
        let kappas: Vec<Coefficient> = self.sig.pairs.iter().map(|p| -&p.kappa).collect();
        let mut out = Self::zero(&self.sig);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let coeff = ca * cb;
                for (e, c) in monomial_product(ea, eb, &kappas) {
                    out.add_term(e, &(&coeff * &c));
                }
            }
        }
        Ok(out)
    }

    /// Reference product by repeated application of `y x → x y − κ` and
    /// cross-pair swaps. Independent of the closed form in [`multiply`].
    ///
    /// [`multiply`]: CanonicalElement::multiply
    pub fn multiply_rewriting(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        let mut out = Self::zero(&self.sig);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut letters = word_letters(ea);
                letters.extend(word_letters(eb));
                for (e, c) in rewrite_to_normal(&self.sig, letters) {
                    out.add_term(e, &(&(ca * cb) * &c));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self, WeylError> {
        let mut acc = Self::identity(&self.sig);
        for _ in 0..n {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, WeylError> {
        self.multiply(other)?.checked_sub(&other.multiply(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self, WeylError> {
        self.multiply(other)?.checked_add(&other.multiply(self)?)
    }

    /// Hermitian adjoint: reverse every product, conjugate coefficients,
    /// reorder. Needs every pair to be declared self-adjoint.
    pub fn adjoint(&self) -> Result<Self, WeylError> {
        if let Some(p) = self.sig.pairs.iter().find(|p| !p.self_adjoint) {
            return Err(WeylError::NotSelfAdjoint(format!("({}, {})", p.x, p.y)));
        }
        let one = Coefficient::constant_in(self.sig.registry(), GaussianRational::one());
        let mut out = Self::zero(&self.sig);
        for (e, c) in &self.terms {
            // (Π x^a y^b)† = Π y^b x^a since distinct pairs commute
            let mut reversed = Self::identity(&self.sig);
            for k in 0..self.sig.pairs.len() {
                let mut ye = vec![0; self.sig.width()];
                ye[2 * k + 1] = e[2 * k + 1];
                let mut xe = vec![0; self.sig.width()];
                xe[2 * k] = e[2 * k];
                let yx = Self::monomial(&self.sig, ye, one.clone())
                    .multiply_capped(&Self::monomial(&self.sig, xe, one.clone()), u32::MAX)?;
                reversed = reversed.multiply_capped(&yx, u32::MAX)?;
            }
            out = out.checked_add(&reversed.scale(&c.conjugate()))?;
        }
        Ok(out)
    }
}

/// `(x^a y^b)(x^c y^d) = Σ_j C(b,j) C(c,j) j! (−κ)^j x^{a+c−j} y^{b+d−j}`
/// pair by pair; `neg_kappas[k] = −κ_k`.
fn monomial_product(ea: &[u32], eb: &[u32], neg_kappas: &[Coefficient]) -> Vec<(Word, Coefficient)> {
    let registry = neg_kappas[0].registry();
    let mut acc: Vec<(Word, Coefficient)> =
        vec![(Vec::with_capacity(ea.len()), Coefficient::constant_in(registry, GaussianRational::one()))];
    for (k, nk) in neg_kappas.iter().enumerate() {
        let (a, b, c, d) = (ea[2 * k], ea[2 * k + 1], eb[2 * k], eb[2 * k + 1]);
        let mut next = Vec::with_capacity(acc.len() * (b.min(c) as usize + 1));
        for j in 0..=b.min(c) {
            let w = nk.pow(j).scale(&GaussianRational::from_bigint(contraction_count(j, b, c)));
            for (e, coeff) in &acc {
                let mut e = e.clone();
                e.push(a + c - j);
                e.push(b + d - j);
                next.push((e, coeff * &w));
            }
        }
        acc = next;
    }
    acc
}

fn word_letters(e: &[u32]) -> Vec<usize> {
    e.iter()
        .enumerate()
        .flat_map(|(slot, &n)| std::iter::repeat_n(slot, n as usize))
        .collect()
}

fn rewrite_to_normal(sig: &Arc<AlgebraSignature>, letters: Vec<usize>) -> Vec<(Word, Coefficient)> {
    let one = Coefficient::constant_in(sig.registry(), GaussianRational::one());
    let mut pending: BTreeMap<Vec<usize>, Coefficient> = BTreeMap::new();
    pending.insert(letters, one);
    let mut done: Vec<(Word, Coefficient)> = Vec::new();
    while !pending.is_empty() {
        let mut next: BTreeMap<Vec<usize>, Coefficient> = BTreeMap::new();
        let push = |w: Vec<usize>, c: Coefficient, map: &mut BTreeMap<Vec<usize>, Coefficient>| {
            let e = map.entry(w).or_insert_with(|| Coefficient::zero_in(sig.registry()));
            *e = &*e + &c;
        };
        for (w, c) in pending {
            if c.is_zero() {
                continue;
            }
            match w.windows(2).position(|p| p[0] > p[1]) {
                None => {
                    let mut e = vec![0; sig.width()];
                    for &l in &w {
                        e[l] += 1;
                    }
                    done.push((e, c));
                }
                Some(k) => {
                    let (u, v) = (w[k], w[k + 1]);
                    let mut swapped = w.clone();
                    swapped.swap(k, k + 1);
                    push(swapped, c.clone(), &mut next);
                    if u / 2 == v / 2 {
                        // u = y, v = x of the same pair: y x = x y − κ
                        let mut shorter = w[..k].to_vec();
                        shorter.extend_from_slice(&w[k + 2..]);
                        push(shorter, &-&sig.pairs[u / 2].kappa * &c, &mut next);
                    }
                }
            }
        }
        pending = next;
    }
    done
}

impl<'a> Add<&'a CanonicalElement> for &'a CanonicalElement {
    type Output = CanonicalElement;
    fn add(self, o: &CanonicalElement) -> CanonicalElement {
        self.checked_add(o).expect("algebra mismatch")
    }
}

impl<'a> Sub<&'a CanonicalElement> for &'a CanonicalElement {
    type Output = CanonicalElement;
    fn sub(self, o: &CanonicalElement) -> CanonicalElement {
        self.checked_sub(o).expect("algebra mismatch")
    }
}

impl<'a> Mul<&'a CanonicalElement> for &'a CanonicalElement {
    type Output = CanonicalElement;
    fn mul(self, o: &CanonicalElement) -> CanonicalElement {
        self.multiply(o).expect("multiplication failed")
    }
}

impl Neg for &CanonicalElement {
    type Output = CanonicalElement;
    fn neg(self) -> CanonicalElement {
        let mut out = CanonicalElement::zero(&self.sig);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl fmt::Debug for CanonicalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::exprio::format_element(self))
    }
}

impl fmt::Display for CanonicalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::exprio::format_element(self))
    }
}

#[derive(Serialize, Deserialize)]
struct PairRecord {
    x: String,
    y: String,
    kappa: Coefficient,
    self_adjoint: bool,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exps: Vec<u32>,
    coeff: Coefficient,
}

#[derive(Serialize, Deserialize)]
struct ElementRecord {
    signature: Vec<PairRecord>,
    terms: Vec<TermRecord>,
}

impl Serialize for CanonicalElement {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ElementRecord {
            signature: self
                .sig
                .pairs
                .iter()
                .map(|p| PairRecord {
                    x: p.x.clone(),
                    y: p.y.clone(),
                    kappa: p.kappa.clone(),
                    self_adjoint: p.self_adjoint,
                })
                .collect(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRecord { exps: e.clone(), coeff: c.clone() })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CanonicalElement {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rec = ElementRecord::deserialize(de)?;
        let pairs = rec
            .signature
            .into_iter()
            .map(|p| GeneratorPair { x: p.x, y: p.y, kappa: p.kappa, self_adjoint: p.self_adjoint })
            .collect();
        let candidate = AlgebraSignature::new(pairs).map_err(D::Error::custom)?;
        // reuse the shared instance when it matches a built-in algebra
        let sig = [AlgebraSignature::weyl(), crate::boppdiff::diff_qp(), crate::boppdiff::diff_xi_eta()]
            .into_iter()
            .find(|s| **s == *candidate)
            .unwrap_or(candidate);
        let mut out = CanonicalElement::zero(&sig);
        for t in rec.terms {
            if t.exps.len() != sig.width() {
                return Err(D::Error::custom("exponent vector width does not match signature"));
            }
            out.add_term(t.exps, &t.coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qh() -> CanonicalElement {
        CanonicalElement::generator(&AlgebraSignature::weyl(), "qh").unwrap()
    }

    fn ph() -> CanonicalElement {
        CanonicalElement::generator(&AlgebraSignature::weyl(), "ph").unwrap()
    }

    fn scalar(c: Coefficient) -> CanonicalElement {
        CanonicalElement::scalar(&AlgebraSignature::weyl(), c)
    }

    fn weyl_mono(a: u32, b: u32) -> CanonicalElement {
        CanonicalElement::monomial(&AlgebraSignature::weyl(), vec![a, b], Coefficient::one())
    }

    #[test]
    fn p_times_q() {
        assert_eq!(&ph() * &qh(), &weyl_mono(1, 1) - &scalar(Coefficient::i_hbar()));
    }

    #[test]
    fn q_times_q() {
        assert_eq!(&qh() * &qh(), weyl_mono(2, 0));
    }

    #[test]
    fn qp_squared() {
        let qp = weyl_mono(1, 1);
        let expected = &weyl_mono(2, 2) - &weyl_mono(1, 1).scale(&Coefficient::i_hbar());
        assert_eq!(&qp * &qp, expected);
    }

    #[test]
    fn heisenberg_commutator() {
        assert_eq!(qh().commutator(&ph()).unwrap(), scalar(Coefficient::i_hbar()));
        assert!(qh().commutator(&weyl_mono(2, 0)).unwrap().is_zero());
    }

    #[test]
    fn dilation_commutator() {
        // x = (qp + pq)/2, [x, p^k] = iħ k p^k
        let x = (&(&qh() * &ph()) + &(&ph() * &qh())).scale(&Coefficient::ratio(1, 2));
        for k in 0..6u32 {
            let pk = weyl_mono(0, k);
            let expected = pk.scale(&(Coefficient::i_hbar() * Coefficient::from_int(k as i64)));
            assert_eq!(x.commutator(&pk).unwrap(), expected);
        }
    }

    #[test]
    fn adjoint_examples() {
        let qp = weyl_mono(1, 1);
        assert_eq!(qp.adjoint().unwrap(), &qp - &scalar(Coefficient::i_hbar()));
        let h = &weyl_mono(2, 0) + &weyl_mono(0, 2);
        assert_eq!(h.adjoint().unwrap(), h);
        assert_eq!(scalar(Coefficient::i_hbar()).adjoint().unwrap(), scalar(-Coefficient::i_hbar()));
    }

    #[test]
    fn anticommutator_examples() {
        assert_eq!(
            qh().anticommutator(&ph()).unwrap(),
            &weyl_mono(1, 1).scale(&Coefficient::from_int(2)) - &scalar(Coefficient::i_hbar())
        );
        assert_eq!(qh().anticommutator(&qh()).unwrap(), weyl_mono(2, 0).scale(&Coefficient::from_int(2)));
        let a = &weyl_mono(3, 1) + &weyl_mono(0, 2);
        let id = CanonicalElement::identity(&AlgebraSignature::weyl());
        assert_eq!(id.anticommutator(&a).unwrap(), a.scale(&Coefficient::from_int(2)));
    }

    #[test]
    fn closed_form_matches_rewriting_single_pair() {
        for b in 0..=8 {
            for c in 0..=8 {
                for (a, d) in [(0, 0), (2, 1)] {
                    let l = weyl_mono(a, b);
                    let r = weyl_mono(c, d);
                    assert_eq!(l.multiply(&r).unwrap(), l.multiply_rewriting(&r).unwrap(), "({a},{b})·({c},{d})");
                }
            }
        }
    }

    #[test]
    fn two_pair_algebra_with_mixed_kappa() {
        let sig = AlgebraSignature::new(vec![
            GeneratorPair { x: "a".into(), y: "b".into(), kappa: -Coefficient::i_hbar(), self_adjoint: true },
            GeneratorPair { x: "c".into(), y: "d".into(), kappa: Coefficient::i_hbar(), self_adjoint: true },
        ])
        .unwrap();
        let g = |n: &str| CanonicalElement::generator(&sig, n).unwrap();
        assert_eq!(g("a").commutator(&g("b")).unwrap(), CanonicalElement::scalar(&sig, -Coefficient::i_hbar()));
        assert_eq!(g("c").commutator(&g("d")).unwrap(), CanonicalElement::scalar(&sig, Coefficient::i_hbar()));
        assert!(g("a").commutator(&g("d")).unwrap().is_zero());
        assert!(g("b").commutator(&g("c")).unwrap().is_zero());
        let w = &(&g("d") * &g("b")) * &(&g("c") * &g("a"));
        let w2 = (&(&g("d") * &g("b")) * &g("c")).multiply_rewriting(&g("a")).unwrap();
        assert_eq!(w, w2);
    }

    #[test]
    fn errors() {
        let other = crate::boppdiff::diff_qp();
        let dq = CanonicalElement::generator(&other, "dq").unwrap();
        assert_eq!(qh().multiply(&dq), Err(WeylError::SignatureMismatch));
        assert_eq!(dq.adjoint().unwrap_err(), WeylError::NotSelfAdjoint("(q, dq)".into()));
        assert!(CanonicalElement::generator(&AlgebraSignature::weyl(), "zz").is_err());
        let big = weyl_mono(40, 0);
        assert!(matches!(big.multiply(&big), Err(WeylError::DegreeCap { degree: 80, cap: 64 })));
        assert!(AlgebraSignature::new(vec![GeneratorPair {
            x: "a".into(),
            y: "a".into(),
            kappa: Coefficient::one(),
            self_adjoint: true
        }])
        .is_err());
    }

    #[test]
    fn json_round_trip() {
        let e = &weyl_mono(2, 1).scale(&Coefficient::s()) - &scalar(Coefficient::i_hbar());
        let text = serde_json::to_string(&e).unwrap();
        let back: CanonicalElement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        assert!(Arc::ptr_eq(back.signature(), &AlgebraSignature::weyl()));
    }

    fn arb_element(max_deg: u32) -> impl Strategy<Value = CanonicalElement> {
        prop::collection::vec((0..=max_deg, 0..=max_deg, -3i64..4, 0i32..2), 0..4).prop_map(move |ts| {
            CanonicalElement::from_terms(
                &AlgebraSignature::weyl(),
                ts.into_iter().filter(|(a, b, _, _)| a + b <= max_deg).map(|(a, b, c, s)| {
                    let coeff = if s == 1 { Coefficient::from_int(c) * Coefficient::s() } else { Coefficient::from_int(c) };
                    (vec![a, b], coeff)
                }),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn associativity(a in arb_element(2), b in arb_element(2), c in arb_element(2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn jacobi(a in arb_element(3), b in arb_element(3), c in arb_element(3)) {
            let t1 = a.commutator(&b.commutator(&c).unwrap()).unwrap();
            let t2 = b.commutator(&c.commutator(&a).unwrap()).unwrap();
            let t3 = c.commutator(&a.commutator(&b).unwrap()).unwrap();
            prop_assert!((&(&t1 + &t2) + &t3).is_zero());
        }

        #[test]
        fn adjoint_is_involutive_antihomomorphism(a in arb_element(3), b in arb_element(3)) {
            prop_assert_eq!(a.adjoint().unwrap().adjoint().unwrap(), a.clone());
            prop_assert_eq!((&a * &b).adjoint().unwrap(), &b.adjoint().unwrap() * &a.adjoint().unwrap());
        }

        #[test]
        fn term_order_does_not_matter(a in arb_element(3), b in arb_element(3)) {
            let mut rev: Vec<(Word, Coefficient)> = a.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
            rev.reverse();
            let a2 = CanonicalElement::from_terms(&AlgebraSignature::weyl(), rev);
            prop_assert_eq!(&a2 * &b, &a * &b);
        }
    }
}
