//! Commutative phase-space polynomials and the brackets acting on them.
//!
//! Sign conventions: the Poisson bracket is
//! `{f, g} = ∂_p f ∂_q g − ∂_q f ∂_p g`, so `{q, p} = −1`, and the star
//! product is
//! `f ⋆ g = f exp(i[s⁻ ∂ᴸ_p ∂ᴿ_q − s⁺ ∂ᴸ_q ∂ᴿ_p]) g` with
//! `s∓ = ħ(1 ∓ s)/2`. With these, `{f, g}_MB = iħ {f, g} + O(ħ²)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::coeffring::{CoeffError, Coefficient, GaussianRational};
use crate::combinatorics::{binomial_g, factorial};
use crate::ordering::OrderParameter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("symbols live on different phase spaces ({0} vs {1})")]
    VarMismatch(VarPair, VarPair),
    #[error("operation is only defined on the (q, p) phase space")]
    NotQp,
    #[error("expected a single monomial")]
    NotMonomial,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Which pair of canonical coordinates a symbol is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarPair {
    #[serde(rename = "qp")]
    Qp,
    #[serde(rename = "xi_eta")]
    XiEta,
}

impl VarPair {
    pub fn names(self) -> (&'static str, &'static str) {
        match self {
            VarPair::Qp => ("q", "p"),
            VarPair::XiEta => ("xi", "eta"),
        }
    }
}

impl fmt::Display for VarPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.names();
        write!(f, "({a}, {b})")
    }
}

/// Exponents `(first, second)`, e.g. `(n, m)` for `q^n p^m`.
pub type Exps = (u32, u32);

#[derive(Clone, PartialEq, Eq)]
pub struct Symbol {
    vars: VarPair,
    terms: BTreeMap<Exps, Coefficient>,
}

impl Symbol {
    pub fn zero(vars: VarPair) -> Self {
        Self { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: VarPair, c: Coefficient) -> Self {
        Self::monomial(vars, 0, 0, c)
    }

    pub fn one(vars: VarPair) -> Self {
        Self::constant(vars, Coefficient::one())
    }

    pub fn monomial(vars: VarPair, n: u32, m: u32, c: Coefficient) -> Self {
        let mut s = Self::zero(vars);
        s.add_term((n, m), &c);
        s
    }

    /// `q^n p^m` with unit coefficient.
    pub fn qp(n: u32, m: u32) -> Self {
        Self::monomial(VarPair::Qp, n, m, Coefficient::one())
    }

    pub fn from_terms<I>(vars: VarPair, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exps, Coefficient)>,
    {
        let mut s = Self::zero(vars);
        for (e, c) in terms {
            s.add_term(e, &c);
        }
        s
    }

    pub fn vars(&self) -> VarPair {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient_of(&self, n: u32, m: u32) -> Coefficient {
        self.terms.get(&(n, m)).cloned().unwrap_or_default()
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
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    /// The single term of a monomial.
    pub fn as_monomial(&self) -> Result<(Exps, &Coefficient), SymError> {
        if self.terms.len() != 1 {
            return Err(SymError::NotMonomial);
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Ok((*e, c))
    }

    pub(crate) fn add_term(&mut self, e: Exps, c: &Coefficient) {
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

    fn check(&self, other: &Self) -> Result<(), SymError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(SymError::VarMismatch(self.vars, other.vars))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SymError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SymError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, &-c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SymError> {
        self.check(other)?;
        let mut out = Self::zero(self.vars);
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                out.add_term((a + c, b + d), &(x * y));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, x) in &self.terms {
            out.add_term(*e, &(x * c));
        }
        out
    }

    pub fn map_coefficients<F>(&self, f: F) -> Result<Self, CoeffError>
    where
        F: Fn(&Coefficient) -> Result<Coefficient, CoeffError>,
    {
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            out.add_term(*e, &f(c)?);
        }
        Ok(out)
    }

    pub fn substitute(&self, bindings: &[(&str, GaussianRational)]) -> Result<Self, CoeffError> {
        self.map_coefficients(|c| c.substitute(bindings))
    }

    /// `∂_first^a ∂_second^b`.
    pub fn derivative(&self, a: u32, b: u32) -> Self {
        let mut out = Self::zero(self.vars);
        for (&(n, m), c) in &self.terms {
            if n >= a && m >= b {
                let w = falling(n, a) * falling(m, b);
                out.add_term((n - a, m - b), &c.scale(&w));
            }
        }
        out
    }

    /// Re-tag the variables (same exponents).
    pub fn with_vars(&self, vars: VarPair) -> Self {
        Self { vars, terms: self.terms.clone() }
    }
}

fn falling(n: u32, k: u32) -> GaussianRational {
    GaussianRational::from_bigint(factorial(n) / factorial(n - k))
}

impl<'a> Add<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn add(self, o: &Symbol) -> Symbol {
        self.checked_add(o).expect("phase-space mismatch")
    }
}

impl<'a> Sub<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn sub(self, o: &Symbol) -> Symbol {
        self.checked_sub(o).expect("phase-space mismatch")
    }
}

impl<'a> Mul<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn mul(self, o: &Symbol) -> Symbol {
        self.checked_mul(o).expect("phase-space mismatch")
    }
}

impl Neg for &Symbol {
    type Output = Symbol;
    fn neg(self) -> Symbol {
        self.scale(&Coefficient::from_int(-1))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::exprio::format_symbol(self))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::exprio::format_symbol(self))
    }
}

/// Poisson bracket `∂_p f ∂_q g − ∂_q f ∂_p g`.
pub fn poisson(f: &Symbol, g: &Symbol) -> Result<Symbol, SymError> {
    f.check(g)?;
    let a = f.derivative(0, 1).checked_mul(&g.derivative(1, 0))?;
    let b = f.derivative(1, 0).checked_mul(&g.derivative(0, 1))?;
    a.checked_sub(&b)
}

/// `f ⋆_{(−s)} g` by the terminating bidifferential series.
pub fn star(f: &Symbol, g: &Symbol, s: &OrderParameter) -> Result<Symbol, SymError> {
    f.check(g)?;
    if f.vars != VarPair::Qp {
        return Err(SymError::NotQp);
    }
    let i = Coefficient::i();
    let a = &i * &s.s_minus();
    let b = -(&i * &s.s_plus());
    let jmax = f.total_degree().min(g.total_degree());
    let mut out = Symbol::zero(VarPair::Qp);
    for j in 0..=jmax {
        let inv_jfact = GaussianRational::from_bigint(factorial(j)).inv().unwrap();
        for r in 0..=j {
            // (i s⁻ ∂ᴸp ∂ᴿq)^r (−i s⁺ ∂ᴸq ∂ᴿp)^(j−r)
            let left = f.derivative(j - r, r);
            if left.is_zero() {
                continue;
            }
            let right = g.derivative(r, j - r);
            if right.is_zero() {
                continue;
            }
            let w = (&a.pow(r) * &b.pow(j - r)).scale(&(&binomial_g(j, r) * &inv_jfact));
            out = out.checked_add(&left.checked_mul(&right)?.scale(&w))?;
        }
    }
    Ok(out)
}

/// s-Moyal bracket `f ⋆ g − g ⋆ f`.
pub fn moyal(f: &Symbol, g: &Symbol, s: &OrderParameter) -> Result<Symbol, SymError> {
    star(f, g, s)?.checked_sub(&star(g, f, s)?)
}

/// Anti-bracket `f ⋆ g + g ⋆ f`.
pub fn anti_moyal(f: &Symbol, g: &Symbol, s: &OrderParameter) -> Result<Symbol, SymError> {
    star(f, g, s)?.checked_add(&star(g, f, s)?)
}

/// Hamiltonian vector field of `q^n p^m` applied to `f`:
/// `q^{n−1} p^{m−1} (m q ∂_q − n p ∂_p) f`.
pub fn hvf_apply(n: u32, m: u32, f: &Symbol) -> Symbol {
    let mut out = Symbol::zero(f.vars);
    if m > 0 {
        let t = f.derivative(1, 0).checked_mul(&Symbol::monomial(f.vars, n, m - 1, Coefficient::from_int(m as i64)));
        out = &out + &t.unwrap();
    }
    if n > 0 {
        let t = f.derivative(0, 1).checked_mul(&Symbol::monomial(f.vars, n - 1, m, Coefficient::from_int(n as i64)));
        out = &out - &t.unwrap();
    }
    out
}

/// Degree `n − m` of a monomial `q^n p^m`.
pub fn monomial_degree(n: u32, m: u32) -> i64 {
    n as i64 - m as i64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPart {
    pub degree: i64,
    pub generators: Vec<Symbol>,
}

/// Groups monomials by degree `n − m`, highest degree first; generators keep
/// their input order inside a part.
pub fn grade_decompose(gens: &[Symbol]) -> Result<Vec<GradedPart>, SymError> {
    let mut parts: BTreeMap<std::cmp::Reverse<i64>, Vec<Symbol>> = BTreeMap::new();
    for g in gens {
        let ((n, m), _) = g.as_monomial()?;
        parts.entry(std::cmp::Reverse(monomial_degree(n, m))).or_default().push(g.clone());
    }
    Ok(parts
        .into_iter()
        .map(|(d, generators)| GradedPart { degree: d.0, generators })
        .collect())
}

#[derive(Serialize, Deserialize)]
struct SymTerm {
    exps: [u32; 2],
    coeff: Coefficient,
}

#[derive(Serialize, Deserialize)]
struct SymRecord {
    vars: VarPair,
    terms: Vec<SymTerm>,
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        SymRecord {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| SymTerm { exps: [a, b], coeff: c.clone() })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rec = SymRecord::deserialize(de)?;
        Ok(Symbol::from_terms(rec.vars, rec.terms.into_iter().map(|t| ((t.exps[0], t.exps[1]), t.coeff))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::S;

    fn formal() -> OrderParameter {
        OrderParameter::formal_s()
    }

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson(&Symbol::qp(1, 0), &Symbol::qp(0, 1)).unwrap(), Symbol::constant(VarPair::Qp, c(-1)));
        assert_eq!(
            poisson(&Symbol::qp(2, 0), &Symbol::qp(0, 2)).unwrap(),
            Symbol::monomial(VarPair::Qp, 1, 1, c(-4))
        );
        let f = &Symbol::qp(3, 1) + &Symbol::qp(0, 2);
        assert!(poisson(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn poisson_closed_form() {
        for (n, m, k, l) in [(2u32, 1u32, 1u32, 2u32), (3, 0, 1, 4), (1, 1, 2, 2)] {
            let got = poisson(&Symbol::qp(n, m), &Symbol::qp(k, l)).unwrap();
            let coeff = (m * k) as i64 - (n * l) as i64;
            let expected = if coeff == 0 {
                Symbol::zero(VarPair::Qp)
            } else {
                Symbol::monomial(VarPair::Qp, n + k - 1, m + l - 1, c(coeff))
            };
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn star_q_p() {
        let s = formal();
        let qp = Symbol::qp(1, 1);
        let i = Coefficient::i();
        assert_eq!(
            star(&Symbol::qp(1, 0), &Symbol::qp(0, 1), &s).unwrap(),
            &qp - &Symbol::constant(VarPair::Qp, &i * &s.s_plus())
        );
        assert_eq!(
            star(&Symbol::qp(0, 1), &Symbol::qp(1, 0), &s).unwrap(),
            &qp + &Symbol::constant(VarPair::Qp, &i * &s.s_minus())
        );
    }

    #[test]
    fn star_unit() {
        let f = &Symbol::qp(2, 3) + &Symbol::monomial(VarPair::Qp, 1, 0, Coefficient::s());
        let one = Symbol::one(VarPair::Qp);
        assert_eq!(star(&f, &one, &formal()).unwrap(), f);
        assert_eq!(star(&one, &f, &formal()).unwrap(), f);
    }

    #[test]
    fn star_q2_p2_weyl() {
        let got = star(&Symbol::qp(2, 0), &Symbol::qp(0, 2), &OrderParameter::numeric(GaussianRational::zero())).unwrap();
        let h = Coefficient::hbar();
        let expected = Symbol::from_terms(
            VarPair::Qp,
            [((2, 2), c(1)), ((1, 1), &c(-2) * &(&Coefficient::i() * &h)), ((0, 0), &Coefficient::ratio(-1, 2) * &(&h * &h))],
        );
        assert_eq!(got, expected);
    }

    #[test]
    fn moyal_examples() {
        let s = formal();
        let ih = Coefficient::i_hbar();
        assert_eq!(
            moyal(&Symbol::qp(1, 0), &Symbol::qp(0, 1), &s).unwrap(),
            Symbol::constant(VarPair::Qp, -ih.clone())
        );
        let h = Coefficient::hbar();
        let expected = Symbol::from_terms(
            VarPair::Qp,
            [((1, 1), &c(-4) * &ih), ((0, 0), &c(-2) * &(&(&h * &h) * &Coefficient::s()))],
        );
        assert_eq!(moyal(&Symbol::qp(2, 0), &Symbol::qp(0, 2), &s).unwrap(), expected);
        let f = &Symbol::qp(3, 2) + &Symbol::qp(1, 4);
        assert!(moyal(&f, &f, &s).unwrap().is_zero());
    }

    #[test]
    fn star_needs_qp() {
        let xi = Symbol::monomial(VarPair::XiEta, 1, 0, c(1));
        assert_eq!(star(&xi, &xi, &formal()), Err(SymError::NotQp));
        assert!(matches!(poisson(&xi, &Symbol::qp(1, 0)), Err(SymError::VarMismatch(..))));
    }

    #[test]
    fn hvf_examples() {
        assert_eq!(hvf_apply(1, 1, &Symbol::qp(1, 0)), Symbol::qp(1, 0));
        assert_eq!(hvf_apply(2, 0, &Symbol::qp(0, 1)), Symbol::monomial(VarPair::Qp, 1, 0, c(-2)));
        assert!(hvf_apply(3, 2, &Symbol::one(VarPair::Qp)).is_zero());
    }

    #[test]
    fn hvf_is_poisson() {
        for n in 0..4 {
            for m in 0..4 {
                for (a, b) in [(0u32, 0u32), (1, 0), (2, 3), (4, 1)] {
                    let f = Symbol::qp(a, b);
                    assert_eq!(hvf_apply(n, m, &f), poisson(&Symbol::qp(n, m), &f).unwrap());
                }
            }
        }
    }

    #[test]
    fn hvf_closure() {
        // [v_nm, v_kl] f = v_{ {q^n p^m, q^k p^l} } f, the right side expanded linearly
        let apply_sym = |h: &Symbol, f: &Symbol| poisson(h, f).unwrap();
        for (n, m, k, l) in [(1u32, 0u32, 0u32, 1u32), (2, 1, 1, 2), (3, 0, 0, 2), (1, 1, 2, 0)] {
            let bracket = poisson(&Symbol::qp(n, m), &Symbol::qp(k, l)).unwrap();
            for a in 0..=4u32 {
                for b in 0..=(4 - a) {
                    let f = Symbol::qp(a, b);
                    let lhs = &hvf_apply(n, m, &hvf_apply(k, l, &f)) - &hvf_apply(k, l, &hvf_apply(n, m, &f));
                    assert_eq!(lhs, apply_sym(&bracket, &f));
                }
            }
        }
    }

    #[test]
    fn leibniz() {
        let f = &Symbol::qp(2, 1) + &Symbol::qp(0, 3);
        let g = Symbol::qp(1, 2);
        let h = &Symbol::qp(3, 0) + &Symbol::one(VarPair::Qp);
        let lhs = poisson(&f, &(&g * &h)).unwrap();
        let rhs = &(&poisson(&f, &g).unwrap() * &h) + &(&g * &poisson(&f, &h).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn grading() {
        let parts = grade_decompose(&[Symbol::qp(2, 0), Symbol::qp(1, 1), Symbol::qp(0, 2)]).unwrap();
        assert_eq!(parts.iter().map(|p| p.degree).collect::<Vec<_>>(), vec![2, 0, -2]);
        let parts = grade_decompose(&[Symbol::qp(3, 1)]).unwrap();
        assert_eq!(parts[0].degree, 2);
        assert!(grade_decompose(&[]).unwrap().is_empty());
        assert_eq!(grade_decompose(&[&Symbol::qp(1, 0) + &Symbol::qp(0, 1)]), Err(SymError::NotMonomial));
    }

    #[test]
    fn moyal_respects_degree() {
        let s = formal();
        for (n, m, k, l) in [(3u32, 1u32, 0u32, 2u32), (2, 2, 1, 3), (4, 0, 0, 4)] {
            let d = monomial_degree(n, m) + monomial_degree(k, l);
            let b = moyal(&Symbol::qp(n, m), &Symbol::qp(k, l), &s).unwrap();
            assert!(b.terms().all(|(&(a, c), _)| monomial_degree(a, c) == d));
        }
    }

    #[test]
    fn star_associative_low_degree() {
        let s = formal();
        let mons: Vec<Symbol> = (0..=2).flat_map(|a| (0..=(2 - a)).map(move |b| Symbol::qp(a, b))).collect();
        for f in &mons {
            for g in &mons {
                for h in &mons {
                    let lhs = star(&star(f, g, &s).unwrap(), h, &s).unwrap();
                    let rhs = star(f, &star(g, h, &s).unwrap(), &s).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f = &Symbol::qp(2, 1) + &Symbol::monomial(VarPair::Qp, 0, 0, Coefficient::i_hbar());
        let back: Symbol = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let sub = f.substitute(&[(S, GaussianRational::one())]).unwrap();
        assert_eq!(sub, f);
    }
}
