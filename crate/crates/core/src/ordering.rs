//! s-ordered products `t^(s)_{nm}`, conversion between orderings, and the
//! quantize / dequantize maps between symbols and Weyl-algebra elements.
//!
//! `s = 1` is standard order (`q̂^n p̂^m`), `s = −1` antistandard
//! (`p̂^m q̂^n`) and `s = 0` Weyl (symmetric) order.
//!
//! Quantization reverses products: with the star product of
//! [`crate::symcalc::star`],
//! `dequantize(quantize(g) · quantize(f)) = f ⋆ g`, and consequently
//! `dequantize([quantize f, quantize g]) = −{f, g}_MB`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::coeffring::{CoeffError, Coefficient, GaussianRational, Registry, S, S_PRIME};
use crate::combinatorics::{binomial_g, contraction_count};
use crate::symcalc::{SymError, Symbol, VarPair};
use crate::weylcore::{AlgebraSignature, CanonicalElement, WeylError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderingError {
    #[error("index k = {k} out of range 0..={max}")]
    IndexOutOfRange { k: u32, max: u32 },
    #[error("order parameter must be numeric here, got `{0}`")]
    NotNumeric(String),
    #[error("element is not in the (qh, ph) Weyl algebra")]
    NotWeyl,
    #[error("symbol is not on the (q, p) phase space")]
    NotQp,
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Ordering parameter: an exact coefficient, normally either a formal
/// parameter (`s`, `sp`), a Gaussian rational, or the negative of one.
#[derive(Clone, PartialEq, Eq)]
pub struct OrderParameter {
    value: Coefficient,
}

impl OrderParameter {
    pub fn formal(name: &str) -> Result<Self, CoeffError> {
        Ok(Self { value: Coefficient::param(name)? })
    }

    pub fn formal_s() -> Self {
        Self::formal(S).unwrap()
    }

    pub fn formal_s_prime() -> Self {
        Self::formal(S_PRIME).unwrap()
    }

    pub fn numeric(g: GaussianRational) -> Self {
        Self { value: Coefficient::from_gaussian(g) }
    }

    pub fn int(n: i64) -> Self {
        Self::numeric(GaussianRational::from_int(n))
    }

    pub fn from_coefficient(value: Coefficient) -> Self {
        Self { value }
    }

    pub fn value(&self) -> &Coefficient {
        &self.value
    }

    pub fn registry(&self) -> &Arc<Registry> {
        self.value.registry()
    }

    pub fn as_numeric(&self) -> Option<GaussianRational> {
        self.value.as_constant()
    }

    pub fn negated(&self) -> Self {
        Self { value: -&self.value }
    }

    /// `s̄`; formal parameters are real.
    pub fn conjugated(&self) -> Self {
        Self { value: self.value.conjugate() }
    }

    /// `s⁻ = ħ(1 − s)/2`.
    pub fn s_minus(&self) -> Coefficient {
        let one = Coefficient::constant_in(self.registry(), GaussianRational::one());
        let h = Coefficient::param_in(self.registry(), crate::coeffring::HBAR).expect("registry without hbar");
        (&(&one - &self.value) * &h).scale(&GaussianRational::ratio(1, 2))
    }

    /// `s⁺ = ħ(1 + s)/2`.
    pub fn s_plus(&self) -> Coefficient {
        let one = Coefficient::constant_in(self.registry(), GaussianRational::one());
        let h = Coefficient::param_in(self.registry(), crate::coeffring::HBAR).expect("registry without hbar");
        (&(&one + &self.value) * &h).scale(&GaussianRational::ratio(1, 2))
    }
}

impl FromStr for OrderParameter {
    type Err = CoeffError;

    /// `formal` (the parameter `s`), a registered parameter name, or an
    /// exact number such as `-1`, `1/2`, `1/2+1/3*i`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let t = text.trim();
        if t == "formal" {
            return Ok(Self::formal_s());
        }
        if t.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) && t != "i" {
            return Self::formal(t);
        }
        Ok(Self::numeric(t.parse()?))
    }
}

impl fmt::Display for OrderParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for OrderParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderParameter({})", self.value)
    }
}

/// `b(k, n, m) = C(n,k) C(m,k) k!`.
pub fn b_coeff(k: u32, n: u32, m: u32) -> Result<GaussianRational, OrderingError> {
    let max = n.min(m);
    if k > max {
        return Err(OrderingError::IndexOutOfRange { k, max });
    }
    Ok(GaussianRational::from_bigint(contraction_count(k, n, m)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedBasisElement {
    pub n: u32,
    pub m: u32,
    pub order: OrderParameter,
    pub value: CanonicalElement,
}

fn powers(x: &CanonicalElement, upto: u32) -> Result<Vec<CanonicalElement>, WeylError> {
    let mut out = vec![CanonicalElement::identity(x.signature())];
    for k in 1..=upto {
        out.push(out[k as usize - 1].multiply(x)?);
    }
    Ok(out)
}

/// The s-ordered product `{a^n b^m}_s` of two arbitrary elements:
/// `2^{−n} Σ_j C(n,j) (1+s)^j (1−s)^{n−j} a^j b^m a^{n−j}`.
pub fn ordered_product_of(
    a: &CanonicalElement,
    b: &CanonicalElement,
    n: u32,
    m: u32,
    s: &OrderParameter,
) -> Result<CanonicalElement, OrderingError> {
    let reg = a.signature().registry();
    let one = Coefficient::constant_in(reg, GaussianRational::one());
    let plus = &one + s.value();
    let minus = &one - s.value();
    let ap = powers(a, n)?;
    let bm = b.pow(m)?;
    let half_n = GaussianRational::from_int(2).pow(n).inv().unwrap();
    let mut out = CanonicalElement::zero(a.signature());
    for j in 0..=n {
        let w = (&plus.pow(j) * &minus.pow(n - j)).scale(&(&binomial_g(n, j) * &half_n));
        if w.is_zero() {
            continue;
        }
        let term = ap[j as usize].multiply(&bm)?.multiply(&ap[(n - j) as usize])?;
        out = out.checked_add(&term.scale(&w))?;
    }
    Ok(out)
}

/// The same ordered product expanded over splits of the `b` power:
/// `2^{−m} Σ_k C(m,k) (1−s)^k (1+s)^{m−k} b^k a^n b^{m−k}`.
pub fn ordered_product_of_second_form(
    a: &CanonicalElement,
    b: &CanonicalElement,
    n: u32,
    m: u32,
    s: &OrderParameter,
) -> Result<CanonicalElement, OrderingError> {
    ordered_product_of(b, a, m, n, &s.negated())
}

fn weyl_generators() -> (CanonicalElement, CanonicalElement) {
    let sig = AlgebraSignature::weyl();
    (
        CanonicalElement::generator(&sig, "qh").unwrap(),
        CanonicalElement::generator(&sig, "ph").unwrap(),
    )
}

/// `t^(s)_{nm}` in the Weyl algebra.
pub fn ordered_product(n: u32, m: u32, s: &OrderParameter) -> Result<OrderedBasisElement, OrderingError> {
    let (q, p) = weyl_generators();
    Ok(OrderedBasisElement { n, m, order: s.clone(), value: ordered_product_of(&q, &p, n, m, s)? })
}

/// `t^(s)_{nm}` via the p-split form; used to cross-check [`ordered_product`].
pub fn ordered_product_second_form(n: u32, m: u32, s: &OrderParameter) -> Result<CanonicalElement, OrderingError> {
    let (q, p) = weyl_generators();
    ordered_product_of_second_form(&q, &p, n, m, s)
}

/// Expansion of `t^(s)_{nm}` in the `t^(s')` basis:
/// `{(n−k, m−k): 2^{−k} b(k,n,m) [iħ(s − s')]^k}`.
pub fn convert_order(
    n: u32,
    m: u32,
    s: &OrderParameter,
    s_prime: &OrderParameter,
) -> Result<BTreeMap<(u32, u32), Coefficient>, OrderingError> {
    let reg = s.registry();
    let ih = &Coefficient::constant_in(reg, GaussianRational::i()) * &Coefficient::param_in(reg, crate::coeffring::HBAR)?;
    let delta = s.value().checked_sub(s_prime.value())?;
    let step = &ih * &delta;
    let mut out = BTreeMap::new();
    for k in 0..=n.min(m) {
        let w = &b_coeff(k, n, m)? * &GaussianRational::from_int(2).pow(k).inv().unwrap();
        let c = step.pow(k).scale(&w);
        if !c.is_zero() {
            out.insert((n - k, m - k), c);
        }
    }
    Ok(out)
}

/// Linear extension of `q^n p^m ↦ t^(s)_{nm}`.
pub fn quantize(f: &Symbol, s: &OrderParameter) -> Result<CanonicalElement, OrderingError> {
    if f.vars() != VarPair::Qp {
        return Err(OrderingError::NotQp);
    }
    let (q, p) = weyl_generators();
    let mut out = CanonicalElement::zero(&AlgebraSignature::weyl());
    for (&(n, m), c) in f.terms() {
        out = out.checked_add(&ordered_product_of(&q, &p, n, m, s)?.scale(c))?;
    }
    Ok(out)
}

/// Inverse of [`quantize`]: the normal form is read as the `s = 1` basis
/// and converted term by term.
pub fn dequantize(a: &CanonicalElement, s: &OrderParameter) -> Result<Symbol, OrderingError> {
    if **a.signature() != *AlgebraSignature::weyl() {
        return Err(OrderingError::NotWeyl);
    }
    let standard = OrderParameter::from_coefficient(Coefficient::constant_in(s.registry(), GaussianRational::one()));
    let mut out = Symbol::zero(VarPair::Qp);
    for (e, c) in a.terms() {
        for ((n, m), w) in convert_order(e[0], e[1], &standard, s)? {
            out.add_term((n, m), &(c * &w));
        }
    }
    Ok(out)
}

/// `α t^(s)_{nm} + ᾱ t^(−s̄)_{nm}`, self-adjoint for every numeric `s`.
pub fn hermitize(n: u32, m: u32, s: &OrderParameter, alpha: &GaussianRational) -> Result<CanonicalElement, OrderingError> {
    if s.as_numeric().is_none() {
        return Err(OrderingError::NotNumeric(s.to_string()));
    }
    let a = ordered_product(n, m, s)?.value.scale(&Coefficient::from_gaussian(alpha.clone()));
    let b = ordered_product(n, m, &s.conjugated().negated())?
        .value
        .scale(&Coefficient::from_gaussian(alpha.conj()));
    Ok(a.checked_add(&b)?)
}
