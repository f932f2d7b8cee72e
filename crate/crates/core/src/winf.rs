//! Closed-form W∞ structure constants and the subalgebras built from them:
//! the abelian tower `H^n`, two Virasoro copies, the Kac-Moody cross
//! brackets, and the 3×3 matrices of the metaplectic one-parameter groups.
//!
//! Sign convention for operators: `[t_nm, t_kl] = −Q({q^n p^m, q^k p^l}_MB)`
//! where `Q` is s-quantization. See [`ORDERED_COMMUTATOR_SIGN`].

use std::fmt::Write as _;

use nalgebra::Matrix3;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::boppdiff::quantum_isp2;
use crate::coeffring::{CoeffError, Coefficient, GaussianRational, HBAR, S, S_PRIME};
use crate::combinatorics::{binomial_g, factorial};
use crate::exprio::{format_coefficient, latex_coefficient};
use crate::ordering::{b_coeff, ordered_product, OrderParameter, OrderingError};
use crate::symcalc::{Symbol, VarPair};
use crate::weylcore::{AlgebraSignature, CanonicalElement, WeylError};

/// Sign `σ` in `[t_nm, t_kl] = σ · Q({q^n p^m, q^k p^l}_MB)`, fixed by the
/// Weyl-algebra oracle.
pub const ORDERED_COMMUTATOR_SIGN: i64 = -1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WinfError {
    #[error("Poisson limit of ({n},{m},{k},{l}) is {got}, expected {expected}")]
    PoissonMismatch { n: u32, m: u32, k: u32, l: u32, got: String, expected: String },
    #[error("the tower starts at n = 1")]
    EmptyTower,
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

fn fact(k: i64) -> Option<BigInt> {
    (k >= 0).then(|| factorial(k as u32))
}

/// `a_{nmkl,rj} = n!m!k!l! / ((n+r−j)!(m−r)!(k−r)!(l+r−j)!)`, zero when any
/// factorial argument is negative.
pub fn a_coeff(n: u32, m: u32, k: u32, l: u32, r: u32, j: u32) -> BigRational {
    let (n, m, k, l, r, j) = (n as i64, m as i64, k as i64, l as i64, r as i64, j as i64);
    let den = [n + r - j, m - r, k - r, l + r - j].into_iter().map(fact).collect::<Option<Vec<_>>>();
    match den {
        None => BigRational::zero(),
        Some(d) => {
            let num: BigInt = [n, m, k, l].into_iter().map(|x| factorial(x as u32)).product();
            BigRational::new(num, d.into_iter().product())
        }
    }
}

/// `f_{srj} = (s⁻)^r (−s⁺)^{j−r} ∓ (s⁻)^{j−r} (−s⁺)^r`; `anti` selects `+`.
pub fn f_factor(s: &OrderParameter, r: u32, j: u32, anti: bool) -> Coefficient {
    assert!(r <= j, "f_factor needs r <= j");
    let sm = s.s_minus();
    let msp = -s.s_plus();
    let a = &sm.pow(r) * &msp.pow(j - r);
    let b = &sm.pow(j - r) * &msp.pow(r);
    if anti {
        &a + &b
    } else {
        &a - &b
    }
}

/// One `j` term of the closed-form expansion, multiplying
/// `q^{n+k−j} p^{m+l−j}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BracketTerm {
    pub j: u32,
    pub q: u32,
    pub p: u32,
    pub coeff: Coefficient,
}

/// Nonzero terms of `Σ_j i^j/j! Σ_r C(j,r) f_{srj} a_{nmkl,rj} q^{n+k−j} p^{m+l−j}`.
pub fn bracket_terms(n: u32, m: u32, k: u32, l: u32, s: &OrderParameter, anti: bool) -> Vec<BracketTerm> {
    let r_max = m.min(k);
    let j_max = n.min(l) + r_max;
    let mut out = Vec::new();
    let mut i_pow = GaussianRational::one();
    for j in 0..=j_max {
        let mut acc = Coefficient::zero_in(s.registry());
        for r in 0..=j.min(r_max) {
            let a = a_coeff(n, m, k, l, r, j);
            if a.is_zero() {
                continue;
            }
            let w = &binomial_g(j, r) * &GaussianRational::from_rational(a);
            acc = &acc + &f_factor(s, r, j, anti).scale(&w);
        }
        let scale = &i_pow * &GaussianRational::from_bigint(factorial(j)).inv().unwrap();
        let acc = acc.scale(&scale);
        if !acc.is_zero() {
            out.push(BracketTerm { j, q: n + k - j, p: m + l - j, coeff: acc });
        }
        i_pow = &i_pow * &GaussianRational::i();
    }
    out
}

fn terms_to_symbol(terms: &[BracketTerm]) -> Symbol {
    Symbol::from_terms(VarPair::Qp, terms.iter().map(|t| ((t.q, t.p), t.coeff.clone())))
}

/// `{q^n p^m, q^k p^l}_MB` from the closed form.
pub fn bracket_closed_form(n: u32, m: u32, k: u32, l: u32, s: &OrderParameter) -> Symbol {
    terms_to_symbol(&bracket_terms(n, m, k, l, s, false))
}

/// The anti-bracket `q^n p^m ⋆ q^k p^l + q^k p^l ⋆ q^n p^m` from the closed form.
pub fn anti_bracket_closed_form(n: u32, m: u32, k: u32, l: u32, s: &OrderParameter) -> Symbol {
    terms_to_symbol(&bracket_terms(n, m, k, l, s, true))
}

/// `[t_nm, t_kl]` expanded in the ordered basis with the oracle sign.
pub fn ordered_commutator_closed_form(
    n: u32,
    m: u32,
    k: u32,
    l: u32,
    s: &OrderParameter,
) -> Result<CanonicalElement, WinfError> {
    let sign = GaussianRational::from_int(ORDERED_COMMUTATOR_SIGN);
    let mut out = CanonicalElement::zero(&AlgebraSignature::weyl());
    for t in bracket_terms(n, m, k, l, s, false) {
        let basis = ordered_product(t.q, t.p, s)?.value;
        out = out.checked_add(&basis.scale(&t.coeff.scale(&sign)))?;
    }
    Ok(out)
}

/// Ordering rules with a dedicated closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialOrder {
    /// `s = 1`
    Standard,
    /// `s = 0`
    Weyl,
    /// `s = −1`
    Antistandard,
}

impl SpecialOrder {
    pub const ALL: [SpecialOrder; 3] = [SpecialOrder::Standard, SpecialOrder::Weyl, SpecialOrder::Antistandard];

    pub fn value(self) -> i64 {
        match self {
            SpecialOrder::Standard => 1,
            SpecialOrder::Weyl => 0,
            SpecialOrder::Antistandard => -1,
        }
    }
}

fn hbar_power(c: GaussianRational, k: u32) -> Coefficient {
    &Coefficient::from_gaussian(c) * &Coefficient::hbar().pow(k)
}

/// The dedicated closed forms of the bracket at `s = 1, 0, −1`:
///
/// * `s = 1`: `Σ_j (−iħ)^j/j! (a_{0j} − a_{jj})`
/// * `s = 0`: `−2 Σ_{j odd} (iħ/2)^j/j! Σ_r C(j,r) (−1)^r a_{rj}`
/// * `s = −1`: `Σ_j (iħ)^j/j! (a_{jj} − a_{0j})`
pub fn special_case_bracket(n: u32, m: u32, k: u32, l: u32, order: SpecialOrder) -> Symbol {
    let i = GaussianRational::i();
    let mut out = Symbol::zero(VarPair::Qp);
    let j_max = n.min(l) + m.min(k);
    for j in 0..=j_max {
        let inv_fact = GaussianRational::from_bigint(factorial(j)).inv().unwrap();
        let g = |a: BigRational| GaussianRational::from_rational(a);
        let weight = match order {
            SpecialOrder::Standard => {
                let unit = (-&i).pow(j);
                &(&unit * &inv_fact) * &g(a_coeff(n, m, k, l, 0, j) - a_coeff(n, m, k, l, j, j))
            }
            SpecialOrder::Antistandard => {
                let unit = i.pow(j);
                &(&unit * &inv_fact) * &g(a_coeff(n, m, k, l, j, j) - a_coeff(n, m, k, l, 0, j))
            }
            SpecialOrder::Weyl => {
                if j % 2 == 0 {
                    continue;
                }
                let unit = (&i * &GaussianRational::ratio(1, 2)).pow(j);
                let mut inner = GaussianRational::zero();
                for r in 0..=j {
                    let sign = GaussianRational::from_int(if r % 2 == 0 { 1 } else { -1 });
                    inner += &(&sign * &binomial_g(j, r)) * &g(a_coeff(n, m, k, l, r, j));
                }
                &(&(&unit * &inv_fact) * &inner) * &GaussianRational::from_int(-2)
            }
        };
        if weight.is_zero() {
            continue;
        }
        out = &out + &Symbol::monomial(VarPair::Qp, n + k - j, m + l - j, hbar_power(weight, j));
    }
    out
}

/// `(mk − nl) q^{n+k−1} p^{m+l−1}`, the classical Poisson bracket of two
/// monomials.
pub fn poisson_expected(n: u32, m: u32, k: u32, l: u32) -> Symbol {
    let c = (m as i64) * (k as i64) - (n as i64) * (l as i64);
    if c == 0 {
        return Symbol::zero(VarPair::Qp);
    }
    Symbol::monomial(VarPair::Qp, n + k - 1, m + l - 1, Coefficient::from_int(c))
}

/// The `(iħ)^1 s^0` part of the formal-s closed form, divided by `iħ`.
/// Errors if it differs from `(mk − nl) q^{n+k−1} p^{m+l−1}`.
pub fn poisson_limit(n: u32, m: u32, k: u32, l: u32) -> Result<Symbol, WinfError> {
    let s = OrderParameter::formal_s();
    let full = bracket_closed_form(n, m, k, l, &s);
    let reg = s.registry();
    let (ih, is, isp) = (reg.index_of(HBAR)?, reg.index_of(S)?, reg.index_of(S_PRIME)?);
    let minus_i = -GaussianRational::i();
    let mut out = Symbol::zero(VarPair::Qp);
    for (&(a, b), c) in full.terms() {
        let part: GaussianRational = c
            .terms()
            .filter(|(e, _)| e[ih] == 1 && e[is] == 0 && e[isp] == 0)
            .fold(GaussianRational::zero(), |acc, (_, g)| &acc + g);
        if !part.is_zero() {
            out = &out + &Symbol::monomial(VarPair::Qp, a, b, Coefficient::from_gaussian(&part * &minus_i));
        }
    }
    let expected = poisson_expected(n, m, k, l);
    if out != expected {
        return Err(WinfError::PoissonMismatch { n, m, k, l, got: out.to_string(), expected: expected.to_string() });
    }
    Ok(out)
}

/// `∏_{j=1}^{n} (x̂ + ĉ(2j−1))` with `x̂ = (q̂p̂ + p̂q̂)/2`, `ĉ = iħ/2`.
pub fn h_tower(n: u32) -> Result<CanonicalElement, WinfError> {
    if n == 0 {
        return Err(WinfError::EmptyTower);
    }
    let sig = AlgebraSignature::weyl();
    let q = CanonicalElement::generator(&sig, "qh")?;
    let p = CanonicalElement::generator(&sig, "ph")?;
    let x = (&(&q * &p) + &(&p * &q)).scale(&Coefficient::ratio(1, 2));
    let c = Coefficient::i_hbar().scale(&GaussianRational::ratio(1, 2));
    let mut acc = CanonicalElement::identity(&sig);
    for j in 1..=n {
        let factor = &x + &CanonicalElement::scalar(&sig, c.scale(&GaussianRational::from_int(2 * j as i64 - 1)));
        acc = acc.multiply(&factor)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VirasoroSide {
    /// `w_{n0} = q^{n+1} p`
    Q,
    /// `w_{0n} = q p^{n+1}`
    P,
}

/// The Virasoro generator `w_{n0}` or `w_{0n}` as a symbol.
pub fn virasoro_generator(side: VirasoroSide, n: u32) -> Symbol {
    match side {
        VirasoroSide::Q => Symbol::qp(n + 1, 1),
        VirasoroSide::P => Symbol::qp(1, n + 1),
    }
}

/// `{w_n, w_k}_MB` from the closed form.
pub fn virasoro_bracket(side: VirasoroSide, n: u32, k: u32, s: &OrderParameter) -> Symbol {
    match side {
        VirasoroSide::Q => bracket_closed_form(n + 1, 1, k + 1, 1, s),
        VirasoroSide::P => bracket_closed_form(1, n + 1, 1, k + 1, s),
    }
}

/// `iħ(k−n) w_{n+k,0}` for the q side, `iħ(n−k) w_{0,n+k}` for the p side.
pub fn virasoro_expected(side: VirasoroSide, n: u32, k: u32) -> Symbol {
    let d = match side {
        VirasoroSide::Q => k as i64 - n as i64,
        VirasoroSide::P => n as i64 - k as i64,
    };
    virasoro_generator(side, n + k).scale(&Coefficient::i_hbar().scale(&GaussianRational::from_int(d)))
}

/// Checks `[ŵ_{n0}, ŵ_{k0}] = −iħ(k−n) ŵ_{n+k,0}` with `ŵ_{n0} = t^(s)_{n+1,1}`
/// (and the p-side mirror) in the Weyl algebra.
pub fn virasoro_operator_holds(side: VirasoroSide, n: u32, k: u32, s: &OrderParameter) -> Result<bool, WinfError> {
    let t = |a: u32| -> Result<CanonicalElement, WinfError> {
        Ok(match side {
            VirasoroSide::Q => ordered_product(a + 1, 1, s)?.value,
            VirasoroSide::P => ordered_product(1, a + 1, s)?.value,
        })
    };
    let d = match side {
        VirasoroSide::Q => k as i64 - n as i64,
        VirasoroSide::P => n as i64 - k as i64,
    };
    let c = Coefficient::i_hbar().scale(&GaussianRational::from_int(ORDERED_COMMUTATOR_SIGN * d));
    Ok(t(n)?.commutator(&t(k)?)? == t(n + k)?.scale(&c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KacMoody {
    /// `{q^n, p^l}`
    QnPl,
    /// `{q^k, H^n}` with `H = qp`
    QkHn,
    /// `{p^k, H^n}`
    PkHn,
}

impl KacMoody {
    pub const ALL: [KacMoody; 3] = [KacMoody::QnPl, KacMoody::QkHn, KacMoody::PkHn];

    /// The two symbols being bracketed for index pair `(a, b)`.
    pub fn operands(self, a: u32, b: u32) -> (Symbol, Symbol) {
        match self {
            KacMoody::QnPl => (Symbol::qp(a, 0), Symbol::qp(0, b)),
            KacMoody::QkHn => (Symbol::qp(a, 0), Symbol::qp(b, b)),
            KacMoody::PkHn => (Symbol::qp(0, a), Symbol::qp(b, b)),
        }
    }
}

/// The Kac-Moody expansions, with `b(j,·,·)` the reordering coefficient:
///
/// * `{q^n, p^l} = Σ_j i^j b(j,n,l) [(−s⁺)^j − (s⁻)^j] q^{n−j} p^{l−j}`
/// * `{q^k, H^n} = Σ_j i^j b(j,k,n) [(−s⁺)^j − (s⁻)^j] q^{n+k−j} p^{n−j}`
/// * `{p^k, H^n} = Σ_j i^j b(j,k,n) [(s⁻)^j − (−s⁺)^j] q^{n−j} p^{n+k−j}`
pub fn kac_moody_bracket(kind: KacMoody, a: u32, b: u32, s: &OrderParameter) -> Result<Symbol, WinfError> {
    let sm = s.s_minus();
    let msp = -s.s_plus();
    let mut out = Symbol::zero(VarPair::Qp);
    let mut i_pow = GaussianRational::one();
    for j in 0..=a.min(b) {
        let diff = match kind {
            KacMoody::QnPl | KacMoody::QkHn => &msp.pow(j) - &sm.pow(j),
            KacMoody::PkHn => &sm.pow(j) - &msp.pow(j),
        };
        let c = diff.scale(&(&i_pow * &b_coeff(j, a, b)?));
        let (qe, pe) = match kind {
            KacMoody::QnPl => (a - j, b - j),
            KacMoody::QkHn => (a + b - j, b - j),
            KacMoody::PkHn => (b - j, a + b - j),
        };
        if !c.is_zero() {
            out = &out + &Symbol::monomial(VarPair::Qp, qe, pe, c);
        }
        i_pow = &i_pow * &GaussianRational::i();
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Metaplectic matrices

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetaGen {
    J,
    B1,
    B2,
    N1,
    N2,
}

impl MetaGen {
    pub const ALL: [MetaGen; 5] = [MetaGen::J, MetaGen::B1, MetaGen::B2, MetaGen::N1, MetaGen::N2];

    pub fn name(self) -> &'static str {
        match self {
            MetaGen::J => "J",
            MetaGen::B1 => "B1",
            MetaGen::B2 => "B2",
            MetaGen::N1 => "N1",
            MetaGen::N2 => "N2",
        }
    }
}

/// A one-parameter group element acting on `(q̂, p̂, Î)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaplecticMatrix {
    pub generator: MetaGen,
    pub param: f64,
    pub entries: Matrix3<f64>,
}

impl MetaplecticMatrix {
    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }

    pub fn bottom_row_is_affine(&self) -> bool {
        self.entries[(2, 0)] == 0.0 && self.entries[(2, 1)] == 0.0 && self.entries[(2, 2)] == 1.0
    }
}

/// `J(θ)`, `B₁(b)`, `B₂(b)`, `N₁(c)`, `N₂(c)` with `ħ` given numerically.
pub fn metaplectic_matrix(gen: MetaGen, param: f64, hbar: f64) -> MetaplecticMatrix {
    let h = param / 2.0;
    let entries = match gen {
        MetaGen::J => Matrix3::new(h.cos(), h.sin(), 0.0, -h.sin(), h.cos(), 0.0, 0.0, 0.0, 1.0),
        MetaGen::B1 => Matrix3::new(h.exp(), 0.0, 0.0, 0.0, (-h).exp(), 0.0, 0.0, 0.0, 1.0),
        MetaGen::B2 => Matrix3::new(h.cosh(), -h.sinh(), 0.0, -h.sinh(), h.cosh(), 0.0, 0.0, 0.0, 1.0),
        MetaGen::N1 => Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, -param * hbar, 0.0, 0.0, 1.0),
        MetaGen::N2 => Matrix3::new(1.0, 0.0, param * hbar, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0),
    };
    MetaplecticMatrix { generator: gen, param, entries }
}

/// Derivative at zero of the one-parameter group, as exact coefficients.
pub fn generator_matrix_exact(gen: MetaGen) -> [[Coefficient; 3]; 3] {
    let z = Coefficient::zero;
    let half = || Coefficient::ratio(1, 2);
    let mhalf = || Coefficient::ratio(-1, 2);
    match gen {
        MetaGen::J => [[z(), half(), z()], [mhalf(), z(), z()], [z(), z(), z()]],
        MetaGen::B1 => [[half(), z(), z()], [z(), mhalf(), z()], [z(), z(), z()]],
        MetaGen::B2 => [[z(), mhalf(), z()], [mhalf(), z(), z()], [z(), z(), z()]],
        MetaGen::N1 => [[z(), z(), z()], [z(), z(), -Coefficient::hbar()], [z(), z(), z()]],
        MetaGen::N2 => [[z(), z(), Coefficient::hbar()], [z(), z(), z()], [z(), z(), z()]],
    }
}

/// Float version of [`generator_matrix_exact`] at a numeric `ħ`.
pub fn generator_matrix(gen: MetaGen, hbar: f64) -> Matrix3<f64> {
    let exact = generator_matrix_exact(gen);
    let mut out = Matrix3::zeros();
    for r in 0..3 {
        for c in 0..3 {
            let v = exact[r][c].substitute(&[(HBAR, GaussianRational::one())]).unwrap().as_constant().unwrap();
            let re: f64 = num_traits::ToPrimitive::to_f64(v.re()).unwrap();
            out[(r, c)] = if exact[r][c].max_degree(HBAR).unwrap().unwrap_or(0) > 0 { re * hbar } else { re };
        }
    }
    out
}

/// `exp(param · A)` for the generator matrix `A`.
pub fn exponentiate(gen: MetaGen, param: f64, hbar: f64) -> Matrix3<f64> {
    (generator_matrix(gen, hbar) * param).exp()
}

/// The Weyl-algebra element generating each one-parameter group.
pub fn quantum_generator(gen: MetaGen) -> CanonicalElement {
    let g = quantum_isp2();
    let name = match gen {
        MetaGen::N1 => "N1",
        MetaGen::N2 => "N2",
        other => other.name(),
    };
    g.get(name).expect("isp(2) slot").clone()
}

/// Checks `i[Ĝ, χ_r] = Σ_c A_rc χ_c` for `χ = (q̂, p̂, Î)` exactly; returns
/// one flag per row.
pub fn first_order_consistency(gen: MetaGen) -> Result<[bool; 3], WinfError> {
    let sig = AlgebraSignature::weyl();
    let chi = [
        CanonicalElement::generator(&sig, "qh")?,
        CanonicalElement::generator(&sig, "ph")?,
        CanonicalElement::identity(&sig),
    ];
    let a = generator_matrix_exact(gen);
    let g = quantum_generator(gen).scale(&Coefficient::i());
    let mut out = [false; 3];
    for r in 0..3 {
        let lhs = g.commutator(&chi[r])?;
        let mut rhs = CanonicalElement::zero(&sig);
        for c in 0..3 {
            rhs = rhs.checked_add(&chi[c].scale(&a[r][c]))?;
        }
        out[r] = lhs == rhs;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Structure tables

pub const TABLE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureEntry {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub l: u32,
    pub terms: Vec<BracketTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureTable {
    pub nmax: u32,
    pub s: OrderParameter,
    pub anti: bool,
    pub entries: Vec<StructureEntry>,
}

/// All entries with indices in `0..=nmax`, in lexicographic `(n,m,k,l)`
/// order. Work is spread over the current rayon pool; the order of the
/// result does not depend on it.
pub fn structure_table(nmax: u32, s: &OrderParameter, anti: bool) -> StructureTable {
    let r = nmax + 1;
    let entries = (0..r.pow(4))
        .into_par_iter()
        .map(|idx| {
            let (n, m, k, l) = (idx / r.pow(3), idx / r.pow(2) % r, idx / r % r, idx % r);
            StructureEntry { n, m, k, l, terms: bracket_terms(n, m, k, l, s, anti) }
        })
        .collect();
    StructureTable { nmax, s: s.clone(), anti, entries }
}

/// Same as [`structure_table`] on a dedicated pool of `jobs` threads.
pub fn structure_table_with_jobs(nmax: u32, s: &OrderParameter, anti: bool, jobs: usize) -> StructureTable {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| structure_table(nmax, s, anti))
}

#[derive(Serialize)]
struct JsonTerm<'a> {
    j: u32,
    q: u32,
    p: u32,
    coefficient: String,
    exact: &'a Coefficient,
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    n: u32,
    m: u32,
    k: u32,
    l: u32,
    terms: Vec<JsonTerm<'a>>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    schema_version: u32,
    kind: &'static str,
    nmax: u32,
    s: String,
    entries: Vec<JsonEntry<'a>>,
}

impl StructureTable {
    fn kind(&self) -> &'static str {
        if self.anti {
            "anti-bracket"
        } else {
            "bracket"
        }
    }

    pub fn to_json(&self) -> String {
        let t = JsonTable {
            schema_version: TABLE_SCHEMA_VERSION,
            kind: self.kind(),
            nmax: self.nmax,
            s: self.s.to_string(),
            entries: self
                .entries
                .iter()
                .map(|e| JsonEntry {
                    n: e.n,
                    m: e.m,
                    k: e.k,
                    l: e.l,
                    terms: e
                        .terms
                        .iter()
                        .map(|t| JsonTerm { j: t.j, q: t.q, p: t.p, coefficient: format_coefficient(&t.coeff), exact: &t.coeff })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&t).expect("table serializes") + "\n"
    }

    /// One row per term; an entry with no terms gets a single zero row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,k,l,j,q_exp,p_exp,coefficient\n");
        for e in &self.entries {
            if e.terms.is_empty() {
                let _ = writeln!(out, "{},{},{},{},0,{},{},0", e.n, e.m, e.k, e.l, e.n + e.k, e.m + e.l);
            }
            for t in &e.terms {
                let _ = writeln!(out, "{},{},{},{},{},{},{},{}", e.n, e.m, e.k, e.l, t.j, t.q, t.p, format_coefficient(&t.coeff));
            }
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let mut out = String::from("\\begin{tabular}{rrrrrl}\n$n$ & $m$ & $k$ & $l$ & $j$ & term \\\\\n\\hline\n");
        let mono = |q: u32, p: u32| {
            let f = |v: &str, e: u32| match e {
                0 => String::new(),
                1 => format!(" {v}"),
                e => format!(" {v}^{{{e}}}"),
            };
            format!("{}{}", f("q", q), f("p", p))
        };
        for e in &self.entries {
            if e.terms.is_empty() {
                let _ = writeln!(out, "{} & {} & {} & {} & 0 & $0$ \\\\", e.n, e.m, e.k, e.l);
            }
            for t in &e.terms {
                let c = latex_coefficient(&t.coeff);
                let c = if t.coeff.len() > 1 || c.starts_with('-') { format!("({c})") } else { c };
                let _ = writeln!(out, "{} & {} & {} & {} & {} & ${}{}$ \\\\", e.n, e.m, e.k, e.l, t.j, c, mono(t.q, t.p));
            }
        }
        out.push_str("\\end{tabular}\n");
        out
    }
}
