//! Polynomial differential operators on phase space, the s-parametrized
//! Bopp operators, the operators `T^(r)_{nm}(s)` and `Γ^(r)_{nm}(s)`, and
//! the isp(2) realizations.
//!
//! A [`DiffOp`] is a [`CanonicalElement`] over the pairs `(q, dq)`,
//! `(p, dp)` (or `(xi, dxi)`, `(eta, deta)`) with `[q, dq] = −1`, written
//! with coordinate multiplications left of derivatives.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::coeffring::{Coefficient, GaussianRational, Registry, HBAR};
use crate::ordering::{ordered_product_of, OrderParameter, OrderingError};
use crate::symcalc::{Symbol, VarPair};
use crate::weylcore::{AlgebraSignature, CanonicalElement, GeneratorPair, WeylError};

pub type DiffOp = CanonicalElement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoppError {
    #[error("operator and symbol live on different phase spaces")]
    VarMismatch,
    #[error("not a differential operator algebra")]
    NotDiffOp,
    #[error("unknown realization `{0}`")]
    UnknownRealization(String),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

fn diff_signature(x: &str, y: &str) -> Arc<AlgebraSignature> {
    let minus_one = Coefficient::from_int(-1);
    AlgebraSignature::new(vec![
        GeneratorPair { x: x.into(), y: format!("d{x}"), kappa: minus_one.clone(), self_adjoint: false },
        GeneratorPair { x: y.into(), y: format!("d{y}"), kappa: minus_one, self_adjoint: false },
    ])
    .unwrap()
}

/// Differential operators on the `(q, p)` phase space.
pub fn diff_qp() -> Arc<AlgebraSignature> {
    static SIG: OnceLock<Arc<AlgebraSignature>> = OnceLock::new();
    SIG.get_or_init(|| diff_signature("q", "p")).clone()
}

/// Differential operators on the `(xi, eta)` phase space.
pub fn diff_xi_eta() -> Arc<AlgebraSignature> {
    static SIG: OnceLock<Arc<AlgebraSignature>> = OnceLock::new();
    SIG.get_or_init(|| diff_signature("xi", "eta")).clone()
}

pub fn diff_signature_for(vars: VarPair) -> Arc<AlgebraSignature> {
    match vars {
        VarPair::Qp => diff_qp(),
        VarPair::XiEta => diff_xi_eta(),
    }
}

fn vars_of(op: &DiffOp) -> Result<VarPair, BoppError> {
    let sig = op.signature();
    if **sig == *diff_qp() {
        Ok(VarPair::Qp)
    } else if **sig == *diff_xi_eta() {
        Ok(VarPair::XiEta)
    } else {
        Err(BoppError::NotDiffOp)
    }
}

/// Applies a differential operator to a polynomial symbol.
pub fn apply(op: &DiffOp, f: &Symbol) -> Result<Symbol, BoppError> {
    if vars_of(op)? != f.vars() {
        return Err(BoppError::VarMismatch);
    }
    let mut out = Symbol::zero(f.vars());
    for (e, c) in op.terms() {
        let d = f.derivative(e[1], e[3]);
        if d.is_zero() {
            continue;
        }
        let mult = Symbol::monomial(f.vars(), e[0], e[2], c.clone());
        out = &out + &(&mult * &d);
    }
    Ok(out)
}

fn gen(sig: &Arc<AlgebraSignature>, name: &str) -> DiffOp {
    CanonicalElement::generator(sig, name).unwrap()
}


#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoppKind {
    QL,
    QR,
    PL,
    PR,
}

/// Which operator basis the Bopp operators represent multiplication on:
/// `D` acts on `(xi, eta)`, `Delta` on `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    D,
    Delta,
}

/// The s-parametrized Bopp operator.
///
/// `Delta`: `Q_L = q − i s⁻ ∂_p`, `Q_R = q + i s⁺ ∂_p`,
/// `P_L = p + i s⁺ ∂_q`, `P_R = p − i s⁻ ∂_q`.
///
/// `D`: `Q_L = −i ∂_ξ − s⁻ η`, `Q_R = −i ∂_ξ + s⁺ η`,
/// `P_L = −i ∂_η + s⁺ ξ`, `P_R = −i ∂_η − s⁻ ξ`.
pub fn bopp(which: BoppKind, basis: Basis, s: &OrderParameter) -> DiffOp {
    let i = Coefficient::i();
    let (sm, sp) = (s.s_minus(), s.s_plus());
    match basis {
        Basis::Delta => {
            let sig = diff_qp();
            let (coord, deriv, w) = match which {
                BoppKind::QL => ("q", "dp", -(&i * &sm)),
                BoppKind::QR => ("q", "dp", &i * &sp),
                BoppKind::PL => ("p", "dq", &i * &sp),
                BoppKind::PR => ("p", "dq", -(&i * &sm)),
            };
            &gen(&sig, coord) + &gen(&sig, deriv).scale(&w)
        }
        Basis::D => {
            let sig = diff_xi_eta();
            let (deriv, coord, w) = match which {
                BoppKind::QL => ("dxi", "eta", -sm),
                BoppKind::QR => ("dxi", "eta", sp),
                BoppKind::PL => ("deta", "xi", sp),
                BoppKind::PR => ("deta", "xi", -sm),
            };
            &gen(&sig, deriv).scale(&-i) + &gen(&sig, coord).scale(&w)
        }
    }
}

/// `X^(r)_{nm}(s) − Y^(r')_{nm}(s)` for the left/right Bopp pairs of a basis.
fn left_minus_right(basis: Basis, n: u32, m: u32, r: &OrderParameter, s: &OrderParameter) -> Result<DiffOp, BoppError> {
    let left = ordered_product_of(
        &bopp(BoppKind::QL, basis, s),
        &bopp(BoppKind::PL, basis, s),
        n,
        m,
        &r.negated(),
    )?;
    let right = ordered_product_of(&bopp(BoppKind::QR, basis, s), &bopp(BoppKind::PR, basis, s), n, m, r)?;
    Ok(left.checked_sub(&right)?)
}

/// `Γ^(r)_{nm}(s) = L^(−r)_{Δnm}(s) − R^(r)_{Δnm}(s)` on `(q, p)`.
/// At `r = s`, evaluated at `−s`, it acts as `{q^n p^m, ·}_MB`.
pub fn gamma(n: u32, m: u32, r: &OrderParameter, s: &OrderParameter) -> Result<DiffOp, BoppError> {
    left_minus_right(Basis::Delta, n, m, r, s)
}

/// `T^(r)_{nm}(s) = L^(−r)_{nm}(s) − R^(r)_{nm}(s)` on `(xi, eta)`.
pub fn t_op(n: u32, m: u32, r: &OrderParameter, s: &OrderParameter) -> Result<DiffOp, BoppError> {
    left_minus_right(Basis::D, n, m, r, s)
}

/// Quantum-deformed Hamiltonian vector field of a symbol:
/// the linear extension of `q^n p^m ↦ Γ^(s)_{nm}(−s)`.
pub fn deformed_hvf(f: &Symbol, s: &OrderParameter) -> Result<DiffOp, BoppError> {
    if f.vars() != VarPair::Qp {
        return Err(BoppError::VarMismatch);
    }
    let mut out = CanonicalElement::zero(&diff_qp());
    for (&(n, m), c) in f.terms() {
        out = out.checked_add(&gamma(n, m, s, &s.negated())?.scale(c))?;
    }
    Ok(out)
}

/// Names of the isp(2) generator slots.
pub const ISP2_SLOTS: [&str; 5] = ["N1", "N2", "B1", "B2", "J"];

/// Five isp(2) generators in slot order `(N1, N2, B1, B2, J)`; translation
/// slots may carry other names (e.g. `M1`, `M2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isp2Generators {
    pub names: [&'static str; 5],
    pub elements: [CanonicalElement; 5],
}

impl Isp2Generators {
    pub fn get(&self, name: &str) -> Option<&CanonicalElement> {
        self.names.iter().position(|n| *n == name).map(|k| &self.elements[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &CanonicalElement)> {
        self.names.iter().copied().zip(self.elements.iter())
    }
}

/// One commutation relation `[a, b] = coeff · c` between slots
/// (`c = None` means a central value `coeff`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isp2Relation {
    pub a: usize,
    pub b: usize,
    pub coeff: Coefficient,
    pub rhs: Option<usize>,
}

/// The isp(2) commutation table of the classical realizations.
pub fn isp2_relations() -> Vec<Isp2Relation> {
    let i = Coefficient::i();
    let half_i = i.scale(&GaussianRational::ratio(1, 2));
    let (n1, n2, b1, b2, j) = (0, 1, 2, 3, 4);
    let rel = |a, b, coeff: Coefficient, rhs| Isp2Relation { a, b, coeff, rhs };
    vec![
        rel(n1, n2, Coefficient::zero(), None),
        rel(b1, b2, i.clone(), Some(j)),
        rel(j, b1, -i.clone(), Some(b2)),
        rel(j, b2, i.clone(), Some(b1)),
        rel(n1, b1, -half_i.clone(), Some(n1)),
        rel(n2, j, half_i.clone(), Some(n1)),
        rel(n2, b2, half_i.clone(), Some(n1)),
        rel(n1, j, -half_i.clone(), Some(n2)),
        rel(n2, b1, half_i.clone(), Some(n2)),
        rel(n1, b2, half_i, Some(n2)),
    ]
}

/// The table obeyed by the quantum generators: every relation of
/// [`isp2_relations`] with the opposite sign, except `[N1, N2] = iħ`.
pub fn quantum_isp2_relations() -> Vec<Isp2Relation> {
    isp2_relations()
        .into_iter()
        .map(|r| {
            if r.rhs.is_none() {
                Isp2Relation { coeff: Coefficient::i_hbar(), ..r }
            } else {
                Isp2Relation { coeff: -r.coeff, ..r }
            }
        })
        .collect()
}

/// A violated relation: `(a, b, expected, actual)` rendered as text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCheck {
    pub label: String,
    pub holds: bool,
}

pub fn check_relations(gens: &Isp2Generators, relations: &[Isp2Relation]) -> Result<Vec<RelationCheck>, BoppError> {
    let mut out = Vec::with_capacity(relations.len());
    for r in relations {
        let lhs = gens.elements[r.a].commutator(&gens.elements[r.b])?;
        let rhs = match r.rhs {
            Some(k) => gens.elements[k].scale(&r.coeff),
            None => CanonicalElement::scalar(lhs.signature(), r.coeff.clone()),
        };
        let rhs_name = r.rhs.map(|k| gens.names[k]).unwrap_or("1");
        out.push(RelationCheck {
            label: format!("[{}, {}] = ({})·{}", gens.names[r.a], gens.names[r.b], r.coeff, rhs_name),
            holds: lhs == rhs,
        });
    }
    Ok(out)
}

/// Named classical isp(2) realizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realization {
    /// Hermitian realization on `(xi, eta)` with translations `N1, N2`.
    XiEta,
    /// Same, with translations replaced by multiplications `M1 = −ħη`, `M2 = ħξ`.
    XiEtaM,
    /// `(M1, M2, B1, B2(s), J(s))`.
    XiEtaS,
    /// Realization on `(q, p)`.
    Delta,
    /// `(N_Δ1, N_Δ2, B_Δ1, B_Δ2(s), J_Δ(s))`.
    DeltaS,
}

impl Realization {
    pub const ALL: [Realization; 5] =
        [Realization::XiEta, Realization::XiEtaM, Realization::XiEtaS, Realization::Delta, Realization::DeltaS];

    pub fn name(self) -> &'static str {
        match self {
            Realization::XiEta => "xi_eta",
            Realization::XiEtaM => "xi_eta_m",
            Realization::XiEtaS => "xi_eta_s",
            Realization::Delta => "delta",
            Realization::DeltaS => "delta_s",
        }
    }
}

impl FromStr for Realization {
    type Err = BoppError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Realization::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| BoppError::UnknownRealization(s.to_string()))
    }
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn c_ratio_i(num: i64, den: i64) -> Coefficient {
    Coefficient::from_gaussian(&GaussianRational::ratio(num, den) * &GaussianRational::i())
}

pub fn isp2_realization(which: Realization, s: &OrderParameter) -> Isp2Generators {
    let h = Coefficient::hbar();
    let quarter_sh = (&h * s.value()).scale(&GaussianRational::ratio(1, 4));
    match which {
        Realization::XiEta | Realization::XiEtaM | Realization::XiEtaS => {
            let sig = diff_xi_eta();
            let (xi, eta, dxi, deta) = (gen(&sig, "xi"), gen(&sig, "eta"), gen(&sig, "dxi"), gen(&sig, "deta"));
            let b1 = (&(&xi * &dxi) - &(&eta * &deta)).scale(&c_ratio_i(-1, 2));
            let mut b2 = (&(&xi * &deta) + &(&eta * &dxi)).scale(&c_ratio_i(1, 2));
            let mut j = (&(&xi * &deta) - &(&eta * &dxi)).scale(&c_ratio_i(-1, 2));
            if which == Realization::XiEta {
                let n1 = dxi.scale(&-Coefficient::i());
                let n2 = deta.scale(&-Coefficient::i());
                return Isp2Generators { names: ISP2_SLOTS, elements: [n1, n2, b1, b2, j] };
            }
            let m1 = eta.scale(&-h.clone());
            let m2 = xi.scale(&h);
            if which == Realization::XiEtaS {
                let xi2 = &xi * &xi;
                let eta2 = &eta * &eta;
                b2 = &b2 - &(&xi2 + &eta2).scale(&quarter_sh);
                j = &j + &(&xi2 - &eta2).scale(&quarter_sh);
            }
            Isp2Generators { names: ["M1", "M2", "B1", "B2", "J"], elements: [m1, m2, b1, b2, j] }
        }
        Realization::Delta | Realization::DeltaS => {
            let sig = diff_qp();
            let (q, p, dq, dp) = (gen(&sig, "q"), gen(&sig, "p"), gen(&sig, "dq"), gen(&sig, "dp"));
            let ih = Coefficient::i_hbar();
            let n1 = dp.scale(&-ih.clone());
            let n2 = dq.scale(&ih);
            let b1 = (&(&q * &dq) - &(&p * &dp)).scale(&c_ratio_i(1, 2));
            let mut b2 = (&(&q * &dp) + &(&p * &dq)).scale(&c_ratio_i(-1, 2));
            let mut j = (&(&q * &dp) - &(&p * &dq)).scale(&c_ratio_i(-1, 2));
            if which == Realization::DeltaS {
                let dq2 = &dq * &dq;
                let dp2 = &dp * &dp;
                b2 = &b2 + &(&dq2 + &dp2).scale(&quarter_sh);
                j = &j - &(&dq2 - &dp2).scale(&quarter_sh);
            }
            Isp2Generators { names: ISP2_SLOTS, elements: [n1, n2, b1, b2, j] }
        }
    }
}

/// `1/(4ħ)` as a Laurent coefficient.
fn quarter_over_hbar() -> Coefficient {
    let reg = Registry::standard();
    let mut e = vec![0; reg.len()];
    e[reg.index_of(HBAR).unwrap()] = -1;
    Coefficient::from_terms(&reg, [(e, GaussianRational::ratio(1, 4))])
}

/// `N̂1 = q̂`, `N̂2 = p̂`, `B̂1 = (q̂p̂ + p̂q̂)/4ħ`, `B̂2 = (q̂² − p̂²)/4ħ`,
/// `Ĵ = (q̂² + p̂²)/4ħ` in the Weyl algebra.
pub fn quantum_isp2() -> Isp2Generators {
    let sig = AlgebraSignature::weyl();
    let q = CanonicalElement::generator(&sig, "qh").unwrap();
    let p = CanonicalElement::generator(&sig, "ph").unwrap();
    let k = quarter_over_hbar();
    let b1 = (&(&q * &p) + &(&p * &q)).scale(&k);
    let b2 = (&(&q * &q) - &(&p * &p)).scale(&k);
    let j = (&(&q * &q) + &(&p * &p)).scale(&k);
    Isp2Generators { names: ISP2_SLOTS, elements: [q, p, b1, b2, j] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::moyal;

    fn op(s: &str) -> DiffOp {
        crate::exprio::parse_diffop(s).unwrap()
    }

    #[test]
    fn delta_bopp_commutators() {
        let s = OrderParameter::formal_s();
        let ql = bopp(BoppKind::QL, Basis::Delta, &s);
        let pl = bopp(BoppKind::PL, Basis::Delta, &s);
        let qr = bopp(BoppKind::QR, Basis::Delta, &s);
        let pr = bopp(BoppKind::PR, Basis::Delta, &s);
        let sig = diff_qp();
        let ih = Coefficient::i_hbar();
        assert_eq!(ql.commutator(&pl).unwrap(), CanonicalElement::scalar(&sig, -ih.clone()));
        assert_eq!(qr.commutator(&pr).unwrap(), CanonicalElement::scalar(&sig, ih));
        for (a, b) in [(&ql, &qr), (&ql, &pr), (&pl, &qr), (&pl, &pr)] {
            assert!(a.commutator(b).unwrap().is_zero());
        }
    }

    #[test]
    fn d_bopp_commutators() {
        let s = OrderParameter::formal_s();
        let ql = bopp(BoppKind::QL, Basis::D, &s);
        let pl = bopp(BoppKind::PL, Basis::D, &s);
        let qr = bopp(BoppKind::QR, Basis::D, &s);
        let pr = bopp(BoppKind::PR, Basis::D, &s);
        let sig = diff_xi_eta();
        let ih = Coefficient::i_hbar();
        assert_eq!(ql.commutator(&pl).unwrap(), CanonicalElement::scalar(&sig, -ih.clone()));
        assert_eq!(qr.commutator(&pr).unwrap(), CanonicalElement::scalar(&sig, ih));
        for (a, b) in [(&ql, &qr), (&ql, &pr), (&pl, &qr), (&pl, &pr)] {
            assert!(a.commutator(b).unwrap().is_zero());
        }
    }

    #[test]
    fn delta_ql_at_standard_order() {
        assert_eq!(bopp(BoppKind::QL, Basis::Delta, &OrderParameter::int(1)), op("q"));
        assert_eq!(bopp(BoppKind::QL, Basis::Delta, &OrderParameter::formal_s()), op("q - i*(hbar/2)*(1-s)*dp"));
    }

    #[test]
    fn table_one_gamma_and_t() {
        let zero = OrderParameter::int(0);
        let s = OrderParameter::formal_s();
        assert_eq!(gamma(1, 0, &zero, &s).unwrap(), op("-i*hbar*dp"));
        assert_eq!(gamma(2, 0, &zero, &s).unwrap(), op("-2*i*hbar*q*dp + s*hbar^2*dp^2"));
        assert!(gamma(0, 0, &zero, &s).unwrap().is_zero());
        let xe = |t: &str| crate::exprio::parse(t, crate::exprio::Target::DiffOp).unwrap().into_diffop().unwrap();
        assert_eq!(t_op(1, 0, &zero, &s).unwrap(), xe("-hbar*eta"));
        assert_eq!(t_op(2, 0, &zero, &s).unwrap(), xe("2*i*hbar*eta*dxi - s*hbar^2*eta^2"));
        assert!(t_op(0, 0, &zero, &s).unwrap().is_zero());
    }

    #[test]
    fn apply_examples() {
        let s = OrderParameter::formal_s();
        let g = gamma(1, 1, &s, &s.negated()).unwrap();
        let q = Symbol::qp(1, 0);
        assert_eq!(apply(&g, &q).unwrap(), moyal(&Symbol::qp(1, 1), &q, &s).unwrap());
        assert_eq!(apply(&g, &q).unwrap(), Symbol::monomial(VarPair::Qp, 1, 0, Coefficient::i_hbar()));
        assert_eq!(
            apply(&op("-i*hbar*dp"), &Symbol::qp(0, 2)).unwrap(),
            Symbol::monomial(VarPair::Qp, 0, 1, Coefficient::i_hbar().scale(&GaussianRational::from_int(-2)))
        );
        assert!(apply(&g, &Symbol::zero(VarPair::Qp)).unwrap().is_zero());
        let xi = Symbol::monomial(VarPair::XiEta, 1, 0, Coefficient::one());
        assert_eq!(apply(&g, &xi), Err(BoppError::VarMismatch));
    }

    #[test]
    fn composition_matches_action() {
        let a = op("q*dp^2 + s*p*dq");
        let b = op("p^2*dq - i*hbar*dp");
        let f = &Symbol::qp(3, 2) + &Symbol::qp(1, 4);
        let composed = apply(&(&a * &b), &f).unwrap();
        assert_eq!(composed, apply(&a, &apply(&b, &f).unwrap()).unwrap());
    }

    #[test]
    fn gamma_is_moyal() {
        let s = OrderParameter::formal_s();
        for (n, m) in [(0u32, 1u32), (2, 1), (1, 3), (3, 0)] {
            let g = gamma(n, m, &s, &s.negated()).unwrap();
            for (a, b) in [(1u32, 0u32), (2, 2), (0, 3), (3, 1)] {
                let f = Symbol::qp(a, b);
                assert_eq!(apply(&g, &f).unwrap(), moyal(&Symbol::qp(n, m), &f, &s).unwrap());
            }
        }
    }

    #[test]
    fn realizations_obey_isp2() {
        let s = OrderParameter::formal_s();
        for r in Realization::ALL {
            let gens = isp2_realization(r, &s);
            for c in check_relations(&gens, &isp2_relations()).unwrap() {
                assert!(c.holds, "{r}: {}", c.label);
            }
        }
    }

    #[test]
    fn delta_rotation() {
        let j = isp2_realization(Realization::Delta, &OrderParameter::formal_s()).elements[4].clone();
        assert_eq!(j, op("-(1/2)*i*(q*dp - p*dq)"));
        let b2s = isp2_realization(Realization::DeltaS, &OrderParameter::formal_s()).elements[3].clone();
        let b2 = isp2_realization(Realization::Delta, &OrderParameter::formal_s()).elements[3].clone();
        assert_eq!(b2s, &b2 + &op("(s*hbar/4)*(dq^2 + dp^2)"));
    }

    #[test]
    fn quantum_generators() {
        let gens = quantum_isp2();
        for c in check_relations(&gens, &quantum_isp2_relations()).unwrap() {
            assert!(c.holds, "{}", c.label);
        }
        let [n1, n2, b1, b2, j] = &gens.elements;
        let i = Coefficient::i();
        assert_eq!(j.commutator(b1).unwrap(), b2.scale(&i));
        assert_eq!(b1.commutator(b2).unwrap(), j.scale(&-i.clone()));
        assert_eq!(n1.commutator(n2).unwrap(), CanonicalElement::scalar(n1.signature(), Coefficient::i_hbar()));
    }

    #[test]
    fn unknown_realization() {
        assert_eq!("nope".parse::<Realization>(), Err(BoppError::UnknownRealization("nope".into())));
        assert_eq!("delta_s".parse::<Realization>().unwrap(), Realization::DeltaS);
    }
}
