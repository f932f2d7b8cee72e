//! Verification suites: each runs a family of exact identities over an
//! index range and reports pass/fail per identity with the offending
//! indices.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::boppdiff::{
    self, apply, bopp, check_relations, deformed_hvf, gamma, isp2_realization, isp2_relations, quantum_isp2,
    quantum_isp2_relations, t_op, Basis, BoppKind, Realization,
};
use crate::coeffring::{Coefficient, GaussianRational, S};
use crate::exprio::{parse_diffop, parse_weyl};
use crate::ordering::{dequantize, hermitize, ordered_product, quantize, OrderParameter};
use crate::symcalc::{anti_moyal, moyal, star, Symbol, VarPair};
use crate::weylcore::{AlgebraSignature, CanonicalElement};
use crate::winf::{
    anti_bracket_closed_form, bracket_closed_form, bracket_terms, exponentiate, first_order_consistency, h_tower,
    kac_moody_bracket, metaplectic_matrix, ordered_commutator_closed_form, poisson_limit, special_case_bracket,
    virasoro_bracket, virasoro_expected, virasoro_generator, virasoro_operator_holds, KacMoody, MetaGen, SpecialOrder,
    VirasoroSide,
};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Jacobi,
    Homomorphism,
    Isp2,
    Bopp,
    GammaClosure,
    Virasoro,
    KacMoody,
    HTower,
    Hermiticity,
    Metaplectic,
    Table1,
    ClosedForm,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Jacobi,
        Suite::Homomorphism,
        Suite::Isp2,
        Suite::Bopp,
        Suite::GammaClosure,
        Suite::Virasoro,
        Suite::KacMoody,
        Suite::HTower,
        Suite::Hermiticity,
        Suite::Metaplectic,
        Suite::Table1,
        Suite::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Jacobi => "jacobi",
            Suite::Homomorphism => "homomorphism",
            Suite::Isp2 => "isp2",
            Suite::Bopp => "bopp",
            Suite::GammaClosure => "gamma-closure",
            Suite::Virasoro => "virasoro",
            Suite::KacMoody => "kac-moody",
            Suite::HTower => "h-tower",
            Suite::Hermiticity => "hermiticity",
            Suite::Metaplectic => "metaplectic",
            Suite::Table1 => "table1",
            Suite::ClosedForm => "closed-form",
        }
    }

    /// Index bound used when none is given.
    pub fn default_nmax(self) -> u32 {
        match self {
            Suite::Jacobi => 5,
            Suite::Homomorphism => 6,
            Suite::Bopp | Suite::GammaClosure | Suite::ClosedForm => 4,
            Suite::Virasoro | Suite::KacMoody => 6,
            Suite::HTower => 8,
            Suite::Hermiticity => 5,
            Suite::Isp2 | Suite::Metaplectic | Suite::Table1 => 0,
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite `{s}` (known: {})", names.join(", "))
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub nmax: Option<u32>,
    pub seed: u64,
    pub s: OrderParameter,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { nmax: None, seed: DEFAULT_SEED, s: OrderParameter::formal_s() }
    }
}

/// One identity checked over a set of cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub identity: String,
    pub cases: usize,
    /// `(indices, detail)` for every failing case.
    pub failures: Vec<(String, String)>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "PASS  {} ({} cases)", self.identity, self.cases)
        } else {
            write!(f, "FAIL  {} ({} of {} cases failed)", self.identity, self.failures.len(), self.cases)?;
            for (idx, detail) in self.failures.iter().take(5) {
                write!(f, "\n      at {idx}: {detail}")?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        if failed == 0 {
            write!(f, "{}: all {} identities verified", self.suite, self.checks.len())
        } else {
            write!(f, "{}: {failed} of {} identities failed", self.suite, self.checks.len())
        }
    }
}

/// Outcome of a single case: `Ok(None)` passes, `Ok(Some(d))` fails with
/// detail `d`, `Err` is a computation error (also a failure).
type Outcome = Result<Option<String>, String>;

fn expect_eq<T: PartialEq + fmt::Display>(got: &T, want: &T) -> Outcome {
    Ok((got != want).then(|| format!("got {got}, expected {want}")))
}

fn family<T, L, F>(identity: impl Into<String>, items: &[T], label: L, test: F) -> Check
where
    T: Sync,
    L: Fn(&T) -> String + Sync,
    F: Fn(&T) -> Outcome + Sync,
{
    let failures: Vec<(String, String)> = items
        .par_iter()
        .filter_map(|it| match test(it) {
            Ok(None) => None,
            Ok(Some(d)) => Some((label(it), d)),
            Err(e) => Some((label(it), format!("error: {e}"))),
        })
        .collect();
    Check { identity: identity.into(), cases: items.len(), failures }
}

fn single(identity: impl Into<String>, outcome: Outcome) -> Check {
    family(identity, &[()], |_| String::from("-"), |_| outcome.clone())
}

/// Exponent pairs `(a, b)` with `a + b ≤ d`.
pub fn monomials(d: u32) -> Vec<(u32, u32)> {
    (0..=d).flat_map(|a| (0..=d - a).map(move |b| (a, b))).collect()
}

/// Monomial pairs with total degree `≤ d`.
pub fn monomial_pairs(d: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for (n, m) in monomials(d) {
        for (k, l) in monomials(d - n - m) {
            out.push([n, m, k, l]);
        }
    }
    out
}

fn box_range(nmax: u32) -> Vec<[u32; 4]> {
    let r = nmax + 1;
    (0..r.pow(4)).map(|x| [x / r.pow(3), x / r.pow(2) % r, x / r % r, x % r]).collect()
}

fn quad(x: &[u32; 4]) -> String {
    format!("(n,m,k,l)=({},{},{},{})", x[0], x[1], x[2], x[3])
}

fn random_symbol(rng: &mut ChaCha8Rng, maxdeg: u32) -> Symbol {
    let terms = rng.random_range(1..=3);
    let mut out = Symbol::zero(VarPair::Qp);
    for _ in 0..terms {
        let a = rng.random_range(0..=maxdeg);
        let b = rng.random_range(0..=maxdeg - a);
        let c = GaussianRational::new(
            num_rational::BigRational::new(rng.random_range(-5i64..=5).into(), rng.random_range(1i64..=3).into()),
            num_rational::BigRational::new(rng.random_range(-5i64..=5).into(), rng.random_range(1i64..=3).into()),
        );
        out = &out + &Symbol::monomial(VarPair::Qp, a, b, Coefficient::from_gaussian(c));
    }
    out
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Report {
    let nmax = cfg.nmax.unwrap_or_else(|| suite.default_nmax());
    let s = &cfg.s;
    let checks = match suite {
        Suite::Jacobi => jacobi(nmax, s, cfg.seed),
        Suite::Homomorphism => homomorphism(nmax, s, cfg.seed),
        Suite::Isp2 => isp2(s),
        Suite::Bopp => bopp_suite(nmax, s),
        Suite::GammaClosure => gamma_closure(nmax, 4, s),
        Suite::Virasoro => virasoro(nmax, s),
        Suite::KacMoody => kac_moody(nmax, s),
        Suite::HTower => htower(nmax.max(1), s),
        Suite::Hermiticity => hermiticity(nmax, s, cfg.seed),
        Suite::Metaplectic => metaplectic(cfg.seed, 100),
        Suite::Table1 => table1(),
        Suite::ClosedForm => closed_form(nmax, s),
    };
    Report { suite, checks }
}

// ---------------------------------------------------------------------------

/// Moyal Jacobi identity on all ordered monomial triples of total degree
/// `≤ d`, plus random polynomial triples.
pub fn jacobi(d: u32, s: &OrderParameter, seed: u64) -> Vec<Check> {
    let mut triples = Vec::new();
    for (a, b) in monomials(d) {
        for (c, e) in monomials(d - a - b) {
            for (g, h) in monomials(d - a - b - c - e) {
                triples.push([a, b, c, e, g, h]);
            }
        }
    }
    let jac = |f: &Symbol, g: &Symbol, h: &Symbol| -> Outcome {
        let t1 = moyal(f, &moyal(g, h, s).map_err(|e| e.to_string())?, s).map_err(|e| e.to_string())?;
        let t2 = moyal(g, &moyal(h, f, s).map_err(|e| e.to_string())?, s).map_err(|e| e.to_string())?;
        let t3 = moyal(h, &moyal(f, g, s).map_err(|e| e.to_string())?, s).map_err(|e| e.to_string())?;
        let sum = &(&t1 + &t2) + &t3;
        Ok((!sum.is_zero()).then(|| format!("sum is {sum}")))
    };
    let mono = family(
        "{f,{g,h}} + {g,{h,f}} + {h,{f,g}} = 0 on monomials",
        &triples,
        |t| format!("q^{}p^{}, q^{}p^{}, q^{}p^{}", t[0], t[1], t[2], t[3], t[4], t[5]),
        |t| jac(&Symbol::qp(t[0], t[1]), &Symbol::qp(t[2], t[3]), &Symbol::qp(t[4], t[5])),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deg = (d / 3).max(1);
    let random: Vec<[Symbol; 3]> =
        (0..12).map(|_| [random_symbol(&mut rng, deg), random_symbol(&mut rng, deg), random_symbol(&mut rng, deg)]).collect();
    let poly = family(
        "{f,{g,h}} + {g,{h,f}} + {h,{f,g}} = 0 on random polynomials",
        &random,
        |t| format!("f={}, g={}, h={}", t[0], t[1], t[2]),
        |t| jac(&t[0], &t[1], &t[2]),
    );
    vec![mono, poly]
}

/// Star product against operator products.
pub fn homomorphism(d: u32, s: &OrderParameter, seed: u64) -> Vec<Check> {
    let pairs = monomial_pairs(d);
    let anti = family(
        "dequantize(Q(g)·Q(f)) = f ⋆ g",
        &pairs,
        quad,
        |x| {
            let (f, g) = (Symbol::qp(x[0], x[1]), Symbol::qp(x[2], x[3]));
            let prod = quantize(&g, s).and_then(|qg| Ok(qg.multiply(&quantize(&f, s)?)?)).map_err(|e| e.to_string())?;
            expect_eq(&dequantize(&prod, s).map_err(|e| e.to_string())?, &star(&f, &g, s).map_err(|e| e.to_string())?)
        },
    );
    let comm = family(
        "dequantize([Q(f), Q(g)]) = −{f, g}_MB",
        &pairs,
        quad,
        |x| {
            let (f, g) = (Symbol::qp(x[0], x[1]), Symbol::qp(x[2], x[3]));
            let c = quantize(&f, s)
                .and_then(|qf| Ok(qf.commutator(&quantize(&g, s)?)?))
                .map_err(|e| e.to_string())?;
            let want = moyal(&f, &g, s).map_err(|e| e.to_string())?;
            expect_eq(&dequantize(&c, s).map_err(|e| e.to_string())?, &-&want)
        },
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deg = (d / 2).max(1);
    let random: Vec<(Symbol, Symbol)> = (0..12).map(|_| (random_symbol(&mut rng, deg), random_symbol(&mut rng, deg))).collect();
    let poly = family(
        "dequantize(Q(g)·Q(f)) = f ⋆ g on random polynomials",
        &random,
        |(f, g)| format!("f={f}, g={g}"),
        |(f, g)| {
            let prod = quantize(g, s).and_then(|qg| Ok(qg.multiply(&quantize(f, s)?)?)).map_err(|e| e.to_string())?;
            expect_eq(&dequantize(&prod, s).map_err(|e| e.to_string())?, &star(f, g, s).map_err(|e| e.to_string())?)
        },
    );
    let roundtrip = family(
        "dequantize(quantize(f)) = f",
        &monomials(2 * d),
        |(a, b)| format!("q^{a}p^{b}"),
        |&(a, b)| {
            let f = Symbol::qp(a, b);
            expect_eq(&dequantize(&quantize(&f, s).map_err(|e| e.to_string())?, s).map_err(|e| e.to_string())?, &f)
        },
    );
    vec![anti, comm, poly, roundtrip]
}

pub fn isp2(s: &OrderParameter) -> Vec<Check> {
    let mut out = Vec::new();
    for r in Realization::ALL {
        let gens = isp2_realization(r, s);
        out.extend(relation_checks(&format!("{r}"), check_relations(&gens, &isp2_relations())));
    }
    out.extend(relation_checks("quantum", check_relations(&quantum_isp2(), &quantum_isp2_relations())));
    out
}

fn relation_checks(
    tag: &str,
    rel: Result<Vec<boppdiff::RelationCheck>, boppdiff::BoppError>,
) -> Vec<Check> {
    match rel {
        Ok(rs) => rs
            .into_iter()
            .map(|c| Check {
                identity: format!("{tag}: {}", c.label),
                cases: 1,
                failures: if c.holds { vec![] } else { vec![(tag.to_string(), "commutator differs".into())] },
            })
            .collect(),
        Err(e) => vec![single(format!("{tag}: isp(2) table"), Err(e.to_string()))],
    }
}

pub fn bopp_suite(d: u32, s: &OrderParameter) -> Vec<Check> {
    let mut out = Vec::new();
    for (basis, tag) in [(Basis::Delta, "Δ"), (Basis::D, "D")] {
        let b = |k| bopp(k, basis, s);
        let sig = b(BoppKind::QL).signature().clone();
        let ih = Coefficient::i_hbar();
        let cases = [
            ("[Q_L, P_L] = −iħ", b(BoppKind::QL), b(BoppKind::PL), -ih.clone()),
            ("[Q_R, P_R] = iħ", b(BoppKind::QR), b(BoppKind::PR), ih.clone()),
            ("[Q_L, Q_R] = 0", b(BoppKind::QL), b(BoppKind::QR), Coefficient::zero()),
            ("[Q_L, P_R] = 0", b(BoppKind::QL), b(BoppKind::PR), Coefficient::zero()),
            ("[P_L, Q_R] = 0", b(BoppKind::PL), b(BoppKind::QR), Coefficient::zero()),
            ("[P_L, P_R] = 0", b(BoppKind::PL), b(BoppKind::PR), Coefficient::zero()),
        ];
        for (label, x, y, want) in cases {
            let got = x.commutator(&y).map_err(|e| e.to_string());
            let want = CanonicalElement::scalar(&sig, want);
            out.push(single(format!("{tag}: {label}"), got.and_then(|g| expect_eq(&g, &want))));
        }
    }
    let gens = monomials(d);
    let tests = monomials(d);
    let cases: Vec<((u32, u32), (u32, u32))> = gens.iter().flat_map(|g| tests.iter().map(move |t| (*g, *t))).collect();
    out.push(family(
        "Γ^(s)_{nm}(−s) f = {q^n p^m, f}_MB",
        &cases,
        |((n, m), (a, b))| format!("(n,m)=({n},{m}), f=q^{a}p^{b}"),
        |&((n, m), (a, b))| {
            let g = gamma(n, m, s, &s.negated()).map_err(|e| e.to_string())?;
            let f = Symbol::qp(a, b);
            expect_eq(&apply(&g, &f).map_err(|e| e.to_string())?, &moyal(&Symbol::qp(n, m), &f, s).map_err(|e| e.to_string())?)
        },
    ));
    let sig = AlgebraSignature::weyl();
    let qh = CanonicalElement::generator(&sig, "qh").unwrap();
    let ph = CanonicalElement::generator(&sig, "ph").unwrap();
    for (label, gen, dop) in [
        ("dequantize([p̂, Q(f)]) = −iħ ∂_q f", &ph, "-i*hbar*dq"),
        ("dequantize([q̂, Q(f)]) = iħ ∂_p f", &qh, "i*hbar*dp"),
    ] {
        let dop = parse_diffop(dop).expect("fixed operator");
        out.push(family(
            label,
            &tests,
            |(a, b)| format!("f=q^{a}p^{b}"),
            |&(a, b)| {
                let f = Symbol::qp(a, b);
                let c = quantize(&f, s).map_err(|e| e.to_string())?.commutator(gen).map_err(|e| e.to_string())?;
                let lhs = dequantize(&-&c, s).map_err(|e| e.to_string())?;
                expect_eq(&lhs, &apply(&dop, &f).map_err(|e| e.to_string())?)
            },
        ));
    }
    out
}

/// `[Γ_A, Γ_B] = Γ_{{A,B}_MB}` for generator pairs of total degree `≤ d`,
/// on test monomials of degree `≤ test_deg`.
pub fn gamma_closure(d: u32, test_deg: u32, s: &OrderParameter) -> Vec<Check> {
    let pairs = monomial_pairs(d);
    let tests = monomials(test_deg);
    let ms = s.negated();
    let closure = |x: &[u32; 4]| -> Result<(CanonicalElement, CanonicalElement, Symbol), String> {
        let ga = gamma(x[0], x[1], s, &ms).map_err(|e| e.to_string())?;
        let gb = gamma(x[2], x[3], s, &ms).map_err(|e| e.to_string())?;
        let lhs = ga.commutator(&gb).map_err(|e| e.to_string())?;
        let mb = moyal(&Symbol::qp(x[0], x[1]), &Symbol::qp(x[2], x[3]), s).map_err(|e| e.to_string())?;
        Ok((lhs, deformed_hvf(&mb, s).map_err(|e| e.to_string())?, mb))
    };
    let op = family("[Γ_A, Γ_B] = Γ_{{A,B}_MB} as operators", &pairs, quad, |x| {
        let (lhs, rhs, _) = closure(x)?;
        expect_eq(&lhs, &rhs)
    });
    let applied = family(
        "[Γ_A, Γ_B] f = Γ_{{A,B}_MB} f on test monomials",
        &pairs,
        quad,
        |x| {
            let (lhs, rhs, _) = closure(x)?;
            for &(a, b) in &tests {
                let f = Symbol::qp(a, b);
                let l = apply(&lhs, &f).map_err(|e| e.to_string())?;
                let r = apply(&rhs, &f).map_err(|e| e.to_string())?;
                if l != r {
                    return Ok(Some(format!("on q^{a}p^{b}: {l} vs {r}")));
                }
            }
            Ok(None)
        },
    );
    let central = family(
        "[Γ_A, Γ_B] = −Γ_{dequantize([Â, B̂])}",
        &pairs,
        quad,
        |x| {
            let (lhs, _, _) = closure(x)?;
            let c = ordered_product(x[0], x[1], s)
                .and_then(|a| Ok(a.value.commutator(&ordered_product(x[2], x[3], s)?.value)?))
                .map_err(|e| e.to_string())?;
            let sym = dequantize(&c, s).map_err(|e| e.to_string())?;
            let rhs = deformed_hvf(&-&sym, s).map_err(|e| e.to_string())?;
            expect_eq(&lhs, &rhs)
        },
    );
    vec![op, applied, central]
}

pub fn virasoro(d: u32, s: &OrderParameter) -> Vec<Check> {
    let idx: Vec<(u32, u32)> = (0..=d).flat_map(|n| (0..=d).map(move |k| (n, k))).collect();
    let mut out = Vec::new();
    for (side, tag, rel, op) in [
        (VirasoroSide::Q, "q-side", "{w_n0, w_k0}_MB = iħ(k−n) w_{n+k,0}", "[ŵ_n0, ŵ_k0] = −iħ(k−n) ŵ_{n+k,0}"),
        (VirasoroSide::P, "p-side", "{w_0n, w_0k}_MB = iħ(n−k) w_{0,n+k}", "[ŵ_0n, ŵ_0k] = −iħ(n−k) ŵ_{0,n+k}"),
    ] {
        let label = |(n, k): &(u32, u32)| format!("n={n}, k={k}");
        out.push(family(format!("{tag}: {rel} (closed form)"), &idx, label, |&(n, k)| {
            expect_eq(&virasoro_bracket(side, n, k, s), &virasoro_expected(side, n, k))
        }));
        out.push(family(format!("{tag}: {rel} (star product)"), &idx, label, |&(n, k)| {
            let got = moyal(&virasoro_generator(side, n), &virasoro_generator(side, k), s).map_err(|e| e.to_string())?;
            expect_eq(&got, &virasoro_expected(side, n, k))
        }));
        out.push(family(format!("{tag}: bracket is free of s"), &idx, label, |&(n, k)| {
            let got = moyal(&virasoro_generator(side, n), &virasoro_generator(side, k), s).map_err(|e| e.to_string())?;
            let free = got.terms().all(|(_, c)| c.is_free_of(S).unwrap_or(false));
            Ok((!free).then(|| format!("{got} depends on s")))
        }));
        out.push(family(format!("{tag}: {op}"), &idx, label, |&(n, k)| {
            let ok = virasoro_operator_holds(side, n, k, s).map_err(|e| e.to_string())?;
            Ok((!ok).then(|| "commutator differs".to_string()))
        }));
    }
    out
}

pub fn kac_moody(d: u32, s: &OrderParameter) -> Vec<Check> {
    let idx: Vec<(u32, u32)> = (0..=d).flat_map(|a| (0..=d).map(move |b| (a, b))).collect();
    let label = |(a, b): &(u32, u32)| format!("({a},{b})");
    let mut out: Vec<Check> = KacMoody::ALL
        .into_iter()
        .map(|kind| {
            let name = match kind {
                KacMoody::QnPl => "{q^n, p^l}",
                KacMoody::QkHn => "{q^k, H^n}",
                KacMoody::PkHn => "{p^k, H^n}",
            };
            family(format!("{name} expansion = star-product bracket"), &idx, label, |&(a, b)| {
                let (f, g) = kind.operands(a, b);
                expect_eq(&kac_moody_bracket(kind, a, b, s).map_err(|e| e.to_string())?, &moyal(&f, &g, s).map_err(|e| e.to_string())?)
            })
        })
        .collect();
    for (name, mk) in [
        ("{q^n, q^k} = 0", (|a, b| (Symbol::qp(a, 0), Symbol::qp(b, 0))) as fn(u32, u32) -> (Symbol, Symbol)),
        ("{p^n, p^k} = 0", |a, b| (Symbol::qp(0, a), Symbol::qp(0, b))),
        ("{H^n, H^k} = 0", |a, b| (Symbol::qp(a, a), Symbol::qp(b, b))),
    ] {
        out.push(family(name, &idx, label, |&(a, b)| {
            let (f, g) = mk(a, b);
            let got = moyal(&f, &g, s).map_err(|e| e.to_string())?;
            Ok((!got.is_zero()).then(|| format!("got {got}")))
        }));
    }
    out
}

pub fn htower(d: u32, s: &OrderParameter) -> Vec<Check> {
    let sig = AlgebraSignature::weyl();
    let ns: Vec<u32> = (1..=d).collect();
    let product = family("∏_{j=1}^n (x̂ + ĉ(2j−1)) = q̂^n p̂^n", &ns, |n| format!("n={n}"), |&n| {
        let q = CanonicalElement::generator(&sig, "qh").unwrap().pow(n).map_err(|e| e.to_string())?;
        let p = CanonicalElement::generator(&sig, "ph").unwrap().pow(n).map_err(|e| e.to_string())?;
        expect_eq(&h_tower(n).map_err(|e| e.to_string())?, &q.multiply(&p).map_err(|e| e.to_string())?)
    });
    let pairs: Vec<(u32, u32)> = ns.iter().flat_map(|&n| ns.iter().map(move |&k| (n, k))).collect();
    let label = |(n, k): &(u32, u32)| format!("n={n}, k={k}");
    let comm = family("[Ĥ_n, Ĥ_k] = 0", &pairs, label, |&(n, k)| {
        let c = h_tower(n).map_err(|e| e.to_string())?.commutator(&h_tower(k).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        Ok((!c.is_zero()).then(|| format!("got {c}")))
    });
    let ordered = family("[t^(s)_nn, t^(s)_kk] = 0", &pairs, label, |&(n, k)| {
        let c = ordered_product(n, n, s)
            .and_then(|a| Ok(a.value.commutator(&ordered_product(k, k, s)?.value)?))
            .map_err(|e| e.to_string())?;
        Ok((!c.is_zero()).then(|| format!("got {c}")))
    });
    vec![product, comm, ordered]
}

pub fn hermiticity(d: u32, s: &OrderParameter, seed: u64) -> Vec<Check> {
    let idx: Vec<(u32, u32)> = (0..=d).flat_map(|n| (0..=d).map(move |m| (n, m))).collect();
    let label = |(n, m): &(u32, u32)| format!("n={n}, m={m}");
    let adj = family("adjoint(t^(s)_nm) = t^(−s̄)_nm", &idx, label, |&(n, m)| {
        let t = ordered_product(n, m, s).map_err(|e| e.to_string())?.value;
        let want = ordered_product(n, m, &s.conjugated().negated()).map_err(|e| e.to_string())?.value;
        expect_eq(&t.adjoint().map_err(|e| e.to_string())?, &want)
    });
    let numeric: Vec<OrderParameter> = match s.as_numeric() {
        Some(_) => vec![s.clone()],
        None => vec![
            OrderParameter::int(0),
            OrderParameter::int(1),
            OrderParameter::int(-1),
            OrderParameter::numeric(GaussianRational::ratio(1, 2)),
            OrderParameter::numeric(&GaussianRational::ratio(1, 3) + &(&GaussianRational::ratio(2, 5) * &GaussianRational::i())),
        ],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for sv in &numeric {
        for &(n, m) in &idx {
            let alpha = GaussianRational::new(
                num_rational::BigRational::new(rng.random_range(-4i64..=4).into(), rng.random_range(1i64..=3).into()),
                num_rational::BigRational::new(rng.random_range(-4i64..=4).into(), rng.random_range(1i64..=3).into()),
            );
            cases.push((sv.clone(), n, m, alpha));
        }
    }
    let herm = family(
        "hermitize(n, m, s, α) is self-adjoint",
        &cases,
        |(sv, n, m, a)| format!("s={sv}, n={n}, m={m}, α={a}"),
        |(sv, n, m, a)| {
            let h = hermitize(*n, *m, sv, a).map_err(|e| e.to_string())?;
            expect_eq(&h.adjoint().map_err(|e| e.to_string())?, &h)
        },
    );
    vec![adj, herm]
}

pub const METAPLECTIC_TOLERANCE: f64 = 1e-12;

pub fn metaplectic(seed: u64, samples: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<(f64, f64)> = (0..samples).map(|_| (rng.random_range(-3.0..=3.0), rng.random_range(-3.0..=3.0))).collect();
    let hbar = 1.0;
    let mut out = Vec::new();
    for gen in MetaGen::ALL {
        let g = gen.name();
        let label = |(a, b): &(f64, f64)| format!("a={a:.6}, b={b:.6}");
        out.push(family(format!("{g}(a)·{g}(b) = {g}(a+b)"), &params, label, |&(a, b)| {
            let lhs = metaplectic_matrix(gen, a, hbar).entries * metaplectic_matrix(gen, b, hbar).entries;
            let err = (lhs - metaplectic_matrix(gen, a + b, hbar).entries).abs().max();
            Ok((err >= METAPLECTIC_TOLERANCE).then(|| format!("max deviation {err:e}")))
        }));
        out.push(family(format!("exp(a·A_{g}) = {g}(a)"), &params, label, |&(a, _)| {
            let err = (exponentiate(gen, a, hbar) - metaplectic_matrix(gen, a, hbar).entries).abs().max();
            Ok((err >= METAPLECTIC_TOLERANCE).then(|| format!("max deviation {err:e}")))
        }));
        out.push(family(format!("det {g}(a) = 1, bottom row (0,0,1)"), &params, label, |&(a, _)| {
            let m = metaplectic_matrix(gen, a, hbar);
            let err = (m.determinant() - 1.0).abs();
            Ok((err >= METAPLECTIC_TOLERANCE || !m.bottom_row_is_affine()).then(|| format!("det deviation {err:e}")))
        }));
        out.push(single(
            format!("i[Ĝ_{g}, χ] = A_{g} χ for χ = (q̂, p̂, Î)"),
            first_order_consistency(gen)
                .map_err(|e| e.to_string())
                .map(|rows| rows.iter().any(|ok| !ok).then(|| format!("rows {rows:?}"))),
        ));
    }
    out
}

/// The generators for `n, m ≤ 2`: `t̂^(0)_{nm}`, `T^(0)_{nm}(s)`,
/// `Γ^(0)_{nm}(s)`, all eighteen cells (sixteen nonzero).
pub fn table1() -> Vec<Check> {
    let rows: [((u32, u32), &str, &str, &str); 6] = [
        ((0, 0), "1", "0", "0"),
        ((1, 0), "qh", "-hbar*eta", "-i*hbar*dp"),
        ((0, 1), "ph", "hbar*xi", "i*hbar*dq"),
        ((1, 1), "(1/2)*(qh*ph + ph*qh)", "-i*hbar*(xi*dxi - eta*deta)", "i*hbar*(q*dq - p*dp)"),
        ((2, 0), "qh^2", "2*i*hbar*eta*dxi - s*hbar^2*eta^2", "-2*i*hbar*q*dp + s*hbar^2*dp^2"),
        ((0, 2), "ph^2", "-2*i*hbar*xi*deta + s*hbar^2*xi^2", "2*i*hbar*p*dq - s*hbar^2*dq^2"),
    ];
    let zero = OrderParameter::int(0);
    let s = OrderParameter::formal_s();
    let mut out = Vec::new();
    for ((n, m), t, big_t, g) in rows {
        out.push(single(
            format!("t̂^(0)_{{{n}{m}}} = {t}"),
            ordered_product(n, m, &zero)
                .map_err(|e| e.to_string())
                .and_then(|x| expect_eq(&x.value, &parse_weyl(t).map_err(|e| e.to_string())?)),
        ));
        let want_t = if big_t == "0" {
            Ok(CanonicalElement::zero(&boppdiff::diff_xi_eta()))
        } else {
            crate::exprio::parse(big_t, crate::exprio::Target::DiffOp).map(|v| v.into_diffop().unwrap())
        };
        out.push(single(
            format!("T^(0)_{{{n}{m}}}(s) = {big_t}"),
            t_op(n, m, &zero, &s)
                .map_err(|e| e.to_string())
                .and_then(|x| expect_eq(&x, &want_t.clone().map_err(|e| e.to_string())?)),
        ));
        out.push(single(
            format!("Γ^(0)_{{{n}{m}}}(s) = {g}"),
            gamma(n, m, &zero, &s)
                .map_err(|e| e.to_string())
                .and_then(|x| expect_eq(&x, &parse_diffop(g).map_err(|e| e.to_string())?)),
        ));
    }
    out
}

/// Sign `σ` with `dequantize([Q f, Q g]) = σ {f, g}_MB` over a range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignResolution {
    /// Distinct signs observed on cases with a nonzero bracket.
    pub signs: Vec<i64>,
    /// Cases where neither `+1` nor `−1` works.
    pub unrelated: Vec<[u32; 4]>,
    pub cases: usize,
}

impl SignResolution {
    pub fn consistent(&self) -> Option<i64> {
        (self.signs.len() == 1 && self.unrelated.is_empty()).then(|| self.signs[0])
    }
}

pub fn resolve_commutator_sign(nmax: u32, s: &OrderParameter) -> SignResolution {
    let quads = box_range(nmax);
    let ts: Vec<Vec<CanonicalElement>> = (0..=nmax)
        .into_par_iter()
        .map(|n| (0..=nmax).map(|m| ordered_product(n, m, s).expect("ordered product").value).collect())
        .collect();
    let per: Vec<(Option<i64>, bool)> = quads
        .par_iter()
        .map(|x| {
            let c = ts[x[0] as usize][x[1] as usize].commutator(&ts[x[2] as usize][x[3] as usize]).expect("commutator");
            let got = dequantize(&c, s).expect("dequantize");
            let mb = bracket_closed_form(x[0], x[1], x[2], x[3], s);
            if mb.is_zero() {
                (None, got.is_zero())
            } else if got == mb {
                (Some(1), true)
            } else if got == -&mb {
                (Some(-1), true)
            } else {
                (None, false)
            }
        })
        .collect();
    let mut signs: Vec<i64> = per.iter().filter_map(|p| p.0).collect();
    signs.sort();
    signs.dedup();
    let unrelated = quads.iter().zip(&per).filter(|(_, p)| !p.1).map(|(q, _)| *q).collect();
    SignResolution { signs, unrelated, cases: quads.len() }
}

pub fn closed_form(d: u32, s: &OrderParameter) -> Vec<Check> {
    let quads = box_range(d);
    let mut out = vec![
        family("closed-form bracket = star-product bracket", &quads, quad, |x| {
            let f = Symbol::qp(x[0], x[1]);
            let g = Symbol::qp(x[2], x[3]);
            expect_eq(&bracket_closed_form(x[0], x[1], x[2], x[3], s), &moyal(&f, &g, s).map_err(|e| e.to_string())?)
        }),
        family("closed-form anti-bracket (f⁺) = star anti-bracket", &quads, quad, |x| {
            let f = Symbol::qp(x[0], x[1]);
            let g = Symbol::qp(x[2], x[3]);
            expect_eq(&anti_bracket_closed_form(x[0], x[1], x[2], x[3], s), &anti_moyal(&f, &g, s).map_err(|e| e.to_string())?)
        }),
        family("anti-bracket = dequantize(anticommutator)", &quads, quad, |x| {
            let a = ordered_product(x[0], x[1], s)
                .and_then(|a| Ok(a.value.anticommutator(&ordered_product(x[2], x[3], s)?.value)?))
                .map_err(|e| e.to_string())?;
            expect_eq(&dequantize(&a, s).map_err(|e| e.to_string())?, &anti_bracket_closed_form(x[0], x[1], x[2], x[3], s))
        }),
        family("[t_nm, t_kl] = −Σ_j (…) t_{n+k−j, m+l−j}", &quads, quad, |x| {
            let c = ordered_product(x[0], x[1], s)
                .and_then(|a| Ok(a.value.commutator(&ordered_product(x[2], x[3], s)?.value)?))
                .map_err(|e| e.to_string())?;
            expect_eq(&c, &ordered_commutator_closed_form(x[0], x[1], x[2], x[3], s).map_err(|e| e.to_string())?)
        }),
        family("antisymmetry and vanishing j = 0 term", &quads, quad, |x| {
            let a = bracket_closed_form(x[0], x[1], x[2], x[3], s);
            let b = bracket_closed_form(x[2], x[3], x[0], x[1], s);
            if a != -&b {
                return Ok(Some(format!("{a} vs {b}")));
            }
            Ok(bracket_terms(x[0], x[1], x[2], x[3], s, false).iter().any(|t| t.j == 0).then(|| "j = 0 term present".into()))
        }),
        family("Poisson limit: (iħ)^{-1} bracket → (mk − nl) q^{n+k−1} p^{m+l−1}", &quads, quad, |x| {
            poisson_limit(x[0], x[1], x[2], x[3]).map(|_| None).map_err(|e| e.to_string())
        }),
    ];
    if s.as_numeric().is_none() {
        for order in SpecialOrder::ALL {
            out.push(family(format!("special case s = {} emerges under substitution", order.value()), &quads, quad, |x| {
                let at = bracket_closed_form(x[0], x[1], x[2], x[3], s)
                    .substitute(&[(S, GaussianRational::from_int(order.value()))])
                    .map_err(|e| e.to_string())?;
                expect_eq(&special_case_bracket(x[0], x[1], x[2], x[3], order), &at)
            }));
        }
        out.push(family("s = 0 bracket has only odd-j terms", &quads, quad, |x| {
            let zero = OrderParameter::int(0);
            Ok(bracket_terms(x[0], x[1], x[2], x[3], &zero, false).iter().find(|t| t.j % 2 == 0).map(|t| format!("even j = {}", t.j)))
        }));
    }
    let sign = resolve_commutator_sign(d, s);
    out.push(single(
        "single global sign: dequantize([t_nm, t_kl]) = σ {q^n p^m, q^k p^l}_MB",
        Ok(match sign.consistent() {
            Some(-1) => None,
            Some(other) => Some(format!("sign resolved to {other}, expected −1")),
            None => Some(format!("signs {:?}, unrelated cases {:?}", sign.signs, sign.unrelated)),
        }),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_small() {
        for suite in Suite::ALL {
            let cfg = SuiteConfig { nmax: Some(suite.default_nmax().min(2)), ..Default::default() };
            let r = run_suite(suite, &cfg);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn numeric_orders_pass() {
        for sv in [0, 1, -1] {
            let cfg = SuiteConfig { nmax: Some(2), s: OrderParameter::int(sv), ..Default::default() };
            for suite in [Suite::Jacobi, Suite::Homomorphism, Suite::Isp2, Suite::ClosedForm, Suite::GammaClosure] {
                let r = run_suite(suite, &cfg);
                assert!(r.passed(), "s={sv}: {r}");
            }
        }
    }

    #[test]
    fn suite_names() {
        assert_eq!("gamma-closure".parse::<Suite>().unwrap(), Suite::GammaClosure);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn pair_enumeration() {
        assert_eq!(monomials(2).len(), 6);
        assert_eq!(monomial_pairs(1).len(), 5);
    }

    #[test]
    fn failure_report_names_indices() {
        let c = family("x = 0", &[1u32, 2], |x| format!("x={x}"), |&x| Ok((x == 2).then(|| "nonzero".to_string())));
        assert!(!c.passed());
        assert!(c.to_string().contains("FAIL  x = 0 (1 of 2 cases failed)\n      at x=2: nonzero"));
    }
}
