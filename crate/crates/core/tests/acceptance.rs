//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line per
//! criterion, and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use moyal_core::coeffring::{GaussianRational, S};
use moyal_core::ordering::{dequantize, quantize, OrderParameter};
use moyal_core::symcalc::{moyal, star, Symbol};
use moyal_core::verify::{
    gamma_closure, hermiticity, htower, isp2, jacobi, kac_moody, metaplectic, monomial_pairs, resolve_commutator_sign,
    table1, virasoro, Check, DEFAULT_SEED,
};
use moyal_core::winf::{bracket_closed_form, special_case_bracket, structure_table_with_jobs, SpecialOrder};

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    passed: bool,
    summary: String,
}

fn from_checks(checks: &[Check]) -> Outcome {
    let cases: usize = checks.iter().map(|c| c.cases).sum();
    match checks.iter().find(|c| !c.passed()) {
        None => Outcome { passed: true, summary: format!("{} identities, {cases} cases", checks.len()) },
        Some(c) => {
            let (idx, detail) = &c.failures[0];
            Outcome { passed: false, summary: format!("{} failed at {idx}: {detail}", c.identity) }
        }
    }
}

fn formal() -> OrderParameter {
    OrderParameter::formal_s()
}

fn pair_symbols(x: &[u32; 4]) -> (Symbol, Symbol) {
    (Symbol::qp(x[0], x[1]), Symbol::qp(x[2], x[3]))
}

fn criterion_1() -> Outcome {
    let s = formal();
    let pairs = monomial_pairs(8);
    let results: Vec<(bool, bool)> = pairs
        .par_iter()
        .map(|x| {
            let (f, g) = pair_symbols(x);
            let (qf, qg) = (quantize(&f, &s).unwrap(), quantize(&g, &s).unwrap());
            let fg = star(&f, &g, &s).unwrap();
            let literal = dequantize(&qf.multiply(&qg).unwrap(), &s).unwrap() == fg;
            let reversed = dequantize(&qg.multiply(&qf).unwrap(), &s).unwrap() == fg;
            (literal, reversed)
        })
        .collect();
    let literal_fail: Vec<&[u32; 4]> = pairs.iter().zip(&results).filter(|(_, r)| !r.0).map(|(x, _)| x).collect();
    let reversed_ok = results.iter().all(|r| r.1);
    let note = format!(
        "reversed order dequantize(Q(g)·Q(f)) = f⋆g holds on {}/{} pairs",
        results.iter().filter(|r| r.1).count(),
        pairs.len()
    );
    if literal_fail.is_empty() {
        Outcome { passed: true, summary: format!("{} pairs; {note}", pairs.len()) }
    } else {
        let x = literal_fail[0];
        let (f, g) = pair_symbols(x);
        let got = dequantize(&quantize(&f, &s).unwrap().multiply(&quantize(&g, &s).unwrap()).unwrap(), &s).unwrap();
        Outcome {
            passed: false,
            summary: format!(
                "dequantize(Q(f)·Q(g)) ≠ f⋆g on {}/{} pairs, e.g. f={f}, g={g}: {got} vs {}; {note}{}",
                literal_fail.len(),
                pairs.len(),
                star(&f, &g, &s).unwrap(),
                if reversed_ok { "" } else { " (reversed order also fails)" }
            ),
        }
    }
}

fn criterion_2() -> Outcome {
    let s = formal();
    let r = 7u32;
    let quads: Vec<[u32; 4]> = (0..r.pow(4)).map(|x| [x / r.pow(3), x / r.pow(2) % r, x / r % r, x % r]).collect();
    let bad: Vec<String> = quads
        .par_iter()
        .filter_map(|x| {
            let cf = bracket_closed_form(x[0], x[1], x[2], x[3], &s);
            let (f, g) = pair_symbols(x);
            if cf != moyal(&f, &g, &s).unwrap() {
                return Some(format!("{x:?}: closed form differs from star bracket"));
            }
            for order in SpecialOrder::ALL {
                let at = cf.substitute(&[(S, GaussianRational::from_int(order.value()))]).unwrap();
                if special_case_bracket(x[0], x[1], x[2], x[3], order) != at {
                    return Some(format!("{x:?}: s = {} special case differs", order.value()));
                }
            }
            None
        })
        .collect();
    match bad.first() {
        None => Outcome { passed: true, summary: format!("{} index quadruples, s = 1, 0, −1 specializations", quads.len()) },
        Some(b) => Outcome { passed: false, summary: format!("{} failures, first {b}", bad.len()) },
    }
}

fn criterion_3() -> Outcome {
    let r = resolve_commutator_sign(6, &formal());
    match r.consistent() {
        Some(sign) => Outcome {
            passed: true,
            summary: format!("dequantize([t_nm, t_kl]) = ({sign})·{{q^n p^m, q^k p^l}}_MB on all {} quadruples", r.cases),
        },
        None => Outcome { passed: false, summary: format!("signs {:?}, unrelated {:?}", r.signs, r.unrelated) },
    }
}

fn criterion_7() -> Outcome {
    from_checks(&htower(8, &formal()))
}

fn criterion_13() -> Outcome {
    let s = formal();
    let start = Instant::now();
    let one = structure_table_with_jobs(6, &s, false, 1);
    let t1 = start.elapsed();
    let eight = structure_table_with_jobs(6, &s, false, 8);
    let (j1, j8) = (one.to_json(), eight.to_json());
    let (c1, c8) = (one.to_csv(), eight.to_csv());
    let (l1, l8) = (one.to_latex(), eight.to_latex());
    let identical = j1 == j8 && c1 == c8 && l1 == l8;
    let fast = t1 < Duration::from_secs(60);
    Outcome {
        passed: identical && fast,
        summary: format!(
            "{} entries; 1 vs 8 workers byte-identical: {identical}; single-worker time {:.2}s",
            one.entries.len(),
            t1.as_secs_f64()
        ),
    }
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("1 star/operator homomorphism, degree ≤ 8", Box::new(criterion_1)),
        ("2 closed form = engine, indices ≤ 6", Box::new(criterion_2)),
        ("3 single global commutator sign, indices ≤ 6", Box::new(criterion_3)),
        ("4 Jacobi identity, triples of degree ≤ 9", Box::new(|| from_checks(&jacobi(9, &formal(), DEFAULT_SEED)))),
        ("5 isp(2) commutators, classical and quantum", Box::new(|| from_checks(&isp2(&formal())))),
        ("6 generator table for n, m ≤ 2", Box::new(|| from_checks(&table1()))),
        ("7 H-tower product formula and commutativity, n ≤ 8", Box::new(criterion_7)),
        ("8 Virasoro brackets, modes ≤ 6", Box::new(|| from_checks(&virasoro(6, &formal())))),
        ("9 Kac-Moody expansions, indices ≤ 6", Box::new(|| from_checks(&kac_moody(6, &formal())))),
        ("10 hermiticity of ordered products, n, m ≤ 5", Box::new(|| from_checks(&hermiticity(5, &formal(), DEFAULT_SEED)))),
        ("11 Γ closure, pairs of degree ≤ 6 on monomials of degree ≤ 4", Box::new(|| from_checks(&gamma_closure(6, 4, &formal())))),
        ("12 metaplectic matrices, 100 random parameters", Box::new(|| from_checks(&metaplectic(DEFAULT_SEED, 100)))),
        ("13 deterministic structure table, nmax = 6", Box::new(criterion_13)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let out = run();
        let tag = if out.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name} [{:.1}s]: {}", start.elapsed().as_secs_f64(), out.summary);
        if !out.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
