use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use principal_core::envelope::{
    decompose, pbw_add, tau_suffix, word_leq, Envelope, FreeElement, Generator, PBWElement, Word,
};
use principal_core::fermionic::{
    andrews_gordon_product, andrews_gordon_sum, char_pform, georgiev_char, verify_level1_sequence_dims,
    verify_recursion, Display, Enumeration,
};
use principal_core::lattice::{e_lambda_shift_check, level1_relations, principal_subspace_dims};
use principal_core::quasiparticle::{char_from_basis, char_from_basis_with, AdmissibilityContext};
use principal_core::{PositiveRoot, TruncatedSeries};

type Outcome = Result<(), String>;

/// Every character produced by the suite, for the positivity criterion.
#[derive(Default)]
struct Emitted(Vec<(String, TruncatedSeries)>);

impl Emitted {
    fn keep(&mut self, label: String, s: &TruncatedSeries) {
        self.0.push((label, s.clone()));
    }
}

fn same(label: &str, a: &TruncatedSeries, b: &TruncatedSeries, order: i64) -> Outcome {
    let cmp = a.equal_upto(b, order).map_err(|e| format!("{label}: {e}"))?;
    if cmp.equal {
        Ok(())
    } else {
        Err(format!("{label}: {cmp}"))
    }
}

fn weights(n: usize, k: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(k, 0)];
    for k0 in 0..k {
        for j in 1..=n {
            out.push((k0, j));
        }
    }
    out
}

fn oracle_triangle(emitted: &mut Emitted) -> Outcome {
    for n in [2, 3] {
        for i in 0..=n {
            let (k0, j) = if i == 0 { (1, 0) } else { (0, i) };
            let label = format!("n={n} i={i}");
            let ferm = georgiev_char(n, 1, k0, j, 8).map_err(|e| e.to_string())?;
            let ctx = AdmissibilityContext::new(n, 1, k0, j).map_err(|e| e.to_string())?;
            let basis = char_from_basis(&ctx, 8).map_err(|e| e.to_string())?;
            let lattice = principal_subspace_dims(n, i, 8).map_err(|e| e.to_string())?;
            same(&format!("{label} fermionic/basis"), &ferm, &basis, 8)?;
            same(&format!("{label} fermionic/lattice"), &ferm, &lattice, 8)?;
            emitted.keep(format!("georgiev {label}"), &ferm);
            emitted.keep(format!("basis {label}"), &basis);
            emitted.keep(format!("lattice {label}"), &lattice);
        }
    }
    Ok(())
}

fn higher_level(emitted: &mut Emitted) -> Outcome {
    for n in [2, 3] {
        for k in [2, 3] {
            for (k0, j) in weights(n, k) {
                let label = format!("n={n} k={k} k0={k0} j={j}");
                let ferm = georgiev_char(n, k, k0, j, 10).map_err(|e| e.to_string())?;
                let ctx = AdmissibilityContext::new(n, k, k0, j).map_err(|e| e.to_string())?;
                let basis = char_from_basis(&ctx, 10).map_err(|e| e.to_string())?;
                same(&label, &ferm, &basis, 10)?;
                emitted.keep(format!("georgiev {label}"), &ferm);
                emitted.keep(format!("basis {label}"), &basis);
            }
        }
    }
    Ok(())
}

fn recursions() -> Outcome {
    for n in [2, 3, 4] {
        for k in 1..=3 {
            for kk in 1..=k {
                for which in [Display::First, Display::Second] {
                    let report = verify_recursion(which, n, k, kk, 10).map_err(|e| e.to_string())?;
                    if !report.comparison.equal || report.comparison.order < 10 {
                        return Err(format!("{which:?} n={n} k={k} kk={kk}: {}", report.comparison));
                    }
                }
            }
        }
    }
    Ok(())
}

fn form_equivalence(emitted: &mut Emitted) -> Outcome {
    let en = Enumeration::default();
    for n in [2, 3, 4] {
        for k in 1..=3 {
            for kk in 1..=k {
                for which in [Display::First, Display::Second] {
                    let label = format!("{which:?} n={n} k={k} kk={kk}");
                    let r = en.gdim(which, n, k, kk, 10).map_err(|e| e.to_string())?;
                    let p = char_pform(which, n, k, kk, 10).map_err(|e| e.to_string())?;
                    same(&label, &r, &p, 10)?;
                    emitted.keep(format!("r-form {label}"), &r);
                    emitted.keep(format!("p-form {label}"), &p);
                }
            }
        }
    }
    for k in 1..=3 {
        for k1 in 1..k {
            let a = en.gdim(Display::First, 2, k, k1, 10).map_err(|e| e.to_string())?;
            let b = en.gdim(Display::Second, 2, k, k - k1, 10).map_err(|e| e.to_string())?;
            same(&format!("n=2 k={k} k1={k1} displays"), &a, &b, 10)?;
        }
    }
    Ok(())
}

fn level1_sequences() -> Outcome {
    for n in [2, 3] {
        for i in 1..=n {
            let report = verify_level1_sequence_dims(n, i, 10).map_err(|e| e.to_string())?;
            if !report.comparison.equal || report.comparison.order < 10 {
                return Err(format!("n={n} i={i}: {}", report.comparison));
            }
        }
    }
    Ok(())
}

fn generators(env: &Envelope, modes: std::ops::RangeInclusive<i64>) -> Vec<Generator> {
    let mut out = Vec::new();
    for mode in modes {
        for root in 0..env.root_system().num_roots() {
            out.push(Generator { mode, root });
        }
    }
    out
}

fn word_element(gens: &[Generator]) -> FreeElement {
    FreeElement::from([(Word(gens.to_vec()), BigRational::one())])
}

fn appendix() -> Outcome {
    // tau and word_leq
    for a in -3..=3i64 {
        for b in -3..=3i64 {
            for c in -3..=3i64 {
                let t = tau_suffix(&[a, b, c]);
                if t != vec![a + b + c, b + c, c] {
                    return Err(format!("tau_suffix({a},{b},{c}) = {t:?}"));
                }
                let w = Word(vec![Generator { mode: a, root: 0 }, Generator { mode: b, root: 0 }, Generator { mode: c, root: 0 }]);
                for i in -4..=4 {
                    if word_leq(&w, i) != t.iter().all(|&s| s <= i) {
                        return Err(format!("word_leq({a},{b},{c}; {i})"));
                    }
                }
            }
        }
    }
    for n in [1i64, 2, 3] {
        let env = Envelope::new(n).map_err(|e| e.to_string())?;
        let gens = generators(&env, -3..=3);
        for &x in &gens {
            for &y in &gens {
                let xy = env.straighten(&word_element(&[x, y]));
                for &z in &gens {
                    let right = env.mul(&xy, &env.straighten(&word_element(&[z])));
                    let yz = env.straighten(&word_element(&[y, z]));
                    let left = env.mul(&env.straighten(&word_element(&[x])), &yz);
                    let from_left = env.straighten_left(&word_element(&[x, y, z]));
                    if right != left || right != from_left {
                        return Err(format!("associativity fails on {}", env.render_monomial(&[x, y, z])));
                    }
                    let (minus, plus) = decompose(&right);
                    if pbw_add(&minus, &plus) != right
                        || minus.keys().any(|m| m.iter().any(|g| g.mode >= 0))
                        || plus.keys().any(|m| m.last().is_none_or(|g| g.mode < 0))
                    {
                        return Err(format!("decompose fails on {}", env.render(&right)));
                    }
                }
            }
        }
    }
    for n in [2i64, 3] {
        let env = Envelope::new(n).map_err(|e| e.to_string())?;
        let rs = env.root_system().clone();
        let alphas: Vec<PositiveRoot> = rs.positive_roots().iter().copied().filter(|r| r.height() <= 2).collect();
        for k in [1usize, 2] {
            for i in 1..=n as usize {
                for t in k as i64 + 1..=k as i64 + 3 {
                    for w in -1..=2 {
                        let base = env.representative_r_via(i, t, k, w, -1).map_err(|e| e.to_string())?;
                        for big_m in 0..=3 {
                            if env.representative_r_via(i, t, k, w, big_m).map_err(|e| e.to_string())? != base {
                                return Err(format!("representative depends on M: n={n} k={k} i={i} t={t} W={w} M={big_m}"));
                            }
                        }
                        let wide = env.representative_r(i, t, k, w + 1).map_err(|e| e.to_string())?;
                        if wide.restrict(w) != base {
                            return Err(format!("window restriction: n={n} k={k} i={i} t={t} W={w}"));
                        }
                    }
                    for &alpha in &alphas {
                        for m in 1..=3 {
                            for w in 0..=2 {
                                let lemma = env.lemma_commutator_check(i, t, alpha, m, w, k).map_err(|e| e.to_string())?;
                                if !lemma.holds {
                                    return Err(format!("lemma n={n} k={k} i={i} t={t} α={alpha} m={m} W={w}"));
                                }
                                let single = PBWElement::from([(vec![env.generator(alpha, -m).unwrap()], BigRational::one())]);
                                let pair = env.mul(&PBWElement::from([(vec![env.generator(PositiveRoot::simple(1), -1).unwrap()], BigRational::one())]), &single);
                                for a in [single, pair] {
                                    let cor = env.corollary_ideal_check(i, t, &a, w, k).map_err(|e| e.to_string())?;
                                    if !cor.holds {
                                        return Err(format!("corollary n={n} k={k} i={i} t={t} a={} W={w}", env.render(&a)));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn fock_relations() -> Outcome {
    for n in [2, 3] {
        if !level1_relations(n).map_err(|e| e.to_string())? {
            return Err(format!("level-1 relations fail at n={n}"));
        }
        for i in 0..=n {
            if !e_lambda_shift_check(n, i, 2).map_err(|e| e.to_string())? {
                return Err(format!("e_λ shift fails at n={n} i={i}"));
            }
        }
    }
    Ok(())
}

fn andrews_gordon(emitted: &mut Emitted) -> Outcome {
    for k in 1..=3 {
        let sum = andrews_gordon_sum(k, 30).map_err(|e| e.to_string())?;
        let product = andrews_gordon_product(k, 30).map_err(|e| e.to_string())?;
        same(&format!("k={k}"), &sum, &product, 30)?;
        emitted.keep(format!("andrews-gordon k={k}"), &sum);
    }
    Ok(())
}

fn positivity(emitted: &Emitted) -> Outcome {
    if emitted.0.is_empty() {
        return Err("no characters were produced".into());
    }
    for (label, s) in &emitted.0 {
        if !s.is_nonneg_integral() {
            return Err(format!("{label} has a negative or fractional coefficient"));
        }
    }
    let wide = Enumeration { slack: 2 };
    for n in [2, 3] {
        for k in 1..=3 {
            for (k0, j) in weights(n, k) {
                let label = format!("n={n} k={k} k0={k0} j={j}");
                let narrow = georgiev_char(n, k, k0, j, 10).map_err(|e| e.to_string())?;
                same(&format!("georgiev {label}"), &narrow, &wide.georgiev(n, k, k0, j, 10).map_err(|e| e.to_string())?, 10)?;
                let ctx = AdmissibilityContext::new(n, k, k0, j).map_err(|e| e.to_string())?;
                let a = char_from_basis(&ctx, 10).map_err(|e| e.to_string())?;
                let b = char_from_basis_with(&ctx, 10, 2).map_err(|e| e.to_string())?;
                same(&format!("basis {label}"), &a, &b, 10)?;
            }
            for kk in 1..=k {
                for which in [Display::First, Display::Second] {
                    let a = Enumeration::default().gdim(which, n, k, kk, 10).map_err(|e| e.to_string())?;
                    let b = wide.gdim(which, n, k, kk, 10).map_err(|e| e.to_string())?;
                    same(&format!("r-form {which:?} n={n} k={k} kk={kk}"), &a, &b, 10)?;
                    let p = Enumeration::default().pform(which, n, k, kk, 10).map_err(|e| e.to_string())?;
                    let q = wide.pform(which, n, k, kk, 10).map_err(|e| e.to_string())?;
                    same(&format!("p-form {which:?} n={n} k={k} kk={kk}"), &p, &q, 10)?;
                }
            }
        }
    }
    // the constant term of every vacuum character is 1
    let one = BigRational::from_integer(BigInt::from(1));
    for n in [2usize, 3] {
        if georgiev_char(n, 2, 2, 0, 0).map_err(|e| e.to_string())?.coeff(&vec![0; n], 0) != one {
            return Err(format!("vacuum constant term at n={n}"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut emitted = Emitted::default();
    let mut failed = false;
    let mut report = |idx: usize, name: &str, outcome: Outcome, started: Instant| {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {idx} PASS  {name} ({secs:.1}s)"),
            Err(why) => {
                failed = true;
                println!("criterion {idx} FAIL  {name} ({secs:.1}s): {why}");
            }
        }
    };
    let t = Instant::now();
    report(1, "level-1 oracle triangle", oracle_triangle(&mut emitted), t);
    let t = Instant::now();
    report(2, "basis = fermionic at levels 2 and 3", higher_level(&mut emitted), t);
    let t = Instant::now();
    report(3, "recursion identities", recursions(), t);
    let t = Instant::now();
    report(4, "r-form = p-form and display agreement", form_equivalence(&mut emitted), t);
    let t = Instant::now();
    report(5, "level-1 exact-sequence dimensions", level1_sequences(), t);
    let t = Instant::now();
    report(6, "completed enveloping algebra suite", appendix(), t);
    let t = Instant::now();
    report(7, "level-1 relations in the Fock space", fock_relations(), t);
    let t = Instant::now();
    report(8, "Andrews-Gordon companion", andrews_gordon(&mut emitted), t);
    let t = Instant::now();
    report(9, "positivity and saturation", positivity(&emitted), t);
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
