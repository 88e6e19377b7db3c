//! Acceptance suite. Runs every criterion, prints one line each, and fails
//! if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use muwork_core::corpus::{load_corpus, load_rf_file, CorpusEntry, Label, Subject};
use muwork_core::diagonal::{alpha, diag_self_demo, finite_diagonal, Alpha, FnList, Theta};
use muwork_core::eval::{eval, EvalOutcome, Evaluator, UndefReason};
use muwork_core::godel::{
    check_proof, decode, encode, encode_formula, encode_term, eval_with_proof, is_def, sub, CodeError, Formula, IsDef,
    Proof, Signature, Syntax, Term,
};
use muwork_core::halt::{analyze, verify_period, AnalyzerConfig, Degree, ProblemSpec, Verdict};
use muwork_core::imp::run;
use muwork_core::nat::Nat;
use muwork_core::poly::{isolate_integer_roots, Polynomial};
use muwork_core::rf::{parse_rf, DefEnv};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Evaluator fuel for the equivalence checks.
const EVAL_FUEL: u64 = 1_000_000;
/// Machine fuel for compiled programs. The costliest halting probe in the
/// corpus needs under 2·10^6 steps; this leaves a margin of 50.
const MACHINE_FUEL: u64 = 100_000_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn corpus() -> Vec<CorpusEntry> {
    load_corpus(&common::corpus_dir()).expect("corpus loads")
}

fn words(input: &[Nat]) -> Vec<u64> {
    input.iter().map(|n| n.to_u64().expect("small input")).collect()
}

fn rf_parts(e: &CorpusEntry) -> Option<(&muwork_core::rf::RfExpr, &DefEnv)> {
    match &e.subject {
        Subject::Rf { expr, env } => Some((expr, env)),
        Subject::Program(_) => None,
    }
}

fn c1_equivalence(entries: &[CorpusEntry]) -> Outcome {
    let t = Instant::now();
    let (mut probes, mut agree, mut wide) = (0, 0, 0);
    let mut bad = Vec::new();
    for e in entries {
        let Some((expr, env)) = rf_parts(e) else { continue };
        if e.probes.len() >= 5 {
            wide += 1;
        }
        let program = e.program();
        for p in &e.probes {
            probes += 1;
            let ev = eval(expr, &p.input, EVAL_FUEL, env).unwrap();
            let m = run(&program, &words(&p.input), MACHINE_FUEL, false).unwrap();
            let same = match (&ev, m.output()) {
                (EvalOutcome::Defined { value, .. }, Some(v)) => *value == Nat::from(v),
                (EvalOutcome::Defined { .. }, None) | (_, Some(_)) => false,
                (_, None) => true,
            };
            if same {
                agree += 1;
            } else {
                bad.push(format!("{}{:?}", e.name, words(&p.input)));
            }
        }
    }
    let secs = t.elapsed();
    outcome(
        bad.is_empty() && wide >= 40 && secs < Duration::from_secs(120),
        format!(
            "evaluator/compiler agreement {agree}/{probes} probes, {wide} functions with >= 5 inputs, {:.1} s{}",
            secs.as_secs_f64(),
            if bad.is_empty() { String::new() } else { format!(", mismatches: {}", bad.join(" ")) }
        ),
    )
}

fn c2_goldbach() -> Outcome {
    let file = load_rf_file(&common::corpus_dir().join("goldbach.rf")).unwrap();
    let cex = file.env.call("goldbach_cex").unwrap();
    let mut ev = Evaluator::new(&file.env);
    let t = Instant::now();
    let mut counterexamples = Vec::new();
    let mut checked = 0;
    for n in (6..=10_000u64).step_by(2) {
        match ev.eval(&cex, &[Nat::from(n)], u64::MAX).unwrap() {
            EvalOutcome::Defined { value, .. } if value.is_zero() => checked += 1,
            _ => counterexamples.push(n),
        }
    }
    let secs = t.elapsed();
    let searcher = file.env.call("goldbach_mu").unwrap();
    let a = analyze(&ProblemSpec::rf(searcher, &file.env, &[]), &AnalyzerConfig::default()).unwrap();
    let open = matches!(a.verdict, Verdict::Unknown { .. }) && a.degree == Some(Degree::Open);
    outcome(
        counterexamples.is_empty() && secs < Duration::from_secs(60) && open,
        format!(
            "goldbach_cex(n) = 0 for {checked} even n in (4, 10^4], {} counterexamples, {:.1} s; \
             goldbach_mu: {}, degree {:?}",
            counterexamples.len(),
            secs.as_secs_f64(),
            verdict_name(&a.verdict),
            a.degree.map(|d| d as u8)
        ),
    )
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Halts { .. } => "Halts",
        Verdict::DivergesPeriodic { .. } => "DivergesPeriodic",
        Verdict::DivergesProven { .. } => "DivergesProven",
        Verdict::NonRecursiveDefinition { .. } => "NonRecursiveDefinition",
        Verdict::Unknown { .. } => "Unknown",
    }
}

fn c3_totality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let env = DefEnv::new();
    let (mut defined, mut max_steps, mut deepest) = (0, 0, 0);
    for _ in 0..500 {
        let arity = rng.gen_range(1..=common::MAX_ARITY);
        let e = common::random_pr(&mut rng, arity, 5);
        deepest = deepest.max(e.depth());
        let args = common::random_args(&mut rng, arity, 6);
        if let EvalOutcome::Defined { steps, .. } = eval(&e, &args, 10_000_000, &env).unwrap() {
            defined += 1;
            max_steps = max_steps.max(steps);
        }
    }
    outcome(
        defined == 500,
        format!("{defined}/500 random primitive recursive expressions defined (depth <= {deepest}, arity <= 6), max {max_steps} steps"),
    )
}

fn c4_nontermination(entries: &[CorpusEntry]) -> Outcome {
    let cfg = AnalyzerConfig::default();
    let (mut periodic, mut certified) = (0, 0);
    let mut failures = Vec::new();
    for e in entries.iter().filter(|e| e.has_tag("periodic")) {
        let program = e.program();
        let mut all = true;
        for p in e.probes.iter().filter(|p| p.label == Label::Diverges) {
            let a = analyze(&e.problem(&p.input).unwrap(), &cfg).unwrap();
            match a.verdict {
                Verdict::DivergesPeriodic { start, period } => {
                    if verify_period(&program, &words(&p.input), start, period).unwrap() {
                        certified += 1;
                    } else {
                        all = false;
                    }
                }
                _ => all = false,
            }
        }
        if all {
            periodic += 1;
        } else {
            failures.push(e.name.clone());
        }
    }

    let roots = load_rf_file(&common::corpus_dir().join("roots.rf")).unwrap();
    let t = Instant::now();
    let a = analyze(&ProblemSpec::rf(roots.env.call("no_pos_root").unwrap(), &roots.env, &[]), &cfg).unwrap();
    let root_secs = t.elapsed();
    let proven = matches!(
        &a.verdict,
        Verdict::DivergesProven { reason: UndefReason::NoIntegerRoot { certificate } } if certificate.verify()
    ) && root_secs < Duration::from_secs(1);

    let mut halting = 0;
    let mut false_div = Vec::new();
    let mut unsound = Vec::new();
    for e in entries {
        let all_halt = e.probes.iter().all(|p| matches!(p.label, Label::Halts { .. }));
        if all_halt && rf_parts(e).is_some() {
            halting += 1;
        }
        for p in &e.probes {
            let a = analyze(&e.problem(&p.input).unwrap(), &cfg).unwrap();
            match (&p.label, &a.verdict) {
                (Label::Halts { .. }, v) if v.is_divergence() => {
                    false_div.push(format!("{}{:?}", e.name, words(&p.input)));
                }
                (Label::Halts { value }, Verdict::Halts { value: got, .. }) if value != got => {
                    unsound.push(format!("{}{:?}", e.name, words(&p.input)));
                }
                (Label::Diverges, Verdict::Halts { .. }) => unsound.push(format!("{}{:?}", e.name, words(&p.input))),
                _ => {}
            }
        }
    }
    outcome(
        periodic == 10 && failures.is_empty() && proven && halting >= 40 && false_div.is_empty() && unsound.is_empty(),
        format!(
            "{periodic}/10 looping programs DivergesPeriodic ({certified} re-verified certificates){}; \
             x^2+1 with x > 0: {} in {:.3} s; {} false divergence verdicts over {halting} halting functions; \
             {} unsound verdicts over the labelled corpus",
            if failures.is_empty() { String::new() } else { format!(" failing: {}", failures.join(" ")) },
            verdict_name(&a.verdict),
            root_secs.as_secs_f64(),
            false_div.len(),
            unsound.len()
        ),
    )
}

/// Independent root oracle: Cauchy bound by integer arithmetic and a scan.
fn brute_roots(c: &[i64]) -> BTreeSet<i64> {
    let lead = c.last().unwrap().abs();
    let m = c[..c.len() - 1].iter().map(|a| a.abs()).max().unwrap_or(0);
    let b = 1 + (m + lead - 1) / lead;
    (-b..=b).filter(|&x| c.iter().rev().fold(0i128, |acc, &a| acc * x as i128 + a as i128) == 0).collect()
}

fn c5_roots() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut agree, mut with_roots) = (0, 0);
    for _ in 0..200 {
        let c = common::random_poly(&mut rng);
        let got = isolate_integer_roots(&Polynomial::from_i64(&c)).unwrap();
        let got: BTreeSet<i64> = got.roots.iter().map(|r| i64::try_from(r).unwrap()).collect();
        let want = brute_roots(&c);
        if !want.is_empty() {
            with_roots += 1;
        }
        if got == want {
            agree += 1;
        }
    }
    outcome(
        agree == 200,
        format!("integer root sets agree on {agree}/200 random polynomials ({with_roots} with roots)"),
    )
}

fn substitution_oracle(f: &Formula, u: &Term) -> Option<Formula> {
    match f {
        Formula::ExistsEq { var, .. } if var == "x" => Some(f.clone()),
        Formula::ExistsEq { var, lhs } if u.contains_var(var) && lhs.contains_var("x") => None,
        _ => Some(f.substitute("x", u)),
    }
}

fn mutate(p: &Proof, rng: &mut ChaCha8Rng) -> Proof {
    let mut q = p.clone();
    let k = rng.gen_range(0..q.lines.len());
    let line = &mut q.lines[k];
    line.formula = match &line.formula {
        Formula::Eq(a, b) => match rng.gen_range(0..3) {
            0 => Formula::Eq(a.clone(), Term::succ(b.clone())),
            1 => Formula::Eq(Term::succ(a.clone()), b.clone()),
            _ => Formula::Eq(b.clone(), Term::succ(a.clone())),
        },
        Formula::ExistsEq { var, lhs } => Formula::ExistsEq { var: var.clone(), lhs: Term::succ(lhs.clone()) },
        Formula::NegIsDef(a, b) => Formula::NegIsDef(b.clone(), a.clone()),
    };
    q
}

fn c6_arithmetization(entries: &[CorpusEntry]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let env = parse_rf(
        "def plus = primrec(proj(1,1), comp(succ, proj(3,3)))
         def double = comp(plus, proj(1,1), proj(1,1))
         def pred = primrec(zero, proj(2,1))",
    )
    .unwrap();
    let sig = Signature::from_env(&env);
    let (mut round, mut subs) = (0, 0);
    for _ in 0..1000 {
        let f = common::random_formula(&mut rng, &sig, 3);
        let code = encode_formula(&f, &sig).unwrap();
        if decode(&code, &sig).unwrap() == Syntax::Formula(f.clone()) {
            round += 1;
        }
        let u = common::random_term(&mut rng, &sig, 2);
        let got = sub(&code, &encode_term(&u, &sig).unwrap(), &BigUint::from(13u32), &sig);
        let ok = match (substitution_oracle(&f, &u), got) {
            (Some(g), Ok(c)) => encode(&Syntax::Formula(g), &sig).unwrap() == c,
            (None, Err(CodeError::NotACode(_))) => true,
            _ => false,
        };
        if ok {
            subs += 1;
        }
    }

    // evaluator proofs for every halting corpus probe small enough to prove
    let mut proofs = Vec::new();
    let (mut emitted, mut accepted) = (0, 0);
    for e in entries {
        let Some((expr, env)) = rf_parts(e) else { continue };
        for p in e.probes.iter().filter(|p| matches!(p.label, Label::Halts { .. })) {
            let (_, proof) = eval_with_proof(expr, &p.input, 20_000, env).unwrap();
            if let Some(proof) = proof {
                emitted += 1;
                if check_proof(&proof, proof.conclusion().unwrap(), env) {
                    accepted += 1;
                }
                proofs.push((proof, env.clone()));
            }
        }
    }
    let mut rejected = 0;
    let mutations = 100;
    for i in 0..mutations {
        let (p, env) = &proofs[i % proofs.len()];
        let target = p.conclusion().unwrap().clone();
        let q = mutate(p, &mut rng);
        if !check_proof(&q, &target, env) {
            rejected += 1;
        }
    }
    let x = encode_term(&Term::var("x"), &Signature::default()).unwrap();
    let x_ok = x == BigUint::from(13u32);
    outcome(
        round == 1000 && subs == 1000 && emitted > 0 && accepted == emitted && rejected == mutations && x_ok,
        format!(
            "round trips {round}/1000, Sub agreement {subs}/1000, proofs accepted {accepted}/{emitted}, \
             mutations rejected {rejected}/{mutations}, #x = {x}"
        ),
    )
}

fn c7_isdef(entries: &[CorpusEntry]) -> Outcome {
    let (mut agree, mut total, mut proved) = (0, 0, 0);
    let mut bad = Vec::new();
    for e in entries {
        let Some((_, env)) = rf_parts(e) else { continue };
        let sig = Signature::from_env(env);
        let program = e.program();
        for p in &e.probes {
            total += 1;
            let (fixed, u) = match p.input.split_last() {
                Some((last, init)) => (init.to_vec(), last.clone()),
                None => (Vec::new(), Nat::ZERO),
            };
            let mut args: Vec<Term> = fixed.iter().map(Term::num).collect();
            if !p.input.is_empty() {
                args.push(Term::var("x"));
            }
            let fml = Formula::ExistsEq { var: "k".into(), lhs: Term::App(e.name.clone(), args) };
            let code = encode_formula(&fml, &sig).unwrap();
            let certified = matches!(is_def(&code, &u, EVAL_FUEL, env).unwrap().0, IsDef::Proved(_));
            let halts = run(&program, &words(&p.input), MACHINE_FUEL, false).unwrap().output().is_some();
            if certified {
                proved += 1;
            }
            if certified == halts {
                agree += 1;
            } else {
                bad.push(format!("{}{:?}", e.name, words(&p.input)));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "IsDef and halting agree on {agree}/{total} probes ({proved} certified){}",
            if bad.is_empty() { String::new() } else { format!(", disagreements: {}", bad.join(" ")) }
        ),
    )
}

fn c8_diagonal() -> Outcome {
    let cfg = AnalyzerConfig::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for stem in ["list1", "list2", "list3"] {
        let file = load_rf_file(&common::corpus_dir().join(format!("{stem}.rf"))).unwrap();
        let names: Vec<&str> = file.own.iter().map(String::as_str).collect();
        let list = FnList::from_names(file.env.clone(), &names).unwrap();
        let mut differs = 0;
        let mut defined = 0;
        for i in 0..list.len() {
            let g = eval(list.get(i), &[Nat::from(i)], cfg.fuel, list.env()).unwrap();
            if let Some(v) = g.value() {
                defined += 1;
                if finite_diagonal(&list, i, &cfg).unwrap().value().is_some_and(|h| h != v) {
                    differs += 1;
                }
            }
        }
        let t = Instant::now();
        let report = diag_self_demo(&list, &cfg).unwrap();
        let demo_ok = report.regress_events == 1 && t.elapsed() < Duration::from_secs(5);
        let mut decided = 0;
        let mut converse = 0;
        for z in 0..list.len() {
            let (theta, a) = alpha(&list, z, &cfg).unwrap();
            let holds = match (theta, &a) {
                (Theta::One, Alpha::Value { outcome }) => !outcome.is_defined(),
                (Theta::Zero, Alpha::Value { outcome }) => outcome.value().is_some_and(Nat::is_zero),
                (Theta::Unknown, _) => continue,
                _ => false,
            };
            decided += 1;
            if holds {
                converse += 1;
            }
        }
        pass &= differs == defined && demo_ok && converse == decided;
        lines.push(format!(
            "{stem}: h differs at {differs}/{defined} defined points, {} regress event(s), alpha converse at {converse}/{decided} decided indices",
            report.regress_events
        ));
    }
    outcome(pass, lines.join("; "))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let entries = corpus();
    let criteria: Vec<Criterion> = vec![
        ("evaluator-compiler equivalence", Box::new(|| c1_equivalence(&entries))),
        ("Goldbach desk-scale scan", Box::new(c2_goldbach)),
        ("degree-1 totality", Box::new(c3_totality)),
        ("non-termination proofs", Box::new(|| c4_nontermination(&entries))),
        ("root isolation vs brute force", Box::new(c5_roots)),
        ("arithmetization", Box::new(|| c6_arithmetization(&entries))),
        ("IsDef/Halt agreement", Box::new(|| c7_isdef(&entries))),
        ("diagonal suite", Box::new(c8_diagonal)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {} {name}: {} [{:.1} s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
