//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one line; exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use endocable::arith::{prime_divisors, prime_power};
use endocable::endocable::identity_suite_with;
use endocable::perm::{classify_fixed_point_free, predicted_fixed_point_free, t2_fixed_point_free_involutions, t2_predicted};
use endocable::search::enumerate::corpus;
use endocable::search::{
    appendix_model, build_model, solve, solve_with, verify_theorem, Budget, Diagonal, Mode, ModelSpec, SolveOptions,
    Status, Theorem, TheoremOptions,
};
use endocable::{Brace, CycleSet, Mpl, Report};

enum Verdict {
    Pass(String),
    Fail(String),
    NotRun(String),
}

struct Suite {
    failed: bool,
}

impl Suite {
    fn run(&mut self, id: u32, title: &str, limit: Duration, f: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let mut verdict = f();
        let took = start.elapsed();
        if took > limit {
            if let Verdict::Pass(d) = verdict {
                verdict = Verdict::Fail(format!("{d}; took {took:.1?}, limit {limit:?}"));
            }
        }
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                self.failed = true;
                ("FAIL", d)
            }
            Verdict::NotRun(d) => ("NOT-RUN", d),
        };
        println!("criterion {id:>2} {tag:<7} {title}: {detail} [{took:.2?}]");
    }
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn full_cycle_solutions(n: usize, irretractable: bool) -> Vec<CycleSet> {
    let mut spec = ModelSpec::new(n);
    spec.diagonal = Diagonal::FullCycle;
    spec.require_irretractable = irretractable;
    let out = solve(&build_model(spec).unwrap(), Mode::All, Budget::unlimited());
    assert_ne!(out.status, Status::Timeout);
    out.solutions
}

fn criterion_1() -> Verdict {
    let x = CycleSet::parse(include_str!("../../../fixtures/x4_19.cs")).unwrap();
    let revalidated = CycleSet::validate(4, x.table().to_vec()).is_ok();
    let t_four_cycle = x.diagonal().cycle_structure().cycle_type == vec![4];
    let irr = !x.is_retractable();
    let mpl = x.mpl().unwrap();
    let stationary = matches!(&mpl, Mpl::Infinite { level: 0, stationary } if *stationary == x);
    let b = Brace::permutation_brace(&x).unwrap();
    let socle = b.socle().members;
    let pi = x.pi_type().unwrap();
    let two_type = pi.is_p_type && pi.primes_of_size == BTreeSet::from([2]);
    verdict(
        revalidated && t_four_cycle && irr && stationary && socle == vec![0] && two_type && x == CycleSet::x4_19(),
        format!("T cycle type {:?}, irretractable {irr}, mpl {mpl}, |Soc| {}, 2-type {two_type}", x.diagonal().cycle_structure().cycle_type, socle.len()),
    )
}

fn criterion_2(found: &[CycleSet]) -> Verdict {
    let x = CycleSet::x4_19();
    let iso = found.iter().all(|s| s.are_isomorphic(&x).unwrap().is_some());
    verdict(!found.is_empty() && iso, format!("{} solutions, all isomorphic to X_{{4,19}}: {iso}", found.len()))
}

fn criterion_3(found: &mut Vec<CycleSet>) -> Verdict {
    let out = verify_theorem(Theorem::FullCycleTwo, 8, &TheoremOptions::default()).unwrap();
    let decide = solve(&appendix_model(3).unwrap(), Mode::Decide, Budget::unlimited());
    let retractable = out.solutions.iter().all(CycleSet::is_retractable);
    let detail = format!(
        "{} full-cycle tables, all retractable {retractable}, exhaustive {}, appendix v=3 {}",
        out.solutions.len(),
        out.exhaustive,
        decide.status
    );
    *found = out.solutions.clone();
    verdict(out.all_pass() && out.exhaustive && retractable && decide.status == Status::Unsat, detail)
}

fn criterion_4() -> Verdict {
    let budget = Budget { max_nodes: None, max_time: Some(Duration::from_secs(2 * 3600)) };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let out = solve_with(&appendix_model(4).unwrap(), &SolveOptions { mode: Mode::Decide, budget, threads });
    let detail = format!("status {}, nodes {}, propagations {}", out.status, out.stats.nodes, out.stats.propagations);
    match out.status {
        Status::Unsat => Verdict::Pass(detail),
        Status::Timeout => Verdict::NotRun(format!("{detail}, explored {:.4}", out.stats.explored_fraction)),
        Status::Sat => Verdict::Fail(detail),
    }
}

fn criterion_5() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [3, 5, 9] {
        let out = verify_theorem(Theorem::FullCycleOdd, n, &TheoremOptions::default()).unwrap();
        ok &= out.all_pass();
        parts.push(format!(
            "n={n}: {} tables, exhaustive {}, verified fraction {:.4}",
            out.solutions.len(),
            out.exhaustive,
            out.verified_fraction
        ));
    }
    verdict(ok, parts.join("; "))
}

const IDENTITY_CHECKS: &[&str] = &[
    "mixed-cabling-law",
    "adding-two-cablings",
    "scalar-diagonal-power",
    "central-diagonal-conjugate",
    "diagonal-commutes-with-conjugate",
    "permutation-group-of-cabling",
    "image-is-left-ideal",
    "blocks-are-retraction-classes",
    "phi-z-a",
    "phi-z-b",
    "phi-z-c",
    "phi-z-d",
    "cabling-out-center",
    "fix-automorphism",
    "fix-centralizes-diagonal",
];

fn criterion_6(members: &[(CycleSet, Brace)]) -> Verdict {
    let mut all = Report::new();
    for (x, b) in members {
        match identity_suite_with(x, b) {
            Ok(r) => all.merge(r),
            Err(e) => return Verdict::Fail(format!("{x}: {e}")),
        }
    }
    let missing: Vec<_> = IDENTITY_CHECKS.iter().filter(|c| all.check_passed(c).is_none()).collect();
    let failures: Vec<String> = all.failures().iter().map(|l| l.to_string()).collect();
    verdict(
        missing.is_empty() && failures.is_empty(),
        format!("{} cycle sets, missing checks {missing:?}, failures {failures:?}", members.len()),
    )
}

fn criterion_7(members: &[(CycleSet, Brace)]) -> Verdict {
    let mut problems = Vec::new();
    for (x, b) in members {
        if let Err(e) = b.check_axioms(0) {
            problems.push(format!("axioms {e}"));
        }
        let n = x.size();
        for i in 0..n {
            for j in 0..n {
                let (gi, gj, gij) = (b.generator(i).unwrap(), b.generator(j).unwrap(), b.generator(x.op(i, j)).unwrap());
                if b.add(gi, gj) != b.mul(gi, gij) {
                    problems.push(format!("lambda sum at ({i},{j}) in\n{x}"));
                }
            }
        }
        let socle: BTreeSet<usize> = b.socle().members.into_iter().collect();
        let fix: BTreeSet<usize> = b.fix().members.into_iter().collect();
        if b.center().members.iter().any(|z| fix.contains(z) && !socle.contains(z)) {
            problems.push(format!("Z ∩ Fix not in Soc for\n{x}"));
        }
        if b.size() > 1 && prime_power(b.size() as u64).is_some() && fix.len() <= 1 {
            problems.push(format!("trivial Fix in a p-brace for\n{x}"));
        }
        if b.additive_exponent() % x.diagonal().order() != 0 {
            problems.push(format!("o(T) does not divide d(X) for\n{x}"));
        }
    }
    verdict(problems.is_empty(), format!("{} braces, problems {problems:?}", members.len()))
}

fn criterion_8(members: &[(CycleSet, Brace)]) -> Verdict {
    let mut problems = Vec::new();
    for k in 0..=10u32 {
        let b = Brace::bk_brace(k).unwrap();
        if let Err(e) = b.check_axioms(k as u64) {
            problems.push(format!("B_{k}: {e}"));
        }
        if k < 2 {
            continue;
        }
        let size = b.size();
        let half = size / 2;
        let involutions: BTreeSet<usize> = (0..size).filter(|&a| b.mul(a, a) == 0).collect();
        if involutions != BTreeSet::from([0, 1, half, half + 1]) {
            problems.push(format!("B_{k}: involutions {involutions:?}"));
        }
        // B_k° = <1>∘ × <2>+, a direct product of commuting subgroups
        let evens: Vec<usize> = (0..size).step_by(2).collect();
        let product: BTreeSet<usize> = [0, 1].iter().flat_map(|&a| evens.iter().map(move |&e| (a, e))).map(|(a, e)| b.mul(a, e)).collect();
        let commute = evens.iter().all(|&e| b.mul(1, e) == b.mul(e, 1));
        if !b.is_multiplicative_subgroup(&evens) || product.len() != size || !commute || b.mul(1, 1) != 0 {
            problems.push(format!("B_{k}: not <1> x <2>+"));
        }
        if b.multiplicative_order(2) != half as u64 {
            problems.push(format!("B_{k}: <2>+ not cyclic of order {half}"));
        }
    }
    let mut count = 0;
    for (x, b) in members {
        for z in b.central_involutions() {
            count += 1;
            match b.central_involution_subbrace(z) {
                Ok(s) if s.subset.len() == 1 << s.k && s.subset.verify_kind() => {}
                Ok(_) => problems.push(format!("z={z} subbrace mismatch in\n{x}")),
                Err(e) => problems.push(format!("z={z}: {e} in\n{x}")),
            }
        }
    }
    verdict(problems.is_empty(), format!("B_0..B_10 and {count} central involutions, problems {problems:?}"))
}

fn criterion_9() -> Verdict {
    let mut problems = Vec::new();
    let mut checked = 0;
    for m in 2..=64u64 {
        let Some((p, _)) = prime_power(m) else { continue };
        let found: BTreeSet<_> = classify_fixed_point_free(m, p).unwrap().iter().map(|g| g.to_permutation()).collect();
        if found != predicted_fixed_point_free(m).unwrap() {
            problems.push(format!("Hol(Z_{m})"));
        }
        checked += 1;
    }
    for v in 2..=6 {
        let found: BTreeSet<_> = t2_fixed_point_free_involutions(v).into_iter().collect();
        if found != t2_predicted(v) {
            problems.push(format!("T2 at 2^{v}"));
        }
    }
    verdict(problems.is_empty(), format!("{checked} prime powers, 2^v for v=2..6, mismatches {problems:?}"))
}

fn criterion_10(members: &[(CycleSet, Brace)]) -> Verdict {
    let mut problems = Vec::new();
    let (mut irreducible, mut full) = (0, 0);
    for (x, b) in members {
        if x.is_irreducible() {
            irreducible += 1;
            let primes_x = prime_divisors(x.size() as u64);
            let primes_g = prime_divisors(b.size() as u64);
            if primes_x != primes_g || !x.pi_type().unwrap().is_pi_type {
                problems.push(format!("pi mismatch for\n{x}"));
            }
        }
        if x.diagonal().cycle_structure().is_full_cycle {
            full += 1;
            if !x.is_irreducible() {
                problems.push(format!("full-cycle member reducible\n{x}"));
            }
        }
    }
    verdict(problems.is_empty(), format!("{irreducible} irreducible, {full} full-cycle members, problems {problems:?}"))
}

fn main() {
    let mut suite = Suite { failed: false };
    let minutes = |m: u64| Duration::from_secs(60 * m);

    suite.run(1, "X_{4,19} fixture", minutes(1), criterion_1);
    let found4 = full_cycle_solutions(4, true);
    suite.run(2, "uniqueness at n=4", minutes(1), || criterion_2(&found4));
    let mut found8 = Vec::new();
    suite.run(3, "n=8 nonexistence", minutes(5), || criterion_3(&mut found8));
    suite.run(4, "n=16 appendix model", Duration::MAX, criterion_4);
    suite.run(5, "odd prime powers", minutes(5), criterion_5);

    let mut sets = corpus(4).unwrap();
    sets.extend(found4);
    sets.extend(found8);
    let members: Vec<(CycleSet, Brace)> = sets
        .into_iter()
        .map(|x| {
            let b = Brace::permutation_brace(&x).unwrap();
            (x, b)
        })
        .collect();
    suite.run(6, "identity suite", minutes(10), || criterion_6(&members));
    suite.run(7, "brace axioms and structure", minutes(2), || criterion_7(&members));
    suite.run(8, "B_k suite", minutes(1), || criterion_8(&members));
    suite.run(9, "holomorph oracles", minutes(1), criterion_9);
    suite.run(10, "pi-type", minutes(1), || criterion_10(&members));

    if suite.failed {
        std::process::exit(1);
    }
}
