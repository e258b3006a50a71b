use endocable::search::{
    appendix_model, build_model, enumerate::enumerate_cyclesets, solve, solve_with, Budget, Diagonal, Mode,
    ModelSpec, SolveOptions, Status,
};
use endocable::{CycleSet, Permutation};
use proptest::prelude::*;

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Independent oracle: rows are chosen whole, and the cycloid equation is
/// checked on every triple whose four table references lie in chosen rows.
fn oracle(n: usize, diag: Option<&[usize]>) -> Vec<Vec<usize>> {
    fn go(n: usize, rows: &mut Vec<Vec<usize>>, perms: &[Vec<usize>], diag: Option<&[usize]>, out: &mut Vec<Vec<usize>>) {
        let k = rows.len();
        if k == n {
            let table: Vec<usize> = rows.concat();
            let mut seen = vec![false; n];
            for i in 0..n {
                seen[table[i * n + i]] = true;
            }
            if seen.iter().all(|&s| s) {
                out.push(table);
            }
            return;
        }
        for p in perms {
            if diag.is_some_and(|d| p[k] != d[k]) {
                continue;
            }
            rows.push(p.clone());
            let ok = (0..=k).all(|x| {
                (0..=k).all(|y| {
                    let (a, c) = (rows[x][y], rows[y][x]);
                    if a > k || c > k {
                        return true;
                    }
                    (0..n).all(|z| rows[a][rows[x][z]] == rows[c][rows[y][z]])
                })
            });
            if ok {
                go(n, rows, perms, diag, out);
            }
            rows.pop();
        }
    }
    let perms = permutations(n);
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &perms, diag, &mut out);
    out
}

fn tables(sets: &[CycleSet]) -> Vec<Vec<usize>> {
    let mut t: Vec<Vec<usize>> = sets.iter().map(|x| x.table().to_vec()).collect();
    t.sort();
    t
}

#[test]
fn raw_enumeration_matches_oracle() {
    for n in 1..=4 {
        let mut expected = oracle(n, None);
        expected.sort();
        let got = enumerate_cyclesets(n, Diagonal::None, false).unwrap();
        assert_eq!(tables(&got), expected, "n={n}");
    }
}

#[test]
fn full_cycle_enumeration_matches_oracle() {
    for n in 2..=6 {
        let diag: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let mut expected = oracle(n, Some(&diag));
        expected.sort();
        let got = enumerate_cyclesets(n, Diagonal::FullCycle, false).unwrap();
        assert_eq!(tables(&got), expected, "n={n}");
    }
}

#[test]
fn full_cycle_four_irretractable_solutions_are_x4_19() {
    let mut spec = ModelSpec::new(4);
    spec.diagonal = Diagonal::FullCycle;
    spec.require_irretractable = true;
    let out = solve(&build_model(spec).unwrap(), Mode::All, Budget::unlimited());
    assert_eq!(out.status, Status::Sat);
    let x = CycleSet::x4_19();
    assert!(out.solutions.contains(&x));
    for s in &out.solutions {
        assert!(s.are_isomorphic(&x).unwrap().is_some());
    }
}

#[test]
fn appendix_three_decide_agrees_with_all() {
    let m = appendix_model(3).unwrap();
    let decide = solve(&m, Mode::Decide, Budget::unlimited());
    let all = solve(&m, Mode::All, Budget::unlimited());
    assert_eq!(decide.status, Status::Unsat);
    assert_eq!(all.status, Status::Unsat);
    assert!(all.solutions.is_empty());
}

#[test]
fn explicit_identity_diagonal() {
    let mut spec = ModelSpec::new(5);
    spec.diagonal = Diagonal::Explicit(Permutation::identity(5));
    let out = solve(&build_model(spec).unwrap(), Mode::All, Budget::unlimited());
    let mut expected = oracle(5, Some(&[0, 1, 2, 3, 4]));
    expected.sort();
    assert_eq!(tables(&out.solutions), expected);
}

#[test]
fn single_thread_statistics_are_reproducible() {
    let m = appendix_model(3).unwrap();
    let a = solve(&m, Mode::Decide, Budget::unlimited());
    let b = solve(&m, Mode::Decide, Budget::unlimited());
    assert_eq!((a.stats.nodes, a.stats.propagations), (b.stats.nodes, b.stats.propagations));
}

fn spec_strategy() -> impl Strategy<Value = ModelSpec> {
    (
        prop::sample::select(vec![None, Some(1usize), Some(3)]),
        prop::sample::select(vec![None, Some(2usize)]),
        any::<bool>(),
        prop::collection::vec((0..4usize, 0..4usize, 0..4usize), 0..3),
        any::<bool>(),
    )
        .prop_map(|(beta, shift, irr, fixed, full)| {
            let mut s = ModelSpec::new(4);
            s.central_symmetry = beta;
            s.shift_automorphism = shift;
            s.require_irretractable = irr;
            s.fixed_cells = fixed;
            if full {
                s.diagonal = Diagonal::FullCycle;
            }
            s
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // the solver's ALL mode equals the oracle enumeration filtered by the
    // model's own post-check
    #[test]
    fn solver_matches_filtered_oracle(spec in spec_strategy(), threads in 1usize..3) {
        let model = build_model(spec).unwrap();
        let mut expected: Vec<Vec<usize>> = oracle(4, None)
            .into_iter()
            .filter(|t| model.is_satisfied_by(&CycleSet::validate(4, t.clone()).unwrap()))
            .collect();
        expected.sort();
        let out = solve_with(&model, &SolveOptions { mode: Mode::All, budget: Budget::unlimited(), threads });
        prop_assert_eq!(tables(&out.solutions), expected.clone());
        prop_assert_eq!(out.status == Status::Sat, !expected.is_empty());
        let first = solve(&model, Mode::First, Budget::unlimited());
        prop_assert_eq!(first.solutions.len(), usize::from(!expected.is_empty()));
        if let Some(x) = first.solutions.first() {
            prop_assert!(expected.contains(&x.table().to_vec()));
        }
    }
}
