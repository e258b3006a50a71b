use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use endocable::endocable::{central_endo, endocable, identity_suite_with, phi_z, scalar_endo};
use endocable::perm::{classify_fixed_point_free, predicted_fixed_point_free, t2_fixed_point_free_involutions, t2_predicted, DEFAULT_CAP};
use endocable::search::enumerate::enumerate_cyclesets;
use endocable::search::{
    build_model, solve_with, verify_theorem, Budget, Diagonal, Mode, ModelSpec, SolveOptions, Theorem, TheoremOptions,
};
use endocable::{Brace, CycleSet, Error, Permutation, Report};
use sha2::{Digest, Sha256};

use crate::{CableArgs, Cli, Command, DiagonalArg, ModeArg, OracleCmd, SearchArgs, Suite, VerifyArgs};

/// What a command produced: the report, and cycle sets to emit after it.
struct Output {
    report: Report,
    digest_input: Vec<u8>,
    sets: Vec<CycleSet>,
    file: Option<std::path::PathBuf>,
}

impl Output {
    fn new(digest_input: Vec<u8>) -> Output {
        Output { report: Report::new(), digest_input, sets: Vec::new(), file: None }
    }
}

fn closure_cap() -> Result<usize> {
    match std::env::var("ENDOCABLE_CAP") {
        Ok(v) => v.trim().parse().with_context(|| format!("ENDOCABLE_CAP={v:?} is not a number")),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn load_cycleset(bytes: &[u8], path: &Path) -> Result<CycleSet> {
    let text = std::str::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    CycleSet::parse(text).with_context(|| format!("parsing {}", path.display()))
}

fn budget(nodes: Option<u64>, secs: Option<u64>) -> Budget {
    Budget { max_nodes: nodes, max_time: secs.map(Duration::from_secs) }
}

pub fn run(cli: &Cli, echo: &[String]) -> Result<bool> {
    let out = match &cli.command {
        Command::Analyze { file } => analyze(file, cli.seed)?,
        Command::Retract { file, output } => retract(file, output.clone())?,
        Command::Cable(args) => cable(args)?,
        Command::Verify(args) => verify(args, cli.seed, echo)?,
        Command::Search(args) => search(args)?,
        Command::Enumerate { n, diagonal, dedup } => {
            let diag = match diagonal {
                DiagonalArg::None => Diagonal::None,
                DiagonalArg::Fullcycle => Diagonal::FullCycle,
            };
            let mut out = Output::new(echo.join(" ").into_bytes());
            let sets = enumerate_cyclesets(*n, diag, *dedup)?;
            out.report.result("count", sets.len());
            out.sets = sets;
            out
        }
        Command::Oracle { which } => oracle(which, echo)?,
    };

    let mut text = String::new();
    writeln!(text, "# command: endocable {}", echo.join(" "))?;
    writeln!(text, "# input-digest: sha256:{}", hex::encode(Sha256::digest(&out.digest_input)))?;
    write!(text, "{}", out.report)?;
    let mut sets = String::new();
    for (k, x) in out.sets.iter().enumerate() {
        if k > 0 {
            sets.push_str("---\n");
        }
        write!(sets, "{x}")?;
    }
    match &out.file {
        Some(path) => fs::write(path, &sets).with_context(|| format!("writing {}", path.display()))?,
        None if !out.sets.is_empty() => {
            text.push_str("---\n");
            text.push_str(&sets);
        }
        None => {}
    }
    print!("{text}");
    Ok(out.report.all_pass())
}

fn describe_diagonal(t: &Permutation) -> String {
    let cs = t.cycle_structure();
    if t.is_identity() {
        "identity".to_string()
    } else if cs.is_full_cycle {
        format!("{}-cycle", t.degree())
    } else {
        let mut lens = cs.cycle_type.clone();
        lens.reverse();
        format!("cycle type {}", lens.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("+"))
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(sep)
}

fn analyze(file: &Path, seed: u64) -> Result<Output> {
    let bytes = read(file)?;
    let x = load_cycleset(&bytes, file)?;
    let cap = closure_cap()?;
    let mut out = Output::new(bytes);
    let r = &mut out.report;
    let t = x.diagonal();
    let g = x.permutation_group_with_cap(cap)?;
    let b = Brace::permutation_brace_with_cap(&x, cap)?;
    r.record("brace-axioms", b.check_axioms(seed).map_err(|e| e.to_string()));
    let (orbits, indecomposable) = x.decomposition()?;
    let pi = match x.pi_type_with_cap(cap) {
        Err(Error::NotIndecomposable) => None,
        r => Some(r?),
    };
    let tower = x.retraction_tower()?;
    let mpl = x.mpl()?;

    r.result("n", x.size());
    r.result("diagonal", t);
    r.result("diagonal-cycle-type", join(t.cycle_structure().cycle_type.iter().rev(), " "));
    r.result("diagonal-order", t.order());
    r.result("group-order", g.order());
    r.result("dehornoy-class", b.additive_exponent());
    r.result("socle-size", b.socle().len());
    r.result("fix-size", b.fix().len());
    r.result("center-size", b.center().len());
    r.result("orbits", orbits.len());
    r.result("indecomposable", indecomposable);
    r.result("irreducible", x.is_irreducible());
    match &pi {
        Some(pi) => {
            r.result("primes-of-size", join(&pi.primes_of_size, " "));
            r.result("primes-of-group", join(&pi.primes_of_group, " "));
            r.result("pi-type", pi.is_pi_type);
        }
        None => r.result("pi-type", "n/a (decomposable)"),
    }
    r.result("retraction-tower", join(tower.iter().map(CycleSet::size), " "));
    r.result("mpl", &mpl);

    let kind = match &pi {
        Some(pi) if pi.is_p_type => format!("; {}-type", pi.primes_of_size.iter().next().unwrap()),
        Some(pi) if pi.is_pi_type => "; pi-type".to_string(),
        Some(_) => "; not pi-type".to_string(),
        None => String::new(),
    };
    let mut summary = format!(
        "T: {}; {}; mpl={mpl}; ",
        describe_diagonal(t),
        if x.is_retractable() { "retractable" } else { "irretractable" }
    );
    if !indecomposable {
        summary.push_str("decomposable; ");
    }
    write!(summary, "|G|={}{kind}", g.order())?;
    r.result("summary", summary);
    Ok(out)
}

fn retract(file: &Path, output: Option<std::path::PathBuf>) -> Result<Output> {
    let bytes = read(file)?;
    let x = load_cycleset(&bytes, file)?;
    let mut out = Output::new(bytes);
    let (ret, hom) = x.retract()?;
    out.report.check("projection-is-homomorphism", hom.is_homomorphism(), || "projection".into());
    out.report.result("retraction-size", ret.size());
    out.report.result("fiber-sizes", join(hom.fiber_sizes(), " "));
    out.report.result("retraction-tower", join(x.retraction_tower()?.iter().map(CycleSet::size), " "));
    out.report.result("mpl", x.mpl()?);
    out.sets.push(ret);
    out.file = output;
    Ok(out)
}

fn cable(args: &CableArgs) -> Result<Output> {
    let bytes = read(&args.file)?;
    let x = load_cycleset(&bytes, &args.file)?;
    let cap = closure_cap()?;
    let mut out = Output::new(bytes);
    let r = &mut out.report;
    let sel = &args.selector;
    let mut cur = x;
    for step in 1..=args.iterate {
        let b = Brace::permutation_brace_with_cap(&cur, cap)?;
        let t = cur.diagonal().clone();
        let center = b.center().members;
        let central = |i: usize| -> Result<(usize, Permutation)> {
            let z = *center
                .get(i)
                .ok_or_else(|| anyhow!("center index {i} out of range: the center has {} elements", center.len()))?;
            Ok((z, b.element_permutation(z).ok_or(Error::NotPermutationBrace)?.clone()))
        };
        let (phi, predicted, form) = if let Some(k) = sel.scalar {
            (scalar_endo(&b, k)?, t.pow(k), format!("T^{k}"))
        } else if let Some(i) = sel.central {
            let (z, lz) = central(i)?;
            (central_endo(&b, z)?, t.conjugate_by(&lz), format!("lambda_{z}^-1 T lambda_{z}"))
        } else {
            let i = sel.phi_z.expect("clap enforces one selector");
            let (z, lz) = central(i)?;
            let predicted = t.compose(&t.conjugate_by(&lz).inverse())?;
            (phi_z(&b, z)?, predicted, format!("T (lambda_{z}^-1 T lambda_{z})^-1"))
        };
        let next = endocable(&cur, &phi)?;
        r.check("diagonal-closed-form", next.diagonal() == &predicted, || {
            format!("step {step}: T_phi = {} but {form} = {predicted}", next.diagonal())
        });
        r.result(&format!("step-{step}-predicted"), form);
        cur = next;
    }
    r.result("diagonal", cur.diagonal());
    r.result("diagonal-cycle-type", join(cur.diagonal().cycle_structure().cycle_type.iter().rev(), " "));
    out.sets.push(cur);
    out.file = args.output.clone();
    Ok(out)
}

fn verify(args: &VerifyArgs, seed: u64, echo: &[String]) -> Result<Output> {
    match args.suite {
        Suite::Identities => {
            let [file] = &args.args[..] else { bail!("--suite identities takes exactly one FILE") };
            let path = Path::new(file);
            let bytes = read(path)?;
            let x = load_cycleset(&bytes, path)?;
            let b = Brace::permutation_brace_with_cap(&x, closure_cap()?)?;
            let mut out = Output::new(bytes);
            out.report.record("brace-axioms", b.check_axioms(seed).map_err(|e| e.to_string()));
            out.report.append(identity_suite_with(&x, &b)?);
            Ok(out)
        }
        Suite::Theorem => {
            let [name, n] = &args.args[..] else { bail!("--suite theorem takes NAME N") };
            let theorem: Theorem = name.parse()?;
            let n: usize = n.parse().with_context(|| format!("bad size {n:?}"))?;
            let opts = TheoremOptions {
                budget: budget(args.budget_nodes, args.budget_secs),
                threads: args.threads,
                extended: args.extended,
            };
            let outcome = match verify_theorem(theorem, n, &opts) {
                Err(Error::RequiresExtended(what)) => {
                    bail!("{what} is a long run and is refused by default; rerun with --extended to allow it")
                }
                r => r?,
            };
            let mut out = Output::new(echo.join(" ").into_bytes());
            out.report = outcome.report;
            Ok(out)
        }
    }
}

fn search(args: &SearchArgs) -> Result<Output> {
    let bytes = read(&args.model)?;
    let text = std::str::from_utf8(&bytes).context("model file is not UTF-8")?;
    let spec = ModelSpec::parse(text).with_context(|| format!("parsing {}", args.model.display()))?;
    let model = build_model(spec)?;
    let mode = match args.mode {
        ModeArg::First => Mode::First,
        ModeArg::All => Mode::All,
        ModeArg::Decide => Mode::Decide,
    };
    let outcome = solve_with(&model, &SolveOptions { mode, budget: budget(args.budget_nodes, args.budget_secs), threads: args.threads });
    let mut out = Output::new(bytes);
    let r = &mut out.report;
    r.result("cells", model.num_cells());
    r.result("classes", model.num_classes());
    r.result("status", outcome.status);
    r.result("solutions", outcome.solutions.len());
    r.result("nodes", outcome.stats.nodes);
    r.result("propagations", outcome.stats.propagations);
    r.result("explored-fraction", format_args!("{:.6}", outcome.stats.explored_fraction));
    for x in &outcome.solutions {
        r.check("solution-satisfies-model", model.is_satisfied_by(x), || x.serialize());
    }
    out.sets = outcome.solutions;
    Ok(out)
}

fn oracle(which: &OracleCmd, echo: &[String]) -> Result<Output> {
    let mut out = Output::new(echo.join(" ").into_bytes());
    let r = &mut out.report;
    match *which {
        OracleCmd::Hol { p, v } => {
            let m = p.checked_pow(v).ok_or_else(|| anyhow!("{p}^{v} overflows"))?;
            let found = classify_fixed_point_free(m, p)?;
            let predicted = predicted_fixed_point_free(m)?;
            let found_perms: std::collections::BTreeSet<Permutation> = found.iter().map(|g| g.to_permutation()).collect();
            r.result("modulus", m);
            r.result("found-count", found.len());
            for g in &found {
                r.result("found", g);
            }
            r.result("predicted-count", predicted.len());
            r.check("hol-fixed-point-free", found_perms == predicted, || "brute force differs from the closed form".into());
        }
        OracleCmd::T2 { v } => {
            if !(2..=6).contains(&v) {
                bail!("t2 oracle needs 2 <= v <= 6");
            }
            let found: std::collections::BTreeSet<Permutation> = t2_fixed_point_free_involutions(v).into_iter().collect();
            let predicted = t2_predicted(v);
            r.result("found-count", found.len());
            for g in &found {
                r.result("found", g);
            }
            r.result("predicted-count", predicted.len());
            r.check("t2-centralizer", found == predicted, || "brute force differs from the closed form".into());
        }
    }
    Ok(out)
}
