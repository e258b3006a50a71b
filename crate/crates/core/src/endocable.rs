//! λ-endomorphisms of braces and the endocabled cycle sets `X_φ` with
//! `x *_φ y = lambda_{φ(lambda_x)}^-1(y)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::brace::Brace;
use crate::cycleset::CycleSet;
use crate::error::{Error, Result};
use crate::par;
use crate::perm::{PermGroup, Permutation, DEFAULT_CAP};
use crate::report::Report;

#[derive(Debug, Clone)]
pub struct LambdaEndo<'b> {
    brace: &'b Brace,
    image: Vec<usize>,
    is_full: bool,
    is_relative: bool,
}

impl<'b> LambdaEndo<'b> {
    /// Checks additivity (an error if it fails) and computes the full and
    /// relative λ-commutation flags.
    pub fn classify(brace: &'b Brace, image: Vec<usize>) -> Result<LambdaEndo<'b>> {
        let n = brace.size();
        if image.len() != n {
            return Err(Error::ImageLength { got: image.len(), expected: n });
        }
        if let Some(&bad) = image.iter().find(|&&v| v >= n) {
            return Err(Error::ImageLength { got: bad, expected: n });
        }
        let witness = par::find_first(n, |a| {
            (0..n).find(|&b| image[brace.add(a, b)] != brace.add(image[a], image[b])).map(|b| (a, b))
        });
        if let Some((a, b)) = witness {
            return Err(Error::NotAdditiveHom { a, b });
        }
        let commutes = |g: usize| (0..n).all(|h| brace.lam(g, image[h]) == image[brace.lam(g, h)]);
        let is_full = par::find_first(n, |g| (!commutes(g)).then_some(())).is_none();
        let is_relative = is_full || {
            let img: BTreeSet<usize> = image.iter().copied().collect();
            img.into_iter().all(commutes)
        };
        Ok(LambdaEndo { brace, image, is_full, is_relative })
    }

    pub fn brace(&self) -> &'b Brace {
        self.brace
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, g: usize) -> usize {
        self.image[g]
    }

    /// Always true for a constructed value; additivity is checked on entry.
    pub fn is_additive_hom(&self) -> bool {
        true
    }

    pub fn is_full(&self) -> bool {
        self.is_full
    }

    pub fn is_relative(&self) -> bool {
        self.is_relative
    }

    /// `φ(B)`, sorted.
    pub fn image_set(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.image.iter().copied().collect();
        set.into_iter().collect()
    }

    fn expect_full(self, what: &str) -> Result<Self> {
        if self.is_full {
            Ok(self)
        } else {
            Err(Error::InvariantViolation(format!("{what} is not a full λ-endomorphism")))
        }
    }
}

/// `g ↦ k·g`, with `k` reduced modulo the additive exponent.
pub fn scalar_endo(brace: &Brace, k: i64) -> Result<LambdaEndo<'_>> {
    let k = k.rem_euclid(brace.additive_exponent() as i64);
    let image = (0..brace.size()).map(|g| brace.times(k, g)).collect();
    LambdaEndo::classify(brace, image)?.expect_full("scalar map")
}

fn require_central(brace: &Brace, z: usize) -> Result<()> {
    if z >= brace.size() || (0..brace.size()).any(|h| brace.mul(z, h) != brace.mul(h, z)) {
        return Err(Error::NotCentral(z));
    }
    Ok(())
}

/// `lambda_z` for central `z`.
pub fn central_endo(brace: &Brace, z: usize) -> Result<LambdaEndo<'_>> {
    require_central(brace, z)?;
    let image = brace.lam_row(z).iter().map(|&v| v as usize).collect();
    LambdaEndo::classify(brace, image)?.expect_full("lambda of a central element")
}

/// `h ↦ Σ k_g lambda_g(h)` for a class function `g ↦ k_g`.
pub fn groupring_endo<'b>(brace: &'b Brace, coeffs: &BTreeMap<usize, i64>) -> Result<LambdaEndo<'b>> {
    let n = brace.size();
    let coeff = |g: usize| coeffs.get(&g).copied().unwrap_or(0);
    for (&g, &k) in coeffs {
        for h in 0..n {
            let conj = brace.mul(brace.mul(h, g), brace.inv(h));
            if coeff(conj) != k {
                return Err(Error::NotCentralInGroupRing { g, h });
            }
        }
    }
    let image = (0..n)
        .map(|h| {
            coeffs
                .iter()
                .fold(0, |acc, (&g, &k)| brace.add(acc, brace.times(k, brace.lam(g, h))))
        })
        .collect();
    LambdaEndo::classify(brace, image)?.expect_full("group ring element")
}

pub fn sum_endo<'b>(phi: &LambdaEndo<'b>, psi: &LambdaEndo<'b>) -> Result<LambdaEndo<'b>> {
    if !std::ptr::eq(phi.brace, psi.brace) {
        return Err(Error::BraceMismatch);
    }
    let b = phi.brace;
    let image = (0..b.size()).map(|h| b.add(phi.image[h], psi.image[h])).collect();
    LambdaEndo::classify(b, image)
}

/// `h ↦ φ(ψ(h))`, classified afresh.
pub fn compose_endo<'b>(phi: &LambdaEndo<'b>, psi: &LambdaEndo<'b>) -> Result<LambdaEndo<'b>> {
    if !std::ptr::eq(phi.brace, psi.brace) {
        return Err(Error::BraceMismatch);
    }
    let image = psi.image.iter().map(|&h| phi.image[h]).collect();
    LambdaEndo::classify(phi.brace, image)
}

/// `id - lambda_z`.
pub fn phi_z(brace: &Brace, z: usize) -> Result<LambdaEndo<'_>> {
    require_central(brace, z)?;
    let image = (0..brace.size()).map(|g| brace.sub(g, brace.lam(z, g))).collect();
    LambdaEndo::classify(brace, image)
}

fn require_permutation_brace(x: &CycleSet, brace: &Brace) -> Result<()> {
    let ok = brace.realization().is_some()
        && (0..x.size()).all(|p| {
            brace
                .generator(p)
                .and_then(|g| brace.element_permutation(g))
                .is_some_and(|perm| perm == x.lambda(p))
        });
    if ok {
        Ok(())
    } else {
        Err(Error::NotPermutationBrace)
    }
}

/// The endocabled cycle set `X_φ`.
pub fn endocable(x: &CycleSet, phi: &LambdaEndo<'_>) -> Result<CycleSet> {
    if !phi.is_relative {
        return Err(Error::NotRelativeEndo);
    }
    let b = phi.brace;
    require_permutation_brace(x, b)?;
    let n = x.size();
    let mut table = Vec::with_capacity(n * n);
    for p in 0..n {
        let e = phi.image[b.generator(p).unwrap()];
        let sigma = b.element_permutation(e).unwrap().inverse();
        table.extend_from_slice(sigma.images());
    }
    CycleSet::validate(n, table)
}

/// Classes of `x ~ y ⇔ φ(lambda_x) = φ(lambda_y)`, ordered by smallest
/// member. Checks `G(X)`-invariance and agreement with the retraction
/// classes of `X_φ`.
pub fn blocks(x: &CycleSet, phi: &LambdaEndo<'_>) -> Result<Vec<Vec<usize>>> {
    if !phi.is_full {
        return Err(Error::NotFullEndo);
    }
    let b = phi.brace;
    require_permutation_brace(x, b)?;
    let n = x.size();
    let key: Vec<usize> = (0..n).map(|p| phi.image[b.generator(p).unwrap()]).collect();
    let mut by_key: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (p, &k) in key.iter().enumerate() {
        let c = *by_key.entry(k).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(p);
    }
    for g in 0..b.size() {
        let perm = b.element_permutation(g).unwrap();
        for class in &classes {
            let k0 = key[perm.apply(class[0])];
            if class.iter().any(|&p| key[perm.apply(p)] != k0) {
                return Err(Error::InvariantViolation(format!(
                    "block {class:?} is not preserved by group element {g}"
                )));
            }
        }
    }
    let cabled = endocable(x, phi)?;
    if cabled.retraction_classes() != classes {
        return Err(Error::InvariantViolation(
            "blocks differ from the retraction classes of the endocabled cycle set".into(),
        ));
    }
    Ok(classes)
}

fn first<T>(mut it: impl Iterator<Item = T>) -> Option<T> {
    it.next()
}

fn outcome(witness: Option<String>) -> std::result::Result<(), String> {
    witness.map_or(Ok(()), Err)
}

/// Checks the properties of `φ = id - lambda_z` for central `z`.
/// Items (a)-(c) need `z∘z = 0`; (d) and `z ∉ φ(B)` hold for any central `z`
/// (the latter needs `z ≠ 0` to say anything).
pub fn phi_z_report(brace: &Brace, z: usize) -> Result<Report> {
    let phi = phi_z(brace, z)?;
    let b = brace;
    let n = b.size();
    let mut r = Report::new();
    r.check("phi-z-full", phi.is_full, || format!("z={z}"));
    let img = phi.image_set();
    if b.mul(z, z) == 0 {
        r.record(
            "phi-z-a",
            outcome(first((0..n).filter(|&g| phi.apply(phi.apply(g)) != b.times(2, phi.apply(g))).map(|g| format!("z={z} g={g}")))),
        );
        r.record(
            "phi-z-b",
            outcome(first(img.iter().filter(|&&g| b.lam(z, g) != b.neg(g)).map(|g| format!("z={z} g={g}")))),
        );
        r.record(
            "phi-z-c",
            outcome(first(
                img.iter()
                    .filter(|&&g| b.lam(g, z) != b.sub(z, b.times(2, g)))
                    .map(|g| format!("z={z} g={g}")),
            )),
        );
    } else {
        for name in ["phi-z-a", "phi-z-b", "phi-z-c"] {
            r.skip(name, format_args!("z={z} is not a multiplicative involution"));
        }
    }
    r.record(
        "phi-z-d",
        outcome(first((0..n).filter(|&g| phi.apply(g) != b.sub(z, b.lam(g, z))).map(|g| format!("z={z} g={g}")))),
    );
    if z == 0 {
        r.vacuous("cabling-out-center", "z = 0");
    } else {
        r.check("cabling-out-center", !img.contains(&z), || format!("z={z} lies in the image"));
    }
    Ok(r)
}

/// Diagonal of `X_φ`, computed directly.
fn cabled_diagonal(x: &CycleSet, b: &Brace, image: &[usize]) -> Permutation {
    let images = (0..x.size())
        .map(|p| {
            let e = image[b.generator(p).unwrap()];
            b.element_permutation(e).unwrap().inverse().apply(p)
        })
        .collect();
    Permutation::new(images).expect("diagonal of a cycle set")
}

fn check_cabling(x: &CycleSet, b: &Brace, name: &str, phi: &LambdaEndo<'_>, r: &mut Report) {
    let cabled = match endocable(x, phi) {
        Ok(c) => c,
        Err(e) => {
            r.record("endocabling-valid", Err(format!("{name}: {e}")));
            return;
        }
    };
    r.record("endocabling-valid", Ok(()));
    let cabled_group = match PermGroup::closure(x.size(), cabled.lambdas(), DEFAULT_CAP) {
        Ok(g) => g.element_set(),
        Err(e) => {
            r.record("permutation-group-of-cabling", Err(format!("{name}: {e}")));
            return;
        }
    };
    let predicted: BTreeSet<Permutation> =
        phi.image_set().into_iter().map(|e| b.element_permutation(e).unwrap().clone()).collect();
    r.check("permutation-group-of-cabling", cabled_group == predicted, || {
        format!("{name}: |G(X_phi)|={} |phi(G)|={}", cabled_group.len(), predicted.len())
    });
    if phi.is_full {
        r.check("image-is-left-ideal", b.is_left_ideal(&phi.image_set()), || name.to_string());
        r.record("blocks-are-retraction-classes", blocks(x, phi).map(|_| ()).map_err(|e| format!("{name}: {e}")));
    }
}

/// Mechanical check of the endocabling identities on `X`, over the family of
/// all scalars `0..exp+`, all `lambda_z` for central `z`, and their pairwise
/// sums.
pub fn identity_suite(x: &CycleSet) -> Result<Report> {
    let b = Brace::permutation_brace(x)?;
    identity_suite_with(x, &b)
}

pub fn identity_suite_with(x: &CycleSet, b: &Brace) -> Result<Report> {
    require_permutation_brace(x, b)?;
    let n = x.size();
    let t = x.diagonal().clone();
    let exp = b.additive_exponent();
    let center = b.center().members;
    let mut r = Report::new();
    r.result("brace-size", b.size());
    r.result("additive-exponent", exp);
    r.result("center-size", center.len());

    let mut family: Vec<(String, LambdaEndo<'_>)> = Vec::new();
    for k in 0..exp as i64 {
        family.push((format!("k={k}"), scalar_endo(b, k)?));
    }
    for &z in &center {
        family.push((format!("lz={z}"), central_endo(b, z)?));
    }
    r.result("family-size", family.len());

    for (name, phi) in &family {
        r.check("family-member-full", phi.is_full, || name.clone());
        check_cabling(x, b, name, phi, &mut r);
    }

    // scalar diagonals, including k = exp+ (the zero map)
    for k in 0..=exp as i64 {
        let phi = scalar_endo(b, k)?;
        let tk = cabled_diagonal(x, b, phi.image());
        r.check("scalar-diagonal-power", tk == t.pow(k), || format!("k={k}"));
    }
    r.check("order-of-diagonal-divides-dehornoy-class", exp.is_multiple_of(t.order()), || {
        format!("o(T)={} d(X)={exp}", t.order())
    });

    // the dual cycle set
    let dual = endocable(x, &scalar_endo(b, -1)?)?;
    let tinv = t.inverse();
    let dual_ok = (0..n).all(|p| (0..n).all(|q| dual.op(p, q) == x.lambda(tinv.apply(p)).apply(q)));
    r.check("dual-cycle-set", dual_ok, || "table mismatch".into());
    r.check("dual-diagonal-inverse", dual.diagonal() == &tinv, || dual.diagonal().to_string());

    for &z in &center {
        let lz = b.element_permutation(z).unwrap();
        let tz = t.conjugate_by(lz);
        let phi = central_endo(b, z)?;
        let diag = cabled_diagonal(x, b, phi.image());
        r.check("central-diagonal-conjugate", diag == tz, || format!("z={z}"));
        r.check("diagonal-commutes-with-conjugate", t.commutes_with(&tz), || format!("z={z}"));
        r.merge(phi_z_report(b, z)?);
        let pz = phi_z(b, z)?;
        if pz.is_full {
            check_cabling(x, b, &format!("phi-z={z}"), &pz, &mut r);
        }
    }

    // ordered pairs; each worker returns its own report, merged in pair order
    let m = family.len();
    let pair_reports = par::map_range(m * m, |idx| {
        let (i, j) = (idx / m, idx % m);
        pair_checks(x, b, &family[i], &family[j], i <= j)
    });
    for pr in pair_reports {
        r.merge(pr?);
    }

    let fix = b.fix().members;
    for &f in &fix {
        let perm = b.element_permutation(f).unwrap();
        r.check("fix-automorphism", x.is_automorphism(perm), || format!("f={f}"));
        r.check("fix-centralizes-diagonal", perm.commutes_with(&t), || format!("f={f}"));
        let conj = (0..b.size()).all(|g| b.lam(f, g) == b.mul(b.mul(f, g), b.inv(f)));
        r.check("fix-acts-by-conjugation", conj, || format!("f={f}"));
    }
    constant_image_checks(x, b, &fix, &mut r)?;
    Ok(r)
}

fn pair_checks(
    x: &CycleSet,
    b: &Brace,
    (pn, phi): &(String, LambdaEndo<'_>),
    (qn, psi): &(String, LambdaEndo<'_>),
    with_sum: bool,
) -> Result<Report> {
    let n = x.size();
    let mut r = Report::new();
    let xp = endocable(x, phi)?;
    let xq = endocable(x, psi)?;
    let witness = first((0..n).flat_map(|p| (0..n).flat_map(move |q| (0..n).map(move |s| (p, q, s)))).filter(
        |&(p, q, s)| xq.op(xp.op(p, q), xp.op(p, s)) != xp.op(xq.op(q, p), xq.op(q, s)),
    ));
    r.record("mixed-cabling-law", outcome(witness.map(|w| format!("{pn},{qn} at {w:?}"))));

    let sum = sum_endo(phi, psi)?;
    let xs = endocable(x, &sum)?;
    let (tp, tq, ts) = (xp.diagonal(), xq.diagonal(), xs.diagonal());
    let w = first((0..n).flat_map(|p| (0..n).map(move |q| (p, q))).filter(|&(p, q)| {
        let v = xs.op(p, q);
        v != xq.op(tp.apply(p), xp.op(p, q)) || v != xp.op(tq.apply(p), xq.op(p, q))
    }));
    r.record("adding-two-cablings", outcome(w.map(|w| format!("{pn},{qn} at {w:?}"))));
    let comp = tp.compose_unchecked(tq);
    r.check("diagonal-of-sum", *ts == comp && comp == tq.compose_unchecked(tp), || format!("{pn},{qn}"));
    if with_sum {
        r.check("sum-full", sum.is_full, || format!("{pn}+{qn}"));
        check_cabling(x, b, &format!("{pn}+{qn}"), &sum, &mut r);
    }
    Ok(r)
}

/// For `X` of p-type and `f ∈ Fix` with `f^p = 0` (∘-power), the additive
/// extension of `lambda_x ↦ f^-1` is a λ-endomorphism and `x *_φ y = f(y)`.
fn constant_image_checks(x: &CycleSet, b: &Brace, fix: &[usize], r: &mut Report) -> Result<()> {
    let p = match x.pi_type() {
        Ok(pi) if pi.is_p_type => *pi.primes_of_size.iter().next().unwrap(),
        _ => {
            r.skip("fix-constant-endo", "not of p-type");
            return Ok(());
        }
    };
    let candidates: Vec<usize> = fix
        .iter()
        .copied()
        .filter(|&f| f != 0 && p % b.multiplicative_order(f) == 0)
        .collect();
    if candidates.is_empty() {
        r.skip("fix-constant-endo", "no nonzero fix element of order p");
        return Ok(());
    }
    for f in candidates {
        let target = b.inv(f);
        let image: Vec<usize> =
            (0..b.size()).map(|g| b.times(b.word(g).unwrap().len() as i64, target)).collect();
        let outcome = match LambdaEndo::classify(b, image) {
            Ok(phi) if phi.is_full => {
                let cabled = endocable(x, &phi)?;
                let perm = b.element_permutation(f).unwrap();
                let n = x.size();
                if (0..n).all(|p| (0..n).all(|q| cabled.op(p, q) == perm.apply(q))) {
                    Ok(())
                } else {
                    Err(format!("f={f}: cabled operation differs from f(y)"))
                }
            }
            Ok(_) => Err(format!("f={f}: not a full λ-endomorphism")),
            Err(e) => Err(format!("f={f}: {e}")),
        };
        r.record("fix-constant-endo", outcome);
    }
    Ok(())
}

/// Looks for a second central involution when `X_{kφ}` (with
/// `φ = id - lambda_z`) is retractable and `4 | d(X_{kφ})`. Cases where the
/// premises fail are recorded as skipped.
pub fn replacement_check(x: &CycleSet, z: usize, k: i64) -> Result<Report> {
    let b = Brace::permutation_brace(x)?;
    let mut r = Report::new();
    if !b.size().is_power_of_two() {
        r.skip("replacement-of-center", format_args!("|G(X)|={} is not a power of 2", b.size()));
        return Ok(r);
    }
    require_central(&b, z)?;
    if b.multiplicative_order(z) != 2 {
        r.skip("replacement-of-center", format_args!("o(z)={} for z={z}", b.multiplicative_order(z)));
        return Ok(r);
    }
    if k < 1 {
        r.skip("replacement-of-center", format_args!("k={k} < 1"));
        return Ok(r);
    }
    let phi = phi_z(&b, z)?;
    let image: Vec<usize> = phi.image().iter().map(|&g| b.times(k, g)).collect();
    let kphi = LambdaEndo::classify(&b, image)?;
    let cabled = endocable(x, &kphi)?;
    let d = Brace::permutation_brace(&cabled)?.additive_exponent();
    let retractable = cabled.is_retractable();
    r.result("cabled-retractable", retractable);
    r.result("cabled-dehornoy-class", d);
    if !retractable || d % 4 != 0 {
        r.skip("replacement-of-center", format_args!("premises fail (retractable={retractable}, d={d})"));
        return Ok(r);
    }
    let other = b.central_involutions().into_iter().find(|&w| w != 0 && w != z);
    match other {
        Some(_) => r.check("replacement-of-center", true, String::new),
        None => r.check("replacement-of-center", false, || format!("no second central involution besides z={z}")),
    }
    if let Some(w) = other {
        r.result("second-central-involution", w);
    }
    Ok(r)
}

/// All full λ-endomorphisms, found by trying every assignment of images to a
/// greedy additive generating set and extending additively.
pub fn enumerate_lambda_endos(brace: &Brace, cap: usize) -> Result<Vec<LambdaEndo<'_>>> {
    let b = brace;
    let n = b.size();
    let mut by_order: Vec<usize> = (0..n).collect();
    by_order.sort_by_key(|&g| (std::cmp::Reverse(b.additive_order(g)), g));
    let mut gens: Vec<usize> = Vec::new();
    let mut span = vec![false; n];
    span[0] = true;
    for g in by_order {
        if span.iter().all(|&s| s) {
            break;
        }
        if span[g] {
            continue;
        }
        gens.push(g);
        span = additive_span(b, &gens);
    }
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| (0..n).filter(|&h| b.additive_order(g).is_multiple_of(b.additive_order(h))).collect())
        .collect();
    let total = candidates.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    if total.is_none_or(|t| t > cap) {
        return Err(Error::CapExceeded { cap });
    }
    let mut found: BTreeMap<Vec<usize>, LambdaEndo<'_>> = BTreeMap::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        let targets: Vec<usize> = choice.iter().zip(&candidates).map(|(&c, cs)| cs[c]).collect();
        if let Some(image) = extend_additively(b, &gens, &targets) {
            let endo = LambdaEndo::classify(b, image)?;
            if endo.is_full {
                found.entry(endo.image.clone()).or_insert(endo);
            }
        }
        // odometer over the candidate lists
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(found.into_values().collect());
            }
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn additive_span(b: &Brace, gens: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; b.size()];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(a) = queue.pop_front() {
        for &g in gens {
            let c = b.add(a, g);
            if !seen[c] {
                seen[c] = true;
                queue.push_back(c);
            }
        }
    }
    seen
}

fn extend_additively(b: &Brace, gens: &[usize], targets: &[usize]) -> Option<Vec<usize>> {
    let n = b.size();
    let mut image = vec![usize::MAX; n];
    image[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(a) = queue.pop_front() {
        for (&g, &t) in gens.iter().zip(targets) {
            let c = b.add(a, g);
            let v = b.add(image[a], t);
            if image[c] == usize::MAX {
                image[c] = v;
                queue.push_back(c);
            } else if image[c] != v {
                return None;
            }
        }
    }
    Some(image)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> CycleSet {
        CycleSet::x4_19()
    }

    #[test]
    fn classify_basic_maps() {
        let b = Brace::permutation_brace(&x()).unwrap();
        let id = LambdaEndo::classify(&b, (0..8).collect()).unwrap();
        assert!(id.is_full() && id.is_relative());
        let zero = LambdaEndo::classify(&b, vec![0; 8]).unwrap();
        assert!(zero.is_full());
        let two = LambdaEndo::classify(&b, (0..8).map(|g| b.add(g, g)).collect()).unwrap();
        assert!(two.is_full());
        assert!(matches!(LambdaEndo::classify(&b, vec![0; 3]), Err(Error::ImageLength { .. })));
    }

    #[test]
    fn non_additive_map_is_rejected() {
        let b = Brace::bk_brace(2).unwrap();
        // swap 1 and 2 only: not additive on Z/4
        assert!(matches!(
            LambdaEndo::classify(&b, vec![0, 2, 1, 3]),
            Err(Error::NotAdditiveHom { .. })
        ));
    }

    #[test]
    fn scalars_and_sums() {
        let b = Brace::permutation_brace(&x()).unwrap();
        let exp = b.additive_exponent() as i64;
        assert_eq!(scalar_endo(&b, exp).unwrap().image(), &[0; 8]);
        assert_eq!(scalar_endo(&b, 0).unwrap().image(), &[0; 8]);
        let neg = scalar_endo(&b, -1).unwrap();
        for g in 0..8 {
            assert_eq!(neg.apply(g), b.neg(g));
        }
        let three = scalar_endo(&b, 3).unwrap();
        let two = scalar_endo(&b, 2).unwrap();
        let six = compose_endo(&three, &two).unwrap();
        assert_eq!(six.image(), scalar_endo(&b, 6).unwrap().image());
        let zero = scalar_endo(&b, 0).unwrap();
        assert_eq!(sum_endo(&three, &zero).unwrap().image(), three.image());
        let other = Brace::permutation_brace(&x()).unwrap();
        let foreign = scalar_endo(&other, 1).unwrap();
        assert!(matches!(sum_endo(&three, &foreign), Err(Error::BraceMismatch)));
    }

    #[test]
    fn endocabling_by_scalars() {
        let x = x();
        let b = Brace::permutation_brace(&x).unwrap();
        assert_eq!(endocable(&x, &scalar_endo(&b, 1).unwrap()).unwrap(), x);
        let zero = endocable(&x, &scalar_endo(&b, 0).unwrap()).unwrap();
        assert_eq!(zero, CycleSet::trivial(4));
        let two = endocable(&x, &scalar_endo(&b, 2).unwrap()).unwrap();
        assert_eq!(two.diagonal(), &x.diagonal().pow(2));
    }

    #[test]
    fn cabling_with_foreign_brace_is_rejected() {
        let b = Brace::bk_brace(2).unwrap();
        let phi = scalar_endo(&b, 1).unwrap();
        assert!(matches!(endocable(&x(), &phi), Err(Error::NotPermutationBrace)));
    }

    #[test]
    fn block_partitions() {
        let x = x();
        let b = Brace::permutation_brace(&x).unwrap();
        assert_eq!(blocks(&x, &scalar_endo(&b, 1).unwrap()).unwrap(), x.retraction_classes());
        assert_eq!(blocks(&x, &scalar_endo(&b, 0).unwrap()).unwrap(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn central_endos() {
        let b = Brace::bk_brace(2).unwrap();
        let l2 = central_endo(&b, 2).unwrap();
        assert!(l2.is_full());
        assert_eq!(central_endo(&b, 0).unwrap().image(), &[0, 1, 2, 3]);
    }

    #[test]
    fn phi_z_on_b3() {
        let b = Brace::bk_brace(3).unwrap();
        let r = phi_z_report(&b, 4).unwrap();
        assert!(r.all_pass(), "{r}");
        for name in ["phi-z-a", "phi-z-b", "phi-z-c", "phi-z-d", "cabling-out-center"] {
            assert_eq!(r.check_passed(name), Some(true), "{name}");
        }
        let r0 = phi_z_report(&b, 0).unwrap();
        assert!(r0.all_pass(), "{r0}");
    }

    #[test]
    fn group_ring_endos() {
        let b = Brace::permutation_brace(&x()).unwrap();
        assert_eq!(groupring_endo(&b, &BTreeMap::from([(0, 1)])).unwrap().image(), &(0..8).collect::<Vec<_>>()[..]);
        // a conjugacy class sum
        let g = 1;
        let class: BTreeSet<usize> = (0..8).map(|h| b.mul(b.mul(h, g), b.inv(h))).collect();
        let coeffs: BTreeMap<usize, i64> = class.iter().map(|&c| (c, 1)).collect();
        assert!(groupring_endo(&b, &coeffs).unwrap().is_full());
        if class.len() > 1 {
            assert!(matches!(
                groupring_endo(&b, &BTreeMap::from([(g, 1)])),
                Err(Error::NotCentralInGroupRing { .. })
            ));
        }
    }

    #[test]
    fn enumerated_endos_contain_constructors() {
        let trivial = Brace::bk_brace(0).unwrap();
        assert_eq!(enumerate_lambda_endos(&trivial, 1000).unwrap().len(), 1);
        let b1 = Brace::bk_brace(1).unwrap();
        assert_eq!(enumerate_lambda_endos(&b1, 1000).unwrap().len(), 2);
        let b = Brace::permutation_brace(&x()).unwrap();
        let all = enumerate_lambda_endos(&b, 1 << 12).unwrap();
        let images: BTreeSet<Vec<usize>> = all.iter().map(|e| e.image().to_vec()).collect();
        for k in 0..b.additive_exponent() as i64 {
            assert!(images.contains(scalar_endo(&b, k).unwrap().image()));
        }
        for z in b.center().members {
            assert!(images.contains(central_endo(&b, z).unwrap().image()));
        }
        assert!(matches!(enumerate_lambda_endos(&b, 1), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn identity_suite_on_small_sets() {
        let r = identity_suite(&x()).unwrap();
        assert!(r.all_pass(), "{r}");
        let t = identity_suite(&CycleSet::trivial(3)).unwrap();
        assert!(t.all_pass(), "{t}");
    }
}
