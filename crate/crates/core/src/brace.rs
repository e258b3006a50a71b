//! Finite braces of abelian type.
//!
//! Elements are ids `0..size` with `0` the identity of both `+` and `∘`.
//! `lam(g, h) = g∘h - g`. For the permutation brace of a cycle set the
//! generator attached to `x` is `lambda_x = sigma_x^-1`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{lcm, prime_divisors};
use crate::cycleset::CycleSet;
use crate::error::{Error, Result};
use crate::par;
use crate::perm::{PermGroup, Permutation, DEFAULT_CAP};

/// Up to this size every table row is materialized at construction.
pub const EAGER_LIMIT: usize = 4096;
/// Largest supported brace (ids are stored as `u16`).
pub const MAX_SIZE: usize = 1 << 16;
/// Axioms are checked on all triples up to this size, on random triples above.
pub const EXHAUSTIVE_AXIOM_LIMIT: usize = 512;
pub const RANDOM_TRIPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Add,
    Mul,
    Lam,
}

#[derive(Debug)]
enum Backing {
    Perm {
        elements: Vec<Permutation>,
        index: HashMap<Permutation, usize>,
        words: Vec<Vec<u16>>,
        /// `addgen[c * n + x]` = `c + lambda_x`
        addgen: Vec<u32>,
        degree: usize,
    },
    Bk {
        k: u32,
    },
    Tables,
}

/// How a permutation brace acts on its cycle set.
#[derive(Debug, Clone)]
pub struct PermRealization {
    /// Id of `lambda_x` for each point `x`.
    pub generator_ids: Vec<usize>,
}

#[derive(Debug)]
pub struct Brace {
    size: usize,
    add: Vec<OnceLock<Box<[u16]>>>,
    mul: Vec<OnceLock<Box<[u16]>>>,
    lam: Vec<OnceLock<Box<[u16]>>>,
    neg: Vec<usize>,
    inv: Vec<usize>,
    add_order: Vec<u64>,
    mul_order: Vec<u64>,
    backing: Backing,
    realization: Option<PermRealization>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orders {
    pub additive: Vec<u64>,
    pub multiplicative: Vec<u64>,
    pub additive_exponent: u64,
    pub multiplicative_exponent: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetKind {
    AdditiveSubgroup,
    LeftIdeal,
    Ideal,
    Subbrace,
    MultiplicativeSubgroup,
}

#[derive(Debug, Clone)]
pub struct BraceSubset<'b> {
    pub parent: &'b Brace,
    pub members: Vec<usize>,
    pub kind: SubsetKind,
}

impl BraceSubset<'_> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.members == [0]
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    /// Re-checks the kind tag by table lookups.
    pub fn verify_kind(&self) -> bool {
        let b = self.parent;
        let m = &self.members;
        match self.kind {
            SubsetKind::AdditiveSubgroup => b.is_additive_subgroup(m),
            SubsetKind::LeftIdeal => b.is_left_ideal(m),
            SubsetKind::Ideal => b.is_ideal(m),
            SubsetKind::Subbrace => b.is_subbrace(m),
            SubsetKind::MultiplicativeSubgroup => b.is_multiplicative_subgroup(m),
        }
    }
}

/// A central multiplicative involution `z` with `<z>+ ≅ B_k`.
#[derive(Debug, Clone)]
pub struct InvolutionSubbrace<'b> {
    pub subset: BraceSubset<'b>,
    pub k: u32,
    /// `(a·z, a)` pairs: the isomorphism onto `bk_brace(k)`.
    pub iso: Vec<(usize, usize)>,
}

fn lazy_rows(size: usize) -> Vec<OnceLock<Box<[u16]>>> {
    (0..size).map(|_| OnceLock::new()).collect()
}

impl Brace {
    fn assemble(
        size: usize,
        backing: Backing,
        realization: Option<PermRealization>,
        inv: Vec<usize>,
    ) -> Brace {
        let mut b = Brace {
            size,
            add: lazy_rows(size),
            mul: lazy_rows(size),
            lam: lazy_rows(size),
            neg: Vec::new(),
            inv,
            add_order: Vec::new(),
            mul_order: Vec::new(),
            backing,
            realization,
        };
        if size <= EAGER_LIMIT {
            b.materialize();
        }
        b.add_order = (0..size).map(|g| b.cyclic_order(g, Op::Add)).collect();
        b.mul_order = (0..size).map(|g| b.cyclic_order(g, Op::Mul)).collect();
        b.neg = (0..size).map(|g| b.times_unreduced(b.add_order[g] - 1, g)).collect();
        b
    }

    fn materialize(&self) {
        let rows = par::map_range(self.size, |a| {
            (self.compute_row(Op::Add, a), self.compute_row(Op::Mul, a), self.compute_row(Op::Lam, a))
        });
        for (a, (ra, rm, rl)) in rows.into_iter().enumerate() {
            let _ = self.add[a].set(ra);
            let _ = self.mul[a].set(rm);
            let _ = self.lam[a].set(rl);
        }
    }

    fn cyclic_order(&self, g: usize, op: Op) -> u64 {
        let mut acc = g;
        let mut k = 1;
        while acc != 0 {
            acc = self.entry(op, acc, g);
            k += 1;
        }
        k
    }

    fn times_unreduced(&self, k: u64, g: usize) -> usize {
        let mut acc = 0;
        for _ in 0..k {
            acc = self.add(acc, g);
        }
        acc
    }

    fn perm_add(&self, a: usize, b: usize) -> usize {
        let Backing::Perm { words, addgen, degree, .. } = &self.backing else {
            unreachable!()
        };
        words[b].iter().fold(a, |c, &x| addgen[c * degree + x as usize] as usize)
    }

    fn compute_entry(&self, op: Op, a: usize, b: usize) -> usize {
        match (&self.backing, op) {
            (Backing::Bk { k }, _) => {
                let m = 1i64 << k;
                let (a, b) = (a as i64, b as i64);
                let v = match op {
                    Op::Add => a + b,
                    Op::Mul => a + b - 2 * a * b,
                    Op::Lam => b - 2 * a * b,
                };
                v.rem_euclid(m) as usize
            }
            (Backing::Perm { elements, index, .. }, Op::Mul) => {
                index[&elements[a].compose_unchecked(&elements[b])]
            }
            (Backing::Perm { .. }, Op::Add) => self.perm_add(a, b),
            (Backing::Perm { elements, words, addgen, degree, .. }, Op::Lam) => {
                // lambda_g(lambda_x) = lambda_{g(x)}, extended additively along b's word
                let g = &elements[a];
                words[b]
                    .iter()
                    .fold(0, |c, &x| addgen[c * degree + g.apply(x as usize)] as usize)
            }
            (Backing::Tables, Op::Lam) => self.add(self.mul(a, b), self.neg[a]),
            (Backing::Tables, _) => unreachable!("table-backed rows are always materialized"),
        }
    }

    fn compute_row(&self, op: Op, a: usize) -> Box<[u16]> {
        (0..self.size).map(|b| self.compute_entry(op, a, b) as u16).collect()
    }

    #[inline]
    fn entry(&self, op: Op, a: usize, b: usize) -> usize {
        let rows = match op {
            Op::Add => &self.add,
            Op::Mul => &self.mul,
            Op::Lam => &self.lam,
        };
        match rows[a].get() {
            Some(r) => r[b] as usize,
            None => self.compute_entry(op, a, b),
        }
    }

    fn row(&self, op: Op, a: usize) -> &[u16] {
        let rows = match op {
            Op::Add => &self.add,
            Op::Mul => &self.mul,
            Op::Lam => &self.lam,
        };
        rows[a].get_or_init(|| self.compute_row(op, a))
    }

    /// The permutation brace `G(X)`, generated by the `lambda_x`.
    pub fn permutation_brace(x: &CycleSet) -> Result<Brace> {
        Brace::permutation_brace_with_cap(x, DEFAULT_CAP)
    }

    pub fn permutation_brace_with_cap(x: &CycleSet, cap: usize) -> Result<Brace> {
        let cap = cap.min(MAX_SIZE);
        let n = x.size();
        let group = PermGroup::closure(n, x.lambdas(), cap)?;
        let size = group.order();
        let elements = group.elements().to_vec();
        let index: HashMap<Permutation, usize> =
            elements.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let generator_ids: Vec<usize> = (0..n).map(|p| index[x.lambda(p)]).collect();

        // c + lambda_x = c ∘ lambda_{c^-1(x)}
        let mut addgen = vec![0u32; size * n];
        for (c, g) in elements.iter().enumerate() {
            let ginv = g.inverse();
            for p in 0..n {
                let prod = g.compose_unchecked(x.lambda(ginv.apply(p)));
                addgen[c * n + p] = index[&prod] as u32;
            }
        }

        // additive words by breadth-first search from 0
        let mut words: Vec<Option<Vec<u16>>> = vec![None; size];
        words[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for p in 0..n {
                let d = addgen[c * n + p] as usize;
                if words[d].is_none() {
                    let mut w = words[c].clone().unwrap();
                    w.push(p as u16);
                    words[d] = Some(w);
                    queue.push_back(d);
                }
            }
        }
        if let Some(missing) = words.iter().position(Option::is_none) {
            return Err(Error::AxiomViolation(format!(
                "additive closure misses element {missing} of the multiplicative closure"
            )));
        }
        let words: Vec<Vec<u16>> = words.into_iter().map(Option::unwrap).collect();
        let inv = elements.iter().map(|g| index[&g.inverse()]).collect();
        let backing = Backing::Perm { elements, index, words, addgen, degree: n };
        let b = Brace::assemble(size, backing, Some(PermRealization { generator_ids }), inv);
        b.check_permutation_identities(x)?;
        Ok(b)
    }

    /// `lambda_g(lambda_x) = lambda_{g(x)}` and `lambda_x + lambda_y = lambda_x ∘ lambda_{x*y}`.
    fn check_permutation_identities(&self, x: &CycleSet) -> Result<()> {
        let gens = &self.realization.as_ref().unwrap().generator_ids;
        let n = x.size();
        for g in 0..self.size {
            let pg = self.element_permutation(g).unwrap();
            for p in 0..n {
                if self.lam(g, gens[p]) != gens[pg.apply(p)] {
                    return Err(Error::AxiomViolation(format!(
                        "lambda_{g}(lambda_{p}) is not lambda of the image point"
                    )));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                if self.add(gens[p], gens[q]) != self.mul(gens[p], gens[x.op(p, q)]) {
                    return Err(Error::AxiomViolation(format!(
                        "lambda_{p} + lambda_{q} != lambda_{p} ∘ lambda_{p}*{q}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `Z/2^k` with `a∘b = a + b - 2ab`.
    pub fn bk_brace(k: u32) -> Result<Brace> {
        Brace::bk_brace_with_cap(k, DEFAULT_CAP)
    }

    pub fn bk_brace_with_cap(k: u32, cap: usize) -> Result<Brace> {
        let cap = cap.min(MAX_SIZE);
        if k >= usize::BITS || (1usize << k) > cap {
            return Err(Error::CapExceeded { cap });
        }
        let size = 1usize << k;
        let m = size as i64;
        // a∘b = 0 solves to b = -a(1-2a)^-1; 1-2a is odd, hence a unit
        let inv = (0..size)
            .map(|a| {
                let a = a as i64;
                let u = (1 - 2 * a).rem_euclid(m);
                let uinv = mod_inverse(u, m);
                (-a * uinv).rem_euclid(m) as usize
            })
            .collect();
        Ok(Brace::assemble(size, Backing::Bk { k }, None, inv))
    }

    /// A brace given by its addition and multiplication tables; 0 must be
    /// the common identity.
    pub fn from_tables(size: usize, add: Vec<usize>, mul: Vec<usize>) -> Result<Brace> {
        if size == 0 || size > EAGER_LIMIT || add.len() != size * size || mul.len() != size * size {
            return Err(Error::UnsupportedSize { n: size, what: "table-backed brace" });
        }
        if add.iter().chain(mul.iter()).any(|&v| v >= size) {
            return Err(Error::AxiomViolation("table entry out of range".into()));
        }
        let identity_ok = (0..size).all(|a| {
            add[a] == a && add[a * size] == a && mul[a] == a && mul[a * size] == a
        });
        if !identity_ok {
            return Err(Error::AxiomViolation("0 is not the common identity".into()));
        }
        let mut inv = vec![usize::MAX; size];
        for a in 0..size {
            match (0..size).find(|&b| mul[a * size + b] == 0) {
                Some(b) => inv[a] = b,
                None => return Err(Error::AxiomViolation(format!("{a} has no inverse under ∘"))),
            }
        }
        if (0..size).any(|a| (0..size).all(|b| add[a * size + b] != 0)) {
            return Err(Error::AxiomViolation("missing additive inverse".into()));
        }
        let b = Brace {
            size,
            add: lazy_rows(size),
            mul: lazy_rows(size),
            lam: lazy_rows(size),
            neg: Vec::new(),
            inv,
            add_order: Vec::new(),
            mul_order: Vec::new(),
            backing: Backing::Tables,
            realization: None,
        };
        for a in 0..size {
            let to_row = |t: &[usize]| t[a * size..(a + 1) * size].iter().map(|&v| v as u16).collect();
            let _ = b.add[a].set(to_row(&add));
            let _ = b.mul[a].set(to_row(&mul));
        }
        let mut b = b;
        b.neg = (0..size).map(|a| (0..size).find(|&c| add[a * size + c] == 0).unwrap()).collect();
        for a in 0..size {
            let row = b.compute_row(Op::Lam, a);
            let _ = b.lam[a].set(row);
        }
        b.add_order = (0..size).map(|g| b.cyclic_order_bounded(g, Op::Add)).collect::<Result<_>>()?;
        b.mul_order = (0..size).map(|g| b.cyclic_order_bounded(g, Op::Mul)).collect::<Result<_>>()?;
        Ok(b)
    }

    fn cyclic_order_bounded(&self, g: usize, op: Op) -> Result<u64> {
        let mut acc = g;
        let mut k = 1;
        while acc != 0 {
            if k > self.size as u64 {
                return Err(Error::AxiomViolation(format!("powers of {g} never return to 0")));
            }
            acc = self.entry(op, acc, g);
            k += 1;
        }
        Ok(k)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.entry(Op::Add, a, b)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.entry(Op::Mul, a, b)
    }

    /// `lambda_a(b) = a∘b - a`.
    #[inline]
    pub fn lam(&self, a: usize, b: usize) -> usize {
        self.entry(Op::Lam, a, b)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg[b])
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn add_row(&self, a: usize) -> &[u16] {
        self.row(Op::Add, a)
    }

    pub fn mul_row(&self, a: usize) -> &[u16] {
        self.row(Op::Mul, a)
    }

    pub fn lam_row(&self, a: usize) -> &[u16] {
        self.row(Op::Lam, a)
    }

    /// `k·g`, for any integer `k`.
    pub fn times(&self, k: i64, g: usize) -> usize {
        let k = k.rem_euclid(self.add_order[g] as i64) as u64;
        self.times_unreduced(k, g)
    }

    pub fn additive_order(&self, g: usize) -> u64 {
        self.add_order[g]
    }

    pub fn multiplicative_order(&self, g: usize) -> u64 {
        self.mul_order[g]
    }

    pub fn additive_exponent(&self) -> u64 {
        self.add_order.iter().fold(1, |e, &o| lcm(e, o))
    }

    pub fn orders_and_exponent(&self) -> Orders {
        Orders {
            additive: self.add_order.clone(),
            multiplicative: self.mul_order.clone(),
            additive_exponent: self.additive_exponent(),
            multiplicative_exponent: self.mul_order.iter().fold(1, |e, &o| lcm(e, o)),
        }
    }

    pub fn realization(&self) -> Option<&PermRealization> {
        self.realization.as_ref()
    }

    /// The permutation of `X` that element `g` of a permutation brace is.
    pub fn element_permutation(&self, g: usize) -> Option<&Permutation> {
        match &self.backing {
            Backing::Perm { elements, .. } => Some(&elements[g]),
            _ => None,
        }
    }

    pub fn id_of_permutation(&self, p: &Permutation) -> Option<usize> {
        match &self.backing {
            Backing::Perm { index, .. } => index.get(p).copied(),
            _ => None,
        }
    }

    /// Id of `lambda_x` in a permutation brace.
    pub fn generator(&self, x: usize) -> Option<usize> {
        self.realization.as_ref().map(|r| r.generator_ids[x])
    }

    /// Additive word of `g` in the generators `lambda_x` (permutation braces).
    pub fn word(&self, g: usize) -> Option<Vec<usize>> {
        match &self.backing {
            Backing::Perm { words, .. } => Some(words[g].iter().map(|&x| x as usize).collect()),
            _ => None,
        }
    }

    /// `k` with `self ≅ B_k` by construction, if built by [`Brace::bk_brace`].
    pub fn bk_parameter(&self) -> Option<u32> {
        match self.backing {
            Backing::Bk { k } => Some(k),
            _ => None,
        }
    }

    fn subset(&self, members: Vec<usize>, kind: SubsetKind) -> BraceSubset<'_> {
        BraceSubset { parent: self, members, kind }
    }

    /// `ker(lambda)`.
    pub fn socle(&self) -> BraceSubset<'_> {
        let members = (0..self.size)
            .filter(|&g| self.lam_row(g).iter().enumerate().all(|(h, &v)| v as usize == h))
            .collect();
        self.subset(members, SubsetKind::Ideal)
    }

    /// Elements fixed by every `lambda_g`.
    pub fn fix(&self) -> BraceSubset<'_> {
        self.subset(self.relative_fix_members(0..self.size), SubsetKind::LeftIdeal)
    }

    /// Center of the multiplicative group.
    pub fn center(&self) -> BraceSubset<'_> {
        let members = (0..self.size)
            .filter(|&g| (0..self.size).all(|h| self.mul(g, h) == self.mul(h, g)))
            .collect();
        self.subset(members, SubsetKind::MultiplicativeSubgroup)
    }

    fn relative_fix_members(&self, over: impl Iterator<Item = usize> + Clone) -> Vec<usize> {
        (0..self.size).filter(|&h| over.clone().all(|g| self.lam(g, h) == h)).collect()
    }

    /// `Fix_B(L) = {h : lambda_g(h) = h for all g in L}` for a left ideal `L`.
    pub fn relative_fix(&self, left_ideal: &[usize]) -> Result<BraceSubset<'_>> {
        if !self.is_left_ideal(left_ideal) {
            return Err(Error::NotALeftIdeal);
        }
        let members = self.relative_fix_members(left_ideal.iter().copied());
        if !self.is_subbrace(&members) {
            return Err(Error::InvariantViolation("relative fix is not a subbrace".into()));
        }
        Ok(self.subset(members, SubsetKind::Subbrace))
    }

    /// `B_π = {g : every prime dividing o+(g) lies in π}`.
    pub fn primary_component(&self, primes: &BTreeSet<u64>) -> Result<BraceSubset<'_>> {
        let members: Vec<usize> = (0..self.size)
            .filter(|&g| prime_divisors(self.add_order[g]).is_subset(primes))
            .collect();
        if !self.is_left_ideal(&members) {
            return Err(Error::InvariantViolation("primary component is not a left ideal".into()));
        }
        Ok(self.subset(members, SubsetKind::LeftIdeal))
    }

    fn member_mask(&self, members: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.size];
        for &g in members {
            mask[g] = true;
        }
        mask
    }

    pub fn is_additive_subgroup(&self, members: &[usize]) -> bool {
        let mask = self.member_mask(members);
        mask[0] && members.iter().all(|&a| mask[self.neg[a]] && members.iter().all(|&b| mask[self.add(a, b)]))
    }

    pub fn is_multiplicative_subgroup(&self, members: &[usize]) -> bool {
        let mask = self.member_mask(members);
        mask[0] && members.iter().all(|&a| mask[self.inv[a]] && members.iter().all(|&b| mask[self.mul(a, b)]))
    }

    pub fn is_left_ideal(&self, members: &[usize]) -> bool {
        let mask = self.member_mask(members);
        self.is_additive_subgroup(members)
            && (0..self.size).all(|g| members.iter().all(|&h| mask[self.lam(g, h)]))
    }

    /// Left ideal that is normal in the multiplicative group.
    pub fn is_ideal(&self, members: &[usize]) -> bool {
        let mask = self.member_mask(members);
        self.is_left_ideal(members)
            && (0..self.size).all(|g| {
                members.iter().all(|&h| mask[self.mul(self.mul(g, h), self.inv[g])])
            })
    }

    pub fn is_subbrace(&self, members: &[usize]) -> bool {
        self.is_additive_subgroup(members) && self.is_multiplicative_subgroup(members)
    }

    /// Checks every brace axiom: exhaustively for `|B| <= 512`, otherwise on
    /// 10^5 random triples drawn from a ChaCha stream seeded with `seed`.
    pub fn check_axioms(&self, seed: u64) -> Result<()> {
        let n = self.size;
        let singles = par::find_first(n, |a| self.check_single(a).err());
        if let Some(e) = singles {
            return Err(e);
        }
        if n <= EXHAUSTIVE_AXIOM_LIMIT {
            let failure = par::find_first(n, |a| {
                for b in 0..n {
                    if let Err(e) = self.check_pair(a, b) {
                        return Some(e);
                    }
                    for c in 0..n {
                        if let Err(e) = self.check_triple(a, b, c) {
                            return Some(e);
                        }
                    }
                }
                None
            });
            return failure.map_or(Ok(()), Err);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RANDOM_TRIPLES {
            let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            self.check_pair(a, b)?;
            self.check_triple(a, b, c)?;
        }
        Ok(())
    }

    fn check_single(&self, a: usize) -> Result<()> {
        let ok = self.add(a, 0) == a
            && self.add(0, a) == a
            && self.mul(a, 0) == a
            && self.mul(0, a) == a
            && self.add(a, self.neg[a]) == 0
            && self.mul(a, self.inv[a]) == 0
            && self.mul(self.inv[a], a) == 0;
        if ok {
            Ok(())
        } else {
            Err(Error::AxiomViolation(format!("identity or inverse fails at {a}")))
        }
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        if self.add(a, b) != self.add(b, a) {
            return Err(Error::AxiomViolation(format!("{a}+{b} != {b}+{a}")));
        }
        if self.lam(a, b) != self.sub(self.mul(a, b), a) {
            return Err(Error::AxiomViolation(format!("lambda_{a}({b}) != {a}∘{b} - {a}")));
        }
        Ok(())
    }

    fn check_triple(&self, a: usize, b: usize, c: usize) -> Result<()> {
        if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
            return Err(Error::AxiomViolation(format!("+ not associative at ({a},{b},{c})")));
        }
        if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
            return Err(Error::AxiomViolation(format!("∘ not associative at ({a},{b},{c})")));
        }
        let lhs = self.mul(a, self.add(b, c));
        let rhs = self.add(self.sub(self.mul(a, b), a), self.mul(a, c));
        if lhs != rhs {
            return Err(Error::AxiomViolation(format!("brace equation fails at ({a},{b},{c})")));
        }
        if self.lam(a, self.add(b, c)) != self.add(self.lam(a, b), self.lam(a, c)) {
            return Err(Error::AxiomViolation(format!("lambda_{a} not additive at ({b},{c})")));
        }
        if self.lam(self.mul(a, b), c) != self.lam(a, self.lam(b, c)) {
            return Err(Error::AxiomViolation(format!("lambda not a homomorphism at ({a},{b},{c})")));
        }
        Ok(())
    }

    /// `<z>+` for a central involution `z`, with its isomorphism onto `B_k`.
    pub fn central_involution_subbrace(&self, z: usize) -> Result<InvolutionSubbrace<'_>> {
        if (0..self.size).any(|h| self.mul(z, h) != self.mul(h, z)) {
            return Err(Error::NotCentral(z));
        }
        if self.mul(z, z) != 0 {
            return Err(Error::NotInvolution(z));
        }
        let m = self.add_order[z];
        if !m.is_power_of_two() {
            return Err(Error::InvariantViolation(format!("o+({z}) = {m} is not a power of 2")));
        }
        let k = m.trailing_zeros();
        let multiples: Vec<usize> = (0..m).map(|a| self.times_unreduced(a, z)).collect();
        let mut members = multiples.clone();
        members.sort_unstable();
        if !self.is_subbrace(&members) {
            return Err(Error::InvariantViolation(format!("<{z}>+ is not closed under ∘")));
        }
        let mi = m as i64;
        for a in 0..mi {
            for b in 0..mi {
                let c = (a + b - 2 * a * b).rem_euclid(mi) as usize;
                if self.mul(multiples[a as usize], multiples[b as usize]) != multiples[c] {
                    return Err(Error::InvariantViolation(format!(
                        "{a}z ∘ {b}z != ({a}+{b}-2·{a}·{b})z for z={z}"
                    )));
                }
            }
        }
        let iso = multiples.iter().enumerate().map(|(a, &g)| (g, a)).collect();
        Ok(InvolutionSubbrace { subset: self.subset(members, SubsetKind::Subbrace), k, iso })
    }

    /// Central elements `z` with `z∘z = 0`, including `0`.
    pub fn central_involutions(&self) -> Vec<usize> {
        self.center().members.into_iter().filter(|&z| self.mul(z, z) == 0).collect()
    }

    /// The cycle set `g * h = lambda_g^-1(h)` on the underlying set.
    pub fn brace_to_cycleset(&self) -> Result<CycleSet> {
        let n = self.size;
        let mut table = Vec::with_capacity(n * n);
        for g in 0..n {
            let row = self.lam_row(self.inv[g]);
            table.extend(row.iter().map(|&v| v as usize));
        }
        CycleSet::validate(n, table)
    }

    /// Checks that `<a>+` and `<b>+` commute multiplicatively, given that `a`
    /// commutes with every multiple of `b` and `b` with every multiple of `a`.
    pub fn check_cyclic_centralizing(&self, a: usize, b: usize) -> Result<bool> {
        let ma: Vec<usize> = (0..self.add_order[a]).map(|i| self.times_unreduced(i, a)).collect();
        let nb: Vec<usize> = (0..self.add_order[b]).map(|i| self.times_unreduced(i, b)).collect();
        if let Some(&w) = nb.iter().find(|&&w| self.mul(a, w) != self.mul(w, a)) {
            return Err(Error::HypothesisFails(format!("{a} does not commute with {w} in <{b}>+")));
        }
        if let Some(&w) = ma.iter().find(|&&w| self.mul(b, w) != self.mul(w, b)) {
            return Err(Error::HypothesisFails(format!("{b} does not commute with {w} in <{a}>+")));
        }
        Ok(ma.iter().all(|&u| nb.iter().all(|&w| self.mul(u, w) == self.mul(w, u))))
    }

    /// Size line, then the addition table, then the multiplication table.
    pub fn serialize(&self) -> String {
        let mut out = format!("{}\n", self.size);
        for op in [Op::Add, Op::Mul] {
            for a in 0..self.size {
                let row: Vec<String> = self.row(op, a).iter().map(|v| v.to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Brace> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let size: usize = header
            .parse()
            .map_err(|_| Error::Parse { line: first, msg: format!("expected size, got {header:?}") })?;
        let mut values = Vec::with_capacity(2 * size * size);
        for _ in 0..2 * size {
            let (line, content) =
                lines.next().ok_or(Error::Parse { line: first, msg: "missing table rows".into() })?;
            let row: Vec<usize> = content
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse { line, msg: format!("bad entry {t:?}") }))
                .collect::<Result<_>>()?;
            if row.len() != size {
                return Err(Error::Parse { line, msg: format!("expected {size} entries") });
            }
            values.extend(row);
        }
        let mul = values.split_off(size * size);
        Brace::from_tables(size, values, mul)
    }
}

impl fmt::Display for Brace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn mod_inverse(u: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    // extended Euclid
    let (mut r0, mut r1, mut s0, mut s1) = (m, u.rem_euclid(m), 0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(m)
}
