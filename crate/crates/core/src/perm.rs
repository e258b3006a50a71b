//! Permutations of `{0, .., n-1}`, explicit permutation groups, and the
//! affine group `Hol(Z_m)`.
//!
//! Composition follows the left-action convention: `p.compose(&q)` is the map
//! `x -> p(q(x))`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::arith::{gcd, lcm, prime_power};
use crate::error::{Error, Result};

/// Default element cap for [`PermGroup::closure`].
pub const DEFAULT_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleStructure {
    pub order: u64,
    /// Cycle lengths in ascending order, fixed points included.
    pub cycle_type: Vec<usize>,
    pub is_full_cycle: bool,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotABijection(n));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Caller guarantees `images` is a bijection.
    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(images.clone()).is_ok());
        Permutation { images }
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation from disjoint cycles, e.g. `[[0, 1, 2]]` is `0->1->2->0`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n || touched[a] {
                    return Err(Error::NotABijection(n));
                }
                touched[a] = true;
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::new(images)
    }

    /// `i -> (i + shift) mod n`.
    pub fn rotation(n: usize, shift: usize) -> Self {
        Permutation { images: (0..n).map(|i| (i + shift) % n).collect() }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `x -> self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&j| self.images[j]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&sq);
            }
            sq = sq.compose_unchecked(&sq);
            e >>= 1;
        }
        acc
    }

    /// `other^-1 . self . other`, the conjugate written `self^other`.
    pub fn conjugate_by(&self, other: &Permutation) -> Permutation {
        other.inverse().compose_unchecked(self).compose_unchecked(other)
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.degree() == other.degree()
            && (0..self.degree()).all(|i| self.images[other.images[i]] == other.images[self.images[i]])
    }

    pub fn has_fixed_point(&self) -> bool {
        self.images.iter().enumerate().any(|(i, &j)| i == j)
    }

    /// Disjoint cycles, each starting at its smallest point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_structure(&self) -> CycleStructure {
        let mut cycle_type: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        cycle_type.sort_unstable();
        let order = cycle_type.iter().fold(1u64, |acc, &l| lcm(acc, l as u64));
        let is_full_cycle = cycle_type.len() == 1;
        CycleStructure { order, cycle_type, is_full_cycle }
    }

    pub fn order(&self) -> u64 {
        self.cycle_structure().order
    }

    /// All permutations of the same degree commuting with `self`, by
    /// backtracking over cycle-to-cycle matchings.
    pub fn centralizer_in_symmetric_group(&self) -> Vec<Permutation> {
        let n = self.degree();
        let cycles = self.cycles();
        let mut cycle_len = vec![0; n];
        for c in &cycles {
            for &x in c {
                cycle_len[x] = c.len();
            }
        }
        let mut out = Vec::new();
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.centralizer_rec(&cycles, 0, &cycle_len, &mut image, &mut used, &mut out);
        out
    }

    fn centralizer_rec(
        &self,
        cycles: &[Vec<usize>],
        idx: usize,
        cycle_len: &[usize],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Permutation>,
    ) {
        if idx == cycles.len() {
            out.push(Permutation { images: image.clone() });
            return;
        }
        let cycle = &cycles[idx];
        let len = cycle.len();
        for t in 0..self.degree() {
            if used[t] || cycle_len[t] != len {
                continue;
            }
            // c(p^k(rep)) = p^k(t)
            let mut y = t;
            for &x in cycle {
                image[x] = y;
                used[y] = true;
                y = self.images[y];
            }
            self.centralizer_rec(cycles, idx + 1, cycle_len, image, used, out);
            for &x in cycle {
                used[image[x]] = false;
                image[x] = usize::MAX;
            }
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, x) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
        Permutation::new(images)
    }
}

/// A permutation group given by the explicit list of its elements.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    words: Vec<Vec<usize>>,
}

impl PermGroup {
    /// Breadth-first closure of `generators` (sorted and deduplicated first).
    /// Element 0 is the identity; element `e . s` is discovered from `e` by
    /// right multiplication with generator `s`, and its word records that path.
    pub fn closure(degree: usize, generators: &[Permutation], cap: usize) -> Result<PermGroup> {
        let mut gens: Vec<Permutation> = generators.to_vec();
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch { left: degree, right: g.degree() });
            }
        }
        gens.sort();
        gens.dedup();
        let id = Permutation::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0);
        let mut words = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for (k, s) in gens.iter().enumerate() {
                let next = elements[e].compose_unchecked(s);
                if index.contains_key(&next) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::CapExceeded { cap });
                }
                let mut w = words[e].clone();
                w.push(k);
                index.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(next);
                words.push(w);
            }
        }
        Ok(PermGroup { degree, generators: gens, elements, index, words })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Sorted, deduplicated generators.
    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> &Permutation {
        &self.elements[id]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }

    /// Generator indices whose product (left to right) is element `id`.
    pub fn word(&self, id: usize) -> &[usize] {
        &self.words[id]
    }

    pub fn element_set(&self) -> BTreeSet<Permutation> {
        self.elements.iter().cloned().collect()
    }

    /// Orbits on points, each sorted, ordered by smallest point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits_of(self.degree, &self.generators)
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() <= 1
    }

    /// Every non-identity element moves every point.
    pub fn is_semiregular(&self) -> bool {
        self.elements.iter().all(|g| g.is_identity() || !g.has_fixed_point())
    }

    pub fn exponent(&self) -> u64 {
        self.elements.iter().fold(1, |acc, g| lcm(acc, g.order()))
    }

    /// Ids of elements commuting with every permutation in `subset`.
    pub fn centralizer_of(&self, subset: &[Permutation]) -> Vec<usize> {
        (0..self.order())
            .filter(|&i| subset.iter().all(|s| self.elements[i].commutes_with(s)))
            .collect()
    }

    /// Ids of central elements (tested against the generators).
    pub fn center(&self) -> Vec<usize> {
        self.centralizer_of(&self.generators)
    }

    /// The centralizer of a transitive group inside the full symmetric group.
    /// Such a centralizing map is determined by the image of point 0, so each
    /// candidate image is propagated along the generators and kept if it is a
    /// well-defined bijection commuting with every generator.
    pub fn centralizer_in_symmetric_group(&self) -> Option<Vec<Permutation>> {
        if !self.is_transitive() {
            return None;
        }
        let n = self.degree;
        let mut out = Vec::new();
        'cand: for y in 0..n {
            let mut c = vec![usize::MAX; n];
            c[0] = y;
            let mut queue = VecDeque::from([0usize]);
            while let Some(p) = queue.pop_front() {
                for s in &self.generators {
                    let (sp, sc) = (s.apply(p), s.apply(c[p]));
                    if c[sp] == usize::MAX {
                        c[sp] = sc;
                        queue.push_back(sp);
                    } else if c[sp] != sc {
                        continue 'cand;
                    }
                }
            }
            if let Ok(perm) = Permutation::new(c) {
                if self.generators.iter().all(|s| s.commutes_with(&perm)) {
                    out.push(perm);
                }
            }
        }
        Some(out)
    }
}

pub(crate) fn orbits_of(degree: usize, generators: &[Permutation]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; degree];
    let mut out = Vec::new();
    for start in 0..degree {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        label[start] = id;
        let mut orbit = vec![start];
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            k += 1;
            for g in generators {
                let y = g.apply(x);
                if label[y] == usize::MAX {
                    label[y] = id;
                    orbit.push(y);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// The affine map `x -> alpha*x + beta` on `Z_m`, `alpha` a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap {
    pub modulus: u64,
    pub alpha: u64,
    pub beta: u64,
}

impl AffineMap {
    pub fn new(modulus: u64, alpha: u64, beta: u64) -> Option<Self> {
        let (a, b) = (alpha % modulus, beta % modulus);
        (gcd(a, modulus) == 1).then_some(AffineMap { modulus, alpha: a, beta: b })
    }

    pub fn apply(&self, x: u64) -> u64 {
        (self.alpha * x + self.beta) % self.modulus
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_images_unchecked(
            (0..self.modulus).map(|x| self.apply(x) as usize).collect(),
        )
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x -> {}x+{} (mod {})", self.alpha, self.beta, self.modulus)
    }
}

/// All `phi(m) * m` elements of `Hol(Z_m)`, ordered by `(alpha, beta)`.
pub fn hol_enumerate(m: u64) -> Vec<AffineMap> {
    if m == 1 {
        return vec![AffineMap { modulus: 1, alpha: 0, beta: 0 }];
    }
    (1..m)
        .filter(|&a| gcd(a, m) == 1)
        .flat_map(|a| (0..m).map(move |b| AffineMap { modulus: m, alpha: a, beta: b }))
        .collect()
}

/// Brute force: the fixed-point-free elements `g` of `Hol(Z_m)` with `g^r = id`,
/// where `m = p^v` and `r = p`.
pub fn classify_fixed_point_free(m: u64, r: u64) -> Result<Vec<AffineMap>> {
    let (p, _) = prime_power(m).ok_or(Error::NotPrimePower(m))?;
    if r != p {
        return Err(Error::InvalidOrderBound { m, r });
    }
    Ok(hol_enumerate(m)
        .into_iter()
        .filter(|g| {
            let perm = g.to_permutation();
            !perm.has_fixed_point() && perm.pow(r as i64).is_identity()
        })
        .collect())
}

/// The closed forms predicted for [`classify_fixed_point_free`], as maps on `Z_m`:
/// translations by nonzero multiples of `p^(v-1)` for odd `p`; for `p = 2` the
/// translation by `2^(v-1)` together with the reflections `x -> beta - x`, `beta` odd.
pub fn predicted_fixed_point_free(m: u64) -> Result<BTreeSet<Permutation>> {
    let (p, v) = prime_power(m).ok_or(Error::NotPrimePower(m))?;
    let step = p.pow(v - 1);
    let mut out = BTreeSet::new();
    if p == 2 {
        out.insert(AffineMap { modulus: m, alpha: 1, beta: step }.to_permutation());
        for beta in (1..m).step_by(2) {
            out.insert(AffineMap { modulus: m, alpha: m - 1, beta }.to_permutation());
        }
    } else {
        for i in 1..p {
            out.insert(AffineMap { modulus: m, alpha: 1, beta: i * step }.to_permutation());
        }
    }
    Ok(out)
}

/// Fixed-point-free involutions of `Z_{2^v}` commuting with `i -> i + 2`,
/// found by exhaustive search over that centralizer.
pub fn t2_fixed_point_free_involutions(v: u32) -> Vec<Permutation> {
    let n = 1usize << v;
    let shift = Permutation::rotation(n, 2);
    shift
        .centralizer_in_symmetric_group()
        .into_iter()
        .filter(|rho| {
            rho.commutes_with(&shift) && !rho.has_fixed_point() && rho.pow(2).is_identity()
        })
        .collect()
}

/// Predicted answer for [`t2_fixed_point_free_involutions`]: the translation by
/// `2^(v-1)` and, for each odd `gamma`, the map sending even `i` to `i + gamma`
/// and odd `i` to `i - gamma`.
pub fn t2_predicted(v: u32) -> BTreeSet<Permutation> {
    let n = 1usize << v;
    let mut out = BTreeSet::new();
    out.insert(Permutation::rotation(n, n / 2));
    for gamma in (1..n).step_by(2) {
        let images = (0..n)
            .map(|i| if i % 2 == 0 { (i + gamma) % n } else { (i + n - gamma) % n })
            .collect();
        out.insert(Permutation::from_images_unchecked(images));
    }
    out
}
