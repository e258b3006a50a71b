//! Finite non-degenerate cycle sets stored as operation tables.
//!
//! `table[x][y] = x * y`. The left translation `sigma_x` is row `x` and
//! `lambda_x = sigma_x^-1`, so `x * y = lambda_x^-1(y)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::arith::prime_divisors;
use crate::error::{Error, Result};
use crate::perm::{orbits_of, PermGroup, Permutation, DEFAULT_CAP};

/// Largest size accepted by [`CycleSet::are_isomorphic`].
pub const ISO_CAP: usize = 8;

/// Opaque isomorphism invariant, usable as a hash key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoInvariant(Vec<(Vec<usize>, usize, usize)>);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleSet {
    n: usize,
    table: Vec<usize>,
    sigma: Vec<Permutation>,
    lam: Vec<Permutation>,
    diagonal: Permutation,
}

/// A homomorphism of cycle sets; `map[x]` is the image of `x`.
#[derive(Debug, Clone)]
pub struct CycleSetHom {
    pub source: CycleSet,
    pub target: CycleSet,
    pub map: Vec<usize>,
}

impl CycleSetHom {
    pub fn is_homomorphism(&self) -> bool {
        let n = self.source.size();
        (0..n).all(|x| {
            (0..n).all(|y| {
                self.map[self.source.op(x, y)] == self.target.op(self.map[x], self.map[y])
            })
        })
    }

    /// Preimage sizes, indexed by target element.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.target.size()];
        for &t in &self.map {
            sizes[t] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mpl {
    Finite(usize),
    /// The retraction tower became stationary at `level` on a cycle set with
    /// more than one element.
    Infinite { level: usize, stationary: CycleSet },
}

impl Mpl {
    pub fn is_finite(&self) -> bool {
        matches!(self, Mpl::Finite(_))
    }
}

impl fmt::Display for Mpl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mpl::Finite(k) => write!(f, "{k}"),
            Mpl::Infinite { .. } => f.write_str("INFINITE"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiType {
    pub primes_of_size: BTreeSet<u64>,
    pub primes_of_group: BTreeSet<u64>,
    pub is_pi_type: bool,
    pub is_p_type: bool,
}

impl CycleSet {
    /// Checks (C1), (C2) and (C3), reporting the first violation found.
    pub fn validate(n: usize, table: Vec<usize>) -> Result<CycleSet> {
        if table.len() != n * n {
            return Err(Error::Parse { line: 0, msg: format!("expected {} entries, got {}", n * n, table.len()) });
        }
        for (k, &v) in table.iter().enumerate() {
            if v >= n {
                return Err(Error::EntryOutOfRange { row: k / n, col: k % n, value: v, n });
            }
        }
        let mut sigma = Vec::with_capacity(n);
        for x in 0..n {
            let row = table[x * n..(x + 1) * n].to_vec();
            sigma.push(Permutation::new(row).map_err(|_| Error::RowNotBijective { row: x })?);
        }
        let op = |a: usize, b: usize| table[a * n + b];
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let (xy, yx) = (op(x, y), op(y, x));
                for z in 0..n {
                    if op(xy, op(x, z)) != op(yx, op(y, z)) {
                        return Err(Error::CycloidViolation { x, y, z });
                    }
                }
            }
        }
        let diagonal = Permutation::new((0..n).map(|x| op(x, x)).collect())
            .map_err(|_| Error::DiagonalNotBijective)?;
        let lam = sigma.iter().map(Permutation::inverse).collect();
        Ok(CycleSet { n, table, sigma, lam, diagonal })
    }

    pub fn from_rows(rows: &[&[usize]]) -> Result<CycleSet> {
        let n = rows.len();
        let mut table = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Parse { line: 0, msg: "ragged table".into() });
            }
            table.extend_from_slice(r);
        }
        CycleSet::validate(n, table)
    }

    /// `x * y = y` on `n` points.
    pub fn trivial(n: usize) -> CycleSet {
        CycleSet::validate(n, (0..n).flat_map(|_| 0..n).collect()).expect("trivial cycle set")
    }

    /// The unique irretractable cycle set of size 4 with a 4-cycle diagonal.
    pub fn x4_19() -> CycleSet {
        CycleSet::from_rows(&[&[1, 0, 2, 3], &[3, 2, 0, 1], &[0, 1, 3, 2], &[2, 3, 1, 0]])
            .expect("X_{4,19} table")
    }

    /// Disjoint union with no cross action: `x * y = y` whenever the
    /// arguments lie in different summands.
    pub fn disjoint_union(&self, other: &CycleSet) -> CycleSet {
        let (a, b) = (self.n, other.n);
        let n = a + b;
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let v = match (x < a, y < a) {
                    (true, true) => self.op(x, y),
                    (false, false) => a + other.op(x - a, y - a),
                    _ => y,
                };
                table.push(v);
            }
        }
        CycleSet::validate(n, table).expect("disjoint union of cycle sets")
    }

    /// The cycle set obtained by transporting the structure along `f`:
    /// `f(x) *' f(y) = f(x * y)`.
    pub fn relabel(&self, f: &Permutation) -> CycleSet {
        let n = self.n;
        let mut table = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                table[f.apply(x) * n + f.apply(y)] = f.apply(self.op(x, y));
            }
        }
        CycleSet::validate(n, table).expect("relabelling preserves the axioms")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn row(&self, x: usize) -> &[usize] {
        &self.table[x * self.n..(x + 1) * self.n]
    }

    pub fn sigma(&self, x: usize) -> &Permutation {
        &self.sigma[x]
    }

    pub fn lambda(&self, x: usize) -> &Permutation {
        &self.lam[x]
    }

    pub fn lambdas(&self) -> &[Permutation] {
        &self.lam
    }

    /// `T: x -> x * x`.
    pub fn diagonal(&self) -> &Permutation {
        &self.diagonal
    }

    pub fn permutation_group(&self) -> Result<PermGroup> {
        self.permutation_group_with_cap(DEFAULT_CAP)
    }

    pub fn permutation_group_with_cap(&self, cap: usize) -> Result<PermGroup> {
        PermGroup::closure(self.n, &self.sigma, cap)
    }

    pub fn is_automorphism(&self, f: &Permutation) -> bool {
        f.degree() == self.n
            && (0..self.n)
                .all(|x| (0..self.n).all(|y| f.apply(self.op(x, y)) == self.op(f.apply(x), f.apply(y))))
    }

    /// Retraction classes (equal rows), each sorted, ordered by smallest member.
    pub fn retraction_classes(&self) -> Vec<Vec<usize>> {
        let mut by_row: HashMap<&[usize], usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.n {
            match by_row.get(self.row(x)) {
                Some(&c) => classes[c].push(x),
                None => {
                    by_row.insert(self.row(x), classes.len());
                    classes.push(vec![x]);
                }
            }
        }
        classes
    }

    pub fn is_retractable(&self) -> bool {
        self.retraction_classes().len() < self.n
    }

    /// The retraction `X/~` together with the projection.
    pub fn retract(&self) -> Result<(CycleSet, CycleSetHom)> {
        let classes = self.retraction_classes();
        let m = classes.len();
        let mut proj = vec![0; self.n];
        for (c, members) in classes.iter().enumerate() {
            for &x in members {
                proj[x] = c;
            }
        }
        let mut table = vec![usize::MAX; m * m];
        for x in 0..self.n {
            for y in 0..self.n {
                let cell = &mut table[proj[x] * m + proj[y]];
                let v = proj[self.op(x, y)];
                if *cell != usize::MAX && *cell != v {
                    return Err(Error::InvariantViolation(format!(
                        "retraction is not well defined at ({x},{y})"
                    )));
                }
                *cell = v;
            }
        }
        let target = CycleSet::validate(m, table)?;
        let hom = CycleSetHom { source: self.clone(), target: target.clone(), map: proj };
        Ok((target, hom))
    }

    /// `X, X_ret, X_ret_ret, ...` until a singleton or a stationary member.
    pub fn retraction_tower(&self) -> Result<Vec<CycleSet>> {
        let mut tower = vec![self.clone()];
        loop {
            let last = tower.last().unwrap();
            if last.n <= 1 {
                return Ok(tower);
            }
            let (next, _) = last.retract()?;
            if next.n == last.n {
                return Ok(tower);
            }
            tower.push(next);
        }
    }

    pub fn mpl(&self) -> Result<Mpl> {
        let tower = self.retraction_tower()?;
        let last = tower.last().unwrap();
        if last.n <= 1 {
            Ok(Mpl::Finite(tower.len() - 1))
        } else {
            Ok(Mpl::Infinite { level: tower.len() - 1, stationary: last.clone() })
        }
    }

    /// Orbits of `G(X)` on `X`; each orbit is checked to be closed under `*`.
    pub fn decomposition(&self) -> Result<(Vec<Vec<usize>>, bool)> {
        let orbits = orbits_of(self.n, &self.sigma);
        for orbit in &orbits {
            let members: BTreeSet<usize> = orbit.iter().copied().collect();
            for &x in orbit {
                for &y in orbit {
                    if !members.contains(&self.op(x, y)) {
                        return Err(Error::InvariantViolation(format!(
                            "orbit of {x} is not closed under *"
                        )));
                    }
                }
            }
        }
        let indecomposable = orbits.len() <= 1;
        Ok((orbits, indecomposable))
    }

    pub fn is_indecomposable(&self) -> bool {
        orbits_of(self.n, &self.sigma).len() <= 1
    }

    /// Smallest subset containing `seed` closed under `*`. On a finite set a
    /// closed subset is a sub-cycle set: restricted rows stay injective.
    pub fn generated_subcycleset(&self, seed: &[usize]) -> BTreeSet<usize> {
        let mut inside = vec![false; self.n];
        let mut members: Vec<usize> = Vec::new();
        for &s in seed {
            if !inside[s] {
                inside[s] = true;
                members.push(s);
            }
        }
        let mut done = 0;
        while done < members.len() {
            let x = members[done];
            done += 1;
            // pair the new member with everything present so far, both ways
            let mut k = 0;
            while k < members.len() {
                let y = members[k];
                k += 1;
                for v in [self.op(x, y), self.op(y, x)] {
                    if !inside[v] {
                        inside[v] = true;
                        members.push(v);
                    }
                }
            }
        }
        members.into_iter().collect()
    }

    pub fn is_irreducible(&self) -> bool {
        (0..self.n).all(|x| self.generated_subcycleset(&[x]).len() == self.n)
    }

    pub fn pi_type(&self) -> Result<PiType> {
        self.pi_type_with_cap(DEFAULT_CAP)
    }

    pub fn pi_type_with_cap(&self, cap: usize) -> Result<PiType> {
        if !self.is_indecomposable() {
            return Err(Error::NotIndecomposable);
        }
        let group = self.permutation_group_with_cap(cap)?;
        let primes_of_size = prime_divisors(self.n as u64);
        let primes_of_group = prime_divisors(group.order() as u64);
        let is_pi_type = primes_of_size == primes_of_group;
        let is_p_type = is_pi_type && primes_of_size.len() == 1;
        Ok(PiType { primes_of_size, primes_of_group, is_pi_type, is_p_type })
    }

    fn signature(&self, x: usize) -> (Vec<usize>, usize, usize) {
        let sigma_type = self.sigma[x].cycle_structure().cycle_type;
        let t_cycle = self
            .diagonal
            .cycles()
            .into_iter()
            .find(|c| c.contains(&x))
            .map_or(1, |c| c.len());
        let retraction_class = self.table.chunks(self.n).filter(|r| *r == self.row(x)).count();
        (sigma_type, t_cycle, retraction_class)
    }

    /// Sorted per-element signatures; equal for isomorphic cycle sets.
    pub fn iso_invariant(&self) -> IsoInvariant {
        let mut sig: Vec<_> = (0..self.n).map(|x| self.signature(x)).collect();
        sig.sort();
        IsoInvariant(sig)
    }

    /// An isomorphism `f: self -> other`, if one exists. Backtracking over
    /// images, pruned by per-element signatures and by forcing
    /// `f(x * y) = f(x) * f(y)` as soon as both sides are determined.
    pub fn are_isomorphic(&self, other: &CycleSet) -> Result<Option<Permutation>> {
        let n = self.n;
        if n > ISO_CAP {
            return Err(Error::SizeCapExceeded { n, cap: ISO_CAP });
        }
        if other.n != n {
            return Ok(None);
        }
        let sig_a: Vec<_> = (0..n).map(|x| self.signature(x)).collect();
        let sig_b: Vec<_> = (0..n).map(|x| other.signature(x)).collect();
        let mut sorted_a = sig_a.clone();
        let mut sorted_b = sig_b.clone();
        sorted_a.sort();
        sorted_b.sort();
        if sorted_a != sorted_b {
            return Ok(None);
        }
        let mut f = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if self.iso_rec(other, &sig_a, &sig_b, &mut f, &mut used) {
            Ok(Some(Permutation::from_images_unchecked(f)))
        } else {
            Ok(None)
        }
    }

    fn iso_rec(
        &self,
        other: &CycleSet,
        sig_a: &[(Vec<usize>, usize, usize)],
        sig_b: &[(Vec<usize>, usize, usize)],
        f: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = self.n;
        let Some(x) = (0..n).find(|&x| f[x] == usize::MAX) else {
            return true;
        };
        for t in 0..n {
            if used[t] || sig_a[x] != sig_b[t] {
                continue;
            }
            let snapshot = f.clone();
            let snapshot_used = used.clone();
            f[x] = t;
            used[t] = true;
            if self.propagate_iso(other, f, used) && self.iso_rec(other, sig_a, sig_b, f, used) {
                return true;
            }
            *f = snapshot;
            *used = snapshot_used;
        }
        false
    }

    fn propagate_iso(&self, other: &CycleSet, f: &mut [usize], used: &mut [bool]) -> bool {
        let n = self.n;
        loop {
            let mut changed = false;
            for x in 0..n {
                if f[x] == usize::MAX {
                    continue;
                }
                for y in 0..n {
                    if f[y] == usize::MAX {
                        continue;
                    }
                    let src = self.op(x, y);
                    let dst = other.op(f[x], f[y]);
                    if f[src] == usize::MAX {
                        if used[dst] {
                            return false;
                        }
                        f[src] = dst;
                        used[dst] = true;
                        changed = true;
                    } else if f[src] != dst {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Parses the text format: first non-comment line `n`, then `n` rows of
    /// `n` integers; lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<CycleSet> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse { line: first, msg: format!("expected size, got {header:?}") })?;
        let mut table = Vec::with_capacity(n * n);
        for row in 0..n {
            let (line, content) = lines
                .next()
                .ok_or(Error::Parse { line: first + row + 1, msg: format!("missing row {row}") })?;
            let entries: Vec<usize> = content
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad entry {t:?}") }))
                .collect::<Result<_>>()?;
            if entries.len() != n {
                return Err(Error::Parse { line, msg: format!("expected {n} entries, got {}", entries.len()) });
            }
            for (col, &v) in entries.iter().enumerate() {
                if v >= n {
                    return Err(Error::EntryOutOfRange { row, col, value: v, n });
                }
            }
            table.extend(entries);
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse { line, msg: "trailing content".into() });
        }
        CycleSet::validate(n, table)
    }

    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CycleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for x in 0..self.n {
            let row: Vec<String> = self.row(x).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Keeps one representative per isomorphism class, in input order.
pub fn dedup_isomorphic(sets: Vec<CycleSet>) -> Result<Vec<CycleSet>> {
    let mut buckets: HashMap<IsoInvariant, Vec<usize>> = HashMap::new();
    let mut reps: Vec<CycleSet> = Vec::new();
    for x in sets {
        let bucket = buckets.entry(x.iso_invariant()).or_default();
        let mut fresh = true;
        for &r in bucket.iter() {
            if reps[r].are_isomorphic(&x)?.is_some() {
                fresh = false;
                break;
            }
        }
        if fresh {
            bucket.push(reps.len());
            reps.push(x);
        }
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x4_19_basics() {
        let x = CycleSet::x4_19();
        assert_eq!(x.diagonal(), &Permutation::rotation(4, 1));
        assert!(x.diagonal().cycle_structure().is_full_cycle);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(x.sigma(a).apply(b), x.op(a, b));
                assert_eq!(x.lambda(a).apply(x.op(a, b)), b);
            }
        }
        assert!(!x.is_retractable());
        assert_eq!(x.permutation_group().unwrap().order(), 8);
        assert!(matches!(x.mpl().unwrap(), Mpl::Infinite { level: 0, ref stationary } if *stationary == x));
        let (orbits, indec) = x.decomposition().unwrap();
        assert_eq!(orbits.len(), 1);
        assert!(indec);
        assert!(x.is_irreducible());
        assert_eq!(x.generated_subcycleset(&[0]).len(), 4);
        let pi = x.pi_type().unwrap();
        assert!(pi.is_p_type && pi.is_pi_type);
        assert_eq!(pi.primes_of_group, BTreeSet::from([2]));
    }

    #[test]
    fn trivial_cycle_sets() {
        let t = CycleSet::trivial(3);
        assert!(t.diagonal().is_identity());
        assert!(t.lambdas().iter().all(Permutation::is_identity));
        assert_eq!(t.permutation_group().unwrap().order(), 1);
        assert_eq!(t.mpl().unwrap(), Mpl::Finite(1));
        assert_eq!(t.retract().unwrap().0.size(), 1);
        assert_eq!(t.decomposition().unwrap().0.len(), 3);
        assert!(!t.is_irreducible());
        assert_eq!(t.generated_subcycleset(&[0]), BTreeSet::from([0]));
        assert_eq!(t.generated_subcycleset(&[0, 1, 2]).len(), 3);
        assert_eq!(t.pi_type(), Err(Error::NotIndecomposable));
        assert_eq!(CycleSet::trivial(1).mpl().unwrap(), Mpl::Finite(0));
        let one = CycleSet::trivial(1).pi_type().unwrap();
        assert!(one.is_pi_type && !one.is_p_type && one.primes_of_group.is_empty());
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            CycleSet::from_rows(&[&[0, 0], &[0, 1]]),
            Err(Error::RowNotBijective { row: 0 })
        );
        // rows are bijections but (C2) fails
        let bad = CycleSet::from_rows(&[&[1, 0, 2], &[0, 1, 2], &[0, 1, 2]]);
        assert!(matches!(bad, Err(Error::CycloidViolation { .. })));
    }

    #[test]
    fn disjoint_union_has_two_orbits() {
        let x = CycleSet::x4_19();
        let u = x.disjoint_union(&x);
        assert_eq!(u.size(), 8);
        let (orbits, indec) = u.decomposition().unwrap();
        assert_eq!(orbits, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        assert!(!indec);
    }

    #[test]
    fn isomorphism_checks() {
        let x = CycleSet::x4_19();
        assert!(x.are_isomorphic(&x).unwrap().is_some());
        let shift = Permutation::rotation(4, 1);
        let y = x.relabel(&shift);
        // independent check: relabelled table equals shifted entries
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(y.op((a + 1) % 4, (b + 1) % 4), (x.op(a, b) + 1) % 4);
            }
        }
        let f = x.are_isomorphic(&y).unwrap().expect("isomorphic");
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(f.apply(x.op(a, b)), y.op(f.apply(a), f.apply(b)));
            }
        }
        assert!(x.are_isomorphic(&CycleSet::trivial(4)).unwrap().is_none());
        let big = CycleSet::trivial(9);
        assert!(matches!(big.are_isomorphic(&big), Err(Error::SizeCapExceeded { .. })));
    }

    #[test]
    fn parse_and_serialize() {
        let text = "4\n1 0 2 3\n3 2 0 1\n0 1 3 2\n2 3 1 0\n";
        let x = CycleSet::parse(text).unwrap();
        assert_eq!(x, CycleSet::x4_19());
        assert_eq!(x.serialize(), text);
        let commented = "# comment\n2\n# row 0\n1 0\n1 0\n";
        assert_eq!(CycleSet::parse(commented).unwrap().size(), 2);
        assert!(matches!(
            CycleSet::parse("4\n1 0 2 3\n3 2 0 1\n0 1 3 7\n2 3 1 0\n"),
            Err(Error::EntryOutOfRange { value: 7, .. })
        ));
        assert!(matches!(CycleSet::parse("2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(CycleSet::parse("2\n0 x\n0 1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn fixture_file_matches_table() {
        let text = include_str!("../../../fixtures/x4_19.cs");
        assert_eq!(CycleSet::parse(text).unwrap(), CycleSet::x4_19());
    }

    #[test]
    fn retraction_projection_is_hom() {
        let x = CycleSet::x4_19().disjoint_union(&CycleSet::trivial(2));
        let (r, hom) = x.retract().unwrap();
        assert!(hom.is_homomorphism());
        assert_eq!(r.size(), hom.fiber_sizes().len());
    }
}
