//! Declarative constraint models over `n × n` cycle-set tables.
//!
//! Symmetry constraints are compiled into cell classes: every cell `c` is
//! tied to its class representative `r` by an affine value map,
//! `C(c) = t_c(C(r))` with `t_c(v) = ±v + b (mod n)`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::cycleset::CycleSet;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest table size the solver supports (domains are `u32` bitmasks).
pub const MAX_N: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagonal {
    None,
    /// `C(i,i) = i + 1 (mod n)`
    FullCycle,
    Explicit(Permutation),
}

impl Diagonal {
    fn value(&self, n: usize, i: usize) -> Option<usize> {
        match self {
            Diagonal::None => None,
            Diagonal::FullCycle => Some((i + 1) % n),
            Diagonal::Explicit(p) => Some(p.apply(i)),
        }
    }
}

/// The user-facing description of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub n: usize,
    /// `(row, col, value)`
    pub fixed_cells: Vec<(usize, usize, usize)>,
    pub diagonal: Diagonal,
    /// `C(i, β-j) = β - C(i,j)` for odd `β`.
    pub central_symmetry: Option<usize>,
    /// `C(i+s, j+s) = C(i,j) + s`.
    pub shift_automorphism: Option<usize>,
    pub require_irretractable: bool,
    pub require_all_solutions: bool,
}

impl ModelSpec {
    pub fn new(n: usize) -> ModelSpec {
        ModelSpec {
            n,
            fixed_cells: Vec::new(),
            diagonal: Diagonal::None,
            central_symmetry: None,
            shift_automorphism: None,
            require_irretractable: false,
            require_all_solutions: false,
        }
    }

    /// Parses `key=value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<ModelSpec> {
        let mut spec: Option<ModelSpec> = None;
        let mut pending: Vec<(usize, String, String)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(Error::Parse { line: k + 1, msg: format!("expected key=value, got {line:?}") })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "n" {
                let n = value
                    .parse()
                    .map_err(|_| Error::Parse { line: k + 1, msg: format!("bad size {value:?}") })?;
                spec = Some(ModelSpec::new(n));
            } else {
                pending.push((k + 1, key.to_string(), value.to_string()));
            }
        }
        let mut spec = spec.ok_or(Error::Parse { line: 0, msg: "missing n=".into() })?;
        for (line, key, value) in pending {
            let bad = |what: &str| Error::Parse { line, msg: format!("bad {what} {value:?}") };
            let flag = |v: &str| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(bad("flag")),
            };
            match key.as_str() {
                "diagonal" => {
                    spec.diagonal = match value.as_str() {
                        "none" => Diagonal::None,
                        "fullcycle" => Diagonal::FullCycle,
                        v => match v.strip_prefix("explicit:") {
                            Some(images) => Diagonal::Explicit(
                                Permutation::from_str(images).map_err(|_| bad("permutation"))?,
                            ),
                            None => return Err(bad("diagonal")),
                        },
                    }
                }
                "central_symmetry" => spec.central_symmetry = Some(value.parse().map_err(|_| bad("beta"))?),
                "shift" => spec.shift_automorphism = Some(value.parse().map_err(|_| bad("shift"))?),
                "irretractable" => spec.require_irretractable = flag(&value)?,
                "all_solutions" => spec.require_all_solutions = flag(&value)?,
                "fixed" => {
                    let parts: Vec<usize> = value
                        .split(',')
                        .map(|p| p.trim().parse().map_err(|_| bad("fixed cell")))
                        .collect::<Result<_>>()?;
                    let [i, j, v] = parts[..] else { return Err(bad("fixed cell")) };
                    spec.fixed_cells.push((i, j, v));
                }
                _ => return Err(Error::Parse { line, msg: format!("unknown key {key:?}") }),
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        match &self.diagonal {
            Diagonal::None => writeln!(f, "diagonal=none")?,
            Diagonal::FullCycle => writeln!(f, "diagonal=fullcycle")?,
            Diagonal::Explicit(p) => writeln!(f, "diagonal=explicit:{p}")?,
        }
        if let Some(b) = self.central_symmetry {
            writeln!(f, "central_symmetry={b}")?;
        }
        if let Some(s) = self.shift_automorphism {
            writeln!(f, "shift={s}")?;
        }
        writeln!(f, "irretractable={}", self.require_irretractable)?;
        writeln!(f, "all_solutions={}", self.require_all_solutions)?;
        for (i, j, v) in &self.fixed_cells {
            writeln!(f, "fixed={i},{j},{v}")?;
        }
        Ok(())
    }
}

/// `v ↦ (neg ? -v : v) + add (mod n)`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Affine {
    pub neg: bool,
    pub add: usize,
}

impl Affine {
    pub const ID: Affine = Affine { neg: false, add: 0 };

    #[inline]
    pub fn apply(self, v: usize, n: usize) -> usize {
        let base = if self.neg { (n - v) % n } else { v };
        (base + self.add) % n
    }

    #[inline]
    pub fn invert(self, w: usize, n: usize) -> usize {
        if self.neg {
            // w = add - v
            (self.add + n - w) % n
        } else {
            (w + n - self.add) % n
        }
    }

    /// `self ∘ other`
    pub fn after(self, other: Affine, n: usize) -> Affine {
        Affine {
            neg: self.neg ^ other.neg,
            add: self.apply(other.add, n),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub class_of: Vec<usize>,
    pub transform: Vec<Affine>,
    pub members: Vec<Vec<usize>>,
    /// Allowed values of each class representative.
    pub rep_mask: Vec<u32>,
}

/// A compiled model; see [`build_model`].
#[derive(Debug, Clone)]
pub struct SearchModel {
    spec: ModelSpec,
    pub(crate) compiled: Compiled,
}

impl SearchModel {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn num_cells(&self) -> usize {
        self.spec.n * self.spec.n
    }

    /// Number of independent decision variables after aliasing.
    pub fn num_classes(&self) -> usize {
        self.compiled.members.len()
    }

    /// Classes whose representative still has more than one allowed value.
    pub fn num_free_classes(&self) -> usize {
        self.compiled.rep_mask.iter().filter(|m| m.count_ones() > 1).count()
    }

    /// Independent check of every model constraint on a finished table.
    pub fn is_satisfied_by(&self, x: &CycleSet) -> bool {
        let s = &self.spec;
        let n = s.n;
        if x.size() != n {
            return false;
        }
        if s.fixed_cells.iter().any(|&(i, j, v)| x.op(i, j) != v) {
            return false;
        }
        if (0..n).any(|i| s.diagonal.value(n, i).is_some_and(|v| x.op(i, i) != v)) {
            return false;
        }
        if let Some(b) = s.central_symmetry {
            let ok = (0..n).all(|i| (0..n).all(|j| x.op(i, (b + n - j) % n) == (b + n - x.op(i, j)) % n));
            if !ok {
                return false;
            }
        }
        if let Some(sh) = s.shift_automorphism {
            let ok = (0..n).all(|i| (0..n).all(|j| x.op((i + sh) % n, (j + sh) % n) == (x.op(i, j) + sh) % n));
            if !ok {
                return false;
            }
        }
        !(s.require_irretractable && x.is_retractable())
    }
}

type CellMap = Box<dyn Fn(usize, usize) -> (usize, usize)>;

/// Compiles a specification, rejecting structurally invalid ones.
pub fn build_model(spec: ModelSpec) -> Result<SearchModel> {
    let n = spec.n;
    if n == 0 || n > MAX_N {
        return Err(Error::UnsupportedSize { n, what: "search model" });
    }
    if let Some(b) = spec.central_symmetry {
        if b % 2 == 0 || b >= n {
            return Err(Error::InconsistentSpec(format!("central symmetry needs an odd beta in 0..{n}, got {b}")));
        }
    }
    if let Some(s) = spec.shift_automorphism {
        if s == 0 || s >= n {
            return Err(Error::InconsistentSpec(format!("shift must satisfy 0 < s < {n}, got {s}")));
        }
    }
    if let Diagonal::Explicit(p) = &spec.diagonal {
        if p.degree() != n {
            return Err(Error::InconsistentSpec(format!("diagonal has degree {}, expected {n}", p.degree())));
        }
    }
    if let Some(&(i, j, v)) = spec.fixed_cells.iter().find(|&&(i, j, v)| i >= n || j >= n || v >= n) {
        return Err(Error::InconsistentSpec(format!("fixed cell ({i},{j})={v} out of range")));
    }

    let cells = n * n;
    let mut gens: Vec<(CellMap, Affine)> = Vec::new();
    if let Some(b) = spec.central_symmetry {
        gens.push((Box::new(move |i, j| (i, (b + n - j) % n)), Affine { neg: true, add: b }));
    }
    if let Some(s) = spec.shift_automorphism {
        gens.push((Box::new(move |i, j| ((i + s) % n, (j + s) % n)), Affine { neg: false, add: s }));
    }

    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut class_of = vec![usize::MAX; cells];
    let mut transform = vec![Affine::ID; cells];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut rep_mask: Vec<u32> = Vec::new();
    for start in 0..cells {
        if class_of[start] != usize::MAX {
            continue;
        }
        let k = members.len();
        let mut mask = full;
        class_of[start] = k;
        let mut list = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for (cell_map, val_map) in &gens {
                let (i2, j2) = cell_map(c / n, c % n);
                let c2 = i2 * n + j2;
                let t2 = val_map.after(transform[c], n);
                if class_of[c2] == usize::MAX {
                    class_of[c2] = k;
                    transform[c2] = t2;
                    list.push(c2);
                    queue.push_back(c2);
                } else if transform[c2] != t2 {
                    // two routes to c2 must agree on the representative's value
                    let t1 = transform[c2];
                    for u in 0..n {
                        if t1.apply(u, n) != t2.apply(u, n) {
                            mask &= !(1 << u);
                        }
                    }
                }
            }
        }
        list.sort_unstable();
        members.push(list);
        rep_mask.push(mask);
    }
    let mut pin = |cell: usize, v: usize| {
        let u = transform[cell].invert(v, n);
        rep_mask[class_of[cell]] &= 1 << u;
    };
    for i in 0..n {
        if let Some(v) = spec.diagonal.value(n, i) {
            pin(i * n + i, v);
        }
    }
    for &(i, j, v) in &spec.fixed_cells {
        pin(i * n + j, v);
    }
    Ok(SearchModel { spec, compiled: Compiled { class_of, transform, members, rep_mask } })
}

/// The appendix model for `n = 2^v`: full-cycle diagonal, `β = 1`,
/// shift `n/2`, irretractable.
pub fn appendix_model(v: u32) -> Result<SearchModel> {
    if !(3..=4).contains(&v) {
        return Err(Error::UnsupportedV(v));
    }
    let n = 1usize << v;
    build_model(ModelSpec {
        n,
        fixed_cells: Vec::new(),
        diagonal: Diagonal::FullCycle,
        central_symmetry: Some(1),
        shift_automorphism: Some(n / 2),
        require_irretractable: true,
        require_all_solutions: false,
    })
}
