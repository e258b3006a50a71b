//! Backtracking search with row-allDifferent propagation and forward
//! checking of the cycloid equation `C(C(x,y),C(x,z)) = C(C(y,x),C(y,z))`.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use crate::cycleset::CycleSet;
use crate::par;

use super::model::SearchModel;

const NONE: u8 = u8::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    All,
    Decide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Timeout,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Timeout => "TIMEOUT",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn nodes(max: u64) -> Budget {
        Budget { max_nodes: Some(max), max_time: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    pub nodes: u64,
    pub propagations: u64,
    pub wall_time: Duration,
    /// Share of the search tree proven exhausted, weighting each child of a
    /// node equally. 1.0 after a complete run.
    pub explored_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub status: Status,
    /// Sorted by serialized table.
    pub solutions: Vec<CycleSet>,
    pub stats: Stats,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub mode: Mode,
    pub budget: Budget,
    /// Worker count; values above 1 split the first decision level across
    /// rayon workers.
    pub threads: usize,
}

#[derive(Clone)]
struct State {
    dom: Vec<u32>,
    val: Vec<u8>,
    row_inv: Vec<u8>,
    row_filled: Vec<u8>,
}

enum Flow {
    Continue,
    Stop,
}

struct Shared {
    nodes: AtomicU64,
    /// Lowest root-branch index that found a solution (FIRST/DECIDE).
    first_hit: AtomicUsize,
}

struct Solver<'m> {
    model: &'m SearchModel,
    n: usize,
    mode: Mode,
    budget: Budget,
    start: Instant,
    shared: &'m Shared,
    branch: usize,
    nodes: u64,
    propagations: u64,
    explored: f64,
    timed_out: bool,
    cancelled: bool,
    solutions: Vec<CycleSet>,
    queue: Vec<usize>,
    pending: Vec<(usize, usize)>,
}

impl<'m> Solver<'m> {
    fn new(model: &'m SearchModel, opts: &SolveOptions, shared: &'m Shared, start: Instant, branch: usize) -> Self {
        Solver {
            model,
            n: model.n(),
            mode: opts.mode,
            budget: opts.budget,
            start,
            shared,
            branch,
            nodes: 0,
            propagations: 0,
            explored: 0.0,
            timed_out: false,
            cancelled: false,
            solutions: Vec::new(),
            queue: Vec::new(),
            pending: Vec::new(),
        }
    }

    fn initial_state(&mut self) -> Option<State> {
        let n = self.n;
        let c = &self.model.compiled;
        let cells = n * n;
        let mut st = State {
            dom: vec![0; cells],
            val: vec![NONE; cells],
            row_inv: vec![NONE; cells],
            row_filled: vec![0; n],
        };
        for (k, members) in c.members.iter().enumerate() {
            let mask = c.rep_mask[k];
            if mask == 0 {
                return None;
            }
            for &m in members {
                let mut img = 0u32;
                for u in 0..n {
                    if mask & (1 << u) != 0 {
                        img |= 1 << c.transform[m].apply(u, n);
                    }
                }
                st.dom[m] = img;
            }
            if mask.count_ones() == 1 {
                let rep = members[0];
                self.pending.push((rep, st.dom[rep].trailing_zeros() as usize));
            }
        }
        if self.propagate(&mut st) {
            Some(st)
        } else {
            None
        }
    }

    fn fail(&mut self) -> bool {
        self.queue.clear();
        self.pending.clear();
        false
    }

    fn assign(&mut self, st: &mut State, cell: usize, v: usize) -> bool {
        let n = self.n;
        let c = &self.model.compiled;
        let u = c.transform[cell].invert(v, n);
        for &m in &c.members[c.class_of[cell]] {
            let w = c.transform[m].apply(u, n);
            if st.val[m] != NONE {
                if st.val[m] as usize != w {
                    return self.fail();
                }
                continue;
            }
            let (i, j) = (m / n, m % n);
            if st.dom[m] & (1 << w) == 0 || st.row_inv[i * n + w] != NONE {
                return self.fail();
            }
            st.val[m] = w as u8;
            st.dom[m] = 1 << w;
            st.row_inv[i * n + w] = j as u8;
            st.row_filled[i] += 1;
            self.queue.push(m);
        }
        true
    }

    fn remove(&mut self, st: &mut State, cell: usize, v: usize) -> bool {
        if st.val[cell] != NONE {
            return st.val[cell] as usize != v || self.fail();
        }
        if st.dom[cell] & (1 << v) == 0 {
            return true;
        }
        let n = self.n;
        let c = &self.model.compiled;
        let u = c.transform[cell].invert(v, n);
        for &m in &c.members[c.class_of[cell]] {
            let w = c.transform[m].apply(u, n);
            st.dom[m] &= !(1 << w);
        }
        let left = st.dom[cell];
        if left == 0 {
            return self.fail();
        }
        if left.count_ones() == 1 {
            self.pending.push((cell, left.trailing_zeros() as usize));
        }
        true
    }

    fn restrict(&mut self, st: &mut State, cell: usize, mask: u32) -> bool {
        if st.val[cell] != NONE {
            return mask & (1 << st.val[cell]) != 0 || self.fail();
        }
        let mut drop = st.dom[cell] & !mask;
        while drop != 0 {
            let v = drop.trailing_zeros() as usize;
            drop &= drop - 1;
            if !self.remove(st, cell, v) {
                return false;
            }
        }
        true
    }

    #[inline]
    fn get(&self, st: &State, i: usize, j: usize) -> Option<usize> {
        let v = st.val[i * self.n + j];
        (v != NONE).then_some(v as usize)
    }

    /// Forward check of one instance of the cycloid equation.
    fn eval_triple(&mut self, st: &mut State, x: usize, y: usize, z: usize) -> bool {
        if x == y {
            return true;
        }
        let n = self.n;
        let (a, b, c, d) = (self.get(st, x, y), self.get(st, x, z), self.get(st, y, x), self.get(st, y, z));
        match (a, b, c, d) {
            (Some(a), Some(b), Some(c), Some(d)) => {
                let (l, r) = (a * n + b, c * n + d);
                if l == r {
                    return true;
                }
                match (self.get(st, a, b), self.get(st, c, d)) {
                    (Some(v), Some(w)) => v == w || self.fail(),
                    (Some(v), None) => self.assign(st, r, v),
                    (None, Some(w)) => self.assign(st, l, w),
                    (None, None) => {
                        let mask = st.dom[l] & st.dom[r];
                        mask != 0 && self.restrict(st, l, mask) && self.restrict(st, r, mask)
                            || self.fail()
                    }
                }
            }
            // C(c, C(y,z)) must equal C(a,b)
            (Some(a), Some(b), Some(c), None) => match self.get(st, a, b) {
                Some(w) => self.force_column(st, y * n + z, c, w),
                None => self.support_column(st, y * n + z, c, st.dom[a * n + b]),
            },
            (Some(a), None, Some(c), Some(d)) => match self.get(st, c, d) {
                Some(w) => self.force_column(st, x * n + z, a, w),
                None => self.support_column(st, x * n + z, a, st.dom[c * n + d]),
            },
            // C(C(y,x), d) must equal C(a,b)
            (Some(a), Some(b), None, Some(d)) => match self.get(st, a, b) {
                Some(w) => self.force_row(st, y * n + x, d, w),
                None => true,
            },
            (None, Some(b), Some(c), Some(d)) => match self.get(st, c, d) {
                Some(w) => self.force_row(st, x * n + y, b, w),
                None => true,
            },
            _ => true,
        }
    }

    /// Cell `target` holds a column `q` with `C(row, q) = w`.
    fn force_column(&mut self, st: &mut State, target: usize, row: usize, w: usize) -> bool {
        let n = self.n;
        let q = st.row_inv[row * n + w];
        if q != NONE {
            return self.restrict(st, target, 1 << q);
        }
        let mut mask = 0u32;
        for q in 0..n {
            if st.dom[row * n + q] & (1 << w) != 0 {
                mask |= 1 << q;
            }
        }
        self.restrict(st, target, mask)
    }

    /// Cell `target` holds a column `q` where `C(row, q)` can meet `allowed`.
    fn support_column(&mut self, st: &mut State, target: usize, row: usize, allowed: u32) -> bool {
        let n = self.n;
        let mut mask = 0u32;
        for q in 0..n {
            if st.dom[row * n + q] & allowed != 0 {
                mask |= 1 << q;
            }
        }
        self.restrict(st, target, mask)
    }

    /// Cell `target` holds a row `p` with `C(p, col) = w` possible.
    fn force_row(&mut self, st: &mut State, target: usize, col: usize, w: usize) -> bool {
        let n = self.n;
        let mut mask = 0u32;
        for p in 0..n {
            if st.dom[p * n + col] & (1 << w) != 0 {
                mask |= 1 << p;
            }
        }
        self.restrict(st, target, mask)
    }

    fn cycloid_triggers(&mut self, st: &mut State, i: usize, j: usize) -> bool {
        let n = self.n;
        for t in 0..n {
            // (i,j) as C(x,y), C(x,z), C(y,x), C(y,z)
            if !(self.eval_triple(st, i, j, t)
                && self.eval_triple(st, i, t, j)
                && self.eval_triple(st, j, i, t)
                && self.eval_triple(st, t, i, j))
            {
                return false;
            }
        }
        // (i,j) as an outer cell C(a,b) or C(c,d)
        for r in 0..n {
            let (p, q) = (st.row_inv[r * n + i], st.row_inv[r * n + j]);
            if p != NONE && q != NONE {
                let (p, q) = (p as usize, q as usize);
                if !(self.eval_triple(st, r, p, q) && self.eval_triple(st, p, r, q)) {
                    return false;
                }
            }
        }
        true
    }

    fn rows_equal(&self, st: &State, a: usize, b: usize) -> bool {
        let n = self.n;
        st.val[a * n..(a + 1) * n] == st.val[b * n..(b + 1) * n]
    }

    fn propagate(&mut self, st: &mut State) -> bool {
        let n = self.n;
        loop {
            while let Some(cell) = self.queue.pop() {
                self.propagations += 1;
                let (i, j) = (cell / n, cell % n);
                let v = st.val[cell] as usize;
                for j2 in 0..n {
                    if j2 != j && !self.remove(st, i * n + j2, v) {
                        return false;
                    }
                }
                if !self.cycloid_triggers(st, i, j) {
                    return false;
                }
                if self.model.spec().require_irretractable && st.row_filled[i] as usize == n {
                    let clash = (0..n).any(|r| r != i && st.row_filled[r] as usize == n && self.rows_equal(st, i, r));
                    if clash {
                        return self.fail();
                    }
                }
            }
            if let Some((cell, v)) = self.pending.pop() {
                if st.val[cell] == NONE {
                    if !self.assign(st, cell, v) {
                        return false;
                    }
                } else if st.val[cell] as usize != v {
                    return self.fail();
                }
                continue;
            }
            // hidden singles: a value with one possible column in its row
            let mut progressed = false;
            'rows: for i in 0..n {
                if st.row_filled[i] as usize == n {
                    continue;
                }
                for v in 0..n {
                    if st.row_inv[i * n + v] != NONE {
                        continue;
                    }
                    let mut spot = None;
                    let mut count = 0;
                    for j in 0..n {
                        if st.val[i * n + j] == NONE && st.dom[i * n + j] & (1 << v) != 0 {
                            count += 1;
                            spot = Some(j);
                        }
                    }
                    match count {
                        0 => return self.fail(),
                        1 => {
                            if !self.assign(st, i * n + spot.unwrap(), v) {
                                return false;
                            }
                            progressed = true;
                            break 'rows;
                        }
                        _ => {}
                    }
                }
            }
            if !progressed {
                return true;
            }
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        let total = self.shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.budget.max_nodes.is_some_and(|m| total > m) {
            self.timed_out = true;
        }
        if self.nodes.is_multiple_of(256) {
            if self.budget.max_time.is_some_and(|t| self.start.elapsed() > t) {
                self.timed_out = true;
            }
            if self.mode != Mode::All && self.shared.first_hit.load(Ordering::Relaxed) < self.branch {
                self.cancelled = true;
            }
        }
        self.timed_out || self.cancelled
    }

    /// Unassigned class with the fewest values; ties go to the lowest cell.
    fn choose(&self, st: &State) -> Option<usize> {
        let c = &self.model.compiled;
        let mut best: Option<(u32, usize)> = None;
        for members in &c.members {
            let rep = members[0];
            if st.val[rep] != NONE {
                continue;
            }
            let size = st.dom[rep].count_ones();
            if best.is_none_or(|(s, _)| size < s) {
                best = Some((size, rep));
            }
        }
        best.map(|(_, rep)| rep)
    }

    fn record_solution(&mut self, st: &State) -> Flow {
        let n = self.n;
        let table: Vec<usize> = st.val.iter().map(|&v| v as usize).collect();
        let x = CycleSet::validate(n, table).expect("solver produced an invalid cycle set");
        if self.model.spec().require_irretractable && x.is_retractable() {
            return Flow::Continue;
        }
        assert!(self.model.is_satisfied_by(&x), "solver produced a table violating the model");
        self.solutions.push(x);
        if self.mode == Mode::All {
            Flow::Continue
        } else {
            self.shared.first_hit.fetch_min(self.branch, Ordering::Relaxed);
            Flow::Stop
        }
    }

    fn search(&mut self, st: &State, weight: f64) -> Flow {
        self.nodes += 1;
        if self.out_of_budget() {
            return Flow::Stop;
        }
        let Some(rep) = self.choose(st) else {
            self.explored += weight;
            return self.record_solution(st);
        };
        let values: Vec<usize> = (0..self.n).filter(|&v| st.dom[rep] & (1 << v) != 0).collect();
        let w = weight / values.len() as f64;
        for v in values {
            let mut child = st.clone();
            if self.assign(&mut child, rep, v) && self.propagate(&mut child) {
                if let Flow::Stop = self.search(&child, w) {
                    return Flow::Stop;
                }
            } else {
                self.explored += w;
            }
        }
        Flow::Continue
    }
}

pub fn solve(model: &SearchModel, mode: Mode, budget: Budget) -> SearchOutcome {
    solve_with(model, &SolveOptions { mode, budget, threads: 1 })
}

pub fn solve_with(model: &SearchModel, opts: &SolveOptions) -> SearchOutcome {
    let start = Instant::now();
    let shared = Shared { nodes: AtomicU64::new(0), first_hit: AtomicUsize::new(usize::MAX) };
    let mut root = Solver::new(model, opts, &shared, start, 0);
    let Some(st) = root.initial_state() else {
        return finish(
            Vec::new(),
            false,
            Stats { nodes: 1, propagations: root.propagations, wall_time: start.elapsed(), explored_fraction: 1.0 },
            opts.mode,
        );
    };
    if opts.threads <= 1 || !par::parallel_enabled() {
        let flow = root.search(&st, 1.0);
        let _ = flow;
        let stats = Stats {
            nodes: root.nodes,
            propagations: root.propagations,
            wall_time: start.elapsed(),
            explored_fraction: root.explored.min(1.0),
        };
        return finish(root.solutions, root.timed_out, stats, opts.mode);
    }

    // split on the first decision level
    root.nodes += 1;
    let Some(rep) = root.choose(&st) else {
        let _ = root.record_solution(&st);
        let stats = Stats { nodes: 1, propagations: root.propagations, wall_time: start.elapsed(), explored_fraction: 1.0 };
        return finish(root.solutions, false, stats, opts.mode);
    };
    let values: Vec<usize> = (0..model.n()).filter(|&v| st.dom[rep] & (1 << v) != 0).collect();
    let w = 1.0 / values.len() as f64;
    let results = par::with_threads(opts.threads, || {
        par::map_slice(&values.iter().copied().enumerate().collect::<Vec<_>>(), |&(k, v)| {
            let mut s = Solver::new(model, opts, &shared, start, k);
            let mut child = st.clone();
            if s.assign(&mut child, rep, v) && s.propagate(&mut child) {
                let _ = s.search(&child, w);
            } else {
                s.explored += w;
            }
            (s.solutions, s.timed_out, s.nodes, s.propagations, s.explored)
        })
    });
    let mut solutions = Vec::new();
    let mut timed_out = false;
    let mut stats = Stats { nodes: root.nodes, propagations: root.propagations, ..Stats::default() };
    let hit = shared.first_hit.load(Ordering::Relaxed);
    for (k, (sols, to, nodes, props, explored)) in results.into_iter().enumerate() {
        stats.nodes += nodes;
        stats.propagations += props;
        stats.explored_fraction += explored;
        if opts.mode == Mode::All {
            timed_out |= to;
            solutions.extend(sols);
        } else if k < hit {
            timed_out |= to;
        } else if k == hit {
            solutions = sols;
        }
    }
    stats.wall_time = start.elapsed();
    stats.explored_fraction = stats.explored_fraction.min(1.0);
    finish(solutions, timed_out, stats, opts.mode)
}

fn finish(mut solutions: Vec<CycleSet>, timed_out: bool, mut stats: Stats, mode: Mode) -> SearchOutcome {
    solutions.sort_by_cached_key(|x| x.serialize());
    if mode != Mode::All {
        solutions.truncate(1);
    }
    let status = if !solutions.is_empty() && (mode != Mode::All || !timed_out) {
        Status::Sat
    } else if timed_out {
        Status::Timeout
    } else {
        Status::Unsat
    };
    if status != Status::Timeout {
        stats.explored_fraction = if status == Status::Unsat || mode == Mode::All { 1.0 } else { stats.explored_fraction };
    }
    SearchOutcome { status, solutions, stats }
}
