//! Built-in conflict-driven DPLL solver: two watched literals, first-UIP
//! learning, activity-based branching with phase saving, Luby restarts.
//!
//! Small and dependency-free; meant for tests, validation and modest
//! instances. Reusable across calls with different assumptions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::cnf::{CnfFormula, Lit, Model, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Sat(Model),
    Unsat,
    /// Budget exhausted or cancelled.
    Unknown,
}

#[derive(Clone, Debug, Default)]
pub struct Limits {
    pub conflicts: Option<u64>,
    pub cancel: Option<Arc<AtomicBool>>,
}

const NO_REASON: u32 = u32::MAX;

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

#[derive(PartialEq)]
struct HeapEntry(f64, u32);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then_with(|| other.1.cmp(&self.1))
    }
}

pub struct Solver {
    num_vars: u32,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<i8>,
    levels: Vec<u32>,
    reasons: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: BinaryHeap<HeapEntry>,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    conflicts: u64,
    num_learnts: usize,
    max_learnts: f64,
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

impl Solver {
    pub fn new(f: &CnfFormula) -> Self {
        let n = f.num_vars() as usize;
        let mut s = Solver {
            num_vars: f.num_vars(),
            clauses: Vec::with_capacity(f.num_clauses()),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![0; n + 1],
            levels: vec![0; n + 1],
            reasons: vec![NO_REASON; n + 1],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n + 1],
            var_inc: 1.0,
            heap: (1..=n as u32).map(|v| HeapEntry(0.0, v)).collect(),
            polarity: vec![false; n + 1],
            seen: vec![false; n + 1],
            ok: true,
            conflicts: 0,
            num_learnts: 0,
            max_learnts: (f.num_clauses() as f64 / 3.0).max(5000.0),
        };
        for c in f.clauses() {
            s.add_clause(c);
            if !s.ok {
                break;
            }
        }
        s
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn conflicts(&self) -> u64 {
        self.conflicts
    }

    fn add_clause(&mut self, c: &[Lit]) {
        let mut lits: Vec<Lit> = Vec::with_capacity(c.len());
        for &l in c {
            match self.value(l) {
                1 => return,
                -1 => {}
                _ => lits.push(l),
            }
        }
        match lits.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(Clause { lits, learnt: false, deleted: false, lbd: 0 });
            }
        }
    }

    fn attach(&mut self, c: Clause) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[(!c.lits[0]).code()].push(Watch { cref, blocker: c.lits[1] });
        self.watches[(!c.lits[1]).code()].push(Watch { cref, blocker: c.lits[0] });
        self.clauses.push(c);
        cref
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        let a = self.assigns[l.var().index() as usize];
        if l.is_positive() {
            a
        } else {
            -a
        }
    }

    #[inline]
    fn level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var().index() as usize;
        self.assigns[v] = if l.is_positive() { 1 } else { -1 };
        self.levels[v] = self.level();
        self.reasons[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = Watch { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != -1 {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[(!l).code()].push(Watch { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watch { cref: w.cref, blocker: first };
                j += 1;
                if self.value(first) == -1 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
            let entries: Vec<HeapEntry> = (1..=self.num_vars)
                .filter(|&u| self.assigns[u as usize] == 0)
                .map(|u| HeapEntry(self.activity[u as usize], u))
                .collect();
            self.heap = entries.into_iter().collect();
        }
        if self.assigns[v] == 0 {
            self.heap.push(HeapEntry(self.activity[v], v as u32));
        }
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit::from_dimacs(1)];
        let mut pending = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            let lits = self.clauses[confl as usize].lits.clone();
            let start = usize::from(p.is_some());
            for &q in &lits[start..] {
                let v = q.var().index() as usize;
                if !self.seen[v] && self.levels[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.levels[v] >= self.level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index() as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            let v = lit.var().index() as usize;
            self.seen[v] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
            confl = self.reasons[v];
        }
        learnt[0] = !p.expect("conflict has a literal");
        for l in &learnt[1..] {
            self.seen[l.var().index() as usize] = false;
        }
        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.levels[learnt[i].var().index() as usize] > self.levels[learnt[max_i].var().index() as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.levels[learnt[1].var().index() as usize]
        };
        (learnt, bt)
    }

    fn backtrack(&mut self, level: u32) {
        if self.level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index() as usize;
            self.assigns[v] = 0;
            self.reasons[v] = NO_REASON;
            self.polarity[v] = l.is_positive();
            self.heap.push(HeapEntry(self.activity[v], v as u32));
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(HeapEntry(act, v)) = self.heap.pop() {
            let vi = v as usize;
            if self.assigns[vi] == 0 && act == self.activity[vi] {
                return Some(Var::new(v).lit(self.polarity[vi]));
            }
        }
        None
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&c| {
                let cl = &self.clauses[c as usize];
                cl.learnt && !cl.deleted && cl.lits.len() > 2 && !self.locked(c)
            })
            .collect();
        cands.sort_by_key(|&c| std::cmp::Reverse(self.clauses[c as usize].lbd));
        for &c in cands.iter().take(cands.len() / 2) {
            let cl = &mut self.clauses[c as usize];
            cl.deleted = true;
            cl.lits = Vec::new();
            self.num_learnts -= 1;
        }
    }

    fn locked(&self, c: u32) -> bool {
        let l = self.clauses[c as usize].lits[0];
        let v = l.var().index() as usize;
        self.value(l) == 1 && self.reasons[v] == c
    }

    fn cancelled(limits: &Limits) -> bool {
        limits.cancel.as_ref().is_some_and(|c| c.load(AtomicOrdering::Relaxed))
    }

    /// Solves under `assumptions`; the solver is left at level 0 afterwards.
    pub fn solve(&mut self, assumptions: &[Lit], limits: &Limits) -> Outcome {
        let out = self.search(assumptions, limits);
        self.backtrack(0);
        out
    }

    fn search(&mut self, assumptions: &[Lit], limits: &Limits) -> Outcome {
        if !self.ok {
            return Outcome::Unsat;
        }
        if assumptions.iter().any(|l| l.var().index() > self.num_vars) {
            return Outcome::Unknown;
        }
        let start_conflicts = self.conflicts;
        let mut restart_count = 0u64;
        let mut restart_budget = (luby(2.0, 0) * 100.0) as u64;
        let mut since_restart = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                since_restart += 1;
                if self.level() == 0 {
                    self.ok = false;
                    return Outcome::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let mut lv: Vec<u32> = learnt.iter().map(|l| self.levels[l.var().index() as usize]).collect();
                    lv.sort_unstable();
                    lv.dedup();
                    let first = learnt[0];
                    let cref = self.attach(Clause { lits: learnt, learnt: true, deleted: false, lbd: lv.len() as u32 });
                    self.num_learnts += 1;
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                if limits.conflicts.is_some_and(|b| self.conflicts - start_conflicts >= b) || Self::cancelled(limits) {
                    return Outcome::Unknown;
                }
                if since_restart >= restart_budget {
                    restart_count += 1;
                    restart_budget = (luby(2.0, restart_count) * 100.0) as u64;
                    since_restart = 0;
                    self.backtrack(0);
                }
                if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
            } else {
                let dl = self.level() as usize;
                let next = if dl < assumptions.len() {
                    let a = assumptions[dl];
                    match self.value(a) {
                        1 => {
                            self.trail_lim.push(self.trail.len());
                            continue;
                        }
                        -1 => return Outcome::Unsat,
                        _ => a,
                    }
                } else {
                    match self.pick_branch() {
                        Some(l) => l,
                        None => return Outcome::Sat(self.model()),
                    }
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, NO_REASON);
            }
        }
    }

    fn model(&self) -> Model {
        Model::from_values((1..=self.num_vars as usize).map(|v| self.assigns[v] == 1).collect())
    }

    /// Literals implied by unit propagation from `assumptions`, or `None`
    /// on conflict.
    pub fn implied(&mut self, assumptions: &[Lit]) -> Option<Vec<Lit>> {
        if !self.ok {
            return None;
        }
        let base = self.trail.len();
        let mut result = None;
        self.trail_lim.push(self.trail.len());
        let mut conflict = false;
        for &a in assumptions {
            match self.value(a) {
                1 => {}
                -1 => {
                    conflict = true;
                    break;
                }
                _ => {
                    self.enqueue(a, NO_REASON);
                    if self.propagate().is_some() {
                        conflict = true;
                        break;
                    }
                }
            }
        }
        if !conflict {
            let mut all: Vec<Lit> = self.trail[..base].to_vec();
            all.extend_from_slice(&self.trail[base..]);
            result = Some(all);
        }
        self.backtrack(0);
        result
    }
}

pub fn solve(f: &CnfFormula) -> Outcome {
    solve_with_assumptions(f, &[], None)
}

pub fn solve_with_assumptions(f: &CnfFormula, assumptions: &[Lit], conflict_budget: Option<u64>) -> Outcome {
    let mut s = Solver::new(f);
    s.solve(assumptions, &Limits { conflicts: conflict_budget, cancel: None })
}
