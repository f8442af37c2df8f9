//! Propagation fixpoint, disjunction handling and depth-first labeling.

use std::sync::Arc;

use super::compile::{post, Space, Table};
use super::difference::closure;
use super::domain::{Domain, Fail};
use super::SolverError;
use crate::constraint_ir::{constraint_definedness, negate, Model};
use crate::renaming::{ArithOp, Constraint, RelOp, SolverExpr};

/// Hard cap on propagator runs per fixpoint before giving up on further
/// narrowing (sound: search and leaf checks still decide).
const MAX_RUNS: usize = 200_000;

fn signature(d: &Domain) -> (i64, i64, u128) {
    (d.lo(), d.hi(), d.size())
}

/// Run propagators to a fixpoint, interleaved with the difference closure.
pub(crate) fn fixpoint(s: &mut Space) -> Result<(), Fail> {
    let n_props = s.props.len();
    let vars: Vec<Vec<usize>> = s.props.iter().map(|p| p.vars()).collect();
    let mut watch: Vec<Vec<u32>> = vec![Vec::new(); s.doms.len()];
    for (p, vs) in vars.iter().enumerate() {
        for &v in vs {
            if watch[v].last() != Some(&(p as u32)) {
                watch[v].push(p as u32);
            }
        }
    }
    let mut queued = vec![true; n_props];
    let mut queue: std::collections::VecDeque<usize> = (0..n_props).collect();
    let mut runs = 0;
    // Bounds can creep one unit per pass around a cycle of inequalities;
    // the closure settles such cycles at once, so it runs every few passes.
    let slice = 4 * n_props + 64;
    for _round in 0..256 {
        let mut round_runs = 0;
        while round_runs < slice {
            let Some(p) = queue.pop_front() else { break };
            queued[p] = false;
            runs += 1;
            round_runs += 1;
            let before: Vec<(i64, i64, u128)> = vars[p].iter().map(|&v| signature(&s.doms[v])).collect();
            s.props[p].propagate(&mut s.doms)?;
            for (k, &v) in vars[p].iter().enumerate() {
                if signature(&s.doms[v]) != before[k] {
                    for &q in &watch[v] {
                        let q = q as usize;
                        if q != p && !queued[q] {
                            queued[q] = true;
                            queue.push_back(q);
                        }
                    }
                }
            }
        }
        let snapshot: Vec<(i64, i64, u128)> = s.doms.iter().map(signature).collect();
        let changed = closure(&mut s.doms, &s.props)?;
        if changed {
            for (v, sig) in snapshot.iter().enumerate() {
                if signature(&s.doms[v]) != *sig {
                    for &q in &watch[v] {
                        let q = q as usize;
                        if !queued[q] {
                            queued[q] = true;
                            queue.push_back(q);
                        }
                    }
                }
            }
        }
        if queue.is_empty() || runs > MAX_RUNS {
            return Ok(());
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tri {
    True,
    False,
    Unknown,
}

/// Interval of a term: `None` if certainly undefined, else bounds and
/// whether it is certainly defined.
fn interval(s: &Space, table: &Table, e: &SolverExpr) -> Option<(i128, i128, bool)> {
    match e {
        SolverExpr::Const(c) => Some((*c as i128, *c as i128, true)),
        SolverExpr::Var(v) => match table.scalar(v) {
            Some(i) => Some((s.doms[i].lo() as i128, s.doms[i].hi() as i128, true)),
            None => Some((i128::MIN / 4, i128::MAX / 4, false)),
        },
        SolverExpr::Select(a, idx) => {
            let (il, ih, def) = interval(s, table, idx)?;
            let lo = il.max(0);
            let hi = ih.min(a.len as i128 - 1);
            if lo > hi {
                return None;
            }
            let mut l = i128::MAX;
            let mut h = i128::MIN;
            for i in lo..=hi {
                let cell = table.cell(a, i as usize)?;
                l = l.min(s.doms[cell].lo() as i128);
                h = h.max(s.doms[cell].hi() as i128);
            }
            Some((l, h, def && il >= 0 && ih < a.len as i128))
        }
        SolverExpr::Neg(a) => {
            let (l, h, d) = interval(s, table, a)?;
            Some((-h, -l, d))
        }
        SolverExpr::Bin(op, a, b) => {
            let (al, ah, ad) = interval(s, table, a)?;
            let (bl, bh, bd) = interval(s, table, b)?;
            let def = ad && bd;
            match op {
                ArithOp::Add => Some((al + bl, ah + bh, def)),
                ArithOp::Sub => Some((al - bh, ah - bl, def)),
                ArithOp::Mul => {
                    let ps = [al * bl, al * bh, ah * bl, ah * bh];
                    Some((*ps.iter().min()?, *ps.iter().max()?, def))
                }
                ArithOp::Div => {
                    if bl == 0 && bh == 0 {
                        return None;
                    }
                    let mut qs = Vec::new();
                    if bl < 0 {
                        for x in [al, ah] {
                            qs.push(x / bl);
                            qs.push(x / bh.min(-1));
                        }
                    }
                    if bh > 0 {
                        for x in [al, ah] {
                            qs.push(x / bl.max(1));
                            qs.push(x / bh);
                        }
                    }
                    let def = def && (bl > 0 || bh < 0);
                    Some((*qs.iter().min()?, *qs.iter().max()?, def))
                }
            }
        }
    }
}

/// Three-valued truth of an NNF constraint under the current domains.
pub(crate) fn tri(s: &Space, table: &Table, c: &Constraint) -> Tri {
    match c {
        Constraint::True => Tri::True,
        Constraint::False => Tri::False,
        Constraint::Cmp(op, a, b) => {
            let (Some((al, ah, ad)), Some((bl, bh, bd))) = (interval(s, table, a), interval(s, table, b))
            else {
                return Tri::False;
            };
            let (dl, dh) = (al - bh, ah - bl);
            let def = ad && bd;
            let (sure, impossible) = match op {
                RelOp::Eq => (dl == 0 && dh == 0, dl > 0 || dh < 0),
                RelOp::Ne => (dl > 0 || dh < 0, dl == 0 && dh == 0),
                RelOp::Le => (dh <= 0, dl > 0),
                RelOp::Lt => (dh < 0, dl >= 0),
                RelOp::Ge => (dl >= 0, dh < 0),
                RelOp::Gt => (dl > 0, dh <= 0),
            };
            if impossible {
                Tri::False
            } else if sure && def {
                Tri::True
            } else {
                Tri::Unknown
            }
        }
        Constraint::And(cs) => {
            let mut all = true;
            for c in cs {
                match tri(s, table, c) {
                    Tri::False => return Tri::False,
                    Tri::Unknown => all = false,
                    Tri::True => {}
                }
            }
            if all {
                Tri::True
            } else {
                Tri::Unknown
            }
        }
        Constraint::Or(cs) => {
            let mut none = true;
            for c in cs {
                match tri(s, table, c) {
                    Tri::True => return Tri::True,
                    Tri::Unknown => none = false,
                    Tri::False => {}
                }
            }
            if none {
                Tri::False
            } else {
                Tri::Unknown
            }
        }
        Constraint::AllDifferent(es) => {
            let mut vals = Vec::new();
            for e in es {
                match interval(s, table, e) {
                    None => return Tri::False,
                    Some((l, h, true)) if l == h => vals.push(l),
                    Some(_) => return Tri::Unknown,
                }
            }
            vals.sort_unstable();
            if vals.windows(2).any(|w| w[0] == w[1]) {
                Tri::False
            } else {
                Tri::True
            }
        }
        Constraint::Not(_) | Constraint::Implies(..) => Tri::Unknown,
    }
}

/// Propagate, then resolve disjunctions whose alternatives are decided
/// (satisfied, or a single alternative left). Repeats until stable.
pub(crate) fn propagate(s: &mut Space, table: &Table) -> Result<(), Fail> {
    loop {
        fixpoint(s)?;
        let mut progressed = false;
        let mut i = 0;
        while i < s.disjs.len() {
            let alts = s.disjs[i].clone();
            let mut open = Vec::new();
            let mut satisfied = false;
            for a in alts.iter() {
                match tri(s, table, a) {
                    Tri::True => {
                        satisfied = true;
                        break;
                    }
                    Tri::Unknown => open.push(a.clone()),
                    Tri::False => {}
                }
            }
            if satisfied {
                s.disjs.swap_remove(i);
                continue;
            }
            match open.len() {
                0 => return Err(Fail),
                1 => {
                    s.disjs.swap_remove(i);
                    post(s, table, &open[0])?;
                    progressed = true;
                }
                n => {
                    if n < alts.len() {
                        s.disjs[i] = Arc::new(open);
                    }
                    i += 1;
                }
            }
        }
        if !progressed {
            return Ok(());
        }
    }
}

/// A disjunction guarding a single variable, such as an array frame
/// `k == 3 || a'[3] == a[3]`; labeling that variable resolves it.
fn guards_single_var(alts: &[Constraint]) -> bool {
    alts.iter().any(|a| match a {
        Constraint::Cmp(_, SolverExpr::Var(_), SolverExpr::Const(_))
        | Constraint::Cmp(_, SolverExpr::Const(_), SolverExpr::Var(_)) => true,
        _ => false,
    })
}

/// Defined everywhere, so that its negation is its complement and earlier
/// alternatives can be excluded from later branches.
fn total(c: &Constraint) -> bool {
    constraint_definedness(c).iter().all(Constraint::is_true)
}

pub(crate) struct Search<'a> {
    pub table: &'a Table,
    pub originals: &'a [Constraint],
    pub budget: u64,
    pub nodes: u64,
}

impl Search<'_> {
    /// Depth-first search for a model of `root`.
    pub fn run(&mut self, root: Space) -> Result<Option<Model>, SolverError> {
        let mut stack = vec![root];
        while let Some(mut s) = stack.pop() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(SolverError::Budget { budget: self.budget });
            }
            if propagate(&mut s, self.table).is_err() {
                continue;
            }
            let mut best_var: Option<(usize, u128)> = None;
            for i in 0..self.table.len() {
                let size = s.doms[i].size();
                if size > 1 && best_var.is_none_or(|(_, b)| size < b) {
                    best_var = Some((i, size));
                }
            }
            let Some((var, size)) = best_var else {
                let m = self.table.model(&s.doms);
                if m.satisfies_all(self.originals) {
                    return Ok(Some(m));
                }
                continue;
            };
            let mut best_disj: Option<(usize, usize)> = None;
            for (j, d) in s.disjs.iter().enumerate() {
                if guards_single_var(d) {
                    continue;
                }
                if best_disj.is_none_or(|(_, n)| d.len() < n) {
                    best_disj = Some((j, d.len()));
                }
            }
            match best_disj {
                Some((j, n)) if n as u128 <= size => {
                    let alts = s.disjs[j].clone();
                    let mut base = s;
                    base.disjs.swap_remove(j);
                    let mut children = Vec::new();
                    for k in 0..alts.len() {
                        let mut child = base.clone();
                        let ok = (0..k)
                            .filter(|&p| total(&alts[p]))
                            .try_for_each(|p| post(&mut child, self.table, &negate(&alts[p])))
                            .and_then(|_| post(&mut child, self.table, &alts[k]));
                        if ok.is_ok() {
                            children.push(child);
                        }
                    }
                    stack.extend(children.into_iter().rev());
                }
                _ => {
                    let lo = s.doms[var].lo();
                    let mut left = s.clone();
                    let mut right = s;
                    let fixed = left.doms[var].fix(lo).is_ok();
                    if right.doms[var].set_lo(lo as i128 + 1).is_ok() {
                        stack.push(right);
                    }
                    if fixed {
                        stack.push(left);
                    }
                }
            }
        }
        Ok(None)
    }
}
