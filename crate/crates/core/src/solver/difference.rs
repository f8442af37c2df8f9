//! Closure over difference constraints `x - y ≤ c`, `x - y = c` and
//! `x - y ≠ c`.
//!
//! Equalities are merged with a weighted union-find; the remaining
//! inequalities form a graph over class representatives plus a zero node
//! carrying the domain bounds. Shortest paths give tightened bounds and
//! expose negative cycles, which bounds propagation alone can take
//! exponentially long to find.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use super::domain::{Domain, Fail};
use super::propagators::{floor_div, LinRel, Prop};

const INF: i128 = i128::MAX / 4;

struct UnionFind {
    parent: BTreeMap<usize, (usize, i128)>,
}

impl UnionFind {
    /// `(rep, off)` with `x = rep + off`.
    fn find(&mut self, x: usize) -> (usize, i128) {
        match self.parent.get(&x).copied() {
            None => (x, 0),
            Some((p, o)) => {
                let (r, o2) = self.find(p);
                self.parent.insert(x, (r, o + o2));
                (r, o + o2)
            }
        }
    }

    /// Record `x - y = d`.
    fn union(&mut self, x: usize, y: usize, d: i128) -> Result<(), Fail> {
        let (rx, ox) = self.find(x);
        let (ry, oy) = self.find(y);
        // rx - ry = d - ox + oy
        let w = d - ox + oy;
        if rx == ry {
            return if w == 0 { Ok(()) } else { Err(Fail) };
        }
        self.parent.insert(rx, (ry, w));
        Ok(())
    }
}

/// `Some((x, y, k))` when the linear form is `k·(x - y) + c`, `k > 0`.
fn diff_shape(terms: &[(usize, i128)]) -> Option<(usize, usize, i128)> {
    match terms {
        [(x, a), (y, b)] if *a == -*b => {
            if *a > 0 {
                Some((*x, *y, *a))
            } else {
                Some((*y, *x, -*a))
            }
        }
        _ => None,
    }
}

struct Graph {
    n: usize,
    edges: Vec<(usize, usize, i128)>,
}

impl Graph {
    /// Single-source shortest paths; `Err` on a reachable negative cycle.
    fn shortest(&self, src: usize, reversed: bool) -> Result<Vec<i128>, Fail> {
        let mut adj: Vec<Vec<(usize, i128)>> = vec![Vec::new(); self.n];
        for &(u, v, w) in &self.edges {
            if reversed {
                adj[v].push((u, w));
            } else {
                adj[u].push((v, w));
            }
        }
        let mut dist = vec![INF; self.n];
        let mut count = vec![0usize; self.n];
        let mut queued = vec![false; self.n];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        queued[src] = true;
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for &(v, w) in &adj[u] {
                let nd = dist[u] + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    count[v] += 1;
                    if count[v] > self.n {
                        return Err(Fail);
                    }
                    if !queued[v] {
                        queued[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        Ok(dist)
    }
}

/// Tighten domains using every active difference constraint. Returns
/// whether any domain changed.
pub(crate) fn closure(d: &mut [Domain], props: &[Arc<Prop>]) -> Result<bool, Fail> {
    let mut uf = UnionFind {
        parent: BTreeMap::new(),
    };
    let mut le = Vec::new();
    let mut ne = Vec::new();
    for p in props {
        match &**p {
            Prop::Linear { terms, c, rel } => {
                let Some((x, y, k)) = diff_shape(terms) else {
                    continue;
                };
                // k (x - y) + c rel 0
                match rel {
                    LinRel::Le => le.push((x, y, floor_div(-c, k))),
                    LinRel::Eq => {
                        if (-c) % k != 0 {
                            return Err(Fail);
                        }
                        uf.union(x, y, -c / k)?;
                    }
                    LinRel::Ne => {
                        if (-c) % k == 0 {
                            ne.push((x, y, -c / k));
                        }
                    }
                }
            }
            Prop::Element { idx, cells, z } => {
                if let Some(i) = d[*idx].value() {
                    if let Some(&cell) = cells.get(i as usize) {
                        uf.union(*z, cell, 0)?;
                    }
                }
            }
            _ => {}
        }
    }
    if le.is_empty() && ne.is_empty() {
        return Ok(false);
    }

    // Classes and their members.
    let mut node_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut members: BTreeMap<usize, Vec<(usize, i128)>> = BTreeMap::new();
    let mut touched: Vec<usize> = uf.parent.keys().copied().collect();
    for &(x, y, _) in le.iter().chain(ne.iter()) {
        touched.push(x);
        touched.push(y);
    }
    touched.sort_unstable();
    touched.dedup();
    for &x in &touched {
        let (r, o) = uf.find(x);
        members.entry(r).or_default().push((x, o));
    }
    for (&r, ms) in &mut members {
        if !ms.iter().any(|&(x, _)| x == r) {
            ms.push((r, 0));
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    let rep_of = |uf: &mut UnionFind, x: usize| uf.find(x);
    let mut lines = Vec::new();
    for &(x, y, w) in &le {
        let (rx, ox) = rep_of(&mut uf, x);
        let (ry, oy) = rep_of(&mut uf, y);
        lines.push((rx, ry, w - ox + oy));
    }
    let mut neq = Vec::new();
    for &(x, y, c) in &ne {
        let (rx, ox) = rep_of(&mut uf, x);
        let (ry, oy) = rep_of(&mut uf, y);
        let c = c - ox + oy;
        if rx == ry {
            if c == 0 {
                return Err(Fail);
            }
            continue;
        }
        neq.push((rx, ry, c));
    }
    for &(rx, ry, _) in lines.iter().chain(neq.iter()) {
        for r in [rx, ry] {
            if let std::collections::btree_map::Entry::Vacant(e) = node_of.entry(r) {
                e.insert(reps.len() + 1);
                reps.push(r);
            }
        }
    }

    // Class bounds: rep ∈ dom(x) - off for every member x.
    let mut graph = Graph {
        n: reps.len() + 1,
        edges: Vec::new(),
    };
    for (i, &r) in reps.iter().enumerate() {
        let mut lo = -INF;
        let mut hi = INF;
        for &(x, o) in &members[&r] {
            lo = lo.max(d[x].lo() as i128 - o);
            hi = hi.min(d[x].hi() as i128 - o);
        }
        if lo > hi {
            return Err(Fail);
        }
        graph.edges.push((0, i + 1, hi));
        graph.edges.push((i + 1, 0, -lo));
    }
    for &(rx, ry, w) in &lines {
        if rx == ry {
            if w < 0 {
                return Err(Fail);
            }
            continue;
        }
        // rx - ry ≤ w
        graph.edges.push((node_of[&ry], node_of[&rx], w));
    }

    let mut changed = false;
    let mut rounds = neq.len() + 1;
    loop {
        let upper = graph.shortest(0, false)?;
        let lower = graph.shortest(0, true)?;
        for (i, &r) in reps.iter().enumerate() {
            let (h, l) = (upper[i + 1], -lower[i + 1]);
            if l > h {
                return Err(Fail);
            }
            for &(x, o) in &members[&r] {
                if h < INF / 2 {
                    changed |= d[x].set_hi(h + o)?;
                }
                if l > -INF / 2 {
                    changed |= d[x].set_lo(l + o)?;
                }
            }
        }
        if rounds == 0 {
            break;
        }
        rounds -= 1;
        let mut added = false;
        for &(rx, ry, c) in &neq {
            let (nx, ny) = (node_of[&rx], node_of[&ry]);
            // rx - ry ≤ d1 and ry - rx ≤ d2
            let d1 = graph.shortest(ny, false)?[nx];
            let d2 = graph.shortest(nx, false)?[ny];
            let max_diff = d1;
            let min_diff = -d2;
            if max_diff == c && min_diff == c {
                return Err(Fail);
            }
            if max_diff == c {
                graph.edges.push((ny, nx, c - 1));
                added = true;
            } else if min_diff == c {
                graph.edges.push((nx, ny, -c - 1));
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    Ok(changed)
}
