//! 0-1 model for minimum barrier selection, with an exact solver.
//!
//! Variables: `l_s` per candidate, and `B = ceil(log2 k)` bits `c_{i,t}` per
//! cell encoding its class. For every adjacency between cells `i` and `j`
//! covered by candidate group `G`, and every bit `t`:
//!
//! ```text
//! sum_{s in G} l_s >= c_{i,t} - c_{j,t}
//! sum_{s in G} l_s >= c_{j,t} - c_{i,t}
//! ```
//!
//! Cells holding objects have their bits fixed to the set index.
//!
//! The solver never branches on cell bits. A selection is feasible exactly
//! when no component of the unblocked adjacency graph holds two classes;
//! each component then takes its own class (or 0). The search works over
//! candidates only, as a hitting set problem over paths between
//! differently labeled cells.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::arrangement::ArrangementResult;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub group: Vec<usize>,
    pub i: usize,
    pub j: usize,
    pub bit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub num_segments: usize,
    pub num_cells: usize,
    pub num_classes: usize,
    pub bits_per_cell: usize,
    pub fixed_cells: BTreeMap<usize, usize>,
    /// Adjacencies `(i, j, group)`; constraints are these times each bit.
    pub edges: Vec<(usize, usize, Vec<usize>)>,
    pub constraints: Vec<Constraint>,
}

pub fn bits_for(k: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < k {
        b += 1;
    }
    b
}

/// Bit `t` (most significant first) of `code` in a `bits`-wide encoding.
pub fn code_bit(code: usize, bits: usize, t: usize) -> u8 {
    ((code >> (bits - 1 - t)) & 1) as u8
}

pub fn build_model(arr: &ArrangementResult, k: usize) -> IlpModel {
    let bits = bits_for(k);
    let mut fixed = BTreeMap::new();
    for c in &arr.cells {
        if let Some(class) = c.label {
            assert!(class < k, "cell {} labeled with set {class} but k = {k}", c.id);
            fixed.insert(c.id, class);
        }
    }
    let mut edges = Vec::new();
    let mut constraints = Vec::new();
    for e in &arr.adjacencies {
        assert!(e.cells.0 != e.cells.1);
        assert!(e.covering_candidates.iter().all(|&s| s < arr.num_candidates), "candidate ids must be dense");
        edges.push((e.cells.0, e.cells.1, e.covering_candidates.clone()));
        for bit in 0..bits {
            constraints.push(Constraint { group: e.covering_candidates.clone(), i: e.cells.0, j: e.cells.1, bit });
        }
    }
    IlpModel {
        num_segments: arr.num_candidates,
        num_cells: arr.cells.len(),
        num_classes: k,
        bits_per_cell: bits,
        fixed_cells: fixed,
        edges,
        constraints,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    /// Budget ran out; the selection is the best found, not proven optimal.
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub status: SolveStatus,
    pub selected: Vec<usize>,
    /// Class code per cell; empty when infeasible.
    pub cell_classes: Vec<usize>,
    pub objective_value: usize,
    pub nodes: u64,
}

impl Solution {
    pub fn infeasible(nodes: u64) -> Self {
        Solution { status: SolveStatus::Infeasible, selected: Vec::new(), cell_classes: Vec::new(), objective_value: 0, nodes }
    }
}

struct Uf(Vec<usize>);

impl Uf {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
}

/// Class per cell when `selected` separates all classes, else `None`.
/// Unlabeled components take class 0.
pub fn cell_classes_for(model: &IlpModel, selected: &[usize]) -> Option<Vec<usize>> {
    let chosen: BTreeSet<usize> = selected.iter().copied().collect();
    let mut uf = Uf((0..model.num_cells).collect());
    for (i, j, g) in &model.edges {
        if !g.iter().any(|s| chosen.contains(s)) {
            let (a, b) = (uf.find(*i), uf.find(*j));
            uf.0[a.max(b)] = a.min(b);
        }
    }
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    for (&cell, &class) in &model.fixed_cells {
        let r = uf.find(cell);
        if *class_of_root.entry(r).or_insert(class) != class {
            return None;
        }
    }
    Some((0..model.num_cells).map(|c| class_of_root.get(&uf.find(c)).copied().unwrap_or(0)).collect())
}

/// Checks a full 0-1 assignment against every constraint and fixing.
pub fn check_assignment(model: &IlpModel, selected: &[usize], cell_classes: &[usize]) -> bool {
    if cell_classes.len() != model.num_cells {
        return false;
    }
    let b = model.bits_per_cell;
    if cell_classes.iter().any(|&c| b < usize::BITS as usize && c >> b != 0) {
        return false;
    }
    if model.fixed_cells.iter().any(|(&cell, &class)| cell_classes[cell] != class) {
        return false;
    }
    let chosen: BTreeSet<usize> = selected.iter().copied().collect();
    model.constraints.iter().all(|c| {
        let lhs = c.group.iter().filter(|s| chosen.contains(s)).count() as i64;
        let ci = code_bit(cell_classes[c.i], b, c.bit) as i64;
        let cj = code_bit(cell_classes[c.j], b, c.bit) as i64;
        lhs >= ci - cj && lhs >= cj - ci
    })
}

/// Shortest violating paths in the unblocked adjacency graph.
struct Paths<'a> {
    model: &'a IlpModel,
    adj: Vec<Vec<(usize, usize)>>,
    edges_of: Vec<Vec<usize>>,
    /// Branch priority of each candidate: more memberships first.
    rank: Vec<usize>,
    /// Per edge: number of selected members.
    selected_in: Vec<u32>,
    /// Candidates whose edges are impassable while collecting disjoint paths.
    used: Vec<bool>,
    dist: Vec<u32>,
    class: Vec<usize>,
    parent: Vec<usize>,
}

const UNSEEN: u32 = u32::MAX;

impl<'a> Paths<'a> {
    fn new(model: &'a IlpModel) -> Self {
        let n = model.num_cells;
        let mut adj = vec![Vec::new(); n];
        let mut edges_of = vec![Vec::new(); model.num_segments];
        for (e, (i, j, g)) in model.edges.iter().enumerate() {
            adj[*i].push((*j, e));
            adj[*j].push((*i, e));
            for &s in g {
                edges_of[s].push(e);
            }
        }
        let mut order: Vec<usize> = (0..model.num_segments).collect();
        order.sort_by_key(|&s| (std::cmp::Reverse(edges_of[s].len()), s));
        let mut rank = vec![0; model.num_segments];
        for (r, &s) in order.iter().enumerate() {
            rank[s] = r;
        }
        Paths {
            model,
            adj,
            edges_of,
            rank,
            selected_in: vec![0; model.edges.len()],
            used: vec![false; model.num_segments],
            dist: vec![UNSEEN; n],
            class: vec![0; n],
            parent: vec![usize::MAX; n],
        }
    }

    fn set_selected(&mut self, s: usize, on: bool) {
        for &e in &self.edges_of[s] {
            if on {
                self.selected_in[e] += 1;
            } else {
                self.selected_in[e] -= 1;
            }
        }
    }

    fn select_only(&mut self, chosen: &[usize]) {
        self.selected_in.iter_mut().for_each(|c| *c = 0);
        for &s in chosen {
            self.set_selected(s, true);
        }
    }

    /// Cheapest path between two differently labeled cells, counting edges
    /// that some candidate could cut. Edges that are blocked, or touch a
    /// `used` candidate, are impassable. Returns the candidates able to cut
    /// the path (empty for an uncuttable path), or `None` when the classes
    /// are already separated.
    fn violating_path(&mut self) -> Option<Vec<usize>> {
        let n = self.model.num_cells;
        self.dist.iter_mut().for_each(|d| *d = UNSEEN);
        self.parent.iter_mut().for_each(|p| *p = usize::MAX);
        let mut dq = VecDeque::new();
        for (&cell, &class) in &self.model.fixed_cells {
            self.dist[cell] = 0;
            self.class[cell] = class;
            dq.push_back(cell);
        }
        let passable = |s: &Self, e: usize| -> Option<u32> {
            let g = &s.model.edges[e].2;
            if s.selected_in[e] > 0 || g.iter().any(|&c| s.used[c]) {
                return None;
            }
            Some(if g.is_empty() { 0 } else { 1 })
        };
        while let Some(u) = dq.pop_front() {
            let du = self.dist[u];
            for idx in 0..self.adj[u].len() {
                let (v, e) = self.adj[u][idx];
                let Some(w) = passable(self, e) else { continue };
                let dv = du + w;
                if dv < self.dist[v] {
                    self.dist[v] = dv;
                    self.class[v] = self.class[u];
                    self.parent[v] = e;
                    if w == 0 {
                        dq.push_front(v);
                    } else {
                        dq.push_back(v);
                    }
                }
            }
        }
        let mut best: Option<(u32, usize)> = None;
        for (e, (i, j, _)) in self.model.edges.iter().enumerate() {
            if self.dist[*i] == UNSEEN || self.dist[*j] == UNSEEN || self.class[*i] == self.class[*j] {
                continue;
            }
            let Some(w) = passable(self, e) else { continue };
            let cost = self.dist[*i] + w + self.dist[*j];
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, e));
            }
        }
        let (_, bridge) = best?;
        let mut path_edges = vec![bridge];
        let (i, j, _) = &self.model.edges[bridge];
        for mut v in [*i, *j] {
            let mut guard = n;
            while self.parent[v] != usize::MAX && guard > 0 {
                let e = self.parent[v];
                path_edges.push(e);
                let (a, b, _) = &self.model.edges[e];
                v = if *a == v { *b } else { *a };
                guard -= 1;
            }
        }
        let mut hitters: Vec<usize> = path_edges.iter().flat_map(|&e| self.model.edges[e].2.iter().copied()).collect();
        hitters.sort_by_key(|&c| self.rank[c]);
        hitters.dedup();
        Some(hitters)
    }

    /// Violating paths for the current selection with pairwise disjoint
    /// cutting sets.
    fn disjoint_paths(&mut self) -> Vec<Vec<usize>> {
        let mut found = Vec::new();
        while let Some(h) = self.violating_path() {
            if h.is_empty() {
                break;
            }
            for &c in &h {
                self.used[c] = true;
            }
            found.push(h);
        }
        for h in &found {
            for &c in h {
                self.used[c] = false;
            }
        }
        found
    }

    /// Drops members of a feasible selection that are not needed, latest
    /// first.
    fn minimize(&mut self, chosen: &mut Vec<usize>) {
        self.select_only(chosen);
        for idx in (0..chosen.len()).rev() {
            let c = chosen[idx];
            self.set_selected(c, false);
            if self.violating_path().is_some() {
                self.set_selected(c, true);
            } else {
                chosen.remove(idx);
            }
        }
    }
}

/// Exact minimum hitting set by branch and bound.
struct HittingSet<'a> {
    sets: &'a [Vec<usize>],
    of_elem: Vec<Vec<usize>>,
    hit: Vec<u32>,
    avail: Vec<u32>,
    excluded: Vec<bool>,
    chosen: Vec<usize>,
    /// Best hitting set so far, if smaller than the starting bound.
    best: Option<Vec<usize>>,
    best_len: usize,
    /// Stop as soon as a hitting set this small turns up.
    target: usize,
    done: bool,
    deadline: Option<Instant>,
    timed_out: bool,
    nodes: u64,
    mark: Vec<bool>,
}

impl<'a> HittingSet<'a> {
    fn new(sets: &'a [Vec<usize>], universe: usize, bound: usize, target: usize, deadline: Option<Instant>) -> Self {
        let mut of_elem = vec![Vec::new(); universe];
        for (i, set) in sets.iter().enumerate() {
            for &e in set {
                of_elem[e].push(i);
            }
        }
        HittingSet {
            sets,
            of_elem,
            hit: vec![0; sets.len()],
            avail: sets.iter().map(|s| s.len() as u32).collect(),
            excluded: vec![false; universe],
            chosen: Vec::new(),
            best: None,
            best_len: bound,
            target,
            done: false,
            deadline,
            timed_out: false,
            nodes: 0,
            mark: vec![false; universe],
        }
    }

    fn choose(&mut self, e: usize, on: bool) {
        for &i in &self.of_elem[e] {
            if on {
                self.hit[i] += 1;
            } else {
                self.hit[i] -= 1;
            }
        }
        if on {
            self.chosen.push(e);
        } else {
            self.chosen.pop();
        }
    }

    fn exclude(&mut self, e: usize, on: bool) {
        self.excluded[e] = on;
        for &i in &self.of_elem[e] {
            if on {
                self.avail[i] -= 1;
            } else {
                self.avail[i] += 1;
            }
        }
    }

    /// Lower bound on elements still needed: the larger of a greedy packing
    /// of unhit sets with disjoint available elements, and the unhit count
    /// divided by the most unhit sets any one element covers.
    fn bound(&mut self, unhit: &[usize]) -> usize {
        let mut order = unhit.to_vec();
        order.sort_by_key(|&i| (self.avail[i], i));
        let mut packed = 0;
        let mut marked = Vec::new();
        for &i in &order {
            let free = self.sets[i].iter().all(|&e| self.excluded[e] || !self.mark[e]);
            if free {
                packed += 1;
                for &e in &self.sets[i] {
                    if !self.excluded[e] {
                        self.mark[e] = true;
                        marked.push(e);
                    }
                }
            }
        }
        for e in marked {
            self.mark[e] = false;
        }
        let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
        for &i in unhit {
            for &e in &self.sets[i] {
                if !self.excluded[e] {
                    *degree.entry(e).or_default() += 1;
                }
            }
        }
        let top = degree.values().copied().max().unwrap_or(1);
        packed.max(unhit.len().div_ceil(top))
    }

    fn out_of_time(&mut self) -> bool {
        if !self.timed_out {
            if let Some(d) = self.deadline {
                if self.nodes % 64 == 1 && Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    fn search(&mut self) {
        self.nodes += 1;
        if self.done || self.out_of_time() {
            return;
        }
        let unhit: Vec<usize> = (0..self.sets.len()).filter(|&i| self.hit[i] == 0).collect();
        if unhit.is_empty() {
            if self.chosen.len() < self.best_len {
                let mut sol = self.chosen.clone();
                sol.sort_unstable();
                self.best_len = sol.len();
                self.best = Some(sol);
                self.done = self.best_len <= self.target;
            }
            return;
        }
        if unhit.iter().any(|&i| self.avail[i] == 0) {
            return;
        }
        if self.chosen.len() + self.bound(&unhit) >= self.best_len {
            return;
        }
        let pick = *unhit.iter().min_by_key(|&&i| (self.avail[i], i)).expect("nonempty");
        let mut elems: Vec<(usize, usize)> = self.sets[pick]
            .iter()
            .filter(|&&e| !self.excluded[e])
            .map(|&e| (self.of_elem[e].iter().filter(|&&i| self.hit[i] == 0).count(), e))
            .collect();
        elems.sort_by_key(|&(d, e)| (std::cmp::Reverse(d), e));
        let mut tried = Vec::new();
        for (_, e) in elems {
            self.choose(e, true);
            self.search();
            self.choose(e, false);
            if self.done || self.timed_out {
                break;
            }
            self.exclude(e, true);
            tried.push(e);
            if self.chosen.len() + 1 >= self.best_len {
                break;
            }
        }
        for e in tried {
            self.exclude(e, false);
        }
    }
}

/// Greedy feasible extension of `start`: cut a shortest violating path at
/// its highest-priority candidate until none remain. Every path met is
/// appended to `sets`.
fn extend(paths: &mut Paths, start: &[usize], sets: &mut BTreeSet<Vec<usize>>) -> Option<Vec<usize>> {
    let mut chosen = start.to_vec();
    paths.select_only(&chosen);
    loop {
        let found = paths.disjoint_paths();
        if found.is_empty() {
            return match paths.violating_path() {
                None => Some(chosen),
                Some(_) => None,
            };
        }
        for h in found {
            if !h.iter().any(|c| chosen.contains(c)) {
                chosen.push(h[0]);
                paths.set_selected(h[0], true);
            }
            sets.insert(h);
        }
    }
}

/// Exact minimum selection; `time_limit` bounds the search.
///
/// Every violating path must be cut, so a minimum hitting set of the paths
/// seen so far bounds the optimum from below. When that set does not
/// separate the classes, its greedy extension yields new paths and an
/// upper bound; the loop ends when the bounds meet.
pub fn solve(model: &IlpModel, time_limit: Option<Duration>) -> Solution {
    let deadline = time_limit.map(|d| Instant::now() + d);
    let all: Vec<usize> = (0..model.num_segments).collect();
    if cell_classes_for(model, &all).is_none() {
        return Solution::infeasible(0);
    }
    let mut paths = Paths::new(model);
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut best = extend(&mut paths, &[], &mut sets).expect("selecting everything is feasible");
    paths.minimize(&mut best);
    let mut lower = 0;
    let mut nodes = 0;
    let mut timed_out = false;
    while lower < best.len() {
        let list: Vec<Vec<usize>> = sets.iter().cloned().collect();
        let mut hs = HittingSet::new(&list, model.num_segments, best.len(), lower, deadline);
        hs.search();
        nodes += hs.nodes;
        if hs.timed_out {
            timed_out = true;
            break;
        }
        let Some(core) = hs.best else {
            // Nothing smaller than the incumbent hits every path seen.
            break;
        };
        lower = core.len();
        let Some(mut upper) = extend(&mut paths, &core, &mut sets) else { break };
        if upper.len() > core.len() {
            paths.minimize(&mut upper);
        }
        if upper.len() < best.len() {
            best = upper;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            timed_out = lower < best.len();
            break;
        }
    }
    best.sort_unstable();
    let cell_classes = cell_classes_for(model, &best).expect("incumbent is feasible");
    Solution {
        status: if timed_out { SolveStatus::TimeLimit } else { SolveStatus::Optimal },
        objective_value: best.len(),
        selected: best,
        cell_classes,
        nodes,
    }
}

/// CPLEX LP text for the model.
pub fn export_lp(model: &IlpModel) -> String {
    let b = model.bits_per_cell;
    let l = |s: usize| format!("l{s}");
    let c = |cell: usize, t: usize| format!("c{cell}_{t}");
    let mut out = String::new();
    out.push_str("\\ minimum barrier selection\n");
    out.push_str("Minimize\n obj:");
    for s in 0..model.num_segments {
        let _ = write!(out, "{}{}", if s == 0 { " " } else { " + " }, l(s));
    }
    out.push_str("\nSubject To\n");
    for (n, con) in model.constraints.iter().enumerate() {
        let sum: Vec<String> = con.group.iter().map(|&s| l(s)).collect();
        let sum = sum.join(" + ");
        let (ci, cj) = (c(con.i, con.bit), c(con.j, con.bit));
        let _ = writeln!(out, " a{n}: {sum} - {ci} + {cj} >= 0");
        let _ = writeln!(out, " b{n}: {sum} + {ci} - {cj} >= 0");
    }
    for (&cell, &class) in &model.fixed_cells {
        for t in 0..b {
            let _ = writeln!(out, " f{cell}_{t}: {} = {}", c(cell, t), code_bit(class, b, t));
        }
    }
    out.push_str("Binary\n");
    for s in 0..model.num_segments {
        let _ = writeln!(out, " {}", l(s));
    }
    for cell in 0..model.num_cells {
        for t in 0..b {
            let _ = writeln!(out, " {}", c(cell, t));
        }
    }
    out.push_str("End\n");
    out
}
