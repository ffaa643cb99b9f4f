//! Backtracking search for nearrings with identity on a small group.
//!
//! A left nearring with identity `i` on `G` is the same thing as a map
//! `x -> lambda_x` into `End(G)` with `lambda_x(i) = x`, `lambda_i = id` and
//! `lambda_{lambda_x(y)} = lambda_x . lambda_y`. Units are exactly the `x`
//! with `lambda_x` bijective.

use std::collections::{HashMap, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nearring::{units_and_locality, verify_axioms, AdditiveGroup, CayleyGroup, MulTable, NearringInstance, VerifyMode};
use crate::pcgroup::{Coordinates, PcPresentation};

/// Largest group order accepted by [`enumerate_endomorphisms`].
pub const ENDO_ORDER_CAP: usize = 81;

/// Largest order searched without the explicit opt-in.
pub const DEFAULT_SEARCH_CAP: usize = 16;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    /// Images of the generating set returned by [`EndoSet::generators`].
    pub images: Vec<Coordinates>,
    /// `table[x]` is the image of element index `x`.
    pub table: Vec<u32>,
    pub bijective: bool,
}

/// All endomorphisms of a group with fast composition.
pub struct EndoSet {
    group: CayleyGroup,
    generators: Vec<u32>,
    endos: Vec<Endomorphism>,
    index: HashMap<Vec<u32>, u32>,
    compose: Option<Vec<u32>>,
    identity: u32,
}

impl EndoSet {
    pub fn new(pres: &PcPresentation) -> Result<Self> {
        let n = pres.order();
        if n > ENDO_ORDER_CAP {
            return Err(Error::CapExceeded { order: n, cap: ENDO_ORDER_CAP });
        }
        let group = CayleyGroup::from_group(pres)?;
        let generators = generating_set(&group, pres);
        let mut endos = Vec::new();
        let mut index = HashMap::new();
        let k = generators.len() as u32;
        let total = (n as u64).pow(k);
        for t in 0..total {
            let images: Vec<u32> = (0..k).map(|j| ((t / (n as u64).pow(k - 1 - j)) % n as u64) as u32).collect();
            if let Some(table) = extend(&group, &generators, &images) {
                if !index.contains_key(&table) {
                    index.insert(table.clone(), endos.len() as u32);
                    let mut seen = FixedBitSet::with_capacity(n);
                    table.iter().for_each(|&v| seen.insert(v as usize));
                    endos.push(Endomorphism {
                        images: images.iter().map(|&v| pres.element(v)).collect(),
                        bijective: seen.count_ones(..) == n,
                        table,
                    });
                }
            }
        }
        let identity_table: Vec<u32> = (0..n as u32).collect();
        let identity = index[&identity_table];
        let m = endos.len();
        let compose = if m * m <= 1 << 24 {
            let table: Vec<u32> = (0..m)
                .into_par_iter()
                .flat_map_iter(|a| {
                    let (endos, index) = (&endos, &index);
                    (0..m).map(move |b| {
                        let c: Vec<u32> = endos[b].table.iter().map(|&v| endos[a].table[v as usize]).collect();
                        index[&c]
                    })
                })
                .collect();
            Some(table)
        } else {
            None
        };
        Ok(EndoSet { group, generators, endos, index, compose, identity })
    }

    pub fn len(&self) -> usize {
        self.endos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endos.is_empty()
    }

    pub fn endos(&self) -> &[Endomorphism] {
        &self.endos
    }

    /// Element indices of the generating set used for enumeration.
    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn group(&self) -> &CayleyGroup {
        &self.group
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    /// Index of `a . b` (apply `b` first).
    pub fn compose(&self, a: u32, b: u32) -> u32 {
        match &self.compose {
            Some(t) => t[a as usize * self.endos.len() + b as usize],
            None => {
                let (ta, tb) = (&self.endos[a as usize].table, &self.endos[b as usize].table);
                let c: Vec<u32> = tb.iter().map(|&v| ta[v as usize]).collect();
                self.index[&c]
            }
        }
    }

    pub fn find(&self, table: &[u32]) -> Option<u32> {
        self.index.get(table).copied()
    }
}

/// Greedy generating set drawn from the polycyclic generators.
fn generating_set(group: &CayleyGroup, pres: &PcPresentation) -> Vec<u32> {
    let n = group.order();
    let mut gens = Vec::new();
    let mut span = span_of(group, &gens);
    for j in 0..pres.ngens() {
        let g = pres.index(&Coordinates::generator(j));
        if !span.contains(g as usize) {
            gens.push(g);
            span = span_of(group, &gens);
            if span.count_ones(..) == n {
                break;
            }
        }
    }
    gens
}

fn span_of(group: &CayleyGroup, gens: &[u32]) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(group.order());
    set.insert(0);
    let mut queue = VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = group.add(x, g);
            if !set.put(y as usize) {
                queue.push_back(y);
            }
        }
    }
    set
}

/// Extends generator images along the Cayley graph; `None` on any
/// inconsistency. Consistency on every edge `x -> x + g` makes the result
/// additive.
fn extend(group: &CayleyGroup, gens: &[u32], images: &[u32]) -> Option<Vec<u32>> {
    let n = group.order();
    let mut table = vec![NONE; n];
    table[0] = 0;
    let mut queue = VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        for (&g, &img) in gens.iter().zip(images) {
            let y = group.add(x, g) as usize;
            let v = group.add(table[x as usize], img);
            if table[y] == NONE {
                table[y] = v;
                queue.push_back(y as u32);
            } else if table[y] != v {
                return None;
            }
        }
    }
    Some(table)
}

/// Every endomorphism of a group of order at most 81.
pub fn enumerate_endomorphisms(pres: &PcPresentation) -> Result<Vec<Endomorphism>> {
    Ok(EndoSet::new(pres)?.endos)
}

/// Elements whose additive order is the exponent; only these can be an
/// identity.
pub fn identity_candidates(group: &dyn AdditiveGroup) -> Vec<u32> {
    let orders: Vec<u32> = (0..group.order() as u32).map(|x| group.element_order(x)).collect();
    let exp = orders.iter().copied().max().unwrap_or(1);
    (0..group.order() as u32).filter(|&x| orders[x as usize] == exp).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pruning {
    /// Closure propagation, the exponent filter on units and, when locality
    /// is required, the subgroup prune.
    Full,
    /// Closure propagation only; locality is decided on complete tables.
    ClosureOnly,
    /// Plain generate-and-test over all candidate endomorphisms.
    None,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub require_local: bool,
    pub max_results: Option<usize>,
    /// Depth at which the tree is split into independent tasks.
    pub split_depth: usize,
    pub pruning: Pruning,
    pub budget: Option<Duration>,
    /// Frontier file for resumable runs.
    pub checkpoint: Option<PathBuf>,
    /// Permit orders above [`DEFAULT_SEARCH_CAP`].
    pub allow_large: bool,
    /// Cap on full assignments for [`Pruning::None`].
    pub generate_limit: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            require_local: true,
            max_results: None,
            split_depth: 2,
            pruning: Pruning::Full,
            budget: None,
            checkpoint: None,
            allow_large: false,
            generate_limit: 10_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchStatus {
    Exhaustive,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub identity: u32,
    pub unit_count: usize,
    pub l_order: usize,
    pub local: bool,
    pub l_cyclic: bool,
    pub zero_symmetric: bool,
    /// For non-abelian groups of order `p^k`: `L` non-cyclic of order
    /// `p^(k-1)` or `p^(k-2)`.
    pub l_shape_ok: Option<bool>,
    /// Set by callers that write the table to disk.
    pub table_ref: Option<String>,
    #[serde(skip)]
    pub table: MulTable,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub group: String,
    pub order: usize,
    pub exponent: u32,
    pub require_local: bool,
    pub pruning: Pruning,
    pub identity_candidates: Vec<u32>,
    pub endo_count: usize,
    pub branches_explored: u64,
    pub tasks: usize,
    pub tasks_completed: usize,
    pub results: Vec<SearchResult>,
    /// Complete assignments rejected by verification (should stay 0).
    pub rejected_by_verification: u64,
    pub truncated: bool,
    pub status: SearchStatus,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn result_count(&self) -> usize {
        self.results.len()
    }
}

/// Partial assignment; `lambda[x] == NONE` when unassigned.
#[derive(Clone)]
struct State {
    lambda: Vec<u32>,
    domains: Vec<Vec<u32>>,
    assigned: Vec<u32>,
    path: Vec<(u32, u32)>,
}

struct Ctx<'a> {
    endos: &'a EndoSet,
    n: usize,
    identity: u32,
    /// Elements that can never be units.
    low_order: Vec<u32>,
    /// Static tie-break rank: breadth-first distance from the identity.
    rank: Vec<u32>,
    pruning: Pruning,
    require_local: bool,
}

enum Outcome {
    Done,
    Aborted,
}

struct Walk<'c> {
    deadline: Option<Instant>,
    stop: &'c AtomicBool,
    branches: u64,
    leaves: Vec<Vec<u32>>,
    max_leaves: Option<usize>,
}

impl Walk<'_> {
    fn should_stop(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        if self.branches % 256 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.stop.store(true, Ordering::Relaxed);
                    return true;
                }
            }
        }
        false
    }
}

impl<'a> Ctx<'a> {
    fn new(endos: &'a EndoSet, identity: u32, opts: &SearchOptions) -> Self {
        let g = endos.group();
        let n = g.order();
        let exp = g.exponent();
        let low_order = (0..n as u32).filter(|&x| g.element_order(x) != exp).collect();
        let mut rank = vec![NONE; n];
        let mut queue = VecDeque::from([identity]);
        rank[identity as usize] = 0;
        let mut next = 1;
        while let Some(x) = queue.pop_front() {
            for &s in endos.generators().iter().chain(std::iter::once(&identity)) {
                let y = g.add(x, s) as usize;
                if rank[y] == NONE {
                    rank[y] = next;
                    next += 1;
                    queue.push_back(y as u32);
                }
            }
        }
        Ctx { endos, n, identity, low_order, rank, pruning: opts.pruning, require_local: opts.require_local }
    }

    fn table(&self, e: u32) -> &[u32] {
        &self.endos.endos[e as usize].table
    }

    fn bijective(&self, e: u32) -> bool {
        self.endos.endos[e as usize].bijective
    }

    fn root(&self) -> Option<State> {
        let n = self.n;
        let mut domains = vec![Vec::new(); n];
        for (k, e) in self.endos.endos.iter().enumerate() {
            domains[e.table[self.identity as usize] as usize].push(k as u32);
        }
        let mut st = State { lambda: vec![NONE; n], domains, assigned: Vec::new(), path: Vec::new() };
        let id = self.endos.identity();
        if self.assign(&mut st, self.identity, id) {
            Some(st)
        } else {
            None
        }
    }

    /// Assigns and propagates to a fixpoint; false on conflict.
    fn assign(&self, st: &mut State, x: u32, e: u32) -> bool {
        let mut queue = Vec::new();
        if !self.set(st, x, e, &mut queue) {
            return false;
        }
        self.propagate(st, queue)
    }

    fn set(&self, st: &mut State, x: u32, e: u32, queue: &mut Vec<u32>) -> bool {
        if st.domains[x as usize].binary_search(&e).is_err() {
            return false;
        }
        st.lambda[x as usize] = e;
        st.domains[x as usize] = Vec::new();
        st.assigned.push(x);
        queue.push(x);
        true
    }

    fn propagate(&self, st: &mut State, mut queue: Vec<u32>) -> bool {
        loop {
            // closure over all pairs involving a new element
            while let Some(u) = queue.pop() {
                let mut k = 0;
                while k < st.assigned.len() {
                    let y = st.assigned[k];
                    k += 1;
                    for (s, t) in [(u, y), (y, u)] {
                        let ls = st.lambda[s as usize];
                        let z = self.table(ls)[t as usize];
                        let c = self.endos.compose(ls, st.lambda[t as usize]);
                        let lz = st.lambda[z as usize];
                        if lz == NONE {
                            if !self.set(st, z, c, &mut queue) {
                                return false;
                            }
                        } else if lz != c {
                            return false;
                        }
                    }
                }
            }
            if self.pruning == Pruning::Full && !self.unit_filter(st) {
                return false;
            }
            // forward check every open domain against the assigned part
            let mut forced = Vec::new();
            for x in 0..self.n as u32 {
                if st.lambda[x as usize] != NONE {
                    continue;
                }
                let dom = std::mem::take(&mut st.domains[x as usize]);
                let kept: Vec<u32> = dom.into_iter().filter(|&e| self.consistent(st, x, e)).collect();
                match kept.len() {
                    0 => return false,
                    1 => forced.push((x, kept[0])),
                    _ => {}
                }
                st.domains[x as usize] = kept;
            }
            if forced.is_empty() {
                return true;
            }
            for (x, e) in forced {
                if st.lambda[x as usize] == NONE {
                    if !self.set(st, x, e, &mut queue) {
                        return false;
                    }
                } else if st.lambda[x as usize] != e {
                    return false;
                }
            }
        }
    }

    /// Would `lambda_x = e` survive closure with the assigned elements?
    fn consistent(&self, st: &State, x: u32, e: u32) -> bool {
        let fits = |z: u32, c: u32| -> bool {
            if z == x {
                return c == e;
            }
            let lz = st.lambda[z as usize];
            if lz != NONE {
                lz == c
            } else {
                st.domains[z as usize].binary_search(&c).is_ok()
            }
        };
        let te = self.table(e);
        if !fits(te[x as usize], self.endos.compose(e, e)) {
            return false;
        }
        st.assigned.iter().all(|&y| {
            let ly = st.lambda[y as usize];
            fits(te[y as usize], self.endos.compose(e, ly)) && fits(self.table(ly)[x as usize], self.endos.compose(ly, e))
        })
    }

    /// Units have full additive order; with locality the non-units form a
    /// subgroup `L`, so `<known non-units>` lies in `L` and `unit + L` in the
    /// units.
    fn unit_filter(&self, st: &mut State) -> bool {
        let g = self.endos.group();
        let n = self.n;
        let mut non_units: Vec<u32> = self.low_order.clone();
        let mut units = Vec::new();
        for &x in &st.assigned {
            if self.bijective(st.lambda[x as usize]) {
                units.push(x);
            } else {
                non_units.push(x);
            }
        }
        let mut must_non = FixedBitSet::with_capacity(n);
        let mut must_unit = FixedBitSet::with_capacity(n);
        if self.require_local {
            must_non = span_of(g, &non_units);
            for &u in &units {
                if must_non.contains(u as usize) {
                    return false;
                }
                for m in must_non.ones() {
                    must_unit.insert(g.add(u, m as u32) as usize);
                }
            }
            if must_non.intersection(&must_unit).next().is_some() {
                return false;
            }
        } else {
            non_units.iter().for_each(|&x| must_non.insert(x as usize));
        }
        for &x in &st.assigned {
            let bij = self.bijective(st.lambda[x as usize]);
            if (bij && must_non.contains(x as usize)) || (!bij && must_unit.contains(x as usize)) {
                return false;
            }
        }
        for x in 0..n {
            if st.lambda[x] != NONE {
                continue;
            }
            if must_non.contains(x) {
                st.domains[x].retain(|&e| !self.endos.endos[e as usize].bijective);
            } else if must_unit.contains(x) {
                st.domains[x].retain(|&e| self.endos.endos[e as usize].bijective);
            }
            if st.domains[x].is_empty() {
                return false;
            }
        }
        true
    }

    /// Open element with the fewest candidates, ties by rank.
    fn pick(&self, st: &State) -> Option<u32> {
        (0..self.n as u32)
            .filter(|&x| st.lambda[x as usize] == NONE)
            .min_by_key(|&x| (st.domains[x as usize].len(), self.rank[x as usize]))
    }

    fn leaf_table(&self, st: &State) -> Vec<u32> {
        let mut t = Vec::with_capacity(self.n * self.n);
        for x in 0..self.n {
            t.extend_from_slice(self.table(st.lambda[x]));
        }
        t
    }

    /// Depth-first walk below `st`; frontier nodes at `stop_depth` are
    /// handed to `frontier` instead of being expanded.
    fn walk(
        &self,
        st: State,
        depth: usize,
        stop_depth: Option<usize>,
        w: &mut Walk<'_>,
        frontier: &mut Vec<State>,
    ) -> Outcome {
        let Some(x) = self.pick(&st) else {
            w.leaves.push(self.leaf_table(&st));
            if let Some(m) = w.max_leaves {
                if w.leaves.len() >= m {
                    return Outcome::Aborted;
                }
            }
            return Outcome::Done;
        };
        if stop_depth == Some(depth) {
            frontier.push(st);
            return Outcome::Done;
        }
        for &e in &st.domains[x as usize] {
            w.branches += 1;
            if w.should_stop() {
                return Outcome::Aborted;
            }
            let mut child = st.clone();
            child.path.push((x, e));
            if self.assign(&mut child, x, e) {
                if let Outcome::Aborted = self.walk(child, depth + 1, stop_depth, w, frontier) {
                    return Outcome::Aborted;
                }
            }
        }
        Outcome::Done
    }

    fn replay(&self, path: &[(u32, u32)]) -> Option<State> {
        let mut st = self.root()?;
        for &(x, e) in path {
            st.path.push((x, e));
            if !self.assign(&mut st, x, e) {
                return None;
            }
        }
        Some(st)
    }
}

/// A subtree of the search, identified by its decisions from the root.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
struct Task {
    identity: u32,
    path: Vec<(u32, u32)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    group: String,
    require_local: bool,
    pruning: Pruning,
    split_depth: usize,
    tasks: Vec<Task>,
    done: Vec<bool>,
    /// `(task, identity, table)` for every leaf found so far.
    leaves: Vec<(usize, u32, Vec<u32>)>,
    frontier_branches: u64,
    task_branches: Vec<u64>,
}

impl Checkpoint {
    fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec(self)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }
}

/// Searches for (local) nearrings with identity on `pres`.
pub fn search_local_nearrings(pres: &PcPresentation, opts: &SearchOptions) -> Result<SearchReport> {
    let start = Instant::now();
    let n = pres.order();
    if n > ENDO_ORDER_CAP {
        return Err(Error::CapExceeded { order: n, cap: ENDO_ORDER_CAP });
    }
    if n > DEFAULT_SEARCH_CAP && !opts.allow_large {
        return Err(Error::Usage(format!(
            "order {n} exceeds {DEFAULT_SEARCH_CAP}; large searches must be enabled explicitly"
        )));
    }
    let endos = EndoSet::new(pres)?;
    let group = endos.group().clone();
    let exponent = group.exponent();
    let candidates = identity_candidates(&group);
    let deadline = opts.budget.map(|b| start + b);
    let stop = AtomicBool::new(false);

    let (tasks, mut done, mut leaves, frontier_branches, mut task_branches) = match opts.pruning {
        Pruning::None => {
            let (leaves, branches, complete) = generate_and_test(&endos, &candidates, opts, deadline)?;
            let tasks: Vec<Task> = candidates.iter().map(|&i| Task { identity: i, path: Vec::new() }).collect();
            let done = vec![complete; tasks.len()];
            let leaves = leaves.into_iter().map(|(i, t)| (0usize, i, t)).collect();
            let k = tasks.len();
            (tasks, done, leaves, branches, vec![0; k])
        }
        _ => match load_checkpoint(pres, opts)? {
            Some(cp) => (cp.tasks, cp.done, cp.leaves, cp.frontier_branches, cp.task_branches),
            None => {
                let mut tasks = Vec::new();
                let mut leaves = Vec::new();
                let mut w = Walk { deadline: None, stop: &stop, branches: 0, leaves: Vec::new(), max_leaves: None };
                for &i in &candidates {
                    let ctx = Ctx::new(&endos, i, opts);
                    let Some(root) = ctx.root() else { continue };
                    let mut frontier = Vec::new();
                    ctx.walk(root, 0, Some(opts.split_depth), &mut w, &mut frontier);
                    for leaf in w.leaves.drain(..) {
                        leaves.push((usize::MAX, i, leaf));
                    }
                    tasks.extend(frontier.into_iter().map(|s| Task { identity: i, path: s.path }));
                }
                let k = tasks.len();
                (tasks, vec![false; k], leaves, w.branches, vec![0; k])
            }
        },
    };

    if opts.pruning != Pruning::None {
        let contexts: HashMap<u32, Ctx<'_>> = candidates.iter().map(|&i| (i, Ctx::new(&endos, i, opts))).collect();
        let chunk = if opts.checkpoint.is_some() { rayon::current_num_threads().max(1) * 4 } else { tasks.len().max(1) };
        let pending: Vec<usize> = (0..tasks.len()).filter(|&k| !done[k]).collect();
        for batch in pending.chunks(chunk) {
            if stop.load(Ordering::Relaxed) || reached_max(&leaves, opts) {
                break;
            }
            let outcomes: Vec<(usize, Option<(Vec<Vec<u32>>, u64)>)> = batch
                .par_iter()
                .map(|&k| {
                    let task = &tasks[k];
                    let ctx = &contexts[&task.identity];
                    let mut w = Walk { deadline, stop: &stop, branches: 0, leaves: Vec::new(), max_leaves: opts.max_results };
                    let Some(st) = ctx.replay(&task.path) else {
                        return (k, Some((Vec::new(), 0)));
                    };
                    let depth = task.path.len();
                    match ctx.walk(st, depth, None, &mut w, &mut Vec::new()) {
                        Outcome::Done => (k, Some((w.leaves, w.branches))),
                        Outcome::Aborted => (k, None),
                    }
                })
                .collect();
            for (k, out) in outcomes {
                if let Some((found, branches)) = out {
                    done[k] = true;
                    task_branches[k] = branches;
                    leaves.extend(found.into_iter().map(|t| (k, tasks[k].identity, t)));
                }
            }
            if let Some(path) = &opts.checkpoint {
                Checkpoint {
                    group: pres.name().to_string(),
                    require_local: opts.require_local,
                    pruning: opts.pruning,
                    split_depth: opts.split_depth,
                    tasks: tasks.clone(),
                    done: done.clone(),
                    leaves: leaves.clone(),
                    frontier_branches,
                    task_branches: task_branches.clone(),
                }
                .save(path)?;
            }
        }
    }

    // canonical order, independent of how the tree was split
    leaves.sort_by(|a, b| {
        let pos = |i: u32| candidates.iter().position(|&c| c == i);
        (pos(a.1), &a.2).cmp(&(pos(b.1), &b.2))
    });
    let group_arc: Arc<dyn AdditiveGroup> = Arc::new(group.clone());
    let abelian = is_abelian(&group);
    let mut results = Vec::new();
    let mut rejected = 0;
    for (_, identity, data) in &leaves {
        let table = MulTable { p: pres.prime(), n, identity: *identity, data: data.clone() };
        let nr = NearringInstance::from_table(group_arc.clone(), table.clone())?;
        let axioms = verify_axioms(&nr, VerifyMode::Exhaustive);
        if !axioms.is_nearring() {
            rejected += 1;
            continue;
        }
        let loc = units_and_locality(&nr);
        if opts.require_local && !loc.is_local {
            continue;
        }
        let l_shape_ok = (!abelian && loc.is_local).then(|| {
            let p = pres.prime() as usize;
            !loc.l_cyclic && (loc.l_order * p == n || loc.l_order * p * p == n)
        });
        results.push(SearchResult {
            identity: *identity,
            unit_count: loc.unit_count,
            l_order: loc.l_order,
            local: loc.is_local,
            l_cyclic: loc.l_cyclic,
            zero_symmetric: axioms.zero_symmetric,
            l_shape_ok,
            table_ref: None,
            table,
        });
    }
    let mut truncated = false;
    if let Some(m) = opts.max_results {
        if results.len() >= m {
            truncated = true;
            results.truncate(m);
        }
    }
    let tasks_completed = done.iter().filter(|&&d| d).count();
    let status = if tasks_completed == tasks.len() && !truncated {
        SearchStatus::Exhaustive
    } else {
        SearchStatus::Inconclusive
    };
    Ok(SearchReport {
        group: pres.name().to_string(),
        order: n,
        exponent,
        require_local: opts.require_local,
        pruning: opts.pruning,
        identity_candidates: candidates,
        endo_count: endos.len(),
        branches_explored: frontier_branches + task_branches.iter().sum::<u64>(),
        tasks: tasks.len(),
        tasks_completed,
        results,
        rejected_by_verification: rejected,
        truncated,
        status,
        elapsed: start.elapsed(),
    })
}

fn reached_max(leaves: &[(usize, u32, Vec<u32>)], opts: &SearchOptions) -> bool {
    opts.max_results.is_some_and(|m| leaves.len() >= m)
}

fn load_checkpoint(pres: &PcPresentation, opts: &SearchOptions) -> Result<Option<Checkpoint>> {
    let Some(path) = &opts.checkpoint else { return Ok(None) };
    if !path.exists() {
        return Ok(None);
    }
    let cp: Checkpoint = serde_json::from_slice(&std::fs::read(path)?)?;
    if cp.group != pres.name()
        || cp.require_local != opts.require_local
        || cp.pruning != opts.pruning
        || cp.split_depth != opts.split_depth
    {
        return Err(Error::Usage(format!("checkpoint {} belongs to a different run", path.display())));
    }
    Ok(Some(cp))
}

fn is_abelian(g: &CayleyGroup) -> bool {
    let n = g.order() as u32;
    (0..n).all(|x| (0..n).all(|y| g.add(x, y) == g.add(y, x)))
}

/// Enumerates every full assignment with `lambda_x(i) = x` and keeps the
/// associative ones.
fn generate_and_test(
    endos: &EndoSet,
    candidates: &[u32],
    opts: &SearchOptions,
    deadline: Option<Instant>,
) -> Result<(Vec<(u32, Vec<u32>)>, u64, bool)> {
    let n = endos.group().order();
    let mut out = Vec::new();
    let mut total = 0u64;
    for &i in candidates {
        let mut domains = vec![Vec::new(); n];
        for (k, e) in endos.endos().iter().enumerate() {
            domains[e.table[i as usize] as usize].push(k as u32);
        }
        domains[i as usize] = vec![endos.identity()];
        let count = domains.iter().try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64));
        match count {
            Some(c) if c <= opts.generate_limit => {}
            _ => {
                return Err(Error::Usage(format!(
                    "generate-and-test would visit more than {} assignments",
                    opts.generate_limit
                )))
            }
        }
        let mut choice = vec![0usize; n];
        loop {
            total += 1;
            if total % 4096 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                return Ok((out, total, false));
            }
            if domains.iter().all(|d| !d.is_empty()) {
                let lambda: Vec<u32> = (0..n).map(|x| domains[x][choice[x]]).collect();
                let closed = (0..n).all(|x| {
                    (0..n).all(|y| {
                        let z = endos.endos()[lambda[x] as usize].table[y] as usize;
                        lambda[z] == endos.compose(lambda[x], lambda[y])
                    })
                });
                if closed {
                    let mut t = Vec::with_capacity(n * n);
                    for &l in &lambda {
                        t.extend_from_slice(&endos.endos()[l as usize].table);
                    }
                    out.push((i, t));
                }
            } else {
                break;
            }
            // odometer
            let mut k = 0;
            while k < n {
                choice[k] += 1;
                if choice[k] < domains[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    Ok((out, total, true))
}
