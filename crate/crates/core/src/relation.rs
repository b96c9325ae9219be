//! Unordered relations (hypergraphs) and their invariance groups.
//!
//! Two engines compute `G(R)`. The scan engine walks `S_n` point by point,
//! checking each edge as soon as all its points have images. The refinement
//! engine is an individualization/refinement backtrack on a colored
//! hypergraph in the style of graph automorphism programs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{PermGroup, SubgroupBuilder};
use crate::perm::{check_degree, Permutation};
use crate::set_orbits::subset_orbit;
use crate::subset::SubsetMask;

/// Largest degree the scan engine accepts.
pub const SCAN_MAX_DEGREE: usize = 9;

/// A family of subsets of `{0, .., n-1}`, kept sorted by
/// `(cardinality, mask)` without duplicates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    degree: usize,
    edges: Vec<SubsetMask>,
}

fn edge_key(x: &SubsetMask) -> (u32, u32) {
    (x.bits().count_ones(), x.bits())
}

impl Relation {
    pub fn new(degree: usize, edges: impl IntoIterator<Item = SubsetMask>) -> Result<Self> {
        check_degree(degree)?;
        let mut edges: Vec<SubsetMask> = edges.into_iter().collect();
        if let Some(e) = edges.iter().find(|e| e.degree() != degree) {
            return Err(Error::DegreeMismatch(degree, e.degree()));
        }
        edges.sort_unstable_by_key(edge_key);
        edges.dedup();
        Ok(Self { degree, edges })
    }

    pub fn empty(degree: usize) -> Result<Self> {
        Self::new(degree, [])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn edges(&self) -> &[SubsetMask] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `ar(R)`: the edge cardinalities.
    pub fn arity(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.len()).collect()
    }

    pub fn contains(&self, x: &SubsetMask) -> bool {
        self.edges
            .binary_search_by_key(&edge_key(x), edge_key)
            .is_ok()
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        if other.degree != self.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Relation::new(self.degree, self.edges.iter().chain(&other.edges).copied())
    }

    /// Every edge replaced by its complement.
    pub fn complemented(&self) -> Relation {
        Relation::new(self.degree, self.edges.iter().map(|e| e.complement())).expect("same degree")
    }

    /// `R^c`: every edge replaced by its image.
    pub fn image(&self, c: &Permutation) -> Relation {
        Relation::new(self.degree, self.edges.iter().map(|e| e.image(c))).expect("same degree")
    }

    /// `R^g = R`.
    pub fn is_preserved_by(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.edges.iter().all(|e| self.contains(&e.image(g)))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation({}, {self})", self.degree)
    }
}

/// Union of the orbits `s^G` over the seeds.
pub fn orbit_relation(g: &PermGroup, seeds: &[SubsetMask]) -> Result<Relation> {
    if seeds.is_empty() {
        return Err(Error::Invalid("no seed sets".into()));
    }
    if let Some(s) = seeds.iter().find(|s| s.degree() != g.degree()) {
        return Err(Error::DegreeMismatch(g.degree(), s.degree()));
    }
    Relation::new(g.degree(), seeds.iter().flat_map(|s| subset_orbit(g, *s)))
}

/// Which invariance-group engine to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Scan for `n <= 9`, refinement up to `max_degree_exact`.
    Auto,
    Scan,
    Refine,
}

/// `G(R) = { g in S_n : R^g = R }`, exact or refused.
pub fn invariance_group(r: &Relation, budget: &Budget) -> Result<PermGroup> {
    invariance_group_with(r, Engine::Auto, budget)
}

pub fn invariance_group_with(r: &Relation, engine: Engine, budget: &Budget) -> Result<PermGroup> {
    let edges: Vec<(u32, u32)> = r.edges.iter().map(|e| (e.bits(), 0)).collect();
    colored_invariance_group(r.degree, &edges, engine, budget)
}

/// Automorphism group of a hypergraph whose edges carry colors; an
/// automorphism maps each edge to an edge of the same color. Edges are
/// `(mask, color)` pairs and must be distinct masks.
pub fn colored_invariance_group(
    degree: usize,
    edges: &[(u32, u32)],
    engine: Engine,
    budget: &Budget,
) -> Result<PermGroup> {
    check_degree(degree)?;
    let engine = match engine {
        Engine::Auto if degree <= SCAN_MAX_DEGREE => Engine::Scan,
        Engine::Auto => {
            if degree > budget.max_degree_exact {
                return Err(Error::Budget {
                    what: "exact invariance group",
                    required: degree as u128,
                    allowed: budget.max_degree_exact as u128,
                    flag: "--max-degree-exact",
                });
            }
            Engine::Refine
        }
        e => e,
    };
    let h = Hypergraph::new(degree, edges);
    let gens = match engine {
        Engine::Scan => {
            if degree > SCAN_MAX_DEGREE {
                return Err(Error::Invalid(format!(
                    "scan engine is limited to degree {SCAN_MAX_DEGREE}"
                )));
            }
            let mut b = SubgroupBuilder::new(degree);
            for g in scan_engine(&h) {
                b.add(g);
            }
            return Ok(b.finish());
        }
        _ => Refiner::new(&h, budget.node_budget).generators()?,
    };
    if gens.is_empty() {
        PermGroup::trivial(degree)
    } else {
        PermGroup::new(&gens)
    }
}

/// `G = G(s^G for s in seeds, together with context)`.
pub fn is_defined_by(
    g: &PermGroup,
    seeds: &[SubsetMask],
    context: &Relation,
    budget: &Budget,
) -> Result<bool> {
    let r = orbit_relation(g, seeds)?.union(context)?;
    let a = invariance_group(&r, budget)?;
    Ok(a.order() == g.order() && g.is_subgroup_of(&a))
}

enum EdgeIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<u32, u32>),
}

pub(crate) struct Hypergraph {
    n: usize,
    /// `(mask, color)`.
    edges: Vec<(u32, u32)>,
    /// Color plus one, zero when absent.
    index: EdgeIndex,
    /// Edge indices through each vertex.
    incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub(crate) fn new(n: usize, edges: &[(u32, u32)]) -> Self {
        let index = if n <= 20 {
            let mut v = vec![0u32; 1 << n];
            for &(m, c) in edges {
                v[m as usize] = c + 1;
            }
            EdgeIndex::Dense(v)
        } else {
            EdgeIndex::Sparse(edges.iter().map(|&(m, c)| (m, c + 1)).collect())
        };
        let mut incidence = vec![Vec::new(); n];
        for (i, &(m, _)) in edges.iter().enumerate() {
            for (v, inc) in incidence.iter_mut().enumerate() {
                if m >> v & 1 != 0 {
                    inc.push(i);
                }
            }
        }
        Self {
            n,
            edges: edges.to_vec(),
            index,
            incidence,
        }
    }

    #[inline]
    fn color_of(&self, m: u32) -> u32 {
        match &self.index {
            EdgeIndex::Dense(v) => v[m as usize],
            EdgeIndex::Sparse(h) => h.get(&m).copied().unwrap_or(0),
        }
    }

    fn is_automorphism(&self, g: &Permutation) -> bool {
        self.edges
            .iter()
            .all(|&(m, c)| self.color_of(g.apply_mask(m)) == c + 1)
    }
}

/// All automorphisms, in lexicographic order of image tuples.
fn scan_engine(h: &Hypergraph) -> Vec<Permutation> {
    let n = h.n;
    // Edges grouped by their largest point, checked once it is assigned.
    let mut by_last: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for &(m, c) in &h.edges {
        if m != 0 {
            by_last[31 - m.leading_zeros() as usize].push((m, c + 1));
        }
    }
    let dfs_root = |first: usize| {
        let mut out = Vec::new();
        let mut img = [0usize; SCAN_MAX_DEGREE];
        img[0] = first;
        scan_dfs(h, &by_last, 1, 1 << first, &mut img, &mut out);
        out
    };
    let parts: Vec<Vec<Permutation>> = (0..n).into_par_iter().map(dfs_root).collect();
    parts.into_iter().flatten().collect()
}

fn edges_ok(h: &Hypergraph, checks: &[(u32, u32)], img: &[usize]) -> bool {
    checks.iter().all(|&(m, c)| {
        let mut y = 0u32;
        let mut b = m;
        while b != 0 {
            let p = b.trailing_zeros() as usize;
            y |= 1 << img[p];
            b &= b - 1;
        }
        h.color_of(y) == c
    })
}

fn scan_dfs(
    h: &Hypergraph,
    by_last: &[Vec<(u32, u32)>],
    depth: usize,
    used: u32,
    img: &mut [usize; SCAN_MAX_DEGREE],
    out: &mut Vec<Permutation>,
) {
    if !edges_ok(h, &by_last[depth - 1], img) {
        return;
    }
    if depth == h.n {
        out.push(Permutation::from_images(&img[..h.n]).expect("bijection"));
        return;
    }
    for a in 0..h.n {
        if used >> a & 1 == 0 {
            img[depth] = a;
            scan_dfs(h, by_last, depth + 1, used | 1 << a, img, out);
        }
    }
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

type Partition = Vec<Vec<u8>>;

struct PathNode {
    partition: Partition,
    trace: u64,
    shape: Vec<usize>,
    /// Index of the branching cell (unused at the leaf).
    target: usize,
}

struct Refiner<'a> {
    h: &'a Hypergraph,
    nodes: u64,
    limit: u64,
}

fn shape(p: &Partition) -> Vec<usize> {
    p.iter().map(|c| c.len()).collect()
}

fn is_discrete(p: &Partition) -> bool {
    p.iter().all(|c| c.len() == 1)
}

/// First largest non-singleton cell.
fn target_cell(p: &Partition) -> usize {
    let mut best = 0;
    for (i, c) in p.iter().enumerate() {
        if c.len() > p[best].len() {
            best = i;
        }
    }
    best
}

fn individualize(p: &Partition, cell: usize, v: u8) -> Partition {
    let mut q = Vec::with_capacity(p.len() + 1);
    q.extend_from_slice(&p[..cell]);
    q.push(vec![v]);
    q.push(p[cell].iter().copied().filter(|&u| u != v).collect());
    q.extend_from_slice(&p[cell + 1..]);
    q
}

impl<'a> Refiner<'a> {
    fn new(h: &'a Hypergraph, limit: u64) -> Self {
        Self { h, nodes: 0, limit }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::Budget {
                what: "invariance group search",
                required: self.nodes as u128,
                allowed: self.limit as u128,
                flag: "--node-budget",
            });
        }
        Ok(())
    }

    /// Splits cells by edge-signature invariants until stable. Returns a
    /// trace hash that is invariant under relabelling.
    fn refine(&self, p: &mut Partition) -> u64 {
        let n = self.h.n;
        let mut trace = mix(p.len() as u64);
        let mut cell_of = vec![0usize; n];
        let mut inv = vec![0u64; n];
        let mut sig = vec![0u64; self.h.edges.len()];
        loop {
            for (i, c) in p.iter().enumerate() {
                for &v in c {
                    cell_of[v as usize] = i;
                }
            }
            let cell_hash: Vec<u64> = (0..p.len()).map(|i| mix(i as u64 + 1)).collect();
            for (s, &(m, c)) in sig.iter_mut().zip(&self.h.edges) {
                let mut acc = mix(c as u64 ^ 0x5151);
                let mut b = m;
                while b != 0 {
                    acc = acc.wrapping_add(cell_hash[cell_of[b.trailing_zeros() as usize]]);
                    b &= b - 1;
                }
                *s = mix(acc);
            }
            for (v, x) in inv.iter_mut().enumerate() {
                *x = self.h.incidence[v]
                    .iter()
                    .fold(0u64, |a, &e| a.wrapping_add(sig[e]));
            }
            let mut next: Partition = Vec::with_capacity(n);
            for (i, c) in p.iter().enumerate() {
                if c.len() == 1 {
                    next.push(c.clone());
                    continue;
                }
                let mut keyed: Vec<(u64, u8)> = c.iter().map(|&v| (inv[v as usize], v)).collect();
                keyed.sort_unstable();
                let mut start = 0;
                for k in 1..=keyed.len() {
                    if k == keyed.len() || keyed[k].0 != keyed[start].0 {
                        trace = mix(trace ^ mix(i as u64) ^ keyed[start].0 ^ (k - start) as u64);
                        next.push(keyed[start..k].iter().map(|&(_, v)| v).collect());
                        start = k;
                    }
                }
            }
            let split = next.len() != p.len();
            *p = next;
            if !split {
                return mix(trace ^ p.len() as u64);
            }
        }
    }

    fn generators(&mut self) -> Result<Vec<Permutation>> {
        let n = self.h.n;
        let mut root: Partition = vec![(0..n as u8).collect()];
        let trace = self.refine(&mut root);
        let mut path = vec![PathNode {
            shape: shape(&root),
            partition: root,
            trace,
            target: 0,
        }];
        loop {
            let last = path.last_mut().unwrap();
            if is_discrete(&last.partition) {
                break;
            }
            let t = target_cell(&last.partition);
            last.target = t;
            let v = *last.partition[t].iter().min().unwrap();
            let mut child = individualize(&last.partition, t, v);
            let trace = self.refine(&mut child);
            path.push(PathNode {
                shape: shape(&child),
                partition: child,
                trace,
                target: 0,
            });
        }
        let zeta: Vec<u8> = path
            .last()
            .unwrap()
            .partition
            .iter()
            .map(|c| c[0])
            .collect();

        let mut gens: Vec<Permutation> = Vec::new();
        for l in (0..path.len() - 1).rev() {
            let node = &path[l];
            let mut cell = node.partition[node.target].clone();
            cell.sort_unstable();
            let v = cell[0];
            let mut tried: Vec<u8> = vec![v];
            for &w in &cell[1..] {
                let orbit = point_orbit(n, &gens, w);
                if tried.iter().any(|&t| orbit >> t & 1 != 0) {
                    continue;
                }
                tried.push(w);
                let mut child = individualize(&path[l].partition, path[l].target, w);
                let trace = self.refine(&mut child);
                if let Some(g) = self.find_auto(&path, &zeta, l + 1, child, trace)? {
                    gens.push(g);
                }
            }
        }
        Ok(gens)
    }

    fn find_auto(
        &mut self,
        path: &[PathNode],
        zeta: &[u8],
        depth: usize,
        p: Partition,
        trace: u64,
    ) -> Result<Option<Permutation>> {
        self.tick()?;
        let reference = &path[depth];
        if trace != reference.trace || shape(&p) != reference.shape {
            return Ok(None);
        }
        if depth == path.len() - 1 {
            let mut images = vec![0usize; self.h.n];
            for (z, c) in zeta.iter().zip(&p) {
                images[*z as usize] = c[0] as usize;
            }
            let g = Permutation::from_images(&images).expect("discrete partitions");
            return Ok(self.h.is_automorphism(&g).then_some(g));
        }
        let t = reference.target;
        let mut cell = p[t].clone();
        cell.sort_unstable();
        for u in cell {
            let mut child = individualize(&p, t, u);
            let tr = self.refine(&mut child);
            if let Some(g) = self.find_auto(path, zeta, depth + 1, child, tr)? {
                return Ok(Some(g));
            }
        }
        Ok(None)
    }
}

/// Orbit of `start` under `gens` as a bitmask.
fn point_orbit(n: usize, gens: &[Permutation], start: u8) -> u32 {
    let mut seen = 1u32 << start;
    let mut stack = vec![start as usize];
    while let Some(p) = stack.pop() {
        for g in gens {
            let q = g.image(p);
            if seen >> q & 1 == 0 {
                seen |= 1 << q;
                stack.push(q);
            }
        }
    }
    debug_assert!(n <= 32);
    seen
}
