//! Permutation groups stored as a base and strong generating set.
//!
//! The stabilizer chain is built by the deterministic Schreier-Sims
//! procedure. Base points are introduced as the smallest point moved by the
//! permutation that needs a new level, so the chain depends only on the
//! generator list. A randomized build under a random relabelling is kept as
//! an independent order check.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::{Budget, BRUTE_FORCE_ORDER};
use crate::error::{Error, Result};
use crate::perm::{check_degree, Permutation};
use crate::subset::SubsetMask;

#[derive(Clone, Debug)]
struct Level {
    base: u8,
    gens: Vec<Permutation>,
    /// Orbit of the base point in discovery order.
    orbit: Vec<u8>,
    /// `reps[p]` maps the base point to `p`.
    reps: Vec<Option<Permutation>>,
    inv_reps: Vec<Option<Permutation>>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut reps = vec![None; degree];
        let mut inv_reps = vec![None; degree];
        reps[base] = Some(Permutation::identity_unchecked(degree));
        inv_reps[base] = reps[base];
        Self {
            base: base as u8,
            gens: Vec::new(),
            orbit: vec![base as u8],
            reps,
            inv_reps,
        }
    }

    fn add_gen(&mut self, g: Permutation) {
        self.gens.push(g);
        self.extend_orbit();
    }

    /// Closes the orbit under the level generators, keeping existing
    /// representatives unchanged.
    fn extend_orbit(&mut self) {
        let mut k = 0;
        while k < self.orbit.len() {
            let b = self.orbit[k] as usize;
            let ub = self.reps[b].expect("orbit point without representative");
            for x in &self.gens {
                let c = x.image(b);
                if self.reps[c].is_none() {
                    let u = ub.then(x);
                    self.reps[c] = Some(u);
                    self.inv_reps[c] = Some(u.inverse());
                    self.orbit.push(c as u8);
                }
            }
            k += 1;
        }
    }
}

/// Sifts `h` through `levels[from..]`. Returns the residue and the level at
/// which sifting stopped (`levels.len()` when it passed every level).
fn strip(levels: &[Level], mut h: Permutation, from: usize) -> (Permutation, usize) {
    for (l, lev) in levels.iter().enumerate().skip(from) {
        let b = h.image(lev.base as usize);
        match &lev.inv_reps[b] {
            None => return (h, l),
            Some(inv) => h = h.then(inv),
        }
    }
    (h, levels.len())
}

fn schreier_sims(degree: usize, gens: &[Permutation]) -> Vec<Level> {
    let gens: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).copied().collect();
    let mut levels: Vec<Level> = Vec::new();
    for g in &gens {
        if levels
            .iter()
            .all(|l| g.image(l.base as usize) == l.base as usize)
        {
            levels.push(Level::new(g.first_moved().unwrap(), degree));
        }
    }
    for g in &gens {
        for lev in levels.iter_mut() {
            lev.gens.push(*g);
            if g.image(lev.base as usize) != lev.base as usize {
                break;
            }
        }
    }
    for lev in levels.iter_mut() {
        lev.extend_orbit();
    }

    // Schreier generators already known to sift, per level: (point, gen index).
    let mut checked: Vec<HashSet<(u8, usize)>> = vec![HashSet::new(); levels.len()];
    let mut i = levels.len() as isize - 1;
    while i >= 0 {
        let iu = i as usize;
        let mut jump = None;
        'scan: for oi in 0..levels[iu].orbit.len() {
            let beta = levels[iu].orbit[oi];
            for xi in 0..levels[iu].gens.len() {
                if !checked[iu].insert((beta, xi)) {
                    continue;
                }
                let lev = &levels[iu];
                let x = lev.gens[xi];
                let ub = lev.reps[beta as usize].unwrap();
                let bx = x.image(beta as usize);
                let h = ub.then(&x).then(lev.inv_reps[bx].as_ref().unwrap());
                if h.is_identity() {
                    continue;
                }
                let (r, j) = strip(&levels, h, iu + 1);
                if j < levels.len() || !r.is_identity() {
                    if j == levels.len() {
                        levels.push(Level::new(r.first_moved().unwrap(), degree));
                        checked.push(HashSet::new());
                    }
                    for lev in &mut levels[iu + 1..=j] {
                        lev.add_gen(r);
                    }
                    jump = Some(j);
                    break 'scan;
                }
            }
        }
        match jump {
            Some(j) => i = j as isize,
            None => i -= 1,
        }
    }
    levels
}

/// A finite permutation group with exact order and membership.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
    /// `fixed_below[l]`: points fixed by the pointwise stabilizer of the
    /// first `l + 1` base points.
    fixed_below: Vec<u32>,
    order: u128,
}

impl PermGroup {
    /// Builds the group generated by `gens`. All generators must share one
    /// degree.
    pub fn new(gens: &[Permutation]) -> Result<Self> {
        let first = gens.first().ok_or(Error::NoGenerators)?;
        let degree = first.degree();
        if let Some(bad) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::DegreeMismatch(degree, bad.degree()));
        }
        let levels = schreier_sims(degree, gens);
        let order = levels.iter().map(|l| l.orbit.len() as u128).product();
        let all = crate::subset::full_mask(degree);
        let fixed_below = (0..levels.len())
            .map(|l| match levels.get(l + 1) {
                None => all,
                Some(next) => next.gens.iter().fold(all, |acc, g| {
                    acc & !(0..degree)
                        .filter(|&p| g.image(p) != p)
                        .fold(0u32, |m, p| m | 1 << p)
                }),
            })
            .collect();
        Ok(Self {
            degree,
            generators: gens.to_vec(),
            levels,
            fixed_below,
            order,
        })
    }

    pub fn trivial(degree: usize) -> Result<Self> {
        Self::new(&[Permutation::identity(degree)?])
    }

    pub fn symmetric(degree: usize) -> Result<Self> {
        check_degree(degree)?;
        if degree == 1 {
            return Self::trivial(1);
        }
        let swap = Permutation::parse_cycles("(1,2)", degree)?;
        let cycle: Vec<usize> = (1..degree).chain([0]).collect();
        Self::new(&[swap, Permutation::from_images(&cycle)?])
    }

    pub fn cyclic(degree: usize) -> Result<Self> {
        let cycle: Vec<usize> = (1..degree).chain([0]).collect();
        Self::new(&[Permutation::from_images(&cycle)?])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity_unchecked(self.degree)
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base as usize).collect()
    }

    /// Sizes of the basic orbits; their product is the order.
    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if seen.insert(*g) {
                    out.push(*g);
                }
            }
        }
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Exact membership by sifting.
    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (r, j) = strip(&self.levels, *g, 0);
        j == self.levels.len() && r.is_identity()
    }

    /// `self <= other` as permutation groups on the same domain.
    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.order == other.order && self.is_subgroup_of(other)
    }

    /// Orbits of the group on points, each sorted, listed by smallest point.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = 0u32;
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen & (1 << start) != 0 {
                continue;
            }
            let mut orbit = vec![start];
            seen |= 1 << start;
            let mut k = 0;
            while k < orbit.len() {
                let p = orbit[k];
                for g in &self.generators {
                    let q = g.image(p);
                    if seen & (1 << q) == 0 {
                        seen |= 1 << q;
                        orbit.push(q);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.point_orbits().len() == 1
    }

    /// Uniformly random element, drawn through the transversals.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = self.identity();
        for lev in self.levels.iter().rev() {
            let p = lev.orbit[rng.gen_range(0..lev.orbit.len())] as usize;
            g = g.then(lev.reps[p].as_ref().unwrap());
        }
        g
    }

    /// Streams every element exactly once, refusing when the order exceeds
    /// `budget.enum_budget`.
    pub fn elements(&self, budget: &Budget) -> Result<Elements<'_>> {
        if self.order > budget.enum_budget as u128 {
            return Err(Error::Budget {
                what: "element enumeration",
                required: self.order,
                allowed: budget.enum_budget as u128,
                flag: "--enum-budget",
            });
        }
        Ok(Elements::new(self))
    }

    /// Setwise stabilizer `G_x = { g : x^g = x }`.
    pub fn setwise_stabilizer(&self, x: SubsetMask, budget: &Budget) -> Result<PermGroup> {
        if x.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, x.degree()));
        }
        if x.is_empty() || x.len() == self.degree {
            return Ok(self.clone());
        }
        let bits = x.bits();
        let mut found = SubgroupBuilder::new(self.degree);
        if self.order <= BRUTE_FORCE_ORDER && self.order <= budget.enum_budget as u128 {
            for g in Elements::new(self) {
                if g.apply_mask(bits) == bits {
                    found.add(g);
                }
            }
            return Ok(found.finish());
        }
        let mut search = StabSearch::new(self, bits, budget, false);
        search.run(0, self.identity(), &mut found)?;
        Ok(found.finish())
    }

    /// Whether the setwise stabilizer of `x` is trivial, by a backtrack that
    /// stops at the first nontrivial element fixing `x`.
    pub fn stabilizer_is_trivial(&self, x: SubsetMask, budget: &Budget) -> Result<bool> {
        if x.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, x.degree()));
        }
        if self.order == 1 {
            return Ok(true);
        }
        let mut found = SubgroupBuilder::new(self.degree);
        let mut search = StabSearch::new(self, x.bits(), budget, true);
        search.run(0, self.identity(), &mut found)?;
        Ok(found.group.is_none())
    }

    /// Order recomputed by randomized Schreier-Sims after conjugating the
    /// generators by a random permutation, so that a different base is used.
    /// Exact with high probability; meant only as a cross-check.
    pub fn randomized_order(&self, seed: u64) -> u128 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut relabel: Vec<usize> = (0..self.degree).collect();
        relabel.shuffle(&mut rng);
        let c = Permutation::from_images(&relabel).expect("shuffle is a bijection");
        let gens: Vec<Permutation> = self.generators.iter().map(|g| g.conjugate_by(&c)).collect();

        // Product replacement.
        let mut state: Vec<Permutation> = gens.clone();
        while state.len() < 10 {
            state.push(gens[state.len() % gens.len()]);
        }
        let mut acc = self.identity();
        let mut next = |rng: &mut ChaCha8Rng| {
            let i = rng.gen_range(0..state.len());
            let mut j = rng.gen_range(0..state.len() - 1);
            if j >= i {
                j += 1;
            }
            state[i] = if rng.gen_bool(0.5) {
                state[i].then(&state[j])
            } else {
                state[i].then(&state[j].inverse())
            };
            acc = acc.then(&state[i]);
            acc
        };
        for _ in 0..60 {
            next(&mut rng);
        }

        let mut levels: Vec<Level> = Vec::new();
        let mut quiet = 0;
        while quiet < 40 {
            let g = next(&mut rng);
            let (r, j) = strip(&levels, g, 0);
            if j == levels.len() && r.is_identity() {
                quiet += 1;
                continue;
            }
            quiet = 0;
            if j == levels.len() {
                levels.push(Level::new(r.first_moved().unwrap(), self.degree));
            }
            for lev in &mut levels[..=j] {
                lev.add_gen(r);
            }
        }
        levels.iter().map(|l| l.orbit.len() as u128).product()
    }
}

struct StabSearch<'a> {
    group: &'a PermGroup,
    x: u32,
    orbits: Vec<Vec<u8>>,
    nodes: u64,
    limit: u64,
    first_only: bool,
}

impl<'a> StabSearch<'a> {
    fn new(group: &'a PermGroup, x: u32, budget: &Budget, first_only: bool) -> Self {
        let orbits = group
            .levels
            .iter()
            .map(|l| {
                let mut o = l.orbit.clone();
                o.sort_unstable();
                o
            })
            .collect();
        Self {
            group,
            x,
            orbits,
            nodes: 0,
            limit: budget.node_budget,
            first_only,
        }
    }

    /// Returns `true` when the search should stop.
    fn run(
        &mut self,
        depth: usize,
        prefix: Permutation,
        found: &mut SubgroupBuilder,
    ) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::Budget {
                what: "setwise stabilizer search",
                required: self.nodes as u128,
                allowed: self.limit as u128,
                flag: "--node-budget",
            });
        }
        let x = self.x;
        if depth == self.group.levels.len() {
            if !prefix.is_identity() && !found.contains(&prefix) {
                found.add(prefix);
                return Ok(self.first_only);
            }
            return Ok(false);
        }
        let lev = &self.group.levels[depth];
        let fixed = self.group.fixed_below[depth];
        let inside = x & fixed;
        let base_in = x & (1 << lev.base) != 0;
        for k in 0..self.orbits[depth].len() {
            let p = self.orbits[depth][k] as usize;
            if (x & (1 << prefix.image(p)) != 0) != base_in {
                continue;
            }
            let next = lev.reps[p].as_ref().unwrap().then(&prefix);
            if next.apply_mask(inside) != x & next.apply_mask(fixed) {
                continue;
            }
            if self.run(depth + 1, next, found)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Grows a subgroup one generator at a time, skipping elements it already
/// contains.
pub(crate) struct SubgroupBuilder {
    degree: usize,
    gens: Vec<Permutation>,
    group: Option<PermGroup>,
}

impl SubgroupBuilder {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            gens: Vec::new(),
            group: None,
        }
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        match &self.group {
            Some(h) => h.contains(g),
            None => g.is_identity(),
        }
    }

    /// Adds `g` if it is new; returns whether the subgroup grew.
    pub fn add(&mut self, g: Permutation) -> bool {
        if self.contains(&g) {
            return false;
        }
        self.gens.push(g);
        self.group = Some(PermGroup::new(&self.gens).expect("nonempty, equal degree"));
        true
    }

    pub fn finish(self) -> PermGroup {
        self.group
            .unwrap_or_else(|| PermGroup::trivial(self.degree).expect("valid degree"))
    }
}

/// Iterator over all elements of a group, lexicographic in the transversal
/// indices (first base point most significant, orbits sorted ascending).
pub struct Elements<'a> {
    group: &'a PermGroup,
    orbits: Vec<Vec<u8>>,
    index: Vec<usize>,
    // partial[l] = u_l * u_{l-1} * ... * u_0
    partial: Vec<Permutation>,
    done: bool,
}

impl<'a> Elements<'a> {
    fn new(group: &'a PermGroup) -> Self {
        let orbits: Vec<Vec<u8>> = group
            .levels
            .iter()
            .map(|l| {
                let mut o = l.orbit.clone();
                o.sort_unstable();
                o
            })
            .collect();
        let k = orbits.len();
        let mut it = Self {
            group,
            orbits,
            index: vec![0; k],
            partial: Vec::with_capacity(k),
            done: false,
        };
        it.rebuild_from(0);
        it
    }

    fn rep(&self, level: usize) -> &Permutation {
        let p = self.orbits[level][self.index[level]] as usize;
        self.group.levels[level].reps[p].as_ref().unwrap()
    }

    fn rebuild_from(&mut self, level: usize) {
        self.partial.truncate(level);
        for l in level..self.orbits.len() {
            let u = *self.rep(l);
            let next = match self.partial.last() {
                Some(prev) => u.then(prev),
                None => u,
            };
            self.partial.push(next);
        }
    }
}

impl Iterator for Elements<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        let current = self
            .partial
            .last()
            .copied()
            .unwrap_or_else(|| self.group.identity());
        // Advance the odometer, last level fastest.
        let mut l = self.orbits.len();
        loop {
            if l == 0 {
                self.done = true;
                break;
            }
            l -= 1;
            self.index[l] += 1;
            if self.index[l] < self.orbits[l].len() {
                self.rebuild_from(l);
                break;
            }
            self.index[l] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(s, n).unwrap()
    }

    fn group(gens: &[&str], n: usize) -> PermGroup {
        let gens: Vec<_> = gens.iter().map(|s| p(s, n)).collect();
        PermGroup::new(&gens).unwrap()
    }

    #[test]
    fn symmetric_orders() {
        let mut f = 1u128;
        for n in 1..=12 {
            f *= n as u128;
            assert_eq!(PermGroup::symmetric(n).unwrap().order(), f);
        }
        assert_eq!(
            PermGroup::symmetric(32).unwrap().order(),
            (1..=32u128).product()
        );
    }

    #[test]
    fn trivial_group() {
        let g = PermGroup::trivial(5).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.contains(&Permutation::identity(5).unwrap()));
        assert_eq!(g.elements(&Budget::default()).unwrap().count(), 1);
    }

    #[test]
    fn parity_membership() {
        let g = group(&["(1,2,3)"], 3);
        assert!(!g.contains(&p("(1,2)", 3)));
        assert!(g.contains(&p("(1,3,2)", 3)));
    }

    #[test]
    fn degree_mismatch_rejected() {
        assert_eq!(
            PermGroup::new(&[p("(1,2)", 3), p("(1,2)", 4)]).unwrap_err(),
            Error::DegreeMismatch(3, 4)
        );
        assert_eq!(PermGroup::new(&[]).unwrap_err(), Error::NoGenerators);
    }

    #[test]
    fn same_generators_same_base() {
        let gens = [
            "(1,10,4)(6,9,7)(8,12,13)",
            "(1,3,2)(4,9,5)(7,8,12)(10,13,11)",
        ];
        let a = group(&gens, 13);
        let b = group(&gens, 13);
        assert_eq!(a.base(), b.base());
        assert_eq!(a.order(), 5616);
    }

    #[test]
    fn elements_are_distinct_members() {
        let g = group(&["(1,2,3,4,5)", "(2,5)(3,4)"], 5);
        let all: Vec<_> = g.elements(&Budget::default()).unwrap().collect();
        assert_eq!(all.len(), 10);
        let set: HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 10);
        assert!(all.iter().all(|e| g.contains(e)));
        assert!(all[0].is_identity());
    }

    #[test]
    fn element_budget_refusal() {
        let g = PermGroup::symmetric(8).unwrap();
        let budget = Budget {
            enum_budget: 1000,
            ..Budget::default()
        };
        match g.elements(&budget) {
            Err(Error::Budget { required, .. }) => assert_eq!(required, 40320),
            _ => panic!("expected refusal"),
        }
    }

    #[test]
    fn stabilizer_of_full_set_is_group() {
        let g = group(&["(1,2,3)(4,5,6)", "(1,5)(2,6)"], 6);
        let full = SubsetMask::full(6).unwrap();
        let s = g.setwise_stabilizer(full, &Budget::default()).unwrap();
        assert!(s.same_group(&g));
    }

    #[test]
    fn backtrack_stabilizer_matches_filter() {
        // Force the backtrack path with a tiny enumeration budget.
        let g = group(&["(1,2,3,4,5,6,7,8)", "(1,2)"], 8);
        let x = SubsetMask::from_points(8, &[1, 2, 5]).unwrap();
        let small = Budget {
            enum_budget: 1,
            ..Budget::default()
        };
        let bt = g.setwise_stabilizer(x, &small).unwrap();
        let bf = g.setwise_stabilizer(x, &Budget::default()).unwrap();
        assert_eq!(bt.order(), 720);
        assert!(bt.same_group(&bf));
    }

    #[test]
    fn trivial_stabilizer_search() {
        let g = group(&["(1,2,3)(4,5,6)", "(1,5)(2,6)"], 6);
        let budget = Budget::default();
        for bits in 0..64u32 {
            let x = SubsetMask::new(6, bits).unwrap();
            let order = g.setwise_stabilizer(x, &budget).unwrap().order();
            assert_eq!(g.stabilizer_is_trivial(x, &budget).unwrap(), order == 1);
        }
        let x = SubsetMask::parse("[3,4,5,6]", 6).unwrap();
        assert!(g.stabilizer_is_trivial(x, &budget).unwrap());
    }

    #[test]
    fn randomized_order_agrees() {
        let g = group(
            &[
                "(1,10,4)(6,9,7)(8,12,13)",
                "(1,3,2)(4,9,5)(7,8,12)(10,13,11)",
            ],
            13,
        );
        for seed in 0..3 {
            assert_eq!(g.randomized_order(seed), 5616);
        }
    }
}
