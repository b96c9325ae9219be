//! Decision procedures built on the group and relation layers: relation-group
//! status with certificates, orbit closure, the regular-set lemma premise,
//! subgroup enumeration for small groups and conjugacy inside `S_n`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::relation::{
    colored_invariance_group, invariance_group, is_defined_by, orbit_relation, Engine, Relation,
    SCAN_MAX_DEGREE,
};
use crate::set_orbits::{all_set_orbits, is_regular_set, SetOrbit};
use crate::subset::{MaskImager, SubsetMask};

/// Evidence that `G` is not a relation group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotRgCertificate {
    /// A single `g` outside `G` mapping every set-orbit onto itself, hence
    /// preserving every union of set-orbits.
    Uniform(Permutation),
    /// One extra permutation per union, unions listed in the decision's
    /// enumeration order over `orbits`.
    PerUnion {
        orbits: Vec<SubsetMask>,
        extras: Vec<Permutation>,
        assignment: Vec<u32>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RgStatus {
    /// `G = G(R)` for `R` the union of the orbits of these seeds.
    RelationGroup {
        seeds: Vec<SubsetMask>,
    },
    NotRelationGroup(NotRgCertificate),
    Unknown {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgVerdict {
    pub status: RgStatus,
    /// `None` when the closure was not computed.
    pub orbit_closed: Option<bool>,
}

/// Set-orbits other than those of the empty and the full set, ordered by
/// `(cardinality, representative)`.
pub fn nontrivial_orbits(g: &PermGroup, budget: &Budget) -> Result<Vec<SetOrbit>> {
    let full = crate::subset::full_mask(g.degree());
    let mut orbits: Vec<SetOrbit> = all_set_orbits(g, budget)?
        .into_iter()
        .filter(|o| o.representative.bits() != 0 && o.representative.bits() != full)
        .collect();
    orbits.sort_by_key(|o| (o.cardinality, o.representative.bits()));
    Ok(orbits)
}

/// The largest subgroup of `S_n` with the same orbits on subsets as `G`.
pub fn orbit_closure(g: &PermGroup, budget: &Budget) -> Result<PermGroup> {
    let n = g.degree();
    if n > SCAN_MAX_DEGREE && n > budget.max_degree_exact {
        return Err(Error::Budget {
            what: "orbit closure",
            required: n as u128,
            allowed: budget.max_degree_exact as u128,
            flag: "--max-degree-exact",
        });
    }
    let mut colors = vec![0u32; 1 << n];
    let mut next = 0u32;
    let ims: Vec<MaskImager> = g.generators().iter().map(MaskImager::new).collect();
    let mut edges = Vec::with_capacity(1 << n);
    for m in 1..(1u32 << n) {
        if colors[m as usize] != 0 {
            continue;
        }
        next += 1;
        colors[m as usize] = next;
        let mut stack = vec![m];
        while let Some(x) = stack.pop() {
            edges.push((x, next - 1));
            for im in &ims {
                let y = im.apply(x);
                if colors[y as usize] == 0 {
                    colors[y as usize] = next;
                    stack.push(y);
                }
            }
        }
    }
    colored_invariance_group(n, &edges, Engine::Auto, budget)
}

fn orbit_masks(g: &PermGroup, orbit: &SetOrbit) -> Vec<u32> {
    crate::set_orbits::subset_orbit(g, orbit.representative)
        .into_iter()
        .map(|x| x.bits())
        .collect()
}

/// Orbits (by index) that `h` maps onto themselves.
fn cover_mask(h: &Permutation, orbit_sets: &[HashSet<u32>], reps: &[u32]) -> Vec<bool> {
    orbit_sets
        .iter()
        .zip(reps)
        .map(|(set, &r)| {
            let im = h.apply_mask(r);
            set.contains(&im) && set.iter().all(|&x| set.contains(&h.apply_mask(x)))
        })
        .collect()
}

/// Combinations of `m` items by increasing size, lexicographic within a size.
struct Unions {
    m: usize,
    current: Vec<usize>,
    size: usize,
}

impl Unions {
    fn new(m: usize) -> Self {
        Self {
            m,
            current: Vec::new(),
            size: 0,
        }
    }
}

impl Iterator for Unions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.m == 0 {
            return None;
        }
        if self.current.is_empty() {
            if self.size >= self.m {
                return None;
            }
            self.size += 1;
            self.current = (0..self.size).collect();
            return Some(self.current.clone());
        }
        let k = self.size;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.m - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(self.current.clone());
            }
        }
        self.current.clear();
        self.next()
    }
}

const CHUNK: usize = 32;

/// Decides whether `G` is the invariance group of some relation, i.e. of some
/// union of its set-orbits.
///
/// When the orbit closure is strictly larger than `G`, any closure element
/// outside `G` is a uniform certificate. Otherwise unions are examined by
/// increasing number of orbits; the first union with `G(R) = G` is the
/// witness.
pub fn decide_relation_group(g: &PermGroup, budget: &Budget) -> Result<RgVerdict> {
    let orbits = nontrivial_orbits(g, budget)?;
    let closure = match orbit_closure(g, budget) {
        Ok(c) => c,
        Err(e) if e.is_budget() => {
            return Ok(RgVerdict {
                status: RgStatus::Unknown {
                    reason: e.to_string(),
                },
                orbit_closed: None,
            })
        }
        Err(e) => return Err(e),
    };
    if closure.order() > g.order() {
        let extra = closure
            .strong_generators()
            .into_iter()
            .find(|h| !g.contains(h))
            .expect("larger group has an element outside");
        return Ok(RgVerdict {
            status: RgStatus::NotRelationGroup(NotRgCertificate::Uniform(extra)),
            orbit_closed: Some(false),
        });
    }

    let members: Vec<Vec<u32>> = orbits.iter().map(|o| orbit_masks(g, o)).collect();
    let orbit_sets: Vec<HashSet<u32>> = members
        .iter()
        .map(|m| m.iter().copied().collect())
        .collect();
    let reps: Vec<u32> = orbits.iter().map(|o| o.representative.bits()).collect();
    let n = g.degree();

    let mut extras: Vec<Permutation> = Vec::new();
    let mut covers: Vec<Vec<bool>> = Vec::new();
    let mut assignment: Vec<u32> = Vec::new();
    let mut seen = 0u64;
    let mut unions = Unions::new(orbits.len());
    loop {
        let chunk: Vec<Vec<usize>> = unions.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        seen += chunk.len() as u64;
        if seen > budget.union_budget {
            return Ok(RgVerdict {
                status: RgStatus::Unknown {
                    reason: format!(
                        "more than {} unions of set-orbits (raise --union-budget)",
                        budget.union_budget
                    ),
                },
                orbit_closed: Some(true),
            });
        }
        let covered_at_start = |u: &Vec<usize>| covers.iter().any(|c| u.iter().all(|&i| c[i]));
        let results: Vec<Option<Result<PermGroup>>> = chunk
            .par_iter()
            .map(|u| {
                if covered_at_start(u) {
                    return None;
                }
                let r = Relation::new(
                    n,
                    u.iter()
                        .flat_map(|&i| members[i].iter())
                        .map(|&b| SubsetMask::from_bits_unchecked(n, b)),
                )
                .expect("degree checked");
                Some(invariance_group(&r, budget))
            })
            .collect();
        for (u, res) in chunk.iter().zip(results) {
            if let Some(k) = covers.iter().position(|c| u.iter().all(|&i| c[i])) {
                assignment.push(k as u32);
                continue;
            }
            let a = match res.expect("uncovered unions are computed") {
                Ok(a) => a,
                Err(e) if e.is_budget() => {
                    return Ok(RgVerdict {
                        status: RgStatus::Unknown {
                            reason: e.to_string(),
                        },
                        orbit_closed: Some(true),
                    })
                }
                Err(e) => return Err(e),
            };
            if a.order() == g.order() {
                return Ok(RgVerdict {
                    status: RgStatus::RelationGroup {
                        seeds: u.iter().map(|&i| orbits[i].representative).collect(),
                    },
                    orbit_closed: Some(true),
                });
            }
            let h = a
                .strong_generators()
                .into_iter()
                .find(|h| !g.contains(h))
                .expect("larger group has an element outside");
            covers.push(cover_mask(&h, &orbit_sets, &reps));
            extras.push(h);
            assignment.push(extras.len() as u32 - 1);
        }
    }
    Ok(RgVerdict {
        status: RgStatus::NotRelationGroup(NotRgCertificate::PerUnion {
            orbits: orbits.iter().map(|o| o.representative).collect(),
            extras,
            assignment,
        }),
        orbit_closed: Some(true),
    })
}

/// Re-checks a non-relation-group certificate from scratch: every extra lies
/// outside `G` and preserves the unions it is assigned to.
pub fn replay_certificate(g: &PermGroup, cert: &NotRgCertificate) -> bool {
    match cert {
        NotRgCertificate::Uniform(h) => {
            if g.contains(h) {
                return false;
            }
            let budget = Budget::default();
            let Ok(orbits) = nontrivial_orbits(g, &budget) else {
                return false;
            };
            orbits.iter().all(|o| {
                let orbit = crate::set_orbits::subset_orbit(g, o.representative);
                let rel = Relation::new(g.degree(), orbit).expect("same degree");
                rel.is_preserved_by(h)
            })
        }
        NotRgCertificate::PerUnion {
            orbits,
            extras,
            assignment,
        } => {
            if extras.iter().any(|h| g.contains(h)) {
                return false;
            }
            let members: Vec<Vec<SubsetMask>> = orbits
                .iter()
                .map(|&x| crate::set_orbits::subset_orbit(g, x))
                .collect();
            let total = (1u128 << orbits.len()) - 1;
            if assignment.len() as u128 != total {
                return false;
            }
            Unions::new(orbits.len()).zip(assignment).all(|(u, &k)| {
                let rel = Relation::new(
                    g.degree(),
                    u.iter().flat_map(|&i| members[i].iter().copied()),
                )
                .expect("same degree");
                rel.is_preserved_by(&extras[k as usize])
            })
        }
    }
}

/// Premise (i) of the regular-set lemma: `y` is regular in `H`, the seeds
/// (with `context`) define `H`, and `|y|` is not an edge size of that
/// relation.
pub fn check_regular_set_premise(
    h: &PermGroup,
    seeds: &[SubsetMask],
    context: &Relation,
    y: SubsetMask,
    budget: &Budget,
) -> Result<bool> {
    if !is_regular_set(h, y) {
        return Ok(false);
    }
    let r = orbit_relation(h, seeds)?.union(context)?;
    if r.arity().contains(&y.len()) {
        return Ok(false);
    }
    is_defined_by(h, seeds, context, budget)
}

/// Largest group order accepted by [`enumerate_subgroups`].
pub const SUBGROUP_ORDER_LIMIT: u128 = 2000;

/// All subgroups of `G` (as sets, not up to conjugacy), ordered by order and
/// then by element fingerprint.
pub fn enumerate_subgroups(g: &PermGroup, max_order: u128) -> Result<Vec<PermGroup>> {
    let limit = max_order.min(SUBGROUP_ORDER_LIMIT);
    if g.order() > limit {
        return Err(Error::Budget {
            what: "subgroup enumeration",
            required: g.order(),
            allowed: limit,
            flag: "--enum-budget",
        });
    }
    let elems: Vec<Permutation> = g.elements(&Budget::default())?.collect();
    let index: HashMap<Permutation, usize> =
        elems.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let m = elems.len();
    let mul: Vec<u16> = elems
        .iter()
        .flat_map(|a| {
            elems
                .iter()
                .map(|b| index[&a.then(b)] as u16)
                .collect::<Vec<_>>()
        })
        .collect();
    let words = m.div_ceil(64);
    let closure = |gens: &[usize]| -> Vec<u64> {
        let mut bits = vec![0u64; words];
        bits[0] |= 1;
        let mut queue = vec![0usize];
        while let Some(x) = queue.pop() {
            for &s in gens {
                let y = mul[x * m + s] as usize;
                if bits[y / 64] >> (y % 64) & 1 == 0 {
                    bits[y / 64] |= 1 << (y % 64);
                    queue.push(y);
                }
            }
        }
        bits
    };
    let has = |bits: &[u64], i: usize| bits[i / 64] >> (i % 64) & 1 != 0;

    let mut found: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    let mut cyclic: Vec<(Vec<u64>, usize)> = Vec::new();
    for i in 0..m {
        let bits = closure(&[i]);
        if !found.contains_key(&bits) {
            found.insert(bits.clone(), if i == 0 { vec![] } else { vec![i] });
            cyclic.push((bits, i));
        }
    }
    let mut frontier: Vec<Vec<u64>> = found.keys().cloned().collect();
    frontier.sort();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for sub in &frontier {
            let gens = found[sub].clone();
            for (_, c) in &cyclic {
                if has(sub, *c) {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(*c);
                let bits = closure(&g2);
                if !found.contains_key(&bits) {
                    found.insert(bits.clone(), g2);
                    next.push(bits);
                }
            }
        }
        next.sort();
        frontier = next;
    }
    let mut subs: Vec<(u32, Vec<u64>, Vec<usize>)> = found
        .into_iter()
        .map(|(bits, gens)| (bits.iter().map(|w| w.count_ones()).sum(), bits, gens))
        .collect();
    subs.sort();
    subs.into_iter()
        .map(|(_, _, gens)| {
            if gens.is_empty() {
                PermGroup::trivial(g.degree())
            } else {
                PermGroup::new(&gens.iter().map(|&i| elems[i]).collect::<Vec<_>>())
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjugacy {
    /// `c` with `c^-1 G c = H`.
    Conjugate(Permutation),
    NotConjugate,
    Unknown(String),
}

fn maps_into(g: &PermGroup, h: &PermGroup, c: &Permutation) -> bool {
    g.generators()
        .iter()
        .all(|x| h.contains(&x.conjugate_by(c)))
}

/// Searches `S_n` for `c` with `G^c = H`. Exhaustive over `S_n` for `n <= 9`;
/// beyond that, conjugators are enumerated from the cycle structure of one
/// element of `G` with small centralizer.
pub fn conjugate_in_sym(g: &PermGroup, h: &PermGroup, budget: &Budget) -> Conjugacy {
    if g.degree() != h.degree() || g.order() != h.order() {
        return Conjugacy::NotConjugate;
    }
    let n = g.degree();
    if g.same_group(h) {
        return Conjugacy::Conjugate(g.identity());
    }
    if n <= SCAN_MAX_DEGREE {
        let found = (0..n).into_par_iter().find_map_first(|first| {
            let mut img = vec![usize::MAX; n];
            img[0] = first;
            brute_conjugator(g, h, &mut img, 1, 1 << first)
        });
        return match found {
            Some(c) => Conjugacy::Conjugate(c),
            None => Conjugacy::NotConjugate,
        };
    }
    cycle_type_conjugator(g, h, budget)
}

fn brute_conjugator(
    g: &PermGroup,
    h: &PermGroup,
    img: &mut Vec<usize>,
    depth: usize,
    used: u32,
) -> Option<Permutation> {
    let n = img.len();
    if depth == n {
        let c = Permutation::from_images(img).expect("bijection");
        return maps_into(g, h, &c).then_some(c);
    }
    for a in 0..n {
        if used >> a & 1 == 0 {
            img[depth] = a;
            if let Some(c) = brute_conjugator(g, h, img, depth + 1, used | 1 << a) {
                return Some(c);
            }
        }
    }
    None
}

/// Looks for `c` in `S_n` with `H` preserving `R^c`, so that `H` lies in a
/// conjugate of `G(R)`. Exhaustive, and only for `n <= 9`; `None` above that
/// or when no such `c` exists.
pub fn embed_into_invariance(h: &PermGroup, r: &Relation) -> Option<(Permutation, Relation)> {
    let n = h.degree();
    if n != r.degree() || n > SCAN_MAX_DEGREE {
        return None;
    }
    let preserved = |rel: &Relation| h.generators().iter().all(|x| rel.is_preserved_by(x));
    if preserved(r) {
        return Some((h.identity(), r.clone()));
    }
    (0..n).into_par_iter().find_map_first(|first| {
        let mut img = vec![usize::MAX; n];
        img[0] = first;
        embed_dfs(&mut img, 1, 1 << first, &|c| {
            let image = r.image(c);
            preserved(&image).then_some((*c, image))
        })
    })
}

fn embed_dfs<T>(
    img: &mut Vec<usize>,
    depth: usize,
    used: u32,
    test: &dyn Fn(&Permutation) -> Option<T>,
) -> Option<T> {
    let n = img.len();
    if depth == n {
        return test(&Permutation::from_images(img).expect("bijection"));
    }
    for a in 0..n {
        if used >> a & 1 == 0 {
            img[depth] = a;
            if let Some(t) = embed_dfs(img, depth + 1, used | 1 << a, test) {
                return Some(t);
            }
        }
    }
    None
}

fn centralizer_order(cycle_type: &[usize]) -> u128 {
    let mut counts: HashMap<usize, u32> = HashMap::new();
    for &k in cycle_type {
        *counts.entry(k).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(k, m)| (k as u128).pow(m) * (1..=m as u128).product::<u128>())
        .product()
}

/// Cycles including fixed points, sorted by (length, smallest point).
fn full_cycles(p: &Permutation) -> Vec<Vec<usize>> {
    let n = p.degree();
    let mut seen = 0u32;
    let mut out = Vec::new();
    for s in 0..n {
        if seen >> s & 1 != 0 {
            continue;
        }
        let mut c = vec![s];
        seen |= 1 << s;
        let mut x = p.image(s);
        while x != s {
            c.push(x);
            seen |= 1 << x;
            x = p.image(x);
        }
        out.push(c);
    }
    out.sort_by_key(|c| (c.len(), c[0]));
    out
}

fn cycle_type_conjugator(g: &PermGroup, h: &PermGroup, budget: &Budget) -> Conjugacy {
    let enum_ok = g.order() <= budget.enum_budget as u128;
    if !enum_ok {
        return Conjugacy::Unknown(format!(
            "group order {} exceeds --enum-budget {}",
            g.order(),
            budget.enum_budget
        ));
    }
    // Element of G with the smallest centralizer in S_n.
    let t = g
        .elements(budget)
        .expect("order checked")
        .filter(|x| !x.is_identity())
        .min_by_key(|x| {
            (
                centralizer_order(&full_cycles(x).iter().map(|c| c.len()).collect::<Vec<_>>()),
                *x,
            )
        })
        .unwrap_or_else(|| g.identity());
    let t_cycles = full_cycles(&t);
    let t_type: Vec<usize> = t_cycles.iter().map(|c| c.len()).collect();
    let per_target = centralizer_order(&t_type);
    let mut work = 0u128;
    for x in h.elements(budget).expect("equal orders") {
        let x_cycles = full_cycles(&x);
        if x_cycles.iter().map(|c| c.len()).ne(t_type.iter().copied()) {
            continue;
        }
        work += per_target;
        if work > budget.node_budget as u128 {
            return Conjugacy::Unknown(format!(
                "more than {} candidate conjugators (raise --node-budget)",
                budget.node_budget
            ));
        }
        let mut img = vec![usize::MAX; g.degree()];
        let mut used = vec![false; x_cycles.len()];
        if let Some(c) = match_cycles(g, h, &t_cycles, &x_cycles, 0, &mut used, &mut img) {
            return Conjugacy::Conjugate(c);
        }
    }
    Conjugacy::NotConjugate
}

/// Assigns the cycles of `t` (from index `k`) to unused cycles of `x` of
/// the same length, with every rotation, and tests each complete map.
fn match_cycles(
    g: &PermGroup,
    h: &PermGroup,
    t: &[Vec<usize>],
    x: &[Vec<usize>],
    k: usize,
    used: &mut [bool],
    img: &mut Vec<usize>,
) -> Option<Permutation> {
    if k == t.len() {
        let c = Permutation::from_images(img).expect("cycle matching is a bijection");
        return maps_into(g, h, &c).then_some(c);
    }
    let len = t[k].len();
    for j in 0..x.len() {
        if used[j] || x[j].len() != len {
            continue;
        }
        used[j] = true;
        for rot in 0..len {
            for (i, &p) in t[k].iter().enumerate() {
                img[p] = x[j][(i + rot) % len];
            }
            if let Some(c) = match_cycles(g, h, t, x, k + 1, used, img) {
                return Some(c);
            }
        }
        used[j] = false;
    }
    None
}

/// Builds `G` from the generators and returns whether it equals `closure`;
/// convenience for reports.
pub fn is_orbit_closed(g: &PermGroup, budget: &Budget) -> Result<bool> {
    Ok(orbit_closure(g, budget)?.order() == g.order())
}
