//! Orbits of a group on the power set of its domain, regular sets and
//! set-transitivity.

use std::collections::{BTreeSet, HashSet};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::subset::{MaskImager, SubsetMask};

/// One orbit of `G` on subsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SetOrbit {
    /// Numerically smallest member.
    pub representative: SubsetMask,
    pub size: u64,
    pub cardinality: usize,
}

/// Regular-set sizes found for a group. When `exhaustive` is false the set
/// is only a lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularSizes {
    pub sizes: BTreeSet<usize>,
    pub exhaustive: bool,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1u128;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

fn imagers(g: &PermGroup) -> Vec<MaskImager> {
    let mut seen = HashSet::new();
    g.generators()
        .iter()
        .filter(|p| !p.is_identity() && seen.insert(**p))
        .map(MaskImager::new)
        .collect()
}

/// The orbit `x^G`, sorted by mask value.
pub fn subset_orbit(g: &PermGroup, x: SubsetMask) -> Vec<SubsetMask> {
    assert_eq!(g.degree(), x.degree(), "degree mismatch");
    let ims = imagers(g);
    let mut seen = HashSet::new();
    seen.insert(x.bits());
    let mut queue = vec![x.bits()];
    let mut k = 0;
    while k < queue.len() {
        let m = queue[k];
        for im in &ims {
            let y = im.apply(m);
            if seen.insert(y) {
                queue.push(y);
            }
        }
        k += 1;
    }
    queue.sort_unstable();
    queue
        .into_iter()
        .map(|b| SubsetMask::from_bits_unchecked(g.degree(), b))
        .collect()
}

fn check_scan(g: &PermGroup, budget: &Budget) -> Result<()> {
    let required = 1u128 << g.degree();
    if required > budget.scan_budget as u128 {
        return Err(Error::Budget {
            what: "power-set scan",
            required,
            allowed: budget.scan_budget as u128,
            flag: "--scan-budget",
        });
    }
    Ok(())
}

/// Walks every orbit on `P(Omega)` once, in increasing order of the smallest
/// member, calling `f(representative_bits, orbit_size)`.
fn scan_orbits(g: &PermGroup, mut f: impl FnMut(u32, u64)) {
    let n = g.degree();
    let total = 1u64 << n;
    let ims = imagers(g);
    let mut visited = vec![0u64; total.div_ceil(64) as usize];
    let mut stack: Vec<u32> = Vec::new();
    for m in 0..total {
        let m = m as u32;
        let (w, b) = ((m >> 6) as usize, m & 63);
        if visited[w] >> b & 1 != 0 {
            continue;
        }
        visited[w] |= 1 << b;
        stack.push(m);
        let mut size = 0u64;
        while let Some(x) = stack.pop() {
            size += 1;
            for im in &ims {
                let y = im.apply(x);
                let (w, b) = ((y >> 6) as usize, y & 63);
                if visited[w] >> b & 1 == 0 {
                    visited[w] |= 1 << b;
                    stack.push(y);
                }
            }
        }
        f(m, size);
    }
}

/// Partition of all `2^n` subsets into orbits, listed by representative.
pub fn all_set_orbits(g: &PermGroup, budget: &Budget) -> Result<Vec<SetOrbit>> {
    check_scan(g, budget)?;
    let n = g.degree();
    let mut out = Vec::new();
    scan_orbits(g, |rep, size| {
        out.push(SetOrbit {
            representative: SubsetMask::from_bits_unchecked(n, rep),
            size,
            cardinality: rep.count_ones() as usize,
        })
    });
    Ok(out)
}

/// True iff exactly `n` orbits on nonempty subsets.
pub fn is_set_transitive(g: &PermGroup, budget: &Budget) -> Result<bool> {
    check_scan(g, budget)?;
    let mut count = 0usize;
    scan_orbits(g, |rep, _| {
        if rep != 0 {
            count += 1;
        }
    });
    Ok(count == g.degree())
}

/// Regularity with an explicit node allowance for large groups. `None` when
/// the allowance ran out.
fn regular_within(g: &PermGroup, x: SubsetMask, nodes: u64) -> Option<bool> {
    if binomial(g.degree(), x.len()) < g.order() {
        return Some(false);
    }
    if g.order() <= 4096 {
        return Some(subset_orbit(g, x).len() as u128 == g.order());
    }
    let budget = Budget {
        node_budget: nodes,
        ..Budget::default()
    };
    g.stabilizer_is_trivial(x, &budget).ok()
}

/// Whether `G_x` is trivial, i.e. `|x^G| = |G|`.
pub fn is_regular_set(g: &PermGroup, x: SubsetMask) -> bool {
    assert_eq!(g.degree(), x.degree(), "degree mismatch");
    if binomial(g.degree(), x.len()) < g.order() {
        return false;
    }
    if g.order() <= 1 << 16 {
        return subset_orbit(g, x).len() as u128 == g.order();
    }
    regular_within(g, x, u64::MAX).expect("unbounded search")
}

/// Cost of the exhaustive regular-set scan: `2^n` times the generator count.
pub fn exhaustive_cost(g: &PermGroup) -> u128 {
    (1u128 << g.degree()) * imagers(g).len().max(1) as u128
}

/// Sizes of regular sets. Exhaustive when [`exhaustive_cost`] fits in
/// `budget.regset_budget` (and the scan budget); otherwise a seeded search
/// whose result is a subset of the true answer.
pub fn regular_set_sizes(g: &PermGroup, budget: &Budget) -> Result<RegularSizes> {
    let n = g.degree();
    if exhaustive_cost(g) <= budget.regset_budget as u128 && check_scan(g, budget).is_ok() {
        let order = g.order();
        let mut sizes = BTreeSet::new();
        scan_orbits(g, |rep, size| {
            if size as u128 == order {
                sizes.insert(rep.count_ones() as usize);
            }
        });
        return Ok(RegularSizes {
            sizes,
            exhaustive: true,
        });
    }
    let mut sizes = BTreeSet::new();
    let mut work = budget.heuristic_work;
    for k in 0..=n / 2 {
        if let Some(x) = search_regular(g, k, budget, &mut work) {
            sizes.insert(x.len());
            sizes.insert(n - x.len());
        }
    }
    Ok(RegularSizes {
        sizes,
        exhaustive: false,
    })
}

/// Looks for a regular set of cardinality `k` with the seeded search used by
/// [`regular_set_sizes`]. Returns the first one found.
pub fn find_regular_set(g: &PermGroup, k: usize, budget: &Budget) -> Option<SubsetMask> {
    let mut work = budget.heuristic_work;
    search_regular(g, k, budget, &mut work)
}

const CHECK_NODES: u64 = 50_000;

fn search_regular(g: &PermGroup, k: usize, budget: &Budget, work: &mut u64) -> Option<SubsetMask> {
    let n = g.degree();
    if k > n || binomial(n, k) < g.order() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7265_6773 ^ (n as u64) << 8 ^ k as u64);
    let random_set = |rng: &mut ChaCha8Rng| {
        let bits = sample(rng, n, k).iter().fold(0u32, |m, p| m | 1 << p);
        SubsetMask::from_bits_unchecked(n, bits)
    };
    let mut tries = 0u64;
    while tries < budget.heuristic_tries && *work > 0 {
        tries += 1;
        let x = random_set(&mut rng);
        *work = work.saturating_sub(CHECK_NODES.min(g.order() as u64));
        if regular_within(g, x, CHECK_NODES) == Some(true) {
            return Some(x);
        }
    }
    if k == 0 || k == n {
        return None;
    }
    // Hill climbing on the stabilizer order with swap moves.
    let stab_budget = Budget {
        node_budget: CHECK_NODES,
        enum_budget: 0,
        ..*budget
    };
    let mut x = random_set(&mut rng);
    let mut best = g.setwise_stabilizer(x, &stab_budget).ok()?.order();
    while *work > 0 {
        if best == 1 {
            return Some(x);
        }
        *work = work.saturating_sub(CHECK_NODES);
        let inside: Vec<usize> = x.points().collect();
        let outside: Vec<usize> = x.complement().points().collect();
        let a = inside[rng.gen_range(0..inside.len())];
        let b = outside[rng.gen_range(0..outside.len())];
        let y = SubsetMask::from_bits_unchecked(n, x.bits() ^ (1 << a) ^ (1 << b));
        let Ok(s) = g.setwise_stabilizer(y, &stab_budget) else {
            continue;
        };
        if s.order() <= best {
            best = s.order();
            x = y;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn group(gens: &[&str], n: usize) -> PermGroup {
        let gens: Vec<_> = gens
            .iter()
            .map(|s| Permutation::parse_cycles(s, n).unwrap())
            .collect();
        PermGroup::new(&gens).unwrap()
    }

    #[test]
    fn trivial_orbits() {
        let g = PermGroup::cyclic(5).unwrap();
        assert_eq!(subset_orbit(&g, SubsetMask::empty(5).unwrap()).len(), 1);
        assert_eq!(subset_orbit(&g, SubsetMask::full(5).unwrap()).len(), 1);
    }

    #[test]
    fn symmetric_is_set_transitive() {
        let b = Budget::default();
        assert_eq!(
            all_set_orbits(&PermGroup::symmetric(3).unwrap(), &b)
                .unwrap()
                .len(),
            4
        );
        for n in 1..=10 {
            assert!(is_set_transitive(&PermGroup::symmetric(n).unwrap(), &b).unwrap());
        }
    }

    #[test]
    fn cyclic_five() {
        let g = PermGroup::cyclic(5).unwrap();
        let b = Budget::default();
        let orbits = all_set_orbits(&g, &b).unwrap();
        assert_eq!(orbits.len(), 8);
        assert_eq!(orbits.iter().filter(|o| o.size == 5).count(), 6);
        assert!(!is_set_transitive(&g, &b).unwrap());
        // C5 acts regularly on points, so every proper nonempty subset is regular.
        for bits in 0..32u32 {
            let x = SubsetMask::new(5, bits).unwrap();
            assert_eq!(is_regular_set(&g, x), bits != 0 && bits != 31);
        }
        let sizes = regular_set_sizes(&g, &b).unwrap();
        assert!(sizes.exhaustive);
        assert_eq!(sizes.sizes, BTreeSet::from([1, 2, 3, 4]));
    }

    #[test]
    fn g61_regular_set() {
        let g = group(&["(1,2,3)(4,5,6)", "(1,5)(2,6)"], 6);
        let x = SubsetMask::parse("[3,4,5,6]", 6).unwrap();
        assert!(is_regular_set(&g, x));
        assert!(is_regular_set(&g, x.complement()));
    }

    #[test]
    fn scan_refuses_over_budget() {
        let g = PermGroup::cyclic(12).unwrap();
        let b = Budget {
            scan_budget: 1 << 10,
            ..Budget::default()
        };
        assert!(all_set_orbits(&g, &b).unwrap_err().is_budget());
    }

    #[test]
    fn heuristic_finds_subset_of_exhaustive() {
        let g = group(&["(1,2,3,4,5,6,7,8,9,10,11)", "(1,2)"], 11);
        let g = g
            .setwise_stabilizer(
                SubsetMask::parse("[1,2,3]", 11).unwrap(),
                &Budget::default(),
            )
            .unwrap();
        let exact = regular_set_sizes(&g, &Budget::default()).unwrap();
        assert!(exact.exhaustive);
        let tight = Budget {
            regset_budget: 0,
            ..Budget::default()
        };
        let found = regular_set_sizes(&g, &tight).unwrap();
        assert!(!found.exhaustive);
        assert!(found.sizes.is_subset(&exact.sizes));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(24, 12), 2704156);
        assert_eq!(binomial(3, 4), 0);
    }
}
