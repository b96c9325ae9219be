//! Naive reference computations shared by the integration tests. Nothing
//! here calls into the library beyond converting inputs and outputs.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relkit::relation::{invariance_group_with, Engine};
use relkit::set_orbits::{is_regular_set, regular_set_sizes, subset_orbit};
use relkit::{Budget, PermGroup, Permutation, Relation, SubsetMask};

pub type Img = Vec<u8>;

pub fn imgs(p: &Permutation) -> Img {
    p.images().to_vec()
}

pub fn then(a: &Img, b: &Img) -> Img {
    a.iter().map(|&i| b[i as usize]).collect()
}

pub fn apply(p: &Img, mask: u32) -> u32 {
    (0..p.len())
        .filter(|&i| mask >> i & 1 == 1)
        .fold(0, |m, i| m | 1 << p[i])
}

/// All elements generated by `gens`, or `None` once more than `cap` appear.
pub fn naive_closure(gens: &[Img], n: usize, cap: usize) -> Option<HashSet<Img>> {
    let id: Img = (0..n as u8).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = then(&x, g);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    Some(seen)
}

pub fn naive_orbit(gens: &[Img], mask: u32) -> BTreeSet<u32> {
    let mut seen = BTreeSet::from([mask]);
    let mut stack = vec![mask];
    while let Some(m) = stack.pop() {
        for g in gens {
            let im = apply(g, m);
            if seen.insert(im) {
                stack.push(im);
            }
        }
    }
    seen
}

/// Heap's algorithm over all of `S_n`.
pub fn for_each_perm(n: usize, mut f: impl FnMut(&Img)) {
    let mut a: Img = (0..n as u8).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.gen_range(0..=i));
    }
    Permutation::from_images(&v).unwrap()
}

/// A random permutation of small order, so that generated groups stay small.
pub fn random_small_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    loop {
        let q = random_perm(rng, n).pow(rng.gen_range(1..4));
        if q.order() <= 6 || rng.gen_bool(0.2) {
            return q;
        }
    }
}

/// Random groups of order at most `cap` together with their element sets.
pub fn random_small_groups(seed: u64, count: usize, cap: usize) -> Vec<(PermGroup, HashSet<Img>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(3..=9);
        let k = rng.gen_range(1..=3);
        let gens: Vec<Permutation> = (0..k).map(|_| random_small_perm(&mut rng, n)).collect();
        let raw: Vec<Img> = gens.iter().map(imgs).collect();
        if let Some(elems) = naive_closure(&raw, n, cap) {
            out.push((PermGroup::new(&gens).unwrap(), elems));
        }
    }
    out
}

pub fn random_relation(rng: &mut ChaCha8Rng, n: usize) -> Relation {
    let edges = rng.gen_range(1..=12);
    let full = (1u32 << n) - 1;
    let masks: BTreeSet<u32> = (0..edges).map(|_| rng.gen_range(1..full)).collect();
    Relation::new(n, masks.into_iter().map(|m| SubsetMask::new(n, m).unwrap())).unwrap()
}

pub fn group_images(g: &PermGroup) -> Vec<Img> {
    g.generators().iter().map(imgs).collect()
}

/// Whether some `k`-subset has trivial stabilizer in the group with
/// elements `elems`.
pub fn has_regular_set(elems: &[Img], n: usize, k: usize) -> bool {
    (0..1u32 << n)
        .filter(|m| m.count_ones() as usize == k)
        .any(|m| elems.iter().filter(|e| apply(e, m) == m).take(2).count() == 1)
}

pub fn preserves(p: &Img, edges: &HashSet<u32>) -> bool {
    edges.iter().all(|&e| edges.contains(&apply(p, e)))
}

pub fn check_bsgs_orders() {
    let groups = random_small_groups(1, 100, 5000);
    let mut nontrivial = 0;
    for (g, elems) in &groups {
        assert_eq!(g.order(), elems.len() as u128, "{:?}", g.generators());
        for e in elems {
            let p = Permutation::from_images(&e.iter().map(|&x| x as usize).collect::<Vec<_>>())
                .unwrap();
            assert!(g.contains(&p));
        }
        if elems.len() > 100 {
            nontrivial += 1;
        }
    }
    assert!(nontrivial >= 10, "sample too tame: {nontrivial}");
}

pub fn check_orbit_stabilizer() {
    let b = Budget::default();
    let groups = random_small_groups(2, 50, 5000);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in 0..1000 {
        let (g, _) = &groups[t % groups.len()];
        let n = g.degree();
        let x = SubsetMask::new(n, rng.gen_range(0..1u32 << n)).unwrap();
        let raw: Vec<Img> = g.generators().iter().map(imgs).collect();
        let orbit = naive_orbit(&raw, x.bits());
        let lib: BTreeSet<u32> = subset_orbit(g, x).iter().map(|m| m.bits()).collect();
        assert_eq!(orbit, lib);
        let stab = g.setwise_stabilizer(x, &b).unwrap();
        assert_eq!(orbit.len() as u128 * stab.order(), g.order());
        assert_eq!(is_regular_set(g, x), stab.order() == 1);
    }
}

pub fn check_engine_agreement() {
    let b = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let n = rng.gen_range(3..=9);
        let r = random_relation(&mut rng, n);
        let a = invariance_group_with(&r, Engine::Scan, &b).unwrap();
        let c = invariance_group_with(&r, Engine::Refine, &b).unwrap();
        assert!(a.same_group(&c), "{:?}", r.edges());
        for p in a.generators() {
            assert!(r.is_preserved_by(p));
        }
    }
}

pub fn check_regular_sizes() {
    let b = Budget::default();
    for (g, elems) in random_small_groups(6, 60, 2000) {
        let n = g.degree();
        let mut naive = BTreeSet::new();
        for m in 0..1u32 << n {
            let fixed = elems.iter().filter(|e| apply(e, m) == m).count();
            if fixed == 1 {
                naive.insert(m.count_ones() as usize);
            }
        }
        let r = regular_set_sizes(&g, &b).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.sizes, naive);
        for k in &r.sizes {
            assert!(r.sizes.contains(&(n - k)));
        }
    }
}
