//! Catalog verification and its text and JSONL renderings.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::catalog::{Catalog, CatalogEntry, ClaimKind, SizeSpec};
use crate::certify::{
    check_regular_set_premise, conjugate_in_sym, decide_relation_group, embed_into_invariance,
    enumerate_subgroups, replay_certificate, Conjugacy, NotRgCertificate, RgStatus, RgVerdict,
    SUBGROUP_ORDER_LIMIT,
};
use crate::group::PermGroup;
use crate::relation::{invariance_group, orbit_relation, Relation, SCAN_MAX_DEGREE};
use crate::set_orbits::{
    all_set_orbits, exhaustive_cost, find_regular_set, is_regular_set, is_set_transitive,
    regular_set_sizes, RegularSizes,
};
use crate::subset::SubsetMask;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    /// Carries the computed value that contradicts the claim.
    Refuted(String),
    Unknown(String),
    /// Accepted without computation; the reason says what was not checked.
    Trusted(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Refuted(_) => "refuted",
            Verdict::Unknown(_) => "unknown",
            Verdict::Trusted(_) => "trusted",
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Verdict::Confirmed => None,
            Verdict::Refuted(r) | Verdict::Unknown(r) | Verdict::Trusted(r) => Some(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimReport {
    pub id: String,
    pub degree: usize,
    pub claim: String,
    pub source: String,
    pub suspect: bool,
    pub verdict: Verdict,
    /// Witnesses and computed values backing a confirmation.
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub budget: Budget,
    pub degrees: Option<RangeInclusive<usize>>,
    pub id_pattern: Option<glob::Pattern>,
    /// Record per-claim wall time. Off by default so reports are reproducible.
    pub timings: bool,
}

impl VerifyOptions {
    pub fn selects(&self, e: &CatalogEntry) -> bool {
        self.degrees.as_ref().is_none_or(|r| r.contains(&e.degree))
            && self.id_pattern.as_ref().is_none_or(|p| p.matches(&e.id))
    }
}

#[derive(Clone, Debug)]
struct Outcome {
    verdict: Verdict,
    detail: String,
    relation: Option<Relation>,
    elapsed_ms: f64,
}

impl Outcome {
    fn new(verdict: Verdict, detail: impl Into<String>) -> Self {
        Self {
            verdict,
            detail: detail.into(),
            relation: None,
            elapsed_ms: 0.0,
        }
    }
}

fn confirmed(detail: impl Into<String>) -> Outcome {
    Outcome::new(Verdict::Confirmed, detail)
}
fn refuted(why: impl Into<String>) -> Outcome {
    Outcome::new(Verdict::Refuted(why.into()), "")
}
fn unknown(why: impl Into<String>) -> Outcome {
    Outcome::new(Verdict::Unknown(why.into()), "")
}
fn trusted(why: impl Into<String>) -> Outcome {
    Outcome::new(Verdict::Trusted(why.into()), "")
}

type Cached<T> = OnceLock<std::result::Result<T, String>>;

/// Checks catalog claims. Entries are processed in waves ordered by the
/// depth of their `defined-in` chains, so a context relation is always
/// resolved before the entries that use it.
pub struct Verifier<'a> {
    catalog: &'a Catalog,
    budget: Budget,
    groups: Vec<std::result::Result<Option<PermGroup>, String>>,
    outcomes: Vec<Vec<OnceLock<Outcome>>>,
    relations: Vec<Cached<Relation>>,
    regular: Vec<Cached<RegularSizes>>,
    rg: Vec<Cached<RgVerdict>>,
}

impl<'a> Verifier<'a> {
    pub fn new(catalog: &'a Catalog, budget: Budget) -> Self {
        let n = catalog.entries.len();
        let groups = catalog
            .entries
            .par_iter()
            .map(|e| e.group().map_err(|err| err.to_string()))
            .collect();
        Self {
            catalog,
            budget,
            groups,
            outcomes: catalog
                .entries
                .iter()
                .map(|e| e.claims.iter().map(|_| OnceLock::new()).collect())
                .collect(),
            relations: (0..n).map(|_| OnceLock::new()).collect(),
            regular: (0..n).map(|_| OnceLock::new()).collect(),
            rg: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Verifies every claim of the selected entries, in catalog order.
    pub fn run(&self, opts: &VerifyOptions) -> Vec<ClaimReport> {
        let entries = &self.catalog.entries;
        let selected: Vec<usize> = (0..entries.len())
            .filter(|&i| opts.selects(&entries[i]))
            .collect();

        // Contexts needed by the selection, transitively.
        let mut needed_ctx = vec![false; entries.len()];
        let mut stack: Vec<usize> = selected.clone();
        while let Some(i) = stack.pop() {
            for ctx in entries[i].contexts() {
                let j = self.catalog.position(ctx).expect("validated");
                if !needed_ctx[j] {
                    needed_ctx[j] = true;
                    stack.push(j);
                }
            }
        }
        let depths = self.depths();
        let mut work: Vec<usize> = (0..entries.len())
            .filter(|&i| needed_ctx[i] || opts.selects(&entries[i]))
            .collect();
        work.sort_by_key(|&i| (depths[i], i));

        let mut start = 0;
        while start < work.len() {
            let d = depths[work[start]];
            let end = work[start..]
                .iter()
                .position(|&i| depths[i] != d)
                .map_or(work.len(), |p| start + p);
            work[start..end].par_iter().for_each(|&i| {
                if opts.selects(&entries[i]) {
                    for j in 0..entries[i].claims.len() {
                        self.outcome(i, j);
                    }
                }
                if needed_ctx[i] {
                    let _ = self.relation(i);
                }
            });
            start = end;
        }

        let mut reports = Vec::new();
        for i in selected {
            let e = &entries[i];
            for (j, c) in e.claims.iter().enumerate() {
                let o = self.outcome(i, j);
                reports.push(ClaimReport {
                    id: e.id.clone(),
                    degree: e.degree,
                    claim: c.to_string(),
                    source: c.source.clone(),
                    suspect: e.suspect,
                    verdict: o.verdict.clone(),
                    detail: o.detail.clone(),
                    elapsed_ms: opts.timings.then_some(o.elapsed_ms),
                });
            }
        }
        reports
    }

    /// Length of the longest `defined-in` chain below each entry.
    fn depths(&self) -> Vec<usize> {
        fn go(i: usize, cat: &Catalog, memo: &mut [Option<usize>]) -> usize {
            if let Some(d) = memo[i] {
                return d;
            }
            let d = cat.entries[i]
                .contexts()
                .iter()
                .map(|c| 1 + go(cat.position(c).expect("validated"), cat, memo))
                .max()
                .unwrap_or(0);
            memo[i] = Some(d);
            d
        }
        let mut memo = vec![None; self.catalog.entries.len()];
        (0..memo.len())
            .map(|i| go(i, self.catalog, &mut memo))
            .collect()
    }

    fn group(&self, i: usize) -> std::result::Result<&PermGroup, String> {
        match &self.groups[i] {
            Ok(Some(g)) => Ok(g),
            Ok(None) => Err(format!("{} has no generators", self.catalog.entries[i].id)),
            Err(e) => Err(e.clone()),
        }
    }

    fn group_by_id(&self, id: &str) -> std::result::Result<&PermGroup, String> {
        let i = self
            .catalog
            .position(id)
            .ok_or_else(|| format!("unknown entry {id}"))?;
        self.group(i)
    }

    fn regular(&self, i: usize) -> std::result::Result<&RegularSizes, String> {
        self.regular[i]
            .get_or_init(|| {
                let g = self.group(i)?;
                regular_set_sizes(g, &self.budget).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn rg(&self, i: usize) -> std::result::Result<&RgVerdict, String> {
        self.rg[i]
            .get_or_init(|| {
                let g = self.group(i)?;
                decide_relation_group(g, &self.budget).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// A relation defining entry `i`: the one witnessed by its first
    /// confirmed defining claim, or else the relation-group witness.
    fn relation(&self, i: usize) -> std::result::Result<&Relation, String> {
        self.relations[i]
            .get_or_init(|| {
                let e = &self.catalog.entries[i];
                for (j, c) in e.claims.iter().enumerate() {
                    if is_defining(&c.kind) {
                        if let Some(r) = &self.outcome(i, j).relation {
                            return Ok(r.clone());
                        }
                    }
                }
                let g = self.group(i)?;
                match &self.rg(i)?.status {
                    RgStatus::RelationGroup { seeds } => {
                        orbit_relation(g, seeds).map_err(|e| e.to_string())
                    }
                    RgStatus::NotRelationGroup(_) => {
                        Err(format!("{} is not a relation group", e.id))
                    }
                    RgStatus::Unknown { reason } => Err(reason.clone()),
                }
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// The context relation of `ctx`, moved by a conjugation when entry `i`
    /// lies in a conjugate of `ctx` rather than in `ctx` itself.
    fn context_for(&self, i: usize, ctx: &str) -> std::result::Result<(Relation, String), String> {
        let j = self
            .catalog
            .position(ctx)
            .ok_or_else(|| format!("unknown entry {ctx}"))?;
        let r = self
            .relation(j)
            .map_err(|e| format!("no defining relation for context {ctx}: {e}"))?;
        let g = self.group(i)?;
        if g.generators().iter().all(|x| r.is_preserved_by(x)) {
            return Ok((r.clone(), String::new()));
        }
        if g.degree() > SCAN_MAX_DEGREE {
            return Err(format!(
                "{} does not preserve the relation defining {ctx}; conjugate embedding is only searched up to degree {SCAN_MAX_DEGREE}",
                self.catalog.entries[i].id
            ));
        }
        match embed_into_invariance(g, r) {
            Some((c, image)) => Ok((image, format!("context {ctx} conjugated by {c}; "))),
            None => Err(format!(
                "{} lies in no conjugate of the group defined by the {ctx} relation",
                self.catalog.entries[i].id
            )),
        }
    }

    fn outcome(&self, i: usize, j: usize) -> &Outcome {
        self.outcomes[i][j].get_or_init(|| {
            let t = Instant::now();
            let mut o = self.evaluate(i, j);
            o.elapsed_ms = t.elapsed().as_secs_f64() * 1e3;
            o
        })
    }

    fn evaluate(&self, i: usize, j: usize) -> Outcome {
        let e = &self.catalog.entries[i];
        let kind = &e.claims[j].kind;
        let g = match self.group(i) {
            Ok(g) => g,
            Err(err) => return unknown(err),
        };
        let n = e.degree;
        let exact = n <= self.budget.max_degree_exact;
        let beyond = || {
            trusted(format!(
                "invariance groups at degree {n} exceed --max-degree-exact {}",
                self.budget.max_degree_exact
            ))
        };
        match kind {
            ClaimKind::Order(k) => {
                if g.order() == *k {
                    confirmed(format!("order {}", g.order()))
                } else {
                    refuted(format!("computed order {}", g.order()))
                }
            }
            ClaimKind::RegularSet(x) => {
                if is_regular_set(g, *x) {
                    confirmed(format!("stabilizer of {x} is trivial"))
                } else {
                    match g.setwise_stabilizer(*x, &self.budget) {
                        Ok(s) => refuted(format!("stabilizer of {x} has order {}", s.order())),
                        Err(_) => refuted(format!("stabilizer of {x} is not trivial")),
                    }
                }
            }
            ClaimKind::RegularSetSizes { sizes, exact: all } => self.check_sizes(i, sizes, *all),
            ClaimKind::NoRegularSet => match self.regular(i) {
                Err(err) => unknown(err),
                Ok(rs) if !rs.sizes.is_empty() => {
                    refuted(format!("regular sets exist, sizes {}", fmt_set(&rs.sizes)))
                }
                Ok(rs) if rs.exhaustive => confirmed("exhaustive scan found no regular set"),
                Ok(_) => trusted(format!(
                    "seeded search found no regular set; exhaustive scan costs {} > --regset-budget {}",
                    exhaustive_cost(g),
                    self.budget.regset_budget
                )),
            },
            ClaimKind::DefinedBy(seeds) => {
                if !exact {
                    return beyond();
                }
                match orbit_relation(g, seeds) {
                    Ok(r) => self.check_defines(g, r, String::new()),
                    Err(err) => unknown(err.to_string()),
                }
            }
            ClaimKind::DefinedIn { context, seeds } => {
                if !exact {
                    return beyond();
                }
                let (ctx, note) = match self.context_for(i, context) {
                    Ok(c) => c,
                    Err(err) => return unknown(err),
                };
                match orbit_relation(g, seeds).and_then(|r| r.union(&ctx)) {
                    Ok(r) => self.check_defines(g, r, note),
                    Err(err) => unknown(err.to_string()),
                }
            }
            ClaimKind::DefinedByUnion(parts) => {
                if !exact {
                    return beyond();
                }
                let mut r = match Relation::empty(n) {
                    Ok(r) => r,
                    Err(err) => return unknown(err.to_string()),
                };
                for (id, x) in parts {
                    let part = self
                        .group_by_id(id)
                        .and_then(|h| orbit_relation(h, &[*x]).map_err(|e| e.to_string()))
                        .and_then(|p| r.union(&p).map_err(|e| e.to_string()));
                    match part {
                        Ok(u) => r = u,
                        Err(err) => return unknown(err),
                    }
                }
                self.check_defines(g, r, String::new())
            }
            ClaimKind::DefinedBySize(spec) => {
                if !exact {
                    return beyond();
                }
                match Relation::empty(n) {
                    Ok(empty) => self.search_defining(g, spec, empty, String::new()),
                    Err(err) => unknown(err.to_string()),
                }
            }
            ClaimKind::DefinedInSize { context, size } => {
                if !exact {
                    return beyond();
                }
                match self.context_for(i, context) {
                    Ok((ctx, note)) => self.search_defining(g, size, ctx, note),
                    Err(err) => unknown(err),
                }
            }
            ClaimKind::Rg | ClaimKind::NotRg => {
                let want_rg = matches!(kind, ClaimKind::Rg);
                match self.rg(i) {
                    Err(err) => unknown(err),
                    Ok(v) => match &v.status {
                        RgStatus::RelationGroup { seeds } => {
                            let w = format!("defined by the orbits of {}", fmt_seeds(seeds));
                            if want_rg {
                                confirmed(w)
                            } else {
                                refuted(format!("relation group, {w}"))
                            }
                        }
                        RgStatus::NotRelationGroup(cert) => {
                            let replay = replay_certificate(g, cert);
                            let w = format!(
                                "{}; certificate replay {}",
                                describe_cert(cert, v.orbit_closed),
                                if replay { "ok" } else { "FAILED" }
                            );
                            if !replay {
                                unknown(w)
                            } else if want_rg {
                                refuted(format!("not a relation group: {w}"))
                            } else {
                                confirmed(w)
                            }
                        }
                        RgStatus::Unknown { reason } => unknown(reason.clone()),
                    },
                }
            }
            ClaimKind::Conjugate(id) => {
                let h = match self.group_by_id(id) {
                    Ok(h) => h,
                    Err(err) => return unknown(err),
                };
                match conjugate_in_sym(h, g, &self.budget) {
                    Conjugacy::Conjugate(c) => confirmed(format!("conjugated from {id} by {c}")),
                    Conjugacy::NotConjugate => refuted(format!(
                        "not conjugate in S{n} to {id} (orders {} and {})",
                        g.order(),
                        h.order()
                    )),
                    Conjugacy::Unknown(r) => unknown(r),
                }
            }
            ClaimKind::AllSubgroupsRg => self.check_all_subgroups(i),
            ClaimKind::MaximalNotSetTransitive => match is_set_transitive(g, &self.budget) {
                Ok(true) => refuted("the group is set-transitive"),
                Ok(false) => trusted(
                    "not set-transitive (checked); maximality among such groups is taken from the literature",
                ),
                Err(err) => trusted(format!(
                    "set-transitivity not checked ({err}); the claim is taken from the literature"
                )),
            },
        }
    }

    fn check_defines(&self, g: &PermGroup, r: Relation, note: String) -> Outcome {
        match invariance_group(&r, &self.budget) {
            Err(err) => unknown(err.to_string()),
            Ok(a) if !g.is_subgroup_of(&a) => {
                refuted(format!("{note}the group does not preserve the relation"))
            }
            Ok(a) if a.order() != g.order() => refuted(format!(
                "{note}the relation has {} edges and its invariance group has order {}",
                r.len(),
                a.order()
            )),
            Ok(_) => Outcome {
                relation: Some(r.clone()),
                ..confirmed(format!(
                    "{note}invariance group of the {}-edge relation has order {}",
                    r.len(),
                    g.order()
                ))
            },
        }
    }

    /// Tries the set-orbits of the allowed sizes in order, smallest
    /// representative first; the first orbit that, with `ctx`, defines `G`
    /// is the witness.
    fn search_defining(
        &self,
        g: &PermGroup,
        spec: &SizeSpec,
        ctx: Relation,
        note: String,
    ) -> Outcome {
        let n = g.degree();
        let sizes: BTreeSet<usize> = spec.sizes(n).into_iter().collect();
        let orbits = match all_set_orbits(g, &self.budget) {
            Ok(o) => o,
            Err(err) => return unknown(err.to_string()),
        };
        let mut candidates: Vec<SubsetMask> = orbits
            .iter()
            .filter(|o| sizes.contains(&o.cardinality))
            .map(|o| o.representative)
            .collect();
        candidates.sort_by_key(|x| (x.len(), x.bits()));
        // Permutations outside G preserving ctx; any that also preserves a
        // candidate orbit rules it out without a search.
        let mut extras: Vec<crate::perm::Permutation> = Vec::new();
        for x in &candidates {
            let r = match orbit_relation(g, &[*x]).and_then(|o| o.union(&ctx)) {
                Ok(r) => r,
                Err(err) => return unknown(err.to_string()),
            };
            if extras.iter().any(|p| r.is_preserved_by(p)) {
                continue;
            }
            let a = match invariance_group(&r, &self.budget) {
                Ok(a) => a,
                Err(err) => return unknown(err.to_string()),
            };
            if a.order() == g.order() {
                return Outcome {
                    relation: Some(r),
                    ..confirmed(format!(
                        "{note}witness {x}: its orbit of length {} defines the group",
                        crate::set_orbits::subset_orbit(g, *x).len()
                    ))
                };
            }
            if let Some(p) = a.generators().iter().find(|p| !g.contains(p)) {
                extras.push(*p);
            }
        }
        refuted(format!(
            "{note}none of the {} set-orbits of size {spec} defines the group",
            candidates.len()
        ))
    }

    fn check_sizes(&self, i: usize, claimed: &BTreeSet<usize>, all: bool) -> Outcome {
        let rs = match self.regular(i) {
            Ok(rs) => rs,
            Err(err) => return unknown(err),
        };
        let found = &rs.sizes;
        let missing: BTreeSet<usize> = claimed.difference(found).copied().collect();
        if rs.exhaustive {
            if all && found != claimed {
                return refuted(format!("regular-set sizes are {}", fmt_set(found)));
            }
            if !all && !missing.is_empty() {
                return refuted(format!("no regular set of size {}", fmt_set(&missing)));
            }
            return confirmed(format!("exhaustive scan: sizes {}", fmt_set(found)));
        }
        let g = self.group(i).expect("group exists");
        if all {
            let extra: BTreeSet<usize> = found.difference(claimed).copied().collect();
            if !extra.is_empty() {
                return refuted(format!("regular sets of size {} exist", fmt_set(&extra)));
            }
        }
        // The search in regular_set_sizes runs once per size pair; look again
        // at each missing size on its own.
        let still_missing: BTreeSet<usize> = missing
            .iter()
            .copied()
            .filter(|&k| find_regular_set(g, k, &self.budget).is_none())
            .collect();
        if !still_missing.is_empty() {
            return unknown(format!(
                "no regular set of size {} found by seeded search; exhaustive scan costs {} > --regset-budget {}",
                fmt_set(&still_missing),
                exhaustive_cost(g),
                self.budget.regset_budget
            ));
        }
        if all {
            trusted(format!(
                "every claimed size has a regular set; that no other size does needs an exhaustive scan costing {} > --regset-budget {}",
                exhaustive_cost(g),
                self.budget.regset_budget
            ))
        } else {
            confirmed("a regular set of each size found by seeded search")
        }
    }

    fn check_all_subgroups(&self, i: usize) -> Outcome {
        let e = &self.catalog.entries[i];
        let g = self.group(i).expect("group exists");
        // Regular-set lemma: a regular set whose size is not an edge size of
        // a defining relation makes every subgroup a relation group.
        if let Ok(r) = self.relation(i) {
            let arity = r.arity();
            let mut candidates: Vec<SubsetMask> = e
                .claims
                .iter()
                .filter_map(|c| match c.kind {
                    ClaimKind::RegularSet(y) => Some(y),
                    _ => None,
                })
                .collect();
            if let Ok(rs) = self.regular(i) {
                for &k in &rs.sizes {
                    if !arity.contains(&k) {
                        if let Some(y) = find_regular_set(g, k, &self.budget) {
                            candidates.push(y);
                        }
                    }
                }
            }
            for y in candidates {
                if let Ok(true) = check_regular_set_premise(g, &[], r, y, &self.budget) {
                    return confirmed(format!(
                        "regular set {y}, size {} not among edge sizes {} of a defining relation",
                        y.len(),
                        fmt_set(&arity)
                    ));
                }
            }
        }
        if g.order() <= SUBGROUP_ORDER_LIMIT && g.degree() <= SCAN_MAX_DEGREE {
            let subs = match enumerate_subgroups(g, SUBGROUP_ORDER_LIMIT) {
                Ok(s) => s,
                Err(err) => return unknown(err.to_string()),
            };
            for s in &subs {
                match decide_relation_group(s, &self.budget) {
                    Ok(v) => match v.status {
                        RgStatus::RelationGroup { .. } => {}
                        RgStatus::NotRelationGroup(_) => {
                            return refuted(format!(
                                "subgroup {} of order {} is not a relation group",
                                fmt_gens(s),
                                s.order()
                            ))
                        }
                        RgStatus::Unknown { reason } => return unknown(reason),
                    },
                    Err(err) => return unknown(err.to_string()),
                }
            }
            return confirmed(format!(
                "all {} subgroups decided as relation groups",
                subs.len()
            ));
        }
        if e.claims
            .iter()
            .any(|c| c.kind == ClaimKind::MaximalNotSetTransitive)
        {
            return trusted(
                "subgroup claim rests on the maximal-not-set-transitive classification",
            );
        }
        unknown("no regular set outside the edge sizes of a defining relation, and the group is too large to enumerate subgroups")
    }
}

fn is_defining(kind: &ClaimKind) -> bool {
    matches!(
        kind,
        ClaimKind::DefinedBy(_)
            | ClaimKind::DefinedBySize(_)
            | ClaimKind::DefinedIn { .. }
            | ClaimKind::DefinedInSize { .. }
            | ClaimKind::DefinedByUnion(_)
    )
}

fn fmt_set(s: &BTreeSet<usize>) -> String {
    let v: Vec<String> = s.iter().map(|k| k.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn fmt_seeds(seeds: &[SubsetMask]) -> String {
    seeds
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn fmt_gens(g: &PermGroup) -> String {
    let v: Vec<String> = g.generators().iter().map(|p| p.to_string()).collect();
    format!("<{}>", v.join(", "))
}

fn describe_cert(cert: &NotRgCertificate, orbit_closed: Option<bool>) -> String {
    match cert {
        NotRgCertificate::Uniform(p) => format!(
            "{p} is outside the group and preserves every set-orbit (not orbit closed)"
        ),
        NotRgCertificate::PerUnion { orbits, .. } => format!(
            "each of the {} unions of {} set-orbits is preserved by a permutation outside the group{}",
            (1u64 << orbits.len().min(63)) - 1,
            orbits.len(),
            match orbit_closed {
                Some(true) => " (orbit closed)",
                _ => "",
            }
        ),
    }
}

/// Convenience wrapper: verify the selected entries of `catalog`.
pub fn verify(catalog: &Catalog, opts: &VerifyOptions) -> Vec<ClaimReport> {
    Verifier::new(catalog, opts.budget).run(opts)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub confirmed: usize,
    pub refuted: usize,
    pub unknown: usize,
    pub trusted: usize,
}

pub fn tally(reports: &[ClaimReport]) -> Tally {
    let mut t = Tally::default();
    for r in reports {
        match r.verdict {
            Verdict::Confirmed => t.confirmed += 1,
            Verdict::Refuted(_) => t.refuted += 1,
            Verdict::Unknown(_) => t.unknown += 1,
            Verdict::Trusted(_) => t.trusted += 1,
        }
    }
    t
}

/// 0 when nothing is refuted, 1 otherwise.
pub fn exit_code(reports: &[ClaimReport]) -> i32 {
    if reports
        .iter()
        .any(|r| matches!(r.verdict, Verdict::Refuted(_)))
    {
        1
    } else {
        0
    }
}

pub fn render_text(reports: &[ClaimReport]) -> String {
    let mut out = String::new();
    let idw = reports.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let cw = reports
        .iter()
        .map(|r| r.claim.len())
        .max()
        .unwrap_or(5)
        .min(48);
    for r in reports {
        let mark = if r.suspect { "*" } else { " " };
        let label = r.verdict.label().to_uppercase();
        let text = match (&r.verdict, r.detail.is_empty()) {
            (Verdict::Trusted(_), _) => "see TRUSTED below".to_string(),
            (v, _) if v.reason().is_some() => v.reason().unwrap().to_string(),
            (_, false) => r.detail.clone(),
            _ => String::new(),
        };
        out.push_str(&format!(
            "{mark}{:<idw$} n={:<2} {:<cw$}  {:<9} {}",
            r.id, r.degree, r.claim, label, text
        ));
        if let Some(ms) = r.elapsed_ms {
            out.push_str(&format!(" [{ms:.1} ms]"));
        }
        out.push('\n');
    }
    let t = tally(reports);
    out.push_str(&format!(
        "\n{} claims: {} confirmed, {} refuted, {} unknown, {} trusted\n",
        reports.len(),
        t.confirmed,
        t.refuted,
        t.unknown,
        t.trusted
    ));
    if reports.iter().any(|r| r.suspect) {
        out.push_str("* entry flagged suspect in the catalog; see its notes\n");
    }
    if t.trusted > 0 {
        out.push_str("\n==================== TRUSTED, NOT VERIFIED ====================\n");
        for r in reports {
            if let Verdict::Trusted(why) = &r.verdict {
                out.push_str(&format!("  {} `{}`: {why}\n", r.id, r.claim));
            }
        }
        out.push_str("===============================================================\n");
    }
    out
}

pub fn render_jsonl(reports: &[ClaimReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("serializable"));
        out.push('\n');
    }
    out
}
