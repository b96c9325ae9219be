/// Work limits for the exact and exhaustive procedures. Every procedure that
/// can blow up checks the relevant field and refuses with
/// [`Error::Budget`](crate::Error::Budget) instead of approximating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest degree at which invariance groups are computed exactly.
    pub max_degree_exact: usize,
    /// Largest power-set size (`2^n`) scanned by the orbit partition.
    pub scan_budget: u64,
    /// Largest group order that may be enumerated element by element.
    pub enum_budget: u64,
    /// Work allowance (`2^n * generators`) for exhaustive regular-set scans.
    pub regset_budget: u64,
    /// Search-tree nodes allowed per backtrack search.
    pub node_budget: u64,
    /// Relations (unions of set orbits) examined by the relation-group decision.
    pub union_budget: u64,
    /// Random subsets tried per cardinality by the regular-set heuristic.
    pub heuristic_tries: u64,
    /// Total image computations allowed to the regular-set heuristic per group.
    pub heuristic_work: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_degree_exact: 13,
            scan_budget: 1 << 24,
            enum_budget: 10_000_000,
            regset_budget: 1 << 20,
            node_budget: 5_000_000,
            union_budget: 1 << 20,
            heuristic_tries: 100_000,
            heuristic_work: 400_000_000,
        }
    }
}

/// Groups up to this order are handled by filtering their element list
/// rather than by backtracking.
pub const BRUTE_FORCE_ORDER: u128 = 1_000_000;
