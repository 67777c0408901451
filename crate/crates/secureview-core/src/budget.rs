//! Resource budgets for the exponential code paths.
//!
//! Exceeding a budget is always a reported error, never silent truncation:
//! callers that hit the exact-enumeration wall must switch to the
//! certificate path instead.

/// Limits for world enumeration, table materialization and branch and
/// bound. `SECUREVIEW_BUDGET` (a candidate count) overrides
/// `max_world_candidates` and `max_ip_nodes`.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Upper bound on hidden cells (rows x hidden columns) in exact world
    /// enumeration.
    pub max_hidden_cells: u64,
    /// Upper bound on candidate worlds (product of hidden-cell domain
    /// sizes before pruning).
    pub max_world_candidates: u64,
    /// Upper bound on branch-and-bound nodes.
    pub max_ip_nodes: u64,
    /// Upper bound on rows when materializing a module table over its full
    /// input domain product.
    pub max_table_rows: u64,
    /// Upper bound on attributes of a standalone module in subset search.
    pub max_standalone_attrs: usize,
    /// Upper bound on tuples materialized into a single out-set.
    pub max_out_tuples: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_hidden_cells: 24,
            max_world_candidates: 1 << 20,
            max_ip_nodes: 1 << 20,
            max_table_rows: 1 << 12,
            max_standalone_attrs: 20,
            max_out_tuples: 1 << 16,
        }
    }
}

impl Budget {
    /// Default budget with the `SECUREVIEW_BUDGET` environment override
    /// applied, when set and parseable.
    pub fn from_env() -> Self {
        let mut budget = Budget::default();
        if let Ok(raw) = std::env::var("SECUREVIEW_BUDGET") {
            if let Ok(value) = raw.trim().parse::<u64>() {
                budget.max_world_candidates = value;
                budget.max_ip_nodes = value;
            }
        }
        budget
    }
}
