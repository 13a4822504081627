//! Search and size caps shared by the exact routines.

/// Limits applied by the exhaustive searches. Everything above a cap is either
/// rejected or reported as indeterminate, never silently approximated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest group order `build_group` will materialize.
    pub max_order: usize,
    /// Associativity is checked on every triple up to this order.
    pub full_assoc_order: usize,
    /// Number of seeded random triples checked above `full_assoc_order`.
    pub assoc_samples: usize,
    /// Half-graph search: maximum number of rows.
    pub half_graph_rows: usize,
    /// Half-graph search: maximum number of (deduplicated) columns.
    pub half_graph_columns: usize,
    /// Half-graph search: largest half-graph size searched for.
    pub half_graph_k: usize,
    /// VC dimension: largest ground set searched without a depth cap.
    pub vc_ground: usize,
    /// Constant in the ε-approximation length bound.
    pub vca_constant: u64,
    /// Random restarts for ε-nets and ε-approximations.
    pub retries: usize,
    /// Product-set evaluations allowed per call.
    pub product_evaluations: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_order: 5040,
            full_assoc_order: 512,
            assoc_samples: 1_000_000,
            half_graph_rows: 128,
            half_graph_columns: 128 * 128,
            half_graph_k: 7,
            vc_ground: 64,
            vca_constant: 64,
            retries: 32,
            product_evaluations: 10_000_000,
        }
    }
}
