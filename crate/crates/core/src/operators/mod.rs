//! Discretized space-time operators, the scalar dominating operators and
//! operator-norm estimation.

pub mod apply;
pub mod domination;
pub mod estimates;
pub mod norm;
pub mod scalar;
pub mod table;
pub mod variants;

pub use apply::{apply_k, mild_solution, time_derivative, DEFAULT_DELTA_STEPS};
pub use table::{EntryMask, KernelFamily, KernelTable, Region};
