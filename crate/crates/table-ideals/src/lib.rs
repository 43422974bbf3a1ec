//! Arithmetic of Artinian monomial ideals attached to integer tables.
//!
//! The crate covers the full pipeline: monomial ideals with big-integer
//! exponents, (s, n)-tables and their generated ideals, normal-form reduction,
//! recognition of table ideals from generators, the weighted simplicial
//! complex of an ideal, Hilbert-function and Lefschetz checks, labeled
//! dataset generation, and a small from-scratch decision tree.

pub mod datasets;
pub mod lefschetz;
pub mod matrix;
pub mod ml;
pub mod monomial;
pub mod recognition;
pub mod simplicial;
pub mod table;

pub use datasets::{
    generate_dataset, ideal_graph, ideal_vector, rows_graph, rows_vector, DatasetRecord,
    DatasetSpec, Family, IdealGraph,
};
pub use lefschetz::{check_slp, hilbert_is_symmetric, SlpReport, DEFAULT_CAP};
pub use ml::{averaged_experiment, evaluate, train_tree, DecisionTree, TreeStats};
pub use monomial::{Monomial, MonomialIdeal};
pub use recognition::{recognize, RecognitionOutcome};
pub use simplicial::{build_complex, WeightedComplex};
pub use table::{GeneralisedTable, Table};



