//! Benchmark datasets and teacher functions.

pub mod dataset;
pub mod teachers;

pub use dataset::{
    concentric_circles, decision_surface, generate_dataset, linspace, split_dataset, Dataset, GridSpec, Split,
    TaskKind, TaskSpec,
};
pub use teachers::{
    class_teacher, classify, modulo_teacher, pair_teachers, poly_mod_teacher, polynomial_teacher, PAIR_MAX,
    POLYNOMIAL_ROOTS,
};
