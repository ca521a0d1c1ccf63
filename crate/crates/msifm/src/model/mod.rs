//! Problem vocabulary: schema, transactions, selections, constraints,
//! datasets and the condition checker.

pub(crate) mod constraint;
mod dataset;
mod schema;
mod selection;

pub use constraint::{
    ConstraintInstance, DuplicateConstraint, MvDomainConstraint, SupportConstraint,
    SvDomainConstraint,
};
pub use dataset::{support, verify, Dataset, Violation, ViolationReport};
pub use schema::{
    all_transactions, count_transactions, itemsets_in_order, Attribute, ItemSet, Schema,
    Transaction,
};
pub use selection::{eval_selection, MvOp, Selection, SelectionList};

/// Errors raised while building or evaluating model objects.
#[derive(Debug, Clone, thiserror::Error)]
pub enum ModelError {
    /// An object references attributes or items a schema does not have.
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
}
