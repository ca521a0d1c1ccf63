//! Selection lists: the predicates constraints are written in.

use super::schema::{ItemSet, Schema, Transaction};
use super::ModelError;

/// How a set-valued selection compares its itemset against the transaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MvOp {
    /// The transaction's set equals the itemset.
    Equality,
    /// The itemset is contained in the transaction's set.
    Subset,
}

/// One atomic condition on a single attribute.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selection {
    Sv { attr: usize, item: usize },
    Mv { attr: usize, itemset: ItemSet, op: MvOp },
}

impl Selection {
    fn display_in(&self, schema: &Schema) -> String {
        match self {
            Selection::Sv { attr, item } => {
                let a = schema.sv_attr(*attr);
                format!("({},{})", a.name(), a.domain()[*item])
            }
            Selection::Mv { attr, itemset, op } => {
                let a = schema.mv_attr(*attr);
                let sym = match op {
                    MvOp::Equality => "=",
                    MvOp::Subset => "sub",
                };
                format!("({},{},{sym})", a.name(), itemset.display_in(a))
            }
        }
    }
}

/// A conjunction of selections, at most one per attribute.
///
/// Stored normalized: single-valued entries first by attribute index, then
/// set-valued ones, so structurally equal predicates compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SelectionList {
    entries: Vec<Selection>,
}

impl SelectionList {
    pub fn new(schema: &Schema, mut entries: Vec<Selection>) -> Result<SelectionList, ModelError> {
        if entries.is_empty() {
            return Err(ModelError::InvalidSelection(
                "selection list is empty".into(),
            ));
        }
        let mut seen_sv = vec![false; schema.p()];
        let mut seen_mv = vec![false; schema.q()];
        for sel in &entries {
            match sel {
                Selection::Sv { attr, item } => {
                    let a = schema.sv_attrs().get(*attr).ok_or_else(|| {
                        ModelError::SchemaMismatch(format!(
                            "single-valued attribute index {attr} out of range"
                        ))
                    })?;
                    if *item >= a.len() {
                        return Err(ModelError::SchemaMismatch(format!(
                            "item index {item} out of range for `{}`",
                            a.name()
                        )));
                    }
                    if std::mem::replace(&mut seen_sv[*attr], true) {
                        return Err(ModelError::InvalidSelection(format!(
                            "attribute `{}` selected twice",
                            a.name()
                        )));
                    }
                }
                Selection::Mv { attr, itemset, op: _ } => {
                    let a = schema.mv_attrs().get(*attr).ok_or_else(|| {
                        ModelError::SchemaMismatch(format!(
                            "set-valued attribute index {attr} out of range"
                        ))
                    })?;
                    if itemset.items().last().is_some_and(|&i| i >= a.len()) {
                        return Err(ModelError::SchemaMismatch(format!(
                            "itemset {:?} out of range for `{}`",
                            itemset,
                            a.name()
                        )));
                    }
                    if std::mem::replace(&mut seen_mv[*attr], true) {
                        return Err(ModelError::InvalidSelection(format!(
                            "attribute `{}` selected twice",
                            a.name()
                        )));
                    }
                }
            }
        }
        entries.sort_by_key(|sel| match sel {
            Selection::Sv { attr, .. } => (0, *attr),
            Selection::Mv { attr, .. } => (1, *attr),
        });
        Ok(SelectionList { entries })
    }

    pub fn entries(&self) -> &[Selection] {
        &self.entries
    }

    /// True when every attribute of the schema is selected.
    pub fn is_full(&self, schema: &Schema) -> bool {
        self.entries.len() == schema.p() + schema.q()
    }

    pub fn display_in(&self, schema: &Schema) -> String {
        let parts: Vec<String> = self.entries.iter().map(|s| s.display_in(schema)).collect();
        format!("[{}]", parts.join(","))
    }
}

/// Evaluates a selection list against one transaction.
///
/// Errors with `SchemaMismatch` when list or transaction shape does not fit
/// the schema, which happens only when they were built for another one.
pub fn eval_selection(
    schema: &Schema,
    list: &SelectionList,
    t: &Transaction,
) -> Result<bool, ModelError> {
    if t.sv_values().len() != schema.p() || t.mv_sets().len() != schema.q() {
        return Err(ModelError::SchemaMismatch(
            "transaction shape does not match schema".into(),
        ));
    }
    for sel in &list.entries {
        let hit = match sel {
            Selection::Sv { attr, item } => {
                if *attr >= schema.p() {
                    return Err(ModelError::SchemaMismatch(
                        "selection references an unknown attribute".into(),
                    ));
                }
                t.sv_value(*attr) == *item
            }
            Selection::Mv { attr, itemset, op } => {
                if *attr >= schema.q() {
                    return Err(ModelError::SchemaMismatch(
                        "selection references an unknown attribute".into(),
                    ));
                }
                match op {
                    MvOp::Equality => t.mv_set(*attr) == itemset,
                    MvOp::Subset => itemset.is_subset_of(t.mv_set(*attr)),
                }
            }
        };
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}
