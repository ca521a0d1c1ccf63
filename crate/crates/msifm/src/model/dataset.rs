//! Datasets with multiplicities and the condition checker.

use std::collections::BTreeMap;

use crate::scalar::Count;

use super::constraint::ConstraintInstance;
use super::schema::{ItemSet, Schema, Transaction};
use super::selection::{eval_selection, SelectionList};
use super::ModelError;

/// A multiset of transactions: unique keys with positive multiplicities.
///
/// `C` is the multiplicity type: big integers for final datasets, rationals
/// or floats for relaxed LP solutions.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<C: Count> {
    entries: BTreeMap<Transaction, C>,
}

impl<C: Count> Default for Dataset<C> {
    fn default() -> Self {
        Dataset { entries: BTreeMap::new() }
    }
}

impl<C: Count> Dataset<C> {
    pub fn new() -> Dataset<C> {
        Dataset::default()
    }

    /// Adds `count` occurrences of `t`. Rejects non-positive counts; zero
    /// entries never appear in a dataset.
    pub fn insert(&mut self, t: Transaction, count: C) -> Result<(), ModelError> {
        if count <= C::zero() {
            return Err(ModelError::InvalidDataset(
                "transaction multiplicities must be positive".into(),
            ));
        }
        match self.entries.entry(t) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(count);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += count;
            }
        }
        Ok(())
    }

    pub fn from_entries(
        entries: impl IntoIterator<Item = (Transaction, C)>,
    ) -> Result<Dataset<C>, ModelError> {
        let mut d = Dataset::new();
        for (t, c) in entries {
            d.insert(t, c)?;
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, t: &Transaction) -> Option<&C> {
        self.entries.get(t)
    }

    /// Entries in canonical transaction order.
    pub fn iter(&self) -> impl Iterator<Item = (&Transaction, &C)> {
        self.entries.iter()
    }

    /// Total multiplicity.
    pub fn total(&self) -> C {
        let mut sum = C::zero();
        for c in self.entries.values() {
            sum += c.clone();
        }
        sum
    }
}

/// Number of transactions in the dataset satisfying the selection, counted
/// with multiplicity.
pub fn support<C: Count>(
    schema: &Schema,
    dataset: &Dataset<C>,
    selection: &SelectionList,
) -> Result<C, ModelError> {
    let mut sum = C::zero();
    for (t, c) in dataset.iter() {
        if eval_selection(schema, selection, t)? {
            sum += c.clone();
        }
    }
    Ok(sum)
}

/// A single failed condition, carrying the offending quantity.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation<C> {
    SvSupport { attr: usize, item: usize, lo: u64, hi: u64, actual: C },
    MvSupport { attr: usize, itemset: ItemSet, lo: u64, hi: u64, actual: C },
    Infrequency { attr: usize, itemset: ItemSet, cap: u64, actual: C },
    MsSupport { index: usize, lo: u64, hi: u64, actual: C },
    DuplicateCap { transaction: Transaction, cap: u64, actual: C },
    Size { expected: u64, actual: C },
}

impl<C: Count> Violation<C> {
    pub fn render(&self, schema: &Schema) -> String {
        match self {
            Violation::SvSupport { attr, item, lo, hi, actual } => {
                let a = schema.sv_attr(*attr);
                format!(
                    "support of ({},{}) is {actual}, outside {lo}..{hi}",
                    a.name(),
                    a.domain()[*item]
                )
            }
            Violation::MvSupport { attr, itemset, lo, hi, actual } => {
                let a = schema.mv_attr(*attr);
                format!(
                    "support of ({},{}) is {actual}, outside {lo}..{hi}",
                    a.name(),
                    itemset.display_in(a)
                )
            }
            Violation::Infrequency { attr, itemset, cap, actual } => {
                let a = schema.mv_attr(*attr);
                format!(
                    "infrequent itemset ({},{}) has support {actual}, above {cap}",
                    a.name(),
                    itemset.display_in(a)
                )
            }
            Violation::MsSupport { index, lo, hi, actual } => format!(
                "support constraint #{index} evaluates to {actual}, outside {lo}..{hi}"
            ),
            Violation::DuplicateCap { transaction, cap, actual } => format!(
                "transaction {} occurs {actual} times, above its cap {cap}",
                transaction.display_in(schema)
            ),
            Violation::Size { expected, actual } => {
                format!("dataset size is {actual}, expected {expected}")
            }
        }
    }
}

/// Outcome of checking every condition of an instance against a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct ViolationReport<C> {
    violations: Vec<Violation<C>>,
}

impl<C: Count> ViolationReport<C> {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation<C>] {
        &self.violations
    }

    pub fn render(&self, schema: &Schema) -> Vec<String> {
        self.violations.iter().map(|v| v.render(schema)).collect()
    }
}

/// Checks the dataset against every condition of the instance: domain
/// support ranges, containment ranges, infrequency caps over the given
/// borders, many-sorted ranges, duplicate caps and the exact size.
///
/// `border` holds the minimal infrequent itemsets per set-valued attribute;
/// it is ignored when the instance has no infrequency bound.
pub fn verify<C: Count>(
    inst: &ConstraintInstance,
    dataset: &Dataset<C>,
    border: &[Vec<ItemSet>],
) -> Result<ViolationReport<C>, ModelError> {
    let schema = inst.schema();
    let mut violations = Vec::new();

    let in_range = |v: &C, lo: u64, hi: u64| *v >= C::from_count(lo) && *v <= C::from_count(hi);

    for c in inst.sv_domain() {
        let mut actual = C::zero();
        for (t, n) in dataset.iter() {
            if t.sv_value(c.attr) == c.item {
                actual += n.clone();
            }
        }
        if !in_range(&actual, c.lo, c.hi) {
            violations.push(Violation::SvSupport {
                attr: c.attr,
                item: c.item,
                lo: c.lo,
                hi: c.hi,
                actual,
            });
        }
    }

    for c in inst.mv_domain() {
        let mut actual = C::zero();
        for (t, n) in dataset.iter() {
            if c.itemset.is_subset_of(t.mv_set(c.attr)) {
                actual += n.clone();
            }
        }
        if !in_range(&actual, c.lo, c.hi) {
            violations.push(Violation::MvSupport {
                attr: c.attr,
                itemset: c.itemset.clone(),
                lo: c.lo,
                hi: c.hi,
                actual,
            });
        }
    }

    if let Some(cap) = inst.sigma_prime() {
        if border.len() != schema.q() {
            return Err(ModelError::SchemaMismatch(
                "border does not cover every set-valued attribute".into(),
            ));
        }
        for (attr, members) in border.iter().enumerate() {
            for itemset in members {
                let mut actual = C::zero();
                for (t, n) in dataset.iter() {
                    if itemset.is_subset_of(t.mv_set(attr)) {
                        actual += n.clone();
                    }
                }
                if actual > C::from_count(cap) {
                    violations.push(Violation::Infrequency {
                        attr,
                        itemset: itemset.clone(),
                        cap,
                        actual,
                    });
                }
            }
        }
    }

    for (index, c) in inst.ms().iter().enumerate() {
        let actual = support(schema, dataset, &c.selection)?;
        if !in_range(&actual, c.lo, c.hi) {
            violations.push(Violation::MsSupport { index, lo: c.lo, hi: c.hi, actual });
        }
    }

    for (t, n) in dataset.iter() {
        if let Some(cap) = inst.duplicate_cap(t)? {
            if *n > C::from_count(cap) {
                violations.push(Violation::DuplicateCap {
                    transaction: t.clone(),
                    cap,
                    actual: n.clone(),
                });
            }
        }
    }

    let total = dataset.total();
    if total != C::from_count(inst.size()) {
        violations.push(Violation::Size { expected: inst.size(), actual: total });
    }

    Ok(ViolationReport { violations })
}
