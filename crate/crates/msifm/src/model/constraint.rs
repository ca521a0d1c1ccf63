//! Constraint kinds and the validated problem instance.

use super::schema::{ItemSet, Schema, Transaction};
use super::selection::{eval_selection, MvOp, Selection, SelectionList};
use super::ModelError;

/// Support range over a single-valued item: `lo <= sup(attr = item) <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SvDomainConstraint {
    pub attr: usize,
    pub item: usize,
    pub lo: u64,
    pub hi: u64,
}

/// Support range over one frequent itemset of a set-valued attribute,
/// containment semantics: `lo <= sup(itemset sub attr) <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvDomainConstraint {
    pub attr: usize,
    pub itemset: ItemSet,
    pub lo: u64,
    pub hi: u64,
}

/// Support range over an arbitrary (many-sorted) selection list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportConstraint {
    pub selection: SelectionList,
    pub lo: u64,
    pub hi: u64,
}

/// Cap on the multiplicity of every transaction matching the selection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DuplicateConstraint {
    pub selection: SelectionList,
    pub cap: u64,
}

/// A fully validated synthesis problem.
///
/// Construction normalizes constraint order (attribute, then canonical
/// item/itemset order; many-sorted lists by their normalized form) so that
/// two instances with the same content compare equal and produce identical
/// row layouts downstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintInstance {
    schema: Schema,
    sv_domain: Vec<SvDomainConstraint>,
    mv_domain: Vec<MvDomainConstraint>,
    ms: Vec<SupportConstraint>,
    dups: Vec<DuplicateConstraint>,
    /// `None` means unbounded: no infrequency requirement at all.
    sigma_prime: Option<u64>,
    size: u64,
}

impl ConstraintInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        schema: Schema,
        mut sv_domain: Vec<SvDomainConstraint>,
        mut mv_domain: Vec<MvDomainConstraint>,
        mut ms: Vec<SupportConstraint>,
        mut dups: Vec<DuplicateConstraint>,
        sigma_prime: Option<u64>,
        size: u64,
    ) -> Result<ConstraintInstance, ModelError> {
        if size == 0 {
            return Err(ModelError::InvalidConstraint(
                "dataset size must be positive".into(),
            ));
        }

        // Exactly one range per single-valued item.
        let mut seen = vec![Vec::new(); schema.p()];
        for (i, attr) in schema.sv_attrs().iter().enumerate() {
            seen[i] = vec![false; attr.len()];
        }
        for c in &sv_domain {
            let attr = schema.sv_attrs().get(c.attr).ok_or_else(|| {
                ModelError::SchemaMismatch(format!(
                    "single-valued attribute index {} out of range",
                    c.attr
                ))
            })?;
            if c.item >= attr.len() {
                return Err(ModelError::SchemaMismatch(format!(
                    "item index {} out of range for `{}`",
                    c.item,
                    attr.name()
                )));
            }
            if c.lo > c.hi {
                return Err(ModelError::InvalidConstraint(format!(
                    "bounds {}..{} are inverted for ({},{})",
                    c.lo,
                    c.hi,
                    attr.name(),
                    attr.domain()[c.item]
                )));
            }
            if std::mem::replace(&mut seen[c.attr][c.item], true) {
                return Err(ModelError::InvalidConstraint(format!(
                    "duplicate domain constraint on ({},{})",
                    attr.name(),
                    attr.domain()[c.item]
                )));
            }
        }
        for (i, items) in seen.iter().enumerate() {
            if let Some(j) = items.iter().position(|&covered| !covered) {
                let attr = schema.sv_attr(i);
                return Err(ModelError::InvalidConstraint(format!(
                    "missing domain constraint on ({},{})",
                    attr.name(),
                    attr.domain()[j]
                )));
            }
        }

        // Frequent itemsets: non-empty, in range, one range per itemset.
        for c in &mv_domain {
            let attr = schema.mv_attrs().get(c.attr).ok_or_else(|| {
                ModelError::SchemaMismatch(format!(
                    "set-valued attribute index {} out of range",
                    c.attr
                ))
            })?;
            if c.itemset.is_empty() {
                return Err(ModelError::InvalidConstraint(format!(
                    "empty itemset in a domain constraint on `{}`",
                    attr.name()
                )));
            }
            if c.itemset.items().last().is_some_and(|&i| i >= attr.len()) {
                return Err(ModelError::SchemaMismatch(format!(
                    "itemset {:?} out of range for `{}`",
                    c.itemset,
                    attr.name()
                )));
            }
            if c.lo > c.hi {
                return Err(ModelError::InvalidConstraint(format!(
                    "bounds {}..{} are inverted for ({},{})",
                    c.lo,
                    c.hi,
                    attr.name(),
                    c.itemset.display_in(attr)
                )));
            }
        }
        mv_domain.sort_by(|a, b| a.attr.cmp(&b.attr).then_with(|| a.itemset.cmp(&b.itemset)));
        for w in mv_domain.windows(2) {
            if w[0].attr == w[1].attr && w[0].itemset == w[1].itemset {
                let attr = schema.mv_attr(w[0].attr);
                return Err(ModelError::InvalidConstraint(format!(
                    "duplicate domain constraint on ({},{})",
                    attr.name(),
                    w[0].itemset.display_in(attr)
                )));
            }
        }

        for c in &ms {
            if c.lo > c.hi {
                return Err(ModelError::InvalidConstraint(format!(
                    "bounds {}..{} are inverted for {}",
                    c.lo,
                    c.hi,
                    c.selection.display_in(&schema)
                )));
            }
        }
        for c in &dups {
            if c.cap == 0 {
                return Err(ModelError::InvalidConstraint(format!(
                    "duplicate cap must be positive for {}",
                    c.selection.display_in(&schema)
                )));
            }
        }
        sv_domain.sort_by_key(|c| (c.attr, c.item));
        ms.sort_by(|a, b| {
            a.selection
                .cmp(&b.selection)
                .then_with(|| (a.lo, a.hi).cmp(&(b.lo, b.hi)))
        });
        dups.sort_by(|a, b| a.selection.cmp(&b.selection).then_with(|| a.cap.cmp(&b.cap)));

        Ok(ConstraintInstance {
            schema,
            sv_domain,
            mv_domain,
            ms,
            dups,
            sigma_prime,
            size,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn sv_domain(&self) -> &[SvDomainConstraint] {
        &self.sv_domain
    }

    pub fn mv_domain(&self) -> &[MvDomainConstraint] {
        &self.mv_domain
    }

    pub fn ms(&self) -> &[SupportConstraint] {
        &self.ms
    }

    pub fn dups(&self) -> &[DuplicateConstraint] {
        &self.dups
    }

    pub fn sigma_prime(&self) -> Option<u64> {
        self.sigma_prime
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// The frequent itemsets of one set-valued attribute, canonical order.
    pub fn frequent_sets(&self, attr: usize) -> Vec<ItemSet> {
        self.mv_domain
            .iter()
            .filter(|c| c.attr == attr)
            .map(|c| c.itemset.clone())
            .collect()
    }

    /// Bound on a single range endpoint anywhere in the instance; used to
    /// size LP right-hand sides.
    pub fn sv_bounds(&self, attr: usize, item: usize) -> (u64, u64) {
        let c = self
            .sv_domain
            .iter()
            .find(|c| c.attr == attr && c.item == item)
            .expect("validated instance covers every single-valued item");
        (c.lo, c.hi)
    }

    /// The tightest duplicate cap whose selection the transaction matches,
    /// or `None` when no cap applies.
    pub fn duplicate_cap(&self, t: &Transaction) -> Result<Option<u64>, ModelError> {
        let mut cap: Option<u64> = None;
        for c in &self.dups {
            if eval_selection(&self.schema, &c.selection, t)? {
                cap = Some(cap.map_or(c.cap, |prev| prev.min(c.cap)));
            }
        }
        Ok(cap)
    }
}

/// Convenience builders used by tests and generators.
impl ConstraintInstance {
    /// Selection resolving names against this schema.
    pub fn parse_selection(
        schema: &Schema,
        sv: &[(&str, &str)],
        mv: &[(&str, &[&str], MvOp)],
    ) -> Result<SelectionList, ModelError> {
        let mut entries = Vec::new();
        for (attr, item) in sv {
            let a = schema
                .sv_attr_index(attr)
                .ok_or_else(|| ModelError::SchemaMismatch(format!("unknown attribute `{attr}`")))?;
            let i = schema.sv_attr(a).item_index(item).ok_or_else(|| {
                ModelError::SchemaMismatch(format!("unknown item `{item}` for `{attr}`"))
            })?;
            entries.push(Selection::Sv { attr: a, item: i });
        }
        for (attr, items, op) in mv {
            let a = schema
                .mv_attr_index(attr)
                .ok_or_else(|| ModelError::SchemaMismatch(format!("unknown attribute `{attr}`")))?;
            let set = ItemSet::new(
                items
                    .iter()
                    .map(|n| {
                        schema.mv_attr(a).item_index(n).ok_or_else(|| {
                            ModelError::SchemaMismatch(format!(
                                "unknown item `{n}` for `{attr}`"
                            ))
                        })
                    })
                    .collect::<Result<_, _>>()?,
            );
            entries.push(Selection::Mv { attr: a, itemset: set, op: *op });
        }
        SelectionList::new(schema, entries)
    }
}
