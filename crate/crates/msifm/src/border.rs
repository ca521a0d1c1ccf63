//! Negative borders: the minimal itemsets not covered by any frequent set.
//!
//! An itemset is covered when some frequent itemset contains it. The border
//! collects the minimal uncovered ones; they are exactly the sets whose
//! proper subsets are all covered, so a level-wise sweep in the style of
//! apriori finds them without touching the rest of the lattice. Border size
//! can still explode combinatorially, hence the hard cap.

use std::collections::BTreeSet;

use crate::model::{ConstraintInstance, ItemSet, Schema};

/// Default ceiling on border members per attribute.
pub const DEFAULT_BORDER_CAP: usize = 10_000;

/// Raised when a border would exceed the configured cap.
#[derive(Debug, Clone, thiserror::Error)]
#[error("negative border exceeds the cap of {cap} members")]
pub struct CapExceeded {
    pub cap: usize,
}

/// Per-attribute border failure, carrying the attribute name.
#[derive(Debug, Clone, thiserror::Error)]
pub enum BorderError {
    #[error("negative border of `{attr}` exceeds the cap of {cap} members")]
    TooLarge { attr: String, cap: usize },
}

/// Computes the negative border of `frequent` over a domain of
/// `domain_size` items, in canonical order.
///
/// The empty itemset never appears: with no frequent sets at all the border
/// is the singletons. Aborts with [`CapExceeded`] as soon as more than
/// `cap` members exist; at most `cap + 1` are ever materialized.
pub fn negative_border(
    domain_size: usize,
    frequent: &[ItemSet],
    cap: usize,
) -> Result<Vec<ItemSet>, CapExceeded> {
    let covered = |set: &ItemSet| frequent.iter().any(|f| set.is_subset_of(f));

    let mut border = Vec::new();
    let mut push = |set: ItemSet| {
        border.push(set);
        if border.len() > cap {
            return Err(CapExceeded { cap });
        }
        Ok(())
    };

    // Level 1: split singletons into covered and border members.
    let mut covered_level: BTreeSet<ItemSet> = BTreeSet::new();
    for item in 0..domain_size {
        let single = ItemSet::new(vec![item]);
        if covered(&single) {
            covered_level.insert(single);
        } else {
            push(single)?;
        }
    }

    // Level k: grow covered (k-1)-sets by one later item; a candidate whose
    // (k-1)-subsets are all covered is either covered itself or minimal
    // uncovered, i.e. a border member.
    while !covered_level.is_empty() {
        let mut next_level = BTreeSet::new();
        for set in &covered_level {
            let last = set.items().last().copied().unwrap_or(0);
            for item in last + 1..domain_size {
                let candidate = set.with(item);
                if next_level.contains(&candidate) {
                    continue;
                }
                let all_subsets_covered = candidate.iter().all(|drop| {
                    let sub =
                        ItemSet::new(candidate.iter().filter(|&i| i != drop).collect());
                    covered_level.contains(&sub)
                });
                if !all_subsets_covered {
                    continue;
                }
                if covered(&candidate) {
                    next_level.insert(candidate);
                } else {
                    push(candidate)?;
                }
            }
        }
        covered_level = next_level;
    }

    border.sort();
    Ok(border)
}

/// Checks that the border fits under `cap` without returning it.
pub fn size_guard(domain_size: usize, frequent: &[ItemSet], cap: usize) -> Result<(), CapExceeded> {
    negative_border(domain_size, frequent, cap).map(|_| ())
}

/// Negative borders of every set-valued attribute of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Border {
    per_attr: Vec<Vec<ItemSet>>,
}

impl Border {
    pub fn compute(inst: &ConstraintInstance, cap: usize) -> Result<Border, BorderError> {
        let schema = inst.schema();
        let mut per_attr = Vec::with_capacity(schema.q());
        for (attr, a) in schema.mv_attrs().iter().enumerate() {
            let frequent = inst.frequent_sets(attr);
            let members = negative_border(a.len(), &frequent, cap).map_err(|e| {
                BorderError::TooLarge { attr: a.name().to_string(), cap: e.cap }
            })?;
            per_attr.push(members);
        }
        Ok(Border { per_attr })
    }

    /// All-empty borders, used when the instance has no infrequency bound.
    pub fn empty(schema: &Schema) -> Border {
        Border { per_attr: vec![Vec::new(); schema.q()] }
    }

    pub fn attr(&self, attr: usize) -> &[ItemSet] {
        &self.per_attr[attr]
    }

    pub fn per_attr(&self) -> &[Vec<ItemSet>] {
        &self.per_attr
    }

    pub fn total_members(&self) -> usize {
        self.per_attr.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(raw: &[&[usize]]) -> Vec<ItemSet> {
        raw.iter().map(|s| ItemSet::new(s.to_vec())).collect()
    }

    /// Brute force reference: minimal non-empty itemsets not contained in
    /// any frequent set, by direct scan of the whole lattice.
    fn border_by_force(domain_size: usize, frequent: &[ItemSet]) -> Vec<ItemSet> {
        let covered =
            |set: &ItemSet| frequent.iter().any(|f| set.is_subset_of(f));
        let all: Vec<ItemSet> = crate::model::itemsets_in_order(domain_size).collect();
        let mut out: Vec<ItemSet> = all
            .iter()
            .filter(|s| !s.is_empty() && !covered(s))
            .filter(|s| {
                all.iter()
                    .filter(|t| !t.is_empty() && t.is_subset_of(s) && *t != *s)
                    .all(&covered)
            })
            .cloned()
            .collect();
        out.sort();
        out
    }

    #[test]
    fn matches_hand_cases() {
        // S = {{a,b},{b,c}} over {a,b,c}: only {a,c} is minimal uncovered.
        assert_eq!(
            negative_border(3, &sets(&[&[0, 1], &[1, 2]]), 100).unwrap(),
            sets(&[&[0, 2]])
        );
        // The full set covers everything: empty border.
        assert_eq!(
            negative_border(3, &sets(&[&[0, 1, 2]]), 100).unwrap(),
            Vec::<ItemSet>::new()
        );
        // S = {{a}}: the other singletons are uncovered.
        assert_eq!(
            negative_border(3, &sets(&[&[0]]), 100).unwrap(),
            sets(&[&[2], &[1]])
        );
        // No frequent sets at all: every singleton.
        assert_eq!(
            negative_border(3, &[], 100).unwrap(),
            sets(&[&[2], &[1], &[0]])
        );
    }

    #[test]
    fn members_come_out_sorted_and_minimal() {
        let frequent = sets(&[&[0, 1], &[2, 3], &[1, 2]]);
        let border = negative_border(4, &frequent, 100).unwrap();
        assert_eq!(border, border_by_force(4, &frequent));
        for w in border.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (i, a) in border.iter().enumerate() {
            for (j, b) in border.iter().enumerate() {
                assert!(i == j || !a.is_subset_of(b), "{a:?} inside {b:?}");
            }
        }
    }

    #[test]
    fn agrees_with_brute_force_on_random_families() {
        // Deterministic pseudo-random families over up to 8 items.
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..60 {
            let n = 2 + (next() % 7) as usize;
            let k = (next() % 5) as usize;
            let frequent: Vec<ItemSet> = (0..k)
                .map(|_| {
                    let mask = next() as usize % (1 << n);
                    ItemSet::new((0..n).filter(|i| mask >> i & 1 == 1).collect())
                })
                .filter(|s| !s.is_empty())
                .collect();
            assert_eq!(
                negative_border(n, &frequent, 10_000).unwrap(),
                border_by_force(n, &frequent),
                "n={n} frequent={frequent:?}"
            );
        }
    }

    #[test]
    fn cap_aborts_early() {
        // No frequent sets over 50 items: border is the 50 singletons.
        let err = negative_border(50, &[], 10).unwrap_err();
        assert_eq!(err.cap, 10);
        assert!(size_guard(50, &[], 10).is_err());
        assert!(size_guard(50, &[], 50).is_ok());
    }

    #[test]
    fn per_instance_borders() {
        use crate::model::{ConstraintInstance, MvDomainConstraint, Schema, SvDomainConstraint};
        let schema = Schema::new(
            vec![("C".into(), vec!["x".into()])],
            vec![
                ("G".into(), vec!["g1".into(), "g2".into(), "g3".into()]),
                ("E".into(), vec!["e1".into(), "e2".into()]),
            ],
        )
        .unwrap();
        let inst = ConstraintInstance::new(
            schema,
            vec![SvDomainConstraint { attr: 0, item: 0, lo: 0, hi: 5 }],
            vec![
                MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![0, 1]), lo: 0, hi: 5 },
                MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![1, 2]), lo: 0, hi: 5 },
            ],
            vec![],
            vec![],
            Some(1),
            5,
        )
        .unwrap();
        let border = Border::compute(&inst, 100).unwrap();
        assert_eq!(border.attr(0), sets(&[&[0, 2]]).as_slice());
        // E has no frequent sets: both singletons.
        assert_eq!(border.attr(1).len(), 2);
        assert_eq!(border.total_members(), 3);
    }
}
