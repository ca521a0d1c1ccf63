//! Largest-remainder rounding of a relaxed solution.
//!
//! The solver hands back rational multiplicities; datasets need integers.
//! Floor everything, then hand out the missing units by descending
//! fractional part (ties to the canonical-least transaction), skipping
//! entries sitting at their duplicate cap. When every entry is capped and
//! units remain, the caps have made the size target unreachable and the
//! partial result is surfaced alongside the deficit. A surplus, which only
//! happens on suboptimal points whose mass exceeds the size target, is
//! taken back in the mirrored order.

use std::cmp::Ordering;

use thiserror::Error;

use crate::model::{ConstraintInstance, Dataset, ModelError, Transaction};
use crate::scalar::LpScalar;
use crate::Integer;

#[derive(Debug, Error)]
pub enum RoundError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("duplicate caps leave {deficit} of the size target unallocated")]
    CapSaturation { partial: Dataset<Integer>, deficit: u64 },
}

struct Entry<S> {
    t: Transaction,
    count: u64,
    frac: S,
    cap: Option<u64>,
}

pub fn round_solution<S: LpScalar>(
    inst: &ConstraintInstance,
    fractional: &Dataset<S>,
    size: u64,
) -> Result<Dataset<Integer>, RoundError> {
    let mut entries = Vec::with_capacity(fractional.len());
    for (t, v) in fractional.iter() {
        let (count, frac) = v.floor_frac();
        let cap = inst.duplicate_cap(t)?;
        entries.push(Entry { t: t.clone(), count, frac, cap });
    }
    let floored: u64 = entries.iter().map(|e| e.count).sum();

    if floored < size {
        let mut need = size - floored;
        let order = sorted_indices(&entries, |a, b| {
            b.frac
                .partial_cmp(&a.frac)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.t.cmp(&b.t))
        });
        while need > 0 {
            let mut progressed = false;
            for &i in &order {
                if need == 0 {
                    break;
                }
                let e = &mut entries[i];
                if e.cap.is_none_or(|c| e.count < c) {
                    e.count += 1;
                    need -= 1;
                    progressed = true;
                }
            }
            if !progressed {
                let partial = collect(entries)?;
                return Err(RoundError::CapSaturation { partial, deficit: need });
            }
        }
    } else if floored > size {
        let mut excess = floored - size;
        let order = sorted_indices(&entries, |a, b| {
            a.frac
                .partial_cmp(&b.frac)
                .unwrap_or(Ordering::Equal)
                .then_with(|| b.t.cmp(&a.t))
        });
        while excess > 0 {
            for &i in &order {
                if excess == 0 {
                    break;
                }
                if entries[i].count > 0 {
                    entries[i].count -= 1;
                    excess -= 1;
                }
            }
            // The sum stays above the target until the loop ends, so some
            // entry is always positive and every pass shrinks the excess.
        }
    }
    collect(entries).map_err(RoundError::from)
}

fn sorted_indices<S>(
    entries: &[Entry<S>],
    mut by: impl FnMut(&Entry<S>, &Entry<S>) -> Ordering,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| by(&entries[i], &entries[j]));
    order
}

fn collect<S>(entries: Vec<Entry<S>>) -> Result<Dataset<Integer>, ModelError> {
    let mut dataset = Dataset::new();
    for e in entries {
        if e.count > 0 {
            dataset.insert(e.t, Integer::from(e.count))?;
        }
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{all_transactions, DuplicateConstraint, ItemSet, MvOp, Schema};
    use crate::Rational;
    use num::BigInt;

    fn tiny_schema() -> Schema {
        Schema::new(vec![], vec![("G".into(), vec!["a".into(), "b".into()])]).unwrap()
    }

    fn plain_instance(size: u64) -> ConstraintInstance {
        ConstraintInstance::new(tiny_schema(), vec![], vec![], vec![], vec![], None, size)
            .unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn pair() -> (Transaction, Transaction) {
        let schema = tiny_schema();
        let mut it = all_transactions(&schema);
        let a = it.next().unwrap();
        let b = it.next().unwrap();
        (a, b)
    }

    #[test]
    fn ties_go_to_the_canonical_least_transaction() {
        let inst = plain_instance(5);
        let (t1, t2) = pair();
        let frac =
            Dataset::from_entries([(t1.clone(), q(5, 2)), (t2.clone(), q(5, 2))]).unwrap();
        let rounded = round_solution(&inst, &frac, 5).unwrap();
        assert_eq!(rounded.get(&t1), Some(&BigInt::from(3)));
        assert_eq!(rounded.get(&t2), Some(&BigInt::from(2)));
    }

    #[test]
    fn integer_input_passes_through() {
        let inst = plain_instance(5);
        let (t1, t2) = pair();
        let frac =
            Dataset::from_entries([(t1.clone(), q(2, 1)), (t2.clone(), q(3, 1))]).unwrap();
        let rounded = round_solution(&inst, &frac, 5).unwrap();
        assert_eq!(rounded.get(&t1), Some(&BigInt::from(2)));
        assert_eq!(rounded.get(&t2), Some(&BigInt::from(3)));
    }

    #[test]
    fn capped_units_cascade_to_the_next_candidate() {
        let schema = tiny_schema();
        let sel = ConstraintInstance::parse_selection(
            &schema,
            &[],
            &[("G", &["a"], MvOp::Equality)],
        )
        .unwrap();
        let inst = ConstraintInstance::new(
            schema,
            vec![],
            vec![],
            vec![],
            vec![DuplicateConstraint { selection: sel, cap: 1 }],
            None,
            3,
        )
        .unwrap();
        let ta = Transaction::new(inst.schema(), vec![], vec![ItemSet::new(vec![0])]).unwrap();
        let tb = Transaction::new(inst.schema(), vec![], vec![ItemSet::new(vec![1])]).unwrap();
        // The bigger remainder sits at its cap, so the unit moves on.
        let frac =
            Dataset::from_entries([(ta.clone(), q(19, 10)), (tb.clone(), q(11, 10))]).unwrap();
        let rounded = round_solution(&inst, &frac, 3).unwrap();
        assert_eq!(rounded.get(&ta), Some(&BigInt::from(1)));
        assert_eq!(rounded.get(&tb), Some(&BigInt::from(2)));
    }

    #[test]
    fn saturated_caps_report_the_deficit() {
        let schema = tiny_schema();
        let sel_a = ConstraintInstance::parse_selection(
            &schema,
            &[],
            &[("G", &["a"], MvOp::Equality)],
        )
        .unwrap();
        let inst = ConstraintInstance::new(
            schema,
            vec![],
            vec![],
            vec![],
            vec![DuplicateConstraint { selection: sel_a, cap: 1 }],
            None,
            4,
        )
        .unwrap();
        let ta = Transaction::new(inst.schema(), vec![], vec![ItemSet::new(vec![0])]).unwrap();
        let frac = Dataset::from_entries([(ta.clone(), q(3, 2))]).unwrap();
        match round_solution(&inst, &frac, 4) {
            Err(RoundError::CapSaturation { partial, deficit }) => {
                assert_eq!(deficit, 3);
                assert_eq!(partial.get(&ta), Some(&BigInt::from(1)));
            }
            other => panic!("expected saturation, got {other:?}"),
        }
    }

    #[test]
    fn surplus_mass_shrinks_from_the_smallest_fraction() {
        let inst = plain_instance(4);
        let (t1, t2) = pair();
        let frac =
            Dataset::from_entries([(t1.clone(), q(3, 1)), (t2.clone(), q(5, 2))]).unwrap();
        let rounded = round_solution(&inst, &frac, 4).unwrap();
        assert_eq!(rounded.get(&t1), Some(&BigInt::from(2)));
        assert_eq!(rounded.get(&t2), Some(&BigInt::from(2)));
    }

    #[test]
    fn an_uncapped_entry_soaks_up_many_units() {
        let inst = plain_instance(3);
        let (t1, _) = pair();
        let frac = Dataset::from_entries([(t1.clone(), q(1, 2))]).unwrap();
        let rounded = round_solution(&inst, &frac, 3).unwrap();
        assert_eq!(rounded.get(&t1), Some(&BigInt::from(3)));
        assert_eq!(rounded.total(), BigInt::from(3));
    }

    #[test]
    fn an_empty_solution_cannot_reach_a_positive_size() {
        let inst = plain_instance(2);
        let frac: Dataset<Rational> = Dataset::new();
        match round_solution(&inst, &frac, 2) {
            Err(RoundError::CapSaturation { partial, deficit }) => {
                assert_eq!(deficit, 2);
                assert!(partial.is_empty());
            }
            other => panic!("expected saturation, got {other:?}"),
        }
        assert!(round_solution(&inst, &frac, 0).unwrap().is_empty());
    }
}
