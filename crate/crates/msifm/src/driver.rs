//! The column-generation outer loop and the full-expansion oracle.
//!
//! `run_colgen` alternates restricted-master solves with pricing until no
//! transaction column prices negative or the time budget runs out. The
//! column pool is monotone: artificial columns stay in the program for the
//! whole run and generated transaction columns are never dropped, which
//! keeps every warm start valid. `run_oracle` instead materializes one
//! column per transaction of the schema and solves the whole program at
//! once; it exists as the ground truth the loop is checked against, so it
//! refuses schemas past a hard column cap.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num::BigUint;
use thiserror::Error;

use crate::border::{Border, BorderError, DEFAULT_BORDER_CAP};
use crate::master::{self, build_rows, MasterColumn};
use crate::model::{
    all_transactions, count_transactions, ConstraintInstance, Dataset, ModelError, Transaction,
};
use crate::pricing::{price, PriceOutcome, PricingError, PricingProblem};
use crate::scalar::LpScalar;
use crate::simplex::{solve_restricted, BasisState, LinearProgram, SimplexError, SolveOptions};

/// Ceiling on materialized columns in `run_oracle`.
pub const DEFAULT_ORACLE_CAP: u64 = 65_536;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Border(#[from] BorderError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("pricing failed: {0}")]
    Pricing(PricingError),
    #[error("schema admits {transactions} transactions, over the oracle cap of {cap}")]
    TooLarge { transactions: BigUint, cap: u64 },
}

#[derive(Clone, Debug)]
pub struct ColgenOptions {
    pub time_limit: Option<Duration>,
    pub border_cap: usize,
    /// Run the solver's self-checks on every pivot. Costly; meant for tests.
    pub check_invariants: bool,
}

impl Default for ColgenOptions {
    fn default() -> ColgenOptions {
        ColgenOptions {
            time_limit: None,
            border_cap: DEFAULT_BORDER_CAP,
            check_invariants: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// No transaction column prices negative: the objective is the true
    /// optimum of the full program.
    Optimal,
    /// The time budget ran out; the result is feasible but may be above
    /// the optimum.
    TimeLimit,
}

/// Outcome of a column-generation run.
///
/// `objective` is the total artificial mass: zero exactly when the instance
/// is satisfiable in the relaxed sense. `dataset` collects the transaction
/// columns with positive value, duplicate-capped columns at their caps
/// included.
#[derive(Clone, Debug)]
pub struct ColgenResult<S: LpScalar> {
    pub state: BasisState<S>,
    pub objective: S,
    pub dataset: Dataset<S>,
    pub iterations: usize,
    pub termination: Termination,
    pub max_live_columns: usize,
}

/// One fresh column, reported just before it enters the program.
#[derive(Debug)]
pub struct Progress<'a, S> {
    pub iteration: usize,
    pub objective: &'a S,
    pub column: &'a Transaction,
    pub reduced_cost: &'a S,
}

pub fn run_colgen<S, F>(
    inst: &ConstraintInstance,
    opts: &ColgenOptions,
    mut observer: F,
) -> Result<ColgenResult<S>, DriverError>
where
    S: LpScalar,
    F: FnMut(&Progress<'_, S>),
{
    let deadline = opts.time_limit.map(|d| Instant::now() + d);
    let border = match inst.sigma_prime() {
        Some(_) => Border::compute(inst, opts.border_cap)?,
        None => Border::empty(inst.schema()),
    };
    let rows = build_rows(inst, &border);
    let (mut pool, initial) = master::initial_state::<S>(inst, &rows);
    let mut lp = LinearProgram::new(rows.rhs_vector(), Vec::new())?;
    for mc in &pool {
        lp.push_column(master::lp_column(mc, &rows, inst)?)?;
    }
    let mut excluded: BTreeSet<Transaction> = pool
        .iter()
        .filter_map(|mc| match mc {
            MasterColumn::TransactionCol(t) => Some(t.clone()),
            MasterColumn::Artificial(_) => None,
        })
        .collect();

    let solve_opts = SolveOptions { deadline, check_invariants: opts.check_invariants };
    let mut state = initial;
    let mut iterations = 0;
    let mut max_live = lp.columns().len();
    let termination = loop {
        state = match solve_restricted(&lp, Some(&state), &solve_opts) {
            Ok(next) => next,
            // No partial pivots escape the solver; the last completed
            // restricted solution stands.
            Err(SimplexError::Deadline) => break Termination::TimeLimit,
            Err(e) => return Err(e.into()),
        };
        iterations += 1;
        if state.objective <= S::tolerance() {
            // Nothing can price below an objective of zero.
            break Termination::Optimal;
        }
        let pp = PricingProblem {
            inst,
            rows: &rows,
            duals: &state.duals,
            excluded: &excluded,
            deadline,
        };
        match price(&pp) {
            Err(PricingError::TimeBudgetExceeded) => break Termination::TimeLimit,
            Err(e) => return Err(DriverError::Pricing(e)),
            Ok(PriceOutcome::NoColumn) => break Termination::Optimal,
            Ok(PriceOutcome::Column { transaction, reduced_cost }) => {
                if reduced_cost >= -S::tolerance() {
                    break Termination::Optimal;
                }
                observer(&Progress {
                    iteration: iterations,
                    objective: &state.objective,
                    column: &transaction,
                    reduced_cost: &reduced_cost,
                });
                let mc = MasterColumn::TransactionCol(transaction.clone());
                lp.push_column(master::lp_column(&mc, &rows, inst)?)?;
                pool.push(mc);
                max_live = max_live.max(lp.columns().len());
                if !excluded.insert(transaction) {
                    // A repeated column cannot help; only reachable if the
                    // pricing exclusion were broken.
                    debug_assert!(false, "pricing returned a pooled transaction");
                    break Termination::Optimal;
                }
            }
        }
    };

    let dataset = fractional_dataset(&pool, &state)?;
    Ok(ColgenResult {
        objective: state.objective.clone(),
        state,
        dataset,
        iterations,
        termination,
        max_live_columns: max_live,
    })
}

/// Result of solving the fully-expanded program.
#[derive(Clone, Debug)]
pub struct OracleResult<S: LpScalar> {
    pub objective: S,
    pub dataset: Dataset<S>,
    pub columns_materialized: usize,
    pub state: BasisState<S>,
}

#[derive(Clone, Debug)]
pub struct OracleOptions {
    pub column_cap: u64,
    pub border_cap: usize,
    pub check_invariants: bool,
}

impl Default for OracleOptions {
    fn default() -> OracleOptions {
        OracleOptions {
            column_cap: DEFAULT_ORACLE_CAP,
            border_cap: DEFAULT_BORDER_CAP,
            check_invariants: false,
        }
    }
}

pub fn run_oracle<S: LpScalar>(
    inst: &ConstraintInstance,
    opts: &OracleOptions,
) -> Result<OracleResult<S>, DriverError> {
    let transactions = count_transactions(inst.schema());
    if transactions > BigUint::from(opts.column_cap) {
        return Err(DriverError::TooLarge { transactions, cap: opts.column_cap });
    }
    let border = match inst.sigma_prime() {
        Some(_) => Border::compute(inst, opts.border_cap)?,
        None => Border::empty(inst.schema()),
    };
    let rows = build_rows(inst, &border);
    let (mut pool, initial) = master::initial_state::<S>(inst, &rows);
    // The initial basis only names artificial columns, so the seed columns
    // can give way to the full canonical transaction list.
    let artificials = pool
        .iter()
        .take_while(|mc| matches!(mc, MasterColumn::Artificial(_)))
        .count();
    pool.truncate(artificials);
    pool.extend(all_transactions(inst.schema()).map(MasterColumn::TransactionCol));

    let mut lp = LinearProgram::new(rows.rhs_vector(), Vec::new())?;
    for mc in &pool {
        lp.push_column(master::lp_column(mc, &rows, inst)?)?;
    }
    let solve_opts = SolveOptions { deadline: None, check_invariants: opts.check_invariants };
    let state = solve_restricted(&lp, Some(&initial), &solve_opts)?;
    let dataset = fractional_dataset(&pool, &state)?;
    Ok(OracleResult {
        objective: state.objective.clone(),
        dataset,
        columns_materialized: lp.columns().len(),
        state,
    })
}

fn fractional_dataset<S: LpScalar>(
    pool: &[MasterColumn],
    state: &BasisState<S>,
) -> Result<Dataset<S>, ModelError> {
    let mut dataset = Dataset::new();
    for (j, mc) in pool.iter().enumerate() {
        if let MasterColumn::TransactionCol(t) = mc {
            let value = state.value_of(j);
            if value > S::tolerance() {
                dataset.insert(t.clone(), value)?;
            }
        }
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::tests::shirt_instance;
    use crate::model::{
        verify, ItemSet, MvDomainConstraint, MvOp, Schema, SupportConstraint, SvDomainConstraint,
    };
    use crate::scalar::Count;
    use crate::Rational;
    use num::Zero;

    fn checked() -> ColgenOptions {
        ColgenOptions { check_invariants: true, ..Default::default() }
    }

    // The shirt instance with a reachable support floor and a size the
    // color caps can cover; satisfiable, unlike the original.
    fn feasible_shirt() -> ConstraintInstance {
        let schema = Schema::new(
            vec![("Color".into(), vec!["Red".into(), "Blue".into()])],
            vec![("Tags".into(), vec!["a".into(), "b".into(), "c".into()])],
        )
        .unwrap();
        let ms = ConstraintInstance::parse_selection(
            &schema,
            &[("Color", "Red")],
            &[("Tags", &["a"], MvOp::Subset)],
        )
        .unwrap();
        ConstraintInstance::new(
            schema,
            vec![
                SvDomainConstraint { attr: 0, item: 0, lo: 1, hi: 3 },
                SvDomainConstraint { attr: 0, item: 1, lo: 0, hi: 10 },
            ],
            vec![
                MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![0]), lo: 0, hi: 2 },
                MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![0, 1]), lo: 1, hi: 2 },
            ],
            vec![SupportConstraint { selection: ms, lo: 1, hi: 8 }],
            vec![],
            Some(7),
            12,
        )
        .unwrap()
    }

    #[test]
    fn size_only_instance_closes_at_zero() {
        let schema =
            Schema::new(vec![], vec![("G".into(), vec!["a".into(), "b".into()])]).unwrap();
        let inst =
            ConstraintInstance::new(schema, vec![], vec![], vec![], vec![], None, 7).unwrap();
        let mut seen = Vec::new();
        let res = run_colgen::<Rational, _>(&inst, &checked(), |p| {
            seen.push((p.iteration, p.column.clone(), p.reduced_cost.clone()));
        })
        .unwrap();
        assert_eq!(res.termination, Termination::Optimal);
        assert!(res.objective.is_zero());
        assert_eq!(res.iterations, 2);

        let least = all_transactions(inst.schema()).next().unwrap();
        let entries: Vec<_> = res.dataset.iter().collect();
        assert_eq!(entries, vec![(&least, &Rational::from_count(7))]);

        assert_eq!(seen.len(), 1);
        assert_eq!(seen[0].0, 1);
        assert_eq!(seen[0].1, least);
        assert_eq!(seen[0].2, -Rational::from_count(1));
    }

    #[test]
    fn feasible_instance_matches_the_oracle_at_zero() {
        let inst = feasible_shirt();
        let colgen = run_colgen::<Rational, _>(&inst, &checked(), |_| {}).unwrap();
        let oracle = run_oracle::<Rational>(
            &inst,
            &OracleOptions { check_invariants: true, ..Default::default() },
        )
        .unwrap();
        assert_eq!(colgen.termination, Termination::Optimal);
        assert!(colgen.objective.is_zero(), "got {}", colgen.objective);
        assert_eq!(colgen.objective, oracle.objective);
        assert_eq!(oracle.columns_materialized, 11 + 16);

        // A zero objective means the fractional dataset already satisfies
        // every support condition.
        let border = Border::compute(&inst, 100).unwrap();
        let report = verify(&inst, &colgen.dataset, border.per_attr()).unwrap();
        assert!(report.is_empty(), "violations: {:?}", report.violations());
        assert_eq!(colgen.dataset.total(), Rational::from_count(12));
    }

    #[test]
    fn infeasible_instance_agrees_with_the_oracle_above_zero() {
        let inst = shirt_instance();
        let colgen = run_colgen::<Rational, _>(&inst, &checked(), |_| {}).unwrap();
        let oracle = run_oracle::<Rational>(&inst, &OracleOptions::default()).unwrap();
        assert_eq!(colgen.termination, Termination::Optimal);
        assert!(colgen.objective > Rational::zero());
        assert_eq!(colgen.objective, oracle.objective);
    }

    #[test]
    fn float_arithmetic_lands_within_tolerance() {
        let inst = feasible_shirt();
        let res = run_colgen::<f64, _>(&inst, &checked(), |_| {}).unwrap();
        assert_eq!(res.termination, Termination::Optimal);
        assert!(res.objective.abs() <= 1e-9, "got {}", res.objective);
    }

    #[test]
    fn oracle_rejects_oversized_schemas() {
        let items: Vec<String> = (0..20).map(|i| format!("g{i}")).collect();
        let schema = Schema::new(vec![], vec![("G".into(), items)]).unwrap();
        let inst =
            ConstraintInstance::new(schema, vec![], vec![], vec![], vec![], None, 5).unwrap();
        match run_oracle::<Rational>(&inst, &OracleOptions::default()) {
            Err(DriverError::TooLarge { transactions, cap }) => {
                assert_eq!(transactions, BigUint::from(1u32 << 20));
                assert_eq!(cap, DEFAULT_ORACLE_CAP);
            }
            other => panic!("expected TooLarge, got {other:?}"),
        }
    }

    #[test]
    fn zero_time_limit_stops_before_solving() {
        let inst = feasible_shirt();
        let opts = ColgenOptions { time_limit: Some(Duration::ZERO), ..Default::default() };
        let res = run_colgen::<Rational, _>(&inst, &opts, |_| {}).unwrap();
        assert_eq!(res.termination, Termination::TimeLimit);
        assert_eq!(res.iterations, 0);
        assert!(res.objective > Rational::zero());
    }

    #[test]
    fn live_columns_stay_within_the_bound() {
        for inst in [feasible_shirt(), shirt_instance()] {
            let res = run_colgen::<Rational, _>(&inst, &checked(), |_| {}).unwrap();
            let border = Border::compute(&inst, 100).unwrap();
            let rows = build_rows(&inst, &border);
            let seeds = inst.mv_domain().len();
            assert!(
                res.max_live_columns <= rows.len() + seeds + res.iterations,
                "{} live columns after {} iterations over {} rows",
                res.max_live_columns,
                res.iterations,
                rows.len()
            );
        }
    }
}
