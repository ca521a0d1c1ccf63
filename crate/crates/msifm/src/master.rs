//! Master program layout: rows, artificial columns, transaction columns.
//!
//! The program minimizes total constraint violation. Every condition of the
//! instance becomes one or two `>=` rows; a transaction column has
//! coefficient +1 in a lower row and -1 in an upper row whenever the
//! transaction satisfies the row's selection. Artificial columns (cost 1,
//! coefficient +1 on their row) absorb violations of the rows that can be
//! violated: lower and upper support rows and the size floor. Infrequency
//! caps and the size ceiling get none, they are satisfiable by shrinking,
//! so the program is always feasible and its value measures infeasibility
//! of the instance. Value zero means a fractional dataset exists.
//!
//! Duplicate caps never become rows; they ride along as variable bounds on
//! the transaction columns.

use crate::border::Border;
use crate::model::{
    eval_selection, ConstraintInstance, ItemSet, ModelError, Schema, SelectionList, Transaction,
};
use crate::scalar::LpScalar;
use crate::simplex::{BasisState, Column, VarId};

/// Families in row order. Lower-like rows carry coefficient +1, the rest -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowFamily {
    SvLower,
    SvUpper,
    MvLower,
    MvUpper,
    Infrequency,
    MsLower,
    MsUpper,
    SizeLower,
    SizeUpper,
}

impl RowFamily {
    pub fn is_lower(self) -> bool {
        matches!(
            self,
            RowFamily::SvLower | RowFamily::MvLower | RowFamily::MsLower | RowFamily::SizeLower
        )
    }

    /// Whether rows of this family can be violated at cost.
    pub fn has_artificial(self) -> bool {
        !matches!(self, RowFamily::Infrequency | RowFamily::SizeUpper)
    }
}

/// The membership test a row applies to a transaction.
#[derive(Clone, Debug)]
pub enum RowTest {
    SvItem { attr: usize, item: usize },
    MvSubset { attr: usize, itemset: ItemSet },
    Ms { selection: SelectionList },
    Size,
}

#[derive(Clone, Debug)]
pub struct Row {
    family: RowFamily,
    test: RowTest,
    rhs: i128,
}

impl Row {
    pub fn family(&self) -> RowFamily {
        self.family
    }

    pub fn test(&self) -> &RowTest {
        &self.test
    }

    pub fn signed_rhs(&self) -> i128 {
        self.rhs
    }

    pub fn rhs<S: LpScalar>(&self) -> S {
        let mag = S::from_count(self.rhs.unsigned_abs() as u64);
        if self.rhs < 0 {
            -mag
        } else {
            mag
        }
    }

    fn satisfied_by(&self, schema: &Schema, t: &Transaction) -> Result<bool, ModelError> {
        Ok(match &self.test {
            RowTest::SvItem { attr, item } => t.sv_value(*attr) == *item,
            RowTest::MvSubset { attr, itemset } => itemset.is_subset_of(t.mv_set(*attr)),
            RowTest::Ms { selection } => eval_selection(schema, selection, t)?,
            RowTest::Size => true,
        })
    }
}

/// Ordered rows of the program, plus the schema they are defined over.
#[derive(Clone, Debug)]
pub struct RowSet {
    schema: Schema,
    rows: Vec<Row>,
}

impl RowSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, g: usize) -> &Row {
        &self.rows[g]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rhs_vector<S: LpScalar>(&self) -> Vec<S> {
        self.rows.iter().map(Row::rhs).collect()
    }
}

/// Lays the rows out family by family; within a family attribute order,
/// then item or canonical itemset order, then constraint order.
pub fn build_rows(inst: &ConstraintInstance, border: &Border) -> RowSet {
    let mut rows = Vec::new();
    for c in inst.sv_domain() {
        rows.push(Row {
            family: RowFamily::SvLower,
            test: RowTest::SvItem { attr: c.attr, item: c.item },
            rhs: c.lo as i128,
        });
    }
    for c in inst.sv_domain() {
        rows.push(Row {
            family: RowFamily::SvUpper,
            test: RowTest::SvItem { attr: c.attr, item: c.item },
            rhs: -(c.hi as i128),
        });
    }
    for c in inst.mv_domain() {
        rows.push(Row {
            family: RowFamily::MvLower,
            test: RowTest::MvSubset { attr: c.attr, itemset: c.itemset.clone() },
            rhs: c.lo as i128,
        });
    }
    for c in inst.mv_domain() {
        rows.push(Row {
            family: RowFamily::MvUpper,
            test: RowTest::MvSubset { attr: c.attr, itemset: c.itemset.clone() },
            rhs: -(c.hi as i128),
        });
    }
    if let Some(sigma_prime) = inst.sigma_prime() {
        for (attr, members) in border.per_attr().iter().enumerate() {
            for itemset in members {
                rows.push(Row {
                    family: RowFamily::Infrequency,
                    test: RowTest::MvSubset { attr, itemset: itemset.clone() },
                    rhs: -(sigma_prime as i128),
                });
            }
        }
    }
    for c in inst.ms() {
        rows.push(Row {
            family: RowFamily::MsLower,
            test: RowTest::Ms { selection: c.selection.clone() },
            rhs: c.lo as i128,
        });
    }
    for c in inst.ms() {
        rows.push(Row {
            family: RowFamily::MsUpper,
            test: RowTest::Ms { selection: c.selection.clone() },
            rhs: -(c.hi as i128),
        });
    }
    rows.push(Row { family: RowFamily::SizeLower, test: RowTest::Size, rhs: inst.size() as i128 });
    rows.push(Row {
        family: RowFamily::SizeUpper,
        test: RowTest::Size,
        rhs: -(inst.size() as i128),
    });
    RowSet { schema: inst.schema().clone(), rows }
}

/// Sparse coefficient vector of a transaction: +1 in satisfied lower rows,
/// -1 in satisfied upper rows, indices ascending.
pub fn column_of<S: LpScalar>(
    t: &Transaction,
    rows: &RowSet,
) -> Result<Vec<(usize, S)>, ModelError> {
    let mut coeffs = Vec::new();
    for (g, row) in rows.rows.iter().enumerate() {
        if row.satisfied_by(&rows.schema, t)? {
            let c = if row.family.is_lower() { S::one() } else { -S::one() };
            coeffs.push((g, c));
        }
    }
    Ok(coeffs)
}

/// Cap on a transaction column, the tightest matching duplicate constraint.
pub fn upper_bound_of(
    t: &Transaction,
    inst: &ConstraintInstance,
) -> Result<Option<u64>, ModelError> {
    inst.duplicate_cap(t)
}

/// A column of the master program by meaning rather than by numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MasterColumn {
    /// Violation absorber for one row.
    Artificial(usize),
    TransactionCol(Transaction),
}

/// Materializes a master column for the solver.
pub fn lp_column<S: LpScalar>(
    mc: &MasterColumn,
    rows: &RowSet,
    inst: &ConstraintInstance,
) -> Result<Column<S>, ModelError> {
    match mc {
        MasterColumn::Artificial(g) => {
            debug_assert!(rows.row(*g).family().has_artificial());
            Ok(Column::new(vec![(*g, S::one())], S::one(), None))
        }
        MasterColumn::TransactionCol(t) => {
            let coeffs = column_of(t, rows)?;
            let upper = upper_bound_of(t, inst)?.map(S::from_count);
            Ok(Column::new(coeffs, S::zero(), upper))
        }
    }
}

/// Initial column list and basis. Artificial columns come first, one per
/// row that admits one, then a seed transaction per frequent itemset (its
/// itemset on its own attribute, first domain item per single-valued
/// attribute, other set-valued attributes empty). The basis holds the
/// lower-row artificials at their rhs and every other row's surplus, which
/// is feasible outright, so the solver never needs a phase one here.
pub fn initial_state<S: LpScalar>(
    inst: &ConstraintInstance,
    rows: &RowSet,
) -> (Vec<MasterColumn>, BasisState<S>) {
    let mut columns = Vec::new();
    let mut art_of_row = vec![None; rows.len()];
    for (g, row) in rows.rows.iter().enumerate() {
        if row.family().has_artificial() {
            art_of_row[g] = Some(columns.len());
            columns.push(MasterColumn::Artificial(g));
        }
    }
    for c in inst.mv_domain() {
        columns.push(MasterColumn::TransactionCol(seed_transaction(
            inst.schema(),
            c.attr,
            &c.itemset,
        )));
    }

    let mut basis = Vec::with_capacity(rows.len());
    let mut basic_values = Vec::with_capacity(rows.len());
    let mut duals = Vec::with_capacity(rows.len());
    let mut objective = S::zero();
    for (g, row) in rows.rows.iter().enumerate() {
        if row.family().is_lower() {
            let j = art_of_row[g].expect("lower rows all have artificials");
            basis.push(VarId::Col(j));
            let value: S = row.rhs();
            objective += value.clone();
            basic_values.push(value);
            duals.push(S::one());
        } else {
            basis.push(VarId::Surplus(g));
            basic_values.push(-row.rhs::<S>());
            duals.push(S::zero());
        }
    }
    let state = BasisState {
        basis,
        at_upper: Default::default(),
        basic_values,
        duals,
        objective,
    };
    (columns, state)
}

/// The canonical transaction carrying one frequent itemset.
pub fn seed_transaction(schema: &Schema, attr: usize, itemset: &ItemSet) -> Transaction {
    let sv = vec![0; schema.p()];
    let mv = (0..schema.q())
        .map(|i| if i == attr { itemset.clone() } else { ItemSet::empty() })
        .collect();
    Transaction::new(schema, sv, mv).expect("seed transaction is well-formed")
}
