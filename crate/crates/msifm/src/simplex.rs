//! Revised simplex over columns with individual upper bounds.
//!
//! Programs are minimization over `A x >= b`, `0 <= x`, with optional caps
//! `x_j <= u_j` on single columns. Caps are handled as variable bounds, not
//! rows: a non-basic variable may sit at zero or at its cap, and a pivot
//! step may simply flip a variable between the two without touching the
//! basis. Each row carries an implicit surplus variable, so a basis is an
//! assignment of one column or surplus per row.
//!
//! Entering variables are chosen by Bland's rule (the first eligible in
//! canonical order), leaving variables by minimum ratio with ties broken by
//! the smallest variable id. With exact arithmetic this provably never
//! cycles; float mode uses the same rule with a tolerance.
//!
//! The basis inverse is kept explicitly and updated per pivot; at desk
//! scale (tens of rows) this is simpler and fast enough. A warm start is
//! just a basis plus the set of capped variables: primal values and duals
//! are always recomputed, never trusted.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::scalar::LpScalar;

/// One column of the program.
#[derive(Clone, Debug)]
pub struct Column<S> {
    /// Sparse coefficients as `(row, value)`, rows strictly increasing.
    pub coeffs: Vec<(usize, S)>,
    pub cost: S,
    /// Cap on the variable, exclusive with unboundedness. Must be positive.
    pub upper: Option<S>,
}

impl<S: LpScalar> Column<S> {
    pub fn new(coeffs: Vec<(usize, S)>, cost: S, upper: Option<S>) -> Column<S> {
        Column { coeffs, cost, upper }
    }
}

/// A minimization program over `>=` rows with an explicit column list.
#[derive(Clone, Debug)]
pub struct LinearProgram<S> {
    rhs: Vec<S>,
    cols: Vec<Column<S>>,
}

impl<S: LpScalar> LinearProgram<S> {
    pub fn new(rhs: Vec<S>, cols: Vec<Column<S>>) -> Result<LinearProgram<S>, SimplexError> {
        let r = rhs.len();
        for (j, col) in cols.iter().enumerate() {
            validate_column(j, col, r)?;
        }
        Ok(LinearProgram { rhs, cols })
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn rhs(&self) -> &[S] {
        &self.rhs
    }

    pub fn columns(&self) -> &[Column<S>] {
        &self.cols
    }

    /// Appends a column, keeping existing ids stable.
    pub fn push_column(&mut self, col: Column<S>) -> Result<usize, SimplexError> {
        let id = self.cols.len();
        validate_column(id, &col, self.rhs.len())?;
        self.cols.push(col);
        Ok(id)
    }
}

fn validate_column<S: LpScalar>(j: usize, col: &Column<S>, r: usize) -> Result<(), SimplexError> {
    let mut prev: Option<usize> = None;
    for (g, _) in &col.coeffs {
        if *g >= r {
            return Err(SimplexError::DimensionMismatch(format!(
                "column {j} references row {g} of {r}"
            )));
        }
        if prev.is_some_and(|p| p >= *g) {
            return Err(SimplexError::DimensionMismatch(format!(
                "column {j} has unsorted or duplicate row indices"
            )));
        }
        prev = Some(*g);
    }
    if col.upper.as_ref().is_some_and(|u| !u.is_positive()) {
        return Err(SimplexError::DimensionMismatch(format!(
            "column {j} has a non-positive cap"
        )));
    }
    Ok(())
}

/// A variable the solver can hold in a basis. Canonical order (explicit
/// columns first, then surpluses) is what Bland's rule walks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    /// Index into the explicit column list.
    Col(usize),
    /// Implicit surplus of a row.
    Surplus(usize),
    /// Phase-one artificial of a row; never part of a returned state.
    Art(usize),
}

/// An extended basic solution: one basic variable per row, every other
/// column at zero or at its cap.
#[derive(Clone, Debug)]
pub struct BasisState<S> {
    /// Basic variable per row position.
    pub basis: Vec<VarId>,
    /// Columns fixed at their cap, with the cap value.
    pub at_upper: BTreeMap<usize, S>,
    /// Values of the basic variables, aligned with `basis`.
    pub basic_values: Vec<S>,
    /// One dual per row.
    pub duals: Vec<S>,
    pub objective: S,
}

impl<S: LpScalar> BasisState<S> {
    /// Primal value of an explicit column in this state.
    pub fn value_of(&self, col: usize) -> S {
        if let Some(u) = self.at_upper.get(&col) {
            return u.clone();
        }
        self.basis
            .iter()
            .position(|v| *v == VarId::Col(col))
            .map(|i| self.basic_values[i].clone())
            .unwrap_or_else(S::zero)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SimplexError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("program is infeasible")]
    Infeasible,
    #[error("program is unbounded")]
    Unbounded,
    #[error("invalid warm start: {0}")]
    InvalidWarmStart(String),
    #[error("deadline reached")]
    Deadline,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub deadline: Option<Instant>,
    /// Re-derives primal values from scratch after every pivot and asserts
    /// feasibility, monotone objective and that no basis repeats.
    pub check_invariants: bool,
}

/// Safety ceiling; Bland's rule terminates on its own in exact mode, this
/// only catches float-mode stalls.
const MAX_PIVOTS: usize = 200_000;

/// Solves the program. `warm` supplies a starting basis (primal values are
/// recomputed and must come out feasible); without one a two-phase cold
/// start is used.
pub fn solve_restricted<S: LpScalar>(
    lp: &LinearProgram<S>,
    warm: Option<&BasisState<S>>,
    opts: &SolveOptions,
) -> Result<BasisState<S>, SimplexError> {
    let mut solver = Solver::new(lp, opts)?;
    match warm {
        Some(state) => solver.start_warm(state)?,
        None => solver.start_cold()?,
    }
    solver.optimize(Phase::Two)?;
    Ok(solver.into_state())
}

/// Reduced cost of a column under the given duals: cost minus the dual
/// weight of its rows.
pub fn reduced_cost_of<S: LpScalar>(col: &Column<S>, duals: &[S]) -> Result<S, SimplexError> {
    for (g, _) in &col.coeffs {
        if *g >= duals.len() {
            return Err(SimplexError::DimensionMismatch(format!(
                "column references row {g} but only {} duals given",
                duals.len()
            )));
        }
    }
    Ok(col.cost.clone() - sparse_dot(&col.coeffs, duals))
}

fn sparse_dot<S: LpScalar>(coeffs: &[(usize, S)], dense: &[S]) -> S {
    let mut sum = S::zero();
    for (g, c) in coeffs {
        if c.is_one() {
            sum += dense[*g].clone();
        } else if (c.clone() + S::one()).is_zero() {
            sum -= dense[*g].clone();
        } else {
            sum += dense[*g].clone() * c.clone();
        }
    }
    sum
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

struct Solver<'a, S: LpScalar> {
    lp: &'a LinearProgram<S>,
    opts: &'a SolveOptions,
    basis: Vec<VarId>,
    pos: BTreeMap<VarId, usize>,
    at_upper: BTreeSet<usize>,
    inv: Vec<Vec<S>>,
    x: Vec<S>,
    pivots: usize,
    seen_bases: BTreeSet<(Vec<VarId>, Vec<usize>)>,
    last_objective: Option<S>,
}

impl<'a, S: LpScalar> Solver<'a, S> {
    fn new(lp: &'a LinearProgram<S>, opts: &'a SolveOptions) -> Result<Self, SimplexError> {
        Ok(Solver {
            lp,
            opts,
            basis: Vec::new(),
            pos: BTreeMap::new(),
            at_upper: BTreeSet::new(),
            inv: Vec::new(),
            x: Vec::new(),
            pivots: 0,
            seen_bases: BTreeSet::new(),
            last_objective: None,
        })
    }

    fn rows(&self) -> usize {
        self.lp.rows()
    }

    fn cost_of(&self, v: VarId, phase: Phase) -> S {
        match (phase, v) {
            (Phase::One, VarId::Art(_)) => S::one(),
            (Phase::One, _) => S::zero(),
            (Phase::Two, VarId::Col(j)) => self.lp.cols[j].cost.clone(),
            (Phase::Two, _) => S::zero(),
        }
    }

    fn upper_of(&self, v: VarId) -> Option<S> {
        match v {
            VarId::Col(j) => self.lp.cols[j].upper.clone(),
            _ => None,
        }
    }

    fn set_basis(&mut self, basis: Vec<VarId>) {
        self.pos = basis.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        self.basis = basis;
    }

    /// Gauss-Jordan inversion of the current basis matrix.
    fn compute_inverse(&mut self) -> Result<(), SimplexError> {
        let r = self.rows();
        let mut m: Vec<Vec<S>> = vec![vec![S::zero(); r]; r];
        for (i, v) in self.basis.iter().enumerate() {
            for (g, c) in self.coeffs_of(*v) {
                m[g][i] = c;
            }
        }
        let mut inv: Vec<Vec<S>> = (0..r)
            .map(|g| (0..r).map(|h| if g == h { S::one() } else { S::zero() }).collect())
            .collect();
        for k in 0..r {
            let pivot_row = (k..r)
                .filter(|&i| m[i][k].abs() > S::tolerance())
                .max_by(|&a, &b| {
                    m[a][k].abs().partial_cmp(&m[b][k].abs()).unwrap_or(std::cmp::Ordering::Equal)
                })
                .ok_or_else(|| {
                    SimplexError::NumericFailure("singular basis matrix".into())
                })?;
            m.swap(k, pivot_row);
            inv.swap(k, pivot_row);
            let piv = m[k][k].clone();
            for val in m[k].iter_mut() {
                *val /= piv.clone();
            }
            for val in inv[k].iter_mut() {
                *val /= piv.clone();
            }
            for i in 0..r {
                if i == k || m[i][k].is_zero() {
                    continue;
                }
                let factor = m[i][k].clone();
                for h in 0..r {
                    let d = factor.clone() * m[k][h].clone();
                    m[i][h] -= d;
                    let d = factor.clone() * inv[k][h].clone();
                    inv[i][h] -= d;
                }
            }
        }
        self.inv = inv;
        Ok(())
    }

    /// Right-hand side net of capped columns.
    fn effective_rhs(&self) -> Vec<S> {
        let mut b: Vec<S> = self.lp.rhs.to_vec();
        for &j in &self.at_upper {
            let u = self.lp.cols[j].upper.clone().expect("capped column has a cap");
            for (g, c) in &self.lp.cols[j].coeffs {
                b[*g] -= u.clone() * c.clone();
            }
        }
        b
    }

    fn recompute_values(&mut self) {
        let b = self.effective_rhs();
        self.x = self.inv.iter().map(|row| {
            let mut sum = S::zero();
            for (g, val) in row.iter().enumerate() {
                if !val.is_zero() && !b[g].is_zero() {
                    sum += val.clone() * b[g].clone();
                }
            }
            sum
        }).collect();
    }

    fn duals(&self, phase: Phase) -> Vec<S> {
        let costs: Vec<S> = self.basis.iter().map(|v| self.cost_of(*v, phase)).collect();
        (0..self.rows())
            .map(|g| {
                let mut sum = S::zero();
                for (i, c) in costs.iter().enumerate() {
                    if !c.is_zero() {
                        sum += c.clone() * self.inv[i][g].clone();
                    }
                }
                sum
            })
            .collect()
    }

    fn objective(&self, phase: Phase) -> S {
        let mut obj = S::zero();
        for (i, v) in self.basis.iter().enumerate() {
            let c = self.cost_of(*v, phase);
            if !c.is_zero() {
                obj += c * self.x[i].clone();
            }
        }
        for &j in &self.at_upper {
            let c = self.cost_of(VarId::Col(j), phase);
            if !c.is_zero() {
                obj += c * self.lp.cols[j].upper.clone().expect("capped column has a cap");
            }
        }
        obj
    }

    fn start_cold(&mut self) -> Result<(), SimplexError> {
        let r = self.rows();
        let basis = (0..r)
            .map(|g| {
                if self.lp.rhs[g] > S::zero() {
                    VarId::Art(g)
                } else {
                    VarId::Surplus(g)
                }
            })
            .collect();
        self.set_basis(basis);
        self.at_upper.clear();
        self.compute_inverse()?;
        self.recompute_values();
        if self.basis.iter().any(|v| matches!(v, VarId::Art(_))) {
            self.optimize(Phase::One)?;
            let infeasibility = self.objective(Phase::One);
            if infeasibility > S::tolerance() {
                return Err(SimplexError::Infeasible);
            }
            self.drive_out_artificials()?;
        }
        self.seen_bases.clear();
        self.last_objective = None;
        Ok(())
    }

    fn start_warm(&mut self, state: &BasisState<S>) -> Result<(), SimplexError> {
        let r = self.rows();
        if state.basis.len() != r {
            return Err(SimplexError::InvalidWarmStart(format!(
                "basis has {} entries for {r} rows",
                state.basis.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for v in &state.basis {
            match v {
                VarId::Col(j) if *j < self.lp.cols.len() => {}
                VarId::Surplus(g) if *g < r => {}
                _ => {
                    return Err(SimplexError::InvalidWarmStart(format!(
                        "basis entry {v:?} out of range"
                    )))
                }
            }
            if !seen.insert(*v) {
                return Err(SimplexError::InvalidWarmStart(format!(
                    "basis entry {v:?} repeated"
                )));
            }
        }
        for (j, _) in &state.at_upper {
            if *j >= self.lp.cols.len() || self.lp.cols[*j].upper.is_none() {
                return Err(SimplexError::InvalidWarmStart(format!(
                    "column {j} cannot sit at a cap"
                )));
            }
            if seen.contains(&VarId::Col(*j)) {
                return Err(SimplexError::InvalidWarmStart(format!(
                    "column {j} is both basic and capped"
                )));
            }
        }
        self.set_basis(state.basis.clone());
        self.at_upper = state.at_upper.keys().copied().collect();
        self.compute_inverse()?;
        self.recompute_values();
        for (i, val) in self.x.iter().enumerate() {
            let lo_ok = *val >= -S::tolerance();
            let hi_ok = self
                .upper_of(self.basis[i])
                .is_none_or(|u| *val <= u + S::tolerance());
            if !lo_ok || !hi_ok {
                return Err(SimplexError::InvalidWarmStart(format!(
                    "basis is primal infeasible at row {i}"
                )));
            }
        }
        Ok(())
    }

    /// Replaces remaining zero-valued artificials after phase one by
    /// degenerate pivots; the surplus of the same row always qualifies as a
    /// fallback entering variable.
    fn drive_out_artificials(&mut self) -> Result<(), SimplexError> {
        for i in 0..self.rows() {
            if !matches!(self.basis[i], VarId::Art(_)) {
                continue;
            }
            let candidates = (0..self.lp.cols.len())
                .map(VarId::Col)
                .chain((0..self.rows()).map(VarId::Surplus));
            let mut entered = false;
            for v in candidates {
                if self.pos.contains_key(&v) || self.at_upper_contains(v) {
                    continue;
                }
                let w_i = {
                    let mut sum = S::zero();
                    for (g, c) in self.coeffs_of(v) {
                        sum += self.inv[i][g].clone() * c;
                    }
                    sum
                };
                if w_i.abs() > S::tolerance() {
                    let w = self.tableau_column(v);
                    self.apply_pivot(v, Direction::Increase, S::zero(), Some(i), &w);
                    entered = true;
                    break;
                }
            }
            if !entered {
                return Err(SimplexError::NumericFailure(
                    "cannot eliminate artificial from basis".into(),
                ));
            }
        }
        Ok(())
    }

    fn at_upper_contains(&self, v: VarId) -> bool {
        matches!(v, VarId::Col(j) if self.at_upper.contains(&j))
    }

    /// Sparse coefficients of any variable in `(row, value)` form.
    fn coeffs_of(&self, v: VarId) -> Vec<(usize, S)> {
        match v {
            VarId::Col(j) => self.lp.cols[j].coeffs.clone(),
            VarId::Surplus(g) => vec![(g, -S::one())],
            VarId::Art(g) => vec![(g, S::one())],
        }
    }

    fn tableau_column(&self, v: VarId) -> Vec<S> {
        let coeffs = self.coeffs_of(v);
        (0..self.rows())
            .map(|i| {
                let mut sum = S::zero();
                for (g, c) in &coeffs {
                    if c.is_one() {
                        sum += self.inv[i][*g].clone();
                    } else if (c.clone() + S::one()).is_zero() {
                        sum -= self.inv[i][*g].clone();
                    } else {
                        sum += self.inv[i][*g].clone() * c.clone();
                    }
                }
                sum
            })
            .collect()
    }

    fn optimize(&mut self, phase: Phase) -> Result<(), SimplexError> {
        if self.opts.check_invariants {
            self.seen_bases.clear();
            self.last_objective = None;
        }
        loop {
            if let Some(deadline) = self.opts.deadline {
                if Instant::now() >= deadline {
                    return Err(SimplexError::Deadline);
                }
            }
            if self.pivots >= MAX_PIVOTS {
                return Err(SimplexError::NumericFailure("pivot limit reached".into()));
            }
            if self.opts.check_invariants {
                self.assert_invariants(phase)?;
            }
            let y = self.duals(phase);
            let Some((entering, direction)) = self.find_entering(phase, &y) else {
                return Ok(());
            };
            let w = self.tableau_column(entering);
            let step = self.ratio_test(entering, direction, &w)?;
            match step {
                Step::Flip(t) => {
                    let VarId::Col(j) = entering else { unreachable!("only columns flip") };
                    self.apply_flip(j, direction, t, &w);
                }
                Step::Pivot(t, leave_pos) => {
                    self.apply_pivot(entering, direction, t, Some(leave_pos), &w);
                }
            }
            self.pivots += 1;
        }
    }

    /// Bland's rule: the first non-basic variable, in canonical order, that
    /// improves. Variables at zero want negative reduced cost, variables at
    /// their cap positive. Artificials never re-enter.
    fn find_entering(&self, phase: Phase, y: &[S]) -> Option<(VarId, Direction)> {
        let candidates = (0..self.lp.cols.len())
            .map(VarId::Col)
            .chain((0..self.rows()).map(VarId::Surplus));
        for v in candidates {
            if self.pos.contains_key(&v) {
                continue;
            }
            let rc = {
                let mut rc = self.cost_of(v, phase);
                match v {
                    VarId::Col(j) => rc -= sparse_dot(&self.lp.cols[j].coeffs, y),
                    VarId::Surplus(g) => rc += y[g].clone(),
                    VarId::Art(g) => rc -= y[g].clone(),
                }
                rc
            };
            if self.at_upper_contains(v) {
                if rc > S::tolerance() {
                    return Some((v, Direction::Decrease));
                }
            } else if rc < -S::tolerance() {
                return Some((v, Direction::Increase));
            }
        }
        None
    }

    fn ratio_test(
        &self,
        entering: VarId,
        direction: Direction,
        w: &[S],
    ) -> Result<Step<S>, SimplexError> {
        let own_cap = self.upper_of(entering);
        let mut best: Option<(S, usize)> = None;
        for i in 0..self.rows() {
            let dw = match direction {
                Direction::Increase => w[i].clone(),
                Direction::Decrease => -w[i].clone(),
            };
            let candidate = if dw > S::tolerance() {
                Some(self.x[i].clone() / dw)
            } else if dw < -S::tolerance() {
                self.upper_of(self.basis[i])
                    .map(|u| (u - self.x[i].clone()) / -dw)
            } else {
                None
            };
            let Some(t) = candidate else { continue };
            let t = if t < S::zero() { S::zero() } else { t };
            let better = match &best {
                None => true,
                Some((bt, bi)) => {
                    t < *bt || (t == *bt && self.basis[i] < self.basis[*bi])
                }
            };
            if better {
                best = Some((t, i));
            }
        }
        match (own_cap, best) {
            (Some(u), Some((t, i))) => {
                if u <= t {
                    Ok(Step::Flip(u))
                } else {
                    Ok(Step::Pivot(t, i))
                }
            }
            (Some(u), None) => Ok(Step::Flip(u)),
            (None, Some((t, i))) => Ok(Step::Pivot(t, i)),
            (None, None) => Err(SimplexError::Unbounded),
        }
    }

    fn apply_flip(&mut self, j: usize, direction: Direction, t: S, w: &[S]) {
        for i in 0..self.rows() {
            let delta = match direction {
                Direction::Increase => w[i].clone() * t.clone(),
                Direction::Decrease => -(w[i].clone() * t.clone()),
            };
            self.x[i] -= delta;
        }
        match direction {
            Direction::Increase => {
                self.at_upper.insert(j);
            }
            Direction::Decrease => {
                self.at_upper.remove(&j);
            }
        }
    }

    fn apply_pivot(
        &mut self,
        entering: VarId,
        direction: Direction,
        t: S,
        leave_pos: Option<usize>,
        w: &[S],
    ) {
        let i_out = leave_pos.expect("pivot has a leaving position");
        for i in 0..self.rows() {
            if i == i_out {
                continue;
            }
            let delta = match direction {
                Direction::Increase => w[i].clone() * t.clone(),
                Direction::Decrease => -(w[i].clone() * t.clone()),
            };
            self.x[i] -= delta;
        }

        // The leaving variable goes to whichever bound the step drove it
        // towards: decreasing values bottom out at zero, increasing ones
        // stop at their cap.
        let leaving = self.basis[i_out];
        let dw = match direction {
            Direction::Increase => w[i_out].clone(),
            Direction::Decrease => -w[i_out].clone(),
        };
        if dw < S::zero() {
            if let VarId::Col(j) = leaving {
                self.at_upper.insert(j);
            }
        }

        let entering_value = match direction {
            Direction::Increase => t,
            Direction::Decrease => {
                if let VarId::Col(j) = entering {
                    self.at_upper.remove(&j);
                }
                self.upper_of(entering).expect("decrease starts from a cap") - t
            }
        };
        self.pos.remove(&leaving);
        self.pos.insert(entering, i_out);
        self.basis[i_out] = entering;
        self.x[i_out] = entering_value;

        // Standard inverse update: scale the pivot row, eliminate the rest.
        let piv = w[i_out].clone();
        for val in self.inv[i_out].iter_mut() {
            *val /= piv.clone();
        }
        for i in 0..self.rows() {
            if i == i_out || w[i].is_zero() {
                continue;
            }
            let factor = w[i].clone();
            for g in 0..self.rows() {
                let d = factor.clone() * self.inv[i_out][g].clone();
                self.inv[i][g] -= d;
            }
        }
    }

    fn assert_invariants(&mut self, phase: Phase) -> Result<(), SimplexError> {
        // Primal values must match a from-scratch recomputation; keep the
        // recomputed ones, they are the more accurate of the two.
        let saved = self.x.clone();
        self.recompute_values();
        for (a, b) in self.x.iter().zip(&saved) {
            if (a.clone() - b.clone()).abs() > checked_tol::<S>() {
                return Err(SimplexError::NumericFailure(
                    "incremental primal values drifted".into(),
                ));
            }
        }
        // Feasibility within bounds.
        for (i, val) in self.x.iter().enumerate() {
            if *val < -checked_tol::<S>() {
                return Err(SimplexError::NumericFailure(format!(
                    "basic value at row {i} is negative"
                )));
            }
            if let Some(u) = self.upper_of(self.basis[i]) {
                if *val > u + checked_tol::<S>() {
                    return Err(SimplexError::NumericFailure(format!(
                        "basic value at row {i} exceeds its cap"
                    )));
                }
            }
        }
        // Objective never increases along pivots of one phase.
        let obj = self.objective(phase);
        if let Some(prev) = &self.last_objective {
            if obj > prev.clone() + checked_tol::<S>() {
                return Err(SimplexError::NumericFailure(
                    "objective increased during a pivot".into(),
                ));
            }
        }
        self.last_objective = Some(obj);
        // No basis may repeat while Bland's rule is in force.
        let signature = (
            self.basis.clone(),
            self.at_upper.iter().copied().collect::<Vec<_>>(),
        );
        if !self.seen_bases.insert(signature) {
            return Err(SimplexError::NumericFailure("basis repeated".into()));
        }
        Ok(())
    }

    fn into_state(mut self) -> BasisState<S> {
        self.recompute_values();
        let duals = self.duals(Phase::Two);
        let objective = self.objective(Phase::Two);
        let at_upper = self
            .at_upper
            .iter()
            .map(|&j| (j, self.lp.cols[j].upper.clone().expect("capped column has a cap")))
            .collect();
        BasisState {
            basis: self.basis,
            at_upper,
            basic_values: self.x,
            duals,
            objective,
        }
    }
}

/// Larger comparison slack used only by the invariant checker, so float
/// runs do not trip over benign accumulation. Exact zero stays exact zero.
fn checked_tol<S: LpScalar>() -> S {
    S::from_count(1_000) * S::tolerance()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    /// From zero towards the cap.
    Increase,
    /// From the cap towards zero.
    Decrease,
}

enum Step<S> {
    /// The entering variable reaches its own bound first: no basis change.
    Flip(S),
    /// Usual pivot: step length and leaving basis position.
    Pivot(S, usize),
}
