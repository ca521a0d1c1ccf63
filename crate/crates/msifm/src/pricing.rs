//! PRICE: find the transaction column of minimum reduced cost.
//!
//! With column costs all zero the reduced cost of a transaction is minus
//! the dual weight of the rows it fires. Rows group by what they look at:
//! single-valued rows fire on one attribute value, set-valued domain and
//! infrequency rows on a subset test against one set-valued attribute, and
//! many-sorted rows on a conjunction across attributes. The search
//! therefore runs over a cross product of per-attribute candidates rather
//! than over all transactions.
//!
//! Per set-valued attribute, two components fire the same rows exactly
//! when they fire the same subset tests, and the firing pattern of any
//! component equals that of the union of the tests it fires. Those unions,
//! the union closure of the relevant test itemsets, are the class
//! representatives. Relevant tests are the domain-constraint itemsets,
//! subset selections of many-sorted constraints, and the border itemsets
//! whose firing a negative weight makes desirable; border tests with
//! non-negative weight stay out of the closure and are charged per member
//! as they fire. Equality selections split a class by the member they pin,
//! so each class is either one equality itemset or the remaining silent
//! members, enumerated lazily in order of (extra charge, canonical).
//!
//! The closure is assumed small; that holds for the frequent-set families
//! this tool targets, and the caller bounds runtime with a deadline.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::time::Instant;

use crate::master::{column_of, RowFamily, RowSet, RowTest};
use crate::model::{ConstraintInstance, ItemSet, ModelError, MvOp, Selection, Transaction};
use crate::scalar::LpScalar;

#[derive(Debug, Clone, thiserror::Error)]
pub enum PricingError {
    #[error("time budget exceeded")]
    TimeBudgetExceeded,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("got {got} duals for {want} rows")]
    DualsMismatch { got: usize, want: usize },
}

/// Inputs of one pricing round.
pub struct PricingProblem<'a, S> {
    pub inst: &'a ConstraintInstance,
    pub rows: &'a RowSet,
    pub duals: &'a [S],
    /// Transactions sitting at their caps; never returned.
    pub excluded: &'a BTreeSet<Transaction>,
    pub deadline: Option<Instant>,
}

#[derive(Clone, Debug)]
pub enum PriceOutcome<S> {
    Column { transaction: Transaction, reduced_cost: S },
    /// Every candidate is excluded.
    NoColumn,
}

/// Reduced cost of one transaction, straight from its coefficient vector.
pub fn reduced_cost<S: LpScalar>(
    t: &Transaction,
    rows: &RowSet,
    duals: &[S],
) -> Result<S, PricingError> {
    if duals.len() != rows.len() {
        return Err(PricingError::DualsMismatch { got: duals.len(), want: rows.len() });
    }
    let mut rc = S::zero();
    for (g, c) in column_of::<S>(t, rows)? {
        rc -= duals[g].clone() * c;
    }
    Ok(rc)
}

/// Minimizes reduced cost over the candidate space minus the excluded set,
/// ties broken by canonical transaction order.
pub fn price<S: LpScalar>(pp: &PricingProblem<'_, S>) -> Result<PriceOutcome<S>, PricingError> {
    let mut ws = Workspace::build(pp.inst, pp.rows, pp.duals)?;
    ws.search(pp)
}

/// The transactions the search ranges over: every single-valued value
/// combination crossed with each class lead. Excluded transactions are not
/// filtered here.
pub fn candidate_space<S: LpScalar>(
    inst: &ConstraintInstance,
    rows: &RowSet,
    duals: &[S],
) -> Result<Vec<Transaction>, PricingError> {
    let mut ws = Workspace::build(inst, rows, duals)?;
    let schema = inst.schema().clone();
    let mut out = BTreeSet::new();
    let sv_sizes: Vec<usize> = schema.sv_attrs().iter().map(|a| a.len()).collect();
    let mv_sizes: Vec<usize> = ws.mv.iter().map(Vec::len).collect();
    if mv_sizes.iter().any(|&n| n == 0) {
        return Ok(Vec::new());
    }
    for sv in Odometer::new(&sv_sizes) {
        for classes in Odometer::new(&mv_sizes) {
            let mut members = Vec::with_capacity(classes.len());
            for (attr, &ci) in classes.iter().enumerate() {
                let Some((_, m)) = ws.member(attr, ci, 0) else {
                    members.clear();
                    break;
                };
                members.push(m.clone());
            }
            if members.len() == classes.len() {
                out.insert(Transaction::new(&schema, sv.clone(), members)?);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Per-item candidate on a single-valued attribute.
struct SvCand<S> {
    weight: S,
    pass: Vec<bool>,
}

/// One candidate class on a set-valued attribute: a firing pattern plus
/// the members that realize it.
struct MvClass<S> {
    /// Weight of the subset-test rows the class fires.
    direct_rc: S,
    /// Per many-sorted constraint: do this attribute's components pass.
    pass: Vec<bool>,
    members: Members<S>,
}

enum Members<S> {
    /// An equality-pinned class: exactly one member, with its extra charge.
    Single(ItemSet, S),
    /// Silent members of a representative, walked lazily.
    Walk(MemberWalk<S>),
}

struct Workspace<S> {
    base: S,
    sv: Vec<Vec<SvCand<S>>>,
    mv: Vec<Vec<MvClass<S>>>,
    msw: Vec<S>,
}

impl<S: LpScalar> Workspace<S> {
    fn build(
        inst: &ConstraintInstance,
        rows: &RowSet,
        duals: &[S],
    ) -> Result<Workspace<S>, PricingError> {
        if duals.len() != rows.len() {
            return Err(PricingError::DualsMismatch { got: duals.len(), want: rows.len() });
        }
        let schema = inst.schema();
        let m = inst.ms().len();
        let mut base = S::zero();
        let mut svw: Vec<Vec<S>> = schema
            .sv_attrs()
            .iter()
            .map(|a| vec![S::zero(); a.len()])
            .collect();
        let mut direct: Vec<BTreeMap<ItemSet, S>> = vec![BTreeMap::new(); schema.q()];
        let mut extras: Vec<Vec<(ItemSet, S)>> = vec![Vec::new(); schema.q()];
        let mut msw = vec![S::zero(); m];
        let (mut next_lower, mut next_upper) = (0, 0);
        for (g, row) in rows.iter().enumerate() {
            // Firing a lower row earns -dual, an upper row +dual.
            let w = if row.family().is_lower() { -duals[g].clone() } else { duals[g].clone() };
            match (row.family(), row.test()) {
                (_, RowTest::Size) => base += w,
                (_, RowTest::SvItem { attr, item }) => svw[*attr][*item] += w,
                (RowFamily::Infrequency, RowTest::MvSubset { attr, itemset }) => {
                    if w < S::zero() {
                        *direct[*attr].entry(itemset.clone()).or_insert_with(S::zero) += w;
                    } else {
                        extras[*attr].push((itemset.clone(), w));
                    }
                }
                (_, RowTest::MvSubset { attr, itemset }) => {
                    *direct[*attr].entry(itemset.clone()).or_insert_with(S::zero) += w;
                }
                (RowFamily::MsLower, RowTest::Ms { .. }) => {
                    msw[next_lower] += w;
                    next_lower += 1;
                }
                (_, RowTest::Ms { .. }) => {
                    msw[next_upper] += w;
                    next_upper += 1;
                }
            }
        }

        // Selection components of the many-sorted constraints, by attribute.
        let mut sv_comps: Vec<Vec<(usize, usize)>> = vec![Vec::new(); schema.p()];
        let mut mv_comps: Vec<Vec<(usize, ItemSet, MvOp)>> = vec![Vec::new(); schema.q()];
        for (k, c) in inst.ms().iter().enumerate() {
            for sel in c.selection.entries() {
                match sel {
                    Selection::Sv { attr, item } => sv_comps[*attr].push((k, *item)),
                    Selection::Mv { attr, itemset, op } => {
                        mv_comps[*attr].push((k, itemset.clone(), *op))
                    }
                }
            }
        }

        let sv = svw
            .into_iter()
            .enumerate()
            .map(|(a, weights)| {
                weights
                    .into_iter()
                    .enumerate()
                    .map(|(v, weight)| {
                        let mut pass = vec![true; m];
                        for (k, item) in &sv_comps[a] {
                            pass[*k] = *item == v;
                        }
                        SvCand { weight, pass }
                    })
                    .collect()
            })
            .collect();

        let mut mv = Vec::with_capacity(schema.q());
        for attr in 0..schema.q() {
            mv.push(build_attr_classes(
                schema.mv_attr(attr).len(),
                &direct[attr],
                &extras[attr],
                &mv_comps[attr],
                m,
            ));
        }
        Ok(Workspace { base, sv, mv, msw })
    }

    /// k-th member of a class in (extra, canonical) order.
    fn member(&mut self, attr: usize, class: usize, k: usize) -> Option<(S, &ItemSet)> {
        match &mut self.mv[attr][class].members {
            Members::Single(member, extra) => {
                (k == 0).then_some((extra.clone(), &*member))
            }
            Members::Walk(walk) => walk.get(k).map(|(e, m)| (e.clone(), m)),
        }
    }

    fn search(&mut self, pp: &PricingProblem<'_, S>) -> Result<PriceOutcome<S>, PricingError> {
        let schema = pp.inst.schema().clone();
        let sv_sizes: Vec<usize> = schema.sv_attrs().iter().map(|a| a.len()).collect();
        let mv_sizes: Vec<usize> = self.mv.iter().map(Vec::len).collect();
        if mv_sizes.iter().any(|&n| n == 0) {
            return Ok(PriceOutcome::NoColumn);
        }
        let m = self.msw.len();
        let mut best: Option<(S, Transaction)> = None;
        let mut ticks = 0_u32;
        for sv in Odometer::new(&sv_sizes) {
            let mut sv_rc = self.base.clone();
            let mut sv_pass = vec![true; m];
            for (a, &v) in sv.iter().enumerate() {
                let cand = &self.sv[a][v];
                sv_rc += cand.weight.clone();
                for (k, p) in sv_pass.iter_mut().enumerate() {
                    *p &= cand.pass[k];
                }
            }
            for classes in Odometer::new(&mv_sizes) {
                ticks = ticks.wrapping_add(1);
                if ticks % 64 == 0 {
                    if let Some(deadline) = pp.deadline {
                        if Instant::now() >= deadline {
                            return Err(PricingError::TimeBudgetExceeded);
                        }
                    }
                }
                // Class-level reduced cost: direct weights, then the
                // many-sorted rows whose every component passes.
                let mut rc = sv_rc.clone();
                for (attr, &ci) in classes.iter().enumerate() {
                    rc += self.mv[attr][ci].direct_rc.clone();
                }
                for k in 0..m {
                    if sv_pass[k]
                        && classes.iter().enumerate().all(|(attr, &ci)| self.mv[attr][ci].pass[k])
                    {
                        rc += self.msw[k].clone();
                    }
                }
                self.scan_members(pp, &schema, &sv, &classes, rc, &mut best)?;
            }
        }
        Ok(match best {
            Some((reduced_cost, transaction)) => PriceOutcome::Column { transaction, reduced_cost },
            None => PriceOutcome::NoColumn,
        })
    }

    /// Walks one combo's members in (extra, canonical) order until a
    /// non-excluded transaction is found or the combo cannot beat `best`.
    fn scan_members(
        &mut self,
        pp: &PricingProblem<'_, S>,
        schema: &crate::model::Schema,
        sv: &[usize],
        classes: &[usize],
        class_rc: S,
        best: &mut Option<(S, Transaction)>,
    ) -> Result<(), PricingError> {
        let q = classes.len();

        // Lead member per class first; most combos end here.
        let mut lead = Vec::with_capacity(q);
        let mut lead_extra = S::zero();
        for (attr, &ci) in classes.iter().enumerate() {
            let Some((e, member)) = self.member(attr, ci, 0) else {
                return Ok(());
            };
            lead_extra += e;
            lead.push(member.clone());
        }
        let lead_rc = class_rc.clone() + lead_extra;
        if !improves(&lead_rc, sv, &lead, best) {
            return Ok(());
        }
        let t = Transaction::new(schema, sv.to_vec(), lead.clone())?;
        if !pp.excluded.contains(&t) {
            *best = Some((lead_rc, t));
            return Ok(());
        }

        // The lead is excluded: enumerate the member product in order.
        let mut heap: BinaryHeap<std::cmp::Reverse<JointNode<S>>> = BinaryHeap::new();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let root = vec![0; q];
        seen.insert(root.clone());
        heap.push(std::cmp::Reverse(JointNode {
            extra: lead_rc - class_rc.clone(),
            members: lead,
            idx: root,
        }));
        while let Some(std::cmp::Reverse(node)) = heap.pop() {
            if let Some(deadline) = pp.deadline {
                if Instant::now() >= deadline {
                    return Err(PricingError::TimeBudgetExceeded);
                }
            }
            let rc = class_rc.clone() + node.extra.clone();
            if !improves(&rc, sv, &node.members, best) {
                return Ok(());
            }
            let t = Transaction::new(schema, sv.to_vec(), node.members.clone())?;
            if !pp.excluded.contains(&t) {
                *best = Some((rc, t));
                return Ok(());
            }
            for (attr, &ci) in classes.iter().enumerate() {
                let mut idx = node.idx.clone();
                idx[attr] += 1;
                if seen.contains(&idx) {
                    continue;
                }
                let Some((_, _)) = self.member(attr, ci, idx[attr]) else {
                    continue;
                };
                // Recompute the joint extra from scratch per node; the
                // per-attribute extras are cached by the walks.
                let mut extra = S::zero();
                let mut members = Vec::with_capacity(q);
                for (a2, &c2) in classes.iter().enumerate() {
                    let (e, member) = self.member(a2, c2, idx[a2]).expect("visited index");
                    extra += e;
                    members.push(member.clone());
                }
                seen.insert(idx.clone());
                heap.push(std::cmp::Reverse(JointNode { extra, members, idx }));
            }
        }
        Ok(())
    }
}

/// Strictly better than the best so far, by (reduced cost, canonical).
fn improves<S: LpScalar>(
    rc: &S,
    sv: &[usize],
    members: &[ItemSet],
    best: &Option<(S, Transaction)>,
) -> bool {
    match best {
        None => true,
        Some((best_rc, best_t)) => match rc.partial_cmp(best_rc) {
            Some(Ordering::Less) => true,
            Some(Ordering::Equal) => match sv.cmp(best_t.sv_values()) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => members
                    .iter()
                    .enumerate()
                    .find_map(|(i, m)| match m.cmp(best_t.mv_set(i)) {
                        Ordering::Equal => None,
                        other => Some(other == Ordering::Less),
                    })
                    .unwrap_or(false),
            },
            _ => false,
        },
    }
}

struct JointNode<S> {
    extra: S,
    members: Vec<ItemSet>,
    idx: Vec<usize>,
}

impl<S: LpScalar> PartialEq for JointNode<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<S: LpScalar> Eq for JointNode<S> {}
impl<S: LpScalar> PartialOrd for JointNode<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: LpScalar> Ord for JointNode<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.extra
            .partial_cmp(&other.extra)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.members.cmp(&other.members))
    }
}

/// Builds the candidate classes of one set-valued attribute.
fn build_attr_classes<S: LpScalar>(
    domain_size: usize,
    direct: &BTreeMap<ItemSet, S>,
    extras: &[(ItemSet, S)],
    comps: &[(usize, ItemSet, MvOp)],
    m: usize,
) -> Vec<MvClass<S>> {
    let mut gens: BTreeSet<ItemSet> = direct.keys().cloned().collect();
    let mut eqs: BTreeSet<ItemSet> = BTreeSet::new();
    for (_, itemset, op) in comps {
        match op {
            MvOp::Subset => {
                gens.insert(itemset.clone());
            }
            MvOp::Equality => {
                eqs.insert(itemset.clone());
            }
        }
    }

    // Union closure of the generators; assumed to stay small.
    let mut reps: BTreeSet<ItemSet> = BTreeSet::new();
    let mut work = vec![ItemSet::empty()];
    reps.insert(ItemSet::empty());
    while let Some(c) = work.pop() {
        for g in &gens {
            let u = c.union(g);
            if reps.insert(u.clone()) {
                work.push(u);
            }
        }
    }

    // The representative of an itemset: union of the generators it fires.
    let rep_of = |x: &ItemSet| -> ItemSet {
        let mut r = ItemSet::empty();
        for g in &gens {
            if g.is_subset_of(x) {
                r = r.union(g);
            }
        }
        r
    };
    let mut eq_by_rep: BTreeMap<ItemSet, Vec<ItemSet>> = BTreeMap::new();
    for j in &eqs {
        eq_by_rep.entry(rep_of(j)).or_default().push(j.clone());
    }

    let gens_vec: Vec<ItemSet> = gens.into_iter().collect();
    let mut classes = Vec::new();
    for rep in reps {
        let direct_rc = direct
            .iter()
            .filter(|(j, _)| j.is_subset_of(&rep))
            .fold(S::zero(), |acc, (_, w)| acc + w.clone());
        let pass_of = |member: Option<&ItemSet>| -> Vec<bool> {
            let mut pass = vec![true; m];
            for (k, j, op) in comps {
                pass[*k] &= match op {
                    MvOp::Subset => j.is_subset_of(&rep),
                    MvOp::Equality => member.is_some_and(|x| x == j),
                };
            }
            pass
        };
        for member in eq_by_rep.get(&rep).into_iter().flatten() {
            classes.push(MvClass {
                direct_rc: direct_rc.clone(),
                pass: pass_of(Some(member)),
                members: Members::Single(member.clone(), extras_of(member, extras)),
            });
        }
        let mut walk = MemberWalk::new(rep.clone(), domain_size, &gens_vec, extras, &eqs);
        if walk.get(0).is_some() {
            classes.push(MvClass {
                direct_rc,
                pass: pass_of(None),
                members: Members::Walk(walk),
            });
        }
    }
    classes
}

fn extras_of<S: LpScalar>(member: &ItemSet, extras: &[(ItemSet, S)]) -> S {
    extras
        .iter()
        .filter(|(j, _)| j.is_subset_of(member))
        .fold(S::zero(), |acc, (_, w)| acc + w.clone())
}

/// Lazy ordered enumeration of a class's silent members: supersets of the
/// representative that fire no further generator and equal no equality
/// itemset, in (extra charge, canonical) order.
struct MemberWalk<S> {
    yielded: Vec<(S, ItemSet)>,
    heap: BinaryHeap<std::cmp::Reverse<WalkNode<S>>>,
    rep: ItemSet,
    free: Vec<usize>,
    gens: Vec<ItemSet>,
    extras: Vec<(ItemSet, S)>,
    eqs: BTreeSet<ItemSet>,
}

struct WalkNode<S> {
    extra: S,
    member: ItemSet,
    next_free: usize,
}

impl<S: LpScalar> PartialEq for WalkNode<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<S: LpScalar> Eq for WalkNode<S> {}
impl<S: LpScalar> PartialOrd for WalkNode<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: LpScalar> Ord for WalkNode<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.extra
            .partial_cmp(&other.extra)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.member.cmp(&other.member))
    }
}

impl<S: LpScalar> MemberWalk<S> {
    fn new(
        rep: ItemSet,
        domain_size: usize,
        gens: &[ItemSet],
        extras: &[(ItemSet, S)],
        eqs: &BTreeSet<ItemSet>,
    ) -> MemberWalk<S> {
        let free = (0..domain_size).filter(|i| !rep.contains(*i)).collect();
        let mut heap = BinaryHeap::new();
        heap.push(std::cmp::Reverse(WalkNode {
            extra: extras_of(&rep, extras),
            member: rep.clone(),
            next_free: 0,
        }));
        MemberWalk {
            yielded: Vec::new(),
            heap,
            rep,
            free,
            gens: gens.to_vec(),
            extras: extras.to_vec(),
            eqs: eqs.clone(),
        }
    }

    fn get(&mut self, k: usize) -> Option<&(S, ItemSet)> {
        while self.yielded.len() <= k {
            let std::cmp::Reverse(node) = self.heap.pop()?;
            for idx in node.next_free..self.free.len() {
                let child = node.member.with(self.free[idx]);
                // Supersets firing a new generator belong to another class,
                // and so do all their supersets: prune.
                let fires_new = self
                    .gens
                    .iter()
                    .any(|g| g.is_subset_of(&child) && !g.is_subset_of(&self.rep));
                if fires_new {
                    continue;
                }
                self.heap.push(std::cmp::Reverse(WalkNode {
                    extra: extras_of(&child, &self.extras),
                    member: child,
                    next_free: idx + 1,
                }));
            }
            if !self.eqs.contains(&node.member) {
                self.yielded.push((node.extra, node.member));
            }
        }
        self.yielded.get(k)
    }
}

/// Mixed-radix counter over given digit sizes, most significant first, so
/// combinations come out in canonical lexicographic order.
struct Odometer {
    sizes: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Odometer {
    fn new(sizes: &[usize]) -> Odometer {
        let next = if sizes.iter().all(|&n| n > 0) { Some(vec![0; sizes.len()]) } else { None };
        Odometer { sizes: sizes.to_vec(), next }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..self.sizes.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.sizes[i] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[i] = 0;
        }
        // Wrapped around (or zero digits): this was the last combination.
        self.next = None;
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::border::Border;
    use crate::master::{build_rows, tests::shirt_instance};
    use crate::model::{
        all_transactions, MvDomainConstraint, Schema, SelectionList, SupportConstraint,
        SvDomainConstraint,
    };
    use crate::Rational;
    use num::{BigInt, Zero};

    fn r(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn xorshift(state: &mut u64) -> u64 {
        let mut s = *state;
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        *state = s;
        s
    }

    fn pick(state: &mut u64, n: u64) -> u64 {
        xorshift(state) % n
    }

    fn brute_best(
        inst: &ConstraintInstance,
        rows: &RowSet,
        duals: &[Rational],
        excluded: &BTreeSet<Transaction>,
    ) -> Option<(Rational, Transaction)> {
        let mut best: Option<(Rational, Transaction)> = None;
        for t in all_transactions(inst.schema()) {
            if excluded.contains(&t) {
                continue;
            }
            let rc = reduced_cost(&t, rows, duals).unwrap();
            let better = match &best {
                None => true,
                Some((brc, bt)) => rc < *brc || (rc == *brc && t < *bt),
            };
            if better {
                best = Some((rc, t));
            }
        }
        best
    }

    fn price_unwrapped(
        inst: &ConstraintInstance,
        rows: &RowSet,
        duals: &[Rational],
        excluded: &BTreeSet<Transaction>,
    ) -> PriceOutcome<Rational> {
        let pp = PricingProblem { inst, rows, duals, excluded, deadline: None };
        price(&pp).unwrap()
    }

    #[test]
    fn zero_duals_give_the_canonical_least_transaction() {
        let inst = shirt_instance();
        let rows = build_rows(&inst, &Border::compute(&inst, 100).unwrap());
        let duals = vec![Rational::zero(); rows.len()];
        let mut excluded = BTreeSet::new();
        let PriceOutcome::Column { transaction, reduced_cost: rc } =
            price_unwrapped(&inst, &rows, &duals, &excluded)
        else {
            panic!("expected a column");
        };
        assert!(rc.is_zero());
        let least = all_transactions(inst.schema()).next().unwrap();
        assert_eq!(transaction, least);

        // Excluding the winner moves to the next canonical candidate.
        excluded.insert(transaction);
        let PriceOutcome::Column { transaction: second, reduced_cost: rc2 } =
            price_unwrapped(&inst, &rows, &duals, &excluded)
        else {
            panic!("expected a column");
        };
        assert!(rc2.is_zero());
        let expect = brute_best(&inst, &rows, &duals, &excluded).unwrap().1;
        assert_eq!(second, expect);
    }

    #[test]
    fn size_duals_price_every_transaction_alike() {
        let inst = shirt_instance();
        let rows = build_rows(&inst, &Border::compute(&inst, 100).unwrap());
        let mut duals = vec![Rational::zero(); rows.len()];
        duals[rows.len() - 2] = r(5); // size floor
        duals[rows.len() - 1] = r(2); // size ceiling
        for t in all_transactions(inst.schema()).take(8) {
            assert_eq!(reduced_cost(&t, &rows, &duals).unwrap(), r(-3));
        }
        let PriceOutcome::Column { transaction, reduced_cost: rc } =
            price_unwrapped(&inst, &rows, &duals, &BTreeSet::new())
        else {
            panic!("expected a column");
        };
        assert_eq!(rc, r(-3));
        assert_eq!(transaction, all_transactions(inst.schema()).next().unwrap());
    }

    #[test]
    fn candidate_space_is_the_union_closure_per_attribute() {
        // One set-valued attribute with frequent sets {g1,g2} and {g2,g3}:
        // candidates are the four unions, crossed with two sv items.
        let schema = Schema::new(
            vec![("X".into(), vec!["x0".into(), "x1".into()])],
            vec![("G".into(), vec!["g1".into(), "g2".into(), "g3".into()])],
        )
        .unwrap();
        let inst = ConstraintInstance::new(
            schema,
            vec![
                SvDomainConstraint { attr: 0, item: 0, lo: 0, hi: 5 },
                SvDomainConstraint { attr: 0, item: 1, lo: 0, hi: 5 },
            ],
            vec![
                MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![0, 1]), lo: 0, hi: 5 },
                MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![1, 2]), lo: 0, hi: 5 },
            ],
            vec![],
            vec![],
            None,
            10,
        )
        .unwrap();
        let rows = build_rows(&inst, &Border::empty(inst.schema()));
        let duals = vec![Rational::zero(); rows.len()];
        let space = candidate_space(&inst, &rows, &duals).unwrap();
        assert_eq!(space.len(), 8);
        let mv_parts: BTreeSet<&ItemSet> = space.iter().map(|t| t.mv_set(0)).collect();
        let expect: BTreeSet<ItemSet> = [
            ItemSet::empty(),
            ItemSet::new(vec![0, 1]),
            ItemSet::new(vec![1, 2]),
            ItemSet::new(vec![0, 1, 2]),
        ]
        .into_iter()
        .collect();
        assert_eq!(mv_parts, expect.iter().collect());
    }

    #[test]
    fn equality_selections_keep_silent_members_reachable() {
        // Frequent set {g1} and an equality selection on the same {g1}: the
        // minimizer may need to carry {g1} without equalling it.
        let schema = Schema::new(
            vec![],
            vec![("G".into(), vec!["g1".into(), "g2".into(), "g3".into()])],
        )
        .unwrap();
        let eq_sel = ConstraintInstance::parse_selection(
            &schema,
            &[],
            &[("G", &["g1"], MvOp::Equality)],
        )
        .unwrap();
        let inst = ConstraintInstance::new(
            schema,
            vec![],
            vec![MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![0]), lo: 0, hi: 5 }],
            vec![SupportConstraint { selection: eq_sel, lo: 0, hi: 5 }],
            vec![],
            None,
            10,
        )
        .unwrap();
        let rows = build_rows(&inst, &Border::empty(inst.schema()));
        // Reward the {g1} domain row, punish the equality rows hard.
        let mut duals = vec![Rational::zero(); rows.len()];
        duals[0] = r(3); // {g1} lower: weight -3 per firing
        duals[3] = r(10); // ms upper: weight +10 when the selection fires
        let PriceOutcome::Column { transaction, reduced_cost: rc } =
            price_unwrapped(&inst, &rows, &duals, &BTreeSet::new())
        else {
            panic!("expected a column");
        };
        let (brc, bt) = brute_best(&inst, &rows, &duals, &BTreeSet::new()).unwrap();
        assert_eq!(rc, brc);
        assert_eq!(transaction, bt);
        // The winner fires {g1} as a subset but not as an equality.
        assert!(ItemSet::new(vec![0]).is_subset_of(transaction.mv_set(0)));
        assert_ne!(*transaction.mv_set(0), ItemSet::new(vec![0]));
        assert_eq!(rc, r(-3));
    }

    #[test]
    fn negative_border_duals_pull_border_sets_into_the_space() {
        let inst = shirt_instance();
        let rows = build_rows(&inst, &Border::compute(&inst, 100).unwrap());
        // Row 8 is the infrequency row of border member {c}. A negative
        // dual there makes firing it attractive.
        let mut duals = vec![Rational::zero(); rows.len()];
        duals[8] = r(-4);
        let (brc, bt) = brute_best(&inst, &rows, &duals, &BTreeSet::new()).unwrap();
        assert_eq!(brc, r(-4));
        let PriceOutcome::Column { transaction, reduced_cost: rc } =
            price_unwrapped(&inst, &rows, &duals, &BTreeSet::new())
        else {
            panic!("expected a column");
        };
        assert_eq!(rc, brc);
        assert_eq!(transaction, bt);
        assert!(transaction.mv_set(0).contains(2));
    }

    #[test]
    fn empty_candidate_pool_reports_no_column() {
        let schema =
            Schema::new(vec![("X".into(), vec!["x0".into(), "x1".into()])], vec![]).unwrap();
        let inst = ConstraintInstance::new(
            schema,
            vec![
                SvDomainConstraint { attr: 0, item: 0, lo: 0, hi: 5 },
                SvDomainConstraint { attr: 0, item: 1, lo: 0, hi: 5 },
            ],
            vec![],
            vec![],
            vec![],
            None,
            10,
        )
        .unwrap();
        let rows = build_rows(&inst, &Border::empty(inst.schema()));
        let duals = vec![Rational::zero(); rows.len()];
        let excluded: BTreeSet<Transaction> = all_transactions(inst.schema()).collect();
        assert!(matches!(
            price_unwrapped(&inst, &rows, &duals, &excluded),
            PriceOutcome::NoColumn
        ));
    }

    #[test]
    fn expired_deadline_aborts_pricing() {
        let inst = shirt_instance();
        let rows = build_rows(&inst, &Border::compute(&inst, 100).unwrap());
        let duals = vec![Rational::zero(); rows.len()];
        let excluded = BTreeSet::new();
        let pp = PricingProblem {
            inst: &inst,
            rows: &rows,
            duals: &duals,
            excluded: &excluded,
            deadline: Some(Instant::now() - std::time::Duration::from_millis(1)),
        };
        // The deadline only fires on walk steps or every 64 combos; drive
        // enough combos through by excluding the leads.
        let excluded_all: BTreeSet<Transaction> = all_transactions(inst.schema()).collect();
        let pp_walk = PricingProblem { excluded: &excluded_all, ..pp };
        assert!(matches!(price(&pp_walk), Err(PricingError::TimeBudgetExceeded)));
    }

    #[test]
    fn mismatched_duals_are_rejected() {
        let inst = shirt_instance();
        let rows = build_rows(&inst, &Border::compute(&inst, 100).unwrap());
        let duals = vec![Rational::zero(); 3];
        let t = all_transactions(inst.schema()).next().unwrap();
        assert!(matches!(
            reduced_cost(&t, &rows, &duals),
            Err(PricingError::DualsMismatch { .. })
        ));
    }

    fn random_itemset(seed: &mut u64, n: usize) -> ItemSet {
        let bits = 1 + pick(seed, (1 << n) - 1);
        ItemSet::new((0..n).filter(|i| bits & (1 << i) != 0).collect())
    }

    fn random_instance(seed: &mut u64) -> ConstraintInstance {
        let with_sv = pick(seed, 4) != 0;
        let sv_attrs = if with_sv {
            vec![("X".to_string(), vec!["x0".to_string(), "x1".to_string()])]
        } else {
            vec![]
        };
        let schema = Schema::new(
            sv_attrs,
            vec![
                ("G".into(), vec!["g0".into(), "g1".into(), "g2".into()]),
                ("H".into(), vec!["h0".into(), "h1".into()]),
            ],
        )
        .unwrap();
        let sv_domain = if with_sv {
            vec![
                SvDomainConstraint { attr: 0, item: 0, lo: 0, hi: 5 },
                SvDomainConstraint { attr: 0, item: 1, lo: 0, hi: 5 },
            ]
        } else {
            vec![]
        };
        let mut mv_domain = Vec::new();
        for attr in 0..2 {
            let n = schema.mv_attr(attr).len();
            let mut sets = BTreeSet::new();
            for _ in 0..pick(seed, 3) {
                sets.insert(random_itemset(seed, n));
            }
            for itemset in sets {
                mv_domain.push(MvDomainConstraint { attr, itemset, lo: 0, hi: 5 });
            }
        }
        let mut ms = Vec::new();
        for _ in 0..pick(seed, 3) {
            let mut entries = Vec::new();
            if with_sv && pick(seed, 2) == 0 {
                entries.push(Selection::Sv { attr: 0, item: pick(seed, 2) as usize });
            }
            for attr in 0..2_usize {
                if pick(seed, 2) == 0 {
                    let n = schema.mv_attr(attr).len();
                    let op = if pick(seed, 2) == 0 { MvOp::Subset } else { MvOp::Equality };
                    entries.push(Selection::Mv { attr, itemset: random_itemset(seed, n), op });
                }
            }
            if entries.is_empty() {
                entries.push(Selection::Mv {
                    attr: 0,
                    itemset: random_itemset(seed, 3),
                    op: MvOp::Subset,
                });
            }
            let selection = SelectionList::new(&schema, entries).unwrap();
            ms.push(SupportConstraint { selection, lo: 0, hi: 5 });
        }
        let sigma_prime = if pick(seed, 2) == 0 { Some(2) } else { None };
        ConstraintInstance::new(schema, sv_domain, mv_domain, ms, vec![], sigma_prime, 10)
            .unwrap()
    }

    #[test]
    fn price_matches_brute_force_under_adversarial_duals() {
        let mut seed = 0xabc123_u64;
        for round in 0..150 {
            let inst = random_instance(&mut seed);
            let border = Border::compute(&inst, 1000).unwrap();
            let rows = build_rows(&inst, &border);
            let duals: Vec<Rational> =
                (0..rows.len()).map(|_| r(pick(&mut seed, 11) as i64 - 5)).collect();

            let mut excluded = BTreeSet::new();
            for depth in 0..3 {
                let got = price_unwrapped(&inst, &rows, &duals, &excluded);
                let want = brute_best(&inst, &rows, &duals, &excluded);
                match (got, want) {
                    (
                        PriceOutcome::Column { transaction, reduced_cost: rc },
                        Some((brc, bt)),
                    ) => {
                        assert_eq!(
                            rc, brc,
                            "round {round} depth {depth}: cost mismatch for {transaction:?} vs {bt:?}"
                        );
                        assert_eq!(transaction, bt, "round {round} depth {depth}");
                        assert_eq!(reduced_cost(&transaction, &rows, &duals).unwrap(), rc);
                        excluded.insert(transaction);
                    }
                    (PriceOutcome::NoColumn, None) => break,
                    (got, want) => {
                        panic!("round {round} depth {depth}: {got:?} vs oracle {want:?}")
                    }
                }
            }
        }
    }

    #[test]
    fn single_sort_toy_matches_exhaustive_search() {
        // No single-valued attributes, one set-valued attribute with four
        // items and three frequent sets; all sixteen itemsets compared.
        let schema = Schema::new(
            vec![],
            vec![("I".into(), vec!["a".into(), "b".into(), "c".into(), "d".into()])],
        )
        .unwrap();
        let inst = ConstraintInstance::new(
            schema,
            vec![],
            vec![
                MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![0]), lo: 1, hi: 5 },
                MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![1, 2]), lo: 1, hi: 5 },
                MvDomainConstraint { attr: 0, itemset: ItemSet::new(vec![0, 3]), lo: 1, hi: 5 },
            ],
            vec![],
            vec![],
            Some(2),
            10,
        )
        .unwrap();
        let border = Border::compute(&inst, 1000).unwrap();
        let rows = build_rows(&inst, &border);
        let mut seed = 0xfeed_u64;
        for _ in 0..40 {
            let duals: Vec<Rational> =
                (0..rows.len()).map(|_| r(pick(&mut seed, 9) as i64 - 4)).collect();
            let mut excluded = BTreeSet::new();
            for _ in 0..2 {
                let got = price_unwrapped(&inst, &rows, &duals, &excluded);
                let (brc, bt) = brute_best(&inst, &rows, &duals, &excluded).unwrap();
                let PriceOutcome::Column { transaction, reduced_cost: rc } = got else {
                    panic!("expected a column");
                };
                assert_eq!((rc, &transaction), (brc, &bt));
                excluded.insert(transaction);
            }
        }
    }

    #[test]
    fn odometer_counts_in_lexicographic_order() {
        let combos: Vec<Vec<usize>> = Odometer::new(&[2, 3]).collect();
        assert_eq!(
            combos,
            vec![
                vec![0, 0], vec![0, 1], vec![0, 2],
                vec![1, 0], vec![1, 1], vec![1, 2],
            ]
        );
        assert_eq!(Odometer::new(&[]).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(Odometer::new(&[2, 0]).count(), 0);
    }
}
