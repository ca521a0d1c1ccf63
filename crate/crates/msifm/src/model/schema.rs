//! Relation schema, itemsets and transactions.

use std::cmp::Ordering;
use std::fmt;

use num::BigUint;

use super::ModelError;

/// One attribute: a name plus an ordered domain of item names.
///
/// Domain order is significant: item indices, canonical itemset order and
/// file emission all follow it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    name: String,
    domain: Vec<String>,
}

impl Attribute {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn item_index(&self, item: &str) -> Option<usize> {
        self.domain.iter().position(|i| i == item)
    }
}

/// Schema of the relation: `p` single-valued attributes followed by `q`
/// set-valued ones. Domains are pairwise disjoint and non-empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    sv: Vec<Attribute>,
    mv: Vec<Attribute>,
}

impl Schema {
    pub fn new(
        sv: Vec<(String, Vec<String>)>,
        mv: Vec<(String, Vec<String>)>,
    ) -> Result<Schema, ModelError> {
        let build = |(name, domain): (String, Vec<String>)| Attribute { name, domain };
        let schema = Schema {
            sv: sv.into_iter().map(build).collect(),
            mv: mv.into_iter().map(build).collect(),
        };
        schema.validate()?;
        Ok(schema)
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.sv.is_empty() && self.mv.is_empty() {
            return Err(ModelError::InvalidSchema("schema has no attributes".into()));
        }
        let mut attr_names = std::collections::BTreeSet::new();
        let mut item_names = std::collections::BTreeSet::new();
        for attr in self.sv.iter().chain(&self.mv) {
            if attr.name.is_empty() {
                return Err(ModelError::InvalidSchema("empty attribute name".into()));
            }
            if !attr_names.insert(attr.name.clone()) {
                return Err(ModelError::InvalidSchema(format!(
                    "duplicate attribute name `{}`",
                    attr.name
                )));
            }
            if attr.domain.is_empty() {
                return Err(ModelError::InvalidSchema(format!(
                    "attribute `{}` has an empty domain",
                    attr.name
                )));
            }
            for item in &attr.domain {
                if item.is_empty() {
                    return Err(ModelError::InvalidSchema(format!(
                        "attribute `{}` has an empty item name",
                        attr.name
                    )));
                }
                if !item_names.insert(item.clone()) {
                    return Err(ModelError::InvalidSchema(format!(
                        "item `{item}` occurs in more than one domain"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.sv.len()
    }

    pub fn q(&self) -> usize {
        self.mv.len()
    }

    pub fn sv_attrs(&self) -> &[Attribute] {
        &self.sv
    }

    pub fn mv_attrs(&self) -> &[Attribute] {
        &self.mv
    }

    pub fn sv_attr(&self, idx: usize) -> &Attribute {
        &self.sv[idx]
    }

    pub fn mv_attr(&self, idx: usize) -> &Attribute {
        &self.mv[idx]
    }

    pub fn sv_attr_index(&self, name: &str) -> Option<usize> {
        self.sv.iter().position(|a| a.name == name)
    }

    pub fn mv_attr_index(&self, name: &str) -> Option<usize> {
        self.mv.iter().position(|a| a.name == name)
    }

    /// Total number of single-valued items across attributes.
    pub fn total_sv_items(&self) -> usize {
        self.sv.iter().map(Attribute::len).sum()
    }

    /// Total number of set-valued items across attributes.
    pub fn total_mv_items(&self) -> usize {
        self.mv.iter().map(Attribute::len).sum()
    }
}

/// Number of distinct transactions over the schema: `2^n  *  prod n_i`,
/// with `n` the total set-valued item count and `n_i` the single-valued
/// domain sizes. Grows fast, hence the big integer.
pub fn count_transactions(schema: &Schema) -> BigUint {
    let mut count = BigUint::from(1u32) << schema.total_mv_items();
    for attr in schema.sv_attrs() {
        count *= BigUint::from(attr.len());
    }
    count
}

/// A set of items of one set-valued attribute, stored as sorted unique
/// domain indices.
///
/// Ordering is by characteristic bit-vector read in domain order, so the
/// empty set is least and a set containing an earlier item beats any set
/// without it.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ItemSet(Vec<usize>);

impl ItemSet {
    pub fn new(mut items: Vec<usize>) -> ItemSet {
        items.sort_unstable();
        items.dedup();
        ItemSet(items)
    }

    pub fn empty() -> ItemSet {
        ItemSet(Vec::new())
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_subset_of(&self, other: &ItemSet) -> bool {
        let mut rest = other.0.as_slice();
        for item in &self.0 {
            match rest.iter().position(|o| o == item) {
                Some(pos) => rest = &rest[pos + 1..],
                None => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &ItemSet) -> ItemSet {
        let mut items = self.0.clone();
        items.extend_from_slice(&other.0);
        ItemSet::new(items)
    }

    /// Set with the given item added.
    pub fn with(&self, item: usize) -> ItemSet {
        let mut items = self.0.clone();
        items.push(item);
        ItemSet::new(items)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn display_in(&self, attr: &Attribute) -> String {
        let names: Vec<&str> = self.0.iter().map(|&i| attr.domain[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl Ord for ItemSet {
    fn cmp(&self, other: &ItemSet) -> Ordering {
        // Compare characteristic vectors position by position; the set
        // holding the first item the other lacks is the greater one.
        let (mut a, mut b) = (self.0.as_slice(), other.0.as_slice());
        loop {
            match (a.first(), b.first()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&x), Some(&y)) => match x.cmp(&y) {
                    Ordering::Equal => {
                        a = &a[1..];
                        b = &b[1..];
                    }
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
            }
        }
    }
}

impl PartialOrd for ItemSet {
    fn partial_cmp(&self, other: &ItemSet) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, item) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{item}")?;
        }
        write!(f, "}}")
    }
}

/// Enumerates all subsets of `0..domain_size` in canonical (bit-vector)
/// order, empty set first.
pub fn itemsets_in_order(domain_size: usize) -> impl Iterator<Item = ItemSet> {
    assert!(domain_size < usize::BITS as usize, "domain too large to enumerate");
    (0..1usize << domain_size).map(move |key| {
        // Bit `domain_size - 1 - i` of the key encodes item `i`, so
        // ascending keys walk the canonical order.
        let items = (0..domain_size)
            .filter(|i| key >> (domain_size - 1 - i) & 1 == 1)
            .collect();
        ItemSet(items)
    })
}

/// One tuple of the relation: an item index per single-valued attribute and
/// an itemset per set-valued attribute, in schema order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Transaction {
    sv: Vec<usize>,
    mv: Vec<ItemSet>,
}

impl Transaction {
    pub fn new(schema: &Schema, sv: Vec<usize>, mv: Vec<ItemSet>) -> Result<Transaction, ModelError> {
        if sv.len() != schema.p() || mv.len() != schema.q() {
            return Err(ModelError::SchemaMismatch(format!(
                "transaction shape ({}, {}) does not match schema ({}, {})",
                sv.len(),
                mv.len(),
                schema.p(),
                schema.q()
            )));
        }
        for (i, &item) in sv.iter().enumerate() {
            if item >= schema.sv_attr(i).len() {
                return Err(ModelError::SchemaMismatch(format!(
                    "item index {item} out of range for attribute `{}`",
                    schema.sv_attr(i).name()
                )));
            }
        }
        for (j, set) in mv.iter().enumerate() {
            if set.items().last().is_some_and(|&i| i >= schema.mv_attr(j).len()) {
                return Err(ModelError::SchemaMismatch(format!(
                    "itemset {:?} out of range for attribute `{}`",
                    set,
                    schema.mv_attr(j).name()
                )));
            }
        }
        Ok(Transaction { sv, mv })
    }

    pub fn from_names(
        schema: &Schema,
        sv: &[&str],
        mv: &[&[&str]],
    ) -> Result<Transaction, ModelError> {
        if sv.len() != schema.p() || mv.len() != schema.q() {
            return Err(ModelError::SchemaMismatch(
                "wrong number of attribute values".into(),
            ));
        }
        let sv = sv
            .iter()
            .enumerate()
            .map(|(i, name)| {
                schema.sv_attr(i).item_index(name).ok_or_else(|| {
                    ModelError::SchemaMismatch(format!(
                        "`{name}` is not in the domain of `{}`",
                        schema.sv_attr(i).name()
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        let mv = mv
            .iter()
            .enumerate()
            .map(|(j, names)| {
                let items = names
                    .iter()
                    .map(|name| {
                        schema.mv_attr(j).item_index(name).ok_or_else(|| {
                            ModelError::SchemaMismatch(format!(
                                "`{name}` is not in the domain of `{}`",
                                schema.mv_attr(j).name()
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ItemSet::new(items))
            })
            .collect::<Result<_, ModelError>>()?;
        Ok(Transaction { sv, mv })
    }

    pub fn sv_values(&self) -> &[usize] {
        &self.sv
    }

    pub fn mv_sets(&self) -> &[ItemSet] {
        &self.mv
    }

    pub fn sv_value(&self, attr: usize) -> usize {
        self.sv[attr]
    }

    pub fn mv_set(&self, attr: usize) -> &ItemSet {
        &self.mv[attr]
    }

    /// Item names in schema order: single values first, then every set's
    /// items in domain order.
    pub fn item_names<'s>(&self, schema: &'s Schema) -> Vec<&'s str> {
        let mut names = Vec::new();
        for (i, &item) in self.sv.iter().enumerate() {
            names.push(schema.sv_attr(i).domain()[item].as_str());
        }
        for (j, set) in self.mv.iter().enumerate() {
            for item in set.iter() {
                names.push(schema.mv_attr(j).domain()[item].as_str());
            }
        }
        names
    }

    pub fn display_in(&self, schema: &Schema) -> String {
        format!("{{{}}}", self.item_names(schema).join(","))
    }
}

impl Ord for Transaction {
    fn cmp(&self, other: &Transaction) -> Ordering {
        self.sv
            .cmp(&other.sv)
            .then_with(|| self.mv.cmp(&other.mv))
    }
}

impl PartialOrd for Transaction {
    fn partial_cmp(&self, other: &Transaction) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Transaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t(sv={:?}, mv={:?})", self.sv, self.mv)
    }
}

/// Enumerates every transaction over the schema in canonical order.
pub fn all_transactions(schema: &Schema) -> impl Iterator<Item = Transaction> + '_ {
    let sv_sizes: Vec<usize> = schema.sv_attrs().iter().map(Attribute::len).collect();
    let mv_sizes: Vec<usize> = schema.mv_attrs().iter().map(Attribute::len).collect();
    let mut sv_state: Option<Vec<usize>> = Some(vec![0; sv_sizes.len()]);
    let mut per_attr: Vec<Vec<ItemSet>> = mv_sizes
        .iter()
        .map(|&n| itemsets_in_order(n).collect())
        .collect();
    // Snapshot the itemset lists once; per SV combination we walk their
    // cartesian product via a mixed-radix counter.
    let mut mv_counter = vec![0usize; mv_sizes.len()];
    let mv_lens: Vec<usize> = per_attr.iter().map(Vec::len).collect();
    let mut done = sv_sizes.iter().any(|&n| n == 0);
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let sv = sv_state.as_ref()?.clone();
        let mv: Vec<ItemSet> = mv_counter
            .iter()
            .zip(&per_attr)
            .map(|(&k, sets)| sets[k].clone())
            .collect();
        let out = Transaction { sv, mv };

        // Advance: itemsets are the fastest-moving digits, last attribute
        // fastest of all; then the SV counter the same way.
        let mut pos = mv_counter.len();
        loop {
            if pos == 0 {
                let sv = sv_state.as_mut().unwrap();
                let mut i = sv.len();
                loop {
                    if i == 0 {
                        done = true;
                        break;
                    }
                    i -= 1;
                    sv[i] += 1;
                    if sv[i] < sv_sizes[i] {
                        break;
                    }
                    sv[i] = 0;
                }
                break;
            }
            pos -= 1;
            mv_counter[pos] += 1;
            if mv_counter[pos] < mv_lens[pos] {
                break;
            }
            mv_counter[pos] = 0;
        }
        let _ = &mut per_attr;
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &str) -> String {
        v.into()
    }

    pub(crate) fn toy_schema() -> Schema {
        Schema::new(
            vec![(s("Color"), vec![s("Red"), s("Blue")])],
            vec![(s("Tags"), vec![s("a"), s("b"), s("c")])],
        )
        .unwrap()
    }

    #[test]
    fn schema_rejects_duplicates_and_empty_domains() {
        assert!(Schema::new(vec![(s("A"), vec![s("x")]), (s("A"), vec![s("y")])], vec![]).is_err());
        assert!(Schema::new(vec![(s("A"), vec![])], vec![]).is_err());
        assert!(Schema::new(
            vec![(s("A"), vec![s("x")])],
            vec![(s("B"), vec![s("x")])]
        )
        .is_err());
        assert!(Schema::new(vec![], vec![]).is_err());
    }

    #[test]
    fn transaction_count_is_exact() {
        // One SV attribute of 2 items, one MV attribute of 3 items:
        // 2 * 2^3 = 16 distinct transactions.
        let schema = toy_schema();
        assert_eq!(count_transactions(&schema), BigUint::from(16u32));

        // No SV attributes: the product over an empty range is 1.
        let schema = Schema::new(vec![], vec![(s("G"), vec![s("g1"), s("g2")])]).unwrap();
        assert_eq!(count_transactions(&schema), BigUint::from(4u32));
    }

    #[test]
    fn itemset_canonical_order_follows_bit_vectors() {
        // Over {a,b,c}: {} < {c} < {b} < {b,c} < {a} < {a,c} < {a,b} < {a,b,c}.
        let order: Vec<ItemSet> = itemsets_in_order(3).collect();
        let expect = vec![
            ItemSet::new(vec![]),
            ItemSet::new(vec![2]),
            ItemSet::new(vec![1]),
            ItemSet::new(vec![1, 2]),
            ItemSet::new(vec![0]),
            ItemSet::new(vec![0, 2]),
            ItemSet::new(vec![0, 1]),
            ItemSet::new(vec![0, 1, 2]),
        ];
        assert_eq!(order, expect);
        for w in order.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn itemset_subset_and_union() {
        let ab = ItemSet::new(vec![0, 1]);
        let b = ItemSet::new(vec![1]);
        let bc = ItemSet::new(vec![1, 2]);
        assert!(b.is_subset_of(&ab));
        assert!(!ab.is_subset_of(&b));
        assert!(ItemSet::empty().is_subset_of(&b));
        assert_eq!(ab.union(&bc), ItemSet::new(vec![0, 1, 2]));
        assert_eq!(b.with(2), bc);
    }

    #[test]
    fn transaction_order_is_sv_then_mv() {
        let schema = toy_schema();
        let t = |sv: usize, items: &[usize]| {
            Transaction::new(&schema, vec![sv], vec![ItemSet::new(items.to_vec())]).unwrap()
        };
        assert!(t(0, &[0, 1]) < t(1, &[]));
        assert!(t(0, &[]) < t(0, &[2]));
        assert!(t(1, &[2]) < t(1, &[1]));
    }

    #[test]
    fn all_transactions_enumerates_in_order_without_repeats() {
        let schema = toy_schema();
        let all: Vec<Transaction> = all_transactions(&schema).collect();
        assert_eq!(all.len(), 16);
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn transaction_validates_against_schema() {
        let schema = toy_schema();
        assert!(Transaction::new(&schema, vec![2], vec![ItemSet::empty()]).is_err());
        assert!(Transaction::new(&schema, vec![0], vec![ItemSet::new(vec![3])]).is_err());
        assert!(Transaction::new(&schema, vec![0], vec![]).is_err());

        let t = Transaction::from_names(&schema, &["Blue"], &[&["c", "a"]]).unwrap();
        assert_eq!(t.sv_value(0), 1);
        assert_eq!(t.mv_set(0), &ItemSet::new(vec![0, 2]));
        assert_eq!(t.display_in(&schema), "{Blue,a,c}");
        assert!(Transaction::from_names(&schema, &["Green"], &[&[]]).is_err());
    }
}
