//! On-disk formats: TOML instance files and line-oriented dataset files.
//!
//! Instance files name attributes and items by their strings; resolution to
//! indices happens here, so the rest of the crate never sees names. A
//! dataset file is a header line followed by one `count<TAB>items` line per
//! distinct transaction in canonical order, items comma-separated with
//! single-valued values first. That flat format needs item names to pin
//! down their attribute, so emission and parsing both refuse schemas whose
//! set-valued attributes share an item name.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    ConstraintInstance, Dataset, DuplicateConstraint, ItemSet, ModelError, MvDomainConstraint,
    MvOp, Schema, Selection, SelectionList, SupportConstraint, SvDomainConstraint, Transaction,
};
use crate::Integer;

pub const DATASET_HEADER: &str = "#msifm-dataset v1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Validation(#[from] ModelError),
}

fn parse_err(msg: impl Into<String>) -> IoError {
    IoError::Parse(msg.into())
}

/// Numeric mode the solver should run in for this instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Rational,
    Float,
}

/// Optional run settings carried inside an instance file. Command-line
/// flags take precedence over all of these.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub border_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arithmetic: Option<Arithmetic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_cap: Option<u64>,
}

#[derive(Debug)]
pub struct InstanceFile {
    pub instance: ConstraintInstance,
    pub options: FileOptions,
}

// Scalar keys come before the table-valued ones so the serialized document
// stays well-formed.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    size: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma_prime: Option<RawSigma>,
    schema: RawSchema,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    options: Option<FileOptions>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sv_constraints: Vec<RawSvConstraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    mv_constraints: Vec<RawMvConstraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ms_constraints: Vec<RawMsConstraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    dup_constraints: Vec<RawDupConstraint>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawSigma {
    Bound(u64),
    Word(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchema {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sv: Vec<RawAttr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    mv: Vec<RawAttr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttr {
    name: String,
    domain: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSvConstraint {
    attr: String,
    item: String,
    lo: u64,
    hi: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMvConstraint {
    attr: String,
    itemset: Vec<String>,
    lo: u64,
    hi: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMsConstraint {
    lo: u64,
    hi: u64,
    select: Vec<RawSelect>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDupConstraint {
    cap: u64,
    select: Vec<RawSelect>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawSelect {
    Sv(RawSvSelect),
    Mv(RawMvSelect),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSvSelect {
    attr: String,
    item: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMvSelect {
    attr: String,
    itemset: Vec<String>,
    op: RawOp,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum RawOp {
    Subset,
    Equality,
}

impl From<RawOp> for MvOp {
    fn from(op: RawOp) -> MvOp {
        match op {
            RawOp::Subset => MvOp::Subset,
            RawOp::Equality => MvOp::Equality,
        }
    }
}

impl From<MvOp> for RawOp {
    fn from(op: MvOp) -> RawOp {
        match op {
            MvOp::Subset => RawOp::Subset,
            MvOp::Equality => RawOp::Equality,
        }
    }
}

pub fn parse_instance(path: &Path) -> Result<InstanceFile, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance_str(&text)
}

pub fn parse_instance_str(text: &str) -> Result<InstanceFile, IoError> {
    let raw: RawInstance = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    resolve_instance(raw)
}

fn resolve_instance(raw: RawInstance) -> Result<InstanceFile, IoError> {
    let schema = Schema::new(
        raw.schema.sv.into_iter().map(|a| (a.name, a.domain)).collect(),
        raw.schema.mv.into_iter().map(|a| (a.name, a.domain)).collect(),
    )?;

    let mut sv_domain = Vec::with_capacity(raw.sv_constraints.len());
    for c in &raw.sv_constraints {
        let (attr, item) = sv_ref(&schema, &c.attr, &c.item)?;
        sv_domain.push(SvDomainConstraint { attr, item, lo: c.lo, hi: c.hi });
    }

    let mut mv_domain = Vec::with_capacity(raw.mv_constraints.len());
    for c in &raw.mv_constraints {
        let (attr, itemset) = mv_ref(&schema, &c.attr, &c.itemset)?;
        mv_domain.push(MvDomainConstraint { attr, itemset, lo: c.lo, hi: c.hi });
    }

    let mut ms = Vec::with_capacity(raw.ms_constraints.len());
    for c in &raw.ms_constraints {
        let selection = resolve_selection(&schema, &c.select)?;
        ms.push(SupportConstraint { selection, lo: c.lo, hi: c.hi });
    }

    let mut dups = Vec::with_capacity(raw.dup_constraints.len());
    for c in &raw.dup_constraints {
        let selection = resolve_selection(&schema, &c.select)?;
        dups.push(DuplicateConstraint { selection, cap: c.cap });
    }

    let sigma_prime = match raw.sigma_prime {
        None => None,
        Some(RawSigma::Bound(n)) => Some(n),
        Some(RawSigma::Word(w)) if w == "inf" => None,
        Some(RawSigma::Word(w)) => {
            return Err(parse_err(format!(
                "sigma_prime must be an integer or \"inf\", got \"{w}\""
            )))
        }
    };

    let instance =
        ConstraintInstance::new(schema, sv_domain, mv_domain, ms, dups, sigma_prime, raw.size)?;
    Ok(InstanceFile { instance, options: raw.options.unwrap_or_default() })
}

fn sv_ref(schema: &Schema, attr: &str, item: &str) -> Result<(usize, usize), IoError> {
    let a = schema
        .sv_attr_index(attr)
        .ok_or_else(|| parse_err(format!("unknown single-valued attribute `{attr}`")))?;
    let i = schema
        .sv_attr(a)
        .item_index(item)
        .ok_or_else(|| parse_err(format!("`{item}` is not in the domain of `{attr}`")))?;
    Ok((a, i))
}

fn mv_ref(schema: &Schema, attr: &str, items: &[String]) -> Result<(usize, ItemSet), IoError> {
    let a = schema
        .mv_attr_index(attr)
        .ok_or_else(|| parse_err(format!("unknown set-valued attribute `{attr}`")))?;
    let domain = schema.mv_attr(a);
    let mut indices = Vec::with_capacity(items.len());
    for item in items {
        let i = domain
            .item_index(item)
            .ok_or_else(|| parse_err(format!("`{item}` is not in the domain of `{attr}`")))?;
        if indices.contains(&i) {
            return Err(parse_err(format!("`{item}` is listed twice for `{attr}`")));
        }
        indices.push(i);
    }
    Ok((a, ItemSet::new(indices)))
}

fn resolve_selection(schema: &Schema, raw: &[RawSelect]) -> Result<SelectionList, IoError> {
    let mut entries = Vec::with_capacity(raw.len());
    for s in raw {
        entries.push(match s {
            RawSelect::Sv(s) => {
                let (attr, item) = sv_ref(schema, &s.attr, &s.item)?;
                Selection::Sv { attr, item }
            }
            RawSelect::Mv(s) => {
                let (attr, itemset) = mv_ref(schema, &s.attr, &s.itemset)?;
                Selection::Mv { attr, itemset, op: s.op.into() }
            }
        });
    }
    Ok(SelectionList::new(schema, entries)?)
}

pub fn emit_instance(inst: &ConstraintInstance, options: &FileOptions) -> String {
    let schema = inst.schema();
    let attr_raw = |a: &crate::model::Attribute| RawAttr {
        name: a.name().to_string(),
        domain: a.domain().to_vec(),
    };
    let mv_names = |attr: usize, s: &ItemSet| -> Vec<String> {
        let domain = schema.mv_attr(attr);
        s.iter().map(|i| domain.domain()[i].clone()).collect()
    };
    let select_raw = |sel: &SelectionList| -> Vec<RawSelect> {
        sel.entries()
            .iter()
            .map(|e| match e {
                Selection::Sv { attr, item } => {
                    let a = schema.sv_attr(*attr);
                    RawSelect::Sv(RawSvSelect {
                        attr: a.name().to_string(),
                        item: a.domain()[*item].clone(),
                    })
                }
                Selection::Mv { attr, itemset, op } => RawSelect::Mv(RawMvSelect {
                    attr: schema.mv_attr(*attr).name().to_string(),
                    itemset: mv_names(*attr, itemset),
                    op: (*op).into(),
                }),
            })
            .collect()
    };

    let raw = RawInstance {
        size: inst.size(),
        sigma_prime: inst.sigma_prime().map(RawSigma::Bound),
        schema: RawSchema {
            sv: schema.sv_attrs().iter().map(attr_raw).collect(),
            mv: schema.mv_attrs().iter().map(attr_raw).collect(),
        },
        options: if *options == FileOptions::default() {
            None
        } else {
            Some(options.clone())
        },
        sv_constraints: inst
            .sv_domain()
            .iter()
            .map(|c| {
                let a = schema.sv_attr(c.attr);
                RawSvConstraint {
                    attr: a.name().to_string(),
                    item: a.domain()[c.item].clone(),
                    lo: c.lo,
                    hi: c.hi,
                }
            })
            .collect(),
        mv_constraints: inst
            .mv_domain()
            .iter()
            .map(|c| RawMvConstraint {
                attr: schema.mv_attr(c.attr).name().to_string(),
                itemset: mv_names(c.attr, &c.itemset),
                lo: c.lo,
                hi: c.hi,
            })
            .collect(),
        ms_constraints: inst
            .ms()
            .iter()
            .map(|c| RawMsConstraint { lo: c.lo, hi: c.hi, select: select_raw(&c.selection) })
            .collect(),
        dup_constraints: inst
            .dups()
            .iter()
            .map(|c| RawDupConstraint { cap: c.cap, select: select_raw(&c.selection) })
            .collect(),
    };
    toml::to_string_pretty(&raw).expect("instances always serialize")
}

/// Item-name table for dataset lines. Schema validation already makes item
/// names unique across attributes, so a name alone pins down its attribute;
/// what is checked here is that no name collides with the field separators.
struct NameTable<'a> {
    schema: &'a Schema,
    mv_index: BTreeMap<&'a str, (usize, usize)>,
}

impl<'a> NameTable<'a> {
    fn build(schema: &'a Schema) -> Result<NameTable<'a>, IoError> {
        let check = |name: &str| -> Result<(), IoError> {
            if name.contains(['\t', ',', '\n', '\r']) {
                return Err(parse_err(format!(
                    "item name {name:?} cannot appear in a dataset file"
                )));
            }
            Ok(())
        };
        let mut mv_index = BTreeMap::new();
        for (a, attr) in schema.mv_attrs().iter().enumerate() {
            for (i, name) in attr.domain().iter().enumerate() {
                check(name)?;
                let clash = mv_index.insert(name.as_str(), (a, i));
                debug_assert!(clash.is_none(), "schema validation admits no clashes");
            }
        }
        for attr in schema.sv_attrs() {
            for name in attr.domain() {
                check(name)?;
            }
        }
        Ok(NameTable { schema, mv_index })
    }
}

pub fn emit_dataset(dataset: &Dataset<Integer>, schema: &Schema) -> Result<String, IoError> {
    NameTable::build(schema)?;
    let mut out = String::with_capacity(64 * (dataset.len() + 1));
    out.push_str(DATASET_HEADER);
    out.push('\n');
    for (t, count) in dataset.iter() {
        write!(out, "{count}").expect("writing to a string");
        let mut items = Vec::new();
        for (a, value) in t.sv_values().iter().enumerate() {
            items.push(schema.sv_attr(a).domain()[*value].as_str());
        }
        for (a, set) in t.mv_sets().iter().enumerate() {
            let domain = schema.mv_attr(a).domain();
            items.extend(set.iter().map(|i| domain[i].as_str()));
        }
        if !items.is_empty() {
            out.push('\t');
            out.push_str(&items.join(","));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_dataset(path: &Path, schema: &Schema) -> Result<Dataset<Integer>, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset_str(&text, schema)
}

pub fn parse_dataset_str(text: &str, schema: &Schema) -> Result<Dataset<Integer>, IoError> {
    let names = NameTable::build(schema)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == DATASET_HEADER => {}
        _ => return Err(parse_err(format!("expected header line `{DATASET_HEADER}`"))),
    }
    let mut dataset = Dataset::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let (count_s, items_s) = line.split_once('\t').unwrap_or((line, ""));
        let count: Integer = count_s
            .parse()
            .map_err(|_| parse_err(format!("line {lineno}: bad count `{count_s}`")))?;
        if count <= Integer::from(0) {
            return Err(parse_err(format!("line {lineno}: counts must be positive")));
        }
        let t = parse_transaction(&names, items_s)
            .map_err(|msg| parse_err(format!("line {lineno}: {msg}")))?;
        if dataset.get(&t).is_some() {
            return Err(parse_err(format!("line {lineno}: duplicate transaction")));
        }
        dataset.insert(t, count)?;
    }
    Ok(dataset)
}

fn parse_transaction(names: &NameTable<'_>, items_s: &str) -> Result<Transaction, String> {
    let schema = names.schema;
    let mut it = items_s.split(',').filter(|s| !s.is_empty());

    let mut sv = Vec::with_capacity(schema.p());
    for a in 0..schema.p() {
        let attr = schema.sv_attr(a);
        let token = it
            .next()
            .ok_or_else(|| format!("missing a value for `{}`", attr.name()))?;
        let i = attr
            .item_index(token)
            .ok_or_else(|| format!("`{token}` is not in the domain of `{}`", attr.name()))?;
        sv.push(i);
    }

    let mut mv: Vec<Vec<usize>> = vec![Vec::new(); schema.q()];
    let mut last: Option<(usize, usize)> = None;
    for token in it {
        let &(a, i) = names
            .mv_index
            .get(token)
            .ok_or_else(|| format!("`{token}` is not a set-valued item"))?;
        if let Some(prev) = last {
            if (a, i) <= prev {
                return Err(format!("`{token}` is out of canonical order"));
            }
        }
        last = Some((a, i));
        mv[a].push(i);
    }
    let mv = mv.into_iter().map(ItemSet::new).collect();
    Transaction::new(schema, sv, mv).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::tests::shirt_instance;

    #[test]
    fn instance_files_round_trip() {
        let inst = shirt_instance();
        let opts = FileOptions {
            time_limit_s: Some(2.5),
            arithmetic: Some(Arithmetic::Rational),
            ..Default::default()
        };
        let text = emit_instance(&inst, &opts);
        let parsed = parse_instance_str(&text).unwrap();
        assert_eq!(parsed.options, opts);
        assert_eq!(emit_instance(&parsed.instance, &parsed.options), text);
        assert_eq!(parsed.instance.size(), 20);
        assert_eq!(parsed.instance.sigma_prime(), Some(7));
        assert_eq!(parsed.instance.sv_domain().len(), 2);
        assert_eq!(parsed.instance.mv_domain().len(), 2);
        assert_eq!(parsed.instance.ms().len(), 1);
    }

    #[test]
    fn a_handwritten_file_parses() {
        let text = r#"
size = 6
sigma_prime = "inf"

[schema]
sv = [{ name = "Color", domain = ["Red", "Blue"] }]
mv = [{ name = "Tags", domain = ["a", "b"] }]

[[sv_constraints]]
attr = "Color"
item = "Red"
lo = 0
hi = 6

[[sv_constraints]]
attr = "Color"
item = "Blue"
lo = 0
hi = 6

[[mv_constraints]]
attr = "Tags"
itemset = ["a", "b"]
lo = 1
hi = 4

[[ms_constraints]]
lo = 0
hi = 3
[[ms_constraints.select]]
attr = "Color"
item = "Blue"
[[ms_constraints.select]]
attr = "Tags"
itemset = ["a"]
op = "subset"

[[dup_constraints]]
cap = 2
[[dup_constraints.select]]
attr = "Tags"
itemset = ["b"]
op = "equality"
"#;
        let parsed = parse_instance_str(text).unwrap();
        assert_eq!(parsed.instance.sigma_prime(), None);
        assert_eq!(parsed.instance.size(), 6);
        assert_eq!(parsed.instance.dups().len(), 1);
        assert_eq!(parsed.options, FileOptions::default());
    }

    #[test]
    fn bad_instance_files_are_named_and_shamed() {
        let base = emit_instance(&shirt_instance(), &FileOptions::default());

        let unknown_key = format!("{base}\nwibble = 1\n");
        assert!(matches!(parse_instance_str(&unknown_key), Err(IoError::Parse(_))));

        let bad_sigma = base.replace("sigma_prime = 7", "sigma_prime = \"lots\"");
        let err = parse_instance_str(&bad_sigma).unwrap_err();
        assert!(err.to_string().contains("sigma_prime"), "{err}");

        let bad_item = base.replace("item = \"Red\"", "item = \"Pink\"");
        let err = parse_instance_str(&bad_item).unwrap_err();
        assert!(err.to_string().contains("Pink"), "{err}");

        let flipped = base.replace("lo = 1\nhi = 3", "lo = 3\nhi = 1");
        assert!(matches!(parse_instance_str(&flipped), Err(IoError::Validation(_))));
    }

    fn shirt_pair() -> (Schema, Transaction, Transaction) {
        let inst = shirt_instance();
        let schema = inst.schema().clone();
        let t1 =
            Transaction::new(&schema, vec![0], vec![ItemSet::new(vec![0, 1])]).unwrap();
        let t2 = Transaction::new(&schema, vec![1], vec![ItemSet::empty()]).unwrap();
        (schema, t1, t2)
    }

    #[test]
    fn dataset_files_round_trip_byte_for_byte() {
        let (schema, t1, t2) = shirt_pair();
        let dataset = Dataset::from_entries([
            (t1, Integer::from(2)),
            (t2, Integer::from(1)),
        ])
        .unwrap();
        let text = emit_dataset(&dataset, &schema).unwrap();
        assert_eq!(text, "#msifm-dataset v1\n2\tRed,a,b\n1\tBlue\n");
        let parsed = parse_dataset_str(&text, &schema).unwrap();
        assert_eq!(parsed, dataset);
        assert_eq!(emit_dataset(&parsed, &schema).unwrap(), text);
    }

    #[test]
    fn dataset_parsing_rejects_malformed_lines() {
        let (schema, ..) = shirt_pair();
        let reject = |text: &str, needle: &str| {
            let err = parse_dataset_str(text, &schema).unwrap_err();
            assert!(err.to_string().contains(needle), "{err} (wanted {needle})");
        };
        reject("2\tRed\n", "header");
        reject("#msifm-dataset v1\nx\tRed\n", "bad count");
        reject("#msifm-dataset v1\n0\tRed\n", "positive");
        reject("#msifm-dataset v1\n-3\tRed\n", "positive");
        reject("#msifm-dataset v1\n1\tRed\n1\tRed\n", "duplicate");
        reject("#msifm-dataset v1\n1\tRed,z\n", "not a set-valued item");
        reject("#msifm-dataset v1\n1\tRed,b,a\n", "canonical order");
        reject("#msifm-dataset v1\n1\tPink\n", "domain");
        reject("#msifm-dataset v1\n1\n", "missing a value");
    }

    #[test]
    fn separator_characters_in_item_names_are_refused() {
        let schema =
            Schema::new(vec![], vec![("G".into(), vec!["x,y".into()])]).unwrap();
        let err = emit_dataset(&Dataset::new(), &schema).unwrap_err();
        assert!(err.to_string().contains("cannot appear"), "{err}");
        let err = parse_dataset_str("#msifm-dataset v1\n", &schema).unwrap_err();
        assert!(err.to_string().contains("cannot appear"), "{err}");
    }
}
