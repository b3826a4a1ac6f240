//! Instances, bundle valuation, and the symbolic tie-break perturbation.
//!
//! Every good `g_j` (1-based position `j` in the input list) receives an
//! infinitesimal bonus `eps * 2^j` for every agent. Rather than choosing a
//! concrete `eps`, a bundle's perturbed value is kept as the pair
//! `(base, key)` with `key = sum of 2^j` and compared lexicographically,
//! which is exactly the order in the limit `eps -> 0+`. Distinct bundles have
//! distinct keys, so two different bundles never compare equal.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use serde_json::{json, Map, Value as Json};

use crate::bundle::Bundle;
use crate::error::FormatError;
use crate::value::Value;

/// Which order bundle comparisons use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// Lexicographic `(base, key)`; never ties on distinct bundles.
    Perturbed,
    /// True values; ties allowed.
    Base,
}

/// The value of a bundle in the perturbed instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerturbedValue<V> {
    pub base: V,
    pub key: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance<V> {
    goods: Vec<String>,
    values: Vec<Vec<V>>,
    index: HashMap<String, usize>,
    comment: Option<String>,
}

impl<V: Value> Instance<V> {
    pub fn new(goods: Vec<String>, values: Vec<Vec<V>>) -> Result<Self, FormatError> {
        if values.is_empty() {
            return Err(FormatError::NoAgents);
        }
        let mut index = HashMap::with_capacity(goods.len());
        for (j, g) in goods.iter().enumerate() {
            if index.insert(g.clone(), j).is_some() {
                return Err(FormatError::DuplicateGood(g.clone()));
            }
        }
        for (row, vals) in values.iter().enumerate() {
            if vals.len() != goods.len() {
                return Err(FormatError::RaggedRow {
                    row: row + 1,
                    found: vals.len(),
                    expected: goods.len(),
                });
            }
            for (j, v) in vals.iter().enumerate() {
                if v.is_negative_value() {
                    return Err(FormatError::NegativeValue {
                        agent: row + 1,
                        good: goods[j].clone(),
                        value: v.display(),
                    });
                }
            }
        }
        Ok(Instance {
            goods,
            values,
            index,
            comment: None,
        })
    }

    /// Goods named `g1..gm`.
    pub fn from_rows(values: Vec<Vec<V>>) -> Result<Self, FormatError> {
        let m = values.first().map_or(0, Vec::len);
        Self::new((1..=m).map(|j| format!("g{j}")).collect(), values)
    }

    pub fn with_comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = Some(comment.into());
        self
    }

    pub fn comment(&self) -> Option<&str> {
        self.comment.as_deref()
    }

    pub fn num_agents(&self) -> usize {
        self.values.len()
    }

    pub fn num_goods(&self) -> usize {
        self.goods.len()
    }

    pub fn goods(&self) -> &[String] {
        &self.goods
    }

    pub fn good_id(&self, good: usize) -> &str {
        &self.goods[good]
    }

    pub fn good_index(&self, id: &str) -> Result<usize, FormatError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| FormatError::UnknownGood(id.to_string()))
    }

    pub fn bundle_of(&self, ids: &[&str]) -> Result<Bundle, FormatError> {
        ids.iter().map(|id| self.good_index(id)).collect()
    }

    pub fn all_goods(&self) -> Bundle {
        (0..self.num_goods()).collect()
    }

    pub fn good_value(&self, agent: usize, good: usize) -> &V {
        &self.values[agent][good]
    }

    pub fn row(&self, agent: usize) -> &[V] {
        &self.values[agent]
    }

    /// Same instance with one entry replaced.
    pub fn with_value(&self, agent: usize, good: usize, value: V) -> Result<Self, FormatError> {
        let mut values = self.values.clone();
        values[agent][good] = value;
        let mut inst = Self::new(self.goods.clone(), values)?;
        inst.comment = self.comment.clone();
        Ok(inst)
    }

    pub fn base(&self, agent: usize, bundle: &Bundle) -> V {
        bundle
            .iter()
            .fold(V::zero(), |acc, g| acc + self.values[agent][g].clone())
    }

    pub fn value(&self, agent: usize, bundle: &Bundle) -> PerturbedValue<V> {
        PerturbedValue {
            base: self.base(agent, bundle),
            key: tie_key(bundle),
        }
    }

    /// Perturbed comparison; `Equal` only when `s == t`.
    pub fn compare(&self, agent: usize, s: &Bundle, t: &Bundle) -> Ordering {
        self.base(agent, s)
            .cmp(&self.base(agent, t))
            .then_with(|| key_cmp(s, t))
    }

    pub fn compare_in(&self, order: Order, agent: usize, s: &Bundle, t: &Bundle) -> Ordering {
        match order {
            Order::Perturbed => self.compare(agent, s, t),
            Order::Base => self.base(agent, s).cmp(&self.base(agent, t)),
        }
    }

    /// `s >_agent t` in the perturbed order.
    pub fn prefers(&self, agent: usize, s: &Bundle, t: &Bundle) -> bool {
        self.compare(agent, s, t) == Ordering::Greater
    }

    pub fn prefers_in(&self, order: Order, agent: usize, s: &Bundle, t: &Bundle) -> bool {
        self.compare_in(order, agent, s, t) == Ordering::Greater
    }

    /// Perturbed order on single goods.
    pub fn compare_goods(&self, agent: usize, a: usize, b: usize) -> Ordering {
        self.values[agent][a]
            .cmp(&self.values[agent][b])
            .then(a.cmp(&b))
    }

    /// The better of two bundles for `agent` (perturbed); `s` on equality.
    pub fn max_of<'a>(&self, agent: usize, s: &'a Bundle, t: &'a Bundle) -> &'a Bundle {
        if self.compare(agent, t, s) == Ordering::Greater {
            t
        } else {
            s
        }
    }

    pub fn min_of<'a>(&self, agent: usize, s: &'a Bundle, t: &'a Bundle) -> &'a Bundle {
        if self.compare(agent, t, s) == Ordering::Less {
            t
        } else {
            s
        }
    }

    /// Goods of `set` from most to least valuable for `agent` (perturbed).
    pub fn ranked_desc(&self, agent: usize, set: &Bundle) -> Vec<usize> {
        let mut goods: Vec<usize> = set.iter().collect();
        goods.sort_by(|&a, &b| self.compare_goods(agent, b, a));
        goods
    }

    pub fn to_json(&self) -> Json {
        let mut obj = Map::new();
        if let Some(c) = &self.comment {
            obj.insert("comment".into(), Json::String(c.clone()));
        }
        obj.insert("agents".into(), json!(self.num_agents()));
        obj.insert("goods".into(), json!(self.goods));
        obj.insert(
            "values".into(),
            Json::Array(
                self.values
                    .iter()
                    .map(|row| Json::Array(row.iter().map(Value::to_json).collect()))
                    .collect(),
            ),
        );
        Json::Object(obj)
    }

    pub fn from_json(doc: &Json) -> Result<Self, FormatError> {
        let agents = doc
            .get("agents")
            .and_then(Json::as_u64)
            .ok_or(FormatError::Field("agents"))? as usize;
        if agents == 0 {
            return Err(FormatError::NoAgents);
        }
        let goods = doc
            .get("goods")
            .and_then(Json::as_array)
            .ok_or(FormatError::Field("goods"))?
            .iter()
            .map(|g| g.as_str().map(str::to_string).ok_or(FormatError::Field("goods")))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = doc
            .get("values")
            .and_then(Json::as_array)
            .ok_or(FormatError::Field("values"))?;
        if rows.len() != agents {
            return Err(FormatError::RowCount {
                expected: agents,
                found: rows.len(),
            });
        }
        let values = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or(FormatError::Field("values"))?
                    .iter()
                    .map(V::from_json)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut inst = Self::new(goods, values)?;
        match doc.get("comment") {
            None | Some(Json::Null) => {}
            Some(Json::String(c)) => inst.comment = Some(c.clone()),
            Some(_) => return Err(FormatError::Field("comment")),
        }
        Ok(inst)
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let doc: Json = serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
        Self::from_json(&doc)
    }

    pub fn serialize(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values always serialize")
    }
}

/// `sum over goods at position j (0-based) of 2^(j+1)`.
pub fn tie_key(bundle: &Bundle) -> BigUint {
    let mut key = BigUint::default();
    for g in bundle.iter() {
        key.set_bit(g as u64 + 1, true);
    }
    key
}

/// Compares tie keys without materializing them: the larger key belongs to
/// the bundle holding the highest-index good of the symmetric difference.
pub fn key_cmp(s: &Bundle, t: &Bundle) -> Ordering {
    let mut a = s.iter().rev().peekable();
    let mut b = t.iter().rev().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(x), Some(y)) => match x.cmp(y) {
                Ordering::Equal => {
                    a.next();
                    b.next();
                }
                other => return other,
            },
        }
    }
}
