//! Attribute access shared by every kind of summarised record.
//!
//! The profiling code never looks at concrete fields. It asks a [`Record`]
//! for a categorical value or a numeric value by attribute name, which lets
//! the same statistics run over references (citation count as the dominating
//! column) and over generic items such as products (price).

use std::collections::BTreeMap;

use serde_json::Value;

use crate::ingest::PersonName;

/// Value substituted for an absent categorical attribute.
pub const UNKNOWN: &str = "unknown";

pub trait Record {
    fn id(&self) -> &str;

    /// Human-readable name (a title for references).
    fn label(&self) -> &str;

    fn year(&self) -> Option<i32> {
        None
    }

    fn authors(&self) -> &[PersonName] {
        &[]
    }

    fn citation_count(&self) -> Option<u64> {
        None
    }

    fn self_citation(&self) -> Option<bool> {
        None
    }

    fn category(&self, attribute: &str) -> Option<String>;

    fn numeric(&self, attribute: &str) -> Option<f64>;
}

/// A generic record: an id, a label, and free-form attributes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Item {
    pub id: String,
    pub label: String,
    pub categories: BTreeMap<String, String>,
    pub numbers: BTreeMap<String, f64>,
}

impl Item {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Item { label: id.clone(), id, ..Default::default() }
    }

    pub fn with_category(mut self, attribute: &str, value: &str) -> Self {
        self.categories.insert(attribute.to_string(), value.to_string());
        self
    }

    pub fn with_number(mut self, attribute: &str, value: f64) -> Self {
        self.numbers.insert(attribute.to_string(), value);
        self
    }

    /// Builds an item from a flat JSON object. Strings and booleans become
    /// categories (`yes`/`no` for booleans), numbers become numeric
    /// attributes, `null` is treated as absent.
    pub fn from_json(value: &Value) -> Option<Item> {
        let obj = value.as_object()?;
        let id = match obj.get("id")? {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return None,
        };
        let mut item = Item::new(id);
        for (key, v) in obj {
            match (key.as_str(), v) {
                ("id", _) => {}
                ("label", Value::String(s)) => item.label = s.clone(),
                (_, Value::String(s)) => {
                    item.categories.insert(key.clone(), s.clone());
                }
                (_, Value::Bool(b)) => {
                    item.categories.insert(key.clone(), if *b { "yes" } else { "no" }.to_string());
                }
                (_, Value::Number(n)) => {
                    if let Some(f) = n.as_f64() {
                        item.numbers.insert(key.clone(), f);
                    }
                }
                _ => {}
            }
        }
        Some(item)
    }
}

impl Record for Item {
    fn id(&self) -> &str {
        &self.id
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn category(&self, attribute: &str) -> Option<String> {
        self.categories.get(attribute).cloned()
    }

    fn numeric(&self, attribute: &str) -> Option<f64> {
        self.numbers.get(attribute).copied()
    }
}
