//! Stable JSON rendering of certificates and audit reports. Integers that may exceed
//! 2^53 are written as decimal strings.

use serde_json::{json, Map, Value};

use super::{AuditReport, Certificate, ExtractionNode};
use crate::plane::PointSet;
use crate::trees::BoundNode;

pub const SCHEMA_VERSION: u32 = 1;

fn points(set: &PointSet) -> Value {
    Value::Array(set.iter().map(|p| Value::String(p.format(set.ctx()))).collect())
}

fn sized(set: &PointSet) -> Value {
    json!({ "size": set.len(), "points": points(set) })
}

fn sized_list(sets: &[PointSet]) -> Value {
    Value::Array(sets.iter().map(sized).collect())
}

fn node(n: &ExtractionNode) -> Value {
    json!({
        "id": n.id,
        "parent": n.parent,
        "case": n.case,
        "tree": n.tree.to_string(),
        "pins_in": sized(&n.pins_in),
        "pool": sized(&n.pool),
        "pin_halves": sized_list(&n.pin_halves),
        "pool_halves": sized_list(&n.pool_halves),
        "reduced_pools": sized_list(&n.reduced_pools),
        "blocks": sized_list(&n.blocks),
        "s": n.s,
        "threshold_pool_size": n.threshold_n,
        "threshold": n.threshold.as_ref().map(|t| t.to_string()),
        "threshold_decimal": n.threshold.as_ref().map(|t| t.interval().decimal(9)),
        "pins_out": sized(&n.pins_out),
        "lemma_premise": n.lemma_premise,
        "sub_bound": n.sub_bound.map(|b| b.to_string()),
    })
}

fn trace(t: &BoundNode) -> Value {
    let ctx = t.pool.ctx();
    json!({
        "case": t.case,
        "tree": t.tree.to_string(),
        "pin": t.pin_point.format(ctx),
        "pool_size": t.pool.len(),
        "sub_pool_sizes": t.sub_pools.iter().map(PointSet::len).collect::<Vec<_>>(),
        "distinct_distances": t.distinct_distances,
        "value": t.value.to_string(),
        "children": t.children.iter().map(trace).collect::<Vec<_>>(),
    })
}

pub fn certificate_json(c: &Certificate) -> Value {
    let ctx = c.pins.ctx();
    json!({
        "schema_version": SCHEMA_VERSION,
        "regime": c.regime,
        "params": {
            "field": { "p": ctx.p(), "e": ctx.degree() },
            "K": c.params.k_const.to_string(),
            "threshold_rule": c.params.threshold.to_string(),
            "split_strategy": c.params.split,
            "enumeration_budget": c.params.enumeration_budget.to_string(),
            "range_split": c.params.range_split,
        },
        "tree": c.tree.to_string(),
        "pins": sized(&c.pins),
        "recursion": c.recursion.iter().map(node).collect::<Vec<_>>(),
        "bounds": {
            "per_pin_bound": c.per_pin_bound.to_string(),
            "pins": c.pin_bounds.iter().map(|b| json!({
                "pin": b.pin.format(ctx),
                "bound": b.bound.to_string(),
                "trace": trace(&b.trace),
            })).collect::<Vec<_>>(),
        },
        "flags": {
            "sound": c.sound,
            "hypothesis_in_range": c.hypothesis_in_range,
            "size_range": c.size_range,
            "effective_regime": c.effective_regime,
        },
    })
}

pub fn audit_json(r: &AuditReport) -> Value {
    let details: Map<String, Value> = r.details.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    json!({
        "id": r.id,
        "lhs": r.lhs.to_string(),
        "rhs": r.rhs.decimal(12),
        "rhs_error_bound": r.rhs.error_bound().to_string(),
        "holds": r.holds,
        "borderline": r.borderline,
        "premise_in_range": r.premise_in_range,
        "witness": r.witness,
        "details": details,
    })
}

/// Top-level keys every certificate document carries.
pub const CERTIFICATE_KEYS: [&str; 8] =
    ["schema_version", "regime", "params", "tree", "pins", "recursion", "bounds", "flags"];

/// Shape check for a certificate document.
pub fn validate_certificate_json(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("not an object")?;
    for key in CERTIFICATE_KEYS {
        if !obj.contains_key(key) {
            return Err(format!("missing key {key}"));
        }
    }
    if obj["schema_version"] != json!(SCHEMA_VERSION) {
        return Err("unknown schema_version".into());
    }
    let nodes = obj["recursion"].as_array().ok_or("recursion is not an array")?;
    for n in nodes {
        for key in ["id", "case", "tree", "pins_in", "pool", "pins_out", "s"] {
            if n.get(key).is_none() {
                return Err(format!("recursion node missing {key}"));
            }
        }
    }
    let bound = obj["bounds"]["per_pin_bound"].as_str().ok_or("per_pin_bound is not a string")?;
    bound.parse::<u64>().map_err(|e| e.to_string())?;
    for flag in ["sound", "hypothesis_in_range"] {
        if !obj["flags"][flag].is_boolean() {
            return Err(format!("flag {flag} is not boolean"));
        }
    }
    Ok(())
}
