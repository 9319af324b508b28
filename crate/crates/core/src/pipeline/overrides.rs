use toml::Value;

use super::PipelineSpec;
use crate::error::{Error, Result};

const OPERATOR_SECTIONS: [&str; 6] = ["clahe", "pwl", "hs", "cs", "goc2", "goc3"];

/// Applies one dotted `section.field = value` override to every matching
/// stage of `spec`, then re-validates it.
///
/// Sections: `pde`, `homomorphic`, `finisher`, and the operator names
/// (`clahe`, `pwl`, `hs`, `cs`, `goc3`) which reach operators both inside PDE
/// forcing cascades and in standalone operator stages. An override that
/// matches nothing, names an unknown field, or has the wrong type is an
/// error.
pub fn apply_override(spec: &PipelineSpec, key: &str, raw: &str) -> Result<PipelineSpec> {
    let (section, field) = key
        .split_once('.')
        .filter(|(s, f)| !s.is_empty() && !f.is_empty() && !f.contains('.'))
        .ok_or_else(|| {
            Error::Config(format!("override key `{key}` must look like section.field"))
        })?;
    let value = parse_value(raw);
    let mut tree = Value::try_from(spec).map_err(|e| Error::Config(e.to_string()))?;
    let stages = tree
        .get_mut("stages")
        .and_then(Value::as_array_mut)
        .ok_or_else(|| Error::Config("pipeline has no stage list".into()))?;

    let mut hits = 0usize;
    for stage in stages.iter_mut() {
        let Some(table) = stage.as_table_mut() else {
            continue;
        };
        let kind = table
            .get("kind")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        match (section, kind.as_str()) {
            ("pde", "pde-evolve") | ("finisher", "pwl-finisher") => {
                table.insert(field.to_string(), value.clone());
                hits += 1;
            }
            ("homomorphic", "fuzzy-homomorphic") => {
                let params = table
                    .entry("params")
                    .or_insert_with(|| Value::Table(Default::default()));
                if let Some(p) = params.as_table_mut() {
                    p.insert(field.to_string(), value.clone());
                    hits += 1;
                }
            }
            (op, _) if OPERATOR_SECTIONS.contains(&op) => {
                let mut slots: Vec<&mut Value> = Vec::new();
                for (name, v) in table.iter_mut() {
                    match name.as_str() {
                        "operator" => slots.push(v),
                        "local_op" | "global_op" => {
                            if let Some(list) = v.as_array_mut() {
                                slots.extend(list.iter_mut());
                            }
                        }
                        _ => {}
                    }
                }
                for slot in slots {
                    if let Some(t) = slot.as_table_mut() {
                        if t.get("op").and_then(Value::as_str) == Some(op) {
                            t.insert(field.to_string(), value.clone());
                            hits += 1;
                        }
                    }
                }
            }
            _ => {}
        }
    }
    if hits == 0 {
        return Err(Error::Config(format!(
            "override `{key}` matches no stage of pipeline `{}`",
            spec.name
        )));
    }
    let out: PipelineSpec = tree
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(format!("override `{key}={raw}`: {e}")))?;
    out.validate()?;
    Ok(out)
}

/// TOML literal when it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}
