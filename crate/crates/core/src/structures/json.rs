use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Elem, Model, Relation, StructureError, Team};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    universe: usize,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<Elem>>>,
    #[serde(default)]
    functions: BTreeMap<String, Vec<Elem>>,
    #[serde(default)]
    constants: BTreeMap<String, Elem>,
    /// Needed for empty relations and for functions over a one-element universe,
    /// where the arity cannot be read off the data.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    arities: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TeamFile {
    domain: Vec<String>,
    rows: Vec<Vec<Elem>>,
}

fn invalid(e: impl std::fmt::Display) -> StructureError {
    StructureError::Invalid(e.to_string())
}

pub fn model_from_json(text: &str) -> Result<Model, StructureError> {
    let file: ModelFile = serde_json::from_str(text).map_err(invalid)?;
    let n = file.universe;
    let mut m = Model::new(n)?;
    for (name, tuples) in &file.relations {
        let arity = match (file.arities.get(name), tuples.first()) {
            (Some(&k), _) => k,
            (None, Some(t)) => t.len(),
            (None, None) => return Err(invalid(format!("empty relation `{name}` needs an entry in \"arities\""))),
        };
        if arity == 0 {
            return Err(invalid(format!("relation `{name}` must have arity at least 1")));
        }
        m.set_relation(name, Relation::from_tuples(n, arity, tuples)?)?;
    }
    for (name, table) in file.functions {
        let arity = match file.arities.get(&name) {
            Some(&k) => k,
            None if n == 1 => return Err(invalid(format!("function `{name}` needs an entry in \"arities\""))),
            None => (1..=8)
                .find(|&k| n.checked_pow(k as u32) == Some(table.len()))
                .ok_or_else(|| invalid(format!("function `{name}` has a table of length {}", table.len())))?,
        };
        m.set_function(&name, arity, table)?;
    }
    for (name, value) in file.constants {
        m.set_constant(&name, value)?;
    }
    if let Some(name) = file
        .arities
        .keys()
        .find(|k| !file.relations.contains_key(*k) && m.function(k).is_none())
    {
        return Err(invalid(format!("arity given for unknown symbol `{name}`")));
    }
    Ok(m)
}

pub fn model_to_json(m: &Model) -> String {
    let relations = m.relations().iter().map(|(n, r)| (n.clone(), r.tuples().collect())).collect();
    let mut arities = BTreeMap::new();
    for (n, r) in m.relations() {
        if r.is_empty() {
            arities.insert(n.clone(), r.arity());
        }
    }
    if m.size() == 1 {
        for (n, f) in m.functions() {
            arities.insert(n.clone(), f.arity());
        }
    }
    let file = ModelFile {
        universe: m.size(),
        relations,
        functions: m.functions().iter().map(|(n, f)| (n.clone(), f.table().to_vec())).collect(),
        constants: m.constants().clone(),
        arities,
    };
    serde_json::to_string(&file).expect("model serializes")
}

/// Parses a team file. The flag reports whether duplicate rows were dropped.
pub fn team_from_json(text: &str) -> Result<(Team, bool), StructureError> {
    let file: TeamFile = serde_json::from_str(text).map_err(invalid)?;
    let count = file.rows.len();
    let team = Team::from_rows(file.domain, file.rows)?;
    let normalized = team.len() != count;
    Ok((team, normalized))
}

pub fn team_to_json(x: &Team) -> String {
    let file = TeamFile { domain: x.domain().to_vec(), rows: x.rows().iter().cloned().collect() };
    serde_json::to_string(&file).expect("team serializes")
}
