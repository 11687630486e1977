//! Scenario gallery compiled into the binary.

use crate::error::{CliError, Result};
use crate::scenario::Scenario;

pub const BUNDLED: [(&str, &str); 9] = [
    ("bk-refutation-sweep", include_str!("../scenarios/bk-refutation-sweep.toml")),
    ("grid-crosscheck-bimodal", include_str!("../scenarios/grid-crosscheck-bimodal.toml")),
    ("grid-crosscheck-gaussian", include_str!("../scenarios/grid-crosscheck-gaussian.toml")),
    ("ozawa-tradeoff", include_str!("../scenarios/ozawa-tradeoff.toml")),
    ("ozawa-violation", include_str!("../scenarios/ozawa-violation.toml")),
    ("realization-identity", include_str!("../scenarios/realization-identity.toml")),
    ("repeatability-sigma-y", include_str!("../scenarios/repeatability-sigma-y.toml")),
    ("sql-refutation-sweep", include_str!("../scenarios/sql-refutation-sweep.toml")),
    ("von-neumann-bound", include_str!("../scenarios/von-neumann-bound.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Result<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| CliError::UnknownBundled(name.to_string()))
}

pub fn load(name: &str) -> Result<Scenario> {
    Scenario::from_toml(source(name)?, &format!("bundled:{name}"))
}

pub fn load_all() -> Result<Vec<Scenario>> {
    names().map(load).collect()
}
