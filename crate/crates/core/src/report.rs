//! Serializable summary of an evaluated bound.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundReport {
    /// Parameters the report was computed from.
    pub inputs: BTreeMap<String, f64>,
    /// Infection-rate threshold above which the growth exponent applies.
    pub threshold_tau: Option<f64>,
    /// `c` in `E[T_N] >= exp(c N (1 + o(1)))`.
    pub growth_exponent: Option<f64>,
    pub feasible: bool,
    /// Intermediate constants (γ₀, α, μ₀, ...).
    pub terms: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(mut self, name: &str, value: f64) -> Self {
        self.inputs.insert(name.to_string(), value);
        self
    }

    pub fn term(mut self, name: &str, value: f64) -> Self {
        self.terms.insert(name.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.terms.get(name).copied()
    }
}
