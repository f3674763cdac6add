//! State valuations and the valuation-file format.

use std::collections::BTreeMap;
use std::ops::Index;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::model::{json_rational, ModelError, NormalizedCsg};
use crate::rational::{to_fraction, Rational};

/// How a valuation was produced. Deflation is only sound on valid upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Lower,
    NaiveUpper,
    ValidUpper,
    Oracle,
    /// Supplied by the user; only used for classification, never deflated.
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Valuation {
    values: Vec<Rational>,
    provenance: Provenance,
}

impl Valuation {
    pub fn new(values: Vec<Rational>, provenance: Provenance) -> Valuation {
        Valuation { values, provenance }
    }

    /// `L_0`: one on the target sink, zero elsewhere.
    pub fn lower_init(g: &NormalizedCsg) -> Valuation {
        let values = (0..g.num_states())
            .map(|s| if s == g.target_sink() { Rational::one() } else { Rational::zero() })
            .collect();
        Valuation::new(values, Provenance::Lower)
    }

    /// `U_0`: zero on the losing sink, one elsewhere.
    pub fn upper_init(g: &NormalizedCsg, provenance: Provenance) -> Valuation {
        let values = (0..g.num_states())
            .map(|s| if s == g.losing_sink() { Rational::zero() } else { Rational::one() })
            .collect();
        Valuation::new(values, provenance)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn set(&mut self, s: usize, v: Rational) {
        self.values[s] = v;
    }

    pub fn map_values(&mut self, f: impl Fn(&Rational) -> Rational) {
        for v in &mut self.values {
            *v = f(v);
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Index<usize> for Valuation {
    type Output = Rational;
    fn index(&self, s: usize) -> &Rational {
        &self.values[s]
    }
}

#[derive(Debug, Error)]
pub enum ValuationError {
    #[error("malformed valuation file: {0}")]
    Json(String),
    #[error("valuation names unknown state {0:?}")]
    UnknownState(String),
    #[error("valuation misses state {0:?}")]
    MissingState(String),
    #[error("value {value} of state {state:?} is outside [0, 1]")]
    OutOfRange { state: String, value: String },
    #[error("{0}")]
    Value(#[from] ModelError),
}

/// Reads a JSON object mapping state names to values in `[0, 1]`.
///
/// Every non-sink state of the normalized game must be present. Entries for states that were
/// collapsed by normalization are accepted and ignored; sinks keep their fixed values.
pub fn parse_valuation(g: &NormalizedCsg, text: &str) -> Result<Valuation, ValuationError> {
    let raw: BTreeMap<String, serde_json::Value> =
        serde_json::from_str(text).map_err(|e| ValuationError::Json(e.to_string()))?;
    let mut values = Valuation::upper_init(g, Provenance::External);
    values.set(g.target_sink(), Rational::one());
    let mut seen = vec![false; g.num_states()];
    for (name, v) in &raw {
        let value = json_rational(v)?;
        if value < Rational::zero() || value > Rational::one() {
            return Err(ValuationError::OutOfRange {
                state: name.clone(),
                value: to_fraction(&value),
            });
        }
        match g.index_of(name) {
            Some(s) if !g.is_sink(s) => {
                values.set(s, value);
                seen[s] = true;
            }
            Some(_) => {}
            None if g.original().index_of(name).is_some() => {}
            None => return Err(ValuationError::UnknownState(name.clone())),
        }
    }
    if let Some(s) = g.inner_states().into_iter().find(|&s| !seen[s]) {
        return Err(ValuationError::MissingState(g.name(s).to_string()));
    }
    Ok(values)
}
