//! JSON problem ingestion: schema, validation and canonicalization.
//!
//! A problem file describes the ambient dimensions, the generators (monomial
//! form with exact rational fiber vectors, or homogeneous polynomial form for
//! the probe path) and the computation budgets. Unknown fields are rejected;
//! all rationals travel as "numerator/denominator" strings.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lattice::{Generator, MonomialSubmodule, MultiIndex};
use crate::probe::HomogeneousGeneratorSet;
use crate::{Error, Rat, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Probe,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "probe" => Ok(Mode::Probe),
            other => Err(Error::InvalidProblem(format!(
                "mode must be \"exact\" or \"probe\", got {other:?}"
            ))),
        }
    }
}

/// One generator, in monomial or homogeneous-polynomial form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Monomial {
        exponent: Vec<u32>,
        /// Rows spanning the fiber E_ν, entries as rational strings.
        /// Defaults to all of ℂʳ when omitted.
        #[serde(skip_serializing_if = "Option::is_none")]
        fiber: Option<Vec<Vec<String>>>,
    },
    Polynomial {
        terms: Vec<PolyTerm>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub exponent: Vec<u32>,
    /// Coefficient vector in ℂʳ, entries as rational strings.
    pub coeff: Vec<String>,
}

/// Validated problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub d: usize,
    pub r: usize,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    /// Truncation degree for matrix models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u32>,
    /// Schatten exponents to sum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    /// Spectrum/series enumeration budget (max total degree).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u32>,
    /// Stabilization window for the index scan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

pub fn parse_rational(s: &str) -> Result<Rat> {
    Rat::from_str(s.trim())
        .map_err(|e| Error::InvalidProblem(format!("bad rational literal {s:?}: {e}")))
}

pub fn format_rational(r: &Rat) -> String {
    r.to_string()
}

impl ProblemSpec {
    /// Parse and validate a JSON problem document.
    pub fn parse(text: &str) -> Result<Self> {
        let spec: ProblemSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidProblem(format!("schema violation: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::InvalidProblem("field d: must be >= 1".into()));
        }
        if self.r < 1 {
            return Err(Error::InvalidProblem("field r: must be >= 1".into()));
        }
        for (i, g) in self.generators.iter().enumerate() {
            match g {
                GeneratorSpec::Monomial { exponent, fiber } => {
                    if exponent.len() != self.d {
                        return Err(Error::InvalidProblem(format!(
                            "generator {i}: exponent length {} != d = {}",
                            exponent.len(),
                            self.d
                        )));
                    }
                    if let Some(rows) = fiber {
                        if rows.is_empty() {
                            return Err(Error::InvalidProblem(format!(
                                "generator {i}: empty fiber"
                            )));
                        }
                        for row in rows {
                            if row.len() != self.r {
                                return Err(Error::InvalidProblem(format!(
                                    "generator {i}: fiber vector length {} != r = {}",
                                    row.len(),
                                    self.r
                                )));
                            }
                            for s in row {
                                parse_rational(s)?;
                            }
                        }
                    }
                }
                GeneratorSpec::Polynomial { terms } => {
                    if terms.is_empty() {
                        return Err(Error::InvalidProblem(format!(
                            "generator {i}: polynomial with no terms"
                        )));
                    }
                    for t in terms {
                        if t.exponent.len() != self.d {
                            return Err(Error::InvalidProblem(format!(
                                "generator {i}: term exponent length {} != d = {}",
                                t.exponent.len(),
                                self.d
                            )));
                        }
                        if t.coeff.len() != self.r {
                            return Err(Error::InvalidProblem(format!(
                                "generator {i}: coeff length {} != r = {}",
                                t.coeff.len(),
                                self.r
                            )));
                        }
                        for s in &t.coeff {
                            parse_rational(s)?;
                        }
                    }
                }
            }
        }
        if let Some(w) = self.window {
            if w == 0 {
                return Err(Error::InvalidProblem("field window: must be >= 1".into()));
            }
        }
        if let Some(ps) = &self.p {
            for p in ps {
                if *p < 1.0 || !p.is_finite() {
                    return Err(Error::InvalidProblem(format!("field p: {p} < 1")));
                }
            }
        }
        Ok(())
    }

    pub fn has_polynomial_generators(&self) -> bool {
        self.generators
            .iter()
            .any(|g| matches!(g, GeneratorSpec::Polynomial { .. }))
    }

    /// Canonical serialized form (defaults resolved, fields in schema order).
    pub fn canonical_json(&self) -> String {
        let mut spec = self.clone();
        spec.cutoff = Some(spec.cutoff_or_default());
        spec.p = Some(spec.p_or_default());
        spec.budget = Some(spec.budget_or_default());
        spec.window = Some(spec.window_or_default());
        serde_json::to_string(&spec).expect("ProblemSpec serializes")
    }

    pub fn cutoff_or_default(&self) -> u32 {
        self.cutoff.unwrap_or(10)
    }

    pub fn p_or_default(&self) -> Vec<f64> {
        self.p
            .clone()
            .unwrap_or_else(|| vec![2.0 * self.d as f64 + 0.5])
    }

    pub fn budget_or_default(&self) -> u32 {
        self.budget.unwrap_or(1000)
    }

    pub fn window_or_default(&self) -> usize {
        self.window.unwrap_or(2 * (self.d + 1))
    }

    /// The monomial submodule described by the monomial-form generators.
    /// Errors if any generator is polynomial-form.
    pub fn to_submodule(&self) -> Result<MonomialSubmodule> {
        let mut gens = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            match g {
                GeneratorSpec::Monomial { exponent, fiber } => {
                    let fiber_rows: Vec<Vec<Rat>> = match fiber {
                        Some(rows) => rows
                            .iter()
                            .map(|row| row.iter().map(|s| parse_rational(s)).collect())
                            .collect::<Result<_>>()?,
                        None => (0..self.r)
                            .map(|i| {
                                let mut v = vec![Rat::from_integer(0.into()); self.r];
                                v[i] = Rat::from_integer(1.into());
                                v
                            })
                            .collect(),
                    };
                    gens.push(Generator {
                        exponent: MultiIndex::new(exponent.clone()),
                        fiber: fiber_rows,
                    });
                }
                GeneratorSpec::Polynomial { .. } => {
                    return Err(Error::InvalidProblem(format!(
                        "generator {i}: polynomial form requires probe mode"
                    )));
                }
            }
        }
        MonomialSubmodule::new(self.d, self.r, gens)
    }

    /// The homogeneous generator set for the probe path; monomial-form
    /// generators become single-term polynomials (full fibers split into one
    /// generator per fiber vector).
    pub fn to_generator_set(&self) -> Result<HomogeneousGeneratorSet> {
        let mut gens: Vec<Vec<(MultiIndex, Vec<Rat>)>> = Vec::new();
        for g in &self.generators {
            match g {
                GeneratorSpec::Polynomial { terms } => {
                    gens.push(
                        terms
                            .iter()
                            .map(|t| {
                                Ok((
                                    MultiIndex::new(t.exponent.clone()),
                                    t.coeff
                                        .iter()
                                        .map(|s| parse_rational(s))
                                        .collect::<Result<_>>()?,
                                ))
                            })
                            .collect::<Result<_>>()?,
                    );
                }
                GeneratorSpec::Monomial { exponent, fiber } => {
                    let rows: Vec<Vec<Rat>> = match fiber {
                        Some(rows) => rows
                            .iter()
                            .map(|row| row.iter().map(|s| parse_rational(s)).collect())
                            .collect::<Result<_>>()?,
                        None => (0..self.r)
                            .map(|i| {
                                let mut v = vec![Rat::from_integer(0.into()); self.r];
                                v[i] = Rat::from_integer(1.into());
                                v
                            })
                            .collect(),
                    };
                    for row in rows {
                        gens.push(vec![(MultiIndex::new(exponent.clone()), row)]);
                    }
                }
            }
        }
        HomogeneousGeneratorSet::new(self.d, self.r, gens)
    }
}
