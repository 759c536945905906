//! Python bindings: the monomial-submodule calculators and the probe path,
//! driven in-process from Python.
//!
//! Rich reports cross the boundary as JSON strings (parse with `json.loads`);
//! exact rationals are "numerator/denominator" strings throughout.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dshift_core::dirac::{self, dirac_index};
use dshift_core::fock::{self, Part};
use dshift_core::lattice::{Generator, MonomialSubmodule, MultiIndex, Side};
use dshift_core::probe;
use dshift_core::problem::{parse_rational, ProblemSpec};
use dshift_core::runner::{self, RunOptions};
use dshift_core::schatten;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(err)
}

fn parse_part(part: &str) -> PyResult<Part> {
    match part {
        "full" => Ok(Part::Full),
        "restricted" => Ok(Part::Restricted),
        "compressed" => Ok(Part::Compressed),
        other => Err(PyValueError::new_err(format!(
            "part must be full|restricted|compressed, got {other:?}"
        ))),
    }
}

fn parse_side(side: &str) -> PyResult<Side> {
    match side {
        "submodule" => Ok(Side::Submodule),
        "quotient" => Ok(Side::Quotient),
        other => Err(PyValueError::new_err(format!(
            "side must be submodule|quotient, got {other:?}"
        ))),
    }
}

/// One generator: an exponent plus optional fiber rows (rational strings);
/// `None` means all of C^r.
type PyGenerator = (Vec<u32>, Option<Vec<Vec<String>>>);

/// A monomial-generated invariant subspace of the rank-r d-shift.
#[pyclass]
#[derive(Clone)]
struct Submodule {
    inner: MonomialSubmodule,
}

#[pymethods]
impl Submodule {
    #[new]
    #[pyo3(signature = (d, r, generators))]
    fn new(d: usize, r: usize, generators: Vec<PyGenerator>) -> PyResult<Self> {
        let gens = generators
            .into_iter()
            .map(|(exponent, fiber)| {
                let fiber_rows = match fiber {
                    Some(rows) => rows
                        .iter()
                        .map(|row| row.iter().map(|s| parse_rational(s)).collect())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(err)?,
                    None => (0..r)
                        .map(|i| {
                            let mut v = vec![dshift_core::Rat::from_integer(0.into()); r];
                            v[i] = dshift_core::Rat::from_integer(1.into());
                            v
                        })
                        .collect(),
                };
                Ok(Generator {
                    exponent: MultiIndex::new(exponent),
                    fiber: fiber_rows,
                })
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: MonomialSubmodule::new(d, r, gens).map_err(err)?,
        })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    /// (dim M_n, dim M⊥_n) at total degree n.
    fn graded_dims(&self, n: u32) -> (u64, u64) {
        self.inner.graded_dims(n)
    }

    /// RREF basis of the fiber E(n), rows of rational strings.
    fn fiber(&self, n: Vec<u32>) -> PyResult<Vec<Vec<String>>> {
        let basis = self.inner.fiber(&MultiIndex::new(n)).map_err(err)?;
        Ok(basis
            .iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect())
    }

    /// Canonical minimal form (same fibers at every lattice point).
    fn minimalize(&self) -> Submodule {
        Submodule {
            inner: self.inner.minimalize(),
        }
    }

    /// Curvature report for one side as JSON.
    fn curvature(&self, side: &str, max_degree: u32) -> PyResult<String> {
        let rep = self
            .inner
            .curvature(parse_side(side)?, max_degree)
            .map_err(err)?;
        to_json(&rep)
    }

    /// Exact spectrum of [P_M, S_k]: list of (sigma² string, multiplicity),
    /// descending, plus the exhausted flag.
    fn commutator_spectrum(&self, k: usize, budget: u32) -> PyResult<(Vec<(String, u64)>, bool)> {
        let s = schatten::commutator_spectrum(&self.inner, k, budget).map_err(err)?;
        Ok((
            s.entries
                .iter()
                .map(|e| (e.sigma_sq.to_string(), e.multiplicity))
                .collect(),
            s.exhausted,
        ))
    }

    /// Schatten p-sum of the axis-k commutator spectrum, as JSON.
    fn schatten_sum(&self, k: usize, p: f64, budget: u32) -> PyResult<String> {
        let s = schatten::commutator_spectrum(&self.inner, k, budget).map_err(err)?;
        let rep = schatten::schatten_sum(&s, p).map_err(err)?;
        to_json(&rep)
    }

    /// Exact defects of the defect/commutator identities at a cutoff, as JSON
    /// with rational-string defects.
    fn verify_identities(&self, cutoff: u32) -> PyResult<String> {
        let rep = fock::verify_identities(&self.inner, cutoff).map_err(err)?;
        let sec = dshift_core::report::IdentitySection::from_report(&rep);
        to_json(&sec)
    }

    /// Dirac index report for the restricted/compressed/full tuple, as JSON.
    fn dirac_index(&self, part: &str, cutoff: u32, window: usize) -> PyResult<String> {
        let tuple = fock::shift_tuple(&self.inner, cutoff, parse_part(part)?).map_err(err)?;
        let rep = dirac_index(&tuple, window).map_err(err)?;
        to_json(&rep)
    }

    /// Cross-check of the index formulas against the curvature, as JSON.
    fn verify_index_formulas(&self, cutoff: u32, window: usize) -> PyResult<String> {
        let rep = dirac::verify_index_formulas(&self.inner, cutoff, window).map_err(err)?;
        to_json(&rep)
    }

    /// Numeric singular values of the truncated commutator [P_M, S_k]
    /// (matrix oracle for the closed-form spectrum).
    fn commutator_singular_values(&self, k: usize, cutoff: u32) -> PyResult<Vec<f64>> {
        let p = fock::projection(&self.inner, cutoff).map_err(err)?;
        let s = fock::truncated_shift(&self.inner, k, cutoff, Part::Full).map_err(err)?;
        let comm = p.mul(&s).and_then(|ps| ps.sub(&s.mul(&p)?)).map_err(err)?;
        schatten::numeric_singular_values(&comm).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Submodule(d={}, r={}, generators={})",
            self.inner.d(),
            self.inner.r(),
            self.inner
                .generators()
                .iter()
                .map(|g| format!("{}", g.exponent))
                .collect::<Vec<_>>()
                .join(" ")
        )
    }
}

/// ‖zⁿ‖² = n!/|n|! as a rational string.
#[pyfunction]
fn fock_norm_sq(n: Vec<u32>) -> String {
    fock::fock_norm_sq(&MultiIndex::new(n)).to_string()
}

/// Creation matrices on ΛZ (entries −1/0/1) and the CAR certificate.
#[pyfunction]
fn creation_matrices(d: usize) -> PyResult<(Vec<Vec<Vec<i64>>>, bool)> {
    let c = dirac::creation_matrices(d).map_err(err)?;
    Ok((c.matrices, c.car_verified))
}

/// Partial sums of the number-operator series Σ C(n+d−1,d−1)(n+1)^{−p}, JSON.
#[pyfunction]
fn number_operator_series(d: usize, p: f64, budget: u32) -> PyResult<String> {
    let rep = schatten::number_operator_series(d, p, budget).map_err(err)?;
    to_json(&rep)
}

/// Decay probe for homogeneous generators: each generator is a list of
/// (exponent, coefficient-strings) terms. Returns per-axis reports as JSON.
#[pyfunction]
fn probe_decay(
    d: usize,
    r: usize,
    generators: Vec<Vec<(Vec<u32>, Vec<String>)>>,
    cutoffs: Vec<u32>,
) -> PyResult<String> {
    let gens = generators
        .into_iter()
        .map(|terms| {
            terms
                .into_iter()
                .map(|(e, coeffs)| {
                    Ok((
                        MultiIndex::new(e),
                        coeffs
                            .iter()
                            .map(|s| parse_rational(s))
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(err)?,
                    ))
                })
                .collect::<PyResult<Vec<_>>>()
        })
        .collect::<PyResult<Vec<_>>>()?;
    let set = probe::HomogeneousGeneratorSet::new(d, r, gens).map_err(err)?;
    let reports = probe::probe_commutator_decay(&set, &cutoffs).map_err(err)?;
    to_json(&reports)
}

/// Run a CLI-style command over a JSON problem document; returns
/// (report JSON, exit code). The cache is bypassed.
#[pyfunction]
fn run_problem(command: &str, problem_json: &str) -> PyResult<(String, i32)> {
    let cmd: runner::Command = command.parse().map_err(err)?;
    let spec = ProblemSpec::parse(problem_json).map_err(err)?;
    let options = RunOptions {
        no_cache: true,
        ..Default::default()
    };
    let outcome = runner::run(cmd, &spec, &options).map_err(err)?;
    Ok((
        serde_json::to_string_pretty(&outcome.report).map_err(err)?,
        outcome.exit_code,
    ))
}

#[pymodule]
fn dshift_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Submodule>()?;
    m.add_function(wrap_pyfunction!(fock_norm_sq, m)?)?;
    m.add_function(wrap_pyfunction!(creation_matrices, m)?)?;
    m.add_function(wrap_pyfunction!(number_operator_series, m)?)?;
    m.add_function(wrap_pyfunction!(probe_decay, m)?)?;
    m.add_function(wrap_pyfunction!(run_problem, m)?)?;
    Ok(())
}
