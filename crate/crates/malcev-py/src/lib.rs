//! Python bindings for the finite-algebra workbench.
//!
//! Build a loadable module with
//! `cargo build -p malcev-py --release --features extension-module`;
//! `python/smoke_test.py` imports the resulting shared library directly.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use malcev::algebra::{load_algebra_str, FiniteAlgebra};
use malcev::clone::{self, CloneKind};
use malcev::commutator::{CommutatorLab, CommutatorMethod, SupernilpotenceStatus};
use malcev::partition::{self, Partition};
use malcev::samples;
use malcev::witness::{setup_witness, verify_ghost_absent};
use malcev::z4;

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_kind(kind: &str) -> PyResult<CloneKind> {
    match kind {
        "term" => Ok(CloneKind::Term),
        "polynomial" => Ok(CloneKind::Polynomial),
        other => Err(value_err(format!(
            "kind must be 'term' or 'polynomial', got '{other}'"
        ))),
    }
}

fn parse_method(method: &str) -> PyResult<CommutatorMethod> {
    match method {
        "absorbing" => Ok(CommutatorMethod::AbsorbingGeneration),
        "nilpotent-t" => Ok(CommutatorMethod::NilpotentT),
        other => Err(value_err(format!(
            "method must be 'absorbing' or 'nilpotent-t', got '{other}'"
        ))),
    }
}

/// A congruence or equivalence partition of `0..size`.
#[pyclass(name = "Partition")]
#[derive(Clone)]
struct PyPartition {
    inner: Partition,
}

#[pymethods]
impl PyPartition {
    /// The all-singletons partition.
    #[staticmethod]
    fn zero(size: usize) -> PyPartition {
        PyPartition {
            inner: Partition::zero(size),
        }
    }

    /// The single-block partition.
    #[staticmethod]
    fn one(size: usize) -> PyPartition {
        PyPartition {
            inner: Partition::one(size),
        }
    }

    /// The finest partition joining each listed pair.
    #[staticmethod]
    fn from_pairs(size: usize, pairs: Vec<(u8, u8)>) -> PyPartition {
        PyPartition {
            inner: Partition::from_pairs(size, &pairs),
        }
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    /// Blocks as sorted lists, ordered by least member.
    fn blocks(&self) -> Vec<Vec<u8>> {
        self.inner.blocks()
    }

    fn __repr__(&self) -> String {
        format!("Partition({})", self.inner)
    }

    fn __eq__(&self, other: &PyPartition) -> bool {
        self.inner == other.inner
    }
}

/// A finite algebra given by operation tables.
#[pyclass(name = "Algebra")]
#[derive(Clone)]
struct PyAlgebra {
    inner: FiniteAlgebra,
}

#[pymethods]
impl PyAlgebra {
    /// Parses the JSON format
    /// `{"size": 4, "ops": [{"name": "plus", "arity": 2, "table": [...]}]}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyAlgebra> {
        Ok(PyAlgebra {
            inner: load_algebra_str(text).map_err(value_err)?,
        })
    }

    /// The cyclic group of the given order.
    #[staticmethod]
    fn cyclic_group(order: usize) -> PyResult<PyAlgebra> {
        if order == 0 || order > 255 {
            return Err(value_err("order must be between 1 and 255"));
        }
        Ok(PyAlgebra {
            inner: samples::cyclic_group(order),
        })
    }

    /// The Klein four-group.
    #[staticmethod]
    fn klein_four() -> PyAlgebra {
        PyAlgebra {
            inner: samples::klein_four(),
        }
    }

    /// The symmetric group on three letters.
    #[staticmethod]
    fn symmetric_group_3() -> PyAlgebra {
        PyAlgebra {
            inner: samples::symmetric_group_3(),
        }
    }

    /// The four-element benchmark algebra truncated to doubled products of
    /// at most `max_product_arity` factors (between 2 and 5).
    #[staticmethod]
    fn z4_truncation(max_product_arity: usize) -> PyResult<PyAlgebra> {
        if !(2..=5).contains(&max_product_arity) {
            return Err(value_err("product arity cap must be between 2 and 5"));
        }
        Ok(PyAlgebra {
            inner: z4::z4_algebra(max_product_arity),
        })
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    fn op_names(&self) -> Vec<String> {
        self.inner.ops().iter().map(|o| o.name.clone()).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Algebra(size={}, ops=[{}])",
            self.inner.size(),
            self.op_names().join(", ")
        )
    }

    /// All congruences, coarsening-ordered from equality to the full
    /// relation.
    fn congruence_lattice(&self) -> Vec<PyPartition> {
        partition::congruence_lattice(&self.inner)
            .into_iter()
            .map(|inner| PyPartition { inner })
            .collect()
    }

    /// Number of term or polynomial operations at the arity.
    #[pyo3(signature = (arity, kind = "term", budget = 8_000_000))]
    fn clone_size(&self, arity: usize, kind: &str, budget: usize) -> PyResult<usize> {
        let slice = clone::clone_upto(&self.inner, arity, parse_kind(kind)?, budget)
            .map_err(value_err)?;
        Ok(slice.len())
    }

    /// Flat value tables of the clone slice, in canonical order.
    #[pyo3(signature = (arity, kind = "term", budget = 8_000_000))]
    fn clone_tables(&self, arity: usize, kind: &str, budget: usize) -> PyResult<Vec<Vec<u8>>> {
        let slice = clone::clone_upto(&self.inner, arity, parse_kind(kind)?, budget)
            .map_err(value_err)?;
        Ok(slice
            .tables()
            .iter()
            .map(|t| t.values().to_vec())
            .collect())
    }

    /// Flat table of the first Mal'cev term, or None.
    #[pyo3(signature = (budget = 8_000_000))]
    fn find_malcev(&self, budget: usize) -> PyResult<Option<Vec<u8>>> {
        Ok(clone::find_malcev(&self.inner, budget)
            .map_err(value_err)?
            .map(|t| t.values().to_vec()))
    }

    /// Least n with the lower central series reaching equality, or None.
    #[pyo3(signature = (budget = 8_000_000))]
    fn nilpotency_class(&self, budget: usize) -> PyResult<Option<usize>> {
        CommutatorLab::new(&self.inner, budget)
            .nilpotency_class()
            .map_err(value_err)
    }

    /// Least k with the (k+1)-fold total commutator equal to equality,
    /// or None when there is no such k at or below the cap.
    #[pyo3(signature = (cap = 4, budget = 8_000_000))]
    fn supernilpotence_degree(&self, cap: usize, budget: usize) -> PyResult<Option<usize>> {
        let status = CommutatorLab::new(&self.inner, budget)
            .supernilpotence_degree(cap)
            .map_err(value_err)?;
        Ok(match status {
            SupernilpotenceStatus::Degree(d) => Some(d),
            SupernilpotenceStatus::ExceedsCap { .. }
            | SupernilpotenceStatus::NotSupernilpotent => None,
        })
    }

    /// The higher commutator of the given congruences.
    #[pyo3(signature = (congruences, method = "absorbing", budget = 8_000_000))]
    fn higher_commutator(
        &self,
        congruences: Vec<PyPartition>,
        method: &str,
        budget: usize,
    ) -> PyResult<PyPartition> {
        let args: Vec<Partition> = congruences.into_iter().map(|p| p.inner).collect();
        let inner = CommutatorLab::new(&self.inner, budget)
            .higher_commutator(&args, parse_method(method)?)
            .map_err(value_err)?;
        Ok(PyPartition { inner })
    }
}

/// Counts from one extension-verification run on the benchmark algebra.
#[pyclass(name = "ExtensionCheck")]
struct PyExtensionCheck {
    #[pyo3(get)]
    arity: usize,
    #[pyo3(get)]
    domains_total: usize,
    #[pyo3(get)]
    domains_scanned: usize,
    #[pyo3(get)]
    sampled: bool,
    #[pyo3(get)]
    functions_preserving: u64,
    #[pyo3(get)]
    functions_extended: u64,
    #[pyo3(get)]
    counterexamples: usize,
    #[pyo3(get)]
    hom_check_failures: u64,
}

/// Checks that every preserving partial operation on the benchmark's
/// equationally definable domains extends to a term; `sample` limits the
/// run to that many pseudo-randomly chosen domains.
#[pyfunction]
#[pyo3(signature = (arity, sample = None, seed = 0))]
fn z4_verify(arity: usize, sample: Option<usize>, seed: u64) -> PyResult<PyExtensionCheck> {
    if !(1..=3).contains(&arity) {
        return Err(value_err("arity must be between 1 and 3"));
    }
    if sample == Some(0) {
        return Err(value_err("sample count must be positive"));
    }
    let mode = match sample {
        Some(count) => z4::VerifyMode::Sampled { count, seed },
        None => z4::VerifyMode::Full,
    };
    let outcome = z4::z4_verify_duality(arity, mode);
    Ok(PyExtensionCheck {
        arity: outcome.arity,
        domains_total: outcome.domains_total,
        domains_scanned: outcome.domains_scanned,
        sampled: outcome.sampled,
        functions_preserving: outcome.functions_preserving,
        functions_extended: outcome.functions_extended,
        counterexamples: outcome.counterexamples.len(),
        hom_check_failures: outcome.hom_check_failures,
    })
}

/// Number of distinct normal-form tables of the benchmark algebra at the
/// arity (1 to 3).
#[pyfunction]
fn z4_normal_form_count(arity: usize) -> PyResult<usize> {
    if !(1..=3).contains(&arity) {
        return Err(value_err("arity must be between 1 and 3"));
    }
    Ok(z4::z4_normal_form_tables(arity).len())
}

/// Outcome of the ghost-element check on one witness construction.
#[pyclass(name = "GhostCheck")]
struct PyGhostCheck {
    #[pyo3(get)]
    case: String,
    #[pyo3(get)]
    degree: usize,
    #[pyo3(get)]
    alpha_blocks: Vec<Vec<u8>>,
    #[pyo3(get)]
    gamma_blocks: Vec<Vec<u8>>,
    #[pyo3(get)]
    base: u8,
    #[pyo3(get)]
    t: i64,
    #[pyo3(get)]
    generators: usize,
    #[pyo3(get)]
    elements: usize,
    #[pyo3(get)]
    applicable: usize,
    #[pyo3(get)]
    violations: usize,
    #[pyo3(get)]
    ghost_found: bool,
    #[pyo3(get)]
    ghost_fails_parity: bool,
    #[pyo3(get)]
    partial: bool,
    #[pyo3(get)]
    depth_completed: usize,
}

/// Builds the non-dualizability witness for the algebra's total congruence
/// on a centered window and runs the bounded-depth parity and ghost checks.
#[pyfunction]
#[pyo3(signature = (algebra, window = 30, depth = 1, element_budget = 200_000, budget = 8_000_000))]
fn witness_check(
    algebra: &PyAlgebra,
    window: i64,
    depth: usize,
    element_budget: usize,
    budget: usize,
) -> PyResult<PyGhostCheck> {
    if window < 1 {
        return Err(value_err("window length must be positive"));
    }
    let lo = -(window / 2);
    let hi = lo + window - 1;
    let beta = Partition::one(algebra.inner.size());
    let setup = setup_witness(&algebra.inner, &beta, lo, hi, budget).map_err(value_err)?;
    let report = verify_ghost_absent(&setup, depth, element_budget).map_err(value_err)?;
    Ok(PyGhostCheck {
        case: setup.rule().to_string(),
        degree: setup.degree(),
        alpha_blocks: setup.alpha().blocks(),
        gamma_blocks: setup.gamma().blocks(),
        base: setup.base(),
        t: setup.t(),
        generators: report.generators,
        elements: report.elements,
        applicable: report.applicable,
        violations: report.violations,
        ghost_found: report.ghost_found,
        ghost_fails_parity: report.ghost_fails_parity,
        partial: report.partial,
        depth_completed: report.depth_completed,
    })
}

#[pymodule]
fn malcev_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", malcev::VERSION)?;
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyPartition>()?;
    m.add_class::<PyExtensionCheck>()?;
    m.add_class::<PyGhostCheck>()?;
    m.add_function(wrap_pyfunction!(z4_verify, m)?)?;
    m.add_function(wrap_pyfunction!(z4_normal_form_count, m)?)?;
    m.add_function(wrap_pyfunction!(witness_check, m)?)?;
    Ok(())
}
