//! Python bindings: pomsets, series-rational expressions and pomset automata.

use std::collections::BTreeSet;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pomset_automata::equiv::{pa_atoms, state_equiv};
use pomset_automata::kleene;
use pomset_automata::oracle::{self, pa_lang_up_to};
use pomset_automata::pa::{check_structure, membership, support_analysis};
use pomset_automata::srexpr::{lang_up_to, simplify};
use pomset_automata::wellstruct::well_structure;
use pomset_automata::{Kind, Letter};

create_exception!(pypomset, PomsetError, PyException);

fn py_err(e: pomset_automata::Error) -> PyErr {
    PomsetError::new_err(e.to_string())
}

fn pomsets(us: impl IntoIterator<Item = pomset_automata::SpTerm>) -> Vec<Pomset> {
    us.into_iter().map(Pomset).collect()
}

/// A series-parallel pomset in canonical form.
#[pyclass(module = "pypomset", frozen, eq, ord, hash)]
#[derive(PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Pomset(pomset_automata::SpTerm);

#[pymethods]
impl Pomset {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        pomset_automata::SpTerm::parse(text).map(Pomset).map_err(py_err)
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind() {
            Kind::Empty => "empty",
            Kind::Primitive => "primitive",
            Kind::Sequential => "sequential",
            Kind::Parallel => "parallel",
        }
    }

    fn seq(&self, other: &Pomset) -> Pomset {
        Pomset(self.0.seq(&other.0))
    }

    fn par(&self, other: &Pomset) -> Pomset {
        Pomset(self.0.par(&other.0))
    }

    fn factorize_seq(&self) -> Vec<Pomset> {
        pomsets(self.0.factorize_seq())
    }

    fn factorize_par(&self) -> Vec<Pomset> {
        pomsets(self.0.factorize_par().iter().cloned())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Pomset({:?})", self.0.to_string())
    }
}

/// A series-rational expression.
#[pyclass(module = "pypomset", frozen, eq, hash)]
#[derive(PartialEq, Eq, Hash)]
struct Expr(pomset_automata::Expr);

#[pymethods]
impl Expr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        pomset_automata::Expr::parse(text).map(Expr).map_err(py_err)
    }

    fn nullable(&self) -> bool {
        self.0.nullable()
    }

    fn lang_up_to(&self, n: usize) -> Vec<Pomset> {
        pomsets(lang_up_to(&self.0, n))
    }

    fn simplify(&self) -> Expr {
        Expr(simplify(&self.0))
    }

    /// Decides whether both expressions denote the same pomset language.
    fn equiv(&self, other: &Expr) -> PyResult<bool> {
        kleene::expr_equiv(&self.0, &other.0).map_err(py_err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.0.to_string())
    }
}

/// A pomset automaton. States are addressed by name.
#[pyclass(module = "pypomset", frozen)]
struct Automaton(pomset_automata::Pa);

impl Automaton {
    fn state(&self, name: &str) -> PyResult<pomset_automata::StateId> {
        self.0.lookup(name).map_err(py_err)
    }
}

#[pymethods]
impl Automaton {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        pomset_automata::Pa::load(path).map(Automaton).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        pomset_automata::Pa::from_json(text).map(Automaton).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.0.save(path).map_err(py_err)
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.0.names_of(&self.0.states_by_name())
    }

    #[getter]
    fn accepting(&self) -> Vec<String> {
        let acc: Vec<_> = self.0.accepting_states().collect();
        self.0.names_of(&acc)
    }

    #[getter]
    fn depth(&self) -> usize {
        support_analysis(&self.0).depth()
    }

    fn is_fork_acyclic(&self) -> bool {
        self.0.is_fork_acyclic()
    }

    /// Structural report as a dict with keys `n_forking_min`,
    /// `parsimonious`, `flat_branching` and `well_structured`.
    fn check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = check_structure(&self.0);
        let d = PyDict::new(py);
        d.set_item("n_forking_min", r.n_forking_min)?;
        d.set_item("parsimonious", r.parsimonious)?;
        d.set_item("flat_branching", r.flat_branching)?;
        d.set_item("well_structured", r.well_structured)?;
        Ok(d)
    }

    fn member(&self, state: &str, pomset: &Pomset) -> PyResult<bool> {
        membership(&self.0, self.state(state)?, &pomset.0).map_err(py_err)
    }

    fn lang_up_to(&self, state: &str, n: usize) -> PyResult<Vec<Pomset>> {
        pa_lang_up_to(&self.0, self.state(state)?, n).map(pomsets).map_err(py_err)
    }

    /// A well-structured automaton in which the tracked states (all states
    /// by default) keep their names and languages.
    #[pyo3(signature = (tracked = None))]
    fn well_structure(&self, tracked: Option<Vec<String>>) -> PyResult<Automaton> {
        let tracked: BTreeSet<_> = match tracked {
            Some(names) => names.iter().map(|n| self.state(n)).collect::<PyResult<_>>()?,
            None => self.0.states().collect(),
        };
        well_structure(&self.0, &tracked).map(|(pa, _)| Automaton(pa)).map_err(py_err)
    }

    /// The atoms, each as a sorted list of state names.
    fn atoms(&self) -> PyResult<Vec<Vec<String>>> {
        let atoms = pa_atoms(&self.0).map_err(py_err)?;
        Ok(atoms.iter().map(|a| self.0.names_of(a)).collect())
    }

    fn state_equiv(&self, a: &str, b: &str) -> PyResult<bool> {
        state_equiv(&self.0, self.state(a)?, self.state(b)?).map_err(py_err)
    }

    fn extract(&self, state: &str) -> PyResult<Expr> {
        kleene::extract(&self.0, self.state(state)?).map(Expr).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("<Automaton with {} states>", self.0.num_states())
    }
}

/// The syntactic automaton of the given expressions; each expression's
/// state is named by its printed form.
#[pyfunction]
fn compile(exprs: Vec<PyRef<'_, Expr>>) -> Automaton {
    let es: Vec<_> = exprs.iter().map(|e| e.0.clone()).collect();
    Automaton(kleene::compile(&es).0)
}

#[pyfunction]
fn expr_equiv(e: &Expr, f: &Expr) -> PyResult<bool> {
    kleene::expr_equiv(&e.0, &f.0).map_err(py_err)
}

/// Equality of the languages restricted to pomsets of at most `n` events.
#[pyfunction]
fn oracle_equiv(e: &Expr, f: &Expr, n: usize) -> bool {
    oracle::oracle_equiv(&e.0, &f.0, n)
}

/// Every pomset over `letters` with at most `n` events.
#[pyfunction]
fn enumerate(letters: Vec<String>, n: usize) -> PyResult<Vec<Pomset>> {
    let alphabet = letters.iter().map(|s| Letter::new(s)).collect::<Result<_, _>>().map_err(py_err)?;
    Ok(pomsets(oracle::enumerate_sp(&alphabet, n)))
}

#[pymodule]
fn pypomset(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PomsetError", m.py().get_type::<PomsetError>())?;
    m.add_class::<Pomset>()?;
    m.add_class::<Expr>()?;
    m.add_class::<Automaton>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(expr_equiv, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_equiv, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    Ok(())
}
