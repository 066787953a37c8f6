//! Python bindings. Set and pair indices are 0-based here; `Index.query`
//! takes the same 1-based query lines as the command-line tool.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use gapstring::artifact::{Answer, ArtifactKind, Mode};
use gapstring::gapped::GappedIndex;
use gapstring::jumbled::{Alphabet, Histogram, JumbledIndex as CoreJumbled};
use gapstring::persist::{BuildOptions, Index as CoreIndex};
use gapstring::reporting::AugmentedInstance;
use gapstring::set::SetCollection;
use gapstring::smallest_shift::ShiftIndex;
use gapstring::ssi::{BackendConfig, BackendKind, ShiftQuery};
use gapstring::stats::QueryStats;
use gapstring::text::{build_suffix_array, GappedStringIndex as CoreGappedString, Text};
use gapstring::{Error, ErrorClass};

create_exception!(gapstring_py, GuardError, PyException, "Overflow guard, universe guard or memory budget exceeded.");
create_exception!(gapstring_py, VerificationError, PyException, "Digest mismatch or oracle disagreement.");

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e.class() {
        ErrorClass::Format => PyValueError::new_err(msg),
        ErrorClass::Guard => GuardError::new_err(msg),
        ErrorClass::Verification => VerificationError::new_err(msg),
        ErrorClass::Io => PyOSError::new_err(msg),
    }
}

fn backend(name: &str, delta: f64) -> PyResult<BackendKind> {
    BackendKind::parse(name, delta).map_err(err)
}

fn config(seed: Option<u64>, mem_budget: Option<u64>) -> BackendConfig {
    let d = BackendConfig::default();
    BackendConfig { seed: seed.unwrap_or(d.seed), mem_budget: mem_budget.unwrap_or(d.mem_budget) }
}

fn collection(sets: Vec<Vec<i64>>, u: i64) -> PyResult<SetCollection> {
    SetCollection::ingest(sets, u).map_err(err)
}

fn pairs(v: Vec<(usize, usize)>) -> Vec<(i64, i64)> {
    v.into_iter().map(|(i, j)| (i as i64, j as i64)).collect()
}

fn stats_dict(py: Python<'_>, st: &QueryStats) -> PyResult<Py<PyAny>> {
    json_value(py, &serde_json::to_string(st).expect("serializable"))
}

fn json_value(py: Python<'_>, s: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn answer(py: Python<'_>, a: Answer) -> PyResult<Py<PyAny>> {
    Ok(match a {
        Answer::Exists(w) => w.into_pyobject(py)?.into_any().unbind(),
        Answer::Report(v) => v.into_pyobject(py)?.into_any().unbind(),
        Answer::Shift(s) => s.into_pyobject(py)?.into_any().unbind(),
    })
}

/// A persisted index of any kind: `ssi`, `gapped-set`, `gapped-string`,
/// `jumbled` or `smallest-shift`.
#[pyclass(frozen)]
struct Index(CoreIndex);

#[pymethods]
impl Index {
    /// Builds from the bytes of a set file or a text.
    #[staticmethod]
    #[pyo3(signature = (kind, source, backend="linear", delta=0.5, seed=None, mem_budget=None, instrumented=false))]
    #[allow(clippy::too_many_arguments)]
    fn build(
        py: Python<'_>,
        kind: &str,
        source: Vec<u8>,
        backend: &str,
        delta: f64,
        seed: Option<u64>,
        mem_budget: Option<u64>,
        instrumented: bool,
    ) -> PyResult<Self> {
        let kind: ArtifactKind = kind.parse().map_err(err)?;
        let opts = BuildOptions { backend: self::backend(backend, delta)?, config: config(seed, mem_budget), instrumented };
        py.detach(|| CoreIndex::build(kind, source, opts)).map(Index).map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        CoreIndex::load(&path).map(Index).map_err(err)
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        CoreIndex::from_bytes(data).map(Index).map_err(err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.0.save(&path).map_err(err)
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.0.to_bytes())
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.manifest().kind.name()
    }

    fn manifest(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_value(py, &serde_json::to_string(self.0.manifest()).expect("serializable"))
    }

    /// Answers one query line. Report mode gives a list of pairs, exists mode
    /// a witness pair or `None`; smallest-shift indexes give an int or `None`.
    #[pyo3(signature = (line, mode="report"))]
    fn query(&self, py: Python<'_>, line: &str, mode: &str) -> PyResult<Py<PyAny>> {
        let (a, _) = self.run(line, mode)?;
        answer(py, a)
    }

    /// Like `query`, also returning the instrumentation counters as a dict.
    #[pyo3(signature = (line, mode="report"))]
    fn query_counted(&self, py: Python<'_>, line: &str, mode: &str) -> PyResult<(Py<PyAny>, Py<PyAny>)> {
        let (a, st) = self.run(line, mode)?;
        Ok((answer(py, a)?, stats_dict(py, &st)?))
    }

    /// Oracle check on random queries; returns the report as a dict.
    #[pyo3(signature = (trials=1000, seed=0))]
    fn verify(&self, py: Python<'_>, trials: usize, seed: u64) -> PyResult<Py<PyAny>> {
        let r = py.detach(|| gapstring::verify::verify(self.0.artifact(), trials, seed)).map_err(err)?;
        json_value(py, &serde_json::to_string(&r).expect("serializable"))
    }
}

impl Index {
    fn run(&self, line: &str, mode: &str) -> PyResult<(Answer, QueryStats)> {
        let mode: Mode = mode.parse().map_err(err)?;
        let a = self.0.artifact();
        let q = a.parse_query(line, 1).map_err(err)?;
        let mut st = QueryStats::default();
        let ans = a.execute(&q, mode, &mut st).map_err(err)?;
        Ok((ans, st))
    }
}

/// Shifted set intersection with reporting over sets drawn from `[1, u]`.
#[pyclass(frozen)]
struct SsiIndex(AugmentedInstance);

#[pymethods]
impl SsiIndex {
    #[new]
    #[pyo3(signature = (sets, u, backend="linear", delta=0.5, seed=None, mem_budget=None))]
    fn new(
        py: Python<'_>,
        sets: Vec<Vec<i64>>,
        u: i64,
        backend: &str,
        delta: f64,
        seed: Option<u64>,
        mem_budget: Option<u64>,
    ) -> PyResult<Self> {
        let c = collection(sets, u)?;
        let kind = self::backend(backend, delta)?;
        let cfg = config(seed, mem_budget);
        py.detach(|| AugmentedInstance::build_with(&c, kind, &cfg)).map(SsiIndex).map_err(err)
    }

    /// A pair `(a, b)` with `a` in set `i`, `b` in set `j` and `a + s == b`.
    fn exists(&self, i: usize, j: usize, s: i64) -> PyResult<Option<(i64, i64)>> {
        let w = self.0.exists_counted(ShiftQuery::new(i, j, s), &mut QueryStats::default()).map_err(err)?;
        Ok(w.map(|c| (c.a, c.b)))
    }

    fn report(&self, i: usize, j: usize, s: i64) -> PyResult<Vec<(i64, i64)>> {
        self.0.report_shift(ShiftQuery::new(i, j, s)).map_err(err)
    }

    #[getter]
    fn space_bytes(&self) -> u64 {
        self.0.backend().space_bytes()
    }

    fn __len__(&self) -> usize {
        self.0.k()
    }
}

/// Pairs of elements whose difference lies in `[alpha, beta]`.
#[pyclass(frozen)]
struct GappedSetIndex(GappedIndex);

#[pymethods]
impl GappedSetIndex {
    #[new]
    #[pyo3(signature = (sets, u, backend="linear", delta=0.5, seed=None, mem_budget=None))]
    fn new(
        py: Python<'_>,
        sets: Vec<Vec<i64>>,
        u: i64,
        backend: &str,
        delta: f64,
        seed: Option<u64>,
        mem_budget: Option<u64>,
    ) -> PyResult<Self> {
        let c = collection(sets, u)?;
        let kind = self::backend(backend, delta)?;
        let cfg = config(seed, mem_budget);
        py.detach(|| GappedIndex::build_with(c, kind, &cfg)).map(GappedSetIndex).map_err(err)
    }

    fn exists(&self, i: usize, j: usize, alpha: i64, beta: i64) -> PyResult<Option<(i64, i64)>> {
        self.0.gapped_exists(i, j, alpha, beta).map_err(err)
    }

    fn report(&self, i: usize, j: usize, alpha: i64, beta: i64) -> PyResult<Vec<(i64, i64)>> {
        self.0.gapped_report(i, j, alpha, beta).map_err(err)
    }

    /// The covering plan for `[alpha, beta]` as text, or `None` when the
    /// clamped range is empty.
    fn plan(&self, alpha: i64, beta: i64) -> PyResult<Option<String>> {
        Ok(self.0.plan(alpha, beta).map_err(err)?.map(|p| p.to_string()))
    }

    #[getter]
    fn total_elements(&self) -> usize {
        self.0.total_elements()
    }

    #[getter]
    fn space_bytes(&self) -> u64 {
        self.0.space_bytes()
    }
}

/// Occurrence pairs of two patterns at a distance in `[alpha, beta]`.
#[pyclass(frozen)]
struct GappedStringIndex(CoreGappedString);

#[pymethods]
impl GappedStringIndex {
    #[new]
    #[pyo3(signature = (text, backend="linear", delta=0.5, seed=None, mem_budget=None))]
    fn new(py: Python<'_>, text: Vec<u8>, backend: &str, delta: f64, seed: Option<u64>, mem_budget: Option<u64>) -> PyResult<Self> {
        let t = Text::new(text).map_err(err)?;
        let kind = self::backend(backend, delta)?;
        let cfg = config(seed, mem_budget);
        py.detach(|| CoreGappedString::build_with(t, kind, &cfg)).map(GappedStringIndex).map_err(err)
    }

    /// 1-based start positions `(i, j)` with `alpha <= j - i <= beta`.
    fn report(&self, p1: &[u8], p2: &[u8], alpha: i64, beta: i64) -> PyResult<Vec<(i64, i64)>> {
        self.0.report(p1, p2, alpha, beta).map(pairs).map_err(err)
    }

    fn exists(&self, p1: &[u8], p2: &[u8], alpha: i64, beta: i64) -> PyResult<Option<(i64, i64)>> {
        Ok(self.0.exists(p1, p2, alpha, beta).map_err(err)?.map(|(i, j)| (i as i64, j as i64)))
    }

    #[getter]
    fn set_count(&self) -> usize {
        self.0.set_count()
    }

    fn __len__(&self) -> usize {
        self.0.text().len()
    }
}

/// Substrings with a given letter histogram.
#[pyclass(frozen)]
struct JumbledIndex(CoreJumbled);

#[pymethods]
impl JumbledIndex {
    /// The alphabet defaults to the letters occurring in `text`.
    #[new]
    #[pyo3(signature = (text, alphabet=None, backend="linear", delta=0.5))]
    fn new(py: Python<'_>, text: Vec<u8>, alphabet: Option<Vec<u8>>, backend: &str, delta: f64) -> PyResult<Self> {
        let alpha = match alphabet {
            Some(a) => Alphabet::new(&a),
            None => Alphabet::of_text(&text),
        }
        .map_err(err)?;
        let kind = self::backend(backend, delta)?;
        py.detach(|| CoreJumbled::build(&text, alpha, kind)).map(JumbledIndex).map_err(err)
    }

    #[getter]
    fn alphabet<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.0.alphabet().letters())
    }

    /// 1-based `(start, end)` of every substring with histogram `counts`.
    fn report(&self, counts: Vec<u64>) -> PyResult<Vec<(i64, i64)>> {
        self.0.report(&Histogram(counts)).map(pairs).map_err(err)
    }

    fn exists(&self, counts: Vec<u64>) -> PyResult<Option<(i64, i64)>> {
        Ok(self.0.exists(&Histogram(counts)).map_err(err)?.map(|(i, j)| (i as i64, j as i64)))
    }
}

/// Smallest nonnegative shift aligning two sets.
#[pyclass(frozen)]
struct SmallestShiftIndex(ShiftIndex);

#[pymethods]
impl SmallestShiftIndex {
    #[new]
    fn new(py: Python<'_>, sets: Vec<Vec<i64>>, u: i64) -> PyResult<Self> {
        let c = collection(sets, u)?;
        Ok(SmallestShiftIndex(py.detach(|| ShiftIndex::build(c))))
    }

    fn query(&self, i: usize, j: usize) -> PyResult<Option<i64>> {
        self.0.smallest_shift(i, j).map_err(err)
    }

    #[getter]
    fn threshold(&self) -> usize {
        self.0.threshold()
    }

    #[getter]
    fn large_sets(&self) -> Vec<usize> {
        self.0.large_sets().to_vec()
    }
}

/// `(sa, lcp)` of `text`, with 1-based suffix starts.
#[pyfunction]
fn suffix_array(text: Vec<u8>) -> PyResult<(Vec<u32>, Vec<u32>)> {
    let sa = build_suffix_array(&Text::new(text).map_err(err)?);
    Ok((sa.sa, sa.lcp))
}

/// The covering plan for `[alpha, beta]` as text.
#[pyfunction]
fn plan_cover(alpha: i64, beta: i64) -> PyResult<String> {
    gapstring::gapped::plan_cover(alpha, beta).map(|p| p.to_string()).map_err(err)
}

/// Every pair `(a, b)` of `values` with `a + b == c`.
#[pyfunction]
fn report_3sum(values: Vec<i64>, c: i64) -> PyResult<Vec<(i64, i64)>> {
    gapstring::reporting::report_3sum(&values, c).map_err(err)
}

#[pymodule]
pub fn gapstring_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Index>()?;
    m.add_class::<SsiIndex>()?;
    m.add_class::<GappedSetIndex>()?;
    m.add_class::<GappedStringIndex>()?;
    m.add_class::<JumbledIndex>()?;
    m.add_class::<SmallestShiftIndex>()?;
    m.add_function(wrap_pyfunction!(suffix_array, m)?)?;
    m.add_function(wrap_pyfunction!(plan_cover, m)?)?;
    m.add_function(wrap_pyfunction!(report_3sum, m)?)?;
    m.add("GuardError", m.py().get_type::<GuardError>())?;
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    Ok(())
}
