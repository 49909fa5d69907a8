//! Python bindings. Structured results (rankings, experiment summaries)
//! cross the boundary as JSON and come out as plain dicts and lists.

use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;
use verbsense::eval::{self, ExperimentConfig};
use verbsense::synth::{self, GeneratorSpec};
use verbsense::{CommitPolicy, SamplerConfig, SentenceExample, Strategy, Weighting};

fn err(e: verbsense::Error) -> PyErr {
    match e {
        verbsense::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn from_json<'py, T: serde::Serialize + ?Sized>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

pub fn weighting(alpha: Option<f64>) -> Weighting {
    match alpha {
        Some(alpha) => Weighting::Power { alpha },
        None => Weighting::ArgmaxOnly,
    }
}

pub fn sampler_config(
    lambda: f64,
    k: usize,
    batch: usize,
    alpha: Option<f64>,
    extend_frame: bool,
) -> verbsense::Result<SamplerConfig> {
    let config = SamplerConfig {
        lambda,
        k,
        batch_size: batch,
        weighting: weighting(alpha),
        policy: if extend_frame {
            CommitPolicy::ExtendFrame
        } else {
            CommitPolicy::Reject
        },
    };
    config.validate()?;
    Ok(config)
}

pub fn strategies(names: &[String]) -> verbsense::Result<Vec<Strategy>> {
    names
        .iter()
        .map(|n| match n.as_str() {
            "random" => Ok(Strategy::Random),
            "utility" => Ok(Strategy::Utility),
            other => Err(verbsense::Error::Config(format!("unknown strategy {other:?}"))),
        })
        .collect()
}

#[pyclass(name = "Thesaurus", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyThesaurus {
    inner: Arc<verbsense::Thesaurus>,
}

#[pymethods]
impl PyThesaurus {
    /// Parses node records, one JSON object per line.
    #[new]
    fn new(jsonl: &str) -> PyResult<Self> {
        Ok(PyThesaurus {
            inner: Arc::new(verbsense::Thesaurus::from_jsonl(jsonl).map_err(err)?),
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyThesaurus {
            inner: Arc::new(verbsense::Thesaurus::load(path).map_err(err)?),
        })
    }

    fn sim(&self, a: &str, b: &str) -> u8 {
        self.inner.sim(a, b)
    }

    fn path_length(&self, a: &str, b: &str) -> Option<u32> {
        self.inner.path_length(a, b)
    }

    fn contains(&self, word: &str) -> bool {
        self.inner.contains(word)
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.inner.depth()
    }

    #[getter]
    fn num_leaves(&self) -> usize {
        self.inner.num_leaves()
    }

    fn to_jsonl(&self) -> String {
        self.inner.to_jsonl()
    }
}

#[pyclass(name = "Database", skip_from_py_object)]
#[derive(Clone)]
pub struct PyDatabase {
    inner: verbsense::Database,
}

#[pymethods]
impl PyDatabase {
    #[new]
    fn new(jsonl: &str) -> PyResult<Self> {
        Ok(PyDatabase {
            inner: verbsense::Database::from_jsonl(jsonl).map_err(err)?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyDatabase {
            inner: verbsense::Database::load_seeds(path).map_err(err)?,
        })
    }

    fn verbs(&self) -> Vec<String> {
        self.inner.verbs().map(str::to_owned).collect()
    }

    /// Sense ids of `verb` in database order.
    fn senses(&self, verb: &str) -> Vec<String> {
        self.inner
            .senses(verb)
            .unwrap_or_default()
            .iter()
            .map(|s| s.sense_id.clone())
            .collect()
    }

    #[getter]
    fn num_senses(&self) -> usize {
        self.inner.num_senses()
    }

    #[getter]
    fn total_fillers(&self) -> usize {
        self.inner.total_fillers()
    }

    fn to_jsonl(&self) -> String {
        self.inner.to_jsonl()
    }
}

#[pyclass(name = "Sentence", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PySentence {
    inner: SentenceExample,
}

#[pymethods]
impl PySentence {
    #[new]
    #[pyo3(signature = (id, verb, complements, gold=None))]
    fn new(id: String, verb: String, complements: Vec<(String, String)>, gold: Option<String>) -> PyResult<Self> {
        let mut inner = SentenceExample::new(id, verb, complements);
        inner.gold = gold;
        inner.check_shape().map_err(err)?;
        Ok(PySentence { inner })
    }

    #[getter]
    fn id(&self) -> &str {
        &self.inner.id
    }

    #[getter]
    fn verb(&self) -> &str {
        &self.inner.verb
    }

    #[getter]
    fn complements(&self) -> Vec<(String, String)> {
        self.inner
            .complements
            .iter()
            .map(|c| (c.case().to_owned(), c.noun().to_owned()))
            .collect()
    }

    #[getter]
    fn gold(&self) -> Option<&str> {
        self.inner.gold.as_deref()
    }

    fn __repr__(&self) -> String {
        format!(
            "Sentence({:?}, {:?}, {:?})",
            self.inner.id,
            self.inner.verb,
            self.complements()
        )
    }
}

fn sentences(corpus: &[PySentence]) -> Vec<SentenceExample> {
    corpus.iter().map(|s| s.inner.clone()).collect()
}

/// Reads a JSONL corpus, checking every sentence against `seeds` when given.
#[pyfunction]
#[pyo3(signature = (jsonl, seeds=None))]
fn parse_corpus(jsonl: &str, seeds: Option<&PyDatabase>) -> PyResult<Vec<PySentence>> {
    let parsed = verbsense::corpus::parse_str(jsonl, seeds.map(|d| &d.inner)).map_err(err)?;
    Ok(parsed.examples.into_iter().map(|inner| PySentence { inner }).collect())
}

/// Ranks the senses of one sentence: `{"interpretations": [...], "frame_mismatch": bool}`.
#[pyfunction]
#[pyo3(signature = (sentence, database, thesaurus, alpha=None))]
fn score_senses<'py>(
    py: Python<'py>,
    sentence: &PySentence,
    database: &PyDatabase,
    thesaurus: &PyThesaurus,
    alpha: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let ranking =
        verbsense::score_senses(&sentence.inner, &database.inner, &thesaurus.inner, weighting(alpha)).map_err(err)?;
    from_json(py, &ranking)
}

#[pyclass(name = "SamplingState")]
pub struct PySamplingState {
    inner: verbsense::SamplingState,
}

impl PySamplingState {
    fn check(&self, x: usize) -> PyResult<()> {
        if x < self.inner.corpus().len() {
            Ok(())
        } else {
            Err(PyIndexError::new_err(format!("sentence index {x} out of range")))
        }
    }
}

#[pymethods]
impl PySamplingState {
    #[new]
    #[pyo3(signature = (thesaurus, seeds, corpus, lambda_=0.5, k=1, batch=1, alpha=None, extend_frame=false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        thesaurus: &PyThesaurus,
        seeds: &PyDatabase,
        corpus: Vec<PySentence>,
        lambda_: f64,
        k: usize,
        batch: usize,
        alpha: Option<f64>,
        extend_frame: bool,
    ) -> PyResult<Self> {
        let config = sampler_config(lambda_, k, batch, alpha, extend_frame).map_err(err)?;
        let inner =
            verbsense::SamplingState::new(thesaurus.inner.clone(), seeds.inner.clone(), sentences(&corpus), config)
                .map_err(err)?;
        Ok(PySamplingState { inner })
    }

    /// Indices of the next batch, most useful first.
    fn select_samples(&self) -> PyResult<Vec<usize>> {
        self.inner.select_samples().map_err(err)
    }

    /// Stores every (index, sense id) pair, then refreshes case weights.
    /// Nothing is stored if any pair is rejected.
    fn commit_batch(&mut self, batch: Vec<(usize, String)>) -> PyResult<()> {
        self.inner.commit_batch(&batch).map_err(err)
    }

    fn tuf(&self, x: usize) -> PyResult<f64> {
        self.check(x)?;
        Ok(self.inner.tuf(x))
    }

    fn certainty(&self, x: usize) -> PyResult<f64> {
        self.check(x)?;
        Ok(self.inner.certainty(x))
    }

    fn ranking<'py>(&self, py: Python<'py>, x: usize) -> PyResult<Bound<'py, PyAny>> {
        self.check(x)?;
        from_json(py, &self.inner.ranking(x))
    }

    fn sentence(&self, x: usize) -> PyResult<PySentence> {
        self.check(x)?;
        Ok(PySentence {
            inner: self.inner.sentence(x).clone(),
        })
    }

    fn index_of(&self, id: &str) -> Option<usize> {
        self.inner.index_of(id)
    }

    fn pool(&self) -> Vec<usize> {
        self.inner.pool()
    }

    fn labeled(&self) -> Vec<(usize, String)> {
        self.inner.labeled().to_vec()
    }

    /// A copy of the current database.
    fn database(&self) -> PyDatabase {
        PyDatabase {
            inner: self.inner.database().clone(),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.pool_len()
    }
}

/// Builds a synthetic instance from a JSON generator spec, or the ten-verb
/// benchmark when no spec is given. Returns (thesaurus, seeds, corpus).
#[pyfunction]
#[pyo3(signature = (spec=None, rng_seed=0))]
fn generate_synthetic(spec: Option<&str>, rng_seed: u64) -> PyResult<(PyThesaurus, PyDatabase, Vec<PySentence>)> {
    let spec = match spec {
        Some(text) => {
            let mut spec: GeneratorSpec =
                serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
            spec.rng_seed = rng_seed;
            spec
        }
        None => GeneratorSpec::ten_verb_benchmark(rng_seed),
    };
    let data = synth::generate_synthetic(&spec).map_err(err)?;
    Ok((
        PyThesaurus {
            inner: Arc::new(data.thesaurus),
        },
        PyDatabase { inner: data.seeds },
        data.corpus.into_iter().map(|inner| PySentence { inner }).collect(),
    ))
}

/// Cross-validated strategy comparison. Returns a dict with the summary
/// plus the per-iteration curves as CSV text under "csv".
#[pyfunction]
#[pyo3(signature = (
    corpus, thesaurus, seeds, folds=6, strategies=vec!["random".to_owned(), "utility".to_owned()],
    lambda_=0.5, k=1, batch=1, alpha=None, extend_frame=false, p=1.0, rng_seed=0, eval_stride=1
))]
#[allow(clippy::too_many_arguments)]
fn run_experiment<'py>(
    py: Python<'py>,
    corpus: Vec<PySentence>,
    thesaurus: &PyThesaurus,
    seeds: &PyDatabase,
    folds: usize,
    strategies: Vec<String>,
    lambda_: f64,
    k: usize,
    batch: usize,
    alpha: Option<f64>,
    extend_frame: bool,
    p: f64,
    rng_seed: u64,
    eval_stride: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let config = ExperimentConfig {
        folds,
        strategies: self::strategies(&strategies).map_err(err)?,
        sampler: sampler_config(lambda_, k, batch, alpha, extend_frame).map_err(err)?,
        p,
        rng_seed,
        eval_stride,
        ..ExperimentConfig::default()
    };
    let corpus = sentences(&corpus);
    let report = py
        .detach(|| eval::run_experiment(&corpus, thesaurus.inner.clone(), &seeds.inner, &config))
        .map_err(err)?;
    let summary = from_json(py, &report.summary())?;
    summary.set_item("csv", report.to_csv())?;
    Ok(summary)
}

#[pymodule]
fn pyverbsense(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyThesaurus>()?;
    m.add_class::<PyDatabase>()?;
    m.add_class::<PySentence>()?;
    m.add_class::<PySamplingState>()?;
    m.add_function(wrap_pyfunction!(parse_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(score_senses, m)?)?;
    m.add_function(wrap_pyfunction!(generate_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
