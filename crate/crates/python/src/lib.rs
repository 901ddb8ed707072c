//! Python bindings: `ghybrid.KnowledgeBase` and `ghybrid.Model`.

use std::ops::ControlFlow;

use ghybrid::asp::{SearchConfig, SearchResult};
use ghybrid::dl::normalize_kb;
use ghybrid::hybrid::{
    backward_construction, cross_check, for_each_hybrid_model, hybrid_satisfiable_direct,
    hybrid_satisfiable_translated, is_hybrid_model, random_kb, translate, HybridInterpretation, HybridKb,
    RandomKbParams, Target, TranslatedProblem,
};
use ghybrid::logic::{GuardReport, WithDomain};
use ghybrid::syntax::{parse_concept, parse_hybrid, parse_model, parse_rule};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(ghybrid, GhybridError, PyException);
create_exception!(ghybrid, CapExceeded, GhybridError);

fn err(e: ghybrid::Error) -> PyErr {
    use ghybrid::Error::*;
    match e {
        GroundingCap { .. } | BaseCap { .. } | ExtensionCap { .. } => CapExceeded::new_err(e.to_string()),
        _ => GhybridError::new_err(e.to_string()),
    }
}

fn config(k: usize, k_min: usize, grounding_cap: u64, full_top: bool) -> PyResult<SearchConfig> {
    if k_min == 0 || k_min > k {
        return Err(PyValueError::new_err(format!(
            "need 1 <= k_min <= k, got k_min={k_min}, k={k}"
        )));
    }
    Ok(SearchConfig {
        k_min,
        k_max: k,
        grounding_cap,
        full_top,
        ..SearchConfig::default()
    })
}

/// A candidate or found model `(U, I, M)`; `str()` gives the model file.
#[pyclass(frozen, module = "ghybrid")]
struct Model {
    inner: HybridInterpretation,
}

#[pymethods]
impl Model {
    #[getter]
    fn k(&self) -> usize {
        self.inner.pre.domain.len()
    }

    #[getter]
    fn domain(&self) -> Vec<String> {
        self.inner.pre.domain.names().to_vec()
    }

    /// Atoms of the answer set `M`, with domain element names.
    #[getter]
    fn atoms(&self) -> Vec<String> {
        let d = &self.inner.pre.domain;
        self.inner
            .model
            .iter()
            .map(|a| WithDomain::new(a, d).to_string())
            .collect()
    }

    /// Non-empty DL extensions as `name(e1,...)` strings.
    #[getter]
    fn extensions(&self) -> Vec<String> {
        let file = self.inner.to_model_file();
        file.extensions
            .iter()
            .map(|(p, args)| {
                if args.is_empty() {
                    p.clone()
                } else {
                    format!("{p}({})", args.join(","))
                }
            })
            .collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_model_file().to_string()
    }

    fn __repr__(&self) -> String {
        format!("<Model k={} atoms={}>", self.k(), self.inner.model.len())
    }
}

/// A hybrid KB: optional `%% DL` section, then the program (`%% LP`).
#[pyclass(frozen, module = "ghybrid")]
struct KnowledgeBase {
    inner: HybridKb,
}

impl KnowledgeBase {
    fn target(&self, pred: Option<String>, concept: Option<&str>, atom: Option<&str>) -> PyResult<Option<Target>> {
        match (pred, concept, atom) {
            (None, None, None) => Ok(None),
            (Some(p), None, None) => Ok(Some(Target::Predicate(p))),
            (None, Some(c), None) => Ok(Some(Target::Concept(
                parse_concept(c, &self.inner.dl).map_err(|e| err(e.into()))?,
            ))),
            (None, None, Some(a)) => {
                let rule = parse_rule(&format!("{}.", a.trim_end_matches('.'))).map_err(|e| err(e.into()))?;
                match rule.head() {
                    [l] if !l.negated && rule.body().is_empty() => Ok(Some(Target::Atom(l.atom.clone()))),
                    _ => Err(PyValueError::new_err(format!("expected a single atom, got `{a}`"))),
                }
            }
            _ => Err(PyValueError::new_err("give at most one of pred, concept, atom")),
        }
    }
}

#[pymethods]
impl KnowledgeBase {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let (dl, program) = parse_hybrid(text).map_err(|e| err(e.into()))?;
        Ok(KnowledgeBase {
            inner: HybridKb::new(dl, program).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        Self::new(&std::fs::read_to_string(path)?)
    }

    /// A reproducible random KB, as used by the cross-check.
    #[staticmethod]
    fn random(seed: u64) -> Self {
        KnowledgeBase {
            inner: random_kb(seed, &RandomKbParams::default()),
        }
    }

    #[getter]
    fn num_axioms(&self) -> usize {
        self.inner.dl.axioms.len()
    }

    #[getter]
    fn num_rules(&self) -> usize {
        self.inner.program.len()
    }

    /// `{"clean": bool, "violations": [...], "unguarded": [rule text, ...]}`.
    fn check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.inner.check();
        let d = PyDict::new(py);
        d.set_item("clean", r.is_clean())?;
        let violations: Vec<String> = r
            .program
            .iter()
            .map(|v| v.to_string())
            .chain(r.dl.iter().map(|v| v.to_string()))
            .collect();
        d.set_item("violations", violations)?;
        let unguarded: Vec<String> = r
            .guards
            .offending
            .iter()
            .filter(|(_, g)| matches!(g, GuardReport::Unguarded(_)))
            .map(|(i, _)| self.inner.program.rules[*i].to_string())
            .collect();
        d.set_item("unguarded", unguarded)?;
        Ok(d)
    }

    /// The DL part translated to a program.
    fn translate(&self) -> PyResult<String> {
        Ok(translate(&normalize_kb(&self.inner.dl)).map_err(err)?.to_string())
    }

    /// First model satisfying the target within `k`, or `None` when the
    /// bounded search is exhausted.
    #[pyo3(signature = (pred=None, concept=None, atom=None, k=3, k_min=1, route="direct", grounding_cap=1_000_000, full_top=false))]
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        py: Python<'_>,
        pred: Option<String>,
        concept: Option<&str>,
        atom: Option<&str>,
        k: usize,
        k_min: usize,
        route: &str,
        grounding_cap: u64,
        full_top: bool,
    ) -> PyResult<Option<Model>> {
        let cfg = config(k, k_min, grounding_cap, full_top)?;
        let target = self.target(pred, concept, atom)?;
        let kb = &self.inner;
        let found = py.detach(|| -> ghybrid::Result<Option<HybridInterpretation>> {
            match (target, route) {
                (None, "direct") => {
                    let mut first = None;
                    let _ = for_each_hybrid_model(kb, &cfg, |h| {
                        first = Some(h.clone());
                        ControlFlow::Break(())
                    })?;
                    Ok(first)
                }
                (Some(t), "direct") => Ok(hybrid_satisfiable_direct(kb, &t, &cfg)?.witness().cloned()),
                (Some(t), "translated") => {
                    let problem = TranslatedProblem::new(kb, &t)?;
                    match hybrid_satisfiable_translated(kb, &t, &cfg)? {
                        SearchResult::Satisfiable { witness, .. } => {
                            let mut h = backward_construction(kb, &problem, &witness)?;
                            h.model
                                .retain(|a| a.pred.name().is_some_and(|p| kb.program.predicates().contains_key(p)));
                            Ok(Some(h))
                        }
                        SearchResult::ExhaustedUpTo(_) => Ok(None),
                    }
                }
                (None, "translated") => Err(ghybrid::Error::Invalid("the translated route needs a target".into())),
                (_, other) => Err(ghybrid::Error::Invalid(format!("unknown route `{other}`"))),
            }
        });
        Ok(found.map_err(err)?.map(|inner| Model { inner }))
    }

    /// Every model up to `k`, at most `limit` of them.
    #[pyo3(signature = (k=3, limit=None, grounding_cap=1_000_000))]
    fn models(&self, py: Python<'_>, k: usize, limit: Option<usize>, grounding_cap: u64) -> PyResult<Vec<Model>> {
        let cfg = config(k, 1, grounding_cap, false)?;
        let mut out = Vec::new();
        let _ = py
            .detach(|| {
                for_each_hybrid_model(&self.inner, &cfg, |h| {
                    if limit.is_some_and(|l| out.len() >= l) {
                        return ControlFlow::Break(());
                    }
                    out.push(Model { inner: h.clone() });
                    ControlFlow::Continue(())
                })
            })
            .map_err(err)?;
        Ok(out)
    }

    /// Checks a model, given as a `Model` or as model-file text.
    fn verify(&self, model: &Bound<'_, PyAny>) -> PyResult<bool> {
        let h = if let Ok(m) = model.cast::<Model>() {
            m.get().inner.clone()
        } else {
            let text: String = model.extract()?;
            let file = parse_model(&text).map_err(|e| err(e.into()))?;
            HybridInterpretation::from_model_file(&self.inner, &file).map_err(err)?
        };
        Ok(is_hybrid_model(&self.inner, &h).map_err(err)?.is_model())
    }

    /// Whether the direct and translated routes agree at every `k`.
    #[pyo3(signature = (pred=None, concept=None, atom=None, k=2))]
    fn crosscheck(
        &self,
        py: Python<'_>,
        pred: Option<String>,
        concept: Option<&str>,
        atom: Option<&str>,
        k: usize,
    ) -> PyResult<bool> {
        let target = self
            .target(pred, concept, atom)?
            .ok_or_else(|| PyValueError::new_err("crosscheck needs pred, concept or atom"))?;
        let cfg = config(k, 1, 1_000_000, false)?;
        let report = py.detach(|| cross_check(&self.inner, &target, &cfg)).map_err(err)?;
        Ok(report.ok())
    }

    fn __repr__(&self) -> String {
        format!(
            "<KnowledgeBase axioms={} rules={}>",
            self.num_axioms(),
            self.num_rules()
        )
    }
}

#[pymodule]
#[pyo3(name = "ghybrid")]
fn ghybrid_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<KnowledgeBase>()?;
    m.add_class::<Model>()?;
    m.add("GhybridError", m.py().get_type::<GhybridError>())?;
    m.add("CapExceeded", m.py().get_type::<CapExceeded>())?;
    Ok(())
}
