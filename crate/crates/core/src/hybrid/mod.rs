//! Hybrid knowledge bases `(Σ, P)`: a DL knowledge base and a guarded program
//! sharing predicate names and constants. Models are triples `(U, I, M)` where
//! `M` is an answer set of the projection of `P` grounded over `U` by the DL
//! interpretation `I`.

mod random;
mod solve;
mod translate;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

pub use random::{random_kb, random_target, RandomKbParams};
pub use solve::{
    backward_construction, cross_check, for_each_hybrid_model, forward_construction, hybrid_satisfiable_direct,
    hybrid_satisfiable_translated, target_holds, CrossCheckReport, CrossCheckRow, Target, TranslatedProblem,
};
pub use translate::{check_collisions, translate, translate_with, translation_size, TranslationSize};

use crate::asp::{diagnose, Diagnosis, Interpretation, OpenInterpretation};
use crate::dl::{validate_kb, DlKb, DlViolation};
use crate::dl_engine::{check_model, tuple_index, DlInterpretation};
use crate::error::{Error, Result};
use crate::logic::{
    ground, is_guarded_program, validate_program, Atom, Domain, Elem, GuardedProgram, PreInterpretation, Program, Rule,
    Term, Violation,
};
use crate::syntax::ModelFile;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridKb {
    pub dl: DlKb,
    pub program: Program,
}

/// Static diagnostics of a hybrid KB.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KbReport {
    pub program: Vec<Violation>,
    pub dl: Vec<DlViolation>,
    pub guards: GuardedProgram,
}

impl KbReport {
    pub fn is_clean(&self) -> bool {
        self.program.is_empty() && self.dl.is_empty() && self.guards.guarded
    }
}

impl HybridKb {
    /// Pairs a KB with a program; names shared by both must agree on arity.
    pub fn new(dl: DlKb, program: Program) -> Result<Self> {
        for (p, n) in program.predicates() {
            if let Some(expected) = dl.name_arity(&p) {
                if expected != n {
                    return Err(Error::Arity {
                        name: p,
                        expected,
                        found: n,
                    });
                }
            }
        }
        for r in &program.rules {
            for a in r.atoms() {
                if let Some(expected) = a.pred.name().and_then(|p| dl.name_arity(p)) {
                    if expected != a.args.len() {
                        return Err(Error::Arity {
                            name: a.pred.name().unwrap().to_owned(),
                            expected,
                            found: a.args.len(),
                        });
                    }
                }
            }
        }
        Ok(HybridKb { dl, program })
    }

    pub fn check(&self) -> KbReport {
        KbReport {
            program: validate_program(&self.program),
            dl: validate_kb(&self.dl),
            guards: is_guarded_program(&self.program),
        }
    }

    /// Constants occurring both as nominals of `Σ` and in `P`.
    pub fn shared_constants(&self) -> Vec<String> {
        self.program
            .constants()
            .into_iter()
            .filter(|c| self.dl.nominals.contains(c))
            .collect()
    }
}

/// A triple `(U, I, M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridInterpretation {
    pub pre: PreInterpretation,
    pub dl: DlInterpretation,
    pub model: Interpretation,
}

fn element(domain: &Domain, name: &str) -> Result<Elem> {
    domain
        .lookup(name)
        .ok_or_else(|| Error::Structure(format!("`{name}` is not a domain element")))
}

impl HybridInterpretation {
    /// Resolves a model file against a KB. `⊤ₙ` defaults to the full `n`-th
    /// power of the domain unless the file lists `"top/n"` items; a bare
    /// `"top/n"` item declares it explicitly (and empty unless listed).
    pub fn from_model_file(kb: &HybridKb, file: &ModelFile) -> Result<Self> {
        let domain = Domain::named(file.domain.clone())?;
        let k = domain.len();
        let sigma = file
            .sigma
            .iter()
            .map(|(c, e)| Ok((c.clone(), element(&domain, e)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let mut dl = DlInterpretation::empty(&kb.dl, domain.clone());
        for (pred, args) in &file.extensions {
            let tuple = args.iter().map(|a| element(&domain, a)).collect::<Result<Vec<_>>>()?;
            if let Some(n) = pred.strip_prefix("top/").and_then(|n| n.parse::<usize>().ok()) {
                let top = dl
                    .tops
                    .entry(n)
                    .or_insert_with(|| FixedBitSet::with_capacity(k.pow(n as u32)));
                if !tuple.is_empty() {
                    if tuple.len() != n {
                        return Err(Error::Arity {
                            name: pred.clone(),
                            expected: n,
                            found: tuple.len(),
                        });
                    }
                    top.insert(tuple_index(&tuple, k));
                }
            } else if let Some(ext) = dl.concepts.get_mut(pred) {
                if tuple.len() != 1 {
                    return Err(Error::Arity {
                        name: pred.clone(),
                        expected: 1,
                        found: tuple.len(),
                    });
                }
                ext.insert(tuple[0].index());
            } else if let Some((n, ext)) = dl.roles.get_mut(pred) {
                if tuple.len() != *n {
                    return Err(Error::Arity {
                        name: pred.clone(),
                        expected: *n,
                        found: tuple.len(),
                    });
                }
                ext.insert(tuple_index(&tuple, k));
            } else {
                return Err(Error::UndeclaredName(pred.clone()));
            }
        }
        for (o, e) in &file.nominals {
            dl.nominals.insert(o.clone(), element(&domain, e)?);
        }
        for o in &kb.dl.nominals {
            if let Some(e) = sigma.get(o) {
                if dl.nominals.get(o).is_some_and(|x| x != e) {
                    return Err(Error::Structure(format!(
                        "nominal `{o}` and its constant denote different elements"
                    )));
                }
                dl.nominals.insert(o.clone(), *e);
            }
            if !dl.nominals.contains_key(o) {
                return Err(Error::Structure(format!("nominal `{o}` has no denotation")));
            }
        }
        let model = file
            .atoms
            .iter()
            .map(|(p, args)| {
                let terms = args
                    .iter()
                    .map(|a| element(&domain, a).map(Term::Elem))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Atom::new(p.as_str(), terms))
            })
            .collect::<Result<Interpretation>>()?;
        Ok(HybridInterpretation {
            pre: PreInterpretation::new(domain, sigma)?,
            dl,
            model,
        })
    }

    pub fn to_model_file(&self) -> ModelFile {
        let domain = &self.pre.domain;
        let k = domain.len();
        let name = |e: &Elem| domain.name(*e).to_owned();
        let names = |t: usize, n: usize| crate::dl_engine::tuple_of(t, n, k).iter().map(name).collect::<Vec<_>>();
        let mut extensions = Vec::new();
        for (c, ext) in &self.dl.concepts {
            extensions.extend(ext.ones().map(|e| (c.clone(), vec![name(&Elem(e as u32))])));
        }
        for (r, (n, ext)) in &self.dl.roles {
            extensions.extend(ext.ones().map(|t| (r.clone(), names(t, *n))));
        }
        for (n, top) in &self.dl.tops {
            if top.is_full() {
                continue;
            }
            let pred = format!("top/{n}");
            if top.is_clear() {
                extensions.push((pred.clone(), vec![]));
            }
            extensions.extend(top.ones().map(|t| (pred.clone(), names(t, *n))));
        }
        let nominals = self
            .dl
            .nominals
            .iter()
            .filter(|(o, _)| !self.pre.sigma.contains_key(*o))
            .map(|(o, e)| (o.clone(), name(e)))
            .collect();
        ModelFile {
            nominals,
            extensions,
            ..OpenInterpretation {
                pre: self.pre.clone(),
                model: self.model.clone(),
            }
            .to_model_file()
        }
    }
}

/// Why a rule is absent from a projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Deletion {
    /// A head DL literal is already true in `I`.
    HeadSatisfied,
    /// A body DL literal is false in `I`.
    BodyFalsified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub program: Program,
    /// Deleted rules of the input, by index.
    pub deleted: Vec<(usize, Deletion)>,
}

fn dl_truth(kb: &DlKb, i: &DlInterpretation, a: &Atom) -> Result<Option<bool>> {
    let Some(p) = a.pred.name().filter(|p| kb.is_dl_name(p)) else {
        return Ok(None);
    };
    let tuple = a
        .args
        .iter()
        .map(|t| match t {
            Term::Elem(e) => Ok(*e),
            other => Err(Error::Invalid(format!("non-ground term `{other}` in projection"))),
        })
        .collect::<Result<Vec<_>>>()?;
    i.holds(p, &tuple).map(Some)
}

/// `Π(P, I)` of a ground program, with the deleted rules.
pub fn project_traced(ground: &Program, i: &DlInterpretation, kb: &DlKb) -> Result<Projection> {
    let mut rules = Vec::new();
    let mut deleted = Vec::new();
    'rules: for (n, r) in ground.rules.iter().enumerate() {
        for l in r.head() {
            if dl_truth(kb, i, &l.atom)? == Some(!l.negated) {
                deleted.push((n, Deletion::HeadSatisfied));
                continue 'rules;
            }
        }
        for l in r.body() {
            if dl_truth(kb, i, &l.atom)? == Some(l.negated) {
                deleted.push((n, Deletion::BodyFalsified));
                continue 'rules;
            }
        }
        let keep = |l: &&crate::logic::Literal| !l.atom.pred.name().is_some_and(|p| kb.is_dl_name(p));
        rules.push(Rule::new(
            r.head().iter().filter(keep).cloned(),
            r.body().iter().filter(keep).cloned(),
        ));
    }
    Ok(Projection {
        program: Program::new(rules),
        deleted,
    })
}

pub fn project(ground: &Program, i: &DlInterpretation, kb: &DlKb) -> Result<Program> {
    Ok(project_traced(ground, i, kb)?.program)
}

/// Outcome of checking a candidate `(U, I, M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelReport {
    pub violated_axioms: Vec<usize>,
    pub projection: Projection,
    pub diagnosis: Diagnosis,
}

impl ModelReport {
    pub fn is_model(&self) -> bool {
        self.violated_axioms.is_empty() && self.diagnosis.is_answer_set()
    }
}

/// `I` is a model of `Σ` and `M` an answer set of `Π(P_U, I)`. Structural
/// problems with the triple are errors, not a negative verdict.
pub fn is_hybrid_model(kb: &HybridKb, h: &HybridInterpretation) -> Result<ModelReport> {
    h.dl.check_structure()?;
    if h.dl.domain != h.pre.domain {
        return Err(Error::Structure(
            "program and DL interpretation have different domains".into(),
        ));
    }
    for c in kb.shared_constants() {
        let (s, o) = (h.pre.map(&c)?, h.dl.nominals.get(&c));
        if o != Some(&s) {
            return Err(Error::Structure(format!(
                "constant `{c}` and nominal `{c}` denote different elements"
            )));
        }
    }
    if let Some(a) = h
        .model
        .iter()
        .find(|a| a.pred.name().is_some_and(|p| kb.dl.is_dl_name(p)))
    {
        return Err(Error::Structure(format!("answer set mentions DL atom {a}")));
    }
    let violated_axioms = check_model(&kb.dl, &h.dl)?;
    let grounded = ground(&kb.program, &h.pre)?;
    let projection = project_traced(&grounded, &h.dl, &kb.dl)?;
    let diagnosis = diagnose(&projection.program, &h.model);
    Ok(ModelReport {
        violated_axioms,
        projection,
        diagnosis,
    })
}
