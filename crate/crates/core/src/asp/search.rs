use std::collections::BTreeMap;
use std::ops::ControlFlow;

use super::compiled::{GroundProgram, Solver};
use super::Interpretation;
use crate::error::{Error, Result};
use crate::logic::{grounding_size, Atom, Domain, Elem, PreInterpretation, Program, Rule, Term};
use crate::syntax::ModelFile;

/// Limits and switches for bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub k_min: usize,
    pub k_max: usize,
    /// Maximum number of ground rule instances per pre-interpretation.
    pub grounding_cap: u64,
    /// Base size limit of exhaustive subset enumeration.
    pub base_cap: usize,
    /// Maximum number of candidate DL interpretations per domain.
    pub extension_cap: u64,
    /// Pin `⊤ₙ` to the full `n`-th power of the domain.
    pub full_top: bool,
    /// Enumerate constant maps only up to renaming of anonymous elements.
    pub symmetry: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            k_min: 1,
            k_max: 3,
            grounding_cap: 1_000_000,
            base_cap: 22,
            extension_cap: 100_000_000,
            full_top: false,
            symmetry: false,
        }
    }
}

impl SearchConfig {
    pub fn up_to(k_max: usize) -> Self {
        SearchConfig {
            k_max,
            ..Self::default()
        }
    }

    pub fn sizes(&self) -> std::ops::RangeInclusive<usize> {
        self.k_min.max(1)..=self.k_max
    }
}

/// Outcome of a bounded search. Exhaustion says nothing about larger domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchResult<W> {
    Satisfiable { k: usize, witness: W },
    ExhaustedUpTo(usize),
}

impl<W> SearchResult<W> {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, SearchResult::Satisfiable { .. })
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            SearchResult::Satisfiable { witness, .. } => Some(witness),
            SearchResult::ExhaustedUpTo(_) => None,
        }
    }

    /// Domain size of the witness, if any.
    pub fn k(&self) -> Option<usize> {
        match self {
            SearchResult::Satisfiable { k, .. } => Some(*k),
            SearchResult::ExhaustedUpTo(_) => None,
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> SearchResult<V> {
        match self {
            SearchResult::Satisfiable { k, witness } => SearchResult::Satisfiable { k, witness: f(witness) },
            SearchResult::ExhaustedUpTo(k) => SearchResult::ExhaustedUpTo(k),
        }
    }
}

/// An open answer set `(U, M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenInterpretation {
    pub pre: PreInterpretation,
    pub model: Interpretation,
}

impl OpenInterpretation {
    pub fn to_model_file(&self) -> ModelFile {
        let domain = &self.pre.domain;
        let name = |e: &Elem| domain.name(*e).to_owned();
        let atoms = self
            .model
            .iter()
            .map(|a| {
                let args = a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Elem(e) => name(e),
                        other => other.to_string(),
                    })
                    .collect();
                (a.pred.name().unwrap_or("=").to_owned(), args)
            })
            .collect();
        ModelFile {
            domain: domain.names().to_vec(),
            sigma: self.pre.sigma.iter().map(|(c, e)| (c.clone(), name(e))).collect(),
            atoms,
            ..ModelFile::default()
        }
    }
}

/// All maps from `constants` into `k` elements, lexicographic with the first
/// constant most significant. With `symmetry`, only maps whose values appear
/// in first-use order (restricted growth strings) are produced; every other
/// map is a permutation of the anonymous domain away from one of them.
pub fn sigma_assignments(constants: &[String], k: usize, symmetry: bool) -> Vec<BTreeMap<String, Elem>> {
    let mut out = Vec::new();
    let mut digits = vec![0u32; constants.len()];
    loop {
        let canonical = !symmetry || {
            let mut next = 0;
            digits.iter().all(|&d| {
                if d > next {
                    false
                } else {
                    if d == next {
                        next += 1;
                    }
                    true
                }
            })
        };
        if canonical {
            out.push(constants.iter().cloned().zip(digits.iter().map(|d| Elem(*d))).collect());
        }
        if !crate::logic::ground_advance(&mut digits, k as u32) {
            break;
        }
    }
    out
}

fn check_grounding(program: &Program, k: usize, cfg: &SearchConfig) -> Result<()> {
    let needed = grounding_size(program, k);
    if needed > cfg.grounding_cap as u128 {
        return Err(Error::GroundingCap {
            needed,
            cap: cfg.grounding_cap,
        });
    }
    Ok(())
}

pub(crate) fn model_from_assignment(gp: &GroundProgram, assignment: &[bool]) -> Interpretation {
    assignment
        .iter()
        .enumerate()
        .filter(|(_, v)| **v)
        .map(|(i, _)| gp.to_atom(i as u32))
        .collect()
}

/// Calls `visit` with every open answer set of `program` over domains of the
/// configured sizes, in the order: size, constant map, answer set.
pub fn for_each_open_answer_set(
    program: &Program,
    cfg: &SearchConfig,
    mut visit: impl FnMut(&OpenInterpretation) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    search(program, cfg, None, |_, oi| visit(oi))
}

/// Core loop shared by the public searches. `filter` restricts answer sets to
/// those containing some atom of the named predicate.
fn search(
    program: &Program,
    cfg: &SearchConfig,
    filter: Option<&str>,
    mut visit: impl FnMut(usize, &OpenInterpretation) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    let constants: Vec<String> = program.constants().into_iter().collect();
    for k in cfg.sizes() {
        check_grounding(program, k, cfg)?;
        for sigma in sigma_assignments(&constants, k, cfg.symmetry) {
            let pre = PreInterpretation::new(Domain::anonymous(k), sigma)?;
            let gp = GroundProgram::ground(program, &pre)?;
            let mut solver = Solver::new(gp.num_atoms(), &gp.rules);
            if let Some(p) = filter {
                let Some(pid) = gp.pred_id(p) else { continue };
                let clause: Vec<(u32, bool)> = (0..gp.num_atoms() as u32)
                    .filter(|a| gp.atom(*a).pred == pid)
                    .map(|a| (a, true))
                    .collect();
                solver.add_filter(clause);
            }
            let mut flow = ControlFlow::Continue(());
            solver.for_each(|assignment| {
                let oi = OpenInterpretation {
                    pre: pre.clone(),
                    model: model_from_assignment(&gp, assignment),
                };
                debug_assert!(verify_open_answer_set(program, &oi).unwrap_or(false));
                flow = visit(k, &oi);
                flow
            });
            if flow.is_break() {
                return Ok(flow);
            }
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Re-checks an open answer set against the literal definitions.
pub fn verify_open_answer_set(program: &Program, oi: &OpenInterpretation) -> Result<bool> {
    let g = crate::logic::ground(program, &oi.pre)?;
    Ok(super::is_answer_set(&g, &oi.model))
}

pub fn open_answer_sets(program: &Program, cfg: &SearchConfig) -> Result<Vec<OpenInterpretation>> {
    let mut out = Vec::new();
    let _ = for_each_open_answer_set(program, cfg, |oi| {
        out.push(oi.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Smallest-domain open answer set containing a `pred` atom.
pub fn predicate_satisfiable(
    program: &Program,
    pred: &str,
    cfg: &SearchConfig,
) -> Result<SearchResult<OpenInterpretation>> {
    first(program, cfg, Some(pred))
}

fn first(program: &Program, cfg: &SearchConfig, filter: Option<&str>) -> Result<SearchResult<OpenInterpretation>> {
    let mut found = None;
    let _ = search(program, cfg, filter, |k, oi| {
        found = Some((k, oi.clone()));
        ControlFlow::Break(())
    })?;
    Ok(match found {
        Some((k, witness)) => SearchResult::Satisfiable { k, witness },
        None => SearchResult::ExhaustedUpTo(cfg.k_max),
    })
}

/// Both ways of deciding program satisfiability: through a fresh free
/// predicate and by looking for any open answer set at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramVerdict {
    pub fresh_predicate: String,
    pub via_predicate: SearchResult<OpenInterpretation>,
    pub direct: SearchResult<OpenInterpretation>,
}

impl ProgramVerdict {
    pub fn agree(&self) -> bool {
        self.via_predicate.k() == self.direct.k()
    }
}

/// `P` is satisfiable iff the fresh `p` is satisfiable in `P ∪ {p(X) ∨ not p(X) ←}`.
pub fn program_satisfiable(program: &Program, cfg: &SearchConfig) -> Result<ProgramVerdict> {
    let preds = program.predicates();
    let mut fresh = "sat".to_owned();
    while preds.contains_key(&fresh) {
        fresh.push('_');
    }
    let mut extended = program.clone();
    extended
        .rules
        .push(Rule::free(Atom::new(fresh.as_str(), vec![Term::var("X")])));
    let via_predicate = predicate_satisfiable(&extended, &fresh, cfg)?;
    let direct = first(program, cfg, None)?;
    let verdict = ProgramVerdict {
        fresh_predicate: fresh,
        via_predicate,
        direct,
    };
    if !verdict.agree() {
        return Err(Error::Invalid(format!(
            "satisfiability routes disagree: fresh predicate {:?}, direct {:?}",
            verdict.via_predicate.k(),
            verdict.direct.k()
        )));
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn p(src: &str) -> Program {
        parse_program(src).unwrap()
    }

    #[test]
    fn sigma_is_lexicographic_and_non_injective() {
        let cs = vec!["a".to_owned(), "b".to_owned()];
        let all = sigma_assignments(&cs, 2, false);
        let pairs: Vec<(u32, u32)> = all.iter().map(|s| (s["a"].0, s["b"].0)).collect();
        assert_eq!(pairs, [(0, 0), (0, 1), (1, 0), (1, 1)]);
        let rg: Vec<(u32, u32)> = sigma_assignments(&cs, 2, true)
            .iter()
            .map(|s| (s["a"].0, s["b"].0))
            .collect();
        assert_eq!(rg, [(0, 0), (0, 1)]);
        assert_eq!(sigma_assignments(&[], 3, false).len(), 1);
    }

    #[test]
    fn forced_fact() {
        let sets = open_answer_sets(&p("q(a)."), &SearchConfig::up_to(1)).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].pre.sigma["a"], Elem(0));
        assert_eq!(sets[0].model, [Atom::new("q", vec![Term::Elem(Elem(0))])].into());
    }

    #[test]
    fn constraint_forcing_a_free_atom() {
        let sets = open_answer_sets(&p("{ p(X) }. :- not p(X)."), &SearchConfig::up_to(1)).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].model.len(), 1);
    }

    #[test]
    fn equality_constraint_kills_every_domain() {
        let sets = open_answer_sets(&p("p(a). :- p(X), p(Y), X = Y."), &SearchConfig::up_to(3)).unwrap();
        assert!(sets.is_empty());
    }

    #[test]
    fn self_support_is_not_satisfiable() {
        let r = predicate_satisfiable(&p("q(X) :- q(X)."), "q", &SearchConfig::up_to(2)).unwrap();
        assert_eq!(r, SearchResult::ExhaustedUpTo(2));
        let r = predicate_satisfiable(&p("q(a)."), "q", &SearchConfig::up_to(2)).unwrap();
        assert_eq!(r.k(), Some(1));
    }

    #[test]
    fn program_satisfiability_routes() {
        let cfg = SearchConfig::up_to(2);
        let v = program_satisfiable(&Program::default(), &cfg).unwrap();
        assert_eq!(v.direct.k(), Some(1));
        assert!(v.direct.witness().unwrap().model.is_empty());
        let v = program_satisfiable(&p(":- X = X."), &cfg).unwrap();
        assert_eq!(v.via_predicate, SearchResult::ExhaustedUpTo(2));
        let v = program_satisfiable(&p("a | not a."), &cfg).unwrap();
        assert!(v.via_predicate.is_satisfiable());
        let v = program_satisfiable(&p("sat(a). :- sat(X), not b."), &cfg).unwrap();
        assert_eq!(v.fresh_predicate, "sat_");
        assert!(!v.direct.is_satisfiable());
    }

    #[test]
    fn symmetry_pruning_keeps_verdicts() {
        for src in [
            "q(a). r(b). :- q(X), r(X).",
            "p(a). p(b). :- p(X), p(Y), X != Y.",
            "{ q(X) }. :- q(a), not q(b).",
        ] {
            for k in 1..=3 {
                let cfg = SearchConfig {
                    k_min: k,
                    ..SearchConfig::up_to(k)
                };
                let sym = SearchConfig {
                    symmetry: true,
                    ..cfg.clone()
                };
                let a = program_satisfiable(&p(src), &cfg).unwrap();
                let b = program_satisfiable(&p(src), &sym).unwrap();
                assert_eq!(a.direct.k(), b.direct.k(), "{src} at {k}");
            }
        }
    }

    #[test]
    fn grounding_cap_is_reported() {
        let cfg = SearchConfig {
            grounding_cap: 10,
            ..SearchConfig::up_to(4)
        };
        let r = open_answer_sets(&p("{ e(X,Y) }."), &cfg);
        assert!(matches!(r, Err(Error::GroundingCap { needed: 16, cap: 10 })));
    }
}
