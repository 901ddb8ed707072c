use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use super::translate::{check_collisions, translate_with};
use super::{is_hybrid_model, HybridInterpretation, HybridKb};
use crate::asp::{
    model_from_assignment, predicate_satisfiable, sigma_assignments, verify_open_answer_set, GroundProgram,
    Interpretation, OpenInterpretation, SearchConfig, SearchResult, Solver,
};
use crate::dl::{normalize_concept, normalize_kb, Concept, DlKb, Expr, Role};
use crate::dl_engine::{enumerate_with_plan, tuple_index, tuple_of, ClosurePlan, DlInterpretation};
use crate::error::{Error, Result};
use crate::logic::{grounding_size, Atom, Domain, Elem, PreInterpretation, Program, Rule, Term};

/// What to look for: a predicate (a DL name or a program predicate), a concept
/// expression, or one ground atom over constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Predicate(String),
    Concept(Concept),
    Atom(Atom),
}

enum Goal {
    Dl(Expr),
    Program(String),
    Anything,
}

/// An atom target is answered by deriving a fresh nullary predicate from it.
fn reduce_atom_target(kb: &HybridKb, target: &Target) -> Result<(HybridKb, Option<Target>)> {
    let Target::Atom(a) = target else {
        return Ok((kb.clone(), Some(target.clone())));
    };
    if a.vars().next().is_some() || !a.is_regular() {
        return Err(Error::Invalid(format!(
            "target atom {a} must be regular and variable-free"
        )));
    }
    let preds = kb.program.predicates();
    let mut goal = "goal".to_owned();
    while preds.contains_key(&goal) || kb.dl.is_dl_name(&goal) {
        goal.push('_');
    }
    let mut program = kb.program.clone();
    program.rules.push(Rule::new(
        [crate::logic::Literal::pos(Atom::new(goal.as_str(), vec![]))],
        [crate::logic::Literal::pos(a.clone())],
    ));
    Ok((HybridKb::new(kb.dl.clone(), program)?, Some(Target::Predicate(goal))))
}

fn goal_of(kb: &HybridKb, target: Option<&Target>) -> Goal {
    match target {
        None => Goal::Anything,
        Some(Target::Predicate(p)) => match kb.dl.name_arity(p) {
            Some(1) => Goal::Dl(Expr::Concept(Concept::name(p.clone()))),
            Some(n) => Goal::Dl(Expr::Role(Role::name(p.clone(), n))),
            None => Goal::Program(p.clone()),
        },
        Some(Target::Concept(c)) => Goal::Dl(Expr::Concept(c.clone())),
        Some(Target::Atom(_)) => unreachable!("atom targets are reduced first"),
    }
}

/// DL atoms of a ground program with the name and tuple they test.
fn dl_atoms(gp: &GroundProgram, kb: &DlKb, k: usize) -> Vec<(u32, String, usize)> {
    (0..gp.num_atoms() as u32)
        .filter_map(|id| {
            let a = gp.atom(id);
            let name = gp.pred_name(a.pred);
            kb.is_dl_name(name)
                .then(|| (id, name.to_owned(), tuple_index(&a.args, k)))
        })
        .collect()
}

fn dl_holds(i: &DlInterpretation, name: &str, t: usize) -> bool {
    match i.concepts.get(name) {
        Some(ext) => ext.contains(t),
        None => i.roles[name].1.contains(t),
    }
}

/// Joint search over `k`, `σ`, DL models and answer sets of projections.
/// Answer sets depend on the DL model only through the truth of the ground DL
/// atoms, so they are memoized on that signature per `(k, σ)`. `visit`
/// receives the model and returns whether to stop; with `all` every answer
/// set of each projection is produced, otherwise only the first.
fn joint_search(
    kb: &HybridKb,
    target: Option<&Target>,
    cfg: &SearchConfig,
    all: bool,
    mut visit: impl FnMut(usize, HybridInterpretation) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    let goal = goal_of(kb, target);
    let extra: Vec<Expr> = match &goal {
        Goal::Dl(e) => vec![e.clone()],
        _ => vec![],
    };
    let plan = ClosurePlan::new(&kb.dl, &extra);
    let goal_at = extra.first().map(|e| plan.position(e).expect("goal in closure"));
    let constants: Vec<String> = kb.program.constants().into_iter().collect();
    let shared = kb.shared_constants();
    for k in cfg.sizes() {
        let needed = grounding_size(&kb.program, k);
        if needed > cfg.grounding_cap as u128 {
            return Err(Error::GroundingCap {
                needed,
                cap: cfg.grounding_cap,
            });
        }
        let domain = Domain::anonymous(k);
        for sigma in sigma_assignments(&constants, k, cfg.symmetry) {
            let pinned: BTreeMap<String, Elem> = shared.iter().map(|c| (c.clone(), sigma[c])).collect();
            let pre = PreInterpretation::new(domain.clone(), sigma)?;
            let gp = GroundProgram::ground(&kb.program, &pre)?;
            let atoms = dl_atoms(&gp, &kb.dl, k);
            let filter: Option<Vec<(u32, bool)>> = match &goal {
                Goal::Program(p) => Some(match gp.pred_id(p) {
                    Some(pid) => (0..gp.num_atoms() as u32)
                        .filter(|a| gp.atom(*a).pred == pid)
                        .map(|a| (a, true))
                        .collect(),
                    None => continue,
                }),
                _ => None,
            };
            let mut memo: HashMap<Vec<bool>, Vec<Vec<bool>>> = HashMap::new();
            let mut truth = vec![None; gp.num_atoms()];
            let flow = enumerate_with_plan(&kb.dl, &plan, &domain, &pinned, cfg, |i, ext| {
                if let Some(at) = goal_at {
                    if ext[at].is_clear() {
                        return ControlFlow::Continue(());
                    }
                }
                let key: Vec<bool> = atoms.iter().map(|(_, name, t)| dl_holds(i, name, *t)).collect();
                let sets = memo.entry(key).or_insert_with_key(|key| {
                    for ((id, _, _), v) in atoms.iter().zip(key) {
                        truth[*id as usize] = Some(*v);
                    }
                    let rules = gp.project(&truth);
                    let mut solver = Solver::new(gp.num_atoms(), &rules);
                    if let Some(clause) = &filter {
                        solver.add_filter(clause.clone());
                    }
                    let mut found = Vec::new();
                    solver.for_each(|m| {
                        found.push(m.to_vec());
                        if all {
                            ControlFlow::Continue(())
                        } else {
                            ControlFlow::Break(())
                        }
                    });
                    found
                });
                for m in sets.iter() {
                    let h = HybridInterpretation {
                        pre: pre.clone(),
                        dl: i.clone(),
                        model: model_from_assignment(&gp, m),
                    };
                    debug_assert!(is_hybrid_model(kb, &h).is_ok_and(|r| r.is_model()));
                    visit(k, h)?;
                }
                ControlFlow::Continue(())
            })?;
            if flow.is_break() {
                return Ok(flow);
            }
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Bounded satisfiability on the hybrid semantics itself.
pub fn hybrid_satisfiable_direct(
    kb: &HybridKb,
    target: &Target,
    cfg: &SearchConfig,
) -> Result<SearchResult<HybridInterpretation>> {
    let (kb2, target2) = reduce_atom_target(kb, target)?;
    let mut found = None;
    let _ = joint_search(&kb2, target2.as_ref(), cfg, false, |k, h| {
        found = Some((k, h));
        ControlFlow::Break(())
    })?;
    Ok(match found {
        Some((k, mut witness)) => {
            if matches!(target, Target::Atom(_)) {
                // Drop the auxiliary goal atom.
                witness
                    .model
                    .retain(|a| a.pred.name().is_some_and(|p| kb.program.predicates().contains_key(p)));
            }
            SearchResult::Satisfiable { k, witness }
        }
        None => SearchResult::ExhaustedUpTo(cfg.k_max),
    })
}

/// Every model `(U, I, M)` up to the configured domain size.
pub fn for_each_hybrid_model(
    kb: &HybridKb,
    cfg: &SearchConfig,
    mut visit: impl FnMut(&HybridInterpretation) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    joint_search(kb, None, cfg, true, |_, h| visit(&h))
}

/// `Φ(Σ) ∪ P` and the predicate that stands for the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslatedProblem {
    pub program: Program,
    pub predicate: String,
    /// The KB after role-nominal normalization, whose closure was translated.
    pub dl: DlKb,
    pub extra: Vec<Expr>,
}

impl TranslatedProblem {
    pub fn new(kb: &HybridKb, target: &Target) -> Result<Self> {
        let (kb, target) = reduce_atom_target(kb, target)?;
        let dl = normalize_kb(&kb.dl);
        let (extra, predicate) = match target.expect("reduced target") {
            Target::Predicate(p) => (vec![], p),
            Target::Concept(c) => {
                let e = Expr::Concept(normalize_concept(&c));
                (vec![e.clone()], e.predicate())
            }
            Target::Atom(_) => unreachable!("atom targets are reduced first"),
        };
        check_collisions(&dl, &extra, &kb.program)?;
        let mut program = translate_with(&dl, &extra)?;
        program.extend(kb.program.clone());
        Ok(TranslatedProblem {
            program,
            predicate,
            dl,
            extra,
        })
    }
}

/// Bounded satisfiability through `Φ(Σ) ∪ P`.
pub fn hybrid_satisfiable_translated(
    kb: &HybridKb,
    target: &Target,
    cfg: &SearchConfig,
) -> Result<SearchResult<OpenInterpretation>> {
    if cfg.full_top {
        return Err(Error::Invalid(
            "a full top relation has no counterpart in the translation".into(),
        ));
    }
    let problem = TranslatedProblem::new(kb, target)?;
    predicate_satisfiable(&problem.program, &problem.predicate, cfg)
}

/// From a hybrid model to an open answer set of `Φ(Σ) ∪ P` over the same
/// domain: `M` plus one atom per closure expression and tuple of its extension.
pub fn forward_construction(problem: &TranslatedProblem, h: &HybridInterpretation) -> Result<OpenInterpretation> {
    let plan = ClosurePlan::new(&problem.dl, &problem.extra);
    let ext = plan.evaluate(&h.dl)?;
    let k = h.pre.domain.len();
    let mut model: Interpretation = h.model.clone();
    for (e, set) in plan.exprs.iter().zip(&ext) {
        let pred = e.predicate();
        for t in set.ones() {
            let args = tuple_of(t, e.arity(), k).into_iter().map(Term::Elem).collect();
            model.insert(Atom::new(pred.as_str(), args));
        }
    }
    let mut sigma = h.pre.sigma.clone();
    for (o, e) in &h.dl.nominals {
        if problem.dl.nominals.contains(o) {
            sigma.insert(o.clone(), *e);
        }
    }
    Ok(OpenInterpretation {
        pre: PreInterpretation::new(h.pre.domain.clone(), sigma)?,
        model,
    })
}

/// From an open answer set of `Φ(Σ) ∪ P` back to a hybrid triple: names and
/// `⊤ₙ` read off the atoms, nominals from `σ`, `M` the remaining atoms.
pub fn backward_construction(
    kb: &HybridKb,
    problem: &TranslatedProblem,
    oi: &OpenInterpretation,
) -> Result<HybridInterpretation> {
    let domain = oi.pre.domain.clone();
    let k = domain.len();
    let mut dl = DlInterpretation::empty(&kb.dl, domain.clone());
    for e in crate::dl::closure_with(&problem.dl, &problem.extra) {
        if let Expr::Role(Role::Top(n)) = e {
            dl.tops
                .insert(n, fixedbitset::FixedBitSet::with_capacity(k.pow(n as u32)));
        }
    }
    let introduced: std::collections::BTreeSet<String> = crate::dl::closure_with(&problem.dl, &problem.extra)
        .iter()
        .map(Expr::predicate)
        .collect();
    let mut model = Interpretation::new();
    for a in &oi.model {
        let name = a.pred.name().unwrap_or("");
        let tuple: Vec<Elem> = a
            .args
            .iter()
            .map(|t| match t {
                Term::Elem(e) => *e,
                _ => unreachable!("ground model"),
            })
            .collect();
        if let Some(ext) = dl.concepts.get_mut(name) {
            ext.insert(tuple[0].index());
        } else if let Some((_, ext)) = dl.roles.get_mut(name) {
            ext.insert(tuple_index(&tuple, k));
        } else if let Some(n) = name.strip_prefix("top/").and_then(|n| n.parse::<usize>().ok()) {
            dl.tops
                .get_mut(&n)
                .expect("top in closure")
                .insert(tuple_index(&tuple, k));
        } else if !introduced.contains(name) && kb.program.predicates().contains_key(name) {
            model.insert(a.clone());
        }
    }
    for o in &kb.dl.nominals {
        dl.nominals.insert(o.clone(), oi.pre.map(o)?);
    }
    let cts = kb.program.constants();
    let sigma = oi
        .pre
        .sigma
        .iter()
        .filter(|(c, _)| cts.contains(*c))
        .map(|(c, e)| (c.clone(), *e))
        .collect();
    Ok(HybridInterpretation {
        pre: PreInterpretation::new(domain, sigma)?,
        dl,
        model,
    })
}

/// Verdicts of both routes at one domain size, with the witness checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckRow {
    pub k: usize,
    pub direct: bool,
    pub translated: bool,
    /// The direct witness mapped forward is an open answer set.
    pub forward_ok: Option<bool>,
    /// The translated witness mapped backward is a hybrid model.
    pub backward_ok: Option<bool>,
    pub direct_witness: Option<HybridInterpretation>,
    pub translated_witness: Option<OpenInterpretation>,
}

impl CrossCheckRow {
    pub fn ok(&self) -> bool {
        self.direct == self.translated && self.forward_ok != Some(false) && self.backward_ok != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub rows: Vec<CrossCheckRow>,
}

impl CrossCheckReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(CrossCheckRow::ok)
    }
}

/// Whether `h` witnesses `target`: a nonempty extension or program atom for
/// predicates and concepts, the atom itself (under `σ`) for atom targets.
pub fn target_holds(kb: &HybridKb, target: &Target, h: &HybridInterpretation) -> Result<bool> {
    if let Target::Atom(a) = target {
        let tuple = a
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => h.pre.map(c),
                Term::Elem(e) => Ok(*e),
                Term::Var(v) => Err(Error::Invalid(format!("target atom has variable {v}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let name = a.pred.name().unwrap_or_default();
        return if kb.dl.is_dl_name(name) {
            h.dl.holds(name, &tuple)
        } else {
            Ok(h.model
                .contains(&Atom::new(name, tuple.into_iter().map(Term::Elem).collect())))
        };
    }
    Ok(match goal_of(kb, Some(target)) {
        Goal::Dl(e) => !crate::dl_engine::eval(&e, &h.dl)?.is_clear(),
        Goal::Program(p) => h.model.iter().any(|a| a.pred.name() == Some(p.as_str())),
        Goal::Anything => true,
    })
}

/// Runs both routes at every domain size up to `cfg.k_max` and checks each
/// witness through the model correspondence in the matching direction.
pub fn cross_check(kb: &HybridKb, target: &Target, cfg: &SearchConfig) -> Result<CrossCheckReport> {
    if cfg.full_top {
        return Err(Error::Invalid(
            "cross-checking requires the free reading of top relations".into(),
        ));
    }
    let (kb, target) = reduce_atom_target(kb, target)?;
    let target = target.expect("reduced target");
    let problem = TranslatedProblem::new(&kb, &target)?;
    let mut rows = Vec::new();
    for k in cfg.sizes() {
        let at_k = SearchConfig {
            k_min: k,
            k_max: k,
            ..cfg.clone()
        };
        let direct = hybrid_satisfiable_direct(&kb, &target, &at_k)?;
        let translated = predicate_satisfiable(&problem.program, &problem.predicate, &at_k)?;
        let forward_ok = match direct.witness() {
            Some(h) => {
                let oi = forward_construction(&problem, h)?;
                Some(verify_open_answer_set(&problem.program, &oi)? && target_holds(&kb, &target, h)?)
            }
            None => None,
        };
        let backward_ok = match translated.witness() {
            Some(oi) => {
                let h = backward_construction(&kb, &problem, oi)?;
                Some(is_hybrid_model(&kb, &h)?.is_model() && target_holds(&kb, &target, &h)?)
            }
            None => None,
        };
        rows.push(CrossCheckRow {
            k,
            direct: direct.is_satisfiable(),
            translated: translated.is_satisfiable(),
            forward_ok,
            backward_ok,
            direct_witness: direct.witness().cloned(),
            translated_witness: translated.witness().cloned(),
        });
    }
    Ok(CrossCheckReport { rows })
}
