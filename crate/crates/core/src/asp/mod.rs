//! Answer sets of ground programs and bounded search for open answer sets.
//!
//! The functions in this module work on the literal syntax of ground programs
//! and follow the definitions directly: satisfaction, the reduct, the least
//! fixpoint of the immediate-consequence operator, and the answer-set test.
//! The search itself runs on the indexed form in [`GroundProgram`].

mod compiled;
mod search;

use std::collections::BTreeSet;

pub use compiled::{GRule, GroundAtom, GroundProgram, Solver};
pub(crate) use search::model_from_assignment;
pub use search::{
    for_each_open_answer_set, open_answer_sets, predicate_satisfiable, program_satisfiable, sigma_assignments,
    verify_open_answer_set, OpenInterpretation, ProgramVerdict, SearchConfig, SearchResult,
};

use crate::error::{Error, Result};
use crate::logic::{Atom, Literal, Predicate, Program, Rule};

/// A set of ground regular atoms.
pub type Interpretation = BTreeSet<Atom>;

/// `I ⊨ l` for a ground literal: membership for regular atoms, term identity
/// for equality atoms, and the complement of either under naf.
pub fn satisfies(i: &Interpretation, l: &Literal) -> bool {
    holds(i, &l.atom) != l.negated
}

fn holds(i: &Interpretation, a: &Atom) -> bool {
    match a.pred {
        Predicate::Eq => a.args[0] == a.args[1],
        Predicate::Named(_) => i.contains(a),
    }
}

/// `I ⊨ r`: some head literal holds whenever the whole body holds.
pub fn rule_satisfied(i: &Interpretation, r: &Rule) -> bool {
    !r.body().iter().all(|l| satisfies(i, l)) || r.head().iter().any(|l| satisfies(i, l))
}

/// The reduct `P^I`: `α⁺ ← β⁺` for every rule with `I ⊨ not β⁻` and `I ⊨ α⁻`.
pub fn reduct(program: &Program, i: &Interpretation) -> Program {
    program
        .rules
        .iter()
        .filter(|r| r.body_neg().all(|a| !holds(i, a)) && r.head_neg().all(|a| holds(i, a)))
        .map(|r| {
            Rule::new(
                r.head_pos().cloned().map(Literal::pos),
                r.body_pos().cloned().map(Literal::pos),
            )
        })
        .collect()
}

/// Least fixpoint of the immediate-consequence operator of a naf-free program
/// with at most one head atom per rule, together with the constraints whose
/// bodies the fixpoint satisfies.
pub fn least_fixpoint(program: &Program) -> (Interpretation, Vec<Rule>) {
    let mut model = Interpretation::new();
    loop {
        let mut changed = false;
        for r in &program.rules {
            let Some(h) = r.head_pos().next() else {
                continue;
            };
            if !model.contains(h) && r.body().iter().all(|l| satisfies(&model, l)) {
                model.insert(h.clone());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let violated = program
        .rules
        .iter()
        .filter(|r| r.is_constraint() && r.body().iter().all(|l| satisfies(&model, l)))
        .cloned()
        .collect();
    (model, violated)
}

/// `I` is an answer set of `P` iff it is the least model of `P^I` and that
/// model violates no constraint of `P^I`.
pub fn is_answer_set(program: &Program, i: &Interpretation) -> bool {
    let (lfp, violated) = least_fixpoint(&reduct(program, i));
    violated.is_empty() && &lfp == i
}

/// Why an interpretation is or is not an answer set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnosis {
    /// Derived by the reduct but absent from the interpretation.
    pub missing: Vec<Atom>,
    /// Present but not derivable from the reduct.
    pub unsupported: Vec<Atom>,
    /// Constraints of the reduct violated by its least fixpoint.
    pub violated: Vec<Rule>,
}

impl Diagnosis {
    pub fn is_answer_set(&self) -> bool {
        self.missing.is_empty() && self.unsupported.is_empty() && self.violated.is_empty()
    }
}

pub fn diagnose(program: &Program, i: &Interpretation) -> Diagnosis {
    let (lfp, violated) = least_fixpoint(&reduct(program, i));
    Diagnosis {
        missing: lfp.difference(i).cloned().collect(),
        unsupported: i.difference(&lfp).cloned().collect(),
        violated,
    }
}

/// Regular atoms occurring in a ground program, sorted.
pub fn base(program: &Program) -> Vec<Atom> {
    let set: BTreeSet<&Atom> = program
        .rules
        .iter()
        .flat_map(Rule::atoms)
        .filter(|a| a.is_regular())
        .collect();
    set.into_iter().cloned().collect()
}

/// All answer sets of a ground program by exhaustive enumeration of subsets
/// of its base. Fails when the base exceeds `cap` atoms.
///
/// Negation in rule heads breaks the anti-chain property, so answer sets may
/// be nested; no subsumption pruning is applied.
pub fn enumerate_answer_sets(program: &Program, cap: usize) -> Result<Vec<Interpretation>> {
    let atoms = base(program);
    if atoms.len() > cap {
        return Err(Error::BaseCap { size: atoms.len(), cap });
    }
    let gp = GroundProgram::from_program(program)?;
    // Map base positions to compiled atom ids; both list the same atoms.
    let ids: Vec<u32> = atoms
        .iter()
        .map(|a| gp.lookup(a).expect("base atom compiled"))
        .collect();
    let mut out = Vec::new();
    let mut assignment = vec![false; gp.num_atoms()];
    for mask in 0u64..(1u64 << atoms.len()) {
        for (bit, id) in ids.iter().enumerate() {
            assignment[*id as usize] = mask >> bit & 1 == 1;
        }
        if gp.is_answer_set(&assignment) {
            out.push(
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask >> bit & 1 == 1)
                    .map(|(_, a)| a.clone())
                    .collect(),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Elem, Term};
    use crate::syntax::parse_program;

    fn p(src: &str) -> Program {
        parse_program(src).unwrap()
    }

    fn atom(name: &str) -> Atom {
        Atom::new(name, vec![])
    }

    fn interp(names: &[&str]) -> Interpretation {
        names.iter().map(|n| atom(n)).collect()
    }

    fn e(i: u32) -> Term {
        Term::Elem(Elem(i))
    }

    #[test]
    fn satisfaction() {
        let a_x = Atom::new("a", vec![e(0)]);
        let i: Interpretation = [a_x.clone()].into();
        assert!(satisfies(&i, &Literal::pos(a_x.clone())));
        assert!(satisfies(&i, &Literal::pos(Atom::eq(e(0), e(0)))));
        assert!(!satisfies(&i, &Literal::pos(Atom::eq(e(0), e(1)))));
        assert!(satisfies(&Interpretation::new(), &Literal::naf(a_x)));
    }

    #[test]
    fn reduct_of_naf_body() {
        assert_eq!(reduct(&p("a :- not b."), &interp(&["a"])), p("a."));
    }

    #[test]
    fn reduct_of_free_rule() {
        let prog = p("a | not a.");
        assert!(reduct(&prog, &interp(&[])).is_empty());
        assert_eq!(reduct(&prog, &interp(&["a"])), p("a."));
    }

    #[test]
    fn reduct_is_identity_on_positive_programs() {
        let prog = p("a. b :- a. :- b, c.");
        assert_eq!(reduct(&prog, &interp(&["a"])), prog);
    }

    #[test]
    fn fixpoint_chain_and_constraints() {
        let (m, v) = least_fixpoint(&p("a. b :- a."));
        assert_eq!(m, interp(&["a", "b"]));
        assert!(v.is_empty());
        let (m, v) = least_fixpoint(&p("a. :- a."));
        assert_eq!(m, interp(&["a"]));
        assert_eq!(v, p(":- a.").rules);
    }

    #[test]
    fn fixpoint_evaluates_equality() {
        let prog = Program::new(vec![Rule::new(
            [Literal::pos(Atom::new("p", vec![e(0)]))],
            [Literal::pos(Atom::eq(e(0), e(0)))],
        )]);
        let (m, v) = least_fixpoint(&prog);
        assert_eq!(m, [Atom::new("p", vec![e(0)])].into());
        assert!(v.is_empty());
    }

    #[test]
    fn answer_sets_of_free_atom() {
        let prog = p("a | not a.");
        assert!(is_answer_set(&prog, &interp(&[])));
        assert!(is_answer_set(&prog, &interp(&["a"])));
        assert_eq!(
            enumerate_answer_sets(&prog, 22).unwrap(),
            vec![interp(&[]), interp(&["a"])]
        );
    }

    #[test]
    fn odd_loop_has_no_answer_set() {
        let prog = p("a :- not a.");
        assert!(!is_answer_set(&prog, &interp(&[])));
        assert!(!is_answer_set(&prog, &interp(&["a"])));
        assert!(enumerate_answer_sets(&prog, 22).unwrap().is_empty());
    }

    #[test]
    fn even_loop() {
        let sets = enumerate_answer_sets(&p("a :- not b. b :- not a."), 22).unwrap();
        assert_eq!(sets, vec![interp(&["a"]), interp(&["b"])]);
    }

    #[test]
    fn empty_program() {
        assert!(is_answer_set(&Program::default(), &Interpretation::new()));
    }

    #[test]
    fn violated_equality_constraint() {
        let prog = Program::new(vec![
            Rule::free(Atom::new("p", vec![e(0)])),
            Rule::constraint([Literal::pos(Atom::eq(e(0), e(0)))]),
        ]);
        assert!(enumerate_answer_sets(&prog, 22).unwrap().is_empty());
    }

    #[test]
    fn base_cap() {
        let src: String = (0..23).map(|i| format!("{{ a{i} }}.\n")).collect();
        assert!(matches!(
            enumerate_answer_sets(&p(&src), 22),
            Err(Error::BaseCap { size: 23, cap: 22 })
        ));
    }

    #[test]
    fn diagnosis_names_the_problem() {
        let d = diagnose(&p("a. b :- c."), &interp(&["b"]));
        assert_eq!(d.missing, vec![atom("a")]);
        assert_eq!(d.unsupported, vec![atom("b")]);
        assert!(!d.is_answer_set());
    }
}
