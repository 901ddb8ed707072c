use std::collections::BTreeSet;

use super::{free_rule_atom, Atom, Literal, Program, Rule, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GuardReport {
    /// The first positive body atom containing every variable of the rule.
    Guarded(Atom),
    /// Variable-free rule; no guard is needed.
    Ground,
    /// `q(X⃗) ∨ not q(X⃗) ←` with pairwise distinct variables.
    FreeRule,
    /// Variables that no single positive body atom covers.
    Unguarded(BTreeSet<String>),
}

impl GuardReport {
    pub fn is_ok(&self) -> bool {
        !matches!(self, GuardReport::Unguarded(_))
    }
}

pub fn classify_rule(rule: &Rule) -> GuardReport {
    if is_free_shape(rule) {
        return GuardReport::FreeRule;
    }
    let vars: BTreeSet<&str> = rule.vars().into_iter().collect();
    if vars.is_empty() {
        return GuardReport::Ground;
    }
    let guard = rule.body_pos().find(|atom| {
        let covered: BTreeSet<&str> = atom.vars().collect();
        vars.is_subset(&covered)
    });
    match guard {
        Some(atom) => GuardReport::Guarded(atom.clone()),
        None => {
            // Variables outside the best single candidate: with no positive
            // body atom this is every variable.
            let uncovered = rule
                .body_pos()
                .map(|atom| {
                    let covered: BTreeSet<&str> = atom.vars().collect();
                    vars.difference(&covered)
                        .map(|v| v.to_string())
                        .collect::<BTreeSet<_>>()
                })
                .min_by_key(|s| s.len())
                .unwrap_or_else(|| vars.iter().map(|v| v.to_string()).collect());
            GuardReport::Unguarded(uncovered)
        }
    }
}

fn is_free_shape(rule: &Rule) -> bool {
    let Some(atom) = free_rule_atom(rule) else {
        return false;
    };
    let mut seen = BTreeSet::new();
    atom.args
        .iter()
        .all(|t| matches!(t, Term::Var(v) if seen.insert(v.as_str())))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardedProgram {
    pub guarded: bool,
    /// `(rule index, report)` for every rule that is neither guarded nor free.
    pub offending: Vec<(usize, GuardReport)>,
}

pub fn is_guarded_program(program: &Program) -> GuardedProgram {
    let offending: Vec<_> = program
        .rules
        .iter()
        .enumerate()
        .map(|(i, r)| (i, classify_rule(r)))
        .filter(|(_, report)| !report.is_ok())
        .collect();
    GuardedProgram {
        guarded: offending.is_empty(),
        offending,
    }
}

/// Adds `X = X` to the body of an unguarded rule with exactly one variable,
/// making its implicit guard explicit. Other rules are returned unchanged.
pub fn materialize_unary_guard(rule: Rule) -> Rule {
    let vars = rule.vars();
    if vars.len() != 1 || classify_rule(&rule).is_ok() {
        return rule;
    }
    let x = Term::Var(vars[0].to_owned());
    let Rule { head, mut body } = rule;
    body.push(Literal::pos(Atom::eq(x.clone(), x)));
    Rule::new(head, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, parse_rule};

    fn atom(src: &str) -> Atom {
        parse_rule(&format!("{src}.")).unwrap().head()[0].atom.clone()
    }

    #[test]
    fn guarded_by_positive_body_atom() {
        let r = parse_rule("a(X,Y) :- g(X,Y), not f(X,Y).").unwrap();
        assert_eq!(classify_rule(&r), GuardReport::Guarded(atom("g(X,Y)")));
    }

    #[test]
    fn naf_only_body_is_unguarded() {
        let r = parse_rule("a(X,Y) :- not f(X,Y).").unwrap();
        let vars = ["X", "Y"].iter().map(|s| s.to_string()).collect();
        assert_eq!(classify_rule(&r), GuardReport::Unguarded(vars));
    }

    #[test]
    fn free_rule_shape() {
        let r = parse_rule("{ q(X,Y) }.").unwrap();
        assert_eq!(classify_rule(&r), GuardReport::FreeRule);
        let r = parse_rule("q(X,Y) | not q(X,Y).").unwrap();
        assert_eq!(classify_rule(&r), GuardReport::FreeRule);
    }

    #[test]
    fn free_rule_with_repeated_variable_is_flagged() {
        let r = parse_rule("{ q(X,X) }.").unwrap();
        assert!(matches!(classify_rule(&r), GuardReport::Unguarded(_)));
    }

    #[test]
    fn first_guard_in_body_order() {
        let r = parse_rule("a(X) :- p(X), q(X).").unwrap();
        assert_eq!(classify_rule(&r), GuardReport::Guarded(atom("p(X)")));
    }

    #[test]
    fn unary_rules_get_explicit_equality_guard() {
        let r = parse_rule(":- not top1(X).").unwrap();
        assert_eq!(r.body().len(), 2);
        assert_eq!(
            classify_rule(&r),
            GuardReport::Guarded(Atom::eq(Term::var("X"), Term::var("X")))
        );
    }

    #[test]
    fn facts_are_ground() {
        let r = parse_rule("q(a).").unwrap();
        assert_eq!(classify_rule(&r), GuardReport::Ground);
    }

    #[test]
    fn drinker_program_is_guarded() {
        let p = parse_program(
            "problemDrinker(X) :- Drinker(X), not socialDrinker(X).
             socialDrinker(X) :- Drinker(X), not problemDrinker(Y), hasDrinkingBuddy(X,Y).
             FraternityMember(john).",
        )
        .unwrap();
        assert!(is_guarded_program(&p).guarded);
    }

    #[test]
    fn offending_rules_listed() {
        let p = parse_program("a(X,Y) :- not f(X,Y).").unwrap();
        let g = is_guarded_program(&p);
        assert!(!g.guarded);
        assert_eq!(g.offending.len(), 1);
        assert_eq!(g.offending[0].0, 0);
    }

    #[test]
    fn empty_program_is_guarded() {
        assert!(is_guarded_program(&Program::default()).guarded);
    }

    #[test]
    fn classification_is_stable_under_renaming() {
        let a = parse_rule("a(X,Y) :- g(X,Y), not f(Y).").unwrap();
        let b = parse_rule("a(U,V) :- g(U,V), not f(V).").unwrap();
        assert!(matches!(classify_rule(&a), GuardReport::Guarded(_)));
        assert!(matches!(classify_rule(&b), GuardReport::Guarded(_)));
    }
}
