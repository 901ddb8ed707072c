use std::collections::BTreeMap;
use std::fmt;

use super::{Predicate, Program, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    TwoPositiveHeads,
    NonRegularPositiveHead,
    EqualityArity(usize),
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
    },
    DomainElementInInput,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending rule in `Program::rules`.
    pub rule: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::TwoPositiveHeads => f.write_str("two positive head atoms"),
            ViolationKind::NonRegularPositiveHead => f.write_str("positive head atom not regular"),
            ViolationKind::EqualityArity(n) => write!(f, "equality atom with {n} arguments"),
            ViolationKind::ArityMismatch { pred, expected, found } => {
                write!(f, "arity mismatch for `{pred}`: expected {expected}, found {found}")
            }
            ViolationKind::DomainElementInInput => f.write_str("domain element in non-ground input"),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: {}", self.rule + 1, self.kind)
    }
}

/// Checks `|α⁺| ≤ 1`, regularity of positive heads, and program-wide arity
/// consistency (first use fixes the arity). Rules are reported by index.
pub fn validate_program(program: &Program) -> Vec<Violation> {
    validate_with_arities(program, &BTreeMap::new())
}

/// As [`validate_program`], with arities already fixed elsewhere (e.g. by a DL
/// signature that shares predicate names with the program).
pub fn validate_with_arities(program: &Program, fixed: &BTreeMap<String, usize>) -> Vec<Violation> {
    let mut arities = fixed.clone();
    let mut out = Vec::new();
    for (i, rule) in program.rules.iter().enumerate() {
        let mut push = |kind| out.push(Violation { rule: i, kind });
        if rule.head_pos().count() > 1 {
            push(ViolationKind::TwoPositiveHeads);
        }
        if rule.head_pos().any(|a| !a.is_regular()) {
            push(ViolationKind::NonRegularPositiveHead);
        }
        let mut has_var = false;
        let mut has_elem = false;
        for atom in rule.atoms() {
            has_var |= atom.args.iter().any(|t| matches!(t, Term::Var(_)));
            has_elem |= atom.args.iter().any(|t| matches!(t, Term::Elem(_)));
            match &atom.pred {
                Predicate::Eq if atom.args.len() != 2 => push(ViolationKind::EqualityArity(atom.args.len())),
                Predicate::Eq => {}
                Predicate::Named(name) => {
                    let expected = *arities.entry(name.clone()).or_insert(atom.args.len());
                    if expected != atom.args.len() {
                        push(ViolationKind::ArityMismatch {
                            pred: name.clone(),
                            expected,
                            found: atom.args.len(),
                        });
                    }
                }
            }
        }
        if has_var && has_elem {
            push(ViolationKind::DomainElementInInput);
        }
    }
    out
}
