//! Programs under the open answer set semantics: terms, atoms, literals, rules,
//! pre-interpretations, and the syntactic analyses on them (well-formedness,
//! guardedness, grounding).

mod ground;
mod guard;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub(crate) use ground::advance as ground_advance;
pub use ground::{ground, grounding_size};
pub use guard::{classify_rule, is_guarded_program, materialize_unary_guard, GuardReport, GuardedProgram};
pub use validate::{validate_program, Violation, ViolationKind};

use crate::error::{Error, Result};

/// An anonymous element of a (pre-)interpretation domain, identified by its index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    Var(String),
    Elem(Elem),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn is_ground(&self) -> bool {
        !matches!(self, Term::Var(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    Eq,
    Named(String),
}

impl Predicate {
    pub fn name(&self) -> Option<&str> {
        match self {
            Predicate::Eq => None,
            Predicate::Named(n) => Some(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Predicate,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            pred: Predicate::Named(pred.into()),
            args,
        }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Atom {
            pred: Predicate::Eq,
            args: vec![lhs, rhs],
        }
    }

    /// An atom is regular when its predicate is not equality.
    pub fn is_regular(&self) -> bool {
        matches!(self.pred, Predicate::Named(_))
    }

    pub fn is_equality(&self) -> bool {
        self.pred == Predicate::Eq
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub negated: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { negated: false, atom }
    }

    pub fn naf(atom: Atom) -> Self {
        Literal { negated: true, atom }
    }
}

/// A rule `α ← β`. Head and body are kept as sorted, duplicate-free sequences
/// (positive literals first), so structurally equal rules compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    head: Vec<Literal>,
    body: Vec<Literal>,
}

impl Rule {
    pub fn new(head: impl IntoIterator<Item = Literal>, body: impl IntoIterator<Item = Literal>) -> Self {
        Rule {
            head: canonical(head),
            body: canonical(body),
        }
    }

    pub fn fact(atom: Atom) -> Self {
        Rule::new([Literal::pos(atom)], [])
    }

    pub fn constraint(body: impl IntoIterator<Item = Literal>) -> Self {
        Rule::new([], body)
    }

    /// `q(X⃗) ∨ not q(X⃗) ←`
    pub fn free(atom: Atom) -> Self {
        Rule::new([Literal::pos(atom.clone()), Literal::naf(atom)], [])
    }

    pub fn head(&self) -> &[Literal] {
        &self.head
    }

    pub fn body(&self) -> &[Literal] {
        &self.body
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn head_pos(&self) -> impl Iterator<Item = &Atom> {
        self.head.iter().filter(|l| !l.negated).map(|l| &l.atom)
    }

    pub fn head_neg(&self) -> impl Iterator<Item = &Atom> {
        self.head.iter().filter(|l| l.negated).map(|l| &l.atom)
    }

    pub fn body_pos(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| !l.negated).map(|l| &l.atom)
    }

    pub fn body_neg(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| l.negated).map(|l| &l.atom)
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.head.iter().chain(self.body.iter())
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.literals().map(|l| &l.atom)
    }

    /// Variables in order of first occurrence (head first, then body).
    pub fn vars(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.atoms().flat_map(Atom::vars) {
            if seen.insert(v) {
                out.push(v);
            }
        }
        out
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.atoms().flat_map(|a| a.args.iter()).filter_map(|t| match t {
            Term::Const(c) => Some(c.as_str()),
            _ => None,
        })
    }

    pub fn is_ground(&self) -> bool {
        self.atoms().all(Atom::is_ground)
    }
}

fn canonical(lits: impl IntoIterator<Item = Literal>) -> Vec<Literal> {
    let mut v: Vec<Literal> = lits.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

/// A finite program. Rule order is preserved; it only affects printing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program { rules }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Sorted and deduplicated copy.
    pub fn canonicalized(&self) -> Program {
        let mut rules = self.rules.clone();
        rules.sort();
        rules.dedup();
        Program { rules }
    }

    pub fn constants(&self) -> BTreeSet<String> {
        self.rules
            .iter()
            .flat_map(|r| r.constants())
            .map(str::to_owned)
            .collect()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.rules
            .iter()
            .flat_map(|r| r.atoms().flat_map(Atom::vars))
            .map(str::to_owned)
            .collect()
    }

    /// Regular predicates with the arity of their first occurrence.
    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for a in self.rules.iter().flat_map(Rule::atoms) {
            if let Predicate::Named(n) = &a.pred {
                out.entry(n.clone()).or_insert(a.args.len());
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(Rule::is_ground)
    }

    pub fn extend(&mut self, other: Program) {
        self.rules.extend(other.rules);
    }
}

impl FromIterator<Rule> for Program {
    fn from_iter<T: IntoIterator<Item = Rule>>(iter: T) -> Self {
        Program {
            rules: iter.into_iter().collect(),
        }
    }
}

/// Element names for a finite domain. Elements are the indices `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    names: Vec<String>,
}

impl Domain {
    /// `e1, …, ek`
    pub fn anonymous(k: usize) -> Self {
        Domain {
            names: (1..=k).map(|i| format!("e{i}")).collect(),
        }
    }

    pub fn named(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Structure("domain must be non-empty".into()));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(Error::Structure("domain element names must be distinct".into()));
        }
        Ok(Domain { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elems(&self) -> impl Iterator<Item = Elem> {
        (0..self.names.len() as u32).map(Elem)
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(|i| Elem(i as u32))
    }
}

/// A pre-interpretation `(D, σ)`: a non-empty finite domain and a map from
/// constants to its elements. `σ` need not be injective.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreInterpretation {
    pub domain: Domain,
    pub sigma: BTreeMap<String, Elem>,
}

impl PreInterpretation {
    pub fn new(domain: Domain, sigma: BTreeMap<String, Elem>) -> Result<Self> {
        if let Some((c, e)) = sigma.iter().find(|(_, e)| e.index() >= domain.len()) {
            return Err(Error::Structure(format!(
                "constant `{c}` maps to element #{} outside a domain of size {}",
                e.0,
                domain.len()
            )));
        }
        Ok(PreInterpretation { domain, sigma })
    }

    pub fn map(&self, constant: &str) -> Result<Elem> {
        self.sigma
            .get(constant)
            .copied()
            .ok_or_else(|| Error::UnmappedConstant(constant.to_owned()))
    }
}

// Printing. Quoted predicate names are used for anything that is not a plain
// identifier, e.g. the closure predicates produced by the translation.

pub(crate) fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

fn write_pred(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_plain_ident(name) {
        f.write_str(name)
    } else {
        write!(f, "\"{name}\"")
    }
}

/// Renders ground terms with the names of a domain instead of `#i`.
pub struct WithDomain<'a, T: ?Sized> {
    pub value: &'a T,
    pub domain: Option<&'a Domain>,
}

impl<'a, T: ?Sized> WithDomain<'a, T> {
    pub fn new(value: &'a T, domain: &'a Domain) -> Self {
        WithDomain {
            value,
            domain: Some(domain),
        }
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, domain: Option<&Domain>) -> fmt::Result {
    match t {
        Term::Const(c) | Term::Var(c) => f.write_str(c),
        Term::Elem(e) => match domain {
            Some(d) if e.index() < d.len() => f.write_str(d.name(*e)),
            _ => write!(f, "#{}", e.0),
        },
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, a: &Atom, domain: Option<&Domain>) -> fmt::Result {
    match &a.pred {
        Predicate::Eq => {
            write_term(f, &a.args[0], domain)?;
            f.write_str(" = ")?;
            write_term(f, &a.args[1], domain)
        }
        Predicate::Named(n) => {
            write_pred(f, n)?;
            if !a.args.is_empty() {
                f.write_str("(")?;
                for (i, t) in a.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_term(f, t, domain)?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, l: &Literal, domain: Option<&Domain>) -> fmt::Result {
    if l.negated {
        if l.atom.is_equality() {
            write_term(f, &l.atom.args[0], domain)?;
            f.write_str(" != ")?;
            return write_term(f, &l.atom.args[1], domain);
        }
        f.write_str("not ")?;
    }
    write_atom(f, &l.atom, domain)
}

fn write_rule(f: &mut fmt::Formatter<'_>, r: &Rule, domain: Option<&Domain>) -> fmt::Result {
    if let Some(atom) = free_rule_atom(r) {
        f.write_str("{ ")?;
        write_atom(f, atom, domain)?;
        return f.write_str(" }.");
    }
    for (i, l) in r.head.iter().enumerate() {
        if i > 0 {
            f.write_str(" | ")?;
        }
        write_literal(f, l, domain)?;
    }
    if !r.body.is_empty() {
        if r.head.is_empty() {
            f.write_str(":- ")?;
        } else {
            f.write_str(" :- ")?;
        }
        for (i, l) in r.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write_literal(f, l, domain)?;
        }
    }
    f.write_str(".")
}

/// `Some(q(t⃗))` when the rule is syntactically `q(t⃗) ∨ not q(t⃗) ←`.
pub(crate) fn free_rule_atom(r: &Rule) -> Option<&Atom> {
    match (r.head.as_slice(), r.body.is_empty()) {
        ([p, n], true) if !p.negated && n.negated && p.atom == n.atom && p.atom.is_regular() => Some(&p.atom),
        _ => None,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, None)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom(f, self, None)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_literal(f, self, None)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rule(f, self, None)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Display for WithDomain<'_, Atom> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom(f, self.value, self.domain)
    }
}

impl fmt::Display for WithDomain<'_, Rule> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rule(f, self.value, self.domain)
    }
}

impl fmt::Display for WithDomain<'_, Program> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.value.rules {
            write_rule(f, r, self.domain)?;
            writeln!(f)?;
        }
        Ok(())
    }
}
