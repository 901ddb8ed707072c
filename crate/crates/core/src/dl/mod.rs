//! DLR with nominals and without number restrictions: concept and role
//! expressions over n-ary relation names, knowledge bases of inclusion axioms,
//! well-typedness, role-nominal normalization and the subexpression closure.

mod closure;
mod normalize;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use closure::{closure, closure_with};
pub use normalize::{normalize_concept, normalize_kb, normalize_role_nominals};
pub use validate::{validate_kb, DlViolation};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Name(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    /// `∃[$i]R`, with a 1-based position.
    Exists(usize, Box<Role>),
    Nominal(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Top(usize),
    Name(String, usize),
    /// `($i/n : C)`, with a 1-based position.
    Select {
        pos: usize,
        arity: usize,
        concept: Box<Concept>,
    },
    Not(Box<Role>),
    And(Box<Role>, Box<Role>),
    Tuple(Vec<String>),
}

impl Concept {
    pub fn name(n: impl Into<String>) -> Self {
        Concept::Name(n.into())
    }

    pub fn nominal(o: impl Into<String>) -> Self {
        Concept::Nominal(o.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn and(a: Concept, b: Concept) -> Self {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn exists(pos: usize, r: Role) -> Self {
        Concept::Exists(pos, Box::new(r))
    }

    /// Number of constructor and name occurrences.
    pub fn size(&self) -> usize {
        match self {
            Concept::Top | Concept::Name(_) | Concept::Nominal(_) => 1,
            Concept::Not(c) => 1 + c.size(),
            Concept::And(a, b) => 1 + a.size() + b.size(),
            Concept::Exists(_, r) => 1 + r.size(),
        }
    }

    /// Height of the syntax tree; leaves have height 0.
    pub fn height(&self) -> usize {
        match self {
            Concept::Top | Concept::Name(_) | Concept::Nominal(_) => 0,
            Concept::Not(c) => 1 + c.height(),
            Concept::And(a, b) => 1 + a.height().max(b.height()),
            Concept::Exists(_, r) => 1 + r.height(),
        }
    }
}

impl Role {
    pub fn name(n: impl Into<String>, arity: usize) -> Self {
        Role::Name(n.into(), arity)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(r: Role) -> Self {
        Role::Not(Box::new(r))
    }

    pub fn and(a: Role, b: Role) -> Self {
        Role::And(Box::new(a), Box::new(b))
    }

    pub fn select(pos: usize, arity: usize, c: Concept) -> Self {
        Role::Select {
            pos,
            arity,
            concept: Box::new(c),
        }
    }

    /// Arity, taking the left operand of an intersection.
    pub fn arity(&self) -> usize {
        match self {
            Role::Top(n) | Role::Name(_, n) => *n,
            Role::Select { arity, .. } => *arity,
            Role::Not(r) => r.arity(),
            Role::And(a, _) => a.arity(),
            Role::Tuple(os) => os.len(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Role::Top(_) | Role::Name(..) | Role::Tuple(_) => 1,
            Role::Select { concept, .. } => 1 + concept.size(),
            Role::Not(r) => 1 + r.size(),
            Role::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Role::Top(_) | Role::Name(..) | Role::Tuple(_) => 0,
            Role::Select { concept, .. } => 1 + concept.height(),
            Role::Not(r) => 1 + r.height(),
            Role::And(a, b) => 1 + a.height().max(b.height()),
        }
    }
}

/// A concept or role expression, as stored in the closure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Concept(Concept),
    Role(Role),
}

impl Expr {
    /// 1 for concepts, the role arity otherwise.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Concept(_) => 1,
            Expr::Role(r) => r.arity(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Expr::Concept(c) => c.height(),
            Expr::Role(r) => r.height(),
        }
    }

    /// Name of the program predicate standing for this expression: the
    /// expression's canonical printed form.
    pub fn predicate(&self) -> String {
        self.to_string()
    }

    /// Concept or relation name, if this expression is one.
    pub fn atomic_name(&self) -> Option<&str> {
        match self {
            Expr::Concept(Concept::Name(n)) | Expr::Role(Role::Name(n, _)) => Some(n),
            _ => None,
        }
    }
}

impl From<Concept> for Expr {
    fn from(c: Concept) -> Self {
        Expr::Concept(c)
    }
}

impl From<Role> for Expr {
    fn from(r: Role) -> Self {
        Expr::Role(r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Concept(Concept, Concept),
    Role(Role, Role),
}

impl Axiom {
    pub fn size(&self) -> usize {
        1 + match self {
            Axiom::Concept(a, b) => a.size() + b.size(),
            Axiom::Role(a, b) => a.size() + b.size(),
        }
    }

    pub fn sides(&self) -> (Expr, Expr) {
        match self {
            Axiom::Concept(a, b) => (Expr::Concept(a.clone()), Expr::Concept(b.clone())),
            Axiom::Role(a, b) => (Expr::Role(a.clone()), Expr::Role(b.clone())),
        }
    }
}

/// A knowledge base: inclusion axioms plus the declared signature. Names are
/// DL names (and hence DL atoms in a hybrid program) iff they are declared.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DlKb {
    pub axioms: Vec<Axiom>,
    pub concepts: BTreeSet<String>,
    pub roles: BTreeMap<String, usize>,
    pub nominals: BTreeSet<String>,
    /// Upper bound on role arity; the largest arity in the KB when `None`.
    pub n_max: Option<usize>,
}

impl DlKb {
    /// Builds a KB and declares every name and nominal its axioms mention.
    pub fn from_axioms(axioms: Vec<Axiom>) -> Self {
        let mut kb = DlKb {
            axioms,
            ..DlKb::default()
        };
        kb.declare_mentioned();
        kb
    }

    pub fn declare_mentioned(&mut self) {
        let mut names = Signature::default();
        for ax in &self.axioms {
            let (l, r) = ax.sides();
            names.collect(&l);
            names.collect(&r);
        }
        self.concepts.extend(names.concepts);
        for (r, n) in names.roles {
            self.roles.entry(r).or_insert(n);
        }
        self.nominals.extend(names.nominals);
    }

    pub fn is_dl_name(&self, pred: &str) -> bool {
        self.concepts.contains(pred) || self.roles.contains_key(pred)
    }

    /// Arity of a declared name.
    pub fn name_arity(&self, pred: &str) -> Option<usize> {
        if self.concepts.contains(pred) {
            Some(1)
        } else {
            self.roles.get(pred).copied()
        }
    }

    pub fn effective_n_max(&self) -> usize {
        self.n_max.unwrap_or_else(|| {
            let mut m = self.roles.values().copied().max().unwrap_or(1);
            for ax in &self.axioms {
                let (l, r) = ax.sides();
                m = m.max(max_arity(&l)).max(max_arity(&r));
            }
            m
        })
    }

    /// Symbol count of the axioms.
    pub fn size(&self) -> usize {
        self.axioms.iter().map(Axiom::size).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty() && self.concepts.is_empty() && self.roles.is_empty()
    }
}

fn max_arity(e: &Expr) -> usize {
    let mut m = 1;
    walk(e, &mut |sub| {
        if let Expr::Role(r) = sub {
            m = m.max(r.arity());
        }
    });
    m
}

/// Visits an expression and all its subexpressions, children first.
pub fn walk(e: &Expr, f: &mut impl FnMut(&Expr)) {
    match e {
        Expr::Concept(c) => match c {
            Concept::Top | Concept::Name(_) | Concept::Nominal(_) => {}
            Concept::Not(inner) => walk(&Expr::Concept((**inner).clone()), f),
            Concept::And(a, b) => {
                walk(&Expr::Concept((**a).clone()), f);
                walk(&Expr::Concept((**b).clone()), f);
            }
            Concept::Exists(_, r) => walk(&Expr::Role((**r).clone()), f),
        },
        Expr::Role(r) => match r {
            Role::Top(_) | Role::Name(..) | Role::Tuple(_) => {}
            Role::Select { concept, .. } => walk(&Expr::Concept((**concept).clone()), f),
            Role::Not(inner) => walk(&Expr::Role((**inner).clone()), f),
            Role::And(a, b) => {
                walk(&Expr::Role((**a).clone()), f);
                walk(&Expr::Role((**b).clone()), f);
            }
        },
    }
    f(e);
}

/// Names and nominal constants occurring in expressions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeMap<String, usize>,
    pub nominals: BTreeSet<String>,
}

impl Signature {
    pub fn collect(&mut self, e: &Expr) {
        walk(e, &mut |sub| match sub {
            Expr::Concept(Concept::Name(n)) => {
                self.concepts.insert(n.clone());
            }
            Expr::Concept(Concept::Nominal(o)) => {
                self.nominals.insert(o.clone());
            }
            Expr::Role(Role::Name(n, k)) => {
                self.roles.entry(n.clone()).or_insert(*k);
            }
            Expr::Role(Role::Tuple(os)) => {
                self.nominals.extend(os.iter().cloned());
            }
            _ => {}
        });
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("top1"),
            Concept::Name(n) => f.write_str(n),
            Concept::Not(c) => write!(f, "not({c})"),
            Concept::And(a, b) => write!(f, "and({a},{b})"),
            Concept::Exists(i, r) => write!(f, "some({i},{r})"),
            Concept::Nominal(o) => write!(f, "one({o})"),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Top(n) => write!(f, "top/{n}"),
            Role::Name(n, _) => f.write_str(n),
            Role::Select { pos, arity, concept } => write!(f, "sel({pos}/{arity},{concept})"),
            Role::Not(r) => write!(f, "not({r})"),
            Role::And(a, b) => write!(f, "and({a},{b})"),
            Role::Tuple(os) => write!(f, "tuple({})", os.join(",")),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Concept(c) => c.fmt(f),
            Expr::Role(r) => r.fmt(f),
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Concept(a, b) => write!(f, "{a} <= {b}."),
            Axiom::Role(a, b) => write!(f, "{a} <= {b}."),
        }
    }
}

impl fmt::Display for DlKb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.concepts {
            writeln!(f, "concept {c}.")?;
        }
        for (r, n) in &self.roles {
            writeln!(f, "role {r}/{n}.")?;
        }
        for ax in &self.axioms {
            writeln!(f, "{ax}")?;
        }
        Ok(())
    }
}
