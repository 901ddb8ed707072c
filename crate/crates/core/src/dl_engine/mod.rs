//! Model theory of the description logic: interpretations over a finite
//! domain, evaluation of expressions, axiom checking and bounded enumeration
//! of models.
//!
//! Extensions are bitsets. A concept extension has one bit per element; an
//! `n`-ary extension has one bit per tuple, indexed lexicographically with the
//! first component most significant (see [`tuple_index`]).

mod enumerate;

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

pub(crate) use enumerate::enumerate_with_plan;
pub use enumerate::{concept_satisfiable, dl_model_count, enumerate_dl_models, DlWitness};

use crate::dl::{closure_with, Axiom, Concept, DlKb, Expr, Role};
use crate::error::{Error, Result};
use crate::logic::{Domain, Elem};

pub fn tuple_index(tuple: &[Elem], k: usize) -> usize {
    tuple.iter().fold(0, |acc, e| acc * k + e.index())
}

pub fn tuple_of(mut index: usize, n: usize, k: usize) -> Vec<Elem> {
    let mut out = vec![Elem(0); n];
    for slot in out.iter_mut().rev() {
        *slot = Elem((index % k) as u32);
        index /= k;
    }
    out
}

/// `i`-th component (1-based) of the tuple with the given index.
pub fn component(index: usize, i: usize, n: usize, k: usize) -> usize {
    index / k.pow((n - i) as u32) % k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlInterpretation {
    pub domain: Domain,
    pub concepts: BTreeMap<String, FixedBitSet>,
    /// Role name to arity and extension.
    pub roles: BTreeMap<String, (usize, FixedBitSet)>,
    /// `⊤ₙ` for `n ≥ 2`; a missing arity stands for the full `n`-th power.
    pub tops: BTreeMap<usize, FixedBitSet>,
    pub nominals: BTreeMap<String, Elem>,
}

impl DlInterpretation {
    /// All names of `kb` with empty extensions, `⊤ₙ` full, nominals unset.
    pub fn empty(kb: &DlKb, domain: Domain) -> Self {
        let k = domain.len();
        DlInterpretation {
            concepts: kb
                .concepts
                .iter()
                .map(|c| (c.clone(), FixedBitSet::with_capacity(k)))
                .collect(),
            roles: kb
                .roles
                .iter()
                .map(|(r, n)| (r.clone(), (*n, FixedBitSet::with_capacity(k.pow(*n as u32)))))
                .collect(),
            tops: BTreeMap::new(),
            nominals: BTreeMap::new(),
            domain,
        }
    }

    pub fn k(&self) -> usize {
        self.domain.len()
    }

    pub fn top(&self, n: usize) -> Cow<'_, FixedBitSet> {
        match self.tops.get(&n) {
            Some(t) => Cow::Borrowed(t),
            None => Cow::Owned(full(self.k().pow(n as u32))),
        }
    }

    /// Truth of a DL atom `name(tuple)`.
    pub fn holds(&self, name: &str, tuple: &[Elem]) -> Result<bool> {
        let k = self.k();
        if let Some(ext) = self.concepts.get(name) {
            if tuple.len() != 1 {
                return Err(arity(name, 1, tuple.len()));
            }
            return Ok(ext.contains(tuple[0].index()));
        }
        match self.roles.get(name) {
            Some((n, ext)) if *n == tuple.len() => Ok(ext.contains(tuple_index(tuple, k))),
            Some((n, _)) => Err(arity(name, *n, tuple.len())),
            None => Err(Error::UndeclaredName(name.to_owned())),
        }
    }

    /// Checks the structural invariants: extension sizes, `P^I ⊆ ⊤ₙ^I`,
    /// nominals inside the domain.
    pub fn check_structure(&self) -> Result<()> {
        let k = self.k();
        if k == 0 {
            return Err(Error::Structure("empty domain".into()));
        }
        for (c, ext) in &self.concepts {
            if ext.len() != k {
                return Err(Error::Structure(format!(
                    "extension of `{c}` has {} slots, domain has {k}",
                    ext.len()
                )));
            }
        }
        for (n, top) in &self.tops {
            if *n < 2 || top.len() != k.pow(*n as u32) {
                return Err(Error::Structure(format!("ill-sized top/{n}")));
            }
        }
        for (r, (n, ext)) in &self.roles {
            if ext.len() != k.pow(*n as u32) {
                return Err(Error::Structure(format!("ill-sized extension of `{r}`")));
            }
            if !ext.is_subset(&self.top(*n)) {
                return Err(Error::Structure(format!(
                    "extension of `{r}` is not contained in top/{n}"
                )));
            }
        }
        for (o, e) in &self.nominals {
            if e.index() >= k {
                return Err(Error::Structure(format!("nominal `{o}` denotes no domain element")));
            }
        }
        Ok(())
    }
}

fn arity(name: &str, expected: usize, found: usize) -> Error {
    Error::Arity {
        name: name.to_owned(),
        expected,
        found,
    }
}

fn full(len: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(len);
    s.insert_range(..);
    s
}

fn single(len: usize, bit: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(len);
    s.insert(bit);
    s
}

fn nominal(i: &DlInterpretation, o: &str) -> Result<Elem> {
    i.nominals
        .get(o)
        .copied()
        .ok_or_else(|| Error::UndeclaredName(o.to_owned()))
}

fn exists(r: &FixedBitSet, pos: usize, n: usize, k: usize) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(k);
    for t in r.ones() {
        out.insert(component(t, pos, n, k));
    }
    out
}

fn select(top: &FixedBitSet, pos: usize, n: usize, k: usize, c: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(top.len());
    for t in top.ones() {
        if c.contains(component(t, pos, n, k)) {
            out.insert(t);
        }
    }
    out
}

fn tuple_nominal(i: &DlInterpretation, os: &[String]) -> Result<FixedBitSet> {
    let n = os.len();
    let tuple = os.iter().map(|o| nominal(i, o)).collect::<Result<Vec<_>>>()?;
    let mut out = single(i.k().pow(n as u32), tuple_index(&tuple, i.k()));
    out.intersect_with(&i.top(n));
    Ok(out)
}

pub fn eval_concept(c: &Concept, i: &DlInterpretation) -> Result<FixedBitSet> {
    let k = i.k();
    Ok(match c {
        Concept::Top => full(k),
        Concept::Name(a) => i
            .concepts
            .get(a)
            .cloned()
            .ok_or_else(|| Error::UndeclaredName(a.clone()))?,
        Concept::Not(inner) => {
            let mut s = eval_concept(inner, i)?;
            s.toggle_range(..);
            s
        }
        Concept::And(a, b) => {
            let mut s = eval_concept(a, i)?;
            s.intersect_with(&eval_concept(b, i)?);
            s
        }
        Concept::Exists(pos, r) => exists(&eval_role(r, i)?, *pos, r.arity(), k),
        Concept::Nominal(o) => single(k, nominal(i, o)?.index()),
    })
}

/// Role negation is relative to `⊤ₙ`; a role nominal denotes its tuple when
/// that tuple lies in `⊤ₙ` (matching its normalized form, see the crate README).
pub fn eval_role(r: &Role, i: &DlInterpretation) -> Result<FixedBitSet> {
    let k = i.k();
    Ok(match r {
        Role::Top(n) => i.top(*n).into_owned(),
        Role::Name(p, n) => match i.roles.get(p) {
            Some((m, ext)) if m == n => ext.clone(),
            Some((m, _)) => return Err(arity(p, *m, *n)),
            None => return Err(Error::UndeclaredName(p.clone())),
        },
        Role::Select { pos, arity, concept } => select(&i.top(*arity), *pos, *arity, k, &eval_concept(concept, i)?),
        Role::Not(inner) => {
            let mut s = i.top(inner.arity()).into_owned();
            s.difference_with(&eval_role(inner, i)?);
            s
        }
        Role::And(a, b) => {
            let mut s = eval_role(a, i)?;
            let t = eval_role(b, i)?;
            if s.len() != t.len() {
                return Err(Error::Invalid(format!(
                    "intersection of roles of different arity in `{r}`"
                )));
            }
            s.intersect_with(&t);
            s
        }
        Role::Tuple(os) => tuple_nominal(i, os)?,
    })
}

pub fn eval(e: &Expr, i: &DlInterpretation) -> Result<FixedBitSet> {
    match e {
        Expr::Concept(c) => eval_concept(c, i),
        Expr::Role(r) => eval_role(r, i),
    }
}

/// Indices of the axioms `I` violates.
pub fn check_model(kb: &DlKb, i: &DlInterpretation) -> Result<Vec<usize>> {
    let mut violated = Vec::new();
    for (n, ax) in kb.axioms.iter().enumerate() {
        let ok = match ax {
            Axiom::Concept(a, b) => eval_concept(a, i)?.is_subset(&eval_concept(b, i)?),
            Axiom::Role(a, b) => eval_role(a, i)?.is_subset(&eval_role(b, i)?),
        };
        if !ok {
            violated.push(n);
        }
    }
    Ok(violated)
}

#[derive(Clone, Debug)]
enum Step {
    Top1,
    TopN(usize),
    Concept(String),
    Role(String),
    Nominal(String),
    NotC(usize),
    NotR(usize, usize),
    And(usize, usize),
    Exists(usize, usize, usize),
    Select(usize, usize, usize),
    Tuple(Vec<String>),
}

/// The closure of a KB compiled into an evaluation order, so that all closure
/// expressions of an interpretation are computed bottom-up in one pass.
#[derive(Clone, Debug)]
pub struct ClosurePlan {
    pub exprs: Vec<Expr>,
    index: HashMap<Expr, usize>,
    steps: Vec<Step>,
    axioms: Vec<(usize, usize)>,
}

impl ClosurePlan {
    pub fn new(kb: &DlKb, extra: &[Expr]) -> Self {
        let exprs = closure_with(kb, extra);
        let index: HashMap<Expr, usize> = exprs.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let at = |e: Expr| index[&e];
        let steps = exprs
            .iter()
            .map(|e| match e {
                Expr::Concept(c) => match c {
                    Concept::Top => Step::Top1,
                    Concept::Name(a) => Step::Concept(a.clone()),
                    Concept::Not(inner) => Step::NotC(at(Expr::Concept((**inner).clone()))),
                    Concept::And(a, b) => Step::And(at(Expr::Concept((**a).clone())), at(Expr::Concept((**b).clone()))),
                    Concept::Exists(pos, r) => Step::Exists(at(Expr::Role((**r).clone())), *pos, r.arity()),
                    Concept::Nominal(o) => Step::Nominal(o.clone()),
                },
                Expr::Role(r) => match r {
                    Role::Top(n) => Step::TopN(*n),
                    Role::Name(p, _) => Step::Role(p.clone()),
                    Role::Not(inner) => Step::NotR(at(Expr::Role((**inner).clone())), inner.arity()),
                    Role::And(a, b) => Step::And(at(Expr::Role((**a).clone())), at(Expr::Role((**b).clone()))),
                    Role::Select { pos, arity, concept } => {
                        Step::Select(at(Expr::Concept((**concept).clone())), *pos, *arity)
                    }
                    Role::Tuple(os) => Step::Tuple(os.clone()),
                },
            })
            .collect();
        let axioms = kb
            .axioms
            .iter()
            .map(|ax| {
                let (l, r) = ax.sides();
                (index[&l], index[&r])
            })
            .collect();
        ClosurePlan {
            exprs,
            index,
            steps,
            axioms,
        }
    }

    pub fn position(&self, e: &Expr) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Extensions of all closure expressions, in closure order.
    pub fn evaluate(&self, i: &DlInterpretation) -> Result<Vec<FixedBitSet>> {
        let k = i.k();
        let mut out: Vec<FixedBitSet> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let s = match step {
                Step::Top1 => full(k),
                Step::TopN(n) => i.top(*n).into_owned(),
                Step::Concept(a) => i
                    .concepts
                    .get(a)
                    .cloned()
                    .ok_or_else(|| Error::UndeclaredName(a.clone()))?,
                Step::Role(p) => i
                    .roles
                    .get(p)
                    .map(|r| r.1.clone())
                    .ok_or_else(|| Error::UndeclaredName(p.clone()))?,
                Step::Nominal(o) => single(k, nominal(i, o)?.index()),
                Step::NotC(a) => {
                    let mut s = out[*a].clone();
                    s.toggle_range(..);
                    s
                }
                Step::NotR(a, n) => {
                    let mut s = i.top(*n).into_owned();
                    s.difference_with(&out[*a]);
                    s
                }
                Step::And(a, b) => {
                    let mut s = out[*a].clone();
                    s.intersect_with(&out[*b]);
                    s
                }
                Step::Exists(r, pos, n) => exists(&out[*r], *pos, *n, k),
                Step::Select(c, pos, n) => select(&i.top(*n), *pos, *n, k, &out[*c]),
                Step::Tuple(os) => tuple_nominal(i, os)?,
            };
            out.push(s);
        }
        Ok(out)
    }

    /// Whether all axioms hold, given the output of [`ClosurePlan::evaluate`].
    pub fn satisfied(&self, ext: &[FixedBitSet]) -> bool {
        self.axioms.iter().all(|(l, r)| ext[*l].is_subset(&ext[*r]))
    }
}
