use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::logic::{Atom, Elem, PreInterpretation, Predicate, Program, Term};

/// A ground regular atom over interned predicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub pred: u32,
    pub args: Vec<Elem>,
}

/// A ground rule over atom ids. Equality literals are already evaluated away:
/// rules made vacuous by them are dropped, true ones are removed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GRule {
    pub head: Option<u32>,
    pub head_neg: Vec<u32>,
    pub pos: Vec<u32>,
    pub neg: Vec<u32>,
}

/// Indexed ground program used by the search.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    preds: Vec<String>,
    pred_index: HashMap<String, u32>,
    atoms: Vec<GroundAtom>,
    atom_index: HashMap<GroundAtom, u32>,
    pub rules: Vec<GRule>,
}

enum Arg {
    Var(usize),
    Fixed(Elem),
}

struct LitPlan {
    negated: bool,
    pred: Option<u32>,
    args: Vec<Arg>,
}

impl GroundProgram {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, id: u32) -> &GroundAtom {
        &self.atoms[id as usize]
    }

    pub fn pred_name(&self, pred: u32) -> &str {
        &self.preds[pred as usize]
    }

    pub fn pred_id(&self, name: &str) -> Option<u32> {
        self.pred_index.get(name).copied()
    }

    pub fn lookup(&self, atom: &Atom) -> Option<u32> {
        let pred = self.pred_id(atom.pred.name()?)?;
        let args = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Elem(e) => Some(*e),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        self.atom_index.get(&GroundAtom { pred, args }).copied()
    }

    pub fn to_atom(&self, id: u32) -> Atom {
        let a = self.atom(id);
        Atom::new(self.pred_name(a.pred), a.args.iter().map(|e| Term::Elem(*e)).collect())
    }

    fn intern_pred(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.pred_index.get(name) {
            return id;
        }
        let id = self.preds.len() as u32;
        self.preds.push(name.to_owned());
        self.pred_index.insert(name.to_owned(), id);
        id
    }

    fn intern_atom(&mut self, atom: GroundAtom) -> u32 {
        if let Some(&id) = self.atom_index.get(&atom) {
            return id;
        }
        let id = self.atoms.len() as u32;
        self.atoms.push(atom.clone());
        self.atom_index.insert(atom, id);
        id
    }

    /// Indexes an already ground program (terms must be domain elements).
    pub fn from_program(program: &Program) -> Result<Self> {
        let mut gp = GroundProgram::default();
        for rule in &program.rules {
            let mut ids = Vec::new();
            for lit in rule.literals() {
                let args = lit
                    .atom
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Elem(e) => Ok(*e),
                        other => Err(Error::Invalid(format!("non-ground term `{other}` in ground program"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                ids.push(match &lit.atom.pred {
                    Predicate::Eq => Err(args[0] == args[1]),
                    Predicate::Named(n) => {
                        let pred = gp.intern_pred(n);
                        Ok(gp.intern_atom(GroundAtom { pred, args }))
                    }
                });
            }
            let head_len = rule.head().len();
            let lits: Vec<(bool, bool, std::result::Result<u32, bool>)> = rule
                .literals()
                .zip(ids)
                .enumerate()
                .map(|(i, (l, id))| (i < head_len, l.negated, id))
                .collect();
            if let Some(r) = assemble(&lits) {
                gp.rules.push(r);
            }
        }
        Ok(gp)
    }

    /// Grounds `program` over `pre` straight into indexed form. Produces the
    /// same rules as [`crate::logic::ground`] followed by
    /// [`GroundProgram::from_program`], minus the intermediate syntax.
    pub fn ground(program: &Program, pre: &PreInterpretation) -> Result<Self> {
        let mut gp = GroundProgram::default();
        let k = pre.domain.len() as u32;
        for rule in &program.rules {
            let vars = rule.vars();
            let head_len = rule.head().len();
            let plans = rule
                .literals()
                .map(|l| {
                    let args = l
                        .atom
                        .args
                        .iter()
                        .map(|t| match t {
                            Term::Var(v) => Ok(Arg::Var(vars.iter().position(|x| x == v).expect("variable of rule"))),
                            Term::Const(c) => pre.map(c).map(Arg::Fixed),
                            Term::Elem(e) => Ok(Arg::Fixed(*e)),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(LitPlan {
                        negated: l.negated,
                        pred: l.atom.pred.name().map(|n| gp.intern_pred(n)),
                        args,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut digits = vec![0u32; vars.len()];
            let mut lits = Vec::with_capacity(plans.len());
            loop {
                lits.clear();
                for (i, plan) in plans.iter().enumerate() {
                    let args: Vec<Elem> = plan
                        .args
                        .iter()
                        .map(|a| match a {
                            Arg::Var(v) => Elem(digits[*v]),
                            Arg::Fixed(e) => *e,
                        })
                        .collect();
                    let id = match plan.pred {
                        None => Err(args[0] == args[1]),
                        Some(pred) => Ok(gp.intern_atom(GroundAtom { pred, args })),
                    };
                    lits.push((i < head_len, plan.negated, id));
                }
                if let Some(r) = assemble(&lits) {
                    gp.rules.push(r);
                }
                if !crate::logic::ground_advance(&mut digits, k) {
                    break;
                }
            }
        }
        Ok(gp)
    }

    /// Answer-set test on a full assignment indexed by atom id.
    pub fn is_answer_set(&self, assignment: &[bool]) -> bool {
        is_answer_set_rules(&self.rules, assignment)
    }

    /// Rules of the projection: DL atoms (those with `Some` truth value) are
    /// evaluated, settling or deleting rules, and stripped from the rest.
    pub fn project(&self, dl_truth: &[Option<bool>]) -> Vec<GRule> {
        let mut out = Vec::with_capacity(self.rules.len());
        'rules: for r in &self.rules {
            let truth = |a: &u32| dl_truth[*a as usize];
            if let Some(true) = r.head.as_ref().and_then(truth) {
                continue;
            }
            if r.head_neg.iter().any(|a| truth(a) == Some(false)) {
                continue;
            }
            for a in &r.pos {
                if truth(a) == Some(false) {
                    continue 'rules;
                }
            }
            for a in &r.neg {
                if truth(a) == Some(true) {
                    continue 'rules;
                }
            }
            let keep = |v: &Vec<u32>| v.iter().copied().filter(|a| truth(a).is_none()).collect::<Vec<_>>();
            out.push(GRule {
                head: r.head.filter(|a| truth(a).is_none()),
                head_neg: keep(&r.head_neg),
                pos: keep(&r.pos),
                neg: keep(&r.neg),
            });
        }
        out
    }
}

/// Builds a rule from `(in_head, negated, atom-or-equality-truth)` literals;
/// `None` when an equality literal makes the rule vacuous.
fn assemble(lits: &[(bool, bool, std::result::Result<u32, bool>)]) -> Option<GRule> {
    let mut r = GRule::default();
    for &(in_head, negated, id) in lits {
        match (in_head, negated, id) {
            (true, false, Ok(a)) => r.head = Some(a),
            (true, true, Ok(a)) => r.head_neg.push(a),
            (false, false, Ok(a)) => r.pos.push(a),
            (false, true, Ok(a)) => r.neg.push(a),
            // `not t=s` in the head: the reduct needs t=s, the rule is
            // satisfied whenever t≠s. Either way the literal decides.
            (true, true, Err(equal)) => {
                if !equal {
                    return None;
                }
            }
            // Positive equality heads are rejected by validation.
            (true, false, Err(_)) => return None,
            (false, negated, Err(equal)) => {
                if equal == negated {
                    return None;
                }
            }
        }
    }
    Some(r)
}

/// `I` is an answer set iff it equals the least fixpoint of the reduct and
/// that fixpoint violates no reduct constraint.
pub fn is_answer_set_rules(rules: &[GRule], assignment: &[bool]) -> bool {
    let n = assignment.len();
    let mut derived = vec![false; n];
    let mut pending: Vec<usize> = Vec::new();
    let mut waiting: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue: Vec<u32> = Vec::new();
    let mut constraints = Vec::new();
    for (ri, r) in rules.iter().enumerate() {
        pending.push(0);
        if r.neg.iter().any(|a| assignment[*a as usize]) || r.head_neg.iter().any(|a| !assignment[*a as usize]) {
            continue;
        }
        if r.head.is_none() {
            constraints.push(ri);
        }
        let mut count = 0;
        for a in &r.pos {
            waiting[*a as usize].push(ri);
            count += 1;
        }
        pending[ri] = count;
        if count == 0 {
            match r.head {
                Some(h) if !derived[h as usize] => {
                    derived[h as usize] = true;
                    queue.push(h);
                }
                Some(_) => {}
                None => return false,
            }
        }
    }
    while let Some(a) = queue.pop() {
        if !assignment[a as usize] {
            return false;
        }
        for &ri in &waiting[a as usize] {
            pending[ri] -= 1;
            if pending[ri] == 0 {
                match rules[ri].head {
                    Some(h) if !derived[h as usize] => {
                        derived[h as usize] = true;
                        queue.push(h);
                    }
                    Some(_) => {}
                    None => return false,
                }
            }
        }
    }
    // Duplicated body atoms would double-count; rules are built from sets.
    debug_assert!(constraints.iter().all(|&ri| pending[ri] > 0));
    derived == assignment
}

const UNKNOWN: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

/// Enumerates answer sets of a ground rule set by branching on atoms with
/// clause propagation (every answer set is a model) and support propagation
/// (every true atom needs an applicable rule). Each total assignment is then
/// checked with [`is_answer_set_rules`], so unfounded loops are rejected.
pub struct Solver<'a> {
    rules: &'a [GRule],
    occ: Vec<Vec<u32>>,
    heads: Vec<Vec<u32>>,
    filters: Vec<Vec<(u32, bool)>>,
    filter_occ: Vec<Vec<u32>>,
    val: Vec<i8>,
    trail: Vec<u32>,
    queue: Vec<u32>,
}

impl<'a> Solver<'a> {
    pub fn new(num_atoms: usize, rules: &'a [GRule]) -> Self {
        let mut occ = vec![Vec::new(); num_atoms];
        let mut heads = vec![Vec::new(); num_atoms];
        for (ri, r) in rules.iter().enumerate() {
            let ri = ri as u32;
            for a in r.head.iter().chain(&r.head_neg).chain(&r.pos).chain(&r.neg) {
                let o = &mut occ[*a as usize];
                if o.last() != Some(&ri) {
                    o.push(ri);
                }
            }
            if let Some(h) = r.head {
                heads[h as usize].push(ri);
            }
        }
        Solver {
            rules,
            occ,
            heads,
            filters: Vec::new(),
            filter_occ: vec![Vec::new(); num_atoms],
            val: vec![UNKNOWN; num_atoms],
            trail: Vec::new(),
            queue: Vec::new(),
        }
    }

    /// Restricts the enumeration to assignments satisfying a clause over
    /// `(atom, polarity)` literals. Filters do not take part in the reduct.
    pub fn add_filter(&mut self, clause: Vec<(u32, bool)>) {
        let fi = self.filters.len() as u32;
        for (a, _) in &clause {
            self.filter_occ[*a as usize].push(fi);
        }
        self.filters.push(clause);
    }

    /// Calls `visit` with every answer set as an assignment by atom id.
    pub fn for_each(&mut self, mut visit: impl FnMut(&[bool]) -> ControlFlow<()>) {
        self.val.iter_mut().for_each(|v| *v = UNKNOWN);
        self.trail.clear();
        if !self.propagate_all() {
            return;
        }
        let _ = self.search(&mut visit);
    }

    pub fn first(&mut self) -> Option<Vec<bool>> {
        let mut found = None;
        self.for_each(|m| {
            found = Some(m.to_vec());
            ControlFlow::Break(())
        });
        found
    }

    fn search(&mut self, visit: &mut impl FnMut(&[bool]) -> ControlFlow<()>) -> ControlFlow<()> {
        let Some(next) = self.val.iter().position(|v| *v == UNKNOWN) else {
            let assignment: Vec<bool> = self.val.iter().map(|v| *v == TRUE).collect();
            if is_answer_set_rules(self.rules, &assignment) {
                return visit(&assignment);
            }
            return ControlFlow::Continue(());
        };
        for value in [FALSE, TRUE] {
            let mark = self.trail.len();
            if self.assign(next as u32, value) && self.propagate() {
                self.search(visit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let a = self.trail.pop().unwrap();
            self.val[a as usize] = UNKNOWN;
        }
        self.queue.clear();
    }

    fn assign(&mut self, atom: u32, value: i8) -> bool {
        match self.val[atom as usize] {
            UNKNOWN => {
                self.val[atom as usize] = value;
                self.trail.push(atom);
                self.queue.push(atom);
                true
            }
            v => v == value,
        }
    }

    fn propagate_all(&mut self) -> bool {
        for ri in 0..self.rules.len() {
            if !self.check_clause(ri) {
                return false;
            }
        }
        for fi in 0..self.filters.len() {
            if !self.check_filter(fi) {
                return false;
            }
        }
        for a in 0..self.val.len() {
            if !self.check_support(a as u32) {
                return false;
            }
        }
        self.propagate()
    }

    fn propagate(&mut self) -> bool {
        while let Some(a) = self.queue.pop() {
            for i in 0..self.occ[a as usize].len() {
                let ri = self.occ[a as usize][i] as usize;
                if !self.check_clause(ri) {
                    self.queue.clear();
                    return false;
                }
                if let Some(h) = self.rules[ri].head {
                    if !self.check_support(h) {
                        self.queue.clear();
                        return false;
                    }
                }
            }
            for i in 0..self.filter_occ[a as usize].len() {
                let fi = self.filter_occ[a as usize][i] as usize;
                if !self.check_filter(fi) {
                    self.queue.clear();
                    return false;
                }
            }
            if !self.check_support(a) {
                self.queue.clear();
                return false;
            }
        }
        true
    }

    /// The rule read as a clause: head ∨ ¬head_neg ∨ ¬pos ∨ neg.
    fn check_clause(&mut self, ri: usize) -> bool {
        let r = &self.rules[ri];
        let lits = r
            .head
            .iter()
            .map(|a| (*a, true))
            .chain(r.head_neg.iter().map(|a| (*a, false)))
            .chain(r.pos.iter().map(|a| (*a, false)))
            .chain(r.neg.iter().map(|a| (*a, true)));
        let mut unknown = None;
        let mut unknowns = 0;
        for (a, sign) in lits {
            match self.val[a as usize] {
                UNKNOWN => {
                    unknowns += 1;
                    unknown = Some((a, sign));
                }
                v if (v == TRUE) == sign => return true,
                _ => {}
            }
        }
        match (unknowns, unknown) {
            (0, _) => false,
            (1, Some((a, sign))) => self.assign(a, if sign { TRUE } else { FALSE }),
            _ => true,
        }
    }

    fn check_filter(&mut self, fi: usize) -> bool {
        let mut unknown = None;
        let mut unknowns = 0;
        for &(a, sign) in &self.filters[fi] {
            match self.val[a as usize] {
                UNKNOWN => {
                    unknowns += 1;
                    unknown = Some((a, sign));
                }
                v if (v == TRUE) == sign => return true,
                _ => {}
            }
        }
        match (unknowns, unknown) {
            (0, _) => false,
            (1, Some((a, sign))) => self.assign(a, if sign { TRUE } else { FALSE }),
            _ => true,
        }
    }

    fn applicable(&self, ri: u32) -> bool {
        let r = &self.rules[ri as usize];
        r.pos.iter().all(|a| self.val[*a as usize] != FALSE)
            && r.neg.iter().all(|a| self.val[*a as usize] != TRUE)
            && r.head_neg.iter().all(|a| self.val[*a as usize] != FALSE)
    }

    /// A true atom needs a rule that can still derive it in the reduct.
    fn check_support(&mut self, atom: u32) -> bool {
        let v = self.val[atom as usize];
        if v == FALSE {
            return true;
        }
        let mut alive = None;
        let mut count = 0;
        for &ri in &self.heads[atom as usize] {
            if self.applicable(ri) {
                count += 1;
                alive = Some(ri);
                if count > 1 {
                    return true;
                }
            }
        }
        match (count, v) {
            (0, TRUE) => false,
            (0, _) => self.assign(atom, FALSE),
            (1, TRUE) => {
                let r = &self.rules[alive.unwrap() as usize];
                let forced: Vec<(u32, i8)> = r
                    .pos
                    .iter()
                    .map(|a| (*a, TRUE))
                    .chain(r.neg.iter().map(|a| (*a, FALSE)))
                    .chain(r.head_neg.iter().map(|a| (*a, TRUE)))
                    .collect();
                forced.into_iter().all(|(a, value)| self.assign(a, value))
            }
            _ => true,
        }
    }
}
