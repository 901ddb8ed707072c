use std::collections::BTreeSet;

use crate::dl::{closure_with, Axiom, Concept, DlKb, Expr, Role};
use crate::error::{Error, Result};
use crate::logic::{Atom, Literal, Program, Rule, Term};

fn vars(n: usize) -> Vec<Term> {
    if n == 1 {
        vec![Term::var("X")]
    } else {
        (1..=n).map(|i| Term::var(format!("X{i}"))).collect()
    }
}

fn atom(e: &Expr, args: Vec<Term>) -> Atom {
    Atom::new(e.predicate(), args)
}

fn top(n: usize) -> Expr {
    if n == 1 {
        Expr::Concept(Concept::Top)
    } else {
        Expr::Role(Role::Top(n))
    }
}

fn pos(e: &Expr, args: Vec<Term>) -> Literal {
    Literal::pos(atom(e, args))
}

fn naf(e: &Expr, args: Vec<Term>) -> Literal {
    Literal::naf(atom(e, args))
}

fn x_eq_x() -> Literal {
    Literal::pos(Atom::eq(Term::var("X"), Term::var("X")))
}

/// Rules defining one closure expression.
fn element_rules(e: &Expr, out: &mut Vec<Rule>) -> Result<()> {
    let n = e.arity();
    let xs = vars(n);
    let head = |args: Vec<Term>| [pos(e, args)];
    match e {
        Expr::Concept(Concept::Top) => {
            out.push(Rule::free(atom(e, xs.clone())));
            out.push(Rule::constraint([naf(e, xs), x_eq_x()]));
        }
        Expr::Role(Role::Top(_)) => out.push(Rule::free(atom(e, xs))),
        Expr::Concept(Concept::Name(_)) => out.push(Rule::free(atom(e, xs))),
        Expr::Role(Role::Name(..)) => {
            out.push(Rule::free(atom(e, xs.clone())));
            out.push(Rule::constraint([pos(e, xs.clone()), naf(&top(n), xs)]));
        }
        Expr::Concept(Concept::Nominal(o)) => out.push(Rule::fact(atom(e, vec![Term::constant(o.clone())]))),
        Expr::Concept(Concept::Not(c)) => {
            out.push(Rule::new(
                head(xs.clone()),
                [naf(&Expr::Concept((**c).clone()), xs), x_eq_x()],
            ));
        }
        Expr::Role(Role::Not(r)) => {
            out.push(Rule::new(
                head(xs.clone()),
                [pos(&top(n), xs.clone()), naf(&Expr::Role((**r).clone()), xs)],
            ));
        }
        Expr::Concept(Concept::And(a, b)) => out.push(Rule::new(
            head(xs.clone()),
            [
                pos(&Expr::Concept((**a).clone()), xs.clone()),
                pos(&Expr::Concept((**b).clone()), xs),
            ],
        )),
        Expr::Role(Role::And(a, b)) => out.push(Rule::new(
            head(xs.clone()),
            [
                pos(&Expr::Role((**a).clone()), xs.clone()),
                pos(&Expr::Role((**b).clone()), xs),
            ],
        )),
        Expr::Role(Role::Select { pos: i, concept, .. }) => out.push(Rule::new(
            head(xs.clone()),
            [
                pos(&top(n), xs.clone()),
                pos(&Expr::Concept((**concept).clone()), vec![xs[i - 1].clone()]),
            ],
        )),
        Expr::Concept(Concept::Exists(i, r)) => {
            let ys = vars(r.arity());
            out.push(Rule::new(
                [pos(e, vec![ys[i - 1].clone()])],
                [pos(&Expr::Role((**r).clone()), ys)],
            ));
        }
        Expr::Role(Role::Tuple(_)) => return Err(Error::TupleNominal(e.to_string())),
    }
    Ok(())
}

fn axiom_rule(ax: &Axiom) -> Rule {
    let (l, r) = ax.sides();
    let xs = vars(l.arity());
    Rule::constraint([pos(&l, xs.clone()), naf(&r, xs)])
}

/// `Φ(Σ)`: for every closure expression the rules fixing its extension, then
/// one constraint per axiom. Role nominals must be normalized away first.
pub fn translate(kb: &DlKb) -> Result<Program> {
    translate_with(kb, &[])
}

/// [`translate`] over the closure extended with `extra` expressions.
pub fn translate_with(kb: &DlKb, extra: &[Expr]) -> Result<Program> {
    let mut rules = Vec::new();
    for e in closure_with(kb, extra) {
        element_rules(&e, &mut rules)?;
    }
    rules.extend(kb.axioms.iter().map(axiom_rule));
    Ok(Program::new(rules))
}

/// Fails if `program` uses a predicate the translation introduces, other than
/// the KB's own names (which are meant to be shared).
pub fn check_collisions(kb: &DlKb, extra: &[Expr], program: &Program) -> Result<()> {
    let introduced: BTreeSet<String> = closure_with(kb, extra)
        .iter()
        .filter(|e| e.atomic_name().is_none_or(|n| !kb.is_dl_name(n)))
        .map(Expr::predicate)
        .collect();
    for p in program.predicates().keys() {
        if introduced.contains(p) {
            return Err(Error::NameCollision(p.clone()));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranslationSize {
    pub closure: usize,
    pub rules: usize,
    /// Predicate and argument occurrences over all rules.
    pub symbols: usize,
}

pub fn translation_size(kb: &DlKb) -> Result<TranslationSize> {
    let program = translate(kb)?;
    Ok(TranslationSize {
        closure: closure_with(kb, &[]).len(),
        rules: program.len(),
        symbols: program
            .rules
            .iter()
            .flat_map(Rule::atoms)
            .map(|a| 1 + a.args.len())
            .sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::is_guarded_program;
    use crate::syntax::parse_kb;

    const EXAMPLE: &str = "concept socialDrinker. role drinks/3.
        socialDrinker <= some(1, and(drinks, sel(3/3, one(wine)))).";

    #[test]
    fn empty_kb_translates_to_the_top_rules() {
        let p = translate(&DlKb::default()).unwrap();
        assert_eq!(p.to_string(), "{ top1(X) }.\n:- X = X, not top1(X).\n");
    }

    #[test]
    fn worked_example() {
        let kb = parse_kb(EXAMPLE).unwrap();
        let p = translate(&kb).unwrap();
        let text = p.to_string();
        assert!(
            text.contains(":- socialDrinker(X), not \"some(1,and(drinks,sel(3/3,one(wine))))\"(X)."),
            "{text}"
        );
        assert!(text.contains("\"one(wine)\"(wine)."), "{text}");
        assert!(text.contains("{ drinks(X1,X2,X3) }."), "{text}");
        assert!(
            text.contains("\"sel(3/3,one(wine))\"(X1,X2,X3) :- \"one(wine)\"(X3), \"top/3\"(X1,X2,X3)."),
            "{text}"
        );
        assert!(is_guarded_program(&p).guarded);
        let size = translation_size(&kb).unwrap();
        assert_eq!((size.closure, size.rules), (8, 11));
    }

    #[test]
    fn tuple_nominals_must_be_normalized() {
        let kb = parse_kb("role r/2. tuple(a,b) <= r.").unwrap();
        assert!(matches!(translate(&kb), Err(Error::TupleNominal(_))));
        assert!(translate(&crate::dl::normalize_kb(&kb)).is_ok());
    }

    #[test]
    fn collisions_are_reported() {
        let kb = parse_kb("A <= not(B).").unwrap();
        let ok = crate::syntax::parse_program("q(X) :- A(X).").unwrap();
        check_collisions(&kb, &[], &ok).unwrap();
        let bad = crate::syntax::parse_program("top1(a).").unwrap();
        assert!(matches!(check_collisions(&kb, &[], &bad), Err(Error::NameCollision(_))));
    }

    #[test]
    fn renamed_copy_doubles_the_non_top_rules() {
        let one = parse_kb("role r/2. A <= some(1, and(r, sel(2/2, not(B)))).").unwrap();
        let two = parse_kb(
            "role r/2. role s/2. A <= some(1, and(r, sel(2/2, not(B)))). C <= some(1, and(s, sel(2/2, not(D)))).",
        )
        .unwrap();
        let non_top = |kb: &DlKb| {
            translate(kb)
                .unwrap()
                .rules
                .iter()
                .filter(|r| {
                    r.head()
                        .iter()
                        .all(|l| !l.atom.pred.name().unwrap_or("").starts_with("top"))
                })
                .filter(|r| {
                    !(r.is_constraint()
                        && r.body()
                            .iter()
                            .all(|l| l.atom.pred.name().is_none_or(|p| p.starts_with("top"))))
                })
                .count()
        };
        assert_eq!(non_top(&two), 2 * non_top(&one));
    }
}
