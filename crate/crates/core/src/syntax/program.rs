use super::lexer::{Cursor, Tok};
use super::ParseError;
use crate::logic::{materialize_unary_guard, Atom, Literal, Program, Rule, Term};

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut cur = Cursor::new(src)?;
    let mut rules = Vec::new();
    while !cur.at_eof() {
        rules.push(statement(&mut cur)?);
    }
    Ok(Program::new(rules))
}

/// Parses exactly one statement.
pub fn parse_rule(src: &str) -> Result<Rule, ParseError> {
    let mut cur = Cursor::new(src)?;
    let r = statement(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.unexpected(&["end of input"]));
    }
    Ok(r)
}

fn statement(cur: &mut Cursor) -> Result<Rule, ParseError> {
    if cur.eat(&Tok::LBrace) {
        let a = atom(cur)?;
        cur.expect(Tok::RBrace)?;
        cur.expect(Tok::Dot)?;
        return Ok(Rule::free(a));
    }
    let mut head = Vec::new();
    if *cur.peek() != Tok::If {
        head.push(literal(cur)?);
        while cur.eat(&Tok::Pipe) {
            head.push(literal(cur)?);
        }
    }
    let mut body = Vec::new();
    if cur.eat(&Tok::If) {
        body.push(literal(cur)?);
        while cur.eat(&Tok::Comma) {
            body.push(literal(cur)?);
        }
    }
    if !cur.eat(&Tok::Dot) {
        let expected: &[&str] = if body.is_empty() {
            &["`|`", "`:-`", "`.`"]
        } else {
            &["`,`", "`.`"]
        };
        return Err(cur.unexpected(expected));
    }
    Ok(materialize_unary_guard(Rule::new(head, body)))
}

fn literal(cur: &mut Cursor) -> Result<Literal, ParseError> {
    if matches!(cur.peek(), Tok::Ident(s) if s == "not") && !matches!(cur.peek2(), Tok::LParen | Tok::Eq | Tok::Neq) {
        cur.next();
        return match operand(cur)? {
            Operand::Atom(a) => Ok(Literal::naf(a)),
            Operand::Term(t) => {
                cur.expect(Tok::Eq)?;
                Ok(Literal::naf(Atom::eq(t, term(cur)?)))
            }
        };
    }
    match operand(cur)? {
        Operand::Atom(a) => Ok(Literal::pos(a)),
        Operand::Term(t) => {
            if cur.eat(&Tok::Eq) {
                Ok(Literal::pos(Atom::eq(t, term(cur)?)))
            } else if cur.eat(&Tok::Neq) {
                Ok(Literal::naf(Atom::eq(t, term(cur)?)))
            } else {
                Err(cur.unexpected(&["`=`", "`!=`"]))
            }
        }
    }
}

enum Operand {
    Atom(Atom),
    Term(Term),
}

fn operand(cur: &mut Cursor) -> Result<Operand, ParseError> {
    match (cur.peek().clone(), cur.peek2().clone()) {
        (Tok::Quoted(_), _) | (Tok::Ident(_), Tok::LParen) => atom(cur).map(Operand::Atom),
        (Tok::Ident(_), Tok::Eq | Tok::Neq) => term(cur).map(Operand::Term),
        (Tok::Ident(s), _) if starts_lower(&s) => atom(cur).map(Operand::Atom),
        (Tok::Ident(s), _) => Err(cur.error(format!("variable `{s}` cannot stand alone as a literal"))),
        _ => Err(cur.unexpected(&["atom", "term"])),
    }
}

fn starts_lower(s: &str) -> bool {
    s.chars()
        .next()
        .is_some_and(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

pub(crate) fn atom(cur: &mut Cursor) -> Result<Atom, ParseError> {
    let name = match cur.next() {
        Tok::Ident(s) | Tok::Quoted(s) => s,
        _ => return Err(cur.unexpected(&["predicate"])),
    };
    let mut args = Vec::new();
    if cur.eat(&Tok::LParen) {
        args.push(term(cur)?);
        while cur.eat(&Tok::Comma) {
            args.push(term(cur)?);
        }
        cur.expect(Tok::RParen)?;
    }
    Ok(Atom::new(name, args))
}

fn term(cur: &mut Cursor) -> Result<Term, ParseError> {
    let s = cur.ident("term")?;
    if starts_lower(&s) {
        Ok(Term::Const(s))
    } else if s.starts_with(|c: char| c.is_ascii_uppercase() || c == '_') {
        Ok(Term::Var(s))
    } else {
        Err(cur.error(format!("invalid term `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guarded_rule() {
        let r = parse_rule("a(X,Y) :- g(X,Y), not f(X,Y).").unwrap();
        assert_eq!(r.head().len(), 1);
        assert_eq!(r.body_pos().count(), 1);
        assert_eq!(r.body_neg().count(), 1);
        assert_eq!(r.to_string(), "a(X,Y) :- g(X,Y), not f(X,Y).");
    }

    #[test]
    fn free_rule_sugar() {
        let r = parse_rule("{ q(X,Y) }.").unwrap();
        let a = Atom::new("q", vec![Term::var("X"), Term::var("Y")]);
        assert_eq!(r, Rule::free(a));
        assert_eq!(r.to_string(), "{ q(X,Y) }.");
    }

    #[test]
    fn disjunctive_naf_head() {
        let r = parse_rule("a | not a.").unwrap();
        assert_eq!(r.head().len(), 2);
        assert!(r.body().is_empty());
    }

    #[test]
    fn equality_literals() {
        let r = parse_rule(":- p(X), p(Y), X = Y.").unwrap();
        assert_eq!(r.body().iter().filter(|l| l.atom.is_equality()).count(), 1);
        let r = parse_rule("q(X,Y) :- r(X,Y), X != Y.").unwrap();
        assert!(r.body().iter().any(|l| l.negated && l.atom.is_equality()));
        assert_eq!(r.to_string(), "q(X,Y) :- r(X,Y), X != Y.");
    }

    #[test]
    fn quoted_predicates() {
        let r = parse_rule("\"some(1,r)\"(X) :- r(X,Y).").unwrap();
        assert_eq!(r.head()[0].atom.pred.name(), Some("some(1,r)"));
        assert_eq!(r.to_string(), "\"some(1,r)\"(X) :- r(X,Y).");
    }

    #[test]
    fn comments_and_constraints() {
        let p = parse_program("% nothing here\n:- d(X). % trailing\nq(a).").unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.rules[0].is_constraint());
    }

    #[test]
    fn errors_carry_position_and_expectations() {
        let e = parse_program("p(a).\nq(X) :- p(X) r(X).").unwrap_err();
        assert_eq!((e.line, e.col), (2, 14));
        assert!(e.expected.iter().any(|s| s == "`.`"), "{e}");
        assert!(parse_program("p(a)").is_err());
        assert!(parse_program(":- .").is_err());
        assert!(parse_program("X.").is_err());
    }

    #[test]
    fn uppercase_predicates() {
        let r = parse_rule("FraternityMember(john).").unwrap();
        assert_eq!(r.head()[0].atom.args, vec![Term::constant("john")]);
    }
}
