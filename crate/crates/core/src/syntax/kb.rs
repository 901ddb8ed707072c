use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{Cursor, Tok};
use super::ParseError;
use crate::dl::{Axiom, Concept, DlKb, Role};

const RESERVED: &[&str] = &[
    "top1", "top", "not", "and", "some", "sel", "one", "tuple", "concept", "role", "nominal",
];

/// Expression as read, before names are resolved to concepts or roles.
#[derive(Debug)]
enum Raw {
    Top1,
    TopN(usize),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Some(usize, Box<Raw>),
    Sel(usize, usize, Box<Raw>),
    One(String),
    Tuple(Vec<String>),
    Name(String, usize, usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Sort {
    Concept,
    Role,
}

/// Parses DL statements: `concept A.`, `role P/3.`, `nominal o.` and axioms
/// `E1 <= E2.`. Names not declared as roles are concepts; undeclared concept
/// names are declared implicitly.
pub fn parse_kb(src: &str) -> Result<DlKb, ParseError> {
    let mut cur = Cursor::new(src)?;
    let mut concepts = BTreeSet::new();
    let mut roles = BTreeMap::new();
    let mut nominals = BTreeSet::new();
    let mut raw_axioms = Vec::new();
    while !cur.at_eof() {
        let (line, col) = cur.here();
        match (cur.peek().clone(), cur.peek2().clone()) {
            (Tok::Ident(kw), Tok::Ident(_)) if kw == "concept" => {
                cur.next();
                let name = declared_name(&mut cur)?;
                cur.expect(Tok::Dot)?;
                concepts.insert(name);
            }
            (Tok::Ident(kw), Tok::Ident(_)) if kw == "role" => {
                cur.next();
                let name = declared_name(&mut cur)?;
                cur.expect(Tok::Slash)?;
                let n = cur.number()?;
                cur.expect(Tok::Dot)?;
                if let Some(prev) = roles.insert(name.clone(), n) {
                    if prev != n {
                        return Err(ParseError::new(
                            line,
                            col,
                            format!("role `{name}` redeclared with arity {n} (was {prev})"),
                            vec![],
                        ));
                    }
                }
            }
            (Tok::Ident(kw), Tok::Ident(_)) if kw == "nominal" => {
                cur.next();
                let name = cur.ident("constant")?;
                cur.expect(Tok::Dot)?;
                nominals.insert(name);
            }
            _ => {
                let lhs = expr(&mut cur)?;
                cur.expect(Tok::Le)?;
                let rhs = expr(&mut cur)?;
                if !cur.eat(&Tok::Dot) {
                    return Err(cur.unexpected(&["`.`"]));
                }
                raw_axioms.push((line, col, lhs, rhs));
            }
        }
    }

    let mut typer = Typer {
        roles: &roles,
        concepts: &mut concepts,
    };
    let mut axioms = Vec::new();
    for (line, col, lhs, rhs) in raw_axioms {
        let (ls, rs) = (typer.sort(&lhs)?, typer.sort(&rhs)?);
        if ls != rs {
            return Err(ParseError::new(line, col, "axiom relates a concept to a role", vec![]));
        }
        axioms.push(match ls {
            Sort::Concept => Axiom::Concept(typer.concept(lhs)?, typer.concept(rhs)?),
            Sort::Role => Axiom::Role(typer.role(lhs)?, typer.role(rhs)?),
        });
    }
    let mut kb = DlKb {
        axioms,
        concepts,
        roles,
        nominals,
        n_max: None,
    };
    kb.declare_mentioned();
    Ok(kb)
}

/// Parses a single concept expression against a KB's declarations.
pub fn parse_concept(src: &str, kb: &DlKb) -> Result<Concept, ParseError> {
    let mut cur = Cursor::new(src)?;
    let raw = expr(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.unexpected(&["end of input"]));
    }
    let mut concepts = kb.concepts.clone();
    let mut typer = Typer {
        roles: &kb.roles,
        concepts: &mut concepts,
    };
    match typer.sort(&raw)? {
        Sort::Concept => typer.concept(raw),
        Sort::Role => Err(ParseError::new(
            1,
            1,
            "expected a concept expression, found a role",
            vec![],
        )),
    }
}

fn declared_name(cur: &mut Cursor) -> Result<String, ParseError> {
    let (l, c) = cur.here();
    let name = cur.ident("name")?;
    if RESERVED.contains(&name.as_str()) {
        return Err(ParseError::new(l, c, format!("`{name}` is reserved"), vec![]));
    }
    Ok(name)
}

fn expr(cur: &mut Cursor) -> Result<Raw, ParseError> {
    let (line, col) = cur.here();
    let word = cur.ident("expression")?;
    let raw = match word.as_str() {
        "top1" => Raw::Top1,
        "top" => {
            cur.expect(Tok::Slash)?;
            Raw::TopN(cur.number()?)
        }
        "not" => {
            cur.expect(Tok::LParen)?;
            let e = expr(cur)?;
            cur.expect(Tok::RParen)?;
            Raw::Not(Box::new(e))
        }
        "and" => {
            cur.expect(Tok::LParen)?;
            let a = expr(cur)?;
            cur.expect(Tok::Comma)?;
            let b = expr(cur)?;
            cur.expect(Tok::RParen)?;
            Raw::And(Box::new(a), Box::new(b))
        }
        "some" => {
            cur.expect(Tok::LParen)?;
            let i = cur.number()?;
            cur.expect(Tok::Comma)?;
            let r = expr(cur)?;
            cur.expect(Tok::RParen)?;
            Raw::Some(i, Box::new(r))
        }
        "sel" => {
            cur.expect(Tok::LParen)?;
            let i = cur.number()?;
            cur.expect(Tok::Slash)?;
            let n = cur.number()?;
            cur.expect(Tok::Comma)?;
            let c = expr(cur)?;
            cur.expect(Tok::RParen)?;
            Raw::Sel(i, n, Box::new(c))
        }
        "one" => {
            cur.expect(Tok::LParen)?;
            let o = cur.ident("constant")?;
            cur.expect(Tok::RParen)?;
            Raw::One(o)
        }
        "tuple" => {
            cur.expect(Tok::LParen)?;
            let mut os = vec![cur.ident("constant")?];
            while cur.eat(&Tok::Comma) {
                os.push(cur.ident("constant")?);
            }
            cur.expect(Tok::RParen)?;
            Raw::Tuple(os)
        }
        _ if word.chars().all(|c| c.is_ascii_digit()) => {
            return Err(ParseError::new(
                line,
                col,
                format!("unexpected number `{word}`"),
                vec![],
            ));
        }
        _ => Raw::Name(word, line, col),
    };
    Ok(raw)
}

struct Typer<'a> {
    roles: &'a BTreeMap<String, usize>,
    concepts: &'a mut BTreeSet<String>,
}

impl Typer<'_> {
    fn sort(&self, raw: &Raw) -> Result<Sort, ParseError> {
        Ok(match raw {
            Raw::Top1 | Raw::Some(..) | Raw::One(_) => Sort::Concept,
            Raw::TopN(_) | Raw::Sel(..) | Raw::Tuple(_) => Sort::Role,
            Raw::Not(e) => self.sort(e)?,
            Raw::And(a, _) => self.sort(a)?,
            Raw::Name(n, ..) if self.roles.contains_key(n) => Sort::Role,
            Raw::Name(..) => Sort::Concept,
        })
    }

    fn concept(&mut self, raw: Raw) -> Result<Concept, ParseError> {
        Ok(match raw {
            Raw::Top1 => Concept::Top,
            Raw::Name(n, line, col) => {
                if self.roles.contains_key(&n) {
                    return Err(ParseError::new(
                        line,
                        col,
                        format!("role `{n}` used as a concept"),
                        vec![],
                    ));
                }
                self.concepts.insert(n.clone());
                Concept::Name(n)
            }
            Raw::Not(e) => Concept::not(self.concept(*e)?),
            Raw::And(a, b) => Concept::and(self.concept(*a)?, self.concept(*b)?),
            Raw::Some(i, r) => Concept::exists(i, self.role(*r)?),
            Raw::One(o) => Concept::Nominal(o),
            other => {
                return Err(ParseError::new(
                    1,
                    1,
                    format!("role expression where a concept is expected: {other:?}"),
                    vec![],
                ))
            }
        })
    }

    fn role(&mut self, raw: Raw) -> Result<Role, ParseError> {
        Ok(match raw {
            Raw::TopN(n) => Role::Top(n),
            Raw::Name(n, line, col) => match self.roles.get(&n) {
                Some(k) => Role::Name(n, *k),
                None => {
                    return Err(ParseError::new(
                        line,
                        col,
                        format!("`{n}` is used as a role but not declared (add `role {n}/N.`)"),
                        vec![],
                    ))
                }
            },
            Raw::Not(e) => Role::not(self.role(*e)?),
            Raw::And(a, b) => Role::and(self.role(*a)?, self.role(*b)?),
            Raw::Sel(i, n, c) => Role::select(i, n, self.concept(*c)?),
            Raw::Tuple(os) => Role::Tuple(os),
            other => {
                return Err(ParseError::new(
                    1,
                    1,
                    format!("concept expression where a role is expected: {other:?}"),
                    vec![],
                ))
            }
        })
    }
}
