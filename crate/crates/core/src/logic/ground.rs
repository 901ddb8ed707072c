use std::collections::HashMap;

use super::{Atom, Elem, Literal, PreInterpretation, Program, Rule, Term};
use crate::error::Result;

/// Number of rule instances `ground` produces: `Σ_r |D|^|vars(r)|`.
pub fn grounding_size(program: &Program, domain_size: usize) -> u128 {
    program
        .rules
        .iter()
        .map(|r| (domain_size as u128).saturating_pow(r.vars().len() as u32))
        .fold(0u128, u128::saturating_add)
}

/// Substitutes every variable by every domain element in all combinations and
/// every constant `c` by `σ(c)`. Equality atoms are kept as they are; they are
/// interpreted at satisfaction time.
pub fn ground(program: &Program, pre: &PreInterpretation) -> Result<Program> {
    let k = pre.domain.len();
    let mut rules = Vec::new();
    for rule in &program.rules {
        let vars = rule.vars();
        let mut binding: HashMap<&str, Elem> = HashMap::new();
        // Mixed-radix counter over |D|^|vars| assignments, first variable most significant.
        let mut digits = vec![0u32; vars.len()];
        loop {
            for (v, d) in vars.iter().zip(&digits) {
                binding.insert(v, Elem(*d));
            }
            rules.push(instantiate(rule, &binding, pre)?);
            if !advance(&mut digits, k as u32) {
                break;
            }
        }
    }
    Ok(Program { rules })
}

/// Increments a little-endian-from-the-right counter; false on wrap-around.
pub(crate) fn advance(digits: &mut [u32], radix: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn instantiate(rule: &Rule, binding: &HashMap<&str, Elem>, pre: &PreInterpretation) -> Result<Rule> {
    let lit = |l: &Literal| -> Result<Literal> {
        let args = l
            .atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Ok(Term::Elem(binding[v.as_str()])),
                Term::Const(c) => pre.map(c).map(Term::Elem),
                Term::Elem(e) => Ok(Term::Elem(*e)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Literal {
            negated: l.negated,
            atom: Atom {
                pred: l.atom.pred.clone(),
                args,
            },
        })
    };
    let head = rule.head().iter().map(lit).collect::<Result<Vec<_>>>()?;
    let body = rule.body().iter().map(lit).collect::<Result<Vec<_>>>()?;
    Ok(Rule::new(head, body))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::error::Error;
    use crate::logic::Domain;
    use crate::syntax::parse_program;

    fn pre(names: &[&str], sigma: &[(&str, u32)]) -> PreInterpretation {
        PreInterpretation::new(
            Domain::named(names.iter().map(|s| s.to_string()).collect()).unwrap(),
            sigma.iter().map(|(c, e)| (c.to_string(), Elem(*e))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn grounding_substitutes_constants_through_sigma() {
        let p = parse_program("p(X) :- f(X,c).").unwrap();
        let u = pre(&["x", "y"], &[("c", 0)]);
        let g = ground(&p, &u).unwrap();
        let x = Term::Elem(Elem(0));
        let y = Term::Elem(Elem(1));
        let expected = Program::new(vec![
            Rule::new(
                [Literal::pos(Atom::new("p", vec![x.clone()]))],
                [Literal::pos(Atom::new("f", vec![x.clone(), x.clone()]))],
            ),
            Rule::new(
                [Literal::pos(Atom::new("p", vec![y.clone()]))],
                [Literal::pos(Atom::new("f", vec![y, x]))],
            ),
        ]);
        assert_eq!(g, expected);
        assert_eq!(
            crate::logic::WithDomain::new(&g, &u.domain).to_string(),
            "p(x) :- f(x,x).\np(y) :- f(y,x).\n"
        );
    }

    #[test]
    fn ground_rule_is_fixed_modulo_sigma() {
        let p = parse_program("q(a) :- r(a,b).").unwrap();
        let u = pre(&["e1", "e2"], &[("a", 1), ("b", 1)]);
        let g = ground(&p, &u).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.rules[0].to_string(), "q(#1) :- r(#1,#1).");
    }

    #[test]
    fn two_variables_over_three_elements() {
        let p = parse_program("a(X,Y) :- g(X,Y).").unwrap();
        let u = pre(&["e1", "e2", "e3"], &[]);
        assert_eq!(ground(&p, &u).unwrap().len(), 9);
        assert_eq!(grounding_size(&p, 3), 9);
    }

    #[test]
    fn missing_constant_image_is_an_error() {
        let p = parse_program("q(a).").unwrap();
        let u = PreInterpretation::new(Domain::anonymous(1), BTreeMap::new()).unwrap();
        assert!(matches!(ground(&p, &u), Err(Error::UnmappedConstant(c)) if c == "a"));
    }

    #[test]
    fn equality_is_not_evaluated_by_grounding() {
        let p = parse_program(":- p(X), p(Y), X = Y.").unwrap();
        let g = ground(&p, &pre(&["e1", "e2"], &[])).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.rules.iter().all(|r| r.body().iter().any(|l| l.atom.is_equality())));
    }
}
