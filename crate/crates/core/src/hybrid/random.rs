use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::collections::BTreeSet;

use super::{HybridKb, Target};
use crate::dl::{Axiom, Concept, DlKb, Role};
use crate::logic::{Atom, Literal, Program, Rule, Term};

/// Shape of the generated KBs. The signature is fixed: concepts `A` and `B`,
/// the binary role `r`, program predicates `p/1` and `q/2`, and the constant
/// `a`, which may also occur as a nominal.
#[derive(Clone, Debug)]
pub struct RandomKbParams {
    pub max_axioms: usize,
    pub max_rules: usize,
    /// Maximum nesting depth of DL expressions.
    pub depth: usize,
}

impl Default for RandomKbParams {
    fn default() -> Self {
        RandomKbParams {
            max_axioms: 2,
            max_rules: 3,
            depth: 2,
        }
    }
}

fn concept(rng: &mut ChaCha8Rng, depth: usize) -> Concept {
    if depth == 0 || rng.random_bool(0.35) {
        return match rng.random_range(0..7) {
            0..=2 => Concept::name("A"),
            3 | 4 => Concept::name("B"),
            5 => Concept::Top,
            _ => Concept::nominal("a"),
        };
    }
    match rng.random_range(0..3) {
        0 => Concept::not(concept(rng, depth - 1)),
        1 => Concept::and(concept(rng, depth - 1), concept(rng, depth - 1)),
        _ => Concept::exists(rng.random_range(1..=2), role(rng, depth - 1)),
    }
}

fn role(rng: &mut ChaCha8Rng, depth: usize) -> Role {
    if depth == 0 || rng.random_bool(0.35) {
        return match rng.random_range(0..6) {
            0..=3 => Role::name("r", 2),
            4 => Role::Top(2),
            _ => Role::Tuple(vec!["a".into(), "a".into()]),
        };
    }
    match rng.random_range(0..3) {
        0 => Role::not(role(rng, depth - 1)),
        1 => Role::and(role(rng, depth - 1), role(rng, depth - 1)),
        _ => Role::select(rng.random_range(1..=2), 2, concept(rng, depth - 1)),
    }
}

fn term(rng: &mut ChaCha8Rng, vars: &[&str]) -> Term {
    if vars.is_empty() || rng.random_bool(0.15) {
        Term::constant("a")
    } else {
        Term::var(vars[rng.random_range(0..vars.len())])
    }
}

fn atom(rng: &mut ChaCha8Rng, vars: &[&str]) -> Atom {
    let pred = ["A", "B", "p", "q", "r"][rng.random_range(0..5)];
    let n = if matches!(pred, "q" | "r") { 2 } else { 1 };
    Atom::new(pred, (0..n).map(|_| term(rng, vars)).collect())
}

fn rule(rng: &mut ChaCha8Rng) -> Rule {
    match rng.random_range(0..10) {
        0 => return Rule::fact(atom(rng, &[])),
        1 => {
            return if rng.random_bool(0.5) {
                Rule::free(Atom::new("p", vec![Term::var("X")]))
            } else {
                Rule::free(Atom::new("q", vec![Term::var("X"), Term::var("Y")]))
            }
        }
        _ => {}
    }
    let (guard, vars): (Atom, &[&str]) = match rng.random_range(0..5) {
        0 => (Atom::new("r", vec![Term::var("X"), Term::var("Y")]), &["X", "Y"]),
        1 => (Atom::new("q", vec![Term::var("X"), Term::var("Y")]), &["X", "Y"]),
        2 => (Atom::new("A", vec![Term::var("X")]), &["X"]),
        3 => (Atom::new("B", vec![Term::var("X")]), &["X"]),
        _ => (Atom::new("p", vec![Term::var("X")]), &["X"]),
    };
    let mut head = Vec::new();
    if rng.random_bool(0.75) {
        head.push(Literal::pos(atom(rng, vars)));
    }
    if rng.random_bool(0.1) {
        head.push(Literal::naf(atom(rng, vars)));
    }
    let mut body = vec![Literal::pos(guard)];
    for _ in 0..rng.random_range(0..=2) {
        let a = atom(rng, vars);
        body.push(if rng.random_bool(0.6) {
            Literal::naf(a)
        } else {
            Literal::pos(a)
        });
    }
    Rule::new(head, body)
}

/// A small random hybrid KB with a guarded program, reproducible from `seed`.
pub fn random_kb(seed: u64, params: &RandomKbParams) -> HybridKb {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axioms = (0..rng.random_range(0..=params.max_axioms))
        .map(|_| {
            if rng.random_bool(0.8) {
                Axiom::Concept(concept(&mut rng, params.depth), concept(&mut rng, params.depth))
            } else {
                Axiom::Role(role(&mut rng, params.depth), role(&mut rng, params.depth))
            }
        })
        .collect();
    let mut dl = DlKb::from_axioms(axioms);
    dl.concepts.extend(["A".to_owned(), "B".to_owned()]);
    dl.roles.insert("r".into(), 2);
    let rules = (0..rng.random_range(1..=params.max_rules))
        .map(|_| rule(&mut rng))
        .collect();
    HybridKb::new(dl, Program::new(rules)).expect("generated names have consistent arities")
}

/// A target for a generated KB, rotating with `seed` through the DL names,
/// two compound concepts and the program predicates derived by some rule.
pub fn random_target(kb: &HybridKb, seed: u64) -> Target {
    let mut targets: Vec<Target> = ["A", "B", "r"]
        .iter()
        .map(|p| Target::Predicate(p.to_string()))
        .collect();
    targets.push(Target::Concept(Concept::and(
        Concept::name("A"),
        Concept::not(Concept::name("B")),
    )));
    targets.push(Target::Concept(Concept::exists(
        2,
        Role::and(Role::name("r", 2), Role::select(1, 2, Concept::name("A"))),
    )));
    let derived: BTreeSet<&str> = kb
        .program
        .rules
        .iter()
        .flat_map(|r| r.head_pos())
        .filter_map(|a| a.pred.name())
        .filter(|p| !kb.dl.is_dl_name(p))
        .collect();
    targets.extend(derived.into_iter().map(|p| Target::Predicate(p.to_owned())));
    targets.swap_remove(seed as usize % targets.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_kbs_are_well_formed_and_reproducible() {
        let params = RandomKbParams::default();
        for seed in 0..200 {
            let kb = random_kb(seed, &params);
            let report = kb.check();
            assert!(report.is_clean(), "seed {seed}: {report:?}\n{}\n{}", kb.dl, kb.program);
            assert_eq!(kb, random_kb(seed, &params));
        }
    }
}
