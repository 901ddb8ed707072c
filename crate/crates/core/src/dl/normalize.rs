use super::{Axiom, Concept, DlKb, Role};

/// Rewrites every role nominal `{(o₁,…,oₙ)}` as the left-nested intersection
/// `($1/n:{o₁}) ⊓ … ⊓ ($n/n:{oₙ})`, recursively.
pub fn normalize_role_nominals(r: &Role) -> Role {
    match r {
        Role::Top(_) | Role::Name(..) => r.clone(),
        Role::Select { pos, arity, concept } => Role::select(*pos, *arity, normalize_concept(concept)),
        Role::Not(inner) => Role::not(normalize_role_nominals(inner)),
        Role::And(a, b) => Role::and(normalize_role_nominals(a), normalize_role_nominals(b)),
        Role::Tuple(os) => {
            let n = os.len();
            os.iter()
                .enumerate()
                .map(|(i, o)| Role::select(i + 1, n, Concept::nominal(o.clone())))
                .reduce(Role::and)
                .unwrap_or(Role::Top(n))
        }
    }
}

pub fn normalize_concept(c: &Concept) -> Concept {
    match c {
        Concept::Top | Concept::Name(_) | Concept::Nominal(_) => c.clone(),
        Concept::Not(inner) => Concept::not(normalize_concept(inner)),
        Concept::And(a, b) => Concept::and(normalize_concept(a), normalize_concept(b)),
        Concept::Exists(i, r) => Concept::exists(*i, normalize_role_nominals(r)),
    }
}

pub fn normalize_kb(kb: &DlKb) -> DlKb {
    let axioms = kb
        .axioms
        .iter()
        .map(|ax| match ax {
            Axiom::Concept(a, b) => Axiom::Concept(normalize_concept(a), normalize_concept(b)),
            Axiom::Role(a, b) => Axiom::Role(normalize_role_nominals(a), normalize_role_nominals(b)),
        })
        .collect();
    DlKb { axioms, ..kb.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(os: &[&str]) -> Role {
        Role::Tuple(os.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn binary_tuple_nominal() {
        let r = normalize_role_nominals(&tuple(&["a", "b"]));
        assert_eq!(r.to_string(), "and(sel(1/2,one(a)),sel(2/2,one(b)))");
    }

    #[test]
    fn names_are_untouched() {
        let r = Role::name("p", 2);
        assert_eq!(normalize_role_nominals(&r), r);
    }

    #[test]
    fn negated_ternary_tuple() {
        let r = normalize_role_nominals(&Role::not(tuple(&["a", "b", "c"])));
        assert_eq!(
            r.to_string(),
            "not(and(and(sel(1/3,one(a)),sel(2/3,one(b))),sel(3/3,one(c))))"
        );
    }

    #[test]
    fn normalization_is_a_fixpoint() {
        let c = Concept::exists(1, Role::and(tuple(&["a", "b"]), Role::not(tuple(&["b", "a"]))));
        let once = normalize_concept(&c);
        assert_eq!(normalize_concept(&once), once);
    }
}
