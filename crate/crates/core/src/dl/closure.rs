use std::collections::BTreeSet;

use super::{walk, Concept, DlKb, Expr, Role};

/// The subexpression closure of a KB in canonical order: by syntax-tree height
/// (so every expression comes after its subexpressions), ties broken on the
/// printed form.
///
/// Besides `⊤₁`, both sides of every axiom and all their subexpressions, the
/// closure holds every declared name (so names used only by a program still
/// get a predicate) and `⊤ₙ` for every arity `n` of a role expression in it.
pub fn closure(kb: &DlKb) -> Vec<Expr> {
    closure_with(kb, &[])
}

/// [`closure`] extended with extra expressions (and their subexpressions),
/// e.g. a query concept that does not occur in the KB.
pub fn closure_with(kb: &DlKb, extra: &[Expr]) -> Vec<Expr> {
    let mut set: BTreeSet<Expr> = BTreeSet::new();
    let add = |e: &Expr, set: &mut BTreeSet<Expr>| {
        walk(e, &mut |sub| {
            set.insert(sub.clone());
        });
    };
    add(&Expr::Concept(Concept::Top), &mut set);
    for ax in &kb.axioms {
        let (l, r) = ax.sides();
        add(&l, &mut set);
        add(&r, &mut set);
    }
    for c in &kb.concepts {
        add(&Expr::Concept(Concept::Name(c.clone())), &mut set);
    }
    for (r, n) in &kb.roles {
        add(&Expr::Role(Role::Name(r.clone(), *n)), &mut set);
    }
    for e in extra {
        add(e, &mut set);
    }
    let arities: BTreeSet<usize> = set
        .iter()
        .filter_map(|e| match e {
            Expr::Role(r) => Some(r.arity()),
            Expr::Concept(_) => None,
        })
        .collect();
    set.extend(arities.into_iter().map(|n| Expr::Role(Role::Top(n))));

    let mut out: Vec<(usize, String, Expr)> = set.into_iter().map(|e| (e.height(), e.to_string(), e)).collect();
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    out.into_iter().map(|(_, _, e)| e).collect()
}
