use std::fmt;

use super::{walk, Axiom, Concept, DlKb, Expr, Role};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlViolation {
    /// Index of the offending axiom, `None` for signature-level problems.
    pub axiom: Option<usize>,
    pub reason: String,
}

impl fmt::Display for DlViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axiom {
            Some(i) => write!(f, "axiom {}: {}", i + 1, self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

/// Well-typedness: intersection operands and axiom sides share arities,
/// positions lie within `1..=n`, role arities lie within `2..=n_max`, and
/// role names are used with their declared arity.
pub fn validate_kb(kb: &DlKb) -> Vec<DlViolation> {
    let n_max = kb.effective_n_max();
    let mut out = Vec::new();
    for name in kb.concepts.iter().filter(|c| kb.roles.contains_key(*c)) {
        out.push(DlViolation {
            axiom: None,
            reason: format!("`{name}` declared both as concept and role"),
        });
    }
    for (name, n) in &kb.roles {
        if *n < 2 || *n > n_max {
            out.push(DlViolation {
                axiom: None,
                reason: format!("role `{name}` has arity {n} outside 2..={n_max}"),
            });
        }
    }
    for (i, ax) in kb.axioms.iter().enumerate() {
        let mut push = |reason: String| out.push(DlViolation { axiom: Some(i), reason });
        if let Axiom::Role(a, b) = ax {
            if a.arity() != b.arity() {
                push(format!("arity mismatch: {} vs {}", a.arity(), b.arity()));
            }
        }
        let (l, r) = ax.sides();
        for side in [&l, &r] {
            walk(side, &mut |e| {
                if let Some(reason) = check_node(kb, n_max, e) {
                    push(reason);
                }
            });
        }
    }
    out
}

/// Checks one expression node; `None` when it is well-typed.
pub(crate) fn check_node(kb: &DlKb, n_max: usize, e: &Expr) -> Option<String> {
    match e {
        Expr::Concept(Concept::Exists(i, r)) if *i < 1 || *i > r.arity() => {
            Some(format!("position out of range: {i} for a role of arity {}", r.arity()))
        }
        Expr::Concept(Concept::Name(n)) if kb.roles.contains_key(n) => Some(format!("role `{n}` used as a concept")),
        Expr::Role(r) => {
            let n = r.arity();
            if n < 2 || n > n_max {
                return Some(format!("role arity {n} outside 2..={n_max} in `{r}`"));
            }
            match r {
                Role::And(a, b) if a.arity() != b.arity() => {
                    Some(format!("arity mismatch: {} vs {}", a.arity(), b.arity()))
                }
                Role::Select { pos, arity, .. } if *pos < 1 || *pos > *arity => {
                    Some(format!("position out of range: {pos} for arity {arity}"))
                }
                Role::Name(name, k) => match kb.roles.get(name) {
                    Some(declared) if declared != k => {
                        Some(format!("arity mismatch: `{name}` declared {declared}, used {k}"))
                    }
                    None if kb.concepts.contains(name) => Some(format!("concept `{name}` used as a role")),
                    _ => None,
                },
                _ => None,
            }
        }
        _ => None,
    }
}
