#![allow(dead_code)]

use fixedbitset::FixedBitSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ghybrid::dl::{Axiom, Concept, DlKb, Expr, Role, Signature};
use ghybrid::dl_engine::DlInterpretation;
use ghybrid::logic::{Domain, Elem};

/// Concepts over `C0..C5`, nominals `o0..o2` and roles `R2_*`, `R3_*`.
pub fn random_concept(rng: &mut ChaCha8Rng, depth: usize) -> Concept {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..8) {
            0 => Concept::Top,
            1 => Concept::nominal(format!("o{}", rng.random_range(0..3))),
            _ => Concept::name(format!("C{}", rng.random_range(0..6))),
        };
    }
    match rng.random_range(0..3) {
        0 => Concept::not(random_concept(rng, depth - 1)),
        1 => Concept::and(random_concept(rng, depth - 1), random_concept(rng, depth - 1)),
        _ => {
            let n = rng.random_range(2..=3);
            let r = random_role(rng, depth - 1, n);
            Concept::exists(rng.random_range(1..=n), r)
        }
    }
}

pub fn random_role(rng: &mut ChaCha8Rng, depth: usize, n: usize) -> Role {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..8) {
            0 => Role::Top(n),
            1 => Role::Tuple((0..n).map(|_| format!("o{}", rng.random_range(0..3))).collect()),
            _ => Role::name(format!("R{n}_{}", rng.random_range(0..2)), n),
        };
    }
    match rng.random_range(0..3) {
        0 => Role::not(random_role(rng, depth - 1, n)),
        1 => Role::and(random_role(rng, depth - 1, n), random_role(rng, depth - 1, n)),
        _ => Role::select(rng.random_range(1..=n), n, random_concept(rng, depth - 1)),
    }
}

pub fn random_axiom(rng: &mut ChaCha8Rng, depth: usize) -> Axiom {
    if rng.random_bool(0.75) {
        Axiom::Concept(random_concept(rng, depth), random_concept(rng, depth))
    } else {
        let n = rng.random_range(2..=3);
        Axiom::Role(random_role(rng, depth, n), random_role(rng, depth, n))
    }
}

/// A random KB whose size is at least `n`.
pub fn kb_of_size(rng: &mut ChaCha8Rng, n: usize) -> DlKb {
    let mut axioms = Vec::new();
    let mut size = 0;
    while size < n {
        let ax = random_axiom(rng, 3);
        size += ax.size();
        axioms.push(ax);
    }
    DlKb::from_axioms(axioms)
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize, within: Option<&FixedBitSet>) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(len);
    for b in 0..len {
        if within.is_none_or(|w| w.contains(b)) && rng.random_bool(0.5) {
            s.insert(b);
        }
    }
    s
}

/// A random interpretation of every name in `kb` and in `extra`, with random
/// `⊤₂`, `⊤₃` and roles inside them.
pub fn random_interpretation(rng: &mut ChaCha8Rng, kb: &DlKb, extra: &[Expr], k: usize) -> DlInterpretation {
    let mut sig = Signature::default();
    for e in extra {
        sig.collect(e);
    }
    let mut kb = kb.clone();
    kb.concepts.extend(sig.concepts);
    kb.roles.extend(sig.roles);
    kb.nominals.extend(sig.nominals);
    let mut i = DlInterpretation::empty(&kb, Domain::anonymous(k));
    for n in 2..=3 {
        let top = random_bits(rng, k.pow(n as u32), None);
        i.tops.insert(n, top);
    }
    for ext in i.concepts.values_mut() {
        *ext = random_bits(rng, k, None);
    }
    let tops = i.tops.clone();
    for (n, ext) in i.roles.values_mut() {
        *ext = random_bits(rng, k.pow(*n as u32), tops.get(n));
    }
    for o in &kb.nominals {
        i.nominals.insert(o.clone(), Elem(rng.random_range(0..k as u32)));
    }
    i
}
