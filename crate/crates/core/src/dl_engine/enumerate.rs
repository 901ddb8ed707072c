use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use super::{ClosurePlan, DlInterpretation};
use crate::asp::{SearchConfig, SearchResult};
use crate::dl::{Concept, DlKb, Expr, Signature};
use crate::error::{Error, Result};
use crate::logic::{Domain, Elem};

/// A model together with an element of the queried concept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlWitness {
    pub interpretation: DlInterpretation,
    pub element: Elem,
}

/// The free choices of a candidate interpretation. Every element picks a
/// subset of the concept names; every `n`-tuple is either outside `⊤ₙ` or
/// inside it with a subset of the `n`-ary role names; every nominal not pinned
/// picks an element.
struct Layout {
    k: usize,
    concepts: Vec<String>,
    /// Per arity: role names of that arity.
    arities: Vec<(usize, Vec<String>)>,
    free_nominals: Vec<String>,
    full_top: bool,
    radices: Vec<u64>,
}

impl Layout {
    fn new(kb: &DlKb, plan: &ClosurePlan, k: usize, pinned: &BTreeMap<String, Elem>, full_top: bool) -> Self {
        let mut by_arity: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for e in &plan.exprs {
            if let Expr::Role(r) = e {
                by_arity.entry(r.arity()).or_default();
            }
        }
        for (r, n) in &kb.roles {
            by_arity.entry(*n).or_default().push(r.clone());
        }
        let mut nominals: BTreeSet<String> = kb.nominals.clone();
        for e in &plan.exprs {
            if let Expr::Concept(Concept::Nominal(o)) = e {
                nominals.insert(o.clone());
            }
            if let Expr::Role(crate::dl::Role::Tuple(os)) = e {
                nominals.extend(os.iter().cloned());
            }
        }
        let free_nominals: Vec<String> = nominals.into_iter().filter(|o| !pinned.contains_key(o)).collect();
        let concepts: Vec<String> = kb.concepts.iter().cloned().collect();
        let mut radices = vec![1u64 << concepts.len(); k];
        let arities: Vec<(usize, Vec<String>)> = by_arity.into_iter().collect();
        for (n, roles) in &arities {
            let states = (1u64 << roles.len()) + u64::from(!full_top);
            radices.extend(std::iter::repeat_n(states, k.pow(*n as u32)));
        }
        radices.extend(std::iter::repeat_n(k as u64, free_nominals.len()));
        radices.retain(|r| *r > 1);
        Layout {
            k,
            concepts,
            arities,
            free_nominals,
            full_top,
            radices,
        }
    }

    fn count(&self) -> u128 {
        self.radices.iter().fold(1u128, |acc, r| acc.saturating_mul(*r as u128))
    }

    /// Writes the candidate described by `digits` into `i`.
    fn fill(&self, digits: &[u64], i: &mut DlInterpretation) {
        let mut d = digits.iter().copied();
        let concept_radix = 1u64 << self.concepts.len();
        for ext in i.concepts.values_mut() {
            ext.clear();
        }
        for e in 0..self.k {
            let mask = if concept_radix > 1 { d.next().unwrap() } else { 0 };
            for (bit, c) in self.concepts.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    i.concepts.get_mut(c).unwrap().insert(e);
                }
            }
        }
        for (n, roles) in &self.arities {
            let len = self.k.pow(*n as u32);
            let radix = (1u64 << roles.len()) + u64::from(!self.full_top);
            let top = i.tops.entry(*n).or_insert_with(|| FixedBitSet::with_capacity(len));
            top.clear();
            let mut masks = Vec::with_capacity(len);
            for t in 0..len {
                let state = if radix > 1 { d.next().unwrap() } else { 0 };
                let in_top = self.full_top || state > 0;
                if in_top {
                    top.insert(t);
                }
                masks.push(if self.full_top { state } else { state.saturating_sub(1) });
            }
            for (bit, r) in roles.iter().enumerate() {
                let ext = &mut i.roles.get_mut(r).unwrap().1;
                ext.clear();
                for (t, m) in masks.iter().enumerate() {
                    if m >> bit & 1 == 1 {
                        ext.insert(t);
                    }
                }
            }
        }
        if self.k > 1 {
            for o in &self.free_nominals {
                i.nominals.insert(o.clone(), Elem(d.next().unwrap() as u32));
            }
        } else {
            for o in &self.free_nominals {
                i.nominals.insert(o.clone(), Elem(0));
            }
        }
    }
}

/// Number of candidate interpretations the enumerator would inspect.
pub fn dl_model_count(kb: &DlKb, k: usize, pinned: &BTreeMap<String, Elem>, full_top: bool) -> u128 {
    let plan = ClosurePlan::new(kb, &[]);
    Layout::new(kb, &plan, k, pinned, full_top).count()
}

/// Visits every model of `kb` over `domain` whose nominals agree with
/// `pinned`, together with the extensions of all closure expressions of
/// `plan`. `⊤ₙ` is a free choice unless `cfg.full_top` is set.
pub(crate) fn enumerate_with_plan(
    kb: &DlKb,
    plan: &ClosurePlan,
    domain: &Domain,
    pinned: &BTreeMap<String, Elem>,
    cfg: &SearchConfig,
    mut visit: impl FnMut(&DlInterpretation, &[FixedBitSet]) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    let k = domain.len();
    let layout = Layout::new(kb, plan, k, pinned, cfg.full_top);
    let needed = layout.count();
    if needed > cfg.extension_cap as u128 {
        return Err(Error::ExtensionCap {
            needed,
            cap: cfg.extension_cap,
        });
    }
    let mut i = DlInterpretation::empty(kb, domain.clone());
    i.nominals.extend(pinned.iter().map(|(o, e)| (o.clone(), *e)));
    let mut digits = vec![0u64; layout.radices.len()];
    loop {
        layout.fill(&digits, &mut i);
        debug_assert!(i.check_structure().is_ok());
        let ext = plan.evaluate(&i)?;
        if plan.satisfied(&ext) && visit(&i, &ext).is_break() {
            return Ok(ControlFlow::Break(()));
        }
        if !advance(&mut digits, &layout.radices) {
            return Ok(ControlFlow::Continue(()));
        }
    }
}

fn advance(digits: &mut [u64], radices: &[u64]) -> bool {
    for (d, r) in digits.iter_mut().zip(radices).rev() {
        *d += 1;
        if *d < *r {
            return true;
        }
        *d = 0;
    }
    false
}

/// Streams the models of `kb` over `domain`, in a fixed order.
pub fn enumerate_dl_models(
    kb: &DlKb,
    domain: &Domain,
    pinned: &BTreeMap<String, Elem>,
    cfg: &SearchConfig,
    mut visit: impl FnMut(&DlInterpretation) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    let plan = ClosurePlan::new(kb, &[]);
    enumerate_with_plan(kb, &plan, domain, pinned, cfg, |i, _| visit(i))
}

/// Smallest model with a nonempty extension of `c`.
pub fn concept_satisfiable(c: &Concept, kb: &DlKb, cfg: &SearchConfig) -> Result<SearchResult<DlWitness>> {
    let query = Expr::Concept(c.clone());
    let mut kb = kb.clone();
    let mut sig = Signature::default();
    sig.collect(&query);
    kb.concepts.extend(sig.concepts);
    for (r, n) in sig.roles {
        kb.roles.entry(r).or_insert(n);
    }
    kb.nominals.extend(sig.nominals);
    let plan = ClosurePlan::new(&kb, std::slice::from_ref(&query));
    let at = plan.position(&query).expect("query in closure");
    for k in cfg.sizes() {
        let mut found = None;
        let _ = enumerate_with_plan(
            &kb,
            &plan,
            &Domain::anonymous(k),
            &BTreeMap::new(),
            cfg,
            |i, ext| match ext[at].ones().next() {
                Some(e) => {
                    found = Some(DlWitness {
                        interpretation: i.clone(),
                        element: Elem(e as u32),
                    });
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            },
        )?;
        if let Some(witness) = found {
            return Ok(SearchResult::Satisfiable { k, witness });
        }
    }
    Ok(SearchResult::ExhaustedUpTo(cfg.k_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl_engine::{check_model, eval_concept};
    use crate::syntax::{parse_concept, parse_kb};

    fn models(kb: &DlKb, k: usize, cfg: &SearchConfig) -> Vec<DlInterpretation> {
        let mut out = Vec::new();
        let _ = enumerate_dl_models(kb, &Domain::anonymous(k), &BTreeMap::new(), cfg, |i| {
            out.push(i.clone());
            ControlFlow::Continue(())
        })
        .unwrap();
        out
    }

    #[test]
    fn free_concept_over_one_element() {
        let kb = parse_kb("concept A.").unwrap();
        assert_eq!(models(&kb, 1, &SearchConfig::default()).len(), 2);
    }

    #[test]
    fn contradictory_concept_is_forced_empty() {
        let kb = parse_kb("A <= not(A).").unwrap();
        let ms = models(&kb, 1, &SearchConfig::default());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].concepts["A"].count_ones(..), 0);
    }

    #[test]
    fn free_top_doubles_role_space() {
        let kb = parse_kb("role r/2.").unwrap();
        // Per pair: outside top, inside without r, inside with r.
        assert_eq!(models(&kb, 2, &SearchConfig::default()).len(), 81);
        let full = SearchConfig {
            full_top: true,
            ..SearchConfig::default()
        };
        assert_eq!(models(&kb, 2, &full).len(), 16);
    }

    #[test]
    fn every_yield_is_a_model() {
        let kb = parse_kb("role r/2. A <= some(1, and(r, sel(2/2, not(A)))). one(o) <= A.").unwrap();
        for i in models(&kb, 2, &SearchConfig::default()) {
            i.check_structure().unwrap();
            assert!(check_model(&kb, &i).unwrap().is_empty());
        }
    }

    #[test]
    fn pinned_nominals_are_respected() {
        let kb = parse_kb("concept A. one(o) <= A.").unwrap();
        let pinned: BTreeMap<String, Elem> = [("o".to_owned(), Elem(1))].into();
        let _ = enumerate_dl_models(&kb, &Domain::anonymous(2), &pinned, &SearchConfig::default(), |i| {
            assert_eq!(i.nominals["o"], Elem(1));
            assert!(i.concepts["A"].contains(1));
            ControlFlow::Continue(())
        })
        .unwrap();
    }

    #[test]
    fn cap_is_enforced() {
        let kb = parse_kb("role r/3.").unwrap();
        let cfg = SearchConfig {
            extension_cap: 1000,
            ..SearchConfig::default()
        };
        let r = enumerate_dl_models(&kb, &Domain::anonymous(3), &BTreeMap::new(), &cfg, |_| {
            ControlFlow::Continue(())
        });
        assert!(matches!(r, Err(Error::ExtensionCap { .. })));
    }

    #[test]
    fn concept_satisfiability() {
        let empty = DlKb::default();
        let cfg = SearchConfig::up_to(2);
        assert_eq!(concept_satisfiable(&Concept::Top, &empty, &cfg).unwrap().k(), Some(1));
        let c = Concept::and(Concept::name("A"), Concept::not(Concept::name("A")));
        assert_eq!(
            concept_satisfiable(&c, &empty, &cfg).unwrap(),
            SearchResult::ExhaustedUpTo(2)
        );

        let kb = parse_kb(
            "concept socialDrinker. role drinks/3.
             socialDrinker <= some(1, and(drinks, sel(3/3, one(wine)))).",
        )
        .unwrap();
        let q = parse_concept("socialDrinker", &kb).unwrap();
        let r = concept_satisfiable(&q, &kb, &cfg).unwrap();
        // The drinker, the partner and the wine may all be one element.
        assert_eq!(r.k(), Some(1));
        let w = r.witness().unwrap();
        assert!(eval_concept(&q, &w.interpretation).unwrap().contains(w.element.index()));
    }
}
