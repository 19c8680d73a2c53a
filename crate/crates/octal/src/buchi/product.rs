use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::automaton::{BuchiAutomaton, BuchiError, Transition};

/// Intersection of two Büchi languages via the two-copy flag construction.
///
/// A transition exists only when the two cubes are jointly satisfiable and is
/// labeled by their union. The flag waits for an accepting state of the first
/// automaton in copy 0 and of the second in copy 1; accepting states are the
/// copy-0 states whose first component is accepting.
pub fn product(
    b1: &BuchiAutomaton,
    b2: &BuchiAutomaton,
    state_cap: usize,
) -> Result<BuchiAutomaton, BuchiError> {
    let adj1 = b1.adjacency();
    let adj2 = b2.adjacency();
    let mut ids: BTreeMap<(usize, usize, u8), usize> = BTreeMap::new();
    let mut order: Vec<(usize, usize, u8)> = Vec::new();
    let mut transitions = Vec::new();
    let start = (b1.initial, b2.initial, 0u8);
    ids.insert(start, 0);
    order.push(start);
    let mut queue = VecDeque::from([start]);
    while let Some((q1, q2, copy)) = queue.pop_front() {
        let src_id = ids[&(q1, q2, copy)];
        let next_copy = match copy {
            0 if b1.accepting.contains(&q1) => 1,
            1 if b2.accepting.contains(&q2) => 0,
            c => c,
        };
        for &t1 in &adj1[q1] {
            let t1 = &b1.transitions[t1];
            for &t2 in &adj2[q2] {
                let t2 = &b2.transitions[t2];
                let Some(label) = t1.label.join(&t2.label) else {
                    continue;
                };
                let key = (t1.dst, t2.dst, next_copy);
                let dst_id = *ids.entry(key).or_insert_with(|| {
                    order.push(key);
                    queue.push_back(key);
                    order.len() - 1
                });
                if order.len() > state_cap {
                    return Err(BuchiError::StateCapExceeded { cap: state_cap });
                }
                transitions.push(Transition {
                    src: src_id,
                    label,
                    dst: dst_id,
                });
            }
        }
    }
    let accepting = order
        .iter()
        .enumerate()
        .filter(|(_, &(q1, _, copy))| copy == 0 && b1.accepting.contains(&q1))
        .map(|(id, _)| id)
        .collect();
    Ok(BuchiAutomaton {
        state_count: order.len(),
        initial: 0,
        accepting,
        transitions,
        atom_universe: b1
            .atom_universe
            .union(&b2.atom_universe)
            .copied()
            .collect::<BTreeSet<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::emptiness::{accepts_lasso, is_empty};
    use super::super::translate::translate;
    use super::*;
    use crate::ltl::{negate, parse_ltl, to_core};

    #[test]
    fn until_times_its_negation_is_empty() {
        let f = parse_ltl("a U b").unwrap();
        let b = translate(&to_core(&f), 1000).unwrap();
        let neg = translate(&to_core(&negate(&f)), 1000).unwrap();
        let prod = product(&b, &neg, 10_000).unwrap();
        assert!(is_empty(&prod).is_none());
    }

    #[test]
    fn universal_is_an_identity_on_sampled_lassos() {
        let f = parse_ltl("a U b").unwrap();
        let b = translate(&to_core(&f), 1000).unwrap();
        let prod = product(&b, &BuchiAutomaton::universal(), 10_000).unwrap();
        for (pa, pb, la, lb) in [
            (true, false, false, true),
            (true, true, true, true),
            (false, false, true, false),
            (true, false, true, false),
        ] {
            let w = crate::ltl::Lasso::new(
                vec![[('a', pa), ('b', pb)].into_iter().collect()],
                vec![[('a', la), ('b', lb)].into_iter().collect()],
            )
            .unwrap();
            assert_eq!(
                accepts_lasso(&prod, &w).unwrap(),
                accepts_lasso(&b, &w).unwrap()
            );
        }
    }

    #[test]
    fn cap_applies_to_the_product() {
        let b = translate(&to_core(&parse_ltl("a U b").unwrap()), 1000).unwrap();
        assert!(matches!(
            product(&b, &b, 1),
            Err(BuchiError::StateCapExceeded { cap: 1 })
        ));
    }
}
