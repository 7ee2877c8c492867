//! Branch-and-bound search for a consonant table.
//!
//! Units are placed one at a time, anchored units first. Each unit tries its
//! anchor handshape before the others in ascending order, so the first table
//! that keeps the most anchors is also the one returned.

use std::collections::BTreeMap;

use super::{verify_consonant_table, ConsonantRules, ConsonantTable, CueUnit, Handshape};
use crate::phonology::{Initial, Semiconsonant};

/// French handshape groups for the consonants that have a direct
/// counterpart there.
pub const LPC_ANCHORS: [(CueUnit, u8); 17] = [
    (CueUnit::Initial(Initial::P), 1),
    (CueUnit::Initial(Initial::D), 1),
    (CueUnit::Initial(Initial::K), 2),
    (CueUnit::Initial(Initial::Z), 2),
    (CueUnit::Initial(Initial::S), 3),
    (CueUnit::Initial(Initial::R), 3),
    (CueUnit::Initial(Initial::B), 4),
    (CueUnit::Initial(Initial::N), 4),
    (CueUnit::Semi(Semiconsonant::Yw), 4),
    (CueUnit::Initial(Initial::T), 5),
    (CueUnit::Initial(Initial::M), 5),
    (CueUnit::Initial(Initial::F), 5),
    (CueUnit::Initial(Initial::L), 6),
    (CueUnit::Initial(Initial::Sh), 6),
    (CueUnit::Semi(Semiconsonant::W), 6),
    (CueUnit::Initial(Initial::G), 7),
    (CueUnit::Semi(Semiconsonant::J), 8),
];

struct Search<'a> {
    rules: &'a ConsonantRules,
    order: Vec<(CueUnit, Option<Handshape>)>,
    /// anchored units at or after each index
    anchors_left: Vec<usize>,
    assigned: BTreeMap<CueUnit, Handshape>,
    best: Option<(usize, BTreeMap<CueUnit, Handshape>)>,
}

impl Search<'_> {
    fn fits(&self, unit: CueUnit, h: Handshape) -> bool {
        let group: Vec<CueUnit> = self.assigned.iter().filter(|(_, &g)| g == h).map(|(&u, _)| u).collect();
        if group.len() >= self.rules.capacity {
            return false;
        }
        for other in group {
            if self.clash(unit, other) || self.clash(other, unit) {
                return false;
            }
            if let (Some(a), Some(b)) = (self.rules.visemes.class(unit), self.rules.visemes.class(other)) {
                if a == b {
                    return false;
                }
            }
        }
        for &(a, b) in &self.rules.paired {
            let partner = if a == unit {
                b
            } else if b == unit {
                a
            } else {
                continue;
            };
            if let Some(&ph) = self.assigned.get(&partner) {
                if ph != h {
                    return false;
                }
            }
        }
        true
    }

    fn clash(&self, a: CueUnit, b: CueUnit) -> bool {
        match (a, b) {
            (CueUnit::Initial(i), CueUnit::Semi(s)) => {
                self.rules.combinability.can_precede(i, s) && !self.rules.tolerates(i, s)
            }
            (CueUnit::Semi(_), CueUnit::Semi(_)) => true,
            _ => false,
        }
    }

    fn run(&mut self, idx: usize, kept: usize) {
        let best_kept = self.best.as_ref().map(|(k, _)| *k);
        if best_kept.is_some_and(|b| kept + self.anchors_left[idx] <= b) {
            return;
        }
        if idx == self.order.len() {
            self.best = Some((kept, self.assigned.clone()));
            return;
        }
        let (unit, anchor) = self.order[idx];
        let candidates = anchor
            .into_iter()
            .chain(Handshape::all().filter(|&h| Some(h) != anchor));
        for h in candidates {
            if !self.fits(unit, h) {
                continue;
            }
            self.assigned.insert(unit, h);
            self.run(idx + 1, kept + usize::from(Some(h) == anchor));
            self.assigned.remove(&unit);
        }
    }
}

/// Finds a table satisfying `rules` that keeps as many units as possible in
/// their anchor handshape. Returns `None` when the rules are unsatisfiable.
pub fn solve_consonant_table(
    rules: &ConsonantRules,
    anchors: &[(CueUnit, u8)],
    isolated_vowel: Handshape,
) -> Option<ConsonantTable> {
    if CueUnit::all().count() > rules.capacity * usize::from(Handshape::COUNT) {
        return None;
    }
    let anchor_of: BTreeMap<CueUnit, Handshape> = anchors
        .iter()
        .filter_map(|&(u, n)| Handshape::new(n).map(|h| (u, h)))
        .collect();
    let mut order: Vec<(CueUnit, Option<Handshape>)> = anchors
        .iter()
        .filter_map(|&(u, _)| anchor_of.get(&u).map(|&h| (u, Some(h))))
        .collect();
    order.extend(CueUnit::all().filter(|u| !anchor_of.contains_key(u)).map(|u| (u, None)));

    let mut anchors_left = vec![0; order.len() + 1];
    for i in (0..order.len()).rev() {
        anchors_left[i] = anchors_left[i + 1] + usize::from(order[i].1.is_some());
    }
    let mut search = Search {
        rules,
        order,
        anchors_left,
        assigned: BTreeMap::new(),
        best: None,
    };
    search.run(0, 0);
    let (_, map) = search.best?;
    let table = ConsonantTable::new(map, isolated_vowel);
    debug_assert!(verify_consonant_table(&table, rules).is_empty());
    Some(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_table_is_solver_output() {
        let rules = ConsonantRules::standard();
        let solved = solve_consonant_table(&rules, &LPC_ANCHORS, Handshape::new(5).unwrap()).unwrap();
        assert!(verify_consonant_table(&solved, &rules).is_empty());
        assert_eq!(&solved, ConsonantTable::standard(), "\n{}", solved.to_text());
    }

    #[test]
    fn keeps_every_anchor_the_rules_allow() {
        let rules = ConsonantRules::standard();
        let solved = solve_consonant_table(&rules, &LPC_ANCHORS, Handshape::new(5).unwrap()).unwrap();
        let moved: Vec<CueUnit> = LPC_ANCHORS
            .iter()
            .filter(|&&(u, n)| solved.get(u).map(Handshape::number) != Some(n))
            .map(|&(u, _)| u)
            .collect();
        // sh cannot stay with [w]; n and [ɥ] combine, so one of them moves
        assert_eq!(moved.len(), 2, "{moved:?}");
        assert!(moved.contains(&CueUnit::Initial(Initial::Sh)));
    }

    #[test]
    fn unsatisfiable_rules() {
        let mut rules = ConsonantRules::standard();
        rules.capacity = 2;
        assert!(solve_consonant_table(&rules, &LPC_ANCHORS, Handshape::new(5).unwrap()).is_none());
    }
}
