//! Intersection of residue-class unions under the Chinese remainder theorem.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::modular::{gcd_u128, inv_mod};

/// A union of residue classes `{ x : x mod modulus in residues }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueClass {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

impl ResidueClass {
    pub fn new(modulus: u64, residues: impl IntoIterator<Item = u64>) -> Self {
        assert!(modulus >= 1);
        let mut residues: Vec<u64> = residues.into_iter().map(|r| r % modulus).collect();
        residues.sort_unstable();
        residues.dedup();
        ResidueClass { modulus, residues }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CrtLimits {
    /// Largest admissible lcm of the moduli merged so far.
    pub max_modulus: u128,
    /// Largest admissible intermediate residue set.
    pub max_residues: usize,
    /// Consistency checks allowed to [`crt_search`] when the merge gives up.
    pub search_budget: u64,
}

impl Default for CrtLimits {
    fn default() -> Self {
        CrtLimits { max_modulus: 1 << 126, max_residues: 1 << 16, search_budget: 1 << 26 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrtOutcome {
    /// No integer satisfies every class. `merged` lists the class indices in
    /// the order they were merged until the set became empty.
    Empty { merged: Vec<usize> },
    /// All compatible residues modulo the lcm of every modulus, sorted.
    Residues { modulus: u128, residues: Vec<u128> },
    /// A limit was hit before the intersection finished.
    Inconclusive { reason: String },
}

impl CrtOutcome {
    pub fn is_empty(&self) -> bool {
        matches!(self, CrtOutcome::Empty { .. })
    }
}

/// Intersect residue-class unions.
///
/// Classes are merged greedily: at each step the class expected to leave the
/// smallest set is taken next (pure filters, whose modulus divides the
/// running lcm, go first). The first empty intermediate set ends the merge.
pub fn crt_intersect(classes: &[ResidueClass], limits: &CrtLimits) -> CrtOutcome {
    let mut modulus: u128 = 1;
    let mut set: Vec<u128> = vec![0];
    let mut remaining: Vec<usize> = (0..classes.len()).collect();
    let mut merged = Vec::with_capacity(classes.len());

    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                let c = &classes[i];
                let g = gcd_u128(modulus, c.modulus as u128);
                // expected size = |set| * |residues| / g, compared as a ratio
                (pos, (c.residues.len() as u128 * set.len() as u128, g))
            })
            .min_by(|(pa, (na, ga)), (pb, (nb, gb))| {
                (na * gb).cmp(&(nb * ga)).then(pa.cmp(pb))
            })
            .expect("remaining is non-empty");
        let idx = remaining.remove(pos);
        let class = &classes[idx];
        merged.push(idx);

        let g = gcd_u128(modulus, class.modulus as u128);
        let new_modulus = match (modulus / g).checked_mul(class.modulus as u128) {
            Some(m) if m <= limits.max_modulus => m,
            _ => {
                return CrtOutcome::Inconclusive {
                    reason: format!("lcm exceeds {} after merging modulus {}", limits.max_modulus, class.modulus),
                }
            }
        };
        set = merge(&set, modulus, class, g, new_modulus);
        modulus = new_modulus;
        if set.is_empty() {
            return CrtOutcome::Empty { merged };
        }
        if set.len() > limits.max_residues {
            return CrtOutcome::Inconclusive {
                reason: format!("{} residues modulo {} exceed the set bound", set.len(), modulus),
            };
        }
    }
    set.sort_unstable();
    CrtOutcome::Residues { modulus, residues: set }
}

fn merge(set: &[u128], modulus: u128, class: &ResidueClass, g: u128, new_modulus: u128) -> Vec<u128> {
    let m = class.modulus as u128;
    if g == m {
        // the class modulus divides the running lcm: filter only
        let allowed: std::collections::HashSet<u64> = class.residues.iter().copied().collect();
        return set.iter().copied().filter(|s| allowed.contains(&((s % m) as u64))).collect();
    }
    let mut buckets: HashMap<u128, Vec<u128>> = HashMap::new();
    for &r in &class.residues {
        buckets.entry(r as u128 % g).or_default().push(r as u128);
    }
    let step = (m / g) as u64;
    let lg = ((modulus / g) % step as u128) as u64;
    let inv = if step == 1 { 0 } else { inv_mod(lg, step).expect("coprime after dividing by gcd") as u128 };
    let mut out = Vec::new();
    for &s in set {
        let Some(rs) = buckets.get(&(s % g)) else { continue };
        for &r in rs {
            // x = s + modulus * t, with (modulus/g) t = (r - s)/g  (mod m/g)
            let delta = if r >= s % m {
                (r - s % m) / g
            } else {
                step as u128 - ((s % m - r) / g) % step as u128
            } % step as u128;
            let t = delta * inv % step as u128;
            out.push((s + modulus * t) % new_modulus);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// One residue per class, pairwise compatible, in input order.
    Solution(Vec<u64>),
    Empty,
    Exhausted,
}

/// Decide whether the classes have a common solution by choosing one
/// residue per class. Choices `r_i mod m_i` have a common lift iff they
/// agree pairwise modulo `gcd(m_i, m_j)`, so no lcm is ever formed.
pub fn crt_search(classes: &[ResidueClass], budget: u64) -> SearchOutcome {
    let n = classes.len();
    if classes.iter().any(|c| c.residues.is_empty()) {
        return SearchOutcome::Empty;
    }
    let g: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| super::modular::gcd_u64(classes[i].modulus, classes[j].modulus)).collect())
        .collect();
    // live[i]: residues of class i still compatible with the assignment so far
    let live: Vec<Vec<u64>> = classes.iter().map(|c| c.residues.clone()).collect();
    let mut assigned: Vec<Option<u64>> = vec![None; n];
    let mut spent = 0u64;
    match search(&g, live, &mut assigned, &mut spent, budget) {
        Some(true) => SearchOutcome::Solution(assigned.into_iter().map(|r| r.expect("complete")).collect()),
        Some(false) => SearchOutcome::Empty,
        None => SearchOutcome::Exhausted,
    }
}

fn search(g: &[Vec<u64>], live: Vec<Vec<u64>>, assigned: &mut [Option<u64>], spent: &mut u64, budget: u64) -> Option<bool> {
    // most constrained unassigned class first
    let Some(i) = (0..live.len()).filter(|&i| assigned[i].is_none()).min_by_key(|&i| (live[i].len(), i)) else {
        return Some(true);
    };
    for &r in &live[i] {
        let mut next = live.clone();
        let mut dead = false;
        for j in 0..live.len() {
            if assigned[j].is_some() || j == i {
                continue;
            }
            let gij = g[i][j];
            *spent += next[j].len() as u64;
            next[j].retain(|&s| s % gij == r % gij);
            if next[j].is_empty() {
                dead = true;
                break;
            }
        }
        if *spent > budget {
            return None;
        }
        if dead {
            continue;
        }
        assigned[i] = Some(r);
        match search(g, next, assigned, spent, budget) {
            Some(true) => return Some(true),
            Some(false) => assigned[i] = None,
            None => {
                assigned[i] = None;
                return None;
            }
        }
    }
    Some(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrtDecision {
    /// `merged` as in [`CrtOutcome::Empty`]; all classes when the search decided it.
    Empty { merged: Vec<usize> },
    Nonempty,
    Inconclusive { reason: String },
}

/// Emptiness of the intersection: the greedy merge first, then [`crt_search`]
/// if the merge hits a limit.
pub fn crt_decide(classes: &[ResidueClass], limits: &CrtLimits) -> CrtDecision {
    match crt_intersect(classes, limits) {
        CrtOutcome::Empty { merged } => CrtDecision::Empty { merged },
        CrtOutcome::Residues { .. } => CrtDecision::Nonempty,
        CrtOutcome::Inconclusive { reason } => match crt_search(classes, limits.search_budget) {
            SearchOutcome::Solution(_) => CrtDecision::Nonempty,
            SearchOutcome::Empty => CrtDecision::Empty { merged: (0..classes.len()).collect() },
            SearchOutcome::Exhausted => CrtDecision::Inconclusive { reason: format!("{reason}; search budget spent") },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residues(outcome: CrtOutcome) -> (u128, Vec<u128>) {
        match outcome {
            CrtOutcome::Residues { modulus, residues } => (modulus, residues),
            other => panic!("expected residues, got {other:?}"),
        }
    }

    #[test]
    fn documented_values() {
        let l = CrtLimits::default();
        let r = crt_intersect(&[ResidueClass::new(2, [1]), ResidueClass::new(6, [1, 5])], &l);
        assert_eq!(residues(r), (6, vec![1, 5]));

        // 3 mod 6 is odd, but 3 mod 6 and 0 mod 4 disagree on parity
        let r = crt_intersect(
            &[ResidueClass::new(2, [1]), ResidueClass::new(6, [3]), ResidueClass::new(4, [0])],
            &l,
        );
        assert!(r.is_empty());

        let r = crt_intersect(&[ResidueClass::new(3, [0, 1, 2]), ResidueClass::new(2, [1])], &l);
        assert_eq!(residues(r), (6, vec![1, 3, 5]));
    }

    #[test]
    fn empty_class_is_empty() {
        let r = crt_intersect(&[ResidueClass::new(7, [1]), ResidueClass::new(5, [])], &CrtLimits::default());
        assert_eq!(r, CrtOutcome::Empty { merged: vec![1] });
    }

    #[test]
    fn no_classes_is_everything() {
        assert_eq!(residues(crt_intersect(&[], &CrtLimits::default())), (1, vec![0]));
    }

    #[test]
    fn limits_give_inconclusive() {
        let classes: Vec<_> = [7u64, 11, 13, 17, 19].iter().map(|&p| ResidueClass::new(p, 0..p - 1)).collect();
        let tight = CrtLimits { max_modulus: 1000, max_residues: 1 << 20, search_budget: 0 };
        assert!(matches!(crt_intersect(&classes, &tight), CrtOutcome::Inconclusive { .. }));
        let small_set = CrtLimits { max_modulus: 1 << 100, max_residues: 100, search_budget: 0 };
        assert!(matches!(crt_intersect(&classes, &small_set), CrtOutcome::Inconclusive { .. }));
        assert!(matches!(crt_decide(&classes, &small_set), CrtDecision::Inconclusive { .. }));
        let with_search = CrtLimits { search_budget: 1 << 20, ..small_set };
        assert_eq!(crt_decide(&classes, &with_search), CrtDecision::Nonempty);
    }

    #[test]
    fn search_finds_consistent_choices() {
        let classes = [ResidueClass::new(4, [1, 3]), ResidueClass::new(6, [3, 4]), ResidueClass::new(9, [0, 5])];
        match crt_search(&classes, 1000) {
            SearchOutcome::Solution(r) => {
                let x = (0..36u64).find(|x| classes.iter().zip(&r).all(|(c, &ri)| x % c.modulus == ri));
                assert!(x.is_some(), "{r:?}");
            }
            other => panic!("{other:?}"),
        }
        let parity_clash = [ResidueClass::new(2, [1]), ResidueClass::new(6, [3]), ResidueClass::new(4, [0])];
        assert_eq!(crt_search(&parity_clash, 1000), SearchOutcome::Empty);
    }
}
