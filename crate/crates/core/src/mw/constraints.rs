use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::sets::MwLocalData;
use super::table::MwTable;
use crate::arith::{crt_decide, CrtDecision, CrtLimits, ResidueClass};
use crate::Result;

/// A condition on Legendre symbols `(D/q)` forced by the residue sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolConstraint {
    Unary { q: u64, symbol: i8 },
    Equal { p: u64, q: u64 },
    Opposite { p: u64, q: u64 },
    Implies { if_q: u64, if_symbol: i8, then_q: u64, then_symbol: i8 },
    /// No symbol combination at `p` and `q` survives.
    Contradiction { p: u64, q: u64 },
}

impl fmt::Display for SymbolConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SymbolConstraint::Unary { q, symbol } => write!(f, "(D/{q})={symbol}"),
            SymbolConstraint::Equal { p, q } => write!(f, "(D/{p})=(D/{q})"),
            SymbolConstraint::Opposite { p, q } => write!(f, "(D/{p})=-(D/{q})"),
            SymbolConstraint::Implies { if_q, if_symbol, then_q, then_symbol } => {
                write!(f, "(D/{if_q})={if_symbol} => (D/{then_q})={then_symbol}")
            }
            SymbolConstraint::Contradiction { p, q } => write!(f, "no D is compatible at {p} and {q}"),
        }
    }
}

fn class(r: &MwLocalData, symbol: i8) -> ResidueClass {
    ResidueClass::new(r.order, r.set_for(symbol).iter().copied())
}

fn compatible(parts: &[ResidueClass]) -> bool {
    let mut classes = parts.to_vec();
    classes.push(ResidueClass::new(2, [1]));
    // every outcome other than a proven empty set counts as compatible
    !matches!(crt_decide(&classes, &CrtLimits::default()), CrtDecision::Empty { .. })
}

fn allowed_symbols(r: &MwLocalData) -> Vec<i8> {
    [1i8, -1].into_iter().filter(|&s| compatible(&[class(r, s)])).collect()
}

/// Constraints from a prebuilt table.
pub fn symbol_constraints(table: &MwTable) -> Vec<SymbolConstraint> {
    let records = &table.records;
    let allowed: Vec<Vec<i8>> = records.iter().map(allowed_symbols).collect();
    let mut out = BTreeSet::new();
    for (r, a) in records.iter().zip(&allowed) {
        match a.as_slice() {
            [s] => {
                out.insert(SymbolConstraint::Unary { q: r.q, symbol: *s });
            }
            [] => {
                out.insert(SymbolConstraint::Contradiction { p: r.q, q: r.q });
            }
            _ => {}
        }
    }
    let mut by_order: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_order.entry(r.order).or_default().push(i);
    }
    let orders: Vec<u64> = by_order.keys().copied().collect();
    for &big in &orders {
        for &small in orders.iter().filter(|&&o| o <= big && big % o == 0) {
            for &i in &by_order[&big] {
                for &j in &by_order[&small] {
                    if big == small && j <= i {
                        continue;
                    }
                    pair_constraints(&records[i], &allowed[i], &records[j], &allowed[j], &mut out);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// `a` has the larger (or equal) order; it becomes the antecedent of implications.
fn pair_constraints(
    a: &MwLocalData,
    sa: &[i8],
    b: &MwLocalData,
    sb: &[i8],
    out: &mut BTreeSet<SymbolConstraint>,
) {
    let mut combos = Vec::new();
    for &s in sa {
        for &t in sb {
            if compatible(&[class(a, s), class(b, t)]) {
                combos.push((s, t));
            }
        }
    }
    if combos.len() == sa.len() * sb.len() {
        return;
    }
    if combos.is_empty() {
        out.insert(SymbolConstraint::Contradiction { p: a.q.min(b.q), q: a.q.max(b.q) });
        return;
    }
    let a_vals: BTreeSet<i8> = combos.iter().map(|c| c.0).collect();
    let b_vals: BTreeSet<i8> = combos.iter().map(|c| c.1).collect();
    if a_vals.len() < sa.len() && a_vals.len() == 1 {
        out.insert(SymbolConstraint::Unary { q: a.q, symbol: *a_vals.iter().next().unwrap() });
    }
    if b_vals.len() < sb.len() && b_vals.len() == 1 {
        out.insert(SymbolConstraint::Unary { q: b.q, symbol: *b_vals.iter().next().unwrap() });
    }
    if sa.len() == 2 && sb.len() == 2 {
        let (p, q) = (a.q.min(b.q), a.q.max(b.q));
        match combos.len() {
            2 if a_vals.len() == 2 && b_vals.len() == 2 => {
                if combos.iter().all(|(s, t)| s == t) {
                    out.insert(SymbolConstraint::Equal { p, q });
                } else {
                    out.insert(SymbolConstraint::Opposite { p, q });
                }
            }
            3 => {
                let (s, t) = sa
                    .iter()
                    .flat_map(|&s| sb.iter().map(move |&t| (s, t)))
                    .find(|c| !combos.contains(c))
                    .expect("one combination is missing");
                out.insert(SymbolConstraint::Implies { if_q: a.q, if_symbol: s, then_q: b.q, then_symbol: -t });
            }
            _ => {}
        }
    }
}

/// Build the table for `q <= q_max`, `O_q <= order_bound` and derive its constraints.
pub fn derive_symbol_constraints(q_max: u64, order_bound: u64) -> Result<Vec<SymbolConstraint>> {
    Ok(symbol_constraints(&MwTable::build(q_max, order_bound)?))
}

/// Group the primes linked by `Equal` constraints.
pub fn equality_classes(constraints: &[SymbolConstraint]) -> Vec<Vec<u64>> {
    let mut parent: BTreeMap<u64, u64> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<u64, u64>, x: u64) -> u64 {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let root = find(parent, p);
        parent.insert(x, root);
        root
    }
    for c in constraints {
        if let SymbolConstraint::Equal { p, q } = *c {
            let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
            if rp != rq {
                parent.insert(rp.max(rq), rp.min(rq));
            }
        }
    }
    let keys: Vec<u64> = parent.keys().copied().collect();
    let mut groups: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for k in keys {
        let r = find(&mut parent, k);
        groups.entry(r).or_default().push(k);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_range_examples() {
        let cs = derive_symbol_constraints(30, 20).unwrap();
        let text: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
        for want in ["(D/17)=1", "(D/23)=1", "(D/7)=(D/13)", "(D/29)=1 => (D/11)=1", "(D/11)=(D/19)"] {
            assert!(text.iter().any(|t| t == want), "missing {want} in {text:?}");
        }
        assert!(!cs.iter().any(|c| matches!(c, SymbolConstraint::Contradiction { .. })));
        assert_eq!(equality_classes(&cs), vec![vec![7, 13], vec![11, 19]]);
    }

    #[test]
    fn range_3000_reproduces_published_list() {
        let cs = derive_symbol_constraints(3000, 200).unwrap();
        let text: BTreeSet<String> = cs.iter().map(|c| c.to_string()).collect();
        let wanted = [
            "(D/17)=1", "(D/23)=1", "(D/41)=1", "(D/191)=1", "(D/281)=1", "(D/2027)=1",
            "(D/7)=(D/13)", "(D/11)=(D/19)", "(D/19)=(D/241)", "(D/47)=(D/73)", "(D/149)=(D/673)",
            "(D/43)=(D/1723)", "(D/577)=(D/2281)", "(D/2111)=(D/2521)",
            "(D/29)=1 => (D/11)=1", "(D/149)=1 => (D/31)=1", "(D/617)=1 => (D/37)=1", "(D/37)=1 => (D/7)=1",
            "(D/83)=-1 => (D/11)=-1", "(D/2347)=-1 => (D/47)=-1",
        ];
        for want in wanted {
            assert!(text.contains(want), "missing {want}");
        }
    }

    #[test]
    fn constraints_hold_for_known_d() {
        let cs = derive_symbol_constraints(400, 60).unwrap();
        let sym = |d: u64, q: u64| crate::arith::jacobi_u64(d % q, q);
        for d in [409u64, 4688329] {
            for c in &cs {
                let ok = match *c {
                    SymbolConstraint::Unary { q, symbol } => d % q == 0 || sym(d, q) == symbol,
                    SymbolConstraint::Equal { p, q } => sym(d, p) == sym(d, q) || d % p == 0 || d % q == 0,
                    SymbolConstraint::Opposite { p, q } => sym(d, p) == -sym(d, q) || d % p == 0 || d % q == 0,
                    SymbolConstraint::Implies { if_q, if_symbol, then_q, then_symbol } => {
                        sym(d, if_q) != if_symbol || sym(d, then_q) == then_symbol || d % then_q == 0
                    }
                    SymbolConstraint::Contradiction { .. } => false,
                };
                assert!(ok, "{d} violates {c}");
            }
        }
    }
}
