//! Mordell-Weil sieve through `E1 : y^2 = x(x + 2)(x + 6)` and `P = (6, 24)`.

mod admissible;
mod constraints;
mod sets;
mod table;

pub use admissible::{mw_admissible, table_classes, Admissibility, ClassSource, SieveInteger};
pub use constraints::{derive_symbol_constraints, equality_classes, symbol_constraints, SymbolConstraint};
pub use sets::{
    base_point_mod, compute_m_sets, compute_m_sets_with_nonresidue, divisor_residues, divisor_residues_by_scan,
    e1_mod, phi, signed_residues, DivisorClassData, MwLocalData,
};
pub use table::{MwTable, MwTableHeader, TABLE_FORMAT, TABLE_VERSION};
