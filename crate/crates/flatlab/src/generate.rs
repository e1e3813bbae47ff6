//! Deterministic instance generation: random functions, random codewords,
//! and corrupted codewords with their ground truth.

use rand::Rng;

use crate::gf::{FieldElement, FieldSpec};
use crate::poly::{ReducedPoly, TruthTable};
use crate::tester::low_degree_monomials;

/// A uniformly random truth table on `F_q^n`.
pub fn random_function<R: Rng>(field: &FieldSpec, n: usize, rng: &mut R) -> TruthTable {
    let size = (field.q() as usize).pow(n as u32);
    let values = (0..size)
        .map(|_| FieldElement(rng.gen_range(0..field.q()) as u16))
        .collect();
    TruthTable::new(field.clone(), n, values).expect("size matches")
}

/// A random polynomial of degree at most `d`: uniform coefficients on every
/// reduced monomial of total degree at most `d`.
pub fn random_codeword<R: Rng>(
    field: &FieldSpec,
    n: usize,
    d: u32,
    rng: &mut R,
) -> ReducedPoly {
    let mut poly = ReducedPoly::zero(n);
    for m in low_degree_monomials(field, n, d) {
        let c = FieldElement(rng.gen_range(0..field.q()) as u16);
        if !c.is_zero() {
            poly.add_term(m, c);
        }
    }
    poly
}

/// Replaces the value at `index` with a uniformly random different one.
pub fn corrupt_at<R: Rng>(table: &TruthTable, index: usize, rng: &mut R) -> TruthTable {
    let old = table.value_at_index(index);
    loop {
        let v = FieldElement(rng.gen_range(0..table.field.q()) as u16);
        if v != old {
            return table.with_value(index, v);
        }
    }
}

/// One recorded corruption.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Corruption {
    pub point_index: usize,
    pub original_value: u16,
    pub corrupted_value: u16,
}

/// A codeword with `m` corruptions at distinct random points, together with
/// the ground truth.
pub struct CorruptedInstance {
    pub table: TruthTable,
    pub original: ReducedPoly,
    pub original_table: TruthTable,
    pub corruptions: Vec<Corruption>,
}

pub fn corrupted_codeword<R: Rng>(
    field: &FieldSpec,
    n: usize,
    d: u32,
    m: usize,
    rng: &mut R,
) -> CorruptedInstance {
    let original = random_codeword(field, n, d, rng);
    let original_table = original.tabulate(field);
    let mut table = original_table.clone();
    let mut picked = std::collections::BTreeSet::new();
    while picked.len() < m.min(table.point_count()) {
        picked.insert(rng.gen_range(0..table.point_count()));
    }
    let mut corruptions = Vec::new();
    for &index in &picked {
        let before = table.value_at_index(index);
        table = corrupt_at(&table, index, rng);
        corruptions.push(Corruption {
            point_index: index,
            original_value: before.value(),
            corrupted_value: table.value_at_index(index).value(),
        });
    }
    CorruptedInstance {
        table,
        original,
        original_table,
        corruptions,
    }
}
