//! Reduced multivariate polynomials over `F_q`, dense truth tables,
//! interpolation, degree, and restriction to affine flats.
//!
//! A polynomial is *reduced* when every individual exponent is at most
//! `q - 1`, using `x^q = x` on `F_q`. Reduced form is unique per function, so
//! interpolation and tabulation are mutually inverse.

use std::collections::BTreeMap;
use std::fmt;

use crate::flats::AffineFlat;
use crate::gf::{FieldElement, FieldSpec};
use crate::Error;

/// A reduced monomial: one exponent in `[0, q-1]` per variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn constant(n: usize) -> Monomial {
        Monomial(vec![0; n])
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&e| e == 0) {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{e}", i + 1)?;
            }
        }
        Ok(())
    }
}

/// A multivariate polynomial over `F_q` in reduced form. No zero coefficients
/// are stored.
#[derive(Clone, PartialEq, Eq)]
pub struct ReducedPoly {
    n: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl fmt::Debug for ReducedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*{:?}", c.value(), m)?;
        }
        Ok(())
    }
}

impl ReducedPoly {
    pub fn zero(n: usize) -> ReducedPoly {
        ReducedPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: FieldElement) -> ReducedPoly {
        let mut p = ReducedPoly::zero(n);
        p.add_term(Monomial::constant(n), c);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FieldElement)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).copied().unwrap_or(FieldElement::ZERO)
    }

    /// Inserts `c * m`, combining with an existing term. Dropping to zero
    /// removes the monomial.
    pub fn add_term_in(&mut self, field: &FieldSpec, m: Monomial, c: FieldElement) {
        debug_assert_eq!(m.0.len(), self.n);
        let cur = self.terms.get(&m).copied().unwrap_or(FieldElement::ZERO);
        let new = field.add(cur, c);
        if new.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, new);
        }
    }

    /// Inserts a term assuming the monomial is not yet present.
    pub fn add_term(&mut self, m: Monomial, c: FieldElement) {
        debug_assert_eq!(m.0.len(), self.n);
        if !c.is_zero() {
            let prev = self.terms.insert(m, c);
            debug_assert!(prev.is_none());
        }
    }

    /// Max total degree of the support; `None` is the degree of the zero
    /// polynomial (below every integer, so `deg <= d` holds vacuously).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn degree_at_most(&self, d: u32) -> bool {
        self.degree().map_or(true, |deg| deg <= d)
    }

    pub fn add(&self, field: &FieldSpec, other: &ReducedPoly) -> ReducedPoly {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term_in(field, m.clone(), c);
        }
        out
    }

    pub fn scale(&self, field: &FieldSpec, c: FieldElement) -> ReducedPoly {
        let mut out = ReducedPoly::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (m, a) in self.terms() {
            out.add_term(m.clone(), field.mul(a, c));
        }
        out
    }

    /// Product, with exponents re-reduced via `x^q = x`.
    pub fn mul(&self, field: &FieldSpec, other: &ReducedPoly) -> ReducedPoly {
        debug_assert_eq!(self.n, other.n);
        let q = field.q() as u16;
        let mut out = ReducedPoly::zero(self.n);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                let exps: Vec<u16> = ma
                    .0
                    .iter()
                    .zip(&mb.0)
                    .map(|(&a, &b)| reduce_exponent(a as u32 + b as u32, q))
                    .collect();
                out.add_term_in(field, Monomial(exps), field.mul(ca, cb));
            }
        }
        out
    }

    /// Standard evaluation at a point of `F_q^n`.
    pub fn evaluate(&self, field: &FieldSpec, x: &[FieldElement]) -> Result<FieldElement, Error> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut acc = FieldElement::ZERO;
        for (m, c) in self.terms() {
            let mut term = c;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = field.mul(term, field.pow(x[i], e as u64));
                }
            }
            acc = field.add(acc, term);
        }
        Ok(acc)
    }

    /// Dense evaluation over all of `F_q^n` in canonical point order.
    pub fn tabulate(&self, field: &FieldSpec) -> TruthTable {
        let size = (field.q() as u64).pow(self.n as u32) as usize;
        let mut values = vec![FieldElement::ZERO; size];
        let mut point = vec![FieldElement::ZERO; self.n];
        for (idx, v) in values.iter_mut().enumerate() {
            decode_point(field, idx, &mut point);
            *v = self.evaluate(field, &point).expect("dimension fixed");
        }
        TruthTable {
            field: field.clone(),
            n: self.n,
            values,
        }
    }
}

/// Reduces an exponent via `x^q = x`: positive exponents stay in `[1, q-1]`.
pub fn reduce_exponent(e: u32, q: u16) -> u16 {
    if e == 0 {
        0
    } else {
        ((e - 1) % (q as u32 - 1) + 1) as u16
    }
}

/// A dense table of values of a function `F_q^n -> F_q`, indexed by points in
/// canonical order: point `m` has `i`-th coordinate equal to the `i`-th
/// base-`q` digit of `m`, least significant digit first.
#[derive(Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub field: FieldSpec,
    pub n: usize,
    pub values: Vec<FieldElement>,
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({:?}, n={}, {} points)", self.field, self.n, self.values.len())
    }
}

pub fn decode_point(field: &FieldSpec, mut index: usize, out: &mut [FieldElement]) {
    let q = field.q() as usize;
    for c in out.iter_mut() {
        *c = FieldElement((index % q) as u16);
        index /= q;
    }
}

pub fn encode_point(field: &FieldSpec, point: &[FieldElement]) -> usize {
    let q = field.q() as usize;
    let mut idx = 0usize;
    for &c in point.iter().rev() {
        idx = idx * q + c.value() as usize;
    }
    idx
}

impl TruthTable {
    pub fn new(field: FieldSpec, n: usize, values: Vec<FieldElement>) -> Result<TruthTable, Error> {
        let expected = (field.q() as u64).pow(n as u32) as usize;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(TruthTable { field, n, values })
    }

    pub fn point_count(&self) -> usize {
        self.values.len()
    }

    pub fn value_at_index(&self, idx: usize) -> FieldElement {
        self.values[idx]
    }

    pub fn value_at(&self, point: &[FieldElement]) -> FieldElement {
        self.values[encode_point(&self.field, point)]
    }

    pub fn with_value(&self, idx: usize, v: FieldElement) -> TruthTable {
        let mut t = self.clone();
        t.values[idx] = v;
        t
    }

    pub fn hamming_distance(&self, other: &TruthTable) -> usize {
        self.values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// The unique reduced polynomial agreeing with this table on all points.
    ///
    /// Works one coordinate axis at a time: along each axis the values are
    /// replaced by the coefficients of the univariate indicator expansion
    /// `v(x) = sum_y v(y) (1 - (x - y)^{q-1})`, whose kernel the field
    /// context precomputes.
    pub fn interpolate(&self) -> ReducedPoly {
        let field = &self.field;
        let q = field.q() as usize;
        let mut work: Vec<FieldElement> = self.values.clone();
        let mut stride = 1usize;
        let mut in_buf = vec![FieldElement::ZERO; q];
        for _axis in 0..self.n {
            let block = stride * q;
            for start in (0..work.len()).step_by(block) {
                for off in 0..stride {
                    for y in 0..q {
                        in_buf[y] = work[start + off + y * stride];
                    }
                    for j in 0..q {
                        let mut acc = FieldElement::ZERO;
                        for (y, &v) in in_buf.iter().enumerate() {
                            if !v.is_zero() {
                                acc = field.add(acc, field.mul(v, field.interp_coeff(j, y as u16)));
                            }
                        }
                        work[start + off + j * stride] = acc;
                    }
                }
            }
            stride *= q;
        }
        let mut poly = ReducedPoly::zero(self.n);
        let mut exps = vec![FieldElement::ZERO; self.n];
        for (idx, &c) in work.iter().enumerate() {
            if !c.is_zero() {
                decode_point(field, idx, &mut exps);
                poly.add_term(Monomial(exps.iter().map(|e| e.value()).collect()), c);
            }
        }
        poly
    }

    /// Degree of the unique reduced polynomial for this table.
    pub fn degree(&self) -> Option<u32> {
        self.interpolate().degree()
    }

    /// The restriction `g(u_1..u_t) = f(base + sum u_j b_j)` along the flat's
    /// canonical parametrization, as a reduced polynomial in `t` variables.
    pub fn restrict_to_flat(&self, flat: &AffineFlat) -> Result<ReducedPoly, Error> {
        Ok(self.gather_on_flat(flat)?.interpolate())
    }

    /// The values of the function on the flat's points, in the flat's
    /// canonical local point order, as a `dim(flat)`-variate table.
    pub fn gather_on_flat(&self, flat: &AffineFlat) -> Result<TruthTable, Error> {
        if flat.ambient_dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: flat.ambient_dim(),
            });
        }
        let values: Vec<FieldElement> = flat
            .point_indices(&self.field)
            .into_iter()
            .map(|idx| self.values[idx])
            .collect();
        TruthTable::new(self.field.clone(), flat.dim(), values)
    }
}

/// The reduced polynomial of the indicator `1_{x=y}`, given by
/// `prod_i (1 - (x_i - y_i)^{q-1})`. Its degree is exactly `n(q-1)` and its
/// support contains the top monomial `prod_i x_i^{q-1}`.
pub fn point_indicator(field: &FieldSpec, y: &[FieldElement]) -> ReducedPoly {
    let n = y.len();
    let q = field.q() as usize;
    let mut poly = ReducedPoly::zero(n);
    let mut exps = vec![0u16; n];
    // tensor product of the univariate kernels, enumerated by odometer
    loop {
        let mut c = FieldElement::ONE;
        for i in 0..n {
            c = field.mul(c, field.interp_coeff(exps[i] as usize, y[i].value()));
            if c.is_zero() {
                break;
            }
        }
        if !c.is_zero() {
            poly.add_term(Monomial(exps.clone()), c);
        }
        let mut i = 0;
        loop {
            if i == n {
                return poly;
            }
            exps[i] += 1;
            if (exps[i] as usize) < q {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flats;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        FieldSpec::new(2, 1).unwrap()
    }

    fn random_poly(field: &FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> ReducedPoly {
        let q = field.q();
        let mut poly = ReducedPoly::zero(n);
        let monomial_count = (q as u64).pow(n as u32);
        for m in 0..monomial_count {
            if rng.gen_bool(0.3) {
                let mut exps = vec![0u16; n];
                let mut v = m;
                for e in exps.iter_mut() {
                    *e = (v % q as u64) as u16;
                    v /= q as u64;
                }
                let c = FieldElement(rng.gen_range(0..q) as u16);
                if !c.is_zero() {
                    poly.add_term(Monomial(exps), c);
                }
            }
        }
        poly
    }

    #[test]
    fn evaluate_basics() {
        let field = f2();
        let zero = ReducedPoly::zero(2);
        assert_eq!(
            zero.evaluate(&field, &[FieldElement(1), FieldElement(1)]).unwrap(),
            FieldElement::ZERO
        );

        let mut and = ReducedPoly::zero(2);
        and.add_term(Monomial(vec![1, 1]), FieldElement::ONE);
        assert_eq!(
            and.evaluate(&field, &[FieldElement(1), FieldElement(1)]).unwrap(),
            FieldElement::ONE
        );

        let f3 = FieldSpec::new(3, 1).unwrap();
        let mut sq = ReducedPoly::zero(1);
        sq.add_term(Monomial(vec![2]), FieldElement::ONE);
        assert_eq!(sq.evaluate(&f3, &[FieldElement(2)]).unwrap(), FieldElement(1));

        assert!(and.evaluate(&field, &[FieldElement(1)]).is_err());
    }

    #[test]
    fn interpolate_all_zeros_is_zero_poly() {
        let field = f2();
        let t = TruthTable::new(field, 2, vec![FieldElement::ZERO; 4]).unwrap();
        assert!(t.interpolate().is_zero());
        assert_eq!(t.degree(), None);
    }

    #[test]
    fn interpolate_and_table() {
        // AND on F_2^2 has table [0,0,0,1] in canonical order
        let field = f2();
        let t = TruthTable::new(
            field,
            2,
            vec![FieldElement(0), FieldElement(0), FieldElement(0), FieldElement(1)],
        )
        .unwrap();
        let p = t.interpolate();
        let mut expected = ReducedPoly::zero(2);
        expected.add_term(Monomial(vec![1, 1]), FieldElement::ONE);
        assert_eq!(p, expected);
    }

    #[test]
    fn interpolate_indicator_f3() {
        // 1_{x=0} on F_3 is 1 - x^2
        let field = FieldSpec::new(3, 1).unwrap();
        let t = TruthTable::new(
            field.clone(),
            1,
            vec![FieldElement(1), FieldElement(0), FieldElement(0)],
        )
        .unwrap();
        let p = t.interpolate();
        let mut expected = ReducedPoly::zero(1);
        expected.add_term(Monomial(vec![0]), FieldElement(1));
        expected.add_term(Monomial(vec![2]), FieldElement(2));
        assert_eq!(p, expected);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn round_trip_random_polys() {
        // 1000 random reduced polynomials across q in {2,3,4}, n <= 4
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let fields = [
            FieldSpec::new(2, 1).unwrap(),
            FieldSpec::new(3, 1).unwrap(),
            FieldSpec::new(2, 2).unwrap(),
        ];
        let mut done = 0;
        'outer: loop {
            for field in &fields {
                for n in 1..=4usize {
                    if field.q() == 4 && n == 4 {
                        continue; // 256 points is enough; keep the loop tight
                    }
                    let p = random_poly(field, n, &mut rng);
                    let t = p.tabulate(field);
                    assert_eq!(t.interpolate(), p);
                    done += 1;
                    if done >= 1000 {
                        break 'outer;
                    }
                }
            }
        }
    }

    #[test]
    fn degree_examples() {
        let field = f2();
        let mut p = ReducedPoly::zero(3);
        p.add_term(Monomial(vec![1, 1, 0]), FieldElement::ONE);
        p.add_term(Monomial(vec![0, 0, 1]), FieldElement::ONE);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(ReducedPoly::zero(3).degree(), None);
        assert!(ReducedPoly::zero(3).degree_at_most(0));

        // indicator degree is n(q-1)
        for (p_, r, n) in [(2u16, 1u16, 3usize), (3, 1, 2), (2, 2, 2)] {
            let f = FieldSpec::new(p_, r).unwrap();
            let y: Vec<FieldElement> = (0..n).map(|i| f.elem((i as u32) % f.q())).collect();
            let ind = point_indicator(&f, &y);
            assert_eq!(ind.degree(), Some(n as u32 * (f.q() - 1)));
            let top = Monomial(vec![(f.q() - 1) as u16; n]);
            assert!(!ind.coefficient(&top).is_zero());
        }
    }

    #[test]
    fn point_indicator_examples() {
        let field = f2();
        // n=1, q=2, y=1 -> x1
        let ind = point_indicator(&field, &[FieldElement(1)]);
        let mut expected = ReducedPoly::zero(1);
        expected.add_term(Monomial(vec![1]), FieldElement::ONE);
        assert_eq!(ind, expected);

        // evaluates to 1 at y and 0 elsewhere
        let f9 = FieldSpec::new(3, 2).unwrap();
        let y = [FieldElement(4), FieldElement(7)];
        let ind = point_indicator(&f9, &y);
        let table = ind.tabulate(&f9);
        for idx in 0..table.point_count() {
            let mut pt = [FieldElement::ZERO; 2];
            decode_point(&f9, idx, &mut pt);
            let expect = if pt == y { 1 } else { 0 };
            assert_eq!(table.value_at_index(idx).value(), expect);
        }
    }

    #[test]
    fn point_indicators_sum_to_one() {
        let field = FieldSpec::new(3, 1).unwrap();
        let n = 2;
        let mut sum = ReducedPoly::zero(n);
        let mut pt = vec![FieldElement::ZERO; n];
        for idx in 0..9 {
            decode_point(&field, idx, &mut pt);
            sum = sum.add(&field, &point_indicator(&field, &pt));
        }
        assert_eq!(sum, ReducedPoly::constant(n, FieldElement::ONE));
    }

    #[test]
    fn restriction_examples() {
        let field = f2();
        let mut p = ReducedPoly::zero(2);
        p.add_term(Monomial(vec![1, 1]), FieldElement::ONE);
        let table = p.tabulate(&field);

        // restriction to a 0-flat is the constant f(y)
        let point_flat =
            flats::canonicalize(&field, vec![FieldElement(1), FieldElement(1)], vec![]).unwrap();
        let g = table.restrict_to_flat(&point_flat).unwrap();
        assert_eq!(g, ReducedPoly::constant(0, FieldElement::ONE));

        // f = x1 x2 on the diagonal line becomes u (u^2 reduces to u)
        let diag = flats::canonicalize(
            &field,
            vec![FieldElement(0), FieldElement(0)],
            vec![vec![FieldElement(1), FieldElement(1)]],
        )
        .unwrap();
        let g = table.restrict_to_flat(&diag).unwrap();
        let mut expected = ReducedPoly::zero(1);
        expected.add_term(Monomial(vec![1]), FieldElement::ONE);
        assert_eq!(g, expected);
    }

    #[test]
    fn restriction_cannot_raise_degree() {
        // exhaustive at q=2, n=4, over random polynomials and all flats
        let field = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let p = random_poly(&field, 4, &mut rng);
            let table = p.tabulate(&field);
            let deg = p.degree();
            for t in 0..=4usize {
                for flat in flats::enumerate_flats(&field, 4, t, 1 << 20).unwrap() {
                    let g = table.restrict_to_flat(&flat).unwrap();
                    match (g.degree(), deg) {
                        (Some(dg), Some(df)) => assert!(dg <= df),
                        (Some(_), None) => panic!("restriction of zero must be zero"),
                        (None, _) => {}
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_to_full_space_is_identity() {
        let field = FieldSpec::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_poly(&field, 3, &mut rng);
        let table = p.tabulate(&field);
        let full: Vec<AffineFlat> = flats::enumerate_flats(&field, 3, 3, 10).unwrap();
        assert_eq!(full.len(), 1);
        let g = table.restrict_to_flat(&full[0]).unwrap();
        assert_eq!(g, p);
    }

    #[test]
    fn mul_reduces_exponents() {
        let field = f2();
        let mut x = ReducedPoly::zero(1);
        x.add_term(Monomial(vec![1]), FieldElement::ONE);
        // x * x = x^2 = x on F_2
        assert_eq!(x.mul(&field, &x), x);
        assert_eq!(reduce_exponent(4, 3), 2);
        assert_eq!(reduce_exponent(3, 3), 1);
        assert_eq!(reduce_exponent(0, 3), 0);
    }
}
