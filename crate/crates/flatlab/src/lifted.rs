//! Lifted affine-invariant linear codes: base codes as monomial supports,
//! base-`p` domination and monomial spreading, lift membership, the `k`-flat
//! tester, and the corrector over the lift-membership criterion.
//!
//! A base code is the span of its monomial support, so membership checks are
//! support inclusion. Affine invariance is validated at construction against
//! a finite generator set of the affine group.

use std::collections::BTreeSet;

use crate::corrector::{correct_with, CorrectionOptions, CorrectionTrace};
use crate::flats::AffineFlat;
use crate::gf::{FieldElement, FieldSpec};
use crate::poly::{decode_point, reduce_exponent, Monomial, ReducedPoly, TruthTable};
use crate::report::CheckRecord;
use crate::tester::{self, low_degree_monomials, RestrictionTest, TestReport};
use num::Zero;

use crate::{ratio_of, Error, Ratio, DEFAULT_ENUMERATION_CAP};

/// Digit-wise `>=` of the base-`p` expansions; by Lucas, exactly when the
/// binomial coefficient `(m choose n)` survives mod `p`.
pub fn dominates(m: u64, n: u64, p: u64) -> bool {
    let (mut m, mut n) = (m, n);
    while n > 0 {
        if m % p < n % p {
            return false;
        }
        m /= p;
        n /= p;
    }
    true
}

/// Moves exponent mass `e` from coordinate `i` to coordinate `j`, re-reducing
/// the grown exponent via `x^q = x`. Requires the source exponent to dominate
/// `e` in base `p`.
pub fn spread(
    monomial: &Monomial,
    e: u16,
    i: usize,
    j: usize,
    field: &FieldSpec,
) -> Result<Monomial, Error> {
    if i >= monomial.0.len() || j >= monomial.0.len() {
        return Err(Error::InvalidParameter("spread coordinate out of range".into()));
    }
    let source = monomial.0[i];
    if !dominates(source as u64, e as u64, field.p() as u64) {
        return Err(Error::InvalidParameter(format!(
            "exponent {source} does not dominate {e} in base {}",
            field.p()
        )));
    }
    let mut exps = monomial.0.clone();
    exps[i] = source - e;
    exps[j] = reduce_exponent(exps[j] as u32 + e as u32, field.q() as u16);
    Ok(Monomial(exps))
}

/// An affine-invariant base code on `F_q^t`, given by its monomial support.
#[derive(Clone, Debug)]
pub struct BaseCode {
    pub field: FieldSpec,
    pub t: usize,
    support: BTreeSet<Monomial>,
}

/// An affine map `x -> Ax + b` of `F_q^t`.
struct AffineMap {
    rows: Vec<Vec<FieldElement>>,
    shift: Vec<FieldElement>,
}

impl AffineMap {
    fn identity(field: &FieldSpec, t: usize) -> AffineMap {
        let mut rows = vec![vec![FieldElement::ZERO; t]; t];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = FieldElement::ONE;
        }
        let _ = field;
        AffineMap {
            rows,
            shift: vec![FieldElement::ZERO; t],
        }
    }

    fn apply(&self, field: &FieldSpec, x: &[FieldElement]) -> Vec<FieldElement> {
        let mut out = self.shift.clone();
        for (j, o) in out.iter_mut().enumerate() {
            for (i, &xi) in x.iter().enumerate() {
                *o = field.add(*o, field.mul(self.rows[j][i], xi));
            }
        }
        out
    }
}

/// Generators of the affine group of `F_q^t`: adjacent transpositions, one
/// scaling by a multiplicative generator, one shear, one translation.
fn affine_generators(field: &FieldSpec, t: usize) -> Vec<AffineMap> {
    let mut gens = Vec::new();
    for i in 0..t.saturating_sub(1) {
        let mut g = AffineMap::identity(field, t);
        g.rows.swap(i, i + 1);
        gens.push(g);
    }
    if field.q() > 2 {
        let mut g = AffineMap::identity(field, t);
        g.rows[0][0] = field.multiplicative_generator();
        gens.push(g);
    }
    if t >= 2 {
        let mut g = AffineMap::identity(field, t);
        g.rows[0][1] = FieldElement::ONE;
        gens.push(g);
    }
    let mut g = AffineMap::identity(field, t);
    g.shift[0] = FieldElement::ONE;
    gens.push(g);
    gens
}

/// Composition `m(T(x))` as a reduced polynomial, computed by tabulating and
/// interpolating.
fn compose_monomial(field: &FieldSpec, m: &Monomial, map: &AffineMap) -> ReducedPoly {
    let t = m.0.len();
    let size = (field.q() as usize).pow(t as u32);
    let mut poly = ReducedPoly::zero(t);
    poly.add_term(m.clone(), FieldElement::ONE);
    let mut values = Vec::with_capacity(size);
    let mut x = vec![FieldElement::ZERO; t];
    for idx in 0..size {
        decode_point(field, idx, &mut x);
        let y = map.apply(field, &x);
        values.push(poly.evaluate(field, &y).expect("dims"));
    }
    TruthTable::new(field.clone(), t, values)
        .expect("size matches")
        .interpolate()
}

impl BaseCode {
    /// Validates affine invariance: composing any support monomial with any
    /// generator must keep the support inside `support`.
    pub fn new(
        field: FieldSpec,
        t: usize,
        support: impl IntoIterator<Item = Monomial>,
    ) -> Result<BaseCode, Error> {
        let support: BTreeSet<Monomial> = support.into_iter().collect();
        for m in &support {
            if m.0.len() != t {
                return Err(Error::DimensionMismatch {
                    expected: t,
                    got: m.0.len(),
                });
            }
            if m.0.iter().any(|&e| e as u32 >= field.q()) {
                return Err(Error::InvalidParameter(format!(
                    "monomial {m:?} is not reduced for q = {}",
                    field.q()
                )));
            }
        }
        let code = BaseCode { field, t, support };
        for gen in affine_generators(&code.field, t) {
            for m in code.support.clone() {
                let composed = compose_monomial(&code.field, &m, &gen);
                for (mono, _) in composed.terms() {
                    if !code.support.contains(mono) {
                        return Err(Error::InvalidParameter(format!(
                            "support is not affine invariant: {m:?} composed with a generator produces {mono:?}"
                        )));
                    }
                }
            }
        }
        Ok(code)
    }

    /// The degree-at-most-`d` base code on `F_q^t`.
    pub fn reed_muller(field: &FieldSpec, t: usize, d: u32) -> Result<BaseCode, Error> {
        BaseCode::new(field.clone(), t, low_degree_monomials(field, t, d))
    }

    /// The code of all functions `F_q^t -> F_q`.
    pub fn full(field: &FieldSpec, t: usize) -> Result<BaseCode, Error> {
        BaseCode::new(
            field.clone(),
            t,
            low_degree_monomials(field, t, (field.q() - 1) * t as u32),
        )
    }

    /// The zero code (empty support).
    pub fn zero(field: &FieldSpec, t: usize) -> Result<BaseCode, Error> {
        BaseCode::new(field.clone(), t, Vec::new())
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.support.iter()
    }

    pub fn support_set(&self) -> &BTreeSet<Monomial> {
        &self.support
    }

    /// Membership: `g` lies in the code exactly when its support does.
    pub fn contains_poly(&self, g: &ReducedPoly) -> bool {
        g.support().all(|m| self.support.contains(m))
    }
}

/// Rejects a `k`-variate restriction that is not in the `k`-lift of the base
/// code, i.e. some `t`-flat of `F_q^k` sees a restriction outside the base.
pub struct LiftMembership<'a> {
    pub base: &'a BaseCode,
    pub k: usize,
}

impl RestrictionTest for LiftMembership<'_> {
    fn rejects(&self, restriction: &ReducedPoly) -> bool {
        debug_assert_eq!(restriction.n(), self.k);
        let field = &self.base.field;
        if self.k == self.base.t {
            return !self.base.contains_poly(restriction);
        }
        let table = restriction.tabulate(field);
        for flat in crate::flats::enumerate_flats(field, self.k, self.base.t, u64::MAX)
            .expect("local space enumeration")
        {
            let g = table.restrict_to_flat(&flat).expect("dims");
            if !self.base.contains_poly(&g) {
                return true;
            }
        }
        false
    }

    fn describe(&self) -> String {
        format!("outside Lift_{}(base code)", self.k)
    }
}

/// Whether every `t`-flat restriction of `f` lies in the base code; on
/// failure returns a witness flat.
#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub member: bool,
    pub witness: Option<AffineFlat>,
}

pub fn lift_membership(f: &TruthTable, base: &BaseCode, cap: u64) -> Result<MembershipReport, Error> {
    if f.n < base.t {
        return Err(Error::InvalidParameter(format!(
            "ambient dimension {} below base dimension {}",
            f.n, base.t
        )));
    }
    for flat in crate::flats::enumerate_flats(&f.field, f.n, base.t, cap)? {
        let g = f.restrict_to_flat(&flat)?;
        if !base.contains_poly(&g) {
            return Ok(MembershipReport {
                member: false,
                witness: Some(flat),
            });
        }
    }
    Ok(MembershipReport {
        member: true,
        witness: None,
    })
}

/// Exact or Monte-Carlo rejection probability of the `k`-flat lift tester.
pub fn reject_lifted(
    f: &TruthTable,
    base: &BaseCode,
    k: usize,
    samples_seed: Option<(u64, u64)>,
) -> Result<TestReport, Error> {
    if k < base.t || k > f.n {
        return Err(Error::InvalidParameter(format!(
            "need t <= k <= n, got k = {k}"
        )));
    }
    let test = LiftMembership { base, k };
    match samples_seed {
        None => tester::reject_exact_with(f, k, &test, DEFAULT_ENUMERATION_CAP),
        Some((samples, seed)) => tester::reject_mc_with(f, k, &test, samples, seed),
    }
}

/// The rejection floor and the dimension relation for the lift tester:
/// a non-member of the `(k+1)`-lift rejects `k`-flats with probability at
/// least `1/q`, and adjacent levels satisfy
/// `eps_k <= q^{k-k'} eps_{k'}`.
pub fn lifted_relation_report(
    f: &TruthTable,
    base: &BaseCode,
    k_lo: usize,
    k_hi: usize,
) -> Result<Vec<CheckRecord>, Error> {
    if k_lo < base.t || k_hi < k_lo || k_hi >= f.n {
        return Err(Error::InvalidParameter(format!(
            "need t <= k_lo <= k_hi < n, got {k_lo}..{k_hi}"
        )));
    }
    let q = f.field.q() as u64;
    let membership = lift_membership(f, base, DEFAULT_ENUMERATION_CAP)?;
    let mut records = Vec::new();
    let mut epsilons = Vec::new();
    for k in k_lo..=k_hi {
        let rep = reject_lifted(f, base, k, None)?;
        epsilons.push(rep.exact_epsilon().expect("exact mode").clone());
    }
    if membership.member {
        for (k, eps) in (k_lo..=k_hi).zip(&epsilons) {
            records.push(
                CheckRecord::exact_eq(format!("lift-member-accepts-{k}-flats"), eps, &Ratio::zero())
                    .with_note("members reject nothing"),
            );
        }
        return Ok(records);
    }
    for (k, eps) in (k_lo..=k_hi).zip(&epsilons) {
        if k + 1 == f.n {
            // the 1/q floor is a co-dimension-1 statement
            records.push(CheckRecord::exact_ge(
                format!("lift-rejection-floor-{k}-flats"),
                eps,
                &ratio_of(1, q),
            ));
        }
    }
    for (i, k) in (k_lo..=k_hi).enumerate() {
        for (j, k2) in (k_lo..=k_hi).enumerate().skip(i + 1) {
            let factor = Ratio::from(num::BigInt::from(q).pow((k2 - k) as u32));
            records.push(CheckRecord::exact_le(
                format!("lift-relation-{k2}-vs-{k}"),
                &epsilons[j],
                &(&epsilons[i] * factor),
            ));
        }
    }
    Ok(records)
}

/// The correction pipeline under the lift-membership criterion at the base
/// dimension.
pub fn correct_lifted(
    f: &TruthTable,
    base: &BaseCode,
    options: CorrectionOptions,
) -> Result<CorrectionTrace, Error> {
    let t = options.flat_dim.unwrap_or(base.t);
    if t != base.t {
        return Err(Error::InvalidParameter(
            "lift correction runs at the base dimension".into(),
        ));
    }
    let test = LiftMembership { base, k: t };
    correct_with(f, t, &test, None, options.max_iters, options.cap)
}
