//! Canonical affine flats of `F_q^n`: enumeration, sampling, shadows, the
//! up-down random walk on the affine Grassmann graph, expansion, zoom
//! families, and the four pseudo-randomness measures.
//!
//! A flat is stored canonically: the linear part as a reduced row-echelon
//! basis and the base point with zeros in all pivot columns. Two values are
//! equal exactly when they denote the same point set, so sets of flats are
//! plain value sets and all measures are exact rationals.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigUint, One, Zero};
use rand::Rng;

use crate::gf::{FieldElement, FieldSpec};
use crate::poly::encode_point;
use crate::{Error, Ratio};

/// A canonicalized `t`-dimensional affine subspace of `F_q^n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineFlat {
    n: usize,
    /// Linear part, `t` rows in reduced row-echelon form.
    basis: Vec<Vec<FieldElement>>,
    /// Base point, reduced to have zeros in all pivot columns.
    base: Vec<FieldElement>,
}

impl fmt::Debug for AffineFlat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Flat(base={:?}, dirs={:?})", self.base, self.basis)
    }
}

fn dot(field: &FieldSpec, u: &[FieldElement], v: &[FieldElement]) -> FieldElement {
    let mut acc = FieldElement::ZERO;
    for (&a, &b) in u.iter().zip(v) {
        acc = field.add(acc, field.mul(a, b));
    }
    acc
}

/// In-place reduced row echelon form; returns pivot columns. Zero rows sink
/// to the bottom.
pub(crate) fn rref(field: &FieldSpec, rows: &mut Vec<Vec<FieldElement>>) -> Vec<usize> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(src) = (row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(row, src);
        let inv = field.inv(rows[row][col]).expect("pivot nonzero");
        for c in rows[row].clone().iter().enumerate() {
            rows[row][c.0] = field.mul(*c.1, inv);
        }
        for i in 0..rows.len() {
            if i != row && !rows[i][col].is_zero() {
                let factor = rows[i][col];
                for j in 0..n {
                    let sub = field.mul(factor, rows[row][j]);
                    rows[i][j] = field.sub(rows[i][j], sub);
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    pivots
}

/// Eliminates the pivot coordinates of `v` against RREF `rows`; what remains
/// is zero exactly when `v` lies in the row space.
pub(crate) fn reduce_vector(
    field: &FieldSpec,
    rows: &[Vec<FieldElement>],
    pivots: &[usize],
    v: &mut [FieldElement],
) {
    for (row, &p) in rows.iter().zip(pivots) {
        let c = v[p];
        if !c.is_zero() {
            for j in 0..v.len() {
                v[j] = field.sub(v[j], field.mul(c, row[j]));
            }
        }
    }
}

/// Canonicalizes the flat `base + span(vectors)`. Errors if the vectors are
/// linearly dependent.
pub fn canonicalize(
    field: &FieldSpec,
    base: Vec<FieldElement>,
    vectors: Vec<Vec<FieldElement>>,
) -> Result<AffineFlat, Error> {
    let n = base.len();
    for v in &vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    let t = vectors.len();
    let mut rows = vectors;
    let pivots = rref(field, &mut rows);
    if pivots.len() != t {
        return Err(Error::DependentVectors);
    }
    let mut base = base;
    reduce_vector(field, &rows, &pivots, &mut base);
    Ok(AffineFlat { n, basis: rows, base })
}

impl AffineFlat {
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn base(&self) -> &[FieldElement] {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }

    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|row| row.iter().position(|c| !c.is_zero()).expect("no zero rows"))
            .collect()
    }

    pub fn contains(&self, field: &FieldSpec, point: &[FieldElement]) -> bool {
        let mut v: Vec<FieldElement> = point
            .iter()
            .zip(&self.base)
            .map(|(&a, &b)| field.sub(a, b))
            .collect();
        reduce_vector(field, &self.basis, &self.pivots(), &mut v);
        v.iter().all(|c| c.is_zero())
    }

    pub fn linear_part_contains(&self, field: &FieldSpec, z: &[FieldElement]) -> bool {
        let mut v = z.to_vec();
        reduce_vector(field, &self.basis, &self.pivots(), &mut v);
        v.iter().all(|c| c.is_zero())
    }

    /// The point `base + sum u_i basis_i` for local coordinates `u`.
    pub fn point_from_local(&self, field: &FieldSpec, u: &[FieldElement]) -> Vec<FieldElement> {
        debug_assert_eq!(u.len(), self.dim());
        let mut out = self.base.clone();
        for (&c, row) in u.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for j in 0..self.n {
                out[j] = field.add(out[j], field.mul(c, row[j]));
            }
        }
        out
    }

    /// All `q^t` points of the flat in canonical local order, as indices into
    /// a dense truth table.
    pub fn point_indices(&self, field: &FieldSpec) -> Vec<usize> {
        let q = field.q() as usize;
        let t = self.dim();
        let count = q.pow(t as u32);
        let mut out = Vec::with_capacity(count);
        let mut u = vec![FieldElement::ZERO; t];
        for _ in 0..count {
            out.push(encode_point(field, &self.point_from_local(field, &u)));
            let mut i = 0;
            while i < t {
                let next = u[i].value() as usize + 1;
                if next < q {
                    u[i] = FieldElement(next as u16);
                    break;
                }
                u[i] = FieldElement::ZERO;
                i += 1;
            }
        }
        out
    }

    /// All `(t+1)`-flats containing this flat.
    pub fn superflats(&self, field: &FieldSpec) -> BTreeSet<AffineFlat> {
        debug_assert!(self.dim() < self.n, "already the full space");
        let q = field.q() as usize;
        let total = q.pow(self.n as u32);
        let mut out = BTreeSet::new();
        let mut w = vec![FieldElement::ZERO; self.n];
        for idx in 0..total {
            crate::poly::decode_point(field, idx, &mut w);
            if self.linear_part_contains(field, &w) {
                continue;
            }
            let mut vectors = self.basis.clone();
            vectors.push(w.clone());
            out.insert(canonicalize(field, self.base.clone(), vectors).expect("independent"));
        }
        out
    }

    /// All `(t-1)`-dimensional flats contained in this flat.
    pub fn subflats_one_down(&self, field: &FieldSpec) -> Vec<AffineFlat> {
        let t = self.dim();
        debug_assert!(t >= 1);
        enumerate_flats(field, t, t - 1, u64::MAX)
            .expect("local enumeration is small")
            .into_iter()
            .map(|local| self.embed(field, &local))
            .collect()
    }

    /// Maps a flat in this flat's local coordinates to ambient coordinates.
    pub fn embed(&self, field: &FieldSpec, local: &AffineFlat) -> AffineFlat {
        debug_assert_eq!(local.n, self.dim());
        let base = self.point_from_local(field, &local.base);
        let vectors: Vec<Vec<FieldElement>> = local
            .basis
            .iter()
            .map(|v| {
                let mut out = vec![FieldElement::ZERO; self.n];
                for (&c, row) in v.iter().zip(&self.basis) {
                    if !c.is_zero() {
                        for j in 0..self.n {
                            out[j] = field.add(out[j], field.mul(c, row[j]));
                        }
                    }
                }
                out
            })
            .collect();
        canonicalize(field, base, vectors).expect("embedding preserves independence")
    }
}

/// The Gaussian binomial coefficient `[n, t]_q`: the number of `t`-dimensional
/// linear subspaces of `F_q^n`.
pub fn gaussian_binomial(n: usize, t: usize, q: u32) -> BigUint {
    if t > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..t {
        num *= q.pow((n - i) as u32) - BigUint::one();
        den *= q.pow((i + 1) as u32) - BigUint::one();
    }
    num / den
}

/// The number of `t`-flats of `F_q^n`: `q^{n-t} [n, t]_q`.
pub fn count_flats(n: usize, t: usize, q: u32) -> Result<BigUint, Error> {
    if t > n {
        return Err(Error::InvalidParameter(format!(
            "flat dimension {t} exceeds ambient dimension {n}"
        )));
    }
    Ok(BigUint::from(q).pow((n - t) as u32) * gaussian_binomial(n, t, q))
}

fn lex_combinations(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            rec(c + 1, n, t, cur, out);
            cur.pop();
        }
    }
    rec(0, n, t, &mut cur, &mut out);
    out
}

/// Enumerates every `t`-flat of `F_q^n` exactly once, in canonical form, in a
/// deterministic order: pivot pattern, then basis entries, then base.
/// Errors when the count exceeds `cap` (use Monte Carlo sampling instead).
pub fn enumerate_flats(
    field: &FieldSpec,
    n: usize,
    t: usize,
    cap: u64,
) -> Result<Vec<AffineFlat>, Error> {
    let total = count_flats(n, t, field.q())?;
    if total > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            needed: total.to_string(),
            cap,
        });
    }
    let q = field.q() as usize;
    let mut out = Vec::with_capacity(u64::try_from(&total).unwrap() as usize);
    for pivots in lex_combinations(n, t) {
        // free positions of the RREF shape: in row i, columns right of the
        // pivot that are not pivots themselves
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for col in p + 1..n {
                if !pivots.contains(&col) {
                    free.push((i, col));
                }
            }
        }
        let base_cols: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();

        let mut basis_counter = vec![0u16; free.len()];
        loop {
            let mut basis = vec![vec![FieldElement::ZERO; n]; t];
            for (i, &p) in pivots.iter().enumerate() {
                basis[i][p] = FieldElement::ONE;
            }
            for (&(row, col), &v) in free.iter().zip(&basis_counter) {
                basis[row][col] = FieldElement(v);
            }
            let mut base_counter = vec![0u16; base_cols.len()];
            loop {
                let mut base = vec![FieldElement::ZERO; n];
                for (&col, &v) in base_cols.iter().zip(&base_counter) {
                    base[col] = FieldElement(v);
                }
                out.push(AffineFlat {
                    n,
                    basis: basis.clone(),
                    base,
                });
                if !advance(&mut base_counter, q) {
                    break;
                }
            }
            if !advance(&mut basis_counter, q) {
                break;
            }
        }
    }
    debug_assert_eq!(BigUint::from(out.len() as u64), total);
    Ok(out)
}

/// Little-endian odometer increment; false once all digits wrapped.
fn advance(counter: &mut [u16], q: usize) -> bool {
    for d in counter.iter_mut() {
        let next = d.wrapping_add(1);
        if (next as usize) < q {
            *d = next;
            return true;
        }
        *d = 0;
    }
    false
}

/// A uniformly random `t`-flat: rejection-sample `t` independent vectors,
/// pick a random base, canonicalize.
pub fn sample_flat<R: Rng>(field: &FieldSpec, n: usize, t: usize, rng: &mut R) -> AffineFlat {
    assert!(t <= n);
    let q = field.q();
    loop {
        let vectors: Vec<Vec<FieldElement>> = (0..t)
            .map(|_| (0..n).map(|_| FieldElement(rng.gen_range(0..q) as u16)).collect())
            .collect();
        let base: Vec<FieldElement> =
            (0..n).map(|_| FieldElement(rng.gen_range(0..q) as u16)).collect();
        match canonicalize(field, base, vectors) {
            Ok(flat) => return flat,
            Err(Error::DependentVectors) => continue,
            Err(e) => unreachable!("sampling cannot fail otherwise: {e}"),
        }
    }
}

/// One up-down step of the affine Grassmann walk: a uniform `(t+1)`-superflat,
/// then a uniform `t`-subflat of it.
pub fn walk_step<R: Rng>(
    field: &FieldSpec,
    flat: &AffineFlat,
    rng: &mut R,
) -> Result<AffineFlat, Error> {
    let (n, t) = (flat.ambient_dim(), flat.dim());
    if t >= n {
        return Err(Error::InvalidParameter(
            "the full space has no superflat to walk through".into(),
        ));
    }
    let q = field.q();
    let up = loop {
        let w: Vec<FieldElement> =
            (0..n).map(|_| FieldElement(rng.gen_range(0..q) as u16)).collect();
        if !flat.linear_part_contains(field, &w) {
            let mut vectors = flat.basis.clone();
            vectors.push(w);
            break canonicalize(field, flat.base.clone(), vectors)?;
        }
    };
    let local = sample_flat(field, t + 1, t, rng);
    Ok(up.embed(field, &local))
}

/// A set of equal-dimension flats with exact counting-based measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatSet {
    pub field: FieldSpec,
    pub n: usize,
    pub t: usize,
    pub members: BTreeSet<AffineFlat>,
}

impl FlatSet {
    pub fn empty(field: FieldSpec, n: usize, t: usize) -> FlatSet {
        FlatSet {
            field,
            n,
            t,
            members: BTreeSet::new(),
        }
    }

    pub fn from_members(
        field: FieldSpec,
        n: usize,
        t: usize,
        members: impl IntoIterator<Item = AffineFlat>,
    ) -> Result<FlatSet, Error> {
        let mut set = FlatSet::empty(field, n, t);
        for m in members {
            if m.ambient_dim() != n || m.dim() != t {
                return Err(Error::DimensionMismatch {
                    expected: t,
                    got: m.dim(),
                });
            }
            set.members.insert(m);
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, flat: &AffineFlat) -> bool {
        self.members.contains(flat)
    }

    pub fn total_flats(&self) -> BigUint {
        count_flats(self.n, self.t, self.field.q()).expect("valid dimensions")
    }

    /// `mu(S) = |S| / count_flats(n, t)` as an exact rational.
    pub fn measure(&self) -> Ratio {
        Ratio::new(
            BigInt::from(self.members.len()),
            BigInt::from(self.total_flats()),
        )
    }

    /// `S-up`: all `(t+1)`-flats containing some member.
    pub fn upper_shadow(&self) -> FlatSet {
        assert!(self.t < self.n, "no room above the full space");
        let mut up = FlatSet::empty(self.field.clone(), self.n, self.t + 1);
        for m in &self.members {
            up.members.extend(m.superflats(&self.field));
        }
        up
    }

    /// `S-up^h`: all `h`-flats containing some member.
    pub fn upper_shadow_to(&self, h: usize) -> Result<FlatSet, Error> {
        if h < self.t || h > self.n {
            return Err(Error::InvalidParameter(format!(
                "shadow dimension {h} outside [{}, {}]",
                self.t, self.n
            )));
        }
        let mut cur = self.clone();
        while cur.t < h {
            cur = cur.upper_shadow();
        }
        Ok(cur)
    }
}

/// How often one walk step started inside `S` stays inside `S`: the exact
/// rational `1 - Phi(S) = Pr[A' in S | A in S, A' ~ A]`. The up-down walk's
/// self-loop is part of the kernel; `include_self_loop = false` conditions it
/// away for sensitivity checks.
pub fn expansion_stay(set: &FlatSet, include_self_loop: bool) -> Result<Ratio, Error> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let field = &set.field;
    let mut stay = BigUint::zero();
    let mut n_sup = 0u64;
    let mut n_sub = 0u64;
    for member in &set.members {
        let supers = member.superflats(field);
        n_sup = supers.len() as u64;
        for up in supers {
            let subs = up.subflats_one_down(field);
            n_sub = subs.len() as u64;
            stay += BigUint::from(subs.iter().filter(|s| set.contains(s)).count());
        }
    }
    let size = BigUint::from(set.members.len());
    let total = &size * n_sup * n_sub;
    let (num, den) = if include_self_loop {
        (stay, total)
    } else {
        // each member reaches itself exactly once per superflat
        let self_walks = &size * n_sup;
        (stay - &self_walks, total - self_walks)
    };
    Ok(Ratio::new(BigInt::from(num), BigInt::from(den)))
}

/// The four zoom families: flats through a point, flats inside an affine
/// hyperplane, and the variants constraining the linear part instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZoomKind {
    Point(Vec<FieldElement>),
    Hyperplane {
        normal: Vec<FieldElement>,
        constant: FieldElement,
    },
    PointLinear(Vec<FieldElement>),
    HyperplaneLinear {
        normal: Vec<FieldElement>,
    },
}

impl ZoomKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ZoomKind::Point(_) => "point",
            ZoomKind::Hyperplane { .. } => "hyperplane",
            ZoomKind::PointLinear(_) => "point-linear",
            ZoomKind::HyperplaneLinear { .. } => "hyperplane-linear",
        }
    }

    pub fn validate(&self, field: &FieldSpec, n: usize) -> Result<(), Error> {
        let param_dim = match self {
            ZoomKind::Point(z) | ZoomKind::PointLinear(z) => z.len(),
            ZoomKind::Hyperplane { normal, .. } | ZoomKind::HyperplaneLinear { normal } => {
                normal.len()
            }
        };
        if param_dim != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: param_dim,
            });
        }
        let _ = field;
        match self {
            ZoomKind::PointLinear(z) if z.iter().all(|c| c.is_zero()) => Err(
                Error::InvalidParameter("zoom-in on the linear part needs a nonzero point".into()),
            ),
            ZoomKind::Hyperplane { normal, .. } | ZoomKind::HyperplaneLinear { normal }
                if normal.iter().all(|c| c.is_zero()) =>
            {
                Err(Error::InvalidParameter("hyperplane normal must be nonzero".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn member_predicate(&self, field: &FieldSpec, flat: &AffineFlat) -> bool {
        match self {
            ZoomKind::Point(z) => flat.contains(field, z),
            ZoomKind::Hyperplane { normal, constant } => {
                flat.basis.iter().all(|b| dot(field, b, normal).is_zero())
                    && dot(field, &flat.base, normal) == *constant
            }
            ZoomKind::PointLinear(z) => flat.linear_part_contains(field, z),
            ZoomKind::HyperplaneLinear { normal } => {
                flat.basis.iter().all(|b| dot(field, b, normal).is_zero())
            }
        }
    }

    /// The exact number of `t`-flats of `F_q^n` in this zoom family.
    pub fn family_size(&self, n: usize, t: usize, q: u32) -> BigUint {
        let qb = BigUint::from(q);
        match self {
            ZoomKind::Point(_) => gaussian_binomial(n, t, q),
            ZoomKind::Hyperplane { .. } => {
                count_flats(n - 1, t, q).unwrap_or_else(|_| BigUint::zero())
            }
            ZoomKind::PointLinear(_) => {
                if t == 0 {
                    BigUint::zero()
                } else {
                    qb.pow((n - t) as u32) * gaussian_binomial(n - 1, t - 1, q)
                }
            }
            ZoomKind::HyperplaneLinear { .. } => {
                qb.pow((n - t) as u32) * gaussian_binomial(n - 1, t, q)
            }
        }
    }
}

/// The exact member set of a zoom family among `t`-flats of `F_q^n`.
pub fn zoom_family(
    field: &FieldSpec,
    n: usize,
    t: usize,
    kind: &ZoomKind,
    cap: u64,
) -> Result<FlatSet, Error> {
    kind.validate(field, n)?;
    let members = enumerate_flats(field, n, t, cap)?
        .into_iter()
        .filter(|flat| kind.member_predicate(field, flat));
    FlatSet::from_members(field.clone(), n, t, members)
}

/// The conditional measure `mu(S cap H) / mu(H)` for one zoom family `H`.
pub fn pseudo_randomness(set: &FlatSet, kind: &ZoomKind) -> Result<Ratio, Error> {
    kind.validate(&set.field, set.n)?;
    let family = kind.family_size(set.n, set.t, set.field.q());
    if family.is_zero() {
        return Err(Error::EmptySet);
    }
    let hits = set
        .members
        .iter()
        .filter(|m| kind.member_predicate(&set.field, m))
        .count();
    Ok(Ratio::new(BigInt::from(hits), BigInt::from(family)))
}

/// One projective representative per direction: first nonzero coordinate 1.
pub fn projective_representatives(field: &FieldSpec, n: usize) -> Vec<Vec<FieldElement>> {
    let q = field.q() as usize;
    let total = q.pow(n as u32);
    let mut out = Vec::new();
    let mut pt = vec![FieldElement::ZERO; n];
    for idx in 1..total {
        crate::poly::decode_point(field, idx, &mut pt);
        let first = pt.iter().find(|c| !c.is_zero()).unwrap();
        if *first == FieldElement::ONE {
            out.push(pt.clone());
        }
    }
    out
}

/// The worst zoom parameter per kind: `max_param mu(S cap H)/mu(H)`.
#[derive(Clone, Debug)]
pub struct PseudoRandomnessProfile {
    pub point: (Ratio, ZoomKind),
    pub hyperplane: (Ratio, ZoomKind),
    pub point_linear: Option<(Ratio, ZoomKind)>,
    pub hyperplane_linear: (Ratio, ZoomKind),
}

impl PseudoRandomnessProfile {
    /// The largest profile value among the three notions feeding the
    /// expansion machinery (everything except plain zoom-ins).
    pub fn xi(&self) -> Ratio {
        let mut xi = self.hyperplane.0.clone();
        if let Some((v, _)) = &self.point_linear {
            xi = xi.max(v.clone());
        }
        xi.max(self.hyperplane_linear.0.clone())
    }
}

pub fn pr_profile(set: &FlatSet) -> Result<PseudoRandomnessProfile, Error> {
    let field = &set.field;
    let n = set.n;
    let q = field.q() as usize;
    let total_points = q.pow(n as u32);

    let mut best_point: Option<(Ratio, ZoomKind)> = None;
    let mut pt = vec![FieldElement::ZERO; n];
    for idx in 0..total_points {
        crate::poly::decode_point(field, idx, &mut pt);
        let kind = ZoomKind::Point(pt.clone());
        let v = pseudo_randomness(set, &kind)?;
        if best_point.as_ref().map_or(true, |(b, _)| v > *b) {
            best_point = Some((v, kind));
        }
    }

    let reps = projective_representatives(field, n);
    let mut best_hyp: Option<(Ratio, ZoomKind)> = None;
    for h in &reps {
        for c in field.elements() {
            let kind = ZoomKind::Hyperplane {
                normal: h.clone(),
                constant: c,
            };
            let v = pseudo_randomness(set, &kind)?;
            if best_hyp.as_ref().map_or(true, |(b, _)| v > *b) {
                best_hyp = Some((v, kind));
            }
        }
    }

    let mut best_point_lin: Option<(Ratio, ZoomKind)> = None;
    if set.t > 0 {
        for z in &reps {
            let kind = ZoomKind::PointLinear(z.clone());
            let v = pseudo_randomness(set, &kind)?;
            if best_point_lin.as_ref().map_or(true, |(b, _)| v > *b) {
                best_point_lin = Some((v, kind));
            }
        }
    }

    let mut best_hyp_lin: Option<(Ratio, ZoomKind)> = None;
    for h in &reps {
        let kind = ZoomKind::HyperplaneLinear { normal: h.clone() };
        let v = pseudo_randomness(set, &kind)?;
        if best_hyp_lin.as_ref().map_or(true, |(b, _)| v > *b) {
            best_hyp_lin = Some((v, kind));
        }
    }

    Ok(PseudoRandomnessProfile {
        point: best_point.expect("at least one point"),
        hyperplane: best_hyp.expect("at least one hyperplane"),
        point_linear: best_point_lin,
        hyperplane_linear: best_hyp_lin.expect("at least one hyperplane"),
    })
}

/// Exact verification of the sharp-threshold bound
/// `mu(S-up) >= mu(S) / (1 - Phi(S))`.
#[derive(Clone, Debug)]
pub struct ShadowExpansionReport {
    pub mu: Ratio,
    pub mu_up: Ratio,
    pub stay: Ratio,
    pub holds: bool,
    /// `mu(S-up) - mu(S)/(1 - Phi(S))`, nonnegative exactly when the bound holds.
    pub slack: Ratio,
}

pub fn shadow_expansion_check(set: &FlatSet) -> Result<ShadowExpansionReport, Error> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if set.t >= set.n {
        return Err(Error::InvalidParameter(
            "shadow bound needs t < n".into(),
        ));
    }
    let mu = set.measure();
    let mu_up = set.upper_shadow().measure();
    let stay = expansion_stay(set, true)?;
    let rhs = &mu / &stay;
    let slack = &mu_up - &rhs;
    Ok(ShadowExpansionReport {
        holds: mu_up >= rhs,
        mu,
        mu_up,
        stay,
        slack,
    })
}
