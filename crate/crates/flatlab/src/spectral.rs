//! The Cayley-graph surrogate on tuples `(s, x_1..x_l)` of points of
//! `F_q^k`, its walk operator, Fourier and level decompositions, the
//! one-coordinate conditional functions, and the numerical verification of
//! the spectral bounds.
//!
//! Everything counting-based (expansion, zoom profiles) is exact; spectral
//! identities are dense complex computations checked to 1e-9.

use num::{BigInt, One, Zero};
use num_complex::Complex64;

use crate::flats::{self, FlatSet, ZoomKind};
use crate::gf::{FieldElement, FieldSpec};
use crate::poly::{decode_point, encode_point};
use crate::report::{CheckRecord, Quantity};
use crate::{ratio_of, ratio_to_f64, Error, Ratio, DEFAULT_VERTEX_CAP};

/// Index arithmetic for vertices `(s, x_1..x_l)`, encoded as integers in
/// `[0, q^{k(l+1)})` with `s` in the least significant block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyIndex {
    pub field: FieldSpec,
    pub k: usize,
    pub ell: usize,
}

impl CayleyIndex {
    pub fn new(field: &FieldSpec, k: usize, ell: usize) -> Result<CayleyIndex, Error> {
        let bits = (field.q() as f64).log2() * (k * (ell + 1)) as f64;
        if bits > (DEFAULT_VERTEX_CAP as f64).log2() + 1e-9 {
            return Err(Error::CapExceeded {
                needed: format!("{}^{}", field.q(), k * (ell + 1)),
                cap: DEFAULT_VERTEX_CAP,
            });
        }
        Ok(CayleyIndex {
            field: field.clone(),
            k,
            ell,
        })
    }

    pub fn block_size(&self) -> usize {
        (self.field.q() as usize).pow(self.k as u32)
    }

    pub fn vertex_count(&self) -> usize {
        self.block_size().pow((self.ell + 1) as u32)
    }

    /// Splits a vertex into its `l+1` block indices, `s` first.
    pub fn blocks(&self, mut vertex: usize) -> Vec<usize> {
        let bs = self.block_size();
        (0..=self.ell)
            .map(|_| {
                let b = vertex % bs;
                vertex /= bs;
                b
            })
            .collect()
    }

    pub fn assemble(&self, blocks: &[usize]) -> usize {
        let bs = self.block_size();
        blocks.iter().rev().fold(0usize, |acc, &b| acc * bs + b)
    }

    /// Decodes one block index to a point of `F_q^k`.
    pub fn block_point(&self, block: usize) -> Vec<FieldElement> {
        let mut pt = vec![FieldElement::ZERO; self.k];
        decode_point(&self.field, block, &mut pt);
        pt
    }

    /// Pointwise sum of two blocks.
    pub fn block_add(&self, a: usize, b: usize) -> usize {
        let field = &self.field;
        let pa = self.block_point(a);
        let pb = self.block_point(b);
        let sum: Vec<FieldElement> = pa
            .iter()
            .zip(&pb)
            .map(|(&x, &y)| field.add(x, y))
            .collect();
        encode_point(field, &sum)
    }

    /// The block of `c` times the point behind `block`.
    pub fn block_scale(&self, c: FieldElement, block: usize) -> usize {
        let field = &self.field;
        let scaled: Vec<FieldElement> = self
            .block_point(block)
            .iter()
            .map(|&x| field.mul(c, x))
            .collect();
        encode_point(field, &scaled)
    }
}

/// A complex-valued function on the Cayley vertices; norms are taken under
/// the uniform probability measure.
#[derive(Clone, Debug)]
pub struct SpectralFn {
    pub index: CayleyIndex,
    pub values: Vec<Complex64>,
}

impl SpectralFn {
    pub fn zero(index: CayleyIndex) -> SpectralFn {
        let n = index.vertex_count();
        SpectralFn {
            index,
            values: vec![Complex64::ZERO; n],
        }
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn norm2_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }

    pub fn norm4_pow4(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm_sqr() * v.norm_sqr())
            .sum::<f64>()
            / self.values.len() as f64
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `E[F conj(G)]`.
    pub fn inner(&self, other: &SpectralFn) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            / self.values.len() as f64
    }

    pub fn add(&self, other: &SpectralFn) -> SpectralFn {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        SpectralFn {
            index: self.index.clone(),
            values,
        }
    }

    pub fn sub(&self, other: &SpectralFn) -> SpectralFn {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        SpectralFn {
            index: self.index.clone(),
            values,
        }
    }

    pub fn scale(&self, c: f64) -> SpectralFn {
        SpectralFn {
            index: self.index.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// The indicator of the tuple presentation of `S`: a vertex lies in it when
/// its spanning vectors are independent and the flat they present is in `S`.
/// Also returns the exact vertex count of the lifted set.
pub fn lift_set(set: &FlatSet, ell: usize) -> Result<(SpectralFn, u64), Error> {
    if set.t != ell {
        return Err(Error::DimensionMismatch {
            expected: ell,
            got: set.t,
        });
    }
    let index = CayleyIndex::new(&set.field, set.n, ell)?;
    let field = set.field.clone();
    let mut f = SpectralFn::zero(index.clone());
    let mut members = 0u64;
    for v in 0..index.vertex_count() {
        let blocks = index.blocks(v);
        let base = index.block_point(blocks[0]);
        let dirs: Vec<Vec<FieldElement>> = blocks[1..]
            .iter()
            .map(|&b| index.block_point(b))
            .collect();
        if let Ok(flat) = flats::canonicalize(&field, base, dirs) {
            if set.contains(&flat) {
                f.values[v] = Complex64::ONE;
                members += 1;
            }
        }
    }
    Ok((f, members))
}

/// Exact rational measure of an indicator function.
pub fn indicator_measure(f: &SpectralFn) -> Ratio {
    let hits = f.values.iter().filter(|v| v.re > 0.5).count();
    ratio_of(hits as u64, f.values.len() as u64)
}

/// One application of the walk operator: the exact average of `F` over all
/// `q^{k + l + 1}` moves `(y, b)`, sending each block `x_i` to `x_i + b_i y`.
pub fn walk_apply(f: &SpectralFn) -> SpectralFn {
    let index = &f.index;
    let field = &index.field;
    let q = field.q() as usize;
    let bs = index.block_size();
    let ell = index.ell;
    let mut out = vec![Complex64::ZERO; f.values.len()];
    let mut scaled = vec![0usize; q];
    let mut b = vec![0usize; ell + 1];
    for y in 0..bs {
        for (c, slot) in scaled.iter_mut().enumerate() {
            *slot = index.block_scale(FieldElement(c as u16), y);
        }
        b.iter_mut().for_each(|bi| *bi = 0);
        loop {
            // one move: add b_i * y to block i
            for (v, slot) in out.iter_mut().enumerate() {
                let blocks = index.blocks(v);
                let shifted: Vec<usize> = blocks
                    .iter()
                    .zip(&b)
                    .map(|(&blk, &bi)| index.block_add(blk, scaled[bi]))
                    .collect();
                *slot += f.values[index.assemble(&shifted)];
            }
            // advance the (b_0..b_l) odometer
            let mut i = 0;
            loop {
                if i > ell {
                    break;
                }
                b[i] += 1;
                if b[i] < q {
                    break;
                }
                b[i] = 0;
                i += 1;
            }
            if i > ell {
                break;
            }
        }
    }
    let moves = (bs * q.pow((ell + 1) as u32)) as f64;
    SpectralFn {
        index: index.clone(),
        values: out.into_iter().map(|v| v / moves).collect(),
    }
}

/// Exact stay probability of one walk step inside an indicator set:
/// `1 - Phi(T) = Pr[step stays in T | start in T]`, by integer counting.
pub fn cayley_expansion_stay(f: &SpectralFn) -> Result<Ratio, Error> {
    let index = &f.index;
    let field = &index.field;
    let q = field.q() as usize;
    let bs = index.block_size();
    let ell = index.ell;
    let inside: Vec<usize> = (0..f.values.len())
        .filter(|&v| f.values[v].re > 0.5)
        .collect();
    if inside.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut stay = 0u64;
    let mut scaled = vec![0usize; q];
    let mut b = vec![0usize; ell + 1];
    for y in 0..bs {
        for (c, slot) in scaled.iter_mut().enumerate() {
            *slot = index.block_scale(FieldElement(c as u16), y);
        }
        b.iter_mut().for_each(|bi| *bi = 0);
        loop {
            for &v in &inside {
                let blocks = index.blocks(v);
                let shifted: Vec<usize> = blocks
                    .iter()
                    .zip(&b)
                    .map(|(&blk, &bi)| index.block_add(blk, scaled[bi]))
                    .collect();
                if f.values[index.assemble(&shifted)].re > 0.5 {
                    stay += 1;
                }
            }
            let mut i = 0;
            loop {
                if i > ell {
                    break;
                }
                b[i] += 1;
                if b[i] < q {
                    break;
                }
                b[i] = 0;
                i += 1;
            }
            if i > ell {
                break;
            }
        }
    }
    let moves = (bs as u64) * (q as u64).pow((ell + 1) as u32);
    Ok(ratio_of(stay, inside.len() as u64 * moves))
}

/// Fourier coefficients indexed exactly like vertices: `alpha = (a_0..a_l)`.
#[derive(Clone, Debug)]
pub struct FourierCoeffs {
    pub index: CayleyIndex,
    pub values: Vec<Complex64>,
}

/// The scalar character table `chi[a][b] = omega^{Tr(ab)}`.
fn char_table(field: &FieldSpec) -> Vec<Vec<Complex64>> {
    let q = field.q() as usize;
    (0..q)
        .map(|a| {
            (0..q)
                .map(|b| field.character(FieldElement(a as u16), FieldElement(b as u16)))
                .collect()
        })
        .collect()
}

fn axis_transform(
    values: &mut [Complex64],
    q: usize,
    axes: usize,
    kernel: impl Fn(usize, usize) -> Complex64,
) {
    let mut stride = 1usize;
    let mut buf = vec![Complex64::ZERO; q];
    for _axis in 0..axes {
        let block = stride * q;
        for start in (0..values.len()).step_by(block) {
            for off in 0..stride {
                for (y, slot) in buf.iter_mut().enumerate() {
                    *slot = values[start + off + y * stride];
                }
                for a in 0..q {
                    let mut acc = Complex64::ZERO;
                    for (y, &v) in buf.iter().enumerate() {
                        acc += v * kernel(a, y);
                    }
                    values[start + off + a * stride] = acc;
                }
            }
        }
        stride *= q;
    }
}

/// `F_hat(alpha) = E[F conj(chi_alpha)]`, computed one scalar coordinate at a
/// time.
pub fn fourier(f: &SpectralFn) -> FourierCoeffs {
    let field = &f.index.field;
    let q = field.q() as usize;
    let axes = f.index.k * (f.index.ell + 1);
    let chi = char_table(field);
    let mut values = f.values.clone();
    axis_transform(&mut values, q, axes, |a, y| chi[a][y].conj());
    let n = values.len() as f64;
    for v in values.iter_mut() {
        *v /= n;
    }
    FourierCoeffs {
        index: f.index.clone(),
        values,
    }
}

/// `F(v) = sum_alpha F_hat(alpha) chi_alpha(v)`.
pub fn inverse_fourier(coeffs: &FourierCoeffs) -> SpectralFn {
    let field = &coeffs.index.field;
    let q = field.q() as usize;
    let axes = coeffs.index.k * (coeffs.index.ell + 1);
    let chi = char_table(field);
    let mut values = coeffs.values.clone();
    axis_transform(&mut values, q, axes, |y, a| chi[a][y]);
    SpectralFn {
        index: coeffs.index.clone(),
        values,
    }
}

/// The span dimension of the spanning blocks `(a_1..a_l)` of a coefficient
/// index, and whether the base block `a_0` lies in that span.
pub fn classify_alpha(index: &CayleyIndex, alpha: usize) -> (usize, bool) {
    let field = &index.field;
    let blocks = index.blocks(alpha);
    let mut rows: Vec<Vec<FieldElement>> = blocks[1..]
        .iter()
        .filter(|&&b| b != 0)
        .map(|&b| index.block_point(b))
        .collect();
    let pivots = flats::rref(field, &mut rows);
    let dim = pivots.len();
    rows.truncate(dim);
    let mut probe = index.block_point(blocks[0]);
    flats::reduce_vector(field, &rows, &pivots, &mut probe);
    let in_span = probe.iter().all(|c| c.is_zero());
    (dim, in_span)
}

/// The eigenvalue exponent of one character: `dim span(a_0..a_l)`.
pub fn alpha_full_span_dim(index: &CayleyIndex, alpha: usize) -> usize {
    let (dim, in_span) = classify_alpha(index, alpha);
    if in_span {
        dim
    } else {
        dim + 1
    }
}

/// The level decomposition: coefficients grouped by the span dimension of
/// the spanning blocks and by whether the base block lies in that span.
pub struct LevelDecomposition {
    /// `lin[i]`: base block inside a span of dimension `i`, `i = 0..=l`.
    pub lin: Vec<SpectralFn>,
    /// `aff[i]`: base block outside a span of dimension `i`, `i = 0..=l`.
    pub aff: Vec<SpectralFn>,
}

impl LevelDecomposition {
    /// `F_i = lin_i + aff_{i-1}`: the eigenspace component with eigenvalue
    /// `q^{-i}` for `i <= l`. The remaining `aff[l]` carries `q^{-(l+1)}`.
    pub fn component(&self, i: usize) -> SpectralFn {
        if i == 0 {
            self.lin[0].clone()
        } else {
            self.lin[i].add(&self.aff[i - 1])
        }
    }
}

pub fn level_decompose(f: &SpectralFn) -> LevelDecomposition {
    let coeffs = fourier(f);
    let index = &f.index;
    let ell = index.ell;
    let zero = FourierCoeffs {
        index: index.clone(),
        values: vec![Complex64::ZERO; coeffs.values.len()],
    };
    let mut lin = vec![zero.values.clone(); ell + 1];
    let mut aff = vec![zero.values.clone(); ell + 1];
    for (alpha, &c) in coeffs.values.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let (dim, in_span) = classify_alpha(index, alpha);
        if in_span {
            lin[dim][alpha] = c;
        } else {
            aff[dim][alpha] = c;
        }
    }
    let back = |vals: Vec<Complex64>| {
        inverse_fourier(&FourierCoeffs {
            index: index.clone(),
            values: vals,
        })
    };
    LevelDecomposition {
        lin: lin.into_iter().map(back).collect(),
        aff: aff.into_iter().map(back).collect(),
    }
}

/// The conditional one-block functions on `F_q^k`:
/// `f_lin(z) = Pr[v in T | x_1 = z] - mu(T)` and
/// `f_aff(z) = Pr[v in T | s = z] - mu(T)`.
pub fn f1_components(f: &SpectralFn) -> (Vec<f64>, Vec<f64>) {
    let index = &f.index;
    let bs = index.block_size();
    let mu = f.mean().re;
    let per_block = (f.values.len() / bs) as f64;
    let mut by_s = vec![0.0f64; bs];
    let mut by_x1 = vec![0.0f64; bs];
    for (v, val) in f.values.iter().enumerate() {
        if val.re > 0.5 {
            let blocks = index.blocks(v);
            by_s[blocks[0]] += 1.0;
            if index.ell >= 1 {
                by_x1[blocks[1]] += 1.0;
            }
        }
    }
    let f_aff: Vec<f64> = by_s.iter().map(|c| c / per_block - mu).collect();
    let f_lin: Vec<f64> = by_x1.iter().map(|c| c / per_block - mu).collect();
    (f_lin, f_aff)
}

/// Fourier coefficients of a real function on `F_q^k`.
fn fourier_on_block(field: &FieldSpec, k: usize, values: &[f64]) -> Vec<Complex64> {
    let q = field.q() as usize;
    let chi = char_table(field);
    let mut work: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    axis_transform(&mut work, q, k, |a, y| chi[a][y].conj());
    let n = work.len() as f64;
    work.into_iter().map(|v| v / n).collect()
}

/// Zoom families on the Cayley graph, mirroring the flat-side kinds on the
/// represented flats of possibly degenerate tuples.
fn cayley_zoom_member(
    index: &CayleyIndex,
    kind: &ZoomKind,
    vertex: usize,
) -> bool {
    let field = &index.field;
    let blocks = index.blocks(vertex);
    let s = index.block_point(blocks[0]);
    let dirs: Vec<Vec<FieldElement>> = blocks[1..]
        .iter()
        .map(|&b| index.block_point(b))
        .collect();
    let dot = |u: &[FieldElement], v: &[FieldElement]| {
        let mut acc = FieldElement::ZERO;
        for (&a, &b) in u.iter().zip(v) {
            acc = field.add(acc, field.mul(a, b));
        }
        acc
    };
    match kind {
        ZoomKind::Point(z) => {
            // z - s in span(x)
            let mut rows = dirs;
            let pivots = flats::rref(field, &mut rows);
            rows.truncate(pivots.len());
            let mut probe: Vec<FieldElement> = z
                .iter()
                .zip(&s)
                .map(|(&a, &b)| field.sub(a, b))
                .collect();
            flats::reduce_vector(field, &rows, &pivots, &mut probe);
            probe.iter().all(|c| c.is_zero())
        }
        ZoomKind::PointLinear(z) => {
            let mut rows = dirs;
            let pivots = flats::rref(field, &mut rows);
            rows.truncate(pivots.len());
            let mut probe = z.clone();
            flats::reduce_vector(field, &rows, &pivots, &mut probe);
            probe.iter().all(|c| c.is_zero())
        }
        ZoomKind::Hyperplane { normal, constant } => {
            dot(&s, normal) == *constant && dirs.iter().all(|x| dot(x, normal).is_zero())
        }
        ZoomKind::HyperplaneLinear { normal } => {
            dirs.iter().all(|x| dot(x, normal).is_zero())
        }
    }
}

/// Exact conditional measure of the indicator inside one Cayley zoom family.
pub fn cayley_pseudo_randomness(f: &SpectralFn, kind: &ZoomKind) -> Result<Ratio, Error> {
    let index = &f.index;
    kind.validate(&index.field, index.k)?;
    let mut hits = 0u64;
    let mut family = 0u64;
    for v in 0..f.values.len() {
        if cayley_zoom_member(index, kind, v) {
            family += 1;
            if f.values[v].re > 0.5 {
                hits += 1;
            }
        }
    }
    if family == 0 {
        return Err(Error::EmptySet);
    }
    Ok(ratio_of(hits, family))
}

/// Worst-case Cayley zoom profiles per kind.
pub struct CayleyProfile {
    pub point: Ratio,
    pub point_linear: Ratio,
    pub hyperplane: Ratio,
    pub hyperplane_linear: Ratio,
}

pub fn cayley_pr_profile(f: &SpectralFn) -> Result<CayleyProfile, Error> {
    let index = &f.index;
    let field = &index.field;
    let k = index.k;
    let q = field.q() as usize;
    let mut point = Ratio::zero();
    let mut pt = vec![FieldElement::ZERO; k];
    for idx in 0..q.pow(k as u32) {
        decode_point(field, idx, &mut pt);
        point = point.max(cayley_pseudo_randomness(f, &ZoomKind::Point(pt.clone()))?);
    }
    let reps = flats::projective_representatives(field, k);
    let mut point_linear = Ratio::zero();
    for z in &reps {
        point_linear =
            point_linear.max(cayley_pseudo_randomness(f, &ZoomKind::PointLinear(z.clone()))?);
    }
    let mut hyperplane = Ratio::zero();
    for h in &reps {
        for c in field.elements() {
            hyperplane = hyperplane.max(cayley_pseudo_randomness(
                f,
                &ZoomKind::Hyperplane {
                    normal: h.clone(),
                    constant: c,
                },
            )?);
        }
    }
    let mut hyperplane_linear = Ratio::zero();
    for h in &reps {
        hyperplane_linear = hyperplane_linear.max(cayley_pseudo_randomness(
            f,
            &ZoomKind::HyperplaneLinear { normal: h.clone() },
        )?);
    }
    Ok(CayleyProfile {
        point,
        point_linear,
        hyperplane,
        hyperplane_linear,
    })
}

/// Largest residual of the eigenfunction law over all characters:
/// `max_alpha ||H chi_alpha - q^{-dim span(alpha)} chi_alpha||_inf`.
pub fn eigenvalue_residual_max(index: &CayleyIndex) -> f64 {
    let field = &index.field;
    let q = field.q() as usize;
    let chi = char_table(field);
    let axes = index.k * (index.ell + 1);
    let mut worst: f64 = 0.0;
    for alpha in 0..index.vertex_count() {
        let mut values = Vec::with_capacity(index.vertex_count());
        for v in 0..index.vertex_count() {
            // chi_alpha(v) = prod over scalar digits
            let mut acc = Complex64::ONE;
            let (mut a, mut b) = (alpha, v);
            for _ in 0..axes {
                acc *= chi[a % q][b % q];
                a /= q;
                b /= q;
            }
            values.push(acc);
        }
        let chi_fn = SpectralFn {
            index: index.clone(),
            values,
        };
        let walked = walk_apply(&chi_fn);
        let lambda = (q as f64).powi(-(alpha_full_span_dim(index, alpha) as i32));
        let residual = walked.sub(&chi_fn.scale(lambda)).norm_inf();
        worst = worst.max(residual);
    }
    worst
}

/// Everything the spectral battery certifies for one lifted set.
pub struct SpectralReport {
    pub records: Vec<CheckRecord>,
    pub mu_star: Ratio,
    pub xi: Ratio,
    pub zoom_in_max: Ratio,
}

/// The projective representatives of `F_q^l`, used to index the linear-part
/// reconstruction sum.
fn ell_space_representatives(field: &FieldSpec, ell: usize) -> Vec<Vec<FieldElement>> {
    flats::projective_representatives(field, ell)
}

/// Runs the whole verification battery for `S` lifted to the Cayley graph.
/// `assert_stay_floor` asserts `1 - Phi(S) >= 1/q` (zoom families and
/// rejecting sets carry that guarantee; arbitrary sets do not).
pub fn verify_spectral(set: &FlatSet, assert_stay_floor: bool) -> Result<SpectralReport, Error> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let ell = set.t;
    let field = set.field.clone();
    let q = field.q() as u64;
    let qf = q as f64;
    let (f, _members) = lift_set(set, ell)?;
    let index = f.index.clone();
    let mut records = Vec::new();

    // exact expansion comparison: Cayley stay vs flat stay minus q^{-l}
    let stay_flats = flats::expansion_stay(set, true)?;
    let stay_cayley = cayley_expansion_stay(&f)?;
    let rhs = &stay_flats - ratio_of(1, q.pow(ell as u32));
    records.push(CheckRecord::exact_ge(
        "cayley-stay-vs-flat-stay",
        &stay_cayley,
        &rhs,
    ));
    if assert_stay_floor {
        records.push(CheckRecord::exact_ge(
            "flat-stay-probability-floor",
            &stay_flats,
            &ratio_of(1, q),
        ));
    } else {
        records.push(CheckRecord::descriptive(
            "flat-stay-probability",
            Quantity::from_ratio(&stay_flats),
            "floor asserted only for zoom families and rejecting sets",
        ));
    }

    // measured pseudo-randomness: xi from the three conditioned notions plus
    // mu(S); a = worst zoom-in
    let profile = flats::pr_profile(set)?;
    let mu = set.measure();
    let xi = profile.xi().max(mu.clone());
    let zoom_in_max = profile.point.0.clone();
    let mu_star = indicator_measure(&f);

    // the lifted measure equals mu(S) times the probability that l uniform
    // vectors are independent
    let mut independent = Ratio::one();
    for i in 0..ell {
        independent = independent
            * Ratio::new(
                BigInt::from(q.pow(set.n as u32) - q.pow(i as u32)),
                BigInt::from(q.pow(set.n as u32)),
            );
    }
    records.push(CheckRecord::exact_eq(
        "lifted-measure-product-formula",
        &mu_star,
        &(&mu * &independent),
    ));

    // zoom transfer: Cayley profiles never exceed the flat profiles
    let cayley_profile = cayley_pr_profile(&f)?;
    records.push(CheckRecord::exact_le(
        "zoom-transfer-point",
        &cayley_profile.point,
        &profile.point.0,
    ));
    if let Some((v, _)) = &profile.point_linear {
        records.push(CheckRecord::exact_le(
            "zoom-transfer-point-linear",
            &cayley_profile.point_linear,
            v,
        ));
    }
    records.push(CheckRecord::exact_le(
        "zoom-transfer-hyperplane",
        &cayley_profile.hyperplane,
        &profile.hyperplane.0,
    ));
    records.push(CheckRecord::exact_le(
        "zoom-transfer-hyperplane-linear",
        &cayley_profile.hyperplane_linear,
        &profile.hyperplane_linear.0,
    ));

    // Parseval
    let coeffs = fourier(&f);
    let parseval_lhs: f64 = coeffs.values.iter().map(|c| c.norm_sqr()).sum();
    records.push(CheckRecord::identity(
        "parseval",
        (parseval_lhs - f.norm2_sq()).abs(),
    ));

    // round trip
    let back = inverse_fourier(&coeffs);
    records.push(CheckRecord::identity(
        "fourier-round-trip",
        back.sub(&f).norm_inf(),
    ));

    // level decomposition: reconstruction, orthogonality, eigen identity
    let levels = level_decompose(&f);
    let mut recon = levels.aff[ell].clone();
    for i in 0..=ell {
        recon = recon.add(&levels.component(i));
    }
    records.push(CheckRecord::identity(
        "level-reconstruction",
        recon.sub(&f).norm_inf(),
    ));
    let mut parts: Vec<SpectralFn> = (0..=ell).map(|i| levels.component(i)).collect();
    parts.push(levels.aff[ell].clone());
    let mut ortho: f64 = 0.0;
    let mut sum_norms = 0.0;
    for i in 0..parts.len() {
        sum_norms += parts[i].norm2_sq();
        for j in i + 1..parts.len() {
            ortho = ortho.max(parts[i].inner(&parts[j]).norm());
        }
    }
    records.push(CheckRecord::identity("level-orthogonality", ortho));
    records.push(CheckRecord::identity(
        "level-parseval",
        (sum_norms - f.norm2_sq()).abs(),
    ));

    let walked = walk_apply(&f);
    let mut predicted = levels.aff[ell].scale(qf.powi(-(ell as i32 + 1)));
    for i in 0..=ell {
        predicted = predicted.add(&levels.component(i).scale(qf.powi(-(i as i32))));
    }
    records.push(CheckRecord::identity(
        "walk-level-identity",
        walked.sub(&predicted).norm_inf(),
    ));
    // the alternative grouping (the last affine component folded in at
    // q^{-l}) must mismatch unless that component vanishes
    let mut alt = levels.aff[ell].scale(qf.powi(-(ell as i32)));
    for i in 0..=ell {
        alt = alt.add(&levels.component(i).scale(qf.powi(-(i as i32))));
    }
    let alt_residual = walked.sub(&alt).norm_inf();
    records.push(CheckRecord::descriptive(
        "walk-level-identity-alt-grouping",
        Quantity::from_f64(alt_residual),
        "residual when the last affine component is folded in one level lower",
    ));

    // conditional one-block functions
    let (f_lin, f_aff) = f1_components(&f);
    let mean_lin: f64 = f_lin.iter().sum::<f64>() / f_lin.len() as f64;
    let mean_aff: f64 = f_aff.iter().sum::<f64>() / f_aff.len() as f64;
    records.push(CheckRecord::identity("f1-lin-mean-zero", mean_lin.abs()));
    records.push(CheckRecord::identity("f1-aff-mean-zero", mean_aff.abs()));

    // reconstruction of the level-1 component from the conditionals
    let f1 = levels.component(1);
    let mut recon1 = SpectralFn::zero(index.clone());
    let lin_reps = ell_space_representatives(&field, ell);
    for v in 0..index.vertex_count() {
        let blocks = index.blocks(v);
        let mut acc = 0.0f64;
        for m in &lin_reps {
            // <M, x> over the blocks x_1..x_l
            let mut z = 0usize;
            for (i, &mi) in m.iter().enumerate() {
                z = index.block_add(z, index.block_scale(mi, blocks[i + 1]));
            }
            acc += f_lin[z];
        }
        // all of F_q^l for the affine part
        let mut mvec = vec![FieldElement::ZERO; ell];
        let mut more = true;
        while more {
            let mut z = blocks[0];
            for (i, &mi) in mvec.iter().enumerate() {
                z = index.block_add(z, index.block_scale(mi, blocks[i + 1]));
            }
            acc += f_aff[z];
            more = false;
            for slot in mvec.iter_mut() {
                let next = slot.value() as u32 + 1;
                if next < field.q() {
                    *slot = FieldElement(next as u16);
                    more = true;
                    break;
                }
                *slot = FieldElement::ZERO;
            }
        }
        recon1.values[v] = Complex64::new(acc, 0.0);
    }
    records.push(CheckRecord::identity(
        "f1-reconstruction",
        recon1.sub(&f1).norm_inf(),
    ));

    // Fourier links: the conditionals' coefficients match the corresponding
    // full coefficients (nonzero frequencies)
    let lin_hat = fourier_on_block(&field, index.k, &f_lin);
    let aff_hat = fourier_on_block(&field, index.k, &f_aff);
    let bs = index.block_size();
    let mut worst_lin: f64 = 0.0;
    let mut worst_aff: f64 = 0.0;
    for a in 1..bs {
        // alpha = (0, a, a, ..., a)
        let mut blocks = vec![a; ell + 1];
        blocks[0] = 0;
        let alpha = index.assemble(&blocks);
        worst_lin = worst_lin.max((lin_hat[a] - coeffs.values[alpha]).norm());
        // alpha = (a, 0, ..., 0)
        let mut blocks = vec![0; ell + 1];
        blocks[0] = a;
        let alpha = index.assemble(&blocks);
        worst_aff = worst_aff.max((aff_hat[a] - coeffs.values[alpha]).norm());
    }
    records.push(CheckRecord::identity("f1-lin-fourier-link", worst_lin).with_note(
        "coefficient 1 on the diagonal frequency; consistent with the reconstruction identity",
    ));
    records.push(CheckRecord::identity("f1-aff-fourier-link", worst_aff));

    // second moments against the level-1 weight
    let f1_norm2 = f1.norm2_sq();
    let class_count = lin_reps.len().max(1) as f64;
    let mean_sq_lin: f64 = f_lin.iter().map(|v| v * v).sum::<f64>() / f_lin.len() as f64;
    let mean_sq_aff: f64 = f_aff.iter().map(|v| v * v).sum::<f64>() / f_aff.len() as f64;
    let mu_star_f = ratio_to_f64(&mu_star);
    records.push(CheckRecord::float_le(
        "f1-lin-second-moment",
        mean_sq_lin,
        f1_norm2 / class_count,
        false,
    ));
    records.push(CheckRecord::float_le(
        "f1-lin-second-moment-measure-bound",
        mean_sq_lin,
        mu_star_f / class_count,
        false,
    ));
    records.push(CheckRecord::float_le(
        "f1-aff-second-moment",
        mean_sq_aff,
        f1_norm2 / qf.powi(ell as i32),
        false,
    ));
    records.push(CheckRecord::float_le(
        "f1-aff-second-moment-measure-bound",
        mean_sq_aff,
        mu_star_f / qf.powi(ell as i32),
        false,
    ));

    // level-1 weight, fourth-norm bounds; xi and a are measured
    let xi_f = ratio_to_f64(&xi);
    let a_f = ratio_to_f64(&zoom_in_max);
    let weight_rhs = 1.0 - qf.powi(2 - ell as i32) - qf * qf * xi_f;
    records.push(CheckRecord::float_ge(
        "level-1-weight",
        f1_norm2 / mu_star_f,
        weight_rhs,
        weight_rhs <= 0.0,
    ));
    let f1_norm4 = f1.norm4_pow4();
    records.push(CheckRecord::float_ge(
        "fourth-norm-lower",
        f1_norm4 / mu_star_f,
        weight_rhs.powi(4),
        weight_rhs <= 0.0,
    ));
    records.push(CheckRecord::float_le(
        "fourth-norm-upper",
        f1_norm4,
        mu_star_f * a_f * a_f + 863.0 * qf * qf * mu_star_f * xi_f.powf(0.25),
        false,
    ));

    Ok(SpectralReport {
        records,
        mu_star,
        xi,
        zoom_in_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::tester;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        FieldSpec::new(2, 1).unwrap()
    }

    fn index(q: u16, r: u16, k: usize, ell: usize) -> CayleyIndex {
        CayleyIndex::new(&FieldSpec::new(q, r).unwrap(), k, ell).unwrap()
    }

    fn random_fn(index: &CayleyIndex, rng: &mut ChaCha8Rng) -> SpectralFn {
        let values = (0..index.vertex_count())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SpectralFn {
            index: index.clone(),
            values,
        }
    }

    #[test]
    fn vertex_codec_round_trip() {
        let idx = index(3, 1, 2, 1);
        assert_eq!(idx.vertex_count(), 81);
        for v in 0..81 {
            assert_eq!(idx.assemble(&idx.blocks(v)), v);
        }
    }

    #[test]
    fn lift_set_empty_and_full() {
        let field = f2();
        let empty = FlatSet::empty(field.clone(), 3, 1);
        let (f, members) = lift_set(&empty, 1).unwrap();
        assert_eq!(members, 0);
        assert!(f.values.iter().all(|v| v.norm() == 0.0));

        let all = FlatSet::from_members(
            field.clone(),
            3,
            1,
            flats::enumerate_flats(&field, 3, 1, 1000).unwrap(),
        )
        .unwrap();
        let (f, _) = lift_set(&all, 1).unwrap();
        // indicator of nondegenerate tuples: x_1 != 0
        let mu = indicator_measure(&f);
        assert_eq!(mu, ratio_of(7, 8));
    }

    #[test]
    fn lifted_measure_formula() {
        let field = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let all = flats::enumerate_flats(&field, 3, 1, 1000).unwrap();
        let members: Vec<_> = all.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
        let s = FlatSet::from_members(field.clone(), 3, 1, members).unwrap();
        let (f, _) = lift_set(&s, 1).unwrap();
        let expected = s.measure() * ratio_of(7, 8);
        assert_eq!(indicator_measure(&f), expected);
    }

    #[test]
    fn walk_fixes_constants() {
        let idx = index(2, 1, 3, 1);
        let ones = SpectralFn {
            index: idx.clone(),
            values: vec![Complex64::ONE; idx.vertex_count()],
        };
        let out = walk_apply(&ones);
        assert!(out.sub(&ones).norm_inf() < 1e-12);
    }

    #[test]
    fn walk_is_self_adjoint_and_contractive() {
        let idx = index(2, 1, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let f = random_fn(&idx, &mut rng);
            let g = random_fn(&idx, &mut rng);
            let lhs = f.inner(&walk_apply(&g));
            let rhs = walk_apply(&f).inner(&g);
            assert!((lhs - rhs).norm() < 1e-9);
            assert!(walk_apply(&f).norm2_sq() <= f.norm2_sq() + 1e-9);
        }
    }

    #[test]
    fn eigenvalues_exact_small() {
        assert!(eigenvalue_residual_max(&index(2, 1, 3, 1)) <= 1e-9);
        assert!(eigenvalue_residual_max(&index(3, 1, 2, 1)) <= 1e-9);
    }

    #[test]
    fn fourier_round_trip_and_parseval() {
        let idx = index(3, 1, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let f = random_fn(&idx, &mut rng);
            let coeffs = fourier(&f);
            let back = inverse_fourier(&coeffs);
            assert!(back.sub(&f).norm_inf() < 1e-9);
            let parseval: f64 = coeffs.values.iter().map(|c| c.norm_sqr()).sum();
            assert!((parseval - f.norm2_sq()).abs() < 1e-9);
        }
    }

    #[test]
    fn delta_function_has_flat_spectrum() {
        let idx = index(2, 1, 2, 1);
        let mut f = SpectralFn::zero(idx.clone());
        f.values[0] = Complex64::ONE;
        let coeffs = fourier(&f);
        let expected = 1.0 / idx.vertex_count() as f64;
        for c in &coeffs.values {
            assert!((c - Complex64::new(expected, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn symmetry_of_lifted_coefficients() {
        // F_hat(alpha) = F_hat(beta) when the base blocks agree and the
        // spans agree: exercised on a lifted rejecting set at l = 2
        let field = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let table = generate::random_function(&field, 3, &mut rng);
        let s = rejecting_set_of(&table);
        let (f, _) = lift_set(&s, 2).unwrap();
        let coeffs = fourier(&f);
        let idx = &f.index;
        for alpha in 0..idx.vertex_count() {
            for beta in 0..idx.vertex_count() {
                let ab = idx.blocks(alpha);
                let bb = idx.blocks(beta);
                if ab[0] != bb[0] {
                    continue;
                }
                let full_a = alpha_full_span_dim(idx, alpha);
                let full_b = alpha_full_span_dim(idx, beta);
                let (da, ia) = classify_alpha(idx, alpha);
                let (db, ib) = classify_alpha(idx, beta);
                if da == db && ia == ib && full_a == full_b && span_eq(idx, alpha, beta) {
                    assert!(
                        (coeffs.values[alpha] - coeffs.values[beta]).norm() < 1e-9,
                        "alpha {alpha} beta {beta}"
                    );
                }
            }
        }
    }

    fn span_eq(idx: &CayleyIndex, alpha: usize, beta: usize) -> bool {
        let field = &idx.field;
        let mk = |v: usize| -> Vec<Vec<FieldElement>> {
            idx.blocks(v)
                .iter()
                .map(|&b| idx.block_point(b))
                .collect()
        };
        let mut ra = mk(alpha);
        let pa = flats::rref(field, &mut ra);
        ra.truncate(pa.len());
        let mut rb = mk(beta);
        let pb = flats::rref(field, &mut rb);
        rb.truncate(pb.len());
        ra == rb
    }

    fn rejecting_set_of(table: &crate::poly::TruthTable) -> FlatSet {
        tester::rejecting_flats(table, 2, &tester::DegreeAbove(1), 1 << 20).unwrap()
    }

    #[test]
    fn full_battery_on_error_and_zoom_sets() {
        let field = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // rejecting set of a corrupted constant at d = 0, l = 1
        let cw = generate::random_codeword(&field, 4, 0, &mut rng).tabulate(&field);
        let bad = generate::corrupt_at(&cw, 3, &mut rng);
        let s = tester::rejecting_flats(&bad, 1, &tester::DegreeAbove(0), 1 << 20).unwrap();
        let report = verify_spectral(&s, true).unwrap();
        for rec in &report.records {
            assert_ne!(rec.verdict, crate::report::Verdict::Violated, "{rec:?}");
        }
        // a zoom family
        let z = vec![FieldElement::ZERO, FieldElement::ONE, FieldElement::ZERO, FieldElement::ZERO];
        let h = flats::zoom_family(&field, 4, 1, &ZoomKind::Point(z), 1 << 20).unwrap();
        let report = verify_spectral(&h, true).unwrap();
        for rec in &report.records {
            assert_ne!(rec.verdict, crate::report::Verdict::Violated, "{rec:?}");
        }
    }

    #[test]
    fn cayley_stay_exact_on_point_zoom() {
        let field = f2();
        let z = vec![FieldElement::ONE, FieldElement::ZERO, FieldElement::ZERO];
        let h = flats::zoom_family(&field, 3, 1, &ZoomKind::Point(z), 1 << 20).unwrap();
        let (f, _) = lift_set(&h, 1).unwrap();
        let stay_cayley = cayley_expansion_stay(&f).unwrap();
        let stay_flats = flats::expansion_stay(&h, true).unwrap();
        let q_ell = ratio_of(1, 2);
        assert!(stay_cayley >= &stay_flats - &q_ell);
    }

    #[test]
    fn f1_fourier_link_has_unit_coefficient_at_q3() {
        // at q = 3 the reconstruction-consistent link coefficient is 1; the
        // residual against coefficient 1 vanishes while 1/(q-1) would not
        let field = FieldSpec::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let table = generate::random_function(&field, 2, &mut rng);
        let s = tester::rejecting_flats(&table, 1, &tester::DegreeAbove(0), 1 << 20).unwrap();
        assert!(!s.is_empty());
        let (f, _) = lift_set(&s, 1).unwrap();
        let coeffs = fourier(&f);
        let (f_lin, _) = f1_components(&f);
        let lin_hat = fourier_on_block(&field, 2, &f_lin);
        let idx = &f.index;
        let mut worst_unit: f64 = 0.0;
        let mut worst_halved: f64 = 0.0;
        let mut biggest: f64 = 0.0;
        for a in 1..idx.block_size() {
            let alpha = idx.assemble(&[0, a]);
            worst_unit = worst_unit.max((lin_hat[a] - coeffs.values[alpha]).norm());
            worst_halved =
                worst_halved.max((lin_hat[a] - coeffs.values[alpha] / 2.0).norm());
            biggest = biggest.max(coeffs.values[alpha].norm());
        }
        assert!(worst_unit <= 1e-9, "unit coefficient link failed: {worst_unit}");
        if biggest > 1e-6 {
            assert!(worst_halved > 1e-9, "halved link unexpectedly matched too");
        }
    }
}
