//! The t-flat tester: parameter selection, exact and Monte-Carlo rejection
//! probabilities, the brute-force distance oracle, and checkers for the
//! rejection floor and the relation between testers at adjacent dimensions.

use num::{BigInt, BigUint, One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::flats::{self, FlatSet};
use crate::gf::{FieldElement, FieldSpec};
use crate::poly::{Monomial, ReducedPoly, TruthTable};
use crate::{ratio_of, Error, Ratio, DEFAULT_CODEWORD_CAP, DEFAULT_ENUMERATION_CAP};

/// Decides whether a restriction to a flat fails the local test.
pub trait RestrictionTest {
    fn rejects(&self, restriction: &ReducedPoly) -> bool;
    fn describe(&self) -> String;
}

/// Rejects restrictions of degree greater than `d` (the Reed-Muller test).
#[derive(Clone, Copy, Debug)]
pub struct DegreeAbove(pub u32);

impl RestrictionTest for DegreeAbove {
    fn rejects(&self, restriction: &ReducedPoly) -> bool {
        !restriction.degree_at_most(self.0)
    }

    fn describe(&self) -> String {
        format!("degree > {}", self.0)
    }
}

/// The minimal flat dimension at which every function of degree greater than
/// `d` fails with positive probability: `ceil((d+1) / (q - q/p))`.
pub fn compute_t(q: u32, p: u32, d: u32) -> Result<u32, Error> {
    if p < 2 || q < 2 {
        return Err(Error::InvalidParameter("need q, p >= 2".into()));
    }
    let mut power = p;
    while power < q {
        power = power.checked_mul(p).ok_or_else(|| {
            Error::InvalidParameter(format!("{q} is not a power of {p}"))
        })?;
    }
    if power != q {
        return Err(Error::InvalidParameter(format!("{q} is not a power of {p}")));
    }
    let denom = (q - q / p) as u64;
    Ok(((d as u64 + 1).div_ceil(denom)) as u32)
}

/// Parameters of one tester instance.
#[derive(Clone, Debug)]
pub struct TesterParams {
    pub field: FieldSpec,
    pub d: u32,
    pub t: usize,
    pub n: usize,
}

impl TesterParams {
    /// Derives `t` from `(q, p, d)`.
    pub fn derive(field: &FieldSpec, d: u32, n: usize) -> Result<TesterParams, Error> {
        let t = compute_t(field.q(), field.p() as u32, d)? as usize;
        Self::with_flat_dim(field, d, n, t)
    }

    /// Explicit `t` (the analysis covers any `t' >= t`); still bounded by `n`.
    pub fn with_flat_dim(
        field: &FieldSpec,
        d: u32,
        n: usize,
        t: usize,
    ) -> Result<TesterParams, Error> {
        if t > n {
            return Err(Error::InvalidParameter(format!(
                "flat dimension {t} exceeds ambient dimension {n}"
            )));
        }
        Ok(TesterParams {
            field: field.clone(),
            d,
            t,
            n,
        })
    }
}

/// The outcome of a rejection-probability measurement.
#[derive(Clone, Debug)]
pub enum TestReport {
    Exact {
        rejecting: BigUint,
        total: BigUint,
        epsilon: Ratio,
    },
    MonteCarlo {
        rejections: u64,
        samples: u64,
        seed: u64,
        estimate: f64,
        stderr: f64,
    },
}

impl TestReport {
    pub fn epsilon_f64(&self) -> f64 {
        match self {
            TestReport::Exact { epsilon, .. } => crate::ratio_to_f64(epsilon),
            TestReport::MonteCarlo { estimate, .. } => *estimate,
        }
    }

    pub fn exact_epsilon(&self) -> Option<&Ratio> {
        match self {
            TestReport::Exact { epsilon, .. } => Some(epsilon),
            TestReport::MonteCarlo { .. } => None,
        }
    }
}

/// Exact rejection probability of the `t`-flat test under an arbitrary
/// restriction criterion.
pub fn reject_exact_with(
    f: &TruthTable,
    t: usize,
    test: &dyn RestrictionTest,
    cap: u64,
) -> Result<TestReport, Error> {
    let total = flats::count_flats(f.n, t, f.field.q())?;
    let mut rejecting = BigUint::zero();
    for flat in flats::enumerate_flats(&f.field, f.n, t, cap)? {
        if test.rejects(&f.restrict_to_flat(&flat)?) {
            rejecting += BigUint::one();
        }
    }
    let epsilon = Ratio::new(BigInt::from(rejecting.clone()), BigInt::from(total.clone()));
    Ok(TestReport::Exact {
        rejecting,
        total,
        epsilon,
    })
}

/// `eps_{t,d}(f)` as an exact rational.
pub fn reject_exact(f: &TruthTable, d: u32, t: usize) -> Result<TestReport, Error> {
    reject_exact_with(f, t, &DegreeAbove(d), DEFAULT_ENUMERATION_CAP)
}

/// Unbiased Monte-Carlo estimate of the rejection probability; deterministic
/// given the seed.
pub fn reject_mc_with(
    f: &TruthTable,
    t: usize,
    test: &dyn RestrictionTest,
    samples: u64,
    seed: u64,
) -> Result<TestReport, Error> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejections = 0u64;
    for _ in 0..samples {
        let flat = flats::sample_flat(&f.field, f.n, t, &mut rng);
        if test.rejects(&f.restrict_to_flat(&flat)?) {
            rejections += 1;
        }
    }
    let estimate = rejections as f64 / samples as f64;
    let stderr = (estimate * (1.0 - estimate) / samples as f64).sqrt();
    Ok(TestReport::MonteCarlo {
        rejections,
        samples,
        seed,
        estimate,
        stderr,
    })
}

pub fn reject_mc(
    f: &TruthTable,
    d: u32,
    t: usize,
    samples: u64,
    seed: u64,
) -> Result<TestReport, Error> {
    reject_mc_with(f, t, &DegreeAbove(d), samples, seed)
}

/// The exact set of `t`-flats on which the restriction fails the test.
pub fn rejecting_flats(
    f: &TruthTable,
    t: usize,
    test: &dyn RestrictionTest,
    cap: u64,
) -> Result<FlatSet, Error> {
    let members = flats::enumerate_flats(&f.field, f.n, t, cap)?
        .into_iter()
        .filter(|flat| {
            test.rejects(&f.restrict_to_flat(flat).expect("dimensions match"))
        });
    FlatSet::from_members(f.field.clone(), f.n, t, members)
}

/// The full Reed-Muller code of degree at most `d` on `F_q^n`, tabulated.
/// The brute-force ground truth behind the distance oracle.
pub struct Codebook {
    pub field: FieldSpec,
    pub n: usize,
    pub d: u32,
    /// One dense value table per codeword; index 0 is the zero codeword.
    pub tables: Vec<Vec<FieldElement>>,
}

/// All reduced monomials in `n` variables with total degree at most `d`.
pub fn low_degree_monomials(field: &FieldSpec, n: usize, d: u32) -> Vec<Monomial> {
    let q = field.q() as u16;
    let mut out = Vec::new();
    let mut exps = vec![0u16; n];
    loop {
        if exps.iter().map(|&e| e as u32).sum::<u32>() <= d {
            out.push(Monomial(exps.clone()));
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            exps[i] += 1;
            if exps[i] < q {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

impl Codebook {
    pub fn enumerate(field: &FieldSpec, n: usize, d: u32, cap: u64) -> Result<Codebook, Error> {
        let monomials = low_degree_monomials(field, n, d);
        let q = field.q() as u64;
        let count = (q as f64).powi(monomials.len() as i32);
        if count > cap as f64 {
            return Err(Error::CapExceeded {
                needed: format!("{q}^{}", monomials.len()),
                cap,
            });
        }
        let size = (q).pow(n as u32) as usize;
        // evaluation vector of each monomial
        let mono_tables: Vec<Vec<FieldElement>> = monomials
            .iter()
            .map(|m| {
                let mut poly = ReducedPoly::zero(n);
                poly.add_term(m.clone(), FieldElement::ONE);
                poly.tabulate(field).values
            })
            .collect();
        // extend the codebook one coefficient at a time
        let mut tables: Vec<Vec<FieldElement>> = vec![vec![FieldElement::ZERO; size]];
        for mono in &mono_tables {
            let mut next = Vec::with_capacity(tables.len() * q as usize);
            for base in &tables {
                for c in field.elements() {
                    if c.is_zero() {
                        next.push(base.clone());
                    } else {
                        let mut t = base.clone();
                        for (slot, &mv) in t.iter_mut().zip(mono) {
                            *slot = field.add(*slot, field.mul(c, mv));
                        }
                        next.push(t);
                    }
                }
            }
            tables = next;
        }
        Ok(Codebook {
            field: field.clone(),
            n,
            d,
            tables,
        })
    }

    /// Hamming distance to the nearest codeword, with the number of
    /// codewords attaining it.
    pub fn nearest(&self, f: &TruthTable) -> (usize, usize) {
        let mut best = usize::MAX;
        let mut count = 0usize;
        for table in &self.tables {
            let mut dist = 0usize;
            for (a, b) in table.iter().zip(&f.values) {
                if a != b {
                    dist += 1;
                    if dist > best {
                        break;
                    }
                }
            }
            if dist < best {
                best = dist;
                count = 1;
            } else if dist == best {
                count += 1;
            }
        }
        (best, count)
    }

    /// `delta_d(f)`: minimum normalized Hamming distance to the code.
    pub fn distance(&self, f: &TruthTable) -> Ratio {
        let (best, _) = self.nearest(f);
        ratio_of(best as u64, f.point_count() as u64)
    }
}

/// `delta_d(f)` through a freshly enumerated codebook.
pub fn distance_exact(f: &TruthTable, d: u32) -> Result<Ratio, Error> {
    let book = Codebook::enumerate(&f.field, f.n, d, DEFAULT_CODEWORD_CAP)?;
    Ok(book.distance(f))
}

/// Applicability and outcome of one bullet of the rejection floor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BulletOutcome {
    NotApplicable,
    Holds,
    Violated,
}

/// Exact check of the rejection floor for `f` on `F_q^{k+1}` restricted to
/// `k`-flats: degree above `d` forces `eps >= 1/q`, and degree strictly
/// between `d` and the maximum forces `eps > 1/q`.
#[derive(Clone, Debug)]
pub struct FloorReport {
    pub degree: Option<u32>,
    pub k: usize,
    pub epsilon: Ratio,
    pub floor: Ratio,
    pub weak_bullet: BulletOutcome,
    pub strict_bullet: BulletOutcome,
}

pub fn rejection_floor_check(f: &TruthTable, d: u32) -> Result<FloorReport, Error> {
    let k = f.n - 1;
    let t = compute_t(f.field.q(), f.field.p() as u32, d)? as usize;
    if k < t {
        return Err(Error::InvalidParameter(format!(
            "floor check needs k = {k} >= t = {t}"
        )));
    }
    let poly = f.interpolate();
    let degree = poly.degree();
    let report = reject_exact(f, d, k)?;
    let epsilon = report.exact_epsilon().expect("exact mode").clone();
    let floor = ratio_of(1, f.field.q() as u64);
    let max_degree = (f.n as u32) * (f.field.q() - 1);

    let weak_applies = degree.map_or(false, |deg| deg > d);
    let strict_applies = degree.map_or(false, |deg| deg > d && deg < max_degree);
    let outcome = |applies: bool, holds: bool| {
        if !applies {
            BulletOutcome::NotApplicable
        } else if holds {
            BulletOutcome::Holds
        } else {
            BulletOutcome::Violated
        }
    };
    Ok(FloorReport {
        degree,
        k,
        floor: floor.clone(),
        weak_bullet: outcome(weak_applies, epsilon >= floor),
        strict_bullet: outcome(strict_applies, epsilon > floor),
        epsilon,
    })
}

/// One rung of the dimension relation `eps_{j+1,d} <= q * eps_{j,d}`,
/// checked both directly and through the shadow of the rejecting set.
#[derive(Clone, Debug)]
pub struct RelationStep {
    pub j: usize,
    pub eps_lower: Ratio,
    pub eps_upper: Ratio,
    pub holds: bool,
    /// The `(j+1)`-level rejecting set equals the upper shadow of the
    /// `j`-level rejecting set.
    pub shadow_matches: bool,
    pub shadow_bound_holds: bool,
}

pub fn relation_check(
    f: &TruthTable,
    d: u32,
    t: usize,
    k: usize,
) -> Result<Vec<RelationStep>, Error> {
    if t > k || k >= f.n {
        return Err(Error::InvalidParameter(format!(
            "need t <= k < n, got t={t} k={k} n={}",
            f.n
        )));
    }
    let q = f.field.q() as u64;
    let test = DegreeAbove(d);
    let mut out = Vec::new();
    let mut lower = rejecting_flats(f, t, &test, DEFAULT_ENUMERATION_CAP)?;
    for j in t..k {
        let upper = rejecting_flats(f, j + 1, &test, DEFAULT_ENUMERATION_CAP)?;
        let eps_lower = lower.measure();
        let eps_upper = upper.measure();
        let shadow = lower.upper_shadow();
        out.push(RelationStep {
            j,
            holds: eps_upper <= &eps_lower * Ratio::from(BigInt::from(q)),
            shadow_matches: shadow == upper,
            shadow_bound_holds: shadow.measure()
                <= &eps_lower * Ratio::from(BigInt::from(q)),
            eps_lower,
            eps_upper,
        });
        lower = upper;
    }
    Ok(out)
}
