//! Exact arithmetic in `F_q = F_{p^r}`, the trace map to `F_p`, and the
//! additive characters `chi_a(x) = omega^{Tr(ax)}`.
//!
//! Elements are encoded as integers in `[0, q)` whose base-`p` digits (least
//! significant first) are the coefficients of the representing polynomial in
//! `F_p[x] / (modulus)`. For `r = 1` the modulus is unused and arithmetic is
//! plain arithmetic mod `p`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::Error;

/// Largest `q` for which the full multiplication table is precomputed.
const MUL_TABLE_LIMIT: u32 = 256;

/// An element of `F_q`, encoded as an integer in `[0, q)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct Tables {
    /// `mul[a * q + b] = a * b`, present iff `q <= MUL_TABLE_LIMIT`.
    mul: Vec<u16>,
    /// `inv[a] = a^{-1}` for `a != 0`; entry 0 is unused.
    inv: Vec<u16>,
    /// `trace[a] = Tr(a)` as an integer in `[0, p)`.
    trace: Vec<u16>,
    /// Powers of the primitive `p`-th root of unity: `roots[j] = exp(2 pi i j / p)`.
    roots: Vec<Complex64>,
    /// Univariate interpolation kernel: `interp[j * q + y]` is the coefficient
    /// of `x^j` in `1 - (x - y)^{q-1}`, i.e. in the indicator `1_{x=y}`.
    interp: Vec<u16>,
}

/// The arithmetic context for `F_q = F_{p^r}`.
///
/// Cloning is cheap: derived tables are shared behind an `Arc`. Equality and
/// hashing look only at `(p, r, modulus)`.
#[derive(Clone)]
pub struct FieldSpec {
    p: u16,
    r: u16,
    q: u32,
    /// Monic irreducible modulus, coefficients low-to-high, length `r + 1`.
    /// Empty for `r = 1`.
    modulus: Vec<u16>,
    tables: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{} (mod {:?})", self.p, self.r, self.modulus)
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns the lexicographically smallest (by low-to-high coefficient
/// sequence) monic irreducible polynomial of degree `r` over `F_p`,
/// coefficients low-to-high including the leading 1. For `r = 1` the returned
/// modulus is empty: prime-field arithmetic needs none.
pub fn find_modulus(p: u16, r: u16) -> Result<Vec<u16>, Error> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime { p: p as u64 });
    }
    if r == 0 {
        return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
    }
    if r == 1 {
        return Ok(Vec::new());
    }
    let r = r as usize;
    // Odometer over the low coefficients (c_0, ..., c_{r-1}) in lexicographic
    // order: index 0 is the most significant comparison position.
    let mut coeffs = vec![0u16; r];
    loop {
        let mut poly: Vec<u16> = coeffs.clone();
        poly.push(1);
        if poly_is_irreducible(&poly, p) {
            return Ok(poly);
        }
        // advance odometer, last index fastest
        let mut i = r;
        loop {
            if i == 0 {
                return Err(Error::InvalidParameter(format!(
                    "no irreducible polynomial of degree {r} over F_{p} (unreachable)"
                )));
            }
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
        }
    }
}

/// Trial division by all monic polynomials of degree `1..=deg/2`.
fn poly_is_irreducible(poly: &[u16], p: u16) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let mut divisor = vec![0u16; d + 1];
        divisor[d] = 1;
        loop {
            if poly_rem_is_zero(poly, &divisor, p) {
                return false;
            }
            let mut i = d;
            let mut done = false;
            loop {
                if i == 0 {
                    done = true;
                    break;
                }
                i -= 1;
                divisor[i] += 1;
                if divisor[i] < p {
                    break;
                }
                divisor[i] = 0;
            }
            if done {
                break;
            }
        }
    }
    true
}

fn poly_rem_is_zero(poly: &[u16], divisor: &[u16], p: u16) -> bool {
    let p64 = p as u64;
    let mut rem: Vec<u64> = poly.iter().map(|&c| c as u64).collect();
    let d = divisor.len() - 1;
    while rem.len() > d {
        let lead = *rem.last().unwrap() % p64;
        let top = rem.len() - 1;
        if lead != 0 {
            for j in 0..=d {
                let idx = top - d + j;
                rem[idx] = (rem[idx] % p64 + p64 - (lead * divisor[j] as u64) % p64) % p64;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c % p64 == 0)
}

impl FieldSpec {
    /// Builds `F_{p^r}` with the deterministic modulus from [`find_modulus`].
    pub fn new(p: u16, r: u16) -> Result<FieldSpec, Error> {
        let modulus = find_modulus(p, r)?;
        Self::with_modulus(p, r, modulus)
    }

    /// Builds `F_{p^r}` with an explicit modulus (as read from a file header).
    /// For `r = 1` the modulus must be empty.
    pub fn with_modulus(p: u16, r: u16, modulus: Vec<u16>) -> Result<FieldSpec, Error> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime { p: p as u64 });
        }
        if r == 0 {
            return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
        }
        let q128 = (p as u128).pow(r as u32);
        if q128 > 1 << 16 {
            return Err(Error::InvalidParameter(format!(
                "field size p^r = {q128} exceeds the supported bound 2^16"
            )));
        }
        let q = q128 as u32;
        if r == 1 {
            if !modulus.is_empty() {
                return Err(Error::InvalidParameter(
                    "prime field takes no modulus".into(),
                ));
            }
        } else {
            if modulus.len() != r as usize + 1 || modulus[r as usize] != 1 {
                return Err(Error::InvalidParameter(format!(
                    "modulus must be monic of degree {r}"
                )));
            }
            if modulus.iter().any(|&c| c >= p) {
                return Err(Error::InvalidParameter(
                    "modulus coefficients must lie in [0, p)".into(),
                ));
            }
            if !poly_is_irreducible(&modulus, p) {
                return Err(Error::InvalidParameter(format!(
                    "modulus {modulus:?} is reducible over F_{p}"
                )));
            }
        }
        let mut spec = FieldSpec {
            p,
            r,
            q,
            modulus,
            tables: Arc::new(Tables {
                mul: Vec::new(),
                inv: Vec::new(),
                trace: Vec::new(),
                roots: Vec::new(),
                interp: Vec::new(),
            }),
        };
        spec.tables = Arc::new(spec.build_tables());
        Ok(spec)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mul = if self.q <= MUL_TABLE_LIMIT {
            let mut t = vec![0u16; q * q];
            for a in 0..q {
                for b in a..q {
                    let v = self.mul_raw(a as u16, b as u16);
                    t[a * q + b] = v;
                    t[b * q + a] = v;
                }
            }
            t
        } else {
            Vec::new()
        };
        let mut inv = vec![0u16; q];
        for a in 1..q {
            inv[a] = self.pow_raw(a as u16, self.q as u64 - 2);
        }
        let mut trace = vec![0u16; q];
        for a in 0..q {
            trace[a] = self.trace_raw(a as u16);
        }
        let roots = (0..self.p)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / self.p as f64))
            .collect();
        // interp[j*q + y] = coefficient of x^j in 1 - (x - y)^{q-1}
        let mut interp = vec![0u16; q * q];
        for y in 0..q {
            // expand (x - y)^{q-1} by repeated multiplication
            let mut pw = vec![0u16; q];
            pw[0] = 1;
            let neg_y = self.neg_raw(y as u16);
            for _ in 0..self.q - 1 {
                let mut next = vec![0u16; q];
                for (j, &c) in pw.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    // times x
                    if j + 1 < q {
                        next[j + 1] = self.add_raw(next[j + 1], c);
                    }
                    // times (-y)
                    next[j] = self.add_raw(next[j], self.mul_raw(c, neg_y));
                }
                pw = next;
            }
            for j in 0..q {
                let mut c = self.neg_raw(pw[j]);
                if j == 0 {
                    c = self.add_raw(c, 1);
                }
                interp[j * q + y] = c;
            }
        }
        Tables {
            mul,
            inv,
            trace,
            roots,
            interp,
        }
    }

    pub fn p(&self) -> u16 {
        self.p
    }

    pub fn r(&self) -> u16 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients low-to-high (empty for `r = 1`).
    pub fn modulus(&self) -> &[u16] {
        &self.modulus
    }

    pub fn elem(&self, v: u32) -> FieldElement {
        debug_assert!(v < self.q, "element {v} out of range for q = {}", self.q);
        FieldElement(v as u16)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u16).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(a.0, b.0))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg_raw(a.0))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if !self.tables.mul.is_empty() {
            FieldElement(self.tables.mul[a.0 as usize * self.q as usize + b.0 as usize])
        } else {
            FieldElement(self.mul_raw(a.0, b.0))
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, Error> {
        if a.is_zero() {
            return Err(Error::DivisionByZero { q: self.q });
        }
        Ok(FieldElement(self.tables.inv[a.0 as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, Error> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with `a^0 = 1` (including `0^0 = 1`).
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        let mut acc = FieldElement::ONE;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The trace `Tr(a) = sum_{i=0}^{r-1} a^{p^i}` as an integer in `[0, p)`.
    pub fn trace(&self, a: FieldElement) -> u16 {
        self.tables.trace[a.0 as usize]
    }

    /// The additive character `chi_a(x) = exp(2 pi i Tr(ax) / p)`.
    pub fn character(&self, a: FieldElement, x: FieldElement) -> Complex64 {
        self.tables.roots[self.trace(self.mul(a, x)) as usize]
    }

    /// Coefficient of `x^j` in the univariate indicator `1_{x=y}`.
    pub(crate) fn interp_coeff(&self, j: usize, y: u16) -> FieldElement {
        FieldElement(self.tables.interp[j * self.q as usize + y as usize])
    }

    /// A generator of the multiplicative group `F_q^*`.
    pub fn multiplicative_generator(&self) -> FieldElement {
        'cand: for g in 1..self.q {
            let g = FieldElement(g as u16);
            let mut x = g;
            for _ in 1..self.q - 1 {
                if x == FieldElement::ONE {
                    continue 'cand;
                }
                x = self.mul(x, g);
            }
            return g;
        }
        unreachable!("F_q^* is cyclic")
    }

    fn digits(&self, mut v: u16) -> Vec<u16> {
        let mut out = vec![0u16; self.r as usize];
        for d in out.iter_mut() {
            *d = v % self.p;
            v /= self.p;
        }
        out
    }

    fn undigits(&self, ds: &[u16]) -> u16 {
        let mut v = 0u32;
        for &d in ds.iter().rev() {
            v = v * self.p as u32 + d as u32;
        }
        v as u16
    }

    fn add_raw(&self, a: u16, b: u16) -> u16 {
        if self.r == 1 {
            return ((a as u32 + b as u32) % self.p as u32) as u16;
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let ds: Vec<u16> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| ((x as u32 + y as u32) % self.p as u32) as u16)
            .collect();
        self.undigits(&ds)
    }

    fn neg_raw(&self, a: u16) -> u16 {
        if self.r == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let ds: Vec<u16> = self
            .digits(a)
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.p - x })
            .collect();
        self.undigits(&ds)
    }

    fn mul_raw(&self, a: u16, b: u16) -> u16 {
        let p = self.p as u64;
        if self.r == 1 {
            return ((a as u64 * b as u64) % p) as u16;
        }
        let r = self.r as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut conv = vec![0u64; 2 * r - 1];
        for i in 0..r {
            if da[i] == 0 {
                continue;
            }
            for j in 0..r {
                conv[i + j] += da[i] as u64 * db[j] as u64;
            }
        }
        // reduce modulo the monic modulus
        for i in (r..2 * r - 1).rev() {
            let c = conv[i] % p;
            if c != 0 {
                for j in 0..r {
                    let m = self.modulus[j] as u64 % p;
                    conv[i - r + j] = (conv[i - r + j] + p * p - c * m % p) % (p * p);
                }
            }
            conv[i] = 0;
        }
        let ds: Vec<u16> = conv[..r].iter().map(|&c| (c % p) as u16).collect();
        self.undigits(&ds)
    }

    fn pow_raw(&self, a: u16, mut e: u64) -> u16 {
        let mut acc = 1u16;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    fn trace_raw(&self, a: u16) -> u16 {
        let mut x = a;
        let mut acc = a;
        for _ in 1..self.r {
            x = self.pow_raw(x, self.p as u64);
            acc = self.add_raw(acc, x);
        }
        debug_assert!(acc < self.p, "trace of {a} landed outside F_p");
        acc
    }
}
