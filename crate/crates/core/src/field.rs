//! Exact arithmetic over `F_q`, `q = p^e` with `p` an odd prime.
//!
//! Elements are stored by their *rank*: the integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! where `c_i` is the coefficient of `x^i` in the polynomial-basis representation modulo
//! the context's defining polynomial. For prime fields the rank is the residue itself.
//! Ranks give a total order on elements and a dense index in `[0, q)`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

/// Largest field order accepted by [`FieldCtx::new`].
pub const DEFAULT_CEILING: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("field order {p}^{e} exceeds the ceiling {ceiling}")]
    TooLarge { p: u64, e: u32, ceiling: u64 },
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("coefficient {coeff} out of range for p = {p}")]
    BadCoefficient { coeff: u64, p: u32 },
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// A field element, identified by its rank in `[0, q)`.
///
/// Two elements of the same context are equal iff their coefficient lists are equal,
/// which is the same as equal ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn rank(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    /// Low coefficients `m_0..m_{e-1}` of the monic modulus `x^e + ...`; empty for `e = 1`.
    modulus: Vec<u32>,
    eta_minus_one: i8,
    sqrt_table: OnceLock<Vec<u32>>,
}

/// Arithmetic context for `F_q`. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.e == other.0.e)
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.0.p)
            .field("e", &self.0.e)
            .field("q", &self.0.q)
            .field("modulus_poly", &self.modulus_poly())
            .field("eta_minus_one", &self.0.eta_minus_one)
            .finish()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldCtx {
    /// Builds `F_{p^e}` under the default ceiling of `2^20` elements.
    pub fn new(p: u64, e: u32) -> Result<Self, FieldError> {
        Self::with_ceiling(p, e, DEFAULT_CEILING)
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1)
    }

    pub fn with_ceiling(p: u64, e: u32, ceiling: u64) -> Result<Self, FieldError> {
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::BadDegree);
        }
        let too_large = FieldError::TooLarge { p, e, ceiling };
        let ceiling = ceiling.min(u32::MAX as u64);
        let mut q: u64 = 1;
        for _ in 0..e {
            q = q.checked_mul(p).ok_or(too_large.clone())?;
            if q > ceiling {
                return Err(too_large);
            }
        }
        let p = p as u32;
        let modulus = if e == 1 {
            Vec::new()
        } else {
            smallest_irreducible(p, e as usize)
        };
        let mut ctx = FieldCtx(Arc::new(Inner {
            p,
            e,
            q: q as u32,
            modulus,
            eta_minus_one: 0,
            sqrt_table: OnceLock::new(),
        }));
        let eta = ctx.quadratic_character(ctx.neg(FieldElem::ONE));
        Arc::get_mut(&mut ctx.0).expect("freshly built context").eta_minus_one = eta;
        Ok(ctx)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.e == 1
    }

    /// Quadratic character of `-1`: `+1` iff `-1` is a nonzero square.
    pub fn eta_minus_one(&self) -> i8 {
        self.0.eta_minus_one
    }

    /// Full monic modulus coefficients `[m_0, ..., m_{e-1}, 1]`, or `None` for a prime field.
    pub fn modulus_poly(&self) -> Option<Vec<u32>> {
        if self.0.e == 1 {
            None
        } else {
            let mut v = self.0.modulus.clone();
            v.push(1);
            Some(v)
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    pub fn from_rank(&self, rank: u32) -> Option<FieldElem> {
        (rank < self.0.q).then_some(FieldElem(rank))
    }

    /// Image of an integer under `Z -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem, FieldError> {
        let e = self.0.e as usize;
        if coeffs.len() != e {
            return Err(FieldError::WrongLength { expected: e, got: coeffs.len() });
        }
        let p = self.0.p;
        let mut rank: u64 = 0;
        for &c in coeffs.iter().rev() {
            if c >= p as u64 {
                return Err(FieldError::BadCoefficient { coeff: c, p });
            }
            rank = rank * p as u64 + c;
        }
        Ok(FieldElem(rank as u32))
    }

    /// Coefficients `c_0..c_{e-1}` (constant term first).
    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        let p = self.0.p;
        let mut r = a.0;
        (0..self.0.e)
            .map(|_| {
                let c = r % p;
                r /= p;
                c
            })
            .collect()
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = FieldElem> + ExactSizeIterator {
        (0..self.0.q).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.0.p;
        if self.0.e == 1 {
            let s = a.0 + b.0;
            return FieldElem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.0.e {
            let s = x % p + y % p;
            let digit = if s >= p { s - p } else { s };
            out += digit * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        FieldElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.0.p;
        if self.0.e == 1 {
            return FieldElem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.0.e {
            let c = x % p;
            let digit = if c == 0 { 0 } else { p - c };
            out += digit * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        FieldElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.0.e == 1 {
            let p = self.0.p;
            return FieldElem(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + p - b.0 });
        }
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.0.p as u64;
        if self.0.e == 1 {
            return FieldElem((a.0 as u64 * b.0 as u64 % p) as u32);
        }
        let e = self.0.e as usize;
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // x^e = -(m_0 + ... + m_{e-1} x^{e-1})
        for d in (e..prod.len()).rev() {
            let top = prod[d];
            if top == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &m) in self.0.modulus.iter().enumerate() {
                let idx = d - e + i;
                prod[idx] = (prod[idx] + (p - top) * m as u64) % p;
            }
        }
        let mut rank = 0u64;
        for &c in prod[..e].iter().rev() {
            rank = rank * p + c;
        }
        FieldElem(rank as u32)
    }

    #[inline]
    pub fn square(&self, a: FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElem, mut exp: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        (!a.is_zero()).then(|| self.pow(a, self.0.q as u64 - 2))
    }

    /// `a^((q-1)/2)` mapped to `{-1, 0, +1}`.
    pub fn quadratic_character(&self, a: FieldElem) -> i8 {
        if a.is_zero() {
            return 0;
        }
        let r = self.pow(a, (self.0.q as u64 - 1) / 2);
        if r == FieldElem::ONE {
            1
        } else {
            debug_assert_eq!(r, self.neg(FieldElem::ONE));
            -1
        }
    }

    fn sqrt_table(&self) -> &[u32] {
        self.0.sqrt_table.get_or_init(|| {
            let q = self.0.q;
            let mut table = vec![u32::MAX; q as usize];
            for x in 0..q {
                let s = self.square(FieldElem(x)).0 as usize;
                if table[s] == u32::MAX {
                    table[s] = x;
                }
            }
            table
        })
    }

    /// All solutions of `x^2 = a`, in increasing rank order.
    pub fn sqrt(&self, a: FieldElem) -> Vec<FieldElem> {
        if a.is_zero() {
            return vec![FieldElem::ZERO];
        }
        match self.sqrt_table()[a.0 as usize] {
            u32::MAX => Vec::new(),
            r => {
                let r = FieldElem(r);
                let s = self.neg(r);
                if r < s { vec![r, s] } else { vec![s, r] }
            }
        }
    }

    /// Renders an element in the point-file coordinate syntax.
    pub fn format_elem(&self, a: FieldElem) -> String {
        if self.0.e == 1 {
            a.0.to_string()
        } else {
            self.coeffs(a)
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(";")
        }
    }

    /// Parses the point-file coordinate syntax (plain integer for `e = 1`,
    /// `c0;c1;...` otherwise).
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem, String> {
        let parts: Vec<u64> = s
            .split(';')
            .map(|t| t.trim().parse::<u64>().map_err(|err| format!("bad coordinate {t:?}: {err}")))
            .collect::<Result<_, _>>()?;
        self.from_coeffs(&parts).map_err(|e| e.to_string())
    }
}

fn poly_rem_is_zero(num: &[u32], den: &[u32], p: u32) -> bool {
    // den is monic
    let p = p as u64;
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = den.len() - 1;
    for top in (dd..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        for (i, &d) in den.iter().enumerate() {
            let idx = top - dd + i;
            r[idx] = (r[idx] + (p - c) * d as u64) % p;
        }
    }
    r[..dd].iter().all(|&c| c == 0)
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub(crate) fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for r in 0..count {
            let mut den = Vec::with_capacity(d + 1);
            let mut x = r;
            for _ in 0..d {
                den.push((x % p as u64) as u32);
                x /= p as u64;
            }
            den.push(1);
            if poly_rem_is_zero(poly, &den, p) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest (constant coefficient first) monic irreducible of degree `e`.
fn smallest_irreducible(p: u32, e: usize) -> Vec<u32> {
    let mut low = vec![0u32; e];
    loop {
        let mut poly = low.clone();
        poly.push(1);
        if is_irreducible(&poly, p) {
            return low;
        }
        // increment with c_{e-1} as the fastest-moving digit
        let mut i = e;
        loop {
            i -= 1;
            low[i] += 1;
            if low[i] < p {
                break;
            }
            low[i] = 0;
            assert!(i > 0, "no irreducible polynomial of degree {e} over F_{p}");
        }
    }
}
