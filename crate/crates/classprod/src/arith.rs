//! Finite fields with discrete-log tables, the generator tower τ, ρ, ω, θ,
//! and exact formal sums of roots of unity.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational numbers used for every normalized structure constant.
pub type Rational = BigRational;

/// Default bound on the size of a field built by [`make_field`].
pub const DEFAULT_FIELD_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("zero has no discrete logarithm")]
    ZeroElement,
    #[error("cyclotomic moduli differ ({0} vs {1})")]
    ModulusMismatch(u64, u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A prime power q = p^e.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimePowerQ {
    pub p: u64,
    pub e: u32,
    pub q: u64,
}

impl PrimePowerQ {
    pub fn new(q: u64) -> Result<Self, ArithError> {
        let f = factorize(q);
        match f.as_slice() {
            [(p, e)] => Ok(Self { p: *p, e: *e, q }),
            _ => Err(ArithError::NotPrimePower(q)),
        }
    }

    pub fn from_pe(p: u64, e: u32) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        if e == 0 {
            return Err(ArithError::InvalidInput("exponent must be positive".into()));
        }
        let q = p
            .checked_pow(e)
            .ok_or_else(|| ArithError::CapacityExceeded(format!("{p}^{e}")))?;
        Ok(Self { p, e, q })
    }
}

impl fmt::Display for PrimePowerQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.q)
    }
}

/// The sign convention: upper sign for unitary groups, lower for linear ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Unitary,
    Linear,
}

impl Sign {
    /// The value of the upper sign: +1 for unitary, −1 for linear.
    pub fn s(self) -> i64 {
        match self {
            Sign::Unitary => 1,
            Sign::Linear => -1,
        }
    }

    /// δ_L: 1 for the linear case, 0 for the unitary case.
    pub fn delta_l(self) -> i64 {
        match self {
            Sign::Unitary => 0,
            Sign::Linear => 1,
        }
    }
}

/// Dense polynomial over F_p, coefficients low to high.
fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(prod, f, p)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i64) as u64
}

fn poly_rem(mut a: Vec<u64>, f: &[u64], p: u64) -> Vec<u64> {
    poly_trim(&mut a);
    let df = f.len() - 1;
    let lead_inv = inv_mod(f[df], p);
    while a.len() > df {
        let top = a.len() - 1;
        let c = a[top] * lead_inv % p;
        if c != 0 {
            for (i, &fi) in f.iter().enumerate() {
                let idx = top - df + i;
                a[idx] = (a[idx] + p - c * fi % p) % p;
            }
        }
        poly_trim(&mut a);
    }
    a
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = poly_rem(base.to_vec(), f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            result = poly_mulmod(&result, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        exp >>= 1;
    }
    result
}

/// Rabin's irreducibility test for a monic f of degree n over F_p.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = (f.len() - 1) as u32;
    let x = vec![0u64, 1];
    // x^(p^k) mod f by repeated p-th powering
    let frob = |k: u32| -> Vec<u64> {
        let mut y = x.clone();
        for _ in 0..k {
            y = poly_powmod(&y, p, f, p);
        }
        y
    };
    let sub_x = |mut y: Vec<u64>| -> Vec<u64> {
        if y.len() < 2 {
            y.resize(2, 0);
        }
        y[1] = (y[1] + p - 1) % p;
        poly_trim(&mut y);
        y
    };
    if !sub_x(frob(n)).is_empty() {
        return false;
    }
    for (r, _) in factorize(n as u64) {
        let g = poly_gcd(f.to_vec(), sub_x(frob(n / r as u32)), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Context of the finite field F_{(p^e)^d}, realized over the prime field.
#[derive(Clone)]
pub struct FieldCtx {
    pub q_base: PrimePowerQ,
    pub degree: u32,
    /// Total degree over the prime field, e·d.
    pub abs_degree: u32,
    pub size: u64,
    /// Monic modulus over F_p, coefficients low to high (leading 1 included).
    pub modulus: Vec<u64>,
    /// Element index of the primitive element τ.
    pub generator: u32,
    log_table: Vec<u32>,
    antilog_table: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("q", &self.q_base.q)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

/// Builds F_{(p^e)^d} with its smallest irreducible modulus and smallest
/// primitive element.
pub fn make_field(p: u64, e: u32, d: u32) -> Result<FieldCtx, ArithError> {
    make_field_capped(p, e, d, DEFAULT_FIELD_CAP)
}

pub fn make_field_capped(p: u64, e: u32, d: u32, cap: u64) -> Result<FieldCtx, ArithError> {
    let q_base = PrimePowerQ::from_pe(p, e)?;
    if d == 0 {
        return Err(ArithError::InvalidInput("degree must be positive".into()));
    }
    let n = e * d;
    let size = p.checked_pow(n).filter(|&s| s <= cap).ok_or_else(|| {
        ArithError::CapacityExceeded(format!("field of size {p}^{n} exceeds {cap}"))
    })?;

    let mut modulus = Vec::new();
    for idx in 0..size {
        let mut f = digits(idx, p, n as usize);
        f.push(1);
        if (n == 1 || f[0] != 0) && is_irreducible(&f, p) {
            modulus = f;
            break;
        }
    }
    let order = size - 1;
    let primes: Vec<u64> = factorize(order).into_iter().map(|(r, _)| r).collect();
    let mut generator = 0u32;
    for idx in 1..size {
        let g = digits(idx, p, n as usize);
        let primitive = primes.iter().all(|&r| {
            let y = poly_powmod(&g, order / r, &modulus, p);
            y != [1]
        });
        if primitive {
            generator = idx as u32;
            break;
        }
    }

    // antilog by repeated multiplication with the generator as a linear map
    let images: Vec<Vec<u64>> = (0..n as usize)
        .map(|i| {
            let mut xi = vec![0u64; i + 1];
            xi[i] = 1;
            let mut v = poly_mulmod(&xi, &digits(generator as u64, p, n as usize), &modulus, p);
            v.resize(n as usize, 0);
            v
        })
        .collect();
    let mut antilog_table = vec![0u32; order as usize];
    let mut log_table = vec![u32::MAX; size as usize];
    let mut cur = vec![0u64; n as usize];
    cur[0] = 1;
    let mut next = vec![0u64; n as usize];
    for (k, slot) in antilog_table.iter_mut().enumerate() {
        let idx = undigits(&cur, p);
        *slot = idx as u32;
        log_table[idx as usize] = k as u32;
        next.iter_mut().for_each(|x| *x = 0);
        for (i, &c) in cur.iter().enumerate() {
            if c != 0 {
                for (j, &v) in images[i].iter().enumerate() {
                    next[j] = (next[j] + c * v) % p;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(FieldCtx {
        q_base,
        degree: d,
        abs_degree: n,
        size,
        modulus,
        generator,
        log_table,
        antilog_table,
    })
}

fn digits(mut idx: u64, p: u64, n: usize) -> Vec<u64> {
    let mut v = vec![0u64; n];
    for d in v.iter_mut() {
        *d = idx % p;
        idx /= p;
    }
    v
}

fn undigits(v: &[u64], p: u64) -> u64 {
    v.iter().rev().fold(0, |acc, &d| acc * p + d)
}

impl FieldCtx {
    pub fn prime(&self) -> u64 {
        self.q_base.p
    }

    /// Multiplicative order of the field, size − 1.
    pub fn order(&self) -> u64 {
        self.size - 1
    }

    pub fn one(&self) -> u32 {
        1
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.prime();
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a as u64, b as u64);
        let (mut out, mut place) = (0u64, 1u64);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = self.prime();
        if p == 2 {
            return a;
        }
        let mut a = a as u64;
        let (mut out, mut place) = (0u64, 1u64);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log_table[a as usize] as u64 + self.log_table[b as usize] as u64;
        self.antilog_table[(s % self.order()) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32, ArithError> {
        let l = self.dlog(a)?;
        Ok(self.exp((self.order() - l) % self.order()))
    }

    /// τ^k.
    pub fn exp(&self, k: u64) -> u32 {
        self.antilog_table[(k % self.order()) as usize]
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if a == 0 {
            return if k == 0 { 1 } else { 0 };
        }
        let l = self.log_table[a as usize] as u128 * k as u128;
        self.antilog_table[(l % self.order() as u128) as usize]
    }

    /// Discrete logarithm with respect to the generator τ.
    pub fn dlog(&self, x: u32) -> Result<u64, ArithError> {
        match self.log_table.get(x as usize) {
            Some(&l) if l != u32::MAX => Ok(l as u64),
            Some(_) if x == 0 => Err(ArithError::ZeroElement),
            _ => Err(ArithError::InvalidInput(format!(
                "{x} is not a field element"
            ))),
        }
    }

    /// Image of a prime-field scalar c ∈ F_p.
    pub fn from_prime(&self, c: u64) -> u32 {
        (c % self.prime()) as u32
    }
}

/// Exponents of τ, ρ, ω, θ, σ inside the cyclic group of order N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootTower {
    pub q: u64,
    pub sign: Sign,
    pub dim: u8,
    /// N = q^6 − 1 (dim 3) or q^2 − 1 (dim 2).
    pub modulus: u64,
    pub exp_tau: u64,
    pub exp_rho: u64,
    pub exp_omega: u64,
    /// Only meaningful for dim 3.
    pub exp_theta: u64,
    pub exp_sigma: u64,
}

pub fn root_tower(q: PrimePowerQ, sign: Sign, dim: u8) -> Result<RootTower, ArithError> {
    let q = q.q;
    let n = match dim {
        3 => q.checked_pow(6),
        2 => q.checked_pow(2),
        _ => {
            return Err(ArithError::InvalidInput(format!(
                "dimension {dim} is not 2 or 3"
            )))
        }
    }
    .ok_or_else(|| ArithError::CapacityExceeded(format!("q = {q} is too large")))?
        - 1;
    let exp_rho = if dim == 3 { q.pow(4) + q.pow(2) + 1 } else { 1 };
    let q_mp = match sign {
        Sign::Unitary => q - 1,
        Sign::Linear => q + 1,
    };
    let exp_theta = if dim == 3 {
        match sign {
            Sign::Unitary => q.pow(3) - 1,
            Sign::Linear => q.pow(3) + 1,
        }
    } else {
        0
    };
    Ok(RootTower {
        q,
        sign,
        dim,
        modulus: n,
        exp_tau: 1,
        exp_rho,
        exp_omega: (exp_rho * q_mp) % n,
        exp_theta,
        exp_sigma: (exp_rho * (q + 1)) % n,
    })
}

impl RootTower {
    /// q ± 1 (upper sign unitary): the order of ω.
    pub fn q_pm(&self) -> u64 {
        match self.sign {
            Sign::Unitary => self.q + 1,
            Sign::Linear => self.q - 1,
        }
    }

    /// q ∓ 1.
    pub fn q_mp(&self) -> u64 {
        match self.sign {
            Sign::Unitary => self.q - 1,
            Sign::Linear => self.q + 1,
        }
    }

    /// q³ ± 1: the order of θ.
    pub fn q3_pm(&self) -> u64 {
        match self.sign {
            Sign::Unitary => self.q.pow(3) + 1,
            Sign::Linear => self.q.pow(3) - 1,
        }
    }

    /// q² ∓ q + 1.
    pub fn q2_mp_q_1(&self) -> u64 {
        match self.sign {
            Sign::Unitary => self.q * self.q - self.q + 1,
            Sign::Linear => self.q * self.q + self.q + 1,
        }
    }

    fn scaled(&self, base: u64, k: u64) -> u64 {
        ((base as u128 * k as u128) % self.modulus as u128) as u64
    }

    pub fn omega(&self, k: u64) -> u64 {
        self.scaled(self.exp_omega, k)
    }

    pub fn rho(&self, l: u64) -> u64 {
        self.scaled(self.exp_rho, l)
    }

    pub fn theta(&self, k: u64) -> u64 {
        self.scaled(self.exp_theta, k)
    }

    pub fn reduce(&self, e: i128) -> u64 {
        e.rem_euclid(self.modulus as i128) as u64
    }

    /// Multiplicative order of τ^e.
    pub fn order_of(&self, e: u64) -> u64 {
        self.modulus / self.modulus.gcd(&(e % self.modulus))
    }
}

/// A formal integer combination Σ c_e ζ_N^e of N-th roots of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycSum {
    modulus: u64,
    coeffs: BTreeMap<u64, BigInt>,
}

impl CycSum {
    pub fn zero(modulus: u64) -> Self {
        Self {
            modulus,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(modulus: u64, c: impl Into<BigInt>) -> Self {
        let mut s = Self::zero(modulus);
        s.add_term(0, c.into());
        s
    }

    /// c · ζ^e.
    pub fn term(modulus: u64, e: u64, c: impl Into<BigInt>) -> Self {
        let mut s = Self::zero(modulus);
        s.add_term(e, c.into());
        s
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, BigInt> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, e: u64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = e % self.modulus;
        let entry = self.coeffs.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn add_assign(&mut self, other: &CycSum) -> Result<(), ArithError> {
        if self.modulus != other.modulus {
            return Err(ArithError::ModulusMismatch(self.modulus, other.modulus));
        }
        for (&e, c) in &other.coeffs {
            self.add_term(e, c.clone());
        }
        Ok(())
    }

    pub fn scale(&self, c: &BigInt) -> CycSum {
        let mut out = CycSum::zero(self.modulus);
        if c.is_zero() {
            return out;
        }
        for (&e, v) in &self.coeffs {
            out.coeffs.insert(e, v * c);
        }
        out
    }

    /// Complex conjugate: ζ^e ↦ ζ^{−e}.
    pub fn conj(&self) -> CycSum {
        let mut out = CycSum::zero(self.modulus);
        for (&e, v) in &self.coeffs {
            out.add_term((self.modulus - e) % self.modulus, v.clone());
        }
        out
    }

    pub fn mul(&self, other: &CycSum) -> Result<CycSum, ArithError> {
        cyc_mul(self, other)
    }

    pub fn rational(&self) -> Rational {
        cyc_rational(self)
    }
}

impl fmt::Display for CycSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            let sign = if c.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            let coeff = if mag.is_one() && *e != 0 {
                String::new()
            } else {
                mag.to_string()
            };
            if *e == 0 {
                write!(f, "{sign}{coeff}")?;
            } else {
                write!(f, "{sign}{coeff}z^{e}")?;
            }
            first = false;
        }
        write!(f, " (z^{}=1)", self.modulus)
    }
}

pub fn cyc_mul(a: &CycSum, b: &CycSum) -> Result<CycSum, ArithError> {
    if a.modulus != b.modulus {
        return Err(ArithError::ModulusMismatch(a.modulus, b.modulus));
    }
    let n = a.modulus;
    let mut out = CycSum::zero(n);
    for (&ea, ca) in &a.coeffs {
        for (&eb, cb) in &b.coeffs {
            let e = ((ea as u128 + eb as u128) % n as u128) as u64;
            out.add_term(e, ca * cb);
        }
    }
    Ok(out)
}

/// Averages the Galois conjugates of a rational-valued sum, using
/// Tr(ζ_N^e) = μ(N/g)·φ(N)/φ(N/g) with g = gcd(e, N).
pub fn cyc_rational(v: &CycSum) -> Rational {
    let n = v.modulus;
    let mut cache: BTreeMap<u64, (i64, u64)> = BTreeMap::new();
    let mut total = Rational::zero();
    for (&e, c) in &v.coeffs {
        let g = e.gcd(&n);
        let m = n / g;
        let (mu, phi) = *cache.entry(m).or_insert_with(|| (mobius(m), euler_phi(m)));
        if mu != 0 {
            total += Rational::new(c * BigInt::from(mu), BigInt::from(phi));
        }
    }
    total
}
