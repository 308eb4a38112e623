//! Exact complex amplitudes: p-power roots of unity, cyclotomic numbers, and
//! the scaled amplitudes `a + b·√p` that carry all function values and inner
//! products.
//!
//! A `CyclotomicNumber` lives in `Q(ζ)` for `ζ = e^(2πi/p^M)`, stored on the
//! power basis `ζ^0, …, ζ^(φ(p^M)−1)` and reduced modulo the sparse cyclotomic
//! polynomial `Φ_{p^M}(X) = Σ_{i<p} X^(i·p^(M−1))`. Values are kept
//! conductor-minimal, so structural equality is value equality. `√p` is a
//! formal symbol with square `p`; the even and odd components never mix in any
//! identity this crate computes, and the floating-point oracles cross-check
//! that reading.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::padic::{pow_rational, PVec, PadicRational};

/// `φ(p^M)`: the degree of the cyclotomic field of conductor `p^M`.
fn phi(p: u64, m: u32) -> usize {
    if m == 0 {
        1
    } else {
        ((p - 1) * p.pow(m - 1)) as usize
    }
}

fn conductor(p: u64, m: u32) -> u64 {
    p.checked_pow(m).expect("conductor out of range")
}

/// `e^(2πi k / p^M)` in canonical form: `0 ≤ k < p^M` and `p ∤ k` unless `M = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    conductor_exp: u32,
    exponent: u64,
}

impl RootOfUnity {
    pub fn one() -> Self {
        RootOfUnity { conductor_exp: 0, exponent: 0 }
    }

    pub fn new(conductor_exp: u32, exponent: u64, p: u64) -> Self {
        let mut m = conductor_exp;
        let mut k = exponent % conductor(p, m);
        while m > 0 && k % p == 0 {
            k /= p;
            m -= 1;
        }
        if m == 0 {
            k = 0;
        }
        RootOfUnity { conductor_exp: m, exponent: k }
    }

    /// `ζ_p^k` for the primitive p-th root `ζ_p`.
    pub fn zeta_p(k: u64, p: u64) -> Self {
        Self::new(1, k % p, p)
    }

    pub fn conductor_exp(&self) -> u32 {
        self.conductor_exp
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_one(&self) -> bool {
        self.conductor_exp == 0
    }

    pub fn mul(&self, rhs: &Self, p: u64) -> Self {
        let m = self.conductor_exp.max(rhs.conductor_exp);
        let a = self.exponent * conductor(p, m - self.conductor_exp);
        let b = rhs.exponent * conductor(p, m - rhs.conductor_exp);
        Self::new(m, a + b, p)
    }

    pub fn conj(&self, p: u64) -> Self {
        let n = conductor(p, self.conductor_exp);
        Self::new(self.conductor_exp, (n - self.exponent) % n, p)
    }

    pub fn pow(&self, e: u64, p: u64) -> Self {
        let n = conductor(p, self.conductor_exp);
        Self::new(self.conductor_exp, (self.exponent % n) * (e % n), p)
    }

    pub fn to_complex(&self, p: u64) -> Complex64 {
        let angle =
            std::f64::consts::TAU * self.exponent as f64 / conductor(p, self.conductor_exp) as f64;
        Complex64::new(angle.cos(), angle.sin())
    }
}

/// The additive character `χ(x) = e^(2πi {x})`.
///
/// A homomorphism: `χ(x + y) = χ(x)·χ(y)` exactly, as roots of unity.
pub fn char_scalar(x: &PadicRational, p: u64) -> RootOfUnity {
    let frac = x.canonical_mod(0, p);
    match frac.valuation() {
        None => RootOfUnity::one(),
        Some(v) => {
            let m = u32::try_from(-v).expect("character depth out of range");
            let k = frac
                .mantissa()
                .to_u64()
                .expect("character numerator out of range");
            // frac is canonical: 0 < k < p^m with p ∤ k
            RootOfUnity { conductor_exp: m, exponent: k }
        }
    }
}

/// `χ(k·x)` for the scalar product `k·x = Σ k_l x_l`.
pub fn char_pairing(k: &PVec, x: &PVec, p: u64) -> RootOfUnity {
    char_scalar(&k.dot(x, p), p)
}

/// Element of `Q(ζ_{p^M})` on the power basis, conductor-minimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicNumber {
    conductor_exp: u32,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero() -> Self {
        CyclotomicNumber { conductor_exp: 0, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        CyclotomicNumber { conductor_exp: 0, coeffs: vec![BigRational::one()] }
    }

    pub fn from_rational(q: BigRational) -> Self {
        CyclotomicNumber { conductor_exp: 0, coeffs: vec![q] }
    }

    pub fn from_root(root: &RootOfUnity, p: u64) -> Self {
        let m = root.conductor_exp;
        let mut dense = vec![BigRational::zero(); root.exponent as usize + 1];
        dense[root.exponent as usize] = BigRational::one();
        Self::from_dense(m, dense, p)
    }

    /// Builds from raw power-basis coefficients at the given conductor,
    /// reducing and canonicalizing. Coefficient vectors of any length are
    /// accepted; exponents beyond the basis fold back in.
    pub fn from_coeffs(conductor_exp: u32, coeffs: Vec<BigRational>, p: u64) -> Self {
        Self::from_dense(conductor_exp, coeffs, p)
    }

    /// Builds from a dense polynomial in `ζ_{p^M}` (any length), reducing
    /// modulo `Φ_{p^M}` and minimizing the conductor.
    fn from_dense(conductor_exp: u32, dense: Vec<BigRational>, p: u64) -> Self {
        let mut value = CyclotomicNumber {
            conductor_exp,
            coeffs: reduce_mod_cyclotomic(conductor_exp, dense, p),
        };
        value.minimize_conductor(p);
        value
    }

    pub fn conductor_exp(&self) -> u32 {
        self.conductor_exp
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_zero)
    }

    /// `Some(q)` when the value is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.conductor_exp == 0 {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Re-expresses the value over the larger conductor `p^target`.
    fn lift(&self, target: u32, p: u64) -> Vec<BigRational> {
        debug_assert!(target >= self.conductor_exp);
        let stride = conductor(p, target - self.conductor_exp) as usize;
        let mut out = vec![BigRational::zero(); phi(p, target)];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out[j * stride] = c.clone();
            }
        }
        out
    }

    fn minimize_conductor(&mut self, p: u64) {
        while self.conductor_exp > 0 {
            let stride = p as usize;
            let in_subfield = self
                .coeffs
                .iter()
                .enumerate()
                .all(|(j, c)| j % stride == 0 || c.is_zero());
            if !in_subfield {
                return;
            }
            let lower = phi(p, self.conductor_exp - 1);
            let mut next = Vec::with_capacity(lower);
            for i in 0..lower {
                next.push(self.coeffs[i * stride].clone());
            }
            self.coeffs = next;
            self.conductor_exp -= 1;
        }
    }

    pub fn add(&self, rhs: &Self, p: u64) -> Self {
        let m = self.conductor_exp.max(rhs.conductor_exp);
        let mut a = self.lift(m, p);
        let b = rhs.lift(m, p);
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        Self::from_dense(m, a, p)
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber {
            conductor_exp: self.conductor_exp,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self, p: u64) -> Self {
        self.add(&rhs.neg(), p)
    }

    pub fn mul(&self, rhs: &Self, p: u64) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let m = self.conductor_exp.max(rhs.conductor_exp);
        let a = self.lift(m, p);
        let b = rhs.lift(m, p);
        let mut prod = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Self::from_dense(m, prod, p)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        CyclotomicNumber {
            conductor_exp: self.conductor_exp,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Complex conjugation, `ζ ↦ ζ^(−1)`.
    pub fn conj(&self, p: u64) -> Self {
        if self.conductor_exp == 0 {
            return self.clone();
        }
        let n = conductor(p, self.conductor_exp) as usize;
        let mut dense = vec![BigRational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let e = if j == 0 { 0 } else { n - j };
                dense[e] += c;
            }
        }
        Self::from_dense(self.conductor_exp, dense, p)
    }

    pub fn to_complex(&self, p: u64) -> Complex64 {
        let n = conductor(p, self.conductor_exp) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = std::f64::consts::TAU * j as f64 / n;
            acc += Complex64::new(angle.cos(), angle.sin()) * rational_to_f64(c);
        }
        acc
    }
}

/// Reduces a dense polynomial in `ζ_{p^M}` to the power basis of length
/// `φ(p^M)`, using `ζ^(p^M) = 1` and `Φ_{p^M}(ζ) = 0`.
fn reduce_mod_cyclotomic(m: u32, dense: Vec<BigRational>, p: u64) -> Vec<BigRational> {
    if m == 0 {
        let mut total = BigRational::zero();
        for c in dense {
            total += c;
        }
        return vec![total];
    }
    let n = conductor(p, m) as usize;
    let q = conductor(p, m - 1) as usize;
    let deg = phi(p, m);
    let mut folded = vec![BigRational::zero(); n];
    for (e, c) in dense.into_iter().enumerate() {
        if !c.is_zero() {
            folded[e % n] += c;
        }
    }
    // ζ^(deg + r) = −Σ_{i<p−1} ζ^(r + i·q) for 0 ≤ r < q
    let mut out = folded;
    for e in deg..n {
        let c = std::mem::replace(&mut out[e], BigRational::zero());
        if c.is_zero() {
            continue;
        }
        let r = e - deg;
        for i in 0..(p - 1) as usize {
            out[r + i * q] -= &c;
        }
    }
    out.truncate(deg);
    out
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

/// Exact amplitude `even + odd·√p`, the value field of every function and
/// inner product in the crate. `√p` is formal with `√p·√p = p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledAmplitude {
    even: CyclotomicNumber,
    odd: CyclotomicNumber,
}

impl ScaledAmplitude {
    pub fn zero() -> Self {
        ScaledAmplitude { even: CyclotomicNumber::zero(), odd: CyclotomicNumber::zero() }
    }

    pub fn one() -> Self {
        ScaledAmplitude { even: CyclotomicNumber::one(), odd: CyclotomicNumber::zero() }
    }

    pub fn from_rational(q: BigRational) -> Self {
        ScaledAmplitude { even: CyclotomicNumber::from_rational(q), odd: CyclotomicNumber::zero() }
    }

    pub fn from_root(root: &RootOfUnity, p: u64) -> Self {
        ScaledAmplitude { even: CyclotomicNumber::from_root(root, p), odd: CyclotomicNumber::zero() }
    }

    pub fn from_parts(even: CyclotomicNumber, odd: CyclotomicNumber) -> Self {
        ScaledAmplitude { even, odd }
    }

    /// `p^(k/2)`: an even power of `√p` lands in the rational part, an odd
    /// power contributes `p^((k−1)/2)·√p`.
    pub fn half_power(k: i64, p: u64) -> Self {
        if k.rem_euclid(2) == 0 {
            Self::from_rational(pow_rational(p, k / 2))
        } else {
            ScaledAmplitude {
                even: CyclotomicNumber::zero(),
                odd: CyclotomicNumber::from_rational(pow_rational(p, (k - 1) / 2)),
            }
        }
    }

    pub fn even(&self) -> &CyclotomicNumber {
        &self.even
    }

    pub fn odd(&self) -> &CyclotomicNumber {
        &self.odd
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }

    /// `Some(q)` when the value is an ordinary rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.odd.is_zero() {
            self.even.as_rational()
        } else {
            None
        }
    }

    pub fn add(&self, rhs: &Self, p: u64) -> Self {
        ScaledAmplitude {
            even: self.even.add(&rhs.even, p),
            odd: self.odd.add(&rhs.odd, p),
        }
    }

    pub fn sub(&self, rhs: &Self, p: u64) -> Self {
        self.add(&rhs.neg(), p)
    }

    pub fn neg(&self) -> Self {
        ScaledAmplitude { even: self.even.neg(), odd: self.odd.neg() }
    }

    pub fn mul(&self, rhs: &Self, p: u64) -> Self {
        let p_rat = BigRational::from_integer(BigInt::from(p));
        let even = self
            .even
            .mul(&rhs.even, p)
            .add(&self.odd.mul(&rhs.odd, p).scale(&p_rat), p);
        let odd = self.even.mul(&rhs.odd, p).add(&self.odd.mul(&rhs.even, p), p);
        ScaledAmplitude { even, odd }
    }

    pub fn mul_root(&self, root: &RootOfUnity, p: u64) -> Self {
        self.mul(&Self::from_root(root, p), p)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        ScaledAmplitude { even: self.even.scale(q), odd: self.odd.scale(q) }
    }

    /// Complex conjugation: fixes `√p`, inverts roots of unity.
    pub fn conj(&self, p: u64) -> Self {
        ScaledAmplitude { even: self.even.conj(p), odd: self.odd.conj(p) }
    }

    /// `|a|² = a·conj(a)`, exact.
    pub fn norm_sq(&self, p: u64) -> Self {
        self.mul(&self.conj(p), p)
    }

    pub fn to_complex(&self, p: u64) -> Complex64 {
        self.even.to_complex(p) + self.odd.to_complex(p) * (p as f64).sqrt()
    }
}

impl std::fmt::Display for ScaledAmplitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn part(c: &CyclotomicNumber) -> String {
            let coeffs: Vec<String> = c.coeffs().iter().map(|q| q.to_string()).collect();
            format!("[{}]@p^{}", coeffs.join(","), c.conductor_exp())
        }
        if self.odd.is_zero() {
            write!(f, "{}", part(&self.even))
        } else {
            write!(f, "{} + {}·√p", part(&self.even), part(&self.odd))
        }
    }
}
