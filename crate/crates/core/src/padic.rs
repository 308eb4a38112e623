//! Exact p-adic scalars, vectors, coset representatives and canonical balls.
//!
//! Scalars are the p-adic numbers with finite digit expansions, i.e. rationals
//! of the form `m·p^v` with `p ∤ m`. Every locally constant computation in the
//! crate factors through finite quotients, so this subring is closed under all
//! operations that actually occur; no rounding or truncation exists anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Ctx;

/// `p^k` as a big integer. `k` is expected to stay desk-sized.
pub(crate) fn pow_bigint(p: u64, k: u64) -> BigInt {
    BigInt::from(p).pow(u32::try_from(k).expect("exponent out of range"))
}

/// `p^k` as an exact rational, for any sign of `k`.
pub(crate) fn pow_rational(p: u64, k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(pow_bigint(p, k as u64))
    } else {
        BigRational::new(BigInt::one(), pow_bigint(p, (-k) as u64))
    }
}

/// Exact scalar `mantissa · p^valuation` with `p ∤ mantissa`; zero is `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PadicRational {
    mantissa: BigInt,
    valuation: i64,
}

impl PadicRational {
    pub fn zero() -> Self {
        PadicRational { mantissa: BigInt::zero(), valuation: 0 }
    }

    pub fn one() -> Self {
        PadicRational { mantissa: BigInt::one(), valuation: 0 }
    }

    /// `p^k`.
    pub fn p_power(k: i64) -> Self {
        PadicRational { mantissa: BigInt::one(), valuation: k }
    }

    /// Canonicalizes `mantissa · p^valuation`: strips all factors of `p` from
    /// the mantissa into the valuation and maps zero to `(0, 0)`.
    pub fn new(mantissa: BigInt, valuation: i64, p: u64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let big_p = BigInt::from(p);
        let mut m = mantissa;
        let mut v = valuation;
        loop {
            let (q, r) = m.div_rem(&big_p);
            if r.is_zero() {
                m = q;
                v += 1;
            } else {
                break;
            }
        }
        PadicRational { mantissa: m, valuation: v }
    }

    pub fn from_int(n: i64, p: u64) -> Self {
        Self::new(BigInt::from(n), 0, p)
    }

    /// `n / p^k` for an integer `n`.
    pub fn from_int_over_p_pow(n: i64, k: i64, p: u64) -> Self {
        Self::new(BigInt::from(n), -k, p)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    /// `None` for zero (its valuation is +∞).
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.valuation)
        }
    }

    pub fn neg(&self) -> Self {
        PadicRational { mantissa: -&self.mantissa, valuation: self.valuation }
    }

    pub fn add(&self, rhs: &Self, p: u64) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let v = self.valuation.min(rhs.valuation);
        let a = &self.mantissa * pow_bigint(p, (self.valuation - v) as u64);
        let b = &rhs.mantissa * pow_bigint(p, (rhs.valuation - v) as u64);
        Self::new(a + b, v, p)
    }

    pub fn sub(&self, rhs: &Self, p: u64) -> Self {
        self.add(&rhs.neg(), p)
    }

    pub fn mul(&self, rhs: &Self, p: u64) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        // p is prime and divides neither mantissa, so no renormalization is
        // needed; `new` is used for the zero check only.
        let _ = p;
        PadicRational {
            mantissa: &self.mantissa * &rhs.mantissa,
            valuation: self.valuation + rhs.valuation,
        }
    }

    /// Multiplication by `p^k`.
    pub fn shifted(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        PadicRational { mantissa: self.mantissa.clone(), valuation: self.valuation + k }
    }

    /// `|x|_p = p^(−v)`, and `0` for `x = 0`.
    pub fn norm(&self, p: u64) -> BigRational {
        match self.valuation() {
            None => BigRational::zero(),
            Some(v) => pow_rational(p, -v),
        }
    }

    /// The exponent `e` with `|x|_p = p^e`, or `None` for zero.
    pub fn norm_exp(&self) -> Option<i64> {
        self.valuation().map(|v| -v)
    }

    /// Exact value as an ordinary rational.
    pub fn to_rational(&self, p: u64) -> BigRational {
        BigRational::from_integer(self.mantissa.clone()) * pow_rational(p, self.valuation)
    }

    /// Canonical representative of `x mod p^s Z_p`: the unique value with
    /// digits only at exponents in `[v, s)` congruent to `x`.
    pub fn canonical_mod(&self, s: i64, p: u64) -> Self {
        match self.valuation() {
            None => Self::zero(),
            Some(v) if v >= s => Self::zero(),
            Some(v) => {
                let modulus = pow_bigint(p, (s - v) as u64);
                let u = self.mantissa.mod_floor(&modulus);
                Self::new(u, v, p)
            }
        }
    }

    /// `{x}`: the value of the digits at negative exponents, a rational in
    /// `[0, 1)` whose denominator is a power of `p`.
    pub fn fractional_part(&self, p: u64) -> BigRational {
        self.canonical_mod(0, p).to_rational(p)
    }

    /// Base-`p` digit expansion `(start, digits)` with the digit of `p^start`
    /// first. Only meaningful for canonical representatives, whose mantissa is
    /// nonnegative.
    pub fn digit_expansion(&self, p: u64) -> (i64, Vec<u8>) {
        assert!(!self.mantissa.is_negative(), "digit expansion of a non-canonical value");
        if self.is_zero() {
            return (0, Vec::new());
        }
        let big_p = BigInt::from(p);
        let mut digits = Vec::new();
        let mut m = self.mantissa.clone();
        while !m.is_zero() {
            let (q, r) = m.div_rem(&big_p);
            digits.push(u8::try_from(r.to_u64_digits().1.first().copied().unwrap_or(0)).unwrap());
            m = q;
        }
        (self.valuation, digits)
    }

    /// Rebuilds a scalar from its digit expansion.
    pub fn from_digits(start: i64, digits: &[u8], p: u64) -> Self {
        let mut m = BigInt::zero();
        for &dig in digits.iter().rev() {
            m = m * BigInt::from(p) + BigInt::from(dig);
        }
        Self::new(m, start, p)
    }
}

impl std::fmt::Display for PadicRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}*p^{}", self.mantissa, self.valuation)
    }
}

impl PadicRational {
    /// Parses the `"m*p^v"` form produced by `Display`.
    pub fn parse(text: &str, p: u64) -> crate::Result<Self> {
        let (m, v) = text
            .split_once("*p^")
            .ok_or_else(|| crate::CoreError::Parse(format!("bad scalar literal {text:?}")))?;
        let mantissa: BigInt = m
            .trim()
            .parse()
            .map_err(|_| crate::CoreError::Parse(format!("bad mantissa in {text:?}")))?;
        let valuation: i64 = v
            .trim()
            .parse()
            .map_err(|_| crate::CoreError::Parse(format!("bad valuation in {text:?}")))?;
        Ok(Self::new(mantissa, valuation, p))
    }
}

/// Point of `Q_p^d`: a vector of exact scalars.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PVec {
    coords: Vec<PadicRational>,
}

impl PVec {
    pub fn new(coords: Vec<PadicRational>) -> Self {
        PVec { coords }
    }

    pub fn zeros(d: usize) -> Self {
        PVec { coords: vec![PadicRational::zero(); d] }
    }

    /// Standard basis vector `e_index`.
    pub fn basis(d: usize, index: usize) -> Self {
        let mut coords = vec![PadicRational::zero(); d];
        coords[index] = PadicRational::one();
        PVec { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[PadicRational] {
        &self.coords
    }

    pub fn coord(&self, l: usize) -> &PadicRational {
        &self.coords[l]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(PadicRational::is_zero)
    }

    pub fn add(&self, rhs: &Self, p: u64) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        PVec {
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a.add(b, p))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self, p: u64) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        PVec {
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a.sub(b, p))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        PVec { coords: self.coords.iter().map(PadicRational::neg).collect() }
    }

    pub fn scale(&self, c: &PadicRational, p: u64) -> Self {
        PVec { coords: self.coords.iter().map(|a| a.mul(c, p)).collect() }
    }

    /// Multiplication by `p^k` in every coordinate.
    pub fn shifted(&self, k: i64) -> Self {
        PVec { coords: self.coords.iter().map(|a| a.shifted(k)).collect() }
    }

    /// Scalar product `Σ k_l x_l`.
    pub fn dot(&self, rhs: &Self, p: u64) -> PadicRational {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        let mut acc = PadicRational::zero();
        for (a, b) in self.coords.iter().zip(&rhs.coords) {
            acc = acc.add(&a.mul(b, p), p);
        }
        acc
    }

    /// `|x|_p = max_l |x_l|_p`.
    pub fn norm(&self, p: u64) -> BigRational {
        self.coords
            .iter()
            .map(|c| c.norm(p))
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// The exponent `e` with `|x|_p = p^e`, or `None` for the zero vector.
    pub fn norm_exp(&self) -> Option<i64> {
        self.coords.iter().filter_map(PadicRational::norm_exp).max()
    }

    /// Coordinatewise canonical representative mod `p^s Z_p^d`.
    pub fn canonical_mod(&self, s: i64, p: u64) -> Self {
        PVec { coords: self.coords.iter().map(|c| c.canonical_mod(s, p)).collect() }
    }
}

/// Fractional digit string of one coordinate of a coset representative:
/// digits `n_i ∈ {0,…,p−1}` for `i = start,…,−1`, with the digit at `start`
/// nonzero. The empty string is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitLine {
    start: i64,
    digits: Vec<u8>,
}

impl DigitLine {
    pub fn zero() -> Self {
        DigitLine { start: 0, digits: Vec::new() }
    }

    /// Builds the digit string of a canonical fractional scalar (a value in
    /// `[0, 1)` with digits only at negative exponents).
    pub fn from_scalar(x: &PadicRational, p: u64) -> Self {
        match x.valuation() {
            None => Self::zero(),
            Some(v) => {
                assert!(v < 0, "not a fractional representative: {x}");
                let (start, mut digits) = x.digit_expansion(p);
                // pad up to exponent −1 inclusive
                digits.resize((-start) as usize, 0);
                DigitLine { start, digits }
            }
        }
    }

    pub fn from_parts(start: i64, digits: Vec<u8>, p: u64) -> crate::Result<Self> {
        if digits.is_empty() {
            return Ok(Self::zero());
        }
        if start >= 0 || (-start) as usize != digits.len() {
            return Err(crate::CoreError::Parse(format!(
                "digit line must span exponents {start}..-1"
            )));
        }
        if digits[0] == 0 {
            return Err(crate::CoreError::Parse("leading digit must be nonzero".into()));
        }
        if digits.iter().any(|&d| u64::from(d) >= p) {
            return Err(crate::CoreError::Parse("digit out of range".into()));
        }
        Ok(DigitLine { start, digits })
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Number of stored fractional digits, i.e. `−start`.
    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn to_scalar(&self, p: u64) -> PadicRational {
        PadicRational::from_digits(self.start, &self.digits, p)
    }

    pub fn value(&self, p: u64) -> BigRational {
        self.to_scalar(p).to_rational(p)
    }
}

/// Representative of a coset of `Z_p^d` in `Q_p^d`: one fractional digit
/// string per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetRep {
    lines: Vec<DigitLine>,
}

impl CosetRep {
    pub fn zero(d: usize) -> Self {
        CosetRep { lines: vec![DigitLine::zero(); d] }
    }

    pub fn new(lines: Vec<DigitLine>) -> Self {
        CosetRep { lines }
    }

    pub fn dim(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[DigitLine] {
        &self.lines
    }

    pub fn is_zero(&self) -> bool {
        self.lines.iter().all(DigitLine::is_zero)
    }

    /// Largest digit count over the coordinates.
    pub fn depth(&self) -> usize {
        self.lines.iter().map(DigitLine::depth).max().unwrap_or(0)
    }

    pub fn to_pvec(&self, p: u64) -> PVec {
        PVec::new(self.lines.iter().map(|l| l.to_scalar(p)).collect())
    }
}

impl PartialOrd for CosetRep {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CosetRep {
    /// Orders coordinatewise by numeric value, which is the digit-by-digit
    /// lexicographic order starting from the most significant digit.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.lines.iter().zip(&other.lines) {
            // digit at exponent −1 first, then −2, …
            let depth = a.depth().max(b.depth());
            for i in 1..=depth {
                let da = if i <= a.depth() { a.digits[a.depth() - i] } else { 0 };
                let db = if i <= b.depth() { b.digits[b.depth() - i] } else { 0 };
                match da.cmp(&db) {
                    std::cmp::Ordering::Equal => {}
                    ord => return ord,
                }
            }
        }
        std::cmp::Ordering::Equal
    }
}

/// `x mod Z_p^d`: the canonical coset representative with only fractional
/// digits. Two vectors reduce identically exactly when their difference has
/// norm at most one.
pub fn reduce_mod_zp(ctx: &Ctx, x: &PVec) -> CosetRep {
    assert_eq!(x.dim(), ctx.d(), "dimension mismatch");
    CosetRep {
        lines: x
            .coords()
            .iter()
            .map(|c| DigitLine::from_scalar(&c.canonical_mod(0, ctx.p()), ctx.p()))
            .collect(),
    }
}

/// Ball in `Q_p^d` in its unique canonical form `{x : |p^γ x − n|_p ≤ 1}`,
/// a ball of radius `p^γ` centered at `p^(−γ) n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ball {
    gamma: i64,
    center: CosetRep,
}

impl Ball {
    pub fn new(gamma: i64, center: CosetRep) -> Self {
        Ball { gamma, center }
    }

    /// Unit ball around the origin.
    pub fn unit(d: usize) -> Self {
        Ball { gamma: 0, center: CosetRep::zero(d) }
    }

    pub fn gamma(&self) -> i64 {
        self.gamma
    }

    pub fn center(&self) -> &CosetRep {
        &self.center
    }

    /// Radius is `p^gamma`; this returns `gamma`.
    pub fn radius_exp(&self) -> i64 {
        self.gamma
    }

    /// The center as a point, `p^(−γ) n`.
    pub fn center_point(&self, p: u64) -> PVec {
        self.center.to_pvec(p).shifted(-self.gamma)
    }

    pub fn contains(&self, ctx: &Ctx, x: &PVec) -> bool {
        reduce_mod_zp(ctx, &x.shifted(self.gamma)) == self.center
    }

    /// Whether `other` is contained in `self`.
    pub fn contains_ball(&self, ctx: &Ctx, other: &Ball) -> bool {
        other.gamma <= self.gamma && self.contains(ctx, &other.center_point(ctx.p()))
    }
}

/// Canonical form of the ball `{x : |x − center|_p ≤ p^(−scale)}`.
///
/// Idempotent: every ball has exactly one `(γ, n)` representation.
pub fn ball_canonical(ctx: &Ctx, scale: i64, center: &PVec) -> Ball {
    let gamma = -scale;
    Ball { gamma, center: reduce_mod_zp(ctx, &center.shifted(gamma)) }
}

/// All scalars whose digits sit at exponents in `[lo, hi)` — the
/// representatives of `p^lo Z_p / p^hi Z_p`. There are `p^(hi−lo)` of them,
/// in increasing mantissa order.
pub fn digit_scalars(p: u64, lo: i64, hi: i64) -> Vec<PadicRational> {
    if hi <= lo {
        return vec![PadicRational::zero()];
    }
    let count = pow_bigint(p, (hi - lo) as u64);
    let mut out = Vec::new();
    let mut m = BigInt::zero();
    while m < count {
        out.push(PadicRational::new(m.clone(), lo, p));
        m += 1;
    }
    out
}

/// All vectors whose coordinates have digits at exponents in `[lo, hi)`:
/// the `p^(d(hi−lo))` representatives of `p^lo Z_p^d / p^hi Z_p^d`.
pub fn digit_vectors(ctx: &Ctx, lo: i64, hi: i64) -> Vec<PVec> {
    let line = digit_scalars(ctx.p(), lo, hi);
    let mut out: Vec<Vec<PadicRational>> = vec![Vec::new()];
    for _ in 0..ctx.d() {
        let mut next = Vec::with_capacity(out.len() * line.len());
        for prefix in &out {
            for s in &line {
                let mut v = prefix.clone();
                v.push(s.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(PVec::new).collect()
}

/// The smallest ball containing the balls of radius `p^(−scale)` around each
/// of the given points. Returns `None` for an empty set.
pub fn enclosing_ball(ctx: &Ctx, scale: i64, points: &[PVec]) -> Option<Ball> {
    let first = points.first()?;
    let mut radius_exp = -scale;
    for x in &points[1..] {
        if let Some(e) = x.sub(first, ctx.p()).norm_exp() {
            radius_exp = radius_exp.max(e);
        }
    }
    Some(ball_canonical(ctx, -radius_exp, first))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Independent norm oracle: expand |mantissa·p^v| via the base-p digit
    /// expansion of the numerator and denominator of the value.
    fn norm_oracle(value: BigRational, p: u64) -> BigRational {
        if value.is_zero() {
            return BigRational::zero();
        }
        let big_p = BigInt::from(p);
        let mut v: i64 = 0;
        let mut num = value.numer().abs();
        while (&num % &big_p).is_zero() {
            num /= &big_p;
            v += 1;
        }
        let mut den = value.denom().abs();
        while (&den % &big_p).is_zero() {
            den /= &big_p;
            v -= 1;
        }
        pow_rational(p, -v)
    }

    #[test]
    fn scalar_norm_examples() {
        let one = PadicRational::one();
        assert_eq!(one.norm(2), rat(1, 1));

        let p = PadicRational::p_power(1);
        assert_eq!(p.norm(3), rat(1, 3));

        // 5/9 = 5·3^(−2)
        let x = PadicRational::from_int_over_p_pow(5, 2, 3);
        assert_eq!(x.norm(3), rat(9, 1));
        assert_eq!(x.norm(3), norm_oracle(x.to_rational(3), 3));
    }

    #[test]
    fn vector_norm_examples() {
        let p = 5;
        let zero = PVec::zeros(2);
        assert!(zero.norm(p).is_zero());

        let x = PVec::new(vec![PadicRational::from_int(2, p), PadicRational::from_int(5, p)]);
        assert_eq!(x.norm(p), rat(1, 1));

        let y = PVec::new(vec![
            PadicRational::from_int_over_p_pow(1, 1, 2),
            PadicRational::one(),
            PadicRational::from_int(4, 2),
        ]);
        assert_eq!(y.norm(2), rat(2, 1));
    }

    #[test]
    fn fractional_part_examples() {
        assert!(PadicRational::from_int(7, 3).fractional_part(3).is_zero());
        assert_eq!(
            PadicRational::from_int_over_p_pow(1, 1, 3).fractional_part(3),
            rat(1, 3)
        );
        // digits of 5/9 are 2·3^(−2) + 1·3^(−1)
        let x = PadicRational::from_int_over_p_pow(5, 2, 3);
        assert_eq!(x.fractional_part(3), rat(5, 9));
        let (start, digits) = x.canonical_mod(0, 3).digit_expansion(3);
        assert_eq!((start, digits.as_slice()), (-2, &[2u8, 1][..]));
    }

    #[test]
    fn fractional_part_of_negative_values() {
        // −1/2 ≡ 1/2 mod Z_2
        let x = PadicRational::from_int_over_p_pow(-1, 1, 2);
        assert_eq!(x.fractional_part(2), rat(1, 2));
        // −1 is a 2-adic integer
        assert!(PadicRational::from_int(-1, 2).fractional_part(2).is_zero());
    }

    #[test]
    fn reduce_mod_zp_examples() {
        let ctx = Ctx::new(2, 1).unwrap();
        let x = PVec::new(vec![PadicRational::from_int_over_p_pow(3, 2, 2)]);
        let rep = reduce_mod_zp(&ctx, &x);
        assert_eq!(rep.lines()[0].start(), -2);
        assert_eq!(rep.lines()[0].digits(), &[1, 1]);

        let ctx = Ctx::new(3, 2).unwrap();
        let x = PVec::new(vec![
            PadicRational::from_int_over_p_pow(5, 2, 3),
            PadicRational::from_int(2, 3),
        ]);
        let rep = reduce_mod_zp(&ctx, &x);
        assert_eq!(rep.lines()[0].digits(), &[2, 1]);
        assert!(rep.lines()[1].is_zero());

        // integral vectors reduce to zero
        let ints = PVec::new(vec![PadicRational::from_int(7, 3), PadicRational::from_int(-9, 3)]);
        assert!(reduce_mod_zp(&ctx, &ints).is_zero());
    }

    #[test]
    fn ball_canonical_examples() {
        let ctx = Ctx::new(2, 1).unwrap();
        let unit = ball_canonical(&ctx, 0, &PVec::zeros(1));
        assert_eq!(unit, Ball::unit(1));

        let b = ball_canonical(&ctx, 0, &PVec::new(vec![PadicRational::from_int_over_p_pow(3, 2, 2)]));
        assert_eq!(b.gamma(), 0);
        assert_eq!(b.center().lines()[0].digits(), &[1, 1]);

        // radius 3 at the origin for p = 3: radius p^γ forces γ = 1
        let ctx = Ctx::new(3, 1).unwrap();
        let b = ball_canonical(&ctx, -1, &PVec::zeros(1));
        assert_eq!(b.gamma(), 1);
        assert!(b.center().is_zero());
        assert!(b.contains(&ctx, &PVec::new(vec![PadicRational::from_int(3, 3)])));
        assert!(b.contains(&ctx, &PVec::new(vec![PadicRational::from_int_over_p_pow(1, 1, 3)])));
        assert!(!b.contains(&ctx, &PVec::new(vec![PadicRational::from_int_over_p_pow(1, 2, 3)])));
    }

    #[test]
    fn ball_canonical_is_idempotent() {
        let ctx = Ctx::new(3, 2).unwrap();
        let center = PVec::new(vec![
            PadicRational::from_int_over_p_pow(7, 2, 3),
            PadicRational::from_int(4, 3),
        ]);
        let b = ball_canonical(&ctx, 1, &center);
        let again = ball_canonical(&ctx, 1, &b.center_point(3));
        assert_eq!(b, again);
    }

    #[test]
    fn distinct_canonical_balls_have_distinct_membership() {
        // Window: the radius-4 ball around 0 for p = 2, sampled by the 16
        // cosets at the finest scale (cells of radius 1/4). Every ball whose
        // center lies on that grid and whose radius spans 1/4..4 must get a
        // unique membership vector.
        let ctx = Ctx::new(2, 1).unwrap();
        let p = 2u64;
        let grid: Vec<PVec> = (0..16i64)
            .map(|num| PVec::new(vec![PadicRational::new(BigInt::from(num), -2, p)]))
            .collect();
        let mut balls = Vec::new();
        for scale in -2..=2i64 {
            for center in &grid {
                balls.push(ball_canonical(&ctx, scale, center));
            }
        }
        balls.sort_by_key(|b| (b.gamma(), format!("{:?}", b.center())));
        balls.dedup();
        let points = grid;
        let memberships: Vec<Vec<bool>> = balls
            .iter()
            .map(|b| points.iter().map(|x| b.contains(&ctx, x)).collect())
            .collect();
        for i in 0..balls.len() {
            for j in (i + 1)..balls.len() {
                assert_ne!(
                    memberships[i], memberships[j],
                    "distinct canonical balls {:?} and {:?} describe the same set",
                    balls[i], balls[j]
                );
            }
        }
    }

    #[test]
    fn scalar_parse_roundtrip() {
        let x = PadicRational::from_int_over_p_pow(-5, 2, 3);
        let text = x.to_string();
        assert_eq!(PadicRational::parse(&text, 3).unwrap(), x);
        assert!(PadicRational::parse("garbage", 3).is_err());
    }

    #[test]
    fn enclosing_ball_of_cells() {
        let ctx = Ctx::new(2, 1).unwrap();
        // cells 0 and 1 at scale 1 sit inside the unit ball and in nothing smaller
        let pts = vec![
            PVec::zeros(1),
            PVec::new(vec![PadicRational::one()]),
        ];
        let b = enclosing_ball(&ctx, 1, &pts).unwrap();
        assert_eq!(b, Ball::unit(1));
        // a single cell is its own ball
        let b = enclosing_ball(&ctx, 1, &pts[..1]).unwrap();
        assert_eq!(b.gamma(), -1);
    }

    proptest::proptest! {
        #[test]
        fn ultrametric_inequality(ma in -40i64..40, va in -3i64..3, mb in -40i64..40, vb in -3i64..3) {
            let p = 3u64;
            let a = PadicRational::new(BigInt::from(ma), va, p);
            let b = PadicRational::new(BigInt::from(mb), vb, p);
            let sum = a.add(&b, p);
            let na = a.norm(p);
            let nb = b.norm(p);
            let bound = na.clone().max(nb.clone());
            proptest::prop_assert!(sum.norm(p) <= bound);
            if na != nb {
                proptest::prop_assert_eq!(sum.norm(p), bound);
            }
        }

        #[test]
        fn norm_is_multiplicative(ma in -40i64..40, va in -3i64..3, mb in -40i64..40, vb in -3i64..3) {
            let p = 5u64;
            let a = PadicRational::new(BigInt::from(ma), va, p);
            let b = PadicRational::new(BigInt::from(mb), vb, p);
            proptest::prop_assert_eq!(a.mul(&b, p).norm(p), a.norm(p) * b.norm(p));
        }

        #[test]
        fn reduction_detects_integral_differences(
            ma in -20i64..20, va in -2i64..2, mb in -20i64..20, vb in -2i64..2
        ) {
            let ctx = Ctx::new(3, 1).unwrap();
            let x = PVec::new(vec![PadicRational::new(BigInt::from(ma), va, 3)]);
            let y = PVec::new(vec![PadicRational::new(BigInt::from(mb), vb, 3)]);
            let same = reduce_mod_zp(&ctx, &x) == reduce_mod_zp(&ctx, &y);
            let near = x.sub(&y, 3).norm(3) <= BigRational::from_u64(1).unwrap();
            proptest::prop_assert_eq!(same, near);
        }
    }
}
