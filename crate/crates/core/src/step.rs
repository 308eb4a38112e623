//! Locally constant compactly supported functions on `Q_p^d`.
//!
//! A `StepFunction` is a finite map from canonical coset representatives mod
//! `p^scale Z_p^d` to nonzero exact amplitudes; the empty map is the zero
//! function and the support is implicit in the keys. Equality is semantic:
//! two functions are equal when they agree after refinement to a common
//! scale. All operations are exact and pure.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::cyclo::ScaledAmplitude;
use crate::padic::{digit_vectors, enclosing_ball, pow_rational, Ball, PVec};
use crate::{CoreError, Ctx, Result};

#[derive(Clone, Debug)]
pub struct StepFunction {
    p: u64,
    d: usize,
    scale: i64,
    cells: BTreeMap<PVec, ScaledAmplitude>,
}

impl StepFunction {
    pub fn zero(ctx: &Ctx) -> Self {
        StepFunction { p: ctx.p(), d: ctx.d(), scale: 0, cells: BTreeMap::new() }
    }

    /// Characteristic function of a ball: value one on it, absent elsewhere.
    pub fn indicator(ctx: &Ctx, ball: &Ball) -> Self {
        let scale = -ball.gamma();
        let key = ball.center_point(ctx.p()).canonical_mod(scale, ctx.p());
        let mut cells = BTreeMap::new();
        cells.insert(key, ScaledAmplitude::one());
        StepFunction { p: ctx.p(), d: ctx.d(), scale, cells }
    }

    /// Builds a function from `(representative, amplitude)` pairs at the given
    /// scale. Keys are canonicalized, repeated keys accumulate, zeros prune.
    pub fn from_cells<I>(ctx: &Ctx, scale: i64, pairs: I) -> Self
    where
        I: IntoIterator<Item = (PVec, ScaledAmplitude)>,
    {
        let mut cells: BTreeMap<PVec, ScaledAmplitude> = BTreeMap::new();
        for (key, amp) in pairs {
            assert_eq!(key.dim(), ctx.d(), "dimension mismatch");
            if amp.is_zero() {
                continue;
            }
            let key = key.canonical_mod(scale, ctx.p());
            match cells.entry(key) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(amp);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(&amp, ctx.p());
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        let mut f = StepFunction { p: ctx.p(), d: ctx.d(), scale, cells };
        f.normalize_empty();
        f
    }

    fn normalize_empty(&mut self) {
        if self.cells.is_empty() {
            self.scale = 0;
        }
    }

    pub fn ctx(&self) -> Ctx {
        Ctx::new(self.p, self.d).expect("stored context is valid")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Constancy scale: the function is constant on cosets of `p^scale Z_p^d`.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn cells(&self) -> &BTreeMap<PVec, ScaledAmplitude> {
        &self.cells
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    fn assert_compatible(&self, rhs: &Self) {
        assert!(
            self.p == rhs.p && self.d == rhs.d,
            "mixing ambient contexts: ({}, {}) vs ({}, {})",
            self.p,
            self.d,
            rhs.p,
            rhs.d
        );
    }

    /// The same function expressed on the finer grid `p^target Z_p^d`; each
    /// cell splits into `p^(d·(target−scale))` children carrying the parent
    /// amplitude.
    pub fn refine(&self, target: i64) -> Result<Self> {
        if target < self.scale {
            return Err(CoreError::ScaleTooCoarse { target, current: self.scale });
        }
        if target == self.scale || self.is_zero() {
            let mut f = self.clone();
            f.scale = if f.is_zero() { 0 } else { target };
            return Ok(f);
        }
        let deltas = digit_vectors(&self.ctx(), self.scale, target);
        let mut cells = BTreeMap::new();
        for (key, amp) in &self.cells {
            for delta in &deltas {
                cells.insert(key.add(delta, self.p), amp.clone());
            }
        }
        Ok(StepFunction { p: self.p, d: self.d, scale: target, cells })
    }

    /// Amplitude of the cell containing `x` (zero off the support).
    pub fn evaluate(&self, x: &PVec) -> ScaledAmplitude {
        assert_eq!(x.dim(), self.d, "dimension mismatch");
        self.cells
            .get(&x.canonical_mod(self.scale, self.p))
            .cloned()
            .unwrap_or_else(ScaledAmplitude::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_compatible(rhs);
        let s = self.scale.max(rhs.scale);
        let a = self.refine(s).expect("refining to the common scale");
        let b = rhs.refine(s).expect("refining to the common scale");
        let ctx = self.ctx();
        StepFunction::from_cells(&ctx, s, a.cells.into_iter().chain(b.cells))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale_amp(&ScaledAmplitude::one().neg()))
    }

    /// Pointwise product with a constant amplitude.
    pub fn scale_amp(&self, c: &ScaledAmplitude) -> Self {
        if c.is_zero() {
            return StepFunction::zero(&self.ctx());
        }
        StepFunction {
            p: self.p,
            d: self.d,
            scale: self.scale,
            cells: self
                .cells
                .iter()
                .map(|(k, a)| (k.clone(), a.mul(c, self.p)))
                .collect(),
        }
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        self.scale_amp(&ScaledAmplitude::from_rational(q.clone()))
    }

    /// Exact pointwise product. The result lives at the finer of the two
    /// scales; only the finer function's cells are visited.
    pub fn mul_pointwise(&self, rhs: &Self) -> Self {
        self.assert_compatible(rhs);
        let (fine, coarse, self_is_fine) =
            if self.scale >= rhs.scale { (self, rhs, true) } else { (rhs, self, false) };
        let mut cells = BTreeMap::new();
        for (key, amp) in &fine.cells {
            let other = coarse.evaluate(key);
            if other.is_zero() {
                continue;
            }
            let prod = if self_is_fine { amp.mul(&other, self.p) } else { other.mul(amp, self.p) };
            if !prod.is_zero() {
                cells.insert(key.clone(), prod);
            }
        }
        let mut f = StepFunction { p: self.p, d: self.d, scale: fine.scale, cells };
        f.normalize_empty();
        f
    }

    pub fn conj(&self) -> Self {
        StepFunction {
            p: self.p,
            d: self.d,
            scale: self.scale,
            cells: self.cells.iter().map(|(k, a)| (k.clone(), a.conj(self.p))).collect(),
        }
    }

    /// `∫ f dμ` for the Haar measure with `μ(Z_p^d) = 1`: the amplitude sum
    /// times the cell measure `p^(−scale·d)`.
    pub fn integrate(&self) -> ScaledAmplitude {
        let mut sum = ScaledAmplitude::zero();
        for amp in self.cells.values() {
            sum = sum.add(amp, self.p);
        }
        sum.scale(&self.cell_measure())
    }

    fn cell_measure(&self) -> BigRational {
        pow_rational(self.p, -self.scale * self.d as i64)
    }

    /// `⟨f, g⟩ = ∫ f·conj(g) dμ`: conjugate-symmetric and sesquilinear.
    pub fn inner(&self, rhs: &Self) -> ScaledAmplitude {
        self.assert_compatible(rhs);
        let (fine, coarse, self_is_fine) =
            if self.scale >= rhs.scale { (self, rhs, true) } else { (rhs, self, false) };
        let mut sum = ScaledAmplitude::zero();
        for (key, amp) in &fine.cells {
            let other = coarse.evaluate(key);
            if other.is_zero() {
                continue;
            }
            let term = if self_is_fine {
                amp.mul(&other.conj(self.p), self.p)
            } else {
                other.mul(&amp.conj(self.p), self.p)
            };
            sum = sum.add(&term, self.p);
        }
        sum.scale(&pow_rational(self.p, -fine.scale * self.d as i64))
    }

    /// Brute-force floating-point inner product: refine both functions to the
    /// common grid and sum cell by cell in complex doubles. An independent
    /// verification path for `inner`.
    pub fn inner_float(&self, rhs: &Self) -> Complex64 {
        self.assert_compatible(rhs);
        let s = self.scale.max(rhs.scale);
        let a = self.refine(s).expect("refining to the common scale");
        let b = rhs.refine(s).expect("refining to the common scale");
        let measure = (self.p as f64).powi((-s * self.d as i64) as i32);
        let mut sum = Complex64::new(0.0, 0.0);
        for (key, amp) in &a.cells {
            if let Some(other) = b.cells.get(key) {
                sum += amp.to_complex(self.p) * other.to_complex(self.p).conj() * measure;
            }
        }
        sum
    }

    /// `f(x) ↦ f(x + t)`.
    pub fn translate(&self, t: &PVec) -> Self {
        assert_eq!(t.dim(), self.d, "dimension mismatch");
        let cells = self
            .cells
            .iter()
            .map(|(k, a)| (k.sub(t, self.p).canonical_mod(self.scale, self.p), a.clone()))
            .collect();
        StepFunction { p: self.p, d: self.d, scale: self.scale, cells }
    }

    /// The unitary dilation `f(x) ↦ p^(−dγ/2) f(p^γ x)`.
    pub fn dilate(&self, gamma: i64) -> Self {
        self.dilate_unnormalized(gamma)
            .scale_amp(&ScaledAmplitude::half_power(-(self.d as i64) * gamma, self.p))
    }

    /// `f(x) ↦ f(p^γ x)` without the unitary factor.
    pub fn dilate_unnormalized(&self, gamma: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let cells = self
            .cells
            .iter()
            .map(|(k, a)| (k.shifted(-gamma), a.clone()))
            .collect();
        StepFunction { p: self.p, d: self.d, scale: self.scale - gamma, cells }
    }

    /// Merges complete families of equal-amplitude sibling cells, lowering the
    /// scale as far as the function allows. Canonical: equal functions compact
    /// to identical representations.
    pub fn compact(&self) -> Self {
        let mut f = self.clone();
        f.normalize_empty();
        'outer: loop {
            if f.is_zero() {
                return f;
            }
            let parent_scale = f.scale - 1;
            let family = (f.p as usize).pow(f.d as u32);
            let mut groups: BTreeMap<PVec, Vec<&ScaledAmplitude>> = BTreeMap::new();
            for (key, amp) in &f.cells {
                groups
                    .entry(key.canonical_mod(parent_scale, f.p))
                    .or_default()
                    .push(amp);
            }
            for amps in groups.values() {
                if amps.len() != family || amps.iter().any(|a| *a != amps[0]) {
                    break 'outer;
                }
            }
            let cells = groups
                .into_iter()
                .map(|(parent, amps)| (parent, amps[0].clone()))
                .collect();
            f = StepFunction { p: f.p, d: f.d, scale: parent_scale, cells };
        }
        f
    }

    /// The smallest ball containing the support, `None` for zero.
    pub fn support_ball(&self) -> Option<Ball> {
        let keys: Vec<PVec> = self.cells.keys().cloned().collect();
        enclosing_ball(&self.ctx(), self.scale, &keys)
    }

    /// Whether `∫ f dμ` is formally zero.
    pub fn is_mean_zero(&self) -> bool {
        self.integrate().is_zero()
    }

    /// Membership in the space of mean-zero locally constant compactly
    /// supported functions. Every step function is locally constant and
    /// compactly supported, and the zero function belongs to the space, so
    /// this is exactly the mean-zero test.
    pub fn is_in_d0(&self) -> bool {
        self.is_mean_zero()
    }
}

impl PartialEq for StepFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p || self.d != other.d {
            return false;
        }
        let s = self.scale.max(other.scale);
        let a = self.refine(s).expect("refining to the common scale");
        let b = other.refine(s).expect("refining to the common scale");
        a.cells == b.cells
    }
}

impl Eq for StepFunction {}

/// Product function `f(x_1, …, x_d) = Π_l f_l(x_l)` of one-dimensional
/// factors over the same prime.
pub fn tensor_product(ctx: &Ctx, factors: &[StepFunction]) -> StepFunction {
    assert_eq!(factors.len(), ctx.d(), "need one factor per coordinate");
    for f in factors {
        assert_eq!(f.d(), 1, "tensor factors must be one-dimensional");
        assert_eq!(f.p(), ctx.p(), "mixing ambient contexts");
    }
    let s = factors.iter().map(StepFunction::scale).max().unwrap_or(0);
    let refined: Vec<StepFunction> = factors
        .iter()
        .map(|f| f.refine(s).expect("refining to the common scale"))
        .collect();
    let mut acc: Vec<(Vec<crate::padic::PadicRational>, ScaledAmplitude)> =
        vec![(Vec::new(), ScaledAmplitude::one())];
    for f in &refined {
        let mut next = Vec::with_capacity(acc.len() * f.cells.len().max(1));
        for (prefix, amp) in &acc {
            for (key, a) in &f.cells {
                let mut coords = prefix.clone();
                coords.push(key.coord(0).clone());
                next.push((coords, amp.mul(a, ctx.p())));
            }
        }
        acc = next;
    }
    StepFunction::from_cells(ctx, s, acc.into_iter().map(|(coords, amp)| (PVec::new(coords), amp)))
}
