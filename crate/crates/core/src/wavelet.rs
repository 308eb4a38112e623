//! The wavelet family `ψ_J` on the unit ball and the full basis
//! `ψ_{γnJ}(x) = p^(−dγ/2) ψ_J(p^γ x − n)`, with exact analysis and synthesis
//! for mean-zero functions.
//!
//! `ψ_J(x) = χ(p^(−1) J·x)` on the unit ball: constant on the `p^d` cosets of
//! `p Z_p^d`, mean zero, and there are exactly `p^d − 1` distinct such
//! functions, indexed by the nonzero digit vectors `J`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::One;

use crate::cyclo::{char_pairing, ScaledAmplitude};
use crate::padic::{digit_vectors, pow_rational, reduce_mod_zp, CosetRep, PVec, PadicRational};
use crate::step::StepFunction;
use crate::{CoreError, Ctx, Result};

/// Index `(γ, n, J)` of one basis vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WaveletIndex {
    gamma: i64,
    n: CosetRep,
    j: Vec<u8>,
}

impl WaveletIndex {
    pub fn new(ctx: &Ctx, gamma: i64, n: CosetRep, j: Vec<u8>) -> Result<Self> {
        if n.dim() != ctx.d() {
            return Err(CoreError::InvalidConfig("translation index has wrong dimension".into()));
        }
        validate_direction(ctx, &j)?;
        Ok(WaveletIndex { gamma, n, j })
    }

    pub fn gamma(&self) -> i64 {
        self.gamma
    }

    pub fn n(&self) -> &CosetRep {
        &self.n
    }

    pub fn j(&self) -> &[u8] {
        &self.j
    }
}

fn validate_direction(ctx: &Ctx, j: &[u8]) -> Result<()> {
    if j.len() != ctx.d()
        || j.iter().all(|&c| c == 0)
        || j.iter().any(|&c| u64::from(c) >= ctx.p())
    {
        return Err(CoreError::InvalidWaveletIndex);
    }
    Ok(())
}

/// The direction vectors `J`: all nonzero digit vectors, in lexicographic
/// order. Exactly `p^d − 1` of them.
pub fn directions(ctx: &Ctx) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for v in digit_vectors(ctx, 0, 1) {
        let j: Vec<u8> = v
            .coords()
            .iter()
            .map(|c| u8::try_from(c.to_rational(ctx.p()).to_integer()).unwrap_or(0))
            .collect();
        if j.iter().any(|&c| c != 0) {
            out.push(j);
        }
    }
    out.sort();
    out
}

fn direction_vector(j: &[u8], p: u64) -> PVec {
    PVec::new(j.iter().map(|&c| PadicRational::from_int(c as i64, p)).collect())
}

/// `ψ_J(x) = χ(p^(−1) J·x) Ω(|x|_p)`: supported on the unit ball, constant on
/// the cosets of `p Z_p^d`, mean zero.
pub fn make_psi_j(ctx: &Ctx, j: &[u8]) -> Result<StepFunction> {
    validate_direction(ctx, j)?;
    let p = ctx.p();
    let jv = direction_vector(j, p);
    let cells = digit_vectors(ctx, 0, 1).into_iter().map(|y| {
        let amp = ScaledAmplitude::from_root(&char_pairing(&jv, &y.shifted(-1), p), p);
        (y, amp)
    });
    Ok(StepFunction::from_cells(ctx, 1, cells))
}

/// `ψ_{γnJ}(x) = p^(−dγ/2) ψ_J(p^γ x − n)`: the argument translate followed by
/// the unitary dilation. Exact unit norm.
pub fn make_wavelet(ctx: &Ctx, idx: &WaveletIndex) -> Result<StepFunction> {
    let base = make_psi_j(ctx, &idx.j)?;
    let shift = idx.n.to_pvec(ctx.p()).neg();
    Ok(base.translate(&shift).dilate(idx.gamma))
}

/// All indices with `γ` in the inclusive range and at most `max_digits`
/// fractional digits per coordinate of `n`, in the deterministic order
/// `(γ, n, J)`. Count: `|range| · p^(d·max_digits) · (p^d − 1)`.
pub fn enumerate_indices(
    ctx: &Ctx,
    gamma_range: std::ops::RangeInclusive<i64>,
    max_digits: u32,
) -> Vec<WaveletIndex> {
    let dirs = directions(ctx);
    let mut translations: Vec<CosetRep> = digit_vectors(ctx, -(max_digits as i64), 0)
        .into_iter()
        .map(|v| reduce_mod_zp(ctx, &v))
        .collect();
    translations.sort();
    translations.dedup();
    let mut out = Vec::new();
    for gamma in gamma_range {
        for n in &translations {
            for j in &dirs {
                out.push(WaveletIndex { gamma, n: n.clone(), j: j.clone() });
            }
        }
    }
    out.sort();
    out
}

/// Finite exact coefficient map over wavelet indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CoefficientMap {
    entries: BTreeMap<WaveletIndex, ScaledAmplitude>,
}

impl CoefficientMap {
    pub fn new() -> Self {
        CoefficientMap { entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, idx: WaveletIndex, amp: ScaledAmplitude) {
        if !amp.is_zero() {
            self.entries.insert(idx, amp);
        }
    }

    pub fn get(&self, idx: &WaveletIndex) -> Option<&ScaledAmplitude> {
        self.entries.get(idx)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WaveletIndex, &ScaledAmplitude)> {
        self.entries.iter()
    }

    /// `Σ |c|²`, exact.
    pub fn parseval_sum(&self, p: u64) -> ScaledAmplitude {
        let mut sum = ScaledAmplitude::zero();
        for amp in self.entries.values() {
            sum = sum.add(&amp.norm_sq(p), p);
        }
        sum
    }
}

/// Exact wavelet coefficients of a mean-zero function.
///
/// The scan window is forced by the geometry: a wavelet with `γ` above the
/// support radius exponent is constant on the whole support, a wavelet with
/// `γ` at or below `1 − scale` sits inside one constancy cell; both pair to
/// zero against a mean-zero function (or a mean-zero wavelet). Translations
/// are read off the support cells. The scan is therefore provably complete,
/// and `Σ|c|² = ⟨f,f⟩` exactly.
pub fn analyze(ctx: &Ctx, f: &StepFunction) -> Result<CoefficientMap> {
    if !f.is_mean_zero() {
        return Err(CoreError::NotMeanZero { integral: f.integrate().to_string() });
    }
    let mut coeffs = CoefficientMap::new();
    let support = match f.support_ball() {
        None => return Ok(coeffs),
        Some(b) => b,
    };
    let dirs = directions(ctx);
    for gamma in (1 - f.scale())..=support.radius_exp() {
        let mut translations: BTreeSet<CosetRep> = BTreeSet::new();
        for key in f.cells().keys() {
            translations.insert(reduce_mod_zp(ctx, &key.shifted(gamma)));
        }
        for n in translations {
            for j in &dirs {
                let idx = WaveletIndex { gamma, n: n.clone(), j: j.clone() };
                let w = make_wavelet(ctx, &idx)?;
                coeffs.insert(idx, f.inner(&w));
            }
        }
    }
    Ok(coeffs)
}

/// `Σ c_idx · ψ_idx`: the exact inverse of `analyze` on mean-zero input.
///
/// Wavelets at one dilation level share the constancy scale `1 − γ`, so each
/// level sums in a single cell-map accumulation; only the handful of level
/// sums need common refinement.
pub fn synthesize(ctx: &Ctx, coeffs: &CoefficientMap) -> StepFunction {
    let mut levels: BTreeMap<i64, Vec<(PVec, ScaledAmplitude)>> = BTreeMap::new();
    for (idx, amp) in coeffs.iter() {
        let w = make_wavelet(ctx, idx).expect("stored indices are valid");
        debug_assert_eq!(w.scale(), 1 - idx.gamma());
        let bucket = levels.entry(idx.gamma()).or_default();
        for (key, a) in w.cells() {
            bucket.push((key.clone(), a.mul(amp, ctx.p())));
        }
    }
    let mut acc = StepFunction::zero(ctx);
    for (gamma, cells) in levels {
        acc = acc.add(&StepFunction::from_cells(ctx, 1 - gamma, cells));
    }
    acc
}

/// Closed form of `⟨Ω, ψ_{γnJ}⟩`: `p^(−dγ/2)` for `γ ≥ 1` and `n = 0`, zero
/// otherwise.
pub fn omega_coefficient(ctx: &Ctx, idx: &WaveletIndex) -> ScaledAmplitude {
    if idx.gamma >= 1 && idx.n.is_zero() {
        ScaledAmplitude::half_power(-(ctx.d() as i64) * idx.gamma, ctx.p())
    } else {
        ScaledAmplitude::zero()
    }
}

/// `Σ_{γ=1}^{Γ} (p^d − 1) p^(−dγ) = 1 − p^(−dΓ)`, exactly.
pub fn parseval_partial(ctx: &Ctx, big_gamma: u32) -> BigRational {
    assert!(big_gamma >= 1, "partial sums start at γ = 1");
    BigRational::one() - pow_rational(ctx.p(), -(ctx.d() as i64) * big_gamma as i64)
}

/// The same partial sum recomputed by summing `|⟨Ω, ψ_idx⟩|²` over enumerated
/// indices; indices with `γ ≤ 0` or `n ≠ 0` contribute zero.
pub fn parseval_partial_enumerated(ctx: &Ctx, big_gamma: u32, max_digits: u32) -> BigRational {
    let mut total = BigRational::from_integer(0.into());
    for idx in enumerate_indices(ctx, -1..=(big_gamma as i64), max_digits) {
        let c = omega_coefficient(ctx, &idx);
        let sq = c.norm_sq(ctx.p());
        total += sq.as_rational().expect("|c|² of a half power is rational").clone();
    }
    total
}
