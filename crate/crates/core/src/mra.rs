//! Windowed multiresolution ladders.
//!
//! The scaling spaces `V_L` are spanned by normalized indicators of the balls
//! of radius `p^(−L)`; `V_L ⊂ V_{L+1}` and the wavelet layer `W_L` fills the
//! complement, spanned by translated dilated tensor wavelets. Infinite density
//! statements are out of desk-scale reach; what is checkable — and checked
//! exactly here — is the ladder algebra on any finite window: orthonormality,
//! inclusion, and exact two-way change of basis between `V_L ⊕ W_L` and
//! `V_{L+1}`.

use crate::cyclo::ScaledAmplitude;
use crate::padic::{ball_canonical, digit_vectors, Ball, PVec};
use crate::step::{tensor_product, StepFunction};
use crate::wavelet::{directions, make_psi_j};
use crate::{CoreError, Ctx, Result};

/// Finite slice of a scaling or wavelet space: the orthonormal vectors whose
/// support meets the window.
#[derive(Clone, Debug)]
pub struct WindowedSpaceBasis {
    pub level: i64,
    pub window: Ball,
    pub vectors: Vec<StepFunction>,
}

/// The scaling function: the indicator of the unit ball (a d-fold product of
/// one-dimensional unit balls).
pub fn scaling_phi(ctx: &Ctx) -> StepFunction {
    StepFunction::indicator(ctx, &Ball::unit(ctx.d()))
}

fn subball_centers(ctx: &Ctx, level: i64, window: &Ball) -> Result<Vec<PVec>> {
    let omega_exp = window.radius_exp();
    if level < -omega_exp {
        return Err(CoreError::InvalidWindow { level, window: omega_exp });
    }
    let base = window.center_point(ctx.p());
    Ok(digit_vectors(ctx, -omega_exp, level)
        .into_iter()
        .map(|delta| base.add(&delta, ctx.p()))
        .collect())
}

/// The level-`L` scaling basis inside a window: normalized indicators of the
/// `p^(d(L+ω))` balls of radius `p^(−L)` that tile the window.
pub fn v_space_basis(ctx: &Ctx, level: i64, window: &Ball) -> Result<WindowedSpaceBasis> {
    let factor = ScaledAmplitude::half_power(ctx.d() as i64 * level, ctx.p());
    let vectors = subball_centers(ctx, level, window)?
        .into_iter()
        .map(|c| {
            StepFunction::indicator(ctx, &ball_canonical(ctx, level, &c)).scale_amp(&factor)
        })
        .collect();
    Ok(WindowedSpaceBasis { level, window: window.clone(), vectors })
}

/// The level-`L` wavelet layer inside a window: for every subball and every
/// direction `J`, the normalized translate-dilate of the tensor wavelet.
pub fn w_space_basis(ctx: &Ctx, level: i64, window: &Ball) -> Result<WindowedSpaceBasis> {
    let mut vectors = Vec::new();
    for c in subball_centers(ctx, level, window)? {
        // the dilation argument sees the translate as p^(−L)·c
        let z = c.shifted(-level);
        for j in directions(ctx) {
            let w = make_psi_j(ctx, &j)?.translate(&z.neg()).dilate(-level);
            vectors.push(w);
        }
    }
    Ok(WindowedSpaceBasis { level, window: window.clone(), vectors })
}

/// `Ψ_J = ⊗_l ψ_{j_l}` with the scaling function in the `j_l = 0` slots;
/// built genuinely as a product of one-dimensional factors, and equal to the
/// direct d-dimensional construction.
pub fn tensor_wavelet(ctx: &Ctx, j: &[u8]) -> Result<StepFunction> {
    if j.len() != ctx.d() || j.iter().all(|&c| c == 0) || j.iter().any(|&c| u64::from(c) >= ctx.p())
    {
        return Err(CoreError::InvalidWaveletIndex);
    }
    let line = ctx.line();
    let factors: Vec<StepFunction> = j
        .iter()
        .map(|&jl| {
            if jl == 0 {
                Ok(scaling_phi(&line))
            } else {
                make_psi_j(&line, &[jl])
            }
        })
        .collect::<Result<_>>()?;
    Ok(tensor_product(ctx, &factors))
}

/// One named check of the ladder report.
#[derive(Clone, Debug)]
pub struct LadderCheck {
    pub name: String,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct LadderReport {
    pub level: i64,
    pub window_gamma: i64,
    pub checks: Vec<LadderCheck>,
}

impl LadderReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn expansion_in(basis: &[StepFunction], v: &StepFunction) -> StepFunction {
    let ctx = v.ctx();
    let mut acc = StepFunction::zero(&ctx);
    for u in basis {
        let c = v.inner(u);
        if !c.is_zero() {
            acc = acc.add(&u.scale_amp(&c));
        }
    }
    acc
}

fn gram_is_identity(vectors: &[StepFunction], p: u64) -> Option<String> {
    for (i, a) in vectors.iter().enumerate() {
        for (jj, b) in vectors.iter().enumerate().skip(i) {
            let ip = a.inner(b);
            let ok = if i == jj { ip == ScaledAmplitude::one() } else { ip.is_zero() };
            if !ok {
                return Some(format!("gram entry ({i}, {jj}) = {ip}"));
            }
        }
    }
    let _ = p;
    None
}

/// Exact windowed ladder verification at one level.
///
/// Checks, in order: the scaling bases at both levels are orthonormal; every
/// coarse scaling vector expands exactly in the fine scaling basis; the
/// wavelet layer is orthonormal and orthogonal to the coarse space; counts
/// match; and the combined coarse-plus-wavelet family reproduces every fine
/// basis vector exactly, which together with orthonormality makes the change
/// of basis exactly invertible in both directions.
pub fn verify_mra_ladder(ctx: &Ctx, level: i64, window: &Ball) -> Result<LadderReport> {
    let coarse = v_space_basis(ctx, level, window)?;
    let fine = v_space_basis(ctx, level + 1, window)?;
    let wavelets = w_space_basis(ctx, level, window)?;
    let p = ctx.p();
    let mut checks = Vec::new();
    let mut push = |name: &str, witness: Option<String>| {
        checks.push(LadderCheck { name: name.into(), pass: witness.is_none(), witness });
    };

    push("coarse-basis-orthonormal", gram_is_identity(&coarse.vectors, p));
    push("fine-basis-orthonormal", gram_is_identity(&fine.vectors, p));

    let mut witness = None;
    for (i, v) in coarse.vectors.iter().enumerate() {
        if &expansion_in(&fine.vectors, v) != v {
            witness = Some(format!("coarse vector {i} escapes the fine space"));
            break;
        }
    }
    push("coarse-inside-fine", witness);

    push("wavelet-layer-orthonormal", gram_is_identity(&wavelets.vectors, p));

    let mut witness = None;
    'outer: for (i, w) in wavelets.vectors.iter().enumerate() {
        for (jj, v) in coarse.vectors.iter().enumerate() {
            if !w.inner(v).is_zero() {
                witness = Some(format!("wavelet {i} is not orthogonal to coarse vector {jj}"));
                break 'outer;
            }
        }
    }
    push("wavelet-layer-orthogonal-to-coarse", witness);

    let combined: Vec<StepFunction> = coarse
        .vectors
        .iter()
        .chain(wavelets.vectors.iter())
        .cloned()
        .collect();
    let witness = if combined.len() == fine.vectors.len() {
        None
    } else {
        Some(format!("{} + {} vectors against {}", coarse.vectors.len(), wavelets.vectors.len(), fine.vectors.len()))
    };
    push("dimension-count", witness);

    let mut witness = None;
    for (i, v) in fine.vectors.iter().enumerate() {
        if &expansion_in(&combined, v) != v {
            witness = Some(format!("fine vector {i} escapes the combined family"));
            break;
        }
    }
    push("combined-family-spans-fine", witness);

    Ok(LadderReport { level, window_gamma: window.radius_exp(), checks })
}

/// Orthogonal projection onto the level-`L` scaling space. Exact and
/// idempotent; the residual is orthogonal to every level-`L` scaling vector.
pub fn project_v(ctx: &Ctx, f: &StepFunction, level: i64) -> StepFunction {
    let p = ctx.p();
    if f.is_zero() {
        return StepFunction::zero(ctx);
    }
    // the level-L balls that meet the support
    let mut balls: Vec<Ball> = Vec::new();
    if level <= f.scale() {
        for key in f.cells().keys() {
            balls.push(ball_canonical(ctx, level, key));
        }
    } else {
        let refined = f.refine(level).expect("level is finer than the scale");
        for key in refined.cells().keys() {
            balls.push(ball_canonical(ctx, level, key));
        }
    }
    balls.sort_by_key(|b| format!("{b:?}"));
    balls.dedup();
    let factor = ScaledAmplitude::half_power(ctx.d() as i64 * level, p);
    let mut acc = StepFunction::zero(ctx);
    for ball in balls {
        let u = StepFunction::indicator(ctx, &ball).scale_amp(&factor);
        let c = f.inner(&u);
        if !c.is_zero() {
            acc = acc.add(&u.scale_amp(&c));
        }
    }
    acc
}
