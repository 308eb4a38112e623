//! Exact arithmetic for multidimensional p-adic wavelet analysis.
//!
//! Everything here computes over `Q_p^d` with the max-norm, using only exact
//! values: p-adic scalars with finite digit expansions, cyclotomic amplitudes
//! (roots of unity of p-power order with a formal `√p` adjoined), and locally
//! constant compactly supported step functions. Inner products, wavelet
//! coefficients, group actions and multiresolution checks are all exact field
//! identities — floating point appears only in the independent cross-check
//! oracles.
//!
//! The main layers, bottom up:
//!
//! * [`padic`] — scalars `m·p^v`, vectors, norms, coset representatives and
//!   canonical balls;
//! * [`cyclo`] — the additive character, cyclotomic numbers and amplitudes
//!   `a + b·√p`;
//! * [`step`] — step functions with exact integration, inner products and the
//!   three geometric actions (translate, dilate, matrix);
//! * [`wavelet`] — the basis `ψ_{γnJ}`, analysis and synthesis;
//! * [`group`] — the norm-preserving matrix group, the factored affine group
//!   and orbit classification;
//! * [`mra`] — windowed multiresolution ladders and tensor wavelets;
//! * [`suites`] — the machine-checkable verification suites behind the CLI.

pub mod cyclo;
pub mod error;
pub mod group;
pub mod json;
pub mod mra;
pub mod padic;
pub mod sample;
pub mod step;
pub mod suites;
pub mod wavelet;

pub use error::{CoreError, Result};

/// Ambient configuration: the prime `p` and the dimension `d`.
///
/// A context is fixed at creation and shared by every value built under it.
/// Values from different contexts must not be combined; binary operations
/// assert this.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ctx {
    p: u64,
    d: usize,
}

impl Ctx {
    /// Creates a context, checking that `p` is prime and `d ≥ 1`.
    pub fn new(p: u64, d: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(CoreError::InvalidConfig(format!("p = {p} is not prime")));
        }
        if d == 0 {
            return Err(CoreError::InvalidConfig("d must be at least 1".into()));
        }
        Ok(Ctx { p, d })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// One-dimensional context with the same prime; used for tensor factors.
    pub fn line(&self) -> Ctx {
        Ctx { p: self.p, d: 1 }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut k = 3;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_rejects_composite_p() {
        assert!(Ctx::new(4, 1).is_err());
        assert!(Ctx::new(1, 1).is_err());
        assert!(Ctx::new(0, 1).is_err());
        assert!(Ctx::new(2, 0).is_err());
        assert!(Ctx::new(2, 1).is_ok());
        assert!(Ctx::new(97, 3).is_ok());
    }
}
