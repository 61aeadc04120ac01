//! One-step law of the lazy nearest-neighbour walk.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::lattice::{LatticeSite, MAX_DIM};
use crate::{math, Error, Result};

/// Tolerance on the total mass of a kernel.
pub const KERNEL_SUM_TOL: f64 = 1e-12;

/// Steps `{y : |y| <= 1}` in lexicographic order.
///
/// For `d = 1` this is `(-1, 0, +1)`; for `d = 2` it is
/// `(-1,0), (0,-1), (0,0), (0,1), (1,0)`.
pub fn canonical_steps(d: usize) -> Result<Vec<LatticeSite>> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut steps = Vec::with_capacity(2 * d + 1);
    for axis in 0..d {
        let mut c = [0i32; MAX_DIM];
        c[axis] = -1;
        steps.push(LatticeSite::new(&c[..d])?);
        c[axis] = 1;
        steps.push(LatticeSite::new(&c[..d])?);
    }
    steps.push(LatticeSite::origin(d)?);
    steps.sort();
    Ok(steps)
}

/// Validated step law `kappa` with `kappa(0) > 0` and `kappa(e) > 0` for every
/// unit step `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkKernel {
    d: usize,
    steps: Vec<LatticeSite>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
    hold: usize,
}

/// Validates `weights`, given in the order of [`canonical_steps`].
pub fn make_kernel(d: usize, weights: &[f64]) -> Result<WalkKernel> {
    let steps = canonical_steps(d)?;
    if weights.len() != steps.len() {
        return Err(Error::InvalidKernel(alloc::format!(
            "expected {} weights for d={}, got {}",
            steps.len(),
            d,
            weights.len()
        )));
    }
    for (s, &w) in steps.iter().zip(weights) {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidKernel(alloc::format!(
                "weight {} on step {} is negative or not finite",
                w,
                s
            )));
        }
        if w == 0.0 {
            let what = if s.is_origin() { "hold step 0" } else { "unit step" };
            return Err(Error::InvalidKernel(alloc::format!(
                "zero weight on {} {}: irreducibility needs every step with |y| <= 1 to have positive mass",
                what,
                s
            )));
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > KERNEL_SUM_TOL {
        return Err(Error::InvalidKernel(alloc::format!(
            "weights sum to {} instead of 1",
            total
        )));
    }
    let hold = steps.iter().position(|s| s.is_origin()).unwrap_or(0);
    Ok(WalkKernel {
        d,
        log_weights: weights.iter().map(|&w| math::ln(w)).collect(),
        weights: weights.to_vec(),
        steps,
        hold,
    })
}

impl WalkKernel {
    /// Uniform law on the `2d + 1` steps.
    pub fn uniform(d: usize) -> Result<Self> {
        let k = 2 * d + 1;
        let w = alloc::vec![1.0 / k as f64; k];
        make_kernel(d, &w)
    }

    /// Builds a kernel from `(step, weight)` pairs covering every step once.
    pub fn from_map(d: usize, entries: &[(LatticeSite, f64)]) -> Result<Self> {
        let steps = canonical_steps(d)?;
        let mut w = alloc::vec![f64::NAN; steps.len()];
        for (s, v) in entries {
            match steps.iter().position(|t| t == s) {
                Some(i) if w[i].is_nan() => w[i] = *v,
                Some(_) => return Err(Error::InvalidKernel(alloc::format!("step {} given twice", s))),
                None => {
                    return Err(Error::InvalidKernel(alloc::format!(
                        "step {} is not in {{|y| <= 1}}",
                        s
                    )))
                }
            }
        }
        if let Some(i) = w.iter().position(|v| v.is_nan()) {
            return Err(Error::InvalidKernel(alloc::format!("missing weight for step {}", steps[i])));
        }
        make_kernel(d, &w)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn steps(&self) -> &[LatticeSite] {
        &self.steps
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// `kappa(0)`.
    pub fn hold(&self) -> f64 {
        self.weights[self.hold]
    }

    pub fn hold_index(&self) -> usize {
        self.hold
    }

    pub fn step_index(&self, step: &LatticeSite) -> Option<usize> {
        self.steps.iter().position(|s| s == step)
    }

    pub fn kappa(&self, step: &LatticeSite) -> f64 {
        self.step_index(step).map_or(0.0, |i| self.weights[i])
    }

    pub fn log_kappa(&self, step: &LatticeSite) -> f64 {
        self.step_index(step)
            .map_or(f64::NEG_INFINITY, |i| self.log_weights[i])
    }

    pub(crate) fn require_dim(&self, d: usize) -> Result<()> {
        if self.d != d {
            return Err(Error::InvalidKernel(
                alloc::format!("kernel dimension {} does not match field dimension {}", self.d, d)
                    .to_string(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_d1_is_valid() {
        let k = make_kernel(1, &[1.0 / 3.0; 3]).unwrap();
        assert_eq!(k.hold(), 1.0 / 3.0);
        assert_eq!(k.steps().iter().map(|s| s.x()).collect::<Vec<_>>(), [-1, 0, 1]);
    }

    #[test]
    fn zero_hold_rejected() {
        let e = make_kernel(1, &[0.5, 0.0, 0.5]).unwrap_err();
        assert!(matches!(e, Error::InvalidKernel(_)));
    }

    #[test]
    fn d2_five_equal_weights() {
        let k = make_kernel(2, &[0.2; 5]).unwrap();
        assert_eq!(k.hold_index(), 2);
        assert_eq!(k.steps()[0].coords(), [-1, 0]);
        assert_eq!(k.steps()[1].coords(), [0, -1]);
    }

    #[test]
    fn rejects_negative_zero_and_bad_sum() {
        assert!(make_kernel(1, &[-0.1, 0.6, 0.5]).is_err());
        assert!(make_kernel(1, &[0.0, 0.5, 0.5]).is_err());
        assert!(make_kernel(1, &[0.3, 0.3, 0.3]).is_err());
        assert!(make_kernel(1, &[0.25, 0.5]).is_err());
        assert!(make_kernel(4, &[0.1; 9]).is_err());
    }

    #[test]
    fn sum_tolerance() {
        assert!(make_kernel(1, &[0.25, 0.5, 0.25 + 5e-13]).is_ok());
        assert!(make_kernel(1, &[0.25, 0.5, 0.25 + 5e-12]).is_err());
    }

    #[test]
    fn from_map_round_trip() {
        let k = WalkKernel::from_map(
            1,
            &[
                (LatticeSite::d1(1), 0.3),
                (LatticeSite::d1(0), 0.5),
                (LatticeSite::d1(-1), 0.2),
            ],
        )
        .unwrap();
        assert_eq!(k.weights(), [0.2, 0.5, 0.3]);
        assert_eq!(k.kappa(&LatticeSite::d1(1)), 0.3);
        assert!(WalkKernel::from_map(1, &[(LatticeSite::d1(2), 1.0)]).is_err());
    }
}
