//! Brute-force enumeration of all `(2d+1)^N` paths. Only for small `N`; it is
//! the reference the transfer recursion is checked against.

use alloc::vec::Vec;

use crate::kernel::WalkKernel;
use crate::field::FieldRealization;
use crate::lattice::LatticeSite;
use crate::logspace::{LogAccumulator, NEG_INF};
use crate::path::{viterbi_path, PathSample};
use crate::polymer::{endpoint_law, forward_recursion};
use crate::{Error, Result};

/// Largest number of paths [`enumerate_paths`] will visit.
pub const MAX_ENUMERATED_PATHS: u128 = 1_000_000;

/// Everything the enumeration yields.
#[derive(Clone, Debug)]
pub struct EnumerationResult {
    pub n: usize,
    pub log_u: f64,
    /// `log p_N` on `B_N`, in ball order.
    pub log_p: Vec<f64>,
    /// First maximum-weight path in enumeration order.
    pub best_path: PathSample,
    pub best_log_weight: f64,
    pub path_count: u64,
}

/// Calls `visit(sites, log_weight)` for every `N`-step path, where `sites`
/// holds ball indices `S_0..S_N`.
pub fn for_each_path(
    field: &FieldRealization,
    kernel: &WalkKernel,
    n: usize,
    mut visit: impl FnMut(&[u32], f64),
) -> Result<u64> {
    kernel.require_dim(field.dim())?;
    field.require_radius(n)?;
    let stride = kernel.steps().len() as u128;
    let count = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(stride).filter(|&c| c <= MAX_ENUMERATED_PATHS));
    let count = count.ok_or(Error::Capacity {
        what: "enumerated paths",
        requested: stride.saturating_pow(n as u32),
        limit: MAX_ENUMERATED_PATHS,
    })?;
    let ball = field.ball();
    // neighbour table restricted to B_{n-1} -> B_n
    let inner = if n == 0 { 0 } else { ball.len_within(n - 1) };
    let mut next = Vec::with_capacity(inner * kernel.steps().len());
    for k in 0..inner {
        let x = ball.site(k);
        for s in kernel.steps() {
            next.push(ball.index_of(&x.offset(s)).expect("B_n contains neighbours of B_{n-1}") as u32);
        }
    }
    let mut sites = alloc::vec![0u32; n + 1];
    let mut weights = alloc::vec![0.0f64; n + 1];
    let mut choice = alloc::vec![0usize; n + 1];
    let stride = kernel.steps().len();
    let xi = field.xi();
    let log_k = kernel.log_weights();
    if n == 0 {
        visit(&sites, 0.0);
        return Ok(1);
    }
    // iterative depth-first walk; choice[t] is the step taken into S_t
    let mut t = 1;
    choice[1] = 0;
    loop {
        if choice[t] == stride {
            if t == 1 {
                break;
            }
            t -= 1;
            choice[t] += 1;
            continue;
        }
        let x = next[sites[t - 1] as usize * stride + choice[t]];
        sites[t] = x;
        weights[t] = weights[t - 1] + xi[x as usize] + log_k[choice[t]];
        if t == n {
            visit(&sites, weights[n]);
            choice[t] += 1;
        } else {
            t += 1;
            choice[t] = 0;
        }
    }
    Ok(count as u64)
}

/// Exact endpoint law, partition function and best path by enumeration.
pub fn enumerate_paths(field: &FieldRealization, kernel: &WalkKernel, n: usize) -> Result<EnumerationResult> {
    let ball = field.ball();
    let mut acc = alloc::vec![LogAccumulator::new(); ball.len_within(n)];
    let mut best = NEG_INF;
    let mut best_sites = Vec::new();
    let path_count = for_each_path(field, kernel, n, |sites, w| {
        acc[sites[n] as usize].add(w);
        if w > best {
            best = w;
            best_sites.clear();
            best_sites.extend_from_slice(sites);
        }
    })?;
    let mut total = LogAccumulator::new();
    let mut log_p: Vec<f64> = acc.iter().map(|a| a.value()).collect();
    for &v in &log_p {
        total.add(v);
    }
    let log_u = total.value();
    for v in log_p.iter_mut() {
        *v -= log_u;
    }
    let steps: Vec<LatticeSite> = best_sites.iter().map(|&k| ball.site(k as usize)).collect();
    let best_path = PathSample::from_sites(field, kernel, &steps)?;
    Ok(EnumerationResult {
        n,
        log_u,
        log_p,
        best_log_weight: best,
        best_path,
        path_count,
    })
}

/// Differences between the transfer recursion and the enumeration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discrepancy {
    pub n: usize,
    /// `|log U_dp - log U_enum|`.
    pub log_u_abs: f64,
    /// `max_x |log p_dp(x) - log p_enum(x)|`, over sites of positive mass.
    pub log_p_abs: f64,
    /// `max(1, |log U_enum|)`.
    pub scale: f64,
    /// Both of the above divided by `scale`, maximum taken.
    pub relative: f64,
    /// Support of the two laws agrees.
    pub same_support: bool,
    /// Viterbi weight minus the enumerated maximum.
    pub viterbi_gap: f64,
}

impl Discrepancy {
    pub fn within(&self, tol: f64) -> bool {
        self.same_support && self.relative <= tol && self.viterbi_gap.abs() <= tol * self.scale
    }
}

pub fn compare_dp_vs_oracle(field: &FieldRealization, kernel: &WalkKernel, n: usize) -> Result<Discrepancy> {
    let oracle = enumerate_paths(field, kernel, n)?;
    let law = endpoint_law(&forward_recursion(field, kernel, n)?)?;
    let best = viterbi_path(field, kernel, n)?;
    let log_u_abs = (law.log_u() - oracle.log_u).abs();
    let mut log_p_abs: f64 = 0.0;
    let mut same_support = true;
    for (&a, &b) in law.log_p().iter().zip(&oracle.log_p) {
        match (a == NEG_INF, b == NEG_INF) {
            (true, true) => {}
            (false, false) => log_p_abs = log_p_abs.max((a - b).abs()),
            _ => same_support = false,
        }
    }
    let scale = oracle.log_u.abs().max(1.0);
    Ok(Discrepancy {
        n,
        log_u_abs,
        log_p_abs,
        scale,
        relative: log_u_abs.max(log_p_abs) / scale,
        same_support,
        viterbi_gap: best.log_weight() - oracle.best_log_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_ball;
    use alloc::sync::Arc;

    #[test]
    fn counts_every_path() {
        let f = FieldRealization::constant(Arc::new(enumerate_ball(2, 3).unwrap()), 0.0).unwrap();
        let k = WalkKernel::uniform(2).unwrap();
        let mut seen = 0u64;
        let c = for_each_path(&f, &k, 3, |s, w| {
            assert_eq!(s[0], 0);
            assert!((w - 3.0 * (0.2f64).ln()).abs() < 1e-12);
            seen += 1;
        })
        .unwrap();
        assert_eq!((c, seen), (125, 125));
    }

    #[test]
    fn zero_steps() {
        let f = FieldRealization::constant(Arc::new(enumerate_ball(1, 0).unwrap()), 3.0).unwrap();
        let k = WalkKernel::uniform(1).unwrap();
        let r = enumerate_paths(&f, &k, 0).unwrap();
        assert_eq!(r.path_count, 1);
        assert_eq!(r.log_u, 0.0);
        assert_eq!(r.log_p, [0.0]);
    }

    #[test]
    fn cap_is_enforced() {
        let f = FieldRealization::constant(Arc::new(enumerate_ball(1, 13).unwrap()), 0.0).unwrap();
        let k = WalkKernel::uniform(1).unwrap();
        // 3^12 = 531441 is allowed, 3^13 is not
        assert!(for_each_path(&f, &k, 12, |_, _| {}).is_ok());
        assert!(matches!(enumerate_paths(&f, &k, 13), Err(Error::Capacity { .. })));
    }

    #[test]
    fn agrees_with_one_step_example() {
        let ball = Arc::new(enumerate_ball(1, 1).unwrap());
        let f = FieldRealization::from_fn(ball, |s| s.x() as f64 + 1.0).unwrap();
        let k = WalkKernel::uniform(1).unwrap();
        let r = enumerate_paths(&f, &k, 1).unwrap();
        let u = (1.0f64.exp() + 1.0 + 2.0f64.exp()) / 3.0;
        assert!((r.log_u - u.ln()).abs() < 1e-14);
        let d = compare_dp_vs_oracle(&f, &k, 1).unwrap();
        assert!(d.within(1e-12), "{d:?}");
    }
}
