//! The quenched polymer measure by log-domain transfer recursion.
//!
//! With `u_0 = 1_{0}` the constrained partition functions obey
//!
//! ```text
//! log u_{n+1}(x) = xi(x) + logsumexp_{|y - x| <= 1} [ log u_n(y) + log kappa(x - y) ]
//! ```
//!
//! and `u_n` vanishes outside `B_n`, so the front at time `n` is stored on the
//! prefix `B_n` of the ball only.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::field::{better, modified_field_stats, FieldRealization, ModifiedFieldStats};
use crate::kernel::WalkKernel;
use crate::lattice::{BallIndex, LatticeSite};
use crate::logspace::{logsumexp, NEG_INF};
use crate::{math, Error, Result};

const NO_PRED: u32 = u32::MAX;

/// Predecessor table of a kernel on a ball: `pred[k * stride + j]` is the
/// index of `site(k) - step(j)`, or `NO_PRED` when that site is outside the
/// ball.
#[derive(Clone, Debug)]
pub(crate) struct Transfer {
    pub stride: usize,
    pub pred: Vec<u32>,
    pub log_k: Vec<f64>,
}

impl Transfer {
    pub fn new(ball: &BallIndex, kernel: &WalkKernel, horizon: usize) -> Self {
        let stride = kernel.steps().len();
        let len = ball.len_within(horizon);
        let mut pred = Vec::with_capacity(len * stride);
        for k in 0..len {
            let x = ball.site(k);
            for step in kernel.steps() {
                let y = x.minus(step);
                pred.push(ball.index_of(&y).map_or(NO_PRED, |i| i as u32));
            }
        }
        Transfer {
            stride,
            pred,
            log_k: kernel.log_weights().to_vec(),
        }
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[u32] {
        &self.pred[k * self.stride..(k + 1) * self.stride]
    }
}

#[inline(always)]
fn advance_fixed<const S: usize>(prev: &[f64], next: &mut [f64], xi: &[f64], t: &Transfer) {
    let mut log_k = [0.0; S];
    log_k.copy_from_slice(&t.log_k);
    let bound = prev.len();
    for (k, (out, &pot)) in next.iter_mut().zip(xi).enumerate() {
        let row = &t.pred[k * S..k * S + S];
        let mut vals = [NEG_INF; S];
        let mut m = NEG_INF;
        let mut arg = 0;
        for j in 0..S {
            let p = row[j] as usize;
            if p < bound {
                let v = prev[p] + log_k[j];
                vals[j] = v;
                if v > m {
                    m = v;
                    arg = j;
                }
            }
        }
        let mut rest = 0.0;
        for (j, &v) in vals.iter().enumerate() {
            if j != arg && v != NEG_INF {
                rest += math::exp(v - m);
            }
        }
        *out = pot + m + math::ln_1p(rest);
    }
}

/// One step of the recursion: `next` on `B_n` from `prev` on `B_{n-1}`.
fn advance(prev: &[f64], next: &mut [f64], xi: &[f64], t: &Transfer) {
    match t.stride {
        3 => advance_fixed::<3>(prev, next, xi, t),
        5 => advance_fixed::<5>(prev, next, xi, t),
        7 => advance_fixed::<7>(prev, next, xi, t),
        _ => unreachable!("kernel stride is 2d + 1 with d <= 3"),
    }
}

fn check_inputs(field: &FieldRealization, kernel: &WalkKernel, n: usize) -> Result<()> {
    kernel.require_dim(field.dim())?;
    field.require_radius(n)
}

/// The front `{log u_n(x)}_{x in B_n}` at a fixed time.
#[derive(Clone, Copy, Debug)]
pub struct LogWeightFront<'a> {
    pub n: usize,
    pub ball: &'a BallIndex,
    /// Values on `B_n`; `log u_n(x) = NEG_INF` for `|x| > n` is implicit.
    pub logw: &'a [f64],
}

impl LogWeightFront<'_> {
    /// `log u_n(x)`, `NEG_INF` outside `B_n`.
    pub fn at(&self, site: &LatticeSite) -> f64 {
        match self.ball.index_of(site) {
            Some(i) if i < self.logw.len() => self.logw[i],
            _ => NEG_INF,
        }
    }
}

/// All fronts `n = 0..=N` in one triangular buffer.
#[derive(Clone, Debug)]
pub struct Fronts {
    ball: Arc<BallIndex>,
    horizon: usize,
    offsets: Vec<usize>,
    data: Vec<f64>,
    fingerprint: u64,
    pub(crate) transfer: Transfer,
}

/// Runs the recursion up to time `n`, keeping every front.
pub fn forward_recursion(field: &FieldRealization, kernel: &WalkKernel, n: usize) -> Result<Fronts> {
    check_inputs(field, kernel, n)?;
    let ball = field.ball().clone();
    let transfer = Transfer::new(&ball, kernel, n);
    let mut offsets = Vec::with_capacity(n + 2);
    let mut total = 0usize;
    for t in 0..=n {
        offsets.push(total);
        total += ball.len_within(t);
    }
    offsets.push(total);
    let mut data = alloc::vec![0.0; total];
    data[0] = 0.0;
    for t in 1..=n {
        let (done, rest) = data.split_at_mut(offsets[t]);
        let prev = &done[offsets[t - 1]..];
        let next = &mut rest[..ball.len_within(t)];
        advance(prev, next, field.xi_within(t), &transfer);
    }
    Ok(Fronts {
        ball,
        horizon: n,
        offsets,
        data,
        fingerprint: field.fingerprint(),
        transfer,
    })
}

/// Runs the recursion with two rolling buffers and returns `log u_n` on `B_n`.
pub fn final_front(field: &FieldRealization, kernel: &WalkKernel, n: usize) -> Result<Vec<f64>> {
    rolling_fronts(field, kernel, n, |_, _| {})
}

/// Rolling recursion calling `visit(t, log u_t)` for `t = 1..=n`; returns
/// the last front.
pub(crate) fn rolling_fronts(
    field: &FieldRealization,
    kernel: &WalkKernel,
    n: usize,
    mut visit: impl FnMut(usize, &[f64]),
) -> Result<Vec<f64>> {
    check_inputs(field, kernel, n)?;
    let ball = field.ball();
    let transfer = Transfer::new(ball, kernel, n);
    let cap = ball.len_within(n);
    let mut prev = Vec::with_capacity(cap);
    let mut next = Vec::with_capacity(cap);
    prev.push(0.0);
    for t in 1..=n {
        next.clear();
        next.resize(ball.len_within(t), 0.0);
        advance(&prev, &mut next, field.xi_within(t), &transfer);
        core::mem::swap(&mut prev, &mut next);
        visit(t, &prev);
    }
    Ok(prev)
}

impl Fronts {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn ball(&self) -> &Arc<BallIndex> {
        &self.ball
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn front(&self, n: usize) -> LogWeightFront<'_> {
        assert!(n <= self.horizon, "front {} beyond horizon {}", n, self.horizon);
        LogWeightFront {
            n,
            ball: &self.ball,
            logw: &self.data[self.offsets[n]..self.offsets[n + 1]],
        }
    }

    pub fn last(&self) -> LogWeightFront<'_> {
        self.front(self.horizon)
    }
}

/// The endpoint law `p_N(x) = u_N(x) / U_N` and its maximizer `w_N`.
#[derive(Clone, Debug)]
pub struct EndpointLaw {
    n: usize,
    ball: Arc<BallIndex>,
    log_p: Vec<f64>,
    log_u: f64,
    w_index: usize,
    ties_detected: bool,
    fingerprint: u64,
}

/// Normalizes the last front.
pub fn endpoint_law(fronts: &Fronts) -> Result<EndpointLaw> {
    EndpointLaw::from_log_weights(
        fronts.ball.clone(),
        fronts.horizon,
        fronts.last().logw.to_vec(),
        fronts.fingerprint,
    )
}

impl EndpointLaw {
    /// Builds the law from `log u_n` on `B_n`; consumes the buffer.
    pub fn from_log_weights(
        ball: Arc<BallIndex>,
        n: usize,
        mut logw: Vec<f64>,
        fingerprint: u64,
    ) -> Result<Self> {
        if logw.len() != ball.len_within(n) {
            return Err(Error::Corrupt("front length does not match B_N"));
        }
        let log_u = logsumexp(&logw);
        if !log_u.is_finite() {
            return Err(Error::Corrupt("front carries no finite mass"));
        }
        let mut w_index = 0;
        let mut best = NEG_INF;
        for (i, v) in logw.iter_mut().enumerate() {
            *v -= log_u;
            if better(*v, &ball.site(i), best, &ball.site(w_index)) {
                best = *v;
                w_index = i;
            }
        }
        let ties = logw.iter().filter(|&&v| v == best).count() > 1;
        Ok(EndpointLaw {
            n,
            ball,
            log_p: logw,
            log_u,
            w_index,
            ties_detected: ties,
            fingerprint,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ball(&self) -> &Arc<BallIndex> {
        &self.ball
    }

    /// `log p_N` on `B_N`.
    pub fn log_p(&self) -> &[f64] {
        &self.log_p
    }

    /// `log U_N`.
    pub fn log_u(&self) -> f64 {
        self.log_u
    }

    /// `w_N`, the maximizer of `p_N` (lexicographically smallest on ties).
    pub fn w(&self) -> LatticeSite {
        self.ball.site(self.w_index)
    }

    pub fn w_index(&self) -> usize {
        self.w_index
    }

    pub fn ties_detected(&self) -> bool {
        self.ties_detected
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn log_p_of(&self, site: &LatticeSite) -> f64 {
        match self.ball.index_of(site) {
            Some(i) if i < self.log_p.len() => self.log_p[i],
            _ => NEG_INF,
        }
    }

    pub fn p_of(&self, site: &LatticeSite) -> f64 {
        math::exp(self.log_p_of(site))
    }
}

/// Mass of the endpoint law on `w_N`, `z(1)` and `z(2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalizationMass {
    pub p_w: f64,
    pub p_z1: f64,
    pub p_z2: f64,
    /// `p(z(1)) + p(z(2))` (just `p(z(1))` on `B_0`).
    pub two_point_mass: f64,
    pub w: LatticeSite,
    pub z1: LatticeSite,
    pub z2: LatticeSite,
    pub w_is_z1: bool,
    pub w_in_top_two: bool,
}

pub fn localization_mass(law: &EndpointLaw, modified: &ModifiedFieldStats) -> Result<LocalizationMass> {
    if law.fingerprint != modified.fingerprint() {
        return Err(Error::ProvenanceMismatch("endpoint law and modified field"));
    }
    if law.n != modified.radius() {
        return Err(Error::ProvenanceMismatch("endpoint law and modified field differ in N"));
    }
    let w = law.w();
    let z1 = modified.z1();
    let z2 = modified.z2();
    let p_z1 = law.p_of(&z1);
    let p_z2 = law.p_of(&z2);
    let two_point_mass = if z1 == z2 { p_z1 } else { p_z1 + p_z2 };
    Ok(LocalizationMass {
        p_w: law.p_of(&w),
        p_z1,
        p_z2,
        two_point_mass,
        w,
        z1,
        z2,
        w_is_z1: w == z1,
        w_in_top_two: w == z1 || w == z2,
    })
}

/// Outcome of comparing the reach-and-stick weights of `z(1)` and `z(2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparatorChoice {
    pub z1: LatticeSite,
    pub z2: LatticeSite,
    pub log_b_z1: f64,
    pub log_b_z2: f64,
    /// `z(1)` when `b(z(1)) > b(z(2))`, `z(2)` otherwise.
    pub choice: LatticeSite,
    pub chose_z1: bool,
}

/// `log b_N(x)` in `d = 1`: the sum of `xi` strictly between `0` and `x`,
/// `(N + 1 - |x|) xi(x)`, `|x| log kappa(sign x)` and `(N - |x|) log kappa(0)`.
///
/// For `|x| >= 1` this is the log-weight of the trajectory going straight to
/// `x` and holding there. At `x = 0` the formula keeps the `(N + 1) xi(0)`
/// term as written, one `xi(0)` above the weight of the holding path.
pub fn log_stick_weight(field: &FieldRealization, n: usize, kernel: &WalkKernel, x: i32) -> Result<f64> {
    if field.dim() != 1 || kernel.dim() != 1 {
        return Err(Error::invalid("d", "the reach-and-stick comparator is defined for d = 1"));
    }
    let r = x.unsigned_abs() as usize;
    if r > n {
        return Err(Error::invalid("x", "site outside B_N"));
    }
    field.require_radius(n)?;
    let s = x.signum();
    let xi = |i: i32| field.value(&LatticeSite::d1(i)).unwrap_or(0.0);
    let interior: f64 = (1..r as i32).map(|i| xi(i * s)).sum();
    let log_step = if r == 0 { 0.0 } else { kernel.log_kappa(&LatticeSite::d1(s)) };
    let log_hold = math::ln(kernel.hold());
    Ok(interior
        + (n + 1 - r) as f64 * xi(x)
        + r as f64 * log_step
        + (n - r) as f64 * log_hold)
}

/// Predicts `w_N` in `d = 1` from the two reach-and-stick weights.
pub fn comparator_1d(field: &FieldRealization, n: usize, kernel: &WalkKernel) -> Result<ComparatorChoice> {
    if field.dim() != 1 || kernel.dim() != 1 {
        return Err(Error::invalid("d", "the reach-and-stick comparator is defined for d = 1"));
    }
    let stats = modified_field_stats(field, n)?;
    comparator_with_stats(field, n, kernel, &stats)
}

pub fn comparator_with_stats(
    field: &FieldRealization,
    n: usize,
    kernel: &WalkKernel,
    stats: &ModifiedFieldStats,
) -> Result<ComparatorChoice> {
    if stats.fingerprint() != field.fingerprint() || stats.radius() != n {
        return Err(Error::ProvenanceMismatch("modified statistics and field"));
    }
    let z1 = stats.z1();
    let z2 = stats.z2();
    let log_b_z1 = log_stick_weight(field, n, kernel, z1.x())?;
    let log_b_z2 = log_stick_weight(field, n, kernel, z2.x())?;
    let chose_z1 = log_b_z1 > log_b_z2;
    Ok(ComparatorChoice {
        z1,
        z2,
        log_b_z1,
        log_b_z2,
        choice: if chose_z1 { z1 } else { z2 },
        chose_z1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_ball;

    fn d1_field(n: usize, f: impl Fn(i32) -> f64) -> FieldRealization {
        FieldRealization::from_fn(Arc::new(enumerate_ball(1, n).unwrap()), |s| f(s.x())).unwrap()
    }

    #[test]
    fn one_step_expectation() {
        let f = d1_field(1, |x| [1.0, 0.0, 2.0][(x + 1) as usize]);
        let k = WalkKernel::uniform(1).unwrap();
        let fr = forward_recursion(&f, &k, 1).unwrap();
        let front = fr.front(1);
        for x in -1..=1 {
            let xi = f.value(&LatticeSite::d1(x)).unwrap();
            let expect = (1.0f64 / 3.0).ln() + xi;
            assert!((front.at(&LatticeSite::d1(x)) - expect).abs() < 1e-14);
        }
        let law = endpoint_law(&fr).unwrap();
        let e = core::f64::consts::E;
        let u = (e + 1.0 + e * e) / 3.0;
        assert!((law.log_u() - u.ln()).abs() < 1e-14);
        assert!((law.p_of(&LatticeSite::d1(1)) - e * e / (e * e + e + 1.0)).abs() < 1e-14);
        assert!((law.p_of(&LatticeSite::d1(1)) - 0.6652).abs() < 1e-4);
        assert_eq!(law.w(), LatticeSite::d1(1));
    }

    #[test]
    fn initial_front_and_finite_speed() {
        let f = d1_field(6, |x| 1.0 + x.abs() as f64);
        let k = WalkKernel::uniform(1).unwrap();
        let fr = forward_recursion(&f, &k, 4).unwrap();
        assert_eq!(fr.front(0).logw, [0.0]);
        assert_eq!(fr.front(0).at(&LatticeSite::d1(1)), NEG_INF);
        for n in 0..=4 {
            let fr_n = fr.front(n);
            assert_eq!(fr_n.logw.len(), 2 * n + 1);
            assert!(fr_n.logw.iter().all(|v| v.is_finite()));
            assert_eq!(fr_n.at(&LatticeSite::d1(n as i32 + 1)), NEG_INF);
        }
        let last = final_front(&f, &k, 4).unwrap();
        assert_eq!(last.as_slice(), fr.last().logw);
    }

    #[test]
    fn zero_potential_gives_walk_law() {
        // trinomial law of the lazy uniform walk after 2 steps
        let f = d1_field(2, |_| 0.0);
        let k = WalkKernel::uniform(1).unwrap();
        let fr = forward_recursion(&f, &k, 2).unwrap();
        let law = endpoint_law(&fr).unwrap();
        let expect = [(0, 3.0 / 9.0), (1, 2.0 / 9.0), (-1, 2.0 / 9.0), (2, 1.0 / 9.0), (-2, 1.0 / 9.0)];
        for (x, p) in expect {
            assert!((law.p_of(&LatticeSite::d1(x)) - p).abs() < 1e-15);
        }
        assert!(law.log_u().abs() < 1e-15);
        assert_eq!(law.w(), LatticeSite::d1(0));
    }

    #[test]
    fn rejects_small_field_and_dimension_mismatch() {
        let f = d1_field(3, |_| 1.0);
        let k = WalkKernel::uniform(1).unwrap();
        assert!(matches!(forward_recursion(&f, &k, 4), Err(Error::FieldTooSmall { .. })));
        let k2 = WalkKernel::uniform(2).unwrap();
        assert!(forward_recursion(&f, &k2, 2).is_err());
    }

    #[test]
    fn localization_mass_checks_provenance() {
        let f = d1_field(3, |x| 1.0 + (x + 3) as f64);
        let g = d1_field(3, |x| 1.0 + (3 - x) as f64);
        let k = WalkKernel::uniform(1).unwrap();
        let law = endpoint_law(&forward_recursion(&f, &k, 3).unwrap()).unwrap();
        let ok = modified_field_stats(&f, 3).unwrap();
        let bad = modified_field_stats(&g, 3).unwrap();
        let m = localization_mass(&law, &ok).unwrap();
        assert!(m.p_w >= m.p_z1 && m.p_w >= m.p_z2);
        assert!(m.two_point_mass >= m.p_z1.max(m.p_z2));
        assert!(localization_mass(&law, &bad).is_err());
        let other_n = modified_field_stats(&f, 2).unwrap();
        assert!(localization_mass(&law, &other_n).is_err());
    }

    #[test]
    fn comparator_unit_site() {
        // z(1) = 1 at N = 1: empty interior sum
        let f = d1_field(1, |x| [1.0, 1.5, 9.0][(x + 1) as usize]);
        let k = make_d1(0.2, 0.5, 0.3);
        let c = comparator_1d(&f, 1, &k).unwrap();
        assert_eq!(c.z1, LatticeSite::d1(1));
        assert!((c.log_b_z1 - (9.0 + 0.3f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn comparator_symmetric_field_is_exact_tie() {
        let f = d1_field(8, |x| [1.0, 3.0, 1.5, 2.0, 7.0, 1.2, 1.1, 1.0, 1.3][x.unsigned_abs() as usize]);
        let k = WalkKernel::uniform(1).unwrap();
        let c = comparator_1d(&f, 8, &k).unwrap();
        assert_eq!(c.z1.x().abs(), c.z2.x().abs());
        assert_eq!(c.log_b_z1, c.log_b_z2);
        assert!(!c.chose_z1);
    }

    #[test]
    fn comparator_origin_case() {
        let f = d1_field(4, |x| if x == 0 { 5.0 } else { 1.0 });
        let k = make_d1(0.25, 0.5, 0.25);
        let c = comparator_1d(&f, 4, &k).unwrap();
        assert_eq!(c.z1, LatticeSite::d1(0));
        assert!((c.log_b_z1 - (5.0 * 5.0 + 4.0 * 0.5f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn comparator_rejects_d2() {
        let f = FieldRealization::constant(Arc::new(enumerate_ball(2, 2).unwrap()), 1.0).unwrap();
        let k = WalkKernel::uniform(2).unwrap();
        assert!(comparator_1d(&f, 2, &k).is_err());
    }

    fn make_d1(l: f64, h: f64, r: f64) -> WalkKernel {
        crate::kernel::make_kernel(1, &[l, h, r]).unwrap()
    }
}
