//! Paths under the quenched measure: exact sampling, maximum-weight decoding
//! and the path events used in the localization analysis.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::field::{better, order_statistics, FieldRealization, ModifiedFieldStats};
use crate::kernel::WalkKernel;
use crate::lattice::{BallIndex, LatticeSite};
use crate::logspace::NEG_INF;
use crate::polymer::{EndpointLaw, Fronts, Transfer};
use crate::stats::wilson_interval;
use crate::{math, rng, Error, Result};

/// Minimum sample count accepted by [`estimate_event_probability`].
pub const MIN_EVENT_SAMPLES: usize = 100;

/// A trajectory `S_0 = 0, S_1, ..., S_N` stored as ball indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    ball: Arc<BallIndex>,
    sites: Vec<u32>,
    log_weight: f64,
    fingerprint: u64,
}

impl PathSample {
    /// Validates an explicit trajectory and computes its log-weight
    /// `H_N(S) + sum_i log kappa(S_i - S_{i-1})`.
    pub fn from_sites(field: &FieldRealization, kernel: &WalkKernel, sites: &[LatticeSite]) -> Result<Self> {
        kernel.require_dim(field.dim())?;
        let ball = field.ball();
        let first = sites.first().ok_or(Error::EmptyInput)?;
        if !first.is_origin() || first.dim() != field.dim() {
            return Err(Error::invalid("path", "must start at the origin"));
        }
        let mut idx = Vec::with_capacity(sites.len());
        let mut log_weight = 0.0;
        for (i, s) in sites.iter().enumerate() {
            let k = ball
                .index_of(s)
                .ok_or_else(|| Error::invalid("path", alloc::format!("site {} outside the field", s)))?;
            if i > 0 {
                let step = s.minus(&sites[i - 1]);
                if step.norm() > 1 {
                    return Err(Error::invalid(
                        "path",
                        alloc::format!("step {} -> {} is not nearest-neighbour", sites[i - 1], s),
                    ));
                }
                log_weight += field.xi()[k] + kernel.log_kappa(&step);
            }
            idx.push(k as u32);
        }
        Ok(PathSample {
            ball: ball.clone(),
            sites: idx,
            log_weight,
            fingerprint: field.fingerprint(),
        })
    }

    /// Number of steps `N`.
    pub fn n(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn log_weight(&self) -> f64 {
        self.log_weight
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn site(&self, i: usize) -> LatticeSite {
        self.ball.site(self.sites[i] as usize)
    }

    pub fn indices(&self) -> &[u32] {
        &self.sites
    }

    pub fn steps(&self) -> Vec<LatticeSite> {
        self.sites.iter().map(|&k| self.ball.site(k as usize)).collect()
    }

    pub fn endpoint(&self) -> LatticeSite {
        self.site(self.n())
    }

    /// `l_N(x) = #{1 <= i <= N : S_i = x}` for every visited `x`.
    pub fn local_time(&self) -> BTreeMap<LatticeSite, u32> {
        let mut m = BTreeMap::new();
        for &k in &self.sites[1..] {
            *m.entry(self.ball.site(k as usize)).or_insert(0) += 1;
        }
        m
    }

    pub fn local_time_at(&self, site: &LatticeSite) -> u32 {
        match self.ball.index_of(site) {
            Some(k) => self.sites[1..].iter().filter(|&&s| s as usize == k).count() as u32,
            None => 0,
        }
    }

    /// Kernel step index of every increment.
    pub fn step_indices(&self, kernel: &WalkKernel) -> Vec<usize> {
        self.sites
            .windows(2)
            .map(|w| {
                let step = self.ball.site(w[1] as usize).minus(&self.ball.site(w[0] as usize));
                kernel.step_index(&step).expect("path steps are nearest-neighbour")
            })
            .collect()
    }
}

/// Exact sampler for `P_{N,xi}` built on precomputed fronts.
///
/// The endpoint is drawn from `p_N`; then, given `S_n = x`, the previous
/// site is drawn with probability proportional to `u_{n-1}(y) kappa(x - y)`.
#[derive(Debug)]
pub struct PathSampler<'a> {
    fronts: &'a Fronts,
    xi: &'a [f64],
    endpoint_cdf: Vec<f64>,
}

impl<'a> PathSampler<'a> {
    pub fn new(fronts: &'a Fronts, field: &'a FieldRealization, kernel: &WalkKernel) -> Result<Self> {
        if fronts.fingerprint() != field.fingerprint() {
            return Err(Error::ProvenanceMismatch("fronts and field"));
        }
        kernel.require_dim(field.dim())?;
        if fronts.transfer.log_k.as_slice() != kernel.log_weights() {
            return Err(Error::ProvenanceMismatch("fronts were computed with another kernel"));
        }
        let last = fronts.last().logw;
        let m = last.iter().cloned().fold(NEG_INF, f64::max);
        if !m.is_finite() {
            return Err(Error::Corrupt("final front carries no finite mass"));
        }
        let mut acc = 0.0;
        let endpoint_cdf = last
            .iter()
            .map(|&v| {
                acc += math::exp(v - m);
                acc
            })
            .collect();
        Ok(PathSampler {
            fronts,
            xi: field.xi(),
            endpoint_cdf,
        })
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> PathSample {
        let n = self.fronts.horizon();
        let t: &Transfer = &self.fronts.transfer;
        let total = *self.endpoint_cdf.last().expect("non-empty front");
        let u = rng::unit(rng) * total;
        let end = self
            .endpoint_cdf
            .partition_point(|&c| c <= u)
            .min(self.endpoint_cdf.len() - 1);
        let mut sites = alloc::vec![0u32; n + 1];
        sites[n] = end as u32;
        let mut log_weight = 0.0;
        let mut weights = [0.0f64; 7];
        for step in (1..=n).rev() {
            let x = sites[step] as usize;
            let prev = self.fronts.front(step - 1).logw;
            let row = t.row(x);
            let mut m = NEG_INF;
            for (j, &p) in row.iter().enumerate() {
                let v = if (p as usize) < prev.len() {
                    prev[p as usize] + t.log_k[j]
                } else {
                    NEG_INF
                };
                weights[j] = v;
                if v > m {
                    m = v;
                }
            }
            let mut sum = 0.0;
            for w in weights[..row.len()].iter_mut() {
                *w = if *w == NEG_INF { 0.0 } else { math::exp(*w - m) };
                sum += *w;
            }
            let mut r = rng::unit(rng) * sum;
            let mut pick = row.len();
            for (j, &w) in weights[..row.len()].iter().enumerate() {
                if w > 0.0 {
                    pick = j;
                    if r < w {
                        break;
                    }
                    r -= w;
                }
            }
            sites[step - 1] = row[pick];
            log_weight += self.xi[x] + t.log_k[pick];
        }
        PathSample {
            ball: self.fronts.ball().clone(),
            sites,
            log_weight,
            fingerprint: self.fronts.fingerprint(),
        }
    }
}

/// Draws one path from `P_{N,xi}`.
pub fn sample_path<R: RngCore + ?Sized>(
    fronts: &Fronts,
    field: &FieldRealization,
    kernel: &WalkKernel,
    rng: &mut R,
) -> Result<PathSample> {
    Ok(PathSampler::new(fronts, field, kernel)?.sample(rng))
}

/// A maximizer of `H_N(S) + log P(S)` over all `N`-step paths (max-plus
/// recursion with backpointers). Ties go to the first kernel step, and at the
/// end to the lexicographically smallest endpoint.
pub fn viterbi_path(field: &FieldRealization, kernel: &WalkKernel, n: usize) -> Result<PathSample> {
    kernel.require_dim(field.dim())?;
    field.require_radius(n)?;
    let ball = field.ball();
    let t = Transfer::new(ball, kernel, n);
    let mut offsets = Vec::with_capacity(n + 2);
    let mut total = 0;
    for r in 0..=n {
        offsets.push(total);
        total += ball.len_within(r);
    }
    let mut back = alloc::vec![0u8; total];
    let mut prev = alloc::vec![0.0f64];
    let mut next = Vec::with_capacity(ball.len_within(n));
    for step in 1..=n {
        let len = ball.len_within(step);
        next.clear();
        let bp = &mut back[offsets[step]..offsets[step] + len];
        for k in 0..len {
            let row = t.row(k);
            let mut m = NEG_INF;
            let mut arg = 0u8;
            for (j, &p) in row.iter().enumerate() {
                if (p as usize) < prev.len() {
                    let v = prev[p as usize] + t.log_k[j];
                    if v > m {
                        m = v;
                        arg = j as u8;
                    }
                }
            }
            bp[k] = arg;
            next.push(field.xi()[k] + m);
        }
        core::mem::swap(&mut prev, &mut next);
    }
    let mut end = 0;
    for k in 1..prev.len() {
        if better(prev[k], &ball.site(k), prev[end], &ball.site(end)) {
            end = k;
        }
    }
    let best = prev[end];
    let mut sites = alloc::vec![0u32; n + 1];
    sites[n] = end as u32;
    for step in (1..=n).rev() {
        let x = sites[step] as usize;
        let j = back[offsets[step] + x] as usize;
        sites[step - 1] = t.row(x)[j];
    }
    debug_assert_eq!(sites[0], 0);
    Ok(PathSample {
        ball: ball.clone(),
        sites,
        log_weight: best,
        fingerprint: field.fingerprint(),
    })
}

/// The scale `h_N`: `(log log N)^{2/alpha} N^{1 - 1/alpha}` for `alpha > 1`,
/// `(log N)^{1 + 2/alpha}` for `alpha <= 1`.
pub fn h_n(n: usize, alpha: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid("N", "h_N needs N >= 3 so that log log N > 0"));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", "must be a positive finite number"));
    }
    let nf = n as f64;
    let log_n = math::ln(nf);
    Ok(if alpha > 1.0 {
        math::powf(math::ln(log_n), 2.0 / alpha) * math::powf(nf, 1.0 - 1.0 / alpha)
    } else {
        math::powf(log_n, 1.0 + 2.0 / alpha)
    })
}

/// Membership of a path in every localization event, for `i = 1, 2`
/// (index 0 and 1 of the arrays).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct EventFlags {
    /// Injective reach of `w_N`, sticking afterwards, lower potential before
    /// reaching it, and `tau_w <= |w_N| + h_N`.
    pub in_c: bool,
    /// `beta_N(S) = J_i`.
    pub in_a: [bool; 2],
    /// `A_i` and `S_N = z(i)`.
    pub in_w: [bool; 2],
    /// `W_i` and `l_N(z(i)) > (N - |z(i)|)/2`.
    pub in_tilde_w: [bool; 2],
    /// Injective reach of `z(i)` by time `N`, then stick.
    pub in_d: [bool; 2],
    /// `tau_i <= |z(i)| + h_N`.
    pub in_k: [bool; 2],
    /// Rank in the `xi` order statistics of the best site visited at times `1..=N`.
    pub beta_n: usize,
    /// First passage time at `w_N` (from time 0).
    pub tau_w: Option<usize>,
}

impl EventFlags {
    /// `tilde W_i => W_i => A_i` for both `i`.
    pub fn nesting_holds(&self) -> bool {
        (0..2).all(|i| (!self.in_tilde_w[i] || self.in_w[i]) && (!self.in_w[i] || self.in_a[i]))
    }
}

/// Classifies paths against one `(field, N)` pair. Holds the site-to-rank map
/// and a scratch buffer so each path costs `O(N)`.
#[derive(Clone, Debug)]
pub struct PathClassifier {
    n: usize,
    fingerprint: u64,
    xi: Vec<f64>,
    ranks: Vec<u32>,
    w: usize,
    z: [usize; 2],
    z_norm: [usize; 2],
    w_norm: usize,
    h: f64,
    stamps: Vec<u32>,
    epoch: u32,
}

impl PathClassifier {
    /// Uses `h_N` from the field's Pareto index.
    pub fn new(field: &FieldRealization, modified: &ModifiedFieldStats, law: &EndpointLaw) -> Result<Self> {
        let alpha = field
            .alpha()
            .ok_or_else(|| Error::invalid("alpha", "field carries no Pareto index; use with_h"))?;
        let h = h_n(law.n(), alpha)?;
        Self::with_h(field, modified, law, h)
    }

    pub fn with_h(
        field: &FieldRealization,
        modified: &ModifiedFieldStats,
        law: &EndpointLaw,
        h: f64,
    ) -> Result<Self> {
        if field.fingerprint() != law.fingerprint() || field.fingerprint() != modified.fingerprint() {
            return Err(Error::ProvenanceMismatch("field, law and modified statistics"));
        }
        let n = law.n();
        if modified.radius() != n {
            return Err(Error::ProvenanceMismatch("law and modified statistics differ in N"));
        }
        let stats = order_statistics(field, n)?;
        let ball = field.ball();
        let z = [modified.index(1), modified.index(2.min(modified.len()))];
        Ok(PathClassifier {
            n,
            fingerprint: field.fingerprint(),
            xi: field.xi_within(n).to_vec(),
            ranks: stats.ranks(),
            w: law.w_index(),
            z,
            z_norm: [ball.site(z[0]).norm(), ball.site(z[1]).norm()],
            w_norm: law.w().norm(),
            h,
            stamps: alloc::vec![0; ball.len_within(n)],
            epoch: 0,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `J_1, J_2`: ranks of `z(1), z(2)` in the `xi` order statistics.
    pub fn j(&self) -> [usize; 2] {
        [self.ranks[self.z[0]] as usize, self.ranks[self.z[1]] as usize]
    }

    pub fn classify(&mut self, path: &PathSample) -> Result<EventFlags> {
        if path.fingerprint != self.fingerprint {
            return Err(Error::ProvenanceMismatch("path and field"));
        }
        if path.n() != self.n {
            return Err(Error::ProvenanceMismatch("path length differs from N"));
        }
        let s = &path.sites;
        let n = self.n;
        let beta = s[1..]
            .iter()
            .map(|&k| self.ranks[k as usize])
            .min()
            .unwrap_or(u32::MAX) as usize;

        let mut flags = EventFlags {
            beta_n: beta,
            ..EventFlags::default()
        };
        for i in 0..2 {
            let zi = self.z[i];
            let ji = self.ranks[zi] as usize;
            flags.in_a[i] = beta == ji;
            flags.in_w[i] = flags.in_a[i] && s[n] as usize == zi;
            if flags.in_w[i] {
                let ell = s[1..].iter().filter(|&&k| k as usize == zi).count();
                flags.in_tilde_w[i] = ell as f64 > (n as f64 - self.z_norm[i] as f64) / 2.0;
            }
            // first visit at a time n >= 1
            let tau = s[1..].iter().position(|&k| k as usize == zi).map(|p| p + 1);
            if let Some(tau) = tau {
                flags.in_k[i] = tau as f64 <= self.z_norm[i] as f64 + self.h;
                flags.in_d[i] = self.injective_until(s, tau) && sticks_from(s, tau, zi);
            }
        }

        let tau_w = s.iter().position(|&k| k as usize == self.w);
        flags.tau_w = tau_w;
        if let Some(tau) = tau_w {
            let xi_w = self.xi[self.w];
            flags.in_c = tau as f64 <= self.w_norm as f64 + self.h
                && s[..tau].iter().all(|&k| self.xi[k as usize] < xi_w)
                && sticks_from(s, tau, self.w)
                && self.injective_until(s, tau);
        }
        Ok(flags)
    }

    /// `S_a != S_b` for all `a < b <= last`.
    fn injective_until(&mut self, s: &[u32], last: usize) -> bool {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamps.iter_mut().for_each(|v| *v = 0);
            self.epoch = 1;
        }
        for &k in &s[..=last] {
            let slot = &mut self.stamps[k as usize];
            if *slot == self.epoch {
                return false;
            }
            *slot = self.epoch;
        }
        true
    }
}

fn sticks_from(s: &[u32], from: usize, site: usize) -> bool {
    s[from..].iter().all(|&k| k as usize == site)
}

/// Evaluates every event predicate on one path.
pub fn classify_path(
    path: &PathSample,
    field: &FieldRealization,
    modified: &ModifiedFieldStats,
    law: &EndpointLaw,
) -> Result<EventFlags> {
    PathClassifier::new(field, modified, law)?.classify(path)
}

/// Monte Carlo frequency of an event with its Wilson 95% interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventEstimate {
    pub hits: usize,
    pub samples: usize,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EventEstimate {
    pub fn from_counts(hits: usize, samples: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, samples);
        EventEstimate {
            hits,
            samples,
            estimate: hits as f64 / samples as f64,
            ci_low,
            ci_high,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Estimates `P_{N,xi}(event)` from `samples` exact path draws.
pub fn estimate_event_probability<R, F>(
    fronts: &Fronts,
    field: &FieldRealization,
    kernel: &WalkKernel,
    mut event: F,
    samples: usize,
    rng: &mut R,
) -> Result<EventEstimate>
where
    R: RngCore + ?Sized,
    F: FnMut(&PathSample) -> bool,
{
    if samples < MIN_EVENT_SAMPLES {
        return Err(Error::invalid(
            "samples",
            alloc::format!("need at least {} samples, got {}", MIN_EVENT_SAMPLES, samples),
        ));
    }
    let sampler = PathSampler::new(fronts, field, kernel)?;
    let hits = (0..samples).filter(|_| event(&sampler.sample(rng))).count();
    Ok(EventEstimate::from_counts(hits, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::modified_field_stats;
    use crate::lattice::enumerate_ball;
    use crate::polymer::{endpoint_law, forward_recursion};

    fn d1_field(n: usize, f: impl Fn(i32) -> f64) -> FieldRealization {
        FieldRealization::from_fn(Arc::new(enumerate_ball(1, n).unwrap()), |s| f(s.x())).unwrap()
    }

    fn line(xs: &[i32]) -> Vec<LatticeSite> {
        xs.iter().map(|&x| LatticeSite::d1(x)).collect()
    }

    #[test]
    fn h_n_values() {
        let h = h_n(100, 2.0).unwrap();
        assert!((h - 100f64.ln().ln() * 10.0).abs() < 1e-12);
        assert!((h - 15.27).abs() < 0.01);
        assert!((h_n(100, 1.0).unwrap() - 97.66).abs() < 0.01);
        assert!((h_n(100, 0.5).unwrap() - 2071.0).abs() < 1.0);
        assert!(h_n(2, 2.0).is_err());
        assert!(h_n(10, 0.0).is_err());
    }

    #[test]
    fn viterbi_holds_at_peak() {
        let f = d1_field(12, |x| 20.0 - x.abs() as f64);
        let k = WalkKernel::uniform(1).unwrap();
        for n in [1, 5, 12] {
            let p = viterbi_path(&f, &k, n).unwrap();
            assert!(p.steps().iter().all(|s| s.is_origin()), "n={n}");
            let expect = 20.0 * n as f64 + n as f64 * (1.0f64 / 3.0).ln();
            assert!((p.log_weight() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn from_sites_validates() {
        let f = d1_field(4, |_| 1.0);
        let k = WalkKernel::uniform(1).unwrap();
        assert!(PathSample::from_sites(&f, &k, &line(&[0, 1, 3])).is_err());
        assert!(PathSample::from_sites(&f, &k, &line(&[1, 1])).is_err());
        assert!(PathSample::from_sites(&f, &k, &line(&[0, 1, 2, 3, 4, 5])).is_err());
        let p = PathSample::from_sites(&f, &k, &line(&[0, 1, 1, 0])).unwrap();
        assert_eq!(p.n(), 3);
        assert_eq!(p.local_time_at(&LatticeSite::d1(1)), 2);
        assert_eq!(p.local_time().values().sum::<u32>(), 3);
    }

    fn setup(xi: impl Fn(i32) -> f64, n: usize) -> (FieldRealization, WalkKernel, EndpointLaw, ModifiedFieldStats) {
        let f = d1_field(n, xi);
        let k = WalkKernel::uniform(1).unwrap();
        let law = endpoint_law(&forward_recursion(&f, &k, n).unwrap()).unwrap();
        let m = modified_field_stats(&f, n).unwrap();
        (f, k, law, m)
    }

    #[test]
    fn straight_stick_path_is_in_c() {
        // peak at 3 dominates; en-route values are smaller
        let (f, k, law, m) = setup(|x| if x == 3 { 30.0 } else { 1.0 + 0.1 * x.abs() as f64 }, 8);
        assert_eq!(law.w(), LatticeSite::d1(3));
        let p = PathSample::from_sites(&f, &k, &line(&[0, 1, 2, 3, 3, 3, 3, 3, 3])).unwrap();
        let mut c = PathClassifier::with_h(&f, &m, &law, 0.0).unwrap();
        let flags = c.classify(&p).unwrap();
        assert!(flags.in_c);
        assert_eq!(flags.tau_w, Some(3));
        assert_eq!(flags.beta_n, 1);
        assert!(flags.in_a[0] && flags.in_w[0] && flags.in_tilde_w[0]);
        assert!(flags.in_d[0] && flags.in_k[0]);
        assert!(flags.nesting_holds());
    }

    #[test]
    fn revisiting_path_is_not_in_c_or_d() {
        let (f, k, law, m) = setup(|x| if x == 3 { 30.0 } else { 1.0 + 0.1 * x.abs() as f64 }, 8);
        let p = PathSample::from_sites(&f, &k, &line(&[0, 1, 0, 1, 2, 3, 3, 3, 3])).unwrap();
        let mut c = PathClassifier::with_h(&f, &m, &law, 100.0).unwrap();
        let flags = c.classify(&p).unwrap();
        assert!(!flags.in_c);
        assert!(!flags.in_d[0]);
        assert!(flags.in_k[0]);
        // a hold before reaching w also repeats a site
        let p = PathSample::from_sites(&f, &k, &line(&[0, 0, 1, 2, 3, 3, 3, 3, 3])).unwrap();
        assert!(!c.classify(&p).unwrap().in_c);
    }

    #[test]
    fn c_requires_lower_potential_before_tau() {
        // xi(0) above xi(w): the origin counts as a pre-tau site
        let (f, k, law, m) = setup(|x| match x {
            0 => 5.0,
            2 => 4.0,
            _ => 1.0,
        }, 40);
        let w = law.w();
        if w.x() != 0 {
            let mut xs = alloc::vec![0i32];
            let s = w.x().signum();
            for i in 1..=w.x().abs() {
                xs.push(i * s);
            }
            while xs.len() < 41 {
                xs.push(w.x());
            }
            let p = PathSample::from_sites(&f, &k, &line(&xs)).unwrap();
            let mut c = PathClassifier::with_h(&f, &m, &law, 100.0).unwrap();
            assert!(!c.classify(&p).unwrap().in_c);
        }
    }

    #[test]
    fn c_tau_bound() {
        let (f, k, law, m) = setup(|x| if x == 3 { 30.0 } else { 1.0 }, 8);
        let p = PathSample::from_sites(&f, &k, &line(&[0, -1, -2, -3, -4, -5, -6, -7, -8])).unwrap();
        let mut c = PathClassifier::with_h(&f, &m, &law, 0.0).unwrap();
        let flags = c.classify(&p).unwrap();
        assert!(!flags.in_c && flags.tau_w.is_none());
        assert!(!flags.in_a[0]);
        assert!(flags.nesting_holds());
    }

    #[test]
    fn classifier_rejects_foreign_paths() {
        let (f, k, law, m) = setup(|x| 1.0 + x.abs() as f64, 4);
        let g = d1_field(4, |_| 2.0);
        let p = PathSample::from_sites(&g, &k, &line(&[0, 0, 0, 0, 0])).unwrap();
        let mut c = PathClassifier::with_h(&f, &m, &law, 1.0).unwrap();
        assert!(c.classify(&p).is_err());
        let short = PathSample::from_sites(&f, &k, &line(&[0, 0, 0])).unwrap();
        assert!(c.classify(&short).is_err());
        // unsampled field has no alpha, so h_N is unknown
        assert!(PathClassifier::new(&f, &m, &law).is_err());
    }

    #[test]
    fn event_estimate_bounds() {
        let (f, k, _, _) = setup(|_| 0.0, 2);
        let fr = forward_recursion(&f, &k, 2).unwrap();
        let mut r = rng::stream(11, rng::PATH_STREAM);
        let e = estimate_event_probability(&fr, &f, &k, |_| true, 500, &mut r).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert!(e.ci_high == 1.0 && e.ci_low > 0.99);
        assert!(estimate_event_probability(&fr, &f, &k, |_| true, 99, &mut r).is_err());
    }

    #[test]
    fn zero_field_endpoint_origin_frequency() {
        let (f, k, _, _) = setup(|_| 0.0, 2);
        let fr = forward_recursion(&f, &k, 2).unwrap();
        let mut r = rng::stream(12, rng::PATH_STREAM);
        let e = estimate_event_probability(&fr, &f, &k, |p| p.endpoint().is_origin(), 20_000, &mut r).unwrap();
        assert!(e.contains(1.0 / 3.0), "{e:?}");
    }

    #[test]
    fn sampled_log_weight_matches_recomputation() {
        let f = crate::field::sample_pareto_field(8, 1.5, Arc::new(enumerate_ball(2, 6).unwrap())).unwrap();
        let k = WalkKernel::uniform(2).unwrap();
        let fr = forward_recursion(&f, &k, 6).unwrap();
        let sampler = PathSampler::new(&fr, &f, &k).unwrap();
        let mut r = rng::stream(1, rng::PATH_STREAM);
        let best = viterbi_path(&f, &k, 6).unwrap();
        for _ in 0..200 {
            let p = sampler.sample(&mut r);
            let again = PathSample::from_sites(&f, &k, &p.steps()).unwrap();
            assert!((p.log_weight() - again.log_weight()).abs() < 1e-10);
            assert!(p.log_weight() <= best.log_weight() + 1e-9);
        }
    }
}
