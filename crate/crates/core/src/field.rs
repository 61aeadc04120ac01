//! Pareto potentials on `B_N` and their order statistics.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::lattice::{BallIndex, LatticeSite};
use crate::{math, rng, Error, Result};

/// One realization of the potential `xi` over a ball.
///
/// Values are stored in the ball's shell layout, so the restriction to a
/// smaller ball `B_n` is the prefix `xi()[..ball.len_within(n)]`. Sampled
/// fields draw site `k` from position `k` of the seed's stream, which makes the
/// field on `B_{N+1}` an extension of the field on `B_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldRealization {
    ball: Arc<BallIndex>,
    xi: Vec<f64>,
    seed: Option<u64>,
    alpha: Option<f64>,
    fingerprint: u64,
}

/// Inverse CDF of the Pareto law `alpha x^{-1-alpha} dx` on `[1, inf)`.
#[inline]
pub fn pareto_from_uniform(u: f64, alpha: f64) -> f64 {
    math::powf(u, -1.0 / alpha)
}

/// Draws an i.i.d. Pareto(`alpha`) field on `ball`, reproducible from `seed`.
pub fn sample_pareto_field(seed: u64, alpha: f64, ball: Arc<BallIndex>) -> Result<FieldRealization> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", "must be a positive finite number"));
    }
    let mut stream = rng::stream(seed, rng::FIELD_STREAM);
    let xi = (0..ball.len())
        .map(|_| pareto_from_uniform(rng::open01(&mut stream), alpha))
        .collect();
    let mut f = FieldRealization::from_values(ball, xi)?;
    f.seed = Some(seed);
    f.alpha = Some(alpha);
    Ok(f)
}

fn fnv1a(state: u64, bytes: &[u8]) -> u64 {
    bytes.iter().fold(state, |h, b| (h ^ *b as u64).wrapping_mul(0x100_0000_01b3))
}

impl FieldRealization {
    /// Wraps explicit values (one per site, shell layout). Values need not lie
    /// in the Pareto support; hand-built and degenerate fields are allowed.
    pub fn from_values(ball: Arc<BallIndex>, xi: Vec<f64>) -> Result<Self> {
        if xi.len() != ball.len() {
            return Err(Error::invalid(
                "xi",
                alloc::format!("expected {} values, got {}", ball.len(), xi.len()),
            ));
        }
        if let Some(index) = xi.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField { index });
        }
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        h = fnv1a(h, &(ball.dim() as u64).to_le_bytes());
        h = fnv1a(h, &(ball.radius() as u64).to_le_bytes());
        for v in &xi {
            h = fnv1a(h, &v.to_bits().to_le_bytes());
        }
        Ok(FieldRealization {
            ball,
            xi,
            seed: None,
            alpha: None,
            fingerprint: h,
        })
    }

    pub fn constant(ball: Arc<BallIndex>, value: f64) -> Result<Self> {
        let n = ball.len();
        Self::from_values(ball, alloc::vec![value; n])
    }

    /// Builds a field from a function of the site.
    pub fn from_fn(ball: Arc<BallIndex>, f: impl Fn(&LatticeSite) -> f64) -> Result<Self> {
        let xi = ball.sites().iter().map(f).collect();
        Self::from_values(ball, xi)
    }

    /// Same ball, values transformed; provenance is recomputed.
    pub fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let xi = self.xi.iter().enumerate().map(|(i, &v)| f(i, v)).collect();
        Self::from_values(self.ball.clone(), xi)
    }

    pub fn ball(&self) -> &Arc<BallIndex> {
        &self.ball
    }

    pub fn dim(&self) -> usize {
        self.ball.dim()
    }

    pub fn radius(&self) -> usize {
        self.ball.radius()
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Values on `B_n` (`n` clamped to the field radius).
    pub fn xi_within(&self, n: usize) -> &[f64] {
        &self.xi[..self.ball.len_within(n)]
    }

    pub fn value(&self, site: &LatticeSite) -> Option<f64> {
        self.ball.index_of(site).map(|i| self.xi[i])
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// Hash of the dimension, radius and the exact bits of every value.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// `psi_n(x) = (1 - |x|/(n+1)) xi(x)` on `B_n`.
    pub fn psi(&self, n: usize) -> Vec<f64> {
        let denom = (n + 1) as f64;
        self.xi_within(n)
            .iter()
            .zip(self.ball.sites())
            .map(|(&v, s)| (1.0 - s.norm() as f64 / denom) * v)
            .collect()
    }

    pub(crate) fn require_radius(&self, n: usize) -> Result<()> {
        if self.radius() < n {
            return Err(Error::FieldTooSmall {
                radius: self.radius(),
                needed: n,
            });
        }
        Ok(())
    }
}

/// Sort `0..values.len()` by decreasing value, ties by lexicographic site.
/// Returns the order and whether any tie was met.
fn decreasing_order(values: &[f64], ball: &BallIndex) -> (Vec<u32>, bool) {
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        values[b as usize]
            .total_cmp(&values[a as usize])
            .then_with(|| ball.site(a as usize).cmp(&ball.site(b as usize)))
    });
    let ties = order
        .windows(2)
        .any(|w| values[w[0] as usize] == values[w[1] as usize]);
    (order, ties)
}

/// Order statistics `X(1) > X(2) > ...` of `xi` on `B_n`.
#[derive(Clone, Debug)]
pub struct OrderStats {
    n: usize,
    ball: Arc<BallIndex>,
    values: Vec<f64>,
    order: Vec<u32>,
    ties_detected: bool,
    alpha: Option<f64>,
    fingerprint: u64,
}

/// Order statistics of the field restricted to `B_n`.
pub fn order_statistics(field: &FieldRealization, n: usize) -> Result<OrderStats> {
    field.require_radius(n)?;
    let values = field.xi_within(n).to_vec();
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (order, ties_detected) = decreasing_order(&values, field.ball());
    Ok(OrderStats {
        n,
        ball: field.ball().clone(),
        values,
        order,
        ties_detected,
        alpha: field.alpha(),
        fingerprint: field.fingerprint(),
    })
}

impl OrderStats {
    pub fn radius(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `X(k)`, `k` starting at 1.
    pub fn value(&self, k: usize) -> f64 {
        self.values[self.order[k - 1] as usize]
    }

    /// `x(k)`, the site achieving `X(k)`.
    pub fn site(&self, k: usize) -> LatticeSite {
        self.ball.site(self.order[k - 1] as usize)
    }

    /// Ball index of `x(k)`.
    pub fn index(&self, k: usize) -> usize {
        self.order[k - 1] as usize
    }

    pub fn ties_detected(&self) -> bool {
        self.ties_detected
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// `rank[i]` is the `k` with `x(k) = site(i)`.
    pub fn ranks(&self) -> Vec<u32> {
        let mut rank = alloc::vec![0u32; self.order.len()];
        for (k, &i) in self.order.iter().enumerate() {
            rank[i as usize] = k as u32 + 1;
        }
        rank
    }

    /// `(value, site)` pairs in decreasing order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, LatticeSite)> + '_ {
        self.order
            .iter()
            .map(move |&i| (self.values[i as usize], self.ball.site(i as usize)))
    }
}

/// Order statistics `Z(k)` of the modified field `psi_n`.
#[derive(Clone, Debug)]
pub struct ModifiedFieldStats {
    n: usize,
    ball: Arc<BallIndex>,
    psi: Vec<f64>,
    order: Vec<u32>,
    ties_detected: bool,
    fingerprint: u64,
}

/// `psi_n` on `B_n` and its decreasing rearrangement.
pub fn modified_field_stats(field: &FieldRealization, n: usize) -> Result<ModifiedFieldStats> {
    field.require_radius(n)?;
    let psi = field.psi(n);
    let (order, ties_detected) = decreasing_order(&psi, field.ball());
    Ok(ModifiedFieldStats {
        n,
        ball: field.ball().clone(),
        psi,
        order,
        ties_detected,
        fingerprint: field.fingerprint(),
    })
}

impl ModifiedFieldStats {
    pub fn radius(&self) -> usize {
        self.n
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `Z(k)`, `k` starting at 1.
    pub fn value(&self, k: usize) -> f64 {
        self.psi[self.order[k - 1] as usize]
    }

    /// `z(k)`.
    pub fn site(&self, k: usize) -> LatticeSite {
        self.ball.site(self.order[k - 1] as usize)
    }

    pub fn index(&self, k: usize) -> usize {
        self.order[k - 1] as usize
    }

    /// `z(1)`.
    pub fn z1(&self) -> LatticeSite {
        self.site(1)
    }

    /// `z(2)`; equals `z(1)` on the single-site ball `B_0`.
    pub fn z2(&self) -> LatticeSite {
        self.site(2.min(self.len()))
    }

    pub fn ties_detected(&self) -> bool {
        self.ties_detected
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
}

/// Gap statistics of `X` and `Z` on `B_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub n: usize,
    /// `X(k) - X(k+1)` for `k = 1..=k_max`.
    pub x_gaps: Vec<f64>,
    pub z12: f64,
    pub z13: Option<f64>,
    /// The same quantities divided by `N^{d/alpha}` when `alpha` is known.
    pub x_gaps_scaled: Option<Vec<f64>>,
    pub z12_scaled: Option<f64>,
    pub z13_scaled: Option<f64>,
    /// `N (Z(1) - Z(2))`.
    pub n_times_z12: f64,
}

pub fn gap_diagnostics(
    stats: &OrderStats,
    modified: &ModifiedFieldStats,
    k_max: usize,
) -> Result<GapReport> {
    if stats.fingerprint != modified.fingerprint || stats.n != modified.n {
        return Err(Error::ProvenanceMismatch("order and modified statistics"));
    }
    if k_max >= stats.len() {
        return Err(Error::invalid(
            "k_max",
            alloc::format!("must be below |B_N| = {}", stats.len()),
        ));
    }
    if modified.len() < 2 {
        return Err(Error::invalid("N", "gaps need at least two sites"));
    }
    let x_gaps: Vec<f64> = (1..=k_max)
        .map(|k| stats.value(k) - stats.value(k + 1))
        .collect();
    let z12 = modified.value(1) - modified.value(2);
    let z13 = (modified.len() >= 3).then(|| modified.value(1) - modified.value(3));
    let scale = stats.alpha.map(|a| {
        math::powf(stats.n as f64, stats.ball.dim() as f64 / a)
    });
    Ok(GapReport {
        n: stats.n,
        x_gaps_scaled: scale.map(|s| x_gaps.iter().map(|g| g / s).collect()),
        z12_scaled: scale.map(|s| z12 / s),
        z13_scaled: scale.and_then(|s| z13.map(|g| g / s)),
        x_gaps,
        z12,
        z13,
        n_times_z12: stats.n as f64 * z12,
    })
}

/// Lexicographic tie-break helper shared by argmax searches.
#[inline]
pub(crate) fn better(value: f64, site: &LatticeSite, best_value: f64, best_site: &LatticeSite) -> bool {
    match value.total_cmp(&best_value) {
        Ordering::Greater => true,
        Ordering::Equal => site < best_site,
        Ordering::Less => false,
    }
}
