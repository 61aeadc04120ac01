//! A deterministic one-dimensional field on which `w_N = z(2)` at an explicit
//! time: two isolated peaks `x ~ n`, `y ~ 3n` whose modified-field ranks swap
//! inside `(11n/2, 13n/2)`, separated by a corridor of mean-level values that
//! makes the far peak cheaper to reach than its `psi_N` rank suggests.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::field::{better, FieldRealization};
use crate::kernel::WalkKernel;
use crate::lattice::{enumerate_ball, LatticeSite};
use crate::logspace::logsumexp;
use crate::polymer::{comparator_1d, rolling_fronts, ComparatorChoice, EndpointLaw};
use crate::{math, Error, Result};

/// Number of times [`detect_switch_with_retries`] halves `epsilon`.
pub const MAX_EPSILON_HALVINGS: usize = 4;

// Guards floor((1 + eps) k n) against representation error in 1 + eps.
fn floor_tol(v: f64) -> i64 {
    math::floor(v + 1e-9) as i64
}

/// Outcome of re-checking the four defining clauses on a concrete field.
#[derive(Clone, Debug, PartialEq)]
pub struct ClauseReport {
    /// The unique qualifying site in `[n, (1+eps)n]`, if exactly one exists.
    pub x: Option<i32>,
    pub y: Option<i32>,
    /// Largest value on the window outside `{x, y}`.
    pub others_max: f64,
    pub others_bound: f64,
    pub interior_sum: f64,
    pub interior_bound: f64,
}

impl ClauseReport {
    pub fn unique_x(&self) -> bool {
        self.x.is_some()
    }

    pub fn unique_y(&self) -> bool {
        self.y.is_some()
    }

    pub fn others_small(&self) -> bool {
        self.others_max < self.others_bound
    }

    pub fn interior_ok(&self) -> bool {
        self.interior_sum > self.interior_bound
    }

    pub fn all_hold(&self) -> bool {
        self.unique_x() && self.unique_y() && self.others_small() && self.interior_ok()
    }

    /// The first failing clause, described.
    pub fn failure(&self) -> Option<String> {
        if !self.unique_x() {
            Some(String::from("no unique x in [n, (1+eps)n] with xi(x)/n^(1/alpha) in (1, 1+eps)"))
        } else if !self.unique_y() {
            Some(String::from("no unique y in [3n, (1+eps)3n] with xi(y)/n^(1/alpha) in (5/3, (1+eps)5/3)"))
        } else if !self.others_small() {
            Some(format!(
                "window value {} is not below n^(1/alpha)/2 = {}",
                self.others_max, self.others_bound
            ))
        } else if !self.interior_ok() {
            Some(format!(
                "interior sum {} does not exceed (m_alpha - eta)(y - x) = {}",
                self.interior_sum, self.interior_bound
            ))
        } else {
            None
        }
    }
}

/// Checks the clauses on `field` from its values alone.
pub fn check_clauses(field: &FieldRealization, n: usize, epsilon: f64, eta: f64, alpha: f64) -> Result<ClauseReport> {
    if field.dim() != 1 {
        return Err(Error::UnsupportedDimension(field.dim()));
    }
    let nf = n as f64;
    let scale = math::powf(nf, 1.0 / alpha);
    let hi = floor_tol((1.0 + epsilon) * 7.0 * nf);
    field.require_radius(hi.max(7 * n as i64) as usize)?;
    let xi = |i: i64| field.value(&LatticeSite::d1(i as i32)).expect("window inside the field");
    let unique = |from: i64, to: i64, lo_v: f64, hi_v: f64| {
        let mut hits = (from..=to).filter(|&i| {
            let v = xi(i);
            v > lo_v && v < hi_v
        });
        match (hits.next(), hits.next()) {
            (Some(i), None) => Some(i as i32),
            _ => None,
        }
    };
    let x = unique(n as i64, floor_tol((1.0 + epsilon) * nf), scale, (1.0 + epsilon) * scale);
    let five_thirds = 5.0 / 3.0 * scale;
    let y = unique(
        3 * n as i64,
        floor_tol((1.0 + epsilon) * 3.0 * nf),
        five_thirds,
        (1.0 + epsilon) * five_thirds,
    );
    let others_max = (-(7 * n as i64)..=hi)
        .filter(|&i| Some(i as i32) != x && Some(i as i32) != y)
        .map(xi)
        .fold(f64::NEG_INFINITY, f64::max);
    let m_alpha = alpha / (alpha - 1.0);
    let (interior_sum, interior_bound) = match (x, y) {
        (Some(x), Some(y)) if y > x => (
            (x as i64 + 1..y as i64).map(xi).sum(),
            (m_alpha - eta) * (y - x) as f64,
        ),
        _ => (f64::NAN, f64::NAN),
    };
    Ok(ClauseReport {
        x,
        y,
        others_max,
        others_bound: scale / 2.0,
        interior_sum,
        interior_bound,
    })
}

/// The constructed field with its parameters and clause recheck.
#[derive(Clone, Debug)]
pub struct ScenarioField {
    pub n: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub alpha: f64,
    pub m_alpha: f64,
    pub x: i32,
    pub y: i32,
    /// `[-7n, floor((1+eps)7n)]`.
    pub window: (i64, i64),
    pub clauses: ClauseReport,
    field: FieldRealization,
}

impl ScenarioField {
    pub fn field(&self) -> &FieldRealization {
        &self.field
    }

    pub fn xi_x(&self) -> f64 {
        self.field.value(&LatticeSite::d1(self.x)).unwrap_or(f64::NAN)
    }

    pub fn xi_y(&self) -> f64 {
        self.field.value(&LatticeSite::d1(self.y)).unwrap_or(f64::NAN)
    }

    /// `psi_N(y) - psi_N(x)`.
    pub fn psi_gap(&self, big_n: usize) -> f64 {
        let r = (big_n + 1) as f64;
        (1.0 - self.y as f64 / r) * self.xi_y() - (1.0 - self.x as f64 / r) * self.xi_x()
    }

    /// The same field with the values at `x` and `y` exchanged. It no longer
    /// satisfies the clauses; the report says which.
    pub fn swapped(&self) -> Result<Self> {
        let ix = self.field.ball().index_of(&LatticeSite::d1(self.x)).expect("x in ball");
        let iy = self.field.ball().index_of(&LatticeSite::d1(self.y)).expect("y in ball");
        let (vx, vy) = (self.field.xi()[ix], self.field.xi()[iy]);
        let field = self.field.map_values(|i, v| {
            if i == ix {
                vy
            } else if i == iy {
                vx
            } else {
                v
            }
        })?;
        let clauses = check_clauses(&field, self.n, self.epsilon, self.eta, self.alpha)?;
        Ok(ScenarioField {
            field,
            clauses,
            ..self.clone()
        })
    }
}

/// `(m_alpha + log(kappa(1)/kappa(0))) / 2`.
pub fn default_eta(kernel: &WalkKernel, alpha: f64) -> Result<f64> {
    check_regime(kernel, alpha)?;
    Ok((alpha / (alpha - 1.0) + log_ratio(kernel)) / 2.0)
}

fn log_ratio(kernel: &WalkKernel) -> f64 {
    kernel.log_kappa(&LatticeSite::d1(1)) - math::ln(kernel.hold())
}

fn check_regime(kernel: &WalkKernel, alpha: f64) -> Result<()> {
    if kernel.dim() != 1 {
        return Err(Error::Precondition(format!("kernel dimension is {}, need d = 1", kernel.dim())));
    }
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Precondition(format!("alpha must exceed 1 (got {})", alpha)));
    }
    let m_alpha = alpha / (alpha - 1.0);
    let lr = log_ratio(kernel);
    if !(lr > -m_alpha) {
        return Err(Error::Precondition(format!(
            "log(kappa(1)/kappa(0)) = {} is not above -m_alpha = {}",
            lr, -m_alpha
        )));
    }
    Ok(())
}

/// Builds the field: `xi(n) = (1+eps/2) n^{1/alpha}`,
/// `xi(3n) = (1+eps/2)(5/3) n^{1/alpha}`, `m_alpha` strictly between them and
/// `1` elsewhere on `B_R`, `R = floor((1+eps)7n)`. Every clause is then
/// re-checked on the values.
pub fn build_appendix_d_scenario(
    n: usize,
    epsilon: f64,
    eta: f64,
    kernel: &WalkKernel,
    alpha: f64,
) -> Result<ScenarioField> {
    check_regime(kernel, alpha)?;
    if n == 0 {
        return Err(Error::Precondition(String::from("n must be positive")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Precondition(format!("epsilon = {} is not in (0, 1)", epsilon)));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Precondition(format!("eta = {} is not positive", eta)));
    }
    let m_alpha = alpha / (alpha - 1.0);
    let scale = math::powf(n as f64, 1.0 / alpha);
    if !(m_alpha < scale / 2.0) {
        return Err(Error::Precondition(format!(
            "m_alpha = {} is not below n^(1/alpha)/2 = {}",
            m_alpha,
            scale / 2.0
        )));
    }
    let radius = floor_tol((1.0 + epsilon) * 7.0 * n as f64) as usize;
    let ball = Arc::new(enumerate_ball(1, radius)?);
    let (x, y) = (n as i32, 3 * n as i32);
    let xi_x = (1.0 + epsilon / 2.0) * scale;
    let xi_y = (1.0 + epsilon / 2.0) * 5.0 / 3.0 * scale;
    let field = FieldRealization::from_fn(ball, |s| {
        let i = s.x();
        if i == x {
            xi_x
        } else if i == y {
            xi_y
        } else if i > x && i < y {
            m_alpha
        } else {
            1.0
        }
    })?;
    let clauses = check_clauses(&field, n, epsilon, eta, alpha)?;
    if let Some(why) = clauses.failure() {
        return Err(Error::Precondition(why));
    }
    Ok(ScenarioField {
        n,
        epsilon,
        eta,
        alpha,
        m_alpha,
        x,
        y,
        window: (-(7 * n as i64), radius as i64),
        clauses,
        field,
    })
}

/// One line of the window scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    /// `psi_N(y) - psi_N(x)`.
    pub psi_gap: f64,
    /// `(N+1)(psi_N(y) - psi_N(x))`.
    pub scaled_gap: f64,
    pub z1: LatticeSite,
    pub z2: LatticeSite,
    pub w: LatticeSite,
    pub p_w: f64,
}

#[derive(Clone, Debug)]
pub struct SwitchReport {
    /// Last `N` in the window with `psi_N(y) < psi_N(x)`.
    pub n_star: usize,
    pub w_at_n_star: LatticeSite,
    pub z1_at_n_star: LatticeSite,
    pub z2_at_n_star: LatticeSite,
    pub w_is_z2_at_n_star: bool,
    pub p_w_at_n_star: f64,
    pub comparator_at_n_star: ComparatorChoice,
    /// Open window `(11n/2, 13n/2)` as inclusive integer bounds.
    pub lo: usize,
    pub hi: usize,
    /// Some `N` in the window has `w_N = z(2)`.
    pub any_w_is_z2: bool,
    pub scan: Vec<ScanRow>,
}

/// Scans `N` over `(11n/2, 13n/2)`, running the transfer recursion through
/// the whole window, and locates the time where `z(1)` and `z(2)` swap.
pub fn detect_switch(scenario: &ScenarioField, kernel: &WalkKernel) -> Result<SwitchReport> {
    let field = &scenario.field;
    let n = scenario.n;
    let lo = 11 * n / 2 + 1;
    let hi = (13 * n).div_ceil(2) - 1;
    let no_switch = || Error::NoSwitch {
        n,
        epsilon: scenario.epsilon,
        lo,
        hi,
    };
    if lo > hi {
        return Err(no_switch());
    }
    let gaps: Vec<f64> = (lo..=hi).map(|t| scenario.psi_gap(t)).collect();
    let n_star = match gaps.iter().rposition(|&g| g < 0.0) {
        Some(i) if i + 1 < gaps.len() && gaps[0] < 0.0 => lo + i,
        _ => return Err(no_switch()),
    };

    let ball = field.ball().clone();
    let mut scan = Vec::with_capacity(hi - lo + 1);
    let mut law_at_star = None;
    let mut visit = |t: usize, front: &[f64]| {
        if t < lo {
            return;
        }
        let mut w = 0;
        for k in 1..front.len() {
            if better(front[k], &ball.site(k), front[w], &ball.site(w)) {
                w = k;
            }
        }
        let (z1, z2) = top_two_psi(field, t);
        scan.push(ScanRow {
            n: t,
            psi_gap: gaps[t - lo],
            scaled_gap: (t + 1) as f64 * gaps[t - lo],
            z1,
            z2,
            w: ball.site(w),
            p_w: math::exp(front[w] - logsumexp(front)),
        });
        if t == n_star {
            law_at_star = Some(front.to_vec());
        }
    };
    rolling_fronts(field, kernel, hi, &mut visit)?;
    let law = EndpointLaw::from_log_weights(
        ball,
        n_star,
        law_at_star.ok_or(Error::Corrupt("front at N* was not visited"))?,
        field.fingerprint(),
    )?;
    let row = scan[n_star - lo];
    let comparator = comparator_1d(field, n_star, kernel)?;
    Ok(SwitchReport {
        n_star,
        w_at_n_star: law.w(),
        z1_at_n_star: row.z1,
        z2_at_n_star: row.z2,
        w_is_z2_at_n_star: law.w() == row.z2 && row.z1 != row.z2,
        p_w_at_n_star: law.p_of(&law.w()),
        comparator_at_n_star: comparator,
        lo,
        hi,
        any_w_is_z2: scan.iter().any(|r| r.w == r.z2 && r.z1 != r.z2),
        scan,
    })
}

fn top_two_psi(field: &FieldRealization, n: usize) -> (LatticeSite, LatticeSite) {
    let ball = field.ball();
    let r = (n + 1) as f64;
    let xi = field.xi_within(n);
    let psi = |k: usize| (1.0 - ball.site(k).norm() as f64 / r) * xi[k];
    let mut first = 0;
    let mut second = usize::MAX;
    for k in 1..xi.len() {
        let (v, s) = (psi(k), ball.site(k));
        if better(v, &s, psi(first), &ball.site(first)) {
            second = first;
            first = k;
        } else if second == usize::MAX || better(v, &s, psi(second), &ball.site(second)) {
            second = k;
        }
    }
    let second = if second == usize::MAX { first } else { second };
    (ball.site(first), ball.site(second))
}

/// Builds and scans; on a clause failure or a missing sign change halves
/// `epsilon`, up to [`MAX_EPSILON_HALVINGS`] times. Returns the number of
/// attempts used.
pub fn detect_switch_with_retries(
    n: usize,
    epsilon: f64,
    eta: f64,
    kernel: &WalkKernel,
    alpha: f64,
) -> Result<(ScenarioField, SwitchReport, usize)> {
    let mut eps = epsilon;
    let mut last = None;
    for attempt in 1..=MAX_EPSILON_HALVINGS + 1 {
        let outcome = build_appendix_d_scenario(n, eps, eta, kernel, alpha)
            .and_then(|s| detect_switch(&s, kernel).map(|r| (s, r)));
        match outcome {
            Ok((s, r)) => return Ok((s, r, attempt)),
            Err(e @ (Error::NoSwitch { .. } | Error::Precondition(_))) => {
                // preconditions on alpha, kernel or n do not depend on eps
                if matches!(e, Error::Precondition(_)) && check_regime(kernel, alpha).is_err() {
                    return Err(e);
                }
                last = Some(e);
                eps /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}
