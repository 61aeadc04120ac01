//! Geometry of the `l1` balls `B_N = { x in Z^d : |x| <= N }`.
//!
//! Sites are laid out shell by shell (increasing `l1` norm), lexicographically
//! inside each shell. With this layout `B_r` is always the prefix
//! `0..|B_r|` of `B_N` for every `r <= N`, so a field sampled on a large ball
//! restricts to smaller balls by slicing, and the transfer recursion can keep
//! the front at time `n` on `B_n` only.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Largest ball we are willing to address; indices are stored as `u32`.
pub const MAX_BALL_SITES: u128 = u32::MAX as u128;

/// A point of `Z^d`, `d <= 3`, together with its `l1` norm.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeSite {
    coords: [i32; MAX_DIM],
    dim: u8,
    norm: u32,
}

impl LatticeSite {
    pub fn new(coords: &[i32]) -> Result<Self> {
        let d = coords.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::UnsupportedDimension(d));
        }
        let mut c = [0i32; MAX_DIM];
        c[..d].copy_from_slice(coords);
        Ok(Self::from_array(c, d))
    }

    pub fn origin(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::UnsupportedDimension(d));
        }
        Ok(Self::from_array([0; MAX_DIM], d))
    }

    /// One-dimensional shorthand.
    pub fn d1(x: i32) -> Self {
        Self::from_array([x, 0, 0], 1)
    }

    fn from_array(coords: [i32; MAX_DIM], d: usize) -> Self {
        let norm = coords[..d].iter().map(|c| c.unsigned_abs()).sum();
        LatticeSite {
            coords,
            dim: d as u8,
            norm,
        }
    }

    #[inline]
    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn norm(&self) -> usize {
        self.norm as usize
    }

    pub fn is_origin(&self) -> bool {
        self.norm == 0
    }

    /// First coordinate; the position itself when `d = 1`.
    #[inline]
    pub fn x(&self) -> i32 {
        self.coords[0]
    }

    pub fn offset(&self, other: &LatticeSite) -> LatticeSite {
        debug_assert_eq!(self.dim, other.dim);
        let mut c = self.coords;
        for (a, b) in c.iter_mut().zip(other.coords.iter()) {
            *a += *b;
        }
        Self::from_array(c, self.dim())
    }

    pub fn minus(&self, other: &LatticeSite) -> LatticeSite {
        debug_assert_eq!(self.dim, other.dim);
        let mut c = self.coords;
        for (a, b) in c.iter_mut().zip(other.coords.iter()) {
            *a -= *b;
        }
        Self::from_array(c, self.dim())
    }

    pub fn neg(&self) -> LatticeSite {
        let mut c = self.coords;
        for a in c.iter_mut() {
            *a = -*a;
        }
        Self::from_array(c, self.dim())
    }
}

impl Ord for LatticeSite {
    /// Lexicographic order on the coordinates; used for every tie-break.
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then_with(|| self.coords().cmp(other.coords()))
    }
}

impl PartialOrd for LatticeSite {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LatticeSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LatticeSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        f.write_str("(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", c)?;
        }
        f.write_str(")")
    }
}

/// Number of sites with `l1` norm exactly `r` in dimension `d`.
pub fn shell_size(d: usize, r: u64) -> u128 {
    let r = r as u128;
    match d {
        1 => {
            if r == 0 {
                1
            } else {
                2
            }
        }
        2 => {
            if r == 0 {
                1
            } else {
                4 * r
            }
        }
        3 => {
            if r == 0 {
                1
            } else {
                4 * r * r + 2
            }
        }
        _ => 0,
    }
}

/// `|B_N|` in dimension `d`, or `None` for an unsupported dimension.
pub fn ball_cardinality(d: usize, n: u64) -> Option<u128> {
    let n = n as u128;
    match d {
        1 => Some(2 * n + 1),
        2 => Some(2 * n * n + 2 * n + 1),
        3 => Some((2 * n + 1) * (2 * n * n + 2 * n + 3) / 3),
        _ => None,
    }
}

/// Dense bijection between `B_N` and `0..|B_N|`.
#[derive(Clone, PartialEq, Eq)]
pub struct BallIndex {
    d: usize,
    radius: usize,
    sites: Vec<LatticeSite>,
    /// `prefix[r] = |B_r|`, so `prefix[r - 1]` is the first index of shell `r`.
    prefix: Vec<usize>,
}

impl fmt::Debug for BallIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BallIndex")
            .field("d", &self.d)
            .field("radius", &self.radius)
            .field("cardinality", &self.sites.len())
            .finish()
    }
}

/// Enumerates `B_N` in `d` dimensions.
pub fn enumerate_ball(d: usize, radius: usize) -> Result<BallIndex> {
    BallIndex::new(d, radius)
}

impl BallIndex {
    pub fn new(d: usize, radius: usize) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::UnsupportedDimension(d));
        }
        let card = ball_cardinality(d, radius as u64).ok_or(Error::UnsupportedDimension(d))?;
        if card > MAX_BALL_SITES || card > (isize::MAX as u128) / 64 {
            return Err(Error::Capacity {
                what: "ball sites",
                requested: card,
                limit: MAX_BALL_SITES,
            });
        }
        let mut sites = Vec::with_capacity(card as usize);
        let mut prefix = Vec::with_capacity(radius + 1);
        let mut buf = [0i32; MAX_DIM];
        for r in 0..=radius {
            push_shell(d, 0, r as i32, &mut buf, &mut sites);
            prefix.push(sites.len());
        }
        debug_assert_eq!(sites.len() as u128, card);
        Ok(BallIndex {
            d,
            radius,
            sites,
            prefix,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// `|B_r|` for `r <= radius`: the length of the prefix holding `B_r`.
    #[inline]
    pub fn len_within(&self, r: usize) -> usize {
        self.prefix[r.min(self.radius)]
    }

    #[inline]
    pub fn site(&self, index: usize) -> LatticeSite {
        self.sites[index]
    }

    pub fn sites(&self) -> &[LatticeSite] {
        &self.sites
    }

    pub fn index_of(&self, site: &LatticeSite) -> Option<usize> {
        if site.dim() != self.d || site.norm() > self.radius {
            return None;
        }
        Some(site_rank(site))
    }

    pub fn contains(&self, site: &LatticeSite) -> bool {
        site.dim() == self.d && site.norm() <= self.radius
    }
}

fn push_shell(d: usize, axis: usize, r: i32, buf: &mut [i32; MAX_DIM], out: &mut Vec<LatticeSite>) {
    if axis + 1 == d {
        if r == 0 {
            buf[axis] = 0;
            out.push(LatticeSite::from_array(*buf, d));
        } else {
            buf[axis] = -r;
            out.push(LatticeSite::from_array(*buf, d));
            buf[axis] = r;
            out.push(LatticeSite::from_array(*buf, d));
        }
        return;
    }
    for t in -r..=r {
        buf[axis] = t;
        push_shell(d, axis + 1, r - t.abs(), buf, out);
    }
    buf[axis] = 0;
}

/// Index of `site` in the shell-lexicographic layout; independent of the
/// ball radius.
fn site_rank(site: &LatticeSite) -> usize {
    let d = site.dim();
    let r = site.norm() as u64;
    let before = if r == 0 {
        0
    } else {
        ball_cardinality(d, r - 1).unwrap_or(0)
    };
    (before + rank_in_shell(site.coords(), r)) as usize
}

/// Position of `coords` among the points of norm `r` in lexicographic order.
fn rank_in_shell(coords: &[i32], r: u64) -> u128 {
    let d = coords.len();
    if d == 1 {
        return if r == 0 || coords[0] < 0 { 0 } else { 1 };
    }
    let x1 = coords[0] as i64;
    let r_i = r as i64;
    // points whose first coordinate is smaller than x1
    let before: u128 = match d {
        2 => {
            if x1 == -r_i {
                0
            } else {
                // shells of size 2 for |t| < r, 1 for t = -r
                (2 * (x1 + r_i) - 1) as u128
            }
        }
        _ => (-r_i..x1)
            .map(|t| shell_size(d - 1, (r_i - t.abs()) as u64))
            .sum(),
    };
    before + rank_in_shell(&coords[1..], (r_i - x1.abs()) as u64)
}
