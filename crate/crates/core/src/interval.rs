//! Intervals in [0,1] and scaled-neighborhood arithmetic.

use crate::error::{Error, Result};
use crate::real::{Ctx, Real};

/// A nondegenerate interval `lo < hi` with per-endpoint openness flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Real,
    hi: Real,
    pub open_lo: bool,
    pub open_hi: bool,
}

impl Interval {
    /// Open interval `(lo, hi)`; endpoints are ordered automatically.
    pub fn open(a: Real, b: Real) -> Result<Self> {
        Self::with_flags(a, b, true, true)
    }

    /// Closed interval `[lo, hi]`.
    pub fn closed(a: Real, b: Real) -> Result<Self> {
        Self::with_flags(a, b, false, false)
    }

    pub fn with_flags(a: Real, b: Real, open_lo: bool, open_hi: bool) -> Result<Self> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo == hi {
            return Err(Error::DegenerateInterval);
        }
        Ok(Interval {
            lo,
            hi,
            open_lo,
            open_hi,
        })
    }

    pub fn lo(&self) -> &Real {
        &self.lo
    }

    pub fn hi(&self) -> &Real {
        &self.hi
    }

    pub fn len(&self, ctx: &Ctx) -> Real {
        self.hi.sub(&self.lo, ctx)
    }

    pub fn midpoint(&self, ctx: &Ctx) -> Real {
        let half = Real::parse("0.5", ctx).expect("constant");
        self.lo.add(&self.hi, ctx).mul(&half, ctx)
    }

    /// Strict interior membership with an `eq_tolerance` guard around the
    /// endpoints: points within tolerance of a boundary do not count as inside.
    pub fn contains_open(&self, x: &Real, ctx: &Ctx) -> bool {
        let t = ctx.eq_tol();
        x.sub(&self.lo, ctx) > *t && self.hi.sub(x, ctx) > *t
    }

    /// Closure membership at tolerance.
    pub fn contains_closed(&self, x: &Real, ctx: &Ctx) -> bool {
        let t = ctx.eq_tol();
        x.sub(&self.lo, ctx) >= t.neg() && self.hi.sub(x, ctx) >= t.neg()
    }

    /// Whether `inner` is contained in `self` (closure, at tolerance).
    pub fn contains_interval(&self, inner: &Interval, ctx: &Ctx) -> bool {
        let t = ctx.eq_tol();
        inner.lo.sub(&self.lo, ctx) >= t.neg() && self.hi.sub(&inner.hi, ctx) >= t.neg()
    }

    /// Exact disjointness of closures: `self.hi < other.lo` or vice versa.
    pub fn disjoint(&self, other: &Interval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    /// Overlap width with another interval (zero if disjoint).
    pub fn overlap_len(&self, other: &Interval, ctx: &Ctx) -> Real {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo >= hi {
            Real::zero(ctx)
        } else {
            hi.sub(&lo, ctx)
        }
    }

    /// Degenerate at tolerance means too thin to measure reliably.
    pub fn thinner_than_tol(&self, ctx: &Ctx) -> bool {
        self.len(ctx) < *ctx.eq_tol()
    }
}

/// The largest `delta` such that `outer` is a delta-scaled neighborhood of
/// `inner`: both components of `outer - inner` have length `>= delta * |inner|`.
#[derive(Clone, Debug)]
pub struct ScaledFactor {
    pub delta: Real,
}

impl ScaledFactor {
    /// A claimed `delta_min`-scaled neighborhood holds iff `delta >= delta_min`.
    pub fn passes(&self, delta_min: &Real) -> bool {
        self.delta >= *delta_min
    }
}

/// `delta = min(left gap, right gap) / |inner|`; errors if not nested.
pub fn scaled_factor(outer: &Interval, inner: &Interval, ctx: &Ctx) -> Result<ScaledFactor> {
    if inner.lo() < outer.lo() || inner.hi() > outer.hi() {
        return Err(Error::NotNested);
    }
    let left = inner.lo().sub(outer.lo(), ctx);
    let right = outer.hi().sub(inner.hi(), ctx);
    let delta = left.min(right).div(&inner.len(ctx), ctx);
    Ok(ScaledFactor { delta })
}

/// The classical Koebe constant `K(delta) = ((1+delta)/delta)^2` used as an
/// upper-bound oracle for measured distortion on negative-Schwarzian branches.
pub fn koebe_bound(delta: &Real, ctx: &Ctx) -> Result<Real> {
    if !delta.is_positive() {
        return Err(Error::Domain("koebe bound needs delta > 0".into()));
    }
    let one = Real::one(ctx);
    let r = one.add(delta, ctx).div(delta, ctx);
    Ok(r.mul(&r, ctx))
}
