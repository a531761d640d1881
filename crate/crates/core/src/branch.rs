//! Maximal monotone branches of `f^n`, their extensions, iterated
//! derivatives and distortion estimates.
//!
//! Branches are located by a forward sweep: carry the current monotone
//! domain and its image, and whenever the critical point falls strictly
//! inside the image, cut there and pull the cut point back to the domain
//! through the closed-form branch inverses along the orbit itinerary.

use crate::error::{Error, Result};
use crate::interval::{Interval, ScaledFactor};
use crate::map::{Side, UnimodalMap};
use crate::real::{Ctx, Real};

/// Symbol of the itinerary coding: left of `c`, critical, right of `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    L,
    C,
    R,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::L => 'L',
            Symbol::C => 'C',
            Symbol::R => 'R',
        }
    }
}

/// Itinerary of `x` over `n` symbols; truncates at the first `C`.
pub fn itinerary(map: &UnimodalMap, x: &Real, n: usize, ctx: &Ctx) -> Result<Vec<Symbol>> {
    if n == 0 {
        return Err(Error::Domain("itinerary needs n >= 1".into()));
    }
    let mut word = Vec::with_capacity(n);
    let mut y = x.clone();
    for _ in 0..n {
        match map.side_of(&y, ctx) {
            None => {
                word.push(Symbol::C);
                return Ok(word);
            }
            Some(Side::Left) => word.push(Symbol::L),
            Some(Side::Right) => word.push(Symbol::R),
        }
        y = map.eval(&y, ctx)?;
    }
    Ok(word)
}

pub fn itinerary_string(word: &[Symbol]) -> String {
    word.iter().map(|s| s.as_char()).collect()
}

/// How a branch endpoint arose: a domain boundary point, or a preimage of
/// the critical point cut at a given sweep depth (`f^depth(e) = c`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointKind {
    DomainBoundary,
    CriticalPreimage { depth: usize },
}

/// A maximal interval of monotonicity of `f^n` around a base point.
#[derive(Clone, Debug)]
pub struct Branch {
    pub domain: Interval,
    pub n: usize,
    pub sides: Vec<Side>,
    /// +1 if `f^n` is increasing on the branch, -1 if decreasing.
    pub orientation: i32,
    pub lo_kind: EndpointKind,
    pub hi_kind: EndpointKind,
    /// `f^n(domain)` as an ordered interval.
    pub image: Interval,
}

/// Pull a value back through the inverse branches along `sides` (deepest
/// side last), producing `e` with `f^(sides.len())(e) = w`.
pub fn pull_back_through(map: &UnimodalMap, w: &Real, sides: &[Side], ctx: &Ctx) -> Result<Real> {
    pull_back(map, w, sides, ctx)
}

fn pull_back(map: &UnimodalMap, w: &Real, sides: &[Side], ctx: &Ctx) -> Result<Real> {
    let mut v = w.clone();
    for side in sides.iter().rev() {
        // rounding can push an image a hair above the height
        if v > *map.height() {
            let spill = v.sub(map.height(), ctx);
            if spill > *ctx.eq_tol() {
                return Err(Error::Domain(format!(
                    "pull-back value {} above height",
                    v.to_f64()
                )));
            }
            v = map.height().clone();
        }
        v = map.branch_inverse(&v, *side, ctx)?;
    }
    Ok(v)
}

/// The maximal interval around `x` on which `f^n` is monotone.
pub fn monotone_branch_at(map: &UnimodalMap, x: &Real, n: usize, ctx: &Ctx) -> Result<Branch> {
    let c = map.critical();
    let one = Real::one(ctx);
    if n == 0 {
        let domain = Interval::closed(Real::zero(ctx), one.clone())?;
        return Ok(Branch {
            domain: domain.clone(),
            n: 0,
            sides: Vec::new(),
            orientation: 1,
            lo_kind: EndpointKind::DomainBoundary,
            hi_kind: EndpointKind::DomainBoundary,
            image: domain,
        });
    }

    // orbit sides of the base point; a critical hit aborts
    let mut sides = Vec::with_capacity(n);
    {
        let mut y = x.clone();
        for j in 0..n {
            match map.side_of(&y, ctx) {
                None => return Err(Error::CriticalOnOrbit(j)),
                Some(s) => sides.push(s),
            }
            if j + 1 < n {
                y = map.eval(&y, ctx)?;
            }
        }
    }

    let mut dom_lo = Real::zero(ctx);
    let mut dom_hi = one.clone();
    let mut lo_kind = EndpointKind::DomainBoundary;
    let mut hi_kind = EndpointKind::DomainBoundary;
    // images of the domain endpoints under f^j
    let mut img_lo = dom_lo.clone();
    let mut img_hi = dom_hi.clone();

    for j in 0..n {
        let (a, b) = if img_lo <= img_hi {
            (img_lo.clone(), img_hi.clone())
        } else {
            (img_hi.clone(), img_lo.clone())
        };
        // cut the image at c when c lies strictly inside
        let inside = a.add(ctx.eq_tol(), ctx) < *c && c.add(ctx.eq_tol(), ctx) < b;
        if inside {
            let e = pull_back(map, c, &sides[..j], ctx)?;
            let keep_side = sides[j];
            // replace the endpoint whose image lies on the discarded side
            let lo_img_side = map.side_of(&img_lo, ctx).unwrap_or(keep_side);
            if lo_img_side != keep_side {
                dom_lo = e;
                img_lo = c.clone();
                lo_kind = EndpointKind::CriticalPreimage { depth: j };
            } else {
                dom_hi = e;
                img_hi = c.clone();
                hi_kind = EndpointKind::CriticalPreimage { depth: j };
            }
            if dom_lo > dom_hi {
                std::mem::swap(&mut dom_lo, &mut dom_hi);
                std::mem::swap(&mut img_lo, &mut img_hi);
                std::mem::swap(&mut lo_kind, &mut hi_kind);
            }
        }
        img_lo = map.eval(&img_lo, ctx)?;
        img_hi = map.eval(&img_hi, ctx)?;
    }

    let orientation = sides
        .iter()
        .fold(1i32, |o, s| if *s == Side::Right { -o } else { o });
    let domain = Interval::closed(dom_lo, dom_hi)?;
    let image = Interval::closed(img_lo, img_hi)?;
    Ok(Branch {
        domain,
        n,
        sides,
        orientation,
        lo_kind,
        hi_kind,
        image,
    })
}

/// Image of the maximal monotone branch of `f^n` containing `x`, without
/// tracking the domain. Linear in `n`.
pub fn branch_image(map: &UnimodalMap, x: &Real, n: usize, ctx: &Ctx) -> Result<Interval> {
    let c = map.critical();
    if n == 0 {
        return Interval::closed(Real::zero(ctx), Real::one(ctx));
    }
    let mut img_a = Real::zero(ctx);
    let mut img_b = Real::one(ctx);
    let mut y = x.clone();
    for j in 0..n {
        let side = match map.side_of(&y, ctx) {
            None => return Err(Error::CriticalOnOrbit(j)),
            Some(s) => s,
        };
        let (lo, hi) = if img_a <= img_b {
            (img_a.clone(), img_b.clone())
        } else {
            (img_b.clone(), img_a.clone())
        };
        if lo.add(ctx.eq_tol(), ctx) < *c && c.add(ctx.eq_tol(), ctx) < hi {
            let a_side = map.side_of(&img_a, ctx).unwrap_or(side);
            if a_side != side {
                img_a = c.clone();
            } else {
                img_b = c.clone();
            }
        }
        img_a = map.eval(&img_a, ctx)?;
        img_b = map.eval(&img_b, ctx)?;
        y = map.eval(&y, ctx)?;
    }
    Interval::closed(img_a, img_b)
}

/// A monotone extension: the maximal branch around a core interval,
/// with the images of both.
#[derive(Clone, Debug)]
pub struct MonotoneExtension {
    pub core: Interval,
    pub ext: Interval,
    pub n: usize,
    pub image: Interval,
    pub core_image: Interval,
}

impl MonotoneExtension {
    /// Scaled-neighborhood factor of the extension image around the core image.
    pub fn image_space(&self, ctx: &Ctx) -> Result<ScaledFactor> {
        crate::interval::scaled_factor(&self.image, &self.core_image, ctx)
    }
}

/// Maximal monotone extension of `f^n` over the interval `core`.
pub fn monotone_extension(
    map: &UnimodalMap,
    core: &Interval,
    n: usize,
    ctx: &Ctx,
) -> Result<MonotoneExtension> {
    if n == 0 {
        let full = Interval::closed(Real::zero(ctx), Real::one(ctx))?;
        return Ok(MonotoneExtension {
            core: core.clone(),
            ext: full.clone(),
            n: 0,
            image: full,
            core_image: core.clone(),
        });
    }
    let mid = core.midpoint(ctx);
    let branch = match monotone_branch_at(map, &mid, n, ctx) {
        Ok(b) => b,
        Err(Error::CriticalOnOrbit(_)) => return Err(Error::NotMonotoneOnCore),
        Err(e) => return Err(e),
    };
    if !branch.domain.contains_interval(core, ctx) {
        return Err(Error::NotMonotoneOnCore);
    }
    let a = map.iterate(core.lo(), n, ctx)?;
    let b = map.iterate(core.hi(), n, ctx)?;
    let core_image = Interval::closed(a, b)?;
    Ok(MonotoneExtension {
        core: core.clone(),
        ext: branch.domain.clone(),
        n,
        image: branch.image,
        core_image,
    })
}

/// Chain-rule derivative of the iterate: `Df^n(x) = prod_{j<n} Df(f^j(x))`.
pub fn deriv_iter(map: &UnimodalMap, x: &Real, n: usize, ctx: &Ctx) -> Result<Real> {
    let mut prod = Real::one(ctx);
    let mut y = x.clone();
    for _ in 0..n {
        prod = prod.mul(&map.deriv(&y, ctx)?, ctx);
        y = map.eval(&y, ctx)?;
    }
    Ok(prod)
}

/// Estimate of `max |Df^n| / min |Df^n|` over an adaptive grid on `I`,
/// refined (doubling) until successive estimates agree within 1%.
pub fn distortion_estimate(
    map: &UnimodalMap,
    interval: &Interval,
    n: usize,
    grid: usize,
    ctx: &Ctx,
) -> Result<Real> {
    if grid < 2 {
        return Err(Error::Domain(format!(
            "distortion grid must be >= 2, got {grid}"
        )));
    }
    if interval.thinner_than_tol(ctx) {
        return Err(Error::DegenerateInterval);
    }
    if n == 0 {
        return Ok(Real::one(ctx));
    }
    let mut g = grid;
    let mut prev: Option<Real> = None;
    let hundredth = Real::parse("0.01", ctx).expect("constant");
    for _ in 0..7 {
        let k = distortion_on_grid(map, interval, n, g, ctx)?;
        if let Some(p) = &prev {
            let rel = k.sub(p, ctx).abs().div(p, ctx);
            if rel < hundredth {
                return Ok(k);
            }
        }
        prev = Some(k);
        g *= 2;
    }
    Ok(prev.expect("at least one estimate"))
}

fn distortion_on_grid(
    map: &UnimodalMap,
    interval: &Interval,
    n: usize,
    g: usize,
    ctx: &Ctx,
) -> Result<Real> {
    let len = interval.len(ctx);
    let gf = Real::from_u64(g as u64, ctx);
    let mut max_d: Option<Real> = None;
    let mut min_d: Option<Real> = None;
    let mut sign = 0i32;
    let mut probe = |y: &Real, interior: bool| -> Result<()> {
        let d = deriv_iter(map, y, n, ctx)?;
        let s = d.signum_i();
        if s == 0 {
            // a critical preimage strictly inside means the branch folds here
            if interior {
                return Err(Error::NotMonotoneOnCore);
            }
            return Err(Error::Domain(
                "zero iterate derivative at an interval endpoint".into(),
            ));
        }
        if sign == 0 {
            sign = s;
        } else if sign != s {
            return Err(Error::NotMonotoneOnCore);
        }
        let a = d.abs();
        max_d = Some(match max_d.take() {
            Some(m) => m.max(a.clone()),
            None => a.clone(),
        });
        min_d = Some(match min_d.take() {
            Some(m) => m.min(a),
            None => a,
        });
        Ok(())
    };
    // uniform grid including the endpoints
    for i in 0..=g {
        let t = Real::from_u64(i as u64, ctx).div(&gf, ctx);
        let y = interval.lo().add(&len.mul(&t, ctx), ctx);
        probe(&y, i != 0 && i != g)?;
    }
    // geometric refinement toward the endpoints where distortion peaks
    let mut off = len.div(&gf, ctx);
    let half = Real::parse("0.5", ctx).expect("constant");
    for _ in 0..8 {
        off = off.mul(&half, ctx);
        if off <= *ctx.eq_tol() {
            break;
        }
        probe(&interval.lo().add(&off, ctx), true)?;
        probe(&interval.hi().sub(&off, ctx), true)?;
    }
    let max_d = max_d.expect("grid nonempty");
    let min_d = min_d.expect("grid nonempty");
    Ok(max_d.div(&min_d, ctx))
}
