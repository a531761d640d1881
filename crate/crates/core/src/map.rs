//! The symmetric unimodal family `f(x) = a * (1 - |2x-1|^alpha)` on [0,1].
//!
//! The family has critical point `c = 1/2` of order `alpha`, height
//! `f(c) = a`, a closed-form symmetry involution `tau(x) = 1 - x`, and
//! closed-form branch inverses. For `alpha = 2` it is the logistic family
//! (`lambda = 4a`).

use crate::error::{Error, Result};
use crate::real::{Ctx, Real};

/// Branch side relative to the critical point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A member of the family plus cached constants.
#[derive(Clone, Debug)]
pub struct UnimodalMap {
    alpha: Real,
    /// Fast path when the critical order is a small integer.
    alpha_int: Option<u64>,
    a: Real,
    c: Real,
    one: Real,
    two: Real,
    /// `sup |Df| = 2 a alpha`, attained at the endpoints.
    sup_deriv: Real,
}

impl UnimodalMap {
    /// Build a map from decimal parameter strings; `alpha >= 2`, `a` in (0,1].
    pub fn from_strs(alpha: &str, a: &str, ctx: &Ctx) -> Result<Self> {
        Self::new(Real::parse(alpha, ctx)?, Real::parse(a, ctx)?, ctx)
    }

    pub fn new(alpha: Real, a: Real, ctx: &Ctx) -> Result<Self> {
        let one = Real::one(ctx);
        let two = Real::from_u64(2, ctx);
        if alpha < two {
            return Err(Error::Domain(format!(
                "critical order alpha must be >= 2, got {}",
                alpha.to_f64()
            )));
        }
        if !a.is_positive() || a > one {
            return Err(Error::Domain(format!(
                "height a must lie in (0, 1], got {}",
                a.to_f64()
            )));
        }
        let alpha_f = alpha.to_f64();
        let alpha_int = if alpha_f.fract() == 0.0 && alpha == Real::from_u64(alpha_f as u64, ctx) {
            Some(alpha_f as u64)
        } else {
            None
        };
        let sup_deriv = two.mul(&a, ctx).mul(&alpha, ctx);
        Ok(UnimodalMap {
            alpha,
            alpha_int,
            a,
            c: Real::parse("0.5", ctx).expect("constant"),
            one,
            two,
            sup_deriv,
        })
    }

    pub fn alpha(&self) -> &Real {
        &self.alpha
    }

    pub fn height(&self) -> &Real {
        &self.a
    }

    /// The critical point (1/2 for this family).
    pub fn critical(&self) -> &Real {
        &self.c
    }

    pub fn sup_deriv(&self) -> &Real {
        &self.sup_deriv
    }

    fn check_domain(&self, x: &Real, ctx: &Ctx) -> Result<()> {
        let t = ctx.eq_tol();
        if x.neg() > *t || x.sub(&self.one, ctx) > *t {
            return Err(Error::Domain(format!("point {} outside [0,1]", x.to_f64())));
        }
        Ok(())
    }

    /// `t = |2x - 1|` in [0,1].
    fn fold(&self, x: &Real, ctx: &Ctx) -> Real {
        self.two.mul(x, ctx).sub(&self.one, ctx).abs()
    }

    /// `t^alpha`, with integer exponents on the fast path.
    fn fold_pow(&self, t: &Real, ctx: &Ctx) -> Real {
        if t.is_zero() {
            return Real::zero(ctx);
        }
        match self.alpha_int {
            Some(n) => t.powi(n, ctx),
            None => t.pow(&self.alpha, ctx),
        }
    }

    /// `t^e` for a derivative exponent `e = alpha - k`; `e` must be >= 0 here.
    fn fold_pow_shift(&self, t: &Real, shift: u64, ctx: &Ctx) -> Real {
        match self.alpha_int {
            Some(n) => t.powi(n - shift, ctx),
            None => {
                let e = self.alpha.sub(&Real::from_u64(shift, ctx), ctx);
                t.pow(&e, ctx)
            }
        }
    }

    /// Evaluate `f(x)`, clamped to [0,1] against rounding spill.
    pub fn eval(&self, x: &Real, ctx: &Ctx) -> Result<Real> {
        self.check_domain(x, ctx)?;
        let t = self.fold(x, ctx);
        if t.is_zero() {
            return Ok(self.a.clone());
        }
        let y = self.a.mul(&self.one.sub(&self.fold_pow(&t, ctx), ctx), ctx);
        Ok(clamp01(y, ctx))
    }

    /// `Df(x) = -2 a alpha |2x-1|^(alpha-1) sign(2x-1)`; exactly 0 at `c`.
    pub fn deriv(&self, x: &Real, ctx: &Ctx) -> Result<Real> {
        self.check_domain(x, ctx)?;
        let u = self.two.mul(x, ctx).sub(&self.one, ctx);
        if u.is_zero() {
            return Ok(Real::zero(ctx));
        }
        let t = u.abs();
        let mag = self
            .sup_deriv
            .mul(&self.fold_pow_shift(&t, 1, ctx), ctx);
        Ok(if u.is_positive() { mag.neg() } else { mag })
    }

    /// `D2f(x) = -4 a alpha (alpha-1) |2x-1|^(alpha-2)`.
    pub fn deriv2(&self, x: &Real, ctx: &Ctx) -> Result<Real> {
        self.check_domain(x, ctx)?;
        let t = self.fold(x, ctx);
        let am1 = self.alpha.sub(&self.one, ctx);
        let coef = self
            .two
            .mul(&self.sup_deriv, ctx)
            .mul(&am1, ctx);
        if t.is_zero() {
            // alpha = 2 leaves a constant second derivative; higher orders vanish
            return Ok(match self.alpha_int {
                Some(2) => coef.neg(),
                _ => Real::zero(ctx),
            });
        }
        Ok(coef.mul(&self.fold_pow_shift(&t, 2, ctx), ctx).neg())
    }

    /// `D3f(x) = -8 a alpha (alpha-1)(alpha-2) |2x-1|^(alpha-3) sign(2x-1)`.
    pub fn deriv3(&self, x: &Real, ctx: &Ctx) -> Result<Real> {
        self.check_domain(x, ctx)?;
        let u = self.two.mul(x, ctx).sub(&self.one, ctx);
        let t = u.abs();
        let am1 = self.alpha.sub(&self.one, ctx);
        let am2 = self.alpha.sub(&self.two, ctx);
        if am2.is_zero() {
            return Ok(Real::zero(ctx));
        }
        if t.is_zero() {
            return Ok(Real::zero(ctx));
        }
        let four = Real::from_u64(4, ctx);
        let coef = four
            .mul(&self.sup_deriv, ctx)
            .mul(&am1, ctx)
            .mul(&am2, ctx);
        let mag = coef.mul(&self.fold_pow_shift(&t, 3, ctx), ctx);
        Ok(if u.is_positive() { mag.neg() } else { mag })
    }

    /// The involution `tau(x) = 1 - x` (same image on the other side of `c`).
    pub fn tau(&self, x: &Real, ctx: &Ctx) -> Real {
        self.one.sub(x, ctx)
    }

    /// Orbit `x, f(x), ..., f^n(x)` (length n+1).
    pub fn orbit(&self, x: &Real, n: usize, ctx: &Ctx) -> Result<Vec<Real>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x.clone());
        for _ in 0..n {
            let next = self.eval(out.last().expect("nonempty"), ctx)?;
            out.push(next);
        }
        Ok(out)
    }

    /// `f^n(x)`.
    pub fn iterate(&self, x: &Real, n: usize, ctx: &Ctx) -> Result<Real> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval(&y, ctx)?;
        }
        Ok(y)
    }

    /// Branch side of a point, or None if it is critical at tolerance.
    pub fn side_of(&self, x: &Real, ctx: &Ctx) -> Option<Side> {
        let d = x.sub(&self.c, ctx);
        if d.abs() <= *ctx.eq_tol() {
            None
        } else if d.is_negative() {
            Some(Side::Left)
        } else {
            Some(Side::Right)
        }
    }

    /// Inverse of the monotone branch on the given side: the unique preimage
    /// of `w` with `f(x) = w` and `x` on that side of `c`. Requires `w <= a`.
    pub fn branch_inverse(&self, w: &Real, side: Side, ctx: &Ctx) -> Result<Real> {
        if w.is_negative() || *w > self.a {
            return Err(Error::Domain(format!(
                "no preimage: value {} outside [0, a]",
                w.to_f64()
            )));
        }
        // |2x-1| = (1 - w/a)^(1/alpha)
        let r = self.one.sub(&w.div(&self.a, ctx), ctx);
        let u = match self.alpha_int {
            Some(2) => r.sqrt(ctx),
            _ => {
                let inv_alpha = self.one.div(&self.alpha, ctx);
                r.pow(&inv_alpha, ctx)
            }
        };
        let half = &self.c;
        let x = match side {
            Side::Left => self.one.sub(&u, ctx).mul(half, ctx),
            Side::Right => self.one.add(&u, ctx).mul(half, ctx),
        };
        Ok(clamp01(x, ctx))
    }

    /// Preimages of `w` (left branch then right branch); empty if `w > a`.
    pub fn preimages(&self, w: &Real, ctx: &Ctx) -> Vec<Real> {
        if w.is_negative() || *w > self.a {
            return Vec::new();
        }
        let l = self.branch_inverse(w, Side::Left, ctx).expect("in range");
        let r = self.branch_inverse(w, Side::Right, ctx).expect("in range");
        if l == r {
            vec![l]
        } else {
            vec![l, r]
        }
    }

    /// The orientation-reversing interior fixed point `p0` (`f(p0) = p0 > c`),
    /// which exists iff `a > 1/2`.
    pub fn interior_fixed_point(&self, ctx: &Ctx) -> Result<Real> {
        // need f(c) = a > c so the decreasing branch crosses the diagonal
        if self.a <= self.c {
            return Err(Error::NoFixedPoint);
        }
        if self.alpha_int == Some(2) {
            // a(1-(2p-1)^2) = p  =>  p = 1 - 1/(4a)
            let four_a = Real::from_u64(4, ctx).mul(&self.a, ctx);
            return Ok(self.one.sub(&self.one.div(&four_a, ctx), ctx));
        }
        // bisect g(p) = f(p) - p on [c, 1]: g(c) = a - c > 0, g(1) = -1 < 0
        let mut lo = self.c.clone();
        let mut hi = self.one.clone();
        let stop = Real::pow2(-(ctx.precision_bits() as i32) + 32, ctx);
        while hi.sub(&lo, ctx) > stop {
            let mid = lo.add(&hi, ctx).mul(&self.c, ctx);
            let g = self.eval(&mid, ctx)?.sub(&mid, ctx);
            if g.is_positive() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Schwarzian derivative `Sf = f'''/f' - (3/2)(f''/f')^2` away from `c`.
    pub fn schwarzian(&self, x: &Real, ctx: &Ctx) -> Result<Real> {
        let d1 = self.deriv(x, ctx)?;
        if d1.is_zero() {
            return Err(Error::Domain("Schwarzian undefined at critical point".into()));
        }
        let d2 = self.deriv2(x, ctx)?;
        let d3 = self.deriv3(x, ctx)?;
        let r32 = Real::parse("1.5", ctx).expect("constant");
        let q = d2.div(&d1, ctx);
        Ok(d3.div(&d1, ctx).sub(&r32.mul(&q.mul(&q, ctx), ctx), ctx))
    }
}

fn clamp01(x: Real, ctx: &Ctx) -> Real {
    if x.is_negative() {
        Real::zero(ctx)
    } else {
        let one = Real::one(ctx);
        if x > one {
            one
        } else {
            x
        }
    }
}

/// Verdict of the sampled admissibility check.
#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub samples: usize,
    /// Largest sampled Schwarzian value; the check passes iff it is negative.
    pub max_schwarzian: Real,
    /// Sample at which the Schwarzian was nonnegative, if any.
    pub schwarzian_positive_at: Option<Real>,
    /// Df > 0 left of c and Df < 0 right of c on all samples.
    pub unimodal: bool,
    pub pass: bool,
}

/// Sample the Schwarzian derivative and the derivative sign pattern.
pub fn admissibility_check(
    map: &UnimodalMap,
    sample_count: usize,
    ctx: &Ctx,
) -> Result<AdmissibilityReport> {
    if sample_count < 3 {
        return Err(Error::Domain(format!(
            "admissibility needs at least 3 samples, got {sample_count}"
        )));
    }
    let n = Real::from_u64(sample_count as u64, ctx);
    let margin = Real::parse("1e-3", ctx).expect("constant");
    let mut max_s: Option<Real> = None;
    let mut positive_at = None;
    let mut unimodal = true;
    for i in 0..sample_count {
        // midpoint grid over (0, 1)
        let x = Real::from_f64(i as f64 + 0.5, ctx).div(&n, ctx);
        let gap = x.sub(map.critical(), ctx).abs();
        if gap < margin {
            continue; // stay away from the critical point
        }
        let s = map.schwarzian(&x, ctx)?;
        if !s.is_negative() && positive_at.is_none() {
            positive_at = Some(x.clone());
        }
        max_s = Some(match max_s {
            Some(m) => m.max(s.clone()),
            None => s,
        });
        let d = map.deriv(&x, ctx)?;
        let ok = if x < *map.critical() {
            d.is_positive()
        } else {
            d.is_negative()
        };
        if !ok {
            unimodal = false;
        }
    }
    let max_schwarzian = max_s.ok_or_else(|| Error::Domain("no usable samples".into()))?;
    let pass = max_schwarzian.is_negative() && unimodal;
    Ok(AdmissibilityReport {
        samples: sample_count,
        max_schwarzian,
        schwarzian_positive_at: positive_at,
        unimodal,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::new(256).unwrap()
    }

    fn cheb(ctx: &Ctx) -> UnimodalMap {
        UnimodalMap::from_strs("2", "1", ctx).unwrap()
    }

    #[test]
    fn eval_known_values() {
        let c = ctx();
        let m = cheb(&c);
        let x = Real::parse("0.5", &c).unwrap();
        assert_eq!(m.eval(&x, &c).unwrap(), Real::one(&c));
        // 4 * 0.25 * 0.75
        let x = Real::parse("0.25", &c).unwrap();
        let expect = Real::parse("0.75", &c).unwrap();
        assert_eq!(m.eval(&x, &c).unwrap(), expect);
        assert!(m.deriv(&Real::parse("0.5", &c).unwrap(), &c).unwrap().is_zero());
    }

    #[test]
    fn domain_checked() {
        let c = ctx();
        let m = cheb(&c);
        let bad = Real::parse("1.25", &c).unwrap();
        assert!(matches!(m.eval(&bad, &c), Err(Error::Domain(_))));
    }

    #[test]
    fn tau_involution() {
        let c = ctx();
        let m = cheb(&c);
        for s in ["0.3", "0.5", "0.74359"] {
            let x = Real::parse(s, &c).unwrap();
            let t = m.tau(&x, &c);
            assert_eq!(m.tau(&t, &c), x);
            let fx = m.eval(&x, &c).unwrap();
            let ft = m.eval(&t, &c).unwrap();
            assert!(fx.close_to(&ft, c.eq_tol(), &c), "f(tau(x)) = f(x)");
        }
        let x = Real::parse("0.3", &c).unwrap();
        assert_eq!(m.tau(&x, &c), Real::parse("0.7", &c).unwrap());
    }

    #[test]
    fn orbit_chebyshev_critical() {
        let c = ctx();
        let m = cheb(&c);
        let orb = m.orbit(&Real::parse("0.5", &c).unwrap(), 3, &c).unwrap();
        let want = ["0.5", "1", "0", "0"];
        for (v, w) in orb.iter().zip(want) {
            assert_eq!(*v, Real::parse(w, &c).unwrap());
        }
        // N = 0 returns just the point
        let orb = m.orbit(&Real::parse("0.3", &c).unwrap(), 0, &c).unwrap();
        assert_eq!(orb.len(), 1);
    }

    #[test]
    fn orbit_a975_matches_independent_oracle() {
        // digits from an independent 400-bit mpmath computation
        let c = ctx();
        let m = UnimodalMap::from_strs("2", "0.975", &c).unwrap();
        let orb = m.orbit(&Real::parse("0.5", &c).unwrap(), 5, &c).unwrap();
        let want = [
            "0.5",
            "0.975",
            "0.0950625",
            "0.335499922265625",
            "0.8694649252589998712310791015625",
            "0.442633109113110391843062036301629057989479042589664459228516",
        ];
        let tol = Real::pow2(-180, &c);
        for (v, w) in orb.iter().zip(want) {
            let expect = Real::parse(w, &c).unwrap();
            assert!(
                v.close_to(&expect, &tol, &c),
                "orbit point {} vs oracle {}",
                v.to_f64(),
                expect.to_f64()
            );
        }
    }

    #[test]
    fn derivative_chain_values() {
        let c = ctx();
        let m = cheb(&c);
        // Df = 4 - 8x for the Chebyshev map
        let tol = Real::pow2(-248, &c);
        let x = Real::parse("0.3", &c).unwrap();
        let d = m.deriv(&x, &c).unwrap();
        assert!(d.close_to(&Real::parse("1.6", &c).unwrap(), &tol, &c));
        let x = Real::parse("0.84", &c).unwrap();
        let d = m.deriv(&x, &c).unwrap();
        assert!(d.close_to(&Real::parse("-2.72", &c).unwrap(), &tol, &c));
    }

    #[test]
    fn branch_inverse_round_trip() {
        let c = ctx();
        let m = UnimodalMap::from_strs("2", "0.975", &c).unwrap();
        let w = Real::parse("0.3", &c).unwrap();
        let l = m.branch_inverse(&w, Side::Left, &c).unwrap();
        let r = m.branch_inverse(&w, Side::Right, &c).unwrap();
        assert!(l < *m.critical() && r > *m.critical());
        let tol = Real::pow2(-220, &c);
        assert!(m.eval(&l, &c).unwrap().close_to(&w, &tol, &c));
        assert!(m.eval(&r, &c).unwrap().close_to(&w, &tol, &c));
        // value above the height has no preimage
        assert!(m.preimages(&Real::parse("0.98", &c).unwrap(), &c).is_empty());
    }

    #[test]
    fn fixed_point_closed_form_and_bisection_agree() {
        let c = ctx();
        let m = UnimodalMap::from_strs("2", "0.975", &c).unwrap();
        let p = m.interior_fixed_point(&c).unwrap();
        // p0 = 1 - 1/3.9 = 29/39
        let expect = Real::from_u64(29, &c).div(&Real::from_u64(39, &c), &c);
        assert!(p.close_to(&expect, &Real::pow2(-250, &c), &c));
        // no interior fixed point for a <= 1/2
        let low = UnimodalMap::from_strs("2", "0.4", &c).unwrap();
        assert_eq!(low.interior_fixed_point(&c), Err(Error::NoFixedPoint));
        // general alpha goes through bisection
        let m3 = UnimodalMap::from_strs("2.5", "0.9", &c).unwrap();
        let p3 = m3.interior_fixed_point(&c).unwrap();
        let img = m3.eval(&p3, &c).unwrap();
        assert!(img.close_to(&p3, &Real::pow2(-215, &c), &c));
    }

    #[test]
    fn schwarzian_matches_closed_form() {
        // independent oracle: Sf(x) = -2(alpha^2 - 1) / (2x-1)^2 for this family
        let c = ctx();
        for (alpha, a) in [("2", "1"), ("2", "0.5"), ("3", "0.9")] {
            let m = UnimodalMap::from_strs(alpha, a, &c).unwrap();
            let af = Real::parse(alpha, &c).unwrap();
            let coef = Real::from_u64(2, &c)
                .mul(&af.mul(&af, &c).sub(&Real::one(&c), &c), &c);
            for xs in ["0.1", "0.35", "0.62", "0.9"] {
                let x = Real::parse(xs, &c).unwrap();
                let u = Real::from_u64(2, &c).mul(&x, &c).sub(&Real::one(&c), &c);
                let expect = coef.div(&u.mul(&u, &c), &c).neg();
                let got = m.schwarzian(&x, &c).unwrap();
                let rel = got.sub(&expect, &c).abs().div(&expect.abs(), &c);
                assert!(
                    rel < Real::pow2(-200, &c),
                    "Sf({xs}) alpha={alpha}: {} vs {}",
                    got.to_f64(),
                    expect.to_f64()
                );
            }
        }
    }

    #[test]
    fn admissibility_verdicts() {
        let c = ctx();
        for a in ["1", "0.5"] {
            let m = UnimodalMap::from_strs("2", a, &c).unwrap();
            let rep = admissibility_check(&m, 1000, &c).unwrap();
            assert!(rep.pass, "quadratic family has negative Schwarzian");
            assert!(rep.unimodal);
            assert!(rep.max_schwarzian.is_negative());
        }
        let m = cheb(&c);
        assert!(matches!(
            admissibility_check(&m, 0, &c),
            Err(Error::Domain(_))
        ));
    }
}
