//! Nice points, symmetric windows `V_x`, first-return structures with the
//! central domain `U_x`, and first-entry (transfer) structures over [0,1].
//!
//! A point `x != c` is nice when its forward orbit never enters the open
//! window `V_x = (x, tau(x))`. Niceness is exactly decidable for the
//! eventually-fixed candidates used here (preimages of the interior fixed
//! point): once the orbit lands on a repelling fixed point outside the
//! window, no later iterate can enter it.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map::{Side, UnimodalMap};
use crate::real::{Ctx, Real};

/// The symmetric window `V_x` with boundary `{x, tau(x)}`.
pub fn window(map: &UnimodalMap, x: &Real, ctx: &Ctx) -> Result<Interval> {
    let t = map.tau(x, ctx);
    if x.close_to(&t, ctx.eq_tol(), ctx) {
        return Err(Error::Domain(
            "window degenerates at the critical point".into(),
        ));
    }
    Interval::open(x.clone(), t)
}

/// Outcome of a niceness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Niceness {
    /// The orbit provably avoids the open window forever: it lands on a
    /// repelling fixed point outside the window after `depth` steps.
    Certified { depth: usize },
    /// No entry seen up to the horizon; not a proof.
    UpTo(usize),
    /// `f^step(x)` lies strictly inside the open window.
    NotNice { step: usize },
}

impl Niceness {
    pub fn passed(&self) -> bool {
        !matches!(self, Niceness::NotNice { .. })
    }
}

/// Fixed points that can certify an eventually-constant orbit: 0 and, when
/// it exists, the orientation-reversing interior fixed point.
fn certifying_fixed_points(map: &UnimodalMap, ctx: &Ctx) -> Vec<Real> {
    let mut fps = vec![Real::zero(ctx)];
    if let Ok(p0) = map.interior_fixed_point(ctx) {
        fps.push(p0);
    }
    fps
}

fn is_repelling(map: &UnimodalMap, p: &Real, ctx: &Ctx) -> bool {
    match map.deriv(p, ctx) {
        Ok(d) => d.abs() > Real::one(ctx).add(ctx.eq_tol(), ctx),
        Err(_) => false,
    }
}

/// Check whether the forward orbit of `x` avoids the open window `V_x`.
pub fn is_nice(map: &UnimodalMap, x: &Real, horizon: usize, ctx: &Ctx) -> Result<Niceness> {
    if horizon == 0 {
        return Err(Error::Domain("niceness horizon must be >= 1".into()));
    }
    if x.close_to(map.critical(), ctx.eq_tol(), ctx) {
        return Err(Error::Domain(
            "niceness is undefined at the critical point".into(),
        ));
    }
    let v = window(map, x, ctx)?;
    let fps: Vec<(Real, bool)> = certifying_fixed_points(map, ctx)
        .into_iter()
        .map(|p| {
            let rep = is_repelling(map, &p, ctx);
            (p, rep)
        })
        .collect();
    let mut y = x.clone();
    for i in 1..=horizon {
        y = map.eval(&y, ctx)?;
        if v.contains_open(&y, ctx) {
            return Ok(Niceness::NotNice { step: i });
        }
        for (p, repelling) in &fps {
            if *repelling && y.close_to(p, ctx.eq_tol(), ctx) && !v.contains_open(p, ctx) {
                return Ok(Niceness::Certified { depth: i });
            }
        }
    }
    Ok(Niceness::UpTo(horizon))
}

/// All preimages `f^-k(p0)` of the interior fixed point for `k <= depth`,
/// filtered down to certified-nice points, sorted ascending.
pub fn nice_candidates(map: &UnimodalMap, depth: usize, ctx: &Ctx) -> Result<Vec<Real>> {
    if depth > 22 {
        return Err(Error::Domain(format!(
            "candidate depth {depth} too large; the preimage tree is 2^depth wide"
        )));
    }
    let p0 = map.interior_fixed_point(ctx)?;
    let mut level = vec![p0.clone()];
    let mut all = vec![p0];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for t in &level {
            next.extend(map.preimages(t, ctx));
        }
        next.sort();
        next.dedup_by(|a, b| a.close_to(b, ctx.eq_tol(), ctx));
        all.extend(next.iter().cloned());
        level = next;
    }
    all.sort();
    all.dedup_by(|a, b| a.close_to(b, ctx.eq_tol(), ctx));
    let mut nice = Vec::new();
    for x in all {
        if x.close_to(map.critical(), ctx.eq_tol(), ctx) {
            continue;
        }
        if let Niceness::Certified { .. } = is_nice(map, &x, depth + 2, ctx)? {
            nice.push(x);
        }
    }
    Ok(nice)
}

/// Walk the preimage tree of the interior fixed point to `max_depth`,
/// invoking `visit(point, depth)` on every node. Depth-first, bounded memory.
pub fn walk_preimage_tree(
    map: &UnimodalMap,
    max_depth: usize,
    ctx: &Ctx,
    visit: &mut dyn FnMut(&Real, usize),
) -> Result<()> {
    let p0 = map.interior_fixed_point(ctx)?;
    visit(&p0, 0);
    let mut stack: Vec<(Real, usize)> = vec![(p0.clone(), 0)];
    let tol = ctx.eq_tol();
    while let Some((t, d)) = stack.pop() {
        if d >= max_depth {
            continue;
        }
        for y in map.preimages(&t, ctx) {
            // the fixed point is its own preimage; skip the self-loop
            if d == 0 && y.close_to(&p0, tol, ctx) {
                continue;
            }
            visit(&y, d + 1);
            stack.push((y, d + 1));
        }
    }
    Ok(())
}

/// The central domain of a nice point: the component of `f^-m(V_x)`
/// containing `c`, where `m` is the first-return time of the critical orbit
/// into `V_x`.
#[derive(Clone, Debug)]
pub struct CentralDomain {
    pub u: Interval,
    /// Left endpoint of `U`; the window of `psi` is exactly `U`.
    pub psi: Real,
    /// First-return time `m` of the critical point (`R_x|U = f^m|U`).
    pub central_time: usize,
}

/// Component of `f^-1(w)` containing the point `z` (with `f(z)` in `w`).
fn preimage_component(map: &UnimodalMap, w: &Interval, z: &Real, ctx: &Ctx) -> Result<Interval> {
    let a = map.height();
    if *w.lo() >= *a {
        return Err(Error::PrecisionExhausted(
            "pull-back window above the map height".into(),
        ));
    }
    let joined = *w.hi() >= *a;
    let out = if joined {
        Interval::open(
            map.branch_inverse(w.lo(), Side::Left, ctx)?,
            map.branch_inverse(w.lo(), Side::Right, ctx)?,
        )?
    } else {
        match map.side_of(z, ctx) {
            Some(Side::Left) | None => Interval::open(
                map.branch_inverse(w.lo(), Side::Left, ctx)?,
                map.branch_inverse(w.hi(), Side::Left, ctx)?,
            )?,
            Some(Side::Right) => Interval::open(
                map.branch_inverse(w.hi(), Side::Right, ctx)?,
                map.branch_inverse(w.lo(), Side::Right, ctx)?,
            )?,
        }
    };
    if !out.contains_closed(z, ctx) {
        return Err(Error::PrecisionExhausted(format!(
            "pull-back component lost its orbit point near {}",
            z.to_f64()
        )));
    }
    Ok(out)
}

fn width_floor(ctx: &Ctx) -> Real {
    Real::pow2(-(ctx.precision_bits() as i32) + 16, ctx)
}

/// Compute the central domain by pulling `V_x` back along the critical orbit.
pub fn central_domain(
    map: &UnimodalMap,
    x: &Real,
    horizon: usize,
    ctx: &Ctx,
) -> Result<CentralDomain> {
    if x.close_to(map.critical(), ctx.eq_tol(), ctx) {
        return Err(Error::Domain(
            "central domain needs a point distinct from c".into(),
        ));
    }
    let v = window(map, x, ctx)?;
    // first return of the critical orbit into the open window
    let mut crit = Vec::with_capacity(64);
    crit.push(map.critical().clone());
    let mut m = None;
    let fps: Vec<Real> = certifying_fixed_points(map, ctx)
        .into_iter()
        .filter(|p| is_repelling(map, p, ctx) && !v.contains_open(p, ctx))
        .collect();
    for t in 1..=horizon {
        let next = map.eval(crit.last().expect("nonempty"), ctx)?;
        crit.push(next.clone());
        if v.contains_open(&next, ctx) {
            m = Some(t);
            break;
        }
        // landing on a repelling fixed point outside V: no return, ever
        if fps.iter().any(|p| next.close_to(p, ctx.eq_tol(), ctx)) {
            return Err(Error::NoReturn(horizon));
        }
    }
    let m = m.ok_or(Error::NoReturn(horizon))?;

    // pull V back along c_j, keeping the component containing the orbit
    let floor = width_floor(ctx);
    let mut w = v;
    for j in (1..m).rev() {
        w = preimage_component(map, &w, &crit[j], ctx)?;
        if w.len(ctx) < floor {
            return Err(Error::PrecisionExhausted(format!(
                "pull-back window narrower than 2^-{} at step {j}",
                ctx.precision_bits() - 16
            )));
        }
    }
    // last step: c_1 = f(c) lies in W_1, so the two inverse branches join at c
    if !w.contains_closed(&crit[1], ctx) {
        return Err(Error::PrecisionExhausted(
            "critical value escaped the pulled-back window".into(),
        ));
    }
    let psi = map.branch_inverse(w.lo(), Side::Left, ctx)?;
    let tau_psi = map.branch_inverse(w.lo(), Side::Right, ctx)?;
    let u = Interval::open(psi.clone(), tau_psi)?;
    if u.len(ctx) < floor {
        return Err(Error::PrecisionExhausted(
            "central domain narrower than the resolution floor".into(),
        ));
    }
    Ok(CentralDomain {
        u,
        psi,
        central_time: m,
    })
}

/// Entry-time convention: transfer counts from `k = 0`, return from `k = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryMode {
    FirstEntry,
    FirstReturn,
}

/// Least `k` with `f^k(y)` strictly inside the open window, or None.
/// Orbits that land on a repelling fixed point outside the window are
/// certified absent early.
pub fn first_entry_time(
    map: &UnimodalMap,
    y: &Real,
    v: &Interval,
    horizon: usize,
    mode: EntryMode,
    ctx: &Ctx,
) -> Result<Option<usize>> {
    if mode == EntryMode::FirstEntry && v.contains_open(y, ctx) {
        return Ok(Some(0));
    }
    let fps: Vec<Real> = certifying_fixed_points(map, ctx)
        .into_iter()
        .filter(|p| is_repelling(map, p, ctx) && !v.contains_open(p, ctx))
        .collect();
    let mut z = y.clone();
    for k in 1..=horizon {
        z = map.eval(&z, ctx)?;
        if v.contains_open(&z, ctx) {
            return Ok(Some(k));
        }
        if fps.iter().any(|p| z.close_to(p, ctx.eq_tol(), ctx)) {
            return Ok(None);
        }
    }
    Ok(None)
}

/// A component of the first-entry (or first-return) domain.
#[derive(Clone, Debug)]
pub struct Component {
    pub interval: Interval,
    pub time: usize,
}

/// Exact component of the entry domain through the point `y`: the component
/// of `f^-t(V)` containing `y`, obtained by chaining single-step preimage
/// components along the orbit of `y`. Handles both monotone components
/// (mapping onto the window) and the folded central component.
pub fn component_at(
    map: &UnimodalMap,
    y: &Real,
    v: &Interval,
    horizon: usize,
    mode: EntryMode,
    ctx: &Ctx,
) -> Result<Component> {
    let t = first_entry_time(map, y, v, horizon, mode, ctx)?.ok_or(Error::NoEntry(horizon))?;
    if t == 0 {
        return Ok(Component {
            interval: v.clone(),
            time: 0,
        });
    }
    let orbit = map.orbit(y, t, ctx)?;
    let floor = width_floor(ctx);
    let mut w = v.clone();
    for j in (0..t).rev() {
        w = preimage_component(map, &w, &orbit[j], ctx)?;
        if w.len(ctx) < floor {
            return Err(Error::PrecisionExhausted(format!(
                "entry component narrower than 2^-{}",
                ctx.precision_bits() - 16
            )));
        }
    }
    if !w.contains_closed(y, ctx) {
        return Err(Error::PrecisionExhausted(format!(
            "entry component around {} does not contain it",
            y.to_f64()
        )));
    }
    Ok(Component { interval: w, time: t })
}

/// Bounded enumeration of entry components inside `domain`.
#[derive(Clone, Debug)]
pub struct EnumParams {
    pub max_time: usize,
    pub min_width: Real,
    /// Cap on midpoint probes; exploration is deterministic (widest gap
    /// first, ties by position).
    pub probe_budget: usize,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub components: Vec<Component>,
    /// Fraction of the domain length covered by enumerated components.
    pub coverage: Real,
    /// Total length of gaps given up on (narrow or budget-exhausted).
    pub unexplained: Real,
    pub probes: usize,
}

fn enumerate_components(
    map: &UnimodalMap,
    v: &Interval,
    domain: &Interval,
    mode: EntryMode,
    params: &EnumParams,
    ctx: &Ctx,
) -> Result<Enumeration> {
    if params.max_time == 0 {
        return Err(Error::Domain("max_time must be >= 1".into()));
    }
    if !params.min_width.is_positive() {
        return Err(Error::Domain("min_width must be positive".into()));
    }
    let mut comps: Vec<Component> = Vec::new();
    let mut unexplained = Real::zero(ctx);
    let mut gaps: Vec<Interval> = Vec::new();
    fn push_gap(gaps: &mut Vec<Interval>, lo: Real, hi: Real) {
        if hi > lo {
            if let Ok(g) = Interval::open(lo, hi) {
                gaps.push(g);
            }
        }
    }

    if mode == EntryMode::FirstEntry {
        // the window itself is the unique time-0 component
        if v.lo() > domain.lo() {
            push_gap(&mut gaps, domain.lo().clone(), v.lo().clone());
        }
        if domain.hi() > v.hi() {
            push_gap(&mut gaps, v.hi().clone(), domain.hi().clone());
        }
        comps.push(Component {
            interval: v.clone(),
            time: 0,
        });
    } else {
        push_gap(&mut gaps, domain.lo().clone(), domain.hi().clone());
    }

    let mut probes = 0usize;
    while let Some(idx) = widest_gap(&gaps, ctx) {
        let gap = gaps.swap_remove(idx);
        let glen = gap.len(ctx);
        if glen < params.min_width {
            unexplained = unexplained.add(&glen, ctx);
            continue;
        }
        if probes >= params.probe_budget {
            unexplained = unexplained.add(&glen, ctx);
            continue;
        }
        probes += 1;
        let y = gap.midpoint(ctx);
        let comp = match component_at(map, &y, v, params.max_time, mode, ctx) {
            Ok(c) => Some(c),
            Err(Error::NoEntry(_)) => None,
            Err(Error::CriticalOnOrbit(_)) | Err(Error::PrecisionExhausted(_)) => None,
            Err(e) => return Err(e),
        };
        match comp {
            Some(c) => {
                // clip to the gap; the exact component may share endpoints
                // with neighbours already found
                let lo = c.interval.lo().max(gap.lo()).clone();
                let hi = c.interval.hi().min(gap.hi()).clone();
                if hi.sub(&lo, ctx) <= *ctx.eq_tol() {
                    split_gap(&mut gaps, &gap, &y, ctx);
                    continue;
                }
                push_gap(&mut gaps, gap.lo().clone(), lo.clone());
                push_gap(&mut gaps, hi.clone(), gap.hi().clone());
                comps.push(Component {
                    interval: Interval::open(lo, hi)?,
                    time: c.time,
                });
            }
            None => split_gap(&mut gaps, &gap, &y, ctx),
        }
    }

    comps.sort_by(|a, b| a.interval.lo().cmp(b.interval.lo()));
    let mut covered = Real::zero(ctx);
    for c in &comps {
        covered = covered.add(&c.interval.overlap_len(domain, ctx), ctx);
    }
    let coverage = covered.div(&domain.len(ctx), ctx);
    Ok(Enumeration {
        components: comps,
        coverage,
        unexplained,
        probes,
    })
}

fn widest_gap(gaps: &[Interval], ctx: &Ctx) -> Option<usize> {
    let mut best: Option<(usize, Real)> = None;
    for (i, g) in gaps.iter().enumerate() {
        let w = g.len(ctx);
        best = match best {
            None => Some((i, w)),
            Some((bi, bw)) => {
                if w > bw || (w == bw && g.lo() < gaps[bi].lo()) {
                    Some((i, w))
                } else {
                    Some((bi, bw))
                }
            }
        };
    }
    best.map(|(i, _)| i)
}

fn split_gap(gaps: &mut Vec<Interval>, gap: &Interval, at: &Real, ctx: &Ctx) {
    let tol = ctx.eq_tol();
    if at.sub(gap.lo(), ctx) > *tol {
        if let Ok(g) = Interval::open(gap.lo().clone(), at.clone()) {
            gaps.push(g);
        }
    }
    if gap.hi().sub(at, ctx) > *tol {
        if let Ok(g) = Interval::open(at.clone(), gap.hi().clone()) {
            gaps.push(g);
        }
    }
}

/// First-return structure of a nice point: window, return components with
/// times, central domain and coverage of the window.
#[derive(Clone, Debug)]
pub struct ReturnStructure {
    pub x: Real,
    pub v: Interval,
    pub components: Vec<Component>,
    pub u: Interval,
    pub psi: Real,
    pub central_time: usize,
    pub coverage: Real,
}

pub fn return_components(
    map: &UnimodalMap,
    x: &Real,
    params: &EnumParams,
    horizon: usize,
    ctx: &Ctx,
) -> Result<ReturnStructure> {
    let v = window(map, x, ctx)?;
    let central = central_domain(map, x, horizon, ctx)?;
    if params.max_time < central.central_time {
        return Err(Error::Domain(format!(
            "max_time {} below the central return time {}",
            params.max_time, central.central_time
        )));
    }
    let e = enumerate_components(map, &v, &v, EntryMode::FirstReturn, params, ctx)?;
    Ok(ReturnStructure {
        x: x.clone(),
        v,
        components: e.components,
        u: central.u,
        psi: central.psi,
        central_time: central.central_time,
        coverage: e.coverage,
    })
}

/// First-entry (transfer) structure over [0,1]: components with entry times,
/// the component `S` of the critical value, and coverage of [0,1].
#[derive(Clone, Debug)]
pub struct TransferStructure {
    pub x: Real,
    pub v: Interval,
    pub components: Vec<Component>,
    pub s: Interval,
    /// Entry time of `S`; equals `central_time - 1`.
    pub s_time: usize,
    pub coverage: Real,
}

pub fn transfer_components(
    map: &UnimodalMap,
    x: &Real,
    params: &EnumParams,
    horizon: usize,
    ctx: &Ctx,
) -> Result<TransferStructure> {
    let v = window(map, x, ctx)?;
    let central = central_domain(map, x, horizon, ctx)?;
    let full = Interval::closed(Real::zero(ctx), Real::one(ctx))?;
    let e = enumerate_components(map, &v, &full, EntryMode::FirstEntry, params, ctx)?;
    // S is the entry component of the critical value f(c) = a
    let s_comp = component_at(
        map,
        map.height(),
        &v,
        params.max_time,
        EntryMode::FirstEntry,
        ctx,
    )?;
    if s_comp.time + 1 != central.central_time {
        return Err(Error::PreconditionNotMet(format!(
            "transfer time of S is {} but the central return time is {}",
            s_comp.time, central.central_time
        )));
    }
    // f^n maps S onto V: check the endpoint images
    if s_comp.time > 0 {
        let tol = iterated_boundary_tol(map, s_comp.time, ctx);
        let img_lo = map.iterate(s_comp.interval.lo(), s_comp.time, ctx)?;
        let img_hi = map.iterate(s_comp.interval.hi(), s_comp.time, ctx)?;
        let (first, second) = if img_lo <= img_hi {
            (img_lo, img_hi)
        } else {
            (img_hi, img_lo)
        };
        if !first.close_to(v.lo(), &tol, ctx) || !second.close_to(v.hi(), &tol, ctx) {
            return Err(Error::PreconditionNotMet(
                "S does not map onto the window".into(),
            ));
        }
    }
    Ok(TransferStructure {
        x: x.clone(),
        v,
        components: e.components,
        s: s_comp.interval,
        s_time: s_comp.time,
        coverage: e.coverage,
    })
}

/// Comparison tolerance for points carried through `n` iterates: the
/// eq-tolerance inflated by the worst-case derivative growth, capped at a
/// quarter of the precision budget.
pub fn iterated_boundary_tol(map: &UnimodalMap, n: usize, ctx: &Ctx) -> Real {
    let bits = map.sup_deriv().to_f64().log2().max(0.0);
    let shift = ((n as f64) * bits).min(ctx.precision_bits() as f64 / 4.0) as i32;
    let scale = Real::pow2(shift, ctx);
    ctx.eq_tol().mul(&scale, ctx)
}

/// Scan sampled orbits for convergence to an attracting cycle; errors with
/// `PeriodicAttractorSuspected` when one is found. The critical orbit lies
/// in the basin of any attracting cycle of an S-unimodal map, so sampling
/// it suffices; a few extra seeds guard the heuristic.
pub fn detect_periodic_attractor(map: &UnimodalMap, horizon: usize, ctx: &Ctx) -> Result<()> {
    let steps = horizon.clamp(256, 4096);
    let tol = Real::pow2(-64, ctx);
    let near_one = Real::parse("0.999", ctx).expect("constant");
    let seeds = [
        map.critical().clone(),
        Real::parse("0.1728", ctx).expect("constant"),
        Real::parse("0.63", ctx).expect("constant"),
    ];
    'seed: for seed in &seeds {
        let orbit = map.orbit(seed, steps, ctx)?;
        let last = orbit.len() - 1;
        for period in 1..=64usize {
            if period * 4 > steps {
                break;
            }
            let mut converged = true;
            for k in 1..=3 {
                let a = &orbit[last - (k - 1) * period];
                let b = &orbit[last - k * period];
                if !a.close_to(b, &tol, ctx) {
                    converged = false;
                    break;
                }
            }
            if !converged {
                continue;
            }
            let d = crate::branch::deriv_iter(map, &orbit[last], period, ctx)?;
            if d.abs() < near_one {
                return Err(Error::PeriodicAttractorSuspected { period });
            }
            continue 'seed;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::new(256).unwrap()
    }

    fn r(s: &str, ctx: &Ctx) -> Real {
        Real::parse(s, ctx).unwrap()
    }

    fn m975(ctx: &Ctx) -> UnimodalMap {
        UnimodalMap::from_strs("2", "0.975", ctx).unwrap()
    }

    fn cheb(ctx: &Ctx) -> UnimodalMap {
        UnimodalMap::from_strs("2", "1", ctx).unwrap()
    }

    #[test]
    fn niceness_examples() {
        let c = ctx();
        let m = m975(&c);
        // the interior fixed point is nice with a certificate
        let p0 = m.interior_fixed_point(&c).unwrap();
        assert!(matches!(
            is_nice(&m, &p0, 10, &c).unwrap(),
            Niceness::Certified { .. }
        ));
        // hand orbit of 0.6 re-enters (0.4, 0.6) at step 5
        assert_eq!(
            is_nice(&m, &r("0.6", &c), 10, &c).unwrap(),
            Niceness::NotNice { step: 5 }
        );
        // Chebyshev fixed point 0.75
        let mc = cheb(&c);
        assert!(matches!(
            is_nice(&mc, &r("0.75", &c), 10, &c).unwrap(),
            Niceness::Certified { .. }
        ));
        // undefined at the critical point
        assert!(is_nice(&m, &r("0.5", &c), 10, &c).is_err());
    }

    #[test]
    fn nice_candidates_chebyshev() {
        let c = ctx();
        let m = cheb(&c);
        let tol = Real::pow2(-200, &c);
        let d0 = nice_candidates(&m, 0, &c).unwrap();
        assert_eq!(d0.len(), 1);
        assert!(d0[0].close_to(&r("0.75", &c), &tol, &c));
        let d1 = nice_candidates(&m, 1, &c).unwrap();
        assert_eq!(d1.len(), 2);
        assert!(d1[0].close_to(&r("0.25", &c), &tol, &c));
        assert!(d1[1].close_to(&r("0.75", &c), &tol, &c));
    }

    #[test]
    fn nested_niceness_windows() {
        let c = ctx();
        let m = m975(&c);
        let cands = nice_candidates(&m, 8, &c).unwrap();
        let below: Vec<&Real> = cands.iter().filter(|x| **x < *m.critical()).collect();
        for pair in below.windows(2) {
            let v_outer = window(&m, pair[0], &c).unwrap();
            let v_inner = window(&m, pair[1], &c).unwrap();
            assert!(v_outer.contains_interval(&v_inner, &c));
        }
    }

    #[test]
    fn central_domain_at_p0_matches_oracle() {
        let c = ctx();
        let m = m975(&c);
        let p0 = m.interior_fixed_point(&c).unwrap();
        let cd = central_domain(&m, &p0, 100, &c).unwrap();
        assert_eq!(cd.central_time, 3);
        // independent 400-bit pull-back oracle
        let psi_oracle = r(
            "0.3916888671748627682603504637668389569215305955709593639313144692671249",
            &c,
        );
        let tol = Real::pow2(-180, &c);
        assert!(
            cd.psi.close_to(&psi_oracle, &tol, &c),
            "psi = {} vs oracle {}",
            cd.psi.to_f64(),
            psi_oracle.to_f64()
        );
        // central symmetry |psi - c| = |tau(psi) - c|
        let dl = cd.u.lo().sub(m.critical(), &c).abs();
        let dr = cd.u.hi().sub(m.critical(), &c).abs();
        assert!(dl.close_to(&dr, c.eq_tol(), &c));
        // U sits inside V
        let v = window(&m, &p0, &c).unwrap();
        assert!(v.contains_interval(&cd.u, &c));
    }

    #[test]
    fn central_domain_no_return_for_chebyshev() {
        let c = ctx();
        let m = cheb(&c);
        // critical orbit 1, 0, 0, ... never enters (0.25, 0.75)
        assert!(matches!(
            central_domain(&m, &r("0.75", &c), 50, &c),
            Err(Error::NoReturn(_))
        ));
    }

    #[test]
    fn entry_time_examples() {
        let c = ctx();
        let m = cheb(&c);
        let v = Interval::open(r("0.25", &c), r("0.75", &c)).unwrap();
        // already inside
        assert_eq!(
            first_entry_time(&m, &r("0.3", &c), &v, 10, EntryMode::FirstEntry, &c).unwrap(),
            Some(0)
        );
        // first-return of 0.3: orbit 0.84, 0.5376
        assert_eq!(
            first_entry_time(&m, &r("0.3", &c), &v, 10, EntryMode::FirstReturn, &c).unwrap(),
            Some(2)
        );
        // entry of 0.84 after one step
        assert_eq!(
            first_entry_time(&m, &r("0.84", &c), &v, 10, EntryMode::FirstEntry, &c).unwrap(),
            Some(1)
        );
        // orbit of 1 is 0, 0, ... : certified absent
        assert_eq!(
            first_entry_time(&m, &Real::one(&c), &v, 10, EntryMode::FirstEntry, &c).unwrap(),
            None
        );
    }

    #[test]
    fn component_extraction_is_exact() {
        let c = ctx();
        let m = m975(&c);
        let p0 = m.interior_fixed_point(&c).unwrap();
        let v = window(&m, &p0, &c).unwrap();
        let y = r("0.1", &c);
        let comp = component_at(&m, &y, &v, 100, EntryMode::FirstEntry, &c).unwrap();
        assert!(comp.time >= 1);
        // endpoints map onto the window boundary
        let tol = iterated_boundary_tol(&m, comp.time, &c);
        let il = m.iterate(comp.interval.lo(), comp.time, &c).unwrap();
        let ih = m.iterate(comp.interval.hi(), comp.time, &c).unwrap();
        let (a, b) = if il <= ih { (il, ih) } else { (ih, il) };
        assert!(a.close_to(v.lo(), &tol, &c), "{} vs {}", a.to_f64(), v.lo().to_f64());
        assert!(b.close_to(v.hi(), &tol, &c));
        // the midpoint enters at the same time and not earlier
        let mid = comp.interval.midpoint(&c);
        assert_eq!(
            first_entry_time(&m, &mid, &v, 100, EntryMode::FirstEntry, &c).unwrap(),
            Some(comp.time)
        );
    }

    #[test]
    fn return_structure_at_p0() {
        let c = ctx();
        let m = m975(&c);
        let p0 = m.interior_fixed_point(&c).unwrap();
        let params = EnumParams {
            max_time: 64,
            min_width: r("1e-5", &c),
            probe_budget: 20_000,
        };
        let rs = return_components(&m, &p0, &params, 1000, &c).unwrap();
        assert_eq!(rs.central_time, 3);
        assert!(rs.coverage > r("0.9", &c), "coverage {}", rs.coverage.to_f64());
        assert!(rs.coverage <= Real::one(&c));
        // components are pairwise disjoint and carry times >= 1
        for w in rs.components.windows(2) {
            assert!(*w[0].interval.hi() <= w[1].interval.lo().add(c.eq_tol(), &c));
        }
        for comp in &rs.components {
            assert!(comp.time >= 1);
            // each component returns into the closure of V
            let mid = comp.interval.midpoint(&c);
            let img = m.iterate(&mid, comp.time, &c).unwrap();
            assert!(rs.v.contains_closed(&img, &c));
        }
        // the enumerated component containing c agrees with the central domain
        let central = rs
            .components
            .iter()
            .find(|comp| comp.interval.contains_open(m.critical(), &c))
            .expect("central component present");
        assert_eq!(central.time, rs.central_time);
        let tol = Real::pow2(-100, &c);
        assert!(central.interval.lo().close_to(rs.u.lo(), &tol, &c));
        assert!(central.interval.hi().close_to(rs.u.hi(), &tol, &c));
    }

    #[test]
    fn transfer_structure_at_p0() {
        let c = ctx();
        let m = m975(&c);
        let p0 = m.interior_fixed_point(&c).unwrap();
        let params = EnumParams {
            max_time: 64,
            min_width: r("1e-5", &c),
            probe_budget: 20_000,
        };
        let ts = transfer_components(&m, &p0, &params, 1000, &c).unwrap();
        // S contains f(c) = a with entry time central_time - 1 = 2
        assert_eq!(ts.s_time, 2);
        assert!(ts.s.contains_closed(m.height(), &c));
        assert!(ts.coverage > r("0.9", &c), "coverage {}", ts.coverage.to_f64());
        // the time-0 component is V itself
        let zero: Vec<_> = ts.components.iter().filter(|comp| comp.time == 0).collect();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].interval, ts.v);
    }

    #[test]
    fn min_width_discards_everything() {
        let c = ctx();
        let m = m975(&c);
        let p0 = m.interior_fixed_point(&c).unwrap();
        let v = window(&m, &p0, &c).unwrap();
        let params = EnumParams {
            max_time: 16,
            min_width: v.len(&c).mul(&Real::from_u64(2, &c), &c),
            probe_budget: 1000,
        };
        let rs = return_components(&m, &p0, &params, 1000, &c).unwrap();
        assert!(rs.components.is_empty());
        assert!(rs.coverage.is_zero());
    }

    #[test]
    fn entry_oracle_agrees_with_enumeration() {
        let c = ctx();
        let m = m975(&c);
        let p0 = m.interior_fixed_point(&c).unwrap();
        let params = EnumParams {
            max_time: 64,
            min_width: r("1e-5", &c),
            probe_budget: 20_000,
        };
        let ts = transfer_components(&m, &p0, &params, 1000, &c).unwrap();
        // deterministic sample grid
        for i in 0..200u64 {
            let y = Real::from_u64(2 * i + 1, &c).div(&Real::from_u64(400, &c), &c);
            let Some(comp) = ts
                .components
                .iter()
                .find(|comp| comp.interval.contains_open(&y, &c))
            else {
                continue;
            };
            let t = first_entry_time(&m, &y, &ts.v, params.max_time, EntryMode::FirstEntry, &c)
                .unwrap();
            assert_eq!(t, Some(comp.time), "at y = {}", y.to_f64());
        }
    }

    #[test]
    fn attractor_detection() {
        let c = ctx();
        // a = 0.7875 (lambda = 3.15): attracting 2-cycle
        let m = UnimodalMap::from_strs("2", "0.7875", &c).unwrap();
        assert!(matches!(
            detect_periodic_attractor(&m, 2000, &c),
            Err(Error::PeriodicAttractorSuspected { period: 2 })
        ));
        // a = 0.55: attracting fixed point
        let m = UnimodalMap::from_strs("2", "0.55", &c).unwrap();
        assert!(matches!(
            detect_periodic_attractor(&m, 2000, &c),
            Err(Error::PeriodicAttractorSuspected { period: 1 })
        ));
        // a = 0.975: no attractor at this height
        let m = m975(&c);
        assert!(detect_periodic_attractor(&m, 2000, &c).is_ok());
    }
}
