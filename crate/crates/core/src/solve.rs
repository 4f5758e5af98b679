//! One-dimensional convex minimization.
//!
//! Every optimization problem in this crate reduces to minimizing a convex
//! scalar function, either over an interval or over the whole real line.
//! The workhorse is a hybrid scheme: golden-section search narrows a bracket,
//! then Newton steps on the derivative polish the minimizer to near machine
//! precision, falling back to bisection on a sign change of the derivative
//! whenever a Newton step leaves the bracket. Piecewise-linear objectives are
//! instead minimized exactly by breakpoint enumeration.

/// Tolerances and limits shared by the scalar solvers.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Absolute bracket width at which golden-section stops.
    pub golden_tol: f64,
    /// Stationarity target |f'(u)| for the Newton polish.
    pub newton_tol: f64,
    /// Maximum half-width for automatic bracketing on the real line.
    pub bracket_max: f64,
    /// Iteration cap for each phase.
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            golden_tol: 1e-8,
            newton_tol: 1e-12,
            bracket_max: 64.0,
            max_iter: 200,
        }
    }
}

/// Outcome of a scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinStatus {
    /// Minimizer found at an interior stationary point.
    Interior,
    /// Minimum attained on the boundary of the feasible interval.
    Boundary,
    /// Objective decreases monotonically towards an endpoint of an unbounded
    /// domain; the reported value is the limiting infimum.
    Limit,
}

#[derive(Debug, Clone, Copy)]
pub struct Minimum {
    pub u: f64,
    pub value: f64,
    pub status: MinStatus,
    pub iterations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[lo, hi]`. Assumes `f` is unimodal (convex).
pub fn golden_section<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, usize) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while hi - lo > tol && iters < max_iter {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        iters += 1;
    }
    (0.5 * (lo + hi), iters)
}

/// Bisection for a root of `g` on `[lo, hi]`, assuming `g(lo) <= 0 <= g(hi)`.
fn bisect_root<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, max_iter: usize) -> f64 {
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimize a convex differentiable function over `[lo, hi]`.
///
/// `d1` is the derivative; `d2`, when available, enables the Newton polish.
/// `kinks` lists points where `d2` is undefined; Newton steps are suppressed
/// in their vicinity and the bisection path takes over.
pub fn minimize_convex_bounded<F, D1>(
    f: &F,
    d1: &D1,
    d2: Option<&dyn Fn(f64) -> f64>,
    kinks: &[f64],
    lo: f64,
    hi: f64,
    opts: &SolverOptions,
) -> Minimum
where
    F: Fn(f64) -> f64,
    D1: Fn(f64) -> f64,
{
    debug_assert!(lo <= hi);
    if lo == hi {
        return Minimum {
            u: lo,
            value: f(lo),
            status: MinStatus::Boundary,
            iterations: 0,
        };
    }
    // Convexity: a nonnegative derivative just inside the left end pins the
    // minimum to the boundary, and symmetrically on the right.
    let eps = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let dlo = d1(lo + eps);
    if dlo.is_finite() && dlo >= 0.0 {
        return Minimum {
            u: lo,
            value: f(lo),
            status: MinStatus::Boundary,
            iterations: 0,
        };
    }
    let dhi = d1(hi - eps);
    if dhi.is_finite() && dhi <= 0.0 {
        return Minimum {
            u: hi,
            value: f(hi),
            status: MinStatus::Boundary,
            iterations: 0,
        };
    }

    let (mut u, golden_iters) = golden_section(f, lo, hi, opts.golden_tol, opts.max_iter);
    let mut iterations = golden_iters;

    // Newton polish on the stationarity condition d1(u) = 0, guarded by the
    // golden bracket. The derivative of a convex function is non-decreasing,
    // so a sign change brackets the root for the bisection fallback.
    let mut blo = (u - 2.0 * opts.golden_tol).max(lo);
    let mut bhi = (u + 2.0 * opts.golden_tol).min(hi);
    // Widen until the derivative changes sign across the bracket (convexity
    // makes this monotone; a handful of doublings suffice).
    let mut widen = 0;
    while d1(blo) > 0.0 && blo > lo && widen < 60 {
        blo = (blo - (bhi - blo).max(opts.golden_tol)).max(lo);
        widen += 1;
    }
    while d1(bhi) < 0.0 && bhi < hi && widen < 120 {
        bhi = (bhi + (bhi - blo).max(opts.golden_tol)).min(hi);
        widen += 1;
    }
    let near_kink = |x: f64| {
        kinks
            .iter()
            .any(|&k| (x - k).abs() < 1e-9 * (1.0 + k.abs()))
    };
    if let Some(d2f) = d2 {
        for _ in 0..opts.max_iter {
            let g = d1(u);
            iterations += 1;
            if g.abs() <= opts.newton_tol || near_kink(u) {
                break;
            }
            let h = d2f(u);
            let step_ok = h.is_finite() && h > 0.0;
            let next = if step_ok { u - g / h } else { f64::NAN };
            if step_ok && next > blo && next < bhi && !near_kink(next) {
                if g <= 0.0 {
                    blo = u;
                } else {
                    bhi = u;
                }
                u = next;
            } else {
                // Newton left the bracket: bisect on the derivative instead.
                u = bisect_root(&|x| d1(x), blo, bhi, opts.max_iter);
                break;
            }
        }
    } else if d1(blo) <= 0.0 && d1(bhi) >= 0.0 {
        u = bisect_root(&|x| d1(x), blo, bhi, opts.max_iter);
    }
    Minimum {
        u,
        value: f(u),
        status: MinStatus::Interior,
        iterations,
    }
}

/// Minimize a convex differentiable function over the whole real line.
///
/// Brackets by doubling `[-B, B]` until the derivative changes sign. If the
/// derivative never turns positive (or negative) within `bracket_max`, the
/// infimum is a limit at infinity; `limit_value` supplies it.
pub fn minimize_convex_unbounded<F, D1>(
    f: &F,
    d1: &D1,
    d2: Option<&dyn Fn(f64) -> f64>,
    kinks: &[f64],
    limit_value: impl Fn(bool) -> f64,
    opts: &SolverOptions,
) -> Minimum
where
    F: Fn(f64) -> f64,
    D1: Fn(f64) -> f64,
{
    let mut b = 1.0;
    loop {
        let (dl, dh) = (d1(-b), d1(b));
        if dl <= 0.0 && dh >= 0.0 {
            return minimize_convex_bounded(f, d1, d2, kinks, -b, b, opts);
        }
        if b >= opts.bracket_max {
            // Monotone derivative: the infimum is approached at +/- infinity.
            let towards_pos = dh < 0.0;
            return Minimum {
                u: if towards_pos {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                value: limit_value(towards_pos),
                status: MinStatus::Limit,
                iterations: 0,
            };
        }
        b *= 2.0;
    }
}

/// Exact minimization of a convex piecewise-linear function over `[lo, hi]`
/// by evaluating the candidate breakpoints and interval endpoints.
///
/// `lo`/`hi` may be infinite; in that case `edge_slope` reports the slope on
/// the corresponding unbounded piece so monotone escapes are detected, and
/// `limit_value` supplies the limiting infimum.
pub fn minimize_polyhedral<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    lo: f64,
    hi: f64,
    edge_slope: impl Fn(bool) -> f64,
    limit_value: impl Fn(bool) -> f64,
) -> Minimum {
    let mut candidates: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|u| *u > lo && *u < hi)
        .collect();
    if lo.is_finite() {
        candidates.push(lo);
    } else if edge_slope(false) >= 0.0 {
        // Decreasing towards -infinity.
        return Minimum {
            u: f64::NEG_INFINITY,
            value: limit_value(false),
            status: MinStatus::Limit,
            iterations: 0,
        };
    }
    if hi.is_finite() {
        candidates.push(hi);
    } else if edge_slope(true) <= 0.0 {
        return Minimum {
            u: f64::INFINITY,
            value: limit_value(true),
            status: MinStatus::Limit,
            iterations: 0,
        };
    }
    let mut best = Minimum {
        u: f64::NAN,
        value: f64::INFINITY,
        status: MinStatus::Interior,
        iterations: 0,
    };
    for &u in &candidates {
        let v = f(u);
        if v < best.value {
            best = Minimum {
                u,
                value: v,
                status: if u == lo || u == hi {
                    MinStatus::Boundary
                } else {
                    MinStatus::Interior
                },
                iterations: 0,
            };
        }
    }
    best
}

/// Compensated (Neumaier) summation; the transformation values are small
/// differences of order-one terms and plain summation loses digits there.
pub fn kahan_sum(terms: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Parse a grid description of the form `log:LO:HI:COUNT` or `lin:LO:HI:COUNT`.
pub fn parse_grid(desc: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = desc.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("grid `{desc}` must have the form kind:lo:hi:count"));
    }
    let lo: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad grid lower bound `{}`", parts[1]))?;
    let hi: f64 = parts[2]
        .parse()
        .map_err(|_| format!("bad grid upper bound `{}`", parts[2]))?;
    let count: usize = parts[3]
        .parse()
        .map_err(|_| format!("bad grid count `{}`", parts[3]))?;
    if count < 2 || lo >= hi {
        return Err(format!("grid `{desc}` needs lo < hi and count >= 2"));
    }
    match parts[0] {
        "log" => {
            if lo <= 0.0 {
                return Err("log grid requires a positive lower bound".into());
            }
            let (la, lb) = (lo.ln(), hi.ln());
            Ok((0..count)
                .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
                .collect())
        }
        "lin" => Ok((0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()),
        other => Err(format!("unknown grid kind `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_quadratic_min() {
        let f = |x: f64| (x - 2.0) * (x - 2.0);
        let (x, _) = golden_section(&f, 0.0, 5.0, 1e-10, 400);
        assert!((x - 2.0).abs() < 1e-6);
    }

    #[test]
    fn hybrid_polishes_to_stationarity() {
        let f = |x: f64| x.exp() + (-2.0 * x).exp();
        let d1 = |x: f64| x.exp() - 2.0 * (-2.0 * x).exp();
        let d2 = |x: f64| x.exp() + 4.0 * (-2.0 * x).exp();
        let m = minimize_convex_unbounded(
            &f,
            &d1,
            Some(&d2),
            &[],
            |_| f64::NAN,
            &SolverOptions::default(),
        );
        // exact stationary point: e^x = 2 e^{-2x}  =>  x = ln(2)/3
        assert!((m.u - 2f64.ln() / 3.0).abs() < 1e-10);
        assert!(d1(m.u).abs() < 1e-11);
        assert_eq!(m.status, MinStatus::Interior);
    }

    #[test]
    fn monotone_objective_reports_limit() {
        let f = |x: f64| (-x).exp();
        let d1 = |x: f64| -(-x).exp();
        let m = minimize_convex_unbounded(
            &f,
            &d1,
            None,
            &[],
            |towards_pos| if towards_pos { 0.0 } else { f64::NAN },
            &SolverOptions::default(),
        );
        assert_eq!(m.status, MinStatus::Limit);
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn bounded_boundary_cases() {
        let f = |x: f64| x;
        let d1 = |_: f64| 1.0;
        let m = minimize_convex_bounded(&f, &d1, None, &[], -1.0, 3.0, &SolverOptions::default());
        assert_eq!(m.status, MinStatus::Boundary);
        assert_eq!(m.u, -1.0);
    }

    #[test]
    fn polyhedral_breakpoints_exact() {
        // f(u) = 0.35 max(0, 1+u) + 0.65 max(0, 1-u): minimum at the kink u = 1.
        let f = |u: f64| 0.35 * (1.0 + u).max(0.0) + 0.65 * (1.0 - u).max(0.0);
        let m = minimize_polyhedral(
            &f,
            &[-1.0, 1.0],
            f64::NEG_INFINITY,
            f64::INFINITY,
            |pos| if pos { 0.35 } else { -0.65 },
            |_| f64::NAN,
        );
        assert_eq!(m.u, 1.0);
        assert!((m.value - 0.7).abs() < 1e-15);
    }

    #[test]
    fn grid_parses_and_rejects() {
        let g = parse_grid("log:1e-4:0.5:40").unwrap();
        assert_eq!(g.len(), 40);
        assert!((g[0] - 1e-4).abs() < 1e-18);
        assert!((g[39] - 0.5).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(parse_grid("log:0:1:5").is_err());
        assert!(parse_grid("geom:1:2:5").is_err());
    }

    #[test]
    fn kahan_recovers_cancelled_sum() {
        let big = 1e16;
        assert_eq!(kahan_sum(&[big, 1.0, -big]), 1.0);
    }
}
