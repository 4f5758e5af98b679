//! The estimation-error transformation function `T(t)`.
//!
//! For a margin loss built on `phi`, with `f_t(u) = ((1-t)/2) phi(u) +
//! ((1+t)/2) phi(-u)`,
//!
//! ```text
//! T(t) = f_t(0) - inf_{u in R} f_t(u).
//! ```
//!
//! For a comp-sum loss the inner problem is shifted and box-constrained, and
//! an outer infimum runs over the shift:
//!
//! ```text
//! T(t) = inf_{tau in [1/n, 1/2]}  { phi(tau) - inf_{|u| <= tau} f_{t,tau}(u) },
//! f_{t,tau}(u) = ((1-t)/2) phi(tau + u) + ((1+t)/2) phi(tau - u).
//! ```
//!
//! For a constrained loss, with `s = 2 - 1/(n-1)`,
//!
//! ```text
//! T(t) = inf_{tau in [0, A]} sup_u { s phi(tau)
//!        - ((s-t)/2) phi(tau+u) - ((s+t)/2) phi(tau-u) },
//! ```
//!
//! and the outer infimum over `tau >= 0` is truncated to a finite `[0, A]`.
//! The identity `T(s t) = s * InnerT(t)` relates this to the normalized
//! problem `InnerT` with weights `(1-t)/2, (1+t)/2`, which is exposed
//! separately ([`inner_transform_constrained`]) so the two routes can be
//! checked against each other.
//!
//! Inner problems are convex in `u`; smooth entries use the golden-section +
//! Newton hybrid, polyhedral entries use exact breakpoint enumeration.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::phi::{effective_comp_sum_phi, Family, Phi, Smoothness, SurrogateSpec};
use crate::solve::{
    kahan_sum, minimize_convex_bounded, minimize_convex_unbounded, minimize_polyhedral, MinStatus,
    Minimum, SolverOptions,
};

/// The pointwise inner objective `f(u) = wa * phi(shift + u) + wb * phi(shift - u)`.
///
/// Margin problems use `shift = 0` and weights `(1-t)/2, (1+t)/2`; shifted
/// problems use `shift = tau`. Convexity in `u` is inherited from `phi`.
#[derive(Debug, Clone)]
pub struct InnerProblem<'a> {
    pub phi: &'a Phi,
    pub shift: f64,
    pub wa: f64,
    pub wb: f64,
}

impl<'a> InnerProblem<'a> {
    pub fn f(&self, u: f64) -> f64 {
        self.wa * self.phi.value(self.shift + u) + self.wb * self.phi.value(self.shift - u)
    }

    pub fn d1(&self, u: f64) -> f64 {
        self.wa * self.phi.d1(self.shift + u) - self.wb * self.phi.d1(self.shift - u)
    }

    pub fn d2(&self, u: f64) -> f64 {
        self.wa * self.phi.d2(self.shift + u) + self.wb * self.phi.d2(self.shift - u)
    }

    /// Kink locations of `f` in the `u` variable.
    pub fn kinks(&self) -> Vec<f64> {
        let mut ks = Vec::new();
        for k in self.phi.kinks() {
            ks.push(k - self.shift);
            ks.push(self.shift - k);
        }
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ks.dedup();
        ks
    }

    /// Limiting value of `f` when the infimum escapes to +/- infinity.
    /// Only reachable when the corresponding weight vanishes (e.g. t = 1),
    /// in which case the surviving term tends to the infimum of `phi`.
    fn limit_value(&self, towards_pos: bool) -> f64 {
        let (escaping_w, surviving_w) = if towards_pos {
            (self.wa, self.wb)
        } else {
            (self.wb, self.wa)
        };
        if escaping_w > 0.0 {
            f64::INFINITY
        } else {
            surviving_w * self.phi.lower_bound()
        }
    }

    /// Minimize over `[lo, hi]` (either bound may be infinite).
    pub fn minimize(&self, lo: f64, hi: f64, opts: &SolverOptions) -> Minimum {
        if self.phi.smoothness() == Smoothness::Polyhedral {
            let slope = |pos: bool| {
                let probe = if pos { 1e6 } else { -1e6 };
                self.d1(probe)
            };
            return minimize_polyhedral(&|u| self.f(u), &self.kinks(), lo, hi, slope, |pos| {
                self.limit_value(pos)
            });
        }
        let f = |u: f64| self.f(u);
        let d1 = |u: f64| self.d1(u);
        let d2 = |u: f64| self.d2(u);
        let kinks = self.kinks();
        if lo.is_finite() && hi.is_finite() {
            minimize_convex_bounded(&f, &d1, Some(&d2), &kinks, lo, hi, opts)
        } else {
            minimize_convex_unbounded(&f, &d1, Some(&d2), &kinks, |p| self.limit_value(p), opts)
        }
    }
}

/// Result of a single transformation evaluation.
#[derive(Debug, Clone, Copy)]
pub struct TransformResult {
    pub value: f64,
    /// Achieved inner minimizer (infinite when the infimum is a limit).
    pub inner_minimizer: f64,
    /// Outer shift argmin, for the families that have one.
    pub outer_tau: Option<f64>,
    /// The inner infimum was only attained in the limit.
    pub limit: bool,
    /// The outer argmin landed within one grid cell of the truncation bound.
    pub truncation_suspect: bool,
}

fn check_t(t: f64) -> Result<(), Error> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Parameter(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// Compensated evaluation of `f(0) - f(u*)` in the factored form
/// `wa (phi(s) - phi(s+u)) + wb (phi(s) - phi(s-u))`; the raw difference is
/// O(t^2) of order-one terms and loses precision near zero otherwise.
fn gap_at(inner: &InnerProblem, u: f64) -> f64 {
    let p0 = inner.phi.value(inner.shift);
    kahan_sum(&[
        inner.wa * (p0 - inner.phi.value(inner.shift + u)),
        inner.wb * (p0 - inner.phi.value(inner.shift - u)),
    ])
}

fn solved_gap(inner: &InnerProblem, lo: f64, hi: f64, opts: &SolverOptions) -> (f64, Minimum) {
    let m = inner.minimize(lo, hi, opts);
    let gap = match m.status {
        MinStatus::Limit => (inner.wa + inner.wb) * inner.phi.value(inner.shift) - m.value,
        _ => gap_at(inner, m.u),
    };
    (gap, m)
}

/// `T(t)` for a binary margin-based loss: `f_t(0) - inf_u f_t(u)`.
pub fn transform_binary(
    spec: &SurrogateSpec,
    t: f64,
    opts: &SolverOptions,
) -> Result<TransformResult, Error> {
    if spec.family != Family::Margin {
        return Err(Error::Precondition(format!(
            "margin transform called on {} family",
            spec.family
        )));
    }
    check_t(t)?;
    if t == 0.0 {
        // f_0 is symmetric in u, so the infimum is at zero and T(0) = 0.
        return Ok(TransformResult {
            value: 0.0,
            inner_minimizer: 0.0,
            outer_tau: None,
            limit: false,
            truncation_suspect: false,
        });
    }
    let inner = InnerProblem {
        phi: &spec.phi,
        shift: 0.0,
        wa: 0.5 * (1.0 - t),
        wb: 0.5 * (1.0 + t),
    };
    let (gap, m) = solved_gap(&inner, f64::NEG_INFINITY, f64::INFINITY, opts);
    Ok(TransformResult {
        value: gap,
        inner_minimizer: m.u,
        outer_tau: None,
        limit: m.status == MinStatus::Limit,
        truncation_suspect: false,
    })
}

/// Outer minimization over a compact shift interval: dense grid followed by
/// golden-section refinement around the best cell. Ties (values within an
/// absolute 1e-12 of the minimum) resolve to the smallest shift.
fn outer_minimize(
    eval: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    grid_points: usize,
    opts: &SolverOptions,
) -> (f64, f64, f64) {
    debug_assert!(hi >= lo);
    if hi - lo < 1e-14 {
        let v = eval(lo);
        return (lo, v, hi - lo);
    }
    let n = grid_points.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let mut best_idx = 0usize;
    let mut best_val = f64::INFINITY;
    let values: Vec<f64> = (0..n).map(|i| eval(lo + step * i as f64)).collect();
    for (i, &v) in values.iter().enumerate() {
        if v < best_val - 1e-12 {
            best_val = v;
            best_idx = i;
        }
    }
    let rlo = lo + step * best_idx.saturating_sub(1) as f64;
    let rhi = (lo + step * (best_idx + 1) as f64).min(hi);
    let (tau, _) =
        crate::solve::golden_section(&|x| eval(x), rlo, rhi, opts.golden_tol, opts.max_iter);
    let refined = eval(tau);
    if refined <= best_val {
        (tau, refined, step)
    } else {
        (lo + step * best_idx as f64, best_val, step)
    }
}

/// `T(t)` for a comp-sum loss: nested optimization with the shift running
/// over `[1/n, 1/2]` and the inner variable over the box `|u| <= tau`.
pub fn transform_comp_sum(
    spec: &SurrogateSpec,
    t: f64,
    opts: &SolverOptions,
) -> Result<TransformResult, Error> {
    if spec.family != Family::CompSum {
        return Err(Error::Precondition(format!(
            "comp-sum transform called on {} family",
            spec.family
        )));
    }
    check_t(t)?;
    let phi = effective_comp_sum_phi(spec);
    let tau_lo = 1.0 / spec.n_classes as f64;
    let tau_hi = 0.5;
    if t == 0.0 {
        return Ok(TransformResult {
            value: 0.0,
            inner_minimizer: 0.0,
            outer_tau: Some(tau_lo),
            limit: false,
            truncation_suspect: false,
        });
    }
    let gap_of = |tau: f64| {
        let inner = InnerProblem {
            phi: &phi,
            shift: tau,
            wa: 0.5 * (1.0 - t),
            wb: 0.5 * (1.0 + t),
        };
        solved_gap(&inner, -tau, tau, opts)
    };
    let (tau_star, value, _) = outer_minimize(
        |tau| gap_of(tau).0,
        tau_lo,
        tau_hi,
        opts.outer_grid_points(),
        opts,
    );
    let (_, m) = gap_of(tau_star);
    Ok(TransformResult {
        value,
        inner_minimizer: m.u,
        outer_tau: Some(tau_star),
        limit: false,
        truncation_suspect: false,
    })
}

/// Scaling factor `s = 2 - 1/(n-1)` of the constrained-family transformation.
pub fn constrained_scale(n_classes: usize) -> f64 {
    2.0 - 1.0 / (n_classes as f64 - 1.0)
}

/// The normalized constrained problem
/// `InnerT(t) = inf_{tau in [0, A]} { phi(tau) - inf_u f_{t,tau}(u) }`
/// with the standard weights `(1-t)/2, (1+t)/2`.
pub fn inner_transform_constrained(
    spec: &SurrogateSpec,
    t: f64,
    truncation: f64,
    opts: &SolverOptions,
) -> Result<TransformResult, Error> {
    constrained_nested(spec, 0.5 * (1.0 - t), 0.5 * (1.0 + t), truncation, opts)
}

/// `T(t)` for a constrained loss, including the `2 - 1/(n-1)` scaling.
pub fn transform_constrained(
    spec: &SurrogateSpec,
    t: f64,
    truncation: f64,
    opts: &SolverOptions,
) -> Result<TransformResult, Error> {
    if spec.family != Family::Constrained {
        return Err(Error::Precondition(format!(
            "constrained transform called on {} family",
            spec.family
        )));
    }
    check_t(t)?;
    let s = constrained_scale(spec.n_classes);
    constrained_nested(spec, 0.5 * (s - t), 0.5 * (s + t), truncation, opts)
}

fn constrained_nested(
    spec: &SurrogateSpec,
    wa: f64,
    wb: f64,
    truncation: f64,
    opts: &SolverOptions,
) -> Result<TransformResult, Error> {
    if spec.family != Family::Constrained {
        return Err(Error::Precondition(format!(
            "constrained transform called on {} family",
            spec.family
        )));
    }
    if !truncation.is_finite() || truncation <= 0.0 {
        return Err(Error::Parameter(format!(
            "truncation bound must be positive, got {truncation}"
        )));
    }
    if wa == wb {
        return Ok(TransformResult {
            value: 0.0,
            inner_minimizer: 0.0,
            outer_tau: Some(0.0),
            limit: false,
            truncation_suspect: false,
        });
    }
    let gap_of = |tau: f64| {
        let inner = InnerProblem {
            phi: &spec.phi,
            shift: tau,
            wa,
            wb,
        };
        solved_gap(&inner, f64::NEG_INFINITY, f64::INFINITY, opts)
    };
    let (tau_star, value, step) = outer_minimize(
        |tau| gap_of(tau).0,
        0.0,
        truncation,
        opts.outer_grid_points(),
        opts,
    );
    let (_, m) = gap_of(tau_star);
    Ok(TransformResult {
        value,
        inner_minimizer: m.u,
        outer_tau: Some(tau_star),
        limit: m.status == MinStatus::Limit,
        truncation_suspect: tau_star >= truncation - step,
    })
}

/// Dispatch on the spec's family.
pub fn transform(
    spec: &SurrogateSpec,
    t: f64,
    options: &CurveOptions,
) -> Result<TransformResult, Error> {
    match spec.family {
        Family::Margin => transform_binary(spec, t, &options.solver),
        Family::CompSum => transform_comp_sum(spec, t, &options.solver),
        Family::Constrained => transform_constrained(spec, t, options.truncation, &options.solver),
    }
}

impl SolverOptions {
    pub fn outer_grid_points(&self) -> usize {
        512
    }
}

/// Options for curve sampling.
#[derive(Debug, Clone)]
pub struct CurveOptions {
    pub solver: SolverOptions,
    /// Truncation bound `A` for the constrained outer infimum.
    pub truncation: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            solver: SolverOptions::default(),
            truncation: 10.0,
        }
    }
}

/// One sampled point of a transformation curve. `value` is absent when the
/// point failed to evaluate; the error is recorded in `flag`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformSample {
    pub t: f64,
    #[serde(rename = "T")]
    pub value: Option<f64>,
    pub a_star: Option<f64>,
    pub tau_star: Option<f64>,
    pub flag: String,
}

/// Solver metadata recorded with every curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverMeta {
    pub golden_tol: f64,
    pub newton_tol: f64,
    pub outer_grid_points: usize,
    pub truncation: f64,
}

/// A sampled transformation curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformCurve {
    pub schema: u32,
    pub spec_id: String,
    pub spec: SurrogateSpec,
    pub grid: String,
    pub samples: Vec<TransformSample>,
    pub meta: SolverMeta,
}

impl TransformCurve {
    pub fn valid_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples
            .iter()
            .filter_map(|s| s.value.map(|v| (s.t, v)))
    }

    /// CSV mirror with the header `t,T,a_star,tau_star`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,T,a_star,tau_star\n");
        for s in &self.samples {
            let fmt = |x: Option<f64>| x.map(|v| format!("{v}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.t,
                fmt(s.value),
                fmt(s.a_star),
                fmt(s.tau_star)
            ));
        }
        out
    }
}

/// Sample `T` on a grid of `t` values. Per-point failures become flagged
/// samples; the curve itself always comes back.
pub fn sample_curve(
    spec: &SurrogateSpec,
    t_grid: &[f64],
    options: &CurveOptions,
) -> Result<TransformCurve, Error> {
    spec.validate()?;
    if t_grid.is_empty() {
        return Err(Error::Precondition("t grid must be non-empty".into()));
    }
    if !t_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Precondition(
            "t grid must be strictly increasing".into(),
        ));
    }
    if t_grid[0] <= 0.0 || *t_grid.last().unwrap() > 1.0 {
        return Err(Error::Precondition("t grid must lie in (0, 1]".into()));
    }
    let samples = t_grid
        .iter()
        .map(|&t| match transform(spec, t, options) {
            Ok(r) => TransformSample {
                t,
                value: Some(r.value),
                a_star: r.inner_minimizer.is_finite().then_some(r.inner_minimizer),
                tau_star: r.outer_tau,
                flag: if r.limit {
                    "limit".into()
                } else if r.truncation_suspect {
                    "truncation-suspect".into()
                } else {
                    "ok".into()
                },
            },
            Err(e) => TransformSample {
                t,
                value: None,
                a_star: None,
                tau_star: None,
                flag: format!("error: {e}"),
            },
        })
        .collect();
    Ok(TransformCurve {
        schema: 1,
        spec_id: spec.id(),
        spec: spec.clone(),
        grid: format!(
            "explicit:{}..{}:{}",
            t_grid[0],
            t_grid.last().unwrap(),
            t_grid.len()
        ),
        samples,
        meta: SolverMeta {
            golden_tol: options.solver.golden_tol,
            newton_tol: options.solver.newton_tol,
            outer_grid_points: options.solver.outer_grid_points(),
            truncation: options.truncation,
        },
    })
}
