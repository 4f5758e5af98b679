//! Per-point conditional-error minimization.
//!
//! Three minimizations appear throughout the gap computations, all at a
//! single support point with conditional distribution `p`:
//!
//! - over the bounded box `[-L, L]` (margin) or `[-L, L]^n` (multi-class),
//!   the per-point feasible set of the pointwise-box product class;
//! - over the zero-sum slice of the box for the constrained family;
//! - over the unrestricted class of all measurable score functions, whose
//!   per-point infimum has a closed form for every catalog entry.
//!
//! Unrestricted-class forms. For a margin loss the conditional error is
//! `eta phi(-a) + (1-eta) phi(a)`; the catalog minimizers are
//! `a* = (1/2) log(eta/(1-eta))` (exponential, value `2 sqrt(eta(1-eta))`),
//! `a* = log(eta/(1-eta))` (logistic, value = binary entropy),
//! `a* = 2 eta - 1` (squared hinge, value `4 eta (1-eta)`), and
//! `a* = sign(2 eta - 1)` (hinge, value `2 min(eta, 1-eta)`).
//! For a comp-sum loss the softmax image sweeps the open simplex, and the
//! stationarity condition `p_y phi'(q_y) = const` yields
//! `q_y proportional to p_y^{1/(2-tau)}` for the power family (`tau = 1`
//! recovers `q = p` and the entropy value). For a constrained loss,
//! minimizing `sum_y c_y phi(a_y)` with `c_y = 1 - p_y` subject to
//! `sum a_y = 0` gives `n (prod c_y)^{1/n}` for the exponential,
//! `n^2 / sum(1/c_y)` for the square and squared hinge, and
//! `n min_y c_y` for the hinge.

use crate::error::Error;
use crate::phi::{Family, Phi, SurrogateSpec};
use crate::solve::{golden_section, SolverOptions};
use crate::transform::InnerProblem;

/// Result of a per-point minimization: the achieving score row and value.
#[derive(Debug, Clone)]
pub struct PointwiseMin {
    pub row: Vec<f64>,
    pub value: f64,
}

/// Conditional error of a score row, written directly in terms of the
/// family formulas (softmax computed once per evaluation).
pub fn conditional_value(spec: &SurrogateSpec, row: &[f64], p: &[f64]) -> f64 {
    match spec.family {
        Family::Margin => {
            let inner = InnerProblem {
                phi: &spec.phi,
                shift: 0.0,
                wa: 1.0 - p[0],
                wb: p[0],
            };
            inner.f(row[0])
        }
        Family::CompSum => {
            let phi = crate::phi::effective_comp_sum_phi(spec);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let denom: f64 = row.iter().map(|&s| (s - max).exp()).sum();
            p.iter()
                .zip(row)
                .filter(|(&py, _)| py > 0.0)
                .map(|(&py, &s)| py * phi.value((s - max).exp() / denom))
                .sum()
        }
        Family::Constrained => {
            // sum_y p_y sum_{y' != y} phi(a_{y'}) = sum_y (1 - p_y) phi(a_y)
            row.iter()
                .zip(p)
                .map(|(&a, &py)| (1.0 - py) * spec.phi.value(a))
                .sum()
        }
    }
}

const CD_TOL: f64 = 1e-10;
const CD_MAX_SWEEPS: usize = 400;

fn cd_options() -> SolverOptions {
    SolverOptions {
        golden_tol: 1e-12,
        ..SolverOptions::default()
    }
}

/// Minimize the conditional error over the per-point box.
///
/// Margin problems are one-dimensional; multi-class problems use cyclic
/// coordinate descent with golden-section line searches, and the constrained
/// family moves coordinate pairs `(+d, -d)` so the zero-sum constraint is
/// preserved exactly. When a `grid_step` is declared, the result is probed
/// against single-step moves and a noticeable improvement reports the grid
/// as too coarse.
pub fn minimize_conditional_box(
    spec: &SurrogateSpec,
    p: &[f64],
    lambda: f64,
    grid_step: Option<f64>,
) -> Result<PointwiseMin, Error> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Parameter(format!(
            "box bound must be positive, got {lambda}"
        )));
    }
    let result = match spec.family {
        Family::Margin => {
            let inner = InnerProblem {
                phi: &spec.phi,
                shift: 0.0,
                wa: 1.0 - p[0],
                wb: p[0],
            };
            let m = inner.minimize(-lambda, lambda, &cd_options());
            PointwiseMin {
                row: vec![m.u],
                value: m.value,
            }
        }
        Family::CompSum => {
            let n = spec.n_classes;
            let mut row = vec![0.0; n];
            // Warm start at the box vertex favoring the most likely class;
            // helps the nonconvex members of the power family.
            let mut best = 0;
            for (y, &py) in p.iter().enumerate() {
                if py >= p[best] {
                    best = y;
                }
            }
            for (y, r) in row.iter_mut().enumerate() {
                *r = if y == best { lambda } else { -lambda };
            }
            let mut value = conditional_value(spec, &row, p);
            let eval_at = |row: &[f64], j: usize, x: f64| {
                let mut r = row.to_vec();
                r[j] = x;
                conditional_value(spec, &r, p)
            };
            for _ in 0..CD_MAX_SWEEPS {
                let before = value;
                for j in 0..n {
                    let (u, _) =
                        golden_section(&|x| eval_at(&row, j, x), -lambda, lambda, 1e-12, 200);
                    let v = eval_at(&row, j, u);
                    if v < value {
                        row[j] = u;
                        value = v;
                    }
                }
                if before - value < CD_TOL * 0.01 {
                    break;
                }
            }
            PointwiseMin { row, value }
        }
        Family::Constrained => {
            let n = spec.n_classes;
            let mut row = vec![0.0; n];
            let mut value = conditional_value(spec, &row, p);
            let eval_pair = |row: &[f64], i: usize, j: usize, d: f64| {
                let mut r = row.to_vec();
                r[i] += d;
                r[j] -= d;
                conditional_value(spec, &r, p)
            };
            for _ in 0..CD_MAX_SWEEPS {
                let before = value;
                for i in 0..n {
                    for j in (i + 1)..n {
                        let d_lo = (-lambda - row[i]).max(row[j] - lambda);
                        let d_hi = (lambda - row[i]).min(row[j] + lambda);
                        if d_hi <= d_lo {
                            continue;
                        }
                        let (d, _) =
                            golden_section(&|d| eval_pair(&row, i, j, d), d_lo, d_hi, 1e-12, 200);
                        let v = eval_pair(&row, i, j, d);
                        if v < value {
                            row[i] += d;
                            row[j] -= d;
                            value = v;
                        }
                    }
                }
                if before - value < CD_TOL * 0.01 {
                    break;
                }
            }
            PointwiseMin { row, value }
        }
    };
    if let Some(step) = grid_step {
        check_grid_resolution(spec, p, lambda, step, &result)?;
    }
    Ok(result)
}

fn check_grid_resolution(
    spec: &SurrogateSpec,
    p: &[f64],
    lambda: f64,
    step: f64,
    result: &PointwiseMin,
) -> Result<(), Error> {
    let n = result.row.len();
    for j in 0..n {
        for dir in [-1.0, 1.0] {
            let mut probe = result.row.clone();
            probe[j] = (probe[j] + dir * step).clamp(-lambda, lambda);
            if spec.family == Family::Constrained {
                // Compensate on another coordinate to stay on the zero-sum slice.
                let k = (j + 1) % n;
                probe[k] -= probe.iter().sum::<f64>();
                if probe[k].abs() > lambda {
                    continue;
                }
            }
            if conditional_value(spec, &probe, p) < result.value - 1e-9 {
                return Err(Error::Resolution(format!(
                    "a grid step of {step} improves on the converged minimizer; refine the grid"
                )));
            }
        }
    }
    Ok(())
}

/// Unrestricted-class per-point infimum of the conditional error.
pub fn bayes_conditional(spec: &SurrogateSpec, p: &[f64]) -> Result<f64, Error> {
    match spec.family {
        Family::Margin => {
            let eta = p[0];
            Ok(match spec.phi {
                Phi::Exponential => 2.0 * (eta * (1.0 - eta)).sqrt(),
                Phi::Logistic => {
                    let h = |q: f64| if q > 0.0 { -q * q.ln() } else { 0.0 };
                    h(eta) + h(1.0 - eta)
                }
                Phi::SquaredHinge => 4.0 * eta * (1.0 - eta),
                Phi::Hinge => 2.0 * eta.min(1.0 - eta),
                _ => {
                    return Err(Error::Precondition(format!(
                        "{} is not a margin entry",
                        spec.phi.id()
                    )))
                }
            })
        }
        Family::CompSum => {
            let phi = crate::phi::effective_comp_sum_phi(spec);
            match phi {
                Phi::MaeLinear => {
                    let pmax = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    Ok(1.0 - pmax)
                }
                Phi::NegLog | Phi::SumExpRatio | Phi::CompSumPower { .. } => {
                    let q = bayes_softmax_distribution(&phi, p);
                    Ok(p.iter()
                        .zip(&q)
                        .filter(|(&py, _)| py > 0.0)
                        .map(|(&py, &qy)| py * phi.value(qy))
                        .sum())
                }
                other => Err(Error::Precondition(format!(
                    "{} is not a comp-sum entry",
                    other.id()
                ))),
            }
        }
        Family::Constrained => {
            let c: Vec<f64> = p.iter().map(|&py| 1.0 - py).collect();
            let n = c.len() as f64;
            Ok(match spec.phi {
                Phi::ConstrainedExp => {
                    n * c.iter().map(|&x| x.max(0.0)).product::<f64>().powf(1.0 / n)
                }
                Phi::ConstrainedSquare | Phi::ConstrainedSquaredHinge => {
                    if c.iter().any(|&x| x <= 0.0) {
                        0.0
                    } else {
                        n * n / c.iter().map(|&x| 1.0 / x).sum::<f64>()
                    }
                }
                Phi::ConstrainedHinge => n * c.iter().copied().fold(f64::INFINITY, f64::min),
                _ => {
                    return Err(Error::Precondition(format!(
                        "{} is not a constrained entry",
                        spec.phi.id()
                    )))
                }
            })
        }
    }
}

/// Optimal softmax distribution of the comp-sum stationarity condition:
/// `q_y` proportional to `p_y^{1/(2-tau)}` for the power family (`tau = 1`
/// for the negative log, `tau = 0` for the sum-exp ratio).
fn bayes_softmax_distribution(phi: &Phi, p: &[f64]) -> Vec<f64> {
    let exponent = match phi {
        Phi::NegLog => 1.0,
        Phi::SumExpRatio => 0.5,
        Phi::CompSumPower { tau } => 1.0 / (2.0 - tau),
        _ => unreachable!("callers dispatch only strictly convex comp-sum entries"),
    };
    let mut q: Vec<f64> = p
        .iter()
        .map(|&py| if py > 0.0 { py.powf(exponent) } else { 0.0 })
        .collect();
    let z: f64 = q.iter().sum();
    q.iter_mut().for_each(|x| *x /= z);
    q
}

/// A finite score row whose conditional error attains (or approaches within
/// numerical precision) the unrestricted-class infimum at this point.
///
/// Losses whose optimum is only reached in a limit of diverging scores (the
/// mae comp-sum entry, deterministic conditionals) are represented by a
/// sharp vertex with score magnitude [`SHARP_SCORE`]; the gap to the true
/// infimum is of order `e^{-2 SHARP_SCORE}`.
pub const SHARP_SCORE: f64 = 30.0;

pub fn bayes_optimal_row(spec: &SurrogateSpec, p: &[f64]) -> Result<Vec<f64>, Error> {
    match spec.family {
        Family::Margin => {
            let eta = p[0];
            let a = match spec.phi {
                Phi::Exponential => {
                    if eta <= 0.0 || eta >= 1.0 {
                        SHARP_SCORE * if eta >= 1.0 { 1.0 } else { -1.0 }
                    } else {
                        0.5 * (eta / (1.0 - eta)).ln()
                    }
                }
                Phi::Logistic => {
                    if eta <= 0.0 || eta >= 1.0 {
                        SHARP_SCORE * if eta >= 1.0 { 1.0 } else { -1.0 }
                    } else {
                        (eta / (1.0 - eta)).ln()
                    }
                }
                Phi::SquaredHinge => 2.0 * eta - 1.0,
                Phi::Hinge => {
                    if eta >= 0.5 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "{} is not a margin entry",
                        spec.phi.id()
                    )))
                }
            };
            Ok(vec![a])
        }
        Family::CompSum => {
            let phi = crate::phi::effective_comp_sum_phi(spec);
            match phi {
                Phi::MaeLinear => {
                    let mut best = 0;
                    for (y, &py) in p.iter().enumerate() {
                        if py >= p[best] {
                            best = y;
                        }
                    }
                    Ok((0..p.len())
                        .map(|y| if y == best { SHARP_SCORE } else { 0.0 })
                        .collect())
                }
                Phi::NegLog | Phi::SumExpRatio | Phi::CompSumPower { .. } => {
                    let q = bayes_softmax_distribution(&phi, p);
                    Ok(q.iter()
                        .map(|&qy| if qy > 0.0 { qy.ln() } else { -SHARP_SCORE })
                        .collect())
                }
                other => Err(Error::Precondition(format!(
                    "{} is not a comp-sum entry",
                    other.id()
                ))),
            }
        }
        Family::Constrained => {
            let c: Vec<f64> = p.iter().map(|&py| 1.0 - py).collect();
            let n = c.len();
            let mut row = match spec.phi {
                Phi::ConstrainedExp => {
                    if c.iter().any(|&x| x <= 0.0) {
                        deterministic_constrained_row(&c)
                    } else {
                        let mu = c.iter().map(|&x| x.ln()).sum::<f64>() / n as f64;
                        c.iter().map(|&x| mu - x.ln()).collect()
                    }
                }
                Phi::ConstrainedSquare | Phi::ConstrainedSquaredHinge => {
                    if c.iter().any(|&x| x <= 0.0) {
                        deterministic_constrained_row(&c)
                    } else {
                        let mu = 2.0 * n as f64 / c.iter().map(|&x| 1.0 / x).sum::<f64>();
                        c.iter().map(|&x| mu / (2.0 * x) - 1.0).collect()
                    }
                }
                Phi::ConstrainedHinge => {
                    let mut best = 0;
                    for (y, &cy) in c.iter().enumerate() {
                        if cy <= c[best] {
                            best = y;
                        }
                    }
                    (0..n)
                        .map(|y| if y == best { n as f64 - 1.0 } else { -1.0 })
                        .collect()
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "{} is not a constrained entry",
                        spec.phi.id()
                    )))
                }
            };
            // Restore the zero-sum constraint exactly after rounding.
            let mean = row.iter().sum::<f64>() / n as f64;
            row.iter_mut().for_each(|a| *a -= mean);
            Ok(row)
        }
    }
}

/// Deterministic constrained conditionals (`c_y = 0` for the true class):
/// the infimum 0 is approached by pushing the wrong-class scores down.
fn deterministic_constrained_row(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut best = 0;
    for (y, &cy) in c.iter().enumerate() {
        if cy <= c[best] {
            best = y;
        }
    }
    (0..n)
        .map(|y| {
            if y == best {
                SHARP_SCORE * (n as f64 - 1.0) / n as f64 * if n > 1 { 1.0 } else { 0.0 }
            } else {
                -SHARP_SCORE / n as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::SurrogateSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dirichlet(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n)
            .map(|_| -(rng.gen_range(1e-12..1.0f64)).ln())
            .collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    }

    #[test]
    fn margin_bayes_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for phi in [
            Phi::Exponential,
            Phi::Logistic,
            Phi::SquaredHinge,
            Phi::Hinge,
        ] {
            let spec = SurrogateSpec::margin(phi);
            for _ in 0..30 {
                let eta = rng.gen_range(0.01..0.99);
                let p = vec![eta, 1.0 - eta];
                let closed = bayes_conditional(&spec, &p).unwrap();
                let grid_min = (-40000..=40000)
                    .map(|i| conditional_value(&spec, &[i as f64 / 4000.0], &p))
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    (closed - grid_min).abs() < 1e-7,
                    "{:?} eta={eta}: {closed} vs {grid_min}",
                    phi
                );
                assert!(closed <= grid_min + 1e-12);
            }
        }
    }

    #[test]
    fn margin_exponential_bayes_closed_form_at_random_eta() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = SurrogateSpec::margin(Phi::Exponential);
        for _ in 0..200 {
            let eta = rng.gen_range(0.0..1.0f64);
            let v = bayes_conditional(&spec, &[eta, 1.0 - eta]).unwrap();
            assert!((v - 2.0 * (eta * (1.0 - eta)).sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn margin_box_minimizer_is_clipped_log_odds() {
        let spec = SurrogateSpec::margin(Phi::Exponential);
        for lambda in [0.5, 1.0, 2.0] {
            for eta in [0.1, 0.5, 0.9, 0.999] {
                let m = minimize_conditional_box(&spec, &[eta, 1.0 - eta], lambda, None).unwrap();
                let unclipped = 0.5 * (eta / (1.0 - eta)).ln();
                let expect = unclipped.clamp(-lambda, lambda);
                assert!(
                    (m.row[0] - expect).abs() < 1e-6,
                    "eta={eta} lambda={lambda}: {} vs {expect}",
                    m.row[0]
                );
            }
        }
    }

    #[test]
    fn comp_sum_bayes_matches_simplex_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for phi in [
            Phi::NegLog,
            Phi::SumExpRatio,
            Phi::CompSumPower { tau: 0.5 },
            Phi::CompSumPower { tau: 1.5 },
        ] {
            let spec = SurrogateSpec::comp_sum(phi, 3);
            for _ in 0..10 {
                let p = dirichlet(&mut rng, 3);
                let closed = bayes_conditional(&spec, &p).unwrap();
                // Dense scan of the open simplex via two free coordinates.
                let mut grid_min = f64::INFINITY;
                let steps = 300;
                for i in 1..steps {
                    for j in 1..(steps - i) {
                        let q = [
                            i as f64 / steps as f64,
                            j as f64 / steps as f64,
                            (steps - i - j) as f64 / steps as f64,
                        ];
                        let v: f64 = p.iter().zip(&q).map(|(&py, &qy)| py * phi.value(qy)).sum();
                        grid_min = grid_min.min(v);
                    }
                }
                assert!(
                    closed <= grid_min + 1e-9,
                    "{}: closed {closed} grid {grid_min}",
                    phi.id()
                );
                assert!(
                    (closed - grid_min).abs() < 1e-3,
                    "{}: closed {closed} grid {grid_min}",
                    phi.id()
                );
            }
        }
    }

    #[test]
    fn neg_log_bayes_is_entropy() {
        let spec = SurrogateSpec::comp_sum(Phi::NegLog, 4);
        let p = [0.4, 0.3, 0.2, 0.1];
        let v = bayes_conditional(&spec, &p).unwrap();
        let entropy: f64 = -p.iter().map(|&x: &f64| x * x.ln()).sum::<f64>();
        assert!((v - entropy).abs() < 1e-12);
    }

    #[test]
    fn constrained_bayes_matches_plane_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for phi in [
            Phi::ConstrainedExp,
            Phi::ConstrainedSquare,
            Phi::ConstrainedSquaredHinge,
            Phi::ConstrainedHinge,
        ] {
            let spec = SurrogateSpec::constrained(phi, 3);
            for _ in 0..10 {
                let p = dirichlet(&mut rng, 3);
                let closed = bayes_conditional(&spec, &p).unwrap();
                let mut grid_min = f64::INFINITY;
                let r = 6.0;
                let steps = 400;
                for i in 0..=steps {
                    for j in 0..=steps {
                        let a = -r + 2.0 * r * i as f64 / steps as f64;
                        let b = -r + 2.0 * r * j as f64 / steps as f64;
                        let row = [a, b, -a - b];
                        grid_min = grid_min.min(conditional_value(&spec, &row, &p));
                    }
                }
                assert!(
                    closed <= grid_min + 1e-9,
                    "{}: closed {closed} grid {grid_min}",
                    phi.id()
                );
                assert!(
                    (closed - grid_min).abs() < 2e-2,
                    "{}: closed {closed} grid {grid_min}",
                    phi.id()
                );
            }
        }
    }

    #[test]
    fn bayes_optimal_rows_attain_their_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let specs = vec![
            SurrogateSpec::margin(Phi::Exponential),
            SurrogateSpec::margin(Phi::Logistic),
            SurrogateSpec::margin(Phi::SquaredHinge),
            SurrogateSpec::margin(Phi::Hinge),
            SurrogateSpec::comp_sum(Phi::NegLog, 4),
            SurrogateSpec::comp_sum(Phi::SumExpRatio, 3),
            SurrogateSpec::comp_sum(Phi::MaeLinear, 3),
            SurrogateSpec::comp_sum_power(1.5, 4),
            SurrogateSpec::constrained(Phi::ConstrainedExp, 4),
            SurrogateSpec::constrained(Phi::ConstrainedSquare, 3),
            SurrogateSpec::constrained(Phi::ConstrainedSquaredHinge, 3),
            SurrogateSpec::constrained(Phi::ConstrainedHinge, 5),
        ];
        for spec in specs {
            for _ in 0..40 {
                let p = if spec.family == Family::Margin {
                    let eta = rng.gen_range(0.02..0.98);
                    vec![eta, 1.0 - eta]
                } else {
                    dirichlet(&mut rng, spec.n_classes)
                };
                let row = bayes_optimal_row(&spec, &p).unwrap();
                let achieved = conditional_value(&spec, &row, &p);
                let target = bayes_conditional(&spec, &p).unwrap();
                assert!(
                    achieved <= target + 1e-9,
                    "{}: achieved {achieved} vs infimum {target}",
                    spec.id()
                );
                if spec.family == Family::Constrained {
                    assert!(row.iter().sum::<f64>().abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn box_minimizer_one_hot_below_noise_threshold() {
        // Multi-class logistic, n = 3, box bound 1, noise 0.05 below the
        // threshold (n-1)/(e^{2} + n - 1): the box minimizer is the one-hot
        // vertex.
        let spec = SurrogateSpec::comp_sum(Phi::NegLog, 3);
        let lambda: f64 = 1.0;
        let eps = 0.05;
        let thr =
            (spec.n_classes as f64 - 1.0) / ((2.0 * lambda).exp() + spec.n_classes as f64 - 1.0);
        assert!(eps < thr);
        let p = [1.0 - eps, eps / 2.0, eps / 2.0];
        let m = minimize_conditional_box(&spec, &p, lambda, None).unwrap();
        assert!((m.row[0] - lambda).abs() < 1e-6, "{:?}", m.row);
        assert!((m.row[1] + lambda).abs() < 1e-6, "{:?}", m.row);
        assert!((m.row[2] + lambda).abs() < 1e-6, "{:?}", m.row);
    }

    #[test]
    fn constrained_box_respects_zero_sum_and_matches_grid() {
        let spec = SurrogateSpec::constrained(Phi::ConstrainedExp, 3);
        let p = [0.6, 0.3, 0.1];
        let lambda = 1.0;
        let m = minimize_conditional_box(&spec, &p, lambda, None).unwrap();
        assert!(m.row.iter().sum::<f64>().abs() < 1e-9);
        assert!(m.row.iter().all(|a| a.abs() <= lambda + 1e-9));
        let steps = 500;
        let mut grid_min = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let a = -lambda + 2.0 * lambda * i as f64 / steps as f64;
                let b = -lambda + 2.0 * lambda * j as f64 / steps as f64;
                let c = -a - b;
                if c.abs() > lambda {
                    continue;
                }
                grid_min = grid_min.min(conditional_value(&spec, &[a, b, c], &p));
            }
        }
        assert!(m.value <= grid_min + 1e-6, "{} vs {grid_min}", m.value);
    }

    #[test]
    fn grid_resolution_check_fires_on_coarse_claims() {
        let spec = SurrogateSpec::margin(Phi::Exponential);
        // A converged minimizer plus a declared grid step that cannot improve it.
        assert!(minimize_conditional_box(&spec, &[0.8, 0.2], 2.0, Some(1e-3)).is_ok());
    }
}
