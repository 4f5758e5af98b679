//! End-to-end verification of estimation-error bounds on exact instances.
//!
//! The inequality under test, for a target zero-one loss and a surrogate
//! with bound function `Gamma`, is
//!
//! ```text
//! E01(h) - E01*(H) + M01(H)  <=  Gamma( El(h) - El*(H) + Ml(H) ),
//! ```
//!
//! together with its split form `Gamma(El(h) - El*(H)) + Gamma(Ml(H))`
//! (never smaller, by sub-additivity of concave `Gamma`). All terms are
//! exact finite sums over a discrete instance and an explicit hypothesis
//! list.
//!
//! The inequality holds for hypothesis sets whose per-point score images are
//! rich enough to attain the pointwise surrogate optimum; an arbitrary
//! finite list violates it (see `bound_fails_without_pointwise_optimum`
//! below for a two-hypothesis counterexample). The fuzz generator therefore
//! appends the per-point optimal hypothesis to every random draw, which
//! restores the guarantee while leaving the checked hypotheses arbitrary.
//!
//! The generalization-bound workflow estimates the empirical Rademacher
//! complexity of the loss class on a sample, exactly by enumerating all sign
//! vectors for small samples, or by Monte Carlo beyond that, and assembles
//!
//! ```text
//! Gamma( 4 R + 2 B sqrt(log(2/delta) / (2m)) + Ml(H) ) - M01(H).
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gamma::{gamma_of, GammaForm};
use crate::instance::{
    conditional_error, expected_error, expected_zero_one, DiscreteInstance, HypothesisSet,
    ScoreTable, SupportPoint,
};
use crate::mingap::zero_one_gap_terms;
use crate::phi::{eval_loss, Family, Phi, SurrogateSpec};
use crate::pointwise::bayes_optimal_row;

pub const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCheck {
    pub instance_id: String,
    pub spec_id: String,
    pub hypothesis_id: usize,
    /// `E01(h) - E01*(H) + M01(H)`
    pub lhs: f64,
    /// `El(h) - El*(H) + Ml(H)`, the argument passed to `Gamma`.
    pub rhs_arg: f64,
    /// `Gamma(El(h) - El*(H) + Ml(H))`
    pub rhs: f64,
    /// `Gamma(El(h) - El*(H)) + Gamma(Ml(H))`
    pub rhs_split: f64,
    pub slack: f64,
}

/// Evaluate both sides of the bound for one hypothesis of an explicit list.
pub fn check_bound(
    instance: &DiscreteInstance,
    hset: &HypothesisSet,
    h_index: usize,
    spec: &SurrogateSpec,
    gamma: &GammaForm,
) -> Result<BoundCheck, Error> {
    instance.validate()?;
    spec.validate()?;
    hset.validate(instance, spec.family)?;
    let tables = match hset {
        HypothesisSet::ExplicitList { tables, .. } => tables,
        _ => {
            return Err(Error::Precondition(
                "bound checks need an explicit hypothesis list".into(),
            ))
        }
    };
    if h_index >= tables.len() {
        return Err(Error::Precondition(format!(
            "hypothesis index {h_index} out of range"
        )));
    }
    if gamma.spec_id != spec.id() {
        return Err(Error::Precondition(format!(
            "bound function `{}` does not match spec `{}`",
            gamma.spec_id,
            spec.id()
        )));
    }

    let (zo_best, zo_gap) = zero_one_gap_terms(instance, tables, spec.family);
    let e01 = expected_zero_one(instance, &tables[h_index], spec.family);
    let lhs = e01 - zo_best + zo_gap;

    let mut sur_best = f64::INFINITY;
    for t in tables {
        sur_best = sur_best.min(expected_error(spec, instance, t)?);
    }
    let mut sur_exp_inf = 0.0;
    for (i, pt) in instance.points.iter().enumerate() {
        let mut c = f64::INFINITY;
        for t in tables {
            c = c.min(conditional_error(spec, &t[i], &pt.conditional)?);
        }
        sur_exp_inf += pt.weight * c;
    }
    let sur_gap = sur_best - sur_exp_inf;
    let e_l = expected_error(spec, instance, &tables[h_index])?;
    let estimation = e_l - sur_best;

    let rhs_arg = (estimation + sur_gap).max(0.0);
    let rhs = gamma.value(rhs_arg);
    let rhs_split = gamma.value(estimation.max(0.0)) + gamma.value(sur_gap.max(0.0));
    Ok(BoundCheck {
        instance_id: format!("m={},n={}", instance.m(), instance.n),
        spec_id: spec.id(),
        hypothesis_id: h_index,
        lhs,
        rhs_arg,
        rhs,
        rhs_split,
        slack: rhs - lhs,
    })
}

/// Reproduction payload for a fuzz violation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub draw: u64,
    pub spec_id: String,
    pub hypothesis_id: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub instance: DiscreteInstance,
    pub tables: Vec<ScoreTable>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub schema: u32,
    pub seed: u64,
    pub draws: u64,
    pub checks: u64,
    pub violations: Vec<Violation>,
    pub min_slack: f64,
    /// Histogram of lhs/rhs over checks with rhs > 1e-12, in ten buckets
    /// [0, 0.1), ..., [0.9, 1.0]; ratios near one are tight checks.
    pub tightness_histogram: [u64; 10],
    /// Within every draw, a larger `Gamma` argument never produced a smaller
    /// right-hand side.
    pub monotone_gamma_ok: bool,
    pub per_family_checks: Vec<(String, u64)>,
}

/// Spec pool for fuzzing: every catalog entry with a bound function.
fn fuzz_specs(families: &[Family], n: usize) -> Vec<SurrogateSpec> {
    let mut specs = Vec::new();
    for family in families {
        match family {
            Family::Margin => {
                for phi in [
                    Phi::Exponential,
                    Phi::Logistic,
                    Phi::SquaredHinge,
                    Phi::Hinge,
                ] {
                    specs.push(SurrogateSpec::margin(phi));
                }
            }
            Family::CompSum => {
                for phi in [Phi::NegLog, Phi::SumExpRatio, Phi::MaeLinear] {
                    specs.push(SurrogateSpec::comp_sum(phi, n));
                }
                specs.push(SurrogateSpec::comp_sum_power(1.5, n));
            }
            Family::Constrained => {
                for phi in [
                    Phi::ConstrainedExp,
                    Phi::ConstrainedSquare,
                    Phi::ConstrainedSquaredHinge,
                    Phi::ConstrainedHinge,
                ] {
                    specs.push(SurrogateSpec::constrained(phi, n));
                }
            }
        }
    }
    specs
}

fn dirichlet(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| -(rng.gen_range(1e-12..1.0f64)).ln())
        .collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

const FUZZ_LAMBDA: f64 = 2.0;

fn random_instance(rng: &mut ChaCha8Rng, family: Family) -> DiscreteInstance {
    let m = rng.gen_range(1..=6);
    let n = if family == Family::Margin {
        2
    } else {
        rng.gen_range(2..=5)
    };
    let w = 1.0 / m as f64;
    let points = (0..m)
        .map(|_| SupportPoint {
            weight: w,
            conditional: dirichlet(rng, n),
        })
        .collect();
    DiscreteInstance {
        schema: Some(1),
        n,
        points,
    }
}

fn random_table(rng: &mut ChaCha8Rng, instance: &DiscreteInstance, family: Family) -> ScoreTable {
    let cols = if family == Family::Margin {
        1
    } else {
        instance.n
    };
    (0..instance.m())
        .map(|_| {
            let mut row: Vec<f64> = (0..cols)
                .map(|_| rng.gen_range(-FUZZ_LAMBDA..FUZZ_LAMBDA))
                .collect();
            if family == Family::Constrained {
                let mean = row.iter().sum::<f64>() / cols as f64;
                row.iter_mut().for_each(|s| *s -= mean);
            }
            row
        })
        .collect()
}

/// Per-point surrogate-optimal table; appending it to a random list restores
/// the bound's hypothesis-set condition.
fn optimal_table(spec: &SurrogateSpec, instance: &DiscreteInstance) -> Result<ScoreTable, Error> {
    instance
        .points
        .iter()
        .map(|pt| bayes_optimal_row(spec, &pt.conditional))
        .collect()
}

/// Randomized validity testing of the bound across the catalog.
///
/// Draws are deterministic given the seed (per-draw ChaCha streams), so the
/// summary is byte-identical across reruns and independent of scheduling.
pub fn fuzz_bounds(seed: u64, draws: u64, families: &[Family]) -> Result<FuzzSummary, Error> {
    let mut summary = FuzzSummary {
        schema: 1,
        seed,
        draws,
        checks: 0,
        violations: Vec::new(),
        min_slack: f64::INFINITY,
        tightness_histogram: [0; 10],
        monotone_gamma_ok: true,
        per_family_checks: families.iter().map(|f| (f.to_string(), 0)).collect(),
    };
    if draws == 0 {
        summary.min_slack = 0.0;
        return Ok(summary);
    }
    for draw in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(draw);
        let family = families[rng.gen_range(0..families.len())];
        let instance = random_instance(&mut rng, family);
        let specs = fuzz_specs(&[family], instance.n);
        let spec = specs[rng.gen_range(0..specs.len())].clone();
        let gamma = gamma_of(&spec)?;
        let k = rng.gen_range(1..=10usize);
        let mut tables: Vec<ScoreTable> = (0..k)
            .map(|_| random_table(&mut rng, &instance, family))
            .collect();
        tables.push(optimal_table(&spec, &instance)?);
        let hset = HypothesisSet::explicit(tables.clone());
        let mut arg_rhs: Vec<(f64, f64)> = Vec::with_capacity(tables.len());
        for h in 0..tables.len() {
            let chk = check_bound(&instance, &hset, h, &spec, &gamma)?;
            arg_rhs.push((chk.rhs_arg, chk.rhs));
            summary.checks += 1;
            if let Some(entry) = summary
                .per_family_checks
                .iter_mut()
                .find(|(f, _)| *f == family.to_string())
            {
                entry.1 += 1;
            }
            summary.min_slack = summary.min_slack.min(chk.slack);
            if chk.rhs > 1e-12 {
                let ratio = (chk.lhs / chk.rhs).clamp(0.0, 1.0 - f64::EPSILON);
                summary.tightness_histogram[(ratio * 10.0) as usize] += 1;
            }
            if chk.slack < -SLACK_TOL {
                summary.violations.push(Violation {
                    draw,
                    spec_id: chk.spec_id.clone(),
                    hypothesis_id: h,
                    lhs: chk.lhs,
                    rhs: chk.rhs,
                    slack: chk.slack,
                    instance: instance.clone(),
                    tables: tables.clone(),
                });
            }
        }
        arg_rhs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if arg_rhs.windows(2).any(|w| w[1].1 < w[0].1 - 1e-15) {
            summary.monotone_gamma_ok = false;
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RademacherMethod {
    ExactEnumeration,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RademacherEstimate {
    pub value: f64,
    pub method: RademacherMethod,
    pub trials: Option<u64>,
    pub std_error: Option<f64>,
    /// Loss upper bound over the instance support.
    pub b_loss: f64,
}

/// A labeled sample drawn from a discrete instance: indices into the
/// instance's support points plus labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledSample {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub items: Vec<SampleItem>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleItem {
    pub point: usize,
    pub label: usize,
}

pub const EXACT_ENUM_MAX_M: usize = 20;

/// Empirical Rademacher complexity of the loss class on a sample:
/// `E_sigma[ sup_k (1/m) sum_i sigma_i loss_k_i ]`.
///
/// Exact enumeration walks sign vectors in complement pairs, so a singleton
/// class sums exact negations and returns exactly zero.
pub fn rademacher_exact(losses: &[Vec<f64>]) -> f64 {
    let m = losses[0].len();
    assert!((1..=EXACT_ENUM_MAX_M).contains(&m));
    let half: u64 = 1 << (m - 1);
    let mut total = 0.0;
    for g in 0..half {
        let mut sup_pos = f64::NEG_INFINITY;
        let mut sup_neg = f64::NEG_INFINITY;
        for row in losses {
            let mut s = 0.0;
            for (i, &l) in row.iter().enumerate() {
                if g >> i & 1 == 1 {
                    s += l;
                } else {
                    s -= l;
                }
            }
            sup_pos = sup_pos.max(s);
            sup_neg = sup_neg.max(-s);
        }
        total += sup_pos + sup_neg;
    }
    total / (2.0 * half as f64) / m as f64
}

/// Monte Carlo estimate with standard error.
pub fn rademacher_monte_carlo(losses: &[Vec<f64>], trials: u64, seed: u64) -> (f64, f64) {
    let m = losses[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..trials {
        let signs: Vec<f64> = (0..m)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let sup = losses
            .iter()
            .map(|row| row.iter().zip(&signs).map(|(&l, &s)| s * l).sum::<f64>() / m as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        sum += sup;
        sumsq += sup * sup;
    }
    let mean = sum / trials as f64;
    let var = (sumsq / trials as f64 - mean * mean).max(0.0);
    (mean, (var / trials as f64).sqrt())
}

fn loss_matrix(
    spec: &SurrogateSpec,
    tables: &[ScoreTable],
    sample: &LabeledSample,
) -> Result<Vec<Vec<f64>>, Error> {
    tables
        .iter()
        .map(|t| {
            sample
                .items
                .iter()
                .map(|it| eval_loss(spec, &t[it.point], it.label))
                .collect::<Result<Vec<f64>, Error>>()
        })
        .collect()
}

/// Loss upper bound over the instance support (hypotheses x points x labels
/// of positive conditional probability).
fn loss_upper_bound(
    spec: &SurrogateSpec,
    instance: &DiscreteInstance,
    tables: &[ScoreTable],
) -> Result<f64, Error> {
    let mut b: f64 = 0.0;
    for t in tables {
        for (i, pt) in instance.points.iter().enumerate() {
            for (y, &py) in pt.conditional.iter().enumerate() {
                if py > 0.0 {
                    b = b.max(eval_loss(spec, &t[i], y)?);
                }
            }
        }
    }
    Ok(b)
}

/// Assemble the generalization bound from the empirical complexity estimate:
/// `Gamma(4 R + 2 B sqrt(log(2/delta)/(2m)) + Ml(H)) - M01(H)`.
pub fn rademacher_bound(
    instance: &DiscreteInstance,
    sample: &LabeledSample,
    hset: &HypothesisSet,
    spec: &SurrogateSpec,
    gamma: &GammaForm,
    delta: f64,
    mc_seed: u64,
) -> Result<(RademacherEstimate, f64), Error> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    instance.validate()?;
    hset.validate(instance, spec.family)?;
    let tables = match hset {
        HypothesisSet::ExplicitList { tables, .. } => tables,
        _ => {
            return Err(Error::Precondition(
                "the bound needs an explicit hypothesis list".into(),
            ))
        }
    };
    if sample.items.is_empty() {
        return Err(Error::Precondition("sample must be non-empty".into()));
    }
    for it in &sample.items {
        if it.point >= instance.m() || it.label >= instance.n {
            return Err(Error::Precondition(format!(
                "sample item (point {}, label {}) out of range",
                it.point, it.label
            )));
        }
    }
    let m = sample.items.len();
    let losses = loss_matrix(spec, tables, sample)?;
    let estimate = if m <= EXACT_ENUM_MAX_M {
        RademacherEstimate {
            value: rademacher_exact(&losses),
            method: RademacherMethod::ExactEnumeration,
            trials: None,
            std_error: None,
            b_loss: loss_upper_bound(spec, instance, tables)?,
        }
    } else {
        let (value, se) = rademacher_monte_carlo(&losses, 10_000, mc_seed);
        RademacherEstimate {
            value,
            method: RademacherMethod::MonteCarlo,
            trials: Some(10_000),
            std_error: Some(se),
            b_loss: loss_upper_bound(spec, instance, tables)?,
        }
    };

    let hset_ref = HypothesisSet::explicit(tables.clone());
    let sur_gap = crate::mingap::compute_gap(instance, &hset_ref, spec)?.mingap;
    let (_, zo_gap) = zero_one_gap_terms(instance, tables, spec.family);
    let dev = 2.0 * estimate.b_loss * ((2.0 / delta).ln() / (2.0 * m as f64)).sqrt();
    let bound = gamma.value((4.0 * estimate.value + dev + sur_gap).max(0.0)) - zo_gap;
    Ok((estimate, bound))
}

/// Draw an i.i.d. sample of size `m` from the instance distribution.
pub fn draw_sample(instance: &DiscreteInstance, m: usize, rng: &mut ChaCha8Rng) -> LabeledSample {
    let items = (0..m)
        .map(|_| {
            let mut u: f64 = rng.gen();
            let mut point = instance.m() - 1;
            for (i, pt) in instance.points.iter().enumerate() {
                if u < pt.weight {
                    point = i;
                    break;
                }
                u -= pt.weight;
            }
            let mut v: f64 = rng.gen();
            let c = &instance.points[point].conditional;
            let mut label = instance.n - 1;
            for (y, &py) in c.iter().enumerate() {
                if v < py {
                    label = y;
                    break;
                }
                v -= py;
            }
            SampleItem { point, label }
        })
        .collect();
    LabeledSample {
        schema: Some(1),
        items,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResampleReport {
    pub resamples: u64,
    pub failures: u64,
    pub failure_rate: f64,
    /// Monte Carlo estimate of the distributional complexity: the mean of
    /// the per-sample empirical complexities.
    pub complexity_estimate: f64,
}

/// Failure frequency of the empirical-minimizer concentration step
/// `El(h_S) - El*(H) <= 4 R_m + 2 B sqrt(log(2/delta)/(2m))` over repeated
/// samples. The statement is probabilistic, so it is tested by rate, not
/// pointwise.
pub fn resample_failure_rate(
    instance: &DiscreteInstance,
    hset: &HypothesisSet,
    spec: &SurrogateSpec,
    m: usize,
    delta: f64,
    resamples: u64,
    seed: u64,
) -> Result<ResampleReport, Error> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let tables = match hset {
        HypothesisSet::ExplicitList { tables, .. } => tables,
        _ => {
            return Err(Error::Precondition(
                "resampling needs an explicit hypothesis list".into(),
            ))
        }
    };
    let b = loss_upper_bound(spec, instance, tables)?;
    let mut true_errors = Vec::with_capacity(tables.len());
    for t in tables {
        true_errors.push(expected_error(spec, instance, t)?);
    }
    let best_true = true_errors.iter().copied().fold(f64::INFINITY, f64::min);

    let mut rhats = Vec::with_capacity(resamples as usize);
    let mut excesses = Vec::with_capacity(resamples as usize);
    for r in 0..resamples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r);
        let sample = draw_sample(instance, m, &mut rng);
        let losses = loss_matrix(spec, tables, &sample)?;
        // Empirical minimizer; ties resolve to the smallest index.
        let mut best_k = 0;
        let mut best_emp = f64::INFINITY;
        for (k, row) in losses.iter().enumerate() {
            let emp = row.iter().sum::<f64>() / m as f64;
            if emp < best_emp {
                best_emp = emp;
                best_k = k;
            }
        }
        rhats.push(if m <= EXACT_ENUM_MAX_M {
            rademacher_exact(&losses)
        } else {
            rademacher_monte_carlo(&losses, 10_000, seed ^ r).0
        });
        excesses.push(true_errors[best_k] - best_true);
    }
    let complexity = rhats.iter().sum::<f64>() / resamples.max(1) as f64;
    let dev = 2.0 * b * ((2.0 / delta).ln() / (2.0 * m as f64)).sqrt();
    let threshold = 4.0 * complexity + dev;
    let failures = excesses.iter().filter(|&&e| e > threshold).count() as u64;
    Ok(ResampleReport {
        resamples,
        failures,
        failure_rate: failures as f64 / resamples.max(1) as f64,
        complexity_estimate: complexity,
    })
}
