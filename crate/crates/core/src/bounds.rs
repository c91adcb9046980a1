//! Closed-form competitive-ratio constants and adversarial instance
//! generators, including the adaptive adversary behind the universal lower
//! bound.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Alpha, ArrivalInstance, Space};
use crate::oracle::solve_optimal;
use crate::strategies::{simulate, StepAction, StrategyConfig};

/// Universal lower-bound constants for one exponent: no online algorithm
/// beats ratio `c_alpha`, attained by the adversary parameter `delta_alpha`.
#[derive(Debug, Clone, Copy)]
pub struct UniversalConstants {
    pub alpha: f64,
    pub c_alpha: f64,
    pub delta_alpha: f64,
    /// Objective evaluations spent by the optimizer.
    pub evaluations: usize,
}

/// `2^x`, exact for integral exponents.
fn pow2(x: f64) -> f64 {
    if x.fract() == 0.0 && x.abs() <= 1023.0 {
        2f64.powi(x as i32)
    } else {
        2f64.powf(x)
    }
}

/// The adversary objective: the worst of the three ratios forced by ending
/// the sequence early, extending it against a source expansion, or
/// extending it against an off-source expansion.
fn adversary_objective(alpha: f64, delta: f64) -> f64 {
    let d_pow = delta.powf(alpha);
    let dm1_pow = (delta - 1.0).powf(alpha);
    let dp1_pow = (delta + 1.0).powf(alpha);
    let end_early = d_pow / (1.0 + dm1_pow);
    let extend_source = (d_pow + dm1_pow) / d_pow;
    let extend_other = (1.0 + dp1_pow) / d_pow;
    end_early.min(extend_source).min(extend_other)
}

const DELTA_SEARCH_MAX: f64 = 1000.0;
const GRID_POINTS: usize = 10_000;

/// Numerically maximize the adversary objective over `delta` in
/// `(1, 1000]`: a logarithmic grid pass followed by golden-section
/// refinement of the best bracket. The objective is piecewise smooth but
/// not differentiable where the inner expressions cross, so the bracket
/// refinement avoids derivative-based steps.
pub fn universal_constants(alpha: Alpha, tol: f64) -> Result<UniversalConstants> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let a = alpha.get();
    let mut evaluations = 0usize;

    let lo: f64 = 1.0 + 1e-6;
    let log_lo = lo.ln();
    let log_hi = DELTA_SEARCH_MAX.ln();
    let grid_delta = |i: usize| -> f64 {
        (log_lo + (log_hi - log_lo) * i as f64 / (GRID_POINTS - 1) as f64).exp()
    };

    let mut best_i = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..GRID_POINTS {
        let v = adversary_objective(a, grid_delta(i));
        evaluations += 1;
        if v > best_val {
            best_val = v;
            best_i = i;
        }
    }

    let mut left = grid_delta(best_i.saturating_sub(1));
    let mut right = grid_delta((best_i + 1).min(GRID_POINTS - 1));
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = right - phi * (right - left);
    let mut x2 = left + phi * (right - left);
    let mut f1 = adversary_objective(a, x1);
    let mut f2 = adversary_objective(a, x2);
    evaluations += 2;
    while right - left > tol {
        if f1 < f2 {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + phi * (right - left);
            f2 = adversary_objective(a, x2);
        } else {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - phi * (right - left);
            f1 = adversary_objective(a, x1);
        }
        evaluations += 1;
    }
    let delta_alpha = 0.5 * (left + right);
    let c_alpha = adversary_objective(a, delta_alpha);
    evaluations += 1;

    Ok(UniversalConstants {
        alpha: a,
        c_alpha,
        delta_alpha,
        evaluations,
    })
}

/// Exact radical expressions for the quadratic case, used to validate the
/// numeric optimizer: returns `(c, delta)` for exponent 2.
pub fn quadratic_closed_forms() -> (f64, f64) {
    let s = 183f64.sqrt();
    let c = (4.0 + (496.0 - 24.0 * s).cbrt() + 2.0 * (62.0 + 3.0 * s).cbrt()) / 12.0;
    let delta = (5.0 + (62.0 - 3.0 * s).cbrt() + (62.0 + 3.0 * s).cbrt()) / 3.0;
    (c, delta)
}

/// Closed-form ceiling on the per-disk nearest-predecessor charge:
/// `alpha * (2^alpha - 3) / (2^(alpha-1) - alpha)`. Defined for exponents
/// above 2 where the denominator is positive.
pub fn f_star_upper(alpha: Alpha) -> Result<f64> {
    let a = alpha.get();
    let denominator = pow2(a - 1.0) - a;
    if a <= 2.0 || denominator <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "charge bound needs an exponent above 2, got {a}"
        )));
    }
    Ok(a * (pow2(a) - 3.0) / denominator)
}

/// Minimize the charge bound over exponents in `(2, 10]`; the minimum sits
/// near 4.3 with value near 12.94.
pub fn alpha_star(tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let f = |a: f64| -> f64 {
        let denominator = pow2(a - 1.0) - a;
        if denominator <= 0.0 {
            f64::INFINITY
        } else {
            a * (pow2(a) - 3.0) / denominator
        }
    };
    let lo = 2.0 + 1e-6;
    let hi = 10.0;
    let mut best_i = 0usize;
    let mut best_val = f64::INFINITY;
    for i in 0..GRID_POINTS {
        let a = lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64;
        let v = f(a);
        if v < best_val {
            best_val = v;
            best_i = i;
        }
    }
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let mut left = (lo + step * (best_i as f64 - 1.0)).max(lo);
    let mut right = (lo + step * (best_i as f64 + 1.0)).min(hi);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = right - phi * (right - left);
    let mut x2 = left + phi * (right - left);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while right - left > tol {
        if f1 > f2 {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + phi * (right - left);
            f2 = f(x2);
        } else {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - phi * (right - left);
            f1 = f(x1);
        }
    }
    let arg = 0.5 * (left + right);
    Ok((arg, f(arg)))
}

/// The two instance families played by the adaptive adversary: the
/// three-point prefix, or the prefix extended by a mirrored fourth point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    F1,
    F2,
}

/// Line instance `{0, x, delta_alpha * x}`, optionally extended by
/// `-delta_alpha * x`.
pub fn gen_1d_universal(alpha: Alpha, x: f64, family: Family) -> Result<ArrivalInstance> {
    if !(x >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "scale x must be at least 1, got {x}"
        )));
    }
    let delta = universal_constants(alpha, 1e-9)?.delta_alpha;
    let mut coords = vec![0.0, x, delta * x];
    if family == Family::F2 {
        coords.push(-delta * x);
    }
    ArrivalInstance::line(coords)
}

/// Outcome of one adaptive-adversary game.
#[derive(Debug, Clone)]
pub struct AdversaryOutcome {
    pub instance: ArrivalInstance,
    pub family: Family,
    /// Center raised at the final arrival when the extended family was
    /// played (None when the arrival was already covered).
    pub raised_center: Option<usize>,
    pub strategy_cost: f64,
    pub reference_cost: f64,
    pub ratio: f64,
}

/// Play the adaptive adversary against a deterministic strategy: present
/// the three-point prefix, inspect whether any range already reaches
/// `delta_alpha * x`, and either stop there or extend with the mirrored
/// point. The reference cost is the exact offline optimum of the instance
/// actually played.
pub fn run_adaptive_adversary(config: &StrategyConfig, x: f64) -> Result<AdversaryOutcome> {
    let delta = universal_constants(config.alpha, 1e-9)?.delta_alpha;
    let prefix = gen_1d_universal(config.alpha, x, Family::F1)?;
    let prefix_sim = simulate(&prefix, config);
    let threshold = delta * x * (1.0 - 1e-9);
    let has_big_disk = prefix_sim
        .trace
        .final_assignment()
        .ranges()
        .iter()
        .any(|&r| r >= threshold);

    let (family, instance, sim) = if has_big_disk {
        (Family::F1, prefix, prefix_sim)
    } else {
        let extended = gen_1d_universal(config.alpha, x, Family::F2)?;
        let sim = simulate(&extended, config);
        (Family::F2, extended, sim)
    };

    let raised_center = if family == Family::F2 {
        match sim.steps.last().map(|s| &s.action) {
            Some(StepAction::Raised { center, .. }) => Some(*center),
            _ => None,
        }
    } else {
        None
    };

    let strategy_cost = sim.total_cost();
    let reference_cost = solve_optimal(&instance, config.alpha)?.cost;
    Ok(AdversaryOutcome {
        ratio: strategy_cost / reference_cost,
        instance,
        family,
        raised_center,
        strategy_cost,
        reference_cost,
    })
}

/// Four-point line instance `{0, delta * x, x, -x}` on which the
/// nearest-neighbor strategy pays `((1 - delta)^alpha + 1) x^alpha` while
/// the optimum is a single ball of radius `x` at the source.
pub fn gen_1d_nn_lb(delta: f64, x: f64) -> Result<ArrivalInstance> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "x must be positive, got {x}"
        )));
    }
    ArrivalInstance::line(vec![0.0, delta * x, x, -x])
}

/// The 19-point plane instance forcing the nearest-neighbor strategy to a
/// ratio approaching `6 (1 + ((sqrt 6 - sqrt 2) / 2)^alpha)`: six points on
/// a tiny circle around the source, six on the unit circle at the same
/// angles, and six more on the unit circle offset to fall between them.
pub fn gen_2d_nn_lb(epsilon: f64) -> Result<ArrivalInstance> {
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 0.1), got {epsilon}"
        )));
    }
    let mut points: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let polar = |r: f64, theta: f64| [r * theta.cos(), r * theta.sin()];
    let sector = std::f64::consts::FRAC_PI_3;
    for k in 0..6 {
        points.push(polar(epsilon, k as f64 * sector));
    }
    for k in 0..6 {
        points.push(polar(1.0, k as f64 * sector));
    }
    for k in 0..6 {
        points.push(polar(1.0, sector / 2.0 - epsilon + k as f64 * sector));
    }
    ArrivalInstance::plane(points)
}

/// Plane instance with unbounded nearest-predecessor charge for exponent 2:
/// the source sits at the center of a unit disk's inscribed square, and
/// round `k` inserts the `4^k` centers of the radius-`2^-k` subsquares in
/// row-major order. Every inserted point is at distance exactly `2^-k`
/// from its parent center.
pub fn gen_recursive_squares(rounds: usize) -> Result<ArrivalInstance> {
    if !(1..=6).contains(&rounds) {
        return Err(Error::InvalidParameter(format!(
            "rounds must lie in 1..=6, got {rounds}"
        )));
    }
    // Inscribed square of the unit disk: half-side sqrt(2)/2, so that the
    // center-to-vertex distance is 1.
    let half_side = std::f64::consts::FRAC_1_SQRT_2;
    let mut points: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    for k in 1..=rounds {
        let cells = 1usize << k; // per axis
        let cell = 2.0 * half_side / cells as f64;
        for iy in 0..cells {
            for ix in 0..cells {
                points.push([
                    -half_side + (ix as f64 + 0.5) * cell,
                    -half_side + (iy as f64 + 0.5) * cell,
                ]);
            }
        }
    }
    ArrivalInstance::plane(points)
}

/// Seeded uniform random instance: line points in `[-1/2, 1/2]`, plane
/// points in the unit square around the origin, or a random metric with
/// distances in `[1, 2]` (which satisfies the triangle inequality
/// outright). The source is fixed at the region center for geometric
/// spaces.
pub fn gen_random(space: Space, n: usize, seed: u64) -> Result<ArrivalInstance> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match space {
        Space::Line => {
            let mut coords = vec![0.0f64];
            while coords.len() < n {
                let c: f64 = rng.gen_range(-0.5..0.5);
                if coords.iter().all(|&p| p != c) {
                    coords.push(c);
                }
            }
            ArrivalInstance::line(coords)
        }
        Space::Plane => {
            let mut points: Vec<[f64; 2]> = vec![[0.0, 0.0]];
            while points.len() < n {
                let p = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
                if points.iter().all(|q| *q != p) {
                    points.push(p);
                }
            }
            ArrivalInstance::plane(points)
        }
        Space::Metric => {
            let mut matrix = vec![vec![0.0f64; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let d: f64 = rng.gen_range(1.0..2.0);
                    matrix[i][j] = d;
                    matrix[j][i] = d;
                }
            }
            ArrivalInstance::metric(matrix)
        }
    }
}

/// Seeded random line instance with every point nonnegative and the source
/// at 0, the regime where nearest-neighbor and cheapest-increase are
/// offline-optimal.
pub fn gen_random_nonnegative_line(n: usize, seed: u64) -> Result<ArrivalInstance> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![0.0f64];
    while coords.len() < n {
        let c: f64 = rng.gen_range(0.0..1.0);
        if c > 0.0 && coords.iter().all(|&p| p != c) {
            coords.push(c);
        }
    }
    ArrivalInstance::line(coords)
}
