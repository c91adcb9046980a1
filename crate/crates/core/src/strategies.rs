//! The online strategies: nearest-neighbor, cheapest-increase, the
//! k-nearest-neighbor expansion variant, and the dual-raising algorithm for
//! general metric spaces.
//!
//! All strategies process arrivals in order, give every new point range 0,
//! and touch at most one existing range per arrival. Ties (nearest
//! neighbor, cheapest increase, simultaneously tight sets) are broken
//! toward the lowest center index so traces are reproducible.

use crate::error::{Error, Result};
use crate::instance::{within_range, Alpha, ArrivalInstance, AssignmentTrace, RangeAssignment};

/// Tolerance for deciding that a dual constraint holds with equality.
const TIGHT_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn is_tight(sum: f64, r_alpha: f64) -> bool {
    (sum - r_alpha).abs() <= TIGHT_TOL * r_alpha.max(1.0)
}

/// Which online strategy to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyKind {
    /// Raise the uncovered arrival's nearest predecessor to exactly the
    /// distance between them.
    NearestNeighbor,
    /// Raise the predecessor whose cost increase `dist^alpha - r^alpha` is
    /// smallest.
    CheapestIncrease,
    /// Raise the nearest predecessor to `factor` times the distance.
    /// `factor = 1` coincides with `NearestNeighbor`; `factor = 2` is the
    /// 2-NN strategy.
    KNearestNeighbor { factor: f64 },
    /// Raise dual variables until a coverage set is tight, then expand one
    /// center to `gamma` times its largest tight radius.
    DualOnline { gamma: f64 },
}

impl StrategyKind {
    pub fn label(&self) -> String {
        match self {
            StrategyKind::NearestNeighbor => "nn".into(),
            StrategyKind::CheapestIncrease => "ci".into(),
            StrategyKind::KNearestNeighbor { factor } => format!("knn({factor})"),
            StrategyKind::DualOnline { gamma } => format!("dual({gamma})"),
        }
    }
}

/// A strategy plus the cost exponent it is measured against.
///
/// NearestNeighbor and KNearestNeighbor make decisions independent of
/// alpha; the exponent still determines reported cost deltas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub alpha: Alpha,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, alpha: Alpha) -> Result<Self> {
        match kind {
            StrategyKind::KNearestNeighbor { factor } if !(factor >= 1.0) => Err(
                Error::InvalidStrategy(format!("expansion factor must be >= 1, got {factor}")),
            ),
            StrategyKind::DualOnline { gamma } if !(gamma > 1.0) => Err(Error::InvalidStrategy(
                format!("gamma must be > 1, got {gamma}"),
            )),
            _ => Ok(StrategyConfig { kind, alpha }),
        }
    }

    pub fn nn(alpha: Alpha) -> Self {
        StrategyConfig {
            kind: StrategyKind::NearestNeighbor,
            alpha,
        }
    }

    pub fn ci(alpha: Alpha) -> Self {
        StrategyConfig {
            kind: StrategyKind::CheapestIncrease,
            alpha,
        }
    }

    pub fn knn(factor: f64, alpha: Alpha) -> Result<Self> {
        StrategyConfig::new(StrategyKind::KNearestNeighbor { factor }, alpha)
    }

    pub fn dual(gamma: f64, alpha: Alpha) -> Result<Self> {
        StrategyConfig::new(StrategyKind::DualOnline { gamma }, alpha)
    }
}

/// The dual vector of the covering LP, index-aligned with the points.
/// The source has no dual variable, so `values()[0]` is always 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    y: Vec<f64>,
}

impl DualSolution {
    pub(crate) fn from_values(y: Vec<f64>) -> Self {
        DualSolution { y }
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn total(&self) -> f64 {
        self.y.iter().sum()
    }
}

/// Check dual feasibility of a prefix of dual values: for every center `i`
/// and candidate radius `r`, the arrived members of the coverage set must
/// sum to at most `r^alpha` (plus tolerance). `y` holds one value per
/// arrived point.
pub fn verify_dual_feasibility(
    instance: &ArrivalInstance,
    alpha: Alpha,
    y: &[f64],
) -> Result<()> {
    let arrived = y.len();
    for i in 0..instance.len().saturating_sub(1) {
        for r in instance.candidate_ranges(i) {
            let r_alpha = r.powf(alpha.get());
            let sum = arrived_member_sum(instance, y, i, r, arrived.saturating_sub(1));
            if sum > r_alpha + TIGHT_TOL * r_alpha.max(1.0) {
                return Err(Error::InvariantViolation(format!(
                    "dual constraint violated at center {i}, radius {r}: {sum} > {r_alpha}"
                )));
            }
        }
    }
    Ok(())
}

/// Sum of dual values over arrived members of the coverage set
/// `{k : k > i, dist(i,k) <= r}`, counting arrivals up to index `last`.
fn arrived_member_sum(
    instance: &ArrivalInstance,
    y: &[f64],
    i: usize,
    r: f64,
    last: usize,
) -> f64 {
    let hi = last.min(y.len().saturating_sub(1));
    let mut sum = 0.0;
    for k in (i + 1)..=hi {
        if instance.dist(i, k) <= r {
            sum += y[k];
        }
    }
    sum
}

/// What a single arrival did to the assignment.
#[derive(Debug, Clone, PartialEq)]
pub enum StepAction {
    /// The arrival was already within range of an existing point.
    Covered,
    Raised {
        center: usize,
        old_range: f64,
        new_range: f64,
    },
}

/// Extra bookkeeping recorded by the dual strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct DualStepInfo {
    /// Value assigned to the arrival's dual variable (0 when some set was
    /// already tight).
    pub y_value: f64,
    /// Center whose range was updated.
    pub tight_center: usize,
    /// Largest tight radius at that center; the new range is gamma times it.
    pub tight_radius: f64,
}

/// Per-arrival record: what happened and what it cost.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub arrival: usize,
    pub action: StepAction,
    pub cost_delta: f64,
    pub dual: Option<DualStepInfo>,
}

/// A completed run: the trace, the per-arrival reports, and (for the dual
/// strategy) the dual solution.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: StrategyConfig,
    pub trace: AssignmentTrace,
    pub steps: Vec<StepReport>,
    pub dual: Option<DualSolution>,
}

impl Simulation {
    pub fn total_cost(&self) -> f64 {
        self.trace.total_cost(self.config.alpha)
    }
}

/// Run a strategy over the whole arrival sequence. Every arrival starts
/// with range 0; the step for the configured strategy then decides which
/// single range, if any, to raise.
pub fn simulate(instance: &ArrivalInstance, config: &StrategyConfig) -> Simulation {
    let n = instance.len();
    let alpha = config.alpha.get();
    let mut ranges: Vec<f64> = Vec::with_capacity(n);
    let mut y: Vec<f64> = Vec::with_capacity(n);
    let is_dual = matches!(config.kind, StrategyKind::DualOnline { .. });
    let mut trace = AssignmentTrace::new();
    let mut steps = Vec::with_capacity(n.saturating_sub(1));

    for j in 0..n {
        ranges.push(0.0);
        if is_dual {
            y.push(0.0);
        }
        let increment = if j == 0 {
            0.0
        } else {
            let (action, delta, dual_info) = match config.kind {
                StrategyKind::NearestNeighbor => nn_step(instance, &mut ranges, j, alpha),
                StrategyKind::CheapestIncrease => ci_step(instance, &mut ranges, j, alpha),
                StrategyKind::KNearestNeighbor { factor } => {
                    knn_step(instance, &mut ranges, j, alpha, factor)
                }
                StrategyKind::DualOnline { gamma } => {
                    dual_step(instance, &mut ranges, &mut y, j, alpha, gamma)
                }
            };
            steps.push(StepReport {
                arrival: j,
                action,
                cost_delta: delta,
                dual: dual_info,
            });
            delta
        };
        trace.push(
            RangeAssignment::new(ranges.clone()).expect("ranges stay nonnegative"),
            increment,
        );
    }

    Simulation {
        config: *config,
        trace,
        steps,
        dual: if is_dual {
            Some(DualSolution::from_values(y))
        } else {
            None
        },
    }
}

fn covered(instance: &ArrivalInstance, ranges: &[f64], j: usize) -> bool {
    (0..j).any(|i| within_range(instance.dist(i, j), ranges[i]))
}

/// Index of the nearest predecessor of `j`, lowest index on ties.
fn nearest_predecessor(instance: &ArrivalInstance, j: usize) -> usize {
    let mut best = 0usize;
    let mut best_d = instance.dist(0, j);
    for i in 1..j {
        let d = instance.dist(i, j);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

type StepOutcome = (StepAction, f64, Option<DualStepInfo>);

fn nn_step(instance: &ArrivalInstance, ranges: &mut [f64], j: usize, alpha: f64) -> StepOutcome {
    if covered(instance, ranges, j) {
        return (StepAction::Covered, 0.0, None);
    }
    let center = nearest_predecessor(instance, j);
    let new_range = instance.dist(center, j);
    raise(ranges, center, new_range, alpha)
}

fn ci_step(instance: &ArrivalInstance, ranges: &mut [f64], j: usize, alpha: f64) -> StepOutcome {
    if covered(instance, ranges, j) {
        return (StepAction::Covered, 0.0, None);
    }
    let mut best = 0usize;
    let mut best_increase = f64::INFINITY;
    for i in 0..j {
        let increase = instance.dist(i, j).powf(alpha) - ranges[i].powf(alpha);
        if increase < best_increase {
            best = i;
            best_increase = increase;
        }
    }
    let new_range = instance.dist(best, j);
    raise(ranges, best, new_range, alpha)
}

fn knn_step(
    instance: &ArrivalInstance,
    ranges: &mut [f64],
    j: usize,
    alpha: f64,
    factor: f64,
) -> StepOutcome {
    if covered(instance, ranges, j) {
        return (StepAction::Covered, 0.0, None);
    }
    let center = nearest_predecessor(instance, j);
    // An uncovered arrival has dist > old range, so factor * dist > old for
    // factor >= 1; the max is an inert monotonicity guard.
    let new_range = (factor * instance.dist(center, j)).max(ranges[center]);
    raise(ranges, center, new_range, alpha)
}

fn raise(ranges: &mut [f64], center: usize, new_range: f64, alpha: f64) -> StepOutcome {
    let old_range = ranges[center];
    ranges[center] = new_range;
    let delta = new_range.powf(alpha) - old_range.powf(alpha);
    (
        StepAction::Raised {
            center,
            old_range,
            new_range,
        },
        delta,
        None,
    )
}

/// One arrival of the dual-raising algorithm.
///
/// The arrival's dual variable starts at 0. If no coverage set containing
/// the arrival is tight yet, the variable is set to the smallest remaining
/// slack, which makes at least one set tight. One center with a tight set
/// containing the arrival (lowest index) then gets range gamma times its
/// largest tight radius. Set membership is static (all later arrivals
/// within the radius) but dual sums only count arrived points.
fn dual_step(
    instance: &ArrivalInstance,
    ranges: &mut [f64],
    y: &mut [f64],
    j: usize,
    alpha: f64,
    gamma: f64,
) -> StepOutcome {
    // Constraints whose set contains j: (center, radius, arrived sum).
    let mut containing: Vec<(usize, f64, f64)> = Vec::new();
    for i in 0..j {
        let d_ij = instance.dist(i, j);
        for r in instance.candidate_ranges(i) {
            if r >= d_ij {
                let sum = arrived_member_sum(instance, y, i, r, j);
                containing.push((i, r, sum));
            }
        }
    }
    debug_assert!(!containing.is_empty(), "every arrival lies in some set");

    let any_tight = containing
        .iter()
        .any(|&(_, r, sum)| is_tight(sum, r.powf(alpha)));
    if !any_tight {
        let min_slack = containing
            .iter()
            .map(|&(_, r, sum)| r.powf(alpha) - sum)
            .fold(f64::INFINITY, f64::min);
        debug_assert!(min_slack > 0.0);
        y[j] = min_slack;
        for c in containing.iter_mut() {
            c.2 += min_slack;
        }
    }

    let center = containing
        .iter()
        .filter(|&&(_, r, sum)| is_tight(sum, r.powf(alpha)))
        .map(|&(i, _, _)| i)
        .min()
        .expect("a tight set containing the arrival exists");

    // Largest tight radius at the chosen center, over all its radii.
    let mut tight_radius = 0.0f64;
    for r in instance.candidate_ranges(center) {
        let sum = arrived_member_sum(instance, y, center, r, j);
        if is_tight(sum, r.powf(alpha)) {
            tight_radius = tight_radius.max(r);
        }
    }

    let old_range = ranges[center];
    let new_range = (gamma * tight_radius).max(old_range);
    ranges[center] = new_range;
    let delta = new_range.powf(alpha) - old_range.powf(alpha);
    (
        StepAction::Raised {
            center,
            old_range,
            new_range,
        },
        delta,
        Some(DualStepInfo {
            y_value: y[j],
            tight_center: center,
            tight_radius,
        }),
    )
}
