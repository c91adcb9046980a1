//! Executable counterparts of the analysis machinery: charging disks with
//! their disjointness and containment checks, nearest-predecessor charge
//! sums, and the competitive-ratio harness.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::instance::{within_range, Alpha, ArrivalInstance, RangeAssignment};
use crate::oracle::solve_optimal;
use crate::strategies::{simulate, Simulation, StepAction, StrategyConfig, StrategyKind};

/// Upper limit on the midpoint-disk factor: disks of radius `gamma * d`
/// centered on the raised segment's midpoint stay pairwise disjoint only
/// below `(3 - sqrt 7) / 4`.
pub fn midpoint_gamma_limit() -> f64 {
    (3.0 - 7f64.sqrt()) / 4.0
}

/// Which charging-disk construction to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiskVariant {
    /// For the doubling strategy: disk centered at the arrival itself with
    /// radius half the nearest-predecessor distance.
    TwoNearestNeighbor,
    /// For plain nearest-neighbor: disk of radius `gamma * d` centered on
    /// the midpoint between the arrival and its nearest predecessor.
    MidpointNearestNeighbor { gamma: f64 },
}

/// Center and radius of a non-empty charging disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskGeometry {
    pub center: [f64; 2],
    pub radius: f64,
}

/// The charging disk of one arrival; `geometry` is None when the strategy
/// made no range increase there.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargingDisk {
    pub owner: usize,
    pub variant: DiskVariant,
    pub geometry: Option<DiskGeometry>,
}

impl ChargingDisk {
    pub fn is_empty(&self) -> bool {
        self.geometry.is_none()
    }
}

/// Build the charging disks of a plane simulation, one per arrival after
/// the source. The disks are an analysis tool, not part of any strategy.
/// The variant must match the strategy that produced the run: the
/// two-nearest-neighbor disks belong to factor-2 expansion runs, the
/// midpoint disks to plain nearest-neighbor runs.
pub fn charging_disks(
    instance: &ArrivalInstance,
    sim: &Simulation,
    variant: DiskVariant,
) -> Result<Vec<ChargingDisk>> {
    let points = instance
        .plane_points()
        .ok_or_else(|| Error::InvalidParameter("charging disks need a plane instance".into()))?;
    match (variant, sim.config.kind) {
        (DiskVariant::TwoNearestNeighbor, StrategyKind::KNearestNeighbor { factor }) => {
            if factor != 2.0 {
                return Err(Error::InvalidParameter(format!(
                    "two-nearest-neighbor disks require expansion factor 2, got {factor}"
                )));
            }
        }
        (DiskVariant::MidpointNearestNeighbor { gamma }, StrategyKind::NearestNeighbor) => {
            if !(gamma > 0.0 && gamma < midpoint_gamma_limit()) {
                return Err(Error::InvalidParameter(format!(
                    "gamma must lie in (0, {}), got {gamma}",
                    midpoint_gamma_limit()
                )));
            }
        }
        (v, k) => {
            return Err(Error::InvalidParameter(format!(
                "disk variant {v:?} does not match strategy {k:?}"
            )));
        }
    }

    let mut disks = Vec::with_capacity(sim.steps.len());
    for step in &sim.steps {
        let j = step.arrival;
        let geometry = match step.action {
            StepAction::Covered => None,
            StepAction::Raised { center, .. } => {
                let d = instance.dist(center, j);
                Some(match variant {
                    DiskVariant::TwoNearestNeighbor => DiskGeometry {
                        center: points[j],
                        radius: d / 2.0,
                    },
                    DiskVariant::MidpointNearestNeighbor { gamma } => DiskGeometry {
                        center: [
                            (points[j][0] + points[center][0]) / 2.0,
                            (points[j][1] + points[center][1]) / 2.0,
                        ],
                        radius: gamma * d,
                    },
                })
            }
        };
        disks.push(ChargingDisk {
            owner: j,
            variant,
            geometry,
        });
    }
    Ok(disks)
}

/// First pair of overlapping disks, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisjointViolation {
    pub first_owner: usize,
    pub second_owner: usize,
    /// How far the radius sum exceeds the center distance.
    pub overlap: f64,
}

/// Check pairwise disjointness of non-empty disks: center distance at least
/// the radius sum, minus `tolerance`. The guaranteed property is open
/// disjointness, so exact tangency passes. Returns the first violating
/// pair, or None when all pairs are disjoint.
pub fn check_disjoint(disks: &[ChargingDisk], tolerance: f64) -> Option<DisjointViolation> {
    debug_assert!(
        disks.windows(2).all(|w| w[0].variant == w[1].variant),
        "disks of mixed variants are not comparable"
    );
    let live: Vec<(&ChargingDisk, DiskGeometry)> = disks
        .iter()
        .filter_map(|d| d.geometry.map(|g| (d, g)))
        .collect();
    for (idx, (d1, g1)) in live.iter().enumerate() {
        for (d2, g2) in live.iter().skip(idx + 1) {
            let center_dist = (g1.center[0] - g2.center[0]).hypot(g1.center[1] - g2.center[1]);
            let overlap = g1.radius + g2.radius - center_dist;
            if overlap > tolerance {
                return Some(DisjointViolation {
                    first_owner: d1.owner,
                    second_owner: d2.owner,
                    overlap,
                });
            }
        }
    }
    None
}

/// A disk that is not contained in any scaled ball of its covering points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainmentViolation {
    pub owner: usize,
}

/// Check that every non-empty charging disk fits inside a scaled ball of
/// some earlier point that covers its owner in the given assignment.
///
/// The assignment holds final ranges of a feasible offline solution. Final
/// ranges upper-bound the ranges at the owner's arrival time (ranges are
/// monotone), so this check is a consequence of the stronger per-arrival
/// containment guarantee.
pub fn check_containment(
    instance: &ArrivalInstance,
    disks: &[ChargingDisk],
    assignment: &RangeAssignment,
    scale: f64,
) -> Option<ContainmentViolation> {
    let points = instance.plane_points().expect("containment needs a plane instance");
    for disk in disks {
        let Some(geometry) = disk.geometry else {
            continue;
        };
        let k = disk.owner;
        let contained = (0..k).any(|i| {
            if !within_range(instance.dist(i, k), assignment.get(i)) {
                return false;
            }
            let ball = scale * assignment.get(i);
            let center_dist =
                (geometry.center[0] - points[i][0]).hypot(geometry.center[1] - points[i][1]);
            center_dist + geometry.radius <= ball + 1e-9 * ball.max(1.0)
        });
        if !contained {
            return Some(ContainmentViolation { owner: k });
        }
    }
    None
}

/// Sum over the subset (all arrivals by default) of each member's nearest
/// earlier-subset-member distance raised to alpha. The lowest index in the
/// subset acts as the center available from the start and contributes no
/// term of its own.
pub fn f_alpha_sum(instance: &ArrivalInstance, alpha: Alpha, subset: Option<&[usize]>) -> f64 {
    let indices: Vec<usize> = match subset {
        Some(s) => {
            let mut v = s.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        }
        None => (0..instance.len()).collect(),
    };
    let a = alpha.get();
    let mut sum = 0.0;
    for (pos, &j) in indices.iter().enumerate().skip(1) {
        let nearest = indices[..pos]
            .iter()
            .map(|&k| instance.dist(j, k))
            .fold(f64::INFINITY, f64::min);
        sum += nearest.powf(a);
    }
    sum
}

/// A strategy's cost against the exact offline optimum on one instance.
#[derive(Debug, Clone)]
pub struct RatioReport {
    pub strategy_cost: f64,
    pub oracle_cost: f64,
    pub ratio: f64,
    pub increments: Vec<f64>,
    pub instance_digest: String,
}

/// Run the strategy, solve the instance exactly, and report the ratio.
/// Fails on instances beyond the exact-solver limit.
pub fn competitive_ratio(
    instance: &ArrivalInstance,
    config: &StrategyConfig,
) -> Result<RatioReport> {
    let sim = simulate(instance, config);
    let oracle = solve_optimal(instance, config.alpha)?;
    let strategy_cost = sim.total_cost();
    let ratio = if oracle.cost == 0.0 {
        1.0 // single point: both sides are zero
    } else {
        strategy_cost / oracle.cost
    };
    Ok(RatioReport {
        strategy_cost,
        oracle_cost: oracle.cost,
        ratio,
        increments: sim.trace.increments().to_vec(),
        instance_digest: instance_digest(instance),
    })
}

/// Short stable fingerprint of an instance, for experiment logs.
pub fn instance_digest(instance: &ArrivalInstance) -> String {
    let mut hasher = DefaultHasher::new();
    instance.to_json_string().hash(&mut hasher);
    format!("{:016x}", hasher.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{gen_1d_nn_lb, gen_recursive_squares};

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn two_point_plane() -> ArrivalInstance {
        ArrivalInstance::plane(vec![[0.0, 0.0], [3.0, 0.0]]).unwrap()
    }

    #[test]
    fn two_nn_disk_sits_on_the_arrival() {
        let inst = two_point_plane();
        let sim = simulate(&inst, &StrategyConfig::knn(2.0, a(2.0)).unwrap());
        let disks = charging_disks(&inst, &sim, DiskVariant::TwoNearestNeighbor).unwrap();
        assert_eq!(disks.len(), 1);
        let g = disks[0].geometry.unwrap();
        assert_eq!(g.center, [3.0, 0.0]);
        assert_eq!(g.radius, 1.5);
    }

    #[test]
    fn midpoint_disk_sits_between() {
        let inst = two_point_plane();
        let sim = simulate(&inst, &StrategyConfig::nn(a(2.0)));
        let disks = charging_disks(
            &inst,
            &sim,
            DiskVariant::MidpointNearestNeighbor { gamma: 0.08 },
        )
        .unwrap();
        let g = disks[0].geometry.unwrap();
        assert_eq!(g.center, [1.5, 0.0]);
        assert!((g.radius - 0.24).abs() < 1e-12);
    }

    #[test]
    fn covered_arrival_yields_empty_disk() {
        let inst = ArrivalInstance::plane(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]]).unwrap();
        let sim = simulate(&inst, &StrategyConfig::knn(2.0, a(2.0)).unwrap());
        let disks = charging_disks(&inst, &sim, DiskVariant::TwoNearestNeighbor).unwrap();
        assert!(!disks[0].is_empty());
        assert!(disks[1].is_empty(), "third arrival is already covered");
    }

    #[test]
    fn variant_pairing_is_enforced() {
        let inst = two_point_plane();
        let nn_sim = simulate(&inst, &StrategyConfig::nn(a(2.0)));
        assert!(charging_disks(&inst, &nn_sim, DiskVariant::TwoNearestNeighbor).is_err());
        let too_big = DiskVariant::MidpointNearestNeighbor { gamma: 0.1 };
        assert!(charging_disks(&inst, &nn_sim, too_big).is_err());
        let line = ArrivalInstance::line(vec![0.0, 1.0]).unwrap();
        let line_sim = simulate(&line, &StrategyConfig::knn(2.0, a(2.0)).unwrap());
        assert!(charging_disks(&line, &line_sim, DiskVariant::TwoNearestNeighbor).is_err());
    }

    #[test]
    fn identical_disks_violate_disjointness() {
        let disk = ChargingDisk {
            owner: 1,
            variant: DiskVariant::TwoNearestNeighbor,
            geometry: Some(DiskGeometry {
                center: [0.0, 0.0],
                radius: 1.0,
            }),
        };
        let mut other = disk.clone();
        other.owner = 2;
        let violation = check_disjoint(&[disk, other], 1e-9).unwrap();
        assert_eq!(violation.first_owner, 1);
        assert_eq!(violation.second_owner, 2);
        assert!((violation.overlap - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tangent_disks_pass() {
        let mk = |x: f64, owner: usize| ChargingDisk {
            owner,
            variant: DiskVariant::TwoNearestNeighbor,
            geometry: Some(DiskGeometry {
                center: [x, 0.0],
                radius: 1.0,
            }),
        };
        assert!(check_disjoint(&[mk(0.0, 1), mk(2.0, 2)], 1e-9).is_none());
    }

    #[test]
    fn containment_holds_at_full_scale_and_fails_at_half() {
        let inst = ArrivalInstance::plane(vec![
            [0.0, 0.0],
            [0.9, 0.1],
            [-0.4, 0.6],
            [0.3, -0.8],
            [1.2, 0.4],
        ])
        .unwrap();
        let alpha = a(2.0);
        let sim = simulate(&inst, &StrategyConfig::knn(2.0, alpha).unwrap());
        let disks = charging_disks(&inst, &sim, DiskVariant::TwoNearestNeighbor).unwrap();
        let oracle = solve_optimal(&inst, alpha).unwrap();
        assert!(check_containment(&inst, &disks, &oracle.assignment, 1.5).is_none());
        assert!(
            check_containment(&inst, &disks, &oracle.assignment, 0.5).is_some(),
            "negative control at scale 0.5"
        );
    }

    #[test]
    fn containment_vacuous_for_single_point() {
        let inst = ArrivalInstance::plane(vec![[0.0, 0.0]]).unwrap();
        let sim = simulate(&inst, &StrategyConfig::knn(2.0, a(2.0)).unwrap());
        let disks = charging_disks(&inst, &sim, DiskVariant::TwoNearestNeighbor).unwrap();
        assert!(disks.is_empty());
        assert!(
            check_containment(&inst, &disks, &RangeAssignment::zeros(1), 1.5).is_none()
        );
    }

    #[test]
    fn charge_sum_examples() {
        let two = two_point_plane();
        assert_eq!(f_alpha_sum(&two, a(2.0), None), 9.0);

        for t in 1..=4 {
            let inst = gen_recursive_squares(t).unwrap();
            let s2 = f_alpha_sum(&inst, a(2.0), None);
            assert!(
                (s2 - t as f64).abs() <= 1e-9,
                "round {t}: quadratic sum {s2}"
            );
        }
        let five = gen_recursive_squares(5).unwrap();
        let s3 = f_alpha_sum(&five, a(3.0), None);
        assert!((s3 - 31.0 / 32.0).abs() <= 1e-9, "cubic sum {s3}");
    }

    #[test]
    fn charge_sum_respects_subsets() {
        let inst = ArrivalInstance::line(vec![0.0, 1.0, 3.0, 3.5]).unwrap();
        // subset {0, 2, 3}: point 2 charges dist(2,0) = 3; point 3 charges
        // dist(3,2) = 0.5
        let s = f_alpha_sum(&inst, a(2.0), Some(&[0, 2, 3]));
        assert!((s - (9.0 + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn ratio_on_the_1d_lower_bound_replay() {
        let inst = gen_1d_nn_lb(0.01, 1.0).unwrap();
        let report = competitive_ratio(&inst, &StrategyConfig::nn(a(2.0))).unwrap();
        assert!((report.ratio - 1.9801).abs() < 1e-9);
        assert!(report.ratio >= 1.0 - 1e-9);
        assert_eq!(report.increments.len(), inst.len());
    }

    #[test]
    fn digest_is_stable_and_input_sensitive() {
        let x = gen_1d_nn_lb(0.01, 1.0).unwrap();
        let y = gen_1d_nn_lb(0.01, 1.0).unwrap();
        let z = gen_1d_nn_lb(0.02, 1.0).unwrap();
        assert_eq!(instance_digest(&x), instance_digest(&y));
        assert_ne!(instance_digest(&x), instance_digest(&z));
    }
}
