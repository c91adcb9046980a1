//! Offline solvers for the priority broadcast range-assignment problem.
//!
//! The problem is a min-cost set cover with priority structure: element `j`
//! may only be covered by a set centered at an earlier arrival. An exact
//! subset-DP solver handles small instances; a dual-based construction
//! yields a feasible assignment within a factor `5^alpha` of optimal on any
//! metric instance.

use crate::error::{Error, Result};
use crate::instance::{Alpha, ArrivalInstance, RangeAssignment};
use crate::strategies::{is_tight, DualSolution};

/// Exact-solver limit: the DP walks all subsets of `{1, .., n-1}`.
pub const MAX_ORACLE_POINTS: usize = 20;

/// Limit of the bitset-backed cover machinery (dual extraction and the
/// approximation algorithm).
pub const MAX_COVER_POINTS: usize = 64;

/// Dual values below this threshold count as structural zeros in the
/// conflict predicate of the approximation algorithm.
const Y_POSITIVE_TOL: f64 = 1e-12;

/// The coverage set `S_{i,r}`: all points arriving after `i` within
/// distance `r` of it. `radius` is drawn from `candidate_ranges(center)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverSet {
    pub center: usize,
    pub radius: f64,
}

impl CoverSet {
    pub fn contains(&self, instance: &ArrivalInstance, j: usize) -> bool {
        j > self.center && instance.dist(self.center, j) <= self.radius
    }

    pub fn members(&self, instance: &ArrivalInstance) -> Vec<usize> {
        ((self.center + 1)..instance.len())
            .filter(|&j| instance.dist(self.center, j) <= self.radius)
            .collect()
    }

    pub fn cost(&self, alpha: Alpha) -> f64 {
        self.radius.powf(alpha.get())
    }
}

/// Result of an exact offline solve.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub cost: f64,
    pub assignment: RangeAssignment,
    pub states_expanded: usize,
}

/// Exact minimum-cost priority-feasible assignment, via dynamic programming
/// over the bitset of covered elements. Each transition covers the lowest
/// uncovered element with one coverage set, which prunes symmetric
/// orderings.
pub fn solve_optimal(instance: &ArrivalInstance, alpha: Alpha) -> Result<OracleResult> {
    let n = instance.len();
    if n > MAX_ORACLE_POINTS {
        return Err(Error::TooLarge {
            operation: "solve_optimal",
            n,
            limit: MAX_ORACLE_POINTS,
        });
    }
    if n == 1 {
        return Ok(OracleResult {
            cost: 0.0,
            assignment: RangeAssignment::zeros(1),
            states_expanded: 0,
        });
    }

    struct SetEntry {
        center: usize,
        radius: f64,
        cost: f64,
        mask: u32,
    }

    let m = n - 1; // elements 1..n-1 map to bits 0..m-1
    let mut sets: Vec<SetEntry> = Vec::new();
    for i in 0..(n - 1) {
        for r in instance.candidate_ranges(i) {
            let mut mask = 0u32;
            for j in (i + 1)..n {
                if instance.dist(i, j) <= r {
                    mask |= 1 << (j - 1);
                }
            }
            sets.push(SetEntry {
                center: i,
                radius: r,
                cost: r.powf(alpha.get()),
                mask,
            });
        }
    }
    let mut by_element: Vec<Vec<u32>> = vec![Vec::new(); m];
    for (s, entry) in sets.iter().enumerate() {
        for e in 0..m {
            if entry.mask & (1 << e) != 0 {
                by_element[e].push(s as u32);
            }
        }
    }

    let full: u32 = if m == 32 { u32::MAX } else { (1 << m) - 1 };
    let mut cost = vec![f64::INFINITY; (full as usize) + 1];
    let mut choice: Vec<(u32, u32)> = vec![(u32::MAX, 0); (full as usize) + 1];
    cost[0] = 0.0;
    let mut states_expanded = 0usize;

    for mask in 0..=full {
        if !cost[mask as usize].is_finite() || mask == full {
            continue;
        }
        states_expanded += 1;
        let e = (!mask).trailing_zeros() as usize;
        for &s in &by_element[e] {
            let entry = &sets[s as usize];
            let new = mask | entry.mask;
            let c = cost[mask as usize] + entry.cost;
            if c < cost[new as usize] {
                cost[new as usize] = c;
                choice[new as usize] = (s, mask);
            }
        }
    }

    let mut ranges = vec![0.0f64; n];
    let mut mask = full;
    while mask != 0 {
        let (s, prev) = choice[mask as usize];
        let entry = &sets[s as usize];
        ranges[entry.center] = ranges[entry.center].max(entry.radius);
        mask = prev;
    }

    Ok(OracleResult {
        cost: cost[full as usize],
        assignment: RangeAssignment::new(ranges)?,
        states_expanded,
    })
}

/// Brute-force reference solver: enumerate every choice of candidate radius
/// (or zero) per point and keep the cheapest priority-feasible assignment.
/// Written independently of the DP so the two can be cross-checked.
pub fn enumerate_optimal(instance: &ArrivalInstance, alpha: Alpha) -> Result<(f64, RangeAssignment)> {
    const LIMIT: usize = 10;
    let n = instance.len();
    if n > LIMIT {
        return Err(Error::TooLarge {
            operation: "enumerate_optimal",
            n,
            limit: LIMIT,
        });
    }
    if n == 1 {
        return Ok((0.0, RangeAssignment::zeros(1)));
    }

    let choices: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut c = vec![0.0];
            c.extend(instance.candidate_ranges(i));
            c
        })
        .collect();

    fn priority_feasible(instance: &ArrivalInstance, ranges: &[f64]) -> bool {
        (1..ranges.len()).all(|j| (0..j).any(|i| instance.dist(i, j) <= ranges[i]))
    }

    let mut best = f64::INFINITY;
    let mut best_ranges = vec![0.0; n];
    let mut current = vec![0.0f64; n];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        instance: &ArrivalInstance,
        alpha: f64,
        choices: &[Vec<f64>],
        current: &mut Vec<f64>,
        i: usize,
        cost_so_far: f64,
        best: &mut f64,
        best_ranges: &mut Vec<f64>,
    ) {
        if cost_so_far >= *best {
            return;
        }
        if i == current.len() {
            if priority_feasible(instance, current) {
                *best = cost_so_far;
                best_ranges.clone_from(current);
            }
            return;
        }
        for &r in &choices[i] {
            current[i] = r;
            rec(
                instance,
                alpha,
                choices,
                current,
                i + 1,
                cost_so_far + r.powf(alpha),
                best,
                best_ranges,
            );
        }
        current[i] = 0.0;
    }

    rec(
        instance,
        alpha.get(),
        &choices,
        &mut current,
        0,
        0.0,
        &mut best,
        &mut best_ranges,
    );
    Ok((best, RangeAssignment::new(best_ranges)?))
}

/// A maximally feasible dual solution: raise `y_1, .., y_{n-1}` in arrival
/// order, each to the largest value the constraints allow given the values
/// already fixed. Afterwards every point belongs to some tight set.
pub fn maximal_dual(instance: &ArrivalInstance, alpha: Alpha) -> DualSolution {
    let n = instance.len();
    let mut y = vec![0.0f64; n];
    for j in 1..n {
        let mut cap = f64::INFINITY;
        for i in 0..j {
            let d_ij = instance.dist(i, j);
            for r in instance.candidate_ranges(i) {
                if r < d_ij {
                    continue;
                }
                let sum: f64 = ((i + 1)..n)
                    .filter(|&k| instance.dist(i, k) <= r)
                    .map(|k| y[k])
                    .sum();
                cap = cap.min(r.powf(alpha.get()) - sum);
            }
        }
        y[j] = cap.max(0.0);
    }
    DualSolution::from_values(y)
}

/// Extract from a maximal dual a minimally feasible cover by tight sets:
/// start with the largest tight radius at every center, then drop redundant
/// sets in increasing cost order. At most one set per center by
/// construction.
pub fn minimal_tight_cover(
    instance: &ArrivalInstance,
    alpha: Alpha,
    dual: &DualSolution,
) -> Result<Vec<CoverSet>> {
    let n = instance.len();
    if n > MAX_COVER_POINTS {
        return Err(Error::TooLarge {
            operation: "minimal_tight_cover",
            n,
            limit: MAX_COVER_POINTS,
        });
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    let y = dual.values();

    let mut family: Vec<(CoverSet, u64)> = Vec::new();
    for i in 0..(n - 1) {
        let mut best: Option<f64> = None;
        for r in instance.candidate_ranges(i) {
            let sum: f64 = ((i + 1)..n)
                .filter(|&k| instance.dist(i, k) <= r)
                .map(|k| y[k])
                .sum();
            if is_tight(sum, r.powf(alpha.get())) {
                best = Some(best.map_or(r, |b: f64| b.max(r)));
            }
        }
        if let Some(radius) = best {
            let set = CoverSet { center: i, radius };
            let mask = member_mask(instance, &set);
            family.push((set, mask));
        }
    }

    let full: u64 = if n - 1 == 64 {
        u64::MAX
    } else {
        (1u64 << (n - 1)) - 1
    };
    let covered = |family: &[(CoverSet, u64)], skip: &[bool]| -> u64 {
        family
            .iter()
            .zip(skip.iter())
            .filter(|(_, &s)| !s)
            .map(|((_, mask), _)| mask)
            .fold(0u64, |acc, m| acc | m)
    };

    let mut skip = vec![false; family.len()];
    if covered(&family, &skip) != full {
        return Err(Error::InvariantViolation(
            "tight sets of a maximal dual must cover every point".into(),
        ));
    }

    // Try removals from cheapest to most expensive.
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by(|&a, &b| {
        family[a]
            .0
            .radius
            .total_cmp(&family[b].0.radius)
            .then(family[a].0.center.cmp(&family[b].0.center))
    });
    for idx in order {
        skip[idx] = true;
        if covered(&family, &skip) != full {
            skip[idx] = false;
        }
    }

    Ok(family
        .into_iter()
        .zip(skip)
        .filter(|(_, s)| !s)
        .map(|((set, _), _)| set)
        .collect())
}

fn member_mask(instance: &ArrivalInstance, set: &CoverSet) -> u64 {
    let mut mask = 0u64;
    for j in (set.center + 1)..instance.len() {
        if instance.dist(set.center, j) <= set.radius {
            mask |= 1 << (j - 1);
        }
    }
    mask
}

/// One cluster built by the approximation: the conflict-free representative
/// (`head`), every selected center grouped with it, and the earliest
/// arrival among them, which receives the inflated radius.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub head: usize,
    pub members: Vec<usize>,
    pub assignee: usize,
    pub radius: f64,
}

/// Evidence accompanying the approximate assignment.
#[derive(Debug, Clone)]
pub struct ApproxCertificate {
    /// The minimally feasible tight cover the construction started from.
    pub selected: Vec<CoverSet>,
    /// Centers of the conflict-free representatives.
    pub independent: Vec<usize>,
    pub clusters: Vec<Cluster>,
    /// Value of the maximal dual solution; the assignment costs at most
    /// `5^alpha` times this.
    pub dual_total: f64,
}

/// Build a priority-feasible assignment within `5^alpha` of optimal:
/// take a maximal dual and a minimal tight cover, group the selected sets
/// around conflict-free representatives in decreasing radius order, and give
/// the earliest point of each group five times the representative radius.
/// Two sets conflict when they share a member with positive dual value.
pub fn approx_5alpha(
    instance: &ArrivalInstance,
    alpha: Alpha,
) -> Result<(RangeAssignment, ApproxCertificate)> {
    let n = instance.len();
    if n > MAX_COVER_POINTS {
        return Err(Error::TooLarge {
            operation: "approx_5alpha",
            n,
            limit: MAX_COVER_POINTS,
        });
    }
    let dual = maximal_dual(instance, alpha);
    let selected = minimal_tight_cover(instance, alpha, &dual)?;
    let y = dual.values();

    // Decreasing radius, ties toward the earlier center.
    let mut order: Vec<usize> = (0..selected.len()).collect();
    order.sort_by(|&a, &b| {
        selected[b]
            .radius
            .total_cmp(&selected[a].radius)
            .then(selected[a].center.cmp(&selected[b].center))
    });

    let conflicts = |a: &CoverSet, b: &CoverSet| -> bool {
        (0..n).any(|k| {
            y[k] > Y_POSITIVE_TOL
                && a.contains(instance, k)
                && b.contains(instance, k)
        })
    };

    let mut independent: Vec<usize> = Vec::new(); // positions into `order`
    let mut clusters: Vec<Cluster> = Vec::new();
    for pos in 0..order.len() {
        let cand = &selected[order[pos]];
        if independent
            .iter()
            .any(|&ip| conflicts(&selected[order[ip]], cand))
        {
            continue;
        }
        let mut member_centers = vec![cand.center];
        for later in (pos + 1)..order.len() {
            let other = &selected[order[later]];
            if conflicts(other, cand)
                && !independent
                    .iter()
                    .any(|&ip| conflicts(other, &selected[order[ip]]))
            {
                member_centers.push(other.center);
            }
        }
        let assignee = *member_centers.iter().min().expect("cluster is nonempty");
        clusters.push(Cluster {
            head: cand.center,
            members: member_centers,
            assignee,
            radius: 5.0 * cand.radius,
        });
        independent.push(pos);
    }

    let mut ranges = vec![0.0f64; n];
    for cluster in &clusters {
        debug_assert_eq!(ranges[cluster.assignee], 0.0, "assignees are distinct");
        ranges[cluster.assignee] = cluster.radius;
    }

    let certificate = ApproxCertificate {
        independent: independent
            .iter()
            .map(|&ip| selected[order[ip]].center)
            .collect(),
        selected,
        clusters,
        dual_total: dual.total(),
    };
    Ok((RangeAssignment::new(ranges)?, certificate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{cost_alpha, within_range};
    use crate::strategies::verify_dual_feasibility;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn line(coords: &[f64]) -> ArrivalInstance {
        ArrivalInstance::line(coords.to_vec()).unwrap()
    }

    #[test]
    fn two_points_forced_cost() {
        let inst = line(&[0.0, 2.0]);
        let res = solve_optimal(&inst, a(2.0)).unwrap();
        assert_eq!(res.cost, 4.0);
        assert_eq!(res.assignment.ranges(), &[2.0, 0.0]);
    }

    #[test]
    fn universal_family_prefix_optimum() {
        // {0, 1, ~delta_2}: best is radius 1 at the source plus the gap at p1
        let delta = 4.153;
        let inst = line(&[0.0, 1.0, delta]);
        let res = solve_optimal(&inst, a(2.0)).unwrap();
        let expected = 1.0 + (delta - 1.0) * (delta - 1.0);
        assert!((res.cost - expected).abs() < 1e-9);
        assert!((res.assignment.get(0) - 1.0).abs() < 1e-12);
        assert!((res.assignment.get(1) - (delta - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn nn_lower_bound_instance_optimum_is_one_ball() {
        let inst = line(&[0.0, 0.01, 1.0, -1.0]);
        let res = solve_optimal(&inst, a(2.0)).unwrap();
        assert!((res.cost - 1.0).abs() < 1e-12);
        assert_eq!(res.assignment.get(0), 1.0);
    }

    #[test]
    fn oracle_rejects_large_instances() {
        let coords: Vec<f64> = (0..25).map(|i| i as f64).collect();
        let inst = line(&coords);
        match solve_optimal(&inst, a(2.0)) {
            Err(Error::TooLarge { limit, .. }) => assert_eq!(limit, MAX_ORACLE_POINTS),
            other => panic!("expected size error, got {other:?}"),
        }
        let huge = line(&(0..70).map(|i| i as f64).collect::<Vec<_>>());
        match approx_5alpha(&huge, a(2.0)) {
            Err(Error::TooLarge { limit, .. }) => assert_eq!(limit, MAX_COVER_POINTS),
            other => panic!("expected size error, got {other:?}"),
        }
    }

    #[test]
    fn single_point_degenerate() {
        let inst = line(&[0.0]);
        let res = solve_optimal(&inst, a(2.0)).unwrap();
        assert_eq!(res.cost, 0.0);
        assert!(minimal_tight_cover(&inst, a(2.0), &maximal_dual(&inst, a(2.0)))
            .unwrap()
            .is_empty());
        let (r, cert) = approx_5alpha(&inst, a(2.0)).unwrap();
        assert_eq!(cost_alpha(&r, a(2.0)), 0.0);
        assert!(cert.clusters.is_empty());
    }

    #[test]
    fn dp_matches_enumerator_on_small_instances() {
        let cases = [
            vec![0.0, 1.0, 4.0, 2.5],
            vec![0.0, -1.0, 1.0, -2.0, 2.0],
            vec![0.0, 0.3, 0.9, -0.4, 1.7, 1.1],
        ];
        for coords in cases {
            let inst = line(&coords);
            for alpha in [2.0, 3.0] {
                let dp = solve_optimal(&inst, a(alpha)).unwrap();
                let (brute, _) = enumerate_optimal(&inst, a(alpha)).unwrap();
                assert!(
                    (dp.cost - brute).abs() <= 1e-9 * brute.max(1.0),
                    "dp {} vs brute {brute} on {coords:?}",
                    dp.cost
                );
            }
        }
    }

    #[test]
    fn oracle_assignment_is_priority_feasible() {
        let inst = line(&[0.0, 0.4, -0.7, 1.3, 0.9, -1.8]);
        let res = solve_optimal(&inst, a(2.0)).unwrap();
        for j in 1..inst.len() {
            assert!((0..j).any(|i| within_range(inst.dist(i, j), res.assignment.get(i))));
        }
        assert!(
            (cost_alpha(&res.assignment, a(2.0)) - res.cost).abs() <= 1e-9 * res.cost.max(1.0)
        );
    }

    #[test]
    fn maximal_dual_three_collinear() {
        let inst = line(&[0.0, 1.0, 2.0]);
        let alpha = a(2.0);
        let dual = maximal_dual(&inst, alpha);
        assert_eq!(dual.values(), &[0.0, 1.0, 1.0]);
        verify_dual_feasibility(&inst, alpha, dual.values()).unwrap();
    }

    #[test]
    fn maximal_dual_every_point_has_tight_witness() {
        let inst = line(&[0.0, 0.8, -0.5, 1.9, 0.2]);
        let alpha = a(2.0);
        let dual = maximal_dual(&inst, alpha);
        verify_dual_feasibility(&inst, alpha, dual.values()).unwrap();
        let y = dual.values();
        for j in 1..inst.len() {
            let mut witnessed = false;
            for i in 0..j {
                let d_ij = inst.dist(i, j);
                for r in inst.candidate_ranges(i) {
                    if r < d_ij {
                        continue;
                    }
                    let sum: f64 = ((i + 1)..inst.len())
                        .filter(|&k| inst.dist(i, k) <= r)
                        .map(|k| y[k])
                        .sum();
                    if is_tight(sum, r.powf(2.0)) {
                        witnessed = true;
                    }
                }
            }
            assert!(witnessed, "point {j} has no tight set");
        }
    }

    #[test]
    fn minimal_cover_is_tight_feasible_and_irreducible() {
        let inst = line(&[0.0, 0.8, -0.5, 1.9, 0.2, -1.4]);
        let alpha = a(2.0);
        let dual = maximal_dual(&inst, alpha);
        let cover = minimal_tight_cover(&inst, alpha, &dual).unwrap();
        let y = dual.values();
        let n = inst.len();

        let mut centers: Vec<usize> = cover.iter().map(|s| s.center).collect();
        centers.dedup();
        assert_eq!(centers.len(), cover.len(), "one set per center");

        for set in &cover {
            let sum: f64 = set.members(&inst).iter().map(|&k| y[k]).sum();
            assert!(is_tight(sum, set.cost(alpha)));
        }
        let covers_all = |sets: &[&CoverSet]| {
            (1..n).all(|j| sets.iter().any(|s| s.contains(&inst, j)))
        };
        let all: Vec<&CoverSet> = cover.iter().collect();
        assert!(covers_all(&all));
        for drop_idx in 0..cover.len() {
            let rest: Vec<&CoverSet> = cover
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop_idx)
                .map(|(_, s)| s)
                .collect();
            assert!(!covers_all(&rest), "set {drop_idx} is redundant");
        }
    }

    #[test]
    fn approx_two_points_is_exactly_five_alpha() {
        let inst = line(&[0.0, 2.0]);
        let alpha = a(2.0);
        let (ranges, cert) = approx_5alpha(&inst, alpha).unwrap();
        assert_eq!(ranges.ranges(), &[10.0, 0.0]);
        assert_eq!(cert.dual_total, 4.0);
        let opt = solve_optimal(&inst, alpha).unwrap();
        let ratio = cost_alpha(&ranges, alpha) / opt.cost;
        assert_eq!(ratio, 25.0);
    }

    #[test]
    fn approx_bounds_and_feasibility() {
        let cases = [
            vec![0.0, 0.4, -0.7, 1.3, 0.9, -1.8],
            vec![0.0, 1.0, 2.0, 3.0, 4.0],
            vec![0.0, 0.1, 0.2, 1.5, -0.3, 0.7, 2.2],
        ];
        let alpha = a(2.0);
        for coords in cases {
            let inst = line(&coords);
            let (ranges, cert) = approx_5alpha(&inst, alpha).unwrap();
            // priority feasibility
            for j in 1..inst.len() {
                assert!((0..j).any(|i| within_range(inst.dist(i, j), ranges.get(i))));
            }
            let cost = cost_alpha(&ranges, alpha);
            let factor = 5.0f64.powf(alpha.get());
            assert!(cost <= factor * cert.dual_total * (1.0 + 1e-9));
            let opt = solve_optimal(&inst, alpha).unwrap();
            assert!(cert.dual_total <= opt.cost * (1.0 + 1e-9), "weak duality");
        }
    }
}
