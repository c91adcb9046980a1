//! Arrival instances, range assignments, traces, and the cost model.
//!
//! An instance is an ordered sequence of points in a declared space; the
//! point at index 0 is the broadcast source. A range assignment gives every
//! point a transmission radius, inducing a directed graph with an edge
//! `(i, j)` whenever `dist(i, j) <= r(i)`. Feasibility means every inserted
//! point is reachable from the source in that graph.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack of the coverage test `dist <= r`.
pub const COVERAGE_REL_TOL: f64 = 1e-12;
/// Absolute slack of the coverage test `dist <= r`.
pub const COVERAGE_ABS_TOL: f64 = 1e-12;

/// Tolerance for metric-matrix validation (symmetry, diagonal, triangle
/// inequality) and for trace bookkeeping checks.
pub const METRIC_TOL: f64 = 1e-9;

/// Knife-edge equality `dist == r` is a legal edge, so the coverage test
/// carries relative plus absolute slack against floating-point roundoff.
#[inline]
pub fn within_range(dist: f64, range: f64) -> bool {
    dist <= range * (1.0 + COVERAGE_REL_TOL) + COVERAGE_ABS_TOL
}

/// Distance-power gradient. Construction rejects values not above 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::InvalidAlpha(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// The space an instance lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Line,
    Plane,
    Metric,
}

#[derive(Debug, Clone, PartialEq)]
enum Geometry {
    Line(Vec<f64>),
    Plane(Vec<[f64; 2]>),
    Metric(Vec<Vec<f64>>),
}

/// An ordered arrival sequence. Index equals arrival time; index 0 is the
/// source. Points are pairwise distinct and, in the metric case, the matrix
/// is validated for symmetry, zero diagonal, and the triangle inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalInstance {
    geometry: Geometry,
}

impl ArrivalInstance {
    pub fn line(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInstance("no points".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInstance(format!("non-finite coordinate {c}")));
        }
        let inst = ArrivalInstance {
            geometry: Geometry::Line(coords),
        };
        inst.check_distinct()?;
        Ok(inst)
    }

    pub fn plane(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInstance("no points".into()));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInstance("non-finite coordinate".into()));
        }
        let inst = ArrivalInstance {
            geometry: Geometry::Plane(points),
        };
        inst.check_distinct()?;
        Ok(inst)
    }

    pub fn metric(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::InvalidInstance("no points".into()));
        }
        if matrix.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInstance("matrix is not square".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "distance ({i},{j}) = {d} is not a finite nonnegative value"
                    )));
                }
                if i == j && d.abs() > METRIC_TOL {
                    return Err(Error::InvalidInstance(format!(
                        "diagonal entry ({i},{i}) = {d} is not zero"
                    )));
                }
                if (d - matrix[j][i]).abs() > METRIC_TOL {
                    return Err(Error::InvalidInstance(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if matrix[i][j] > matrix[i][k] + matrix[k][j] + METRIC_TOL {
                        return Err(Error::InvalidInstance(format!(
                            "triangle inequality violated at ({i},{j};{k})"
                        )));
                    }
                }
            }
        }
        let inst = ArrivalInstance {
            geometry: Geometry::Metric(matrix),
        };
        inst.check_distinct()?;
        Ok(inst)
    }

    fn check_distinct(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.dist(i, j) <= 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Space {
        match self.geometry {
            Geometry::Line(_) => Space::Line,
            Geometry::Plane(_) => Space::Plane,
            Geometry::Metric(_) => Space::Metric,
        }
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        match &self.geometry {
            Geometry::Line(c) => c.len(),
            Geometry::Plane(p) => p.len(),
            Geometry::Metric(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Plane coordinates, when this is a plane instance.
    pub fn plane_points(&self) -> Option<&[[f64; 2]]> {
        match &self.geometry {
            Geometry::Plane(p) => Some(p),
            _ => None,
        }
    }

    /// Line coordinates, when this is a line instance.
    pub fn line_points(&self) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Line(c) => Some(c),
            _ => None,
        }
    }

    /// Distance between points `i` and `j`. Symmetric, zero iff `i == j`.
    ///
    /// Panics when an index is out of bounds.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.geometry {
            Geometry::Line(c) => (c[i] - c[j]).abs(),
            Geometry::Plane(p) => {
                let (a, b) = (p[i], p[j]);
                (a[0] - b[0]).hypot(a[1] - b[1])
            }
            Geometry::Metric(m) => m[i][j],
        }
    }

    /// Ascending distinct distances from point `i` to later arrivals: the
    /// radii at which the coverage set of `i` changes. Empty for the last
    /// point.
    pub fn candidate_ranges(&self, i: usize) -> Vec<f64> {
        let n = self.len();
        assert!(i < n, "index {i} out of bounds for {n} points");
        let mut radii: Vec<f64> = ((i + 1)..n).map(|j| self.dist(i, j)).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        radii
    }

    /// True iff every point with index below `prefix_len` is reachable from
    /// the source in the directed graph with edges `dist(i,j) <= r(i)` (plus
    /// coverage tolerance). Vacuously true for `prefix_len <= 1`.
    pub fn is_broadcast_feasible(&self, prefix_len: usize, assignment: &RangeAssignment) -> bool {
        assert!(
            assignment.len() >= prefix_len,
            "assignment covers {} points, prefix is {}",
            assignment.len(),
            prefix_len
        );
        if prefix_len <= 1 {
            return true;
        }
        let mut reached = vec![false; prefix_len];
        let mut queue = vec![0usize];
        reached[0] = true;
        let mut seen = 1usize;
        while let Some(i) = queue.pop() {
            let r = assignment.get(i);
            for j in 0..prefix_len {
                if !reached[j] && within_range(self.dist(i, j), r) {
                    reached[j] = true;
                    seen += 1;
                    queue.push(j);
                }
            }
        }
        seen == prefix_len
    }
}

/// One transmission radius per point, in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeAssignment {
    ranges: Vec<f64>,
}

impl RangeAssignment {
    pub fn new(ranges: Vec<f64>) -> Result<Self> {
        if let Some(r) = ranges.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(Error::InvalidInstance(format!("invalid range {r}")));
        }
        Ok(RangeAssignment { ranges })
    }

    pub fn zeros(n: usize) -> Self {
        RangeAssignment {
            ranges: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.ranges[i]
    }

    pub fn ranges(&self) -> &[f64] {
        &self.ranges
    }
}

/// Total cost of an assignment: the sum of ranges raised to alpha.
pub fn cost_alpha(assignment: &RangeAssignment, alpha: Alpha) -> f64 {
    assignment
        .ranges
        .iter()
        .map(|r| r.powf(alpha.get()))
        .sum()
}

/// The per-arrival history of a simulation: snapshot `j` holds the ranges of
/// the first `j + 1` points just after arrival `j`, and `increments[j]` the
/// cost paid at that arrival.
#[derive(Debug, Clone)]
pub struct AssignmentTrace {
    snapshots: Vec<RangeAssignment>,
    increments: Vec<f64>,
}

impl AssignmentTrace {
    pub(crate) fn new() -> Self {
        AssignmentTrace {
            snapshots: Vec::new(),
            increments: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, snapshot: RangeAssignment, increment: f64) {
        debug_assert_eq!(snapshot.len(), self.snapshots.len() + 1);
        self.snapshots.push(snapshot);
        self.increments.push(increment);
    }

    pub fn snapshots(&self) -> &[RangeAssignment] {
        &self.snapshots
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn final_assignment(&self) -> &RangeAssignment {
        self.snapshots.last().expect("trace has no snapshots")
    }

    pub fn total_cost(&self, alpha: Alpha) -> f64 {
        cost_alpha(self.final_assignment(), alpha)
    }

    /// Check the trace invariants against its instance: monotone ranges,
    /// at most one range changed per arrival, broadcast feasibility after
    /// every snapshot, and increment bookkeeping consistency.
    pub fn validate(&self, instance: &ArrivalInstance, alpha: Alpha) -> Result<()> {
        let n = instance.len();
        if self.snapshots.len() != n {
            return Err(Error::InvariantViolation(format!(
                "{} snapshots for {} arrivals",
                self.snapshots.len(),
                n
            )));
        }
        for (j, snap) in self.snapshots.iter().enumerate() {
            if snap.len() != j + 1 {
                return Err(Error::InvariantViolation(format!(
                    "snapshot {j} has {} entries",
                    snap.len()
                )));
            }
            if !instance.is_broadcast_feasible(j + 1, snap) {
                return Err(Error::InvariantViolation(format!(
                    "snapshot {j} is not broadcast-feasible"
                )));
            }
            if j > 0 {
                let prev = &self.snapshots[j - 1];
                let mut touched = 0usize;
                for i in 0..j {
                    if snap.get(i) < prev.get(i) {
                        return Err(Error::InvariantViolation(format!(
                            "range of point {i} decreased at arrival {j}"
                        )));
                    }
                    if snap.get(i) > prev.get(i) {
                        touched += 1;
                    }
                }
                if snap.get(j) != 0.0 {
                    return Err(Error::InvariantViolation(format!(
                        "arrival {j} started with nonzero range"
                    )));
                }
                if touched > 1 {
                    return Err(Error::InvariantViolation(format!(
                        "{touched} ranges changed at arrival {j}"
                    )));
                }
                let expected = cost_alpha(prev, alpha) + self.increments[j];
                let actual = cost_alpha(snap, alpha);
                if (actual - expected).abs() > METRIC_TOL * expected.abs().max(1.0) {
                    return Err(Error::InvariantViolation(format!(
                        "cost bookkeeping off at arrival {j}: {actual} vs {expected}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
}

impl ArrivalInstance {
    /// Serialize to the instance text format: a JSON document with a `space`
    /// tag and either `points` (coordinate arrays, arrival order) or
    /// `matrix` (distance rows).
    pub fn to_json_string(&self) -> String {
        let doc = match &self.geometry {
            Geometry::Line(c) => InstanceDoc {
                space: "line".into(),
                points: Some(c.iter().map(|&x| vec![x]).collect()),
                matrix: None,
            },
            Geometry::Plane(p) => InstanceDoc {
                space: "plane".into(),
                points: Some(p.iter().map(|q| q.to_vec()).collect()),
                matrix: None,
            },
            Geometry::Metric(m) => InstanceDoc {
                space: "metric".into(),
                points: None,
                matrix: Some(m.clone()),
            },
        };
        serde_json::to_string_pretty(&doc).expect("instance serialization cannot fail")
    }

    /// Parse the instance text format. Validates the same invariants as the
    /// typed constructors.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: InstanceDoc =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        match doc.space.as_str() {
            "line" => {
                let pts = doc
                    .points
                    .ok_or_else(|| Error::Format("line instance needs `points`".into()))?;
                let coords = pts
                    .into_iter()
                    .map(|p| match p.as_slice() {
                        [x] => Ok(*x),
                        _ => Err(Error::Format("line points take one coordinate".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                ArrivalInstance::line(coords)
            }
            "plane" => {
                let pts = doc
                    .points
                    .ok_or_else(|| Error::Format("plane instance needs `points`".into()))?;
                let coords = pts
                    .into_iter()
                    .map(|p| match p.as_slice() {
                        [x, y] => Ok([*x, *y]),
                        _ => Err(Error::Format("plane points take two coordinates".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                ArrivalInstance::plane(coords)
            }
            "metric" => {
                let matrix = doc
                    .matrix
                    .ok_or_else(|| Error::Format("metric instance needs `matrix`".into()))?;
                ArrivalInstance::metric(matrix)
            }
            other => Err(Error::Format(format!("unknown space `{other}`"))),
        }
    }
}
