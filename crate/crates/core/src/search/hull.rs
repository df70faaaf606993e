//! Rate-pair geometry: per-strategy polytope vertices, Pareto filtering, and
//! the upper concave hull that time-sharing induces.

use crate::bounds::RateTriple;

/// A candidate rate pair tagged with the pool entry that produced it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TaggedPoint {
    pub r1: f64,
    pub r2: f64,
    pub tag: usize,
}

/// Vertices of {R >= 0, R1 <= r1, R2 <= r2, R1 + R2 <= sum} after clamping
/// the raw bounds to the nonnegative orthant. At most five points.
pub fn polytope_vertices(t: &RateTriple) -> Vec<(f64, f64)> {
    let r1 = t.r1_bound.max(0.0);
    let r2 = t.r2_bound.max(0.0);
    let s = t.sum_bound.min(r1 + r2).max(0.0);
    let mut vertices = vec![
        (0.0, 0.0),
        (r1.min(s), 0.0),
        (0.0, r2.min(s)),
    ];
    if s < r1 + r2 {
        if s >= r1 {
            vertices.push((r1, s - r1));
        }
        if s >= r2 {
            vertices.push((s - r2, r2));
        }
    } else {
        vertices.push((r1, r2));
    }
    vertices.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1))
    });
    vertices.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    vertices
}

/// Largest weighted value mu . R over the clamped per-strategy polytope.
pub fn weighted_polytope_value(t: &RateTriple, mu: (f64, f64)) -> f64 {
    polytope_vertices(t)
        .into_iter()
        .map(|(x, y)| mu.0 * x + mu.1 * y)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Keeps the Pareto-maximal points and then the corners of their upper
/// concave envelope, returned with R1 ascending and R2 strictly descending
/// (except for a single point). Ties keep the lowest tag, so the result is
/// deterministic for any input order.
pub(crate) fn upper_frontier(mut points: Vec<TaggedPoint>) -> Vec<TaggedPoint> {
    if points.is_empty() {
        return points;
    }
    points.sort_by(|a, b| {
        a.r1.total_cmp(&b.r1)
            .then(b.r2.total_cmp(&a.r2))
            .then(a.tag.cmp(&b.tag))
    });
    // Keep only the best R2 per distinct R1 so the sweep below sees strictly
    // increasing abscissas.
    points.dedup_by(|a, b| a.r1 == b.r1);

    // Pareto sweep from the right: keep strictly rising R2.
    let mut pareto: Vec<TaggedPoint> = Vec::new();
    let mut best_r2 = f64::NEG_INFINITY;
    for p in points.iter().rev() {
        if p.r2 > best_r2 {
            pareto.push(*p);
            best_r2 = p.r2;
        }
    }
    pareto.reverse();

    // Upper concave envelope; collinear middle points are dropped.
    let mut hull: Vec<TaggedPoint> = Vec::new();
    for p in pareto {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.r1 - a.r1) * (p.r2 - a.r2) - (b.r2 - a.r2) * (p.r1 - a.r1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Piecewise-linear boundary value at `r1`, extending flat to the left of
/// the first vertex. `None` beyond the largest achievable R1.
pub(crate) fn polyline_value_at(vertices: &[(f64, f64)], r1: f64) -> Option<f64> {
    let first = vertices.first()?;
    if r1 <= first.0 {
        return Some(first.1);
    }
    let last = vertices.last()?;
    if r1 > last.0 {
        return None;
    }
    for w in vertices.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if r1 <= x1 {
            if x1 == x0 {
                return Some(y0.max(y1));
            }
            let t = (r1 - x0) / (x1 - x0);
            return Some(y0 + t * (y1 - y0));
        }
    }
    Some(last.1)
}

/// How far `point` sticks out beyond the region under `vertices`; zero when
/// the polyline componentwise dominates it.
pub(crate) fn domination_excess(vertices: &[(f64, f64)], point: (f64, f64)) -> f64 {
    if vertices.is_empty() {
        return point.0.max(point.1).max(0.0);
    }
    let max_r1 = vertices.last().expect("nonempty").0;
    let x_excess = (point.0 - max_r1).max(0.0);
    let boundary = polyline_value_at(vertices, point.0.min(max_r1)).expect("within range");
    let y_excess = (point.1 - boundary).max(0.0);
    x_excess.max(y_excess)
}
