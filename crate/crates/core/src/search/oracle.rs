//! Exhaustive lattice oracle for tiny instances.
//!
//! Stochastic factor slices (the auxiliary and u tables) are enumerated on a
//! simplex lattice with `k` levels per coordinate. Input kernels are
//! enumerated at the simplex corners only, i.e. as deterministic maps: for a
//! fixed auxiliary table the weighted objectives are convex in the input
//! kernel, so corners attain the per-table maximum. Resolution `k = 1`
//! degenerates every slice to a single point and hence to one strategy.
//!
//! Refining `k` to `2k - 1` keeps the old lattice as a subset, so frontiers
//! improve monotonically along that schedule.

use rayon::prelude::*;

use crate::channel::{StateBroadcastChannel, Strategy, StrategyClass1, StrategyClass2};
use crate::error::{Error, Result};
use crate::prob::{Factor, VariableSpec};

use super::hull::{upper_frontier, TaggedPoint};
use super::{
    evaluate_bound, polytope_vertices, BoundKind, ChannelClass, FrontierPolyline, FrontierVertex,
    SearchConfig,
};

/// All points of the d-simplex lattice with `k` levels per coordinate:
/// nonnegative integer compositions of k - 1 into d parts, divided by k - 1.
/// For k = 1 the single point is the corner e0.
fn simplex_lattice(dim: usize, k: usize) -> Vec<Vec<f64>> {
    if k == 1 {
        let mut corner = vec![0.0; dim];
        corner[0] = 1.0;
        return vec![corner];
    }
    let total = k - 1;
    let mut out = Vec::new();
    let mut counts = vec![0usize; dim];
    fn rec(counts: &mut Vec<usize>, idx: usize, left: usize, total: usize, out: &mut Vec<Vec<f64>>) {
        if idx + 1 == counts.len() {
            counts[idx] = left;
            out.push(counts.iter().map(|&c| c as f64 / total as f64).collect());
            return;
        }
        for c in 0..=left {
            counts[idx] = c;
            rec(counts, idx + 1, left - c, total, out);
        }
    }
    rec(&mut counts, 0, total, total, &mut out);
    out
}

/// Corners of the d-simplex (deterministic choices); a single point for k = 1.
fn corner_lattice(dim: usize, k: usize) -> Vec<Vec<f64>> {
    let picks = if k == 1 { 1 } else { dim };
    (0..picks)
        .map(|i| {
            let mut corner = vec![0.0; dim];
            corner[i] = 1.0;
            corner
        })
        .collect()
}

struct SliceChoices {
    /// Candidate contents for each conditioning slice of one factor, in
    /// slice order. All slices of a factor share the same candidate list.
    per_slice: Vec<Vec<Vec<f64>>>,
}

impl SliceChoices {
    fn uniform(slices: usize, options: Vec<Vec<f64>>) -> Self {
        Self {
            per_slice: vec![options; slices],
        }
    }
}

struct Enumeration {
    /// One entry per factor slice across all factors, flattened in factor
    /// order; each entry lists the candidate slice contents.
    slots: Vec<Vec<Vec<f64>>>,
}

impl Enumeration {
    fn count(&self) -> u128 {
        self.slots
            .iter()
            .map(|s| s.len() as u128)
            .try_fold(1u128, |acc, n| acc.checked_mul(n))
            .unwrap_or(u128::MAX)
    }

    /// Materializes the flat slice contents for one enumeration index.
    fn decode(&self, mut idx: u64) -> Vec<&[f64]> {
        let mut picks = Vec::with_capacity(self.slots.len());
        for slot in self.slots.iter().rev() {
            let n = slot.len() as u64;
            picks.push(slot[(idx % n) as usize].as_slice());
            idx /= n;
        }
        picks.reverse();
        picks
    }
}

fn spec(name: &str, card: usize) -> VariableSpec {
    VariableSpec::new(name, card).expect("valid variable spec")
}

struct OracleSetup {
    enumeration: Enumeration,
    class: ChannelClass,
    w: usize,
    x: usize,
    u: usize,
    v1: usize,
    v2: usize,
}

impl OracleSetup {
    fn new(class: ChannelClass, c: &StateBroadcastChannel, cfg: &SearchConfig, k: usize) -> Self {
        let (u, v1, v2) = cfg.resolved_cards(c);
        let w = c.w_card();
        let x = c.x_card();
        let aux_options = simplex_lattice(v1 * v2, k);
        let input_options = corner_lattice(x, k);
        let mut slots: Vec<Vec<Vec<f64>>> = Vec::new();
        if class == ChannelClass::Two {
            slots.extend(SliceChoices::uniform(1, simplex_lattice(u, k)).per_slice);
            slots.extend(SliceChoices::uniform(w * u, aux_options).per_slice);
        } else {
            slots.extend(SliceChoices::uniform(w, aux_options).per_slice);
        }
        slots.extend(SliceChoices::uniform(w * v1 * v2, input_options).per_slice);
        Self {
            enumeration: Enumeration { slots },
            class,
            w,
            x,
            u,
            v1,
            v2,
        }
    }

    fn strategy_at(&self, idx: u64) -> Strategy {
        let picks = self.enumeration.decode(idx);
        let mut cursor = 0usize;
        let mut take = |n: usize| {
            let part = &picks[cursor..cursor + n];
            cursor += n;
            part.iter().flat_map(|s| s.iter().copied()).collect::<Vec<f64>>()
        };
        match self.class {
            ChannelClass::One => {
                let aux_mass = take(self.w);
                let input_mass = take(self.w * self.v1 * self.v2);
                let aux = Factor::new(
                    vec![spec("V1", self.v1), spec("V2", self.v2)],
                    vec![spec("W", self.w)],
                    aux_mass,
                )
                .expect("lattice aux is well-shaped");
                let input = Factor::new(
                    vec![spec("X", self.x)],
                    vec![spec("W", self.w), spec("V1", self.v1), spec("V2", self.v2)],
                    input_mass,
                )
                .expect("lattice input is well-shaped");
                Strategy::Class1(StrategyClass1::new(aux, input).expect("well-formed"))
            }
            ChannelClass::Two => {
                let u_mass = take(1);
                let aux_mass = take(self.w * self.u);
                let input_mass = take(self.w * self.v1 * self.v2);
                let u_dist = Factor::unconditioned(vec![spec("U", self.u)], u_mass)
                    .expect("lattice u is well-shaped");
                let aux = Factor::new(
                    vec![spec("V1", self.v1), spec("V2", self.v2)],
                    vec![spec("W", self.w), spec("U", self.u)],
                    aux_mass,
                )
                .expect("lattice aux is well-shaped");
                let input = Factor::new(
                    vec![spec("X", self.x)],
                    vec![spec("W", self.w), spec("V1", self.v1), spec("V2", self.v2)],
                    input_mass,
                )
                .expect("lattice input is well-shaped");
                Strategy::Class2(StrategyClass2::new(u_dist, aux, input).expect("well-formed"))
            }
        }
    }
}

fn pareto_compact(points: &mut Vec<TaggedPoint>) {
    let filtered = upper_frontier(std::mem::take(points));
    *points = filtered;
}

/// Exhaustively evaluates every lattice strategy and returns the hulled
/// frontier. Errors with the computed count when it exceeds the cap.
pub fn grid_oracle(
    class: ChannelClass,
    kind: BoundKind,
    c: &StateBroadcastChannel,
    resolution: usize,
    cfg: &SearchConfig,
) -> Result<FrontierPolyline> {
    if resolution < 1 {
        return Err(Error::InvalidArgument("resolution must be >= 1".into()));
    }
    let report = c.validate();
    if !report.is_valid() {
        return Err(Error::InvalidArgument(format!(
            "channel is invalid:\n{report}"
        )));
    }
    let setup = OracleSetup::new(class, c, cfg, resolution);
    let count = setup.enumeration.count();
    if count > cfg.grid_cap as u128 {
        return Err(Error::TooLarge {
            cells: count,
            cap: cfg.grid_cap as u128,
        });
    }
    let count = count as u64;

    const CHUNK: u64 = 16_384;
    let chunks: Vec<(u64, u64)> = (0..count)
        .step_by(CHUNK as usize)
        .map(|start| (start, (start + CHUNK).min(count)))
        .collect();
    let partials: Vec<Result<Vec<TaggedPoint>>> = chunks
        .into_par_iter()
        .map(|(start, end)| {
            let mut points = Vec::new();
            for idx in start..end {
                let strategy = setup.strategy_at(idx);
                if let Some(t) = evaluate_bound(class, kind, c, &strategy, cfg.markov_tol)? {
                    for (r1, r2) in polytope_vertices(&t) {
                        points.push(TaggedPoint {
                            r1,
                            r2,
                            tag: idx as usize,
                        });
                    }
                }
            }
            pareto_compact(&mut points);
            Ok(points)
        })
        .collect();

    let mut all = Vec::new();
    for partial in partials {
        all.extend(partial?);
    }
    let hull = upper_frontier(all);

    let vertices: Vec<FrontierVertex> = hull
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let strategy = setup.strategy_at(p.tag as u64);
            let triple = evaluate_bound(class, kind, c, &strategy, cfg.markov_tol)
                .expect("strategy evaluated during the sweep")
                .expect("strategy admissible during the sweep");
            let mu = supporting_direction(&hull, i);
            FrontierVertex {
                r1: p.r1,
                r2: p.r2,
                mu1: mu.0,
                mu2: mu.1,
                value: mu.0 * p.r1 + mu.1 * p.r2,
                triple,
                strategy,
            }
        })
        .collect();
    Ok(FrontierPolyline {
        vertices,
        hulled: true,
    })
}

/// A direction under which hull vertex `i` is optimal: the outward normal of
/// the chord between its neighbors, with axis directions at the endpoints.
fn supporting_direction(hull: &[TaggedPoint], i: usize) -> (f64, f64) {
    if hull.len() == 1 {
        return (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
    }
    if i == 0 {
        return (0.0, 1.0);
    }
    if i + 1 == hull.len() {
        return (1.0, 0.0);
    }
    let prev = hull[i - 1];
    let next = hull[i + 1];
    let mut mu = (prev.r2 - next.r2, next.r1 - prev.r1);
    let norm = (mu.0 * mu.0 + mu.1 * mu.1).sqrt();
    if norm > 0.0 {
        mu = (mu.0 / norm, mu.1 / norm);
    } else {
        mu = (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
    }
    mu
}
