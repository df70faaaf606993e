//! Pareto-frontier search over strategy space.
//!
//! Each direction of a quarter-circle sweep is optimized by multi-start hill
//! climbing over factor parameters; every retained strategy lands in a
//! candidate pool that is shared across bound kinds on the same channel, so
//! inner-frontier strategies are always also scored under the outer bounds.
//! Frontiers are the upper concave hull of every polytope vertex the pool
//! achieves, which is exactly the time-sharing convexification.
//!
//! Work items are seeded independently from (seed, direction, restart), so
//! parallel and serial runs produce bit-identical frontiers, and adding
//! restarts never changes existing work items.

mod hull;
mod oracle;

pub use hull::{polytope_vertices, weighted_polytope_value};
pub use oracle::grid_oracle;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{class1_inner, class1_outer, class2_inner_with_tol, class2_outer, class2_terms, RateTriple};
use crate::channel::{
    induced_joint_class1, induced_joint_class2, StateBroadcastChannel, Strategy, StrategyClass1,
    StrategyClass2,
};
use crate::error::{Error, Result};
use crate::identity::derive_seed;
use crate::prob::{Factor, VariableSpec};
use crate::DEFAULT_MARKOV_TOL;

use hull::{domination_excess, polyline_value_at, upper_frontier, TaggedPoint};

/// Which of the two strategy families is being searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelClass {
    One,
    Two,
}

impl ChannelClass {
    pub fn as_u8(self) -> u8 {
        match self {
            ChannelClass::One => 1,
            ChannelClass::Two => 2,
        }
    }
}

/// Which side of the region sandwich is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Inner,
    Outer,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Inner => "inner",
            BoundKind::Outer => "outer",
        }
    }
}

/// Search knobs. Auxiliary cardinalities default to |V_t| = |X||W| + 1 and
/// |U| = 2 when left unset.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub u_card: Option<usize>,
    pub v1_card: Option<usize>,
    pub v2_card: Option<usize>,
    /// Number of sweep directions over the quarter circle.
    pub directions: usize,
    /// Random restarts per direction.
    pub restarts: usize,
    /// Hill-climbing iterations per restart.
    pub refine_iters: usize,
    /// Perturbation scale decays geometrically from first to last iteration.
    pub initial_scale: f64,
    pub final_scale: f64,
    pub seed: u64,
    pub markov_tol: f64,
    /// Lattice levels per coordinate for the exhaustive oracle.
    pub grid_resolution: usize,
    /// Cap on oracle strategy evaluations.
    pub grid_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            u_card: None,
            v1_card: None,
            v2_card: None,
            directions: 33,
            restarts: 16,
            refine_iters: 400,
            initial_scale: 0.5,
            final_scale: 1e-3,
            seed: 0,
            markov_tol: DEFAULT_MARKOV_TOL,
            grid_resolution: 9,
            grid_cap: 10_000_000,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.directions < 2 {
            return Err(Error::InvalidArgument(
                "at least two sweep directions are required".into(),
            ));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidArgument("at least one restart is required".into()));
        }
        for card in [self.u_card, self.v1_card, self.v2_card].into_iter().flatten() {
            if card < 1 {
                return Err(Error::InvalidArgument(
                    "auxiliary cardinalities must be >= 1".into(),
                ));
            }
        }
        if !(self.initial_scale > 0.0 && self.final_scale > 0.0) {
            return Err(Error::InvalidArgument(
                "perturbation scales must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Resolved (|U|, |V1|, |V2|) for a channel.
    pub fn resolved_cards(&self, c: &StateBroadcastChannel) -> (usize, usize, usize) {
        let default_v = c.x_card() * c.w_card() + 1;
        (
            self.u_card.unwrap_or(2),
            self.v1_card.unwrap_or(default_v),
            self.v2_card.unwrap_or(default_v),
        )
    }

    fn scale_at(&self, iter: usize) -> f64 {
        if self.refine_iters <= 1 {
            return self.initial_scale;
        }
        let t = iter as f64 / (self.refine_iters - 1) as f64;
        self.initial_scale * (self.final_scale / self.initial_scale).powf(t)
    }
}

/// The i-th sweep direction; endpoints are exactly (1,0) and (0,1).
pub fn sweep_direction(i: usize, directions: usize) -> (f64, f64) {
    if i == 0 {
        return (1.0, 0.0);
    }
    if i + 1 >= directions {
        return (0.0, 1.0);
    }
    let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (directions - 1) as f64;
    (theta.cos(), theta.sin())
}

fn direction_salt(mu: (f64, f64)) -> u64 {
    mu.0.to_bits() ^ mu.1.to_bits().rotate_left(23)
}

/// One frontier vertex with the strategy and direction that produced it.
#[derive(Debug, Clone)]
pub struct FrontierVertex {
    pub r1: f64,
    pub r2: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// mu1 * r1 + mu2 * r2 for this vertex.
    pub value: f64,
    /// Raw bound values of the producing strategy.
    pub triple: RateTriple,
    pub strategy: Strategy,
}

/// Pareto frontier polyline: vertices sorted by R1 ascending with R2
/// nonincreasing; the enclosed region is the time-sharing hull.
#[derive(Debug, Clone)]
pub struct FrontierPolyline {
    pub vertices: Vec<FrontierVertex>,
    pub hulled: bool,
}

impl FrontierPolyline {
    pub fn max_r1(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.r1)
    }

    pub fn max_r2(&self) -> f64 {
        self.vertices.first().map_or(0.0, |v| v.r2)
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.vertices.iter().map(|v| (v.r1, v.r2)).collect()
    }

    /// Boundary R2 at a given R1, `None` beyond the frontier's reach.
    pub fn value_at(&self, r1: f64) -> Option<f64> {
        polyline_value_at(&self.points(), r1)
    }

    /// Componentwise domination of a point, within a tolerance.
    pub fn dominates(&self, point: (f64, f64), tol: f64) -> bool {
        domination_excess(&self.points(), point) <= tol
    }
}

/// Samples simplex weights; `power` > 1 concentrates mass on few cells.
fn sample_simplex<R: Rng>(rng: &mut R, cells: usize, power: f64) -> Vec<f64> {
    let mut mass: Vec<f64> = (0..cells)
        .map(|_| (-(1.0 - rng.random::<f64>()).ln()).powf(power))
        .collect();
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / cells as f64; cells];
    }
    for p in &mut mass {
        *p /= total;
    }
    mass
}

fn spec(name: &str, card: usize) -> VariableSpec {
    VariableSpec::new(name, card).expect("valid variable spec")
}

/// Contiguous block index of `v` when `card` values are split into `blocks`
/// nearly equal parts.
fn block_of(v: usize, card: usize, blocks: usize) -> usize {
    (v * blocks) / card
}

fn sample_class1<R: Rng>(
    rng: &mut R,
    c: &StateBroadcastChannel,
    v1: usize,
    v2: usize,
) -> StrategyClass1 {
    let w = c.w_card();
    let x = c.x_card();
    let aux_power = if rng.random_bool(0.5) { 1.0 } else { 3.0 };
    let input_power = if rng.random_bool(0.5) { 1.0 } else { 3.0 };
    let mut aux_mass = Vec::with_capacity(w * v1 * v2);
    for _ in 0..w {
        aux_mass.extend(sample_simplex(rng, v1 * v2, aux_power));
    }
    let aux = Factor::new(
        vec![spec("V1", v1), spec("V2", v2)],
        vec![spec("W", w)],
        aux_mass,
    )
    .expect("sampled aux is well-shaped");
    let mut input_mass = Vec::with_capacity(w * v1 * v2 * x);
    for _ in 0..w * v1 * v2 {
        input_mass.extend(sample_simplex(rng, x, input_power));
    }
    let input = Factor::new(
        vec![spec("X", x)],
        vec![spec("W", w), spec("V1", v1), spec("V2", v2)],
        input_mass,
    )
    .expect("sampled input is well-shaped");
    StrategyClass1::new(aux, input).expect("sampled strategy is well-formed")
}

/// Class-2 sampling keeps the chains U -> V1 -> X and U -> V2 -> X by
/// construction: each u owns one block of the V1 and V2 alphabets, so the
/// block index of either auxiliary determines everything u contributes.
fn sample_class2<R: Rng>(
    rng: &mut R,
    c: &StateBroadcastChannel,
    u: usize,
    v1: usize,
    v2: usize,
) -> StrategyClass2 {
    let w = c.w_card();
    let x = c.x_card();
    let blocks = u.min(v1).min(v2);
    let u_dist = Factor::unconditioned(
        vec![spec("U", u)],
        sample_simplex(rng, u, 1.0),
    )
    .expect("sampled u is well-shaped");

    let aux_power = if rng.random_bool(0.5) { 1.0 } else { 3.0 };
    let mut aux_mass = vec![0.0; w * u * v1 * v2];
    for wi in 0..w {
        // one payload per block, copied to every aliased u
        let mut payloads: Vec<Vec<f64>> = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let support: Vec<usize> = (0..v1 * v2)
                .filter(|idx| {
                    block_of(idx / v2, v1, blocks) == b && block_of(idx % v2, v2, blocks) == b
                })
                .collect();
            let weights = sample_simplex(rng, support.len(), aux_power);
            let mut slice = vec![0.0; v1 * v2];
            for (cell, weight) in support.into_iter().zip(weights) {
                slice[cell] = weight;
            }
            payloads.push(slice);
        }
        for ui in 0..u {
            let slice = &payloads[ui % blocks];
            let base = (wi * u + ui) * v1 * v2;
            aux_mass[base..base + v1 * v2].copy_from_slice(slice);
        }
    }
    let aux = Factor::new(
        vec![spec("V1", v1), spec("V2", v2)],
        vec![spec("W", w), spec("U", u)],
        aux_mass,
    )
    .expect("sampled aux is well-shaped");

    let input_power = if rng.random_bool(0.5) { 1.0 } else { 3.0 };
    let mut input_mass = Vec::with_capacity(w * v1 * v2 * x);
    for _ in 0..w * v1 * v2 {
        input_mass.extend(sample_simplex(rng, x, input_power));
    }
    let input = Factor::new(
        vec![spec("X", x)],
        vec![spec("W", w), spec("V1", v1), spec("V2", v2)],
        input_mass,
    )
    .expect("sampled input is well-shaped");
    StrategyClass2::new(u_dist, aux, input).expect("sampled strategy is well-formed")
}

/// Draws a valid random strategy; Class-2 samples satisfy the Markov chains
/// by construction and are re-verified in debug builds.
pub fn sample_strategy(
    class: ChannelClass,
    c: &StateBroadcastChannel,
    cfg: &SearchConfig,
    seed: u64,
) -> Strategy {
    let (u, v1, v2) = cfg.resolved_cards(c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match class {
        ChannelClass::One => Strategy::Class1(sample_class1(&mut rng, c, v1, v2)),
        ChannelClass::Two => {
            let s = sample_class2(&mut rng, c, u, v1, v2);
            #[cfg(debug_assertions)]
            {
                let j = induced_joint_class2(c, &s).expect("sampled joint composes");
                let report = crate::channel::markov_check_with_tol(&j, cfg.markov_tol)
                    .expect("markov variables exist");
                debug_assert!(
                    report.pass,
                    "sampler emitted a chain-violating strategy: {report:?}"
                );
            }
            Strategy::Class2(s)
        }
    }
}

/// Evaluates one strategy under a bound kind. `Ok(None)` means the strategy
/// is inadmissible for the inner Class-2 bound (Markov violation).
pub fn evaluate_bound(
    class: ChannelClass,
    kind: BoundKind,
    c: &StateBroadcastChannel,
    strategy: &Strategy,
    markov_tol: f64,
) -> Result<Option<RateTriple>> {
    match (class, strategy) {
        (ChannelClass::One, Strategy::Class1(s)) => {
            let j = induced_joint_class1(c, s)?;
            let t = match kind {
                BoundKind::Outer => class1_outer(&j)?,
                BoundKind::Inner => class1_inner(&j)?,
            };
            Ok(Some(t))
        }
        (ChannelClass::Two, Strategy::Class2(s)) => {
            let j = induced_joint_class2(c, s)?;
            match kind {
                BoundKind::Outer => Ok(Some(class2_outer(&class2_terms(&j)?))),
                BoundKind::Inner => match class2_inner_with_tol(&j, markov_tol) {
                    Ok(t) => Ok(Some(t)),
                    Err(Error::MarkovViolation { .. }) => Ok(None),
                    Err(e) => Err(e),
                },
            }
        }
        _ => Err(Error::InvalidArgument(
            "strategy family does not match the requested class".into(),
        )),
    }
}

struct ClimbOutcome {
    value: f64,
    strategy: Strategy,
}

/// Multi-start hill climbing for one (direction, restart) work item.
/// Perturbations touch only currently positive weights and clip at zero, so
/// Class-2 support patterns (and with them the Markov chains) survive.
fn hill_climb(
    class: ChannelClass,
    kind: BoundKind,
    c: &StateBroadcastChannel,
    mu: (f64, f64),
    cfg: &SearchConfig,
    item_seed: u64,
) -> Result<ClimbOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(item_seed);
    let mut current = sample_strategy(class, c, cfg, rng.random::<u64>());
    let triple = evaluate_bound(class, kind, c, &current, cfg.markov_tol)?;
    let mut current_value = triple
        .as_ref()
        .map_or(f64::NEG_INFINITY, |t| weighted_polytope_value(t, mu));

    for iter in 0..cfg.refine_iters {
        let scale = cfg.scale_at(iter);
        let (factor_idx, slice_idx, old_slice) = {
            let mut factors = factors_of_mut(&mut current);
            let fi = rng.random_range(0..factors.len());
            let slice_len = factors[fi].slice_len();
            let slices = factors[fi].slice_count();
            let si = rng.random_range(0..slices);
            let mass = factors[fi].mass_mut();
            let slice = &mut mass[si * slice_len..(si + 1) * slice_len];
            let positive: Vec<usize> = (0..slice_len).filter(|&i| slice[i] > 0.0).collect();
            if positive.is_empty() {
                continue;
            }
            let coord = positive[rng.random_range(0..positive.len())];
            let old = slice.to_vec();
            let delta = scale * (2.0 * rng.random::<f64>() - 1.0);
            slice[coord] = (slice[coord] + delta).max(0.0);
            let total: f64 = slice.iter().sum();
            if total <= 0.0 {
                slice.copy_from_slice(&old);
                continue;
            }
            for p in slice.iter_mut() {
                *p /= total;
            }
            (fi, si, old)
        };
        let cand_triple = evaluate_bound(class, kind, c, &current, cfg.markov_tol)?;
        let cand_value = cand_triple
            .as_ref()
            .map_or(f64::NEG_INFINITY, |t| weighted_polytope_value(t, mu));
        if cand_value > current_value {
            current_value = cand_value;
        } else {
            let mut factors = factors_of_mut(&mut current);
            let slice_len = factors[factor_idx].slice_len();
            let mass = factors[factor_idx].mass_mut();
            mass[slice_idx * slice_len..(slice_idx + 1) * slice_len].copy_from_slice(&old_slice);
        }
    }

    Ok(ClimbOutcome {
        value: current_value,
        strategy: current,
    })
}

fn factors_of_mut(s: &mut Strategy) -> Vec<&mut Factor> {
    match s {
        Strategy::Class1(s) => s.factors_mut(),
        Strategy::Class2(s) => s.factors_mut(),
    }
}

/// Maximizes mu1 R1 + mu2 R2 over the per-strategy polytopes reachable by
/// the configured search. Deterministic given the seed; more restarts can
/// only improve the result.
pub fn maximize_weighted(
    class: ChannelClass,
    kind: BoundKind,
    c: &StateBroadcastChannel,
    mu: (f64, f64),
    cfg: &SearchConfig,
) -> Result<(f64, Strategy)> {
    if !(mu.0 >= 0.0 && mu.1 >= 0.0) || (mu.0 == 0.0 && mu.1 == 0.0) {
        return Err(Error::InvalidArgument(
            "direction weights must be nonnegative and not both zero".into(),
        ));
    }
    cfg.validate()?;
    let salt = direction_salt(mu);
    let outcomes: Vec<ClimbOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            hill_climb(
                class,
                kind,
                c,
                mu,
                cfg,
                derive_seed(cfg.seed, salt, restart as u64),
            )
        })
        .collect::<Result<_>>()?;
    let best = outcomes
        .into_iter()
        .reduce(|best, cand| if cand.value > best.value { cand } else { best })
        .expect("restarts >= 1");
    Ok((best.value, best.strategy))
}

struct PoolEntry {
    strategy: Strategy,
    mu: (f64, f64),
}

/// Shared-pool frontier driver. Every sweep appends its per-restart winners
/// to the pool; frontiers for any bound kind are assembled from the whole
/// pool, so strategies found for one bound are always rescored under the
/// other.
pub struct RegionExplorer<'a> {
    channel: &'a StateBroadcastChannel,
    class: ChannelClass,
    cfg: SearchConfig,
    pool: Vec<PoolEntry>,
}

impl<'a> RegionExplorer<'a> {
    pub fn new(
        class: ChannelClass,
        channel: &'a StateBroadcastChannel,
        cfg: SearchConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let report = channel.validate();
        if !report.is_valid() {
            return Err(Error::InvalidArgument(format!(
                "channel is invalid:\n{report}"
            )));
        }
        Ok(Self {
            channel,
            class,
            cfg,
            pool: Vec::new(),
        })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn pool_len(&self) -> usize {
        self.pool.len()
    }

    /// Runs the direction sweep under one bound kind, retaining every
    /// restart's best strategy in the pool.
    pub fn sweep(&mut self, kind: BoundKind) -> Result<()> {
        let cfg = &self.cfg;
        let items: Vec<(usize, usize)> = (0..cfg.directions)
            .flat_map(|d| (0..cfg.restarts).map(move |r| (d, r)))
            .collect();
        let outcomes: Vec<(usize, ClimbOutcome)> = items
            .into_par_iter()
            .map(|(d, r)| {
                let mu = sweep_direction(d, cfg.directions);
                let seed = derive_seed(cfg.seed, direction_salt(mu), r as u64);
                hill_climb(self.class, kind, self.channel, mu, cfg, seed).map(|o| (d, o))
            })
            .collect::<Result<_>>()?;
        for (d, outcome) in outcomes {
            self.pool.push(PoolEntry {
                strategy: outcome.strategy,
                mu: sweep_direction(d, cfg.directions),
            });
        }
        Ok(())
    }

    /// Assembles the frontier of one bound kind from the shared pool.
    pub fn assemble(&self, kind: BoundKind) -> Result<FrontierPolyline> {
        let mut triples: Vec<Option<RateTriple>> = Vec::with_capacity(self.pool.len());
        let mut points: Vec<TaggedPoint> = Vec::new();
        for (tag, entry) in self.pool.iter().enumerate() {
            let triple =
                evaluate_bound(self.class, kind, self.channel, &entry.strategy, self.cfg.markov_tol)?;
            if let Some(t) = &triple {
                for (r1, r2) in polytope_vertices(t) {
                    points.push(TaggedPoint { r1, r2, tag });
                }
            }
            triples.push(triple);
        }
        let hull = upper_frontier(points);
        let vertices = hull
            .into_iter()
            .map(|p| {
                let entry = &self.pool[p.tag];
                FrontierVertex {
                    r1: p.r1,
                    r2: p.r2,
                    mu1: entry.mu.0,
                    mu2: entry.mu.1,
                    value: entry.mu.0 * p.r1 + entry.mu.1 * p.r2,
                    triple: triples[p.tag].expect("hull points come from evaluated strategies"),
                    strategy: entry.strategy.clone(),
                }
            })
            .collect();
        Ok(FrontierPolyline {
            vertices,
            hulled: true,
        })
    }
}

/// Sweeps one bound kind and returns its frontier.
pub fn frontier(
    class: ChannelClass,
    kind: BoundKind,
    c: &StateBroadcastChannel,
    cfg: &SearchConfig,
) -> Result<FrontierPolyline> {
    let mut explorer = RegionExplorer::new(class, c, cfg.clone())?;
    explorer.sweep(kind)?;
    explorer.assemble(kind)
}

/// Inner and outer frontiers assembled from one shared candidate pool,
/// with the componentwise domination audit of the inner by the outer.
#[derive(Debug, Clone)]
pub struct BoundComparison {
    pub inner: FrontierPolyline,
    pub outer: FrontierPolyline,
    pub tolerance: f64,
    pub max_violation: f64,
    pub pass: bool,
}

pub fn compare_bounds(
    class: ChannelClass,
    c: &StateBroadcastChannel,
    cfg: &SearchConfig,
    tolerance: f64,
) -> Result<BoundComparison> {
    let mut explorer = RegionExplorer::new(class, c, cfg.clone())?;
    explorer.sweep(BoundKind::Inner)?;
    explorer.sweep(BoundKind::Outer)?;
    let inner = explorer.assemble(BoundKind::Inner)?;
    let outer = explorer.assemble(BoundKind::Outer)?;
    let outer_points = outer.points();
    let max_violation = inner
        .vertices
        .iter()
        .map(|v| domination_excess(&outer_points, (v.r1, v.r2)))
        .fold(0.0, f64::max);
    Ok(BoundComparison {
        inner,
        outer,
        tolerance,
        max_violation,
        pass: max_violation <= tolerance,
    })
}
