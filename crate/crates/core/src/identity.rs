//! Numerical audits of the information identities and inequalities behind
//! the converse arguments: the Csiszar sum identity, Fano's inequality, the
//! chain rule, conditioning, the gap identity between direct and genie-aided
//! bounds, and independence of future states under product state laws.
//!
//! Every check runs on explicit small joints by exact summation. The
//! identities are distribution-free, so any residual above tolerance is a
//! bug, not a property of the instance.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::class2_terms;
use crate::error::{Error, Result};
use crate::prob::{JointPMF, VariableSpec};

/// Tolerance for identities composed of many functionals.
pub const COMPOSED_TOL: f64 = 1e-10;
/// Tolerance for single functionals and sign conditions.
pub const SINGLE_TOL: f64 = 1e-12;

/// A joint distribution over two equally long sequences X1..XN and Y1..YN.
#[derive(Debug, Clone)]
pub struct SequenceJoint {
    joint: JointPMF,
    len: usize,
}

impl SequenceJoint {
    /// Wraps a joint whose variables are exactly X1..XN, Y1..YN.
    pub fn new(joint: JointPMF, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidArgument("sequence length must be >= 1".into()));
        }
        if joint.variables().len() != 2 * len {
            return Err(Error::InvalidArgument(format!(
                "expected {} sequence variables, found {}",
                2 * len,
                joint.variables().len()
            )));
        }
        for i in 1..=len {
            for prefix in ["X", "Y"] {
                let name = format!("{prefix}{i}");
                if !joint.has_variable(&name) {
                    return Err(Error::InvalidArgument(format!(
                        "sequence variable `{name}` is missing"
                    )));
                }
            }
        }
        Ok(Self { joint, len })
    }

    pub fn joint(&self) -> &JointPMF {
        &self.joint
    }

    pub fn seq_len(&self) -> usize {
        self.len
    }
}

fn names(prefix: &str, range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

fn as_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Absolute difference between the two sides of the Csiszar sum identity,
/// |sum_n I(Y_{n+1..N}; X_n | X_{1..n-1}) - sum_n I(X_{1..n-1}; Y_n | Y_{n+1..N})|.
/// Terms with an empty side vanish; conditioning on an empty set is
/// unconditional mutual information.
pub fn csiszar_residual(s: &SequenceJoint) -> Result<f64> {
    let j = s.joint();
    let n = s.seq_len();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for k in 1..=n {
        let x_past = names("X", 1..=k - 1);
        let y_future = names("Y", k + 1..=n);
        let xk = format!("X{k}");
        let yk = format!("Y{k}");
        lhs += j.mutual_information(&as_refs(&y_future), &[&xk], &as_refs(&x_past))?;
        rhs += j.mutual_information(&as_refs(&x_past), &[&yk], &as_refs(&y_future))?;
    }
    Ok((lhs - rhs).abs())
}

fn binary_entropy(p: f64) -> f64 {
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

/// Fano slack h2(Pe) + Pe log2(k-1) - H(message | estimate), where
/// Pe = Pr[message != estimate]. Always >= 0 up to float noise.
pub fn fano_residual(j: &JointPMF, message: &str, estimate: &str) -> Result<f64> {
    let k = j.cardinality_of(message)?;
    let k_hat = j.cardinality_of(estimate)?;
    if k != k_hat {
        return Err(Error::InvalidArgument(format!(
            "message cardinality {k} does not match estimate cardinality {k_hat}"
        )));
    }
    if k < 2 {
        return Err(Error::InvalidArgument(
            "Fano's inequality needs cardinality >= 2".into(),
        ));
    }
    let pair = j.marginalize(&[message, estimate])?;
    // marginalize keeps the parent's variable order, which may put the
    // estimate first
    let message_first = pair.variables()[0].name() == message;
    let mut pe = 0.0;
    for (idx, &p) in pair.mass().iter().enumerate() {
        let (m, m_hat) = if message_first {
            (idx / k, idx % k)
        } else {
            (idx % k, idx / k)
        };
        if m != m_hat {
            pe += p;
        }
    }
    let bound = binary_entropy(pe) + pe * ((k - 1) as f64).log2();
    let h = j.conditional_entropy(&[message], &[estimate])?;
    Ok(bound - h)
}

/// Absolute residual of the gap identity between direct and genie-aided
/// bounds: (I1 + I2) - (I1* + I2*) = I(W;V1|U,V2) + I(W;V2|U,V1).
pub fn class2_delta_residual(j: &JointPMF) -> Result<f64> {
    let t = class2_terms(j)?;
    let g1 = j.mutual_information(&["W"], &["V1"], &["U", "V2"])?;
    let g2 = j.mutual_information(&["W"], &["V2"], &["U", "V1"])?;
    Ok(((t.i1 + t.i2) - (t.i1s + t.i2s) - g1 - g2).abs())
}

/// Summary of one audited check over a batch of random instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub trials: usize,
    /// Worst observed value: a max residual for equality checks, a min
    /// margin for inequality checks. Absent when no trials ran.
    pub worst: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_case: Option<String>,
}

/// Aggregated audit over seeded random joints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub seed: u64,
    pub trials: usize,
    pub max_card: usize,
    pub max_len: usize,
    pub chain_rule: CheckSummary,
    pub conditioning_reduces_entropy: CheckSummary,
    pub csiszar_sum: CheckSummary,
    pub fano: CheckSummary,
    pub class2_delta: CheckSummary,
    pub iid_state_independence: CheckSummary,
    pub pass: bool,
}

/// Configuration of the audit batteries.
#[derive(Debug, Clone, Copy)]
pub struct AuditConfig {
    pub seed: u64,
    pub trials: usize,
    /// Largest per-letter alphabet (>= 2).
    pub max_card: usize,
    /// Largest sequence length for the sequence checks.
    pub max_len: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 200,
            max_card: 3,
            max_len: 3,
        }
    }
}

pub(crate) fn mix_seed(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    mix_seed(base ^ mix_seed(a ^ 0x5bf0_3635) ^ mix_seed(b).rotate_left(17))
}

fn random_mass<R: Rng>(rng: &mut R, cells: usize) -> Vec<f64> {
    let mut mass: Vec<f64> = (0..cells)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
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

fn random_joint<R: Rng>(rng: &mut R, specs: Vec<VariableSpec>) -> JointPMF {
    let cells = specs.iter().map(|v| v.cardinality()).product();
    JointPMF::from_parts(specs, random_mass(rng, cells))
}

fn spec(name: String, card: usize) -> VariableSpec {
    VariableSpec::new(name, card).expect("generated spec is valid")
}

struct Worst {
    value: Option<f64>,
    case: Option<String>,
    trials: usize,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: None,
            case: None,
            trials: 0,
        }
    }

    /// Tracks the maximum for residuals (`max = true`) or the minimum for
    /// margins.
    fn update(&mut self, value: f64, max: bool, case: String) {
        self.trials += 1;
        let replace = match self.value {
            None => true,
            Some(cur) => {
                if max {
                    value > cur
                } else {
                    value < cur
                }
            }
        };
        if replace {
            self.value = Some(value);
            self.case = Some(case);
        }
    }

    fn summary_max(self, tolerance: f64) -> CheckSummary {
        let pass = self.value.is_none_or(|v| v < tolerance);
        CheckSummary {
            trials: self.trials,
            worst: self.value,
            tolerance,
            pass,
            worst_case: self.case,
        }
    }

    fn summary_min(self, tolerance: f64) -> CheckSummary {
        let pass = self.value.is_none_or(|v| v >= -tolerance);
        CheckSummary {
            trials: self.trials,
            worst: self.value,
            tolerance,
            pass,
            worst_case: self.case,
        }
    }
}

/// Runs the seeded audit batteries and aggregates the worst residuals.
/// A fixed seed gives an identical report on every run.
pub fn proof_step_suite(cfg: &AuditConfig) -> AuditReport {
    let max_card = cfg.max_card.max(2);
    let max_len = cfg.max_len.max(1);
    let mut chain = Worst::new();
    let mut cond = Worst::new();
    let mut csiszar = Worst::new();
    let mut fano = Worst::new();
    let mut delta = Worst::new();
    let mut iid = Worst::new();

    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, trial as u64, 0));

        // Chain rule and conditioning on one random joint of 2..=4 variables.
        {
            let nvars = rng.random_range(2..=4usize);
            let specs: Vec<VariableSpec> = (0..nvars)
                .map(|i| spec(format!("Z{i}"), rng.random_range(2..=max_card)))
                .collect();
            let card_desc: Vec<usize> = specs.iter().map(|s| s.cardinality()).collect();
            let j = random_joint(&mut rng, specs);
            let split = rng.random_range(1..nvars);
            let a_names: Vec<String> = (0..split).map(|i| format!("Z{i}")).collect();
            let b_names: Vec<String> = (split..nvars).map(|i| format!("Z{i}")).collect();
            let a = as_refs(&a_names);
            let b = as_refs(&b_names);
            let all: Vec<&str> = a.iter().chain(b.iter()).copied().collect();

            let h_ab = j.entropy(&all).expect("variables exist");
            let h_a = j.entropy(&a).expect("variables exist");
            let h_b_given_a = j.conditional_entropy(&b, &a).expect("variables exist");
            chain.update(
                (h_ab - h_a - h_b_given_a).abs(),
                true,
                format!("trial {trial}: cards {card_desc:?}, split {split}"),
            );

            let h_a_given_b = j.conditional_entropy(&a, &b).expect("variables exist");
            cond.update(
                h_a - h_a_given_b,
                false,
                format!("trial {trial}: cards {card_desc:?}, split {split}"),
            );
        }

        // Csiszar sum identity on a random (possibly fully dependent)
        // sequence joint, with the product form as one generator among
        // several.
        {
            let n = rng.random_range(1..=max_len);
            let cx = rng.random_range(2..=max_card);
            let cy = rng.random_range(2..=max_card);
            let mut specs = Vec::new();
            for i in 1..=n {
                specs.push(spec(format!("X{i}"), cx));
            }
            for i in 1..=n {
                specs.push(spec(format!("Y{i}"), cy));
            }
            let product_form = rng.random_bool(0.25);
            let j = if product_form {
                let cells = (cx * cy).pow(n as u32);
                let letter = random_mass(&mut rng, cx * cy);
                let mut mass = vec![0.0; cells];
                let mut digits = vec![0usize; 2 * n];
                let cards: Vec<usize> = specs.iter().map(|s| s.cardinality()).collect();
                for cell in mass.iter_mut() {
                    let mut p = 1.0;
                    for t in 0..n {
                        p *= letter[digits[t] * cy + digits[n + t]];
                    }
                    *cell = p;
                    crate::prob::odometer_step(&mut digits, &cards);
                }
                JointPMF::from_parts(specs, mass)
            } else {
                random_joint(&mut rng, specs)
            };
            let s = SequenceJoint::new(j, n).expect("well-formed sequence joint");
            let r = csiszar_residual(&s).expect("sequence names exist");
            csiszar.update(
                r,
                true,
                format!("trial {trial}: N={n}, |X|={cx}, |Y|={cy}, product={product_form}"),
            );
        }

        // Fano on a random (message, estimate) joint.
        {
            let k = rng.random_range(2..=max_card);
            let j = random_joint(
                &mut rng,
                vec![spec("M".into(), k), spec("Mhat".into(), k)],
            );
            let r = fano_residual(&j, "M", "Mhat").expect("valid Fano instance");
            fano.update(r, false, format!("trial {trial}: k={k}"));
        }

        // Gap identity on a random six-variable joint; the identity is
        // distribution-free.
        {
            let cards: Vec<usize> = (0..6).map(|_| rng.random_range(2..=max_card)).collect();
            let names = ["U", "W", "V1", "V2", "Y1", "Y2"];
            let specs: Vec<VariableSpec> = names
                .iter()
                .zip(&cards)
                .map(|(n, &c)| spec((*n).into(), c))
                .collect();
            let j = random_joint(&mut rng, specs);
            let r = class2_delta_residual(&j).expect("variables exist");
            delta.update(r, true, format!("trial {trial}: cards {cards:?}"));
        }

        // Independence of the future state block from the current letter
        // under a product state law.
        {
            let n = rng.random_range(1..=max_len);
            let cw = rng.random_range(2..=max_card);
            let letter = random_mass(&mut rng, cw);
            let cells = cw.pow(n as u32);
            let specs: Vec<VariableSpec> =
                (1..=n).map(|i| spec(format!("W{i}"), cw)).collect();
            let cards = vec![cw; n];
            let mut mass = vec![0.0; cells];
            let mut digits = vec![0usize; n];
            for cell in mass.iter_mut() {
                *cell = digits.iter().map(|&d| letter[d]).product();
                crate::prob::odometer_step(&mut digits, &cards);
            }
            let j = JointPMF::from_parts(specs, mass);
            let mut worst = 0.0f64;
            for k in 1..=n {
                let future = names("W", k + 1..=n);
                let wk = format!("W{k}");
                let i = j
                    .mutual_information(&as_refs(&future), &[&wk], &[])
                    .expect("variables exist");
                worst = worst.max(i.abs());
            }
            iid.update(worst, true, format!("trial {trial}: N={n}, |W|={cw}"));
        }
    }

    let chain_rule = chain.summary_max(COMPOSED_TOL);
    let conditioning_reduces_entropy = cond.summary_min(SINGLE_TOL);
    let csiszar_sum = csiszar.summary_max(COMPOSED_TOL);
    let fano = fano.summary_min(SINGLE_TOL);
    let class2_delta = delta.summary_max(COMPOSED_TOL);
    let iid_state_independence = iid.summary_max(SINGLE_TOL);
    let pass = chain_rule.pass
        && conditioning_reduces_entropy.pass
        && csiszar_sum.pass
        && fano.pass
        && class2_delta.pass
        && iid_state_independence.pass;
    AuditReport {
        seed: cfg.seed,
        trials: cfg.trials,
        max_card,
        max_len,
        chain_rule,
        conditioning_reduces_entropy,
        csiszar_sum,
        fano,
        class2_delta,
        iid_state_independence,
        pass,
    }
}
