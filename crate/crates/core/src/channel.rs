//! State-dependent broadcast channels and the auxiliary-variable strategies
//! that induce members of the two factorization families.
//!
//! Canonical variable names are used throughout: `W` (state), `U`, `V1`, `V2`
//! (auxiliaries), `X` (input), `Y1`, `Y2` (receiver outputs).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::prob::{compose, Factor, JointPMF, VariableSpec};
use crate::{DEFAULT_MARKOV_TOL, INPUT_NORM_TOL};

/// One problem found while validating a mass table.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    /// Index path such as `kernel[w=0][x=1]`.
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Report-style validation outcome; empty iff the inspected object is valid.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn slice_path(label: &str, given: &[VariableSpec], digits: &[usize]) -> String {
    let mut path = String::from(label);
    for (spec, d) in given.iter().zip(digits) {
        path.push_str(&format!("[{}={}]", spec.name().to_lowercase(), d));
    }
    path
}

/// Collects negative entries and denormalized conditioning slices of a
/// factor, naming each offending index.
pub fn factor_violations(factor: &Factor, label: &str, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for (si, slice) in factor.slices().enumerate() {
        let digits = factor.slice_digits(si);
        let path = slice_path(label, factor.given(), &digits);
        for (ci, &p) in slice.iter().enumerate() {
            if p < 0.0 {
                out.push(Violation {
                    path: format!("{path}(cell {ci})"),
                    message: format!("negative entry {p}"),
                });
            }
        }
        let total = crate::prob::neumaier_sum(slice);
        if (total - 1.0).abs() > tol {
            out.push(Violation {
                path,
                message: format!("slice sums to {total}, expected 1 within {tol:e}"),
            });
        }
    }
    out
}

/// A two-receiver memoryless channel whose transition law depends on an
/// i.i.d. state known noncausally at the encoder: a state distribution p(w)
/// and a kernel p(y1,y2 | x,w).
#[derive(Debug, Clone)]
pub struct StateBroadcastChannel {
    state: Factor,
    kernel: Factor,
    kernel_ignores_state: bool,
}

fn expect_roles(factor: &Factor, outputs: &[&str], given: &[&str], what: &str) -> Result<()> {
    let out_names: Vec<&str> = factor.outputs().iter().map(|v| v.name()).collect();
    let giv_names: Vec<&str> = factor.given().iter().map(|v| v.name()).collect();
    if out_names != outputs || giv_names != given {
        return Err(Error::Shape(format!(
            "{what} must produce {outputs:?} given {given:?}, found {out_names:?} given {giv_names:?}"
        )));
    }
    Ok(())
}

impl StateBroadcastChannel {
    /// `state` must produce `W`; `kernel` must produce `(Y1, Y2)` conditioned
    /// on `(W, X)` in that order.
    pub fn new(state: Factor, kernel: Factor) -> Result<Self> {
        expect_roles(&state, &["W"], &[], "state")?;
        expect_roles(&kernel, &["Y1", "Y2"], &["W", "X"], "kernel")?;
        Ok(Self {
            state,
            kernel,
            kernel_ignores_state: false,
        })
    }

    /// Switches to the reading where receiver outputs depend on the input
    /// only; the `w = 0` kernel slice is then used for every state.
    pub fn with_kernel_ignoring_state(mut self, ignore: bool) -> Self {
        self.kernel_ignores_state = ignore;
        self
    }

    pub fn kernel_ignores_state(&self) -> bool {
        self.kernel_ignores_state
    }

    pub fn state(&self) -> &Factor {
        &self.state
    }

    pub fn kernel(&self) -> &Factor {
        &self.kernel
    }

    pub fn w_card(&self) -> usize {
        self.state.outputs()[0].cardinality()
    }

    pub fn x_card(&self) -> usize {
        self.kernel.given()[1].cardinality()
    }

    pub fn y1_card(&self) -> usize {
        self.kernel.outputs()[0].cardinality()
    }

    pub fn y2_card(&self) -> usize {
        self.kernel.outputs()[1].cardinality()
    }

    /// Lists normalization violations, negative entries, and cardinality
    /// mismatches; an empty report means the channel is usable.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = factor_violations(&self.state, "state", INPUT_NORM_TOL);
        violations.extend(factor_violations(&self.kernel, "kernel", INPUT_NORM_TOL));
        let kernel_w = self.kernel.given()[0].cardinality();
        if kernel_w != self.w_card() {
            violations.push(Violation {
                path: "kernel".into(),
                message: format!(
                    "W cardinality {} does not match state cardinality {}",
                    kernel_w,
                    self.w_card()
                ),
            });
        }
        ValidationReport { violations }
    }

    /// The kernel actually used in compositions, honoring the
    /// `kernel_ignores_state` switch.
    pub fn effective_kernel(&self) -> Factor {
        if !self.kernel_ignores_state {
            return self.kernel.clone();
        }
        let out_len = self.y1_card() * self.y2_card();
        let per_w = self.x_card() * out_len;
        let mass = self.kernel.mass()[..per_w].to_vec();
        Factor::new(
            self.kernel.outputs().to_vec(),
            vec![self.kernel.given()[1].clone()],
            mass,
        )
        .expect("slicing a valid kernel keeps its shape")
    }
}

/// Strategy for the plain side-information family: p(v1,v2 | w) and
/// p(x | w,v1,v2).
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyClass1 {
    aux: Factor,
    input: Factor,
}

impl StrategyClass1 {
    pub fn new(aux: Factor, input: Factor) -> Result<Self> {
        expect_roles(&aux, &["V1", "V2"], &["W"], "aux")?;
        expect_roles(&input, &["X"], &["W", "V1", "V2"], "input")?;
        Ok(Self { aux, input })
    }

    pub fn aux(&self) -> &Factor {
        &self.aux
    }

    pub fn input(&self) -> &Factor {
        &self.input
    }

    pub fn v1_card(&self) -> usize {
        self.aux.outputs()[0].cardinality()
    }

    pub fn v2_card(&self) -> usize {
        self.aux.outputs()[1].cardinality()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = factor_violations(&self.aux, "aux", INPUT_NORM_TOL);
        violations.extend(factor_violations(&self.input, "input", INPUT_NORM_TOL));
        ValidationReport { violations }
    }

    pub(crate) fn factors_mut(&mut self) -> Vec<&mut Factor> {
        vec![&mut self.aux, &mut self.input]
    }
}

/// Strategy for the confidential family: p(u), p(v1,v2 | w,u), and
/// p(x | w,v1,v2). U is independent of W by construction since its factor
/// has no conditioning variables.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyClass2 {
    u_dist: Factor,
    aux: Factor,
    input: Factor,
}

impl StrategyClass2 {
    pub fn new(u_dist: Factor, aux: Factor, input: Factor) -> Result<Self> {
        expect_roles(&u_dist, &["U"], &[], "u")?;
        expect_roles(&aux, &["V1", "V2"], &["W", "U"], "aux")?;
        expect_roles(&input, &["X"], &["W", "V1", "V2"], "input")?;
        Ok(Self {
            u_dist,
            aux,
            input,
        })
    }

    pub fn u_dist(&self) -> &Factor {
        &self.u_dist
    }

    pub fn aux(&self) -> &Factor {
        &self.aux
    }

    pub fn input(&self) -> &Factor {
        &self.input
    }

    pub fn u_card(&self) -> usize {
        self.u_dist.outputs()[0].cardinality()
    }

    pub fn v1_card(&self) -> usize {
        self.aux.outputs()[0].cardinality()
    }

    pub fn v2_card(&self) -> usize {
        self.aux.outputs()[1].cardinality()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = factor_violations(&self.u_dist, "u", INPUT_NORM_TOL);
        violations.extend(factor_violations(&self.aux, "aux", INPUT_NORM_TOL));
        violations.extend(factor_violations(&self.input, "input", INPUT_NORM_TOL));
        ValidationReport { violations }
    }

    pub(crate) fn factors_mut(&mut self) -> Vec<&mut Factor> {
        vec![&mut self.u_dist, &mut self.aux, &mut self.input]
    }
}

/// Either strategy family.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Class1(StrategyClass1),
    Class2(StrategyClass2),
}

impl Strategy {
    pub fn class(&self) -> u8 {
        match self {
            Strategy::Class1(_) => 1,
            Strategy::Class2(_) => 2,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            Strategy::Class1(s) => s.validate(),
            Strategy::Class2(s) => s.validate(),
        }
    }
}

/// Joint over (W, V1, V2, X, Y1, Y2) induced by a Class-1 strategy.
pub fn induced_joint_class1(c: &StateBroadcastChannel, s: &StrategyClass1) -> Result<JointPMF> {
    let kernel = c.effective_kernel();
    compose(&[c.state(), s.aux(), s.input(), &kernel])
}

/// Joint over (U, W, V1, V2, X, Y1, Y2) induced by a Class-2 strategy.
pub fn induced_joint_class2(c: &StateBroadcastChannel, s: &StrategyClass2) -> Result<JointPMF> {
    let kernel = c.effective_kernel();
    compose(&[s.u_dist(), c.state(), s.aux(), s.input(), &kernel])
}

/// Result of auditing the chains U -> V1 -> X and U -> V2 -> X on a joint.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MarkovReport {
    /// I(U;X|V1) in bits.
    pub residual_uv1x: f64,
    /// I(U;X|V2) in bits.
    pub residual_uv2x: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Computes the Markov residuals at the default tolerance of `1e-9`.
pub fn markov_check(j: &JointPMF) -> Result<MarkovReport> {
    markov_check_with_tol(j, DEFAULT_MARKOV_TOL)
}

pub fn markov_check_with_tol(j: &JointPMF, tolerance: f64) -> Result<MarkovReport> {
    let residual_uv1x = j.mutual_information(&["U"], &["X"], &["V1"])?;
    let residual_uv2x = j.mutual_information(&["U"], &["X"], &["V2"])?;
    Ok(MarkovReport {
        residual_uv1x,
        residual_uv2x,
        tolerance,
        pass: residual_uv1x <= tolerance && residual_uv2x <= tolerance,
    })
}
