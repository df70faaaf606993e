//! Evaluators for the single-letter rate bounds, given an induced joint.
//!
//! The Class-1 individual-rate expressions are shared between the inner and
//! outer evaluators so both return bit-identical values; only the sum-rate
//! expressions differ. Class-2 bounds come in a direct and a genie-aided
//! flavor, and the reported sum bound takes the minimum over every valid
//! combination of the two.

use serde::Serialize;

use crate::channel::markov_check_with_tol;
use crate::error::{Error, Result};
use crate::prob::JointPMF;
use crate::DEFAULT_MARKOV_TOL;

/// Raw constraint values for one strategy. Values may be negative; clamping
/// to the nonnegative orthant happens only when regions are assembled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateTriple {
    pub r1_bound: f64,
    pub r2_bound: f64,
    pub sum_bound: f64,
}

/// The mutual-information building blocks of the Class-1 bounds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Class1Terms {
    pub i_v1_y1: f64,
    pub i_v2_y2: f64,
    pub i_w_v1: f64,
    pub i_w_v2: f64,
    pub i_v1_v2: f64,
    pub i_v1v2_w: f64,
}

pub fn class1_term_values(j: &JointPMF) -> Result<Class1Terms> {
    Ok(Class1Terms {
        i_v1_y1: j.mutual_information(&["V1"], &["Y1"], &[])?,
        i_v2_y2: j.mutual_information(&["V2"], &["Y2"], &[])?,
        i_w_v1: j.mutual_information(&["W"], &["V1"], &[])?,
        i_w_v2: j.mutual_information(&["W"], &["V2"], &[])?,
        i_v1_v2: j.mutual_information(&["V1"], &["V2"], &[])?,
        i_v1v2_w: j.mutual_information(&["V1", "V2"], &["W"], &[])?,
    })
}

fn class1_individual(t: &Class1Terms) -> (f64, f64) {
    (t.i_v1_y1 - t.i_w_v1, t.i_v2_y2 - t.i_w_v2)
}

/// Outer bound for the plain side-information family:
/// r1 = I(V1;Y1) - I(W;V1), r2 = I(V2;Y2) - I(W;V2), sum = r1 + r2.
pub fn class1_outer(j: &JointPMF) -> Result<RateTriple> {
    let t = class1_term_values(j)?;
    let (r1, r2) = class1_individual(&t);
    Ok(RateTriple {
        r1_bound: r1,
        r2_bound: r2,
        sum_bound: r1 + r2,
    })
}

/// Inner bound for the plain side-information family. Individual rates match
/// [`class1_outer`] bit for bit; the sum is
/// I(V1;Y1) + I(V2;Y2) - I(V1;V2) - I(V1,V2;W).
pub fn class1_inner(j: &JointPMF) -> Result<RateTriple> {
    let t = class1_term_values(j)?;
    let (r1, r2) = class1_individual(&t);
    Ok(RateTriple {
        r1_bound: r1,
        r2_bound: r2,
        sum_bound: t.i_v1_y1 + t.i_v2_y2 - t.i_v1_v2 - t.i_v1v2_w,
    })
}

/// The six constraint values of the confidential family: the direct bounds
/// I1, I2, I12 and the genie-aided bounds I1*, I2*, I12*.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Class2Terms {
    pub i1: f64,
    pub i2: f64,
    pub i12: f64,
    pub i1s: f64,
    pub i2s: f64,
    pub i12s: f64,
}

/// Evaluates each term literally, e.g.
/// i1 = I(V1;Y1|U) - I(V1;Y2|U) + H(W|U,V1) and
/// i1s = I(V1;Y1|U,V2) - I(V1;Y2|U,V2) + H(W|U,V1,V2).
pub fn class2_terms(j: &JointPMF) -> Result<Class2Terms> {
    let a1 = j.mutual_information(&["V1"], &["Y1"], &["U"])?;
    let b1 = j.mutual_information(&["V1"], &["Y2"], &["U"])?;
    let h1 = j.conditional_entropy(&["W"], &["U", "V1"])?;
    let a2 = j.mutual_information(&["V2"], &["Y2"], &["U"])?;
    let b2 = j.mutual_information(&["V2"], &["Y1"], &["U"])?;
    let h2 = j.conditional_entropy(&["W"], &["U", "V2"])?;
    let a1s = j.mutual_information(&["V1"], &["Y1"], &["U", "V2"])?;
    let b1s = j.mutual_information(&["V1"], &["Y2"], &["U", "V2"])?;
    let a2s = j.mutual_information(&["V2"], &["Y2"], &["U", "V1"])?;
    let b2s = j.mutual_information(&["V2"], &["Y1"], &["U", "V1"])?;
    let hs = j.conditional_entropy(&["W"], &["U", "V1", "V2"])?;
    Ok(Class2Terms {
        i1: a1 - b1 + h1,
        i2: a2 - b2 + h2,
        i12: a1 + a2 - b1 - b2 + h1 + h2,
        i1s: a1s - b1s + hs,
        i2s: a2s - b2s + hs,
        i12s: a1s + a2s - b1s - b2s + 2.0 * hs,
    })
}

/// Outer bound for the confidential family: individual rates take the
/// tighter of the direct and genie values; the sum takes the minimum over
/// all four valid candidates {I12, I12*, I1 + I2*, I2 + I1*}.
pub fn class2_outer(t: &Class2Terms) -> RateTriple {
    let sum = (t.i12)
        .min(t.i12s)
        .min(t.i1 + t.i2s)
        .min(t.i2 + t.i1s);
    RateTriple {
        r1_bound: t.i1.min(t.i1s),
        r2_bound: t.i2.min(t.i2s),
        sum_bound: sum,
    }
}

/// Inner bound for the confidential family. Requires the Markov chains
/// U -> V1 -> X and U -> V2 -> X to hold on the joint; violations beyond the
/// tolerance are a hard error naming the residuals.
pub fn class2_inner(j: &JointPMF) -> Result<RateTriple> {
    class2_inner_with_tol(j, DEFAULT_MARKOV_TOL)
}

pub fn class2_inner_with_tol(j: &JointPMF, markov_tol: f64) -> Result<RateTriple> {
    let report = markov_check_with_tol(j, markov_tol)?;
    if !report.pass {
        return Err(Error::MarkovViolation {
            residual_uv1x: report.residual_uv1x,
            residual_uv2x: report.residual_uv2x,
            tolerance: markov_tol,
        });
    }
    let a1 = j.mutual_information(&["V1"], &["Y1"], &["U"])?;
    let a2 = j.mutual_information(&["V2"], &["Y2"], &["U"])?;
    let b1s = j.mutual_information(&["V1"], &["Y2"], &["U", "V2"])?;
    let b2s = j.mutual_information(&["V2"], &["Y1"], &["U", "V1"])?;
    let c1 = j.mutual_information(&["W"], &["V1"], &["U"])?;
    let c2 = j.mutual_information(&["W"], &["V2"], &["U"])?;
    let i_v1_v2 = j.mutual_information(&["V1"], &["V2"], &["U"])?;
    let i_v1v2_w = j.mutual_information(&["V1", "V2"], &["W"], &["U"])?;
    Ok(RateTriple {
        r1_bound: a1 - b1s.max(c1),
        r2_bound: a2 - b2s.max(c2),
        sum_bound: a1 + a2 - b1s - b2s - i_v1_v2 - i_v1v2_w,
    })
}

/// Single-receiver reduction: I(V;Y) - I(W;V) on a joint over (W, V, Y, ...).
pub fn gp_rate(j: &JointPMF) -> Result<f64> {
    Ok(j.mutual_information(&["V"], &["Y"], &[])? - j.mutual_information(&["W"], &["V"], &[])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{compose, Factor, VariableSpec};

    fn spec(name: &str, card: usize) -> VariableSpec {
        VariableSpec::new(name, card).unwrap()
    }

    /// |W| = 1, V1 = X uniform, Y1 = X noiseless, everything else constant.
    fn identity_joint() -> JointPMF {
        let state = Factor::unconditioned(vec![spec("W", 1)], vec![1.0]).unwrap();
        let aux = Factor::new(
            vec![spec("V1", 2), spec("V2", 1)],
            vec![spec("W", 1)],
            vec![0.5, 0.5],
        )
        .unwrap();
        let mut input_mass = Vec::new();
        for v1 in 0..2 {
            input_mass.extend([
                if v1 == 0 { 1.0 } else { 0.0 },
                if v1 == 1 { 1.0 } else { 0.0 },
            ]);
        }
        let input = Factor::new(
            vec![spec("X", 2)],
            vec![spec("W", 1), spec("V1", 2), spec("V2", 1)],
            input_mass,
        )
        .unwrap();
        let mut kernel_mass = vec![0.0; 2 * 2];
        for x in 0..2 {
            kernel_mass[x * 2 + x] = 1.0;
        }
        let kernel = Factor::new(
            vec![spec("Y1", 2), spec("Y2", 1)],
            vec![spec("W", 1), spec("X", 2)],
            kernel_mass,
        )
        .unwrap();
        compose(&[&state, &aux, &input, &kernel]).unwrap()
    }

    #[test]
    fn identity_channel_reaches_one_bit() {
        let j = identity_joint();
        let t = class1_outer(&j).unwrap();
        assert!((t.r1_bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn useless_receiver_gives_zero() {
        // Y1 independent of everything, V1 independent of W.
        let state = Factor::unconditioned(vec![spec("W", 2)], vec![0.3, 0.7]).unwrap();
        let aux = Factor::new(
            vec![spec("V1", 2), spec("V2", 1)],
            vec![spec("W", 2)],
            vec![0.5, 0.5, 0.5, 0.5],
        )
        .unwrap();
        let input = Factor::new(
            vec![spec("X", 1)],
            vec![spec("W", 2), spec("V1", 2), spec("V2", 1)],
            vec![1.0; 4],
        )
        .unwrap();
        let kernel = Factor::new(
            vec![spec("Y1", 2), spec("Y2", 1)],
            vec![spec("W", 2), spec("X", 1)],
            vec![0.5, 0.5, 0.5, 0.5],
        )
        .unwrap();
        let j = compose(&[&state, &aux, &input, &kernel]).unwrap();
        let t = class1_outer(&j).unwrap();
        assert!(t.r1_bound.abs() < 1e-12);
    }

    #[test]
    fn class1_sum_is_componentwise_sum() {
        let j = identity_joint();
        let t = class1_outer(&j).unwrap();
        assert_eq!(t.sum_bound, t.r1_bound + t.r2_bound);
    }

    #[test]
    fn class1_inner_individual_rates_match_outer_bitwise() {
        let j = identity_joint();
        let outer = class1_outer(&j).unwrap();
        let inner = class1_inner(&j).unwrap();
        assert_eq!(outer.r1_bound.to_bits(), inner.r1_bound.to_bits());
        assert_eq!(outer.r2_bound.to_bits(), inner.r2_bound.to_bits());
    }

    #[test]
    fn class1_inner_sum_never_exceeds_outer_sum() {
        let j = identity_joint();
        let outer = class1_outer(&j).unwrap();
        let inner = class1_inner(&j).unwrap();
        assert!(inner.sum_bound <= outer.sum_bound + 1e-12);
    }

    #[test]
    fn class1_inner_penalties_vanish_for_independent_auxes_without_state() {
        // V1 independent of V2 and |W| = 1: the inner sum reduces to r1 + r2.
        let j = identity_joint();
        let t = class1_inner(&j).unwrap();
        assert!((t.sum_bound - (t.r1_bound + t.r2_bound)).abs() < 1e-12);
    }

    /// Class-2 joint where Y2 copies Y1 and |W| = 1.
    fn symmetric_eavesdropper_joint() -> JointPMF {
        let u_dist = Factor::unconditioned(vec![spec("U", 2)], vec![0.4, 0.6]).unwrap();
        let state = Factor::unconditioned(vec![spec("W", 1)], vec![1.0]).unwrap();
        let aux = Factor::new(
            vec![spec("V1", 2), spec("V2", 2)],
            vec![spec("W", 1), spec("U", 2)],
            vec![0.3, 0.2, 0.25, 0.25, 0.1, 0.4, 0.35, 0.15],
        )
        .unwrap();
        let mut input_mass = Vec::new();
        for v1 in 0..2 {
            for _v2 in 0..2 {
                input_mass.extend([
                    if v1 == 0 { 0.8 } else { 0.3 },
                    if v1 == 0 { 0.2 } else { 0.7 },
                ]);
            }
        }
        let input = Factor::new(
            vec![spec("X", 2)],
            vec![spec("W", 1), spec("V1", 2), spec("V2", 2)],
            input_mass,
        )
        .unwrap();
        let mut kernel_mass = vec![0.0; 2 * 4];
        for x in 0..2 {
            kernel_mass[x * 4 + x * 2 + x] = 1.0;
        }
        let kernel = Factor::new(
            vec![spec("Y1", 2), spec("Y2", 2)],
            vec![spec("W", 1), spec("X", 2)],
            kernel_mass,
        )
        .unwrap();
        compose(&[&u_dist, &state, &aux, &input, &kernel]).unwrap()
    }

    #[test]
    fn identical_receivers_cancel_without_state() {
        let j = symmetric_eavesdropper_joint();
        let t = class2_terms(&j).unwrap();
        assert!(t.i1.abs() < 1e-12);
        assert!(t.i2.abs() < 1e-12);
    }

    #[test]
    fn stateless_terms_satisfy_gap_identity_trivially() {
        let j = symmetric_eavesdropper_joint();
        let t = class2_terms(&j).unwrap();
        assert!(((t.i1 + t.i2) - (t.i1s + t.i2s)).abs() < 1e-12);
    }

    #[test]
    fn class2_outer_takes_minima() {
        let t = Class2Terms {
            i1: 0.5,
            i2: 0.4,
            i12: 0.9,
            i1s: 0.3,
            i2s: 0.6,
            i12s: 0.9,
        };
        let r = class2_outer(&t);
        assert_eq!(r.r1_bound, 0.3);
        assert_eq!(r.r2_bound, 0.4);
        // candidates: 0.9, 0.9, 0.5 + 0.6 = 1.1, 0.4 + 0.3 = 0.7
        assert_eq!(r.sum_bound, 0.7);
    }

    #[test]
    fn class2_outer_equal_terms_sum_to_plain_sum() {
        let t = Class2Terms {
            i1: 0.5,
            i2: 0.4,
            i12: 0.9,
            i1s: 0.5,
            i2s: 0.4,
            i12s: 0.9,
        };
        let r = class2_outer(&t);
        assert_eq!(r.sum_bound, 0.9);
    }

    #[test]
    fn class2_outer_sum_never_exceeds_direct_sum() {
        let j = symmetric_eavesdropper_joint();
        let t = class2_terms(&j).unwrap();
        let r = class2_outer(&t);
        assert!(r.sum_bound <= t.i12 + 1e-12);
        assert!(r.sum_bound <= t.i12.min(t.i12s) + 1e-12);
    }

    /// Class-2 joint with |U| = 1, Y2 constant: the degenerate-eavesdropper
    /// reduction must give r1 = I(V1;Y1) - I(W;V1).
    #[test]
    fn class2_inner_degenerate_eavesdropper_reduces_to_gp_form() {
        let u_dist = Factor::unconditioned(vec![spec("U", 1)], vec![1.0]).unwrap();
        let state = Factor::unconditioned(vec![spec("W", 2)], vec![0.3, 0.7]).unwrap();
        let aux = Factor::new(
            vec![spec("V1", 2), spec("V2", 2)],
            vec![spec("W", 2), spec("U", 1)],
            vec![0.4, 0.1, 0.25, 0.25, 0.2, 0.3, 0.3, 0.2],
        )
        .unwrap();
        let mut input_mass = Vec::new();
        for w in 0..2 {
            for v1 in 0..2 {
                for _v2 in 0..2 {
                    let p = if v1 == 0 { 0.85 } else { 0.2 + 0.1 * w as f64 };
                    input_mass.extend([p, 1.0 - p]);
                }
            }
        }
        let input = Factor::new(
            vec![spec("X", 2)],
            vec![spec("W", 2), spec("V1", 2), spec("V2", 2)],
            input_mass,
        )
        .unwrap();
        let mut kernel_mass = Vec::new();
        for w in 0..2 {
            for x in 0..2 {
                let p = if x == 0 { 0.9 - 0.2 * w as f64 } else { 0.15 };
                kernel_mass.extend([p, 1.0 - p]);
            }
        }
        let kernel = Factor::new(
            vec![spec("Y1", 2), spec("Y2", 1)],
            vec![spec("W", 2), spec("X", 2)],
            kernel_mass,
        )
        .unwrap();
        let j = compose(&[&u_dist, &state, &aux, &input, &kernel]).unwrap();
        let t = class2_inner(&j).unwrap();
        let expected = j.mutual_information(&["V1"], &["Y1"], &[]).unwrap()
            - j.mutual_information(&["W"], &["V1"], &[]).unwrap();
        assert!((t.r1_bound - expected).abs() < 1e-12);
    }

    /// Y2 a copy of Y1, |W| = 1, V2 constant: r1 collapses to zero.
    #[test]
    fn class2_inner_symmetric_receivers_give_zero() {
        let u_dist = Factor::unconditioned(vec![spec("U", 1)], vec![1.0]).unwrap();
        let state = Factor::unconditioned(vec![spec("W", 1)], vec![1.0]).unwrap();
        let aux = Factor::new(
            vec![spec("V1", 2), spec("V2", 1)],
            vec![spec("W", 1), spec("U", 1)],
            vec![0.5, 0.5],
        )
        .unwrap();
        let mut input_mass = Vec::new();
        for v1 in 0..2 {
            input_mass.extend([
                if v1 == 0 { 1.0 } else { 0.0 },
                if v1 == 1 { 1.0 } else { 0.0 },
            ]);
        }
        let input = Factor::new(
            vec![spec("X", 2)],
            vec![spec("W", 1), spec("V1", 2), spec("V2", 1)],
            input_mass,
        )
        .unwrap();
        let mut kernel_mass = vec![0.0; 2 * 4];
        for x in 0..2 {
            kernel_mass[x * 4 + x * 2 + x] = 1.0;
        }
        let kernel = Factor::new(
            vec![spec("Y1", 2), spec("Y2", 2)],
            vec![spec("W", 1), spec("X", 2)],
            kernel_mass,
        )
        .unwrap();
        let j = compose(&[&u_dist, &state, &aux, &input, &kernel]).unwrap();
        let t = class2_inner(&j).unwrap();
        assert!(t.r1_bound.abs() < 1e-12);
    }

    #[test]
    fn class2_inner_rejects_markov_violations() {
        // V2 = U = X chain violation.
        let u_dist = Factor::unconditioned(vec![spec("U", 2)], vec![0.5, 0.5]).unwrap();
        let state = Factor::unconditioned(vec![spec("W", 1)], vec![1.0]).unwrap();
        let mut aux_mass = Vec::new();
        for u in 0..2 {
            for v2 in 0..2 {
                aux_mass.push(if v2 == u { 1.0 } else { 0.0 });
            }
        }
        let aux = Factor::new(
            vec![spec("V1", 1), spec("V2", 2)],
            vec![spec("W", 1), spec("U", 2)],
            aux_mass,
        )
        .unwrap();
        let mut input_mass = Vec::new();
        for v2 in 0..2 {
            input_mass.extend([
                if v2 == 0 { 1.0 } else { 0.0 },
                if v2 == 1 { 1.0 } else { 0.0 },
            ]);
        }
        let input = Factor::new(
            vec![spec("X", 2)],
            vec![spec("W", 1), spec("V1", 1), spec("V2", 2)],
            input_mass,
        )
        .unwrap();
        let mut kernel_mass = vec![0.0; 2 * 2];
        for x in 0..2 {
            kernel_mass[x * 2 + x] = 1.0;
        }
        let kernel = Factor::new(
            vec![spec("Y1", 2), spec("Y2", 1)],
            vec![spec("W", 1), spec("X", 2)],
            kernel_mass,
        )
        .unwrap();
        let j = compose(&[&u_dist, &state, &aux, &input, &kernel]).unwrap();
        assert!(matches!(
            class2_inner(&j),
            Err(Error::MarkovViolation { .. })
        ));
    }

    #[test]
    fn gp_rate_identity_channel_is_one() {
        // |W| = 1, V = X uniform, Y = X.
        let state = Factor::unconditioned(vec![spec("W", 1)], vec![1.0]).unwrap();
        let v = Factor::new(
            vec![spec("V", 2)],
            vec![spec("W", 1)],
            vec![0.5, 0.5],
        )
        .unwrap();
        let mut x_mass = Vec::new();
        for vv in 0..2 {
            x_mass.extend([
                if vv == 0 { 1.0 } else { 0.0 },
                if vv == 1 { 1.0 } else { 0.0 },
            ]);
        }
        let x = Factor::new(vec![spec("X", 2)], vec![spec("W", 1), spec("V", 2)], x_mass).unwrap();
        let mut y_mass = Vec::new();
        for xx in 0..2 {
            y_mass.extend([
                if xx == 0 { 1.0 } else { 0.0 },
                if xx == 1 { 1.0 } else { 0.0 },
            ]);
        }
        let y = Factor::new(vec![spec("Y", 2)], vec![spec("X", 2)], y_mass).unwrap();
        let j = compose(&[&state, &v, &x, &y]).unwrap();
        assert!((gp_rate(&j).unwrap() - 1.0).abs() < 1e-12);
    }

    /// Conditional mutual information computed directly from a mass table by
    /// hash-map accumulation, independent of the JointPMF machinery.
    fn brute_cmi(j: &JointPMF, a: &[&str], b: &[&str], g: &[&str]) -> f64 {
        use std::collections::HashMap;
        let axes = |names: &[&str]| -> Vec<usize> {
            names
                .iter()
                .map(|n| {
                    j.variables()
                        .iter()
                        .position(|v| v.name() == *n)
                        .expect("variable exists")
                })
                .collect()
        };
        let (ax, bx, gx) = (axes(a), axes(b), axes(g));
        let cards: Vec<usize> = j.variables().iter().map(|v| v.cardinality()).collect();
        let mut digits = vec![0usize; cards.len()];
        let key = |digits: &[usize], axes: &[usize]| -> Vec<usize> {
            axes.iter().map(|&i| digits[i]).collect()
        };
        let mut p_abg: HashMap<Vec<usize>, f64> = HashMap::new();
        let mut p_ag: HashMap<Vec<usize>, f64> = HashMap::new();
        let mut p_bg: HashMap<Vec<usize>, f64> = HashMap::new();
        let mut p_g: HashMap<Vec<usize>, f64> = HashMap::new();
        for &p in j.mass() {
            let (ka, kb, kg) = (key(&digits, &ax), key(&digits, &bx), key(&digits, &gx));
            let mut kag = ka.clone();
            kag.extend(&kg);
            let mut kbg = kb.clone();
            kbg.extend(&kg);
            let mut kabg = ka.clone();
            kabg.extend(&kb);
            kabg.extend(&kg);
            *p_abg.entry(kabg).or_default() += p;
            *p_ag.entry(kag).or_default() += p;
            *p_bg.entry(kbg).or_default() += p;
            *p_g.entry(kg).or_default() += p;
            let mut i = cards.len();
            while i > 0 {
                i -= 1;
                digits[i] += 1;
                if digits[i] < cards[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        let mut total = 0.0;
        for (kabg, &p) in &p_abg {
            if p <= 0.0 {
                continue;
            }
            let ka = &kabg[..ax.len()];
            let kb = &kabg[ax.len()..ax.len() + bx.len()];
            let kg = &kabg[ax.len() + bx.len()..];
            let mut kag = ka.to_vec();
            kag.extend_from_slice(kg);
            let mut kbg = kb.to_vec();
            kbg.extend_from_slice(kg);
            total += p * ((p * p_g[kg]) / (p_ag[&kag] * p_bg[&kbg])).log2();
        }
        total
    }

    /// Random induced class-2 joint from seeded factor tables.
    fn random_induced_class2(seed: u64) -> JointPMF {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut simplex = |n: usize| -> Vec<f64> {
            let mut w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let t: f64 = w.iter().sum();
            for x in &mut w {
                *x /= t;
            }
            w
        };
        let u_dist = Factor::unconditioned(vec![spec("U", 2)], simplex(2)).unwrap();
        let state = Factor::unconditioned(vec![spec("W", 2)], simplex(2)).unwrap();
        let mut aux_mass = Vec::new();
        for _ in 0..4 {
            aux_mass.extend(simplex(4));
        }
        let aux = Factor::new(
            vec![spec("V1", 2), spec("V2", 2)],
            vec![spec("W", 2), spec("U", 2)],
            aux_mass,
        )
        .unwrap();
        let mut input_mass = Vec::new();
        for _ in 0..8 {
            input_mass.extend(simplex(2));
        }
        let input = Factor::new(
            vec![spec("X", 2)],
            vec![spec("W", 2), spec("V1", 2), spec("V2", 2)],
            input_mass,
        )
        .unwrap();
        let mut kernel_mass = Vec::new();
        for _ in 0..4 {
            kernel_mass.extend(simplex(4));
        }
        let kernel = Factor::new(
            vec![spec("Y1", 2), spec("Y2", 2)],
            vec![spec("W", 2), spec("X", 2)],
            kernel_mass,
        )
        .unwrap();
        compose(&[&u_dist, &state, &aux, &input, &kernel]).unwrap()
    }

    #[test]
    fn genie_gap_matches_independent_evaluation() {
        // i12 - i12* must equal I(W;V1|U,V2) + I(W;V2|U,V1), with the right
        // side computed by direct table accumulation.
        for seed in 0..20u64 {
            let j = random_induced_class2(seed);
            let t = class2_terms(&j).unwrap();
            let rhs = brute_cmi(&j, &["W"], &["V1"], &["U", "V2"])
                + brute_cmi(&j, &["W"], &["V2"], &["U", "V1"]);
            assert!(
                ((t.i12 - t.i12s) - rhs).abs() < 1e-10,
                "seed {seed}: gap {} vs independent {rhs}",
                t.i12 - t.i12s
            );
        }
    }

    #[test]
    fn gp_rate_stuck_at_memory_optimum() {
        // Stuck-at memory with stuck probability 0.2. The strategy that
        // writes the stuck value when stuck and a uniform bit when
        // transparent achieves exactly 1 - 0.2.
        let state = Factor::unconditioned(vec![spec("W", 3)], vec![0.1, 0.1, 0.8]).unwrap();
        let v = Factor::new(
            vec![spec("V", 2)],
            vec![spec("W", 3)],
            vec![1.0, 0.0, 0.0, 1.0, 0.5, 0.5],
        )
        .unwrap();
        let mut x_mass = Vec::new();
        for _w in 0..3 {
            for vv in 0..2 {
                x_mass.extend([
                    if vv == 0 { 1.0 } else { 0.0 },
                    if vv == 1 { 1.0 } else { 0.0 },
                ]);
            }
        }
        let x = Factor::new(vec![spec("X", 2)], vec![spec("W", 3), spec("V", 2)], x_mass).unwrap();
        let mut y_mass = Vec::new();
        for w in 0..3 {
            for xx in 0..2 {
                let y = match w {
                    0 => 0,
                    1 => 1,
                    _ => xx,
                };
                y_mass.extend([
                    if y == 0 { 1.0 } else { 0.0 },
                    if y == 1 { 1.0 } else { 0.0 },
                ]);
            }
        }
        let y = Factor::new(
            vec![spec("Y", 2)],
            vec![spec("W", 3), spec("X", 2)],
            y_mass,
        )
        .unwrap();
        let j = compose(&[&state, &v, &x, &y]).unwrap();
        let r = gp_rate(&j).unwrap();
        assert!((r - 0.8).abs() < 1e-12, "gp rate {r}");
    }

    #[test]
    fn gp_rate_useless_output_nonpositive() {
        let state = Factor::unconditioned(vec![spec("W", 1)], vec![1.0]).unwrap();
        let v = Factor::new(vec![spec("V", 2)], vec![spec("W", 1)], vec![0.5, 0.5]).unwrap();
        let x = Factor::new(
            vec![spec("X", 2)],
            vec![spec("W", 1), spec("V", 2)],
            vec![0.5, 0.5, 0.5, 0.5],
        )
        .unwrap();
        let y = Factor::new(vec![spec("Y", 2)], vec![spec("X", 2)], vec![0.5; 4]).unwrap();
        let j = compose(&[&state, &v, &x, &y]).unwrap();
        let r = gp_rate(&j).unwrap();
        assert!(r.abs() < 1e-12);
    }
}
