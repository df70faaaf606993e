//! Conditional probability factors and their composition into joints.

use super::joint::{JointPMF, VariableSpec};
use super::{neumaier_sum, odometer_step};
use crate::error::{Error, Result};
use crate::{COMPOSE_NORM_TOL, DEFAULT_MAX_CELLS};

/// A conditional mass table p(outputs | given). The mass array is row-major
/// over the axes `given ++ outputs`, last axis fastest, so each conditioning
/// index selects one contiguous slice over the outputs.
///
/// Construction checks structure only; normalization and nonnegativity are
/// audited separately so that invalid tables can be turned into readable
/// validation reports instead of being rejected opaquely.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    outputs: Vec<VariableSpec>,
    given: Vec<VariableSpec>,
    mass: Vec<f64>,
}

impl Factor {
    pub fn new(
        outputs: Vec<VariableSpec>,
        given: Vec<VariableSpec>,
        mass: Vec<f64>,
    ) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::InvalidArgument(
                "factor must produce at least one variable".into(),
            ));
        }
        let mut names: Vec<&str> = outputs.iter().chain(&given).map(|v| v.name()).collect();
        names.sort_unstable();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidArgument(format!(
                    "variable `{}` declared twice in one factor",
                    w[0]
                )));
            }
        }
        let cells: usize = outputs
            .iter()
            .chain(&given)
            .map(|v| v.cardinality())
            .product();
        if mass.len() != cells {
            return Err(Error::Shape(format!(
                "factor mass has {} entries, expected {}",
                mass.len(),
                cells
            )));
        }
        for (i, &p) in mass.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "factor entry {i} is not finite"
                )));
            }
        }
        Ok(Self {
            outputs,
            given,
            mass,
        })
    }

    /// Unconditioned factor (a plain distribution over its outputs).
    pub fn unconditioned(outputs: Vec<VariableSpec>, mass: Vec<f64>) -> Result<Self> {
        Self::new(outputs, Vec::new(), mass)
    }

    pub fn outputs(&self) -> &[VariableSpec] {
        &self.outputs
    }

    pub fn given(&self) -> &[VariableSpec] {
        &self.given
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub(crate) fn mass_mut(&mut self) -> &mut [f64] {
        &mut self.mass
    }

    /// Cells per conditioning slice.
    pub fn slice_len(&self) -> usize {
        self.outputs.iter().map(|v| v.cardinality()).product()
    }

    pub fn slice_count(&self) -> usize {
        self.given.iter().map(|v| v.cardinality()).product()
    }

    pub fn slices(&self) -> impl Iterator<Item = &[f64]> {
        self.mass.chunks(self.slice_len())
    }

    /// Decodes a slice index into per-conditioning-variable digits.
    pub fn slice_digits(&self, mut slice: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.given.len()];
        for i in (0..self.given.len()).rev() {
            digits[i] = slice % self.given[i].cardinality();
            slice /= self.given[i].cardinality();
        }
        digits
    }

    /// Exact per-slice renormalization. Slices with zero total mass become
    /// uniform so the result is a valid conditional regardless of input.
    pub fn normalized(&self) -> Factor {
        let slice_len = self.slice_len();
        let mut mass = self.mass.clone();
        for chunk in mass.chunks_mut(slice_len) {
            let total = neumaier_sum(chunk);
            if total > 0.0 {
                for p in chunk.iter_mut() {
                    *p /= total;
                }
            } else {
                let u = 1.0 / slice_len as f64;
                for p in chunk.iter_mut() {
                    *p = u;
                }
            }
        }
        Factor {
            outputs: self.outputs.clone(),
            given: self.given.clone(),
            mass,
        }
    }

}

/// Multiplies a chain of factors into a joint distribution. Every
/// conditioning variable must be produced by an earlier factor and no
/// variable may be produced twice. The product is checked to sum to one
/// within `1e-10` and then renormalized exactly.
pub fn compose(factors: &[&Factor]) -> Result<JointPMF> {
    compose_with_cap(factors, DEFAULT_MAX_CELLS)
}

pub fn compose_with_cap(factors: &[&Factor], cap: usize) -> Result<JointPMF> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("compose needs at least one factor".into()));
    }
    let mut variables: Vec<VariableSpec> = Vec::new();
    // joint axis index of each factor's own axes, in factor storage order
    let mut factor_axes: Vec<Vec<usize>> = Vec::with_capacity(factors.len());
    for f in factors {
        let mut axes = Vec::with_capacity(f.given().len() + f.outputs().len());
        for g in f.given() {
            match variables.iter().position(|v| v.name() == g.name()) {
                Some(ax) => {
                    if variables[ax].cardinality() != g.cardinality() {
                        return Err(Error::CardinalityMismatch {
                            name: g.name().to_string(),
                            expected: variables[ax].cardinality(),
                            got: g.cardinality(),
                        });
                    }
                    axes.push(ax);
                }
                None => return Err(Error::DanglingConditioning(g.name().to_string())),
            }
        }
        for o in f.outputs() {
            if variables.iter().any(|v| v.name() == o.name()) {
                return Err(Error::DuplicateOutput(o.name().to_string()));
            }
            variables.push(o.clone());
            axes.push(variables.len() - 1);
        }
        factor_axes.push(axes);
    }

    let mut cells: u128 = 1;
    for v in &variables {
        cells *= v.cardinality() as u128;
        if cells > cap as u128 {
            return Err(Error::TooLarge {
                cells,
                cap: cap as u128,
            });
        }
    }
    let cells = cells as usize;

    // Per-factor strides over its own storage order.
    let mut factor_strides: Vec<Vec<usize>> = Vec::with_capacity(factors.len());
    for f in factors {
        let dims: Vec<usize> = f
            .given()
            .iter()
            .chain(f.outputs())
            .map(|v| v.cardinality())
            .collect();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        factor_strides.push(strides);
    }

    let cards: Vec<usize> = variables.iter().map(|v| v.cardinality()).collect();
    let mut digits = vec![0usize; variables.len()];
    let mut mass = vec![0.0f64; cells];
    for cell in mass.iter_mut() {
        let mut p = 1.0;
        for ((f, axes), strides) in factors.iter().zip(&factor_axes).zip(&factor_strides) {
            let mut idx = 0usize;
            for (ax, st) in axes.iter().zip(strides) {
                idx += digits[*ax] * st;
            }
            p *= f.mass()[idx];
        }
        *cell = p;
        odometer_step(&mut digits, &cards);
    }

    let total = neumaier_sum(&mass);
    if (total - 1.0).abs() > COMPOSE_NORM_TOL {
        return Err(Error::NotNormalized { sum: total });
    }
    for p in &mut mass {
        *p /= total;
    }
    Ok(JointPMF::from_parts(variables, mass))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, card: usize) -> VariableSpec {
        VariableSpec::new(name, card).unwrap()
    }

    #[test]
    fn single_factor_composes_to_itself() {
        let f = Factor::unconditioned(vec![spec("W", 3)], vec![0.2, 0.3, 0.5]).unwrap();
        let j = compose(&[&f]).unwrap();
        assert_eq!(j.mass(), f.mass());
    }

    #[test]
    fn independent_factors_compose_to_product() {
        let a = Factor::unconditioned(vec![spec("X", 2)], vec![0.3, 0.7]).unwrap();
        let b = Factor::unconditioned(vec![spec("Y", 2)], vec![0.9, 0.1]).unwrap();
        let j = compose(&[&a, &b]).unwrap();
        let expected = [0.3 * 0.9, 0.3 * 0.1, 0.7 * 0.9, 0.7 * 0.1];
        for (got, want) in j.mass().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn full_chain_normalizes() {
        // p(w) p(v1,v2|w) p(x|w,v1,v2) p(y1,y2|x,w) on binary alphabets.
        let state = Factor::unconditioned(vec![spec("W", 2)], vec![0.4, 0.6]).unwrap();
        let aux = Factor::new(
            vec![spec("V1", 2), spec("V2", 2)],
            vec![spec("W", 2)],
            vec![0.1, 0.2, 0.3, 0.4, 0.25, 0.25, 0.25, 0.25],
        )
        .unwrap();
        let input = Factor::new(
            vec![spec("X", 2)],
            vec![spec("W", 2), spec("V1", 2), spec("V2", 2)],
            (0..8).flat_map(|i| [0.1 * (i + 1) as f64, 1.0 - 0.1 * (i + 1) as f64]).collect(),
        )
        .unwrap();
        let kernel = Factor::new(
            vec![spec("Y1", 2), spec("Y2", 2)],
            vec![spec("W", 2), spec("X", 2)],
            (0..4).flat_map(|_| [0.3, 0.2, 0.4, 0.1]).collect(),
        )
        .unwrap();
        let j = compose(&[&state, &aux, &input, &kernel]).unwrap();
        assert_eq!(j.variables().len(), 6);
        assert!((j.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dangling_conditioning_is_rejected() {
        let f = Factor::new(vec![spec("Y", 2)], vec![spec("X", 2)], vec![0.5; 4]).unwrap();
        assert!(matches!(
            compose(&[&f]),
            Err(Error::DanglingConditioning(name)) if name == "X"
        ));
    }

    #[test]
    fn duplicate_output_is_rejected() {
        let a = Factor::unconditioned(vec![spec("X", 2)], vec![0.5, 0.5]).unwrap();
        let b = Factor::unconditioned(vec![spec("X", 2)], vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            compose(&[&a, &b]),
            Err(Error::DuplicateOutput(name)) if name == "X"
        ));
    }

    #[test]
    fn cardinality_mismatch_is_rejected() {
        let a = Factor::unconditioned(vec![spec("X", 2)], vec![0.5, 0.5]).unwrap();
        let b = Factor::new(vec![spec("Y", 2)], vec![spec("X", 3)], vec![0.5; 6]).unwrap();
        assert!(matches!(compose(&[&a, &b]), Err(Error::CardinalityMismatch { .. })));
    }

    #[test]
    fn unnormalized_product_is_rejected() {
        let a = Factor::unconditioned(vec![spec("X", 2)], vec![0.5, 0.4]).unwrap();
        assert!(matches!(compose(&[&a]), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn normalized_fixes_slices() {
        let f = Factor::new(
            vec![spec("Y", 2)],
            vec![spec("X", 2)],
            vec![0.2, 0.2, 0.0, 0.0],
        )
        .unwrap();
        let n = f.normalized();
        assert_eq!(n.mass(), &[0.5, 0.5, 0.5, 0.5]);
    }
}
