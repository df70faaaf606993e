//! Dense joint probability mass functions over named finite variables.

use super::{entropy_of, neumaier_sum, odometer_step};
use crate::error::{Error, Result};
use crate::{DEFAULT_MAX_CELLS, JOINT_NORM_TOL};

/// A named finite alphabet axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSpec {
    name: String,
    cardinality: usize,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, cardinality: usize) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidArgument("variable name is empty".into()));
        }
        if cardinality == 0 {
            return Err(Error::InvalidArgument(format!(
                "variable `{name}` must have cardinality >= 1"
            )));
        }
        Ok(Self { name, cardinality })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }
}

/// Dense joint PMF. The mass array is row-major in the declared variable
/// order with the last variable fastest. Immutable after construction; all
/// operations are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPMF {
    variables: Vec<VariableSpec>,
    strides: Vec<usize>,
    mass: Vec<f64>,
}

fn strides_for(variables: &[VariableSpec]) -> Vec<usize> {
    let mut strides = vec![1usize; variables.len()];
    for i in (0..variables.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * variables[i + 1].cardinality();
    }
    strides
}

fn checked_cell_count(variables: &[VariableSpec], cap: usize) -> Result<usize> {
    let mut cells: u128 = 1;
    for v in variables {
        cells *= v.cardinality() as u128;
        if cells > cap as u128 {
            return Err(Error::TooLarge {
                cells,
                cap: cap as u128,
            });
        }
    }
    Ok(cells as usize)
}

impl JointPMF {
    /// Builds a joint from a dense mass array, validating shape,
    /// nonnegativity, and normalization (total within `1e-12` of one).
    pub fn new(variables: Vec<VariableSpec>, mass: Vec<f64>) -> Result<Self> {
        Self::with_cap(variables, mass, DEFAULT_MAX_CELLS)
    }

    /// Like [`JointPMF::new`] with an explicit cell-count cap.
    pub fn with_cap(variables: Vec<VariableSpec>, mass: Vec<f64>, cap: usize) -> Result<Self> {
        for (i, a) in variables.iter().enumerate() {
            for b in &variables[i + 1..] {
                if a.name() == b.name() {
                    return Err(Error::InvalidArgument(format!(
                        "duplicate variable `{}`",
                        a.name()
                    )));
                }
            }
        }
        let cells = checked_cell_count(&variables, cap)?;
        if mass.len() != cells {
            return Err(Error::Shape(format!(
                "mass has {} entries, expected {}",
                mass.len(),
                cells
            )));
        }
        for (i, &p) in mass.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "mass entry {i} is not finite"
                )));
            }
            if p < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "mass entry {i} is negative ({p})"
                )));
            }
        }
        let total = neumaier_sum(&mass);
        if (total - 1.0).abs() > JOINT_NORM_TOL {
            return Err(Error::NotNormalized { sum: total });
        }
        Ok(Self::from_parts(variables, mass))
    }

    /// Internal constructor for mass that was just normalized by the caller.
    pub(crate) fn from_parts(variables: Vec<VariableSpec>, mass: Vec<f64>) -> Self {
        let strides = strides_for(&variables);
        Self {
            variables,
            strides,
            mass,
        }
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn cells(&self) -> usize {
        self.mass.len()
    }

    pub fn has_variable(&self, name: &str) -> bool {
        self.variables.iter().any(|v| v.name() == name)
    }

    pub fn cardinality_of(&self, name: &str) -> Result<usize> {
        self.axis_of(name)
            .map(|ax| self.variables[ax].cardinality())
    }

    fn axis_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Resolves names to sorted, duplicate-free axis indices.
    fn axes_for(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut axes = Vec::with_capacity(names.len());
        for name in names {
            axes.push(self.axis_of(name)?);
        }
        axes.sort_unstable();
        for w in axes.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidArgument(format!(
                    "variable `{}` listed twice",
                    self.variables[w[0]].name()
                )));
            }
        }
        Ok(axes)
    }

    /// Marginal mass over the given (sorted, unique) axes, in axis order with
    /// the last axis fastest.
    fn marginal_mass(&self, axes: &[usize]) -> Vec<f64> {
        let out_len: usize = axes.iter().map(|&a| self.variables[a].cardinality()).product();
        let mut out = vec![0.0; out_len];
        // Per-axis contribution of a source digit to the destination index.
        let mut contrib = vec![0usize; self.variables.len()];
        let mut stride = 1usize;
        for &a in axes.iter().rev() {
            contrib[a] = stride;
            stride *= self.variables[a].cardinality();
        }
        let cards: Vec<usize> = self.variables.iter().map(|v| v.cardinality()).collect();
        let mut digits = vec![0usize; self.variables.len()];
        for &p in &self.mass {
            let mut dest = 0usize;
            for (d, c) in digits.iter().zip(&contrib) {
                dest += d * c;
            }
            out[dest] += p;
            odometer_step(&mut digits, &cards);
        }
        out
    }

    fn entropy_axes(&self, axes: &[usize]) -> f64 {
        if axes.is_empty() {
            return 0.0;
        }
        if axes.len() == self.variables.len() {
            return entropy_of(&self.mass);
        }
        entropy_of(&self.marginal_mass(axes))
    }

    /// Shannon entropy in bits of the marginal on `subset`.
    pub fn entropy(&self, subset: &[&str]) -> Result<f64> {
        let axes = self.axes_for(subset)?;
        Ok(self.entropy_axes(&axes))
    }

    /// H(target | given) = H(target, given) - H(given). Zero-probability
    /// conditions contribute nothing.
    pub fn conditional_entropy(&self, target: &[&str], given: &[&str]) -> Result<f64> {
        let t = self.axes_for(target)?;
        let g = self.axes_for(given)?;
        disjoint(&t, &g, self)?;
        if t.is_empty() {
            return Ok(0.0);
        }
        let tg = merged(&t, &g);
        Ok(self.entropy_axes(&tg) - self.entropy_axes(&g))
    }

    /// I(a ; b | given) in bits. The raw value is returned; tiny negative
    /// results from float noise are not clamped.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        let ax = self.axes_for(a)?;
        let bx = self.axes_for(b)?;
        let gx = self.axes_for(given)?;
        disjoint(&ax, &bx, self)?;
        disjoint(&ax, &gx, self)?;
        disjoint(&bx, &gx, self)?;
        if ax.is_empty() || bx.is_empty() {
            return Ok(0.0);
        }
        let ag = merged(&ax, &gx);
        let bg = merged(&bx, &gx);
        let abg = merged(&ag, &bx);
        Ok(self.entropy_axes(&ag) + self.entropy_axes(&bg)
            - self.entropy_axes(&gx)
            - self.entropy_axes(&abg))
    }

    /// Sums out every variable not in `keep`; the result is renormalized and
    /// keeps the parent's variable order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPMF> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument(
                "marginalize requires a nonempty variable set".into(),
            ));
        }
        let axes = self.axes_for(keep)?;
        let mut mass = self.marginal_mass(&axes);
        let total = neumaier_sum(&mass);
        if total <= 0.0 {
            return Err(Error::NotNormalized { sum: total });
        }
        for p in &mut mass {
            *p /= total;
        }
        let variables = axes.iter().map(|&a| self.variables[a].clone()).collect();
        Ok(JointPMF::from_parts(variables, mass))
    }

    pub fn total_mass(&self) -> f64 {
        neumaier_sum(&self.mass)
    }
}

fn merged(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out.dedup();
    out
}

fn disjoint(a: &[usize], b: &[usize], j: &JointPMF) -> Result<()> {
    for x in a {
        if b.contains(x) {
            return Err(Error::InvalidArgument(format!(
                "variable `{}` appears on both sides",
                j.variables[*x].name()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, card: usize) -> VariableSpec {
        VariableSpec::new(name, card).unwrap()
    }

    fn uniform_bit(name: &str) -> JointPMF {
        JointPMF::new(vec![spec(name, 2)], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn entropy_uniform_bit_is_one() {
        let j = uniform_bit("X");
        assert_eq!(j.entropy(&["X"]).unwrap(), 1.0);
    }

    #[test]
    fn entropy_point_mass_is_zero() {
        let j = JointPMF::new(vec![spec("X", 3)], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(j.entropy(&["X"]).unwrap(), 0.0);
    }

    #[test]
    fn entropy_quarter_three_quarter() {
        let j = JointPMF::new(vec![spec("X", 2)], vec![0.25, 0.75]).unwrap();
        // -0.25 log2 0.25 - 0.75 log2 0.75, evaluated directly.
        let expected = 0.811_278_124_459_132_8;
        assert!((j.entropy(&["X"]).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn entropy_unknown_variable_errors() {
        let j = uniform_bit("X");
        assert!(matches!(
            j.entropy(&["Z"]),
            Err(Error::UnknownVariable(name)) if name == "Z"
        ));
    }

    /// Joint over (X, Y) with Y a copy of X.
    fn copy_pair() -> JointPMF {
        JointPMF::new(
            vec![spec("X", 2), spec("Y", 2)],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap()
    }

    #[test]
    fn conditional_entropy_of_copy_is_zero() {
        let j = copy_pair();
        assert_eq!(j.conditional_entropy(&["X"], &["Y"]).unwrap(), 0.0);
    }

    #[test]
    fn conditional_entropy_independent_equals_entropy() {
        let mass: Vec<f64> = (0..4)
            .map(|i| [0.25, 0.75][i / 2] * [0.4, 0.6][i % 2])
            .collect();
        let j = JointPMF::new(vec![spec("X", 2), spec("Y", 2)], mass).unwrap();
        let h = j.entropy(&["X"]).unwrap();
        let hc = j.conditional_entropy(&["X"], &["Y"]).unwrap();
        assert!((h - hc).abs() < 1e-14);
    }

    #[test]
    fn conditional_entropy_xor_masks_input() {
        // X, Z independent uniform bits, Y = X xor Z. Expected H(X|Y) = 1,
        // checked against a direct evaluation over the 8-entry joint.
        let mut mass = vec![0.0; 8];
        for x in 0..2 {
            for z in 0..2 {
                let y = x ^ z;
                mass[x * 4 + z * 2 + y] = 0.25;
            }
        }
        let j = JointPMF::new(vec![spec("X", 2), spec("Z", 2), spec("Y", 2)], mass.clone()).unwrap();

        // Independent brute force: H(X,Y) - H(Y) from the raw table.
        let mut pxy = [[0.0f64; 2]; 2];
        let mut py = [0.0f64; 2];
        for x in 0..2 {
            for z in 0..2 {
                for y in 0..2 {
                    pxy[x][y] += mass[x * 4 + z * 2 + y];
                    py[y] += mass[x * 4 + z * 2 + y];
                }
            }
        }
        let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
        let hxy: f64 = pxy.iter().flatten().copied().map(h).sum();
        let hy: f64 = py.iter().copied().map(h).sum();
        let expected = hxy - hy;
        assert!((expected - 1.0).abs() < 1e-15);

        let got = j.conditional_entropy(&["X"], &["Y"]).unwrap();
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn conditional_entropy_overlap_errors() {
        let j = copy_pair();
        assert!(matches!(
            j.conditional_entropy(&["X"], &["X"]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mutual_information_independent_is_zero() {
        let mass: Vec<f64> = (0..4)
            .map(|i| [0.3, 0.7][i / 2] * [0.6, 0.4][i % 2])
            .collect();
        let j = JointPMF::new(vec![spec("X", 2), spec("Y", 2)], mass).unwrap();
        assert!(j.mutual_information(&["X"], &["Y"], &[]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn mutual_information_copy_is_one_bit() {
        let j = copy_pair();
        let i = j.mutual_information(&["X"], &["Y"], &[]).unwrap();
        assert!((i - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mutual_information_binary_symmetric_kernel() {
        // Uniform input through a flip-0.1 kernel; closed form 1 - h2(0.1).
        let flip = 0.1f64;
        let mut mass = vec![0.0; 4];
        for x in 0..2 {
            for y in 0..2 {
                let k = if x == y { 1.0 - flip } else { flip };
                mass[x * 2 + y] = 0.5 * k;
            }
        }
        let j = JointPMF::new(vec![spec("X", 2), spec("Y", 2)], mass).unwrap();
        let h2 = -(flip * flip.log2() + (1.0 - flip) * (1.0 - flip).log2());
        let expected = 1.0 - h2;
        assert!((expected - 0.531_004_406_410_718_8).abs() < 1e-15);
        let got = j.mutual_information(&["X"], &["Y"], &[]).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_empty_side_is_zero() {
        let j = copy_pair();
        assert_eq!(j.mutual_information(&[], &["Y"], &[]).unwrap(), 0.0);
    }

    #[test]
    fn marginalize_uniform_pair() {
        let j = JointPMF::new(
            vec![spec("X", 2), spec("Y", 2)],
            vec![0.25, 0.25, 0.25, 0.25],
        )
        .unwrap();
        let m = j.marginalize(&["X"]).unwrap();
        assert_eq!(m.variables().len(), 1);
        assert_eq!(m.mass(), &[0.5, 0.5]);
    }

    #[test]
    fn marginalize_to_all_is_identity() {
        let j = copy_pair();
        let m = j.marginalize(&["X", "Y"]).unwrap();
        assert_eq!(m.mass(), j.mass());
    }

    #[test]
    fn marginalize_product_recovers_factor() {
        let px = [0.2, 0.8];
        let qy = [0.55, 0.45];
        let mass: Vec<f64> = (0..4).map(|i| px[i / 2] * qy[i % 2]).collect();
        let j = JointPMF::new(vec![spec("X", 2), spec("Y", 2)], mass).unwrap();
        let m = j.marginalize(&["X"]).unwrap();
        assert!((m.mass()[0] - px[0]).abs() < 1e-15);
        assert!((m.mass()[1] - px[1]).abs() < 1e-15);
    }

    #[test]
    fn marginalize_empty_keep_errors() {
        let j = copy_pair();
        assert!(matches!(
            j.marginalize(&[]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn new_rejects_unnormalized() {
        let err = JointPMF::new(vec![spec("X", 2)], vec![0.5, 0.6]);
        assert!(matches!(err, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn new_rejects_negative() {
        let err = JointPMF::new(vec![spec("X", 2)], vec![-0.1, 1.1]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let vars = vec![spec("A", 101), spec("B", 100)];
        let err = JointPMF::with_cap(vars, vec![], 10_000);
        assert!(matches!(err, Err(Error::TooLarge { .. })));
    }
}
