//! Probability-simplex primitives: validated distribution types, marginals,
//! conditionals, and the entropy-type functionals everything else is built on.
//!
//! Conventions used throughout the crate:
//! - all logarithms are natural, so every information quantity is in nats;
//! - `0·ln 0 = 0`;
//! - `D(p||q) = +∞` when `p` places mass where `q` has none;
//! - dividing by a zero marginal never produces a number — the affected
//!   conditional column is flagged undefined instead.

use thiserror::Error;

/// A pmf must sum to 1 within this tolerance to validate.
pub const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ProbError {
    #[error("{what} is empty")]
    Empty { what: &'static str },
    #[error("{what}{index} = {value} is negative")]
    Negative {
        what: &'static str,
        index: String,
        value: f64,
    },
    #[error("{what}{index} is not finite")]
    NonFinite { what: &'static str, index: String },
    #[error("{what} sums to {sum:.17}, not a distribution (must be 1 within {SUM_TOL:e})")]
    NotNormalized { what: &'static str, sum: f64 },
    #[error("ragged table: row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("source has {source_len} symbols but distortion table has {rows} rows")]
    DimensionMismatch { source_len: usize, rows: usize },
    #[error("{which} has {got} labels but the alphabet has {expected} symbols")]
    LabelMismatch {
        which: &'static str,
        expected: usize,
        got: usize,
    },
}

/// A probability distribution over a finite source alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct SourcePmf {
    probs: Vec<f64>,
}

impl SourcePmf {
    /// Validates that `probs` is a distribution: nonnegative entries summing
    /// to 1 within [`SUM_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self, ProbError> {
        validate_prob_vector("source", &probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, x: usize) -> f64 {
        self.probs[x]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

fn validate_prob_vector(what: &'static str, probs: &[f64]) -> Result<(), ProbError> {
    if probs.is_empty() {
        return Err(ProbError::Empty { what });
    }
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() {
            return Err(ProbError::NonFinite {
                what,
                index: format!("[{i}]"),
            });
        }
        if p < 0.0 {
            return Err(ProbError::Negative {
                what,
                index: format!("[{i}]"),
                value: p,
            });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(ProbError::NotNormalized { what, sum });
    }
    Ok(())
}

fn validate_table(
    what: &'static str,
    rows: &[Vec<f64>],
) -> Result<(usize, usize, Vec<f64>), ProbError> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(ProbError::Empty { what });
    }
    let ny = rows[0].len();
    let mut flat = Vec::with_capacity(rows.len() * ny);
    for (x, row) in rows.iter().enumerate() {
        if row.len() != ny {
            return Err(ProbError::Ragged {
                row: x,
                got: row.len(),
                expected: ny,
            });
        }
        for (y, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(ProbError::NonFinite {
                    what,
                    index: format!("[{x}][{y}]"),
                });
            }
            if v < 0.0 {
                return Err(ProbError::Negative {
                    what,
                    index: format!("[{x}][{y}]"),
                    value: v,
                });
            }
            flat.push(v);
        }
    }
    Ok((rows.len(), ny, flat))
}

/// A joint probability distribution over `X × Y`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    probs: Vec<f64>,
    nx: usize,
    ny: usize,
}

impl JointPmf {
    /// Validates a nested-list table: nonnegative entries with total mass 1
    /// within [`SUM_TOL`].
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ProbError> {
        let (nx, ny, flat) = validate_table("joint", &rows)?;
        Self::from_flat(nx, ny, flat)
    }

    /// Same validation as [`JointPmf::new`] on an already-flat row-major table.
    pub fn from_flat(nx: usize, ny: usize, probs: Vec<f64>) -> Result<Self, ProbError> {
        assert_eq!(probs.len(), nx * ny);
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() {
                return Err(ProbError::NonFinite {
                    what: "joint",
                    index: format!("[{}][{}]", i / ny, i % ny),
                });
            }
            if p < 0.0 {
                return Err(ProbError::Negative {
                    what: "joint",
                    index: format!("[{}][{}]", i / ny, i % ny),
                    value: p,
                });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(ProbError::NotNormalized { what: "joint", sum });
        }
        Ok(Self { probs, nx, ny })
    }

    pub fn uniform(nx: usize, ny: usize) -> Self {
        assert!(nx > 0 && ny > 0);
        Self {
            probs: vec![1.0 / (nx * ny) as f64; nx * ny],
            nx,
            ny,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.ny + y]
    }

    /// Row-major cell values.
    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    /// Both marginals in one pass: `q_X(x) = Σ_y q(x,y)`, `q_Y(y) = Σ_x q(x,y)`.
    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let mut qx = vec![0.0; self.nx];
        let mut qy = vec![0.0; self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                let q = self.get(x, y);
                qx[x] += q;
                qy[y] += q;
            }
        }
        (qx, qy)
    }

    /// The conditional table `q_{X|Y}(x|y) = q(x,y)/q_Y(y)`. Columns with
    /// `q_Y(y) = 0` carry no number; they are flagged undefined and reading
    /// them panics.
    pub fn conditional_x_given_y(&self) -> ConditionalXGivenY {
        let (_, qy) = self.marginals();
        let mut probs = vec![0.0; self.nx * self.ny];
        let mut defined = vec![false; self.ny];
        for y in 0..self.ny {
            if qy[y] > 0.0 {
                defined[y] = true;
                for x in 0..self.nx {
                    probs[x * self.ny + y] = self.get(x, y) / qy[y];
                }
            }
        }
        ConditionalXGivenY {
            probs,
            defined,
            nx: self.nx,
            ny: self.ny,
        }
    }

    /// `I(X;Y) = Σ q(x,y) ln( q(x,y) / (q_X(x) q_Y(y)) )` in nats.
    ///
    /// Zero-probability cells contribute nothing. Round-off from the
    /// summation is floored so the result is never a spurious tiny negative.
    pub fn mutual_information(&self) -> f64 {
        let (qx, qy) = self.marginals();
        let mut total = 0.0;
        for x in 0..self.nx {
            for y in 0..self.ny {
                let q = self.get(x, y);
                if q > 0.0 {
                    total += q * (q / (qx[x] * qy[y])).ln();
                }
            }
        }
        if total < 0.0 && total > -1e-12 {
            0.0
        } else {
            total
        }
    }

    /// `E_q[d(X,Y)] = Σ q(x,y) d(x,y)`.
    pub fn expected_distortion(&self, d: &DistortionTable) -> f64 {
        assert_eq!((self.nx, self.ny), (d.nx, d.ny), "shape mismatch");
        self.probs
            .iter()
            .zip(d.values.iter())
            .map(|(&q, &dv)| q * dv)
            .sum()
    }
}

/// Conditional distribution of `X` given `Y`, with zero-marginal columns
/// flagged undefined rather than filled with a made-up number.
#[derive(Debug, Clone)]
pub struct ConditionalXGivenY {
    probs: Vec<f64>,
    defined: Vec<bool>,
    nx: usize,
    ny: usize,
}

impl ConditionalXGivenY {
    /// Whether column `y` carries a conditional distribution
    /// (i.e. `q_Y(y) > 0`).
    pub fn is_defined(&self, y: usize) -> bool {
        self.defined[y]
    }

    /// `q_{X|Y}(x|y)`. Panics if column `y` is undefined.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(
            self.defined[y],
            "conditional column y={y} is undefined (zero marginal)"
        );
        self.probs[x * self.ny + y]
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }
}

/// A nonnegative distortion table `d(x,y)` with its maximum cached.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionTable {
    values: Vec<f64>,
    nx: usize,
    ny: usize,
    d_max: f64,
    zero_row: bool,
}

impl DistortionTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ProbError> {
        let (nx, ny, values) = validate_table("distortion", &rows)?;
        let d_max = values.iter().copied().fold(0.0, f64::max);
        let zero_row = (0..nx).all(|x| (0..ny).any(|y| values[x * ny + y] == 0.0));
        Ok(Self {
            values,
            nx,
            ny,
            d_max,
            zero_row,
        })
    }

    /// The `|X| × |X|` table with `d(x,y) = 1` iff `x ≠ y`.
    pub fn hamming(n: usize) -> Self {
        let rows = (0..n)
            .map(|x| (0..n).map(|y| if x == y { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(rows).expect("hamming table is valid")
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.ny + y]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// True iff every row contains at least one zero entry, i.e. every source
    /// symbol has a distortion-free reproduction. The solvers run without it;
    /// only the `Ω(μ,0) = 0` identity depends on it.
    pub fn has_zero_row(&self) -> bool {
        self.zero_row
    }
}

/// A validated problem instance: a source distribution and a distortion
/// table over matching alphabets, plus optional display labels.
#[derive(Debug, Clone)]
pub struct Problem {
    source: SourcePmf,
    distortion: DistortionTable,
    labels_x: Option<Vec<String>>,
    labels_y: Option<Vec<String>>,
}

impl Problem {
    /// Checks that the alphabets agree. Absence of the zero-row property is
    /// deliberately not an error; query it via
    /// [`DistortionTable::has_zero_row`].
    pub fn new(source: SourcePmf, distortion: DistortionTable) -> Result<Self, ProbError> {
        if source.len() != distortion.nx() {
            return Err(ProbError::DimensionMismatch {
                source_len: source.len(),
                rows: distortion.nx(),
            });
        }
        Ok(Self {
            source,
            distortion,
            labels_x: None,
            labels_y: None,
        })
    }

    pub fn with_labels(
        mut self,
        labels_x: Option<Vec<String>>,
        labels_y: Option<Vec<String>>,
    ) -> Result<Self, ProbError> {
        if let Some(ref lx) = labels_x {
            if lx.len() != self.nx() {
                return Err(ProbError::LabelMismatch {
                    which: "labels_x",
                    expected: self.nx(),
                    got: lx.len(),
                });
            }
        }
        if let Some(ref ly) = labels_y {
            if ly.len() != self.ny() {
                return Err(ProbError::LabelMismatch {
                    which: "labels_y",
                    expected: self.ny(),
                    got: ly.len(),
                });
            }
        }
        self.labels_x = labels_x;
        self.labels_y = labels_y;
        Ok(self)
    }

    pub fn source(&self) -> &SourcePmf {
        &self.source
    }

    pub fn distortion(&self) -> &DistortionTable {
        &self.distortion
    }

    pub fn nx(&self) -> usize {
        self.source.len()
    }

    pub fn ny(&self) -> usize {
        self.distortion.ny()
    }

    pub fn labels_x(&self) -> Option<&[String]> {
        self.labels_x.as_deref()
    }

    pub fn labels_y(&self) -> Option<&[String]> {
        self.labels_y.as_deref()
    }
}

/// `D(p||q) = Σ p(x) ln(p(x)/q(x))` in nats, with `0·ln(0/·) = 0` and `+∞`
/// when `p` has mass outside the support of `q`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "length mismatch");
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            total += pi * (pi / qi).ln();
        }
    }
    if total < 0.0 && total > -1e-12 {
        0.0
    } else {
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn validate_accepts_binary_hamming() {
        let p = SourcePmf::new(vec![0.5, 0.5]).unwrap();
        let d = DistortionTable::hamming(2);
        assert!(d.has_zero_row());
        assert_eq!(d.d_max(), 1.0);
        let prob = Problem::new(p, d).unwrap();
        assert_eq!((prob.nx(), prob.ny()), (2, 2));
    }

    #[test]
    fn validate_rejects_non_distribution() {
        let err = SourcePmf::new(vec![0.6, 0.5]).unwrap_err();
        assert!(matches!(err, ProbError::NotNormalized { .. }));
    }

    #[test]
    fn zero_row_property_reflects_table() {
        let p = SourcePmf::new(vec![0.5, 0.5]).unwrap();
        let d = DistortionTable::new(vec![vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(!d.has_zero_row()); // row 0 has no zero entry
        assert!(Problem::new(p, d).is_ok());
    }

    #[test]
    fn rejects_negative_entries_and_dimension_mismatch() {
        assert!(matches!(
            DistortionTable::new(vec![vec![0.0, -1.0], vec![1.0, 0.0]]),
            Err(ProbError::Negative { .. })
        ));
        let p = SourcePmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        let d = DistortionTable::hamming(2);
        assert!(matches!(
            Problem::new(p, d),
            Err(ProbError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn marginals_of_simple_tables() {
        let q = JointPmf::uniform(2, 2);
        let (qx, qy) = q.marginals();
        assert_eq!(qx, vec![0.5, 0.5]);
        assert_eq!(qy, vec![0.5, 0.5]);

        let q = JointPmf::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let (qx, qy) = q.marginals();
        assert_eq!(qx, vec![0.5, 0.5]);
        assert_eq!(qy, vec![0.5, 0.5]);

        let q = JointPmf::new(vec![vec![0.2, 0.1], vec![0.3, 0.4]]).unwrap();
        let (qx, qy) = q.marginals();
        assert!(close(qx[0], 0.3, 1e-15) && close(qx[1], 0.7, 1e-15));
        assert!(close(qy[0], 0.5, 1e-15) && close(qy[1], 0.5, 1e-15));
    }

    #[test]
    fn conditional_columns() {
        // deterministic coupling: identity columns
        let q = JointPmf::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let c = q.conditional_x_given_y();
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(1, 0), 0.0);
        assert_eq!(c.get(1, 1), 1.0);

        // independence: every entry 0.5
        let q = JointPmf::uniform(2, 2);
        let c = q.conditional_x_given_y();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(c.get(x, y), 0.5);
            }
        }

        let q = JointPmf::new(vec![vec![0.2, 0.1], vec![0.3, 0.4]]).unwrap();
        let c = q.conditional_x_given_y();
        assert!(close(c.get(0, 0), 0.4, 1e-15));
        assert!(close(c.get(1, 0), 0.6, 1e-15));
        assert!(close(c.get(0, 1), 0.2, 1e-15));
        assert!(close(c.get(1, 1), 0.8, 1e-15));
    }

    #[test]
    fn conditional_flags_zero_marginal_column() {
        let q = JointPmf::new(vec![vec![0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        let c = q.conditional_x_given_y();
        assert!(c.is_defined(0));
        assert!(!c.is_defined(1));
    }

    #[test]
    #[should_panic(expected = "undefined")]
    fn reading_undefined_column_panics() {
        let q = JointPmf::new(vec![vec![0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        let c = q.conditional_x_given_y();
        let _ = c.get(0, 1);
    }

    #[test]
    fn kl_basics() {
        let p = [0.3, 0.7];
        assert_eq!(kl_divergence(&p, &p), 0.0);
        let ln2 = std::f64::consts::LN_2;
        assert!(close(kl_divergence(&[1.0, 0.0], &[0.5, 0.5]), ln2, 1e-15));
        assert_eq!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn mutual_information_values() {
        // product distribution -> 0
        let q = JointPmf::new(vec![vec![0.06, 0.14], vec![0.24, 0.56]]).unwrap();
        assert!(q.mutual_information().abs() <= 1e-12);

        // deterministic uniform coupling -> ln 2
        let q = JointPmf::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!(close(q.mutual_information(), std::f64::consts::LN_2, 1e-15));

        // direct evaluation of the summation formula:
        //   0.2 ln(0.2/0.15) + 0.1 ln(0.1/0.15) + 0.3 ln(0.3/0.35) + 0.4 ln(0.4/0.35)
        // = 0.0241572567811714 (cross-checked as H(X) + H(Y) - H(X,Y))
        let q = JointPmf::new(vec![vec![0.2, 0.1], vec![0.3, 0.4]]).unwrap();
        assert!(close(q.mutual_information(), 0.0241572567811714, 1e-12));
    }

    #[test]
    fn expected_distortion_values() {
        let zero = DistortionTable::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let q = JointPmf::uniform(2, 2);
        assert_eq!(q.expected_distortion(&zero), 0.0);

        let ham = DistortionTable::hamming(2);
        assert!(close(q.expected_distortion(&ham), 0.5, 1e-15));

        let q = JointPmf::new(vec![vec![0.2, 0.1], vec![0.3, 0.4]]).unwrap();
        assert!(close(q.expected_distortion(&ham), 0.4, 1e-15));
    }

    #[test]
    fn conditional_recombines_with_marginal() {
        let q = JointPmf::new(vec![vec![0.2, 0.1], vec![0.3, 0.4]]).unwrap();
        let (_, qy) = q.marginals();
        let c = q.conditional_x_given_y();
        for x in 0..2 {
            for y in 0..2 {
                assert!(close(c.get(x, y) * qy[y], q.get(x, y), 1e-15));
            }
        }
    }
}
