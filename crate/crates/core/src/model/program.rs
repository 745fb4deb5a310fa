use crate::bitlin::{BitMatrix, BitVector};
use crate::error::{Error, Result};

use super::angle::Angle;

/// An IQP circuit `prod_p exp(i theta_p X_p)` on `n` qubits, one row of `chi`
/// per Pauli-X product.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IqpProgram {
    chi: BitMatrix,
    angles: Vec<Angle>,
}

impl IqpProgram {
    pub fn new(chi: BitMatrix, angles: Vec<Angle>) -> Result<Self> {
        if angles.len() != chi.nrows() {
            return Err(Error::Dimension(format!(
                "{} angles for {} rows",
                angles.len(),
                chi.nrows()
            )));
        }
        if let Some(i) = chi.rows().iter().position(BitVector::is_zero) {
            return Err(Error::Validation(format!("row {i} is all zero")));
        }
        Ok(Self { chi, angles })
    }

    /// Program with no terms (the identity circuit).
    pub fn identity(n: usize) -> Result<Self> {
        Self::new(BitMatrix::new(n)?, Vec::new())
    }

    /// Every row gets the same angle.
    pub fn uniform(chi: BitMatrix, angle: Angle) -> Result<Self> {
        let m = chi.nrows();
        Self::new(chi, vec![angle; m])
    }

    pub fn from_strs<S: AsRef<str>>(n: usize, rows: &[S], angle: Angle) -> Result<Self> {
        let parsed = rows.iter().map(|r| r.as_ref().parse()).collect::<Result<Vec<BitVector>>>()?;
        Self::uniform(BitMatrix::from_rows(n, parsed)?, angle)
    }

    pub fn n(&self) -> usize {
        self.chi.ncols()
    }

    pub fn m(&self) -> usize {
        self.chi.nrows()
    }

    pub fn chi(&self) -> &BitMatrix {
        &self.chi
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn row(&self, i: usize) -> &BitVector {
        self.chi.row(i)
    }

    pub fn push_row(&mut self, row: BitVector, angle: Angle) -> Result<()> {
        if row.is_zero() {
            return Err(Error::Validation("cannot add an all-zero row".into()));
        }
        self.chi.push_row(row)?;
        self.angles.push(angle);
        Ok(())
    }

    pub(crate) fn chi_mut(&mut self) -> &mut BitMatrix {
        &mut self.chi
    }

    /// Reorders rows: row `i` of the result is row `order[i]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.m()];
        if order.len() != self.m() || !order.iter().all(|&i| i < self.m() && !std::mem::replace(&mut seen[i], true)) {
            return Err(Error::Argument("row order is not a permutation".into()));
        }
        Ok(Self {
            chi: self.chi.select_rows(order),
            angles: order.iter().map(|&i| self.angles[i]).collect(),
        })
    }

    /// Sub-program made of the listed rows.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            chi: self.chi.select_rows(indices),
            angles: indices.iter().map(|&i| self.angles[i]).collect(),
        }
    }

    /// Rows as integer masks (bit `j` = qubit `j + 1`). Requires `n <= 64`.
    pub fn row_masks(&self) -> Vec<u64> {
        self.chi.rows().iter().map(BitVector::to_index).collect()
    }

    /// The common angle if every row shares one.
    pub fn common_angle(&self) -> Option<Angle> {
        let first = *self.angles.first()?;
        self.angles.iter().all(|a| *a == first).then_some(first)
    }

    /// Human-readable product of exponentials, e.g. `e^{i(1/8)π X1X2} · e^{i(1/8)π X2X4}`.
    pub fn hamiltonian_text(&self) -> String {
        if self.m() == 0 {
            return "I".to_string();
        }
        self.chi
            .rows()
            .iter()
            .zip(&self.angles)
            .map(|(row, angle)| {
                let paulis: String = row.ones_iter().map(|q| format!("X{}", q + 1)).collect();
                format!("e^{{i({angle})π {paulis}}}")
            })
            .collect::<Vec<_>>()
            .join(" · ")
    }

    /// Splits rows by parity against `s`.
    pub fn partition(&self, s: &BitVector) -> Result<Partition> {
        if s.len() != self.n() {
            return Err(Error::Dimension(format!(
                "secret of length {} for program on {} qubits",
                s.len(),
                self.n()
            )));
        }
        let mut main_rows = Vec::new();
        let mut redundant_rows = Vec::new();
        for (i, row) in self.chi.rows().iter().enumerate() {
            if row.dot_unchecked(s) {
                main_rows.push(i);
            } else {
                redundant_rows.push(i);
            }
        }
        Ok(Partition { main_rows, redundant_rows })
    }

    /// The rows anticommuting with `Z_s`, as a program of their own.
    pub fn main_part(&self, s: &BitVector) -> Result<IqpProgram> {
        let part = self.partition(s)?;
        Ok(self.select_rows(&part.main_rows))
    }
}

/// Row indices split by their parity against a secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Rows `p` with `p . s = 1`.
    pub main_rows: Vec<usize>,
    /// Rows `p` with `p . s = 0`.
    pub redundant_rows: Vec<usize>,
}

/// Probability of observing an output orthogonal to `s`, `(1 + <Z_s>) / 2`.
pub fn bias_from_correlation(v: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&v) {
        return Err(Error::Argument(format!("correlation {v} outside [-1, 1]")));
    }
    Ok((1.0 + v) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_row() -> IqpProgram {
        IqpProgram::from_strs(4, &["1100", "0101"], Angle::pi_over_8(1)).unwrap()
    }

    #[test]
    fn hamiltonian_text_examples() {
        assert_eq!(two_row().hamiltonian_text(), "e^{i(1/8)π X1X2} · e^{i(1/8)π X2X4}");
        let single = IqpProgram::from_strs(4, &["1000"], Angle::pi_over_8(1)).unwrap();
        assert_eq!(single.hamiltonian_text(), "e^{i(1/8)π X1}");
        assert_eq!(IqpProgram::identity(3).unwrap().hamiltonian_text(), "I");
    }

    #[test]
    fn partition_examples() {
        let p = two_row();
        let part = p.partition(&"1000".parse().unwrap()).unwrap();
        assert_eq!((part.main_rows, part.redundant_rows), (vec![0], vec![1]));
        let part = p.partition(&"0010".parse().unwrap()).unwrap();
        assert!(part.main_rows.is_empty());
        let part = p.partition(&"0100".parse().unwrap()).unwrap();
        assert_eq!((part.main_rows, part.redundant_rows), (vec![0, 1], vec![]));
        assert!(p.partition(&"010".parse().unwrap()).is_err());
    }

    #[test]
    fn bias_examples() {
        let b = bias_from_correlation(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((b - 0.8536).abs() < 1e-4);
        assert_eq!(bias_from_correlation(1.0).unwrap(), 1.0);
        assert_eq!(bias_from_correlation(0.0).unwrap(), 0.5);
        assert!(bias_from_correlation(1.01).is_err());
    }

    #[test]
    fn rejects_zero_rows_and_mismatched_angles() {
        let chi = BitMatrix::from_strs(&["0000"]).unwrap();
        assert!(IqpProgram::uniform(chi, Angle::pi_over_8(1)).is_err());
        let chi = BitMatrix::from_strs(&["1000"]).unwrap();
        assert!(IqpProgram::new(chi, vec![]).is_err());
    }

    #[test]
    fn duplicate_rows_allowed() {
        assert!(IqpProgram::from_strs(2, &["10", "10"], Angle::pi_over_8(1)).is_ok());
    }
}
