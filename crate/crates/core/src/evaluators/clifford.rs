//! Exact amplitudes of diagonal Clifford circuits.
//!
//! For angles that are multiples of pi/8 the correlation function is the
//! amplitude `<+^n| prod_p exp(i w_p pi/4 Z_p) |+^n>`. Each factor is a CNOT
//! ladder collecting the parity of `p` onto one qubit, a phase gate `S^-w`
//! there, and the ladder undone, times the scalar `exp(i w pi/4)`. On the
//! computational basis that sequence multiplies `|y>` by `i^(-w (p . y))`, so
//! the state stays in the form
//!
//! ```text
//! 2^(-n/2) omega^k sum_y i^(sum_j a_j y_j + 2 sum_{j<l} B_jl y_j y_l) |y>
//! ```
//!
//! with `a` in Z4, `B` a symmetric GF(2) matrix and `omega = exp(i pi/4)`.
//! The overlap with `|+^n>` is then a quadratic exponential sum, evaluated
//! exactly by eliminating one variable at a time.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::IqpProgram;

use super::{Backend, CorrelationResult};

/// A number of the form `0` or `omega^phase * sqrt(2)^sqrt2_power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactScalar {
    Zero,
    Value { sqrt2_power: i64, phase: u8 },
}

impl ExactScalar {
    pub const ONE: ExactScalar = ExactScalar::Value { sqrt2_power: 0, phase: 0 };

    fn mul(self, sqrt2_power: i64, phase: i64) -> Self {
        match self {
            ExactScalar::Zero => ExactScalar::Zero,
            ExactScalar::Value { sqrt2_power: p, phase: k } => ExactScalar::Value {
                sqrt2_power: p + sqrt2_power,
                phase: (k as i64 + phase).rem_euclid(8) as u8,
            },
        }
    }

    /// `sqrt(2)^p` without going through `powf`.
    pub fn sqrt2_pow(p: i64) -> f64 {
        let half = p.div_euclid(2);
        let base = 2f64.powi(half as i32);
        if p.rem_euclid(2) == 1 {
            base * std::f64::consts::SQRT_2
        } else {
            base
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            ExactScalar::Zero => Complex64::new(0.0, 0.0),
            ExactScalar::Value { sqrt2_power, phase } => {
                let mag = Self::sqrt2_pow(sqrt2_power);
                let (re, im) = match phase {
                    0 => (1.0, 0.0),
                    1 => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
                    2 => (0.0, 1.0),
                    3 => (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
                    4 => (-1.0, 0.0),
                    5 => (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
                    6 => (0.0, -1.0),
                    _ => (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
                };
                Complex64::new(mag * re, mag * im)
            }
        }
    }
}

/// The Z4-valued quadratic phase `q(y) = sum_j a_j y_j + 2 sum_{j<l} B_jl y_j y_l`
/// together with a global eighth-root-of-unity phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePolynomial {
    n: usize,
    linear: Vec<u8>,
    adjacency: Vec<BitVector>,
    global_phase: i64,
}

impl PhasePolynomial {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            linear: vec![0; n],
            adjacency: vec![BitVector::zeros(n); n],
            global_phase: 0,
        }
    }

    /// Builds a polynomial from explicit coefficients (used by tests and tools).
    pub fn from_coefficients(linear: Vec<u8>, edges: &[(usize, usize)]) -> Self {
        let n = linear.len();
        let mut poly = Self::new(n);
        for (j, a) in linear.into_iter().enumerate() {
            poly.linear[j] = a & 3;
        }
        for &(j, l) in edges {
            poly.toggle_edge(j, l);
        }
        poly
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linear(&self) -> &[u8] {
        &self.linear
    }

    pub fn edge(&self, j: usize, l: usize) -> bool {
        self.adjacency[j].get(l)
    }

    fn add_linear(&mut self, j: usize, delta: i64) {
        self.linear[j] = ((self.linear[j] as i64 + delta).rem_euclid(4)) as u8;
    }

    fn toggle_edge(&mut self, j: usize, l: usize) {
        if j != l {
            self.adjacency[j].flip(l);
            self.adjacency[l].flip(j);
        }
    }

    fn toggle_clique(&mut self, members: &[usize]) {
        for (i, &j) in members.iter().enumerate() {
            for &l in &members[i + 1..] {
                self.toggle_edge(j, l);
            }
        }
    }

    /// Applies `exp(i w pi/4 Z_p)`.
    ///
    /// `Z_p` has eigenvalue `(-1)^(p.y)`, so the factor on `|y>` is
    /// `omega^w * i^(-w (p.y))`. Lifting the parity to Z4,
    /// `p.y = sum y_j - 2 sum_{j<l} y_j y_l (mod 4)` over the support of `p`.
    pub fn apply_z_rotation(&mut self, support: &BitVector, w: i64) {
        assert_eq!(support.len(), self.n, "rotation support has wrong length");
        self.global_phase = (self.global_phase + w).rem_euclid(8);
        let members: Vec<usize> = support.ones_iter().collect();
        for &j in &members {
            self.add_linear(j, -w);
        }
        if w.rem_euclid(2) == 1 {
            self.toggle_clique(&members);
        }
    }

    fn alive_neighbors(&self, v: usize, alive: &[bool]) -> Vec<usize> {
        self.adjacency[v].ones_iter().filter(|&u| alive[u]).collect()
    }

    fn detach(&mut self, v: usize) {
        let neighbors: Vec<usize> = self.adjacency[v].ones_iter().collect();
        for u in neighbors {
            self.toggle_edge(v, u);
        }
    }

    /// `sum_{y in {0,1}^n} i^q(y)`, times the global phase, exactly.
    pub fn exponential_sum(&self) -> ExactScalar {
        let mut poly = self.clone();
        let mut alive = vec![true; poly.n];
        let mut acc = ExactScalar::ONE.mul(0, poly.global_phase);
        for v in (0..poly.n).rev() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            let a = poly.linear[v];
            let nbrs = poly.alive_neighbors(v, &alive);
            poly.detach(v);
            if a % 2 == 1 {
                // sum over y_v of i^(a y_v + 2 L y_v) = sqrt2 * omega^(+-1) * i^(-+L)
                let sign: i64 = if a == 1 { 1 } else { -1 };
                acc = acc.mul(1, sign);
                for &u in &nbrs {
                    poly.add_linear(u, -sign);
                }
                poly.toggle_clique(&nbrs);
                continue;
            }
            let c = (a / 2) as usize;
            let Some((&k, rest)) = nbrs.split_first() else {
                // no coupling: the sum over y_v is 2 or 0
                if c == 0 {
                    acc = acc.mul(2, 0);
                    continue;
                }
                return ExactScalar::Zero;
            };
            // sum over y_v forces parity(y_nbrs) = c with weight 2;
            // eliminate y_k = c + sum_{t in rest} y_t
            acc = acc.mul(2, 0);
            alive[k] = false;
            let ak = poly.linear[k] as i64;
            let k_nbrs = poly.alive_neighbors(k, &alive);
            poly.detach(k);
            // 2 y_k y_j terms
            for &j in &k_nbrs {
                if c == 1 {
                    poly.add_linear(j, 2);
                }
                for &t in rest {
                    if t == j {
                        poly.add_linear(j, 2);
                    } else {
                        poly.toggle_edge(t, j);
                    }
                }
            }
            // a_k y_k term, y_k = c + (-1)^c lift(rest)
            let sign: i64 = if c == 0 { 1 } else { -1 };
            acc = acc.mul(0, 2 * ak * c as i64);
            for &t in rest {
                poly.add_linear(t, sign * ak);
            }
            if ak % 2 == 1 {
                poly.toggle_clique(rest);
            }
        }
        acc
    }
}

/// `<Z_s>` as an exact stabilizer amplitude. Requires every main-part angle
/// to be an integer multiple of pi/8.
pub fn correlation_clifford(program: &IqpProgram, s: &BitVector) -> Result<CorrelationResult> {
    let main = program.main_part(s)?;
    let n = program.n();
    let mut poly = PhasePolynomial::new(n);
    for (row, angle) in main.chi().rows().iter().zip(main.angles()) {
        let k = angle.pi_over_8_multiple().ok_or_else(|| {
            Error::Precondition(format!("angle {angle} (x pi) is not a multiple of pi/8"))
        })?;
        // exp(i 2 theta X_p) with 2 theta = k pi/4
        poly.apply_z_rotation(row, k);
    }
    // <+^n| psi> contributes 2^(-n/2) on top of the state's 2^(-n/2)
    let amplitude = poly.exponential_sum().mul(-2 * n as i64, 0);
    let (value, g) = match amplitude {
        ExactScalar::Zero => (0.0, None),
        ExactScalar::Value { sqrt2_power, phase } => {
            let sign = match phase {
                0 => 1.0,
                4 => -1.0,
                other => {
                    return Err(Error::Precondition(format!(
                        "amplitude has non-real phase omega^{other}"
                    )))
                }
            };
            let g = u32::try_from(-sqrt2_power).map_err(|_| {
                Error::Precondition(format!("amplitude magnitude sqrt2^{sqrt2_power} exceeds 1"))
            })?;
            (sign * ExactScalar::sqrt2_pow(sqrt2_power), Some(g))
        }
    };
    Ok(CorrelationResult { value, backend: Backend::Clifford, error_bound: 0.0, g, samples_used: None })
}
