//! Challenge construction: random programs, small main-part search,
//! redundant padding, multi-secret embedding and scrambling.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::bitlin::{BitMatrix, BitVector};
use crate::error::{Error, Result};
use crate::evaluators::{correlation_clifford, CorrelationResult};
use crate::model::{Angle, IqpProgram, SecretKey};
use crate::rng;

/// How row angles are drawn by [`random_program`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnglePolicy {
    AllPiOver8,
    /// `k pi / 8` with `k` uniform in `0..8`.
    UniformPiOver8Multiples,
    Fixed(Angle),
}

/// `m` rows drawn uniformly from the nonzero `n`-bit strings.
pub fn random_program<R: Rng + ?Sized>(n: usize, m: usize, policy: AnglePolicy, rng: &mut R) -> Result<IqpProgram> {
    if m == 0 {
        return Err(Error::Argument("random_program needs m >= 1".into()));
    }
    if n == 0 {
        return Err(Error::Argument("random_program needs n >= 1".into()));
    }
    let mut rows = Vec::with_capacity(m);
    let mut angles = Vec::with_capacity(m);
    for _ in 0..m {
        rows.push(BitVector::random_nonzero(n, rng));
        angles.push(match policy {
            AnglePolicy::AllPiOver8 => Angle::pi_over_8(1),
            AnglePolicy::UniformPiOver8Multiples => Angle::pi_over_8(rng.random_range(0..8)),
            AnglePolicy::Fixed(a) => a,
        });
    }
    IqpProgram::new(BitMatrix::from_rows(n, rows)?, angles)
}

/// Random 2-local circuit `exp(i pi/8 (sum_{i<j} w_ij X_i X_j + sum_i v_i X_i))`
/// with coefficients uniform in `0..8`. Pair coefficients are drawn first in
/// lexicographic order, then the single-qubit ones; zero coefficients drop
/// their row.
pub fn random_2local<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<IqpProgram> {
    if n == 0 {
        return Err(Error::Argument("random_2local needs n >= 1".into()));
    }
    let mut program = IqpProgram::identity(n)?;
    for i in 0..n {
        for j in i + 1..n {
            let w: i64 = rng.random_range(0..8);
            if w != 0 {
                let mut row = BitVector::zeros(n);
                row.set(i, true);
                row.set(j, true);
                program.push_row(row, Angle::pi_over_8(w))?;
            }
        }
    }
    for i in 0..n {
        let v: i64 = rng.random_range(0..8);
        if v != 0 {
            let mut row = BitVector::zeros(n);
            row.set(i, true);
            program.push_row(row, Angle::pi_over_8(v))?;
        }
    }
    Ok(program)
}

/// Result of [`search_main_part`].
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Main-part rows on the `w`-qubit window.
    pub rows: Vec<BitVector>,
    /// The all-ones secret on the window.
    pub secret: BitVector,
    pub result: CorrelationResult,
    /// Whether `|value| >= target` was reached.
    pub met: bool,
    /// Candidates evaluated before stopping.
    pub evaluated: usize,
}

pub const SEARCH_MAX_WEIGHT: usize = 12;

/// Brute-force search for a small main part with a sizable correlation.
///
/// Candidates are row sets drawn from the odd-weight strings on `w` qubits
/// (odd overlap with `s = 1^w`), all at angle pi/8, evaluated exactly with
/// the Clifford backend. Returns the first candidate reaching `target`, or
/// the best seen within `budget` evaluations with `met = false`.
pub fn search_main_part<R: Rng + ?Sized>(w: usize, target: f64, budget: usize, rng: &mut R) -> Result<SearchOutcome> {
    if w == 0 || w > SEARCH_MAX_WEIGHT {
        return Err(Error::Argument(format!("window weight must lie in 1..={SEARCH_MAX_WEIGHT}, got {w}")));
    }
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::Argument(format!("target must lie in (0, 1], got {target}")));
    }
    if budget == 0 {
        return Err(Error::Argument("search budget must be positive".into()));
    }
    let secret = BitVector::ones(w);
    let candidates: Vec<BitVector> = (1u64..1 << w)
        .filter(|x| x.count_ones() % 2 == 1)
        .map(|x| BitVector::from_index(w, x))
        .collect();
    let max_rows = (2 * w).min(candidates.len());
    let mut best: Option<SearchOutcome> = None;
    let mut evaluated = 0;
    while evaluated < budget {
        evaluated += 1;
        let q = rng.random_range(1..=max_rows);
        let rows: Vec<BitVector> = candidates.choose_multiple(rng, q).cloned().collect();
        let program = IqpProgram::uniform(BitMatrix::from_rows(w, rows.clone())?, Angle::pi_over_8(1))?;
        let result = correlation_clifford(&program, &secret)?;
        let better = best.as_ref().is_none_or(|b| result.value.abs() > b.result.value.abs());
        let met = result.value.abs() >= target;
        if better || met {
            best = Some(SearchOutcome { rows, secret: secret.clone(), result, met, evaluated });
        }
        if met {
            break;
        }
    }
    let mut out = best.expect("budget >= 1 guarantees one candidate");
    out.evaluated = evaluated;
    Ok(out)
}

/// Appends `count` random nonzero rows with even overlap with every secret.
///
/// New rows reuse the program's common angle, or pi/8 when the angles differ.
pub fn add_redundant_rows<R: Rng + ?Sized>(
    program: &IqpProgram,
    secrets: &[BitVector],
    count: usize,
    rng: &mut R,
) -> Result<IqpProgram> {
    if count == 0 {
        return Ok(program.clone());
    }
    let n = program.n();
    let constraints = BitMatrix::from_rows(n, secrets.to_vec())?;
    let complement = constraints.null_space();
    if complement.is_empty() {
        return Err(Error::Construction(
            "secrets span the whole space; no nonzero row is orthogonal to all of them".into(),
        ));
    }
    let angle = program.common_angle().unwrap_or(Angle::pi_over_8(1));
    let mut out = program.clone();
    for _ in 0..count {
        let row = loop {
            let mut v = BitVector::zeros(n);
            for b in &complement {
                if rng.random::<bool>() {
                    v.xor_unchecked(b);
                }
            }
            if !v.is_zero() {
                break v;
            }
        };
        out.push_row(row, angle)?;
    }
    Ok(out)
}

/// A parity-preserving column operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScrambleOp {
    /// Column `dst` of chi gets `dst XOR src`; each secret gets `s_src ^= s_dst`.
    AddColumn { src: usize, dst: usize },
    /// Qubit relabeling: swaps columns in chi and entries in each secret.
    SwapColumns { a: usize, b: usize },
}

impl ScrambleOp {
    pub fn add(src: usize, dst: usize) -> Self {
        ScrambleOp::AddColumn { src, dst }
    }
}

/// Applies `ops` in order to the program and all secrets.
///
/// Every row/secret dot product is preserved, hence so is every `<Z_s>`.
pub fn scramble(program: &IqpProgram, secrets: &[BitVector], ops: &[ScrambleOp]) -> Result<(IqpProgram, Vec<BitVector>)> {
    let n = program.n();
    if let Some(s) = secrets.iter().find(|s| s.len() != n) {
        return Err(Error::Dimension(format!("secret {s} does not have length {n}")));
    }
    let mut out = program.clone();
    let mut secrets = secrets.to_vec();
    for op in ops {
        match *op {
            ScrambleOp::AddColumn { src, dst } => {
                out.chi_mut().add_column_in_place(src, dst)?;
                for s in &mut secrets {
                    if s.get(dst) {
                        s.flip(src);
                    }
                }
            }
            ScrambleOp::SwapColumns { a, b } => {
                out.chi_mut().swap_columns_in_place(a, b)?;
                for s in &mut secrets {
                    let (x, y) = (s.get(a), s.get(b));
                    s.set(a, y);
                    s.set(b, x);
                }
            }
        }
    }
    Ok((out, secrets))
}

/// Uniformly sampled column operations on `n` columns. With `allow_swaps`,
/// each op is a swap with probability 1/2.
pub fn random_ops<R: Rng + ?Sized>(n: usize, count: usize, allow_swaps: bool, rng: &mut R) -> Result<Vec<ScrambleOp>> {
    if n < 2 {
        if count == 0 {
            return Ok(Vec::new());
        }
        return Err(Error::Argument("scrambling needs at least two columns".into()));
    }
    Ok((0..count)
        .map(|_| {
            let src = rng.random_range(0..n);
            let mut dst = rng.random_range(0..n - 1);
            if dst >= src {
                dst += 1;
            }
            if allow_swaps && rng.random::<bool>() {
                ScrambleOp::SwapColumns { a: src, b: dst }
            } else {
                ScrambleOp::AddColumn { src, dst }
            }
        })
        .collect())
}

/// Parameters for [`build_challenge`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionSpec {
    pub n: usize,
    /// Number of secrets `K`.
    pub secrets: usize,
    /// Support weight of each secret before scrambling.
    pub weight: usize,
    /// Minimum `|<Z_s>|` per secret.
    pub target: f64,
    /// Candidate evaluations per secret.
    pub budget: usize,
    pub redundant_rows: usize,
    /// Defaults to `20 n` when `None`.
    pub scramble_ops: Option<usize>,
    pub allow_swaps: bool,
    pub seed: u64,
}

impl ConstructionSpec {
    pub fn new(n: usize, secrets: usize, weight: usize, seed: u64) -> Self {
        Self {
            n,
            secrets,
            weight,
            target: 0.7,
            budget: 2000,
            redundant_rows: 2 * n,
            scramble_ops: None,
            allow_swaps: false,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.secrets == 0 || self.weight == 0 {
            return Err(Error::Argument("need at least one secret of weight >= 1".into()));
        }
        if self.secrets * self.weight > self.n {
            return Err(Error::Argument(format!(
                "{} disjoint blocks of weight {} do not fit on {} qubits",
                self.secrets, self.weight, self.n
            )));
        }
        if !(self.target > 0.0 && self.target <= 1.0) {
            return Err(Error::Argument(format!("target must lie in (0, 1], got {}", self.target)));
        }
        Ok(())
    }
}

/// Tolerance for re-verifying expected values after shuffling and scrambling.
const REVERIFY_TOL: f64 = 1e-9;

/// Builds a challenge program and its secret key.
///
/// Each secret owns a disjoint block of `weight` qubits holding a searched
/// main part; blocks are merged, padded with rows orthogonal to all secrets,
/// row-shuffled and scrambled. Expected values come from the block search and
/// are re-checked on the final program.
pub fn build_challenge(spec: &ConstructionSpec) -> Result<(IqpProgram, SecretKey)> {
    spec.validate()?;
    let mut rng = rng::seeded(spec.seed);
    let n = spec.n;
    let w = spec.weight;
    let mut program = IqpProgram::identity(n)?;
    let mut secrets = Vec::with_capacity(spec.secrets);
    let mut expected = Vec::with_capacity(spec.secrets);
    let mut notes = Vec::new();
    for k in 0..spec.secrets {
        let offset = k * w;
        let found = search_main_part(w, spec.target, spec.budget, &mut rng)?;
        if !found.met {
            return Err(Error::Construction(format!(
                "secret {k}: best |<Z_s>| = {:.6} (g = {:?}) after {} candidates, below target {}",
                found.result.value.abs(),
                found.result.g,
                found.evaluated,
                spec.target
            )));
        }
        for row in &found.rows {
            let mut full = BitVector::zeros(n);
            for j in row.ones_iter() {
                full.set(offset + j, true);
            }
            program.push_row(full, Angle::pi_over_8(1))?;
        }
        let mut s = BitVector::zeros(n);
        for j in 0..w {
            s.set(offset + j, true);
        }
        secrets.push(s);
        expected.push(found.result.value);
        notes.push(format!("secret {k}: g={:?} backend=clifford rows={}", found.result.g, found.rows.len()));
    }

    program = add_redundant_rows(&program, &secrets, spec.redundant_rows, &mut rng)?;
    let mut order: Vec<usize> = (0..program.m()).collect();
    order.shuffle(&mut rng);
    program = program.permute_rows(&order)?;
    let op_count = spec.scramble_ops.unwrap_or(20 * n);
    let ops = random_ops(n, op_count, spec.allow_swaps, &mut rng)?;
    let (program, secrets) = scramble(&program, &secrets, &ops)?;

    for (k, (s, e)) in secrets.iter().zip(&expected).enumerate() {
        let fresh = correlation_clifford(&program, s)?.value;
        if (fresh - e).abs() > REVERIFY_TOL {
            return Err(Error::Construction(format!(
                "secret {k}: expected {e} but final program gives {fresh}"
            )));
        }
    }
    let key = SecretKey::new(n, secrets, expected)?.with_notes(notes);
    Ok((program, key))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluators::{correlation_statevector, correlation_subspace};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn random_program_contract() {
        let a = random_program(6, 6, AnglePolicy::AllPiOver8, &mut rng::seeded(1)).unwrap();
        let b = random_program(6, 6, AnglePolicy::AllPiOver8, &mut rng::seeded(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m(), 6);
        assert!(a.chi().rows().iter().all(|r| !r.is_zero()));
        assert_eq!(random_program(4, 1, AnglePolicy::AllPiOver8, &mut rng::seeded(2)).unwrap().m(), 1);
        assert!(random_program(4, 0, AnglePolicy::AllPiOver8, &mut rng::seeded(2)).is_err());
    }

    #[test]
    fn two_local_structure() {
        for seed in 0..20 {
            let p = random_2local(2, &mut rng::seeded(seed)).unwrap();
            assert!(p.m() <= 3);
            for (row, a) in p.chi().rows().iter().zip(p.angles()) {
                assert!(row.weight() == 1 || row.weight() == 2);
                let k = a.pi_over_8_multiple().unwrap();
                assert!((1..8).contains(&k));
            }
        }
        let a = random_2local(3, &mut rng::seeded(7)).unwrap();
        assert_eq!(a, random_2local(3, &mut rng::seeded(7)).unwrap());
    }

    #[test]
    fn search_smallest_instances() {
        let out = search_main_part(1, 0.7, 10, &mut rng::seeded(0)).unwrap();
        assert!(out.met);
        assert_eq!(out.rows, vec![bv("1")]);
        assert!((out.result.value - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(out.result.g, Some(1));

        let out = search_main_part(2, 0.70, 100, &mut rng::seeded(0)).unwrap();
        assert!(out.met);
        assert!(out.result.value.abs() >= 0.70);

        // no odd-overlap row set on two qubits reaches 1
        let out = search_main_part(2, 0.99, 50, &mut rng::seeded(0)).unwrap();
        assert!(!out.met);
        assert_eq!(out.evaluated, 50);

        assert!(search_main_part(2, 1.5, 10, &mut rng::seeded(0)).is_err());
    }

    #[test]
    fn redundant_rows_keep_correlation() {
        let p = IqpProgram::from_strs(4, &["1100", "0101"], Angle::pi_over_8(1)).unwrap();
        let s = bv("1000");
        let padded = add_redundant_rows(&p, std::slice::from_ref(&s), 3, &mut rng::seeded(5)).unwrap();
        assert_eq!(padded.m(), 5);
        for row in &padded.chi().rows()[2..] {
            assert!(!row.dot(&s).unwrap());
        }
        let before = correlation_statevector(&p, &s).unwrap().value;
        let after = correlation_statevector(&padded, &s).unwrap().value;
        assert!((before - after).abs() < 1e-9);

        assert_eq!(add_redundant_rows(&p, &[s], 0, &mut rng::seeded(5)).unwrap(), p);

        let p2 = IqpProgram::from_strs(2, &["10"], Angle::pi_over_8(1)).unwrap();
        let spanning = [bv("10"), bv("01"), bv("11")];
        assert!(matches!(
            add_redundant_rows(&p2, &spanning, 1, &mut rng::seeded(5)),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn scramble_matches_worked_example() {
        let p = IqpProgram::from_strs(4, &["1100", "0101"], Angle::pi_over_8(1)).unwrap();
        let s = bv("1000");
        let (q, ss) = scramble(&p, std::slice::from_ref(&s), &[ScrambleOp::add(0, 2)]).unwrap();
        assert_eq!(q.chi(), &BitMatrix::from_strs(&["1110", "0101"]).unwrap());
        assert_eq!(ss, vec![s.clone()]);
        let (back, sb) = scramble(&q, &ss, &[ScrambleOp::add(0, 2)]).unwrap();
        assert_eq!((back, sb), (p.clone(), vec![s.clone()]));

        // s entry update: s_src ^= s_dst
        let (_, ss) = scramble(&p, &[bv("0001")], &[ScrambleOp::add(2, 3)]).unwrap();
        assert_eq!(ss, vec![bv("0011")]);
        assert!(scramble(&p, &[s], &[ScrambleOp::add(1, 1)]).is_err());
    }

    #[test]
    fn scramble_preserves_parities_and_values() {
        let mut r = rng::seeded(21);
        for _ in 0..20 {
            let p = random_program(7, 6, AnglePolicy::AllPiOver8, &mut r).unwrap();
            let s = BitVector::random_nonzero(7, &mut r);
            let ops = random_ops(7, 200, true, &mut r).unwrap();
            let (q, ss) = scramble(&p, std::slice::from_ref(&s), &ops).unwrap();
            for (a, b) in p.chi().rows().iter().zip(q.chi().rows()) {
                assert_eq!(a.dot(&s).unwrap(), b.dot(&ss[0]).unwrap());
            }
            let before = correlation_subspace(&p, &s).unwrap().value;
            let after = correlation_subspace(&q, &ss[0]).unwrap().value;
            assert_eq!(before, after);
        }
    }

    #[test]
    fn minimal_challenge() {
        let mut spec = ConstructionSpec::new(4, 1, 1, 3);
        spec.redundant_rows = 0;
        spec.scramble_ops = Some(0);
        let (p, key) = build_challenge(&spec).unwrap();
        assert_eq!(p, IqpProgram::from_strs(4, &["1000"], Angle::pi_over_8(1)).unwrap());
        assert_eq!(key.secrets(), &[bv("1000")]);
        assert!((key.expected()[0] - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn multi_secret_challenge_reverifies() {
        let spec = ConstructionSpec::new(10, 2, 2, 17);
        let (p, key) = build_challenge(&spec).unwrap();
        assert_eq!(key.len(), 2);
        for (s, e) in key.iter() {
            let fresh = correlation_statevector(&p, s).unwrap().value;
            assert!((fresh - e).abs() < 1e-9);
            assert!(e.abs() >= 0.7);
        }
    }

    #[test]
    fn construction_rejects_bad_specs() {
        assert!(build_challenge(&ConstructionSpec::new(3, 2, 2, 0)).is_err());
        let mut spec = ConstructionSpec::new(4, 1, 2, 0);
        spec.target = 0.99;
        spec.budget = 20;
        assert!(matches!(build_challenge(&spec), Err(Error::Construction(_))));
    }
}
