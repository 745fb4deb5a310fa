use iqp_verify::bitlin::{enumerate_span, span_weight_histogram, walsh_hadamard, BitMatrix, BitVector, XorBasis};
use proptest::prelude::*;

fn bitvec(len: usize) -> impl Strategy<Value = BitVector> {
    proptest::collection::vec(any::<bool>(), len).prop_map(|b| BitVector::from_bits(&b))
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(m, n)| {
        proptest::collection::vec(bitvec(n), m).prop_map(move |rows| BitMatrix::from_rows(n, rows).unwrap())
    })
}

proptest! {
    #[test]
    fn dot_is_bilinear((u, v, w) in (1usize..150).prop_flat_map(|n| (bitvec(n), bitvec(n), bitvec(n)))) {
        let uv = u.xor(&v).unwrap();
        prop_assert_eq!(uv.dot(&w).unwrap(), u.dot(&w).unwrap() ^ v.dot(&w).unwrap());
        prop_assert_eq!(u.dot(&v).unwrap(), v.dot(&u).unwrap());
    }

    #[test]
    fn rank_equals_transpose_rank(m in matrix(12, 12)) {
        prop_assert_eq!(m.rank(), m.transpose().unwrap().rank());
        prop_assert_eq!(m.column_space_basis().len(), m.rank());
    }

    #[test]
    fn null_space_dimension_and_orthogonality(m in matrix(10, 14)) {
        let ns = m.null_space();
        prop_assert_eq!(ns.len() + m.rank(), m.ncols());
        for v in &ns {
            for r in m.rows() {
                prop_assert!(!r.dot(v).unwrap());
            }
        }
    }

    #[test]
    fn span_has_two_to_the_dim_distinct_members(m in matrix(8, 9)) {
        let basis = m.column_space_basis();
        let members: Vec<BitVector> = enumerate_span(&basis, m.nrows()).unwrap().collect();
        prop_assert_eq!(members.len(), 1usize << basis.len());
        let distinct: std::collections::BTreeSet<_> = members.iter().cloned().collect();
        prop_assert_eq!(distinct.len(), members.len());
        let hist = span_weight_histogram(&basis, m.nrows()).unwrap();
        prop_assert_eq!(hist.iter().sum::<u64>(), 1u64 << basis.len());
        let mut by_weight = vec![0u64; m.nrows() + 1];
        for v in &members {
            by_weight[v.weight()] += 1;
        }
        prop_assert_eq!(hist, by_weight);
    }

    #[test]
    fn add_column_preserves_column_space(m in matrix(8, 8), a in 0usize..8, b in 0usize..8) {
        prop_assume!(a < m.ncols() && b < m.ncols() && a != b);
        let out = m.add_column(a, b).unwrap();
        let mut before = XorBasis::new();
        for c in m.columns() { before.insert(&c); }
        let mut after = XorBasis::new();
        for c in out.columns() { after.insert(&c); }
        prop_assert_eq!(before.dim(), after.dim());
        for c in out.columns() { prop_assert!(before.contains(&c)); }
        prop_assert_eq!(out.add_column(a, b).unwrap(), m);
    }

    #[test]
    fn walsh_hadamard_matches_direct_sum(n in 0usize..=8, seed in any::<u64>()) {
        let size = 1usize << n;
        let f: Vec<f64> = (0..size).map(|i| ((i as u64).wrapping_mul(seed | 1) % 1000) as f64 / 7.0 - 50.0).collect();
        let fast = walsh_hadamard(&f).unwrap();
        for (s, got) in fast.iter().enumerate() {
            let direct: f64 = f.iter().enumerate()
                .map(|(x, v)| if (x & s).count_ones() % 2 == 0 { *v } else { -*v })
                .sum();
            prop_assert!((got - direct).abs() < 1e-9 * (1.0 + direct.abs()));
        }
    }
}

#[test]
fn walsh_rejects_non_power_of_two() {
    assert!(walsh_hadamard(&[1.0, 2.0, 3.0]).is_err());
    assert!(walsh_hadamard(&[]).is_err());
}
