use iqp_verify::bitlin::{BitMatrix, BitVector};
use iqp_verify::model::{parse_key, parse_program, serialize_key, serialize_program, Angle, IqpProgram, SecretKey};
use iqp_verify::Error;
use proptest::prelude::*;

fn program() -> impl Strategy<Value = IqpProgram> {
    (1usize..20, 1usize..12).prop_flat_map(|(n, m)| {
        let row = proptest::collection::vec(any::<bool>(), n)
            .prop_filter("nonzero", |b| b.iter().any(|x| *x))
            .prop_map(|b| BitVector::from_bits(&b));
        let angle = (-20i64..20, 1i64..40).prop_map(|(k, d)| Angle::new(k, d).unwrap());
        proptest::collection::vec((row, angle), m).prop_map(move |rows| {
            let (r, a): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
            IqpProgram::new(BitMatrix::from_rows(n, r).unwrap(), a).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn program_round_trips(p in program()) {
        let text = serialize_program(&p);
        prop_assert_eq!(parse_program(&text).unwrap(), p);
    }

    #[test]
    fn key_round_trips(n in 1usize..30, k in 1usize..4, seed in any::<u64>()) {
        let mut r = iqp_verify::rng::seeded(seed);
        let mut secrets: Vec<BitVector> = Vec::new();
        while secrets.len() < k.min((1usize << n.min(10)) - 1) {
            let s = BitVector::random_nonzero(n, &mut r);
            if !secrets.contains(&s) { secrets.push(s); }
        }
        let expected: Vec<f64> = (0..secrets.len()).map(|i| 1.0 / (i as f64 + 1.5)).collect();
        let key = SecretKey::new(n, secrets, expected).unwrap().with_notes(vec!["made in a test".into()]);
        prop_assert_eq!(parse_key(&serialize_key(&key)).unwrap(), key);
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = "version 1\nn 3\nm 1\nrow 1x0\nangle 1/8\n";
    match parse_program(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = "# challenge\nversion 1\n\nn 2\nm 1\nrow 11\nangle 1/8\n";
    let p = parse_program(text).unwrap();
    assert_eq!(p, IqpProgram::from_strs(2, &["11"], Angle::pi_over_8(1)).unwrap());
}
