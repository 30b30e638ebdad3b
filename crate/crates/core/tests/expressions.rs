use proptest::prelude::*;
use symseries::expr::{
    evaluate, evaluate_raw, parse, parse_body, sample_expr, serialize, BinaryOp, Expr, ExprSamplerParams, UnaryOp,
};
use symseries::rng::stream;

fn corpus() -> Vec<String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/corpus.txt");
    std::fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

/// Re-renders every numeric literal in shortest round-trip form.
fn normalize_numbers(text: &str) -> String {
    let mut out = String::new();
    let mut num = String::new();
    let flush = |num: &mut String, out: &mut String| {
        if !num.is_empty() {
            let v: f64 = num.parse().unwrap();
            out.push_str(&format!("{v:?}"));
            num.clear();
        }
    };
    let mut prev = ' ';
    for ch in text.chars() {
        let starts = ch == '-' || ch.is_ascii_digit();
        let numeric_context = !num.is_empty() || matches!(prev, '(' | ' ');
        if (starts || (ch == '.' && !num.is_empty())) && numeric_context && !prev.is_ascii_alphabetic() {
            num.push(ch);
        } else {
            flush(&mut num, &mut out);
            out.push(ch);
        }
        prev = ch;
    }
    flush(&mut num, &mut out);
    out
}

#[test]
fn corpus_round_trips() {
    let lines = corpus();
    assert_eq!(lines.len(), 10);
    for line in &lines {
        let (k, e) = parse(line).unwrap_or_else(|err| panic!("{line}: {err}"));
        assert_eq!(serialize(&e, k), normalize_numbers(line));
    }
}

#[test]
fn corpus_evaluates() {
    let x: Vec<Vec<f64>> = (0..4).map(|i| (0..8).map(|t| 0.1 * (i + t) as f64 - 0.3).collect()).collect();
    for line in corpus() {
        let (_, e) = parse(&line).unwrap();
        let once = evaluate(&e, &x).unwrap();
        assert_eq!(once.len(), 8);
        assert_eq!(once, evaluate(&e, &x).unwrap());
    }
}

#[test]
fn affine_example_value() {
    let e = parse_body("(-7.17 add (0.537 mul x1))").unwrap();
    assert_eq!(evaluate_raw(&e, &[vec![0.0]]).unwrap(), vec![-7.17]);
}

#[test]
fn sampled_expressions_round_trip() {
    let params = ExprSamplerParams::default();
    let mut rng = stream(2024);
    for i in 0..10_000 {
        let m = 1 + i % 6;
        let e = sample_expr(m, &params, &mut rng);
        let text = serialize(&e, 1 + i % 12);
        let (k, back) = parse(&text).unwrap();
        assert_eq!(k, 1 + i % 12);
        assert_eq!(back, e, "{text}");
    }
}

fn chi_square(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

#[test]
fn binary_operators_are_uniform() {
    let params = ExprSamplerParams {
        b_min: 1,
        b_max: Some(1),
        u_min: 0,
        u_max: 0,
        affine_prob_leaf: 0.0,
        affine_prob_unary: 0.0,
        ..Default::default()
    };
    let mut rng = stream(99);
    let mut counts = [0usize; 3];
    for _ in 0..30_000 {
        match sample_expr(1, &params, &mut rng) {
            Expr::Binary(op, ..) => counts[BinaryOp::ALL.iter().position(|o| *o == op).unwrap()] += 1,
            other => panic!("{other:?}"),
        }
    }
    for c in counts {
        assert!((c as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.02, "{counts:?}");
    }
    // df = 2, p = 0.01
    assert!(chi_square(&counts) < 9.21, "{counts:?}");
}

#[test]
fn unary_operators_are_uniform() {
    let params = ExprSamplerParams {
        b_min: 1,
        b_max: Some(1),
        u_min: 1,
        u_max: 1,
        affine_prob_leaf: 0.0,
        affine_prob_unary: 0.0,
        ..Default::default()
    };
    let mut rng = stream(5);
    let mut counts = [0usize; 11];
    for _ in 0..30_000 {
        sample_expr(2, &params, &mut rng).visit(&mut |n| {
            if let Expr::Unary(op, _) = n {
                counts[UnaryOp::ALL.iter().position(|o| o == op).unwrap()] += 1;
            }
        });
    }
    assert_eq!(counts.iter().sum::<usize>(), 30_000);
    // df = 10, p = 0.01
    assert!(chi_square(&counts) < 23.21, "{counts:?}");
}

fn arb_const() -> impl Strategy<Value = f64> {
    (prop::bool::ANY, 100u32..1000, -6i32..2).prop_map(|(neg, mant, exp)| {
        let v: f64 = format!("{mant}e{exp}").parse().unwrap();
        if neg {
            -v
        } else {
            v
        }
    })
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(1usize..=6).prop_map(Expr::Var), arb_const().prop_map(Expr::Const)];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            (0..UnaryOp::ALL.len(), inner.clone()).prop_map(|(i, c)| Expr::unary(UnaryOp::ALL[i], c)),
            (0..3usize, inner.clone(), inner).prop_map(|(i, l, r)| Expr::binary(BinaryOp::ALL[i], l, r)),
        ]
    })
}

proptest! {
    #[test]
    fn parse_inverts_serialize(e in arb_expr(), k in 1usize..=12) {
        let text = serialize(&e, k);
        let (k2, back) = parse(&text).unwrap();
        prop_assert_eq!(k2, k);
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(serialize(&back, k), text);
    }

    #[test]
    fn whitespace_is_ignored(e in arb_expr()) {
        let text = serialize(&e, 1);
        let spaced = text.replace('(', "( ").replace(')', " )");
        prop_assert_eq!(parse(&spaced).unwrap().1, e);
    }

    #[test]
    fn sampling_keeps_count_invariants(seed in any::<u64>(), m in 1usize..=6) {
        let params = ExprSamplerParams { affine_prob_leaf: 0.0, affine_prob_unary: 0.0, ..Default::default() };
        let e = sample_expr(m, &params, &mut stream(seed));
        prop_assert_eq!(e.leaf_count(), e.binary_count() + 1);
        prop_assert!(e.binary_count() >= 1 && e.binary_count() <= m + 5);
        prop_assert!(e.unary_count() <= 5);
        prop_assert!(e.max_var() <= m);
    }
}
