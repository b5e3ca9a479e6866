use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tunefft::oracle::{naive_dft, naive_dft_reference, rel_l2_error, tolerance};
use tunefft::selftest::{random_vector, self_test, Check};
use tunefft::{DftProblem, IoDim, IoTensor, Plan, Planner, PlannerConfig, Sign};

type C64 = Complex64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

#[test]
fn naive_examples() {
    assert_eq!(naive_dft(&[c(5.0, 0.0)], Sign::Forward), vec![c(5.0, 0.0)]);
    let imp = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    assert_eq!(naive_dft(&imp, Sign::Forward), vec![c(1.0, 0.0); 4]);
    let x = [1.0, 2.0, 3.0, 4.0].map(|v| c(v, 0.0));
    let y = naive_dft(&x, Sign::Forward);
    let want = [c(10.0, 0.0), c(-2.0, 2.0), c(-2.0, 0.0), c(-2.0, -2.0)];
    for (a, b) in y.iter().zip(&want) {
        assert!((a - b).norm() < 1e-14, "{a} vs {b}");
    }
    assert!(naive_dft(&[], Sign::Forward).is_empty());
}

#[test]
fn reference_examples() {
    for n in [1, 7, 64, 100] {
        let mut x = vec![c(0.0, 0.0); n];
        x[0] = c(1.0, 0.0);
        assert_eq!(naive_dft_reference(&x, Sign::Forward), vec![c(1.0, 0.0); n]);
    }
    let x = random_vector(&mut ChaCha8Rng::seed_from_u64(1), 64);
    let e = rel_l2_error(&naive_dft(&x, Sign::Forward), &naive_dft_reference(&x, Sign::Forward));
    assert!(e <= 1e-13, "{e}");

    let x: Vec<C64> = random_vector(&mut ChaCha8Rng::seed_from_u64(2), 8).iter().map(|v| c(v.re, 0.0)).collect();
    let y = naive_dft_reference(&x, Sign::Forward);
    for k in 1..8 {
        assert!((y[k] - y[8 - k].conj()).norm() <= 1e-15, "k={k}");
    }
}

#[test]
fn normalize_examples() {
    let n4 = IoTensor::new(vec![IoDim::new(4, 1, 1)]);
    let p = DftProblem::new(n4.clone(), IoTensor::new(vec![IoDim::new(1, 5, 7)]), false, Sign::Forward);
    assert_eq!(p.normalize().unwrap().vecsz.rank(), 0);

    let p = DftProblem::new(
        IoTensor::new(vec![IoDim::new(5, 2, 2)]),
        IoTensor::new(vec![IoDim::new(2, 1, 1), IoDim::new(3, 10, 10)]),
        false,
        Sign::Forward,
    );
    assert_eq!(
        p.normalize().unwrap().vecsz,
        IoTensor::new(vec![IoDim::new(3, 10, 10), IoDim::new(2, 1, 1)])
    );

    let p = DftProblem::new(n4, IoTensor::empty(), false, Sign::Forward);
    assert_eq!(p.normalize().unwrap(), p);

    let bad = DftProblem::new(IoTensor::new(vec![IoDim::new(4, 1, 1)]), IoTensor::new(vec![IoDim::new(2, 1, 1)]), false, Sign::Forward);
    assert!(bad.normalize().is_err());
}

#[test]
fn self_test_examples() {
    assert!(self_test(|x| naive_dft(x, Sign::Forward), 16, Sign::Forward, 20, 7).passed());
    let r = self_test(
        |x| {
            let mut y = naive_dft(x, Sign::Forward);
            y[3] = -y[3];
            y
        },
        16,
        Sign::Forward,
        20,
        7,
    );
    assert!(!r.passed());
    assert!(r.failures.iter().any(|f| f.1 == Check::Impulse || f.1 == Check::Linearity));

    let mut d = vec![c(0.0, 0.0); 4];
    d[1] = c(1.0, 0.0);
    let y = naive_dft(&d, Sign::Forward);
    let want = [c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 1.0)];
    for (a, b) in y.iter().zip(&want) {
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn planned_transforms_pass_self_test() {
    let mut planner = Planner::new(PlannerConfig::default());
    for n in [16, 27, 97, 210] {
        for sign in [Sign::Forward, Sign::Backward] {
            let plan = planner.plan(&DftProblem::dft_1d(n, sign, false)).unwrap();
            let r = self_test(|x| plan.run(x, false).unwrap(), n, sign, 10, 3);
            assert!(r.passed(), "n={n} {sign:?}: {r:?}");
        }
    }
}

fn vec_strategy(max: usize) -> impl Strategy<Value = Vec<C64>> {
    (1..=max).prop_flat_map(|n| prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b)), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(x in vec_strategy(80)) {
        let n = x.len() as f64;
        let y = naive_dft(&x, Sign::Forward);
        let (lhs, rhs) = (norm2(&y), n * norm2(&x));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn planned_round_trip(x in vec_strategy(300)) {
        let n = x.len();
        let mut planner = Planner::new(PlannerConfig::default());
        let f = planner.plan(&DftProblem::dft_1d(n, Sign::Forward, false)).unwrap();
        let b = planner.plan(&DftProblem::dft_1d(n, Sign::Backward, false)).unwrap();
        let back = b.run(&f.run(&x, false).unwrap(), false).unwrap();
        let scaled: Vec<C64> = x.iter().map(|v| v * n as f64).collect();
        prop_assert!(rel_l2_error(&back, &scaled) <= 1e-12);
    }

    #[test]
    fn planned_linearity(x in vec_strategy(200), seed in 0u64..1000, a in (-2.0f64..2.0, -2.0f64..2.0), b in (-2.0f64..2.0, -2.0f64..2.0)) {
        let n = x.len();
        let y = random_vector(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let (a, b) = (c(a.0, a.1), c(b.0, b.1));
        let plan = Planner::new(PlannerConfig::default()).plan(&DftProblem::dft_1d(n, Sign::Forward, false)).unwrap();
        let f = |v: &[C64]| plan.run(v, false).unwrap();
        let mix: Vec<C64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let lhs = f(&mix);
        let rhs: Vec<C64> = f(&x).iter().zip(&f(&y)).map(|(u, v)| a * u + b * v).collect();
        let diff: f64 = lhs.iter().zip(&rhs).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
        let scale = (a.norm() * norm2(&x).sqrt() + b.norm() * norm2(&y).sqrt()) * (n as f64).sqrt();
        prop_assert!(diff <= 1e-12 * scale, "{diff} vs {scale}");
    }

    #[test]
    fn real_pair_identity(x in vec_strategy(64)) {
        // DFT(A + iB) = DFT(A) + i·DFT(B) for real A, B
        let a: Vec<C64> = x.iter().map(|v| c(v.re, 0.0)).collect();
        let b: Vec<C64> = x.iter().map(|v| c(v.im, 0.0)).collect();
        let fa = naive_dft(&a, Sign::Forward);
        let fb = naive_dft(&b, Sign::Forward);
        let want: Vec<C64> = fa.iter().zip(&fb).map(|(u, v)| u + C64::i() * v).collect();
        prop_assert!(rel_l2_error(&naive_dft(&x, Sign::Forward), &want) <= 1e-12);
    }

    #[test]
    fn normalize_idempotent_and_equivalent(
        n in 1usize..9,
        v1 in 1usize..4,
        v2 in 1usize..4,
        ones in 0usize..2,
        flip in any::<bool>(),
        seed in 0u64..1000,
    ) {
        // rows of length n laid out contiguously, v1 x v2 of them, plus an optional length-1 dim
        let mut dims = vec![IoDim::new(v2, n as isize, n as isize), IoDim::new(v1, (n * v2) as isize, (n * v2) as isize)];
        if flip {
            dims.reverse();
        }
        for _ in 0..ones {
            dims.push(IoDim::new(1, 3, 5));
        }
        let p = DftProblem::new(IoTensor::new(vec![IoDim::new(n, 1, 1)]), IoTensor::new(dims), false, Sign::Forward);
        let q = p.normalize().unwrap();
        prop_assert_eq!(q.normalize().unwrap(), q.clone());
        let total = n * v1 * v2;
        let x = random_vector(&mut ChaCha8Rng::seed_from_u64(seed), total);
        let mut planner = Planner::new(PlannerConfig::default());
        let recipe = planner.recipe(&q).unwrap();
        let a = Plan::new(recipe.clone(), &p, &Default::default()).unwrap().run(&x, false).unwrap();
        let b = Plan::new(recipe, &q, &Default::default()).unwrap().run(&x, false).unwrap();
        prop_assert_eq!(&a, &b);
        for r in 0..v1 * v2 {
            let want = naive_dft(&x[r * n..(r + 1) * n], Sign::Forward);
            prop_assert!(rel_l2_error(&a[r * n..(r + 1) * n], &want) <= tolerance(n));
        }
    }
}
