use gpi_core::algebra::BlockShape;
use gpi_core::model::{GenericModel, RelFreeBackend};
use gpi_core::relfree::GradingMode;
use gpi_core::{GroupSpec, NcPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_poly(rng: &mut ChaCha8Rng) -> NcPolynomial {
    let mut text = String::new();
    for t in 0..rng.gen_range(1..=2) {
        let c: i64 = rng.gen_range(1..=3);
        text.push_str(if t > 0 && rng.gen_bool(0.5) { " - " } else if t > 0 { " + " } else { "" });
        text.push_str(&c.to_string());
        for _ in 0..rng.gen_range(1..=2) {
            // ids 1, 2 odd; 3, 4 even
            let id = rng.gen_range(1..=4);
            text.push_str(&format!("*{}{id}", if id <= 2 { 'z' } else { 'y' }));
        }
    }
    NcPolynomial::parse(&text).unwrap()
}

#[test]
fn model_eval_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (shape, mode) in [(vec![1, 1], GradingMode::Infty), (vec![2], GradingMode::Natural), (vec![1, 1], GradingMode::KStar(1))] {
        let m = GenericModel::new(BlockShape::new(shape).unwrap(), RelFreeBackend::new(mode, GroupSpec::z2()).unwrap());
        for _ in 0..40 {
            let f = random_poly(&mut rng);
            let g = random_poly(&mut rng);
            let lhs = m.model_eval(&f.mul(&g).unwrap()).unwrap();
            let rhs = m.mul(&m.model_eval(&f).unwrap(), &m.model_eval(&g).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "{mode}: ({f})({g})");
        }
    }
}

#[test]
fn shift_is_an_automorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [2, 3] {
        let m = GenericModel::new(BlockShape::single(n), RelFreeBackend::new(GradingMode::Natural, GroupSpec::z2()).unwrap());
        for _ in 0..20 {
            let a = m.model_eval(&random_poly(&mut rng)).unwrap();
            let b = m.model_eval(&random_poly(&mut rng)).unwrap();
            let phi_ab = m.shift_automorphism(&m.mul(&a, &b).unwrap()).unwrap();
            let ab = m.mul(&m.shift_automorphism(&a).unwrap(), &m.shift_automorphism(&b).unwrap()).unwrap();
            assert_eq!(phi_ab, ab);
        }
    }
}
