use hopf_submersions::spaces::{indefinite_gram_schmidt, PseudoHyperbolicSpace};
use hopf_submersions::Space;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space(m: usize, t: usize) -> Space {
    PseudoHyperbolicSpace::new(m, t, -1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn geodesics_stay_on_the_quadric(m in 1usize..8, t_frac in 0.0f64..1.0, seed in any::<u64>(), s in -2.0f64..2.0) {
        let t = ((m as f64) * t_frac) as usize;
        let h = space(m, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = h.sample_point(&mut rng, 0.5);
        let v = h.sample_tangent(&mut rng, &p);
        let q = h.geodesic(&p, &v, s).unwrap();
        let scale = q.norm_squared().max(1.0);
        prop_assert!(h.membership_residual(&q) / scale < 1e-10);
        // speed is conserved along the geodesic
        let dq = (h.geodesic(&p, &v, s + 1e-6).unwrap() - h.geodesic(&p, &v, s - 1e-6).unwrap()) / 2e-6;
        let speed = h.ip(&v, &v);
        prop_assert!((h.ip(&dq, &dq) - speed).abs() <= 1e-5 * v.norm_squared().max(1.0) * scale);
    }

    #[test]
    fn gram_schmidt_produces_an_orthonormal_frame(m in 1usize..7, t_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let t = ((m as f64) * t_frac) as usize;
        let h = space(m, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = h.sample_point(&mut rng, 0.5);
        let vs: Vec<DVector<f64>> = (0..m).map(|_| h.sample_tangent(&mut rng, &p)).collect();
        let f = indefinite_gram_schmidt(&h.metric, &vs).unwrap();
        prop_assert_eq!(f.len(), m);
        prop_assert_eq!(f.signature().index, t);
        for i in 0..m {
            for j in 0..m {
                let want = if i == j { f.signs[i].value::<f64>() } else { 0.0 };
                let got = h.ip(&f.vectors[i], &f.vectors[j]);
                prop_assert!((got - want).abs() <= 1e-8 * f.vectors[i].norm() * f.vectors[j].norm());
            }
        }
    }
}

#[test]
fn radius_and_layout() {
    let h = space(3, 1);
    assert_eq!(h.ambient_dim(), 4);
    assert_eq!(h.radius2(), -1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = h.sample_point(&mut rng, 0.5);
    assert!(h.membership_residual(&p) < 1e-12 * p.norm_squared());
}

#[test]
fn invalid_index_is_rejected() {
    assert!(PseudoHyperbolicSpace::<f64>::new(3, 4, -1.0).is_err());
}

#[test]
fn dependent_vectors_are_dropped() {
    let h = space(3, 1);
    let a = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
    let b = DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]);
    let f = indefinite_gram_schmidt(&h.metric, &[a.clone(), b.clone(), &a * 2.0 - &b]).unwrap();
    assert_eq!(f.len(), 2);
}
