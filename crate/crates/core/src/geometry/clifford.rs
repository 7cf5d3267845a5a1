//! The structures `J_s X = A_X v_s` on `ℋ_p` and the Clifford curvature formula.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::oneill::{base_curvature_from_a, clifford_r4};
use super::{relative, LocalGeometry};
use crate::linalg::max_abs;
use crate::report::{CheckSet, Tolerances};
use crate::scalar::Real;

pub struct CliffordStructure<T: Real> {
    /// Ambient matrices of `J_s` composed with the horizontal projector.
    pub structures: Vec<DMatrix<T>>,
    /// `ε_s = c g(v_s, v_s)`.
    pub epsilons: Vec<T>,
}

impl<T: Real> CliffordStructure<T> {
    pub fn at(lg: &LocalGeometry<'_, T>) -> Self {
        let n = lg.p.len();
        let c = lg.spec.total.c;
        let mut structures = Vec::new();
        let mut epsilons = Vec::new();
        for v in &lg.vertical.vectors {
            let mut j = DMatrix::zeros(n, n);
            for k in 0..n {
                let mut e = DVector::zeros(n);
                e[k] = T::one();
                let he = &lg.h * e;
                j.set_column(k, &lg.a(&he, v));
            }
            structures.push(j);
            epsilons.push(c * lg.g(v, v));
        }
        CliffordStructure { structures, epsilons }
    }

    /// Coefficient matrix of `J_s` in the horizontal frame.
    pub fn frame_matrix(&self, lg: &LocalGeometry<'_, T>, s: usize) -> DMatrix<T> {
        let k = lg.n();
        let mut m = DMatrix::zeros(k, k);
        for j in 0..k {
            let img = &self.structures[s] * &lg.horizontal.vectors[j];
            for i in 0..k {
                m[(i, j)] = lg.horizontal.signs[i].value::<T>() * lg.g(&lg.horizontal.vectors[i], &img);
            }
        }
        m
    }

    /// `max_{s,t} ‖J_s J_t + J_t J_s + 2 ε_s δ_st I‖` in frame coordinates.
    pub fn anticommutation_residual(&self, lg: &LocalGeometry<'_, T>) -> f64 {
        let k = lg.n();
        let ms: Vec<DMatrix<T>> = (0..self.structures.len()).map(|s| self.frame_matrix(lg, s)).collect();
        let mut worst = 0.0f64;
        for s in 0..ms.len() {
            for t in s..ms.len() {
                let mut a = &ms[s] * &ms[t] + &ms[t] * &ms[s];
                if s == t {
                    a += DMatrix::<T>::identity(k, k) * (T::lit(2.0) * self.epsilons[s]);
                }
                worst = worst.max(max_abs(&a).to_f64());
            }
        }
        worst
    }

    /// Counts of `(ε = +1, ε = −1)`.
    pub fn sign_counts(&self) -> (usize, usize) {
        let pos = self.epsilons.iter().filter(|e| **e > T::zero()).count();
        (pos, self.epsilons.len() - pos)
    }
}

pub fn clifford_structure_check<T: Real, R: Rng + ?Sized>(
    lg: &LocalGeometry<'_, T>,
    rng: &mut R,
    frames: usize,
    tols: &Tolerances,
    out: &mut CheckSet,
) {
    let cs = CliffordStructure::at(lg);
    out.observe("clifford.anticommutation", tols, cs.anticommutation_residual(lg));
    // ε_s = c g(v_s,v_s) = −g(v_s,v_s): one +1 per timelike fibre direction
    let expected = (lg.spec.fibre.index, lg.spec.fibre.dim - lg.spec.fibre.index);
    out.observe("clifford.signs", tols, if cs.sign_counts() == expected { 0.0 } else { 1.0 });
    let js: Vec<(DMatrix<T>, T)> = cs
        .structures
        .iter()
        .cloned()
        .zip(cs.epsilons.iter().copied())
        .collect();
    for _ in 0..frames {
        let x = lg.random_horizontal(rng);
        let y = lg.random_horizontal(rng);
        let z = lg.random_horizontal(rng);
        let w = lg.random_horizontal(rng);
        for (j, _) in &js {
            let skew = lg.g(&(j * &x), &y) + lg.g(&x, &(j * &y));
            out.observe("clifford.skew", tols, relative(skew, &[&x, &y]));
        }
        let formula = clifford_r4(lg.metric(), -T::one(), T::lit(-4.0), &js, &x, &y, &z, &w);
        let from_a = base_curvature_from_a(lg, &x, &y, &z, &w);
        out.observe("clifford.curvature", tols, relative(formula - from_a, &[&x, &y, &z, &w]));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations::build;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quaternionic_and_para_quaternionic_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = build::<f64>("pi_H", &[2, 1]).unwrap();
        let p = f.sample_point(&mut rng);
        let lg = LocalGeometry::new(&f, &p).unwrap();
        let cs = CliffordStructure::at(&lg);
        assert_eq!(cs.sign_counts(), (3, 0));
        assert!(cs.anticommutation_residual(&lg) < 1e-6);

        let f = build::<f64>("pi_B", &[2]).unwrap();
        let p = f.sample_point(&mut rng);
        let lg = LocalGeometry::new(&f, &p).unwrap();
        let cs = CliffordStructure::at(&lg);
        assert_eq!(cs.sign_counts(), (1, 2));
        let tols = Tolerances::default();
        let mut out = CheckSet::new();
        clifford_structure_check(&lg, &mut rng, 5, &tols, &mut out);
        for c in out.iter() {
            assert!(c.pass, "{} {}", c.id, c.max_residual);
        }
    }
}
