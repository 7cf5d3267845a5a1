//! Jacobi operators of the base, lifted to `X^⊥ ∩ ℋ_p`, and the two-eigenvalue
//! structure they share on the catalogued bases.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{random_unit, LocalGeometry};
use crate::error::{Error, Result};
use crate::linalg::{columns, least_squares};
use crate::report::{CheckSet, Tolerances};
use crate::scalar::{Real, Sign};
use crate::spaces::{orthonormal_basis_of_rank, OrthonormalFrame, NULL_TOL};

pub struct JacobiOperator<T: Real> {
    pub x: DVector<T>,
    pub epsilon: T,
    pub frame: OrthonormalFrame<T>,
    /// Coefficient matrix `M_ij = ε_i g(e_i, R'_X e_j)`.
    pub matrix: DMatrix<T>,
}

/// `R'_X Z = R(Z,X)X − 3 A_X A_X Z` on `X^⊥ ∩ ℋ_p`.
pub fn apply_jacobi<T: Real>(lg: &LocalGeometry<'_, T>, x: &DVector<T>, z: &DVector<T>) -> DVector<T> {
    let c = lg.spec.total.c;
    let rzx = (z * lg.g(x, x) - x * lg.g(z, x)) * c;
    rzx - lg.a(x, &lg.a(x, z)) * T::lit(3.0)
}

pub fn jacobi_operator<T: Real>(lg: &LocalGeometry<'_, T>, x: &DVector<T>) -> Result<JacobiOperator<T>> {
    let eps = lg.g(x, x);
    if eps.abs() < T::lit(NULL_TOL) {
        return Err(Error::NullVector(eps.to_f64()));
    }
    let perp: Vec<DVector<T>> = lg
        .horizontal
        .vectors
        .iter()
        .map(|e| e - x * (lg.g(e, x) / eps))
        .collect();
    let frame = orthonormal_basis_of_rank(lg.metric(), &perp, lg.n() - 1)?;
    let k = frame.len();
    let images: Vec<DVector<T>> = frame.vectors.iter().map(|e| apply_jacobi(lg, x, e)).collect();
    let mut matrix = DMatrix::zeros(k, k);
    for i in 0..k {
        let si = frame.signs[i].value::<T>();
        for j in 0..k {
            matrix[(i, j)] = si * lg.g(&frame.vectors[i], &images[j]);
        }
    }
    Ok(JacobiOperator {
        x: x.clone(),
        epsilon: eps,
        frame,
        matrix,
    })
}

/// Eigenvalues grouped where consecutive sorted values differ by less than `gap`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub mean: f64,
    pub spread: f64,
    pub multiplicity: usize,
}

impl<T: Real> JacobiOperator<T> {
    /// `(real parts sorted, largest |imaginary part|)`.
    pub fn eigenvalues(&self) -> (Vec<f64>, f64) {
        let m = DMatrix::from_iterator(
            self.matrix.nrows(),
            self.matrix.ncols(),
            self.matrix.iter().map(|v| v.to_f64()),
        );
        let Some(ev) = bounded_eigenvalues(&m) else {
            return (vec![f64::NAN; m.nrows()], f64::NAN);
        };
        let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
        let im = ev.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
        re.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        (re, im)
    }

    pub fn clusters(&self, gap: f64) -> Vec<Cluster> {
        let (re, _) = self.eigenvalues();
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for v in re {
            match groups.last_mut() {
                Some(g) if (v - g[g.len() - 1]).abs() < gap => g.push(v),
                _ => groups.push(vec![v]),
            }
        }
        groups
            .into_iter()
            .map(|g| {
                let mean = g.iter().sum::<f64>() / g.len() as f64;
                let spread = g.iter().fold(0.0f64, |a, v| a.max((v - mean).abs()));
                Cluster {
                    mean,
                    spread,
                    multiplicity: g.len(),
                }
            })
            .collect()
    }

    /// `max |g(R e_i, e_j) − g(e_i, R e_j)| / (‖e_i‖‖e_j‖‖X‖²)`.
    pub fn self_adjoint_residual(&self) -> f64 {
        let k = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let gij = self.frame.signs[i].value::<T>() * self.matrix[(i, j)];
                let gji = self.frame.signs[j].value::<T>() * self.matrix[(j, i)];
                let w = self.frame.vectors[i].norm() * self.frame.vectors[j].norm() * self.x.norm_squared();
                worst = worst.max(((gij - gji) / w).to_f64().abs());
            }
        }
        worst
    }

    /// `max_i ‖Π (R'_X − λ_k) e_i‖ / (‖e_i‖ ‖X‖^{2k})` over the frame, zero exactly
    /// when `R'_X` is diagonalizable with eigenvalues in `λ`.
    pub fn annihilator_residual(&self, lg: &LocalGeometry<'_, T>, lambdas: &[T]) -> f64 {
        let x2 = self.x.norm_squared();
        let mut worst = 0.0f64;
        for e in &self.frame.vectors {
            let mut w = e.clone();
            let mut scale = e.norm();
            for &l in lambdas {
                w = apply_jacobi(lg, &self.x, &w) - &w * l;
                scale *= x2;
            }
            worst = worst.max((w.norm() / scale).to_f64());
        }
        worst
    }
}

/// Eigenvalues through a Schur form with a bounded number of QR sweeps,
/// loosening the deflation threshold when the iteration stalls. The
/// matrix is centred and scaled first; a matrix within `1e-10` of a multiple of
/// the identity has all eigenvalues within that distance of the multiple.
fn bounded_eigenvalues(m: &DMatrix<f64>) -> Option<Vec<nalgebra::Complex<f64>>> {
    let k = m.nrows();
    let mu = m.trace() / k as f64;
    let centred = m - DMatrix::<f64>::identity(k, k) * mu;
    let scale = centred.norm();
    if scale < 1e-10 {
        return Some(vec![nalgebra::Complex::new(mu, 0.0); k]);
    }
    for eps in [1e-13, 1e-12, 1e-11, 1e-10] {
        for attempt in 0..4 {
            let d: Vec<f64> = (0..k).map(|i| 1.0 + 0.1 * attempt as f64 * ((i * 7 + 3) % 5) as f64).collect();
            let t = DMatrix::from_fn(k, k, |i, j| centred[(i, j)] * d[i] / d[j] / scale);
            if let Some(schur) = t.try_schur(eps, 200 * k.max(10)) {
                return Some(schur.complex_eigenvalues().iter().map(|z| z * scale + mu).collect());
            }
        }
    }
    None
}

/// Records the eigenvalue structure of `R'_X` at one unit `X`.
pub fn record_spectrum<T: Real>(lg: &LocalGeometry<'_, T>, jac: &JacobiOperator<T>, tols: &Tolerances, out: &mut CheckSet) {
    let n = lg.n();
    let r = lg.r();
    let eps = jac.epsilon.to_f64();
    let lambda = -4.0 * eps;
    let mu = -eps;
    let clusters = jac.clusters(1e-3);
    let (_, imag) = jac.eigenvalues();
    out.observe("jacobi.self_adjoint", tols, jac.self_adjoint_residual().max(imag));
    let (expected_clusters, expected_mult): (usize, Vec<(f64, usize)>) = if n == r + 1 {
        (1, vec![(lambda, r)])
    } else {
        (2, vec![(lambda, r), (mu, n - 1 - r)])
    };
    out.observe(
        "jacobi.clusters",
        tols,
        (clusters.len() as f64 - expected_clusters as f64).abs(),
    );
    let mut ev_res = 0.0f64;
    let mut mult_ok = clusters.len() == expected_clusters;
    for (val, mult) in &expected_mult {
        match clusters.iter().min_by(|a, b| {
            (a.mean - val)
                .abs()
                .partial_cmp(&(b.mean - val).abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        }) {
            Some(cl) => {
                ev_res = ev_res.max((cl.mean - val).abs() + cl.spread);
                mult_ok &= cl.multiplicity == *mult;
            }
            None => {
                ev_res = f64::INFINITY;
                mult_ok = false;
            }
        }
    }
    out.observe("jacobi.eigenvalues", tols, ev_res);
    out.observe("jacobi.multiplicities", tols, if mult_ok { 0.0 } else { 1.0 });
    if expected_clusters == 2 && clusters.len() == 2 {
        let (big, small) = if clusters[0].mean.abs() > clusters[1].mean.abs() {
            (&clusters[0], &clusters[1])
        } else {
            (&clusters[1], &clusters[0])
        };
        out.observe("jacobi.ratio", tols, (big.mean / small.mean - 4.0).abs());
    }
    let lambdas: Vec<T> = expected_mult.iter().map(|(v, _)| T::lit(*v)).collect();
    let scale = 4.0f64.powi(lambdas.len() as i32);
    out.observe("jacobi.diagonalizable", tols, jac.annihilator_residual(lg, &lambdas) / scale);
}

/// Eigenstructure at unit `X` of both causal types, and the eigenspace
/// reciprocity conditions when the base is not of constant curvature.
pub fn special_osserman_check<T: Real, R: Rng + ?Sized>(
    lg: &LocalGeometry<'_, T>,
    rng: &mut R,
    tols: &Tolerances,
    out: &mut CheckSet,
) -> Result<()> {
    for sign in [Sign::Plus, Sign::Minus] {
        let Some(x) = lg.random_unit_horizontal(rng, sign) else { continue };
        let jac = jacobi_operator(lg, &x)?;
        record_spectrum(lg, &jac, tols, out);
        if lg.n() == lg.r() + 1 {
            continue;
        }
        let dim = lg.p.len();
        // E_λ(X) is spanned by A_X v_i
        let lam_vecs: Vec<DVector<T>> = lg.vertical.vectors.iter().map(|v| lg.a(&x, v)).collect();
        let lam = orthonormal_basis_of_rank(lg.metric(), &lam_vecs, lg.r())?;
        for s in [Sign::Plus, Sign::Minus] {
            let Some(y) = random_unit(rng, &lam, lg.metric(), s) else { continue };
            let mut cols = vec![y.clone()];
            cols.extend(lg.vertical.vectors.iter().map(|v| lg.a(&y, v)));
            let (_, res) = least_squares(&columns(&cols, dim), &x);
            out.observe("osserman.lambda", tols, (res / x.norm()).to_f64());
        }
        // E_μ(X): the complement of X and A_X 𝒱 in ℋ
        let mut span = vec![x.clone()];
        span.extend(lam.vectors.iter().cloned());
        let sf = orthonormal_basis_of_rank(lg.metric(), &span, lg.r() + 1)?;
        let rest: Vec<DVector<T>> = lg.horizontal.vectors.iter().map(|e| e - sf.project(lg.metric(), e)).collect();
        let mu = orthonormal_basis_of_rank(lg.metric(), &rest, lg.n() - 1 - lg.r())?;
        for s in [Sign::Plus, Sign::Minus] {
            let Some(y) = random_unit(rng, &mu, lg.metric(), s) else { continue };
            out.observe("osserman.mu_kernel", tols, (lg.a(&x, &y).norm() / (x.norm() * y.norm())).to_f64());
            let ey = lg.g(&y, &y);
            let res = apply_jacobi(lg, &y, &x) + &x * ey;
            out.observe("osserman.mu_reciprocity", tols, (res.norm() / (x.norm() * y.norm_squared())).to_f64());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations::build;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complex_hyperbolic_plane_spectrum() {
        let f = build::<f64>("pi_C", &[2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = f.sample_point(&mut rng);
        let lg = LocalGeometry::new(&f, &p).unwrap();
        let x = lg.random_unit_horizontal(&mut rng, Sign::Plus).unwrap();
        let jac = jacobi_operator(&lg, &x).unwrap();
        let cl = jac.clusters(1e-3);
        assert_eq!(cl.len(), 2);
        assert!((cl[0].mean + 4.0).abs() < 1e-6 && cl[0].multiplicity == 1);
        assert!((cl[1].mean + 1.0).abs() < 1e-6 && cl[1].multiplicity == 2);
        let xt = lg.random_unit_horizontal(&mut rng, Sign::Minus).unwrap();
        let cl = jacobi_operator(&lg, &xt).unwrap().clusters(1e-3);
        assert!((cl[0].mean - 1.0).abs() < 1e-6 && (cl[1].mean - 4.0).abs() < 1e-6);
    }

    #[test]
    fn constant_curvature_base_single_cluster() {
        let f = build::<f64>("pi6", &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = f.sample_point(&mut rng);
        let lg = LocalGeometry::new(&f, &p).unwrap();
        assert!(lg.random_unit_horizontal(&mut rng, Sign::Minus).is_none());
        let x = lg.random_unit_horizontal(&mut rng, Sign::Plus).unwrap();
        let jac = jacobi_operator(&lg, &x).unwrap();
        let cl = jac.clusters(1e-3);
        assert_eq!(cl.len(), 1, "{:?}", jac.eigenvalues());
        assert_eq!(cl[0].multiplicity, 7);
        assert!((cl[0].mean + 4.0).abs() < 1e-6);
    }

    #[test]
    fn null_direction_rejected() {
        let f = build::<f64>("pi_C", &[2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = f.sample_point(&mut rng);
        let lg = LocalGeometry::new(&f, &p).unwrap();
        let i = lg.horizontal.signs.iter().position(|s| s.is_negative()).unwrap();
        let j = lg.horizontal.signs.iter().position(|s| !s.is_negative()).unwrap();
        let null = &lg.horizontal.vectors[i] + &lg.horizontal.vectors[j];
        assert!(matches!(jacobi_operator(&lg, &null), Err(Error::NullVector(_))));
    }

    #[test]
    fn osserman_on_para_quaternionic_plane() {
        let f = build::<f64>("pi_B", &[2]).unwrap();
        let tols = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let p = f.sample_point(&mut rng);
        let lg = LocalGeometry::new(&f, &p).unwrap();
        let mut out = CheckSet::new();
        special_osserman_check(&lg, &mut rng, &tols, &mut out).unwrap();
        for c in out.iter() {
            assert!(c.pass, "{} {}", c.id, c.max_residual);
        }
        assert!(out.get("osserman.lambda").unwrap().samples > 0);
    }
}
