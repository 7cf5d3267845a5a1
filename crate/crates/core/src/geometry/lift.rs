//! Horizontal lifts of curves and the transport they induce between fibres.

use nalgebra::DVector;
use rand::Rng;

use super::lift_unchecked;
use crate::error::{Error, Result};
use crate::fibrations::{Construction, FibrationSpec};
use crate::report::{CheckSet, Tolerances};
use crate::scalar::Real;
use crate::spaces::TRANSPORT_TOL;

pub const DRIFT_LIMIT: f64 = 1e-6;
const MAX_SUBSTEPS: usize = 64;

#[derive(Clone, Debug)]
pub struct LiftedCurve<T: Real> {
    pub params: Vec<T>,
    pub points: Vec<DVector<T>>,
    pub reprojections: usize,
}

impl<T: Real> LiftedCurve<T> {
    pub fn end(&self) -> &DVector<T> {
        self.points.last().expect("at least the start point")
    }
}

/// Horizontal vector at `q` projecting to `dπ_c(dc)`, for `q` over `π(c)`.
fn lifted_velocity<T: Real>(spec: &FibrationSpec<T>, c: &DVector<T>, dc: &DVector<T>, q: &DVector<T>) -> Result<DVector<T>> {
    match &spec.construction {
        Construction::Hopf(_) => {
            let w = spec.push(c, dc);
            Ok(lift_unchecked(spec, q, &w))
        }
        Construction::Quotient(m) => {
            let x = spec.horizontal_projector(c) * dc;
            let (u, _) = m.orbit_solve(c, q);
            Ok(spec.horizontal_projector(q) * m.right_mul(&x, &u))
        }
        _ => Err(Error::InvalidParameters(format!("no lift for {}", spec.label()))),
    }
}

/// Lift of the base curve `π ∘ c`, given by an upstairs curve `s ↦ (c(s), c'(s))`,
/// starting at `q0` over `π(c(s0))`. Classical fourth-order stepping with radial
/// re-projection onto the quadric whenever the drift exceeds the transport tolerance,
/// and with steps subdivided while the drift exceeds [`DRIFT_LIMIT`].
pub fn horizontal_lift_curve<T: Real, C: Fn(T) -> (DVector<T>, DVector<T>)>(
    spec: &FibrationSpec<T>,
    curve: C,
    q0: &DVector<T>,
    s0: T,
    s1: T,
    steps: usize,
) -> Result<LiftedCurve<T>> {
    let res0 = spec.same_fibre_residual(&curve(s0).0, q0);
    if res0 > T::lit(1e-8) {
        return Err(Error::NotOnFibre(res0.to_f64()));
    }
    let f = |s: T, q: &DVector<T>| -> Result<DVector<T>> {
        let (c, dc) = curve(s);
        lifted_velocity(spec, &c, &dc, q)
    };
    let h = (s1 - s0) / T::lit(steps as f64);
    let half = T::lit(0.5);
    let rk4 = |s: T, q: &DVector<T>, h: T| -> Result<DVector<T>> {
        let k1 = f(s, q)?;
        let k2 = f(s + h * half, &(q + &k1 * (h * half)))?;
        let k3 = f(s + h * half, &(q + &k2 * (h * half)))?;
        let k4 = f(s + h, &(q + &k3 * h))?;
        Ok(q + (k1 + k2 * T::lit(2.0) + k3 * T::lit(2.0) + k4) * (h / T::lit(6.0)))
    };
    let mut q = q0.clone();
    let mut params = vec![s0];
    let mut points = vec![q.clone()];
    let mut reprojections = 0;
    for i in 0..steps {
        let s = s0 + h * T::lit(i as f64);
        // a step whose drift exceeds the limit is retried as 2, 4, … substeps
        let mut sub = 1usize;
        let (next, count) = loop {
            let hs = h / T::lit(sub as f64);
            let mut qs = q.clone();
            let mut count = 0;
            let mut ok = true;
            for j in 0..sub {
                let t = s + hs * T::lit(j as f64);
                qs = rk4(t, &qs, hs)?;
                let drift = spec.total.membership_residual(&qs);
                if drift > T::lit(DRIFT_LIMIT) {
                    ok = false;
                    break;
                }
                if drift > T::lit(TRANSPORT_TOL) {
                    qs = spec.total.normalize(&qs)?;
                    count += 1;
                }
                if let Construction::Hopf(_) = &spec.construction {
                    // one Gauss-Newton step back onto the fibre over π(c(t + hs))
                    let e = spec.eval(&curve(t + hs).0) - spec.eval(&qs);
                    qs += lift_unchecked(spec, &qs, &e);
                }
            }
            if ok {
                break (qs, count);
            }
            if sub >= MAX_SUBSTEPS {
                return Err(Error::Integration(format!("drift above {DRIFT_LIMIT:e} at step {i}")));
            }
            sub *= 2;
        };
        q = next;
        reprojections += count;
        params.push(s + h);
        points.push(q.clone());
    }
    Ok(LiftedCurve {
        params,
        points,
        reprojections,
    })
}

/// Closed curve `s ↦ x(s)/‖x(s)‖` with `x(s) = p + ρ((cos s − 1) X + sin s Y)`
/// for two horizontal frame vectors, with its velocity.
fn horizontal_loop<'a, T: Real>(
    spec: &'a FibrationSpec<T>,
    p: &DVector<T>,
    rho: T,
) -> Result<impl Fn(T) -> (DVector<T>, DVector<T>) + 'a> {
    let hf = spec.horizontal_frame(p)?;
    if hf.len() < 2 {
        return Err(Error::Degenerate("horizontal space has dimension below 2".into()));
    }
    let (x, y) = (hf.vectors[0].clone() * rho, hf.vectors[1].clone() * rho);
    let p = p.clone();
    let r2 = spec.total.radius2();
    Ok(move |s: T| {
        let u = &p + &x * (s.cos() - T::one()) + &y * s.sin();
        let du = -(&x * s.sin()) + &y * s.cos();
        let m = spec.total.metric.norm2(&u);
        let k = (r2 / m).sqrt();
        let d = &du * k - &u * (k * spec.total.metric.ip(&u, &du) / m);
        (u * k, d)
    })
}

/// Transport of several fibre points around one closed base loop.
pub fn holonomy_check<T: Real, R: Rng + ?Sized>(
    spec: &FibrationSpec<T>,
    p: &DVector<T>,
    rng: &mut R,
    fibre_points: usize,
    steps: usize,
    tols: &Tolerances,
    out: &mut CheckSet,
) -> Result<()> {
    let curve = horizontal_loop(spec, p, T::lit(0.25))?;
    let two_pi = T::two_pi();
    let vf = spec.vertical_frame(p)?;
    let mut starts = vec![p.clone()];
    for _ in 1..fibre_points {
        let v = super::random_combination(rng, &vf, p.len());
        let t = T::lit(rng.random_range(-0.5..0.5));
        starts.push(spec.fibre_geodesic(p, &v, t));
    }
    let mut ends = Vec::new();
    for q0 in &starts {
        let lc = horizontal_lift_curve(spec, &curve, q0, T::zero(), two_pi, steps)?;
        let mut retrace = T::zero();
        for (s, q) in lc.params.iter().zip(&lc.points) {
            let c = curve(*s).0;
            retrace = retrace.max(spec.same_fibre_residual(&c, q) / c.norm_squared());
        }
        let c = out.entry("holonomy.retrace", tols);
        c.observe(retrace.to_f64());
        c.reprojections += lc.reprojections;
        ends.push(lc.end().clone());
    }
    let mut worst = T::zero();
    for i in 0..starts.len() {
        for j in i..starts.len() {
            let d = spec.total.ip(&ends[i], &ends[j]) - spec.total.ip(&starts[i], &starts[j]);
            worst = worst.max(d.abs() / (starts[i].norm() * starts[j].norm()));
        }
    }
    out.observe("holonomy.isometry", tols, worst.to_f64());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations::build;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_curve_fixes_the_point() {
        let f = build::<f64>("pi_H", &[1, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let p = f.sample_point(&mut rng);
        let zero = DVector::zeros(p.len());
        let lc = horizontal_lift_curve(&f, |_| (p.clone(), zero.clone()), &p, 0.0, 1.0, 10).unwrap();
        assert!((lc.end() - &p).norm() < 1e-14);
    }

    #[test]
    fn start_off_the_fibre_is_rejected() {
        let f = build::<f64>("pi1", &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let p = f.sample_point(&mut rng);
        let q = f.sample_point(&mut rng);
        let zero = DVector::zeros(p.len());
        let r = horizontal_lift_curve(&f, |_| (p.clone(), zero.clone()), &q, 0.0, 1.0, 10);
        assert!(matches!(r, Err(Error::NotOnFibre(_))));
    }

    #[test]
    fn holonomy_is_an_isometry() {
        let tols = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for (name, ps) in [("pi1", vec![]), ("pi_C", vec![1, 1]), ("pi7", vec![])] {
            let f = build::<f64>(name, &ps).unwrap();
            let p = f.sample_point(&mut rng);
            let mut out = CheckSet::new();
            holonomy_check(&f, &p, &mut rng, 3, 400, &tols, &mut out).unwrap();
            for c in out.iter() {
                assert!(c.pass, "{name} {} {}", c.id, c.max_residual);
            }
        }
    }
}
