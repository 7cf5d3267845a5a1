//! Indefinite inner-product spaces and pseudo-hyperbolic quadrics `H^m_t(c)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Real, Sign};

pub const MEMBERSHIP_TOL: f64 = 1e-12;
pub const TRANSPORT_TOL: f64 = 1e-10;
pub const NULL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub struct Signature {
    pub dim: usize,
    pub index: usize,
}

impl Signature {
    pub fn new(dim: usize, index: usize) -> Result<Self> {
        if index > dim {
            return Err(Error::InvalidSpace(format!("index {index} exceeds dimension {dim}")));
        }
        Ok(Signature { dim, index })
    }

    pub fn positive(&self) -> usize {
        self.dim - self.index
    }
}

/// Diagonal metric `Σ η_i x_i y_i` with `η_i = ±1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalMetric<T: Real> {
    pub eta: DVector<T>,
}

impl<T: Real> DiagonalMetric<T> {
    pub fn from_signs(signs: &[Sign]) -> Self {
        DiagonalMetric {
            eta: DVector::from_iterator(signs.len(), signs.iter().map(|s| s.value::<T>())),
        }
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn ip(&self, x: &DVector<T>, y: &DVector<T>) -> T {
        let mut s = T::zero();
        for i in 0..self.eta.len() {
            s += self.eta[i] * x[i] * y[i];
        }
        s
    }

    pub fn norm2(&self, x: &DVector<T>) -> T {
        self.ip(x, x)
    }

    pub fn matrix(&self) -> DMatrix<T> {
        DMatrix::from_diagonal(&self.eta)
    }

    pub fn signature(&self) -> Signature {
        let index = self.eta.iter().filter(|&&e| e < T::zero()).count();
        Signature { dim: self.dim(), index }
    }

    /// `y ↦ η y`, i.e. lowering an index.
    pub fn lower(&self, y: &DVector<T>) -> DVector<T> {
        self.eta.component_mul(y)
    }
}

/// The quadric `⟨x,x⟩ = 1/c` in a diagonal indefinite space.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoHyperbolicSpace<T: Real> {
    pub m: usize,
    pub t: usize,
    pub c: T,
    pub metric: DiagonalMetric<T>,
}

impl<T: Real> PseudoHyperbolicSpace<T> {
    /// Standard layout: the first `t+1` directions are negative.
    pub fn new(m: usize, t: usize, c: T) -> Result<Self> {
        if t > m {
            return Err(Error::InvalidSpace(format!("index {t} exceeds dimension {m}")));
        }
        let signs: Vec<Sign> = (0..=m)
            .map(|i| if i <= t { Sign::Minus } else { Sign::Plus })
            .collect();
        Self::with_metric(&signs, c)
    }

    /// Arbitrary placement of the negative directions.
    pub fn with_metric(signs: &[Sign], c: T) -> Result<Self> {
        if c >= T::zero() {
            return Err(Error::InvalidSpace("curvature must be negative".into()));
        }
        if signs.len() < 2 {
            return Err(Error::InvalidSpace("ambient dimension must be at least 2".into()));
        }
        let metric = DiagonalMetric::from_signs(signs);
        let idx = metric.signature().index;
        if idx == 0 {
            return Err(Error::InvalidSpace("no negative direction: quadric is empty".into()));
        }
        Ok(PseudoHyperbolicSpace {
            m: signs.len() - 1,
            t: idx - 1,
            c,
            metric,
        })
    }

    pub fn ambient_signature(&self) -> Signature {
        Signature {
            dim: self.m + 1,
            index: self.t + 1,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.m + 1
    }

    pub fn radius2(&self) -> T {
        T::one() / self.c
    }

    pub fn id(&self) -> String {
        format!("H^{}_{}({})", self.m, self.t, self.c.to_f64())
    }

    pub fn inner(&self, x: &DVector<T>, y: &DVector<T>) -> Result<T> {
        let n = self.ambient_dim();
        if x.len() != n || y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: if x.len() != n { x.len() } else { y.len() },
            });
        }
        Ok(self.metric.ip(x, y))
    }

    pub fn ip(&self, x: &DVector<T>, y: &DVector<T>) -> T {
        self.metric.ip(x, y)
    }

    pub fn membership_residual(&self, x: &DVector<T>) -> T {
        (self.metric.norm2(x) - self.radius2()).abs()
    }

    pub fn point(&self, coords: DVector<T>) -> Result<AmbientPoint<T>> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::LengthMismatch {
                expected: self.ambient_dim(),
                got: coords.len(),
            });
        }
        let r = self.membership_residual(&coords);
        if r > T::lit(MEMBERSHIP_TOL) * (T::one() + coords.norm_squared()) {
            return Err(Error::OffQuadric {
                value: self.metric.norm2(&coords).to_f64(),
                expected: self.radius2().to_f64(),
            });
        }
        Ok(AmbientPoint {
            coords,
            space_id: self.id(),
        })
    }

    /// Radial rescaling onto the quadric; fails if `⟨x,x⟩` has the wrong sign.
    pub fn normalize(&self, x: &DVector<T>) -> Result<DVector<T>> {
        let n2 = self.metric.norm2(x);
        if n2 * self.c <= T::zero() {
            return Err(Error::OffQuadric {
                value: n2.to_f64(),
                expected: self.radius2().to_f64(),
            });
        }
        Ok(x * (self.radius2() / n2).sqrt())
    }

    /// Tangential projection `v − ⟨p,v⟩/⟨p,p⟩ p`.
    pub fn project_tangent(&self, p: &DVector<T>, v: &DVector<T>) -> DVector<T> {
        v - p * (self.ip(p, v) / self.ip(p, p))
    }

    /// Ambient matrix of the tangential projection at `p`.
    pub fn tangent_projector(&self, p: &DVector<T>) -> DMatrix<T> {
        let n = self.ambient_dim();
        let lp = self.metric.lower(p);
        DMatrix::identity(n, n) - (p * lp.transpose()) / self.ip(p, p)
    }

    pub fn tangent(&self, p: &AmbientPoint<T>, vec: DVector<T>) -> Result<TangentVector<T>> {
        let s = self.ip(&p.coords, &vec);
        if s.abs() > T::lit(TRANSPORT_TOL) * (T::one() + vec.norm() * p.coords.norm()) {
            return Err(Error::NotTangent(s.to_f64()));
        }
        Ok(TangentVector { base: p.clone(), vec })
    }

    /// Geodesic through `p` with initial velocity `v`.
    pub fn geodesic(&self, p: &DVector<T>, v: &DVector<T>, t: T) -> Result<DVector<T>> {
        let s = self.ip(p, v);
        if s.abs() > T::lit(TRANSPORT_TOL) * (T::one() + v.norm() * p.norm()) {
            return Err(Error::NotTangent(s.to_f64()));
        }
        Ok(self.geodesic_unchecked(p, v, t))
    }

    pub fn geodesic_unchecked(&self, p: &DVector<T>, v: &DVector<T>, t: T) -> DVector<T> {
        let kappa = -self.c * self.ip(v, v);
        let (cf, sf) = trig_pair(kappa, t);
        p * cf + v * sf
    }

    pub fn geodesic_point(&self, p: &AmbientPoint<T>, v: &TangentVector<T>, t: T) -> Result<AmbientPoint<T>> {
        let q = self.geodesic(&p.coords, &v.vec, t)?;
        Ok(AmbientPoint {
            coords: q,
            space_id: self.id(),
        })
    }

    /// Random point: timelike block length fixed by the spacelike draw.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, spread: f64) -> DVector<T> {
        let n = self.ambient_dim();
        let mut x = DVector::<f64>::zeros(n);
        let mut neg2 = 0.0;
        let mut pos2 = 0.0;
        for i in 0..n {
            let g: f64 = rng.sample(StandardNormal);
            if self.metric.eta[i] < T::zero() {
                x[i] = g;
                neg2 += g * g;
            } else {
                x[i] = g * spread;
                pos2 += x[i] * x[i];
            }
        }
        let target = pos2 + 1.0 / -self.c.to_f64();
        let s = (target / neg2).sqrt();
        for i in 0..n {
            if self.metric.eta[i] < T::zero() {
                x[i] *= s;
            }
        }
        DVector::from_iterator(n, x.iter().map(|&v| T::lit(v)))
    }

    pub fn sample_tangent<R: Rng + ?Sized>(&self, rng: &mut R, p: &DVector<T>) -> DVector<T> {
        let n = self.ambient_dim();
        let g = DVector::from_iterator(n, (0..n).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))));
        self.project_tangent(p, &g)
    }
}

/// `(C, S)` with `γ(t) = C p + S v` solving `γ'' = κ γ`.
pub fn trig_pair<T: Real>(kappa: T, t: T) -> (T, T) {
    let s = kappa * t * t;
    if s.abs() < T::lit(1e-6) {
        let c = T::one() + s / T::lit(2.0) + s * s / T::lit(24.0) + s * s * s / T::lit(720.0);
        let sn = t * (T::one() + s / T::lit(6.0) + s * s / T::lit(120.0) + s * s * s / T::lit(5040.0));
        (c, sn)
    } else if kappa > T::zero() {
        let r = kappa.sqrt();
        ((r * t).cosh(), (r * t).sinh() / r)
    } else {
        let r = (-kappa).sqrt();
        ((r * t).cos(), (r * t).sin() / r)
    }
}

/// Point on a quadric; serializes as `[coords, space id]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientPoint<T: Real> {
    pub coords: DVector<T>,
    pub space_id: String,
}

impl<T: Real + Serialize> Serialize for AmbientPoint<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut tup = ser.serialize_tuple(2)?;
        tup.serialize_element(&self.coords.iter().copied().collect::<Vec<T>>())?;
        tup.serialize_element(&self.space_id)?;
        tup.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector<T: Real> {
    pub base: AmbientPoint<T>,
    pub vec: DVector<T>,
}

impl<T: Real + Serialize> Serialize for TangentVector<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut tup = ser.serialize_tuple(2)?;
        tup.serialize_element(&self.base)?;
        tup.serialize_element(&self.vec.iter().copied().collect::<Vec<T>>())?;
        tup.end()
    }
}

/// Orthonormal output of [`indefinite_gram_schmidt`].
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalFrame<T: Real> {
    pub vectors: Vec<DVector<T>>,
    pub signs: Vec<Sign>,
}

impl<T: Real> OrthonormalFrame<T> {
    pub fn signature(&self) -> Signature {
        Signature {
            dim: self.vectors.len(),
            index: self.signs.iter().filter(|s| s.is_negative()).count(),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Coordinates `ε_i ⟨x, e_i⟩` of `x` in the frame.
    pub fn coefficients(&self, metric: &DiagonalMetric<T>, x: &DVector<T>) -> Vec<T> {
        self.vectors
            .iter()
            .zip(&self.signs)
            .map(|(e, s)| s.value::<T>() * metric.ip(x, e))
            .collect()
    }

    /// Orthogonal projection onto the span: `Σ ε_i ⟨x,e_i⟩ e_i`.
    pub fn project(&self, metric: &DiagonalMetric<T>, x: &DVector<T>) -> DVector<T> {
        let mut out = DVector::zeros(x.len());
        for (c, e) in self.coefficients(metric, x).into_iter().zip(&self.vectors) {
            out += e * c;
        }
        out
    }
}

/// A candidate that shrinks below this fraction of its input norm is treated as dependent.
pub const COLLAPSE_TOL: f64 = 1e-7;

/// Orthonormalization for an indefinite diagonal metric.
///
/// Pivot: the remaining candidate with the largest `|⟨u,u⟩| / ‖u₀‖²`, `u₀` the
/// input it came from. If every
/// candidate is null, a sum or difference of two candidates is tried.
/// Candidates that collapse to zero, absolutely or relative to
/// [`COLLAPSE_TOL`], are dropped as dependent. Output is ordered
/// by the index of the input each vector came from.
pub fn indefinite_gram_schmidt<T: Real>(
    metric: &DiagonalMetric<T>,
    vectors: &[DVector<T>],
) -> Result<OrthonormalFrame<T>> {
    gram_schmidt_impl(metric, vectors, usize::MAX)
}

/// As [`indefinite_gram_schmidt`] for candidates spanning a subspace of known
/// dimension: stops after `rank` pivots and fails if fewer are found.
pub fn orthonormal_basis_of_rank<T: Real>(
    metric: &DiagonalMetric<T>,
    vectors: &[DVector<T>],
    rank: usize,
) -> Result<OrthonormalFrame<T>> {
    let f = gram_schmidt_impl(metric, vectors, rank)?;
    if f.len() < rank {
        return Err(Error::Degenerate(format!("expected {rank} independent directions, found {}", f.len())));
    }
    Ok(f)
}

fn gram_schmidt_impl<T: Real>(
    metric: &DiagonalMetric<T>,
    vectors: &[DVector<T>],
    max_rank: usize,
) -> Result<OrthonormalFrame<T>> {
    let scale = vectors
        .iter()
        .map(|v| v.norm())
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    if scale == T::zero() {
        return Ok(OrthonormalFrame {
            vectors: vec![],
            signs: vec![],
        });
    }
    let null_tol = T::lit(NULL_TOL);
    let zero_tol = T::lit(1e-9) * scale;
    let collapse = T::lit(COLLAPSE_TOL);
    let orig: Vec<T> = vectors.iter().map(|v| v.norm()).collect();
    let mut rest: Vec<(usize, DVector<T>)> = vectors.iter().cloned().enumerate().collect();
    let mut out: Vec<(usize, DVector<T>, Sign)> = Vec::new();

    loop {
        rest.retain(|(o, u)| u.norm() > zero_tol && u.norm() > collapse * orig[*o]);
        if rest.is_empty() || out.len() >= max_rank {
            break;
        }
        let ratio = |u: &DVector<T>| metric.norm2(u).abs() / u.norm_squared();
        // weighting by the input norm keeps strongly cancelled remnants from being chosen
        let weighted = |o: usize, u: &DVector<T>| metric.norm2(u).abs() / (orig[o] * orig[o]);
        let (best, best_ratio) = rest
            .iter()
            .enumerate()
            .map(|(k, (o, u))| (k, weighted(*o, u)))
            .fold((0, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
        let (origin, pivot) = if best_ratio > null_tol {
            let (o, u) = rest.remove(best);
            (o, u)
        } else {
            let mut cand: Option<(usize, usize, DVector<T>, T)> = None;
            for a in 0..rest.len() {
                for b in (a + 1)..rest.len() {
                    for sgn in [T::one(), -T::one()] {
                        let w = &rest[a].1 + &rest[b].1 * sgn;
                        if w.norm() <= zero_tol {
                            continue;
                        }
                        let rw = ratio(&w);
                        if cand.as_ref().map_or(true, |c| rw > c.3) {
                            cand = Some((a, b, w, rw));
                        }
                    }
                }
            }
            match cand {
                Some((a, b, w, rw)) if rw > null_tol => {
                    let origin = rest[a].0.min(rest[b].0);
                    (origin, w)
                }
                _ => {
                    return Err(Error::Degenerate(format!(
                        "{} remaining direction(s) span a null subspace",
                        rest.len()
                    )))
                }
            }
        };
        let n2 = metric.norm2(&pivot);
        let e = &pivot / n2.abs().sqrt();
        let sign = if n2 < T::zero() { Sign::Minus } else { Sign::Plus };
        let eps = sign.value::<T>();
        for (_, u) in rest.iter_mut() {
            let c = metric.ip(u, &e) * eps;
            *u -= &e * c;
        }
        out.push((origin, e, sign));
    }
    out.sort_by_key(|(o, _, _)| *o);
    Ok(OrthonormalFrame {
        vectors: out.iter().map(|(_, v, _)| v.clone()).collect(),
        signs: out.iter().map(|(_, _, s)| *s).collect(),
    })
}

/// Maximum deviation of the frame Gram matrix from `diag(±1)`.
pub fn orthonormality_defect<T: Real>(metric: &DiagonalMetric<T>, frame: &[DVector<T>]) -> T {
    let mut worst = T::zero();
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate() {
            let g = metric.ip(a, b);
            let d = if i == j { (g.abs() - T::one()).abs() } else { g.abs() };
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}
