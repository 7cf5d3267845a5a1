//! Orthonormal horizontal bases `{L_α, A_{L_α} v_1, …, A_{L_α} v_r}`.

use nalgebra::DVector;
use rand::Rng;

use super::oneill::a_direct;
use super::LocalGeometry;
use crate::algebra::AlgebraTag;
use crate::classify::admissible;
use crate::fibrations::BaseDescriptor;
use crate::error::{Error, Result};
use crate::report::{CheckSet, Tolerances};
use crate::scalar::{Real, Sign};
use crate::spaces::{indefinite_gram_schmidt, NULL_TOL};

#[derive(Clone, Debug)]
pub struct SpecialBasis<T: Real> {
    pub p: DVector<T>,
    pub vertical: Vec<DVector<T>>,
    /// `blocks[α] = [L_α, A_{L_α} v_1, …, A_{L_α} v_r]`.
    pub blocks: Vec<Vec<DVector<T>>>,
    pub signs: Vec<Vec<Sign>>,
}

impl<T: Real> SpecialBasis<T> {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn members(&self) -> Vec<DVector<T>> {
        self.blocks.iter().flatten().cloned().collect()
    }

    pub fn leaders(&self) -> Vec<DVector<T>> {
        self.blocks.iter().map(|b| b[0].clone()).collect()
    }

    /// `(k, q1, q2)`: `q1` timelike leaders, `q2` spacelike leaders.
    pub fn decomposition(&self) -> (usize, usize, usize) {
        let q1 = self.signs.iter().filter(|b| b[0].is_negative()).count();
        (self.k(), q1, self.k() - q1)
    }

    pub fn timelike_count(&self) -> usize {
        self.signs.iter().flatten().filter(|s| s.is_negative()).count()
    }
}

/// Greedy construction starting from `L_0 = X`. Each later leader is the
/// shortest vector of an orthonormal basis of the complement of the previous
/// blocks, seeded by the horizontal frame.
pub fn special_basis<T: Real>(lg: &LocalGeometry<'_, T>, x: &DVector<T>) -> Result<SpecialBasis<T>> {
    let metric = lg.metric();
    let eps = lg.g(x, x);
    if eps.abs() < T::lit(NULL_TOL) {
        return Err(Error::NullVector(eps.to_f64()));
    }
    let n = lg.n();
    let r = lg.r();
    if n % (r + 1) != 0 {
        return Err(Error::InvalidParameters(format!(
            "horizontal dimension {n} is not a multiple of r + 1 = {}",
            r + 1
        )));
    }
    let k = n / (r + 1);
    let mut blocks: Vec<Vec<DVector<T>>> = Vec::new();
    let mut signs: Vec<Vec<Sign>> = Vec::new();
    let mut lead = x / eps.abs().sqrt();
    for alpha in 0..k {
        let mut block = vec![lead.clone()];
        block.extend(lg.vertical.vectors.iter().map(|v| lg.a(&lead, v)));
        let bs: Vec<Sign> = block
            .iter()
            .map(|b| if lg.g(b, b) < T::zero() { Sign::Minus } else { Sign::Plus })
            .collect();
        blocks.push(block);
        signs.push(bs);
        if alpha + 1 == k {
            break;
        }
        let cands: Vec<DVector<T>> = lg
            .horizontal
            .vectors
            .iter()
            .map(|e| {
                let mut u = e.clone();
                for (b, s) in blocks.iter().flatten().zip(signs.iter().flatten()) {
                    let c = s.value::<T>() * lg.g(&u, b);
                    u -= b * c;
                }
                u
            })
            .collect();
        let frame = indefinite_gram_schmidt(metric, &cands).map_err(|e| {
            Error::Degenerate(format!("residual subspace after {} block(s): {e}", alpha + 1))
        })?;
        // the best conditioned direction: noise remnants normalize to huge vectors
        lead = frame
            .vectors
            .iter()
            .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(std::cmp::Ordering::Equal))
            .cloned()
            .ok_or_else(|| Error::Degenerate(format!("residual subspace after {} block(s) is empty", alpha + 1)))?;
    }
    Ok(SpecialBasis {
        p: lg.p.clone(),
        vertical: lg.vertical.vectors.clone(),
        blocks,
        signs,
    })
}

/// Fibre index forced by the type of the base: negative definite fibres over
/// complex and quaternionic hyperbolic bases and over definite quadrics,
/// `0` over `AP^m`, `1` over `BP^m`, and `(r − 1)/2` over an indefinite quadric
/// of dimension `r + 1`.
pub fn expected_fibre_index(base: &BaseDescriptor, r: usize) -> Option<usize> {
    match base {
        BaseDescriptor::QuotientBase { algebra, .. } => match algebra {
            AlgebraTag::A => Some(0),
            AlgebraTag::B => Some(1),
            _ => Some(r),
        },
        BaseDescriptor::ExplicitQuadric { dim, index, .. } => {
            if *index == 0 || index == dim {
                Some(r)
            } else if r % 2 == 1 && *dim == r + 1 && *index == (r + 1) / 2 {
                Some((r - 1) / 2)
            } else {
                None
            }
        }
    }
}

/// `max |g(a,b) − ±δ_ab| / (‖a‖ ‖b‖)` over the members.
fn relative_defect<T: Real>(lg: &LocalGeometry<'_, T>, members: &[DVector<T>]) -> T {
    let mut worst = T::zero();
    for (i, a) in members.iter().enumerate() {
        for (j, b) in members.iter().enumerate() {
            let g = lg.g(a, b);
            let target = if i == j { g.signum() } else { T::zero() };
            worst = worst.max((g - target).abs() / (a.norm() * b.norm()));
        }
    }
    worst
}

pub fn special_basis_check<T: Real, R: Rng + ?Sized>(
    lg: &LocalGeometry<'_, T>,
    rng: &mut R,
    fibre_points: usize,
    tols: &Tolerances,
    out: &mut CheckSet,
) {
    let spec = lg.spec;
    let avail: Vec<Sign> = [Sign::Plus, Sign::Minus]
        .into_iter()
        .filter(|s| lg.horizontal.signs.contains(s))
        .collect();
    let sign = avail[rng.random_range(0..avail.len())];
    let Some(x) = lg.random_unit_horizontal(rng, sign) else { return };
    let sb = match special_basis(lg, &x) {
        Ok(sb) => sb,
        Err(_) => {
            out.observe("special_basis.orthonormal", tols, f64::INFINITY);
            return;
        }
    };
    let members = sb.members();
    out.observe("special_basis.orthonormal", tols, relative_defect(lg, &members).to_f64());
    let leaders = sb.leaders();
    let mut worst = T::zero();
    for a in &leaders {
        for b in &leaders {
            worst = worst.max(lg.a(a, b).norm() / (a.norm() * b.norm()));
        }
    }
    out.observe("special_basis.a_blocks", tols, worst.to_f64());

    let (n, r) = (lg.n(), lg.r());
    let r_idx = lg.vertical.signature().index;
    let s = sb.timelike_count();
    let (k, q1, q2) = sb.decomposition();
    let sols = admissible(n, s, r, r_idx).solutions;
    let ok = members.len() == n
        && k * (r + 1) == n
        && s == spec.base_dims.1
        && s == q1 * (r_idx + 1) + q2 * (r - r_idx)
        && sols.contains(&(k, q1, q2));
    out.observe("special_basis.index", tols, if ok { 0.0 } else { 1.0 });

    let fib_ok = expected_fibre_index(&spec.base, r) == Some(r_idx) && r_idx == spec.fibre.index;
    out.observe("special_basis.fibre_signature", tols, if fib_ok { 0.0 } else { 1.0 });

    let pushed: Vec<DVector<T>> = members.iter().map(|m| spec.push(&lg.p, m)).collect();
    for j in 0..fibre_points {
        let v = lg.random_vertical(rng);
        let t = T::lit(rng.random_range(-1.0..1.0));
        let q = spec.fibre_geodesic(&lg.p, &v, t);
        let moved: Vec<DVector<T>> = match members
            .iter()
            .map(|m| spec.transport_horizontal(&lg.p, m, &q))
            .collect::<Result<Vec<_>>>()
        {
            Ok(v) => v,
            Err(_) => {
                out.observe("special_basis.basic", tols, f64::INFINITY);
                continue;
            }
        };
        let mut res = T::zero();
        for (m, w) in moved.iter().zip(&pushed) {
            res = res.max((spec.push(&q, m) - w).norm() / (T::one() + w.norm()));
        }
        out.observe("special_basis.basic", tols, res.to_f64());
        if j < 2 {
            let lq: Vec<&DVector<T>> = moved.iter().step_by(r + 1).collect();
            let mut worst = T::zero();
            for a in &lq {
                for b in &lq {
                    worst = worst.max(a_direct(spec, &q, a, b).norm() / (a.norm() * b.norm()));
                }
            }
            out.observe("special_basis.a_blocks", tols, worst.to_f64());
        }
    }
}
