//! Batch verification: samples points on each selected submersion, runs every
//! applicable identity and collects the worst residuals into one report per
//! fibration.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::algebra::{AlgebraElement, AlgebraTag};
use crate::error::{Error, Result};
use crate::fibrations::{compose, hopf::pi9_polynomial, resolve, Construction, FibrationSpec};
use crate::geometry::{
    clifford_structure_check, holonomy_check, nested_checks, oneill_residuals, special_basis_check,
    special_osserman_check, LocalGeometry, FD_STEP,
};
use crate::report::{CheckSet, FibreCoverage, Tolerances, VerificationReport, CURVATURE_CONVENTION};
use crate::scalar::Real;

pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_SEED: u64 = 20240917;
/// O'Neill frames per fibration, spread over the geometry points.
pub const ONEILL_FRAMES: usize = 1000;
pub const NONCOMPACT_FIBRE_RANGE: f64 = 3.0;
const MAX_GEOMETRY_POINTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Markdown => "md",
        }
    }

    pub fn render(self, r: &VerificationReport) -> String {
        match self {
            Format::Json => r.to_json(),
            Format::Markdown => r.to_markdown(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Fibration ids as accepted by [`resolve`], or `all`.
    pub fibrations: Vec<String>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub format: Format,
    pub expensive: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fibrations: vec!["all".into()],
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            tolerances: Tolerances::default(),
            format: Format::Json,
            expensive: false,
        }
    }
}

/// FNV-1a, used to give every fibration its own ChaCha stream.
fn stream_id(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

pub fn rng_for(seed: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(label));
    rng
}

/// File name of the report of `label`: `pi_C[2,1]` becomes `pi_C_2_1`.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .filter_map(|c| match c {
            '[' | ',' => Some('_'),
            ']' | ' ' => None,
            c => Some(c),
        })
        .collect()
}

/// Resolves every requested id, dropping repeats but keeping the first-seen order.
pub fn select<T: Real>(ids: &[String]) -> Result<Vec<FibrationSpec<T>>> {
    let mut out: Vec<FibrationSpec<T>> = Vec::new();
    for id in ids {
        for f in resolve::<T>(id)? {
            if !out.iter().any(|g| g.label() == f.label()) {
                out.push(f);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::UnknownFibration(ids.join(",")));
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig) -> Result<Vec<VerificationReport>> {
    if cfg.samples == 0 {
        return Err(Error::InvalidParameters("at least one sample is required".into()));
    }
    let specs = select::<f64>(&cfg.fibrations)?;
    specs.par_iter().map(|f| verify_fibration(f, cfg)).collect()
}

fn algebra_of<T: Real>(spec: &FibrationSpec<T>) -> AlgebraTag {
    match &spec.construction {
        Construction::Hopf(h) => h.algebra,
        Construction::Quotient(q) => q.algebra,
        Construction::Composite(c) | Construction::Composed { outer: c, .. } => c.full.algebra,
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, tag: AlgebraTag) -> AlgebraElement<f64> {
    let coeffs = (0..tag.dim()).map(|_| rng.sample(StandardNormal)).collect();
    AlgebraElement::new(tag, coeffs).expect("dimension matches")
}

fn algebra_audit<R: Rng + ?Sized>(tag: AlgebraTag, rng: &mut R, tols: &Tolerances, out: &mut CheckSet) {
    let x = gaussian(rng, tag);
    let y = gaussian(rng, tag);
    let xy = x.mul(&y).expect("same algebra");
    let scale = x.coeffs.iter().map(|c| c * c).sum::<f64>() * y.coeffs.iter().map(|c| c * c).sum::<f64>();
    out.observe(
        "algebra.composition",
        tols,
        (xy.norm_form() - x.norm_form() * y.norm_form()).abs() / scale,
    );
    let rec = x.mul_recursive(&y).expect("same algebra");
    let diff = xy.coeffs.iter().zip(&rec.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.observe("algebra.table", tols, diff / scale.sqrt());
}

/// Checks that need nothing beyond the map and its differential.
/// Half-width of the fibre geodesic parameter interval: a full period on
/// compact fibres.
pub fn fibre_parameter_range<T: Real>(spec: &FibrationSpec<T>) -> f64 {
    if spec.fibre.index < spec.fibre.dim {
        NONCOMPACT_FIBRE_RANGE
    } else {
        std::f64::consts::PI
    }
}

/// Pointwise checks at `p`; returns the fibre geodesic parameter used, if any.
fn pointwise<T: Real, R: Rng + ?Sized>(
    spec: &FibrationSpec<T>,
    p: &DVector<T>,
    rng: &mut R,
    tols: &Tolerances,
    out: &mut CheckSet,
) -> Result<Option<f64>> {
    let norm2 = p.norm_squared();
    out.observe("membership.total", tols, (spec.total.membership_residual(p) / norm2).to_f64());
    if let Some(r) = spec.target_residual(p) {
        out.observe("membership.target", tols, (r / (norm2 * norm2)).to_f64());
    }
    if spec.id == "pi9" {
        let d = pi9_polynomial(p) - spec.eval(p);
        out.observe("pi9.polynomial", tols, (d.amax() / norm2).to_f64());
    }
    let rank = spec.rank(p);
    out.observe("submersion.rank", tols, rank.abs_diff(spec.n()) as f64);
    let vf = spec.vertical_frame(p)?;
    out.observe(
        "vertical.signature",
        tols,
        vf.signature().index.abs_diff(spec.fibre.index) as f64,
    );
    if let Some(target) = &spec.target {
        let h = spec.horizontal_projector(p);
        let x = &h * spec.total.sample_tangent(rng, p);
        let y = &h * spec.total.sample_tangent(rng, p);
        let lhs = target.ip(&spec.push(p, &x), &spec.push(p, &y));
        let rhs = spec.total.ip(&x, &y);
        out.observe(
            "submersion.isometry",
            tols,
            ((lhs - rhs).abs() / (x.norm() * y.norm())).to_f64(),
        );
    }
    if spec.total_is_quadric() {
        let v = crate::geometry::random_combination(rng, &vf, p.len());
        let range = fibre_parameter_range(spec);
        let t = rng.random_range(-range..range);
        let q = spec.fibre_geodesic(p, &v, T::lit(t));
        let scale = norm2.max(q.norm_squared());
        out.observe("fibre.geodesic", tols, (spec.same_fibre_residual(p, &q) / scale).to_f64());
        return Ok(Some(t));
    }
    Ok(None)
}

/// Composite-only checks: the fibre of the two-step composition and the
/// orbits of the unit group of the full algebra.
fn composite_checks<T: Real, R: Rng + ?Sized>(
    spec: &FibrationSpec<T>,
    p: &DVector<T>,
    rng: &mut R,
    tols: &Tolerances,
    out: &mut CheckSet,
) -> Result<()> {
    let Construction::Composite(c) = &spec.construction else {
        return Ok(());
    };
    let inner = c.inner_spec::<T>()?;
    let g = compose(spec, &inner)?;
    let vf = g.vertical_frame(p)?;
    let ok = g.fibre.dim == spec.fibre.dim + inner.fibre.dim
        && g.fibre.index == spec.fibre.index + inner.fibre.index
        && vf.len() == g.fibre.dim
        && vf.signature().index == g.fibre.index;
    out.observe("composite.fibre", tols, if ok { 0.0 } else { 1.0 });

    let mut q = p.clone();
    for _ in 0..3 {
        let j = rng.random_range(1..c.full.d());
        let s = T::lit(rng.random_range(-1.0..1.0));
        q = c.full.fibre_point(&q, j, s);
    }
    let norm2 = p.norm_squared();
    let image = (spec.eval(&q) - spec.eval(p)).amax() / (norm2 * norm2);
    let orbit = c.full.orbit_residual(p, &q) / norm2;
    out.observe("composite.orbit", tols, image.max(orbit).to_f64());
    Ok(())
}

/// Number of points carrying the tensor checks, and O'Neill frames at each.
pub fn geometry_budget(samples: usize) -> (usize, usize) {
    let points = samples.div_ceil(5).clamp(1, MAX_GEOMETRY_POINTS);
    (points, ONEILL_FRAMES.div_ceil(points))
}

pub fn verify_fibration<T: Real>(spec: &FibrationSpec<T>, cfg: &RunConfig) -> Result<VerificationReport> {
    let tols = &cfg.tolerances;
    let label = spec.label();
    let mut rng = rng_for(cfg.seed, &label);
    let mut out = CheckSet::new();
    let tag = algebra_of(spec);
    let quadric = spec.total_is_quadric();
    let (geo_points, frames) = geometry_budget(cfg.samples);
    let mut coverage = FibreCoverage::new(fibre_parameter_range(spec));

    for k in 0..cfg.samples {
        algebra_audit(tag, &mut rng, tols, &mut out);
        let p = spec.sample_point(&mut rng);
        if let Some(t) = pointwise(spec, &p, &mut rng, tols, &mut out)? {
            coverage.record(t);
        }
        if !quadric {
            composite_checks(spec, &p, &mut rng, tols, &mut out)?;
            continue;
        }
        if k >= geo_points {
            continue;
        }
        let lg = LocalGeometry::new(spec, &p)?;
        oneill_residuals(&lg, &mut rng, frames, tols, &mut out)?;
        special_osserman_check(&lg, &mut rng, tols, &mut out)?;
        if let Construction::Quotient(_) = spec.construction {
            clifford_structure_check(&lg, &mut rng, 2, tols, &mut out);
        }
        special_basis_check(&lg, &mut rng, if k == 0 { 20 } else { 2 }, tols, &mut out);
        if k == 0 {
            if holonomy_check(spec, &p, &mut rng, 3, 300, tols, &mut out).is_err() {
                out.observe("holonomy.retrace", tols, f64::INFINITY);
            }
        }
        if cfg.expensive && k < 3 {
            nested_checks(&lg, &mut rng, tols, &mut out);
        }
    }

    let checks = out.into_vec();
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        fibration: label,
        total: spec.total_name.clone(),
        base: spec.base.name(),
        fibre: spec.fibre.model.clone(),
        seed: cfg.seed,
        samples: cfg.samples,
        expensive: cfg.expensive,
        convention: CURVATURE_CONVENTION.to_string(),
        finite_difference_step: FD_STEP,
        checks,
        fibre_coverage: (coverage.samples > 0).then_some(coverage),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems() {
        assert_eq!(file_stem("pi_C[2,1]"), "pi_C_2_1");
        assert_eq!(file_stem("pi9"), "pi9");
    }

    #[test]
    fn budget_covers_the_frame_count() {
        for s in [1, 7, 200, 500, 10_000] {
            let (p, f) = geometry_budget(s);
            assert!(p * f >= ONEILL_FRAMES && p <= s);
        }
    }

    #[test]
    fn streams_differ_by_label() {
        let a: u64 = rng_for(1, "pi1").random();
        let b: u64 = rng_for(1, "pi2").random();
        let c: u64 = rng_for(1, "pi1").random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn small_run_passes() {
        let cfg = RunConfig {
            fibrations: vec!["pi1".into(), "pi_CB".into()],
            samples: 3,
            ..RunConfig::default()
        };
        let reports = run(&cfg).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            for c in &r.checks {
                assert!(c.pass, "{} {} {}", r.fibration, c.id, c.max_residual);
            }
        }
        assert!(reports[1].checks.iter().any(|c| c.id == "composite.orbit"));
    }

    #[test]
    fn unknown_ids_and_zero_samples_are_rejected() {
        let cfg = RunConfig {
            fibrations: vec!["pi10".into()],
            ..RunConfig::default()
        };
        assert!(matches!(run(&cfg), Err(Error::UnknownFibration(_))));
        let cfg = RunConfig {
            samples: 0,
            ..RunConfig::default()
        };
        assert!(run(&cfg).is_err());
    }
}
