//! Local ascent of the isotropic constant over simplicial polytopes.
//!
//! The search is a plain accept-if-better scheme. Points where it stops are
//! candidates only: proposals explore simplicial perturbations, not all
//! nearby convex bodies.

use std::fmt::Write as _;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremality::{foc_residuals_unchecked, hinge_derivative_with_volume, hinge_polytope, HingeSpec};
use crate::hull::facet_enumeration;
use crate::isotropy::{isotropic_position, require_isotropic};
use crate::linalg;
use crate::polytope::{moments, validate, PolytopeV};
use crate::sample::RngSeed;
use crate::symmetry::{all_reflection_checks, isohedrality_check, IsohedralityCheck, SYMMETRY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AscentMode {
    VertexPerturb,
    HingeAscent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub step_init: f64,
    pub step_shrink: f64,
    pub max_iters: usize,
    pub foc_tol: f64,
    pub seed: RngSeed,
    pub mode: AscentMode,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            step_init: 0.1,
            step_shrink: 0.5,
            max_iters: 1000,
            foc_tol: 1e-6,
            seed: RngSeed::new(0),
            mode: AscentMode::HingeAscent,
        }
    }
}

/// Consecutive rejections tolerated before the step shrinks.
pub const REJECTION_STREAK: usize = 5;
/// Steps below this end the search.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub max_foc: f64,
    pub max_refl_defect: f64,
    pub volume: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FocConverged,
    MaxIters,
    StepUnderflow,
    NoCandidates,
}

#[derive(Debug, Clone, Serialize)]
pub struct AscentTrace {
    /// Row 0 describes the start body; each later row is one proposal.
    pub records: Vec<TraceRecord>,
    pub final_body: PolytopeV,
    pub accepted_steps: usize,
    pub termination: Termination,
}

impl AscentTrace {
    pub const CSV_HEADER: &'static str = "iter,L,max_foc,max_refl_defect,volume,accepted";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.iter, r.l, r.max_foc, r.max_refl_defect, r.volume, r.accepted
            );
        }
        out
    }

    pub fn final_l(&self) -> f64 {
        self.records
            .iter()
            .rev()
            .find(|r| r.iter == 0 || r.accepted)
            .map_or(f64::NAN, |r| r.l)
    }
}

/// An isotropic body with its cached diagnostics.
struct State {
    body: PolytopeV,
    l: f64,
    l2d: f64,
    volume: f64,
    max_foc: f64,
    max_refl: f64,
}

impl State {
    fn new(p: &PolytopeV) -> Result<Self> {
        let body = prune(isotropic_position(p)?.body)?;
        let body = isotropic_position(&body)?.body;
        let m = moments(&body)?;
        require_isotropic(&m)?;
        let d = body.dim;
        let l2d = crate::isotropy::l_pow_2d_from_moments(&m);
        let max_foc = foc_residuals_unchecked(&body)
            .iter()
            .map(|r| r.max_abs())
            .fold(0.0, f64::max);
        let max_refl = all_reflection_checks(&body)
            .iter()
            .map(|c| c.defect)
            .fold(0.0, f64::max);
        Ok(Self {
            l: l2d.powf(1.0 / (2.0 * d as f64)),
            l2d,
            volume: m.volume,
            max_foc,
            max_refl,
            body,
        })
    }

    fn record(&self, iter: usize, accepted: bool) -> TraceRecord {
        TraceRecord {
            iter,
            l: self.l,
            max_foc: self.max_foc,
            max_refl_defect: self.max_refl,
            volume: self.volume,
            accepted,
        }
    }
}

/// Drops vertices of facets that have become negligibly small, re-hulling
/// after each removal. The vertex removed is the one whose removal loses the
/// least volume.
fn prune(mut p: PolytopeV) -> Result<PolytopeV> {
    let d = p.dim;
    loop {
        if p.vertices.len() <= d + 1 {
            return Ok(p);
        }
        let tol = 1e-10 * p.scale().powi(d as i32 - 1);
        let Some(fi) = (0..p.facets.len()).find(|&f| linalg::simplex_volume_k(&p.facet_vertices(f)) < tol) else {
            return Ok(p);
        };
        let mut best: Option<(f64, PolytopeV)> = None;
        for &v in &p.facets[fi] {
            let rest: Vec<Vec<f64>> = p
                .vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != v)
                .map(|(_, x)| x.clone())
                .collect();
            let Ok(q) = facet_enumeration(&rest) else { continue };
            let vol = moments(&q)?.volume;
            if best.as_ref().is_none_or(|(b, _)| vol > *b) {
                best = Some((vol, q));
            }
        }
        match best {
            Some((_, q)) => p = q,
            None => return Ok(p),
        }
    }
}

fn check_config(p: &PolytopeV, cfg: &AscentConfig) -> Result<()> {
    if !(cfg.step_init > 0.0) || !cfg.step_init.is_finite() {
        return Err(Error::InvalidInput("step_init must be positive".into()));
    }
    if !(cfg.step_shrink > 0.0 && cfg.step_shrink < 1.0) {
        return Err(Error::InvalidInput("step_shrink must lie in (0, 1)".into()));
    }
    if cfg.max_iters < 1 {
        return Err(Error::InvalidInput("max_iters must be at least 1".into()));
    }
    if cfg.mode == AscentMode::HingeAscent && p.dim < 2 {
        return Err(Error::InvalidInput("hinge ascent needs dimension at least 2".into()));
    }
    let report = validate(p);
    if !report.is_valid() {
        return Err(Error::InvalidInput(format!(
            "start body is invalid: {:?}",
            report.violations
        )));
    }
    Ok(())
}

/// Hinge candidates ranked by `|dL^{2d}/dt|`, ties by `(facet, apex)`.
fn ranked_hinges(s: &State) -> Vec<(HingeSpec, f64)> {
    let mut out = Vec::new();
    for fi in 0..s.body.facets.len() {
        for k in 0..s.body.dim {
            let spec = HingeSpec::new(fi, k, 0.0);
            if let Ok(r) = hinge_derivative_with_volume(&s.body, &spec, s.volume) {
                if r.dl2d_dt != 0.0 && r.dl2d_dt.is_finite() {
                    out.push((spec, r.dl2d_dt));
                }
            }
        }
    }
    // stable sort keeps the lexicographic (facet, apex) order among ties
    out.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    out
}

/// Local ascent from `p0`.
pub fn ascend(p0: &PolytopeV, cfg: &AscentConfig) -> Result<AscentTrace> {
    check_config(p0, cfg)?;
    let mut state = State::new(p0)?;
    let mut records = vec![state.record(0, false)];
    let mut rng = cfg.seed.rng();
    let mut step = cfg.step_init;
    let mut streak = 0usize;
    let mut accepted_steps = 0usize;
    let mut cursor = 0usize;
    let mut ranked = ranked_hinges(&state);
    let mut iter = 0usize;

    let termination = loop {
        if state.max_foc < cfg.foc_tol {
            break Termination::FocConverged;
        }
        if iter >= cfg.max_iters {
            break Termination::MaxIters;
        }
        if step < MIN_STEP {
            break Termination::StepUnderflow;
        }
        iter += 1;
        let proposal = match cfg.mode {
            AscentMode::HingeAscent => {
                if ranked.is_empty() {
                    break Termination::NoCandidates;
                }
                let (spec, slope) = ranked[cursor % ranked.len()];
                cursor += 1;
                let angle = (step * slope.signum()).clamp(-0.7, 0.7);
                hinge_polytope(&state.body, &HingeSpec { angle, ..spec })
            }
            AscentMode::VertexPerturb => {
                let mut vs = state.body.vertices.clone();
                let i = rand::Rng::random_range(&mut rng, 0..vs.len());
                for x in &mut vs[i] {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    *x += step * g;
                }
                facet_enumeration(&vs)
            }
        };
        let candidate = proposal.and_then(|q| State::new(&q));
        match candidate {
            Ok(next) if next.l2d > state.l2d && next.l > state.l => {
                state = next;
                accepted_steps += 1;
                streak = 0;
                cursor = 0;
                if cfg.mode == AscentMode::HingeAscent {
                    ranked = ranked_hinges(&state);
                }
                records.push(state.record(iter, true));
            }
            _ => {
                streak += 1;
                if streak >= REJECTION_STREAK {
                    step *= cfg.step_shrink;
                    streak = 0;
                    cursor = 0;
                }
                records.push(state.record(iter, false));
            }
        }
    };

    Ok(AscentTrace {
        records,
        final_body: state.body,
        accepted_steps,
        termination,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilySummary {
    pub max: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremalityReport {
    pub dim: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub facets: usize,
    pub ridges_checked: usize,
    /// Largest unnormalized first-order residual over facets and apexes.
    pub foc: FamilySummary,
    pub max_foc_relative: f64,
    pub reflection: FamilySummary,
    pub congruence: IsohedralityCheck,
    pub note: &'static str,
}

/// Tolerance on first-order residuals in [`report_extremality`].
pub const FOC_REPORT_TOL: f64 = 1e-6;

/// First-order residuals, ridge reflections and facet congruence of the
/// isotropic image of `p`.
pub fn report_extremality(p: &PolytopeV) -> Result<ExtremalityReport> {
    let iso = isotropic_position(p)?;
    let body = &iso.body;
    let foc = foc_residuals_unchecked(body);
    let max_foc = foc.iter().map(|r| r.max_abs()).fold(0.0, f64::max);
    let max_rel = foc.iter().map(|r| linalg::norm_inf(&r.relative)).fold(0.0, f64::max);
    let checks = all_reflection_checks(body);
    let max_refl = checks.iter().map(|c| c.defect).fold(0.0, f64::max);
    Ok(ExtremalityReport {
        dim: p.dim,
        l: iso.l,
        facets: body.facets.len(),
        ridges_checked: checks.len(),
        foc: FamilySummary {
            max: max_foc,
            tolerance: FOC_REPORT_TOL,
            pass: max_foc < FOC_REPORT_TOL,
        },
        max_foc_relative: max_rel,
        reflection: FamilySummary {
            max: max_refl,
            tolerance: SYMMETRY_TOL,
            pass: max_refl <= SYMMETRY_TOL,
        },
        congruence: isohedrality_check(body),
        note: "extremality families are necessary conditions; a passing body is a candidate, not a certified extremum",
    })
}

/// Smallest distance from a vertex of a polygon to the line through its two
/// neighbours on the boundary cycle.
pub fn min_collinearity_gap(p: &PolytopeV) -> Option<f64> {
    if p.dim != 2 {
        return None;
    }
    let n = p.vertices.len();
    let mut neighbours = vec![Vec::new(); n];
    for f in &p.facets {
        neighbours[f[0]].push(f[1]);
        neighbours[f[1]].push(f[0]);
    }
    (0..n)
        .filter(|&v| neighbours[v].len() == 2)
        .map(|v| {
            let (a, b) = (&p.vertices[neighbours[v][0]], &p.vertices[neighbours[v][1]]);
            linalg::distance_to_affine_hull(&p.vertices[v], &[a.clone(), b.clone()])
        })
        .min_by(f64::total_cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cube, regular_simplex_isotropic};
    use crate::symmetry::Congruence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_polygon(seed: u64, n: usize) -> PolytopeV {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
            angles.sort_by(f64::total_cmp);
            let pts: Vec<Vec<f64>> = angles.iter().map(|a| vec![a.cos(), a.sin()]).collect();
            if let Ok(p) = facet_enumeration(&pts) {
                if p.vertices.len() == n {
                    return p;
                }
            }
        }
    }

    #[test]
    fn simplex_is_a_fixed_point() {
        for d in 2..=4 {
            let t = ascend(&regular_simplex_isotropic(d), &AscentConfig::default()).unwrap();
            assert_eq!(t.accepted_steps, 0);
            assert_eq!(t.termination, Termination::FocConverged);
            assert!(t.records[0].max_foc < 1e-7);
        }
    }

    #[test]
    fn accepted_steps_increase_l_and_runs_repeat() {
        let p = random_polygon(3, 5);
        let cfg = AscentConfig {
            max_iters: 60,
            ..AscentConfig::default()
        };
        let a = ascend(&p, &cfg).unwrap();
        let b = ascend(&p, &cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let mut last = a.records[0].l;
        for r in &a.records[1..] {
            if r.accepted {
                assert!(r.l > last);
                last = r.l;
            } else {
                assert_eq!(r.l, last);
            }
        }
        assert!(a.accepted_steps > 0);
    }

    #[test]
    fn vertex_perturbation_mode() {
        let p = random_polygon(4, 4);
        let cfg = AscentConfig {
            mode: AscentMode::VertexPerturb,
            max_iters: 80,
            seed: RngSeed::new(9),
            ..AscentConfig::default()
        };
        let a = ascend(&p, &cfg).unwrap();
        assert_eq!(a.to_csv(), ascend(&p, &cfg).unwrap().to_csv());
        assert!(a.final_l() >= a.records[0].l);
        let other = ascend(
            &p,
            &AscentConfig {
                seed: RngSeed::new(10),
                ..cfg
            },
        )
        .unwrap();
        assert_ne!(a.to_csv(), other.to_csv());
    }

    #[test]
    fn quadrilateral_collapses_to_triangle() {
        let target = 108f64.powf(-0.25);
        let p = random_polygon(11, 4);
        let t = ascend(
            &p,
            &AscentConfig {
                max_iters: 2000,
                ..AscentConfig::default()
            },
        )
        .unwrap();
        assert!(
            (t.final_l() - target).abs() < 1e-3,
            "{} after {:?}",
            t.final_l(),
            t.termination
        );
        let gap = if t.final_body.vertices.len() == 3 {
            0.0
        } else {
            min_collinearity_gap(&t.final_body).unwrap()
        };
        assert!(gap < 1e-2);
    }

    #[test]
    fn config_validation() {
        let p = random_polygon(1, 4);
        assert!(ascend(
            &p,
            &AscentConfig {
                step_init: 0.0,
                ..AscentConfig::default()
            }
        )
        .is_err());
        assert!(ascend(
            &p,
            &AscentConfig {
                step_shrink: 1.0,
                ..AscentConfig::default()
            }
        )
        .is_err());
        assert!(ascend(
            &p,
            &AscentConfig {
                max_iters: 0,
                ..AscentConfig::default()
            }
        )
        .is_err());
    }

    #[test]
    fn extremality_reports() {
        let s = report_extremality(&regular_simplex_isotropic(3)).unwrap();
        assert!(s.foc.pass && s.reflection.pass);
        assert_eq!(s.congruence.verdict, Congruence::CongruentAll);

        let base = regular_simplex_isotropic(3);
        let mut pts = base.vertices.clone();
        pts.push(linalg::scale(&linalg::mean(&base.facet_vertices(0)), 1.05));
        let bumped = report_extremality(&facet_enumeration(&pts).unwrap()).unwrap();
        assert!(!bumped.foc.pass && !bumped.reflection.pass);

        let c = report_extremality(&cube(3)).unwrap();
        assert_eq!(c.congruence.verdict, Congruence::CongruentAll);
        assert_eq!(c.facets, 12);
    }
}
