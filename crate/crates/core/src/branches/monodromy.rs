//! Monodromy of P⁻¹: basepoint and loop system, generators, the permutation
//! at infinity and the sets J_e of branches tending to each pole.
//!
//! Conventions. The basepoint c sits to the left of every marked value, so
//! each arg(c_s − c) lies in (−π/2, π/2); colors are numbered by increasing
//! argument. The loop for color s runs straight from c towards c_s, once
//! counterclockwise around a small circle about c_s, and straight back.
//! σ_s(i) = j means branch i continued along loop s arrives at branch j, and
//! products apply the leftmost factor last: σ_∞·σ_k···σ₁ = id.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::group::{closure_cap, GroupProperties, PermGroup};
use super::perm::Permutation;
use super::tracking::{match_fibers, solve_fiber, sort_lex, Tracker};
use crate::algebra::{Poly, RationalFunction};
use crate::curves::{Curve, Segment};
use crate::error::{Error, Result};

type C = Complex64;

const DEDUPE_TOL: f64 = 1e-9;
const DEGENERATE_TOL: f64 = 1e-6;

fn chordal(a: C, b: C) -> f64 {
    2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
}

/// Closest fiber point on the Riemann sphere; an end heading to a vertex at
/// ∞ keeps its tracked position.
fn nearest_vertex(fiber: &[C], e: C, at_infinity: bool) -> C {
    let best = fiber.iter().copied().min_by(|a, b| chordal(*a, e).total_cmp(&chordal(*b, e)));
    match best {
        Some(f) if !at_infinity || chordal(f, e) < 2.0 / (1.0 + e.norm_sqr()).sqrt() => f,
        _ => e,
    }
}

/// Finite critical values of P: images of finite non-polar critical points,
/// plus P(∞) when ∞ is a critical point with finite image.
pub fn branch_points(p: &RationalFunction) -> Result<Vec<C>> {
    if p.is_constant() {
        return Err(Error::DegenerateInput("P is constant".into()));
    }
    let n = p.num();
    let d = p.den();
    let mut w = &(&n.derivative() * d) - &(n * &d.derivative());
    loop {
        let g = Poly::gcd(&w, d);
        if g.degree() == 0 {
            break;
        }
        w = w.divrem(&g).0;
    }
    let mut vals: Vec<C> = Vec::new();
    if w.degree() > 0 {
        let sq = w.squarefree_part();
        for x in crate::algebra::roots::roots(&sq.to_c64()) {
            vals.push(p.eval_f(x));
        }
    }
    if let Some(pinf) = p.value_at_infinity() {
        // ramification at ∞: order of vanishing of P − P(∞) there
        let rest = n - &d.scale(&pinf);
        let m_inf = if rest.is_zero() { 0 } else { d.degree() as i64 - rest.degree() as i64 };
        if m_inf >= 2 {
            vals.push(pinf.to_c64());
        }
    }
    let mut out: Vec<C> = Vec::new();
    for v in vals {
        if !v.is_finite() {
            continue;
        }
        if !out.iter().any(|u| (u - v).norm() <= DEDUPE_TOL * v.norm().max(1.0)) {
            out.push(v);
        }
    }
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if (out[i] - out[j]).norm() < DEGENERATE_TOL * out[i].norm().max(1.0) {
                return Err(Error::NearDegenerateBranchPoints(format!("{}", out[i]), format!("{}", out[j])));
            }
        }
    }
    sort_lex(&mut out);
    Ok(out)
}

/// A marked value of the star: a branch point or an extra marked value.
#[derive(Clone, Debug, Serialize)]
pub struct Color {
    pub value: [f64; 2],
    pub branch_point: bool,
    #[serde(skip)]
    pub(crate) radius: f64,
}

impl Color {
    pub fn at(&self) -> C {
        C::new(self.value[0], self.value[1])
    }
}

/// Branches tending to one pole of P as t → ∞.
#[derive(Clone, Debug, Serialize)]
pub struct JSet {
    /// None is the pole at infinity.
    pub pole: Option<[f64; 2]>,
    pub order: usize,
    /// 0-based branch indices.
    pub indices: Vec<usize>,
}

impl JSet {
    pub fn pole_c(&self) -> Option<C> {
        self.pole.map(|p| C::new(p[0], p[1]))
    }
}

#[derive(Clone, Debug)]
pub struct BranchSystem {
    p: RationalFunction,
    tracker: Tracker,
    basepoint: C,
    branch_values: Vec<C>,
    branch_points: Vec<C>,
    colors: Vec<Color>,
    generators: Vec<Permutation>,
    sigma_inf: Permutation,
    j_sets: Vec<JSet>,
    p_inf: Option<C>,
    avoid: Vec<C>,
    /// Branch values at the loop start point of each color.
    corridor_ends: Vec<Vec<C>>,
    /// Trajectories of each branch along each corridor.
    corridor_trails: Vec<Vec<Vec<C>>>,
    /// Preimages c_{s,i} of each color reached from branch i.
    vertices: Vec<Vec<C>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyReport {
    pub degree: usize,
    pub basepoint: [f64; 2],
    pub branch_points: Vec<[f64; 2]>,
    pub branch_values: Vec<[f64; 2]>,
    pub generators: Vec<String>,
    pub sigma_inf: String,
    pub order: Option<usize>,
    pub doubly_transitive: bool,
    pub blocks: Vec<Vec<usize>>,
    pub j_sets: Vec<JSetReport>,
    pub riemann_hurwitz: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct JSetReport {
    pub pole: String,
    pub order: usize,
    pub indices: Vec<usize>,
}

fn seg_dist(z: C, a: C, b: C) -> f64 {
    Segment::line(a, b).distance(z)
}

impl BranchSystem {
    pub fn new(p: &RationalFunction) -> Result<Self> {
        Self::build(p, &[], &[])
    }

    /// Build with extra marked values (their σ is the identity) and values
    /// the star must stay away from.
    pub fn build(p: &RationalFunction, extra_marked: &[C], avoid: &[C]) -> Result<Self> {
        let bps = branch_points(p)?;
        let p_inf = p.value_at_infinity().map(|v| v.to_c64());
        let mut colors_v: Vec<(C, bool)> = bps.iter().map(|&b| (b, true)).collect();
        for &e in extra_marked {
            if let Some(pi) = p_inf {
                if (pi - e).norm() <= DEDUPE_TOL * e.norm().max(1.0) && !bps.iter().any(|b| (b - e).norm() <= DEDUPE_TOL * e.norm().max(1.0)) {
                    return Err(Error::DegenerateInput("marked value equals the finite value P(∞)".into()));
                }
            }
            if !colors_v.iter().any(|(c, _)| (c - e).norm() <= DEDUPE_TOL * e.norm().max(1.0)) {
                colors_v.push((e, false));
            }
        }
        let mut avoid_all: Vec<C> = avoid
            .iter()
            .copied()
            .filter(|a| a.is_finite() && !colors_v.iter().any(|(c, _)| (c - a).norm() <= DEDUPE_TOL * a.norm().max(1.0)))
            .collect();
        if let Some(pi) = p_inf {
            if !colors_v.iter().any(|(c, _)| (c - pi).norm() <= DEDUPE_TOL * pi.norm().max(1.0)) {
                avoid_all.push(pi);
            }
        }
        for i in 0..colors_v.len() {
            for j in i + 1..colors_v.len() {
                let (a, b) = (colors_v[i].0, colors_v[j].0);
                if (a - b).norm() < DEGENERATE_TOL * a.norm().max(1.0) {
                    return Err(Error::NearDegenerateBranchPoints(format!("{a}"), format!("{b}")));
                }
            }
        }
        let c = choose_basepoint(&colors_v.iter().map(|x| x.0).collect::<Vec<_>>(), &avoid_all);
        colors_v.sort_by(|a, b| (a.0 - c).arg().partial_cmp(&(b.0 - c).arg()).unwrap());
        let pts: Vec<C> = colors_v.iter().map(|x| x.0).collect();

        let mut colors = Vec::new();
        for (s, &(v, is_bp)) in colors_v.iter().enumerate() {
            let mut r = 0.5 * (v - c).norm();
            for (t, &w) in pts.iter().enumerate() {
                if t != s {
                    r = r.min((v - w).norm()).min(seg_dist(v, c, w));
                }
            }
            for &a in &avoid_all {
                r = r.min((v - a).norm());
            }
            colors.push(Color { value: [v.re, v.im], branch_point: is_bp, radius: 0.3 * r });
        }

        let tracker = Tracker::new(p);
        let mut branch_values = solve_fiber(p, c);
        sort_lex(&mut branch_values);
        let n = p.degree();
        if branch_values.len() != n {
            return Err(Error::DegenerateInput("fiber over the basepoint has the wrong size".into()));
        }

        let mut generators = Vec::new();
        let mut corridor_ends = Vec::new();
        let mut corridor_trails = Vec::new();
        let mut vertices = Vec::new();
        for col in &colors {
            let v = col.at();
            let u = (v - c) / (v - c).norm();
            if col.branch_point {
                let start = v - u * col.radius;
                let corridor = Curve::segment(c, start);
                let (ends, trails) = tracker.track_recorded(&corridor, &branch_values)?;
                let a0 = (-u).arg();
                let circle = Curve::new(vec![Segment::arc(v, col.radius, a0, a0 + 2.0 * PI)], true)?;
                let back = tracker.track(&circle, &ends)?;
                let sigma = Permutation::from_images(match_fibers(&ends, &back)?)?;
                let fiber = solve_fiber(p, v);
                let at_infinity = fiber.len() < n;
                let verts: Vec<C> = ends.iter().map(|&e| nearest_vertex(&fiber, e, at_infinity)).collect();
                generators.push(sigma);
                corridor_ends.push(ends);
                corridor_trails.push(trails);
                vertices.push(verts);
            } else {
                let corridor = Curve::segment(c, v);
                let (ends, trails) = tracker.track_recorded(&corridor, &branch_values)?;
                generators.push(Permutation::identity(n));
                vertices.push(ends.clone());
                corridor_ends.push(ends);
                corridor_trails.push(trails);
            }
        }

        // loop around everything: left along the ray, once around, back
        let mut r_big = 1.0f64;
        for &w in pts.iter().chain(avoid_all.iter()) {
            r_big = r_big.max((w - c).norm());
        }
        r_big *= 2.0;
        let far = c - r_big;
        let big = Curve::new(
            vec![
                Segment::line(c, far),
                Segment::arc(c, r_big, PI, 3.0 * PI),
                Segment::line(far, c),
            ],
            true,
        )?;
        let big_end = tracker.track(&big, &branch_values)?;
        let sigma_big = Permutation::from_images(match_fibers(&branch_values, &big_end)?)?;
        let product = generators.iter().fold(Permutation::identity(n), |acc, g| acc.then(g));
        if product != sigma_big {
            return Err(Error::VerificationFailure(format!(
                "product of loop permutations {product} differs from the big loop {sigma_big}"
            )));
        }
        let sigma_inf = sigma_big.inverse();

        let mut sys = Self {
            p: p.clone(),
            tracker,
            basepoint: c,
            branch_values,
            branch_points: bps,
            colors,
            generators,
            sigma_inf,
            j_sets: Vec::new(),
            p_inf,
            avoid: avoid_all,
            corridor_ends,
            corridor_trails,
            vertices,
        };
        sys.j_sets = sys.compute_j_sets()?;
        sys.check_faces()?;
        Ok(sys)
    }

    fn compute_j_sets(&self) -> Result<Vec<JSet>> {
        let poles = self.p.finite_poles();
        let inf_order = self.p.pole_order_at_infinity();
        let max_pole = poles.iter().map(|q| q.at.norm()).fold(0.0, f64::max);
        let scale = (self.basepoint.norm() + 1.0) * 10.0;
        let mut xs = self.branch_values.clone();
        let mut from = self.basepoint;
        let mut r = scale;
        while r <= 1e14 * scale {
            let to = self.basepoint - r;
            xs = self.tracker.track(&Curve::segment(from, to), &xs)?;
            from = to;
            let mut sets: Vec<Vec<usize>> = vec![Vec::new(); poles.len() + 1];
            for (i, x) in xs.iter().enumerate() {
                if inf_order > 0 && x.norm() > 10.0 * (1.0 + max_pole) {
                    sets[poles.len()].push(i);
                } else if let Some((k, _)) = poles
                    .iter()
                    .enumerate()
                    .map(|(k, q)| (k, (q.at - x).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                {
                    sets[k].push(i);
                }
            }
            let ok = poles.iter().enumerate().all(|(k, q)| sets[k].len() == q.order)
                && sets[poles.len()].len() == inf_order;
            if ok {
                let mut out: Vec<JSet> = poles
                    .iter()
                    .enumerate()
                    .map(|(k, q)| JSet { pole: Some([q.at.re, q.at.im]), order: q.order, indices: sets[k].clone() })
                    .collect();
                if inf_order > 0 {
                    out.push(JSet { pole: None, order: inf_order, indices: sets[poles.len()].clone() });
                }
                return Ok(out);
            }
            r *= 100.0;
        }
        Err(Error::FacePoleMismatch("branches did not separate by pole along the ray".into()))
    }

    /// Each cycle of σ_∞ must be exactly one J_e.
    fn check_faces(&self) -> Result<()> {
        let cycles = self.sigma_inf.cycles();
        if cycles.len() != self.j_sets.len() {
            return Err(Error::FacePoleMismatch(format!(
                "{} cycles at infinity for {} poles",
                cycles.len(),
                self.j_sets.len()
            )));
        }
        for cyc in &cycles {
            let mut c = cyc.clone();
            c.sort();
            if !self.j_sets.iter().any(|j| {
                let mut v = j.indices.clone();
                v.sort();
                v == c
            }) {
                return Err(Error::FacePoleMismatch(format!("cycle {cyc:?} matches no pole")));
            }
        }
        Ok(())
    }

    pub fn p(&self) -> &RationalFunction {
        &self.p
    }

    pub fn degree(&self) -> usize {
        self.branch_values.len()
    }

    pub fn basepoint(&self) -> C {
        self.basepoint
    }

    pub fn branch_values(&self) -> &[C] {
        &self.branch_values
    }

    pub fn branch_points(&self) -> &[C] {
        &self.branch_points
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn sigma_inf(&self) -> &Permutation {
        &self.sigma_inf
    }

    pub fn j_sets(&self) -> &[JSet] {
        &self.j_sets
    }

    pub fn p_inf(&self) -> Option<C> {
        self.p_inf
    }

    pub fn tracker(&self) -> &Tracker {
        &self.tracker
    }

    /// The color whose value is `v`, if any.
    pub fn color_of(&self, v: C) -> Option<usize> {
        self.colors.iter().position(|c| (c.at() - v).norm() <= DEDUPE_TOL * v.norm().max(1.0))
    }

    /// The J set of the pole nearest `z` (None selects ∞).
    pub fn j_set(&self, pole: Option<C>) -> Option<&JSet> {
        match pole {
            None => self.j_sets.iter().find(|j| j.pole.is_none()),
            Some(z) => self
                .j_sets
                .iter()
                .filter(|j| j.pole.is_some())
                .min_by(|a, b| (a.pole_c().unwrap() - z).norm().partial_cmp(&(b.pole_c().unwrap() - z).norm()).unwrap()),
        }
    }

    pub fn corridor_trails(&self, s: usize) -> &[Vec<C>] {
        &self.corridor_trails[s]
    }

    pub fn corridor_ends(&self, s: usize) -> &[C] {
        &self.corridor_ends[s]
    }

    /// c_{s,i}: the preimage of color s reached from branch i.
    pub fn vertex(&self, s: usize, i: usize) -> C {
        self.vertices[s][i]
    }

    /// Monodromy group generated by the branch-point generators.
    pub fn group(&self) -> PermGroup {
        let gens = self
            .generators
            .iter()
            .zip(&self.colors)
            .filter(|(_, c)| c.branch_point)
            .map(|(g, _)| g.clone())
            .collect();
        PermGroup::new(self.degree(), gens).expect("generators share the degree")
    }

    /// Σ_s (n − #cycles σ_s) + (n − #cycles σ_∞) = 2n − 2.
    pub fn riemann_hurwitz(&self) -> bool {
        let n = self.degree();
        let sum: usize = self.generators.iter().chain(std::iter::once(&self.sigma_inf)).map(|g| n - g.num_cycles()).sum();
        sum + 2 == 2 * n
    }

    /// Radius of the circle carrying the identity-test sample points.
    pub fn sample_radius(&self) -> f64 {
        let mut r = self.basepoint.norm().max(1.0);
        for c in &self.colors {
            r = r.max(c.at().norm());
        }
        for a in &self.avoid {
            r = r.max(a.norm());
        }
        3.0 * r
    }

    /// `count` points on the sample circle with branch values continued from
    /// the basepoint (labels consistent with `branch_values`).
    pub fn samples(&self, count: usize) -> Result<Vec<(C, Vec<C>)>> {
        let rad = self.sample_radius();
        let c = self.basepoint;
        let s = c.re + (rad * rad - c.im * c.im).sqrt();
        let p0 = c - s;
        let th0 = p0.arg();
        let mut xs = self.tracker.track(&Curve::segment(c, p0), &self.branch_values)?;
        let mut out = Vec::with_capacity(count);
        let mut th = th0;
        for j in 0..count {
            let target = th0 + 2.0 * PI * (j as f64 + 0.5) / count as f64;
            let arc = Curve::new(vec![Segment::arc(C::new(0.0, 0.0), rad, th, target)], false)?;
            xs = self.tracker.track(&arc, &xs)?;
            th = target;
            out.push((C::from_polar(rad, target), xs.clone()));
        }
        Ok(out)
    }

    /// Continue the basepoint branches along a path starting at the basepoint.
    pub fn continue_along(&self, path: &Curve) -> Result<Vec<C>> {
        if (path.start() - self.basepoint).norm() > 1e-12 * self.basepoint.norm().max(1.0) {
            return Err(Error::InvalidCurve("path must start at the basepoint".into()));
        }
        self.tracker.track(path, &self.branch_values)
    }

    pub fn report(&self) -> MonodromyReport {
        let g = self.group();
        let props: Option<GroupProperties> = g.properties(closure_cap()).ok();
        let pair = |z: C| [z.re, z.im];
        MonodromyReport {
            degree: self.degree(),
            basepoint: pair(self.basepoint),
            branch_points: self.branch_points.iter().map(|&z| pair(z)).collect(),
            branch_values: self.branch_values.iter().map(|&z| pair(z)).collect(),
            generators: self.generators.iter().map(|p| p.cycle_notation()).collect(),
            sigma_inf: self.sigma_inf.cycle_notation(),
            order: props.as_ref().map(|p| p.order),
            doubly_transitive: g.is_doubly_transitive(),
            blocks: g.minimal_blocks().iter().map(|b| b.iter().map(|i| i + 1).collect()).collect(),
            j_sets: self
                .j_sets
                .iter()
                .map(|j| JSetReport {
                    pole: match j.pole {
                        Some(p) => format!("{}", C::new(p[0], p[1])),
                        None => "inf".into(),
                    },
                    order: j.order,
                    indices: j.indices.iter().map(|i| i + 1).collect(),
                })
                .collect(),
            riemann_hurwitz: self.riemann_hurwitz(),
        }
    }
}

/// Place the basepoint left of all marked values, choosing the vertical
/// offset that keeps corridors away from the other points.
fn choose_basepoint(marked: &[C], avoid: &[C]) -> C {
    let all: Vec<C> = marked.iter().chain(avoid.iter()).copied().collect();
    if all.is_empty() {
        return C::new(-1.0, 0.1234);
    }
    let xmin = all.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let ymin = all.iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
    let ymax = all.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
    let xmax = all.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let diam = ((xmax - xmin).powi(2) + (ymax - ymin).powi(2)).sqrt().max(1.0);
    let ymid = 0.5 * (ymin + ymax);
    let offsets = [0.0123, -0.0371, 0.0719, -0.1137, 0.1731, -0.2467, 0.3119, -0.4027, 0.0547, -0.0829];
    let mut best = (f64::NEG_INFINITY, C::new(xmin - diam, ymid + offsets[0] * diam));
    for &off in &offsets {
        let c = C::new(xmin - diam, ymid + off * diam);
        let mut score = f64::INFINITY;
        for (s, &v) in marked.iter().enumerate() {
            for (t, &w) in all.iter().enumerate() {
                if t != s {
                    score = score.min(seg_dist(w, c, v));
                }
            }
        }
        let score = score / diam;
        if score > best.0 {
            best = (score, c);
        }
        if score > 0.05 {
            break;
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;

    fn rf(s: &str) -> RationalFunction {
        parse_rational(s).unwrap()
    }

    #[test]
    fn branch_point_examples() {
        let bp = branch_points(&rf("z^2")).unwrap();
        assert_eq!(bp.len(), 1);
        assert!(bp[0].norm() < 1e-12);
        let bp = branch_points(&rf("z^3 - 3z")).unwrap();
        assert_eq!(bp.len(), 2);
        assert!((bp[0] - C::new(-2.0, 0.0)).norm() < 1e-12 && (bp[1] - C::new(2.0, 0.0)).norm() < 1e-12);
        let bp = branch_points(&rf("z + 1/z")).unwrap();
        assert_eq!(bp.len(), 2);
        assert!(matches!(branch_points(&rf("3")), Err(Error::DegenerateInput(_))));
        // ∞ is critical with finite image 0 for 1/z^2 + 1/z^3? P(∞)=0 with order 2
        let bp = branch_points(&rf("1/(z^2 + 1)")).unwrap();
        assert!(bp.iter().any(|b| b.norm() < 1e-12));
    }

    #[test]
    fn power_map_is_cycle() {
        for n in 2..=6 {
            let p = rf(&format!("z^{n}"));
            let bs = BranchSystem::new(&p).unwrap();
            assert_eq!(bs.generators().len(), 1);
            assert_eq!(bs.generators()[0].cycles().len(), 1);
            assert!(bs.riemann_hurwitz());
        }
    }

    #[test]
    fn joukowski() {
        let bs = BranchSystem::new(&rf("z + 1/z")).unwrap();
        for g in bs.generators() {
            assert_eq!(g.cycle_notation(), "(1 2)");
        }
        assert!(bs.sigma_inf().is_identity());
        assert_eq!(bs.j_sets().len(), 2);
        let j0 = bs.j_set(Some(C::new(0.0, 0.0))).unwrap();
        let jinf = bs.j_set(None).unwrap();
        assert_eq!(j0.indices.len(), 1);
        assert_eq!(jinf.indices.len(), 1);
        assert_ne!(j0.indices, jinf.indices);
    }

    #[test]
    fn cubic_group() {
        let bs = BranchSystem::new(&rf("z^3 - 3z")).unwrap();
        assert_eq!(bs.group().order(1000).unwrap(), 6);
        assert!(bs.riemann_hurwitz());
        assert_eq!(bs.sigma_inf().cycles().len(), 1);
    }

    #[test]
    fn samples_are_fibers() {
        let p = rf("(z^3 + 2z - 1)/(z^2 - 3)");
        let bs = BranchSystem::new(&p).unwrap();
        assert!(bs.riemann_hurwitz());
        for (t, xs) in bs.samples(20).unwrap() {
            for x in xs {
                assert!((p.eval_f(x) - t).norm() < 1e-8 * t.norm());
            }
        }
    }
}
