//! The constellation λ_P = P⁻¹(S) as a combinatorial map, deformation of a
//! curve into it and the integer coefficient system f_{s,i}.
//!
//! Centers are the preimages x_i(c) of the basepoint, one per branch. The
//! half-edge (s, i) joins center i to the vertex c_{s,i} over color s; two
//! centers i, j share that vertex exactly when they lie in one cycle of σ_s.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::RationalFunction;
use crate::branches::{BranchSystem, Permutation};
use crate::curves::Curve;
use crate::error::{Error, Result};

type C = Complex64;

/// Which pole a face surrounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FacePole {
    Finite([f64; 2]),
    Infinity,
    /// Faces of a constellation given only by permutations.
    Abstract(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct Face {
    pub pole: FacePole,
    /// Cycle of σ_∞, 0-based: the branches tending to the pole.
    pub cycle: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Constellation {
    n: usize,
    sigmas: Vec<Permutation>,
    sigma_inf: Permutation,
    faces: Vec<Face>,
}

/// One traversal of a half-edge of λ_P.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Traversal {
    pub color: usize,
    pub branch: usize,
    /// true: center of S_i to c_{s,i}; false: the reverse.
    pub outward: bool,
}

impl Traversal {
    pub fn out(color: usize, branch: usize) -> Self {
        Self { color, branch, outward: true }
    }

    pub fn back(color: usize, branch: usize) -> Self {
        Self { color, branch, outward: false }
    }
}

/// How γ sits in λ_P up to homology in the sphere minus the poles of P.
#[derive(Clone, Debug, Serialize)]
pub struct Deformation {
    /// Multiplicity of each face boundary, normalized.
    pub face_multiplicities: Vec<i64>,
    /// Skeleton walk from a to b for a non-closed curve.
    pub walk: Option<Vec<Traversal>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientSystem {
    /// f_{s,i}: one row per color, one column per branch.
    pub rows: Vec<Vec<i64>>,
}

impl CoefficientSystem {
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    pub fn row_sums(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }

    /// φ_s at one point given g_i = (q/P′)(x_i).
    pub fn apply(&self, g: &[C]) -> Vec<C> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(g).map(|(&f, &v)| if f == 0 { C::new(0.0, 0.0) } else { v * f as f64 }).sum())
            .collect()
    }
}

impl Constellation {
    /// Constellation from σ₁..σ_k; σ_∞ is fixed by σ_∞·σ_k···σ₁ = id.
    pub fn from_permutations(sigmas: Vec<Permutation>) -> Result<Self> {
        let n = sigmas.first().map(|s| s.degree()).ok_or_else(|| Error::InvalidInput("no permutations".into()))?;
        Self::with_degree(n, sigmas)
    }

    fn with_degree(n: usize, sigmas: Vec<Permutation>) -> Result<Self> {
        if sigmas.iter().any(|s| s.degree() != n) {
            return Err(Error::InvalidInput("permutation degrees differ".into()));
        }
        let big = sigmas.iter().fold(Permutation::identity(n), |acc, g| acc.then(g));
        let sigma_inf = big.inverse();
        let faces = sigma_inf
            .cycles()
            .into_iter()
            .enumerate()
            .map(|(k, cycle)| Face { pole: FacePole::Abstract(k), cycle })
            .collect();
        Ok(Self { n, sigmas, sigma_inf, faces })
    }

    /// Constellation of a branch system, faces labelled by the poles of P.
    pub fn from_branch_system(bs: &BranchSystem) -> Result<Self> {
        let mut con = Self::with_degree(bs.degree(), bs.generators().to_vec())?;
        if con.sigma_inf != *bs.sigma_inf() {
            return Err(Error::FacePoleMismatch("σ_∞ disagrees with the tracked loop at infinity".into()));
        }
        for face in &mut con.faces {
            let mut cyc = face.cycle.clone();
            cyc.sort();
            let j = bs
                .j_sets()
                .iter()
                .find(|j| {
                    let mut v = j.indices.clone();
                    v.sort();
                    v == cyc
                })
                .ok_or_else(|| Error::FacePoleMismatch(format!("face {cyc:?} has no pole")))?;
            face.pole = match j.pole {
                Some(p) => FacePole::Finite(p),
                None => FacePole::Infinity,
            };
        }
        Ok(con)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.sigmas.len()
    }

    pub fn sigmas(&self) -> &[Permutation] {
        &self.sigmas
    }

    pub fn sigma_inf(&self) -> &Permutation {
        &self.sigma_inf
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// V − E + F of the map (2 for a connected genus-zero map).
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.n + self.sigmas.iter().map(|s| s.num_cycles()).sum::<usize>();
        let e = self.n * self.k();
        (v as i64) - (e as i64) + self.faces.len() as i64
    }

    /// Whether centers i and j share the vertex over color s.
    pub fn same_vertex(&self, s: usize, i: usize, j: usize) -> bool {
        let g = &self.sigmas[s];
        let mut x = i;
        loop {
            if x == j {
                return true;
            }
            x = g.apply(x);
            if x == i {
                return false;
            }
        }
    }

    /// Coefficients of the boundary of one face, traversed with its pole on the left.
    pub fn face_rows(&self, face: usize) -> Vec<Vec<i64>> {
        let mut f = vec![vec![0i64; self.n]; self.k()];
        let inv: Vec<Permutation> = self.sigmas.iter().map(|s| s.inverse()).collect();
        let cycle = &self.faces[face].cycle;
        let mut j = cycle[0];
        for _ in 0..cycle.len() {
            for s in (0..self.k()).rev() {
                f[s][j] += 1;
                let jp = inv[s].apply(j);
                f[s][jp] -= 1;
                j = jp;
            }
        }
        debug_assert_eq!(j, cycle[0]);
        f
    }

    /// Signed counts of a walk, after checking that consecutive traversals meet.
    pub fn walk_rows(&self, walk: &[Traversal]) -> Result<Vec<Vec<i64>>> {
        let mut f = vec![vec![0i64; self.n]; self.k()];
        for (a, b) in walk.iter().zip(walk.iter().skip(1)) {
            let ok = match (a.outward, b.outward) {
                (true, false) => a.color == b.color && self.same_vertex(a.color, a.branch, b.branch),
                (false, true) => a.branch == b.branch,
                _ => false,
            };
            if !ok {
                return Err(Error::InvalidInput(format!("walk breaks between {a:?} and {b:?}")));
            }
        }
        for t in walk {
            if t.color >= self.k() || t.branch >= self.n {
                return Err(Error::InvalidInput(format!("traversal {t:?} out of range")));
            }
            f[t.color][t.branch] += if t.outward { 1 } else { -1 };
        }
        Ok(f)
    }

    /// Rows of a deformation: walk counts plus face boundaries with multiplicity.
    pub fn coefficient_system(&self, d: &Deformation) -> Result<CoefficientSystem> {
        let mut rows = match &d.walk {
            Some(w) => self.walk_rows(w)?,
            None => vec![vec![0i64; self.n]; self.k()],
        };
        for (face, &e) in d.face_multiplicities.iter().enumerate() {
            if e != 0 {
                for (r, fr) in rows.iter_mut().zip(self.face_rows(face)) {
                    for (x, y) in r.iter_mut().zip(fr) {
                        *x += e * y;
                    }
                }
            }
        }
        Ok(CoefficientSystem { rows })
    }

    /// Shortest center-to-center walk from i to j.
    pub fn center_path(&self, from: usize, to: usize) -> Option<Vec<Traversal>> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(i) = queue.pop_front() {
            if i == to {
                break;
            }
            for s in 0..self.k() {
                let mut j = self.sigmas[s].apply(i);
                while j != i {
                    if !seen[j] {
                        seen[j] = true;
                        prev[j] = Some((i, s));
                        queue.push_back(j);
                    }
                    j = self.sigmas[s].apply(j);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut steps = Vec::new();
        let mut j = to;
        while let Some((i, s)) = prev[j] {
            steps.push([Traversal::out(s, i), Traversal::back(s, j)]);
            j = i;
        }
        steps.reverse();
        Some(steps.into_iter().flatten().collect())
    }
}

/// Shift integers by the constant nearest zero that minimizes Σ|e_j|.
pub fn normalize_multiplicities(e: &mut [i64]) {
    if e.is_empty() {
        return;
    }
    let mut v = e.to_vec();
    v.sort();
    let lo = v[(v.len() - 1) / 2];
    let hi = v[v.len() / 2];
    let shift = 0i64.clamp(lo, hi);
    for x in e.iter_mut() {
        *x -= shift;
    }
}

fn face_pole_c(f: &Face) -> Option<C> {
    match f.pole {
        FacePole::Finite(p) => Some(C::new(p[0], p[1])),
        _ => None,
    }
}

/// Polyline of the half-edge (s, i) from the center to the vertex.
fn edge_polyline(bs: &BranchSystem, s: usize, i: usize) -> Vec<C> {
    let mut pts = bs.corridor_trails(s)[i].clone();
    pts.push(bs.vertex(s, i));
    pts
}

fn polyline_increment(pts: &[C], z: C) -> f64 {
    pts.windows(2).map(|w| ((w[1] - z) / (w[0] - z)).arg()).sum()
}

/// Geometric realization of a walk as a polyline.
fn walk_polyline(bs: &BranchSystem, walk: &[Traversal]) -> Vec<C> {
    let mut pts = Vec::new();
    for t in walk {
        let mut e = edge_polyline(bs, t.color, t.branch);
        if !t.outward {
            e.reverse();
        }
        pts.extend(e);
    }
    pts
}

/// Face multiplicities (closed γ) or skeleton walk plus multiplicities.
pub fn deform_to_skeleton(gamma: &Curve, bs: &BranchSystem, con: &Constellation) -> Result<Deformation> {
    let p = bs.p();
    let sides = gamma.poles_one_side(p);
    if let Err(e @ Error::PoleOnCurve(_)) = sides {
        return Err(e);
    }
    let winding = |z: C, extra: f64| -> Result<i64> {
        let total = gamma.angle_increment(z)? - extra;
        let w = total / (2.0 * PI);
        if (w - w.round()).abs() > 0.1 {
            return Err(Error::VerificationFailure(format!("non-integral winding {w} about {z}")));
        }
        Ok(w.round() as i64)
    };
    if gamma.is_closed() {
        let mut e = Vec::with_capacity(con.faces().len());
        for f in con.faces() {
            e.push(match face_pole_c(f) {
                Some(z) => gamma.winding_number(z)?,
                None => 0,
            });
        }
        normalize_multiplicities(&mut e);
        return Ok(Deformation { face_multiplicities: e, walk: None });
    }
    let (a, b) = (gamma.start(), gamma.end());
    let endpoint = |x: C| -> Result<(usize, usize)> {
        let v = p.try_eval_f(x).map_err(|_| Error::PoleOnCurve(format!("{x}")))?;
        let s = bs.color_of(v).ok_or_else(|| Error::VerificationFailure(format!("P({x}) is not a marked value")))?;
        let (i, d) = (0..bs.degree())
            .map(|i| (i, (bs.vertex(s, i) - x).norm()))
            .min_by(|u, w| u.1.partial_cmp(&w.1).unwrap())
            .unwrap();
        if d > 1e-6 * x.norm().max(1.0) {
            return Err(Error::VerificationFailure(format!("endpoint {x} is not a vertex of λ_P")));
        }
        Ok((s, i))
    };
    let (sa, ia) = endpoint(a)?;
    let (sb, ib) = endpoint(b)?;
    let mut walk = vec![Traversal::back(sa, ia)];
    walk.extend(con.center_path(ia, ib).ok_or(Error::InconsistentPartition)?);
    walk.push(Traversal::out(sb, ib));
    let mut pts = walk_polyline(bs, &walk);
    if let Some(first) = pts.first_mut() {
        *first = a;
    }
    if let Some(last) = pts.last_mut() {
        *last = b;
    }
    let mut e = Vec::with_capacity(con.faces().len());
    for f in con.faces() {
        e.push(match face_pole_c(f) {
            Some(z) => winding(z, polyline_increment(&pts, z))?,
            None => 0,
        });
    }
    normalize_multiplicities(&mut e);
    Ok(Deformation { face_multiplicities: e, walk: Some(walk) })
}

/// Everything needed to write down φ_s for (P, γ).
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub branches: BranchSystem,
    pub constellation: Constellation,
    pub deformation: Deformation,
    pub system: CoefficientSystem,
}

/// Build the branch system (marking the endpoint images of a non-closed γ),
/// the constellation, the deformation and the coefficient system.
pub fn skeleton(p: &RationalFunction, gamma: &Curve, avoid: &[C]) -> Result<Skeleton> {
    let mut extra = Vec::new();
    if !gamma.is_closed() {
        for x in [gamma.start(), gamma.end()] {
            extra.push(p.try_eval_f(x).map_err(|_| Error::PoleOnCurve(format!("{x}")))?);
        }
    }
    gamma.poles_one_side(p)?;
    let branches = BranchSystem::build(p, &extra, avoid)?;
    let constellation = Constellation::from_branch_system(&branches)?;
    let deformation = deform_to_skeleton(gamma, &branches, &constellation)?;
    let system = constellation.coefficient_system(&deformation)?;
    Ok(Skeleton { branches, constellation, deformation, system })
}

/// Coefficient rows of the six-branch sample walk.
pub const SAMPLE_WALK_ROWS: [[i64; 6]; 3] = [[0, -1, 1, 0, 0, 0], [-1, 1, 0, -1, 0, 1], [1, 0, -1, 1, 0, -1]];

/// A degree-6, three-color constellation and a closed walk in it whose
/// signed vertex appearances are `SAMPLE_WALK_ROWS`.
pub fn sample_walk_fixture() -> (Constellation, Vec<Traversal>) {
    let sig = |s: &str| Permutation::parse(6, s).expect("fixture permutation");
    let con = Constellation::from_permutations(vec![sig("(2 3)"), sig("(1 2)(4 5 6)"), sig("(1 6)(3 4)")])
        .expect("fixture constellation");
    // centers 3 → 2 → 1 → 6 → 4 → 3 (1-based), colors 1, 2, 3, 2, 3
    let moves = [(0, 2, 1), (1, 1, 0), (2, 0, 5), (1, 5, 3), (2, 3, 2)];
    let walk = moves.iter().flat_map(|&(s, i, j)| [Traversal::out(s, i), Traversal::back(s, j)]).collect();
    (con, walk)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstellationReport {
    pub k: usize,
    pub sigma: Vec<String>,
    pub sigma_inf: String,
    pub faces: Vec<FaceReport>,
    pub f_matrix: Vec<Vec<i64>>,
    pub euler_characteristic: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceReport {
    pub pole: FacePole,
    pub e: i64,
    pub branches: Vec<usize>,
}

impl Skeleton {
    pub fn report(&self) -> ConstellationReport {
        let con = &self.constellation;
        ConstellationReport {
            k: con.k(),
            sigma: con.sigmas().iter().map(|s| s.cycle_notation()).collect(),
            sigma_inf: con.sigma_inf().cycle_notation(),
            faces: con
                .faces()
                .iter()
                .zip(&self.deformation.face_multiplicities)
                .map(|(f, &e)| FaceReport { pole: f.pole.clone(), e, branches: f.cycle.iter().map(|i| i + 1).collect() })
                .collect(),
            f_matrix: self.system.rows.clone(),
            euler_characteristic: con.euler_characteristic(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;
    use crate::curves::Segment;

    fn rf(s: &str) -> RationalFunction {
        parse_rational(s).unwrap()
    }

    #[test]
    fn sample_walk_rows() {
        let (con, walk) = sample_walk_fixture();
        assert_eq!(con.euler_characteristic(), 2);
        let rows = con.walk_rows(&walk).unwrap();
        let want: Vec<Vec<i64>> = SAMPLE_WALK_ROWS.iter().map(|r| r.to_vec()).collect();
        assert_eq!(rows, want);
    }

    #[test]
    fn broken_walk_rejected() {
        let (con, _) = sample_walk_fixture();
        let walk = [Traversal::out(0, 0), Traversal::back(0, 1)];
        assert!(con.walk_rows(&walk).is_err());
    }

    #[test]
    fn face_rows_sum_to_zero() {
        let (con, _) = sample_walk_fixture();
        let mut total = vec![vec![0i64; 6]; 3];
        for f in 0..con.faces().len() {
            for (t, r) in total.iter_mut().zip(con.face_rows(f)) {
                assert_eq!(r.iter().sum::<i64>(), 0);
                for (x, y) in t.iter_mut().zip(r) {
                    *x += y;
                }
            }
        }
        assert!(total.iter().flatten().all(|&x| x == 0));
    }

    #[test]
    fn normalization() {
        let mut e = vec![1, 0];
        normalize_multiplicities(&mut e);
        assert_eq!(e, vec![1, 0]);
        let mut e = vec![3, 3, 1];
        normalize_multiplicities(&mut e);
        assert_eq!(e, vec![0, 0, -2]);
    }

    #[test]
    fn spec_examples() {
        let sk = skeleton(&rf("z^3"), &Curve::unit_circle(), &[]).unwrap();
        assert_eq!(sk.constellation.k(), 1);
        assert_eq!(sk.constellation.faces().len(), 1);
        assert_eq!(sk.deformation.face_multiplicities, vec![0]);
        assert!(sk.system.is_zero());

        let sk = skeleton(&rf("z + 1/z"), &Curve::unit_circle(), &[]).unwrap();
        assert_eq!(sk.constellation.k(), 2);
        assert_eq!(sk.constellation.euler_characteristic(), 2);
        let e: Vec<(FacePole, i64)> = sk
            .constellation
            .faces()
            .iter()
            .map(|f| f.pole.clone())
            .zip(sk.deformation.face_multiplicities.iter().copied())
            .collect();
        assert!(e.contains(&(FacePole::Finite([0.0, 0.0]), 1)));
        assert!(e.contains(&(FacePole::Infinity, 0)));
        assert!(!sk.system.is_zero());

        let twice = Curve::circle_times(C::new(0.0, 0.0), 1.0, 2);
        let sk = skeleton(&rf("z + 1/z"), &twice, &[]).unwrap();
        assert!(sk.deformation.face_multiplicities.contains(&2));

        let sk = skeleton(&rf("z^3 - 3z"), &Curve::unit_circle(), &[]).unwrap();
        assert_eq!(sk.constellation.faces().len(), 1);
    }

    /// The jump of Σ_e μ_e Σ_{J_e} g(x_i) across corridor s equals φ_s.
    #[test]
    fn face_rows_are_jumps() {
        let p = rf("(z^3 + z + 1)/((z - 2)(z + 1 - i))");
        let gamma = Curve::circle(C::new(1.5, 0.0), 1.0);
        let sk = skeleton(&p, &gamma, &[]).unwrap();
        let bs = &sk.branches;
        assert!(!sk.system.is_zero());
        let g = |x: C| 1.0 / (x - C::new(0.3, 0.7)) + x * x;
        let weights: Vec<i64> = {
            let mut w = vec![0i64; bs.degree()];
            for (f, &e) in sk.constellation.faces().iter().zip(&sk.deformation.face_multiplicities) {
                for &i in &f.cycle {
                    w[i] = e;
                }
            }
            w
        };
        let c = bs.basepoint();
        let r_far = bs.sample_radius() * 2.0;
        let xs_far = bs.tracker().track(&Curve::segment(c, c - r_far), bs.branch_values()).unwrap();
        let mut biggest = 0.0f64;
        for (s, col) in bs.colors().iter().enumerate() {
            let v = col.at();
            let th = (v - c).arg();
            let rho = 0.5 * (v - c).norm();
            let z0 = c + C::from_polar(rho, th);
            let mut fv = Vec::new();
            for side in [1.0, -1.0] {
                // around the outside, in along a ray just beside the corridor
                let ang = th + side * 1e-6;
                let path = Curve::new(
                    vec![
                        Segment::arc(c, r_far, PI, if ang < 0.0 { ang + 2.0 * PI } else { ang }),
                        Segment::line(c + C::from_polar(r_far, ang), c + C::from_polar(rho, ang)),
                    ],
                    false,
                );
                let path = path.unwrap();
                let xs = bs.tracker().track(&path, &xs_far).unwrap();
                let val: C = xs.iter().zip(&weights).map(|(&x, &w)| g(x) * w as f64).sum();
                fv.push(val);
            }
            let xs0 = bs.tracker().track(&Curve::segment(c, z0), bs.branch_values()).unwrap();
            let gs: Vec<C> = xs0.iter().map(|&x| g(x)).collect();
            let phi = sk.system.apply(&gs)[s];
            let jump = fv[0] - fv[1];
            biggest = biggest.max(phi.norm());
            assert!((jump - phi).norm() < 1e-3 * (1.0 + phi.norm()), "color {s}: jump {jump} vs φ {phi}");
        }
        assert!(biggest > 1e-2);
    }
}
