//! Simplicial fans: validation (primitivity, proper intersections,
//! smoothness, completeness) and the standard constructions.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::feasibility::{LinearProgram, Relation};
use crate::lattice::{
    cone_is_smooth, format_vector, int_vector, is_primitive, smith_normal_form, IntMatrix,
    IntVector,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FanReport {
    pub smooth: bool,
    pub complete: bool,
}

/// A validated simplicial fan in `Z^dim`.
#[derive(Clone, Debug)]
pub struct Fan {
    dim: usize,
    rays: Vec<IntVector>,
    cones: Vec<Vec<usize>>,
    name: Option<String>,
    report: FanReport,
    lookup: HashMap<Vec<usize>, usize>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        // cones compare as sets of ray-index sets
        self.dim == other.dim
            && self.rays == other.rays
            && self.lookup.len() == other.lookup.len()
            && self.lookup.keys().all(|k| other.lookup.contains_key(k))
    }
}

impl Eq for Fan {}

impl Fan {
    /// Validates raw fan data. Structural defects are errors; smoothness
    /// and completeness are recorded in the [`FanReport`].
    pub fn new(dim: usize, rays: Vec<IntVector>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("lattice rank must be positive".into()));
        }
        for r in &rays {
            if r.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "ray {} has length {}, expected {dim}",
                    format_vector(r),
                    r.len()
                )));
            }
            if !is_primitive(r) {
                return Err(Error::RayNotPrimitive(format_vector(r)));
            }
        }
        let mut seen = HashSet::new();
        for r in &rays {
            if !seen.insert(r) {
                return Err(Error::InvalidFan(format!("duplicate ray {}", format_vector(r))));
            }
        }

        let mut lookup = HashMap::new();
        for (ci, cone) in cones.iter().enumerate() {
            if cone.is_empty() {
                return Err(Error::InvalidFan(format!("cone {ci} is empty")));
            }
            if let Some(&bad) = cone.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!(
                    "cone {ci} refers to ray {bad}, but there are only {} rays",
                    rays.len()
                )));
            }
            let key = sorted(cone);
            if key.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidFan(format!("cone {ci} repeats a ray")));
            }
            if lookup.insert(key, ci).is_some() {
                return Err(Error::InvalidFan(format!("cone {ci} is listed twice")));
            }
            let gens: Vec<IntVector> = cone.iter().map(|&i| rays[i].clone()).collect();
            if gens.len() > dim || smith_normal_form(&IntMatrix::from_columns(&gens)?).rank() != gens.len()
            {
                return Err(Error::NonSimplicial(format!("{ci}")));
            }
        }
        if cones.is_empty() {
            return Err(Error::InvalidFan("no cones".into()));
        }
        for i in 0..rays.len() {
            if !cones.iter().any(|c| c.contains(&i)) {
                return Err(Error::InvalidFan(format!("ray {i} belongs to no cone")));
            }
        }
        for (a, ca) in cones.iter().enumerate() {
            for (b, cb) in cones.iter().enumerate() {
                if a != b && ca.iter().all(|i| cb.contains(i)) {
                    return Err(Error::InvalidFan(format!("cone {a} is a face of cone {b}")));
                }
            }
        }
        for a in 0..cones.len() {
            for b in a + 1..cones.len() {
                if !meets_in_common_face(&rays, &cones[a], &cones[b]) {
                    return Err(Error::OverlappingCones(format!("{a}"), format!("{b}")));
                }
            }
        }

        let mut smooth = true;
        for cone in &cones {
            let gens: Vec<IntVector> = cone.iter().map(|&i| rays[i].clone()).collect();
            smooth &= cone_is_smooth(&gens)?;
        }
        let complete = is_complete(dim, &cones);
        Ok(Fan {
            dim,
            rays,
            cones,
            name: None,
            report: FanReport { smooth, complete },
            lookup,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &IntVector {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn report(&self) -> FanReport {
        self.report
    }

    pub fn is_smooth(&self) -> bool {
        self.report.smooth
    }

    pub fn is_complete(&self) -> bool {
        self.report.complete
    }

    /// Errors unless the fan is smooth and complete.
    pub fn require_smooth_complete(&self) -> Result<()> {
        if !self.report.smooth {
            return Err(Error::NotSmooth);
        }
        if !self.report.complete {
            return Err(Error::NotComplete);
        }
        Ok(())
    }

    /// Index of the maximal cone spanned by exactly these rays.
    pub fn find_cone(&self, ray_indices: &[usize]) -> Option<usize> {
        self.lookup.get(&sorted(ray_indices)).copied()
    }

    pub fn find_ray(&self, v: &[BigInt]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == v)
    }

    /// `rays x dim` matrix whose rows are the ray generators.
    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_big_rows(self.rays.clone()).expect("fan has rays")
    }
}

/// Validates raw data and returns the smoothness/completeness report.
pub fn validate_fan(dim: usize, rays: Vec<IntVector>, cones: Vec<Vec<usize>>) -> Result<FanReport> {
    Fan::new(dim, rays, cones).map(|f| f.report())
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// For simplicial cones: true iff every point of `a ∩ b` lies in the cone
/// spanned by the shared rays. Decided by one feasibility problem asking
/// for a common point with positive weight on some non-shared ray of `a`.
fn meets_in_common_face(rays: &[IntVector], a: &[usize], b: &[usize]) -> bool {
    let private: Vec<usize> = (0..a.len()).filter(|&i| !b.contains(&a[i])).collect();
    if private.is_empty() {
        return true;
    }
    let dim = rays[0].len();
    let nv = a.len() + b.len();
    let mut lp = LinearProgram::new(nv);
    for k in 0..dim {
        let mut row = vec![BigRational::zero(); nv];
        for (i, &r) in a.iter().enumerate() {
            row[i] = BigRational::from_integer(rays[r][k].clone());
        }
        for (j, &r) in b.iter().enumerate() {
            row[a.len() + j] = -BigRational::from_integer(rays[r][k].clone());
        }
        lp.push(row, Relation::Eq, BigRational::zero());
    }
    for v in 0..nv {
        lp.push_lower_bound(v, BigRational::zero());
    }
    let mut row = vec![BigRational::zero(); nv];
    for &i in &private {
        row[i] = BigRational::one();
    }
    lp.push(row, Relation::Ge, BigRational::one());
    !lp.is_feasible()
}

/// Pure of full dimension, every wall in exactly two maximal cones, and the
/// wall-adjacency graph connected.
fn is_complete(dim: usize, cones: &[Vec<usize>]) -> bool {
    if cones.iter().any(|c| c.len() != dim) {
        return false;
    }
    let mut walls: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, cone) in cones.iter().enumerate() {
        let s = sorted(cone);
        for skip in 0..s.len() {
            let wall: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &r)| r).collect();
            walls.entry(wall).or_default().push(ci);
        }
    }
    if walls.values().any(|owners| owners.len() != 2) {
        return false;
    }
    let mut reached = vec![false; cones.len()];
    let mut stack = vec![0];
    reached[0] = true;
    while let Some(c) = stack.pop() {
        for owners in walls.values() {
            if owners.contains(&c) {
                for &o in owners {
                    if !reached[o] {
                        reached[o] = true;
                        stack.push(o);
                    }
                }
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// The fan of projective `n`-space: rays `e_1..e_n, -(e_1+..+e_n)` and
/// every `n`-subset as a maximal cone.
pub fn projective_space(n: usize) -> Result<Fan> {
    if n == 0 {
        return Err(Error::InvalidParameter("projective space needs n >= 1".into()));
    }
    let mut rays: Vec<IntVector> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect())
        .collect();
    rays.push(vec![-BigInt::one(); n]);
    let cones = (0..=n)
        .rev()
        .map(|skip| (0..=n).filter(|&i| i != skip).collect())
        .collect();
    Ok(Fan::new(n, rays, cones)?.with_name(format!("P{n}")))
}

/// Product fan: rays of `f` padded with zeros, then rays of `g`; cones are
/// unions of a cone of `f` with a cone of `g`.
pub fn product(f: &Fan, g: &Fan) -> Result<Fan> {
    let dim = f.dim() + g.dim();
    let mut rays: Vec<IntVector> = Vec::with_capacity(f.num_rays() + g.num_rays());
    for r in f.rays() {
        let mut v = r.clone();
        v.resize(dim, BigInt::zero());
        rays.push(v);
    }
    for r in g.rays() {
        let mut v = vec![BigInt::zero(); f.dim()];
        v.extend(r.iter().cloned());
        rays.push(v);
    }
    let offset = f.num_rays();
    let mut cones = Vec::new();
    for a in f.cones() {
        for b in g.cones() {
            let mut c = a.clone();
            c.extend(b.iter().map(|&i| i + offset));
            cones.push(c);
        }
    }
    let name = match (f.name(), g.name()) {
        (Some(a), Some(b)) => format!("{a}x{b}"),
        _ => "product".to_string(),
    };
    Ok(Fan::new(dim, rays, cones)?.with_name(name))
}

/// Hirzebruch surface `F_a`: rays `e1, e2, -e1 + a e2, -e2`.
pub fn hirzebruch(a: i64) -> Result<Fan> {
    if a < 0 {
        return Err(Error::InvalidParameter("Hirzebruch parameter must be >= 0".into()));
    }
    let rays = vec![
        int_vector(&[1, 0]),
        int_vector(&[0, 1]),
        int_vector(&[-1, a]),
        int_vector(&[0, -1]),
    ];
    let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
    Ok(Fan::new(2, rays, cones)?.with_name(format!("F{a}")))
}

/// Builds a standard fan by name: `P<n>`, `P<n>xP<m>`, `F<a>`.
pub fn standard_fan(name: &str) -> Result<Fan> {
    let bad = || Error::InvalidParameter(format!("unknown standard fan {name:?}"));
    if let Some((l, r)) = name.split_once('x') {
        return product(&standard_fan(l)?, &standard_fan(r)?);
    }
    if let Some(n) = name.strip_prefix('P') {
        return projective_space(n.parse().map_err(|_| bad())?);
    }
    if let Some(a) = name.strip_prefix('F') {
        return hirzebruch(a.parse().map_err(|_| bad())?);
    }
    Err(bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rays(v: &[&[i64]]) -> Vec<IntVector> {
        v.iter().map(|r| int_vector(r)).collect()
    }

    #[test]
    fn plane_fan_is_smooth_and_complete() {
        let report = validate_fan(
            2,
            rays(&[&[1, 0], &[0, 1], &[-1, -1]]),
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap();
        assert_eq!(report, FanReport { smooth: true, complete: true });
    }

    #[test]
    fn affine_plane_is_not_complete() {
        let report = validate_fan(2, rays(&[&[1, 0], &[0, 1]]), vec![vec![0, 1]]).unwrap();
        assert_eq!(report, FanReport { smooth: true, complete: false });
    }

    #[test]
    fn non_primitive_ray_rejected() {
        let err = validate_fan(2, rays(&[&[2, 0], &[0, 1]]), vec![vec![0, 1]]).unwrap_err();
        assert!(err.to_string().contains("ray not primitive"));
    }

    #[test]
    fn singular_cone_is_not_smooth() {
        let report = validate_fan(2, rays(&[&[1, 0], &[1, 2]]), vec![vec![0, 1]]).unwrap();
        assert!(!report.smooth);
    }

    #[test]
    fn overlapping_cones_rejected() {
        let err = validate_fan(
            2,
            rays(&[&[1, 0], &[0, 1], &[1, 1], &[-1, 0]]),
            vec![vec![0, 1], vec![2, 3]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::OverlappingCones(..)));
    }

    #[test]
    fn partial_face_overlap_in_three_dimensions() {
        // disjoint interiors, but the cones meet in part of a wall that is
        // not a common face
        let err = validate_fan(
            3,
            rays(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[-1, 0, 0], &[0, 0, -1]]),
            vec![vec![0, 1, 2], vec![3, 4, 5]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::OverlappingCones(..)));
    }

    #[test]
    fn structural_errors() {
        assert!(validate_fan(2, rays(&[&[1, 0], &[0, 1]]), vec![vec![0, 5]]).is_err());
        assert!(validate_fan(2, rays(&[&[1, 0], &[1, 0]]), vec![vec![0, 1]]).is_err());
        assert!(validate_fan(2, rays(&[&[1, 0, 0]]), vec![vec![0]]).is_err());
        assert!(matches!(
            validate_fan(2, rays(&[&[1, 0], &[0, 1], &[-1, -1]]), vec![vec![0, 1, 2]]),
            Err(Error::NonSimplicial(_))
        ));
    }

    #[test]
    fn standard_builders() {
        let p1 = projective_space(1).unwrap();
        assert_eq!(p1.rays(), &rays(&[&[1], &[-1]])[..]);
        assert_eq!(p1.cones().len(), 2);
        let p1p1 = product(&p1, &p1).unwrap();
        assert_eq!(p1p1.rays(), &rays(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]])[..]);
        assert_eq!(p1p1.cones().len(), 4);
        for f in [
            p1,
            p1p1,
            projective_space(2).unwrap(),
            projective_space(3).unwrap(),
            hirzebruch(0).unwrap(),
            hirzebruch(1).unwrap(),
            hirzebruch(3).unwrap(),
            standard_fan("P2xP1").unwrap(),
        ] {
            assert_eq!(f.report(), FanReport { smooth: true, complete: true }, "{:?}", f.name());
        }
        assert!(projective_space(0).is_err());
        assert!(hirzebruch(-1).is_err());
    }

    #[test]
    fn wall_missing_a_neighbour_is_incomplete() {
        let f = Fan::new(
            2,
            rays(&[&[1, 0], &[0, 1], &[-1, -1]]),
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        assert!(!f.is_complete());
        assert_eq!(f.require_smooth_complete(), Err(Error::NotComplete));
    }
}
