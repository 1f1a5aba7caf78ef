//! Torus-invariant divisors, the Picard lattice, section counting and the
//! toric Kleiman criterion.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::feasibility::{LinearProgram, Optimum, Relation};
use crate::lattice::{
    dot, hermite_normal_form, smith_normal_form, to_rational, IntMatrix, IntVector,
};

/// `sum a_rho D_rho`, one coefficient per ray.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusDivisor(pub IntVector);

impl TorusDivisor {
    pub fn zero(num_rays: usize) -> Self {
        TorusDivisor(vec![BigInt::zero(); num_rays])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        TorusDivisor(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> TorusDivisor {
        TorusDivisor(self.0.iter().map(|a| a * k).collect())
    }

    /// The principal divisor of the character `m`: `sum <m, v_rho> D_rho`.
    pub fn principal(fan: &Fan, m: &[BigInt]) -> TorusDivisor {
        TorusDivisor(fan.rays().iter().map(|v| dot(v, m)).collect())
    }
}

impl fmt::Display for TorusDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Coordinates of a class in the canonical basis of the Picard lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass(pub IntVector);

impl DivisorClass {
    pub fn zero(rank: usize) -> Self {
        DivisorClass(vec![BigInt::zero(); rank])
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        DivisorClass(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> DivisorClass {
        DivisorClass(self.0.iter().map(|a| a * k).collect())
    }

    /// Coordinates as `a,b,c`.
    pub fn to_csv(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        parts.join(",")
    }
}

/// `O` for the trivial class, otherwise `O(a,b,...)`.
impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            write!(f, "O")
        } else {
            write!(f, "O({})", self.to_csv())
        }
    }
}

/// The Picard lattice `Z^rays / M` of a smooth complete fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicLattice {
    to_class: IntMatrix,
    lift: IntMatrix,
}

impl PicLattice {
    pub fn rank(&self) -> usize {
        self.to_class.rows()
    }

    pub fn num_rays(&self) -> usize {
        self.to_class.cols()
    }

    /// `rank x rays` projection; column `rho` is the class of `D_rho`.
    pub fn to_class_matrix(&self) -> &IntMatrix {
        &self.to_class
    }

    /// `rays x rank` section of the projection.
    pub fn lift_matrix(&self) -> &IntMatrix {
        &self.lift
    }

    pub fn class_of(&self, d: &TorusDivisor) -> DivisorClass {
        DivisorClass(self.to_class.mul_vec(d.coeffs()))
    }

    pub fn lift(&self, c: &DivisorClass) -> TorusDivisor {
        TorusDivisor(self.lift.mul_vec(c.coords()))
    }

    pub fn ray_class(&self, rho: usize) -> DivisorClass {
        DivisorClass(self.to_class.column(rho))
    }

    pub fn basis(&self) -> Vec<DivisorClass> {
        (0..self.rank())
            .map(|i| DivisorClass((0..self.rank()).map(|j| BigInt::from(i64::from(i == j))).collect()))
            .collect()
    }

    pub fn check_class(&self, c: &DivisorClass) -> Result<()> {
        if c.0.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "class has {} coordinates, Pic has rank {}",
                c.0.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    pub fn check_divisor(&self, d: &TorusDivisor) -> Result<()> {
        if d.len() != self.num_rays() {
            return Err(Error::DimensionMismatch(format!(
                "divisor has {} coefficients, fan has {} rays",
                d.len(),
                self.num_rays()
            )));
        }
        Ok(())
    }
}

/// Computes the Picard lattice of a smooth complete fan.
///
/// The projection comes from the Smith form of the ray matrix; its rows are
/// then put in Hermite normal form, so the resulting basis does not depend
/// on the transforms the Smith reduction happened to pick.
pub fn class_group(fan: &Fan) -> Result<PicLattice> {
    fan.require_smooth_complete()?;
    let n = fan.dim();
    let k = fan.num_rays();
    if k <= n {
        return Err(Error::NotComplete);
    }
    let b = fan.ray_matrix();
    let snf = smith_normal_form(&b);
    if let Some(bad) = snf.invariant_factors().iter().find(|d| !d.is_one()) {
        return Err(Error::Torsion(bad.to_string()));
    }
    let projection =
        IntMatrix::from_big_rows((n..k).map(|i| snf.u.row(i).to_vec()).collect())?;
    let hnf = hermite_normal_form(&projection);
    let to_class = hnf.h;
    let r = k - n;

    let pivot_block = IntMatrix::from_big_rows(
        (0..r)
            .map(|i| hnf.pivots.iter().map(|&c| to_class.get(i, c).clone()).collect())
            .collect(),
    )?;
    let lift = match pivot_block.unimodular_inverse() {
        Some(inv) => {
            let mut lift = IntMatrix::zeros(k, r);
            for (row, &c) in hnf.pivots.iter().enumerate() {
                for j in 0..r {
                    lift.set(c, j, inv.get(row, j).clone());
                }
            }
            lift
        }
        None => {
            let u_inv = snf.u.unimodular_inverse().expect("unimodular");
            let tail = IntMatrix::from_big_rows(
                (0..k).map(|i| (n..k).map(|j| u_inv.get(i, j).clone()).collect()).collect(),
            )?;
            tail.mul(&hnf.t.unimodular_inverse().expect("unimodular"))
        }
    };
    debug_assert_eq!(to_class.mul(&lift), IntMatrix::identity(r));
    Ok(PicLattice { to_class, lift })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    Ample,
    NefNotAmple,
    NotNef,
}

impl Positivity {
    pub fn is_nef(self) -> bool {
        self != Positivity::NotNef
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Positivity::Ample => "ample",
            Positivity::NefNotAmple => "nef-not-ample",
            Positivity::NotNef => "not-nef",
        }
    }
}

impl fmt::Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The linear forms of the toric Kleiman criterion on divisor coefficients.
///
/// For each maximal cone `s` and ray `r` outside it, the form evaluates to
/// `<m_s, v_r> + a_r`, where `m_s` is the character with
/// `<m_s, v_p> = -a_p` on the rays of `s`. A divisor is nef iff every form is
/// nonnegative and ample iff every form is positive.
pub fn kleiman_forms(fan: &Fan) -> Result<Vec<IntVector>> {
    fan.require_smooth_complete()?;
    let k = fan.num_rays();
    let mut forms = Vec::new();
    for cone in fan.cones() {
        let v_sigma =
            IntMatrix::from_big_rows(cone.iter().map(|&i| fan.ray(i).clone()).collect())?;
        let inv = v_sigma
            .unimodular_inverse()
            .expect("smooth cones have unimodular ray matrices");
        for rho in (0..k).filter(|r| !cone.contains(r)) {
            // v_rho^T V^{-1}, so that m_s . v_rho = -(v_rho^T V^{-1}) a_s
            let w = inv.transpose().mul_vec(fan.ray(rho));
            let mut form = vec![BigInt::zero(); k];
            form[rho] = BigInt::one();
            for (j, &p) in cone.iter().enumerate() {
                form[p] -= &w[j];
            }
            forms.push(form);
        }
    }
    Ok(forms)
}

fn classify(values: impl Iterator<Item = BigInt>) -> Positivity {
    let mut strict = true;
    for v in values {
        if v.is_negative() {
            return Positivity::NotNef;
        }
        strict &= v.is_positive();
    }
    if strict {
        Positivity::Ample
    } else {
        Positivity::NefNotAmple
    }
}

pub fn positivity(fan: &Fan, d: &TorusDivisor) -> Result<Positivity> {
    let forms = kleiman_forms(fan)?;
    Ok(positivity_with_forms(&forms, d))
}

pub fn positivity_with_forms(forms: &[IntVector], d: &TorusDivisor) -> Positivity {
    classify(forms.iter().map(|f| dot(f, d.coeffs())))
}

/// Searches the ample cone by exact feasibility (every Kleiman form at
/// least 1). Returns an integral ample class, or `None` if the cone is
/// empty.
pub fn find_ample_class(fan: &Fan, pic: &PicLattice) -> Result<Option<DivisorClass>> {
    let forms = kleiman_forms(fan)?;
    let class_forms: Vec<IntVector> = forms.iter().map(|f| pull_form(f, pic)).collect();
    let r = pic.rank();
    let mut lp = LinearProgram::new(r);
    let mut objective = vec![BigRational::zero(); r];
    for f in &class_forms {
        lp.push_int(f, Relation::Ge, &BigInt::one());
        for (o, c) in objective.iter_mut().zip(f) {
            *o += to_rational(c);
        }
    }
    match lp.minimize(&objective) {
        Optimum::Optimal { point, .. } => Ok(Some(DivisorClass(clear_denominators(&point)))),
        _ => Ok(None),
    }
}

/// Composes a form on divisor coefficients with the lift, giving a form on
/// class coordinates.
pub(crate) fn pull_form(form: &[BigInt], pic: &PicLattice) -> IntVector {
    pic.lift_matrix().transpose().mul_vec(form)
}

/// Scales a rational vector by the lcm of its denominators.
pub fn clear_denominators(v: &[BigRational]) -> IntVector {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
        .collect()
}

/// Exact integer bounds of the section polytope `P_D` along each
/// coordinate, or `None` when `P_D` is empty.
pub fn section_polytope_box(fan: &Fan, d: &TorusDivisor) -> Option<Vec<(BigInt, BigInt)>> {
    let n = fan.dim();
    let mut lp = LinearProgram::new(n);
    for (v, a) in fan.rays().iter().zip(d.coeffs()) {
        lp.push_int(v, Relation::Ge, &-a);
    }
    let mut bounds = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![BigRational::zero(); n];
        e[i] = BigRational::one();
        let lo = match lp.minimize(&e) {
            Optimum::Optimal { value, .. } => value.ceil().to_integer(),
            Optimum::Infeasible => return None,
            Optimum::Unbounded => panic!("section polytope of a complete fan is bounded"),
        };
        let hi = match lp.maximize(&e) {
            Optimum::Optimal { value, .. } => value.floor().to_integer(),
            _ => unreachable!("feasibility already established"),
        };
        if lo > hi {
            return None;
        }
        bounds.push((lo, hi));
    }
    Some(bounds)
}

/// Number of characters `m` with `<m, v_rho> >= -a_rho` for every ray.
pub fn h0(fan: &Fan, d: &TorusDivisor) -> Result<u64> {
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    if d.len() != fan.num_rays() {
        return Err(Error::DimensionMismatch(format!(
            "divisor has {} coefficients, fan has {} rays",
            d.len(),
            fan.num_rays()
        )));
    }
    let Some(bounds) = section_polytope_box(fan, d) else {
        return Ok(0);
    };
    Ok(count_in_box(fan, d, &bounds))
}

fn small(x: &BigInt) -> Option<i128> {
    x.to_i64().filter(|v| v.unsigned_abs() < 1 << 31).map(i128::from)
}

fn count_in_box(fan: &Fan, d: &TorusDivisor, bounds: &[(BigInt, BigInt)]) -> u64 {
    let fast = (|| {
        let rays: Option<Vec<Vec<i128>>> =
            fan.rays().iter().map(|r| r.iter().map(small).collect()).collect();
        let coeffs: Option<Vec<i128>> = d.coeffs().iter().map(small).collect();
        let b: Option<Vec<(i128, i128)>> =
            bounds.iter().map(|(l, h)| Some((small(l)?, small(h)?))).collect();
        Some((rays?, coeffs?, b?))
    })();
    if let Some((rays, coeffs, b)) = fast {
        let n = b.len();
        let mut m: Vec<i128> = b.iter().map(|&(l, _)| l).collect();
        let mut count = 0u64;
        loop {
            let inside = rays
                .iter()
                .zip(&coeffs)
                .all(|(v, a)| v.iter().zip(&m).map(|(x, y)| x * y).sum::<i128>() + a >= 0);
            count += u64::from(inside);
            let mut k = n;
            loop {
                if k == 0 {
                    return count;
                }
                k -= 1;
                if m[k] < b[k].1 {
                    m[k] += 1;
                    break;
                }
                m[k] = b[k].0;
            }
        }
    }

    let n = bounds.len();
    let mut m: IntVector = bounds.iter().map(|(l, _)| l.clone()).collect();
    let mut count = 0u64;
    loop {
        let inside = fan
            .rays()
            .iter()
            .zip(d.coeffs())
            .all(|(v, a)| !(dot(v, &m) + a).is_negative());
        count += u64::from(inside);
        let mut k = n;
        loop {
            if k == 0 {
                return count;
            }
            k -= 1;
            if m[k] < bounds[k].1 {
                m[k] += 1;
                break;
            }
            m[k] = bounds[k].0.clone();
        }
    }
}

/// Memoised `h0` keyed by divisor class (`h0` is constant on classes).
pub struct SectionCounter<'a> {
    fan: &'a Fan,
    pic: &'a PicLattice,
    cache: HashMap<DivisorClass, u64>,
}

impl<'a> SectionCounter<'a> {
    pub fn new(fan: &'a Fan, pic: &'a PicLattice) -> Self {
        SectionCounter {
            fan,
            pic,
            cache: HashMap::new(),
        }
    }

    pub fn fan(&self) -> &'a Fan {
        self.fan
    }

    pub fn pic(&self) -> &'a PicLattice {
        self.pic
    }

    pub fn of_class(&mut self, c: &DivisorClass) -> u64 {
        if let Some(&v) = self.cache.get(c) {
            return v;
        }
        let v = h0(self.fan, &self.pic.lift(c)).expect("fan is complete");
        self.cache.insert(c.clone(), v);
        v
    }

    pub fn of_divisor(&mut self, d: &TorusDivisor) -> u64 {
        let c = self.pic.class_of(d);
        self.of_class(&c)
    }
}
