//! The Cox ring of a smooth complete toric variety: the polynomial ring on
//! one variable per ray, graded by the Picard lattice, together with the
//! monomial endomorphism induced by a toric endomorphism.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::divisor::{
    clear_denominators, DivisorClass, PicLattice, SectionCounter, TorusDivisor,
};
use crate::endo::{pullback_class, pullback_matrix, ToricEndomorphism};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::feasibility::{LinearProgram, Optimum, Relation};
use crate::lattice::{dot, to_rational, IntVector, QuotientLattice};
use crate::pushforward::{class_box, decompose_pushforward};

#[derive(Clone, Debug)]
pub struct CoxRing {
    degrees: Vec<DivisorClass>,
    pic: PicLattice,
    /// integral functional on Pic, at least 1 on every variable degree
    weight: IntVector,
}

impl CoxRing {
    pub fn num_variables(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree_of(&self, var: usize) -> &DivisorClass {
        &self.degrees[var]
    }

    pub fn degrees(&self) -> &[DivisorClass] {
        &self.degrees
    }

    pub fn pic(&self) -> &PicLattice {
        &self.pic
    }

    pub fn grading_weight(&self) -> &[BigInt] {
        &self.weight
    }

    /// Degree of the monomial with the given exponents.
    pub fn monomial_degree(&self, exponents: &[BigInt]) -> DivisorClass {
        let mut out = DivisorClass::zero(self.pic.rank());
        for (e, d) in exponents.iter().zip(&self.degrees) {
            out = out.add(&d.scale(e));
        }
        out
    }
}

pub fn cox_ring(fan: &Fan, pic: &PicLattice) -> Result<CoxRing> {
    fan.require_smooth_complete()?;
    let degrees: Vec<DivisorClass> = (0..fan.num_rays()).map(|r| pic.ray_class(r)).collect();
    let r = pic.rank();
    let mut lp = LinearProgram::new(r);
    let mut objective = vec![BigRational::zero(); r];
    for d in &degrees {
        lp.push_int(d.coords(), Relation::Ge, &BigInt::one());
        for (o, c) in objective.iter_mut().zip(d.coords()) {
            *o += to_rational(c);
        }
    }
    let weight = match lp.minimize(&objective) {
        Optimum::Optimal { point, .. } => clear_denominators(&point),
        _ => {
            return Err(Error::InvalidFan(
                "variable degrees do not lie in a pointed cone".into(),
            ))
        }
    };
    Ok(CoxRing {
        degrees,
        pic: pic.clone(),
        weight,
    })
}

/// Number of monomials of degree `lambda`.
pub fn graded_dimension(ring: &CoxRing, lambda: &DivisorClass) -> u64 {
    let budget = dot(&ring.weight, lambda.coords());
    if budget.is_negative() {
        return 0;
    }
    let weights: Vec<BigInt> = ring.degrees.iter().map(|d| dot(&ring.weight, d.coords())).collect();
    count_monomials(ring, &weights, 0, lambda.clone(), budget)
}

fn count_monomials(
    ring: &CoxRing,
    weights: &[BigInt],
    var: usize,
    residual: DivisorClass,
    budget: BigInt,
) -> u64 {
    let last = ring.degrees.len() - 1;
    if var == last {
        let (e, rem) = budget.div_rem(&weights[var]);
        return u64::from(rem.is_zero() && ring.degrees[var].scale(&e) == residual);
    }
    let max_e = (&budget / &weights[var]).to_u64().expect("exponent bound fits in u64");
    (0..=max_e)
        .map(|e| {
            let e = BigInt::from(e);
            count_monomials(
                ring,
                weights,
                var + 1,
                residual.sub(&ring.degrees[var].scale(&e)),
                &budget - &e * &weights[var],
            )
        })
        .sum()
}

/// The substitution `x_{rho'} -> x_{pi^{-1}(rho')}^{c_{pi^{-1}(rho')}}`
/// (torus-scaling units fixed to 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxEndomorphism {
    /// image of variable `i` is `images[i].0` raised to `images[i].1`
    images: Vec<(usize, BigInt)>,
}

impl CoxEndomorphism {
    pub fn image_of(&self, var: usize) -> (usize, &BigInt) {
        let (v, e) = &self.images[var];
        (*v, e)
    }

    pub fn num_variables(&self) -> usize {
        self.images.len()
    }

    /// Applies the substitution to a monomial given by exponents.
    pub fn apply(&self, exponents: &[BigInt]) -> IntVector {
        let mut out = vec![BigInt::zero(); exponents.len()];
        for (var, e) in exponents.iter().enumerate() {
            let (target, power) = &self.images[var];
            out[*target] += e * power;
        }
        out
    }
}

impl fmt::Display for CoxEndomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, e)) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if e.is_one() {
                write!(f, "x{} -> x{}", i + 1, v + 1)?;
            } else {
                write!(f, "x{} -> x{}^{}", i + 1, v + 1, e)?;
            }
        }
        Ok(())
    }
}

pub fn induced_cox_endo(endo: &ToricEndomorphism, ring: &CoxRing) -> Result<CoxEndomorphism> {
    let inv = endo.inverse_permutation();
    let c = endo.multiplicities();
    let images: Vec<(usize, BigInt)> = inv.iter().map(|&src| (src, c[src].clone())).collect();
    for (var, (target, power)) in images.iter().enumerate() {
        let image_degree = ring.degree_of(*target).scale(power);
        let expected = pullback_class(endo, ring.pic(), ring.degree_of(var));
        if image_degree != expected {
            return Err(Error::GradingIncompatible(format!(
                "deg image of x{} is {image_degree}, f* of its degree is {expected}",
                var + 1
            )));
        }
        // phi^{-1}(m) = m: no variable may land in degree 0
        if image_degree.is_trivial() {
            return Err(Error::GradingIncompatible(format!(
                "x{} maps into degree 0",
                var + 1
            )));
        }
    }
    Ok(CoxEndomorphism { images })
}

/// Least `e` with `phi^e(x) in m^2` for every variable, searched up to the
/// number of variables. Since `phi` sends variables to pure powers of
/// variables, this is the first `e` at which every accumulated exponent
/// reaches 2.
pub fn contracting_exponent(phi: &CoxEndomorphism) -> Option<usize> {
    let n = phi.num_variables();
    let two = BigInt::from(2);
    let mut state: Vec<(usize, BigInt)> = (0..n).map(|v| (v, BigInt::one())).collect();
    for e in 1..=n {
        for (var, exp) in state.iter_mut() {
            let (target, power) = phi.image_of(*var);
            *var = target;
            *exp *= power;
        }
        if state.iter().all(|(_, exp)| *exp >= two) {
            return Some(e);
        }
    }
    None
}

/// Canonical representatives of `Pic / f^* Pic`.
pub fn pic_coset_decomposition(
    endo: &ToricEndomorphism,
    pic: &PicLattice,
) -> Result<Vec<DivisorClass>> {
    let q = QuotientLattice::new(&pullback_matrix(endo, pic))
        .map_err(|_| Error::PullbackNotInjective)?;
    Ok(q.representatives().into_iter().map(DivisorClass).collect())
}

/// Shifts `lambda_i` with `E_M = sum R(lambda_i)`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftList {
    pub shifts: Vec<DivisorClass>,
}

/// The shifts of the free module `E_M`, read off the push-forward of `M`
/// and checked degreewise: `h0(M + f^* mu) = sum_i dim R_{lambda_i + mu}`
/// for every `mu` in the box. A mismatch is a hard failure.
pub fn module_shifts(
    endo: &ToricEndomorphism,
    ring: &CoxRing,
    m: &TorusDivisor,
    bound: u32,
) -> Result<ShiftList> {
    let pic = ring.pic();
    let shifts = decompose_pushforward(endo, pic, m)?.classes();
    let mut counter = SectionCounter::new(endo.fan(), pic);
    let mut graded: HashMap<DivisorClass, u64> = HashMap::new();
    for mu in class_box(pic.rank(), bound) {
        let lhs = counter.of_divisor(&m.add(&endo.pullback_divisor(&pic.lift(&mu))));
        let rhs: u64 = shifts
            .iter()
            .map(|l| {
                let key = l.add(&mu);
                *graded
                    .entry(key.clone())
                    .or_insert_with(|| graded_dimension(ring, &key))
            })
            .sum();
        if lhs != rhs {
            return Err(Error::ShiftMismatch(format!(
                "at mu=({}): dim (E_M)_mu = {lhs}, shifted free module gives {rhs}",
                mu.to_csv()
            )));
        }
    }
    Ok(ShiftList { shifts })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub multiplicity_product: BigInt,
    pub degree: BigInt,
    pub pic_index: BigInt,
}

impl RankReport {
    pub fn holds(&self) -> bool {
        self.multiplicity_product == &self.degree * &self.pic_index
    }
}

/// Checks `prod_rho c_rho = deg(f) * |Pic / f^* Pic|`.
pub fn rank_bookkeeping(endo: &ToricEndomorphism, pic: &PicLattice) -> Result<RankReport> {
    let report = RankReport {
        multiplicity_product: endo.multiplicities().iter().product(),
        degree: endo.degree(),
        pic_index: pullback_matrix(endo, pic).determinant().abs(),
    };
    if report.holds() {
        Ok(report)
    } else {
        Err(Error::RankBookkeeping(format!(
            "{} != {} x {}",
            report.multiplicity_product, report.degree, report.pic_index
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::class_group;
    use crate::endo::{build_endo, identity, multiplication};
    use crate::fan::{product, projective_space};
    use crate::lattice::IntMatrix;

    fn quadric() -> Fan {
        let p1 = projective_space(1).unwrap();
        product(&p1, &p1).unwrap()
    }

    fn swap(fan: &Fan) -> ToricEndomorphism {
        build_endo(fan, IntMatrix::from_rows(&[vec![0, 1], vec![2, 0]]).unwrap()).unwrap()
    }

    fn ring_of(fan: &Fan) -> CoxRing {
        cox_ring(fan, &class_group(fan).unwrap()).unwrap()
    }

    #[test]
    fn variable_degrees() {
        let ring = ring_of(&projective_space(2).unwrap());
        assert_eq!(ring.num_variables(), 3);
        assert!(ring.degrees().iter().all(|d| *d == DivisorClass::from_i64(&[1])));
        let ring = ring_of(&quadric());
        let expect = [[1, 0], [1, 0], [0, 1], [0, 1]];
        for (v, e) in expect.iter().enumerate() {
            assert_eq!(ring.degree_of(v), &DivisorClass::from_i64(e));
        }
    }

    #[test]
    fn graded_dimensions() {
        let p2 = ring_of(&projective_space(2).unwrap());
        assert_eq!(graded_dimension(&p2, &DivisorClass::from_i64(&[2])), 6);
        assert_eq!(graded_dimension(&p2, &DivisorClass::from_i64(&[0])), 1);
        assert_eq!(graded_dimension(&p2, &DivisorClass::from_i64(&[-1])), 0);
        let q = ring_of(&quadric());
        assert_eq!(graded_dimension(&q, &DivisorClass::from_i64(&[1, 1])), 4);
        assert_eq!(graded_dimension(&q, &DivisorClass::from_i64(&[0, 0])), 1);
        assert_eq!(graded_dimension(&q, &DivisorClass::from_i64(&[2, -1])), 0);
    }

    #[test]
    fn induced_substitutions() {
        let p2 = projective_space(2).unwrap();
        let ring = ring_of(&p2);
        let phi = induced_cox_endo(&multiplication(&p2, 3).unwrap(), &ring).unwrap();
        for v in 0..3 {
            assert_eq!(phi.image_of(v), (v, &BigInt::from(3)));
        }

        let fan = quadric();
        let ring = ring_of(&fan);
        let phi = induced_cox_endo(&swap(&fan), &ring).unwrap();
        assert_eq!(phi.to_string(), "x1 -> x3, x2 -> x4, x3 -> x1^2, x4 -> x2^2");
        let id = induced_cox_endo(&identity(&fan), &ring).unwrap();
        assert_eq!(id.apply(&[1.into(), 2.into(), 0.into(), 5.into()]), vec![
            BigInt::from(1),
            2.into(),
            0.into(),
            5.into()
        ]);
    }

    #[test]
    fn contracting_exponents() {
        let p2 = projective_space(2).unwrap();
        let ring = ring_of(&p2);
        let mul = induced_cox_endo(&multiplication(&p2, 2).unwrap(), &ring).unwrap();
        assert_eq!(contracting_exponent(&mul), Some(1));
        let id = induced_cox_endo(&identity(&p2), &ring).unwrap();
        assert_eq!(contracting_exponent(&id), None);

        let fan = quadric();
        let ring = ring_of(&fan);
        let phi = induced_cox_endo(&swap(&fan), &ring).unwrap();
        assert_eq!(contracting_exponent(&phi), Some(2));
        // phi^2 squares every variable
        let mono = vec![BigInt::from(1), 0.into(), 1.into(), 0.into()];
        assert_eq!(phi.apply(&phi.apply(&mono)), vec![BigInt::from(2), 0.into(), 2.into(), 0.into()]);
    }

    #[test]
    fn pic_cosets() {
        let p2 = projective_space(2).unwrap();
        let pic = class_group(&p2).unwrap();
        assert_eq!(pic_coset_decomposition(&multiplication(&p2, 3).unwrap(), &pic).unwrap().len(), 3);
        assert_eq!(pic_coset_decomposition(&identity(&p2), &pic).unwrap().len(), 1);
        let fan = quadric();
        let pic = class_group(&fan).unwrap();
        assert_eq!(pic_coset_decomposition(&swap(&fan), &pic).unwrap().len(), 2);
    }

    #[test]
    fn shifts_match_pushforward() {
        let p1 = projective_space(1).unwrap();
        let ring = ring_of(&p1);
        let s = module_shifts(&multiplication(&p1, 2).unwrap(), &ring, &TorusDivisor::zero(2), 3)
            .unwrap();
        assert_eq!(s.shifts, vec![DivisorClass::from_i64(&[-1]), DivisorClass::from_i64(&[0])]);

        let p2 = projective_space(2).unwrap();
        let ring = ring_of(&p2);
        let s = module_shifts(
            &multiplication(&p2, 2).unwrap(),
            &ring,
            &TorusDivisor::from_i64(&[1, 0, 0]),
            3,
        )
        .unwrap();
        let expect: Vec<DivisorClass> =
            [-1, 0, 0, 0].iter().map(|&x| DivisorClass::from_i64(&[x])).collect();
        assert_eq!(s.shifts, expect);

        let m = TorusDivisor::from_i64(&[0, 2, -1]);
        let s = module_shifts(&identity(&p2), &ring, &m, 3).unwrap();
        assert_eq!(s.shifts, vec![ring.pic().class_of(&m)]);
    }

    #[test]
    fn rank_identity() {
        let p2 = projective_space(2).unwrap();
        let pic = class_group(&p2).unwrap();
        let r = rank_bookkeeping(&multiplication(&p2, 2).unwrap(), &pic).unwrap();
        assert_eq!(
            (r.multiplicity_product, r.degree, r.pic_index),
            (8.into(), 4.into(), 2.into())
        );
        let fan = quadric();
        let pic = class_group(&fan).unwrap();
        let r = rank_bookkeeping(&swap(&fan), &pic).unwrap();
        assert_eq!(
            (r.multiplicity_product, r.degree, r.pic_index),
            (4.into(), 2.into(), 2.into())
        );
        assert!(rank_bookkeeping(&identity(&fan), &pic).unwrap().holds());
    }
}
