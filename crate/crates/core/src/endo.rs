//! Finite toric endomorphisms given by lattice maps that send every ray
//! onto a positive multiple of a ray.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::divisor::{
    clear_denominators, find_ample_class, kleiman_forms, positivity_with_forms, pull_form,
    DivisorClass, PicLattice, Positivity, TorusDivisor,
};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::feasibility::{LinearProgram, Optimum, Relation};
use crate::lattice::{format_vector, integer_kernel, to_rational, IntMatrix};

/// `F v_rho = c_rho v_{pi(rho)}` for every ray, with `pi` mapping maximal
/// cones to maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricEndomorphism {
    fan: Fan,
    matrix: IntMatrix,
    pi: Vec<usize>,
    mults: Vec<BigInt>,
}

pub fn build_endo(fan: &Fan, matrix: IntMatrix) -> Result<ToricEndomorphism> {
    let n = fan.dim();
    if matrix.rows() != n || matrix.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "endomorphism matrix is {}x{}, fan has rank {n}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    if matrix.determinant().is_zero() {
        return Err(Error::NotFinite);
    }
    let mut pi = Vec::with_capacity(fan.num_rays());
    let mut mults = Vec::with_capacity(fan.num_rays());
    for v in fan.rays() {
        let w = matrix.mul_vec(v);
        let content = w.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let direction: Vec<BigInt> = w.iter().map(|x| x / &content).collect();
        let target = fan.find_ray(&direction).ok_or_else(|| {
            Error::NotRayCompatible(format!(
                "F{} = {} lies on no ray",
                format_vector(v),
                format_vector(&w)
            ))
        })?;
        pi.push(target);
        mults.push(content);
    }
    let mut hit = vec![false; pi.len()];
    for &t in &pi {
        if std::mem::replace(&mut hit[t], true) {
            return Err(Error::NotRayCompatible("two rays map onto the same ray".into()));
        }
    }
    for (ci, cone) in fan.cones().iter().enumerate() {
        let image: Vec<usize> = cone.iter().map(|&r| pi[r]).collect();
        if fan.find_cone(&image).is_none() {
            return Err(Error::NotConeCompatible(format!(
                "cone {ci} maps onto rays {image:?}, which span no maximal cone"
            )));
        }
    }
    Ok(ToricEndomorphism {
        fan: fan.clone(),
        matrix,
        pi,
        mults,
    })
}

/// `q * identity`.
pub fn multiplication(fan: &Fan, q: i64) -> Result<ToricEndomorphism> {
    build_endo(fan, IntMatrix::scalar(fan.dim(), BigInt::from(q)))
}

pub fn identity(fan: &Fan) -> ToricEndomorphism {
    multiplication(fan, 1).expect("identity is always compatible")
}

impl ToricEndomorphism {
    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Ray permutation: ray `rho` maps onto ray `pi[rho]`.
    pub fn permutation(&self) -> &[usize] {
        &self.pi
    }

    pub fn inverse_permutation(&self) -> Vec<usize> {
        let mut inv = vec![0; self.pi.len()];
        for (r, &t) in self.pi.iter().enumerate() {
            inv[t] = r;
        }
        inv
    }

    pub fn multiplicities(&self) -> &[BigInt] {
        &self.mults
    }

    /// `|det F|`, the number of points in a general fibre.
    pub fn degree(&self) -> BigInt {
        self.matrix.determinant().abs()
    }

    /// Divisor-level pullback: `f^* D_{rho'} = c_rho D_rho` with
    /// `rho' = pi(rho)`, i.e. `(f^* a)_rho = c_rho a_{pi(rho)}`.
    pub fn pullback_divisor(&self, d: &TorusDivisor) -> TorusDivisor {
        TorusDivisor(
            self.pi
                .iter()
                .zip(&self.mults)
                .map(|(&t, c)| c * &d.coeffs()[t])
                .collect(),
        )
    }

    /// The same pullback as a `rays x rays` matrix.
    pub fn divisor_pullback_matrix(&self) -> IntMatrix {
        let k = self.pi.len();
        let mut m = IntMatrix::zeros(k, k);
        for (r, (&t, c)) in self.pi.iter().zip(&self.mults).enumerate() {
            m.set(r, t, c.clone());
        }
        m
    }

    /// Re-checks `F v_rho = c_rho v_{pi(rho)}` for every ray.
    pub fn is_consistent(&self) -> bool {
        self.fan.rays().iter().enumerate().all(|(r, v)| {
            let w = self.matrix.mul_vec(v);
            let expect: Vec<BigInt> = self.fan.ray(self.pi[r]).iter().map(|x| x * &self.mults[r]).collect();
            w == expect
        })
    }
}

pub fn degree(endo: &ToricEndomorphism) -> BigInt {
    endo.degree()
}

/// Matrix of `f^*` on the Picard lattice, in the canonical basis.
pub fn pullback_matrix(endo: &ToricEndomorphism, pic: &PicLattice) -> IntMatrix {
    pic.to_class_matrix()
        .mul(&endo.divisor_pullback_matrix())
        .mul(pic.lift_matrix())
}

pub fn pullback_class(endo: &ToricEndomorphism, pic: &PicLattice, c: &DivisorClass) -> DivisorClass {
    DivisorClass(pullback_matrix(endo, pic).mul_vec(c.coords()))
}

/// `compose(a, b)` has matrix `F_a F_b`, i.e. it is `a` after `b`.
pub fn compose(a: &ToricEndomorphism, b: &ToricEndomorphism) -> Result<ToricEndomorphism> {
    if a.fan != b.fan {
        return Err(Error::InvalidParameter("endomorphisms of different fans".into()));
    }
    build_endo(&a.fan, a.matrix.mul(&b.matrix))
}

/// `k`-fold iterate.
pub fn iterate(endo: &ToricEndomorphism, k: usize) -> Result<ToricEndomorphism> {
    let mut acc = identity(&endo.fan);
    for _ in 0..k {
        acc = compose(&acc, endo)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntAmplified {
    Yes { certificate: DivisorClass },
    No,
}

impl IntAmplified {
    pub fn is_yes(&self) -> bool {
        matches!(self, IntAmplified::Yes { .. })
    }
}

/// Decides whether some class `H` has both `H` and `f^*H - H` ample.
///
/// Every Kleiman form is required to be at least 1 on both divisors; by
/// scale invariance this closed system is feasible iff the open one is.
/// Among feasible points the one minimising the sum of all margins is
/// returned, scaled to an integral class.
pub fn is_int_amplified(endo: &ToricEndomorphism, pic: &PicLattice) -> Result<IntAmplified> {
    let fan = &endo.fan;
    if find_ample_class(fan, pic)?.is_none() {
        return Err(Error::EmptyAmpleCone);
    }
    let forms = kleiman_forms(fan)?;
    let k = fan.num_rays();
    let r = pic.rank();
    let diff = endo.divisor_pullback_matrix().sub(&IntMatrix::identity(k));

    let mut lp = LinearProgram::new(r);
    let mut objective = vec![BigRational::zero(); r];
    for form in &forms {
        let on_h = pull_form(form, pic);
        let on_diff = pull_form(&diff.transpose().mul_vec(form), pic);
        for g in [on_h, on_diff] {
            lp.push_int(&g, Relation::Ge, &BigInt::one());
            for (o, c) in objective.iter_mut().zip(&g) {
                *o += to_rational(c);
            }
        }
    }
    let point = match lp.minimize(&objective) {
        Optimum::Optimal { point, .. } => point,
        Optimum::Infeasible => return Ok(IntAmplified::No),
        Optimum::Unbounded => unreachable!("margins are bounded below"),
    };
    let certificate = DivisorClass(clear_denominators(&point));
    let h = pic.lift(&certificate);
    let excess = endo.pullback_divisor(&h).sub(&h);
    if positivity_with_forms(&forms, &h) != Positivity::Ample
        || positivity_with_forms(&forms, &excess) != Positivity::Ample
    {
        panic!("int-amplified certificate {certificate} failed its re-check");
    }
    Ok(IntAmplified::Yes { certificate })
}

/// Integer basis of `ker(f^* - id)` on Pic.
pub fn fixed_classes(endo: &ToricEndomorphism, pic: &PicLattice) -> Vec<DivisorClass> {
    let m = pullback_matrix(endo, pic).sub(&IntMatrix::identity(pic.rank()));
    integer_kernel(&m).into_iter().map(DivisorClass).collect()
}
