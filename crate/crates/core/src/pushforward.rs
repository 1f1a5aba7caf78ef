//! Splitting of `f_* O(D)` into line bundles.
//!
//! Characters of `M` are grouped by cosets `u + F^T M`. Writing a character
//! as `u + F^T m`, the section condition `<u + F^T m, v_rho> >= -a_rho`
//! becomes `<m, v_{pi(rho)}> >= -floor((a_rho + <u, v_rho>) / c_rho)`, so each
//! coset contributes the sections of one torus-invariant divisor `D_u`, and
//! `f_* O(D)` is the sum of the `O(D_u)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::divisor::{DivisorClass, PicLattice, SectionCounter, TorusDivisor};
use crate::endo::{iterate, ToricEndomorphism};
use crate::error::Result;
use crate::lattice::{coset_representatives, dot, IntVector};

/// One summand `O(D_u)` of a push-forward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub class: DivisorClass,
    pub witness: TorusDivisor,
    pub coset: IntVector,
}

/// `f_* O(D) = sum_u O(D_u)`, summands sorted by class and then by coset
/// representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub summands: Vec<Summand>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Sorted class multiset.
    pub fn classes(&self) -> Vec<DivisorClass> {
        self.summands.iter().map(|s| s.class.clone()).collect()
    }

    /// Classes with multiplicities.
    pub fn multiplicities(&self) -> BTreeMap<DivisorClass, usize> {
        let mut out = BTreeMap::new();
        for s in &self.summands {
            *out.entry(s.class.clone()).or_insert(0) += 1;
        }
        out
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.summands.iter().map(|s| s.class.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// The divisor `D_u`: coefficient `floor((a_rho + <u, v_rho>) / c_rho)` at
/// ray `pi(rho)`.
pub fn witness_divisor(endo: &ToricEndomorphism, d: &TorusDivisor, u: &[BigInt]) -> TorusDivisor {
    let fan = endo.fan();
    let mut out = vec![BigInt::default(); fan.num_rays()];
    for (rho, v) in fan.rays().iter().enumerate() {
        let num = &d.coeffs()[rho] + dot(u, v);
        out[endo.permutation()[rho]] = num.div_floor(&endo.multiplicities()[rho]);
    }
    TorusDivisor(out)
}

/// Decomposition over the canonical coset representatives of `M / F^T M`.
pub fn decompose_pushforward(
    endo: &ToricEndomorphism,
    pic: &PicLattice,
    d: &TorusDivisor,
) -> Result<Decomposition> {
    pic.check_divisor(d)?;
    let reps = coset_representatives(&endo.matrix().transpose())?;
    Ok(decompose_with_cosets(endo, pic, d, &reps))
}

/// Decomposition over caller-supplied coset representatives (one per coset
/// of `M / F^T M`).
pub fn decompose_with_cosets(
    endo: &ToricEndomorphism,
    pic: &PicLattice,
    d: &TorusDivisor,
    reps: &[IntVector],
) -> Decomposition {
    let mut summands: Vec<Summand> = reps
        .iter()
        .map(|u| {
            let witness = witness_divisor(endo, d, u);
            Summand {
                class: pic.class_of(&witness),
                witness,
                coset: u.clone(),
            }
        })
        .collect();
    summands.sort_by(|a, b| a.class.cmp(&b.class).then_with(|| a.coset.cmp(&b.coset)));
    Decomposition { summands }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Rank {
        expected: BigInt,
        found: usize,
    },
    /// `h0(D + f^*E) != sum_i h0(lambda_i + E)`
    Dimension {
        twist: DivisorClass,
        lhs: u64,
        rhs: u64,
    },
    TrivialSummands {
        count: usize,
    },
    SectionsOnNontrivialSummand {
        class: DivisorClass,
        h0: u64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Rank { expected, found } => {
                write!(f, "rank {found} differs from degree {expected}")
            }
            Violation::Dimension { twist, lhs, rhs } => write!(
                f,
                "twist E=({}): h0(D + f*E) = {lhs} but the summands give {rhs}",
                twist.to_csv()
            ),
            Violation::TrivialSummands { count } => {
                write!(f, "expected exactly one trivial summand, found {count}")
            }
            Violation::SectionsOnNontrivialSummand { class, h0 } => {
                write!(f, "non-trivial summand {class} has h0 = {h0}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub twists_checked: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All classes with coordinates in `[-bound, bound]^rank`.
pub fn class_box(rank: usize, bound: u32) -> Vec<DivisorClass> {
    let b = i64::from(bound);
    let mut out = Vec::new();
    let mut cur = vec![-b; rank];
    loop {
        out.push(DivisorClass::from_i64(&cur));
        let mut k = rank;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < b {
                cur[k] += 1;
                break;
            }
            cur[k] = -b;
        }
    }
}

/// Projection-formula check of a decomposition: for every twist `E` in the
/// box, `h0(D + f^*E) = sum_i h0(lambda_i + E)`. Also checks the rank and,
/// when `D` is trivial, that exactly one summand is trivial and the others
/// have no sections.
pub fn verify_decomposition(
    endo: &ToricEndomorphism,
    pic: &PicLattice,
    d: &TorusDivisor,
    dec: &Decomposition,
    bound: u32,
) -> VerificationReport {
    let mut counter = SectionCounter::new(endo.fan(), pic);
    verify_decomposition_with(&mut counter, endo, d, dec, bound)
}

/// As [`verify_decomposition`], sharing a section-count cache across calls.
pub fn verify_decomposition_with(
    counter: &mut SectionCounter<'_>,
    endo: &ToricEndomorphism,
    d: &TorusDivisor,
    dec: &Decomposition,
    bound: u32,
) -> VerificationReport {
    let pic = counter.pic();
    let mut violations = Vec::new();
    let degree = endo.degree();
    if degree.to_usize() != Some(dec.len()) {
        violations.push(Violation::Rank {
            expected: degree,
            found: dec.len(),
        });
    }

    let twists = class_box(pic.rank(), bound);
    for e in &twists {
        let lifted = pic.lift(e);
        let lhs = counter.of_divisor(&d.add(&endo.pullback_divisor(&lifted)));
        let rhs: u64 = dec
            .summands
            .iter()
            .map(|s| counter.of_class(&s.class.add(e)))
            .sum();
        if lhs != rhs {
            violations.push(Violation::Dimension {
                twist: e.clone(),
                lhs,
                rhs,
            });
        }
    }

    if pic.class_of(d).is_trivial() {
        let trivial = dec.summands.iter().filter(|s| s.class.is_trivial()).count();
        if trivial != 1 {
            violations.push(Violation::TrivialSummands { count: trivial });
        }
        for s in dec.summands.iter().filter(|s| !s.class.is_trivial()) {
            let h = counter.of_class(&s.class);
            if h != 0 {
                violations.push(Violation::SectionsOnNontrivialSummand {
                    class: s.class.clone(),
                    h0: h,
                });
            }
        }
    }
    VerificationReport {
        twists_checked: twists.len(),
        violations,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherenceReport {
    /// classes of `(f^k)_* O(D)`
    pub direct: Vec<DivisorClass>,
    /// classes of `f_*` applied `k` times
    pub iterated: Vec<DivisorClass>,
}

impl CoherenceReport {
    pub fn coherent(&self) -> bool {
        self.direct == self.iterated
    }
}

/// Compares `(f^k)_* O(D)` with `f_*` applied `k` times, as class multisets.
pub fn iterate_coherence(
    endo: &ToricEndomorphism,
    pic: &PicLattice,
    d: &TorusDivisor,
    k: usize,
) -> Result<CoherenceReport> {
    let power = iterate(endo, k)?;
    let direct = decompose_pushforward(&power, pic, d)?.classes();

    let mut layer = vec![d.clone()];
    for _ in 0..k {
        let mut next = Vec::new();
        for div in &layer {
            for c in decompose_pushforward(endo, pic, div)?.classes() {
                next.push(pic.lift(&c));
            }
        }
        layer = next;
    }
    let mut iterated: Vec<DivisorClass> = layer.iter().map(|x| pic.class_of(x)).collect();
    iterated.sort();
    Ok(CoherenceReport { direct, iterated })
}
