use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use toricpf::divisor::{class_group, h0, positivity, DivisorClass, Positivity, TorusDivisor};
use toricpf::endo::{build_endo, compose, multiplication, pullback_matrix, ToricEndomorphism};
use toricpf::fan::{standard_fan, Fan};
use toricpf::lattice::{coset_representatives, smith_normal_form, IntMatrix, IntVector, QuotientLattice};
use toricpf::pushforward::{decompose_pushforward, decompose_with_cosets};

const FANS: [&str; 7] = ["P1", "P2", "P3", "P1xP1", "F1", "F2", "F3"];

fn big(v: &[i64]) -> IntVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn square(max_n: usize, range: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-range..=range, n * n).prop_map(move |flat| {
            IntMatrix::from_rows(&flat.chunks(n).map(<[i64]>::to_vec).collect::<Vec<_>>()).unwrap()
        })
    })
}

fn nonsingular(max_n: usize, range: i64) -> impl Strategy<Value = IntMatrix> {
    square(max_n, range).prop_filter("nonsingular", |m| !m.determinant().is_zero())
}

/// A unimodular matrix as a product of elementary row operations.
fn unimodular(n: usize, steps: Vec<(usize, usize, i64, bool)>) -> IntMatrix {
    let mut g = IntMatrix::identity(n);
    for (i, j, k, flip) in steps {
        let (i, j) = (i % n, j % n);
        let mut e = IntMatrix::identity(n);
        if i != j {
            e.set(i, j, BigInt::from(k));
        } else if flip {
            e.set(i, i, -BigInt::one());
        }
        g = e.mul(&g);
    }
    g
}

/// Applies `g` to every ray and reorders rays by `order` (a permutation).
fn transform(fan: &Fan, g: &IntMatrix, order: &[usize]) -> Fan {
    let rays: Vec<IntVector> = order.iter().map(|&old| g.mul_vec(fan.ray(old))).collect();
    let mut new_index = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let cones = fan
        .cones()
        .iter()
        .map(|c| c.iter().map(|&r| new_index[r]).collect())
        .collect();
    Fan::new(fan.dim(), rays, cones).unwrap()
}

fn fan_with_divisor(range: i64) -> impl Strategy<Value = (Fan, TorusDivisor)> {
    prop::sample::select(FANS.to_vec()).prop_flat_map(move |name| {
        let fan = standard_fan(name).unwrap();
        let k = fan.num_rays();
        prop::collection::vec(-range..=range, k)
            .prop_map(move |c| (fan.clone(), TorusDivisor::from_i64(&c)))
    })
}

/// Endomorphisms of a few fans beyond scalar multiplication.
fn endos_of(name: &str) -> Vec<ToricEndomorphism> {
    let fan = standard_fan(name).unwrap();
    let mut out = vec![multiplication(&fan, 1).unwrap(), multiplication(&fan, 2).unwrap(), multiplication(&fan, 3).unwrap()];
    let extra: Vec<Vec<Vec<i64>>> = match name {
        "P1xP1" => vec![
            vec![vec![0, 1], vec![2, 0]],
            vec![vec![2, 0], vec![0, 3]],
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![-1, 0], vec![0, 2]],
        ],
        "P2" => vec![vec![vec![0, 1], vec![1, 0]], vec![vec![0, -1], vec![1, -1]], vec![vec![0, -2], vec![2, -2]]],
        _ => vec![],
    };
    for m in extra {
        out.push(build_endo(&fan, IntMatrix::from_rows(&m).unwrap()).unwrap());
    }
    out
}

fn shifted(classes: &[DivisorClass], e: &DivisorClass) -> Vec<DivisorClass> {
    let mut v: Vec<DivisorClass> = classes.iter().map(|c| c.add(e)).collect();
    v.sort();
    v
}

proptest! {
    #[test]
    fn smith_form_invariants(a in square(4, 6)) {
        let snf = smith_normal_form(&a);
        prop_assert!(snf.u.is_unimodular());
        prop_assert!(snf.v.is_unimodular());
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.s.clone());
        prop_assert!(snf.s.is_diagonal());
        let d = snf.invariant_factors();
        let r = snf.rank();
        prop_assert!(d[..r].iter().all(|x| x.is_positive()));
        prop_assert!(d[r..].iter().all(|x| x.is_zero()));
        for w in d[..r].windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        // rank agrees with the determinant test on square input
        prop_assert_eq!(r == a.rows(), !a.determinant().is_zero());
    }

    #[test]
    fn coset_reduction_is_idempotent(a in nonsingular(3, 5), x in prop::collection::vec(-20i64..=20, 3)) {
        let q = QuotientLattice::new(&a).unwrap();
        let x = big(&x[..q.dim()]);
        let r = q.reduce(&x);
        prop_assert_eq!(q.reduce(&r), r.clone());
        // x - r lies in A Z^n
        let diff: IntVector = x.iter().zip(&r).map(|(a, b)| a - b).collect();
        prop_assert!(q.same_coset(&diff, &vec![BigInt::zero(); q.dim()]));
        let reps = q.representatives();
        prop_assert_eq!(BigInt::from(reps.len()), a.determinant().abs());
        prop_assert!(reps.contains(&r));
    }

    #[test]
    fn validity_invariant_under_lattice_automorphisms(
        name in prop::sample::select(FANS.to_vec()),
        steps in prop::collection::vec((0usize..3, 0usize..3, -2i64..=2, any::<bool>()), 0..6),
        seed in any::<u64>(),
        coeffs in prop::collection::vec(-2i64..=2, 6),
    ) {
        let fan = standard_fan(name).unwrap();
        let g = unimodular(fan.dim(), steps);
        let k = fan.num_rays();
        let mut order: Vec<usize> = (0..k).collect();
        // deterministic shuffle from the seed
        let mut s = seed;
        for i in (1..k).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let moved = transform(&fan, &g, &order);
        prop_assert_eq!(moved.report(), fan.report());
        let pic = class_group(&moved).unwrap();
        prop_assert_eq!(pic.rank(), k - fan.dim());
        let d = TorusDivisor::from_i64(&coeffs[..k]);
        let d_moved = TorusDivisor(order.iter().map(|&old| d.coeffs()[old].clone()).collect());
        prop_assert_eq!(h0(&moved, &d_moved).unwrap(), h0(&fan, &d).unwrap());
        prop_assert_eq!(positivity(&moved, &d_moved).unwrap(), positivity(&fan, &d).unwrap());
    }

    #[test]
    fn sections_depend_only_on_class((fan, d) in fan_with_divisor(3), m in prop::collection::vec(-3i64..=3, 3)) {
        let m = big(&m[..fan.dim()]);
        let moved = d.add(&TorusDivisor::principal(&fan, &m));
        let pic = class_group(&fan).unwrap();
        prop_assert_eq!(pic.class_of(&moved), pic.class_of(&d));
        prop_assert_eq!(h0(&fan, &moved).unwrap(), h0(&fan, &d).unwrap());
        prop_assert_eq!(positivity(&fan, &moved).unwrap(), positivity(&fan, &d).unwrap());
    }

    #[test]
    fn nef_and_ample_cones_are_closed(
        (fan, a) in fan_with_divisor(3),
        b in prop::collection::vec(-3i64..=3, 6),
        k in 1i64..=4,
    ) {
        let b = TorusDivisor::from_i64(&b[..fan.num_rays()]);
        let pa = positivity(&fan, &a).unwrap();
        let pb = positivity(&fan, &b).unwrap();
        let sum = positivity(&fan, &a.add(&b)).unwrap();
        if pa != Positivity::NotNef && pb != Positivity::NotNef {
            prop_assert_ne!(sum, Positivity::NotNef);
        }
        if pa == Positivity::Ample && pb != Positivity::NotNef {
            prop_assert_eq!(sum, Positivity::Ample);
        }
        prop_assert_eq!(positivity(&fan, &a.scale(&BigInt::from(k))).unwrap(), pa);
        // ample classes have sections
        if pa == Positivity::Ample {
            prop_assert!(h0(&fan, &a).unwrap() > 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pushforward_is_twist_equivariant(
        name in prop::sample::select(FANS.to_vec()),
        which in 0usize..8,
        d in prop::collection::vec(-2i64..=2, 6),
        e in prop::collection::vec(-2i64..=2, 2),
    ) {
        let fan = standard_fan(name).unwrap();
        let pic = class_group(&fan).unwrap();
        let endos = endos_of(name);
        let endo = &endos[which % endos.len()];
        let d = TorusDivisor::from_i64(&d[..fan.num_rays()]);
        let e = DivisorClass::from_i64(&e[..pic.rank()]);
        let base = decompose_pushforward(endo, &pic, &d).unwrap().classes();
        let twisted_d = d.add(&endo.pullback_divisor(&pic.lift(&e)));
        let twisted = decompose_pushforward(endo, &pic, &twisted_d).unwrap().classes();
        prop_assert_eq!(twisted, shifted(&base, &e));
    }

    #[test]
    fn decomposition_ignores_choice_of_coset_representatives(
        name in prop::sample::select(FANS.to_vec()),
        which in 0usize..8,
        d in prop::collection::vec(-2i64..=2, 6),
        shifts in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 81),
    ) {
        let fan = standard_fan(name).unwrap();
        let pic = class_group(&fan).unwrap();
        let endos = endos_of(name);
        let endo = &endos[which % endos.len()];
        let d = TorusDivisor::from_i64(&d[..fan.num_rays()]);
        let ft = endo.matrix().transpose();
        let reps = coset_representatives(&ft).unwrap();
        let moved: Vec<IntVector> = reps
            .iter()
            .zip(shifts.iter().cycle())
            .map(|(u, s)| {
                let off = ft.mul_vec(&big(&s[..fan.dim()]));
                u.iter().zip(&off).map(|(a, b)| a + b).collect()
            })
            .collect();
        let canonical = decompose_pushforward(endo, &pic, &d).unwrap().classes();
        let other = decompose_with_cosets(endo, &pic, &d, &moved).classes();
        prop_assert_eq!(other, canonical);
    }

    #[test]
    fn pullback_is_contravariant(
        name in prop::sample::select(vec!["P1", "P2", "P1xP1", "F1", "F2"]),
        i in 0usize..8,
        j in 0usize..8,
    ) {
        let fan = standard_fan(name).unwrap();
        let pic = class_group(&fan).unwrap();
        let endos = endos_of(name);
        let a = &endos[i % endos.len()];
        let b = &endos[j % endos.len()];
        let ab = compose(a, b).unwrap();
        prop_assert_eq!(
            pullback_matrix(&ab, &pic),
            pullback_matrix(b, &pic).mul(&pullback_matrix(a, &pic))
        );
        prop_assert_eq!(ab.degree(), a.degree() * b.degree());
    }
}
