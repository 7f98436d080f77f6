use num_traits::Zero;
use pso_core::exact::{int, rat, Poly, Rational, Var};
use pso_core::fourier::{annihilates, CfFamily};
use pso_core::ore::{
    centred_gaussian_annihilator, intersection_operator, lclm, mixture_annihilator, mixture_stein_operator,
    semicircle_annihilator, stein_from_annihilator, MixtureSpec,
};
use pso_core::pso::{exact_zero_expectation, is_member, stein_generator};
use pso_core::verify::{exact_expectation, DistributionSpec};
use pso_core::weyl::{Monomial, WeylElement};
use pso_core::OrePoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type O = OrePoly<Rational>;

fn random_ore(rng: &mut ChaCha8Rng, order: usize, max_deg: usize) -> O {
    loop {
        let mut terms = Vec::new();
        for k in 0..=order {
            for n in 0..=max_deg {
                if rng.gen_bool(0.5) {
                    terms.push((Monomial::new(n, k), rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))));
                }
            }
        }
        let lead_deg = rng.gen_range(0..=max_deg);
        terms.push((Monomial::new(lead_deg, order), rat(rng.gen_range(1..=5), 1)));
        let w = WeylElement::from_terms(Var::T, terms);
        if w.d_order() == Some(order) {
            return O::from_weyl(&w);
        }
    }
}

/// Right extended Euclid: `r_i = s_i a + t_i b`; when the remainder vanishes,
/// `s a` is a least common left multiple.
fn euclid_lclm(a: &O, b: &O) -> O {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (O::one(Var::T), O::zero(Var::T));
    while !r1.is_zero() {
        let (q, r) = r0.right_divide(&r1).unwrap();
        let s2 = &s0 - &(&q * &s1);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s2);
    }
    (&s1 * a).make_monic()
}

#[test]
fn division_on_300_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..300 {
        let order = rng.gen_range(0..=4);
        let a = random_ore(&mut rng, order, 4);
        let order = rng.gen_range(0..=4);
        let b = random_ore(&mut rng, order, 4);
        let (q, r) = a.right_divide(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a, "trial {trial}");
        assert!(r.order().map_or(true, |o| o < b.order().unwrap()), "trial {trial}");
    }
}

#[test]
fn lclm_matches_euclidean_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for trial in 0..60 {
        let order = rng.gen_range(1..=2);
        let a = random_ore(&mut rng, order, 2);
        let order = rng.gen_range(1..=2);
        let b = random_ore(&mut rng, order, 2);
        let l = lclm(&a, &b).unwrap();
        assert!(l.right_divide(&a).unwrap().1.is_zero());
        assert!(l.right_divide(&b).unwrap().1.is_zero());
        assert_eq!(l, euclid_lclm(&a, &b), "trial {trial}");
    }
}

#[test]
fn lclm_with_common_right_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let g = random_ore(&mut rng, 1, 2);
        let a = &random_ore(&mut rng, 1, 1) * &g;
        let b = &random_ore(&mut rng, 1, 1) * &g;
        let l = lclm(&a, &b).unwrap();
        assert_eq!(l, euclid_lclm(&a, &b));
        assert!(l.order().unwrap() <= 3);
    }
}

fn px(coeffs: &[Rational]) -> Poly<Rational> {
    Poly::new(Var::X, coeffs.to_vec())
}

fn random_polys(seed: u64, count: usize, max_deg: usize) -> Vec<Poly<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let deg = rng.gen_range(0..=max_deg);
            px(&(0..=deg).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect::<Vec<_>>())
        })
        .collect()
}

#[test]
fn mixture_weight_independence_and_zero_expectation() {
    let variances = vec![int(1), int(2)];
    let weightings = [[rat(3, 10), rat(7, 10)], [rat(1, 2), rat(1, 2)], [rat(9, 10), rat(1, 10)]];
    let ops: Vec<String> = weightings
        .iter()
        .map(|w| mixture_stein_operator(&MixtureSpec::new(variances.clone(), w.to_vec()).unwrap()).unwrap().to_string())
        .collect();
    assert!(ops.windows(2).all(|w| w[0] == w[1]), "{ops:?}");

    let s = mixture_stein_operator(&MixtureSpec::with_equal_weights(variances.clone()).unwrap()).unwrap();
    assert!(is_member(&s).unwrap().is_member);
    for f in random_polys(31, 60, 12) {
        assert!(exact_zero_expectation(&s, &f).unwrap().is_zero());
        for w in &weightings {
            let dist = DistributionSpec::mixture(w.to_vec(), variances.clone()).unwrap();
            assert!(exact_expectation(&s.apply(&f).unwrap(), &dist).unwrap().is_zero());
        }
    }
}

#[test]
fn mixture_annihilators_have_full_order() {
    let sets: Vec<Vec<Rational>> = vec![
        vec![int(1)],
        vec![int(1), int(3)],
        vec![rat(1, 2), int(1), int(2)],
        vec![int(1), int(2), int(3), int(4)],
        vec![rat(1, 3), rat(2, 3), int(5), int(7)],
    ];
    for variances in sets {
        let spec = MixtureSpec::with_equal_weights(variances.clone()).unwrap();
        let a = mixture_annihilator(&spec).unwrap();
        assert_eq!(a.d_order(), Some(variances.len()), "{variances:?}");
        for v in &variances {
            let cf = CfFamily::new(v.clone(), Rational::zero()).unwrap();
            assert!(annihilates(&a, &cf).unwrap());
        }
        // A Stein operator for N(0, 1) only when variance 1 is a component.
        let s = mixture_stein_operator(&spec).unwrap();
        assert_eq!(is_member(&s).unwrap().is_member, variances.contains(&int(1)), "{variances:?}");
    }
}

#[test]
fn duplicate_variances_are_rejected() {
    assert!(MixtureSpec::with_equal_weights(vec![int(1), int(1)]).is_err());
}

#[test]
fn intersection_with_semicircle_has_zero_polynomial_expectations() {
    let s = intersection_operator(&semicircle_annihilator(&int(1))).unwrap();
    assert!(!s.is_zero());
    assert!(is_member(&s).unwrap().is_member);
    let semi = DistributionSpec::semicircle(int(1)).unwrap();
    let gauss = DistributionSpec::standard_gaussian();
    for n in 0..=12 {
        let f = Poly::monomial(Var::X, Rational::from_integer(1.into()), n);
        let sf = s.apply(&f).unwrap();
        assert!(exact_expectation(&sf, &gauss).unwrap().is_zero(), "gaussian, degree {n}");
        assert!(exact_expectation(&sf, &semi).unwrap().is_zero(), "semicircle, degree {n}");
    }
}

#[test]
fn intersection_for_other_radii() {
    for r in [rat(1, 2), int(2), int(3)] {
        let s = intersection_operator(&semicircle_annihilator(&r)).unwrap();
        let semi = DistributionSpec::semicircle(r.clone()).unwrap();
        for n in 0..=10 {
            let f = Poly::monomial(Var::X, Rational::from_integer(1.into()), n);
            assert!(exact_expectation(&s.apply(&f).unwrap(), &semi).unwrap().is_zero(), "r = {r}, degree {n}");
        }
        assert!(is_member(&s).unwrap().is_member);
    }
}

#[test]
fn gaussian_with_itself_is_the_generator() {
    let a = centred_gaussian_annihilator(&int(1));
    let joint = pso_core::ore::joint_annihilator(&[a.clone(), a.clone()]).unwrap();
    assert_eq!(joint.d_order(), Some(1));
    assert_eq!(stein_from_annihilator(&joint).unwrap(), stein_generator());
}
