use num_traits::{One, Zero};
use pso_core::exact::{rat, Poly, Rational, Var};
use pso_core::fourier::{annihilates_gaussian, psi};
use pso_core::hermite::{hermite, to_hermite};
use pso_core::pso::{
    basis_decompose, basis_element, cofactor_of_basis, divide_by_g, exact_zero_expectation, is_member, make_operator,
    perturb_constant, random_member, random_operator, stein_generator, Family, MemberBounds,
};
use pso_core::verify::{exact_expectation, DistributionSpec};
use pso_core::weyl::WeylElement;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Op = WeylElement<Rational>;

/// Moment oracle: `S` is a Gaussian Stein operator iff `E[S x^j] = 0` for
/// every `j`. Since `E[S f] = E[f r]` for the residual `r`, it suffices to
/// check `j <= deg(coefficients) + order`.
fn moment_oracle(s: &Op) -> bool {
    let bound = s.var_degree().unwrap_or(0) + s.d_order().unwrap_or(0) + 1;
    let gauss = DistributionSpec::standard_gaussian();
    (0..=bound).all(|j| {
        let f = Poly::monomial(Var::X, Rational::one(), j);
        exact_expectation(&s.apply(&f).unwrap(), &gauss).unwrap().is_zero()
    })
}

fn three_way(s: &Op) -> (bool, bool, bool) {
    let delta = is_member(s).unwrap().is_member;
    let division = divide_by_g(s).unwrap().remainder.is_zero();
    let fourier = annihilates_gaussian(&psi(s).unwrap()).unwrap();
    (delta, division, fourier)
}

#[test]
fn three_way_equivalence_on_members() {
    for seed in 0..500 {
        let s = random_member(seed, MemberBounds::default());
        assert_eq!(three_way(&s), (true, true, true), "seed {seed}: {s}");
    }
}

#[test]
fn three_way_equivalence_on_non_members() {
    let mut count = 0;
    let mut seed = 10_000;
    while count < 500 {
        // Alternate perturbed members with unstructured operators.
        let s = if count % 2 == 0 {
            perturb_constant(&random_member(seed, MemberBounds::default()))
        } else {
            random_operator(seed, 4, 4)
        };
        seed += 1;
        if s.is_zero() || moment_oracle(&s) {
            continue;
        }
        assert_eq!(three_way(&s), (false, false, false), "seed {seed}: {s}");
        count += 1;
    }
}

#[test]
fn moment_oracle_agrees_with_delta_criterion() {
    for seed in 0..200 {
        let s = random_operator(seed, 3, 3);
        assert_eq!(is_member(&s).unwrap().is_member, moment_oracle(&s), "seed {seed}: {s}");
        let m = random_member(seed, MemberBounds { max_k: 3, max_t: 3, max_terms: 3 });
        assert!(moment_oracle(&m), "seed {seed}: {m}");
    }
}

#[test]
fn reconstruction_and_factorization_for_members() {
    let g = stein_generator();
    for seed in 0..200 {
        let s = random_member(seed, MemberBounds::default());
        assert_eq!(basis_decompose(&s).unwrap().expand(), s, "seed {seed}");
        let fact = divide_by_g(&s).unwrap();
        assert!(fact.remainder.is_zero());
        assert_eq!(&g * &fact.cofactor, s);
    }
}

#[test]
fn factorization_is_exact_for_any_operator() {
    let g = stein_generator();
    for seed in 0..300 {
        let s = random_operator(seed, 5, 5);
        let fact = divide_by_g(&s).unwrap();
        assert_eq!(&(&g * &fact.cofactor) + &WeylElement::from_poly(&fact.remainder), s, "seed {seed}");
    }
}

#[test]
fn basis_and_cofactors_for_small_indices() {
    let g = stein_generator();
    let mut conventions = std::collections::BTreeSet::new();
    for k in 0..=12 {
        for t in 1..=12 - k {
            let s = basis_element(k, t);
            assert_eq!(basis_decompose(&s).unwrap().expand(), s);
            let (q, conv) = cofactor_of_basis(k, t).unwrap();
            assert_eq!(&g * &q, s, "k = {k}, t = {t}");
            conventions.insert(conv.to_string());
        }
    }
    assert_eq!(conventions.len(), 1, "a single cofactor convention should pass: {conventions:?}");
}

#[test]
fn zero_expectation_on_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..20 {
        let s = random_member(seed, MemberBounds::default());
        for _ in 0..100 {
            let deg = rng.gen_range(0..=12);
            let f = Poly::new(Var::X, (0..=deg).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=7))).collect());
            assert!(exact_zero_expectation(&s, &f).unwrap().is_zero());
        }
    }
}

#[test]
fn right_ideal_property() {
    for seed in 0..100 {
        let s = random_member(seed, MemberBounds { max_k: 3, max_t: 3, max_terms: 3 });
        let a = random_operator(seed + 5_000, 3, 3);
        assert!(is_member(&(&s * &a)).unwrap().is_member, "seed {seed}");
    }
    let x = Op::variable(Var::X);
    assert!(!is_member(&(&x * &stein_generator())).unwrap().is_member);
}

#[test]
fn named_families_are_members() {
    let mut families = vec![Family::Generator];
    families.extend((1..=10).map(|m| Family::FirstOrderHermite { m }));
    families.extend((1..=8).map(|m| Family::HigherOrderHermite { m }));
    for k in 0..=6 {
        families.extend((1..=6).map(|t| Family::Basis { k, t }));
    }
    families.extend((0..=8).map(|n| Family::MonomialFirstOrder { n }));
    families.extend((1..=8).map(|m| Family::Rodriguez { m }));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let target = families.len() + 50;
    while families.len() < target {
        let deg = rng.gen_range(0..=6);
        let p = Poly::new(Var::X, (0..=deg).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect());
        if !p.is_zero() {
            families.push(Family::FirstOrder { p });
        }
    }
    for family in &families {
        let s = make_operator(family).unwrap();
        assert!(!s.is_zero(), "{family:?}");
        assert!(is_member(&s).unwrap().is_member, "{family:?}: {s}");
        assert!(moment_oracle(&s), "{family:?}");
    }
}

#[test]
fn hermite_basis_oracle() {
    // Independent check of the Hermite basis via coefficient extraction.
    for n in 0..=20 {
        let h = to_hermite(&hermite(n)).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.get(n), Rational::one());
    }
}
