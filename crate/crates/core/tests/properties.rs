use num_traits::Zero;
use proptest::prelude::*;

use poisson_core::catalog::{self, bindings, build, build_default, Model, NAMES};
use poisson_core::dynamics::{constants_of_motion_check, hamiltonian_vector_field};
use poisson_core::exterior::{factorial, pfaffian, subset_indices, subsets_of_size, PolyForm};
use poisson_core::geometry::transport_bracket;
use poisson_core::poly::{exp, exp_int, Exponent, Monomial, MonomialMap, PolyExpr, Rational, Vars};
use poisson_core::regularity::theorem31_check;
use poisson_core::structures::{
    bracket_of, generic_rank, jacobian_structure, nambu_bracket, plucker_rank2_test,
    NambuStructure, PoissonStructure,
};
use poisson_core::Execution;

fn vars3() -> Vars {
    Vars::numbered("x", 3)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |r| !r.is_zero())
}

fn poly_with(exponent: impl Strategy<Value = Exponent> + Clone, max_terms: usize) -> impl Strategy<Value = PolyExpr> {
    let term = (small_rational(), proptest::collection::vec(exponent, 3));
    proptest::collection::vec(term, 0..=max_terms).prop_map(|terms| {
        let vars = vars3();
        terms.into_iter().fold(PolyExpr::zero(&vars), |acc, (c, e)| {
            acc + PolyExpr::term(&vars, c, Monomial::from_exponents(e))
        })
    })
}

fn poly3(max_degree: i64) -> impl Strategy<Value = PolyExpr> {
    poly_with((0..=max_degree).prop_map(exp_int), 4)
}

fn laurent3() -> impl Strategy<Value = PolyExpr> {
    poly_with((-4i64..=6, 1i64..=3).prop_map(|(p, q)| exp(p, q)), 3)
}

/// Unimodular exponent matrix from a few elementary row operations.
fn unimodular3() -> impl Strategy<Value = Vec<Vec<Exponent>>> {
    proptest::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..6).prop_map(|ops| {
        let mut m: Vec<Vec<i64>> = (0..3)
            .map(|i| (0..3).map(|j| i64::from(i == j)).collect())
            .collect();
        for (a, b, c) in ops {
            if a != b {
                for j in 0..3 {
                    m[a][j] += c * m[b][j];
                }
            }
        }
        m.into_iter()
            .map(|r| r.into_iter().map(exp_int).collect())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in poly3(2), b in poly3(2), c in poly3(2)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn leibniz_for_partial_derivatives(a in laurent3(), b in laurent3(), i in 0usize..3) {
        let lhs = (&a * &b).partial_derivative(i);
        let rhs = &(&a * &b.partial_derivative(i)) + &(&b * &a.partial_derivative(i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn render_parse_round_trip(a in laurent3()) {
        let text = a.to_string();
        prop_assert_eq!(PolyExpr::parse(&text, a.vars()).unwrap(), a);
    }

    #[test]
    fn substitution_round_trip_unimodular(
        p in poly_with((-2i64..=3).prop_map(exp_int), 4),
        rows in unimodular3(),
        scales in proptest::collection::vec(nonzero_rational(), 3),
    ) {
        let map = MonomialMap::new(vars3(), Vars::numbered("y", 3), rows, scales).unwrap();
        let back = p.substitute(&map).unwrap().substitute(&map.inverse().unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn substitution_round_trip_fractional(p in laurent3(), a in 1i64..=3, b in -2i64..=2, c in 1i64..=3) {
        let rows = vec![
            vec![exp(1, a), exp_int(0), exp(b, 2)],
            vec![exp_int(0), exp_int(1), exp(1, 3)],
            vec![exp_int(0), exp_int(0), exp(c, 2)],
        ];
        let map = MonomialMap::from_rows(vars3(), Vars::numbered("y", 3), rows).unwrap();
        let back = p.substitute(&map).unwrap().substitute(&map.inverse().unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn exact_division_recovers_the_factor(p in poly3(2), q in poly3(2)) {
        prop_assume!(!q.is_zero());
        let d = (&p * &q).exact_divisibility(&q).unwrap();
        prop_assert!(d.divisible);
        prop_assert_eq!(d.quotient, Some(p));
    }

    #[test]
    fn wedge_is_associative(a in poly3(2), b in poly3(2), c in poly3(2), d in poly3(1)) {
        let x = |p: &PolyExpr| PolyForm::differential(p);
        let (fa, fb, fc) = (x(&a), x(&b), x(&c).try_add(&x(&d)).unwrap());
        prop_assert_eq!(fa.wedge(&fb).wedge(&fc), fa.wedge(&fb.wedge(&fc)));
        prop_assert!(fa.wedge(&fa).is_zero());
    }

    #[test]
    fn double_dual_is_identity(a in poly3(2), b in poly3(2)) {
        let f = PolyForm::wedge_of_differentials(a.vars(), &[a.clone(), b.clone()], Execution::Sequential);
        prop_assert_eq!(f.volume_dual().volume_dual(), f);
    }

    #[test]
    fn bracket_leibniz_rule(f in poly3(3), g in poly3(3), h in poly3(2), k in small_rational()) {
        let ps = build("q3", &[("k".into(), k)]).unwrap();
        let ps = ps.poisson().unwrap();
        let lhs = bracket_of(ps, &(&f * &g), &h).unwrap();
        let rhs = &(&f * &bracket_of(ps, &g, &h).unwrap()) + &(&g * &bracket_of(ps, &f, &h).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(bracket_of(ps, &f, &g).unwrap(), -bracket_of(ps, &g, &f).unwrap());
    }

    #[test]
    fn binary_nambu_bracket_is_the_jacobian_bracket(q in poly3(3), lam in nonzero_rational(), f in poly3(2), g in poly3(2)) {
        let vars = vars3();
        let lambda = PolyExpr::constant(&vars, lam);
        let ps = jacobian_structure(&vars, &[q.clone()], &lambda).unwrap();
        let ns = NambuStructure::new(&vars, vec![q], lambda).unwrap();
        prop_assert_eq!(ns.arity(), 2);
        prop_assert_eq!(nambu_bracket(&ns, &[f.clone(), g.clone()]).unwrap(), bracket_of(&ps, &f, &g).unwrap());
    }

    #[test]
    fn jacobian_structures_have_rank_at_most_two(q1 in poly3(2), q2 in poly3(2), lam in nonzero_rational()) {
        let vars = Vars::numbered("x", 4);
        let lift = |p: PolyExpr| p.reindex(&vars).unwrap();
        let x4 = PolyExpr::var(&vars, 3);
        let qs = [&lift(q1) + &(&x4 * &x4), &lift(q2) * &x4];
        let ps = jacobian_structure(&vars, &qs, &PolyExpr::constant(&vars, lam)).unwrap();
        prop_assert!(plucker_rank2_test(&ps).rank_le_2);
    }

    #[test]
    fn casimirs_and_energy_are_conserved(h in poly3(3), k in nonzero_rational()) {
        let inst = build("q3", &[("k".into(), k)]).unwrap();
        let ps = inst.poisson().unwrap();
        let field = hamiltonian_vector_field(ps, &h).unwrap();
        let mut invariants = inst.casimir_polys();
        invariants.push(h);
        for c in constants_of_motion_check(&field, &invariants).unwrap() {
            prop_assert!(c.conserved);
        }
    }
}

#[test]
fn wedge_power_coefficients_are_scaled_pfaffians_on_every_catalog_structure() {
    for name in NAMES {
        let inst = build_default(name).unwrap();
        let Model::Poisson(ps) = &inst.model else { continue };
        let n = ps.dim();
        if n > 6 {
            continue;
        }
        let pi = poisson_core::exterior::PolyMultivector::bivector(ps.vars(), ps.matrix().rows());
        for m in 1..=n / 2 {
            let power = pi.wedge_power(m, Execution::Sequential);
            for s in subsets_of_size(n, 2 * m) {
                let pf = pfaffian(ps.matrix().rows(), &subset_indices(s)).unwrap();
                assert_eq!(power.coefficient(s), pf.scale(&factorial(m)), "{name} m={m}");
            }
        }
    }
}

#[test]
fn plucker_agrees_with_generic_rank_on_the_catalog() {
    for name in NAMES {
        let inst = build_default(name).unwrap();
        let Model::Poisson(ps) = &inst.model else { continue };
        let rank = generic_rank(ps, 4, 3).unwrap();
        assert_eq!(plucker_rank2_test(ps).rank_le_2, rank <= 2, "{name}");
    }
}

#[test]
fn homogeneous_families_have_binding_independent_ratio() {
    for name in ["q3", "sklyanin", "quadrics61", "q5", "markov", "askey_wilson"] {
        let lambdas: Vec<_> = bindings(name)
            .unwrap()
            .iter()
            .map(|b| {
                let inst = build(name, b).unwrap();
                theorem31_check(inst.poisson().unwrap(), &inst.casimir_polys())
                    .unwrap()
                    .lambda
            })
            .collect();
        assert!(lambdas.windows(2).all(|w| w[0] == w[1]), "{name}: {lambdas:?}");
    }
}

#[test]
fn transport_round_trips_and_keeps_casimirs() {
    for map in [catalog::mirror_map_y(), catalog::mirror_map_z()] {
        let inst = build("q3", &[("k".into(), Rational::new(7.into(), 3.into()))]).unwrap();
        let ps = inst.poisson().unwrap();
        let there = transport_bracket(ps.matrix(), &map).unwrap();
        assert!(there.polynomial_grade);
        let moved = there.clone().into_structure().unwrap();
        assert!(poisson_core::structures::check_jacobi(&moved).holds);
        let p = inst.casimirs[0].1.substitute(&map).unwrap();
        assert!(poisson_core::structures::is_casimir(&moved, &p).unwrap());
        let back = transport_bracket(&there.matrix, &map.inverse().unwrap()).unwrap();
        assert_eq!(&back.matrix, ps.matrix());
    }
}

#[test]
fn mirror_brackets_have_the_expected_weighted_degrees() {
    for name in ["mirror_y", "mirror_z"] {
        let inst = build_default(name).unwrap();
        let w = inst.weights.clone().unwrap();
        let p = &inst.casimirs[0].1;
        let shift = p.weighted_degree(&w).unwrap() - w.iter().copied().sum::<Exponent>();
        let ps: &PoissonStructure = inst.poisson().unwrap();
        for (i, j, b) in ps.matrix().upper() {
            assert!(b.is_weighted_homogeneous(&w), "{name}");
            assert_eq!(b.weighted_degree(&w).unwrap(), w[i] + w[j] + shift, "{name} ({i},{j})");
        }
    }
}
