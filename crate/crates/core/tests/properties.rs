use flagsos::flags::{edge_density, pair_density_table};
use flagsos::graph::{canonical_form, contains_induced, enumerate_a_free, enumerate_flags, is_isomorphic, labeled_a_free, pair_count, Graph, IntersectionType};
use flagsos::par;
use flagsos::perm::{Permutation, PermGroup};
use flagsos::poly::{coeff_equal, Monomial, MultilinearPoly, PolyJson};
use flagsos::rational::{frac, int, parse, to_string, Rational};
use flagsos::sdp::{assemble_flag_sdp, ldl_psd, Certificate, SolverOptions};
use flagsos::symrep::character::multilinear_dimension;
use flagsos::symrep::{multiplicity, partitions};
use flagsos::verify::{self, IdentityClaim, IdentityMode};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::from_images(v).unwrap())
}

fn graph_and_perm(max_n: usize) -> impl Strategy<Value = (Graph, Permutation)> {
    (2..=max_n).prop_flat_map(|n| {
        let full = (1u64 << pair_count(n)) - 1;
        (0..=full, perm(n)).prop_map(move |(m, p)| (Graph::from_mask(n, m), p))
    })
}

/// Small polynomial in `x_e`, `e < C(n,2)`, degree ≤ 3, integer coefficients.
fn poly(n: usize) -> impl Strategy<Value = MultilinearPoly> {
    let pc = pair_count(n);
    prop::collection::vec((prop::collection::vec(0..pc, 0..=3), -4i64..=4), 0..6).prop_map(move |terms| {
        MultilinearPoly::from_terms(
            n,
            terms.into_iter().map(|(vars, c)| (Monomial(vars.iter().fold(0u64, |a, &v| a | 1 << v)), int(c))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_a_class_invariant((g, p) in graph_and_perm(7)) {
        let h = g.permute(&p);
        prop_assert_eq!(canonical_form(&g).unwrap(), canonical_form(&h).unwrap());
        prop_assert!(is_isomorphic(&g, &h).unwrap());
        prop_assert_eq!(g.edge_count(), h.edge_count());
        let k3 = Graph::complete(3);
        prop_assert_eq!(contains_induced(&g, &k3), contains_induced(&h, &k3));
    }

    #[test]
    fn action_is_a_ring_homomorphism(p in poly(5), q in poly(5), s in perm(5)) {
        let lhs = p.mul_poly(&q).act(&s);
        let rhs = p.act(&s).mul_poly(&q.act(&s));
        prop_assert_eq!(lhs, rhs);
        let mut sum = p.clone();
        sum.add_scaled(&q, &Rational::one());
        let mut acted = p.act(&s);
        acted.add_scaled(&q.act(&s), &Rational::one());
        prop_assert_eq!(sum.act(&s), acted);
    }

    #[test]
    fn products_evaluate_pointwise(p in poly(4), q in poly(4), bits in 0u64..64) {
        prop_assert_eq!(p.mul_poly(&q).eval_bits(bits), p.eval_bits(bits) * q.eval_bits(bits));
    }

    #[test]
    fn symmetrization_is_invariant_and_idempotent(p in poly(4)) {
        let s = p.symmetrize_full();
        prop_assert!(s.is_invariant(&PermGroup::symmetric(4)));
        prop_assert_eq!(s.symmetrize_full(), s);
    }

    #[test]
    fn coefficient_equality_implies_ideal_equality(p in poly(5), r in poly(5)) {
        let k3 = Graph::complete(3);
        // x12 x13 x23 lies in the ideal, so adding a multiple of it is invisible on the zero set
        let tri = MultilinearPoly::var(5, 0, 1).mul_poly(&MultilinearPoly::var(5, 0, 2)).mul_poly(&MultilinearPoly::var(5, 1, 2));
        let mut shifted = p.clone();
        shifted.add_scaled(&tri.mul_poly(&r), &Rational::one());
        for mode in [IdentityMode::ExactCoefficient, IdentityMode::ModIdeal] {
            let claim = IdentityClaim { lhs: p.clone(), rhs: p.clone(), n: 5, forbidden: k3, mode };
            prop_assert!(verify::verify_identity(&claim).unwrap().holds);
        }
        let claim = IdentityClaim { lhs: p.clone(), rhs: shifted.clone(), n: 5, forbidden: k3, mode: IdentityMode::ModIdeal };
        prop_assert!(verify::verify_identity(&claim).unwrap().holds);
        let claim = IdentityClaim { lhs: p.clone(), rhs: shifted.clone(), n: 5, forbidden: k3, mode: IdentityMode::ExactCoefficient };
        prop_assert_eq!(verify::verify_identity(&claim).unwrap().holds, coeff_equal(&p, &shifted));
    }

    #[test]
    fn polynomial_json_round_trip(p in poly(5)) {
        let s = serde_json::to_string(&p.to_json()).unwrap();
        let back: PolyJson = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back.to_poly().unwrap(), p);
    }

    #[test]
    fn rational_text_round_trip(a in -10_000i64..10_000, b in 1i64..10_000) {
        let r = frac(a, b);
        prop_assert_eq!(parse(&to_string(&r)).unwrap(), r);
    }

    #[test]
    fn ldl_agrees_with_eigenvalues(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..4), shift in 0i64..4) {
        // B Bᵀ − shift·I for a 4×k integer B
        let k = rows.len();
        let m: Vec<Vec<Rational>> = (0..4)
            .map(|i| (0..4).map(|j| {
                let dot: i64 = (0..k).map(|r| rows[r][i] * rows[r][j]).sum();
                int(dot - if i == j { shift } else { 0 })
            }).collect())
            .collect();
        let report = ldl_psd(&m).unwrap();
        let f = nalgebra::DMatrix::from_fn(4, 4, |i, j| flagsos::rational::to_f64(&m[i][j]));
        let min = f.symmetric_eigenvalues().min();
        if min > 1e-9 {
            prop_assert!(report.psd);
        } else if min < -1e-9 {
            prop_assert!(!report.psd);
        }
        if shift == 0 {
            prop_assert!(report.psd);
            prop_assert!(report.rank <= k);
        }
    }
}

#[test]
fn multiplicities_fill_the_degree_space() {
    for n in 2..=6 {
        for d in 0..=2 {
            let total: u64 = partitions(n).iter().map(|l| multiplicity(l, n, d).unwrap() * l.dimension()).sum();
            assert_eq!(total, multilinear_dimension(n, d), "n={n} d={d}");
        }
    }
}

#[test]
fn pair_densities_are_a_distribution() {
    let k3 = Graph::complete(3);
    let ty = IntersectionType::vertex();
    for (f, m) in [(2, 3), (2, 4), (3, 5)] {
        let flags = enumerate_flags(&ty, f, &k3).unwrap();
        let hosts = enumerate_a_free(m, &k3).unwrap();
        let table = pair_density_table(&flags, &hosts).unwrap();
        for h in 0..hosts.len() {
            let mut s = Rational::zero();
            for i in 0..flags.len() {
                for j in 0..flags.len() {
                    assert_eq!(table.entries[i][j][h], table.entries[j][i][h]);
                    assert!(!table.entries[i][j][h].is_negative());
                    s += &table.entries[i][j][h];
                }
            }
            assert_eq!(s, Rational::one(), "f={f} m={m} host {h}");
        }
    }
}

#[test]
fn parallel_and_sequential_agree() {
    let k3 = Graph::complete(3);
    let k4 = Graph::complete(4);
    let run = || {
        let zs = labeled_a_free(6, &k3).unwrap();
        let hosts = enumerate_a_free(6, &k4).unwrap();
        let flags = enumerate_flags(&IntersectionType::vertex(), 3, &k3).unwrap();
        let table = pair_density_table(&flags, &enumerate_a_free(5, &k3).unwrap()).unwrap();
        (zs, hosts, table)
    };
    par::set_parallel(false);
    let seq = run();
    par::set_parallel(true);
    let par_ = run();
    assert_eq!(seq, par_);
    assert_eq!(seq.0.len(), 5789);
}

#[test]
fn edge_density_matches_graph_density_on_labeled_graphs() {
    let k3 = Graph::complete(3);
    let e = edge_density(5);
    for v in labeled_a_free(5, &k3).unwrap() {
        let g = v.graph();
        assert_eq!(e.evaluate(&v).unwrap(), frac(g.edge_count() as i64, 10));
    }
}

#[test]
fn certificate_json_round_trip_and_reverification() {
    let inst = assemble_flag_sdp(&IntersectionType::vertex(), 2, 3, &Graph::complete(3)).unwrap();
    let sol = inst.solve(&SolverOptions::default()).unwrap();
    let (cert, report) = verify::certify_flag(&inst, &sol, 10_000).unwrap();
    assert!(report.passed);
    let back = Certificate::from_json(&cert.to_json().unwrap()).unwrap();
    assert_eq!(back.to_json().unwrap(), cert.to_json().unwrap());
    assert!(verify::verify_certificate(&back, None).unwrap().passed());
}
