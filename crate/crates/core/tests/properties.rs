//! Cross-module properties: window soundness, exactness of restriction,
//! well-definedness of derived extension, K-flatness probes and transversal
//! intersections.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use koszul_lab::bigraded::{restrict_table, Bidegree, Table, Window};
use koszul_lab::cli::corpus::{self, id_complex, random_finite};
use koszul_lab::cli::verify::line_into_plane;
use koszul_lab::dgmod::{
    cone, direct_sum, extend_scalars, free_module, identity_map, restrict_scalars, semifree_resolution,
    unit_module,
};
use koszul_lab::geometry::{
    derived_intersection_cohomology, exchange_tables, honest_intersection_table, phi_functors, SubbundleSetup,
};
use koszul_lab::koszul::{functor_a, functor_b, kflat_probe, KoszulContext};
use koszul_lab::linalg::{rank, Matrix, PrimeField, Rationals};

#[test]
fn cohomology_on_a_subwindow_is_the_restriction() {
    let q = Rationals;
    let ctx = KoszulContext::new(&q, id_complex(&q)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let big = Window::of(0, 10);
    let mut modules = vec![free_module(ctx.t.clone(), &[Bidegree::ZERO, Bidegree::new(1, 2)], &big).unwrap()];
    for _ in 0..5 {
        modules.push(random_finite(ctx.t.clone(), &mut rng, &[0, 2, 4]).unwrap());
    }
    for m in &modules {
        let whole = m.table(&big).unwrap();
        for (lo, hi) in [(0, 0), (2, 6), (4, 10)] {
            let sub = Window::of(lo, hi);
            assert_eq!(m.table(&sub).unwrap(), restrict_table(&whole, &sub));
        }
    }
}

#[test]
fn restriction_of_scalars_keeps_tables() {
    let q = Rationals;
    let fun = phi_functors(&q, &line_into_plane(&q).unwrap()).unwrap();
    let t = fun.ctx.t.clone();
    let w = Window::of(0, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let modules = vec![
        free_module(t.clone(), &[Bidegree::ZERO], &w).unwrap(),
        unit_module(t.clone(), Bidegree::new(1, 2)),
        random_finite(t.clone(), &mut rng, &[0, 2]).unwrap(),
    ];
    for m in &modules {
        let r = restrict_scalars(&fun.phi, m).unwrap();
        assert!(r.validate().is_empty());
        assert_eq!(r.table(&m.window).unwrap(), m.table(&m.window).unwrap());
    }
}

#[test]
fn derived_extension_ignores_the_choice_of_resolution() {
    let q = Rationals;
    let fun = phi_functors(&q, &line_into_plane(&q).unwrap()).unwrap();
    let tp = fun.ctx_prime.t.clone();
    let w = Window::of(0, 8);

    // k' and k' ⊕ (acyclic) are quasi-isomorphic
    let tr = corpus::truncated_free(tp.clone(), &[Bidegree::ZERO], 8).unwrap();
    let acyclic = cone(&identity_map(&tr), &tr, &tr).unwrap();
    let mut k = unit_module(tp.clone(), Bidegree::ZERO);
    k.window = acyclic.window;
    let padded = direct_sum(&k, &acyclic).unwrap();
    let extended = |m| {
        let (p, _) = semifree_resolution(m, &w).unwrap();
        extend_scalars(&fun.phi, &p, &w).unwrap().table(&w).unwrap()
    };
    let a = extended(&k);
    assert!(!a.is_empty());
    assert_eq!(a, extended(&padded));

    // a free module: its own presentation against a computed resolution
    let free = free_module(tp.clone(), &[Bidegree::ZERO, Bidegree::new(-1, 2)], &Window::of(0, 12)).unwrap();
    let direct = extend_scalars(&fun.phi, &free, &w).unwrap().table(&w).unwrap();
    let mut bare = free.clone();
    bare.presentation = None;
    assert_eq!(extended(&bare), direct);
}

#[test]
fn acyclic_inputs_stay_acyclic() {
    let f = PrimeField::new(5).unwrap();
    let ctx = KoszulContext::new(&f, id_complex(&f)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let w = Window::of(-8, 0);
    for _ in 0..4 {
        let m = random_finite(ctx.t.clone(), &mut rng, &[0, 2]).unwrap();
        let n = random_finite(ctx.s.clone(), &mut rng, &[0, -2]).unwrap();
        let am = cone(&identity_map(&m), &m, &m).unwrap();
        let an = cone(&identity_map(&n), &n, &n).unwrap();
        assert!(functor_a(&ctx, &am, &w).unwrap().module.table(&w).unwrap().is_empty());
        assert!(functor_b(&ctx, &an, &w.negated()).unwrap().module.table(&w.negated()).unwrap().is_empty());
        let probe = kflat_probe(&ctx, &an, &m, &w).unwrap();
        assert!(probe.validate().is_empty());
        assert!(probe.table(&w).unwrap().is_empty());
    }
}

/// `E = F1 ⊕ F2` from a random invertible matrix split into column blocks.
fn complementary(rng: &mut ChaCha8Rng, d: usize) -> SubbundleSetup<num_rational::BigRational> {
    let q = Rationals;
    loop {
        let m = corpus::random_matrix(&q, rng, d, d);
        if rank(&q, &m) < d {
            continue;
        }
        let k = rng.gen_range(0..=d);
        let cols: Vec<usize> = (0..d).collect();
        let (a, b) = cols.split_at(k);
        return SubbundleSetup::new(&q, d, m.select_columns(a), m.select_columns(b)).unwrap();
    }
}

#[test]
fn transversal_intersections_are_classical() {
    let q = Rationals;
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let w = Window::of(-8, 8);
    let point: Table = [(Bidegree::ZERO, 1)].into_iter().collect();
    for d in 1..=3 {
        for _ in 0..3 {
            let s = complementary(&mut rng, d);
            let t_side = derived_intersection_cohomology(&q, &s, &w).unwrap().dims;
            assert!(t_side.keys().all(|b| b.i == 0));
            assert_eq!(t_side, honest_intersection_table(&q, &s, &w).unwrap());
            assert_eq!(t_side, point);
            let (kk, dual) = exchange_tables(&q, &s, &w.negated()).unwrap();
            assert!(dual.keys().all(|b| b.i == 0));
            assert_eq!(kk, point);
            assert_eq!(dual, point);
        }
    }
    // F1 + F2 = E with a line in common: Sym of a line, all in degree 0
    let e = |rows: &[Vec<i64>]| Matrix::from_i64(&q, rows);
    let s = SubbundleSetup::new(&q, 3, e(&[vec![1, 0], vec![0, 1], vec![0, 0]]), e(&[vec![1, 0], vec![0, 0], vec![0, 1]])).unwrap();
    let t_side = derived_intersection_cohomology(&q, &s, &w).unwrap().dims;
    let line: Table = (0..=4).map(|m| (Bidegree::new(0, 2 * m), 1)).collect();
    assert_eq!(t_side, line);
}
