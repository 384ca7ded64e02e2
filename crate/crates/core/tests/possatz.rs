use freesdp::algebra::matrix::cr;
use freesdp::algebra::{CMat, HermitianMatrix, HermitianTuple, NCPolynomial, NCWord};
use freesdp::catalog::{free_cube, scalar_pencil, tv_monic_drop};
use freesdp::free::{drop_membership, drop_polar_membership, PolarForm, Spectrahedrop};
use freesdp::possatz::{expand_certificate, search_certificate, verify_certificate, Certificate};
use freesdp::sdp::{SolveStatus, SolverOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

/// `I − Σ A_j x_j`.
fn linear(a: &HermitianTuple) -> NCPolynomial {
    let mu = a.dim();
    let mut p = NCPolynomial::identity(a.g(), mu);
    for (j, aj) in a.mats().iter().enumerate() {
        p.add_term(NCWord::letter(j), -aj.as_matrix().clone()).unwrap();
    }
    p
}

#[test]
fn constant_one_needs_only_sos() {
    let l = tv_monic_drop().lift().clone();
    let one = NCPolynomial::identity(2, 1);
    let r = search_certificate(&one, &l, 0, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible, "{}", r.message);
    let c = Certificate::new(1, 0, HermitianMatrix::scalar(1.0), HermitianMatrix::zeros(0));
    assert!(expand_certificate(&c, &l).unwrap().max_coefficient_distance(&one) == 0.0);
    assert!(expand_certificate(&Certificate::zero(2, 1, 0), &l).unwrap().is_zero());
}

#[test]
fn tv_linear_certificates_follow_dual_sign() {
    let l = tv_monic_drop().lift().clone();
    let inside = linear(&HermitianTuple::scalars(&[0.5, 0.5]));
    let r = search_certificate(&inside, &l, 0, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible, "{}", r.message);
    let c = r.certificate.unwrap();
    assert!(verify_certificate(&inside, &c, &l).unwrap().valid);
    let outside = linear(&HermitianTuple::scalars(&[1.2, 0.0]));
    let r = search_certificate(&outside, &l, 0, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Infeasible, "{}", r.message);
}

#[test]
fn searched_one_plus_x_verifies() {
    let l = scalar_pencil(1.0, 2.0);
    let p = NCPolynomial::scalar(1, &[(1.0, &[]), (1.0, &[0])]).unwrap();
    let r = search_certificate(&p, &l, 0, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible, "{}", r.message);
    let c = r.certificate.unwrap();
    let e = expand_certificate(&c, &l).unwrap();
    assert!(e.degree() <= 1);
    assert!(e.max_coefficient_distance(&p) < 1e-6);
    let bad = NCPolynomial::scalar(1, &[(1.0, &[]), (3.0, &[0])]).unwrap();
    assert_eq!(search_certificate(&bad, &l, 0, &opts()).unwrap().status, SolveStatus::Infeasible);
}

#[test]
fn quadratic_on_tv() {
    let l = tv_monic_drop().lift().clone();
    let p = NCPolynomial::scalar(2, &[(1.0, &[]), (-1.0, &[0, 0])]).unwrap();
    let r = search_certificate(&p, &l, 1, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible, "{}", r.message);
    let c = r.certificate.unwrap();
    let e = verify_certificate(&p, &c, &l).unwrap();
    assert!(e.valid);
    let q = NCPolynomial::scalar(2, &[(1.0, &[]), (-2.0, &[0, 0])]).unwrap();
    assert_eq!(search_certificate(&q, &l, 1, &opts()).unwrap().status, SolveStatus::Infeasible);
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> HermitianMatrix {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let re = rng.random_range(-scale..scale);
            let im = if i == j { 0.0 } else { rng.random_range(-scale..scale) };
            m[(i, j)] = num_complex::Complex64::new(re, im);
            m[(j, i)] = num_complex::Complex64::new(re, -im);
        }
    }
    HermitianMatrix::new(m).unwrap()
}

#[test]
fn certified_polynomials_are_psd_on_the_drop() {
    let k = tv_monic_drop();
    let l = k.lift().clone();
    let p = linear(&HermitianTuple::scalars(&[0.5, 0.5]));
    assert_eq!(search_certificate(&p, &l, 0, &opts()).unwrap().status, SolveStatus::Feasible);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut found = 0;
    while found < 25 {
        let n = rng.random_range(1..=3);
        let x = HermitianTuple::from_mats(vec![random_hermitian(&mut rng, n, 0.6), random_hermitian(&mut rng, n, 0.6)])
            .unwrap();
        if !drop_membership(&k, &x, &opts()).unwrap().member() {
            continue;
        }
        found += 1;
        let v = HermitianMatrix::new(p.evaluate(&x).unwrap()).unwrap();
        assert!(v.min_eigenvalue() >= -1e-6);
    }
}

#[test]
fn degree_zero_search_matches_polar_membership() {
    let cases = [
        (tv_monic_drop(), HermitianTuple::scalars(&[0.5, 0.5])),
        (tv_monic_drop(), HermitianTuple::scalars(&[1.2, 0.0])),
        (tv_monic_drop(), HermitianTuple::scalars(&[0.2, -0.9])),
        (Spectrahedrop::new(free_cube(2, 1.0)), HermitianTuple::scalars(&[0.6, 0.3])),
        (Spectrahedrop::new(free_cube(2, 1.0)), HermitianTuple::scalars(&[0.8, 0.6])),
        (
            Spectrahedrop::new(free_cube(2, 1.0)),
            HermitianTuple::from_mats(vec![HermitianMatrix::diag(&[0.5, -0.2]), HermitianMatrix::diag(&[0.1, 0.4])])
                .unwrap(),
        ),
    ];
    for (k, a) in cases {
        let polar = drop_polar_membership(&k, &a, PolarForm::Contraction, &opts()).unwrap();
        let cert = search_certificate(&linear(&a), k.lift(), 0, &opts()).unwrap();
        assert_eq!(polar.holds(), cert.status == SolveStatus::Feasible, "{a:?}");
    }
}

#[test]
fn matrix_coefficients_and_complex_data() {
    // x ↦ [[1, i x], [−i x, 1]] is PSD exactly on |x| ≤ 1
    let l = free_cube(1, 1.0);
    let mut p = NCPolynomial::identity(1, 2);
    let off = CMat::from_row_slice(2, 2, &[cr(0.0), num_complex::Complex64::new(0.0, 0.9), num_complex::Complex64::new(0.0, -0.9), cr(0.0)]);
    p.add_term(NCWord::letter(0), off.clone()).unwrap();
    let r = search_certificate(&p, &l, 0, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible, "{}", r.message);
    let mut q = NCPolynomial::identity(1, 2);
    q.add_term(NCWord::letter(0), off * cr(1.3)).unwrap();
    assert_eq!(search_certificate(&q, &l, 0, &opts()).unwrap().status, SolveStatus::Infeasible);
}
