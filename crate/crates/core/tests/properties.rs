mod common;

use freesdp::algebra::matrix::{c, max_abs, min_eigenvalue_real};
use freesdp::algebra::{realify, CMat, HermitianMatrix, HermitianTuple, LinearPencil, NCPolynomial, NCWord, NormBall, RMat};
use freesdp::catalog::{free_cube, interval, no_tracial_extension, tv_monic_drop};
use freesdp::cp::{apply_choi, choi_of_kraus, interpolate, kraus_of_choi, InterpolationMode, KrausDecomposition};
use freesdp::free::{
    dominates, drop_membership, drop_polar_membership, polar_membership, DominationForm, PolarForm, Spectrahedrop,
};
use freesdp::io::report::to_json_string;
use freesdp::io::schema::{tuple_to_json, Payload, ProblemFile};
use freesdp::io::parse_problem;
use freesdp::possatz::{expand_certificate, search_certificate, verify_certificate, Certificate};
use freesdp::sdp::{solve, Constraint, SdpProblem, Sense, SolveStatus, SolverOptions};
use freesdp::tracial::{cthull_membership, exsitu_dual_membership, sms_factor, thull_membership};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_cmat, random_hermitian, random_tuple, random_unitary};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn random_pencil(r: &mut ChaCha8Rng, g: usize, d: usize) -> LinearPencil {
    let a0 = random_hermitian(r, d, 1.0);
    let xs = (0..g).map(|_| random_hermitian(r, d, 1.0)).collect();
    LinearPencil::new(a0, xs, vec![]).unwrap()
}

fn random_monic(r: &mut ChaCha8Rng, g: usize, d: usize) -> LinearPencil {
    LinearPencil::monic_from(&random_tuple(r, g, d, 1.0))
}

/// Halves `x` until `keep` accepts it.
fn shrink_into(mut x: HermitianTuple, keep: impl Fn(&HermitianTuple) -> bool) -> HermitianTuple {
    for _ in 0..40 {
        if keep(&x) {
            return x;
        }
        x = x.scale(0.5);
    }
    panic!("no member found by scaling");
}

fn random_polynomial(r: &mut ChaCha8Rng, g: usize, mu: usize) -> NCPolynomial {
    let terms = (0..5)
        .map(|_| {
            let deg = r.random_range(0..=3);
            let w = NCWord::new((0..deg).map(|_| r.random_range(0..g)).collect());
            (w, random_cmat(r, mu, mu, 1.0))
        })
        .collect();
    NCPolynomial::from_terms(g, mu, mu, terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pencil_spectrum_is_unitarily_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (g, d, n) = (r.random_range(1..=3), r.random_range(1..=3), r.random_range(1..=3));
        let l = random_pencil(&mut r, g, d);
        let x = random_tuple(&mut r, g, n, 1.0);
        let u = random_unitary(&mut r, n);
        let a = l.min_eigenvalue_at(&x).unwrap();
        let b = l.min_eigenvalue_at(&x.congruence(&u).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }

    #[test]
    fn direct_sums_merge_spectra(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (g, d) = (r.random_range(1..=3), r.random_range(1..=3));
        let l = random_pencil(&mut r, g, d);
        let x = { let k_ = r.random_range(1..=3); random_tuple(&mut r, g, k_, 1.0) };
        let y = { let k_ = r.random_range(1..=3); random_tuple(&mut r, g, k_, 1.0) };
        let joint = sorted(l.evaluate(&x.direct_sum(&y).unwrap(), None).unwrap().eigenvalues());
        let mut parts = l.evaluate(&x, None).unwrap().eigenvalues();
        parts.extend(l.evaluate(&y, None).unwrap().eigenvalues());
        for (a, b) in joint.iter().zip(sorted(parts)) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn realify_doubles_the_spectrum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let h = { let k_ = r.random_range(1..=4); random_hermitian(&mut r, k_, 1.0) };
        let real = sorted(realify(&h).symmetric_eigen().eigenvalues.iter().cloned().collect());
        let doubled = sorted(h.eigenvalues().into_iter().flat_map(|l| [l, l]).collect());
        for (a, b) in real.iter().zip(doubled) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn involution_is_an_involution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_polynomial(&mut r, 2, 2);
        prop_assert_eq!(p.involution().involution(), p);
    }

    #[test]
    fn symmetric_polynomials_evaluate_hermitian(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = random_polynomial(&mut r, 2, 2);
        let p = q.add(&q.involution()).unwrap();
        prop_assert!(p.is_symmetric(1e-12));
        let x = { let k_ = r.random_range(1..=3); random_tuple(&mut r, 2, k_, 1.0) };
        let v = p.evaluate(&x).unwrap();
        prop_assert!(max_abs(&(&v - v.adjoint())) <= 1e-10);
    }

    #[test]
    fn spectrahedra_are_closed_under_direct_sums(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_monic(&mut r, 2, 3);
        let inside = |t: &HermitianTuple| l.min_eigenvalue_at(t).unwrap() >= 0.0;
        let x = shrink_into(random_tuple(&mut r, 2, 2, 1.0), inside);
        let y = shrink_into(random_tuple(&mut r, 2, 3, 1.0), inside);
        prop_assert!(l.min_eigenvalue_at(&x.direct_sum(&y).unwrap()).unwrap() >= -1e-12);
    }

    #[test]
    fn choi_kraus_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=4), r.random_range(1..=4));
        let ops = (0..r.random_range(1..=6)).map(|_| random_cmat(&mut r, n, m, 1.0)).collect();
        let ch = choi_of_kraus(&KrausDecomposition::new(n, m, ops).unwrap());
        let k = kraus_of_choi(&ch, 1e-12).unwrap();
        prop_assert!(k.len() <= n * m);
        let back = choi_of_kraus(&k);
        prop_assert!(max_abs(&(back.matrix().as_matrix() - ch.matrix().as_matrix())) <= 1e-8);
        let x = random_cmat(&mut r, n, n, 1.0);
        prop_assert!(max_abs(&(apply_choi(&ch, &x).unwrap() - k.apply(&x))) <= 1e-8);
    }

    #[test]
    fn psd_choi_maps_are_completely_positive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=3), r.random_range(1..=3));
        let ops = (0..r.random_range(1..=4)).map(|_| random_cmat(&mut r, n, m, 1.0)).collect();
        let ch = choi_of_kraus(&KrausDecomposition::new(n, m, ops).unwrap());
        for _ in 0..10 {
            // φ_2 on a PSD 2n×2n input, blockwise
            let w = random_cmat(&mut r, 2 * n, 2 * n, 1.0);
            let z = &w * w.adjoint();
            let mut out = CMat::zeros(2 * m, 2 * m);
            for p in 0..2 {
                for q in 0..2 {
                    let img = apply_choi(&ch, &z.view((p * n, q * n), (n, n)).into_owned()).unwrap();
                    out.view_mut((p * m, q * m), (m, m)).copy_from(&img);
                }
            }
            let h = HermitianMatrix::from_hermitian_part(out);
            prop_assert!(h.min_eigenvalue() >= -1e-8 * max_abs(h.as_matrix()).max(1.0));
        }
    }
}

fn kraus_image(k: &KrausDecomposition, a: &HermitianTuple) -> HermitianTuple {
    HermitianTuple::from_mats(a.mats().iter().map(|aj| HermitianMatrix::from_hermitian_part(k.apply(aj.as_matrix()))).collect())
        .unwrap()
}

/// `S^{-1/2} V` with `S = Σ V V*`: trace preserving.
fn to_channel(k: &KrausDecomposition) -> KrausDecomposition {
    let n = k.n();
    let s = k.ops().iter().fold(CMat::zeros(n, n), |acc, v| acc + v * v.adjoint());
    let w = common::inverse_sqrt(&HermitianMatrix::from_hermitian_part(s));
    KrausDecomposition::new(n, k.m(), k.ops().iter().map(|v| &w * v).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn interpolation_witnesses_satisfy_their_mode(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=3), r.random_range(1..=3));
        let ops = (0..n * m).map(|_| random_cmat(&mut r, n, m, 1.0)).collect();
        let phi = to_channel(&KrausDecomposition::new(n, m, ops).unwrap());
        let a = random_tuple(&mut r, 2, n, 1.0);
        let b = kraus_image(&phi, &a);
        for mode in [InterpolationMode::Channel, InterpolationMode::Operation, InterpolationMode::Cp] {
            let res = interpolate(&a, &b, mode, &opts()).unwrap();
            prop_assert_eq!(res.status, SolveStatus::Feasible, "{:?}: {}", mode, res.message);
            let ch = res.choi.unwrap();
            for _ in 0..3 {
                let x = random_hermitian(&mut r, n, 1.0);
                let w = random_cmat(&mut r, n, n, 1.0);
                let p = &w * w.adjoint();
                let tr = |z: &CMat| z.trace().re;
                let tx = tr(&apply_choi(&ch, x.as_matrix()).unwrap()) - x.trace();
                let tp = tr(&apply_choi(&ch, &p).unwrap()) - tr(&p);
                match mode {
                    InterpolationMode::Channel => prop_assert!(tx.abs() <= 1e-6),
                    InterpolationMode::Operation => prop_assert!(tp <= 1e-6),
                    _ => {}
                }
            }
        }
        // unital: A ↦ Φ(A) for Φ(X) = Σ V*XV with Σ V*V = I
        let ops: Vec<CMat> = (0..n * m).map(|_| random_cmat(&mut r, n, m, 1.0)).collect();
        let t = ops.iter().fold(CMat::zeros(m, m), |acc, v| acc + v.adjoint() * v);
        let w = common::inverse_sqrt(&HermitianMatrix::from_hermitian_part(t));
        let unital = KrausDecomposition::new(n, m, ops.iter().map(|v| v * &w).collect()).unwrap();
        let res = interpolate(&a, &kraus_image(&unital, &a), InterpolationMode::Unital, &opts()).unwrap();
        prop_assert_eq!(res.status, SolveStatus::Feasible, "{}", res.message);
        let img = apply_choi(res.choi.as_ref().unwrap(), &CMat::identity(n, n)).unwrap();
        prop_assert!(max_abs(&(img - CMat::identity(m, m))) <= 1e-6);
    }

    #[test]
    fn interpolation_status_is_unitarily_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=3), r.random_range(1..=3));
        let a = random_tuple(&mut r, 2, n, 1.0);
        let b = random_tuple(&mut r, 2, m, 0.5);
        let u = random_unitary(&mut r, n);
        let w = random_unitary(&mut r, m);
        for mode in [InterpolationMode::Cp, InterpolationMode::Channel] {
            let s0 = interpolate(&a, &b, mode, &opts()).unwrap().status;
            let s1 = interpolate(&a.congruence(&u).unwrap(), &b.congruence(&w).unwrap(), mode, &opts()).unwrap().status;
            if s0 != SolveStatus::Marginal && s1 != SolveStatus::Marginal {
                prop_assert_eq!(s0, s1);
            }
        }
    }

    #[test]
    fn feasibility_is_monotone_in_mode(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=3), r.random_range(1..=3));
        let a = random_tuple(&mut r, 1, n, 1.0);
        let b = { let k_ = r.random_range(0.1..1.5); random_tuple(&mut r, 1, m, k_) };
        let st = |mode| interpolate(&a, &b, mode, &opts()).unwrap().status;
        let (ch, op, cp) = (st(InterpolationMode::Channel), st(InterpolationMode::Operation), st(InterpolationMode::Cp));
        if ch == SolveStatus::Feasible {
            prop_assert_ne!(op, SolveStatus::Infeasible);
        }
        if op == SolveStatus::Feasible {
            prop_assert_ne!(cp, SolveStatus::Infeasible);
        }
    }

    #[test]
    fn sdp_status_survives_row_scaling_and_rotation(seed in any::<u64>(), infeasible in any::<bool>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=4);
        let w = RMat::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
        let z0 = &w * w.transpose() + RMat::identity(n, n) * 0.1;
        let data: Vec<RMat> = (0..r.random_range(1..=3))
            .map(|_| {
                let f = RMat::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
                &f + f.transpose()
            })
            .collect();
        let q = random_unitary(&mut r, n).map(|z| z.re).qr().q();
        let build = |scales: &[f64], rot: bool| {
            let mut p = SdpProblem::new(Sense::Feasibility);
            let b = p.add_block("Z", n);
            for (k, f) in data.iter().enumerate() {
                let f = if rot { q.transpose() * f * &q } else { f.clone() };
                let target = if rot { q.transpose() * &z0 * &q } else { z0.clone() };
                let mut con = Constraint::default();
                con.add_matrix(b, &(f.clone() * scales[k]));
                con.rhs = scales[k] * f.component_mul(&target).sum();
                p.add_equality(con);
            }
            let mut tr = Constraint::default();
            tr.add_matrix(b, &(RMat::identity(n, n) * scales[data.len()]));
            tr.rhs = scales[data.len()] * if infeasible { -1.0 } else { z0.trace() };
            p.add_equality(tr);
            p
        };
        let ones = vec![1.0; data.len() + 1];
        let scales: Vec<f64> = (0..=data.len()).map(|_| r.random_range(0.1..10.0)).collect();
        let base = solve(&build(&ones, false), &opts());
        let want = if infeasible { SolveStatus::Infeasible } else { SolveStatus::Feasible };
        prop_assert_eq!(base.status, want, "{}", base.message);
        prop_assert_eq!(solve(&build(&scales, false), &opts()).status, want);
        prop_assert_eq!(solve(&build(&ones, true), &opts()).status, want);
        if base.status == SolveStatus::Feasible {
            // independent check of the witness
            let p = build(&ones, false);
            for e in &p.equalities {
                prop_assert!((e.evaluate(&base.blocks, &base.free) - e.rhs).abs() <= 1e-6);
            }
            prop_assert!(min_eigenvalue_real(&base.blocks[0]) >= -1e-6);
        }
    }

    #[test]
    fn polar_duals_pair_nonnegatively(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_monic(&mut r, 2, 3);
        let omega = l.omega();
        let x = shrink_into({ let k_ = r.random_range(1..=3); random_tuple(&mut r, 2, k_, 1.0) }, |t| l.min_eigenvalue_at(t).unwrap() >= 0.0);
        let a = shrink_into({ let k_ = r.random_range(1..=2); random_tuple(&mut r, 2, k_, 1.0) }, |t| {
            polar_membership(&omega, t, &opts()).unwrap().holds()
        });
        let la = LinearPencil::monic_from(&a);
        prop_assert!(la.min_eigenvalue_at(&x).unwrap() >= -1e-8);
    }

    #[test]
    fn norm_ball_polar_sandwich(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ball = NormBall::new(2, 1.0).unwrap();
        let omega = ball.pencil().omega();
        let x = { let k_ = r.random_range(1..=2); random_tuple(&mut r, 2, k_, 1.0) };
        let norm = x.row_norm();
        let small = x.scale(r.random_range(0.01..0.5) / norm);
        prop_assert!(polar_membership(&omega, &small, &opts()).unwrap().holds());
        let large = x.scale(r.random_range(2f64.sqrt() + 1e-3..3.0) / norm);
        prop_assert_eq!(polar_membership(&omega, &large, &opts()).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn drops_are_matrix_convex(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = tv_monic_drop();
        let member = |t: &HermitianTuple| drop_membership(&k, t, &opts()).unwrap().member();
        let x = shrink_into({ let k_ = r.random_range(1..=2); random_tuple(&mut r, 2, k_, 1.0) }, member);
        let y = shrink_into({ let k_ = r.random_range(1..=2); random_tuple(&mut r, 2, k_, 1.0) }, member);
        let s = x.direct_sum(&y).unwrap();
        prop_assert!(drop_membership(&k, &s, &opts()).unwrap().status != SolveStatus::Infeasible);
        // isometry V: C^k → C^{dim s}, the first k columns of a unitary
        let u = random_unitary(&mut r, s.dim());
        let kdim = r.random_range(1..=s.dim());
        let v = u.columns(0, kdim).into_owned();
        let compressed = HermitianTuple::from_mats(
            s.mats().iter().map(|m| HermitianMatrix::from_hermitian_part(v.adjoint() * m.as_matrix() * &v)).collect(),
        )
        .unwrap();
        prop_assert!(drop_membership(&k, &compressed, &opts()).unwrap().status != SolveStatus::Infeasible);
    }

    #[test]
    fn projection_duality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = tv_monic_drop();
        let a = HermitianTuple::scalars(&[r.random_range(-1.5..1.5), r.random_range(-1.5..1.5)]);
        let via_drop = drop_polar_membership(&k, &a, PolarForm::Contraction, &opts()).unwrap().status;
        let full = k.lift().omega().concat(&k.lift().gamma()).unwrap();
        let padded = a.concat(&HermitianTuple::zeros(k.h(), a.dim())).unwrap();
        let via_full = polar_membership(&full, &padded, &opts()).unwrap().status;
        if via_drop != SolveStatus::Marginal && via_full != SolveStatus::Marginal {
            prop_assert_eq!(via_drop, via_full);
        }
    }

    #[test]
    fn thull_is_unitarily_invariant_and_inside_cthull(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=3), r.random_range(1..=3));
        let a = random_tuple(&mut r, 1, n, 1.0);
        let b = if r.random_bool(0.5) {
            let ops = (0..n * m).map(|_| random_cmat(&mut r, n, m, 1.0)).collect();
            kraus_image(&to_channel(&KrausDecomposition::new(n, m, ops).unwrap()), &a)
        } else {
            random_tuple(&mut r, 1, m, 1.0)
        };
        let t0 = thull_membership(&a, &b, &opts()).unwrap().status;
        let ua = a.congruence(&random_unitary(&mut r, n)).unwrap();
        let t1 = thull_membership(&ua, &b, &opts()).unwrap().status;
        let t2 = thull_membership(&a, &b.congruence(&random_unitary(&mut r, m)).unwrap(), &opts()).unwrap().status;
        for t in [t1, t2] {
            if t0 != SolveStatus::Marginal && t != SolveStatus::Marginal {
                prop_assert_eq!(t0, t);
            }
        }
        if t0 == SolveStatus::Feasible {
            prop_assert_ne!(cthull_membership(&a, &b, &opts()).unwrap().status, SolveStatus::Infeasible);
        }
    }

    #[test]
    fn exsitu_members_factor_as_sms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let omega = free_cube(2, 1.0).omega();
        let m = r.random_range(1..=3);
        let y = shrink_into(random_tuple(&mut r, 2, m, 1.0), |t| {
            exsitu_dual_membership(&omega, t, &opts()).unwrap().status == SolveStatus::Feasible
        });
        let res = exsitu_dual_membership(&omega, &y, &opts()).unwrap();
        let f = sms_factor(res.choi.as_ref().unwrap(), &omega, 1e-9).unwrap();
        let back = f.recombine();
        for (a, b) in back.mats().iter().zip(y.mats()) {
            prop_assert!(max_abs(&(a.as_matrix() - b.as_matrix())) <= 1e-6);
        }
        let s2 = f.s.as_matrix() * f.s.as_matrix();
        prop_assert!(s2.trace().re <= 1.0 + 1e-6);
        prop_assert!(f.s.min_eigenvalue() >= -1e-8);
        prop_assert!(polar_membership(&omega, &f.m, &opts()).unwrap().status != SolveStatus::Infeasible);
    }

    #[test]
    fn certificate_degree_is_bounded(seed in any::<u64>(), rr in 0usize..=1) {
        let mut r = rng(seed);
        let l = tv_monic_drop().lift().clone();
        let c0 = Certificate::zero(2, 1, rr);
        let ns = c0.s.dim();
        let w = random_cmat(&mut r, ns, ns, 1.0);
        let nd = l.size() * ns;
        let gw = random_cmat(&mut r, nd, nd, 1.0);
        let cert = Certificate::new(
            1,
            rr,
            HermitianMatrix::from_hermitian_part(&w * w.adjoint()),
            HermitianMatrix::from_hermitian_part(&gw * gw.adjoint()),
        );
        // a random Gram violates annihilation, so expand against the x-part
        let l0 = LinearPencil::new(l.constant().clone(), l.x_coeffs().to_vec(), vec![]).unwrap();
        let e = expand_certificate(&cert, &l0).unwrap();
        prop_assert!(e.degree() <= 2 * rr + 1);
    }

    #[test]
    fn searched_certificates_verify(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = tv_monic_drop().lift().clone();
        let (c1, c2) = (r.random_range(-1.2..1.2), r.random_range(-1.2..1.2));
        let mut p = NCPolynomial::identity(2, 1);
        p.add_term(NCWord::letter(0), CMat::from_element(1, 1, c(-c1, 0.0))).unwrap();
        p.add_term(NCWord::letter(1), CMat::from_element(1, 1, c(-c2, 0.0))).unwrap();
        let s = search_certificate(&p, &l, 0, &opts()).unwrap();
        if let Some(cert) = &s.certificate {
            let v = verify_certificate(&p, cert, &l).unwrap();
            prop_assert!(v.valid && v.residual <= 1e-6);
        }
    }

    #[test]
    fn pencil_only_search_matches_domination(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_monic(&mut r, 2, 2);
        let (dim, scale) = (r.random_range(1..=2), r.random_range(0.1..1.0));
        let a = random_tuple(&mut r, 2, dim, scale);
        let mu = a.dim();
        let mut p = NCPolynomial::identity(2, mu);
        for (j, aj) in a.mats().iter().enumerate() {
            p.add_term(NCWord::letter(j), -aj.as_matrix().clone()).unwrap();
        }
        let cert = search_certificate(&p, &l, 0, &opts()).unwrap().status;
        let dom = dominates(&LinearPencil::monic_from(&a), &l, DominationForm::Contraction, &opts()).unwrap().status;
        if cert != SolveStatus::Marginal && dom != SolveStatus::Marginal {
            prop_assert_eq!(cert, dom);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn domination_is_a_preorder(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_monic(&mut r, 1, 2);
        prop_assert_ne!(dominates(&l, &l, DominationForm::Contraction, &opts()).unwrap().status, SolveStatus::Infeasible);
        // nested intervals [−a, b] ⊆ [−a', b'] ⊆ [−a'', b'']
        let (lo, hi) = (r.random_range(0.2..1.0), r.random_range(0.2..1.0));
        let grow = r.random_range(1.1..2.0);
        let inner = interval(-lo, hi);
        let mid = interval(-lo * grow, hi * grow);
        let outer = interval(-lo * grow * grow, hi * grow * grow);
        let holds = |a: &LinearPencil, b: &LinearPencil| dominates(a, b, DominationForm::Contraction, &opts()).unwrap().holds();
        prop_assert!(holds(&mid, &inner));
        prop_assert!(holds(&outer, &mid));
        prop_assert!(holds(&outer, &inner));
        prop_assert!(!holds(&inner, &outer));
    }

    #[test]
    fn random_problems_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = no_tracial_extension();
        let a = a.congruence(&random_unitary(&mut r, 2)).unwrap();
        let b = b.scale(r.random_range(-2.0..2.0));
        let p = ProblemFile::new(Payload::Interpolate { a: tuple_to_json(&a), b: tuple_to_json(&b) }).with_mode("channel");
        prop_assert_eq!(parse_problem(to_json_string(&p).as_bytes()).unwrap(), p);
        let d = Spectrahedrop::new(random_monic(&mut r, 2, 3));
        let q = ProblemFile::new(Payload::Drop {
            drop: freesdp::io::schema::DropJson::from_drop(&d),
            point: tuple_to_json(&random_tuple(&mut r, 2, 2, 1.0)),
        });
        prop_assert_eq!(parse_problem(to_json_string(&q).as_bytes()).unwrap(), q);
    }
}
