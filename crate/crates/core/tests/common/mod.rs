#![allow(dead_code)]

use freesdp::algebra::{CMat, HermitianMatrix, HermitianTuple, LinearPencil};
use freesdp::io::schema::{tuple_from_json, tuple_to_json, DropJson, MatrixJson, Payload, PencilJson};
use freesdp::free::Spectrahedrop;
use num_complex::Complex64;
use rand::Rng;

pub fn random_cmat<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> HermitianMatrix {
    let a = random_cmat(rng, n, n, scale);
    HermitianMatrix::from_hermitian_part(a)
}

pub fn random_real_symmetric<R: Rng>(rng: &mut R, n: usize, scale: f64) -> HermitianMatrix {
    let a = CMat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-scale..scale), 0.0));
    HermitianMatrix::from_hermitian_part(a)
}

pub fn random_tuple<R: Rng>(rng: &mut R, g: usize, n: usize, scale: f64) -> HermitianTuple {
    HermitianTuple::new(n, (0..g).map(|_| random_hermitian(rng, n, scale)).collect()).unwrap()
}

/// Unitary factor of a QR decomposition of a random complex matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    loop {
        let a = random_cmat(rng, n, n, 1.0);
        let qr = a.qr();
        let r = qr.r();
        if (0..n).all(|i| r[(i, i)].norm() > 1e-3) {
            return qr.q();
        }
    }
}

/// `S^{-1/2}` for a positive definite `S`.
pub fn inverse_sqrt(s: &HermitianMatrix) -> CMat {
    s.map_spectrum(|l| 1.0 / l.sqrt()).into_matrix()
}

fn conj_tuple<R: Rng>(rng: &mut R, ms: &[MatrixJson]) -> Vec<MatrixJson> {
    let t = tuple_from_json(ms, "t").unwrap();
    let u = random_unitary(rng, t.dim());
    tuple_to_json(&t.congruence(&u).unwrap())
}

fn conj_pencil<R: Rng>(rng: &mut R, p: &PencilJson) -> PencilJson {
    let l: LinearPencil = p.to_pencil("p").unwrap();
    let u = random_unitary(rng, l.size());
    PencilJson::from_pencil(&l.congruence(&u))
}

fn conj_drop<R: Rng>(rng: &mut R, d: &DropJson) -> DropJson {
    let k = d.to_drop("d").unwrap();
    let u = random_unitary(rng, k.lift().size());
    let lift = k.lift().congruence(&u);
    let out = if k.equalities().is_empty() {
        Spectrahedrop::new(lift)
    } else {
        let eqs = k.equalities().iter().map(|e| e.congruence(&random_unitary(rng, e.size()))).collect();
        Spectrahedrop::with_equalities(lift, eqs).unwrap()
    };
    DropJson::from_drop(&out)
}

/// Conjugates every matrix object of a decision problem by its own random
/// unitary. Kinds that are not decisions (`monicize`, `possatz-verify`)
/// give `None`.
pub fn conjugate_payload<R: Rng>(rng: &mut R, p: &Payload) -> Option<Payload> {
    Some(match p {
        Payload::Membership { pencil, point } => Payload::Membership {
            pencil: conj_pencil(rng, pencil),
            point: conj_tuple(rng, point),
        },
        Payload::Interpolate { a, b } => Payload::Interpolate {
            a: conj_tuple(rng, a),
            b: conj_tuple(rng, b),
        },
        Payload::Dominate { dominating, dominated } => Payload::Dominate {
            dominating: conj_pencil(rng, dominating),
            dominated: conj_pencil(rng, dominated),
        },
        Payload::Polar { omega, point } => Payload::Polar {
            omega: conj_tuple(rng, omega),
            point: conj_tuple(rng, point),
        },
        Payload::Drop { drop, point } => Payload::Drop {
            drop: conj_drop(rng, drop),
            point: conj_tuple(rng, point),
        },
        Payload::DropPolar { drop, point } => Payload::DropPolar {
            drop: conj_drop(rng, drop),
            point: conj_tuple(rng, point),
        },
        Payload::Tracial { b, y } => Payload::Tracial {
            b: conj_tuple(rng, b),
            y: conj_tuple(rng, y),
        },
        Payload::Thull { generators, target } => Payload::Thull {
            generators: generators.iter().map(|g| conj_tuple(rng, g)).collect(),
            target: conj_tuple(rng, target),
        },
        Payload::Cthull { generators, target } => Payload::Cthull {
            generators: generators.iter().map(|g| conj_tuple(rng, g)).collect(),
            target: conj_tuple(rng, target),
        },
        Payload::Exsitu { omega, y } => Payload::Exsitu {
            omega: conj_tuple(rng, omega),
            y: conj_tuple(rng, y),
        },
        Payload::PossatzSearch { polynomial, pencil, r } => {
            let p = polynomial.to_polynomial("p").unwrap();
            let u = random_unitary(rng, p.shape().0);
            let terms = p.terms().map(|(w, b)| (w.clone(), u.adjoint() * b * &u)).collect();
            let q = freesdp::algebra::NCPolynomial::from_terms(p.nvars(), p.shape().0, p.shape().1, terms).unwrap();
            Payload::PossatzSearch {
                polynomial: freesdp::io::schema::PolynomialJson::from_polynomial(&q),
                pencil: conj_pencil(rng, pencil),
                r: *r,
            }
        }
        Payload::Bounded { pencil } => Payload::Bounded {
            pencil: conj_pencil(rng, pencil),
        },
        Payload::HullUnion { drops, point } => Payload::HullUnion {
            drops: drops.iter().map(|d| conj_drop(rng, d)).collect(),
            point: conj_tuple(rng, point),
        },
        Payload::Monicize { .. } | Payload::PossatzVerify { .. } => return None,
    })
}
