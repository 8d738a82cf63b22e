use loopgrade::exact::{rat, rint, Rat, Scalar};
use loopgrade::invmap::*;
use loopgrade::mpfilt::*;
use loopgrade::rootdata::{build_root_datum, CartanType, LieElement};
use loopgrade::sample::Sampler;
use loopgrade::vinberg::*;
use std::sync::Arc;

fn pt(v: &[(i64, i64)]) -> ApartmentPoint {
    ApartmentPoint::new(v.iter().map(|&(p, q)| rat(p, q)).collect())
}

fn a1() -> Arc<TwistedLoopDatum> {
    Arc::new(TwistedLoopDatum::split(CartanType::A, 1).unwrap())
}

fn e_f(d: &TwistedLoopDatum) -> (LieElement, LieElement) {
    let s = d.datum.simple_index(0);
    (LieElement::basis(s), LieElement::basis(d.datum.neg_index(s)))
}

#[test]
fn standard_reps_are_homomorphisms() {
    use CartanType::*;
    for (t, r) in [(A, 1), (A, 2), (A, 4), (B, 2), (B, 3), (B, 4), (C, 2), (C, 3), (C, 4), (D, 4)] {
        let d = build_root_datum(t, r).unwrap();
        let rep = standard_rep(&d).unwrap();
        let n = d.dim();
        for a in 0..n {
            for b in 0..n {
                let (ra, rb) = (&rep.images[a], &rep.images[b]);
                let lhs = ra.mul(rb).sub(&rb.mul(ra));
                let mut rhs = loopgrade::linalg::Matrix::zeros(rep.size, rep.size);
                for (i, c) in d.bracket(&LieElement::basis(a), &LieElement::basis(b)).iter() {
                    rhs = rhs.add(&rep.images[*i].scale(c));
                }
                assert_eq!(lhs, rhs, "{t}{r} at {a},{b}");
            }
            if let Some(j) = &rep.form {
                let jm = j.mul(&rep.images[a]);
                assert_eq!(jm.transpose(), jm.scale(&Scalar::int(-1)), "{t}{r}");
            }
        }
    }
}

#[test]
fn q_full_examples() {
    let d = a1();
    let inv = InvariantSystem::new(&d.datum).unwrap();
    assert!(q_full(&d, &inv, &LoopElement::zero()).unwrap().is_zero());
    let (e, f) = e_f(&d);
    let v = LoopElement::monomial(rint(0), e.clone()).add(&LoopElement::monomial(rint(1), f));
    let q = q_full(&d, &inv, &v).unwrap();
    assert_eq!(q.entries.len(), 1);
    assert_eq!(q.get(0, &rint(1)), Scalar::int(-1));
    assert_eq!(q.to_json()["2,1"], "-1");
    assert!(q_full(&d, &inv, &LoopElement::monomial(rint(0), e)).unwrap().is_zero());
}

#[test]
fn depth_bound_examples() {
    let d = a1();
    let inv = InvariantSystem::new(&d.datum).unwrap();
    let (e, f) = e_f(&d);
    let x = pt(&[(1, 2)]);
    let r = rat(1, 2);
    let v = LoopElement::monomial(rint(0), e.clone()).add(&LoopElement::monomial(rint(1), f.clone()));
    assert!(check_depth_bound(&d, &inv, &x, &r, &v).unwrap());
    let v3 = LoopElement::monomial(rint(0), e.clone()).add(&LoopElement::monomial(rint(3), f.clone()));
    assert!(check_depth_bound(&d, &inv, &x, &r, &v3).unwrap());
    let q = q_full(&d, &inv, &v3).unwrap();
    assert!(q.entries.keys().all(|(_, j)| *j > rint(1)));
    assert_eq!(q.get(0, &rint(3)), Scalar::int(-1));
    let shallow = LoopElement::monomial(rint(0), f);
    assert!(check_depth_bound(&d, &inv, &x, &r, &shallow).is_err());
}

#[test]
fn q_xr_examples() {
    let d = a1();
    let inv = InvariantSystem::new(&d.datum).unwrap();
    let ga = build_grading(d.clone(), &pt(&[(1, 2)]));
    let r = rat(1, 2);
    let z = ga
        .element_from_literal(&r, &[(vec![1], rint(0), 0, Scalar::one()), (vec![-1], rint(1), 0, Scalar::one())])
        .unwrap();
    let q = q_xr(&d, &inv, &z).unwrap();
    assert_eq!(q.get(0, &rint(1)), Scalar::int(-1));
    let e = ga.element_from_literal(&r, &[(vec![1], rint(0), 0, Scalar::one())]).unwrap();
    assert!(q_xr(&d, &inv, &e).unwrap().is_zero());
    let c = Scalar::from_rat(rat(-3, 2));
    let qc = q_xr(&d, &inv, &z.scale(&c)).unwrap();
    assert_eq!(qc.get(0, &rint(1)), &c * &c * Scalar::int(-1));
}

#[test]
fn exponent_gate_examples() {
    let d = a1();
    assert!(exponent_gate(&d, &rat(1, 2)));
    assert!(!exponent_gate(&d, &rat(1, 3)));
    let ga = build_grading(d.clone(), &pt(&[(1, 3)]));
    let q = ga.quotient(&rat(1, 3));
    assert_eq!(q.total_dim, 1);
    assert!(ga.is_nilpotent(&ga.element(&rat(1, 3), vec![Scalar::one()])));
    let t = TwistedLoopDatum::build(CartanType::A, 2, "swap", 2).unwrap();
    assert!(exponent_gate(&t, &rat(1, 4)));
    assert!(!exponent_gate(&t, &rat(1, 5)));
}

#[test]
fn kostant_examples() {
    let d = build_root_datum(CartanType::A, 1).unwrap();
    let inv = InvariantSystem::new(&d).unwrap();
    let (v, q) = kostant_slice_eval(&d, &inv, &[Scalar::zero()]).unwrap();
    assert_eq!(v, LieElement::basis(d.simple_index(0)));
    assert_eq!(q, vec![Scalar::zero()]);
    let (_, q) = kostant_slice_eval(&d, &inv, &[Scalar::one()]).unwrap();
    assert_eq!(q, vec![Scalar::int(-1)]);
}

#[test]
fn kostant_jacobians_invertible() {
    use CartanType::*;
    let mut s = Sampler::new(11);
    for (t, r) in [(A, 2), (A, 3), (B, 2), (B, 3), (C, 3), (D, 4), (G, 2)] {
        let d = build_root_datum(t, r).unwrap();
        let inv = InvariantSystem::new(&d).unwrap();
        assert_eq!(inv.experimental, t == G);
        for _ in 0..3 {
            let c = s.vector(r);
            let j = kostant_jacobian(&d, &inv, &c).unwrap();
            assert_eq!(j.rank(), r, "{t}{r}");
        }
    }
}

#[test]
fn kostant_jacobian_matches_finite_difference_a2() {
    // p2 is quadratic in c, so a symmetric difference is its exact derivative.
    let d = build_root_datum(CartanType::A, 2).unwrap();
    let inv = InvariantSystem::new(&d).unwrap();
    let c = vec![Scalar::int(2), Scalar::int(-1)];
    let j = kostant_jacobian(&d, &inv, &c).unwrap();
    for k in 0..2 {
        let mut up = c.clone();
        let mut dn = c.clone();
        up[k] = &up[k] + &Scalar::one();
        dn[k] = &dn[k] - &Scalar::one();
        let (_, qu) = kostant_slice_eval(&d, &inv, &up).unwrap();
        let (_, qd) = kostant_slice_eval(&d, &inv, &dn).unwrap();
        let diff = (&qu[0] - &qd[0]).scale(&rat(1, 2));
        assert_eq!(&diff, j.get(0, k));
    }
}

struct Case {
    d: Arc<TwistedLoopDatum>,
    x: ApartmentPoint,
}

fn cases() -> Vec<Case> {
    let mk = |d: TwistedLoopDatum, x: ApartmentPoint| Case { d: Arc::new(d), x };
    vec![
        mk(TwistedLoopDatum::split(CartanType::A, 1).unwrap(), pt(&[(1, 2)])),
        mk(TwistedLoopDatum::split(CartanType::A, 2).unwrap(), pt(&[(1, 3), (1, 3)])),
        mk(TwistedLoopDatum::split(CartanType::A, 2).unwrap(), pt(&[(1, 4), (0, 1)])),
        mk(TwistedLoopDatum::split(CartanType::B, 2).unwrap(), pt(&[(1, 4), (1, 4)])),
        mk(TwistedLoopDatum::split(CartanType::C, 2).unwrap(), pt(&[(1, 6), (1, 3)])),
        mk(TwistedLoopDatum::build(CartanType::A, 2, "swap", 2).unwrap(), pt(&[(1, 4)])),
        mk(TwistedLoopDatum::build(CartanType::A, 3, "swap", 2).unwrap(), pt(&[(1, 4), (1, 8)])),
    ]
}

// Random element of k_{x,r} supported on values in [r, r + 2].
fn sample_in_filtration(s: &mut Sampler, d: &TwistedLoopDatum, x: &ApartmentPoint, r: &Rat, strict: bool) -> LoopElement {
    let lo = r - rint(3);
    let spaces = affine_root_spaces(d, &Window::closed(lo, r + rint(3)));
    let mut v = LoopElement::zero();
    for sp in spaces {
        let val = sp.value(x);
        let ok = if strict { val > *r } else { val >= *r };
        if !ok || val > r + rint(2) || s.coin() {
            continue;
        }
        for b in &sp.basis {
            v = v.add(&LoopElement::monomial(sp.level.clone(), b.scale(&s.scalar())));
        }
    }
    v
}

fn sample_graded(s: &mut Sampler, ga: &GradedAlgebra, r: &Rat) -> GradedElement {
    let q = ga.quotient(r);
    ga.element(r, s.vector(q.total_dim))
}

#[test]
fn depth_bound_on_samples() {
    let mut s = Sampler::new(2024);
    let mut count = 0;
    for c in cases() {
        let inv = InvariantSystem::new(&c.d.datum).unwrap();
        for r in [rint(0), rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3), rint(1)] {
            for _ in 0..6 {
                let v = sample_in_filtration(&mut s, &c.d, &c.x, &r, false);
                assert!(check_depth_bound(&c.d, &inv, &c.x, &r, &v).unwrap());
                count += 1;
            }
        }
    }
    assert!(count >= 200);
}

#[test]
fn quotient_factorization_and_fiber() {
    let mut s = Sampler::new(99);
    for c in cases() {
        let inv = InvariantSystem::new(&c.d.datum).unwrap();
        let ga = build_grading(c.d.clone(), &c.x);
        for r in ga.components.keys().cloned().collect::<Vec<_>>() {
            for _ in 0..3 {
                let z = sample_graded(&mut s, &ga, &r);
                let base = q_xr(&c.d, &inv, &z).unwrap();
                let pert = sample_in_filtration(&mut s, &c.d, &c.x, &r, true);
                let lifted = q_full(&c.d, &inv, &f_embed(&z).add(&pert)).unwrap().diagonal(&r);
                assert_eq!(base, lifted, "{}", c.d.label());
                assert_eq!(base.is_zero(), ga.is_nilpotent(&z), "{}", c.d.label());
            }
            // Basis vectors of nonzero-weight spaces are nilpotent.
            let q = ga.quotient(&r);
            let pos = q.positions();
            for i in 0..q.total_dim {
                if q.spaces[pos[i].0].alpha.iter().all(|a| *a == 0) {
                    continue;
                }
                {
                    let mut v = vec![Scalar::zero(); q.total_dim];
                    v[i] = Scalar::one();
                    let z = ga.element(&r, v);
                    assert!(ga.is_nilpotent(&z));
                    assert!(q_xr(&c.d, &inv, &z).unwrap().is_zero());
                }
            }
        }
    }
}

#[test]
fn specialization_square_untwisted() {
    let mut s = Sampler::new(5);
    for c in cases().into_iter().filter(|c| c.d.n == 1) {
        let inv = InvariantSystem::new(&c.d.datum).unwrap();
        let ga = build_grading(c.d.clone(), &c.x);
        for r in ga.components.keys().cloned().collect::<Vec<_>>() {
            for _ in 0..3 {
                let z = sample_graded(&mut s, &ga, &r);
                let at_one = q_xr(&c.d, &inv, &z).unwrap().at_one();
                assert_eq!(at_one, inv.evaluate_lie(&c.d.datum, &z.to_lie()).unwrap());
            }
        }
    }
}

#[test]
fn gate_false_forces_nilpotence() {
    for c in cases() {
        let ga = build_grading(c.d.clone(), &c.x);
        for r in ga.components.keys() {
            if exponent_gate(&c.d, r) {
                continue;
            }
            let q = ga.quotient(r);
            let mut s = Sampler::new(3);
            for _ in 0..4 {
                assert!(ga.is_nilpotent(&ga.element(r, s.vector(q.total_dim))));
            }
        }
    }
}

#[test]
fn homogeneity() {
    let mut s = Sampler::new(8);
    for c in cases() {
        let inv = InvariantSystem::new(&c.d.datum).unwrap();
        let v = sample_in_filtration(&mut s, &c.d, &c.x, &rint(0), false);
        let k = Scalar::from_rat(rat(2, 3));
        let a = inv.evaluate(&c.d.datum, c.d.n, &v).unwrap();
        let b = inv.evaluate(&c.d.datum, c.d.n, &v.scale(&k)).unwrap();
        for (i, deg) in inv.degrees.iter().enumerate() {
            assert_eq!(b[i], a[i].scale(&k.pow(*deg as u32)));
        }
    }
}
