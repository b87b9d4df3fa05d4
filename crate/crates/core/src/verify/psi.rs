//! The map from pointwise to plaque-indexed forms and its inverse.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{check, fail, gen, pass, OrError, Outcome, Recorder, VerifyConfig};
use crate::diffeology::{Coords, DiffSpace, SpaceVectorField, TangentVector};
use crate::expr::{compose, PolyExpr, SmoothMap};
use crate::exterior::MultiIndex;
use crate::plaque_forms::{
    compatibility_check, pointwise_along, psi, psi_inverse_along, psi_inverse_at, psi_unattested, tangent_condition_check,
    PlaqueFormError, PointwiseForm,
};
use crate::scalar;
use crate::spaces::{make_euclidean, make_lines_plane, make_plane2_space, make_tangent_planes};

pub fn random_pointwise(rng: &mut ChaCha8Rng, x: &DiffSpace, degree: usize) -> PointwiseForm {
    let (n, g) = (x.ambient_dim(), x.generators().len());
    let coeffs: Vec<(Vec<usize>, PolyExpr)> =
        MultiIndex::all(g, degree).into_iter().map(|k| (k.as_slice().to_vec(), gen::poly(rng, n, 2, 3))).collect();
    PointwiseForm::new(n, g, degree, coeffs).expect("valid indices")
}

pub fn sample_vectors(rng: &mut ChaCha8Rng, x: &DiffSpace, base: &Coords, k: usize) -> Result<Vec<TangentVector>, String> {
    (0..k).map(|_| x.tangent_class(&x.sample_plaque(rng, base, 1)).or_error()).collect()
}

/// `r -> r + (quadratic terms)`, the identity to first order.
fn near_identity(rng: &mut ChaCha8Rng, n: usize) -> SmoothMap {
    let comps = (0..n)
        .map(|i| {
            let mut c = PolyExpr::var(n, i);
            for j in 0..n {
                for k in j..n {
                    if rng.gen_bool(0.5) {
                        let q = gen::vectors(rng, 1, 1)[0][0].clone();
                        c = &c + &(&PolyExpr::var(n, j) * &PolyExpr::var(n, k)).scale(&q);
                    }
                }
            }
            c
        })
        .collect();
    SmoothMap::polynomial_global(n, comps).expect("dimensions agree")
}

fn fixture_cases(x: &DiffSpace, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let name = x.name().to_string();
    let n = x.ambient_dim();
    let degrees: Vec<usize> = (1..=2.min(n)).collect();
    let forms: Vec<PointwiseForm> = degrees.iter().map(|&k| random_pointwise(rng, x, k)).collect();
    for i in 0..cfg.samples {
        let w = &forms[i % forms.len()];
        let base = x.sample_point(rng);
        let vs = sample_vectors(rng, x, &base, w.degree());
        rec.case(format!("{name}:roundtrip:{i:03}"), || -> Outcome {
            let vs = vs?;
            let big = psi(x, w).or_error()?;
            let got = psi_inverse_at(x, &big, &base, &vs).or_error()?;
            let want = w.evaluate(&base, &vs).or_error()?;
            check(want.exact() == Some(&got), || {
                json!({"point": base.to_json(), "got": scalar::rational_to_json(&got), "want": want.to_json()})
            })
        });
    }
    let few = (cfg.samples / 4).max(2);
    for i in 0..few {
        let k = degrees[i % degrees.len()];
        let (a, b) = (random_pointwise(rng, x, k), random_pointwise(rng, x, k));
        let f = gen::poly(rng, n, 2, 3);
        let base = x.sample_point(rng);
        let pdim = rng.gen_range(k..=k + 1);
        let p = x.sample_plaque(rng, &base, pdim);
        let m = rng.gen_range(1..=2);
        let phi = gen::poly_map(rng, m, pdim, 2);
        rec.case(format!("{name}:linear:{i:03}"), || -> Outcome {
            let lhs = psi(x, &a.add(&b).or_error()?).or_error()?.eval(&p).or_error()?;
            let rhs = psi(x, &a).or_error()?.add(&psi(x, &b).or_error()?).or_error()?.eval(&p).or_error()?;
            let scaled = psi(x, &a.scale_by(&f)).or_error()?.eval(&p).or_error()?;
            let outer = psi(x, &a).or_error()?.scale_by(&f).eval(&p).or_error()?;
            check(lhs.same_coefficients(&rhs) && scaled.same_coefficients(&outer), || json!({"plaque": p.to_json().ok()}))
        });
        rec.case(format!("{name}:compatibility:{i:03}"), || -> Outcome {
            let r = compatibility_check(&psi(x, &a).or_error()?, &p, &phi).or_error()?;
            check(r.passed, || json!({"witness": r.witness.as_ref().map(|(k, l, r)| json!([k.as_slice(), l.to_string(), r.to_string()]))}))
        });
        let psi_map = near_identity(rng, pdim);
        let dirs = gen::vectors(rng, pdim, k);
        let extra = gen::vectors(rng, pdim, 1).remove(0);
        rec.case(format!("{name}:tangent-condition:{i:03}"), || -> Outcome {
            let p2 = compose(&p, &psi_map).or_error()?;
            let zero = vec![scalar::zero(); pdim];
            let r = tangent_condition_check(x, &psi(x, &a).or_error()?, &p, &zero, &p2, &zero, &dirs, Some(&extra)).or_error()?;
            check(r.passed && r.d_values.is_some(), || {
                json!({"omega": [scalar::rational_to_json(&r.omega_values.0), scalar::rational_to_json(&r.omega_values.1)]})
            })
        });
        let basis = x.tangent_space(&base, rng, 12).map(|t| t.basis).or_error();
        rec.case(format!("{name}:injectivity:{i:03}"), || -> Outcome {
            // A form nonzero on the tangent space is seen by some spanning plaque.
            let big = psi(x, &a).or_error()?;
            let (mut nonzero, mut seen) = (false, false);
            for vs in tangent_tuples(x, &base, &basis?, k)? {
                nonzero |= a.evaluate(&base, &vs).or_error()?.to_f64() != 0.0;
                seen |= psi_inverse_at(x, &big, &base, &vs).or_error()? != scalar::zero();
            }
            check(seen == nonzero, || json!({"point": base.to_json(), "nonzero": nonzero}))
        });
    }
}

/// All `k`-tuples drawn from a basis of the tangent space at `base`.
fn tangent_tuples(x: &DiffSpace, base: &Coords, basis: &[Coords], k: usize) -> Result<Vec<Vec<TangentVector>>, String> {
    let vs: Vec<TangentVector> = basis.iter().map(|v| x.realize_vector(base, v)).collect::<Result<_, _>>().or_error()?;
    Ok(MultiIndex::all(vs.len(), k).into_iter().map(|idx| idx.as_slice().iter().map(|&i| vs[i].clone()).collect()).collect())
}

pub fn run(cfg: &VerifyConfig, rec: &mut Recorder) {
    let mut rng = cfg.rng("psi");
    for x in [make_euclidean(2), make_euclidean(3), make_plane2_space(), make_tangent_planes()] {
        fixture_cases(&x, cfg, &mut rng, rec);
    }
    for n in 2..=3 {
        let x = make_euclidean(n);
        for i in 0..(cfg.samples / 8).max(2) {
            let k = 1 + i % 2;
            let w = random_pointwise(&mut rng, &x, k);
            let fields: Vec<SpaceVectorField> = (0..k)
                .map(|j| SpaceVectorField::new(&format!("xi{j}"), gen::poly_map(&mut rng, n, n, 2)))
                .collect();
            let m = rng.gen_range(1..=2);
            let p = gen::poly_map(&mut rng, m, n, 2);
            rec.case(format!("euclidean:{n}:inverse-along:{i:03}"), || -> Outcome {
                let got = psi_inverse_along(&x, &psi(&x, &w).or_error()?, &fields, &p).or_error()?;
                let want = pointwise_along(&x, &w, &fields, &p).or_error()?;
                check(got == want, || json!({"got": got.to_string(), "want": want.to_string()}))
            });
        }
    }
    let lines = make_lines_plane();
    let area = PointwiseForm::new(2, 2, 2, vec![(vec![0, 1], PolyExpr::one(2))]).expect("literal");
    rec.case("lines:psi-refused", || match psi(&lines, &area) {
        Err(PlaqueFormError::TransversePoints(_)) => pass(),
        other => fail(json!({"result": format!("{other:?}")})),
    });
    for i in 0..(cfg.samples / 4).max(2) {
        let base = lines.sample_point(&mut rng);
        let dirs = gen::vectors(&mut rng, 2, 2);
        rec.case(format!("lines:no-spanning-plaque:{i:03}"), || -> Outcome {
            let det = &dirs[0][0] * &dirs[1][1] - &dirs[0][1] * &dirs[1][0];
            if det == scalar::zero() {
                return pass();
            }
            let vs = dirs
                .iter()
                .map(|d| lines.realize_vector(&base, &Coords::Exact(d.clone())))
                .collect::<Result<Vec<_>, _>>()
                .or_error()?;
            let big = psi_unattested(&lines, &area).or_error()?;
            match psi_inverse_at(&lines, &big, &base, &vs) {
                Err(PlaqueFormError::NoSpanningPlaque(c)) => check(c.contains("line-direction"), || json!({"certificate": c})),
                other => fail(json!({"result": format!("{other:?}")})),
            }
        });
    }
}
