//! Differential forms on boxes: smooth pullbacks and the exterior derivative.

use rand::Rng;
use serde_json::json;

use super::{check, gen, OrError, Outcome, Recorder, VerifyConfig};
use crate::expr::{compose, BoxDomain};
use crate::forms::{differential_of_function, metric_dual, pullback_smooth};
use crate::linalg;
use crate::scalar::Rational;

pub fn run(cfg: &VerifyConfig, rec: &mut Recorder) {
    let mut rng = cfg.rng("forms");
    for i in 0..cfg.samples {
        let (n, m, q) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let k = rng.gen_range(0..=n.min(2));
        let w = gen::differential_form(&mut rng, n, k, 2);
        let d2 = rng.gen_range(0..=1);
        let w2 = gen::differential_form(&mut rng, n, d2, 2);
        let f = gen::poly_map(&mut rng, m, n, 2);
        let g = gen::poly_map(&mut rng, q, m, 1);
        rec.case(format!("pullback:functor:{i:03}"), || -> Outcome {
            let lhs = pullback_smooth(&compose(&f, &g).or_error()?, &w).or_error()?;
            let rhs = pullback_smooth(&g, &pullback_smooth(&f, &w).or_error()?).or_error()?;
            check(lhs.same_coefficients(&rhs), || json!({"form": w.to_json()}))
        });
        rec.case(format!("pullback:wedge:{i:03}"), || -> Outcome {
            let lhs = pullback_smooth(&f, &w.wedge(&w2).or_error()?).or_error()?;
            let rhs = pullback_smooth(&f, &w).or_error()?.wedge(&pullback_smooth(&f, &w2).or_error()?).or_error()?;
            check(lhs.same_coefficients(&rhs), || json!({"a": w.to_json(), "b": w2.to_json()}))
        });
        rec.case(format!("pullback:d:{i:03}"), || -> Outcome {
            let lhs = pullback_smooth(&f, &w.exterior_derivative()).or_error()?;
            let rhs = pullback_smooth(&f, &w).or_error()?.exterior_derivative();
            check(lhs.same_coefficients(&rhs), || json!({"form": w.to_json()}))
        });
        let x: Vec<Rational> = gen::vectors(&mut rng, m, 1).remove(0);
        rec.case(format!("pullback:pointwise:{i:03}"), || -> Outcome {
            let lhs = pullback_smooth(&f, &w).or_error()?.eval_at(&x).or_error()?;
            let fx = f.eval(&x).or_error()?;
            let rhs = w.eval_at(&fx).or_error()?.pullback_linear(&f.jacobian(&x).or_error()?).or_error()?;
            check(lhs == rhs, || json!({"form": w.to_json()}))
        });
        let a = gen::differential_form(&mut rng, n, k, 4);
        let db = rng.gen_range(0..=2);
        let b = gen::differential_form(&mut rng, n, db, 4);
        rec.case(format!("d:squared:{i:03}"), || check(a.exterior_derivative().exterior_derivative().is_zero(), || json!({"form": a.to_json()})));
        rec.case(format!("d:leibniz:{i:03}"), || -> Outcome {
            let lhs = a.wedge(&b).or_error()?.exterior_derivative();
            let sign = if k % 2 == 0 { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
            let rhs = a.exterior_derivative().wedge(&b).or_error()?.add(&a.wedge(&b.exterior_derivative()).or_error()?.scale(&sign)).or_error()?;
            check(lhs.same_coefficients(&rhs), || json!({"a": a.to_json(), "b": b.to_json()}))
        });
        let h = gen::poly(&mut rng, n, 3, 4);
        rec.case(format!("gradient:{i:03}"), || -> Outcome {
            let df = differential_of_function(BoxDomain::whole(n), &h).or_error()?;
            let grad = metric_dual(&df, &linalg::identity(n)).or_error()?;
            let want = h.gradient();
            let got: Vec<_> = (0..n).map(|j| grad.components[j].clone()).collect();
            check(got == want, || json!({"function": h.to_string()}))
        });
    }
}
