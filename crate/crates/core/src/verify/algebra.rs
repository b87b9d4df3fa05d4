//! Exterior algebra laws and linear pullbacks.

use rand::Rng;
use serde_json::json;

use super::{check, gen, OrError, Outcome, Recorder, VerifyConfig};
use crate::diffeology::sampling::random_matrix;
use crate::exterior::{wedge_all, ExteriorForm, MultiIndex};
use crate::linalg::{det, mul};
use crate::scalar::{self, Rational};

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(vec![], true)];
    }
    let mut out = Vec::new();
    for (p, even) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // Inserting at `pos` moves the new element past `len - pos` others.
            let flips = (p.len() - pos) % 2 == 1;
            out.push((q, even != flips));
        }
    }
    out
}

fn factorial(n: usize) -> Rational {
    (1..=n).fold(scalar::one(), |acc, i| acc * scalar::int(i as i64))
}

/// `(a ^ b)(v) = 1/(k! l!) sum_sigma sgn(sigma) a(v_sigma(1..k)) b(v_sigma(k+1..))`.
pub fn wedge_by_permutations(a: &ExteriorForm, b: &ExteriorForm) -> ExteriorForm {
    let (n, k, l) = (a.dim(), a.degree(), b.degree());
    let perms = permutations(k + l);
    let norm = factorial(k) * factorial(l);
    let coeffs: Vec<(Vec<usize>, Rational)> = MultiIndex::all(n, k + l)
        .into_iter()
        .map(|j| {
            let basis: Vec<Vec<Rational>> = j
                .as_slice()
                .iter()
                .map(|&i| (0..n).map(|c| if c == i { scalar::one() } else { scalar::zero() }).collect())
                .collect();
            let mut s = scalar::zero();
            for (p, even) in &perms {
                let va: Vec<_> = p[..k].iter().map(|&i| basis[i].clone()).collect();
                let vb: Vec<_> = p[k..].iter().map(|&i| basis[i].clone()).collect();
                let term = a.evaluate(&va).expect("arity") * b.evaluate(&vb).expect("arity");
                s = if *even { s + term } else { s - term };
            }
            (j.as_slice().to_vec(), s / &norm)
        })
        .collect();
    ExteriorForm::from_coeffs(n, k + l, coeffs).expect("valid indices")
}

fn sign(k: usize, l: usize) -> Rational {
    if (k * l).is_multiple_of(2) {
        scalar::one()
    } else {
        -scalar::one()
    }
}

pub fn run(cfg: &VerifyConfig, rec: &mut Recorder) {
    let mut rng = cfg.rng("algebra");
    for i in 0..cfg.samples {
        let n = rng.gen_range(1..=5);
        let (k, l, m) = (rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=2));
        let a = gen::exterior_form(&mut rng, n, k);
        let b = gen::exterior_form(&mut rng, n, l);
        let c = gen::exterior_form(&mut rng, n, m);
        let b2 = gen::exterior_form(&mut rng, n, l);
        let t = gen::vectors(&mut rng, 1, 1)[0][0].clone();
        rec.case(format!("wedge:skew:{i:03}"), || -> Outcome {
            let ab = a.wedge(&b).or_error()?;
            let ba = b.wedge(&a).or_error()?.scale(&sign(k, l));
            check(ab == ba, || json!({"a": a.to_json(), "b": b.to_json()}))
        });
        rec.case(format!("wedge:assoc:{i:03}"), || -> Outcome {
            let lhs = a.wedge(&b).or_error()?.wedge(&c).or_error()?;
            let rhs = a.wedge(&b.wedge(&c).or_error()?).or_error()?;
            check(lhs == rhs, || json!({"a": a.to_json(), "b": b.to_json(), "c": c.to_json()}))
        });
        rec.case(format!("wedge:bilinear:{i:03}"), || -> Outcome {
            let mixed = b.scale(&t).add(&b2).or_error()?;
            let lhs = a.wedge(&mixed).or_error()?;
            let rhs = a.wedge(&b).or_error()?.scale(&t).add(&a.wedge(&b2).or_error()?).or_error()?;
            check(lhs == rhs, || json!({"a": a.to_json(), "b": b.to_json()}))
        });
        if k + l <= 4 {
            rec.case(format!("wedge:oracle:{i:03}"), || -> Outcome {
                let got = a.wedge(&b).or_error()?;
                let want = wedge_by_permutations(&a, &b);
                check(got == want, || json!({"a": a.to_json(), "b": b.to_json(), "merge": got.to_json(), "oracle": want.to_json()}))
            });
        }
        let kk = rng.gen_range(1..=n.min(3));
        let covs: Vec<ExteriorForm> = gen::vectors(&mut rng, n, kk).iter().map(|v| ExteriorForm::covector(v)).collect();
        let xs = gen::vectors(&mut rng, n, kk);
        rec.case(format!("wedge:det:{i:03}"), || -> Outcome {
            let lhs = wedge_all(n, &covs).or_error()?.evaluate(&xs).or_error()?;
            let m: Vec<Vec<Rational>> =
                xs.iter().map(|x| covs.iter().map(|w| w.evaluate(std::slice::from_ref(x))).collect::<Result<_, _>>()).collect::<Result<_, _>>().or_error()?;
            let rhs = det(&m);
            check(lhs == rhs, || json!({"wedge": scalar::rational_to_json(&lhs), "det": scalar::rational_to_json(&rhs)}))
        });
        let (p, q) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let lm = random_matrix(&mut rng, n, p, 3);
        let mm = random_matrix(&mut rng, p, q, 3);
        let deg = rng.gen_range(0..=n.min(3));
        let w = gen::exterior_form(&mut rng, n, deg);
        let d2 = rng.gen_range(0..=2);
        let w2 = gen::exterior_form(&mut rng, n, d2);
        rec.case(format!("pullback:functor:{i:03}"), || -> Outcome {
            let lhs = w.pullback_linear(&mul(&lm, &mm)).or_error()?;
            let rhs = w.pullback_linear(&lm).or_error()?.pullback_linear(&mm).or_error()?;
            check(lhs == rhs, || json!({"form": w.to_json()}))
        });
        rec.case(format!("pullback:wedge:{i:03}"), || -> Outcome {
            let lhs = w.wedge(&w2).or_error()?.pullback_linear(&lm).or_error()?;
            let rhs = w.pullback_linear(&lm).or_error()?.wedge(&w2.pullback_linear(&lm).or_error()?).or_error()?;
            check(lhs == rhs, || json!({"a": w.to_json(), "b": w2.to_json()}))
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms.iter().filter(|(_, e)| *e).count(), 3);
        let id = perms.iter().find(|(p, _)| p == &vec![0, 1, 2]).unwrap();
        assert!(id.1);
        let swap = perms.iter().find(|(p, _)| p == &vec![1, 0, 2]).unwrap();
        assert!(!swap.1);
    }
}
